//! Locating critical momenta and critical times, deciding whether a quench
//! supports a dynamical phase transition at all, and checking the triad of
//! signatures (Fisher zero, maximal mode entanglement, vanishing OTOC) at a
//! candidate momentum.

use serde::{Deserialize, Serialize};

use crate::diagnostics::{entropy, loschmidt_echo, otoc};
use crate::error::{Error, Result};
use crate::models::{mode_angles, ssh_alignment, ModeGrid};
use crate::quench::QuenchSpec;
use crate::scalar::{lit, Scalar};

/// Outcome of the three signature checks at one momentum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TriadFlags {
    /// Loschmidt echo vanishes at some candidate critical time.
    pub fisher_zero_ok: bool,
    /// Mode entropy sits at ln 2.
    pub entropy_max_ok: bool,
    /// OTOC stays at zero over the sampled times.
    pub otoc_zero_ok: bool,
}

impl TriadFlags {
    pub fn all(&self) -> bool {
        self.fisher_zero_ok && self.entropy_max_ok && self.otoc_zero_ok
    }
}

/// A candidate critical momentum with its time family and signature checks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriticalPoint<T: Scalar> {
    pub k_star: T,
    /// Post-quench mode energy at k_star.
    pub energy_at_kstar: T,
    /// Candidate critical times t*_n, strictly increasing.
    pub critical_times: Vec<T>,
    pub triad: TriadFlags,
}

/// Numeric residuals behind the three triad flags.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TriadResiduals<T: Scalar> {
    /// Minimum Loschmidt echo over the candidate critical times.
    pub fisher_echo_min: T,
    /// |S - ln 2| of the mode entropy.
    pub entropy_deviation: T,
    /// Maximum OTOC over the sampled times.
    pub otoc_max: T,
}

/// Signed quantity whose zero in k defines a critical momentum:
/// cos(2 dth_k) for TFI, the Bloch-vector alignment for SSH.
pub fn critical_condition<T: Scalar>(k: T, spec: &QuenchSpec<T>) -> Result<T> {
    match spec {
        QuenchSpec::Tfi { .. } => {
            let a = mode_angles(k, spec)?;
            Ok((a.delta_theta + a.delta_theta).cos())
        }
        QuenchSpec::Ssh { pre, post } => ssh_alignment(k, pre, post),
    }
}

fn bisect_root<T: Scalar>(
    spec: &QuenchSpec<T>,
    mut lo: T,
    mut c_lo: T,
    mut hi: T,
) -> Result<T> {
    let half = lit::<T>(0.5);
    let mut mid = (lo + hi) * half;
    for _ in 0..200 {
        mid = (lo + hi) * half;
        let c_mid = critical_condition(mid, spec)?;
        if c_mid.abs() < T::root_tol() {
            return Ok(mid);
        }
        if (c_mid > T::zero()) == (c_lo > T::zero()) {
            lo = mid;
            c_lo = c_mid;
        } else {
            hi = mid;
        }
    }
    Ok(mid)
}

/// Finds every critical momentum of the quench on (and just beyond) the grid.
///
/// The condition is even in k, so only the non-negative half of the grid is
/// scanned and each critical |k| is reported once; pi is appended as a virtual
/// endpoint because roots may fall between the last grid momentum and the zone
/// edge. Sign changes between adjacent scan points are refined by bisection
/// until |condition| < 1e-12; gapless scan points are skipped. Returns an
/// empty list when the quench produces no sign change (no transition).
pub fn find_critical_momenta<T: Scalar>(
    spec: &QuenchSpec<T>,
    grid: &ModeGrid<T>,
) -> Result<Vec<T>> {
    if grid.model() != spec.model() {
        return Err(Error::BadGrid {
            reason: "grid model does not match the quench model".to_string(),
        });
    }
    let mut scan: Vec<T> = grid
        .momenta()
        .iter()
        .copied()
        .filter(|k| *k >= T::zero())
        .collect();
    scan.push(T::PI());

    let mut roots: Vec<T> = Vec::new();
    let mut prev: Option<(T, T)> = None;
    for &k in &scan {
        let c = match critical_condition(k, spec) {
            Ok(c) => c,
            Err(Error::GaplessMode { .. }) => {
                prev = None;
                continue;
            }
            Err(e) => return Err(e),
        };
        if c.abs() < T::root_tol() {
            if roots.last().map_or(true, |r| (k - *r).abs() > lit::<T>(1e-9)) {
                roots.push(k);
            }
            prev = None;
            continue;
        }
        if let Some((kp, cp)) = prev {
            if (cp > T::zero()) != (c > T::zero()) {
                let root = bisect_root(spec, kp, cp, k)?;
                if roots.last().map_or(true, |r| (root - *r).abs() > lit::<T>(1e-9)) {
                    roots.push(root);
                }
            }
        }
        prev = Some((k, c));
    }
    Ok(roots)
}

/// Critical times of a verified critical momentum: the zeros of the mode's
/// Loschmidt amplitude, t*_n = (2n+1) pi / (2 E) for n = 0 ..= n_max, with E
/// the post-quench mode energy at k_star.
///
/// Rejects momenta whose |critical condition| exceeds 1e-8.
pub fn critical_times<T: Scalar>(
    k_star: T,
    spec: &QuenchSpec<T>,
    n_max: usize,
) -> Result<Vec<T>> {
    let cond = critical_condition(k_star, spec)?;
    if cond.abs() > lit::<T>(1e-8) {
        return Err(Error::NotCritical {
            k: k_star.to_f64().unwrap_or(f64::NAN),
            condition: cond.to_f64().unwrap_or(f64::NAN),
        });
    }
    let a = mode_angles(k_star, spec)?;
    let quarter = T::PI() / (a.energy_post + a.energy_post);
    Ok((0..=n_max)
        .map(|n| T::from_usize(2 * n + 1).expect("small odd integer") * quarter)
        .collect())
}

/// Numeric residuals of the triad checks at a momentum: minimum echo over the
/// first four candidate critical times, entropy deviation from ln 2, and
/// maximum OTOC over `t_samples`.
pub fn triad_residuals<T: Scalar>(
    k: T,
    spec: &QuenchSpec<T>,
    t_samples: &[T],
) -> Result<TriadResiduals<T>> {
    if t_samples.is_empty() {
        return Err(Error::EmptyTimeGrid);
    }
    let a = mode_angles(k, spec)?;
    let quarter = T::PI() / (a.energy_post + a.energy_post);
    let mut fisher_echo_min = T::infinity();
    for n in 0..4usize {
        let t = T::from_usize(2 * n + 1).expect("small odd integer") * quarter;
        fisher_echo_min = fisher_echo_min.min(loschmidt_echo(k, spec, t)?);
    }
    let entropy_deviation = (entropy(k, spec)? - T::LN_2()).abs();
    let mut otoc_max = T::zero();
    for &t in t_samples {
        otoc_max = otoc_max.max(otoc(k, spec, t)?);
    }
    Ok(TriadResiduals {
        fisher_echo_min,
        entropy_deviation,
        otoc_max,
    })
}

/// Checks the three critical signatures at a candidate momentum.
///
/// The echo is compared against tol^2 (it is a squared amplitude), the other
/// two against tol. The returned `critical_times` are the first four
/// candidates t*_n; the flags say whether they are genuine.
pub fn verify_triad<T: Scalar>(
    k_star: T,
    spec: &QuenchSpec<T>,
    t_samples: &[T],
    tol: T,
) -> Result<CriticalPoint<T>> {
    let res = triad_residuals(k_star, spec, t_samples)?;
    let a = mode_angles(k_star, spec)?;
    let quarter = T::PI() / (a.energy_post + a.energy_post);
    let critical_times = (0..4usize)
        .map(|n| T::from_usize(2 * n + 1).expect("small odd integer") * quarter)
        .collect();
    Ok(CriticalPoint {
        k_star,
        energy_at_kstar: a.energy_post,
        critical_times,
        triad: TriadFlags {
            fisher_zero_ok: res.fisher_echo_min < tol * tol,
            entropy_max_ok: res.entropy_deviation < tol,
            otoc_zero_ok: res.otoc_max < tol,
        },
    })
}
