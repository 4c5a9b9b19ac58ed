//! Closed-form mode-resolved diagnostics: entanglement entropy of a momentum
//! mode, Loschmidt amplitude/echo (with the global rate function), and the
//! out-of-time-ordered correlator (OTOC).
//!
//! Every function here is an analytic expression in the mode angles; the
//! matching brute-force evaluations live in the oracle module.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::models::{mode_angles, ssh_alignment, ModeGrid};
use crate::quench::QuenchSpec;
use crate::scalar::{lit, Scalar};

/// All three diagnostics of one mode at one time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagnosticsSample<T: Scalar> {
    pub k: T,
    pub t: T,
    /// Mode entanglement entropy in nats, in [0, ln 2].
    pub entropy: T,
    /// Per-mode Loschmidt echo, in [0, 1].
    pub loschmidt_echo: T,
    /// Per-mode OTOC, non-negative.
    pub otoc: T,
}

impl<T: Scalar> DiagnosticsSample<T> {
    /// Evaluates all three closed forms at (k, t).
    pub fn evaluate(k: T, spec: &QuenchSpec<T>, t: T) -> Result<Self> {
        Ok(Self {
            k,
            t,
            entropy: entropy(k, spec)?,
            loschmidt_echo: loschmidt_echo(k, spec, t)?,
            otoc: otoc(k, spec, t)?,
        })
    }
}

/// Rate function value at one time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateFunctionSample<T: Scalar> {
    pub t: T,
    /// Loschmidt rate per cell, non-negative.
    pub lambda: T,
}

/// Binary entropy -p ln p - (1-p) ln(1-p) in nats, with 0 ln 0 := 0.
pub(crate) fn binent<T: Scalar>(p: T) -> T {
    let p = p.max(T::zero()).min(T::one());
    let q = T::one() - p;
    let mut s = T::zero();
    if p > T::zero() {
        s = s - p * p.ln();
    }
    if q > T::zero() {
        s = s - q * q.ln();
    }
    s
}

/// TFI mode entropy S_k = binent(cos^2 dth_k); time-independent.
pub fn entropy_tfi<T: Scalar>(k: T, spec: &QuenchSpec<T>) -> Result<T> {
    if let QuenchSpec::Ssh { .. } = spec {
        return Err(Error::BadParams {
            reason: "pair-basis entropy needs a TFI quench".to_string(),
        });
    }
    let a = mode_angles(k, spec)?;
    Ok(binent(a.delta_theta.cos().powi(2)))
}

/// SSH mode entropy S_k = binent(cos^2(dth_k/2)) over the band bipartition;
/// time-independent.
pub fn entropy_ssh<T: Scalar>(k: T, spec: &QuenchSpec<T>) -> Result<T> {
    if let QuenchSpec::Tfi { .. } = spec {
        return Err(Error::BadParams {
            reason: "band-basis entropy needs an SSH quench".to_string(),
        });
    }
    let a = mode_angles(k, spec)?;
    Ok(binent((a.delta_theta / lit::<T>(2.0)).cos().powi(2)))
}

/// Mode entropy for either model.
pub fn entropy<T: Scalar>(k: T, spec: &QuenchSpec<T>) -> Result<T> {
    match spec {
        QuenchSpec::Tfi { .. } => entropy_tfi(k, spec),
        QuenchSpec::Ssh { .. } => entropy_ssh(k, spec),
    }
}

/// Per-mode Loschmidt amplitude.
///
/// TFI: G_k(t) = cos^2(dth) e^{-i eps t} + sin^2(dth) e^{+i eps t}.
/// SSH: G_k(t) = cos(E t) + i (dhat_i . dhat_f) sin(E t).
pub fn loschmidt_amplitude<T: Scalar>(
    k: T,
    spec: &QuenchSpec<T>,
    t: T,
) -> Result<Complex<T>> {
    match spec {
        QuenchSpec::Tfi { .. } => {
            let a = mode_angles(k, spec)?;
            let p = a.delta_theta.cos().powi(2);
            let q = a.delta_theta.sin().powi(2);
            let phase = a.energy_post * t;
            Ok(Complex::from_polar(p, -phase) + Complex::from_polar(q, phase))
        }
        QuenchSpec::Ssh { pre, post } => {
            let align = ssh_alignment(k, pre, post)?;
            let a = mode_angles(k, spec)?;
            let phase = a.energy_post * t;
            Ok(Complex::new(phase.cos(), align * phase.sin()))
        }
    }
}

/// TFI per-mode Loschmidt echo
/// L_k = p^2 + q^2 + 2 p q cos(2 eps t), p = cos^2 dth, q = sin^2 dth,
/// clamped into [0, 1].
pub fn loschmidt_echo_tfi<T: Scalar>(k: T, spec: &QuenchSpec<T>, t: T) -> Result<T> {
    if let QuenchSpec::Ssh { .. } = spec {
        return Err(Error::BadParams {
            reason: "pair-basis echo needs a TFI quench".to_string(),
        });
    }
    let a = mode_angles(k, spec)?;
    let p = a.delta_theta.cos().powi(2);
    let q = a.delta_theta.sin().powi(2);
    let two = lit::<T>(2.0);
    let l = p * p + q * q + two * p * q * (two * a.energy_post * t).cos();
    Ok(l.max(T::zero()).min(T::one()))
}

/// Per-mode Loschmidt echo |G_k(t)|^2 for either model, clamped into [0, 1].
pub fn loschmidt_echo<T: Scalar>(k: T, spec: &QuenchSpec<T>, t: T) -> Result<T> {
    match spec {
        QuenchSpec::Tfi { .. } => loschmidt_echo_tfi(k, spec, t),
        QuenchSpec::Ssh { .. } => {
            let g = loschmidt_amplitude(k, spec, t)?;
            Ok(g.norm_sqr().max(T::zero()).min(T::one()))
        }
    }
}

/// TFI per-mode OTOC C_k(t) = sin^2(2 th_post) sin^2(eps t) cos^2(2 dth).
pub fn otoc_tfi<T: Scalar>(k: T, spec: &QuenchSpec<T>, t: T) -> Result<T> {
    if let QuenchSpec::Ssh { .. } = spec {
        return Err(Error::BadParams {
            reason: "pair-basis OTOC needs a TFI quench".to_string(),
        });
    }
    let a = mode_angles(k, spec)?;
    let two = lit::<T>(2.0);
    let s1 = (two * a.theta_post).sin().powi(2);
    let s2 = (a.energy_post * t).sin().powi(2);
    let c = (two * a.delta_theta).cos().powi(2);
    Ok(s1 * s2 * c)
}

/// SSH per-mode OTOC C_k(t) = sin^2(th_post) sin^2(E t) cos^2(dth).
pub fn otoc_ssh<T: Scalar>(k: T, spec: &QuenchSpec<T>, t: T) -> Result<T> {
    if let QuenchSpec::Tfi { .. } = spec {
        return Err(Error::BadParams {
            reason: "band-basis OTOC needs an SSH quench".to_string(),
        });
    }
    let a = mode_angles(k, spec)?;
    let s1 = a.theta_post.sin().powi(2);
    let s2 = (a.energy_post * t).sin().powi(2);
    let c = a.delta_theta.cos().powi(2);
    Ok(s1 * s2 * c)
}

/// Per-mode OTOC for either model.
pub fn otoc<T: Scalar>(k: T, spec: &QuenchSpec<T>, t: T) -> Result<T> {
    match spec {
        QuenchSpec::Tfi { .. } => otoc_tfi(k, spec, t),
        QuenchSpec::Ssh { .. } => otoc_ssh(k, spec, t),
    }
}

/// Loschmidt rate function lambda(t) = -(1/N) sum_k ln L_k(t) over the grid,
/// with N the cell count.
///
/// The TFI grid holds each (k, -k) pair once; the SSH grid covers the full
/// Brillouin zone. Echoes below the log floor are clamped so exact Fisher
/// zeros stay finite; gapless modes are skipped. Modes are summed serially in
/// ascending-k grid order, so the value does not depend on thread count.
pub fn rate_function<T: Scalar>(spec: &QuenchSpec<T>, grid: &ModeGrid<T>, t: T) -> Result<T> {
    if grid.model() != spec.model() {
        return Err(Error::BadGrid {
            reason: "grid model does not match the quench model".to_string(),
        });
    }
    let mut acc = T::zero();
    for &k in grid.momenta() {
        let l = match loschmidt_echo(k, spec, t) {
            Ok(l) => l,
            Err(Error::GaplessMode { .. }) => continue,
            Err(e) => return Err(e),
        };
        acc = acc - l.max(T::echo_floor()).ln();
    }
    let n = T::from_usize(grid.n_cells()).ok_or_else(|| Error::BadGrid {
        reason: format!(
            "cell count {} not representable in the scalar type",
            grid.n_cells()
        ),
    })?;
    Ok(acc / n)
}
