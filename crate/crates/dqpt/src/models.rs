//! Single-mode Hamiltonians, diagonalizing angles, dispersions, and momentum
//! grids for the transverse-field Ising (TFI) and Su-Schrieffer-Heeger (SSH)
//! chains.
//!
//! Both chains reduce to independent 2-level problems per momentum. The TFI
//! chain uses the antiperiodic fermion sector, so its grid holds only k > 0
//! and each k stands for the (k, -k) pair; the SSH grid covers the full
//! Brillouin zone.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quench::QuenchSpec;
use crate::scalar::{lit, Scalar};
use crate::smalllin::ComplexMatrix;

/// Which chain a grid or quench refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    Tfi,
    Ssh,
}

/// TFI couplings: ferromagnetic exchange `j > 0` and transverse field `h`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TfiParams<T: Scalar> {
    j: T,
    h: T,
}

impl<T: Scalar> TfiParams<T> {
    pub fn new(j: T, h: T) -> Result<Self> {
        if !j.is_finite() || j <= T::zero() {
            return Err(Error::BadParams {
                reason: format!("ferromagnetic coupling j must be positive and finite, got {j}"),
            });
        }
        if !h.is_finite() {
            return Err(Error::BadParams {
                reason: format!("transverse field h must be finite, got {h}"),
            });
        }
        Ok(Self { j, h })
    }

    pub fn j(&self) -> T {
        self.j
    }

    pub fn h(&self) -> T {
        self.h
    }
}

/// SSH hoppings: intra-cell `t1` and inter-cell `t2`, both non-negative.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SshParams<T: Scalar> {
    t1: T,
    t2: T,
}

impl<T: Scalar> SshParams<T> {
    pub fn new(t1: T, t2: T) -> Result<Self> {
        if !t1.is_finite() || t1 < T::zero() {
            return Err(Error::BadParams {
                reason: format!("intra-cell hopping t1 must be non-negative and finite, got {t1}"),
            });
        }
        if !t2.is_finite() || t2 < T::zero() {
            return Err(Error::BadParams {
                reason: format!("inter-cell hopping t2 must be non-negative and finite, got {t2}"),
            });
        }
        if t1 == T::zero() && t2 == T::zero() {
            return Err(Error::BadParams {
                reason: "hoppings t1 and t2 must not both be zero".to_string(),
            });
        }
        Ok(Self { t1, t2 })
    }

    pub fn t1(&self) -> T {
        self.t1
    }

    pub fn t2(&self) -> T {
        self.t2
    }
}

/// Bogoliubov-de Gennes matrix of one TFI momentum:
/// [[-J cos k - h, iJ sin k], [-iJ sin k, J cos k + h]].
pub fn tfi_bdg_matrix<T: Scalar>(k: T, p: &TfiParams<T>) -> ComplexMatrix<T> {
    let a = p.j * k.cos() + p.h;
    let b = p.j * k.sin();
    let z = T::zero();
    ComplexMatrix::from_vec(
        2,
        vec![
            Complex::new(-a, z),
            Complex::new(z, b),
            Complex::new(z, -b),
            Complex::new(a, z),
        ],
    )
    .expect("2x2")
}

/// Bogoliubov angle theta_k = atan2(J sin k, h + J cos k) / 2, in (-pi/2, pi/2].
///
/// Errors when the mode is gapless (both atan2 arguments vanish).
pub fn tfi_angle<T: Scalar>(k: T, p: &TfiParams<T>) -> Result<T> {
    let y = p.j * k.sin();
    let x = p.h + p.j * k.cos();
    let energy = x.hypot(y);
    if energy < T::tol_gapless() {
        return Err(Error::GaplessMode {
            k: k.to_f64().unwrap_or(f64::NAN),
            energy: energy.to_f64().unwrap_or(f64::NAN),
        });
    }
    Ok(y.atan2(x) / lit::<T>(2.0))
}

/// Quasiparticle dispersion eps_k = sqrt((h + J cos k)^2 + J^2 sin^2 k).
pub fn tfi_dispersion<T: Scalar>(k: T, p: &TfiParams<T>) -> T {
    (p.h + p.j * k.cos()).hypot(p.j * k.sin())
}

/// SSH Bloch vector d_k = (t1 + t2 cos k, t2 sin k, 0).
pub fn ssh_bloch_vector<T: Scalar>(k: T, p: &SshParams<T>) -> (T, T, T) {
    (p.t1 + p.t2 * k.cos(), p.t2 * k.sin(), T::zero())
}

/// Polar angle of the SSH Bloch vector, atan2(d_y, d_x) in (-pi, pi].
///
/// Errors when the Bloch vector vanishes (gap closing).
pub fn ssh_angle<T: Scalar>(k: T, p: &SshParams<T>) -> Result<T> {
    let (dx, dy, _) = ssh_bloch_vector(k, p);
    let energy = dx.hypot(dy);
    if energy < T::tol_gapless() {
        return Err(Error::GaplessMode {
            k: k.to_f64().unwrap_or(f64::NAN),
            energy: energy.to_f64().unwrap_or(f64::NAN),
        });
    }
    Ok(dy.atan2(dx))
}

/// Alignment of the pre- and post-quench Bloch vectors at one momentum:
/// the dot product of their unit vectors.
///
/// Errors when either vector vanishes (gapless point).
pub fn ssh_alignment<T: Scalar>(k: T, pre: &SshParams<T>, post: &SshParams<T>) -> Result<T> {
    let (xi, yi, _) = ssh_bloch_vector(k, pre);
    let (xf, yf, _) = ssh_bloch_vector(k, post);
    let ni = xi.hypot(yi);
    let nf = xf.hypot(yf);
    let small = ni.min(nf);
    if small < T::tol_gapless() {
        return Err(Error::GaplessMode {
            k: k.to_f64().unwrap_or(f64::NAN),
            energy: small.to_f64().unwrap_or(f64::NAN),
        });
    }
    Ok((xi * xf + yi * yf) / (ni * nf))
}

/// Pre/post angles of one mode under a quench, their difference, and the
/// post-quench energy of the mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeAngles<T: Scalar> {
    pub theta_pre: T,
    pub theta_post: T,
    /// theta_post - theta_pre, exactly.
    pub delta_theta: T,
    /// Post-quench quasiparticle energy: eps_k (TFI) or |d_k| (SSH).
    pub energy_post: T,
}

/// Bundles the pre- and post-quench angle data a mode's diagnostics need.
///
/// Errors if either the pre- or post-quench Hamiltonian is gapless at `k`.
pub fn mode_angles<T: Scalar>(k: T, spec: &QuenchSpec<T>) -> Result<ModeAngles<T>> {
    let (theta_pre, theta_post, energy_post) = match spec {
        QuenchSpec::Tfi { pre, post } => (
            tfi_angle(k, pre)?,
            tfi_angle(k, post)?,
            tfi_dispersion(k, post),
        ),
        QuenchSpec::Ssh { pre, post } => {
            let (dx, dy, _) = ssh_bloch_vector(k, post);
            (ssh_angle(k, pre)?, ssh_angle(k, post)?, dx.hypot(dy))
        }
    };
    Ok(ModeAngles {
        theta_pre,
        theta_post,
        delta_theta: theta_post - theta_pre,
        energy_post,
    })
}

/// Momentum grid of an N-cell chain.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeGrid<T: Scalar> {
    model: Model,
    n_cells: usize,
    momenta: Vec<T>,
}

impl<T: Scalar> ModeGrid<T> {
    /// TFI: k = (2m+1) pi / N for m = 0 .. N/2 - 1, inside (0, pi); N even.
    /// SSH: k = 2 pi m / N - pi for m = 0 .. N - 1, covering [-pi, pi).
    pub fn new(model: Model, n_cells: usize) -> Result<Self> {
        if n_cells == 0 {
            return Err(Error::BadGrid {
                reason: "chain needs at least one cell".to_string(),
            });
        }
        let n = T::from_usize(n_cells).ok_or_else(|| Error::BadGrid {
            reason: format!("cell count {n_cells} not representable in the scalar type"),
        })?;
        let momenta = match model {
            Model::Tfi => {
                if n_cells % 2 != 0 {
                    return Err(Error::BadGrid {
                        reason: format!(
                            "TFI grid needs an even number of cells, got {n_cells}"
                        ),
                    });
                }
                (0..n_cells / 2)
                    .map(|m| {
                        let odd = T::from_usize(2 * m + 1).expect("below n_cells");
                        odd * T::PI() / n
                    })
                    .collect()
            }
            Model::Ssh => (0..n_cells)
                .map(|m| {
                    let two_m = T::from_usize(2 * m).expect("below 2 n_cells");
                    two_m * T::PI() / n - T::PI()
                })
                .collect(),
        };
        Ok(Self {
            model,
            n_cells,
            momenta,
        })
    }

    pub fn model(&self) -> Model {
        self.model
    }

    pub fn n_cells(&self) -> usize {
        self.n_cells
    }

    pub fn momenta(&self) -> &[T] {
        &self.momenta
    }
}
