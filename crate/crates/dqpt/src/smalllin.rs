//! Dense complex linear algebra for 2x2 and 4x4 Hermitian matrices.
//!
//! This is the numerical substrate of the brute-force verification path:
//! eigendecomposition (cyclic complex Jacobi), unitary time evolution,
//! partial trace over a two-factor Fock space, and von Neumann entropy.
//! Dimensions are fixed to 2 and 4 because every per-mode Hilbert space in
//! the models is at most 4-dimensional.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::{lit, Scalar};

/// Row-major dense complex matrix of dimension 2 or 4.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix<T: Scalar> {
    dim: usize,
    entries: Vec<Complex<T>>,
}

/// Which tensor factor survives a partial trace.
///
/// The 4-dimensional basis is ordered so that basis index = 2*n_first + n_second.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subsystem {
    First,
    Second,
}

fn check_dim(dim: usize) -> Result<()> {
    if dim == 2 || dim == 4 {
        Ok(())
    } else {
        Err(Error::BadDimension {
            dim,
            expected: "2 or 4",
        })
    }
}

impl<T: Scalar> ComplexMatrix<T> {
    pub fn zeros(dim: usize) -> Result<Self> {
        check_dim(dim)?;
        Ok(Self {
            dim,
            entries: vec![Complex::new(T::zero(), T::zero()); dim * dim],
        })
    }

    pub fn identity(dim: usize) -> Result<Self> {
        let mut m = Self::zeros(dim)?;
        for i in 0..dim {
            m.set(i, i, Complex::new(T::one(), T::zero()));
        }
        Ok(m)
    }

    pub fn from_vec(dim: usize, entries: Vec<Complex<T>>) -> Result<Self> {
        check_dim(dim)?;
        if entries.len() != dim * dim {
            return Err(Error::BadDimension {
                dim: entries.len(),
                expected: "dim * dim entries",
            });
        }
        Ok(Self { dim, entries })
    }

    /// Outer product |psi><psi| of a normalized state.
    pub fn projector(state: &[Complex<T>]) -> Result<Self> {
        check_dim(state.len())?;
        let dim = state.len();
        let mut m = Self::zeros(dim)?;
        for i in 0..dim {
            for j in 0..dim {
                m.set(i, j, state[i] * state[j].conj());
            }
        }
        Ok(m)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex<T> {
        self.entries[i * self.dim + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Complex<T>) {
        self.entries[i * self.dim + j] = v;
    }

    pub fn adjoint(&self) -> Self {
        let mut m = self.clone();
        for i in 0..self.dim {
            for j in 0..self.dim {
                m.set(i, j, self.get(j, i).conj());
            }
        }
        m
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        let n = self.dim;
        let mut out = Self::zeros(n).expect("dims match");
        for i in 0..n {
            for j in 0..n {
                let mut acc = Complex::new(T::zero(), T::zero());
                for l in 0..n {
                    acc = acc + self.get(i, l) * rhs.get(l, j);
                }
                out.set(i, j, acc);
            }
        }
        out
    }

    pub fn apply(&self, v: &[Complex<T>]) -> Vec<Complex<T>> {
        let n = self.dim;
        let mut out = vec![Complex::new(T::zero(), T::zero()); n];
        for i in 0..n {
            for j in 0..n {
                out[i] = out[i] + self.get(i, j) * v[j];
            }
        }
        out
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let mut m = self.clone();
        for (a, b) in m.entries.iter_mut().zip(rhs.entries.iter()) {
            *a = *a + *b;
        }
        m
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        let mut m = self.clone();
        for (a, b) in m.entries.iter_mut().zip(rhs.entries.iter()) {
            *a = *a - *b;
        }
        m
    }

    pub fn scaled(&self, s: Complex<T>) -> Self {
        let mut m = self.clone();
        for a in m.entries.iter_mut() {
            *a = *a * s;
        }
        m
    }

    pub fn trace(&self) -> Complex<T> {
        let mut acc = Complex::new(T::zero(), T::zero());
        for i in 0..self.dim {
            acc = acc + self.get(i, i);
        }
        acc
    }

    /// max_ij |A[i][j] - conj(A[j][i])|
    pub fn max_asymmetry(&self) -> T {
        let mut worst = T::zero();
        for i in 0..self.dim {
            for j in 0..self.dim {
                let d = (self.get(i, j) - self.get(j, i).conj()).norm();
                if d > worst {
                    worst = d;
                }
            }
        }
        worst
    }

    pub fn max_abs(&self) -> T {
        let mut worst = T::zero();
        for e in &self.entries {
            let d = e.norm();
            if d > worst {
                worst = d;
            }
        }
        worst
    }

    fn check_hermitian(&self) -> Result<()> {
        let asym = self.max_asymmetry();
        if asym < T::tol_hermitian() {
            Ok(())
        } else {
            Err(Error::NotHermitian {
                max_asymmetry: asym.to_f64().unwrap_or(f64::NAN),
            })
        }
    }

    /// (A + A^dagger)/2 — removes float-level asymmetry before iterating.
    fn symmetrized(&self) -> Self {
        let half = Complex::new(lit::<T>(0.5), T::zero());
        self.add(&self.adjoint()).scaled(half)
    }
}

pub type EigPair<T> = (Vec<T>, ComplexMatrix<T>);

/// Eigendecomposition of a Hermitian matrix by cyclic complex Jacobi rotations.
///
/// Returns eigenvalues in ascending order and the matching unitary of column
/// eigenvectors, so `m = V diag(w) V^dagger` within `Scalar::tol_reconstruct`.
pub fn eig_hermitian<T: Scalar>(m: &ComplexMatrix<T>) -> Result<EigPair<T>> {
    m.check_hermitian()?;
    let n = m.dim;
    let mut a = m.symmetrized();
    let mut v = ComplexMatrix::identity(n)?;

    let scale = a.max_abs().max(T::one());
    let stop = T::epsilon() * scale;
    for _sweep in 0..60 {
        let mut off = T::zero();
        for p in 0..n {
            for q in (p + 1)..n {
                let b = a.get(p, q).norm();
                if b > off {
                    off = b;
                }
            }
        }
        if off <= stop {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let beta = a.get(p, q);
                let babs = beta.norm();
                if babs <= stop * T::epsilon() {
                    continue;
                }
                let phase = beta / Complex::new(babs, T::zero());
                let alpha = a.get(p, p).re;
                let gamma = a.get(q, q).re;
                // zero the (p, q) element: tan(2 theta) = 2|b| / (alpha - gamma)
                let tau = (gamma - alpha) / (babs + babs);
                let t = if tau >= T::zero() {
                    -T::one() / (tau + (T::one() + tau * tau).sqrt())
                } else {
                    T::one() / (-tau + (T::one() + tau * tau).sqrt())
                };
                let c = T::one() / (T::one() + t * t).sqrt();
                let s = t * c;
                let cs = Complex::new(c, T::zero());
                let sp = phase * Complex::new(s, T::zero());

                for r in 0..n {
                    let arp = a.get(r, p);
                    let arq = a.get(r, q);
                    a.set(r, p, arp * cs + arq * sp.conj());
                    a.set(r, q, arq * cs - arp * sp);
                }
                for r in 0..n {
                    let apr = a.get(p, r);
                    let aqr = a.get(q, r);
                    a.set(p, r, apr * cs + aqr * sp);
                    a.set(q, r, aqr * cs - apr * sp.conj());
                }
                for r in 0..n {
                    let vrp = v.get(r, p);
                    let vrq = v.get(r, q);
                    v.set(r, p, vrp * cs + vrq * sp.conj());
                    v.set(r, q, vrq * cs - vrp * sp);
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<T> = (0..n).map(|i| a.get(i, i).re).collect();
    order.sort_by(|&i, &j| diag[i].partial_cmp(&diag[j]).expect("finite eigenvalues"));

    let eigenvalues: Vec<T> = order.iter().map(|&i| diag[i]).collect();
    let mut vectors = ComplexMatrix::zeros(n)?;
    for (col, &src) in order.iter().enumerate() {
        for r in 0..n {
            vectors.set(r, col, v.get(r, src));
        }
    }
    Ok((eigenvalues, vectors))
}

pub fn vec_norm<T: Scalar>(v: &[Complex<T>]) -> T {
    v.iter()
        .fold(T::zero(), |acc, z| acc + z.norm_sqr())
        .sqrt()
}

/// <a|b> with the first argument conjugated.
pub fn vdot<T: Scalar>(a: &[Complex<T>], b: &[Complex<T>]) -> Complex<T> {
    a.iter()
        .zip(b.iter())
        .fold(Complex::new(T::zero(), T::zero()), |acc, (x, y)| {
            acc + x.conj() * *y
        })
}

/// exp(-i H t) |psi> through the eigendecomposition of H.
///
/// `t = 0` returns the input exactly, bit for bit.
pub fn evolve<T: Scalar>(
    hamiltonian: &ComplexMatrix<T>,
    state: &[Complex<T>],
    t: T,
) -> Result<Vec<Complex<T>>> {
    if state.len() != hamiltonian.dim {
        return Err(Error::BadDimension {
            dim: state.len(),
            expected: "state length = matrix dim",
        });
    }
    let norm = vec_norm(state);
    if (norm - T::one()).abs() >= T::tol_state() {
        return Err(Error::NotNormalized {
            norm: norm.to_f64().unwrap_or(f64::NAN),
        });
    }
    if t == T::zero() {
        return Ok(state.to_vec());
    }
    let (w, v) = eig_hermitian(hamiltonian)?;
    let n = hamiltonian.dim;
    // coefficients in the eigenbasis, phased, then back
    let mut coeff = vec![Complex::new(T::zero(), T::zero()); n];
    for j in 0..n {
        for r in 0..n {
            coeff[j] = coeff[j] + v.get(r, j).conj() * state[r];
        }
    }
    for j in 0..n {
        coeff[j] = coeff[j] * Complex::from_polar(T::one(), -w[j] * t);
    }
    let mut out = vec![Complex::new(T::zero(), T::zero()); n];
    for r in 0..n {
        for j in 0..n {
            out[r] = out[r] + v.get(r, j) * coeff[j];
        }
    }
    Ok(out)
}

/// Validated density matrix: Hermitian, unit trace, spectrum >= -tol.
#[derive(Debug, Clone)]
pub struct DensityMatrix<T: Scalar> {
    m: ComplexMatrix<T>,
}

impl<T: Scalar> DensityMatrix<T> {
    pub fn new(m: ComplexMatrix<T>) -> Result<Self> {
        let asym = m.max_asymmetry();
        if asym >= T::tol_state() {
            return Err(Error::BadDensityMatrix {
                reason: "not Hermitian",
                value: asym.to_f64().unwrap_or(f64::NAN),
            });
        }
        let tr = m.trace();
        let tr_dev = (tr.re - T::one()).abs().max(tr.im.abs());
        if tr_dev >= T::tol_state() {
            return Err(Error::BadDensityMatrix {
                reason: "trace is not 1",
                value: tr_dev.to_f64().unwrap_or(f64::NAN),
            });
        }
        let (w, _) = eig_hermitian(&m)?;
        if let Some(min) = w.first() {
            if *min < -T::tol_state() {
                return Err(Error::BadDensityMatrix {
                    reason: "negative eigenvalue",
                    value: min.to_f64().unwrap_or(f64::NAN),
                });
            }
        }
        Ok(Self { m })
    }

    /// |psi><psi| of a normalized pure state.
    pub fn pure(state: &[Complex<T>]) -> Result<Self> {
        let norm = vec_norm(state);
        if (norm - T::one()).abs() >= T::tol_state() {
            return Err(Error::NotNormalized {
                norm: norm.to_f64().unwrap_or(f64::NAN),
            });
        }
        Self::new(ComplexMatrix::projector(state)?)
    }

    pub fn dim(&self) -> usize {
        self.m.dim()
    }

    pub fn matrix(&self) -> &ComplexMatrix<T> {
        &self.m
    }
}

/// Trace out one factor of a 4-dimensional density matrix.
///
/// Basis convention: index = 2*n_first + n_second.
pub fn partial_trace<T: Scalar>(
    rho: &DensityMatrix<T>,
    keep: Subsystem,
) -> Result<DensityMatrix<T>> {
    if rho.dim() != 4 {
        return Err(Error::BadDimension {
            dim: rho.dim(),
            expected: "4",
        });
    }
    let mut out = ComplexMatrix::zeros(2)?;
    for a in 0..2 {
        for b in 0..2 {
            let mut acc = Complex::new(T::zero(), T::zero());
            for c in 0..2 {
                let (i, j) = match keep {
                    Subsystem::First => (2 * a + c, 2 * b + c),
                    Subsystem::Second => (2 * c + a, 2 * c + b),
                };
                acc = acc + rho.m.get(i, j);
            }
            out.set(a, b, acc);
        }
    }
    DensityMatrix::new(out)
}

/// -sum_i w_i ln w_i over the spectrum of rho, in nats.
///
/// Eigenvalues in [-tol, 0) are clamped to zero; anything below the entropy
/// cutoff contributes nothing (0 ln 0 := 0).
pub fn von_neumann_entropy<T: Scalar>(rho: &DensityMatrix<T>) -> Result<T> {
    let tr = rho.m.trace();
    let tr_dev = (tr.re - T::one()).abs().max(tr.im.abs());
    if tr_dev >= T::tol_state() {
        return Err(Error::BadDensityMatrix {
            reason: "trace is not 1",
            value: tr_dev.to_f64().unwrap_or(f64::NAN),
        });
    }
    let (w, _) = eig_hermitian(&rho.m)?;
    let mut s = T::zero();
    for &x in &w {
        let x = if x < T::zero() { T::zero() } else { x };
        if x > T::entropy_eig_cutoff() {
            s = s - x * x.ln();
        }
    }
    Ok(s)
}
