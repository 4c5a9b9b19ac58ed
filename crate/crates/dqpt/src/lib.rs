//! Mode-resolved information diagnostics of dynamical quantum phase
//! transitions (DQPTs) after a sudden quench, for two exactly solvable
//! fermionic chains: the transverse-field Ising model (TFI, treated through
//! its Jordan-Wigner fermions) and the Su-Schrieffer-Heeger (SSH) chain.
//!
//! Translation invariance reduces both models to independent two-level
//! problems, one per momentum mode, so every diagnostic has both a closed
//! form and an independently computable brute-force counterpart:
//!
//! * [`models`] / [`quench`] — Bogoliubov/Bloch angles, dispersions, momentum
//!   grids, and the post-quench state of a single mode.
//! * [`diagnostics`] — per-mode Loschmidt echo, momentum-space entanglement
//!   entropy, a momentum-resolved out-of-time-order correlator (OTOC), and
//!   the volume-averaged rate function.
//! * [`criticality`] — critical momenta k*, the ladder of critical times
//!   t*_n, and the triad of signatures (Fisher zero, maximal mode entropy,
//!   vanishing OTOC) that coincide at k*.
//! * [`oracle`] — a deliberately naive 4x4 Fock-space reference
//!   implementation used to validate every closed form.
//! * [`sweep`] — parallel (momentum, time) sweeps and cusp detection on the
//!   rate function.
//! * [`cli`] — the `dqpt` binary: sweeps, criticality reports, and
//!   closed-vs-reference verification with reproducible artifacts.
//!
//! The numerics are generic over the floating-point scalar through
//! [`scalar::Scalar`] (`f64` and `f32` are both wired up); the `*64` aliases
//! at the crate root pin the common double-precision choice.

pub mod cli;
pub mod criticality;
pub mod diagnostics;
pub mod error;
pub mod models;
pub mod oracle;
pub mod quench;
pub mod scalar;
pub mod smalllin;
pub mod sweep;

pub use error::{Error, Result};
pub use scalar::Scalar;

/// Double-precision specializations of the core generic types.
pub type ComplexMatrix64 = smalllin::ComplexMatrix<f64>;
pub type TfiParams64 = models::TfiParams<f64>;
pub type SshParams64 = models::SshParams<f64>;
pub type ModeGrid64 = models::ModeGrid<f64>;
pub type ModeAngles64 = models::ModeAngles<f64>;
pub type QuenchSpec64 = quench::QuenchSpec<f64>;
pub type ModeState64 = quench::ModeState<f64>;
pub type DiagnosticsSample64 = diagnostics::DiagnosticsSample<f64>;
pub type RateFunctionSample64 = diagnostics::RateFunctionSample<f64>;
pub type CriticalPoint64 = criticality::CriticalPoint<f64>;
pub type TriadResiduals64 = criticality::TriadResiduals<f64>;
pub type SweepConfig64 = sweep::SweepConfig<f64>;
pub type SweepResult64 = sweep::SweepResult<f64>;
pub type CuspReport64 = sweep::CuspReport<f64>;
