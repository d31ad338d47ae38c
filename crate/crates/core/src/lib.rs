//! Numerical verification of the identity `m(Q_{-3}) = (8/5) d_3`.
//!
//! The crate implements each computational object that enters the identity:
//!
//! * [`laurent`]: sparse Laurent polynomials with exact rational coefficients.
//! * [`mahler`]: logarithmic Mahler measure over the torus, by Jensen-reduced
//!   trapezoid quadrature and by seeded Monte Carlo.
//! * [`qseries`]: truncated q-expansions (eta products, theta series,
//!   Rankin–Cohen brackets, Lambert series).
//! * [`quadforms`]: binary quadratic forms, representation counts and the
//!   closed-form Hecke eigenvalues of the level 15 weight 3 newform.
//! * [`lfunctions`]: Kronecker characters, Dirichlet L-values, Riemann zeta,
//!   Epstein sums and the constant `d_3`.
//! * [`kronecker_sums`]: Eisenstein–Kronecker double sums at a CM point and
//!   their split into a modular and a Dirichlet part.
//! * [`livne`]: effective test sets and the trace comparison table.
//! * [`verify`]: end-to-end verification reports.
//!
//! Parallel kernels run on rayon when the `parallel` feature is enabled (the
//! default). Every reduction is performed in a fixed order over fixed chunks,
//! so results are bit-identical across thread counts and across the
//! sequential build.

pub mod error;
pub mod kronecker_sums;
pub mod laurent;
pub mod lfunctions;
pub mod livne;
pub mod mahler;
pub mod par;
pub mod qseries;
pub mod quadforms;
pub mod sum;
pub mod verify;

pub use error::{Error, Result};
