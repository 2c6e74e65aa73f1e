//! Kernel methods and convergence-in-probability metrics, with an experiment
//! harness showing that RKHS functions approximate discontinuous targets in
//! probability even where uniform approximation is impossible.
//!
//! Modules:
//!
//! - [`kernels`]: Gaussian RBF, Wendland C², and a Gaussian-type kernel on
//!   empirical measures; Gram matrices and MMD.
//! - [`metrics`]: the Ky Fan metric and the `d_ψ` family on paired samples.
//! - [`rkhs`]: representer expansions, RKHS norms, `L_p` estimates and the
//!   integral operator `S_k`.
//! - [`erm`]: kernel ridge, subgradient ERM for Lipschitz losses, pairwise
//!   ranking, clipping.
//! - [`lab`]: targets, samplers and convergence studies.
//! - [`config`] and [`report`]: the config-file format and CSV/manifest
//!   output used by the `denselab` binary.

pub mod config;
pub mod erm;
pub mod error;
pub mod function;
pub mod kernels;
pub mod lab;
pub mod linalg;
pub mod metrics;
pub mod report;
pub mod rkhs;

pub use error::{Error, Result};
pub use function::RealFunction;
pub use kernels::{EmpiricalMeasure, Kernel, Point};
pub use metrics::{PairedSample, PsiFunction};
pub use rkhs::RkhsFunction;
