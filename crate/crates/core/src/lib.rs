//! Numerical laboratory for the divergence of Fourier partial sums.
//!
//! The crate builds the two saturating constructions (dyadic blocks for
//! `L^p(T)`, Kahane–Katznelson blocks for `C(T)`), checks the quantitative
//! lemmas behind them on finite grids, and estimates the divergence spectrum
//! `β ↦ dim E(β, f)` empirically by box counting.

pub mod ct;
pub mod dyadic;
mod error;
pub mod fejer;
pub mod io;
pub mod jauge;
pub mod lp;
pub mod quad;
pub mod spectrum;
pub mod trig;

/// Crate version, recorded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub use error::{Error, Result};
pub use trig::{SampledFunction, TrigPoly};
