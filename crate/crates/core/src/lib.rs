//! Decision procedures and numerical witnesses for the Steinness of flat
//! bundles `E_m(D, M)` over annuli with monodromy `M ∈ GL_d(Z)`:
//! the criterion `m·log ρ(M) ≤ 2π²`, certified spectral enclosures, the
//! house-enumeration margin `μ′(d)`, the four-dimensional Reinhardt example
//! and the monomial-extension series.

pub mod analytic;
pub mod domain4;
mod dyadic;
pub mod error;
pub mod intcore;
pub mod interval;
pub mod spectra;
pub mod steinness;
pub mod szenum;

pub use error::{Error, Result};
pub use interval::Interval;
