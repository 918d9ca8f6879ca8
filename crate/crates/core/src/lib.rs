//! Entropy release under differential privacy.
//!
//! Histogram entropy with sensitivity bounds, Laplace / Gaussian / synthetic
//! histogram releases, a partition-based synthetic record generator
//! ([`mechanism_f`]) with an exact privacy audit, private mean estimation in a
//! reproducing-kernel basis ([`rkhs`]), output-side attacks ([`attacks`]) and
//! the seeded experiment runner behind the `reaedp` binary ([`experiments`]).

pub mod attacks;
pub mod entropy;
pub mod error;
pub mod experiments;
pub mod histogram;
pub mod mechanism_f;
pub mod mechanisms;
pub mod privacy;
pub mod results;
pub mod rkhs;
pub mod seed;

pub use entropy::{renyi_entropy, shannon_entropy, shannon_sensitivity_bound};
pub use error::{Error, Result};
pub use histogram::{build_histogram, BinSpec, Histogram};
pub use mechanisms::{release, MechanismKind, ReleaseResult};
pub use privacy::PrivacyParams;
