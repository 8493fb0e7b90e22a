//! Relative Szegő asymptotics of Toeplitz determinants on the unit circle.
//!
//! Ratios `D_n(e^h dμ) / D_n(dμ)` are computed two ways: from the
//! Verblunsky coefficients of the two measures, and as a Fredholm
//! determinant of `e^{h(C)}` on a CMV truncation.

// `!(x < 1.0)` is used on purpose so that NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod arc;
pub mod cmv;
pub mod error;
pub mod experiments;
pub mod fourier;
pub mod linalg;
pub mod measure;
pub mod opuc;
pub mod report;
pub mod spec;

pub use error::{Error, Result};
pub use fourier::TrigPoly;
pub use measure::CircleMeasure;
pub use opuc::VerblunskySeq;
