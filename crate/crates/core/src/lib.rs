//! Unified transform solver for linearised KdV on the finite interval and the
//! half-line, with numerical checks of the transform identities.
//!
//! The numerical core is generic over the real scalar ([`Real`], implemented
//! for `f32` and `f64`); the aliases at the crate root fix it to `f64`.

pub mod augeig;
pub mod contour;
pub mod datum;
pub mod error;
pub mod quadrature;
pub mod scalar;
pub mod solver;
pub mod spectral;
pub mod transform;
pub mod zeros;

pub use error::{Result, UtmError};
pub use scalar::{Cx, Real};

pub type C64 = num_complex::Complex<f64>;
pub type Datum = datum::InitialDatum<f64>;
pub type Context = spectral::SpectralContext<f64>;
pub type Path = contour::ContourPath<f64>;
