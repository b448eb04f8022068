//! Linear integrable quad-equations on bipartite rhombic quad-graphs.
//!
//! The crate provides, bottom up:
//!
//! - [`theta`]: Jacobi theta functions by truncated q-series, generic over the
//!   scalar type (`f32`, `f64`, or the double-double oracle type).
//! - [`coeffs`]: the elliptic coefficient families `f`, `g0`, `g1`, `h`, `g`
//!   of the three-leg quad-equation, with all their functional-equation and
//!   inequality checks.
//! - [`quadgraph`]: bipartite rhombically embedded quad-graphs with directed,
//!   angle-labeled edges, generators, star-triangle flips, JSON and SVG export.
//! - [`quadeq`]: the quad-equation itself, 3D consistency, the tetrahedron
//!   property, Bäcklund transforms and discrete exponential functions.
//! - [`laplace`]: massive Laplace operators on black vertices, both Dirichlet
//!   energy forms, positivity certificates and Dirichlet solvers.
//! - [`pluri`]: two-field and three-field star-triangle maps, corner-equation
//!   systems, 4D consistency and the gauge classification.

pub mod coeffs;
pub mod laplace;
pub mod pluri;
pub mod quadeq;
pub mod quadgraph;
pub mod scalar;
pub mod theta;

pub use num_complex::Complex;

pub use scalar::{DoubleDouble, Scalar};

/// Default scalar for the artifact: IEEE double.
pub type Real = f64;
/// Default complex type.
pub type C64 = Complex<f64>;
/// Extended-precision complex type used by the oracle path.
pub type CDd = Complex<DoubleDouble>;

/// Theta parameters at the default precision.
pub type ThetaParams64 = theta::ThetaParams<f64>;
/// Coefficient family at the default precision.
pub type CoefficientFamily64 = coeffs::CoefficientFamily<f64>;
/// Single-precision variants.
pub type ThetaParams32 = theta::ThetaParams<f32>;
pub type CoefficientFamily32 = coeffs::CoefficientFamily<f32>;
/// Extended-precision variants (test oracle path).
pub type ThetaParamsDd = theta::ThetaParams<DoubleDouble>;
pub type CoefficientFamilyDd = coeffs::CoefficientFamily<DoubleDouble>;
