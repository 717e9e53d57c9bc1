//! Harmonic functions, energy measures and their densities on the
//! `N`-dimensional Sierpinski gasket, with an exact rational path and a
//! floating-point path sharing one generic implementation.

pub mod address;
pub mod cone;
pub mod derham;
pub mod edge;
pub mod energy;
pub mod error;
pub mod fit;
pub mod harmonic;
pub mod linalg;
pub mod report;
pub mod scalar;

pub use address::{Dim, DyadicPoint, EdgeAddress, SymbolStream, Word};
pub use error::{Error, Result};
pub use harmonic::HarmonicContext;
pub use linalg::{Matrix, Vector};
pub use report::{Report, Status};
pub use scalar::{Mode, NumericPolicy, Rational, Scalar};

pub type ExactContext = HarmonicContext<Rational>;
pub type FloatContext = HarmonicContext<f64>;
pub type ExactMatrix = Matrix<Rational>;
pub type ExactVector = Vector<Rational>;
pub type FloatMatrix = Matrix<f64>;
pub type FloatVector = Vector<f64>;
