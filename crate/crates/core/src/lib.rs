//! ADHM data for Hilbert schemes of points on the total spaces X_n of
//! O(−n) over P¹, with the matching framed-quiver and monad calculus.

pub mod campaign;
pub mod error;
pub mod fixtures;
pub mod linalg;
pub mod matrix;
pub mod monad;
pub mod pencil;
pub mod plane;
pub mod poly;
pub mod quiver;
pub mod random;
pub mod scalar;
pub mod xn;

pub use error::{AdhmError, Result};
pub use matrix::Matrix;
pub use scalar::{Backend, Gf, Scalar, C64, DEFAULT_TOL};

pub type Rational = num_rational::BigRational;

pub type CMatrix = Matrix<C64>;
pub type QMatrix = Matrix<Rational>;
pub type FpMatrix<const P: u64> = Matrix<Gf<P>>;

pub type XnAdhmC = xn::XnADHM<C64>;
pub type XnAdhmQ = xn::XnADHM<Rational>;
pub type PlaneAdhmC = plane::PlaneADHM<C64>;
pub type PlaneAdhmQ = plane::PlaneADHM<Rational>;
pub type FramedRepC = quiver::FramedRep<C64>;
pub type FramedRepQ = quiver::FramedRep<Rational>;
pub type MonadCoeffsC = monad::MonadCoeffs<C64>;
pub type MonadCoeffsQ = monad::MonadCoeffs<Rational>;
