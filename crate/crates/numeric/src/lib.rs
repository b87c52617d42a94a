//! Dense matrix functional calculus for Foldy-Wouthuysen transforms and the
//! model Hamiltonians it is exercised on.

pub mod matfun;
pub mod models;

pub use nalgebra::Complex;

pub type Complex64 = Complex<f64>;
pub type CMat = nalgebra::DMatrix<Complex64>;
pub type CVec = nalgebra::DVector<Complex64>;
