//! Fourier and Fourier–Stieltjes algebras of finite groupoids.
//!
//! The crate works with finite groupoids carrying a left Haar system (positive
//! weights that factor through the source map). On top of the data model it
//! provides the convolution *-algebra, the Hilbert module `E²` with its
//! convolution operators, positive definite functions and their GNS bundles,
//! semidefinite-programming norms, and the bisection duality machinery.

pub mod algebra;
pub mod bisection;
pub mod duality;
pub mod error;
pub mod groupoid;
pub mod io;
pub mod linalg;
pub mod matching;
pub mod norms;
pub mod positivity;
pub mod regular;
pub mod sample;

pub type C64 = num_complex::Complex64;

pub use algebra::{ArrowFunction, Side, UnitFunction};
pub use bisection::Bisection;
pub use error::{Error, Result};
pub use groupoid::FiniteGroupoid;
pub use linalg::{CMatrix, CVector};
