//! Numerical laboratory for smooth numbers in arithmetic progressions.

pub mod arith;
pub mod characters;
pub mod charsum;
pub mod cyclotomic;
pub mod dickman;
pub mod error;
pub mod harness;
pub mod lfunc;
pub mod mellin;
pub mod quadrature;
pub mod saddle;
pub mod scalar;
pub mod sieve;

pub use characters::{CharacterGroup, DirichletCharacter};
pub use cyclotomic::{CyclotomicInt, RootOfUnity};
pub use error::{Error, Result};
pub use scalar::Real;
pub use sieve::SmoothTable;

pub type SaddleResult64 = saddle::SaddleResult<f64>;
pub type RhoGrid64 = dickman::RhoGrid<f64>;
