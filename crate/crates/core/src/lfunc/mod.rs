//! Dirichlet L-functions: values, zeros near `σ = 1`, the zero-based
//! classification of characters and empirical checks of zero-free regions.

pub mod checkers;
pub mod classify;
pub mod hurwitz;
pub mod zeros;

pub use checkers::{CheckReport, Verdict};
pub use classify::{classify, Classification};
pub use hurwitz::{l_entire, l_value};
pub use zeros::{scan_zeros, Rect, ScanOptions, ScanReport, ZeroRecord};
