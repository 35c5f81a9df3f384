//! Numerical workbench for phase-space composition laws on a discrete torus.

pub mod error;
mod fft;
pub mod doubled;
pub mod grid;
pub mod io;
pub mod laws;
mod linalg;
pub mod magnetic;
pub mod modulation;
mod par;
pub mod testkit;
pub mod verify;

pub use error::{MoyalError, Result};
pub use par::thread_count;
pub use num_complex::Complex64 as C64;
