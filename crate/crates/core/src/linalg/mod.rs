//! Exact rational linear algebra.

mod matrix;
mod rational;
pub mod sparse;

pub use matrix::{solve_linear, Matrix, Rref};
pub use rational::{ParseRationalError, Rational};
pub use sparse::{LinearSystem, Solution};
