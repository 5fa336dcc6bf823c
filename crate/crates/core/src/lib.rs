//! Exact weak Hopf algebras and dynamical quantum groups at roots of unity.

pub mod error;
pub mod abrr;
pub mod dynqg;
pub mod linalg;
pub mod report;
pub mod run;
pub mod scalars;
pub mod suite;
pub mod tensor;
pub mod torus;
pub mod uqg;
pub mod wha;

pub use error::{Error, Result};
