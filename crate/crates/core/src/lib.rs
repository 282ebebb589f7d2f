pub mod contraction;
pub mod error;
pub mod fit;
pub mod lindblad;
pub mod models;
pub mod numkernel;
pub mod pointer;
pub mod report;
pub mod scenario;
pub mod seed;
pub mod selftest;
pub mod split;
pub mod tolerance;

pub use error::{Error, Result};
pub use tolerance::ToleranceConfig;
