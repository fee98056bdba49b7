//! Anisotropic subdivision symbols, their regularity, and multigrid solvers
//! built on them.

pub mod analysis;
pub mod cli;
pub mod cyclo;
pub mod error;
pub mod experiments;
pub mod linalg;
pub mod mask;
pub mod modular;
pub mod multigrid;
pub mod poly;
pub mod rational;
pub mod regularity;
pub mod schemes;

pub use error::{Error, Result};
pub use mask::{Dilation, Family, Mask, MaskFile};
pub use poly::LaurentPoly;
pub use rational::Rational;
