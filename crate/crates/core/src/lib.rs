//! Algebraic curvature tensors in four dimensions: the universal quadratic
//! identity, weakly Einstein tests, generalized Singer–Thorpe frames and the
//! Chern–Gauss–Bonnet consequences for compact homogeneous examples.
//!
//! Everything is generic over [`Real`] (`f32` or `f64`); the aliases below fix
//! double precision.

pub mod analysis;
pub mod cli;
pub mod frames;
pub mod scalar;
pub mod sources;
pub mod tensor;
pub mod topology;

pub use scalar::Real;

pub type Curvature = tensor::Curvature4<f64>;
pub type Frame = tensor::Frame4<f64>;
pub type SymMatrix = tensor::SymMatrix4<f64>;
