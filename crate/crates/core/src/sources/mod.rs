//! Constructors for curvature tensors: Lie groups, products, space forms,
//! seeded random tensors, JSON geometry documents and the example gallery.

mod gallery;
pub mod lie;
mod spec;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::scalar::Real;
use crate::tensor::{make_curvature, orbit_fill, project_to_curvature, uniform_raw, Curvature4, TensorError};

pub use gallery::{gallery, gallery_names, GalleryEntry, GalleryMeta};
pub use lie::{lie_group_curvature, Connection4, LieAlgebra4};
pub use spec::{load_spec, Geometry, GeometrySpec, Realized};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SourceError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("invalid field `{field}`: {constraint}")]
    Validation { field: String, constraint: String },
    #[error("Jacobi identity fails at {index:?} by {magnitude:e}")]
    JacobiViolation { index: [usize; 4], magnitude: f64 },
    #[error("unknown gallery entry `{0}`")]
    UnknownGalleryName(String),
    #[error(transparent)]
    Tensor(#[from] TensorError),
}

/// Riemannian product of two surfaces of constant Gaussian curvature `c1`
/// (plane `e1 e2`) and `c2` (plane `e3 e4`).
pub fn surface_product<T: Real>(c1: T, c2: T) -> Curvature4<T> {
    let raw = orbit_fill(&[([0, 1, 0, 1], -c1), ([2, 3, 2, 3], -c2)]);
    Curvature4::from_raw_unchecked(raw)
}

/// Product of a 3-dimensional space form of curvature `c` with a line.
pub fn space_form_product<T: Real>(c: T) -> Curvature4<T> {
    let raw = orbit_fill(&[([0, 1, 0, 1], -c), ([0, 2, 0, 2], -c), ([1, 2, 1, 2], -c)]);
    Curvature4::from_raw_unchecked(raw)
}

/// `R_ijkl = c(δ_il δ_jk − δ_ik δ_jl)`: sectional curvature `c` everywhere.
pub fn constant_curvature<T: Real>(c: T) -> Curvature4<T> {
    let mut entries = Vec::with_capacity(6);
    for i in 0..4 {
        for j in i + 1..4 {
            entries.push(([i, j, i, j], -c));
        }
    }
    Curvature4::from_raw_unchecked(orbit_fill(&entries))
}

/// Projection of an i.i.d. uniform[-1, 1] array; deterministic in `seed`.
pub fn random_curvature<T: Real>(seed: u64) -> Curvature4<T> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    project_to_curvature(&uniform_raw::<T, _>(&mut rng))
}

/// Tensor whose reference frame already carries the given plane components
/// `a' = (R_1212, R_1313, R_1414)`, `a'' = (R_3434, R_2424, R_2323)` and
/// double-plane components `b = (R_1234, R_1342, R_1423)`, with every
/// `R_ijjk (i != k)` zero. `b` must sum to zero.
pub fn normal_form<T: Real>(a_prime: [T; 3], a_dprime: [T; 3], b: [T; 3]) -> Result<Curvature4<T>, SourceError> {
    let raw = orbit_fill(&[
        ([0, 1, 0, 1], a_prime[0]),
        ([0, 2, 0, 2], a_prime[1]),
        ([0, 3, 0, 3], a_prime[2]),
        ([2, 3, 2, 3], a_dprime[0]),
        ([1, 3, 1, 3], a_dprime[1]),
        ([1, 2, 1, 2], a_dprime[2]),
        ([0, 1, 2, 3], b[0]),
        ([0, 2, 3, 1], b[1]),
        ([0, 3, 1, 2], b[2]),
    ]);
    Ok(make_curvature(&raw)?)
}
