//! Gauss–Bonnet and Pontryagin integrands read off a generalized ST frame,
//! and the closed forms they give for homogeneous (constant-integrand)
//! compact examples.

use thiserror::Error;

use crate::frames::{component_tol, penalty_tol, st_penalty, SignCase};
use crate::scalar::Real;
use crate::tensor::{rotate, Curvature4, Frame4};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TopologyError {
    #[error("frame is not a generalized Singer-Thorpe frame (penalty {penalty:e})")]
    NotSTFrame { penalty: f64 },
    #[error("frame has det -1; the double-plane components would change sign")]
    OrientationReversed,
    #[error("eigenvalues violate the relation of sign case {case} by {residual:e}")]
    CaseRelationViolated { case: SignCase, residual: f64 },
    #[error("volume must be positive, got {0}")]
    InvalidVolume(f64),
}

/// `a' = (R_1212, R_1313, R_1414)`, `a'' = (R_3434, R_2424, R_2323)`,
/// `b = (R_1234, R_1342, R_1423)` and `a = (a' + a'')/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct STVectors<T> {
    pub a_prime: [T; 3],
    pub a_dprime: [T; 3],
    pub b: [T; 3],
    pub a: [T; 3],
}

fn dot<T: Real>(x: &[T; 3], y: &[T; 3]) -> T {
    x[0] * y[0] + x[1] * y[1] + x[2] * y[2]
}

impl<T: Real> STVectors<T> {
    /// `b₁ + b₂ + b₃`, zero by the first Bianchi identity in any frame.
    pub fn bianchi_defect(&self) -> T {
        self.b[0] + self.b[1] + self.b[2]
    }
}

/// Reads the three vectors in `frame` without checking that it is ST or
/// positively oriented.
pub fn read_st_vectors<T: Real>(r: &Curvature4<T>, frame: &Frame4<T>) -> STVectors<T> {
    let c = rotate(r, frame);
    let a_prime = [c.get(0, 1, 0, 1), c.get(0, 2, 0, 2), c.get(0, 3, 0, 3)];
    let a_dprime = [c.get(2, 3, 2, 3), c.get(1, 3, 1, 3), c.get(1, 2, 1, 2)];
    let b = [c.get(0, 1, 2, 3), c.get(0, 2, 3, 1), c.get(0, 3, 1, 2)];
    let half = T::lit(0.5);
    let a = [0, 1, 2].map(|k| half * (a_prime[k] + a_dprime[k]));
    STVectors { a_prime, a_dprime, b, a }
}

pub fn st_vectors<T: Real>(r: &Curvature4<T>, frame: &Frame4<T>) -> Result<STVectors<T>, TopologyError> {
    let penalty = st_penalty(r, frame);
    if !(penalty < penalty_tol::<T>()) {
        return Err(TopologyError::NotSTFrame { penalty: penalty.as_f64() });
    }
    if frame.orientation() < 0 {
        return Err(TopologyError::OrientationReversed);
    }
    let v = read_st_vectors(r, frame);
    debug_assert!(v.bianchi_defect().abs() <= T::lit(1e-10) * r.scale() + T::epsilon() * T::lit(64.0) * r.scale());
    Ok(v)
}

/// `f = |a|² − |a'|²`, non-positive in an ST frame and zero exactly when the
/// tensor is Einstein.
pub fn f_value<T: Real>(v: &STVectors<T>) -> T {
    dot(&v.a, &v.a) - dot(&v.a_prime, &v.a_prime)
}

/// `f` from the Ricci eigenvalues, using the closed form valid in `case`.
pub fn f_by_case<T: Real>(l: &[T; 4], case: SignCase) -> Result<T, TopologyError> {
    let scale = l.iter().fold(T::one(), |m, v| m.max(v.abs()));
    let residual = case.relation_residual(l);
    if residual > component_tol::<T>() * scale {
        return Err(TopologyError::CaseRelationViolated { case, residual: residual.as_f64() });
    }
    let q = T::lit(-0.25);
    let sq = |x: T| x * x;
    let [l1, l2, l3, l4] = *l;
    Ok(match case {
        SignCase::I => T::zero(),
        SignCase::II | SignCase::IV => q * sq(l1 - l3),
        SignCase::III => q * sq(l1 - l2),
        SignCase::V => q * (sq(l1 - l3) + sq(l1 - l4)),
        SignCase::VI => q * (sq(l1 - l2) + sq(l1 - l4)),
        SignCase::VII => q * (sq(l1 - l2) + sq(l1 - l3)),
        SignCase::VIII => q * (sq(l1 + l2) + sq(l1 + l3) + sq(l1 + l4)),
    })
}

/// Integrand densities and, given a volume, the integrated invariants of a
/// manifold whose curvature has the same components at every point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InvariantReport<T> {
    /// `(⟨a', a''⟩ + |b|²) / 4π²`.
    pub chi_density: T,
    /// `⟨a' + a'', b⟩ / 2π²`.
    pub p1_density: T,
    pub f: T,
    pub volume: Option<T>,
    pub chi: Option<T>,
    pub p1: Option<T>,
    /// `f · volume / 2π²`.
    pub c_bound: Option<T>,
    /// `2χ + p1 ≥ C`.
    pub bound_plus_ok: Option<bool>,
    /// `2χ − p1 ≥ C`.
    pub bound_minus_ok: Option<bool>,
    /// Both bounds hold with equality.
    pub bound_equality: Option<bool>,
    /// `2χ ≥ 3|σ|` with `σ = p1 / 3`.
    pub hitchin_ok: Option<bool>,
    /// Orientation of the frame the vectors were read in.
    pub orientation: i8,
}

/// Relative slack for the inequality checks.
pub const BOUND_TOL: f64 = 1e-9;

pub fn invariants_from_vectors<T: Real>(v: &STVectors<T>, volume: Option<T>, orientation: i8) -> InvariantReport<T> {
    let pi2 = T::PI() * T::PI();
    let four = T::lit(4.0);
    let two = T::lit(2.0);
    let sum = [0, 1, 2].map(|k| v.a_prime[k] + v.a_dprime[k]);
    let chi_density = (dot(&v.a_prime, &v.a_dprime) + dot(&v.b, &v.b)) / (four * pi2);
    let p1_density = dot(&sum, &v.b) / (two * pi2);
    let f = f_value(v);
    let mut out = InvariantReport {
        chi_density,
        p1_density,
        f,
        volume,
        chi: None,
        p1: None,
        c_bound: None,
        bound_plus_ok: None,
        bound_minus_ok: None,
        bound_equality: None,
        hitchin_ok: None,
        orientation,
    };
    if let Some(vol) = volume {
        let chi = chi_density * vol;
        let p1 = p1_density * vol;
        let c = f * vol / (two * pi2);
        let slack = T::lit(BOUND_TOL) * T::one().max(chi.abs()).max(p1.abs()).max(c.abs());
        let plus = two * chi + p1;
        let minus = two * chi - p1;
        out.chi = Some(chi);
        out.p1 = Some(p1);
        out.c_bound = Some(c);
        out.bound_plus_ok = Some(plus >= c - slack);
        out.bound_minus_ok = Some(minus >= c - slack);
        out.bound_equality = Some((plus - c).abs() <= slack && (minus - c).abs() <= slack);
        out.hitchin_ok = Some(two * chi >= p1.abs() - slack);
    }
    out
}

/// Invariants of a compact manifold of total volume `volume` whose curvature,
/// in a suitable orthonormal frame, is `r` everywhere.
pub fn homogeneous_invariants<T: Real>(
    r: &Curvature4<T>,
    frame: &Frame4<T>,
    volume: T,
) -> Result<InvariantReport<T>, TopologyError> {
    if !(volume > T::zero()) || !volume.is_finite() {
        return Err(TopologyError::InvalidVolume(volume.as_f64()));
    }
    let v = st_vectors(r, frame)?;
    Ok(invariants_from_vectors(&v, Some(volume), frame.orientation()))
}
