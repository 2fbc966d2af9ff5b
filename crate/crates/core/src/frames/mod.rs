//! Ricci eigenframes and generalized Singer–Thorpe frames.
//!
//! A frame `{e_i}` is a generalized Singer–Thorpe (ST) frame for `R` when every
//! `R_ijjk` with `i != k` vanishes and the opposite-plane components satisfy
//! `R_1212² = R_3434²`, `R_1313² = R_2424²`, `R_1414² = R_2323²`. Such a frame
//! exists exactly when `R` is weakly Einstein; [`find_st_basis`] constructs one.

mod eigen;
mod pattern;
mod penalty;
mod search;
mod signs;
mod trig;

use thiserror::Error;

use crate::scalar::Real;

pub use eigen::{ricci_spectrum, sym_eigen, RicciSpectrum, MAX_SWEEPS};
pub use pattern::{multiplicity_pattern, MultiplicityPattern, PatternTag};
pub use penalty::{mixed_components, st_penalty, st_residuals, MIXED_INDICES};
pub use search::{find_st_basis, generic_fallback, ConstructionPath, FallbackOutcome, STReport, SearchOptions};
pub use signs::{classify_sign_cases, SignCase, SignCaseSet};
pub use trig::{trig_fit_extremum, TrigPoly, TrigSamples};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FrameError {
    #[error("Jacobi eigensolver did not converge after {sweeps} sweeps")]
    NoConvergence { sweeps: usize },
    #[error("trigonometric fit is constant")]
    DegenerateFit,
    #[error("tensor is not weakly Einstein (relative residual {relative:e}, tolerance {tolerance:e})")]
    NotWeaklyEinstein { relative: f64, max_abs: f64, tolerance: f64 },
    #[error("no generalized Singer-Thorpe frame found (best penalty {best_penalty:e})")]
    SearchFailed { best_penalty: f64, start_penalties: Vec<f64> },
    #[error("frame is not a generalized Singer-Thorpe frame (penalty {penalty:e})")]
    NotSTFrame { penalty: f64 },
    #[error("sign case {case} reported but its eigenvalue relation fails by {residual:e}")]
    CaseRelationViolated { case: SignCase, residual: f64 },
}

/// Componentwise tolerance, relative to the tensor scale: `1e-8` in double
/// precision, widened to the working precision for `f32`.
pub fn component_tol<T: Real>() -> T {
    T::lit(1e-8).max(T::epsilon() * T::lit(64.0))
}

/// Penalty below which a frame counts as generalized ST: `component_tol²`.
pub fn penalty_tol<T: Real>() -> T {
    let c = component_tol::<T>();
    c * c
}
