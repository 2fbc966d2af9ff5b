//! Pointwise residuals: the universal 4D curvature identity, Einstein and
//! weakly Einstein conditions, and forbidden Ricci eigenvalue patterns.

use serde::Serialize;

use crate::scalar::Real;
use crate::tensor::{derived_tensors, ricci, summary, Curvature4, SymMatrix4};

/// Default pass/fail tolerance, relative.
pub const DEFAULT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResidualReport<T> {
    pub matrix: SymMatrix4<T>,
    pub max_abs: T,
    /// `max_abs / scale`.
    pub relative: T,
    pub tolerance: T,
    pub passes: bool,
}

impl<T: Real> ResidualReport<T> {
    fn new(matrix: SymMatrix4<T>, scale: T, tolerance: T) -> Self {
        let max_abs = matrix.max_abs();
        let relative = max_abs / scale;
        Self { matrix, max_abs, relative, tolerance, passes: relative < tolerance }
    }
}

/// `max(1, |R|²)` for residuals quadratic in `R`.
fn quadratic_scale<T: Real>(norm_r2: T) -> T {
    norm_r2.max(T::one())
}

/// `Ř − 2ρ̌ − Lρ + τρ − ¼(|R|² − 4|ρ|² + τ²) g`.
pub fn identity_residual<T: Real>(r: &Curvature4<T>, tol: T) -> ResidualReport<T> {
    let s = summary(r);
    let d = derived_tensors(r);
    let rho = ricci(r);
    let quarter = T::lit(0.25);
    let four = T::lit(4.0);
    let two = T::lit(2.0);
    let shift = quarter * (s.norm_r2 - four * s.norm_rho2 + s.tau * s.tau);
    let m = d
        .r_check
        .sub(&d.rho_check.scaled(two))
        .sub(&d.l_rho)
        .add(&rho.scaled(s.tau))
        .sub(&SymMatrix4::identity().scaled(shift));
    ResidualReport::new(m, quadratic_scale(s.norm_r2), tol)
}

/// `Ř − ¼|R|² g`.
pub fn weakly_einstein_residual<T: Real>(r: &Curvature4<T>, tol: T) -> ResidualReport<T> {
    let s = summary(r);
    let d = derived_tensors(r);
    let m = d.r_check.sub(&SymMatrix4::identity().scaled(T::lit(0.25) * s.norm_r2));
    ResidualReport::new(m, quadratic_scale(s.norm_r2), tol)
}

/// `ρ − (τ/4) g`. Linear in `R`, so it is measured against `max(1, |R|)`.
pub fn einstein_residual<T: Real>(r: &Curvature4<T>, tol: T) -> ResidualReport<T> {
    let s = summary(r);
    let rho = ricci(r);
    let m = rho.sub(&SymMatrix4::identity().scaled(s.tau * T::lit(0.25)));
    ResidualReport::new(m, s.norm_r2.sqrt().max(T::one()), tol)
}

/// `2ρ̌ + Lρ − τρ − |ρ|² g + (τ²/4) g`, which equals the weakly Einstein
/// residual whenever the universal identity holds.
pub fn reduced_identity_residual<T: Real>(r: &Curvature4<T>, tol: T) -> ResidualReport<T> {
    let s = summary(r);
    let d = derived_tensors(r);
    let rho = ricci(r);
    let m = d
        .rho_check
        .scaled(T::lit(2.0))
        .add(&d.l_rho)
        .sub(&rho.scaled(s.tau))
        .add(&SymMatrix4::identity().scaled(s.tau * s.tau * T::lit(0.25) - s.norm_rho2));
    ResidualReport::new(m, quadratic_scale(s.norm_r2), tol)
}

/// The four eigenvalue configurations that a weakly Einstein tensor never has:
/// three equal non-zero eigenvalues and one zero eigenvalue. The id is the
/// position of the zero eigenvalue counted from the end (pattern 1 has it in
/// slot 4, pattern 4 in slot 1).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ForbiddenPattern(pub u8);

pub fn forbidden_pattern<T: Real>(eigenvalues: &[T; 4], tol: T) -> Option<ForbiddenPattern> {
    let scale = eigenvalues.iter().fold(T::one(), |m, v| m.max(v.abs()));
    let eps = tol * scale;
    for zero_slot in (0..4).rev() {
        if eigenvalues[zero_slot].abs() > eps {
            continue;
        }
        let others: Vec<T> = (0..4).filter(|&i| i != zero_slot).map(|i| eigenvalues[i]).collect();
        let equal = (others[0] - others[1]).abs() <= eps && (others[1] - others[2]).abs() <= eps;
        if equal && others[0].abs() > eps {
            return Some(ForbiddenPattern((4 - zero_slot) as u8));
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sources::{constant_curvature, gallery, space_form_product, surface_product};

    const TOL: f64 = DEFAULT_TOL;

    fn example4(a: f64, b: f64) -> Curvature4<f64> {
        gallery::<f64>("example4", &[("a", a), ("b", b)]).unwrap().tensor
    }

    #[test]
    fn zero_tensor_has_zero_residuals() {
        let z = Curvature4::<f64>::zero();
        for rep in [
            identity_residual(&z, TOL),
            weakly_einstein_residual(&z, TOL),
            einstein_residual(&z, TOL),
            reduced_identity_residual(&z, TOL),
        ] {
            assert_eq!(rep.max_abs, 0.0);
            assert!(rep.passes);
        }
    }

    #[test]
    fn identity_holds_on_solvable_example() {
        let r = gallery::<f64>("example-s2-1", &[]).unwrap().tensor;
        let rep = identity_residual(&r, TOL);
        assert!(rep.relative < 1e-12, "{}", rep.relative);
        assert!(!weakly_einstein_residual(&r, TOL).passes);
    }

    #[test]
    fn identity_term_by_term_on_solvable_example() {
        // independent evaluation of each contraction at (1,1)
        let r = gallery::<f64>("example-s2-1", &[]).unwrap().tensor;
        let mut r_check = 0.0;
        let mut l_rho = 0.0;
        let rho = [-8.0, 0.0, 2.0, -2.0];
        for a in 0..4 {
            for b in 0..4 {
                for c in 0..4 {
                    r_check += r.get(a, b, c, 0) * r.get(a, b, c, 0);
                }
                if a == b {
                    l_rho += 2.0 * r.get(0, a, a, 0) * rho[a];
                }
            }
        }
        let (norm_r2, norm_rho2, tau) = (224.0, 72.0, -8.0);
        let value = r_check - 2.0 * 64.0 - l_rho + tau * rho[0] - 0.25 * (norm_r2 - 4.0 * norm_rho2 + tau * tau);
        assert_eq!(value, 0.0);
        assert_eq!(identity_residual(&r, TOL).matrix.get(0, 0), 0.0);
    }

    #[test]
    fn surface_product_residual_diagonal() {
        let r = surface_product(1.0, 2.0);
        let rep = weakly_einstein_residual(&r, TOL);
        assert!(!rep.passes);
        assert_eq!(rep.matrix.diagonal(), [-3.0, -3.0, 3.0, 3.0]);
        assert_eq!(rep.matrix.trace(), 0.0);
        let red = reduced_identity_residual(&r, TOL);
        assert!(!red.passes);
        for i in 0..4 {
            assert!((red.matrix.get(i, i) - rep.matrix.get(i, i)).abs() < 1e-12);
        }
    }

    #[test]
    fn example4_is_weakly_einstein_not_einstein() {
        let r = example4(1.0, 0.5);
        assert!(weakly_einstein_residual(&r, TOL).relative < 1e-12);
        let r = example4(1.0, 0.0);
        let e = einstein_residual(&r, TOL);
        assert!(!e.passes);
        assert!((e.matrix.get(0, 0) + 2.0).abs() < 1e-12);
        assert!(reduced_identity_residual(&r, TOL).relative < 1e-12);
    }

    #[test]
    fn opposite_curvature_product() {
        let r = surface_product(3.0, -3.0);
        assert!(weakly_einstein_residual(&r, TOL).relative < 1e-12);
        let r = surface_product(1.0, -1.0);
        let e = einstein_residual(&r, TOL);
        assert!(!e.passes);
        assert_eq!(ricci(&r).diagonal(), [1.0, 1.0, -1.0, -1.0]);
        assert_eq!(summary(&r).tau, 0.0);
    }

    #[test]
    fn space_form_is_einstein() {
        let r = constant_curvature(1.0);
        assert_eq!(einstein_residual(&r, TOL).max_abs, 0.0);
        assert!(weakly_einstein_residual(&r, TOL).passes);
    }

    #[test]
    fn space_form_product_residual() {
        let r = space_form_product(1.0);
        let rep = weakly_einstein_residual(&r, TOL);
        assert!(!rep.passes);
        assert_eq!(rep.matrix.diagonal(), [1.0, 1.0, 1.0, -3.0]);
    }

    #[test]
    fn forbidden_patterns() {
        assert_eq!(forbidden_pattern(&[2.0, 2.0, 2.0, 0.0], 1e-9), Some(ForbiddenPattern(1)));
        assert_eq!(forbidden_pattern(&[0.0, 2.0, 2.0, 2.0], 1e-9), Some(ForbiddenPattern(4)));
        assert_eq!(forbidden_pattern(&[2.0, 0.0, 2.0, 2.0], 1e-9), Some(ForbiddenPattern(3)));
        assert_eq!(forbidden_pattern(&[5.0; 4], 1e-9), None);
        assert_eq!(forbidden_pattern(&[-8.0, 0.0, 2.0, -2.0], 1e-9), None);
        assert_eq!(forbidden_pattern(&[0.0; 4], 1e-9), None);
    }
}
