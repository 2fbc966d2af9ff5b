use std::fmt;

use serde::{Serialize, Serializer};

use crate::frames::penalty::{normalized_penalty, plane, PLANE_PAIRS};
use crate::frames::{component_tol, penalty_tol, FrameError};
use crate::scalar::Real;
use crate::tensor::{ricci, rotate, Curvature4, Frame4};

/// Which of `R_1212 = ±R_3434`, `R_1313 = ±R_2424`, `R_1414 = ±R_2323` hold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SignCase {
    I,
    II,
    III,
    IV,
    V,
    VI,
    VII,
    VIII,
}

impl SignCase {
    pub const ALL: [SignCase; 8] = [
        SignCase::I,
        SignCase::II,
        SignCase::III,
        SignCase::IV,
        SignCase::V,
        SignCase::VI,
        SignCase::VII,
        SignCase::VIII,
    ];

    pub fn signs(self) -> [i8; 3] {
        match self {
            SignCase::I => [1, 1, 1],
            SignCase::II => [-1, 1, 1],
            SignCase::III => [1, -1, 1],
            SignCase::IV => [1, 1, -1],
            SignCase::V => [1, -1, -1],
            SignCase::VI => [-1, 1, -1],
            SignCase::VII => [-1, -1, 1],
            SignCase::VIII => [-1, -1, -1],
        }
    }

    pub fn from_signs(signs: [i8; 3]) -> SignCase {
        *SignCase::ALL.iter().find(|c| c.signs() == signs).expect("all eight sign triples are listed")
    }

    pub fn label(self) -> &'static str {
        match self {
            SignCase::I => "(i)",
            SignCase::II => "(ii)",
            SignCase::III => "(iii)",
            SignCase::IV => "(iv)",
            SignCase::V => "(v)",
            SignCase::VI => "(vi)",
            SignCase::VII => "(vii)",
            SignCase::VIII => "(viii)",
        }
    }

    pub fn parse(label: &str) -> Option<SignCase> {
        let bare = label.trim().trim_start_matches('(').trim_end_matches(')');
        SignCase::ALL.into_iter().find(|c| c.label().trim_matches(|ch| ch == '(' || ch == ')') == bare)
    }

    /// How far the diagonal Ricci values `λ` are from the linear relation this
    /// case forces on them.
    pub fn relation_residual<T: Real>(self, l: &[T; 4]) -> T {
        let [a, b, c, d] = *l;
        match self {
            SignCase::I => (a - b).abs().max((a - c).abs()).max((a - d).abs()),
            SignCase::II => (a - b).abs().max((c - d).abs()),
            SignCase::III => (a - c).abs().max((b - d).abs()),
            SignCase::IV => (a - d).abs().max((b - c).abs()),
            SignCase::V => (a + b - c - d).abs(),
            SignCase::VI => (a + c - b - d).abs(),
            SignCase::VII => (a + d - b - c).abs(),
            SignCase::VIII => (a + b + c + d).abs(),
        }
    }
}

impl fmt::Display for SignCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl Serialize for SignCase {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.label())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SignCaseSet<T> {
    /// Every case whose three equalities hold, in ascending order.
    pub cases: Vec<SignCase>,
    /// Admissible signs per plane pair.
    pub admissible: [Vec<i8>; 3],
    /// `ρ'_ii` in the frame.
    pub eigenvalues: [T; 4],
    pub penalty: T,
}

impl<T: Real> SignCaseSet<T> {
    pub fn contains(&self, case: SignCase) -> bool {
        self.cases.contains(&case)
    }
}

/// Lists the sign cases realized by an ST frame and checks each one's
/// eigenvalue relation.
pub fn classify_sign_cases<T: Real>(r: &Curvature4<T>, frame: &Frame4<T>) -> Result<SignCaseSet<T>, FrameError> {
    let scale = r.scale();
    let rot = rotate(r, frame);
    let penalty = normalized_penalty(&rot, scale);
    if !(penalty < penalty_tol::<T>()) {
        return Err(FrameError::NotSTFrame { penalty: penalty.as_f64() });
    }
    let tol = component_tol::<T>() * scale;
    let c = rot.components();
    let admissible = PLANE_PAIRS.map(|(p, q)| {
        let (x, y) = (plane(c, p), plane(c, q));
        [1i8, -1]
            .into_iter()
            .filter(|&eps| (x - T::lit(eps as f64) * y).abs() <= tol)
            .collect::<Vec<_>>()
    });
    let mut cases = Vec::new();
    for &s0 in &admissible[0] {
        for &s1 in &admissible[1] {
            for &s2 in &admissible[2] {
                cases.push(SignCase::from_signs([s0, s1, s2]));
            }
        }
    }
    cases.sort();
    let eigenvalues = ricci(&rot).diagonal();
    for &case in &cases {
        let residual = case.relation_residual(&eigenvalues);
        if residual > tol {
            return Err(FrameError::CaseRelationViolated { case, residual: residual.as_f64() });
        }
    }
    Ok(SignCaseSet { cases, admissible, eigenvalues, penalty })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sources::{gallery, surface_product};

    #[test]
    fn labels_round_trip() {
        for c in SignCase::ALL {
            assert_eq!(SignCase::parse(c.label()), Some(c));
            assert_eq!(SignCase::from_signs(c.signs()), c);
        }
        assert_eq!(SignCase::parse("vii"), Some(SignCase::VII));
        assert_eq!(SignCase::parse("ix"), None);
    }

    #[test]
    fn surface_pair_cases() {
        let r = surface_product(1.0, -1.0);
        let set = classify_sign_cases(&r, &Frame4::identity()).unwrap();
        assert_eq!(set.cases, vec![SignCase::II, SignCase::VI, SignCase::VII, SignCase::VIII]);
    }

    #[test]
    fn einstein_tensor_has_case_one() {
        let r = surface_product(1.0, 1.0);
        let set = classify_sign_cases(&r, &Frame4::identity()).unwrap();
        assert!(set.contains(SignCase::I));
    }

    #[test]
    fn relabeled_frame_gives_case_five() {
        let r = gallery::<f64>("example4", &[("a", 1.0), ("b", 0.0)]).unwrap().tensor;
        let f = Frame4::permutation([2, 3, 1, 0]);
        let set = classify_sign_cases(&r, &f).unwrap();
        assert!(set.contains(SignCase::V), "{:?}", set.cases);
        let l = set.eigenvalues;
        assert!((l[0] + l[1] - l[2] - l[3]).abs() < 1e-12);
    }

    #[test]
    fn non_st_frame_is_rejected() {
        let r = gallery::<f64>("example-s2-1", &[]).unwrap().tensor;
        assert!(matches!(classify_sign_cases(&r, &Frame4::identity()), Err(FrameError::NotSTFrame { .. })));
    }
}
