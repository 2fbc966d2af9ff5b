//! Named reference geometries with their known invariants.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use serde::Serialize;

use super::lie::{lie_group_curvature, solvable_non_chern, solvable_weakly_einstein};
use super::{constant_curvature, space_form_product, surface_product, SourceError};
use crate::scalar::Real;
use crate::tensor::Curvature4;

/// Expected values the pipeline output is diffed against.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GalleryMeta {
    pub name: String,
    pub params: BTreeMap<String, f64>,
    /// Ricci eigenvalues as a multiset, listed in reference-frame order.
    pub eigenvalues: [f64; 4],
    pub einstein: bool,
    pub weakly_einstein: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub forbidden_pattern: Option<u8>,
    /// Sign cases that must be reported in the frame found for the
    /// untransformed tensor.
    pub sign_cases_include: Vec<String>,
    /// When set, the reported case set must equal this list.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sign_cases_exact: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub volume: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub chi: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c_bound: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hitchin: Option<bool>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl GalleryMeta {
    fn new(name: &str, params: BTreeMap<String, f64>, eigenvalues: [f64; 4]) -> Self {
        Self {
            name: name.to_string(),
            params,
            eigenvalues,
            einstein: false,
            weakly_einstein: false,
            forbidden_pattern: None,
            sign_cases_include: Vec::new(),
            sign_cases_exact: None,
            volume: None,
            chi: None,
            p1: None,
            c_bound: None,
            hitchin: None,
            notes: Vec::new(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct GalleryEntry<T> {
    pub tensor: Curvature4<T>,
    pub meta: GalleryMeta,
}

/// `(name, parameters with defaults, description)`.
const ENTRIES: &[(&str, &[(&str, f64)], &str)] = &[
    ("example-s2-1", &[], "solvable group whose Ricci eigenbasis is not a Chern basis"),
    ("example-products", &[("c1", 1.0), ("c2", 2.0)], "product of surfaces with curvatures c1, c2"),
    ("example-spaceform", &[("c", 1.0)], "3-dimensional space form of curvature c times a line"),
    ("example-pm-c", &[("c", 1.0)], "product of surfaces with curvatures c and -c"),
    ("example4", &[("a", 1.0), ("b", 0.0)], "weakly Einstein solvable group, not Einstein"),
    ("example6", &[("m", 2.0)], "unit 2-sphere times a genus-m surface of curvature -1"),
    ("sphere4", &[], "unit round 4-sphere"),
];

pub fn gallery_names() -> Vec<(&'static str, &'static str)> {
    ENTRIES.iter().map(|(n, _, d)| (*n, *d)).collect()
}

fn cases(list: &[&str]) -> Vec<String> {
    list.iter().map(|s| s.to_string()).collect()
}

const OPPOSITE_CURVATURE_CASES: &[&str] = &["(ii)", "(vi)", "(vii)", "(viii)"];

/// Looks up a gallery geometry. Unlisted parameters take their defaults;
/// unknown parameter names are rejected.
pub fn gallery<T: Real>(name: &str, params: &[(&str, f64)]) -> Result<GalleryEntry<T>, SourceError> {
    let (_, defaults, _) = ENTRIES
        .iter()
        .find(|(n, _, _)| *n == name)
        .ok_or_else(|| SourceError::UnknownGalleryName(name.to_string()))?;
    let mut p: BTreeMap<String, f64> = defaults.iter().map(|(k, v)| (k.to_string(), *v)).collect();
    for &(k, v) in params {
        if !p.contains_key(k) {
            return Err(SourceError::Validation {
                field: k.to_string(),
                constraint: format!("not a parameter of gallery entry `{name}`"),
            });
        }
        if !v.is_finite() {
            return Err(SourceError::Validation { field: k.to_string(), constraint: "finite".into() });
        }
        p.insert(k.to_string(), v);
    }
    let get = |k: &str| p[k];

    let (tensor, meta) = match name {
        "example-s2-1" => {
            let (_, r) = lie_group_curvature(&solvable_non_chern::<T>())?;
            (r, GalleryMeta::new(name, p.clone(), [-8.0, 0.0, 2.0, -2.0]))
        }
        "example-products" => {
            let (c1, c2) = (get("c1"), get("c2"));
            let mut meta = GalleryMeta::new(name, p.clone(), [c1, c1, c2, c2]);
            meta.einstein = c1 == c2;
            meta.weakly_einstein = c1 * c1 == c2 * c2;
            if c1 == c2 {
                meta.sign_cases_include = cases(&["(i)"]);
            } else if c1 == -c2 {
                meta.sign_cases_exact = Some(cases(OPPOSITE_CURVATURE_CASES));
                meta.sign_cases_include = cases(OPPOSITE_CURVATURE_CASES);
            }
            (surface_product(T::lit(c1), T::lit(c2)), meta)
        }
        "example-spaceform" => {
            let c = get("c");
            let mut meta = GalleryMeta::new(name, p.clone(), [2.0 * c, 2.0 * c, 2.0 * c, 0.0]);
            meta.einstein = c == 0.0;
            meta.weakly_einstein = c == 0.0;
            if c != 0.0 {
                meta.forbidden_pattern = Some(1);
            }
            (space_form_product(T::lit(c)), meta)
        }
        "example-pm-c" => {
            let c = get("c");
            if c == 0.0 {
                return Err(SourceError::Validation { field: "c".into(), constraint: "non-zero".into() });
            }
            let mut meta = GalleryMeta::new(name, p.clone(), [c, c, -c, -c]);
            meta.weakly_einstein = true;
            meta.sign_cases_exact = Some(cases(OPPOSITE_CURVATURE_CASES));
            meta.sign_cases_include = cases(OPPOSITE_CURVATURE_CASES);
            (surface_product(T::lit(c), T::lit(-c)), meta)
        }
        "example4" => {
            let (a, b) = (get("a"), get("b"));
            if a == 0.0 {
                return Err(SourceError::Validation { field: "a".into(), constraint: "non-zero".into() });
            }
            let a2 = a * a;
            let (_, r) = lie_group_curvature(&solvable_weakly_einstein(T::lit(a), T::lit(b)))?;
            let mut meta = GalleryMeta::new(name, p.clone(), [-3.0 * a2, a2, -a2, -a2]);
            meta.weakly_einstein = true;
            meta.sign_cases_include = cases(&["(v)"]);
            (r, meta)
        }
        "example6" => {
            let m = get("m");
            if m < 2.0 || m.fract() != 0.0 {
                return Err(SourceError::Validation { field: "m".into(), constraint: "integer genus >= 2".into() });
            }
            let mut meta = GalleryMeta::new(name, p.clone(), [1.0, 1.0, -1.0, -1.0]);
            meta.weakly_einstein = true;
            meta.sign_cases_exact = Some(cases(OPPOSITE_CURVATURE_CASES));
            meta.sign_cases_include = cases(OPPOSITE_CURVATURE_CASES);
            // vol(S²) = 4π; vol(Σ_m) = 4π(m − 1) at curvature −1 by Gauss–Bonnet
            meta.volume = Some(16.0 * PI * PI * (m - 1.0));
            meta.chi = Some(4.0 * (1.0 - m));
            meta.p1 = Some(0.0);
            meta.c_bound = Some(8.0 * (1.0 - m));
            meta.hitchin = Some(false);
            meta.notes.push("factor curvatures fixed at K = +1 (sphere) and K = -1 (genus-m surface)".into());
            (surface_product(T::one(), -T::one()), meta)
        }
        "sphere4" => {
            let mut meta = GalleryMeta::new(name, p.clone(), [3.0; 4]);
            meta.einstein = true;
            meta.weakly_einstein = true;
            meta.sign_cases_include = cases(&["(i)"]);
            meta.volume = Some(8.0 * PI * PI / 3.0);
            meta.chi = Some(2.0);
            meta.p1 = Some(0.0);
            meta.c_bound = Some(0.0);
            meta.hitchin = Some(true);
            (constant_curvature(T::one()), meta)
        }
        _ => unreachable!("names come from ENTRIES"),
    };
    Ok(GalleryEntry { tensor, meta })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::ricci;

    #[test]
    fn non_chern_entry() {
        let e = gallery::<f64>("example-s2-1", &[]).unwrap();
        assert_eq!(e.meta.eigenvalues, [-8.0, 0.0, 2.0, -2.0]);
        assert_eq!(ricci(&e.tensor).diagonal(), e.meta.eigenvalues);
    }

    #[test]
    fn example4_entry() {
        let e = gallery::<f64>("example4", &[("a", 1.0), ("b", 0.0)]).unwrap();
        assert!(e.meta.weakly_einstein);
        assert!(!e.meta.einstein);
        assert_eq!(e.meta.sign_cases_include, vec!["(v)".to_string()]);
    }

    #[test]
    fn example6_entry() {
        let e = gallery::<f64>("example6", &[("m", 2.0)]).unwrap();
        assert_eq!(e.meta.chi, Some(-4.0));
        assert_eq!(e.meta.p1, Some(0.0));
        assert_eq!(e.meta.c_bound, Some(-8.0));
        assert!((e.meta.volume.unwrap() - 16.0 * PI * PI).abs() < 1e-12);
        assert!(gallery::<f64>("example6", &[("m", 1.0)]).is_err());
    }

    #[test]
    fn unknown_name_and_parameter() {
        assert_eq!(
            gallery::<f64>("nope", &[]).unwrap_err(),
            SourceError::UnknownGalleryName("nope".into())
        );
        assert!(matches!(
            gallery::<f64>("example4", &[("c", 1.0)]),
            Err(SourceError::Validation { .. })
        ));
    }

    #[test]
    fn every_entry_matches_its_eigenvalues() {
        for (name, _) in gallery_names() {
            let e = gallery::<f64>(name, &[]).unwrap();
            let rho = ricci(&e.tensor);
            // gallery tensors are all diagonal in their reference frame
            for i in 0..4 {
                assert!((rho.get(i, i) - e.meta.eigenvalues[i]).abs() < 1e-12, "{name}");
            }
        }
    }
}
