//! Left-invariant metrics on 4-dimensional Lie groups, in an orthonormal
//! basis of the Lie algebra.

use crate::scalar::Real;
use crate::sources::SourceError;
use crate::tensor::{make_curvature, zero_raw, Curvature4, DIM};

pub const JACOBI_TOL: f64 = 1e-10;

type Cube<T> = [[[T; DIM]; DIM]; DIM];

fn zero_cube<T: Real>() -> Cube<T> {
    [[[T::zero(); DIM]; DIM]; DIM]
}

/// Structure constants `[e_i, e_j] = Σ_k c_ijk e_k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LieAlgebra4<T> {
    c: Cube<T>,
}

impl<T: Real> LieAlgebra4<T> {
    /// Builds the algebra from bracket entries `(i, j, k, c_ijk)`, 0-based,
    /// filling `c_jik = -c_ijk`. Entries with `i == j` are rejected.
    pub fn from_brackets(entries: &[(usize, usize, usize, T)]) -> Result<Self, SourceError> {
        let mut c = zero_cube::<T>();
        for &(i, j, k, v) in entries {
            if i >= DIM || j >= DIM || k >= DIM {
                return Err(SourceError::Validation {
                    field: "c".into(),
                    constraint: format!("index out of range in ({}, {}, {})", i + 1, j + 1, k + 1),
                });
            }
            if i == j {
                return Err(SourceError::Validation {
                    field: "c".into(),
                    constraint: format!("[e_{0}, e_{0}] must vanish", i + 1),
                });
            }
            c[i][j][k] = v;
            c[j][i][k] = -v;
        }
        Self::new(c)
    }

    /// Validates antisymmetry and the Jacobi identity.
    pub fn new(c: Cube<T>) -> Result<Self, SourceError> {
        let mut scale = T::one();
        for v in c.iter().flatten().flatten() {
            if !v.is_finite() {
                return Err(SourceError::Validation { field: "c".into(), constraint: "finite".into() });
            }
            scale = scale.max(v.abs());
        }
        for i in 0..DIM {
            for j in 0..DIM {
                for k in 0..DIM {
                    if (c[i][j][k] + c[j][i][k]).abs() > T::lit(JACOBI_TOL) * scale {
                        return Err(SourceError::Validation {
                            field: "c".into(),
                            constraint: format!("c_ijk = -c_jik fails at ({}, {}, {})", i + 1, j + 1, k + 1),
                        });
                    }
                }
            }
        }
        let algebra = Self { c };
        let (magnitude, index) = algebra.jacobi_defect();
        if magnitude > T::lit(JACOBI_TOL) * scale * scale {
            return Err(SourceError::JacobiViolation { index: index.map(|v| v + 1), magnitude: magnitude.as_f64() });
        }
        Ok(algebra)
    }

    pub fn constants(&self) -> &Cube<T> {
        &self.c
    }

    /// Largest `|Σ_m (c_ijm c_mkl + c_jkm c_mil + c_kim c_mjl)|` and where it occurs.
    pub fn jacobi_defect(&self) -> (T, [usize; 4]) {
        let c = &self.c;
        let mut worst = (T::zero(), [0; 4]);
        for i in 0..DIM {
            for j in 0..DIM {
                for k in 0..DIM {
                    for l in 0..DIM {
                        let v: T = (0..DIM)
                            .map(|m| c[i][j][m] * c[m][k][l] + c[j][k][m] * c[m][i][l] + c[k][i][m] * c[m][j][l])
                            .sum();
                        if v.abs() > worst.0 {
                            worst = (v.abs(), [i, j, k, l]);
                        }
                    }
                }
            }
        }
        worst
    }
}

/// Levi-Civita connection coefficients `Γ_ijk = ⟨∇_{e_i} e_j, e_k⟩`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Connection4<T> {
    gamma: Cube<T>,
}

impl<T: Real> Connection4<T> {
    pub fn get(&self, i: usize, j: usize, k: usize) -> T {
        self.gamma[i][j][k]
    }

    pub fn coefficients(&self) -> &Cube<T> {
        &self.gamma
    }
}

/// Koszul formula for a left-invariant metric in an orthonormal basis:
/// `Γ_ijk = ½(c_ijk − c_jki + c_kij)`.
pub fn levi_civita<T: Real>(g: &LieAlgebra4<T>) -> Connection4<T> {
    let c = &g.c;
    let half = T::lit(0.5);
    let mut gamma = zero_cube::<T>();
    for i in 0..DIM {
        for j in 0..DIM {
            for k in 0..DIM {
                gamma[i][j][k] = half * (c[i][j][k] - c[j][k][i] + c[k][i][j]);
            }
        }
    }
    Connection4 { gamma }
}

/// Connection and curvature of the left-invariant metric. Frame coefficients
/// are constant, so
/// `R_ijkl = Σ_m (Γ_jkm Γ_iml − Γ_ikm Γ_jml − c_ijm Γ_mkl)`.
pub fn lie_group_curvature<T: Real>(g: &LieAlgebra4<T>) -> Result<(Connection4<T>, Curvature4<T>), SourceError> {
    let conn = levi_civita(g);
    let gm = &conn.gamma;
    let c = &g.c;
    let mut raw = zero_raw::<T>();
    for i in 0..DIM {
        for j in 0..DIM {
            for k in 0..DIM {
                for l in 0..DIM {
                    raw[i][j][k][l] = (0..DIM)
                        .map(|m| gm[j][k][m] * gm[i][m][l] - gm[i][k][m] * gm[j][m][l] - c[i][j][m] * gm[m][k][l])
                        .sum();
                }
            }
        }
    }
    let r = make_curvature(&raw)?;
    Ok((conn, r))
}

/// Brackets `[e1,e2]=2e2, [e1,e3]=-e3, [e1,e4]=2e3-e4`: a Ricci eigenbasis
/// that is not a Chern basis.
pub fn solvable_non_chern<T: Real>() -> LieAlgebra4<T> {
    LieAlgebra4::from_brackets(&[
        (0, 1, 1, T::lit(2.0)),
        (0, 2, 2, T::lit(-1.0)),
        (0, 3, 2, T::lit(2.0)),
        (0, 3, 3, T::lit(-1.0)),
    ])
    .expect("valid algebra")
}

/// Brackets `[e1,e2]=a e2, [e1,e3]=-a e3 - b e4, [e1,e4]=b e3 - a e4`.
pub fn solvable_weakly_einstein<T: Real>(a: T, b: T) -> LieAlgebra4<T> {
    LieAlgebra4::from_brackets(&[(0, 1, 1, a), (0, 2, 2, -a), (0, 2, 3, -b), (0, 3, 2, b), (0, 3, 3, -a)])
        .expect("valid algebra")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::ricci;

    fn assert_only(gamma: &Connection4<f64>, listed: &[([usize; 3], f64)]) {
        for i in 0..4 {
            for j in 0..4 {
                for k in 0..4 {
                    let expected = listed
                        .iter()
                        .find_map(|&([a, b, c], v)| {
                            if [a, b, c] == [i + 1, j + 1, k + 1] {
                                Some(v)
                            } else if [a, c, b] == [i + 1, j + 1, k + 1] {
                                Some(-v)
                            } else {
                                None
                            }
                        })
                        .unwrap_or(0.0);
                    assert!(
                        (gamma.get(i, j, k) - expected).abs() < 1e-12,
                        "Γ_{}{}{} = {} expected {}",
                        i + 1,
                        j + 1,
                        k + 1,
                        gamma.get(i, j, k),
                        expected
                    );
                }
            }
        }
    }

    fn assert_components(r: &Curvature4<f64>, listed: &[([usize; 4], f64)]) {
        let expected = crate::tensor::orbit_fill(
            &listed.iter().map(|&(ix, v)| (ix.map(|x| x - 1), v)).collect::<Vec<_>>(),
        );
        for i in 0..4 {
            for j in 0..4 {
                for k in 0..4 {
                    for l in 0..4 {
                        assert!(
                            (r.get(i, j, k, l) - expected[i][j][k][l]).abs() < 1e-12,
                            "R_{}{}{}{}",
                            i + 1,
                            j + 1,
                            k + 1,
                            l + 1
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn non_chern_example_tables() {
        let (gamma, r) = lie_group_curvature(&solvable_non_chern::<f64>()).unwrap();
        assert_only(
            &gamma,
            &[
                ([1, 3, 4], -1.0),
                ([2, 1, 2], -2.0),
                ([3, 1, 3], 1.0),
                ([3, 1, 4], -1.0),
                ([4, 1, 3], -1.0),
                ([4, 1, 4], 1.0),
            ],
        );
        assert_components(
            &r,
            &[
                ([1, 2, 1, 2], 4.0),
                ([1, 4, 1, 4], 4.0),
                ([2, 3, 2, 3], -2.0),
                ([2, 4, 2, 4], -2.0),
                ([1, 3, 1, 4], -2.0),
                ([2, 3, 2, 4], 2.0),
            ],
        );
        assert_eq!(ricci(&r).diagonal(), [-8.0, 0.0, 2.0, -2.0]);
    }

    #[test]
    fn weakly_einstein_group_tables() {
        let (gamma, r) = lie_group_curvature(&solvable_weakly_einstein(1.0, 2.0)).unwrap();
        assert_only(&gamma, &[([1, 3, 4], -2.0), ([2, 1, 2], -1.0), ([3, 1, 3], 1.0), ([4, 1, 4], 1.0)]);
        assert_components(
            &r,
            &[
                ([1, 2, 1, 2], 1.0),
                ([1, 3, 1, 3], 1.0),
                ([1, 4, 1, 4], 1.0),
                ([2, 3, 2, 3], -1.0),
                ([2, 4, 2, 4], -1.0),
                ([3, 4, 3, 4], 1.0),
            ],
        );
        let rho = ricci(&r);
        assert_eq!(rho.get(0, 0), -3.0);
        assert_eq!(rho.get(1, 1), 1.0);
    }

    #[test]
    fn curvature_scales_with_a_squared() {
        let (_, r) = lie_group_curvature(&solvable_weakly_einstein(2.0f64, 0.5)).unwrap();
        assert!((r.get(0, 1, 0, 1) - 4.0).abs() < 1e-12);
        assert!((r.get(1, 2, 1, 2) + 4.0).abs() < 1e-12);
    }

    #[test]
    fn abelian_algebra_is_flat() {
        let g = LieAlgebra4::<f64>::from_brackets(&[]).unwrap();
        let (gamma, r) = lie_group_curvature(&g).unwrap();
        assert!(gamma.coefficients().iter().flatten().flatten().all(|&v| v == 0.0));
        assert_eq!(r, Curvature4::zero());
    }

    #[test]
    fn connection_is_metric() {
        let gamma = levi_civita(&solvable_non_chern::<f64>());
        for i in 0..4 {
            for j in 0..4 {
                for k in 0..4 {
                    assert_eq!(gamma.get(i, j, k), -gamma.get(i, k, j));
                }
            }
        }
    }

    #[test]
    fn jacobi_violation_is_reported() {
        // [e1,e2]=e3, [e2,e3]=e4, [e1,e3]=0, [e1,e4]=e4 fails Jacobi
        let err = LieAlgebra4::<f64>::from_brackets(&[(0, 1, 2, 1.0), (1, 2, 3, 1.0), (0, 3, 3, 1.0)]).unwrap_err();
        assert!(matches!(err, SourceError::JacobiViolation { .. }), "{err:?}");
    }

    #[test]
    fn diagonal_bracket_rejected() {
        assert!(LieAlgebra4::<f64>::from_brackets(&[(1, 1, 0, 1.0)]).is_err());
    }
}
