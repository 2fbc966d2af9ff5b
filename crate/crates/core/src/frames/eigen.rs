use crate::frames::pattern::{multiplicity_pattern, MultiplicityPattern};
use crate::frames::FrameError;
use crate::scalar::Real;
use crate::tensor::{ricci, Curvature4, Frame4, SymMatrix4, DIM};

pub const MAX_SWEEPS: usize = 50;

/// Cyclic Jacobi diagonalization. Eigenvalues are sorted in descending order;
/// row `i` of the frame is the unit eigenvector of eigenvalue `i`, with the
/// last row negated if needed so that the frame has det +1.
pub fn sym_eigen<T: Real>(m: &SymMatrix4<T>) -> Result<([T; DIM], Frame4<T>), FrameError> {
    if !m.is_finite() {
        return Err(FrameError::NoConvergence { sweeps: 0 });
    }
    let mut a = *m.rows();
    let mut v = [[T::zero(); DIM]; DIM];
    for (i, row) in v.iter_mut().enumerate() {
        row[i] = T::one();
    }
    let norm = m.norm_sq().sqrt();
    let threshold = T::lit(1e-13).max(T::epsilon() * T::lit(8.0)) * norm;

    let off = |a: &[[T; DIM]; DIM]| {
        let mut s = T::zero();
        for i in 0..DIM {
            for j in 0..DIM {
                if i != j {
                    s = s + a[i][j] * a[i][j];
                }
            }
        }
        s.sqrt()
    };

    let mut converged = norm == T::zero();
    for _ in 0..MAX_SWEEPS {
        if off(&a) <= threshold {
            converged = true;
            break;
        }
        for p in 0..DIM {
            for q in p + 1..DIM {
                let apq = a[p][q];
                if apq == T::zero() {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (T::lit(2.0) * apq);
                let t = if theta.abs() > T::lit(1e150).min(T::max_value().sqrt()) {
                    T::one() / (T::lit(2.0) * theta)
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt())
                };
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;
                a[p][p] = a[p][p] - t * apq;
                a[q][q] = a[q][q] + t * apq;
                a[p][q] = T::zero();
                a[q][p] = T::zero();
                for r in 0..DIM {
                    if r != p && r != q {
                        let (arp, arq) = (a[r][p], a[r][q]);
                        a[r][p] = c * arp - s * arq;
                        a[p][r] = a[r][p];
                        a[r][q] = s * arp + c * arq;
                        a[q][r] = a[r][q];
                    }
                }
                for row in v.iter_mut() {
                    let (vp, vq) = (row[p], row[q]);
                    row[p] = c * vp - s * vq;
                    row[q] = s * vp + c * vq;
                }
            }
        }
    }
    if !converged && off(&a) > threshold {
        return Err(FrameError::NoConvergence { sweeps: MAX_SWEEPS });
    }

    let mut order = [0, 1, 2, 3];
    order.sort_by(|&x, &y| a[y][y].partial_cmp(&a[x][x]).unwrap_or(std::cmp::Ordering::Equal));
    let values = order.map(|k| a[k][k]);
    let mut rows = [[T::zero(); DIM]; DIM];
    for (slot, &k) in order.iter().enumerate() {
        for r in 0..DIM {
            rows[slot][r] = v[r][k];
        }
    }
    let frame = Frame4::new(rows)
        .map_err(|_| FrameError::NoConvergence { sweeps: MAX_SWEEPS })?
        .oriented_by_negation();
    Ok((values, frame))
}

/// Eigen-decomposition of the Ricci transformation.
#[derive(Debug, Clone, PartialEq)]
pub struct RicciSpectrum<T> {
    /// Descending.
    pub eigenvalues: [T; DIM],
    /// Rows are unit eigenvectors; det +1.
    pub frame: Frame4<T>,
    pub pattern: MultiplicityPattern,
}

pub fn ricci_spectrum<T: Real>(r: &Curvature4<T>, tol_mult: T) -> Result<RicciSpectrum<T>, FrameError> {
    let (eigenvalues, frame) = sym_eigen(&ricci(r))?;
    let pattern = multiplicity_pattern(&eigenvalues, tol_mult);
    Ok(RicciSpectrum { eigenvalues, frame, pattern })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sources::gallery;
    use crate::tensor::rotate;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn diagonal_input() {
        let (vals, frame) = sym_eigen(&SymMatrix4::diag([-8.0, 0.0, 2.0, -2.0])).unwrap();
        assert_eq!(vals, [2.0, 0.0, -2.0, -8.0]);
        for row in frame.rows() {
            assert_eq!(row.iter().filter(|v: &&f64| v.abs() == 1.0).count(), 1);
        }
        assert_eq!(frame.orientation(), 1);
    }

    #[test]
    fn identity_input() {
        let (vals, frame) = sym_eigen(&SymMatrix4::<f64>::identity()).unwrap();
        assert_eq!(vals, [1.0; 4]);
        assert!(frame.orthogonality_defect() < 1e-15);
    }

    #[test]
    fn rotated_ricci_spectrum() {
        let r = gallery::<f64>("example-s2-1", &[]).unwrap().tensor;
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let f = Frame4::random(&mut rng);
        let rot = rotate(&r, &f);
        let m = ricci(&rot);
        let (vals, frame) = sym_eigen(&m).unwrap();
        for (v, e) in vals.iter().zip([2.0, 0.0, -2.0, -8.0]) {
            assert!((v - e).abs() < 1e-10);
        }
        assert!(frame.orthogonality_defect() < 1e-12);
        assert!((frame.det() - 1.0).abs() < 1e-12);
        for i in 0..4 {
            let row = frame.row(i);
            let qv = m.apply(&row);
            for a in 0..4 {
                assert!((qv[a] - vals[i] * row[a]).abs() < 1e-10 * 8.0);
            }
        }
    }

    #[test]
    fn dense_random_matrices() {
        use rand::Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..50 {
            let m = SymMatrix4::from_fn(|_, _| rng.gen_range(-5.0..5.0));
            let (vals, frame) = sym_eigen(&m).unwrap();
            assert!(vals.windows(2).all(|w| w[0] >= w[1]));
            let trace: f64 = vals.iter().sum();
            assert!((trace - m.trace()).abs() < 1e-12);
            for i in 0..4 {
                let qv = m.apply(&frame.row(i));
                for a in 0..4 {
                    assert!((qv[a] - vals[i] * frame.row(i)[a]).abs() < 1e-11);
                }
            }
        }
    }

    #[test]
    fn non_finite_input_fails() {
        let m = SymMatrix4::diag([f64::NAN, 0.0, 0.0, 0.0]);
        assert!(matches!(sym_eigen(&m), Err(FrameError::NoConvergence { .. })));
    }
}
