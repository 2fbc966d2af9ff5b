//! Dense algebraic curvature tensors in dimension four.
//!
//! Components are stored in an orthonormal frame with the convention
//! `R_ijkl = g(R(e_i, e_j) e_k, e_l)` and `R(X, Y) = [∇_X, ∇_Y] - ∇_[X,Y]`.
//! Under this convention the sectional curvature of the plane `(e_i, e_j)` is
//! `R_ijji` and the Ricci tensor is the contraction `ρ_ij = Σ_a R_aija`.
//!
//! All indices in this module are 0-based.

use std::fmt;

use rand::Rng;
use rand_distr::StandardNormal;
use thiserror::Error;

use crate::scalar::Real;

pub const DIM: usize = 4;

/// Raw `4×4×4×4` component array.
pub type Raw4<T> = [[[[T; DIM]; DIM]; DIM]; DIM];

/// Tolerance used by [`make_curvature`], relative to `max(1, max|R_ijkl|)`.
pub const SYMMETRY_TOL: f64 = 1e-10;

/// Tolerance on `F Fᵀ = I` for [`Frame4`].
pub const ORTHOGONALITY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Identity {
    FirstPairAntisymmetry,
    LastPairAntisymmetry,
    PairExchange,
    FirstBianchi,
}

impl fmt::Display for Identity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Identity::FirstPairAntisymmetry => "R_ijkl = -R_jikl",
            Identity::LastPairAntisymmetry => "R_ijkl = -R_ijlk",
            Identity::PairExchange => "R_ijkl = R_klij",
            Identity::FirstBianchi => "R_ijkl + R_iklj + R_iljk = 0",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TensorError {
    /// `index` is 1-based.
    #[error("symmetry violation: {identity} fails at {index:?} by {magnitude:e}")]
    SymmetryViolation {
        identity: Identity,
        index: [usize; 4],
        magnitude: f64,
    },
    #[error("non-finite tensor component")]
    NonFinite,
    #[error("frame is not orthogonal (max |F Fᵀ - I| = {deviation:e})")]
    FrameNotOrthogonal { deviation: f64 },
}

pub(crate) fn zero_raw<T: Real>() -> Raw4<T> {
    [[[[T::zero(); DIM]; DIM]; DIM]; DIM]
}

#[inline]
fn at<T: Copy>(c: &Raw4<T>, [i, j, k, l]: [usize; 4]) -> T {
    c[i][j][k][l]
}

fn for_each_index(mut f: impl FnMut([usize; 4])) {
    for i in 0..DIM {
        for j in 0..DIM {
            for k in 0..DIM {
                for l in 0..DIM {
                    f([i, j, k, l]);
                }
            }
        }
    }
}

/// A 4D algebraic curvature tensor at a point.
#[derive(Clone, Copy, PartialEq)]
pub struct Curvature4<T> {
    comp: Raw4<T>,
}

/// Lists the 21 components `R_ijkl` with `i < j`, `k < l`, `(i, j) <= (k, l)`.
impl<T: fmt::Debug> fmt::Debug for Curvature4<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut list = f.debug_map();
        for_each_index(|ix| {
            let [i, j, k, l] = ix;
            if i < j && k < l && (i, j) <= (k, l) {
                list.entry(&[i + 1, j + 1, k + 1, l + 1], &self.comp[i][j][k][l]);
            }
        });
        list.finish()
    }
}

impl<T: Real> Curvature4<T> {
    pub fn zero() -> Self {
        Self { comp: zero_raw() }
    }

    /// Wraps components that are already known to satisfy every identity.
    pub(crate) fn from_raw_unchecked(comp: Raw4<T>) -> Self {
        Self { comp }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize, l: usize) -> T {
        self.comp[i][j][k][l]
    }

    pub fn components(&self) -> &Raw4<T> {
        &self.comp
    }

    pub fn max_abs(&self) -> T {
        let mut m = T::zero();
        for_each_index(|ix| m = m.max(at(&self.comp, ix).abs()));
        m
    }

    /// `max(1, max|R_ijkl|)`, the reference magnitude for every tolerance.
    pub fn scale(&self) -> T {
        self.max_abs().max(T::one())
    }

    /// Sectional curvature of the coordinate plane `(e_i, e_j)`, `i != j`.
    pub fn sectional(&self, i: usize, j: usize) -> T {
        self.comp[i][j][j][i]
    }

    /// `R(x, y, z, w)` for arbitrary vectors.
    pub fn eval(&self, x: &[T; 4], y: &[T; 4], z: &[T; 4], w: &[T; 4]) -> T {
        let mut acc = T::zero();
        for i in 0..DIM {
            if x[i] == T::zero() {
                continue;
            }
            for j in 0..DIM {
                if y[j] == T::zero() {
                    continue;
                }
                let xy = x[i] * y[j];
                for k in 0..DIM {
                    if z[k] == T::zero() {
                        continue;
                    }
                    let xyz = xy * z[k];
                    for l in 0..DIM {
                        acc = acc + xyz * w[l] * self.comp[i][j][k][l];
                    }
                }
            }
        }
        acc
    }

    pub fn scaled(&self, factor: T) -> Self {
        let mut comp = self.comp;
        for_each_index(|[i, j, k, l]| comp[i][j][k][l] = comp[i][j][k][l] * factor);
        Self { comp }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut comp = self.comp;
        for_each_index(|[i, j, k, l]| comp[i][j][k][l] = comp[i][j][k][l] + other.comp[i][j][k][l]);
        Self { comp }
    }

    pub fn cast<U: Real>(&self) -> Curvature4<U> {
        let mut comp = zero_raw::<U>();
        for_each_index(|[i, j, k, l]| comp[i][j][k][l] = U::lit(self.comp[i][j][k][l].as_f64()));
        Curvature4 { comp }
    }

    /// Max componentwise difference.
    pub fn max_diff(&self, other: &Self) -> T {
        let mut m = T::zero();
        for_each_index(|ix| m = m.max((at(&self.comp, ix) - at(&other.comp, ix)).abs()));
        m
    }
}

/// Symmetric `4×4` matrix; symmetry is exact because only the upper triangle
/// is ever computed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymMatrix4<T> {
    m: [[T; DIM]; DIM],
}

impl<T: Real> SymMatrix4<T> {
    pub fn from_fn(mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut m = [[T::zero(); DIM]; DIM];
        for i in 0..DIM {
            for j in i..DIM {
                let v = f(i, j);
                m[i][j] = v;
                m[j][i] = v;
            }
        }
        Self { m }
    }

    /// Symmetrizes an arbitrary matrix as `(A + Aᵀ)/2`.
    pub fn symmetrize(a: &[[T; DIM]; DIM]) -> Self {
        let half = T::lit(0.5);
        Self::from_fn(|i, j| (a[i][j] + a[j][i]) * half)
    }

    pub fn zero() -> Self {
        Self::from_fn(|_, _| T::zero())
    }

    pub fn identity() -> Self {
        Self::diag([T::one(); DIM])
    }

    pub fn diag(d: [T; DIM]) -> Self {
        Self::from_fn(|i, j| if i == j { d[i] } else { T::zero() })
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.m[i][j]
    }

    pub fn rows(&self) -> &[[T; DIM]; DIM] {
        &self.m
    }

    pub fn diagonal(&self) -> [T; DIM] {
        [self.m[0][0], self.m[1][1], self.m[2][2], self.m[3][3]]
    }

    pub fn trace(&self) -> T {
        (0..DIM).map(|i| self.m[i][i]).sum()
    }

    /// `Σ_ij A_ij²`.
    pub fn norm_sq(&self) -> T {
        self.m.iter().flatten().map(|&v| v * v).sum()
    }

    pub fn max_abs(&self) -> T {
        self.m.iter().flatten().fold(T::zero(), |a, &v| a.max(v.abs()))
    }

    pub fn add(&self, o: &Self) -> Self {
        Self::from_fn(|i, j| self.m[i][j] + o.m[i][j])
    }

    pub fn sub(&self, o: &Self) -> Self {
        Self::from_fn(|i, j| self.m[i][j] - o.m[i][j])
    }

    pub fn scaled(&self, s: T) -> Self {
        Self::from_fn(|i, j| self.m[i][j] * s)
    }

    /// `A·B`, symmetrized. Exact for commuting factors such as `ρ·ρ`.
    pub fn mul_sym(&self, o: &Self) -> Self {
        let mut p = [[T::zero(); DIM]; DIM];
        for (i, row) in p.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = (0..DIM).map(|a| self.m[i][a] * o.m[a][j]).sum();
            }
        }
        Self::symmetrize(&p)
    }

    /// `v ↦ A v`.
    pub fn apply(&self, v: &[T; DIM]) -> [T; DIM] {
        let mut out = [T::zero(); DIM];
        for (i, o) in out.iter_mut().enumerate() {
            *o = (0..DIM).map(|a| self.m[i][a] * v[a]).sum();
        }
        out
    }

    pub fn is_finite(&self) -> bool {
        self.m.iter().flatten().all(|v| v.is_finite())
    }
}

/// Orthonormal frame: row `i` holds `e'_i` in reference coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Frame4<T> {
    m: [[T; DIM]; DIM],
    orientation: i8,
}

fn det4<T: Real>(m: &[[T; DIM]; DIM]) -> T {
    let mut a = *m;
    let mut det = T::one();
    for col in 0..DIM {
        let pivot = (col..DIM)
            .max_by(|&x, &y| a[x][col].abs().partial_cmp(&a[y][col].abs()).unwrap_or(std::cmp::Ordering::Equal))
            .unwrap_or(col);
        if a[pivot][col] == T::zero() {
            return T::zero();
        }
        if pivot != col {
            a.swap(pivot, col);
            det = -det;
        }
        det = det * a[col][col];
        for r in col + 1..DIM {
            let factor = a[r][col] / a[col][col];
            for c in col..DIM {
                a[r][c] = a[r][c] - factor * a[col][c];
            }
        }
    }
    det
}

fn orthogonality_defect<T: Real>(m: &[[T; DIM]; DIM]) -> T {
    let mut worst = T::zero();
    for i in 0..DIM {
        for j in 0..DIM {
            let dot: T = (0..DIM).map(|a| m[i][a] * m[j][a]).sum();
            let target = if i == j { T::one() } else { T::zero() };
            worst = worst.max((dot - target).abs());
        }
    }
    worst
}

fn orthogonality_tol<T: Real>() -> T {
    T::lit(ORTHOGONALITY_TOL).max(T::epsilon() * T::lit(64.0))
}

impl<T: Real> Frame4<T> {
    pub fn new(m: [[T; DIM]; DIM]) -> Result<Self, TensorError> {
        if m.iter().flatten().any(|v| !v.is_finite()) {
            return Err(TensorError::NonFinite);
        }
        let deviation = orthogonality_defect(&m);
        if deviation > orthogonality_tol::<T>() {
            return Err(TensorError::FrameNotOrthogonal { deviation: deviation.as_f64() });
        }
        Ok(Self::trusted(m))
    }

    fn trusted(m: [[T; DIM]; DIM]) -> Self {
        let orientation = if det4(&m) < T::zero() { -1 } else { 1 };
        Self { m, orientation }
    }

    pub fn identity() -> Self {
        let mut m = [[T::zero(); DIM]; DIM];
        for (i, row) in m.iter_mut().enumerate() {
            row[i] = T::one();
        }
        Self::trusted(m)
    }

    /// Frame whose row `k` is the reference vector `e_{order[k]}`.
    pub fn permutation(order: [usize; DIM]) -> Self {
        let mut m = [[T::zero(); DIM]; DIM];
        for (k, &src) in order.iter().enumerate() {
            m[k][src] = T::one();
        }
        Self::trusted(m)
    }

    /// Rotation by `angle` in the `(p, q)` coordinate plane:
    /// `e'_p = cos t e_p + sin t e_q`, `e'_q = -sin t e_p + cos t e_q`.
    pub fn givens(p: usize, q: usize, angle: T) -> Self {
        Self::identity().rotated_rows(p, q, angle)
    }

    /// Haar-distributed random rotation (det +1).
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        loop {
            let mut m = [[T::zero(); DIM]; DIM];
            for v in m.iter_mut().flatten() {
                let x: f64 = rng.sample(StandardNormal);
                *v = T::lit(x);
            }
            if let Some(f) = gram_schmidt(m) {
                return f.with_positive_orientation_by_negation();
            }
        }
    }

    pub fn rows(&self) -> &[[T; DIM]; DIM] {
        &self.m
    }

    pub fn row(&self, i: usize) -> [T; DIM] {
        self.m[i]
    }

    pub fn orientation(&self) -> i8 {
        self.orientation
    }

    pub fn det(&self) -> T {
        det4(&self.m)
    }

    pub fn orthogonality_defect(&self) -> T {
        orthogonality_defect(&self.m)
    }

    /// Frame obtained by first applying `self`, then `after` expressed in the
    /// new frame: the matrix product `after · self`.
    pub fn then(&self, after: &Frame4<T>) -> Frame4<T> {
        let mut m = [[T::zero(); DIM]; DIM];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = (0..DIM).map(|a| after.m[i][a] * self.m[a][j]).sum();
            }
        }
        Self::trusted(m)
    }

    /// Rotates rows `p` and `q` of this frame in their common plane.
    pub fn rotated_rows(&self, p: usize, q: usize, angle: T) -> Self {
        let (s, c) = angle.sin_cos();
        let mut m = self.m;
        for a in 0..DIM {
            let (x, y) = (self.m[p][a], self.m[q][a]);
            m[p][a] = c * x + s * y;
            m[q][a] = -s * x + c * y;
        }
        Self { m, orientation: self.orientation }
    }

    pub fn swapped_rows(&self, a: usize, b: usize) -> Self {
        let mut m = self.m;
        m.swap(a, b);
        Self { m, orientation: -self.orientation }
    }

    /// Reorders rows: row `k` of the result is row `order[k]` of `self`.
    pub fn reordered(&self, order: [usize; DIM]) -> Self {
        let mut m = self.m;
        for (k, &src) in order.iter().enumerate() {
            m[k] = self.m[src];
        }
        Self::trusted(m)
    }

    fn with_positive_orientation_by_negation(mut self) -> Self {
        if self.orientation < 0 {
            for v in self.m[DIM - 1].iter_mut() {
                *v = -*v;
            }
            self.orientation = 1;
        }
        self
    }

    /// Flips the last row if needed so that `det = +1`.
    pub fn oriented_by_negation(self) -> Self {
        self.with_positive_orientation_by_negation()
    }

    /// Swaps the last two rows if needed so that `det = +1`.
    pub fn oriented_by_swap(self) -> Self {
        if self.orientation < 0 {
            self.swapped_rows(DIM - 2, DIM - 1)
        } else {
            self
        }
    }

    /// Removes accumulated rounding drift.
    pub fn reorthonormalized(&self) -> Self {
        let orientation = self.orientation;
        let mut f = gram_schmidt(self.m).unwrap_or(*self);
        f.orientation = orientation;
        f
    }

    pub fn cast<U: Real>(&self) -> Frame4<U> {
        let mut m = [[U::zero(); DIM]; DIM];
        for i in 0..DIM {
            for j in 0..DIM {
                m[i][j] = U::lit(self.m[i][j].as_f64());
            }
        }
        Frame4 { m, orientation: self.orientation }
    }

    /// Row-major entries.
    pub fn to_row_major(&self) -> [T; 16] {
        let mut out = [T::zero(); 16];
        for i in 0..DIM {
            for j in 0..DIM {
                out[4 * i + j] = self.m[i][j];
            }
        }
        out
    }
}

fn gram_schmidt<T: Real>(mut m: [[T; DIM]; DIM]) -> Option<Frame4<T>> {
    for i in 0..DIM {
        // two passes keep the result orthogonal to working precision
        for _ in 0..2 {
            for j in 0..i {
                let dot: T = (0..DIM).map(|a| m[i][a] * m[j][a]).sum();
                for a in 0..DIM {
                    m[i][a] = m[i][a] - dot * m[j][a];
                }
            }
        }
        let norm = (0..DIM).map(|a| m[i][a] * m[i][a]).sum::<T>().sqrt();
        if norm < T::lit(1e-6) {
            return None;
        }
        for a in 0..DIM {
            m[i][a] = m[i][a] / norm;
        }
    }
    Some(Frame4::trusted(m))
}

/// Scalar invariants `|R|²`, `|ρ|²`, `τ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalarSummary<T> {
    pub norm_r2: T,
    pub norm_rho2: T,
    pub tau: T,
}

/// The three quadratic tensors entering the universal identity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedTensors<T> {
    /// `Ř_ij = Σ R_abci R_abcj`
    pub r_check: SymMatrix4<T>,
    /// `ρ̌ = ρ·ρ`
    pub rho_check: SymMatrix4<T>,
    /// `(Lρ)_ij = 2 Σ R_iabj ρ_ab`
    pub l_rho: SymMatrix4<T>,
}

fn symmetry_defects<T: Real>(raw: &Raw4<T>) -> [(T, [usize; 4]); 4] {
    let mut worst = [(T::zero(), [0usize; 4]); 4];
    let mut bump = |slot: usize, v: T, ix: [usize; 4]| {
        if v > worst[slot].0 {
            worst[slot] = (v, ix);
        }
    };
    for_each_index(|ix| {
        let [i, j, k, l] = ix;
        let r = raw[i][j][k][l];
        bump(0, (r + raw[j][i][k][l]).abs(), ix);
        bump(1, (r + raw[i][j][l][k]).abs(), ix);
        bump(2, (r - raw[k][l][i][j]).abs(), ix);
        bump(3, (r + raw[i][k][l][j] + raw[i][l][j][k]).abs(), ix);
    });
    worst
}

/// Validates a raw component array and returns it with pair symmetries
/// re-imposed exactly.
pub fn make_curvature<T: Real>(raw: &Raw4<T>) -> Result<Curvature4<T>, TensorError> {
    let mut scale = T::one();
    let mut finite = true;
    for_each_index(|ix| {
        let v = at(raw, ix);
        finite &= v.is_finite();
        scale = scale.max(v.abs());
    });
    if !finite {
        return Err(TensorError::NonFinite);
    }
    let tol = T::lit(SYMMETRY_TOL) * scale;
    let identities = [
        Identity::FirstPairAntisymmetry,
        Identity::LastPairAntisymmetry,
        Identity::PairExchange,
        Identity::FirstBianchi,
    ];
    let defects = symmetry_defects(raw);
    let (slot, &(magnitude, ix)) = defects
        .iter()
        .enumerate()
        .max_by(|a, b| a.1 .0.partial_cmp(&b.1 .0).unwrap_or(std::cmp::Ordering::Equal))
        .expect("four identities");
    if magnitude > tol {
        return Err(TensorError::SymmetryViolation {
            identity: identities[slot],
            index: ix.map(|v| v + 1),
            magnitude: magnitude.as_f64(),
        });
    }
    Ok(project_to_curvature(raw))
}

/// Orthogonal projection onto algebraic curvature tensors.
pub fn project_to_curvature<T: Real>(raw: &Raw4<T>) -> Curvature4<T> {
    let quarter = T::lit(0.25);
    let half = T::lit(0.5);
    let third = T::one() / T::lit(3.0);

    let mut pairs = zero_raw::<T>();
    for_each_index(|[i, j, k, l]| {
        pairs[i][j][k][l] = (raw[i][j][k][l] - raw[j][i][k][l] - raw[i][j][l][k] + raw[j][i][l][k]) * quarter;
    });
    let mut exch = zero_raw::<T>();
    for_each_index(|[i, j, k, l]| {
        exch[i][j][k][l] = (pairs[i][j][k][l] + pairs[k][l][i][j]) * half;
    });
    let mut out = zero_raw::<T>();
    for_each_index(|[i, j, k, l]| {
        let alternation = (exch[i][j][k][l] + exch[i][k][l][j] + exch[i][l][j][k]) * third;
        out[i][j][k][l] = exch[i][j][k][l] - alternation;
    });
    Curvature4 { comp: out }
}

/// Expands a list of components over their symmetry orbits. Later entries
/// overwrite earlier ones sharing an orbit. Indices are 0-based.
pub fn orbit_fill<T: Real>(entries: &[([usize; 4], T)]) -> Raw4<T> {
    let mut raw = zero_raw::<T>();
    for &([i, j, k, l], v) in entries {
        for (ix, sign) in [
            ([i, j, k, l], v),
            ([j, i, k, l], -v),
            ([i, j, l, k], -v),
            ([j, i, l, k], v),
            ([k, l, i, j], v),
            ([l, k, i, j], -v),
            ([k, l, j, i], -v),
            ([l, k, j, i], v),
        ] {
            raw[ix[0]][ix[1]][ix[2]][ix[3]] = sign;
        }
    }
    raw
}

/// `ρ_ij = Σ_a R_aija`.
pub fn ricci<T: Real>(r: &Curvature4<T>) -> SymMatrix4<T> {
    SymMatrix4::from_fn(|i, j| (0..DIM).map(|a| r.comp[a][i][j][a]).sum())
}

pub fn summary<T: Real>(r: &Curvature4<T>) -> ScalarSummary<T> {
    let mut norm_r2 = T::zero();
    for_each_index(|ix| {
        let v = at(&r.comp, ix);
        norm_r2 = norm_r2 + v * v;
    });
    let rho = ricci(r);
    ScalarSummary { norm_r2, norm_rho2: rho.norm_sq(), tau: rho.trace() }
}

pub fn derived_tensors<T: Real>(r: &Curvature4<T>) -> DerivedTensors<T> {
    let c = &r.comp;
    let r_check = SymMatrix4::from_fn(|i, j| {
        let mut acc = T::zero();
        for a in 0..DIM {
            for b in 0..DIM {
                for k in 0..DIM {
                    acc = acc + c[a][b][k][i] * c[a][b][k][j];
                }
            }
        }
        acc
    });
    let rho = ricci(r);
    let rho_check = rho.mul_sym(&rho);
    let two = T::lit(2.0);
    let l_rho = SymMatrix4::from_fn(|i, j| {
        let mut acc = T::zero();
        for a in 0..DIM {
            for b in 0..DIM {
                acc = acc + c[i][a][b][j] * rho.get(a, b);
            }
        }
        two * acc
    });
    DerivedTensors { r_check, rho_check, l_rho }
}

fn transform_slot<T: Real>(c: &Raw4<T>, slot: usize, m: &[[T; DIM]; DIM]) -> Raw4<T> {
    let mut out = zero_raw::<T>();
    for_each_index(|ix| {
        let mut acc = T::zero();
        let mut src = ix;
        for a in 0..DIM {
            let w = m[ix[slot]][a];
            if w != T::zero() {
                src[slot] = a;
                acc = acc + w * at(c, src);
            }
        }
        out[ix[0]][ix[1]][ix[2]][ix[3]] = acc;
    });
    out
}

/// Components in a new frame: `R'_ijkl = R(e'_i, e'_j, e'_k, e'_l)`.
pub fn rotate<T: Real>(r: &Curvature4<T>, frame: &Frame4<T>) -> Curvature4<T> {
    let m = frame.rows();
    let mut c = r.comp;
    for slot in 0..DIM {
        c = transform_slot(&c, slot, m);
    }
    Curvature4 { comp: c }
}

/// Same as `rotate(r, &Frame4::givens(p, q, angle))` but only touches the
/// components carrying an index `p` or `q`.
pub fn rotate_plane<T: Real>(r: &Curvature4<T>, p: usize, q: usize, angle: T) -> Curvature4<T> {
    let (s, co) = angle.sin_cos();
    let mut c = r.comp;
    for slot in 0..DIM {
        let prev = c;
        for_each_index(|ix| {
            if ix[slot] != p {
                return;
            }
            let mut iq = ix;
            iq[slot] = q;
            let (x, y) = (at(&prev, ix), at(&prev, iq));
            c[ix[0]][ix[1]][ix[2]][ix[3]] = co * x + s * y;
            c[iq[0]][iq[1]][iq[2]][iq[3]] = -s * x + co * y;
        });
    }
    Curvature4 { comp: c }
}

/// Derivative of `rotate_plane(r, p, q, t)` at `t = 0`.
pub fn plane_generator<T: Real>(r: &Curvature4<T>, p: usize, q: usize) -> Raw4<T> {
    let mut out = zero_raw::<T>();
    for_each_index(|ix| {
        let mut acc = T::zero();
        for slot in 0..DIM {
            let mut src = ix;
            if ix[slot] == p {
                src[slot] = q;
                acc = acc + at(&r.comp, src);
            } else if ix[slot] == q {
                src[slot] = p;
                acc = acc - at(&r.comp, src);
            }
        }
        out[ix[0]][ix[1]][ix[2]][ix[3]] = acc;
    });
    out
}

/// Seeded helper shared by tests and the fuzz command: i.i.d. uniform[-1, 1]
/// raw array.
pub fn uniform_raw<T: Real, R: Rng + ?Sized>(rng: &mut R) -> Raw4<T> {
    let mut raw = zero_raw::<T>();
    for v in raw.iter_mut().flatten().flatten().flatten() {
        *v = T::lit(rng.gen_range(-1.0..=1.0));
    }
    raw
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn space_form(c: f64) -> Raw4<f64> {
        let mut raw = zero_raw();
        let d = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
        for_each_index(|[i, j, k, l]| raw[i][j][k][l] = c * (d(i, l) * d(j, k) - d(i, k) * d(j, l)));
        raw
    }

    /// Components listed for the solvable group with brackets
    /// [e1,e2]=2e2, [e1,e3]=-e3, [e1,e4]=2e3-e4.
    fn solvable_example() -> Curvature4<f64> {
        let raw = orbit_fill(&[
            ([0, 1, 0, 1], 4.0),
            ([0, 3, 0, 3], 4.0),
            ([1, 2, 1, 2], -2.0),
            ([1, 3, 1, 3], -2.0),
            ([0, 2, 0, 3], -2.0),
            ([1, 2, 1, 3], 2.0),
        ]);
        make_curvature(&raw).unwrap()
    }

    fn levi_civita() -> Raw4<f64> {
        let mut raw = zero_raw();
        for_each_index(|ix| {
            let mut distinct = true;
            for a in 0..4 {
                for b in a + 1..4 {
                    distinct &= ix[a] != ix[b];
                }
            }
            if distinct {
                let mut sign = 1.0;
                for a in 0..4 {
                    for b in a + 1..4 {
                        if ix[a] > ix[b] {
                            sign = -sign;
                        }
                    }
                }
                raw[ix[0]][ix[1]][ix[2]][ix[3]] = sign;
            }
        });
        raw
    }

    #[test]
    fn zero_array_is_accepted() {
        let r = make_curvature(&zero_raw::<f64>()).unwrap();
        assert_eq!(r, Curvature4::zero());
    }

    #[test]
    fn space_form_is_accepted() {
        let r = make_curvature(&space_form(1.0)).unwrap();
        assert_eq!(r.max_diff(&Curvature4::from_raw_unchecked(space_form(1.0))), 0.0);
        assert_eq!(r.sectional(0, 1), 1.0);
    }

    #[test]
    fn broken_last_pair_is_rejected() {
        let mut raw = zero_raw::<f64>();
        raw[0][1][0][1] = 1.0;
        raw[1][0][1][0] = 1.0;
        match make_curvature(&raw) {
            Err(TensorError::SymmetryViolation { magnitude, .. }) => assert!(magnitude >= 1.0),
            other => panic!("expected violation, got {other:?}"),
        }
    }

    #[test]
    fn non_finite_is_rejected() {
        let mut raw = zero_raw::<f64>();
        raw[0][0][0][0] = f64::NAN;
        assert_eq!(make_curvature(&raw), Err(TensorError::NonFinite));
    }

    #[test]
    fn projection_fixes_valid_tensors() {
        let r = solvable_example();
        assert_eq!(project_to_curvature(r.components()).max_diff(&r), 0.0);
    }

    #[test]
    fn projection_annihilates_alternating_tensor() {
        let p = project_to_curvature(&levi_civita());
        assert!(p.max_abs() < 1e-15);
    }

    #[test]
    fn projection_of_random_array_validates() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let p = project_to_curvature(&uniform_raw::<f64, _>(&mut rng));
        let defects = symmetry_defects(p.components());
        for (d, _) in defects {
            assert!(d < 1e-13, "{d}");
        }
        assert!(make_curvature(p.components()).is_ok());
        let twice = project_to_curvature(p.components());
        assert!(twice.max_diff(&p) < 1e-13);
    }

    // Mandatory convention lock: ρ_ij = Σ_a R_aija on the solvable example
    // must give eigenvalues -8, 0, 2, -2 on the diagonal.
    #[test]
    fn ricci_sign_convention() {
        let rho = ricci(&solvable_example());
        assert_eq!(rho.diagonal(), [-8.0, 0.0, 2.0, -2.0]);
        for i in 0..4 {
            for j in 0..4 {
                if i != j {
                    assert_eq!(rho.get(i, j), 0.0);
                }
            }
        }
    }

    #[test]
    fn ricci_of_space_form() {
        let r = make_curvature(&space_form(1.0)).unwrap();
        assert_eq!(ricci(&r).diagonal(), [3.0; 4]);
        // plane (e1,e2) has sectional curvature +1 so R_1212 = -1
        assert_eq!(r.get(0, 1, 0, 1), -1.0);
    }

    #[test]
    fn summary_of_solvable_example() {
        let s = summary(&solvable_example());
        // 256-term brute force
        let r = solvable_example();
        let brute: f64 = r.components().iter().flatten().flatten().flatten().map(|v| v * v).sum();
        assert_eq!(brute, 224.0);
        assert_eq!(s.norm_r2, 224.0);
        assert_eq!(s.tau, -8.0);
        assert_eq!(s.norm_rho2, 72.0);
    }

    #[test]
    fn summary_of_zero() {
        let s = summary(&Curvature4::<f64>::zero());
        assert_eq!((s.norm_r2, s.norm_rho2, s.tau), (0.0, 0.0, 0.0));
    }

    #[test]
    fn r_check_entry_of_solvable_example() {
        let r = solvable_example();
        let d = derived_tensors(&r);
        let mut brute = 0.0;
        for a in 0..4 {
            for b in 0..4 {
                for c in 0..4 {
                    brute += r.get(a, b, c, 0).powi(2);
                }
            }
        }
        assert_eq!(brute, 80.0);
        assert_eq!(d.r_check.get(0, 0), 80.0);
        assert_eq!(d.r_check.trace(), 224.0);
        assert!((d.l_rho.trace() - 2.0 * 72.0).abs() < 1e-12);
    }

    #[test]
    fn derived_tensors_of_zero() {
        let d = derived_tensors(&Curvature4::<f64>::zero());
        assert_eq!(d.r_check, SymMatrix4::zero());
        assert_eq!(d.rho_check, SymMatrix4::zero());
        assert_eq!(d.l_rho, SymMatrix4::zero());
    }

    #[test]
    fn identity_rotation_is_noop() {
        let r = solvable_example();
        assert_eq!(rotate(&r, &Frame4::identity()), r);
    }

    #[test]
    fn rotation_composes() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let r = project_to_curvature(&uniform_raw::<f64, _>(&mut rng));
        let f = Frame4::random(&mut rng);
        let g = Frame4::random(&mut rng);
        let lhs = rotate(&rotate(&r, &f), &g);
        let rhs = rotate(&r, &f.then(&g));
        assert!(lhs.max_diff(&rhs) < 1e-12);
    }

    #[test]
    fn plane_rotation_matches_full_rotation() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let r = project_to_curvature(&uniform_raw::<f64, _>(&mut rng));
        for (p, q) in [(0, 1), (1, 3), (2, 3)] {
            let a = rotate_plane(&r, p, q, 0.37);
            let b = rotate(&r, &Frame4::givens(p, q, 0.37));
            assert!(a.max_diff(&b) < 1e-14);
        }
    }

    #[test]
    fn plane_generator_matches_finite_difference() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let r = project_to_curvature(&uniform_raw::<f64, _>(&mut rng));
        let g = plane_generator(&r, 1, 2);
        let h = 1e-6;
        let plus = rotate_plane(&r, 1, 2, h);
        let minus = rotate_plane(&r, 1, 2, -h);
        for_each_index(|ix| {
            let fd = (at(plus.components(), ix) - at(minus.components(), ix)) / (2.0 * h);
            assert!((fd - at(&g, ix)).abs() < 1e-8);
        });
    }

    #[test]
    fn rotation_rejects_non_orthogonal_frames() {
        let mut m = [[0.0; 4]; 4];
        for (i, row) in m.iter_mut().enumerate() {
            row[i] = 1.0;
        }
        m[0][1] = 1e-6;
        assert!(matches!(Frame4::new(m), Err(TensorError::FrameNotOrthogonal { .. })));
    }

    #[test]
    fn random_frames_are_proper_rotations() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..20 {
            let f: Frame4<f64> = Frame4::random(&mut rng);
            assert!(f.orthogonality_defect() < 1e-12);
            assert_eq!(f.orientation(), 1);
            assert!((f.det() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn single_precision_contractions() {
        let r: Curvature4<f32> = solvable_example().cast();
        assert_eq!(ricci(&r).diagonal(), [-8.0f32, 0.0, 2.0, -2.0]);
        assert_eq!(summary(&r).norm_r2, 224.0f32);
    }
}
