use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::analysis::weakly_einstein_residual;
use crate::frames::eigen::{ricci_spectrum, RicciSpectrum};
use crate::frames::pattern::PatternTag;
use crate::frames::penalty::{normalized_penalty, st_residuals, MIXED_INDICES, PLANE_PAIRS};
use crate::frames::signs::{classify_sign_cases, SignCaseSet};
use crate::frames::trig::{trig_fit_extremum, TrigSamples};
use crate::frames::{penalty_tol, FrameError};
use crate::scalar::Real;
use crate::tensor::{plane_generator, rotate, rotate_plane, Curvature4, Frame4, Raw4};

const PLANES: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SearchOptions {
    /// Weakly Einstein precondition, relative.
    pub tol: f64,
    /// Eigenvalue grouping, relative.
    pub tol_mult: f64,
    /// Normalized penalty below which a frame is accepted.
    pub penalty_tol: f64,
    pub seed: u64,
    /// Starts for the iterative constructions of types III and IV.
    pub constructive_starts: usize,
    /// Starts for the generic fallback; start 0 is the best frame so far.
    pub fallback_starts: usize,
    pub max_sweeps: usize,
    /// Refine iterative results with Levenberg–Marquardt steps.
    pub polish: bool,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self {
            tol: crate::analysis::DEFAULT_TOL,
            tol_mult: 1e-6,
            penalty_tol: 1e-16,
            seed: 0,
            constructive_starts: 4,
            fallback_starts: 20,
            max_sweeps: 100,
            polish: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConstructionPath {
    DirectEigenbasis,
    PairRotation,
    PlaneAscent,
    TripleAscent,
    GenericFallback,
}

impl ConstructionPath {
    pub fn label(self) -> &'static str {
        match self {
            ConstructionPath::DirectEigenbasis => "direct-eigenbasis",
            ConstructionPath::PairRotation => "pair-rotation",
            ConstructionPath::PlaneAscent => "plane-ascent",
            ConstructionPath::TripleAscent => "triple-ascent",
            ConstructionPath::GenericFallback => "generic-fallback",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct STReport<T> {
    /// det +1.
    pub frame: Frame4<T>,
    /// Normalized penalty of `frame`.
    pub penalty: T,
    pub path: ConstructionPath,
    pub sign_cases: SignCaseSet<T>,
    pub spectrum: RicciSpectrum<T>,
    /// A trigonometric fit along the way was constant; its angle was taken as 0.
    pub degenerate_fit: bool,
    /// Levenberg–Marquardt steps refined the frame.
    pub polished: bool,
    /// Final penalty of each fallback start, empty if the fallback did not run.
    pub start_penalties: Vec<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FallbackOutcome<T> {
    pub frame: Frame4<T>,
    pub penalty: T,
    pub best_start: usize,
    pub start_penalties: Vec<T>,
}

/// A frame together with the tensor expressed in it.
#[derive(Clone, Copy)]
struct Working<T> {
    frame: Frame4<T>,
    rot: Curvature4<T>,
}

impl<T: Real> Working<T> {
    fn new(r: &Curvature4<T>, frame: Frame4<T>) -> Self {
        Self { frame, rot: rotate(r, &frame) }
    }

    fn turn(&mut self, p: usize, q: usize, t: T) {
        if t != T::zero() {
            self.frame = self.frame.rotated_rows(p, q, t);
            self.rot = rotate_plane(&self.rot, p, q, t);
        }
    }

    fn penalty(&self, scale: T) -> T {
        normalized_penalty(&self.rot, scale)
    }
}

struct Ctx<T> {
    scale: T,
    ptol: T,
    degenerate: bool,
}

impl<T: Real> Ctx<T> {
    /// Maximizer of a trigonometric fit; a constant fit contributes angle 0.
    fn argmax(&mut self, samples: TrigSamples<T>) -> T {
        match trig_fit_extremum(samples) {
            Ok(t) => t,
            Err(_) => {
                self.degenerate = true;
                T::zero()
            }
        }
    }
}

/// Builds a generalized ST frame for a weakly Einstein tensor. The Ricci
/// eigenframe is tried first; otherwise the construction follows the
/// eigenvalue multiplicity type, and the generic minimizer covers type I and
/// anything the direct constructions leave above tolerance.
pub fn find_st_basis<T: Real>(r: &Curvature4<T>, opts: &SearchOptions) -> Result<STReport<T>, FrameError> {
    let we = weakly_einstein_residual(r, T::lit(opts.tol));
    if !we.passes {
        return Err(FrameError::NotWeaklyEinstein {
            relative: we.relative.as_f64(),
            max_abs: we.max_abs.as_f64(),
            tolerance: opts.tol,
        });
    }
    let spectrum = ricci_spectrum(r, T::lit(opts.tol_mult))?;
    let mut ctx = Ctx { scale: r.scale(), ptol: T::lit(opts.penalty_tol).max(penalty_tol::<T>()), degenerate: false };
    let base = Working::new(r, spectrum.frame.reordered(spectrum.pattern.canonical_order));

    let (mut best, mut path) = if base.penalty(ctx.scale) < ctx.ptol {
        (base, ConstructionPath::DirectEigenbasis)
    } else {
        match spectrum.pattern.tag {
            PatternTag::II => (pair_rotation(base, &mut ctx), ConstructionPath::PairRotation),
            PatternTag::III => (multi_start(r, base, opts, &mut ctx, &[(0, 1), (2, 3)], plane_ascent), ConstructionPath::PlaneAscent),
            PatternTag::IV => (multi_start(r, base, opts, &mut ctx, &[(0, 1), (0, 2), (1, 2)], triple_ascent), ConstructionPath::TripleAscent),
            PatternTag::I | PatternTag::V => (base, ConstructionPath::GenericFallback),
        }
    };
    best = finalize(r, best.frame);
    let mut polished = false;
    if path != ConstructionPath::DirectEigenbasis && opts.polish && !(best.penalty(ctx.scale) < ctx.ptol * T::lit(1e-4)) {
        polish(&mut best, ctx.scale, ctx.ptol);
        best = finalize(r, best.frame);
        polished = true;
    }

    let mut start_penalties = Vec::new();
    if !(best.penalty(ctx.scale) < ctx.ptol) {
        let out = generic_fallback(r, &best.frame, opts);
        start_penalties = out.start_penalties;
        if !(out.penalty < ctx.ptol) {
            return Err(FrameError::SearchFailed {
                best_penalty: out.penalty.as_f64(),
                start_penalties: start_penalties.iter().map(|p| p.as_f64()).collect(),
            });
        }
        best = finalize(r, out.frame);
        path = ConstructionPath::GenericFallback;
        polished = opts.polish;
    }

    let penalty = best.penalty(ctx.scale);
    let sign_cases = classify_sign_cases(r, &best.frame)?;
    Ok(STReport {
        frame: best.frame,
        penalty,
        path,
        sign_cases,
        spectrum,
        degenerate_fit: ctx.degenerate,
        polished,
        start_penalties,
    })
}

fn finalize<T: Real>(r: &Curvature4<T>, frame: Frame4<T>) -> Working<T> {
    Working::new(r, frame.reorthonormalized().oriented_by_swap())
}

/// Type II: a single rotation in the repeated plane maximizing
/// `φ(t) = R(cos t e₁ + sin t e₂, e₃, −sin t e₁ + cos t e₂, e₄)`.
fn pair_rotation<T: Real>(mut w: Working<T>, ctx: &mut Ctx<T>) -> Working<T> {
    let rot = w.rot;
    let t = ctx.argmax(TrigSamples::quadratic(|t| rotate_plane(&rot, 0, 1, t).get(0, 2, 1, 3)));
    w.turn(0, 1, t);
    w
}

fn multi_start<T: Real>(
    r: &Curvature4<T>,
    base: Working<T>,
    opts: &SearchOptions,
    ctx: &mut Ctx<T>,
    planes: &[(usize, usize)],
    run: fn(Working<T>, &[(usize, usize)], &SearchOptions, &mut Ctx<T>) -> Working<T>,
) -> Working<T> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut best: Option<(T, Working<T>)> = None;
    for k in 0..opts.constructive_starts.max(1) {
        let mut w = base;
        if k > 0 {
            for &(p, q) in planes {
                w.turn(p, q, T::lit(rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI)));
            }
        }
        let w = finalize(r, run(w, planes, opts, ctx).frame);
        let pen = w.penalty(ctx.scale);
        if best.as_ref().map_or(true, |(b, _)| pen < *b) {
            best = Some((pen, w));
        }
        if pen < ctx.ptol {
            break;
        }
    }
    best.map(|(_, w)| w).unwrap_or(base)
}

const ANGLE_STOP: f64 = 1e-14;

/// Type III: alternating maximization of the sectional curvature `R(x, y, x, y)`
/// with `x` in the first eigenplane and `y` in the second.
fn plane_ascent<T: Real>(mut w: Working<T>, planes: &[(usize, usize)], opts: &SearchOptions, ctx: &mut Ctx<T>) -> Working<T> {
    for _ in 0..opts.max_sweeps {
        let mut largest = T::zero();
        for &(p, q) in planes {
            let rot = w.rot;
            let t = ctx.argmax(TrigSamples::quadratic(|t| rotate_plane(&rot, p, q, t).get(0, 2, 0, 2)));
            w.turn(p, q, t);
            largest = largest.max(t.abs());
        }
        if largest < T::lit(ANGLE_STOP) {
            break;
        }
    }
    w
}

/// Type IV: coordinate ascent of `R(e₁, e₂, e₂, e₄)` over rotations of the
/// three-dimensional eigenspace, then a half-right-angle turn of `e₂, e₃`.
fn triple_ascent<T: Real>(mut w: Working<T>, planes: &[(usize, usize)], opts: &SearchOptions, ctx: &mut Ctx<T>) -> Working<T> {
    for _ in 0..opts.max_sweeps {
        let mut largest = T::zero();
        for &(p, q) in planes {
            let rot = w.rot;
            let t = ctx.argmax(TrigSamples::mixed(|t| rotate_plane(&rot, p, q, t).get(0, 1, 1, 3)));
            w.turn(p, q, t);
            largest = largest.max(t.abs());
        }
        if largest < T::lit(ANGLE_STOP) {
            break;
        }
    }
    w.turn(1, 2, T::FRAC_PI_4());
    w
}

/// Multi-start minimization of the ST penalty over SO(4): cyclic Givens
/// sweeps with a line search per plane, optionally followed by
/// Levenberg–Marquardt. Start 0 is `initial`; the others are seeded random
/// rotations. Returns the first start reaching tolerance, or the best one.
pub fn generic_fallback<T: Real>(r: &Curvature4<T>, initial: &Frame4<T>, opts: &SearchOptions) -> FallbackOutcome<T> {
    let scale = r.scale();
    let ptol = T::lit(opts.penalty_tol).max(penalty_tol::<T>());
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut start_penalties = Vec::new();
    let mut best: Option<(T, usize, Frame4<T>)> = None;
    for k in 0..opts.fallback_starts.max(1) {
        let start = if k == 0 { *initial } else { Frame4::random(&mut rng) };
        let mut w = Working::new(r, start);
        descend(&mut w, scale, ptol, opts.max_sweeps);
        if opts.polish && !(w.penalty(scale) < ptol * T::lit(1e-4)) {
            polish(&mut w, scale, ptol);
        }
        let w = finalize(r, w.frame);
        let pen = w.penalty(scale);
        start_penalties.push(pen);
        if best.as_ref().map_or(true, |(b, _, _)| pen < *b) {
            best = Some((pen, k, w.frame));
        }
        if pen < ptol {
            break;
        }
    }
    let (penalty, best_start, frame) = best.expect("at least one start");
    FallbackOutcome { frame, penalty, best_start, start_penalties }
}

fn descend<T: Real>(w: &mut Working<T>, scale: T, ptol: T, max_sweeps: usize) {
    let mut current = w.penalty(scale);
    for sweep in 0..max_sweeps {
        let before = current;
        let mut largest = T::zero();
        for &(p, q) in &PLANES {
            let rot = w.rot;
            let f = |t: T| normalized_penalty(&rotate_plane(&rot, p, q, t), scale);
            let (t, value) = line_search(f);
            if value < current {
                w.turn(p, q, t);
                current = value;
                largest = largest.max(t.abs());
            }
        }
        // once progress turns linear, Levenberg–Marquardt is faster
        let slow = sweep >= 2 && current > T::lit(0.25) * before;
        if current < ptol * T::lit(1e4) || largest < T::lit(1e-10) || slow {
            break;
        }
    }
}

/// Minimizes a π-periodic function: a coarse grid, then golden section.
fn line_search<T: Real>(f: impl Fn(T) -> T) -> (T, T) {
    const GRID: usize = 20;
    let pi = T::PI();
    let h = pi / T::lit(GRID as f64);
    let mut best = (T::zero(), f(T::zero()));
    for k in 1..GRID {
        let t = -pi / T::lit(2.0) + h * T::lit(k as f64);
        let v = f(t);
        if v < best.1 {
            best = (t, v);
        }
    }
    let g = T::lit(0.618_033_988_749_894_9);
    let (mut lo, mut hi) = (best.0 - h, best.0 + h);
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..60 {
        if f1 < f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = f(x2);
        }
        if hi - lo < T::lit(1e-13) {
            break;
        }
    }
    for (t, v) in [(x1, f1), (x2, f2)] {
        if v < best.1 {
            best = (t, v);
        }
    }
    best
}

/// Residuals scaled by `scale²`, so that their squared sum is the penalty.
fn scaled_residuals<T: Real>(rot: &Curvature4<T>, scale: T) -> [T; 27] {
    let s2 = scale * scale;
    st_residuals(rot).map(|v| v / s2)
}

/// Derivatives of the scaled residuals along the six plane rotations.
fn jacobian<T: Real>(rot: &Curvature4<T>, scale: T) -> [[T; 6]; 27] {
    let s2 = scale * scale;
    let two = T::lit(2.0);
    let c = rot.components();
    let mut jac = [[T::zero(); 6]; 27];
    for (col, &(p, q)) in PLANES.iter().enumerate() {
        let g: Raw4<T> = plane_generator(rot, p, q);
        for (row, &[i, j, k]) in MIXED_INDICES.iter().enumerate() {
            jac[row][col] = g[i][j][j][k] / s2;
        }
        for (n, ([a, b], [x, y])) in PLANE_PAIRS.iter().enumerate() {
            let d = two * (c[*a][*b][*a][*b] * g[*a][*b][*a][*b] - c[*x][*y][*x][*y] * g[*x][*y][*x][*y]);
            jac[24 + n][col] = d / s2;
        }
    }
    jac
}

fn polish<T: Real>(w: &mut Working<T>, scale: T, ptol: T) {
    let mut current = w.penalty(scale);
    let mut mu: Option<T> = None;
    for _ in 0..200 {
        if current < ptol * T::lit(1e-4) {
            break;
        }
        let res = scaled_residuals(&w.rot, scale);
        let jac = jacobian(&w.rot, scale);
        let mut jtj = [[T::zero(); 6]; 6];
        let mut jtr = [T::zero(); 6];
        for row in 0..27 {
            for a in 0..6 {
                jtr[a] = jtr[a] + jac[row][a] * res[row];
                for b in 0..6 {
                    jtj[a][b] = jtj[a][b] + jac[row][a] * jac[row][b];
                }
            }
        }
        let diag_max = (0..6).map(|a| jtj[a][a]).fold(T::zero(), T::max);
        if diag_max == T::zero() {
            break;
        }
        let lambda = *mu.get_or_insert(T::lit(1e-3) * diag_max);
        let mut lhs = jtj;
        for (a, row) in lhs.iter_mut().enumerate() {
            row[a] = row[a] + lambda;
        }
        let Some(step) = solve6(lhs, jtr.map(|v| -v)) else {
            mu = Some(lambda * T::lit(10.0));
            continue;
        };
        let mut trial = *w;
        for (k, &(p, q)) in PLANES.iter().enumerate() {
            trial.turn(p, q, step[k]);
        }
        let value = trial.penalty(scale);
        if value < current {
            *w = trial;
            current = value;
            mu = Some(lambda * T::lit(0.3));
        } else {
            mu = Some(lambda * T::lit(10.0));
        }
        let step_norm = step.iter().fold(T::zero(), |m, v| m.max(v.abs()));
        if step_norm < T::epsilon() || lambda > T::lit(1e20) * diag_max {
            break;
        }
    }
}

/// Gaussian elimination with partial pivoting.
fn solve6<T: Real>(mut a: [[T; 6]; 6], mut b: [T; 6]) -> Option<[T; 6]> {
    for col in 0..6 {
        let piv = (col..6).max_by(|&x, &y| a[x][col].abs().partial_cmp(&a[y][col].abs()).unwrap_or(std::cmp::Ordering::Equal))?;
        if a[piv][col] == T::zero() || !a[piv][col].is_finite() {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..6 {
            let f = a[row][col] / a[col][col];
            for k in col..6 {
                a[row][k] = a[row][k] - f * a[col][k];
            }
            b[row] = b[row] - f * b[col];
        }
    }
    let mut x = [T::zero(); 6];
    for row in (0..6).rev() {
        let s = (row + 1..6).fold(b[row], |acc, k| acc - a[row][k] * x[k]);
        x[row] = s / a[row][row];
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frames::st_penalty;
    use crate::sources::{constant_curvature, gallery, normal_form, random_curvature, surface_product};

    fn rotated(r: &Curvature4<f64>, seed: u64) -> Curvature4<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rotate(r, &Frame4::random(&mut rng))
    }

    fn check(r: &Curvature4<f64>) -> STReport<f64> {
        let rep = find_st_basis(r, &SearchOptions::default()).unwrap();
        assert!(rep.penalty < 1e-16, "penalty {:e} via {:?}", rep.penalty, rep.path);
        assert!((st_penalty(r, &rep.frame) - rep.penalty).abs() < 1e-20);
        assert!((rep.frame.det() - 1.0).abs() < 1e-12);
        assert!(rep.frame.orthogonality_defect() < 1e-13);
        rep
    }

    #[test]
    fn solver_matches_known_solution() {
        let mut a = [[0.0; 6]; 6];
        for i in 0..6 {
            for j in 0..6 {
                a[i][j] = 1.0 / (1.0 + i as f64 + j as f64) + if i == j { 2.0 } else { 0.0 };
            }
        }
        let x = [1.0, -2.0, 0.5, 3.0, 0.0, -1.0];
        let b = a.map(|row| row.iter().zip(x).map(|(u, v)| u * v).sum::<f64>());
        let y = solve6(a, b).unwrap();
        for k in 0..6 {
            assert!((x[k] - y[k]).abs() < 1e-13);
        }
    }

    #[test]
    fn jacobian_matches_finite_differences() {
        let r: Curvature4<f64> = random_curvature(9);
        let jac = jacobian(&r, r.scale());
        let h = 1e-6;
        for (col, &(p, q)) in PLANES.iter().enumerate() {
            let plus = scaled_residuals(&rotate_plane(&r, p, q, h), r.scale());
            let minus = scaled_residuals(&rotate_plane(&r, p, q, -h), r.scale());
            for row in 0..27 {
                let fd = (plus[row] - minus[row]) / (2.0 * h);
                assert!((fd - jac[row][col]).abs() < 1e-7, "row {row} col {col}");
            }
        }
    }

    #[test]
    fn rejects_non_weakly_einstein() {
        let r = gallery::<f64>("example-s2-1", &[]).unwrap().tensor;
        assert!(matches!(find_st_basis(&r, &SearchOptions::default()), Err(FrameError::NotWeaklyEinstein { .. })));
    }

    #[test]
    fn pair_type_group_metric() {
        for seed in 0..10 {
            let r = rotated(&gallery::<f64>("example4", &[("a", 1.0), ("b", 0.5)]).unwrap().tensor, seed);
            let rep = check(&r);
            assert_eq!(rep.spectrum.pattern.tag, PatternTag::II);
            assert_ne!(rep.path, ConstructionPath::GenericFallback, "seed {seed}");
        }
    }

    #[test]
    fn pair_of_pairs() {
        for seed in 0..10 {
            let r = rotated(&surface_product(1.0, -1.0), seed);
            let rep = check(&r);
            assert_eq!(rep.spectrum.pattern.tag, PatternTag::III);
            assert_ne!(rep.path, ConstructionPath::GenericFallback, "seed {seed}");
        }
    }

    #[test]
    fn pair_needs_rotation() {
        // λ₃ = λ₄ and b ≠ 0: an arbitrary basis of the pair plane is not ST
        let base = normal_form([1.0, 0.5, 0.5], [1.0, -0.5, -0.5], [0.2, -0.5, 0.3]).unwrap();
        for seed in 0..10 {
            let rep = check(&rotated(&base, seed));
            assert_eq!(rep.path, ConstructionPath::PairRotation);
        }
    }

    #[test]
    fn two_pairs_need_ascent() {
        let base = normal_form([1.0, 0.3, 0.5], [-1.0, 0.3, 0.5], [0.2, -0.5, 0.3]).unwrap();
        for seed in 0..10 {
            let rep = check(&rotated(&base, seed));
            assert_eq!(rep.path, ConstructionPath::PlaneAscent);
        }
    }

    #[test]
    fn triple_eigenvalue() {
        // ρ = diag(−3λ, λ, λ, λ) arises from a' = (−λ, −λ, λ), a'' = (λ, λ, −λ)
        let l = 0.7;
        let base = normal_form([-l, -l, l], [l, l, -l], [0.3, -0.1, -0.2]).unwrap();
        for seed in 0..10 {
            let r = rotated(&base, seed);
            let rep = check(&r);
            assert_eq!(rep.spectrum.pattern.tag, PatternTag::IV, "{:?}", rep.spectrum.eigenvalues);
        }
    }

    #[test]
    fn einstein_inputs() {
        for seed in 0..5 {
            check(&rotated(&surface_product(1.0, 1.0), seed));
            check(&rotated(&constant_curvature(-2.0), seed));
        }
    }

    #[test]
    fn identical_inputs_identical_frames() {
        let r = rotated(&surface_product(2.0, 2.0), 3);
        let a = find_st_basis(&r, &SearchOptions::default()).unwrap();
        let b = find_st_basis(&r, &SearchOptions::default()).unwrap();
        assert_eq!(a.frame.to_row_major(), b.frame.to_row_major());
    }
}
