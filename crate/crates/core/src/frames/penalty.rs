use crate::scalar::Real;
use crate::tensor::{rotate, Curvature4, Frame4, Raw4};

/// The 24 index triples `(i, j, k)` with `i, j, k` distinct, naming the
/// mixed components `R_ijjk` that vanish in an ST frame.
pub const MIXED_INDICES: [[usize; 3]; 24] = {
    let mut out = [[0usize; 3]; 24];
    let mut n = 0;
    let mut i = 0;
    while i < 4 {
        let mut j = 0;
        while j < 4 {
            let mut k = 0;
            while k < 4 {
                if i != j && j != k && i != k {
                    out[n] = [i, j, k];
                    n += 1;
                }
                k += 1;
            }
            j += 1;
        }
        i += 1;
    }
    out
};

/// Opposite-plane pairs `(12|34)`, `(13|24)`, `(14|23)`, 0-based.
pub(crate) const PLANE_PAIRS: [([usize; 2], [usize; 2]); 3] = [([0, 1], [2, 3]), ([0, 2], [1, 3]), ([0, 3], [1, 2])];

#[inline]
pub(crate) fn plane<T: Copy>(c: &Raw4<T>, [a, b]: [usize; 2]) -> T {
    c[a][b][a][b]
}

pub fn mixed_components<T: Real>(rotated: &Curvature4<T>) -> [T; 24] {
    MIXED_INDICES.map(|[i, j, k]| rotated.get(i, j, j, k))
}

/// Unnormalized residuals of an already rotated tensor: the 24 mixed
/// components followed by `R_1212² − R_3434²`, `R_1313² − R_2424²`,
/// `R_1414² − R_2323²`.
pub fn st_residuals<T: Real>(rotated: &Curvature4<T>) -> [T; 27] {
    let mut out = [T::zero(); 27];
    out[..24].copy_from_slice(&mixed_components(rotated));
    let c = rotated.components();
    for (n, (p, q)) in PLANE_PAIRS.iter().enumerate() {
        let (x, y) = (plane(c, *p), plane(c, *q));
        out[24 + n] = x * x - y * y;
    }
    out
}

pub(crate) fn raw_penalty<T: Real>(rotated: &Curvature4<T>) -> T {
    st_residuals(rotated).iter().map(|&v| v * v).sum()
}

/// Penalty of an already rotated tensor, normalized by `scale⁴`.
pub(crate) fn normalized_penalty<T: Real>(rotated: &Curvature4<T>, scale: T) -> T {
    let s2 = scale * scale;
    raw_penalty(rotated) / (s2 * s2)
}

/// `P(R, F) ≥ 0`, zero exactly on generalized ST frames; normalized by
/// `scale⁴` with `scale = max(1, max|R_ijkl|)` of the input tensor.
pub fn st_penalty<T: Real>(r: &Curvature4<T>, frame: &Frame4<T>) -> T {
    normalized_penalty(&rotate(r, frame), r.scale())
}
