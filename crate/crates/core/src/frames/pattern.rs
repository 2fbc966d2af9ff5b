use serde::Serialize;

use crate::scalar::Real;

/// Eigenvalue multiplicity type: block sizes `{4}`, `{2,1,1}`, `{2,2}`,
/// `{3,1}`, `{1,1,1,1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum PatternTag {
    I,
    II,
    III,
    IV,
    V,
}

impl PatternTag {
    pub fn label(self) -> &'static str {
        match self {
            PatternTag::I => "I",
            PatternTag::II => "II",
            PatternTag::III => "III",
            PatternTag::IV => "IV",
            PatternTag::V => "V",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MultiplicityPattern {
    pub tag: PatternTag,
    /// Blocks of equal eigenvalues, as 0-based positions in the sorted list.
    pub blocks: Vec<Vec<usize>>,
    /// Slot `k` of the canonical frame takes sorted eigenvector
    /// `canonical_order[k]`: a repeated pair goes to slots 1-2, a triple to
    /// slots 1-3.
    pub canonical_order: [usize; 4],
}

/// Groups sorted eigenvalues whose neighbours differ by at most
/// `tol_mult · max(1, max|λ|)`.
pub fn multiplicity_pattern<T: Real>(eigenvalues: &[T; 4], tol_mult: T) -> MultiplicityPattern {
    let scale = eigenvalues.iter().fold(T::one(), |m, v| m.max(v.abs()));
    let eps = tol_mult * scale;
    let mut blocks: Vec<Vec<usize>> = vec![vec![0]];
    for i in 1..4 {
        if (eigenvalues[i] - eigenvalues[i - 1]).abs() <= eps {
            blocks.last_mut().expect("non-empty").push(i);
        } else {
            blocks.push(vec![i]);
        }
    }
    let mut sizes: Vec<usize> = blocks.iter().map(Vec::len).collect();
    sizes.sort_unstable();
    let tag = match sizes.as_slice() {
        [4] => PatternTag::I,
        [1, 1, 2] => PatternTag::II,
        [2, 2] => PatternTag::III,
        [1, 3] => PatternTag::IV,
        _ => PatternTag::V,
    };
    let canonical_order = match tag {
        PatternTag::II | PatternTag::IV => {
            let big = blocks.iter().max_by_key(|b| b.len()).expect("non-empty");
            let mut order: Vec<usize> = big.clone();
            order.extend((0..4).filter(|i| !big.contains(i)));
            [order[0], order[1], order[2], order[3]]
        }
        _ => [0, 1, 2, 3],
    };
    MultiplicityPattern { tag, blocks, canonical_order }
}
