use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::hilbert::HilbertFibre;
use crate::error::{Error, Result};
use crate::groupoid::{GroupoidTables, HaarSystem};

/// `ℓ(γ): H_{s(γ)} → H_{t(γ)}`, `(ℓ(γ)φ)(γ₁) = φ(γ⁻¹γ₁)`, as a matrix in
/// the fibre bases (rows over the target fibre of `t(γ)`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegularOperator {
    pub arrow: usize,
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
    pub matrix: Vec<Vec<f64>>,
}

impl RegularOperator {
    pub fn apply(&self, u: &[f64]) -> Vec<f64> {
        self.matrix
            .iter()
            .map(|row| row.iter().zip(u).map(|(a, b)| a * b).sum())
            .collect()
    }
}

pub fn left_regular(arrow: usize, g: &GroupoidTables) -> Result<RegularOperator> {
    g.arrow(arrow)?;
    let inv = g.inverse[arrow];
    let rows = g.target_fibre(g.target(arrow));
    let cols = g.target_fibre(g.source(arrow));
    let mut matrix = vec![vec![0.0; cols.len()]; rows.len()];
    let mut hit = vec![false; cols.len()];
    let mut unmatched = Vec::new();
    for (r, &a) in rows.iter().enumerate() {
        match g
            .compose(inv, a)
            .and_then(|b| cols.iter().position(|&c| c == b))
        {
            Some(c) => {
                matrix[r][c] = 1.0;
                hit[c] = true;
            }
            None => unmatched.push(a),
        }
    }
    unmatched.extend(cols.iter().zip(&hit).filter(|(_, &h)| !h).map(|(&c, _)| c));
    if !unmatched.is_empty() {
        return Err(Error::TranslationNotBijective { arrow, unmatched });
    }
    Ok(RegularOperator {
        arrow,
        rows,
        cols,
        matrix,
    })
}

fn matmul(a: &[Vec<f64>], b: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let inner = b.len();
    let width = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            (0..width)
                .map(|j| (0..inner).map(|k| row[k] * b[k][j]).sum())
                .collect()
        })
        .collect()
}

fn max_gap(a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    a.iter()
        .flatten()
        .zip(b.iter().flatten())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

fn identity(n: usize) -> Vec<Vec<f64>> {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepresentationCheck {
    /// Arrows or pairs examined.
    pub checked: usize,
    /// Arrows whose operator was refused.
    pub refused: Vec<usize>,
    pub max_defect: f64,
}

impl RepresentationCheck {
    pub fn passed(&self, tol: f64) -> bool {
        self.refused.is_empty() && self.max_defect <= tol
    }
}

fn operators(g: &GroupoidTables) -> (Vec<Option<RegularOperator>>, Vec<usize>) {
    let ops: Vec<Option<RegularOperator>> = (0..g.arrow_count())
        .into_par_iter()
        .map(|a| left_regular(a, g).ok())
        .collect();
    let refused = (0..ops.len()).filter(|&a| ops[a].is_none()).collect();
    (ops, refused)
}

/// `|‖ℓ(γ)u‖_{t(γ)} - ‖u‖_{s(γ)}|` over `samples` seeded random vectors per arrow.
pub fn unitarity_check(
    g: &GroupoidTables,
    h: &HaarSystem,
    samples: usize,
    seed: u64,
) -> Result<RepresentationCheck> {
    let (ops, refused) = operators(g);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut max_defect: f64 = 0.0;
    let mut checked = 0;
    for op in ops.iter().flatten() {
        let src = HilbertFibre::new(g, h, g.source(op.arrow))?;
        let dst = HilbertFibre::new(g, h, g.target(op.arrow))?;
        for _ in 0..samples {
            let u: Vec<f64> = (0..src.dim())
                .map(|_| rng.random_range(-1.0..=1.0))
                .collect();
            let v = op.apply(&u);
            max_defect = max_defect.max((dst.inner(&v, &v) - src.inner(&u, &u)).abs());
        }
        checked += 1;
    }
    Ok(RepresentationCheck {
        checked,
        refused,
        max_defect,
    })
}

/// `ℓ(γ₁γ₂) = ℓ(γ₁)ℓ(γ₂)` on every composable pair with a defined product.
pub fn homomorphism_check(g: &GroupoidTables) -> RepresentationCheck {
    let (ops, refused) = operators(g);
    let mut checked = 0;
    let mut max_defect: f64 = 0.0;
    for &[a, b, c] in &g.composition {
        if let (Some(x), Some(y), Some(z)) = (&ops[a], &ops[b], &ops[c]) {
            max_defect = max_defect.max(max_gap(&z.matrix, &matmul(&x.matrix, &y.matrix)));
            checked += 1;
        }
    }
    RepresentationCheck {
        checked,
        refused,
        max_defect,
    }
}

/// `ℓ(γ⁻¹) ℓ(γ) = I` and `ℓ(γ) ℓ(γ⁻¹) = I`.
pub fn inverse_check(g: &GroupoidTables) -> RepresentationCheck {
    let (ops, refused) = operators(g);
    let mut checked = 0;
    let mut max_defect: f64 = 0.0;
    for (a, op) in ops.iter().enumerate() {
        if let (Some(x), Some(y)) = (op, &ops[g.inverse[a]]) {
            let left = matmul(&y.matrix, &x.matrix);
            let right = matmul(&x.matrix, &y.matrix);
            max_defect = max_defect
                .max(max_gap(&left, &identity(x.cols.len())))
                .max(max_gap(&right, &identity(x.rows.len())));
            checked += 1;
        }
    }
    RepresentationCheck {
        checked,
        refused,
        max_defect,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_acts_as_identity() {
        let g = GroupoidTables::full(3);
        for f in 0..3 {
            let op = left_regular(g.units[f], &g).unwrap();
            assert_eq!(op.matrix, identity(3));
        }
    }

    #[test]
    fn full_pattern_is_a_unitary_representation() {
        let g = GroupoidTables::full(3);
        let h = HaarSystem::counting(&g);
        assert!(unitarity_check(&g, &h, 8, 0).unwrap().passed(0.0));
        let hom = homomorphism_check(&g);
        assert_eq!(hom.checked, 27);
        assert!(hom.passed(0.0));
        assert!(inverse_check(&g).passed(0.0));
    }

    #[test]
    fn operators_are_permutations() {
        let g = GroupoidTables::full(4);
        for a in 0..g.arrow_count() {
            let op = left_regular(a, &g).unwrap();
            for row in &op.matrix {
                assert_eq!(row.iter().sum::<f64>(), 1.0);
            }
            for c in 0..op.cols.len() {
                assert_eq!(op.matrix.iter().map(|r| r[c]).sum::<f64>(), 1.0);
            }
        }
    }

    #[test]
    fn partial_translation_is_refused() {
        let m = vec![
            vec![true, true, true],
            vec![true, true, false],
            vec![true, false, true],
        ];
        let g = GroupoidTables::from_matrix(vec!["a".into(), "b".into(), "c".into()], &m).unwrap();
        let a = g.find(0, 1).unwrap();
        match left_regular(a, &g) {
            Err(Error::TranslationNotBijective { arrow, unmatched }) => {
                assert_eq!(arrow, a);
                assert_eq!(unmatched, vec![g.find(0, 2).unwrap()]);
            }
            other => panic!("expected refusal, got {other:?}"),
        }
        assert!(!homomorphism_check(&g).refused.is_empty());
    }
}
