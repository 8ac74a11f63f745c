use serde::{Deserialize, Serialize};

use super::tables::GroupoidTables;
use crate::error::{Error, Result};

/// Largest object count accepted by [`enumerate_bisections`].
pub const MAX_BISECTION_OBJECTS: usize = 8;

/// Section of the source map with `t ∘ σ` a permutation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bisection {
    /// `arrows[f] = σ(f)`, an arrow with source `f`.
    pub arrows: Vec<usize>,
}

impl Bisection {
    /// Checks `s ∘ σ = id` and that `t ∘ σ` is a bijection.
    pub fn new(g: &GroupoidTables, arrows: Vec<usize>) -> Option<Self> {
        let n = g.object_count();
        if arrows.len() != n {
            return None;
        }
        let mut seen = vec![false; n];
        for (f, &a) in arrows.iter().enumerate() {
            if a >= g.arrow_count()
                || g.source(a) != f
                || std::mem::replace(&mut seen[g.target(a)], true)
            {
                return None;
            }
        }
        Some(Self { arrows })
    }

    pub fn unit(g: &GroupoidTables) -> Self {
        Self {
            arrows: g.units.clone(),
        }
    }

    /// The permutation `t ∘ σ`.
    pub fn permutation(&self, g: &GroupoidTables) -> Vec<usize> {
        self.arrows.iter().map(|&a| g.target(a)).collect()
    }

    /// `(σ₁ σ₂)(f) = σ₁(t(σ₂(f))) σ₂(f)`, when every product is an arrow.
    pub fn compose(&self, other: &Self, g: &GroupoidTables) -> Option<Self> {
        let arrows = other
            .arrows
            .iter()
            .map(|&b| g.compose(self.arrows[g.target(b)], b))
            .collect::<Option<Vec<_>>>()?;
        Self::new(g, arrows)
    }
}

/// All bisections, the unit bisection first, then the rest in lexicographic
/// order of source-fibre positions, stopping after `cap`.
pub fn enumerate_bisections(g: &GroupoidTables, cap: usize) -> Result<Vec<Bisection>> {
    let n = g.object_count();
    if n > MAX_BISECTION_OBJECTS {
        return Err(Error::TooManyObjects { objects: n });
    }
    let mut out = Vec::new();
    if cap == 0 {
        return Ok(out);
    }
    let unit = Bisection::unit(g);
    out.push(unit.clone());
    let fibres: Vec<Vec<usize>> = (0..n).map(|f| g.source_fibre(f)).collect();
    let mut current = Vec::with_capacity(n);
    let mut used = vec![false; n];
    search(g, &fibres, &mut current, &mut used, &unit, cap, &mut out);
    Ok(out)
}

fn search(
    g: &GroupoidTables,
    fibres: &[Vec<usize>],
    current: &mut Vec<usize>,
    used: &mut [bool],
    unit: &Bisection,
    cap: usize,
    out: &mut Vec<Bisection>,
) {
    if out.len() >= cap {
        return;
    }
    let f = current.len();
    if f == fibres.len() {
        if current != &unit.arrows {
            out.push(Bisection {
                arrows: current.clone(),
            });
        }
        return;
    }
    for &a in &fibres[f] {
        let t = g.target(a);
        if used[t] {
            continue;
        }
        used[t] = true;
        current.push(a);
        search(g, fibres, current, used, unit, cap, out);
        current.pop();
        used[t] = false;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_three_gives_all_permutations() {
        let g = GroupoidTables::full(3);
        let bs = enumerate_bisections(&g, usize::MAX).unwrap();
        assert_eq!(bs.len(), 6);
        let mut perms: Vec<Vec<usize>> = bs.iter().map(|b| b.permutation(&g)).collect();
        perms.sort();
        perms.dedup();
        assert_eq!(perms.len(), 6);
        assert_eq!(bs[0], Bisection::unit(&g));
    }

    #[test]
    fn composition_matches_permutations() {
        let g = GroupoidTables::full(3);
        let bs = enumerate_bisections(&g, usize::MAX).unwrap();
        for a in &bs {
            for b in &bs {
                let c = a.compose(b, &g).unwrap();
                let (pa, pb) = (a.permutation(&g), b.permutation(&g));
                let expected: Vec<usize> = pb.iter().map(|&x| pa[x]).collect();
                assert_eq!(c.permutation(&g), expected);
            }
        }
    }

    #[test]
    fn units_only_has_one() {
        let g = GroupoidTables::units_only(5);
        assert_eq!(
            enumerate_bisections(&g, 100).unwrap(),
            vec![Bisection::unit(&g)]
        );
    }

    #[test]
    fn swap_needs_both_cross_arrows() {
        let names = vec!["a".to_string(), "b".to_string()];
        let with =
            GroupoidTables::from_matrix(names.clone(), &[vec![true, true], vec![true, false]])
                .unwrap();
        assert_eq!(enumerate_bisections(&with, 10).unwrap().len(), 2);
        let without =
            GroupoidTables::from_matrix(names, &[vec![true, false], vec![false, false]]).unwrap();
        assert_eq!(enumerate_bisections(&without, 10).unwrap().len(), 1);
    }

    #[test]
    fn cap_and_size_limit() {
        let g = GroupoidTables::full(4);
        assert_eq!(enumerate_bisections(&g, 5).unwrap().len(), 5);
        assert_eq!(enumerate_bisections(&g, usize::MAX).unwrap().len(), 24);
        assert_eq!(
            enumerate_bisections(&GroupoidTables::full(9), 1).unwrap_err(),
            Error::TooManyObjects { objects: 9 }
        );
    }
}
