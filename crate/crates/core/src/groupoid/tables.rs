use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::partial::GammaRelation;

/// Arrow `(target, source)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Arrow {
    pub target: usize,
    pub source: usize,
    /// Diagonal arrows are the units.
    pub unit: bool,
    /// Whether the pair itself lies in the relation; off-diagonal arrows
    /// always do, a unit may be purely formal.
    pub in_gamma: bool,
}

/// Finite groupoid over a symmetric relation.
///
/// Arrows are the off-diagonal related pairs plus one unit `(f, f)` per
/// object, sorted by `(target, source)`. Composition is the pair rule
/// `(i, j)(j, l) = (i, l)`, defined iff `(i, l)` is an arrow.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupoidTables {
    pub objects: Vec<String>,
    pub arrows: Vec<Arrow>,
    pub inverse: Vec<usize>,
    pub units: Vec<usize>,
    /// Every defined product as `[a, b, a b]`, sorted.
    pub composition: Vec<[usize; 3]>,
    #[serde(skip)]
    index: Vec<Vec<Option<usize>>>,
}

impl GroupoidTables {
    /// `matrix[i][j]` for the relation; the diagonal only marks whether each
    /// unit is itself related.
    pub fn from_matrix(objects: Vec<String>, matrix: &[Vec<bool>]) -> Result<Self> {
        let n = objects.len();
        if matrix.len() != n || matrix.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidParameter(format!(
                "relation matrix is not {n} x {n}"
            )));
        }
        let mut arrows = Vec::new();
        let mut index = vec![vec![None; n]; n];
        for (t, row) in matrix.iter().enumerate() {
            for (s, &related) in row.iter().enumerate() {
                if related != matrix[s][t] {
                    return Err(Error::NotSymmetric(t.min(s), t.max(s)));
                }
                if t == s || related {
                    index[t][s] = Some(arrows.len());
                    arrows.push(Arrow {
                        target: t,
                        source: s,
                        unit: t == s,
                        in_gamma: related,
                    });
                }
            }
        }
        let inverse = arrows
            .iter()
            .map(|a| index[a.source][a.target].expect("relation is symmetric"))
            .collect();
        let units = (0..n)
            .map(|f| index[f][f].expect("units are always present"))
            .collect();
        let mut composition = Vec::new();
        for (ai, a) in arrows.iter().enumerate() {
            for (bi, b) in arrows.iter().enumerate() {
                if a.source == b.target {
                    if let Some(c) = index[a.target][b.source] {
                        composition.push([ai, bi, c]);
                    }
                }
            }
        }
        Ok(Self {
            objects,
            arrows,
            inverse,
            units,
            composition,
            index,
        })
    }

    /// Pair groupoid on `n` objects: every pair is an arrow.
    pub fn full(n: usize) -> Self {
        let names = (0..n).map(|i| format!("f{i}")).collect();
        Self::from_matrix(names, &vec![vec![true; n]; n]).expect("full pattern is symmetric")
    }

    /// Only the units.
    pub fn units_only(n: usize) -> Self {
        let names = (0..n).map(|i| format!("f{i}")).collect();
        Self::from_matrix(names, &vec![vec![false; n]; n]).expect("empty pattern is symmetric")
    }

    /// Rebuilds the derived tables after deserialization and checks they match.
    pub fn validated(self) -> Result<Self> {
        let n = self.objects.len();
        let mut matrix = vec![vec![false; n]; n];
        for a in &self.arrows {
            if a.target >= n || a.source >= n {
                return Err(Error::UnknownObject(a.target.max(a.source)));
            }
            matrix[a.target][a.source] = a.in_gamma || !a.unit;
        }
        let rebuilt = Self::from_matrix(self.objects.clone(), &matrix)?;
        let same = rebuilt.arrows == self.arrows
            && rebuilt.inverse == self.inverse
            && rebuilt.units == self.units
            && rebuilt.composition == self.composition;
        if !same {
            return Err(Error::Parse(
                "groupoid tables are inconsistent with their arrow list".into(),
            ));
        }
        Ok(rebuilt)
    }

    pub fn object_count(&self) -> usize {
        self.objects.len()
    }

    pub fn arrow_count(&self) -> usize {
        self.arrows.len()
    }

    pub fn arrow(&self, a: usize) -> Result<&Arrow> {
        self.arrows.get(a).ok_or(Error::UnknownArrow(a))
    }

    pub fn source(&self, a: usize) -> usize {
        self.arrows[a].source
    }

    pub fn target(&self, a: usize) -> usize {
        self.arrows[a].target
    }

    pub fn is_unit(&self, a: usize) -> bool {
        self.arrows[a].unit
    }

    /// Arrow index of `(target, source)`, if present.
    pub fn find(&self, target: usize, source: usize) -> Option<usize> {
        self.index.get(target)?.get(source).copied().flatten()
    }

    /// Whether `(i, j)` lies in the underlying relation.
    pub fn related(&self, i: usize, j: usize) -> bool {
        self.find(i, j).is_some_and(|a| self.arrows[a].in_gamma)
    }

    /// `a b`, when composable and the result is an arrow.
    pub fn compose(&self, a: usize, b: usize) -> Option<usize> {
        let (x, y) = (&self.arrows[a], &self.arrows[b]);
        if x.source != y.target {
            return None;
        }
        self.find(x.target, y.source)
    }

    /// Whether every pair is an arrow.
    pub fn is_full(&self) -> bool {
        self.arrows.len() == self.objects.len().pow(2)
    }

    /// Arrows with target `f`, ordered by source.
    pub fn target_fibre(&self, f: usize) -> Vec<usize> {
        self.index[f].iter().flatten().copied().collect()
    }

    /// Arrows with source `f`, ordered by target.
    pub fn source_fibre(&self, f: usize) -> Vec<usize> {
        self.index.iter().filter_map(|row| row[f]).collect()
    }
}

/// Groupoid of a relation built on a catalog.
pub fn build_groupoid(gamma: &GammaRelation) -> Result<GroupoidTables> {
    if let Some((i, j)) = gamma.asymmetry() {
        return Err(Error::NotSymmetric(i, j));
    }
    GroupoidTables::from_matrix(gamma.names.clone(), &gamma.matrix())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DefinedSide {
    /// `(a b) c` is defined, `a (b c)` is not.
    Left,
    Right,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartialityDefect {
    pub triple: [usize; 3],
    pub defined: DefinedSide,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxiomReport {
    pub unit_law: bool,
    pub inverse_law: bool,
    /// Composable triples with both parenthesizations defined.
    pub associativity_defined: usize,
    pub associativity_violations: Vec<[usize; 3]>,
    pub partiality_defects: Vec<PartialityDefect>,
}

impl AxiomReport {
    pub fn passed(&self) -> bool {
        self.unit_law && self.inverse_law && self.associativity_violations.is_empty()
    }
}

/// Exhaustive unit, inverse and associativity checks.
pub fn axiom_check(g: &GroupoidTables) -> AxiomReport {
    let n = g.arrow_count();
    let unit_law = (0..n).all(|a| {
        g.compose(g.units[g.target(a)], a) == Some(a)
            && g.compose(a, g.units[g.source(a)]) == Some(a)
    });
    let inverse_law = (0..n).all(|a| {
        let i = g.inverse[a];
        g.inverse[i] == a
            && g.source(i) == g.target(a)
            && g.target(i) == g.source(a)
            && g.compose(a, i) == Some(g.units[g.target(a)])
            && g.compose(i, a) == Some(g.units[g.source(a)])
    });
    let mut associativity_defined = 0;
    let mut violations = Vec::new();
    let mut defects = Vec::new();
    for a in 0..n {
        for b in g.target_fibre(g.source(a)) {
            for c in g.target_fibre(g.source(b)) {
                let left = g.compose(a, b).and_then(|ab| g.compose(ab, c));
                let right = g.compose(b, c).and_then(|bc| g.compose(a, bc));
                match (left, right) {
                    (Some(l), Some(r)) => {
                        associativity_defined += 1;
                        if l != r {
                            violations.push([a, b, c]);
                        }
                    }
                    (Some(_), None) => defects.push(PartialityDefect {
                        triple: [a, b, c],
                        defined: DefinedSide::Left,
                    }),
                    (None, Some(_)) => defects.push(PartialityDefect {
                        triple: [a, b, c],
                        defined: DefinedSide::Right,
                    }),
                    (None, None) => {}
                }
            }
        }
    }
    AxiomReport {
        unit_law,
        inverse_law,
        associativity_defined,
        associativity_violations: violations,
        partiality_defects: defects,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn partial_demo() -> GroupoidTables {
        // objects 0.1, 0.2, 0.35, 0.45 of the power catalog at p = 2
        let m = vec![
            vec![true, true, true, false],
            vec![true, true, false, false],
            vec![true, false, false, false],
            vec![false, false, false, false],
        ];
        GroupoidTables::from_matrix(vec!["a".into(), "b".into(), "c".into(), "d".into()], &m)
            .unwrap()
    }

    #[test]
    fn full_pattern_counts() {
        let g = GroupoidTables::full(3);
        assert_eq!(g.arrow_count(), 9);
        assert_eq!(g.composition.len(), 27);
        let r = axiom_check(&g);
        assert!(r.passed() && r.partiality_defects.is_empty());
        assert_eq!(r.associativity_defined, 81);
    }

    #[test]
    fn units_only() {
        let g = GroupoidTables::units_only(4);
        assert_eq!(g.arrow_count(), 4);
        assert_eq!(g.composition.len(), 4);
        assert!(axiom_check(&g).passed());
        assert_eq!(g.target_fibre(2), vec![g.units[2]]);
    }

    #[test]
    fn partial_pattern_has_defects_but_no_violations() {
        let g = partial_demo();
        assert_eq!(g.arrow_count(), 8);
        assert!(g.find(3, 3).is_some_and(|u| !g.arrows[u].in_gamma));
        assert!(g.find(0, 1).is_some());
        let r = axiom_check(&g);
        assert!(r.passed());
        assert!(!r.partiality_defects.is_empty());
    }

    #[test]
    fn fibres_have_equal_sizes() {
        let g = partial_demo();
        for f in 0..4 {
            assert_eq!(g.target_fibre(f).len(), g.source_fibre(f).len());
        }
        assert_eq!(g.target_fibre(3), vec![g.units[3]]);
    }

    #[test]
    fn json_round_trip() {
        let g = partial_demo();
        let s = serde_json::to_string(&g).unwrap();
        let back: GroupoidTables = serde_json::from_str(&s).unwrap();
        assert_eq!(back.validated().unwrap(), g);
    }

    #[test]
    fn asymmetric_matrix_rejected() {
        let m = vec![vec![true, true], vec![false, true]];
        assert_eq!(
            GroupoidTables::from_matrix(vec!["a".into(), "b".into()], &m).unwrap_err(),
            Error::NotSymmetric(0, 1)
        );
    }
}
