use serde::{Deserialize, Serialize};

use super::tables::GroupoidTables;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    /// Arrows with target `f`.
    Target,
    /// Arrows with source `f`.
    Source,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fibre {
    pub anchor: usize,
    pub direction: Direction,
    /// Arrow indices, ordered by the free endpoint.
    pub members: Vec<usize>,
}

impl Fibre {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Free endpoints of the member arrows.
    pub fn objects(&self, g: &GroupoidTables) -> Vec<usize> {
        self.members
            .iter()
            .map(|&a| match self.direction {
                Direction::Target => g.source(a),
                Direction::Source => g.target(a),
            })
            .collect()
    }
}

pub fn fibre(g: &GroupoidTables, f: usize, direction: Direction) -> Result<Fibre> {
    if f >= g.object_count() {
        return Err(Error::UnknownObject(f));
    }
    let members = match direction {
        Direction::Target => g.target_fibre(f),
        Direction::Source => g.source_fibre(f),
    };
    Ok(Fibre {
        anchor: f,
        direction,
        members,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_fibre_covers_all_objects() {
        let g = GroupoidTables::full(3);
        for f in 0..3 {
            for d in [Direction::Target, Direction::Source] {
                assert_eq!(fibre(&g, f, d).unwrap().objects(&g), vec![0, 1, 2]);
            }
        }
    }

    #[test]
    fn missing_self_pair_leaves_only_formal_unit() {
        let m = vec![vec![true, true], vec![true, false]];
        let g = GroupoidTables::from_matrix(vec!["a".into(), "b".into()], &m).unwrap();
        let fb = fibre(&g, 1, Direction::Target).unwrap();
        assert_eq!(fb.objects(&g), vec![0, 1]);
        let unit = g.arrows[g.units[1]];
        assert!(unit.unit && !unit.in_gamma);
    }

    #[test]
    fn unknown_object() {
        let g = GroupoidTables::units_only(2);
        assert_eq!(
            fibre(&g, 2, Direction::Source).unwrap_err(),
            Error::UnknownObject(2)
        );
        assert_eq!(
            fibre(&g, 1, Direction::Source).unwrap().members,
            vec![g.units[1]]
        );
    }
}
