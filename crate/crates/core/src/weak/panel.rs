use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::multi_index::MultiIndex;
use crate::domain::{Grid, GridFunction, SymbolicFunction};
use crate::error::{Error, Result};

pub const MIN_PANEL_SIZE: usize = 20;
pub const DEFAULT_PANEL_SIZE: usize = 32;
pub const DEFAULT_SEED: u64 = 0;

/// Seeded family of bump test functions supported strictly inside the domain.
///
/// Radii are drawn from `[max(8h, 0.05 L), 0.225 L]` with `L` the shortest
/// side, and centers so that every support stays at least one cell away
/// from the boundary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestFunctionPanel {
    grid: Grid,
    seed: u64,
    members: Vec<SymbolicFunction>,
}

impl TestFunctionPanel {
    pub fn new(grid: &Grid, size: usize, seed: u64) -> Result<Self> {
        if size < MIN_PANEL_SIZE {
            return Err(Error::InvalidPanel(format!(
                "{size} members, need at least {MIN_PANEL_SIZE}"
            )));
        }
        let domain = grid.domain();
        let shortest = (0..grid.dim())
            .map(|i| domain.length(i))
            .fold(f64::INFINITY, f64::min);
        let r_lo = (8.0 * grid.max_spacing()).max(0.05 * shortest);
        let r_hi = 0.225 * shortest;
        if r_lo > r_hi {
            return Err(Error::InvalidPanel(format!(
                "grid too coarse: smallest admissible radius {r_lo} exceeds {r_hi}"
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let members = (0..size)
            .map(|_| {
                let r = rng.random_range(r_lo..=r_hi);
                let center: Vec<f64> = domain
                    .axes()
                    .iter()
                    .zip(grid.spacing())
                    .map(|(&(a, b), &h)| rng.random_range(a + h + r..=b - h - r))
                    .collect();
                SymbolicFunction::bump(&center, r)
            })
            .collect();
        Ok(Self {
            grid: grid.clone(),
            seed,
            members,
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn members(&self) -> &[SymbolicFunction] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// `(center, radius)` of member `j`.
    pub fn bump(&self, j: usize) -> (&[f64], f64) {
        match &self.members[j] {
            SymbolicFunction::Bump { center, radius } => (center, *radius),
            _ => unreachable!("panel members are bumps"),
        }
    }

    pub fn sample(&self, j: usize, alpha: &MultiIndex) -> Result<GridFunction> {
        self.members[j].sample_derivative(alpha.components(), &self.grid)
    }

    /// `||phi_j||_{W^{m,1}} = sum_{|beta| <= m} ||D_beta phi_j||_1`.
    pub fn sobolev_l1_norm(&self, j: usize, order: usize) -> Result<f64> {
        MultiIndex::up_to(self.grid.dim(), order)?
            .iter()
            .map(|beta| self.sample(j, beta)?.lp_norm(1.0))
            .sum()
    }

    /// Integrals of each member over `cells` equal strips along the first axis.
    pub(crate) fn strip_weights(&self, cells: usize) -> Result<Vec<Vec<f64>>> {
        let zero = MultiIndex::zero(self.grid.dim());
        let (a, b) = self.grid.domain().axes()[0];
        let width = (b - a) / cells as f64;
        let cell_of: Vec<usize> = self
            .grid
            .points()
            .map(|p| (((p[0] - a) / width) as usize).min(cells - 1))
            .collect();
        (0..self.len())
            .into_par_iter()
            .map(|j| {
                let phi = self.sample(j, &zero)?;
                let mut w = vec![0.0; cells];
                for (i, &v) in phi.values().iter().enumerate() {
                    w[cell_of[i]] += v;
                }
                let vol = self.grid.cell_volume();
                Ok(w.into_iter().map(|s| s * vol).collect())
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::BoxDomain;

    fn grid() -> Grid {
        Grid::uniform(BoxDomain::interval(-1.0, 1.0).unwrap(), 512).unwrap()
    }

    #[test]
    fn members_vanish_near_boundary() {
        let g = grid();
        let panel = TestFunctionPanel::new(&g, 40, 7).unwrap();
        let h = g.spacing()[0];
        for j in 0..panel.len() {
            let (c, r) = panel.bump(j);
            assert!(c[0] - r >= -1.0 + h && c[0] + r <= 1.0 - h);
        }
    }

    #[test]
    fn seeded_and_sized() {
        let g = grid();
        assert_eq!(
            TestFunctionPanel::new(&g, 32, 0).unwrap(),
            TestFunctionPanel::new(&g, 32, 0).unwrap()
        );
        assert_ne!(
            TestFunctionPanel::new(&g, 32, 0).unwrap(),
            TestFunctionPanel::new(&g, 32, 1).unwrap()
        );
        assert!(matches!(
            TestFunctionPanel::new(&g, 19, 0),
            Err(Error::InvalidPanel(_))
        ));
    }

    #[test]
    fn coarse_grid_rejected() {
        let g = Grid::uniform(BoxDomain::interval(-1.0, 1.0).unwrap(), 16).unwrap();
        assert!(matches!(
            TestFunctionPanel::new(&g, 32, 0),
            Err(Error::InvalidPanel(_))
        ));
    }
}
