use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Minimum number of cells per axis.
pub const MIN_NODES_PER_AXIS: usize = 8;

/// A point in at most two dimensions; unused coordinates are zero.
pub type Point = [f64; 2];

/// Closed box `[a_1, b_1] x ... x [a_n, b_n]` with `n` in {1, 2}.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxDomain {
    axes: Vec<(f64, f64)>,
}

impl BoxDomain {
    pub fn new(axes: &[(f64, f64)]) -> Result<Self> {
        if axes.is_empty() || axes.len() > 2 {
            return Err(Error::InvalidDomain(format!(
                "dimension {} not in {{1, 2}}",
                axes.len()
            )));
        }
        for (i, &(a, b)) in axes.iter().enumerate() {
            if !(a.is_finite() && b.is_finite() && a < b) {
                return Err(Error::InvalidDomain(format!(
                    "axis {i}: [{a}, {b}] is not a proper interval"
                )));
            }
        }
        Ok(Self {
            axes: axes.to_vec(),
        })
    }

    pub fn interval(a: f64, b: f64) -> Result<Self> {
        Self::new(&[(a, b)])
    }

    pub fn square(a: f64, b: f64) -> Result<Self> {
        Self::new(&[(a, b), (a, b)])
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn axes(&self) -> &[(f64, f64)] {
        &self.axes
    }

    pub fn length(&self, axis: usize) -> f64 {
        let (a, b) = self.axes[axis];
        b - a
    }

    pub fn measure(&self) -> f64 {
        (0..self.dim()).map(|i| self.length(i)).product()
    }

    pub fn min_half_length(&self) -> f64 {
        (0..self.dim())
            .map(|i| 0.5 * self.length(i))
            .fold(f64::INFINITY, f64::min)
    }

    /// Strict interior membership.
    pub fn contains_interior(&self, x: &[f64]) -> bool {
        x.len() == self.dim()
            && self
                .axes
                .iter()
                .zip(x)
                .all(|(&(a, b), &xi)| a < xi && xi < b)
    }

    /// Distance from `x` to the boundary of the box (sup-norm distance per axis,
    /// minimized over axes).
    pub fn distance_to_boundary(&self, x: &[f64]) -> f64 {
        self.axes
            .iter()
            .zip(x)
            .map(|(&(a, b), &xi)| (xi - a).min(b - xi))
            .fold(f64::INFINITY, f64::min)
    }
}

/// Cell-centred uniform grid on a [`BoxDomain`].
///
/// Node `j` on axis `i` sits at `a_i + (j + 1/2) h_i`; nodes are stored in
/// row-major order (last axis fastest).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    domain: BoxDomain,
    nodes: Vec<usize>,
    spacing: Vec<f64>,
}

impl Grid {
    pub fn new(domain: BoxDomain, nodes: &[usize]) -> Result<Self> {
        if nodes.len() != domain.dim() {
            return Err(Error::InvalidGrid(format!(
                "{} node counts for a {}-dimensional domain",
                nodes.len(),
                domain.dim()
            )));
        }
        if let Some(&n) = nodes.iter().find(|&&n| n < MIN_NODES_PER_AXIS) {
            return Err(Error::InvalidGrid(format!(
                "{n} nodes per axis, need at least {MIN_NODES_PER_AXIS}"
            )));
        }
        let spacing = nodes
            .iter()
            .enumerate()
            .map(|(i, &n)| domain.length(i) / n as f64)
            .collect();
        Ok(Self {
            domain,
            nodes: nodes.to_vec(),
            spacing,
        })
    }

    /// Same node count on every axis.
    pub fn uniform(domain: BoxDomain, n: usize) -> Result<Self> {
        let nodes = vec![n; domain.dim()];
        Self::new(domain, &nodes)
    }

    pub fn domain(&self) -> &BoxDomain {
        &self.domain
    }

    pub fn dim(&self) -> usize {
        self.domain.dim()
    }

    pub fn nodes_per_axis(&self) -> &[usize] {
        &self.nodes
    }

    pub fn spacing(&self) -> &[f64] {
        &self.spacing
    }

    pub fn max_spacing(&self) -> f64 {
        self.spacing.iter().cloned().fold(0.0, f64::max)
    }

    pub fn cell_volume(&self) -> f64 {
        self.spacing.iter().product()
    }

    pub fn len(&self) -> usize {
        self.nodes.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Coordinate of node `j` along `axis`.
    pub fn coordinate(&self, axis: usize, j: usize) -> f64 {
        self.domain.axes()[axis].0 + (j as f64 + 0.5) * self.spacing[axis]
    }

    /// Per-axis indices of a flat node index.
    pub fn unflatten(&self, index: usize) -> [usize; 2] {
        match self.dim() {
            1 => [index, 0],
            _ => [index / self.nodes[1], index % self.nodes[1]],
        }
    }

    pub fn flatten(&self, idx: [usize; 2]) -> usize {
        match self.dim() {
            1 => idx[0],
            _ => idx[0] * self.nodes[1] + idx[1],
        }
    }

    pub fn point(&self, index: usize) -> Point {
        let idx = self.unflatten(index);
        let mut p = [0.0; 2];
        for (axis, slot) in p.iter_mut().enumerate().take(self.dim()) {
            *slot = self.coordinate(axis, idx[axis]);
        }
        p
    }

    pub fn points(&self) -> impl Iterator<Item = Point> + '_ {
        (0..self.len()).map(move |i| self.point(i))
    }

    /// Mask of nodes at distance strictly greater than `epsilon` from the boundary.
    pub fn eroded_mask(&self, epsilon: f64) -> Vec<bool> {
        let d = self.dim();
        self.points()
            .map(|p| self.domain.distance_to_boundary(&p[..d]) > epsilon)
            .collect()
    }

    /// Same domain, refined node counts.
    pub fn with_nodes(&self, nodes: &[usize]) -> Result<Self> {
        Self::new(self.domain.clone(), nodes)
    }

    /// Dyadic refinement ladder with `2^lo ..= 2^hi` nodes per axis.
    pub fn dyadic_ladder(domain: &BoxDomain, lo: u32, hi: u32) -> Result<Vec<Grid>> {
        (lo..=hi)
            .map(|e| Grid::uniform(domain.clone(), 1usize << e))
            .collect()
    }
}

/// Validates a refinement ladder: at least four rungs on one domain, each at
/// least twice as fine as the previous on every axis.
pub fn validate_ladder(ladder: &[Grid]) -> Result<()> {
    if ladder.len() < 4 {
        return Err(Error::InvalidLadder(format!(
            "{} rungs, need at least 4",
            ladder.len()
        )));
    }
    for pair in ladder.windows(2) {
        if pair[0].domain() != pair[1].domain() {
            return Err(Error::InvalidLadder("rungs on different domains".into()));
        }
        let coarse = pair[0].nodes_per_axis();
        let fine = pair[1].nodes_per_axis();
        if coarse.iter().zip(fine).any(|(&c, &f)| f < 2 * c) {
            return Err(Error::InvalidLadder(format!(
                "rung {fine:?} is not at least twice as fine as {coarse:?}"
            )));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nodes_are_cell_midpoints() {
        let g = Grid::uniform(BoxDomain::interval(0.0, 1.0).unwrap(), 16).unwrap();
        assert_eq!(g.coordinate(0, 0), 1.0 / 32.0);
        assert_eq!(g.coordinate(0, 15), 31.0 / 32.0);
        assert_eq!(g.cell_volume(), 1.0 / 16.0);
    }

    #[test]
    fn rejects_bad_domains_and_grids() {
        assert!(BoxDomain::interval(1.0, 1.0).is_err());
        assert!(BoxDomain::new(&[(0.0, 1.0); 3]).is_err());
        let d = BoxDomain::interval(0.0, 1.0).unwrap();
        assert!(Grid::uniform(d.clone(), 7).is_err());
        assert!(Grid::new(d, &[8, 8]).is_err());
    }

    #[test]
    fn flat_index_round_trips_in_2d() {
        let g = Grid::new(BoxDomain::square(-1.0, 1.0).unwrap(), &[8, 12]).unwrap();
        for i in 0..g.len() {
            assert_eq!(g.flatten(g.unflatten(i)), i);
        }
        assert_eq!(g.point(13), [g.coordinate(0, 1), g.coordinate(1, 1)]);
    }

    #[test]
    fn ladder_validation() {
        let d = BoxDomain::interval(-1.0, 1.0).unwrap();
        assert!(validate_ladder(&Grid::dyadic_ladder(&d, 7, 10).unwrap()).is_ok());
        assert!(validate_ladder(&Grid::dyadic_ladder(&d, 7, 9).unwrap()).is_err());
        let mut bad = Grid::dyadic_ladder(&d, 7, 10).unwrap();
        bad[2] = Grid::uniform(d, 300).unwrap();
        assert!(validate_ladder(&bad).is_err());
    }

    #[test]
    fn eroded_mask_excludes_boundary_band() {
        let g = Grid::uniform(BoxDomain::interval(-1.0, 1.0).unwrap(), 20).unwrap();
        let mask = g.eroded_mask(0.3);
        assert_eq!(mask.iter().filter(|&&m| m).count(), 14);
    }
}
