use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::kernel::Kernel;
use crate::domain::{Grid, GridFunction};
use crate::error::{Error, Result};

/// Nodes required across `[-eps, eps]` to resolve `D_alpha phi_eps`.
pub fn required_nodes(order: usize) -> usize {
    4 * (order + 2)
}

/// One element `phi_eps` of the smooth algebra.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MollifierElement {
    kernel: Kernel,
    epsilon: f64,
}

impl MollifierElement {
    pub fn new(kernel: Kernel, epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "epsilon {epsilon} not in (0, 1)"
            )));
        }
        Ok(Self { kernel, epsilon })
    }

    pub fn standard(dim: usize, epsilon: f64) -> Result<Self> {
        Self::new(Kernel::standard(dim)?, epsilon)
    }

    pub fn kernel(&self) -> &Kernel {
        &self.kernel
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        self.kernel.scaled(self.epsilon, x)
    }

    /// Samples `phi_eps` on `grid`; see [`make_mollifier`].
    pub fn realize(&self, grid: &Grid) -> Result<GridFunction> {
        make_mollifier(&self.kernel, self.epsilon, grid)
    }
}

fn check_dim(kernel: &Kernel, grid: &Grid) -> Result<()> {
    if kernel.dim() != grid.dim() {
        return Err(Error::InvalidParameter(format!(
            "{}-dimensional kernel on a {}-dimensional grid",
            kernel.dim(),
            grid.dim()
        )));
    }
    Ok(())
}

fn check_resolution(grid: &Grid, epsilon: f64, order: usize) -> Result<()> {
    let nodes_across = grid
        .spacing()
        .iter()
        .map(|h| 2.0 * epsilon / h)
        .fold(f64::INFINITY, f64::min);
    let required = required_nodes(order);
    if nodes_across < required as f64 {
        return Err(Error::UnderResolved {
            epsilon,
            nodes_across,
            required,
        });
    }
    Ok(())
}

/// Samples `phi_eps(x) = eps^(-n) phi(x / eps)` at the nodes of `grid`.
///
/// The closed ball `B(0, eps)` must lie inside the domain and `[-eps, eps]`
/// must span at least eight cells on every axis.
pub fn make_mollifier(kernel: &Kernel, epsilon: f64, grid: &Grid) -> Result<GridFunction> {
    check_dim(kernel, grid)?;
    let domain = grid.domain();
    let fits = epsilon < domain.min_half_length()
        && domain
            .axes()
            .iter()
            .all(|&(a, b)| a <= -epsilon && epsilon <= b);
    if !fits {
        return Err(Error::EpsilonTooLarge { epsilon });
    }
    check_resolution(grid, epsilon, 0)?;
    GridFunction::from_fn(grid, |x| kernel.scaled(epsilon, x))
}

/// Lattice offsets `k` with weights `D_alpha phi_eps(k h) * |cell|`.
struct Stencil {
    taps: Vec<([isize; 2], f64)>,
}

impl Stencil {
    fn new(kernel: &Kernel, alpha: &[usize], epsilon: f64, grid: &Grid) -> Self {
        let h = grid.spacing();
        let cell = grid.cell_volume();
        let reach: Vec<isize> = h.iter().map(|hi| (epsilon / hi).floor() as isize).collect();
        let mut taps = Vec::new();
        let r1 = if grid.dim() == 2 { reach[1] } else { 0 };
        for k0 in -reach[0]..=reach[0] {
            for k1 in -r1..=r1 {
                let y: Vec<f64> = [k0, k1][..grid.dim()]
                    .iter()
                    .zip(h)
                    .map(|(&k, &hi)| k as f64 * hi)
                    .collect();
                let w = kernel.scaled_derivative(alpha, epsilon, &y) * cell;
                if w != 0.0 {
                    taps.push(([k0, k1], w));
                }
            }
        }
        Self { taps }
    }

    /// `out_i = sum_k w_k f_(i - k)`, dropping taps that leave the grid.
    fn apply(&self, f: &GridFunction) -> Vec<f64> {
        let grid = f.grid();
        let n = grid.nodes_per_axis();
        let n1 = if grid.dim() == 2 { n[1] as isize } else { 1 };
        let n0 = n[0] as isize;
        let values = f.values();
        (0..grid.len())
            .into_par_iter()
            .map(|i| {
                let idx = grid.unflatten(i);
                let (i0, i1) = (idx[0] as isize, idx[1] as isize);
                let mut acc = 0.0;
                for &([k0, k1], w) in &self.taps {
                    let (j0, j1) = (i0 - k0, i1 - k1);
                    if j0 >= 0 && j0 < n0 && j1 >= 0 && j1 < n1 {
                        acc += w * values[(j0 * n1 + j1) as usize];
                    }
                }
                acc
            })
            .collect()
    }
}

/// A mollified grid function together with its trusted region.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mollified {
    pub epsilon: f64,
    pub function: GridFunction,
    /// Nodes farther than `epsilon` from the boundary.
    pub trusted: Vec<bool>,
}

impl Mollified {
    pub fn trusted_fraction(&self) -> f64 {
        self.trusted.iter().filter(|&&t| t).count() as f64 / self.trusted.len() as f64
    }

    /// `||self - other||_p` over the trusted nodes.
    pub fn distance(&self, other: &GridFunction, p: f64) -> Result<f64> {
        self.function.sub(other)?.lp_norm_masked(p, &self.trusted)
    }

    /// Largest `|self - other|` over the trusted nodes.
    pub fn sup_distance(&self, other: &GridFunction) -> Result<f64> {
        self.distance(other, f64::INFINITY)
    }
}

/// `f_eps(x_i) = sum_j phi_eps(x_i - x_j) f(x_j) |cell|`.
pub fn convolve(m: &MollifierElement, f: &GridFunction) -> Result<Mollified> {
    convolve_derivative(m, &[], f)
}

/// `D_alpha (phi_eps * f) = (D_alpha phi_eps) * f`, with the kernel
/// derivative evaluated analytically.
pub fn convolve_derivative(
    m: &MollifierElement,
    alpha: &[usize],
    f: &GridFunction,
) -> Result<Mollified> {
    let grid = f.grid();
    check_dim(&m.kernel, grid)?;
    let order: usize = alpha.iter().sum();
    if order > crate::domain::radial::MAX_ORDER {
        return Err(Error::OrderUnsupported { order });
    }
    if alpha.len() != grid.dim() && !(alpha.is_empty() && order == 0) {
        return Err(Error::InvalidParameter(format!(
            "multi-index of length {} on a {}-dimensional grid",
            alpha.len(),
            grid.dim()
        )));
    }
    let eps = m.epsilon;
    check_resolution(grid, eps, order)?;
    let trusted = grid.eroded_mask(eps);
    if !trusted.iter().any(|&t| t) {
        return Err(Error::EmptyTrustedInterior { epsilon: eps });
    }
    let stencil = Stencil::new(&m.kernel, alpha, eps, grid);
    let values = stencil.apply(f);
    Ok(Mollified {
        epsilon: eps,
        function: GridFunction::new(grid.clone(), values)?,
        trusted,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClosureReport {
    pub conv_support_ok: bool,
    pub pointwise_support_ok: bool,
    pub conv_mass: f64,
    /// Largest `|x|` at which `a * b` is nonzero.
    pub conv_support_radius: f64,
    /// Largest `|x|` at which `a . b` is nonzero.
    pub pointwise_support_radius: f64,
}

/// Support and mass of the convolution and pointwise products of two elements.
pub fn closure_check(
    a: &MollifierElement,
    b: &MollifierElement,
    grid: &Grid,
) -> Result<ClosureReport> {
    let reach = a.epsilon + b.epsilon;
    let fa = a.realize(grid)?;
    let fb = b.realize(grid)?;
    if !grid
        .domain()
        .axes()
        .iter()
        .all(|&(lo, hi)| lo <= -reach && reach <= hi)
    {
        return Err(Error::EpsilonTooLarge { epsilon: reach });
    }
    let d = grid.dim();
    let cell = grid.cell_volume();
    let norm = |p: &[f64]| p.iter().map(|v| v * v).sum::<f64>().sqrt();
    let support_a: Vec<(usize, f64)> = fa
        .values()
        .iter()
        .enumerate()
        .filter(|(_, &v)| v != 0.0)
        .map(|(j, &v)| (j, v))
        .collect();
    let conv: Vec<f64> = (0..grid.len())
        .into_par_iter()
        .map(|i| {
            let x = grid.point(i);
            support_a
                .iter()
                .map(|&(j, va)| {
                    let y = grid.point(j);
                    let diff: Vec<f64> = (0..d).map(|k| x[k] - y[k]).collect();
                    va * b.value(&diff) * cell
                })
                .sum()
        })
        .collect();
    let radius = |values: &[f64]| {
        values
            .iter()
            .enumerate()
            .filter(|(_, &v)| v != 0.0)
            .map(|(i, _)| norm(&grid.point(i)[..d]))
            .fold(0.0, f64::max)
    };
    let pointwise = fa.mul(&fb)?;
    let slack = norm(grid.spacing());
    let conv_radius = radius(&conv);
    let point_radius = radius(pointwise.values());
    Ok(ClosureReport {
        conv_support_ok: conv_radius <= reach + slack,
        pointwise_support_ok: point_radius <= a.epsilon.min(b.epsilon),
        conv_mass: conv.iter().sum::<f64>() * cell,
        conv_support_radius: conv_radius,
        pointwise_support_radius: point_radius,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::BoxDomain;

    fn line(n: usize) -> Grid {
        Grid::uniform(BoxDomain::interval(-1.0, 1.0).unwrap(), n).unwrap()
    }

    #[test]
    fn realized_mollifier_axioms() {
        let k = Kernel::standard(1).unwrap();
        for eps in [0.4, 0.2, 0.1, 0.05] {
            let g = line(1024);
            let m = make_mollifier(&k, eps, &g).unwrap();
            assert!((m.integrate() - 1.0).abs() < 5e-3);
            for (i, p) in g.points().enumerate() {
                if p[0].abs() >= eps {
                    assert_eq!(m.value_at(i), 0.0);
                }
                assert!(m.value_at(i) >= 0.0);
            }
        }
    }

    #[test]
    fn mollifier_preconditions() {
        let k = Kernel::standard(1).unwrap();
        assert!(matches!(
            make_mollifier(&k, 1.0, &line(64)),
            Err(Error::EpsilonTooLarge { .. })
        ));
        assert!(matches!(
            make_mollifier(&k, 0.05, &line(64)),
            Err(Error::UnderResolved { .. })
        ));
        let shifted = Grid::uniform(BoxDomain::interval(0.0, 1.0).unwrap(), 256).unwrap();
        assert!(make_mollifier(&k, 0.1, &shifted).is_err());
    }

    #[test]
    fn convolution_preserves_constants_and_lines() {
        let g = line(512);
        let m = MollifierElement::standard(1, 0.1).unwrap();
        let one = GridFunction::constant(&g, 1.0).unwrap();
        let x = GridFunction::from_fn(&g, |x| x[0]).unwrap();
        assert!(convolve(&m, &one).unwrap().sup_distance(&one).unwrap() < 5e-3);
        assert!(convolve(&m, &x).unwrap().sup_distance(&x).unwrap() < 5e-3);
    }

    #[test]
    fn empty_trusted_interior() {
        let g = Grid::uniform(BoxDomain::interval(-0.2, 0.2).unwrap(), 256).unwrap();
        let m = MollifierElement::standard(1, 0.25).unwrap();
        let f = GridFunction::constant(&g, 1.0).unwrap();
        assert_eq!(
            convolve(&m, &f).unwrap_err(),
            Error::EmptyTrustedInterior { epsilon: 0.25 }
        );
    }

    #[test]
    fn closure_of_two_elements() {
        let g = line(512);
        let a = MollifierElement::standard(1, 0.2).unwrap();
        let r = closure_check(&a, &a, &g).unwrap();
        assert!(r.conv_support_ok && r.pointwise_support_ok);
        assert!((r.conv_mass - 1.0).abs() < 1e-2);
        assert!(r.pointwise_support_radius < 0.2);
    }

    #[test]
    fn two_dimensional_convolution_of_constant() {
        let g = Grid::uniform(BoxDomain::square(-1.0, 1.0).unwrap(), 64).unwrap();
        let m = MollifierElement::standard(2, 0.25).unwrap();
        let one = GridFunction::constant(&g, 1.0).unwrap();
        let out = convolve(&m, &one).unwrap();
        assert!(out.sup_distance(&one).unwrap() < 5e-3);
    }
}
