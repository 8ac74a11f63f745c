use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::multi_index::MultiIndex;
use super::panel::TestFunctionPanel;
use crate::domain::GridFunction;
use crate::error::{Error, Result};
use crate::smoothing::{convolve, convolve_derivative, Mollified, MollifierElement};

/// Largest brute-force candidate family.
pub const MAX_CANDIDATES: usize = 1 << 12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeakResidual {
    pub alpha: MultiIndex,
    /// Normalized residual per panel member.
    pub residuals: Vec<f64>,
    pub max_residual: f64,
    pub worst_member: usize,
}

fn check_alpha(alpha: &MultiIndex, dim: usize) -> Result<()> {
    if alpha.dim() != dim {
        return Err(Error::InvalidParameter(format!(
            "multi-index {alpha} on a {dim}-dimensional grid"
        )));
    }
    Ok(())
}

/// Per member: `(-1)^|alpha| int f D_alpha phi` and `||phi||_{W^{|alpha|,1}}`.
fn member_terms(
    f: &GridFunction,
    alpha: &MultiIndex,
    panel: &TestFunctionPanel,
) -> Result<Vec<(f64, f64)>> {
    if f.grid() != panel.grid() {
        return Err(Error::GridMismatch);
    }
    check_alpha(alpha, f.grid().dim())?;
    (0..panel.len())
        .into_par_iter()
        .map(|j| {
            let d_phi = panel.sample(j, alpha)?;
            let rhs = alpha.sign() * f.mul(&d_phi)?.integrate();
            Ok((rhs, panel.sobolev_l1_norm(j, alpha.order())?))
        })
        .collect()
}

/// Max over the panel of `|int u phi - (-1)^|alpha| int f D_alpha phi| / ||phi||_{W^{|alpha|,1}}`.
pub fn verify_weak_derivative(
    f: &GridFunction,
    u: &GridFunction,
    alpha: &MultiIndex,
    panel: &TestFunctionPanel,
) -> Result<WeakResidual> {
    if u.grid() != panel.grid() {
        return Err(Error::GridMismatch);
    }
    let terms = member_terms(f, alpha, panel)?;
    let zero = MultiIndex::zero(f.grid().dim());
    let residuals = (0..panel.len())
        .into_par_iter()
        .map(|j| {
            let lhs = u.mul(&panel.sample(j, &zero)?)?.integrate();
            let (rhs, norm) = terms[j];
            Ok((lhs - rhs).abs() / norm)
        })
        .collect::<Result<Vec<f64>>>()?;
    let (worst_member, max_residual) = residuals
        .iter()
        .copied()
        .enumerate()
        .fold((0, 0.0), |acc, (j, r)| if r > acc.1 { (j, r) } else { acc });
    Ok(WeakResidual {
        alpha: alpha.clone(),
        residuals,
        max_residual,
        worst_member,
    })
}

/// Outcome of an exhaustive search over piecewise-constant candidates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateSearch {
    pub cells: usize,
    pub levels: Vec<f64>,
    pub candidates: usize,
    /// Smallest max-residual attained by any candidate.
    pub min_max_residual: f64,
    /// Strip values of the best candidate.
    pub best: Vec<f64>,
}

/// Tries every `u` that is constant on `cells` equal strips along the first
/// axis with values drawn from `levels`, and reports the best verification
/// residual found. A large minimum certifies that no candidate in the
/// family is a weak derivative.
pub fn piecewise_constant_search(
    f: &GridFunction,
    alpha: &MultiIndex,
    panel: &TestFunctionPanel,
    cells: usize,
    levels: &[f64],
) -> Result<CandidateSearch> {
    let candidates = (levels.len() as f64).powi(cells as i32);
    if cells == 0 || levels.is_empty() || candidates > MAX_CANDIDATES as f64 {
        return Err(Error::InvalidParameter(format!(
            "{} levels on {cells} cells exceed {MAX_CANDIDATES} candidates",
            levels.len()
        )));
    }
    let candidates = candidates as usize;
    let terms = member_terms(f, alpha, panel)?;
    let weights = panel.strip_weights(cells)?;
    let decode = |mut code: usize| {
        let mut u = vec![0.0; cells];
        for slot in u.iter_mut() {
            *slot = levels[code % levels.len()];
            code /= levels.len();
        }
        u
    };
    let (best_code, min_max_residual) = (0..candidates)
        .into_par_iter()
        .map(|code| {
            let u = decode(code);
            let worst = weights
                .iter()
                .zip(&terms)
                .map(|(w, &(rhs, norm))| {
                    let lhs: f64 = w.iter().zip(&u).map(|(a, b)| a * b).sum();
                    (lhs - rhs).abs() / norm
                })
                .fold(0.0, f64::max);
            (code, worst)
        })
        .reduce(
            || (usize::MAX, f64::INFINITY),
            |a, b| {
                if b.1 < a.1 || (b.1 == a.1 && b.0 < a.0) {
                    b
                } else {
                    a
                }
            },
        );
    Ok(CandidateSearch {
        cells,
        levels: levels.to_vec(),
        candidates,
        min_max_residual,
        best: decode(best_code),
    })
}

/// Inverse-frame constant of the panel on strip-constant functions: if two
/// such candidates both verify with residual at most `t`, their `L^1`
/// distance is at most `C t`.
///
/// With `A_jc = int_{strip c} phi_j / ||phi_j||_{W^{m,1}}`, the difference `w`
/// satisfies `|A w|_inf <= 2t`, hence
/// `||w||_1 = |strip| |w|_1 <= |strip| sqrt(M) |w|_2 <= 2 |strip| sqrt(M K) t / sigma_min(A)`.
pub fn uniqueness_constant(panel: &TestFunctionPanel, order: usize, cells: usize) -> Result<f64> {
    let weights = panel.strip_weights(cells)?;
    let norms = (0..panel.len())
        .map(|j| panel.sobolev_l1_norm(j, order))
        .collect::<Result<Vec<f64>>>()?;
    let k = panel.len();
    let a = DMatrix::from_fn(k, cells, |j, c| weights[j][c] / norms[j]);
    let sigma_min = a
        .singular_values()
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    if k < cells || sigma_min <= 0.0 {
        return Ok(f64::INFINITY);
    }
    let domain = panel.grid().domain();
    let strip = domain.measure() / cells as f64;
    Ok(2.0 * strip * ((cells * k) as f64).sqrt() / sigma_min)
}

/// `D_alpha (phi_eps * f)`, trusted on the eps-eroded interior.
pub fn estimate_weak_derivative(
    f: &GridFunction,
    alpha: &MultiIndex,
    epsilon: f64,
) -> Result<Mollified> {
    check_alpha(alpha, f.grid().dim())?;
    let m = MollifierElement::standard(f.grid().dim(), epsilon)?;
    convolve_derivative(&m, alpha.components(), f)
}

/// Sup over the trusted interior of `|D_alpha (phi_eps * f) - phi_eps * u|`.
pub fn mollify_commutes(
    f: &GridFunction,
    u: &GridFunction,
    alpha: &MultiIndex,
    epsilon: f64,
) -> Result<f64> {
    let estimated = estimate_weak_derivative(f, alpha, epsilon)?;
    let m = MollifierElement::standard(f.grid().dim(), epsilon)?;
    let smoothed_u = convolve(&m, u)?;
    estimated.sup_distance(&smoothed_u.function)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{BoxDomain, Grid, SymbolicFunction};

    fn setup(n: usize) -> (Grid, TestFunctionPanel) {
        let g = Grid::uniform(BoxDomain::interval(-1.0, 1.0).unwrap(), n).unwrap();
        let panel = TestFunctionPanel::new(&g, 32, 0).unwrap();
        (g, panel)
    }

    fn d1() -> MultiIndex {
        MultiIndex::new(&[1]).unwrap()
    }

    #[test]
    fn line_has_unit_derivative() {
        let (g, panel) = setup(512);
        let f = SymbolicFunction::linear().sample(&g).unwrap();
        let u = SymbolicFunction::constant(1.0).sample(&g).unwrap();
        assert!(
            verify_weak_derivative(&f, &u, &d1(), &panel)
                .unwrap()
                .max_residual
                < 1e-3
        );
    }

    #[test]
    fn abs_has_sign_derivative() {
        let (g, panel) = setup(512);
        let f = SymbolicFunction::abs().sample(&g).unwrap();
        let u = SymbolicFunction::sign(0.0).sample(&g).unwrap();
        assert!(
            verify_weak_derivative(&f, &u, &d1(), &panel)
                .unwrap()
                .max_residual
                < 1e-3
        );
    }

    #[test]
    fn heaviside_zero_candidate_fails() {
        let (g, panel) = setup(512);
        let f = SymbolicFunction::heaviside(0.0).sample(&g).unwrap();
        let u = GridFunction::constant(&g, 0.0).unwrap();
        let r = verify_weak_derivative(&f, &u, &d1(), &panel).unwrap();
        assert!(r.max_residual > 0.1, "{}", r.max_residual);
        // the worst member covers the jump
        let (c, rad) = panel.bump(r.worst_member);
        assert!((c[0]).abs() < rad);
    }

    #[test]
    fn second_derivative_of_cubic() {
        let (g, panel) = setup(512);
        let f = SymbolicFunction::polynomial(&[0.0, 0.0, 0.0, 1.0])
            .sample(&g)
            .unwrap();
        let u = SymbolicFunction::polynomial(&[0.0, 6.0])
            .sample(&g)
            .unwrap();
        let alpha = MultiIndex::new(&[2]).unwrap();
        assert!(
            verify_weak_derivative(&f, &u, &alpha, &panel)
                .unwrap()
                .max_residual
                < 1e-3
        );
    }

    #[test]
    fn estimated_derivative_of_line() {
        let (g, _) = setup(512);
        let f = SymbolicFunction::linear().sample(&g).unwrap();
        let one = GridFunction::constant(&g, 1.0).unwrap();
        let est = estimate_weak_derivative(&f, &d1(), 0.1).unwrap();
        assert!(est.sup_distance(&one).unwrap() < 1e-2);
    }

    #[test]
    fn under_resolved_derivative_rejected() {
        let (g, _) = setup(64);
        let f = SymbolicFunction::linear().sample(&g).unwrap();
        assert!(matches!(
            estimate_weak_derivative(&f, &MultiIndex::new(&[2]).unwrap(), 0.2),
            Err(Error::UnderResolved { required: 16, .. })
        ));
    }

    #[test]
    fn commutation_for_abs() {
        let (g, _) = setup(512);
        let f = SymbolicFunction::abs().sample(&g).unwrap();
        let u = SymbolicFunction::sign(0.0).sample(&g).unwrap();
        assert!(mollify_commutes(&f, &u, &d1(), 0.1).unwrap() < 1e-2);
    }
}
