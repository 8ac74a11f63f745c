use serde::{Deserialize, Serialize};

use crate::domain::GridFunction;
use crate::error::{Error, Result};

/// Default lower bound on `ess inf |f|` for the reciprocal to be taken.
pub const DEFAULT_ETA: f64 = 1e-6;

/// `f*(x) = 1 / f(x)`, defined only when `ess inf |f| >= eta`.
pub fn involution(f: &GridFunction, eta: f64) -> Result<GridFunction> {
    let ess_inf = f.min_abs();
    if ess_inf.is_nan() || eta.is_nan() || ess_inf < eta {
        return Err(Error::InvolutionUndefined { ess_inf, eta });
    }
    f.map(|v| 1.0 / v)
}

/// Largest relative nodewise gap `|f** - f| / max |f|`.
///
/// The reciprocal is correctly rounded, so each application perturbs a
/// node by at most half an ulp; the round trip stays within a few ulps.
pub fn involutivity_defect(f: &GridFunction, eta: f64) -> Result<f64> {
    let back = involution(&involution(f, eta)?, eta)?;
    let scale = f.max_abs();
    let gap = back
        .values()
        .iter()
        .zip(f.values())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    Ok(if scale > 0.0 { gap / scale } else { gap })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StarCheck {
    /// `max |(f g)* - g* f*|` over nodes.
    pub discrepancy: f64,
    /// `max |(f g)*|`, the magnitude the discrepancy is measured against.
    pub scale: f64,
}

impl StarCheck {
    pub fn relative(&self) -> f64 {
        if self.scale > 0.0 {
            self.discrepancy / self.scale
        } else {
            self.discrepancy
        }
    }
}

/// Nodewise `(f g)* = g* f*`.
pub fn star_antihom_check(f: &GridFunction, g: &GridFunction, eta: f64) -> Result<StarCheck> {
    let f_star = involution(f, eta)?;
    let g_star = involution(g, eta)?;
    let lhs = involution(&f.mul(g)?, eta * eta)?;
    let rhs = g_star.mul(&f_star)?;
    let discrepancy = lhs
        .values()
        .iter()
        .zip(rhs.values())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    Ok(StarCheck {
        discrepancy,
        scale: lhs.max_abs(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{BoxDomain, Grid, SymbolicFunction};

    fn grid() -> Grid {
        Grid::uniform(BoxDomain::interval(-1.0, 1.0).unwrap(), 512).unwrap()
    }

    fn two_plus_bump(c: f64) -> GridFunction {
        SymbolicFunction::sum(vec![
            SymbolicFunction::constant(c),
            SymbolicFunction::bump(&[0.0], 0.5),
        ])
        .sample(&grid())
        .unwrap()
    }

    #[test]
    fn reciprocal_of_constant() {
        let f = GridFunction::constant(&grid(), 2.0).unwrap();
        assert!(involution(&f, DEFAULT_ETA)
            .unwrap()
            .values()
            .iter()
            .all(|&v| v == 0.5));
    }

    #[test]
    fn reciprocal_of_shifted_bump() {
        let f = two_plus_bump(2.0);
        let star = involution(&f, DEFAULT_ETA).unwrap();
        for (a, b) in star.values().iter().zip(f.values()) {
            assert_eq!(*a, 1.0 / b);
        }
        assert!(involutivity_defect(&f, DEFAULT_ETA).unwrap() <= 1e-12);
    }

    #[test]
    fn abs_has_no_involution() {
        let g = Grid::uniform(BoxDomain::interval(-1.0, 1.0).unwrap(), 1 << 22).unwrap();
        let f = SymbolicFunction::abs().sample(&g).unwrap();
        assert!(matches!(
            involution(&f, DEFAULT_ETA),
            Err(Error::InvolutionUndefined { .. })
        ));
    }

    #[test]
    fn anti_homomorphism() {
        let g = grid();
        let c = |v| GridFunction::constant(&g, v).unwrap();
        assert_eq!(
            star_antihom_check(&c(2.0), &c(3.0), DEFAULT_ETA)
                .unwrap()
                .discrepancy,
            0.0
        );
        assert_eq!(
            star_antihom_check(&c(-1.0), &c(-1.0), DEFAULT_ETA)
                .unwrap()
                .discrepancy,
            0.0
        );
        let r = star_antihom_check(&two_plus_bump(2.0), &two_plus_bump(3.0), DEFAULT_ETA).unwrap();
        assert!(r.relative() <= 1e-12);
    }
}
