//! Sobolev membership from the local singularity model, cross-checked
//! numerically.
//!
//! Near a site of degree `d` (locally `|x - x0|^d`, possibly times a jump)
//! an order-`j` derivative behaves like `|x - x0|^(d - j)`. It exists as a
//! locally integrable function iff `j - d < m`, `m` the codimension of the
//! site, and additionally, at a jump, iff the order-`(j - 1)` derivative is
//! still continuous there (`j < d + 1`). It lies in `L^p` iff
//! `(j - d) p < m`, or `j - d <= 0` for `p = inf`.

use serde::{Deserialize, Serialize};

use super::multi_index::MultiIndex;
use crate::domain::{
    norm_growth, BoxDomain, ClassicalDerivative, Grid, Locus, SymbolicFunction, Verdict,
};
use crate::error::{Error, Result};

/// Half-width of the band around the critical exponent that is reported as marginal.
pub const MARGINAL_BAND: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Membership {
    Member,
    NonMember,
    Marginal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderCheck {
    pub order: usize,
    pub weak_exists: bool,
    /// Largest `(j - d) p - m` over the singular sites (`j - d` for
    /// `p = inf`); `None` when there are no singular sites.
    pub criterion: Option<f64>,
    pub analytic: Membership,
    /// Worst `norm_growth` verdict over the classical derivatives of this order.
    pub numeric: Option<Verdict>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MembershipReport {
    pub k: usize,
    pub p: f64,
    pub verdict: Membership,
    pub orders: Vec<OrderCheck>,
    /// Every decisive analytic verdict matched its numeric counterpart.
    pub numeric_agrees: bool,
}

fn site_relevant(locus: &Locus, domain: &BoxDomain) -> bool {
    match locus {
        Locus::Point(x) => {
            let inside_closed = domain
                .axes()
                .iter()
                .zip(x)
                .all(|(&(a, b), &v)| a <= v && v <= b);
            // on a 1-D boundary point the function is smooth on the open side
            inside_closed && (domain.dim() == 2 || domain.contains_interior(x))
        }
        Locus::Hyperplane { axis, offset } => {
            let (a, b) = domain.axes()[*axis];
            a < *offset && *offset < b
        }
    }
}

/// Analytic verdict per order `0..=k`.
pub fn analytic_membership(
    f: &SymbolicFunction,
    k: usize,
    p: f64,
    domain: &BoxDomain,
) -> Result<Vec<OrderCheck>> {
    if p.is_nan() || p < 1.0 {
        return Err(Error::InvalidExponent(p));
    }
    if k > crate::domain::radial::MAX_ORDER {
        return Err(Error::OrderUnsupported { order: k });
    }
    f.validate(domain)?;
    let dim = domain.dim();
    let sing = f.singularities(dim);
    if sing.ambiguous {
        return Err(Error::UnsupportedFamily(format!(
            "{f}: singular terms share a locus and may cancel"
        )));
    }
    let sites: Vec<_> = sing
        .sites
        .iter()
        .filter(|s| !s.is_smooth() && site_relevant(&s.locus, domain))
        .collect();
    let mut out = Vec::with_capacity(k + 1);
    let mut lower_failed = false;
    for j in 0..=k {
        let jf = j as f64;
        let mut weak_exists = !lower_failed;
        let mut criterion: Option<f64> = None;
        let mut marginal = false;
        let mut fails = false;
        for s in &sites {
            let m = s.locus.codimension(dim) as f64;
            let strength = jf - s.degree;
            if strength >= m || (s.jump && j > 0 && jf >= s.degree + 1.0) {
                weak_exists = false;
            }
            let c = if p.is_infinite() {
                strength
            } else {
                strength * p - m
            };
            criterion = Some(criterion.map_or(c, |prev: f64| prev.max(c)));
            if p.is_infinite() {
                fails |= strength > 0.0;
            } else if c.abs() <= MARGINAL_BAND + 1e-9 {
                marginal = true;
            } else if c > 0.0 {
                fails = true;
            }
        }
        let analytic = if !weak_exists || fails {
            Membership::NonMember
        } else if marginal {
            Membership::Marginal
        } else {
            Membership::Member
        };
        lower_failed |= !weak_exists;
        out.push(OrderCheck {
            order: j,
            weak_exists,
            criterion,
            analytic,
            numeric: None,
        });
    }
    Ok(out)
}

fn worst(a: Verdict, b: Verdict) -> Verdict {
    use Verdict::*;
    match (a, b) {
        (Divergent, _) | (_, Divergent) => Divergent,
        (Marginal, _) | (_, Marginal) => Marginal,
        _ => Integrable,
    }
}

/// `f in W^{k,p}`: analytic criterion per order, cross-checked by
/// [`norm_growth`] of the classical derivatives on `ladder` wherever the
/// weak derivative exists.
pub fn sobolev_membership(
    f: &SymbolicFunction,
    k: usize,
    p: f64,
    ladder: &[Grid],
) -> Result<MembershipReport> {
    let domain = ladder
        .first()
        .ok_or_else(|| Error::InvalidLadder("empty ladder".into()))?
        .domain()
        .clone();
    let mut orders = analytic_membership(f, k, p, &domain)?;
    let mut agrees = true;
    for check in orders.iter_mut().filter(|c| c.weak_exists) {
        let mut verdict = Verdict::Integrable;
        for alpha in MultiIndex::up_to(domain.dim(), check.order)?
            .into_iter()
            .filter(|a| a.order() == check.order)
        {
            let field = ClassicalDerivative {
                function: f,
                alpha: alpha.components().to_vec(),
            };
            verdict = worst(verdict, norm_growth(&field, p, ladder)?.verdict);
        }
        check.numeric = Some(verdict);
        agrees &= match check.analytic {
            Membership::Member => verdict == Verdict::Integrable,
            Membership::NonMember => verdict == Verdict::Divergent,
            Membership::Marginal => true,
        };
    }
    let verdict = if orders.iter().any(|o| o.analytic == Membership::NonMember) {
        Membership::NonMember
    } else if orders.iter().any(|o| o.analytic == Membership::Marginal) {
        Membership::Marginal
    } else {
        Membership::Member
    };
    Ok(MembershipReport {
        k,
        p,
        verdict,
        orders,
        numeric_agrees: agrees,
    })
}

/// Default refinement ladder: `2^7 ..= 2^13` nodes in 1-D, `2^5 ..= 2^9` per axis in 2-D.
pub fn default_ladder(domain: &BoxDomain) -> Result<Vec<Grid>> {
    match domain.dim() {
        1 => Grid::dyadic_ladder(domain, 7, 13),
        _ => Grid::dyadic_ladder(domain, 5, 9),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line() -> BoxDomain {
        BoxDomain::interval(-1.0, 1.0).unwrap()
    }

    fn verdict(f: SymbolicFunction, k: usize, p: f64) -> MembershipReport {
        sobolev_membership(&f, k, p, &default_ladder(&line()).unwrap()).unwrap()
    }

    #[test]
    fn power_with_derivative_is_not_a_member() {
        let r = verdict(SymbolicFunction::power(&[0.0], 0.4), 1, 2.0);
        assert_eq!(r.verdict, Membership::NonMember);
        assert_eq!(r.orders[0].analytic, Membership::Member);
        assert!(!r.orders[1].weak_exists);
        assert!(r.numeric_agrees);
    }

    #[test]
    fn abs_is_w1p() {
        for p in [1.0, 2.0, 4.0, f64::INFINITY] {
            let r = verdict(SymbolicFunction::abs(), 1, p);
            assert_eq!(r.verdict, Membership::Member, "p={p}");
            assert!(r.numeric_agrees, "p={p}: {r:?}");
        }
        assert_eq!(
            verdict(SymbolicFunction::abs(), 2, 2.0).verdict,
            Membership::NonMember
        );
    }

    #[test]
    fn heaviside_has_no_weak_derivative() {
        for p in [1.0, 2.0] {
            let r = verdict(SymbolicFunction::heaviside(0.0), 1, p);
            assert_eq!(r.verdict, Membership::NonMember);
            assert_eq!(r.orders[0].analytic, Membership::Member);
        }
    }

    #[test]
    fn smooth_families_are_members() {
        for f in [
            SymbolicFunction::bump(&[0.0], 0.5),
            SymbolicFunction::polynomial(&[1.0, -2.0, 0.5]),
            SymbolicFunction::constant(4.0),
            SymbolicFunction::abs().times(&SymbolicFunction::abs()),
        ] {
            let r = verdict(f.clone(), 3, 2.0);
            assert_eq!(r.verdict, Membership::Member, "{f}");
            assert!(r.numeric_agrees, "{f}");
        }
    }

    #[test]
    fn marginal_band() {
        let r = verdict(SymbolicFunction::power(&[0.0], 0.49), 0, 2.0);
        assert_eq!(r.verdict, Membership::Marginal);
    }

    #[test]
    fn two_dimensional_abs_has_second_derivatives_below_p_two() {
        let d = BoxDomain::square(-1.0, 1.0).unwrap();
        let checks = analytic_membership(&SymbolicFunction::abs(), 2, 1.5, &d).unwrap();
        assert!(checks.iter().all(|c| c.analytic == Membership::Member));
        let checks = analytic_membership(&SymbolicFunction::abs(), 2, 2.5, &d).unwrap();
        assert_eq!(checks[2].analytic, Membership::NonMember);
    }

    #[test]
    fn cancelling_sums_are_unsupported() {
        let f = SymbolicFunction::sum(vec![
            SymbolicFunction::power(&[0.0], 0.3),
            SymbolicFunction::power(&[0.0], 0.3).times(&SymbolicFunction::constant(-1.0)),
        ]);
        assert!(matches!(
            analytic_membership(&f, 0, 2.0, &line()),
            Err(Error::UnsupportedFamily(_))
        ));
    }
}
