//! Parameterized analytic function families.
//!
//! Besides pointwise evaluation, every family knows its classical (almost
//! everywhere) partial derivatives up to order three and the shape of its
//! singularities, which is what the analytic integrability and Sobolev
//! membership criteria are computed from.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::function::GridFunction;
use super::grid::{BoxDomain, Grid};
use super::radial;
use crate::error::{Error, Result};

/// One analytic function on a box in one or two dimensions.
///
/// `Polynomial`, `Sign` and `Heaviside` depend on the first coordinate only;
/// `Abs` is the Euclidean norm `|x|`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum SymbolicFunction {
    Constant {
        value: f64,
    },
    /// Ascending coefficients in `x_1`.
    Polynomial {
        coeffs: Vec<f64>,
    },
    Abs,
    Sign {
        center: f64,
    },
    Heaviside {
        center: f64,
    },
    /// `|x - center|^(-exponent)`.
    Power {
        center: Vec<f64>,
        exponent: f64,
    },
    /// `exp(-1 / (1 - |x - center|^2 / radius^2))` inside the ball, zero outside.
    Bump {
        center: Vec<f64>,
        radius: f64,
    },
    Sum {
        terms: Vec<SymbolicFunction>,
    },
    Product {
        factors: Vec<SymbolicFunction>,
    },
}

/// Where a singularity lives.
#[derive(Debug, Clone, PartialEq)]
pub enum Locus {
    Point(Vec<f64>),
    /// The hyperplane `x_axis = offset`.
    Hyperplane {
        axis: usize,
        offset: f64,
    },
}

impl Locus {
    fn same_as(&self, other: &Locus) -> bool {
        match (self, other) {
            (Locus::Point(a), Locus::Point(b)) => {
                a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() < 1e-12)
            }
            (
                Locus::Hyperplane { axis: a, offset: x },
                Locus::Hyperplane { axis: b, offset: y },
            ) => a == b && (x - y).abs() < 1e-12,
            _ => false,
        }
    }

    /// Whether the locus meets the open ball `B(center, radius)`.
    pub fn meets_ball(&self, center: &[f64], radius: f64) -> bool {
        match self {
            Locus::Point(x) => {
                x.iter()
                    .zip(center)
                    .map(|(a, b)| (a - b).powi(2))
                    .sum::<f64>()
                    < radius * radius
            }
            Locus::Hyperplane { axis, offset } => (offset - center[*axis]).abs() < radius,
        }
    }

    /// Codimension of the locus, which plays the role of the dimension in the
    /// local integrability criterion `|x|^(-s)` in `L^1_loc` iff `s < codim`.
    pub fn codimension(&self, dim: usize) -> usize {
        match self {
            Locus::Point(_) => dim,
            Locus::Hyperplane { .. } => 1,
        }
    }
}

/// Local model `|x - locus|^degree`, optionally with a jump across the locus.
#[derive(Debug, Clone, PartialEq)]
pub struct Site {
    pub locus: Locus,
    pub degree: f64,
    pub jump: bool,
}

impl Site {
    /// Even non-negative integer degrees without a jump are polynomial, hence smooth.
    pub fn is_smooth(&self) -> bool {
        !self.jump
            && self.degree >= 0.0
            && self.degree.fract() == 0.0
            && (self.degree as i64) % 2 == 0
    }
}

/// Singularity structure of a function.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Singularities {
    /// The function vanishes identically.
    pub zero: bool,
    pub sites: Vec<Site>,
    /// Two singular terms share a locus in a way that may cancel.
    pub ambiguous: bool,
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

impl SymbolicFunction {
    pub fn constant(value: f64) -> Self {
        Self::Constant { value }
    }

    pub fn polynomial(coeffs: &[f64]) -> Self {
        Self::Polynomial {
            coeffs: coeffs.to_vec(),
        }
    }

    /// The identity `x -> x_1`.
    pub fn linear() -> Self {
        Self::polynomial(&[0.0, 1.0])
    }

    pub fn abs() -> Self {
        Self::Abs
    }

    pub fn sign(center: f64) -> Self {
        Self::Sign { center }
    }

    pub fn heaviside(center: f64) -> Self {
        Self::Heaviside { center }
    }

    pub fn power(center: &[f64], exponent: f64) -> Self {
        Self::Power {
            center: center.to_vec(),
            exponent,
        }
    }

    pub fn bump(center: &[f64], radius: f64) -> Self {
        Self::Bump {
            center: center.to_vec(),
            radius,
        }
    }

    pub fn sum(terms: Vec<SymbolicFunction>) -> Self {
        Self::Sum { terms }
    }

    /// Product with symbolic folding: constants are multiplied out, unit
    /// constants dropped and powers sharing a center add their exponents.
    pub fn product(factors: Vec<SymbolicFunction>) -> Self {
        let mut flat = Vec::new();
        let mut stack: Vec<SymbolicFunction> = factors.into_iter().rev().collect();
        while let Some(f) = stack.pop() {
            match f {
                Self::Product { factors } => stack.extend(factors.into_iter().rev()),
                other => flat.push(other),
            }
        }
        let mut constant = 1.0;
        let mut powers: Vec<(Vec<f64>, f64)> = Vec::new();
        // (center, number of sign factors, any heaviside factor)
        let mut jumps: Vec<(f64, usize, bool)> = Vec::new();
        let mut rest = Vec::new();
        for f in flat {
            match f {
                Self::Constant { value } => constant *= value,
                Self::Sign { center } | Self::Heaviside { center } => {
                    let heaviside = matches!(f, Self::Heaviside { .. });
                    match jumps.iter_mut().find(|(c, _, _)| *c == center) {
                        Some((_, signs, h)) => {
                            *signs += usize::from(!heaviside);
                            *h |= heaviside;
                        }
                        None => jumps.push((center, usize::from(!heaviside), heaviside)),
                    }
                }
                Self::Power { center, exponent } => {
                    match powers.iter_mut().find(|(c, _)| *c == center) {
                        Some((_, a)) => *a += exponent,
                        None => powers.push((center, exponent)),
                    }
                }
                other => rest.push(other),
            }
        }
        let mut out = Vec::new();
        if constant != 1.0 {
            out.push(Self::constant(constant));
        }
        out.extend(
            powers
                .into_iter()
                .map(|(center, exponent)| Self::Power { center, exponent }),
        );
        // sign^2 = 1 and sign * H = H at a shared jump
        for (center, signs, heaviside) in jumps {
            if heaviside {
                out.push(Self::heaviside(center));
            } else if signs % 2 == 1 {
                out.push(Self::sign(center));
            }
        }
        out.extend(rest);
        match out.len() {
            0 => Self::constant(1.0),
            1 => out.pop().unwrap(),
            _ => Self::Product { factors: out },
        }
    }

    pub fn times(&self, other: &SymbolicFunction) -> Self {
        Self::product(vec![self.clone(), other.clone()])
    }

    /// `(center, exponent)` when this is a single power singularity.
    pub fn as_power(&self) -> Option<(&[f64], f64)> {
        match self {
            Self::Power { center, exponent } => Some((center, *exponent)),
            _ => None,
        }
    }

    /// Checks parameters against the domain.
    pub fn validate(&self, domain: &BoxDomain) -> Result<()> {
        let dim = domain.dim();
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        match self {
            Self::Constant { value } if !value.is_finite() => bad("non-finite constant".into()),
            Self::Polynomial { coeffs } if coeffs.iter().any(|c| !c.is_finite()) => {
                bad("non-finite polynomial coefficient".into())
            }
            Self::Sign { center } | Self::Heaviside { center } => {
                let (a, b) = domain.axes()[0];
                if !(a < *center && *center < b) {
                    return bad(format!("jump at {center} outside ({a}, {b})"));
                }
                Ok(())
            }
            Self::Power { center, exponent } => {
                if center.len() != dim {
                    return bad(format!(
                        "power center has {} coordinates, domain has {dim}",
                        center.len()
                    ));
                }
                if !(exponent.is_finite() && *exponent >= 0.0) {
                    return bad(format!("power exponent {exponent} must be >= 0"));
                }
                if !domain.contains_interior(center) {
                    return bad(format!("power center {center:?} outside the domain"));
                }
                Ok(())
            }
            Self::Bump { center, radius } => {
                if center.len() != dim {
                    return bad(format!(
                        "bump center has {} coordinates, domain has {dim}",
                        center.len()
                    ));
                }
                if !(radius.is_finite() && *radius > 0.0) {
                    return bad(format!("bump radius {radius} must be positive"));
                }
                let inside = domain
                    .axes()
                    .iter()
                    .zip(center)
                    .all(|(&(a, b), &c)| a <= c - radius && c + radius <= b);
                if !inside {
                    return bad(format!("bump support around {center:?} leaves the domain"));
                }
                Ok(())
            }
            Self::Sum { terms } => terms.iter().try_for_each(|t| t.validate(domain)),
            Self::Product { factors } => factors.iter().try_for_each(|t| t.validate(domain)),
            _ => Ok(()),
        }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.derivative(&[], x).unwrap_or(f64::NAN)
    }

    /// Classical partial derivative `D_alpha f(x)`, valid away from the
    /// singular loci. `None` when `|alpha| > 3`.
    pub fn derivative(&self, alpha: &[usize], x: &[f64]) -> Option<f64> {
        let order: usize = alpha.iter().sum();
        if order > radial::MAX_ORDER {
            return None;
        }
        let along = |axis: usize| alpha.get(axis).copied().unwrap_or(0);
        let only_first_axis = alpha.iter().skip(1).all(|&k| k == 0);
        Some(match self {
            Self::Constant { value } => {
                if order == 0 {
                    *value
                } else {
                    0.0
                }
            }
            Self::Polynomial { coeffs } => {
                if !only_first_axis {
                    return Some(0.0);
                }
                let j = along(0);
                let t = x[0];
                coeffs
                    .iter()
                    .enumerate()
                    .skip(j)
                    .map(|(k, &c)| {
                        let falling = (0..j).fold(1.0, |m, i| m * (k - i) as f64);
                        c * falling * t.powi((k - j) as i32)
                    })
                    .sum()
            }
            Self::Sign { center } | Self::Heaviside { center } => {
                if order > 0 {
                    return Some(0.0);
                }
                let d = x[0] - center;
                match self {
                    Self::Sign { .. } => {
                        if d > 0.0 {
                            1.0
                        } else if d < 0.0 {
                            -1.0
                        } else {
                            0.0
                        }
                    }
                    _ => {
                        if d >= 0.0 {
                            1.0
                        } else {
                            0.0
                        }
                    }
                }
            }
            Self::Abs => {
                let s: f64 = x.iter().map(|v| v * v).sum();
                radial::partial(&radial::power_derivs(s, 0.5), x, &radial::axes_of(alpha))
            }
            Self::Power { center, exponent } => {
                if *exponent == 0.0 {
                    return Some(if order == 0 { 1.0 } else { 0.0 });
                }
                let y: Vec<f64> = x.iter().zip(center).map(|(a, c)| a - c).collect();
                let s: f64 = y.iter().map(|v| v * v).sum();
                radial::partial(
                    &radial::power_derivs(s, -0.5 * exponent),
                    &y,
                    &radial::axes_of(alpha),
                )
            }
            Self::Bump { center, radius } => {
                let y: Vec<f64> = x.iter().zip(center).map(|(a, c)| a - c).collect();
                let s: f64 = y.iter().map(|v| v * v).sum();
                radial::partial(
                    &radial::bump_derivs(s, *radius),
                    &y,
                    &radial::axes_of(alpha),
                )
            }
            Self::Sum { terms } => {
                let mut acc = 0.0;
                for t in terms {
                    acc += t.derivative(alpha, x)?;
                }
                acc
            }
            Self::Product { factors } => return leibniz(factors, alpha, x),
        })
    }

    /// Samples at the grid midpoints, annotating singular loci.
    pub fn sample(&self, grid: &Grid) -> Result<GridFunction> {
        self.sample_derivative(&[], grid)
    }

    /// Samples the classical derivative `D_alpha f` at the grid midpoints.
    pub fn sample_derivative(&self, alpha: &[usize], grid: &Grid) -> Result<GridFunction> {
        self.validate(grid.domain())?;
        let d = grid.dim();
        let mut values = Vec::with_capacity(grid.len());
        for p in grid.points() {
            let v =
                self.derivative(alpha, &p[..d])
                    .ok_or_else(|| Error::DerivativeUnavailable {
                        alpha: alpha.to_vec(),
                        reason: "order above 3".into(),
                    })?;
            values.push(v);
        }
        let singular = self.singular_points(grid.domain());
        Ok(GridFunction::new(grid.clone(), values)?.with_singular_points(singular))
    }

    /// Points flagged as potential non-integrable singularities: power centers
    /// and jump locations (hyperplanes are represented by their intersection
    /// with the box's central axis).
    pub fn singular_points(&self, domain: &BoxDomain) -> Vec<Vec<f64>> {
        let mut out: Vec<Vec<f64>> = Vec::new();
        let mut push = |p: Vec<f64>| {
            if !out.contains(&p) {
                out.push(p)
            }
        };
        match self {
            Self::Power { center, exponent } if *exponent > 0.0 => push(center.clone()),
            Self::Sign { center } | Self::Heaviside { center } => {
                let mut p: Vec<f64> = domain.axes().iter().map(|(a, b)| 0.5 * (a + b)).collect();
                p[0] = *center;
                push(p);
            }
            Self::Sum { terms: fs } | Self::Product { factors: fs } => {
                for f in fs {
                    for p in f.singular_points(domain) {
                        push(p);
                    }
                }
            }
            _ => {}
        }
        out
    }

    fn is_identically_zero(&self) -> bool {
        match self {
            Self::Constant { value } => *value == 0.0,
            Self::Polynomial { coeffs } => coeffs.iter().all(|&c| c == 0.0),
            _ => false,
        }
    }

    /// Local singularity model used by the analytic criteria.
    pub fn singularities(&self, dim: usize) -> Singularities {
        let point = |c: Vec<f64>| Locus::Point(c);
        let jump_locus = |center: f64| {
            if dim == 1 {
                Locus::Point(vec![center])
            } else {
                Locus::Hyperplane {
                    axis: 0,
                    offset: center,
                }
            }
        };
        if self.is_identically_zero() {
            return Singularities {
                zero: true,
                ..Default::default()
            };
        }
        match self {
            Self::Power { center, exponent } if *exponent > 0.0 => Singularities {
                sites: vec![Site {
                    locus: point(center.clone()),
                    degree: -exponent,
                    jump: false,
                }],
                ..Default::default()
            },
            Self::Abs => Singularities {
                sites: vec![Site {
                    locus: point(vec![0.0; dim]),
                    degree: 1.0,
                    jump: false,
                }],
                ..Default::default()
            },
            Self::Sign { center } | Self::Heaviside { center } => Singularities {
                sites: vec![Site {
                    locus: jump_locus(*center),
                    degree: 0.0,
                    jump: true,
                }],
                ..Default::default()
            },
            Self::Product { factors } => {
                let parts: Vec<Singularities> =
                    factors.iter().map(|f| f.singularities(dim)).collect();
                if parts.iter().any(|p| p.zero) {
                    return Singularities {
                        zero: true,
                        ..Default::default()
                    };
                }
                // a bump factor vanishes near every site outside its support
                let supports: Vec<(&[f64], f64)> = factors
                    .iter()
                    .filter_map(|f| match f {
                        Self::Bump { center, radius } => Some((center.as_slice(), *radius)),
                        _ => None,
                    })
                    .collect();
                let mut out = Singularities::default();
                for part in parts {
                    out.ambiguous |= part.ambiguous;
                    for site in part.sites {
                        if supports.iter().any(|&(c, r)| !site.locus.meets_ball(c, r)) {
                            continue;
                        }
                        match out.sites.iter_mut().find(|s| s.locus.same_as(&site.locus)) {
                            Some(s) => {
                                if s.jump && site.jump {
                                    // e.g. sign * sign = 1
                                    out.ambiguous = true;
                                }
                                s.degree += site.degree;
                                s.jump |= site.jump;
                            }
                            None => out.sites.push(site),
                        }
                    }
                }
                out
            }
            Self::Sum { terms } => {
                let parts: Vec<Singularities> = terms
                    .iter()
                    .map(|f| f.singularities(dim))
                    .filter(|p| !p.zero)
                    .collect();
                if parts.is_empty() {
                    return Singularities {
                        zero: true,
                        ..Default::default()
                    };
                }
                let mut out = Singularities::default();
                for part in parts {
                    out.ambiguous |= part.ambiguous;
                    for site in part.sites {
                        match out.sites.iter_mut().find(|s| s.locus.same_as(&site.locus)) {
                            Some(s) => {
                                out.ambiguous = true;
                                s.degree = s.degree.min(site.degree);
                                s.jump |= site.jump;
                            }
                            None => out.sites.push(site),
                        }
                    }
                }
                out
            }
            _ => Singularities::default(),
        }
    }
}

fn leibniz(factors: &[SymbolicFunction], alpha: &[usize], x: &[f64]) -> Option<f64> {
    match factors {
        [] => Some(if alpha.iter().all(|&k| k == 0) {
            1.0
        } else {
            0.0
        }),
        [f] => f.derivative(alpha, x),
        [f, rest @ ..] => {
            let a0 = alpha.first().copied().unwrap_or(0);
            let a1 = alpha.get(1).copied().unwrap_or(0);
            let mut acc = 0.0;
            for b0 in 0..=a0 {
                for b1 in 0..=a1 {
                    let beta: Vec<usize> = [b0, b1][..alpha.len()].to_vec();
                    let gamma: Vec<usize> = [a0 - b0, a1 - b1][..alpha.len()].to_vec();
                    let c = binomial(a0, b0) * binomial(a1, b1);
                    let lhs = f.derivative(&beta, x)?;
                    if lhs == 0.0 {
                        continue;
                    }
                    acc += c * lhs * leibniz(rest, &gamma, x)?;
                }
            }
            Some(acc)
        }
    }
}

fn fmt_point(p: &[f64]) -> String {
    p.iter()
        .map(|c| c.to_string())
        .collect::<Vec<_>>()
        .join(":")
}

impl fmt::Display for SymbolicFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |f: &mut fmt::Formatter<'_>, name: &str, items: &[SymbolicFunction]| {
            write!(f, "{name}(")?;
            for (i, it) in items.iter().enumerate() {
                if i > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{it}")?;
            }
            write!(f, ")")
        };
        match self {
            Self::Constant { value } => write!(f, "const({value})"),
            Self::Polynomial { coeffs } => {
                let c: Vec<String> = coeffs.iter().map(|c| c.to_string()).collect();
                write!(f, "poly({})", c.join(", "))
            }
            Self::Abs => write!(f, "abs"),
            Self::Sign { center } => write!(f, "sign({center})"),
            Self::Heaviside { center } => write!(f, "heaviside({center})"),
            Self::Power { center, exponent } => {
                write!(f, "power({}, {exponent})", fmt_point(center))
            }
            Self::Bump { center, radius } => write!(f, "bump({}, {radius})", fmt_point(center)),
            Self::Sum { terms } => list(f, "sum", terms),
            Self::Product { factors } => list(f, "prod", factors),
        }
    }
}

/// Parses the textual form produced by `Display`, e.g. `power(0, 0.3)`,
/// `bump(0:0, 0.5)` or `sum(const(2), bump(0, 0.5))`.
impl FromStr for SymbolicFunction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut p = Parser {
            src: s.as_bytes(),
            pos: 0,
        };
        let f = p.function()?;
        p.skip_ws();
        if p.pos != p.src.len() {
            return Err(p.error("trailing input"));
        }
        Ok(f)
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

enum Arg {
    Numbers(Vec<f64>),
    Function(SymbolicFunction),
}

impl Parser<'_> {
    fn error(&self, msg: &str) -> Error {
        Error::Parse(format!("{msg} at byte {} of function text", self.pos))
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(&format!("expected '{}'", c as char)))
        }
    }

    fn ident(&mut self) -> Result<String> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len()
            && (self.src[self.pos].is_ascii_alphabetic() || self.src[self.pos] == b'_')
        {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected a function name"));
        }
        Ok(String::from_utf8_lossy(&self.src[start..self.pos]).to_lowercase())
    }

    fn number(&mut self) -> Result<f64> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len()
            && matches!(
                self.src[self.pos],
                b'0'..=b'9' | b'.' | b'-' | b'+' | b'e' | b'E'
            )
        {
            self.pos += 1;
        }
        std::str::from_utf8(&self.src[start..self.pos])
            .ok()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| self.error("expected a number"))
    }

    fn arg(&mut self) -> Result<Arg> {
        match self.peek() {
            Some(c) if c.is_ascii_alphabetic() => Ok(Arg::Function(self.function()?)),
            _ => {
                let mut coords = vec![self.number()?];
                while self.peek() == Some(b':') {
                    self.pos += 1;
                    coords.push(self.number()?);
                }
                Ok(Arg::Numbers(coords))
            }
        }
    }

    fn args(&mut self) -> Result<Vec<Arg>> {
        if self.peek() != Some(b'(') {
            return Ok(Vec::new());
        }
        self.pos += 1;
        let mut out = Vec::new();
        if self.peek() == Some(b')') {
            self.pos += 1;
            return Ok(out);
        }
        loop {
            out.push(self.arg()?);
            match self.peek() {
                Some(b',') => self.pos += 1,
                _ => break,
            }
        }
        self.expect(b')')?;
        Ok(out)
    }

    fn function(&mut self) -> Result<SymbolicFunction> {
        let name = self.ident()?;
        let args = self.args()?;
        let scalar = |a: &Arg| match a {
            Arg::Numbers(v) if v.len() == 1 => Ok(v[0]),
            _ => Err(Error::Parse(format!("{name}: expected a scalar argument"))),
        };
        let point = |a: &Arg| match a {
            Arg::Numbers(v) => Ok(v.clone()),
            _ => Err(Error::Parse(format!("{name}: expected a point argument"))),
        };
        let funcs = |args: Vec<Arg>| {
            args.into_iter()
                .map(|a| match a {
                    Arg::Function(f) => Ok(f),
                    Arg::Numbers(v) if v.len() == 1 => Ok(SymbolicFunction::constant(v[0])),
                    _ => Err(Error::Parse(format!("{name}: expected function arguments"))),
                })
                .collect::<Result<Vec<_>>>()
        };
        let arity = |n: usize| {
            if args.len() == n {
                Ok(())
            } else {
                Err(Error::Parse(format!(
                    "{name} takes {n} arguments, got {}",
                    args.len()
                )))
            }
        };
        match name.as_str() {
            "const" | "constant" => {
                arity(1)?;
                Ok(SymbolicFunction::constant(scalar(&args[0])?))
            }
            "poly" | "polynomial" => {
                let coeffs = args.iter().map(scalar).collect::<Result<Vec<_>>>()?;
                Ok(SymbolicFunction::Polynomial { coeffs })
            }
            "x" | "linear" => {
                arity(0)?;
                Ok(SymbolicFunction::linear())
            }
            "abs" => {
                arity(0)?;
                Ok(SymbolicFunction::Abs)
            }
            "sign" => {
                arity(1)?;
                Ok(SymbolicFunction::sign(scalar(&args[0])?))
            }
            "heaviside" | "step" => {
                arity(1)?;
                Ok(SymbolicFunction::heaviside(scalar(&args[0])?))
            }
            "power" => {
                arity(2)?;
                Ok(SymbolicFunction::power(
                    &point(&args[0])?,
                    scalar(&args[1])?,
                ))
            }
            "bump" => {
                arity(2)?;
                Ok(SymbolicFunction::bump(&point(&args[0])?, scalar(&args[1])?))
            }
            "sum" => Ok(SymbolicFunction::sum(funcs(args)?)),
            "prod" | "product" => Ok(SymbolicFunction::Product {
                factors: funcs(args)?,
            }),
            other => Err(Error::Parse(format!("unknown function family '{other}'"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn sym_grid(n: usize) -> Grid {
        Grid::uniform(BoxDomain::interval(-1.0, 1.0).unwrap(), n).unwrap()
    }

    #[test]
    fn sample_constant_is_constant() {
        let g = Grid::uniform(BoxDomain::interval(0.0, 1.0).unwrap(), 16).unwrap();
        let f = SymbolicFunction::constant(1.0).sample(&g).unwrap();
        assert!(f.values().iter().all(|&v| v == 1.0));
    }

    #[test]
    fn sample_abs_pointwise() {
        let g = sym_grid(32);
        let f = SymbolicFunction::abs().sample(&g).unwrap();
        // node 16 sits at -1 + 16.5/16 = 0.03125
        assert_eq!(g.coordinate(0, 16), 0.03125);
        assert_eq!(f.value_at(16), 0.03125);
    }

    #[test]
    fn sample_power_flags_center() {
        let g = sym_grid(64);
        let f = SymbolicFunction::power(&[0.0], 0.5).sample(&g).unwrap();
        assert_eq!(f.singular_points(), &[vec![0.0]]);
        for (i, p) in g.points().enumerate() {
            assert_abs_diff_eq!(f.value_at(i), p[0].abs().powf(-0.5), epsilon = 1e-12);
        }
    }

    #[test]
    fn power_center_on_node_is_rejected() {
        let g = sym_grid(63);
        assert!(matches!(
            SymbolicFunction::power(&[0.0], 0.5).sample(&g),
            Err(Error::NonFiniteValue { .. })
        ));
    }

    #[test]
    fn parameter_validation() {
        let d = BoxDomain::interval(-1.0, 1.0).unwrap();
        assert!(SymbolicFunction::power(&[0.0], -0.1).validate(&d).is_err());
        assert!(SymbolicFunction::power(&[2.0], 0.1).validate(&d).is_err());
        assert!(SymbolicFunction::bump(&[0.8], 0.5).validate(&d).is_err());
        assert!(SymbolicFunction::bump(&[0.0], 0.5).validate(&d).is_ok());
        assert!(SymbolicFunction::heaviside(1.5).validate(&d).is_err());
    }

    #[test]
    fn polynomial_derivatives() {
        let p = SymbolicFunction::polynomial(&[1.0, 2.0, 3.0, 4.0]);
        let x = [0.5];
        assert_abs_diff_eq!(p.eval(&x), 1.0 + 1.0 + 0.75 + 0.5, epsilon = 1e-14);
        assert_abs_diff_eq!(
            p.derivative(&[1], &x).unwrap(),
            2.0 + 3.0 + 3.0,
            epsilon = 1e-14
        );
        assert_abs_diff_eq!(p.derivative(&[2], &x).unwrap(), 6.0 + 12.0, epsilon = 1e-14);
        assert_abs_diff_eq!(p.derivative(&[3], &x).unwrap(), 24.0, epsilon = 1e-14);
    }

    #[test]
    fn power_derivative_1d_closed_form() {
        let f = SymbolicFunction::power(&[0.0], 0.3);
        for &x in &[-0.7, -0.1, 0.2, 0.9] {
            let expected = -0.3 * f64::signum(x) * x.abs().powf(-1.3);
            assert_abs_diff_eq!(f.derivative(&[1], &[x]).unwrap(), expected, epsilon = 1e-12);
            let second = 0.3 * 1.3 * x.abs().powf(-2.3);
            assert_abs_diff_eq!(f.derivative(&[2], &[x]).unwrap(), second, epsilon = 1e-10);
        }
    }

    #[test]
    fn product_rule_matches_folded_power() {
        let a = SymbolicFunction::power(&[0.0], 0.2);
        let b = SymbolicFunction::Product {
            factors: vec![a.clone(), SymbolicFunction::power(&[0.0], 0.1)],
        };
        let folded = a.times(&SymbolicFunction::power(&[0.0], 0.1));
        assert_eq!(folded, SymbolicFunction::power(&[0.0], 0.30000000000000004));
        for &x in &[-0.4, 0.3] {
            for k in 0..=3 {
                let u = b.derivative(&[k], &[x]).unwrap();
                let v = folded.derivative(&[k], &[x]).unwrap();
                assert!((u - v).abs() < 1e-9 * (1.0 + v.abs()), "k={k}: {u} vs {v}");
            }
        }
    }

    #[test]
    fn folding_rules() {
        let one = SymbolicFunction::constant(1.0);
        let abs = SymbolicFunction::abs();
        assert_eq!(one.times(&abs), abs);
        assert_eq!(
            SymbolicFunction::constant(2.0).times(&SymbolicFunction::constant(3.0)),
            SymbolicFunction::constant(6.0)
        );
    }

    #[test]
    fn singularity_models() {
        let s = SymbolicFunction::power(&[0.0], 0.2)
            .times(&SymbolicFunction::abs())
            .singularities(1);
        assert_eq!(s.sites.len(), 1);
        assert_abs_diff_eq!(s.sites[0].degree, 0.8, epsilon = 1e-12);
        let sq = SymbolicFunction::abs()
            .times(&SymbolicFunction::abs())
            .singularities(1);
        assert!(sq.sites[0].is_smooth());
        let z = SymbolicFunction::constant(0.0)
            .times(&SymbolicFunction::power(&[0.0], 0.9))
            .singularities(1);
        assert!(z.zero);
        let h2 = SymbolicFunction::heaviside(0.0).singularities(2);
        assert_eq!(h2.sites[0].locus.codimension(2), 1);
    }

    #[test]
    fn jump_folding_and_bump_cutoff() {
        let h = SymbolicFunction::heaviside(0.0);
        let s = SymbolicFunction::sign(0.0);
        assert_eq!(h.times(&h), h);
        assert_eq!(s.times(&s), SymbolicFunction::constant(1.0));
        assert_eq!(s.times(&h), h);
        let far = h
            .times(&SymbolicFunction::bump(&[0.5], 0.3))
            .singularities(1);
        assert!(far.sites.is_empty() && !far.ambiguous);
        let near = h
            .times(&SymbolicFunction::bump(&[0.1], 0.3))
            .singularities(1);
        assert_eq!(near.sites.len(), 1);
    }

    #[test]
    fn parse_display_round_trip() {
        for src in [
            "const(2)",
            "abs",
            "power(0, 0.3)",
            "bump(0:0.1, 0.5)",
            "sum(const(2), bump(0, 0.5))",
            "prod(heaviside(0), poly(1, 2))",
            "sign(-0.25)",
        ] {
            let f: SymbolicFunction = src.parse().unwrap();
            let again: SymbolicFunction = f.to_string().parse().unwrap();
            assert_eq!(f, again, "{src}");
        }
        assert!("power(0)".parse::<SymbolicFunction>().is_err());
        assert!("wobble(1)".parse::<SymbolicFunction>().is_err());
        assert!("abs extra".parse::<SymbolicFunction>().is_err());
    }
}
