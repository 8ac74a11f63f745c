use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::grid::{Grid, Point};
use crate::error::{Error, Result};

/// Real-valued samples at the nodes of a [`Grid`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridFunction {
    grid: Grid,
    values: Vec<f64>,
    singular_points: Vec<Vec<f64>>,
}

fn check_exponent(p: f64) -> Result<()> {
    if p.is_nan() || p < 1.0 {
        return Err(Error::InvalidExponent(p));
    }
    Ok(())
}

impl GridFunction {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidGrid(format!(
                "{} values for {} nodes",
                values.len(),
                grid.len()
            )));
        }
        if let Some(node) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteValue { node });
        }
        Ok(Self {
            grid,
            values,
            singular_points: Vec::new(),
        })
    }

    pub fn from_fn(grid: &Grid, f: impl Fn(&[f64]) -> f64) -> Result<Self> {
        let d = grid.dim();
        let values = grid.points().map(|p| f(&p[..d])).collect();
        Self::new(grid.clone(), values)
    }

    pub fn constant(grid: &Grid, c: f64) -> Result<Self> {
        Self::new(grid.clone(), vec![c; grid.len()])
    }

    pub fn with_singular_points(mut self, points: Vec<Vec<f64>>) -> Self {
        self.singular_points = points;
        self
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn singular_points(&self) -> &[Vec<f64>] {
        &self.singular_points
    }

    pub fn value_at(&self, node: usize) -> f64 {
        self.values[node]
    }

    pub fn point(&self, node: usize) -> Point {
        self.grid.point(node)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        let values = self.values.iter().map(|&v| f(v)).collect();
        Ok(
            Self::new(self.grid.clone(), values)?
                .with_singular_points(self.singular_points.clone()),
        )
    }

    /// Nodewise combination; the grids must be identical.
    pub fn zip_with(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(&a, &b)| f(a, b))
            .collect();
        let mut singular = self.singular_points.clone();
        for p in &other.singular_points {
            if !singular.contains(p) {
                singular.push(p.clone());
            }
        }
        Ok(Self::new(self.grid.clone(), values)?.with_singular_points(singular))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a * b)
    }

    pub fn scale(&self, c: f64) -> Result<Self> {
        self.map(|v| c * v)
    }

    /// Midpoint quadrature `sum_j f(x_j) * prod h_i`.
    pub fn integrate(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.grid.cell_volume()
    }

    /// Midpoint quadrature over the nodes where `mask` is set.
    pub fn integrate_masked(&self, mask: &[bool]) -> f64 {
        self.values
            .iter()
            .zip(mask)
            .filter(|(_, &m)| m)
            .map(|(v, _)| v)
            .sum::<f64>()
            * self.grid.cell_volume()
    }

    /// `L^p` norm; `p = f64::INFINITY` gives the discrete essential supremum.
    pub fn lp_norm(&self, p: f64) -> Result<f64> {
        check_exponent(p)?;
        Ok(lp(self.values.iter().copied(), p, self.grid.cell_volume()))
    }

    /// `L^p` norm restricted to masked nodes.
    pub fn lp_norm_masked(&self, p: f64, mask: &[bool]) -> Result<f64> {
        check_exponent(p)?;
        let vals = self
            .values
            .iter()
            .zip(mask)
            .filter(|(_, &m)| m)
            .map(|(&v, _)| v);
        Ok(lp(vals, p, self.grid.cell_volume()))
    }

    /// `integrate(|f|^p)`, or the sup for `p = inf`.
    pub fn lp_power_integral(&self, p: f64) -> Result<f64> {
        check_exponent(p)?;
        if p.is_infinite() {
            return Ok(self.max_abs());
        }
        Ok(self.values.iter().map(|v| v.abs().powf(p)).sum::<f64>() * self.grid.cell_volume())
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Discrete essential infimum of `|f|`.
    pub fn min_abs(&self) -> f64 {
        self.values
            .iter()
            .fold(f64::INFINITY, |m, v| m.min(v.abs()))
    }

    /// Writes one CSV row per node: coordinates then value.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let mut header: Vec<&str> = ["x", "y"][..self.grid.dim()].to_vec();
        header.push("value");
        w.write_record(&header)?;
        let d = self.grid.dim();
        for (i, v) in self.values.iter().enumerate() {
            let p = self.grid.point(i);
            let mut row: Vec<String> = p[..d].iter().map(|c| format!("{c:e}")).collect();
            row.push(format!("{v:e}"));
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }

    /// Reads values written by [`GridFunction::write_csv`]; coordinates must
    /// match the nodes of `grid`.
    pub fn read_csv<R: Read>(grid: &Grid, reader: R) -> Result<Self> {
        let mut r = csv::Reader::from_reader(reader);
        let d = grid.dim();
        let mut values = Vec::with_capacity(grid.len());
        for (i, record) in r.records().enumerate() {
            let record = record?;
            if record.len() != d + 1 {
                return Err(Error::Parse(format!("row {i}: expected {} fields", d + 1)));
            }
            if i >= grid.len() {
                return Err(Error::Parse("more rows than grid nodes".into()));
            }
            let p = grid.point(i);
            for axis in 0..d {
                let c: f64 = record[axis]
                    .trim()
                    .parse()
                    .map_err(|_| Error::Parse(format!("row {i}: bad coordinate")))?;
                if (c - p[axis]).abs() > 1e-9 * (1.0 + p[axis].abs()) {
                    return Err(Error::Parse(format!(
                        "row {i}: coordinate {c} is not a grid node"
                    )));
                }
            }
            let v: f64 = record[d]
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("row {i}: bad value")))?;
            values.push(v);
        }
        Self::new(grid.clone(), values)
    }
}

fn lp(values: impl Iterator<Item = f64>, p: f64, cell: f64) -> f64 {
    if p.is_infinite() {
        values.fold(0.0, |m, v| m.max(v.abs()))
    } else if p == 1.0 {
        values.map(f64::abs).sum::<f64>() * cell
    } else {
        (values.map(|v| v.abs().powf(p)).sum::<f64>() * cell).powf(1.0 / p)
    }
}
