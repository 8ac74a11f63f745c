use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use sobolev_groupoid::domain::{BoxDomain, Grid, SymbolicFunction};
use sobolev_groupoid::partial::{Catalog, CatalogEntry};
use sobolev_groupoid::smoothing::Kernel;
use sobolev_groupoid::weak::default_ladder;

pub const DEFAULT_CONFIG: &str = include_str!("../config/default.toml");

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    pub output_dir: PathBuf,
    pub domain: DomainSpec,
    pub grid: GridSpec,
    pub kernel: KernelSpec,
    pub catalog: CatalogSpec,
    pub gamma: GammaSpec,
    pub mollify: MollifySpec,
    pub weakderiv: WeakDerivSpec,
    pub sobolev: SobolevSpec,
    pub groupoid: GroupoidSpec,
    pub haar: HaarSpec,
    pub rep: RepSpec,
    pub dynamics: DynamicsSpec,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainSpec {
    pub axes: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub nodes: usize,
    pub ladder: Vec<u32>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelSpec {
    pub family: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EntrySpec {
    pub name: String,
    pub function: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CatalogSpec {
    /// `partial`, `full`, `power` or empty for explicit entries.
    pub demo: String,
    pub p: f64,
    pub k: usize,
    pub entries: Vec<EntrySpec>,
    #[serde(default)]
    pub exponents: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MollifySpec {
    pub function: String,
    pub epsilons: Vec<f64>,
    pub p: f64,
    /// Also fail on kernel mass or support defects.
    pub kernel_check: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GammaSpec {
    /// Matrix CSV, relative to the output directory.
    pub emit: PathBuf,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeakDerivSpec {
    pub function: String,
    pub candidate: String,
    pub alpha: Vec<usize>,
    pub panel_size: usize,
    pub tolerance: f64,
    pub search: bool,
    pub cells: usize,
    pub levels: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SobolevSpec {
    pub function: String,
    pub k: usize,
    pub p: f64,
    pub source: String,
    pub epsilon: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupoidSpec {
    pub emit: PathBuf,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HaarSpec {
    /// `counting`, `constant`, or a path to a JSON array of arrow weights.
    pub weights: String,
    pub constant: f64,
    pub panel_size: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RepSpec {
    pub groupoid: String,
    pub check: String,
    pub samples: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DynamicsSpec {
    pub net: String,
    pub members: usize,
    pub section: String,
}

/// The config could not be read or parsed at all.
#[derive(Debug)]
pub struct Unreadable(pub anyhow::Error);

impl std::fmt::Display for Unreadable {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "unreadable config: {:#}", self.0)
    }
}

impl std::error::Error for Unreadable {}

/// Loads `path` (or the bundled default) over the defaults, then applies
/// `key.path=value` overrides in order.
pub fn load(
    path: Option<&Path>,
    overrides: &[String],
    flags: &[(String, toml::Value)],
) -> anyhow::Result<RunConfig> {
    let mut value: toml::Table = DEFAULT_CONFIG.parse().expect("bundled config parses");
    if let Some(path) = path {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading {}", path.display()))
            .map_err(Unreadable)?;
        let user: toml::Table = text
            .parse()
            .with_context(|| format!("parsing {}", path.display()))
            .map_err(Unreadable)?;
        merge(&mut value, user);
    }
    for o in overrides {
        set(&mut value, o)?;
    }
    for (key, v) in flags {
        set_value(&mut value, key, v.clone())?;
    }
    let cfg: RunConfig = toml::Value::Table(value)
        .try_into()
        .context("invalid config")?;
    Ok(cfg)
}

/// Reads a catalog file into `catalog.*` overrides. The file holds either a
/// `[catalog]` table or the catalog keys at top level; entries without a
/// `demo` key are taken as explicit.
pub fn catalog_file_flags(path: &Path) -> anyhow::Result<Vec<(String, toml::Value)>> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))
        .map_err(Unreadable)?;
    let mut table: toml::Table = text
        .parse()
        .with_context(|| format!("parsing {}", path.display()))
        .map_err(Unreadable)?;
    if let Some(toml::Value::Table(inner)) = table.remove("catalog") {
        table = inner;
    }
    if !table.contains_key("demo") {
        table.insert("demo".into(), toml::Value::String(String::new()));
    }
    Ok(table
        .into_iter()
        .map(|(k, v)| (format!("catalog.{k}"), v))
        .collect())
}

fn merge(base: &mut toml::Table, over: toml::Table) {
    for (k, v) in over {
        match (base.get_mut(&k), v) {
            (Some(toml::Value::Table(b)), toml::Value::Table(o)) => merge(b, o),
            (_, v) => {
                base.insert(k, v);
            }
        }
    }
}

/// Applies one `a.b.c=value` override; the value is parsed as TOML and
/// falls back to a plain string.
pub fn set(root: &mut toml::Table, assignment: &str) -> anyhow::Result<()> {
    let (key, raw) = assignment
        .split_once('=')
        .ok_or_else(|| anyhow!("override '{assignment}' is not key=value"))?;
    let parsed: toml::Value = match format!("v = {raw}").parse::<toml::Table>() {
        Ok(mut t) => t.remove("v").expect("key present"),
        Err(_) => toml::Value::String(raw.to_string()),
    };
    set_value(root, key, parsed)
}

fn set_value(root: &mut toml::Table, key: &str, value: toml::Value) -> anyhow::Result<()> {
    let parts: Vec<&str> = key.trim().split('.').collect();
    let mut table = root;
    for part in &parts[..parts.len() - 1] {
        table = match table.get_mut(*part) {
            Some(toml::Value::Table(t)) => t,
            _ => bail!("unknown config section '{part}' in '{key}'"),
        };
    }
    let leaf = parts[parts.len() - 1];
    if !table.contains_key(leaf) && leaf != "exponents" {
        bail!("unknown config key '{key}'");
    }
    table.insert(leaf.to_string(), value);
    Ok(())
}

impl RunConfig {
    /// SHA-256 of the effective config in its canonical JSON form.
    /// SHA-256 of the canonical JSON form, ignoring where outputs go.
    pub fn hash(&self) -> String {
        let mut value = serde_json::to_value(self).expect("config serializes");
        if let Some(map) = value.as_object_mut() {
            map.remove("output_dir");
        }
        let canonical = serde_json::to_vec(&value).expect("config serializes");
        hex::encode(Sha256::digest(&canonical))
    }

    pub fn domain(&self) -> anyhow::Result<BoxDomain> {
        Ok(BoxDomain::new(&self.domain.axes)?)
    }

    pub fn grid(&self) -> anyhow::Result<Grid> {
        Ok(Grid::uniform(self.domain()?, self.grid.nodes)?)
    }

    pub fn ladder(&self) -> anyhow::Result<Vec<Grid>> {
        let d = self.domain()?;
        match self.grid.ladder.as_slice() {
            [] => Ok(default_ladder(&d)?),
            [lo, hi] => Ok(Grid::dyadic_ladder(&d, *lo, *hi)?),
            other => bail!("grid.ladder must be [lo, hi] exponents, got {other:?}"),
        }
    }

    pub fn kernel(&self) -> anyhow::Result<Kernel> {
        match self.kernel.family.as_str() {
            "standard" => Ok(Kernel::standard(self.domain.axes.len())?),
            other => bail!("unknown kernel family '{other}'"),
        }
    }

    pub fn function(text: &str) -> anyhow::Result<SymbolicFunction> {
        text.parse().map_err(|e| anyhow!("{e}"))
    }

    pub fn catalog(&self) -> anyhow::Result<Catalog> {
        let c = &self.catalog;
        let catalog = match c.demo.as_str() {
            "partial" => Catalog::partial_power_demo()?.with_exponents(c.p, c.k)?,
            "full" => Catalog::full_demo()?.with_exponents(c.p, c.k)?,
            "power" => Catalog::power_family(&c.exponents, c.p)?.with_exponents(c.p, c.k)?,
            "" => {
                let entries = c
                    .entries
                    .iter()
                    .map(|e| {
                        Ok(CatalogEntry::new(
                            e.name.clone(),
                            Self::function(&e.function)?,
                        ))
                    })
                    .collect::<anyhow::Result<Vec<_>>>()?;
                Catalog::new(entries, c.p, c.k, self.grid()?, self.ladder()?)?
            }
            other => bail!("unknown catalog demo '{other}'"),
        };
        Ok(catalog)
    }
}
