use std::path::Path;

use anyhow::{anyhow, bail, Context};
use serde::Serialize;
use sobolev_groupoid::acceptance::{run_acceptance, AcceptanceConfig};
use sobolev_groupoid::bundle::{
    catalog_distances, convolve_sections, dynamics_demo, homomorphism_check, inverse_check,
    section_involution, shadow_scales, unitarity_check, FundamentalNet, RepresentationCheck,
    Section,
};
use sobolev_groupoid::groupoid::{
    axiom_check, build_groupoid, enumerate_bisections, haar_invariance_check,
    random_arrow_functions, GroupoidTables, HaarSystem, MAX_BISECTION_OBJECTS,
};
use sobolev_groupoid::partial::{build_gamma, GammaVerdict};
use sobolev_groupoid::smoothing::{convergence_slope, make_mollifier, net_convergence, SmoothNet};
use sobolev_groupoid::weak::{
    piecewise_constant_search, sobolev_membership, sobolev_norm, verify_weak_derivative,
    CandidateSearch, DerivativeSource, MembershipReport, MultiIndex, SobolevReport,
    TestFunctionPanel,
};
use sobolev_groupoid::Error;

use crate::config::RunConfig;
use crate::output::Reporter;

/// An invariant was checked and failed.
#[derive(Debug)]
pub struct CheckFailed(pub String);

impl std::fmt::Display for CheckFailed {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "check failed: {}", self.0)
    }
}

impl std::error::Error for CheckFailed {}

fn fail(msg: impl Into<String>) -> anyhow::Error {
    CheckFailed(msg.into()).into()
}

fn num(x: f64) -> String {
    format!("{x}")
}

#[derive(Serialize)]
struct MollifyRow {
    epsilon: f64,
    mass: f64,
    /// Nodes with `|x| >= eps` where the sampled kernel is nonzero.
    outside_support: usize,
    error: f64,
    trusted_fraction: f64,
}

#[derive(Serialize)]
struct MollifyReport {
    function: String,
    p: f64,
    nodes: usize,
    slope: Option<f64>,
    rows: Vec<MollifyRow>,
}

pub fn mollify(cfg: &RunConfig, out: &mut Reporter) -> anyhow::Result<()> {
    let s = &cfg.mollify;
    let grid = cfg.grid()?;
    let kernel = cfg.kernel()?;
    let f = RunConfig::function(&s.function)?;
    let net = SmoothNet::new(kernel.clone(), s.epsilons.clone())?;
    let conv = net_convergence(&net, &f.sample(&grid)?, s.p)?;
    let rows = conv
        .iter()
        .map(|r| {
            let sampled = make_mollifier(&kernel, r.epsilon, &grid)?;
            let outside = (0..grid.len())
                .filter(|&i| {
                    let x = grid.point(i);
                    x.iter().map(|v| v * v).sum::<f64>().sqrt() >= r.epsilon
                        && sampled.value_at(i) != 0.0
                })
                .count();
            Ok(MollifyRow {
                epsilon: r.epsilon,
                mass: sampled.integrate(),
                outside_support: outside,
                error: r.error,
                trusted_fraction: r.trusted_fraction,
            })
        })
        .collect::<anyhow::Result<Vec<_>>>()?;
    let report = MollifyReport {
        function: f.to_string(),
        p: s.p,
        nodes: cfg.grid.nodes,
        slope: convergence_slope(&conv),
        rows,
    };
    let table: Vec<Vec<String>> = report
        .rows
        .iter()
        .map(|r| {
            vec![
                num(r.epsilon),
                num(r.error),
                num(r.trusted_fraction),
                num(r.mass),
                r.outside_support.to_string(),
            ]
        })
        .collect();
    let header = [
        "epsilon",
        "error",
        "trusted_fraction",
        "mass",
        "outside_support",
    ];
    out.csv("mollify.csv", &header, &table)?;
    out.json("mollify.json", &report)?;
    if s.kernel_check {
        if let Some(r) = report.rows.iter().find(|r| (r.mass - 1.0).abs() > 5e-3) {
            return Err(fail(format!(
                "mollifier mass {} at epsilon {}",
                r.mass, r.epsilon
            )));
        }
        if let Some(r) = report.rows.iter().find(|r| r.outside_support > 0) {
            return Err(fail(format!(
                "{} nodes outside B(0, {}) carry mass",
                r.outside_support, r.epsilon
            )));
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct WeakReport {
    function: String,
    candidate: String,
    alpha: String,
    panel_size: usize,
    seed: u64,
    max_residual: f64,
    worst_member: usize,
    tolerance: f64,
    search: Option<CandidateSearch>,
}

pub fn weakderiv(cfg: &RunConfig, out: &mut Reporter) -> anyhow::Result<()> {
    let s = &cfg.weakderiv;
    let grid = cfg.grid()?;
    let f = RunConfig::function(&s.function)?;
    let u = RunConfig::function(&s.candidate)?;
    let alpha = MultiIndex::new(&s.alpha)?;
    let panel = TestFunctionPanel::new(&grid, s.panel_size, cfg.seed)?;
    let fs = f.sample(&grid)?;
    let r = verify_weak_derivative(&fs, &u.sample(&grid)?, &alpha, &panel)?;
    let search = if s.search {
        Some(piecewise_constant_search(
            &fs, &alpha, &panel, s.cells, &s.levels,
        )?)
    } else {
        None
    };
    let table: Vec<Vec<String>> = r
        .residuals
        .iter()
        .enumerate()
        .map(|(j, v)| vec![j.to_string(), num(*v)])
        .collect();
    out.csv("weakderiv.csv", &["member", "residual"], &table)?;
    let report = WeakReport {
        function: f.to_string(),
        candidate: u.to_string(),
        alpha: alpha.to_string(),
        panel_size: s.panel_size,
        seed: cfg.seed,
        max_residual: r.max_residual,
        worst_member: r.worst_member,
        tolerance: s.tolerance,
        search,
    };
    out.json("weakderiv.json", &report)?;
    if r.max_residual > s.tolerance {
        return Err(fail(format!(
            "residual {:.3e} exceeds {:.1e} (member {})",
            r.max_residual, s.tolerance, r.worst_member
        )));
    }
    Ok(())
}

#[derive(Serialize)]
struct SobolevOut {
    function: String,
    norm: SobolevReport,
    membership: Option<MembershipReport>,
}

pub fn sobolev(cfg: &RunConfig, out: &mut Reporter) -> anyhow::Result<()> {
    let s = &cfg.sobolev;
    let grid = cfg.grid()?;
    let f = RunConfig::function(&s.function)?;
    let source = match s.source.as_str() {
        "analytic" => DerivativeSource::Analytic(f.clone()),
        "estimated" => DerivativeSource::Estimated { epsilon: s.epsilon },
        other => bail!("unknown derivative source '{other}'"),
    };
    let norm = sobolev_norm(&f.sample(&grid)?, s.k, s.p, &source)?;
    let membership = match sobolev_membership(&f, s.k, s.p, &cfg.ladder()?) {
        Ok(m) => Some(m),
        Err(Error::UnsupportedFamily(_)) => None,
        Err(e) => return Err(e.into()),
    };
    let table: Vec<Vec<String>> = norm
        .terms
        .iter()
        .map(|t| vec![t.alpha.to_string(), num(t.norm)])
        .collect();
    out.csv("sobolev.csv", &["alpha", "norm"], &table)?;
    let agrees = membership.as_ref().is_none_or(|m| m.numeric_agrees);
    out.json(
        "sobolev.json",
        &SobolevOut {
            function: f.to_string(),
            norm,
            membership,
        },
    )?;
    if !agrees {
        return Err(fail(
            "numeric membership disagrees with the analytic criterion",
        ));
    }
    Ok(())
}

pub fn gamma(cfg: &RunConfig, out: &mut Reporter) -> anyhow::Result<()> {
    let catalog = cfg.catalog()?;
    let gamma = build_gamma(&catalog)?;
    out.raw_csv(
        cfg.gamma.emit.to_str().context("emit path is not UTF-8")?,
        &gamma.to_csv()?,
    )?;
    out.json("gamma.json", &gamma)?;
    let decisive = |v: Option<GammaVerdict>| v.filter(|v| *v != GammaVerdict::Marginal);
    for (i, row) in gamma.verdicts.iter().enumerate() {
        for (j, pv) in row.iter().enumerate() {
            if let (Some(a), Some(n)) = (decisive(pv.analytic), decisive(pv.numeric)) {
                if a != n {
                    return Err(fail(format!(
                        "numeric verdict for ({}, {}) contradicts the criterion",
                        gamma.names[i], gamma.names[j]
                    )));
                }
            }
        }
    }
    Ok(())
}

fn catalog_groupoid(cfg: &RunConfig) -> anyhow::Result<GroupoidTables> {
    Ok(build_groupoid(&build_gamma(&cfg.catalog()?)?)?)
}

#[derive(Serialize)]
struct GroupoidOut {
    objects: Vec<String>,
    arrows: usize,
    fibre_sizes: Vec<usize>,
    bisections: Option<usize>,
    axioms: sobolev_groupoid::groupoid::AxiomReport,
}

pub fn groupoid(cfg: &RunConfig, out: &mut Reporter) -> anyhow::Result<()> {
    let g = catalog_groupoid(cfg)?;
    let emit = out.path(
        cfg.groupoid
            .emit
            .to_str()
            .context("emit path is not UTF-8")?,
    );
    std::fs::write(&emit, serde_json::to_string_pretty(&g)? + "\n")
        .with_context(|| format!("writing {}", emit.display()))?;
    out.written.push(emit);
    let axioms = axiom_check(&g);
    let bisections = if g.object_count() <= MAX_BISECTION_OBJECTS {
        Some(enumerate_bisections(&g, 100_000)?.len())
    } else {
        None
    };
    let passed = axioms.passed();
    out.json(
        "groupoid.json",
        &GroupoidOut {
            objects: g.objects.clone(),
            arrows: g.arrow_count(),
            fibre_sizes: (0..g.object_count())
                .map(|f| g.target_fibre(f).len())
                .collect(),
            bisections,
            axioms,
        },
    )?;
    if !passed {
        return Err(fail("groupoid axioms violated"));
    }
    Ok(())
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> anyhow::Result<T> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

#[derive(Serialize)]
struct HaarOut {
    weights: String,
    panel_size: usize,
    seed: u64,
    full_pattern: bool,
    system: HaarSystem,
    report: sobolev_groupoid::groupoid::HaarReport,
}

pub fn haar(cfg: &RunConfig, out: &mut Reporter) -> anyhow::Result<()> {
    let s = &cfg.haar;
    let g = catalog_groupoid(cfg)?;
    let (system, invariant_expected) = match s.weights.as_str() {
        "counting" => (HaarSystem::counting(&g), true),
        "constant" => (HaarSystem::constant(&g, s.constant)?, true),
        path => {
            let weights: Vec<f64> = read_json(Path::new(path))?;
            let n = g.object_count();
            (
                HaarSystem::new(&g, weights, vec![1.0 / n as f64; n])?,
                false,
            )
        }
    };
    let panel = random_arrow_functions(&g, s.panel_size, cfg.seed);
    let report = haar_invariance_check(&g, &system, &panel)?;
    let table: Vec<Vec<String>> = report
        .per_arrow
        .iter()
        .map(|d| {
            vec![
                d.arrow.to_string(),
                g.objects[g.target(d.arrow)].clone(),
                g.objects[g.source(d.arrow)].clone(),
                num(d.defect),
            ]
        })
        .collect();
    out.csv("haar.csv", &["arrow", "target", "source", "defect"], &table)?;
    let full = g.is_full();
    let max = report.max_defect;
    out.json(
        "haar.json",
        &HaarOut {
            weights: s.weights.clone(),
            panel_size: s.panel_size,
            seed: cfg.seed,
            full_pattern: full,
            system,
            report,
        },
    )?;
    if full && invariant_expected && max > 0.0 {
        return Err(fail(format!("Haar defect {max:e} on a full pattern")));
    }
    Ok(())
}

#[derive(Serialize)]
struct InvolutionCheck {
    checked: usize,
    max_round_trip: f64,
    max_antihom: f64,
}

#[derive(Serialize)]
#[serde(untagged)]
enum RepResult {
    Operators(RepresentationCheck),
    Involution(InvolutionCheck),
}

#[derive(Serialize)]
struct RepOut {
    check: String,
    objects: Vec<String>,
    result: RepResult,
}

fn load_groupoid(cfg: &RunConfig) -> anyhow::Result<GroupoidTables> {
    if cfg.rep.groupoid.is_empty() {
        catalog_groupoid(cfg)
    } else {
        let g: GroupoidTables = read_json(Path::new(&cfg.rep.groupoid))?;
        Ok(g.validated()?)
    }
}

fn random_section(g: &GroupoidTables, rng: &mut impl rand::Rng) -> Section {
    Section::new(
        g,
        (0..g.arrow_count())
            .map(|_| rng.random_range(-1.0..=1.0))
            .collect(),
    )
    .expect("sized to g")
}

pub fn rep(cfg: &RunConfig, out: &mut Reporter) -> anyhow::Result<()> {
    use rand::SeedableRng;
    let g = load_groupoid(cfg)?;
    let h = HaarSystem::counting(&g);
    let result = match cfg.rep.check.as_str() {
        "unitary" => RepResult::Operators(unitarity_check(&g, &h, cfg.rep.samples, cfg.seed)?),
        "hom" => RepResult::Operators(homomorphism_check(&g)),
        "inverse" => RepResult::Operators(inverse_check(&g)),
        "involution" => {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(cfg.seed);
            let mut max_round_trip: f64 = 0.0;
            let mut max_antihom: f64 = 0.0;
            for _ in 0..cfg.rep.samples {
                let (x, y) = (random_section(&g, &mut rng), random_section(&g, &mut rng));
                let star = |p: &Section| section_involution(p, &g);
                let back = star(&star(&x)?)?;
                max_round_trip = max_round_trip.max(gap(&back, &x));
                let lhs = star(&convolve_sections(&x, &y, &g, &h)?.section)?;
                let rhs = convolve_sections(&star(&y)?, &star(&x)?, &g, &h)?.section;
                max_antihom = max_antihom.max(gap(&lhs, &rhs));
            }
            RepResult::Involution(InvolutionCheck {
                checked: cfg.rep.samples,
                max_round_trip,
                max_antihom,
            })
        }
        other => bail!("unknown rep check '{other}'"),
    };
    let verdict = match &result {
        RepResult::Operators(r) if !r.refused.is_empty() => Err(format!(
            "left translation is not bijective for {} arrows",
            r.refused.len()
        )),
        RepResult::Operators(r) if r.max_defect > 0.0 => {
            Err(format!("operator defect {:e}", r.max_defect))
        }
        RepResult::Involution(r) if r.max_round_trip > 0.0 || r.max_antihom > 1e-12 => {
            Err(format!(
                "involution defect {:e}",
                r.max_round_trip.max(r.max_antihom)
            ))
        }
        _ => Ok(()),
    };
    out.json(
        "rep.json",
        &RepOut {
            check: cfg.rep.check.clone(),
            objects: g.objects.clone(),
            result,
        },
    )?;
    verdict.map_err(fail)
}

fn gap(a: &Section, b: &Section) -> f64 {
    a.values()
        .iter()
        .zip(b.values())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

#[derive(Serialize)]
struct DynamicsOut {
    net: String,
    members: usize,
    rows: Vec<sobolev_groupoid::bundle::DynamicsRow>,
}

pub fn dynamics(cfg: &RunConfig, out: &mut Reporter) -> anyhow::Result<()> {
    let s = &cfg.dynamics;
    let catalog = cfg.catalog()?;
    let g = build_groupoid(&build_gamma(&catalog)?)?;
    let h = HaarSystem::counting(&g);
    let net = match s.net.as_str() {
        "delta" => FundamentalNet::delta(&g),
        "blend" => FundamentalNet::blend(&g, s.members),
        "identity" => FundamentalNet::constant_identity(&g, s.members),
        "mollifier" => {
            let d = catalog_distances(&catalog)?;
            FundamentalNet::shadow(&d, &g, &shadow_scales(&d, s.members))?
        }
        other => bail!("unknown net '{other}'"),
    };
    let psi = if s.section.is_empty() {
        Section::uniform(&g)
    } else {
        Section::new(&g, read_json(Path::new(&s.section))?)?
    };
    let rows = dynamics_demo(&net, &psi, &g, &h)?;
    let table: Vec<Vec<String>> = rows
        .iter()
        .map(|r| vec![r.index.to_string(), num(r.deviation), num(r.leakage)])
        .collect();
    out.csv("dynamics.csv", &["index", "deviation", "leakage"], &table)?;
    out.json(
        "dynamics.json",
        &DynamicsOut {
            net: s.net.clone(),
            members: net.len(),
            rows,
        },
    )
}

pub fn acceptance(cfg: &RunConfig, out: &mut Reporter) -> anyhow::Result<()> {
    let ac = AcceptanceConfig {
        seed: cfg.seed,
        ..AcceptanceConfig::default()
    };
    let report = run_acceptance(&ac)?;
    let table: Vec<Vec<String>> = report
        .criteria
        .iter()
        .map(|c| {
            vec![
                c.id.to_string(),
                c.title.clone(),
                if c.passed { "PASS" } else { "FAIL" }.to_string(),
                num(c.measured),
                c.tolerance.clone(),
            ]
        })
        .collect();
    out.csv(
        "acceptance.csv",
        &["id", "criterion", "status", "measured", "tolerance"],
        &table,
    )?;
    out.json("acceptance.json", &report)?;
    print!("{}", report.summary());
    if !report.all_passed() {
        let failed: Vec<String> = report
            .criteria
            .iter()
            .filter(|c| !c.passed)
            .map(|c| c.id.to_string())
            .collect();
        return Err(anyhow!(CheckFailed(format!(
            "criteria {} failed",
            failed.join(", ")
        ))));
    }
    Ok(())
}
