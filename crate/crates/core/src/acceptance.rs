//! The acceptance suite: fourteen property checks, each reduced to one
//! measured number compared against a fixed tolerance.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bundle::{
    catalog_distances, convolve_sections, dynamics_demo, homomorphism_check, inverse_check,
    section_norm, shadow_scales, unitarity_check, BundleMeasureSet, FundamentalNet, Section,
};
use crate::domain::{BoxDomain, Grid, GridFunction, SymbolicFunction};
use crate::error::Result;
use crate::groupoid::{
    axiom_check, build_groupoid, enumerate_bisections, haar_invariance_check,
    random_arrow_functions, GroupoidTables, HaarSystem,
};
use crate::partial::{
    build_gamma, involutivity_defect, product_verdict, star_antihom_check, Catalog, GammaVerdict,
    DEFAULT_ETA,
};
use crate::smoothing::{convergence_slope, make_mollifier, net_convergence, Kernel, SmoothNet};
use crate::weak::{
    mollify_commutes, piecewise_constant_search, sobolev_norm, verify_weak_derivative,
    DerivativeSource, MultiIndex, TestFunctionPanel, DEFAULT_PANEL_SIZE, MARGINAL_BAND,
};

pub const CRITERIA: usize = 14;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AcceptanceConfig {
    pub seed: u64,
    pub panel_size: usize,
    /// Functions in the random Haar panel.
    pub haar_panel: usize,
}

impl Default for AcceptanceConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            panel_size: DEFAULT_PANEL_SIZE,
            haar_panel: 20,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionResult {
    pub id: usize,
    pub title: String,
    /// Headline quantity the verdict is read from.
    pub measured: f64,
    pub tolerance: String,
    pub passed: bool,
    pub detail: String,
}

impl CriterionResult {
    pub fn line(&self) -> String {
        format!(
            "{} [{:>2}] {}: {:.6e} ({}){}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.title,
            self.measured,
            self.tolerance,
            if self.detail.is_empty() {
                String::new()
            } else {
                format!("; {}", self.detail)
            }
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AcceptanceReport {
    pub config: AcceptanceConfig,
    pub criteria: Vec<CriterionResult>,
}

impl AcceptanceReport {
    pub fn all_passed(&self) -> bool {
        self.criteria.iter().all(|c| c.passed)
    }

    pub fn summary(&self) -> String {
        let mut s: String = self.criteria.iter().map(|c| c.line() + "\n").collect();
        let passed = self.criteria.iter().filter(|c| c.passed).count();
        s.push_str(&format!(
            "{passed}/{} criteria passed\n",
            self.criteria.len()
        ));
        s
    }
}

fn result(
    id: usize,
    title: &str,
    measured: f64,
    tolerance: &str,
    passed: bool,
    detail: String,
) -> CriterionResult {
    CriterionResult {
        id,
        title: title.into(),
        measured,
        tolerance: tolerance.into(),
        passed,
        detail,
    }
}

fn symmetric_line(nodes: usize) -> Result<Grid> {
    Grid::uniform(BoxDomain::interval(-1.0, 1.0)?, nodes)
}

fn d1() -> MultiIndex {
    MultiIndex::new(&[1]).expect("non-empty")
}

/// Runs one criterion, `1..=14`. Criterion 14 reruns 1 to 13 twice.
pub fn criterion(id: usize, cfg: &AcceptanceConfig) -> Result<CriterionResult> {
    match id {
        1 => mollifier_axioms(),
        2 => approximate_identity_rate(),
        3 => weak_derivatives(cfg),
        4 => sobolev_norms(),
        5 => commutation(),
        6 => gamma_oracle(),
        7 => star_identities(),
        8 => groupoid_axioms(),
        9 => bisections(),
        10 => haar_invariance(cfg),
        11 => representation(cfg),
        12 => convolution_oracle(cfg),
        13 => dynamics(),
        14 => determinism(cfg),
        _ => Err(crate::Error::InvalidParameter(format!(
            "no acceptance criterion {id}"
        ))),
    }
}

pub fn run_acceptance(cfg: &AcceptanceConfig) -> Result<AcceptanceReport> {
    let criteria = (1..=CRITERIA)
        .map(|id| criterion(id, cfg))
        .collect::<Result<Vec<_>>>()?;
    Ok(AcceptanceReport {
        config: cfg.clone(),
        criteria,
    })
}

fn mollifier_axioms() -> Result<CriterionResult> {
    let g = symmetric_line(1024)?;
    let k = Kernel::standard(1)?;
    let mut worst: f64 = 0.0;
    let mut leaks = 0;
    for eps in [0.4, 0.2, 0.1, 0.05] {
        let m = make_mollifier(&k, eps, &g)?;
        worst = worst.max((m.integrate() - 1.0).abs());
        leaks += g
            .points()
            .enumerate()
            .filter(|(i, p)| p[0].abs() >= eps && m.value_at(*i) != 0.0)
            .count();
    }
    Ok(result(
        1,
        "mollifier mass and support",
        worst,
        "max |mass - 1| <= 5e-3, no mass outside the ball",
        worst <= 5e-3 && leaks == 0,
        format!("{leaks} nodes outside the support carry mass"),
    ))
}

fn approximate_identity_rate() -> Result<CriterionResult> {
    let g = symmetric_line(1024)?;
    let f = SymbolicFunction::abs().sample(&g)?;
    let net = SmoothNet::new(Kernel::standard(1)?, vec![0.4, 0.2, 0.1, 0.05])?;
    let rows = net_convergence(&net, &f, 2.0)?;
    let slope = convergence_slope(&rows).unwrap_or(f64::NAN);
    let errors: Vec<String> = rows.iter().map(|r| format!("{:.4e}", r.error)).collect();
    Ok(result(
        2,
        "approximate identity rate for |x| in L2",
        slope,
        "slope in [0.9, 1.5]",
        (0.9..=1.5).contains(&slope),
        format!("errors {}", errors.join(" ")),
    ))
}

fn weak_derivatives(cfg: &AcceptanceConfig) -> Result<CriterionResult> {
    let g = symmetric_line(512)?;
    let panel = TestFunctionPanel::new(&g, cfg.panel_size, cfg.seed)?;
    let abs = SymbolicFunction::abs().sample(&g)?;
    let sign = SymbolicFunction::sign(0.0).sample(&g)?;
    let residual = verify_weak_derivative(&abs, &sign, &d1(), &panel)?.max_residual;
    let h = SymbolicFunction::heaviside(0.0).sample(&g)?;
    let search = piecewise_constant_search(&h, &d1(), &panel, 12, &[0.0, 1.0])?;
    Ok(result(
        3,
        "weak derivatives of |x| and H",
        residual,
        "|x| residual < 1e-3, every H candidate > 0.1",
        residual < 1e-3 && search.min_max_residual > 0.1,
        format!(
            "best of {} step candidates for H leaves {:.4}",
            search.candidates, search.min_max_residual
        ),
    ))
}

fn sobolev_norms() -> Result<CriterionResult> {
    let unit = Grid::uniform(BoxDomain::interval(0.0, 1.0)?, 512)?;
    let x = SymbolicFunction::linear();
    let line = sobolev_norm(&x.sample(&unit)?, 1, 2.0, &DerivativeSource::Analytic(x))?.total;
    let g = symmetric_line(512)?;
    let abs = SymbolicFunction::abs();
    let a = sobolev_norm(&abs.sample(&g)?, 1, 2.0, &DerivativeSource::Analytic(abs))?.total;
    let e_line = (line - (4.0f64 / 3.0).sqrt()).abs();
    let e_abs = (a - (8.0f64 / 3.0).sqrt()).abs();
    Ok(result(
        4,
        "W^{1,2} norms of x and |x|",
        e_abs,
        "x within 1e-3 of sqrt(4/3), |x| within 5e-3 of sqrt(8/3)",
        e_line <= 1e-3 && e_abs <= 5e-3,
        format!("x: {line:.8} (error {e_line:.2e}), |x|: {a:.8}"),
    ))
}

fn commutation() -> Result<CriterionResult> {
    let g = symmetric_line(512)?;
    let f = SymbolicFunction::abs().sample(&g)?;
    let u = SymbolicFunction::sign(0.0).sample(&g)?;
    let gap = mollify_commutes(&f, &u, &d1(), 0.1)?;
    Ok(result(
        5,
        "mollification commutes with the weak derivative",
        gap,
        "< 1e-2",
        gap < 1e-2,
        String::new(),
    ))
}

fn gamma_oracle() -> Result<CriterionResult> {
    let exponents: Vec<f64> = (1..=9).map(|i| 0.05 * i as f64).collect();
    let mut compared = 0;
    let mut mismatches = Vec::new();
    let mut banded = 0;
    for p in [1.0, 2.0] {
        let catalog = Catalog::power_family(&exponents, p)?;
        for (i, &a) in exponents.iter().enumerate() {
            for (j, &b) in exponents.iter().enumerate() {
                let c = (a + b) * p;
                if (c - 1.0).abs() <= MARGINAL_BAND {
                    banded += 1;
                    continue;
                }
                let expected = if c < 1.0 {
                    GammaVerdict::In
                } else {
                    GammaVerdict::Out
                };
                let pv = product_verdict(&catalog, catalog.function(i)?, catalog.function(j)?)?;
                compared += 1;
                if pv.numeric != Some(expected) {
                    mismatches.push(format!("p={p} ({a:.2},{b:.2})"));
                }
            }
        }
    }
    let agreement = (compared - mismatches.len()) as f64 / compared as f64;
    Ok(result(
        6,
        "numeric product verdicts match the exponent criterion",
        agreement,
        "agreement = 1 outside the marginal band",
        mismatches.is_empty(),
        format!(
            "{compared} pairs compared, {banded} in the band, mismatches [{}]",
            mismatches.join(", ")
        ),
    ))
}

fn star_identities() -> Result<CriterionResult> {
    let catalog = Catalog::full_demo()?;
    let grid = catalog.grid().clone();
    let mut samples: Vec<GridFunction> = (0..catalog.len())
        .map(|i| catalog.realize(i))
        .collect::<Result<Vec<_>>>()?;
    for v in [-1.0, 2.0, 3.0] {
        samples.push(GridFunction::constant(&grid, v)?);
    }
    samples.push(SymbolicFunction::polynomial(&[1.0, 0.0, 0.5]).sample(&grid)?);
    let defined: Vec<&GridFunction> = samples
        .iter()
        .filter(|f| f.min_abs() >= DEFAULT_ETA)
        .collect();
    let mut worst: f64 = 0.0;
    for f in &defined {
        worst = worst.max(involutivity_defect(f, DEFAULT_ETA)?);
        for g in &defined {
            worst = worst.max(star_antihom_check(f, g, DEFAULT_ETA)?.relative());
        }
    }
    Ok(result(
        7,
        "involution and anti-multiplicativity",
        worst,
        "<= 1e-12 relative to scale",
        worst <= 1e-12,
        format!(
            "{} of {} samples admit the involution",
            defined.len(),
            samples.len()
        ),
    ))
}

fn bundled_groupoids() -> Result<Vec<(&'static str, GroupoidTables)>> {
    Ok(vec![
        (
            "full demo",
            build_groupoid(&build_gamma(&Catalog::full_demo()?)?)?,
        ),
        (
            "partial power demo",
            build_groupoid(&build_gamma(&Catalog::partial_power_demo()?)?)?,
        ),
    ])
}

fn groupoid_axioms() -> Result<CriterionResult> {
    let mut violations = 0;
    let mut laws = true;
    let mut notes = Vec::new();
    for (name, g) in bundled_groupoids()? {
        let r = axiom_check(&g);
        violations += r.associativity_violations.len();
        laws &= r.unit_law && r.inverse_law;
        notes.push(format!(
            "{name}: {} arrows, {} defined triples, {} partiality defects",
            g.arrow_count(),
            r.associativity_defined,
            r.partiality_defects.len()
        ));
    }
    Ok(result(
        8,
        "groupoid axioms on the bundled catalogs",
        violations as f64,
        "zero violations, unit and inverse laws hold",
        violations == 0 && laws,
        notes.join("; "),
    ))
}

fn bisections() -> Result<CriterionResult> {
    let g = GroupoidTables::full(3);
    let found = enumerate_bisections(&g, usize::MAX)?;
    let mut perms: Vec<Vec<usize>> = found.iter().map(|b| b.permutation(&g)).collect();
    perms.sort();
    // brute force over every choice of one arrow per source fibre
    let fibres: Vec<Vec<usize>> = (0..3).map(|f| g.source_fibre(f)).collect();
    let mut oracle = Vec::new();
    for &a in &fibres[0] {
        for &b in &fibres[1] {
            for &c in &fibres[2] {
                let mut t = vec![g.target(a), g.target(b), g.target(c)];
                let perm = t.clone();
                t.sort();
                if t == [0, 1, 2] {
                    oracle.push(perm);
                }
            }
        }
    }
    oracle.sort();
    Ok(result(
        9,
        "bisections of the 3-object pair groupoid",
        found.len() as f64,
        "exactly 6, realizing every permutation",
        found.len() == 6 && perms == oracle && oracle.len() == 6,
        String::new(),
    ))
}

fn haar_invariance(cfg: &AcceptanceConfig) -> Result<CriterionResult> {
    let groupoids = bundled_groupoids()?;
    let mut full_defect: f64 = 0.0;
    for g in [
        GroupoidTables::full(3),
        GroupoidTables::full(4),
        groupoids[0].1.clone(),
    ] {
        let panel = random_arrow_functions(&g, cfg.haar_panel, cfg.seed);
        full_defect = full_defect
            .max(haar_invariance_check(&g, &HaarSystem::counting(&g), &panel)?.max_defect);
    }
    let partial = &groupoids[1].1;
    let panel = random_arrow_functions(partial, cfg.haar_panel, cfg.seed);
    let r = haar_invariance_check(partial, &HaarSystem::counting(partial), &panel)?;
    let defective = r.per_arrow.iter().filter(|d| d.defect > 0.0).count();
    Ok(result(
        10,
        "left invariance of the counting Haar system",
        full_defect,
        "exactly 0 on full patterns, positive on the partial demo",
        full_defect == 0.0 && r.max_defect > 0.0,
        format!(
            "partial demo max defect {:.4e} on {defective} of {} arrows",
            r.max_defect,
            r.per_arrow.len()
        ),
    ))
}

fn representation(cfg: &AcceptanceConfig) -> Result<CriterionResult> {
    let g = GroupoidTables::full(3);
    let hom = homomorphism_check(&g);
    let inv = inverse_check(&g);
    let uni = unitarity_check(&g, &HaarSystem::counting(&g), 16, cfg.seed)?;
    let worst = hom.max_defect.max(inv.max_defect).max(uni.max_defect);
    let refused = hom.refused.len() + inv.refused.len() + uni.refused.len();
    Ok(result(
        11,
        "left regular representation on the 3-object pattern",
        worst,
        "exactly 0",
        worst == 0.0 && refused == 0,
        format!("{} pairs, {} arrows", hom.checked, inv.checked),
    ))
}

fn matrix_product(a: &[Vec<f64>], b: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = a.len();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| (0..n).map(|k| a[i][k] * b[k][j]).sum())
                .collect()
        })
        .collect()
}

fn convolution_oracle(cfg: &AcceptanceConfig) -> Result<CriterionResult> {
    let mut worst: f64 = 0.0;
    let g2 = GroupoidTables::full(2);
    let h2 = HaarSystem::counting(&g2);
    let phi = Section::from_matrix(&g2, &[vec![1.0, 2.0], vec![3.0, 4.0]])?;
    let psi = Section::from_matrix(&g2, &[vec![5.0, 6.0], vec![7.0, 8.0]])?;
    let got = convolve_sections(&phi, &psi, &g2, &h2)?
        .section
        .to_matrix(&g2);
    let fixed = got == vec![vec![19.0, 22.0], vec![43.0, 50.0]];
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut cases = 1;
    for n in [2, 3] {
        let g = GroupoidTables::full(n);
        let h = HaarSystem::counting(&g);
        for _ in 0..10 {
            let mut random = || -> Vec<Vec<f64>> {
                (0..n)
                    .map(|_| (0..n).map(|_| rng.random_range(-9..=9) as f64).collect())
                    .collect()
            };
            let (a, b) = (random(), random());
            let c = convolve_sections(
                &Section::from_matrix(&g, &a)?,
                &Section::from_matrix(&g, &b)?,
                &g,
                &h,
            )?;
            let expected = matrix_product(&a, &b);
            for (x, y) in c
                .section
                .to_matrix(&g)
                .iter()
                .flatten()
                .zip(expected.iter().flatten())
            {
                worst = worst.max((x - y).abs());
            }
            cases += 1;
        }
    }
    Ok(result(
        12,
        "convolution equals matrix multiplication on full patterns",
        worst,
        "exactly 0",
        worst == 0.0 && fixed,
        format!("{cases} integer cases including the 2 x 2 example"),
    ))
}

fn dynamics() -> Result<CriterionResult> {
    let g = GroupoidTables::full(3);
    let h = HaarSystem::counting(&g);
    let b = BundleMeasureSet::new(&g, &h)?;
    let psi = Section::new(&g, (0..g.arrow_count()).map(|a| 1.0 + a as f64).collect())?;
    let diff = Section::uniform(&g).sub(&Section::identity(&g))?;
    let c = section_norm(&convolve_sections(&diff, &psi, &g, &h)?.section, &b)?;
    let blend = dynamics_demo(&FundamentalNet::blend(&g, 12), &psi, &g, &h)?;
    let worst = blend
        .iter()
        .map(|r| (r.deviation - 0.5f64.powi(r.index as i32 + 1) * c).abs() / c)
        .fold(0.0, f64::max);

    let catalog = Catalog::full_demo()?;
    let cg = build_groupoid(&build_gamma(&catalog)?)?;
    let ch = HaarSystem::counting(&cg);
    let d = catalog_distances(&catalog)?;
    let shadow = FundamentalNet::shadow(&d, &cg, &shadow_scales(&d, 8))?;
    let rows = dynamics_demo(&shadow, &Section::uniform(&cg), &cg, &ch)?;
    let monotone = rows[1..]
        .windows(2)
        .all(|w| w[1].deviation <= w[0].deviation)
        && rows.last().map(|r| r.deviation) < rows.get(1).map(|r| r.deviation);
    let devs: Vec<String> = rows
        .iter()
        .map(|r| format!("{:.3e}", r.deviation))
        .collect();
    Ok(result(
        13,
        "convolution dynamics along nets",
        worst,
        "blend within 1e-12 of the closed form, shadow net monotone",
        worst <= 1e-12 && monotone,
        format!("shadow deviations {}", devs.join(" ")),
    ))
}

fn determinism(cfg: &AcceptanceConfig) -> Result<CriterionResult> {
    let run = || -> Result<String> {
        let rows = (1..CRITERIA)
            .map(|id| criterion(id, cfg))
            .collect::<Result<Vec<_>>>()?;
        Ok(serde_json::to_string(&rows).expect("report serializes"))
    };
    let (first, second) = (run()?, run()?);
    let same = first == second;
    Ok(result(
        14,
        "two runs give byte-identical reports",
        if same { 0.0 } else { 1.0 },
        "identical",
        same,
        format!("{} bytes", first.len()),
    ))
}
