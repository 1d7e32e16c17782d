//! Experiment orchestration: multi-start solves, invariant checks, duality runs, sweeps.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::config::{default_alpha, ProblemConfig};
use super::HarnessError;
use crate::cycles::{
    averaged_residual, composed_residual, cyclic_residual, find_cycle, find_cycles, membership_fi,
    translation_error, Cycle, MapKind, SolveReport, SolverConfig, TraceRow,
};
use crate::duality::{
    dual_pair_involution, verify_cycle_duality, verify_singleton_relations, DualityReport,
    InvolutionCheck, DUALITY_TOL,
};
use crate::error::Error;
use crate::vectorspace::{ProductPoint, Vector};

/// Half-width of the cube `[-10, 10]^{mn}` random starts are drawn from.
pub const START_BOX: f64 = 10.0;

/// Two cycles closer than this are considered the same.
pub const DISTINCT_CYCLE_DIST: f64 = 1e-3;

pub const GAP_UNIQUENESS_TOL: f64 = 1e-6;
pub const GAP_D_PERP_TOL: f64 = 1e-9;
pub const COMMON_ZERO_GAP_TOL: f64 = 1e-8;
pub const INVOLUTION_PROBES: usize = 100;
pub const INVOLUTION_TOL: f64 = 1e-9;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_NO_CONVERGENCE: i32 = 2;
pub const EXIT_CONFIG: i32 = 3;

/// `count` points of `(R^n)^m` drawn uniformly from `[-10, 10)^{mn}`.
///
/// The stream is ChaCha8 seeded with `seed` through `seed_from_u64`; start
/// `k` consumes coordinates `k*m*n .. (k+1)*m*n` in block-major order.
pub fn random_starts(m: usize, n: usize, count: usize, seed: u64) -> Vec<ProductPoint> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let flat: Vec<f64> = (0..m * n)
                .map(|_| rng.random_range(-START_BOX..START_BOX))
                .collect();
            ProductPoint::from_flat(m, n, &flat).expect("shape is consistent")
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StartSummary {
    pub index: usize,
    pub converged: bool,
    pub stalled: bool,
    pub iterations: usize,
    pub final_residual: f64,
    pub start: ProductPoint,
    /// The cycle when converged, otherwise the last iterate.
    pub point: ProductPoint,
    pub gap: Option<ProductPoint>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SettingResult {
    pub map: MapKind,
    pub alpha: f64,
    pub tol: f64,
    pub max_iter: usize,
    pub converged: usize,
    pub mean_iterations: f64,
    pub max_iterations: usize,
    /// Largest pairwise distance between gap vectors of this setting.
    pub gap_dispersion: Option<f64>,
    pub starts: Vec<StartSummary>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckVerdict {
    pub name: String,
    pub pass: bool,
    pub value: f64,
    pub threshold: f64,
    pub detail: String,
}

impl CheckVerdict {
    fn at_most(name: &str, value: f64, threshold: f64, detail: impl Into<String>) -> Self {
        CheckVerdict {
            name: name.to_string(),
            pass: value <= threshold,
            value,
            threshold,
            detail: detail.into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub command: String,
    pub config_hash: String,
    pub seed: u64,
    pub settings: Vec<SettingResult>,
    pub consensus_gap: Option<ProductPoint>,
    pub max_gap_distance: Option<f64>,
    pub duality: Option<DualityReport>,
    pub involution: Option<InvolutionCheck>,
    pub cycle_duality: Vec<DualityReport>,
    pub errors: Vec<String>,
    pub checks: Vec<CheckVerdict>,
    pub exit_code: i32,
}

impl RunResult {
    fn new(command: &str, cfg: &ProblemConfig) -> Self {
        RunResult {
            command: command.to_string(),
            config_hash: cfg.hash.clone(),
            seed: cfg.solver.seed,
            settings: Vec::new(),
            consensus_gap: None,
            max_gap_distance: None,
            duality: None,
            involution: None,
            cycle_duality: Vec::new(),
            errors: Vec::new(),
            checks: Vec::new(),
            exit_code: EXIT_OK,
        }
    }

    pub fn all_converged(&self) -> bool {
        self.settings.iter().all(|s| s.converged == s.starts.len())
    }

    pub fn all_checks_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn check(&self, name: &str) -> Option<&CheckVerdict> {
        self.checks.iter().find(|c| c.name == name)
    }

    fn finish(&mut self) {
        self.exit_code = if !self.all_converged() {
            EXIT_NO_CONVERGENCE
        } else if !self.all_checks_pass() || !self.errors.is_empty() {
            EXIT_CHECK_FAILED
        } else {
            EXIT_OK
        };
    }
}

/// Trace of one start, named after the file it is written to.
#[derive(Clone, Debug, PartialEq)]
pub struct NamedTrace {
    pub name: String,
    pub rows: Vec<TraceRow>,
}

#[derive(Clone, Debug)]
pub struct RunOutput {
    pub result: RunResult,
    pub traces: Vec<NamedTrace>,
    /// Converged cycles of every setting, in start order.
    pub cycles: Vec<Cycle>,
}

struct SettingRun {
    summary: SettingResult,
    reports: Vec<SolveReport>,
}

fn run_setting(
    cfg: &ProblemConfig,
    solver: &SolverConfig,
    starts: &[ProductPoint],
) -> Result<SettingRun, HarnessError> {
    let mut reports = Vec::with_capacity(starts.len());
    for outcome in find_cycles(&cfg.product, starts, solver) {
        match outcome {
            Ok(r) => reports.push(r),
            Err(Error::NoConvergence(r)) => reports.push(*r),
            Err(e) => return Err(e.into()),
        }
    }
    let summaries: Vec<StartSummary> = reports
        .iter()
        .zip(starts)
        .enumerate()
        .map(|(index, (r, x0))| StartSummary {
            index,
            converged: r.converged,
            stalled: r.stalled,
            iterations: r.iterations,
            final_residual: r.final_residual(),
            start: x0.clone(),
            point: r
                .cycle
                .as_ref()
                .map_or_else(|| r.last_point.clone(), |c| c.point.clone()),
            gap: r.gap.as_ref().map(|g| g.y.clone()),
        })
        .collect();
    let converged = summaries.iter().filter(|s| s.converged).count();
    let gaps: Vec<&ProductPoint> = summaries.iter().filter_map(|s| s.gap.as_ref()).collect();
    let iterations: Vec<usize> = summaries.iter().map(|s| s.iterations).collect();
    Ok(SettingRun {
        summary: SettingResult {
            map: solver.map,
            alpha: solver.alpha,
            tol: solver.tol,
            max_iter: solver.max_iter,
            converged,
            mean_iterations: iterations.iter().sum::<usize>() as f64 / iterations.len() as f64,
            max_iterations: iterations.iter().copied().max().unwrap_or(0),
            gap_dispersion: max_pairwise_distance(&gaps),
            starts: summaries,
        },
        reports,
    })
}

fn max_pairwise_distance(points: &[&ProductPoint]) -> Option<f64> {
    if points.is_empty() {
        return None;
    }
    let mut worst = 0.0_f64;
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            worst = worst.max(points[i].distance(points[j]));
        }
    }
    Some(worst)
}

fn mean_point(points: &[&ProductPoint]) -> Option<ProductPoint> {
    let first = points.first()?;
    let mut acc = (*first).clone();
    for p in &points[1..] {
        acc = &acc + p;
    }
    Some(acc.scale(1.0 / points.len() as f64))
}

fn aggregate(result: &mut RunResult, runs: &[SettingRun]) {
    let gaps: Vec<&ProductPoint> = runs
        .iter()
        .flat_map(|r| r.summary.starts.iter().filter_map(|s| s.gap.as_ref()))
        .collect();
    result.consensus_gap = mean_point(&gaps);
    result.max_gap_distance = max_pairwise_distance(&gaps);
}

fn trace_name(setting: Option<usize>, start: usize) -> String {
    match setting {
        Some(s) => format!("trace_s{s}_{start}"),
        None => format!("trace_{start}"),
    }
}

fn collect_output(result: RunResult, runs: Vec<SettingRun>, prefix_settings: bool) -> RunOutput {
    let mut traces = Vec::new();
    let mut cycles = Vec::new();
    for (s, run) in runs.into_iter().enumerate() {
        for (k, r) in run.reports.into_iter().enumerate() {
            traces.push(NamedTrace {
                name: trace_name(prefix_settings.then_some(s), k),
                rows: r.trace,
            });
            if let Some(c) = r.cycle {
                cycles.push(c);
            }
        }
    }
    RunOutput {
        result,
        traces,
        cycles,
    }
}

/// Solves from `solver.starts` seeded random starts.
pub fn run_solve(cfg: &ProblemConfig) -> Result<RunOutput, HarnessError> {
    let starts = random_starts(cfg.m(), cfg.dimension, cfg.solver.starts, cfg.solver.seed);
    let run = run_setting(cfg, &cfg.solver.solver_config(), &starts)?;
    let mut result = RunResult::new("solve", cfg);
    aggregate(&mut result, std::slice::from_ref(&run));
    result.settings.push(run.summary.clone());
    result.finish();
    Ok(collect_output(result, vec![run], false))
}

/// Solves, then runs the invariant suite on every converged cycle.
pub fn run_verify(cfg: &ProblemConfig) -> Result<RunOutput, HarnessError> {
    let mut out = run_solve(cfg)?;
    out.result.command = "verify".into();
    let tol = cfg.solver.tol;
    let p = &cfg.product;
    let cycles = &out.cycles;

    if cycles.is_empty() {
        out.result.finish();
        return Ok(out);
    }
    let checks = &mut out.result.checks;

    let mut closure = 0.0_f64;
    for c in cycles {
        closure = closure.max(c.max_link_residual(p)?);
    }
    checks.push(CheckVerdict::at_most(
        "cycle_closure",
        closure,
        10.0 * tol,
        "max_i ||z_i - J_i(z_{i-1})||",
    ));

    // Limits of the configured map plus one limit of the other map.
    let other = match cfg.solver.map {
        MapKind::Averaged => SolverConfig::composed(default_alpha(MapKind::Composed)),
        MapKind::Composed => SolverConfig::default(),
    }
    .with_tol(tol)
    .with_max_iter(cfg.solver.max_iter);
    let first_start = &out.result.settings[0].starts[0].start;
    let mut limits: Vec<ProductPoint> = cycles.iter().map(|c| c.point.clone()).collect();
    if let Ok(r) = find_cycle(p, first_start, &other) {
        limits.extend(r.cycle.map(|c| c.point));
    }
    let mut fixed_set = 0.0_f64;
    for z in &limits {
        fixed_set = fixed_set
            .max(averaged_residual(p, z)?)
            .max(composed_residual(p, z)?);
    }
    checks.push(CheckVerdict::at_most(
        "fixed_set_equality",
        fixed_set,
        2.0 * tol,
        "composed and averaged residuals of limits of both maps",
    ));

    let mut midpoint = 0.0_f64;
    let mut distinct_pairs = 0usize;
    for (a, ca) in cycles.iter().enumerate() {
        for cb in &cycles[a + 1..] {
            if ca.point.distance(&cb.point) > DISTINCT_CYCLE_DIST {
                distinct_pairs += 1;
                let mid = ca.point.lerp(&cb.point, 0.5);
                midpoint = midpoint.max(composed_residual(p, &mid)?);
            }
        }
    }
    checks.push(CheckVerdict::at_most(
        "z_convexity",
        midpoint,
        10.0 * tol,
        format!("{distinct_pairs} distinct cycle pairs"),
    ));

    let m = p.m();
    let mut membership = 0.0_f64;
    for c in cycles {
        for i in 0..m {
            membership = membership.max(cyclic_residual(p, c.point.block(i), i)?);
        }
    }
    checks.push(CheckVerdict::at_most(
        "block_membership",
        membership,
        10.0 * tol,
        "every block z_i of every cycle lies in F_i",
    ));

    let gap_dist = out.result.max_gap_distance.unwrap_or(0.0);
    checks.push(CheckVerdict::at_most(
        "gap_uniqueness",
        gap_dist,
        GAP_UNIQUENESS_TOL,
        format!("{} gap vectors", cycles.len()),
    ));

    let gaps: Vec<_> = cycles.iter().map(crate::cycles::gap_vector).collect();
    let d_perp = gaps.iter().map(|g| g.block_sum_norm()).fold(0.0, f64::max);
    checks.push(CheckVerdict::at_most(
        "gap_in_d_perp",
        d_perp,
        GAP_D_PERP_TOL,
        "||sum_i y_i||",
    ));

    let samples = fi_samples(cycles, m);
    let mut translation = 0.0_f64;
    for (i, s) in samples.iter().enumerate() {
        translation = translation.max(translation_error(p, &cycles[0], s, i, 10.0 * tol)?);
    }
    checks.push(CheckVerdict::at_most(
        "translation",
        translation,
        10.0 * tol,
        "J_{i+1}(z) = z - y_{i+1} on sampled z in F_i",
    ));

    let duality_tol = DUALITY_TOL.max(10.0 * tol);
    let mut duality_worst = 0.0_f64;
    for c in cycles {
        let report = verify_cycle_duality(p, c, duality_tol)?;
        duality_worst = report
            .relations_checked
            .iter()
            .map(|r| r.residual)
            .fold(duality_worst, f64::max);
        out.result.cycle_duality.push(report);
    }
    checks.push(CheckVerdict::at_most(
        "cycle_duality",
        duality_worst,
        duality_tol,
        "y in A(z), y = (Id-R)(-z), y in D^perp, -z in (Id-R)^{-1}(y)",
    ));

    if m == 2 {
        let mut image = 0.0_f64;
        for i in 0..2 {
            let j = 1 - i;
            for z in &samples[i] {
                let w = p.resolve_factor(j, z)?;
                image = image.max(cyclic_residual(p, &w, j)?);
            }
        }
        checks.push(CheckVerdict::at_most(
            "m2_image_identities",
            image,
            10.0 * tol,
            "J_2(F_1) in F_2 and J_1(F_2) in F_1",
        ));
    }

    let consensus_norm = out
        .result
        .consensus_gap
        .as_ref()
        .map_or(f64::INFINITY, ProductPoint::norm);
    if consensus_norm <= COMMON_ZERO_GAP_TOL {
        let mut disagreements = 0usize;
        for c in cycles {
            for z in c.point.blocks() {
                let flags = (0..m)
                    .map(|i| membership_fi(p, z, i, 10.0 * tol))
                    .collect::<Result<Vec<_>, _>>()?;
                if flags.iter().any(|&f| f != flags[0]) {
                    disagreements += 1;
                }
            }
        }
        checks.push(CheckVerdict::at_most(
            "common_zero_ladder",
            disagreements as f64,
            0.0,
            "membership in F_1..F_m agrees on common fixed points",
        ));
    }

    out.result.finish();
    Ok(out)
}

/// Points of each `F_i`: block `i` of every cycle and midpoints of consecutive ones.
fn fi_samples(cycles: &[Cycle], m: usize) -> Vec<Vec<Vector>> {
    (0..m)
        .map(|i| {
            let mut s: Vec<Vector> = cycles.iter().map(|c| c.point.block(i).clone()).collect();
            for w in cycles.windows(2) {
                s.push(
                    w[0].point
                        .block(i)
                        .zip_map(w[1].point.block(i), |a, b| 0.5 * (a + b)),
                );
            }
            s
        })
        .collect()
}

/// psol, dsol and the six singleton relations for a pair of affine operators.
pub fn run_duality(cfg: &ProblemConfig) -> Result<RunOutput, HarnessError> {
    if cfg.m() != 2 {
        return Err(HarnessError::validation(
            "operators",
            format!("duality needs exactly 2 operators, got {}", cfg.m()),
        ));
    }
    let affine = |i: usize| {
        cfg.product.factor(i).as_affine().ok_or_else(|| {
            HarnessError::validation(format!("operators[{i}]"), "duality needs affine operators")
        })
    };
    let (a, b) = (affine(0)?, affine(1)?);

    let mut result = RunResult::new("duality", cfg);
    let tol = 1e-8_f64.max(cfg.solver.tol);
    match verify_singleton_relations(a, b, tol) {
        Ok(report) => {
            for r in &report.relations_checked {
                result.checks.push(CheckVerdict::at_most(
                    &r.id,
                    r.residual,
                    tol,
                    "singleton relation",
                ));
            }
            result.duality = Some(report);
        }
        Err(e @ (Error::SingularSum { .. } | Error::SingularFactor { .. })) => {
            result.errors.push(e.to_string());
            result.duality = Some(DualityReport {
                psol: crate::duality::psol_affine(a, b).ok(),
                dsol: crate::duality::dsol_affine(a, b).ok(),
                tol,
                relations_checked: Vec::new(),
            });
        }
        Err(e) => return Err(e.into()),
    }

    let involution = dual_pair_involution(
        cfg.product.factor(0),
        cfg.product.factor(1),
        INVOLUTION_PROBES,
        cfg.solver.seed,
        INVOLUTION_TOL,
    )?;
    result.checks.push(CheckVerdict::at_most(
        "involution",
        involution.max_deviation,
        INVOLUTION_TOL,
        format!("{} probes", involution.probes),
    ));
    result.involution = Some(involution);
    result.finish();
    Ok(RunOutput {
        result,
        traces: Vec::new(),
        cycles: Vec::new(),
    })
}

/// Solver settings to cross; empty lists fall back to defaults.
#[derive(Clone, Debug, Default)]
pub struct SweepGrid {
    pub starts: Option<usize>,
    pub alphas: Vec<f64>,
    pub maps: Vec<MapKind>,
}

impl SweepGrid {
    /// The `(map, alpha)` settings of the grid; invalid pairs are returned separately.
    pub fn settings(&self) -> (Vec<(MapKind, f64)>, Vec<(MapKind, f64)>) {
        let maps = if self.maps.is_empty() {
            vec![MapKind::Composed, MapKind::Averaged]
        } else {
            self.maps.clone()
        };
        let mut valid = Vec::new();
        let mut invalid = Vec::new();
        for &map in &maps {
            let alphas = if self.alphas.is_empty() {
                vec![default_alpha(map)]
            } else {
                self.alphas.clone()
            };
            for alpha in alphas {
                let ok = SolverConfig {
                    map,
                    alpha,
                    ..SolverConfig::default()
                }
                .validate()
                .is_ok();
                if ok {
                    valid.push((map, alpha));
                } else {
                    invalid.push((map, alpha));
                }
            }
        }
        (valid, invalid)
    }
}

/// Runs every grid setting from the same random starts.
pub fn run_sweep(cfg: &ProblemConfig, grid: &SweepGrid) -> Result<RunOutput, HarnessError> {
    let count = grid.starts.unwrap_or(cfg.solver.starts);
    if count < 1 {
        return Err(HarnessError::validation("starts", "must be >= 1"));
    }
    let (valid, invalid) = grid.settings();
    if valid.is_empty() {
        return Err(HarnessError::validation(
            "alpha",
            "no valid (map, alpha) setting in the grid",
        ));
    }
    let starts = random_starts(cfg.m(), cfg.dimension, count, cfg.solver.seed);
    let mut runs = Vec::with_capacity(valid.len());
    for &(map, alpha) in &valid {
        let solver = SolverConfig {
            map,
            alpha,
            tol: cfg.solver.tol,
            max_iter: cfg.solver.max_iter,
            ..SolverConfig::default()
        };
        runs.push(run_setting(cfg, &solver, &starts)?);
    }
    let mut result = RunResult::new("sweep", cfg);
    for (map, alpha) in invalid {
        result
            .errors
            .push(format!("skipped invalid setting map={map} alpha={alpha}"));
    }
    aggregate(&mut result, &runs);
    result.settings = runs.iter().map(|r| r.summary.clone()).collect();
    result.finish();
    // Skipped settings are informational only.
    if result.exit_code == EXIT_CHECK_FAILED && result.all_checks_pass() {
        result.exit_code = EXIT_OK;
    }
    Ok(collect_output(result, runs, true))
}
