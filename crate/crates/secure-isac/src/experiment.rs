//! Experiment harness: JSON configuration, seeded channel draws, sweep
//! orchestration over a worker pool, and CSV result emission.
//!
//! Configuration accepts dBm/dB figures and converts to linear milliwatts /
//! gains at this boundary; everything below works in linear units. Sweep
//! points are dispatched in parallel, results are merged by sorting on
//! `(sweep value, seed, method)`, so output ordering does not depend on
//! scheduling. Per-point solver failures are recorded in the row and never
//! abort a sweep.

use crate::model::{rayleigh_user_channel, Scenario};
use crate::optimizer::{
    self, optimize_optimal, optimize_suboptimal1, optimize_suboptimal2, secrecy_upper_bound,
    solve_inner, GammaSearchConfig, OptimizationResult, OptimizerError,
};
use crate::pcrb::{
    compute_sensing_matrices, pcrb_approx, pcrb_exact, pcrb_upper, xi_threshold, QuadratureConfig,
    SensingMatrices,
};
use crate::{metrics, C64, CMatrix, CVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};
use std::time::Instant;

#[derive(Debug, thiserror::Error)]
pub enum ExperimentError {
    #[error("config error: {0}")]
    Config(String),
    #[error("config parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Model(#[from] crate::model::ModelError),
    #[error(transparent)]
    Pcrb(#[from] crate::pcrb::PcrbError),
    #[error(transparent)]
    Optimizer(#[from] OptimizerError),
}

fn dbm_to_mw(dbm: f64) -> f64 {
    10f64.powf(dbm / 10.0)
}

fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// User channel model for seeded realizations.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum ChannelConfig {
    /// h ~ CN(0, sigma_h^2 I), redrawn per seed.
    Rayleigh { sigma_h_db: f64 },
    /// Fixed channel, identical for every seed.
    Explicit { re: Vec<f64>, im: Vec<f64> },
}

/// Physical scenario in boundary (dB) units.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub n_tx: usize,
    pub n_rx: usize,
    /// AN beam count; defaults to n_tx - 1.
    #[serde(default)]
    pub n_an: Option<usize>,
    pub angles_rad: Vec<f64>,
    pub probs: Vec<f64>,
    pub sigma_theta_sq: f64,
    /// One-way BS-target power path loss in dB (beta0 / r^2 = 10^(-x/10)).
    pub target_path_loss_db: f64,
    pub rcs_min_gain: f64,
    pub noise_user_dbm: f64,
    pub noise_eve_dbm: f64,
    pub noise_radar_dbm: f64,
    pub power_budget_dbm: f64,
    pub channel: ChannelConfig,
}

impl ScenarioConfig {
    /// Builds the linear-unit scenario with the channel realization for one
    /// seed.
    pub fn build(&self, seed: u64) -> Result<Scenario, ExperimentError> {
        let user_channel: CVector = match &self.channel {
            ChannelConfig::Rayleigh { sigma_h_db } => {
                rayleigh_user_channel(seed, db_to_linear(*sigma_h_db), self.n_tx)
            }
            ChannelConfig::Explicit { re, im } => {
                if re.len() != self.n_tx || im.len() != self.n_tx {
                    return Err(ExperimentError::Config(format!(
                        "explicit channel length {} does not match n_tx {}",
                        re.len(),
                        self.n_tx
                    )));
                }
                CVector::from_fn(self.n_tx, |i, _| C64::new(re[i], im[i]))
            }
        };
        // Path loss carries the whole geometry: r = 1 m with
        // beta0 = 10^(-loss/10) reproduces every quantity the model uses
        // (only the ratio beta0/r^2 ever enters).
        let scenario = Scenario::new(
            self.n_tx,
            self.n_rx,
            self.n_an.unwrap_or(self.n_tx.saturating_sub(1).max(1)),
            self.angles_rad.clone(),
            self.probs.clone(),
            self.sigma_theta_sq,
            1.0,
            db_to_linear(-self.target_path_loss_db),
            self.rcs_min_gain,
            dbm_to_mw(self.noise_user_dbm),
            dbm_to_mw(self.noise_eve_dbm),
            dbm_to_mw(self.noise_radar_dbm),
            dbm_to_mw(self.power_budget_dbm),
            user_channel,
        )?;
        Ok(scenario)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepVariable {
    SigmaThetaSq,
    GammaPcrb,
    PowerBudget,
    Gamma,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Spacing {
    Lin,
    Log,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepSpec {
    pub variable: SweepVariable,
    pub range: [f64; 2],
    pub spacing: Spacing,
    pub points: usize,
}

impl SweepSpec {
    pub fn values(&self) -> Vec<f64> {
        let [lo, hi] = self.range;
        let n = self.points.max(2);
        (0..n)
            .map(|i| {
                let t = i as f64 / (n - 1) as f64;
                match self.spacing {
                    Spacing::Lin => lo + t * (hi - lo),
                    Spacing::Log => (lo.ln() + t * (hi.ln() - lo.ln())).exp(),
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MethodName {
    Optimal,
    Sub1,
    Sub2,
    UpperBound,
}

impl MethodName {
    pub fn parse_list(s: &str) -> Result<Vec<MethodName>, ExperimentError> {
        s.split(',')
            .map(|tok| match tok.trim() {
                "optimal" => Ok(MethodName::Optimal),
                "sub1" => Ok(MethodName::Sub1),
                "sub2" => Ok(MethodName::Sub2),
                "upper_bound" => Ok(MethodName::UpperBound),
                other => Err(ExperimentError::Config(format!("unknown method `{other}`"))),
            })
            .collect()
    }

    fn as_str(self) -> &'static str {
        match self {
            MethodName::Optimal => "optimal",
            MethodName::Sub1 => "sub1",
            MethodName::Sub2 => "sub2",
            MethodName::UpperBound => "upper_bound",
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub scenario: ScenarioConfig,
    #[serde(default)]
    pub quadrature: QuadratureConfig,
    #[serde(default)]
    pub gamma_search: GammaSearchConfig,
    /// Grid points for the suboptimal-II power search.
    #[serde(default = "default_sub2_grid")]
    pub sub2_grid_points: usize,
    /// Operating PCRB threshold for sweeps over other variables.
    pub gamma_pcrb: f64,
    pub sweep: SweepSpec,
    pub methods: Vec<MethodName>,
    pub seeds: Vec<u64>,
    /// Evaluation path loss for beampattern output (dB).
    #[serde(default = "default_bp_loss")]
    pub beampattern_path_loss_db: f64,
}

fn default_sub2_grid() -> usize {
    512
}

fn default_bp_loss() -> f64 {
    80.0
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<(), ExperimentError> {
        if self.methods.is_empty() {
            return Err(ExperimentError::Config("methods list is empty".into()));
        }
        if self.seeds.is_empty() {
            return Err(ExperimentError::Config("seeds list is empty".into()));
        }
        if self.sweep.points < 2 {
            return Err(ExperimentError::Config("sweep needs at least 2 points".into()));
        }
        let [lo, hi] = self.sweep.range;
        if !(lo > 0.0 && hi > 0.0 && hi >= lo) {
            return Err(ExperimentError::Config(format!(
                "sweep range [{lo}, {hi}] must be positive and ordered"
            )));
        }
        if !(self.gamma_pcrb > 0.0) {
            return Err(ExperimentError::Config("gamma_pcrb must be positive".into()));
        }
        // A dry scenario build catches dimension/probability issues early.
        self.scenario.build(self.seeds[0])?;
        Ok(())
    }
}

/// Evaluation configuration mirroring the reference measurement setup:
/// 8x10 antennas, four candidate locations, 20 dBm budget, 40 dB target
/// path loss, -80 dBm noise floors, Rayleigh user channel at -80 dB, 50
/// channel seeds.
pub fn builtin_scenario_config() -> ExperimentConfig {
    ExperimentConfig {
        scenario: ScenarioConfig {
            n_tx: 8,
            n_rx: 10,
            n_an: Some(7),
            angles_rad: vec![-1.22, -0.79, -0.44, 0.87],
            probs: vec![0.2, 0.1, 0.4, 0.3],
            sigma_theta_sq: 1e-4,
            target_path_loss_db: 40.0,
            rcs_min_gain: 0.32,
            noise_user_dbm: -80.0,
            noise_eve_dbm: -80.0,
            noise_radar_dbm: -80.0,
            power_budget_dbm: 20.0,
            channel: ChannelConfig::Rayleigh { sigma_h_db: -80.0 },
        },
        quadrature: QuadratureConfig::default(),
        gamma_search: GammaSearchConfig::default(),
        sub2_grid_points: 512,
        gamma_pcrb: 3e-5,
        sweep: SweepSpec {
            variable: SweepVariable::GammaPcrb,
            range: [1e-5, 2e-4],
            spacing: Spacing::Log,
            points: 6,
        },
        methods: vec![
            MethodName::Optimal,
            MethodName::Sub1,
            MethodName::Sub2,
            MethodName::UpperBound,
        ],
        seeds: (1..=50).collect(),
        beampattern_path_loss_db: 80.0,
    }
}

/// Loads and validates a JSON experiment config, with line/column
/// diagnostics on parse failures.
pub fn load_config(path: &Path) -> Result<ExperimentConfig, ExperimentError> {
    let text = std::fs::read_to_string(path)?;
    let cfg: ExperimentConfig = serde_json::from_str(&text).map_err(|e| {
        ExperimentError::Parse { line: e.line(), column: e.column(), message: e.to_string() }
    })?;
    cfg.validate()?;
    Ok(cfg)
}

/// One result row of a sweep.
#[derive(Debug, Clone)]
pub struct SweepRow {
    pub seed: u64,
    pub sweep_value: f64,
    pub method: &'static str,
    pub secrecy_rate: f64,
    pub achieved_pcrb: f64,
    pub gamma_star: f64,
    pub solver_status: &'static str,
    pub wall_ms: f64,
}

#[derive(Debug, Clone)]
pub struct RunSummary {
    pub rows: usize,
    pub hard_failures: usize,
    pub files: Vec<PathBuf>,
}

fn method_outcome(
    result: Result<OptimizationResult, OptimizerError>,
) -> (f64, f64, f64, &'static str) {
    match result {
        Ok(r) => (
            r.worst_secrecy_rate,
            r.achieved_pcrb,
            r.gamma_star.unwrap_or(f64::NAN),
            "optimal",
        ),
        // An infeasible operating point delivers no certified secrecy: the
        // row carries rate zero so per-point means stay well defined.
        Err(OptimizerError::Infeasible) => (0.0, f64::NAN, f64::NAN, "infeasible"),
        Err(OptimizerError::EmptyNullSpace) => (f64::NAN, f64::NAN, f64::NAN, "empty-null-space"),
        Err(OptimizerError::AnRankOverflow { .. }) => {
            (f64::NAN, f64::NAN, f64::NAN, "an-rank-overflow")
        }
        Err(_) => (f64::NAN, f64::NAN, f64::NAN, "numerical-failure"),
    }
}

struct PointContext {
    value: f64,
    scenario_template: ScenarioConfig,
    power_override: Option<f64>,
    gamma_pcrb: f64,
    matrices_index: usize,
}

/// Runs the configured sweep and writes `results.csv` (one row per
/// seed x point x method) and `aggregate.csv` (per-point means over seeds).
pub fn run(cfg: &ExperimentConfig, out_dir: &Path) -> Result<RunSummary, ExperimentError> {
    cfg.validate()?;
    std::fs::create_dir_all(out_dir)?;
    let values = cfg.sweep.values();

    // Sensing matrices depend on (angles, probs, sigma^2, dims, path loss),
    // not on the channel seed or power: one per sigma point, else one total.
    let mut matrix_cache: Vec<SensingMatrices> = Vec::new();
    let mut points: Vec<PointContext> = Vec::new();
    match cfg.sweep.variable {
        SweepVariable::SigmaThetaSq => {
            for (i, &v) in values.iter().enumerate() {
                let mut template = cfg.scenario.clone();
                template.sigma_theta_sq = v;
                let sc = template.build(cfg.seeds[0])?;
                matrix_cache.push(compute_sensing_matrices(&sc, &cfg.quadrature)?);
                points.push(PointContext {
                    value: v,
                    scenario_template: template,
                    power_override: None,
                    gamma_pcrb: cfg.gamma_pcrb,
                    matrices_index: i,
                });
            }
        }
        _ => {
            let sc = cfg.scenario.build(cfg.seeds[0])?;
            matrix_cache.push(compute_sensing_matrices(&sc, &cfg.quadrature)?);
            for &v in &values {
                let (power_override, gamma_pcrb) = match cfg.sweep.variable {
                    SweepVariable::PowerBudget => (Some(v), cfg.gamma_pcrb),
                    SweepVariable::GammaPcrb => (None, v),
                    _ => (None, cfg.gamma_pcrb),
                };
                points.push(PointContext {
                    value: v,
                    scenario_template: cfg.scenario.clone(),
                    power_override,
                    gamma_pcrb,
                    matrices_index: 0,
                });
            }
        }
    }

    let jobs: Vec<(usize, u64)> = points
        .iter()
        .enumerate()
        .flat_map(|(pi, _)| cfg.seeds.iter().map(move |&s| (pi, s)))
        .collect();

    let rows: Result<Vec<Vec<SweepRow>>, ExperimentError> = jobs
        .par_iter()
        .map(|&(pi, seed)| {
            let point = &points[pi];
            let mut scenario = point.scenario_template.build(seed)?;
            if let Some(p) = point.power_override {
                scenario.power_budget = p;
            }
            let matrices = &matrix_cache[point.matrices_index];
            if cfg.sweep.variable == SweepVariable::Gamma {
                return Ok(gamma_rows(cfg, &scenario, matrices, point, seed));
            }
            Ok(method_rows(cfg, &scenario, matrices, point, seed))
        })
        .collect();
    let mut rows: Vec<SweepRow> = rows?.into_iter().flatten().collect();
    rows.sort_by(|a, b| {
        a.sweep_value
            .total_cmp(&b.sweep_value)
            .then(a.seed.cmp(&b.seed))
            .then(a.method.cmp(b.method))
    });

    let results_path = out_dir.join("results.csv");
    let mut csv =
        String::from("seed,sweep_value,method,secrecy_rate,achieved_pcrb,gamma_star,solver_status,wall_ms\n");
    for r in &rows {
        csv.push_str(&format!(
            "{},{:?},{},{:?},{:?},{:?},{},{:.3}\n",
            r.seed,
            r.sweep_value,
            r.method,
            r.secrecy_rate,
            r.achieved_pcrb,
            r.gamma_star,
            r.solver_status,
            r.wall_ms
        ));
    }
    std::fs::write(&results_path, csv)?;

    // Aggregate: means over seeds, NaN rows excluded (other than the
    // deliberate zero rates for infeasible points).
    let agg_path = out_dir.join("aggregate.csv");
    let mut agg = String::from("sweep_value,method,mean_secrecy_rate,mean_achieved_pcrb,n_ok,n_failed\n");
    let mut keys: Vec<(f64, &'static str)> = Vec::new();
    for r in &rows {
        if !keys.iter().any(|(v, m)| *v == r.sweep_value && *m == r.method) {
            keys.push((r.sweep_value, r.method));
        }
    }
    for (value, method) in keys {
        let group: Vec<&SweepRow> =
            rows.iter().filter(|r| r.sweep_value == value && r.method == method).collect();
        let rates: Vec<f64> =
            group.iter().map(|r| r.secrecy_rate).filter(|v| v.is_finite()).collect();
        let pcrbs: Vec<f64> =
            group.iter().map(|r| r.achieved_pcrb).filter(|v| v.is_finite()).collect();
        let n_failed = group
            .iter()
            .filter(|r| r.solver_status == "numerical-failure" || r.solver_status == "an-rank-overflow")
            .count();
        let mean = |v: &[f64]| {
            if v.is_empty() {
                f64::NAN
            } else {
                v.iter().sum::<f64>() / v.len() as f64
            }
        };
        agg.push_str(&format!(
            "{:?},{},{:?},{:?},{},{}\n",
            value,
            method,
            mean(&rates),
            mean(&pcrbs),
            rates.len(),
            n_failed
        ));
    }
    std::fs::write(&agg_path, agg)?;

    let hard_failures =
        rows.iter().filter(|r| r.solver_status == "numerical-failure").count();
    Ok(RunSummary {
        rows: rows.len(),
        hard_failures,
        files: vec![results_path, agg_path],
    })
}

fn method_rows(
    cfg: &ExperimentConfig,
    scenario: &Scenario,
    matrices: &SensingMatrices,
    point: &PointContext,
    seed: u64,
) -> Vec<SweepRow> {
    let mut out = Vec::new();
    let mut sub1_cache: Option<OptimizationResult> = None;
    let needs_sub1 = cfg.methods.contains(&MethodName::Sub1) || cfg.methods.contains(&MethodName::Sub2);
    if needs_sub1 {
        let start = Instant::now();
        let res = optimize_suboptimal1(scenario, matrices, point.gamma_pcrb, cfg.gamma_search.solver_tol);
        let wall = start.elapsed().as_secs_f64() * 1e3;
        if cfg.methods.contains(&MethodName::Sub1) {
            let (rate, pcrb, gamma, status) = match &res {
                Ok(r) => (r.worst_secrecy_rate, r.achieved_pcrb, f64::NAN, "optimal"),
                Err(OptimizerError::Infeasible) => (0.0, f64::NAN, f64::NAN, "infeasible"),
                Err(OptimizerError::EmptyNullSpace) => (f64::NAN, f64::NAN, f64::NAN, "empty-null-space"),
                Err(_) => (f64::NAN, f64::NAN, f64::NAN, "numerical-failure"),
            };
            out.push(SweepRow {
                seed,
                sweep_value: point.value,
                method: MethodName::Sub1.as_str(),
                secrecy_rate: rate,
                achieved_pcrb: pcrb,
                gamma_star: gamma,
                solver_status: status,
                wall_ms: wall,
            });
        }
        sub1_cache = res.ok();
    }
    for &m in &cfg.methods {
        match m {
            MethodName::Sub1 => {} // already emitted
            MethodName::Optimal => {
                let start = Instant::now();
                let res = optimize_optimal(scenario, matrices, point.gamma_pcrb, &cfg.gamma_search);
                let wall = start.elapsed().as_secs_f64() * 1e3;
                let (rate, pcrb, gamma, status) = method_outcome(res);
                out.push(SweepRow {
                    seed,
                    sweep_value: point.value,
                    method: MethodName::Optimal.as_str(),
                    secrecy_rate: rate,
                    achieved_pcrb: pcrb,
                    gamma_star: gamma,
                    solver_status: status,
                    wall_ms: wall,
                });
            }
            MethodName::UpperBound => {
                let start = Instant::now();
                let res = secrecy_upper_bound(scenario, matrices, &cfg.gamma_search);
                let wall = start.elapsed().as_secs_f64() * 1e3;
                let (rate, pcrb, gamma, status) = method_outcome(res);
                out.push(SweepRow {
                    seed,
                    sweep_value: point.value,
                    method: MethodName::UpperBound.as_str(),
                    secrecy_rate: rate,
                    achieved_pcrb: pcrb,
                    gamma_star: gamma,
                    solver_status: status,
                    wall_ms: wall,
                });
            }
            MethodName::Sub2 => {
                let start = Instant::now();
                let res = match &sub1_cache {
                    Some(s1) => optimize_suboptimal2(
                        scenario,
                        matrices,
                        point.gamma_pcrb,
                        s1,
                        cfg.sub2_grid_points,
                    ),
                    None => Err(OptimizerError::Infeasible),
                };
                let wall = start.elapsed().as_secs_f64() * 1e3;
                let (rate, pcrb, _, status) = method_outcome(res);
                out.push(SweepRow {
                    seed,
                    sweep_value: point.value,
                    method: MethodName::Sub2.as_str(),
                    secrecy_rate: rate,
                    achieved_pcrb: pcrb,
                    gamma_star: f64::NAN,
                    solver_status: status,
                    wall_ms: wall,
                });
            }
        }
    }
    out
}

fn gamma_rows(
    cfg: &ExperimentConfig,
    scenario: &Scenario,
    matrices: &SensingMatrices,
    point: &PointContext,
    seed: u64,
) -> Vec<SweepRow> {
    // Sweep over the inner problem's SINR threshold at the configured
    // PCRB constraint: one row per gamma with the secrecy objective.
    let start = Instant::now();
    let res = solve_inner(
        point.value,
        scenario,
        matrices,
        Some(cfg.gamma_pcrb),
        cfg.gamma_search.solver_tol,
    );
    let wall = start.elapsed().as_secs_f64() * 1e3;
    let row = match res {
        Ok(inner) => {
            let bits = ((1.0 + inner.f_gamma) / (1.0 + point.value)).log2();
            let cov = inner.covariances();
            SweepRow {
                seed,
                sweep_value: point.value,
                method: "gamma_curve",
                secrecy_rate: bits,
                achieved_pcrb: pcrb_exact(&cov.total(), matrices, scenario),
                gamma_star: inner.f_gamma,
                solver_status: "optimal",
                wall_ms: wall,
            }
        }
        Err(OptimizerError::Infeasible) => SweepRow {
            seed,
            sweep_value: point.value,
            method: "gamma_curve",
            secrecy_rate: 0.0,
            achieved_pcrb: f64::NAN,
            gamma_star: f64::NAN,
            solver_status: "infeasible",
            wall_ms: wall,
        },
        Err(_) => SweepRow {
            seed,
            sweep_value: point.value,
            method: "gamma_curve",
            secrecy_rate: f64::NAN,
            achieved_pcrb: f64::NAN,
            gamma_star: f64::NAN,
            solver_status: "numerical-failure",
            wall_ms: wall,
        },
    };
    vec![row]
}

/// PCRB bound comparison sweep over the prior variance with the full-power
/// isotropic covariance; writes `pcrb_sweep.csv` with columns
/// `sigma_theta_sq,pcrb_exact,pcrb_upper,pcrb_approx,xi`.
pub fn pcrb_sweep(cfg: &ExperimentConfig, out_dir: &Path) -> Result<PathBuf, ExperimentError> {
    std::fs::create_dir_all(out_dir)?;
    let values = match cfg.sweep.variable {
        SweepVariable::SigmaThetaSq => cfg.sweep.values(),
        _ => SweepSpec {
            variable: SweepVariable::SigmaThetaSq,
            range: [1e-6, 1e-3],
            spacing: Spacing::Log,
            points: 25,
        }
        .values(),
    };
    let mut csv = String::from("sigma_theta_sq,pcrb_exact,pcrb_upper,pcrb_approx,xi\n");
    for v in values {
        let mut template = cfg.scenario.clone();
        template.sigma_theta_sq = v;
        let sc = template.build(cfg.seeds[0])?;
        let m = compute_sensing_matrices(&sc, &cfg.quadrature)?;
        let iso = CMatrix::identity(sc.n_tx, sc.n_tx)
            * C64::new(sc.power_budget / sc.n_tx as f64, 0.0);
        let exact = pcrb_exact(&iso, &m, &sc);
        let upper = pcrb_upper(&iso, &m, &sc);
        let approx = pcrb_approx(&iso, &m, &sc);
        let xi = xi_threshold(cfg.gamma_pcrb, &m, &sc);
        csv.push_str(&format!("{v:?},{exact:?},{upper:?},{approx:?},{xi:?}\n"));
    }
    let path = out_dir.join("pcrb_sweep.csv");
    std::fs::write(&path, csv)?;
    Ok(path)
}

/// Gamma-curve dump at one or more PCRB thresholds (the sweep points when
/// sweeping `gamma_pcrb`, otherwise the configured operating threshold);
/// writes `gamma_curve.csv`.
pub fn gamma_curve(cfg: &ExperimentConfig, out_dir: &Path) -> Result<PathBuf, ExperimentError> {
    std::fs::create_dir_all(out_dir)?;
    let thresholds = match cfg.sweep.variable {
        SweepVariable::GammaPcrb => cfg.sweep.values(),
        _ => vec![cfg.gamma_pcrb],
    };
    let scenario = cfg.scenario.build(cfg.seeds[0])?;
    let matrices = compute_sensing_matrices(&scenario, &cfg.quadrature)?;
    let mut csv = String::from("gamma_pcrb,gamma,f_gamma,objective_bits,status,gamma_star\n");
    for &g in &thresholds {
        match optimize_optimal(&scenario, &matrices, g, &cfg.gamma_search) {
            Ok(result) => {
                let star = result.gamma_star.unwrap_or(f64::NAN);
                for p in &result.diagnostics.gamma_curve {
                    csv.push_str(&format!(
                        "{g:?},{:?},{:?},{:?},{},{star:?}\n",
                        p.gamma, p.f_gamma, p.objective_bits, p.status
                    ));
                }
            }
            Err(OptimizerError::Infeasible) => {
                csv.push_str(&format!("{g:?},NaN,NaN,NaN,infeasible,NaN\n"));
            }
            Err(e) => return Err(e.into()),
        }
    }
    let path = out_dir.join("gamma_curve.csv");
    std::fs::write(&path, csv)?;
    Ok(path)
}

/// Solves the optimal design at `gamma_pcrb` for the first seed and writes
/// the transmit beampattern over the default angle grid.
pub fn beampattern_run(
    cfg: &ExperimentConfig,
    gamma_pcrb: f64,
    out_dir: &Path,
) -> Result<PathBuf, ExperimentError> {
    std::fs::create_dir_all(out_dir)?;
    let scenario = cfg.scenario.build(cfg.seeds[0])?;
    let matrices = compute_sensing_matrices(&scenario, &cfg.quadrature)?;
    let result = optimize_optimal(&scenario, &matrices, gamma_pcrb, &cfg.gamma_search)?;
    let grid = metrics::default_angle_grid();
    let samples = metrics::beampattern(
        &result.beams,
        &grid,
        cfg.beampattern_path_loss_db,
        &scenario,
    )
    .expect("non-empty grid");
    let path = out_dir.join("beampattern.csv");
    std::fs::write(&path, metrics::beampattern_csv(&samples))?;
    Ok(path)
}

/// Feasibility verdict for one PCRB threshold.
#[derive(Debug, Clone)]
pub struct FeasibilityReport {
    pub gamma_pcrb: f64,
    pub xi: f64,
    pub feasible: bool,
    /// Exact PCRB of the witness covariance, when feasible.
    pub witness_pcrb: Option<f64>,
}

pub fn feasibility_run(
    cfg: &ExperimentConfig,
    gamma_pcrb: f64,
) -> Result<FeasibilityReport, ExperimentError> {
    let scenario = cfg.scenario.build(cfg.seeds[0])?;
    let matrices = compute_sensing_matrices(&scenario, &cfg.quadrature)?;
    let xi = xi_threshold(gamma_pcrb, &matrices, &scenario);
    match optimizer::check_feasibility_p1(&scenario, &matrices, gamma_pcrb)? {
        optimizer::FeasibilityP1::Feasible(r) => Ok(FeasibilityReport {
            gamma_pcrb,
            xi,
            feasible: true,
            witness_pcrb: Some(pcrb_exact(&r, &matrices, &scenario)),
        }),
        optimizer::FeasibilityP1::Infeasible => {
            Ok(FeasibilityReport { gamma_pcrb, xi, feasible: false, witness_pcrb: None })
        }
    }
}
