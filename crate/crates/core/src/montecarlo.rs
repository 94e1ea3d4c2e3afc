//! Trial orchestration: snapshot sampling, DRSA bookkeeping, link
//! evaluation and estimate reduction, deterministic under any degree of
//! parallelism.
//!
//! Every trial owns ChaCha8 streams addressed by `(base_seed, trial, lane)`
//! — one lane for geometry and one per link's fading — so results are
//! independent of scheduling, and configurations differing only in scalar
//! parameters consume identical randomness (common random numbers across
//! sweeps, which makes the pointwise-ordering comparisons exact).

use std::collections::{BTreeMap, BTreeSet};
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::analytic::{self, AnalyticResult, QuadratureSpec};
use crate::channel::PowerLevel;
use crate::drsa::{assign_subchannel, reuse_factor, AssignmentMode};
use crate::error::{Error, Result};
use crate::geometry::{build_snapshot, Window};
use crate::links::{sir_access_link, sir_backhaul, sir_cellular_dl, LinkSample};
use crate::params::SystemParams;
use crate::scalar::{real, Real};

const LANE_GEOMETRY: u64 = 0;
const LANE_BH: u64 = 1;
const LANE_DL: u64 = 2;
const LANE_AL: u64 = 3;
const LANES: u64 = 4;

/// Quantities an experiment can estimate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Target {
    /// Backhaul success probability.
    PBh,
    /// Shared cellular downlink success probability.
    PDl,
    /// Access-link success probability.
    PAl,
    /// Backhaul ergodic rate, nats/s/Hz.
    TBh,
    /// Downlink ergodic rate.
    TDl,
    /// Access-link ergodic rate.
    TAl,
}

impl Target {
    pub const ALL: [Target; 6] = [
        Target::PBh,
        Target::PDl,
        Target::PAl,
        Target::TBh,
        Target::TDl,
        Target::TAl,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Target::PBh => "p_bh",
            Target::PDl => "p_dl",
            Target::PAl => "p_al",
            Target::TBh => "t_bh",
            Target::TDl => "t_dl",
            Target::TAl => "t_al",
        }
    }

    fn is_rate(self) -> bool {
        matches!(self, Target::TBh | Target::TDl | Target::TAl)
    }
}

impl FromStr for Target {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Target::ALL
            .into_iter()
            .find(|t| t.name() == s)
            .ok_or_else(|| Error::invalid("target", format!("unknown target `{s}`")))
    }
}

impl std::fmt::Display for Target {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Full experiment description.
#[derive(Debug, Clone)]
pub struct ExperimentConfig<R: Real> {
    pub params: SystemParams<R>,
    pub n_trials: usize,
    pub base_seed: u64,
    pub window: Window<R>,
    pub targets: BTreeSet<Target>,
}

impl<R: Real> ExperimentConfig<R> {
    /// Reference experiment: baseline parameters, 10_000 trials on the
    /// 40 x 40 km window.
    pub fn new(params: SystemParams<R>, base_seed: u64, targets: &[Target]) -> Result<Self> {
        Ok(Self {
            params,
            n_trials: 10_000,
            base_seed,
            window: Window::from_km(real(40.0), real(40.0))?,
            targets: targets.iter().copied().collect(),
        })
    }

    fn validate(&self) -> Result<()> {
        self.params.validate()?;
        if self.n_trials == 0 {
            return Err(Error::invalid("n_trials", "must be >= 1"));
        }
        if self.targets.is_empty() {
            return Err(Error::invalid("targets", "at least one target required"));
        }
        Ok(())
    }
}

/// Sample mean with its 95% normal-approximation confidence halfwidth.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate<R: Real> {
    pub mean: R,
    pub ci95_halfwidth: R,
    /// Samples entering the mean (rates exclude infinite-SIR trials).
    pub n: usize,
    /// Trials whose SIR was the infinite sentinel.
    pub infinite_sir_count: usize,
}

/// DRSA bookkeeping across the trials of one experiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct AssignmentTally {
    pub backhaul: usize,
    pub cue: usize,
    pub exclusive: usize,
}

/// Everything one experiment produces.
#[derive(Debug, Clone)]
pub struct ExperimentResult<R: Real> {
    pub estimates: BTreeMap<Target, Estimate<R>>,
    pub assignments: AssignmentTally,
    /// Mean sub-channel reuse factor over trials.
    pub mean_reuse_factor: R,
    /// Interferers snapped to the 0.1 m distance floor, summed over trials.
    pub floored_interferers: u64,
}

/// One trial's raw link evaluations.
#[derive(Debug, Clone)]
struct TrialOutcome<R: Real> {
    bh: Option<LinkSample<R>>,
    dl: Option<LinkSample<R>>,
    al: Option<LinkSample<R>>,
    assignment: AssignmentMode,
    q_omega: u32,
}

#[derive(Debug, Clone, Copy)]
struct LinkNeeds {
    bh: bool,
    dl: bool,
    al: bool,
}

impl LinkNeeds {
    fn from_targets(targets: &BTreeSet<Target>) -> Self {
        LinkNeeds {
            bh: targets.contains(&Target::PBh) || targets.contains(&Target::TBh),
            dl: targets.contains(&Target::PDl) || targets.contains(&Target::TDl),
            al: targets.contains(&Target::PAl) || targets.contains(&Target::TAl),
        }
    }
}

fn lane_rng(base_seed: u64, trial: u64, lane: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(base_seed);
    rng.set_stream(trial * LANES + lane);
    rng
}

fn run_trial<R: Real>(
    params: &SystemParams<R>,
    window: Window<R>,
    base_seed: u64,
    trial: u64,
    needs: LinkNeeds,
) -> Result<TrialOutcome<R>> {
    let mut geom = lane_rng(base_seed, trial, LANE_GEOMETRY);
    let snap = build_snapshot(params, window, &mut geom)?;

    let cue_distances: Vec<(R, R)> = snap
        .cues
        .iter()
        .map(|c| (c.dist(&snap.amenb()), c.dist(&snap.mc_position)))
        .collect();
    let assignment = assign_subchannel(needs.bh, &cue_distances)?;

    // reuse accounting over the small cells within one mean macrocell area
    let area_bound = params.lambda_m.recip().min(window.area());
    let radius2 = area_bound / real(std::f64::consts::PI);
    let amenb = snap.amenb();
    let in_bound = snap
        .senbs
        .points
        .iter()
        .filter(|p| p.dist2(&amenb) <= radius2)
        .count();
    let flags = vec![params.kappa; in_bound];
    let reuse = reuse_factor::<R>(&flags, area_bound);

    let bh = if needs.bh {
        let mut rng = lane_rng(base_seed, trial, LANE_BH);
        Some(sir_backhaul(&snap, params, &mut rng)?)
    } else {
        None
    };
    let dl = if needs.dl {
        let mut rng = lane_rng(base_seed, trial, LANE_DL);
        Some(sir_cellular_dl(&snap, params, &mut rng)?)
    } else {
        None
    };
    let al = if needs.al {
        let mut rng = lane_rng(base_seed, trial, LANE_AL);
        Some(sir_access_link(&snap, params, &mut rng)?)
    } else {
        None
    };

    Ok(TrialOutcome {
        bh,
        dl,
        al,
        assignment: assignment.mode,
        q_omega: reuse.q_omega,
    })
}

fn collect_trials<R: Real>(config: &ExperimentConfig<R>) -> Result<Vec<TrialOutcome<R>>> {
    config.validate()?;
    let needs = LinkNeeds::from_targets(&config.targets);
    let raw: Vec<Result<TrialOutcome<R>>> = (0..config.n_trials as u64)
        .into_par_iter()
        .map(|trial| run_trial(&config.params, config.window, config.base_seed, trial, needs))
        .collect();
    let mut out = Vec::with_capacity(raw.len());
    for (trial, r) in raw.into_iter().enumerate() {
        match r {
            Ok(t) => out.push(t),
            Err(e) => {
                return Err(Error::Trial {
                    trial,
                    source: Box::new(e),
                })
            }
        }
    }
    Ok(out)
}

fn sample_for<R: Real>(outcome: &TrialOutcome<R>, target: Target) -> Option<&LinkSample<R>> {
    match target {
        Target::PBh | Target::TBh => outcome.bh.as_ref(),
        Target::PDl | Target::TDl => outcome.dl.as_ref(),
        Target::PAl | Target::TAl => outcome.al.as_ref(),
    }
}

/// Sequential Welford reduction over the indexed trial buffer.
fn reduce<R: Real>(
    trials: &[TrialOutcome<R>],
    target: Target,
    theta: R,
) -> Estimate<R> {
    let mut n = 0usize;
    let mut infinite = 0usize;
    let mut mean = R::zero();
    let mut m2 = R::zero();
    for t in trials {
        let Some(sample) = sample_for(t, target) else {
            continue;
        };
        let value = if target.is_rate() {
            if sample.sir.is_infinite() {
                infinite += 1;
                continue;
            }
            sample.sir.ln_1p()
        } else {
            if sample.sir.is_infinite() {
                infinite += 1;
            }
            if sample.success(theta) {
                R::one()
            } else {
                R::zero()
            }
        };
        n += 1;
        let delta = value - mean;
        mean += delta / real(n as f64);
        m2 += delta * (value - mean);
    }
    let ci = if n > 1 {
        let var = m2 / real((n - 1) as f64);
        real::<R>(1.96) * (var / real(n as f64)).sqrt()
    } else {
        R::zero()
    };
    Estimate {
        mean,
        ci95_halfwidth: ci,
        n,
        infinite_sir_count: infinite,
    }
}

fn summarize<R: Real>(
    trials: &[TrialOutcome<R>],
    params: &SystemParams<R>,
    targets: &BTreeSet<Target>,
) -> ExperimentResult<R> {
    let mut estimates = BTreeMap::new();
    for &t in targets {
        estimates.insert(t, reduce(trials, t, params.theta));
    }
    let mut tally = AssignmentTally::default();
    let mut q_sum = 0u64;
    let mut floored = 0u64;
    for t in trials {
        match t.assignment {
            AssignmentMode::ShareWithBackhaul => tally.backhaul += 1,
            AssignmentMode::ShareWithCue(_) => tally.cue += 1,
            AssignmentMode::ExclusiveAl => tally.exclusive += 1,
        }
        q_sum += t.q_omega as u64;
        for s in [&t.bh, &t.dl, &t.al].into_iter().flatten() {
            floored += s.floored_interferers as u64;
        }
    }
    let mean_reuse = if trials.is_empty() {
        R::zero()
    } else {
        real::<R>(q_sum as f64) / real(trials.len() as f64)
    };
    ExperimentResult {
        estimates,
        assignments: tally,
        mean_reuse_factor: mean_reuse,
        floored_interferers: floored,
    }
}

/// Run one experiment: sample `n_trials` snapshots, evaluate the requested
/// links, reduce to estimates.
pub fn run_experiment<R: Real>(config: &ExperimentConfig<R>) -> Result<ExperimentResult<R>> {
    let trials = collect_trials(config)?;
    Ok(summarize(&trials, &config.params, &config.targets))
}

// ---------------------------------------------------------------------------
// parameter sweeps
// ---------------------------------------------------------------------------

/// Scalar parameter a sweep can vary.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepAxis {
    Theta,
    Epsilon,
    Gamma,
    RMu,
    RU,
    RAm,
    RAvMax,
    LambdaM,
    LambdaS,
    PM,
    PS,
    PA,
    KFactor,
}

impl SweepAxis {
    pub fn name(self) -> &'static str {
        match self {
            SweepAxis::Theta => "theta",
            SweepAxis::Epsilon => "epsilon",
            SweepAxis::Gamma => "gamma",
            SweepAxis::RMu => "r_mu",
            SweepAxis::RU => "r_u",
            SweepAxis::RAm => "r_am",
            SweepAxis::RAvMax => "r_av_max",
            SweepAxis::LambdaM => "lambda_m",
            SweepAxis::LambdaS => "lambda_s",
            SweepAxis::PM => "p_m",
            SweepAxis::PS => "p_s",
            SweepAxis::PA => "p_a",
            SweepAxis::KFactor => "k_factor",
        }
    }

    /// Apply a linear-unit value to a copy of the parameters.
    pub fn apply<R: Real>(self, params: &SystemParams<R>, value: R) -> Result<SystemParams<R>> {
        let mut p = *params;
        match self {
            SweepAxis::Theta => p.theta = value,
            SweepAxis::Epsilon => p.epsilon = value,
            SweepAxis::Gamma => p.gamma = value,
            SweepAxis::RMu => p.r_mu = value,
            SweepAxis::RU => p.r_u = value,
            SweepAxis::RAm => p.r_am = value,
            SweepAxis::RAvMax => p.r_av_max = value,
            SweepAxis::LambdaM => p.lambda_m = value,
            SweepAxis::LambdaS => p.lambda_s = value,
            SweepAxis::PM => p.p_m = PowerLevel::from_mw(value)?,
            SweepAxis::PS => p.p_s = PowerLevel::from_mw(value)?,
            SweepAxis::PA => p.p_a = PowerLevel::from_mw(value)?,
            SweepAxis::KFactor => p.k_factor = value,
        }
        p.validate()?;
        Ok(p)
    }

    const ALL: [SweepAxis; 13] = [
        SweepAxis::Theta,
        SweepAxis::Epsilon,
        SweepAxis::Gamma,
        SweepAxis::RMu,
        SweepAxis::RU,
        SweepAxis::RAm,
        SweepAxis::RAvMax,
        SweepAxis::LambdaM,
        SweepAxis::LambdaS,
        SweepAxis::PM,
        SweepAxis::PS,
        SweepAxis::PA,
        SweepAxis::KFactor,
    ];
}

impl FromStr for SweepAxis {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        SweepAxis::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| Error::invalid("axis", format!("unknown sweep axis `{s}`")))
    }
}

/// One target's pair of results at one grid point.
#[derive(Debug, Clone)]
pub struct SweepCell<R: Real> {
    pub analytic: Option<AnalyticResult<R>>,
    pub analytic_error: Option<String>,
    pub estimate: Option<Estimate<R>>,
    pub sim_error: Option<String>,
}

impl<R: Real> Default for SweepCell<R> {
    fn default() -> Self {
        SweepCell {
            analytic: None,
            analytic_error: None,
            estimate: None,
            sim_error: None,
        }
    }
}

/// One grid point.
#[derive(Debug, Clone)]
pub struct SweepRow<R: Real> {
    pub axis_value: R,
    pub cells: BTreeMap<Target, SweepCell<R>>,
}

/// Grid of parameter points with analytic and simulated values side by
/// side.
#[derive(Debug, Clone)]
pub struct SweepTable<R: Real> {
    pub axis: SweepAxis,
    pub targets: BTreeSet<Target>,
    pub rows: Vec<SweepRow<R>>,
}

/// Evaluate the analytic counterpart of a target.
pub fn evaluate_analytic<R: Real>(
    target: Target,
    params: &SystemParams<R>,
    quad: &QuadratureSpec<R>,
) -> Result<AnalyticResult<R>> {
    match target {
        Target::PBh => analytic::p_bh(params, quad),
        Target::PDl => analytic::p_dl(params),
        Target::PAl => analytic::p_al(params),
        Target::TBh => analytic::ergodic_rate_bh(params, quad),
        Target::TDl => analytic::ergodic_rate_dl(params, quad),
        Target::TAl => analytic::ergodic_rate_al(params, quad),
    }
}

/// Run one experiment per grid value plus the matching analytic
/// evaluations. Per-point failures are recorded in the row and the sweep
/// continues.
///
/// For the theta axis the trials are sampled once and every grid point is
/// reduced from the same buffer: theta never enters the sampling path
/// (only the success indicator), so this is bit-identical to re-running
/// the experiment per point with the same seed.
pub fn run_sweep<R: Real>(
    config: &ExperimentConfig<R>,
    axis: SweepAxis,
    grid: &[R],
) -> Result<SweepTable<R>> {
    config.validate()?;
    let quad = QuadratureSpec::default();

    let shared_trials = if axis == SweepAxis::Theta {
        Some(collect_trials(config)?)
    } else {
        None
    };

    let mut rows = Vec::with_capacity(grid.len());
    for &value in grid {
        let mut cells: BTreeMap<Target, SweepCell<R>> = BTreeMap::new();
        match axis.apply(&config.params, value) {
            Ok(point_params) => {
                for &t in &config.targets {
                    let mut cell = SweepCell::default();
                    match evaluate_analytic(t, &point_params, &quad) {
                        Ok(a) => cell.analytic = Some(a),
                        Err(e) => cell.analytic_error = Some(e.to_string()),
                    }
                    cells.insert(t, cell);
                }
                let sim = match &shared_trials {
                    Some(trials) => Ok(summarize(trials, &point_params, &config.targets)),
                    None => {
                        let point_config = ExperimentConfig {
                            params: point_params,
                            ..config.clone()
                        };
                        run_experiment(&point_config)
                    }
                };
                match sim {
                    Ok(result) => {
                        for (t, est) in result.estimates {
                            cells.entry(t).or_default().estimate = Some(est);
                        }
                    }
                    Err(e) => {
                        let msg = e.to_string();
                        for cell in cells.values_mut() {
                            cell.sim_error = Some(msg.clone());
                        }
                    }
                }
            }
            Err(e) => {
                let msg = e.to_string();
                for &t in &config.targets {
                    cells.insert(
                        t,
                        SweepCell {
                            analytic_error: Some(msg.clone()),
                            sim_error: Some(msg.clone()),
                            ..SweepCell::default()
                        },
                    );
                }
            }
        }
        rows.push(SweepRow {
            axis_value: value,
            cells,
        });
    }
    Ok(SweepTable {
        axis,
        targets: config.targets.clone(),
        rows,
    })
}

/// Analytic-only sweep: the same table shape as [`run_sweep`] with the
/// simulation columns left empty.
pub fn analytic_sweep<R: Real>(
    params: &SystemParams<R>,
    axis: SweepAxis,
    grid: &[R],
    targets: &[Target],
) -> SweepTable<R> {
    let quad = QuadratureSpec::default();
    let target_set: BTreeSet<Target> = targets.iter().copied().collect();
    let rows = grid
        .iter()
        .map(|&value| {
            let mut cells: BTreeMap<Target, SweepCell<R>> = BTreeMap::new();
            match axis.apply(params, value) {
                Ok(point_params) => {
                    for &t in &target_set {
                        let mut cell = SweepCell::default();
                        match evaluate_analytic(t, &point_params, &quad) {
                            Ok(a) => cell.analytic = Some(a),
                            Err(e) => cell.analytic_error = Some(e.to_string()),
                        }
                        cells.insert(t, cell);
                    }
                }
                Err(e) => {
                    let msg = e.to_string();
                    for &t in &target_set {
                        cells.insert(
                            t,
                            SweepCell {
                                analytic_error: Some(msg.clone()),
                                ..SweepCell::default()
                            },
                        );
                    }
                }
            }
            SweepRow {
                axis_value: value,
                cells,
            }
        })
        .collect();
    SweepTable {
        axis,
        targets: target_set,
        rows,
    }
}

impl<R: Real> SweepTable<R> {
    /// Header of the long-format CSV schema (one row per target per grid
    /// point), version 1.
    pub const CSV_HEADER: &'static str = "axis,axis_value,target,analytic,analytic_err_est,\
analytic_terms_j,analytic_terms_q,analytic_warnings,analytic_error,sim_mean,sim_ci95,sim_n,\
sim_infinite_sir,sim_error";

    /// Serialize in the long format. Floats use shortest-roundtrip
    /// formatting, so output is byte-stable for identical inputs.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(Self::CSV_HEADER);
        out.push('\n');
        for row in &self.rows {
            for (target, cell) in &row.cells {
                let (a_val, a_err_est, a_j, a_q, a_warn) = match &cell.analytic {
                    Some(a) => (
                        format!("{}", a.value),
                        format!("{}", a.est_error),
                        a.terms_used.0.to_string(),
                        a.terms_used.1.to_string(),
                        a.warnings
                            .iter()
                            .map(|w| w.to_string())
                            .collect::<Vec<_>>()
                            .join("+"),
                    ),
                    None => Default::default(),
                };
                let (s_mean, s_ci, s_n, s_inf) = match &cell.estimate {
                    Some(e) => (
                        format!("{}", e.mean),
                        format!("{}", e.ci95_halfwidth),
                        e.n.to_string(),
                        e.infinite_sir_count.to_string(),
                    ),
                    None => Default::default(),
                };
                out.push_str(&format!(
                    "{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
                    self.axis.name(),
                    row.axis_value,
                    target.name(),
                    a_val,
                    a_err_est,
                    a_j,
                    a_q,
                    a_warn,
                    csv_escape(cell.analytic_error.as_deref().unwrap_or("")),
                    s_mean,
                    s_ci,
                    s_n,
                    s_inf,
                    csv_escape(cell.sim_error.as_deref().unwrap_or("")),
                ));
            }
        }
        out
    }
}

fn csv_escape(s: &str) -> String {
    if s.contains(',') || s.contains('"') || s.contains('\n') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}
