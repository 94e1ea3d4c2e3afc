//! Command implementations shared by the four subcommands.

use std::fmt;
use std::fs;
use std::path::Path;
use std::time::Instant;

use anyhow::{anyhow, Context};
use sha2::{Digest, Sha256};

use mobicell::analytic::{
    self, p_bh_kappa0_with_y2, p_bh_kappa1_with_y1, QuadratureSpec,
};
use mobicell::channel::linear_to_dbm;
use mobicell::montecarlo::{
    analytic_sweep, evaluate_analytic, run_experiment, run_sweep, SweepAxis, SweepCell, SweepRow,
    SweepTable, Target,
};
use mobicell::params::SystemParams;
use mobicell::Error as CoreError;

use crate::config::{self, ConfigAxis, RunConfig};
use crate::manifest::RunManifest;
use crate::output::{self, PowerControlRow};
use crate::svg;
use crate::RunArgs;
use crate::{EXIT_CONFIG, EXIT_NUMERICAL};

pub struct CommandError {
    inner: anyhow::Error,
    code: u8,
}

impl CommandError {
    fn config(inner: anyhow::Error) -> Self {
        Self {
            inner,
            code: EXIT_CONFIG,
        }
    }
    fn numerical(inner: anyhow::Error) -> Self {
        Self {
            inner,
            code: EXIT_NUMERICAL,
        }
    }
    fn io(inner: anyhow::Error) -> Self {
        Self { inner, code: 1 }
    }
    pub fn exit_code(&self) -> u8 {
        self.code
    }
}

impl fmt::Display for CommandError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:#}", self.inner)
    }
}

impl fmt::Debug for CommandError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.inner)
    }
}

type CmdResult<T> = Result<T, CommandError>;

pub fn run(command: &str, args: &RunArgs) -> CmdResult<()> {
    let started = Instant::now();
    let bytes = fs::read(&args.config)
        .with_context(|| format!("cannot read config {}", args.config.display()))
        .map_err(CommandError::config)?;
    let sha = hex::encode(Sha256::digest(&bytes));
    let mut cfg = config::parse(&bytes).map_err(CommandError::config)?;
    if let Some(seed) = args.seed {
        cfg.base_seed = seed;
    }
    if let Some(trials) = args.trials {
        cfg.n_trials = trials;
    }
    fs::create_dir_all(&args.out)
        .with_context(|| format!("cannot create output dir {}", args.out.display()))
        .map_err(CommandError::io)?;
    let meta = output::metadata_line(command, cfg.base_seed, &sha);

    let emitted = match command {
        "analytic" => cmd_analytic(&cfg, &meta, &args.out)?,
        "simulate" => cmd_simulate(&cfg, &meta, &args.out, args.svg)?,
        "sweep" => cmd_sweep(&cfg, &meta, &args.out, args.svg)?,
        "power-control" => cmd_power_control(&cfg, &meta, &args.out)?,
        other => {
            return Err(CommandError::config(anyhow!("unknown command {other}")));
        }
    };

    RunManifest {
        command: command.to_string(),
        config_path: args.config.display().to_string(),
        output_dir: args.out.display().to_string(),
        emitted_files: emitted,
        wall_time_seconds: started.elapsed().as_secs_f64(),
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        base_seed: cfg.base_seed,
        config_sha256: sha,
    }
    .write(&args.out)
    .map_err(CommandError::io)?;
    Ok(())
}

/// The sweep dimensions of a config, resolved to library axes and linear
/// grids, with the original config-unit values kept for display.
struct ResolvedSweep {
    axis: SweepAxis,
    axis_name: String,
    grid_linear: Vec<f64>,
    grid_display: Vec<f64>,
    series: Vec<SeriesPoint>,
    series_axis: Option<String>,
}

struct SeriesPoint {
    display: f64,
    params: SystemParams<f64>,
}

fn resolve_sweep(cfg: &RunConfig) -> anyhow::Result<ResolvedSweep> {
    let sweep = cfg
        .sweep
        .as_ref()
        .ok_or_else(|| anyhow!("this command requires a `sweep` block in the config"))?;
    if sweep.grid.is_empty() {
        return Err(anyhow!("invalid config field `sweep.grid`: empty"));
    }
    let axis = match config::parse_axis(&sweep.axis)? {
        ConfigAxis::Core(a) => a,
        ConfigAxis::Kappa => {
            return Err(anyhow!("kappa can only be a series axis, not the sweep axis"))
        }
    };
    let grid_linear: Vec<f64> = sweep
        .grid
        .iter()
        .map(|&v| ConfigAxis::Core(axis).to_linear(&sweep.axis, v))
        .collect();

    let base = cfg.params.to_params()?;
    let series = match (&sweep.series_axis, sweep.series_values.is_empty()) {
        (Some(name), false) => {
            let saxis = config::parse_axis(name)?;
            sweep
                .series_values
                .iter()
                .map(|&v| {
                    let params = match saxis {
                        ConfigAxis::Kappa => {
                            let mut p = base;
                            p.kappa = v != 0.0;
                            Ok(p)
                        }
                        ConfigAxis::Core(a) => {
                            a.apply(&base, saxis.to_linear(name, v)).map_err(|e| anyhow!("{e}"))
                        }
                    }?;
                    Ok(SeriesPoint { display: v, params })
                })
                .collect::<anyhow::Result<Vec<_>>>()?
        }
        (Some(_), true) => {
            return Err(anyhow!("series_axis given but series_values is empty"))
        }
        (None, _) => vec![SeriesPoint {
            display: 0.0,
            params: base,
        }],
    };
    Ok(ResolvedSweep {
        axis,
        axis_name: sweep.axis.clone(),
        grid_linear,
        grid_display: sweep.grid.clone(),
        series,
        series_axis: sweep.series_axis.clone(),
    })
}

fn cmd_analytic(cfg: &RunConfig, meta: &str, out: &Path) -> CmdResult<Vec<String>> {
    let experiment = cfg.to_experiment().map_err(CommandError::config)?;
    let resolved = resolve_sweep(cfg).map_err(CommandError::config)?;
    let targets: Vec<Target> = experiment.targets.iter().copied().collect();
    let mut tables = Vec::new();
    for point in &resolved.series {
        let table = analytic_sweep(&point.params, resolved.axis, &resolved.grid_linear, &targets);
        tables.push((point.display, table));
    }
    let csv = output::sweep_csv(meta, resolved.series_axis.as_deref(), &tables);
    write_file(out, "analytic.csv", &csv)?;
    Ok(vec!["analytic.csv".into()])
}

fn cmd_simulate(cfg: &RunConfig, meta: &str, out: &Path, svg: bool) -> CmdResult<Vec<String>> {
    let experiment = cfg.to_experiment().map_err(CommandError::config)?;
    let result = run_experiment(&experiment)
        .map_err(|e| CommandError::numerical(anyhow!("{e}")))?;
    let quad = QuadratureSpec::default();
    let mut cells = std::collections::BTreeMap::new();
    for (&target, est) in &result.estimates {
        let mut cell = SweepCell {
            estimate: Some(*est),
            ..SweepCell::default()
        };
        match evaluate_analytic(target, &experiment.params, &quad) {
            Ok(a) => cell.analytic = Some(a),
            Err(e) => cell.analytic_error = Some(e.to_string()),
        }
        cells.insert(target, cell);
    }
    let table = SweepTable {
        axis: SweepAxis::Theta,
        targets: experiment.targets.clone(),
        rows: vec![SweepRow {
            axis_value: experiment.params.theta,
            cells,
        }],
    };
    let tables = vec![(0.0, table)];
    let csv = output::sweep_csv(meta, None, &tables);
    write_file(out, "simulate.csv", &csv)?;
    let mut emitted = vec!["simulate.csv".into()];
    if svg {
        let doc = sweep_svg(
            "simulate",
            "theta (linear)",
            None,
            &[experiment.params.theta],
            &tables,
        );
        write_file(out, "simulate.svg", &doc)?;
        emitted.push("simulate.svg".into());
    }
    Ok(emitted)
}

fn cmd_sweep(cfg: &RunConfig, meta: &str, out: &Path, svg: bool) -> CmdResult<Vec<String>> {
    let experiment = cfg.to_experiment().map_err(CommandError::config)?;
    let resolved = resolve_sweep(cfg).map_err(CommandError::config)?;
    let mut tables = Vec::new();
    for point in &resolved.series {
        let mut point_config = experiment.clone();
        point_config.params = point.params;
        let table = run_sweep(&point_config, resolved.axis, &resolved.grid_linear)
            .map_err(|e| CommandError::numerical(anyhow!("{e}")))?;
        tables.push((point.display, table));
    }
    let csv = output::sweep_csv(meta, resolved.series_axis.as_deref(), &tables);
    write_file(out, "sweep.csv", &csv)?;
    let mut emitted = vec!["sweep.csv".into()];
    if svg {
        let doc = sweep_svg(
            "sweep",
            &resolved.axis_name,
            resolved.series_axis.as_deref(),
            &resolved.grid_display,
            &tables,
        );
        write_file(out, "sweep.svg", &doc)?;
        emitted.push("sweep.svg".into());
    }
    Ok(emitted)
}

fn cmd_power_control(cfg: &RunConfig, meta: &str, out: &Path) -> CmdResult<Vec<String>> {
    let params = cfg.params.to_params().map_err(CommandError::config)?;
    let pc = cfg
        .power_control
        .as_ref()
        .ok_or_else(|| CommandError::config(anyhow!("power-control requires a `power_control` block")))?;
    if pc.targets.is_empty() {
        return Err(CommandError::config(anyhow!(
            "invalid config field `power_control.targets`: empty"
        )));
    }
    let quad = QuadratureSpec::default();
    let xi = analytic::xi_value(&params)
        .map_err(|e| CommandError::numerical(anyhow!("{e}")))?;
    let mut rows = Vec::new();
    for &target in &pc.targets {
        let row = match analytic::al_transmit_power(target, &params) {
            Ok(p_a) => {
                let result: mobicell::Result<(f64, f64)> = (|| {
                    let (y1, y2) = analytic::success_link_params(&params, target)?;
                    let p_bh = if params.kappa {
                        p_bh_kappa1_with_y1(&params, y1, &quad)?.value
                    } else {
                        p_bh_kappa0_with_y2(&params, y2, &quad)?.value
                    };
                    let roundtrip = analytic::p_al_exponential_form(p_a, &params)?;
                    Ok((p_bh, roundtrip))
                })();
                match result {
                    Ok((p_bh, roundtrip)) => PowerControlRow {
                        target,
                        feasible: true,
                        xi,
                        p_a_mw: Some(p_a.mw()),
                        p_a_dbm: Some(linear_to_dbm(p_a)),
                        p_bh: Some(p_bh),
                        p_al_roundtrip: Some(roundtrip),
                        error: None,
                    },
                    Err(e) => PowerControlRow {
                        target,
                        feasible: true,
                        xi,
                        p_a_mw: Some(p_a.mw()),
                        p_a_dbm: Some(linear_to_dbm(p_a)),
                        p_bh: None,
                        p_al_roundtrip: None,
                        error: Some(e.to_string()),
                    },
                }
            }
            Err(e @ CoreError::Infeasible { .. }) => PowerControlRow {
                target,
                feasible: false,
                xi,
                p_a_mw: None,
                p_a_dbm: None,
                p_bh: None,
                p_al_roundtrip: None,
                error: Some(e.to_string()),
            },
            Err(e) => return Err(CommandError::numerical(anyhow!("{e}"))),
        };
        rows.push(row);
    }
    let csv = output::power_control_csv(meta, &rows);
    write_file(out, "power_control.csv", &csv)?;
    Ok(vec!["power_control.csv".into()])
}

fn sweep_svg(
    title: &str,
    axis_name: &str,
    series_axis: Option<&str>,
    grid_display: &[f64],
    tables: &[(f64, SweepTable<f64>)],
) -> String {
    let mut series = Vec::new();
    let mut slot = 0usize;
    for (sval, table) in tables {
        for &target in &table.targets {
            let suffix = match series_axis {
                Some(name) => format!(", {name}={sval}"),
                None => String::new(),
            };
            let mut analytic_pts = Vec::new();
            let mut sim_pts = Vec::new();
            let mut whiskers = Vec::new();
            for (row, &x) in table.rows.iter().zip(grid_display) {
                if let Some(cell) = row.cells.get(&target) {
                    if let Some(a) = &cell.analytic {
                        analytic_pts.push((x, a.value));
                    }
                    if let Some(e) = &cell.estimate {
                        sim_pts.push((x, e.mean));
                        whiskers.push(e.ci95_halfwidth);
                    }
                }
            }
            if !analytic_pts.is_empty() {
                series.push(svg::Series {
                    label: format!("{} analytic{suffix}", target.name()),
                    color_index: slot,
                    points: analytic_pts,
                    whiskers: None,
                    markers: false,
                });
            }
            if !sim_pts.is_empty() {
                series.push(svg::Series {
                    label: format!("{} simulated{suffix}", target.name()),
                    color_index: slot,
                    points: sim_pts,
                    whiskers: Some(whiskers),
                    markers: true,
                });
            }
            slot += 1;
        }
    }
    svg::line_plot(&format!("mobicell {title}"), axis_name, "value", &series)
}

fn write_file(dir: &Path, name: &str, body: &str) -> CmdResult<()> {
    fs::write(dir.join(name), body)
        .with_context(|| format!("cannot write {name}"))
        .map_err(CommandError::io)
}
