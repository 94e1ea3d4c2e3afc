//! CSV emission. One metadata comment line (tool version, seed, config
//! hash), then a header row, then data; floats in shortest-roundtrip form
//! so reruns of the same configuration are byte-identical.

use std::fmt::Write as _;

use mobicell::montecarlo::SweepTable;

pub const SCHEMA_VERSION: u32 = 1;

pub fn metadata_line(command: &str, seed: u64, config_sha256: &str) -> String {
    format!(
        "# mobicell v{} schema={} command={} seed={} config_sha256={}",
        env!("CARGO_PKG_VERSION"),
        SCHEMA_VERSION,
        command,
        seed,
        config_sha256
    )
}

/// Long-format sweep CSV: the core schema prefixed with the series
/// columns (empty when the run has no series dimension).
pub fn sweep_csv(
    meta: &str,
    series_axis: Option<&str>,
    series: &[(f64, SweepTable<f64>)],
) -> String {
    let mut out = String::new();
    out.push_str(meta);
    out.push('\n');
    out.push_str("series_axis,series_value,");
    out.push_str(SweepTable::<f64>::CSV_HEADER);
    out.push('\n');
    for (value, table) in series {
        let body = table.to_csv();
        for line in body.lines().skip(1) {
            match series_axis {
                Some(name) => {
                    let _ = writeln!(out, "{name},{value},{line}");
                }
                None => {
                    let _ = writeln!(out, ",,{line}");
                }
            }
        }
    }
    out
}

/// Power-control CSV: one row per requested AL success target.
pub fn power_control_csv(meta: &str, rows: &[PowerControlRow]) -> String {
    let mut out = String::new();
    out.push_str(meta);
    out.push('\n');
    out.push_str("target_p_al,feasible,xi,p_a_mw,p_a_dbm,p_bh,p_al_roundtrip,error\n");
    for r in rows {
        let fmt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            r.target,
            r.feasible,
            r.xi,
            fmt(r.p_a_mw),
            fmt(r.p_a_dbm),
            fmt(r.p_bh),
            fmt(r.p_al_roundtrip),
            r.error.as_deref().unwrap_or("")
        );
    }
    out
}

pub struct PowerControlRow {
    pub target: f64,
    pub feasible: bool,
    pub xi: f64,
    pub p_a_mw: Option<f64>,
    pub p_a_dbm: Option<f64>,
    pub p_bh: Option<f64>,
    pub p_al_roundtrip: Option<f64>,
    pub error: Option<String>,
}
