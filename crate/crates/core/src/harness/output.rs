//! Result files: `trajectories.csv`, `aggregate.csv`, `rate_vs_step.svg`,
//! `manifest.txt` and, when some runs failed, `failures.csv`.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::channel::{magnitude_raster, ChannelField};
use crate::error::{Error, Result};
use crate::geometry::Bounds;
use crate::harness::sweep::{AggregateRow, ExperimentResult};

pub const TRAJECTORIES_FILE: &str = "trajectories.csv";
pub const AGGREGATE_FILE: &str = "aggregate.csv";
pub const PLOT_FILE: &str = "rate_vs_step.svg";
pub const MANIFEST_FILE: &str = "manifest.txt";
pub const FAILURES_FILE: &str = "failures.csv";
pub const FIELD_RASTER_FILE: &str = "field_raster.csv";

pub const TRAJECTORY_HEADER: [&str; 10] = [
    "helper_count",
    "seed",
    "step",
    "helper_index",
    "x",
    "y",
    "phi_r",
    "phi_col",
    "objective",
    "secrecy_rate",
];

pub const AGGREGATE_HEADER: [&str; 6] =
    ["helper_count", "step", "median_rate", "q25", "q75", "r_sup"];

fn csv_err(path: &Path, e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        other => Error::io(path, std::io::Error::other(format!("{other:?}"))),
    }
}

pub fn trajectories_csv(result: &ExperimentResult) -> Result<Vec<u8>> {
    let path = Path::new(TRAJECTORIES_FILE);
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(TRAJECTORY_HEADER)
        .map_err(|e| csv_err(path, e))?;
    for cell in &result.cells {
        let Ok(record) = &cell.outcome else { continue };
        for state in &record.states {
            for (r, p) in state.positions.iter().enumerate() {
                w.write_record([
                    cell.helper_count.to_string(),
                    cell.seed.to_string(),
                    state.step.to_string(),
                    r.to_string(),
                    p.x.to_string(),
                    p.y.to_string(),
                    state.phi[r].to_string(),
                    state.phi_col[r].to_string(),
                    state.objective.to_string(),
                    state.rate.secrecy_rate.to_string(),
                ])
                .map_err(|e| csv_err(path, e))?;
            }
        }
    }
    w.into_inner().map_err(|e| Error::io(path, e.into_error()))
}

/// `|α|` of the Bob and Eve fading maps on a grid of spacing `resolution`.
pub fn field_raster_csv(field: &ChannelField, region: &Bounds, resolution: f64) -> Result<Vec<u8>> {
    let path = Path::new(FIELD_RASTER_FILE);
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["map", "x", "y", "abs_alpha"])
        .map_err(|e| csv_err(path, e))?;
    for (name, map) in [("bob", &field.bob_map), ("eve", &field.eve_map)] {
        for (x, y, a) in magnitude_raster(map, region, resolution) {
            w.write_record([
                name.to_string(),
                x.to_string(),
                y.to_string(),
                a.to_string(),
            ])
            .map_err(|e| csv_err(path, e))?;
        }
    }
    w.into_inner().map_err(|e| Error::io(path, e.into_error()))
}

pub fn aggregate_csv(rows: &[AggregateRow]) -> Result<Vec<u8>> {
    let path = Path::new(AGGREGATE_FILE);
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(AGGREGATE_HEADER)
        .map_err(|e| csv_err(path, e))?;
    for a in rows {
        w.write_record([
            a.helper_count.to_string(),
            a.step.to_string(),
            a.median_rate.to_string(),
            a.q25.to_string(),
            a.q75.to_string(),
            a.r_sup.to_string(),
        ])
        .map_err(|e| csv_err(path, e))?;
    }
    w.into_inner().map_err(|e| Error::io(path, e.into_error()))
}

fn failures_csv(result: &ExperimentResult) -> Result<Vec<u8>> {
    let path = Path::new(FAILURES_FILE);
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["helper_count", "seed", "error"])
        .map_err(|e| csv_err(path, e))?;
    for cell in result.failures() {
        let msg = cell.outcome.as_ref().err().cloned().unwrap_or_default();
        w.write_record([cell.helper_count.to_string(), cell.seed.to_string(), msg])
            .map_err(|e| csv_err(path, e))?;
    }
    w.into_inner().map_err(|e| Error::io(path, e.into_error()))
}

const PALETTE: [&str; 8] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#17becf",
];

/// Median clamped secrecy rate per step, one polyline per helper count, with
/// the supremum as a dashed line.
pub fn plot_svg(result: &ExperimentResult) -> String {
    let (w, h) = (720.0, 480.0);
    let (left, right, top, bottom) = (64.0, 150.0, 24.0, 52.0);
    let pw = w - left - right;
    let ph = h - top - bottom;
    let max_step = result
        .aggregate
        .iter()
        .map(|a| a.step)
        .max()
        .unwrap_or(0)
        .max(1) as f64;
    let r_sup = result.aggregate.first().map(|a| a.r_sup).unwrap_or(1.0);
    let y_max = (r_sup * 1.1).max(1.0).ceil();
    let sx = |step: f64| left + pw * step / max_step;
    let sy = |rate: f64| top + ph * (1.0 - rate / y_max);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#
    );
    for k in 0..=y_max as usize {
        let y = sy(k as f64);
        let _ = writeln!(
            s,
            r##"<line x1="{left}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#ddd"/><text x="{:.2}" y="{:.2}" text-anchor="end">{k}</text>"##,
            left + pw,
            left - 6.0,
            y + 4.0
        );
    }
    let ticks = 5;
    for k in 0..=ticks {
        let step = (max_step * k as f64 / ticks as f64).round();
        let x = sx(step);
        let _ = writeln!(
            s,
            r#"<text x="{x:.2}" y="{:.2}" text-anchor="middle">{step}</text>"#,
            top + ph + 18.0
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">motion step</text>"#,
        left + pw / 2.0,
        h - 10.0
    );
    let _ = writeln!(
        s,
        r#"<text transform="translate(16 {:.2}) rotate(-90)" text-anchor="middle">secrecy rate (bits/channel use)</text>"#,
        top + ph / 2.0
    );
    let y = sy(r_sup);
    let _ = writeln!(
        s,
        r#"<line x1="{left}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="black" stroke-dasharray="6 4"/>"#,
        left + pw
    );
    let legend_x = left + pw + 16.0;
    let _ = writeln!(
        s,
        r#"<line x1="{legend_x:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="black" stroke-dasharray="6 4"/><text x="{:.2}" y="{:.2}">R_sup</text>"#,
        top + 10.0,
        legend_x + 24.0,
        top + 10.0,
        legend_x + 30.0,
        top + 14.0
    );
    for (i, &count) in result.helper_counts.iter().enumerate() {
        let rows = result.aggregate_for(count);
        if rows.is_empty() {
            continue;
        }
        let color = PALETTE[i % PALETTE.len()];
        let points: Vec<String> = rows
            .iter()
            .map(|a| format!("{:.2},{:.2}", sx(a.step as f64), sy(a.median_rate.max(0.0))))
            .collect();
        let _ = writeln!(
            s,
            r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
            points.join(" ")
        );
        let ly = top + 30.0 + 18.0 * i as f64;
        let _ = writeln!(
            s,
            r#"<line x1="{legend_x:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{color}" stroke-width="2"/><text x="{:.2}" y="{:.2}">{count} helper{}</text>"#,
            legend_x + 24.0,
            legend_x + 30.0,
            ly + 4.0,
            if count == 1 { "" } else { "s" }
        );
    }
    s.push_str("</svg>\n");
    s
}

pub fn manifest(result: &ExperimentResult) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "# cojam {}", env!("CARGO_PKG_VERSION"));
    let _ = writeln!(
        s,
        "# cells: {} ({} failed)",
        result.cells.len(),
        result.failures().count()
    );
    let _ = writeln!(
        s,
        "# resolved configuration follows; it parses as a config file"
    );
    let config = result.config.clone();
    let config = crate::harness::config::ResolvedConfig {
        helper_counts: result.helper_counts.clone(),
        ..config
    };
    s.push_str(&config.to_toml_string());
    s
}

fn write(dir: &Path, name: &str, bytes: &[u8]) -> Result<PathBuf> {
    let path = dir.join(name);
    fs::write(&path, bytes).map_err(|e| Error::io(&path, e))?;
    Ok(path)
}

/// Writes every result file into `out_dir`, creating it if needed.
pub fn emit_outputs(result: &ExperimentResult, out_dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let mut written = vec![
        write(out_dir, TRAJECTORIES_FILE, &trajectories_csv(result)?)?,
        write(out_dir, AGGREGATE_FILE, &aggregate_csv(&result.aggregate)?)?,
        write(out_dir, PLOT_FILE, plot_svg(result).as_bytes())?,
        write(out_dir, MANIFEST_FILE, manifest(result).as_bytes())?,
    ];
    let failures = out_dir.join(FAILURES_FILE);
    if result.has_failures() {
        written.push(write(out_dir, FAILURES_FILE, &failures_csv(result)?)?);
    } else if failures.exists() {
        fs::remove_file(&failures).map_err(|e| Error::io(&failures, e))?;
    }
    Ok(written)
}

/// Writes `field_raster.csv` into `out_dir`, creating it if needed.
pub fn emit_field_raster(
    field: &ChannelField,
    region: &Bounds,
    resolution: f64,
    out_dir: &Path,
) -> Result<PathBuf> {
    fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    write(
        out_dir,
        FIELD_RASTER_FILE,
        &field_raster_csv(field, region, resolution)?,
    )
}
