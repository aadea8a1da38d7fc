//! CSV and gnuplot writers, plus the grid reader used by `awg pnd`.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::config::ExperimentConfig;
use crate::ensemble::EnsembleRun;
use crate::error::{Error, Result};
use crate::experiment::SummaryRow;
use crate::observables::{g2, participation_number, EnsembleStats, G2Outcome};
use crate::phase_space::{GridSpec, PhotonNumberDistribution, WignerGrid};
use crate::states::StateSpec;

/// Written in place of an undefined g².
pub const NO_SIGNAL: &str = "no-signal";
/// Written in place of an undefined standard error (a single realization).
pub const UNDEFINED: &str = "undefined";

/// 17 significant digits.
pub fn real(v: f64) -> String {
    format!("{v:.16e}")
}

/// Shortest decimal form, for file names.
pub fn number_tag(v: f64) -> String {
    format!("{v}")
}

fn write(path: &Path, text: String) -> Result<PathBuf> {
    std::fs::write(path, text).map_err(|e| Error::io(path, e))?;
    Ok(path.to_path_buf())
}

fn opt(v: Option<f64>, missing: &str) -> String {
    v.map(real).unwrap_or_else(|| missing.to_string())
}

pub const SUMMARY_HEADER: &str =
    "state,delta_over_C,z,guide_index,mean_intensity,g2_medium_factor,g2,participation,intensity_variance";

pub fn write_summary(path: &Path, rows: &[SummaryRow]) -> Result<PathBuf> {
    let mut out = String::with_capacity(rows.len() * 180);
    out.push_str(SUMMARY_HEADER);
    out.push('\n');
    for r in rows {
        let (medium, total) = match r.g2 {
            G2Outcome::Value(f) => (real(f.medium), real(f.total)),
            G2Outcome::NoSignal => (NO_SIGNAL.into(), NO_SIGNAL.into()),
        };
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            r.state,
            real(r.delta_over_c),
            real(r.z),
            r.guide_index,
            real(r.mean_intensity),
            medium,
            total,
            real(r.participation),
            real(r.intensity_variance)
        );
    }
    write(path, out)
}

/// Normalised intensity profile ⟨|G_j|²⟩ (state independent) at one checkpoint.
pub fn write_profile(path: &Path, stats: &EnsembleStats, z_idx: usize) -> Result<PathBuf> {
    let mut out = String::from("guide_index,mean_abs2,sem_abs2\n");
    for j in 1..=stats.guide_count {
        let _ = writeln!(
            out,
            "{j},{},{}",
            real(stats.mean_abs2(j, z_idx)?),
            opt(stats.sem_abs2(j, z_idx)?, UNDEFINED)
        );
    }
    write(path, out)
}

pub fn write_participation(path: &Path, stats: &EnsembleStats) -> Result<PathBuf> {
    let mut out = String::from("z,participation\n");
    for (k, &z) in stats.checkpoints.iter().enumerate() {
        let _ = writeln!(out, "{},{}", real(z), real(participation_number(stats, k)?));
    }
    write(path, out)
}

/// g² at the injection guide versus Δ/C for every state, at one checkpoint.
pub fn write_g2_scan(
    path: &Path,
    runs: &[EnsembleRun],
    states: &[StateSpec],
    z_idx: usize,
) -> Result<PathBuf> {
    let mut out = String::from("state,delta_over_C,g2_medium_factor,g2_medium_sem,g2\n");
    for state in states {
        let moments = state.moments();
        for run in runs {
            let j0 = run.stats.injection_index;
            let (medium, total) = match g2(&run.stats, &moments, j0, z_idx)? {
                G2Outcome::Value(f) => (real(f.medium), real(f.total)),
                G2Outcome::NoSignal => (NO_SIGNAL.into(), NO_SIGNAL.into()),
            };
            let _ = writeln!(
                out,
                "{},{},{medium},{},{total}",
                state.label(),
                real(run.delta_over_c),
                opt(run.stats.sem_medium_factor(j0, z_idx)?, UNDEFINED)
            );
        }
    }
    write(path, out)
}

/// One script per figure class: profiles, participation, g² scans.
pub fn write_gnuplot_scripts(dir: &Path, config: &ExperimentConfig) -> Result<Vec<PathBuf>> {
    let exp = &config.experiment;
    let mut files = Vec::new();

    let mut s = String::from("set datafile separator ','\nset key autotitle columnhead\n");
    s.push_str("set logscale y\nset xlabel 'guide'\nset ylabel '<|G|^2>'\n");
    for &d in &config.delta_over_c {
        let _ = writeln!(s, "set title 'Delta/C = {d}'");
        let plots: Vec<String> = config
            .z_checkpoints
            .iter()
            .map(|&z| {
                format!(
                    "'{exp}_profile_{}_{}.csv' using 1:2 with lines title 'z = {z}'",
                    number_tag(d),
                    number_tag(z)
                )
            })
            .collect();
        let _ = writeln!(s, "plot {}\npause -1", plots.join(", \\\n     "));
    }
    files.push(write(&dir.join(format!("{exp}_profiles.gp")), s)?);

    let mut s = String::from("set datafile separator ','\nset xlabel 'z'\nset ylabel 'P(z)'\n");
    let plots: Vec<String> = config
        .delta_over_c
        .iter()
        .map(|&d| format!("'{exp}_participation_{}.csv' using 1:2 with lines title 'Delta/C = {d}'", number_tag(d)))
        .collect();
    let _ = writeln!(s, "plot {}\npause -1", plots.join(", \\\n     "));
    files.push(write(&dir.join(format!("{exp}_participation.gp")), s)?);

    let mut s = String::from("set datafile separator ','\nset xlabel 'Delta/C'\nset ylabel 'g2'\n");
    for &z in &config.z_checkpoints {
        let _ = writeln!(s, "set title 'z = {z}'");
        let ztag = number_tag(z);
        let plots: Vec<String> = config
            .input_states
            .iter()
            .map(|st| {
                let label = st.label();
                format!(
                    "'{exp}_g2_{ztag}.csv' using 2:(strcol(1) eq '{label}' ? $5 : NaN) with linespoints title '{label}'"
                )
            })
            .collect();
        let _ = writeln!(s, "plot {}\npause -1", plots.join(", \\\n     "));
    }
    files.push(write(&dir.join(format!("{exp}_g2.gp")), s)?);
    Ok(files)
}

const GRID_COMMENT: &str = "# wigner-grid";

pub fn write_wigner_csv(path: &Path, grid: &WignerGrid) -> Result<PathBuf> {
    let mut out = format!("{GRID_COMMENT} realizations={}", grid.realization_count);
    if let Some(n) = grid.truncation {
        let _ = write!(out, " truncation={n}");
    }
    out.push_str("\nx,y,W\n");
    for (k, row) in grid.values.iter().enumerate() {
        let y = real(grid.spec.y(k));
        for (i, w) in row.iter().enumerate() {
            let _ = writeln!(out, "{},{y},{}", real(grid.spec.x(i)), real(*w));
        }
    }
    write(path, out)
}

/// gnuplot `nonuniform matrix` layout: first row `nx x_0 … x_{nx−1}`, then
/// `y_k W(x_0, y_k) …` per row.
pub fn write_wigner_matrix(path: &Path, grid: &WignerGrid) -> Result<PathBuf> {
    let nx = grid.spec.nx();
    let mut out = format!("{nx}");
    for i in 0..nx {
        let _ = write!(out, " {}", real(grid.spec.x(i)));
    }
    out.push('\n');
    for (k, row) in grid.values.iter().enumerate() {
        out.push_str(&real(grid.spec.y(k)));
        for w in row {
            let _ = write!(out, " {}", real(*w));
        }
        out.push('\n');
    }
    write(path, out)
}

pub fn write_pnd(path: &Path, pnd: &PhotonNumberDistribution) -> Result<PathBuf> {
    let mut out = format!("# raw_total={}\nn,P_raw,P_normalized\n", real(pnd.raw_total));
    for (n, (r, p)) in pnd.raw.iter().zip(&pnd.normalized).enumerate() {
        let _ = writeln!(out, "{n},{},{}", real(*r), real(*p));
    }
    write(path, out)
}

/// Inverse of [`write_wigner_csv`]. Nodes must form a full, regular grid.
pub fn read_wigner_csv(path: &Path) -> Result<WignerGrid> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let err = |line: usize, reason: String| Error::Parse {
        what: "Wigner grid CSV",
        line,
        reason,
    };
    let mut realization_count = 1;
    let mut truncation = None;
    let mut nodes: Vec<(f64, f64, f64)> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let n = i + 1;
        let line = line.trim();
        if let Some(rest) = line.strip_prefix(GRID_COMMENT) {
            for kv in rest.split_whitespace() {
                let parsed = match kv.split_once('=') {
                    Some(("realizations", v)) => v.parse().map(|v| realization_count = v).is_ok(),
                    Some(("truncation", v)) => v.parse().map(|v| truncation = Some(v)).is_ok(),
                    _ => true,
                };
                if !parsed {
                    return Err(err(n, format!("bad header field `{kv}`")));
                }
            }
            continue;
        }
        if line.is_empty() || line.starts_with('#') || line.starts_with('x') {
            continue;
        }
        let f: Vec<f64> = line
            .split(',')
            .map(|s| s.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| err(n, e.to_string()))?;
        if f.len() != 3 {
            return Err(err(n, format!("expected 3 fields, found {}", f.len())));
        }
        nodes.push((f[0], f[1], f[2]));
    }
    if nodes.is_empty() {
        return Err(err(0, "no grid nodes".into()));
    }

    let axis = |pick: fn(&(f64, f64, f64)) -> f64| {
        let mut v: Vec<f64> = nodes.iter().map(pick).collect();
        v.sort_by(f64::total_cmp);
        v.dedup();
        v
    };
    let xs = axis(|n| n.0);
    let ys = axis(|n| n.1);
    if xs.len() < 2 || ys.len() < 2 || xs.len() * ys.len() != nodes.len() {
        return Err(err(0, format!("{} nodes do not form a regular grid", nodes.len())));
    }
    let spec = GridSpec {
        x_min: xs[0],
        x_max: xs[xs.len() - 1],
        y_min: ys[0],
        y_max: ys[ys.len() - 1],
        dx: (xs[xs.len() - 1] - xs[0]) / (xs.len() - 1) as f64,
        dy: (ys[ys.len() - 1] - ys[0]) / (ys.len() - 1) as f64,
    };
    let mut values = vec![vec![f64::NAN; xs.len()]; ys.len()];
    for &(x, y, w) in &nodes {
        let i = ((x - spec.x_min) / spec.dx).round() as usize;
        let k = ((y - spec.y_min) / spec.dy).round() as usize;
        if (spec.x(i) - x).abs() > 1e-9 * spec.dx || (spec.y(k) - y).abs() > 1e-9 * spec.dy {
            return Err(err(0, format!("node ({x}, {y}) is off the regular grid")));
        }
        values[k][i] = w;
    }
    if values.iter().flatten().any(|v| v.is_nan()) {
        return Err(err(0, "grid has missing nodes".into()));
    }
    Ok(WignerGrid {
        spec,
        values,
        realization_count,
        truncation,
    })
}
