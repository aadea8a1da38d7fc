//! Full experiments: one shared Green ensemble per Δ/C, every input state
//! evaluated against it, results written as CSV.

use std::path::{Path, PathBuf};

use crate::archive::RealizationArchive;
use crate::config::ExperimentConfig;
use crate::ensemble::{run_ensemble, ArchiveCapture, EnsembleRequest, EnsembleRun};
use crate::error::{Error, Result};
use crate::observables::{g2, intensity_variance_at, mean_intensity, participation_number, G2Outcome};
use crate::output;
use crate::parallel::Execution;
use crate::phase_space::{pnd, wigner_grid, GreenSample, GridSpec, PhotonNumberDistribution, WignerGrid};
use crate::states::StateSpec;

/// One line of the summary table.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub state: String,
    pub delta_over_c: f64,
    pub z: f64,
    pub guide_index: usize,
    pub mean_intensity: f64,
    pub g2: G2Outcome,
    pub participation: f64,
    pub intensity_variance: f64,
}

/// Propagate the ensembles of every Δ/C in the config.
pub fn simulate(config: &ExperimentConfig) -> Result<Vec<EnsembleRun>> {
    config.validate()?;
    config
        .delta_over_c
        .iter()
        .map(|&delta_over_c| {
            run_ensemble(&EnsembleRequest {
                geometry: &config.lattice,
                z_checkpoints: &config.z_checkpoints,
                delta_over_c,
                realizations: config.realizations,
                master_seed: config.master_seed,
                capture_cross: config.capture.cross_correlations,
                archive: config.capture.archive,
                execution: config.execution,
            })
        })
        .collect()
}

/// Observables of `state` at every (Δ/C, z, guide).
pub fn summarize(runs: &[EnsembleRun], state: &StateSpec) -> Result<Vec<SummaryRow>> {
    let moments = state.moments();
    let label = state.label();
    let mut rows = Vec::new();
    for run in runs {
        let stats = &run.stats;
        for (k, &z) in stats.checkpoints.iter().enumerate() {
            let participation = participation_number(stats, k)?;
            for guide in 1..=stats.guide_count {
                rows.push(SummaryRow {
                    state: label.clone(),
                    delta_over_c: run.delta_over_c,
                    z,
                    guide_index: guide,
                    mean_intensity: mean_intensity(stats, &moments, guide, k)?,
                    g2: g2(stats, &moments, guide, k)?,
                    participation,
                    intensity_variance: intensity_variance_at(stats, &moments, guide, k)?,
                });
            }
        }
    }
    Ok(rows)
}

pub fn build_archive(config: &ExperimentConfig, runs: &[EnsembleRun]) -> Option<RealizationArchive> {
    if config.capture.archive == ArchiveCapture::None {
        return None;
    }
    Some(RealizationArchive {
        config: config.clone(),
        capture: config.capture.archive,
        records: runs.iter().flat_map(|r| r.records.iter().cloned()).collect(),
    })
}

#[derive(Debug)]
pub struct ExperimentOutput {
    pub runs: Vec<EnsembleRun>,
    pub files: Vec<PathBuf>,
}

/// Simulate and write every output file into the resolved output directory.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentOutput> {
    let runs = simulate(config)?;
    let dir = config.resolved_output_dir();
    std::fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
    let mut files = Vec::new();
    let exp = &config.experiment;

    let mut summary = Vec::new();
    for state in &config.input_states {
        summary.extend(summarize(&runs, state)?);
    }
    files.push(output::write_summary(&dir.join(format!("{exp}_summary.csv")), &summary)?);

    for run in &runs {
        let tag = output::number_tag(run.delta_over_c);
        for (k, &z) in run.stats.checkpoints.iter().enumerate() {
            let path = dir.join(format!("{exp}_profile_{tag}_{}.csv", output::number_tag(z)));
            files.push(output::write_profile(&path, &run.stats, k)?);
        }
        let path = dir.join(format!("{exp}_participation_{tag}.csv"));
        files.push(output::write_participation(&path, &run.stats)?);
    }
    for (k, &z) in config.z_checkpoints.iter().enumerate() {
        let path = dir.join(format!("{exp}_g2_{}.csv", output::number_tag(z)));
        files.push(output::write_g2_scan(&path, &runs, &config.input_states, k)?);
    }
    if let Some(archive) = build_archive(config, &runs) {
        let path = dir.join(format!("{exp}_archive.txt"));
        archive.save(&path)?;
        files.push(path);
    }
    if config.capture.gnuplot {
        files.extend(output::write_gnuplot_scripts(&dir, config)?);
    }
    Ok(ExperimentOutput { runs, files })
}

#[derive(Debug, Clone, PartialEq)]
pub struct WignerProduct {
    pub grid: WignerGrid,
    pub pnd: PhotonNumberDistribution,
}

/// Disorder-averaged output Wigner function and PND of `state` at (Δ/C, z),
/// from the amplitudes stored in `archive`.
pub fn wigner_pipeline(
    archive: &RealizationArchive,
    state: &StateSpec,
    delta_over_c: f64,
    z: f64,
    grid: Option<GridSpec>,
    n_max: Option<usize>,
    execution: Execution,
) -> Result<WignerProduct> {
    let fock = state.fock()?;
    let samples = archive
        .injection_amplitudes(delta_over_c, z)?
        .into_iter()
        .map(GreenSample::new)
        .collect::<Result<Vec<_>>>()?;
    let n = fock.truncation();
    let spec = grid.unwrap_or_else(|| GridSpec::covering(n, GridSpec::DEFAULT_STEP));
    let grid = wigner_grid(&fock, &samples, spec, execution)?;
    let pnd = pnd(&grid, n_max.unwrap_or(n).max(n))?;
    Ok(WignerProduct { grid, pnd })
}

/// Writes the grid as (x, y, W) CSV, a gnuplot matrix and the PND CSV.
pub fn write_wigner_product(
    dir: &Path,
    experiment: &str,
    state: &StateSpec,
    delta_over_c: f64,
    z: f64,
    product: &WignerProduct,
) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let stem = format!(
        "{experiment}_{{}}_{}_{}_{}",
        state.label(),
        output::number_tag(delta_over_c),
        output::number_tag(z)
    );
    let name = |q: &str, ext: &str| dir.join(format!("{}.{ext}", stem.replace("{}", q)));
    Ok(vec![
        output::write_wigner_csv(&name("wigner", "csv"), &product.grid)?,
        output::write_wigner_matrix(&name("wigner", "dat"), &product.grid)?,
        output::write_pnd(&name("pnd", "csv"), &product.pnd)?,
    ])
}
