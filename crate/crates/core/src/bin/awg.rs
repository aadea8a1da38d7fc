use std::path::PathBuf;
use std::process::ExitCode;

use anderson_waveguides::archive::RealizationArchive;
use anderson_waveguides::config::ExperimentConfig;
use anderson_waveguides::ensemble::ArchiveCapture;
use anderson_waveguides::experiment::{run_experiment, wigner_pipeline, write_wigner_product};
use anderson_waveguides::output::{read_wigner_csv, write_pnd};
use anderson_waveguides::phase_space::{pnd, GridSpec};
use anderson_waveguides::{oracle_check, Error, Execution, Result, StateSpec};
use clap::{Args, Parser, Subcommand, ValueEnum};

/// Photon statistics of nonclassical light in disordered waveguide arrays.
#[derive(Parser)]
#[command(name = "awg", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Propagate disorder ensembles and write summary tables.
    Run(RunArgs),
    /// Disorder-averaged output Wigner function and PND from an archive.
    Wigner(WignerArgs),
    /// Photon-number distribution of a Wigner grid CSV.
    Pnd(PndArgs),
    /// Run the analytic cross-checks and print a pass/fail table.
    OracleCheck,
}

#[derive(Clone, Copy, ValueEnum)]
enum ExecArg {
    Sequential,
    Parallel,
}

impl From<ExecArg> for Execution {
    fn from(e: ExecArg) -> Self {
        match e {
            ExecArg::Sequential => Execution::Sequential,
            ExecArg::Parallel => Execution::Parallel,
        }
    }
}

#[derive(Args)]
struct RunArgs {
    /// TOML config; flags given here override its keys.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    experiment: Option<String>,
    /// Comma-separated Δ/C values.
    #[arg(long, value_delimiter = ',')]
    delta_over_c: Option<Vec<f64>>,
    /// Comma-separated propagation distances.
    #[arg(long = "z", value_delimiter = ',')]
    z_checkpoints: Option<Vec<f64>>,
    #[arg(long)]
    realizations: Option<u64>,
    #[arg(long)]
    master_seed: Option<u64>,
    /// Input state, e.g. `ccs:0.1414,10` or `thermal:10`; repeatable.
    #[arg(long = "state")]
    states: Vec<StateSpec>,
    #[arg(long)]
    output_dir: Option<PathBuf>,
    #[arg(long)]
    guides: Option<usize>,
    /// 1-based illuminated guide.
    #[arg(long)]
    injection: Option<usize>,
    #[arg(long)]
    coupling: Option<f64>,
    #[arg(long)]
    dz: Option<f64>,
    /// none, injection or full-row.
    #[arg(long)]
    archive: Option<ArchiveCapture>,
    #[arg(long)]
    cross_correlations: bool,
    #[arg(long)]
    gnuplot: bool,
    #[arg(long, value_enum)]
    execution: Option<ExecArg>,
}

impl RunArgs {
    fn into_config(self) -> Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(p) => ExperimentConfig::load(p)?,
            None => ExperimentConfig::default(),
        };
        macro_rules! set {
            ($($field:ident).+ = $value:expr) => {
                if let Some(v) = $value {
                    cfg.$($field).+ = v;
                }
            };
        }
        set!(experiment = self.experiment);
        set!(delta_over_c = self.delta_over_c);
        set!(z_checkpoints = self.z_checkpoints);
        set!(realizations = self.realizations);
        set!(master_seed = self.master_seed);
        set!(lattice.guide_count = self.guides);
        set!(lattice.injection_index = self.injection);
        set!(lattice.coupling = self.coupling);
        set!(lattice.dz = self.dz);
        set!(capture.archive = self.archive);
        set!(execution = self.execution.map(Execution::from));
        if !self.states.is_empty() {
            cfg.input_states = self.states;
        }
        if self.output_dir.is_some() {
            cfg.output_dir = self.output_dir;
        }
        cfg.capture.cross_correlations |= self.cross_correlations;
        cfg.capture.gnuplot |= self.gnuplot;
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Args)]
struct WignerArgs {
    /// Archive written by `awg run` with archive capture on.
    #[arg(long)]
    archive: PathBuf,
    /// Truncated pure input state.
    #[arg(long)]
    state: StateSpec,
    #[arg(long)]
    delta_over_c: f64,
    #[arg(long)]
    z: f64,
    /// Grid step in x and y.
    #[arg(long, default_value_t = GridSpec::DEFAULT_STEP)]
    step: f64,
    /// Half-width of the square grid; defaults to √N + 2 for truncation N.
    #[arg(long)]
    half_width: Option<f64>,
    #[arg(long)]
    n_max: Option<usize>,
    /// Defaults to the archive's output directory.
    #[arg(long)]
    output_dir: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "parallel")]
    execution: ExecArg,
}

#[derive(Args)]
struct PndArgs {
    /// Wigner grid CSV (x, y, W).
    #[arg(long)]
    grid: PathBuf,
    #[arg(long)]
    n_max: usize,
    /// Output CSV; printed to stdout when absent.
    #[arg(long)]
    output: Option<PathBuf>,
}

fn run(args: RunArgs) -> Result<()> {
    let cfg = args.into_config()?;
    let out = run_experiment(&cfg)?;
    let worst = out.runs.iter().map(|r| r.max_norm_error).fold(0.0, f64::max);
    eprintln!(
        "{} Δ/C values × {} realizations; max norm drift {worst:.2e}",
        out.runs.len(),
        cfg.realizations
    );
    for f in &out.files {
        println!("{}", f.display());
    }
    Ok(())
}

fn wigner(args: WignerArgs) -> Result<()> {
    let archive = RealizationArchive::load(&args.archive)?;
    let n = args.state.fock()?.truncation();
    let grid = match args.half_width {
        Some(h) => {
            let spec = GridSpec {
                x_min: -h,
                x_max: h,
                y_min: -h,
                y_max: h,
                dx: args.step,
                dy: args.step,
            };
            spec.validate()?;
            spec
        }
        None => GridSpec::covering(n, args.step),
    };
    let product = wigner_pipeline(
        &archive,
        &args.state,
        args.delta_over_c,
        args.z,
        Some(grid),
        args.n_max,
        args.execution.into(),
    )?;
    let dir = args
        .output_dir
        .unwrap_or_else(|| archive.config.resolved_output_dir());
    let files = write_wigner_product(
        &dir,
        &archive.config.experiment,
        &args.state,
        args.delta_over_c,
        args.z,
        &product,
    )?;
    eprintln!(
        "{} realizations; ∫W = {:.6}; raw PND total {:.6}",
        product.grid.realization_count,
        product.grid.integral(),
        product.pnd.raw_total
    );
    for f in &files {
        println!("{}", f.display());
    }
    Ok(())
}

fn pnd_cmd(args: PndArgs) -> Result<()> {
    let grid = read_wigner_csv(&args.grid)?;
    let p = pnd(&grid, args.n_max)?;
    match args.output {
        Some(path) => {
            write_pnd(&path, &p)?;
            println!("{}", path.display());
        }
        None => {
            println!("n,P_raw,P_normalized");
            for (n, (r, q)) in p.raw.iter().zip(&p.normalized).enumerate() {
                println!("{n},{r:.16e},{q:.16e}");
            }
        }
    }
    Ok(())
}

fn oracle_check_cmd() -> Result<bool> {
    let results = oracle_check::run_all();
    let width = results.iter().map(|r| r.name.chars().count()).max().unwrap_or(0);
    for r in &results {
        let pad = width - r.name.chars().count();
        println!(
            "{}{}  {}  {}",
            r.name,
            " ".repeat(pad),
            if r.passed { "PASS" } else { "FAIL" },
            r.detail
        );
    }
    Ok(results.iter().all(|r| r.passed))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let result = match cli.command {
        Command::Run(a) => run(a),
        Command::Wigner(a) => wigner(a),
        Command::Pnd(a) => pnd_cmd(a),
        Command::OracleCheck => oracle_check_cmd().and_then(|ok| {
            if ok {
                Ok(())
            } else {
                Err(Error::Numerical("oracle checks failed".into()))
            }
        }),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
