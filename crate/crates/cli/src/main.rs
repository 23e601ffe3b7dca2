use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use fredreg_core::eigensystem::{
    analytic_eigensystem_on, numeric_eigensystem, EigenSystem, QuadratureGrid, TabulatedKernel,
    DEFAULT_GRID_SIZE,
};
use fredreg_core::harness::{
    emit_outputs, load_records, run_experiment, summarize, ExperimentConfig,
};
use fredreg_core::infoselect::{build_selection_with, reconstruct_bhat, MaxLag, SelectionParams};
use fredreg_core::spectral_cutoff::{
    cumulative_profile, detect_plateau, f0_approximation, DEFAULT_PLATEAU_FLATNESS,
    DEFAULT_PLATEAU_WINDOW,
};
use fredreg_core::synthesis::{read_coeffs_csv, DispersionMode, NoisyDataset};
use fredreg_core::variational::{
    tikhonov_full, truncated_k_alpha, truncated_k_beta, ConstraintSpec, Method,
    RegularizedSolution,
};

#[derive(Parser)]
#[command(name = "fredreg", version, about = "Regularized inversion of first-kind Fredholm equations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a seeded Monte-Carlo experiment.
    Run(RunArgs),
    /// Analyze a single noisy coefficient record.
    Analyze(AnalyzeArgs),
    /// Print the summary of a finished run directory.
    Summarize {
        dir: PathBuf,
        /// Print JSON instead of a table.
        #[arg(long)]
        json: bool,
    },
}

#[derive(Args)]
struct RunArgs {
    /// Built-in configuration: example1..example4.
    #[arg(long, conflicts_with = "config", required_unless_present = "config")]
    preset: Option<String>,
    /// JSON experiment configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Number of seeds, starting from the configured base seed.
    #[arg(long)]
    seeds: Option<usize>,
    /// Output directory (overrides the configuration).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Comma-separated subset of methods.
    #[arg(long, value_delimiter = ',')]
    methods: Option<Vec<Method>>,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Coefficient CSV with header `k,g_bar_k`.
    #[arg(long = "in")]
    input: PathBuf,
    /// Noise bound ε.
    #[arg(long)]
    epsilon: f64,
    /// Solution bound E; enables the variational methods.
    #[arg(long)]
    bound: Option<f64>,
    /// Norm budget C₁; enables f0. Plateau levels are printed as candidates.
    #[arg(long)]
    c1: Option<f64>,
    #[arg(long, value_enum, default_value = "eps-over-sqrt3")]
    dispersion: Dispersion,
    /// Significance multiplier of the autocorrelation tests.
    #[arg(long, default_value_t = 1.96)]
    z: f64,
    /// Largest lag scanned: `log`, `half` or a number.
    #[arg(long, default_value = "log", value_parser = parse_max_lag)]
    max_lag: MaxLag,
    /// Quadrature nodes for the analytic sample-kernel eigensystem.
    #[arg(long)]
    grid_size: Option<usize>,
    /// Kernel in long form `x,y,value`.
    #[arg(long, conflicts_with_all = ["kernel_dense", "kernel_grid"])]
    kernel_long: Option<PathBuf>,
    /// Dense kernel matrix, one row per line, no header.
    #[arg(long, requires = "kernel_grid")]
    kernel_dense: Option<PathBuf>,
    /// Grid sidecar `x,weight` for the dense kernel.
    #[arg(long, requires = "kernel_dense")]
    kernel_grid: Option<PathBuf>,
    /// Directory for reports and reconstructions.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum Dispersion {
    EpsOverSqrt3,
    Eps,
}

fn parse_max_lag(s: &str) -> Result<MaxLag, String> {
    match s {
        "log" => Ok(MaxLag::Log),
        "half" => Ok(MaxLag::HalfRecord),
        n => n
            .parse()
            .map(MaxLag::Fixed)
            .map_err(|_| format!("expected log, half or a lag, got {n:?}")),
    }
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Run(args) => run(args),
        Command::Analyze(args) => analyze(args),
        Command::Summarize { dir, json } => {
            let records = load_records(&dir)?;
            let summary = summarize(&records)?;
            if json {
                println!("{}", summary.to_json()?);
            } else {
                print!("{}", summary.table());
            }
            Ok(())
        }
    }
}

fn run(args: RunArgs) -> Result<()> {
    let mut cfg = match (&args.preset, &args.config) {
        (Some(p), _) => ExperimentConfig::preset(p)?,
        (None, Some(path)) => ExperimentConfig::load(path)?,
        (None, None) => bail!("either --preset or --config is required"),
    };
    if let Some(n) = args.seeds {
        cfg = cfg.with_seed_count(n);
    }
    if let Some(m) = args.methods {
        cfg.methods = m;
    }
    if args.out.is_some() {
        cfg.output_dir = args.out;
    }
    cfg.validate()?;

    let records = run_experiment(&cfg)?;
    let summary = summarize(&records)?;
    if let Some(dir) = &cfg.output_dir {
        let manifest = emit_outputs(&records, &summary, &cfg)?;
        eprintln!(
            "wrote {} files to {} (config {})",
            manifest.files.len() + 1,
            dir.display(),
            &manifest.config_hash[..12]
        );
    }
    if args.json {
        println!("{}", summary.to_json()?);
    } else {
        print!("{}", summary.table());
    }
    Ok(())
}

fn eigensystem_for(args: &AnalyzeArgs, n: usize) -> Result<EigenSystem> {
    if let Some(path) = &args.kernel_long {
        let k = TabulatedKernel::load_long_csv(path)?;
        return Ok(numeric_eigensystem(&k, n)?);
    }
    if let (Some(m), Some(g)) = (&args.kernel_dense, &args.kernel_grid) {
        let k = TabulatedKernel::load_dense_csv(m, g)?;
        return Ok(numeric_eigensystem(&k, n)?);
    }
    let size = args
        .grid_size
        .unwrap_or_else(|| DEFAULT_GRID_SIZE.max(2 * n + 1));
    Ok(analytic_eigensystem_on(QuadratureGrid::unit(size)?, n)?)
}

fn write(dir: &Path, name: &str, contents: &str) -> Result<()> {
    let path = dir.join(name);
    fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))
}

fn analyze(args: AnalyzeArgs) -> Result<()> {
    let coeffs = read_coeffs_csv(&args.input)?;
    let data = NoisyDataset::from_coefficients(coeffs, args.epsilon)?;
    let n = data.n_coeff;
    let es = eigensystem_for(&args, n)?;
    let eps_eff = match args.dispersion {
        Dispersion::EpsOverSqrt3 => DispersionMode::EpsOverSqrt3,
        Dispersion::Eps => DispersionMode::Eps,
    }
    .apply(args.epsilon);

    let params = SelectionParams {
        z: args.z,
        max_lag: args.max_lag,
    };
    let (report, series) = build_selection_with(&data.coeffs, &params)?;
    let profile = cumulative_profile(&data, &es)?;
    let plateaus = detect_plateau(&profile, DEFAULT_PLATEAU_WINDOW, DEFAULT_PLATEAU_FLATNESS)?;

    let mut solutions: Vec<RegularizedSolution> = vec![reconstruct_bhat(&data, &es, &report)?];
    if let Some(bound) = args.bound {
        let cs = ConstraintSpec::linear(n, bound, eps_eff)?;
        solutions.push(tikhonov_full(&data, &es, &cs)?);
        solutions.push(truncated_k_alpha(&data, &es, &cs)?);
        solutions.push(truncated_k_beta(&data, &es, bound, eps_eff)?);
    }
    if let Some(c1) = args.c1 {
        solutions.push(f0_approximation(&data, &es, c1)?);
    }

    println!("{}", report.to_json()?);
    for p in &plateaus {
        eprintln!(
            "plateau m = {}..{}: candidate C1 = {:e}",
            p.start, p.end, p.level
        );
    }
    for s in &solutions {
        if let Some(k) = s.params.cutoff {
            eprintln!("{}: cutoff {k}", s.method);
        }
    }

    if let Some(dir) = &args.out {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        write(dir, "report.json", &(report.to_json()? + "\n"))?;
        write(dir, "autocorr.csv", &series.to_csv(report.n0, args.z))?;
        write(dir, "profile.csv", &profile.to_csv())?;
        write(
            dir,
            "plateaus.json",
            &(serde_json::to_string_pretty(&plateaus)? + "\n"),
        )?;
        for s in &solutions {
            write(dir, &format!("coeffs-{}.csv", s.method), &s.to_csv())?;
            write(dir, &format!("{}.json", s.method), &(s.to_json()? + "\n"))?;
        }
        let grid = es.grid();
        let mut csv = String::from("x");
        let columns: Vec<Vec<f64>> = solutions
            .iter()
            .map(|s| {
                csv.push(',');
                csv.push_str(s.method.name());
                s.reconstruct(&es)
            })
            .collect::<Result<_, _>>()?;
        csv.push('\n');
        for (i, x) in grid.points().iter().enumerate() {
            csv.push_str(&format!("{x:e}"));
            for c in &columns {
                csv.push_str(&format!(",{:e}", c[i]));
            }
            csv.push('\n');
        }
        write(dir, "solutions.csv", &csv)?;
    }
    Ok(())
}
