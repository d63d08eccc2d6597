//! risnet: reconfigurable-surface link modeling and load optimization.

use clap::{Args, Parser, Subcommand, ValueEnum};
use risnet::experiment::{
    assemble, run_experiment, write_summary_json, Algorithm, ExperimentSpec, RunOutput,
};
use risnet::io::matrix_csv::{read_matrix, write_matrix};
use risnet::io::read_scene_config;
use risnet::io::touchstone::{write_touchstone, TouchstoneData};
use risnet::io::trace::write_trace_csv;
use risnet::netparams::{s_to_z, z_to_s, FullNetworkMatrix, MatrixKind};
use risnet::optimizer::StoppingRule;
use risnet::scene::SceneConfig;
use risnet::{Error, Result};
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "risnet",
    version,
    about = "Multiport network models of reconfigurable-surface links, with S- and Z-domain load optimizers"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment; writes a per-iteration trace CSV and a summary JSON
    Run(RunArgs),
    /// Run a grid of experiments over column spacings and algorithms
    Sweep(SweepArgs),
    /// Convert a complex-matrix CSV between impedance and scattering forms
    Convert(ConvertArgs),
    /// Export the assembled scene S-matrix as a Touchstone v1 file
    ExportTouchstone(ExportArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum AlgoArg {
    SOpt,
    ZOpt,
    Brute,
}

impl std::fmt::Display for AlgoArg {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            AlgoArg::SOpt => "s-opt",
            AlgoArg::ZOpt => "z-opt",
            AlgoArg::Brute => "brute",
        };
        f.write_str(name)
    }
}

#[derive(Args)]
struct RunArgs {
    /// Scene configuration (TOML)
    #[arg(long)]
    config: PathBuf,
    #[arg(long, value_enum, default_value = "s-opt")]
    algo: AlgoArg,
    #[arg(long, default_value_t = 2000)]
    max_iters: usize,
    /// Initial step (radians for s-opt, ohms for z-opt)
    #[arg(long)]
    step: Option<f64>,
    /// Multiplicative step decay per accepted iteration
    #[arg(long)]
    decay: Option<f64>,
    /// Step floor
    #[arg(long)]
    min_step: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Phase levels per element (brute only)
    #[arg(long, default_value_t = 64)]
    levels: usize,
    /// Zero the tx-rx coupling before optimizing
    #[arg(long)]
    no_direct_link: bool,
    /// Output directory (default: $RISNET_OUT_DIR or the working directory)
    #[arg(long)]
    out: Option<PathBuf>,
    /// File name stem (default: <config stem>_<algo>)
    #[arg(long)]
    label: Option<String>,
}

#[derive(Args)]
struct SweepArgs {
    /// Base scene configuration (TOML); q_divisor is overridden per cell
    #[arg(long, required_unless_present = "paper_fig1")]
    config: Option<PathBuf>,
    /// Column spacing divisors to sweep (d_y = lambda/q)
    #[arg(long, value_delimiter = ',', default_values_t = vec![4.0, 8.0, 16.0])]
    q: Vec<f64>,
    #[arg(long, value_enum, value_delimiter = ',', default_values_t = vec![AlgoArg::SOpt, AlgoArg::ZOpt])]
    algos: Vec<AlgoArg>,
    /// Convenience grid: the 28 GHz reference scene without its direct
    /// link, q in {4,8,16}, both iterative algorithms, plus a combined table
    #[arg(long)]
    paper_fig1: bool,
    #[arg(long, default_value_t = 2000)]
    max_iters: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    no_direct_link: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ConvertArgs {
    /// Input matrix CSV
    #[arg(long)]
    input: PathBuf,
    /// z-to-s or s-to-z
    #[arg(long, value_enum)]
    direction: DirectionArg,
    /// Reference impedance (ohms)
    #[arg(long, default_value_t = 50.0)]
    z0: f64,
    /// Output matrix CSV
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum DirectionArg {
    ZToS,
    SToZ,
}

#[derive(Args)]
struct ExportArgs {
    /// Scene configuration (TOML)
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    no_direct_link: bool,
    /// Output Touchstone file
    #[arg(long)]
    out: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(args) => cmd_run(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::Convert(args) => cmd_convert(args),
        Command::ExportTouchstone(args) => cmd_export(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_config_error() {
                ExitCode::from(3)
            } else {
                ExitCode::from(4)
            }
        }
    }
}

fn out_dir(flag: Option<PathBuf>) -> Result<PathBuf> {
    let dir = flag
        .or_else(|| std::env::var_os("RISNET_OUT_DIR").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."));
    std::fs::create_dir_all(&dir)?;
    Ok(dir)
}

fn algorithm_of(algo: AlgoArg, levels: usize) -> Algorithm {
    match algo {
        AlgoArg::SOpt => Algorithm::SOpt,
        AlgoArg::ZOpt => Algorithm::ZOpt,
        AlgoArg::Brute => Algorithm::Brute { levels },
    }
}

struct SpecOptions {
    algo: AlgoArg,
    levels: usize,
    max_iters: usize,
    step: Option<f64>,
    decay: Option<f64>,
    min_step: Option<f64>,
    seed: u64,
    no_direct_link: bool,
}

fn build_spec(scene: SceneConfig, opts: &SpecOptions) -> ExperimentSpec {
    let mut spec = ExperimentSpec::new(scene, algorithm_of(opts.algo, opts.levels));
    spec.delta0 = opts.step;
    spec.decay = opts.decay;
    spec.min_delta = opts.min_step;
    spec.stop = StoppingRule {
        max_iters: opts.max_iters,
        ..StoppingRule::default()
    };
    spec.seed = opts.seed;
    spec.remove_direct_link = opts.no_direct_link;
    spec
}

fn write_outputs(dir: &Path, label: &str, output: &RunOutput) -> Result<(PathBuf, PathBuf)> {
    let trace_path = dir.join(format!("trace_{label}.csv"));
    let summary_path = dir.join(format!("summary_{label}.json"));
    write_trace_csv(&trace_path, &output.trace)?;
    write_summary_json(&summary_path, &output.summary)?;
    Ok((trace_path, summary_path))
}

fn cmd_run(args: RunArgs) -> Result<()> {
    let scene = read_scene_config(&args.config)?;
    let stem = args
        .config
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "scene".into());
    let spec = build_spec(
        scene,
        &SpecOptions {
            algo: args.algo,
            levels: args.levels,
            max_iters: args.max_iters,
            step: args.step,
            decay: args.decay,
            min_step: args.min_step,
            seed: args.seed,
            no_direct_link: args.no_direct_link,
        },
    );
    let output = run_experiment(&spec)?;
    let dir = out_dir(args.out)?;
    let label = args
        .label
        .unwrap_or_else(|| format!("{stem}_{}", spec.algorithm.id()));
    let (trace_path, summary_path) = write_outputs(&dir, &label, &output)?;
    println!(
        "{}: final gain {:e} ({:.2} dB) after {} iterations",
        spec.algorithm.id(),
        output.summary.final_gain,
        output.summary.final_gain_db,
        output.summary.iterations
    );
    println!("trace:   {}", trace_path.display());
    println!("summary: {}", summary_path.display());
    Ok(())
}

struct TableRow {
    q: f64,
    algorithm: &'static str,
    final_gain: f64,
    final_gain_db: f64,
    iterations: usize,
    iters_to_90pct: usize,
}

fn table_line(r: &TableRow) -> String {
    format!(
        "{},{},{:e},{},{},{}",
        r.q, r.algorithm, r.final_gain, r.final_gain_db, r.iterations, r.iters_to_90pct
    )
}

fn cmd_sweep(args: SweepArgs) -> Result<()> {
    let dir = out_dir(args.out)?;
    let (cells, table_name): (Vec<(f64, ExperimentSpec)>, &str) = if args.paper_fig1 {
        let grid = [4.0, 8.0, 16.0]
            .into_iter()
            .flat_map(|q| {
                [Algorithm::SOpt, Algorithm::ZOpt]
                    .into_iter()
                    .map(move |a| {
                        let mut spec = ExperimentSpec::new(SceneConfig::reference(q), a);
                        spec.stop = StoppingRule {
                            max_iters: args.max_iters,
                            ..StoppingRule::default()
                        };
                        spec.seed = args.seed;
                        spec.remove_direct_link = true;
                        (q, spec)
                    })
            })
            .collect();
        (grid, "fig1_summary.csv")
    } else {
        let base = read_scene_config(args.config.as_ref().expect("enforced by clap"))?;
        let mut cells = Vec::new();
        for &q in &args.q {
            for &algo in &args.algos {
                let mut scene = base.clone();
                scene.q_divisor = q;
                let spec = build_spec(
                    scene,
                    &SpecOptions {
                        algo,
                        levels: 64,
                        max_iters: args.max_iters,
                        step: None,
                        decay: None,
                        min_step: None,
                        seed: args.seed,
                        no_direct_link: args.no_direct_link,
                    },
                );
                cells.push((q, spec));
            }
        }
        (cells, "sweep_summary.csv")
    };

    let header = "q_divisor,algorithm,final_gain,final_gain_db,iterations,iters_to_90pct";
    println!("{header}");
    let mut table = String::from(header);
    table.push('\n');
    for (q, spec) in &cells {
        let output = run_experiment(spec)?;
        let label = format!("q{}_{}", q, spec.algorithm.id());
        write_outputs(&dir, &label, &output)?;
        let row = TableRow {
            q: *q,
            algorithm: spec.algorithm.id(),
            final_gain: output.summary.final_gain,
            final_gain_db: output.summary.final_gain_db,
            iterations: output.summary.iterations,
            iters_to_90pct: output.trace.iterations_to_fraction(0.9),
        };
        let line = table_line(&row);
        println!("{line}");
        table.push_str(&line);
        table.push('\n');
    }
    let table_path = dir.join(table_name);
    let mut f = std::fs::File::create(&table_path)?;
    f.write_all(table.as_bytes())?;
    println!("table: {}", table_path.display());
    Ok(())
}

fn cmd_convert(args: ConvertArgs) -> Result<()> {
    if !args.z0.is_finite() || args.z0 <= 0.0 {
        return Err(Error::InvalidConfig(format!(
            "z0 must be positive and finite, got {}",
            args.z0
        )));
    }
    let m = read_matrix(&args.input)?;
    let converted = match args.direction {
        DirectionArg::ZToS => z_to_s(
            &FullNetworkMatrix::new(MatrixKind::Impedance, m, args.z0)?,
            args.z0,
        )?,
        DirectionArg::SToZ => s_to_z(
            &FullNetworkMatrix::new(MatrixKind::Scattering, m, args.z0)?,
            args.z0,
        )?,
    };
    write_matrix(&args.out, converted.entries())?;
    println!("wrote {}", args.out.display());
    Ok(())
}

fn cmd_export(args: ExportArgs) -> Result<()> {
    let scene = read_scene_config(&args.config)?;
    let assembled = assemble(&scene, args.no_direct_link)?;
    let data = TouchstoneData {
        frequency_hz: scene.frequency_ghz * 1e9,
        z0: assembled.s.z0(),
        s: assembled.s.entries().clone(),
    };
    write_touchstone(&args.out, &data)?;
    println!(
        "wrote {} ({} ports)",
        args.out.display(),
        assembled.partition.total()
    );
    Ok(())
}
