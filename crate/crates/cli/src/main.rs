//! `dsad`: train, detect, evaluate and sweep difference-subspace change detectors.
//!
//! Failures print one line `error kind=<usage|data|numerical>: <message>` on
//! stderr and exit with 1, 2 or 3 respectively.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use dsad_core::detector::{read_model, write_model};
use dsad_core::evaluation::{embed_trajectory, run_experiment, sweep, write_embedding, write_report, Dataset, Method, SubspaceMetric};
use dsad_core::io::{load_series, write_series, LoadOptions, RunConfig};
use dsad_core::synth::{generate_synthetic, SyntheticSpec};
use dsad_core::{detect, train, Error, Result, TimeSeries};

#[derive(Parser)]
#[command(name = "dsad", version, about = "Change detection with SSA difference subspaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Input {
    /// Series file: one value per line or delimited columns.
    #[arg(long)]
    input: PathBuf,
    /// 0-based column holding the values.
    #[arg(long, default_value_t = 0)]
    value_column: usize,
    /// 0-based column holding 0/1 labels.
    #[arg(long)]
    labels_column: Option<usize>,
    /// Header lines to skip.
    #[arg(long, default_value_t = 0)]
    skip_rows: usize,
}

impl Input {
    fn load(&self) -> Result<TimeSeries> {
        load_series(
            &self.input,
            &LoadOptions {
                value_column: self.value_column,
                label_column: self.labels_column,
                skip_rows: self.skip_rows,
            },
        )
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum MetricArg {
    /// `1 − cos θ₁` between present signal subspaces.
    MinAngle,
    /// Mean `1 − cos θᵢ` over `c` angles between difference subspaces.
    Eq4,
}

#[derive(Subcommand)]
enum Command {
    /// Learn a reference model from anomaly-free data.
    Train {
        #[command(flatten)]
        input: Input,
        /// Flat `key = value` detector settings.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Score a series with a trained model.
    Detect {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Train on the prefix, score the rest and print `auc=<value>`.
    Eval {
        #[command(flatten)]
        input: Input,
        #[arg(long, value_parser = parse_method, default_value = "ds")]
        method: Method,
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Evaluate every cell of a parameter grid.
    Sweep {
        #[command(flatten)]
        input: Input,
        /// Config file whose comma-separated values become grid axes.
        #[arg(long)]
        grid: PathBuf,
        /// Methods to run (repeat or comma-separate).
        #[arg(long, value_parser = parse_method, value_delimiter = ',', default_value = "ds")]
        method: Vec<Method>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Embed the subspace trajectory of a series into 3-D with classical MDS.
    Mds {
        #[command(flatten)]
        input: Input,
        /// Model whose window settings define the subspaces.
        #[arg(long)]
        model: PathBuf,
        #[arg(long, value_enum)]
        metric: MetricArg,
        /// Override the model's stride to thin out the trajectory.
        #[arg(long)]
        stride: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Generate a labelled synthetic series.
    Synth {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

fn parse_method(s: &str) -> std::result::Result<Method, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn with_path(path: &Path) -> impl Fn(std::io::Error) -> Error + '_ {
    move |e| std::io::Error::new(e.kind(), format!("{}: {e}", path.display())).into()
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(with_path(path))
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(with_path(path))
}

fn run_config(path: Option<&PathBuf>) -> Result<RunConfig> {
    match path {
        Some(p) => RunConfig::parse(&read_text(p)?),
        None => Ok(RunConfig::default()),
    }
}

fn dataset(series: TimeSeries, cfg: &RunConfig) -> Result<Dataset> {
    match cfg.train_len {
        Some(n) => {
            let rest = series.len().saturating_sub(n);
            Dataset::new(series, n, rest)
        }
        None => Dataset::with_fraction(series, cfg.train_fraction),
    }
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Train { input, config, out } => {
            let cfg = run_config(config.as_ref())?;
            let mut series = input.load()?;
            if let Some(n) = cfg.train_len {
                series = series.slice(0, n)?;
            }
            let model = train(&series, &cfg.params.detector)?;
            write_text(&out, &write_model(&model))
        }
        Command::Detect { input, model, out } => {
            let model = read_model(&read_text(&model)?)?;
            let scores = detect(&input.load()?, &model)?;
            let mut text = String::from("time_index,degree,flag\n");
            for p in &scores.points {
                let flag = p.flag.map_or("", |f| if f { "1" } else { "0" });
                text.push_str(&format!("{},{:.16e},{flag}\n", p.time_index, p.degree));
            }
            write_text(&out, &text)
        }
        Command::Eval { input, method, config } => {
            let cfg = run_config(config.as_ref())?;
            let data = dataset(input.load()?, &cfg)?;
            let (_, auc) = run_experiment(&data, method, &cfg.params)?;
            println!("auc={auc}");
            Ok(())
        }
        Command::Sweep { input, grid, method, out } => {
            let (cfg, grid) = RunConfig::parse_grid(&read_text(&grid)?)?;
            let data = dataset(input.load()?, &cfg)?;
            let report = sweep(&data, &method, &grid, &cfg.params)?;
            write_text(&out, &write_report(&report)?)
        }
        Command::Mds { input, model, metric, stride, out } => {
            let model = read_model(&read_text(&model)?)?;
            let mut config = model.config;
            if let Some(s) = stride {
                config.stride = s;
            }
            let metric = match metric {
                MetricArg::MinAngle => SubspaceMetric::MinAngle,
                MetricArg::Eq4 => SubspaceMetric::Dissimilarity(config.angle_count),
            };
            let export = embed_trajectory(&input.load()?, &config, metric)?;
            if export.missing_dims > 0 {
                eprintln!(
                    "warning: only {} positive eigenvalues; {} coordinates are zero",
                    3 - export.missing_dims,
                    export.missing_dims
                );
            }
            write_text(&out, &write_embedding(&export))
        }
        Command::Synth { spec, out } => {
            let spec = SyntheticSpec::parse(&read_text(&spec)?)?;
            write_text(&out, &write_series(&generate_synthetic(&spec)?))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let rendered = e.to_string();
            let first = rendered.lines().next().unwrap_or("invalid arguments");
            eprintln!("error kind=usage: {}", first.trim_start_matches("error: "));
            return ExitCode::from(1);
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let kind = e.kind();
            let message = e.to_string().replace('\n', " ");
            eprintln!("error kind={}: {message}", kind.as_str());
            ExitCode::from(kind.exit_code() as u8)
        }
    }
}
