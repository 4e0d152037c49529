//! Command-line frontend for the quanvolve experiment engine.
//!
//! Subcommands: `prepare-data` builds preprocessing caches, `train` runs
//! one experiment, `sweep` runs the full color-space x template grid,
//! `gradcheck` verifies circuit gradients against finite differences, and
//! `selftest` runs the simulator's numerical validation suites.
//!
//! Exit codes: 0 success, 1 usage or configuration error, 2 data error,
//! 3 numerical check failure.
//!
//! Config precedence, lowest to highest: built-in defaults, config file
//! (`--config`), the `QUANVOLVE_DATA_DIR` environment variable (data
//! directory only), then individual command-line flags.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use quanvolve::colorspace::ColorSpace;
use quanvolve::harness::{
    self, gradient_check, run_sweep, self_test, train_run, ConfigError, ExperimentConfig,
    HarnessError, SweepOptions,
};
use quanvolve::templates::ChannelMode;

const EXIT_USAGE: u8 = 1;
const EXIT_DATA: u8 = 2;
const EXIT_CHECK: u8 = 3;

/// Environment variable overriding the data directory.
const DATA_DIR_ENV: &str = "QUANVOLVE_DATA_DIR";

#[derive(Parser)]
#[command(
    name = "quanvolve",
    version,
    about = "Quantum-convolution image classification experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse the dataset and build the preprocessing caches.
    PrepareData(PrepareDataArgs),
    /// Run one training experiment and write its metrics.
    Train(RunArgs),
    /// Run the full color-space x template sweep.
    Sweep(SweepArgs),
    /// Check a template's analytic gradients against finite differences.
    Gradcheck(GradcheckArgs),
    /// Run the simulator's numerical self-test suites.
    Selftest(SelftestArgs),
}

#[derive(Args)]
struct PrepareDataArgs {
    /// Directory holding the CIFAR-10 binary batch files.
    #[arg(long)]
    data_dir: Option<PathBuf>,
    /// Color space to preprocess (default: all three).
    #[arg(long, value_name = "RGB|LAB|YCBCR")]
    color_space: Option<String>,
    /// Split seed.
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

/// Configuration flags shared by `train` and `sweep`. Each flag
/// overrides the config file and the defaults.
#[derive(Args)]
struct ConfigFlags {
    /// Config file with flat `key = value` lines.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_name = "RGB|LAB|YCBCR")]
    color_space: Option<String>,
    /// Channel to train on: 0, 1, 2, or all.
    #[arg(long)]
    channel: Option<String>,
    /// Filter template, e.g. U1_CRX or C14.
    #[arg(long)]
    template: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    epochs: Option<usize>,
    #[arg(long)]
    batch_size: Option<usize>,
    #[arg(long)]
    learning_rate: Option<f64>,
    #[arg(long)]
    hidden_width: Option<usize>,
    /// Window stride of the quantum convolution.
    #[arg(long)]
    stride: Option<usize>,
    #[arg(long)]
    data_dir: Option<PathBuf>,
    #[arg(long)]
    output_dir: Option<PathBuf>,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    config: ConfigFlags,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    config: ConfigFlags,
    /// Training runs per cell (seeds seed..seed+repeats).
    #[arg(long, default_value_t = 1)]
    repeats: usize,
    /// Cells trained concurrently (0 = sequential cells).
    #[arg(long, default_value_t = 0)]
    workers: usize,
}

#[derive(Args)]
struct GradcheckArgs {
    /// Template to check, e.g. U1_CROT.
    #[arg(long)]
    template: String,
    /// Use the all-channels (channel-overwrite) variant.
    #[arg(long)]
    channel_overwrite: bool,
    /// Random draws to test.
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

#[derive(Args)]
struct SelftestArgs {
    /// Gradient-check draws per template.
    #[arg(long, default_value_t = 100)]
    grad_trials: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version requests are successes, not usage errors.
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}

/// Maps an error to the documented exit code taxonomy.
fn exit_code_for(e: &HarnessError) -> u8 {
    match e {
        HarnessError::Data(_) | HarnessError::Io { .. } | HarnessError::Color(_) => EXIT_DATA,
        _ => EXIT_USAGE,
    }
}

fn run(cli: Cli) -> Result<ExitCode, HarnessError> {
    match cli.command {
        Command::PrepareData(args) => prepare_data(args),
        Command::Train(args) => train(args),
        Command::Sweep(args) => sweep(args),
        Command::Gradcheck(args) => gradcheck(args),
        Command::Selftest(args) => selftest(args),
    }
}

/// Builds the effective config from file, environment, and flags.
fn build_config(flags: &ConfigFlags) -> Result<ExperimentConfig, ConfigError> {
    let mut config = match &flags.config {
        Some(path) => ExperimentConfig::from_file(path)?,
        None => ExperimentConfig::default(),
    };
    if let Ok(dir) = std::env::var(DATA_DIR_ENV) {
        config.data_dir = PathBuf::from(dir);
    }
    if let Some(v) = &flags.color_space {
        config.set("color_space", v)?;
    }
    if let Some(v) = &flags.channel {
        config.set("channel", v)?;
    }
    if let Some(v) = &flags.template {
        config.set("template", v)?;
    }
    if let Some(v) = flags.seed {
        config.seed = v;
    }
    if let Some(v) = flags.epochs {
        config.epochs = v;
    }
    if let Some(v) = flags.batch_size {
        config.batch_size = v;
    }
    if let Some(v) = flags.learning_rate {
        config.learning_rate = v;
    }
    if let Some(v) = flags.hidden_width {
        config.hidden_width = v;
    }
    if let Some(v) = flags.stride {
        config.stride = v;
    }
    if let Some(v) = &flags.data_dir {
        config.data_dir = v.clone();
    }
    if let Some(v) = &flags.output_dir {
        config.output_dir = v.clone();
    }
    config.validate()?;
    Ok(config)
}

fn prepare_data(args: PrepareDataArgs) -> Result<ExitCode, HarnessError> {
    let data_dir = args
        .data_dir
        .or_else(|| std::env::var(DATA_DIR_ENV).ok().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("data"));
    let spaces: Vec<ColorSpace> = match &args.color_space {
        Some(name) => vec![name
            .parse()
            .map_err(|e: quanvolve::colorspace::UnknownColorSpace| {
                HarnessError::Config(ConfigError::BadValue {
                    key: "color_space".into(),
                    value: name.clone(),
                    reason: e.to_string(),
                })
            })?],
        None => vec![ColorSpace::Rgb01, ColorSpace::Lab, ColorSpace::Ycbcr],
    };
    for space in spaces {
        let ((train_images, _), (test_images, _)) =
            harness::prepare_data(&data_dir, space, args.seed)?;
        println!(
            "{}: prepared {} train / {} test images (seed {})",
            space.name(),
            train_images.len(),
            test_images.len(),
            args.seed
        );
    }
    println!("caches written under {}", data_dir.join("cache").display());
    Ok(ExitCode::SUCCESS)
}

fn train(args: RunArgs) -> Result<ExitCode, HarnessError> {
    let config = build_config(&args.config)?;
    println!("run {}", config.run_name());
    let metrics = train_run(&config)?;
    for e in &metrics.epochs {
        println!(
            "epoch {:>3}  train loss {:.4} acc {:.3}  test loss {:.4} acc {:.3}",
            e.epoch, e.train_loss, e.train_acc, e.test_loss, e.test_acc
        );
    }
    println!(
        "final test accuracy {:.3} after {} optimizer steps ({:.1}s)",
        metrics.final_test_accuracy, metrics.adam_steps, metrics.wall_clock_seconds
    );
    println!(
        "metrics written to {}",
        harness::run_dir(&config).join(harness::METRICS_FILE).display()
    );
    Ok(ExitCode::SUCCESS)
}

fn sweep(args: SweepArgs) -> Result<ExitCode, HarnessError> {
    let config = build_config(&args.config)?;
    let options = SweepOptions {
        repeats: args.repeats,
        workers: args.workers,
    };
    let report = run_sweep(&config, &options)?;
    for cell in report.cells.iter().filter(|c| !c.ok()) {
        eprintln!("cell failed: {}", cell.error.as_deref().unwrap_or("unknown"));
    }
    println!(
        "sweep: {} cells ok ({} reused), {} failed",
        report.completed(),
        report.reused(),
        report.failed()
    );
    println!("results: {}", report.long_csv.display());
    println!("table:   {}", report.table_csv.display());
    if report.failed() > 0 {
        return Ok(ExitCode::from(EXIT_DATA));
    }
    Ok(ExitCode::SUCCESS)
}

fn gradcheck(args: GradcheckArgs) -> Result<ExitCode, HarnessError> {
    let kind = args.template.parse().map_err(
        |e: quanvolve::templates::UnknownTemplateKind| {
            HarnessError::Config(ConfigError::BadValue {
                key: "template".into(),
                value: args.template.clone(),
                reason: e.to_string(),
            })
        },
    )?;
    let mode = if args.channel_overwrite {
        ChannelMode::ChannelOverwrite
    } else {
        ChannelMode::Single
    };
    let report = gradient_check(kind, mode, args.trials, args.seed)?;
    println!("{report}");
    if !report.passed {
        return Ok(ExitCode::from(EXIT_CHECK));
    }
    Ok(ExitCode::SUCCESS)
}

fn selftest(args: SelftestArgs) -> Result<ExitCode, HarnessError> {
    let report = self_test(args.grad_trials, args.seed)?;
    println!("{report}");
    if !report.passed {
        return Ok(ExitCode::from(EXIT_CHECK));
    }
    Ok(ExitCode::SUCCESS)
}
