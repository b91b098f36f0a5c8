use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use gscore_core::pipeline::{DEFAULT_EXPERIMENTS, DEFAULT_I_MAX, DEFAULT_LANDMARKS};
use gscore_core::{
    compare_datasets_with, generate_synthetic, geometry_score_slices, load_pointcloud,
    run_rlt_experiments_with, save_pointcloud, DataFormat, ExperimentConfig, Gamma, PointCloud,
    RunOptions, Shape, SyntheticSpec, DEFAULT_NOISY_CIRCLE_SIGMA,
};
use serde::Serialize;

use crate::artifact::RltArtifact;
use crate::plot::{render_svg, Series};
use crate::{format_score, CliError};

#[derive(Debug, Parser)]
#[command(name = "gscore", version, about = "Geometry scores for point clouds")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute the per-experiment RLT matrix of a dataset.
    Rlt(RltArgs),
    /// Geometry score between two datasets or two RLT artifacts.
    Score(ScoreArgs),
    /// Write a synthetic dataset.
    Synth(SynthArgs),
    /// Bar chart of one or more artifacts' MRLT.
    Plot(PlotArgs),
}

#[derive(Debug, Clone, Args)]
pub struct PipelineArgs {
    #[arg(long, default_value_t = DEFAULT_LANDMARKS)]
    pub landmarks: usize,
    /// `auto` or a positive number.
    #[arg(long, default_value = "auto", value_parser = parse_gamma)]
    pub gamma: Gamma,
    #[arg(long, default_value_t = DEFAULT_I_MAX)]
    pub imax: usize,
    #[arg(long, default_value_t = DEFAULT_EXPERIMENTS)]
    pub experiments: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads; defaults to all cores.
    #[arg(long)]
    pub threads: Option<usize>,
}

impl PipelineArgs {
    fn config(&self) -> ExperimentConfig {
        ExperimentConfig {
            l0: self.landmarks,
            gamma: self.gamma,
            i_max: self.imax,
            n: self.experiments,
            seed: self.seed,
        }
    }
}

#[derive(Debug, Args)]
pub struct RltArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Defaults to the input's extension.
    #[arg(long, value_parser = parse_format)]
    pub format: Option<DataFormat>,
    #[command(flatten)]
    pub pipeline: PipelineArgs,
    #[arg(long)]
    pub out: PathBuf,
    /// Record mean wall time per experiment (makes the file run-dependent).
    #[arg(long)]
    pub timing: bool,
    #[arg(long)]
    pub quiet: bool,
}

#[derive(Debug, Args)]
pub struct ScoreArgs {
    /// Two datasets, or two `.json` artifacts.
    #[arg(num_args = 2, required = true)]
    pub inputs: Vec<PathBuf>,
    #[arg(long, value_parser = parse_format)]
    pub format: Option<DataFormat>,
    #[command(flatten)]
    pub pipeline: PipelineArgs,
    /// JSON report with both MRLT vectors and the score.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long, value_parser = parse_shape)]
    pub shape: Shape,
    #[arg(long)]
    pub n: usize,
    /// Gaussian noise per coordinate; 0.05 for noisy_circle, 0 otherwise.
    #[arg(long)]
    pub noise: Option<f64>,
    #[arg(long, default_value_t = 784)]
    pub ambient_dim: usize,
    #[arg(long, default_value_t = 32)]
    pub intrinsic_dim: usize,
    #[arg(long)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, value_parser = parse_format)]
    pub format: Option<DataFormat>,
}

#[derive(Debug, Args)]
pub struct PlotArgs {
    #[arg(required = true)]
    pub artifacts: Vec<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
    /// Comma-separated series names; defaults to file stems.
    #[arg(long, value_delimiter = ',')]
    pub labels: Vec<String>,
}

fn parse_gamma(s: &str) -> Result<Gamma, String> {
    s.parse().map_err(|e: gscore_core::Error| e.to_string())
}

fn parse_format(s: &str) -> Result<DataFormat, String> {
    s.parse().map_err(|e: gscore_core::Error| e.to_string())
}

fn parse_shape(s: &str) -> Result<Shape, String> {
    s.parse().map_err(|e: gscore_core::Error| e.to_string())
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Rlt(args) => cmd_rlt(&args),
        Command::Score(args) => cmd_score(&args, &mut std::io::stdout()),
        Command::Synth(args) => cmd_synth(&args),
        Command::Plot(args) => cmd_plot(&args),
    }
}

fn resolve_format(path: &Path, explicit: Option<DataFormat>) -> Result<DataFormat, CliError> {
    explicit.or_else(|| DataFormat::from_path(path)).ok_or_else(|| {
        CliError::usage(format!(
            "cannot infer the format of {}; pass --format csv or --format npy",
            path.display()
        ))
    })
}

fn load(path: &Path, format: Option<DataFormat>) -> Result<PointCloud, CliError> {
    let format = resolve_format(path, format)?;
    Ok(load_pointcloud(path, format)?)
}

fn check_pipeline_args(p: &PipelineArgs) -> Result<(), CliError> {
    if p.threads == Some(0) {
        return Err(CliError::usage("--threads must be at least 1"));
    }
    p.config().validate()?;
    Ok(())
}

fn check_fits(cloud: &PointCloud, p: &PipelineArgs, path: &Path) -> Result<(), CliError> {
    if p.landmarks > cloud.n_samples() {
        return Err(CliError::usage(format!(
            "--landmarks {} is larger than the {} samples in {}",
            p.landmarks,
            cloud.n_samples(),
            path.display()
        )));
    }
    Ok(())
}

fn progress_printer(total: usize) -> impl Fn(usize, usize) + Sync {
    let step = (total / 20).max(1);
    move |done, total| {
        if done % step == 0 || done == total {
            eprintln!("experiments: {done}/{total}");
        }
    }
}

pub fn cmd_rlt(args: &RltArgs) -> Result<(), CliError> {
    check_pipeline_args(&args.pipeline)?;
    let cloud = load(&args.input, args.format)?;
    check_fits(&cloud, &args.pipeline, &args.input)?;
    let printer = progress_printer(args.pipeline.experiments);
    let options = RunOptions {
        threads: args.pipeline.threads,
        progress: (!args.quiet).then_some(&printer as &(dyn Fn(usize, usize) + Sync)),
        cancel: None,
    };
    let matrix = run_rlt_experiments_with(&cloud, &args.pipeline.config(), &options)?;
    if matrix.degenerate_experiments > 0 {
        log::warn!(
            "{} experiments drew coincident landmarks and were recorded as hole-free",
            matrix.degenerate_experiments
        );
    }
    let artifact = RltArtifact::from_matrix(&matrix, args.pipeline.gamma, args.timing);
    artifact.save(&args.out)
}

#[derive(Debug, Serialize)]
pub struct ScoreReport {
    pub inputs: [String; 2],
    pub mrlt_a: Vec<f64>,
    pub mrlt_b: Vec<f64>,
    pub score: f64,
    pub score_x1000: f64,
}

fn is_artifact(path: &Path) -> bool {
    path.extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| e.eq_ignore_ascii_case("json"))
}

/// Score two inputs and print the result to `stdout`.
pub fn cmd_score(args: &ScoreArgs, stdout: &mut dyn std::io::Write) -> Result<(), CliError> {
    let [a, b] = [&args.inputs[0], &args.inputs[1]];
    let (score, mrlt_a, mrlt_b) = match (is_artifact(a), is_artifact(b)) {
        (true, true) => {
            let x = RltArtifact::load(a)?;
            let y = RltArtifact::load(b)?;
            if x.config.i_max != y.config.i_max {
                return Err(CliError::usage(format!(
                    "artifacts have different i_max ({} vs {})",
                    x.config.i_max, y.config.i_max
                )));
            }
            if x.config.experiments != y.config.experiments {
                log::warn!(
                    "artifacts use different experiment counts ({} vs {})",
                    x.config.experiments,
                    y.config.experiments
                );
            }
            if x.config.gamma != y.config.gamma {
                log::warn!(
                    "artifacts use different gamma ({} vs {})",
                    x.config.gamma,
                    y.config.gamma
                );
            }
            let score = geometry_score_slices(&x.mrlt, &y.mrlt)?;
            (score, x.mrlt, y.mrlt)
        }
        (false, false) => {
            check_pipeline_args(&args.pipeline)?;
            let x = load(a, args.format)?;
            let y = load(b, args.format)?;
            check_fits(&x, &args.pipeline, a)?;
            check_fits(&y, &args.pipeline, b)?;
            let options = RunOptions {
                threads: args.pipeline.threads,
                ..RunOptions::default()
            };
            let (score, ma, mb) = compare_datasets_with(&x, &y, &args.pipeline.config(), &options)?;
            (score, ma.values, mb.values)
        }
        _ => {
            return Err(CliError::usage(
                "give either two datasets or two .json artifacts, not one of each",
            ))
        }
    };

    writeln!(stdout, "{}", format_score(score))
        .map_err(|e| CliError::pipeline(format!("cannot write to standard output: {e}")))?;
    if let Some(out) = &args.out {
        let report = ScoreReport {
            inputs: [a.display().to_string(), b.display().to_string()],
            mrlt_a,
            mrlt_b,
            score,
            score_x1000: score * 1000.0,
        };
        let mut text = serde_json::to_string(&report).expect("report serializes");
        text.push('\n');
        std::fs::write(out, text)
            .map_err(|e| CliError::pipeline(format!("cannot write {}: {e}", out.display())))?;
    }
    Ok(())
}

pub fn cmd_synth(args: &SynthArgs) -> Result<(), CliError> {
    let noise = args.noise.unwrap_or(match args.shape {
        Shape::NoisyCircle => DEFAULT_NOISY_CIRCLE_SIGMA,
        _ => 0.0,
    });
    let spec = match args.shape {
        Shape::Hyperplane => SyntheticSpec {
            noise_sigma: noise,
            ..SyntheticSpec::hyperplane(args.n, args.intrinsic_dim, args.ambient_dim, args.seed)
        },
        shape => SyntheticSpec {
            shape,
            noise_sigma: noise,
            ..SyntheticSpec::circle(args.n, noise, args.seed)
        },
    };
    spec.validate()?;
    let format = resolve_format(&args.out, args.format)?;
    let cloud = generate_synthetic(&spec).map_err(|e| CliError::pipeline(e.to_string()))?;
    save_pointcloud(&cloud, &args.out, format).map_err(|e| CliError::pipeline(e.to_string()))
}

pub fn cmd_plot(args: &PlotArgs) -> Result<(), CliError> {
    if !args.labels.is_empty() && args.labels.len() != args.artifacts.len() {
        return Err(CliError::usage(format!(
            "{} labels given for {} artifacts",
            args.labels.len(),
            args.artifacts.len()
        )));
    }
    let artifacts = args
        .artifacts
        .iter()
        .map(|p| RltArtifact::load(p))
        .collect::<Result<Vec<_>, _>>()?;
    let labels: Vec<String> = if args.labels.is_empty() {
        args.artifacts
            .iter()
            .map(|p| {
                p.file_stem()
                    .map(|s| s.to_string_lossy().into_owned())
                    .unwrap_or_else(|| p.display().to_string())
            })
            .collect()
    } else {
        args.labels.clone()
    };
    let series: Vec<Series<'_>> = artifacts
        .iter()
        .zip(&labels)
        .map(|(a, l)| Series {
            label: l,
            values: &a.mrlt,
        })
        .collect();
    let svg = render_svg(&series);
    let mut file = std::fs::File::create(&args.out)
        .map_err(|e| CliError::pipeline(format!("cannot write {}: {e}", args.out.display())))?;
    file.write_all(svg.as_bytes())
        .map_err(|e| CliError::pipeline(format!("cannot write {}: {e}", args.out.display())))
}
