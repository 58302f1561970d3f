//! Thin command-line front end: sweeps, verification suites, and
//! single-instance bound reports. All logic lives in the library.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Deserialize;

use rotgame::ensembles::{random_angles, SeededSource};
use rotgame::error::{Error, Result};
use rotgame::games::{
    bipartite_report, tripartite_report, BoundReport, GameInstance, GameKind, RotationEnsemble,
};
use rotgame::linalg::CMatrix;
use rotgame::qstate::{DensityMatrix, SubsystemLayout};
use rotgame::sweep::{
    preset, preset_names, run_sweep, serialize_to_path, AngleSource, Distribution, GeneratorSpec,
    NoisePlacement, OutputFormat, SweepConfig, DEFAULT_SEED,
};
use rotgame::verify::run_verify;

#[derive(Parser)]
#[command(
    name = "rotgame",
    version,
    about = "Rotation/measurement guessing games: entropy bounds, verification suites, sweeps"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a theta sweep and write one row per grid point
    Sweep(SweepArgs),
    /// Run a named verification suite
    Verify(VerifyArgs),
    /// Evaluate one game instance from files and print its bound report
    Bounds(BoundsArgs),
}

#[derive(Args)]
struct SweepArgs {
    /// Built-in configuration: fig3a, fig3b, fig4 or fig5
    #[arg(long)]
    preset: Option<String>,
    /// Game kind: tripartite or bipartite
    #[arg(long)]
    game: Option<String>,
    /// Comma-separated subsystem dimensions, e.g. 2,2,2 (A,B1,B2) or 2,2 (A,B)
    #[arg(long)]
    dims: Option<String>,
    /// Number of rotation angles |R|
    #[arg(long = "num-rotations")]
    num_rotations: Option<usize>,
    /// Explicit comma-separated angles (otherwise drawn from the seed)
    #[arg(long)]
    angles: Option<String>,
    /// `uniform` or explicit comma-separated probabilities
    #[arg(long)]
    dist: Option<String>,
    /// `pauli-x`, `pauli-z`, or a path to a JSON matrix of [re, im] pairs
    #[arg(long)]
    generator: Option<String>,
    #[arg(long = "theta-start")]
    theta_start: Option<f64>,
    #[arg(long = "theta-stop")]
    theta_stop: Option<f64>,
    /// Number of theta grid points
    #[arg(long = "theta-steps")]
    theta_steps: Option<usize>,
    /// Noise admixture weight in [0, 1]
    #[arg(long = "noise-eps")]
    noise_eps: Option<f64>,
    /// `before` or `after` (noise mixed per factor or into the full state)
    #[arg(long = "noise-placement")]
    noise_placement: Option<String>,
    /// Trials per grid point (means of terms, worst-case gaps)
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output file path
    #[arg(long)]
    out: PathBuf,
    /// `csv` (default) or `json`
    #[arg(long)]
    format: Option<String>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Suite name: qstate, entropy, algebra, identities, games, ensembles, all
    #[arg(long)]
    suite: String,
    #[arg(long, default_value_t = 100)]
    samples: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// `text` (default) or `json`
    #[arg(long)]
    format: Option<String>,
}

#[derive(Args)]
struct BoundsArgs {
    /// Game kind: tripartite or bipartite
    #[arg(long)]
    game: String,
    /// JSON state file: {"labels": [...], "dims": [...], "matrix": [[[re,im],..],..]}
    #[arg(long)]
    state: PathBuf,
    /// `pauli-x` (default), `pauli-z`, or a path to a JSON matrix
    #[arg(long)]
    generator: Option<String>,
    /// Explicit comma-separated angles (otherwise drawn from the seed)
    #[arg(long)]
    angles: Option<String>,
    #[arg(long = "num-rotations")]
    num_rotations: Option<usize>,
    /// `uniform` or explicit comma-separated probabilities
    #[arg(long)]
    dist: Option<String>,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Output file (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Sweep(args) => cmd_sweep(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Bounds(args) => cmd_bounds(args),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}

/// 2 for configuration and input problems, 1 for verification failures.
fn exit_code_for(e: &Error) -> u8 {
    match e {
        Error::Config(_)
        | Error::InvalidParameter(_)
        | Error::Io(_)
        | Error::Json(_)
        | Error::UnknownLabel(_)
        | Error::DuplicateLabel(_)
        | Error::InvalidDimension { .. }
        | Error::InvalidProbabilities(_)
        | Error::DuplicateAngles
        | Error::DimensionMismatch { .. }
        | Error::LayoutMismatch(_)
        | Error::NotHermitian { .. }
        | Error::TraceNotOne { .. }
        | Error::NotPositive { .. } => 2,
        _ => 1,
    }
}

fn parse_f64_list(s: &str, what: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|x| {
            x.trim()
                .parse::<f64>()
                .map_err(|_| Error::Config(format!("{what}: cannot parse `{x}` as a number")))
        })
        .collect()
}

fn parse_game(s: &str) -> Result<GameKind> {
    match s {
        "tripartite" => Ok(GameKind::Tripartite),
        "bipartite" => Ok(GameKind::Bipartite),
        other => Err(Error::Config(format!(
            "game must be `tripartite` or `bipartite`, got `{other}`"
        ))),
    }
}

fn parse_generator_spec(s: &str) -> Result<GeneratorSpec> {
    match s {
        "pauli-x" => Ok(GeneratorSpec::PauliX),
        "pauli-z" => Ok(GeneratorSpec::PauliZ),
        path => {
            let text = std::fs::read_to_string(path)?;
            let rows: Vec<Vec<[f64; 2]>> = serde_json::from_str(&text)?;
            Ok(GeneratorSpec::Explicit(rows))
        }
    }
}

fn parse_distribution(s: &str) -> Result<Distribution> {
    if s == "uniform" {
        Ok(Distribution::Uniform)
    } else {
        Ok(Distribution::Explicit(parse_f64_list(s, "dist")?))
    }
}

fn cmd_sweep(args: SweepArgs) -> Result<ExitCode> {
    let mut config = match &args.preset {
        Some(name) => preset(name)?,
        None => {
            let game = parse_game(args.game.as_deref().ok_or_else(|| {
                Error::Config(format!(
                    "--game is required without --preset (presets: {})",
                    preset_names().join(", ")
                ))
            })?)?;
            let dims_text = args
                .dims
                .as_deref()
                .ok_or_else(|| Error::Config("--dims is required without --preset".into()))?;
            let dims: Vec<usize> = dims_text
                .split(',')
                .map(|x| {
                    x.trim()
                        .parse::<usize>()
                        .map_err(|_| Error::Config(format!("dims: cannot parse `{x}`")))
                })
                .collect::<Result<_>>()?;
            SweepConfig {
                game,
                dims,
                num_rotations: 6,
                distribution: Distribution::Uniform,
                angles: AngleSource::Random,
                generator: GeneratorSpec::PauliX,
                theta_start: 0.0,
                theta_stop: std::f64::consts::PI,
                theta_steps: 50,
                noise_eps: 0.0,
                noise_placement: NoisePlacement::AfterTensor,
                trials: 1,
                seed: DEFAULT_SEED,
            }
        }
    };
    if let Some(game) = &args.game {
        if args.preset.is_some() {
            config.game = parse_game(game)?;
        }
    }
    if let (Some(dims_text), Some(_)) = (&args.dims, &args.preset) {
        config.dims = dims_text
            .split(',')
            .map(|x| {
                x.trim()
                    .parse::<usize>()
                    .map_err(|_| Error::Config(format!("dims: cannot parse `{x}`")))
            })
            .collect::<Result<_>>()?;
    }
    if let Some(n) = args.num_rotations {
        config.num_rotations = n;
    }
    if let Some(angles) = &args.angles {
        let list = parse_f64_list(angles, "angles")?;
        config.num_rotations = list.len();
        config.angles = AngleSource::Explicit(list);
    }
    if let Some(dist) = &args.dist {
        config.distribution = parse_distribution(dist)?;
    }
    if let Some(g) = &args.generator {
        config.generator = parse_generator_spec(g)?;
    }
    if let Some(x) = args.theta_start {
        config.theta_start = x;
    }
    if let Some(x) = args.theta_stop {
        config.theta_stop = x;
    }
    if let Some(x) = args.theta_steps {
        config.theta_steps = x;
    }
    if let Some(x) = args.noise_eps {
        config.noise_eps = x;
    }
    if let Some(p) = &args.noise_placement {
        config.noise_placement = p.parse()?;
    }
    if let Some(x) = args.trials {
        config.trials = x;
    }
    if let Some(x) = args.seed {
        config.seed = x;
    }
    let format: OutputFormat = args.format.as_deref().unwrap_or("csv").parse()?;

    let table = run_sweep(&config)?;
    serialize_to_path(&table, format, &args.out)?;
    println!(
        "wrote {} rows ({} game, seed {}) to {}",
        table.rows.len(),
        table.kind.as_str(),
        config.seed,
        args.out.display()
    );
    Ok(ExitCode::SUCCESS)
}

fn cmd_verify(args: VerifyArgs) -> Result<ExitCode> {
    let report = run_verify(&args.suite, args.samples, args.seed)?;
    match args.format.as_deref().unwrap_or("text") {
        "text" => {
            for c in &report.checks {
                let tag = if c.passed { "PASS" } else { "FAIL" };
                println!("{tag} {} — {}", c.name, c.details);
            }
            let failed = report.failures().count();
            println!(
                "suite `{}`: {}/{} checks passed",
                report.suite,
                report.checks.len() - failed,
                report.checks.len()
            );
        }
        "json" => {
            let value = serde_json::json!({
                "suite": report.suite,
                "passed": report.passed(),
                "checks": report.checks.iter().map(|c| serde_json::json!({
                    "name": c.name,
                    "passed": c.passed,
                    "details": c.details,
                })).collect::<Vec<_>>(),
            });
            println!("{}", serde_json::to_string_pretty(&value)?);
        }
        other => {
            return Err(Error::Config(format!(
                "format must be `text` or `json`, got `{other}`"
            )))
        }
    }
    Ok(if report.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

#[derive(Deserialize)]
struct StateFile {
    labels: Vec<String>,
    dims: Vec<usize>,
    matrix: Vec<Vec<[f64; 2]>>,
}

fn load_state(path: &Path) -> Result<DensityMatrix> {
    let text = std::fs::read_to_string(path)?;
    let file: StateFile = serde_json::from_str(&text)?;
    if file.labels.len() != file.dims.len() {
        return Err(Error::Config(
            "state file: labels and dims must have equal length".into(),
        ));
    }
    let layout = SubsystemLayout::new(file.labels.into_iter().zip(file.dims))?;
    let d = layout.total_dim();
    if file.matrix.len() != d || file.matrix.iter().any(|row| row.len() != d) {
        return Err(Error::Config(format!(
            "state file: matrix must be {d}x{d} for the given dims"
        )));
    }
    let m = CMatrix::from_fn(d, d, |i, j| {
        num_complex::Complex64::new(file.matrix[i][j][0], file.matrix[i][j][1])
    });
    DensityMatrix::new(layout, m)
}

fn cmd_bounds(args: BoundsArgs) -> Result<ExitCode> {
    let kind = parse_game(&args.game)?;
    let rho = load_state(&args.state)?;
    let dim_a = rho.layout().dim_of("A")?;
    let generator_spec = parse_generator_spec(args.generator.as_deref().unwrap_or("pauli-x"))?;
    let generator = SweepConfig {
        game: kind,
        dims: match kind {
            GameKind::Tripartite => vec![
                dim_a,
                rho.layout().dim_of("B1")?,
                rho.layout().dim_of("B2")?,
            ],
            GameKind::Bipartite => vec![dim_a, rho.layout().dim_of("B")?],
        },
        num_rotations: 1,
        distribution: Distribution::Uniform,
        angles: AngleSource::Explicit(vec![0.0]),
        generator: generator_spec,
        theta_start: 0.0,
        theta_stop: 0.0,
        theta_steps: 1,
        noise_eps: 0.0,
        noise_placement: NoisePlacement::AfterTensor,
        trials: 1,
        seed: args.seed,
    }
    .generator()?;

    let angles = match &args.angles {
        Some(list) => parse_f64_list(list, "angles")?,
        None => {
            let n = args.num_rotations.unwrap_or(6);
            let mut src = SeededSource::new(args.seed, "angles");
            random_angles(n, &mut src)?
        }
    };
    let ensemble = match args.dist.as_deref() {
        None | Some("uniform") => RotationEnsemble::uniform(angles)?,
        Some(probs) => RotationEnsemble::new(angles, parse_f64_list(probs, "dist")?)?,
    };

    let game = GameInstance::new(rho, generator, ensemble)?;
    let report = match kind {
        GameKind::Tripartite => tripartite_report(&game)?,
        GameKind::Bipartite => bipartite_report(&game)?,
    };
    let rendered = render_report(&report)?;
    match &args.out {
        Some(path) => {
            let mut file = std::fs::File::create(path)?;
            writeln!(file, "{rendered}")?;
        }
        None => println!("{rendered}"),
    }
    Ok(ExitCode::SUCCESS)
}

fn render_report(report: &BoundReport) -> Result<String> {
    let terms: serde_json::Map<String, serde_json::Value> = report
        .terms()
        .iter()
        .map(|&(name, value)| (name.to_string(), serde_json::json!(value)))
        .collect();
    let mut rhs = serde_json::Map::new();
    let mut gaps = serde_json::Map::new();
    let mut saturation = serde_json::Map::new();
    for variant in report.variants().collect::<Vec<_>>() {
        rhs.insert(
            variant.key().to_string(),
            serde_json::json!(report.rhs(variant)),
        );
        gaps.insert(
            variant.key().to_string(),
            serde_json::json!(report.gap(variant)),
        );
        if let Some(flag) = report.saturated(variant) {
            saturation.insert(variant.key().to_string(), serde_json::json!(flag));
        }
    }
    let value = serde_json::json!({
        "game": report.kind.as_str(),
        "lhs": report.lhs,
        "terms": terms,
        "rhs": rhs,
        "gaps": gaps,
        "saturation": saturation,
    });
    Ok(serde_json::to_string_pretty(&value)?)
}
