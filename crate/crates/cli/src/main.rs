//! `pupil-cover` command-line front end.
//!
//! Exit codes: 0 success (or covered), 1 not covered (`decide` only),
//! 2 input error, 3 solver failure.

mod files;
mod render;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use pupil_cover::coverage::{analyze, coverage_oracle, max_objective_with, DiskAlpha};
use pupil_cover::design::{prime_design, three_pupil_optimal, DesignError};
use pupil_cover::geom::PupilConfig;
use pupil_cover::optimize::{
    exhaustive_search, Gauge, OptimizeError, OptimizerConfig, OptimizerTrace, StrategyRegistry,
};

use files::{digest, ConfigFile, InputError, Report, SCHEMA};
use render::{render_svg, Layer, ALL_LAYERS};

#[derive(Parser)]
#[command(
    name = "pupil-cover",
    version,
    about = "Cover a disk with the autocorrelation support of a pupil set"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Input {
    /// Configuration file (JSON).
    config: PathBuf,
    /// Write the report here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Default)]
struct RadiusFlags {
    #[arg(long)]
    min_radius: Option<f64>,
    #[arg(long)]
    max_radius: Option<f64>,
    /// Keep every pair of pupils disjoint.
    #[arg(long)]
    forbid_overlap: bool,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    max_iterations: Option<usize>,
}

impl RadiusFlags {
    fn apply(&self, opts: &mut OptimizerConfig) {
        if let Some(v) = self.min_radius {
            opts.min_radius = v;
        }
        if let Some(v) = self.max_radius {
            opts.max_radius = Some(v);
        }
        if self.forbid_overlap {
            opts.forbid_overlap = true;
        }
        if let Some(v) = self.epsilon {
            opts.epsilon = v;
        }
        if let Some(v) = self.max_iterations {
            opts.max_iterations = v;
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Decide whether the ACS covers the objective.
    Decide(Input),
    /// Uniform enlargement needed for coverage, and per-disk enlargements.
    Alpha(Input),
    /// Minimize the sum of radii with centers fixed.
    Minsum {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        flags: RadiusFlags,
        /// Minimize total area instead of the sum of radii.
        #[arg(long)]
        area: bool,
    },
    /// Minimize the total pupil area with centers fixed.
    Minarea {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        flags: RadiusFlags,
    },
    /// Move pupils toward their cells' witness points, radii fixed.
    Move {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        iterations: Option<usize>,
        #[arg(long, value_parser = parse_gauge)]
        gauge: Option<Gauge>,
    },
    /// Search radii over multiples of theta.
    Exhaustive {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        theta: Option<f64>,
        #[command(flatten)]
        flags: RadiusFlags,
    },
    /// Largest objective radius the configuration covers.
    Maxobj(Input),
    /// Run a named strategy or a '+'-joined pipeline such as move+minarea.
    Optimize {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        strategy: String,
        #[command(flatten)]
        flags: RadiusFlags,
    },
    /// List the available strategies.
    Strategies,
    /// Optimal three-pupil design.
    DesignThree {
        #[arg(long)]
        objective_radius: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Equal-radius design from a prime difference cover.
    DesignPrime {
        #[arg(long)]
        objective_radius: f64,
        #[arg(long)]
        pupil_radius: f64,
        /// Also check coverage on a grid of this resolution.
        #[arg(long)]
        verify: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Draw the configuration as SVG.
    Render {
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Comma-separated subset of pupils, acs, diagram, objective.
        #[arg(long, value_delimiter = ',')]
        layers: Option<Vec<Layer>>,
    },
}

fn parse_gauge(s: &str) -> Result<Gauge, String> {
    match s {
        "fix_centroid" => Ok(Gauge::FixCentroid),
        "fix_first_center" => Ok(Gauge::FixFirstCenter),
        other => Err(format!(
            "unknown gauge '{other}' (expected fix_centroid or fix_first_center)"
        )),
    }
}

enum Failure {
    /// Bad input; exit 2 with a diagnostic.
    Input(String),
    /// Solver failure; exit 3 with the error in the report.
    Solver(String),
}

impl From<InputError> for Failure {
    fn from(e: InputError) -> Self {
        Failure::Input(e.to_string())
    }
}

impl From<OptimizeError> for Failure {
    fn from(e: OptimizeError) -> Self {
        match e {
            OptimizeError::Infeasible
            | OptimizeError::IterationLimit(_)
            | OptimizeError::Solver(_) => Failure::Solver(e.to_string()),
            _ => Failure::Input(e.to_string()),
        }
    }
}

impl From<DesignError> for Failure {
    fn from(e: DesignError) -> Self {
        Failure::Input(e.to_string())
    }
}

/// What a command produced: an exit code and the report payload.
struct Done {
    code: u8,
    result: Value,
}

fn ok(result: Value) -> Result<Done, Failure> {
    Ok(Done { code: 0, result })
}

struct Loaded {
    file: ConfigFile,
    cfg: PupilConfig,
    digest: String,
}

fn load(path: &Path) -> Result<Loaded, Failure> {
    let (file, bytes) = ConfigFile::load(path)?;
    let cfg = file.to_config()?;
    Ok(Loaded {
        file,
        cfg,
        digest: digest(&bytes),
    })
}

fn config_json(cfg: &PupilConfig) -> Value {
    serde_json::to_value(ConfigFile::from_config(cfg)).expect("configs serialize")
}

fn trace_json(t: &OptimizerTrace) -> Value {
    json!({
        "iterations": t.iterations,
        "warnings": t.warnings,
        "sum_of_radii": t.final_config.sum_of_radii(),
        "total_area": t.final_config.total_area(),
        "final_config": config_json(&t.final_config),
    })
}

fn alpha_list(map: &std::collections::BTreeMap<(usize, usize), DiskAlpha>) -> Value {
    Value::Array(
        map.iter()
            .map(|(&(i, j), a)| json!({ "i": i, "j": j, "alpha": a.value() }))
            .collect(),
    )
}

fn run_config_command(command: &Command, loaded: &Loaded) -> Result<Done, Failure> {
    let cfg = &loaded.cfg;
    let mut opts = loaded.file.options();
    let tol = opts.tolerances;
    match command {
        Command::Decide(_) => {
            let report = analyze_decision(cfg, &opts);
            let covered = report["covered"].as_bool().unwrap_or(false);
            Ok(Done {
                code: if covered { 0 } else { 1 },
                result: report,
            })
        }
        Command::Alpha(_) => {
            let r = analyze(cfg, &tol);
            ok(json!({
                "covered": r.covered,
                "witness": r.witness,
                "alpha_star": r.alpha_star,
                "per_disk_alpha": alpha_list(&r.per_disk_alpha),
            }))
        }
        Command::Minsum { flags, area, .. } => {
            flags.apply(&mut opts);
            let name = if *area { "minarea" } else { "minsum" };
            ok(trace_json(
                &StrategyRegistry::default().run(name, cfg, &opts)?,
            ))
        }
        Command::Minarea { flags, .. } => {
            flags.apply(&mut opts);
            ok(trace_json(
                &StrategyRegistry::default().run("minarea", cfg, &opts)?,
            ))
        }
        Command::Move {
            iterations, gauge, ..
        } => {
            if let Some(k) = iterations {
                opts.relocation_iterations = *k;
            }
            if let Some(g) = gauge {
                opts.gauge = *g;
            }
            ok(trace_json(
                &StrategyRegistry::default().run("move", cfg, &opts)?,
            ))
        }
        Command::Exhaustive { theta, flags, .. } => {
            flags.apply(&mut opts);
            if let Some(t) = theta {
                opts.theta = *t;
            }
            let found = exhaustive_search(&cfg.centers(), cfg.objective_radius(), &opts)?;
            ok(json!({
                "theta": opts.theta,
                "sum_of_radii": found.sum_of_radii(),
                "final_config": config_json(&found),
            }))
        }
        Command::Maxobj(_) => match max_objective_with(cfg, &tol) {
            Ok(r) => ok(json!({ "r_star": r })),
            Err(e) => Err(Failure::Solver(e.to_string())),
        },
        Command::Optimize {
            strategy, flags, ..
        } => {
            flags.apply(&mut opts);
            ok(json!({
                "strategy": strategy,
                "trace": trace_json(&StrategyRegistry::default().run(strategy, cfg, &opts)?),
            }))
        }
        _ => unreachable!("not a configuration command"),
    }
}

fn analyze_decision(cfg: &PupilConfig, opts: &OptimizerConfig) -> Value {
    let (covered, witness) = pupil_cover::coverage::decide_with(cfg, &opts.tolerances);
    json!({ "covered": covered, "witness": witness })
}

fn input_of(command: &Command) -> Option<&Input> {
    match command {
        Command::Decide(i) | Command::Alpha(i) | Command::Maxobj(i) => Some(i),
        Command::Minsum { input, .. }
        | Command::Minarea { input, .. }
        | Command::Move { input, .. }
        | Command::Exhaustive { input, .. }
        | Command::Optimize { input, .. } => Some(input),
        _ => None,
    }
}

fn write_report(report: &Report, out: Option<&Path>) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(report).expect("reports serialize") + "\n";
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| Failure::Input(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn command_echo() -> String {
    std::env::args().skip(1).collect::<Vec<_>>().join(" ")
}

fn execute(cli: Cli) -> Result<u8, Failure> {
    let start = Instant::now();
    let finish = |digest: String,
                  out: Option<&Path>,
                  outcome: Result<Done, Failure>|
     -> Result<u8, Failure> {
        let (code, result) = match outcome {
            Ok(d) => (d.code, d.result),
            Err(Failure::Solver(msg)) => (3, json!({ "error": msg })),
            Err(e) => return Err(e),
        };
        let report = Report {
            schema: SCHEMA,
            command: command_echo(),
            input_digest: digest,
            result,
            runtime_seconds: start.elapsed().as_secs_f64(),
        };
        write_report(&report, out)?;
        if code == 3 {
            eprintln!(
                "error: {}",
                report.result["error"].as_str().unwrap_or("solver failure")
            );
        }
        Ok(code)
    };

    match &cli.command {
        Command::Strategies => {
            for (name, description) in StrategyRegistry::default().describe() {
                println!("{name:<12}{description}");
            }
            Ok(0)
        }
        Command::DesignThree {
            objective_radius,
            out,
        } => {
            let params = json!({ "objective_radius": objective_radius });
            let outcome = three_pupil_optimal(*objective_radius)
                .map_err(|e| Failure::Input(format!("objective_radius: {e}")))
                .map(|cfg| Done {
                    code: 0,
                    result: json!({ "sum_of_radii": cfg.sum_of_radii(), "design": config_json(&cfg) }),
                });
            let outcome = outcome?;
            finish(
                digest(params.to_string().as_bytes()),
                out.as_deref(),
                Ok(outcome),
            )
        }
        Command::DesignPrime {
            objective_radius,
            pupil_radius,
            verify,
            out,
        } => {
            let params =
                json!({ "objective_radius": objective_radius, "pupil_radius": pupil_radius });
            let d = prime_design(*objective_radius, *pupil_radius)?;
            let cfg = d.config();
            let check = match verify {
                Some(res) if *res < 16 => {
                    return Err(Failure::Input(
                        "verify: resolution must be at least 16".into(),
                    ))
                }
                Some(res) => Some(coverage_oracle(&cfg, *res).0),
                None => None,
            };
            let result = json!({
                "p": d.p,
                "scale": d.scale,
                "pupil_count": d.pupils.len(),
                "count_bound": d.count_bound(),
                "lower_bound": d.lower_bound(),
                "approximation_ratio": d.approximation_ratio(),
                "grid_check_covered": check,
                "design": config_json(&cfg),
            });
            finish(
                digest(params.to_string().as_bytes()),
                out.as_deref(),
                Ok(Done { code: 0, result }),
            )
        }
        Command::Render {
            config,
            out,
            layers,
        } => {
            let loaded = load(config)?;
            let layers = layers.clone().unwrap_or_else(|| ALL_LAYERS.to_vec());
            let svg = render_svg(&loaded.cfg, &layers, &loaded.file.options().tolerances);
            std::fs::write(out, svg)
                .map_err(|e| Failure::Input(format!("cannot write {}: {e}", out.display())))?;
            Ok(0)
        }
        command => {
            let input = input_of(command).expect("configuration command");
            let loaded = load(&input.config)?;
            loaded
                .file
                .options()
                .validate()
                .map_err(|e| Failure::Input(format!("options: {e}")))?;
            let outcome = run_config_command(command, &loaded);
            finish(loaded.digest.clone(), input.out.as_deref(), outcome)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Solver(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}
