//! Command-line front end: flow, reaction, envelope, lemma and report
//! subcommands, writing CSV/JSON/SVG outputs plus a manifest into the
//! chosen output directory.
//!
//! Exit codes: 0 success, 1 domain error (e.g. the metric degenerated
//! mid-run), 2 configuration error (bad arguments, missing files,
//! unparseable JSON).

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use krflab::bounds::MinimizeOptions;
use krflab::envelope::ComparisonEnvelope;
use krflab::flow::{self, FlowConfig};
use krflab::quadform;
use krflab::reaction;
use krflab::report::{self, RunManifest};
use krflab::tensor::{KahlerCurvatureTensor, TensorExchange};

#[derive(Parser)]
#[command(name = "krflab", version, about = "curvature-flow laboratory")]
struct Cli {
    /// Output directory (created if missing); all paths are relative to it.
    #[arg(long, default_value = "out", global = true)]
    out: PathBuf,
    /// Base seed for randomized subcommands.
    #[arg(long, default_value_t = 0, global = true)]
    seed: u64,
    /// Log level (error, warn, info, debug, trace).
    #[arg(long, default_value = "warn", global = true)]
    log_level: String,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the reduced invariant flow from a JSON config.
    Flow(FlowArgs),
    /// Integrate the pointwise curvature reaction ODE from a tensor JSON.
    Reaction(ReactionArgs),
    /// Sample a comparison envelope as CSV (t, value).
    Envelope(EnvelopeArgs),
    /// Fuzz the quadratic-form trace inequality; JSON summary.
    Lemma(LemmaArgs),
    /// Render SVG charts + summary from trajectory CSV files.
    Report(ReportArgs),
}

#[derive(Args)]
struct FlowArgs {
    /// Path to the flow configuration JSON.
    #[arg(long)]
    config: PathBuf,
    /// Also dump per-node curvature fields as JSON.
    #[arg(long)]
    dump_fields: bool,
}

#[derive(Args)]
struct ReactionArgs {
    /// Tensor JSON ({"n": .., "entries": [[i,j,k,l,re,im], ..]}).
    #[arg(long)]
    tensor: PathBuf,
    #[arg(long, default_value_t = 2.0)]
    t_end: f64,
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    /// Number of output intervals.
    #[arg(long, default_value_t = 16)]
    outputs: usize,
    /// Also write full-tensor snapshots at the output times.
    #[arg(long)]
    snapshots: bool,
}

#[derive(Args)]
struct EnvelopeArgs {
    /// Family: scalar-lower, scalar-upper, ricci, holsec, logistic.
    #[arg(long)]
    family: String,
    #[arg(long)]
    mu0: Option<f64>,
    #[arg(long)]
    h0: Option<f64>,
    #[arg(long)]
    nu: Option<f64>,
    #[arg(long, default_value_t = 2)]
    n: usize,
    #[arg(long, default_value_t = 5.0)]
    t_end: f64,
    #[arg(long, default_value_t = 200)]
    samples: usize,
}

#[derive(Args)]
struct LemmaArgs {
    #[arg(long, default_value_t = 3)]
    n: usize,
    #[arg(long, default_value_t = 10000)]
    samples: usize,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct ReportArgs {
    /// Trajectory CSV files to summarize.
    #[arg(required = true)]
    inputs: Vec<PathBuf>,
}

enum CliError {
    Config(String),
    Domain(String),
}

impl CliError {
    fn code(&self) -> ExitCode {
        match self {
            CliError::Config(_) => ExitCode::from(2),
            CliError::Domain(_) => ExitCode::from(1),
        }
    }
    fn message(&self) -> &str {
        match self {
            CliError::Config(m) | CliError::Domain(m) => m,
        }
    }
}

fn config_err<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Config(e.to_string())
}

fn domain_err<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Domain(e.to_string())
}

/// Collects outputs so every file lands in the manifest with a digest.
struct OutputSink {
    dir: PathBuf,
    manifest: RunManifest,
}

impl OutputSink {
    fn new(dir: &Path, config_text: &str) -> Result<Self, CliError> {
        std::fs::create_dir_all(dir).map_err(config_err)?;
        Ok(Self {
            dir: dir.to_path_buf(),
            manifest: RunManifest::new(config_text),
        })
    }

    fn write(&mut self, name: &str, contents: &[u8]) -> Result<(), CliError> {
        let path = self.dir.join(name);
        std::fs::write(&path, contents).map_err(domain_err)?;
        self.manifest.add_file(name, contents);
        Ok(())
    }

    fn finish(mut self, started: Instant) -> Result<(), CliError> {
        self.manifest.wall_clock_ms = started.elapsed().as_millis();
        let text = serde_json::to_string_pretty(&self.manifest).map_err(domain_err)?;
        std::fs::write(self.dir.join("manifest.json"), text).map_err(domain_err)?;
        Ok(())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    env_logger::Builder::new()
        .parse_filters(&cli.log_level)
        .init();
    if let Ok(threads) = std::env::var("KRFLAB_THREADS") {
        if let Ok(v) = threads.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new()
                .num_threads(v.max(1))
                .build_global();
        }
    }
    let started = Instant::now();
    let result = match &cli.command {
        Command::Flow(args) => cmd_flow(&cli, args, started),
        Command::Reaction(args) => cmd_reaction(&cli, args, started),
        Command::Envelope(args) => cmd_envelope(&cli, args, started),
        Command::Lemma(args) => cmd_lemma(&cli, args, started),
        Command::Report(args) => cmd_report(&cli, args, started),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("krflab: {}", e.message());
            e.code()
        }
    }
}

fn cmd_flow(cli: &Cli, args: &FlowArgs, started: Instant) -> Result<(), CliError> {
    let text = std::fs::read_to_string(&args.config).map_err(config_err)?;
    let mut config: FlowConfig = serde_json::from_str(&text).map_err(config_err)?;
    config.record_fields = args.dump_fields;
    let mut sink = OutputSink::new(&cli.out, &text)?;
    let run = flow::run_flow(&config).map_err(|e| match e {
        flow::FlowError::BadConfig(_) => config_err(e),
        other => domain_err(other),
    })?;
    sink.write(
        "trajectory.csv",
        report::trajectory_to_csv(&run.record).as_bytes(),
    )?;
    if let Some(frames) = &run.fields {
        let json = serde_json::to_string(frames).map_err(domain_err)?;
        sink.write("fields.json", json.as_bytes())?;
    }
    sink.finish(started)
}

fn cmd_reaction(cli: &Cli, args: &ReactionArgs, started: Instant) -> Result<(), CliError> {
    let text = std::fs::read_to_string(&args.tensor).map_err(config_err)?;
    let exchange: TensorExchange = serde_json::from_str(&text).map_err(config_err)?;
    let tensor = KahlerCurvatureTensor::from_exchange_json(&exchange).map_err(config_err)?;
    let mut sink = OutputSink::new(&cli.out, &text)?;
    let opts = MinimizeOptions {
        seed: cli.seed,
        ..MinimizeOptions::fast()
    };
    let traj =
        reaction::integrate_reaction(&tensor, (0.0, args.t_end), args.tol, args.outputs, &opts)
            .map_err(domain_err)?;
    let mut csv = String::from("t,scalar_min,ricci_min,holsec_min,orthbis_min,mu_star\n");
    for (t, b) in traj.times.iter().zip(traj.bounds.iter()) {
        let cells = [
            *t,
            b.scalar_min,
            b.ricci_min,
            b.holsec_min,
            b.orthbis_min,
            b.mu_star,
        ]
        .into_iter()
        .map(report::fmt_f64)
        .collect::<Vec<_>>()
        .join(",");
        csv.push_str(&cells);
        csv.push('\n');
    }
    sink.write("reaction.csv", csv.as_bytes())?;
    if args.snapshots {
        let snaps: Vec<serde_json::Value> = traj
            .times
            .iter()
            .zip(traj.tensors.iter())
            .map(|(t, tensor)| {
                serde_json::json!({
                    "t": t,
                    "tensor": tensor.to_exchange_json(),
                })
            })
            .collect();
        let json = serde_json::to_string(&snaps).map_err(domain_err)?;
        sink.write("snapshots.json", json.as_bytes())?;
    }
    sink.finish(started)
}

fn cmd_envelope(cli: &Cli, args: &EnvelopeArgs, started: Instant) -> Result<(), CliError> {
    let need = |v: Option<f64>, what: &str| {
        v.ok_or_else(|| CliError::Config(format!("--{what} is required for this family")))
    };
    let env = match args.family.as_str() {
        "scalar-lower" => ComparisonEnvelope::scalar_lower(need(args.mu0, "mu0")?),
        "scalar-upper" => ComparisonEnvelope::scalar_upper(need(args.h0, "h0")?, args.n),
        "ricci" => ComparisonEnvelope::ricci_lower(need(args.mu0, "mu0")?).map_err(config_err)?,
        "holsec" => ComparisonEnvelope::holsec_lower(need(args.mu0, "mu0")?).map_err(config_err)?,
        "logistic" => ComparisonEnvelope::logistic_pinch(
            need(args.mu0, "mu0")?,
            need(args.nu, "nu")?,
            args.n,
        )
        .map_err(config_err)?,
        other => {
            return Err(CliError::Config(format!(
                "unknown family {other:?}; expected scalar-lower, scalar-upper, ricci, holsec or logistic"
            )))
        }
    };
    let spec_text = serde_json::to_string_pretty(&env).map_err(config_err)?;
    let mut sink = OutputSink::new(&cli.out, &spec_text)?;
    let mut csv = String::from("t,value\n");
    for k in 0..=args.samples {
        let t = args.t_end * k as f64 / args.samples.max(1) as f64;
        let v = env.evaluate(t).map_err(domain_err)?;
        csv.push_str(&format!("{},{}\n", report::fmt_f64(t), report::fmt_f64(v)));
    }
    sink.write("envelope.csv", csv.as_bytes())?;
    sink.write("envelope.json", spec_text.as_bytes())?;
    sink.finish(started)
}

fn cmd_lemma(cli: &Cli, args: &LemmaArgs, started: Instant) -> Result<(), CliError> {
    use rayon::prelude::*;
    if args.n < 1 {
        return Err(CliError::Config("n must be at least 1".into()));
    }
    let seed = args.seed.unwrap_or(cli.seed);
    let config_text = format!(
        "{{\"n\":{},\"samples\":{},\"seed\":{}}}",
        args.n, args.samples, seed
    );
    let mut sink = OutputSink::new(&cli.out, &config_text)?;
    // Seed-split shards; the lowest-seed counterexample wins so the
    // report is deterministic regardless of schedule.
    let outcomes: Vec<(u64, f64, bool)> = (0..args.samples as u64)
        .into_par_iter()
        .map(|k| {
            let f = quadform::sample_psd_form(args.n, seed.wrapping_add(k));
            let ti = quadform::trace_inequality(&f);
            (k, ti.lhs - ti.rhs, ti.holds)
        })
        .collect();
    let violations = outcomes.iter().filter(|(_, _, ok)| !ok).count();
    let worst_slack = outcomes
        .iter()
        .map(|(_, s, _)| *s)
        .fold(f64::INFINITY, f64::min);
    let first_violation = outcomes
        .iter()
        .filter(|(_, _, ok)| !ok)
        .map(|(k, _, _)| *k)
        .min();
    let summary = serde_json::json!({
        "n": args.n,
        "seed": seed,
        "samples": args.samples,
        "violations": violations,
        "worst_slack": worst_slack,
        "first_violation_seed_offset": first_violation,
    });
    sink.write(
        "lemma.json",
        serde_json::to_string_pretty(&summary)
            .map_err(domain_err)?
            .as_bytes(),
    )?;
    println!("{summary}");
    sink.finish(started)
}

fn cmd_report(cli: &Cli, args: &ReportArgs, started: Instant) -> Result<(), CliError> {
    let mut sink = OutputSink::new(&cli.out, "report")?;
    for input in &args.inputs {
        let text = std::fs::read_to_string(input).map_err(config_err)?;
        let record = report::trajectory_from_csv(&text).map_err(domain_err)?;
        let stem = input
            .file_stem()
            .map(|s| s.to_string_lossy().to_string())
            .unwrap_or_else(|| "trajectory".into());
        let (charts, summary) = report::emit_report(&record);
        for (name, svg) in charts {
            sink.write(&format!("{stem}_{name}"), svg.as_bytes())?;
        }
        sink.write(&format!("{stem}_summary.txt"), summary.as_bytes())?;
        print!("{summary}");
    }
    sink.finish(started)
}
