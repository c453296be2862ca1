use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;
use serde_json::{Map, Value};

use safeswitch_core::certificates::{default_epsilon, default_kappa_grid};
use safeswitch_core::certificates::{
    estimate_disturbance_margin, synthesize_certificate, BoundMethod, Certificate, MarginOptions,
    SynthesisOptions, SynthesisOutcome, DEFAULT_KAPPA_COUNT, DEFAULT_RESOLUTION,
};
use safeswitch_core::primitives::PrimitiveLibrary;
use safeswitch_core::schema::LibraryDocument;
use safeswitch_core::simulation::{monte_carlo, CampaignConfig, DisturbanceShape};
use safeswitch_core::switching::{
    validate_dwell_time, DwellTimeBudget, DwellTimeReport, SwitchingSignal,
};
use safeswitch_core::walker::{plot_bundle, run_scenario, ScenarioDocument, WalkerMode};

use crate::config::{FileConfig, Resolver};
use crate::output::RunOutput;
use crate::{
    CertifyArgs, Cli, Command, ScenarioArgs, SimulateArgs, ValidateArgs, EXIT_INFEASIBLE,
    EXIT_INVALID_SIGNAL, EXIT_OK,
};

const DEFAULT_OUT_DIR: &str = "safeswitch-out";

struct RunContext {
    seed: u64,
    out_dir: PathBuf,
    config: FileConfig,
}

pub fn run(cli: Cli) -> Result<i32> {
    let config = FileConfig::load(cli.config.as_deref())?;
    let seed = match cli.seed {
        Some(s) => s,
        None => config.global("seed")?.unwrap_or(0),
    };
    let out_dir = match cli.out_dir {
        Some(d) => d,
        None => config
            .global::<PathBuf>("out_dir")?
            .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR)),
    };
    let ctx = RunContext {
        seed,
        out_dir,
        config,
    };
    match cli.command {
        Command::Certify(args) => certify(&ctx, args),
        Command::Validate(args) => validate(&ctx, args),
        Command::Simulate(args) => simulate(&ctx, args),
        Command::Scenario(args) => scenario(&ctx, args),
    }
}

fn utf8(bytes: &[u8], path: &Path) -> Result<String> {
    String::from_utf8(bytes.to_vec()).with_context(|| format!("{} is not UTF-8", path.display()))
}

fn load_library(out: &mut RunOutput, path: &Path) -> Result<PrimitiveLibrary> {
    let bytes = out.read_input("library", path)?;
    let doc = LibraryDocument::from_json(&utf8(&bytes, path)?)
        .with_context(|| format!("parsing library {}", path.display()))?;
    Ok(doc
        .to_library()
        .with_context(|| format!("library {}", path.display()))?)
}

fn load_certificate(out: &mut RunOutput, path: &Path) -> Result<Certificate> {
    let bytes = out.read_input("certificate", path)?;
    Ok(Certificate::from_json(&utf8(&bytes, path)?)
        .with_context(|| format!("parsing certificate {}", path.display()))?)
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "-".to_string(), |x| format!("{x:.6e}"))
}

fn certify_report(
    lib_path: &Path,
    lib: &PrimitiveLibrary,
    opts: &SynthesisOptions,
    outcome: &SynthesisOutcome,
) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "library     {}", lib_path.display());
    let _ = writeln!(s, "primitives  {}", lib.len());
    let _ = writeln!(s, "lambda      {}", lib.lambda());
    let _ = writeln!(s, "epsilon     {}", opts.epsilon);
    let _ = writeln!(
        s,
        "method      {} (resolution {})",
        opts.method, opts.resolution
    );
    let _ = writeln!(s, "N0 target   {:?}", opts.n0_candidates);
    if !outcome.fixed_point_violations.is_empty() {
        let _ = writeln!(
            s,
            "fixed points outside basins (q, p): {:?}",
            outcome.fixed_point_violations
        );
    }
    let _ = writeln!(s);
    let _ = writeln!(
        s,
        "{:>14} {:>14} {:>14} {:>14}  {:<8} note",
        "kappa", "omega", "mu", "Na_bar", "N0"
    );
    for row in &outcome.sweep {
        let _ = writeln!(
            s,
            "{:>14.6e} {:>14} {:>14} {:>14}  {:<8} {}",
            row.kappa,
            opt(row.omega),
            opt(row.mu),
            opt(row.na_bar),
            format!("{:?}", row.feasible_n0),
            row.note
        );
    }
    let _ = writeln!(s);
    match &outcome.certificate {
        Some(c) => {
            let _ = writeln!(s, "feasible");
            let _ = writeln!(s, "kappa          {}", c.kappa);
            let _ = writeln!(s, "omega          {}", c.omega);
            let _ = writeln!(s, "mu             {}", c.mu);
            let _ = writeln!(s, "N0_bar         {}", c.n0_bar);
            let _ = writeln!(s, "Na_bar         {}", c.na_bar);
            let _ = writeln!(s, "trapping level {}", c.trapping_level());
            if c.na_bar <= 1.0 {
                let _ = writeln!(s, "switching every step is admissible");
            }
        }
        None => {
            let _ = writeln!(
                s,
                "infeasible: no kappa in the sweep passes the containment test"
            );
        }
    }
    s
}

fn certify(ctx: &RunContext, args: CertifyArgs) -> Result<i32> {
    let mut r = Resolver::new(&ctx.config, "certify");
    let lib_path: PathBuf = r.required("library", args.library)?;
    let method = r.get("method", args.method, BoundMethod::Analytic)?;
    let resolution = r.get("resolution", args.resolution, DEFAULT_RESOLUTION)?;
    let n0 = r.get("n0", args.n0, 2u32)?;
    let epsilon = r.optional("epsilon", args.epsilon)?;
    let kappa_count = r.get("kappa_count", args.kappa_count, DEFAULT_KAPPA_COUNT)?;
    let margin_trials = r.get(
        "margin_trials",
        args.margin_trials,
        MarginOptions::default().trial_budget,
    )?;
    let margin_horizon = r.get(
        "margin_horizon",
        args.margin_horizon,
        MarginOptions::default().horizon,
    )?;

    let mut out = RunOutput::create(&ctx.out_dir, "certify", ctx.seed)?;
    let lib = load_library(&mut out, &lib_path)?;
    let opts = SynthesisOptions {
        kappa_grid: default_kappa_grid(&lib, kappa_count),
        epsilon: epsilon.unwrap_or_else(|| default_epsilon(lib.lambda())),
        n0_candidates: vec![n0],
        method,
        resolution,
    };
    r.resolved
        .insert("epsilon".into(), serde_json::to_value(opts.epsilon)?);
    let mut outcome = synthesize_certificate(&lib, &opts)?;
    if let Some(cert) = outcome.certificate.as_mut() {
        if margin_trials > 0 {
            let margin = MarginOptions {
                trial_budget: margin_trials,
                seed: ctx.seed,
                horizon: margin_horizon,
                ..MarginOptions::default()
            };
            cert.delta_hat = Some(estimate_disturbance_margin(&lib, cert, &margin)?);
        }
    }

    let mut report = certify_report(&lib_path, &lib, &opts, &outcome);
    if let Some(d) = outcome.certificate.as_ref().and_then(|c| c.delta_hat) {
        let _ = writeln!(report, "delta_hat      {d}");
    }
    print!("{report}");
    out.write("report.txt", report.as_bytes())?;
    out.write_json("sweep.json", &outcome.sweep)?;
    let code = match &outcome.certificate {
        Some(cert) => {
            out.write(
                "certificate.json",
                (cert.to_json_pretty() + "\n").as_bytes(),
            )?;
            EXIT_OK
        }
        None => {
            eprintln!("certificate infeasible; see report.txt");
            EXIT_INFEASIBLE
        }
    };
    out.finish(r.resolved, code)
}

#[derive(Serialize)]
struct ValidationSummary {
    length: usize,
    switches: usize,
    budget: DwellTimeBudget,
    #[serde(flatten)]
    report: DwellTimeReport,
}

fn validate(ctx: &RunContext, args: ValidateArgs) -> Result<i32> {
    let mut r = Resolver::new(&ctx.config, "validate");
    let signal_path: PathBuf = r.required("signal", args.signal)?;
    let cert_path: Option<PathBuf> = r.optional("certificate", args.certificate)?;
    let n0: Option<f64> = r.optional("n0", args.n0)?;
    let na: Option<f64> = r.optional("na", args.na)?;

    let mut out = RunOutput::create(&ctx.out_dir, "validate", ctx.seed)?;
    let bytes = out.read_input("signal", &signal_path)?;
    let sigma = SwitchingSignal::read_csv(&bytes[..])
        .with_context(|| format!("reading signal {}", signal_path.display()))?;
    let budget = match (cert_path, n0, na) {
        (Some(path), None, None) => load_certificate(&mut out, &path)?.budget(),
        (None, Some(n0), Some(na)) => DwellTimeBudget::new(n0, na)?,
        _ => anyhow::bail!("give either --certificate or both --n0 and --na"),
    };
    let report = validate_dwell_time(&sigma, &budget);
    let (lo, hi) = report.worst_interval;
    println!(
        "{}: worst interval [{lo}, {hi}) slack {} (N0 = {}, Na = {})",
        if report.valid { "valid" } else { "invalid" },
        report.slack,
        budget.n0,
        budget.na
    );
    let code = if report.valid {
        EXIT_OK
    } else {
        EXIT_INVALID_SIGNAL
    };
    out.write_json(
        "validation.json",
        &ValidationSummary {
            length: sigma.len(),
            switches: sigma.switch_times().len(),
            budget,
            report,
        },
    )?;
    out.finish(r.resolved, code)
}

fn simulate(ctx: &RunContext, args: SimulateArgs) -> Result<i32> {
    let mut r = Resolver::new(&ctx.config, "simulate");
    let lib_path: PathBuf = r.required("library", args.library)?;
    let cert_path: PathBuf = r.required("certificate", args.certificate)?;
    let episodes = r.get("episodes", args.episodes, 1000usize)?;
    let horizon = r.get("horizon", args.horizon, 200usize)?;
    let amplitude = r.get("amplitude", args.amplitude, 0.0f64)?;
    let shape = r.get("shape", args.shape, DisturbanceShape::Ball)?;
    let keep_traces = r.get("keep_traces", args.keep_traces, 1usize)?;
    let initial_level = r.optional("initial_level", args.initial_level)?;

    let mut out = RunOutput::create(&ctx.out_dir, "simulate", ctx.seed)?;
    let lib = load_library(&mut out, &lib_path)?;
    let cert = load_certificate(&mut out, &cert_path)?;
    let cfg = CampaignConfig {
        keep_traces,
        initial_level,
        shape,
        ..CampaignConfig::new(episodes, horizon, amplitude, ctx.seed)
    };
    let report = monte_carlo(&lib, &cert, &cfg)?;
    println!(
        "{} episodes, {} violating (rate {}), trapping level {} (bound {}), max decrease ratio {} (lambda {})",
        report.episodes,
        report.violating_episodes,
        report.violation_rate,
        report.trapping_level,
        report.trapping_bound,
        report.max_decrease_ratio,
        report.lambda
    );
    for (i, trace) in report.traces.iter().enumerate() {
        out.write_with(&format!("trace_{i:04}.csv"), |buf| {
            Ok(trace.write_csv(&lib, buf)?)
        })?;
    }
    out.write_json("summary.json", &report)?;
    out.finish(r.resolved, EXIT_OK)
}

#[derive(Serialize)]
struct ScenarioSummary {
    mode: WalkerMode,
    strides: usize,
    max_lateral_deviation: f64,
    final_lateral_deviation: f64,
    final_leader_distance: f64,
    all_in_basins: bool,
    deferrals: usize,
    usage_counts: [usize; 3],
    dwell_time: DwellTimeReport,
}

fn scenario(ctx: &RunContext, args: ScenarioArgs) -> Result<i32> {
    let mut r = Resolver::new(&ctx.config, "scenario");
    let path: PathBuf = r.required("scenario", args.scenario)?;
    let mode = r.optional("mode", args.mode)?;
    let strides = r.optional("strides", args.strides)?;
    let dead_zone = r.optional("dead_zone", args.dead_zone)?;

    let mut out = RunOutput::create(&ctx.out_dir, "scenario", ctx.seed)?;
    let bytes = out.read_input("scenario", &path)?;
    let mut doc = ScenarioDocument::from_json(&utf8(&bytes, &path)?)
        .with_context(|| format!("parsing scenario {}", path.display()))?;
    if let Some(m) = mode {
        doc.mode = m;
    }
    if strides.is_some() {
        doc.stride_count = strides;
    }
    if let Some(d) = dead_zone {
        doc.dead_zone = d;
    }
    let base = path.parent().unwrap_or(Path::new("."));
    out.read_input("library", &base.join(&doc.library))?;
    out.read_input("strides", &base.join(&doc.strides))?;
    out.read_input("certificate", &base.join(&doc.certificate))?;
    let scenario = doc
        .resolve(base)
        .with_context(|| format!("scenario {}", path.display()))?;
    r.resolved
        .insert("mode".into(), Value::String(scenario.mode.to_string()));
    r.resolved.insert(
        "strides".into(),
        serde_json::to_value(scenario.stride_count)?,
    );
    r.resolved.insert(
        "dead_zone".into(),
        serde_json::to_value(scenario.dead_zone)?,
    );

    let trace = run_scenario(&scenario)?;
    let lib = scenario.library();
    let sigma = trace.signal()?;
    let summary = ScenarioSummary {
        mode: trace.mode,
        strides: trace.strides(),
        max_lateral_deviation: trace.max_lateral_deviation(),
        final_lateral_deviation: trace.final_lateral_deviation(),
        final_leader_distance: trace.final_leader_distance(),
        all_in_basins: trace.all_in_basins(),
        deferrals: trace.deferrals,
        usage_counts: trace.usage_counts(),
        dwell_time: validate_dwell_time(&sigma, &scenario.certificate().budget()),
    };
    println!(
        "{} strides ({}): lateral deviation max {} final {}, leader distance {}, in all basins: {}",
        summary.strides,
        summary.mode,
        summary.max_lateral_deviation,
        summary.final_lateral_deviation,
        summary.final_leader_distance,
        summary.all_in_basins
    );
    out.write_with("poses.csv", |buf| Ok(trace.write_poses_csv(buf)?))?;
    out.write_with("forces.csv", |buf| Ok(trace.write_forces_csv(buf)?))?;
    out.write_with("sigma.csv", |buf| Ok(sigma.write_csv(buf)?))?;
    out.write_with("reduced.csv", |buf| Ok(trace.write_reduced_csv(lib, buf)?))?;
    out.write_json("plot.json", &plot_bundle(&scenario, &trace, 8)?)?;
    out.write_json("summary.json", &summary)?;
    let resolved: Map<String, Value> = r.resolved;
    out.finish(resolved, EXIT_OK)
}
