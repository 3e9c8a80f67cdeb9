use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hmhd_core::config::{DataKind, RunConfig};
use hmhd_core::diagnostics::{write_csv, RunStatus};
use hmhd_core::initial_data::{coefficient_norms, make_theorem2_data, spectral_support_check};
use hmhd_core::linear_flows::{forcing_f, forcing_g, lemma22_integral, lemma22_pointwise, LinearFlowPair};
use hmhd_core::lp::{sobolev_norm_direct, LPBlockSet, NormSpec};
use hmhd_core::solver::{run, SimState};
use hmhd_core::spectral::{curl, divergence_residual, fractional_laplacian, l2_norm};
use hmhd_core::verify::{run_suite, VerifyOptions, SUITES};
use hmhd_core::{checkpoint, HmhdError, SpectralVectorField};

#[derive(Parser)]
#[command(name = "hmhd", version, about = "Pseudo-spectral Hall-MHD solver with fractional dissipation")]
struct Cli {
    /// Worker threads (default: all logical cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Default)]
struct Common {
    /// TOML run configuration; defaults apply when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override a configuration entry, e.g. `--set control.dt=0.005`.
    #[arg(long = "set", value_name = "SECTION.KEY=VALUE")]
    overrides: Vec<String>,
    /// Output directory (replaces `output.directory`).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum GenKind {
    SmallRandom,
    Theorem2,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate from the configured initial data and write diagnostics.
    Run(Common),
    /// Construct initial data and write it as a checkpoint with its norms.
    GenData {
        #[arg(long, value_enum)]
        kind: Option<GenKind>,
        #[command(flatten)]
        common: Common,
    },
    /// Run a property sweep and write its table of ratios.
    Verify {
        /// One of lp, commutator, gn, linflow, qkernel, energy.
        suite: String,
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1.0)]
        alpha: f64,
        /// Shell half-widths for the sweep suites.
        #[arg(long, value_delimiter = ',')]
        epsilon: Vec<f64>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Tabulate the linear flows and their forcing terms over time.
    Linflow(Common),
    /// Littlewood-Paley block energies and norms of a state.
    LpNorms {
        /// Checkpoint to analyse; the configured initial data otherwise.
        #[arg(long)]
        input: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
}

enum Failure {
    Error(HmhdError),
    BlowUp(String),
    Verify(String),
}

impl From<HmhdError> for Failure {
    fn from(e: HmhdError) -> Self {
        Failure::Error(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Error(HmhdError::Io(e))
    }
}

type Outcome = std::result::Result<(), Failure>;

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: cannot set thread count: {e}");
            return ExitCode::from(1);
        }
    }
    let result = match cli.command {
        Command::Run(common) => cmd_run(&common),
        Command::GenData { kind, common } => cmd_gen_data(kind, &common),
        Command::Verify { suite, samples, seed, alpha, epsilon, out } => cmd_verify(&suite, samples, seed, alpha, epsilon, &out),
        Command::Linflow(common) => cmd_linflow(&common),
        Command::LpNorms { input, common } => cmd_lp_norms(input.as_deref(), &common),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::BlowUp(msg)) => {
            eprintln!("blow-up: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Verify(msg)) => {
            eprintln!("verification failed: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Error(HmhdError::BlowUp { time, reason, .. })) => {
            eprintln!("blow-up at t = {time}: {reason}");
            ExitCode::from(2)
        }
        Err(Failure::Error(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn load(common: &Common) -> Result<RunConfig, HmhdError> {
    let mut overrides = common.overrides.clone();
    if let Some(out) = &common.out {
        overrides.push(format!("output.directory={}", toml_string(&out.display().to_string())));
    }
    match &common.config {
        Some(path) => RunConfig::from_path(path, &overrides),
        None => RunConfig::from_toml_str("", &overrides),
    }
}

fn toml_string(s: &str) -> String {
    serde_json::to_string(s).expect("string serializes")
}

fn out_path(cfg: &RunConfig, suffix: &str) -> PathBuf {
    cfg.output.directory.join(format!("{}{suffix}", cfg.output.prefix))
}

fn write_json(path: &Path, value: &serde_json::Value) -> Outcome {
    fs::write(path, serde_json::to_string_pretty(value).expect("json serializes") + "\n")?;
    Ok(())
}

fn cmd_run(common: &Common) -> Outcome {
    let cfg = load(common)?;
    fs::create_dir_all(&cfg.output.directory)?;
    let (state, flow) = cfg.initial_state()?;
    let record = run(&state, &cfg.step_control(), cfg.control.t_end, cfg.control.diagnostics_every, &cfg.run_options(flow))?;
    write_csv(&record.reports, &out_path(&cfg, ".csv"))?;
    record.write_summary(&out_path(&cfg, ".json"))?;
    if let Some(last) = &record.final_state {
        checkpoint::write_checkpoint(&out_path(&cfg, "_final.chk"), last)?;
    }
    let end = record.reports.last().map(|r| r.time).unwrap_or(state.time);
    println!("{} rows, final time {end}, energy residual {:.3e}", record.reports.len(), record.energy_residual);
    match record.status {
        RunStatus::BlowUp => {
            let (t, reason) = record.blow_up.clone().unwrap_or_default();
            Err(Failure::BlowUp(format!("t = {t}: {reason}")))
        }
        _ => Ok(()),
    }
}

fn beltrami_residual(v: &SpectralVectorField) -> Result<f64, HmhdError> {
    let lam = fractional_laplacian(v, 0.5)?;
    let scale = l2_norm(&lam);
    Ok(if scale == 0.0 { 0.0 } else { l2_norm(&curl(v).sub(&lam)) / scale })
}

fn cmd_gen_data(kind: Option<GenKind>, common: &Common) -> Outcome {
    let mut common = common.clone();
    match kind {
        Some(GenKind::SmallRandom) => common.overrides.push("data.kind=small_random".into()),
        Some(GenKind::Theorem2) => common.overrides.push("data.kind=theorem2".into()),
        None => {}
    }
    let cfg = load(&common)?;
    if cfg.data.kind == DataKind::Checkpoint {
        return Err(HmhdError::Config("gen-data needs kind small_random or theorem2".into()).into());
    }
    fs::create_dir_all(&cfg.output.directory)?;
    let (state, _) = cfg.initial_state()?;
    let s = cfg.exponents.s;
    let mut summary = serde_json::json!({
        "config": cfg.to_json(),
        "hs_u": sobolev_norm_direct(&state.u_hat, s, false),
        "hs_b": sobolev_norm_direct(&state.b_hat, s, false),
        "div_u": divergence_residual(&state.u_hat),
        "div_b": divergence_residual(&state.b_hat),
    });
    if cfg.data.kind == DataKind::Theorem2 {
        let grid = cfg.make_grid()?;
        let data = make_theorem2_data(&grid, &cfg.annulus_params(), cfg.data.u01_norm, cfg.data.b01_norm)?;
        let eps = cfg.data.epsilon;
        let (inside, leak) = spectral_support_check(&data.v0, 1.0 - eps, 1.0 + eps);
        let (l1, l2) = coefficient_norms(&data.v0);
        let total = sobolev_norm_direct(&data.u0, s, false) + sobolev_norm_direct(&data.b0, s, false);
        let small = sobolev_norm_direct(&data.u01, s, false) + sobolev_norm_direct(&data.b01, s, false);
        let extra = serde_json::json!({
            "beltrami_residual": beltrami_residual(&data.v0)?,
            "div_v0": divergence_residual(&data.v0),
            "support_inside": inside,
            "support_leak_fraction": leak,
            "v0_l1": l1,
            "v0_l2": l2,
            "smallness_111": data.smallness_value,
            "hs_total": total,
            "hs_small_part": small,
        });
        summary.as_object_mut().unwrap().extend(extra.as_object().unwrap().clone());
    }
    checkpoint::write_checkpoint(&out_path(&cfg, "_initial.chk"), &state)?;
    write_json(&out_path(&cfg, "_initial.json"), &summary)?;
    println!("{}", serde_json::to_string_pretty(&summary).expect("json serializes"));
    Ok(())
}

fn cmd_verify(suite: &str, samples: Option<usize>, seed: u64, alpha: f64, epsilon: Vec<f64>, out: &Path) -> Outcome {
    if !SUITES.contains(&suite) {
        return Err(HmhdError::Config(format!("unknown suite {suite:?}; expected one of {}", SUITES.join(", "))).into());
    }
    let mut opts = VerifyOptions { seed, alpha, ..Default::default() };
    if let Some(n) = samples {
        opts.samples = n;
    } else if suite == "commutator" {
        opts.samples = 100;
    }
    if !epsilon.is_empty() {
        opts.epsilons = epsilon;
    }
    let result = run_suite(suite, &opts)?;
    fs::create_dir_all(out)?;
    let path = out.join(format!("verify_{suite}.csv"));
    result.write_csv(&path)?;
    println!("suite {suite}: {} rows -> {}", result.rows.len(), path.display());
    for (name, value) in &result.notes {
        println!("  {name} = {value:.6e}");
    }
    for f in &result.failures {
        println!("  FAIL {f}");
    }
    if result.passed() {
        println!("  all hard checks passed");
        Ok(())
    } else {
        Err(Failure::Verify(format!("{} hard check(s) failed in suite {suite}", result.failures.len())))
    }
}

fn cmd_linflow(common: &Common) -> Outcome {
    let cfg = load(common)?;
    fs::create_dir_all(&cfg.output.directory)?;
    let grid = cfg.make_grid()?;
    let params = cfg.annulus_params();
    let v0 = hmhd_core::initial_data::make_v0(&grid, &params)?;
    let flow = LinearFlowPair::new(v0.clone(), cfg.data.alpha1, cfg.data.alpha2, cfg.exponents.alpha)?;
    let s = cfg.exponents.s;
    let steps = (cfg.control.t_end / cfg.control.dt).round().max(1.0) as usize;
    let path = out_path(&cfg, "_linflow.csv");
    let mut w = String::from("time,l2_U,l2_B,hs_U,hs_B,forcing_f_hs,forcing_g_hs_half,pointwise\n");
    for k in 0..=steps {
        let t = k as f64 * cfg.control.t_end / steps as f64;
        let (u, b) = (flow.velocity(t)?, flow.magnetic(t)?);
        let row = [
            t,
            l2_norm(&u),
            l2_norm(&b),
            sobolev_norm_direct(&u, s, false),
            sobolev_norm_direct(&b, s, false),
            sobolev_norm_direct(&forcing_f(&u, &b)?, s, false),
            sobolev_norm_direct(&forcing_g(&u, &b)?, s + 0.5, false),
            lemma22_pointwise(&u, &b, s)?,
        ];
        w.push_str(&row.iter().map(|v| format!("{v:.16e}")).collect::<Vec<_>>().join(","));
        w.push('\n');
    }
    fs::write(&path, w)?;
    let integral = lemma22_integral(&v0, cfg.exponents.alpha, cfg.data.alpha1, cfg.data.alpha2, s, cfg.control.t_end, cfg.control.dt)?;
    let (l1, l2) = coefficient_norms(&v0);
    let summary = serde_json::json!({
        "config": cfg.to_json(),
        "v0_l1": l1,
        "v0_l2": l2,
        "forcing_g_time_integral": integral.value,
        "normalized_integral": integral.value / (cfg.data.epsilon * l1 * l2),
        "tail_fraction": integral.tail_fraction,
        "decay_warning": integral.decay_warning,
    });
    write_json(&out_path(&cfg, "_linflow.json"), &summary)?;
    println!("{}", serde_json::to_string_pretty(&summary).expect("json serializes"));
    Ok(())
}

fn cmd_lp_norms(input: Option<&Path>, common: &Common) -> Outcome {
    let cfg = load(common)?;
    fs::create_dir_all(&cfg.output.directory)?;
    let state: SimState = match input {
        Some(p) => checkpoint::read_checkpoint(p)?,
        None => cfg.initial_state()?.0,
    };
    let lp = LPBlockSet::new(state.grid());
    let mut csv = String::from("field,j,block_energy\n");
    let mut norms = serde_json::Map::new();
    for (name, f) in [("u", &state.u_hat), ("b", &state.b_hat)] {
        for (i, e) in lp.block_energies(f)?.iter().enumerate() {
            csv.push_str(&format!("{name},{},{e:.16e}\n", lp.j_min() + i as i32));
        }
        let mut entry = serde_json::Map::new();
        for s in [0.5, 1.0, state.exponents.s] {
            let direct = sobolev_norm_direct(f, s, true);
            let blocks = lp.sobolev_norm(f, s, true)?;
            entry.insert(format!("hdot_{s}_direct"), direct.into());
            entry.insert(format!("hdot_{s}_lp"), blocks.into());
        }
        let besov = lp.besov_norm(f, NormSpec::new(state.exponents.s, 2.0, 1.0, false)?)?;
        entry.insert(format!("besov_{}_2_1", state.exponents.s), besov.into());
        norms.insert(name.into(), entry.into());
    }
    fs::write(out_path(&cfg, "_lp_blocks.csv"), csv)?;
    let summary = serde_json::Value::Object(norms);
    write_json(&out_path(&cfg, "_lp_norms.json"), &summary)?;
    println!("{}", serde_json::to_string_pretty(&summary).expect("json serializes"));
    Ok(())
}
