//! Command-line front end: eval | compare | optimize | verify | simulate.
//!
//! Every subcommand prints a short summary table and writes a JSON report
//! (`eval.json`, `compare.json`, `optimize.json`, `report.json` for verify,
//! `simulate.json`) into `--out`. A JSON config file can hold the same keys
//! as the flags (underscored); flags override file values. Outputs are
//! byte-reproducible for identical configurations — `--timing` opts into
//! recording wall time, which breaks that on purpose.
//!
//! Exit codes: 0 success, 1 a bound was violated beyond tolerance,
//! 2 usage/config error, 3 numerical error.

use crate::bounds::{comparison_rows, dominates, Estimate, EstimateId};
use crate::error::{Error, Result};
use crate::kernels::{slack_grid, verify_on_grid, GridSpec, ModelManifold};
use crate::paramfun::{ParamFunction, WeightFunction};
use crate::report::{write_csv, Report};
use crate::simulate::{
    calibrate_monitor_slack, monitor, run_radial_heat, InitialData, RadialGrid,
};
use crate::varopt::{phi_upper, FamilyKind, Phi, PhiOptions};
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};
use std::path::PathBuf;
use std::time::Instant;

#[derive(Parser, Debug)]
#[command(
    name = "liyau",
    version,
    about = "Li-Yau type gradient estimates: evaluate, compare, optimize, verify, simulate"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate one estimate at (t, n, k) in beta- and alpha-form
    Eval(EvalArgs),
    /// Compare two estimates over a (t, beta) grid
    Compare(CompareArgs),
    /// Minimize psi1/psi2 over parameter families (phi upper bounds)
    Optimize(OptimizeArgs),
    /// Check an estimate against a closed-form heat kernel on a grid
    Verify(VerifyArgs),
    /// Run the radial heat solver, optionally monitoring an estimate
    Simulate(SimulateArgs),
}

#[derive(Args, Debug, Clone)]
struct CommonArgs {
    /// Dimension n >= 2
    #[arg(long)]
    n: Option<u32>,
    /// Ricci lower-bound constant (Ric >= -k)
    #[arg(long)]
    k: Option<f64>,
    /// Evaluation time
    #[arg(long)]
    t: Option<f64>,
    /// Output directory for reports (default ".")
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker thread cap; environment default LIYAU_THREADS
    #[arg(long)]
    threads: Option<usize>,
    /// Seed for optimizer restarts
    #[arg(long)]
    seed: Option<u64>,
    /// JSON config file with the same keys as the flags; flags win
    #[arg(long)]
    config: Option<PathBuf>,
    /// Record wall time in the report (makes outputs non-reproducible)
    #[arg(long)]
    timing: bool,
}

#[derive(Args, Debug, Clone)]
struct EstimateArgs {
    /// Estimate identifier: li_yau, davies_alpha, davies_beta, hamilton,
    /// hamilton_theta, li_xu, li_xu_linear, qian_general, qian_theta,
    /// psi1, psi2, cor12, cor14, cor15
    #[arg(long)]
    estimate: Option<String>,
    /// beta parameter (davies_beta, cor12/14/15, constant beta family)
    #[arg(long)]
    beta: Option<f64>,
    /// alpha parameter (li_yau, davies_alpha)
    #[arg(long)]
    alpha: Option<f64>,
    /// theta parameter (hamilton_theta, qian_theta, beta families)
    #[arg(long)]
    theta: Option<f64>,
    /// Weight family for qian_general: sinh_sq | quadratic | power_theta | tabulated
    #[arg(long)]
    weight: Option<String>,
    /// Weight family parameters, comma-separated
    #[arg(long)]
    weight_params: Option<String>,
    /// Parameter-curve family for psi1/psi2: constant | linear |
    /// exponential | rational | piecewise_linear
    #[arg(long)]
    beta_family: Option<String>,
    /// Parameter-curve parameters, comma-separated
    #[arg(long)]
    beta_params: Option<String>,
    /// Horizon T for parameter curves and weights (default: the largest
    /// evaluation time of the run)
    #[arg(long)]
    horizon: Option<f64>,
}

#[derive(Args, Debug)]
struct EvalArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[command(flatten)]
    est: EstimateArgs,
}

#[derive(Args, Debug)]
struct CompareArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// First estimate identifier
    #[arg(long)]
    a: Option<String>,
    /// Second estimate identifier
    #[arg(long)]
    b: Option<String>,
    #[arg(long)]
    t_min: Option<f64>,
    #[arg(long)]
    t_max: Option<f64>,
    /// Time sample count (log-spaced)
    #[arg(long)]
    t_count: Option<usize>,
    #[arg(long)]
    beta_min: Option<f64>,
    #[arg(long)]
    beta_max: Option<f64>,
    /// Shared-beta sample count
    #[arg(long)]
    beta_count: Option<usize>,
}

#[derive(Args, Debug)]
struct OptimizeArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// phi1 or phi2
    #[arg(long)]
    which: Option<String>,
    /// Endpoint value beta(t0) = beta0 in (0,1)
    #[arg(long)]
    beta0: Option<f64>,
    /// Endpoint time
    #[arg(long)]
    t0: Option<f64>,
    /// Families to search, comma-separated (default all):
    /// linear,exponential,rational,piecewise_linear
    #[arg(long)]
    families: Option<String>,
    /// Piecewise-linear segment count
    #[arg(long)]
    segments: Option<usize>,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[command(flatten)]
    est: EstimateArgs,
    /// Model geometry: euclidean | hyperbolic3
    #[arg(long)]
    model: Option<String>,
    /// Hyperbolic curvature scale (sectional curvature -c^2)
    #[arg(long)]
    c: Option<f64>,
    #[arg(long)]
    r_max: Option<f64>,
    #[arg(long)]
    nr: Option<usize>,
    #[arg(long)]
    t_min: Option<f64>,
    #[arg(long)]
    t_max: Option<f64>,
    #[arg(long)]
    nt: Option<usize>,
    /// Violation tolerance on LHS - RHS
    #[arg(long)]
    tol: Option<f64>,
    /// RHS multiplier for falsification testing
    #[arg(long)]
    rhs_scale: Option<f64>,
    /// Also dump the per-node slack grid as CSV
    #[arg(long)]
    dump_grid: bool,
}

#[derive(Args, Debug)]
struct SimulateArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[command(flatten)]
    est: EstimateArgs,
    /// Model geometry: euclidean | hyperbolic3
    #[arg(long)]
    model: Option<String>,
    #[arg(long)]
    c: Option<f64>,
    /// Initial data: gaussian | bump | constant_plus_bump | constant
    #[arg(long)]
    initial: Option<String>,
    /// Kernel age of gaussian initial data
    #[arg(long)]
    t0: Option<f64>,
    #[arg(long)]
    amplitude: Option<f64>,
    #[arg(long)]
    width: Option<f64>,
    #[arg(long)]
    floor: Option<f64>,
    #[arg(long)]
    base: Option<f64>,
    /// Constant initial value
    #[arg(long)]
    value: Option<f64>,
    #[arg(long)]
    r_max: Option<f64>,
    #[arg(long)]
    nr: Option<usize>,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long)]
    t_end: Option<f64>,
    #[arg(long)]
    interior_fraction: Option<f64>,
    /// Store a snapshot every this many steps
    #[arg(long)]
    stride: Option<usize>,
    /// Solution age offset for bound evaluation (default: t0 for gaussian
    /// runs, 0 otherwise)
    #[arg(long)]
    t_shift: Option<f64>,
    /// Discretization slack; calibrated from a kernel-matched run at the
    /// same resolution when omitted
    #[arg(long)]
    eps_disc: Option<f64>,
    /// Dump snapshots as CSV (columns t, r, u)
    #[arg(long)]
    dump_csv: bool,
}

// ---------------------------------------------------------------------------
// Config-file merging
// ---------------------------------------------------------------------------

/// Flag/config resolution: a flag wins, then the config file, then defaults.
struct Ctx {
    cfg: Value,
}

impl Ctx {
    fn load(path: &Option<PathBuf>) -> Result<Ctx> {
        let cfg = match path {
            None => Value::Null,
            Some(p) => {
                let body = std::fs::read_to_string(p)
                    .map_err(|e| Error::Config(format!("cannot read {}: {e}", p.display())))?;
                serde_json::from_str(&body)
                    .map_err(|e| Error::Config(format!("malformed config {}: {e}", p.display())))?
            }
        };
        if !(cfg.is_null() || cfg.is_object()) {
            return Err(Error::Config("config file must hold a JSON object".into()));
        }
        Ok(Ctx { cfg })
    }

    fn f64(&self, cli: Option<f64>, key: &str) -> Option<f64> {
        cli.or_else(|| self.cfg.get(key).and_then(Value::as_f64))
    }

    fn usize(&self, cli: Option<usize>, key: &str) -> Option<usize> {
        cli.or_else(|| self.cfg.get(key).and_then(Value::as_u64).map(|v| v as usize))
    }

    fn u32(&self, cli: Option<u32>, key: &str) -> Option<u32> {
        cli.or_else(|| self.cfg.get(key).and_then(Value::as_u64).map(|v| v as u32))
    }

    fn u64(&self, cli: Option<u64>, key: &str) -> Option<u64> {
        cli.or_else(|| self.cfg.get(key).and_then(Value::as_u64))
    }

    fn string(&self, cli: &Option<String>, key: &str) -> Option<String> {
        cli.clone()
            .or_else(|| self.cfg.get(key).and_then(Value::as_str).map(String::from))
    }

    /// A parameter curve written as `{"family": "...", "params": [...]}` in
    /// the config file.
    fn curve(&self, key: &str) -> Result<Option<(String, Vec<f64>)>> {
        match self.cfg.get(key) {
            None | Some(Value::Null) => Ok(None),
            Some(Value::Object(m)) => {
                let family = m
                    .get("family")
                    .and_then(Value::as_str)
                    .ok_or_else(|| {
                        Error::Config(format!("config key '{key}' needs a \"family\" string"))
                    })?
                    .to_string();
                let params = match m.get("params") {
                    None | Some(Value::Null) => Vec::new(),
                    Some(Value::Array(items)) => items
                        .iter()
                        .map(|v| {
                            v.as_f64().ok_or_else(|| {
                                Error::Config(format!("'{key}.params' must be numeric"))
                            })
                        })
                        .collect::<Result<Vec<f64>>>()?,
                    Some(_) => {
                        return Err(Error::Config(format!("'{key}.params' must be an array")))
                    }
                };
                Ok(Some((family, params)))
            }
            Some(_) => Err(Error::Config(format!(
                "config key '{key}' must be an object {{\"family\": ..., \"params\": [...]}}"
            ))),
        }
    }

    /// Comma-separated flag value or config array of numbers.
    fn f64_list(&self, cli: &Option<String>, key: &str) -> Result<Option<Vec<f64>>> {
        if let Some(s) = cli {
            let parsed: std::result::Result<Vec<f64>, _> =
                s.split(',').map(|p| p.trim().parse::<f64>()).collect();
            return parsed
                .map(Some)
                .map_err(|e| Error::Config(format!("bad number list '{s}': {e}")));
        }
        match self.cfg.get(key) {
            None | Some(Value::Null) => Ok(None),
            Some(Value::Array(items)) => items
                .iter()
                .map(|v| {
                    v.as_f64()
                        .ok_or_else(|| Error::Config(format!("config key '{key}' must be numeric")))
                })
                .collect::<Result<Vec<f64>>>()
                .map(Some),
            Some(_) => Err(Error::Config(format!("config key '{key}' must be an array"))),
        }
    }
}

fn require<T>(v: Option<T>, what: &str) -> Result<T> {
    v.ok_or_else(|| Error::Config(format!("missing required option --{what} (or config key)")))
}

// ---------------------------------------------------------------------------
// Builders
// ---------------------------------------------------------------------------

fn build_model(ctx: &Ctx, model: &Option<String>, c: Option<f64>, n: Option<u32>) -> Result<ModelManifold> {
    let name = ctx
        .string(model, "model")
        .unwrap_or_else(|| "euclidean".to_string());
    match name.as_str() {
        "euclidean" => ModelManifold::euclidean(require(ctx.u32(n, "n"), "n")?),
        "hyperbolic3" => {
            let c = ctx.f64(c, "c").unwrap_or(1.0);
            if let Some(n) = ctx.u32(n, "n") {
                if n != 3 {
                    return Err(Error::Domain(format!(
                        "hyperbolic3 is three-dimensional; got --n {n}"
                    )));
                }
            }
            ModelManifold::hyperbolic3(c)
        }
        other => Err(Error::Config(format!("unknown model geometry '{other}'"))),
    }
}

fn build_estimate(ctx: &Ctx, e: &EstimateArgs, k: f64, default_horizon: f64) -> Result<Estimate> {
    let id: EstimateId = require(ctx.string(&e.estimate, "estimate"), "estimate")?.parse()?;
    let beta = ctx.f64(e.beta, "beta");
    let alpha = ctx.f64(e.alpha, "alpha");
    let theta = ctx.f64(e.theta, "theta");
    let horizon = ctx
        .f64(e.horizon, "horizon")
        .unwrap_or(default_horizon)
        .max(default_horizon);

    Ok(match id {
        EstimateId::LiYau | EstimateId::DaviesAlpha => {
            Estimate::classical(id, &[require(alpha, "alpha")?])?
        }
        EstimateId::DaviesBeta | EstimateId::Cor12 | EstimateId::Cor14 | EstimateId::Cor15 => {
            Estimate::classical(id, &[require(beta, "beta")?])?
        }
        EstimateId::HamiltonTheta | EstimateId::QianTheta => {
            Estimate::classical(id, &[require(theta, "theta")?])?
        }
        EstimateId::Hamilton | EstimateId::LiXu | EstimateId::LiXuLinear => {
            Estimate::classical(id, &[])?
        }
        EstimateId::QianGeneral => {
            // Flags win, then a config "weight_fn" object, then flat keys.
            let nested = ctx.curve("weight_fn")?;
            let fam = ctx
                .string(&e.weight, "weight")
                .or_else(|| nested.as_ref().map(|(f, _)| f.clone()))
                .unwrap_or_else(|| {
                    if k > 0.0 {
                        "sinh_sq".to_string()
                    } else {
                        "quadratic".to_string()
                    }
                });
            let params = match ctx.f64_list(&e.weight_params, "weight_params")? {
                Some(p) => p,
                None => match nested {
                    Some((_, p)) => p,
                    None => match fam.as_str() {
                        "sinh_sq" => vec![k],
                        "power_theta" => vec![theta.unwrap_or(2.0 / 3.0)],
                        _ => Vec::new(),
                    },
                },
            };
            Estimate::QianGeneral {
                weight: WeightFunction::from_spec(&fam, &params, horizon)?,
            }
        }
        EstimateId::Psi1 | EstimateId::Psi2 => {
            let nested = ctx.curve("beta_curve")?;
            let fam = ctx
                .string(&e.beta_family, "beta_family")
                .or_else(|| nested.as_ref().map(|(f, _)| f.clone()))
                .unwrap_or_else(|| "exponential".to_string());
            let params = match ctx.f64_list(&e.beta_params, "beta_params")? {
                Some(p) => p,
                None => match nested {
                    Some((_, p)) => p,
                    None => match fam.as_str() {
                        "constant" => vec![require(beta, "beta")?],
                        _ => vec![theta.unwrap_or(1.0)],
                    },
                },
            };
            let curve = ParamFunction::from_spec(&fam, &params, horizon, k)?;
            if id == EstimateId::Psi1 {
                Estimate::Psi1 { beta: curve }
            } else {
                Estimate::Psi2 { beta: curve }
            }
        }
    })
}

fn resolve_threads(ctx: &Ctx, cli: Option<usize>) -> Option<usize> {
    ctx.usize(cli, "threads").or_else(|| {
        std::env::var("LIYAU_THREADS")
            .ok()
            .and_then(|s| s.parse().ok())
    })
}

fn with_pool<T>(threads: Option<usize>, f: impl FnOnce() -> Result<T> + Send) -> Result<T>
where
    T: Send,
{
    match threads {
        None => f(),
        Some(nt) => rayon::ThreadPoolBuilder::new()
            .num_threads(nt.max(1))
            .build()
            .map_err(|e| Error::Config(format!("cannot build thread pool: {e}")))?
            .install(f),
    }
}

fn out_dir(ctx: &Ctx, cli: &Option<PathBuf>) -> PathBuf {
    cli.clone()
        .or_else(|| {
            ctx.cfg
                .get("out")
                .and_then(Value::as_str)
                .map(PathBuf::from)
        })
        .unwrap_or_else(|| PathBuf::from("."))
}

// ---------------------------------------------------------------------------
// Summary rendering
// ---------------------------------------------------------------------------

fn jget(v: &Value, ptr: &str) -> String {
    v.pointer(ptr).map_or_else(|| "null".to_string(), Value::to_string)
}

/// Human-readable summary derived purely from the report structure, so a
/// report re-read from disk renders byte-identically.
pub fn render_summary(rep: &Report) -> String {
    let r = &rep.results;
    let mut s = format!("command: {}\n", rep.command);
    match rep.command.as_str() {
        "eval" => {
            s += &format!(
                "estimate {} at t={}, n={}, k={}\n",
                jget(r, "/estimate/id"),
                jget(r, "/t"),
                jget(r, "/n"),
                jget(r, "/k")
            );
            s += &format!(
                "beta-form: grad_coeff = {}, bound = {}\n",
                jget(r, "/grad_coeff"),
                jget(r, "/bound")
            );
            s += &format!(
                "alpha-form: alpha = {}, C = {}\n",
                jget(r, "/alpha_form_coeff"),
                jget(r, "/alpha_form_bound")
            );
        }
        "compare" => {
            s += &format!(
                "{} vs {} over t in [{}, {}] ({} samples)\n",
                jget(r, "/first"),
                jget(r, "/second"),
                jget(r, "/t_min"),
                jget(r, "/t_max"),
                jget(r, "/samples")
            );
            s += &format!("verdict: {}\n", jget(r, "/verdict"));
            s += &format!(
                "first strictly smaller somewhere: {}\n",
                jget(r, "/first_smaller")
            );
            s += &format!(
                "second strictly smaller somewhere: {}\n",
                jget(r, "/second_smaller")
            );
        }
        "optimize" => {
            s += &format!(
                "{} upper bound at beta0={}, t0={}, n={}, k={}\n",
                jget(r, "/which"),
                jget(r, "/beta0"),
                jget(r, "/t0"),
                jget(r, "/n"),
                jget(r, "/k")
            );
            s += &format!(
                "value = {} via {} family (corollary reference {})\n",
                jget(r, "/value"),
                jget(r, "/family"),
                jget(r, "/corollary_reference")
            );
            s += &format!("feasible: {}\n", jget(r, "/feasible/b1_ok"));
        }
        "verify" => {
            s += &format!(
                "model {} (n={}, model_k={}), estimate {} at k={}\n",
                jget(r, "/model"),
                jget(r, "/n"),
                jget(r, "/model_k"),
                jget(r, "/estimate/id"),
                jget(r, "/estimate_k")
            );
            s += &format!(
                "max_violation = {} at (r={}, t={}), tightness = {}\n",
                jget(r, "/max_violation"),
                jget(r, "/argmax_r"),
                jget(r, "/argmax_t"),
                jget(r, "/tightness")
            );
            s += &format!(
                "{} (tolerance {})\n",
                if r.get("pass") == Some(&Value::Bool(true)) {
                    "PASS"
                } else {
                    "FAIL"
                },
                jget(r, "/tolerance")
            );
        }
        "simulate" => {
            s += &format!(
                "model {}, {} snapshots to t_end={}, min u = {}\n",
                jget(r, "/model"),
                jget(r, "/snapshots"),
                jget(r, "/t_end"),
                jget(r, "/min_u")
            );
            if r.get("monitor").is_some_and(|m| !m.is_null()) {
                s += &format!(
                    "monitor {}: max_violation = {} (eps_disc = {}), tightness = {}\n",
                    jget(r, "/monitor/estimate/id"),
                    jget(r, "/monitor/max_violation"),
                    jget(r, "/monitor/eps_disc"),
                    jget(r, "/monitor/tightness")
                );
                s += &format!(
                    "{}\n",
                    if r.pointer("/monitor/pass") == Some(&Value::Bool(true)) {
                        "PASS"
                    } else {
                        "FAIL"
                    }
                );
            }
        }
        _ => {
            s += &format!("{r}\n");
        }
    }
    s
}

// ---------------------------------------------------------------------------
// Subcommand runners
// ---------------------------------------------------------------------------

#[allow(clippy::too_many_arguments)]
fn finish(
    command: &str,
    file_name: &str,
    out: &PathBuf,
    config_echo: Value,
    results: Value,
    started: Instant,
    timing: bool,
    exit: i32,
) -> Result<i32> {
    let wall = timing.then(|| started.elapsed().as_secs_f64());
    let report = Report::new(command, config_echo, results, wall);
    print!("{}", render_summary(&report));
    std::fs::create_dir_all(out)
        .map_err(|e| Error::Config(format!("cannot create {}: {e}", out.display())))?;
    let path = out.join(file_name);
    report.write(&path)?;
    println!("report: {}", path.display());
    Ok(exit)
}

fn run_eval(args: &EvalArgs) -> Result<i32> {
    let started = Instant::now();
    let ctx = Ctx::load(&args.common.config)?;
    let t = require(ctx.f64(args.common.t, "t"), "t")?;
    let n = require(ctx.u32(args.common.n, "n"), "n")?;
    let k = require(ctx.f64(args.common.k, "k"), "k")?;
    let est = build_estimate(&ctx, &args.est, k, t)?;
    let (coeff, bound) = est.eval(t, n, k)?;
    let (af_coeff, af_bound) = (1.0 / coeff, bound / coeff);

    let config_echo = json!({
        "estimate": est.descriptor(),
        "t": t, "n": n, "k": k,
        "seed": ctx.u64(args.common.seed, "seed").unwrap_or(0),
        "threads": resolve_threads(&ctx, args.common.threads),
    });
    let results = json!({
        "estimate": est.descriptor(),
        "t": t, "n": n, "k": k,
        "grad_coeff": coeff,
        "bound": bound,
        "alpha_form_coeff": af_coeff,
        "alpha_form_bound": af_bound,
        "form_note": est.form_note(),
    });
    finish(
        "eval",
        "eval.json",
        &out_dir(&ctx, &args.common.out),
        config_echo,
        results,
        started,
        args.common.timing,
        0,
    )
}

fn run_compare(args: &CompareArgs) -> Result<i32> {
    let started = Instant::now();
    let ctx = Ctx::load(&args.common.config)?;
    let first: EstimateId = require(ctx.string(&args.a, "a"), "a")?.parse()?;
    let second: EstimateId = require(ctx.string(&args.b, "b"), "b")?.parse()?;
    let n = require(ctx.u32(args.common.n, "n"), "n")?;
    let k = require(ctx.f64(args.common.k, "k"), "k")?;
    let t_min = ctx.f64(args.t_min, "t_min").unwrap_or(0.01);
    let t_max = ctx.f64(args.t_max, "t_max").unwrap_or(100.0);
    let nt = ctx.usize(args.t_count, "t_count").unwrap_or(64);
    let beta_min = ctx.f64(args.beta_min, "beta_min").unwrap_or(0.05);
    let beta_max = ctx.f64(args.beta_max, "beta_max").unwrap_or(0.95);
    let nb = ctx.usize(args.beta_count, "beta_count").unwrap_or(19);
    let betas: Vec<f64> = (0..nb)
        .map(|i| beta_min + (beta_max - beta_min) * (i as f64) / ((nb - 1).max(1) as f64))
        .collect();

    let report = dominates(first, second, n, k, (t_min, t_max), nt, &betas)?;
    let rows = comparison_rows(first, second, n, k, (t_min, t_max), nt, &betas)?;

    let out = out_dir(&ctx, &args.common.out);
    std::fs::create_dir_all(&out)
        .map_err(|e| Error::Config(format!("cannot create {}: {e}", out.display())))?;
    let csv_path = out.join("compare.csv");
    write_csv(
        &csv_path,
        &["t", "beta", "bound_first", "bound_second", "diff"],
        &rows,
    )?;

    let config_echo = json!({
        "a": first.name(), "b": second.name(),
        "n": n, "k": k,
        "t_min": t_min, "t_max": t_max, "t_count": nt,
        "beta_min": beta_min, "beta_max": beta_max, "beta_count": nb,
        "seed": ctx.u64(args.common.seed, "seed").unwrap_or(0),
        "threads": resolve_threads(&ctx, args.common.threads),
    });
    let results = json!({
        "first": first.name(),
        "second": second.name(),
        "t_min": t_min, "t_max": t_max,
        "verdict": report.verdict,
        "first_smaller": report.first_smaller,
        "second_smaller": report.second_smaller,
        "samples": report.samples,
        "csv": "compare.csv",
    });
    finish(
        "compare",
        "compare.json",
        &out,
        config_echo,
        results,
        started,
        args.common.timing,
        0,
    )
}

fn run_optimize(args: &OptimizeArgs) -> Result<i32> {
    let started = Instant::now();
    let ctx = Ctx::load(&args.common.config)?;
    let which: Phi = require(ctx.string(&args.which, "which"), "which")?.parse()?;
    let beta0 = require(ctx.f64(args.beta0, "beta0"), "beta0")?;
    let t0 = require(ctx.f64(args.t0, "t0"), "t0")?;
    let n = require(ctx.u32(args.common.n, "n"), "n")?;
    let k = require(ctx.f64(args.common.k, "k"), "k")?;
    let seed = ctx.u64(args.common.seed, "seed").unwrap_or(0);
    let segments = ctx.usize(args.segments, "segments").unwrap_or(4);
    let families = match ctx.string(&args.families, "families") {
        None => FamilyKind::ALL.to_vec(),
        Some(s) => s
            .split(',')
            .map(|p| p.trim().parse::<FamilyKind>())
            .collect::<Result<Vec<_>>>()?,
    };
    let opts = PhiOptions {
        families: families.clone(),
        segments,
        seed,
    };
    let result = phi_upper(which, beta0, t0, n, k, &opts)?;

    let config_echo = json!({
        "which": which.name(), "beta0": beta0, "t0": t0, "n": n, "k": k,
        "families": families.iter().map(|f| f.name()).collect::<Vec<_>>(),
        "segments": segments,
        "seed": seed,
        "threads": resolve_threads(&ctx, args.common.threads),
    });
    let results = serde_json::to_value(&result)
        .map_err(|e| Error::Numerical(format!("result serialization failed: {e}")))?;
    finish(
        "optimize",
        "optimize.json",
        &out_dir(&ctx, &args.common.out),
        config_echo,
        results,
        started,
        args.common.timing,
        0,
    )
}

fn run_verify(args: &VerifyArgs) -> Result<i32> {
    let started = Instant::now();
    let ctx = Ctx::load(&args.common.config)?;
    let model = build_model(&ctx, &args.model, args.c, args.common.n)?;
    let k_est = ctx.f64(args.common.k, "k").unwrap_or_else(|| model.ricci_lower_k());
    let grid = GridSpec {
        r_max: ctx.f64(args.r_max, "r_max").unwrap_or(10.0),
        nr: ctx.usize(args.nr, "nr").unwrap_or(256),
        t_min: ctx.f64(args.t_min, "t_min").unwrap_or(0.1),
        t_max: ctx.f64(args.t_max, "t_max").unwrap_or(10.0),
        nt: ctx.usize(args.nt, "nt").unwrap_or(256),
        log_time: true,
    };
    let tol = ctx.f64(args.tol, "tol").unwrap_or(1e-9);
    let rhs_scale = ctx.f64(args.rhs_scale, "rhs_scale").unwrap_or(1.0);
    let est = build_estimate(&ctx, &args.est, k_est, grid.t_max)?;

    let threads = resolve_threads(&ctx, args.common.threads);
    let report = with_pool(threads, || {
        verify_on_grid(&model, &est, Some(k_est), &grid, tol, rhs_scale)
    })?;

    let out = out_dir(&ctx, &args.common.out);
    if args.dump_grid {
        std::fs::create_dir_all(&out)
            .map_err(|e| Error::Config(format!("cannot create {}: {e}", out.display())))?;
        let rows = slack_grid(&model, &est, Some(k_est), &grid, rhs_scale)?;
        write_csv(
            &out.join("verify_grid.csv"),
            &["r", "t", "lhs", "rhs", "slack"],
            &rows,
        )?;
    }

    let pass = report.pass;
    if !pass {
        println!(
            "VIOLATION: LHS - RHS = {:.6e} at (r = {:.6e}, t = {:.6e})",
            report.max_violation, report.argmax_r, report.argmax_t
        );
    }
    let config_echo = json!({
        "model": model.geometry_name(), "n": model.n(), "k": k_est,
        "estimate": est.descriptor(),
        "r_max": grid.r_max, "nr": grid.nr,
        "t_min": grid.t_min, "t_max": grid.t_max, "nt": grid.nt,
        "tol": tol, "rhs_scale": rhs_scale,
        "seed": ctx.u64(args.common.seed, "seed").unwrap_or(0),
        "threads": threads,
    });
    let results = serde_json::to_value(&report)
        .map_err(|e| Error::Numerical(format!("result serialization failed: {e}")))?;
    finish(
        "verify",
        "report.json",
        &out,
        config_echo,
        results,
        started,
        args.common.timing,
        if pass { 0 } else { 1 },
    )
}

fn run_simulate(args: &SimulateArgs) -> Result<i32> {
    let started = Instant::now();
    let ctx = Ctx::load(&args.common.config)?;
    let model = build_model(&ctx, &args.model, args.c, args.common.n)?;
    let k_est = ctx.f64(args.common.k, "k").unwrap_or_else(|| model.ricci_lower_k());

    let r_max = ctx.f64(args.r_max, "r_max").unwrap_or(8.0);
    let nr = ctx.usize(args.nr, "nr").unwrap_or(129);
    let dr = r_max / (nr.max(2) - 1) as f64;
    let grid = RadialGrid {
        r_max,
        nr,
        dt: ctx.f64(args.dt, "dt").unwrap_or(0.5 * dr),
        t_end: ctx.f64(args.t_end, "t_end").unwrap_or(0.5),
        interior_fraction: ctx
            .f64(args.interior_fraction, "interior_fraction")
            .unwrap_or(0.5),
    };
    let t0 = ctx.f64(args.t0, "t0").unwrap_or(0.1);
    let initial_name = ctx
        .string(&args.initial, "initial")
        .unwrap_or_else(|| "gaussian".to_string());
    let initial = match initial_name.as_str() {
        "gaussian" => InitialData::Gaussian { t0 },
        "bump" => InitialData::Bump {
            amplitude: ctx.f64(args.amplitude, "amplitude").unwrap_or(1.0),
            width: ctx.f64(args.width, "width").unwrap_or(1.0),
            floor: ctx.f64(args.floor, "floor").unwrap_or(1e-3),
        },
        "constant_plus_bump" => InitialData::ConstantPlusBump {
            base: ctx.f64(args.base, "base").unwrap_or(1.0),
            amplitude: ctx.f64(args.amplitude, "amplitude").unwrap_or(1.0),
            width: ctx.f64(args.width, "width").unwrap_or(1.0),
        },
        "constant" => InitialData::Constant {
            value: ctx.f64(args.value, "value").unwrap_or(1.0),
        },
        other => return Err(Error::Config(format!("unknown initial data '{other}'"))),
    };
    let stride = ctx.usize(args.stride, "stride").unwrap_or(8);
    let t_shift = ctx.f64(args.t_shift, "t_shift").unwrap_or(match initial {
        InitialData::Gaussian { t0 } => t0,
        _ => 0.0,
    });

    let traj = run_radial_heat(&model, &grid, &initial, stride)?;
    let min_u = traj
        .snapshots
        .iter()
        .flat_map(|s| s.iter().copied())
        .fold(f64::INFINITY, f64::min);

    // Monitor only when an estimate was requested.
    let monitor_requested =
        ctx.string(&args.est.estimate, "estimate").is_some();
    let (monitor_value, eps_used, pass) = if monitor_requested {
        let horizon = grid.t_end + t_shift + 1.0;
        let est = build_estimate(&ctx, &args.est, k_est, horizon)?;
        let eps = match ctx.f64(args.eps_disc, "eps_disc") {
            Some(e) => e,
            None => calibrate_monitor_slack(&model, &grid, t0.max(0.05), stride)?,
        };
        let rep = monitor(&traj, &est, Some(k_est), t_shift, eps)?;
        let pass = rep.pass;
        if !pass {
            println!(
                "VIOLATION: LHS - RHS = {:.6e} at (r = {:.6e}, age = {:.6e}), eps_disc = {:.6e}",
                rep.max_violation, rep.argmax_r, rep.argmax_age, rep.eps_disc
            );
        }
        (
            serde_json::to_value(&rep)
                .map_err(|e| Error::Numerical(format!("result serialization failed: {e}")))?,
            Some(eps),
            pass,
        )
    } else {
        (Value::Null, None, true)
    };

    let out = out_dir(&ctx, &args.common.out);
    if args.dump_csv {
        std::fs::create_dir_all(&out)
            .map_err(|e| Error::Config(format!("cannot create {}: {e}", out.display())))?;
        let dr = grid.dr();
        let mut rows = Vec::new();
        for (ti, snap) in traj.times.iter().zip(&traj.snapshots) {
            for (i, &u) in snap.iter().enumerate() {
                rows.push(vec![*ti, dr * i as f64, u]);
            }
        }
        write_csv(&out.join("snapshots.csv"), &["t", "r", "u"], &rows)?;
    }

    let config_echo = json!({
        "model": model.geometry_name(), "n": model.n(), "k": k_est,
        "initial": initial_name, "t0": t0,
        "r_max": grid.r_max, "nr": grid.nr, "dt": grid.dt, "t_end": grid.t_end,
        "interior_fraction": grid.interior_fraction,
        "stride": stride, "t_shift": t_shift, "eps_disc": eps_used,
        "seed": ctx.u64(args.common.seed, "seed").unwrap_or(0),
        "threads": resolve_threads(&ctx, args.common.threads),
    });
    let results = json!({
        "model": model.geometry_name(),
        "n": model.n(),
        "snapshots": traj.times.len(),
        "t_end": traj.times.last().copied().unwrap_or(0.0),
        "min_u": min_u,
        "monitor": monitor_value,
    });
    finish(
        "simulate",
        "simulate.json",
        &out,
        config_echo,
        results,
        started,
        args.common.timing,
        if pass { 0 } else { 1 },
    )
}

/// Parse argv and execute; returns the process exit code.
pub fn dispatch<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            // clap prints help/version to stdout (exit 0) and usage errors
            // to stderr (exit 2).
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let result = match &cli.command {
        Command::Eval(a) => run_eval(a),
        Command::Compare(a) => run_compare(a),
        Command::Optimize(a) => run_optimize(a),
        Command::Verify(a) => run_verify(a),
        Command::Simulate(a) => run_simulate(a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
