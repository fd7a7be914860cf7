//! Command-line driver: ground-state solves, time evolution, verification
//! suites and plot-data reshaping, all emitting reproducible CSV/JSON files.

use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use logkg::dynamics::{EvolveConfig, State, Termination};
use logkg::error::Error;
use logkg::experiments::{
    self, InstabilityConfig, InstabilityOutcome, InvarianceReport, SuiteTolerances,
};
use logkg::ground_state::{self, CertifyTolerances, Method, ShootingConfig};
use logkg::io::{self, GridSpec, RunManifest};
use logkg::radial::RadialGrid;
use logkg::ModelParams;

const EXIT_OK: i32 = 0;
const EXIT_SOLVER: i32 = 1;
const EXIT_CHECK: i32 = 2;
const EXIT_BLOWUP: i32 = 3;
const EXIT_USAGE: i32 = 64;
const EXIT_DATA: i32 = 65;

#[derive(Parser)]
#[command(
    name = "logkg",
    version,
    about = "Standing waves and instability of the 3-D radial logarithmic Klein-Gordon equation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute a ground-state profile and write field CSV + JSON sidecar.
    Groundstate(GroundstateArgs),
    /// Evolve Cauchy data and write diagnostics CSV + run manifest.
    Evolve(EvolveArgs),
    /// Run a verification suite and emit a machine-readable report.
    Check(CheckArgs),
    /// Reshape a diagnostics CSV into tidy long format.
    Plotdata(PlotdataArgs),
}

#[derive(Args)]
struct GroundstateArgs {
    #[arg(long)]
    p: f64,
    #[arg(long)]
    omega: f64,
    #[arg(long = "R", default_value_t = 20.0, value_name = "RADIUS")]
    r_max: f64,
    #[arg(long)]
    n: usize,
    #[arg(long, value_parser = ["shoot", "nehari", "both"])]
    method: String,
    #[arg(long)]
    out: PathBuf,
    /// Lower end of the shooting amplitude bracket.
    #[arg(long, default_value_t = 1.2)]
    s_lo: f64,
    /// Upper end of the shooting amplitude bracket.
    #[arg(long, default_value_t = 30.0)]
    s_hi: f64,
}

#[derive(Args)]
struct EvolveArgs {
    /// Initial data as a field CSV (`r,u` or `r,u,v`).
    #[arg(long, conflicts_with = "from_groundstate")]
    init: Option<PathBuf>,
    /// Directory holding groundstate_*.csv/.json from `groundstate`.
    #[arg(long)]
    from_groundstate: Option<PathBuf>,
    /// Dilation factor applied to the loaded ground state.
    #[arg(long, requires = "from_groundstate")]
    lambda: Option<f64>,
    #[arg(long, requires = "init")]
    p: Option<f64>,
    #[arg(long, default_value_t = 0.0)]
    omega: f64,
    #[arg(long)]
    dt: f64,
    #[arg(long = "T", value_name = "TIME")]
    t_final: f64,
    /// Evolution domain radius (default: sized from the initial data).
    #[arg(long = "R", value_name = "RADIUS")]
    r_max: Option<f64>,
    /// Evolution grid intervals (default: keeps the source resolution).
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, default_value_t = 25)]
    sample_every: usize,
    #[arg(long, default_value_t = 1e6)]
    blowup_cap: f64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct CheckArgs {
    #[arg(long, value_parser = ["identities", "theorem21", "instability"])]
    suite: String,
    #[arg(long)]
    p: f64,
    #[arg(long, default_value_t = 0.0)]
    omega: f64,
    #[arg(long = "R", default_value_t = 20.0, value_name = "RADIUS")]
    r_max: f64,
    #[arg(long, default_value_t = 2000)]
    n: usize,
    #[arg(long, default_value_t = 50.0)]
    t_max: f64,
    /// Optional path for the JSON report (stdout otherwise).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct PlotdataArgs {
    #[arg(long)]
    records: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    let code = match cli.command {
        Command::Groundstate(args) => cmd_groundstate(&args),
        Command::Evolve(args) => cmd_evolve(&args),
        Command::Check(args) => cmd_check(&args),
        Command::Plotdata(args) => cmd_plotdata(&args),
    };
    std::process::exit(code);
}

fn usage_error(msg: &str) -> i32 {
    eprintln!("error: {msg}");
    EXIT_USAGE
}

fn parse_params(p: f64, omega: f64) -> Result<ModelParams, i32> {
    ModelParams::new(p, omega).map_err(|e| usage_error(&e.to_string()))
}

fn parse_grid(r_max: f64, n: usize) -> Result<RadialGrid, i32> {
    RadialGrid::new(r_max, n).map_err(|e| usage_error(&e.to_string()))
}

fn cmd_groundstate(args: &GroundstateArgs) -> i32 {
    let params = match parse_params(args.p, args.omega) {
        Ok(p) => p,
        Err(code) => return code,
    };
    if let Err(code) = parse_grid(args.r_max, args.n) {
        return code;
    }
    let cfg = ShootingConfig {
        s_lo: args.s_lo,
        s_hi: args.s_hi,
        r_max: args.r_max,
        n: args.n,
        ..ShootingConfig::default()
    };
    let grid = match cfg.grid() {
        Ok(g) => g,
        Err(e) => return usage_error(&e.to_string()),
    };

    let mut states = Vec::new();
    if args.method == "shoot" || args.method == "both" {
        match ground_state::find_ground_state(&params, &cfg) {
            Ok(gs) => states.push(gs),
            Err(e) => {
                eprintln!("shooting failed: {e}");
                return EXIT_SOLVER;
            }
        }
    }
    if args.method == "nehari" || args.method == "both" {
        let mut solved = false;
        for amp in [3.0, 5.0, 8.0] {
            let seed =
                logkg::RadialField::from_fn(grid, |r| amp * (-r * r / 2.0).exp());
            match ground_state::minimize_nehari(&params, grid, &seed) {
                Ok(gs) => {
                    states.push(gs);
                    solved = true;
                    break;
                }
                Err(Error::NotProjectable { .. }) => continue,
                Err(e) => {
                    eprintln!("minimization failed: {e}");
                    return EXIT_SOLVER;
                }
            }
        }
        if !solved {
            eprintln!("minimization failed: no projectable seed");
            return EXIT_SOLVER;
        }
    }

    let tols = CertifyTolerances::default();
    let mut certified = true;
    for gs in &states {
        match gs.certify(&tols) {
            Ok(()) => eprintln!(
                "{}: d = {:.10e}, |K| = {:.3e}, residual = {:.3e}",
                gs.method, gs.d_omega, gs.k_value.abs(), gs.residual_norm
            ),
            Err(e) => {
                eprintln!("{}: certification failed: {e}", gs.method);
                certified = false;
            }
        }
        if let Err(e) = io::save_ground_state(&args.out, gs) {
            eprintln!("write failed: {e}");
            return EXIT_SOLVER;
        }
    }
    if args.method == "both" && states.len() == 2 {
        let gap = (states[0].d_omega - states[1].d_omega).abs() / states[0].d_omega;
        eprintln!("cross-method relative d gap: {gap:.3e}");
        if gap > 0.01 {
            eprintln!("cross-method gap exceeds 1%");
            certified = false;
        }
    }
    if certified {
        EXIT_OK
    } else {
        EXIT_CHECK
    }
}

fn load_groundstate_dir(dir: &Path) -> Result<ground_state::GroundState, String> {
    for method in [Method::Shooting, Method::NehariMin] {
        let csv = dir.join(format!("groundstate_{method}.csv"));
        let json = dir.join(format!("groundstate_{method}.json"));
        if csv.exists() && json.exists() {
            return io::load_ground_state(&csv, &json).map_err(|e| e.to_string());
        }
    }
    Err(format!("no groundstate_*.csv/.json pair under {}", dir.display()))
}

fn cmd_evolve(args: &EvolveArgs) -> i32 {
    let started = Instant::now();
    let mut inputs = Vec::new();

    // assemble initial data, parameters and the evolution grid
    let (state0, params, r1_member) = if let Some(init) = &args.init {
        let p = match args.p {
            Some(p) => p,
            None => return usage_error("--init requires --p"),
        };
        let params = match parse_params(p, args.omega) {
            Ok(p) => p,
            Err(code) => return code,
        };
        inputs.push(init.display().to_string());
        let (u, v) = match io::read_field(init) {
            Ok(x) => x,
            Err(e) => {
                eprintln!("error: {e}");
                return EXIT_DATA;
            }
        };
        let src_grid = u.grid();
        let grid = match resolve_grid(args, src_grid.r_max(), src_grid.dr()) {
            Ok(g) => g,
            Err(code) => return code,
        };
        let u = match logkg::radial::resample(&u, grid) {
            Ok(u) => u,
            Err(e) => return usage_error(&e.to_string()),
        };
        let v = match v {
            Some(v) => match logkg::radial::resample(&v, grid) {
                Ok(v) => v,
                Err(e) => return usage_error(&e.to_string()),
            },
            None => logkg::RadialField::zeros(grid),
        };
        match State::new(u, v, 0.0) {
            Ok(s) => (s, params, None),
            Err(e) => {
                eprintln!("error: {e}");
                return EXIT_DATA;
            }
        }
    } else if let Some(dir) = &args.from_groundstate {
        let lambda = match args.lambda {
            Some(l) => l,
            None => return usage_error("--from-groundstate requires --lambda"),
        };
        if !(lambda > 0.0) {
            return usage_error("--lambda must be positive");
        }
        let gs = match load_groundstate_dir(dir) {
            Ok(gs) => gs,
            Err(e) => {
                eprintln!("error: {e}");
                return EXIT_DATA;
            }
        };
        inputs.push(dir.display().to_string());
        let src_grid = gs.field.grid();
        let default_r = src_grid.r_max() * lambda.max(1.0) + args.t_final;
        let grid = match resolve_grid(args, default_r, src_grid.dr()) {
            Ok(g) => g,
            Err(code) => return code,
        };
        let state = match experiments::make_perturbed_data(&gs, lambda, grid) {
            Ok(s) => s,
            Err(e) => return usage_error(&e.to_string()),
        };
        let params = gs.params;
        let r1 = match experiments::check_r1_membership(&state, &gs, &params, Some(lambda)) {
            Ok(r) => r,
            Err(e) => {
                eprintln!("error: {e}");
                return EXIT_SOLVER;
            }
        };
        eprintln!(
            "membership: E = {:.6e}, d(0) = {:.6e}, K0 = {:.6e}, member = {}",
            r1.energy, r1.d0, r1.k0, r1.is_member
        );
        (state, params, Some(r1.is_member))
    } else {
        return usage_error("provide either --init or --from-groundstate");
    };

    let cfg = EvolveConfig {
        dt: args.dt,
        t_final: args.t_final,
        sample_every: args.sample_every,
        blowup_cap: args.blowup_cap,
        ..EvolveConfig::default()
    };
    if let Err(e) = cfg.validate(state0.grid()) {
        return usage_error(&e.to_string());
    }

    let out = match logkg::dynamics::run(&state0, &params, &cfg) {
        Ok(out) => out,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_SOLVER;
        }
    };

    if std::fs::create_dir_all(&args.out).is_err() {
        eprintln!("error: cannot create {}", args.out.display());
        return EXIT_SOLVER;
    }
    let diag_path = args.out.join("diagnostics.csv");
    let mut outputs = vec![diag_path.display().to_string()];
    if let Err(e) = io::write_diagnostics(&diag_path, &out.records) {
        eprintln!("write failed: {e}");
        return EXIT_SOLVER;
    }
    if let Some(final_state) = &out.final_state {
        let fs_path = args.out.join("final_state.csv");
        if let Err(e) = io::write_state(&fs_path, final_state) {
            eprintln!("write failed: {e}");
            return EXIT_SOLVER;
        }
        outputs.push(fs_path.display().to_string());
    }
    let manifest = RunManifest {
        command: "evolve".into(),
        p: params.p(),
        omega: params.omega(),
        grid: GridSpec::from(state0.grid()),
        evolve: Some(cfg),
        inputs,
        outputs: outputs.clone(),
        termination: out.termination.label().into(),
        r1_member,
        tool_version: io::tool_version(),
        timestamp_unix: io::unix_timestamp(),
        wall_time_s: started.elapsed().as_secs_f64(),
    };
    if let Err(e) = io::write_json(&args.out.join("manifest.json"), &manifest) {
        eprintln!("write failed: {e}");
        return EXIT_SOLVER;
    }

    match out.termination {
        Termination::Completed => {
            eprintln!("completed: {} samples", out.records.len());
            EXIT_OK
        }
        Termination::Blowup { t } => {
            eprintln!("blow-up at t = {t:.6}");
            EXIT_BLOWUP
        }
        Termination::SolverFailure { t, message } => {
            eprintln!("solver failure at t = {t:.6}: {message}");
            EXIT_SOLVER
        }
    }
}

fn resolve_grid(args: &EvolveArgs, default_r: f64, default_dr: f64) -> Result<RadialGrid, i32> {
    let r_max = args.r_max.unwrap_or(default_r);
    let n = args
        .n
        .unwrap_or_else(|| (r_max / default_dr).round().max(16.0) as usize);
    parse_grid(r_max, n)
}

#[derive(serde::Serialize)]
struct LambdaSummary {
    lambda: f64,
    r1_member: bool,
    r1: experiments::R1Report,
    outcome: InstabilityOutcome,
    invariance: InvarianceReport,
    invariance_clean: bool,
    final_h1: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    records_path: Option<String>,
}

#[derive(serde::Serialize)]
struct CheckReport {
    suite: String,
    p: f64,
    omega: f64,
    all_pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    inconclusive: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    checks: Option<Vec<experiments::CheckResult>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    lambdas: Option<Vec<LambdaSummary>>,
}

fn emit_report(report: &CheckReport, out: &Option<PathBuf>) -> i32 {
    let text = match serde_json::to_string_pretty(report) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_SOLVER;
        }
    };
    match out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, text + "\n") {
                eprintln!("write failed: {e}");
                return EXIT_SOLVER;
            }
        }
        None => println!("{text}"),
    }
    if report.all_pass {
        EXIT_OK
    } else {
        EXIT_CHECK
    }
}

fn cmd_check(args: &CheckArgs) -> i32 {
    let params = match parse_params(args.p, args.omega) {
        Ok(p) => p,
        Err(code) => return code,
    };
    match args.suite.as_str() {
        "identities" => match experiments::identity_suite(&params) {
            Ok(suite) => {
                if let Some(fail) = suite.first_failure() {
                    eprintln!("failing invariant: {} ({})", fail.name, fail.detail);
                }
                emit_report(
                    &CheckReport {
                        suite: "identities".into(),
                        p: params.p(),
                        omega: params.omega(),
                        all_pass: suite.passed,
                        inconclusive: None,
                        checks: Some(suite.checks),
                        lambdas: None,
                    },
                    &args.out,
                )
            }
            Err(e) => {
                eprintln!("error: {e}");
                EXIT_SOLVER
            }
        },
        "theorem21" => {
            let scfg = ShootingConfig {
                r_max: args.r_max,
                n: args.n,
                ..ShootingConfig::default()
            };
            match experiments::variational_suite(&params, &scfg, &SuiteTolerances::default()) {
                Ok(suite) => {
                    if let Some(fail) = suite.first_failure() {
                        eprintln!("failing check: {} ({})", fail.name, fail.detail);
                    }
                    emit_report(
                        &CheckReport {
                            suite: "theorem21".into(),
                            p: params.p(),
                            omega: params.omega(),
                            all_pass: suite.passed,
                            inconclusive: None,
                            checks: Some(suite.checks),
                            lambdas: None,
                        },
                        &args.out,
                    )
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    EXIT_SOLVER
                }
            }
        }
        "instability" => {
            let scfg = ShootingConfig {
                r_max: args.r_max,
                n: args.n,
                ..ShootingConfig::default()
            };
            let gs = match ground_state::find_ground_state(&params, &scfg) {
                Ok(gs) => gs,
                Err(e) => {
                    eprintln!("error: {e}");
                    return EXIT_SOLVER;
                }
            };
            let icfg = InstabilityConfig {
                t_max: args.t_max,
                ..InstabilityConfig::default()
            };
            let max_lambda = icfg.lambdas.iter().cloned().fold(1.0, f64::max);
            let r_evolve = args.r_max * max_lambda + 6.0;
            let dr = args.r_max / args.n as f64;
            let grid = match parse_grid(r_evolve, (r_evolve / dr).round() as usize) {
                Ok(g) => g,
                Err(code) => return code,
            };
            let ecfg = EvolveConfig {
                dt: 0.9 * grid.dr(),
                sample_every: 10,
                ..EvolveConfig::default()
            };
            let reports = match experiments::run_instability(&gs, &params, &icfg, &ecfg, grid) {
                Ok(r) => r,
                Err(e) => {
                    eprintln!("error: {e}");
                    return EXIT_SOLVER;
                }
            };
            let mut all_pass = true;
            let mut inconclusive = false;
            let mut summaries = Vec::new();
            for rep in reports {
                let ok = match &rep.outcome {
                    InstabilityOutcome::H1GrowthReached { .. }
                    | InstabilityOutcome::Blowup { .. } => true,
                    InstabilityOutcome::Inconclusive { .. } => {
                        inconclusive = true;
                        true
                    }
                    InstabilityOutcome::SkippedNotMember => rep.lambda <= 1.0,
                    InstabilityOutcome::SolverFailure { .. } => false,
                };
                let invariance_clean = !matches!(
                    rep.invariance,
                    InvarianceReport::Violation { .. }
                );
                if !ok || !invariance_clean {
                    all_pass = false;
                    eprintln!("failing lambda = {}: {:?}", rep.lambda, rep.outcome);
                }
                // per-run diagnostics land next to the report file
                let records_path = match (&args.out, rep.records.is_empty()) {
                    (Some(report_path), false) => {
                        let dir = report_path.parent().unwrap_or(Path::new("."));
                        let path = dir.join(format!("instability_lambda_{}.csv", rep.lambda));
                        if let Err(e) = io::write_diagnostics(&path, &rep.records) {
                            eprintln!("write failed: {e}");
                            return EXIT_SOLVER;
                        }
                        Some(path.display().to_string())
                    }
                    _ => None,
                };
                summaries.push(LambdaSummary {
                    lambda: rep.lambda,
                    r1_member: rep.r1.is_member,
                    r1: rep.r1,
                    outcome: rep.outcome,
                    invariance: rep.invariance,
                    invariance_clean,
                    final_h1: rep.final_h1,
                    records_path,
                });
            }
            emit_report(
                &CheckReport {
                    suite: "instability".into(),
                    p: params.p(),
                    omega: params.omega(),
                    all_pass,
                    inconclusive: Some(inconclusive),
                    checks: None,
                    lambdas: Some(summaries),
                },
                &args.out,
            )
        }
        _ => unreachable!("clap restricts the suite values"),
    }
}

fn cmd_plotdata(args: &PlotdataArgs) -> i32 {
    match io::emit_plotdata(&args.records, &args.out) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_DATA
        }
    }
}
