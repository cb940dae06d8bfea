use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use num_complex::Complex64;
use serde_json::{json, Value};
use shrinkedge::acceptance;
use shrinkedge::eigenmodes::{build_eigenmode, localization, mode_residual};
use shrinkedge::fd_oracle;
use shrinkedge::grid::GridFunction;
use shrinkedge::resolvent::{self, Forcing, DEFAULT_NODES};
use shrinkedge::secular::{self, SpectralPoint, EPS_CEILING};
use shrinkedge::vertex_model::{solve_kappa0, solve_kappa1};
use shrinkedge::{counting, EigKind, VertexCondition, ZParam};

mod io;

use io::{cjson, fmt, path_json, SCHEMA};

const DEFAULT_EPS: f64 = 1e-2;
const SWEEP_TOL: f64 = 0.02;
const RESOLVE_TOL: f64 = 1e-7;
const ORACLE_TOL: f64 = 5e-3;
const ORACLE_MIN_EPS: f64 = 1e-3;

#[derive(Debug)]
pub enum CliError {
    Input(String),
    Failure(String),
}

impl From<shrinkedge::Error> for CliError {
    fn from(e: shrinkedge::Error) -> Self {
        if e.is_input_error() {
            CliError::Input(e.to_string())
        } else {
            CliError::Failure(e.to_string())
        }
    }
}

type CliResult = Result<bool, CliError>;

/// Negative spectrum of a two-edge graph with a shrinking edge.
#[derive(Parser, Debug)]
#[command(name = "shrinkedge", version)]
struct Cli {
    /// Vertex condition: a JSON file or inline JSON.
    #[arg(long, global = true)]
    vc: Option<String>,
    /// Edge length ε, or a comma-separated list for `sweep`.
    #[arg(long, global = true)]
    eps: Option<String>,
    /// Directory for CSV output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Acceptance tolerance of the command.
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Predicted types and coefficients of the negative eigenvalues.
    Classify,
    /// Negative eigenvalues at a single ε.
    Spectrum,
    /// Eigenvalues over an ε grid with fitted rates.
    Sweep,
    /// Eigenfunctions at a single ε.
    Modes,
    /// Apply the resolvent to a forcing.
    Resolve {
        /// Spectral parameter `re,im`.
        #[arg(long, default_value = "0,1", allow_hyphen_values = true)]
        lambda: String,
        /// Forcing CSV with columns x,re_fs,im_fs,re_fe,im_fe.
        #[arg(long)]
        f: Option<PathBuf>,
    },
    /// Negative eigenvalue count for rank-zero conditions.
    Count,
    /// Compare against the finite-element discretization.
    Oracle {
        /// Element counts `n_s,n_e`.
        #[arg(long, default_value = "2000,2000")]
        mesh: String,
    },
    /// Run the acceptance suite.
    Verify {
        #[arg(long, hide = true)]
        inject_fault: bool,
    },
}

/// Writes to stdout, ignoring a closed pipe.
fn say(text: &str) {
    let _ = writeln!(std::io::stdout().lock(), "{text}");
}

fn emit(v: Value) {
    say(&serde_json::to_string_pretty(&v).expect("json values serialize"));
}

fn point_json(p: &SpectralPoint) -> Value {
    json!({
        "epsilon": p.epsilon,
        "kind": p.kind.map(|k| k.to_string()),
        "kappa": p.kappa,
        "lambda": p.lambda,
        "alpha_predicted": p.alpha_predicted,
    })
}

fn cmd_classify(vc: &VertexCondition) -> CliResult {
    let preds = vc.classify()?;
    let items: Vec<Value> = preds
        .iter()
        .map(|p| {
            json!({
                "kind": p.kind.to_string(),
                "alpha": p.alpha,
                "rate": p.kind.rate(),
                "summary": format!("type {}, α={}, rate {}", p.kind, p.alpha, p.kind.rate_label()),
            })
        })
        .collect();
    let summary = if preds.is_empty() {
        "no negative eigenvalues".to_string()
    } else {
        items
            .iter()
            .map(|v| v["summary"].as_str().unwrap_or_default().to_string())
            .collect::<Vec<_>>()
            .join("; ")
    };
    let kappa1 = match *vc {
        VertexCondition::Rank1 { z, mu } if matches!(z, ZParam::Finite(_)) => solve_kappa1(z, mu).ok(),
        _ => None,
    };
    let kappa0 = match *vc {
        VertexCondition::Rank0 { a, b, c } => solve_kappa0(a, b, c).ok(),
        _ => None,
    };
    emit(json!({
        "schema": SCHEMA,
        "vc": vc.to_json(),
        "summary": summary,
        "predictions": items,
        "kappa0": kappa0,
        "kappa1": kappa1,
        "bls_nonresonant": vc.bls_nonresonant(),
        "borisov_nonresonant": vc.borisov_nonresonant(),
    }));
    Ok(true)
}

fn cmd_spectrum(vc: &VertexCondition, eps: f64) -> CliResult {
    let points = secular::find_negative_eigenvalues(vc, eps)?;
    emit(json!({
        "schema": SCHEMA,
        "epsilon": eps,
        "count": points.len(),
        "eigenvalues": points.iter().map(point_json).collect::<Vec<_>>(),
    }));
    Ok(true)
}

fn sweep_grid(arg: Option<&str>) -> Result<Vec<f64>, CliError> {
    let grid = match arg {
        None => secular::default_eps_grid(),
        Some(s) => io::parse_eps_list(s)?,
    };
    if grid.iter().any(|&e| !(e > 0.0 && e <= EPS_CEILING)) {
        return Err(CliError::Input(format!("every ε must lie in (0, {EPS_CEILING}]")));
    }
    if grid.windows(2).any(|w| w[1] >= w[0]) {
        return Err(CliError::Input("ε grid must be strictly decreasing".into()));
    }
    Ok(grid)
}

fn cmd_sweep(cli: &Cli, vc: &VertexCondition) -> CliResult {
    let grid = sweep_grid(cli.eps.as_deref())?;
    let tol = cli.tol.unwrap_or(SWEEP_TOL);
    let preds = vc.classify()?;
    let points = secular::sweep(vc, &grid)?;

    let csv = io::out_path(cli.out.as_deref(), "sweep.csv")?;
    if let Some(path) = &csv {
        let rows: Vec<Vec<String>> = points
            .iter()
            .map(|p| {
                vec![
                    fmt(p.epsilon),
                    p.kind.map(|k| k.to_string()).unwrap_or_default(),
                    fmt(p.kappa),
                    fmt(p.lambda),
                    p.alpha_predicted.map(fmt).unwrap_or_default(),
                ]
            })
            .collect();
        io::write_csv(path, &["epsilon", "kind", "kappa", "lambda", "alpha_predicted"], &rows)?;
    }

    let branches = secular::branches(&points);
    let mut ok = true;
    let mut fits = Vec::new();
    for pred in &preds {
        let Some(branch) = branches.get(&pred.kind) else {
            ok = false;
            fits.push(json!({"kind": pred.kind.to_string(), "agrees": false, "error": "branch missing"}));
            continue;
        };
        let fit = secular::fit_rate(branch)?;
        let agrees = (fit.slope - pred.kind.rate()).abs() <= tol;
        ok &= agrees;
        fits.push(json!({
            "kind": pred.kind.to_string(),
            "slope": fit.slope,
            "rate": fit.rate,
            "coeff": fit.coeff,
            "residual": fit.residual,
            "predicted_rate": pred.kind.rate(),
            "predicted_alpha": pred.alpha,
            "agrees": agrees,
        }));
    }
    emit(json!({
        "schema": SCHEMA,
        "eps_grid": grid,
        "points": points.len(),
        "tol": tol,
        "fits": fits,
        "csv": path_json(&csv),
    }));
    Ok(ok)
}

fn kind_tag(kind: Option<EigKind>) -> String {
    kind.map(|k| k.to_string()).unwrap_or_else(|| "unknown".into())
}

fn cmd_modes(cli: &Cli, vc: &VertexCondition, eps: f64) -> CliResult {
    let points = secular::find_negative_eigenvalues(vc, eps)?;
    let mut out = Vec::new();
    for (i, p) in points.iter().enumerate() {
        let mode = build_eigenmode(vc, *p)?;
        let loc = localization(vc, *p)?;
        let csv = io::out_path(cli.out.as_deref(), &format!("mode_{i}_{}.csv", kind_tag(p.kind)))?;
        if let Some(path) = &csv {
            let mut rows = Vec::with_capacity(mode.psi_s.n() + mode.psi_e.n());
            for (edge, g) in [("s", &mode.psi_s), ("e", &mode.psi_e)] {
                for (j, v) in g.values().iter().enumerate() {
                    rows.push(vec![edge.to_string(), fmt(g.x(j)), fmt(v.re), fmt(v.im)]);
                }
            }
            io::write_csv(path, &["edge", "t", "re", "im"], &rows)?;
        }
        out.push(json!({
            "kappa": p.kappa,
            "lambda": p.lambda,
            "kind": p.kind.map(|k| k.to_string()),
            "norm_s_sq": loc.norm_s_sq,
            "norm_e_sq": loc.norm_e_sq,
            "c_s": cjson(mode.c_s),
            "c_e": cjson(mode.c_e),
            "residual": mode_residual(vc, &mode),
            "csv": path_json(&csv),
        }));
    }
    emit(json!({"schema": SCHEMA, "epsilon": eps, "modes": out}));
    Ok(true)
}

fn cmd_resolve(cli: &Cli, vc: &VertexCondition, eps: f64, lambda: &str, f: Option<&PathBuf>) -> CliResult {
    let lambda = io::parse_complex(lambda)?;
    let forcing = match f {
        Some(path) => io::read_forcing(path)?,
        None => {
            let one = GridFunction::from_fn(DEFAULT_NODES, |_| Complex64::new(1.0, 0.0))?;
            Forcing::new(one.clone(), one)
        }
    };
    let tol = cli.tol.unwrap_or(RESOLVE_TOL);
    let sol = resolvent::resolve(vc, eps, lambda, &forcing)?;
    let res = resolvent::residual(vc, eps, lambda, &forcing, &sol);

    let csv = io::out_path(cli.out.as_deref(), "resolve.csv")?;
    if let Some(path) = &csv {
        let rows: Vec<Vec<String>> = (0..sol.u_s.n())
            .map(|j| {
                let s = sol.u_s.values()[j];
                let e = sol.u_e.values()[j];
                vec![fmt(sol.u_s.x(j)), fmt(s.re), fmt(s.im), fmt(e.re), fmt(e.im)]
            })
            .collect();
        io::write_csv(path, &["t", "re_us", "im_us", "re_ue", "im_ue"], &rows)?;
    }
    emit(json!({
        "schema": SCHEMA,
        "epsilon": eps,
        "lambda": cjson(lambda),
        "c_s": cjson(sol.c_s),
        "c_e": cjson(sol.c_e),
        "residual": res,
        "tol": tol,
        "csv": path_json(&csv),
    }));
    Ok(res <= tol)
}

fn cmd_count(vc: &VertexCondition, eps: f64) -> CliResult {
    let report = counting::count_negative(vc, eps)?;
    let agrees = report.via_inertia == report.via_closed_form;
    emit(json!({
        "schema": SCHEMA,
        "epsilon": eps,
        "count": report.count,
        "via_inertia": report.via_inertia,
        "via_closed_form": report.via_closed_form,
        "conditions_matched": report.conditions_matched,
    }));
    Ok(agrees)
}

fn cmd_oracle(cli: &Cli, vc: &VertexCondition, eps: f64, mesh: &str) -> CliResult {
    if eps < ORACLE_MIN_EPS {
        return Err(CliError::Input(format!("oracle needs ε ≥ {ORACLE_MIN_EPS}")));
    }
    let (n_s, n_e) = io::parse_mesh(mesh)?;
    let tol = cli.tol.unwrap_or(ORACLE_TOL);
    let mut points = secular::find_negative_eigenvalues(vc, eps)?;
    points.sort_by(|a, b| a.lambda.total_cmp(&b.lambda));
    let op = fd_oracle::assemble(vc, eps, n_s, n_e)?;
    let inertia = fd_oracle::negative_count(&op)?;
    let discrete = fd_oracle::lowest_eigenvalues(&op, inertia.min(6))?;
    let secular_vals: Vec<f64> = points.iter().map(|p| p.lambda).collect();
    let rel_err: Vec<f64> = secular_vals
        .iter()
        .zip(&discrete)
        .map(|(s, d)| ((s - d) / s).abs())
        .collect();
    let expected = secular::expected_count(vc);
    let ok = inertia == expected
        && discrete.len() == secular_vals.len()
        && rel_err.iter().all(|&e| e <= tol);
    emit(json!({
        "schema": SCHEMA,
        "epsilon": eps,
        "mesh": [n_s, n_e],
        "secular": secular_vals,
        "discrete": discrete,
        "rel_err": rel_err,
        "inertia": inertia,
        "expected_count": expected,
        "tol": tol,
        "agrees": ok,
    }));
    Ok(ok)
}

fn cmd_verify(inject_fault: bool) -> ExitCode {
    let outcomes = if inject_fault {
        acceptance::run_all_with(acceptance::broken_solver)
    } else {
        acceptance::run_all()
    };
    for o in &outcomes {
        say(&o.line());
    }
    let passed = outcomes.iter().filter(|o| o.passed).count();
    say(&format!("{passed}/{} criteria passed", outcomes.len()));
    ExitCode::from(acceptance::exit_code(&outcomes) as u8)
}

fn run(cli: &Cli) -> CliResult {
    let vc = || io::load_vc(cli.vc.as_deref());
    let eps = || {
        let e = io::single_eps(cli.eps.as_deref(), DEFAULT_EPS)?;
        if !(e > 0.0 && e <= EPS_CEILING) {
            return Err(CliError::Input(format!("ε must lie in (0, {EPS_CEILING}]")));
        }
        Ok::<f64, CliError>(e)
    };
    match &cli.command {
        Command::Classify => cmd_classify(&vc()?),
        Command::Spectrum => cmd_spectrum(&vc()?, eps()?),
        Command::Sweep => cmd_sweep(cli, &vc()?),
        Command::Modes => cmd_modes(cli, &vc()?, eps()?),
        Command::Resolve { lambda, f } => cmd_resolve(cli, &vc()?, eps()?, lambda, f.as_ref()),
        Command::Count => cmd_count(&vc()?, eps()?),
        Command::Oracle { mesh } => cmd_oracle(cli, &vc()?, eps()?, mesh),
        Command::Verify { .. } => unreachable!("handled in main"),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Command::Verify { inject_fault } = cli.command {
        return cmd_verify(inject_fault);
    }
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(CliError::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Failure(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
