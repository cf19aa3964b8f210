//! `mbound`: sharp Hardy-average bounds from moment data.
//!
//! Subcommands: `bound` (one shape or moment triple), `verify` (check every
//! inequality against a step function file), `sweep` (CSV tabulation over a
//! shape or eps grid), `extremal` (construct the equality-case power
//! function), `search` (seeded randomized sharpness probe).
//!
//! Exit codes: 0 success, 1 verification failure, 2 infeasible input,
//! 3 search failure, 64 usage error, 65 unreadable input file.

mod args;
mod output;

use args::{Axis, Cli, Command};
use clap::error::ErrorKind;
use clap::Parser;
use mbound_core::{
    extremal_from_eps, sharp_constant, sharpness_search, solve_kappa0, verify_main_bound,
    verify_omega_q_bound, Error as CoreError, Exponents, HardyData, MomentData, ShapePair,
    StepFunction,
};
use output::{fmt17, write_out, Row, CSV_HEADER};
use std::process::ExitCode;

const EXIT_VERIFY: u8 = 1;
const EXIT_INFEASIBLE: u8 = 2;
const EXIT_SEARCH: u8 = 3;
const EXIT_USAGE: u8 = 64;
const EXIT_DATA: u8 = 65;

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

impl From<CoreError> for Failure {
    fn from(e: CoreError) -> Self {
        let code = match &e {
            CoreError::Parse(_) => EXIT_DATA,
            CoreError::SearchFailed { .. } => EXIT_SEARCH,
            CoreError::Infeasible(_) | CoreError::OutOfDomain { .. } | CoreError::Degenerate(_) => {
                EXIT_INFEASIBLE
            }
            _ => EXIT_INFEASIBLE,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            eprintln!("{e}");
            return ExitCode::from(EXIT_USAGE);
        }
    };
    if let Ok(threads) = std::env::var("MBOUND_THREADS") {
        match threads.parse::<usize>() {
            Ok(n) if n >= 1 => mbound_core::configure_threads(n),
            _ => {
                eprintln!("MBOUND_THREADS must be a positive integer");
                return ExitCode::from(EXIT_USAGE);
            }
        }
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Bound(a) => cmd_bound(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Extremal(a) => cmd_extremal(a),
        Command::Search(a) => cmd_search(a),
    }
}

fn shape_row(exp: &Exponents, shape: &ShapePair, root_tol: f64) -> Result<Row, Failure> {
    let r = sharp_constant(exp, shape, root_tol)?;
    Ok(Row::solved(shape.s1(), shape.s2(), &r))
}

fn cmd_bound(a: args::BoundArgs) -> Result<(), Failure> {
    let common = &a.common;
    common.validate()?;
    let exp = Exponents::new(common.p, common.q)?;
    let shape_group = a.s1.is_some() || a.s2.is_some();
    let moment_group = a.x.is_some() || a.y.is_some() || a.z.is_some() || a.kappa.is_some();
    let shape = match (shape_group, moment_group) {
        (true, false) => {
            let (Some(s1), Some(s2)) = (a.s1, a.s2) else {
                return Err(Failure::usage("--s1 and --s2 must be supplied together"));
            };
            ShapePair::new(&exp, s1, s2)?
        }
        (false, true) => {
            let (Some(x), Some(y), Some(z), Some(kappa)) = (a.x, a.y, a.z, a.kappa) else {
                return Err(Failure::usage(
                    "--x, --y, --z and --kappa must be supplied together",
                ));
            };
            MomentData::new(&exp, kappa, x, y, z)?.shape_params(&exp)?
        }
        (true, true) => {
            return Err(Failure::usage(
                "supply either --s1/--s2 or --x/--y/--z/--kappa, not both",
            ))
        }
        (false, false) => {
            return Err(Failure::usage(
                "supply one parameter group: --s1/--s2 or --x/--y/--z/--kappa",
            ))
        }
    };
    let row = shape_row(&exp, &shape, common.root_tol)?;
    let text = match common.format {
        args::Format::Human => row.human(),
        args::Format::Json => row.json(),
        args::Format::Csv => format!("{CSV_HEADER}\n{}\n", row.csv()),
    };
    write_out(common.output.as_deref(), &text)?;
    Ok(())
}

fn cmd_verify(a: args::VerifyArgs) -> Result<(), Failure> {
    let common = &a.common;
    common.validate()?;
    let exp = Exponents::new(common.p, common.q)?;
    let text = std::fs::read_to_string(&a.file).map_err(|e| Failure {
        code: EXIT_DATA,
        message: format!("{}: {e}", a.file.display()),
    })?;
    let h = StepFunction::from_json(&text).map_err(|e| Failure {
        code: EXIT_DATA,
        message: e.to_string(),
    })?;

    let betas: Vec<f64> = match a.beta {
        Some(beta) => vec![beta],
        None => (1..=20).map(|i| 0.15 * i as f64).collect(),
    };
    let data = HardyData::compute(&h, &exp, common.quad_tol)?;
    let mut failed = false;
    let mut lines = Vec::new();
    let mut json_rows = Vec::new();
    for beta in betas {
        let r = data.base_slack(&exp, beta)?;
        let scale = r.lhs.abs().max(r.rhs.abs()).max(1e-12);
        if r.slack < -1e-9 * scale {
            failed = true;
        }
        lines.push(format!(
            "base inequality  beta = {beta:<6} lhs = {} rhs = {} slack = {}",
            fmt17(r.lhs),
            fmt17(r.rhs),
            fmt17(r.slack)
        ));
        json_rows.push(serde_json::json!({
            "check": "base_inequality", "beta": beta,
            "lhs": r.lhs, "rhs": r.rhs, "slack": r.slack,
        }));
    }
    let oq = verify_omega_q_bound(&h, &exp, common.quad_tol)?;
    if oq.first_slack < -1e-9 * oq.middle.abs().max(1e-12) {
        failed = true;
    }
    lines.push(format!(
        "q-average bound  hardy_q = {} middle = {} slack = {} majorant_gap = {}",
        fmt17(oq.hardy_q),
        fmt17(oq.middle),
        fmt17(oq.first_slack),
        fmt17(oq.min_gap)
    ));
    json_rows.push(serde_json::json!({
        "check": "q_average_bound",
        "hardy_q": oq.hardy_q, "middle": oq.middle,
        "first_slack": oq.first_slack, "min_gap": oq.min_gap,
    }));
    let mb = verify_main_bound(&h, &exp, common.root_tol)?;
    if mb.slack < -1e-9 {
        failed = true;
    }
    lines.push(format!(
        "main bound       ratio = {} t_sharp = {} slack = {} case = {}",
        fmt17(mb.ratio),
        fmt17(mb.bound.t_sharp),
        fmt17(mb.slack),
        mb.bound.case_tag.as_str()
    ));
    json_rows.push(serde_json::json!({
        "check": "main_bound",
        "ratio": mb.ratio, "t_sharp": mb.bound.t_sharp,
        "slack": mb.slack, "case_tag": mb.bound.case_tag.as_str(),
    }));

    let text = match common.format {
        args::Format::Json => format!(
            "{}\n",
            serde_json::to_string_pretty(&serde_json::Value::Array(json_rows)).unwrap()
        ),
        _ => {
            let mut s = lines.join("\n");
            s.push('\n');
            s
        }
    };
    write_out(common.output.as_deref(), &text)?;
    if failed {
        Err(Failure {
            code: EXIT_VERIFY,
            message: "at least one inequality slack fell below tolerance".into(),
        })
    } else {
        Ok(())
    }
}

fn cmd_sweep(a: args::SweepArgs) -> Result<(), Failure> {
    let common = &a.common;
    common.validate()?;
    let exp = Exponents::new(common.p, common.q)?;
    let rows: Vec<Row> = match (&a.s1, &a.s2, &a.eps) {
        (Some(ax1), Some(ax2), None) => {
            let mut rows = Vec::new();
            for s1 in ax1.points() {
                for s2 in ax2.points() {
                    rows.push(sweep_cell(&exp, s1, s2, common.root_tol));
                }
            }
            rows
        }
        (None, None, Some(axe)) => {
            let mut rows = Vec::new();
            for eps in axe.points() {
                rows.push(sweep_eps_cell(&exp, eps, common.root_tol));
            }
            rows
        }
        _ => {
            return Err(Failure::usage(
                "supply either --s1 and --s2 axes, or an --eps axis",
            ))
        }
    };
    let text = match common.format {
        args::Format::Json => {
            let objs: Vec<_> = rows.iter().map(Row::json_value).collect();
            format!(
                "{}\n",
                serde_json::to_string_pretty(&serde_json::Value::Array(objs)).unwrap()
            )
        }
        _ => {
            let mut s = String::from(CSV_HEADER);
            s.push('\n');
            for row in &rows {
                s.push_str(&row.csv());
                s.push('\n');
            }
            s
        }
    };
    write_out(common.output.as_deref(), &text)?;
    Ok(())
}

fn sweep_cell(exp: &Exponents, s1: f64, s2: f64, root_tol: f64) -> Row {
    match ShapePair::new(exp, s1, s2) {
        Ok(shape) => match sharp_constant(exp, &shape, root_tol) {
            Ok(r) => Row::solved(s1, s2, &r),
            Err(e) => Row::failed(s1, s2, &e),
        },
        Err(_) => Row::infeasible(s1, s2),
    }
}

fn sweep_eps_cell(exp: &Exponents, eps: f64, root_tol: f64) -> Row {
    let s1 = match mbound_core::h_poly(exp.p(), eps) {
        Ok(v) => v,
        Err(_) => return Row::infeasible(f64::NAN, f64::NAN),
    };
    let s2 = match mbound_core::h_poly(exp.q(), eps) {
        Ok(v) => v,
        Err(_) => return Row::infeasible(s1, f64::NAN),
    };
    sweep_cell(exp, s1, s2, root_tol)
}

fn cmd_extremal(a: args::ExtremalArgs) -> Result<(), Failure> {
    let common = &a.common;
    common.validate()?;
    let exp = Exponents::new(common.p, common.q)?;
    let g = if a.from_moments {
        let (Some(f), Some(a_m), Some(f_m)) = (a.f, a.big_a, a.big_f) else {
            return Err(Failure::usage("--from-moments requires --f, --A and --F"));
        };
        let (kappa0, eps0) = solve_kappa0(&exp, f, a_m, f_m, common.root_tol)?;
        extremal_from_eps(&exp, eps0, kappa0, f)?
    } else {
        let (Some(eps), Some(kappa0), Some(f)) = (a.eps, a.kappa, a.f) else {
            return Err(Failure::usage(
                "supply --eps, --kappa and --f (or use --from-moments)",
            ));
        };
        extremal_from_eps(&exp, eps, kappa0, f)?
    };
    let m = g.moments(&exp)?;
    let shape = m.shape_params(&exp)?;
    // equality residual of the base inequality at beta = eps - 1, all terms
    // in closed form
    let eps = g.eps();
    let p = exp.p();
    let q = exp.q();
    let beta = eps - 1.0;
    let gg = mbound_core::big_g(&exp, beta)?;
    let lhs = g.hardy_integral(p);
    let avg_pq = (m.x() / m.kappa()).powf(p - q);
    let rhs = p * eps.powf(q) / gg * eps.powf(p - q) * m.z()
        + (p - q) * eps / gg * m.x().powf(p) / m.kappa().powf(p - 1.0)
        + p * (q - 1.0) * beta / gg * avg_pq * g.hardy_integral(q)
        - p * eps.powf(q) / gg * avg_pq * m.y();
    let residual = rhs - lhs;

    let text = match common.format {
        args::Format::Json => format!(
            "{}\n",
            serde_json::to_string_pretty(&serde_json::json!({
                "theta": g.theta(),
                "eps0": g.eps(),
                "kappa0": g.kappa0(),
                "s1": shape.s1(),
                "s2": shape.s2(),
                "equality_residual": residual,
            }))
            .unwrap()
        ),
        _ => format!(
            "theta = {}\neps0 = {}\nkappa0 = {}\ns1 = {}\ns2 = {}\nequality residual = {}\n",
            fmt17(g.theta()),
            fmt17(g.eps()),
            fmt17(g.kappa0()),
            fmt17(shape.s1()),
            fmt17(shape.s2()),
            fmt17(residual)
        ),
    };
    write_out(common.output.as_deref(), &text)?;
    Ok(())
}

fn cmd_search(a: args::SearchArgs) -> Result<(), Failure> {
    let common = &a.common;
    common.validate()?;
    let exp = Exponents::new(common.p, common.q)?;
    let shape = ShapePair::new(&exp, a.s1, a.s2)?;
    let bound = sharp_constant(&exp, &shape, common.root_tol)?;
    let result = sharpness_search(&exp, &shape, a.n_steps, a.iters, a.seed)?;
    std::fs::write(&a.function_file, result.best.to_json()).map_err(|e| Failure {
        code: EXIT_DATA,
        message: format!("{}: {e}", a.function_file.display()),
    })?;
    let gap = bound.t_sharp - result.best_ratio;
    let text = match common.format {
        args::Format::Json => format!(
            "{}\n",
            serde_json::to_string_pretty(&serde_json::json!({
                "best_ratio": result.best_ratio,
                "t_sharp": bound.t_sharp,
                "gap": gap,
                "accepted": result.accepted,
                "attempted": result.attempted,
                "function_file": a.function_file.display().to_string(),
            }))
            .unwrap()
        ),
        _ => format!(
            "best_ratio = {}\nt_sharp = {}\ngap = {}\naccepted = {} / {}\nfunction written to {}\n",
            fmt17(result.best_ratio),
            fmt17(bound.t_sharp),
            fmt17(gap),
            result.accepted,
            result.attempted,
            a.function_file.display()
        ),
    };
    write_out(common.output.as_deref(), &text)?;
    Ok(())
}

impl Axis {
    fn points(&self) -> Vec<f64> {
        match *self {
            Axis::Single(v) => vec![v],
            Axis::Range { lo, hi, n } => {
                if n == 1 {
                    vec![lo]
                } else {
                    (0..n)
                        .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
                        .collect()
                }
            }
        }
    }
}
