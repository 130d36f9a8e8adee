use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use quadeuler::fermat::{
    fermat_calx_closed_form, fermat_closed_form, fermat_n2_sign_audit, fermat_n2_trace_form,
    riemann_hurwitz_chi, FermatInstance,
};
use quadeuler::field::{FieldSpec, Scalar};
use quadeuler::gw::{format_gw, gw_equals, invariants, parse_gw, GWForm};
use quadeuler::jacobian::{
    build_socle_pieces, build_system, check_assumptions, CheckOptions, ProblemInstance,
};
use quadeuler::pipeline::{
    compute_chi, ChiResult, ComputeOptions, OutputJson, PipelineError, ProblemInput,
};

/// Exit with 1 when independently computed values disagree, 2 when the
/// input itself is unusable.
const EXIT_INCONSISTENT: u8 = 1;
const EXIT_BAD_INPUT: u8 = 2;

#[derive(Parser)]
#[command(
    name = "quadeuler",
    version,
    about = "Quadratic Euler characteristics of complete intersections, valued in GW(k)"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run the full pipeline on a JSON problem description
    Compute(ComputeArgs),
    /// Closed forms and cross-checks for Fermat-type coefficient data
    Fermat(FermatArgs),
    /// Parse, simplify and compare Grothendieck-Witt forms
    Gw(GwArgs),
    /// Graded-piece dimensions of the Jacobian ring
    Dims(DimsArgs),
    /// Smoothness and transversality report
    Check(CheckArgs),
}

#[derive(Args)]
struct ComputeArgs {
    /// Problem description (JSON)
    #[arg(short, long)]
    input: PathBuf,
    /// Skip the smoothness and transversality checks
    #[arg(long)]
    assume_smooth: bool,
    /// Degree bound for the assumption checker
    #[arg(long, value_name = "N")]
    dmax: Option<u32>,
    /// Run every applicable independent oracle; exit 1 on any mismatch
    #[arg(long)]
    verify_all: bool,
    /// Write the full result (including diagnostics) as JSON to FILE
    #[arg(long, value_name = "FILE")]
    emit_details: Option<PathBuf>,
    /// Print the result as JSON on stdout
    #[arg(long)]
    json: bool,
    /// Proceed past the monomial-count guardrail
    #[arg(long)]
    force: bool,
}

#[derive(Args)]
struct FermatArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    m: u32,
    /// Coefficients of the first form, comma separated
    #[arg(long)]
    a: String,
    /// Coefficients of the second form, comma separated
    #[arg(long)]
    b: String,
    /// "Q" or an odd prime
    #[arg(long, default_value = "Q")]
    field: String,
    /// Compare the closed form against every applicable oracle
    #[arg(long)]
    verify_all: bool,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct GwArgs {
    #[command(subcommand)]
    op: GwOp,
}

#[derive(Subcommand)]
enum GwOp {
    /// Decide equality in GW(k); prints true/false, exit 1 when unequal
    Eq {
        lhs: String,
        rhs: String,
        #[arg(long, default_value = "Q")]
        field: String,
    },
    /// Normalize a form expression
    Simplify {
        form: String,
        #[arg(long, default_value = "Q")]
        field: String,
    },
}

#[derive(Args)]
struct DimsArgs {
    /// Problem description (JSON)
    #[arg(short, long)]
    input: PathBuf,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct CheckArgs {
    /// Problem description (JSON)
    #[arg(short, long)]
    input: PathBuf,
    /// Degree bound for the divisor-avoidance search
    #[arg(long, value_name = "N")]
    dmax: Option<u32>,
}

/// Restore the default SIGPIPE disposition so that piping into `head`
/// and friends terminates the process quietly instead of panicking on
/// a failed write to stdout.
#[cfg(unix)]
fn reset_sigpipe() {
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
}

#[cfg(not(unix))]
fn reset_sigpipe() {}

fn main() -> ExitCode {
    reset_sigpipe();
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_BAD_INPUT)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, String> {
    match cli.cmd {
        Cmd::Compute(args) => cmd_compute(args),
        Cmd::Fermat(args) => cmd_fermat(args),
        Cmd::Gw(args) => match args.op {
            GwOp::Eq { lhs, rhs, field } => {
                let k = parse_field_flag(&field)?;
                let l = parse_gw(k, &lhs).map_err(|e| e.to_string())?;
                let r = parse_gw(k, &rhs).map_err(|e| e.to_string())?;
                let eq = gw_equals(&l, &r).map_err(|e| e.to_string())?;
                println!("{eq}");
                Ok(if eq {
                    ExitCode::SUCCESS
                } else {
                    ExitCode::from(EXIT_INCONSISTENT)
                })
            }
            GwOp::Simplify { form, field } => {
                let k = parse_field_flag(&field)?;
                let f = parse_gw(k, &form).map_err(|e| e.to_string())?;
                println!("{}", format_gw(&f));
                Ok(ExitCode::SUCCESS)
            }
        },
        Cmd::Dims(args) => cmd_dims(args),
        Cmd::Check(args) => cmd_check(args),
    }
}

fn parse_field_flag(s: &str) -> Result<FieldSpec, String> {
    if s == "Q" || s == "q" {
        return Ok(FieldSpec::Rationals);
    }
    let p: u64 = s
        .parse()
        .map_err(|_| format!("field must be \"Q\" or an odd prime, got '{s}'"))?;
    let k = FieldSpec::PrimeField(p);
    k.validate().map_err(|e| e.to_string())?;
    Ok(k)
}

fn read_input(path: &PathBuf) -> Result<ProblemInput, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    ProblemInput::from_json_str(&text).map_err(|e| e.to_string())
}

/// Errors that mean "the computation contradicted itself" keep exit
/// code 1; everything else about a pipeline failure is the input's
/// fault and exits 2.
fn pipeline_exit(err: &PipelineError) -> ExitCode {
    match err {
        PipelineError::RankMismatch { .. }
        | PipelineError::ParityViolation { .. }
        | PipelineError::DescentViolation
        | PipelineError::SocleDims { .. }
        | PipelineError::ExcludedCaseUnreachable => ExitCode::from(EXIT_INCONSISTENT),
        _ => ExitCode::from(EXIT_BAD_INPUT),
    }
}

fn cmd_compute(args: ComputeArgs) -> Result<ExitCode, String> {
    let input = read_input(&args.input)?;
    let opts = ComputeOptions {
        assume_smooth: args.assume_smooth,
        d_max: args.dmax,
        verify_all: args.verify_all,
        force_large: args.force,
    };
    let res = match compute_chi(&input, &opts) {
        Ok(res) => res,
        Err(err) => {
            eprintln!("error: {err}");
            return Ok(pipeline_exit(&err));
        }
    };
    let out = OutputJson::from_result(&res).map_err(|e| e.to_string())?;
    if let Some(path) = &args.emit_details {
        let text = serde_json::to_string_pretty(&out).map_err(|e| e.to_string())?;
        fs::write(path, text).map_err(|e| format!("{}: {e}", path.display()))?;
    }
    if args.json {
        println!(
            "{}",
            serde_json::to_string_pretty(&out).map_err(|e| e.to_string())?
        );
    } else {
        print_result_text(&res);
    }
    if !res.oracles_consistent() {
        eprintln!("oracle mismatch:");
        eprintln!("  pipeline chi_X      = {}", format_gw(&res.chi_x));
        eprintln!("  pipeline chi_calX   = {}", format_gw(&res.chi_calx));
        for o in &res.diagnostics.oracles {
            let tag = if o.agrees { "agrees" } else { "DISAGREES" };
            eprintln!("  {:20} = {}  [{tag}]", o.name, o.value);
        }
        return Ok(ExitCode::from(EXIT_INCONSISTENT));
    }
    Ok(ExitCode::SUCCESS)
}

fn print_result_text(res: &ChiResult) {
    println!("chi_X    = {}", format_gw(&res.chi_x));
    println!("chi_calX = {}", format_gw(&res.chi_calx));
    if let Ok(inv) = invariants(&res.chi_x) {
        let sig = inv
            .signature
            .map_or("n/a".to_string(), |s| s.to_string());
        println!(
            "rank = {}, signature = {}, disc = {}",
            inv.rank, sig, inv.disc
        );
    }
    println!("route: {}", res.diagnostics.route);
    for o in &res.diagnostics.oracles {
        let tag = if o.agrees { "agrees" } else { "DISAGREES" };
        println!("oracle {}: {}  [{tag}]", o.name, o.value);
    }
    for e in &res.diagnostics.sign_audit {
        let tag = if e.matches_direct { "matches" } else { "differs" };
        println!("audit {}: {}  [{tag}]", e.label, e.value);
    }
}

fn parse_coeff_list(k: FieldSpec, s: &str) -> Result<Vec<Scalar>, String> {
    s.split(',')
        .map(|part| {
            let part = part.trim();
            Scalar::parse(k, part).map_err(|_| format!("bad coefficient '{part}'"))
        })
        .collect()
}

fn cmd_fermat(args: FermatArgs) -> Result<ExitCode, String> {
    let k = parse_field_flag(&args.field)?;
    let a = parse_coeff_list(k, &args.a)?;
    let b = parse_coeff_list(k, &args.b)?;
    let inst = FermatInstance::new(k, args.n, args.m, a, b).map_err(|e| e.to_string())?;
    let chi = fermat_closed_form(&inst).map_err(|e| e.to_string())?;

    let mut oracles: Vec<(String, GWForm, bool)> = Vec::new();
    if args.verify_all {
        if inst.n == 2 {
            let etale = fermat_n2_trace_form(&inst).map_err(|e| e.to_string())?;
            let agrees = gw_equals(&etale, &chi).map_err(|e| e.to_string())?;
            oracles.push(("two-step residue tower".into(), etale, agrees));
        }
        if inst.n % 2 == 0 {
            let calx = fermat_calx_closed_form(&inst).map_err(|e| e.to_string())?;
            let rh = riemann_hurwitz_chi(&inst).map_err(|e| e.to_string())?;
            let agrees = gw_equals(&rh, &calx).map_err(|e| e.to_string())?;
            oracles.push(("Riemann-Hurwitz (vs incidence closed form)".into(), rh, agrees));
        }
    }

    if args.json {
        let inv = invariants(&chi).map_err(|e| e.to_string())?;
        let value = serde_json::json!({
            "chi_X": quadeuler::gw::GwJson::from_form(&chi),
            "rank": inv.rank,
            "signature": inv.signature,
            "disc": inv.disc.to_string(),
            "oracles": oracles
                .iter()
                .map(|(name, form, agrees)| {
                    serde_json::json!({
                        "name": name,
                        "value": format_gw(form),
                        "agrees": agrees,
                    })
                })
                .collect::<Vec<_>>(),
        });
        println!(
            "{}",
            serde_json::to_string_pretty(&value).map_err(|e| e.to_string())?
        );
    } else {
        println!("{}", format_gw(&chi));
        if args.verify_all && inst.n == 2 && inst.m % 2 == 0 {
            for e in fermat_n2_sign_audit(&inst).map_err(|e| e.to_string())? {
                let tag = if e.matches_direct { "matches" } else { "differs" };
                println!("audit {}: {}  [{tag}]", e.label, format_gw(&e.form));
            }
        }
        for (name, form, agrees) in &oracles {
            let tag = if *agrees { "agrees" } else { "DISAGREES" };
            println!("oracle {name}: {}  [{tag}]", format_gw(form));
        }
    }
    if oracles.iter().any(|(_, _, agrees)| !agrees) {
        return Ok(ExitCode::from(EXIT_INCONSISTENT));
    }
    Ok(ExitCode::SUCCESS)
}

fn general_instance(input: ProblemInput) -> Result<ProblemInstance, String> {
    match input {
        ProblemInput::General(p) => Ok(p),
        ProblemInput::Fermat(f) => f.to_problem_instance().map_err(|e| e.to_string()),
    }
}

fn cmd_dims(args: DimsArgs) -> Result<ExitCode, String> {
    let inst = general_instance(read_input(&args.input)?)?;
    let sys = build_system(&inst).map_err(|e| e.to_string())?;
    let pieces = build_socle_pieces(&sys).map_err(|e| e.to_string())?;
    let middle = match sys.middle_q() {
        Some(q) => {
            let piece = quadeuler::jacobian::hodge_piece(&sys, q).map_err(|e| e.to_string())?;
            Some((q, piece.bidegree, piece.dim()))
        }
        None => None,
    };
    if args.json {
        let value = serde_json::json!({
            "rho": [sys.rho.y, sys.rho.x],
            "dim_jrho": pieces.jrho.dim(),
            "jtilde_bidegree": [sys.jtilde_bidegree().y, sys.jtilde_bidegree().x],
            "dim_jtilde": pieces.jtilde.dim(),
            "middle": middle.map(|(q, d, dim)| serde_json::json!({
                "q": q, "bidegree": [d.y, d.x], "dim": dim,
            })),
        });
        println!(
            "{}",
            serde_json::to_string_pretty(&value).map_err(|e| e.to_string())?
        );
    } else {
        println!("rho = {}, dim J^rho = {}", sys.rho, pieces.jrho.dim());
        println!(
            "Jt bidegree = {}, dim Jt = {}",
            sys.jtilde_bidegree(),
            pieces.jtilde.dim()
        );
        match middle {
            Some((q, d, dim)) => println!("middle q = {q}, bidegree = {d}, dim = {dim}"),
            None => println!("middle piece: none (odd-dimensional incidence variety)"),
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_check(args: CheckArgs) -> Result<ExitCode, String> {
    let inst = general_instance(read_input(&args.input)?)?;
    let opts = CheckOptions {
        d_max: args.dmax,
        ..CheckOptions::default()
    };
    let report = check_assumptions(&inst, &opts).map_err(|e| e.to_string())?;
    for line in report.lines() {
        println!("{line}");
    }
    if report.any_failed() {
        return Ok(ExitCode::from(EXIT_INCONSISTENT));
    }
    Ok(ExitCode::SUCCESS)
}
