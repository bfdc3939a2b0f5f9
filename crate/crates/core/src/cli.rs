//! Command-line front end.
//!
//! Exit codes: 0 success, 1 I/O or parse error, 2 invalid parameters or
//! usage, 3 verification failure. All randomness is seeded (default seed 0),
//! so repeated invocations print identical bytes.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::baselines::{build_plain_qrom, build_selectswap_dirty};
use crate::circuit::{Circuit, Role};
use crate::cost::{
    cost_bit_packet, cost_plain_circuit, cost_prior_art, cost_select_copy, cost_uncompute,
    geometric_grid, improvement_sweep, optimize_parameters, write_sweep_csv, CostBreakdown,
    PriorArt, UncomputeKind,
};
use crate::error::{Error, ParamError};
use crate::qrom::{build_qrom, plan_qrom, LookupTable};
use crate::sim::{verify_lookup, VerificationReport};

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_PARAMS: i32 = 2;
pub const EXIT_VERIFY: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "qrom",
    version,
    about = "Synthesize, verify and cost table-lookup circuits"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build a lookup circuit and write it in gate-list format.
    Build(BuildArgs),
    /// Simulate a lookup circuit against its table.
    Verify(VerifyArgs),
    /// Print closed-form costs, or optimise (lambda, mu) under a dirty budget.
    Estimate(EstimateArgs),
    /// Write a CSV of improvement factors over a geometric N grid.
    Sweep(SweepArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Baseline {
    Selectswap,
    Plain,
}

#[derive(Debug, Args)]
struct BuildArgs {
    #[arg(long)]
    table: PathBuf,
    #[arg(long)]
    lambda: Option<u64>,
    #[arg(long)]
    mu: Option<usize>,
    #[arg(long)]
    out: PathBuf,
    /// Build a prior-art circuit instead.
    #[arg(long, value_enum)]
    baseline: Option<Baseline>,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[arg(long)]
    table: PathBuf,
    #[arg(long)]
    lambda: Option<u64>,
    #[arg(long)]
    mu: Option<usize>,
    /// Dirty patterns per address.
    #[arg(long, default_value_t = 10)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum)]
    baseline: Option<Baseline>,
    /// Verify this gate-list file instead of building a fresh circuit.
    #[arg(long)]
    circuit: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct EstimateArgs {
    #[arg(long)]
    n: u64,
    #[arg(long)]
    b: u64,
    #[arg(long, requires = "mu")]
    lambda: Option<u64>,
    #[arg(long, requires = "lambda")]
    mu: Option<u64>,
    #[arg(long)]
    budget: Option<u64>,
    /// Also print every prior-art formula at the same lambda.
    #[arg(long)]
    all_methods: bool,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[arg(long)]
    b: u64,
    #[arg(long)]
    budget: u64,
    #[arg(long)]
    n_min: u64,
    #[arg(long)]
    n_max: u64,
    #[arg(long)]
    points: usize,
    /// Defaults to standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// A failure carrying its exit code.
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn io(path: &Path, e: impl std::fmt::Display) -> Self {
        Failure {
            code: EXIT_IO,
            message: format!("{}: {e}", path.display()),
        }
    }

    fn params(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_PARAMS,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Param(_) | Error::Unary(_) => EXIT_PARAMS,
            Error::Table(_) | Error::Circuit(_) => EXIT_IO,
            Error::Sim(_) => EXIT_VERIFY,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<ParamError> for Failure {
    fn from(e: ParamError) -> Self {
        Failure::params(e.0)
    }
}

type CmdResult = Result<i32, Failure>;

/// Runs the CLI on the process arguments.
pub fn run() -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}

/// Runs the CLI on `args` (including the program name), writing to the given
/// streams, and returns the exit code.
pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_PARAMS } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK {
                out.write_all(text.as_bytes())
            } else {
                err.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let result = match cli.command {
        Command::Build(a) => cmd_build(&a, out),
        Command::Verify(a) => cmd_verify(&a, out),
        Command::Estimate(a) => cmd_estimate(&a, out),
        Command::Sweep(a) => cmd_sweep(&a, out),
    };
    match result {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn read_table(path: &Path) -> Result<LookupTable, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::io(path, e))?;
    LookupTable::parse(&text).map_err(|e| Failure::io(path, e))
}

fn need<T>(v: Option<T>, flag: &str) -> Result<T, Failure> {
    v.ok_or_else(|| Failure::params(format!("--{flag} is required")))
}

fn build_circuit(
    table: &LookupTable,
    lambda: Option<u64>,
    mu: Option<usize>,
    baseline: Option<Baseline>,
) -> Result<Circuit, Failure> {
    Ok(match baseline {
        Some(Baseline::Plain) => build_plain_qrom(table)?,
        Some(Baseline::Selectswap) => build_selectswap_dirty(table, need(lambda, "lambda")?)?,
        None => {
            let plan = plan_qrom(
                table.len() as u64,
                table.bit_width(),
                need(lambda, "lambda")?,
                need(mu, "mu")?,
            )?;
            build_qrom(table, &plan)?
        }
    })
}

fn io_err(e: std::io::Error) -> Failure {
    Failure {
        code: EXIT_IO,
        message: e.to_string(),
    }
}

fn cmd_build(a: &BuildArgs, out: &mut dyn Write) -> CmdResult {
    let table = read_table(&a.table)?;
    let circuit = build_circuit(&table, a.lambda, a.mu, a.baseline)?;
    fs::write(&a.out, circuit.serialize()).map_err(|e| Failure::io(&a.out, e))?;
    let est = circuit.count_resources();
    let mut lines = vec![
        ("toffoli", est.toffoli),
        ("temp_and", est.temp_and),
        ("cnot", est.cnot),
        ("x", est.x),
    ];
    for role in [
        Role::Control,
        Role::AddressQ,
        Role::AddressR,
        Role::Output,
        Role::Dirty,
        Role::Work,
        Role::Temp,
    ] {
        lines.push((qubit_key(role), circuit.role_size(role) as u64));
    }
    lines.extend([
        ("clean_qubits", est.clean_qubits),
        ("dirty_qubits", est.dirty_qubits),
        ("total_qubits", est.total_qubits),
    ]);
    for (k, v) in lines {
        writeln!(out, "{k}={v}").map_err(io_err)?;
    }
    Ok(EXIT_OK)
}

fn qubit_key(role: Role) -> &'static str {
    match role {
        Role::Control => "qubits_control",
        Role::AddressQ => "qubits_address_q",
        Role::AddressR => "qubits_address_r",
        Role::Output => "qubits_output",
        Role::Dirty => "qubits_dirty",
        Role::Work => "qubits_work",
        Role::Temp => "qubits_temp",
    }
}

fn cmd_verify(a: &VerifyArgs, out: &mut dyn Write) -> CmdResult {
    let table = read_table(&a.table)?;
    let circuit = match &a.circuit {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| Failure::io(path, e))?;
            let c = Circuit::parse(&text).map_err(|e| Failure::io(path, e))?;
            c.validate().map_err(|e| Failure::io(path, e))?;
            check_shape(&c, &table)?;
            c
        }
        None => build_circuit(&table, a.lambda, a.mu, a.baseline)?,
    };
    let report = match verify_lookup(&circuit, &[&table], a.trials, a.seed, true) {
        Ok(r) => r,
        Err(e) => {
            writeln!(out, "cases_run=0\nfailures=1\nfirst_failure: {e}").map_err(io_err)?;
            return Ok(EXIT_VERIFY);
        }
    };
    print_report(&report, out).map_err(io_err)?;
    Ok(if report.passed() {
        EXIT_OK
    } else {
        EXIT_VERIFY
    })
}

// A circuit file must have a single output register of width b and enough
// address qubits for the table.
fn check_shape(c: &Circuit, table: &LookupTable) -> Result<(), Failure> {
    let outputs: Vec<_> = c.registers_with_role(Role::Output).collect();
    if outputs.len() != 1 || c.register(outputs[0]).size != table.bit_width() {
        return Err(Failure::params(format!(
            "circuit must have one output register of {} qubits",
            table.bit_width()
        )));
    }
    let addr = c.role_size(Role::AddressQ) + c.role_size(Role::AddressR);
    if addr < 64 && (table.len() as u64) > 1u64 << addr {
        return Err(Failure::params(format!(
            "circuit has {addr} address qubits, too few for N = {}",
            table.len()
        )));
    }
    Ok(())
}

fn print_report(report: &VerificationReport, out: &mut dyn Write) -> std::io::Result<()> {
    writeln!(out, "cases_run={}", report.cases_run)?;
    writeln!(out, "failures={}", report.failures.len())?;
    if let Some(f) = report.failures.first() {
        let phi: String = f
            .dirty_pattern
            .iter()
            .map(|&b| if b { '1' } else { '0' })
            .collect();
        writeln!(
            out,
            "first_failure: x={} dirty={} output={:?}: {}",
            f.address, phi, f.observed_output, f.diagnostics
        )?;
    }
    Ok(())
}

fn cmd_estimate(a: &EstimateArgs, out: &mut dyn Write) -> CmdResult {
    if a.lambda.is_none() && a.budget.is_none() {
        return Err(Failure::params("give --lambda and --mu, or --budget"));
    }
    let mut rows: Vec<CostBreakdown> = Vec::new();
    if let (Some(lambda), Some(mu)) = (a.lambda, a.mu) {
        rows.push(cost_bit_packet(a.n, a.b, lambda, mu)?);
        if a.all_methods {
            rows.push(cost_select_copy(a.n, a.b, lambda)?);
            for kind in [
                PriorArt::Berry,
                PriorArt::LowDirty,
                PriorArt::LowClean,
                PriorArt::Plain,
            ] {
                rows.push(cost_prior_art(kind, a.n, a.b, lambda)?);
            }
            rows.push(cost_plain_circuit(a.n, a.b)?);
            rows.push(cost_uncompute(UncomputeKind::SelectCopy, a.n, lambda)?);
            rows.push(cost_uncompute(UncomputeKind::Prior, a.n, lambda)?);
        }
    }
    let mut text = String::new();
    if !rows.is_empty() {
        text.push_str(&format_table(&rows));
    }
    if let Some(budget) = a.budget {
        let r = optimize_parameters(a.n, a.b, budget)?;
        if r.feasible {
            text.push_str(&format!(
                "optimum: lambda={} mu={} toffoli={} dirty={} budget={budget}\n",
                r.lambda, r.mu, r.cost.toffoli_total, r.cost.dirty_qubits
            ));
        } else {
            text.push_str(&format!(
                "optimum: infeasible budget={budget}; plain fallback toffoli={}\n",
                r.cost.toffoli_total
            ));
        }
    }
    out.write_all(text.as_bytes()).map_err(io_err)?;
    Ok(EXIT_OK)
}

fn format_table(rows: &[CostBreakdown]) -> String {
    let header = [
        "method",
        "toffoli",
        "select",
        "copy",
        "dirty",
        "clean_work",
        "output",
    ];
    let cells: Vec<[String; 7]> = rows
        .iter()
        .map(|r| {
            [
                r.formula.to_string(),
                r.toffoli_total.to_string(),
                r.select_toffoli.to_string(),
                r.copy_toffoli.to_string(),
                r.dirty_qubits.to_string(),
                r.clean_work_qubits.to_string(),
                r.output_qubits.to_string(),
            ]
        })
        .collect();
    let widths: Vec<usize> = (0..header.len())
        .map(|i| {
            cells
                .iter()
                .map(|c| c[i].len())
                .chain([header[i].len()])
                .max()
                .unwrap_or(0)
        })
        .collect();
    let mut s = String::new();
    let mut line = |fields: &[&str]| {
        let parts: Vec<String> = fields
            .iter()
            .zip(&widths)
            .enumerate()
            .map(|(i, (f, w))| {
                if i == 0 {
                    format!("{f:<w$}")
                } else {
                    format!("{f:>w$}")
                }
            })
            .collect();
        s.push_str(parts.join("  ").trim_end());
        s.push('\n');
    };
    line(&header);
    for c in &cells {
        line(&c.iter().map(String::as_str).collect::<Vec<_>>());
    }
    s
}

fn cmd_sweep(a: &SweepArgs, out: &mut dyn Write) -> CmdResult {
    if a.n_min < 4 {
        return Err(Failure::params(format!(
            "--n-min must be at least 4, got {}",
            a.n_min
        )));
    }
    let grid = geometric_grid(a.n_min, a.n_max, a.points)?;
    let rows = improvement_sweep(a.b, a.budget, &grid)?;
    let mut buf = Vec::new();
    write_sweep_csv(&rows, &mut buf).map_err(|e| Failure {
        code: EXIT_IO,
        message: e.to_string(),
    })?;
    match &a.out {
        Some(path) => fs::write(path, &buf).map_err(|e| Failure::io(path, e))?,
        None => out.write_all(&buf).map_err(io_err)?,
    }
    Ok(EXIT_OK)
}
