#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fraclap_core::kernelnd::{
    build_kernel_table, check_order, corrector_rho, corrector_rho_lattice_sum, KernelOrder,
    KernelTable,
};
use fraclap_core::operators::{
    self, KernelSource, KernelSourceKind, OperatorKind, OperatorSpec, Window,
};
use fraclap_core::spectral::{multiplier_apply, SymbolKind, SymbolSpec};
use fraclap_core::verify::{run_suite, Suite, VerifyConfig};
use fraclap_core::{Error, GridFunction, QuadratureConfig};

const EXIT_SUITE_FAILED: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_NUMERIC: u8 = 3;

/// Discrete fractional and logarithmic Laplacians on the integer lattice.
#[derive(Parser, Debug)]
#[command(name = "fraclap", version, about)]
struct Cli {
    /// Relative tolerance of every heat-kernel quadrature.
    #[arg(long, global = true, env = "FRACLAP_QUAD_TOL", value_name = "TOL")]
    quad_tol: Option<f64>,

    /// Write the main result here instead of standard output.
    #[arg(long, short, global = true, value_name = "PATH")]
    output: Option<PathBuf>,

    /// Format of tables and grid functions.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Tabulate a lattice kernel on the box |m|_inf <= radius.
    Kernel(KernelArgs),
    /// Apply an operator to a grid function read from a JSON file.
    Apply(ApplyArgs),
    /// Print the corrector constant of the logarithmic Laplacian.
    Rho(RhoArgs),
    /// Run a verification suite and write its report.
    Verify(VerifyArgs),
    /// Apply a Fourier multiplier to a grid function read from a JSON file.
    Spectral(SpectralArgs),
}

#[derive(Args, Debug)]
struct KernelArgs {
    #[arg(long)]
    dim: usize,
    /// Order in (-N/2, 0) or (0, 1).
    #[arg(
        long,
        allow_negative_numbers = true,
        conflicts_with = "zero_order",
        required_unless_present = "zero_order"
    )]
    s: Option<f64>,
    /// Tabulate the order-zero kernel instead.
    #[arg(long)]
    zero_order: bool,
    #[arg(long)]
    radius: u64,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum OpName {
    Laplacian,
    Fractional,
    RieszNegative,
    LogLaplacian,
    RieszZero,
}

impl From<OpName> for OperatorKind {
    fn from(op: OpName) -> Self {
        match op {
            OpName::Laplacian => OperatorKind::Laplacian,
            OpName::Fractional => OperatorKind::Fractional,
            OpName::RieszNegative => OperatorKind::RieszNegative,
            OpName::LogLaplacian => OperatorKind::LogLaplacian,
            OpName::RieszZero => OperatorKind::RieszZero,
        }
    }
}

#[derive(Args, Debug)]
struct ApplyArgs {
    /// Grid function JSON file.
    input: PathBuf,
    #[arg(long, value_enum)]
    op: OpName,
    #[arg(long, allow_negative_numbers = true)]
    s: Option<f64>,
    /// Kernel table written by `fraclap kernel`.
    #[arg(long, value_name = "PATH")]
    table: Option<PathBuf>,
    /// Use heat-kernel quadrature even where closed forms exist.
    #[arg(long, conflicts_with = "table")]
    quadrature: bool,
    /// Output window radius around the support.
    #[arg(long)]
    radius: Option<u64>,
    /// Fail unless omitted values are bounded by this.
    #[arg(long)]
    tail_tol: Option<f64>,
    /// Also apply the Fourier multiplier and report the largest gap.
    #[arg(long)]
    spectral: bool,
    /// Midpoint nodes per axis for --spectral.
    #[arg(long, default_value_t = 4096)]
    grid: usize,
}

#[derive(Args, Debug)]
struct RhoArgs {
    #[arg(long)]
    dim: usize,
    /// Also compute the direct lattice-sum value.
    #[arg(long)]
    cross_check: bool,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// identities, derivative-plus, derivative-minus, spectral or all.
    suite: String,
    #[arg(long, default_value_t = VerifyConfig::default().seed)]
    seed: u64,
    /// Run independent experiments on separate threads.
    #[arg(long)]
    parallel: bool,
    /// Zero runtimes so reports are byte-stable.
    #[arg(long)]
    deterministic: bool,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum SymbolName {
    Laplacian,
    Fractional,
    Log,
    Heat,
}

#[derive(Args, Debug)]
struct SpectralArgs {
    input: PathBuf,
    #[arg(long, value_enum)]
    symbol: SymbolName,
    #[arg(long, allow_negative_numbers = true)]
    s: Option<f64>,
    /// Heat time.
    #[arg(long)]
    t: Option<f64>,
    #[arg(long, default_value_t = 4096)]
    grid: usize,
    #[arg(long, default_value_t = 20)]
    radius: u64,
    /// Fail if the grid-doubling estimate exceeds this.
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Numeric(String),
    SuiteFailed,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_numeric() {
            Failure::Numeric(e.to_string())
        } else {
            Failure::Usage(e.to_string())
        }
    }
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn quad_config(cli: &Cli) -> Result<QuadratureConfig, Failure> {
    let quad = match cli.quad_tol {
        Some(tol) => QuadratureConfig::with_rel_tol(tol),
        None => QuadratureConfig::default(),
    };
    quad.validate()
        .map_err(|e| usage(format!("--quad-tol: {e}")))?;
    Ok(quad)
}

fn read_file(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))
}

fn emit(cli: &Cli, text: &str) -> Result<(), Failure> {
    match &cli.output {
        Some(path) => fs::write(path, text)
            .map_err(|e| usage(format!("cannot write {}: {e}", path.display()))),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| usage(format!("cannot write to standard output: {e}"))),
    }
}

/// Messages for the user go to stdout when the result went to a file, else stderr.
fn note(cli: &Cli, msg: &str) {
    if cli.output.is_some() {
        println!("{msg}");
    } else {
        eprintln!("{msg}");
    }
}

fn render_function(cli: &Cli, f: &GridFunction) -> String {
    match cli.format {
        Format::Json => f.to_json() + "\n",
        Format::Csv => f.to_csv(),
    }
}

fn cmd_kernel(cli: &Cli, args: &KernelArgs) -> Result<(), Failure> {
    if args.dim == 0 {
        return Err(usage("--dim: must be at least 1"));
    }
    let order = match args.s {
        Some(s) => {
            check_order(args.dim, s).map_err(|e| usage(format!("--s: {e}")))?;
            KernelOrder::Fractional(s)
        }
        None => KernelOrder::Zero,
    };
    let quad = quad_config(cli)?;
    let table = build_kernel_table(args.dim, order, args.radius, &quad)?;
    let text = match cli.format {
        Format::Json => table.to_json() + "\n",
        Format::Csv => table.to_csv(),
    };
    emit(cli, &text)?;
    note(
        cli,
        &format!(
            "kernel N={} order={} radius={}: {} entries, max value {:.6e}, tail estimate {:.3e}",
            args.dim,
            order,
            args.radius,
            table.len(),
            table.max_value(),
            table.tail_estimate()
        ),
    );
    Ok(())
}

fn cmd_apply(cli: &Cli, args: &ApplyArgs) -> Result<(), Failure> {
    let f = GridFunction::from_json(&read_file(&args.input)?)
        .map_err(|e| usage(format!("{}: {e}", args.input.display())))?;
    let kind = OperatorKind::from(args.op);
    let table = match &args.table {
        Some(path) => Some(
            KernelTable::from_json(&read_file(path)?)
                .map_err(|e| usage(format!("{}: {e}", path.display())))?,
        ),
        None => None,
    };
    let kernel_source = if args.quadrature || table.is_some() || f.dimension() > 1 {
        KernelSourceKind::Quadrature(quad_config(cli)?)
    } else {
        KernelSourceKind::ClosedForm
    };
    let spec = OperatorSpec::new(kind, args.s, f.dimension(), f.mesh(), kernel_source)
        .map_err(|e| usage(format!("--op/--s: {e}")))?;
    if let Some(tol) = args.tail_tol {
        if !(tol > 0.0) {
            return Err(usage("--tail-tol: must be positive"));
        }
    }
    let window = Window {
        radius: args.radius,
        tail_tol: args.tail_tol,
    };
    let applied = match &table {
        Some(t) => operators::apply_with(&f, &spec, &KernelSource::Table(t), &window)?,
        None => operators::apply(&f, &spec, &window)?,
    };
    emit(cli, &render_function(cli, &applied.function))?;
    note(
        cli,
        &format!(
            "window radius {}, tail bound {:.3e}",
            applied.radius, applied.tail_bound
        ),
    );
    if args.spectral {
        let symbol = match kind {
            OperatorKind::Laplacian => SymbolKind::Laplacian,
            OperatorKind::Fractional | OperatorKind::RieszNegative => {
                SymbolKind::Fractional(spec.order.unwrap_or(1.0))
            }
            OperatorKind::LogLaplacian => SymbolKind::Log,
            OperatorKind::RieszZero => {
                return Err(usage(
                    "--spectral: the order-zero Riesz potential has no symbol",
                ))
            }
        };
        let sym = SymbolSpec::new(symbol, f.dimension(), f.mesh())?;
        let spectral = multiplier_apply(&f, &sym, args.grid, applied.radius, f64::INFINITY)?;
        let gap = spectral.function.sup_distance(&applied.function)?;
        note(
            cli,
            &format!(
                "spectral agreement: max gap {gap:.3e}, grid-doubling estimate {:.3e} ({} nodes per axis)",
                spectral.error_estimate, spectral.grid_points
            ),
        );
    }
    Ok(())
}

fn cmd_rho(cli: &Cli, args: &RhoArgs) -> Result<(), Failure> {
    if args.dim == 0 {
        return Err(usage("--dim: must be at least 1"));
    }
    let quad = quad_config(cli)?;
    let rho = corrector_rho(args.dim, &quad)?;
    let direct = if args.cross_check {
        Some(corrector_rho_lattice_sum(args.dim, &quad)?)
    } else {
        None
    };
    let text = match cli.format {
        Format::Json => {
            let mut obj =
                serde_json::json!({ "dimension": args.dim, "rho": rho, "rel_tol": quad.rel_tol });
            if let Some(d) = direct {
                obj["rho_lattice_sum"] = d.into();
                obj["difference"] = (rho - d).abs().into();
            }
            serde_json::to_string_pretty(&obj).expect("plain JSON") + "\n"
        }
        Format::Csv => {
            let mut out = String::from("dimension,path,rho\n");
            out.push_str(&format!("{},reduction,{:.16e}\n", args.dim, rho));
            if let Some(d) = direct {
                out.push_str(&format!("{},lattice-sum,{:.16e}\n", args.dim, d));
            }
            out
        }
    };
    if cli.output.is_some() {
        emit(cli, &text)?;
    }
    println!(
        "rho_{} = {:.12} (quadrature rel_tol {:.0e})",
        args.dim, rho, quad.rel_tol
    );
    if let Some(d) = direct {
        println!(
            "rho_{} (lattice sum) = {:.12}, difference {:.3e}",
            args.dim,
            d,
            (rho - d).abs()
        );
    }
    Ok(())
}

fn cmd_verify(cli: &Cli, args: &VerifyArgs) -> Result<(), Failure> {
    let suite: Suite = args
        .suite
        .parse()
        .map_err(|e: Error| usage(format!("verify: {e}")))?;
    if cli.format == Format::Csv {
        return Err(usage("--format: verification reports are JSON only"));
    }
    let cfg = VerifyConfig {
        quad: quad_config(cli)?,
        seed: args.seed,
        parallel: args.parallel,
        deterministic: args.deterministic,
        ..VerifyConfig::default()
    };
    let report = run_suite(suite, &cfg);
    let path = cli
        .output
        .clone()
        .unwrap_or_else(|| PathBuf::from(format!("fraclap-verify-{}.json", suite.name())));
    fs::write(&path, report.to_json())
        .map_err(|e| usage(format!("cannot write {}: {e}", path.display())))?;
    print!("{}", report.to_text());
    println!("report written to {}", path.display());
    if report.passed {
        Ok(())
    } else {
        Err(Failure::SuiteFailed)
    }
}

fn cmd_spectral(cli: &Cli, args: &SpectralArgs) -> Result<(), Failure> {
    let f = GridFunction::from_json(&read_file(&args.input)?)
        .map_err(|e| usage(format!("{}: {e}", args.input.display())))?;
    let kind = match args.symbol {
        SymbolName::Laplacian => SymbolKind::Laplacian,
        SymbolName::Fractional => SymbolKind::Fractional(
            args.s
                .ok_or_else(|| usage("--s: required for --symbol fractional"))?,
        ),
        SymbolName::Log => SymbolKind::Log,
        SymbolName::Heat => SymbolKind::Heat(
            args.t
                .ok_or_else(|| usage("--t: required for --symbol heat"))?,
        ),
    };
    let spec = SymbolSpec::new(kind, f.dimension(), f.mesh())
        .map_err(|e| usage(format!("--symbol: {e}")))?;
    let out = multiplier_apply(&f, &spec, args.grid, args.radius, args.tol)?;
    emit(cli, &render_function(cli, &out.function))?;
    note(
        cli,
        &format!(
            "multiplier {}: grid-doubling estimate {:.3e} ({} nodes per axis)",
            kind, out.error_estimate, out.grid_points
        ),
    );
    Ok(())
}

fn run(cli: &Cli) -> Result<(), Failure> {
    match &cli.command {
        Command::Kernel(a) => cmd_kernel(cli, a),
        Command::Apply(a) => cmd_apply(cli, a),
        Command::Rho(a) => cmd_rho(cli, a),
        Command::Verify(a) => cmd_verify(cli, a),
        Command::Spectral(a) => cmd_spectral(cli, a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::SuiteFailed) => ExitCode::from(EXIT_SUITE_FAILED),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Numeric(msg)) => {
            eprintln!("numerical failure: {msg}");
            ExitCode::from(EXIT_NUMERIC)
        }
    }
}
