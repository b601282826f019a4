//! Command-line front end: model ingestion, analysis reports, verification
//! runs, enumeration dumps, and phase-diagram grids.

use std::fs;
use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Parser, Subcommand};
use num_traits::{One, Signed};
use rayon::prelude::*;
use serde_json::json;

use orthant_walks::asymptotics::asymptotic_formula;
use orthant_walks::model::{Mode, ModelError, ModelSpec, ResolvedModel};
use orthant_walks::oracle::{
    enumerate, EnumerateOptions, EnumerationTable, OracleError, DEFAULT_BUDGET_BYTES,
};
use orthant_walks::report::{AnalysisReport, ClassifyReport, ReportError, VerifyReport};
use orthant_walks::scalar::Scalar;
use orthant_walks::ser::parse_rational;
use orthant_walks::weighting::WeightingClass;
use orthant_walks::{Int, Rational};

#[derive(Parser)]
#[command(
    name = "orthant-walks",
    version,
    about = "Asymptotics of weighted reflectable walks confined to the orthant"
)]
struct Cli {
    /// Model JSON file; stdin when omitted.
    #[arg(long, global = true)]
    input: Option<PathBuf>,
    /// Destination file; stdout when omitted.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Arithmetic for enumeration-backed commands: exact or float.
    #[arg(long, global = true, value_parser = Mode::from_str)]
    mode: Option<Mode>,
    /// Enumeration budget in bytes.
    #[arg(long, global = true)]
    budget: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the asymptotic analysis report for a model.
    Analyze,
    /// Enumerate counts and compare extrapolated constants with the formula.
    Verify {
        /// Enumeration length (defaults to the model's n_max, then 200).
        #[arg(long)]
        nmax: Option<u32>,
        /// Relative tolerance on the leading constants.
        #[arg(long, default_value_t = 0.05)]
        tol_gamma: f64,
        /// Absolute tolerance on the polynomial exponent.
        #[arg(long, default_value_t = 0.1)]
        tol_exp: f64,
    },
    /// Sweep weight vectors over a grid; CSV of base, exponent, and γ.
    Regions {
        /// Per-axis values separated by ';'. Each axis is either a comma
        /// list of rationals or start:ratio:count (geometric).
        #[arg(long)]
        grid: String,
    },
    /// Dump walk counts as CSV.
    Enumerate {
        /// Enumeration length (defaults to the model's n_max, then 20).
        #[arg(long)]
        nmax: Option<u32>,
        /// One row per endpoint instead of per-length totals.
        #[arg(long)]
        by_endpoint: bool,
    },
    /// Report the weighting classification.
    Classify,
}

enum AppError {
    Usage(String),
    Io(io::Error),
    Model(ModelError),
    Report(ReportError),
}

impl From<io::Error> for AppError {
    fn from(e: io::Error) -> Self {
        AppError::Io(e)
    }
}

impl From<ModelError> for AppError {
    fn from(e: ModelError) -> Self {
        AppError::Model(e)
    }
}

impl From<ReportError> for AppError {
    fn from(e: ReportError) -> Self {
        AppError::Report(e)
    }
}

impl From<OracleError> for AppError {
    fn from(e: OracleError) -> Self {
        AppError::Report(ReportError::Oracle(e))
    }
}

fn model_error_json(e: &ModelError) -> serde_json::Value {
    match e {
        ModelError::Validation(v) => json!({
            "kind": "validation",
            "message": e.to_string(),
            "violations": v.violations.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
        }),
        other => json!({"kind": "validation", "message": other.to_string()}),
    }
}

impl AppError {
    /// Exit code and machine-readable payload.
    fn render(&self) -> (u8, serde_json::Value) {
        match self {
            AppError::Usage(m) => (1, json!({"kind": "usage", "message": m})),
            AppError::Io(e) => (1, json!({"kind": "io", "message": e.to_string()})),
            AppError::Model(e) => (1, model_error_json(e)),
            AppError::Report(ReportError::Model(e)) => (1, model_error_json(e)),
            AppError::Report(ReportError::Oracle(OracleError::BudgetExceeded {
                required_bytes,
                budget_bytes,
            })) => (
                2,
                json!({
                    "kind": "budget",
                    "message": format!(
                        "enumeration needs {required_bytes} bytes, budget is {budget_bytes}"
                    ),
                    "required_bytes": required_bytes,
                    "budget_bytes": budget_bytes,
                }),
            ),
            AppError::Report(e) => (1, json!({"kind": "analysis", "message": e.to_string()})),
        }
    }
}

fn read_input(path: &Option<PathBuf>) -> Result<String, AppError> {
    match path {
        Some(p) => Ok(fs::read_to_string(p)?),
        None => {
            let mut buf = String::new();
            io::stdin().read_to_string(&mut buf)?;
            Ok(buf)
        }
    }
}

fn open_output(path: &Option<PathBuf>) -> io::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(fs::File::create(p)?),
        None => Box::new(io::stdout().lock()),
    })
}

fn load_model(cli: &Cli) -> Result<ResolvedModel, AppError> {
    let text = read_input(&cli.input)?;
    let spec = ModelSpec::from_json(&text)?;
    Ok(spec.resolve()?)
}

struct RunParams {
    n_max: u32,
    mode: Mode,
    budget: u64,
}

fn run_params(cli: &Cli, model: &ResolvedModel, default_n: u32, default_mode: Mode) -> RunParams {
    RunParams {
        n_max: model.options.n_max.unwrap_or(default_n),
        mode: cli.mode.or(model.options.mode).unwrap_or(default_mode),
        budget: cli
            .budget
            .or(model.options.budget)
            .unwrap_or(DEFAULT_BUDGET_BYTES),
    }
}

fn cmd_analyze(cli: &Cli, out: &mut dyn Write) -> Result<(), AppError> {
    let model = load_model(cli)?;
    let report = AnalysisReport::build(&model)?;
    writeln!(out, "{}", serde_json::to_string_pretty(&report).unwrap())?;
    Ok(())
}

fn cmd_verify(
    cli: &Cli,
    out: &mut dyn Write,
    nmax: Option<u32>,
    tol_gamma: f64,
    tol_exp: f64,
) -> Result<(), AppError> {
    let model = load_model(cli)?;
    let mut params = run_params(cli, &model, 200, Mode::Float);
    if let Some(n) = nmax {
        params.n_max = n;
    }
    let report = VerifyReport::run(
        &model,
        params.n_max,
        params.mode,
        params.budget,
        tol_gamma,
        tol_exp,
    )?;
    writeln!(out, "{}", serde_json::to_string_pretty(&report).unwrap())?;
    Ok(())
}

fn cmd_classify(cli: &Cli, out: &mut dyn Write) -> Result<(), AppError> {
    let model = load_model(cli)?;
    let report = ClassifyReport::build(&model);
    writeln!(out, "{}", serde_json::to_string_pretty(&report).unwrap())?;
    Ok(())
}

fn axis_name(i: usize) -> String {
    // a, b, ..., z, then x10, x11, ...
    if i < 26 {
        char::from(b'a' + i as u8).to_string()
    } else {
        format!("x{i}")
    }
}

fn parse_grid(grid: &str, dimension: usize) -> Result<Vec<Vec<Rational>>, AppError> {
    let segments: Vec<&str> = grid.split(';').collect();
    if segments.len() != dimension {
        return Err(AppError::Usage(format!(
            "grid has {} axes but the model is {dimension}-dimensional",
            segments.len()
        )));
    }
    let bad = |m: String| AppError::Usage(m);
    let mut axes = Vec::with_capacity(dimension);
    for seg in segments {
        let values = if seg.contains(':') {
            let parts: Vec<&str> = seg.split(':').collect();
            if parts.len() != 3 {
                return Err(bad(format!("axis {seg:?} is not start:ratio:count")));
            }
            let start = parse_rational(parts[0]).map_err(&bad)?;
            let ratio = parse_rational(parts[1]).map_err(&bad)?;
            let count: usize = parts[2]
                .trim()
                .parse()
                .map_err(|e| bad(format!("bad count in {seg:?}: {e}")))?;
            if count == 0 {
                return Err(bad(format!("axis {seg:?} has zero points")));
            }
            let mut v = Vec::with_capacity(count);
            let mut cur = start;
            for _ in 0..count {
                v.push(cur.clone());
                cur *= &ratio;
            }
            v
        } else {
            seg.split(',')
                .map(|s| parse_rational(s).map_err(&bad))
                .collect::<Result<Vec<_>, _>>()?
        };
        if values.iter().any(|v| !v.is_positive()) {
            return Err(bad(format!("axis {seg:?} has non-positive values")));
        }
        axes.push(values);
    }
    Ok(axes)
}

fn cartesian(axes: &[Vec<Rational>]) -> Vec<Vec<Rational>> {
    let mut rows: Vec<Vec<Rational>> = vec![Vec::new()];
    for axis in axes {
        let mut next = Vec::with_capacity(rows.len() * axis.len());
        for row in &rows {
            for v in axis {
                let mut r = row.clone();
                r.push(v.clone());
                next.push(r);
            }
        }
        rows = next;
    }
    rows
}

fn cmd_regions(cli: &Cli, out: &mut dyn Write, grid: &str) -> Result<(), AppError> {
    let model = load_model(cli)?;
    let axes = parse_grid(grid, model.set.dimension())?;
    let points = cartesian(&axes);
    // Grid alphas replace the model's central weights; a symmetric part, if
    // present, is kept.
    let omega = match &model.class {
        WeightingClass::Symmetric(s) => Some(s.clone()),
        WeightingClass::Factored { omega, .. } => Some(omega.clone()),
        _ => None,
    };
    let one = Rational::one();
    let results: Vec<(Vec<Rational>, Result<_, String>)> = points
        .par_iter()
        .map(|alpha| {
            let r = asymptotic_formula(&model.set, omega.as_ref(), alpha, &one)
                .map(|f| (f.base.clone(), f.exponent.clone(), f.gamma_even))
                .map_err(|e| e.to_string());
            (alpha.clone(), r)
        })
        .collect();

    let mut w = csv::Writer::from_writer(out);
    let mut header: Vec<String> = (0..model.set.dimension()).map(axis_name).collect();
    header.extend(["base", "exponent", "gamma_even"].map(String::from));
    w.write_record(&header).map_err(io_from_csv)?;
    for (alpha, res) in results {
        let mut record: Vec<String> = alpha.iter().map(|a| a.to_string()).collect();
        match res {
            Ok((base, exponent, gamma)) => {
                record.push(base.to_string());
                record.push(exponent.to_string());
                record.push(format_float(gamma));
            }
            Err(_) => {
                record.extend(["", "", ""].map(String::from));
            }
        }
        w.write_record(&record).map_err(io_from_csv)?;
    }
    w.flush()?;
    Ok(())
}

fn io_from_csv(e: csv::Error) -> AppError {
    AppError::Io(io::Error::other(e))
}

fn format_float(v: f64) -> String {
    let mut buf = Vec::new();
    serde_json::to_writer(&mut buf, &v).unwrap();
    String::from_utf8(buf).unwrap()
}

fn format_point(coords: &[u32]) -> String {
    let inner: Vec<String> = coords.iter().map(|c| c.to_string()).collect();
    format!("({})", inner.join(","))
}

fn write_count_rows<T: Scalar, F: Fn(&T) -> String>(
    out: &mut dyn Write,
    table: &EnumerationTable<T>,
    by_endpoint: bool,
    fmt: F,
) -> Result<(), AppError> {
    let mut w = csv::Writer::from_writer(out);
    if by_endpoint {
        w.write_record(["n", "point", "count"]).map_err(io_from_csv)?;
        for n in 0..=table.n_max() {
            let layer = table.layer(n).expect("layers kept for endpoint dumps");
            for (pos, count) in layer {
                w.write_record([n.to_string(), format_point(pos), fmt(count)])
                    .map_err(io_from_csv)?;
            }
        }
    } else {
        w.write_record(["n", "count"]).map_err(io_from_csv)?;
        for n in 0..=table.n_max() {
            w.write_record([n.to_string(), fmt(table.total(n))])
                .map_err(io_from_csv)?;
        }
    }
    w.flush()?;
    Ok(())
}

fn cmd_enumerate(
    cli: &Cli,
    out: &mut dyn Write,
    nmax: Option<u32>,
    by_endpoint: bool,
) -> Result<(), AppError> {
    let model = load_model(cli)?;
    let mut params = run_params(cli, &model, 20, Mode::Exact);
    if let Some(n) = nmax {
        params.n_max = n;
    }
    let opts = EnumerateOptions {
        keep_layers: by_endpoint,
        budget_bytes: params.budget,
        confined: true,
    };
    let uniform = model.weights.iter().all(|(_, w)| w.is_one());
    match params.mode {
        Mode::Exact if uniform => {
            let table = enumerate::<Int>(&model.set, None, params.n_max, &opts)?;
            write_count_rows(out, &table, by_endpoint, |v| v.to_string())
        }
        Mode::Exact => {
            let table =
                enumerate::<Rational>(&model.set, Some(&model.weights), params.n_max, &opts)?;
            write_count_rows(out, &table, by_endpoint, |v| v.to_string())
        }
        Mode::Float => {
            let weights = (!uniform).then_some(&model.weights);
            let table = enumerate::<f64>(&model.set, weights, params.n_max, &opts)?;
            // Rescaling offsets are folded back in; counts beyond the f64
            // range print as inf.
            let restore = |v: f64, n: u32| {
                let off = table.log_offset(n);
                if off == 0.0 {
                    v
                } else {
                    (v.ln() + off).exp()
                }
            };
            let mut w = csv::Writer::from_writer(out);
            if by_endpoint {
                w.write_record(["n", "point", "count"]).map_err(io_from_csv)?;
                for n in 0..=table.n_max() {
                    let layer = table.layer(n).expect("layers kept for endpoint dumps");
                    for (pos, count) in layer {
                        w.write_record([
                            n.to_string(),
                            format_point(pos),
                            format_float(restore(*count, n)),
                        ])
                        .map_err(io_from_csv)?;
                    }
                }
            } else {
                w.write_record(["n", "count"]).map_err(io_from_csv)?;
                for n in 0..=table.n_max() {
                    w.write_record([n.to_string(), format_float(restore(*table.total(n), n))])
                        .map_err(io_from_csv)?;
                }
            }
            w.flush()?;
            Ok(())
        }
    }
}

fn run(cli: &Cli, out: &mut dyn Write) -> Result<(), AppError> {
    match &cli.command {
        Command::Analyze => cmd_analyze(cli, out),
        Command::Verify {
            nmax,
            tol_gamma,
            tol_exp,
        } => cmd_verify(cli, out, *nmax, *tol_gamma, *tol_exp),
        Command::Regions { grid } => cmd_regions(cli, out, grid),
        Command::Enumerate { nmax, by_endpoint } => cmd_enumerate(cli, out, *nmax, *by_endpoint),
        Command::Classify => cmd_classify(cli, out),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if e.use_stderr() => {
            let _ = e.print();
            return ExitCode::from(1);
        }
        Err(e) => {
            // --help and --version land here.
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
    };
    let mut out: Box<dyn Write> = match open_output(&cli.output) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("cannot open output: {e}");
            return ExitCode::from(1);
        }
    };
    match run(&cli, out.as_mut()) {
        Ok(()) => {
            let _ = out.flush();
            ExitCode::SUCCESS
        }
        Err(e) => {
            let (code, payload) = e.render();
            let _ = writeln!(
                out,
                "{}",
                serde_json::to_string_pretty(&json!({ "error": payload })).unwrap()
            );
            let _ = out.flush();
            ExitCode::from(code)
        }
    }
}
