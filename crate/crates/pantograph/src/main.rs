//! Command-line front end: `eval`, `table`, `solve` and `stability`
//! subcommands with CSV or JSON output.
//!
//! Exit codes are a stable contract:
//! 0 success, 1 usage/parse error, 2 domain error, 3 truncation or
//! non-convergence, 4 rectangle escape.
//!
//! All floating-point output uses 17 significant digits so every row
//! round-trips losslessly back to the same f64. A `--config file` with flat
//! `key=value` lines supplies defaults for any flag not given explicitly.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use pantograph::djm::{self, DelayRhs};
use pantograph::error::Error;
use pantograph::expr;
use pantograph::fractional::{self, FractionalOrder};
use pantograph::rk4;
use pantograph::series;
use pantograph::spec::DelaySpec;
use pantograph::stability::{self, Window};

#[derive(Parser)]
#[command(
    name = "pantograph",
    about = "Evaluate, solve and analyze differential equations with multiple proportional delays",
    version,
    disable_help_subcommand = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the series solution at a point (fractional order with --alpha)
    Eval(EvalArgs),
    /// Tabulate the series with its exponential sandwich bounds over a range
    Table(TableArgs),
    /// Solve on a grid by successive approximation (djm) or marching rk4
    Solve(SolveArgs),
    /// Locate characteristic roots at a freeze point and report the verdict
    Stability(StabilityArgs),
}

#[derive(Args, Default)]
struct CommonArgs {
    /// Coefficients a0,a1,...  (comma-separated)
    #[arg(long, allow_hyphen_values = true)]
    a: Option<String>,
    /// Delay ratios q0,q1,...  (q0 = 1, 0 < qi < 1)
    #[arg(long)]
    q: Option<String>,
    /// Output format: csv or json
    #[arg(long)]
    format: Option<String>,
    /// Flat key=value file supplying defaults for missing flags
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args, Default)]
struct EvalArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Evaluation point
    #[arg(long, allow_hyphen_values = true)]
    x: Option<String>,
    /// Caputo order; switches to the fractional series
    #[arg(long)]
    alpha: Option<String>,
    /// Tail-bound tolerance (default 1e-12)
    #[arg(long)]
    tol: Option<String>,
}

#[derive(Args, Default)]
struct TableArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Range start
    #[arg(long, allow_hyphen_values = true)]
    x0: Option<String>,
    /// Range end
    #[arg(long, allow_hyphen_values = true)]
    x1: Option<String>,
    /// Number of intervals (steps+1 rows)
    #[arg(long)]
    steps: Option<String>,
    /// Caputo order; tabulates the fractional series with E_alpha bounds
    #[arg(long)]
    alpha: Option<String>,
    /// Tail-bound tolerance (default 1e-12)
    #[arg(long)]
    tol: Option<String>,
}

#[derive(Args, Default)]
struct SolveArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Right-hand side expression over x, y0..yn (linear a,q used if absent)
    #[arg(long)]
    rhs: Option<String>,
    /// Lipschitz constants L0,L1,... (required with --rhs)
    #[arg(long)]
    lipschitz: Option<String>,
    /// Bound on |f| over the rectangle (estimated if absent)
    #[arg(long = "bound-m")]
    bound_m: Option<String>,
    /// Rectangle half-widths d0,d1,... (default 1e6 each)
    #[arg(long)]
    delta: Option<String>,
    /// Interval end b
    #[arg(long)]
    b: Option<String>,
    /// Grid intervals N (default 256)
    #[arg(long = "N", visible_alias = "n")]
    n: Option<String>,
    /// Engine: djm or rk4 (default djm)
    #[arg(long)]
    engine: Option<String>,
    /// Run both engines and emit x,y_djm,y_rk4,abs_diff
    #[arg(long)]
    compare: bool,
    /// Iteration tolerance for djm (default 1e-10)
    #[arg(long)]
    tol: Option<String>,
    /// Sweep budget for djm (default 64)
    #[arg(long = "max-iter")]
    max_iter: Option<String>,
    /// Initial value y(0) (default 1)
    #[arg(long, allow_hyphen_values = true)]
    y0: Option<String>,
}

#[derive(Args, Default)]
struct StabilityArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Freeze point x0 for the delays
    #[arg(long)]
    x0: Option<String>,
    /// Window left edge (default -5)
    #[arg(long = "re-min", allow_hyphen_values = true)]
    re_min: Option<String>,
    /// Window right edge (default max(2, sum|a|+1))
    #[arg(long = "re-max", allow_hyphen_values = true)]
    re_max: Option<String>,
    /// Window |Im| extent (default max(40, sum|a|+1))
    #[arg(long = "im-max")]
    im_max: Option<String>,
    /// Newton start lattice size per axis (default 48)
    #[arg(long)]
    grid: Option<String>,
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: 1,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::Parse { .. } => 1,
            Error::Domain(_) | Error::Range { .. } | Error::Blowup { .. } => 2,
            Error::Truncation { .. } | Error::NonConvergence { .. } => 3,
            Error::RectangleEscape { .. } => 4,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // help/version are not failures
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            eprint!("{e}");
            return ExitCode::from(1);
        }
    };
    let result = match cli.command {
        Command::Eval(args) => cmd_eval(args),
        Command::Table(args) => cmd_table(args),
        Command::Solve(args) => cmd_solve(args),
        Command::Stability(args) => cmd_stability(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

// ---------------------------------------------------------------- config

type Config = HashMap<String, String>;

fn load_config(path: &Option<PathBuf>) -> Result<Config, Failure> {
    let mut map = HashMap::new();
    let Some(path) = path else {
        return Ok(map);
    };
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::usage(format!("cannot read config {}: {e}", path.display())))?;
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(Failure::usage(format!(
                "config {} line {}: expected key=value, got `{line}`",
                path.display(),
                lineno + 1
            )));
        };
        map.insert(key.trim().to_string(), value.trim().to_string());
    }
    Ok(map)
}

/// Flag value if given, else the config entry under `key`.
fn merged(flag: &Option<String>, config: &Config, key: &str) -> Option<String> {
    flag.clone().or_else(|| config.get(key).cloned())
}

// ---------------------------------------------------------------- parsing

fn parse_f64(name: &str, text: &str) -> Result<f64, Failure> {
    text.trim()
        .parse::<f64>()
        .map_err(|_| Failure::usage(format!("--{name}: `{}` is not a number", text.trim())))
}

fn parse_usize(name: &str, text: &str) -> Result<usize, Failure> {
    text.trim().parse::<usize>().map_err(|_| {
        Failure::usage(format!(
            "--{name}: `{}` is not a nonnegative integer",
            text.trim()
        ))
    })
}

fn parse_list(name: &str, text: &str) -> Result<Vec<f64>, Failure> {
    let mut out = Vec::new();
    for token in text.split(',') {
        let token = token.trim();
        out.push(
            token
                .parse::<f64>()
                .map_err(|_| Failure::usage(format!("--{name}: `{token}` is not a number")))?,
        );
    }
    Ok(out)
}

fn require(name: &str, value: Option<String>) -> Result<String, Failure> {
    value.ok_or_else(|| Failure::usage(format!("missing required flag --{name}")))
}

fn parse_spec(common: &CommonArgs, config: &Config) -> Result<DelaySpec, Failure> {
    let a = parse_list("a", &require("a", merged(&common.a, config, "a"))?)?;
    let q = parse_list("q", &require("q", merged(&common.q, config, "q"))?)?;
    Ok(DelaySpec::new(a, q)?)
}

#[derive(Clone, Copy, PartialEq)]
enum Format {
    Csv,
    Json,
}

fn parse_format(common: &CommonArgs, config: &Config) -> Result<Format, Failure> {
    match merged(&common.format, config, "format").as_deref() {
        None | Some("csv") => Ok(Format::Csv),
        Some("json") => Ok(Format::Json),
        Some(other) => Err(Failure::usage(format!(
            "--format: `{other}` is not one of csv, json"
        ))),
    }
}

// ---------------------------------------------------------------- output

/// 17 significant digits: enough for a lossless f64 round-trip.
fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn json_number(v: f64) -> String {
    if v.is_finite() {
        fmt_f64(v)
    } else {
        "null".to_string()
    }
}

struct Row<'a> {
    fields: Vec<(&'a str, Option<f64>)>,
}

impl<'a> Row<'a> {
    fn csv(&self) -> String {
        self.fields
            .iter()
            .map(|(_, v)| v.map(fmt_f64).unwrap_or_default())
            .collect::<Vec<_>>()
            .join(",")
    }

    fn csv_header(&self) -> String {
        self.fields
            .iter()
            .map(|(k, _)| *k)
            .collect::<Vec<_>>()
            .join(",")
    }

    fn json(&self) -> String {
        let mut s = String::from("{");
        for (i, (k, v)) in self.fields.iter().enumerate() {
            if i > 0 {
                s.push(',');
            }
            let _ = write!(
                s,
                "\"{k}\":{}",
                v.map(json_number).unwrap_or_else(|| "null".into())
            );
        }
        s.push('}');
        s
    }
}

fn emit_rows(format: Format, rows: &[Row]) {
    if rows.is_empty() {
        return;
    }
    match format {
        Format::Csv => {
            println!("{}", rows[0].csv_header());
            for row in rows {
                println!("{}", row.csv());
            }
        }
        Format::Json => {
            for row in rows {
                println!("{}", row.json());
            }
        }
    }
}

// ---------------------------------------------------------------- eval

fn eval_point(
    spec: &DelaySpec,
    alpha: Option<FractionalOrder>,
    x: f64,
    tol: f64,
) -> Result<series::SeriesValue, Error> {
    match alpha {
        Some(order) => fractional::eval_frac(spec, order, x, tol),
        None => series::eval(spec, x, tol),
    }
}

fn parse_alpha(raw: Option<String>) -> Result<Option<FractionalOrder>, Failure> {
    match raw {
        None => Ok(None),
        Some(text) => {
            let v = parse_f64("alpha", &text)?;
            Ok(Some(FractionalOrder::new(v)?))
        }
    }
}

fn cmd_eval(args: EvalArgs) -> Result<(), Failure> {
    let config = load_config(&args.common.config)?;
    let format = parse_format(&args.common, &config)?;
    let spec = parse_spec(&args.common, &config)?;
    let x = parse_f64("x", &require("x", merged(&args.x, &config, "x"))?)?;
    let tol = match merged(&args.tol, &config, "tol") {
        Some(t) => parse_f64("tol", &t)?,
        None => 1e-12,
    };
    let alpha = parse_alpha(merged(&args.alpha, &config, "alpha"))?;

    let value = eval_point(&spec, alpha, x, tol)?;
    let row = Row {
        fields: vec![
            ("x", Some(x)),
            ("value", Some(value.value)),
            ("terms_used", Some(value.terms_used as f64)),
            ("tail_bound", Some(value.tail_bound)),
        ],
    };
    emit_rows(format, &[row]);
    Ok(())
}

// ---------------------------------------------------------------- table

fn cmd_table(args: TableArgs) -> Result<(), Failure> {
    let config = load_config(&args.common.config)?;
    let format = parse_format(&args.common, &config)?;
    let spec = parse_spec(&args.common, &config)?;
    let x0 = parse_f64("x0", &require("x0", merged(&args.x0, &config, "x0"))?)?;
    let x1 = parse_f64("x1", &require("x1", merged(&args.x1, &config, "x1"))?)?;
    let steps = parse_usize(
        "steps",
        &require("steps", merged(&args.steps, &config, "steps"))?,
    )?;
    if steps < 1 {
        return Err(Failure::usage("--steps: must be at least 1"));
    }
    let tol = match merged(&args.tol, &config, "tol") {
        Some(t) => parse_f64("tol", &t)?,
        None => 1e-12,
    };
    let alpha = parse_alpha(merged(&args.alpha, &config, "alpha"))?;

    let nonnegative = spec.coefficients().iter().all(|&ai| ai >= 0.0);
    let mut rows = Vec::with_capacity(steps + 1);
    for j in 0..=steps {
        let x = x0 + (x1 - x0) * j as f64 / steps as f64;
        let value = eval_point(&spec, alpha, x, tol)?;
        let bounds = if nonnegative && x >= 0.0 {
            match alpha {
                None => {
                    let (lo, hi) = series::sandwich_bounds(&spec, x)?;
                    Some((lo, hi))
                }
                Some(order) => {
                    let xa = x.powf(order.value());
                    let lo = fractional::mittag_leffler(order, spec.coefficients()[0] * xa, tol)?;
                    let hi = fractional::mittag_leffler(order, spec.coeff_sum() * xa, tol)?;
                    Some((lo.value, hi.value))
                }
            }
        } else {
            None
        };
        rows.push(Row {
            fields: vec![
                ("x", Some(x)),
                ("R", Some(value.value)),
                ("lower_bound", bounds.map(|b| b.0)),
                ("upper_bound", bounds.map(|b| b.1)),
            ],
        });
    }
    emit_rows(format, &rows);
    Ok(())
}

// ---------------------------------------------------------------- solve

fn build_rhs(
    args: &SolveArgs,
    config: &Config,
    spec_b: f64,
) -> Result<(DelayRhs, Option<DelaySpec>), Failure> {
    let common = &args.common;
    let q = parse_list("q", &require("q", merged(&common.q, config, "q"))?)?;

    if let Some(src) = merged(&args.rhs, config, "rhs") {
        let compiled = expr::parse(&src)?;
        if let Some(max_y) = compiled.max_y_index() {
            if max_y >= q.len() {
                return Err(Failure::usage(format!(
                    "--rhs mentions y{max_y} but --q provides only {} ratios",
                    q.len()
                )));
            }
        }
        let lipschitz = parse_list(
            "lipschitz",
            &merged(&args.lipschitz, config, "lipschitz").ok_or_else(|| {
                Failure::usage("missing required flag --lipschitz (needed with --rhs)")
            })?,
        )?;
        let delta = match merged(&args.delta, config, "delta") {
            Some(d) => parse_list("delta", &d)?,
            None => vec![1e6; q.len()],
        };
        let bound_m = match merged(&args.bound_m, config, "bound-m") {
            Some(m) => parse_f64("bound-m", &m)?,
            None => estimate_bound(&compiled, &delta, spec_b),
        };
        let f: djm::Rhs = Box::new(move |x, ys| compiled.eval(x, ys));
        Ok((
            DelayRhs::new(q, f, lipschitz, bound_m, spec_b, delta)?,
            None,
        ))
    } else {
        let a = parse_list("a", &require("a", merged(&common.a, config, "a"))?)?;
        let spec = DelaySpec::new(a, q)?;
        Ok((DelayRhs::linear(&spec, spec_b)?, Some(spec)))
    }
}

/// Crude |f| estimate over the rectangle: sample the corners and a few x
/// values. Only used when --bound-m is absent; the certificate then
/// inherits the estimate's quality.
fn estimate_bound(e: &expr::Expr, delta: &[f64], b: f64) -> f64 {
    let mut worst = 0.0f64;
    let corners = 1usize << delta.len().min(12);
    let mut ys = vec![0.0; delta.len()];
    for c in 0..corners {
        for (i, slot) in ys.iter_mut().enumerate() {
            *slot = if c >> i & 1 == 1 { delta[i] } else { -delta[i] };
        }
        for s in 0..=8 {
            let x = b * s as f64 / 8.0;
            let v = e.eval(x, &ys).abs();
            if v.is_finite() {
                worst = worst.max(v);
            }
        }
    }
    worst
}

fn cmd_solve(args: SolveArgs) -> Result<(), Failure> {
    let config = load_config(&args.common.config)?;
    let format = parse_format(&args.common, &config)?;
    let b = parse_f64("b", &require("b", merged(&args.b, &config, "b"))?)?;
    let n = match merged(&args.n, &config, "N") {
        Some(t) => parse_usize("N", &t)?,
        None => 256,
    };
    let tol = match merged(&args.tol, &config, "tol") {
        Some(t) => parse_f64("tol", &t)?,
        None => 1e-10,
    };
    let max_iter = match merged(&args.max_iter, &config, "max-iter") {
        Some(t) => parse_usize("max-iter", &t)?,
        None => 64,
    };
    let y0 = match merged(&args.y0, &config, "y0") {
        Some(t) => parse_f64("y0", &t)?,
        None => 1.0,
    };
    let engine = merged(&args.engine, &config, "engine").unwrap_or_else(|| "djm".into());
    if !matches!(engine.as_str(), "djm" | "rk4") {
        return Err(Failure::usage(format!(
            "--engine: `{engine}` is not one of djm, rk4"
        )));
    }

    let (rhs, linear_spec) = build_rhs(&args, &config, b)?;

    let rk4_solution = |spec: &DelaySpec| -> Result<Vec<f64>, Failure> {
        let sol = rk4::integrate(spec, b, b / n as f64)?;
        Ok(sol.values().to_vec())
    };

    if args.compare {
        let spec = linear_spec.as_ref().ok_or_else(|| {
            Failure::usage(
                "--compare needs a linear spec (the rk4 engine solves a,q problems only)",
            )
        })?;
        if y0 != 1.0 {
            return Err(Failure::usage(
                "--compare solves the normalized problem; --y0 must be 1",
            ));
        }
        let djm_sol = djm::djm_iterate(&rhs, y0, n, max_iter, tol)?;
        let rk4_vals = rk4_solution(spec)?;
        let mut rows = Vec::with_capacity(n + 1);
        for (k, (&yd, &yr)) in djm_sol.values().iter().zip(&rk4_vals).enumerate() {
            let x = djm_sol.node_x(k);
            rows.push(Row {
                fields: vec![
                    ("x", Some(x)),
                    ("y_djm", Some(yd)),
                    ("y_rk4", Some(yr)),
                    ("abs_diff", Some((yd - yr).abs())),
                ],
            });
        }
        emit_rows(format, &rows);
        return Ok(());
    }

    let values: Vec<f64> = match engine.as_str() {
        "djm" => djm::djm_iterate(&rhs, y0, n, max_iter, tol)?
            .values()
            .to_vec(),
        _ => {
            let spec = linear_spec.as_ref().ok_or_else(|| {
                Failure::usage("--engine rk4 needs a linear spec (use --a/--q, not --rhs)")
            })?;
            if y0 != 1.0 {
                return Err(Failure::usage(
                    "--engine rk4 solves the normalized problem; --y0 must be 1",
                ));
            }
            rk4_solution(spec)?
        }
    };
    let mut rows = Vec::with_capacity(n + 1);
    for (k, &y) in values.iter().enumerate() {
        rows.push(Row {
            fields: vec![("x", Some(b * k as f64 / n as f64)), ("y", Some(y))],
        });
    }
    emit_rows(format, &rows);
    Ok(())
}

// ---------------------------------------------------------------- stability

fn cmd_stability(args: StabilityArgs) -> Result<(), Failure> {
    let config = load_config(&args.common.config)?;
    let spec = parse_spec(&args.common, &config)?;
    let x0 = parse_f64("x0", &require("x0", merged(&args.x0, &config, "x0"))?)?;
    let frozen = stability::FrozenDelays::from_spec(&spec, x0)?;

    let a1 = frozen.coeff_abs_sum();
    let window = Window {
        re_min: match merged(&args.re_min, &config, "re-min") {
            Some(t) => parse_f64("re-min", &t)?,
            None => -5.0,
        },
        re_max: match merged(&args.re_max, &config, "re-max") {
            Some(t) => parse_f64("re-max", &t)?,
            None => (a1 + 1.0).max(2.0),
        },
        im_max: match merged(&args.im_max, &config, "im-max") {
            Some(t) => parse_f64("im-max", &t)?,
            None => (a1 + 1.0).max(40.0),
        },
    };
    let grid = match merged(&args.grid, &config, "grid") {
        Some(t) => parse_usize("grid", &t)?,
        None => 48,
    };

    let report = stability::find_roots(&frozen, window, grid)?;

    // report object: always JSON (the machine-readable verdict)
    let mut out = String::from("{\"roots\":[");
    for (i, r) in report.roots.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        let _ = write!(
            out,
            "{{\"re\":{},\"im\":{}}}",
            json_number(r.re),
            json_number(r.im)
        );
    }
    let _ = write!(
        out,
        "],\"max_real_part\":{},\"verdict\":\"{}\",\"window\":{{\"re_min\":{},\"re_max\":{},\"im_max\":{}}},\"certified_count\":{}}}",
        json_number(report.max_real_part),
        report.verdict.as_str(),
        json_number(window.re_min),
        json_number(window.re_max),
        json_number(window.im_max),
        report
            .certified_count
            .map(|c| c.to_string())
            .unwrap_or_else(|| "null".into()),
    );
    println!("{out}");
    Ok(())
}
