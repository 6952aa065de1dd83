use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use ncrat_core::algebra::Mat;
use ncrat_core::decide::{equivalent, is_zero, Policy, Verdict};
use ncrat_core::diffcalc::{
    delta, delta_numeric, delta_symbolic_value, directional_derivative, hessian, hessian_symbolic, left_shift, right_shift,
};
use ncrat_core::eval::{evaluate, evaluate_multi, EvalPoint};
use ncrat_core::expr::{format, format_nce, parse_nce, RatExpr};
use ncrat_core::realize::{minimize, pencil_domain_check, realize, transfer_expr, FmRealization};
use ncrat_core::selftest::{run_criterion, TITLES};
use ncrat_core::series::expand;
use ncrat_core::Error;
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "ncrat", version, about = "Exact computations with noncommutative rational functions over Q")]
struct Cli {
    #[command(flatten)]
    opts: Opts,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct Opts {
    /// Seed for every sampling step.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Points sampled per matrix size.
    #[arg(long, global = true, default_value_t = 40)]
    samples: usize,
    /// Largest matrix size sampled.
    #[arg(long, global = true, default_value_t = 3)]
    max_size: usize,
    /// Truncation order for power series.
    #[arg(long, global = true, default_value_t = 6)]
    order: usize,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Write the result here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Clone, Copy, ValueEnum)]
enum Side {
    Left,
    Right,
}

#[derive(Subcommand)]
enum Cmd {
    /// Parse an expression file and print it back.
    Parse {
        #[arg(long)]
        expr: PathBuf,
    },
    /// Evaluate at a point (a JSON list of matrices) or, with --multi, at a list of points.
    Eval {
        #[arg(long)]
        expr: PathBuf,
        #[arg(long)]
        point: PathBuf,
        #[arg(long)]
        multi: bool,
    },
    /// Power series coefficients up to --order, keyed by word.
    Series {
        #[arg(long)]
        expr: PathBuf,
    },
    /// Realization of an expression file.
    Realize {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Minimal realization of a realization file.
    Minimize {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Expression file for a realization file.
    Transfer {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Decide whether two expressions define the same function.
    Equiv {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
    },
    /// Decide whether an expression is the zero function.
    Zero {
        #[arg(long)]
        expr: PathBuf,
    },
    /// The difference operator in one letter, symbolic or evaluated.
    Diff {
        #[arg(long)]
        expr: PathBuf,
        #[arg(long)]
        letter: usize,
        /// Print the symbolic expression (the default without points).
        #[arg(long, conflicts_with = "numeric")]
        symbolic: bool,
        /// Evaluate through block upper triangular points.
        #[arg(long)]
        numeric: bool,
        #[arg(long = "Z", requires_all = ["zp", "w"])]
        z: Option<PathBuf>,
        #[arg(long = "Zp")]
        zp: Option<PathBuf>,
        /// A single matrix: the direction for the chosen letter.
        #[arg(long = "W")]
        w: Option<PathBuf>,
    },
    /// Backward shift in one letter.
    Shift {
        #[arg(long)]
        expr: PathBuf,
        #[arg(long, value_enum)]
        side: Side,
        #[arg(long)]
        letter: usize,
    },
    /// Directional derivative at Z along W (a JSON list, one matrix per letter).
    Dderiv {
        #[arg(long)]
        expr: PathBuf,
        #[arg(long = "Z")]
        z: PathBuf,
        #[arg(long = "W")]
        w: PathBuf,
    },
    /// Second derivative at Z along W.
    Hessian {
        #[arg(long)]
        expr: PathBuf,
        #[arg(long = "Z")]
        z: PathBuf,
        #[arg(long = "W")]
        w: PathBuf,
        /// Use the symbolic second differences instead of one block evaluation.
        #[arg(long)]
        symbolic: bool,
    },
    /// Whether the pencil of a realization is invertible at a point.
    DomainCheck {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        point: PathBuf,
    },
    /// Run the acceptance suite.
    Selftest {
        /// Run only this criterion.
        #[arg(long)]
        only: Option<usize>,
    },
}

/// What a command produced: a JSON value, its text rendering and an exit code.
struct Output {
    json: Value,
    text: String,
    code: u8,
}

impl Output {
    fn ok(json: Value, text: String) -> Self {
        Output { json, text, code: 0 }
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn read_expr(path: &Path) -> Result<RatExpr> {
    let text = read(path)?;
    let (_, e) = parse_nce(&text).with_context(|| format!("parsing {}", path.display()))?;
    Ok(e)
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    serde_json::from_str(&read(path)?).with_context(|| format!("decoding {}", path.display()))
}

fn mat_text(m: &Mat) -> String {
    let cells: Vec<Vec<String>> = (0..m.rows()).map(|i| (0..m.cols()).map(|j| m.get(i, j).to_string()).collect()).collect();
    let width = cells.iter().flatten().map(String::len).max().unwrap_or(0);
    cells.iter().map(|row| row.iter().map(|c| format!("{c:>width$}")).collect::<Vec<_>>().join("  ")).collect::<Vec<_>>().join("\n")
}

fn mat_output(m: &Mat) -> Output {
    Output::ok(json!(m), mat_text(m))
}

fn verdict_output(v: &Verdict) -> Output {
    let json = serde_json::to_value(v).expect("verdicts serialize");
    let mut text = v.name().to_string();
    if let Value::Object(fields) = &json {
        for (k, val) in fields.iter().filter(|(k, _)| *k != "verdict") {
            text.push_str(&format!("\n  {k}: {val}"));
        }
    }
    Output { json, text, code: if v.is_exact() { 0 } else { 2 } }
}

fn expr_output(e: &RatExpr) -> Output {
    let text = format(e);
    Output::ok(json!({ "d": e.d(), "arity": e.arity(), "rows": e.rows(), "cols": e.cols(), "expr": text }), text)
}

fn realization_output(r: &FmRealization) -> Output {
    let json = serde_json::to_value(r).expect("realizations serialize");
    let text = serde_json::to_string_pretty(&json).expect("json");
    Output::ok(json, text)
}

fn policy(o: &Opts) -> Policy {
    Policy { seed: o.seed, samples: o.samples, max_size: o.max_size, ..Policy::default() }
}

fn directions(path: &Path, d: usize) -> Result<Vec<Mat>> {
    let w: Vec<Mat> = read_json(path)?;
    if w.len() != d {
        bail!("{} holds {} directions, expected one per letter ({d})", path.display(), w.len());
    }
    Ok(w)
}

fn check_letter(e: &RatExpr, j: usize) -> Result<()> {
    if j == 0 || j > e.d() {
        bail!("letter {j} out of range 1..={}", e.d());
    }
    Ok(())
}

fn domain_report(err: &Error) -> Option<Output> {
    match err {
        Error::NotInDomain { path, sizes } => Some(Output {
            json: json!({ "error": "NotInDomain", "path": path.to_string(), "sizes": sizes }),
            text: err.to_string(),
            code: 1,
        }),
        _ => None,
    }
}

fn run(cli: &Cli) -> Result<Output> {
    let o = &cli.opts;
    Ok(match &cli.cmd {
        Cmd::Parse { expr } => expr_output(&read_expr(expr)?),
        Cmd::Eval { expr, point, multi } => {
            let e = read_expr(expr)?;
            let value = if *multi {
                let pts: Vec<EvalPoint> = read_json(point)?;
                evaluate_multi(&e, &pts).map(|v| v.data)
            } else {
                evaluate(&e, &read_json(point)?)
            };
            match value {
                Ok(m) => mat_output(&m),
                Err(err) => domain_report(&err).ok_or(err)?,
            }
        }
        Cmd::Series { expr } => {
            let s = expand(&read_expr(expr)?, o.order)?;
            let json = serde_json::to_value(&s)?;
            let text = s.coeffs().iter().map(|(w, c)| format!("[{w}]\n{}", mat_text(c))).collect::<Vec<_>>().join("\n");
            Output::ok(json, text)
        }
        Cmd::Realize { input } => realization_output(&realize(&read_expr(input)?)?),
        Cmd::Minimize { input } => realization_output(&minimize(&read_json(input)?)),
        Cmd::Transfer { input } => {
            let e = transfer_expr(&read_json(input)?);
            let mut out = expr_output(&e);
            out.text = format_nce(&e).trim_end().to_string();
            out
        }
        Cmd::Equiv { a, b } => verdict_output(&equivalent(&read_expr(a)?, &read_expr(b)?, &policy(o))?),
        Cmd::Zero { expr } => verdict_output(&is_zero(&read_expr(expr)?, &policy(o))),
        Cmd::Diff { expr, letter, symbolic, numeric, z, zp, w } => {
            let e = read_expr(expr)?;
            check_letter(&e, *letter)?;
            match (z, zp, w) {
                (Some(z), Some(zp), Some(w)) if !symbolic => {
                    let (z, zp): (EvalPoint, EvalPoint) = (read_json(z)?, read_json(zp)?);
                    let wj: Mat = read_json(w)?;
                    if wj.shape() != (z.n(), zp.n()) {
                        bail!("direction must be {} x {}", z.n(), zp.n());
                    }
                    let ws: Vec<Mat> = (1..=e.d()).map(|i| if i == *letter { wj.clone() } else { Mat::zeros(z.n(), zp.n()) }).collect();
                    let value = if *numeric { delta_numeric(&e, &z, &zp, &ws) } else { delta_symbolic_value(&e, &z, &zp, &ws) };
                    match value {
                        Ok(m) => mat_output(&m),
                        Err(err) => domain_report(&err).ok_or(err)?,
                    }
                }
                (None, None, None) if !numeric => expr_output(&delta(&e, *letter)),
                _ => bail!("--numeric needs --Z, --Zp and --W; --symbolic takes no points"),
            }
        }
        Cmd::Shift { expr, side, letter } => {
            let e = read_expr(expr)?;
            check_letter(&e, *letter)?;
            let s = match side {
                Side::Left => left_shift(&e, *letter)?,
                Side::Right => right_shift(&e, *letter)?,
            };
            expr_output(&s.normalize())
        }
        Cmd::Dderiv { expr, z, w } => {
            let e = read_expr(expr)?;
            mat_output(&directional_derivative(&e, &read_json(z)?, &directions(w, e.d())?)?)
        }
        Cmd::Hessian { expr, z, w, symbolic } => {
            let e = read_expr(expr)?;
            let (z, w): (EvalPoint, _) = (read_json(z)?, directions(w, e.d())?);
            mat_output(&if *symbolic { hessian_symbolic(&e, &z, &w)? } else { hessian(&e, &z, &w)? })
        }
        Cmd::DomainCheck { input, point } => {
            let r: FmRealization = read_json(input)?;
            let inside = pencil_domain_check(&r, &read_json(point)?)?;
            Output::ok(json!({ "in_domain": inside }), if inside { "in domain" } else { "not in domain" }.to_string())
        }
        Cmd::Selftest { only } => {
            let ids: Vec<usize> = match only {
                Some(id) if (1..=TITLES.len()).contains(id) => vec![*id],
                Some(id) => bail!("no criterion {id}; criteria run 1..={}", TITLES.len()),
                None => (1..=TITLES.len()).collect(),
            };
            let mut lines = Vec::new();
            let mut reports = Vec::new();
            for id in ids {
                let start = Instant::now();
                let r = run_criterion(id, o.seed);
                eprintln!("criterion {id} finished in {:.1?}", start.elapsed());
                lines.push(format!("{:>2}  {}  {}: {}", r.id, if r.passed { "PASS" } else { "FAIL" }, r.title, r.detail));
                reports.push(r);
            }
            let passed = reports.iter().filter(|r| r.passed).count();
            lines.push(format!("{passed} of {} criteria passed", reports.len()));
            Output { json: json!(reports), text: lines.join("\n"), code: if passed == reports.len() { 0 } else { 1 } }
        }
    })
}

fn emit(o: &Opts, out: &Output) -> Result<()> {
    let mut body = match o.format {
        Format::Json => serde_json::to_string_pretty(&out.json)?,
        Format::Text => out.text.clone(),
    };
    body.push('\n');
    match &o.out {
        Some(path) => fs::write(path, body).with_context(|| format!("writing {}", path.display())),
        None => std::io::stdout().write_all(body.as_bytes()).context("writing output"),
    }
}

fn main() -> ExitCode {
    // usage errors exit 1 so that 2 always means a sampled verdict
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = if err.use_stderr() { 1 } else { 0 };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli).and_then(|out| emit(&cli.opts, &out).map(|()| out.code)) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(1)
        }
    }
}
