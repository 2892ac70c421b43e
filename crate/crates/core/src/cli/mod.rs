//! Command-line front end: `.conn` parsing, printing and subcommand dispatch.
//!
//! Exit codes: 0 success, 1 domain error, 2 parse error, 3 internal error.

pub mod parse;
pub mod print;

use std::fmt::Write as _;
use std::io::{Read, Write};
use std::panic::{catch_unwind, AssertUnwindSafe};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::connection::{ConnectionError, ElementaryConnection, FormalConnection};
use crate::exactfield::FieldElement;
use crate::fourier::{
    fourier_0_inf, fourier_inf_0, fourier_inf_inf, fourier_s_inf, fourier_s_inf_germ, transformed_infinity,
    RegularGermData, Sign, SingularityDatum,
};
use crate::oracle::{oracle_check, oracle_grid, OracleError, OracleReport};
use crate::rigidity::{rigidity_breakdown, z_zhat_discrepancy, RigidityError};
use crate::series::set_window_override;
use crate::structure::{determinant, dual, hom_sum, tensor_sum};
use parse::{parse, parse_jordan, parse_scalar, ParseError};

#[derive(Parser, Debug)]
#[command(name = "elconn", version, about = "Exact formal connections and their local Fourier transforms")]
struct Cli {
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Working window (relative terms) for truncated expansions.
    #[arg(long, global = true, value_parser = clap::value_parser!(i64).range(1..))]
    precision: Option<i64>,
    /// Initial cyclotomic order hint; towers grow on demand regardless.
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    field_order: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Kind {
    #[value(name = "0inf")]
    ZeroInf,
    #[value(name = "inf0")]
    InfZero,
    #[value(name = "sinf")]
    SInf,
    #[value(name = "infinf")]
    InfInf,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SignArg {
    Plus,
    Minus,
}

impl From<SignArg> for Sign {
    fn from(s: SignArg) -> Sign {
        match s {
            SignArg::Plus => Sign::Plus,
            SignArg::Minus => Sign::Minus,
        }
    }
}

/// Inputs are `path`, `path#name` or `-` for stdin.
#[derive(Subcommand, Debug)]
enum Command {
    /// Local Fourier-Laplace transform, applied summandwise.
    Fourier {
        #[arg(long, value_enum)]
        kind: Kind,
        #[arg(long, value_enum, default_value = "minus")]
        sign: SignArg,
        /// The finite point for `--kind sinf`.
        #[arg(long, allow_hyphen_values = true)]
        s: Option<String>,
        input: String,
    },
    Tensor { a: String, b: String },
    Dual { a: String },
    Hom { a: String, b: String },
    Det { a: String },
    Invariants { a: String },
    /// Exit 0 and print witnesses if isomorphic, exit 1 otherwise.
    Iso { a: String, b: String },
    Canon { a: String },
    /// Rigidity index from a JSON singularity document.
    Rigidity { input: String },
    /// Z - Z^ discrepancy from a JSON document with `data` and `data_hat`.
    #[command(name = "z-zhat")]
    ZZhat {
        #[arg(long, value_enum, default_value = "minus")]
        sign: SignArg,
        input: String,
    },
    /// Operator-level check of the transform of E^{a/t^q}.
    OracleCheck {
        #[arg(long, allow_hyphen_values = true)]
        a: Option<String>,
        #[arg(long)]
        q: Option<u32>,
        #[arg(long)]
        grid: bool,
    },
}

#[derive(Debug)]
enum CliError {
    Parse { source: String, error: ParseError },
    Domain(String),
    Internal(String),
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::Domain(_) => 1,
            CliError::Parse { .. } => 2,
            CliError::Internal(_) => 3,
        }
    }

    fn message(&self) -> String {
        match self {
            CliError::Parse { source, error } => format!("{source}:{error}"),
            CliError::Domain(m) => format!("error: {m}"),
            CliError::Internal(m) => format!("internal error: {m}"),
        }
    }
}

impl From<ConnectionError> for CliError {
    fn from(e: ConnectionError) -> Self {
        CliError::Domain(e.to_string())
    }
}

impl From<RigidityError> for CliError {
    fn from(e: RigidityError) -> Self {
        match e {
            RigidityError::InconsistentGerm { .. } => CliError::Internal(e.to_string()),
            other => CliError::Domain(other.to_string()),
        }
    }
}

impl From<OracleError> for CliError {
    fn from(e: OracleError) -> Self {
        match e {
            OracleError::Mismatch { .. } => CliError::Internal(e.to_string()),
            other => CliError::Domain(other.to_string()),
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

struct Io<'a> {
    stdin: &'a mut dyn Read,
    json: bool,
    out: String,
}

impl Io<'_> {
    fn read(&mut self, input: &str) -> CliResult<(String, String)> {
        if input == "-" {
            let mut s = String::new();
            self.stdin.read_to_string(&mut s).map_err(|e| CliError::Domain(format!("stdin: {e}")))?;
            return Ok(("<stdin>".into(), s));
        }
        let text = std::fs::read_to_string(input).map_err(|e| CliError::Domain(format!("{input}: {e}")))?;
        Ok((input.to_string(), text))
    }

    fn connection(&mut self, input: &str) -> CliResult<FormalConnection> {
        let (path, name) = match input.rsplit_once('#') {
            Some((p, n)) if !p.is_empty() => (p, Some(n)),
            _ => (input, None),
        };
        let (source, text) = self.read(path)?;
        let doc = parse(&text).map_err(|error| CliError::Parse { source: source.clone(), error })?;
        let conn = match name {
            Some(n) => doc.get(n).ok_or_else(|| CliError::Domain(format!("{source}: no connection named `{n}`")))?,
            None => doc.last().ok_or_else(|| CliError::Domain(format!("{source}: empty document")))?,
        };
        Ok(conn.clone())
    }

    fn emit_connection(&mut self, m: &FormalConnection) {
        if self.json {
            self.out = format!("{:#}\n", print::connection_json(m));
        } else {
            self.out = format!("{}\n", print::text(m));
        }
    }
}

fn scalar_arg(flag: &str, text: &str) -> CliResult<FieldElement> {
    parse_scalar(text).map_err(|error| CliError::Parse { source: format!("--{flag}"), error })
}

fn run(cli: Cli, io: &mut Io) -> CliResult<()> {
    match cli.command {
        Command::Fourier { kind, sign, s, input } => {
            let m = io.connection(&input)?;
            let sign = Sign::from(sign);
            let s = match (&s, kind) {
                (Some(t), _) => scalar_arg("s", t)?,
                (None, _) => FieldElement::zero(),
            };
            let mut out = Vec::new();
            for el in &m.summands {
                let t = match kind {
                    Kind::ZeroInf => fourier_0_inf(el, sign)?,
                    Kind::InfZero => fourier_inf_0(el, sign)?,
                    Kind::InfInf => fourier_inf_inf(el, sign)?,
                    Kind::SInf if el.q() == 0 => {
                        let g = RegularGermData::new(el.reduce_minimal()?.reg().clone());
                        if g.phi.is_empty() {
                            continue;
                        }
                        fourier_s_inf_germ(&g, &s, sign)?
                    }
                    Kind::SInf => fourier_s_inf(el, &s, sign)?,
                };
                out.push(t);
            }
            io.emit_connection(&FormalConnection::new(out).canonicalize()?);
        }
        Command::Tensor { a, b } => {
            let (a, b) = (io.connection(&a)?, io.connection(&b)?);
            io.emit_connection(&tensor_sum(&a, &b)?.canonicalize()?);
        }
        Command::Dual { a } => {
            let a = io.connection(&a)?;
            io.emit_connection(&FormalConnection::new(a.summands.iter().map(dual).collect()).canonicalize()?);
        }
        Command::Hom { a, b } => {
            let (a, b) = (io.connection(&a)?, io.connection(&b)?);
            io.emit_connection(&hom_sum(&a, &b)?.canonicalize()?);
        }
        Command::Det { a } => {
            let a = io.connection(&a)?;
            crate::structure::require_nonempty(&a)?;
            let mut acc = FormalConnection::single(determinant(&a.summands[0])?);
            for el in &a.summands[1..] {
                acc = tensor_sum(&acc, &FormalConnection::single(determinant(el)?))?;
            }
            io.emit_connection(&acc.canonicalize()?);
        }
        Command::Invariants { a } => {
            let a = io.connection(&a)?.canonicalize()?;
            if io.json {
                io.out = format!("{:#}\n", print::connection_json(&a));
            } else {
                let mut s = String::new();
                for el in &a.summands {
                    let inv = el.invariants();
                    let _ = writeln!(s, "{el}: slope {}, irr {}, rank {}", inv.slope, inv.irregularity, inv.rank);
                }
                let _ = writeln!(s, "total: irr {}, rank {}", a.irregularity(), a.rank());
                io.out = s;
            }
        }
        Command::Iso { a, b } => {
            let (a, b) = (io.connection(&a)?.canonicalize()?, io.connection(&b)?.canonicalize()?);
            match witnesses(&a, &b)? {
                Some(ws) => {
                    if io.json {
                        let pairs: Vec<Value> =
                            ws.iter().map(|(x, y, w)| json!({"a": x, "b": y, "beta": w})).collect();
                        io.out = format!("{:#}\n", json!({"isomorphic": true, "witnesses": pairs}));
                    } else {
                        let mut s = String::from("isomorphic\n");
                        for (x, y, w) in &ws {
                            let _ = writeln!(s, "  {x}  ~  {y}  via beta = {w}");
                        }
                        io.out = s;
                    }
                }
                None => return Err(CliError::Domain("not isomorphic".into())),
            }
        }
        Command::Canon { a } => {
            let a = io.connection(&a)?;
            io.emit_connection(&a.canonicalize()?);
        }
        Command::Rigidity { input } => {
            let (source, text) = io.read(&input)?;
            let doc = json_doc(&source, &text)?;
            let genus = doc.get("genus").and_then(Value::as_i64).unwrap_or(0);
            let data = points(&source, doc.get("points"), "points")?;
            let (rig, rows) = rigidity_breakdown(&data, genus)?;
            if io.json {
                let rows: Vec<Value> = rows
                    .iter()
                    .map(|c| json!({"at": c.location, "rank": c.rank, "irr_end": c.irr_end, "z": c.z}))
                    .collect();
                io.out = format!("{:#}\n", json!({"rigidity": rig, "genus": genus, "points": rows}));
            } else {
                let mut s = format!("rigidity index: {rig}\n");
                let _ = writeln!(s, "{:<12} {:>5} {:>9} {:>5}", "point", "rank", "irr(End)", "Z");
                for c in &rows {
                    let _ = writeln!(s, "{:<12} {:>5} {:>9} {:>5}", c.location, c.rank, c.irr_end, c.z);
                }
                io.out = s;
            }
        }
        Command::ZZhat { sign, input } => {
            let (source, text) = io.read(&input)?;
            let doc = json_doc(&source, &text)?;
            let data = points(&source, doc.get("data"), "data")?;
            let mut data_hat = points(&source, doc.get("data_hat"), "data_hat")?;
            if !data_hat.iter().any(SingularityDatum::is_infinity) {
                data_hat.push(transformed_infinity(&data, sign.into())?);
            }
            let d = z_zhat_discrepancy(&data, &data_hat)?;
            io.out = if io.json { format!("{:#}\n", json!({"discrepancy": d})) } else { format!("discrepancy: {d}\n") };
        }
        Command::OracleCheck { a, q, grid } => {
            let cases = if grid {
                oracle_grid()
            } else {
                let a = a.ok_or_else(|| CliError::Domain("--a is required without --grid".into()))?;
                let q = q.ok_or_else(|| CliError::Domain("--q is required without --grid".into()))?;
                vec![(scalar_arg("a", &a)?, q)]
            };
            let reports = cases.iter().map(|(a, q)| oracle_check(a, *q)).collect::<Result<Vec<_>, _>>()?;
            io.out = if io.json {
                format!("{:#}\n", Value::Array(reports.iter().map(report_json).collect()))
            } else {
                reports.iter().map(OracleReport::to_string).collect()
            };
        }
    }
    Ok(())
}

fn report_json(r: &OracleReport) -> Value {
    json!({
        "a": r.a.to_string(),
        "q": r.q,
        "passed": r.passed(),
        "stages": r.stages.iter().map(|s| json!({"stage": s.name, "expected": s.expected, "found": s.found, "ok": s.ok})).collect::<Vec<_>>(),
    })
}

type Witness = (String, String, String);

fn witnesses(a: &FormalConnection, b: &FormalConnection) -> CliResult<Option<Vec<Witness>>> {
    if a.summands.len() != b.summands.len() {
        return Ok(None);
    }
    let mut used = vec![false; b.summands.len()];
    let mut out = Vec::new();
    'outer: for x in &a.summands {
        for (j, y) in b.summands.iter().enumerate() {
            if used[j] {
                continue;
            }
            if let Some(w) = ElementaryConnection::is_isomorphic_elementary(x, y)? {
                used[j] = true;
                out.push((x.to_string(), y.to_string(), w.to_string()));
                continue 'outer;
            }
        }
        return Ok(None);
    }
    Ok(Some(out))
}

fn json_doc(source: &str, text: &str) -> CliResult<Value> {
    serde_json::from_str(text).map_err(|e| CliError::Parse {
        source: source.into(),
        error: ParseError { kind: parse::ErrorKind::Syntax, line: e.line(), col: e.column(), message: e.to_string() },
    })
}

/// `[{"at": "0" | "inf", "psi": "[...]", "summands": "El(...) (+) ..."}]`.
fn points(source: &str, v: Option<&Value>, field: &str) -> CliResult<Vec<SingularityDatum>> {
    let list = match v {
        None => return Ok(Vec::new()),
        Some(Value::Array(list)) => list,
        Some(_) => return Err(CliError::Domain(format!("{source}: `{field}` must be an array"))),
    };
    let mut out = Vec::new();
    for (i, p) in list.iter().enumerate() {
        let here = format!("{source}:{field}[{i}]");
        let text_of = |key: &str| p.get(key).and_then(Value::as_str);
        let at = text_of("at").ok_or_else(|| CliError::Domain(format!("{here}: missing `at`")))?;
        let summands = match text_of("summands") {
            Some(t) if !t.trim().is_empty() => parse::parse_connection(t)
                .map_err(|error| CliError::Parse { source: format!("{here}.summands"), error })?
                .summands,
            _ => Vec::new(),
        };
        let psi = match text_of("psi") {
            Some(t) => parse_jordan(t).map_err(|error| CliError::Parse { source: format!("{here}.psi"), error })?,
            None => crate::connection::RegularPart::empty(),
        };
        let datum = if at == "inf" {
            let regular = (!psi.is_empty()).then(|| ElementaryConnection::regular(psi));
            SingularityDatum::infinity(summands.into_iter().chain(regular).collect())?
        } else {
            let s = parse_scalar(at).map_err(|error| CliError::Parse { source: format!("{here}.at"), error })?;
            SingularityDatum::finite(s, psi, summands)?
        };
        out.push(datum);
    }
    Ok(out)
}

/// Runs the command line `args` (program name first) and returns the exit code.
pub fn dispatch<I, T>(args: I, stdin: &mut dyn Read, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{e}");
                    return 0;
                }
                _ => 2,
            };
            let _ = write!(stderr, "{e}");
            return code;
        }
    };
    let scoped = cli.precision.is_some();
    if scoped {
        set_window_override(cli.precision);
    }
    let mut io = Io { stdin, json: cli.json, out: String::new() };
    let result = catch_unwind(AssertUnwindSafe(|| run(cli, &mut io)));
    if scoped {
        set_window_override(None);
    }
    let result = match result {
        Ok(r) => r,
        Err(panic) => {
            let msg = panic
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| panic.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            Err(CliError::Internal(msg))
        }
    };
    match result {
        Ok(()) => {
            let _ = stdout.write_all(io.out.as_bytes());
            0
        }
        Err(e) => {
            let _ = writeln!(stderr, "{}", e.message());
            e.code()
        }
    }
}
