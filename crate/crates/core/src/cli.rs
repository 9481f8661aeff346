//! Command-line front end. `run` never touches stdout or the process exit code
//! itself, so it can be driven from tests.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::bases::{make_base, BaseKind, BaseVariety};
use crate::cone::{ne_model, NEModel};
use crate::error::Error;
use crate::families::{classify_dim4, enumerate_rho5, enumerate_rho6};
use crate::fano::{build_a, build_b, report, FamilyRecord, FanoModel, Invariants};
use crate::Construction;

/// Environment variable overriding the path written by `classify --out`.
pub const OUT_ENV: &str = "LEFSCHETZ_OUT";
pub const DEFAULT_DATABASE: &str = "classification-dim4.json";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Table,
}

#[derive(Debug, Parser)]
#[command(name = "lefschetz", version, about = "Fano manifolds with Lefschetz defect 3")]
pub struct Cli {
    #[arg(long, value_enum, default_value = "json", global = true)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Full classification database.
    Classify {
        #[arg(long)]
        dim: usize,
        /// Also write the database to a file.
        #[arg(long, num_args = 0..=1, default_missing_value = DEFAULT_DATABASE)]
        out: Option<PathBuf>,
    },
    /// Families with a given Picard number.
    Enumerate {
        #[arg(long)]
        rho: usize,
        /// Index of the base (rho 5 only).
        #[arg(long)]
        index: Option<i64>,
        /// Dimension of X (rho 5 only).
        #[arg(long)]
        dim: Option<usize>,
    },
    /// Invariant report for one model.
    Invariants(ModelArgs),
    /// Relative Mori cone of the conic bundle.
    Cone {
        #[arg(long)]
        construction: Construction,
    },
    /// Fano test for one model.
    Check(ModelArgs),
}

#[derive(Debug, clap::Args)]
pub struct ModelArgs {
    #[arg(long)]
    pub construction: Construction,
    #[arg(long)]
    pub base: BaseKind,
    /// Twists D1, D2, D3: "a,b,c" on a base of Picard number one, else
    /// semicolon-separated coordinate groups such as "1,0;0,0;0,1".
    #[arg(long, allow_hyphen_values = true)]
    pub d: Option<String>,
    /// Twist N as comma-separated coordinates.
    #[arg(long, allow_hyphen_values = true)]
    pub n: Option<String>,
}

#[derive(Debug, Default, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

fn parse_ints(s: &str) -> Result<Vec<i64>, Error> {
    s.split(',')
        .map(|x| x.trim().parse::<i64>().map_err(|_| Error::Usage(format!("not an integer: {x:?}"))))
        .collect()
}

/// Parses the three twists of construction A for a base of Picard number `rho`.
pub fn parse_triple(s: &str, rho: usize) -> Result<Vec<Vec<i64>>, Error> {
    let groups: Vec<Vec<i64>> = if s.contains(';') {
        s.split(';').map(parse_ints).collect::<Result<_, _>>()?
    } else if rho == 1 {
        parse_ints(s)?.into_iter().map(|x| vec![x]).collect()
    } else {
        return Err(Error::Usage(format!("use ';' between the three twists on a base of Picard number {rho}")));
    };
    if groups.len() != 3 || groups.iter().any(|g| g.len() != rho) {
        return Err(Error::Usage(format!("expected three twists of {rho} coordinates, got {s:?}")));
    }
    Ok(groups)
}

pub fn parse_twist(s: &str, rho: usize) -> Result<Vec<i64>, Error> {
    let v = parse_ints(s)?;
    if v.len() != rho {
        return Err(Error::Usage(format!("expected {rho} coordinates, got {s:?}")));
    }
    Ok(v)
}

fn model_params(args: &ModelArgs, t: &BaseVariety) -> Result<Vec<Vec<i64>>, Error> {
    match (args.construction, &args.d, &args.n) {
        (Construction::A, Some(d), None) => parse_triple(d, t.rho),
        (Construction::B, None, Some(n)) => Ok(vec![parse_twist(n, t.rho)?]),
        (Construction::A, _, _) => Err(Error::Usage("construction A takes --d and no --n".into())),
        (Construction::B, _, _) => Err(Error::Usage("construction B takes --n and no --d".into())),
    }
}

fn build(args: &ModelArgs) -> Result<FanoModel, Error> {
    let t = make_base(args.base)?;
    if t.dim() != 1 && t.dim() != 2 {
        return Err(Error::Usage(format!("base {} not supported", t.kind)));
    }
    let params = model_params(args, &t)?;
    match args.construction {
        Construction::A => build_a(&t, &params),
        Construction::B => build_b(&t, &params[0]),
    }
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn params_text(p: &[Vec<i64>]) -> String {
    p.iter()
        .map(|v| v.iter().map(i64::to_string).collect::<Vec<_>>().join(","))
        .collect::<Vec<_>>()
        .join(";")
}

fn records_table(records: &[FamilyRecord]) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "{:>3} {:>3} {:>2} {:<6} {:<12} {:>5} {:>5} {:>5} {:>5} {:>5} {:>3} {:>4} {:>4} {:>5}  label",
        "rho", "dim", "c", "base", "params", "toric", "K^n", "K2c2", "h0", "chiT", "b3", "h22", "h13", "euler"
    );
    for r in records {
        let cols: [String; 8] = match &r.invariants {
            Some(Invariants::Dim4 { k4, k2c2, h0_mk, chi_t, b3, h22, h13, euler }) => {
                [k4, k2c2, h0_mk, chi_t, b3, h22, h13, euler].map(|x| x.to_string())
            }
            Some(Invariants::Dim3 { k3, h0_mk, chi_t, b3, euler }) => {
                [k3.to_string(), "-".into(), h0_mk.to_string(), chi_t.to_string(), b3.to_string(), "-".into(), "-".into(), euler.to_string()]
            }
            None => std::array::from_fn(|_| "-".to_string()),
        };
        let _ = writeln!(
            s,
            "{:>3} {:>3} {:>2} {:<6} {:<12} {:>5} {:>5} {:>5} {:>5} {:>5} {:>3} {:>4} {:>4} {:>5}  {}",
            r.rho,
            r.dim,
            r.construction.to_string(),
            r.base,
            params_text(&r.params),
            r.toric,
            cols[0],
            cols[1],
            cols[2],
            cols[3],
            cols[4],
            cols[5],
            cols[6],
            cols[7],
            r.label.as_deref().unwrap_or("")
        );
    }
    s
}

fn cone_table(nm: &NEModel) -> String {
    let mut s = format!("construction {}\nrays\n", nm.construction);
    for r in &nm.rays {
        let _ = writeln!(s, "  {:<6} {:?} {}", r.label, r.vector, r.aliases.join(" "));
    }
    s.push_str("facets\n");
    for f in &nm.facets {
        let _ = writeln!(s, "  {:<14} simplicial={:<5} {}", format!("{:?}", f.kind), f.simplicial, f.labels.join(" "));
    }
    s
}

fn emit<T: Serialize>(format: Format, v: &T, table: impl FnOnce() -> String) -> String {
    match format {
        Format::Json => to_json(v),
        Format::Table => table(),
    }
}

/// JSON body for a rejected model.
pub fn rejection(e: &Error) -> serde_json::Value {
    let kind = match e {
        Error::NotFano { .. } => "not_fano",
        Error::ZeroTwist => "zero_twist",
        Error::OutOfRange { .. } => "out_of_range",
        _ => "model",
    };
    let mut v = json!({ "fano": false, "error": kind, "reason": e.to_string() });
    if let Error::NotFano { pair: Some((i, j)), .. } = e {
        v["pair"] = json!([i, j]);
    }
    v
}

fn dispatch(cli: Cli) -> Result<String, Error> {
    let format = cli.format;
    match cli.command {
        Command::Classify { dim, out } => {
            if dim != 4 {
                return Err(Error::Usage(format!("classification is available in dimension 4 only, got {dim}")));
            }
            let records = classify_dim4()?;
            let json = to_json(&records);
            if let Some(path) = out {
                let path = std::env::var_os(OUT_ENV).map(PathBuf::from).unwrap_or(path);
                std::fs::write(&path, &json)
                    .map_err(|e| Error::Usage(format!("cannot write {}: {e}", path.display())))?;
            }
            Ok(match format {
                Format::Json => json,
                Format::Table => records_table(&records),
            })
        }
        Command::Enumerate { rho, index, dim } => {
            let records = match (rho, index, dim) {
                (5, Some(i), dim) => enumerate_rho5(i, dim.unwrap_or_else(|| (i as usize + 1).max(3)))?,
                (5, None, _) => return Err(Error::Usage("--rho 5 needs --index".into())),
                (6, None, None) => enumerate_rho6()?,
                (6, _, _) => return Err(Error::Usage("--index and --dim apply to --rho 5 only".into())),
                _ => return Err(Error::Usage(format!("enumeration is available for rho 5 and 6, got {rho}"))),
            };
            Ok(emit(format, &records, || records_table(&records)))
        }
        Command::Invariants(args) => {
            let r = report(&build(&args)?)?;
            Ok(emit(format, &r, || records_table(std::slice::from_ref(&r))))
        }
        Command::Cone { construction } => {
            let nm = ne_model(construction)?;
            Ok(emit(format, &nm, || cone_table(&nm)))
        }
        Command::Check(args) => {
            let m = build(&args)?;
            let v = json!({
                "fano": true,
                "construction": m.construction,
                "base": m.base.kind,
                "params": m.params,
                "rho": m.rho,
                "dim": m.dim,
                "delta": m.delta,
                "toric": m.toric,
                "status": m.status,
                "fiber_info": m.fiber_info,
            });
            Ok(emit(format, &v, || {
                format!("fano: true\nrho: {}\ndim: {}\ntoric: {}\nstatus: {:?}\n", m.rho, m.dim, m.toric, m.status)
            }))
        }
    }
}

pub fn run<I, T>(argv: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                Outcome { code: 1, stdout: String::new(), stderr: text }
            } else {
                Outcome { code: 0, stdout: text, stderr: String::new() }
            };
        }
    };
    let format = cli.format;
    match dispatch(cli) {
        Ok(stdout) => Outcome { code: 0, stdout, stderr: String::new() },
        Err(e @ Error::Usage(_)) => Outcome { code: 1, stdout: String::new(), stderr: format!("{e}\n") },
        Err(e) => {
            let body = rejection(&e);
            let stdout = match format {
                Format::Json => to_json(&body),
                Format::Table => format!("fano: false\nreason: {e}\n"),
            };
            Outcome { code: 2, stdout, stderr: String::new() }
        }
    }
}
