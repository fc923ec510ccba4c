//! The `dimshift` command line.
//!
//! Exit codes: 0 on success, 1 when a verification or oracle comparison
//! fails, 2 on usage or range errors.

use std::io::Write;

use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::base_arith::Context;
use crate::charpoly;
use crate::error::{Error, Result};
use crate::prefix;
use crate::spectrum::{self, fmt_sig17, DimPoint, CSV_HEADER};
use crate::subshift::{DenseBudget, TransitionMatrix};
use crate::verify::{self, VerifyConfig};
use crate::Rational;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "dimshift",
    version,
    about = "Dimension of base-q orbits that stay above a threshold"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Prefix length and minimal prefix of n.
    Prefix {
        #[arg(short)]
        q: u64,
        #[arg(short)]
        m: u32,
        n: u64,
    },
    /// Characteristic polynomial of A_m(i).
    Charpoly {
        #[arg(short)]
        q: u64,
        #[arg(short)]
        m: u32,
        i: u64,
        /// Recompute from traces of the dense matrix and compare.
        #[arg(long)]
        oracle: bool,
        #[arg(long)]
        json: bool,
    },
    /// One row per cutoff: minimal prefix, coefficients and diagonal of A^k.
    Table {
        #[arg(short)]
        q: u64,
        #[arg(short)]
        m: u32,
        /// Check every row against the trace oracle and dense powers.
        #[arg(long)]
        oracle: bool,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Perron root and dimension at i / q^m, or a bracket around c.
    Dim {
        #[arg(short)]
        q: u64,
        #[arg(short)]
        m: u32,
        #[arg(short, conflicts_with = "c", required_unless_present = "c")]
        i: Option<u64>,
        /// A fraction such as 4/27 or 4/3^3, or a decimal such as 0.4.
        #[arg(short)]
        c: Option<String>,
        #[arg(long)]
        json: bool,
    },
    /// Dimension at every i / q^m in a range.
    Sweep {
        #[arg(short)]
        q: u64,
        #[arg(short)]
        m: u32,
        #[arg(long)]
        from: Option<u64>,
        /// Last index, inclusive.
        #[arg(long)]
        to: Option<u64>,
        /// Add the psi column.
        #[arg(long)]
        psi: bool,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        /// Worker threads; defaults to the number of CPUs.
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Run the invariant and oracle suite.
    Verify {
        #[arg(long, default_value_t = 3)]
        q_max: u64,
        #[arg(long, default_value_t = 3)]
        m_max: u32,
    },
    /// Compare phi(c) with psi(c) for growing q.
    Asym {
        #[arg(short)]
        c: String,
        #[arg(short, value_delimiter = ',', required = true)]
        q: Vec<u64>,
        /// Largest matrix dimension q^m used for the bracket.
        #[arg(long, default_value_t = 1 << 32)]
        max_states: u64,
        #[arg(long)]
        json: bool,
    },
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, S>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(err, "{}", e.render());
                return EXIT_USAGE;
            }
            let _ = write!(out, "{}", e.render());
            return EXIT_OK;
        }
    };
    match execute(&cli.command, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            match e {
                Error::Consistency(_) => EXIT_FAILED,
                _ => EXIT_USAGE,
            }
        }
    }
}

fn io(e: std::io::Error) -> Error {
    Error::Precondition(format!("write failed: {e}"))
}

fn tuple<T: ToString>(xs: &[T]) -> String {
    let parts: Vec<String> = xs.iter().map(T::to_string).collect();
    format!("({})", parts.join(","))
}

pub fn execute(cmd: &Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    match *cmd {
        Command::Prefix { q, m, n } => {
            let ctx = Context::new(q, m)?;
            let p = prefix::prefix_info(&ctx, n)?;
            writeln!(out, "l={} nbar={}", p.len, p.nbar).map_err(io)?;
            Ok(EXIT_OK)
        }
        Command::Charpoly {
            q,
            m,
            i,
            oracle,
            json,
        } => charpoly_cmd(q, m, i, oracle, json, out),
        Command::Table {
            q,
            m,
            oracle,
            format,
        } => table_cmd(q, m, oracle, format, out, err),
        Command::Dim {
            q,
            m,
            i,
            ref c,
            json,
        } => dim_cmd(q, m, i, c.as_deref(), json, out),
        Command::Sweep {
            q,
            m,
            from,
            to,
            psi,
            format,
            jobs,
        } => sweep_cmd(q, m, from, to, psi, format, jobs, out),
        Command::Verify { q_max, m_max } => {
            if q_max < 2 || m_max < 1 {
                return Err(Error::out_of_range(
                    "q-max/m-max",
                    format!("{q_max}/{m_max}"),
                    ">= 2 / >= 1",
                ));
            }
            let mut cfg = VerifyConfig::new(q_max, m_max);
            cfg.budget = DenseBudget::from_env()?;
            let reports = verify::run(&cfg);
            for r in &reports {
                writeln!(out, "{r}").map_err(io)?;
            }
            let failed = reports.iter().filter(|r| !r.passed()).count();
            writeln!(out, "{} checks, {} failed", reports.len(), failed).map_err(io)?;
            Ok(if failed == 0 { EXIT_OK } else { EXIT_FAILED })
        }
        Command::Asym {
            ref c,
            ref q,
            max_states,
            json,
        } => asym_cmd(c, q, max_states, json, out),
    }
}

fn charpoly_cmd(
    q: u64,
    m: u32,
    i: u64,
    oracle: bool,
    json: bool,
    out: &mut dyn Write,
) -> Result<i32> {
    let ctx = Context::new(q, m)?;
    let g = charpoly::fast(&ctx, i)?;
    let verdict = if oracle {
        let want = charpoly::newton(&ctx, i, DenseBudget::from_env()?)?;
        Some(g.full_coeffs()? == want)
    } else {
        None
    };
    if json {
        let mut v = serde_json::to_value(&g).map_err(|e| Error::Consistency(e.to_string()))?;
        if let Some(ok) = verdict {
            v["oracle"] = json!(if ok { "match" } else { "mismatch" });
        }
        writeln!(out, "{v}").map_err(io)?;
    } else {
        writeln!(out, "a={} trailing={}", tuple(&g.coeffs), g.trailing).map_err(io)?;
        if let Some(ok) = verdict {
            writeln!(out, "{}", if ok { "match" } else { "mismatch" }).map_err(io)?;
        }
    }
    Ok(match verdict {
        Some(false) => EXIT_FAILED,
        _ => EXIT_OK,
    })
}

/// One line of `table`.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct TableRow {
    pub i: u64,
    pub nbar: u64,
    pub a: Vec<u64>,
    pub l: u32,
    pub minimal: bool,
    /// `diag[k-1]` is `A^k` at `(i+1, i+1)`.
    pub diag: Vec<u8>,
}

pub fn table_rows(ctx: &Context) -> Result<Vec<TableRow>> {
    let a = TransitionMatrix::full(*ctx);
    let powers = (ctx.m() - 1).max(1);
    (0..ctx.size())
        .map(|i| {
            let p = prefix::prefix_info(ctx, i)?;
            Ok(TableRow {
                i,
                nbar: p.nbar,
                a: charpoly::fast(ctx, i)?.coeffs,
                l: p.len,
                minimal: prefix::is_minimal(ctx, i)?,
                diag: (1..=powers)
                    .map(|k| a.power_entry(i + 1, i + 1, k))
                    .collect::<Result<_>>()?,
            })
        })
        .collect()
}

fn table_cmd(
    q: u64,
    m: u32,
    oracle: bool,
    format: Format,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<i32> {
    let ctx = Context::new(q, m)?;
    let budget = DenseBudget::from_env()?;
    budget.check(ctx.size())?;
    let rows = table_rows(&ctx)?;
    let mut bad = 0;
    if oracle {
        let a = TransitionMatrix::full(ctx)
            .with_budget(budget)
            .dense_as::<u64>()?;
        let mut power = a.clone();
        for k in 0..rows[0].diag.len() {
            for row in &rows {
                let d = *power.get(row.i as usize, row.i as usize);
                if d != u64::from(row.diag[k]) {
                    bad += 1;
                    writeln!(err, "mismatch: i={} A^{} diagonal {d}", row.i, k + 1).map_err(io)?;
                }
            }
            power = power.mul(&a);
        }
        for row in &rows {
            let want = charpoly::newton(&ctx, row.i, budget)?;
            if charpoly::fast(&ctx, row.i)?.full_coeffs()? != want {
                bad += 1;
                writeln!(err, "mismatch: i={} oracle {}", row.i, tuple(&want)).map_err(io)?;
            }
        }
    }
    let mdigits = m as usize;
    match format {
        Format::Json => {
            writeln!(out, "{}", to_json(&rows)?).map_err(io)?;
        }
        Format::Csv | Format::Text => {
            let mut head: Vec<String> = vec!["i".into(), "ibar".into()];
            head.extend((1..=mdigits).map(|j| format!("a{j}")));
            head.extend(["l".to_string(), "minimal".to_string()]);
            head.extend((1..=rows[0].diag.len()).map(|k| {
                if k == 1 {
                    "A".into()
                } else {
                    format!("A^{k}")
                }
            }));
            let lines: Vec<Vec<String>> = rows
                .iter()
                .map(|r| {
                    let mut cells = vec![r.i.to_string(), r.nbar.to_string()];
                    cells.extend(r.a.iter().map(u64::to_string));
                    cells.push(r.l.to_string());
                    cells.push(if r.minimal { "y" } else { "n" }.into());
                    cells.extend(r.diag.iter().map(u8::to_string));
                    cells
                })
                .collect();
            if format == Format::Csv {
                writeln!(out, "{}", head.join(",")).map_err(io)?;
                for l in &lines {
                    writeln!(out, "{}", l.join(",")).map_err(io)?;
                }
            } else {
                let width: Vec<usize> = (0..head.len())
                    .map(|c| {
                        lines
                            .iter()
                            .map(|l| l[c].len())
                            .chain([head[c].len()])
                            .max()
                            .unwrap_or(1)
                    })
                    .collect();
                let render = |cells: &[String]| {
                    let padded: Vec<String> = cells
                        .iter()
                        .zip(&width)
                        .map(|(s, w)| format!("{s:>w$}"))
                        .collect();
                    padded.join(" ")
                };
                writeln!(out, "{}", render(&head)).map_err(io)?;
                for l in &lines {
                    writeln!(out, "{}", render(l)).map_err(io)?;
                }
            }
        }
    }
    Ok(if bad == 0 { EXIT_OK } else { EXIT_FAILED })
}

fn point_text(p: &DimPoint<f64>) -> String {
    format!(
        "q={} m={} i={} rho={} phi={} residual={}",
        p.q,
        p.m,
        p.i,
        fmt_sig17(p.rho),
        fmt_sig17(p.phi),
        fmt_sig17(p.residual)
    )
}

/// Reads `-c` for `dim`. Fractions must have a power of `q` as denominator.
pub fn parse_dim_param(s: &str, q: u64) -> Result<Rational> {
    let c = spectrum::parse_param(s)?;
    if s.contains('/') {
        let mut den = c.denom().clone();
        let qb = BigInt::from(q);
        while !den.is_one() && (&den % &qb).is_zero() {
            den /= &qb;
        }
        if !den.is_one() {
            return Err(Error::out_of_range(
                "c",
                s,
                format!("a fraction with denominator a power of {q}"),
            ));
        }
    }
    Ok(c)
}

fn dim_cmd(
    q: u64,
    m: u32,
    i: Option<u64>,
    c: Option<&str>,
    json: bool,
    out: &mut dyn Write,
) -> Result<i32> {
    let ctx = Context::new(q, m)?;
    match (i, c) {
        (Some(i), _) => {
            let p = spectrum::phi_exact::<f64>(&ctx, i)?;
            let line = if json { to_json(&p)? } else { point_text(&p) };
            writeln!(out, "{line}").map_err(io)?;
        }
        (None, Some(c)) => {
            let c = parse_dim_param(c, q)?;
            let b = spectrum::phi_bracket::<f64>(&c, &ctx)?;
            let line = if json {
                to_json(&b)?
            } else if b.exact {
                point_text(&b.upper)
            } else {
                format!(
                    "c={} m={} phi in [{}, {}] width={}\nlower: {}\nupper: {}",
                    b.c,
                    b.m,
                    fmt_sig17(b.lower.phi),
                    fmt_sig17(b.upper.phi),
                    fmt_sig17(b.width()),
                    point_text(&b.lower),
                    point_text(&b.upper)
                )
            };
            writeln!(out, "{line}").map_err(io)?;
        }
        (None, None) => return Err(Error::Parse("one of -i or -c is required".into())),
    }
    Ok(EXIT_OK)
}

fn to_json<T: serde::Serialize>(v: &T) -> Result<String> {
    serde_json::to_string(v).map_err(|e| Error::Consistency(e.to_string()))
}

#[allow(clippy::too_many_arguments)]
fn sweep_cmd(
    q: u64,
    m: u32,
    from: Option<u64>,
    to: Option<u64>,
    with_psi: bool,
    format: Format,
    jobs: Option<usize>,
    out: &mut dyn Write,
) -> Result<i32> {
    let ctx = Context::new(q, m)?;
    let lo = from.unwrap_or(0);
    let hi = to.unwrap_or(ctx.size() - 1);
    if lo > hi || hi >= ctx.size() {
        return Err(Error::out_of_range(
            "range",
            format!("{lo}..={hi}"),
            format!("0 <= from <= to < {}", ctx.size()),
        ));
    }
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(j) = jobs {
        if j == 0 {
            return Err(Error::out_of_range("jobs", 0, ">= 1"));
        }
        pool = pool.num_threads(j);
    }
    let pool = pool
        .build()
        .map_err(|e| Error::Precondition(e.to_string()))?;
    let points: Vec<DimPoint<f64>> = pool.install(|| {
        (lo..=hi)
            .into_par_iter()
            .map(|i| spectrum::phi_exact(&ctx, i))
            .collect::<Result<_>>()
    })?;
    let psi_of = |p: &DimPoint<f64>| with_psi.then(|| spectrum::psi_exact::<f64>(&p.c(), q));
    let mut buf = std::io::BufWriter::new(out);
    match format {
        Format::Json => {
            let rows: Vec<Value> = points
                .iter()
                .map(|p| {
                    let mut v = json!(p);
                    v["c_num"] = json!(p.i);
                    v["c_den"] = json!(p.c_den());
                    if let Some(s) = psi_of(p) {
                        v["psi"] = json!(s);
                    }
                    v
                })
                .collect();
            writeln!(buf, "{}", Value::Array(rows)).map_err(io)?;
        }
        Format::Csv | Format::Text => {
            writeln!(buf, "{CSV_HEADER}").map_err(io)?;
            for p in &points {
                writeln!(buf, "{}", p.csv_row(psi_of(p))).map_err(io)?;
            }
        }
    }
    buf.flush().map_err(io)?;
    Ok(EXIT_OK)
}

fn asym_cmd(
    c: &str,
    radices: &[u64],
    max_states: u64,
    json: bool,
    out: &mut dyn Write,
) -> Result<i32> {
    let c = spectrum::parse_param(c)?;
    let rows = spectrum::asymptotic_check::<f64>(&c, radices, max_states)?;
    if json {
        writeln!(out, "{}", to_json(&rows)?).map_err(io)?;
    } else {
        writeln!(
            out,
            "q,i,m,phi_lo,phi_hi,psi,ratio_lo,ratio_hi,bound_lo,bound_hi,holds"
        )
        .map_err(io)?;
        for r in &rows {
            writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{},{}",
                r.q,
                r.i,
                r.bracket.m,
                fmt_sig17(r.bracket.lower.phi),
                fmt_sig17(r.bracket.upper.phi),
                fmt_sig17(r.psi),
                fmt_sig17(r.ratio_lo),
                fmt_sig17(r.ratio_hi),
                fmt_sig17(r.bound_lo),
                fmt_sig17(r.bound_hi),
                r.holds
            )
            .map_err(io)?;
        }
    }
    Ok(if rows.iter().all(|r| r.holds) {
        EXIT_OK
    } else {
        EXIT_FAILED
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = run(
            std::iter::once("dimshift").chain(args.iter().copied()),
            &mut out,
            &mut err,
        );
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn prefix_examples() {
        assert_eq!(
            call(&["prefix", "-q", "3", "-m", "3", "11"]).1,
            "l=1 nbar=9\n"
        );
        assert_eq!(
            call(&["prefix", "-q", "3", "-m", "3", "7"]).1,
            "l=3 nbar=7\n"
        );
        assert_eq!(call(&["prefix", "-q", "3", "-m", "3", "27"]).0, EXIT_USAGE);
    }

    #[test]
    fn usage_errors() {
        assert_eq!(call(&["nope"]).0, EXIT_USAGE);
        assert_eq!(call(&["dim", "-q", "3", "-m", "1"]).0, EXIT_USAGE);
        assert_eq!(
            call(&["sweep", "-q", "3", "-m", "1", "--to", "3"]).0,
            EXIT_USAGE
        );
        assert_eq!(call(&["sweep", "-q", "1", "-m", "1"]).0, EXIT_USAGE);
        assert_eq!(call(&["--help"]).0, EXIT_OK);
    }

    #[test]
    fn fraction_validated_against_q() {
        assert!(parse_dim_param("4/27", 3).is_ok());
        assert!(parse_dim_param("4/3^3", 3).is_ok());
        assert!(parse_dim_param("1/5", 3).is_err());
        assert!(parse_dim_param("0.2", 3).is_ok());
    }
}
