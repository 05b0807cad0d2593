//! The `ellipsoid-lattice` command line.
//!
//! Exit codes: 0 success, 1 an inequality failed (or a runtime error), 2 usage or parse
//! error, 3 enumeration budget exceeded.
//!
//! Records are written as CSV with the fixed header [`CSV_HEADER`] or as a JSON array of
//! objects with the same keys. Reals carry `--precision` significant digits.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::bound::{theorem_rhs, BoundBreakdown};
use crate::count::{discrepancy, EllipsoidParams};
use crate::error::{Error, Result};
use crate::fourier::poisson_d2_partial;
use crate::hp::{Hp, Real, DEFAULT_DIGITS, MIN_DIGITS};
use crate::rational::{self, Rational};
use crate::smoothing::{d2_volume, SmoothingParams};
use crate::verify::{self, Suite};
use crate::{Budget, Side};

pub const CSV_HEADER: &str = "a,x,n_count,volume,p_value,rhs_total,t1,t2,t3,t4,t5,t6,l_factor,y,z,precond_27,precond_28,holds,margin,wall_time_ms";

#[derive(Debug, Parser)]
#[command(name = "ellipsoid-lattice", version, about = "Lattice points in (u1^2+u2^2)/a + a^2 u3^2 <= x")]
pub struct Cli {
    /// Significant decimal digits for real arithmetic (at least 15).
    #[arg(long, global = true, default_value_t = DEFAULT_DIGITS)]
    pub precision: usize,
    /// Worker threads (default: available parallelism).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Enumeration budget in work units per call.
    #[arg(long, global = true, default_value_t = Budget::DEFAULT.0)]
    pub budget: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact count, volume and discrepancy.
    Count(Cell),
    /// Right-hand side breakdown and precondition verdicts.
    Bound(Cell),
    /// Run a verification suite.
    Verify {
        suite: Suite,
        /// Suite-specific range (see `Suite::default_limit`); 0 uses the default.
        #[arg(long, default_value_t = 0)]
        limit: u64,
        /// Emit the report as JSON instead of text.
        #[arg(long)]
        format: Option<Format>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Count, bound and compare on an (a, x) grid.
    Sweep {
        /// Comma-separated values of a.
        #[arg(long, value_delimiter = ',', required = true)]
        a: Vec<String>,
        /// Comma-separated values of x.
        #[arg(long, value_delimiter = ',', required = true)]
        x: Vec<String>,
        #[command(flatten)]
        output: Output,
    },
    /// Bracket P(x) by the smoothed, truncated Poisson sums.
    Estimate {
        #[arg(long)]
        a: String,
        #[arg(long)]
        x: String,
        /// Smoothing step (default x/20).
        #[arg(long)]
        u: Option<String>,
        /// Truncation point of the Poisson sum.
        #[arg(long, default_value_t = 20.0)]
        z: f64,
        #[command(flatten)]
        output: Output,
    },
}

#[derive(Debug, Args)]
pub struct Cell {
    #[arg(long)]
    pub a: String,
    #[arg(long)]
    pub x: String,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct Output {
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Write to this file instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Fill `wall_time_ms` (off by default so output is reproducible).
    #[arg(long)]
    pub timing: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// One output row. Empty (`None`) fields were not computed for this command or cell.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub a: String,
    pub x: String,
    pub n_count: Option<u64>,
    pub volume: Option<String>,
    pub p_value: Option<String>,
    pub rhs_total: Option<String>,
    pub t1: Option<String>,
    pub t2: Option<String>,
    pub t3: Option<String>,
    pub t4: Option<String>,
    pub t5: Option<String>,
    pub t6: Option<String>,
    pub l_factor: Option<String>,
    pub y: Option<String>,
    pub z: Option<String>,
    pub precond_27: Option<bool>,
    pub precond_28: Option<bool>,
    pub holds: Option<bool>,
    pub margin: Option<String>,
    pub wall_time_ms: Option<u64>,
}

impl RunRecord {
    fn new(p: &EllipsoidParams) -> Self {
        Self { a: rational::to_exact_string(p.a()), x: rational::to_exact_string(p.x()), ..Self::default() }
    }

    fn fill_bound(&mut self, hp: &mut Hp, b: &BoundBreakdown) {
        let mut f = |r: &Real| Some(hp.format(r));
        self.rhs_total = f(&b.total);
        self.t1 = f(&b.terms[0]);
        self.t2 = f(&b.terms[1]);
        self.t3 = f(&b.terms[2]);
        self.t4 = f(&b.terms[3]);
        self.t5 = f(&b.terms[4]);
        self.t6 = f(&b.terms[5]);
        self.l_factor = f(&b.l_factor);
        self.y = f(&b.y);
        self.z = f(&b.z);
        self.precond_27 = Some(b.precond_27);
        self.precond_28 = Some(b.precond_28);
    }
}

/// Result of `estimate`: bounds on `P(x)` from both smoothing directions.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimateRecord {
    pub a: String,
    pub x: String,
    pub u: String,
    pub z: f64,
    pub frequencies_plus: u64,
    pub frequencies_minus: u64,
    pub lower: f64,
    pub upper: f64,
}

/// Writes records as CSV (with header) or a JSON array.
pub fn write_records<T: Serialize, W: Write>(out: W, records: &[T], format: Format) -> Result<()> {
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            for r in records {
                w.serialize(r)?;
            }
            w.flush()?;
        }
        Format::Json => {
            let mut out = out;
            serde_json::to_writer_pretty(&mut out, records)?;
            writeln!(out)?;
        }
    }
    Ok(())
}

/// Reads records written by [`write_records`].
pub fn read_records<T: for<'de> Deserialize<'de>>(input: &[u8], format: Format) -> Result<Vec<T>> {
    match format {
        Format::Csv => {
            let mut r = csv::Reader::from_reader(input);
            r.deserialize().map(|x| x.map_err(Error::from)).collect()
        }
        Format::Json => Ok(serde_json::from_slice(input)?),
    }
}

/// Maps an error to the process exit code.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Parse { .. } | Error::NonPositive { .. } | Error::Domain(_) | Error::InvalidRange(_) => 2,
        Error::BudgetExceeded { .. } => 3,
        _ => 1,
    }
}

/// Count and bound for one cell. Budget exhaustion leaves the count fields empty.
pub fn sweep_cell(hp: &mut Hp, p: &EllipsoidParams, budget: Budget, timing: bool) -> Result<RunRecord> {
    let start = Instant::now();
    let mut rec = RunRecord::new(p);
    let b = theorem_rhs(hp, p.a(), p.x());
    rec.fill_bound(hp, &b);
    match discrepancy(hp, p, budget) {
        Ok(d) => {
            rec.n_count = Some(d.n_count);
            rec.volume = Some(hp.format(&d.volume));
            rec.p_value = Some(hp.format(&d.p_value));
            if b.precond_27 {
                let margin = hp.sub(&b.total, &d.abs_p());
                rec.holds = Some(!margin.is_negative());
                rec.margin = Some(hp.format(&margin));
            }
        }
        Err(Error::BudgetExceeded { .. }) => {}
        Err(e) => return Err(e),
    }
    if timing {
        rec.wall_time_ms = Some(start.elapsed().as_millis() as u64);
    }
    Ok(rec)
}

/// `lower ≤ P(x) ≤ upper` from `A(x) ≤ u⁻²D⁽²⁾_{x,u}(A)`, `A(x) ≥ u⁻²D⁽²⁾_{x,−u}(A)` and the
/// certified Poisson bands for `D⁽²⁾(P)`.
pub fn estimate(hp: &mut Hp, p: &EllipsoidParams, u: &Rational, z: f64, budget: Budget) -> Result<EstimateRecord> {
    let v = crate::count::volume(hp, p.x())?;
    let vf = hp.to_f64(&v);
    let uf = rational::to_f64(u);
    let mut bounds = [0.0; 2];
    let mut freqs = [0; 2];
    for (i, side) in [Side::Plus, Side::Minus].into_iter().enumerate() {
        let s = SmoothingParams::new(p.x().clone(), u.clone(), side)?;
        let d2v = d2_volume(hp, &s)?;
        let d2v = hp.to_f64(&d2v);
        let r = poisson_d2_partial(p, &s, z, budget)?;
        let (lo, hi) = r.band();
        let edge = if side == Side::Plus { hi } else { lo };
        bounds[i] = (d2v + edge) / (uf * uf) - vf;
        freqs[i] = r.frequencies;
    }
    Ok(EstimateRecord {
        a: rational::to_exact_string(p.a()),
        x: rational::to_exact_string(p.x()),
        u: rational::to_exact_string(u),
        z,
        frequencies_plus: freqs[0],
        frequencies_minus: freqs[1],
        lower: bounds[1],
        upper: bounds[0],
    })
}

fn emit<T: Serialize>(records: &[T], output: &Output, stdout: &mut dyn Write) -> Result<()> {
    let format = output.format.unwrap_or(Format::Csv);
    match &output.out {
        Some(path) => write_records(std::fs::File::create(path)?, records, format),
        None => write_records(stdout, records, format),
    }
}

fn params(a: &str, x: &str) -> Result<EllipsoidParams> {
    EllipsoidParams::parse(a, x)
}

/// Executes a parsed command; returns the exit code.
pub fn execute(cli: Cli, stdout: &mut dyn Write) -> Result<i32> {
    if cli.precision < MIN_DIGITS {
        return Err(Error::Domain(format!("--precision must be at least {MIN_DIGITS}")));
    }
    if cli.budget == 0 {
        return Err(Error::Domain("--budget must be positive".into()));
    }
    let mut hp = Hp::new(cli.precision);
    let budget = Budget(cli.budget);
    match cli.command {
        Command::Count(cell) => {
            let p = params(&cell.a, &cell.x)?;
            let start = Instant::now();
            let d = discrepancy(&mut hp, &p, budget)?;
            let mut rec = RunRecord::new(&p);
            rec.n_count = Some(d.n_count);
            rec.volume = Some(hp.format(&d.volume));
            rec.p_value = Some(hp.format(&d.p_value));
            if cell.output.timing {
                rec.wall_time_ms = Some(start.elapsed().as_millis() as u64);
            }
            emit(&[rec], &cell.output, stdout)?;
            Ok(0)
        }
        Command::Bound(cell) => {
            let p = params(&cell.a, &cell.x)?;
            let start = Instant::now();
            let b = theorem_rhs(&mut hp, p.a(), p.x());
            let mut rec = RunRecord::new(&p);
            rec.fill_bound(&mut hp, &b);
            if cell.output.timing {
                rec.wall_time_ms = Some(start.elapsed().as_millis() as u64);
            }
            emit(&[rec], &cell.output, stdout)?;
            Ok(0)
        }
        Command::Verify { suite, limit, format, out } => {
            let report = verify::run(suite, limit, &mut hp, budget)?;
            let text = match format {
                Some(Format::Json) => serde_json::to_string_pretty(&report)? + "\n",
                _ => report.to_string() + "\n",
            };
            match out {
                Some(path) => std::fs::write(path, text)?,
                None => stdout.write_all(text.as_bytes())?,
            }
            Ok(if report.passed() { 0 } else { 1 })
        }
        Command::Sweep { a, x, output } => {
            let a_values = a.iter().map(|s| rational::parse_positive(s, "a")).collect::<Result<Vec<_>>>()?;
            let x_values = x.iter().map(|s| rational::parse_positive(s, "x")).collect::<Result<Vec<_>>>()?;
            let mut rows = Vec::with_capacity(a_values.len() * x_values.len());
            for av in &a_values {
                for xv in &x_values {
                    let p = EllipsoidParams::new(av.clone(), xv.clone())?;
                    rows.push(sweep_cell(&mut hp, &p, budget, output.timing)?);
                }
            }
            emit(&rows, &output, stdout)?;
            Ok(if rows.iter().any(|r| r.holds == Some(false)) { 1 } else { 0 })
        }
        Command::Estimate { a, x, u, z, output } => {
            let p = params(&a, &x)?;
            let u = match u {
                Some(s) => rational::parse_positive(&s, "u")?,
                None => p.x() / Rational::from_integer(20.into()),
            };
            let rec = estimate(&mut hp, &p, &u, z, budget)?;
            emit(&[rec], &output, stdout)?;
            Ok(0)
        }
    }
}

/// Parses `args`, runs the command on a pool of `--threads` workers and reports errors
/// on `stderr`. Returns the process exit code.
pub fn main_with<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = if code == 0 { write!(stdout, "{e}") } else { write!(stderr, "{e}") };
            return code;
        }
    };
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cli.threads {
        if n == 0 {
            let _ = writeln!(stderr, "error: --threads must be positive");
            return 2;
        }
        builder = builder.num_threads(n);
    }
    let pool = match builder.build() {
        Ok(p) => p,
        Err(e) => {
            let _ = writeln!(stderr, "error: cannot start worker pool: {e}");
            return 1;
        }
    };
    let mut buf = Vec::new();
    let result = pool.install(|| execute(cli, &mut buf));
    if stdout.write_all(&buf).and_then(|_| stdout.flush()).is_err() {
        let _ = writeln!(stderr, "error: cannot write output");
        return 1;
    }
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            exit_code(&e)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(args: &[&str]) -> (i32, String, String) {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = main_with(std::iter::once("ellipsoid-lattice").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn header_matches_record_fields() {
        let (code, out, _) = run(&["count", "--a", "1", "--x", "1"]);
        assert_eq!(code, 0);
        let mut lines = out.lines();
        assert_eq!(lines.next(), Some(CSV_HEADER));
        assert!(lines.next().unwrap().starts_with("1,1,7,"));
    }

    #[test]
    fn exit_codes() {
        assert_eq!(run(&["count", "--a", "0", "--x", "1"]).0, 2);
        assert_eq!(run(&["count", "--a", "0.5", "--x", "1"]).0, 2);
        assert_eq!(run(&["count", "--a", "1", "--x", "1000000", "--budget", "10"]).0, 3);
        assert_eq!(run(&["verify", "nosuchsuite"]).0, 2);
        assert_eq!(run(&["--precision", "10", "bound", "--a", "1", "--x", "1"]).0, 2);
    }

    #[test]
    fn bound_flags_invalid_cell() {
        let (code, out, _) = run(&["bound", "--a", "1", "--x", "1", "--format", "json"]);
        assert_eq!(code, 0);
        let recs: Vec<RunRecord> = read_records(out.as_bytes(), Format::Json).unwrap();
        assert_eq!(recs[0].precond_27, Some(false));
        assert_eq!(recs[0].n_count, None);
    }

    #[test]
    fn csv_round_trip() {
        let (_, out, _) = run(&["sweep", "--a", "1,2", "--x", "1,20", "--precision", "20"]);
        let recs: Vec<RunRecord> = read_records(out.as_bytes(), Format::Csv).unwrap();
        assert_eq!(recs.len(), 4);
        let mut again = Vec::new();
        write_records(&mut again, &recs, Format::Csv).unwrap();
        assert_eq!(String::from_utf8(again).unwrap(), out);
    }
}
