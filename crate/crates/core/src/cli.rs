//! Command-line front end: model-vs-QM sweeps, oracle verification and
//! granularity scans, written as CSV or JSON.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::beamsplitter::{bmap_from_tau, probability_bs, PhotonQuery};
use crate::enumeration::{enumerate_event_sequences, verify_cardinalities, ENUMERATION_LIMIT};
use crate::error::Error;
use crate::exactmath::multinomial;
use crate::sgmodel::{probability, Diagnostic, LCondition, Mode, ModelQuery};
use crate::statespace::{
    base8_from_quantum, l_range, marginals, quantum_from_base8, Base4Counts, Base8Counts, Role,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ORACLE_MISMATCH: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_NEGATIVE_WEIGHT: i32 = 3;

/// Largest `n` accepted by `oracle-verify`.
pub const ORACLE_VERIFY_LIMIT: u32 = 6;

/// p_qm values at or below this count as zero in a granularity scan.
pub const QM_ZERO_FLOOR: f64 = 1e-24;

#[derive(Parser, Debug)]
#[command(
    name = "ontic",
    version,
    about = "Sequence-counting spin model vs. quantum mechanics"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Two rotated Stern-Gerlach detectors: model and Wigner reference per grid angle.
    CompareSg(SgArgs),
    /// Photon number states through a beam splitter.
    CompareBs(BsArgs),
    /// Exhaustive check of the closed-form counts against enumeration (n <= 6).
    OracleVerify(OracleArgs),
    /// Outcomes the model forbids exactly while QM allows them.
    GranularityScan(ScanArgs),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Args, Debug)]
struct OutputArgs {
    /// Output file (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Args, Debug)]
struct ModelArgs {
    /// plain | interference (default: plain for two_j = 1, interference otherwise).
    #[arg(long)]
    mode: Option<String>,
    /// <int> | paper-tuned | sum-all
    #[arg(
        long = "fix-two-la",
        default_value = "sum-all",
        allow_hyphen_values = true
    )]
    fix_two_la: String,
    /// all | comma-separated b_map values
    #[arg(long, default_value = "all")]
    grid: String,
}

#[derive(Args, Debug)]
struct SgArgs {
    #[arg(long)]
    n: u32,
    #[arg(long = "two-j")]
    two_j: u32,
    #[arg(long = "two-ma", allow_hyphen_values = true)]
    two_ma: i32,
    #[command(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug)]
struct BsArgs {
    #[arg(long)]
    n: u32,
    #[arg(long)]
    ca: u32,
    #[arg(long)]
    da: u32,
    /// Comma-separated transmittances, each snapped to the nearest grid point.
    #[arg(long, conflicts_with = "grid")]
    tau: Option<String>,
    /// Largest accepted |tau - grid tau| when snapping.
    #[arg(long = "tau-tol", default_value_t = 0.01)]
    tau_tol: f64,
    #[command(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug)]
struct OracleArgs {
    #[arg(long)]
    n: u32,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug)]
struct ScanArgs {
    #[arg(long)]
    n: u32,
    #[arg(long = "two-j", required_unless_present = "ca")]
    two_j: Option<u32>,
    #[arg(
        long = "two-ma",
        allow_hyphen_values = true,
        required_unless_present = "ca"
    )]
    two_ma: Option<i32>,
    /// Photon form: input count at port C (with --da).
    #[arg(long, requires = "da", conflicts_with_all = ["two_j", "two_ma"])]
    ca: Option<u32>,
    #[arg(long, requires = "ca")]
    da: Option<u32>,
    #[command(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    output: OutputArgs,
}

/// Failure of a subcommand, carrying its exit code.
#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn invalid(e: impl std::fmt::Display) -> Self {
        Failure {
            code: EXIT_INVALID,
            message: e.to_string(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::invalid(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::invalid(format!("i/o error: {e}"))
    }
}

/// Parses `args` (program name first), runs the subcommand and returns the
/// process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() {
                EXIT_INVALID
            } else {
                EXIT_OK
            };
            let sink: &mut dyn Write = if e.use_stderr() { stderr } else { stdout };
            let _ = write!(sink, "{}", e.render());
            return code;
        }
    };
    let outcome = match &cli.command {
        Command::CompareSg(a) => compare_sg(a, stdout),
        Command::CompareBs(a) => compare_bs(a, stdout),
        Command::OracleVerify(a) => oracle_verify(a, stdout),
        Command::GranularityScan(a) => granularity_scan(a, stdout),
    };
    match outcome {
        Ok(code) => {
            if code == EXIT_NEGATIVE_WEIGHT {
                let _ = writeln!(stderr, "warning: negative weight diagnostic fired");
            }
            code
        }
        Err(f) => {
            let _ = writeln!(stderr, "error: {}", f.message);
            f.code
        }
    }
}

/// `x` with 12 significant digits, in the style of C's `%.12g`.
pub fn format_float(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    const DIGITS: i32 = 12;
    let sci = format!("{:.*e}", (DIGITS - 1) as usize, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..DIGITS).contains(&exp) {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{}{:02}", trim_zeros(mantissa), sign, exp.abs())
    } else {
        let decimals = (DIGITS - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn parse_grid(spec: &str, n: u32) -> Result<Vec<u32>, Failure> {
    let mut grid: Vec<u32> = if spec == "all" {
        (0..=n).collect()
    } else {
        spec.split(',')
            .map(|s| {
                s.trim()
                    .parse::<u32>()
                    .map_err(|_| Failure::invalid(format!("bad grid value `{s}`")))
            })
            .collect::<Result<_, _>>()?
    };
    if let Some(bad) = grid.iter().find(|&&b| b > n) {
        return Err(Failure::invalid(format!(
            "grid value {bad} outside [0, {n}]"
        )));
    }
    grid.sort_unstable();
    grid.dedup();
    Ok(grid)
}

fn model_settings(args: &ModelArgs, two_j: u32) -> Result<(Mode, LCondition), Failure> {
    let mode = match &args.mode {
        Some(m) => m.parse()?,
        None => Mode::default_for(two_j),
    };
    Ok((mode, args.fix_two_la.parse()?))
}

/// A rectangular table with a fixed header; the optional `warning` column
/// is appended only when some row carries a warning.
struct Table {
    header: Vec<&'static str>,
    rows: Vec<Vec<Cell>>,
    warnings: Vec<Option<String>>,
}

#[derive(Clone, Debug)]
enum Cell {
    Text(String),
    Int(i64),
    Float(f64),
}

impl Table {
    fn new(header: &[&'static str]) -> Self {
        Table {
            header: header.to_vec(),
            rows: Vec::new(),
            warnings: Vec::new(),
        }
    }

    fn push(&mut self, row: Vec<Cell>, warning: Option<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
        self.warnings.push(warning);
    }

    fn has_warnings(&self) -> bool {
        self.warnings.iter().any(Option::is_some)
    }

    fn write(&self, format: Format, sink: &mut dyn Write) -> io::Result<()> {
        match format {
            Format::Csv => self.write_csv(sink),
            Format::Json => self.write_json(sink),
        }
    }

    fn write_csv(&self, sink: &mut dyn Write) -> io::Result<()> {
        let warn = self.has_warnings();
        let mut header = self.header.join(",");
        if warn {
            header.push_str(",warning");
        }
        writeln!(sink, "{header}")?;
        for (row, w) in self.rows.iter().zip(&self.warnings) {
            let mut line: Vec<String> = row
                .iter()
                .map(|c| match c {
                    Cell::Text(s) => s.clone(),
                    Cell::Int(i) => i.to_string(),
                    Cell::Float(x) => format_float(*x),
                })
                .collect();
            if warn {
                line.push(w.clone().unwrap_or_default());
            }
            writeln!(sink, "{}", line.join(","))?;
        }
        Ok(())
    }

    fn write_json(&self, sink: &mut dyn Write) -> io::Result<()> {
        let rows: Vec<serde_json::Map<String, serde_json::Value>> = self
            .rows
            .iter()
            .zip(&self.warnings)
            .map(|(row, w)| {
                let mut obj = serde_json::Map::new();
                for (name, cell) in self.header.iter().zip(row) {
                    let v = match cell {
                        Cell::Text(s) => serde_json::Value::from(s.as_str()),
                        Cell::Int(i) => serde_json::Value::from(*i),
                        Cell::Float(x) => serde_json::Value::from(*x),
                    };
                    obj.insert((*name).to_string(), v);
                }
                if let Some(w) = w {
                    obj.insert("warning".into(), serde_json::Value::from(w.as_str()));
                }
                obj
            })
            .collect();
        serde_json::to_writer_pretty(&mut *sink, &rows)?;
        writeln!(sink)
    }
}

fn emit(table: &Table, output: &OutputArgs, stdout: &mut dyn Write) -> Result<(), Failure> {
    match &output.out {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            table.write(output.format, &mut w)?;
            w.flush()?;
        }
        None => table.write(output.format, stdout)?,
    }
    Ok(())
}

fn emit_serialized<T: Serialize>(
    value: &T,
    csv: &Table,
    output: &OutputArgs,
    stdout: &mut dyn Write,
) -> Result<(), Failure> {
    if output.format == Format::Csv {
        return emit(csv, output, stdout);
    }
    let write = |w: &mut dyn Write| -> io::Result<()> {
        serde_json::to_writer_pretty(&mut *w, value)?;
        writeln!(w)
    };
    match &output.out {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            write(&mut w)?;
            w.flush()?;
        }
        None => write(stdout)?,
    }
    Ok(())
}

fn warning_for(diagnostics: &[Diagnostic], two_m_b2: i32) -> Option<String> {
    diagnostics.iter().find_map(|d| match d {
        Diagnostic::NegativeWeight { two_m_b2: m, .. } if *m == two_m_b2 => Some(d.to_string()),
        _ => None,
    })
}

fn compare_sg(a: &SgArgs, stdout: &mut dyn Write) -> Result<i32, Failure> {
    let (mode, l_condition) = model_settings(&a.model, a.two_j)?;
    let grid = parse_grid(&a.model.grid, a.n)?;
    let base = ModelQuery::new(a.n, a.two_j, a.two_ma, 0)?
        .with_mode(mode)
        .with_l_condition(l_condition);
    base.validate()?;
    let mut table = Table::new(&["theta_over_pi", "two_m_b2", "p_model", "p_qm", "abs_delta"]);
    for b_map in grid {
        let mut p = probability(&ModelQuery { b_map, ..base })?;
        p.attach_qm_reference()?;
        for r in &p.rows {
            table.push(
                vec![
                    Cell::Text(format!("{b_map}/{}", a.n)),
                    Cell::Int(r.two_m_b2.into()),
                    Cell::Float(r.p_model),
                    Cell::Float(r.p_qm.unwrap_or(f64::NAN)),
                    Cell::Float(r.abs_delta.unwrap_or(f64::NAN)),
                ],
                warning_for(&p.diagnostics, r.two_m_b2),
            );
        }
    }
    emit(&table, &a.output, stdout)?;
    Ok(if table.has_warnings() {
        EXIT_NEGATIVE_WEIGHT
    } else {
        EXIT_OK
    })
}

fn compare_bs(a: &BsArgs, stdout: &mut dyn Write) -> Result<i32, Failure> {
    let (mode, l_condition) = model_settings(&a.model, a.ca + a.da)?;
    let grid = match &a.tau {
        Some(list) => {
            let mut grid = Vec::new();
            for s in list.split(',') {
                let tau: f64 = s
                    .trim()
                    .parse()
                    .map_err(|_| Failure::invalid(format!("bad tau value `{s}`")))?;
                grid.push(bmap_from_tau(a.n, tau, a.tau_tol)?);
            }
            grid.sort_unstable();
            grid.dedup();
            grid
        }
        None => parse_grid(&a.model.grid, a.n)?,
    };
    let base = PhotonQuery::new(a.n, a.ca, a.da, 0)?
        .with_mode(mode)
        .with_l_condition(l_condition);
    base.to_model_query()?;
    let mut table = Table::new(&["tau", "c_b2", "d_b2", "p_model", "p_qm", "abs_delta"]);
    for b_map in grid {
        let mut t = probability_bs(&PhotonQuery { b_map, ..base })?;
        t.attach_qm_reference()?;
        for (c, d, r) in t.rows() {
            table.push(
                vec![
                    Cell::Float(t.tau),
                    Cell::Int(c.into()),
                    Cell::Int(d.into()),
                    Cell::Float(r.p_model),
                    Cell::Float(r.p_qm.unwrap_or(f64::NAN)),
                    Cell::Float(r.abs_delta.unwrap_or(f64::NAN)),
                ],
                warning_for(&t.table.diagnostics, r.two_m_b2),
            );
        }
    }
    emit(&table, &a.output, stdout)?;
    Ok(if table.has_warnings() {
        EXIT_NEGATIVE_WEIGHT
    } else {
        EXIT_OK
    })
}

#[derive(Debug, Serialize)]
struct CheckResult {
    check: &'static str,
    cases: u64,
    failures: u64,
    first_failure: Option<String>,
}

impl CheckResult {
    fn new(check: &'static str) -> Self {
        CheckResult {
            check,
            cases: 0,
            failures: 0,
            first_failure: None,
        }
    }

    fn record(&mut self, ok: bool, describe: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok {
            self.failures += 1;
            if self.first_failure.is_none() {
                self.first_failure = Some(describe());
            }
        }
    }
}

/// Round trips and marginals over every experiment sequence of length `n`,
/// and event-space sizes against multinomials.
fn structural_checks(n: u32) -> Result<[CheckResult; 3], Failure> {
    let mut roundtrip = CheckResult::new("roundtrip");
    let mut marginal = CheckResult::new("marginals");
    let mut spaces = CheckResult::new("event_spaces");

    let total = 8u64.pow(n);
    for code in 0..total {
        let mut c = [0u32; 8];
        let mut rest = code;
        for _ in 0..n {
            c[(rest % 8) as usize] += 1;
            rest /= 8;
        }
        let counts = Base8Counts::from_array(c);
        let cfg = quantum_from_base8(&counts);
        roundtrip.record(base8_from_quantum(&cfg).ok() == Some(counts), || {
            cfg.to_string()
        });
        let m = marginals(&counts);
        let a1 = Base4Counts::for_event(n, cfg.two_j, cfg.two_m_a1, cfg.two_l_a1, Role::A1);
        let b2 = Base4Counts::for_event(n, cfg.two_j, cfg.two_m_b2, cfg.two_l_b2, Role::B2);
        marginal.record(
            a1 == Some(m.a1) && b2 == Some(m.b2) && m.map.b == cfg.b_map,
            || cfg.to_string(),
        );
    }

    let mut seen = 0u64;
    for two_j in 0..=n {
        let j = two_j as i32;
        for two_m in (-j..=j).step_by(2) {
            for two_l in l_range(n, two_j) {
                let seqs = enumerate_event_sequences(n, two_j, two_m, two_l)?;
                let parts = Base4Counts::for_event(n, two_j, two_m, two_l, Role::A1)
                    .map(|c| c.to_array().map(|x| x as usize));
                let expect = match parts {
                    Some(p) => multinomial(&p)?,
                    None => 0u32.into(),
                };
                spaces.record(expect == (seqs.len() as u64).into(), || {
                    format!("n={n} two_j={two_j} two_m={two_m} two_l={two_l}")
                });
                seen += seqs.len() as u64;
            }
        }
    }
    spaces.record(seen == 4u64.pow(n), || {
        format!("event spaces cover {seen} of {} sequences", 4u64.pow(n))
    });
    Ok([roundtrip, marginal, spaces])
}

fn oracle_verify(a: &OracleArgs, stdout: &mut dyn Write) -> Result<i32, Failure> {
    if a.n == 0 || a.n > ORACLE_VERIFY_LIMIT {
        return Err(Failure::invalid(format!(
            "oracle-verify accepts 1 <= n <= {ORACLE_VERIFY_LIMIT}, got {}",
            a.n
        )));
    }
    const { assert!(ORACLE_VERIFY_LIMIT <= ENUMERATION_LIMIT) };
    let report = verify_cardinalities(a.n)?;
    let mut card = CheckResult::new("cardinality");
    card.cases = report.cells_checked;
    card.failures = report.mismatches.len() as u64;
    card.first_failure = report.mismatches.first().map(|m| {
        format!(
            "{} side={:?} brute_force={} closed_form={}",
            m.config, m.side, m.brute_force, m.closed_form
        )
    });
    let [roundtrip, marginal, spaces] = structural_checks(a.n)?;
    let checks = [card, roundtrip, marginal, spaces];

    let mut table = Table::new(&["check", "cases", "failures", "first_failure"]);
    for c in &checks {
        table.push(
            vec![
                Cell::Text(c.check.into()),
                Cell::Int(c.cases as i64),
                Cell::Int(c.failures as i64),
                Cell::Text(
                    c.first_failure
                        .clone()
                        .unwrap_or_default()
                        .replace(',', ";"),
                ),
            ],
            None,
        );
    }
    emit_serialized(&checks, &table, &a.output, stdout)?;
    match checks.iter().find(|c| c.failures > 0) {
        Some(c) => Err(Failure {
            code: EXIT_ORACLE_MISMATCH,
            message: format!(
                "{} check failed at {}",
                c.check,
                c.first_failure.as_deref().unwrap_or("?")
            ),
        }),
        None => Ok(EXIT_OK),
    }
}

fn granularity_scan(a: &ScanArgs, stdout: &mut dyn Write) -> Result<i32, Failure> {
    let photon = a.ca.zip(a.da);
    let (two_j, two_ma) = match photon {
        Some((c, d)) => (c + d, c as i32 - d as i32),
        None => (
            a.two_j
                .ok_or_else(|| Failure::invalid("--two-j is required"))?,
            a.two_ma
                .ok_or_else(|| Failure::invalid("--two-ma is required"))?,
        ),
    };
    let (mode, l_condition) = model_settings(&a.model, two_j)?;
    let grid = parse_grid(&a.model.grid, a.n)?;
    let base = ModelQuery::new(a.n, two_j, two_ma, 0)?
        .with_mode(mode)
        .with_l_condition(l_condition);
    let mut table = match photon {
        Some(_) => Table::new(&["tau", "c_b2", "d_b2", "p_model", "p_qm"]),
        None => Table::new(&["theta_over_pi", "two_m_b2", "p_model", "p_qm"]),
    };
    for b_map in grid {
        let mut p = probability(&ModelQuery { b_map, ..base })?;
        p.attach_qm_reference()?;
        for r in &p.rows {
            let p_qm = r.p_qm.unwrap_or(0.0);
            if !(r.probability.is_zero() && p_qm > QM_ZERO_FLOOR) {
                continue;
            }
            let row = match photon {
                Some(_) => {
                    let c = ((two_j as i32 + r.two_m_b2) / 2) as i64;
                    vec![
                        Cell::Float(crate::beamsplitter::tau_from_bmap(a.n, b_map)?),
                        Cell::Int(c),
                        Cell::Int(i64::from(two_j) - c),
                        Cell::Float(r.p_model),
                        Cell::Float(p_qm),
                    ]
                }
                None => vec![
                    Cell::Text(format!("{b_map}/{}", a.n)),
                    Cell::Int(r.two_m_b2.into()),
                    Cell::Float(r.p_model),
                    Cell::Float(p_qm),
                ],
            };
            table.push(row, warning_for(&p.diagnostics, r.two_m_b2));
        }
    }
    emit(&table, &a.output, stdout)?;
    Ok(if table.has_warnings() {
        EXIT_NEGATIVE_WEIGHT
    } else {
        EXIT_OK
    })
}
