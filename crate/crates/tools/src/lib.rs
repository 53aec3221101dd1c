//! File formats and the `symgt` command line.
//!
//! Exit codes: 0 on success, 1 when a verified property fails or decoding is
//! ambiguous, 2 on usage or input errors. Payloads (JSON or CSV) go to
//! standard output and diagnostics to standard error.

use std::ffi::OsString;
use std::io::Write;
use std::path::Path;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use symgt_core::alpha::alpha_opt;
use symgt_core::bounds::{self, BoundKind};
use symgt_core::codes::{self, Property, VerifyOptions};
use symgt_core::decode::{decode_exhaustive_with, DecodeOptions};
use symgt_core::precise::sgt_agt_ratio;
use symgt_core::sim::{run_trials, Design, TrialConfig};
use symgt_core::{CodeMatrix, Family, TernaryWord, TestModel};

pub mod records;

use records::*;

/// Reads a code from a matrix text file.
pub fn read_matrix(path: &Path) -> Result<CodeMatrix, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
    Ok(codes::load_matrix(&text)?)
}

pub fn write_matrix(path: &Path, code: &CodeMatrix) -> std::io::Result<()> {
    std::fs::write(path, codes::save_matrix(code))
}

#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Self { code: 2, message: message.into() }
    }
}

impl From<symgt_core::Error> for Failure {
    fn from(e: symgt_core::Error) -> Self {
        let code = if matches!(e, symgt_core::Error::Ambiguous { .. }) { 1 } else { 2 };
        Self { code, message: e.to_string() }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Self::usage(e.to_string())
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Self::usage(e.to_string())
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Self::usage(e.to_string())
    }
}

#[derive(Parser, Debug)]
#[command(name = "symgt", version, about = "Symmetric group testing: design criteria, bounds, codes and simulation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ModelName {
    Agt,
    Sgt,
    Ggt,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ConstructKind {
    Bch,
}

#[derive(clap::Args, Debug)]
struct ModelArgs {
    #[arg(long, value_enum, default_value = "sgt")]
    model: ModelName,
    /// Inclusion probability per subject and test.
    #[arg(long, default_value_t = 0.5)]
    p: f64,
    /// Noise parameter; omit for noise-free tests.
    #[arg(long)]
    q: Option<f64>,
    #[arg(long)]
    eta1: Option<usize>,
    #[arg(long)]
    eta2: Option<usize>,
}

impl ModelArgs {
    fn build(&self) -> Result<TestModel, Failure> {
        let model = match (self.model, self.eta1, self.eta2) {
            (ModelName::Ggt, Some(e1), Some(e2)) => TestModel::ggt(self.p, e1, e2),
            (ModelName::Ggt, _, _) => return Err(Failure::usage("--model ggt needs --eta1 and --eta2")),
            (_, None, None) => match self.model {
                ModelName::Agt => TestModel::agt(self.p),
                _ => TestModel::sgt(self.p),
            },
            _ => return Err(Failure::usage("--eta1/--eta2 only apply to --model ggt")),
        };
        Ok(match self.q {
            Some(q) => model.with_noise(q),
            None => model,
        })
    }
}

#[derive(clap::Args, Debug)]
struct MRange {
    /// A single m.
    #[arg(long, conflicts_with = "m_max")]
    m: Option<usize>,
    /// Every m from 2 up to this value.
    #[arg(long)]
    m_max: Option<usize>,
}

impl MRange {
    fn values(&self) -> Result<std::ops::RangeInclusive<usize>, Failure> {
        match (self.m, self.m_max) {
            (Some(m), _) if m >= 2 => Ok(m..=m),
            (None, Some(hi)) if hi >= 2 => Ok(2..=hi),
            (None, None) => Err(Failure::usage("give --m or --m-max")),
            _ => Err(Failure::usage("m must be at least 2")),
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Optimal two-threshold designs: every maximizing (p, eta1, eta2) per m.
    Table1 {
        #[command(flatten)]
        range: MRange,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
    /// Optimized criteria for asymmetric, symmetric and two-threshold tests.
    Alpha {
        #[command(flatten)]
        range: MRange,
        #[arg(long)]
        q: Option<f64>,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
    /// Checks a code file for a superimposed-code property.
    Verify {
        #[arg(long)]
        file: std::path::PathBuf,
        #[arg(long, value_parser = parse_property)]
        property: Property,
        #[arg(long)]
        m: Option<usize>,
        /// Ignore the exhaustive-search size limits.
        #[arg(long)]
        force: bool,
    },
    /// Prints a constructed code in matrix text format.
    Construct {
        #[arg(value_enum)]
        kind: ConstructKind,
        #[arg(long)]
        k: u32,
    },
    /// Evaluates one of the test-count or code-size bounds.
    Bounds {
        #[arg(long, value_parser = parse_bound_kind)]
        kind: BoundKind,
        /// Code length (number of tests).
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        m: Option<usize>,
        /// Number of subjects.
        #[arg(long = "N")]
        subjects: Option<u64>,
        /// Parity bits for the construction estimates.
        #[arg(long)]
        r: Option<u32>,
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Decodes one observation against a code file.
    Decode {
        #[arg(long)]
        file: std::path::PathBuf,
        /// Observed ternary word, first test first.
        #[arg(long)]
        y: String,
        #[arg(long)]
        m: usize,
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        force: bool,
    },
    /// Monte Carlo estimate of the exact-recovery error rate.
    Simulate {
        #[arg(long = "N")]
        subjects: usize,
        #[arg(long)]
        m: usize,
        /// Number of tests; a comma-separated list runs a sweep.
        #[arg(long, value_delimiter = ',', required = true)]
        n: Vec<usize>,
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, default_value_t = 1000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Fixed design read from a matrix file instead of a random one.
        #[arg(long)]
        file: Option<std::path::PathBuf>,
        #[arg(long)]
        force: bool,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
}

fn parse_property(s: &str) -> Result<Property, String> {
    Property::from_name(s).ok_or_else(|| format!("unknown property {s:?} (disjunct, separable, dmin5)"))
}

fn parse_bound_kind(s: &str) -> Result<BoundKind, String> {
    BoundKind::from_name(s).ok_or_else(|| {
        let names: Vec<_> = BoundKind::ALL.iter().map(|k| k.name()).collect();
        format!("unknown kind {s:?} ({})", names.join(", "))
    })
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let _ = if code == 0 { write!(out, "{}", e.render()) } else { write!(err, "{}", e.render()) };
            return code;
        }
    };
    match dispatch(cli.command, out) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "symgt: {}", f.message);
            f.code
        }
    }
}

fn dispatch(command: Command, out: &mut dyn Write) -> Result<i32, Failure> {
    match command {
        Command::Table1 { range, format } => table1(range.values()?, format, out),
        Command::Alpha { range, q, format } => alpha_curves(range.values()?, q, format, out),
        Command::Verify { file, property, m, force } => verify(&read_matrix(&file)?, property, m, force, out),
        Command::Construct { kind: ConstructKind::Bch, k } => {
            out.write_all(codes::save_matrix(&codes::bch_parity_check(k)?).as_bytes())?;
            Ok(0)
        }
        Command::Bounds { kind, n, m, subjects, r, model, format } => {
            let report = bound(kind, n, m, subjects, r, &model)?;
            let record = BoundRecord::from(&report);
            match format {
                Format::Json => json(out, &record)?,
                Format::Csv => csv_rows(out, &BOUND_HEADER, [record.csv_fields()])?,
            }
            Ok(0)
        }
        Command::Decode { file, y, m, model, force } => {
            let code = read_matrix(&file)?;
            let y: TernaryWord = y.parse()?;
            let model = model.build()?;
            match decode_exhaustive_with(&code, &y, m, &model, DecodeOptions { force }) {
                Ok(set) => {
                    json(out, &DecodeRecord { decoded: Some(set.indices().to_vec()), ambiguous: None })?;
                    Ok(0)
                }
                Err(symgt_core::Error::Ambiguous { best }) => {
                    json(out, &DecodeRecord { decoded: None, ambiguous: Some(best) })?;
                    Ok(1)
                }
                Err(e) => Err(e.into()),
            }
        }
        Command::Simulate { subjects, m, n, model, trials, seed, file, force, format } => {
            let model = model.build()?;
            let design = match &file {
                Some(path) => Design::Fixed(read_matrix(path)?),
                None => Design::RandomBernoulli { p: model.p },
            };
            let mut rows = Vec::with_capacity(n.len());
            for tests in n {
                let config = TrialConfig {
                    subjects,
                    m,
                    tests,
                    model,
                    trials,
                    seed,
                    design: design.clone(),
                    decode: DecodeOptions { force },
                };
                rows.push(SimulationRecord::from(&run_trials(&config)?));
            }
            match format {
                Format::Json if rows.len() == 1 => json(out, &rows[0])?,
                Format::Json => json(out, &rows)?,
                Format::Csv => csv_rows(out, &SWEEP_HEADER, rows.iter().map(|r| r.csv_fields()))?,
            }
            Ok(0)
        }
    }
}

fn json<T: Serialize + ?Sized>(out: &mut dyn Write, value: &T) -> Result<(), Failure> {
    serde_json::to_writer_pretty(&mut *out, value)?;
    writeln!(out)?;
    Ok(())
}

fn csv_rows<const K: usize, R>(out: &mut dyn Write, header: &[&str; K], rows: R) -> Result<(), Failure>
where
    R: IntoIterator<Item = [String; K]>,
{
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header)?;
    for row in rows {
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// Every maximizer of the two-threshold criterion, sorted by `(m, p)`.
pub fn table1_rows(ms: std::ops::RangeInclusive<usize>) -> Result<Vec<Table1Row>, Failure> {
    let mut rows = Vec::new();
    for m in ms {
        let res = alpha_opt(m, Family::Ggt, None)?;
        for mx in &res.maximizers {
            let (eta1, eta2) = mx.thresholds.expect("two-threshold maximizers carry thresholds");
            rows.push(Table1Row {
                m,
                model: "ggt".into(),
                p_star: mx.p,
                eta1_star: eta1,
                eta2_star: eta2,
                alpha: mx.alpha,
            });
        }
    }
    Ok(rows)
}

fn table1(ms: std::ops::RangeInclusive<usize>, format: Format, out: &mut dyn Write) -> Result<i32, Failure> {
    let rows = table1_rows(ms)?;
    match format {
        Format::Json => json(out, &rows)?,
        Format::Csv => csv_rows(out, &TABLE1_HEADER, rows.iter().map(Table1Row::csv_fields))?,
    }
    Ok(0)
}

pub fn alpha_rows(ms: std::ops::RangeInclusive<usize>, q: Option<f64>) -> Result<Vec<AlphaRow>, Failure> {
    let mut rows = Vec::new();
    for m in ms {
        let ratio = sgt_agt_ratio(m, q)?;
        let alpha_g = match q {
            None => Some(alpha_opt(m, Family::Ggt, None)?.value),
            Some(_) => None,
        };
        rows.push(AlphaRow { m, alpha_a: ratio.alpha_a, alpha_s: ratio.alpha_s, alpha_g, excess: ratio.excess });
    }
    Ok(rows)
}

fn alpha_curves(
    ms: std::ops::RangeInclusive<usize>,
    q: Option<f64>,
    format: Format,
    out: &mut dyn Write,
) -> Result<i32, Failure> {
    let rows = alpha_rows(ms, q)?;
    match format {
        Format::Json => json(out, &rows)?,
        Format::Csv => csv_rows(out, &ALPHA_HEADER, rows.iter().map(AlphaRow::csv_fields))?,
    }
    Ok(0)
}

fn verify(code: &CodeMatrix, property: Property, m: Option<usize>, force: bool, out: &mut dyn Write) -> Result<i32, Failure> {
    let opts = VerifyOptions { force };
    let need_m = || m.ok_or_else(|| Failure::usage(format!("--property {} needs --m", property.name())));
    let witness = match property {
        Property::Disjunct => codes::verify_disjunct_with(code, need_m()?, opts)?,
        Property::Separable => codes::verify_separable_with(code, need_m()?, opts)?,
        Property::Dmin5 => codes::verify_dmin5(code),
    };
    json(out, &WitnessRecord::new(&witness, code))?;
    Ok(if witness.verdict { 0 } else { 1 })
}

fn bound(
    kind: BoundKind,
    n: Option<usize>,
    m: Option<usize>,
    subjects: Option<u64>,
    r: Option<u32>,
    model: &ModelArgs,
) -> Result<bounds::BoundReport, Failure> {
    fn need<T>(v: Option<T>, flag: &str, kind: BoundKind) -> Result<T, Failure> {
        v.ok_or_else(|| Failure::usage(format!("--kind {} needs {flag}", kind.name())))
    }
    Ok(match kind {
        BoundKind::SufficientN => {
            bounds::sufficient_tests(need(subjects, "--N", kind)?, need(m, "--m", kind)?, &model.build()?)?
        }
        BoundKind::NecessaryN => {
            bounds::necessary_tests(need(subjects, "--N", kind)?, need(m, "--m", kind)?, &model.build()?)?
        }
        BoundKind::DisjunctMaxN => bounds::lll_disjunct_max_n(need(n, "--n", kind)?, need(m, "--m", kind)?)?,
        BoundKind::DisjunctMaxNAgt => bounds::lll_disjunct_max_n_agt(need(n, "--n", kind)?, need(m, "--m", kind)?)?,
        BoundKind::SeparableMaxN => bounds::lll_separable_max_n(need(n, "--n", kind)?)?,
        BoundKind::GvEstimate => bounds::gv_report(need(r, "--r", kind)?)?,
        BoundKind::SphereEstimate => bounds::sphere_report(need(r, "--r", kind)?)?,
        BoundKind::RateRatio => bounds::rate_ratio_report(need(m, "--m", kind)?)?,
    })
}
