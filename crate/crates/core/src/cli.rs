//! The `wigner` command line.
//!
//! Every subcommand writes one table, either as CSV (a `# config: …` line
//! echoing the effective configuration, a header row, LF line endings) or as
//! a single JSON object with `config` and `rows` keys. Settings come from
//! flags, then from an optional TOML file given by `--config`, then from
//! defaults.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use crate::combinatorics::{
    family_counts, nu_moment, order_one_coeff, semicircle_moment, EnsembleParams, ParamError,
};
use crate::measure::{semicircle_density, semicircle_stieltjes, MeasureError, SignedMeasureNu};
use crate::montecarlo::{
    estimate_corrections, EnsembleSampler, MonteCarloError, RichardsonEstimate,
};
use crate::oracle::{
    class_census, enumerate_canonical_words, expected_word_product, moment_polynomial, CycleType,
    OracleError, MAX_WORD_LENGTH,
};
use crate::series::{
    cancellation_combination, catalan_identities, catalan_series, generating_series_checks,
    s_total_from, IdentityCheck, CANCELLATION_WEIGHTS,
};

/// Largest word length the `check` command enumerates.
const CHECK_CLASS_LENGTH: usize = 10;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid parameters: {0}")]
    Params(#[from] ParamError),
    #[error("{0}")]
    Config(String),
    #[error("cannot read config file {}: {source}", path.display())]
    ReadConfig { path: PathBuf, source: io::Error },
    #[error("invalid config file {}: {source}", path.display())]
    ParseConfig {
        path: PathBuf,
        source: toml::de::Error,
    },
    #[error("cannot write {}: {source}", path.display())]
    CreateOutput { path: PathBuf, source: io::Error },
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    MonteCarlo(#[from] MonteCarloError),
    #[error(transparent)]
    Measure(#[from] MeasureError),
    #[error("{failed} identity check(s) failed; first: {first}")]
    ChecksFailed { failed: usize, first: String },
}

impl CliError {
    /// 1 for failed identity checks, 2 for anything that stopped the run.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::ChecksFailed { .. } => 1,
            _ => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Ensemble {
    Goe,
    Gue,
    Rademacher,
    Custom,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Parser)]
#[command(
    name = "wigner",
    version,
    about = "1/n expansion of expected spectral moments of Wigner matrices"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Default, Args)]
pub struct GlobalOpts {
    /// TOML file whose keys mirror the long flags; flags take precedence.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Entry distribution [default: goe].
    #[arg(long, global = true, value_enum)]
    pub ensemble: Option<Ensemble>,
    /// 1 for real symmetric entries, 0 for complex Hermitian entries.
    #[arg(long, global = true)]
    pub r: Option<u8>,
    /// Off-diagonal variance, as an integer, a decimal or `p/q`.
    #[arg(long, global = true, value_name = "RATIONAL")]
    pub sigma2: Option<String>,
    /// Diagonal variance.
    #[arg(long, global = true, value_name = "RATIONAL")]
    pub s2: Option<String>,
    /// Fourth absolute moment of the off-diagonal entries.
    #[arg(long, global = true, value_name = "RATIONAL")]
    pub alpha: Option<String>,
    /// Largest moment order [default: 8].
    #[arg(long, global = true)]
    pub kmax: Option<usize>,
    /// Matrix sizes; repeat the flag or separate with commas [default: 100].
    #[arg(long = "n", global = true, value_name = "N", value_delimiter = ',')]
    pub n: Vec<u64>,
    /// Monte Carlo samples per matrix size [default: 2000].
    #[arg(long, global = true)]
    pub samples: Option<usize>,
    /// Monte Carlo seed [default: 1].
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output format [default: csv].
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Write to a file instead of standard output.
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Truncation order of the generating series [default: 40].
    #[arg(long, global = true, value_name = "N")]
    pub order: Option<usize>,
}

#[derive(Debug, Clone, Subcommand, Serialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Command {
    /// Table of sc_k, ν_k and sc_k + ν_k/n for k = 0..kmax.
    Moments,
    /// Exact identity suite; exits with status 1 if any identity fails.
    Check {
        /// Add one to the Catalan coefficient of x^INDEX before checking.
        #[arg(long, hide = true, value_name = "INDEX")]
        #[serde(skip_serializing_if = "Option::is_none")]
        inject_fault: Option<usize>,
    },
    /// Canonical closed words of length k with their walk graph and E[W_c].
    Enumerate {
        /// Word length, at most 12.
        #[arg(long)]
        k: usize,
        /// Keep only words with this many distinct letters.
        #[arg(long)]
        v: Option<usize>,
        /// Keep only words with this many distinct edges.
        #[arg(long)]
        e: Option<usize>,
        /// Keep only one kind: tree, self-loop, cycle-one-way,
        /// cycle-both-ways or other.
        #[arg(long)]
        cycle_type: Option<CycleType>,
    },
    /// Monte Carlo estimates of n(m_k(n) - sc_k) for even k ≤ kmax.
    Mc {
        /// Skip the Richardson rows, which need a second run at 2n.
        #[arg(long)]
        no_richardson: bool,
    },
    /// Densities of sc and ν on a grid of (-2, 2).
    Density {
        #[arg(long, default_value_t = 200)]
        points: usize,
    },
    /// Stieltjes transforms of sc and ν on a circle, or on a horizontal line
    /// when --im is given.
    Stieltjes {
        #[arg(long, default_value_t = 16)]
        points: usize,
        /// Circle radius, or half-width of the line.
        #[arg(long, default_value_t = 3.0)]
        radius: f64,
        /// Imaginary part of the line z = x + i·im.
        #[arg(long, allow_hyphen_values = true)]
        im: Option<f64>,
    },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum Scalar {
    Int(i64),
    Float(f64),
    Text(String),
}

impl Scalar {
    fn into_text(self) -> String {
        match self {
            Scalar::Int(i) => i.to_string(),
            Scalar::Float(x) => x.to_string(),
            Scalar::Text(s) => s,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum OneOrMany {
    One(u64),
    Many(Vec<u64>),
}

/// Keys accepted in a `--config` file.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    ensemble: Option<Ensemble>,
    r: Option<u8>,
    sigma2: Option<Scalar>,
    s2: Option<Scalar>,
    alpha: Option<Scalar>,
    kmax: Option<usize>,
    n: Option<OneOrMany>,
    samples: Option<usize>,
    seed: Option<u64>,
    format: Option<Format>,
    out: Option<PathBuf>,
    order: Option<usize>,
}

fn load_file_config(path: &Path) -> Result<FileConfig, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::ReadConfig {
        path: path.to_owned(),
        source,
    })?;
    toml::from_str(&text).map_err(|source| CliError::ParseConfig {
        path: path.to_owned(),
        source,
    })
}

/// Parse `p/q`, an integer, or a decimal such as `2.5` or `1e-3`, exactly.
pub fn parse_rational(text: &str) -> Result<BigRational, String> {
    let t = text.trim();
    let bad = || format!("{text:?} is not a rational number (use p/q, an integer or a decimal)");
    if let Some((p, q)) = t.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| bad())?;
        let q: BigInt = q.trim().parse().map_err(|_| bad())?;
        if q.is_zero() {
            return Err(format!("{text:?} has a zero denominator"));
        }
        return Ok(BigRational::new(p, q));
    }
    let (mantissa, exponent) = match t.find(['e', 'E']) {
        Some(i) => (&t[..i], t[i + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (t, 0),
    };
    let (sign, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (-1, rest),
        None => (1, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (whole, frac) = digits.split_once('.').unwrap_or((digits, ""));
    if whole.is_empty() && frac.is_empty()
        || !whole
            .chars()
            .chain(frac.chars())
            .all(|c| c.is_ascii_digit())
    {
        return Err(bad());
    }
    let numer: BigInt = format!("{whole}{frac}").parse().map_err(|_| bad())?;
    let scale = exponent - frac.len() as i32;
    let ten = BigInt::from(10u8);
    let value = if scale >= 0 {
        BigRational::from_integer(numer * ten.pow(scale as u32))
    } else {
        BigRational::new(numer, ten.pow(scale.unsigned_abs()))
    };
    Ok(if sign < 0 { -value } else { value })
}

/// Effective settings after merging flags, config file and defaults.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub ensemble: Ensemble,
    pub params: EnsembleParams,
    pub kmax: usize,
    pub n: Vec<u64>,
    pub samples: usize,
    pub seed: u64,
    pub format: Format,
    /// Not echoed, so that the same run written to two paths is identical.
    #[serde(skip)]
    pub out: Option<PathBuf>,
    pub order: usize,
}

impl RunConfig {
    pub fn resolve(opts: &GlobalOpts) -> Result<Self, CliError> {
        let file = match &opts.config {
            Some(path) => load_file_config(path)?,
            None => FileConfig::default(),
        };
        let rational = |flag: &Option<String>, key: Option<Scalar>, name: &str| {
            flag.clone()
                .or(key.map(Scalar::into_text))
                .map(|s| parse_rational(&s).map_err(|e| CliError::Config(format!("--{name}: {e}"))))
                .transpose()
        };
        let ensemble = opts.ensemble.or(file.ensemble).unwrap_or(Ensemble::Goe);
        let r = opts.r.or(file.r);
        let sigma2 = rational(&opts.sigma2, file.sigma2, "sigma2")?;
        let s2 = rational(&opts.s2, file.s2, "s2")?;
        let alpha = rational(&opts.alpha, file.alpha, "alpha")?;
        let params = ensemble_params(ensemble, r, sigma2, s2, alpha)?;

        let n = if !opts.n.is_empty() {
            opts.n.clone()
        } else {
            match file.n {
                Some(OneOrMany::One(n)) => vec![n],
                Some(OneOrMany::Many(ns)) => ns,
                None => vec![100],
            }
        };
        if n.is_empty() || n.contains(&0) {
            return Err(CliError::Config(
                "--n: matrix sizes must be positive".to_string(),
            ));
        }
        Ok(Self {
            ensemble,
            params,
            kmax: opts.kmax.or(file.kmax).unwrap_or(8),
            n,
            samples: opts.samples.or(file.samples).unwrap_or(2000),
            seed: opts.seed.or(file.seed).unwrap_or(1),
            format: opts.format.or(file.format).unwrap_or(Format::Csv),
            out: opts.out.clone().or(file.out),
            order: opts.order.or(file.order).unwrap_or(40),
        })
    }

    /// Entry generator matching the configured ensemble.
    pub fn sampler(&self) -> EnsembleSampler {
        match self.ensemble {
            Ensemble::Goe => EnsembleSampler::goe(),
            Ensemble::Gue => EnsembleSampler::gue(),
            Ensemble::Rademacher => {
                EnsembleSampler::rademacher(self.params.sigma2().clone(), self.params.s2().clone())
                    .expect("validated parameters")
            }
            Ensemble::Custom => EnsembleSampler::custom(&self.params),
        }
    }
}

fn ensemble_params(
    ensemble: Ensemble,
    r: Option<u8>,
    sigma2: Option<BigRational>,
    s2: Option<BigRational>,
    alpha: Option<BigRational>,
) -> Result<EnsembleParams, CliError> {
    match ensemble {
        Ensemble::Goe | Ensemble::Gue => {
            if r.is_some() || sigma2.is_some() || s2.is_some() || alpha.is_some() {
                return Err(CliError::Config(format!(
                    "--ensemble {} fixes (r, sigma2, s2, alpha); use --ensemble custom to set them",
                    if ensemble == Ensemble::Goe {
                        "goe"
                    } else {
                        "gue"
                    }
                )));
            }
            Ok(if ensemble == Ensemble::Goe {
                EnsembleParams::goe()
            } else {
                EnsembleParams::gue()
            })
        }
        Ensemble::Rademacher => {
            if r.is_some_and(|r| r != 1) {
                return Err(CliError::Config(
                    "--ensemble rademacher has real entries, so r = 1".to_string(),
                ));
            }
            let sigma2 = sigma2.unwrap_or_else(BigRational::one);
            let s2 = s2.unwrap_or_else(BigRational::one);
            let sigma4 = &sigma2 * &sigma2;
            if alpha.is_some_and(|a| a != sigma4) {
                return Err(CliError::Config(
                    "--ensemble rademacher has alpha = sigma2^2; omit --alpha".to_string(),
                ));
            }
            Ok(EnsembleParams::new(1, sigma2, s2, sigma4)?)
        }
        Ensemble::Custom => match (r, sigma2, s2, alpha) {
            (Some(r), Some(sigma2), Some(s2), Some(alpha)) => {
                Ok(EnsembleParams::new(r, sigma2, s2, alpha)?)
            }
            _ => Err(CliError::Config(
                "--ensemble custom needs --r, --sigma2, --s2 and --alpha".to_string(),
            )),
        },
    }
}

/// One table cell.
#[derive(Debug, Clone, PartialEq)]
enum Cell {
    Text(String),
    Int(i128),
    Float(f64),
    /// Rendered with 15 significant digits in CSV.
    Decimal(f64),
    Null,
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Text(s) if s.contains([',', '"', '\n', '\r']) => {
                format!("\"{}\"", s.replace('"', "\"\""))
            }
            Cell::Text(s) => s.clone(),
            Cell::Int(i) => i.to_string(),
            Cell::Float(x) => x.to_string(),
            Cell::Decimal(x) => decimal15(*x),
            Cell::Null => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Text(s) => Value::from(s.as_str()),
            Cell::Int(i) => json!(i),
            Cell::Float(x) | Cell::Decimal(x) => Value::from(*x),
            Cell::Null => Value::Null,
        }
    }
}

fn int_cell<T: TryInto<i128>>(v: T) -> Cell {
    v.try_into().map(Cell::Int).unwrap_or(Cell::Null)
}

/// `p/q`, always with a denominator.
fn rational_text(v: &BigRational) -> String {
    format!("{}/{}", v.numer(), v.denom())
}

/// Exact text and decimal cells for one rational.
fn rational_cells(v: &BigRational) -> [Cell; 2] {
    [
        Cell::Text(rational_text(v)),
        Cell::Decimal(v.to_f64().unwrap_or(f64::NAN)),
    ]
}

fn complex_cells(z: Result<Complex64, MeasureError>) -> [Cell; 2] {
    match z {
        Ok(z) => [Cell::Float(z.re), Cell::Float(z.im)],
        Err(_) => [Cell::Null, Cell::Null],
    }
}

/// Fixed notation with 15 significant digits, scientific outside
/// `[1e-5, 1e15)`.
pub fn decimal15(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let exp = x.abs().log10().floor() as i32;
    if (-5..15).contains(&exp) {
        let prec = (14 - exp).max(0) as usize;
        format!("{x:.prec$}")
    } else {
        format!("{x:.14e}")
    }
}

/// Streams a table as CSV or JSON.
struct TableWriter<'a> {
    out: &'a mut dyn Write,
    format: Format,
    columns: Vec<String>,
    rows: usize,
}

impl<'a> TableWriter<'a> {
    fn begin(
        out: &'a mut dyn Write,
        format: Format,
        config: &Value,
        columns: Vec<String>,
    ) -> io::Result<Self> {
        match format {
            Format::Csv => {
                writeln!(out, "# config: {config}")?;
                writeln!(out, "{}", columns.join(","))?;
            }
            Format::Json => {
                write!(out, "{{\"config\":{config},\"rows\":[")?;
            }
        }
        Ok(Self {
            out,
            format,
            columns,
            rows: 0,
        })
    }

    fn row(&mut self, cells: &[Cell]) -> io::Result<()> {
        debug_assert_eq!(cells.len(), self.columns.len());
        match self.format {
            Format::Csv => {
                let line: Vec<String> = cells.iter().map(Cell::csv).collect();
                writeln!(self.out, "{}", line.join(","))?;
            }
            Format::Json => {
                let obj: serde_json::Map<String, Value> = self
                    .columns
                    .iter()
                    .cloned()
                    .zip(cells.iter().map(Cell::json))
                    .collect();
                if self.rows > 0 {
                    write!(self.out, ",")?;
                }
                write!(self.out, "{}", Value::Object(obj))?;
            }
        }
        self.rows += 1;
        Ok(())
    }

    /// Footer lines become `# ` comments in CSV; `summary` becomes a JSON key.
    fn finish(self, footer: &[String], summary: Option<Value>) -> io::Result<()> {
        match self.format {
            Format::Csv => {
                for line in footer {
                    writeln!(self.out, "# {line}")?;
                }
            }
            Format::Json => {
                write!(self.out, "]")?;
                if let Some(s) = summary {
                    write!(self.out, ",\"summary\":{s}")?;
                }
                writeln!(self.out, "}}")?;
            }
        }
        self.out.flush()
    }
}

fn config_echo(config: &RunConfig, command: &Command) -> Value {
    let mut echo = serde_json::to_value(config).expect("config serializes");
    if let (Value::Object(map), Value::Object(cmd)) = (
        &mut echo,
        serde_json::to_value(command).expect("command serializes"),
    ) {
        map.extend(cmd);
    }
    echo
}

/// Parse `args` (program name first), run, and report errors on stderr.
pub fn main_with_args<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(e.exit_code().clamp(0, 255) as u8);
        }
    };
    let stdout = io::stdout();
    let mut lock = stdout.lock();
    match execute(&cli, &mut lock) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

/// Run a parsed command, writing to `--out` if given and to `stdout` otherwise.
pub fn execute(cli: &Cli, stdout: &mut dyn Write) -> Result<(), CliError> {
    let config = RunConfig::resolve(&cli.global)?;
    match &config.out {
        Some(path) => {
            let file = File::create(path).map_err(|source| CliError::CreateOutput {
                path: path.clone(),
                source,
            })?;
            let mut w = BufWriter::new(file);
            let result = dispatch(&cli.command, &config, &mut w);
            w.flush()?;
            result
        }
        None => dispatch(&cli.command, &config, stdout),
    }
}

fn dispatch(command: &Command, config: &RunConfig, out: &mut dyn Write) -> Result<(), CliError> {
    let echo = config_echo(config, command);
    match command {
        Command::Moments => cmd_moments(config, &echo, out),
        Command::Check { inject_fault } => cmd_check(config, *inject_fault, &echo, out),
        Command::Enumerate {
            k,
            v,
            e,
            cycle_type,
        } => cmd_enumerate(config, *k, *v, *e, *cycle_type, &echo, out),
        Command::Mc { no_richardson } => cmd_mc(config, !no_richardson, &echo, out),
        Command::Density { points } => cmd_density(config, *points, &echo, out),
        Command::Stieltjes { points, radius, im } => {
            cmd_stieltjes(config, *points, *radius, *im, &echo, out)
        }
    }
}

fn cmd_moments(config: &RunConfig, echo: &Value, out: &mut dyn Write) -> Result<(), CliError> {
    let mut columns: Vec<String> = ["k", "sc", "sc_decimal", "nu", "nu_decimal"]
        .map(String::from)
        .to_vec();
    for n in &config.n {
        columns.push(format!("expansion_n{n}"));
        columns.push(format!("expansion_n{n}_decimal"));
    }
    let mut table = TableWriter::begin(out, config.format, echo, columns)?;
    for k in 0..=config.kmax {
        let sc = BigRational::from_integer(semicircle_moment(k));
        let nu = nu_moment(k, &config.params);
        let mut row = vec![int_cell(k)];
        row.extend(rational_cells(&sc));
        row.extend(rational_cells(&nu));
        for &n in &config.n {
            let m = &sc + &nu / BigRational::from_integer(BigInt::from(n));
            row.extend(rational_cells(&m));
        }
        table.row(&row)?;
    }
    table.finish(&[], None)?;
    Ok(())
}

/// Rows of the `check` report.
fn identity_rows(
    config: &RunConfig,
    inject_fault: Option<usize>,
) -> Result<Vec<IdentityCheck>, CliError> {
    let order = config.order;
    let mut t = catalan_series(order);
    if let Some(i) = inject_fault {
        if i > order {
            return Err(CliError::Config(format!(
                "--inject-fault {i} is beyond the series order {order}"
            )));
        }
        let bumped = t.coeff(i) + BigRational::one();
        t.set_coeff(i, bumped);
    }

    let mut rows = catalan_identities(&t);
    rows.extend(generating_series_checks(&t, &config.params));
    rows.push(IdentityCheck {
        name: "GUE combination of the four blocks vanishes",
        order,
        first_mismatch: cancellation_combination(order, CANCELLATION_WEIGHTS).first_nonzero(),
    });

    let s = s_total_from(&t, &config.params);
    let three_way = (0..=order).find(|&l| {
        let nu = nu_moment(2 * l, &config.params);
        order_one_coeff(l, &config.params).total != nu || *s.coeff(l) != nu
    });
    rows.push(IdentityCheck {
        name: "four-term sum = coefficient of S = moment of nu",
        order,
        first_mismatch: three_way,
    });

    let max_l = CHECK_CLASS_LENGTH / 2;
    let censuses = (1..=max_l)
        .map(|l| class_census(2 * l))
        .collect::<Result<Vec<_>, _>>()?;
    type Pick = fn(&crate::combinatorics::FamilyCounts) -> &BigInt;
    let families: [(&'static str, usize, usize, Option<CycleType>, Pick); 5] = [
        ("class count C(2l, l+1, l)", 1, 0, None, |f| &f.trees),
        ("class count C(2l, l, l-1)", 0, 1, None, |f| {
            &f.fourfold_edge
        }),
        (
            "class count C(2l, l, l) with a self-loop",
            0,
            0,
            Some(CycleType::SelfLoop),
            |f| &f.self_loop,
        ),
        (
            "class count C(2l, l, l) cycle one way",
            0,
            0,
            Some(CycleType::CycleOneWay),
            |f| &f.cycle_one_way,
        ),
        (
            "class count C(2l, l, l) cycle both ways",
            0,
            0,
            Some(CycleType::CycleBothWays),
            |f| &f.cycle_both_ways,
        ),
    ];
    for (name, dv, de, filter, pick) in families {
        let first_mismatch = (1..=max_l).find(|&l| {
            let census = &censuses[l - 1];
            let got = census.count(l + dv, l - de, filter);
            BigInt::from(got) != *pick(&family_counts(l))
        });
        rows.push(IdentityCheck {
            name,
            order: max_l,
            first_mismatch,
        });
    }
    // Classes of C(2l, l, l) outside the three kinds must walk some edge
    // exactly once, which makes their expectation vanish.
    let split = (1..=max_l).find(|&l| {
        enumerate_canonical_words(2 * l)
            .filter(|c| c.v() == l && c.e() == l && c.cycle_type() == CycleType::Other)
            .any(|c| c.edge_traversals().iter().all(|(_, t)| t.total() != 1))
    });
    rows.push(IdentityCheck {
        name: "other classes in C(2l, l, l) walk an edge once",
        order: max_l,
        first_mismatch: split,
    });
    Ok(rows)
}

fn cmd_check(
    config: &RunConfig,
    inject_fault: Option<usize>,
    echo: &Value,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let rows = identity_rows(config, inject_fault)?;
    let columns = ["check", "order", "status", "first_mismatch"]
        .map(String::from)
        .to_vec();
    let mut table = TableWriter::begin(out, config.format, echo, columns)?;
    for row in &rows {
        table.row(&[
            Cell::Text(row.name.to_string()),
            int_cell(row.order),
            Cell::Text(if row.passed() { "pass" } else { "fail" }.to_string()),
            row.first_mismatch.map_or(Cell::Null, int_cell),
        ])?;
    }
    let failed: Vec<&IdentityCheck> = rows.iter().filter(|r| !r.passed()).collect();
    let footer = vec![format!(
        "{} of {} checks passed",
        rows.len() - failed.len(),
        rows.len()
    )];
    let summary = json!({ "checks": rows.len(), "failed": failed.len() });
    table.finish(&footer, Some(summary))?;
    match failed.first() {
        None => Ok(()),
        Some(first) => Err(CliError::ChecksFailed {
            failed: failed.len(),
            first: format!(
                "{} (coefficient {})",
                first.name,
                first.first_mismatch.expect("failed check has a mismatch")
            ),
        }),
    }
}

fn cmd_enumerate(
    config: &RunConfig,
    k: usize,
    v: Option<usize>,
    e: Option<usize>,
    cycle_type: Option<CycleType>,
    echo: &Value,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    if k == 0 {
        return Err(OracleError::EmptyWord.into());
    }
    if k > MAX_WORD_LENGTH {
        return Err(OracleError::TooLong {
            k,
            max: MAX_WORD_LENGTH,
        }
        .into());
    }
    let model = config.sampler().moment_model(k)?;
    let columns = [
        "word",
        "v",
        "e",
        "cycle_type",
        "expectation_num",
        "expectation_den",
    ]
    .map(String::from)
    .to_vec();
    let keep = |cv: usize, ce: usize, ct: CycleType| {
        v.is_none_or(|x| x == cv) && e.is_none_or(|x| x == ce) && cycle_type.is_none_or(|x| x == ct)
    };
    let mut table = TableWriter::begin(out, config.format, echo, columns)?;
    let mut listed = 0u64;
    for cls in enumerate_canonical_words(k) {
        if !keep(cls.v(), cls.e(), cls.cycle_type()) {
            continue;
        }
        let ew = expected_word_product(&cls, &model)?;
        table.row(&[
            Cell::Text(cls.word_string()),
            int_cell(cls.v()),
            int_cell(cls.e()),
            Cell::Text(cls.cycle_type().to_string()),
            Cell::Text(ew.numer().to_string()),
            Cell::Text(ew.denom().to_string()),
        ])?;
        listed += 1;
    }

    let census = class_census(k)?;
    let mut footer = vec![format!(
        "listed {listed} of {} canonical words of length {k}",
        census.total()
    )];
    let mut counts = Vec::new();
    for (&(cv, ce, ct), &count) in &census.counts {
        if keep(cv, ce, ct) {
            footer.push(format!("v={cv} e={ce} {ct}: {count}"));
            counts.push(json!({ "v": cv, "e": ce, "cycle_type": ct, "classes": count }));
        }
    }
    let summary = json!({ "total": census.total(), "listed": listed, "counts": counts });
    table.finish(&footer, Some(summary))?;
    Ok(())
}

fn cmd_mc(
    config: &RunConfig,
    richardson: bool,
    echo: &Value,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let ks: Vec<usize> = (2..=config.kmax).step_by(2).collect();
    if ks.is_empty() {
        return Err(CliError::Config(
            "mc needs --kmax of at least 2".to_string(),
        ));
    }
    let sampler = config.sampler();
    // Exact finite-n targets where the enumeration is affordable.
    let polys = ks
        .iter()
        .filter(|&&k| k <= MAX_WORD_LENGTH)
        .map(|&k| {
            let model = sampler.moment_model(k)?;
            Ok((k, moment_polynomial(k, &model)?))
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let target = |k: usize, n: u64| {
        polys.iter().find(|(pk, _)| *pk == k).map(|(_, p)| {
            let sc = BigRational::from_integer(semicircle_moment(k));
            let nn = BigRational::from_integer(BigInt::from(n));
            ((p.eval(n) - sc) * nn).to_f64().unwrap_or(f64::NAN)
        })
    };

    let columns = [
        "method",
        "k",
        "n",
        "samples",
        "point",
        "stderr",
        "reference",
        "z",
        "target",
        "z_target",
    ]
    .map(String::from)
    .to_vec();
    let mut table = TableWriter::begin(out, config.format, echo, columns)?;
    for &n in &config.n {
        let size =
            usize::try_from(n).map_err(|_| CliError::Config(format!("--n {n} is too large")))?;
        let coarse = estimate_corrections(&ks, size, config.samples, &sampler, config.seed)?;
        for est in &coarse {
            let t = target(est.k, n);
            table.row(&[
                Cell::Text("direct".to_string()),
                int_cell(est.k),
                int_cell(est.n),
                int_cell(est.samples),
                Cell::Float(est.point),
                Cell::Float(est.stderr),
                Cell::Float(est.reference),
                Cell::Float(est.z_score()),
                t.map_or(Cell::Null, Cell::Float),
                t.map_or(Cell::Null, |t| Cell::Float(est.z_against(t))),
            ])?;
        }
        if richardson {
            let fine = estimate_corrections(&ks, 2 * size, config.samples, &sampler, config.seed)?;
            for (c, f) in coarse.iter().zip(&fine) {
                let est = RichardsonEstimate::from_pair(c, f);
                table.row(&[
                    Cell::Text("richardson".to_string()),
                    int_cell(est.k),
                    int_cell(est.n),
                    int_cell(est.samples),
                    Cell::Float(est.point),
                    Cell::Float(est.stderr),
                    Cell::Float(est.reference),
                    Cell::Float(est.z_score()),
                    Cell::Float(est.reference),
                    Cell::Float(est.z_score()),
                ])?;
            }
        }
    }
    table.finish(&[], None)?;
    Ok(())
}

fn cmd_density(
    config: &RunConfig,
    points: usize,
    echo: &Value,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    if points == 0 {
        return Err(CliError::Config("--points must be positive".to_string()));
    }
    let nu = SignedMeasureNu::new(&config.params);
    let columns = ["x", "semicircle", "nu"].map(String::from).to_vec();
    let mut table = TableWriter::begin(out, config.format, echo, columns)?;
    for j in 0..points {
        let x = -2.0 + 4.0 * (j as f64 + 0.5) / points as f64;
        table.row(&[
            Cell::Float(x),
            Cell::Float(semicircle_density(x)),
            Cell::Float(nu.density(x)?),
        ])?;
    }
    let atoms = nu.atoms();
    let footer: Vec<String> = atoms
        .iter()
        .map(|(x, m)| format!("atom of nu at x={x}: mass {m}"))
        .collect();
    let summary = json!({
        "atoms": atoms.iter().map(|(x, m)| json!({ "x": x, "mass": m })).collect::<Vec<_>>()
    });
    table.finish(&footer, Some(summary))?;
    Ok(())
}

fn cmd_stieltjes(
    config: &RunConfig,
    points: usize,
    radius: f64,
    im: Option<f64>,
    echo: &Value,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    if points == 0 || !radius.is_finite() || radius <= 0.0 {
        return Err(CliError::Config(
            "--points and --radius must be positive".to_string(),
        ));
    }
    let nu = SignedMeasureNu::new(&config.params);
    let grid: Vec<Complex64> = (0..points)
        .map(|j| match im {
            Some(y) => {
                let x = if points == 1 {
                    0.0
                } else {
                    -radius + 2.0 * radius * j as f64 / (points - 1) as f64
                };
                Complex64::new(x, y)
            }
            None => Complex64::from_polar(
                radius,
                2.0 * std::f64::consts::PI * (j as f64 + 0.5) / points as f64,
            ),
        })
        .collect();
    let columns = ["re_z", "im_z", "sc_re", "sc_im", "nu_re", "nu_im"]
        .map(String::from)
        .to_vec();
    let mut table = TableWriter::begin(out, config.format, echo, columns)?;
    for z in grid {
        let mut row = vec![Cell::Float(z.re), Cell::Float(z.im)];
        row.extend(complex_cells(semicircle_stieltjes(z)));
        row.extend(complex_cells(nu.stieltjes(z)));
        table.row(&row)?;
    }
    table.finish(&[], None)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ratio(p: i64, q: i64) -> BigRational {
        BigRational::new(BigInt::from(p), BigInt::from(q))
    }

    #[test]
    fn rationals_parse_exactly() {
        assert_eq!(parse_rational("3/4"), Ok(ratio(3, 4)));
        assert_eq!(parse_rational("-6/8"), Ok(ratio(-3, 4)));
        assert_eq!(parse_rational("2"), Ok(ratio(2, 1)));
        assert_eq!(parse_rational("0.1"), Ok(ratio(1, 10)));
        assert_eq!(parse_rational("-2.5"), Ok(ratio(-5, 2)));
        assert_eq!(parse_rational("1e-3"), Ok(ratio(1, 1000)));
        assert_eq!(parse_rational("1.5E2"), Ok(ratio(150, 1)));
        assert_eq!(parse_rational(".5"), Ok(ratio(1, 2)));
        for bad in ["", "x", "1/0", "1.2.3", "--1", "1e", "."] {
            assert!(parse_rational(bad).is_err(), "{bad:?}");
        }
    }

    #[test]
    fn decimals_have_fifteen_significant_digits() {
        assert_eq!(decimal15(0.0), "0");
        assert_eq!(decimal15(93.0), "93.0000000000000");
        assert_eq!(decimal15(1.0 / 3.0), "0.333333333333333");
        assert_eq!(decimal15(-0.25), "-0.250000000000000");
        assert_eq!(decimal15(2.5e20), "2.50000000000000e20");
    }

    #[test]
    fn csv_text_is_quoted_when_needed() {
        assert_eq!(Cell::Text("a,b".into()).csv(), "\"a,b\"");
        assert_eq!(Cell::Text("say \"x\"".into()).csv(), "\"say \"\"x\"\"\"");
        assert_eq!(Cell::Text("plain".into()).csv(), "plain");
        assert_eq!(Cell::Null.csv(), "");
    }

    #[test]
    fn preset_parameters_cannot_be_overridden() {
        let opts = GlobalOpts {
            ensemble: Some(Ensemble::Gue),
            alpha: Some("5".into()),
            ..Default::default()
        };
        assert!(matches!(
            RunConfig::resolve(&opts),
            Err(CliError::Config(_))
        ));
    }

    #[test]
    fn custom_requires_all_parameters() {
        let mut opts = GlobalOpts {
            ensemble: Some(Ensemble::Custom),
            r: Some(1),
            sigma2: Some("1".into()),
            s2: Some("1".into()),
            ..Default::default()
        };
        assert!(matches!(
            RunConfig::resolve(&opts),
            Err(CliError::Config(_))
        ));
        opts.alpha = Some("1/2".into());
        let err = RunConfig::resolve(&opts).unwrap_err();
        assert!(err.to_string().contains("alpha >= sigma2^2"), "{err}");
        opts.alpha = Some("4".into());
        let cfg = RunConfig::resolve(&opts).unwrap();
        assert_eq!(
            cfg.params,
            EnsembleParams::from_integers(1, 1, 1, 4).unwrap()
        );
    }

    #[test]
    fn rademacher_defaults_to_unit_signs() {
        let opts = GlobalOpts {
            ensemble: Some(Ensemble::Rademacher),
            ..Default::default()
        };
        let cfg = RunConfig::resolve(&opts).unwrap();
        assert_eq!(cfg.params, EnsembleParams::rademacher());
        assert_eq!(cfg.n, vec![100]);
        assert_eq!(cfg.format, Format::Csv);
    }
}
