//! Reproducible batch commands: each resolves a [`RunConfig`], computes or
//! loads eigenvalues through the cache, and writes a JSON report that embeds
//! the configuration, library version and conventions.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::equidist::{equidist_report, histogram_text, ClassPoint};
use crate::error::{Error, Result};
use crate::forms::curve::curve_eigenvalues;
use crate::forms::eta::eta_eigenvalues;
use crate::forms::remote::{ingest_remote_newform, BASE_URL_ENV, DEFAULT_BASE_URL};
use crate::forms::{
    cache_read, cache_write, Backend, CoefficientField, EigenCache, EigenvalueRecord,
    EllipticCurve, Nebentypus, NewformDescriptor,
};
use crate::lfunc::{
    clebsch_gordan_error, nonvanishing_scan, ClassTable, EulerFactorSpec, TGrid, CG_TOL,
    NORMALIZATION,
};
use crate::numtheory::{prime_divisors, sieve_primes};
use crate::ordinarity::{
    ordinary_density, t_set_csv, wiles_t_set_in, Certification, DensityReport,
};
use crate::satake::{
    classes_from_records, ramanujan_check_exact, weight_scale, SqrtConvention, DEFAULT_TOL,
};
use crate::stgroup::sample_haar_in;
use crate::weightlat::{
    enumerate_monomials, highest_weight_monomial, lowest_weight_monomial, monomials_csv,
    tplus_valuation, ul_valuation_identity, weyl_dimension, TPlusElement, WeightVec,
};

pub const CACHE_DIR_ENV: &str = "SATO_TATE_CACHE_DIR";
pub const DEFAULT_CACHE_DIR: &str = "sato-tate-cache";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Eigen,
    Equidist,
    Density,
    Tset,
    Lfunc,
    Cgcheck,
    Weightlat,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Eigen => "eigen",
            Command::Equidist => "equidist",
            Command::Density => "density",
            Command::Tset => "tset",
            Command::Lfunc => "lfunc",
            Command::Cgcheck => "cgcheck",
            Command::Weightlat => "weightlat",
        }
    }
}

/// Which newform (or, for self-tests, which Haar sample) a command runs on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum FormSpec {
    /// Long Weierstrass coefficients `[a1, a2, a3, a4, a6]`.
    Curve {
        coefficients: [i64; 5],
        backend: Backend,
    },
    /// `Π η(d z)^r`, weight 2 with trivial character.
    Eta {
        factors: Vec<(u64, u64)>,
        level: u64,
    },
    Remote {
        label: String,
    },
    /// `prime_bound` classes drawn from Haar measure on `U(2)_m`.
    Haar {
        m: u64,
    },
}

impl FormSpec {
    pub fn label(&self) -> String {
        match self {
            FormSpec::Curve { coefficients, .. } => {
                let c: Vec<String> = coefficients.iter().map(|x| x.to_string()).collect();
                format!("curve_{}", c.join("_"))
            }
            FormSpec::Eta { factors, .. } => {
                let f: Vec<String> = factors.iter().map(|(d, r)| format!("{d}^{r}")).collect();
                format!("eta_{}", f.join("."))
            }
            FormSpec::Remote { label } => label.clone(),
            FormSpec::Haar { m } => format!("haar_m{m}"),
        }
    }
}

/// A fully resolved command. Execution details (worker count, directories,
/// base URL) are not serialized, so reports do not depend on them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: Command,
    pub form: Option<FormSpec>,
    pub prime_bound: u64,
    pub a: u64,
    pub b: u64,
    pub b_max: u64,
    pub sigma: Option<f64>,
    pub t_start: f64,
    pub t_end: f64,
    pub t_step: f64,
    pub degree: Option<usize>,
    pub weight: Option<Vec<u32>>,
    pub tplus: Option<Vec<u32>>,
    pub seed: u64,
    #[serde(skip)]
    pub workers: usize,
    #[serde(skip)]
    pub cache_dir: PathBuf,
    #[serde(skip)]
    pub out_dir: PathBuf,
    #[serde(skip)]
    pub base_url: String,
}

/// Unresolved settings as given by flags or a `key = value` config file.
#[derive(Debug, Clone, Default, PartialEq, clap::Args)]
pub struct Settings {
    /// Curve coefficients a1,a2,a3,a4,a6
    #[arg(long, allow_hyphen_values = true)]
    pub curve: Option<String>,
    /// Eta factors d:r,d:r,...
    #[arg(long)]
    pub eta: Option<String>,
    /// Level of an eta product (default: lcm of the d)
    #[arg(long)]
    pub level: Option<u64>,
    /// Remote newform label
    #[arg(long)]
    pub label: Option<String>,
    /// Haar self-test on U(2)_m, drawing X classes
    #[arg(long)]
    pub haar: Option<u64>,
    /// Point-counting backend for curves: count or charsum
    #[arg(long)]
    pub backend: Option<String>,
    /// Prime bound
    #[arg(long = "X", short = 'X')]
    pub x: Option<u64>,
    #[arg(long)]
    pub a: Option<u64>,
    /// Symmetric power (lfunc) or T+ element b1,...,bn (weightlat)
    #[arg(long)]
    pub b: Option<String>,
    #[arg(long)]
    pub b_max: Option<u64>,
    #[arg(long, allow_hyphen_values = true)]
    pub sigma: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub t_start: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub t_end: Option<f64>,
    #[arg(long)]
    pub t_step: Option<f64>,
    /// T-set degree
    #[arg(long)]
    pub degree: Option<usize>,
    /// Matrix size for weightlat (default: length of --t)
    #[arg(long)]
    pub n: Option<usize>,
    /// Dominant weight t1,...,tn
    #[arg(long)]
    pub t: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub workers: Option<usize>,
    #[arg(long)]
    pub cache_dir: Option<PathBuf>,
    #[arg(long)]
    pub base_url: Option<String>,
    /// Directory for reports
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn bad(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}

fn parse_num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T> {
    v.trim()
        .parse()
        .map_err(|_| bad(format!("bad value {v:?} for {key}")))
}

fn parse_list<T: std::str::FromStr>(key: &str, v: &str) -> Result<Vec<T>> {
    v.split(',').map(|x| parse_num(key, x)).collect()
}

impl Settings {
    /// Parses `key = value` lines; `#` starts a comment, `-` and `_` in keys
    /// are interchangeable.
    pub fn from_kv(text: &str) -> Result<Self> {
        let mut s = Settings::default();
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| bad(format!("config line {}: expected key = value", i + 1)))?;
            let key = k.trim().replace('-', "_");
            let v = v.trim();
            let text = || Some(v.to_string());
            match key.as_str() {
                "curve" => s.curve = text(),
                "eta" => s.eta = text(),
                "level" => s.level = Some(parse_num(&key, v)?),
                "label" => s.label = text(),
                "haar" => s.haar = Some(parse_num(&key, v)?),
                "backend" => s.backend = text(),
                "X" | "x" => s.x = Some(parse_num(&key, v)?),
                "a" => s.a = Some(parse_num(&key, v)?),
                "b" => s.b = text(),
                "b_max" => s.b_max = Some(parse_num(&key, v)?),
                "sigma" => s.sigma = Some(parse_num(&key, v)?),
                "t_start" => s.t_start = Some(parse_num(&key, v)?),
                "t_end" => s.t_end = Some(parse_num(&key, v)?),
                "t_step" => s.t_step = Some(parse_num(&key, v)?),
                "degree" => s.degree = Some(parse_num(&key, v)?),
                "n" => s.n = Some(parse_num(&key, v)?),
                "t" => s.t = text(),
                "seed" => s.seed = Some(parse_num(&key, v)?),
                "workers" => s.workers = Some(parse_num(&key, v)?),
                "cache_dir" => s.cache_dir = Some(PathBuf::from(v)),
                "base_url" => s.base_url = text(),
                "out" => s.out = Some(PathBuf::from(v)),
                other => return Err(bad(format!("unknown config key {other:?}"))),
            }
        }
        Ok(s)
    }

    /// Values from `self`, falling back to `other`.
    pub fn or(self, other: Settings) -> Settings {
        Settings {
            curve: self.curve.or(other.curve),
            eta: self.eta.or(other.eta),
            level: self.level.or(other.level),
            label: self.label.or(other.label),
            haar: self.haar.or(other.haar),
            backend: self.backend.or(other.backend),
            x: self.x.or(other.x),
            a: self.a.or(other.a),
            b: self.b.or(other.b),
            b_max: self.b_max.or(other.b_max),
            sigma: self.sigma.or(other.sigma),
            t_start: self.t_start.or(other.t_start),
            t_end: self.t_end.or(other.t_end),
            t_step: self.t_step.or(other.t_step),
            degree: self.degree.or(other.degree),
            n: self.n.or(other.n),
            t: self.t.or(other.t),
            seed: self.seed.or(other.seed),
            workers: self.workers.or(other.workers),
            cache_dir: self.cache_dir.or(other.cache_dir),
            base_url: self.base_url.or(other.base_url),
            out: self.out.or(other.out),
        }
    }

    fn form(&self) -> Result<Option<FormSpec>> {
        let given = [
            self.curve.is_some(),
            self.eta.is_some(),
            self.label.is_some(),
            self.haar.is_some(),
        ];
        match given.iter().filter(|&&g| g).count() {
            0 => return Ok(None),
            1 => {}
            _ => return Err(bad("give exactly one of --curve, --eta, --label, --haar")),
        }
        if let Some(c) = &self.curve {
            let v: Vec<i64> = parse_list("curve", c)?;
            let coefficients: [i64; 5] = v
                .try_into()
                .map_err(|_| bad("--curve needs five coefficients a1,a2,a3,a4,a6"))?;
            let backend = match self.backend.as_deref() {
                None => Backend::Count,
                Some(b) => b.parse()?,
            };
            if !matches!(backend, Backend::Count | Backend::Charsum) {
                return Err(bad("curves use the count or charsum backend"));
            }
            return Ok(Some(FormSpec::Curve {
                coefficients,
                backend,
            }));
        }
        if let Some(e) = &self.eta {
            let factors = e
                .split(',')
                .map(|f| {
                    let (d, r) = f
                        .split_once(':')
                        .ok_or_else(|| bad(format!("eta factor {f:?} is not d:r")))?;
                    Ok((parse_num("eta", d)?, parse_num("eta", r)?))
                })
                .collect::<Result<Vec<(u64, u64)>>>()?;
            if factors.iter().any(|&(d, r)| d == 0 || r == 0) {
                return Err(bad("eta factors need d, r >= 1"));
            }
            let lcm = factors
                .iter()
                .fold(1u64, |l, &(d, _)| num_integer::lcm(l, d));
            let level = self.level.unwrap_or(lcm);
            return Ok(Some(FormSpec::Eta { factors, level }));
        }
        if let Some(label) = &self.label {
            return Ok(Some(FormSpec::Remote {
                label: label.clone(),
            }));
        }
        let m = self.haar.unwrap();
        if m == 0 {
            return Err(bad("--haar needs m >= 1"));
        }
        Ok(Some(FormSpec::Haar { m }))
    }

    /// Applies defaults, environment variables and per-command requirements.
    pub fn resolve(self, command: Command) -> Result<RunConfig> {
        let form = self.form()?;
        let needs_form = matches!(
            command,
            Command::Eigen
                | Command::Equidist
                | Command::Density
                | Command::Lfunc
                | Command::Cgcheck
        );
        if needs_form && form.is_none() {
            return Err(bad(format!(
                "{} needs a form: --curve, --eta or --label",
                command.name()
            )));
        }
        if matches!(form, Some(FormSpec::Haar { .. })) && command != Command::Equidist {
            return Err(bad("--haar is only meaningful for equidist"));
        }
        let default_x = if command == Command::Cgcheck {
            Some(1000)
        } else {
            None
        };
        let prime_bound = match self.x.or(default_x) {
            Some(x) if x >= 2 => x,
            Some(x) => return Err(bad(format!("prime bound {x} must be at least 2"))),
            None if needs_form => return Err(bad(format!("{} needs --X", command.name()))),
            None => 0,
        };
        let (mut b, mut tplus) = (0u64, None);
        if let Some(bs) = &self.b {
            if command == Command::Weightlat {
                tplus = Some(parse_list("b", bs)?);
            } else {
                b = parse_num("b", bs)?;
            }
        }
        let weight = self.t.as_deref().map(|t| parse_list("t", t)).transpose()?;
        if command == Command::Weightlat {
            let (Some(t), Some(bv)) = (&weight, &tplus) else {
                return Err(bad("weightlat needs --t and --b"));
            };
            let n = self.n.unwrap_or(t.len());
            if t.len() != n || bv.len() != n {
                return Err(bad(format!("--t and --b must both have length n = {n}")));
            }
        }
        let degree = self.degree;
        if command == Command::Tset && degree.is_none() {
            return Err(bad("tset needs --degree"));
        }
        let workers = self
            .workers
            .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
        if workers == 0 {
            return Err(bad("worker count must be at least 1"));
        }
        let cache_dir = self
            .cache_dir
            .or_else(|| std::env::var_os(CACHE_DIR_ENV).map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from(DEFAULT_CACHE_DIR));
        let base_url = self
            .base_url
            .or_else(|| std::env::var(BASE_URL_ENV).ok())
            .unwrap_or_else(|| DEFAULT_BASE_URL.to_string());
        Ok(RunConfig {
            command,
            form,
            prime_bound,
            a: self.a.unwrap_or(0),
            b,
            b_max: self.b_max.unwrap_or(6),
            sigma: self.sigma,
            t_start: self.t_start.unwrap_or(0.0),
            t_end: self.t_end.unwrap_or(10.0),
            t_step: self.t_step.unwrap_or(0.1),
            degree,
            weight,
            tplus,
            seed: self.seed.unwrap_or(1),
            workers,
            cache_dir,
            out_dir: self.out.unwrap_or_else(|| PathBuf::from(".")),
            base_url,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Conventions {
    pub square_root: String,
    pub normalization: String,
}

impl Default for Conventions {
    fn default() -> Self {
        Conventions {
            square_root: SqrtConvention::Principal.describe().to_string(),
            normalization: NORMALIZATION.to_string(),
        }
    }
}

/// What every command writes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub tool: String,
    pub version: String,
    pub command: Command,
    pub config: RunConfig,
    pub conventions: Conventions,
    /// Extra files written next to the report, by file name.
    pub artifacts: Vec<String>,
    /// Set when a numerical contract failed.
    pub violation: Option<String>,
    pub result: serde_json::Value,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub report_path: PathBuf,
    pub report: Report,
}

impl Outcome {
    /// 0 on success, 1 when the report records a violated numerical contract.
    pub fn exit_code(&self) -> i32 {
        if self.report.violation.is_some() {
            1
        } else {
            0
        }
    }
}

fn file_stem(s: &str) -> String {
    s.chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || "._-".contains(c) {
                c
            } else {
                '_'
            }
        })
        .collect()
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Descriptor and eigenvalues at good primes `<= prime_bound`, read from the
/// cache when it covers the range and computed (then cached) otherwise.
pub fn acquire(
    config: &RunConfig,
    pool: &rayon::ThreadPool,
    refresh: bool,
) -> Result<(NewformDescriptor, Vec<EigenvalueRecord>)> {
    let form = config.form.as_ref().ok_or_else(|| bad("no form given"))?;
    let x = config.prime_bound;
    let label = form.label();
    let desc = match form {
        FormSpec::Curve {
            coefficients,
            backend,
        } => {
            let curve = EllipticCurve::from_coefficients(*coefficients)?;
            let disc = u64::try_from(curve.discriminant().unsigned_abs())
                .map_err(|_| bad("curve discriminant exceeds 64 bits"))?;
            descriptor(&label, prime_divisors(disc).iter().product(), *backend)
        }
        FormSpec::Eta { level, .. } => descriptor(&label, *level, Backend::Eta),
        FormSpec::Remote { label } => {
            let (desc, records) =
                ingest_remote_newform(label, &config.base_url, &config.cache_dir)?;
            let records = records.into_iter().filter(|r| r.p <= x).collect();
            return Ok((desc, records));
        }
        FormSpec::Haar { .. } => return Err(bad("Haar samples have no eigenvalues")),
    };
    let good: Vec<u64> = sieve_primes(2, x)?
        .iter()
        .copied()
        .filter(|&p| desc.is_good(p))
        .collect();
    let path = config.cache_dir.join(format!("{}.csv", file_stem(&label)));
    if !refresh && path.exists() {
        let cached = cache_read(&path)?;
        let have: BTreeSet<u64> = cached.records.iter().map(|r| r.p).collect();
        if good.iter().all(|p| have.contains(p)) {
            let records = cached.records.into_iter().filter(|r| r.p <= x).collect();
            return Ok((desc, records));
        }
    }
    let records = match form {
        FormSpec::Curve {
            coefficients,
            backend,
        } => {
            let curve = EllipticCurve::from_coefficients(*coefficients)?;
            curve_eigenvalues(&curve, &good, *backend, pool)?
        }
        FormSpec::Eta { factors, level } => eta_eigenvalues(factors, *level, &good)?,
        _ => unreachable!(),
    };
    fs::create_dir_all(&config.cache_dir).map_err(|e| Error::io(&config.cache_dir, e))?;
    cache_write(
        &EigenCache {
            label,
            records: records.clone(),
        },
        &path,
    )?;
    Ok((desc, records))
}

fn descriptor(label: &str, level: u64, source: Backend) -> NewformDescriptor {
    NewformDescriptor {
        label: label.to_string(),
        level,
        weight: 2,
        nebentypus: Nebentypus::trivial(),
        coefficient_field: CoefficientField::rationals(),
        is_cm: None,
        steinberg_primes: BTreeSet::new(),
        source,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenSummary {
    pub label: String,
    pub backend: Backend,
    pub prime_bound: u64,
    pub records: usize,
    pub excluded_primes: Vec<u64>,
    pub ramanujan_failures: Vec<u64>,
    pub cache_file: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensitySummary {
    #[serde(flatten)]
    pub report: DensityReport,
    /// `(l, a_l / l)` at each non-ordinary prime.
    pub quotients: Vec<(u64, i64)>,
    pub quotient_bound_holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TsetSummary {
    pub degree: usize,
    pub count: usize,
    pub certified: usize,
    pub exact_boundary: usize,
    pub ambiguous: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CgSummary {
    pub prime_bound: u64,
    pub b_max: u64,
    pub checks: usize,
    pub failures: usize,
    pub max_relative_error: f64,
    pub tolerance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightlatSummary {
    pub n: usize,
    pub t: Vec<u32>,
    pub b: Vec<u32>,
    pub monomials: usize,
    pub weyl_dimension: u128,
    pub min_twisted: i64,
    pub zero_twisted: usize,
    pub b_strictly_decreasing: bool,
    pub containment_holds: bool,
    pub strictness_holds: bool,
    pub highest_weight_unique: bool,
    pub lowest_weight_unique: bool,
    pub valuation_identity_zero: bool,
}

/// Five sample points for the Clebsch–Gordan check at symmetric power `b`.
pub fn cg_sample_points(b: u64, k: u32) -> [Complex64; 5] {
    let edge = EulerFactorSpec::new(0, b + 1, k).abscissa();
    std::array::from_fn(|j| Complex64::new(edge + 0.25 * (j + 1) as f64, 2.5 * j as f64 - 5.0))
}

fn to_value<T: Serialize>(x: &T) -> serde_json::Value {
    serde_json::to_value(x).expect("reports serialize")
}

/// Runs one command, writing its report (and any artifacts) to `out_dir`.
pub fn run(config: &RunConfig) -> Result<Outcome> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers)
        .build()
        .map_err(|e| bad(format!("thread pool: {e}")))?;
    fs::create_dir_all(&config.out_dir).map_err(|e| Error::io(&config.out_dir, e))?;
    let subject = match (&config.form, config.command) {
        (_, Command::Tset) => format!("d{}", config.degree.unwrap_or(0)),
        (_, Command::Weightlat) => {
            let j = |v: &Option<Vec<u32>>| {
                v.as_deref()
                    .unwrap_or(&[])
                    .iter()
                    .map(|x| x.to_string())
                    .collect::<Vec<_>>()
                    .join(".")
            };
            format!("t{}-b{}", j(&config.weight), j(&config.tplus))
        }
        (Some(f), _) => f.label(),
        (None, _) => "none".into(),
    };
    let stem = format!("{}-{}", config.command.name(), file_stem(&subject));
    let mut artifacts = Vec::new();
    let mut violation = None;

    let result = match config.command {
        Command::Eigen => {
            let (desc, records) = acquire(config, &pool, true)?;
            let all = sieve_primes(2, config.prime_bound)?;
            let excluded: Vec<u64> = all.iter().copied().filter(|&p| !desc.is_good(p)).collect();
            let failures: Vec<u64> = records
                .iter()
                .filter(|r| match r.exact_integer() {
                    Some(a) if desc.is_rational() => !ramanujan_check_exact(a, desc.weight, r.p),
                    _ => {
                        r.embedded.norm()
                            > 2.0 * weight_scale(r.p, desc.weight) * (1.0 + DEFAULT_TOL) + r.err
                    }
                })
                .map(|r| r.p)
                .collect();
            if !failures.is_empty() {
                violation = Some(format!(
                    "Ramanujan bound fails at {} primes",
                    failures.len()
                ));
            }
            let form = config.form.as_ref().unwrap();
            to_value(&EigenSummary {
                label: desc.label.clone(),
                backend: records.first().map_or(desc.source, |r| r.backend),
                prime_bound: config.prime_bound,
                records: records.len(),
                excluded_primes: excluded,
                ramanujan_failures: failures,
                cache_file: format!("{}.csv", file_stem(&form.label())),
            })
        }
        Command::Equidist => {
            let (label, points) = match config.form.as_ref().unwrap() {
                FormSpec::Haar { m } => {
                    let sample =
                        sample_haar_in(*m, config.seed, config.prime_bound as usize, Some(&pool))?;
                    let pts: Vec<ClassPoint> = sample.into_iter().map(ClassPoint::from).collect();
                    (FormSpec::Haar { m: *m }.label(), pts)
                }
                _ => {
                    let (desc, records) = acquire(config, &pool, false)?;
                    let classes = classes_from_records(&desc, &records, DEFAULT_TOL)?;
                    (
                        desc.label.clone(),
                        classes.iter().map(ClassPoint::from).collect(),
                    )
                }
            };
            let report = equidist_report(&label, config.prime_bound, &points, config.b_max)?;
            let angles: Vec<f64> = points.iter().map(|p| p.theta).collect();
            let hist = format!("{stem}.hist");
            write_file(&config.out_dir.join(&hist), &histogram_text(&angles))?;
            artifacts.push(hist);
            to_value(&report)
        }
        Command::Density => {
            let (desc, records) = acquire(config, &pool, false)?;
            let report = ordinary_density(&desc, &records, config.prime_bound)?;
            let quotients: Vec<(u64, i64)> = report
                .non_ordinary
                .iter()
                .filter_map(|&p| {
                    let r = records.iter().find(|r| r.p == p)?;
                    Some((p, r.exact_integer()? / p as i64))
                })
                .collect();
            let holds = quotients.iter().all(|&(_, b)| b.abs() <= 2);
            if !holds && desc.weight <= 3 {
                violation = Some("a non-ordinary prime has |a_l / l| > 2".into());
            }
            to_value(&DensitySummary {
                report,
                quotients,
                quotient_bound_holds: holds,
            })
        }
        Command::Tset => {
            let d = config.degree.unwrap();
            let set = wiles_t_set_in(d, Some(&pool))?;
            let count = |c: Certification| set.iter().filter(|e| e.certification == c).count();
            let csv = format!("{stem}.csv");
            write_file(&config.out_dir.join(&csv), &t_set_csv(&set))?;
            artifacts.push(csv);
            to_value(&TsetSummary {
                degree: d,
                count: set.len(),
                certified: count(Certification::Certified),
                exact_boundary: count(Certification::ExactBoundary),
                ambiguous: count(Certification::Ambiguous),
            })
        }
        Command::Lfunc => {
            let (desc, records) = acquire(config, &pool, false)?;
            let classes = classes_from_records(&desc, &records, DEFAULT_TOL)?;
            if config.a >= desc.nebentypus.order {
                return Err(bad(format!(
                    "twist exponent a must be below m = {}",
                    desc.nebentypus.order
                )));
            }
            let spec = EulerFactorSpec::new(config.a, config.b, desc.weight);
            let sigma = config.sigma.unwrap_or(spec.abscissa() + 0.5);
            let grid = TGrid::new(config.t_start, config.t_end, config.t_step)?;
            let table = ClassTable::new(&classes, desc.level);
            let report =
                nonvanishing_scan(table, spec, sigma, grid, config.prime_bound, Some(&pool))?;
            if !(report.min_modulus > 0.0) {
                violation = Some("partial product vanished on the grid".into());
            }
            to_value(&report)
        }
        Command::Cgcheck => {
            let (desc, records) = acquire(config, &pool, false)?;
            let classes = classes_from_records(&desc, &records, DEFAULT_TOL)?;
            let m = desc.nebentypus.order;
            let mut checks = 0;
            let mut failures = 0;
            let mut worst = 0.0f64;
            for class in &classes {
                for b in 1..=config.b_max {
                    for a in 0..m {
                        for s in cg_sample_points(b, desc.weight) {
                            let err = clebsch_gordan_error(class, a, b, s)?;
                            checks += 1;
                            worst = worst.max(err);
                            failures += (err >= CG_TOL) as usize;
                        }
                    }
                }
            }
            if failures > 0 {
                violation = Some(format!("{failures} Clebsch-Gordan checks failed"));
            }
            to_value(&CgSummary {
                prime_bound: config.prime_bound,
                b_max: config.b_max,
                checks,
                failures,
                max_relative_error: worst,
                tolerance: CG_TOL,
            })
        }
        Command::Weightlat => {
            let t = WeightVec::new(config.weight.clone().unwrap())?;
            let b = TPlusElement::new(config.tplus.clone().unwrap())?;
            let n = t.n();
            let monos = enumerate_monomials(&t, n)?;
            let low = lowest_weight_monomial(&t);
            let high = highest_weight_monomial(&t);
            let strict = b.is_strictly_decreasing();
            let mut min_twisted = i64::MAX;
            let mut zero = 0;
            let mut strictness = true;
            for m in &monos {
                let (_, tw) = tplus_valuation(m, &b, &t)?;
                min_twisted = min_twisted.min(tw);
                zero += (tw == 0) as usize;
                if strict && *m != low && tw < 1 {
                    strictness = false;
                }
            }
            let rev: Vec<u32> = t.as_slice().iter().rev().copied().collect();
            let count_right = |w: &[u32]| monos.iter().filter(|m| m.right_weight() == w).count();
            let identity = (1..=10u32).all(|nn| {
                (2..=5).all(|k| {
                    (1..=3).all(|d| {
                        ul_valuation_identity(nn, k, d) == num_rational::Rational64::from(0)
                    })
                })
            });
            let summary = WeightlatSummary {
                n,
                t: t.as_slice().to_vec(),
                b: b.as_slice().to_vec(),
                monomials: monos.len(),
                weyl_dimension: weyl_dimension(&t),
                min_twisted,
                zero_twisted: zero,
                b_strictly_decreasing: strict,
                containment_holds: min_twisted >= 0,
                strictness_holds: strictness,
                highest_weight_unique: count_right(t.as_slice()) == 1 && monos.contains(&high),
                lowest_weight_unique: count_right(&rev) == 1 && monos.contains(&low),
                valuation_identity_zero: identity,
            };
            if !(summary.containment_holds
                && summary.strictness_holds
                && summary.highest_weight_unique
                && summary.lowest_weight_unique
                && summary.valuation_identity_zero)
            {
                violation = Some("weight-lattice contract failed".into());
            }
            let csv = format!("{stem}.csv");
            write_file(&config.out_dir.join(&csv), &monomials_csv(&monos, &b, &t)?)?;
            artifacts.push(csv);
            to_value(&summary)
        }
    };

    let report = Report {
        tool: env!("CARGO_PKG_NAME").to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        command: config.command,
        config: config.clone(),
        conventions: Conventions::default(),
        artifacts,
        violation,
        result,
    };
    let path = config.out_dir.join(format!("{stem}.json"));
    let mut text = serde_json::to_string_pretty(&report).expect("reports serialize");
    text.push('\n');
    write_file(&path, &text)?;
    Ok(Outcome {
        report_path: path,
        report,
    })
}

/// Reads a report written by [`run`].
pub fn read_report(path: &Path) -> Result<Report> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::Malformed(format!("{}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn settings(pairs: &str) -> Settings {
        Settings::from_kv(pairs).unwrap()
    }

    #[test]
    fn config_file_parsing() {
        let s = settings(
            "# comment\ncurve = 0,-1,1,-10,-20\nX = 1000\nb-max = 4 # trailing\nworkers=2\n",
        );
        assert_eq!(s.curve.as_deref(), Some("0,-1,1,-10,-20"));
        assert_eq!(s.x, Some(1000));
        assert_eq!(s.b_max, Some(4));
        assert!(Settings::from_kv("bogus = 1").is_err());
        assert!(Settings::from_kv("X 10").is_err());
        assert!(Settings::from_kv("X = ten").is_err());
    }

    #[test]
    fn flags_override_file() {
        let file = settings("X = 1000\nb = 2");
        let flags = Settings {
            x: Some(50),
            ..Default::default()
        };
        let merged = flags.or(file);
        assert_eq!(merged.x, Some(50));
        assert_eq!(merged.b.as_deref(), Some("2"));
    }

    #[test]
    fn resolution_errors() {
        let missing = Settings {
            x: Some(100),
            ..Default::default()
        };
        assert!(matches!(
            missing.resolve(Command::Eigen),
            Err(Error::InvalidArgument(_))
        ));
        let two = settings("curve = 0,0,0,-1,0\neta = 1:2,11:2\nX = 100");
        assert!(two.resolve(Command::Eigen).is_err());
        let ok = settings("eta = 1:2,11:2\nX = 100")
            .resolve(Command::Eigen)
            .unwrap();
        assert_eq!(
            ok.form,
            Some(FormSpec::Eta {
                factors: vec![(1, 2), (11, 2)],
                level: 11
            })
        );
        assert!(settings("degree = 2").resolve(Command::Tset).is_ok());
        assert!(settings("").resolve(Command::Tset).is_err());
        assert!(settings("t = 2,1,0\nb = 2,1")
            .resolve(Command::Weightlat)
            .is_err());
        assert!(settings("curve = 1,2,3\nX = 10")
            .resolve(Command::Eigen)
            .is_err());
        assert!(settings("curve = 0,0,0,-1,0\nX = 1")
            .resolve(Command::Eigen)
            .is_err());
    }

    #[test]
    fn labels_are_file_safe() {
        let f = FormSpec::Curve {
            coefficients: [0, -1, 1, -10, -20],
            backend: Backend::Count,
        };
        assert_eq!(f.label(), "curve_0_-1_1_-10_-20");
        assert_eq!(file_stem("a/b c"), "a_b_c");
    }
}
