//! Command-line front end and the tabulations behind its scan subcommands.
//!
//! Exit status: 0 when every asserted check passes, 1 on a bound violation,
//! 2 on a configuration error, 3 on a numerical failure.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{Error, Result};
use crate::extremal::{minimal_monic_lp, minimal_monic_sup, widom_wp, Diagnostics, Order};
use crate::isotorus::{random_finite_gap_set, reflectionless_measure, torus_corpus, torus_measure, verify_isolb, TorusPoint};
use crate::measures::{
    cantor_measure, jacobi_measure, sharpness_measure_eps, sharpness_measure_small, CantorSpec, FiniteGapSet, Measure,
};
use crate::orthopoly::{recurrence, widom_w2_sequence};
use crate::potential::{equilibria_along, equilibrium, outer_covers, EquilibriumData};
use crate::szego::{
    conjecture_constant, jacobi_l, jacobi_log_r, jacobi_r, jacobi_regime, szego_entropy, verify_bounds, BoundKind,
    JacobiRegime, WidomReport,
};

#[derive(Debug, Parser)]
#[command(name = "widom", version, about = "Widom factors of measures on the real line and their lower bounds")]
pub struct Cli {
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Logarithmic capacity of a finite-gap set.
    Capacity(SetArgs),
    /// Equilibrium measure summary: bands, critical points, capacity, residuals.
    Eqmeasure(SetArgs),
    /// Recurrence coefficients and monic norms as CSV.
    Recurrence {
        #[command(flatten)]
        measure: MeasureArgs,
        /// Degree.
        #[arg(long)]
        n: usize,
    },
    /// Minimal monic polynomial in L^p(mu) or sup norm on K.
    Extremal {
        #[command(flatten)]
        measure: MeasureArgs,
        /// Degree.
        #[arg(long)]
        n: usize,
        /// Order p > 0, or `inf`.
        #[arg(long)]
        p: Order,
    },
    /// Szego entropy S(mu) and eigenvalue function E(mu).
    Entropy {
        #[command(flatten)]
        measure: MeasureArgs,
    },
    /// Widom factors for n = 1..=n_max against a lower bound.
    Verify {
        #[command(flatten)]
        measure: MeasureArgs,
        /// Exponent p > 0, or `inf` for the sup norm on K.
        #[arg(long)]
        p: Order,
        /// Largest degree.
        #[arg(long, default_value_t = 20)]
        n_max: usize,
        /// Lower bound to compare against.
        #[arg(long, value_enum, default_value_t = BoundArg::Universal)]
        bound: BoundArg,
        /// Output format.
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// R_1, L and the monotonicity regime over a grid of Jacobi exponents.
    JacobiScan {
        /// Exponents alpha, `start:stop:count` or a comma list.
        #[arg(long, allow_hyphen_values = true)]
        alpha_grid: Grid,
        /// Exponents beta, `start:stop:count` or a comma list.
        #[arg(long, allow_hyphen_values = true)]
        beta_grid: Grid,
        /// Range of n for the minimum of R_n.
        #[arg(long, default_value_t = 200)]
        n_max: u32,
    },
    /// Ratio [W_n^p]^p / S along the extremal families.
    Sharpness {
        /// Degree.
        #[arg(long)]
        n: u32,
        /// Exponent p > 0.
        #[arg(long)]
        p: f64,
        /// Comma list of eps values; ignored when np < 1.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_value = "0.1,0.01,0.001")]
        eps: Vec<f64>,
    },
    /// Isospectral torus measure and its lower bound report.
    Isotorus {
        /// Bands of K as JSON.
        #[arg(long, required_unless_present = "corpus")]
        bands: Option<Bands>,
        /// Gap points as a JSON list, one per gap.
        #[arg(long, default_value = "[]")]
        gammas: JsonList<f64>,
        /// Sheet flags as a JSON list of 0/1.
        #[arg(long, default_value = "[]")]
        flags: JsonList<u8>,
        /// Largest degree.
        #[arg(long, default_value_t = 20)]
        n_max: usize,
        /// Run a seeded random corpus instead of a single point.
        #[arg(long)]
        corpus: bool,
        /// Seed of the random corpus.
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Number of random sets.
        #[arg(long, default_value_t = 5)]
        sets: usize,
        /// Torus points per set.
        #[arg(long, default_value_t = 5)]
        per_set: usize,
    },
    /// Widom factors of the Cantor measure against ternary cover capacities.
    Cantor {
        /// Cover levels, `lo..hi` or a comma list.
        #[arg(long, default_value = "8..12")]
        levels: Levels,
        /// Largest degree.
        #[arg(long, default_value_t = 16)]
        n_max: usize,
        /// Output format.
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Exploratory margins for the interval constant and reflectionless measures.
    ConjectureScan {
        /// Comma list of p values, each at least 1.
        #[arg(long, value_delimiter = ',', default_value = "1,1.5,3")]
        p: Vec<f64>,
        /// Largest degree.
        #[arg(long, default_value_t = 10)]
        n_max: usize,
        /// Number of random two-band sets.
        #[arg(long, default_value_t = 3)]
        sets: usize,
        /// Seed of the random corpus.
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
}

#[derive(Debug, Args)]
pub struct SetArgs {
    /// Bands as JSON: `[a,b]` or `[[a1,b1],[a2,b2],...]`.
    #[arg(long)]
    pub bands: Bands,
}

#[derive(Debug, Args)]
pub struct MeasureArgs {
    /// Measure as inline JSON or a path to a JSON file.
    #[arg(long, conflicts_with = "jacobi")]
    pub measure: Option<String>,
    /// Jacobi weight `alpha,beta` on [-1, 1].
    #[arg(long, allow_hyphen_values = true)]
    pub jacobi: Option<Grid>,
    /// The set K; defaults to the support of the measure. Alone, selects mu_K.
    #[arg(long)]
    pub bands: Option<Bands>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum BoundArg {
    Universal,
    Equilibrium,
    Jacobi,
    Isotorus,
    Conjecture,
}

impl From<BoundArg> for BoundKind {
    fn from(b: BoundArg) -> Self {
        match b {
            BoundArg::Universal => Self::Universal,
            BoundArg::Equilibrium => Self::Equilibrium,
            BoundArg::Jacobi => Self::Jacobi,
            BoundArg::Isotorus => Self::Isotorus,
            BoundArg::Conjecture => Self::Conjecture,
        }
    }
}

/// A finite-gap set parsed from JSON.
#[derive(Clone, Debug)]
pub struct Bands(pub FiniteGapSet);

impl std::str::FromStr for Bands {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            One([f64; 2]),
            Many(Vec<[f64; 2]>),
        }
        let pairs = match serde_json::from_str(s)? {
            Raw::One(b) => vec![b],
            Raw::Many(v) => v,
        };
        let pairs: Vec<(f64, f64)> = pairs.into_iter().map(|[a, b]| (a, b)).collect();
        Ok(Self(FiniteGapSet::new(&pairs)?))
    }
}

/// A JSON array argument.
#[derive(Clone, Debug)]
pub struct JsonList<T>(pub Vec<T>);

impl<T: for<'de> Deserialize<'de>> std::str::FromStr for JsonList<T> {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(Self(serde_json::from_str(s)?))
    }
}

/// Grid values: `start:stop:count` (inclusive, evenly spaced) or a comma list.
#[derive(Clone, Debug, PartialEq)]
pub struct Grid(pub Vec<f64>);

impl std::str::FromStr for Grid {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidParameter(format!("bad grid {s:?}"));
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() == 3 {
            let start: f64 = parts[0].trim().parse().map_err(|_| bad())?;
            let stop: f64 = parts[1].trim().parse().map_err(|_| bad())?;
            let count: usize = parts[2].trim().parse().map_err(|_| bad())?;
            return match count {
                0 => Err(bad()),
                1 => Ok(Self(vec![start])),
                _ => Ok(Self((0..count).map(|i| start + (stop - start) * i as f64 / (count - 1) as f64).collect())),
            };
        }
        s.split(',').map(|t| t.trim().parse().map_err(|_| bad())).collect::<Result<_>>().map(Self)
    }
}

/// Cover levels: `lo..hi` (inclusive) or a comma list.
#[derive(Clone, Debug, PartialEq)]
pub struct Levels(pub Vec<u32>);

impl std::str::FromStr for Levels {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidParameter(format!("bad level list {s:?}"));
        if let Some((lo, hi)) = s.split_once("..") {
            let lo: u32 = lo.trim().parse().map_err(|_| bad())?;
            let hi: u32 = hi.trim().parse().map_err(|_| bad())?;
            if lo == 0 || hi < lo {
                return Err(bad());
            }
            return Ok(Self((lo..=hi).collect()));
        }
        s.split(',').map(|t| t.trim().parse().map_err(|_| bad())).collect::<Result<_>>().map(Self)
    }
}

fn read_measure(arg: &str) -> Result<Measure> {
    if arg.trim_start().starts_with('{') {
        Measure::from_json(arg)
    } else {
        Measure::from_json(&std::fs::read_to_string(arg)?)
    }
}

impl MeasureArgs {
    fn given(&self) -> Result<Option<Measure>> {
        match (&self.measure, &self.jacobi) {
            (Some(m), _) => read_measure(m).map(Some),
            (None, Some(Grid(ab))) => match ab[..] {
                [alpha, beta] => jacobi_measure(alpha, beta).map(Some),
                _ => Err(Error::InvalidParameter("--jacobi takes alpha,beta".into())),
            },
            (None, None) => Ok(None),
        }
    }

    /// The measure alone; `K` is solved for only when the measure is `mu_K`.
    pub fn measure(&self) -> Result<Measure> {
        match self.given()? {
            Some(mu) => Ok(mu),
            None => Ok(self.resolve()?.0),
        }
    }

    /// The measure and the equilibrium data of its reference set `K`.
    pub fn resolve(&self) -> Result<(Measure, EquilibriumData)> {
        let set = self.bands.as_ref().map(|b| b.0.clone());
        match (self.given()?, set) {
            (Some(mu), Some(set)) => Ok((mu, equilibrium(&set)?)),
            (Some(mu), None) => {
                let set = mu.support().cloned().ok_or_else(|| {
                    Error::InvalidParameter("measure without a.c. part needs --bands for the set K".into())
                })?;
                Ok((mu, equilibrium(&set)?))
            }
            (None, Some(set)) => {
                let eq = equilibrium(&set)?;
                Ok((eq.measure().clone(), eq))
            }
            (None, None) => Err(Error::InvalidParameter("give --measure, --jacobi or --bands".into())),
        }
    }
}

/// Row of the Jacobi scan.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct JacobiScanRow {
    pub alpha: f64,
    pub beta: f64,
    pub r1: f64,
    pub l: f64,
    /// `min_{1 <= n <= n_max} R_n`.
    pub min_r: f64,
    pub regime: JacobiRegime,
}

/// `R_1`, `L` and `min R_n` on a product grid, rows sorted by `(alpha, beta)`.
pub fn jacobi_scan(alphas: &[f64], betas: &[f64], n_max: u32) -> Vec<JacobiScanRow> {
    let mut rows: Vec<JacobiScanRow> = alphas
        .iter()
        .flat_map(|&alpha| betas.iter().map(move |&beta| (alpha, beta)))
        .map(|(alpha, beta)| JacobiScanRow {
            alpha,
            beta,
            r1: jacobi_r(alpha, beta, 1),
            l: jacobi_l(alpha, beta),
            min_r: (1..=n_max.max(1)).map(|n| jacobi_log_r(alpha, beta, n)).fold(f64::INFINITY, f64::min).exp(),
            regime: jacobi_regime(alpha, beta),
        })
        .collect();
    rows.sort_by(|a, b| a.alpha.total_cmp(&b.alpha).then(a.beta.total_cmp(&b.beta)));
    rows
}

/// Row of the sharpness table; `eps` is absent for the `np < 1` family.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SharpnessRow {
    pub eps: Option<f64>,
    pub widom: f64,
    pub widom_pow: f64,
    pub entropy: f64,
    pub ratio: f64,
    pub certified: bool,
}

/// `[W_n^p]^p / S` for the extremal families on `[-2, 2]`.
pub fn sharpness_table(n: u32, p: f64, eps: &[f64]) -> Result<Vec<SharpnessRow>> {
    if !(p > 0.0) || n == 0 {
        return Err(Error::InvalidParameter(format!("need n >= 1 and p > 0, got n = {n}, p = {p}")));
    }
    let eq = equilibrium(&FiniteGapSet::interval(-2.0, 2.0)?)?;
    let row = |mu: Measure, eps: Option<f64>| -> Result<SharpnessRow> {
        let w = widom_wp(&mu, &eq, n as usize, Order::Finite(p))?;
        let entropy = szego_entropy(&mu, &eq)?;
        let widom_pow = w.value.powf(p);
        Ok(SharpnessRow { eps, widom: w.value, widom_pow, entropy, ratio: widom_pow / entropy, certified: w.certified })
    };
    if (n as f64) * p < 1.0 {
        return Ok(vec![row(sharpness_measure_small(n, p)?, None)?]);
    }
    eps.iter().map(|&e| row(sharpness_measure_eps(n, p, e)?, Some(e))).collect()
}

/// Row of the Cantor table.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CantorRow {
    pub level: u32,
    pub capacity: f64,
    pub n: usize,
    pub widom: f64,
}

/// Cantor table with the `liminf` estimate `min_{n > n_max/2} W_n^2` at the finest level.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CantorTable {
    pub rows: Vec<CantorRow>,
    pub liminf_estimate: f64,
}

/// `W_n^2` of the level-`L` Cantor measure, with `cap(K_L)` of the level-`L`
/// ternary cover standing in for the capacity of the Cantor set.
pub fn cantor_table(levels: &[u32], n_max: usize) -> Result<CantorTable> {
    let top = levels.iter().copied().max().ok_or_else(|| Error::InvalidParameter("no levels".into()))?;
    if n_max == 0 {
        return Err(Error::InvalidParameter("n_max must be at least 1".into()));
    }
    let eqs = equilibria_along(&outer_covers(CantorSpec { level: top })?)?;
    let mut sorted = levels.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    let mut rows = vec![];
    for &level in &sorted {
        let eq = &eqs[level as usize - 1];
        let mu = cantor_measure(CantorSpec { level })?;
        for (n, widom) in widom_w2_sequence(&mu, eq, n_max)?.into_iter().enumerate().skip(1) {
            rows.push(CantorRow { level, capacity: eq.capacity(), n, widom });
        }
    }
    let liminf_estimate =
        rows.iter().filter(|r| r.level == top && r.n > n_max / 2).map(|r| r.widom).fold(f64::INFINITY, f64::min);
    Ok(CantorTable { rows, liminf_estimate })
}

/// Row of the exploratory conjecture scan.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConjectureRow {
    /// `interval-constant` or `reflectionless`.
    pub family: String,
    pub bands: Vec<[f64; 2]>,
    pub gammas: Vec<f64>,
    pub p: f64,
    pub n: usize,
    pub widom_pow: f64,
    pub bound: f64,
    pub margin: f64,
    pub certified: bool,
}

fn report_rows(family: &str, gammas: &[f64], report: &WidomReport, p: f64) -> Vec<ConjectureRow> {
    report
        .rows
        .iter()
        .map(|r| ConjectureRow {
            family: family.into(),
            bands: report.bands.clone(),
            gammas: gammas.to_vec(),
            p,
            n: r.n,
            widom_pow: r.widom_pow,
            bound: report.bound,
            margin: r.margin,
            certified: r.certified,
        })
        .collect()
}

/// `[W_n^p(mu_K)]^p` minus the interval constant on random two-band sets, and
/// `[W_n^2]^2 - 2S` for reflectionless measures with gap points at the
/// quartiles of the gap.
pub fn conjecture_scan(ps: &[f64], n_max: usize, sets: usize, seed: u64) -> Result<Vec<ConjectureRow>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = vec![];
    for _ in 0..sets {
        let eq = equilibrium(&random_finite_gap_set(&mut rng, 1))?;
        for &p in ps {
            conjecture_constant(p)?;
            let report = verify_bounds(eq.measure(), &eq, Order::Finite(p), n_max, BoundKind::Conjecture)?;
            rows.extend(report_rows("interval-constant", &[], &report, p));
        }
        let (lo, hi) = eq.set().gaps()[0];
        for t in [0.25, 0.75] {
            let g = [lo + t * (hi - lo)];
            let mu = reflectionless_measure(&eq, &g)?;
            let report = verify_bounds(&mu, &eq, Order::Finite(2.0), n_max, BoundKind::Universal)?;
            let s2 = 2.0 * report.entropy;
            rows.extend(report_rows("reflectionless", &g, &report, 2.0).into_iter().map(|mut r| {
                r.bound = s2;
                r.margin = r.widom_pow - s2;
                r
            }));
        }
    }
    Ok(rows)
}

fn g17(x: f64) -> String {
    format!("{x:.16e}")
}

fn csv_f64s(xs: &[f64]) -> String {
    xs.iter().map(|&x| g17(x)).collect::<Vec<_>>().join(";")
}

fn json_string<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("outputs always serialize")
}

/// Rendered output and whether every asserted check passed.
struct Outcome {
    text: String,
    pass: bool,
}

impl Outcome {
    fn ok(text: String) -> Self {
        Self { text, pass: true }
    }
}

fn report_outcome(report: &WidomReport, format: Format) -> Outcome {
    let text = match format {
        Format::Json => report.to_json(),
        Format::Csv => report.to_csv(),
    };
    Outcome { text, pass: report.pass || report.exploratory }
}

#[derive(Serialize)]
struct ExtremalOutput {
    n: usize,
    p: Order,
    norm: f64,
    widom_factor: f64,
    /// Monomial coefficients `c_0..c_n`, `c_n = 1`.
    coefficients: Option<Vec<f64>>,
    diagnostics: Option<Diagnostics>,
    certified: bool,
}

fn run(cmd: Command) -> Result<Outcome> {
    match cmd {
        Command::Capacity(SetArgs { bands }) => {
            let eq = equilibrium(&bands.0)?;
            Ok(Outcome::ok(json_string(&json!({ "capacity": eq.capacity(), "log_capacity": eq.log_capacity() }))))
        }
        Command::Eqmeasure(SetArgs { bands }) => Ok(Outcome::ok(json_string(&equilibrium(&bands.0)?.summary()))),
        Command::Recurrence { measure, n } => {
            let rc = recurrence(&measure.measure()?, n)?;
            let mut out = String::from("k,a_k,b_k,norm\n");
            let _ = writeln!(out, "0,,,{}", g17(rc.norms[0]));
            for k in 1..=n {
                let _ = writeln!(out, "{k},{},{},{}", g17(rc.a[k - 1]), g17(rc.b[k - 1]), g17(rc.norms[k]));
            }
            Ok(Outcome::ok(out))
        }
        Command::Extremal { measure, n, p } => {
            let (mu, eq) = measure.resolve()?;
            let scale = (n as f64 * eq.log_capacity()).exp();
            let out = match p {
                Order::Finite(pv) if pv < 1.0 => {
                    let w = widom_wp(&mu, &eq, n, p)?;
                    ExtremalOutput {
                        n,
                        p,
                        norm: w.norm,
                        widom_factor: w.value,
                        coefficients: None,
                        diagnostics: None,
                        certified: w.certified,
                    }
                }
                _ => {
                    let r = match p {
                        Order::Sup => minimal_monic_sup(&eq, n)?,
                        Order::Finite(pv) => minimal_monic_lp(&mu, n, pv)?,
                    };
                    ExtremalOutput {
                        n,
                        p,
                        norm: r.norm,
                        widom_factor: r.norm / scale,
                        coefficients: Some(r.polynomial.to_monomial()),
                        certified: r.diagnostics.certified,
                        diagnostics: Some(r.diagnostics),
                    }
                }
            };
            Ok(Outcome::ok(json_string(&out)))
        }
        Command::Entropy { measure } => {
            let (mu, eq) = measure.resolve()?;
            let entropy = szego_entropy(&mu, &eq)?;
            let eigenvalue = crate::szego::eigenvalue_function(&mu, &eq)?;
            Ok(Outcome::ok(json_string(&json!({ "entropy": entropy, "eigenvalue": eigenvalue }))))
        }
        Command::Verify { measure, p, n_max, bound, format } => {
            let (mu, eq) = measure.resolve()?;
            Ok(report_outcome(&verify_bounds(&mu, &eq, p, n_max, bound.into())?, format))
        }
        Command::JacobiScan { alpha_grid, beta_grid, n_max } => {
            let mut out = String::from("alpha,beta,r1,l,min_r,regime\n");
            for r in jacobi_scan(&alpha_grid.0, &beta_grid.0, n_max) {
                let regime = serde_json::to_value(r.regime)?;
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{}",
                    g17(r.alpha),
                    g17(r.beta),
                    g17(r.r1),
                    g17(r.l),
                    g17(r.min_r),
                    regime.as_str().unwrap_or_default()
                );
            }
            Ok(Outcome::ok(out))
        }
        Command::Sharpness { n, p, eps } => {
            let mut out = String::from("eps,widom,widom_pow,entropy,ratio,certified\n");
            for r in sharpness_table(n, p, &eps)? {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{}",
                    r.eps.map(g17).unwrap_or_default(),
                    g17(r.widom),
                    g17(r.widom_pow),
                    g17(r.entropy),
                    g17(r.ratio),
                    r.certified
                );
            }
            Ok(Outcome::ok(out))
        }
        Command::Isotorus { bands, gammas, flags, n_max, corpus, seed, sets, per_set } => {
            if corpus {
                let mut reports = vec![];
                for (eq, points) in torus_corpus(seed, sets, per_set)? {
                    for tp in points {
                        reports.push(json!({ "point": tp, "report": verify_isolb(&tp, &eq, n_max)? }));
                    }
                }
                let pass = reports.iter().all(|r| r["report"]["pass"].as_bool() == Some(true));
                return Ok(Outcome { text: json_string(&reports), pass });
            }
            let set = bands.ok_or_else(|| Error::InvalidParameter("--bands is required".into()))?.0;
            let eq = equilibrium(&set)?;
            let flags: Vec<bool> = flags.0.iter().map(|&s| s != 0).collect();
            let tp = TorusPoint::new(&eq, &gammas.0, &flags)?;
            let mu = torus_measure(&tp)?;
            let report = verify_isolb(&tp, &eq, n_max)?;
            let pass = report.pass;
            let text = json_string(&json!({ "point": tp, "measure": mu.to_doc(), "report": report }));
            Ok(Outcome { text, pass })
        }
        Command::Cantor { levels, n_max, format } => {
            let table = cantor_table(&levels.0, n_max)?;
            let text = match format {
                Format::Json => json_string(&table),
                Format::Csv => {
                    eprintln!("liminf estimate {}", g17(table.liminf_estimate));
                    let mut out = String::from("level,capacity,n,widom\n");
                    for r in &table.rows {
                        let _ = writeln!(out, "{},{},{},{}", r.level, g17(r.capacity), r.n, g17(r.widom));
                    }
                    out
                }
            };
            Ok(Outcome::ok(text))
        }
        Command::ConjectureScan { p, n_max, sets, seed } => {
            let mut out = String::from("family,bands,gammas,p,n,widom_pow,bound,margin,certified\n");
            for r in conjecture_scan(&p, n_max, sets, seed)? {
                let bands: Vec<f64> = r.bands.iter().flatten().copied().collect();
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{},{},{},{}",
                    r.family,
                    csv_f64s(&bands),
                    csv_f64s(&r.gammas),
                    g17(r.p),
                    r.n,
                    g17(r.widom_pow),
                    g17(r.bound),
                    g17(r.margin),
                    r.certified
                );
            }
            Ok(Outcome::ok(out))
        }
    }
}

/// Exit status for an error: 2 for configuration problems, 3 for numerical failures.
pub fn exit_status(err: &Error) -> u8 {
    match err {
        Error::InvalidSet(_)
        | Error::InvalidParameter(_)
        | Error::InvalidMeasure(_)
        | Error::IneligibleBound(_)
        | Error::Json(_)
        | Error::Io(_) => 2,
        _ => 3,
    }
}

/// Runs a parsed command line, writing output and returning the exit status.
pub fn execute(cli: Cli) -> u8 {
    let outcome = match run(cli.command) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return exit_status(&e);
        }
    };
    let mut text = outcome.text;
    if !text.ends_with('\n') {
        text.push('\n');
    }
    let written = match &cli.output {
        Some(path) => std::fs::write(path, &text),
        None => {
            print!("{text}");
            Ok(())
        }
    };
    if let Err(e) = written {
        eprintln!("error: {e}");
        return 2;
    }
    if outcome.pass {
        0
    } else {
        eprintln!("bound violated");
        1
    }
}

/// Entry point of the `widom` binary.
pub fn main() -> ExitCode {
    ExitCode::from(execute(Cli::parse()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids_and_levels() {
        assert_eq!("0:1:3".parse::<Grid>().unwrap().0, vec![0.0, 0.5, 1.0]);
        assert_eq!("1,-0.5".parse::<Grid>().unwrap().0, vec![1.0, -0.5]);
        assert!("0:1:0".parse::<Grid>().is_err());
        assert_eq!("8..10".parse::<Levels>().unwrap().0, vec![8, 9, 10]);
        assert!("3..1".parse::<Levels>().is_err());
    }

    #[test]
    fn bands_forms() {
        assert_eq!("[-2,2]".parse::<Bands>().unwrap().0.bands(), &[(-2.0, 2.0)]);
        assert_eq!("[[-1,-0.5],[0.5,1]]".parse::<Bands>().unwrap().0.genus(), 1);
        assert!("[[0,1],[0.5,2]]".parse::<Bands>().is_err());
    }

    #[test]
    fn unknown_flags_rejected() {
        assert!(Cli::try_parse_from(["widom", "capacity", "--bands", "[-2,2]", "--bogus"]).is_err());
        assert!(Cli::try_parse_from(["widom", "capacity", "--bands", "[-2,2]"]).is_ok());
    }

    #[test]
    fn config_errors_exit_two() {
        let cli = Cli::try_parse_from(["widom", "capacity", "--bands", "[[0,1],[0.5,2]]"]);
        assert!(cli.is_err());
        let cli = Cli::try_parse_from(["widom", "sharpness", "--n", "2", "--p", "2", "--eps", "0.9"]).unwrap();
        assert_eq!(execute(cli), 2);
    }

    #[test]
    fn jacobi_scan_free_case() {
        let rows = jacobi_scan(&[0.0], &[0.0], 20);
        assert!((rows[0].l - 16.0 / (3.0 * std::f64::consts::PI)).abs() < 1e-12);
    }
}
