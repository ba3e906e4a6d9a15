//! Szegő entropy, the eigenvalue function, closed-form bound constants and
//! verification reports comparing computed Widom factors with lower bounds.

use std::f64::consts::{LN_2, PI};
use std::fmt::Write as _;

use serde::Serialize;
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::extremal::{widom_wp, Order};
use crate::measures::{equilibrium_density, DensityKind, FiniteGapSet, Measure, Singularity};
use crate::orthopoly::widom_w2_sequence;
use crate::potential::EquilibriumData;
use crate::quadrature::{self, Point};

/// A report passes when every margin is at least `-MARGIN_TOLERANCE`.
pub const MARGIN_TOLERANCE: f64 = 1e-8;

const SET_TOLERANCE: f64 = 1e-12;

fn same_set(a: &FiniteGapSet, b: &FiniteGapSet) -> bool {
    let scale = b.endpoints().iter().fold(1.0f64, |m, e| m.max(e.abs()));
    a.bands().len() == b.bands().len()
        && a.endpoints().iter().zip(b.endpoints()).all(|(x, y)| (x - y).abs() <= SET_TOLERANCE * scale)
}

fn inside(a: &FiniteGapSet, b: &FiniteGapSet) -> bool {
    let scale = b.endpoints().iter().fold(1.0f64, |m, e| m.max(e.abs()));
    let tol = SET_TOLERANCE * scale;
    a.bands().iter().all(|&(lo, hi)| b.bands().iter().any(|&(u, v)| lo >= u - tol && hi <= v + tol))
}

/// `S(mu) = exp int log(w / rho_K) dmu_K`, with `w` the density of the a.c.
/// part of `mu`. Zero when `mu` has no a.c. part or its support misses part of `K`.
pub fn szego_entropy(mu: &Measure, eq: &EquilibriumData) -> Result<f64> {
    let Some(ac) = mu.ac() else { return Ok(0.0) };
    let k = eq.set();
    if !inside(ac.support(), k) {
        return Err(Error::InvalidMeasure("a.c. support is not contained in K".into()));
    }
    if !same_set(ac.support(), k) {
        return Ok(0.0);
    }
    let crit_scale = k.endpoints().iter().fold(1.0f64, |m, e| m.max(e.abs()));
    let same_rho = ac
        .critical_points()
        .iter()
        .zip(eq.critical_points())
        .all(|(a, b)| (a - b).abs() <= SET_TOLERANCE * crit_scale);
    let breaks: Vec<Singularity> =
        ac.factors().iter().filter(|f| k.contains(f.location)).map(|f| Singularity::new(f.location, 0.0)).collect();
    let log_f = |p: Point| {
        let mut v = ac.log_relative_density(&p);
        if !same_rho {
            v += ac.rho(&p).ln() - equilibrium_density(k.bands(), eq.critical_points(), &p).ln();
        }
        v
    };
    let est = quadrature::integrate(log_f, &breaks, eq.measure(), 1e-13)?;
    Ok(if est.value.is_nan() { 0.0 } else { est.value.exp() })
}

/// `E(mu) = exp sum G_K(x)` over atoms `x` of `mu` outside `K`.
pub fn eigenvalue_function(mu: &Measure, eq: &EquilibriumData) -> Result<f64> {
    let mut total = 0.0;
    for a in mu.atoms() {
        total += eq.green(a.location)?;
    }
    Ok(total.exp())
}

/// `2 ((m!)^2 / (2m)!)^{1/(2m)}` with `m = ceil(p / (2(p - 1)))`, the lower
/// bound for `W_n^p(mu_K)`, `p > 1`.
pub fn eq_bound_constant(p: f64) -> Result<f64> {
    if !(p > 1.0) {
        return Err(Error::InvalidParameter(format!("equilibrium bound needs p > 1, got {p}")));
    }
    let r = if p.is_finite() { p / (2.0 * (p - 1.0)) } else { 0.5 };
    let m = (r * (1.0 - 1e-12)).ceil().max(1.0);
    Ok(2.0 * ((2.0 * ln_gamma(m + 1.0) - ln_gamma(2.0 * m + 1.0)) / (2.0 * m)).exp())
}

/// `m` in [`eq_bound_constant`].
pub fn eq_bound_order(p: f64) -> u32 {
    let r = p / (2.0 * (p - 1.0));
    (r * (1.0 - 1e-12)).ceil().max(1.0) as u32
}

/// `log R_n(alpha, beta)`, `R_n = [W_n^2(mu_{alpha,beta})]^2 / S(mu_{alpha,beta})`.
pub fn jacobi_log_r(alpha: f64, beta: f64, n: u32) -> f64 {
    let s = alpha + beta;
    let lead = (2.0 * s + 2.0) * LN_2 - PI.ln();
    if n == 0 {
        return lead + ln_gamma(alpha + 1.0) + ln_gamma(beta + 1.0) - ln_gamma(s + 2.0);
    }
    let n = f64::from(n);
    lead + 4.0 * n * LN_2 + ln_gamma(n + 1.0) - (s + 2.0 * n + 1.0).ln()
        + ln_gamma(alpha + n + 1.0)
        + ln_gamma(beta + n + 1.0)
        + ln_gamma(s + n + 1.0)
        - 2.0 * ln_gamma(s + 2.0 * n + 1.0)
}

pub fn jacobi_r(alpha: f64, beta: f64, n: u32) -> f64 {
    jacobi_log_r(alpha, beta, n).exp()
}

/// `D_n = R_{n+1} / R_n - 1` in the cancellation-free form
/// `((a^2 - b^2)^2 + s^2 (1 - 2(a^2 + b^2))) / (s^2 (s^2 - 1))`, `s = a + b + 2(n + 1)`.
pub fn jacobi_d(alpha: f64, beta: f64, n: u32) -> f64 {
    let s2 = (alpha + beta + 2.0 * (f64::from(n) + 1.0)).powi(2);
    let q = alpha * alpha + beta * beta;
    ((alpha * alpha - beta * beta).powi(2) + s2 * (1.0 - 2.0 * q)) / (s2 * (s2 - 1.0))
}

/// `D_n` in product form `(s^2 - (a+b)^2)(s^2 - (a-b)^2) / (s^2 (s^2 - 1)) - 1`.
pub fn jacobi_d_product(alpha: f64, beta: f64, n: u32) -> f64 {
    let s2 = (alpha + beta + 2.0 * (f64::from(n) + 1.0)).powi(2);
    (s2 - (alpha + beta).powi(2)) * (s2 - (alpha - beta).powi(2)) / (s2 * (s2 - 1.0)) - 1.0
}

/// Optimal constant `L = min(2, R_1)` in `[W_n^2]^2 >= L S` for Jacobi weights.
pub fn jacobi_l(alpha: f64, beta: f64) -> f64 {
    jacobi_r(alpha, beta, 1).min(2.0)
}

/// Sign regime of `D_n` predicted for `(alpha, beta)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum JacobiRegime {
    /// `|a| + |b| >= 1`: `R_n` nonincreasing.
    Decreasing,
    /// `a^2 + b^2 <= 1/2` and `|a| + |b| < 1`: `R_n` strictly increasing.
    Increasing,
    /// Neither condition holds.
    Mixed,
}

pub fn jacobi_regime(alpha: f64, beta: f64) -> JacobiRegime {
    if alpha.abs() + beta.abs() >= 1.0 {
        JacobiRegime::Decreasing
    } else if alpha * alpha + beta * beta <= 0.5 {
        JacobiRegime::Increasing
    } else {
        JacobiRegime::Mixed
    }
}

/// `2^p / sqrt(pi) * Gamma((p+1)/2) / Gamma(p/2 + 1)`, the value of
/// `[W_n^p(mu_K)]^p` on an interval.
pub fn conjecture_constant(p: f64) -> Result<f64> {
    if !(p >= 1.0 && p.is_finite()) {
        return Err(Error::InvalidParameter(format!("conjecture constant needs 1 <= p < inf, got {p}")));
    }
    Ok((p * LN_2 - 0.5 * PI.ln() + ln_gamma(0.5 * (p + 1.0)) - ln_gamma(0.5 * p + 1.0)).exp())
}

/// Which lower bound a report checks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundKind {
    /// `[W_n^p]^p >= S(mu)`.
    Universal,
    /// `W_n^p(mu_K) >= 2((m!)^2/(2m)!)^{1/(2m)}`, compared in `p`-th powers.
    Equilibrium,
    /// `[W_n^2]^2 >= L S` for Jacobi weights.
    Jacobi,
    /// `[W_n^2]^2 >= 2 E^2 S` for isospectral torus measures.
    Isotorus,
    /// Interval value of `[W_n^p(mu_K)]^p`, conjectured as a lower bound.
    Conjecture,
}

impl std::str::FromStr for BoundKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "universal" => Self::Universal,
            "equilibrium" => Self::Equilibrium,
            "jacobi" => Self::Jacobi,
            "isotorus" => Self::Isotorus,
            "conjecture" => Self::Conjecture,
            _ => return Err(Error::InvalidParameter(format!("unknown bound kind {s:?}"))),
        })
    }
}

/// One row of a report.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReportRow {
    pub n: usize,
    pub widom: f64,
    /// `[W_n^p]^p`.
    pub widom_pow: f64,
    pub margin: f64,
    pub certified: bool,
    /// `[W_n^2]^2 / (2 S)` for `p = 2`.
    pub szego_ratio: Option<f64>,
    /// `|W_n^2 - a_1...a_n / cap^n| / W_n^2` with `W_n^2` from direct quadrature.
    pub sum_rule_gap: Option<f64>,
}

/// Widom factors of a measure against one lower bound.
#[derive(Clone, Debug, Serialize)]
pub struct WidomReport {
    pub measure: String,
    pub bands: Vec<[f64; 2]>,
    pub p: Order,
    pub entropy: f64,
    pub eigenvalue: f64,
    pub bound_kind: BoundKind,
    pub bound: f64,
    /// Exploratory reports (open conjectures, uncertified minima) are never
    /// counted as failures.
    pub exploratory: bool,
    pub rows: Vec<ReportRow>,
    pub margin: f64,
    pub pass: bool,
}

fn g17(x: f64) -> String {
    format!("{x:.16e}")
}

fn opt17(x: Option<f64>) -> String {
    x.map(g17).unwrap_or_default()
}

impl WidomReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports always serialize")
    }

    /// One row per `n`, numbers with 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,widom,widom_pow,bound,margin,certified,szego_ratio,sum_rule_gap\n");
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{}",
                r.n,
                g17(r.widom),
                g17(r.widom_pow),
                g17(self.bound),
                g17(r.margin),
                r.certified,
                opt17(r.szego_ratio),
                opt17(r.sum_rule_gap)
            );
        }
        out
    }

    /// Recomputes the margin and pass flag from the rows.
    pub(crate) fn finish(&mut self) {
        self.margin = self.rows.iter().map(|r| r.margin).fold(f64::INFINITY, f64::min);
        self.pass = self.margin >= -MARGIN_TOLERANCE;
    }
}

/// Short human-readable identifier of a measure.
pub fn measure_label(mu: &Measure) -> String {
    match mu.kind() {
        DensityKind::Jacobi { alpha, beta } => format!("jacobi(alpha={alpha}, beta={beta})"),
        DensityKind::EquilibriumRelative if mu.atoms().is_empty() && mu.ac().is_some_and(|a| a.factors().is_empty()) => {
            "equilibrium".into()
        }
        DensityKind::EquilibriumRelative => "relative-density".into(),
        DensityKind::SharpnessEps { n, p, eps } => format!("sharpness(n={n}, p={p}, eps={eps})"),
        DensityKind::SharpnessSmall { n, p } => format!("sharpness-small(n={n}, p={p})"),
        DensityKind::Isospectral { gammas, flags } => format!("isospectral(gamma={gammas:?}, s={flags:?})"),
        DensityKind::Reflectionless { gammas } => format!("reflectionless(gamma={gammas:?})"),
        DensityKind::Atomic => format!("atomic({} atoms)", mu.atoms().len()),
        DensityKind::CustomTable => "table".into(),
    }
}

/// Whether `mu` is the equilibrium measure of the set of `eq`.
pub fn is_equilibrium_of(mu: &Measure, eq: &EquilibriumData) -> bool {
    let Some(ac) = mu.ac() else { return false };
    let scale = eq.set().endpoints().iter().fold(1.0f64, |m, e| m.max(e.abs()));
    mu.atoms().is_empty()
        && ac.factors().is_empty()
        && same_set(ac.support(), eq.set())
        && ac.critical_points().iter().zip(eq.critical_points()).all(|(a, b)| (a - b).abs() <= 1e-10 * scale)
        && (ac.scale() - 1.0).abs() <= 1e-8
        && matches!(mu.kind(), DensityKind::EquilibriumRelative)
}

/// Widom factors `W_1..W_{n_max}` of `mu` (relative to the set of `eq`)
/// checked against `kind`.
pub fn verify_bounds(mu: &Measure, eq: &EquilibriumData, p: Order, n_max: usize, kind: BoundKind) -> Result<WidomReport> {
    let Order::Finite(pv) = p else {
        return Err(Error::IneligibleBound("reports compare p-th powers; p must be finite".into()));
    };
    if n_max == 0 {
        return Err(Error::InvalidParameter("n_max must be at least 1".into()));
    }
    let entropy = szego_entropy(mu, eq)?;
    let eigenvalue = eigenvalue_function(mu, eq)?;
    let need_p2 = |name: &str| {
        if pv == 2.0 {
            Ok(())
        } else {
            Err(Error::IneligibleBound(format!("{name} bound is stated for p = 2")))
        }
    };
    let mut exploratory = pv < 1.0 && !matches!(mu.kind(), DensityKind::SharpnessSmall { .. });
    let bound = match kind {
        BoundKind::Universal => entropy,
        BoundKind::Equilibrium => {
            if !is_equilibrium_of(mu, eq) {
                return Err(Error::IneligibleBound("equilibrium bound needs mu = mu_K".into()));
            }
            eq_bound_constant(pv)?.powf(pv)
        }
        BoundKind::Jacobi => {
            need_p2("Jacobi")?;
            let DensityKind::Jacobi { alpha, beta } = *mu.kind() else {
                return Err(Error::IneligibleBound("Jacobi bound needs a Jacobi weight".into()));
            };
            jacobi_l(alpha, beta) * entropy
        }
        BoundKind::Isotorus => {
            need_p2("isospectral torus")?;
            if !matches!(mu.kind(), DensityKind::Isospectral { .. }) {
                return Err(Error::IneligibleBound("isospectral bound needs a torus measure".into()));
            }
            2.0 * eigenvalue * eigenvalue * entropy
        }
        BoundKind::Conjecture => {
            exploratory = true;
            conjecture_constant(pv)?
        }
    };
    let values: Vec<(f64, bool)> = if pv == 2.0 {
        widom_w2_sequence(mu, eq, n_max)?.into_iter().skip(1).map(|w| (w, true)).collect()
    } else {
        (1..=n_max).map(|n| widom_wp(mu, eq, n, p).map(|w| (w.value, w.certified))).collect::<Result<_>>()?
    };
    let rows = values
        .into_iter()
        .enumerate()
        .map(|(i, (w, certified))| {
            let widom_pow = w.powf(pv);
            ReportRow {
                n: i + 1,
                widom: w,
                widom_pow,
                margin: widom_pow - bound,
                certified,
                szego_ratio: (pv == 2.0 && entropy > 0.0).then(|| widom_pow / (2.0 * entropy)),
                sum_rule_gap: None,
            }
        })
        .collect();
    let mut report = WidomReport {
        measure: measure_label(mu),
        bands: eq.set().bands().iter().map(|&(a, b)| [a, b]).collect(),
        p,
        entropy,
        eigenvalue,
        bound_kind: kind,
        bound,
        exploratory,
        rows,
        margin: 0.0,
        pass: false,
    };
    report.finish();
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::{jacobi_measure, JacobiParams};
    use crate::potential::equilibrium;

    fn interval_eq(a: f64, b: f64) -> EquilibriumData {
        equilibrium(&FiniteGapSet::interval(a, b).unwrap()).unwrap()
    }

    #[test]
    fn entropy_of_equilibrium_is_one() {
        let eq = equilibrium(&FiniteGapSet::new(&[(-1.0, -0.3), (0.2, 1.0)]).unwrap()).unwrap();
        assert!((szego_entropy(eq.measure(), &eq).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn entropy_of_uniform_weight() {
        let eq = interval_eq(-1.0, 1.0);
        let s = szego_entropy(&jacobi_measure(0.0, 0.0).unwrap(), &eq).unwrap();
        assert!((s - PI / 4.0).abs() < 1e-12);
    }

    #[test]
    fn entropy_of_jacobi_weights() {
        let eq = interval_eq(-1.0, 1.0);
        for &(a, b) in &[(-0.9, 0.3), (2.0, 5.0), (0.5, -0.5)] {
            let s = szego_entropy(&jacobi_measure(a, b).unwrap(), &eq).unwrap();
            let expect = JacobiParams::closed_form_constant(a, b) * PI / 2f64.powf(a + b + 1.0);
            assert!((s / expect - 1.0).abs() < 1e-10, "{a} {b}: {s} vs {expect}");
        }
    }

    #[test]
    fn bound_constants() {
        assert!((eq_bound_constant(2.0).unwrap() - 2f64.sqrt()).abs() < 1e-13);
        assert!((eq_bound_constant(4.0 / 3.0).unwrap() - 2.0 * (1.0f64 / 6.0).powf(0.25)).abs() < 1e-14);
        assert_eq!(eq_bound_order(4.0 / 3.0), 2);
        assert!(eq_bound_constant(1.0).is_err());
        assert!((conjecture_constant(2.0).unwrap() - 2.0).abs() < 1e-14);
        assert!((conjecture_constant(1.0).unwrap() - 4.0 / PI).abs() < 1e-14);
    }

    #[test]
    fn jacobi_closed_forms() {
        assert!((jacobi_r(0.0, 0.0, 1) - 16.0 / (3.0 * PI)).abs() < 1e-13);
        assert!((jacobi_d(0.0, 0.0, 1) - 1.0 / 15.0).abs() < 1e-15);
        assert_eq!(jacobi_l(0.5, 0.5), 2.0);
        for n in 0..50 {
            let (a, b) = (0.3, -0.7);
            let ratio = jacobi_r(a, b, n + 1) / jacobi_r(a, b, n) - 1.0;
            assert!((ratio - jacobi_d(a, b, n)).abs() < 1e-12);
            assert!((jacobi_d_product(a, b, n) - jacobi_d(a, b, n)).abs() < 1e-13);
        }
    }

    #[test]
    fn r_zero_is_reciprocal_entropy() {
        let (a, b) = (-0.9, -0.9);
        let s = JacobiParams::closed_form_constant(a, b) * PI / 2f64.powf(a + b + 1.0);
        assert!((jacobi_r(a, b, 0) * s - 1.0).abs() < 1e-13);
    }

    #[test]
    fn eigenvalue_function_cases() {
        use crate::measures::Atom;
        let eq = equilibrium(&FiniteGapSet::new(&[(-1.0, -0.2), (0.3, 1.0)]).unwrap()).unwrap();
        let none = jacobi_measure(1.0, 1.0).unwrap();
        assert_eq!(eigenvalue_function(&none, &eq).unwrap(), 1.0);
        let atoms = Measure::atomic(vec![Atom { location: 0.0, mass: 1.0 }, Atom { location: 0.5, mass: 1.0 }]).unwrap();
        let e = eigenvalue_function(&atoms, &eq).unwrap();
        assert!((e - eq.green(0.0).unwrap().exp()).abs() < 1e-14);
    }

    #[test]
    fn equilibrium_report() {
        let eq = equilibrium(&FiniteGapSet::new(&[(-1.0, -0.2), (0.3, 1.0)]).unwrap()).unwrap();
        let r = verify_bounds(eq.measure(), &eq, Order::Finite(2.0), 10, BoundKind::Equilibrium).unwrap();
        assert!(r.pass, "{}", r.margin);
        assert!(verify_bounds(&jacobi_measure(0.0, 0.0).unwrap(), &eq, Order::Finite(2.0), 3, BoundKind::Equilibrium).is_err());
        assert_eq!(r.to_csv().lines().count(), 11);
    }
}
