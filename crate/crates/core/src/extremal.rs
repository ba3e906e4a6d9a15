//! Minimal monic polynomials in `L^p(mu)` and in the sup norm on a finite-gap set.
//!
//! For `1 <= p < inf` the functional `c -> ||P_c||_p^p` is convex and is
//! minimized by a damped Newton method in the orthonormal basis of `mu`.
//! Quadrature panels are split at the real zeros of the iterate so the
//! `|P|^p` kinks are integrated exactly. The sup norm is handled by a Remez
//! exchange on the extrema of the iterate. For `0 < p < 1` only candidate
//! norms and a heuristic local search are available.

use std::fmt;
use std::str::FromStr;

use nalgebra::linalg::Schur;
use nalgebra::{DMatrix, DVector};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::measures::{Atom, Measure, Singularity};
use crate::orthopoly::{recurrence, RecurrenceCoefficients};
use crate::potential::EquilibriumData;
use crate::quadrature::{self, DiscreteMeasure, Point};

/// First-order stationarity required of a certified `L^p` minimizer.
pub const STATIONARITY_TOLERANCE: f64 = 1e-8;

const MAX_NEWTON: usize = 200;
const RULE_ACCURACY: f64 = 1e-13;
const HESSIAN_ACCURACY: f64 = 1e-8;

/// The exponent of a norm: finite `p > 0` or the sup norm.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Order {
    Finite(f64),
    Sup,
}

impl Order {
    pub fn value(self) -> f64 {
        match self {
            Order::Finite(p) => p,
            Order::Sup => f64::INFINITY,
        }
    }
}

impl fmt::Display for Order {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Order::Finite(p) => write!(f, "{p}"),
            Order::Sup => write!(f, "inf"),
        }
    }
}

impl FromStr for Order {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "inf" | "infinity" | "sup" => Ok(Order::Sup),
            t => {
                let p: f64 = t.parse().map_err(|_| Error::InvalidParameter(format!("bad exponent {s:?}")))?;
                if p > 0.0 && p.is_finite() {
                    Ok(Order::Finite(p))
                } else {
                    Err(Error::InvalidParameter(format!("exponent must be positive, got {s}")))
                }
            }
        }
    }
}

impl Serialize for Order {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Order::Finite(p) => s.serialize_f64(*p),
            Order::Sup => s.serialize_str("inf"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Repr {
    /// `sum coef[k] q_k` in an orthonormal basis.
    Orthonormal { basis: RecurrenceCoefficients, coef: Vec<f64> },
    /// Ascending monomial coefficients.
    Monomial(Vec<f64>),
}

/// A monic real polynomial.
#[derive(Clone, Debug, PartialEq)]
pub struct MonicPolynomial {
    repr: Repr,
}

impl MonicPolynomial {
    /// `x^n + lower[n-1] x^{n-1} + ... + lower[0]`.
    pub fn from_monomial(lower: &[f64]) -> Self {
        let mut coef = lower.to_vec();
        coef.push(1.0);
        Self { repr: Repr::Monomial(coef) }
    }

    /// `(x - center)^n`.
    pub fn power(n: usize, center: f64) -> Self {
        let mut coef = vec![1.0];
        for _ in 0..n {
            let mut next = vec![0.0; coef.len() + 1];
            for (i, &c) in coef.iter().enumerate() {
                next[i + 1] += c;
                next[i] -= center * c;
            }
            coef = next;
        }
        Self { repr: Repr::Monomial(coef) }
    }

    /// `||P_n|| q_n + sum_{k<n} lower[k] q_k` in the orthonormal basis of `basis`.
    pub fn in_basis(basis: &RecurrenceCoefficients, lower: &[f64]) -> Self {
        let n = lower.len();
        let basis = RecurrenceCoefficients {
            a: basis.a[..n].to_vec(),
            b: basis.b[..n].to_vec(),
            norms: basis.norms[..=n].to_vec(),
        };
        let mut coef = lower.to_vec();
        coef.push(basis.norms[n]);
        Self { repr: Repr::Orthonormal { basis, coef } }
    }

    /// The monic orthogonal polynomial of degree `n` of `basis`.
    pub fn orthogonal(basis: &RecurrenceCoefficients, n: usize) -> Self {
        Self::in_basis(basis, &vec![0.0; n])
    }

    pub fn degree(&self) -> usize {
        match &self.repr {
            Repr::Orthonormal { coef, .. } | Repr::Monomial(coef) => coef.len() - 1,
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.eval_with_derivative(x).0
    }

    pub fn eval_with_derivative(&self, x: f64) -> (f64, f64) {
        match &self.repr {
            Repr::Monomial(c) => c.iter().rev().fold((0.0, 0.0), |(v, d), &ck| (v * x + ck, d * x + v)),
            Repr::Orthonormal { basis, coef } => {
                let n = coef.len() - 1;
                let mut val = vec![0.0; n + 1];
                let mut der = vec![0.0; n + 1];
                basis.orthonormal_with_derivative(x, n, &mut val, &mut der);
                coef.iter().zip(val.iter().zip(&der)).fold((0.0, 0.0), |(v, d), (c, (q, dq))| (v + c * q, d + c * dq))
            }
        }
    }

    /// Ascending monomial coefficients; the leading one is exactly 1.
    pub fn to_monomial(&self) -> Vec<f64> {
        let mut out = match &self.repr {
            Repr::Monomial(c) => c.clone(),
            Repr::Orthonormal { basis, coef } => basis.to_monomial(coef),
        };
        if let Some(last) = out.last_mut() {
            *last = 1.0;
        }
        out
    }

    /// Real zeros in `[lo, hi]`, from the eigenvalues of a companion-type
    /// matrix refined by Newton's method.
    pub fn real_zeros(&self, lo: f64, hi: f64) -> Vec<f64> {
        let n = self.degree();
        if n == 0 {
            return vec![];
        }
        let m = match &self.repr {
            Repr::Monomial(c) => {
                let mut m = DMatrix::zeros(n, n);
                for i in 1..n {
                    m[(i, i - 1)] = 1.0;
                }
                for i in 0..n {
                    m[(i, n - 1)] = -c[i];
                }
                m
            }
            Repr::Orthonormal { basis, coef } => {
                let mut m = DMatrix::zeros(n, n);
                for i in 0..n {
                    m[(i, i)] = basis.b[i];
                    if i + 1 < n {
                        m[(i, i + 1)] = basis.a[i];
                        m[(i + 1, i)] = basis.a[i];
                    }
                }
                let scale = basis.a[n - 1] / coef[n];
                for k in 0..n {
                    m[(n - 1, k)] -= scale * coef[k];
                }
                m
            }
        };
        let width = (hi - lo).abs().max(lo.abs()).max(hi.abs()).max(1.0);
        let eigenvalues = [f64::EPSILON, 1e-14, 1e-12]
            .iter()
            .find_map(|&eps| Schur::try_new(m.clone(), eps, 200 * n).map(|s| s.complex_eigenvalues()));
        let candidates: Vec<f64> = match eigenvalues {
            Some(ev) => ev.iter().filter(|z| z.im.abs() <= 1e-6 * width).map(|z| self.polish(z.re)).collect(),
            None => self.sign_changes(lo, hi),
        };
        let mut zeros: Vec<f64> = candidates.into_iter().filter(|&x| x >= lo && x <= hi).collect();
        zeros.sort_by(f64::total_cmp);
        zeros.dedup_by(|a, b| (*a - *b).abs() <= 1e-14 * width);
        zeros
    }

    /// Zeros at sign changes over a Chebyshev grid of `[lo, hi]`, by bisection.
    fn sign_changes(&self, lo: f64, hi: f64) -> Vec<f64> {
        let m = 64 * self.degree();
        let xs: Vec<f64> =
            (0..=m).map(|i| 0.5 * (lo + hi) - 0.5 * (hi - lo) * (std::f64::consts::PI * i as f64 / m as f64).cos()).collect();
        let mut out = vec![];
        for w in xs.windows(2) {
            let (mut a, mut b) = (w[0], w[1]);
            let (mut fa, fb) = (self.eval(a), self.eval(b));
            if fa == 0.0 {
                out.push(a);
                continue;
            }
            if fa * fb > 0.0 {
                continue;
            }
            for _ in 0..200 {
                let c = 0.5 * (a + b);
                if c <= a || c >= b {
                    break;
                }
                let fc = self.eval(c);
                if fa * fc <= 0.0 {
                    b = c;
                } else {
                    a = c;
                    fa = fc;
                }
            }
            out.push(0.5 * (a + b));
        }
        out
    }

    fn polish(&self, mut x: f64) -> f64 {
        let mut best = self.eval(x).abs();
        for _ in 0..8 {
            let (v, d) = self.eval_with_derivative(x);
            if d == 0.0 || v == 0.0 {
                break;
            }
            let trial = x - v / d;
            let tv = self.eval(trial).abs();
            if !(tv < best) {
                break;
            }
            x = trial;
            best = tv;
        }
        x
    }
}

/// Solver diagnostics.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Diagnostics {
    pub iterations: usize,
    /// First-order residual `max_k |g_k| / (p int |P|^{p-1} |q_k| dmu)` for
    /// `L^p`, or the relative gap between the sup norm and the levelled
    /// reference error for the sup norm.
    pub residual: f64,
    /// Whether the value is a certified minimum of a convex problem.
    pub certified: bool,
    /// A certified lower bound on the minimal norm, when one is available.
    pub lower_bound: Option<f64>,
}

/// A minimal monic polynomial and its norm.
#[derive(Clone, Debug)]
pub struct ExtremalResult {
    pub polynomial: MonicPolynomial,
    pub norm: f64,
    pub order: Order,
    pub diagnostics: Diagnostics,
}

fn zero_singularities(zeros: &[f64], exponent: f64) -> Vec<Singularity> {
    zeros.iter().map(|&z| Singularity::new(z, exponent)).collect()
}

/// `||P||_p` in `L^p(mu)`, `p > 0`; atoms are summed exactly.
pub fn lp_norm(poly: &MonicPolynomial, mu: &Measure, p: f64) -> Result<f64> {
    if !(p > 0.0 && p.is_finite()) {
        return Err(Error::InvalidParameter(format!("exponent must be positive and finite, got {p}")));
    }
    let (lo, hi) = mu.hull();
    let sing = zero_singularities(&poly.real_zeros(lo, hi), p);
    let est = quadrature::integrate_relative(|pt| poly.eval(pt.x).abs().powf(p), &sing, mu, 1e-13)?;
    Ok(est.value.powf(1.0 / p))
}

/// State of the `L^p` objective at `P = ||P_n|| (q_n + sum d_k q_k)`.
struct Objective<'a> {
    mu: &'a Measure,
    coarse: DiscreteMeasure,
    basis: &'a RecurrenceCoefficients,
    n: usize,
    p: f64,
}

struct Evaluation {
    value: f64,
    gradient: DVector<f64>,
    /// `p int |P|^{p-1} |q_k| dmu`, the scale of each gradient entry.
    magnitude: DVector<f64>,
    hessian: DMatrix<f64>,
}

/// Adds `w v v^T` to the lower triangle of `h`.
fn accumulate_outer(h: &mut DMatrix<f64>, v: &[f64], w: f64) {
    for (k, &vk) in v.iter().enumerate() {
        let t = w * vk;
        for (l, &vl) in v[..=k].iter().enumerate() {
            h[(k, l)] += t * vl;
        }
    }
}

impl<'a> Objective<'a> {
    fn poly(&self, d: &[f64]) -> MonicPolynomial {
        let nu = self.basis.norms[self.n];
        MonicPolynomial::in_basis(self.basis, &d.iter().map(|x| x * nu).collect::<Vec<_>>())
    }

    /// `int |q_n + sum d_k q_k|^p dmu` with gradient and Hessian in `d`.
    ///
    /// The quadrature rule is adapted to `|P|^{p-1} (|P| / M + (sum (q_k / M_k)^2)^{1/2})`
    /// with `M`, `M_k` coarse estimates of the integrals of each term, so
    /// every gradient entry is resolved to the same relative accuracy while
    /// the driver stays smooth away from the zeros of `P`.
    fn evaluate(&self, d: &[f64], second: bool) -> Result<Evaluation> {
        let (n, p) = (self.n, self.p);
        let (lo, hi) = self.mu.hull();
        let zeros = self.poly(d).real_zeros(lo, hi);
        let basis = self.basis;
        let values = |x: f64, q: &mut [f64]| -> f64 {
            basis.orthonormal(x, n, q);
            q[n] + d.iter().zip(q.iter()).map(|(a, b)| a * b).sum::<f64>()
        };
        let mut scales = vec![0.0; n + 1];
        let mut q = vec![0.0; n + 1];
        for (&x, &w) in self.coarse.nodes.iter().zip(&self.coarse.weights) {
            let v = values(x, &mut q);
            let a = v.abs().powf(p - 1.0);
            for k in 0..n {
                scales[k] += w * a * q[k].abs();
            }
            scales[n] += w * a * v.abs();
        }
        let floor = 1e-12 * scales.iter().fold(f64::MIN_POSITIVE, |m, s| m.max(*s));
        let inv: Vec<f64> = scales.iter().map(|s| 1.0 / s.max(floor)).collect();
        let driver = |pt: Point| {
            let mut q = vec![0.0; n + 1];
            let v = values(pt.x, &mut q);
            let a = v.abs();
            if a == 0.0 {
                return 0.0;
            }
            let s: f64 = q[..n].iter().zip(&inv).map(|(t, i)| (t * i).powi(2)).sum();
            a.powf(p - 1.0) * (a * inv[n] + s.sqrt())
        };
        let rule = quadrature::adapted_rule(self.mu, &driver, &zero_singularities(&zeros, p - 1.0), RULE_ACCURACY)?;
        let mut value = 0.0;
        let mut gradient = DVector::zeros(n);
        let mut magnitude = DVector::zeros(n);
        let mut hessian = DMatrix::zeros(n, n);
        let smooth_hessian = second && p >= 2.0;
        for (pt, w) in &rule {
            let v = values(pt.x, &mut q);
            let a = v.abs();
            if a == 0.0 {
                continue;
            }
            value += w * a.powf(p);
            let gw = w * p * a.powf(p - 1.0) * v.signum();
            for k in 0..n {
                gradient[k] += gw * q[k];
                magnitude[k] += (gw * q[k]).abs();
            }
            if smooth_hessian {
                accumulate_outer(&mut hessian, &q[..n], w * p * (p - 1.0) * a.powf(p - 2.0));
            }
        }
        if second && p > 1.0 && p < 2.0 {
            let driver = |pt: Point| {
                let mut q = vec![0.0; n + 1];
                let a = values(pt.x, &mut q).abs();
                if a == 0.0 {
                    0.0
                } else {
                    a.powf(p - 2.0) * q[..n].iter().map(|t| t * t).sum::<f64>()
                }
            };
            let rule = quadrature::adapted_rule(self.mu, &driver, &zero_singularities(&zeros, p - 2.0), HESSIAN_ACCURACY)?;
            for (pt, w) in &rule {
                let a = values(pt.x, &mut q).abs();
                if a > 0.0 {
                    accumulate_outer(&mut hessian, &q[..n], w * p * (p - 1.0) * a.powf(p - 2.0));
                }
            }
        }
        if second && p == 1.0 {
            if let Some(ac) = self.mu.ac() {
                let mut der = vec![0.0; n + 1];
                for &z in &zeros {
                    if !ac.support().contains(z) {
                        continue;
                    }
                    basis.orthonormal_with_derivative(z, n, &mut q, &mut der);
                    let slope = der[n] + d.iter().zip(&der).map(|(a, b)| a * b).sum::<f64>();
                    let dens = ac.density(&Point::at(z));
                    if slope == 0.0 || !dens.is_finite() {
                        continue;
                    }
                    accumulate_outer(&mut hessian, &q[..n], 2.0 * dens / slope.abs());
                }
            }
        }
        for k in 0..n {
            for l in 0..k {
                hessian[(l, k)] = hessian[(k, l)];
            }
        }
        Ok(Evaluation { value, gradient, magnitude, hessian })
    }

    /// Splits the atom terms pinned at `P = 0` off the gradient and measures
    /// stationarity against the best subgradient they admit.
    fn reduce(&self, e: &Evaluation, d: &[f64], atoms: &[Atom], active: &[usize]) -> Reduced {
        let n = self.n;
        let mut q = vec![0.0; n + 1];
        let mut rows = Vec::with_capacity(atoms.len());
        let mut values = Vec::with_capacity(atoms.len());
        for a in atoms {
            self.basis.orthonormal(a.location, n, &mut q);
            values.push(q[n] + d.iter().zip(q.iter()).map(|(x, y)| x * y).sum::<f64>());
            rows.push(DVector::from_column_slice(&q[..n]));
        }
        let mut gradient = e.gradient.clone();
        let mut magnitude = e.magnitude.clone();
        let mut infeasibility: f64 = 0.0;
        for &a in active {
            let (w, v) = (atoms[a].mass, values[a]);
            if v == 0.0 {
                magnitude += rows[a].abs() * w;
            } else {
                gradient -= &rows[a] * (w * v.signum());
            }
            infeasibility = infeasibility.max(w * v.abs() / e.value);
        }
        let mut r = gradient.clone();
        if !active.is_empty() {
            let phi = DMatrix::from_columns(&active.iter().map(|&a| rows[a].clone()).collect::<Vec<_>>());
            if let Some(gram) = (phi.transpose() * &phi).cholesky() {
                let mut lambda = gram.solve(&(-(phi.transpose() * &gradient)));
                for (l, &a) in lambda.iter_mut().zip(active) {
                    *l = l.clamp(-atoms[a].mass, atoms[a].mass);
                }
                r += phi * lambda;
            }
        }
        let residual = r
            .iter()
            .zip(magnitude.iter())
            .map(|(g, m)| if *m > 0.0 { g.abs() / m } else { 0.0 })
            .fold(infeasibility, f64::max);
        Reduced { gradient, rows, values, residual }
    }
}

/// Gradient of the objective without the pinned atom terms, with the
/// orthonormal values `q_k(x_a)`, `k < n`, and `P(x_a) / ||P_n||` at every atom.
struct Reduced {
    gradient: DVector<f64>,
    rows: Vec<DVector<f64>>,
    values: Vec<f64>,
    residual: f64,
}

/// Damped Newton step `s` with `rows_a . s = targets_a`, and the multipliers
/// of the constraints.
fn constrained_step(
    h: &DMatrix<f64>,
    g: &DVector<f64>,
    rows: &[DVector<f64>],
    targets: &[f64],
    damping: f64,
    scale: f64,
) -> Option<(DVector<f64>, DVector<f64>)> {
    let n = g.len();
    let mut hd = h.clone();
    for k in 0..n {
        hd[(k, k)] += damping * scale;
    }
    if rows.is_empty() {
        return Some((hd.cholesky()?.solve(&(-g)), DVector::zeros(0)));
    }
    let phi = DMatrix::from_columns(rows);
    let gram = (phi.transpose() * &phi).cholesky()?;
    let proj = DMatrix::identity(n, n) - &phi * gram.solve(&phi.transpose());
    let base = &phi * gram.solve(&DVector::from_column_slice(targets));
    let reduced = &proj * &hd * &proj + (DMatrix::identity(n, n) - &proj) * scale;
    let y = reduced.cholesky()?.solve(&(-(&proj * (g + &hd * &base))));
    let step = base + &proj * y;
    let lambda = gram.solve(&(-(phi.transpose() * (g + &hd * &step))));
    Some((step, lambda))
}

/// Minimal monic `L^p(mu)` polynomial of degree `n`, `p >= 1`.
pub fn minimal_monic_lp(mu: &Measure, n: usize, p: f64) -> Result<ExtremalResult> {
    minimal_monic_lp_from(mu, n, p, None)
}

/// As [`minimal_monic_lp`], starting from `P = ||P_n|| (q_n + sum start_k q_k)`
/// in the orthonormal basis of `mu` (the orthogonal polynomial by default).
pub fn minimal_monic_lp_from(mu: &Measure, n: usize, p: f64, start: Option<&[f64]>) -> Result<ExtremalResult> {
    if !(p >= 1.0 && p.is_finite()) {
        return Err(Error::InvalidParameter(format!("L^p minimization needs 1 <= p < inf, got {p}")));
    }
    if n == 0 {
        return Err(Error::InvalidParameter("degree must be at least 1".into()));
    }
    let basis = recurrence(mu, n)?;
    let coarse = quadrature::discretize(mu, (p.ceil() as usize + 1) * n)?;
    let obj = Objective { mu, coarse, basis: &basis, n, p };
    let mut d: Vec<f64> = start.map_or_else(|| vec![0.0; n], |s| s.to_vec());
    if d.len() != n {
        return Err(Error::InvalidParameter(format!("start has {} coefficients, expected {n}", d.len())));
    }
    let mut iterations = 0;
    let mut residual = 0.0;
    if p != 2.0 || start.is_some() {
        // At p = 1 each atom adds the kink `w |P(x)|`; atoms where the
        // minimizer vanishes are held as equality constraints.
        let atoms: Vec<Atom> = if p == 1.0 { mu.atoms().to_vec() } else { vec![] };
        let mut active: Vec<usize> = vec![];
        let mut cur = obj.evaluate(&d, true)?;
        let mut red = obj.reduce(&cur, &d, &atoms, &active);
        let mut damping: f64 = 0.0;
        residual = red.residual;
        while residual > 1e-13 && iterations < MAX_NEWTON {
            iterations += 1;
            let mut diag_scale = (0..n).map(|k| cur.hessian[(k, k)]).fold(0.0, f64::max);
            if !(diag_scale > 0.0) {
                diag_scale = cur.magnitude.amax().max(f64::MIN_POSITIVE);
                damping = damping.max(1.0);
            }
            let max_step = 1.0 + d.iter().fold(0.0, |m: f64, x| m.max(x.abs()));
            let mut moved = false;
            let mut released: Vec<usize> = vec![];
            while damping < 1e12 {
                let rows: Vec<DVector<f64>> = active.iter().map(|&a| red.rows[a].clone()).collect();
                let targets: Vec<f64> = active.iter().map(|&a| -red.values[a]).collect();
                let Some((mut step, lambda)) = constrained_step(&cur.hessian, &red.gradient, &rows, &targets, damping, diag_scale) else {
                    damping = (damping * 10.0).max(1e-10);
                    continue;
                };
                let release = lambda
                    .iter()
                    .zip(&active)
                    .enumerate()
                    .map(|(i, (l, &a))| (i, l.abs() / atoms[a].mass))
                    .filter(|&(_, r)| r > 1.0 + 1e-9)
                    .max_by(|x, y| x.1.total_cmp(&y.1));
                if let Some((i, _)) = release {
                    released.push(active.remove(i));
                    red = obj.reduce(&cur, &d, &atoms, &active);
                    continue;
                }
                let blocking = (0..atoms.len())
                    .filter(|a| active.len() < n && !active.contains(a) && !released.contains(a))
                    .filter_map(|a| {
                        let v = red.values[a];
                        let moved_to = v + red.rows[a].dot(&step);
                        (v != 0.0 && v.signum() != moved_to.signum()).then(|| (a, v / (v - moved_to)))
                    })
                    .min_by(|x, y| x.1.total_cmp(&y.1));
                if let Some((a, _)) = blocking {
                    active.push(a);
                    red = obj.reduce(&cur, &d, &atoms, &active);
                    continue;
                }
                let size = step.amax();
                if size > max_step {
                    step *= max_step / size;
                }
                let pinned: f64 = active.iter().map(|&a| atoms[a].mass * red.values[a].abs()).sum();
                let slope = red.gradient.dot(&step) - pinned;
                let mut t = 1.0;
                for _ in 0..40 {
                    let trial: Vec<f64> = d.iter().zip(step.iter()).map(|(a, b)| a + t * b).collect();
                    let e = obj.evaluate(&trial, false)?;
                    let noise = 10.0 * RULE_ACCURACY * cur.value;
                    if e.value <= cur.value + 1e-4 * t * slope + noise {
                        d = trial;
                        moved = true;
                        break;
                    }
                    t *= 0.5;
                }
                if moved {
                    damping = if t == 1.0 { damping * 0.1 } else { damping };
                    if damping < 1e-12 {
                        damping = 0.0;
                    }
                    break;
                }
                damping = (damping * 10.0).max(1e-10);
            }
            if !moved {
                break;
            }
            let (prev_value, prev_residual) = (cur.value, residual);
            cur = obj.evaluate(&d, true)?;
            red = obj.reduce(&cur, &d, &atoms, &active);
            residual = red.residual;
            if prev_value - cur.value <= 4.0 * f64::EPSILON * cur.value && residual > 0.5 * prev_residual {
                break;
            }
        }
        // A zero on a singularity of the density makes the gradient only
        // Holder continuous; the Newton decrement still bounds the gap.
        let decrement = || {
            let rows: Vec<DVector<f64>> = active.iter().map(|&a| red.rows[a].clone()).collect();
            let targets: Vec<f64> = active.iter().map(|&a| -red.values[a]).collect();
            let scale = cur.magnitude.amax().max(f64::MIN_POSITIVE);
            constrained_step(&cur.hessian, &red.gradient, &rows, &targets, 0.0, scale)
                .map_or(f64::INFINITY, |(step, _)| -red.gradient.dot(&step))
        };
        if residual > STATIONARITY_TOLERANCE && !(decrement() <= STATIONARITY_TOLERANCE.powi(2) * cur.value) {
            let best_norm = basis.norms[n] * cur.value.powf(1.0 / p);
            return Err(Error::OptimizerStall { best_norm, iterations, residual });
        }
    }
    let polynomial = obj.poly(&d);
    let norm = lp_norm(&polynomial, mu, p)?;
    Ok(ExtremalResult {
        polynomial,
        norm,
        order: Order::Finite(p),
        diagnostics: Diagnostics { iterations, residual, certified: true, lower_bound: None },
    })
}

/// Chebyshev-Lobatto grid of `m + 1` points on each band.
fn band_grid(a: f64, b: f64, m: usize) -> Vec<f64> {
    let (c, r) = (0.5 * (a + b), 0.5 * (b - a));
    (0..=m)
        .map(|i| match i {
            0 => a,
            i if i == m => b,
            i => c - r * (std::f64::consts::PI * i as f64 / m as f64).cos(),
        })
        .collect()
}

/// Maximizes `|P|` on `[a, b]` by golden-section search.
fn refine_max(poly: &MonicPolynomial, mut a: f64, mut b: f64) -> f64 {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let f = |x: f64| poly.eval(x).abs();
    let mut x1 = b - g * (b - a);
    let mut x2 = a + g * (b - a);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..90 {
        if f1 >= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = f(x2);
        }
    }
    if f1 >= f2 {
        x1
    } else {
        x2
    }
}

/// Local extrema of `|P|` on the bands (band ends included), with values,
/// sorted by abscissa.
fn local_extrema(poly: &MonicPolynomial, bands: &[(f64, f64)], m: usize) -> Vec<(f64, f64)> {
    let mut out = vec![];
    for &(a, b) in bands {
        let xs = band_grid(a, b, m);
        let vs: Vec<f64> = xs.iter().map(|&x| poly.eval(x)).collect();
        out.push((a, vs[0]));
        for i in 1..m {
            let (l, c, r) = (vs[i - 1].abs(), vs[i].abs(), vs[i + 1].abs());
            if c >= l && c >= r && c > 0.0 {
                let x = refine_max(poly, xs[i - 1], xs[i + 1]);
                out.push((x, poly.eval(x)));
            }
        }
        out.push((b, vs[m]));
    }
    out
}

/// `n + 1` sign-alternating extrema containing the global maximum of `|P|`.
fn alternating_reference(extrema: &[(f64, f64)], size: usize) -> Option<Vec<f64>> {
    let mut merged: Vec<(f64, f64)> = vec![];
    for &(x, v) in extrema {
        if v == 0.0 {
            continue;
        }
        match merged.last_mut() {
            Some(last) if last.1.signum() == v.signum() => {
                if v.abs() > last.1.abs() {
                    *last = (x, v);
                }
            }
            _ => merged.push((x, v)),
        }
    }
    if merged.len() < size {
        return None;
    }
    while merged.len() > size {
        let imax = merged
            .iter()
            .enumerate()
            .max_by(|a, b| a.1 .1.abs().total_cmp(&b.1 .1.abs()))
            .map(|(i, _)| i)
            .expect("nonempty");
        let last = merged.len() - 1;
        if imax == 0 || (imax != last && merged[last].1.abs() < merged[0].1.abs()) {
            merged.pop();
        } else {
            merged.remove(0);
        }
    }
    Some(merged.into_iter().map(|e| e.0).collect())
}

/// Solves for the polynomial levelled on `reference`: `P(r_j) = (-1)^j h`.
fn levelled(basis: &RecurrenceCoefficients, n: usize, reference: &[f64]) -> Result<(MonicPolynomial, f64)> {
    let nu = basis.norms[n];
    let mut a = DMatrix::zeros(n + 1, n + 1);
    let mut rhs = DVector::zeros(n + 1);
    let mut q = vec![0.0; n + 1];
    for (j, &x) in reference.iter().enumerate() {
        basis.orthonormal(x, n, &mut q);
        for k in 0..n {
            a[(j, k)] = q[k];
        }
        a[(j, n)] = if j % 2 == 0 { -1.0 } else { 1.0 };
        rhs[j] = -nu * q[n];
    }
    let sol = a.lu().solve(&rhs).ok_or_else(|| Error::ExchangeFailure("singular reference system".into()))?;
    let lower: Vec<f64> = sol.iter().take(n).copied().collect();
    Ok((MonicPolynomial::in_basis(basis, &lower), sol[n]))
}

/// Monic polynomial of degree `n` with minimal sup norm on the set of `eq`.
///
/// Extrema are located on `40 n` Chebyshev points per band and refined to
/// local maxima; the reference is exchanged until the sup norm matches the
/// levelled error. `diagnostics.lower_bound` holds the levelled error, a
/// certified lower bound on the minimal sup norm.
pub fn minimal_monic_sup(eq: &EquilibriumData, n: usize) -> Result<ExtremalResult> {
    if n == 0 {
        return Err(Error::InvalidParameter("degree must be at least 1".into()));
    }
    let basis = recurrence(eq.measure(), n)?;
    let bands = eq.set().bands();
    let m = 40 * n;
    let mut poly = MonicPolynomial::orthogonal(&basis, n);
    let mut reference: Vec<f64> = vec![];
    let mut h: f64 = 0.0;
    let mut sup = f64::INFINITY;
    let mut iterations = 0;
    for it in 0..100 {
        iterations = it;
        let extrema = local_extrema(&poly, bands, m);
        sup = extrema.iter().map(|e| e.1.abs()).fold(0.0, f64::max);
        if it > 0 && sup - h.abs() <= 1e-15 * sup {
            break;
        }
        let next = alternating_reference(&extrema, n + 1)
            .ok_or_else(|| Error::ExchangeFailure(format!("fewer than {} alternating extrema", n + 1)))?;
        if next == reference {
            break;
        }
        reference = next;
        let (p, level) = levelled(&basis, n, &reference)?;
        if it > 0 && level.abs() < h.abs() * (1.0 - 1e-12) {
            return Err(Error::ExchangeFailure("levelled error decreased".into()));
        }
        poly = p;
        h = level;
    }
    let extrema = local_extrema(&poly, bands, m);
    sup = sup.min(extrema.iter().map(|e| e.1.abs()).fold(0.0, f64::max));
    let lower = h.abs();
    Ok(ExtremalResult {
        polynomial: poly,
        norm: sup,
        order: Order::Sup,
        diagnostics: Diagnostics {
            iterations,
            residual: (sup - lower) / sup,
            certified: true,
            lower_bound: Some(lower),
        },
    })
}

/// Weighted least squares step of a majorize-minimize search for `p < 1`.
fn irls(mu: &Measure, basis: &RecurrenceCoefficients, n: usize, p: f64, start: &[f64], steps: usize) -> Result<Vec<f64>> {
    let mut d = start.to_vec();
    let mut q = vec![0.0; n + 1];
    for _ in 0..steps {
        let dd = d.clone();
        let value = |x: f64, q: &mut [f64]| -> f64 {
            basis.orthonormal(x, n, q);
            q[n] + dd.iter().zip(q.iter()).map(|(a, b)| a * b).sum::<f64>()
        };
        let scale = {
            let rule = quadrature::discretize(mu, 2 * n)?;
            rule.integrate(|x| value(x, &mut vec![0.0; n + 1]).powi(2)).sqrt()
        };
        let eps = 1e-6 * scale;
        let weight = |v: f64| (v * v + eps * eps).powf(0.5 * (p - 2.0));
        let driver = |pt: Point| {
            let mut qq = vec![0.0; n + 1];
            let v = value(pt.x, &mut qq);
            weight(v) * (1.0 + qq.iter().map(|t| t * t).sum::<f64>())
        };
        let rule = quadrature::adapted_rule(mu, &driver, &[], 1e-10)?;
        let mut g = DMatrix::zeros(n, n);
        let mut rhs = DVector::zeros(n);
        for (pt, w) in &rule {
            let v = value(pt.x, &mut q);
            let om = w * weight(v);
            for k in 0..n {
                rhs[k] -= om * q[n] * q[k];
                for l in 0..n {
                    g[(k, l)] += om * q[k] * q[l];
                }
            }
        }
        match g.cholesky() {
            Some(c) => d = c.solve(&rhs).iter().copied().collect(),
            None => break,
        }
    }
    Ok(d)
}

/// A Widom factor value and whether it is a certified minimum.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WidomValue {
    pub value: f64,
    pub norm: f64,
    pub certified: bool,
    /// Which computation produced the value.
    pub source: String,
}

/// `W_n^p(mu)` relative to the set of `eq`: the minimal monic norm divided by
/// `cap^n`, formed in log space. For `p < 1` the smallest norm among the
/// candidates `(x - center)^n`, the `L^2` and `L^1` minimizers and a
/// majorize-minimize refinement is returned, flagged as uncertified.
pub fn widom_wp(mu: &Measure, eq: &EquilibriumData, n: usize, order: Order) -> Result<WidomValue> {
    let scale = |norm: f64| (norm.ln() - n as f64 * eq.log_capacity()).exp();
    if n == 0 {
        return Ok(WidomValue { value: 1.0, norm: 1.0, certified: true, source: "empty product".into() });
    }
    match order {
        Order::Sup => {
            let r = minimal_monic_sup(eq, n)?;
            Ok(WidomValue { value: scale(r.norm), norm: r.norm, certified: true, source: "remez".into() })
        }
        Order::Finite(p) if p >= 1.0 => {
            let r = minimal_monic_lp(mu, n, p)?;
            Ok(WidomValue { value: scale(r.norm), norm: r.norm, certified: true, source: "newton".into() })
        }
        Order::Finite(p) => {
            let (lo, hi) = mu.hull();
            let basis = recurrence(mu, n)?;
            let mut candidates: Vec<(String, MonicPolynomial)> = vec![
                ("monomial".into(), MonicPolynomial::power(n, 0.5 * (lo + hi))),
                ("l2".into(), MonicPolynomial::orthogonal(&basis, n)),
            ];
            let l1_start = match minimal_monic_lp(mu, n, 1.0) {
                Ok(r) => {
                    candidates.push(("l1".into(), r.polynomial.clone()));
                    let obj_basis = &basis;
                    let nu = obj_basis.norms[n];
                    let mono = r.polynomial.to_monomial();
                    coefficients_in_basis(obj_basis, &mono).into_iter().map(|c| c / nu).collect()
                }
                Err(_) => vec![0.0; n],
            };
            let d = irls(mu, &basis, n, p, &l1_start, 30)?;
            let nu = basis.norms[n];
            candidates.push((
                "majorize-minimize".into(),
                MonicPolynomial::in_basis(&basis, &d.iter().map(|x| x * nu).collect::<Vec<_>>()),
            ));
            let mut best: Option<(String, f64)> = None;
            for (name, poly) in &candidates {
                let norm = lp_norm(poly, mu, p)?;
                if best.as_ref().is_none_or(|b| norm < b.1) {
                    best = Some((name.clone(), norm));
                }
            }
            let (source, norm) = best.expect("candidates are nonempty");
            Ok(WidomValue { value: scale(norm), norm, certified: false, source })
        }
    }
}

/// Lower coefficients `c_0..c_{n-1}` of a monic polynomial (ascending
/// monomial coefficients `mono`) in the orthonormal basis of `basis`.
fn coefficients_in_basis(basis: &RecurrenceCoefficients, mono: &[f64]) -> Vec<f64> {
    let n = mono.len() - 1;
    let mut unit = vec![0.0; n + 1];
    let mut columns: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    for k in 0..=n {
        unit.iter_mut().for_each(|u| *u = 0.0);
        unit[k] = 1.0;
        let mut col = basis.to_monomial(&unit[..=k]);
        col.resize(n + 1, 0.0);
        columns.push(col);
    }
    let mut rest = mono.to_vec();
    let mut out = vec![0.0; n + 1];
    for k in (0..=n).rev() {
        let c = rest[k] / columns[k][k];
        out[k] = c;
        for (r, v) in rest.iter_mut().zip(&columns[k]) {
            *r -= c * v;
        }
    }
    out.truncate(n);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::{jacobi_measure, FiniteGapSet};
    use crate::orthopoly::monic_norm2;
    use crate::potential::equilibrium;

    fn arcsine(a: f64, b: f64) -> Measure {
        Measure::equilibrium(FiniteGapSet::interval(a, b).unwrap(), vec![]).unwrap()
    }

    #[test]
    fn norm_of_x_under_arcsine() {
        let p = MonicPolynomial::from_monomial(&[0.0]);
        assert!((lp_norm(&p, &arcsine(-1.0, 1.0), 2.0).unwrap() - 0.5f64.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn point_mass_norm() {
        let p = MonicPolynomial::from_monomial(&[1.0, -3.0]);
        let v = lp_norm(&p, &Measure::point_mass(2.0), 1.5).unwrap();
        assert!((v - 1.0).abs() < 1e-14);
    }

    #[test]
    fn zeros_of_orthogonal_polynomial() {
        let mu = arcsine(-1.0, 1.0);
        let rc = recurrence(&mu, 5).unwrap();
        let z = MonicPolynomial::orthogonal(&rc, 5).real_zeros(-1.0, 1.0);
        assert_eq!(z.len(), 5);
        for (k, zk) in z.iter().enumerate() {
            let expect = -((2 * k + 1) as f64 * std::f64::consts::PI / 10.0).cos();
            assert!((zk - expect).abs() < 1e-13);
        }
    }

    #[test]
    fn l2_agrees_with_recurrence() {
        let mu = jacobi_measure(0.3, -0.4).unwrap();
        let r = minimal_monic_lp_from(&mu, 6, 2.0, Some(&[0.1; 6])).unwrap();
        let exact = monic_norm2(&mu, 6).unwrap();
        assert!((r.norm / exact - 1.0).abs() < 1e-8);
    }

    #[test]
    fn l1_chebyshev_on_interval() {
        let mu = arcsine(-1.0, 1.0);
        for n in 1..=6 {
            let r = minimal_monic_lp(&mu, n, 1.0).unwrap();
            let expect = 4.0 / std::f64::consts::PI * 0.5f64.powi(n as i32);
            assert!((r.norm / expect - 1.0).abs() < 1e-9, "n={n} {}", r.norm);
        }
    }

    #[test]
    fn sup_on_interval() {
        let eq = equilibrium(&FiniteGapSet::interval(-2.0, 2.0).unwrap()).unwrap();
        for n in 1..=8 {
            let r = minimal_monic_sup(&eq, n).unwrap();
            assert!((r.norm - 2.0).abs() < 1e-10, "n={n} {}", r.norm);
        }
    }

    #[test]
    fn symmetric_degree_one() {
        let mu = jacobi_measure(0.7, 0.7).unwrap();
        let r = minimal_monic_lp(&mu, 1, 3.0).unwrap();
        let c = r.polynomial.to_monomial();
        assert!(c[0].abs() < 1e-10);
    }

    #[test]
    fn order_parsing() {
        assert_eq!("inf".parse::<Order>().unwrap(), Order::Sup);
        assert_eq!("1.5".parse::<Order>().unwrap(), Order::Finite(1.5));
        assert!("-1".parse::<Order>().is_err());
    }
}
