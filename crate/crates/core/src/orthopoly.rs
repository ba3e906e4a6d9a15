//! Three-term recurrence coefficients and monic orthogonal-polynomial norms.
//!
//! Monic polynomials satisfy `P_{k+1} = (x - b_{k+1}) P_k - a_k^2 P_{k-1}`, so
//! `||P_k||_2 = sqrt(m_0) a_1 ... a_k` for a measure of total mass `m_0`.

use serde::Serialize;
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::measures::{JacobiParams, Measure};
use crate::potential::EquilibriumData;
use crate::quadrature::{discretize, DiscreteMeasure};

/// Jacobi parameters `a_1..a_n`, `b_1..b_n` and monic norms `||P_0||..||P_n||`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RecurrenceCoefficients {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub norms: Vec<f64>,
}

impl RecurrenceCoefficients {
    fn from_parts(mass: f64, a: Vec<f64>, b: Vec<f64>) -> Self {
        let mut norms = vec![mass.sqrt()];
        for &ak in &a {
            norms.push(norms[norms.len() - 1] * ak);
        }
        Self { a, b, norms }
    }

    pub fn degree(&self) -> usize {
        self.a.len()
    }

    /// `log ||P_k||_2`, summed in log space.
    pub fn log_norm(&self, k: usize) -> f64 {
        self.norms[0].ln() + self.a[..k].iter().map(|a| a.ln()).sum::<f64>()
    }

    /// Orthonormal polynomials `q_0..q_k` at `x` written into `out[..=k]`.
    pub fn orthonormal(&self, x: f64, k: usize, out: &mut [f64]) {
        out[0] = 1.0 / self.norms[0];
        if k == 0 {
            return;
        }
        out[1] = (x - self.b[0]) * out[0] / self.a[0];
        for j in 1..k {
            out[j + 1] = ((x - self.b[j]) * out[j] - self.a[j - 1] * out[j - 1]) / self.a[j];
        }
    }

    /// Orthonormal values and first derivatives at `x`.
    pub fn orthonormal_with_derivative(&self, x: f64, k: usize, val: &mut [f64], der: &mut [f64]) {
        val[0] = 1.0 / self.norms[0];
        der[0] = 0.0;
        if k == 0 {
            return;
        }
        val[1] = (x - self.b[0]) * val[0] / self.a[0];
        der[1] = val[0] / self.a[0];
        for j in 1..k {
            val[j + 1] = ((x - self.b[j]) * val[j] - self.a[j - 1] * val[j - 1]) / self.a[j];
            der[j + 1] = ((x - self.b[j]) * der[j] + val[j] - self.a[j - 1] * der[j - 1]) / self.a[j];
        }
    }

    /// Monomial coefficients (constant term first) of `sum_k coef[k] q_k`.
    pub fn to_monomial(&self, coef: &[f64]) -> Vec<f64> {
        let k = coef.len() - 1;
        let mut out = vec![0.0; k + 1];
        let mut prev: Vec<f64> = vec![];
        let mut cur = vec![1.0 / self.norms[0]];
        for (j, &c) in coef.iter().enumerate() {
            for (o, q) in out.iter_mut().zip(&cur) {
                *o += c * q;
            }
            if j == k {
                break;
            }
            let mut next = vec![0.0; cur.len() + 1];
            for (i, &q) in cur.iter().enumerate() {
                next[i + 1] += q;
                next[i] -= self.b[j] * q;
            }
            if j > 0 {
                for (i, &q) in prev.iter().enumerate() {
                    next[i] -= self.a[j - 1] * q;
                }
            }
            next.iter_mut().for_each(|v| *v /= self.a[j]);
            prev = std::mem::replace(&mut cur, next);
        }
        out
    }
}

/// Lanczos with full reorthogonalization on a discrete measure.
pub fn lanczos(dm: &DiscreteMeasure, n: usize) -> Result<RecurrenceCoefficients> {
    if dm.len() < n + 1 {
        return Err(Error::SupportTooSmall { needed: n + 1, available: dm.len() });
    }
    let mass = dm.mass();
    let scale = dm.nodes.iter().fold(0.0_f64, |m, x| m.max(x.abs())).max(f64::MIN_POSITIVE);
    let mut basis: Vec<Vec<f64>> = vec![dm.weights.iter().map(|w| (w / mass).sqrt()).collect()];
    let (mut a, mut b): (Vec<f64>, Vec<f64>) = (Vec::with_capacity(n), Vec::with_capacity(n));
    for k in 0..n {
        let v = &basis[k];
        let mut r: Vec<f64> = dm.nodes.iter().zip(v).map(|(x, vi)| x * vi).collect();
        let bk = dot(v, &r);
        axpy(-bk, v, &mut r);
        if k > 0 {
            axpy(-a[k - 1], &basis[k - 1], &mut r);
        }
        for _ in 0..2 {
            for q in &basis {
                let c = dot(q, &r);
                axpy(-c, q, &mut r);
            }
        }
        let ak = dot(&r, &r).sqrt();
        if !(ak > 1e-13 * scale) {
            return Err(Error::OrthogonalityLoss { last_trusted: k });
        }
        r.iter_mut().for_each(|x| *x /= ak);
        a.push(ak);
        b.push(bk);
        basis.push(r);
    }
    Ok(RecurrenceCoefficients::from_parts(mass, a, b))
}

/// Classical Stieltjes procedure on a discrete measure, propagating monic
/// polynomial values node by node.
pub fn stieltjes(dm: &DiscreteMeasure, n: usize) -> Result<RecurrenceCoefficients> {
    if dm.len() < n + 1 {
        return Err(Error::SupportTooSmall { needed: n + 1, available: dm.len() });
    }
    let mass = dm.mass();
    let mut prev = vec![0.0; dm.len()];
    let mut cur = vec![1.0; dm.len()];
    let mut norm2_prev = 0.0;
    let mut norm2 = mass;
    let (mut a, mut b): (Vec<f64>, Vec<f64>) = (Vec::with_capacity(n), Vec::with_capacity(n));
    for k in 0..n {
        let xs: f64 = dm.nodes.iter().zip(&dm.weights).zip(&cur).map(|((x, w), p)| x * w * p * p).sum();
        let bk = xs / norm2;
        let a2 = if k == 0 { 0.0 } else { norm2 / norm2_prev };
        let next: Vec<f64> = dm
            .nodes
            .iter()
            .zip(cur.iter().zip(&prev))
            .map(|(x, (p, q))| (x - bk) * p - a2 * q)
            .collect();
        let next_norm2: f64 = dm.weights.iter().zip(&next).map(|(w, p)| w * p * p).sum();
        if !(next_norm2 > 0.0) {
            return Err(Error::OrthogonalityLoss { last_trusted: k });
        }
        b.push(bk);
        a.push((next_norm2 / norm2).sqrt());
        norm2_prev = norm2;
        norm2 = next_norm2;
        prev = std::mem::replace(&mut cur, next);
    }
    Ok(RecurrenceCoefficients::from_parts(mass, a, b))
}

fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

fn axpy(c: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += c * xi;
    }
}

/// Recurrence coefficients of `mu` up to degree `n`.
pub fn recurrence(mu: &Measure, n: usize) -> Result<RecurrenceCoefficients> {
    if n == 0 {
        return Err(Error::InvalidParameter("recurrence needs n >= 1".into()));
    }
    lanczos(&discretize(mu, 2 * n)?, n)
}

/// `||P_n||_2` of the monic orthogonal polynomial of `mu`.
pub fn monic_norm2(mu: &Measure, n: usize) -> Result<f64> {
    if n == 0 {
        return Ok(mu.total_mass()?.sqrt());
    }
    Ok(recurrence(mu, n)?.norms[n])
}

/// Closed-form `||P_n||_2^2` for the normalized Jacobi weight
/// `c (1 - x)^alpha (1 + x)^beta` on `[-1, 1]`, evaluated through log-Gamma.
pub fn jacobi_norm_closed_form(alpha: f64, beta: f64, n: u32) -> f64 {
    jacobi_log_norm2(alpha, beta, n).exp()
}

pub fn jacobi_log_norm2(alpha: f64, beta: f64, n: u32) -> f64 {
    let n = f64::from(n);
    let s = alpha + beta;
    JacobiParams::closed_form_constant(alpha, beta).ln() + (s + 2.0 * n + 1.0) * std::f64::consts::LN_2
        + ln_gamma(n + 1.0)
        - (s + 2.0 * n + 1.0).ln()
        + ln_gamma(alpha + n + 1.0)
        + ln_gamma(beta + n + 1.0)
        + ln_gamma(s + n + 1.0)
        - 2.0 * ln_gamma(s + 2.0 * n + 1.0)
}

/// Widom factors `W_k^2 = ||P_k||_2 / cap^k` for `k = 0..=n`.
pub fn widom_w2_sequence(mu: &Measure, eq: &EquilibriumData, n: usize) -> Result<Vec<f64>> {
    let rc = recurrence(mu, n.max(1))?;
    Ok((0..=n).map(|k| (rc.log_norm(k) - k as f64 * eq.log_capacity()).exp()).collect())
}

/// Widom factor `W_n^2(mu)` relative to the set of `eq`.
pub fn widom_w2(mu: &Measure, eq: &EquilibriumData, n: usize) -> Result<f64> {
    Ok(widom_w2_sequence(mu, eq, n)?[n])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::{jacobi_measure, FiniteGapSet};
    use crate::potential::equilibrium;

    fn arcsine(a: f64, b: f64) -> Measure {
        Measure::equilibrium(FiniteGapSet::interval(a, b).unwrap(), vec![]).unwrap()
    }

    #[test]
    fn chebyshev_recurrence() {
        let rc = recurrence(&arcsine(-2.0, 2.0), 12).unwrap();
        assert!((rc.a[0] - 2f64.sqrt()).abs() < 1e-13);
        for k in 1..12 {
            assert!((rc.a[k] - 1.0).abs() < 1e-13);
        }
        assert!(rc.b.iter().all(|b| b.abs() < 1e-14));
        assert!((rc.norms[7].powi(2) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn legendre_recurrence() {
        let rc = recurrence(&jacobi_measure(0.0, 0.0).unwrap(), 20).unwrap();
        for (k, a) in rc.a.iter().enumerate() {
            let k = (k + 1) as f64;
            assert!((a * a - k * k / (4.0 * k * k - 1.0)).abs() < 1e-13);
        }
    }

    #[test]
    fn lanczos_matches_stieltjes() {
        let dm = discretize(&jacobi_measure(0.5, -0.3).unwrap(), 40).unwrap();
        let l = lanczos(&dm, 20).unwrap();
        let s = stieltjes(&dm, 20).unwrap();
        for k in 0..=20 {
            assert!((l.norms[k] / s.norms[k] - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn jacobi_closed_form_small_cases() {
        assert!((jacobi_norm_closed_form(0.0, 0.0, 1) - 1.0 / 3.0).abs() < 1e-14);
        assert!((jacobi_norm_closed_form(-0.5, -0.5, 1) - 0.5).abs() < 1e-14);
    }

    #[test]
    fn support_too_small() {
        let mu = Measure::point_mass(0.3);
        assert!(matches!(recurrence(&mu, 1), Err(Error::SupportTooSmall { .. })));
    }

    #[test]
    fn orthonormal_evaluation_and_export() {
        let rc = recurrence(&jacobi_measure(1.0, 0.0).unwrap(), 6).unwrap();
        let mut q = vec![0.0; 7];
        let mut d = vec![0.0; 7];
        rc.orthonormal_with_derivative(0.3, 6, &mut q, &mut d);
        let mono = rc.to_monomial(&[0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0]);
        let direct: f64 = mono.iter().rev().fold(0.0, |acc, c| acc * 0.3 + c);
        assert!((direct - q[6]).abs() < 1e-10);
        let h = 1e-6;
        let mut qp = vec![0.0; 7];
        let mut qm = vec![0.0; 7];
        rc.orthonormal(0.3 + h, 6, &mut qp);
        rc.orthonormal(0.3 - h, 6, &mut qm);
        assert!(((qp[6] - qm[6]) / (2.0 * h) - d[6]).abs() < 1e-6);
        assert!((mono[6] * rc.norms[6] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn widom_on_interval() {
        let k = FiniteGapSet::interval(-2.0, 2.0).unwrap();
        let eq = equilibrium(&k).unwrap();
        let w = widom_w2_sequence(eq.measure(), &eq, 10).unwrap();
        assert!((w[0] - 1.0).abs() < 1e-13);
        for v in &w[1..] {
            assert!((v - 2f64.sqrt()).abs() < 1e-11, "{v}");
        }
    }
}
