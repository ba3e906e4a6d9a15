//! Spectral measures of half-line truncations of reflectionless Jacobi
//! matrices with spectrum `K` (the isospectral torus), reflectionless
//! measures, and the torus lower bound `[W_n^2]^2 >= 2 E^2 S`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::extremal::{lp_norm, MonicPolynomial, Order};
use crate::measures::{Atom, DensityKind, FiniteGapSet, Measure, Singularity};
use crate::orthopoly::recurrence;
use crate::potential::{equilibrium, EquilibriumData};
use crate::szego::{verify_bounds, BoundKind, WidomReport};

/// Tolerance on the unit mass of a constructed torus or reflectionless measure.
pub const MASS_TOLERANCE: f64 = 1e-8;

const EDGE_SNAP: f64 = 1e-13;

/// A point of the isospectral torus: one `gamma_j` per closed gap and a
/// sheet flag `s_j`; `a0_squared` is the derived normalization.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TorusPoint {
    pub set: FiniteGapSet,
    pub critical_points: Vec<f64>,
    pub gammas: Vec<f64>,
    pub flags: Vec<bool>,
    pub a0_squared: f64,
}

/// Places `gammas` in the closed gaps of `set`, snapping near-edge values
/// onto the edge.
fn check_gammas(set: &FiniteGapSet, gammas: &[f64]) -> Result<Vec<f64>> {
    let gaps = set.gaps();
    if gammas.len() != gaps.len() {
        return Err(Error::InvalidParameter(format!("{} gap points for {} gaps", gammas.len(), gaps.len())));
    }
    let scale = set.endpoints().iter().fold(1.0f64, |m, e| m.max(e.abs()));
    gammas
        .iter()
        .zip(&gaps)
        .map(|(&g, &(lo, hi))| {
            let snap = EDGE_SNAP * scale;
            if (g - lo).abs() <= snap {
                Ok(lo)
            } else if (g - hi).abs() <= snap {
                Ok(hi)
            } else if g > lo && g < hi {
                Ok(g)
            } else {
                Err(Error::InvalidParameter(format!("gap point {g} outside its gap [{lo}, {hi}]")))
            }
        })
        .collect()
}

/// `log( sqrt(prod |g - a_j||g - b_j|) / prod_{j != k} |g - gamma_j| )`.
fn log_atom_weight(set: &FiniteGapSet, gammas: &[f64], k: usize) -> f64 {
    let g = gammas[k];
    let edges: f64 = set.endpoints().iter().map(|e| (g - e).abs().ln()).sum();
    let others: f64 = gammas.iter().enumerate().filter(|&(j, _)| j != k).map(|(_, x)| (g - x).abs().ln()).sum();
    0.5 * edges - others
}

/// Factors of `prod |x - a_j||x - b_j| / prod |x - c_j||x - gamma_j|` relative to `rho_K`.
fn torus_factors(set: &FiniteGapSet, crit: &[f64], gammas: &[f64]) -> Vec<Singularity> {
    let mut f: Vec<Singularity> = set.endpoints().into_iter().map(|e| Singularity::new(e, 1.0)).collect();
    f.extend(crit.iter().map(|&c| Singularity::new(c, -1.0)));
    f.extend(gammas.iter().map(|&g| Singularity::new(g, -1.0)));
    f
}

impl TorusPoint {
    /// Validates `gammas` and `flags` against the gaps of the set of `eq` and
    /// fixes `a0^2` by the unit-mass condition.
    pub fn new(eq: &EquilibriumData, gammas: &[f64], flags: &[bool]) -> Result<Self> {
        let set = eq.set().clone();
        let gammas = check_gammas(&set, gammas)?;
        if flags.len() != gammas.len() {
            return Err(Error::InvalidParameter(format!("{} flags for {} gap points", flags.len(), gammas.len())));
        }
        let edges = set.endpoints();
        for (g, &s) in gammas.iter().zip(flags) {
            if s && edges.contains(g) {
                return Err(Error::InvalidParameter(format!("flag set at gap edge {g}")));
            }
        }
        let crit = eq.critical_points().to_vec();
        let ac_only = Measure::equilibrium_relative(
            set.clone(),
            crit.clone(),
            torus_factors(&set, &crit, &gammas),
            vec![],
            DensityKind::EquilibriumRelative,
        )?;
        let ac_integral = 1.0 / ac_only.ac().expect("a.c. part").scale();
        let atoms: f64 = (0..gammas.len())
            .filter(|&k| flags[k])
            .map(|k| log_atom_weight(&set, &gammas, k).exp())
            .sum();
        let a0_squared = 0.5 * ac_integral + atoms;
        Ok(Self { set, critical_points: crit, gammas, flags: flags.to_vec(), a0_squared })
    }

    /// Atoms `(gamma_k, mass)` for the flagged gap points.
    pub fn atoms(&self) -> Vec<Atom> {
        (0..self.gammas.len())
            .filter(|&k| self.flags[k])
            .map(|k| Atom {
                location: self.gammas[k],
                mass: log_atom_weight(&self.set, &self.gammas, k).exp() / self.a0_squared,
            })
            .collect()
    }

    /// `exp sum_{s_k = 1} G_K(gamma_k)`, the eigenvalue function of the torus measure.
    pub fn expected_eigenvalue(&self, eq: &EquilibriumData) -> Result<f64> {
        let mut total = 0.0;
        for (g, &s) in self.gammas.iter().zip(&self.flags) {
            if s {
                total += eq.green(*g)?;
            }
        }
        Ok(total.exp())
    }
}

/// The torus measure: `(1 / 2a0^2) prod|x - a||x - b| / prod|x - c||x - gamma| dmu_K`
/// plus atoms of mass `(s_k / a0^2) sqrt(prod|g_k - a||g_k - b|) / prod_{j != k}|g_k - g_j|`.
pub fn torus_measure(tp: &TorusPoint) -> Result<Measure> {
    let m = Measure::equilibrium_relative(
        tp.set.clone(),
        tp.critical_points.clone(),
        torus_factors(&tp.set, &tp.critical_points, &tp.gammas),
        tp.atoms(),
        DensityKind::Isospectral { gammas: tp.gammas.clone(), flags: tp.flags.iter().map(|&s| u8::from(s)).collect() },
    )?;
    let expected = 0.5 / tp.a0_squared;
    let scale = m.ac().expect("a.c. part").scale();
    if (scale / expected - 1.0).abs() > MASS_TOLERANCE {
        return Err(Error::InvalidMeasure(format!("torus normalization {scale} differs from 1/(2 a0^2) = {expected}")));
    }
    Ok(m)
}

/// `(1/pi) prod|x - gamma_j| / sqrt(prod|x - a_j||x - b_j|)` on `K`; its mass is
/// 1 without normalization, which is checked.
pub fn reflectionless_measure(eq: &EquilibriumData, gammas: &[f64]) -> Result<Measure> {
    let set = eq.set().clone();
    let gammas = check_gammas(&set, gammas)?;
    let mut factors: Vec<Singularity> = gammas.iter().map(|&g| Singularity::new(g, 1.0)).collect();
    factors.extend(eq.critical_points().iter().map(|&c| Singularity::new(c, -1.0)));
    let m = Measure::equilibrium_relative(
        set,
        eq.critical_points().to_vec(),
        factors,
        vec![],
        DensityKind::Reflectionless { gammas: gammas.clone() },
    )?;
    let scale = m.ac().expect("a.c. part").scale();
    if (scale - 1.0).abs() > MASS_TOLERANCE {
        return Err(Error::InvalidMeasure(format!("reflectionless measure has mass {}", 1.0 / scale)));
    }
    Ok(m)
}

/// Torus lower bound report for `n = 1..=n_max`, with the sum-rule column
/// comparing `a_1...a_n / cap^n` against the `L^2` norm of `P_n` by quadrature.
pub fn verify_isolb(tp: &TorusPoint, eq: &EquilibriumData, n_max: usize) -> Result<WidomReport> {
    let mu = torus_measure(tp)?;
    let mut report = verify_bounds(&mu, eq, Order::Finite(2.0), n_max, BoundKind::Isotorus)?;
    let rc = recurrence(&mu, n_max)?;
    for row in &mut report.rows {
        let direct = lp_norm(&MonicPolynomial::orthogonal(&rc, row.n), &mu, 2.0)?;
        let w_direct = (direct.ln() - row.n as f64 * eq.log_capacity()).exp();
        row.sum_rule_gap = Some((row.widom - w_direct).abs() / w_direct);
    }
    Ok(report)
}

/// Random finite-gap set in `[-1, 1]` with `genus` gaps; bands and gaps are
/// at least `0.05` long.
pub fn random_finite_gap_set<R: Rng>(rng: &mut R, genus: usize) -> FiniteGapSet {
    loop {
        let mut cuts: Vec<f64> = (0..2 * genus).map(|_| rng.gen_range(-1.0..1.0)).collect();
        cuts.sort_by(f64::total_cmp);
        let mut pts = vec![-1.0];
        pts.extend(cuts);
        pts.push(1.0);
        if pts.windows(2).any(|w| w[1] - w[0] < 0.05) {
            continue;
        }
        let bands: Vec<(f64, f64)> = pts.chunks(2).map(|c| (c[0], c[1])).collect();
        if let Ok(set) = FiniteGapSet::new(&bands) {
            return set;
        }
    }
}

/// A random torus point: `gamma_j` uniform in each gap (an edge with
/// probability 1/8), flags fair coins away from edges.
pub fn random_torus_point<R: Rng>(rng: &mut R, eq: &EquilibriumData) -> Result<TorusPoint> {
    let mut gammas = vec![];
    let mut flags = vec![];
    for (lo, hi) in eq.set().gaps() {
        let g = match rng.gen_range(0..16) {
            0 => lo,
            1 => hi,
            _ => rng.gen_range(lo..hi),
        };
        flags.push(g != lo && g != hi && rng.gen_bool(0.5));
        gammas.push(g);
    }
    TorusPoint::new(eq, &gammas, &flags)
}

/// `sets` random sets of genus 1 or 2, each with `per_set` torus points, from `seed`.
pub fn torus_corpus(seed: u64, sets: usize, per_set: usize) -> Result<Vec<(EquilibriumData, Vec<TorusPoint>)>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = vec![];
    for i in 0..sets {
        let set = random_finite_gap_set(&mut rng, 1 + i % 2);
        let eq = equilibrium(&set)?;
        let points = (0..per_set).map(|_| random_torus_point(&mut rng, &eq)).collect::<Result<_>>()?;
        out.push((eq, points));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::szego::{eigenvalue_function, szego_entropy};

    fn two_bands() -> EquilibriumData {
        equilibrium(&FiniteGapSet::new(&[(-1.0, -0.25), (0.15, 1.0)]).unwrap()).unwrap()
    }

    #[test]
    fn free_jacobi() {
        let eq = equilibrium(&FiniteGapSet::interval(-2.0, 2.0).unwrap()).unwrap();
        let tp = TorusPoint::new(&eq, &[], &[]).unwrap();
        assert!((tp.a0_squared - 1.0).abs() < 1e-12);
        let mu = torus_measure(&tp).unwrap();
        let semicircle = (4.0f64 - 1.0).sqrt() / (2.0 * std::f64::consts::PI);
        assert!((mu.density_at(1.0) - semicircle).abs() < 1e-12);
        assert!((szego_entropy(&mu, &eq).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn torus_mass_and_eigenvalue() {
        let eq = two_bands();
        let tp = TorusPoint::new(&eq, &[0.0], &[true]).unwrap();
        let mu = torus_measure(&tp).unwrap();
        assert!((mu.total_mass().unwrap() - 1.0).abs() < 1e-10);
        assert_eq!(mu.atoms().len(), 1);
        let e = eigenvalue_function(&mu, &eq).unwrap();
        assert!((e - tp.expected_eigenvalue(&eq).unwrap()).abs() < 1e-14);
        assert!(e > 1.0);
    }

    #[test]
    fn edge_flags_rejected() {
        let eq = two_bands();
        assert!(TorusPoint::new(&eq, &[-0.25], &[true]).is_err());
        assert!(TorusPoint::new(&eq, &[0.5], &[false]).is_err());
        let tp = TorusPoint::new(&eq, &[0.15], &[false]).unwrap();
        let mu = torus_measure(&tp).unwrap();
        assert!((mu.total_mass().unwrap() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn reflectionless_at_critical_point_is_equilibrium() {
        let eq = two_bands();
        let mu = reflectionless_measure(&eq, eq.critical_points()).unwrap();
        for x in [-0.9, -0.5, 0.3, 0.99] {
            assert!((mu.density_at(x) / eq.density(x) - 1.0).abs() < 1e-12);
        }
        let mu = reflectionless_measure(&eq, &[-0.2]).unwrap();
        assert!((mu.total_mass().unwrap() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn isolb_report_passes() {
        let eq = two_bands();
        let tp = TorusPoint::new(&eq, &[-0.1], &[true]).unwrap();
        let r = verify_isolb(&tp, &eq, 8).unwrap();
        assert!(r.pass, "{}", r.margin);
        assert!(r.rows.iter().all(|row| row.sum_rule_gap.unwrap() < 1e-8));
    }
}
