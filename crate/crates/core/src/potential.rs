//! Potential theory of finite-gap sets: equilibrium measures, logarithmic
//! capacity, the Green function with pole at infinity, and nested outer covers.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::measures::{cantor_left_endpoints, CantorSpec, FiniteGapSet, Measure};
use crate::quadrature::{self, Point};

/// Tolerance for the Frostman cross-validation of the capacity.
pub const FROSTMAN_TOLERANCE: f64 = 1e-8;

const MAX_ITERATIONS: usize = 200;
/// Largest genus solved by Newton's method; larger systems keep the
/// factorized initial Jacobian (chord iteration).
const DENSE_NEWTON_LIMIT: usize = 512;

/// Solved equilibrium problem of a finite-gap set.
#[derive(Clone, Debug)]
pub struct EquilibriumData {
    set: FiniteGapSet,
    critical_points: Vec<f64>,
    log_capacity: f64,
    residuals: Vec<f64>,
    frostman: Vec<(f64, f64)>,
    measure: Measure,
}

/// JSON summary of an equilibrium solve.
#[derive(Clone, Debug, Serialize)]
pub struct EquilibriumSummary {
    pub bands: Vec<[f64; 2]>,
    pub critical_points: Vec<f64>,
    pub capacity: f64,
    pub log_capacity: f64,
    pub residuals: Vec<f64>,
    pub frostman_samples: Vec<(f64, f64)>,
    pub mass_defect: f64,
}

impl EquilibriumData {
    pub fn set(&self) -> &FiniteGapSet {
        &self.set
    }

    /// Critical points `c_j` of the Green function, one per gap.
    pub fn critical_points(&self) -> &[f64] {
        &self.critical_points
    }

    pub fn capacity(&self) -> f64 {
        self.log_capacity.exp()
    }

    pub fn log_capacity(&self) -> f64 {
        self.log_capacity
    }

    /// Gap-condition residuals at the solution, scaled to displacements
    /// relative to the gap length.
    pub fn residuals(&self) -> &[f64] {
        &self.residuals
    }

    /// Sample points `z` in the set and the potential values `U(z)`.
    pub fn frostman_samples(&self) -> &[(f64, f64)] {
        &self.frostman
    }

    /// The equilibrium measure.
    pub fn measure(&self) -> &Measure {
        &self.measure
    }

    /// Equilibrium density at `x` (zero off the set).
    pub fn density(&self, x: f64) -> f64 {
        self.measure.density_at(x)
    }

    /// Green function with pole at infinity, `U(x) - log cap`.
    pub fn green(&self, x: f64) -> Result<f64> {
        if self.set.contains(x) {
            return Ok(0.0);
        }
        let u = quadrature::log_potential(&self.measure, x)?;
        Ok((u - self.log_capacity).max(0.0))
    }

    pub fn summary(&self) -> EquilibriumSummary {
        let scale = self.measure.ac().map_or(1.0, |ac| ac.scale());
        EquilibriumSummary {
            bands: self.set.bands().iter().map(|&(a, b)| [a, b]).collect(),
            critical_points: self.critical_points.clone(),
            capacity: self.capacity(),
            log_capacity: self.log_capacity,
            residuals: self.residuals.clone(),
            frostman_samples: self.frostman.clone(),
            mass_defect: (scale - 1.0).abs(),
        }
    }
}

/// Gap rule: nodes and weights covering gap `j`, graded towards its edges.
fn gap_rule(bands: &[(f64, f64)], j: usize) -> Result<Vec<(Point, f64)>> {
    let (u, v) = (bands[j].1, bands[j + 1].0);
    let du = bands[j].1 - bands[j].0;
    let dv = bands[j + 1].1 - bands[j + 1].0;
    let mut nodes = vec![];
    quadrature::graded_rule((u, -0.5, du), (v, -0.5, dv), &mut |p, w| nodes.push((p, w)))?;
    Ok(nodes)
}

/// `prod_{k != skip} (t - c_k) / sqrt(prod |t - a_i||t - b_i|)`, signed,
/// accumulated pairwise in squared form.
fn gap_kernel(bands: &[(f64, f64)], crit: &[f64], p: &Point, skip: usize) -> f64 {
    let l = bands.len() - 1;
    let mut sq = 1.0 / (p.dist(bands[0].0) * p.dist(bands[l].1));
    let mut negative = false;
    for (k, &c) in crit.iter().enumerate() {
        let den = p.dist(bands[k].1) * p.dist(bands[k + 1].0);
        if k == skip {
            sq /= den;
        } else {
            let d = (p.anchor - c) + p.offset;
            negative ^= d < 0.0;
            sq *= d * d / den;
        }
    }
    let v = sq.sqrt();
    if negative {
        -v
    } else {
        v
    }
}

/// Gap conditions and their Jacobian for critical points `crit`. Rows are
/// scaled by the diagonal so that `F_j` reads as a displacement of `c_j`.
fn gap_system(bands: &[(f64, f64)], rules: &[Vec<(Point, f64)>], crit: &[f64], jac: bool) -> (DVector<f64>, DMatrix<f64>) {
    let l = crit.len();
    let mut f = DVector::zeros(l);
    let mut jm = if jac { DMatrix::zeros(l, l) } else { DMatrix::zeros(0, 0) };
    let mut row = vec![0.0; l];
    for j in 0..l {
        let mut diag = 0.0;
        let mut val = 0.0;
        row.iter_mut().for_each(|r| *r = 0.0);
        for (p, w) in &rules[j] {
            let kern = w * gap_kernel(bands, crit, p, j);
            let tc = (p.anchor - crit[j]) + p.offset;
            diag += kern;
            val += tc * kern;
            if jac {
                let tk = tc * kern;
                for (m, r) in row.iter_mut().enumerate() {
                    if m != j {
                        *r -= tk / (p.x - crit[m]);
                    }
                }
            }
        }
        f[j] = val / diag;
        if jac {
            for m in 0..l {
                jm[(j, m)] = if m == j { -1.0 } else { row[m] / diag };
            }
        }
    }
    (f, jm)
}

fn solve_critical_points(set: &FiniteGapSet, guess: Option<&[f64]>) -> Result<(Vec<f64>, Vec<f64>)> {
    let bands = set.bands();
    let gaps = set.gaps();
    let l = gaps.len();
    if l == 0 {
        return Ok((vec![], vec![]));
    }
    let rules = (0..l).map(|j| gap_rule(bands, j)).collect::<Result<Vec<_>>>()?;
    let mut crit: Vec<f64> = match guess {
        Some(g) if g.len() == l && g.iter().zip(&gaps).all(|(&c, &(u, v))| u < c && c < v) => g.to_vec(),
        _ => gaps.iter().map(|&(u, v)| 0.5 * (u + v)).collect(),
    };
    let scaled = |f: &DVector<f64>| {
        f.iter().zip(&gaps).map(|(r, &(u, v))| (r / (v - u)).abs()).fold(0.0, f64::max)
    };
    let exact = l <= DENSE_NEWTON_LIMIT;
    let (mut f, mut jm) = gap_system(bands, &rules, &crit, true);
    let mut lu = jm.clone().lu();
    let mut res = scaled(&f);
    let mut iterations = 0;
    while res >= 1e-15 && iterations < MAX_ITERATIONS {
        iterations += 1;
        if exact && iterations > 1 {
            lu = jm.clone().lu();
        }
        let step = lu.solve(&(-&f)).ok_or(Error::EquilibriumNonConvergence { residual: res, iterations })?;
        let rel_step = step.iter().zip(&gaps).map(|(d, &(u, v))| (d / (v - u)).abs()).fold(0.0, f64::max);
        if rel_step < 1e-14 {
            break;
        }
        let mut lambda = 1.0;
        let mut accepted = None;
        while lambda > 1e-6 {
            let trial: Vec<f64> = crit.iter().zip(step.iter()).map(|(c, d)| c + lambda * d).collect();
            if trial.iter().zip(&gaps).all(|(&c, &(u, v))| u < c && c < v) {
                let (tf, tj) = gap_system(bands, &rules, &trial, exact);
                let tres = scaled(&tf);
                if tres < res || tres < 1e-14 {
                    accepted = Some((trial, tf, tj, tres));
                    break;
                }
            }
            lambda *= 0.5;
        }
        let Some((trial, tf, tj, tres)) = accepted else { break };
        (crit, f, jm, res) = (trial, tf, tj, tres);
    }
    let residuals: Vec<f64> = f.iter().zip(&gaps).map(|(r, &(u, v))| r / (v - u)).collect();
    let converged = residuals.iter().zip(&gaps).all(|(r, &(u, v))| {
        let floor = 1e3 * f64::EPSILON * u.abs().max(v.abs()) / (v - u);
        r.abs() < 1e-11_f64.max(floor)
    });
    if !converged {
        return Err(Error::EquilibriumNonConvergence { residual: res, iterations });
    }
    Ok((crit, residuals))
}

/// Frostman sample points: the midpoint of the widest band and two points a
/// quarter of the way into the outermost bands.
fn frostman_points(set: &FiniteGapSet) -> Vec<f64> {
    let bands = set.bands();
    let widest = bands
        .iter()
        .max_by(|x, y| (x.1 - x.0).total_cmp(&(y.1 - y.0)))
        .expect("set has a band");
    let (a0, b0) = bands[0];
    let (al, bl) = bands[bands.len() - 1];
    vec![0.5 * (widest.0 + widest.1), a0 + 0.25 * (b0 - a0), bl - 0.25 * (bl - al)]
}

/// Equilibrium measure and capacity of `set`.
pub fn equilibrium(set: &FiniteGapSet) -> Result<EquilibriumData> {
    equilibrium_with_guess(set, None)
}

/// As [`equilibrium`], starting the critical-point solve from `guess`
/// (ignored unless it holds one interior point per gap).
pub fn equilibrium_with_guess(set: &FiniteGapSet, guess: Option<&[f64]>) -> Result<EquilibriumData> {
    let (critical_points, residuals) = solve_critical_points(set, guess)?;
    let measure = Measure::equilibrium(set.clone(), critical_points.clone())?;
    let frostman = frostman_points(set)
        .into_iter()
        .map(|z| quadrature::log_potential(&measure, z).map(|u| (z, u)))
        .collect::<Result<Vec<_>>>()?;
    let log_capacity = frostman[0].1;
    let spread = frostman.iter().map(|&(_, u)| (u - log_capacity).abs()).fold(0.0, f64::max);
    if spread > FROSTMAN_TOLERANCE {
        return Err(Error::FrostmanMismatch { values: frostman.iter().map(|x| x.1).collect(), spread });
    }
    Ok(EquilibriumData { set: set.clone(), critical_points, log_capacity, residuals, frostman, measure })
}

/// Logarithmic capacity of `set`.
pub fn capacity(set: &FiniteGapSet) -> Result<f64> {
    Ok(equilibrium(set)?.capacity())
}

/// Green function of `set` with pole at infinity, evaluated at `x`.
pub fn green(set: &FiniteGapSet, x: f64) -> Result<f64> {
    equilibrium(set)?.green(x)
}

/// The ternary covers `K_1 ⊇ K_2 ⊇ ... ⊇ K_L` of the Cantor set in `[0, 1]`,
/// `K_j` having `2^j` bands of length `3^{-j}`.
pub fn outer_covers(spec: CantorSpec) -> Result<Vec<FiniteGapSet>> {
    if spec.level == 0 || spec.level > 24 {
        return Err(Error::InvalidParameter(format!("cover level {} outside 1..=24", spec.level)));
    }
    (1..=spec.level)
        .map(|j| {
            let len = 3f64.powi(-(j as i32));
            let bands: Vec<(f64, f64)> = cantor_left_endpoints(j).into_iter().map(|a| (a, a + len)).collect();
            FiniteGapSet::new(&bands)
        })
        .collect()
}

/// Equilibria along a nested sequence of sets; each solve is warm-started
/// from the critical points of the previous set that fall into its gaps.
pub fn equilibria_along(covers: &[FiniteGapSet]) -> Result<Vec<EquilibriumData>> {
    let mut out: Vec<EquilibriumData> = Vec::with_capacity(covers.len());
    for set in covers {
        let guess: Option<Vec<f64>> = out.last().map(|prev| {
            set.gaps()
                .iter()
                .map(|&(u, v)| {
                    prev.critical_points
                        .iter()
                        .copied()
                        .find(|&c| u < c && c < v)
                        .unwrap_or(0.5 * (u + v))
                })
                .collect()
        });
        out.push(equilibrium_with_guess(set, guess.as_deref())?);
    }
    Ok(out)
}
