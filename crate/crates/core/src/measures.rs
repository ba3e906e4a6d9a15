//! Measure data model: finite-gap sets, densities relative to the
//! equilibrium measure, atoms, and the measure families used throughout the
//! crate (Jacobi weights, the sharpness families, Cantor discretizations).
//!
//! Every absolutely continuous part is stored relative to the equilibrium
//! density of its support,
//!
//! ```text
//! w(x) = scale * rho_K(x) * prod_i |x - p_i|^{e_i} * table(x)
//! ```
//!
//! so the Radon-Nikodym derivative `f = w / rho_K` and its logarithm are
//! available in closed structural form, and every algebraic singularity is
//! declared up front for the quadrature layer.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{self, Point};

/// Tolerance on the total mass of a constructed measure.
pub const MASS_TOLERANCE: f64 = 1e-10;

/// A finite union of disjoint closed intervals `[a_1,b_1] ∪ ... ∪ [a_{l+1},b_{l+1}]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<[f64; 2]>", into = "Vec<[f64; 2]>")]
pub struct FiniteGapSet {
    bands: Vec<(f64, f64)>,
}

impl FiniteGapSet {
    /// Validates and sorts the given intervals.
    pub fn new(intervals: &[(f64, f64)]) -> Result<Self> {
        if intervals.is_empty() {
            return Err(Error::InvalidSet("no intervals given".into()));
        }
        let mut bands = intervals.to_vec();
        for &(a, b) in &bands {
            if !a.is_finite() || !b.is_finite() {
                return Err(Error::InvalidSet(format!("non-finite endpoint in [{a}, {b}]")));
            }
            if a >= b {
                return Err(Error::InvalidSet(format!("degenerate interval [{a}, {b}]")));
            }
        }
        bands.sort_by(|x, y| x.0.total_cmp(&y.0));
        for w in bands.windows(2) {
            if w[0].1 >= w[1].0 {
                return Err(Error::InvalidSet(format!(
                    "intervals [{}, {}] and [{}, {}] overlap or touch",
                    w[0].0, w[0].1, w[1].0, w[1].1
                )));
            }
        }
        Ok(Self { bands })
    }

    pub fn interval(a: f64, b: f64) -> Result<Self> {
        Self::new(&[(a, b)])
    }

    pub fn bands(&self) -> &[(f64, f64)] {
        &self.bands
    }

    /// Number of gaps `l`.
    pub fn genus(&self) -> usize {
        self.bands.len() - 1
    }

    /// Gaps `(b_j, a_{j+1})`.
    pub fn gaps(&self) -> Vec<(f64, f64)> {
        self.bands.windows(2).map(|w| (w[0].1, w[1].0)).collect()
    }

    pub fn total_length(&self) -> f64 {
        self.bands.iter().map(|(a, b)| b - a).sum()
    }

    pub fn hull(&self) -> (f64, f64) {
        (self.bands[0].0, self.bands[self.bands.len() - 1].1)
    }

    pub fn contains(&self, x: f64) -> bool {
        self.bands.iter().any(|&(a, b)| a <= x && x <= b)
    }

    /// Index of the band containing `x`, if any.
    pub fn band_of(&self, x: f64) -> Option<usize> {
        self.bands.iter().position(|&(a, b)| a <= x && x <= b)
    }

    /// Image under `x -> s x + t` (`s != 0`).
    pub fn affine(&self, s: f64, t: f64) -> Result<Self> {
        if s == 0.0 || !s.is_finite() {
            return Err(Error::InvalidParameter("affine scale must be nonzero".into()));
        }
        let mapped: Vec<_> = self
            .bands
            .iter()
            .map(|&(a, b)| {
                let (u, v) = (s * a + t, s * b + t);
                (u.min(v), u.max(v))
            })
            .collect();
        Self::new(&mapped)
    }

    /// All band endpoints in increasing order.
    pub fn endpoints(&self) -> Vec<f64> {
        self.bands.iter().flat_map(|&(a, b)| [a, b]).collect()
    }
}

impl TryFrom<Vec<[f64; 2]>> for FiniteGapSet {
    type Error = Error;
    fn try_from(v: Vec<[f64; 2]>) -> Result<Self> {
        let pairs: Vec<_> = v.into_iter().map(|[a, b]| (a, b)).collect();
        Self::new(&pairs)
    }
}

impl From<FiniteGapSet> for Vec<[f64; 2]> {
    fn from(s: FiniteGapSet) -> Self {
        s.bands.into_iter().map(|(a, b)| [a, b]).collect()
    }
}

/// `make_finite_gap_set`: validated, sorted set from interval pairs.
pub fn make_finite_gap_set(intervals: &[(f64, f64)]) -> Result<FiniteGapSet> {
    FiniteGapSet::new(intervals)
}

/// An algebraic factor `|x - location|^exponent`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Singularity {
    pub location: f64,
    pub exponent: f64,
}

impl Singularity {
    pub fn new(location: f64, exponent: f64) -> Self {
        Self { location, exponent }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Atom {
    pub location: f64,
    pub mass: f64,
}

/// Parameters of a normalized Jacobi weight `c (1-x)^alpha (1+x)^beta` on `[-1, 1]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct JacobiParams {
    pub alpha: f64,
    pub beta: f64,
    /// Normalization constant as measured by quadrature.
    pub c: f64,
}

impl JacobiParams {
    /// `Gamma(a+b+2) / (2^{a+b+1} Gamma(a+1) Gamma(b+1))`.
    pub fn closed_form_constant(alpha: f64, beta: f64) -> f64 {
        use statrs::function::gamma::ln_gamma;
        (ln_gamma(alpha + beta + 2.0)
            - (alpha + beta + 1.0) * std::f64::consts::LN_2
            - ln_gamma(alpha + 1.0)
            - ln_gamma(beta + 1.0))
        .exp()
    }
}

/// Truncation depth of the Cantor measure discretization on `[0, 1]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CantorSpec {
    pub level: u32,
}

/// Piecewise-linear table of the relative density `f = w / rho_K`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Table {
    pub xs: Vec<f64>,
    pub values: Vec<f64>,
}

impl Table {
    fn eval(&self, x: f64) -> f64 {
        let xs = &self.xs;
        if x <= xs[0] {
            return self.values[0];
        }
        if x >= xs[xs.len() - 1] {
            return self.values[xs.len() - 1];
        }
        let i = xs.partition_point(|&t| t <= x) - 1;
        let s = (x - xs[i]) / (xs[i + 1] - xs[i]);
        self.values[i] * (1.0 - s) + self.values[i + 1] * s
    }
}

/// Provenance of a density; also the JSON tag of a serialized measure.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case", deny_unknown_fields)]
pub enum DensityKind {
    Jacobi { alpha: f64, beta: f64 },
    EquilibriumRelative,
    SharpnessEps { n: u32, p: f64, eps: f64 },
    SharpnessSmall { n: u32, p: f64 },
    Isospectral { gammas: Vec<f64>, flags: Vec<u8> },
    Reflectionless { gammas: Vec<f64> },
    Atomic,
    CustomTable,
}

/// Absolutely continuous part, stored relative to the equilibrium density.
#[derive(Clone, Debug, PartialEq)]
pub struct AbsCont {
    support: FiniteGapSet,
    critical_points: Vec<f64>,
    scale: f64,
    factors: Vec<Singularity>,
    table: Option<Table>,
}

impl AbsCont {
    pub fn support(&self) -> &FiniteGapSet {
        &self.support
    }

    pub fn critical_points(&self) -> &[f64] {
        &self.critical_points
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn factors(&self) -> &[Singularity] {
        &self.factors
    }

    /// Equilibrium density of the support at `p`.
    pub fn rho(&self, p: &Point) -> f64 {
        equilibrium_density(self.support.bands(), &self.critical_points, p)
    }

    /// Relative density `f = w / rho_K`.
    pub fn relative_density(&self, p: &Point) -> f64 {
        let mut v = self.scale;
        for s in &self.factors {
            v *= p.dist(s.location).powf(s.exponent);
        }
        if let Some(t) = &self.table {
            v *= t.eval(p.x);
        }
        v
    }

    pub fn log_relative_density(&self, p: &Point) -> f64 {
        let mut v = self.scale.ln();
        for s in &self.factors {
            v += s.exponent * p.dist(s.location).ln();
        }
        if let Some(t) = &self.table {
            v += t.eval(p.x).ln();
        }
        v
    }

    /// Lebesgue density `w`.
    pub fn density(&self, p: &Point) -> f64 {
        self.rho(p) * self.relative_density(p)
    }

    /// Singular points of `w` lying on the support, with merged exponents.
    /// Band endpoints are always included.
    pub fn singular_points(&self) -> Vec<Singularity> {
        let mut pts: Vec<Singularity> = self
            .support
            .endpoints()
            .into_iter()
            .map(|e| Singularity::new(e, -0.5))
            .collect();
        for f in &self.factors {
            if !self.support.contains(f.location) {
                continue;
            }
            match pts.iter_mut().find(|s| s.location == f.location) {
                Some(s) => s.exponent += f.exponent,
                None => pts.push(*f),
            }
        }
        pts.sort_by(|a, b| a.location.total_cmp(&b.location));
        pts
    }
}

/// `rho_K(x) = (1/pi) prod|x - c_j| / sqrt(prod |x - a_j||x - b_j|)`, evaluated
/// pairwise (`c_j` against the edges of gap `j`) so long products over many
/// bands neither overflow nor underflow.
pub(crate) fn equilibrium_density(bands: &[(f64, f64)], crit: &[f64], p: &Point) -> f64 {
    let l = bands.len() - 1;
    let mut v = 1.0 / (PI * (p.dist(bands[0].0) * p.dist(bands[l].1)).sqrt());
    for (k, &c) in crit.iter().enumerate() {
        v *= p.dist(c) / (p.dist(bands[k].1) * p.dist(bands[k + 1].0)).sqrt();
    }
    v
}

/// A probability measure on the real line: an optional absolutely continuous
/// part on a finite-gap set plus finitely many atoms.
#[derive(Clone, Debug, PartialEq)]
pub struct Measure {
    kind: DensityKind,
    ac: Option<AbsCont>,
    atoms: Vec<Atom>,
}

impl Measure {
    /// Builds a measure whose a.c. part is `scale * rho_K * prod factors`, with
    /// `scale` fixed by quadrature so that the total mass (including atoms) is 1.
    pub fn equilibrium_relative(
        support: FiniteGapSet,
        critical_points: Vec<f64>,
        factors: Vec<Singularity>,
        atoms: Vec<Atom>,
        kind: DensityKind,
    ) -> Result<Self> {
        Self::build(support, critical_points, factors, None, atoms, kind)
    }

    fn build(
        support: FiniteGapSet,
        critical_points: Vec<f64>,
        factors: Vec<Singularity>,
        table: Option<Table>,
        atoms: Vec<Atom>,
        kind: DensityKind,
    ) -> Result<Self> {
        if critical_points.len() != support.genus() {
            return Err(Error::InvalidMeasure(format!(
                "{} critical points for a set with {} gaps",
                critical_points.len(),
                support.genus()
            )));
        }
        let factors = snap_factors(&support, factors);
        let atom_mass: f64 = atoms.iter().map(|a| a.mass).sum();
        if atom_mass >= 1.0 {
            return Err(Error::InvalidMeasure("atoms carry all of the mass".into()));
        }
        let mut ac = AbsCont { support, critical_points, scale: 1.0, factors, table };
        let raw = quadrature::integrate_ac(&ac, &|_| 1.0, &[], quadrature::INNER_TOL)?.value;
        if !(raw.is_finite() && raw > 0.0) {
            return Err(Error::InvalidMeasure(format!("a.c. part has mass {raw}")));
        }
        ac.scale = (1.0 - atom_mass) / raw;
        let m = Self { kind, ac: Some(ac), atoms };
        m.validate_atoms()?;
        Ok(m)
    }

    /// Equilibrium measure of `support` given the critical points of its Green function.
    pub fn equilibrium(support: FiniteGapSet, critical_points: Vec<f64>) -> Result<Self> {
        Self::equilibrium_relative(support, critical_points, vec![], vec![], DensityKind::EquilibriumRelative)
    }

    /// Measure with relative density given by a piecewise-linear table on `support`.
    pub fn custom_table(support: FiniteGapSet, critical_points: Vec<f64>, table: Table) -> Result<Self> {
        if table.xs.len() < 2 || table.xs.len() != table.values.len() {
            return Err(Error::InvalidMeasure("table needs at least two (x, value) pairs".into()));
        }
        if table.xs.windows(2).any(|w| w[0] >= w[1]) || table.values.iter().any(|&v| !(v > 0.0)) {
            return Err(Error::InvalidMeasure("table abscissae must increase and values be positive".into()));
        }
        Self::build(support, critical_points, vec![], Some(table), vec![], DensityKind::CustomTable)
    }

    /// Purely atomic measure; masses are normalized to sum to 1.
    pub fn atomic(atoms: Vec<Atom>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::InvalidMeasure("no atoms".into()));
        }
        if atoms.iter().any(|a| !(a.mass > 0.0) || !a.location.is_finite()) {
            return Err(Error::InvalidMeasure("atom masses must be positive".into()));
        }
        let total: f64 = atoms.iter().map(|a| a.mass).sum();
        let atoms = atoms.into_iter().map(|a| Atom { location: a.location, mass: a.mass / total }).collect();
        Ok(Self { kind: DensityKind::Atomic, ac: None, atoms })
    }

    pub fn point_mass(location: f64) -> Self {
        Self { kind: DensityKind::Atomic, ac: None, atoms: vec![Atom { location, mass: 1.0 }] }
    }

    fn validate_atoms(&self) -> Result<()> {
        if let Some(ac) = &self.ac {
            let (lo, hi) = ac.support.hull();
            for a in &self.atoms {
                if !(a.mass > 0.0) || a.location < lo || a.location > hi {
                    return Err(Error::InvalidMeasure(format!(
                        "atom at {} (mass {}) outside the convex hull of the support",
                        a.location, a.mass
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn kind(&self) -> &DensityKind {
        &self.kind
    }

    pub fn ac(&self) -> Option<&AbsCont> {
        self.ac.as_ref()
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    /// Support bands of the a.c. part, if any.
    pub fn support(&self) -> Option<&FiniteGapSet> {
        self.ac.as_ref().map(|a| &a.support)
    }

    /// Smallest interval containing the support.
    pub fn hull(&self) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        if let Some(ac) = &self.ac {
            let (a, b) = ac.support.hull();
            lo = a;
            hi = b;
        }
        for a in &self.atoms {
            lo = lo.min(a.location);
            hi = hi.max(a.location);
        }
        (lo, hi)
    }

    /// Lebesgue density of the a.c. part at `x` (0 off the support).
    pub fn density_at(&self, x: f64) -> f64 {
        match &self.ac {
            Some(ac) if ac.support.contains(x) => ac.density(&Point::at(x)),
            _ => 0.0,
        }
    }

    /// Total mass measured by quadrature.
    pub fn total_mass(&self) -> Result<f64> {
        Ok(quadrature::integrate(|_| 1.0, &[], self, quadrature::INNER_TOL)?.value)
    }

    /// Push-forward under `x -> s x + t`. Exact: the relative-density
    /// representation transforms in closed form.
    pub fn affine(&self, s: f64, t: f64) -> Result<Self> {
        let atoms = self.atoms.iter().map(|a| Atom { location: s * a.location + t, mass: a.mass }).collect();
        let ac = match &self.ac {
            None => None,
            Some(ac) => {
                let support = ac.support.affine(s, t)?;
                let mut crit: Vec<f64> = ac.critical_points.iter().map(|c| s * c + t).collect();
                crit.sort_by(f64::total_cmp);
                let exp_sum: f64 = ac.factors.iter().map(|f| f.exponent).sum();
                let factors = ac.factors.iter().map(|f| Singularity::new(s * f.location + t, f.exponent)).collect();
                let table = ac.table.as_ref().map(|tb| {
                    let mut pairs: Vec<(f64, f64)> =
                        tb.xs.iter().zip(&tb.values).map(|(&x, &v)| (s * x + t, v)).collect();
                    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
                    Table { xs: pairs.iter().map(|p| p.0).collect(), values: pairs.iter().map(|p| p.1).collect() }
                });
                Some(AbsCont {
                    support,
                    critical_points: crit,
                    scale: ac.scale * s.abs().powf(-exp_sum),
                    factors,
                    table,
                })
            }
        };
        Ok(Self { kind: self.kind.clone(), ac, atoms })
    }

    pub fn to_doc(&self) -> MeasureDoc {
        let (bands, crit, scale, factors, table, singularities) = match &self.ac {
            Some(ac) => (
                ac.support.clone().into(),
                ac.critical_points.clone(),
                ac.scale,
                ac.factors.clone(),
                ac.table.clone(),
                ac.singular_points(),
            ),
            None => (vec![], vec![], 0.0, vec![], None, vec![]),
        };
        MeasureDoc {
            kind: self.kind.clone(),
            bands,
            critical_points: crit,
            scale,
            factors,
            table,
            atoms: self.atoms.clone(),
            singularities,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_doc()).expect("measure documents always serialize")
    }

    /// Rebuilds a measure from a document, checking that it has unit mass.
    pub fn from_doc(doc: MeasureDoc) -> Result<Self> {
        let ac = if doc.bands.is_empty() {
            None
        } else {
            let support = FiniteGapSet::try_from(doc.bands)?;
            if doc.critical_points.len() != support.genus() || !(doc.scale > 0.0) {
                return Err(Error::InvalidMeasure("critical points or scale inconsistent with bands".into()));
            }
            Some(AbsCont {
                support,
                critical_points: doc.critical_points,
                scale: doc.scale,
                factors: doc.factors,
                table: doc.table,
            })
        };
        if ac.is_none() && doc.atoms.is_empty() {
            return Err(Error::InvalidMeasure("empty measure".into()));
        }
        let m = Self { kind: doc.kind, ac, atoms: doc.atoms };
        m.validate_atoms()?;
        let mass = m.total_mass()?;
        if (mass - 1.0).abs() > 1e-8 {
            return Err(Error::InvalidMeasure(format!("total mass {mass} differs from 1")));
        }
        Ok(m)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Self::from_doc(serde_json::from_str(s)?)
    }
}

/// Moves factor locations that sit on a band edge (up to rounding) exactly onto it.
fn snap_factors(support: &FiniteGapSet, factors: Vec<Singularity>) -> Vec<Singularity> {
    let edges = support.endpoints();
    let scale = edges.iter().fold(1.0f64, |m, e| m.max(e.abs()));
    let mut out: Vec<Singularity> = Vec::with_capacity(factors.len());
    for mut f in factors {
        if f.exponent == 0.0 {
            continue;
        }
        if let Some(&e) = edges.iter().find(|&&e| (e - f.location).abs() <= 1e-13 * scale) {
            f.location = e;
        }
        match out.iter_mut().find(|g| g.location == f.location) {
            Some(g) => g.exponent += f.exponent,
            None => out.push(f),
        }
    }
    out.retain(|f| f.exponent != 0.0);
    out
}

/// Serialized form of a [`Measure`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasureDoc {
    pub kind: DensityKind,
    pub bands: Vec<[f64; 2]>,
    #[serde(default)]
    pub critical_points: Vec<f64>,
    #[serde(default)]
    pub scale: f64,
    #[serde(default)]
    pub factors: Vec<Singularity>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub table: Option<Table>,
    #[serde(default)]
    pub atoms: Vec<Atom>,
    /// Declared singularities of the density on its support (derived, informational).
    #[serde(default)]
    pub singularities: Vec<Singularity>,
}

/// Normalized Jacobi weight `c (1-x)^alpha (1+x)^beta` on `[-1, 1]`.
pub fn jacobi_measure(alpha: f64, beta: f64) -> Result<Measure> {
    Ok(jacobi_measure_with_params(alpha, beta)?.0)
}

/// Same as [`jacobi_measure`], also returning the measured normalization constant.
pub fn jacobi_measure_with_params(alpha: f64, beta: f64) -> Result<(Measure, JacobiParams)> {
    if !(alpha > -1.0 && beta > -1.0) {
        return Err(Error::InvalidParameter(format!("Jacobi exponents must exceed -1, got ({alpha}, {beta})")));
    }
    let k = FiniteGapSet::interval(-1.0, 1.0)?;
    // relative to the arcsine density: pi c (1-x)^{alpha+1/2} (1+x)^{beta+1/2}
    let m = Measure::equilibrium_relative(
        k,
        vec![],
        vec![Singularity::new(1.0, alpha + 0.5), Singularity::new(-1.0, beta + 0.5)],
        vec![],
        DensityKind::Jacobi { alpha, beta },
    )?;
    let c = m.ac().map(|a| a.scale).unwrap_or(0.0) / PI;
    Ok((m, JacobiParams { alpha, beta, c }))
}

/// The integer `N` with `np - 1 < N <= np`.
pub fn sharpness_order(n: u32, p: f64) -> u32 {
    let np = n as f64 * p;
    let r = np.round();
    if (np - r).abs() <= 1e-12 * np.max(1.0) {
        r as u32
    } else {
        np.floor() as u32
    }
}

/// `c_eps |x|^{N-np} prod_{j<=N} |x^2 - j^2 eps^2|^{-1/2} dmu_K` on `[-2, 2]`.
pub fn sharpness_measure_eps(n: u32, p: f64, eps: f64) -> Result<Measure> {
    let np = n as f64 * p;
    if !(np >= 1.0) {
        return Err(Error::InvalidParameter(format!("np = {np} < 1; use sharpness_measure_small")));
    }
    let big_n = sharpness_order(n, p);
    if !(eps > 0.0 && eps < 1.0 / big_n as f64) {
        return Err(Error::InvalidParameter(format!("eps = {eps} outside (0, 1/{big_n})")));
    }
    let mut factors = vec![];
    let zero_exp = big_n as f64 - np;
    if zero_exp.abs() > 1e-12 {
        factors.push(Singularity::new(0.0, zero_exp));
    }
    for j in 1..=big_n {
        let s = j as f64 * eps;
        factors.push(Singularity::new(-s, -0.5));
        factors.push(Singularity::new(s, -0.5));
    }
    factors.sort_by(|a, b| a.location.total_cmp(&b.location));
    Measure::equilibrium_relative(
        FiniteGapSet::interval(-2.0, 2.0)?,
        vec![],
        factors,
        vec![],
        DensityKind::SharpnessEps { n, p, eps },
    )
}

/// `c |x|^{-np} dmu_K` on `[-2, 2]` for `0 < np < 1`.
pub fn sharpness_measure_small(n: u32, p: f64) -> Result<Measure> {
    let np = n as f64 * p;
    if !(np > 0.0 && np < 1.0) {
        return Err(Error::InvalidParameter(format!("np = {np} must lie in (0, 1)")));
    }
    Measure::equilibrium_relative(
        FiniteGapSet::interval(-2.0, 2.0)?,
        vec![],
        vec![Singularity::new(0.0, -np)],
        vec![],
        DensityKind::SharpnessSmall { n, p },
    )
}

/// Left endpoints of the `2^level` ternary intervals of length `3^-level`.
pub(crate) fn cantor_left_endpoints(level: u32) -> Vec<f64> {
    let mut lefts = vec![0.0f64];
    let mut len = 1.0f64;
    for _ in 0..level {
        len /= 3.0;
        lefts = lefts.iter().flat_map(|&a| [a, a + 2.0 * len]).collect();
    }
    lefts
}

/// Level-`L` discretization of the Cantor measure: `2^L` atoms of mass
/// `2^-L` at the midpoints of the ternary intervals.
pub fn cantor_measure(spec: CantorSpec) -> Result<Measure> {
    if spec.level < 1 || spec.level > 24 {
        return Err(Error::InvalidParameter(format!("Cantor level {} outside 1..=24", spec.level)));
    }
    let half = 0.5 * 3f64.powi(-(spec.level as i32));
    let mass = 0.5f64.powi(spec.level as i32);
    let atoms = cantor_left_endpoints(spec.level)
        .into_iter()
        .map(|a| Atom { location: a + half, mass })
        .collect();
    Ok(Measure { kind: DensityKind::Atomic, ac: None, atoms })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn set_construction() {
        let k = make_finite_gap_set(&[(-2.0, 2.0)]).unwrap();
        assert_eq!(k.genus(), 0);
        let k = make_finite_gap_set(&[(0.5, 1.0), (-1.0, -0.5)]).unwrap();
        assert_eq!(k.genus(), 1);
        assert_eq!(k.bands()[0], (-1.0, -0.5));
        assert!(make_finite_gap_set(&[(-1.0, 0.0), (0.0, 1.0)]).is_err());
        assert!(make_finite_gap_set(&[(1.0, 1.0)]).is_err());
        assert!(make_finite_gap_set(&[(-1.0, 0.5), (0.0, 1.0)]).is_err());
        assert!(make_finite_gap_set(&[]).is_err());
    }

    #[test]
    fn jacobi_uniform_constant() {
        let (m, p) = jacobi_measure_with_params(0.0, 0.0).unwrap();
        assert!((p.c - 0.5).abs() < 1e-12);
        assert!((m.density_at(0.3) - 0.5).abs() < 1e-12);
        assert!((JacobiParams::closed_form_constant(0.0, 0.0) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn jacobi_arcsine_is_equilibrium() {
        let m = jacobi_measure(-0.5, -0.5).unwrap();
        for x in [-0.9f64, -0.2, 0.0, 0.7] {
            let expect = 1.0 / (PI * (1.0 - x * x).sqrt());
            assert!((m.density_at(x) - expect).abs() < 1e-12 * expect);
        }
    }

    #[test]
    fn jacobi_constant_matches_closed_form() {
        for &(a, b) in &[(-0.9, 2.0), (0.5, -0.5), (5.0, 0.0), (2.0, 2.0)] {
            let (_, p) = jacobi_measure_with_params(a, b).unwrap();
            let cf = JacobiParams::closed_form_constant(a, b);
            assert!((p.c - cf).abs() < 1e-10 * cf, "{a} {b}: {} vs {cf}", p.c);
        }
    }

    #[test]
    fn jacobi_rejects_bad_exponent() {
        assert!(jacobi_measure(-1.0, 0.0).is_err());
        assert!(jacobi_measure(0.0, -1.5).is_err());
    }

    #[test]
    fn jacobi_symmetry() {
        let m = jacobi_measure(0.7, 0.7).unwrap();
        let q = jacobi_measure(0.7, 0.2).unwrap();
        for x in [0.1, 0.45, 0.93] {
            assert!((m.density_at(x) - m.density_at(-x)).abs() < 1e-13);
            assert!((q.density_at(x) - q.density_at(-x)).abs() > 1e-3);
        }
    }

    #[test]
    fn sharpness_eps_structure() {
        let m = sharpness_measure_eps(1, 2.0, 0.1).unwrap();
        let pts: Vec<f64> = m.ac().unwrap().factors().iter().map(|s| s.location).collect();
        assert_eq!(pts.len(), 4);
        for want in [-0.2, -0.1, 0.1, 0.2] {
            assert!(pts.iter().any(|p| (p - want).abs() < 1e-15));
        }
        for x in [0.05, 0.15, 1.3] {
            assert!((m.density_at(x) - m.density_at(-x)).abs() < 1e-12 * m.density_at(x));
        }
        assert!(sharpness_measure_eps(1, 2.0, 0.6).is_err());
        assert!(sharpness_measure_eps(1, 0.5, 0.1).is_err());
    }

    #[test]
    fn sharpness_order_bounds() {
        assert_eq!(sharpness_order(1, 2.0), 2);
        assert_eq!(sharpness_order(2, 2.0), 4);
        assert_eq!(sharpness_order(3, 0.5), 1);
        assert_eq!(sharpness_order(2, 1.3), 2);
    }

    #[test]
    fn sharpness_small_rejects() {
        assert!(sharpness_measure_small(1, 0.5).is_ok());
        assert!(sharpness_measure_small(2, 0.5).is_err());
    }

    #[test]
    fn cantor_level_one() {
        let m = cantor_measure(CantorSpec { level: 1 }).unwrap();
        let a = m.atoms();
        assert_eq!(a.len(), 2);
        assert!((a[0].location - 1.0 / 6.0).abs() < 1e-15);
        assert!((a[1].location - 5.0 / 6.0).abs() < 1e-15);
        assert!(a.iter().all(|t| t.mass == 0.5));
    }

    #[test]
    fn cantor_moments_converge() {
        let mut prev = f64::INFINITY;
        for level in [4, 8, 12] {
            let m = cantor_measure(CantorSpec { level }).unwrap();
            let (m0, m1, m2) = m.atoms().iter().fold((0.0, 0.0, 0.0), |acc, a| {
                (acc.0 + a.mass, acc.1 + a.mass * a.location, acc.2 + a.mass * a.location.powi(2))
            });
            assert!((m0 - 1.0).abs() < 1e-12);
            assert!((m1 - 0.5).abs() < 1e-12);
            let gap = (m2 - 0.375).abs();
            assert!(gap < prev);
            prev = gap;
        }
        assert!(prev < 1e-6);
    }

    #[test]
    fn cantor_atoms_symmetric() {
        let m = cantor_measure(CantorSpec { level: 6 }).unwrap();
        let a = m.atoms();
        for i in 0..a.len() {
            assert!((a[i].location + a[a.len() - 1 - i].location - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn json_round_trip() {
        let m = sharpness_measure_eps(2, 2.0, 0.05).unwrap();
        let back = Measure::from_json(&m.to_json()).unwrap();
        assert_eq!(m, back);
        assert!(Measure::from_json(r#"{"kind":{"type":"atomic"},"bands":[],"bogus":1}"#).is_err());
    }
}
