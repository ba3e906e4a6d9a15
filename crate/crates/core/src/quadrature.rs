//! Quadrature for densities with algebraic endpoint and interior
//! singularities and for log-singular integrands.
//!
//! Every integration point is delivered as a [`Point`] that remembers its
//! exact offset from the nearest declared singular point. Evaluators compute
//! `|x - p|` through [`Point::dist`], so factors like `|x - p|^e` or
//! `log|x - p|` stay accurate arbitrarily close to `p`.

use std::cell::RefCell;
use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap};
use std::rc::Rc;

use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::measures::{AbsCont, Measure, Singularity};
use crate::tridiag::eigen_first_components;

/// Default absolute tolerance of [`integrate`].
pub const DEFAULT_TOL: f64 = 1e-10;
/// Tolerance used internally for normalizations and potentials.
pub(crate) const INNER_TOL: f64 = 1e-13;
/// Panel budget of one adaptive integration; sets with many bands get 32
/// panels per initial piece.
pub const PANEL_BUDGET: usize = 1 << 14;
/// Nodes per panel of the adaptive integrator.
const PANEL_NODES: usize = 20;
const GRADED_NODES: usize = 14;

/// An evaluation point `x = anchor + offset`, where `anchor` is the nearest
/// declared singular point and `offset` is exact.
#[derive(Clone, Copy, Debug)]
pub struct Point {
    pub x: f64,
    pub anchor: f64,
    pub offset: f64,
}

impl Point {
    /// A point with no anchor.
    pub fn at(x: f64) -> Self {
        Self { x, anchor: f64::NAN, offset: f64::NAN }
    }

    /// `|x - p|`, computed from the anchor so that points close to `p` keep
    /// full relative accuracy.
    #[inline]
    pub fn dist(&self, p: f64) -> f64 {
        if self.anchor.is_nan() {
            (self.x - p).abs()
        } else {
            ((self.anchor - p) + self.offset).abs()
        }
    }
}

/// Gauss rule for the weight `(x - a)^left_exp (b - x)^right_exp` on `[a, b]`.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadratureRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub band: (f64, f64),
    pub left_exp: f64,
    pub right_exp: f64,
}

impl QuadratureRule {
    pub fn apply(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }

    /// `int_a^b (x-a)^l (b-x)^r dx`.
    pub fn reference_mass(&self) -> f64 {
        let (a, b) = self.band;
        let (l, r) = (self.left_exp, self.right_exp);
        ((l + r + 1.0) * (b - a).ln() + ln_gamma(l + 1.0) + ln_gamma(r + 1.0) - ln_gamma(l + r + 2.0)).exp()
    }
}

/// Rule on `[0, 1]` for the weight `s^left (1 - s)^right`; stores `s` and
/// `1 - s` separately so both offsets are accurate.
#[derive(Debug)]
struct UnitRule {
    s: Vec<f64>,
    sr: Vec<f64>,
    w: Vec<f64>,
}

fn jacobi_matrix(n: usize, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
    // weight (1-t)^a (1+t)^b on [-1, 1]
    let mut diag = Vec::with_capacity(n);
    let mut off = Vec::with_capacity(n.saturating_sub(1));
    let ab = a + b;
    for k in 0..n {
        let kf = k as f64;
        let d = if k == 0 {
            (b - a) / (ab + 2.0)
        } else {
            (b * b - a * a) / ((2.0 * kf + ab) * (2.0 * kf + ab + 2.0))
        };
        diag.push(d);
    }
    for k in 1..n {
        let kf = k as f64;
        let sq = if k == 1 {
            4.0 * (1.0 + a) * (1.0 + b) / ((2.0 + ab).powi(2) * (3.0 + ab))
        } else {
            let s = 2.0 * kf + ab;
            4.0 * kf * (kf + a) * (kf + b) * (kf + ab) / (s * s * (s + 1.0) * (s - 1.0))
        };
        off.push(sq.sqrt());
    }
    (diag, off)
}

fn unit_rule_uncached(n: usize, left: f64, right: f64) -> Result<UnitRule> {
    let (diag, off) = jacobi_matrix(n, right, left);
    let (t, z) = eigen_first_components(&diag, &off)?;
    // total mass of s^left (1-s)^right on [0, 1]
    let mass = (ln_gamma(left + 1.0) + ln_gamma(right + 1.0) - ln_gamma(left + right + 2.0)).exp();
    Ok(UnitRule {
        s: t.iter().map(|t| 0.5 * (1.0 + t)).collect(),
        sr: t.iter().map(|t| 0.5 * (1.0 - t)).collect(),
        w: z.iter().map(|z| mass * z).collect(),
    })
}

thread_local! {
    static RULES: RefCell<HashMap<(usize, u64, u64), Rc<UnitRule>>> = RefCell::new(HashMap::new());
}

fn unit_rule(n: usize, left: f64, right: f64) -> Result<Rc<UnitRule>> {
    let key = (n, left.to_bits(), right.to_bits());
    if let Some(r) = RULES.with(|c| c.borrow().get(&key).cloned()) {
        return Ok(r);
    }
    let r = Rc::new(unit_rule_uncached(n, left, right)?);
    RULES.with(|c| {
        let mut c = c.borrow_mut();
        if c.len() > 4096 {
            c.clear();
        }
        c.insert(key, r.clone());
    });
    Ok(r)
}

/// `n`-point Gauss-Jacobi rule for the weight `(x-a)^left_exp (b-x)^right_exp`,
/// computed by the Golub-Welsch eigenvalue method.
pub fn gauss_jacobi_rule(n: usize, a: f64, b: f64, left_exp: f64, right_exp: f64) -> Result<QuadratureRule> {
    if n == 0 {
        return Err(Error::InvalidParameter("rule needs at least one node".into()));
    }
    if !(left_exp > -1.0 && right_exp > -1.0) {
        return Err(Error::InvalidParameter(format!("exponents must exceed -1, got ({left_exp}, {right_exp})")));
    }
    if !(a < b) {
        return Err(Error::InvalidParameter(format!("empty interval [{a}, {b}]")));
    }
    let r = unit_rule_uncached(n, left_exp, right_exp)?;
    let h = b - a;
    let scale = h.powf(left_exp + right_exp + 1.0);
    let nodes = r
        .s
        .iter()
        .zip(&r.sr)
        .map(|(&s, &sr)| if s <= 0.5 { a + h * s } else { b - h * sr })
        .collect();
    Ok(QuadratureRule {
        nodes,
        weights: r.w.iter().map(|w| w * scale).collect(),
        band: (a, b),
        left_exp,
        right_exp,
    })
}

/// Result of an integration with its error estimate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

/// A piece `anchor + dir * [lo, hi]` of a half-interval hanging off a
/// breakpoint; `exp` is the algebraic exponent at the anchor, used when `lo == 0`.
#[derive(Clone, Copy, Debug)]
struct Piece {
    anchor: f64,
    dir: f64,
    lo: f64,
    hi: f64,
    exp: f64,
}

impl Piece {
    fn halves(&self) -> (Piece, Piece) {
        let mid = 0.5 * (self.lo + self.hi);
        (Piece { hi: mid, ..*self }, Piece { lo: mid, ..*self })
    }

    fn point(&self, off: f64) -> Point {
        let offset = self.dir * off;
        Point { x: self.anchor + offset, anchor: self.anchor, offset }
    }

    /// Nodes and weights of an `n`-point rule on the piece. The algebraic
    /// factor at the anchor is divided out of the weights' integrand by the
    /// caller-visible convention: weights returned here multiply the full
    /// integrand value.
    fn rule(&self, n: usize, mut visit: impl FnMut(Point, f64)) -> Result<()> {
        let h = self.hi - self.lo;
        if self.lo == 0.0 && self.exp != 0.0 {
            let r = unit_rule(n, self.exp, 0.0)?;
            let hp = h.powf(self.exp + 1.0);
            for (&s, &w) in r.s.iter().zip(&r.w) {
                let off = h * s;
                visit(self.point(off), w * hp / off.powf(self.exp));
            }
        } else {
            let r = unit_rule(n, 0.0, 0.0)?;
            for (&s, &w) in r.s.iter().zip(&r.w) {
                visit(self.point(self.lo + h * s), w * h);
            }
        }
        Ok(())
    }

    fn apply(&self, n: usize, f: &dyn Fn(Point) -> f64) -> Result<f64> {
        let mut acc = 0.0;
        self.rule(n, |p, w| acc += w * f(p))?;
        Ok(acc)
    }
}

/// Splits `[u, v]` into the two half-pieces anchored at its ends.
fn split_interval(u: f64, eu: f64, v: f64, ev: f64) -> [Piece; 2] {
    let h = 0.5 * (v - u);
    [
        Piece { anchor: u, dir: 1.0, lo: 0.0, hi: h, exp: eu },
        Piece { anchor: v, dir: -1.0, lo: 0.0, hi: h, exp: ev },
    ]
}

struct Scored {
    piece: Piece,
    value: f64,
    error: f64,
    halves: (f64, f64),
    seq: usize,
}

impl PartialEq for Scored {
    fn eq(&self, o: &Self) -> bool {
        self.cmp(o) == Ordering::Equal
    }
}
impl Eq for Scored {}
impl PartialOrd for Scored {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Scored {
    fn cmp(&self, o: &Self) -> Ordering {
        self.error.total_cmp(&o.error).then(o.seq.cmp(&self.seq))
    }
}

fn score(piece: Piece, coarse: f64, f: &dyn Fn(Point) -> f64, seq: usize) -> Result<Scored> {
    let (l, r) = piece.halves();
    let ql = l.apply(PANEL_NODES, f)?;
    let qr = r.apply(PANEL_NODES, f)?;
    let value = ql + qr;
    Ok(Scored { piece, value, error: (coarse - value).abs(), halves: (ql, qr), seq })
}

/// Globally adaptive integration over a set of pieces: the piece with the
/// largest error estimate is bisected until the total estimate meets `tol`.
fn adaptive(pieces: Vec<Piece>, f: &dyn Fn(Point) -> f64, tol: f64, rel: f64) -> Result<(Estimate, Vec<Piece>)> {
    let budget = PANEL_BUDGET.max(32 * pieces.len());
    let mut heap = BinaryHeap::new();
    let mut seq = 0;
    for p in pieces {
        let coarse = p.apply(PANEL_NODES, f)?;
        heap.push(score(p, coarse, f, seq)?);
        seq += 1;
    }
    let total_error = |h: &BinaryHeap<Scored>| h.iter().map(|s| s.error).sum::<f64>();
    let mut err = total_error(&heap);
    let mut splits = 0usize;
    loop {
        let abs_scale: f64 = heap.iter().map(|s| s.value.abs()).sum();
        if !err.is_finite() {
            let value: f64 = heap.iter().map(|s| s.value).sum();
            return Err(Error::QuadratureNonConvergence { value, error: err, panels: heap.len() });
        }
        if err <= tol.max(rel * abs_scale) {
            break;
        }
        if heap.len() >= budget {
            let value = sorted_sum(&heap);
            return Err(Error::QuadratureNonConvergence { value, error: err, panels: heap.len() });
        }
        let worst = heap.pop().expect("heap is nonempty");
        let (l, r) = worst.piece.halves();
        let sl = score(l, worst.halves.0, f, seq)?;
        let sr = score(r, worst.halves.1, f, seq + 1)?;
        seq += 2;
        err += sl.error + sr.error - worst.error;
        heap.push(sl);
        heap.push(sr);
        splits += 1;
        if splits.is_multiple_of(64) {
            err = total_error(&heap);
        }
    }
    let est = Estimate { value: sorted_sum(&heap), error: total_error(&heap) };
    let mut scored = heap.into_vec();
    scored.sort_by_key(|s| s.seq);
    Ok((est, scored.into_iter().map(|s| s.piece).collect()))
}

/// Sum in a fixed order so results do not depend on heap layout.
fn sorted_sum(heap: &BinaryHeap<Scored>) -> f64 {
    let mut v: Vec<(usize, f64)> = heap.iter().map(|s| (s.seq, s.value)).collect();
    v.sort_by_key(|x| x.0);
    v.iter().map(|x| x.1).sum()
}

/// Composite rule on `[u, v]`, bisected until every piece is at least its
/// own length away from the outside singularities.
///
/// `eu`, `ev` are algebraic exponents at the ends; `du`, `dv` are distances
/// from each end to the nearest singularity of the integrand outside `[u, v]`.
/// Weights multiply full integrand values.
pub(crate) fn graded_rule(
    (u, eu, du): (f64, f64, f64),
    (v, ev, dv): (f64, f64, f64),
    visit: &mut impl FnMut(Point, f64),
) -> Result<()> {
    let len = v - u;
    if (du >= len && dv >= len) || len <= 1e-15 * u.abs().max(v.abs()) {
        let r = unit_rule(GRADED_NODES, eu, ev)?;
        let scale = len.powf(eu + ev + 1.0);
        for ((&s, &sr), &w) in r.s.iter().zip(&r.sr).zip(&r.w) {
            let (ou, ov) = (len * s, len * sr);
            let p = if s <= 0.5 {
                Point { x: u + ou, anchor: u, offset: ou }
            } else {
                Point { x: v - ov, anchor: v, offset: -ov }
            };
            visit(p, w * scale / (ou.powf(eu) * ov.powf(ev)));
        }
        return Ok(());
    }
    let m = u + 0.5 * len;
    graded_rule((u, eu, du), (m, 0.0, dv + 0.5 * len), visit)?;
    graded_rule((m, 0.0, du + 0.5 * len), (v, ev, dv), visit)
}

/// Breakpoints of a band: declared singular points of the density and of the
/// integrand lying in `[a, b]`, with summed exponents.
fn band_breakpoints(a: f64, b: f64, density: &[Singularity], extra: &[Singularity]) -> Vec<Singularity> {
    let mut pts: Vec<Singularity> = vec![];
    for s in density.iter().chain(extra) {
        if s.location < a || s.location > b {
            continue;
        }
        match pts.iter_mut().find(|q| q.location == s.location) {
            Some(q) => q.exponent += s.exponent,
            None => pts.push(*s),
        }
    }
    for e in [a, b] {
        if !pts.iter().any(|q| q.location == e) {
            pts.push(Singularity::new(e, 0.0));
        }
    }
    pts.sort_by(|x, y| x.location.total_cmp(&y.location));
    pts
}

fn ac_pieces(ac: &AbsCont, extra: &[Singularity]) -> Vec<Piece> {
    let sing = ac.singular_points();
    let mut pieces = vec![];
    for &(a, b) in ac.support().bands() {
        let pts = band_breakpoints(a, b, &sing, extra);
        for w in pts.windows(2) {
            pieces.extend(split_interval(w[0].location, w[0].exponent, w[1].location, w[1].exponent));
        }
    }
    pieces
}

/// `int f w dx` over the a.c. part. `f_sing` declares singular points of `f`
/// (a zero exponent marks a breakpoint, e.g. a logarithmic singularity).
pub(crate) fn integrate_ac(
    ac: &AbsCont,
    f: &dyn Fn(Point) -> f64,
    f_sing: &[Singularity],
    tol: f64,
) -> Result<Estimate> {
    let integrand = |p: Point| {
        let w = ac.density(&p);
        if w == 0.0 {
            0.0
        } else {
            f(p) * w
        }
    };
    Ok(adaptive(ac_pieces(ac, f_sing), &integrand, tol, 1e-15)?.0)
}

/// Quadrature nodes with their weights.
type Nodes = Vec<(f64, f64)>;

/// `int f dmu`: adaptive quadrature on the a.c. part, exact summation over atoms.
pub fn integrate(f: impl Fn(Point) -> f64, f_sing: &[Singularity], mu: &Measure, tol: f64) -> Result<Estimate> {
    let mut est = match mu.ac() {
        Some(ac) => integrate_ac(ac, &f, f_sing, tol)?,
        None => Estimate { value: 0.0, error: 0.0 },
    };
    for a in mu.atoms() {
        est.value += a.mass * f(Point { x: a.location, anchor: a.location, offset: 0.0 });
    }
    Ok(est)
}

/// A composite rule for `mu` adapted to `driver`: nodes carry weights that
/// already include the density, atoms carry their masses. The rule integrates
/// any integrand with the same singular structure as `driver` to roughly
/// relative accuracy `rel`.
pub(crate) fn adapted_rule(
    mu: &Measure,
    driver: &dyn Fn(Point) -> f64,
    f_sing: &[Singularity],
    rel: f64,
) -> Result<Vec<(Point, f64)>> {
    let mut out = vec![];
    if let Some(ac) = mu.ac() {
        let integrand = |p: Point| {
            let w = ac.density(&p);
            if w == 0.0 {
                0.0
            } else {
                driver(p) * w
            }
        };
        let (_, pieces) = adaptive(ac_pieces(ac, f_sing), &integrand, 0.0, rel)?;
        for piece in pieces {
            let (l, r) = piece.halves();
            for half in [l, r] {
                half.rule(PANEL_NODES, |p, w| {
                    let d = ac.density(&p);
                    if d > 0.0 {
                        out.push((p, w * d));
                    }
                })?;
            }
        }
    }
    for a in mu.atoms() {
        out.push((Point { x: a.location, anchor: a.location, offset: 0.0 }, a.mass));
    }
    Ok(out)
}

/// As [`integrate`], with the a.c. part converged to relative accuracy `rel`.
pub fn integrate_relative(f: impl Fn(Point) -> f64, f_sing: &[Singularity], mu: &Measure, rel: f64) -> Result<Estimate> {
    let mut est = match mu.ac() {
        Some(ac) => {
            let integrand = |p: Point| {
                let w = ac.density(&p);
                if w == 0.0 {
                    0.0
                } else {
                    f(p) * w
                }
            };
            adaptive(ac_pieces(ac, f_sing), &integrand, 0.0, rel)?.0
        }
        None => Estimate { value: 0.0, error: 0.0 },
    };
    for a in mu.atoms() {
        est.value += a.mass * f(Point { x: a.location, anchor: a.location, offset: 0.0 });
    }
    Ok(est)
}

/// Logarithmic potential `int log|x - z| dmu(x)`.
pub fn log_potential(mu: &Measure, z: f64) -> Result<f64> {
    log_potential_tol(mu, z, INNER_TOL)
}

pub(crate) fn log_potential_tol(mu: &Measure, z: f64, tol: f64) -> Result<f64> {
    if mu.atoms().iter().any(|a| a.location == z) {
        return Err(Error::AtomSingularity(z));
    }
    let brk = [Singularity::new(z, 0.0)];
    Ok(integrate(|p| p.dist(z).ln(), &brk, mu, tol)?.value)
}

/// A finitely supported measure: nodes with positive weights.
#[derive(Clone, Debug, PartialEq)]
pub struct DiscreteMeasure {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl DiscreteMeasure {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn mass(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }
}

/// Chebyshev polynomials `T_0..T_deg` of the affinely normalized variable.
fn chebyshev_row(t: f64, deg: usize, out: &mut [f64]) {
    out[0] = 1.0;
    if deg >= 1 {
        out[1] = t;
    }
    for k in 2..=deg {
        out[k] = 2.0 * t * out[k - 1] - out[k - 2];
    }
}

/// Discrete measure whose moments up to `degree` agree with those of `mu`.
///
/// Each stretch between consecutive singular points is covered by two
/// half-pieces carrying Gauss-Jacobi rules with the local endpoint exponent,
/// `degree + 20` nodes each. A piece is accepted once its Chebyshev moments
/// agree with those of its two halves to `1e-14`; otherwise it is bisected.
pub fn discretize(mu: &Measure, degree: usize) -> Result<DiscreteMeasure> {
    let mut out = DiscreteMeasure { nodes: vec![], weights: vec![] };
    if let Some(ac) = mu.ac() {
        let (lo, hi) = ac.support().hull();
        let (c, r) = (0.5 * (lo + hi), 0.5 * (hi - lo));
        let m = degree + 20;
        let mut stack: Vec<(Piece, usize)> = ac_pieces(ac, &[]).into_iter().rev().map(|p| (p, 0)).collect();
        let mut row = vec![0.0; degree + 1];
        let moments = |piece: &Piece, row: &mut Vec<f64>| -> Result<(Vec<f64>, Nodes)> {
            let mut mom = vec![0.0; degree + 1];
            let mut nodes = Vec::with_capacity(m);
            piece.rule(m, |p, w| {
                let wt = w * ac.density(&p);
                nodes.push((p.x, wt));
                chebyshev_row((p.x - c) / r, degree, row);
                for (acc, t) in mom.iter_mut().zip(row.iter()) {
                    *acc += wt * t;
                }
            })?;
            Ok((mom, nodes))
        };
        while let Some((piece, depth)) = stack.pop() {
            let (whole, _) = moments(&piece, &mut row)?;
            let (l, rr) = piece.halves();
            let (ml, nl) = moments(&l, &mut row)?;
            let (mr, nr) = moments(&rr, &mut row)?;
            let diff = whole
                .iter()
                .zip(ml.iter().zip(&mr))
                .map(|(w, (a, b))| (w - a - b).abs())
                .fold(0.0, f64::max);
            if !diff.is_finite() {
                return Err(Error::QuadratureNonConvergence { value: f64::NAN, error: diff, panels: out.len() });
            }
            if diff <= 1e-14 || depth >= 60 {
                if depth >= 60 {
                    return Err(Error::QuadratureNonConvergence { value: f64::NAN, error: diff, panels: out.len() });
                }
                for (x, w) in nl.into_iter().chain(nr) {
                    out.nodes.push(x);
                    out.weights.push(w);
                }
            } else {
                stack.push((rr, depth + 1));
                stack.push((l, depth + 1));
            }
        }
    }
    for a in mu.atoms() {
        out.nodes.push(a.location);
        out.weights.push(a.mass);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::{jacobi_measure, FiniteGapSet, Measure};
    use std::f64::consts::PI;

    fn arcsine(a: f64, b: f64) -> Measure {
        Measure::equilibrium(FiniteGapSet::interval(a, b).unwrap(), vec![]).unwrap()
    }

    #[test]
    fn one_point_legendre() {
        let r = gauss_jacobi_rule(1, -1.0, 1.0, 0.0, 0.0).unwrap();
        assert!(r.nodes[0].abs() < 1e-15);
        assert!((r.weights[0] - 2.0).abs() < 1e-14);
    }

    #[test]
    fn gauss_chebyshev_nodes() {
        let n = 9;
        let r = gauss_jacobi_rule(n, -1.0, 1.0, -0.5, -0.5).unwrap();
        for (k, (&x, &w)) in r.nodes.iter().zip(&r.weights).enumerate() {
            let j = n - k;
            let expect = ((2 * j - 1) as f64 * PI / (2 * n) as f64).cos();
            assert!((x - expect).abs() < 1e-14, "{x} vs {expect}");
            assert!((w - PI / n as f64).abs() < 1e-14);
        }
        // exact to degree 2n - 1: int x^{2k} (1-x^2)^{-1/2} = pi (2k)! / (4^k k!^2)
        for k in 0..n {
            let got = r.apply(|x| x.powi(2 * k as i32));
            let mut expect = PI;
            for j in 1..=k {
                expect *= (2 * j - 1) as f64 / (2 * j) as f64;
            }
            assert!((got - expect).abs() < 1e-13);
        }
    }

    #[test]
    fn symmetric_rule_is_symmetric() {
        let r = gauss_jacobi_rule(8, 2.0, 6.0, 0.3, 0.3).unwrap();
        for i in 0..8 {
            assert!((r.nodes[i] + r.nodes[7 - i] - 8.0).abs() < 1e-13);
        }
    }

    #[test]
    fn weights_sum_to_reference_mass() {
        for &(l, rr) in &[(0.0, 0.0), (-0.9, 2.0), (1.5, -0.5), (5.0, 5.0)] {
            let r = gauss_jacobi_rule(15, -0.5, 2.5, l, rr).unwrap();
            let s: f64 = r.weights.iter().sum();
            assert!((s - r.reference_mass()).abs() < 1e-12 * r.reference_mass());
        }
        assert!(gauss_jacobi_rule(4, 0.0, 1.0, -1.0, 0.0).is_err());
    }

    #[test]
    fn unit_function_integrates_to_one() {
        let m = jacobi_measure(1.5, -0.7).unwrap();
        let e = integrate(|_| 1.0, &[], &m, DEFAULT_TOL).unwrap();
        assert!((e.value - 1.0).abs() < 1e-12);
        assert!(e.error <= DEFAULT_TOL);
    }

    #[test]
    fn arcsine_second_moment() {
        let m = arcsine(-1.0, 1.0);
        let e = integrate(|p| p.x * p.x, &[], &m, DEFAULT_TOL).unwrap();
        assert!((e.value - 0.5).abs() < 1e-12);
    }

    #[test]
    fn log_on_equilibrium_of_minus_two_two() {
        let m = arcsine(-2.0, 2.0);
        let brk = [Singularity::new(0.0, 0.0)];
        let e = integrate(|p| p.dist(0.0).ln(), &brk, &m, 1e-13).unwrap();
        assert!(e.value.abs() < 1e-11, "{}", e.value);
    }

    #[test]
    fn potential_examples() {
        let m = arcsine(-2.0, 2.0);
        assert!(log_potential(&m, 0.0).unwrap().abs() < 1e-11);
        assert!(log_potential(&m, 1.3).unwrap().abs() < 1e-11);
        let expect = ((4.0f64 + 12f64.sqrt()) / 2.0).ln();
        assert!((log_potential(&m, 4.0).unwrap() - expect).abs() < 1e-11);
        let atom = Measure::point_mass(3.0);
        assert!((log_potential(&atom, 5.0).unwrap() - 2f64.ln()).abs() < 1e-15);
        assert!(matches!(log_potential(&atom, 3.0), Err(Error::AtomSingularity(_))));
    }

    #[test]
    fn potential_concave_off_support() {
        let m = jacobi_measure(0.3, 1.2).unwrap();
        let h = 0.05;
        for z in [1.2, 1.6, 2.5] {
            let d2 = log_potential(&m, z + h).unwrap() - 2.0 * log_potential(&m, z).unwrap()
                + log_potential(&m, z - h).unwrap();
            assert!(d2 <= 1e-12);
        }
    }

    #[test]
    fn affine_substitution() {
        let m = jacobi_measure(0.4, -0.3).unwrap();
        let (s, t) = (2.5, -0.7);
        let img = m.affine(s, t).unwrap();
        let f = |x: f64| (1.3 * x).sin() + x * x;
        let a = integrate(|p| f(p.x), &[], &m, DEFAULT_TOL).unwrap().value;
        let b = integrate(|p| f((p.x - t) / s), &[], &img, DEFAULT_TOL).unwrap().value;
        assert!((a - b).abs() < 1e-10);
    }

    #[test]
    fn refinement_is_monotone_on_analytic_integrand() {
        let exact = {
            // int_{-1}^{1} e^x dx
            1f64.exp() - (-1f64).exp()
        };
        let mut prev = f64::INFINITY;
        for n in [1, 2, 4, 8] {
            let r = gauss_jacobi_rule(n, -1.0, 1.0, 0.0, 0.0).unwrap();
            let err = (r.apply(f64::exp) - exact).abs();
            assert!(err <= prev);
            prev = err;
        }
    }

    #[test]
    fn discretize_reproduces_moments() {
        let m = jacobi_measure(-0.5, -0.5).unwrap();
        let d = discretize(&m, 20).unwrap();
        assert!((d.mass() - 1.0).abs() < 1e-13);
        assert!((d.integrate(|x| x * x) - 0.5).abs() < 1e-13);
        assert!((d.integrate(|x| x.powi(4)) - 0.375).abs() < 1e-13);
        assert!(d.weights.iter().all(|&w| w > 0.0));
    }
}
