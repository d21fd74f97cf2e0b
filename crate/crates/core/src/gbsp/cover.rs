//! Empirical covering counts for `S(φ, δ) = {y ∈ B(x, α) : |φ(y)| < ‖∇φ(x)‖δ}`.
//!
//! The cube `x + α[-1,1]^d` is cut into a dyadic grid; a cell counts at scale
//! `δ` (cell side `δ`) when it meets the open ball and the interval enclosure
//! of `φ` over it meets `(-ρ, ρ)`, `ρ = ‖∇φ(x)‖δ`. Both tests are exact and
//! monotone under refinement, so one descent serves every rung of the ladder.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::definiteness::interval::{enclose, Interval};
use crate::error::{check_dim, contract, Error, Result};
use crate::manifolds::ManifoldSpec;
use crate::poly::Poly;
use crate::rational::{self, format_rational, int, Rational};

#[derive(Clone, Debug)]
pub struct CoverProbe {
    pub phi: Poly,
    pub center: Vec<Rational>,
    pub alpha: Rational,
    /// Constant in `‖∇φ(x)‖ ≥ C·α·sup‖∇²φ‖`.
    pub c: Rational,
    /// Fail instead of reporting when the precondition does not hold.
    pub strict: bool,
}

impl CoverProbe {
    pub fn new(phi: Poly, center: Vec<Rational>, alpha: Rational) -> Self {
        CoverProbe { phi, center, alpha, c: int(4), strict: false }
    }
}

/// `φ(x) = r·x + s·g(x) − a` for a manifold `(x, g(x))`.
pub fn probe_phi(spec: &ManifoldSpec, r: &[Rational], s: &[Rational], a: &Rational) -> Result<Poly> {
    let dim = spec.n - spec.l;
    check_dim(dim, r.len())?;
    check_dim(spec.l, s.len())?;
    let mut phi = Poly::constant(dim, -a);
    for (i, ri) in r.iter().enumerate() {
        phi = &phi + &Poly::var(dim, i).scale(ri);
    }
    for (g, su) in spec.system.forms().iter().zip(s) {
        phi = &phi + &g.scale(su);
    }
    Ok(phi)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Precondition {
    pub statement: String,
    pub holds: bool,
    /// `‖∇φ(x)‖²`.
    #[serde(with = "rational::as_string")]
    pub gradient_norm_sq: Rational,
    /// `C²α²·‖H‖₁‖H‖∞`, an upper bound for `(C·α·sup‖∇²φ‖)²`.
    #[serde(with = "rational::as_string")]
    pub bound_sq: Rational,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoverLevel {
    #[serde(with = "rational::as_string")]
    pub delta: Rational,
    pub ratio: f64,
    pub count: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoverReport {
    pub dim: usize,
    pub expected_slope: usize,
    pub slope: f64,
    pub levels: Vec<CoverLevel>,
    pub precondition: Precondition,
}

/// Sparse polynomial with `i128` coefficients in grid coordinates.
struct IntPoly {
    terms: Vec<(Vec<u32>, i128)>,
    max_deg: Vec<u32>,
}

impl IntPoly {
    fn enclose(&self, lo: &[i64], hi: &[i64]) -> (i128, i128) {
        let d = lo.len();
        // powers[v][e] = range of t_v^e
        let mut powers: Vec<Vec<(i128, i128)>> = Vec::with_capacity(d);
        for v in 0..d {
            let (a, b) = (lo[v] as i128, hi[v] as i128);
            let mut p = vec![(1i128, 1i128)];
            let (mut pa, mut pb) = (1i128, 1i128);
            for e in 1..=self.max_deg[v] {
                pa *= a;
                pb *= b;
                let r = if e % 2 == 1 || a >= 0 {
                    (pa, pb)
                } else if b <= 0 {
                    (pb, pa)
                } else {
                    (0, pa.max(pb))
                };
                p.push(r);
            }
            powers.push(p);
        }
        let (mut tlo, mut thi) = (0i128, 0i128);
        for (exp, c) in &self.terms {
            let (mut lo, mut hi) = (*c, *c);
            for (v, &e) in exp.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let (a, b) = powers[v][e as usize];
                let cands = [lo * a, lo * b, hi * a, hi * b];
                lo = *cands.iter().min().expect("four");
                hi = *cands.iter().max().expect("four");
            }
            tlo += lo;
            thi += hi;
        }
        (tlo, thi)
    }
}

struct Grid {
    poly: IntPoly,
    dim: usize,
    /// Finest level; the grid has `2^finest` cells per axis, coordinates in `[-N/2, N/2]`.
    finest: u32,
    half: i64,
    /// `thresholds[k]` is the least integer `≥ D·ρ_k`.
    thresholds: Vec<i128>,
}

impl Grid {
    fn passes(&self, lo: &[i64], level: u32) -> bool {
        let side = 1i64 << (self.finest - level);
        let mut dist = 0i128;
        let mut hi = Vec::with_capacity(self.dim);
        for &a in lo {
            let b = a + side;
            let g = if a > 0 { a } else if b < 0 { -b } else { 0 };
            dist += (g as i128) * (g as i128);
            hi.push(b);
        }
        if dist >= (self.half as i128) * (self.half as i128) {
            return false;
        }
        let (elo, ehi) = self.poly.enclose(lo, &hi);
        let m = self.thresholds[level as usize];
        elo < m && ehi > -m
    }

    fn descend(&self, lo: &mut Vec<i64>, level: u32, counts: &mut [u64]) {
        if !self.passes(lo, level) {
            return;
        }
        counts[level as usize] += 1;
        if level == self.finest {
            return;
        }
        let half_side = 1i64 << (self.finest - level - 1);
        let base = lo.clone();
        for mask in 0u32..(1 << self.dim) {
            for v in 0..self.dim {
                lo[v] = base[v] + if mask & (1 << v) != 0 { half_side } else { 0 };
            }
            self.descend(lo, level + 1, counts);
        }
        lo.copy_from_slice(&base);
    }

    fn cells_at(&self, level: u32) -> Vec<Vec<i64>> {
        let mut frontier = vec![vec![-self.half; self.dim]];
        for k in 0..level {
            let half_side = 1i64 << (self.finest - k - 1);
            frontier = frontier
                .into_iter()
                .filter(|c| self.passes(c, k))
                .flat_map(|c| {
                    (0u32..(1 << self.dim)).map(move |mask| {
                        c.iter()
                            .enumerate()
                            .map(|(v, &x)| x + if mask & (1 << v) != 0 { half_side } else { 0 })
                            .collect()
                    })
                })
                .collect();
        }
        frontier
    }
}

fn ceil_sqrt(r: &Rational) -> BigInt {
    // Least m with m² ≥ r.
    let (num, den) = (r.numer(), r.denom());
    let mut m = (num / den).sqrt();
    while &(&m * &m) * den < *num {
        m += 1;
    }
    m
}

fn log2_exact(r: &Rational) -> Option<u32> {
    if !r.is_integer() {
        return None;
    }
    let v = r.to_integer().to_u64()?;
    (v.is_power_of_two()).then(|| v.trailing_zeros())
}

fn precondition(probe: &CoverProbe, gradient_norm_sq: &Rational) -> Result<Precondition> {
    let d = probe.phi.vars();
    let domain: Vec<Interval> = probe
        .center
        .iter()
        .map(|x| Interval::new(x - &probe.alpha, x + &probe.alpha))
        .collect();
    let mut bound = vec![vec![Rational::zero(); d]; d];
    for (i, row) in bound.iter_mut().enumerate() {
        let di = probe.phi.derivative(i);
        for (j, b) in row.iter_mut().enumerate() {
            let h = enclose(&di.derivative(j), &domain);
            *b = if h.lo.abs() > h.hi.abs() { h.lo.abs() } else { h.hi.abs() };
        }
    }
    let max = |v: Vec<Rational>| v.into_iter().fold(Rational::zero(), |m, x| if x > m { x } else { m });
    let norm1 = max((0..d).map(|j| (0..d).map(|i| bound[i][j].clone()).sum()).collect());
    let norm_inf = max(bound.iter().map(|r| r.iter().cloned().sum()).collect());
    let bound_sq = &probe.c * &probe.c * &probe.alpha * &probe.alpha * norm1 * norm_inf;
    Ok(Precondition {
        statement: format!(
            "‖∇φ(x)‖ ≥ C·α·sup‖∇²φ‖ with C = {}, α = {}",
            format_rational(&probe.c),
            format_rational(&probe.alpha)
        ),
        holds: gradient_norm_sq >= &bound_sq,
        gradient_norm_sq: gradient_norm_sq.clone(),
        bound_sq,
    })
}

/// Counts grid cells meeting `S(φ, δ)` for each `δ` in `ladder` (each must
/// satisfy `2α/δ = 2^k`, `k ≥ 1`) and fits the slope of `log count` against
/// `log(α/δ)`.
pub fn covering_count(probe: &CoverProbe, ladder: &[Rational]) -> Result<CoverReport> {
    let d = probe.phi.vars();
    if d < 2 {
        return contract("the covering probe needs dimension at least 2");
    }
    check_dim(d, probe.center.len())?;
    if !probe.alpha.is_positive() || !probe.c.is_positive() {
        return contract("α and C must be positive");
    }
    if ladder.len() < 2 {
        return contract("the δ-ladder needs at least two rungs");
    }
    let gradient: Vec<Rational> = (0..d)
        .map(|i| probe.phi.derivative(i).evaluate(&probe.center))
        .collect::<Result<_>>()?;
    let grad_sq: Rational = gradient.iter().map(|g| g * g).sum();
    if grad_sq.is_zero() {
        return contract("∇φ(x) = 0: the set S(φ, δ) is empty");
    }
    let pre = precondition(probe, &grad_sq)?;
    if probe.strict && !pre.holds {
        return Err(Error::Precondition(format!(
            "{} fails: ‖∇φ(x)‖² = {} < {}",
            pre.statement,
            format_rational(&pre.gradient_norm_sq),
            format_rational(&pre.bound_sq)
        )));
    }
    let mut levels = Vec::with_capacity(ladder.len());
    for delta in ladder {
        if !delta.is_positive() || delta > &probe.alpha {
            return contract(format!("δ = {} must lie in (0, α]", format_rational(delta)));
        }
        match log2_exact(&(int(2) * &probe.alpha / delta)) {
            Some(k) if k <= 24 => levels.push(k),
            _ => return contract(format!("2α/δ must be a power of two up to 2^24 (δ = {})", format_rational(delta))),
        }
    }
    let finest = *levels.iter().max().expect("nonempty");
    let n_cells = 1i64 << finest;
    let half = n_cells / 2;

    // ψ(t) = φ(x + (2α/N)·t) on the integer grid t ∈ [-N/2, N/2]^d.
    let step = int(2) * &probe.alpha / int(n_cells);
    let images: Vec<Poly> = (0..d)
        .map(|i| &Poly::constant(d, probe.center[i].clone()) + &Poly::var(d, i).scale(&step))
        .collect();
    let psi = probe.phi.substitute(&images)?;
    let den = psi.terms().fold(BigInt::one(), |acc, (_, c)| acc.lcm(c.denom()));
    let scale = Rational::from_integer(den.clone());
    let mut magnitude = Rational::zero();
    let mut terms = Vec::new();
    let mut max_deg = vec![0u32; d];
    for (m, c) in psi.terms() {
        let v = (c * &scale).to_integer();
        magnitude += Rational::from_integer(v.abs()) * num_traits::pow(int(half + 1), m.degree() as usize);
        let v = v.to_i128().ok_or_else(|| Error::Contract("grid polynomial coefficients overflow".into()))?;
        for (k, &e) in m.exponents().iter().enumerate() {
            max_deg[k] = max_deg[k].max(e);
        }
        terms.push((m.exponents().to_vec(), v));
    }
    if magnitude > Rational::from_integer(BigInt::one() << 100) {
        return contract("grid polynomial values would overflow; use a coarser ladder");
    }
    let thresholds = (0..=finest)
        .map(|k| {
            let delta_k = int(2) * &probe.alpha / int(1i64 << k);
            let r_sq = &scale * &scale * &grad_sq * &delta_k * &delta_k;
            ceil_sqrt(&r_sq).to_i128().ok_or_else(|| Error::Contract("threshold overflow".into()))
        })
        .collect::<Result<Vec<_>>>()?;
    let grid = Grid { poly: IntPoly { terms, max_deg }, dim: d, finest, half, thresholds };

    // Expand the top levels serially, then descend the subtrees in parallel.
    let split = finest.min(2);
    let mut counts = vec![0u64; finest as usize + 1];
    for k in 0..split {
        counts[k as usize] = grid.cells_at(k).iter().filter(|c| grid.passes(c, k)).count() as u64;
    }
    let frontier = grid.cells_at(split);
    let partial: Vec<Vec<u64>> = frontier
        .par_iter()
        .map(|cell| {
            let mut local = vec![0u64; finest as usize + 1];
            grid.descend(&mut cell.clone(), split, &mut local);
            local
        })
        .collect();
    for p in partial {
        for (c, x) in counts.iter_mut().zip(p) {
            *c += x;
        }
    }

    let report_levels: Vec<CoverLevel> = ladder
        .iter()
        .zip(&levels)
        .map(|(delta, &k)| CoverLevel {
            delta: delta.clone(),
            ratio: rational::to_f64(&(&probe.alpha / delta)),
            count: counts[k as usize],
        })
        .collect();
    Ok(CoverReport {
        dim: d,
        expected_slope: d - 1,
        slope: fit_slope(&report_levels),
        levels: report_levels,
        precondition: pre,
    })
}

/// Least-squares slope of `ln count` against `ln(α/δ)`; NaN if a count is zero.
fn fit_slope(levels: &[CoverLevel]) -> f64 {
    let pts: Vec<(f64, f64)> = levels.iter().map(|l| (l.ratio.ln(), (l.count as f64).ln())).collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    fn ladder(lo: u32, hi: u32) -> Vec<Rational> {
        (lo..=hi).map(|k| ratio(1, 1 << k)).collect()
    }

    #[test]
    fn slab_slope_is_one() {
        let phi = Poly::var(2, 0);
        let probe = CoverProbe::new(phi, vec![int(0), int(0)], int(1));
        let r = covering_count(&probe, &ladder(3, 9)).unwrap();
        assert!(r.precondition.holds);
        assert!((r.slope - 1.0).abs() < 0.1, "slope {}", r.slope);
    }

    #[test]
    fn counts_grow_with_resolution() {
        let phi = Poly::from_int_terms(2, &[(&[1, 0], 1), (&[2, 0], 1), (&[0, 2], -1)]).unwrap();
        let probe = CoverProbe::new(phi, vec![int(0), int(0)], int(1));
        let r = covering_count(&probe, &ladder(2, 6)).unwrap();
        assert!(r.levels.windows(2).all(|w| w[0].count < w[1].count));
        assert!(!r.precondition.holds);
    }

    #[test]
    fn strict_mode_names_the_inequality() {
        let phi = Poly::from_int_terms(2, &[(&[1, 0], 1), (&[2, 0], 1)]).unwrap();
        let mut probe = CoverProbe::new(phi, vec![int(0), int(0)], int(1));
        probe.strict = true;
        let err = covering_count(&probe, &ladder(3, 5)).unwrap_err().to_string();
        assert!(err.contains("‖∇φ(x)‖ ≥ C·α·sup‖∇²φ‖"), "{err}");
    }

    #[test]
    fn rejects_bad_ladders() {
        let probe = CoverProbe::new(Poly::var(2, 0), vec![int(0), int(0)], int(1));
        assert!(covering_count(&probe, &[ratio(1, 3), ratio(1, 8)]).is_err());
        assert!(covering_count(&probe, &[int(2), ratio(1, 8)]).is_err());
        let flat = CoverProbe::new(Poly::from_int_terms(2, &[(&[2, 0], 1)]).unwrap(), vec![int(0), int(0)], int(1));
        assert!(covering_count(&flat, &ladder(3, 5)).is_err());
    }
}
