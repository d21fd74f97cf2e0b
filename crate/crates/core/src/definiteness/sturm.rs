//! Dense univariate polynomials over the rationals (coefficients lowest
//! degree first) and Sturm-sequence root counting.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::rational::{sign, Rational};

pub type UPoly = Vec<Rational>;

pub fn trim(mut p: UPoly) -> UPoly {
    while p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
    p
}

/// Degree, or `None` for the zero polynomial.
pub fn degree(p: &[Rational]) -> Option<usize> {
    p.iter().rposition(|c| !c.is_zero())
}

pub fn eval(p: &[Rational], x: &Rational) -> Rational {
    p.iter().rev().fold(Rational::zero(), |acc, c| acc * x + c)
}

pub fn derivative(p: &[Rational]) -> UPoly {
    trim(
        p.iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| c * Rational::from_integer(BigInt::from(k)))
            .collect(),
    )
}

/// Quotient and remainder of `a / b`, `b` nonzero.
pub fn div_rem(a: &[Rational], b: &[Rational]) -> (UPoly, UPoly) {
    let db = degree(b).expect("division by zero polynomial");
    let mut rem = trim(a.to_vec());
    let lead = b[db].clone();
    let mut quot = vec![Rational::zero(); rem.len().saturating_sub(db).max(1)];
    while let Some(dr) = degree(&rem) {
        if dr < db {
            break;
        }
        let shift = dr - db;
        let factor = &rem[dr] / &lead;
        for (k, c) in b.iter().enumerate().take(db + 1) {
            rem[k + shift] -= &factor * c;
        }
        quot[shift] = factor;
        rem = trim(rem);
    }
    (trim(quot), rem)
}

pub fn gcd(a: &[Rational], b: &[Rational]) -> UPoly {
    let mut x = trim(a.to_vec());
    let mut y = trim(b.to_vec());
    while degree(&y).is_some() {
        let (_, r) = div_rem(&x, &y);
        x = y;
        y = r;
    }
    monic(x)
}

pub fn monic(p: UPoly) -> UPoly {
    match degree(&p) {
        None => p,
        Some(d) => {
            let lead = p[d].clone();
            p.into_iter().map(|c| c / &lead).collect()
        }
    }
}

/// `p / gcd(p, p')`: same real roots, all simple.
pub fn square_free(p: &[Rational]) -> UPoly {
    let g = gcd(p, &derivative(p));
    if degree(&g).unwrap_or(0) == 0 {
        return monic(trim(p.to_vec()));
    }
    monic(div_rem(p, &g).0)
}

pub fn sturm_sequence(p: &[Rational]) -> Vec<UPoly> {
    let p = trim(p.to_vec());
    let mut seq = vec![p.clone()];
    if degree(&p).is_none() {
        return seq;
    }
    let mut next = derivative(&p);
    while degree(&next).is_some() {
        seq.push(next);
        let k = seq.len();
        let (_, r) = div_rem(&seq[k - 2], &seq[k - 1]);
        next = r.into_iter().map(|c| -c).collect();
        next = trim(next);
    }
    seq
}

fn sign_changes(signs: impl Iterator<Item = i8>) -> usize {
    let mut last = 0i8;
    let mut changes = 0;
    for s in signs.filter(|&s| s != 0) {
        if last != 0 && s != last {
            changes += 1;
        }
        last = s;
    }
    changes
}

fn changes_at(seq: &[UPoly], x: &Rational) -> usize {
    sign_changes(seq.iter().map(|q| sign(&eval(q, x))))
}

fn changes_at_infinity(seq: &[UPoly], positive: bool) -> usize {
    sign_changes(seq.iter().map(|q| match degree(q) {
        None => 0,
        Some(d) => {
            let s = sign(&q[d]);
            if positive || d % 2 == 0 {
                s
            } else {
                -s
            }
        }
    }))
}

/// Number of distinct real roots.
pub fn count_real_roots(p: &[Rational]) -> usize {
    let seq = sturm_sequence(p);
    changes_at_infinity(&seq, false) - changes_at_infinity(&seq, true)
}

/// Number of distinct real roots in the half-open interval `(lo, hi]`.
pub fn count_roots_in(p: &[Rational], lo: &Rational, hi: &Rational) -> usize {
    let seq = sturm_sequence(p);
    changes_at(&seq, lo).saturating_sub(changes_at(&seq, hi))
}

/// Cauchy bound: every real root lies strictly inside `(-B, B)`.
pub fn root_bound(p: &[Rational]) -> Rational {
    let d = degree(p).expect("zero polynomial has no root bound");
    let lead = p[d].abs();
    let max = p[..d]
        .iter()
        .map(|c| c.abs() / &lead)
        .fold(Rational::zero(), |m, c| if c > m { c } else { m });
    max + Rational::one()
}

/// Outcome of isolating the real roots of a square-free polynomial.
#[derive(Debug, Clone)]
pub enum Isolation {
    /// A bisection midpoint landed exactly on a root.
    ExactRoot(Rational),
    /// Disjoint intervals `(lo, hi]`, one root each, endpoints not roots.
    Intervals(Vec<(Rational, Rational)>),
}

/// Isolates the real roots of `p` (any nonzero polynomial).
pub fn isolate_roots(p: &[Rational]) -> Isolation {
    let sqf = square_free(p);
    if degree(&sqf).unwrap_or(0) == 0 {
        return Isolation::Intervals(Vec::new());
    }
    let seq = sturm_sequence(&sqf);
    let bound = root_bound(&sqf);
    let mut pending = vec![(-bound.clone(), bound)];
    let mut done = Vec::new();
    let two = Rational::from_integer(2.into());
    while let Some((lo, hi)) = pending.pop() {
        let count = changes_at(&seq, &lo) - changes_at(&seq, &hi);
        match count {
            0 => {}
            1 => done.push((lo, hi)),
            _ => {
                let mid = (&lo + &hi) / &two;
                if eval(&sqf, &mid).is_zero() {
                    return Isolation::ExactRoot(mid);
                }
                pending.push((mid.clone(), hi));
                pending.push((lo, mid));
            }
        }
    }
    done.sort();
    Isolation::Intervals(done)
}

/// Rational roots of `p` via the rational root theorem. Gives up (returns
/// what it has) when the constant or leading coefficient has too many divisors.
pub fn rational_roots(p: &[Rational]) -> Vec<Rational> {
    let sqf = square_free(p);
    let Some(d) = degree(&sqf) else {
        return Vec::new();
    };
    let mut roots = Vec::new();
    // Strip the factor t^k first.
    let lowest = sqf.iter().position(|c| !c.is_zero()).unwrap_or(0);
    if lowest > 0 {
        roots.push(Rational::zero());
    }
    let shifted: UPoly = sqf[lowest..].to_vec();
    if shifted.len() <= 1 {
        return roots;
    }
    // Clear denominators.
    let lcm = shifted
        .iter()
        .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let ints: Vec<BigInt> = shifted
        .iter()
        .map(|c| (c * Rational::from_integer(lcm.clone())).to_integer())
        .collect();
    let (Some(c0), Some(cn)) = (ints.first(), ints.get(d - lowest)) else {
        return roots;
    };
    let (Some(ps), Some(qs)) = (small_divisors(c0), small_divisors(cn)) else {
        return roots;
    };
    for pnum in &ps {
        for q in &qs {
            for cand in [Rational::new(pnum.clone(), q.clone()), -Rational::new(pnum.clone(), q.clone())] {
                if eval(&shifted, &cand).is_zero() && !roots.contains(&cand) {
                    roots.push(cand);
                }
            }
        }
    }
    roots.sort();
    roots
}

fn small_divisors(n: &BigInt) -> Option<Vec<BigInt>> {
    use num_traits::ToPrimitive;
    let n = n.abs().to_u64()?;
    if n == 0 || n > 1 << 40 {
        return None;
    }
    let mut out = Vec::new();
    let mut k = 1u64;
    while k * k <= n {
        if n % k == 0 {
            out.push(BigInt::from(k));
            if k * k != n {
                out.push(BigInt::from(n / k));
            }
        }
        k += 1;
    }
    Some(out)
}
