//! Restriction to rational planes. A semidefinite form whose zeros are all
//! irrational escapes sampling and cannot be covered by boxes; restricted to a
//! suitable plane it becomes a binary form with an isolated double root.

use num_traits::{One, Zero};

use super::two_vars::{decide_two_vars, dehomogenize};
use super::{sturm, Effort, Kind, Witness};
use crate::error::Result;
use crate::poly::Poly;
use crate::rational::Rational;

/// `Q(a, b) = P(a·u + b·v)`.
pub(crate) fn restrict(p: &Poly, u: &[Rational], v: &[Rational]) -> Result<Poly> {
    let images: Vec<Poly> = u
        .iter()
        .zip(v)
        .map(|(x, y)| {
            let a = Poly::var(2, 0).scale(x);
            let b = Poly::var(2, 1).scale(y);
            &a + &b
        })
        .collect();
    p.substitute(&images)
}

pub(crate) fn independent(u: &[Rational], v: &[Rational]) -> bool {
    if u.len() != v.len() {
        return false;
    }
    (0..u.len()).any(|i| (i + 1..u.len()).any(|j| !(&u[i] * &v[j] - &u[j] * &v[i]).is_zero()))
}

/// Checks that `P(u + t·v)` has a real root in `(lo, hi]`.
pub(crate) fn verify_plane_root(p: &Poly, u: &[Rational], v: &[Rational], lo: &Rational, hi: &Rational) -> Result<bool> {
    if u.len() != p.vars() || !independent(u, v) || lo >= hi {
        return Ok(false);
    }
    let q = restrict(p, u, v)?;
    if q.is_zero() {
        return Ok(false);
    }
    Ok(sturm::count_roots_in(&dehomogenize(&q)?, lo, hi) >= 1)
}

fn planes(vars: usize) -> Vec<(Vec<Rational>, Vec<Rational>)> {
    let unit = |i: usize| {
        let mut x = vec![Rational::zero(); vars];
        x[i] = Rational::one();
        x
    };
    let mut out = Vec::new();
    for i in 0..vars {
        for j in i + 1..vars {
            out.push((unit(i), unit(j)));
        }
    }
    for i in 0..vars {
        for j in i + 1..vars {
            for s in [1i64, -1] {
                let mut u = unit(i);
                u[j] = Rational::from_integer(s.into());
                for k in (0..vars).filter(|&k| k != i && k != j) {
                    out.push((u.clone(), unit(k)));
                }
            }
        }
    }
    out
}

fn lift(u: &[Rational], v: &[Rational], ab: &[Rational]) -> Vec<Rational> {
    u.iter().zip(v).map(|(x, y)| x * &ab[0] + y * &ab[1]).collect()
}

/// Looks for a zero or sign change of an even-degree form on coordinate
/// planes and planes spanned by `e_i ± e_j` and `e_k`.
pub(crate) fn plane_refute(p: &Poly, effort: &mut Effort) -> Result<Option<Witness>> {
    if p.vars() < 3 {
        return Ok(None);
    }
    for (u, v) in planes(p.vars()) {
        effort.samples += 1;
        let q = restrict(p, &u, &v)?;
        let verdict = decide_two_vars(&q)?;
        match (verdict.kind, verdict.witness) {
            (Kind::IdenticallyZero, _) => return Ok(Some(Witness::Zero { point: u })),
            (Kind::Indefinite, Some(Witness::Zero { point })) => {
                return Ok(Some(Witness::Zero { point: lift(&u, &v, &point) }));
            }
            (Kind::Indefinite, Some(Witness::SignChange { point, value, reference, reference_value })) => {
                return Ok(Some(Witness::SignChange {
                    point: lift(&u, &v, &point),
                    value,
                    reference: lift(&u, &v, &reference),
                    reference_value,
                }));
            }
            (Kind::Indefinite, Some(Witness::RootInterval { lo, hi })) => {
                return Ok(Some(Witness::PlaneRoot { u, v, lo, hi }));
            }
            _ => {}
        }
    }
    Ok(None)
}
