//! Exact decision for binary forms through Sturm sequences.

use num_traits::Zero;

use super::sturm::{self, Isolation};
use super::{parity_shortcut, require_homogeneous, Certificate, Effort, Verdict, Witness};
use crate::error::{contract, Result};
use crate::poly::Poly;
use crate::rational::{sign, Rational};

/// Coefficients of `P(1, t)`, lowest degree first, padded to the degree of `P`.
pub(crate) fn dehomogenize(p: &Poly) -> Result<Vec<Rational>> {
    if p.vars() != 2 {
        return contract("dehomogenization expects a binary form");
    }
    let d = p.degree().unwrap_or(0) as usize;
    let mut f = vec![Rational::zero(); d + 1];
    for (m, c) in p.terms() {
        f[m.exponents()[1] as usize] += c;
    }
    Ok(f)
}

fn point(t: &Rational) -> Vec<Rational> {
    // (1, t) scaled to integers; homogeneity keeps the sign up to a positive
    // factor when the degree is even.
    let den = Rational::from_integer(t.denom().clone());
    vec![den.clone(), t * den]
}

/// Exact verdict for a homogeneous form in exactly two variables. Never `Unknown`.
pub fn decide_two_vars(p: &Poly) -> Result<Verdict> {
    if p.vars() != 2 {
        return contract(format!("expected 2 variables, got {}", p.vars()));
    }
    let d = require_homogeneous(p)?;
    if let Some(v) = parity_shortcut(p)? {
        return Ok(v);
    }
    let mut effort = Effort { samples: 2, ..Effort::default() };
    let e1 = vec![Rational::from_integer(1.into()), Rational::zero()];
    let e2 = vec![Rational::zero(), Rational::from_integer(1.into())];
    let a = p.evaluate(&e1)?;
    let b = p.evaluate(&e2)?;
    if a.is_zero() {
        return Ok(Verdict::indefinite(Witness::Zero { point: e1 }, effort));
    }
    if b.is_zero() {
        return Ok(Verdict::indefinite(Witness::Zero { point: e2 }, effort));
    }
    if sign(&a) != sign(&b) {
        let w = Witness::SignChange { point: e2, value: b, reference: e1, reference_value: a };
        return Ok(Verdict::indefinite(w, effort));
    }
    if d == 0 {
        return Ok(Verdict::definite(Certificate::Monomial { sign: sign(&a) }, effort));
    }
    let f = dehomogenize(p)?;
    if sturm::count_real_roots(&f) == 0 {
        let cert = Certificate::Sturm { sign: sign(&a), dehomogenized: f };
        return Ok(Verdict::definite(cert, effort));
    }
    let intervals = match sturm::isolate_roots(&f) {
        Isolation::ExactRoot(t) => {
            return Ok(Verdict::indefinite(Witness::Zero { point: point(&t) }, effort));
        }
        Isolation::Intervals(iv) => iv,
    };
    // A root of odd multiplicity flips the sign of f across its interval, so
    // one endpoint disagrees with P(1,0).
    for (lo, hi) in &intervals {
        for t in [lo, hi] {
            effort.samples += 1;
            let v = sturm::eval(&f, t);
            if sign(&v) != sign(&a) {
                let x = point(t);
                let value = p.evaluate(&x)?;
                let w = if value.is_zero() {
                    Witness::Zero { point: x }
                } else {
                    Witness::SignChange { point: x, value, reference: e1.clone(), reference_value: a.clone() }
                };
                return Ok(Verdict::indefinite(w, effort));
            }
        }
    }
    // Only even-multiplicity roots: look for a rational one.
    if let Some(t) = sturm::rational_roots(&f).first() {
        return Ok(Verdict::indefinite(Witness::Zero { point: point(t) }, effort));
    }
    let (lo, hi) = intervals.into_iter().next().expect("root count was positive");
    Ok(Verdict::indefinite(Witness::RootInterval { lo, hi }, effort))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::definiteness::{verify, Kind};
    use crate::rational::{int, ratio};

    fn m_delta_det(delta: Rational) -> Poly {
        // -(4+δ²) s1² - 8 s1 s2 - 4 s2²
        Poly::from_terms(
            2,
            vec![
                (vec![2, 0], -(int(4) + &delta * &delta)),
                (vec![1, 1], int(-8)),
                (vec![0, 2], int(-4)),
            ],
        )
        .unwrap()
    }

    #[test]
    fn m_delta_is_negative_definite_for_nonzero_delta() {
        for delta in [int(1), ratio(1, 2), int(-2)] {
            let p = m_delta_det(delta);
            let v = decide_two_vars(&p).unwrap();
            assert_eq!(v.kind, Kind::NegativeDefinite);
            assert!(verify(&p, &v).unwrap());
        }
    }

    #[test]
    fn perfect_square_gives_rational_zero() {
        let p = m_delta_det(int(0));
        let v = decide_two_vars(&p).unwrap();
        assert_eq!(v.kind, Kind::Indefinite);
        assert_eq!(v.witness, Some(Witness::Zero { point: vec![int(1), int(-1)] }));
    }

    #[test]
    fn sum_of_even_powers() {
        let p = Poly::from_int_terms(2, &[(&[4, 0], 1), (&[0, 4], 1)]).unwrap();
        let v = decide_two_vars(&p).unwrap();
        assert_eq!(v.kind, Kind::PositiveDefinite);
        assert!(verify(&p, &v).unwrap());
    }

    #[test]
    fn irrational_double_root_gets_interval_witness() {
        // (z2^2 - 2 z1^2)^2 is semidefinite with zeros only at irrational slopes.
        let p = Poly::from_int_terms(2, &[(&[4, 0], 4), (&[2, 2], -4), (&[0, 4], 1)]).unwrap();
        let v = decide_two_vars(&p).unwrap();
        assert_eq!(v.kind, Kind::Indefinite);
        assert!(matches!(v.witness, Some(Witness::RootInterval { .. })));
        assert!(verify(&p, &v).unwrap());
    }

    #[test]
    fn simple_root_gives_sign_change() {
        // z1^4 - 6 z1^2 z2^2 + z2^4
        let p = Poly::from_int_terms(2, &[(&[4, 0], 1), (&[2, 2], -6), (&[0, 4], 1)]).unwrap();
        let v = decide_two_vars(&p).unwrap();
        assert_eq!(v.kind, Kind::Indefinite);
        assert!(verify(&p, &v).unwrap());
    }
}
