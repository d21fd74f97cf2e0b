//! Real zeros of ternary forms located through discriminants.
//!
//! In the chart `z_chart = 1`, write `F(a, b)` with `a = z_eliminate` and `b`
//! the remaining variable. When the coefficient of `a^d` is a nonzero
//! constant, a real root `b*` of `D(b) = Res_a(F, ∂F/∂a)` at which the first
//! subresultant `S₁ = S₁₁(b)·a + S₁₀(b)` keeps `S₁₁(b*) ≠ 0` gives the real
//! common root `a* = -S₁₀(b*)/S₁₁(b*)`, hence a real zero `(a*, b*, 1)` of
//! the form. This catches semidefinite forms whose zeros are irrational.

use num_traits::{One, Zero};

use super::sturm::{self, Isolation, UPoly};
use super::{Effort, Witness};
use crate::error::Result;
use crate::matrices::det_poly_matrix;
use crate::poly::Poly;
use crate::rational::Rational;

/// Coefficients of a polynomial in `a` with coefficients univariate in `b`.
type ABPoly = Vec<UPoly>;

fn parameter(chart: usize, eliminate: usize) -> usize {
    (0..3).find(|&v| v != chart && v != eliminate).expect("three variables")
}

/// `F` as a polynomial in `a` over `Q[b]`.
fn chart_poly(p: &Poly, chart: usize, eliminate: usize) -> ABPoly {
    let q = parameter(chart, eliminate);
    let mut out: ABPoly = Vec::new();
    for (m, c) in p.terms() {
        let (i, j) = (m.exponents()[eliminate] as usize, m.exponents()[q] as usize);
        if out.len() <= i {
            out.resize(i + 1, Vec::new());
        }
        if out[i].len() <= j {
            out[i].resize(j + 1, Rational::zero());
        }
        out[i][j] += c;
    }
    out.into_iter().map(sturm::trim).collect()
}

fn derivative_a(f: &ABPoly) -> ABPoly {
    f.iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| c.iter().map(|x| x * Rational::from_integer((i as i64).into())).collect())
        .collect()
}

fn to_poly(u: &[Rational]) -> Poly {
    Poly::from_terms(1, u.iter().enumerate().map(|(k, c)| (vec![k as u32], c.clone())))
        .expect("univariate terms")
}

fn to_upoly(p: &Poly) -> UPoly {
    sturm::trim(p.univariate_coefficients().expect("univariate"))
}

/// `[S₁₀, S₁₁]`, or `[Res]` for `j = 0`: the `j`-th subresultant of `f`
/// (degree `m`) and `g` (degree `n`), coefficients listed by power of `a`.
fn subresultant(f: &ABPoly, g: &ABPoly, j: usize) -> Vec<UPoly> {
    let (m, n) = (f.len() - 1, g.len() - 1);
    let coeff = |p: &ABPoly, shift: usize, e: usize| -> Poly {
        if e >= shift && e - shift < p.len() {
            to_poly(&p[e - shift])
        } else {
            Poly::zero(1)
        }
    };
    let mut rows: Vec<(&ABPoly, usize)> = (0..n - j).rev().map(|s| (f, s)).collect();
    rows.extend((0..m - j).rev().map(|s| (g, s)));
    let lead_cols: Vec<usize> = (j + 1..m + n - j).rev().collect();
    (0..=j)
        .map(|k| {
            let matrix = rows
                .iter()
                .map(|&(p, s)| lead_cols.iter().chain(std::iter::once(&k)).map(|&e| coeff(p, s, e)).collect())
                .collect();
            to_upoly(&det_poly_matrix(matrix, 1))
        })
        .collect()
}

struct Elimination {
    disc: UPoly,
    s10: UPoly,
    s11: UPoly,
}

fn eliminate(p: &Poly, chart: usize, eliminate: usize) -> Option<Elimination> {
    let d = p.homogeneity_degree()? as usize;
    let f = chart_poly(p, chart, eliminate);
    // Leading coefficient in `a` must be a nonzero constant.
    if d < 2 || f.len() != d + 1 || sturm::degree(&f[d]) != Some(0) {
        return None;
    }
    let g = derivative_a(&f);
    let disc = subresultant(&f, &g, 0).pop()?;
    sturm::degree(&disc)?;
    let mut s1 = subresultant(&f, &g, 1);
    let s11 = s1.pop()?;
    let s10 = s1.pop()?;
    Some(Elimination { disc, s10, s11 })
}

fn lift(chart: usize, eliminate: usize, a: Rational, b: Rational) -> Vec<Rational> {
    let mut x = vec![Rational::zero(); 3];
    x[chart] = Rational::one();
    x[eliminate] = a;
    x[parameter(chart, eliminate)] = b;
    x
}

/// Shrinks `(lo, hi]` around its single root of `disc` until `s11` has no
/// root inside, or gives up.
fn separate(e: &Elimination, mut lo: Rational, mut hi: Rational) -> Option<(Rational, Rational)> {
    let two = Rational::from_integer(2.into());
    for _ in 0..64 {
        if sturm::count_roots_in(&e.s11, &lo, &hi) == 0 {
            return Some((lo, hi));
        }
        let mid = (&lo + &hi) / &two;
        if sturm::count_roots_in(&e.disc, &lo, &mid) >= 1 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    None
}

pub(crate) fn discriminant_refute(p: &Poly, effort: &mut Effort) -> Result<Option<Witness>> {
    if p.vars() != 3 {
        return Ok(None);
    }
    for chart in 0..3 {
        for elim in (0..3).filter(|&v| v != chart) {
            effort.samples += 1;
            let Some(e) = eliminate(p, chart, elim) else {
                continue;
            };
            let mut disc = e.disc.clone();
            loop {
                match sturm::isolate_roots(&disc) {
                    Isolation::ExactRoot(b) => {
                        let s11 = sturm::eval(&e.s11, &b);
                        if !s11.is_zero() {
                            let a = -sturm::eval(&e.s10, &b) / s11;
                            let point = lift(chart, elim, a, b.clone());
                            if p.evaluate(&point)?.is_zero() {
                                return Ok(Some(Witness::Zero { point }));
                            }
                        }
                        // Deflate and look at the remaining roots.
                        disc = sturm::div_rem(&disc, &[-b, Rational::one()]).0;
                    }
                    Isolation::Intervals(iv) => {
                        for (lo, hi) in iv {
                            if let Some((lo, hi)) = separate(&e, lo, hi) {
                                return Ok(Some(Witness::DiscriminantRoot { chart, eliminate: elim, lo, hi }));
                            }
                        }
                        break;
                    }
                }
            }
        }
    }
    Ok(None)
}

pub(crate) fn verify_discriminant_root(p: &Poly, chart: usize, elim: usize, lo: &Rational, hi: &Rational) -> bool {
    if p.vars() != 3 || chart >= 3 || elim >= 3 || chart == elim || lo >= hi {
        return false;
    }
    match eliminate(p, chart, elim) {
        Some(e) => sturm::count_roots_in(&e.disc, lo, hi) >= 1 && sturm::count_roots_in(&e.s11, lo, hi) == 0,
        None => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::definiteness::{decide, verify, Budget, Kind};

    fn p(terms: &[(&[u32], i64)]) -> Poly {
        Poly::from_int_terms(3, terms).unwrap()
    }

    #[test]
    fn resultant_of_a_quadratic_is_its_discriminant() {
        // F = a² + b² - 1: Res(F, 2a) = 4(b² - 1).
        let f: ABPoly = vec![vec![Rational::from_integer((-1).into()), Rational::zero(), Rational::one()], vec![], vec![Rational::one()]];
        let f: ABPoly = f.into_iter().map(sturm::trim).collect();
        let g = derivative_a(&f);
        let r = subresultant(&f, &g, 0).pop().unwrap();
        let expected: UPoly = [-4, 0, 4].iter().map(|&x| Rational::from_integer(x.into())).collect();
        assert_eq!(r, expected);
    }

    #[test]
    fn zero_off_every_rational_plane() {
        // Vanishes at (√(2√2 - 2), √2 - 1, 1).
        let q = p(&[
            (&[4, 0, 0], 2),
            (&[2, 2, 0], 2),
            (&[2, 1, 1], -4),
            (&[2, 0, 2], -2),
            (&[0, 4, 0], 1),
            (&[0, 2, 2], 2),
            (&[0, 0, 4], 1),
        ]);
        let v = decide(&q, &Budget::default()).unwrap();
        assert_eq!(v.kind, Kind::Indefinite);
        let Some(Witness::DiscriminantRoot { chart, eliminate: elim, lo, hi }) = v.witness.clone() else {
            panic!("unexpected witness {:?}", v.witness);
        };
        assert!(verify(&q, &v).unwrap());
        // Narrow the interval and check the implied point numerically.
        let e = eliminate(&q, chart, elim).unwrap();
        let (mut lo, mut hi) = (lo, hi);
        for _ in 0..60 {
            let mid = (&lo + &hi) / Rational::from_integer(2.into());
            if sturm::count_roots_in(&e.disc, &lo, &mid) >= 1 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let a = -sturm::eval(&e.s10, &hi) / sturm::eval(&e.s11, &hi);
        let x = lift(chart, elim, a, hi);
        assert!(crate::rational::to_f64(&q.evaluate(&x).unwrap()).abs() < 1e-9);
    }

    #[test]
    fn definite_forms_give_no_witness() {
        let q = p(&[(&[4, 0, 0], 1), (&[2, 2, 0], 2), (&[0, 4, 0], 1), (&[0, 0, 4], 4)]);
        assert!(discriminant_refute(&q, &mut Effort::default()).unwrap().is_none());
        assert!(!verify_discriminant_root(&q, 2, 0, &Rational::from_integer((-5).into()), &Rational::from_integer(5.into())));
    }
}
