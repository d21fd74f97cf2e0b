//! Sparse multivariate polynomials with exact rational coefficients.
//!
//! Terms live in a `BTreeMap` keyed by [`Monomial`], whose ordering is graded
//! lexicographic, so iteration order (and therefore hashing, printing and JSON
//! output) is canonical. Zero coefficients are never stored.

mod json;
mod linear;

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{check_dim, contract, Result};
use crate::rational::{format_rational, Rational};

pub use json::PolyJson;
pub use linear::LinearForm;

/// Exponent vector of a monomial, one slot per ring variable.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn new(exponents: Vec<u32>) -> Self {
        Monomial(exponents)
    }

    pub fn one(vars: usize) -> Self {
        Monomial(vec![0; vars])
    }

    pub fn var(vars: usize, index: usize) -> Self {
        let mut e = vec![0; vars];
        e[index] = 1;
        Monomial(e)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// `self / other` when every exponent of `other` is at most ours.
    fn checked_div(&self, other: &Monomial) -> Option<Monomial> {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a.checked_sub(*b))
            .collect::<Option<Vec<_>>>()
            .map(Monomial)
    }
}

impl Ord for Monomial {
    /// Graded lexicographic: total degree first, then exponents of z1, z2, ...
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// A polynomial in `vars` variables over the rationals.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Poly {
    vars: usize,
    terms: BTreeMap<Monomial, Rational>,
}

impl Poly {
    pub fn zero(vars: usize) -> Self {
        Poly {
            vars,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(vars: usize) -> Self {
        Self::constant(vars, Rational::one())
    }

    pub fn constant(vars: usize, c: Rational) -> Self {
        let mut p = Self::zero(vars);
        p.add_term(Monomial::one(vars), c);
        p
    }

    /// The variable `z_{index+1}`.
    pub fn var(vars: usize, index: usize) -> Self {
        assert!(index < vars, "variable index {index} out of range for {vars} variables");
        let mut p = Self::zero(vars);
        p.terms.insert(Monomial::var(vars, index), Rational::one());
        p
    }

    /// Builds a polynomial from `(exponents, coefficient)` pairs, merging duplicates.
    pub fn from_terms<I>(vars: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<u32>, Rational)>,
    {
        let mut p = Self::zero(vars);
        for (exp, c) in terms {
            check_dim(vars, exp.len())?;
            p.add_term(Monomial(exp), c);
        }
        Ok(p)
    }

    /// Shorthand for tests and catalog code: integer coefficients.
    pub fn from_int_terms(vars: usize, terms: &[(&[u32], i64)]) -> Result<Self> {
        Self::from_terms(
            vars,
            terms
                .iter()
                .map(|(e, c)| (e.to_vec(), Rational::from_integer(BigInt::from(*c)))),
        )
    }

    pub fn vars(&self) -> usize {
        self.vars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    /// Terms in ascending graded-lex order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, exponents: &[u32]) -> Rational {
        self.terms
            .get(&Monomial(exponents.to_vec()))
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    pub fn constant_term(&self) -> Rational {
        self.coefficient(&vec![0; self.vars])
    }

    /// Largest total degree of a term; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().next_back().map(Monomial::degree)
    }

    /// Degree in a single variable.
    pub fn degree_in(&self, var: usize) -> u32 {
        self.terms.keys().map(|m| m.0[var]).max().unwrap_or(0)
    }

    /// Common total degree of all terms. The zero polynomial reports `Some(0)`;
    /// combine with [`Poly::is_zero`] to tell it apart from nonzero constants.
    pub fn homogeneity_degree(&self) -> Option<u32> {
        let mut degrees = self.terms.keys().map(Monomial::degree);
        match degrees.next() {
            None => Some(0),
            Some(d) => degrees.all(|e| e == d).then_some(d),
        }
    }

    pub fn is_homogeneous(&self) -> bool {
        self.homogeneity_degree().is_some()
    }

    /// Which variables occur in some term.
    pub fn variables_present(&self) -> Vec<bool> {
        let mut seen = vec![false; self.vars];
        for m in self.terms.keys() {
            for (s, e) in seen.iter_mut().zip(&m.0) {
                *s |= *e > 0;
            }
        }
        seen
    }

    fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn checked_add(&self, other: &Poly) -> Result<Poly> {
        check_dim(self.vars, other.vars)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &Poly) -> Result<Poly> {
        check_dim(self.vars, other.vars)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c.clone());
        }
        Ok(out)
    }

    pub fn checked_mul(&self, other: &Poly) -> Result<Poly> {
        check_dim(self.vars, other.vars)?;
        let mut out = Poly::zero(self.vars);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Rational) -> Poly {
        if c.is_zero() {
            return Poly::zero(self.vars);
        }
        Poly {
            vars: self.vars,
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect(),
        }
    }

    pub fn pow(&self, exp: u32) -> Poly {
        let mut result = Poly::one(self.vars);
        let mut base = self.clone();
        let mut e = exp;
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        result
    }

    /// Ring homomorphism sending `z_i` to `images[i]`.
    pub fn substitute(&self, images: &[Poly]) -> Result<Poly> {
        check_dim(self.vars, images.len())?;
        let target = match images.first() {
            Some(p) => p.vars,
            None => return contract("substitution needs at least one image"),
        };
        for img in images {
            check_dim(target, img.vars)?;
        }
        // Cache powers of each image; degrees here are small.
        let mut powers: Vec<Vec<Poly>> = images.iter().map(|p| vec![Poly::one(target), p.clone()]).collect();
        let mut out = Poly::zero(target);
        for (m, c) in &self.terms {
            let mut term = Poly::constant(target, c.clone());
            for (i, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let cache = &mut powers[i];
                while cache.len() <= e as usize {
                    let next = &cache[cache.len() - 1] * &cache[1];
                    cache.push(next);
                }
                term = &term * &cache[e as usize];
            }
            for (tm, tc) in term.terms {
                out.add_term(tm, tc);
            }
        }
        Ok(out)
    }

    /// Substitution by linear forms in a common set of variables.
    pub fn substitute_linear(&self, images: &[LinearForm]) -> Result<Poly> {
        let polys: Vec<Poly> = images.iter().map(LinearForm::to_poly).collect();
        self.substitute(&polys)
    }

    pub fn evaluate(&self, point: &[Rational]) -> Result<Rational> {
        check_dim(self.vars, point.len())?;
        let mut total = Rational::zero();
        for (m, c) in &self.terms {
            let mut v = c.clone();
            for (x, &e) in point.iter().zip(&m.0) {
                if e > 0 {
                    v *= num_traits::pow(x.clone(), e as usize);
                }
            }
            total += v;
        }
        Ok(total)
    }

    /// Evaluation at an integer point, exact in `BigInt` arithmetic scaled by
    /// the common denominator of the coefficients. Returns only the sign.
    pub fn sign_at_integer_point(&self, point: &[i64]) -> Result<i8> {
        let p: Vec<Rational> = point.iter().map(|&x| Rational::from_integer(x.into())).collect();
        Ok(crate::rational::sign(&self.evaluate(&p)?))
    }

    pub fn derivative(&self, var: usize) -> Poly {
        let mut out = Poly::zero(self.vars);
        for (m, c) in &self.terms {
            let e = m.0[var];
            if e == 0 {
                continue;
            }
            let mut exp = m.0.clone();
            exp[var] -= 1;
            out.add_term(Monomial(exp), c * Rational::from_integer(e.into()));
        }
        out
    }

    /// Fixes variable `var` to `value`, keeping the variable slot (now absent).
    pub fn specialize(&self, var: usize, value: &Rational) -> Poly {
        let mut out = Poly::zero(self.vars);
        for (m, c) in &self.terms {
            let e = m.0[var];
            let mut exp = m.0.clone();
            exp[var] = 0;
            out.add_term(Monomial(exp), c * num_traits::pow(value.clone(), e as usize));
        }
        out
    }

    /// Drops variable slot `var`, which must not occur in any term.
    pub fn remove_var(&self, var: usize) -> Result<Poly> {
        if self.degree_in(var) > 0 {
            return contract(format!("variable z{} still occurs", var + 1));
        }
        if self.vars == 1 {
            return contract("cannot remove the only variable");
        }
        let mut out = Poly::zero(self.vars - 1);
        for (m, c) in &self.terms {
            let mut exp = m.0.clone();
            exp.remove(var);
            out.add_term(Monomial(exp), c.clone());
        }
        Ok(out)
    }

    /// Coefficients of the univariate polynomial in variable 0, lowest degree
    /// first. All other variables must be absent.
    pub fn univariate_coefficients(&self) -> Result<Vec<Rational>> {
        if self.terms.keys().any(|m| m.0.iter().skip(1).any(|&e| e > 0)) {
            return contract("polynomial is not univariate in the first variable");
        }
        let deg = self.degree_in(0) as usize;
        let mut coeffs = vec![Rational::zero(); deg + 1];
        for (m, c) in &self.terms {
            coeffs[m.0[0] as usize] = c.clone();
        }
        Ok(coeffs)
    }

    /// Leading term under graded-lex order.
    pub fn leading_term(&self) -> Option<(&Monomial, &Rational)> {
        self.terms.iter().next_back()
    }

    /// Exact quotient `self / divisor`; errors if the division leaves a remainder.
    pub fn div_exact(&self, divisor: &Poly) -> Result<Poly> {
        check_dim(self.vars, divisor.vars)?;
        let (lm, lc) = match divisor.leading_term() {
            Some((m, c)) => (m.clone(), c.clone()),
            None => return contract("division by the zero polynomial"),
        };
        let mut rem = self.clone();
        let mut quot = Poly::zero(self.vars);
        while let Some((m, c)) = rem.leading_term().map(|(m, c)| (m.clone(), c.clone())) {
            let qm = match m.checked_div(&lm) {
                Some(q) => q,
                None => return contract("polynomial division is not exact"),
            };
            let qc = c / &lc;
            let mut step = Poly::zero(self.vars);
            step.add_term(qm.clone(), qc.clone());
            rem = rem.checked_sub(&(&step * divisor))?;
            quot.add_term(qm, qc);
        }
        Ok(quot)
    }

    /// Content-free integer scaling: positive rational `c` with `c * self`
    /// having coprime integer coefficients. Zero maps to one.
    pub fn primitive_scale(&self) -> Rational {
        use num_integer::Integer;
        let mut num_gcd = BigInt::zero();
        let mut den_lcm = BigInt::one();
        for c in self.terms.values() {
            num_gcd = num_gcd.gcd(c.numer());
            den_lcm = den_lcm.lcm(c.denom());
        }
        if num_gcd.is_zero() {
            return Rational::one();
        }
        Rational::new(den_lcm, num_gcd.abs())
    }

    /// Renders with a chosen variable stem, e.g. `s` for Λ-determinants.
    pub fn display_with<'a>(&'a self, stem: &'a str) -> PolyDisplay<'a> {
        PolyDisplay { poly: self, stem }
    }
}

impl std::ops::Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        self.checked_add(rhs).expect("polynomial rings differ")
    }
}

impl std::ops::Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        self.checked_sub(rhs).expect("polynomial rings differ")
    }
}

impl std::ops::Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        self.checked_mul(rhs).expect("polynomial rings differ")
    }
}

impl std::ops::Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        self.scale(&-Rational::one())
    }
}

pub struct PolyDisplay<'a> {
    poly: &'a Poly,
    stem: &'a str,
}

impl fmt::Display for PolyDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.poly.is_zero() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.poly.terms.iter().rev().enumerate() {
            let negative = c.is_negative();
            let abs = c.abs();
            if k == 0 {
                if negative {
                    write!(f, "-")?;
                }
            } else {
                write!(f, "{}", if negative { "-" } else { "+" })?;
            }
            let constant = m.degree() == 0;
            let mut first = true;
            if !abs.is_one() || constant {
                write!(f, "{}", format_rational(&abs))?;
                first = false;
            }
            for (i, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                if !first {
                    write!(f, "*")?;
                }
                first = false;
                write!(f, "{}{}", self.stem, i + 1)?;
                if e > 1 {
                    write!(f, "^{e}")?;
                }
            }
        }
        Ok(())
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.display_with("z").fmt(f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    fn z(vars: usize, i: usize) -> Poly {
        Poly::var(vars, i)
    }

    fn det37() -> Poly {
        // (z1^2+z2^2)^2 + 4 z3^4
        let s = &(&z(3, 0) * &z(3, 0)) + &(&z(3, 1) * &z(3, 1));
        &s.pow(2) + &z(3, 2).pow(4).scale(&int(4))
    }

    #[test]
    fn additive_identity_and_cancellation() {
        let p = &(&z(2, 0) * &z(2, 0)) + &z(2, 1);
        assert_eq!(&p + &Poly::zero(2), p);
        let sq = &z(2, 0) * &z(2, 0);
        assert!((&sq + &(-&sq)).is_zero());
    }

    #[test]
    fn expanded_determinant_from_summands() {
        let a = Poly::from_int_terms(3, &[(&[4, 0, 0], 1), (&[2, 2, 0], 2), (&[0, 4, 0], 1)]).unwrap();
        let b = Poly::from_int_terms(3, &[(&[0, 0, 4], 4)]).unwrap();
        let sum = &a + &b;
        assert_eq!(sum.term_count(), 4);
        assert_eq!(sum, det37());
        assert_eq!(sum.to_string(), "z1^4+2*z1^2*z2^2+z2^4+4*z3^4");
    }

    #[test]
    fn products() {
        let s = &(&z(2, 0) * &z(2, 0)) + &(&z(2, 1) * &z(2, 1));
        let sq = &s * &s;
        assert_eq!(
            sq,
            Poly::from_int_terms(2, &[(&[4, 0], 1), (&[2, 2], 2), (&[0, 4], 1)]).unwrap()
        );
        assert_eq!(&sq * &Poly::one(2), sq);
        let diff = &(&z(2, 0) + &z(2, 1)) * &(&z(2, 0) - &z(2, 1));
        assert_eq!(diff.to_string(), "z1^2-z2^2");
    }

    #[test]
    fn mismatched_rings_are_rejected() {
        let err = Poly::var(2, 0).checked_add(&Poly::var(3, 0)).unwrap_err();
        assert!(matches!(err, crate::Error::Dimension { expected: 2, found: 3 }));
        assert!(Poly::var(2, 0).checked_mul(&Poly::var(3, 0)).is_err());
        assert!(Poly::var(2, 0).evaluate(&[int(1)]).is_err());
    }

    #[test]
    fn substitution_examples() {
        let p = det37();
        let merged = p.substitute(&[z(3, 0), z(3, 0), z(3, 2)]).unwrap();
        assert_eq!(merged.to_string(), "4*z1^4+4*z3^4");
        let ident: Vec<Poly> = (0..3).map(|i| z(3, i)).collect();
        assert_eq!(p.substitute(&ident).unwrap(), p);
        let q = -&(&(&z(2, 0) * &z(2, 0)) + &(&z(2, 1) * &z(2, 1)));
        let c = q
            .substitute(&[Poly::one(1), Poly::zero(1)])
            .unwrap();
        assert_eq!(c, Poly::constant(1, int(-1)));
        assert!(p.substitute(&[z(3, 0)]).is_err());
    }

    #[test]
    fn evaluation_examples() {
        assert_eq!(det37().evaluate(&[int(1), int(0), int(0)]).unwrap(), int(1));
        assert_eq!(det37().evaluate(&[int(0), int(0), int(0)]).unwrap(), int(0));
        let q = -&(&(&z(2, 0) * &z(2, 0)) + &(&z(2, 1) * &z(2, 1)));
        assert_eq!(q.evaluate(&[int(3), int(4)]).unwrap(), int(-25));
    }

    #[test]
    fn homogeneity() {
        assert_eq!(det37().homogeneity_degree(), Some(4));
        let mixed = &z(1, 0) + &(&z(1, 0) * &z(1, 0));
        assert_eq!(mixed.homogeneity_degree(), None);
        let q = -&(&(&z(2, 0) * &z(2, 0)) + &(&z(2, 1) * &z(2, 1)));
        assert_eq!(q.homogeneity_degree(), Some(2));
        let zero = Poly::zero(3);
        assert_eq!(zero.homogeneity_degree(), Some(0));
        assert!(zero.is_zero());
    }

    #[test]
    fn exact_division() {
        let a = &z(2, 0) + &z(2, 1);
        let b = &z(2, 0) - &z(2, 1);
        let prod = &a * &b;
        assert_eq!(prod.div_exact(&a).unwrap(), b);
        assert!(prod.div_exact(&(&z(2, 0) + &Poly::one(2))).is_err());
    }

    #[test]
    fn display_constants_and_signs() {
        let p = Poly::from_terms(2, vec![(vec![0, 0], crate::rational::ratio(-1, 2)), (vec![1, 0], int(-2))]).unwrap();
        assert_eq!(p.to_string(), "-2*z1-1/2");
        assert_eq!(p.display_with("s").to_string(), "-2*s1-1/2");
    }
}
