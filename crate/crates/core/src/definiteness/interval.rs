//! Closed intervals with exact rational endpoints, the natural interval
//! extension of polynomials (term-by-term monomial bounds) and a centered
//! form that re-expands around the box midpoint first.

use num_traits::{One, Zero};

use crate::poly::Poly;
use crate::rational::Rational;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Interval {
    pub lo: Rational,
    pub hi: Rational,
}

impl Interval {
    pub fn new(lo: Rational, hi: Rational) -> Self {
        debug_assert!(lo <= hi);
        Interval { lo, hi }
    }

    pub fn point(x: Rational) -> Self {
        Interval { lo: x.clone(), hi: x }
    }

    pub fn symmetric_unit() -> Self {
        Interval::new(-Rational::one(), Rational::one())
    }

    pub fn midpoint(&self) -> Rational {
        (&self.lo + &self.hi) / Rational::from_integer(2.into())
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn bisect(&self) -> (Interval, Interval) {
        let m = self.midpoint();
        (Interval::new(self.lo.clone(), m.clone()), Interval::new(m, self.hi.clone()))
    }

    pub fn pow(&self, e: u32) -> Interval {
        if e == 0 {
            return Interval::point(Rational::one());
        }
        let a = num_traits::pow(self.lo.clone(), e as usize);
        let b = num_traits::pow(self.hi.clone(), e as usize);
        if e % 2 == 1 || self.lo >= Rational::zero() {
            Interval::new(a, b)
        } else if self.hi <= Rational::zero() {
            Interval::new(b, a)
        } else {
            Interval::new(Rational::zero(), if a > b { a } else { b })
        }
    }

    pub fn mul(&self, other: &Interval) -> Interval {
        let products = [
            &self.lo * &other.lo,
            &self.lo * &other.hi,
            &self.hi * &other.lo,
            &self.hi * &other.hi,
        ];
        let mut lo = products[0].clone();
        let mut hi = products[0].clone();
        for p in &products[1..] {
            if *p < lo {
                lo = p.clone();
            }
            if *p > hi {
                hi = p.clone();
            }
        }
        Interval::new(lo, hi)
    }

    pub fn scale(&self, c: &Rational) -> Interval {
        let a = &self.lo * c;
        let b = &self.hi * c;
        if a <= b {
            Interval::new(a, b)
        } else {
            Interval::new(b, a)
        }
    }

    pub fn add(&self, other: &Interval) -> Interval {
        Interval::new(&self.lo + &other.lo, &self.hi + &other.hi)
    }

    pub fn contains(&self, x: &Rational) -> bool {
        &self.lo <= x && x <= &self.hi
    }
}

/// Enclosure of `p` over the box `domain` (one interval per variable).
pub fn enclose(p: &Poly, domain: &[Interval]) -> Interval {
    assert_eq!(p.vars(), domain.len(), "box dimension must match polynomial");
    let mut power_cache: Vec<Vec<Interval>> = domain
        .iter()
        .map(|iv| vec![Interval::point(Rational::one()), iv.clone()])
        .collect();
    let mut total = Interval::point(Rational::zero());
    for (m, c) in p.terms() {
        let mut term = Interval::point(c.clone());
        for (var, &e) in m.exponents().iter().enumerate() {
            if e == 0 {
                continue;
            }
            let cache = &mut power_cache[var];
            while cache.len() <= e as usize {
                let k = cache.len() as u32;
                let next = domain[var].pow(k);
                cache.push(next);
            }
            term = term.mul(&cache[e as usize]);
        }
        total = total.add(&term);
    }
    total
}

/// Enclosure from the expansion `p(c + h)` around the midpoint `c`, with
/// `h` ranging over a box symmetric about 0, intersected with [`enclose`].
/// Much tighter than the natural extension on small boxes near a minimum.
pub fn enclose_centered(p: &Poly, domain: &[Interval]) -> Interval {
    let natural = enclose(p, domain);
    let vars = p.vars();
    let images: Vec<Poly> = domain
        .iter()
        .enumerate()
        .map(|(v, iv)| &Poly::constant(vars, iv.midpoint()) + &Poly::var(vars, v))
        .collect();
    let shifted = p.substitute(&images).expect("one image per variable");
    let half: Vec<Interval> = domain
        .iter()
        .map(|iv| {
            let r = iv.width() / Rational::from_integer(2.into());
            Interval::new(-r.clone(), r)
        })
        .collect();
    let centered = enclose(&shifted, &half);
    Interval::new(
        if centered.lo > natural.lo { centered.lo } else { natural.lo },
        if centered.hi < natural.hi { centered.hi } else { natural.hi },
    )
}
