//! Deciding whether a homogeneous form is positive definite, negative
//! definite or indefinite, with independently re-checkable evidence.
//!
//! The pipeline in [`decide`] is: parity shortcut (odd degree forms are never
//! definite), cheap exact sampling ([`quick_refute`]), binary restrictions to
//! a few rational planes (for more than two variables), then an exact decision
//! for two variables via Sturm sequences ([`decide_two_vars`]) or interval
//! branch-and-bound over the cube faces ([`certify_branch_bound`]). When the
//! boxes run out on a ternary form, a discriminant test looks for a real zero.
//!
//! Every `Indefinite` verdict carries a [`Witness`] and every definite verdict
//! carries a [`Certificate`]; [`verify`] re-checks both from scratch.

mod bnb;
mod discriminant;
pub mod interval;
mod planes;
pub mod sturm;
mod two_vars;

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{contract, Result};
use crate::poly::Poly;
use crate::rational::{self, sign, Rational};

pub use bnb::{certify_branch_bound, BoxNode, FaceCover};
pub use two_vars::decide_two_vars;

/// Seed for the sampling stage; fixed so verdicts are reproducible.
const SAMPLE_SEED: u64 = 0x5eed_600d;

/// Resource limits for the definiteness engines.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budget {
    pub max_boxes: u64,
    pub max_depth: u32,
    pub sample_count: u32,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_boxes: 1_000_000,
            max_depth: 24,
            sample_count: 512,
        }
    }
}

impl Budget {
    pub fn validate(&self) -> Result<()> {
        if self.max_boxes == 0 || self.max_depth == 0 || self.sample_count == 0 {
            return contract("budget limits must all be positive");
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Kind {
    PositiveDefinite,
    NegativeDefinite,
    Indefinite,
    IdenticallyZero,
    Unknown,
}

impl Kind {
    pub fn is_definite(self) -> bool {
        matches!(self, Kind::PositiveDefinite | Kind::NegativeDefinite)
    }

    fn from_sign(s: i8) -> Kind {
        if s > 0 {
            Kind::PositiveDefinite
        } else {
            Kind::NegativeDefinite
        }
    }

    /// The kind of `-P` given the kind of `P`.
    pub fn negated(self) -> Kind {
        match self {
            Kind::PositiveDefinite => Kind::NegativeDefinite,
            Kind::NegativeDefinite => Kind::PositiveDefinite,
            k => k,
        }
    }
}

/// Exact evidence that a form is not definite.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Witness {
    /// The form vanishes at a nonzero rational point.
    Zero {
        #[serde(with = "rational::vec_as_string")]
        point: Vec<Rational>,
    },
    /// The form takes strictly opposite signs at `point` and `reference`.
    SignChange {
        #[serde(with = "rational::vec_as_string")]
        point: Vec<Rational>,
        #[serde(with = "rational::as_string")]
        value: Rational,
        #[serde(with = "rational::vec_as_string")]
        reference: Vec<Rational>,
        #[serde(with = "rational::as_string")]
        reference_value: Rational,
    },
    /// `P(1, t)` has a real root in `(lo, hi]` (two variables only); used
    /// when the form only touches zero at irrational points.
    RootInterval {
        #[serde(with = "rational::as_string")]
        lo: Rational,
        #[serde(with = "rational::as_string")]
        hi: Rational,
    },
    /// `P(u + t·v)` has a real root `t` in `(lo, hi]`, with `u`, `v`
    /// independent, so `P` vanishes at the nonzero point `u + t·v`.
    PlaneRoot {
        #[serde(with = "rational::vec_as_string")]
        u: Vec<Rational>,
        #[serde(with = "rational::vec_as_string")]
        v: Vec<Rational>,
        #[serde(with = "rational::as_string")]
        lo: Rational,
        #[serde(with = "rational::as_string")]
        hi: Rational,
    },
    /// Ternary form: in the chart `z_chart = 1`, the discriminant of `P` with
    /// respect to `z_eliminate` has a root in `(lo, hi]` where the first
    /// subresultant stays linear, which forces a real zero of `P`.
    DiscriminantRoot {
        chart: usize,
        eliminate: usize,
        #[serde(with = "rational::as_string")]
        lo: Rational,
        #[serde(with = "rational::as_string")]
        hi: Rational,
    },
}

impl Witness {
    /// Builds a witness from `point` given a reference point with nonzero value.
    fn against(p: &Poly, point: Vec<Rational>, reference: &[Rational], reference_value: &Rational) -> Result<Option<Witness>> {
        let value = p.evaluate(&point)?;
        if value.is_zero() {
            return Ok(Some(Witness::Zero { point }));
        }
        if sign(&value) != sign(reference_value) {
            return Ok(Some(Witness::SignChange {
                point,
                value,
                reference: reference.to_vec(),
                reference_value: reference_value.clone(),
            }));
        }
        Ok(None)
    }

    /// The offending point, when the witness is a point.
    pub fn point(&self) -> Option<&[Rational]> {
        match self {
            Witness::Zero { point } | Witness::SignChange { point, .. } => Some(point),
            Witness::RootInterval { .. } | Witness::PlaneRoot { .. } | Witness::DiscriminantRoot { .. } => None,
        }
    }

    /// Re-checks the witness against `p` by exact evaluation.
    pub fn verify(&self, p: &Poly) -> Result<bool> {
        match self {
            Witness::Zero { point } => {
                Ok(point.iter().any(|x| !x.is_zero()) && p.evaluate(point)?.is_zero())
            }
            Witness::SignChange { point, reference, .. } => {
                let a = p.evaluate(point)?;
                let b = p.evaluate(reference)?;
                Ok(sign(&a) * sign(&b) < 0)
            }
            Witness::RootInterval { lo, hi } => {
                if p.vars() != 2 || lo >= hi {
                    return Ok(false);
                }
                let f = two_vars::dehomogenize(p)?;
                Ok(sturm::count_roots_in(&f, lo, hi) >= 1)
            }
            Witness::PlaneRoot { u, v, lo, hi } => planes::verify_plane_root(p, u, v, lo, hi),
            Witness::DiscriminantRoot { chart, eliminate, lo, hi } => {
                Ok(discriminant::verify_discriminant_root(p, *chart, *eliminate, lo, hi))
            }
        }
    }
}

/// Exact evidence that a form is definite.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Certificate {
    /// Nonzero constant, or `c·z^d` with even `d` in one variable.
    Monomial { sign: i8 },
    /// Two variables: `P(1,0)` has sign `sign` and `P(1,t)` (coefficients
    /// lowest degree first) has full degree and no real root.
    Sturm {
        sign: i8,
        #[serde(with = "rational::vec_as_string")]
        dehomogenized: Vec<Rational>,
    },
    /// `sign·P` is bounded below by a positive rational on every leaf of a
    /// bisection tree over each face `{z_v = 1} × [-1,1]^{l-1}`.
    BoxCover { sign: i8, faces: Vec<FaceCover> },
}

impl Certificate {
    pub fn sign(&self) -> i8 {
        match self {
            Certificate::Monomial { sign } | Certificate::Sturm { sign, .. } | Certificate::BoxCover { sign, .. } => *sign,
        }
    }

    /// Re-checks the certificate against `p` without trusting any search state.
    pub fn verify(&self, p: &Poly) -> Result<bool> {
        if p.is_zero() || !p.is_homogeneous() {
            return Ok(false);
        }
        let d = p.homogeneity_degree().unwrap_or(0);
        if d % 2 == 1 {
            return Ok(false);
        }
        match self {
            Certificate::Monomial { sign: s } => {
                if p.term_count() != 1 {
                    return Ok(false);
                }
                let (m, c) = p.leading_term().expect("nonzero");
                let single_var = m.exponents().iter().filter(|&&e| e > 0).count() <= 1;
                Ok(single_var && (d == 0 || p.vars() == 1) && sign(c) == *s)
            }
            Certificate::Sturm { sign: s, dehomogenized } => {
                if p.vars() != 2 {
                    return Ok(false);
                }
                let f = two_vars::dehomogenize(p)?;
                if &f != dehomogenized || sturm::degree(&f) != Some(d as usize) {
                    return Ok(false);
                }
                Ok(sign(&f[0]) == *s && sturm::count_real_roots(&f) == 0)
            }
            Certificate::BoxCover { sign: s, faces } => bnb::verify_cover(p, *s, faces),
        }
    }
}

/// Work spent reaching a verdict.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Effort {
    pub samples: u64,
    pub boxes: u64,
    pub depth: u32,
    /// A budget limit stopped the search.
    pub exhausted: bool,
}

impl Effort {
    fn merge(&mut self, other: &Effort) {
        self.samples += other.samples;
        self.boxes += other.boxes;
        self.depth = self.depth.max(other.depth);
        self.exhausted |= other.exhausted;
    }

    pub fn is_nonzero(&self) -> bool {
        self.samples + self.boxes > 0
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub kind: Kind,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub witness: Option<Witness>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub certificate: Option<Certificate>,
    pub effort: Effort,
}

impl Verdict {
    pub fn indefinite(witness: Witness, effort: Effort) -> Self {
        Verdict {
            kind: Kind::Indefinite,
            witness: Some(witness),
            certificate: None,
            effort,
        }
    }

    pub fn definite(certificate: Certificate, effort: Effort) -> Self {
        Verdict {
            kind: Kind::from_sign(certificate.sign()),
            witness: None,
            certificate: Some(certificate),
            effort,
        }
    }

    pub fn zero() -> Self {
        Verdict {
            kind: Kind::IdenticallyZero,
            witness: None,
            certificate: None,
            effort: Effort::default(),
        }
    }

    pub fn unknown(effort: Effort) -> Self {
        Verdict {
            kind: Kind::Unknown,
            witness: None,
            certificate: None,
            effort,
        }
    }

    pub fn is_definite(&self) -> bool {
        self.kind.is_definite()
    }
}

/// Re-checks a verdict for `p` from scratch.
pub fn verify(p: &Poly, verdict: &Verdict) -> Result<bool> {
    Ok(match verdict.kind {
        Kind::IdenticallyZero => p.is_zero(),
        Kind::Indefinite => match &verdict.witness {
            Some(w) => w.verify(p)?,
            None => false,
        },
        Kind::PositiveDefinite | Kind::NegativeDefinite => match &verdict.certificate {
            Some(c) => Kind::from_sign(c.sign()) == verdict.kind && c.verify(p)?,
            None => false,
        },
        Kind::Unknown => verdict.effort.is_nonzero(),
    })
}

fn require_homogeneous(p: &Poly) -> Result<u32> {
    match p.homogeneity_degree() {
        Some(d) => Ok(d),
        None => contract("definiteness is only decided for homogeneous forms"),
    }
}

fn unit(vars: usize, v: usize, value: i64) -> Vec<Rational> {
    let mut x = vec![Rational::zero(); vars];
    x[v] = rational::int(value);
    x
}

/// Odd degree forms satisfy `P(-z) = -P(z)` and are never definite.
///
/// Returns `IdenticallyZero` for the zero form, an `Indefinite` verdict for
/// odd degree, and `None` for even degree.
pub fn parity_shortcut(p: &Poly) -> Result<Option<Verdict>> {
    let d = require_homogeneous(p)?;
    if p.is_zero() {
        return Ok(Some(Verdict::zero()));
    }
    if d % 2 == 0 {
        return Ok(None);
    }
    let vars = p.vars();
    for v in 0..vars {
        let e = unit(vars, v, 1);
        let value = p.evaluate(&e)?;
        if !value.is_zero() {
            let w = Witness::SignChange {
                point: unit(vars, v, -1),
                value: -value.clone(),
                reference: e,
                reference_value: value,
            };
            return Ok(Some(Verdict::indefinite(w, Effort { samples: v as u64 + 1, ..Effort::default() })));
        }
    }
    let w = Witness::Zero { point: unit(vars, 0, 1) };
    Ok(Some(Verdict::indefinite(w, Effort { samples: vars as u64, ..Effort::default() })))
}

/// Deterministic probe points: the axes, then `e_i ± e_j`.
fn structured_points(vars: usize) -> Vec<Vec<Rational>> {
    let mut pts: Vec<Vec<Rational>> = (0..vars).map(|v| unit(vars, v, 1)).collect();
    for i in 0..vars {
        for j in i + 1..vars {
            for s in [1, -1] {
                let mut x = unit(vars, i, 1);
                x[j] = rational::int(s);
                pts.push(x);
            }
        }
    }
    pts
}

/// Cheap exact search for a zero or a sign change of a homogeneous form.
///
/// Tries the axes and pairwise axis combinations first (preferring exact
/// zeros), then `budget.sample_count` seeded random rational points in the
/// cube `[-1,1]^l`. A returned witness always verifies; `None` claims nothing.
pub fn quick_refute(p: &Poly, budget: &Budget) -> Result<Option<Witness>> {
    Ok(quick_refute_counted(p, budget)?.0)
}

fn quick_refute_counted(p: &Poly, budget: &Budget) -> Result<(Option<Witness>, u64)> {
    require_homogeneous(p)?;
    let vars = p.vars();
    if p.is_zero() {
        return Ok((Some(Witness::Zero { point: unit(vars, 0, 1) }), 1));
    }
    let structured = structured_points(vars);
    let mut values = Vec::with_capacity(structured.len());
    for x in &structured {
        let v = p.evaluate(x)?;
        if v.is_zero() {
            return Ok((Some(Witness::Zero { point: x.clone() }), values.len() as u64 + 1));
        }
        values.push(v);
    }
    let reference = &structured[0];
    let reference_value = values[0].clone();
    for (x, v) in structured.iter().zip(&values) {
        if sign(v) != sign(&reference_value) {
            let w = Witness::SignChange {
                point: x.clone(),
                value: v.clone(),
                reference: reference.clone(),
                reference_value: reference_value.clone(),
            };
            return Ok((Some(w), values.len() as u64));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(SAMPLE_SEED);
    let den = 16i64;
    let mut used = values.len() as u64;
    for _ in 0..budget.sample_count {
        let x: Vec<Rational> = (0..vars)
            .map(|_| rational::ratio(rng.gen_range(-den..=den), den))
            .collect();
        if x.iter().all(Zero::is_zero) {
            continue;
        }
        used += 1;
        if let Some(w) = Witness::against(p, x, reference, &reference_value)? {
            return Ok((Some(w), used));
        }
    }
    Ok((None, used))
}

/// Top-level decision for a homogeneous form.
pub fn decide(p: &Poly, budget: &Budget) -> Result<Verdict> {
    budget.validate()?;
    let d = require_homogeneous(p)?;
    if let Some(v) = parity_shortcut(p)? {
        return Ok(v);
    }
    if d == 0 || p.vars() == 1 {
        // Nonzero constant or c·z^d with d even.
        let c = p.leading_term().expect("nonzero").1;
        return Ok(Verdict::definite(
            Certificate::Monomial { sign: sign(c) },
            Effort { samples: 1, ..Effort::default() },
        ));
    }
    let (witness, samples) = quick_refute_counted(p, budget)?;
    let mut pre = Effort { samples, ..Effort::default() };
    if let Some(w) = witness {
        return Ok(Verdict::indefinite(w, pre));
    }
    if let Some(w) = planes::plane_refute(p, &mut pre)? {
        return Ok(Verdict::indefinite(w, pre));
    }
    let mut verdict = if p.vars() == 2 {
        decide_two_vars(p)?
    } else {
        certify_branch_bound(p, budget)?
    };
    verdict.effort.merge(&pre);
    if verdict.kind == Kind::Unknown {
        // Boxes cannot close around a zero; try to prove one exists.
        let mut effort = verdict.effort;
        if let Some(w) = discriminant::discriminant_refute(p, &mut effort)? {
            return Ok(Verdict::indefinite(w, effort));
        }
    }
    Ok(verdict)
}

/// Reference sign used by the certifiers: the sign of `P(e_1)`.
fn reference_sign(p: &Poly) -> Result<(Vec<Rational>, Rational)> {
    let e1 = unit(p.vars(), 0, 1);
    let v = p.evaluate(&e1)?;
    Ok((e1, v))
}

/// Convenience for callers that hold a nonzero scale factor.
pub fn scaled_kind(kind: Kind, factor: &Rational) -> Kind {
    if sign(factor) < 0 {
        kind.negated()
    } else {
        kind
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    fn poly(vars: usize, terms: &[(&[u32], i64)]) -> Poly {
        Poly::from_int_terms(vars, terms).unwrap()
    }

    fn det37() -> Poly {
        poly(3, &[(&[4, 0, 0], 1), (&[2, 2, 0], 2), (&[0, 4, 0], 1), (&[0, 0, 4], 4)])
    }

    #[test]
    fn quick_refute_examples() {
        let b = Budget::default();
        let w = quick_refute(&poly(2, &[(&[1, 1], 1)]), &b).unwrap().unwrap();
        assert_eq!(w, Witness::Zero { point: vec![int(1), int(0)] });
        let w = quick_refute(&poly(2, &[(&[2, 0], 1), (&[0, 2], -1)]), &b).unwrap().unwrap();
        assert_eq!(w, Witness::Zero { point: vec![int(1), int(1)] });
        assert!(quick_refute(&det37(), &b).unwrap().is_none());
    }

    #[test]
    fn parity_examples() {
        let v = parity_shortcut(&poly(2, &[(&[3, 0], 1), (&[1, 2], 1)])).unwrap().unwrap();
        assert_eq!(v.kind, Kind::Indefinite);
        match v.witness.as_ref().unwrap() {
            Witness::SignChange { point, value, .. } => {
                assert_eq!(point, &vec![int(-1), int(0)]);
                assert_eq!(value, &int(-1));
            }
            w => panic!("unexpected witness {w:?}"),
        }
        assert_eq!(parity_shortcut(&Poly::zero(3)).unwrap().unwrap().kind, Kind::IdenticallyZero);
        assert!(parity_shortcut(&poly(1, &[(&[2], 1)])).unwrap().is_none());
    }

    #[test]
    fn decide_examples() {
        let b = Budget::default();
        let v = decide(&det37(), &b).unwrap();
        assert_eq!(v.kind, Kind::PositiveDefinite);
        assert!(verify(&det37(), &v).unwrap());
        let odd = poly(3, &[(&[1, 1, 1], 1), (&[0, 0, 3], 1)]);
        assert_eq!(decide(&odd, &b).unwrap().kind, Kind::Indefinite);
        let neg = poly(2, &[(&[2, 0], -1), (&[0, 2], -1)]);
        let v = decide(&neg, &b).unwrap();
        assert_eq!(v.kind, Kind::NegativeDefinite);
        assert!(verify(&neg, &v).unwrap());
    }

    #[test]
    fn non_homogeneous_is_a_contract_error() {
        let p = poly(2, &[(&[1, 0], 1), (&[2, 0], 1)]);
        assert!(matches!(decide(&p, &Budget::default()), Err(crate::Error::Contract(_))));
        assert!(decide_two_vars(&p).is_err());
    }

    #[test]
    fn one_variable_and_constants() {
        let b = Budget::default();
        assert_eq!(decide(&poly(1, &[(&[4], -3)]), &b).unwrap().kind, Kind::NegativeDefinite);
        assert_eq!(decide(&poly(1, &[(&[3], 2)]), &b).unwrap().kind, Kind::Indefinite);
        let c = Poly::constant(2, int(5));
        let v = decide(&c, &b).unwrap();
        assert_eq!(v.kind, Kind::PositiveDefinite);
        assert!(verify(&c, &v).unwrap());
    }

    #[test]
    fn forged_evidence_is_rejected() {
        let p = det37();
        let fake = Verdict::indefinite(Witness::Zero { point: vec![int(1), int(0), int(0)] }, Effort::default());
        assert!(!verify(&p, &fake).unwrap());
        let neg = poly(2, &[(&[2, 0], -1), (&[0, 2], -1)]);
        let good = decide(&neg, &Budget::default()).unwrap();
        let mut flipped = good.clone();
        flipped.kind = Kind::PositiveDefinite;
        assert!(!verify(&neg, &flipped).unwrap());
        let indefinite = poly(2, &[(&[2, 0], 1), (&[0, 2], -1)]);
        assert!(!verify(&indefinite, &good).unwrap());
    }
}
