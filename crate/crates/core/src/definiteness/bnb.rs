//! Interval branch-and-bound over the cube faces `{z_v = 1}`, bounding each
//! box with the centered form.
//!
//! For even degree `P(-z) = P(z)`, and every nonzero `z` rescales onto some
//! face `{z_v = 1} × [-1,1]^{l-1}`, so strict positivity of `σ·P` on the `l`
//! faces is equivalent to `σ·P` being positive definite.

use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::interval::{enclose_centered, Interval};
use super::{reference_sign, require_homogeneous, Budget, Certificate, Effort, Verdict, Witness};
use crate::error::{contract, Result};
use crate::poly::Poly;
use crate::rational::{self, sign, Rational};

/// Bisection tree over one face; boxes are implied by the splits, starting
/// from `[-1,1]^{l-1}` and halving along `axis` at each `Split`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "node", rename_all = "snake_case")]
pub enum BoxNode {
    Leaf {
        #[serde(with = "rational::as_string")]
        lower: Rational,
    },
    Split {
        axis: usize,
        low: Box<BoxNode>,
        high: Box<BoxNode>,
    },
}

impl BoxNode {
    pub fn leaf_count(&self) -> usize {
        match self {
            BoxNode::Leaf { .. } => 1,
            BoxNode::Split { low, high, .. } => low.leaf_count() + high.leaf_count(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FaceCover {
    pub face: usize,
    pub tree: BoxNode,
}

/// `sign · P` restricted to `{z_face = 1}`, as a polynomial in the other variables.
fn face_poly(p: &Poly, face: usize, sigma: i8) -> Result<Poly> {
    let restricted = p.specialize(face, &Rational::one()).remove_var(face)?;
    Ok(if sigma < 0 { -&restricted } else { restricted })
}

fn lift(face: usize, coords: &[Rational]) -> Vec<Rational> {
    let mut x = coords.to_vec();
    x.insert(face, Rational::one());
    x
}

fn unit_box(dim: usize) -> Vec<Interval> {
    vec![Interval::symmetric_unit(); dim]
}

enum Outcome {
    Covered(BoxNode),
    Counterexample(Vec<Rational>),
    OutOfBudget,
}

struct FaceSearch<'a> {
    q: &'a Poly,
    budget: &'a Budget,
    boxes: u64,
    depth: u32,
}

impl FaceSearch<'_> {
    fn explore(&mut self, domain: Vec<Interval>, depth: u32) -> Result<Outcome> {
        self.boxes += 1;
        self.depth = self.depth.max(depth);
        let enc = enclose_centered(self.q, &domain);
        if enc.lo > Rational::zero() {
            return Ok(Outcome::Covered(BoxNode::Leaf { lower: enc.lo }));
        }
        let mid: Vec<Rational> = domain.iter().map(Interval::midpoint).collect();
        if self.q.evaluate(&mid)? <= Rational::zero() {
            return Ok(Outcome::Counterexample(mid));
        }
        if depth == 0 {
            for corner in corners(&domain) {
                if self.q.evaluate(&corner)? <= Rational::zero() {
                    return Ok(Outcome::Counterexample(corner));
                }
            }
        }
        if depth >= self.budget.max_depth || self.boxes >= self.budget.max_boxes {
            return Ok(Outcome::OutOfBudget);
        }
        let axis = depth as usize % domain.len();
        let (a, b) = domain[axis].bisect();
        let mut low = domain.clone();
        low[axis] = a;
        let mut high = domain;
        high[axis] = b;
        let low = match self.explore(low, depth + 1)? {
            Outcome::Covered(n) => n,
            other => return Ok(other),
        };
        let high = match self.explore(high, depth + 1)? {
            Outcome::Covered(n) => n,
            other => return Ok(other),
        };
        Ok(Outcome::Covered(BoxNode::Split { axis, low: Box::new(low), high: Box::new(high) }))
    }
}

/// Box vertices, coordinates ordered `hi` before `lo`.
fn corners(domain: &[Interval]) -> Vec<Vec<Rational>> {
    let mut out = vec![Vec::new()];
    for iv in domain {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                [&iv.hi, &iv.lo].into_iter().map(move |x| {
                    let mut p = prefix.clone();
                    p.push(x.clone());
                    p
                })
            })
            .collect();
    }
    out
}

/// Interval branch-and-bound certification for even-degree forms in `l ≥ 2`
/// variables. `max_boxes` applies to each face separately.
pub fn certify_branch_bound(p: &Poly, budget: &Budget) -> Result<Verdict> {
    budget.validate()?;
    let d = require_homogeneous(p)?;
    if p.is_zero() {
        return Ok(Verdict::zero());
    }
    if d % 2 == 1 {
        return contract("branch-and-bound needs even degree; use parity_shortcut for odd forms");
    }
    if p.vars() < 2 {
        return contract("branch-and-bound works over at least two variables");
    }
    let (e1, reference_value) = reference_sign(p)?;
    let mut effort = Effort { samples: 1, ..Effort::default() };
    if reference_value.is_zero() {
        return Ok(Verdict::indefinite(Witness::Zero { point: e1 }, effort));
    }
    let sigma = sign(&reference_value);
    let faces: Vec<usize> = (0..p.vars()).collect();
    let outcomes = faces
        .par_iter()
        .map(|&face| -> Result<(Outcome, Effort)> {
            let q = face_poly(p, face, sigma)?;
            let mut search = FaceSearch { q: &q, budget, boxes: 0, depth: 0 };
            let outcome = search.explore(unit_box(p.vars() - 1), 0)?;
            let exhausted = matches!(outcome, Outcome::OutOfBudget);
            Ok((outcome, Effort { samples: 0, boxes: search.boxes, depth: search.depth, exhausted }))
        })
        .collect::<Result<Vec<_>>>()?;

    for (_, e) in &outcomes {
        effort.merge(e);
    }
    // Faces are scanned in index order so the reported witness does not
    // depend on scheduling.
    for (face, (outcome, _)) in outcomes.iter().enumerate() {
        if let Outcome::Counterexample(coords) = outcome {
            let point = lift(face, coords);
            let w = Witness::against(p, point, &e1, &reference_value)?
                .expect("face value was non-positive relative to the reference sign");
            effort.exhausted = false;
            return Ok(Verdict::indefinite(w, effort));
        }
    }
    if outcomes.iter().any(|(o, _)| matches!(o, Outcome::OutOfBudget)) {
        return Ok(Verdict::unknown(effort));
    }
    let covers = outcomes
        .into_iter()
        .enumerate()
        .map(|(face, (o, _))| match o {
            Outcome::Covered(tree) => FaceCover { face, tree },
            _ => unreachable!("handled above"),
        })
        .collect();
    Ok(Verdict::definite(Certificate::BoxCover { sign: sigma, faces: covers }, effort))
}

pub(super) fn verify_cover(p: &Poly, sigma: i8, faces: &[FaceCover]) -> Result<bool> {
    if sigma == 0 || p.vars() < 2 || faces.len() != p.vars() {
        return Ok(false);
    }
    for (expected, cover) in faces.iter().enumerate() {
        if cover.face != expected {
            return Ok(false);
        }
        let q = face_poly(p, cover.face, sigma)?;
        if !verify_node(&q, &cover.tree, unit_box(p.vars() - 1))? {
            return Ok(false);
        }
    }
    Ok(true)
}

fn verify_node(q: &Poly, node: &BoxNode, domain: Vec<Interval>) -> Result<bool> {
    match node {
        BoxNode::Leaf { lower } => {
            let enc = enclose_centered(q, &domain);
            Ok(enc.lo > Rational::zero() && &enc.lo == lower)
        }
        BoxNode::Split { axis, low, high } => {
            if *axis >= domain.len() {
                return Ok(false);
            }
            let (a, b) = domain[*axis].bisect();
            let mut lo_box = domain.clone();
            lo_box[*axis] = a;
            let mut hi_box = domain;
            hi_box[*axis] = b;
            Ok(verify_node(q, low, lo_box)? && verify_node(q, high, hi_box)?)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::definiteness::{verify, Kind};
    use crate::rational::int;

    fn poly(vars: usize, terms: &[(&[u32], i64)]) -> Poly {
        Poly::from_int_terms(vars, terms).unwrap()
    }

    #[test]
    fn certifies_the_four_by_four_determinant() {
        let p = poly(3, &[(&[4, 0, 0], 1), (&[2, 2, 0], 2), (&[0, 4, 0], 1), (&[0, 0, 4], 4)]);
        let v = certify_branch_bound(&p, &Budget::default()).unwrap();
        assert_eq!(v.kind, Kind::PositiveDefinite);
        assert!(verify(&p, &v).unwrap());
    }

    #[test]
    fn negative_definite_quadratic() {
        let p = poly(2, &[(&[2, 0], -1), (&[0, 2], -1)]);
        let v = certify_branch_bound(&p, &Budget::default()).unwrap();
        assert_eq!(v.kind, Kind::NegativeDefinite);
        assert!(verify(&p, &v).unwrap());
    }

    #[test]
    fn indefinite_quartic_witness() {
        let p = poly(2, &[(&[4, 0], 1), (&[2, 2], -6), (&[0, 4], 1)]);
        let v = certify_branch_bound(&p, &Budget::default()).unwrap();
        assert_eq!(v.kind, Kind::Indefinite);
        match v.witness.unwrap() {
            Witness::SignChange { point, value, .. } => {
                assert_eq!(point, vec![int(1), int(1)]);
                assert_eq!(value, int(-4));
            }
            w => panic!("unexpected witness {w:?}"),
        }
    }

    #[test]
    fn odd_degree_is_rejected() {
        let p = poly(2, &[(&[3, 0], 1)]);
        assert!(certify_branch_bound(&p, &Budget::default()).is_err());
    }

    #[test]
    fn tiny_budget_reports_unknown() {
        // Positive definite but with a shallow minimum that needs subdivision.
        let p = poly(3, &[(&[2, 0, 0], 1), (&[1, 1, 0], -1), (&[0, 2, 0], 1), (&[0, 0, 2], 1)]);
        let budget = Budget { max_boxes: 1, max_depth: 1, sample_count: 1 };
        let v = certify_branch_bound(&p, &budget).unwrap();
        assert_eq!(v.kind, Kind::Unknown);
        assert!(v.effort.exhausted && v.effort.is_nonzero());
        let v = certify_branch_bound(&p, &Budget::default()).unwrap();
        assert_eq!(v.kind, Kind::PositiveDefinite);
        assert!(verify(&p, &v).unwrap());
    }

    #[test]
    fn tampered_tree_fails_verification() {
        let p = poly(3, &[(&[2, 0, 0], 1), (&[1, 1, 0], -1), (&[0, 2, 0], 1), (&[0, 0, 2], 1)]);
        let v = certify_branch_bound(&p, &Budget::default()).unwrap();
        let Some(Certificate::BoxCover { sign, mut faces }) = v.certificate else {
            panic!("expected a box cover");
        };
        faces[0].tree = BoxNode::Leaf { lower: int(1) };
        assert!(!verify_cover(&p, sign, &faces).unwrap());
    }
}
