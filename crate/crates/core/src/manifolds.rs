//! Quadratic manifolds `(x, g_1(x), ..., g_l(x))` built from good-pair
//! matrices, their condition-(II) matrix `Λ`, and a catalog of examples.
//!
//! Each `g_u(x) = ½·x·H_u·xᵗ`, so `H_u[i][j] = ∂²g_u/∂x_i∂x_j` and `Λ` does
//! not depend on `x`.

use std::fmt;

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::definiteness::{decide, Budget, Verdict};
use crate::error::{check_dim, contract, Error, Result};
use crate::matrices::{block_compose, check_independent, det_symbolic, m37, SymbolicMatrix};
use crate::poly::{LinearForm, Poly};
use crate::rational::{self, format_rational, int, parse_rational, Rational};

/// `l` symmetric `dim × dim` Hessians.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadraticSystem {
    l: usize,
    dim: usize,
    hessians: Vec<Vec<Vec<Rational>>>,
}

impl QuadraticSystem {
    pub fn new(hessians: Vec<Vec<Vec<Rational>>>) -> Result<Self> {
        let l = hessians.len();
        if l == 0 {
            return contract("a quadratic system needs at least one form");
        }
        let dim = hessians[0].len();
        if dim == 0 {
            return contract("a quadratic system needs at least one coordinate");
        }
        for (u, h) in hessians.iter().enumerate() {
            check_dim(dim, h.len())?;
            for (i, row) in h.iter().enumerate() {
                check_dim(dim, row.len())?;
                for j in 0..i {
                    if row[j] != h[j][i] {
                        return contract(format!("H_{} is not symmetric at ({}, {})", u + 1, i + 1, j + 1));
                    }
                }
            }
        }
        Ok(QuadraticSystem { l, dim, hessians })
    }

    pub fn from_ints(hessians: &[&[&[i64]]]) -> Result<Self> {
        Self::new(
            hessians
                .iter()
                .map(|h| h.iter().map(|r| r.iter().map(|&x| int(x)).collect()).collect())
                .collect(),
        )
    }

    pub fn zero(l: usize, dim: usize) -> Result<Self> {
        Self::new(vec![vec![vec![Rational::zero(); dim]; dim]; l])
    }

    pub fn l(&self) -> usize {
        self.l
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn hessian(&self, u: usize) -> &[Vec<Rational>] {
        &self.hessians[u]
    }

    pub fn hessians(&self) -> &[Vec<Vec<Rational>>] {
        &self.hessians
    }

    /// `g_u` as a polynomial in `x_1..x_dim`.
    pub fn form(&self, u: usize) -> Poly {
        let h = &self.hessians[u];
        let half = rational::ratio(1, 2);
        let mut terms = Vec::new();
        for i in 0..self.dim {
            for j in i..self.dim {
                let mut e = vec![0u32; self.dim];
                e[i] += 1;
                e[j] += 1;
                let c = if i == j { &h[i][i] * &half } else { h[i][j].clone() };
                terms.push((e, c));
            }
        }
        Poly::from_terms(self.dim, terms).expect("dimensions match")
    }

    pub fn forms(&self) -> Vec<Poly> {
        (0..self.l).map(|u| self.form(u)).collect()
    }

    /// Adds seeded random symmetric perturbations with entries in `[-eps, eps]`
    /// (multiples of `eps/64`).
    pub fn perturbed(&self, eps: &Rational, seed: u64) -> QuadraticSystem {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let step = eps / int(64);
        let mut hessians = self.hessians.clone();
        for h in &mut hessians {
            for i in 0..self.dim {
                for j in i..self.dim {
                    let d = &step * int(rng.gen_range(-64..=64));
                    h[i][j] += &d;
                    if i != j {
                        h[j][i] += d;
                    }
                }
            }
        }
        QuadraticSystem { l: self.l, dim: self.dim, hessians }
    }
}

impl fmt::Display for QuadraticSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (u, g) in self.forms().iter().enumerate() {
            writeln!(f, "g{} = {}", u + 1, g.display_with("x"))?;
        }
        Ok(())
    }
}

/// Reads off `H_u` from `M` and forms `L_v = (a_{1,v}, ..., a_{l,v})`: an
/// entry `Σ_v c_v z_v` contributes `Σ_v c_v a_{u,v}` to `H_u[i][j]`.
pub fn build_quadratic_system(m: &SymbolicMatrix, forms: &[LinearForm]) -> Result<QuadraticSystem> {
    let l = m.l();
    check_independent(forms, l)?;
    let size = m.size();
    let mut hessians = vec![vec![vec![Rational::zero(); size]; size]; l];
    for i in 0..size {
        for j in 0..size {
            let e = m.entry(i, j);
            for (v, c) in e.coeffs().iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                for (u, h) in hessians.iter_mut().enumerate() {
                    h[i][j] += c * forms[v].coeff(u);
                }
            }
        }
    }
    QuadraticSystem::new(hessians)
}

/// The canonical basis `L_v = e_v`.
pub fn canonical_basis(l: usize) -> Vec<LinearForm> {
    (0..l).map(|v| LinearForm::signed_var(l, v, false)).collect()
}

/// `Λ(s)` with entry `(i,j) = Σ_u s_u H_u[i][j]`, as a matrix of linear forms in `s`.
pub fn lambda_matrix(sys: &QuadraticSystem) -> SymbolicMatrix {
    let entries = (0..sys.dim)
        .map(|i| {
            (0..sys.dim)
                .map(|j| LinearForm::new(sys.hessians.iter().map(|h| h[i][j].clone()).collect()))
                .collect()
        })
        .collect();
    SymbolicMatrix::new(sys.l, entries).expect("Hessians are symmetric")
}

pub fn lambda_det(sys: &QuadraticSystem) -> Poly {
    det_symbolic(&lambda_matrix(sys))
}

/// Decides whether `det Λ(s)` is definite; definite means condition (II)
/// holds at every `x`.
pub fn check_condition_ii(sys: &QuadraticSystem, budget: &Budget) -> Result<Verdict> {
    decide(&lambda_det(sys), budget)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ex1Coefficients {
    #[serde(with = "rational::as_string")]
    pub a1: Rational,
    #[serde(with = "rational::as_string")]
    pub a2: Rational,
    #[serde(with = "rational::as_string")]
    pub a3: Rational,
}

impl Ex1Coefficients {
    /// `A₃² < 4A₁A₂`: the binary quadratic `A₁s₁² + A₃s₁s₂ + A₂s₂²` is definite.
    pub fn criterion_holds(&self) -> bool {
        &self.a3 * &self.a3 < int(4) * &self.a1 * &self.a2
    }

    /// `A₁s₁² + A₂s₂² + A₃s₁s₂`.
    pub fn quadratic(&self) -> Poly {
        Poly::from_terms(
            2,
            [(vec![2, 0], self.a1.clone()), (vec![0, 2], self.a2.clone()), (vec![1, 1], self.a3.clone())],
        )
        .expect("two variables")
    }
}

/// `A₁ = det H₁`, `A₂ = det H₂`, `A₃ = H₁[0][0]H₂[1][1] − 2H₁[0][1]H₂[0][1] + H₂[0][0]H₁[1][1]`.
pub fn ex1_coefficients(sys: &QuadraticSystem) -> Result<Ex1Coefficients> {
    if sys.l != 2 || sys.dim != 2 {
        return contract(format!("Ex1 coefficients need l = 2 and dim = 2, got l = {}, dim = {}", sys.l, sys.dim));
    }
    let (h1, h2) = (&sys.hessians[0], &sys.hessians[1]);
    let det = |h: &Vec<Vec<Rational>>| &h[0][0] * &h[1][1] - &h[0][1] * &h[1][0];
    Ok(Ex1Coefficients {
        a1: det(h1),
        a2: det(h2),
        a3: &h1[0][0] * &h2[1][1] - int(2) * &h1[0][1] * &h2[0][1] + &h2[0][0] * &h1[1][1],
    })
}

/// `g = (x² − y² + δxy, x² − y²)`; any `δ`, including 0.
pub fn m_delta_system(delta: &Rational) -> QuadraticSystem {
    let (two, m2) = (int(2), int(-2));
    QuadraticSystem::new(vec![
        vec![vec![two.clone(), delta.clone()], vec![delta.clone(), m2.clone()]],
        vec![vec![two, Rational::zero()], vec![Rational::zero(), m2]],
    ])
    .expect("static shape")
}

/// `g = (Σ x_u² − y_u² + δ_u x_u y_u, Σ x_u² − y_u²)` over `t` coordinate pairs.
pub fn e2_system(deltas: &[Rational]) -> Result<QuadraticSystem> {
    let t = deltas.len();
    if t == 0 {
        return contract("need at least one δ");
    }
    let dim = 2 * t;
    let mut h1 = vec![vec![Rational::zero(); dim]; dim];
    let mut h2 = h1.clone();
    for (u, d) in deltas.iter().enumerate() {
        let (x, y) = (2 * u, 2 * u + 1);
        h1[x][x] = int(2);
        h1[y][y] = int(-2);
        h1[x][y] = d.clone();
        h1[y][x] = d.clone();
        h2[x][x] = int(2);
        h2[y][y] = int(-2);
    }
    QuadraticSystem::new(vec![h1, h2])
}

/// `k` diagonal copies of the 4×4 matrix with determinant `(z1²+z2²)² + 4z3⁴`.
pub fn m37_blocks(k: usize) -> Result<SymbolicMatrix> {
    if k == 0 {
        return contract("need at least one block");
    }
    let mut m = m37();
    for _ in 1..k {
        m = block_compose(&m, &m37())?;
    }
    Ok(m)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ManifoldSpec {
    pub n: usize,
    pub l: usize,
    pub system: QuadraticSystem,
    pub label: String,
}

impl ManifoldSpec {
    pub fn new(system: QuadraticSystem, label: impl Into<String>) -> Self {
        ManifoldSpec { n: system.dim + system.l, l: system.l, system, label: label.into() }
    }

    pub fn m_delta(delta: &Rational) -> Result<Self> {
        if delta.is_zero() {
            return contract("δ ≠ 0 is necessary: with δ = 0 the manifold lies in the rational subspace x3 = x4");
        }
        Ok(Self::new(m_delta_system(delta), format!("M_delta(δ={})", format_rational(delta))))
    }

    pub fn e2(deltas: &[Rational]) -> Result<Self> {
        if deltas.len() < 2 {
            return contract("the e2 family needs t ≥ 2 coordinate pairs");
        }
        if deltas.iter().any(Zero::is_zero) {
            return contract("δ ≠ 0 is necessary for every δ_u");
        }
        let names: Vec<String> = deltas.iter().map(format_rational).collect();
        Ok(Self::new(e2_system(deltas)?, format!("e2(t={}, δ=({}))", deltas.len(), names.join(","))))
    }

    pub fn m37() -> Self {
        let sys = build_quadratic_system(&m37(), &canonical_basis(3)).expect("independent basis");
        Self::new(sys, "M37")
    }

    /// `t + 1` blocks, `n = 7 + 4t`.
    pub fn m37_blocks(t: usize) -> Result<Self> {
        let sys = build_quadratic_system(&m37_blocks(t + 1)?, &canonical_basis(3))?;
        Ok(Self::new(sys, format!("M37-blocks(t={t})")))
    }

    pub fn to_json(&self) -> ManifoldJson {
        ManifoldJson {
            n: self.n,
            l: self.l,
            label: self.label.clone(),
            hessians: self
                .system
                .hessians
                .iter()
                .map(|h| h.iter().map(|r| r.iter().map(format_rational).collect()).collect())
                .collect(),
        }
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let j: ManifoldJson = serde_json::from_str(text)?;
        j.try_into()
    }
}

/// `{"n":7,"l":3,"hessians":[[[...]]],"label":"M37"}` with rationals as strings.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifoldJson {
    pub n: usize,
    pub l: usize,
    pub hessians: Vec<Vec<Vec<String>>>,
    pub label: String,
}

impl TryFrom<ManifoldJson> for ManifoldSpec {
    type Error = Error;

    fn try_from(j: ManifoldJson) -> Result<ManifoldSpec> {
        let hessians = j
            .hessians
            .iter()
            .map(|h| h.iter().map(|r| r.iter().map(|s| parse_rational(s)).collect()).collect())
            .collect::<Result<Vec<Vec<Vec<Rational>>>>>()?;
        let system = QuadraticSystem::new(hessians)?;
        if system.l != j.l || system.dim + system.l != j.n {
            return contract(format!(
                "declared (l, n) = ({}, {}) but the Hessians give ({}, {})",
                j.l,
                j.n,
                system.l,
                system.l + system.dim
            ));
        }
        Ok(ManifoldSpec { n: j.n, l: j.l, system, label: j.label })
    }
}

/// The half-open interval `[n−l, 2(n−l−1))` of exponents `s` for which the
/// all-power functions satisfy condition (I); `None` when it is empty.
pub fn all_power_range(n: usize, l: usize) -> Result<Option<(Rational, Rational)>> {
    if n <= l {
        return contract(format!("need n > l, got n = {n}, l = {l}"));
    }
    let lo = int((n - l) as i64);
    let hi = int(2 * (n - l) as i64 - 2);
    Ok(if lo < hi { Some((lo, hi)) } else { None })
}

/// Condition (I) exponent bound: `s < 2(n−l−1)`.
pub fn condition_i_gate(n: usize, l: usize, s: &Rational) -> Result<bool> {
    if n <= l {
        return contract(format!("need n > l, got n = {n}, l = {l}"));
    }
    Ok(s < &int(2 * (n - l) as i64 - 2))
}

/// Catalog row: the example, its condition-(I) range and condition-(II) verdict.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CatalogEntry {
    pub label: String,
    pub l: usize,
    pub n: usize,
    pub condition_i: String,
    pub det_text: String,
    pub condition_ii: Verdict,
}

/// Built-in examples with default parameters.
pub fn example_catalog() -> Vec<ManifoldSpec> {
    vec![
        ManifoldSpec::m_delta(&Rational::one()).expect("δ = 1"),
        ManifoldSpec::e2(&[Rational::one(), Rational::one()]).expect("δ = (1, 1)"),
        ManifoldSpec::m37(),
        ManifoldSpec::m37_blocks(1).expect("two blocks"),
    ]
}

pub fn catalog_entry(spec: &ManifoldSpec, budget: &Budget) -> Result<CatalogEntry> {
    let condition_i = match all_power_range(spec.n, spec.l)? {
        Some((lo, hi)) => format!("[{}, {})", format_rational(&lo), format_rational(&hi)),
        None => format!("(I) fails: dim {}", spec.n - spec.l),
    };
    let det = lambda_det(&spec.system);
    Ok(CatalogEntry {
        label: spec.label.clone(),
        l: spec.l,
        n: spec.n,
        condition_i,
        det_text: det.display_with("s").to_string(),
        condition_ii: decide(&det, budget)?,
    })
}

/// Largest `ε = 2^{-k}` (`k ≤ max_halvings`) for which `trials` seeded
/// perturbations all keep the condition-(II) verdict kind.
pub fn stable_perturbation(sys: &QuadraticSystem, budget: &Budget, trials: u64, max_halvings: u32) -> Result<Option<Rational>> {
    let base = check_condition_ii(sys, budget)?.kind;
    let mut eps = Rational::one();
    for _ in 0..=max_halvings {
        let mut ok = true;
        for seed in 0..trials {
            if check_condition_ii(&sys.perturbed(&eps, seed), budget)?.kind != base {
                ok = false;
                break;
            }
        }
        if ok {
            return Ok(Some(eps));
        }
        eps /= int(2);
    }
    Ok(None)
}
