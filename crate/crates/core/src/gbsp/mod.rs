//! Exponent arithmetic for power-law approximation functions
//! `Ψ(q) = ‖q‖^{-τ}` and dimension functions `f(r) = r^s`, a brute-force
//! shell-sum oracle, membership in the sets `S(q, p)`, and an empirical
//! covering-count probe.

mod cover;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, contract, Result};
use crate::manifolds::ManifoldSpec;
use crate::rational::{self, int, Rational};

pub use cover::{covering_count, probe_phi, CoverLevel, CoverProbe, CoverReport, Precondition};

/// Shell sums beyond this many shells are refused unless raised explicitly.
pub const DEFAULT_MAX_SHELLS: u64 = 10_000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PowerLawData {
    pub n: usize,
    pub l: usize,
    #[serde(with = "rational::as_string")]
    pub tau: Rational,
    #[serde(with = "rational::as_string")]
    pub s: Rational,
}

impl PowerLawData {
    pub fn new(n: usize, l: usize, tau: Rational, s: Rational) -> Result<Self> {
        if l == 0 || n <= l {
            return contract(format!("need n > l >= 1, got n = {n}, l = {l}"));
        }
        if tau < int(n as i64) {
            return contract(format!("τ must be at least n = {n}"));
        }
        if !s.is_positive() {
            return contract("s must be positive");
        }
        Ok(PowerLawData { n, l, tau, s })
    }

    /// Exponent of `Q` in the `Q`-th shell sum: `e = n − (τ+1)(s+l+1−n)`.
    pub fn shell_exponent(&self) -> Rational {
        let (n, l) = (int(self.n as i64), int(self.l as i64));
        let one = int(1);
        &n - (&self.tau + &one) * (&self.s + &l + &one - &n)
    }

    /// Exponent of `Q` in a single term: `(n−l) − τ(l+1−n) − (τ+1)s`.
    pub fn term_exponent(&self) -> Rational {
        let (n, l) = (int(self.n as i64), int(self.l as i64));
        let one = int(1);
        (&n - &l) - &self.tau * (&l + &one - &n) - (&self.tau + &one) * &self.s
    }
}

/// `s* = (n−l−1) + (n+1)/(τ+1)`.
pub fn critical_exponent(n: usize, l: usize, tau: &Rational) -> Result<Rational> {
    if l == 0 || n <= l {
        return contract(format!("need n > l >= 1, got n = {n}, l = {l}"));
    }
    if !tau.is_positive() {
        return contract("τ must be positive");
    }
    Ok(int((n - l - 1) as i64) + int((n + 1) as i64) / (tau + int(1)))
}

/// Limit of [`critical_exponent`] as `τ → ∞`.
pub fn critical_exponent_limit(n: usize, l: usize) -> Result<Rational> {
    if l == 0 || n <= l {
        return contract(format!("need n > l >= 1, got n = {n}, l = {l}"));
    }
    Ok(int((n - l - 1) as i64))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeriesClass {
    Convergent,
    Divergent,
    Critical,
}

pub fn classify_series(d: &PowerLawData) -> SeriesClass {
    let e = d.shell_exponent();
    let minus_one = -Rational::one();
    match e.cmp(&minus_one) {
        std::cmp::Ordering::Less => SeriesClass::Convergent,
        std::cmp::Ordering::Greater => SeriesClass::Divergent,
        std::cmp::Ordering::Equal => SeriesClass::Critical,
    }
}

/// Shell-by-shell values of the series. Exact when the term exponent is an
/// integer; otherwise only the floating-point columns are filled.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesOracle {
    pub exact: bool,
    /// Shell contributions `((2Q+1)^n − (2Q−1)^n)·Q^E`, `Q = 1..=Q_max`.
    pub shell_terms: Vec<f64>,
    pub partial_sums: Vec<f64>,
    #[serde(skip)]
    pub exact_sums: Option<Vec<Rational>>,
    #[serde(skip)]
    pub exact_terms: Option<Vec<Rational>>,
}

impl SeriesOracle {
    /// `T(a)/T(b)` for 1-based shell indices, exact when available.
    pub fn ratio(&self, a: usize, b: usize) -> f64 {
        match &self.exact_sums {
            Some(s) => rational::to_f64(&(&s[a - 1] / &s[b - 1])),
            None => self.partial_sums[a - 1] / self.partial_sums[b - 1],
        }
    }

    /// Whether shell `a` contributes more than `factor` times shell `b`.
    pub fn term_exceeds(&self, a: usize, b: usize, factor: &Rational) -> bool {
        match &self.exact_terms {
            Some(t) => t[a - 1] > &t[b - 1] * factor,
            None => self.shell_terms[a - 1] > self.shell_terms[b - 1] * rational::to_f64(factor),
        }
    }
}

fn shell_count(n: usize, q: u64) -> BigInt {
    let a = BigInt::from(2 * q + 1);
    let b = BigInt::from(2 * q - 1);
    num_traits::pow(a, n) - num_traits::pow(b, n)
}

/// Partial sums of `Σ_q ‖q‖^{n−l} Ψ(q)^{l+1−n} (Ψ(q)/‖q‖)^s` over the integer
/// vectors `q ∈ Z^n ∖ {0}` with sup norm at most `Q_max`.
pub fn series_oracle(d: &PowerLawData, q_max: u64, max_shells: u64) -> Result<SeriesOracle> {
    if q_max == 0 {
        return contract("Q_max must be at least 1");
    }
    if q_max > max_shells {
        return contract(format!("Q_max = {q_max} exceeds the shell budget {max_shells}"));
    }
    let e = d.term_exponent();
    if e.is_integer() {
        let k = e.to_integer().to_i32().ok_or_else(|| crate::Error::Contract("term exponent too large".into()))?;
        let mut terms = Vec::with_capacity(q_max as usize);
        let mut sums = Vec::with_capacity(q_max as usize);
        let mut total = Rational::zero();
        for q in 1..=q_max {
            let power = num_traits::Pow::pow(Rational::from_integer(BigInt::from(q)), k);
            let t = Rational::from_integer(shell_count(d.n, q)) * power;
            total += &t;
            terms.push(t);
            sums.push(total.clone());
        }
        Ok(SeriesOracle {
            exact: true,
            shell_terms: terms.iter().map(rational::to_f64).collect(),
            partial_sums: sums.iter().map(rational::to_f64).collect(),
            exact_sums: Some(sums),
            exact_terms: Some(terms),
        })
    } else {
        let ef = rational::to_f64(&e);
        let mut terms = Vec::with_capacity(q_max as usize);
        let mut sums = Vec::with_capacity(q_max as usize);
        let mut total = 0.0;
        for q in 1..=q_max {
            let qf = q as f64;
            let count = (2.0 * qf + 1.0).powi(d.n as i32) - (2.0 * qf - 1.0).powi(d.n as i32);
            let t = count * qf.powf(ef);
            total += t;
            terms.push(t);
            sums.push(total);
        }
        Ok(SeriesOracle { exact: false, shell_terms: terms, partial_sums: sums, exact_sums: None, exact_terms: None })
    }
}

/// Whether `x ∈ S(q, p)`: `|q·(x, g(x)) − p − θ| < ‖q‖^{−τ}` with the sup norm.
pub fn sq_p_membership(x: &[Rational], spec: &ManifoldSpec, q: &[i64], p: i64, theta: &Rational, tau: &Rational) -> Result<bool> {
    check_dim(spec.n - spec.l, x.len())?;
    check_dim(spec.n, q.len())?;
    let norm = q.iter().map(|c| c.unsigned_abs()).max().unwrap_or(0);
    if norm == 0 {
        return contract("q must be nonzero");
    }
    let mut value = -int(p) - theta;
    for (xi, &qi) in x.iter().zip(q) {
        value += xi * int(qi);
    }
    for (u, g) in spec.system.forms().iter().enumerate() {
        value += g.evaluate(x)? * int(q[x.len() + u]);
    }
    // |v| < Q^{-a/b}  ⟺  |v|^b · Q^a < 1.
    let (a, b) = (tau.numer(), tau.denom());
    let b = b.to_u32().ok_or_else(|| crate::Error::Contract("τ denominator too large".into()))?;
    let a = a.to_i32().ok_or_else(|| crate::Error::Contract("τ numerator too large".into()))?;
    let lhs = num_traits::Pow::pow(value.abs(), b) * num_traits::Pow::pow(Rational::from_integer(BigInt::from(norm)), a);
    Ok(lhs < Rational::one())
}
