//! Canonical forms of alphabet matrices under the symmetry group generated by
//! simultaneous row/column permutations, permutations and sign flips of the
//! variables, and conjugation by diagonal `±1` matrices. None of these change
//! whether the determinant is definite.
//!
//! Matrices are encoded as the row-major upper triangle of entry codes; the
//! canonical form is the lexicographically smallest code sequence in the orbit.

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashMap};

use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::SymbolicMatrix;
use crate::error::{contract, Result};
use crate::poly::LinearForm;

pub type Code = u16;

/// Which entries a search may use.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AlphabetSpec {
    /// `{0, ±z_1, ..., ±z_l}`.
    Lemma,
    /// All linear forms with integer coefficients in `[-max_coeff, max_coeff]`.
    General { max_coeff: u32 },
}

/// Entry alphabet with precomputed action tables.
#[derive(Clone, Debug)]
pub struct Alphabet {
    l: usize,
    spec: AlphabetSpec,
    forms: Vec<Vec<i64>>,
    index: HashMap<Vec<i64>, Code>,
    neg: Vec<Code>,
    /// One code table per (variable permutation, sign pattern); identity first.
    actions: Vec<Vec<Code>>,
    var_masks: Vec<u32>,
}

/// Total order on forms: support size, then per-variable `(index, |c|, c < 0)`.
fn form_key(c: &[i64]) -> (usize, Vec<(usize, i64, bool)>) {
    let parts: Vec<_> = c
        .iter()
        .enumerate()
        .filter(|(_, &x)| x != 0)
        .map(|(v, &x)| (v, x.abs(), x < 0))
        .collect();
    (parts.len(), parts)
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn rec(prefix: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for k in 0..used.len() {
            if !used[k] {
                used[k] = true;
                prefix.push(k);
                rec(prefix, used, out);
                prefix.pop();
                used[k] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

impl Alphabet {
    pub fn new(l: usize, spec: AlphabetSpec) -> Result<Alphabet> {
        if l == 0 || l > 16 {
            return contract(format!("alphabet needs 1..=16 variables, got {l}"));
        }
        let mut forms: Vec<Vec<i64>> = vec![vec![0; l]];
        match spec {
            AlphabetSpec::Lemma => {
                for v in 0..l {
                    for s in [1, -1] {
                        let mut c = vec![0; l];
                        c[v] = s;
                        forms.push(c);
                    }
                }
            }
            AlphabetSpec::General { max_coeff } => {
                if max_coeff == 0 {
                    return contract("max_coeff must be positive");
                }
                let k = max_coeff as i64;
                let total = (2 * k + 1).checked_pow(l as u32).filter(|&t| t <= Code::MAX as i64);
                if total.is_none() {
                    return contract("generalized alphabet is too large");
                }
                let mut all = vec![vec![]];
                for _ in 0..l {
                    all = all
                        .into_iter()
                        .flat_map(|p: Vec<i64>| {
                            (-k..=k).map(move |x| {
                                let mut q = p.clone();
                                q.push(x);
                                q
                            })
                        })
                        .collect();
                }
                all.retain(|c| c.iter().any(|&x| x != 0));
                forms.extend(all);
            }
        }
        forms.sort_by_key(|c| form_key(c));
        let index: HashMap<Vec<i64>, Code> = forms.iter().enumerate().map(|(i, c)| (c.clone(), i as Code)).collect();
        let lookup = |c: &[i64]| index[c];
        let neg = forms.iter().map(|c| lookup(&c.iter().map(|x| -x).collect::<Vec<_>>())).collect();
        let mut actions = Vec::new();
        for perm in permutations(l) {
            for signs in 0u32..(1 << l) {
                let table = forms
                    .iter()
                    .map(|c| {
                        let mut out = vec![0; l];
                        for v in 0..l {
                            let s = if signs & (1 << v) != 0 { -1 } else { 1 };
                            out[perm[v]] = s * c[v];
                        }
                        lookup(&out)
                    })
                    .collect();
                actions.push(table);
            }
        }
        let var_masks = forms
            .iter()
            .map(|c| c.iter().enumerate().filter(|(_, &x)| x != 0).fold(0u32, |m, (v, _)| m | (1 << v)))
            .collect();
        Ok(Alphabet { l, spec, forms, index, neg, actions, var_masks })
    }

    pub fn l(&self) -> usize {
        self.l
    }

    pub fn spec(&self) -> AlphabetSpec {
        self.spec
    }

    pub fn len(&self) -> usize {
        self.forms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.forms.is_empty()
    }

    pub fn coefficients(&self, code: Code) -> &[i64] {
        &self.forms[code as usize]
    }

    pub fn var_mask(&self, code: Code) -> u32 {
        self.var_masks[code as usize]
    }

    pub fn negate(&self, code: Code) -> Code {
        self.neg[code as usize]
    }

    pub fn actions(&self) -> &[Vec<Code>] {
        &self.actions
    }

    pub fn form(&self, code: Code) -> LinearForm {
        LinearForm::from_ints(&self.forms[code as usize])
    }

    pub fn encode_form(&self, f: &LinearForm) -> Result<Code> {
        let mut c = Vec::with_capacity(self.l);
        for x in f.coeffs() {
            if !x.is_integer() {
                return contract(format!("entry {f} has non-integer coefficients"));
            }
            match x.to_integer().to_i64() {
                Some(v) => c.push(v),
                None => return contract(format!("entry {f} has huge coefficients")),
            }
        }
        match self.index.get(&c) {
            Some(&code) => Ok(code),
            None => contract(format!("entry {f} is outside the alphabet")),
        }
    }

    /// Upper-triangle codes of `m`, row-major.
    pub fn encode(&self, m: &SymbolicMatrix) -> Result<Vec<Code>> {
        if m.l() != self.l {
            return contract("matrix and alphabet use different variable counts");
        }
        let n = m.size();
        let mut out = Vec::with_capacity(n * (n + 1) / 2);
        for i in 0..n {
            for j in i..n {
                out.push(self.encode_form(m.entry(i, j))?);
            }
        }
        Ok(out)
    }

    pub fn decode(&self, size: usize, codes: &[Code]) -> SymbolicMatrix {
        let mut entries = vec![vec![LinearForm::zero(self.l); size]; size];
        let mut k = 0;
        for i in 0..size {
            for j in i..size {
                let f = self.form(codes[k]);
                entries[i][j] = f.clone();
                entries[j][i] = f;
                k += 1;
            }
        }
        SymbolicMatrix::new(self.l, entries).expect("decoded matrix is symmetric")
    }
}

/// Number of upper-triangle slots of a `size × size` matrix.
pub fn triangle_len(size: usize) -> usize {
    size * (size + 1) / 2
}

/// Position of `(i, j)` in the row-major upper triangle.
pub fn tri_index(size: usize, i: usize, j: usize) -> usize {
    let (i, j) = if i <= j { (i, j) } else { (j, i) };
    i * size - i * i.saturating_sub(1) / 2 + j - i
}

/// Precomputed canonicalization for a fixed alphabet and matrix size.
#[derive(Clone, Debug)]
pub struct Canonicalizer<'a> {
    alphabet: &'a Alphabet,
    size: usize,
    perms: Vec<Vec<usize>>,
    pairs: Vec<(usize, usize)>,
}

/// Union-find with parity over at most 32 rows, tracking the relative signs
/// `d_i d_j` already forced by earlier entries.
struct SignClasses {
    parent: [u8; 32],
    parity: [bool; 32],
}

impl SignClasses {
    fn new(n: usize) -> Self {
        let mut parent = [0u8; 32];
        for (i, p) in parent.iter_mut().enumerate().take(n) {
            *p = i as u8;
        }
        SignClasses { parent, parity: [false; 32] }
    }

    fn find(&self, mut i: usize) -> (usize, bool) {
        let mut par = false;
        while self.parent[i] as usize != i {
            par ^= self.parity[i];
            i = self.parent[i] as usize;
        }
        (i, par)
    }

    fn union(&mut self, a: (usize, bool), b: (usize, bool), flip: bool) {
        // Require parity(i) ^ parity(j) == flip for the members that produced a, b.
        self.parent[b.0] = a.0 as u8;
        self.parity[b.0] = a.1 ^ b.1 ^ flip;
    }
}

impl<'a> Canonicalizer<'a> {
    pub fn new(alphabet: &'a Alphabet, size: usize) -> Result<Self> {
        if size > 10 {
            return contract("canonical forms are only computed for matrices up to 10×10");
        }
        let pairs = (0..size).flat_map(|i| (i..size).map(move |j| (i, j))).collect();
        Ok(Canonicalizer { alphabet, size, perms: permutations(size), pairs })
    }

    /// Builds the lexicographically smallest image under `perm`, `action` and
    /// the best diagonal signs, aborting once it exceeds `bound`.
    fn image(&self, codes: &[Code], perm: &[usize], action: &[Code], bound: Option<&[Code]>, out: &mut Vec<Code>) -> Ordering {
        out.clear();
        let mut classes = SignClasses::new(self.size);
        let mut state = if bound.is_some() { Ordering::Equal } else { Ordering::Less };
        for (k, &(i, j)) in self.pairs.iter().enumerate() {
            let src = codes[tri_index(self.size, perm[i], perm[j])];
            let c = action[src as usize];
            let val = if i == j || c == 0 {
                c
            } else {
                let a = classes.find(i);
                let b = classes.find(j);
                let n = self.alphabet.neg[c as usize];
                if a.0 == b.0 {
                    if a.1 ^ b.1 {
                        n
                    } else {
                        c
                    }
                } else {
                    let v = c.min(n);
                    classes.union(a, b, v != c);
                    v
                }
            };
            if state == Ordering::Equal {
                let other = bound.expect("bound present while comparing")[k];
                state = val.cmp(&other);
                if state == Ordering::Greater {
                    return Ordering::Greater;
                }
            }
            out.push(val);
        }
        state
    }

    pub fn canonical(&self, codes: &[Code]) -> Vec<Code> {
        let mut best: Vec<Code> = codes.to_vec();
        let mut scratch = Vec::with_capacity(codes.len());
        for perm in &self.perms {
            for action in &self.alphabet.actions {
                if self.image(codes, perm, action, Some(&best), &mut scratch) == Ordering::Less {
                    std::mem::swap(&mut best, &mut scratch);
                }
            }
        }
        best
    }

    /// Whether `codes` is already its own canonical form.
    pub fn is_canonical(&self, codes: &[Code]) -> bool {
        let mut scratch = Vec::with_capacity(codes.len());
        for perm in &self.perms {
            for action in &self.alphabet.actions {
                if self.image(codes, perm, action, Some(codes), &mut scratch) == Ordering::Less {
                    return false;
                }
            }
        }
        true
    }

    /// Every code sequence in the orbit (for tests and brute-force checks).
    pub fn orbit(&self, codes: &[Code]) -> BTreeSet<Vec<Code>> {
        let mut out = BTreeSet::new();
        for perm in &self.perms {
            for action in &self.alphabet.actions {
                for mask in 0u32..(1 << self.size.saturating_sub(1)) {
                    let d = |i: usize| i > 0 && mask & (1 << (i - 1)) != 0;
                    let img: Vec<Code> = self
                        .pairs
                        .iter()
                        .map(|&(i, j)| {
                            let c = action[codes[tri_index(self.size, perm[i], perm[j])] as usize];
                            if d(i) != d(j) {
                                self.alphabet.neg[c as usize]
                            } else {
                                c
                            }
                        })
                        .collect();
                    out.insert(img);
                }
            }
        }
        out
    }
}

/// Canonical representative of a `{0, ±z_v}` matrix.
pub fn canonical_form(m: &SymbolicMatrix) -> Result<SymbolicMatrix> {
    if !m.in_alphabet() {
        return contract("canonical_form expects entries in {0, ±z_v}");
    }
    canonical_with(m, AlphabetSpec::Lemma)
}

/// Canonical representative of a matrix with small integer linear-form entries.
pub fn canonical_form_general(m: &SymbolicMatrix) -> Result<SymbolicMatrix> {
    let mut max = 1i64;
    for e in m.rows().iter().flatten() {
        for c in e.coeffs() {
            if !c.is_integer() {
                return contract("canonical forms need integer coefficients");
            }
            max = max.max(c.abs().to_integer().to_i64().unwrap_or(i64::MAX));
        }
    }
    let max = u32::try_from(max).map_err(|_| crate::Error::Contract("coefficients too large".into()))?;
    canonical_with(m, AlphabetSpec::General { max_coeff: max })
}

fn canonical_with(m: &SymbolicMatrix, spec: AlphabetSpec) -> Result<SymbolicMatrix> {
    if m.size() == 0 {
        return Ok(m.clone());
    }
    let alphabet = Alphabet::new(m.l(), spec)?;
    let codes = alphabet.encode(m)?;
    let canon = Canonicalizer::new(&alphabet, m.size())?.canonical(&codes);
    Ok(alphabet.decode(m.size(), &canon))
}

/// All matrices in the symmetry orbit of an alphabet matrix.
pub fn orbit(m: &SymbolicMatrix) -> Result<Vec<SymbolicMatrix>> {
    let alphabet = Alphabet::new(m.l(), AlphabetSpec::Lemma)?;
    let codes = alphabet.encode(m)?;
    let c = Canonicalizer::new(&alphabet, m.size())?;
    Ok(c.orbit(&codes).iter().map(|x| alphabet.decode(m.size(), x)).collect())
}

/// Stable identifier: truncated SHA-256 of the matrix's textual upper triangle.
pub fn canonical_id(canonical: &SymbolicMatrix) -> String {
    let mut h = Sha256::new();
    h.update(format!("l={};size={};", canonical.l(), canonical.size()));
    for i in 0..canonical.size() {
        for j in i..canonical.size() {
            h.update(canonical.entry(i, j).to_string());
            h.update(",");
        }
    }
    hex::encode(&h.finalize()[..8])
}

#[allow(dead_code)]
fn is_zero_code(alphabet: &Alphabet, code: Code) -> bool {
    alphabet.forms[code as usize].iter().all(|x| x.is_zero())
}
