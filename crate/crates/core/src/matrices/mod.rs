//! Symmetric matrices whose entries are linear forms in `z_1..z_l`, their
//! determinants, and the search for matrices with definite determinant.

mod canonical;
mod det;
mod json;
pub mod search;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::definiteness::{self, Budget, Verdict};
use crate::error::{check_dim, contract, Result};
use crate::poly::{LinearForm, Poly};
use crate::rational::Rational;

pub use canonical::{
    canonical_form, canonical_form_general, canonical_id, orbit, tri_index, triangle_len, Alphabet, AlphabetSpec, Canonicalizer, Code,
};
pub(crate) use det::det_poly_matrix;
pub use det::{det_symbolic, integer_det};
pub use json::MatrixJson;

/// A symmetric `size × size` matrix of linear forms in `l` variables.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SymbolicMatrix {
    l: usize,
    entries: Vec<Vec<LinearForm>>,
}

impl SymbolicMatrix {
    pub fn new(l: usize, entries: Vec<Vec<LinearForm>>) -> Result<Self> {
        if l == 0 {
            return contract("a symbolic matrix needs at least one variable");
        }
        let size = entries.len();
        for (i, row) in entries.iter().enumerate() {
            check_dim(size, row.len())?;
            for (j, e) in row.iter().enumerate() {
                check_dim(l, e.vars())?;
                if entries[j][i] != *e {
                    return contract(format!("matrix is not symmetric at ({}, {})", i + 1, j + 1));
                }
            }
        }
        Ok(SymbolicMatrix { l, entries })
    }

    /// The 0×0 matrix, neutral for [`block_compose`].
    pub fn empty(l: usize) -> Self {
        SymbolicMatrix { l, entries: Vec::new() }
    }

    /// Parses entries such as `"z1"`, `"-z3"`, `"0"` (full square layout).
    pub fn from_strs(l: usize, rows: &[&[&str]]) -> Result<Self> {
        let entries = rows
            .iter()
            .map(|r| r.iter().map(|s| LinearForm::parse(s, l)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        Self::new(l, entries)
    }

    /// Diagonal matrix with every diagonal entry equal to `form`.
    pub fn scalar(l: usize, size: usize, form: &LinearForm) -> Result<Self> {
        let entries = (0..size)
            .map(|i| (0..size).map(|j| if i == j { form.clone() } else { LinearForm::zero(l) }).collect())
            .collect();
        Self::new(l, entries)
    }

    pub fn l(&self) -> usize {
        self.l
    }

    pub fn size(&self) -> usize {
        self.entries.len()
    }

    pub fn entry(&self, i: usize, j: usize) -> &LinearForm {
        &self.entries[i][j]
    }

    pub fn rows(&self) -> &[Vec<LinearForm>] {
        &self.entries
    }

    /// Whether every entry lies in `{0, ±z_v}`.
    pub fn in_alphabet(&self) -> bool {
        self.entries.iter().flatten().all(LinearForm::in_alphabet)
    }

    /// Whether every variable occurs in some entry.
    pub fn all_variables_present(&self) -> bool {
        (0..self.l).all(|v| self.entries.iter().flatten().any(|e| !num_traits::Zero::is_zero(e.coeff(v))))
    }

    pub fn poly_entries(&self) -> Vec<Vec<Poly>> {
        self.entries.iter().map(|r| r.iter().map(LinearForm::to_poly).collect()).collect()
    }

    /// Applies `f` to every entry (the result must stay symmetric).
    pub fn map_entries(&self, l: usize, f: impl Fn(&LinearForm) -> Result<LinearForm>) -> Result<Self> {
        let entries = self
            .entries
            .iter()
            .map(|r| r.iter().map(&f).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        Self::new(l, entries)
    }

    /// Simultaneous row/column permutation: result `(i,j)` = `self(perm[i], perm[j])`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        check_dim(self.size(), perm.len())?;
        let entries = (0..self.size())
            .map(|i| (0..self.size()).map(|j| self.entries[perm[i]][perm[j]].clone()).collect())
            .collect();
        Self::new(self.l, entries)
    }

    /// Conjugation `D·M·D` by `D = diag(signs)` with entries `±1`.
    pub fn conjugated(&self, negative: &[bool]) -> Result<Self> {
        check_dim(self.size(), negative.len())?;
        let entries = (0..self.size())
            .map(|i| {
                (0..self.size())
                    .map(|j| {
                        let e = &self.entries[i][j];
                        if negative[i] != negative[j] {
                            e.neg()
                        } else {
                            e.clone()
                        }
                    })
                    .collect()
            })
            .collect();
        Self::new(self.l, entries)
    }

    pub fn display_with<'a>(&'a self, stem: &'a str) -> MatrixDisplay<'a> {
        MatrixDisplay { m: self, stem }
    }
}

pub struct MatrixDisplay<'a> {
    m: &'a SymbolicMatrix,
    stem: &'a str,
}

impl fmt::Display for MatrixDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cells: Vec<Vec<String>> = self
            .m
            .entries
            .iter()
            .map(|r| r.iter().map(|e| e.display_with(self.stem).to_string()).collect())
            .collect();
        let width = cells.iter().flatten().map(String::len).max().unwrap_or(1);
        for row in cells {
            let padded: Vec<String> = row.iter().map(|c| format!("{c:>width$}")).collect();
            writeln!(f, "[ {} ]", padded.join("  "))?;
        }
        Ok(())
    }
}

impl fmt::Display for SymbolicMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.display_with("z").fmt(f)
    }
}

/// Block-diagonal composition `A ⊕ B`.
pub fn block_compose(a: &SymbolicMatrix, b: &SymbolicMatrix) -> Result<SymbolicMatrix> {
    check_dim(a.l, b.l)?;
    let size = a.size() + b.size();
    let mut entries = vec![vec![LinearForm::zero(a.l); size]; size];
    for (i, row) in a.entries.iter().enumerate() {
        for (j, e) in row.iter().enumerate() {
            entries[i][j] = e.clone();
        }
    }
    let off = a.size();
    for (i, row) in b.entries.iter().enumerate() {
        for (j, e) in row.iter().enumerate() {
            entries[off + i][off + j] = e.clone();
        }
    }
    SymbolicMatrix::new(a.l, entries)
}

/// Identifies the variables inside each class of `merge`, a partition of
/// `0..l` into nonempty classes. Class `k` becomes variable `z_{k+1}`; the
/// matrix size is unchanged.
pub fn specialize_vars(m: &SymbolicMatrix, merge: &[Vec<usize>]) -> Result<SymbolicMatrix> {
    let images = partition_images(m.l, merge)?;
    m.map_entries(merge.len(), |e| e.compose(&images))
}

fn partition_images(l: usize, merge: &[Vec<usize>]) -> Result<Vec<LinearForm>> {
    let mut owner = vec![None; l];
    for (k, class) in merge.iter().enumerate() {
        if class.is_empty() {
            return contract("partition classes must be nonempty");
        }
        for &v in class {
            if v >= l {
                return contract(format!("variable index {} outside 1..={l}", v + 1));
            }
            if owner[v].replace(k).is_some() {
                return contract(format!("variable z{} appears in two classes", v + 1));
            }
        }
    }
    owner
        .into_iter()
        .enumerate()
        .map(|(v, k)| match k {
            Some(k) => Ok(LinearForm::signed_var(merge.len(), k, false)),
            None => contract(format!("variable z{} is not covered by the partition", v + 1)),
        })
        .collect()
}

/// Substitution images for a partition, as polynomials (used on determinants).
pub fn partition_substitution(l: usize, merge: &[Vec<usize>]) -> Result<Vec<Poly>> {
    Ok(partition_images(l, merge)?.iter().map(LinearForm::to_poly).collect())
}

/// Rank of a list of linear forms, by exact Gaussian elimination.
pub fn rank(forms: &[LinearForm]) -> usize {
    use num_traits::Zero;
    let mut rows: Vec<Vec<Rational>> = forms.iter().map(|f| f.coeffs().to_vec()).collect();
    let cols = rows.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let pivot = rows[r][c].clone();
        for i in 0..rows.len() {
            if i != r && !rows[i][c].is_zero() {
                let factor = &rows[i][c] / &pivot;
                for k in c..cols {
                    let delta = &factor * &rows[r][k];
                    rows[i][k] -= delta;
                }
            }
        }
        r += 1;
    }
    r
}

pub(crate) fn check_independent(forms: &[LinearForm], l: usize) -> Result<()> {
    check_dim(l, forms.len())?;
    for f in forms {
        check_dim(l, f.vars())?;
    }
    if rank(forms) < l {
        return contract("the linear forms L_v must be linearly independent");
    }
    Ok(())
}

/// Replaces `z_v` by `L_v · s` in every entry. `forms[v]` holds the
/// coefficients `(a_{1,v}, ..., a_{l,v})` of `L_v`.
pub fn build_m_prime(m: &SymbolicMatrix, forms: &[LinearForm]) -> Result<SymbolicMatrix> {
    check_independent(forms, m.l)?;
    m.map_entries(m.l, |e| e.compose(forms))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ObstructionStatus {
    Passes,
    /// `l ≥ 2` and `n - l` odd.
    FailsParity,
    /// `n < 2l`.
    FailsDimension,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ObstructionReport {
    pub l: usize,
    pub n: usize,
    pub status: ObstructionStatus,
}

/// Checks the two necessary conditions for `(l, n)` to be a good pair.
/// When both fail, parity is reported.
pub fn obstruction_check(l: usize, n: usize) -> Result<ObstructionReport> {
    if l == 0 || n <= l {
        return contract(format!("need n > l >= 1, got l = {l}, n = {n}"));
    }
    let status = if l == 1 {
        ObstructionStatus::Passes
    } else if (n - l) % 2 == 1 {
        ObstructionStatus::FailsParity
    } else if n < 2 * l {
        ObstructionStatus::FailsDimension
    } else {
        ObstructionStatus::Passes
    };
    Ok(ObstructionReport { l, n, status })
}

/// A matrix together with its determinant and definiteness verdict.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoodPairCandidate {
    pub l: usize,
    pub n: usize,
    #[serde(with = "json::matrix_serde")]
    pub matrix: SymbolicMatrix,
    pub det: Poly,
    pub det_text: String,
    pub verdict: Verdict,
    pub canonical_id: String,
}

impl GoodPairCandidate {
    pub fn evaluate(matrix: SymbolicMatrix, budget: &Budget) -> Result<Self> {
        let det = det_symbolic(&matrix);
        let verdict = definiteness::decide(&det, budget)?;
        let canonical_id = if matrix.in_alphabet() {
            canonical_id(&canonical_form(&matrix)?)
        } else {
            canonical_id(&canonical_form_general(&matrix)?)
        };
        Ok(GoodPairCandidate {
            l: matrix.l(),
            n: matrix.l() + matrix.size(),
            det_text: det.to_string(),
            matrix,
            det,
            verdict,
            canonical_id,
        })
    }

    /// Recomputes the determinant and re-checks the stored verdict.
    pub fn reverify(&self) -> Result<bool> {
        let det = det_symbolic(&self.matrix);
        Ok(det == self.det
            && self.n == self.l + self.matrix.size()
            && definiteness::verify(&det, &self.verdict)?)
    }
}

/// The 2×2 matrix `[[z1, z2], [z2, -z1]]`.
pub fn m24() -> SymbolicMatrix {
    SymbolicMatrix::from_strs(2, &[&["z1", "z2"], &["z2", "-z1"]]).expect("static matrix")
}

/// The 4×4 matrix over `z1, z2, z3` with determinant `(z1²+z2²)² + 4z3⁴`.
pub fn m37() -> SymbolicMatrix {
    SymbolicMatrix::from_strs(
        3,
        &[
            &["z1", "z2", "z3", "-z3"],
            &["z2", "-z1", "z3", "z3"],
            &["z3", "z3", "z1", "z2"],
            &["-z3", "z3", "z2", "-z1"],
        ],
    )
    .expect("static matrix")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::definiteness::Kind;

    #[test]
    fn rejects_asymmetric_and_ragged() {
        assert!(SymbolicMatrix::from_strs(2, &[&["z1", "z2"], &["z1", "z1"]]).is_err());
        assert!(SymbolicMatrix::from_strs(2, &[&["z1", "z2"], &["z2"]]).is_err());
    }

    #[test]
    fn obstruction_examples() {
        assert_eq!(obstruction_check(2, 5).unwrap().status, ObstructionStatus::FailsParity);
        assert_eq!(obstruction_check(3, 5).unwrap().status, ObstructionStatus::FailsDimension);
        assert_eq!(obstruction_check(1, 7).unwrap().status, ObstructionStatus::Passes);
        assert_eq!(obstruction_check(3, 7).unwrap().status, ObstructionStatus::Passes);
        assert_eq!(obstruction_check(1, 4).unwrap().status, ObstructionStatus::Passes);
        assert!(obstruction_check(3, 3).is_err());
    }

    #[test]
    fn block_composition() {
        let a = m24();
        let sq = block_compose(&a, &a).unwrap();
        assert_eq!(sq.size(), 4);
        assert_eq!(det_symbolic(&sq).to_string(), "z1^4+2*z1^2*z2^2+z2^4");
        assert_eq!(block_compose(&a, &SymbolicMatrix::empty(2)).unwrap(), a);
        let big = block_compose(&m37(), &m37()).unwrap();
        assert_eq!(big.size(), 8);
        assert_eq!(big.l() + big.size(), 11);
        assert!(block_compose(&a, &m37()).is_err());
    }

    #[test]
    fn specialization() {
        let merged = specialize_vars(&m37(), &[vec![0, 1], vec![2]]).unwrap();
        assert_eq!(merged.l(), 2);
        assert_eq!(det_symbolic(&merged).to_string(), "4*z1^4+4*z2^4");
        let same = specialize_vars(&m37(), &[vec![0], vec![1], vec![2]]).unwrap();
        assert_eq!(same, m37());
        let all = specialize_vars(&m24(), &[vec![0, 1]]).unwrap();
        assert_eq!(det_symbolic(&all).to_string(), "-2*z1^2");
        assert!(specialize_vars(&m24(), &[vec![0]]).is_err());
        assert!(specialize_vars(&m24(), &[vec![0, 1], vec![1]]).is_err());
        assert!(specialize_vars(&m24(), &[vec![0, 1], vec![]]).is_err());
    }

    #[test]
    fn m_prime_examples() {
        let canonical = [LinearForm::from_ints(&[1, 0]), LinearForm::from_ints(&[0, 1])];
        assert_eq!(build_m_prime(&m24(), &canonical).unwrap(), m24());
        let forms = [LinearForm::from_ints(&[1, 1]), LinearForm::from_ints(&[0, 1])];
        let mp = build_m_prime(&m24(), &forms).unwrap();
        let det = det_symbolic(&mp);
        assert_eq!(det.display_with("s").to_string(), "-s1^2-2*s1*s2-2*s2^2");
        let images: Vec<Poly> = forms.iter().map(LinearForm::to_poly).collect();
        assert_eq!(det, det_symbolic(&m24()).substitute(&images).unwrap());
        let v = definiteness::decide(&det, &Budget::default()).unwrap();
        assert_eq!(v.kind, Kind::NegativeDefinite);
        let dependent = [LinearForm::from_ints(&[1, 1]), LinearForm::from_ints(&[2, 2])];
        assert!(matches!(build_m_prime(&m24(), &dependent), Err(crate::Error::Contract(_))));
    }

    #[test]
    fn candidate_reverifies() {
        let c = GoodPairCandidate::evaluate(m37(), &Budget::default()).unwrap();
        assert_eq!(c.n, 7);
        assert_eq!(c.verdict.kind, Kind::PositiveDefinite);
        assert!(c.reverify().unwrap());
        let mut forged = c.clone();
        forged.det = Poly::one(3);
        assert!(!forged.reverify().unwrap());
    }
}
