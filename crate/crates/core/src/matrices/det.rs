//! Determinants of symbolic and integer matrices.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::Zero;

use super::SymbolicMatrix;
use crate::poly::Poly;

/// Largest size expanded by memoized cofactors; larger matrices use
/// fraction-free (Bareiss) elimination with exact polynomial division.
const COFACTOR_LIMIT: usize = 8;

/// Exact determinant over `Q[z_1..z_l]`. Homogeneous of degree `size`, or zero.
pub fn det_symbolic(m: &SymbolicMatrix) -> Poly {
    let a = m.poly_entries();
    let l = m.l();
    if a.is_empty() {
        return Poly::one(l);
    }
    if a.len() <= COFACTOR_LIMIT {
        let mut memo = HashMap::new();
        cofactor(&a, 0, l, &mut memo)
    } else {
        bareiss(a, l)
    }
}

/// Determinant of the minor on rows `popcount(used)..` and the columns not in `used`.
fn cofactor(a: &[Vec<Poly>], used: u32, l: usize, memo: &mut HashMap<u32, Poly>) -> Poly {
    let n = a.len();
    let row = used.count_ones() as usize;
    if row == n {
        return Poly::one(l);
    }
    if let Some(p) = memo.get(&used) {
        return p.clone();
    }
    let mut total = Poly::zero(l);
    let mut free_before = 0;
    for col in 0..n {
        if used & (1 << col) != 0 {
            continue;
        }
        let entry = &a[row][col];
        if !entry.is_zero() {
            let minor = cofactor(a, used | (1 << col), l, memo);
            if !minor.is_zero() {
                let term = entry * &minor;
                total = if free_before % 2 == 0 { &total + &term } else { &total - &term };
            }
        }
        free_before += 1;
    }
    memo.insert(used, total.clone());
    total
}

/// Determinant of a square matrix of polynomials in `l` variables.
pub(crate) fn det_poly_matrix(a: Vec<Vec<Poly>>, l: usize) -> Poly {
    match a.len() {
        0 => Poly::one(l),
        1 => a[0][0].clone(),
        _ => bareiss(a, l),
    }
}

fn bareiss(mut a: Vec<Vec<Poly>>, l: usize) -> Poly {
    let n = a.len();
    let mut sign_flip = false;
    let mut prev = Poly::one(l);
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(i) => {
                    a.swap(k, i);
                    sign_flip = !sign_flip;
                }
                None => return Poly::zero(l),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &(&a[i][j] * &a[k][k]) - &(&a[i][k] * &a[k][j]);
                a[i][j] = num.div_exact(&prev).expect("Bareiss division is exact");
            }
        }
        prev = a[k][k].clone();
    }
    let d = a[n - 1][n - 1].clone();
    if sign_flip {
        -&d
    } else {
        d
    }
}

/// Exact determinant of a small integer matrix (row-major, `n × n`), by
/// Bareiss elimination in `i128`, falling back to `BigInt` on overflow.
pub fn integer_det(m: &[i64], n: usize) -> BigInt {
    match det_i128(m, n) {
        Some(d) => BigInt::from(d),
        None => det_bigint(m, n),
    }
}

/// Sign of the determinant; the hot path of the search pre-filter.
pub(crate) fn integer_det_sign(m: &[i64], n: usize) -> i8 {
    match det_i128(m, n) {
        Some(d) => d.signum() as i8,
        None => {
            let d = det_bigint(m, n);
            if d.is_zero() {
                0
            } else if d > BigInt::zero() {
                1
            } else {
                -1
            }
        }
    }
}

fn det_i128(m: &[i64], n: usize) -> Option<i128> {
    debug_assert_eq!(m.len(), n * n);
    if n == 0 {
        return Some(1);
    }
    let mut a = [0i128; 256];
    if n > 16 {
        return None;
    }
    for (dst, src) in a.iter_mut().zip(m) {
        *dst = *src as i128;
    }
    let mut prev: i128 = 1;
    let mut negate = false;
    for k in 0..n - 1 {
        if a[k * n + k] == 0 {
            let Some(pivot) = (k + 1..n).find(|&i| a[i * n + k] != 0) else {
                return Some(0);
            };
            for j in 0..n {
                a.swap(k * n + j, pivot * n + j);
            }
            negate = !negate;
        }
        let akk = a[k * n + k];
        for i in k + 1..n {
            let aik = a[i * n + k];
            for j in k + 1..n {
                let x = a[i * n + j].checked_mul(akk)?;
                let y = aik.checked_mul(a[k * n + j])?;
                a[i * n + j] = x.checked_sub(y)? / prev;
            }
        }
        prev = akk;
    }
    let d = a[n * n - 1];
    Some(if negate { -d } else { d })
}

fn det_bigint(m: &[i64], n: usize) -> BigInt {
    let mut a: Vec<BigInt> = m.iter().map(|&x| BigInt::from(x)).collect();
    if n == 0 {
        return BigInt::from(1);
    }
    let mut prev = BigInt::from(1);
    let mut negate = false;
    for k in 0..n - 1 {
        if a[k * n + k].is_zero() {
            match (k + 1..n).find(|&i| !a[i * n + k].is_zero()) {
                Some(p) => {
                    for j in 0..n {
                        a.swap(k * n + j, p * n + j);
                    }
                    negate = !negate;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (&a[i * n + j] * &a[k * n + k] - &a[i * n + k] * &a[k * n + j]) / &prev;
                a[i * n + j] = v;
            }
        }
        prev = a[k * n + k].clone();
    }
    let d = a[n * n - 1].clone();
    if negate {
        -d
    } else {
        d
    }
}
