//! Dense integer and rational matrices: Smith normal form with transforms,
//! integer kernels, determinants and rational solving.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type IntMatrix = Vec<Vec<BigInt>>;
pub type RatMatrix = Vec<Vec<BigRational>>;

pub fn from_i64(rows: &[Vec<i64>]) -> IntMatrix {
    rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
}

pub fn identity(n: usize) -> IntMatrix {
    (0..n).map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect()).collect()
}

pub fn zeros(r: usize, c: usize) -> IntMatrix {
    vec![vec![BigInt::zero(); c]; r]
}

pub fn cols(m: &IntMatrix) -> usize {
    m.first().map_or(0, |r| r.len())
}

pub fn transpose(m: &IntMatrix) -> IntMatrix {
    let c = cols(m);
    (0..c).map(|j| m.iter().map(|row| row[j].clone()).collect()).collect()
}

pub fn mul(a: &IntMatrix, b: &IntMatrix) -> IntMatrix {
    let (n, k, m) = (a.len(), b.len(), cols(b));
    let mut out = zeros(n, m);
    for i in 0..n {
        for l in 0..k {
            if a[i][l].is_zero() {
                continue;
            }
            for j in 0..m {
                if !b[l][j].is_zero() {
                    out[i][j] += &a[i][l] * &b[l][j];
                }
            }
        }
    }
    out
}

pub fn mat_vec(a: &IntMatrix, v: &[BigInt]) -> Vec<BigInt> {
    a.iter().map(|row| row.iter().zip(v).map(|(x, y)| x * y).sum()).collect()
}

pub fn to_rational(m: &IntMatrix) -> RatMatrix {
    m.iter().map(|r| r.iter().map(|x| BigRational::from_integer(x.clone())).collect()).collect()
}

/// Smith normal form `U * M * V = D` with unimodular `U`, `V` and a diagonal
/// `D` whose nonzero entries are positive and satisfy `d_i | d_{i+1}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Smith {
    pub u: IntMatrix,
    pub d: IntMatrix,
    pub v: IntMatrix,
}

impl Smith {
    /// The nonzero diagonal entries.
    pub fn invariant_factors(&self) -> Vec<BigInt> {
        (0..self.d.len().min(cols(&self.d))).map(|i| self.d[i][i].clone()).filter(|x| !x.is_zero()).collect()
    }

    pub fn rank(&self) -> usize {
        self.invariant_factors().len()
    }
}

fn swap_cols(m: &mut IntMatrix, a: usize, b: usize) {
    for row in m.iter_mut() {
        row.swap(a, b);
    }
}

/// `row[dst] -= q * row[src]`.
fn row_sub(m: &mut IntMatrix, dst: usize, src: usize, q: &BigInt) {
    let src_row = m[src].clone();
    for (x, s) in m[dst].iter_mut().zip(src_row.iter()) {
        *x -= q * s;
    }
}

fn col_sub(m: &mut IntMatrix, dst: usize, src: usize, q: &BigInt) {
    for row in m.iter_mut() {
        let s = row[src].clone();
        row[dst] -= q * s;
    }
}

pub fn smith_normal_form(m: &IntMatrix) -> Smith {
    let (r, c) = (m.len(), cols(m));
    let mut d = m.clone();
    let mut u = identity(r);
    let mut v = identity(c);
    for t in 0..r.min(c) {
        loop {
            // smallest nonzero entry of the trailing block becomes the pivot
            let mut best: Option<(usize, usize)> = None;
            for i in t..r {
                for j in t..c {
                    if !d[i][j].is_zero() && best.is_none_or(|(bi, bj)| d[i][j].abs() < d[bi][bj].abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else {
                return Smith { u, d, v };
            };
            d.swap(t, pi);
            u.swap(t, pi);
            swap_cols(&mut d, t, pj);
            swap_cols(&mut v, t, pj);
            let mut clean = true;
            for i in t + 1..r {
                if !d[i][t].is_zero() {
                    let q = &d[i][t] / &d[t][t];
                    row_sub(&mut d, i, t, &q);
                    row_sub(&mut u, i, t, &q);
                    clean &= d[i][t].is_zero();
                }
            }
            for j in t + 1..c {
                if !d[t][j].is_zero() {
                    let q = &d[t][j] / &d[t][t];
                    col_sub(&mut d, j, t, &q);
                    col_sub(&mut v, j, t, &q);
                    clean &= d[t][j].is_zero();
                }
            }
            if !clean {
                continue;
            }
            // divisibility: fold a violating row into the pivot row
            let bad = (t + 1..r).find(|&i| (t + 1..c).any(|j| !d[i][j].is_multiple_of(&d[t][t])));
            match bad {
                Some(i) => {
                    let one = -BigInt::one();
                    row_sub(&mut d, t, i, &one);
                    row_sub(&mut u, t, i, &one);
                }
                None => break,
            }
        }
        if d[t][t].is_negative() {
            for x in d[t].iter_mut() {
                *x = -&*x;
            }
            for x in u[t].iter_mut() {
                *x = -&*x;
            }
        }
    }
    Smith { u, d, v }
}

/// Basis (as rows) of the integer kernel `{x in Z^n : M x = 0}`; it is
/// saturated in `Z^n`.
pub fn integer_kernel(m: &IntMatrix, n: usize) -> IntMatrix {
    if m.is_empty() {
        return identity(n);
    }
    let s = smith_normal_form(m);
    let rank = s.rank();
    let vt = transpose(&s.v);
    vt[rank..].to_vec()
}

/// Determinant by fraction-free (Bareiss) elimination.
pub fn determinant(m: &IntMatrix) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut a = m.clone();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(i) => {
                    a.swap(k, i);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let val = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = val / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    sign * &a[n - 1][n - 1]
}

/// Rank over the rationals.
pub fn rank(m: &IntMatrix) -> usize {
    if m.is_empty() {
        return 0;
    }
    smith_normal_form(m).rank()
}

/// Inverse of a square rational matrix, `None` if singular.
pub fn rat_inverse(m: &RatMatrix) -> Option<RatMatrix> {
    let n = m.len();
    let mut a: RatMatrix = m.clone();
    let mut inv: RatMatrix = (0..n)
        .map(|i| (0..n).map(|j| if i == j { BigRational::one() } else { BigRational::zero() }).collect())
        .collect();
    for col in 0..n {
        let piv = (col..n).find(|&i| !a[i][col].is_zero())?;
        a.swap(col, piv);
        inv.swap(col, piv);
        let p = a[col][col].clone();
        for j in 0..n {
            a[col][j] = &a[col][j] / &p;
            inv[col][j] = &inv[col][j] / &p;
        }
        for i in 0..n {
            if i != col && !a[i][col].is_zero() {
                let f = a[i][col].clone();
                for j in 0..n {
                    let (x, y) = (&f * &a[col][j], &f * &inv[col][j]);
                    a[i][j] -= x;
                    inv[i][j] -= y;
                }
            }
        }
    }
    Some(inv)
}

/// Coordinates `X` with `X * basis = rows`, when the rows lie in the rational
/// span of the (independent) basis rows.
pub fn coordinates_in(rows: &IntMatrix, basis: &IntMatrix) -> Option<RatMatrix> {
    let k = basis.len();
    let bt = to_rational(basis);
    // normal equations: X (B B^T) = R B^T
    let gram: RatMatrix = (0..k)
        .map(|i| (0..k).map(|j| bt[i].iter().zip(&bt[j]).map(|(a, b)| a * b).sum()).collect())
        .collect();
    let ginv = rat_inverse(&gram)?;
    let mut out = Vec::with_capacity(rows.len());
    for r in rows {
        let rr: Vec<BigRational> = r.iter().map(|x| BigRational::from_integer(x.clone())).collect();
        let rb: Vec<BigRational> = (0..k).map(|j| rr.iter().zip(&bt[j]).map(|(a, b)| a * b).sum()).collect();
        let x: Vec<BigRational> = (0..k).map(|j| (0..k).map(|i| &rb[i] * &ginv[i][j]).sum()).collect();
        let back: Vec<BigRational> = (0..rr.len()).map(|c| (0..k).map(|i| &x[i] * &bt[i][c]).sum()).collect();
        if back != rr {
            return None;
        }
        out.push(x);
    }
    Some(out)
}
