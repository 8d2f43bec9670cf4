//! Counting points of plane curves over a prime field.
//!
//! On each affine line `x0 = 1, x1 = a` the curve restricts to a univariate
//! polynomial `g(t)`; its number of distinct roots in `F_p` is
//! `deg gcd(g, t^p - t)`.

use crate::algebra::{MultiPoly, PrimeField};

use super::VerraError;

/// Largest prime accepted by [`count_points_plane_curve`].
pub const MAX_POINT_COUNT_PRIME: u64 = 20_011;

fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn inv_mod(a: u64, p: u64) -> u64 {
    let mut acc = 1;
    let (mut base, mut e) = (a % p, p - 2);
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, base, p);
        }
        base = mul_mod(base, base, p);
        e >>= 1;
    }
    acc
}

fn trim(a: &mut Vec<u64>) {
    while a.last() == Some(&0) {
        a.pop();
    }
}

/// Remainder of `a` modulo the nonzero polynomial `b` (coefficients low to high).
fn rem(mut a: Vec<u64>, b: &[u64], p: u64) -> Vec<u64> {
    trim(&mut a);
    let db = b.len() - 1;
    let inv_lead = inv_mod(b[db], p);
    while a.len() > db {
        let k = a.len() - 1 - db;
        let c = mul_mod(*a.last().unwrap(), inv_lead, p);
        for (i, &bi) in b.iter().enumerate() {
            a[k + i] = (a[k + i] + p - mul_mod(c, bi, p)) % p;
        }
        trim(&mut a);
    }
    a
}

fn mul_rem(a: &[u64], b: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + mul_mod(x, y, p)) % p;
        }
    }
    rem(out, m, p)
}

fn gcd_degree(mut a: Vec<u64>, mut b: Vec<u64>, p: u64) -> usize {
    trim(&mut a);
    trim(&mut b);
    while !b.is_empty() {
        let r = rem(a, &b, p);
        a = b;
        b = r;
    }
    a.len().saturating_sub(1)
}

/// Number of distinct roots in `F_p` of `g` (low-to-high coefficients).
/// The zero polynomial vanishes at all `p` points.
pub(crate) fn count_roots(mut g: Vec<u64>, p: u64) -> u64 {
    trim(&mut g);
    match g.len() {
        0 => return p,
        1 => return 0,
        _ => {}
    }
    // t^p mod g by square and multiply
    let mut acc = vec![1u64];
    let mut base = rem(vec![0, 1], &g, p);
    let mut e = p;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_rem(&acc, &base, &g, p);
        }
        base = mul_rem(&base, &base, &g, p);
        e >>= 1;
    }
    // t^p - t
    if acc.len() < 2 {
        acc.resize(2, 0);
    }
    acc[1] = (acc[1] + p - 1) % p;
    gcd_degree(g, acc, p) as u64
}

/// Number of points of `f = 0` in `P^2(F_p)`; the variables of `f` are read
/// as homogeneous coordinates in their declared order.
pub fn count_points_plane_curve(f: &MultiPoly<PrimeField>) -> Result<u64, VerraError> {
    let p = f.ring().modulus();
    if p > MAX_POINT_COUNT_PRIME {
        return Err(VerraError::BudgetExceeded(format!("point count over F_{p} exceeds the bound {MAX_POINT_COUNT_PRIME}")));
    }
    if f.nvars() != 3 {
        return Err(VerraError::Structural(format!("plane curve needs 3 variables, got {}", f.nvars())));
    }
    if f.is_zero() {
        return Ok(p * p + p + 1);
    }
    if !f.is_homogeneous() {
        return Err(VerraError::Structural("plane curve must be homogeneous".into()));
    }
    let terms: Vec<([u16; 3], u64)> = f
        .terms()
        .map(|(m, c)| {
            let e = m.exponents();
            ([e[0], e[1], e[2]], *c)
        })
        .collect();
    let max_t = terms.iter().map(|(e, _)| e[2] as usize).max().unwrap_or(0);
    let pow = |a: u64, e: u16| {
        let mut r = 1u64;
        for _ in 0..e {
            r = mul_mod(r, a, p);
        }
        r
    };
    // restriction to x0 = x0v, x1 = x1v as a polynomial in x2
    let line = |x0v: u64, x1v: u64| {
        let mut g = vec![0u64; max_t + 1];
        for (e, c) in &terms {
            let v = mul_mod(mul_mod(*c, pow(x0v, e[0]), p), pow(x1v, e[1]), p);
            g[e[2] as usize] = (g[e[2] as usize] + v) % p;
        }
        g
    };
    let mut total = 0u64;
    for a in 0..p {
        total += count_roots(line(1, a), p);
    }
    total += count_roots(line(0, 1), p);
    // the point (0:0:1)
    if terms.iter().all(|(e, _)| e[0] > 0 || e[1] > 0) {
        total += 1;
    }
    Ok(total)
}
