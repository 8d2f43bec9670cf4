//! Exact coefficient rings: prime fields, the rationals and the integers.
//!
//! Rings are runtime objects (a prime field carries its modulus), so every
//! polynomial stores the ring it lives over and all coefficient arithmetic
//! goes through it.

use std::fmt::Debug;
use std::hash::Hash;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::AlgebraError;

/// Identifies the scalar ring of a polynomial in serialized form.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ScalarTag {
    Integers,
    Rationals,
    Prime { p: u64 },
}

pub trait Ring: Clone + Debug + PartialEq + Send + Sync {
    type Elem: Clone + Debug + PartialEq + Eq + Hash + Send + Sync;

    fn tag(&self) -> ScalarTag;
    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn from_bigint(&self, n: &BigInt) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;

    fn from_i64(&self, n: i64) -> Self::Elem {
        self.from_bigint(&BigInt::from(n))
    }

    fn is_one(&self, a: &Self::Elem) -> bool {
        *a == self.one()
    }

    /// True when the canonical printed form carries a leading minus sign.
    fn is_negative(&self, a: &Self::Elem) -> bool;

    /// Printed form of the absolute value (no sign).
    fn fmt_abs(&self, a: &Self::Elem) -> String;

    /// Parses an unsigned integer or `n/d` literal.
    fn parse_literal(&self, s: &str) -> Result<Self::Elem, AlgebraError>;

    /// Bit size of a coefficient; used to bound coefficient growth.
    fn bit_size(&self, _a: &Self::Elem) -> u64 {
        0
    }

    fn pow(&self, a: &Self::Elem, mut e: u32) -> Self::Elem {
        let mut base = a.clone();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }
}

pub trait Field: Ring {
    fn inv(&self, a: &Self::Elem) -> Option<Self::Elem>;
    /// 0 for the rationals.
    fn characteristic(&self) -> u64;

    fn div(&self, a: &Self::Elem, b: &Self::Elem) -> Option<Self::Elem> {
        self.inv(b).map(|ib| self.mul(a, &ib))
    }
}

/// Deterministic Miller-Rabin, exact for every `n < 2^64`.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const SMALL: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &q in &SMALL {
        if n.is_multiple_of(q) {
            return n == q;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for &a in &SMALL {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

#[inline]
fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut a: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    a %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, a, m);
        }
        a = mul_mod(a, a, m);
        e >>= 1;
    }
    acc
}

/// The field `Z/pZ`. Construction checks primality.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PrimeField {
    p: u64,
}

impl PrimeField {
    pub fn new(p: u64) -> Result<Self, AlgebraError> {
        if !is_prime_u64(p) {
            return Err(AlgebraError::NotPrime(p));
        }
        Ok(PrimeField { p })
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    pub fn element(&self, v: i64) -> PrimeFieldElement {
        PrimeFieldElement {
            value: self.from_i64(v),
            modulus: self.p,
        }
    }

    #[inline]
    pub fn reduce_i128(&self, v: i128) -> u64 {
        v.rem_euclid(self.p as i128) as u64
    }

    pub fn reduce_bigint(&self, n: &BigInt) -> u64 {
        n.mod_floor(&BigInt::from(self.p)).to_u64().unwrap()
    }

    /// Image of a rational number, `None` when the denominator vanishes mod p.
    pub fn reduce_rational(&self, r: &BigRational) -> Option<u64> {
        let num = self.reduce_bigint(r.numer());
        let den = self.reduce_bigint(r.denom());
        self.inv(&den).map(|d| mul_mod(num, d, self.p))
    }
}

impl Ring for PrimeField {
    type Elem = u64;

    fn tag(&self) -> ScalarTag {
        ScalarTag::Prime { p: self.p }
    }
    fn zero(&self) -> u64 {
        0
    }
    fn one(&self) -> u64 {
        1 % self.p
    }
    fn from_bigint(&self, n: &BigInt) -> u64 {
        self.reduce_bigint(n)
    }
    fn from_i64(&self, n: i64) -> u64 {
        self.reduce_i128(n as i128)
    }
    #[inline]
    fn add(&self, a: &u64, b: &u64) -> u64 {
        let s = *a as u128 + *b as u128;
        (s % self.p as u128) as u64
    }
    #[inline]
    fn sub(&self, a: &u64, b: &u64) -> u64 {
        if a >= b {
            a - b
        } else {
            self.p - (b - a)
        }
    }
    #[inline]
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        mul_mod(*a, *b, self.p)
    }
    #[inline]
    fn neg(&self, a: &u64) -> u64 {
        if *a == 0 {
            0
        } else {
            self.p - a
        }
    }
    #[inline]
    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }
    // symmetric representatives print as small signed integers
    fn is_negative(&self, a: &u64) -> bool {
        *a > self.p / 2
    }
    fn fmt_abs(&self, a: &u64) -> String {
        if self.is_negative(a) {
            (self.p - a).to_string()
        } else {
            a.to_string()
        }
    }
    fn parse_literal(&self, s: &str) -> Result<u64, AlgebraError> {
        let q = parse_rational(s)?;
        self.reduce_rational(&q)
            .ok_or_else(|| AlgebraError::Parse(format!("denominator of {s} vanishes mod {}", self.p)))
    }
}

impl Field for PrimeField {
    fn inv(&self, a: &u64) -> Option<u64> {
        if *a == 0 {
            None
        } else {
            Some(pow_mod(*a, self.p - 2, self.p))
        }
    }
    fn characteristic(&self) -> u64 {
        self.p
    }
}

/// A standalone element of `Z/pZ`, reduced on construction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PrimeFieldElement {
    value: u64,
    modulus: u64,
}

impl PrimeFieldElement {
    pub fn value(&self) -> u64 {
        self.value
    }
    pub fn modulus(&self) -> u64 {
        self.modulus
    }
    pub fn inverse(&self) -> Option<Self> {
        PrimeField { p: self.modulus }
            .inv(&self.value)
            .map(|value| PrimeFieldElement { value, ..*self })
    }
    fn field(self, other: Self) -> PrimeField {
        assert_eq!(self.modulus, other.modulus, "mixed prime fields");
        PrimeField { p: self.modulus }
    }
}

impl Add for PrimeFieldElement {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let value = self.field(rhs).add(&self.value, &rhs.value);
        PrimeFieldElement { value, ..self }
    }
}

impl Sub for PrimeFieldElement {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        let value = self.field(rhs).sub(&self.value, &rhs.value);
        PrimeFieldElement { value, ..self }
    }
}

impl Mul for PrimeFieldElement {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let value = self.field(rhs).mul(&self.value, &rhs.value);
        PrimeFieldElement { value, ..self }
    }
}

impl Neg for PrimeFieldElement {
    type Output = Self;
    fn neg(self) -> Self {
        let value = PrimeField { p: self.modulus }.neg(&self.value);
        PrimeFieldElement { value, ..self }
    }
}

pub(crate) fn parse_rational(s: &str) -> Result<BigRational, AlgebraError> {
    let bad = || AlgebraError::Parse(format!("bad numeric literal {s:?}"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(AlgebraError::Parse(format!("zero denominator in {s:?}")));
            }
            Ok(BigRational::new(n, d))
        }
        None => Ok(BigRational::from_integer(s.trim().parse().map_err(|_| bad())?)),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub struct Rationals;

impl Ring for Rationals {
    type Elem = BigRational;

    fn tag(&self) -> ScalarTag {
        ScalarTag::Rationals
    }
    fn zero(&self) -> BigRational {
        BigRational::zero()
    }
    fn one(&self) -> BigRational {
        BigRational::one()
    }
    fn from_bigint(&self, n: &BigInt) -> BigRational {
        BigRational::from_integer(n.clone())
    }
    fn add(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a + b
    }
    fn sub(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a - b
    }
    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a * b
    }
    fn neg(&self, a: &BigRational) -> BigRational {
        -a
    }
    fn is_zero(&self, a: &BigRational) -> bool {
        a.is_zero()
    }
    fn is_negative(&self, a: &BigRational) -> bool {
        a.is_negative()
    }
    fn fmt_abs(&self, a: &BigRational) -> String {
        let a = a.abs();
        if a.is_integer() {
            a.numer().to_string()
        } else {
            format!("{}/{}", a.numer(), a.denom())
        }
    }
    fn parse_literal(&self, s: &str) -> Result<BigRational, AlgebraError> {
        parse_rational(s)
    }
    fn bit_size(&self, a: &BigRational) -> u64 {
        a.numer().bits().max(a.denom().bits())
    }
}

impl Field for Rationals {
    fn inv(&self, a: &BigRational) -> Option<BigRational> {
        if a.is_zero() {
            None
        } else {
            Some(a.recip())
        }
    }
    fn characteristic(&self) -> u64 {
        0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub struct Integers;

impl Ring for Integers {
    type Elem = BigInt;

    fn tag(&self) -> ScalarTag {
        ScalarTag::Integers
    }
    fn zero(&self) -> BigInt {
        BigInt::zero()
    }
    fn one(&self) -> BigInt {
        BigInt::one()
    }
    fn from_bigint(&self, n: &BigInt) -> BigInt {
        n.clone()
    }
    fn add(&self, a: &BigInt, b: &BigInt) -> BigInt {
        a + b
    }
    fn sub(&self, a: &BigInt, b: &BigInt) -> BigInt {
        a - b
    }
    fn mul(&self, a: &BigInt, b: &BigInt) -> BigInt {
        a * b
    }
    fn neg(&self, a: &BigInt) -> BigInt {
        -a
    }
    fn is_zero(&self, a: &BigInt) -> bool {
        a.is_zero()
    }
    fn is_negative(&self, a: &BigInt) -> bool {
        a.is_negative()
    }
    fn fmt_abs(&self, a: &BigInt) -> String {
        a.abs().to_string()
    }
    fn parse_literal(&self, s: &str) -> Result<BigInt, AlgebraError> {
        let q = parse_rational(s)?;
        if !q.is_integer() {
            return Err(AlgebraError::Parse(format!("{s:?} is not an integer")));
        }
        Ok(q.to_integer())
    }
    fn bit_size(&self, a: &BigInt) -> u64 {
        a.bits()
    }
}
