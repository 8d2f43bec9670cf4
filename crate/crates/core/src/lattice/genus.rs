//! Signature, discriminant group and discriminant form.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::fmt::Display;

use serde::{Deserialize, Serialize, Serializer};

use super::matrix::{cols, smith_normal_form, RatMatrix};
use super::{Lattice, LatticeError};

/// Discriminant groups larger than this are not matched exhaustively.
pub const MAX_DISCRIMINANT_ORDER: u64 = 1024;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

/// Values of the discriminant form on the Smith generators `g_i` of `L*/L`.
///
/// `q[i]` lies in `[0, 2)` (even lattices) or `[0, 1)` (odd lattices) and
/// `b[i][j]` in `[0, 1)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DiscriminantForm {
    #[serde(serialize_with = "as_strings")]
    pub orders: Vec<BigInt>,
    #[serde(serialize_with = "as_strings")]
    pub q: Vec<BigRational>,
    #[serde(serialize_with = "as_string_rows")]
    pub b: Vec<Vec<BigRational>>,
    /// Generators as rational coordinate vectors in the lattice basis.
    #[serde(skip)]
    pub generators: Vec<Vec<BigRational>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GenusInvariants {
    pub rank: usize,
    pub signature: (usize, usize),
    pub parity: Parity,
    /// Invariant factors of `L*/L` larger than one.
    #[serde(serialize_with = "as_strings")]
    pub discriminant_group: Vec<BigInt>,
    pub discriminant_form: DiscriminantForm,
}

fn as_strings<S: Serializer, T: Display>(v: &[T], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|x| x.to_string()))
}

fn as_string_rows<S: Serializer, T: Display>(v: &[Vec<T>], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|r| r.iter().map(|x| x.to_string()).collect::<Vec<_>>()))
}

fn rat(x: &BigInt) -> BigRational {
    BigRational::from_integer(x.clone())
}

/// Representative of `x` modulo `m` in `[0, m)`.
pub(crate) fn reduce_mod(x: &BigRational, m: i64) -> BigRational {
    let m = BigRational::from_integer(m.into());
    let k = (x / &m).floor();
    x - k * m
}

/// `(n_+, n_-)` by symmetric Gaussian elimination over the rationals.
pub fn signature(l: &Lattice) -> Result<(usize, usize), LatticeError> {
    let n = l.rank();
    let mut a: RatMatrix = l.gram.iter().map(|r| r.iter().map(rat).collect()).collect();
    let (mut pos, mut neg) = (0, 0);
    for k in 0..n {
        if a[k][k].is_zero() {
            // bring a nonzero diagonal entry forward, or create one
            if let Some(j) = (k + 1..n).find(|&j| !a[j][j].is_zero()) {
                a.swap(k, j);
                for row in a.iter_mut() {
                    row.swap(k, j);
                }
            } else if let Some(j) = (k + 1..n).find(|&j| !a[k][j].is_zero()) {
                // replace e_k by e_k + e_j: diagonal becomes 2 a_kj
                for c in 0..n {
                    let v = a[j][c].clone();
                    a[k][c] += v;
                }
                for r in 0..n {
                    let v = a[r][j].clone();
                    a[r][k] += v;
                }
            } else {
                return Err(LatticeError::Degenerate(format!("Gram matrix has a null direction at step {k}")));
            }
        }
        let p = a[k][k].clone();
        if p.is_positive() {
            pos += 1;
        } else {
            neg += 1;
        }
        for i in k + 1..n {
            if a[i][k].is_zero() {
                continue;
            }
            let f = &a[i][k] / &p;
            for j in k..n {
                let v = &f * &a[k][j];
                a[i][j] -= v;
            }
            for r in k..n {
                let v = &f * &a[r][k];
                a[r][i] -= v;
            }
        }
    }
    Ok((pos, neg))
}

pub fn genus_invariants(l: &Lattice) -> Result<GenusInvariants, LatticeError> {
    let signature = signature(l)?;
    let parity = if l.is_even() { Parity::Even } else { Parity::Odd };
    let s = smith_normal_form(&l.gram);
    let n = l.rank();
    let mut orders = Vec::new();
    let mut gens: Vec<Vec<BigRational>> = Vec::new();
    for i in 0..n.min(cols(&s.d)) {
        let d = s.d[i][i].clone();
        if d > BigInt::one() {
            // g_i = V e_i / d_i
            gens.push((0..n).map(|r| BigRational::new(s.v[r][i].clone(), d.clone())).collect());
            orders.push(d);
        }
    }
    let gram: RatMatrix = l.gram.iter().map(|r| r.iter().map(rat).collect()).collect();
    let form = |a: &[BigRational], b: &[BigRational]| -> BigRational {
        let mut acc = BigRational::zero();
        for i in 0..n {
            if a[i].is_zero() {
                continue;
            }
            for j in 0..n {
                if !b[j].is_zero() && !gram[i][j].is_zero() {
                    acc += &a[i] * &gram[i][j] * &b[j];
                }
            }
        }
        acc
    };
    let qmod = if parity == Parity::Even { 2 } else { 1 };
    let q = gens.iter().map(|g| reduce_mod(&form(g, g), qmod)).collect();
    let b = gens.iter().map(|g| gens.iter().map(|h| reduce_mod(&form(g, h), 1)).collect()).collect();
    Ok(GenusInvariants {
        rank: n,
        signature,
        parity,
        discriminant_group: orders.clone(),
        discriminant_form: DiscriminantForm { orders, q, b, generators: gens },
    })
}

/// Finite quadratic form on `⊕ Z/d_i`, with the unreduced values on
/// generators kept so that values on combinations are exact.
struct FiniteForm {
    orders: Vec<u64>,
    q: Vec<BigRational>,
    b: Vec<Vec<BigRational>>,
    qmod: i64,
}

impl FiniteForm {
    fn new(f: &DiscriminantForm, qmod: i64) -> Option<Self> {
        let orders = f.orders.iter().map(|d| d.to_u64()).collect::<Option<Vec<_>>>()?;
        Some(FiniteForm { orders, q: f.q.clone(), b: f.b.clone(), qmod })
    }

    fn size(&self) -> u64 {
        self.orders.iter().product()
    }

    fn elements(&self) -> Vec<Vec<u64>> {
        let mut out = vec![vec![]];
        for &d in &self.orders {
            out = out.into_iter().flat_map(|e| (0..d).map(move |c| [e.clone(), vec![c]].concat())).collect();
        }
        out
    }

    fn q_of(&self, c: &[u64]) -> BigRational {
        let mut acc = BigRational::zero();
        for i in 0..c.len() {
            let ci = BigRational::from_integer(c[i].into());
            acc += &ci * &ci * &self.q[i];
            for j in i + 1..c.len() {
                acc += BigRational::from_integer((2 * c[i] * c[j]).into()) * &self.b[i][j];
            }
        }
        reduce_mod(&acc, self.qmod)
    }

    fn b_of(&self, x: &[u64], y: &[u64]) -> BigRational {
        let mut acc = BigRational::zero();
        for i in 0..x.len() {
            for j in 0..y.len() {
                acc += BigRational::from_integer((x[i] * y[j]).into()) * &self.b[i][j];
            }
        }
        reduce_mod(&acc, 1)
    }

    fn order_of(&self, x: &[u64]) -> u64 {
        x.iter().zip(&self.orders).fold(1u64, |acc, (&c, &d)| acc.lcm(&(d / c.gcd(&d))))
    }
}

/// Search for an isometry sending the generators of `a` to elements of `b`.
fn forms_isometric(a: &FiniteForm, b: &FiniteForm) -> bool {
    if a.size() != b.size() {
        return false;
    }
    let elems = b.elements();
    let unit = |k: usize| -> Vec<u64> { (0..a.orders.len()).map(|i| u64::from(i == k)).collect() };
    let targets: Vec<Vec<&Vec<u64>>> = (0..a.orders.len())
        .map(|k| {
            let gk = unit(k);
            elems.iter().filter(|e| b.order_of(e) == a.orders[k] && b.q_of(e) == a.q_of(&gk)).collect()
        })
        .collect();
    fn extend(k: usize, chosen: &mut Vec<Vec<u64>>, a: &FiniteForm, b: &FiniteForm, targets: &[Vec<&Vec<u64>>]) -> bool {
        if k == targets.len() {
            return true;
        }
        for t in &targets[k] {
            let ok = (0..k).all(|i| b.b_of(&chosen[i], t) == a.b[i][k]);
            if ok {
                chosen.push((*t).clone());
                if extend(k + 1, chosen, a, b, targets) {
                    return true;
                }
                chosen.pop();
            }
        }
        false
    }
    extend(0, &mut Vec::new(), a, b, &targets)
}

/// Rank, signature, parity and discriminant forms agree.
///
/// Errors with `Inconclusive` when the discriminant group has more than
/// [`MAX_DISCRIMINANT_ORDER`] elements.
pub fn same_genus_invariants(l1: &Lattice, l2: &Lattice) -> Result<bool, LatticeError> {
    let (a, b) = (genus_invariants(l1)?, genus_invariants(l2)?);
    if a.rank != b.rank || a.signature != b.signature || a.parity != b.parity || a.discriminant_group != b.discriminant_group {
        return Ok(false);
    }
    let order: BigInt = a.discriminant_group.iter().product();
    if order > BigInt::from(MAX_DISCRIMINANT_ORDER) {
        return Err(LatticeError::Inconclusive(format!("discriminant group of order {order} is too large to match")));
    }
    let qmod = if a.parity == Parity::Even { 2 } else { 1 };
    let fa = FiniteForm::new(&a.discriminant_form, qmod).expect("small orders");
    let fb = FiniteForm::new(&b.discriminant_form, qmod).expect("small orders");
    Ok(forms_isometric(&fa, &fb))
}

/// Elements of `L*/L` as coefficient vectors on the Smith generators,
/// with their q-values. Used by overlattice enumeration.
pub(crate) fn discriminant_elements(g: &GenusInvariants) -> Result<Vec<(Vec<u64>, BigRational)>, LatticeError> {
    let qmod = if g.parity == Parity::Even { 2 } else { 1 };
    let f = FiniteForm::new(&g.discriminant_form, qmod)
        .filter(|f| f.size() <= MAX_DISCRIMINANT_ORDER)
        .ok_or_else(|| LatticeError::Inconclusive("discriminant group too large to enumerate".into()))?;
    Ok(f.elements().into_iter().map(|e| {
        let q = f.q_of(&e);
        (e, q)
    }).collect())
}
