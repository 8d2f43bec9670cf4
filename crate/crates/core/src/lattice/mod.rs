//! Integer lattices given by Gram matrices on named bases, and sublattices
//! given by generator rows in ambient coordinates.

mod genus;
pub mod matrix;

pub use genus::{genus_invariants, same_genus_invariants, signature, DiscriminantForm, GenusInvariants, Parity, MAX_DISCRIMINANT_ORDER};
pub use matrix::{smith_normal_form, IntMatrix, Smith};
pub(crate) use genus::discriminant_elements;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use matrix::{coordinates_in, determinant, integer_kernel, mul, transpose};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LatticeError {
    #[error("invalid lattice data: {0}")]
    Invalid(String),
    #[error("degenerate form: {0}")]
    Degenerate(String),
    #[error("inconclusive: {0}")]
    Inconclusive(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lattice {
    gram: IntMatrix,
    labels: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeJson {
    pub labels: Vec<String>,
    pub gram: Vec<Vec<i64>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SublatticeJson {
    pub ambient: LatticeJson,
    pub generators: Vec<Vec<i64>>,
}

fn to_i64_rows(m: &IntMatrix) -> Result<Vec<Vec<i64>>, LatticeError> {
    m.iter()
        .map(|r| r.iter().map(|x| x.to_i64().ok_or_else(|| LatticeError::Invalid(format!("{x} does not fit in 64 bits")))).collect())
        .collect()
}

impl Lattice {
    pub fn new(gram: IntMatrix, labels: Vec<String>) -> Result<Self, LatticeError> {
        let n = gram.len();
        if gram.iter().any(|r| r.len() != n) {
            return Err(LatticeError::Invalid("Gram matrix is not square".into()));
        }
        if labels.len() != n {
            return Err(LatticeError::Invalid(format!("{} labels for rank {n}", labels.len())));
        }
        for i in 0..n {
            for j in 0..i {
                if gram[i][j] != gram[j][i] {
                    return Err(LatticeError::Invalid(format!("Gram matrix not symmetric at ({i},{j})")));
                }
            }
        }
        Ok(Lattice { gram, labels })
    }

    pub fn from_i64(gram: &[Vec<i64>], labels: &[&str]) -> Result<Self, LatticeError> {
        Lattice::new(matrix::from_i64(gram), labels.iter().map(|s| s.to_string()).collect())
    }

    /// The rank-0 lattice.
    pub fn empty() -> Self {
        Lattice { gram: Vec::new(), labels: Vec::new() }
    }

    /// Hyperbolic plane `U(n)`; `n = 1` gives `U`.
    pub fn hyperbolic(n: i64) -> Result<Self, LatticeError> {
        if n == 0 {
            return Err(LatticeError::Invalid("U(0) is degenerate".into()));
        }
        Lattice::from_i64(&[vec![0, n], vec![n, 0]], &["u1", "u2"])
    }

    pub fn u() -> Self {
        Lattice::hyperbolic(1).expect("valid")
    }

    /// Negative definite `E8(-1)`: diagonal `-2`, `+1` on each Dynkin edge.
    /// Nodes `e1 - ... - e7` form a chain and `e8` hangs off `e5`.
    pub fn e8_negative() -> Self {
        let edges = [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 6), (4, 7)];
        let mut g = vec![vec![0i64; 8]; 8];
        for (i, row) in g.iter_mut().enumerate() {
            row[i] = -2;
        }
        for (a, b) in edges {
            g[a][b] = 1;
            g[b][a] = 1;
        }
        let labels: Vec<String> = (1..=8).map(|i| format!("e{i}")).collect();
        Lattice::new(matrix::from_i64(&g), labels).expect("valid")
    }

    /// Rank-one lattice `<k>`.
    pub fn rank_one(k: i64) -> Result<Self, LatticeError> {
        if k == 0 {
            return Err(LatticeError::Invalid("<0> is degenerate".into()));
        }
        Lattice::from_i64(&[vec![k]], &["v"])
    }

    pub fn with_labels(mut self, labels: &[&str]) -> Result<Self, LatticeError> {
        if labels.len() != self.rank() {
            return Err(LatticeError::Invalid(format!("{} labels for rank {}", labels.len(), self.rank())));
        }
        self.labels = labels.iter().map(|s| s.to_string()).collect();
        Ok(self)
    }

    pub fn gram(&self) -> &IntMatrix {
        &self.gram
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn rank(&self) -> usize {
        self.gram.len()
    }

    pub fn index_of(&self, label: &str) -> Result<usize, LatticeError> {
        self.labels.iter().position(|l| l == label).ok_or_else(|| LatticeError::Invalid(format!("no basis vector {label:?}")))
    }

    pub fn determinant(&self) -> BigInt {
        determinant(&self.gram)
    }

    pub fn is_even(&self) -> bool {
        (0..self.rank()).all(|i| self.gram[i][i].is_even())
    }

    pub fn is_unimodular(&self) -> bool {
        self.determinant().abs() == BigInt::from(1)
    }

    pub fn pair(&self, a: &[BigInt], b: &[BigInt]) -> BigInt {
        let gb = matrix::mat_vec(&self.gram, b);
        a.iter().zip(&gb).map(|(x, y)| x * y).sum()
    }

    /// Coordinate vector from `(label, coefficient)` pairs.
    pub fn vector(&self, parts: &[(&str, i64)]) -> Result<Vec<BigInt>, LatticeError> {
        let mut v = vec![BigInt::zero(); self.rank()];
        for (label, c) in parts {
            v[self.index_of(label)?] += BigInt::from(*c);
        }
        Ok(v)
    }

    pub fn to_json(&self) -> Result<LatticeJson, LatticeError> {
        Ok(LatticeJson { labels: self.labels.clone(), gram: to_i64_rows(&self.gram)? })
    }

    pub fn from_json(j: &LatticeJson) -> Result<Self, LatticeError> {
        Lattice::new(matrix::from_i64(&j.gram), j.labels.clone())
    }
}

/// Orthogonal direct sum; repeated labels get a numeric suffix.
pub fn direct_sum(a: &Lattice, b: &Lattice) -> Lattice {
    let n = a.rank() + b.rank();
    let mut gram = matrix::zeros(n, n);
    for i in 0..a.rank() {
        for j in 0..a.rank() {
            gram[i][j] = a.gram[i][j].clone();
        }
    }
    for i in 0..b.rank() {
        for j in 0..b.rank() {
            gram[a.rank() + i][a.rank() + j] = b.gram[i][j].clone();
        }
    }
    let mut labels = a.labels.clone();
    for l in &b.labels {
        let mut name = l.clone();
        let mut k = 2;
        while labels.contains(&name) {
            name = format!("{l}_{k}");
            k += 1;
        }
        labels.push(name);
    }
    Lattice { gram, labels }
}

pub fn direct_sum_all(parts: &[Lattice]) -> Lattice {
    parts.iter().fold(Lattice::empty(), |acc, l| direct_sum(&acc, l))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sublattice {
    ambient: Lattice,
    generators: IntMatrix,
}

impl Sublattice {
    /// Generators are rows in ambient coordinates and must be independent.
    pub fn new(ambient: Lattice, generators: IntMatrix) -> Result<Self, LatticeError> {
        if generators.iter().any(|r| r.len() != ambient.rank()) {
            return Err(LatticeError::Invalid("generator length differs from ambient rank".into()));
        }
        if matrix::rank(&generators) != generators.len() {
            return Err(LatticeError::Invalid("generators are linearly dependent".into()));
        }
        Ok(Sublattice { ambient, generators })
    }

    /// Sublattice generated by labeled combinations.
    pub fn from_labels(ambient: &Lattice, gens: &[&[(&str, i64)]]) -> Result<Self, LatticeError> {
        let rows = gens.iter().map(|g| ambient.vector(g)).collect::<Result<Vec<_>, _>>()?;
        Sublattice::new(ambient.clone(), rows)
    }

    pub fn whole(ambient: &Lattice) -> Self {
        Sublattice { ambient: ambient.clone(), generators: matrix::identity(ambient.rank()) }
    }

    pub fn ambient(&self) -> &Lattice {
        &self.ambient
    }

    pub fn generators(&self) -> &IntMatrix {
        &self.generators
    }

    pub fn rank(&self) -> usize {
        self.generators.len()
    }

    /// Induced Gram matrix `B G B^T`.
    pub fn gram(&self) -> IntMatrix {
        mul(&mul(&self.generators, &self.ambient.gram), &transpose(&self.generators))
    }

    /// The sublattice as a lattice in its own right, with basis `g1, g2, ...`.
    pub fn as_lattice(&self) -> Lattice {
        let labels = (1..=self.rank()).map(|i| format!("g{i}")).collect();
        Lattice { gram: self.gram(), labels }
    }

    /// Whether `v` lies in the integer span of the generators.
    pub fn contains(&self, v: &[BigInt]) -> bool {
        match coordinates_in(&vec![v.to_vec()], &self.generators) {
            Some(x) => x[0].iter().all(|c| c.is_integer()),
            None => false,
        }
    }

    /// Equality of integer spans.
    pub fn same_span(&self, other: &Sublattice) -> bool {
        self.ambient == other.ambient
            && self.rank() == other.rank()
            && other.generators.iter().all(|g| self.contains(g))
            && self.generators.iter().all(|g| other.contains(g))
    }

    pub fn to_json(&self) -> Result<SublatticeJson, LatticeError> {
        Ok(SublatticeJson { ambient: self.ambient.to_json()?, generators: to_i64_rows(&self.generators)? })
    }
}

/// `{v in ambient : v . s = 0 for all s in S}`, a saturated sublattice.
pub fn orthogonal_complement(s: &Sublattice) -> Sublattice {
    let n = s.ambient.rank();
    let gens = if s.rank() == 0 { matrix::identity(n) } else { integer_kernel(&mul(&s.generators, &s.ambient.gram), n) };
    Sublattice { ambient: s.ambient.clone(), generators: gens }
}

/// Primitive closure `(S tensor Q) ∩ ambient`.
pub fn saturation(s: &Sublattice) -> Sublattice {
    if s.rank() == 0 {
        return s.clone();
    }
    let sm = smith_normal_form(&s.generators);
    let vinv = matrix::rat_inverse(&matrix::to_rational(&sm.v)).expect("unimodular");
    let rows: IntMatrix = vinv[..s.rank()].iter().map(|r| r.iter().map(|x| x.to_integer()).collect()).collect();
    Sublattice { ambient: s.ambient.clone(), generators: rows }
}

/// `[saturation(S) : S]`, the product of the invariant factors of the
/// generator matrix.
pub fn sublattice_index(s: &Sublattice) -> BigInt {
    smith_normal_form(&s.generators).invariant_factors().iter().product()
}

/// `[T : S]` for `S ⊆ T` in the same ambient; `None` when the ranks differ
/// (infinite index).
pub fn index_in(s: &Sublattice, t: &Sublattice) -> Result<Option<BigInt>, LatticeError> {
    if s.ambient != t.ambient {
        return Err(LatticeError::Invalid("sublattices of different ambients".into()));
    }
    if s.rank() != t.rank() {
        return Ok(None);
    }
    let x = coordinates_in(&s.generators, &t.generators).ok_or_else(|| LatticeError::Invalid("S is not inside T ⊗ Q".into()))?;
    if x.iter().flatten().any(|c| !c.is_integer()) {
        return Err(LatticeError::Invalid("S is not contained in T".into()));
    }
    let xi: IntMatrix = x.iter().map(|r| r.iter().map(|c| c.to_integer()).collect()).collect();
    Ok(Some(determinant(&xi).abs()))
}
