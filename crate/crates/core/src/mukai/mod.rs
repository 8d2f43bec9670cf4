//! The extended Mukai lattice `4U + 2E8(-1)` of a degree-two K3 surface with
//! a Brauer class: fixtures for `Pic(S,B)` and `T_S(B)`, the two splittings
//! `U_i + Lambda_i`, formal twisted periods, Brauer-class parity and the
//! transfer of Brauer classes between the two sides.

mod brauer;
mod overlattice;
mod period;


pub use brauer::{
    brauer_trivial_by_kernel, brauer_trivial_by_parity, kernel_lattice, non_extension_certificate, NonExtensionCertificate, Side, TauClass,
    TAIL_LABELS,
};
pub use overlattice::{
    embedding_index_fixture, even_index_two_overlattices, index_two_embedding_count, index_two_embedding_count_fixture,
    transcendental_reference,
};
pub use period::{project_period, tau_transfer, FormalPeriod, TransferPattern};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::lattice::matrix::{determinant, rat_inverse, to_rational, RatMatrix};
use crate::lattice::{
    direct_sum_all, genus_invariants, orthogonal_complement, same_genus_invariants, signature, IntMatrix, Lattice, LatticeError,
    Sublattice,
};

#[derive(Debug, Error)]
pub enum MukaiError {
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("non-integral result: {0}")]
    NonIntegral(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("inconclusive: {0}")]
    Inconclusive(String),
}

/// Labels of the rank-24 basis: four hyperbolic planes, then two `E8(-1)`.
pub fn lambda_tilde_labels() -> Vec<String> {
    let mut out: Vec<String> = ["i1", "i2", "j1", "j2", "m1", "m2", "n1", "n2"].iter().map(|s| s.to_string()).collect();
    out.extend((1..=8).map(|k| format!("e{k}")));
    out.extend((1..=8).map(|k| format!("f{k}")));
    out
}

/// `4U + 2E8(-1)` on the basis `i1, i2, j1, j2, m1, m2, n1, n2, e1..e8, f1..f8`.
pub fn lambda_tilde() -> Lattice {
    let labels = lambda_tilde_labels();
    let l = direct_sum_all(&[Lattice::u(), Lattice::u(), Lattice::u(), Lattice::u(), Lattice::e8_negative(), Lattice::e8_negative()]);
    let refs: Vec<&str> = labels.iter().map(String::as_str).collect();
    l.with_labels(&refs).expect("24 labels")
}

/// Mukai vector `(r, c, s)` with `c` in a fixed basis of `H^2`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MukaiVector {
    pub r: i64,
    pub c: Vec<i64>,
    pub s: i64,
}

impl MukaiVector {
    pub fn new(r: i64, c: Vec<i64>, s: i64) -> Self {
        MukaiVector { r, c, s }
    }
}

/// `c.c' - r s' - r' s`, with `c.c'` taken in the Gram matrix `h2`.
pub fn mukai_pairing(v: &MukaiVector, w: &MukaiVector, h2: &[Vec<i64>]) -> Result<i64, MukaiError> {
    let n = h2.len();
    if v.c.len() != n || w.c.len() != n || h2.iter().any(|row| row.len() != n) {
        return Err(MukaiError::Invalid(format!("H^2 components must have length {n}")));
    }
    let mut cc = 0i64;
    for i in 0..n {
        for j in 0..n {
            cc += v.c[i] * h2[i][j] * w.c[j];
        }
    }
    Ok(cc - v.r * w.s - w.r * v.s)
}

/// Gram matrix of the `H^2` model on the basis `(H, 2B)`: `H^2 = 2`,
/// `B.H = B^2 = 0`.
pub fn h2_model_gram() -> Vec<Vec<i64>> {
    vec![vec![2, 0], vec![0, 0]]
}

/// `(0,H,0)`, `(0,0,1)`, `(2,2B,0)` in the `(H, 2B)` model.
pub fn pic_sb_mukai_vectors() -> [MukaiVector; 3] {
    [MukaiVector::new(0, vec![1, 0], 0), MukaiVector::new(0, vec![0, 0], 1), MukaiVector::new(2, vec![0, 1], 0)]
}

/// Everything derived from the normalized placement `eta = i1 + i2`,
/// `Pic(X) = <m1+n1, m2+n2>`, built once.
#[derive(Clone, Debug)]
pub struct MukaiFixture {
    pub lattice: Lattice,
    pub eta: Vec<BigInt>,
    pub pic_sb: Sublattice,
    pub t_sb: Sublattice,
    pub splittings: [Splitting; 2],
}

/// One side of the decomposition `Lambda~ = U_i + Lambda_i`.
#[derive(Clone, Debug)]
pub struct Splitting {
    pub side: Side,
    pub u: Sublattice,
    /// `Lambda_i` on the named basis `ubar_1, ubar_2, i1, i2, j1, j2, e1..e8, f1..f8`.
    pub lambda: Sublattice,
    pub basis_labels: Vec<String>,
    /// `B~_i = (m_i - n_i)/2` in `Lambda~` coordinates.
    pub b_tilde: Vec<BigRational>,
    /// Orthogonal projection onto `Lambda_i (x) Q`, acting on coordinate columns.
    pub projection: RatMatrix,
}

fn sub(l: &Lattice, gens: &[&[(&str, i64)]]) -> Result<Sublattice, MukaiError> {
    Ok(Sublattice::from_labels(l, gens)?)
}

/// `Pic(S,B) = <(0,H,0), (0,0,1), (2,2B,0)>` embedded as `i1+i2`, `m1+n1`,
/// `-(m2+n2)`; the embedding is checked to be isometric for the Mukai
/// pairing.
pub fn build_pic_sb(l: &Lattice) -> Result<Sublattice, MukaiError> {
    let s = sub(l, &[&[("i1", 1), ("i2", 1)], &[("m1", 1), ("n1", 1)], &[("m2", -1), ("n2", -1)]])?;
    let model = pic_sb_mukai_vectors();
    let h2 = h2_model_gram();
    let gram = s.gram();
    for (a, v) in model.iter().enumerate() {
        for (b, w) in model.iter().enumerate() {
            if BigInt::from(mukai_pairing(v, w, &h2)?) != gram[a][b] {
                return Err(MukaiError::Invalid(format!("embedding is not isometric at ({a},{b})")));
            }
        }
    }
    Ok(s)
}

/// `Pic(X) = <(0,0,1), (2,2B,0)>` inside `Pic(S,B)`.
pub fn build_pic_x(l: &Lattice) -> Result<Sublattice, MukaiError> {
    sub(l, &[&[("m1", 1), ("n1", 1)], &[("m2", -1), ("n2", -1)]])
}

/// `<i1-i2, m1-n1, m2-n2> + J + 2E8(-1)`, checked equal to the orthogonal
/// complement of `Pic(S,B)`.
pub fn build_t_sb(l: &Lattice, pic_sb: &Sublattice) -> Result<Sublattice, MukaiError> {
    let mut gens: IntMatrix = vec![l.vector(&[("i1", 1), ("i2", -1)])?, l.vector(&[("m1", 1), ("n1", -1)])?, l.vector(&[("m2", 1), ("n2", -1)])?];
    for name in ["j1", "j2"].iter().map(|s| s.to_string()).chain((1..=8).map(|k| format!("e{k}"))).chain((1..=8).map(|k| format!("f{k}"))) {
        gens.push(l.vector(&[(name.as_str(), 1)])?);
    }
    let t = Sublattice::new(l.clone(), gens)?;
    if !t.same_span(&orthogonal_complement(pic_sb)) {
        return Err(MukaiError::Invalid("T_S(B) differs from the complement of Pic(S,B)".into()));
    }
    Ok(t)
}

/// `<-2> + U(-2) + U + 2E8(-1)`.
pub fn t_sb_reference() -> Lattice {
    direct_sum_all(&[
        Lattice::rank_one(-2).expect("nonzero"),
        Lattice::hyperbolic(-2).expect("nonzero"),
        Lattice::u(),
        Lattice::e8_negative(),
        Lattice::e8_negative(),
    ])
}

/// The K3 lattice `3U + 2E8(-1)`.
pub fn k3_lattice() -> Lattice {
    direct_sum_all(&[Lattice::u(), Lattice::u(), Lattice::u(), Lattice::e8_negative(), Lattice::e8_negative()])
}

fn projection_onto_complement(l: &Lattice, u: &Sublattice) -> Result<RatMatrix, MukaiError> {
    let n = l.rank();
    let g = to_rational(l.gram());
    let ug = to_rational(&u.gram());
    let ginv = rat_inverse(&ug).ok_or_else(|| MukaiError::Degenerate("U has a singular Gram matrix".into()))?;
    let gens = to_rational(u.generators());
    // functionals v -> v . u_a as rows
    let funcs: RatMatrix = gens.iter().map(|ua| (0..n).map(|c| (0..n).map(|k| &ua[k] * &g[k][c]).sum()).collect()).collect();
    let k = gens.len();
    let mut p: RatMatrix = (0..n).map(|r| (0..n).map(|c| if r == c { BigRational::one() } else { BigRational::zero() }).collect()).collect();
    for a in 0..k {
        for b in 0..k {
            if ginv[a][b].is_zero() {
                continue;
            }
            for r in 0..n {
                if gens[b][r].is_zero() {
                    continue;
                }
                let coef = &ginv[a][b] * &gens[b][r];
                for c in 0..n {
                    p[r][c] -= &coef * &funcs[a][c];
                }
            }
        }
    }
    Ok(p)
}

/// `U_1 = <m1+n1, m2>`, `U_2 = <m2+n2, m1>` and their complements, with
/// `U_i = U`, `Lambda_i = U_i^perp` on the named basis and
/// `U_i + Lambda_i = Lambda~` all asserted.
pub fn define_splittings(l: &Lattice) -> Result<[Splitting; 2], MukaiError> {
    let build = |side: Side| -> Result<Splitting, MukaiError> {
        let (a, b) = match side {
            Side::One => ("1", "2"),
            Side::Two => ("2", "1"),
        };
        let (ma, mb, na, nb) = (format!("m{a}"), format!("m{b}"), format!("n{a}"), format!("n{b}"));
        let u = sub(l, &[&[(&ma, 1), (&na, 1)], &[(&mb, 1)]])?;
        if u.gram() != Lattice::u().gram().clone() {
            return Err(MukaiError::Invalid(format!("U_{a} is not a hyperbolic plane")));
        }
        let ubar = [l.vector(&[(&nb, 1), (&mb, -1)])?, l.vector(&[(&na, 1)])?];
        let mut gens: IntMatrix = ubar.to_vec();
        let mut labels = vec![format!("{nb}-{mb}"), na.clone()];
        for name in ["i1", "i2", "j1", "j2"].iter().map(|s| s.to_string()).chain((1..=8).map(|k| format!("e{k}"))).chain((1..=8).map(|k| format!("f{k}"))) {
            gens.push(l.vector(&[(name.as_str(), 1)])?);
            labels.push(name);
        }
        let lambda = Sublattice::new(l.clone(), gens)?;
        if !lambda.same_span(&orthogonal_complement(&u)) {
            return Err(MukaiError::Invalid(format!("Lambda_{a} differs from the complement of U_{a}")));
        }
        let mut all = u.generators().clone();
        all.extend(lambda.generators().iter().cloned());
        if !determinant(&all).abs().is_one() {
            return Err(MukaiError::Invalid(format!("U_{a} + Lambda_{a} is not all of the lattice")));
        }
        let half = BigRational::new(BigInt::one(), BigInt::from(2));
        let b_tilde = l.vector(&[(&ma, 1), (&na, -1)])?.into_iter().map(|x| BigRational::from_integer(x) * &half).collect();
        let projection = projection_onto_complement(l, &u)?;
        Ok(Splitting { side, u, lambda, basis_labels: labels, b_tilde, projection })
    };
    Ok([build(Side::One)?, build(Side::Two)?])
}

impl MukaiFixture {
    pub fn new() -> Result<Self, MukaiError> {
        let lattice = lambda_tilde();
        let eta = lattice.vector(&[("i1", 1), ("i2", 1)])?;
        let pic_sb = build_pic_sb(&lattice)?;
        let t_sb = build_t_sb(&lattice, &pic_sb)?;
        let splittings = define_splittings(&lattice)?;
        Ok(MukaiFixture { lattice, eta, pic_sb, t_sb, splittings })
    }

    pub fn splitting(&self, side: Side) -> &Splitting {
        match side {
            Side::One => &self.splittings[0],
            Side::Two => &self.splittings[1],
        }
    }
}

/// Verdicts of the lattice-theoretic checks, for reporting.
#[derive(Clone, Debug, Serialize)]
pub struct MukaiReport {
    pub lambda_tilde_even: bool,
    pub lambda_tilde_unimodular: bool,
    pub lambda_tilde_signature: (usize, usize),
    pub eta_square: i64,
    pub pic_x_gram: Vec<Vec<i64>>,
    pub pic_x_genus_equal_u2: bool,
    pub t_sb_rank: usize,
    pub t_sb_signature: (usize, usize),
    pub t_sb_discriminant_group: Vec<String>,
    pub t_sb_genus_equal_reference: bool,
    pub lambda_genus_equal_k3: [bool; 2],
    pub projections: [Vec<(String, String)>; 2],
    pub transfer: TransferPattern,
    pub non_extension: NonExtensionCertificate,
    pub index_two_embeddings: usize,
    pub embedding_index: String,
}

fn small(m: &IntMatrix) -> Vec<Vec<i64>> {
    m.iter().map(|r| r.iter().map(|x| i64::try_from(x).expect("small entry")).collect()).collect()
}

impl MukaiReport {
    pub fn all_verified(&self) -> bool {
        self.lambda_tilde_even
            && self.lambda_tilde_unimodular
            && self.lambda_tilde_signature == (4, 20)
            && self.eta_square == 2
            && self.pic_x_genus_equal_u2
            && self.t_sb_rank == 21
            && self.t_sb_signature == (2, 19)
            && self.t_sb_genus_equal_reference
            && self.lambda_genus_equal_k3 == [true, true]
            && self.transfer.identity_holds
            && self.non_extension.verified()
            && self.index_two_embeddings == 2
            && self.embedding_index == "2"
    }
}

/// Runs every fixture check and the `(gamma1, gamma2) = (1, 2)` transfer and
/// certificate.
pub fn verify_report(fx: &MukaiFixture) -> Result<MukaiReport, MukaiError> {
    let l = &fx.lattice;
    let pic_x = build_pic_x(l)?;
    let u2 = Lattice::hyperbolic(2)?;
    let t = fx.t_sb.as_lattice();
    let k3 = k3_lattice();
    let x = FormalPeriod::generic(l);
    let projections = [project_period(fx, &x, Side::One)?.display_in(fx, Side::One)?, project_period(fx, &x, Side::Two)?.display_in(fx, Side::Two)?];
    let tau1 = TauClass::new(Side::One, 1, 2, &[])?;
    let tau2 = tau_transfer(fx, &tau1, &x)?;
    Ok(MukaiReport {
        lambda_tilde_even: l.is_even(),
        lambda_tilde_unimodular: l.is_unimodular(),
        lambda_tilde_signature: signature(l)?,
        eta_square: i64::try_from(l.pair(&fx.eta, &fx.eta)).expect("small"),
        pic_x_gram: small(&pic_x.gram()),
        pic_x_genus_equal_u2: same_genus_invariants(&pic_x.as_lattice(), &u2)?,
        t_sb_rank: fx.t_sb.rank(),
        t_sb_signature: signature(&t)?,
        t_sb_discriminant_group: genus_invariants(&t)?.discriminant_group.iter().map(|d| d.to_string()).collect(),
        t_sb_genus_equal_reference: same_genus_invariants(&t, &t_sb_reference())?,
        lambda_genus_equal_k3: [
            same_genus_invariants(&fx.splittings[0].lambda.as_lattice(), &k3)?,
            same_genus_invariants(&fx.splittings[1].lambda.as_lattice(), &k3)?,
        ],
        projections,
        transfer: TransferPattern::compare(fx, &tau1, &tau2, &x)?,
        non_extension: non_extension_certificate(fx, &tau1)?,
        index_two_embeddings: index_two_embedding_count_fixture(fx)?,
        embedding_index: embedding_index_fixture(fx)?.to_string(),
    })
}
