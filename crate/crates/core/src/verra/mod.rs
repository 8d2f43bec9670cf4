//! Verra threefolds totally tangent to the diagonal of P^2 x P^2, their two
//! discriminant sextics, and the finite-field certification pipeline.
//!
//! A member is the (2,2) form
//! `q(x)q(y) + (x0y1-x1y0)l1 + (x0y2-x2y0)l2 + (x1y2-x2y1)l3`
//! whose restriction to the diagonal is the double conic `q(x)^2`.

mod certify;
mod equivalence;
mod points;
mod smooth;

pub use certify::{
    certify, CertificationReport, CertifyOptions, Conclusion, DEFAULT_PGL3_PRIME, DEFAULT_POINT_PRIMES, DEFAULT_PRIME, EVIDENCE_LABEL,
};
pub use equivalence::{pgl3_system, sextics_projectively_equivalent, EquivalenceMode};
pub use points::{count_points_plane_curve, MAX_POINT_COUNT_PRIME};
pub use smooth::{is_smooth_plane_curve, is_smooth_verra_threefold};

use std::sync::Arc;

use rand::{RngExt, SeedableRng};
use rand_pcg::Pcg64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{poly_det, var_names, AlgebraError, Field, Monomial, MultiPoly, PrimeField, Rationals, Ring, ScalarTag};
use crate::ideal::IdealError;

pub const X_VARS: [&str; 3] = ["x0", "x1", "x2"];
pub const Y_VARS: [&str; 3] = ["y0", "y1", "y2"];

/// Exponents of the six quadratic monomials in the order V0..V5:
/// `a0^2, a0a1, a1^2, a0a2, a1a2, a2^2`.
pub const QUADRATIC_SLOTS: [[u16; 3]; 6] = [[2, 0, 0], [1, 1, 0], [0, 2, 0], [1, 0, 1], [0, 1, 1], [0, 0, 2]];

/// Range of the integer coefficients drawn for members over the rationals.
pub const INTEGER_COEFF_BOUND: i64 = 1000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum VerraError {
    #[error("malformed input: {0}")]
    Structural(String),
    #[error("unsupported characteristic {0}: need p > 3")]
    UnsupportedCharacteristic(u64),
    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

impl From<IdealError> for VerraError {
    fn from(e: IdealError) -> Self {
        match e {
            IdealError::BudgetExceeded(s) => VerraError::BudgetExceeded(s),
            IdealError::Algebra(a) => VerraError::Algebra(a),
            IdealError::Invalid(s) => VerraError::Structural(s),
        }
    }
}

impl VerraError {
    pub fn is_budget(&self) -> bool {
        matches!(self, VerraError::BudgetExceeded(_))
    }
}

pub fn xy_vars() -> Arc<[String]> {
    var_names(&["x0", "x1", "x2", "y0", "y1", "y2"])
}

/// A member of the family. All polynomials live in `x0..x2, y0..y2`.
#[derive(Clone, Debug, PartialEq)]
pub struct VerraMember<F: Field> {
    pub q: MultiPoly<F>,
    pub l: [MultiPoly<F>; 3],
    pub f: MultiPoly<F>,
    pub seed: Option<u64>,
}

/// Discriminant sextics: `s1` in `y0..y2` (fibers of the projection to the
/// y-plane), `s2` in `x0..x2`.
#[derive(Clone, Debug, PartialEq)]
pub struct SexticPair<F: Field> {
    pub s1: MultiPoly<F>,
    pub s2: MultiPoly<F>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MemberJson {
    pub seed: Option<u64>,
    pub ring: ScalarTag,
    pub q: String,
    pub l1: String,
    pub l2: String,
    pub l3: String,
    #[serde(rename = "F")]
    pub f: String,
}

fn bidegree<F: Field>(p: &MultiPoly<F>) -> Result<Option<(u32, u32)>, VerraError> {
    if p.is_zero() {
        return Ok(None);
    }
    let dx = p.homogeneous_degree_in(&X_VARS)?;
    let dy = p.homogeneous_degree_in(&Y_VARS)?;
    match (dx, dy) {
        (Some(a), Some(b)) => Ok(Some((a, b))),
        _ => Err(VerraError::Structural(format!("{p} is not bihomogeneous"))),
    }
}

fn into_xy<F: Field>(p: &MultiPoly<F>, what: &str) -> Result<MultiPoly<F>, VerraError> {
    p.with_vars(xy_vars())
        .map_err(|e| VerraError::Structural(format!("{what} uses variables outside x0..x2, y0..y2: {e}")))
}

/// Renames the variables of `p` positionally.
pub fn rename_vars<R: Ring>(p: &MultiPoly<R>, names: &[&str]) -> Result<MultiPoly<R>, AlgebraError> {
    if names.len() != p.nvars() {
        return Err(AlgebraError::DimensionMismatch(format!("{} names for {} variables", names.len(), p.nvars())));
    }
    Ok(MultiPoly::from_terms(p.ring().clone(), var_names(names), p.terms().map(|(m, c)| (m.clone(), c.clone()))))
}

/// `q(y)` from `q(x)`.
fn x_to_y<F: Field>(q: &MultiPoly<F>) -> Result<MultiPoly<F>, AlgebraError> {
    let vars = xy_vars();
    let images: Vec<(&str, MultiPoly<F>)> = X_VARS
        .iter()
        .zip(Y_VARS)
        .map(|(x, y)| Ok((*x, MultiPoly::var(q.ring().clone(), vars.clone(), y)?)))
        .collect::<Result<_, AlgebraError>>()?;
    q.substitute(vars, &images)
}

/// The x <-> y swap on the six-variable ring.
pub fn swap_xy<F: Field>(p: &MultiPoly<F>) -> Result<MultiPoly<F>, AlgebraError> {
    let vars = xy_vars();
    let mut images: Vec<(&str, MultiPoly<F>)> = Vec::new();
    for (x, y) in X_VARS.iter().zip(Y_VARS.iter()) {
        images.push((x, MultiPoly::var(p.ring().clone(), vars.clone(), y)?));
        images.push((y, MultiPoly::var(p.ring().clone(), vars.clone(), x)?));
    }
    p.with_vars(vars.clone())?.substitute(vars, &images)
}

/// The three 2x2 minors `x0y1-x1y0, x0y2-x2y0, x1y2-x2y1`.
pub fn diagonal_minors<F: Field>(field: &F) -> [MultiPoly<F>; 3] {
    let vars = xy_vars();
    let v = |n: &str| MultiPoly::var(field.clone(), vars.clone(), n).expect("known variable");
    let minor = |a: usize, b: usize| &(&v(X_VARS[a]) * &v(Y_VARS[b])) - &(&v(X_VARS[b]) * &v(Y_VARS[a]));
    [minor(0, 1), minor(0, 2), minor(1, 2)]
}

/// Assembles `F = q(x)q(y) + sum minor_i * l_i`.
pub fn build_verra<F: Field>(q: &MultiPoly<F>, l: [&MultiPoly<F>; 3]) -> Result<VerraMember<F>, VerraError> {
    let field = q.ring().clone();
    let q = into_xy(q, "q")?;
    match bidegree(&q)? {
        Some((2, 0)) => {}
        Some(d) => return Err(VerraError::Structural(format!("q must be a quadric in x0..x2, got bidegree {d:?}"))),
        None => return Err(VerraError::Structural("q must be nonzero".into())),
    }
    let mut ls = Vec::with_capacity(3);
    for (i, li) in l.iter().enumerate() {
        if li.ring() != &field {
            return Err(AlgebraError::RingMismatch(format!("l{} over another ring", i + 1)).into());
        }
        let li = into_xy(li, "l_i")?;
        match bidegree(&li)? {
            None | Some((1, 1)) => {}
            Some(d) => return Err(VerraError::Structural(format!("l{} must have bidegree (1,1), got {d:?}", i + 1))),
        }
        ls.push(li);
    }
    let minors = diagonal_minors(&field);
    let mut f = &q * &x_to_y(&q)?;
    for (m, li) in minors.iter().zip(&ls) {
        f = &f + &(m * li);
    }
    let l: [MultiPoly<F>; 3] = ls.try_into().expect("three forms");
    Ok(VerraMember { q, l, f, seed: None })
}

/// `x0^2 + x1^2 + x2^2`.
pub fn fermat_quadric<F: Field>(field: &F) -> MultiPoly<F> {
    MultiPoly::parse(field.clone(), xy_vars(), "x0^2 + x1^2 + x2^2").expect("valid literal")
}

fn draw<F: Field>(field: &F, rng: &mut Pcg64) -> F::Elem {
    match field.characteristic() {
        0 => field.from_i64(rng.random_range(-INTEGER_COEFF_BOUND..=INTEGER_COEFF_BOUND)),
        p => field.from_bigint(&rng.random_range(0..p).into()),
    }
}

fn linear_form<F: Field>(field: &F, names: [&str; 3], coeffs: &[F::Elem]) -> MultiPoly<F> {
    let vars = xy_vars();
    let mut out = MultiPoly::zero(field.clone(), vars.clone());
    for (n, c) in names.iter().zip(coeffs) {
        out = &out + &MultiPoly::var(field.clone(), vars.clone(), n).expect("known variable").scale(c);
    }
    out
}

/// Seeded random member drawn with a PCG-64 generator.
///
/// Draw order: six coefficients of `q` in the slot order V0..V5 (skipped when
/// `fixed_fermat` is set), then for each `l_i` three coefficients of an
/// x-linear form and three of a y-linear form; `l_i` is their product.
/// Over `F_p` coefficients are uniform in `[0, p)`; over the rationals they
/// are integers in `[-INTEGER_COEFF_BOUND, INTEGER_COEFF_BOUND]`.
pub fn random_member<F: Field>(seed: u64, field: &F, fixed_fermat: bool) -> VerraMember<F> {
    let mut rng = Pcg64::seed_from_u64(seed);
    let vars = xy_vars();
    let q = if fixed_fermat {
        for _ in 0..6 {
            draw(field, &mut rng);
        }
        fermat_quadric(field)
    } else {
        let mut q = MultiPoly::zero(field.clone(), vars.clone());
        for slot in QUADRATIC_SLOTS {
            let c = draw(field, &mut rng);
            q = &q + &MultiPoly::monomial(field.clone(), vars.clone(), &[slot[0], slot[1], slot[2], 0, 0, 0], c);
        }
        q
    };
    let mut ls = Vec::with_capacity(3);
    for _ in 0..3 {
        let a: Vec<F::Elem> = (0..3).map(|_| draw(field, &mut rng)).collect();
        let b: Vec<F::Elem> = (0..3).map(|_| draw(field, &mut rng)).collect();
        ls.push(&linear_form(field, X_VARS, &a) * &linear_form(field, Y_VARS, &b));
    }
    let mut m = build_verra(&q, [&ls[0], &ls[1], &ls[2]]).expect("random data has the right shape");
    m.seed = Some(seed);
    m
}

impl<F: Field> VerraMember<F> {
    pub fn field(&self) -> &F {
        self.q.ring()
    }

    /// Recomputes `F` from `q` and the `l_i`.
    pub fn recompute(&self) -> Result<MultiPoly<F>, VerraError> {
        Ok(build_verra(&self.q, [&self.l[0], &self.l[1], &self.l[2]])?.f)
    }

    /// `F(x, x)`, as a polynomial in the six-variable ring.
    pub fn restrict_to_diagonal(&self) -> Result<MultiPoly<F>, VerraError> {
        let vars = xy_vars();
        let images: Vec<(&str, MultiPoly<F>)> = Y_VARS
            .iter()
            .zip(X_VARS)
            .map(|(y, x)| Ok((*y, MultiPoly::var(self.field().clone(), vars.clone(), x)?)))
            .collect::<Result<_, AlgebraError>>()?;
        Ok(self.f.substitute(vars, &images)?)
    }

    /// Same member with every `l_i` replaced by zero.
    pub fn degenerate(&self) -> Self {
        let z = MultiPoly::zero(self.field().clone(), xy_vars());
        let mut m = build_verra(&self.q, [&z, &z, &z]).expect("q already validated");
        m.seed = self.seed;
        m
    }

    pub fn to_json(&self) -> MemberJson {
        MemberJson {
            seed: self.seed,
            ring: self.field().tag(),
            q: self.q.to_string(),
            l1: self.l[0].to_string(),
            l2: self.l[1].to_string(),
            l3: self.l[2].to_string(),
            f: self.f.to_string(),
        }
    }
}

impl VerraMember<Rationals> {
    /// Coefficient-wise reduction of an integral member modulo `p`.
    pub fn reduce_mod(&self, field: &PrimeField) -> Result<VerraMember<PrimeField>, VerraError> {
        let red = |p: &MultiPoly<Rationals>| reduce_poly(p, field);
        let mut m = build_verra(&red(&self.q)?, [&red(&self.l[0])?, &red(&self.l[1])?, &red(&self.l[2])?])
            .map_err(|_| VerraError::Structural(format!("q vanishes modulo {}", field.modulus())))?;
        m.seed = self.seed;
        Ok(m)
    }
}

/// Reduces a polynomial with rational coefficients modulo `p`; fails when a
/// denominator is divisible by `p`.
pub fn reduce_poly(p: &MultiPoly<Rationals>, field: &PrimeField) -> Result<MultiPoly<PrimeField>, VerraError> {
    let mut bad = false;
    let out = p.map_coeffs(*field, |c| {
        field.reduce_rational(c).unwrap_or_else(|| {
            bad = true;
            0
        })
    });
    if bad {
        return Err(VerraError::Structural(format!("denominator divisible by {}", field.modulus())));
    }
    Ok(out)
}

fn check_characteristic<F: Field>(field: &F) -> Result<(), VerraError> {
    match field.characteristic() {
        p @ (2 | 3) => Err(VerraError::UnsupportedCharacteristic(p)),
        _ => Ok(()),
    }
}

/// Determinant of the Hessian-style matrix
/// `[[2V0, V1, V3], [V1, 2V2, V4], [V3, V4, 2V5]]` where `V0..V5` are the
/// coefficients of `f` as a quadratic form in `fiber`, moved to `base`.
fn fiber_discriminant<F: Field>(f: &MultiPoly<F>, fiber: [&str; 3], base: [&str; 3]) -> Result<MultiPoly<F>, VerraError> {
    let parts = f.coefficients(&fiber)?;
    if let Some((m, _)) = parts.iter().find(|(m, _)| m.degree() != 2) {
        return Err(VerraError::Structural(format!("F is not quadratic in {fiber:?} (monomial {:?})", m.exponents())));
    }
    let base_vars = var_names(&base);
    let v: Vec<MultiPoly<F>> = QUADRATIC_SLOTS
        .iter()
        .map(|slot| {
            let c = parts
                .iter()
                .find(|(m, _)| m == &Monomial::from_exponents(slot))
                .map(|(_, c)| c.clone())
                .unwrap_or_else(|| MultiPoly::zero(f.ring().clone(), f.vars().clone()));
            c.with_vars(base_vars.clone())
        })
        .collect::<Result<_, _>>()?;
    let two = f.ring().from_i64(2);
    let m = vec![
        vec![v[0].scale(&two), v[1].clone(), v[3].clone()],
        vec![v[1].clone(), v[2].scale(&two), v[4].clone()],
        vec![v[3].clone(), v[4].clone(), v[5].scale(&two)],
    ];
    Ok(poly_det(&m)?)
}

/// The two discriminant sextics. `s1` comes from viewing `F` as a quadratic
/// form in `x` over the y-plane, `s2` symmetrically.
pub fn discriminant_sextics<F: Field>(v: &VerraMember<F>) -> Result<SexticPair<F>, VerraError> {
    if v.field().characteristic() == 2 {
        return Err(VerraError::UnsupportedCharacteristic(2));
    }
    Ok(SexticPair {
        s1: fiber_discriminant(&v.f, X_VARS, Y_VARS)?,
        s2: fiber_discriminant(&v.f, Y_VARS, X_VARS)?,
    })
}

/// Dimension of the family: quadric, three (1,1) forms, minus the relations
/// among the `l_i`, scaling and the diagonal PGL_3.
pub fn family_dimension() -> i64 {
    let quadric = 6;
    let bilinear = 3 * 9;
    let syzygies = 6;
    let scaling = 1;
    let pgl3 = 8;
    quadric + bilinear - syzygies - scaling - pgl3
}

#[cfg(test)]
mod tests;
