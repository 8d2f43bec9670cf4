//! Projective equivalence of ternary forms as an ideal-membership question.
//!
//! Unknowns `z1..z9` fill a matrix `A`, `lam` is the scalar and `u` forces
//! `det(A) * lam` to be invertible. The forms are equivalent over the
//! algebraic closure iff the coefficients of `S2(A x) - lam * S1(x)` together
//! with `u * det(A) * lam - 1` have a common zero.

use serde::{Deserialize, Serialize};

use crate::algebra::{poly_det, var_names, Field, MultiPoly};
use crate::ideal::{Budget, PolyIdeal};

use super::{check_characteristic, rename_vars, VerraError};

const UNKNOWNS: [&str; 11] = ["z1", "z2", "z3", "z4", "z5", "z6", "z7", "z8", "z9", "lam", "u"];
const COORDS: [&str; 3] = ["x0", "x1", "x2"];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EquivalenceMode {
    /// Compare the two sextics of a member.
    #[default]
    Pair,
    /// Compare the first sextic with itself (automorphism variant).
    SelfEquivalence,
}

/// Generators of the equivalence system in the ring `z1..z9, lam, u`.
pub fn pgl3_system<F: Field>(s1: &MultiPoly<F>, s2: &MultiPoly<F>) -> Result<Vec<MultiPoly<F>>, VerraError> {
    for s in [s1, s2] {
        if s.nvars() != 3 || s.is_zero() || !s.is_homogeneous() {
            return Err(VerraError::Structural("expected nonzero ternary forms".into()));
        }
    }
    if s1.total_degree() != s2.total_degree() {
        return Err(VerraError::Structural("forms of different degrees are never equivalent".into()));
    }
    if s1.ring() != s2.ring() {
        return Err(VerraError::Structural("forms over different fields".into()));
    }
    let field = s1.ring().clone();
    let mut all: Vec<&str> = UNKNOWNS.to_vec();
    all.extend(COORDS);
    let big = var_names(&all);
    let unknowns = var_names(&UNKNOWNS);
    let s1 = rename_vars(s1, &COORDS)?.with_vars(big.clone())?;
    let s2 = rename_vars(s2, &COORDS)?;
    let z = |k: usize| MultiPoly::var(field.clone(), big.clone(), UNKNOWNS[k]).expect("known variable");
    let a: Vec<Vec<MultiPoly<F>>> = (0..3).map(|i| (0..3).map(|j| z(3 * i + j)).collect()).collect();
    let moved = s2.substitute_linear(&a, &COORDS)?.with_vars(big.clone())?;
    let lam = MultiPoly::var(field.clone(), big.clone(), "lam")?;
    let diff = &moved - &(&lam * &s1);
    let mut gens: Vec<MultiPoly<F>> = diff
        .coefficients(&COORDS)?
        .into_iter()
        .map(|(_, c)| c.with_vars(unknowns.clone()))
        .collect::<Result<_, _>>()?;
    let a_small: Vec<Vec<MultiPoly<F>>> =
        a.iter().map(|row| row.iter().map(|e| e.with_vars(unknowns.clone())).collect::<Result<_, _>>()).collect::<Result<_, _>>()?;
    let det = poly_det(&a_small)?;
    let u = MultiPoly::var(field.clone(), unknowns.clone(), "u")?;
    let lam = MultiPoly::var(field.clone(), unknowns.clone(), "lam")?;
    gens.push(&(&(&u * &det) * &lam) - &MultiPoly::one(field, unknowns));
    Ok(gens)
}

/// Whether `s2(A x) = lam * s1(x)` for some invertible `A` and nonzero
/// `lam` over the algebraic closure of the coefficient field. `Ok(false)`
/// means the system generates the unit ideal.
pub fn sextics_projectively_equivalent<F: Field>(s1: &MultiPoly<F>, s2: &MultiPoly<F>, budget: &Budget) -> Result<bool, VerraError> {
    check_characteristic(s1.ring())?;
    let gens = pgl3_system(s1, s2)?;
    Ok(!PolyIdeal::new(gens)?.is_unit_ideal(budget)?)
}
