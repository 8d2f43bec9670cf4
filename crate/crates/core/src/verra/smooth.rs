//! Jacobian-criterion smoothness over a prime field.
//!
//! For a (bi)homogeneous ideal `I`, the saturation by the irrelevant ideal is
//! the unit ideal exactly when `I` has no zero on any standard affine chart,
//! so each test runs one unit-ideal check per chart.

use crate::algebra::{var_names, AlgebraError, Field, MultiPoly, PrimeField};
use crate::ideal::{Budget, PolyIdeal};

use super::{check_characteristic, xy_vars, VerraError, VerraMember, X_VARS, Y_VARS};

/// Sets each variable in `ones` to 1 and drops it from the ring.
pub(crate) fn dehomogenize<F: Field>(p: &MultiPoly<F>, ones: &[&str]) -> Result<MultiPoly<F>, AlgebraError> {
    let one = MultiPoly::one(p.ring().clone(), p.vars().clone());
    let images: Vec<(&str, MultiPoly<F>)> = ones.iter().map(|v| (*v, one.clone())).collect();
    let kept: Vec<&str> = p.vars().iter().map(|s| s.as_str()).filter(|v| !ones.contains(v)).collect();
    p.substitute(p.vars().clone(), &images)?.with_vars(var_names(&kept))
}

fn chart_is_empty<F: Field>(gens: &[MultiPoly<F>], ones: &[&str], budget: &Budget) -> Result<bool, VerraError> {
    let chart: Vec<MultiPoly<F>> = gens.iter().map(|g| dehomogenize(g, ones)).collect::<Result<_, _>>()?;
    if chart.iter().all(|g| g.is_zero()) {
        return Ok(false);
    }
    Ok(PolyIdeal::new(chart)?.is_unit_ideal(budget)?)
}

/// True iff the plane curve `f = 0` is smooth: the ideal generated by `f`
/// and its partials has no zero in P^2 over the algebraic closure.
pub fn is_smooth_plane_curve(f: &MultiPoly<PrimeField>, budget: &Budget) -> Result<bool, VerraError> {
    check_characteristic(f.ring())?;
    if f.nvars() != 3 {
        return Err(VerraError::Structural(format!("plane curve needs 3 variables, got {}", f.nvars())));
    }
    if f.is_zero() {
        return Ok(false);
    }
    if !f.is_homogeneous() {
        return Err(VerraError::Structural("plane curve must be homogeneous".into()));
    }
    let vars: Vec<String> = f.vars().to_vec();
    let mut gens = vec![f.clone()];
    for v in &vars {
        gens.push(f.partial_derivative(v)?);
    }
    for v in &vars {
        if !chart_is_empty(&gens, &[v.as_str()], budget)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// True iff the (2,2) divisor `F = 0` in P^2 x P^2 is smooth, checked on the
/// nine charts `x_i = y_j = 1`.
pub fn is_smooth_verra_threefold(v: &VerraMember<PrimeField>, budget: &Budget) -> Result<bool, VerraError> {
    check_characteristic(v.field())?;
    let f = v.f.with_vars(xy_vars())?;
    if f.is_zero() {
        return Ok(false);
    }
    let mut gens = vec![f.clone()];
    for name in X_VARS.iter().chain(Y_VARS.iter()) {
        gens.push(f.partial_derivative(name)?);
    }
    for x in X_VARS {
        for y in Y_VARS {
            if !chart_is_empty(&gens, &[x, y], budget)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}
