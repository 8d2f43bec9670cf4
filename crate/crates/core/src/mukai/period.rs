//! Twisted periods with formal coefficients, their projections to the two
//! K3 lattices, and the transfer of Brauer classes.

use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use super::{MukaiError, MukaiFixture, Side, TauClass};
use crate::algebra::{var_names, Monomial, MultiPoly, Rationals};
use crate::lattice::matrix::{rat_inverse, to_rational, RatMatrix};
use crate::lattice::{IntMatrix, Lattice};

/// A vector of `Lambda~ (x) Q[symbols]` in `Lambda~` coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct FormalPeriod {
    coords: Vec<MultiPoly<Rationals>>,
}

fn rat(x: &BigInt) -> BigRational {
    BigRational::from_integer(x.clone())
}

impl FormalPeriod {
    /// Coordinates must share one symbol list.
    pub fn new(coords: Vec<MultiPoly<Rationals>>) -> Result<Self, MukaiError> {
        if let Some(first) = coords.first() {
            if coords.iter().any(|c| c.vars() != first.vars()) {
                return Err(MukaiError::Invalid("period coordinates use different symbol lists".into()));
            }
        }
        Ok(FormalPeriod { coords })
    }

    /// `lambda1 (i1 - i2) + delta1 (m1 - n1) + delta2 (m2 - n2) + c1 j1 + c2 j2
    /// + c3 e1 + ... + c18 f8`, the general element of `T_S(B)`.
    pub fn generic(l: &Lattice) -> Self {
        let mut names = vec!["lambda1".to_string(), "delta1".to_string(), "delta2".to_string()];
        names.extend((1..=18).map(|k| format!("c{k}")));
        let vars = var_names(&names);
        let n = l.rank();
        let mut coords = vec![MultiPoly::zero(Rationals, vars.clone()); n];
        let mut put = |label: &str, sym: usize, sign: i64| {
            let idx = l.index_of(label).expect("basis label");
            let term = MultiPoly::monomial(Rationals, vars.clone(), Monomial::variable(vars.len(), sym).exponents(), BigRational::from_integer(sign.into()));
            coords[idx] = coords[idx].checked_add(&term).expect("same symbols");
        };
        put("i1", 0, 1);
        put("i2", 0, -1);
        put("m1", 1, 1);
        put("n1", 1, -1);
        put("m2", 2, 1);
        put("n2", 2, -1);
        let rest = ["j1".to_string(), "j2".to_string()].into_iter().chain((1..=8).map(|k| format!("e{k}"))).chain((1..=8).map(|k| format!("f{k}")));
        for (k, label) in rest.enumerate() {
            put(&label, 3 + k, 1);
        }
        FormalPeriod { coords }
    }

    pub fn coords(&self) -> &[MultiPoly<Rationals>] {
        &self.coords
    }

    pub fn symbols(&self) -> Arc<[String]> {
        self.coords.first().map(|c| c.vars().clone()).unwrap_or_else(|| var_names::<&str>(&[]))
    }

    pub fn coordinate(&self, l: &Lattice, label: &str) -> Result<&MultiPoly<Rationals>, MukaiError> {
        Ok(&self.coords[l.index_of(label)?])
    }

    fn zero_poly(&self) -> MultiPoly<Rationals> {
        MultiPoly::zero(Rationals, self.symbols())
    }

    /// `x . v` for a rational vector `v`.
    pub fn pair_vector(&self, l: &Lattice, v: &[BigRational]) -> MultiPoly<Rationals> {
        let g = l.gram();
        let n = l.rank();
        let mut acc = self.zero_poly();
        for c in 0..n {
            let w: BigRational = (0..n).filter(|&k| !v[k].is_zero()).map(|k| rat(&g[c][k]) * &v[k]).sum();
            if !w.is_zero() && !self.coords[c].is_zero() {
                acc = acc.checked_add(&self.coords[c].scale(&w)).expect("same symbols");
            }
        }
        acc
    }

    fn check_len(&self, l: &Lattice) -> Result<(), MukaiError> {
        if self.coords.len() != l.rank() {
            return Err(MukaiError::Invalid(format!("period has {} coordinates, lattice rank is {}", self.coords.len(), l.rank())));
        }
        Ok(())
    }

    /// Coefficients on the named basis of `Lambda_i`, nonzero entries only.
    /// Errors if the period does not lie in `Lambda_i (x) Q`.
    pub fn display_in(&self, fx: &MukaiFixture, side: Side) -> Result<Vec<(String, String)>, MukaiError> {
        let sp = fx.splitting(side);
        let coeffs = coordinates_in_basis(&fx.lattice, sp.lambda.generators(), &self.coords)?;
        Ok(sp.basis_labels.iter().zip(coeffs).filter(|(_, c)| !c.is_zero()).map(|(l, c)| (l.clone(), c.to_string())).collect())
    }

    /// Coefficient on a named basis vector of `Lambda_i`.
    pub fn coefficient_in(&self, fx: &MukaiFixture, side: Side, label: &str) -> Result<MultiPoly<Rationals>, MukaiError> {
        let sp = fx.splitting(side);
        let idx = sp.basis_labels.iter().position(|l| l == label).ok_or_else(|| MukaiError::Invalid(format!("no basis vector {label:?}")))?;
        let coeffs = coordinates_in_basis(&fx.lattice, sp.lambda.generators(), &self.coords)?;
        Ok(coeffs[idx].clone())
    }
}

/// Matrix `C` with `coords(v) = v^T C` for `v` in the span of the basis rows,
/// `C = G B^T (B G B^T)^{-1}`.
pub(crate) fn dual_matrix(l: &Lattice, basis: &IntMatrix) -> Result<RatMatrix, MukaiError> {
    let g = to_rational(l.gram());
    let b = to_rational(basis);
    let (n, k) = (l.rank(), basis.len());
    let gbt: RatMatrix = (0..n).map(|r| (0..k).map(|j| (0..n).map(|c| &g[r][c] * &b[j][c]).sum()).collect()).collect();
    let bgbt: RatMatrix = (0..k).map(|i| (0..k).map(|j| (0..n).map(|r| &b[i][r] * &gbt[r][j]).sum()).collect()).collect();
    let inv = rat_inverse(&bgbt).ok_or_else(|| MukaiError::Degenerate("basis spans a degenerate sublattice".into()))?;
    Ok((0..n).map(|r| (0..k).map(|j| (0..k).map(|m| &gbt[r][m] * &inv[m][j]).sum()).collect()).collect())
}

fn coordinates_in_basis(l: &Lattice, basis: &IntMatrix, v: &[MultiPoly<Rationals>]) -> Result<Vec<MultiPoly<Rationals>>, MukaiError> {
    let c = dual_matrix(l, basis)?;
    let zero = MultiPoly::zero(Rationals, v.first().map(|p| p.vars().clone()).unwrap_or_else(|| var_names::<&str>(&[])));
    let coeffs: Vec<MultiPoly<Rationals>> = (0..basis.len()).map(|j| combine(&zero, v, |r| c[r][j].clone())).collect();
    // reconstruct to confirm membership
    let b = to_rational(basis);
    for (r, vr) in v.iter().enumerate() {
        let back = combine(&zero, &coeffs, |j| b[j][r].clone());
        if &back != vr {
            return Err(MukaiError::Invalid("period is not in the span of the basis".into()));
        }
    }
    Ok(coeffs)
}

fn combine(zero: &MultiPoly<Rationals>, polys: &[MultiPoly<Rationals>], weight: impl Fn(usize) -> BigRational) -> MultiPoly<Rationals> {
    let mut acc = zero.clone();
    for (k, p) in polys.iter().enumerate() {
        let w = weight(k);
        if !w.is_zero() && !p.is_zero() {
            acc = acc.checked_add(&p.scale(&w)).expect("same symbols");
        }
    }
    acc
}

/// Exact orthogonal projection of `x` onto `Lambda_i (x) Q` along `U_i`.
pub fn project_period(fx: &MukaiFixture, x: &FormalPeriod, side: Side) -> Result<FormalPeriod, MukaiError> {
    x.check_len(&fx.lattice)?;
    let p = &fx.splitting(side).projection;
    let zero = x.zero_poly();
    let coords = (0..x.coords.len()).map(|r| combine(&zero, &x.coords, |c| p[r][c].clone())).collect();
    Ok(FormalPeriod { coords })
}

/// Coefficients of a polynomial of degree at most one with zero constant
/// term, one per symbol.
pub(crate) fn linear_part(p: &MultiPoly<Rationals>) -> Result<Vec<BigRational>, MukaiError> {
    if p.total_degree().is_some_and(|d| d > 1) || !p.constant_term().is_zero() {
        return Err(MukaiError::Invalid(format!("expected a linear form in the symbols, got {p}")));
    }
    let n = p.nvars();
    Ok((0..n).map(|k| p.coeff(&Monomial::variable(n, k))).collect())
}

pub(crate) enum Solve {
    Unique(Vec<BigRational>),
    Inconsistent,
    Underdetermined,
}

/// Solves `A u = b` over the rationals.
pub(crate) fn solve_unique(a: &RatMatrix, b: &[BigRational]) -> Solve {
    let m = a.len();
    let k = a.first().map_or(0, Vec::len);
    let mut rows: Vec<Vec<BigRational>> = a.iter().zip(b).map(|(r, x)| r.iter().cloned().chain(std::iter::once(x.clone())).collect()).collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..k {
        let Some(piv) = (r..m).find(|&i| !rows[i][col].is_zero()) else { continue };
        rows.swap(r, piv);
        let p = rows[r][col].clone();
        for v in rows[r].iter_mut() {
            *v /= &p;
        }
        for i in 0..m {
            if i != r && !rows[i][col].is_zero() {
                let f = rows[i][col].clone();
                for j in col..=k {
                    let d = &f * &rows[r][j];
                    rows[i][j] -= d;
                }
            }
        }
        pivots.push(col);
        r += 1;
    }
    if rows[r..].iter().any(|row| !row[k].is_zero()) {
        return Solve::Inconsistent;
    }
    if pivots.len() < k {
        return Solve::Underdetermined;
    }
    Solve::Unique((0..k).map(|i| rows[i][k].clone()).collect())
}

/// Index of `i2` in the named `Lambda_i` basis; `tau` is taken modulo `eta`
/// so this coordinate is fixed to zero.
pub(crate) const I2_SLOT: usize = 3;

/// The class `tau'` on the other side with
/// `project(x, other) . tau' = project(x, side) . tau` identically in the
/// symbols of `x`. Works in either direction.
pub fn tau_transfer(fx: &MukaiFixture, tau: &TauClass, x: &FormalPeriod) -> Result<TauClass, MukaiError> {
    let l = &fx.lattice;
    let (s, t) = (tau.side, tau.side.other());
    let sigma_s = project_period(fx, x, s)?;
    let sigma_t = project_period(fx, x, t)?;
    let tau_vec: Vec<BigRational> = tau.to_vector(fx)?.iter().map(rat).collect();
    let target = sigma_s.pair_vector(l, &tau_vec);
    let rhs = linear_part(&target)?;
    let basis = fx.splitting(t).lambda.generators();
    let unknowns: Vec<usize> = (0..basis.len()).filter(|&k| k != I2_SLOT).collect();
    let columns = unknowns
        .iter()
        .map(|&k| linear_part(&sigma_t.pair_vector(l, &basis[k].iter().map(rat).collect::<Vec<_>>())))
        .collect::<Result<Vec<_>, _>>()?;
    let a: RatMatrix = (0..rhs.len()).map(|sym| columns.iter().map(|col| col[sym].clone()).collect()).collect();
    let u = match solve_unique(&a, &rhs) {
        Solve::Unique(u) => u,
        Solve::Inconsistent => return Err(MukaiError::Invalid("no class on the other side matches the pairing".into())),
        Solve::Underdetermined => return Err(MukaiError::Degenerate("the period does not determine the transferred class".into())),
    };
    if let Some(bad) = u.iter().find(|c| !c.is_integer()) {
        return Err(MukaiError::NonIntegral(format!("transferred class has coordinate {bad}")));
    }
    let ints: Vec<i64> =
        u.iter().map(|c| i64::try_from(c.to_integer()).map_err(|_| MukaiError::Invalid("coordinate overflow".into()))).collect::<Result<_, _>>()?;
    let out = TauClass::new(t, ints[0], ints[1], &ints[2..])?;
    let check: Vec<BigRational> = out.to_vector(fx)?.iter().map(rat).collect();
    if !sigma_t.pair_vector(l, &check).checked_sub(&target).expect("same symbols").is_zero() {
        return Err(MukaiError::Invalid("transferred class fails the pairing identity".into()));
    }
    Ok(out)
}

/// The solved transfer against the displayed pair `(-2 gamma1, -gamma2/2)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TransferPattern {
    pub source: (i64, i64),
    pub solved: (i64, i64),
    pub displayed: (String, String),
    pub matches_displayed: bool,
    pub magnitudes_match: bool,
    pub identity_holds: bool,
    pub identity: String,
}

impl TransferPattern {
    pub fn compare(fx: &MukaiFixture, tau: &TauClass, transferred: &TauClass, x: &FormalPeriod) -> Result<Self, MukaiError> {
        let l = &fx.lattice;
        let half = BigRational::new(BigInt::one(), BigInt::from(2));
        let d1 = BigRational::from_integer((-2 * tau.gamma1).into());
        let d2 = -BigRational::from_integer(tau.gamma2.into()) * &half;
        let solved = (BigRational::from_integer(transferred.gamma1.into()), BigRational::from_integer(transferred.gamma2.into()));
        let mut mags = [d1.abs(), d2.abs()];
        let mut smags = [solved.0.abs(), solved.1.abs()];
        mags.sort();
        smags.sort();
        let sigma_s = project_period(fx, x, tau.side)?;
        let sigma_t = project_period(fx, x, transferred.side)?;
        let lhs = sigma_s.pair_vector(l, &tau.to_vector(fx)?.iter().map(rat).collect::<Vec<_>>());
        let rhs = sigma_t.pair_vector(l, &transferred.to_vector(fx)?.iter().map(rat).collect::<Vec<_>>());
        let diff = lhs.checked_sub(&rhs).expect("same symbols");
        Ok(TransferPattern {
            source: (tau.gamma1, tau.gamma2),
            solved: (transferred.gamma1, transferred.gamma2),
            matches_displayed: (d1.clone(), d2.clone()) == solved,
            displayed: (d1.to_string(), d2.to_string()),
            magnitudes_match: mags == smags,
            identity_holds: diff.is_zero(),
            identity: format!("{lhs} = {rhs}"),
        })
    }
}
