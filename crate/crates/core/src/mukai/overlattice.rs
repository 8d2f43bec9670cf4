//! Even overlattices of index two and the projection of `T_S(B)` into `T_S`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use super::{MukaiError, MukaiFixture, Side};
use crate::lattice::matrix::{rat_inverse, to_rational};
use crate::lattice::{
    direct_sum_all, discriminant_elements, genus_invariants, index_in, orthogonal_complement, same_genus_invariants, smith_normal_form,
    sublattice_index, IntMatrix, Lattice, LatticeError, Sublattice,
};

fn inconclusive(e: LatticeError) -> MukaiError {
    match e {
        LatticeError::Inconclusive(m) => MukaiError::Inconclusive(m),
        other => MukaiError::Lattice(other),
    }
}

/// The even overlattices `L + Z x` for isotropic `x` of order two in
/// `L*/L`, one per such element.
pub fn even_index_two_overlattices(l: &Lattice) -> Result<Vec<Lattice>, MukaiError> {
    if !l.is_even() {
        return Err(MukaiError::Invalid("overlattice enumeration needs an even lattice".into()));
    }
    let g = genus_invariants(l)?;
    let elems = discriminant_elements(&g).map_err(inconclusive)?;
    let orders: Vec<u64> = g.discriminant_group.iter().map(|d| d.to_u64().expect("bounded order")).collect();
    let gens = &g.discriminant_form.generators;
    let n = l.rank();
    let mut out = Vec::new();
    for (c, q) in elems {
        let nonzero = c.iter().any(|&x| x != 0);
        let order_two = c.iter().zip(&orders).all(|(&x, &d)| (2 * x) % d == 0);
        if !nonzero || !order_two || !q.is_zero() {
            continue;
        }
        let lift: Vec<BigRational> = (0..n).map(|r| c.iter().zip(gens).map(|(&k, gv)| BigRational::from_integer(k.into()) * &gv[r]).sum()).collect();
        out.push(overlattice(l, &lift)?);
    }
    Ok(out)
}

/// Gram matrix of `L + Z x` for `x` with `2x` integral.
fn overlattice(l: &Lattice, x: &[BigRational]) -> Result<Lattice, MukaiError> {
    let n = l.rank();
    let two = BigRational::from_integer(2.into());
    let mut m: IntMatrix = (0..n).map(|i| (0..n).map(|j| BigInt::from(if i == j { 2 } else { 0 })).collect()).collect();
    let twice: Vec<BigRational> = x.iter().map(|v| v * &two).collect();
    if twice.iter().any(|v| !v.is_integer()) {
        return Err(MukaiError::Invalid("lift is not in (1/2) L".into()));
    }
    m.push(twice.iter().map(|v| v.to_integer()).collect());
    // row span of M is spanned by the first n rows of D V^{-1}
    let s = smith_normal_form(&m);
    let vinv = rat_inverse(&to_rational(&s.v)).expect("unimodular");
    let basis: Vec<Vec<BigRational>> =
        (0..n).map(|i| vinv[i].iter().map(|v| v * BigRational::from_integer(s.d[i][i].clone())).collect()).collect();
    let g = to_rational(l.gram());
    let four = BigRational::from_integer(4.into());
    let mut gram = vec![vec![BigInt::zero(); n]; n];
    for i in 0..n {
        for j in 0..n {
            let v: BigRational = (0..n).map(|a| (0..n).map(|b| &basis[i][a] * &g[a][b] * &basis[j][b]).sum::<BigRational>()).sum::<BigRational>() / &four;
            if !v.is_integer() {
                return Err(MukaiError::NonIntegral(format!("overlattice pairing {v} at ({i},{j})")));
            }
            gram[i][j] = v.to_integer();
        }
    }
    Ok(Lattice::new(gram, (1..=n).map(|i| format!("o{i}")).collect())?)
}

/// Number of even index-two overlattices of `l` in the genus of `target`.
pub fn index_two_embedding_count(l: &Lattice, target: &Lattice) -> Result<usize, MukaiError> {
    let mut count = 0;
    for o in even_index_two_overlattices(l)? {
        if same_genus_invariants(&o, target).map_err(inconclusive)? {
            count += 1;
        }
    }
    Ok(count)
}

/// `<-2> + 2U + 2E8(-1)`, the transcendental lattice of a very general
/// degree-two K3 surface.
pub fn transcendental_reference() -> Lattice {
    direct_sum_all(&[Lattice::rank_one(-2).expect("nonzero"), Lattice::u(), Lattice::u(), Lattice::e8_negative(), Lattice::e8_negative()])
}

/// Ways for `T_S(B)` to sit in index two inside a transcendental lattice of
/// the reference genus.
pub fn index_two_embedding_count_fixture(fx: &MukaiFixture) -> Result<usize, MukaiError> {
    index_two_embedding_count(&fx.t_sb.as_lattice(), &transcendental_reference())
}

/// Index of the side-1 projection of `T_S(B)` in `T_S = eta^perp` inside
/// `Lambda_1`.
pub fn embedding_index_fixture(fx: &MukaiFixture) -> Result<BigInt, MukaiError> {
    let l = &fx.lattice;
    let sp = fx.splitting(Side::One);
    let p = &sp.projection;
    let mut rows = Vec::new();
    for gen in fx.t_sb.generators() {
        let img: Vec<BigRational> = (0..l.rank()).map(|r| gen.iter().enumerate().map(|(c, x)| &p[r][c] * BigRational::from_integer(x.clone())).sum()).collect();
        if img.iter().any(|v| !v.is_integer()) {
            return Err(MukaiError::NonIntegral("projection of T_S(B) is not integral".into()));
        }
        rows.push(img.iter().map(|v| v.to_integer()).collect());
    }
    let image = Sublattice::new(l.clone(), rows)?;
    let mut pic = sp.u.generators().clone();
    pic.push(fx.eta.clone());
    let t_s = orthogonal_complement(&Sublattice::new(l.clone(), pic)?);
    let idx = index_in(&image, &t_s)?.ok_or_else(|| MukaiError::Invalid("projection image has the wrong rank".into()))?;
    if sublattice_index(&image) != idx {
        return Err(MukaiError::Invalid("T_S is not the saturation of the projection image".into()));
    }
    Ok(idx)
}
