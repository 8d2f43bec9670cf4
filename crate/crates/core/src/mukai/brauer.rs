//! Brauer classes `tau_i` on the two sides, the parity predicate, its
//! kernel-lattice oracle and the certificate that the transcendental
//! isometry does not extend.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::period::{linear_part, project_period, solve_unique, tau_transfer, FormalPeriod, Solve, I2_SLOT};
use super::{MukaiError, MukaiFixture};
use crate::lattice::matrix::{integer_kernel, mul, rank};
use crate::lattice::IntMatrix;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Side {
    #[serde(rename = "1")]
    One,
    #[serde(rename = "2")]
    Two,
}

impl Side {
    pub fn other(self) -> Side {
        match self {
            Side::One => Side::Two,
            Side::Two => Side::One,
        }
    }
}

/// Basis directions of `Lambda_i` after `ubar_1, ubar_2`, with `i2` dropped
/// because `tau` only matters modulo `eta = i1 + i2`.
pub const TAIL_LABELS: [&str; 19] =
    ["i1", "j1", "j2", "e1", "e2", "e3", "e4", "e5", "e6", "e7", "e8", "f1", "f2", "f3", "f4", "f5", "f6", "f7", "f8"];

/// `tau = gamma1 ubar_1 + gamma2 ubar_2 + tail`, where `(ubar_1, ubar_2)` is
/// `(n2 - m2, n1)` on side 1 and `(n1 - m1, n2)` on side 2.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TauClass {
    pub side: Side,
    pub gamma1: i64,
    pub gamma2: i64,
    pub tail: Vec<i64>,
}

impl TauClass {
    /// A short tail is padded with zeros.
    pub fn new(side: Side, gamma1: i64, gamma2: i64, tail: &[i64]) -> Result<Self, MukaiError> {
        if tail.len() > TAIL_LABELS.len() {
            return Err(MukaiError::Invalid(format!("tail has {} entries, at most {}", tail.len(), TAIL_LABELS.len())));
        }
        let mut t = tail.to_vec();
        t.resize(TAIL_LABELS.len(), 0);
        Ok(TauClass { side, gamma1, gamma2, tail: t })
    }

    fn entries(&self) -> impl Iterator<Item = i64> + '_ {
        [self.gamma1, self.gamma2].into_iter().chain(self.tail.iter().copied())
    }

    pub fn is_zero(&self) -> bool {
        self.entries().all(|x| x == 0)
    }

    /// `tau / gcd` of its coordinates.
    pub fn primitive(&self) -> TauClass {
        let g = self.entries().fold(0i64, |acc, x| acc.gcd(&x));
        if g <= 1 {
            return self.clone();
        }
        TauClass { side: self.side, gamma1: self.gamma1 / g, gamma2: self.gamma2 / g, tail: self.tail.iter().map(|x| x / g).collect() }
    }

    /// Coordinates on the named basis of `Lambda_i`.
    pub fn lambda_coords(&self) -> Vec<BigInt> {
        let mut out = vec![BigInt::from(self.gamma1), BigInt::from(self.gamma2), BigInt::from(self.tail[0]), BigInt::zero()];
        out.extend(self.tail[1..].iter().map(|&x| BigInt::from(x)));
        debug_assert_eq!(out[I2_SLOT], BigInt::zero());
        out
    }

    /// Coordinates in `Lambda~`.
    pub fn to_vector(&self, fx: &MukaiFixture) -> Result<Vec<BigInt>, MukaiError> {
        if self.tail.len() != TAIL_LABELS.len() {
            return Err(MukaiError::Invalid("tail has the wrong length".into()));
        }
        let basis = fx.splitting(self.side).lambda.generators();
        let c = self.lambda_coords();
        let mut v = vec![BigInt::zero(); fx.lattice.rank()];
        for (coef, row) in c.iter().zip(basis) {
            if !coef.is_zero() {
                for (x, b) in v.iter_mut().zip(row) {
                    *x += coef * b;
                }
            }
        }
        Ok(v)
    }
}

/// `gamma1` odd and everything else even, read off the primitive class.
pub fn brauer_trivial_by_parity(tau: &TauClass) -> Result<bool, MukaiError> {
    if tau.is_zero() {
        return Err(MukaiError::Degenerate("tau is zero".into()));
    }
    let p = tau.primitive();
    Ok(p.gamma1 % 2 != 0 && p.gamma2 % 2 == 0 && p.tail.iter().all(|x| x % 2 == 0))
}

/// Integer basis (rows, `Lambda_i` coordinates) of
/// `{v in Lambda_i : v . tau = 0, v . eta = 0}`.
pub fn kernel_lattice(fx: &MukaiFixture, tau: &TauClass) -> Result<IntMatrix, MukaiError> {
    let sp = fx.splitting(tau.side);
    let g = sp.lambda.gram();
    let mut eta = vec![BigInt::zero(); g.len()];
    eta[2] = BigInt::one();
    eta[I2_SLOT] = BigInt::one();
    let m = mul(&vec![tau.lambda_coords(), eta], &g);
    if rank(&m) < 2 {
        return Err(MukaiError::Degenerate("tau is proportional to eta".into()));
    }
    Ok(integer_kernel(&m, g.len()))
}

/// Every vector of the kernel lattice has even `ubar_2` coordinate.
pub fn brauer_trivial_by_kernel(fx: &MukaiFixture, tau: &TauClass) -> Result<bool, MukaiError> {
    Ok(kernel_lattice(fx, tau)?.iter().all(|row| row[1].is_even()))
}

/// Evidence that the isometry between the two kernel lattices does not come
/// from an isometry of the K3 lattices.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NonExtensionCertificate {
    pub tau1: TauClass,
    pub tau2: TauClass,
    pub kernel_rank: usize,
    pub rational_isometry: bool,
    pub kernel_gram_preserved: bool,
    pub kernel_image_integral: bool,
    pub kernel_image_in_target: bool,
    pub tau_image_matches: bool,
    pub eta_fixed: bool,
    pub witness_label: String,
    pub witness: Vec<i64>,
    /// Nonzero coordinates of the image in `Lambda~`, as rationals.
    pub witness_image: Vec<(String, String)>,
}

impl NonExtensionCertificate {
    pub fn verified(&self) -> bool {
        self.rational_isometry
            && self.kernel_gram_preserved
            && self.kernel_image_integral
            && self.kernel_image_in_target
            && self.tau_image_matches
            && self.eta_fixed
            && !self.witness_image.is_empty()
    }
}

fn rat_pair(g: &IntMatrix, a: &[BigRational], b: &[BigRational]) -> BigRational {
    let mut acc = BigRational::zero();
    for (i, ai) in a.iter().enumerate() {
        if ai.is_zero() {
            continue;
        }
        for (j, bj) in b.iter().enumerate() {
            if !bj.is_zero() && !g[i][j].is_zero() {
                acc += ai * BigRational::from_integer(g[i][j].clone()) * bj;
            }
        }
    }
    acc
}

fn to_rat(v: &[BigInt]) -> Vec<BigRational> {
    v.iter().map(|x| BigRational::from_integer(x.clone())).collect()
}

fn is_integral(v: &[BigRational]) -> bool {
    v.iter().all(|x| x.is_integer())
}

/// The rational map `Phi: Lambda_i (x) Q -> Lambda_j (x) Q` determined by
/// `Phi(project(x, i)) = project(x, j)` for the generic period and
/// `Phi(eta) = eta`, checked against the transferred class. The witness is
/// a basis vector of `Lambda_i` with non-integral image; basis vectors
/// suffice since an integral image on a basis would make the whole image
/// integral.
pub fn non_extension_certificate(fx: &MukaiFixture, tau1: &TauClass) -> Result<NonExtensionCertificate, MukaiError> {
    if tau1.gamma2 == 0 {
        return Err(MukaiError::Invalid("gamma2 must be nonzero".into()));
    }
    let l = &fx.lattice;
    let g = l.gram();
    let n = l.rank();
    let x = FormalPeriod::generic(l);
    let tau2 = tau_transfer(fx, tau1, &x)?;
    let (s, t) = (tau1.side, tau2.side);
    let sigma_s = project_period(fx, &x, s)?;
    let sigma_t = project_period(fx, &x, t)?;
    let nsym = x.symbols().len();
    let symbol_vectors = |sigma: &FormalPeriod| -> Result<Vec<Vec<BigRational>>, MukaiError> {
        let lin = sigma.coords().iter().map(linear_part).collect::<Result<Vec<_>, _>>()?;
        Ok((0..nsym).map(|k| (0..n).map(|c| lin[c][k].clone()).collect()).collect())
    };
    let eta = to_rat(&fx.eta);
    let mut sources = symbol_vectors(&sigma_s)?;
    let mut targets = symbol_vectors(&sigma_t)?;
    sources.push(eta.clone());
    targets.push(eta.clone());
    let k = sources.len();
    // columns of the system are the source vectors
    let a: Vec<Vec<BigRational>> = (0..n).map(|c| (0..k).map(|j| sources[j][c].clone()).collect()).collect();
    let apply_rat = |v: &[BigRational]| -> Result<Vec<BigRational>, MukaiError> {
        let r = match solve_unique(&a, v) {
            Solve::Unique(r) => r,
            Solve::Inconsistent => return Err(MukaiError::Invalid("vector outside the span of the period data".into())),
            Solve::Underdetermined => return Err(MukaiError::Degenerate("period data are dependent".into())),
        };
        Ok((0..n).map(|c| (0..k).map(|j| &r[j] * &targets[j][c]).sum()).collect())
    };
    let basis_s = fx.splitting(s).lambda.generators();
    let images: Vec<Vec<BigRational>> = basis_s.iter().map(|b| apply_rat(&to_rat(b))).collect::<Result<_, _>>()?;
    let apply = |coords: &[BigInt]| -> Vec<BigRational> {
        let mut out = vec![BigRational::zero(); n];
        for (c, img) in coords.iter().zip(&images) {
            if !c.is_zero() {
                let c = BigRational::from_integer(c.clone());
                for (o, v) in out.iter_mut().zip(img) {
                    *o += &c * v;
                }
            }
        }
        out
    };
    let rational_isometry = (0..basis_s.len()).all(|i| {
        (i..basis_s.len()).all(|j| rat_pair(g, &images[i], &images[j]) == BigRational::from_integer(l.pair(&basis_s[i], &basis_s[j])))
    });
    let kernel = kernel_lattice(fx, tau1)?;
    let gram_s = fx.splitting(s).lambda.gram();
    let kernel_images: Vec<Vec<BigRational>> = kernel.iter().map(|v| apply(v)).collect();
    let kernel_gram_preserved = (0..kernel.len()).all(|i| {
        (i..kernel.len()).all(|j| {
            let orig: BigInt = kernel[i].iter().enumerate().map(|(a, x)| kernel[j].iter().enumerate().map(|(b, y)| x * &gram_s[a][b] * y).sum::<BigInt>()).sum();
            rat_pair(g, &kernel_images[i], &kernel_images[j]) == BigRational::from_integer(orig)
        })
    });
    let kernel_image_integral = kernel_images.iter().all(|v| is_integral(v));
    let tau2_vec = to_rat(&tau2.to_vector(fx)?);
    let lambda_t = &fx.splitting(t).lambda;
    let kernel_image_in_target = kernel_image_integral
        && kernel_images.iter().all(|v| {
            let iv: Vec<BigInt> = v.iter().map(|x| x.to_integer()).collect();
            lambda_t.contains(&iv) && rat_pair(g, v, &tau2_vec).is_zero() && rat_pair(g, v, &eta).is_zero()
        });
    let tau_image_matches = apply(&tau1.lambda_coords()) == tau2_vec;
    let mut eta_coords = vec![BigInt::zero(); basis_s.len()];
    eta_coords[2] = BigInt::one();
    eta_coords[I2_SLOT] = BigInt::one();
    let eta_fixed = apply(&eta_coords) == eta;
    let labels = l.labels();
    let witness_idx = images
        .iter()
        .position(|v| !is_integral(v))
        .ok_or_else(|| MukaiError::Inconclusive("the map carries the whole lattice integrally".into()))?;
    let witness = basis_s[witness_idx].iter().map(|x| x.to_i64().expect("small")).collect();
    let witness_image = images[witness_idx].iter().zip(labels).filter(|(x, _)| !x.is_zero()).map(|(x, lab)| (lab.clone(), x.to_string())).collect();
    Ok(NonExtensionCertificate {
        tau1: tau1.clone(),
        tau2,
        kernel_rank: kernel.len(),
        rational_isometry,
        kernel_gram_preserved,
        kernel_image_integral,
        kernel_image_in_target,
        tau_image_matches,
        eta_fixed,
        witness_label: fx.splitting(s).basis_labels[witness_idx].clone(),
        witness,
        witness_image,
    })
}
