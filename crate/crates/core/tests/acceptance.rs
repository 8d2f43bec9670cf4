//! End-to-end acceptance checks. Runs without the libtest harness so every
//! criterion prints exactly one PASS/FAIL line; the process fails if any
//! criterion fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{RngExt, SeedableRng};
use rand_pcg::Pcg64;

use verra_core::algebra::{var_names, Field, Monomial, MultiPoly, PrimeField, Ring};
use verra_core::groth::{class_arith, expand_projective_space, verify_verra_relation, ArithOp, GrothClass};
use verra_core::ideal::{Budget, PolyIdeal};
use verra_core::lattice::{direct_sum_all, same_genus_invariants, signature, Lattice};
use verra_core::mukai::{
    brauer_trivial_by_kernel, brauer_trivial_by_parity, build_pic_x, embedding_index_fixture, h2_model_gram,
    index_two_embedding_count_fixture, mukai_pairing, non_extension_certificate, pic_sb_mukai_vectors, project_period, tau_transfer,
    FormalPeriod, MukaiError, MukaiFixture, Side, TauClass, TAIL_LABELS,
};
use verra_core::verra::{
    certify, count_points_plane_curve, discriminant_sextics, random_member, reduce_poly, CertifyOptions, Conclusion,
};

/// Seed whose member is certified at the default prime.
const RECORDED_SEED: u64 = 0;
const CERT_PRIME: u64 = 10007;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn within(start: Instant, limit: Duration) -> Result<(), String> {
    let t = start.elapsed();
    ensure(t <= limit, format!("took {t:.2?}, limit {limit:?}"))
}

fn e<E: std::fmt::Display>(err: E) -> String {
    err.to_string()
}

fn c1_diagonal_tangency() -> Outcome {
    let start = Instant::now();
    let f = PrimeField::new(CERT_PRIME).map_err(e)?;
    let mut rng = Pcg64::seed_from_u64(11);
    for seed in 0..100 {
        let m = random_member(seed, &f, false);
        let diff = m.restrict_to_diagonal().map_err(e)?.checked_sub(&m.q.pow(2)).map_err(e)?;
        ensure(diff.is_zero(), format!("seed {seed}: F(x,x) - q^2 = {diff}"))?;
        // pointwise check by direct evaluation at (a, a)
        for _ in 0..5 {
            let a: Vec<u64> = (0..3).map(|_| rng.random_range(0..CERT_PRIME)).collect();
            let fa = m.f.evaluate(&[a[0], a[1], a[2], a[0], a[1], a[2]]);
            let qa = m.q.evaluate(&[a[0], a[1], a[2], 0, 0, 0]);
            ensure(fa == f.mul(&qa, &qa), format!("seed {seed}: F(a,a) != q(a)^2 at {a:?}"))?;
        }
    }
    within(start, Duration::from_secs(10))?;
    Ok(format!("100 seeds over F_{CERT_PRIME}, exact, {:.2?}", start.elapsed()))
}

fn certified_report() -> Result<verra_core::verra::CertificationReport, String> {
    certify(RECORDED_SEED, CERT_PRIME, &CertifyOptions::default()).map_err(e)
}

fn c2_smoothness() -> Outcome {
    let start = Instant::now();
    let r = certified_report()?;
    within(start, Duration::from_secs(600))?;
    ensure(r.verra_smooth, "threefold not smooth")?;
    ensure(r.sextic_smooth == (true, true), format!("sextic smoothness {:?}", r.sextic_smooth))?;
    ensure(r.notes.is_empty(), format!("budget notes: {:?}", r.notes))?;
    let member = random_member(RECORDED_SEED, &PrimeField::new(CERT_PRIME).map_err(e)?, false);
    let s = discriminant_sextics(&member).map_err(e)?;
    for (name, p) in [("s1", &s.s1), ("s2", &s.s2)] {
        ensure(p.is_homogeneous() && p.total_degree() == Some(6), format!("{name} is not a degree-6 form"))?;
    }
    Ok(format!("seed {RECORDED_SEED} at p = {CERT_PRIME}: threefold and both sextics smooth, degree 6, {:.2?}", start.elapsed()))
}

/// Projective points of a plane curve by enumerating normalized coordinates.
fn brute_count(f: &MultiPoly<PrimeField>) -> u64 {
    let p = f.ring().modulus();
    let mut pts: Vec<[u64; 3]> = vec![[1, 0, 0]];
    pts.extend((0..p).map(|a| [a, 1, 0]));
    pts.extend((0..p).flat_map(|a| (0..p).map(move |b| [a, b, 1])));
    pts.iter().filter(|x| f.evaluate(&x[..]) == 0).count() as u64
}

fn c3_non_isomorphism_evidence() -> Outcome {
    let r = certified_report()?;
    let pgl3 = r.pgl3_unit_ideal == Some(true);
    ensure(r.counts_differ() || pgl3, format!("counts agree everywhere: {:?}", r.point_counts))?;
    ensure(r.conclusion == Conclusion::Certified, format!("conclusion {:?}", r.conclusion))?;
    ensure(r.evidence.contains("evidence"), "report does not label the result as evidence")?;
    ensure(r.point_counts.iter().map(|row| row.0).collect::<Vec<_>>() == [101, 103, 107, 109, 113], "unexpected prime list")?;
    // cross-check the F_101 row by enumeration
    let member = random_member(RECORDED_SEED, &verra_core::algebra::Rationals, false);
    let s = discriminant_sextics(&member).map_err(e)?;
    let f101 = PrimeField::new(101).map_err(e)?;
    let (a, b) = (reduce_poly(&s.s1, &f101).map_err(e)?, reduce_poly(&s.s2, &f101).map_err(e)?);
    let brute = (brute_count(&a), brute_count(&b));
    ensure(count_points_plane_curve(&a).map_err(e)? == brute.0 && count_points_plane_curve(&b).map_err(e)? == brute.1, "count disagrees with enumeration")?;
    ensure((101, brute.0, brute.1) == r.point_counts[0], "report row for 101 disagrees with enumeration")?;
    let differing: Vec<u64> = r.point_counts.iter().filter(|row| row.1 != row.2).map(|row| row.0).collect();
    Ok(format!("finite-field evidence only: counts differ at p in {differing:?} (F_101: {} vs {})", brute.0, brute.1))
}

fn k3() -> Lattice {
    direct_sum_all(&[Lattice::u(), Lattice::u(), Lattice::u(), Lattice::e8_negative(), Lattice::e8_negative()])
}

fn c4_lattice_fixtures(fx: &MukaiFixture) -> Outcome {
    let start = Instant::now();
    let u2 = Lattice::hyperbolic(2).map_err(e)?;
    let h2 = h2_model_gram();
    let [_, pt, twisted] = pic_sb_mukai_vectors();
    let vs = [&pt, &twisted];
    let mut gram = vec![vec![0i64; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            gram[i][j] = mukai_pairing(vs[i], vs[j], &h2).map_err(e)?;
        }
    }
    let model = Lattice::from_i64(&gram, &["a", "b"]).map_err(e)?;
    ensure(same_genus_invariants(&model, &u2).map_err(e)?, format!("model Gram {gram:?} not genus-equal to U(2)"))?;
    let pic_x = build_pic_x(&fx.lattice).map_err(e)?;
    ensure(same_genus_invariants(&pic_x.as_lattice(), &u2).map_err(e)?, "embedded pair not genus-equal to U(2)")?;

    let t = fx.t_sb.as_lattice();
    ensure(t.rank() == 21, format!("T_S(B) rank {}", t.rank()))?;
    ensure(signature(&t).map_err(e)? == (2, 19), "T_S(B) signature")?;
    let reference = direct_sum_all(&[
        Lattice::rank_one(-2).map_err(e)?,
        Lattice::hyperbolic(-2).map_err(e)?,
        Lattice::u(),
        Lattice::e8_negative(),
        Lattice::e8_negative(),
    ]);
    ensure(same_genus_invariants(&t, &reference).map_err(e)?, "T_S(B) genus mismatch")?;

    let l = &fx.lattice;
    ensure(l.is_even() && l.is_unimodular() && signature(l).map_err(e)? == (4, 20), "extended lattice is not even unimodular of signature (4,20)")?;
    for sp in &fx.splittings {
        ensure(same_genus_invariants(&sp.lambda.as_lattice(), &k3()).map_err(e)?, format!("Lambda for side {:?} genus mismatch", sp.side))?;
    }
    within(start, Duration::from_secs(5))?;
    Ok(format!("U(2), T_S(B), extended lattice and both Lambda_i as required, {:.2?}", start.elapsed()))
}

fn c5_parity_oracle(fx: &MukaiFixture) -> Outcome {
    let mut checked = 0usize;
    for g1 in -3..=3 {
        for g2 in -3..=3 {
            for code in 0..625 {
                let tail: Vec<i64> = (0..4).map(|k| (code / 5i64.pow(k)) % 5 - 2).collect();
                let tau = TauClass::new(Side::One, g1, g2, &tail).map_err(e)?;
                if tau.is_zero() {
                    continue;
                }
                let (a, b) = (brauer_trivial_by_parity(&tau).map_err(e)?, brauer_trivial_by_kernel(fx, &tau).map_err(e)?);
                ensure(a == b, format!("disagreement at {tau:?}: parity {a}, kernel {b}"))?;
                checked += 1;
            }
        }
    }
    let mut rng = Pcg64::seed_from_u64(5);
    let mut random = 0;
    while random < 200 {
        let side = if rng.random_bool(0.5) { Side::One } else { Side::Two };
        let tail: Vec<i64> = (0..TAIL_LABELS.len()).map(|_| rng.random_range(-6..=6)).collect();
        let tau = TauClass::new(side, rng.random_range(-6..=6), rng.random_range(-6..=6), &tail).map_err(e)?;
        if tau.is_zero() {
            continue;
        }
        let (a, b) = (brauer_trivial_by_parity(&tau).map_err(e)?, brauer_trivial_by_kernel(fx, &tau).map_err(e)?);
        ensure(a == b, format!("disagreement at {tau:?}: parity {a}, kernel {b}"))?;
        random += 1;
    }
    Ok(format!("{checked} sweep classes and 200 random full-tail classes agree exactly"))
}

fn rat(v: &[BigInt]) -> Vec<BigRational> {
    v.iter().map(|x| BigRational::from_integer(x.clone())).collect()
}

fn c6_transfer_identity(fx: &MukaiFixture) -> Outcome {
    let x = FormalPeriod::generic(&fx.lattice);
    let (p1, p2) = (project_period(fx, &x, Side::One).map_err(e)?, project_period(fx, &x, Side::Two).map_err(e)?);
    let mut rng = Pcg64::seed_from_u64(6);
    for _ in 0..50 {
        let tail: Vec<i64> = (0..TAIL_LABELS.len()).map(|_| rng.random_range(-5..=5)).collect();
        let tau1 = TauClass::new(Side::One, rng.random_range(-8..=8), 2 * rng.random_range(-4..=4), &tail).map_err(e)?;
        let tau2 = tau_transfer(fx, &tau1, &x).map_err(e)?;
        let lhs = p1.pair_vector(&fx.lattice, &rat(&tau1.to_vector(fx).map_err(e)?));
        let rhs = p2.pair_vector(&fx.lattice, &rat(&tau2.to_vector(fx).map_err(e)?));
        let diff = lhs.checked_sub(&rhs).map_err(e)?;
        ensure(diff.is_zero(), format!("identity fails for {tau1:?}: {diff}"))?;
    }
    let mut odd_checked = 0;
    for g2 in -7..=7 {
        let tail: Vec<i64> = (0..TAIL_LABELS.len()).map(|_| rng.random_range(-3..=3)).collect();
        let tau = TauClass::new(Side::One, rng.random_range(-5..=5), g2, &tail).map_err(e)?;
        let r = tau_transfer(fx, &tau, &x);
        let errs = matches!(r, Err(MukaiError::NonIntegral(_)));
        ensure(errs == (g2 % 2 != 0), format!("gamma2 = {g2}: transfer result {r:?}"))?;
        odd_checked += 1;
    }
    Ok(format!("identity holds for 50 random even-gamma2 classes; errors exactly for odd gamma2 ({odd_checked} parity checks)"))
}

fn c7_non_extension(fx: &MukaiFixture) -> Outcome {
    let tau1 = TauClass::new(Side::One, 1, 2, &[]).map_err(e)?;
    let cert = non_extension_certificate(fx, &tau1).map_err(e)?;
    ensure(cert.kernel_gram_preserved, "kernel Gram not preserved")?;
    ensure(cert.verified(), format!("certificate incomplete: {cert:?}"))?;
    ensure(cert.witness_image.iter().any(|(_, v)| v.contains('/')), "witness image is integral")?;
    Ok(format!("kernel isometry preserves the Gram matrix; witness {} has non-integral image", cert.witness_label))
}

fn c8_index_two(fx: &MukaiFixture) -> Outcome {
    let count = index_two_embedding_count_fixture(fx).map_err(e)?;
    ensure(count == 2, format!("index-two embedding count {count}"))?;
    let idx = embedding_index_fixture(fx).map_err(e)?;
    ensure(idx == BigInt::from(2), format!("embedding index {idx}"))?;
    Ok("two index-two overlattices in the reference genus; projection image has index 2".into())
}

fn c9_grothendieck() -> Outcome {
    let start = Instant::now();
    ensure(verify_verra_relation(), "relation fails")?;
    let l = GrothClass::lefschetz();
    let p1 = expand_projective_space(1).map_err(e)?;
    let square = class_arith(&p1, &p1, ArithOp::Mul);
    let blowup = class_arith(&expand_projective_space(2).map_err(e)?, &l, ArithOp::Add);
    let expected = GrothClass::parse("L^2 + 2*L + 1").map_err(e)?;
    ensure(square == blowup && blowup == expected, format!("{square} / {blowup} / {expected}"))?;
    within(start, Duration::from_secs(1))?;
    Ok(format!("relation holds; (1+L)^2 = [P^2] + L = {expected}"))
}

fn random_ideal(rng: &mut Pcg64, f: PrimeField) -> Option<PolyIdeal<PrimeField>> {
    let nv = rng.random_range(1..=3usize);
    let vars = var_names(&["x", "y", "z"][..nv]);
    let gens: Vec<MultiPoly<PrimeField>> = (0..rng.random_range(1..=3usize))
        .map(|_| {
            let terms: Vec<(Monomial, u64)> = (0..rng.random_range(1..=4usize))
                .map(|_| {
                    let mut e = vec![0u16; nv];
                    for _ in 0..rng.random_range(0..=3) {
                        e[rng.random_range(0..nv)] += 1;
                    }
                    (Monomial::from_exponents(&e), rng.random_range(1..101))
                })
                .collect();
            MultiPoly::from_terms(f, vars.clone(), terms)
        })
        .filter(|g| !g.is_zero())
        .collect();
    if gens.is_empty() {
        None
    } else {
        PolyIdeal::new(gens).ok()
    }
}

fn s_polynomial(i: &PolyIdeal<PrimeField>, a: &MultiPoly<PrimeField>, b: &MultiPoly<PrimeField>) -> MultiPoly<PrimeField> {
    let (la, lb) = (i.leading_monomial(a).expect("nonzero"), i.leading_monomial(b).expect("nonzero"));
    let l = la.lcm(&lb);
    let f = i.field();
    let ca = f.inv(&a.coeff(&la)).expect("unit");
    let cb = f.inv(&b.coeff(&lb)).expect("unit");
    &a.mul_monomial(&l.div(&la), &ca) - &b.mul_monomial(&l.div(&lb), &cb)
}

fn check_ideal(i: &PolyIdeal<PrimeField>, rng: &mut Pcg64) -> Result<(), String> {
    let budget = Budget::default();
    let basis = i.groebner_basis(&budget).map_err(e)?;
    let gb = PolyIdeal::new(basis.clone()).map_err(e)?;
    for g in i.generators() {
        ensure(gb.contains(g, &budget).map_err(e)?, format!("generator {g} not in the basis ideal"))?;
    }
    for h in &basis {
        ensure(i.contains(h, &budget).map_err(e)?, format!("basis element {h} not in the input ideal"))?;
    }
    for (k, a) in basis.iter().enumerate() {
        for b in &basis[k + 1..] {
            ensure(gb.normal_form(&s_polynomial(i, a, b), &budget).map_err(e)?.is_zero(), format!("S({a}, {b}) does not reduce to zero"))?;
        }
    }
    // canonicity: a different generating set of the same ideal has the same reduced basis
    let f = *i.field();
    let mut other = i.generators().to_vec();
    let combo = i.generators().iter().fold(MultiPoly::zero(f, i.vars().clone()), |acc, g| &acc + &g.scale(&rng.random_range(0..101u64)));
    other.push(combo);
    other.reverse();
    let alt = PolyIdeal::new(other).map_err(e)?.groebner_basis(&budget).map_err(e)?;
    ensure(alt == basis, "reduced basis depends on the generating set")?;
    ensure(gb.groebner_basis(&budget).map_err(e)? == basis, "basis is not a fixed point")?;
    // saturation idempotence
    let x = PolyIdeal::new(vec![MultiPoly::var(f, i.vars().clone(), "x").map_err(e)?]).map_err(e)?;
    let s1 = i.saturate(&x, &budget).map_err(e)?;
    let s2 = s1.saturate(&x, &budget).map_err(e)?;
    ensure(s1.same_ideal(&s2, &budget).map_err(e)?, "saturation is not idempotent")?;
    Ok(())
}

fn c10_groebner_soundness() -> Outcome {
    let f = PrimeField::new(101).map_err(e)?;
    let mut rng = Pcg64::seed_from_u64(10);
    let mut n = 0;
    while n < 200 {
        let Some(i) = random_ideal(&mut rng, f) else { continue };
        check_ideal(&i, &mut rng).map_err(|m| format!("ideal {:?}: {m}", i.generators().iter().map(|g| g.to_string()).collect::<Vec<_>>()))?;
        n += 1;
    }
    Ok("200 random ideals over F_101: canonical, membership both ways, Buchberger criterion, saturation idempotent".into())
}

fn run(n: usize, name: &str, f: impl FnOnce() -> Outcome) -> bool {
    let r = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
        Err(p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_else(|| "panic".into()))
    });
    match r {
        Ok(msg) => {
            println!("criterion {n:>2} PASS {name}: {msg}");
            true
        }
        Err(msg) => {
            println!("criterion {n:>2} FAIL {name}: {msg}");
            false
        }
    }
}

fn main() {
    let fx = MukaiFixture::new().expect("fixture");
    let results = [
        run(1, "diagonal tangency", c1_diagonal_tangency),
        run(2, "smooth member and sextics", c2_smoothness),
        run(3, "non-isomorphism evidence", c3_non_isomorphism_evidence),
        run(4, "lattice fixtures", || c4_lattice_fixtures(&fx)),
        run(5, "Brauer parity oracle", || c5_parity_oracle(&fx)),
        run(6, "tau transfer identity", || c6_transfer_identity(&fx)),
        run(7, "non-extension certificate", || c7_non_extension(&fx)),
        run(8, "index-two fixture", || c8_index_two(&fx)),
        run(9, "Grothendieck identities", c9_grothendieck),
        run(10, "Groebner engine soundness", c10_groebner_soundness),
    ];
    let passed = results.iter().filter(|&&b| b).count();
    println!("acceptance: {passed}/{} criteria passed", results.len());
    if passed != results.len() {
        std::process::exit(1);
    }
}
