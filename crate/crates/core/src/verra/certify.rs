//! The certification pipeline for one seeded member.
//!
//! The member is drawn with integer coefficients, so it can be reduced modulo
//! every prime used: the certification prime for smoothness, the point-count
//! primes and the prime of the equivalence system. All verdicts are finite
//! field evidence about the reductions, not statements over the rationals.

use serde::{Deserialize, Serialize};

use crate::algebra::{PrimeField, Rationals};
use crate::ideal::Budget;

use super::{
    count_points_plane_curve, discriminant_sextics, is_smooth_plane_curve, is_smooth_verra_threefold, random_member,
    reduce_poly, sextics_projectively_equivalent, EquivalenceMode, VerraError,
};

pub const DEFAULT_PRIME: u64 = 10007;
pub const DEFAULT_POINT_PRIMES: [u64; 5] = [101, 103, 107, 109, 113];
pub const DEFAULT_PGL3_PRIME: u64 = 101;
pub const EVIDENCE_LABEL: &str = "finite-field evidence: smoothness and non-equivalence hold for the reductions modulo the listed primes";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Conclusion {
    Certified,
    Retry,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertifyOptions {
    pub fixed_fermat: bool,
    pub point_primes: Vec<u64>,
    pub with_pgl3: bool,
    pub pgl3_prime: u64,
    pub pgl3_mode: EquivalenceMode,
    /// Replace every `l_i` by zero before certifying.
    pub force_degenerate: bool,
    pub budget: Budget,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        CertifyOptions {
            fixed_fermat: false,
            point_primes: DEFAULT_POINT_PRIMES.to_vec(),
            with_pgl3: false,
            pgl3_prime: DEFAULT_PGL3_PRIME,
            pgl3_mode: EquivalenceMode::Pair,
            force_degenerate: false,
            budget: Budget::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertificationReport {
    pub seed: u64,
    pub prime: u64,
    pub verra_smooth: bool,
    pub sextic_smooth: (bool, bool),
    /// Rows `(prime, #S1(F_p), #S2(F_p))`.
    pub point_counts: Vec<(u64, u64, u64)>,
    pub pgl3_unit_ideal: Option<bool>,
    pub conclusion: Conclusion,
    pub evidence: String,
    /// Steps that ran out of budget or could not be evaluated.
    pub notes: Vec<String>,
}

impl CertificationReport {
    /// Whether the point counts differ for some prime.
    pub fn counts_differ(&self) -> bool {
        self.point_counts.iter().any(|&(_, a, b)| a != b)
    }
}

/// `None` when the step ran out of budget.
fn verdict(r: Result<bool, VerraError>, step: &str, notes: &mut Vec<String>) -> Result<Option<bool>, VerraError> {
    match r {
        Ok(b) => Ok(Some(b)),
        Err(e) if e.is_budget() => {
            notes.push(format!("{step}: {e}"));
            Ok(None)
        }
        Err(e) => Err(e),
    }
}

pub fn certify(seed: u64, prime: u64, options: &CertifyOptions) -> Result<CertificationReport, VerraError> {
    let field = PrimeField::new(prime)?;
    let mut member = random_member(seed, &Rationals, options.fixed_fermat);
    if options.force_degenerate {
        member = member.degenerate();
    }
    let mut notes = Vec::new();

    let reduced = member.reduce_mod(&field)?;
    let verra_smooth = verdict(is_smooth_verra_threefold(&reduced, &options.budget), "threefold smoothness", &mut notes)?;

    let sextics = discriminant_sextics(&member)?;
    let (s1, s2) = (reduce_poly(&sextics.s1, &field)?, reduce_poly(&sextics.s2, &field)?);
    let smooth1 = verdict(is_smooth_plane_curve(&s1, &options.budget), "first sextic smoothness", &mut notes)?;
    let smooth2 = verdict(is_smooth_plane_curve(&s2, &options.budget), "second sextic smoothness", &mut notes)?;

    let mut point_counts = Vec::with_capacity(options.point_primes.len());
    for &ell in &options.point_primes {
        let f = PrimeField::new(ell)?;
        let c1 = count_points_plane_curve(&reduce_poly(&sextics.s1, &f)?)?;
        let c2 = count_points_plane_curve(&reduce_poly(&sextics.s2, &f)?)?;
        point_counts.push((ell, c1, c2));
    }

    let pgl3_unit_ideal = if options.with_pgl3 {
        let f = PrimeField::new(options.pgl3_prime)?;
        let a = reduce_poly(&sextics.s1, &f)?;
        let b = match options.pgl3_mode {
            EquivalenceMode::Pair => reduce_poly(&sextics.s2, &f)?,
            EquivalenceMode::SelfEquivalence => a.clone(),
        };
        match sextics_projectively_equivalent(&a, &b, &options.budget) {
            Ok(eq) => Some(!eq),
            Err(e) if e.is_budget() => {
                notes.push(format!("equivalence system over F_{}: {e}", options.pgl3_prime));
                None
            }
            Err(e) => return Err(e),
        }
    } else {
        None
    };

    let mut report = CertificationReport {
        seed,
        prime,
        verra_smooth: verra_smooth == Some(true),
        sextic_smooth: (smooth1 == Some(true), smooth2 == Some(true)),
        point_counts,
        pgl3_unit_ideal,
        conclusion: Conclusion::Inconclusive,
        evidence: EVIDENCE_LABEL.to_string(),
        notes,
    };
    let flags = [verra_smooth, smooth1, smooth2];
    let separated = report.counts_differ() || pgl3_unit_ideal == Some(true);
    report.conclusion = if flags.contains(&Some(false)) {
        Conclusion::Retry
    } else if flags.contains(&None) {
        Conclusion::Inconclusive
    } else if separated {
        Conclusion::Certified
    } else {
        Conclusion::Inconclusive
    };
    Ok(report)
}
