//! Classes in the Grothendieck ring of varieties, modeled as integer
//! polynomials in formal generators, and the motivic identities relating a
//! Verra fourfold to its two K3 surfaces.


use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_bigint::BigInt;
use serde::Serialize;
use thiserror::Error;

use crate::algebra::{var_names, AlgebraError, MultiPoly, Integers};

/// `L` is the class of the affine line, `s1`, `s2` the two K3 surfaces,
/// `p2` the projective plane and `x_cl` the fourfold.
pub const DEFAULT_GENERATORS: [&str; 5] = ["L", "s1", "s2", "p2", "x_cl"];

#[derive(Debug, Error)]
pub enum GrothError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("projective space of negative dimension {0}")]
    NegativeDimension(i64),
}

/// A class in the free polynomial model, kept in expanded form.
#[derive(Clone, Debug)]
pub struct GrothClass {
    poly: MultiPoly<Integers>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
}

fn default_vars() -> Arc<[String]> {
    var_names(&DEFAULT_GENERATORS)
}

/// Default generators first, then any others in order of appearance.
fn union_vars(a: &Arc<[String]>, b: &Arc<[String]>) -> Arc<[String]> {
    let mut names: Vec<String> = a.to_vec();
    for n in b.iter() {
        if !names.contains(n) {
            names.push(n.clone());
        }
    }
    var_names(&names)
}

impl GrothClass {
    /// Parses over the default generators.
    pub fn parse(text: &str) -> Result<Self, GrothError> {
        GrothClass::parse_with(&[], text)
    }

    /// Parses over the default generators plus `extra`.
    pub fn parse_with(extra: &[&str], text: &str) -> Result<Self, GrothError> {
        let vars = union_vars(&default_vars(), &var_names(extra));
        Ok(GrothClass { poly: MultiPoly::parse(Integers, vars, text)? })
    }

    pub fn from_poly(poly: MultiPoly<Integers>) -> Self {
        GrothClass { poly }
    }

    pub fn integer(n: i64) -> Self {
        GrothClass { poly: MultiPoly::constant(Integers, default_vars(), BigInt::from(n)) }
    }

    pub fn generator(name: &str) -> Result<Self, GrothError> {
        GrothClass::parse_with(&[name], name)
    }

    /// The Lefschetz class `L`.
    pub fn lefschetz() -> Self {
        GrothClass::generator("L").expect("default generator")
    }

    pub fn poly(&self) -> &MultiPoly<Integers> {
        &self.poly
    }

    pub fn is_zero(&self) -> bool {
        self.poly.is_zero()
    }

    fn aligned(&self, other: &GrothClass) -> (MultiPoly<Integers>, MultiPoly<Integers>) {
        let vars = union_vars(self.poly.vars(), other.poly.vars());
        (self.poly.with_vars(vars.clone()).expect("superset"), other.poly.with_vars(vars).expect("superset"))
    }

    /// Replaces each named generator by a class.
    pub fn substitute(&self, images: &[(&str, &GrothClass)]) -> Result<Self, GrothError> {
        let mut vars = self.poly.vars().clone();
        for (_, c) in images {
            vars = union_vars(&vars, c.poly.vars());
        }
        let base = self.poly.with_vars(vars.clone()).expect("superset");
        let imgs: Vec<(&str, MultiPoly<Integers>)> = images.iter().map(|(n, c)| (*n, c.poly.with_vars(vars.clone()).expect("superset"))).collect();
        Ok(GrothClass { poly: base.substitute(vars, &imgs)? })
    }

    pub fn pow(&self, e: u32) -> Self {
        GrothClass { poly: self.poly.pow(e) }
    }
}

impl PartialEq for GrothClass {
    fn eq(&self, other: &Self) -> bool {
        let (a, b) = self.aligned(other);
        a == b
    }
}

impl Eq for GrothClass {}

impl fmt::Display for GrothClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.poly)
    }
}

impl FromStr for GrothClass {
    type Err = GrothError;

    /// Generators outside the default set are picked up from the text.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut extra: Vec<String> = Vec::new();
        for word in s.split(|c: char| !(c.is_alphanumeric() || c == '_')) {
            let is_name = word.chars().next().is_some_and(|c| c.is_alphabetic() || c == '_');
            if is_name && !DEFAULT_GENERATORS.contains(&word) && !extra.iter().any(|e| e == word) {
                extra.push(word.to_string());
            }
        }
        let refs: Vec<&str> = extra.iter().map(String::as_str).collect();
        GrothClass::parse_with(&refs, s)
    }
}

pub fn class_arith(a: &GrothClass, b: &GrothClass, op: ArithOp) -> GrothClass {
    let (x, y) = a.aligned(b);
    let poly = match op {
        ArithOp::Add => x.checked_add(&y),
        ArithOp::Sub => x.checked_sub(&y),
        ArithOp::Mul => x.checked_mul(&y),
    }
    .expect("aligned operands");
    GrothClass { poly }
}

/// `[P^n] = 1 + L + ... + L^n`.
pub fn expand_projective_space(n: i64) -> Result<GrothClass, GrothError> {
    if n < 0 {
        return Err(GrothError::NegativeDimension(n));
    }
    let l = GrothClass::lefschetz();
    let mut acc = GrothClass::integer(1);
    let mut power = GrothClass::integer(1);
    for _ in 0..n {
        power = class_arith(&power, &l, ArithOp::Mul);
        acc = class_arith(&acc, &power, ArithOp::Add);
    }
    Ok(acc)
}

/// The two expressions for `[X]`, their difference and the expected value
/// `(s1 - s2) L`.
#[derive(Clone, Debug, Serialize)]
pub struct VerraRelation {
    pub via_s1: String,
    pub via_s2: String,
    pub difference: String,
    pub expected: String,
    pub holds: bool,
}

/// Substitutes `x_cl = p2 (1 + L^2) + s_i L` for `i = 1, 2` and compares the
/// difference with `(s1 - s2) L`. When `p2` is given it replaces the
/// generator `p2` first.
pub fn verra_relation(p2: Option<&GrothClass>) -> Result<VerraRelation, GrothError> {
    let l = GrothClass::lefschetz();
    let p2_class = match p2 {
        Some(c) => c.clone(),
        None => GrothClass::generator("p2")?,
    };
    let one_plus_l2 = GrothClass::parse("1 + L^2")?;
    let base = class_arith(&p2_class, &one_plus_l2, ArithOp::Mul);
    let x = GrothClass::generator("x_cl")?;
    let via = |s: &str| -> Result<GrothClass, GrothError> {
        let image = class_arith(&base, &class_arith(&GrothClass::generator(s)?, &l, ArithOp::Mul), ArithOp::Add);
        x.substitute(&[("x_cl", &image)])
    };
    let (a, b) = (via("s1")?, via("s2")?);
    let difference = class_arith(&a, &b, ArithOp::Sub);
    let expected = GrothClass::parse("s1*L - s2*L")?;
    Ok(VerraRelation { via_s1: a.to_string(), via_s2: b.to_string(), holds: difference == expected, difference: difference.to_string(), expected: expected.to_string() })
}

/// `([S1] - [S2]) L = 0` follows from the two expressions for `[X]`; checked
/// with `p2` both formal and expanded to `1 + L + L^2`.
pub fn verify_verra_relation() -> bool {
    let expanded = expand_projective_space(2).expect("n >= 0");
    [verra_relation(None), verra_relation(Some(&expanded))].into_iter().all(|r| r.is_ok_and(|r| r.holds))
}
