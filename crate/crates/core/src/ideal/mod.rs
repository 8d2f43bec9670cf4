//! Polynomial ideals over a field: Groebner bases, membership, Krull
//! dimension and saturation.

mod groebner;

pub use groebner::{Budget, GroebnerStats, Selection, TermOrder};

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{AlgebraError, Field, Monomial, MultiPoly, ScalarTag};
use groebner::Engine;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum IdealError {
    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("{0}")]
    Invalid(String),
}

/// Generators of an ideal together with a term order and, once computed,
/// its reduced Groebner basis.
#[derive(Clone, Debug)]
pub struct PolyIdeal<F: Field> {
    field: F,
    vars: Arc<[String]>,
    order: TermOrder,
    generators: Vec<MultiPoly<F>>,
    basis: Option<Vec<MultiPoly<F>>>,
}

impl<F: Field> PolyIdeal<F> {
    pub fn new(generators: Vec<MultiPoly<F>>) -> Result<Self, IdealError> {
        let first = generators
            .first()
            .ok_or_else(|| IdealError::Invalid("an ideal needs at least one generator; use PolyIdeal::zero".into()))?;
        let (field, vars) = (first.ring().clone(), first.vars().clone());
        for g in &generators {
            if *g.ring() != field || *g.vars() != vars {
                return Err(AlgebraError::RingMismatch("ideal generators live in different rings".into()).into());
            }
        }
        Ok(PolyIdeal { field, vars, order: TermOrder::GrevLex, generators, basis: None })
    }

    pub fn zero(field: F, vars: Arc<[String]>) -> Self {
        PolyIdeal { field, vars, order: TermOrder::GrevLex, generators: Vec::new(), basis: Some(Vec::new()) }
    }

    pub fn unit(field: F, vars: Arc<[String]>) -> Self {
        let one = MultiPoly::one(field.clone(), vars.clone());
        PolyIdeal { field, vars, order: TermOrder::GrevLex, generators: vec![one.clone()], basis: Some(vec![one]) }
    }

    pub fn with_order(mut self, order: TermOrder) -> Self {
        if order != self.order {
            self.order = order;
            self.basis = None;
        }
        self
    }

    pub fn field(&self) -> &F {
        &self.field
    }

    pub fn vars(&self) -> &Arc<[String]> {
        &self.vars
    }

    pub fn order(&self) -> TermOrder {
        self.order
    }

    pub fn generators(&self) -> &[MultiPoly<F>] {
        &self.generators
    }

    pub fn cached_basis(&self) -> Option<&[MultiPoly<F>]> {
        self.basis.as_deref()
    }

    /// Sum of two ideals in the same ring.
    pub fn sum(&self, other: &Self) -> Result<Self, IdealError> {
        if self.field != other.field || self.vars != other.vars {
            return Err(AlgebraError::RingMismatch("ideal sum across rings".into()).into());
        }
        let mut gens = self.generators.clone();
        gens.extend(other.generators.iter().cloned());
        Ok(PolyIdeal { generators: gens, basis: None, ..self.clone() })
    }

    pub fn with_generator(&self, g: MultiPoly<F>) -> Result<Self, IdealError> {
        self.sum(&PolyIdeal::new(vec![g])?)
    }

    /// Returns the reduced basis (computing it if needed) and the computation statistics.
    pub fn groebner_basis_with_stats(&self, budget: &Budget) -> Result<(Vec<MultiPoly<F>>, GroebnerStats), IdealError> {
        if let Some(b) = &self.basis {
            return Ok((b.clone(), GroebnerStats { pairs_reduced: 0, basis_size: b.len() }));
        }
        let mut engine = Engine::new(&self.field, self.order, *budget);
        let raw = engine.run(&self.generators)?;
        let basis: Vec<MultiPoly<F>> = raw
            .into_iter()
            .map(|t| MultiPoly::from_terms(self.field.clone(), self.vars.clone(), t))
            .collect();
        let stats = engine.stats(basis.len());
        Ok((basis, stats))
    }

    pub fn groebner_basis(&self, budget: &Budget) -> Result<Vec<MultiPoly<F>>, IdealError> {
        self.groebner_basis_with_stats(budget).map(|(b, _)| b)
    }

    /// Same ideal with its basis cached.
    pub fn with_basis(mut self, budget: &Budget) -> Result<Self, IdealError> {
        if self.basis.is_none() {
            self.basis = Some(self.groebner_basis(budget)?);
        }
        Ok(self)
    }

    pub fn leading_monomial(&self, p: &MultiPoly<F>) -> Option<Monomial> {
        Engine::new(&self.field, self.order, Budget::default()).leading_monomial(p)
    }

    /// Remainder of `f` on division by the reduced basis.
    pub fn normal_form(&self, f: &MultiPoly<F>, budget: &Budget) -> Result<MultiPoly<F>, IdealError> {
        let basis = self.groebner_basis(budget)?;
        let engine = Engine::new(&self.field, self.order, *budget);
        let t = engine.normal_form(&basis, f);
        Ok(MultiPoly::from_terms(self.field.clone(), self.vars.clone(), t))
    }

    pub fn contains(&self, f: &MultiPoly<F>, budget: &Budget) -> Result<bool, IdealError> {
        Ok(self.normal_form(f, budget)?.is_zero())
    }

    pub fn is_unit_ideal(&self, budget: &Budget) -> Result<bool, IdealError> {
        let b = self.groebner_basis(budget)?;
        Ok(b.len() == 1 && b[0].is_constant() && !b[0].is_zero())
    }

    /// Krull dimension of the quotient ring, `-1` for the unit ideal.
    ///
    /// Read off the leading-monomial ideal as the largest set of variables
    /// containing the support of no leading monomial.
    pub fn dimension(&self, budget: &Budget) -> Result<i64, IdealError> {
        let basis = self.groebner_basis(budget)?;
        if basis.iter().any(|b| b.is_constant() && !b.is_zero()) {
            return Ok(-1);
        }
        let supports: Vec<u64> = basis
            .iter()
            .filter_map(|b| self.leading_monomial(b))
            .map(|m| m.support().fold(0u64, |acc, i| acc | (1 << i)))
            .collect();
        Ok(max_independent_set(self.vars.len(), &supports) as i64)
    }

    /// Equality of ideals via reduced bases in the common term order.
    pub fn same_ideal(&self, other: &Self, budget: &Budget) -> Result<bool, IdealError> {
        if self.field != other.field || self.vars != other.vars {
            return Err(AlgebraError::RingMismatch("ideal comparison across rings".into()).into());
        }
        let a = self.clone().with_order(TermOrder::GrevLex).groebner_basis(budget)?;
        let b = other.clone().with_order(TermOrder::GrevLex).groebner_basis(budget)?;
        Ok(a == b)
    }

    /// Embeds into a ring with extra variables prepended.
    fn prepend_vars(&self, names: &[&str]) -> Result<(Arc<[String]>, Vec<MultiPoly<F>>), IdealError> {
        let mut all: Vec<String> = names.iter().map(|s| s.to_string()).collect();
        for v in self.vars.iter() {
            if all.contains(v) {
                return Err(IdealError::Invalid(format!("auxiliary variable {v:?} clashes with ring variable")));
            }
            all.push(v.clone());
        }
        let vars: Arc<[String]> = all.into();
        let gens = self
            .generators
            .iter()
            .map(|g| g.with_vars(vars.clone()))
            .collect::<Result<Vec<_>, _>>()?;
        Ok((vars, gens))
    }

    /// Generators of the elimination ideal after dropping the first `k`
    /// variables of `vars`, computed in the block order.
    fn eliminate_prefix(&self, k: usize, vars: Arc<[String]>, gens: Vec<MultiPoly<F>>, budget: &Budget) -> Result<Self, IdealError> {
        let big = PolyIdeal { field: self.field.clone(), vars, order: TermOrder::Elimination { block: k }, generators: gens, basis: None };
        let basis = big.groebner_basis(budget)?;
        let kept: Vec<MultiPoly<F>> = basis
            .into_iter()
            .filter(|g| g.terms().all(|(m, _)| m.exponents()[..k].iter().all(|&e| e == 0)))
            .map(|g| g.with_vars(self.vars.clone()))
            .collect::<Result<Vec<_>, _>>()?;
        if kept.is_empty() {
            return Ok(PolyIdeal::zero(self.field.clone(), self.vars.clone()).with_order(self.order));
        }
        Ok(PolyIdeal { generators: kept, basis: None, ..self.clone() })
    }

    /// `I : g^inf` by the Rabinowitsch trick: eliminate `t` from `I + <1 - t*g>`.
    pub fn saturate_by_element(&self, g: &MultiPoly<F>, budget: &Budget) -> Result<Self, IdealError> {
        if g.ring() != &self.field || g.vars() != &self.vars {
            return Err(AlgebraError::RingMismatch("saturating element from another ring".into()).into());
        }
        if g.is_constant() && !g.is_zero() {
            return Ok(self.clone());
        }
        let (vars, mut gens) = self.prepend_vars(&["_sat_t"])?;
        let t = MultiPoly::var(self.field.clone(), vars.clone(), "_sat_t")?;
        let one = MultiPoly::one(self.field.clone(), vars.clone());
        gens.push(&one - &(&t * &g.with_vars(vars.clone())?));
        self.eliminate_prefix(1, vars, gens, budget)
    }

    /// `I ∩ J` by eliminating `s` from `s*I + (1 - s)*J`.
    pub fn intersect(&self, other: &Self, budget: &Budget) -> Result<Self, IdealError> {
        if self.field != other.field || self.vars != other.vars {
            return Err(AlgebraError::RingMismatch("ideal intersection across rings".into()).into());
        }
        if self.generators.iter().all(|g| g.is_zero()) || other.generators.iter().all(|g| g.is_zero()) {
            return Ok(PolyIdeal::zero(self.field.clone(), self.vars.clone()).with_order(self.order));
        }
        let (vars, a) = self.prepend_vars(&["_int_s"])?;
        let (_, b) = other.prepend_vars(&["_int_s"])?;
        let s = MultiPoly::var(self.field.clone(), vars.clone(), "_int_s")?;
        let one_minus_s = &MultiPoly::one(self.field.clone(), vars.clone()) - &s;
        let mut gens: Vec<MultiPoly<F>> = a.iter().map(|g| &s * g).collect();
        gens.extend(b.iter().map(|g| &one_minus_s * g));
        self.eliminate_prefix(1, vars, gens, budget)
    }

    /// `I : J^inf` as the intersection of `I : g^inf` over generators `g` of `J`.
    pub fn saturate(&self, j: &Self, budget: &Budget) -> Result<Self, IdealError> {
        if self.field != j.field || self.vars != j.vars {
            return Err(AlgebraError::RingMismatch("saturation across rings".into()).into());
        }
        let gens: Vec<&MultiPoly<F>> = j.generators.iter().filter(|g| !g.is_zero()).collect();
        if gens.is_empty() {
            // I : 0^inf is the whole ring
            return Ok(PolyIdeal::unit(self.field.clone(), self.vars.clone()));
        }
        let mut acc: Option<Self> = None;
        for g in gens {
            let part = self.saturate_by_element(g, budget)?;
            acc = Some(match acc {
                None => part,
                Some(a) => a.intersect(&part, budget)?,
            });
        }
        let out = acc.expect("nonempty");
        out.with_order(self.order).with_basis(budget)
    }

    /// Whether `I : J^inf` is the unit ideal, without forming the intersection:
    /// it is iff `I + <t*g - 1>` is the unit ideal for every generator `g` of `J`.
    pub fn saturation_is_unit(&self, j: &Self, budget: &Budget) -> Result<bool, IdealError> {
        for g in j.generators.iter().filter(|g| !g.is_zero()) {
            let (vars, mut gens) = self.prepend_vars(&["_sat_t"])?;
            let t = MultiPoly::var(self.field.clone(), vars.clone(), "_sat_t")?;
            gens.push(&(&t * &g.with_vars(vars.clone())?) - &MultiPoly::one(self.field.clone(), vars.clone()));
            if !PolyIdeal::new(gens)?.is_unit_ideal(budget)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Product ideal.
    pub fn product(&self, other: &Self) -> Result<Self, IdealError> {
        let mut gens = Vec::new();
        for a in &self.generators {
            for b in &other.generators {
                gens.push(a.checked_mul(b)?);
            }
        }
        PolyIdeal::new(gens)
    }

    pub fn to_json(&self) -> IdealJson {
        IdealJson {
            ring: self.field.tag(),
            variables: self.vars.to_vec(),
            order: self.order,
            generators: self.generators.iter().map(|g| g.to_string()).collect(),
        }
    }

    pub fn from_json(field: F, json: &IdealJson) -> Result<Self, IdealError> {
        if field.tag() != json.ring {
            return Err(IdealError::Invalid(format!("ring tag {:?} does not match {:?}", json.ring, field.tag())));
        }
        let vars: Arc<[String]> = json.variables.clone().into();
        let gens = json
            .generators
            .iter()
            .map(|s| MultiPoly::parse(field.clone(), vars.clone(), s))
            .collect::<Result<Vec<_>, _>>()?;
        let ideal = if gens.is_empty() { PolyIdeal::zero(field, vars) } else { PolyIdeal::new(gens)? };
        Ok(ideal.with_order(json.order))
    }
}

/// Serialized ideal: generator strings in the polynomial text format.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdealJson {
    pub ring: ScalarTag,
    pub variables: Vec<String>,
    #[serde(flatten)]
    pub order: TermOrder,
    pub generators: Vec<String>,
}

fn max_independent_set(n: usize, supports: &[u64]) -> usize {
    // largest S with no support contained in S; branch on variables
    fn go(i: usize, n: usize, chosen: u64, size: usize, supports: &[u64], best: &mut usize) {
        if size + (n - i) <= *best {
            return;
        }
        if i == n {
            *best = size;
            return;
        }
        let with = chosen | (1 << i);
        if !supports.iter().any(|&s| s & !with == 0) {
            go(i + 1, n, with, size + 1, supports, best);
        }
        go(i + 1, n, chosen, size, supports, best);
    }
    let mut best = 0;
    go(0, n, 0, 0, supports, &mut best);
    best
}

pub fn groebner_basis<F: Field>(ideal: &PolyIdeal<F>, budget: &Budget) -> Result<Vec<MultiPoly<F>>, IdealError> {
    ideal.groebner_basis(budget)
}

pub fn ideal_dimension<F: Field>(ideal: &PolyIdeal<F>, budget: &Budget) -> Result<i64, IdealError> {
    ideal.dimension(budget)
}

pub fn saturate<F: Field>(i: &PolyIdeal<F>, j: &PolyIdeal<F>, budget: &Budget) -> Result<PolyIdeal<F>, IdealError> {
    i.saturate(j, budget)
}

pub fn is_unit_ideal<F: Field>(ideal: &PolyIdeal<F>, budget: &Budget) -> Result<bool, IdealError> {
    ideal.is_unit_ideal(budget)
}
