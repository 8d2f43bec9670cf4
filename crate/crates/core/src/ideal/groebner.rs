//! Buchberger's algorithm with the Gebauer-Moeller pair update.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::algebra::{grevlex_cmp, lex_cmp, Field, Monomial, MultiPoly};

use super::IdealError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "order", rename_all = "lowercase")]
pub enum TermOrder {
    #[serde(rename = "grevlex")]
    GrevLex,
    Lex,
    /// Block order: the first `block` variables are eliminated (each block grevlex).
    Elimination { block: usize },
}

impl TermOrder {
    pub fn cmp(&self, a: &Monomial, b: &Monomial) -> Ordering {
        let (a, b) = (a.exponents(), b.exponents());
        match *self {
            TermOrder::GrevLex => grevlex_cmp(a, b),
            TermOrder::Lex => lex_cmp(a, b),
            TermOrder::Elimination { block } => {
                grevlex_cmp(&a[..block], &b[..block]).then_with(|| grevlex_cmp(&a[block..], &b[block..]))
            }
        }
    }
}

/// Order in which critical pairs are processed.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Selection {
    /// Smallest lcm degree first.
    #[default]
    Normal,
    /// Smallest sugar degree first; better on inhomogeneous systems.
    Sugar,
}

/// Resource limits and pair selection for one Groebner basis computation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budget {
    pub max_pairs: usize,
    pub max_degree: u32,
    /// Coefficient size guard for characteristic zero; ignored over F_p.
    pub max_coeff_bits: u64,
    #[serde(default)]
    pub selection: Selection,
}

impl Default for Budget {
    fn default() -> Self {
        Budget { max_pairs: 200_000, max_degree: 40, max_coeff_bits: 4096, selection: Selection::Normal }
    }
}

impl Budget {
    pub fn with_selection(self, selection: Selection) -> Self {
        Budget { selection, ..self }
    }
}

type Terms<E> = Vec<(Monomial, E)>;

#[derive(Clone, Debug)]
struct Element<E> {
    /// Monic, sorted by decreasing term order.
    terms: Terms<E>,
    sugar: u32,
    /// Support of the leading monomial, for quick divisibility rejection.
    mask: u64,
}

impl<E> Element<E> {
    fn new(terms: Terms<E>, sugar: u32) -> Self {
        let mask = support_mask(&terms[0].0);
        Element { terms, sugar, mask }
    }

    fn lm(&self) -> &Monomial {
        &self.terms[0].0
    }
}

fn support_mask(m: &Monomial) -> u64 {
    m.exponents().iter().enumerate().fold(0u64, |acc, (i, &e)| if e > 0 { acc | (1 << (i % 64)) } else { acc })
}

#[derive(Clone, Debug)]
struct Pair {
    i: usize,
    j: usize,
    lcm: Monomial,
    sugar: u32,
}

struct OrdKey {
    m: Monomial,
    order: TermOrder,
}

impl PartialEq for OrdKey {
    fn eq(&self, other: &Self) -> bool {
        self.m == other.m
    }
}
impl Eq for OrdKey {}
impl PartialOrd for OrdKey {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for OrdKey {
    fn cmp(&self, other: &Self) -> Ordering {
        self.order.cmp(&self.m, &other.m)
    }
}

fn pair_sugar<E>(f: &Element<E>, g: &Element<E>, lcm: &Monomial) -> u32 {
    let d = lcm.degree();
    (f.sugar + d - f.lm().degree()).max(g.sugar + d - g.lm().degree())
}

pub(crate) struct Engine<'a, F: Field> {
    field: &'a F,
    order: TermOrder,
    budget: Budget,
    pairs_done: usize,
}

/// Outcome statistics, mostly for reports and tests.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroebnerStats {
    pub pairs_reduced: usize,
    pub basis_size: usize,
}

impl<'a, F: Field> Engine<'a, F> {
    pub(crate) fn new(field: &'a F, order: TermOrder, budget: Budget) -> Self {
        Engine { field, order, budget, pairs_done: 0 }
    }

    fn sorted_terms(&self, p: &MultiPoly<F>) -> Terms<F::Elem> {
        let mut t: Terms<F::Elem> = p.terms().map(|(m, c)| (m.clone(), c.clone())).collect();
        if self.order != TermOrder::GrevLex {
            t.sort_by(|a, b| self.order.cmp(&b.0, &a.0));
        }
        t
    }

    fn make_monic(&self, mut t: Terms<F::Elem>) -> Terms<F::Elem> {
        if let Some((_, lc)) = t.first() {
            if !self.field.is_one(lc) {
                let inv = self.field.inv(lc).expect("nonzero leading coefficient");
                for (_, c) in t.iter_mut() {
                    *c = self.field.mul(c, &inv);
                }
            }
        }
        t
    }

    fn check_coeffs(&self, t: &Terms<F::Elem>) -> Result<(), IdealError> {
        if self.field.characteristic() == 0 {
            let bits = t.iter().map(|(_, c)| self.field.bit_size(c)).max().unwrap_or(0);
            if bits > self.budget.max_coeff_bits {
                return Err(IdealError::BudgetExceeded(format!(
                    "coefficient size {bits} bits exceeds {}",
                    self.budget.max_coeff_bits
                )));
            }
        }
        Ok(())
    }

    /// Full reduction of `f` by the elements listed in `active`.
    fn reduce(&self, f: Terms<F::Elem>, basis: &[Element<F::Elem>], active: &[usize]) -> Terms<F::Elem> {
        let mut acc: BTreeMap<OrdKey, F::Elem> = BTreeMap::new();
        let order = self.order;
        let add = |acc: &mut BTreeMap<OrdKey, F::Elem>, m: Monomial, c: F::Elem| {
            use std::collections::btree_map::Entry;
            match acc.entry(OrdKey { m, order }) {
                Entry::Vacant(v) => {
                    v.insert(c);
                }
                Entry::Occupied(mut o) => {
                    let s = self.field.add(o.get(), &c);
                    if self.field.is_zero(&s) {
                        o.remove();
                    } else {
                        *o.get_mut() = s;
                    }
                }
            }
        };
        for (m, c) in f {
            add(&mut acc, m, c);
        }
        let mut rem = Vec::new();
        while let Some((key, c)) = acc.pop_last() {
            let mask = support_mask(&key.m);
            let divisor = active
                .iter()
                .map(|&k| &basis[k])
                .find(|g| g.mask & !mask == 0 && g.lm().divides(&key.m));
            match divisor {
                Some(g) => {
                    let q = key.m.div(g.lm());
                    let neg_c = self.field.neg(&c);
                    for (gm, gc) in g.terms.iter().skip(1) {
                        add(&mut acc, gm.mul(&q), self.field.mul(&neg_c, gc));
                    }
                }
                None => rem.push((key.m, c)),
            }
        }
        rem
    }

    fn spoly(&self, f: &Element<F::Elem>, g: &Element<F::Elem>, lcm: &Monomial) -> Terms<F::Elem> {
        let u = lcm.div(f.lm());
        let v = lcm.div(g.lm());
        let mut out = Vec::with_capacity(f.terms.len() + g.terms.len());
        for (m, c) in f.terms.iter().skip(1) {
            out.push((m.mul(&u), c.clone()));
        }
        for (m, c) in g.terms.iter().skip(1) {
            out.push((m.mul(&v), self.field.neg(c)));
        }
        out
    }

    /// Gebauer-Moeller update after adding basis element `h`.
    fn update(&self, basis: &[Element<F::Elem>], active: &mut Vec<usize>, pairs: &mut Vec<Pair>, h: usize) {
        let lh = basis[h].lm().clone();
        let mut c: Vec<Pair> = active
            .iter()
            .map(|&g| {
                let lcm = basis[g].lm().lcm(&lh);
                let sugar = pair_sugar(&basis[g], &basis[h], &lcm);
                Pair { i: g, j: h, lcm, sugar }
            })
            .collect();
        let mut d: Vec<Pair> = Vec::new();
        while let Some(p) = c.pop() {
            let coprime = basis[p.i].lm().gcd_is_one(&lh);
            let dominated = c.iter().chain(d.iter()).any(|q| q.lcm.divides(&p.lcm));
            if coprime || !dominated {
                d.push(p);
            }
        }
        // Buchberger's first criterion
        d.retain(|p| !basis[p.i].lm().gcd_is_one(&lh));
        // chain criterion on old pairs
        pairs.retain(|p| {
            !(lh.divides(&p.lcm)
                && basis[p.i].lm().lcm(&lh) != p.lcm
                && basis[p.j].lm().lcm(&lh) != p.lcm)
        });
        pairs.extend(d);
        active.retain(|&g| !lh.divides(basis[g].lm()));
        active.push(h);
    }

    fn select(&self, pairs: &mut Vec<Pair>) -> Pair {
        // smallest lcm by total degree (or sugar), then by the term order
        let key = |p: &Pair| match self.budget.selection {
            Selection::Normal => p.lcm.degree(),
            Selection::Sugar => p.sugar,
        };
        let mut best = 0;
        for k in 1..pairs.len() {
            let (a, b) = (&pairs[k].lcm, &pairs[best].lcm);
            let ord = key(&pairs[k]).cmp(&key(&pairs[best])).then_with(|| self.order.cmp(a, b));
            if ord == Ordering::Less {
                best = k;
            }
        }
        pairs.swap_remove(best)
    }

    /// Reduced Groebner basis, monic and sorted by decreasing leading monomial.
    pub(crate) fn run(&mut self, gens: &[MultiPoly<F>]) -> Result<Vec<Terms<F::Elem>>, IdealError> {
        let mut basis: Vec<Element<F::Elem>> = Vec::new();
        let mut active: Vec<usize> = Vec::new();
        let mut pairs: Vec<Pair> = Vec::new();

        let mut inputs: Vec<(Terms<F::Elem>, u32)> = gens
            .iter()
            .filter(|g| !g.is_zero())
            .map(|g| (self.make_monic(self.sorted_terms(g)), g.total_degree().unwrap_or(0)))
            .collect();
        inputs.sort_by(|a, b| self.order.cmp(&a.0[0].0, &b.0[0].0));
        for (t, sugar) in inputs {
            let r = self.reduce(t, &basis, &active);
            if r.is_empty() {
                continue;
            }
            let r = self.make_monic(r);
            if r[0].0.is_one() {
                return Ok(vec![r]);
            }
            basis.push(Element::new(r, sugar));
            let h = basis.len() - 1;
            self.update(&basis, &mut active, &mut pairs, h);
        }

        while !pairs.is_empty() {
            let p = self.select(&mut pairs);
            if p.lcm.degree() > self.budget.max_degree {
                return Err(IdealError::BudgetExceeded(format!(
                    "S-pair of degree {} exceeds {}",
                    p.lcm.degree(),
                    self.budget.max_degree
                )));
            }
            self.pairs_done += 1;
            if self.pairs_done > self.budget.max_pairs {
                return Err(IdealError::BudgetExceeded(format!("more than {} pair reductions", self.budget.max_pairs)));
            }
            let s = self.spoly(&basis[p.i], &basis[p.j], &p.lcm);
            let r = self.reduce(s, &basis, &active);
            if r.is_empty() {
                continue;
            }
            let r = self.make_monic(r);
            self.check_coeffs(&r)?;
            if r[0].0.is_one() {
                return Ok(vec![r]);
            }
            basis.push(Element::new(r, p.sugar));
            let h = basis.len() - 1;
            self.update(&basis, &mut active, &mut pairs, h);
        }

        // interreduce the minimal basis
        let mut minimal: Vec<usize> = active.clone();
        minimal.sort_by(|&a, &b| self.order.cmp(basis[b].lm(), basis[a].lm()));
        let mut out = Vec::with_capacity(minimal.len());
        for (k, &g) in minimal.iter().enumerate() {
            let others: Vec<usize> = minimal.iter().enumerate().filter(|(l, _)| *l != k).map(|(_, &x)| x).collect();
            let head = basis[g].terms[0].clone();
            let tail = self.reduce(basis[g].terms[1..].to_vec(), &basis, &others);
            let mut t = vec![head];
            t.extend(tail);
            out.push(t);
        }
        Ok(out)
    }

    pub(crate) fn stats(&self, basis_size: usize) -> GroebnerStats {
        GroebnerStats { pairs_reduced: self.pairs_done, basis_size }
    }

    /// Normal form of `f` with respect to an already computed basis.
    pub(crate) fn normal_form(&self, basis: &[MultiPoly<F>], f: &MultiPoly<F>) -> Terms<F::Elem> {
        let elems: Vec<Element<F::Elem>> = basis
            .iter()
            .filter(|g| !g.is_zero())
            .map(|g| Element::new(self.make_monic(self.sorted_terms(g)), 0))
            .collect();
        let active: Vec<usize> = (0..elems.len()).collect();
        self.reduce(self.sorted_terms(f), &elems, &active)
    }

    pub(crate) fn leading_monomial(&self, p: &MultiPoly<F>) -> Option<Monomial> {
        p.terms().map(|(m, _)| m).max_by(|a, b| self.order.cmp(a, b)).cloned()
    }
}
