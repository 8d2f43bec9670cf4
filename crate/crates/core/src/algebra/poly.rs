//! Sparse multivariate polynomials with named variables.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use super::monomial::Monomial;
use super::scalar::{Field, Ring};
use super::AlgebraError;

/// A polynomial over `R` in an ordered list of named variables.
///
/// Terms are kept in a map keyed by exponent vector (graded reverse
/// lexicographic order); zero coefficients are never stored.
#[derive(Clone, PartialEq)]
pub struct MultiPoly<R: Ring> {
    ring: R,
    vars: Arc<[String]>,
    terms: BTreeMap<Monomial, R::Elem>,
}

pub fn var_names<S: AsRef<str>>(names: &[S]) -> Arc<[String]> {
    names.iter().map(|s| s.as_ref().to_string()).collect()
}

impl<R: Ring> MultiPoly<R> {
    pub fn zero(ring: R, vars: Arc<[String]>) -> Self {
        MultiPoly { ring, vars, terms: BTreeMap::new() }
    }

    pub fn constant(ring: R, vars: Arc<[String]>, c: R::Elem) -> Self {
        let mut p = Self::zero(ring, vars);
        let one = Monomial::one(p.vars.len());
        p.insert_term(one, c);
        p
    }

    pub fn one(ring: R, vars: Arc<[String]>) -> Self {
        let c = ring.one();
        Self::constant(ring, vars, c)
    }

    pub fn var(ring: R, vars: Arc<[String]>, name: &str) -> Result<Self, AlgebraError> {
        let idx = index_of(&vars, name)?;
        let mut p = Self::zero(ring, vars);
        let m = Monomial::variable(p.vars.len(), idx);
        let c = p.ring.one();
        p.insert_term(m, c);
        Ok(p)
    }

    pub fn from_terms<I>(ring: R, vars: Arc<[String]>, terms: I) -> Self
    where
        I: IntoIterator<Item = (Monomial, R::Elem)>,
    {
        let mut p = Self::zero(ring, vars);
        for (m, c) in terms {
            assert_eq!(m.nvars(), p.vars.len(), "exponent vector length");
            p.add_term(m, c);
        }
        p
    }

    pub fn monomial(ring: R, vars: Arc<[String]>, exps: &[u16], c: R::Elem) -> Self {
        Self::from_terms(ring, vars, [(Monomial::from_exponents(exps), c)])
    }

    pub fn ring(&self) -> &R {
        &self.ring
    }

    pub fn vars(&self) -> &Arc<[String]> {
        &self.vars
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn var_index(&self, name: &str) -> Result<usize, AlgebraError> {
        index_of(&self.vars, name)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms from the leading one downwards.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &R::Elem)> {
        self.terms.iter().rev()
    }

    pub fn leading_term(&self) -> Option<(&Monomial, &R::Elem)> {
        self.terms.iter().next_back()
    }

    pub fn coeff(&self, m: &Monomial) -> R::Elem {
        self.terms.get(m).cloned().unwrap_or_else(|| self.ring.zero())
    }

    pub fn constant_term(&self) -> R::Elem {
        self.coeff(&Monomial::one(self.nvars()))
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|m| m.is_one())
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.degree()).max()
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut degs = self.terms.keys().map(|m| m.degree());
        match degs.next() {
            None => true,
            Some(d) => degs.all(|e| e == d),
        }
    }

    /// Degree of each term in the given variables; `None` if not homogeneous in them.
    pub fn homogeneous_degree_in(&self, names: &[&str]) -> Result<Option<u32>, AlgebraError> {
        let idx = names.iter().map(|n| self.var_index(n)).collect::<Result<Vec<_>, _>>()?;
        let mut out = None;
        for m in self.terms.keys() {
            let d: u32 = idx.iter().map(|&i| m.exponents()[i] as u32).sum();
            match out {
                None => out = Some(d),
                Some(e) if e != d => return Ok(None),
                _ => {}
            }
        }
        Ok(Some(out.unwrap_or(0)))
    }

    fn insert_term(&mut self, m: Monomial, c: R::Elem) {
        if !self.ring.is_zero(&c) {
            self.terms.insert(m, c);
        }
    }

    pub(crate) fn add_term(&mut self, m: Monomial, c: R::Elem) {
        if self.ring.is_zero(&c) {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                let s = self.ring.add(o.get(), &c);
                if self.ring.is_zero(&s) {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    fn check_compatible(&self, other: &Self) -> Result<(), AlgebraError> {
        if self.ring != other.ring {
            return Err(AlgebraError::RingMismatch(format!("{:?} vs {:?}", self.ring.tag(), other.ring.tag())));
        }
        if self.vars != other.vars {
            return Err(AlgebraError::RingMismatch(format!(
                "variables [{}] vs [{}]",
                self.vars.join(","),
                other.vars.join(",")
            )));
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), self.ring.neg(c));
        }
        Ok(out)
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.check_compatible(other)?;
        let mut out = Self::zero(self.ring.clone(), self.vars.clone());
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.mul(mb), self.ring.mul(ca, cb));
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &R::Elem) -> Self {
        let mut out = Self::zero(self.ring.clone(), self.vars.clone());
        for (m, a) in &self.terms {
            out.insert_term(m.clone(), self.ring.mul(a, c));
        }
        out
    }

    pub fn mul_monomial(&self, m: &Monomial, c: &R::Elem) -> Self {
        let mut out = Self::zero(self.ring.clone(), self.vars.clone());
        for (t, a) in &self.terms {
            out.insert_term(t.mul(m), self.ring.mul(a, c));
        }
        out
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one(self.ring.clone(), self.vars.clone());
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    pub fn partial_derivative(&self, var: &str) -> Result<Self, AlgebraError> {
        let i = self.var_index(var)?;
        let mut out = Self::zero(self.ring.clone(), self.vars.clone());
        for (m, c) in &self.terms {
            let e = m.exponents()[i];
            if e == 0 {
                continue;
            }
            let mut dm = m.clone();
            dm.exponents_mut()[i] -= 1;
            out.add_term(dm, self.ring.mul(c, &self.ring.from_i64(e as i64)));
        }
        Ok(out)
    }

    pub fn evaluate(&self, point: &[R::Elem]) -> R::Elem {
        assert_eq!(point.len(), self.nvars());
        let mut acc = self.ring.zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (x, &e) in point.iter().zip(m.exponents()) {
                if e > 0 {
                    t = self.ring.mul(&t, &self.ring.pow(x, e as u32));
                }
            }
            acc = self.ring.add(&acc, &t);
        }
        acc
    }

    /// Re-expresses the polynomial over another variable list, matching by name.
    ///
    /// Fails if a variable actually occurring in `self` is missing from `vars`.
    pub fn with_vars(&self, vars: Arc<[String]>) -> Result<Self, AlgebraError> {
        let mut map = Vec::with_capacity(self.nvars());
        for (i, name) in self.vars.iter().enumerate() {
            let used = self.terms.keys().any(|m| m.exponents()[i] > 0);
            match vars.iter().position(|v| v == name) {
                Some(j) => map.push(Some(j)),
                None if used => return Err(AlgebraError::UnknownVariable(name.clone())),
                None => map.push(None),
            }
        }
        let mut out = Self::zero(self.ring.clone(), vars);
        for (m, c) in &self.terms {
            let mut nm = Monomial::one(out.nvars());
            for (i, &e) in m.exponents().iter().enumerate() {
                if let Some(j) = map[i] {
                    nm.exponents_mut()[j] = e;
                }
            }
            out.add_term(nm, c.clone());
        }
        Ok(out)
    }

    /// Applies `f` to every coefficient, landing in ring `target`.
    pub fn map_coeffs<S: Ring>(&self, target: S, mut f: impl FnMut(&R::Elem) -> S::Elem) -> MultiPoly<S> {
        let mut out = MultiPoly::zero(target, self.vars.clone());
        for (m, c) in &self.terms {
            let v = f(c);
            out.add_term(m.clone(), v);
        }
        out
    }

    /// Substitutes a polynomial for each named variable; unnamed variables map
    /// to the variable of the same name in the target ring.
    pub fn substitute(&self, target_vars: Arc<[String]>, images: &[(&str, MultiPoly<R>)]) -> Result<Self, AlgebraError> {
        let mut imgs: Vec<MultiPoly<R>> = Vec::with_capacity(self.nvars());
        for name in self.vars.iter() {
            match images.iter().find(|(n, _)| n == name) {
                Some((_, p)) => {
                    if p.ring != self.ring {
                        return Err(AlgebraError::RingMismatch("substitution image over another ring".into()));
                    }
                    imgs.push(p.with_vars(target_vars.clone())?);
                }
                None => {
                    let used = self.terms.keys().any(|m| m.exponents()[self.var_index(name).unwrap()] > 0);
                    if used || target_vars.iter().any(|v| v == name) {
                        imgs.push(MultiPoly::var(self.ring.clone(), target_vars.clone(), name)?);
                    } else {
                        imgs.push(MultiPoly::zero(self.ring.clone(), target_vars.clone()));
                    }
                }
            }
        }
        for (name, _) in images {
            self.var_index(name)?;
        }
        let mut cache: HashMap<(usize, u16), MultiPoly<R>> = HashMap::new();
        let mut out = MultiPoly::zero(self.ring.clone(), target_vars.clone());
        for (m, c) in &self.terms {
            let mut t = MultiPoly::constant(self.ring.clone(), target_vars.clone(), c.clone());
            for (i, &e) in m.exponents().iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let pw = cache.entry((i, e)).or_insert_with(|| imgs[i].pow(e as u32));
                t = &t * pw;
            }
            for (tm, tc) in t.terms {
                out.add_term(tm, tc);
            }
        }
        Ok(out)
    }

    /// Replaces `vars[i]` by `sum_j matrix[i][j] * vars[j]`.
    ///
    /// Matrix entries may live in a larger ring (extra variables such as the
    /// unknown entries of a transformation); the result lives in the
    /// variable list of the entries.
    pub fn substitute_linear(&self, matrix: &[Vec<MultiPoly<R>>], vars: &[&str]) -> Result<Self, AlgebraError> {
        let n = vars.len();
        if matrix.len() != n || matrix.iter().any(|row| row.len() != n) {
            return Err(AlgebraError::DimensionMismatch(format!(
                "{}x? matrix for {} variables",
                matrix.len(),
                n
            )));
        }
        let target = match matrix.first().and_then(|r| r.first()) {
            Some(p) => p.vars.clone(),
            None => self.vars.clone(),
        };
        let mut union: Vec<String> = target.to_vec();
        for v in self.vars.iter() {
            if !union.contains(v) {
                union.push(v.clone());
            }
        }
        let target: Arc<[String]> = union.into();
        let mut images = Vec::with_capacity(n);
        for (i, row) in matrix.iter().enumerate() {
            let mut img = MultiPoly::zero(self.ring.clone(), target.clone());
            for (j, entry) in row.iter().enumerate() {
                let xj = MultiPoly::var(self.ring.clone(), target.clone(), vars[j])?;
                img = img.checked_add(&(&entry.with_vars(target.clone())? * &xj))?;
            }
            images.push((vars[i], img));
        }
        self.substitute(target, &images)
    }

    /// Splits `self = sum_m m * coeff_m` over monomials `m` in `vars`.
    ///
    /// Coefficients stay in the same ring and never involve `vars`. The
    /// result is ordered by decreasing monomial in the sub-ring on `vars`.
    pub fn coefficients(&self, vars: &[&str]) -> Result<Vec<(Monomial, Self)>, AlgebraError> {
        let idx = vars.iter().map(|v| self.var_index(v)).collect::<Result<Vec<_>, _>>()?;
        let mut groups: BTreeMap<Monomial, Self> = BTreeMap::new();
        for (m, c) in &self.terms {
            let key = Monomial::from_exponents(&idx.iter().map(|&i| m.exponents()[i]).collect::<Vec<_>>());
            let mut rest = m.clone();
            for &i in &idx {
                rest.exponents_mut()[i] = 0;
            }
            groups
                .entry(key)
                .or_insert_with(|| Self::zero(self.ring.clone(), self.vars.clone()))
                .add_term(rest, c.clone());
        }
        Ok(groups.into_iter().rev().collect())
    }

    /// Coefficient of the monomial with exponents `exps` in `vars`.
    pub fn coefficient_of(&self, vars: &[&str], exps: &[u16]) -> Result<Self, AlgebraError> {
        if exps.len() != vars.len() {
            return Err(AlgebraError::DimensionMismatch(format!("{} exponents for {} variables", exps.len(), vars.len())));
        }
        let target = Monomial::from_exponents(exps);
        Ok(self
            .coefficients(vars)?
            .into_iter()
            .find(|(m, _)| *m == target)
            .map(|(_, c)| c)
            .unwrap_or_else(|| Self::zero(self.ring.clone(), self.vars.clone())))
    }

    /// Reassembles `sum_m m * coeff_m` from the output of [`Self::coefficients`].
    pub fn from_coefficients(template: &Self, vars: &[&str], parts: &[(Monomial, Self)]) -> Result<Self, AlgebraError> {
        let idx = vars.iter().map(|v| template.var_index(v)).collect::<Result<Vec<_>, _>>()?;
        let mut out = Self::zero(template.ring.clone(), template.vars.clone());
        for (m, c) in parts {
            let mut full = Monomial::one(template.nvars());
            for (k, &i) in idx.iter().enumerate() {
                full.exponents_mut()[i] = m.exponents()[k];
            }
            out = out.checked_add(&c.mul_monomial(&full, &template.ring.one()))?;
        }
        Ok(out)
    }

    pub fn parse(ring: R, vars: Arc<[String]>, text: &str) -> Result<Self, AlgebraError> {
        super::parse::parse_poly(ring, vars, text)
    }
}

impl<R: Field> MultiPoly<R> {
    /// Scales so the leading coefficient is one.
    pub fn monic(&self) -> Self {
        match self.leading_term() {
            None => self.clone(),
            Some((_, c)) => {
                let inv = self.ring.inv(c).expect("nonzero leading coefficient");
                self.scale(&inv)
            }
        }
    }
}

/// Determinant of a square matrix of polynomials by cofactor expansion.
pub fn poly_det<R: Ring>(matrix: &[Vec<MultiPoly<R>>]) -> Result<MultiPoly<R>, AlgebraError> {
    let n = matrix.len();
    if n == 0 {
        return Err(AlgebraError::DimensionMismatch("empty matrix".into()));
    }
    if matrix.iter().any(|r| r.len() != n) {
        return Err(AlgebraError::DimensionMismatch("matrix is not square".into()));
    }
    let first = &matrix[0][0];
    for row in matrix {
        for e in row {
            first.check_compatible(e)?;
        }
    }
    let rows: Vec<usize> = (0..n).collect();
    let cols: Vec<usize> = (0..n).collect();
    Ok(det_minor(matrix, &rows, &cols))
}

fn det_minor<R: Ring>(m: &[Vec<MultiPoly<R>>], rows: &[usize], cols: &[usize]) -> MultiPoly<R> {
    if rows.len() == 1 {
        return m[rows[0]][cols[0]].clone();
    }
    let r = rows[0];
    let sub_rows = &rows[1..];
    let mut acc = MultiPoly::zero(m[0][0].ring.clone(), m[0][0].vars.clone());
    for (k, &c) in cols.iter().enumerate() {
        if m[r][c].is_zero() {
            continue;
        }
        let sub_cols: Vec<usize> = cols.iter().copied().filter(|&x| x != c).collect();
        let term = &m[r][c] * &det_minor(m, sub_rows, &sub_cols);
        acc = if k % 2 == 0 { &acc + &term } else { &acc - &term };
    }
    acc
}

fn index_of(vars: &[String], name: &str) -> Result<usize, AlgebraError> {
    vars.iter()
        .position(|v| v == name)
        .ok_or_else(|| AlgebraError::UnknownVariable(name.to_string()))
}

impl<R: Ring> Add for &MultiPoly<R> {
    type Output = MultiPoly<R>;
    fn add(self, rhs: Self) -> MultiPoly<R> {
        self.checked_add(rhs).expect("polynomial ring mismatch")
    }
}

impl<R: Ring> Sub for &MultiPoly<R> {
    type Output = MultiPoly<R>;
    fn sub(self, rhs: Self) -> MultiPoly<R> {
        self.checked_sub(rhs).expect("polynomial ring mismatch")
    }
}

impl<R: Ring> Mul for &MultiPoly<R> {
    type Output = MultiPoly<R>;
    fn mul(self, rhs: Self) -> MultiPoly<R> {
        self.checked_mul(rhs).expect("polynomial ring mismatch")
    }
}

impl<R: Ring> Neg for &MultiPoly<R> {
    type Output = MultiPoly<R>;
    fn neg(self) -> MultiPoly<R> {
        let c = self.ring.neg(&self.ring.one());
        self.scale(&c)
    }
}

impl<R: Ring> fmt::Display for MultiPoly<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms().enumerate() {
            let neg = self.ring.is_negative(c);
            match (k, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let abs = self.ring.fmt_abs(c);
            let mut factors: Vec<String> = Vec::new();
            if m.is_one() || abs != "1" {
                factors.push(abs);
            }
            for (i, &e) in m.exponents().iter().enumerate() {
                match e {
                    0 => {}
                    1 => factors.push(self.vars[i].clone()),
                    _ => factors.push(format!("{}^{}", self.vars[i], e)),
                }
            }
            write!(f, "{}", factors.join("*"))?;
        }
        Ok(())
    }
}

impl<R: Ring> fmt::Debug for MultiPoly<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MultiPoly[{:?}; {}]({})", self.ring.tag(), self.vars.join(","), self)
    }
}
