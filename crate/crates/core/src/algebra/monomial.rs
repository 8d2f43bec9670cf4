use std::cmp::Ordering;

use smallvec::SmallVec;

/// Exponent vector of a monomial, one slot per ring variable.
///
/// `Ord` is graded reverse lexicographic, the canonical order of every
/// polynomial ring in this crate.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Monomial(SmallVec<[u16; 16]>);

impl Monomial {
    pub fn one(nvars: usize) -> Self {
        Monomial(SmallVec::from_elem(0, nvars))
    }

    pub fn from_exponents(exps: &[u16]) -> Self {
        Monomial(SmallVec::from_slice(exps))
    }

    pub fn variable(nvars: usize, index: usize) -> Self {
        let mut m = Self::one(nvars);
        m.0[index] = 1;
        m
    }

    pub fn exponents(&self) -> &[u16] {
        &self.0
    }

    pub(crate) fn exponents_mut(&mut self) -> &mut [u16] {
        &mut self.0
    }

    pub fn nvars(&self) -> usize {
        self.0.len()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&e| e as u32).sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().zip(other.0.iter()).all(|(a, b)| a <= b)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(other.0.iter()).map(|(a, b)| a + b).collect())
    }

    /// `self / other`, assuming `other` divides `self`.
    pub fn div(&self, other: &Monomial) -> Monomial {
        debug_assert!(other.divides(self));
        Monomial(self.0.iter().zip(other.0.iter()).map(|(a, b)| a - b).collect())
    }

    pub fn lcm(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(other.0.iter()).map(|(a, b)| *a.max(b)).collect())
    }

    pub fn gcd_is_one(&self, other: &Monomial) -> bool {
        self.0.iter().zip(other.0.iter()).all(|(a, b)| *a == 0 || *b == 0)
    }

    /// Indices of variables with a positive exponent.
    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().filter(|(_, e)| **e > 0).map(|(i, _)| i)
    }
}

pub(crate) fn grevlex_cmp(a: &[u16], b: &[u16]) -> Ordering {
    let da: u32 = a.iter().map(|&e| e as u32).sum();
    let db: u32 = b.iter().map(|&e| e as u32).sum();
    da.cmp(&db).then_with(|| {
        for (x, y) in a.iter().zip(b.iter()).rev() {
            if x != y {
                // smaller exponent in the last differing variable wins
                return y.cmp(x);
            }
        }
        Ordering::Equal
    })
}

pub(crate) fn lex_cmp(a: &[u16], b: &[u16]) -> Ordering {
    a.cmp(b)
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        grevlex_cmp(&self.0, &other.0)
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(e: &[u16]) -> Monomial {
        Monomial::from_exponents(e)
    }

    #[test]
    fn grevlex_textbook_examples() {
        // x > y > z, grevlex: x^2 > xy > y^2 > xz > yz > z^2
        let chain = [m(&[2, 0, 0]), m(&[1, 1, 0]), m(&[0, 2, 0]), m(&[1, 0, 1]), m(&[0, 1, 1]), m(&[0, 0, 2])];
        for w in chain.windows(2) {
            assert!(w[0] > w[1], "{:?} should exceed {:?}", w[0], w[1]);
        }
        // x y^5 z^2 vs x^4 y z^3: same degree 8, last variable decides
        assert!(m(&[1, 5, 2]) > m(&[4, 1, 3]));
        assert!(m(&[0, 0, 3]) > m(&[1, 1, 0]));
    }

    #[test]
    fn divisibility_and_lcm() {
        let a = m(&[2, 0, 1]);
        let b = m(&[1, 3, 0]);
        assert_eq!(a.lcm(&b), m(&[2, 3, 1]));
        assert!(a.divides(&a.lcm(&b)));
        assert!(!a.divides(&b));
        assert_eq!(a.lcm(&b).div(&b), m(&[1, 0, 1]));
        assert!(!a.gcd_is_one(&b));
        assert!(m(&[1, 0, 0]).gcd_is_one(&m(&[0, 4, 1])));
    }
}
