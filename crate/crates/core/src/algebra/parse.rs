//! Text format: sums of terms such as `3*x0^2*y1`, `-1/2 x1 y2` or `7`.
//! `*` between factors is optional when they are separated by whitespace.

use std::sync::Arc;

use super::monomial::Monomial;
use super::poly::MultiPoly;
use super::scalar::Ring;
use super::AlgebraError;

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Num(String),
    Ident(String),
    Plus,
    Minus,
    Star,
    Caret,
}

fn tokenize(text: &str) -> Result<Vec<Token>, AlgebraError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        match c {
            ' ' | '\t' | '\n' | '\r' => i += 1,
            '+' => {
                out.push(Token::Plus);
                i += 1;
            }
            '-' => {
                out.push(Token::Minus);
                i += 1;
            }
            '*' => {
                out.push(Token::Star);
                i += 1;
            }
            '^' => {
                out.push(Token::Caret);
                i += 1;
            }
            d if d.is_ascii_digit() => {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                if i + 1 < chars.len() && chars[i] == '/' && chars[i + 1].is_ascii_digit() {
                    i += 1;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                }
                out.push(Token::Num(chars[start..i].iter().collect()));
            }
            a if a.is_ascii_alphabetic() || a == '_' => {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                out.push(Token::Ident(chars[start..i].iter().collect()));
            }
            other => return Err(AlgebraError::Parse(format!("unexpected character {other:?}"))),
        }
    }
    Ok(out)
}

pub(crate) fn parse_poly<R: Ring>(ring: R, vars: Arc<[String]>, text: &str) -> Result<MultiPoly<R>, AlgebraError> {
    let tokens = tokenize(text)?;
    if tokens.is_empty() {
        return Err(AlgebraError::Parse("empty polynomial".into()));
    }
    let nvars = vars.len();
    let mut terms: Vec<(Monomial, R::Elem)> = Vec::new();
    let mut pos = 0;
    let mut first = true;
    while pos < tokens.len() {
        let mut negative = false;
        match tokens[pos] {
            Token::Plus => pos += 1,
            Token::Minus => {
                negative = true;
                pos += 1;
            }
            _ if first => {}
            ref t => return Err(AlgebraError::Parse(format!("expected + or -, found {t:?}"))),
        }
        first = false;
        let mut coeff = ring.one();
        let mut mono = Monomial::one(nvars);
        let mut factors = 0;
        loop {
            match tokens.get(pos) {
                Some(Token::Num(n)) => {
                    coeff = ring.mul(&coeff, &ring.parse_literal(n)?);
                    pos += 1;
                }
                Some(Token::Ident(name)) => {
                    let idx = vars
                        .iter()
                        .position(|v| v == name)
                        .ok_or_else(|| AlgebraError::UnknownVariable(name.clone()))?;
                    pos += 1;
                    let mut e: u32 = 1;
                    if tokens.get(pos) == Some(&Token::Caret) {
                        match tokens.get(pos + 1) {
                            Some(Token::Num(n)) => {
                                e = n.parse().map_err(|_| AlgebraError::Parse(format!("bad exponent {n:?}")))?;
                                pos += 2;
                            }
                            _ => return Err(AlgebraError::Parse("exponent expected after ^".into())),
                        }
                    }
                    let slot = &mut mono.exponents_mut()[idx];
                    let total = *slot as u32 + e;
                    *slot = u16::try_from(total).map_err(|_| AlgebraError::Parse("exponent too large".into()))?;
                }
                _ => return Err(AlgebraError::Parse(format!("factor expected at token {pos}"))),
            }
            factors += 1;
            match tokens.get(pos) {
                Some(Token::Star) => pos += 1,
                Some(Token::Num(_)) | Some(Token::Ident(_)) => {}
                _ => break,
            }
        }
        debug_assert!(factors > 0);
        if negative {
            coeff = ring.neg(&coeff);
        }
        terms.push((mono, coeff));
    }
    Ok(MultiPoly::from_terms(ring, vars, terms))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{var_names, PrimeField, Rationals};
    use proptest::prelude::*;

    #[test]
    fn accepts_optional_star_and_signs() {
        let vars = var_names(&["x0", "x1", "y1"]);
        let a = parse_poly(Rationals, vars.clone(), "3*x0^2*y1 - x1 + 5").unwrap();
        let b = parse_poly(Rationals, vars.clone(), "5 - x1 + 3 x0 x0 y1").unwrap();
        assert_eq!(a, b);
        assert_eq!(a.to_string(), "3*x0^2*y1 - x1 + 5");
        let c = parse_poly(Rationals, vars, "-1/2*x0 + 1/2 x0").unwrap();
        assert!(c.is_zero());
    }

    #[test]
    fn rejects_garbage() {
        let vars = var_names(&["x", "y"]);
        assert!(parse_poly(Rationals, vars.clone(), "x +").is_err());
        assert!(parse_poly(Rationals, vars.clone(), "x ^ y").is_err());
        assert!(parse_poly(Rationals, vars.clone(), "z").is_err());
        assert!(parse_poly(Rationals, vars.clone(), "x y + (y)").is_err());
        assert!(parse_poly(Rationals, vars, "").is_err());
    }

    fn arb_terms() -> impl Strategy<Value = Vec<(Vec<u16>, i64, i64)>> {
        prop::collection::vec((prop::collection::vec(0u16..4, 3), -20i64..20, 1i64..6), 0..8)
    }

    proptest! {
        #[test]
        fn print_parse_round_trip_rationals(terms in arb_terms()) {
            let vars = var_names(&["x0", "y1", "z_2"]);
            let p = MultiPoly::from_terms(Rationals, vars.clone(), terms.iter().map(|(e, n, d)| {
                (Monomial::from_exponents(e), num_rational::BigRational::new((*n).into(), (*d).into()))
            }));
            let back = parse_poly(Rationals, vars, &p.to_string()).unwrap();
            prop_assert_eq!(back, p);
        }

        #[test]
        fn print_parse_round_trip_fp(terms in arb_terms()) {
            let f = PrimeField::new(101).unwrap();
            let vars = var_names(&["x0", "y1", "z_2"]);
            let p = MultiPoly::from_terms(f, vars.clone(), terms.iter().map(|(e, n, _)| {
                (Monomial::from_exponents(e), f.from_i64(*n))
            }));
            let back = parse_poly(f, vars, &p.to_string()).unwrap();
            prop_assert_eq!(back, p);
        }
    }
}
