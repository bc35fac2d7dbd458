//! Parser for univariate rational expressions in `z`.
//!
//! Grammar, loosest binding first:
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/' | <juxtaposition>) unary)*
//! unary  := ('-' | '+') unary | power
//! power  := atom ('^' power)?          -- right associative
//! atom   := integer | 'z' | '(' expr ')'
//! ```
//!
//! Every `/` is ordinary division of rational functions followed by
//! cancellation, so `6012/2755 z^2` reads as `(6012/2755) * z^2`. Juxtaposition
//! (`4z`, `2(z+1)`, `(z+1)(z-1)`) binds like `*`. Exponents must evaluate to a
//! non-negative integer constant.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use thiserror::Error;

use super::poly::Poly;
use super::ratmap::RatMap;

const MAX_EXPONENT: u32 = 4096;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("unexpected character {found:?} at position {pos}")]
    UnexpectedChar { pos: usize, found: char },
    #[error("unknown variable {name:?} at position {pos}; only z is allowed")]
    UnknownVariable { pos: usize, name: String },
    #[error("unexpected {found} at position {pos}")]
    UnexpectedToken { pos: usize, found: String },
    #[error("unexpected end of input")]
    UnexpectedEnd,
    #[error("division by zero at position {pos}")]
    DivisionByZero { pos: usize },
    #[error("exponent at position {pos} must be a non-negative integer constant at most {max}")]
    BadExponent { pos: usize, max: u32 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Num(BigInt),
    Z,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Num(n) => format!("number {n}"),
        Tok::Z => "z".into(),
        Tok::Plus => "'+'".into(),
        Tok::Minus => "'-'".into(),
        Tok::Star => "'*'".into(),
        Tok::Slash => "'/'".into(),
        Tok::Caret => "'^'".into(),
        Tok::LParen => "'('".into(),
        Tok::RParen => "')'".into(),
    }
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let start = i;
        let tok = match c {
            c if c.is_whitespace() => {
                i += 1;
                continue;
            }
            '0'..='9' => {
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let s: String = chars[start..i].iter().collect();
                out.push((start, Tok::Num(s.parse().unwrap())));
                continue;
            }
            c if c.is_alphabetic() => {
                while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                let name: String = chars[start..i].iter().collect();
                if name != "z" {
                    return Err(ParseError::UnknownVariable { pos: start, name });
                }
                out.push((start, Tok::Z));
                continue;
            }
            '+' => Tok::Plus,
            '-' | '\u{2212}' => Tok::Minus,
            '*' => Tok::Star,
            '/' => Tok::Slash,
            '^' => Tok::Caret,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            other => return Err(ParseError::UnexpectedChar { pos: start, found: other }),
        };
        out.push((start, tok));
        i += 1;
    }
    Ok(out)
}

/// A rational function kept as a reduced pair.
#[derive(Clone, Debug)]
struct Frac {
    num: Poly,
    den: Poly,
}

impl Frac {
    fn poly(p: Poly) -> Frac {
        Frac { num: p, den: Poly::one() }
    }

    fn reduce(num: Poly, den: Poly) -> Frac {
        let g = num.gcd(&den);
        let (mut num, mut den) = if g.deg0() > 0 {
            (num.div_rem(&g).0, den.div_rem(&g).0)
        } else {
            (num, den)
        };
        let l = den.leading().cloned().unwrap();
        num = num.scale(&l.recip());
        den = den.scale(&l.recip());
        Frac { num, den }
    }

    fn add(&self, o: &Frac) -> Frac {
        Frac::reduce(&self.num * &o.den + &o.num * &self.den, &self.den * &o.den)
    }

    fn neg(&self) -> Frac {
        Frac { num: -&self.num, den: self.den.clone() }
    }

    fn mul(&self, o: &Frac) -> Frac {
        Frac::reduce(&self.num * &o.num, &self.den * &o.den)
    }

    fn div(&self, o: &Frac, pos: usize) -> Result<Frac, ParseError> {
        if o.num.is_zero() {
            return Err(ParseError::DivisionByZero { pos });
        }
        Ok(Frac::reduce(&self.num * &o.den, &self.den * &o.num))
    }

    fn pow(&self, e: u32) -> Frac {
        Frac { num: self.num.pow(e), den: self.den.pow(e) }
    }

    fn as_constant(&self) -> Option<BigRational> {
        if self.num.is_constant() && self.den.is_constant() {
            Some(self.num.coeff(0) / self.den.coeff(0))
        } else {
            None
        }
    }
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    at: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|(_, t)| t)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.at).map(|(p, _)| *p).unwrap_or(self.end)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.at).map(|(_, t)| t.clone());
        self.at += 1;
        t
    }

    fn expr(&mut self) -> Result<Frac, ParseError> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.bump();
                    acc = acc.add(&self.term()?);
                }
                Some(Tok::Minus) => {
                    self.bump();
                    acc = acc.add(&self.term()?.neg());
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Frac, ParseError> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.bump();
                    acc = acc.mul(&self.unary()?);
                }
                Some(Tok::Slash) => {
                    self.bump();
                    let pos = self.pos();
                    let rhs = self.unary()?;
                    acc = acc.div(&rhs, pos)?;
                }
                Some(Tok::Num(_)) | Some(Tok::Z) | Some(Tok::LParen) => {
                    acc = acc.mul(&self.unary()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<Frac, ParseError> {
        match self.peek() {
            Some(Tok::Minus) => {
                self.bump();
                Ok(self.unary()?.neg())
            }
            Some(Tok::Plus) => {
                self.bump();
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Frac, ParseError> {
        let base = self.atom()?;
        if self.peek() != Some(&Tok::Caret) {
            return Ok(base);
        }
        self.bump();
        let pos = self.pos();
        let exp = self.power()?;
        let bad = ParseError::BadExponent { pos, max: MAX_EXPONENT };
        let c = exp.as_constant().ok_or(bad.clone())?;
        if !c.is_integer() {
            return Err(bad);
        }
        let e = c.to_integer().to_u32().filter(|&e| e <= MAX_EXPONENT).ok_or(bad)?;
        if e == 0 && base.num.is_zero() {
            // 0^0 is taken as 1, the usual convention for polynomials.
            return Ok(Frac::poly(Poly::one()));
        }
        Ok(base.pow(e))
    }

    fn atom(&mut self) -> Result<Frac, ParseError> {
        let pos = self.pos();
        match self.bump() {
            Some(Tok::Num(n)) => Ok(Frac::poly(Poly::constant(BigRational::from_integer(n)))),
            Some(Tok::Z) => Ok(Frac::poly(Poly::z())),
            Some(Tok::LParen) => {
                let inner = self.expr()?;
                match self.bump() {
                    Some(Tok::RParen) => Ok(inner),
                    Some(t) => Err(ParseError::UnexpectedToken { pos: self.toks[self.at - 1].0, found: describe(&t) }),
                    None => Err(ParseError::UnexpectedEnd),
                }
            }
            Some(t) => Err(ParseError::UnexpectedToken { pos, found: describe(&t) }),
            None => Err(ParseError::UnexpectedEnd),
        }
    }
}

/// Parse a map such as `"(z^2-4z+1)/(2z)"` into lowest terms. Polynomial
/// inputs come back with denominator 1.
pub fn parse_map(text: &str) -> Result<RatMap, ParseError> {
    let toks = lex(text)?;
    let mut p = Parser { toks, at: 0, end: text.chars().count() };
    if p.peek().is_none() {
        return Err(ParseError::UnexpectedEnd);
    }
    let f = p.expr()?;
    if let Some(t) = p.peek().cloned() {
        return Err(ParseError::UnexpectedToken { pos: p.pos(), found: describe(&t) });
    }
    if f.den.is_zero() {
        return Err(ParseError::DivisionByZero { pos: 0 });
    }
    debug_assert!(!f.num.is_zero() || f.den.is_constant());
    let map = RatMap::new(f.num, f.den).expect("denominator checked nonzero");
    Ok(map.normalized())
}

/// Parse a single exact rational such as `-14/3`.
pub fn parse_rational(text: &str) -> Result<BigRational, ParseError> {
    let f = parse_map(text)?;
    let poly = f.as_polynomial().filter(Poly::is_constant);
    match poly {
        Some(p) => Ok(p.coeff(0)),
        None => Err(ParseError::UnexpectedToken { pos: 0, found: "non-constant expression".into() }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn polynomial_inputs() {
        let f = parse_map("z^2 - 2").unwrap();
        assert_eq!(f.num(), &Poly::from_ints([-2, 0, 1]));
        assert_eq!(f.den(), &Poly::one());
        let id = parse_map("z").unwrap();
        assert_eq!(id.num(), &Poly::z());
        assert_eq!(id.degree(), 1);
    }

    #[test]
    fn family_member_b2() {
        let f = parse_map("(z^2-4z+1)/(2z)").unwrap();
        assert_eq!(f.num(), &Poly::from_ints([1, -4, 1]));
        assert_eq!(f.den(), &Poly::from_ints([0, 2]));
    }

    #[test]
    fn precedence_and_associativity() {
        assert_eq!(parse_map("-z^2").unwrap().num(), &Poly::from_ints([0, 0, -1]));
        assert_eq!(parse_map("2^3^2").unwrap().num(), &Poly::from_ints([512]));
        assert_eq!(parse_map("1 - 2 - 3").unwrap().num(), &Poly::from_ints([-4]));
        assert_eq!(parse_map("z^2*3/6").unwrap().num(), &Poly::new(vec![q(0, 1), q(0, 1), q(1, 2)]));
        assert_eq!(parse_map("(z+1)(z-1)").unwrap().num(), &Poly::from_ints([-1, 0, 1]));
        assert_eq!(parse_map("z^(1+1)").unwrap().num(), &Poly::from_ints([0, 0, 1]));
    }

    #[test]
    fn rational_coefficients() {
        let g1 = parse_map("z^3 - 6012/2755 z^2 + 12636/13775 z + 54/95").unwrap();
        assert!(g1.is_polynomial());
        assert_eq!(g1.num().coeff(2), q(-6012, 2755));
        assert_eq!(g1.num().coeff(1), q(12636, 13775));
        assert_eq!(g1.num().coeff(0), q(54, 95));
    }

    #[test]
    fn cancels_to_lowest_terms() {
        let f = parse_map("(z^2-1)/(z-1)").unwrap();
        assert_eq!(f.num(), &Poly::from_ints([1, 1]));
        assert_eq!(f.den(), &Poly::one());
    }

    #[test]
    fn errors_carry_positions() {
        assert_eq!(
            parse_map("x^2 + 1").unwrap_err(),
            ParseError::UnknownVariable { pos: 0, name: "x".into() }
        );
        assert!(matches!(parse_map("z^2 +"), Err(ParseError::UnexpectedEnd)));
        assert!(matches!(parse_map("z^2 $ 1"), Err(ParseError::UnexpectedChar { pos: 4, .. })));
        assert!(matches!(parse_map("0/0"), Err(ParseError::DivisionByZero { pos: 2 })));
        assert!(matches!(parse_map("z/(z-z)"), Err(ParseError::DivisionByZero { .. })));
        assert!(matches!(parse_map("z^z"), Err(ParseError::BadExponent { .. })));
        assert!(matches!(parse_map("z^(1/2)"), Err(ParseError::BadExponent { .. })));
        assert!(matches!(parse_map("(z+1"), Err(ParseError::UnexpectedEnd)));
        assert!(matches!(parse_map("z)"), Err(ParseError::UnexpectedToken { pos: 1, .. })));
        assert!(matches!(parse_map(""), Err(ParseError::UnexpectedEnd)));
    }

    #[test]
    fn rational_literals() {
        assert_eq!(parse_rational("-14/3").unwrap(), q(-14, 3));
        assert_eq!(parse_rational("0").unwrap(), q(0, 1));
        assert!(parse_rational("z").is_err());
    }
}
