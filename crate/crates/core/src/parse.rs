//! Text input for ternary forms.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := ('+' | '-') unary | power
//! power  := atom ('^' INT)?
//! atom   := INT | 'x' | 'y' | 'z' | '(' expr ')'
//! ```
//!
//! Division is only allowed by nonzero constants, so inputs like `1/2*x^2`
//! work but `x/y` does not. Juxtaposition (`2x`) is a syntax error.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::field::{Field, FieldError, RationalField};
use crate::poly::{HomogeneousPoly, Monomial, Var};

/// Exponents above this are rejected before expansion.
const MAX_EXPONENT: u32 = 4096;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at position {position}: {message}")]
    Syntax { position: usize, message: String },
    #[error("polynomial is not homogeneous: it has terms of degree {first} and {second}")]
    NonHomogeneous { first: usize, second: usize },
    #[error("polynomial is zero")]
    Zero,
    #[error("polynomial is constant; degree must be at least 1")]
    Constant,
    #[error(transparent)]
    Field(#[from] FieldError),
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Int(BigInt),
    Var(Var),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

fn tokenize(text: &str) -> Result<Vec<(usize, Token)>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let tok = match c {
            c if c.is_whitespace() => {
                i += 1;
                continue;
            }
            '0'..='9' => {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let digits: String = chars[start..i].iter().collect();
                out.push((start, Token::Int(digits.parse().expect("ascii digits"))));
                continue;
            }
            'x' => Token::Var(Var::X),
            'y' => Token::Var(Var::Y),
            'z' => Token::Var(Var::Z),
            '+' => Token::Plus,
            '-' | '\u{2212}' => Token::Minus,
            '*' => Token::Star,
            '/' => Token::Slash,
            '^' => Token::Caret,
            '(' => Token::LParen,
            ')' => Token::RParen,
            other => {
                return Err(ParseError::Syntax {
                    position: i,
                    message: format!("unexpected character '{other}'"),
                })
            }
        };
        out.push((i, tok));
        i += 1;
    }
    Ok(out)
}

/// Sparse polynomial with rational coefficients, not necessarily homogeneous.
#[derive(Debug, Clone, Default)]
struct Expansion(BTreeMap<Monomial, BigRational>);

impl Expansion {
    fn constant(c: BigRational) -> Self {
        let mut m = BTreeMap::new();
        if !c.is_zero() {
            m.insert(Monomial::ONE, c);
        }
        Expansion(m)
    }

    fn var(v: Var) -> Self {
        let mut m = BTreeMap::new();
        m.insert(Monomial::var(v), BigRational::one());
        Expansion(m)
    }

    fn as_constant(&self) -> Option<BigRational> {
        match self.0.len() {
            0 => Some(BigRational::zero()),
            1 => self.0.get(&Monomial::ONE).cloned(),
            _ => None,
        }
    }

    fn add(mut self, other: &Expansion, sign: i32) -> Self {
        for (m, c) in &other.0 {
            let entry = self.0.entry(*m).or_insert_with(BigRational::zero);
            if sign < 0 {
                *entry -= c;
            } else {
                *entry += c;
            }
            if entry.is_zero() {
                self.0.remove(m);
            }
        }
        self
    }

    fn mul(&self, other: &Expansion) -> Self {
        let mut out: BTreeMap<Monomial, BigRational> = BTreeMap::new();
        for (m, a) in &self.0 {
            for (n, b) in &other.0 {
                *out.entry(*m * *n).or_insert_with(BigRational::zero) += a * b;
            }
        }
        out.retain(|_, c| !c.is_zero());
        Expansion(out)
    }

    fn scale(mut self, c: &BigRational) -> Self {
        for v in self.0.values_mut() {
            *v *= c;
        }
        self.0.retain(|_, v| !v.is_zero());
        self
    }

    fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Expansion::constant(BigRational::one());
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }
}

struct Parser {
    tokens: Vec<(usize, Token)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|(_, t)| t)
    }

    fn position(&self) -> usize {
        self.tokens.get(self.pos).map(|(p, _)| *p).unwrap_or(self.end)
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError::Syntax {
            position: self.position(),
            message: message.into(),
        })
    }

    fn expr(&mut self) -> Result<Expansion, ParseError> {
        let mut acc = self.term()?;
        loop {
            let sign = match self.peek() {
                Some(Token::Plus) => 1,
                Some(Token::Minus) => -1,
                _ => return Ok(acc),
            };
            self.pos += 1;
            let rhs = self.term()?;
            acc = acc.add(&rhs, sign);
        }
    }

    fn term(&mut self) -> Result<Expansion, ParseError> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Some(Token::Star) => {
                    self.pos += 1;
                    let rhs = self.unary()?;
                    acc = acc.mul(&rhs);
                }
                Some(Token::Slash) => {
                    self.pos += 1;
                    let at = self.position();
                    let rhs = self.unary()?;
                    let divisor = match rhs.as_constant() {
                        Some(c) if !c.is_zero() => c,
                        Some(_) => {
                            return Err(ParseError::Syntax {
                                position: at,
                                message: "division by zero".into(),
                            })
                        }
                        None => {
                            return Err(ParseError::Syntax {
                                position: at,
                                message: "division is only allowed by a constant".into(),
                            })
                        }
                    };
                    acc = acc.scale(&divisor.recip());
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<Expansion, ParseError> {
        match self.peek() {
            Some(Token::Minus) => {
                self.pos += 1;
                Ok(self.unary()?.scale(&-BigRational::one()))
            }
            Some(Token::Plus) => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Expansion, ParseError> {
        let base = self.atom()?;
        if self.peek() != Some(&Token::Caret) {
            return Ok(base);
        }
        self.pos += 1;
        match self.peek().cloned() {
            Some(Token::Int(n)) => {
                let e = u32::try_from(&n)
                    .ok()
                    .filter(|&e| e <= MAX_EXPONENT);
                match e {
                    Some(e) => {
                        self.pos += 1;
                        Ok(base.pow(e))
                    }
                    None => self.error(format!("exponent {n} exceeds {MAX_EXPONENT}")),
                }
            }
            _ => self.error("expected a non-negative integer exponent after '^'"),
        }
    }

    fn atom(&mut self) -> Result<Expansion, ParseError> {
        let result = match self.peek().cloned() {
            Some(Token::Int(n)) => Expansion::constant(BigRational::from_integer(n)),
            Some(Token::Var(v)) => Expansion::var(v),
            Some(Token::LParen) => {
                self.pos += 1;
                let inner = self.expr()?;
                if self.peek() != Some(&Token::RParen) {
                    return self.error("expected ')'");
                }
                inner
            }
            Some(_) => return self.error("expected a number, a variable or '('"),
            None => return self.error("unexpected end of input"),
        };
        self.pos += 1;
        if matches!(
            self.peek(),
            Some(Token::Int(_)) | Some(Token::Var(_)) | Some(Token::LParen)
        ) {
            return self.error("implicit multiplication is not allowed; use '*'");
        }
        Ok(result)
    }
}

/// Parses and expands a form with exact rational coefficients.
pub fn parse_poly(text: &str) -> Result<HomogeneousPoly<RationalField>, ParseError> {
    let tokens = tokenize(text)?;
    let mut parser = Parser {
        tokens,
        pos: 0,
        end: text.chars().count(),
    };
    let expansion = parser.expr()?;
    if parser.pos < parser.tokens.len() {
        return parser.error("unexpected token");
    }
    let mut degrees: Vec<usize> = expansion.0.keys().map(|m| m.degree()).collect();
    degrees.sort_unstable();
    degrees.dedup();
    match degrees.as_slice() {
        [] => Err(ParseError::Zero),
        [0] => Err(ParseError::Constant),
        [d] => Ok(HomogeneousPoly::from_terms(&RationalField, *d, expansion.0)
            .expect("single degree")),
        [first, second, ..] => Err(ParseError::NonHomogeneous {
            first: *first,
            second: *second,
        }),
    }
}

/// Parses and reduces into `field`, reporting a bad prime if a denominator vanishes.
pub fn parse_poly_in<F: Field>(text: &str, field: &F) -> Result<HomogeneousPoly<F>, ParseError> {
    Ok(parse_poly(text)?.reduce(field)?)
}
