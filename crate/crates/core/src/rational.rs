//! Rational functions `P/Q` normalized so that `Q(0) = 1`, and the text
//! parser for the expression grammar.
//!
//! Grammar: integers, variables `x1..x9` (aliases `x y z t` for `x1..x4`),
//! binary `+ - * /`, unary minus, `^` with a nonnegative integer exponent,
//! parentheses. Juxtaposition is not multiplication.

use std::fmt;

use crate::error::{Error, Result};
use crate::field::PrimeField;
use crate::poly::MultiPoly;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RationalFunction {
    num: MultiPoly,
    den: MultiPoly,
}

impl fmt::Debug for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RationalFunction[F_{}; {}]({})", self.field().p(), self.nvars(), self)
    }
}

impl fmt::Display for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})/({})", self.num, self.den)
    }
}

impl RationalFunction {
    /// Normalizes `num/den`: cancels the common monomial factor and scales so
    /// the denominator has constant term 1.
    pub fn new(num: MultiPoly, den: MultiPoly) -> Result<Self> {
        den.check_nvars(num.nvars())?;
        if den.is_zero() {
            return Err(Error::NotExpandable);
        }
        let (num, den) = if num.is_zero() {
            (num, MultiPoly::one(den.field(), den.nvars()))
        } else {
            let cn = num.monomial_content();
            let cd = den.monomial_content();
            let common: Vec<u32> = cn.iter().zip(&cd).map(|(a, b)| *a.min(b)).collect();
            (num.div_monomial(&common), den.div_monomial(&common))
        };
        let c = den.constant_term();
        if c == 0 {
            return Err(Error::NotExpandable);
        }
        let inv = den.field().inv(c).unwrap();
        Ok(RationalFunction {
            num: num.scale(inv),
            den: den.scale(inv),
        })
    }

    pub fn polynomial(p: MultiPoly) -> Self {
        let den = MultiPoly::one(p.field(), p.nvars());
        RationalFunction { num: p, den }
    }

    pub fn numerator(&self) -> &MultiPoly {
        &self.num
    }

    pub fn denominator(&self) -> &MultiPoly {
        &self.den
    }

    pub fn field(&self) -> PrimeField {
        self.num.field()
    }

    pub fn nvars(&self) -> usize {
        self.num.nvars()
    }

    /// Maximum of the total degrees of numerator and denominator.
    pub fn height(&self) -> u32 {
        self.num
            .total_degree()
            .unwrap_or(0)
            .max(self.den.total_degree().unwrap_or(0))
    }

    /// Renders in the expression grammar; parsing the result gives back `self`.
    pub fn render(&self) -> String {
        self.to_string()
    }

    pub fn extend_vars(&self, nvars: usize) -> Self {
        RationalFunction {
            num: self.num.extend_vars(nvars),
            den: self.den.extend_vars(nvars),
        }
    }
}

/// Parses an expression over F_p. The variable count is the largest variable
/// index used (at least 1).
pub fn parse_rational(text: &str, p: u64) -> Result<RationalFunction> {
    parse_rational_in(text, p, None)
}

/// Like [`parse_rational`], with an optional explicit variable count (which
/// must cover every variable used).
pub fn parse_rational_in(text: &str, p: u64, nvars: Option<usize>) -> Result<RationalFunction> {
    let field = PrimeField::new(p)?;
    let tokens = tokenize(text)?;
    let used = tokens
        .iter()
        .filter_map(|(t, _)| match t {
            Token::Var(k) => Some(k + 1),
            _ => None,
        })
        .max()
        .unwrap_or(0)
        .max(1);
    let nvars = match nvars {
        Some(n) if n < used => {
            return Err(Error::DimMismatch {
                expected: n,
                got: used,
            })
        }
        Some(n) => n,
        None => used,
    };
    let mut parser = Parser {
        tokens,
        pos: 0,
        field,
        nvars,
        len: text.len(),
    };
    let (num, den) = parser.expr()?;
    if parser.pos < parser.tokens.len() {
        return Err(parser.error("unexpected trailing input"));
    }
    RationalFunction::new(num, den)
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Int(String),
    Var(usize),
    Op(char),
}

fn tokenize(text: &str) -> Result<Vec<(Token, usize)>> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        match c {
            c if c.is_ascii_whitespace() => i += 1,
            '0'..='9' => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                out.push((Token::Int(text[start..i].to_string()), start));
            }
            '+' | '-' | '*' | '/' | '^' | '(' | ')' => {
                out.push((Token::Op(c), i));
                i += 1;
            }
            'x' => {
                let start = i;
                i += 1;
                if i < bytes.len() && (b'1'..=b'9').contains(&bytes[i]) {
                    out.push((Token::Var((bytes[i] - b'1') as usize), start));
                    i += 1;
                } else {
                    out.push((Token::Var(0), start));
                }
                if i < bytes.len() && bytes[i].is_ascii_alphanumeric() {
                    return Err(Error::Syntax {
                        pos: i,
                        msg: "unknown identifier".into(),
                    });
                }
            }
            'y' | 'z' | 't' => {
                let k = match c {
                    'y' => 1,
                    'z' => 2,
                    _ => 3,
                };
                out.push((Token::Var(k), i));
                i += 1;
                if i < bytes.len() && bytes[i].is_ascii_alphanumeric() {
                    return Err(Error::Syntax {
                        pos: i,
                        msg: "unknown identifier".into(),
                    });
                }
            }
            _ => {
                return Err(Error::Syntax {
                    pos: i,
                    msg: format!("unexpected character {c:?}"),
                })
            }
        }
    }
    Ok(out)
}

type Frac = (MultiPoly, MultiPoly);

struct Parser {
    tokens: Vec<(Token, usize)>,
    pos: usize,
    field: PrimeField,
    nvars: usize,
    len: usize,
}

impl Parser {
    fn error(&self, msg: &str) -> Error {
        let pos = self.tokens.get(self.pos).map(|t| t.1).unwrap_or(self.len);
        Error::Syntax {
            pos,
            msg: msg.to_string(),
        }
    }

    fn peek_op(&self) -> Option<char> {
        match self.tokens.get(self.pos) {
            Some((Token::Op(c), _)) => Some(*c),
            _ => None,
        }
    }

    fn expr(&mut self) -> Result<Frac> {
        let mut acc = self.term()?;
        while let Some(op @ ('+' | '-')) = self.peek_op() {
            self.pos += 1;
            let rhs = self.term()?;
            let rhs = if op == '-' { (rhs.0.neg(), rhs.1) } else { rhs };
            acc = if acc.1 == rhs.1 {
                (acc.0.add(&rhs.0), acc.1)
            } else {
                (acc.0.mul(&rhs.1).add(&rhs.0.mul(&acc.1)), acc.1.mul(&rhs.1))
            };
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<Frac> {
        let mut acc = self.unary()?;
        while let Some(op @ ('*' | '/')) = self.peek_op() {
            self.pos += 1;
            let rhs = self.unary()?;
            acc = if op == '*' {
                (acc.0.mul(&rhs.0), acc.1.mul(&rhs.1))
            } else {
                if rhs.0.is_zero() {
                    return Err(Error::NotExpandable);
                }
                (acc.0.mul(&rhs.1), acc.1.mul(&rhs.0))
            };
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Frac> {
        if self.peek_op() == Some('-') {
            self.pos += 1;
            let (n, d) = self.unary()?;
            return Ok((n.neg(), d));
        }
        if self.peek_op() == Some('+') {
            self.pos += 1;
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Frac> {
        let base = self.primary()?;
        if self.peek_op() != Some('^') {
            return Ok(base);
        }
        self.pos += 1;
        let e = match self.tokens.get(self.pos) {
            Some((Token::Int(s), _)) => s
                .parse::<u32>()
                .map_err(|_| self.error("exponent too large"))?,
            _ => return Err(self.error("exponent must be a nonnegative integer")),
        };
        self.pos += 1;
        Ok((base.0.pow(e), base.1.pow(e)))
    }

    fn primary(&mut self) -> Result<Frac> {
        let one = MultiPoly::one(self.field, self.nvars);
        match self.tokens.get(self.pos).cloned() {
            Some((Token::Int(s), _)) => {
                self.pos += 1;
                let p = self.field.p() as u64;
                let v = s.bytes().fold(0u64, |acc, b| (acc * 10 + (b - b'0') as u64) % p);
                Ok((MultiPoly::constant(self.field, self.nvars, v as u32), one))
            }
            Some((Token::Var(k), _)) => {
                self.pos += 1;
                Ok((MultiPoly::var(self.field, self.nvars, k), one))
            }
            Some((Token::Op('('), _)) => {
                self.pos += 1;
                let inner = self.expr()?;
                if self.peek_op() != Some(')') {
                    return Err(self.error("expected ')'"));
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(_) => Err(self.error("expected a number, variable or '('")),
            None => Err(self.error("unexpected end of input")),
        }
    }
}
