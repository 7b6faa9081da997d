//! Polynomial text grammar.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary ('*' unary)*
//! unary  := ('+' | '-') unary | power
//! power  := atom ('^' INT)?
//! atom   := INT ('/' INT)? | VAR | 'i' | '(' expr ')'
//! VAR    := ('z' | 'w') INT        -- 1-based index
//! ```

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use super::poly::PolySeries;
use super::scalar::GaussianRational as GR;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(BigInt),
    Var(usize),
    I,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

fn err(position: usize, message: impl Into<String>) -> Error {
    Error::Parse { position, message: message.into() }
}

fn lex(s: &str) -> Result<Vec<(Tok, usize)>> {
    let chars: Vec<char> = s.chars().collect();
    let mut out = Vec::new();
    let mut k = 0;
    while k < chars.len() {
        let c = chars[k];
        let start = k;
        let tok = match c {
            c if c.is_whitespace() => {
                k += 1;
                continue;
            }
            '0'..='9' => {
                while k < chars.len() && chars[k].is_ascii_digit() {
                    k += 1;
                }
                let digits: String = chars[start..k].iter().collect();
                out.push((Tok::Int(digits.parse().unwrap()), start));
                continue;
            }
            'z' | 'w' => {
                k += 1;
                let ds = k;
                while k < chars.len() && chars[k].is_ascii_digit() {
                    k += 1;
                }
                if ds == k {
                    return Err(err(start, format!("variable '{c}' needs an index")));
                }
                let idx: usize = chars[ds..k]
                    .iter()
                    .collect::<String>()
                    .parse()
                    .map_err(|_| err(ds, "variable index too large"))?;
                if idx == 0 {
                    return Err(err(ds, "variable indices start at 1"));
                }
                out.push((Tok::Var(idx - 1), start));
                continue;
            }
            'i' => Tok::I,
            '+' => Tok::Plus,
            '-' => Tok::Minus,
            '*' => Tok::Star,
            '/' => Tok::Slash,
            '^' => Tok::Caret,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            _ => return Err(err(start, format!("unexpected character '{c}'"))),
        };
        out.push((tok, start));
        k += 1;
    }
    // identifiers like "iz1" or "z1z2" would lex as juxtaposed atoms
    for w in out.windows(2) {
        let atom_end = matches!(w[0].0, Tok::Int(_) | Tok::Var(_) | Tok::I | Tok::RParen);
        let atom_start = matches!(w[1].0, Tok::Int(_) | Tok::Var(_) | Tok::I | Tok::LParen);
        if atom_end && atom_start {
            return Err(err(w[1].1, "implicit multiplication is not allowed; use '*'"));
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    end: usize,
    nvars: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.0)
    }

    fn here(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |t| t.1)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|t| t.0.clone());
        self.pos += 1;
        t
    }

    fn expr(&mut self) -> Result<PolySeries> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.bump();
                    acc = &acc + &self.term()?;
                }
                Some(Tok::Minus) => {
                    self.bump();
                    acc = &acc - &self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<PolySeries> {
        let mut acc = self.unary()?;
        while let Some(Tok::Star) = self.peek() {
            self.bump();
            acc = &acc * &self.unary()?;
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<PolySeries> {
        match self.peek() {
            Some(Tok::Minus) => {
                self.bump();
                Ok(-self.unary()?)
            }
            Some(Tok::Plus) => {
                self.bump();
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<PolySeries> {
        let base = self.atom()?;
        if let Some(Tok::Caret) = self.peek() {
            self.bump();
            let at = self.here();
            match self.bump() {
                Some(Tok::Int(e)) => {
                    let e: u32 = e
                        .try_into()
                        .map_err(|_| err(at, "exponent too large"))?;
                    Ok(base.pow(e))
                }
                _ => Err(err(at, "expected a nonnegative integer exponent")),
            }
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<PolySeries> {
        let at = self.here();
        match self.bump() {
            Some(Tok::Int(n)) => {
                if let Some(Tok::Slash) = self.peek() {
                    self.bump();
                    let dat = self.here();
                    match self.bump() {
                        Some(Tok::Int(d)) if !d.is_zero() => {
                            let r = BigRational::new(n, d);
                            Ok(PolySeries::constant(self.nvars, GR::from_rational(r)))
                        }
                        Some(Tok::Int(_)) => Err(err(dat, "zero denominator")),
                        _ => Err(err(dat, "'/' is only allowed inside a rational literal p/q")),
                    }
                } else {
                    Ok(PolySeries::constant(self.nvars, GR::from_rational(BigRational::from_integer(n))))
                }
            }
            Some(Tok::Var(v)) => {
                if v >= self.nvars {
                    return Err(err(
                        at,
                        format!("variable index {} exceeds dimension {}", v + 1, self.nvars),
                    ));
                }
                Ok(PolySeries::var(self.nvars, v))
            }
            Some(Tok::I) => Ok(PolySeries::constant(self.nvars, GR::i())),
            Some(Tok::LParen) => {
                let e = self.expr()?;
                let close = self.here();
                match self.bump() {
                    Some(Tok::RParen) => Ok(e),
                    _ => Err(err(close, "expected ')'")),
                }
            }
            Some(Tok::Slash) => Err(err(at, "'/' is only allowed inside a rational literal p/q")),
            Some(t) => Err(err(at, format!("unexpected {}", describe(&t)))),
            None => Err(err(at, "unexpected end of input")),
        }
    }
}

fn describe(t: &Tok) -> &'static str {
    match t {
        Tok::Plus => "'+'",
        Tok::Minus => "'-'",
        Tok::Star => "'*'",
        Tok::Caret => "'^'",
        Tok::RParen => "')'",
        _ => "token",
    }
}

/// Parses a polynomial in `nvars` variables. `z_k` and `w_k` both name
/// variable `k`. Error positions are 0-based character offsets.
pub fn parse_poly(s: &str, nvars: usize) -> Result<PolySeries> {
    let toks = lex(s)?;
    let end = s.chars().count();
    let mut p = Parser { toks, pos: 0, end, nvars };
    if p.toks.is_empty() {
        return Err(err(0, "empty polynomial"));
    }
    let out = p.expr()?;
    if p.pos < p.toks.len() {
        let at = p.here();
        let t = p.bump().unwrap();
        return Err(err(at, format!("unexpected {}", describe(&t))));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_rationals_and_units() {
        let p = parse_poly("1/2*z1^2 - (3 + 2*i)*w2 + 7", 2).unwrap();
        assert_eq!(p.to_string(), "7 + (-3-2*i)*z2 + 1/2*z1^2");
        assert_eq!(parse_poly("-(z1 - z2)^2", 2).unwrap().to_string(), "-z1^2 + 2*z1*z2 - z2^2");
    }

    #[test]
    fn reports_error_positions() {
        match parse_poly("z1 +* z2", 2) {
            Err(Error::Parse { position, .. }) => assert_eq!(position, 4),
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_poly("2z1", 2), Err(Error::Parse { position: 1, .. })));
        assert!(matches!(parse_poly("z3", 2), Err(Error::Parse { position: 0, .. })));
        assert!(matches!(parse_poly("z1/z2", 2), Err(Error::Parse { position: 2, .. })));
        assert!(matches!(parse_poly("(z1", 2), Err(Error::Parse { position: 3, .. })));
        assert!(matches!(parse_poly("", 2), Err(Error::Parse { .. })));
        assert!(matches!(parse_poly("z1^-1", 2), Err(Error::Parse { position: 3, .. })));
    }
}
