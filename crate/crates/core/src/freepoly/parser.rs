use num_complex::Complex64;

use super::{FreePolynomial, FreeWord};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
enum Tok {
    Real(f64),
    Imag(f64),
    Var(usize),
    Plus,
    Minus,
    Star,
    Caret,
    LParen,
    RParen,
    End,
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
    d: usize,
}

fn err<T>(pos: usize, msg: impl Into<String>) -> Result<T> {
    Err(Error::Parse {
        pos,
        msg: msg.into(),
    })
}

impl<'a> Lexer<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn digits(&mut self) -> usize {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        self.pos - start
    }

    fn number(&mut self, start: usize) -> Result<f64> {
        let int_digits = self.digits();
        let mut frac_digits = 0;
        if self.src.get(self.pos) == Some(&b'.') {
            self.pos += 1;
            frac_digits = self.digits();
        }
        if int_digits + frac_digits == 0 {
            return err(start, "malformed number");
        }
        if matches!(self.src.get(self.pos), Some(b'e' | b'E')) {
            let mark = self.pos;
            self.pos += 1;
            if matches!(self.src.get(self.pos), Some(b'+' | b'-')) {
                self.pos += 1;
            }
            if self.digits() == 0 {
                return err(mark, "malformed exponent in number");
            }
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
        text.parse::<f64>().map_err(|_| Error::Parse {
            pos: start,
            msg: format!("malformed number `{text}`"),
        })
    }

    /// Next token and its byte offset.
    fn next(&mut self) -> Result<(Tok, usize)> {
        self.skip_ws();
        let start = self.pos;
        let Some(&b) = self.src.get(self.pos) else {
            return Ok((Tok::End, start));
        };
        let tok = match b {
            b'+' => Tok::Plus,
            b'-' => Tok::Minus,
            b'*' => Tok::Star,
            b'^' => Tok::Caret,
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b'i' => Tok::Imag(1.0),
            b'x' => {
                self.pos += 1;
                if self.digits() == 0 {
                    return err(start, "expected variable index after `x`");
                }
                let text = std::str::from_utf8(&self.src[start + 1..self.pos]).expect("ascii");
                let index: usize = text.parse().map_err(|_| Error::Parse {
                    pos: start,
                    msg: "variable index too large".into(),
                })?;
                if index >= self.d {
                    return err(
                        start,
                        format!("variable index out of range: x{index} with d={}", self.d),
                    );
                }
                return Ok((Tok::Var(index), start));
            }
            b'0'..=b'9' | b'.' => {
                let value = self.number(start)?;
                if self.src.get(self.pos) == Some(&b'i') {
                    self.pos += 1;
                    return Ok((Tok::Imag(value), start));
                }
                return Ok((Tok::Real(value), start));
            }
            other => return err(start, format!("unexpected character `{}`", other as char)),
        };
        self.pos += 1;
        Ok((tok, start))
    }
}

struct Parser<'a> {
    lexer: Lexer<'a>,
    tok: Tok,
    pos: usize,
    d: usize,
}

impl<'a> Parser<'a> {
    fn bump(&mut self) -> Result<()> {
        let (tok, pos) = self.lexer.next()?;
        self.tok = tok;
        self.pos = pos;
        Ok(())
    }

    fn expr(&mut self) -> Result<FreePolynomial> {
        let mut acc = self.term()?;
        loop {
            match self.tok {
                Tok::Plus => {
                    self.bump()?;
                    acc = &acc + &self.term()?;
                }
                Tok::Minus => {
                    self.bump()?;
                    acc = &acc - &self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<FreePolynomial> {
        let mut acc = self.factor()?;
        while self.tok == Tok::Star {
            self.bump()?;
            acc = &acc * &self.factor()?;
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<FreePolynomial> {
        match self.tok {
            Tok::Minus => {
                self.bump()?;
                Ok(-&self.factor()?)
            }
            Tok::Plus => {
                self.bump()?;
                self.factor()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<FreePolynomial> {
        let atom_pos = self.pos;
        let (base, exponentiable) = self.atom()?;
        if self.tok != Tok::Caret {
            return Ok(base);
        }
        if !exponentiable {
            return err(
                self.pos,
                "exponent applies only to variables and parenthesized groups",
            );
        }
        self.bump()?;
        match self.tok {
            Tok::Minus => err(self.pos, "negative exponent"),
            Tok::Real(k) if k.fract() == 0.0 && k >= 0.0 && k <= u32::MAX as f64 => {
                self.bump()?;
                Ok(base.pow(k as u32))
            }
            Tok::Real(_) => err(self.pos, "exponent must be a non-negative integer"),
            _ => err(
                self.pos,
                format!("expected exponent after `^` (base at {atom_pos})"),
            ),
        }
    }

    fn atom(&mut self) -> Result<(FreePolynomial, bool)> {
        let d = self.d;
        match self.tok {
            Tok::Real(v) => {
                self.bump()?;
                Ok((FreePolynomial::constant(d, Complex64::new(v, 0.0)), false))
            }
            Tok::Imag(v) => {
                self.bump()?;
                Ok((FreePolynomial::constant(d, Complex64::new(0.0, v)), false))
            }
            Tok::Var(i) => {
                self.bump()?;
                let p =
                    FreePolynomial::from_terms(d, [(Complex64::new(1.0, 0.0), FreeWord(vec![i]))])?;
                Ok((p, true))
            }
            Tok::LParen => {
                let open = self.pos;
                self.bump()?;
                let inner = self.expr()?;
                if self.tok != Tok::RParen {
                    return err(self.pos, format!("expected `)` to close `(` at {open}"));
                }
                self.bump()?;
                Ok((inner, true))
            }
            Tok::End => err(self.pos, "unexpected end of input"),
            other => err(self.pos, format!("unexpected token {other:?}")),
        }
    }
}

/// Parses the text form of a free polynomial in `d` variables `x0 … x{d-1}`.
///
/// ```
/// use ncjulia::freepoly::{parse_poly, format_poly};
/// let p = parse_poly("x0*x1 - 2", 2).unwrap();
/// assert_eq!(format_poly(&p), "x0*x1 - 2");
/// assert!(parse_poly("x5", 2).is_err());
/// ```
pub fn parse_poly(text: &str, d: usize) -> Result<FreePolynomial> {
    let mut parser = Parser {
        lexer: Lexer {
            src: text.as_bytes(),
            pos: 0,
            d,
        },
        tok: Tok::End,
        pos: 0,
        d,
    };
    parser.bump()?;
    let p = parser.expr()?;
    if parser.tok != Tok::End {
        return err(
            parser.pos,
            "expected operator (products need an explicit `*`)",
        );
    }
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::c;

    fn words(p: &FreePolynomial) -> Vec<(Complex64, Vec<usize>)> {
        p.terms()
            .iter()
            .map(|t| (t.coeff, t.word.0.clone()))
            .collect()
    }

    #[test]
    fn documented_examples() {
        let p = parse_poly("x0*x1 - 2", 2).unwrap();
        assert_eq!(
            words(&p),
            vec![(c(-2.0, 0.0), vec![]), (c(1.0, 0.0), vec![0, 1])]
        );
        let p = parse_poly("x0^2 + x1*x0", 2).unwrap();
        assert_eq!(
            words(&p),
            vec![(c(1.0, 0.0), vec![0, 0]), (c(1.0, 0.0), vec![1, 0])]
        );
        match parse_poly("x5", 2) {
            Err(Error::Parse { pos, msg }) => {
                assert_eq!(pos, 0);
                assert!(msg.contains("variable index out of range"));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn non_commutative_products() {
        let a = parse_poly("(x0 + x1)^2", 2).unwrap();
        let b = parse_poly("x0^2 + x0*x1 + x1*x0 + x1^2", 2).unwrap();
        assert_eq!(a, b);
        assert_ne!(
            parse_poly("x0*x1", 2).unwrap(),
            parse_poly("x1*x0", 2).unwrap()
        );
        assert_eq!(parse_poly("x0^0", 1).unwrap(), parse_poly("1", 1).unwrap());
    }

    #[test]
    fn complex_literals() {
        let p = parse_poly("(1.5+2i)*x0 - i + 3e-1", 1).unwrap();
        assert_eq!(
            words(&p),
            vec![(c(0.3, -1.0), vec![]), (c(1.5, 2.0), vec![0])]
        );
    }

    #[test]
    fn syntax_errors_carry_positions() {
        let pos = |s: &str| match parse_poly(s, 2) {
            Err(Error::Parse { pos, msg }) => (pos, msg),
            other => panic!("{s}: unexpected {other:?}"),
        };
        assert_eq!(pos("x0 x1").0, 3);
        assert!(pos("x0^-1").1.contains("negative exponent"));
        assert!(pos("2^2").1.contains("exponent applies"));
        assert!(pos("x0^1.5").1.contains("non-negative integer"));
        assert_eq!(pos("(x0 + x1").0, 8);
        assert_eq!(pos("x0 + $").0, 5);
        assert!(pos("").1.contains("end of input"));
        assert!(pos("2x0").1.contains("expected operator"));
    }
}
