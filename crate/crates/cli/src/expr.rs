//! Expressions for ring elements, polynomials in `t` and skew polynomials in
//! `t<j>` (standing for `τ^j`).

use std::sync::Arc;

use drinlevel::algebra::{upoly, BaseRing, RingElem, Scalars};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// Integers, `x`, `z`.
    Element,
    /// Additionally `t`, a commuting variable.
    Poly,
    /// Additionally `t<j>` for `τ^j`; coefficients must stand to the left.
    Skew,
}

/// Error with a zero-based offset into the parsed text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExprError {
    pub offset: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Int(u64),
    X,
    Z,
    T,
    Tau(usize),
    Plus,
    Minus,
    Star,
    Caret,
    Open,
    Close,
}

fn tokenize(text: &str, mode: Mode) -> Result<Vec<(usize, Tok)>, ExprError> {
    let bytes: Vec<(usize, char)> = text.char_indices().collect();
    let mut out = Vec::new();
    let mut i = 0;
    let err = |offset: usize, message: String| Err(ExprError { offset, message });
    while i < bytes.len() {
        let (pos, c) = bytes[i];
        i += 1;
        let tok = match c {
            ' ' | '\t' => continue,
            '+' => Tok::Plus,
            '-' => Tok::Minus,
            '*' => Tok::Star,
            '^' => Tok::Caret,
            '(' => Tok::Open,
            ')' => Tok::Close,
            'x' => Tok::X,
            'z' => Tok::Z,
            't' => {
                let start = i;
                while i < bytes.len() && bytes[i].1.is_ascii_digit() {
                    i += 1;
                }
                if start == i {
                    if mode != Mode::Poly {
                        return err(pos, "`t` is only allowed in polynomials; use t<j> for τ^j".into());
                    }
                    Tok::T
                } else {
                    if mode != Mode::Skew {
                        return err(pos, "`t<j>` is only allowed in skew polynomials".into());
                    }
                    let digits: String = bytes[start..i].iter().map(|b| b.1).collect();
                    Tok::Tau(digits.parse().map_err(|_| ExprError { offset: pos, message: "bad exponent".into() })?)
                }
            }
            d if d.is_ascii_digit() => {
                let mut v = d.to_digit(10).unwrap() as u64;
                while i < bytes.len() && bytes[i].1.is_ascii_digit() {
                    v = v
                        .checked_mul(10)
                        .and_then(|v| v.checked_add(bytes[i].1.to_digit(10).unwrap() as u64))
                        .ok_or(ExprError { offset: pos, message: "integer too large".into() })?;
                    i += 1;
                }
                Tok::Int(v)
            }
            other => return err(pos, format!("unexpected character `{other}`")),
        };
        out.push((pos, tok));
    }
    Ok(out)
}

/// A polynomial in the mode's variable, coefficients in `R`.
type Value = Vec<RingElem>;

struct Parser<'a> {
    ring: &'a Arc<BaseRing>,
    mode: Mode,
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.1)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |t| t.0)
    }

    fn fail<T>(&self, message: impl Into<String>) -> Result<T, ExprError> {
        Err(ExprError { offset: self.offset(), message: message.into() })
    }

    fn constant(&self, c: RingElem) -> Value {
        vec![c]
    }

    fn fq_coefficients(&self, v: &Value) -> bool {
        v.iter().all(|c| self.ring.is_fq(c))
    }

    fn expr(&mut self) -> Result<Value, ExprError> {
        let r = self.ring.as_ref();
        let mut acc = if self.peek() == Some(&Tok::Minus) {
            self.pos += 1;
            upoly::neg(r, &self.term()?)
        } else {
            self.term()?
        };
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.pos += 1;
                    acc = upoly::add(r, &acc, &self.term()?);
                }
                Some(Tok::Minus) => {
                    self.pos += 1;
                    acc = upoly::sub(r, &acc, &self.term()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Value, ExprError> {
        let r = self.ring.as_ref();
        let mut acc = self.factor()?;
        while self.peek() == Some(&Tok::Star) {
            self.pos += 1;
            let at = self.offset();
            let rhs = self.factor()?;
            if self.mode == Mode::Skew && acc.len() > 1 && !self.fq_coefficients(&rhs) {
                return Err(ExprError { offset: at, message: "coefficients must stand to the left of t<j>".into() });
            }
            acc = upoly::mul(r, &acc, &rhs);
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Value, ExprError> {
        let base = self.atom()?;
        if self.peek() != Some(&Tok::Caret) {
            return Ok(base);
        }
        self.pos += 1;
        let Some(Tok::Int(e)) = self.peek().cloned() else {
            return self.fail("expected an integer exponent");
        };
        self.pos += 1;
        if self.mode == Mode::Skew && base.len() > 1 && e > 1 && !self.fq_coefficients(&base) {
            return self.fail("powers of skew terms need coefficients in F_q");
        }
        let r = self.ring.as_ref();
        let mut out = vec![r.one()];
        for _ in 0..e {
            out = upoly::mul(r, &out, &base);
        }
        Ok(out)
    }

    fn atom(&mut self) -> Result<Value, ExprError> {
        let r = self.ring.as_ref();
        let Some(tok) = self.peek().cloned() else {
            return self.fail("unexpected end of expression");
        };
        self.pos += 1;
        Ok(match tok {
            Tok::Int(v) => self.constant(r.from_int((v % r.p() as u64) as i64)),
            Tok::X => self.constant(r.generator()),
            Tok::Z => self.constant(r.zeta()),
            Tok::T => vec![r.zero(), r.one()],
            Tok::Tau(j) => {
                let mut v = vec![r.zero(); j + 1];
                v[j] = r.one();
                v
            }
            Tok::Open => {
                let v = self.expr()?;
                if self.peek() != Some(&Tok::Close) {
                    return self.fail("expected `)`");
                }
                self.pos += 1;
                v
            }
            _ => {
                self.pos -= 1;
                return self.fail("expected a number, `x`, `z`, a variable or `(`");
            }
        })
    }
}

/// Coefficients (ascending) of the parsed expression, trimmed.
pub fn parse(ring: &Arc<BaseRing>, text: &str, mode: Mode) -> Result<Vec<RingElem>, ExprError> {
    let toks = tokenize(text, mode)?;
    if toks.is_empty() {
        return Err(ExprError { offset: 0, message: "empty expression".into() });
    }
    let mut p = Parser { ring, mode, toks, pos: 0, end: text.len() };
    let mut v = p.expr()?;
    if p.pos < p.toks.len() {
        return p.fail("unexpected token");
    }
    upoly::trim(ring.as_ref(), &mut v);
    Ok(v)
}

pub fn parse_element(ring: &Arc<BaseRing>, text: &str) -> Result<RingElem, ExprError> {
    let v = parse(ring, text, Mode::Element)?;
    Ok(v.into_iter().next().unwrap_or_else(|| ring.zero()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use drinlevel::algebra::make_ring;

    #[test]
    fn elements_and_polynomials() {
        let r = make_ring(3, 1, 2, 2, None).unwrap();
        let a = parse_element(&r, "2*x*z + x^2 - 1").unwrap();
        let expected = r.add(&r.sub(&r.mul(&r.generator(), &r.generator()), &r.one()), &r.mul(&r.from_int(2), &r.mul(&r.generator(), &r.zeta())));
        assert_eq!(a, expected);
        let p = parse(&r, "t^9 + z*t^3 + z*t", Mode::Poly).unwrap();
        assert_eq!(p.len(), 10);
        assert_eq!(p[3], r.zeta());
        let s = parse(&r, "z + z*t1 + t2", Mode::Skew).unwrap();
        assert_eq!(s, vec![r.zeta(), r.zeta(), r.one()]);
    }

    #[test]
    fn errors_have_offsets() {
        let r = make_ring(3, 1, 1, 2, None).unwrap();
        assert_eq!(parse(&r, "t1 * z", Mode::Skew).unwrap_err().offset, 5);
        assert_eq!(parse(&r, "1 + ", Mode::Element).unwrap_err().offset, 4);
        assert_eq!(parse(&r, "t", Mode::Element).unwrap_err().offset, 0);
        assert_eq!(parse(&r, "2 $", Mode::Element).unwrap_err().offset, 2);
        assert!(parse(&r, "t1*2", Mode::Skew).is_ok());
    }
}
