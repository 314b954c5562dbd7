//! Polynomial source-text parser: terms `c*x^i`, `c*x^i*y^j` with integer
//! coefficients reduced mod p, variables x and y, negative exponents allowed
//! for Laurent mode.

use crate::error::{Error, Result};
use crate::ffield::FieldCtx;
use crate::poly::LaurentPoly;

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Lexer<'a> {
        Lexer {
            src: src.as_bytes(),
            pos: 0,
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn bump(&mut self) -> Option<u8> {
        let c = self.peek();
        if c.is_some() {
            self.pos += 1;
        }
        c
    }

    fn err(&self, msg: &str) -> Error {
        Error::ParseError {
            pos: self.pos,
            msg: msg.to_string(),
        }
    }

    fn integer(&mut self) -> Result<i64> {
        self.skip_ws();
        let mut neg = false;
        if self.peek() == Some(b'-') {
            neg = true;
            self.bump();
        } else if self.peek() == Some(b'+') {
            self.bump();
        }
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if self.pos == start {
            return Err(self.err("expected an integer"));
        }
        let digits = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        let v: i64 = digits
            .parse()
            .map_err(|_| self.err("integer out of range"))?;
        Ok(if neg { -v } else { v })
    }
}

/// Parse polynomial source text into a canonical LaurentPoly over F_{p^a}
/// (spec op `parse_poly`). Duplicate exponents merge; terms that vanish
/// after reduction mod p are dropped with a warning in the returned list.
pub fn parse_poly(text: &str, field: &FieldCtx) -> Result<(LaurentPoly, Vec<String>)> {
    let mut lex = Lexer::new(text);
    let mut terms: Vec<(Vec<i64>, i64)> = Vec::new();
    let mut nvars = 1usize;
    loop {
        // sign
        let mut sign = 1i64;
        match lex.peek() {
            Some(b'+') => {
                lex.bump();
            }
            Some(b'-') => {
                sign = -1;
                lex.bump();
            }
            None if !terms.is_empty() => break,
            None => return Err(lex.err("empty polynomial")),
            _ => {}
        }
        // coefficient (optional)
        let mut coeff = 1i64;
        let mut saw_any = false;
        if matches!(lex.peek(), Some(c) if c.is_ascii_digit()) {
            coeff = lex.integer()?;
            saw_any = true;
            if lex.peek() == Some(b'*') {
                lex.bump();
            }
        }
        // monomial factors
        let mut ex = 0i64;
        let mut ey = 0i64;
        loop {
            match lex.peek() {
                Some(b'x') | Some(b'y') => {
                    let var = lex.bump().unwrap();
                    saw_any = true;
                    let mut e = 1i64;
                    if lex.peek() == Some(b'^') {
                        lex.bump();
                        e = lex.integer()?;
                    }
                    if var == b'x' {
                        ex += e;
                    } else {
                        ey += e;
                        nvars = 2;
                    }
                    if lex.peek() == Some(b'*') {
                        lex.bump();
                        continue;
                    }
                }
                _ => break,
            }
        }
        if !saw_any {
            return Err(lex.err("expected a term"));
        }
        terms.push((vec![ex, ey], sign * coeff));
        match lex.peek() {
            None => break,
            Some(b'+') | Some(b'-') => continue,
            Some(_) => return Err(lex.err("unexpected character")),
        }
    }
    let p = field.p as i64;
    let mut warnings = Vec::new();
    let built: Vec<(Vec<i64>, crate::ffield::FqElem)> = terms
        .iter()
        .map(|(e, c)| {
            let exps = if nvars == 1 {
                vec![e[0]]
            } else {
                e.clone()
            };
            let red = c.rem_euclid(p) as u64;
            (exps, field.from_u64(red))
        })
        .collect();
    for (e, c) in &terms {
        if c.rem_euclid(p) == 0 {
            warnings.push(format!(
                "coefficient {} of x^{}{} reduces to 0 mod {}",
                c,
                e[0],
                if nvars == 2 {
                    format!(" y^{}", e[1])
                } else {
                    String::new()
                },
                field.p
            ));
        }
    }
    let poly = LaurentPoly::new(nvars, built, field.clone())?;
    Ok((poly, warnings))
}
