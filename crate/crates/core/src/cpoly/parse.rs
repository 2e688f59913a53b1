//! Polynomial literals: JSON objects and compact phase strings.
//!
//! Phase grammar (whitespace ignored):
//!
//! ```text
//! expr    := sign? term (sign term)*
//! term    := coef factor* | factor+
//! coef    := real 'i'? | 'i' | '(' sign? part (sign part)* ')'
//! part    := real 'i'? | 'i'
//! factor  := '*'? var ('^' digits)?
//! var     := 'z' | 'z' digits          (z1, z2, ... for several variables)
//! ```

use serde::Deserialize;

use super::{CPoly1, CPolyN, MultiIndex, C64};
use crate::error::{Error, Result};

#[derive(Deserialize)]
#[serde(untagged)]
enum JsonLiteral {
    Multi { nvars: usize, terms: Vec<JsonTerm> },
    Uni { coeffs: Vec<[f64; 2]> },
}

#[derive(Deserialize)]
struct JsonTerm {
    alpha: Vec<u32>,
    #[serde(default)]
    re: f64,
    #[serde(default)]
    im: f64,
}

pub fn parse_poly_json(s: &str) -> Result<CPolyN> {
    let lit: JsonLiteral = serde_json::from_str(s).map_err(|e| Error::Parse {
        pos: e.column(),
        msg: e.to_string(),
    })?;
    match lit {
        JsonLiteral::Multi { nvars, terms } => CPolyN::new(
            nvars,
            terms
                .into_iter()
                .map(|t| (MultiIndex(t.alpha), C64::new(t.re, t.im))),
        ),
        JsonLiteral::Uni { coeffs } => {
            let p = CPoly1::new(coeffs.into_iter().map(|[a, b]| C64::new(a, b)).collect())?;
            Ok(CPolyN::from_poly1(&p))
        }
    }
}

/// Parses either a JSON literal (leading `{`) or a phase string.
pub fn parse_poly(s: &str) -> Result<CPolyN> {
    if s.trim_start().starts_with('{') {
        parse_poly_json(s)
    } else {
        parse_phase(s)
    }
}

pub fn parse_poly1(s: &str) -> Result<CPoly1> {
    parse_poly(s)?.to_poly1()
}

struct Parser<'a> {
    s: &'a [u8],
    pos: usize,
}

#[derive(Clone, Copy, PartialEq)]
enum VarStyle {
    Bare,
    Indexed,
}

impl<'a> Parser<'a> {
    fn err<T>(&self, msg: &str) -> Result<T> {
        Err(Error::Parse {
            pos: self.pos,
            msg: msg.to_string(),
        })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.s.get(self.pos).copied()
    }

    fn sign(&mut self) -> Option<f64> {
        match self.peek() {
            Some(b'+') => {
                self.pos += 1;
                Some(1.0)
            }
            Some(b'-') => {
                self.pos += 1;
                Some(-1.0)
            }
            _ => None,
        }
    }

    fn real(&mut self) -> Result<f64> {
        self.skip_ws();
        let start = self.pos;
        let s = self.s;
        while self.pos < s.len() && (s[self.pos].is_ascii_digit() || s[self.pos] == b'.') {
            self.pos += 1;
        }
        if self.pos < s.len() && (s[self.pos] == b'e' || s[self.pos] == b'E') {
            let save = self.pos;
            self.pos += 1;
            if self.pos < s.len() && (s[self.pos] == b'+' || s[self.pos] == b'-') {
                self.pos += 1;
            }
            let digits = self.pos;
            while self.pos < s.len() && s[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            if self.pos == digits {
                self.pos = save;
            }
        }
        let txt = std::str::from_utf8(&s[start..self.pos]).unwrap_or("");
        txt.parse::<f64>().or_else(|_| {
            self.pos = start;
            self.err("expected a number")
        })
    }

    /// `real 'i'?` or `'i'`.
    fn part(&mut self) -> Result<C64> {
        match self.peek() {
            Some(b'i') => {
                self.pos += 1;
                Ok(C64::new(0.0, 1.0))
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => {
                let x = self.real()?;
                if self.s.get(self.pos) == Some(&b'i') {
                    self.pos += 1;
                    Ok(C64::new(0.0, x))
                } else {
                    Ok(C64::new(x, 0.0))
                }
            }
            _ => self.err("expected a coefficient"),
        }
    }

    fn coef(&mut self) -> Result<Option<C64>> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let mut acc = C64::new(0.0, 0.0);
                let mut sg = self.sign().unwrap_or(1.0);
                loop {
                    acc += self.part()? * sg;
                    match self.sign() {
                        Some(s) => sg = s,
                        None => break,
                    }
                }
                if self.peek() != Some(b')') {
                    return self.err("expected ')'");
                }
                self.pos += 1;
                Ok(Some(acc))
            }
            Some(c) if c.is_ascii_digit() || c == b'.' || c == b'i' => self.part().map(Some),
            _ => Ok(None),
        }
    }

    fn digits(&mut self) -> Option<u32> {
        let start = self.pos;
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        std::str::from_utf8(&self.s[start..self.pos])
            .ok()
            .and_then(|t| t.parse().ok())
    }

    /// Returns `(variable index, exponent, style)`.
    fn factor(&mut self) -> Result<Option<(usize, u32, VarStyle)>> {
        if self.peek() == Some(b'*') {
            self.pos += 1;
        }
        if self.peek() != Some(b'z') {
            return Ok(None);
        }
        self.pos += 1;
        let (idx, style) = match self.digits() {
            Some(0) => return self.err("variables are numbered from z1"),
            Some(k) => (k as usize - 1, VarStyle::Indexed),
            None => (0, VarStyle::Bare),
        };
        let mut exp = 1;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            self.skip_ws();
            exp = match self.digits() {
                Some(e) => e,
                None => return self.err("expected an exponent"),
            };
        }
        Ok(Some((idx, exp, style)))
    }
}

pub fn parse_phase(s: &str) -> Result<CPolyN> {
    let mut p = Parser {
        s: s.as_bytes(),
        pos: 0,
    };
    let mut raw: Vec<(Vec<(usize, u32)>, C64)> = Vec::new();
    let mut style: Option<VarStyle> = None;
    let mut sg = p.sign().unwrap_or(1.0);
    loop {
        let c = p.coef()?;
        let mut factors = Vec::new();
        while let Some((idx, e, st)) = p.factor()? {
            if style.is_some_and(|s| s != st) {
                return p.err("cannot mix z with z1, z2, ...");
            }
            style = Some(st);
            factors.push((idx, e));
        }
        if c.is_none() && factors.is_empty() {
            return p.err("expected a term");
        }
        raw.push((factors, c.unwrap_or(C64::new(1.0, 0.0)) * sg));
        match p.sign() {
            Some(s) => sg = s,
            None => break,
        }
    }
    if p.peek().is_some() {
        return p.err("unexpected trailing input");
    }
    let nvars = raw
        .iter()
        .flat_map(|(f, _)| f.iter().map(|(i, _)| i + 1))
        .max()
        .unwrap_or(1);
    let terms = raw.into_iter().map(|(factors, c)| {
        let mut a = vec![0u32; nvars];
        for (i, e) in factors {
            a[i] += e;
        }
        (MultiIndex(a), c)
    });
    CPolyN::new(nvars, terms.collect::<Vec<_>>())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn phase_strings() {
        let p = parse_poly1("z^3 - 3z").unwrap();
        assert_eq!(p.coeffs(), &[c(0.0, 0.0), c(-3.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        let q = parse_poly1("(2+1i)z^2").unwrap();
        assert_eq!(q.coeff(2), c(2.0, 1.0));
        let r = parse_poly1("-1.5e-1 + 2iz").unwrap();
        assert_eq!(r.coeffs(), &[c(-0.15, 0.0), c(0.0, 2.0)]);
        let m = parse_poly("z1 z2^2 + 3*z1").unwrap();
        assert_eq!(m.nvars(), 2);
        assert_eq!(m.terms()[&MultiIndex(vec![1, 2])], c(1.0, 0.0));
    }

    #[test]
    fn phase_errors() {
        assert!(parse_phase("z^").is_err());
        assert!(parse_phase("z + z1").is_err());
        assert!(parse_phase("3 +").is_err());
        assert!(parse_phase("(1+2i").is_err());
    }

    #[test]
    fn json_literals() {
        let p = parse_poly(r#"{"coeffs": [[1,0],[0,-1]]}"#).unwrap();
        assert_eq!(p.to_poly1().unwrap().coeffs(), &[c(1.0, 0.0), c(0.0, -1.0)]);
        let m = parse_poly(r#"{"nvars": 2, "terms": [{"alpha": [1,1], "re": 2, "im": 0}]}"#).unwrap();
        assert_eq!(m.degree(), 2);
        assert!(parse_poly(r#"{"nvars": 2, "terms": [{"alpha": [1], "re": 2}]}"#).is_err());
    }
}
