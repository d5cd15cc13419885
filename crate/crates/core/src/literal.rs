//! Tokenizer and recursive-descent parser for polynomial literals such as
//! `T^3+2*T+1`, `(a+1)*T^2+a` or `a^2+a+1`.
//!
//! Literals are parsed into a sparse bivariate polynomial in the field
//! generator `a` and the indeterminate `T` with coefficients in `F_p`;
//! callers then reduce `a` through the field modulus.

use std::collections::BTreeMap;

use crate::error::{Error, Result};

const MAX_EXPONENT: u32 = 4096;

/// Sparse polynomial over `F_p`: `(exp_a, exp_T) -> coefficient`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub(crate) struct Sparse {
    pub terms: BTreeMap<(u32, u32), u32>,
}

impl Sparse {
    fn constant(c: u32, p: u32) -> Self {
        let mut s = Sparse::default();
        if !c.is_multiple_of(p) {
            s.terms.insert((0, 0), c % p);
        }
        s
    }

    fn monomial(ea: u32, et: u32) -> Self {
        let mut s = Sparse::default();
        s.terms.insert((ea, et), 1);
        s
    }

    fn add(&self, other: &Sparse, p: u32, negate: bool) -> Sparse {
        let mut out = self.terms.clone();
        for (&key, &c) in &other.terms {
            let c = if negate { (p - c) % p } else { c };
            let e = out.entry(key).or_insert(0);
            *e = (*e + c) % p;
        }
        out.retain(|_, c| *c != 0);
        Sparse { terms: out }
    }

    fn mul(&self, other: &Sparse, p: u32) -> Sparse {
        let mut out: BTreeMap<(u32, u32), u32> = BTreeMap::new();
        for (&(a1, t1), &c1) in &self.terms {
            for (&(a2, t2), &c2) in &other.terms {
                let e = out.entry((a1 + a2, t1 + t2)).or_insert(0);
                *e = ((*e as u64 + c1 as u64 * c2 as u64) % p as u64) as u32;
            }
        }
        out.retain(|_, c| *c != 0);
        Sparse { terms: out }
    }

    fn pow(&self, e: u32, p: u32) -> Sparse {
        let mut acc = Sparse::constant(1, p);
        for _ in 0..e {
            acc = acc.mul(self, p);
        }
        acc
    }

    pub fn max_exp_a(&self) -> u32 {
        self.terms.keys().map(|k| k.0).max().unwrap_or(0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Num(u64),
    Var(char),
    Sym(char),
}

struct Parser<'s> {
    input: &'s str,
    toks: Vec<(Tok, usize, String)>,
    pos: usize,
    p: u32,
}

fn tokenize(input: &str, vars: &[char]) -> Result<Vec<(Tok, usize, String)>> {
    let mut out = Vec::new();
    let chars: Vec<(usize, char)> = input.char_indices().collect();
    let mut i = 0;
    while i < chars.len() {
        let (off, c) = chars[i];
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].1.is_ascii_digit() {
                i += 1;
            }
            let text: String = chars[start..i].iter().map(|x| x.1).collect();
            let n = text.parse::<u64>().map_err(|_| parse_err(input, &text, off))?;
            out.push((Tok::Num(n), off, text));
            continue;
        }
        if "+-*^()".contains(c) {
            out.push((Tok::Sym(c), off, c.to_string()));
            i += 1;
            continue;
        }
        if c.is_alphabetic() {
            let start = i;
            while i < chars.len() && chars[i].1.is_alphanumeric() {
                i += 1;
            }
            let text: String = chars[start..i].iter().map(|x| x.1).collect();
            let mut it = text.chars();
            match (it.next(), it.next()) {
                (Some(v), None) if vars.contains(&v) => out.push((Tok::Var(v), off, text)),
                _ => return Err(parse_err(input, &text, off)),
            }
            continue;
        }
        return Err(parse_err(input, &c.to_string(), off));
    }
    Ok(out)
}

fn parse_err(input: &str, token: &str, position: usize) -> Error {
    Error::Parse {
        input: input.to_string(),
        token: token.to_string(),
        position,
    }
}

impl<'s> Parser<'s> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.0)
    }

    fn err_here(&self) -> Error {
        match self.toks.get(self.pos) {
            Some((_, off, text)) => parse_err(self.input, text, *off),
            None => parse_err(self.input, "<end of input>", self.input.len()),
        }
    }

    fn expr(&mut self) -> Result<Sparse> {
        let mut negate = false;
        if let Some(Tok::Sym(c @ ('+' | '-'))) = self.peek() {
            negate = *c == '-';
            self.pos += 1;
        }
        let first = self.term()?;
        let mut acc = Sparse::default().add(&first, self.p, negate);
        while let Some(Tok::Sym(c @ ('+' | '-'))) = self.peek() {
            let neg = *c == '-';
            self.pos += 1;
            let t = self.term()?;
            acc = acc.add(&t, self.p, neg);
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<Sparse> {
        let mut acc = self.factor()?;
        while let Some(Tok::Sym('*')) = self.peek() {
            self.pos += 1;
            let f = self.factor()?;
            acc = acc.mul(&f, self.p);
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Sparse> {
        let base = self.atom()?;
        if let Some(Tok::Sym('^')) = self.peek() {
            self.pos += 1;
            match self.peek() {
                Some(Tok::Num(e)) if *e <= MAX_EXPONENT as u64 => {
                    let e = *e as u32;
                    self.pos += 1;
                    return Ok(base.pow(e, self.p));
                }
                _ => return Err(self.err_here()),
            }
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Sparse> {
        match self.peek().cloned() {
            Some(Tok::Num(n)) => {
                self.pos += 1;
                Ok(Sparse::constant((n % self.p as u64) as u32, self.p))
            }
            Some(Tok::Var('a')) => {
                self.pos += 1;
                Ok(Sparse::monomial(1, 0))
            }
            Some(Tok::Var(_)) => {
                self.pos += 1;
                Ok(Sparse::monomial(0, 1))
            }
            Some(Tok::Sym('(')) => {
                self.pos += 1;
                let inner = self.expr()?;
                match self.peek() {
                    Some(Tok::Sym(')')) => {
                        self.pos += 1;
                        Ok(inner)
                    }
                    _ => Err(self.err_here()),
                }
            }
            _ => Err(self.err_here()),
        }
    }
}

/// Parse `input` over `F_p`. `vars` lists the admissible variable names;
/// `'a'` always denotes the field generator, any other admissible name
/// denotes the polynomial indeterminate.
pub(crate) fn parse_sparse(input: &str, p: u32, vars: &[char]) -> Result<Sparse> {
    let toks = tokenize(input, vars)?;
    if toks.is_empty() {
        return Err(parse_err(input, "<empty>", 0));
    }
    let mut parser = Parser {
        input,
        toks,
        pos: 0,
        p,
    };
    let out = parser.expr()?;
    if parser.pos != parser.toks.len() {
        return Err(parser.err_here());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_simple_poly() {
        let s = parse_sparse("T^3+2*T+1", 3, &['T']).unwrap();
        assert_eq!(s.terms.get(&(0, 3)), Some(&1));
        assert_eq!(s.terms.get(&(0, 1)), Some(&2));
        assert_eq!(s.terms.get(&(0, 0)), Some(&1));
    }

    #[test]
    fn reduces_mod_p_and_cancels() {
        let s = parse_sparse("(T+1)*(T+2)", 3, &['T']).unwrap();
        // T^2 + 3T + 2 = T^2 + 2
        assert_eq!(s.terms.len(), 2);
        assert_eq!(s.terms.get(&(0, 0)), Some(&2));
        let z = parse_sparse("T - T", 5, &['T']).unwrap();
        assert!(z.terms.is_empty());
    }

    #[test]
    fn generator_terms() {
        let s = parse_sparse("(a+1)*T^2+a", 2, &['a', 'T']).unwrap();
        assert_eq!(s.terms.get(&(1, 2)), Some(&1));
        assert_eq!(s.terms.get(&(0, 2)), Some(&1));
        assert_eq!(s.terms.get(&(1, 0)), Some(&1));
    }

    #[test]
    fn error_names_token() {
        match parse_sparse("T^2+Y", 3, &['T']) {
            Err(Error::Parse { token, position, .. }) => {
                assert_eq!(token, "Y");
                assert_eq!(position, 4);
            }
            other => panic!("unexpected {other:?}"),
        }
        match parse_sparse("T^2+", 3, &['T']) {
            Err(Error::Parse { token, .. }) => assert_eq!(token, "<end of input>"),
            other => panic!("unexpected {other:?}"),
        }
        assert!(parse_sparse("a+T", 3, &['T']).is_err());
    }
}
