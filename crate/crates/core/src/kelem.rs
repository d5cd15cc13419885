//! Elements of `K = F_q(T)` in lowest terms, plus the little dense `K[Y]`
//! arithmetic used by the special-polynomial machinery.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::gf::{FieldCtx, GfElem};
use crate::poly::PolyRing;
use crate::tpoly::{format_tpoly, parse_tpoly, TPoly};

/// `num/den` with `gcd(num, den) = 1` and `den` monic; zero is `0/1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct KElem {
    num: TPoly,
    den: TPoly,
}

impl KElem {
    pub fn num(&self) -> &TPoly {
        &self.num
    }

    pub fn den(&self) -> &TPoly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_integral(&self) -> bool {
        self.den.len() == 1
    }
}

/// Degree of the numerator, degree of the denominator, then coefficients.
impl Ord for KElem {
    fn cmp(&self, other: &Self) -> Ordering {
        self.num
            .degree_i64()
            .cmp(&other.num.degree_i64())
            .then(self.den.degree_i64().cmp(&other.den.degree_i64()))
            .then_with(|| self.num.cmp(&other.num))
            .then_with(|| self.den.cmp(&other.den))
    }
}

impl PartialOrd for KElem {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Arithmetic in `K` over a fixed `F_q`.
#[derive(Clone, Copy)]
pub struct KField<'a> {
    ctx: &'a FieldCtx,
}

impl<'a> KField<'a> {
    pub fn new(ctx: &'a FieldCtx) -> Self {
        KField { ctx }
    }

    pub fn ctx(&self) -> &'a FieldCtx {
        self.ctx
    }

    fn ring(&self) -> PolyRing<'a, FieldCtx> {
        PolyRing::new(self.ctx)
    }

    pub fn make(&self, num: TPoly, den: TPoly) -> Result<KElem> {
        if den.is_zero() {
            return Err(Error::domain("zero denominator"));
        }
        let r = self.ring();
        if num.is_zero() {
            return Ok(self.zero());
        }
        let g = r.gcd(&num, &den);
        let num = r.div_exact(&num, &g)?;
        let den = r.div_exact(&den, &g)?;
        let (lc, den) = r.make_monic(&den);
        let num = r.scale(&num, &self.ctx.inv(lc)?);
        Ok(KElem { num, den })
    }

    pub fn from_t(&self, a: TPoly) -> KElem {
        KElem {
            num: a,
            den: self.ring().one(),
        }
    }

    pub fn constant(&self, c: GfElem) -> KElem {
        self.from_t(self.ring().constant(c))
    }

    pub fn zero(&self) -> KElem {
        self.from_t(self.ring().zero())
    }

    pub fn one(&self) -> KElem {
        self.from_t(self.ring().one())
    }

    pub fn add(&self, a: &KElem, b: &KElem) -> KElem {
        let r = self.ring();
        if a.den == b.den {
            return self.make(r.add(&a.num, &b.num), a.den.clone()).expect("nonzero");
        }
        let num = r.add(&r.mul(&a.num, &b.den), &r.mul(&b.num, &a.den));
        self.make(num, r.mul(&a.den, &b.den)).expect("nonzero")
    }

    pub fn neg(&self, a: &KElem) -> KElem {
        KElem {
            num: self.ring().neg(&a.num),
            den: a.den.clone(),
        }
    }

    pub fn sub(&self, a: &KElem, b: &KElem) -> KElem {
        self.add(a, &self.neg(b))
    }

    pub fn mul(&self, a: &KElem, b: &KElem) -> KElem {
        let r = self.ring();
        if a.is_integral() && b.is_integral() {
            return self.from_t(r.scale(
                &r.mul(&a.num, &b.num),
                &self.ctx.mul(a.den.coeffs()[0], b.den.coeffs()[0]),
            ));
        }
        self.make(r.mul(&a.num, &b.num), r.mul(&a.den, &b.den))
            .expect("nonzero")
    }

    pub fn inv(&self, a: &KElem) -> Result<KElem> {
        if a.is_zero() {
            return Err(Error::domain("inverse of zero in F_q(T)"));
        }
        self.make(a.den.clone(), a.num.clone())
    }

    pub fn div(&self, a: &KElem, b: &KElem) -> Result<KElem> {
        Ok(self.mul(a, &self.inv(b)?))
    }

    pub fn pow(&self, a: &KElem, e: u64) -> KElem {
        let r = self.ring();
        KElem {
            num: r.pow(&a.num, e),
            den: r.pow(&a.den, e),
        }
    }

    pub fn scale(&self, a: &KElem, c: GfElem) -> KElem {
        self.mul(a, &self.constant(c))
    }

    pub fn format(&self, a: &KElem) -> String {
        let num = format_tpoly(self.ctx, &a.num);
        if a.is_integral() {
            return num;
        }
        format!("({num})/({})", format_tpoly(self.ctx, &a.den))
    }

    /// Parse `num` or `num/den`, each a `T`-polynomial literal.
    pub fn parse(&self, s: &str) -> Result<KElem> {
        match split_fraction(s) {
            Some((n, d)) => self.make(parse_tpoly(self.ctx, n)?, parse_tpoly(self.ctx, d)?),
            None => Ok(self.from_t(parse_tpoly(self.ctx, s)?)),
        }
    }
}

/// Split at a top-level `/`, ignoring any inside parentheses.
fn split_fraction(s: &str) -> Option<(&str, &str)> {
    let mut depth = 0i32;
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            '/' if depth == 0 => return Some((&s[..i], &s[i + 1..])),
            _ => {}
        }
    }
    None
}

/// Dense polynomial in one variable over `K`, constant term first.
pub type KPoly = Vec<KElem>;

impl KField<'_> {
    pub fn kpoly_trim(&self, mut a: KPoly) -> KPoly {
        while a.last().is_some_and(|c| c.is_zero()) {
            a.pop();
        }
        a
    }

    pub fn kpoly_add(&self, a: &KPoly, b: &KPoly) -> KPoly {
        let n = a.len().max(b.len());
        let out = (0..n)
            .map(|i| match (a.get(i), b.get(i)) {
                (Some(x), Some(y)) => self.add(x, y),
                (Some(x), None) | (None, Some(x)) => x.clone(),
                (None, None) => unreachable!(),
            })
            .collect();
        self.kpoly_trim(out)
    }

    pub fn kpoly_scale(&self, a: &KPoly, c: &KElem) -> KPoly {
        self.kpoly_trim(a.iter().map(|x| self.mul(x, c)).collect())
    }

    pub fn kpoly_mul(&self, a: &KPoly, b: &KPoly) -> KPoly {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![self.zero(); a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                out[i + j] = self.add(&out[i + j], &self.mul(x, y));
            }
        }
        self.kpoly_trim(out)
    }

    /// `sum c_i L^i` for a polynomial `L`, by Horner.
    pub fn kpoly_compose(&self, coeffs: &[KElem], l: &KPoly) -> KPoly {
        let mut acc: KPoly = Vec::new();
        for c in coeffs.iter().rev() {
            acc = self.kpoly_mul(&acc, l);
            acc = self.kpoly_add(&acc, &vec![c.clone()]);
        }
        acc
    }

    pub fn kpoly_eval(&self, coeffs: &[KElem], x: &KElem) -> KElem {
        coeffs
            .iter()
            .rev()
            .fold(self.zero(), |acc, c| self.add(&self.mul(&acc, x), c))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lowest_terms_and_monic_denominator() {
        let f3 = FieldCtx::prime(3).unwrap();
        let k = KField::new(&f3);
        let a = k.parse("(T^2+2)/(2*T+2)").unwrap();
        // (T+1)(T+2) / 2(T+1) = (T+2)/2 = 2T+1
        assert!(a.is_integral());
        assert_eq!(k.format(&a), "2*T+1");
        let b = k.parse("1/(T+1)").unwrap();
        let c = k.add(&b, &b);
        assert_eq!(k.format(&c), "(2)/(T+1)");
        assert!(k.is_zero_sum(&c, &k.neg(&c)));
    }

    #[test]
    fn order_is_degree_first() {
        let f2 = FieldCtx::prime(2).unwrap();
        let k = KField::new(&f2);
        let mut v = [k.parse("T").unwrap(), k.parse("1").unwrap(), k.parse("1/T").unwrap()];
        v.sort();
        let s: Vec<String> = v.iter().map(|x| k.format(x)).collect();
        assert_eq!(s, vec!["1", "(1)/(T)", "T"]);
    }

    impl KField<'_> {
        fn is_zero_sum(&self, a: &KElem, b: &KElem) -> bool {
            self.add(a, b).is_zero()
        }
    }
}
