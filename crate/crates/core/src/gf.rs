//! Arithmetic in `F_q`, `q = p^k`, realised as `F_p[a]/(modulus)`.
//!
//! Elements are packed as base-`p` digit strings: the element
//! `c_0 + c_1 a + ... + c_{k-1} a^{k-1}` has index `sum c_i p^i`. All
//! operations go through precomputed tables, so `q` is capped at
//! [`MAX_Q`].

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::FiniteField;
use crate::literal;

/// Largest supported field order.
pub const MAX_Q: u32 = 1024;

/// An element of `F_q`, stored by its digit index.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[repr(transparent)]
pub struct GfElem(u32);

impl GfElem {
    pub const ZERO: GfElem = GfElem(0);
    pub const ONE: GfElem = GfElem(1);

    pub fn index(self) -> u32 {
        self.0
    }

    pub fn from_index(i: u32) -> Self {
        GfElem(i)
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

#[derive(Clone)]
pub struct FieldCtx {
    p: u32,
    k: u32,
    q: u32,
    /// Monic, `k + 1` coefficients, constant term first. `[0, 1]` when `k = 1`.
    modulus: Vec<u32>,
    add_t: Vec<u32>,
    sub_t: Vec<u32>,
    mul_t: Vec<u32>,
    inv_t: Vec<u32>,
    root_t: Vec<u32>,
}

impl fmt::Debug for FieldCtx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FieldCtx")
            .field("p", &self.p)
            .field("k", &self.k)
            .field("modulus", &self.modulus)
            .finish()
    }
}

impl PartialEq for FieldCtx {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.k == other.k && self.modulus == other.modulus
    }
}

impl Eq for FieldCtx {}

pub(crate) fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

pub(crate) fn prime_divisors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

// ---- dense F_p[a] helpers used only while building the tables ----

fn fp_trim(v: &mut Vec<u32>) {
    while v.last() == Some(&0) {
        v.pop();
    }
}

fn fp_rem(a: &[u32], m: &[u32], p: u32) -> Vec<u32> {
    let mut r = a.to_vec();
    fp_trim(&mut r);
    let dm = m.len() - 1;
    let lc_inv = fp_inv(m[dm], p);
    while r.len() > dm {
        let top = r.len() - 1;
        let c = r[top] * lc_inv % p;
        if c != 0 {
            for (j, &mj) in m.iter().enumerate() {
                let idx = top - dm + j;
                r[idx] = (r[idx] + p - c * mj % p) % p;
            }
        }
        fp_trim(&mut r);
    }
    r
}

fn fp_inv(a: u32, p: u32) -> u32 {
    let mut r = 1u64;
    let mut b = a as u64 % p as u64;
    let mut e = p as u64 - 2;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p as u64;
        }
        b = b * b % p as u64;
        e >>= 1;
    }
    r as u32
}

/// Trial division by every monic polynomial of degree `1..=deg/2`.
fn fp_is_irreducible(m: &[u32], p: u32) -> bool {
    let deg = m.len() - 1;
    if deg <= 1 {
        return deg == 1;
    }
    for d in 1..=deg / 2 {
        let count = (p as u64).pow(d as u32);
        for idx in 0..count {
            let mut cand = vec![0u32; d + 1];
            let mut x = idx;
            for c in cand.iter_mut().take(d) {
                *c = (x % p as u64) as u32;
                x /= p as u64;
            }
            cand[d] = 1;
            if fp_rem(m, &cand, p).is_empty() {
                return false;
            }
        }
    }
    true
}

/// First monic irreducible of degree `k` in enumeration order
/// (index `sum c_i p^i`, constant coefficient varying fastest).
fn default_modulus(p: u32, k: u32) -> Vec<u32> {
    let count = (p as u64).pow(k);
    for idx in 0..count {
        let mut cand = vec![0u32; k as usize + 1];
        let mut x = idx;
        for c in cand.iter_mut().take(k as usize) {
            *c = (x % p as u64) as u32;
            x /= p as u64;
        }
        cand[k as usize] = 1;
        if fp_is_irreducible(&cand, p) {
            return cand;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

impl FieldCtx {
    /// The prime field `F_p`.
    pub fn prime(p: u32) -> Result<Self> {
        Self::new(p, 1, None)
    }

    /// `F_{p^k}`; `modulus` (constant first, monic, degree `k`) defaults to
    /// the first irreducible in enumeration order.
    pub fn new(p: u32, k: u32, modulus: Option<Vec<u32>>) -> Result<Self> {
        if !is_prime(p as u64) {
            return Err(Error::validation(format!("characteristic {p} is not prime")));
        }
        if k == 0 {
            return Err(Error::validation("extension degree must be at least 1"));
        }
        let q = (p as u64)
            .checked_pow(k)
            .filter(|&q| q <= MAX_Q as u64)
            .ok_or_else(|| Error::validation(format!("q = {p}^{k} exceeds the supported maximum {MAX_Q}")))?
            as u32;
        let modulus = match (k, modulus) {
            (1, _) => vec![0, 1],
            (_, Some(m)) => {
                let m: Vec<u32> = m.into_iter().map(|c| c % p).collect();
                if m.len() != k as usize + 1 || m[k as usize] != 1 {
                    return Err(Error::validation(format!(
                        "modulus must be monic of degree {k}"
                    )));
                }
                if !fp_is_irreducible(&m, p) {
                    return Err(Error::validation("modulus is reducible over F_p"));
                }
                m
            }
            (_, None) => default_modulus(p, k),
        };
        let mut ctx = FieldCtx {
            p,
            k,
            q,
            modulus,
            add_t: Vec::new(),
            sub_t: Vec::new(),
            mul_t: Vec::new(),
            inv_t: Vec::new(),
            root_t: Vec::new(),
        };
        ctx.build_tables();
        Ok(ctx)
    }

    fn digits(&self, i: u32) -> Vec<u32> {
        let mut out = Vec::with_capacity(self.k as usize);
        let mut x = i;
        for _ in 0..self.k {
            out.push(x % self.p);
            x /= self.p;
        }
        out
    }

    fn undigits(&self, d: &[u32]) -> u32 {
        d.iter().rev().fold(0, |acc, &c| acc * self.p + c)
    }

    fn build_tables(&mut self) {
        let q = self.q as usize;
        let p = self.p;
        let digits: Vec<Vec<u32>> = (0..self.q).map(|i| self.digits(i)).collect();
        let mut add_t = vec![0u32; q * q];
        let mut sub_t = vec![0u32; q * q];
        let mut mul_t = vec![0u32; q * q];
        for a in 0..q {
            for b in 0..q {
                let s: Vec<u32> = digits[a].iter().zip(&digits[b]).map(|(x, y)| (x + y) % p).collect();
                let d: Vec<u32> = digits[a]
                    .iter()
                    .zip(&digits[b])
                    .map(|(x, y)| (x + p - y) % p)
                    .collect();
                add_t[a * q + b] = self.undigits(&s);
                sub_t[a * q + b] = self.undigits(&d);
                let mut prod = vec![0u32; 2 * self.k as usize];
                for (i, &x) in digits[a].iter().enumerate() {
                    for (j, &y) in digits[b].iter().enumerate() {
                        prod[i + j] = (prod[i + j] + x * y) % p;
                    }
                }
                let mut r = fp_rem(&prod, &self.modulus, p);
                r.resize(self.k as usize, 0);
                mul_t[a * q + b] = self.undigits(&r);
            }
        }
        let mut inv_t = vec![0u32; q];
        for a in 1..q {
            for b in 1..q {
                if mul_t[a * q + b] == 1 {
                    inv_t[a] = b as u32;
                    break;
                }
            }
        }
        // Frobenius x -> x^p is a bijection; invert it.
        let mut root_t = vec![0u32; q];
        for a in 0..q {
            let mut x = 1u32;
            for _ in 0..p {
                x = mul_t[x as usize * q + a];
            }
            root_t[x as usize] = a as u32;
        }
        self.add_t = add_t;
        self.sub_t = sub_t;
        self.mul_t = mul_t;
        self.inv_t = inv_t;
        self.root_t = root_t;
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    /// Coordinates of `x` in the basis `1, a, ..., a^{k-1}`.
    pub fn coords(&self, x: GfElem) -> Vec<u32> {
        self.digits(x.0)
    }

    pub fn from_coords(&self, c: &[u32]) -> Result<GfElem> {
        if c.len() > self.k as usize || c.iter().any(|&x| x >= self.p) {
            return Err(Error::validation(format!("invalid coordinates {c:?} for F_{}", self.q)));
        }
        Ok(GfElem(self.undigits(c)))
    }

    /// The class of `a` in `F_p[a]/(modulus)`. Only meaningful for `k > 1`.
    pub fn generator(&self) -> GfElem {
        if self.k == 1 {
            GfElem(0)
        } else {
            GfElem(self.p)
        }
    }

    pub fn elem(&self, n: u64) -> GfElem {
        GfElem((n % self.p as u64) as u32)
    }

    /// All `q` elements in index order.
    pub fn enumerate_all(&self) -> impl Iterator<Item = GfElem> {
        (0..self.q).map(GfElem)
    }

    #[inline]
    pub fn add(&self, a: GfElem, b: GfElem) -> GfElem {
        GfElem(self.add_t[(a.0 * self.q + b.0) as usize])
    }

    #[inline]
    pub fn sub(&self, a: GfElem, b: GfElem) -> GfElem {
        GfElem(self.sub_t[(a.0 * self.q + b.0) as usize])
    }

    #[inline]
    pub fn neg(&self, a: GfElem) -> GfElem {
        self.sub(GfElem::ZERO, a)
    }

    #[inline]
    pub fn mul(&self, a: GfElem, b: GfElem) -> GfElem {
        GfElem(self.mul_t[(a.0 * self.q + b.0) as usize])
    }

    pub fn inv(&self, a: GfElem) -> Result<GfElem> {
        if a.is_zero() {
            Err(Error::domain("inverse of zero in F_q"))
        } else {
            Ok(GfElem(self.inv_t[a.0 as usize]))
        }
    }

    pub fn pow(&self, a: GfElem, e: u64) -> GfElem {
        FiniteField::pow(self, &a, e)
    }

    /// Multiplicative order of a nonzero element.
    pub fn order(&self, a: GfElem) -> Option<u64> {
        if a.is_zero() {
            return None;
        }
        let n = self.q as u64 - 1;
        let mut ord = n;
        for r in prime_divisors(n) {
            while ord.is_multiple_of(r) && self.pow(a, ord / r) == GfElem::ONE {
                ord /= r;
            }
        }
        Some(ord)
    }

    /// The first element (in index order) of exact multiplicative order
    /// `m`, or `None` when `m` does not divide `q - 1`.
    pub fn root_of_unity(&self, m: u64) -> Option<GfElem> {
        if m == 0 || !(self.q as u64 - 1).is_multiple_of(m) {
            return None;
        }
        self.enumerate_all()
            .skip(1)
            .find(|&x| self.order(x) == Some(m))
    }

    /// Human-readable form: `2`, `a+1`, `2*a^2+a`.
    pub fn format_elem(&self, x: GfElem) -> String {
        let c = self.coords(x);
        let mut terms = Vec::new();
        for (i, &ci) in c.iter().enumerate().rev() {
            if ci == 0 {
                continue;
            }
            let mono = match i {
                0 => String::new(),
                1 => "a".to_string(),
                _ => format!("a^{i}"),
            };
            terms.push(match (ci, mono.is_empty()) {
                (_, true) => ci.to_string(),
                (1, false) => mono,
                (_, false) => format!("{ci}*{mono}"),
            });
        }
        if terms.is_empty() {
            "0".to_string()
        } else {
            terms.join("+")
        }
    }

    /// Textual field description in the literal grammar.
    pub fn describe(&self) -> String {
        if self.k == 1 {
            self.p.to_string()
        } else {
            let m: Vec<String> = {
                let mut terms = Vec::new();
                for (i, &c) in self.modulus.iter().enumerate().rev() {
                    if c == 0 {
                        continue;
                    }
                    let mono = match i {
                        0 => String::new(),
                        1 => "a".into(),
                        _ => format!("a^{i}"),
                    };
                    terms.push(match (c, mono.is_empty()) {
                        (_, true) => c.to_string(),
                        (1, false) => mono,
                        (_, false) => format!("{c}*{mono}"),
                    });
                }
                terms
            };
            format!("{}^{} modulus=\"{}\"", self.p, self.k, m.join("+"))
        }
    }

    /// Parse the field literal grammar: `p`, `p^k`, optionally followed by
    /// `modulus="a^2+a+1"`. An explicit `modulus` argument takes precedence.
    pub fn parse(spec: &str, modulus: Option<&str>) -> Result<Self> {
        let spec = spec.trim();
        let (head, inline_mod) = match spec.find("modulus") {
            Some(i) => {
                let rest = spec[i + "modulus".len()..].trim_start();
                let rest = rest
                    .strip_prefix('=')
                    .ok_or_else(|| parse_field_err(spec, "modulus"))?
                    .trim()
                    .trim_matches('"');
                (spec[..i].trim().trim_end_matches([',', ';']).trim(), Some(rest.to_string()))
            }
            None => (spec, None),
        };
        let (p_str, k_str) = match head.split_once('^') {
            Some((a, b)) => (a.trim(), b.trim()),
            None => (head, "1"),
        };
        let p: u32 = p_str.parse().map_err(|_| parse_field_err(spec, p_str))?;
        let k: u32 = k_str.parse().map_err(|_| parse_field_err(spec, k_str))?;
        if !is_prime(p as u64) {
            return Err(Error::validation(format!(
                "field literal `{spec}`: {p} is not prime; write prime powers as p^k"
            )));
        }
        let mod_text = modulus.map(str::to_string).or(inline_mod);
        let modulus = match mod_text {
            None => None,
            Some(text) => {
                let s = literal::parse_sparse(&text, p, &['a'])?;
                let deg = s.max_exp_a() as usize;
                let mut m = vec![0u32; deg + 1];
                for ((ea, _), c) in s.terms {
                    m[ea as usize] = c;
                }
                Some(m)
            }
        };
        Self::new(p, k, modulus)
    }
}

fn parse_field_err(spec: &str, token: &str) -> Error {
    Error::Parse {
        input: spec.to_string(),
        token: token.to_string(),
        position: spec.find(token).unwrap_or(0),
    }
}

impl FiniteField for FieldCtx {
    type Elem = GfElem;

    #[inline]
    fn zero(&self) -> GfElem {
        GfElem::ZERO
    }

    #[inline]
    fn one(&self) -> GfElem {
        GfElem::ONE
    }

    #[inline]
    fn is_zero(&self, a: &GfElem) -> bool {
        a.0 == 0
    }

    #[inline]
    fn add(&self, a: &GfElem, b: &GfElem) -> GfElem {
        FieldCtx::add(self, *a, *b)
    }

    #[inline]
    fn sub(&self, a: &GfElem, b: &GfElem) -> GfElem {
        FieldCtx::sub(self, *a, *b)
    }

    #[inline]
    fn neg(&self, a: &GfElem) -> GfElem {
        FieldCtx::neg(self, *a)
    }

    #[inline]
    fn mul(&self, a: &GfElem, b: &GfElem) -> GfElem {
        FieldCtx::mul(self, *a, *b)
    }

    fn inv(&self, a: &GfElem) -> Option<GfElem> {
        FieldCtx::inv(self, *a).ok()
    }

    fn characteristic(&self) -> u32 {
        self.p
    }

    fn prime_degree(&self) -> u32 {
        self.k
    }

    fn random_elem<R: Rng + ?Sized>(&self, rng: &mut R) -> GfElem {
        GfElem(rng.gen_range(0..self.q))
    }

    fn pth_root(&self, a: &GfElem) -> GfElem {
        GfElem(self.root_t[a.0 as usize])
    }

    fn from_u64(&self, n: u64) -> GfElem {
        self.elem(n)
    }

    fn sub_mul_assign(&self, dst: &mut [GfElem], src: &[GfElem], c: &GfElem) {
        if c.0 == 0 {
            return;
        }
        let q = self.q as usize;
        let row = &self.mul_t[c.0 as usize * q..(c.0 as usize + 1) * q];
        if self.p == 2 {
            // Addition in characteristic 2 is XOR of the digit strings.
            for (d, s) in dst.iter_mut().zip(src) {
                d.0 ^= row[s.0 as usize];
            }
        } else {
            for (d, s) in dst.iter_mut().zip(src) {
                d.0 = self.sub_t[d.0 as usize * q + row[s.0 as usize] as usize];
            }
        }
    }

    fn add_mul_assign(&self, dst: &mut [GfElem], src: &[GfElem], c: &GfElem) {
        if c.0 == 0 {
            return;
        }
        let q = self.q as usize;
        let row = &self.mul_t[c.0 as usize * q..(c.0 as usize + 1) * q];
        if self.p == 2 {
            for (d, s) in dst.iter_mut().zip(src) {
                d.0 ^= row[s.0 as usize];
            }
        } else {
            for (d, s) in dst.iter_mut().zip(src) {
                d.0 = self.add_t[d.0 as usize * q + row[s.0 as usize] as usize];
            }
        }
    }
}

/// Serialized view of a field: enough to rebuild the context.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct FieldSpec {
    pub p: u32,
    pub k: u32,
    pub modulus: Vec<u32>,
}

impl From<&FieldCtx> for FieldSpec {
    fn from(ctx: &FieldCtx) -> Self {
        FieldSpec {
            p: ctx.p,
            k: ctx.k,
            modulus: ctx.modulus.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_field_mul() {
        let f3 = FieldCtx::prime(3).unwrap();
        assert_eq!(f3.mul(f3.elem(2), f3.elem(2)), f3.elem(1));
    }

    #[test]
    fn f4_generator_squares_to_a_plus_one() {
        let f4 = FieldCtx::new(2, 2, None).unwrap();
        assert_eq!(f4.modulus(), &[1, 1, 1]);
        let a = f4.generator();
        assert_eq!(f4.format_elem(f4.mul(a, a)), "a+1");
    }

    #[test]
    fn f9_nonzero_elements_satisfy_x8() {
        let f9 = FieldCtx::new(3, 2, None).unwrap();
        assert_eq!(f9.modulus(), &[1, 0, 1]);
        let all: Vec<_> = f9.enumerate_all().collect();
        assert_eq!(all.len(), 9);
        for x in all.into_iter().skip(1) {
            assert_eq!(f9.pow(x, 8), GfElem::ONE);
        }
    }

    #[test]
    fn field_axioms_exhaustive_small() {
        for (p, k) in [(2, 1), (3, 1), (2, 2), (3, 2), (5, 1), (2, 3), (3, 4)] {
            let f = FieldCtx::new(p, k, None).unwrap();
            let els: Vec<_> = f.enumerate_all().collect();
            let uniq: std::collections::HashSet<_> = els.iter().collect();
            assert_eq!(uniq.len(), f.q() as usize);
            for &x in &els {
                if !x.is_zero() {
                    let xi = f.inv(x).unwrap();
                    assert_eq!(f.mul(x, xi), GfElem::ONE);
                    assert_eq!(f.inv(f.mul(x, xi)).unwrap(), GfElem::ONE);
                }
                for &y in els.iter().step_by(3) {
                    assert_eq!(f.add(x, y), f.add(y, x));
                    assert_eq!(f.mul(x, y), f.mul(y, x));
                    assert_eq!(f.sub(f.add(x, y), y), x);
                    for &z in els.iter().step_by(7) {
                        assert_eq!(
                            f.mul(x, f.add(y, z)),
                            f.add(f.mul(x, y), f.mul(x, z))
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn inverse_of_zero_is_domain_error() {
        let f = FieldCtx::prime(5).unwrap();
        assert!(matches!(f.inv(GfElem::ZERO), Err(Error::Domain(_))));
    }

    #[test]
    fn roots_of_unity_examples() {
        let f3 = FieldCtx::prime(3).unwrap();
        assert_eq!(f3.root_of_unity(2), Some(f3.elem(2)));
        let f2 = FieldCtx::prime(2).unwrap();
        assert_eq!(f2.root_of_unity(3), None);
        let f7 = FieldCtx::prime(7).unwrap();
        let z = f7.root_of_unity(3).unwrap();
        // scan oracle: elements of exact order 3 in F_7 are 2 and 4
        let scan: Vec<u32> = (1..7u32)
            .filter(|&x| (x * x * x) % 7 == 1 && x != 1)
            .collect();
        assert_eq!(scan, vec![2, 4]);
        assert_eq!(z.index(), 2);
        assert_eq!(f7.pow(z, 3), GfElem::ONE);
    }

    #[test]
    fn root_of_unity_exhaustive() {
        for (p, k) in [(2, 1), (3, 1), (2, 2), (5, 1), (7, 1), (3, 2), (2, 3), (2, 4), (3, 3), (3, 4)] {
            let f = FieldCtx::new(p, k, None).unwrap();
            let q = f.q() as u64;
            for m in 1..=q {
                match f.root_of_unity(m) {
                    Some(z) => {
                        assert_eq!((q - 1) % m, 0);
                        assert_eq!(f.pow(z, m), GfElem::ONE);
                        for j in 1..m {
                            assert_ne!(f.pow(z, j), GfElem::ONE, "q={q} m={m} j={j}");
                        }
                    }
                    None => assert_ne!((q - 1) % m, 0, "q={q} m={m}"),
                }
            }
        }
    }

    #[test]
    fn pth_root_inverts_frobenius() {
        let f = FieldCtx::new(3, 3, None).unwrap();
        for x in f.enumerate_all() {
            let r = FiniteField::pth_root(&f, &x);
            assert_eq!(f.pow(r, 3), x);
        }
    }

    #[test]
    fn parse_field_literals() {
        let f = FieldCtx::parse("3", None).unwrap();
        assert_eq!((f.p(), f.k(), f.q()), (3, 1, 3));
        let f = FieldCtx::parse("2^2", None).unwrap();
        assert_eq!(f.q(), 4);
        let f = FieldCtx::parse("3^2 modulus=\"a^2+a+2\"", None).unwrap();
        assert_eq!(f.modulus(), &[2, 1, 1]);
        let f = FieldCtx::parse("3^2", Some("a^2+2*a+2")).unwrap();
        assert_eq!(f.modulus(), &[2, 2, 1]);
        assert!(matches!(
            FieldCtx::parse("3^2", Some("a^2+a+1")),
            Err(Error::Validation(_))
        ));
        assert!(FieldCtx::parse("9", None).is_err());
        assert!(matches!(FieldCtx::parse("x^2", None), Err(Error::Parse { .. })));
    }
}
