//! Dense univariate polynomials over a [`FiniteField`].
//!
//! [`Poly`] is a plain coefficient vector (constant term first, no
//! trailing zeros); every operation that needs field arithmetic lives on
//! [`PolyRing`], which borrows the field. The same code serves `F_q[T]`
//! and `(F_q[T]/P)[X]`.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use rand::Rng;

use crate::error::{Error, Result};
use crate::field::FiniteField;
use crate::gf::prime_divisors;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Poly<E> {
    coeffs: Vec<E>,
}

impl<E> Poly<E> {
    pub fn coeffs(&self) -> &[E] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<E> {
        self.coeffs
    }

    /// `None` for the zero polynomial (degree `-inf`).
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Degree with the zero polynomial mapped to `-1`.
    pub fn degree_i64(&self) -> i64 {
        self.coeffs.len() as i64 - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn lead(&self) -> Option<&E> {
        self.coeffs.last()
    }

    pub fn coeff(&self, i: usize) -> Option<&E> {
        self.coeffs.get(i)
    }
}

/// Degree first, then coefficients from the top down. For `F_q[T]` this is
/// the enumeration order of [`crate::tpoly`] within each degree.
impl<E: Ord> Ord for Poly<E> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.coeffs
            .len()
            .cmp(&other.coeffs.len())
            .then_with(|| self.coeffs.iter().rev().cmp(other.coeffs.iter().rev()))
    }
}

impl<E: Ord> PartialOrd for Poly<E> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

pub struct PolyRing<'a, F: FiniteField> {
    field: &'a F,
}

impl<F: FiniteField> Clone for PolyRing<'_, F> {
    fn clone(&self) -> Self {
        *self
    }
}

impl<F: FiniteField> Copy for PolyRing<'_, F> {}

type P<F> = Poly<<F as FiniteField>::Elem>;

impl<'a, F: FiniteField> PolyRing<'a, F> {
    pub fn new(field: &'a F) -> Self {
        PolyRing { field }
    }

    pub fn field(&self) -> &'a F {
        self.field
    }

    /// Build a polynomial, trimming trailing zeros.
    pub fn poly(&self, mut coeffs: Vec<F::Elem>) -> P<F> {
        while coeffs.last().is_some_and(|c| self.field.is_zero(c)) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn zero(&self) -> P<F> {
        Poly { coeffs: Vec::new() }
    }

    pub fn one(&self) -> P<F> {
        self.constant(self.field.one())
    }

    pub fn constant(&self, c: F::Elem) -> P<F> {
        self.poly(vec![c])
    }

    pub fn monomial(&self, c: F::Elem, n: usize) -> P<F> {
        let mut v = vec![self.field.zero(); n + 1];
        v[n] = c;
        self.poly(v)
    }

    pub fn x(&self) -> P<F> {
        self.monomial(self.field.one(), 1)
    }

    pub fn is_one(&self, a: &P<F>) -> bool {
        a.coeffs.len() == 1 && self.field.is_one(&a.coeffs[0])
    }

    pub fn add(&self, a: &P<F>, b: &P<F>) -> P<F> {
        let n = a.len().max(b.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            out.push(match (a.coeffs.get(i), b.coeffs.get(i)) {
                (Some(x), Some(y)) => self.field.add(x, y),
                (Some(x), None) => x.clone(),
                (None, Some(y)) => y.clone(),
                (None, None) => unreachable!(),
            });
        }
        self.poly(out)
    }

    pub fn sub(&self, a: &P<F>, b: &P<F>) -> P<F> {
        let n = a.len().max(b.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            out.push(match (a.coeffs.get(i), b.coeffs.get(i)) {
                (Some(x), Some(y)) => self.field.sub(x, y),
                (Some(x), None) => x.clone(),
                (None, Some(y)) => self.field.neg(y),
                (None, None) => unreachable!(),
            });
        }
        self.poly(out)
    }

    pub fn neg(&self, a: &P<F>) -> P<F> {
        Poly {
            coeffs: a.coeffs.iter().map(|c| self.field.neg(c)).collect(),
        }
    }

    pub fn scale(&self, a: &P<F>, c: &F::Elem) -> P<F> {
        if self.field.is_zero(c) {
            return self.zero();
        }
        Poly {
            coeffs: a.coeffs.iter().map(|x| self.field.mul(x, c)).collect(),
        }
    }

    pub fn mul(&self, a: &P<F>, b: &P<F>) -> P<F> {
        if a.is_zero() || b.is_zero() {
            return self.zero();
        }
        let (short, long) = if a.len() <= b.len() { (a, b) } else { (b, a) };
        let mut out = vec![self.field.zero(); a.len() + b.len() - 1];
        for (i, c) in short.coeffs.iter().enumerate() {
            self.field
                .add_mul_assign(&mut out[i..i + long.len()], &long.coeffs, c);
        }
        self.poly(out)
    }

    pub fn shift(&self, a: &P<F>, n: usize) -> P<F> {
        if a.is_zero() {
            return self.zero();
        }
        let mut v = vec![self.field.zero(); n];
        v.extend(a.coeffs.iter().cloned());
        Poly { coeffs: v }
    }

    pub fn pow(&self, a: &P<F>, mut e: u64) -> P<F> {
        let mut base = a.clone();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            e >>= 1;
            if e > 0 {
                base = self.mul(&base, &base);
            }
        }
        acc
    }

    /// `(s, r)` with `a = s*b + r`, `deg r < deg b`.
    pub fn divmod(&self, a: &P<F>, b: &P<F>) -> Result<(P<F>, P<F>)> {
        let db = b
            .degree()
            .ok_or_else(|| Error::domain("division by the zero polynomial"))?;
        let lc_inv = self
            .field
            .inv(b.lead().expect("nonzero"))
            .expect("leading coefficient is nonzero");
        if a.len() <= db {
            return Ok((self.zero(), a.clone()));
        }
        let mut r = a.coeffs.clone();
        let mut quot = vec![self.field.zero(); a.len() - db];
        for i in (db..r.len()).rev() {
            if self.field.is_zero(&r[i]) {
                continue;
            }
            let c = self.field.mul(&r[i], &lc_inv);
            self.field.sub_mul_assign(&mut r[i - db..=i], &b.coeffs, &c);
            quot[i - db] = c;
        }
        r.truncate(db);
        Ok((self.poly(quot), self.poly(r)))
    }

    pub fn rem(&self, a: &P<F>, b: &P<F>) -> Result<P<F>> {
        let db = b
            .degree()
            .ok_or_else(|| Error::domain("division by the zero polynomial"))?;
        if a.len() <= db {
            return Ok(a.clone());
        }
        let lc_inv = self.field.inv(b.lead().expect("nonzero")).expect("nonzero");
        let mut r = a.coeffs.clone();
        for i in (db..r.len()).rev() {
            if self.field.is_zero(&r[i]) {
                continue;
            }
            let c = self.field.mul(&r[i], &lc_inv);
            self.field.sub_mul_assign(&mut r[i - db..=i], &b.coeffs, &c);
        }
        r.truncate(db);
        Ok(self.poly(r))
    }

    /// Quotient of an exact division; a nonzero remainder is an error.
    pub fn div_exact(&self, a: &P<F>, b: &P<F>) -> Result<P<F>> {
        let (s, r) = self.divmod(a, b)?;
        if !r.is_zero() {
            return Err(Error::domain("inexact polynomial division"));
        }
        Ok(s)
    }

    pub fn divides(&self, d: &P<F>, a: &P<F>) -> Result<bool> {
        Ok(self.rem(a, d)?.is_zero())
    }

    /// Leading coefficient and monic associate. Zero maps to `(0, 0)`.
    pub fn make_monic(&self, a: &P<F>) -> (F::Elem, P<F>) {
        match a.lead() {
            None => (self.field.zero(), self.zero()),
            Some(lc) => {
                let inv = self.field.inv(lc).expect("nonzero");
                (lc.clone(), self.scale(a, &inv))
            }
        }
    }

    pub fn monic(&self, a: &P<F>) -> P<F> {
        self.make_monic(a).1
    }

    /// Monic gcd; `gcd(0, 0) = 0`.
    pub fn gcd(&self, a: &P<F>, b: &P<F>) -> P<F> {
        let mut x = a.clone();
        let mut y = b.clone();
        while !y.is_zero() {
            let r = self.rem(&x, &y).expect("nonzero divisor");
            x = y;
            y = r;
        }
        self.monic(&x)
    }

    pub fn lcm(&self, a: &P<F>, b: &P<F>) -> P<F> {
        if a.is_zero() || b.is_zero() {
            return self.zero();
        }
        let g = self.gcd(a, b);
        self.monic(&self.mul(&self.div_exact(a, &g).expect("gcd divides"), b))
    }

    pub fn derivative(&self, a: &P<F>) -> P<F> {
        if a.len() <= 1 {
            return self.zero();
        }
        let out = a
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| self.field.mul(&self.field.from_u64(i as u64), c))
            .collect();
        self.poly(out)
    }

    pub fn eval(&self, a: &P<F>, x: &F::Elem) -> F::Elem {
        let mut acc = self.field.zero();
        for c in a.coeffs.iter().rev() {
            acc = self.field.add(&self.field.mul(&acc, x), c);
        }
        acc
    }

    pub fn mulmod(&self, a: &P<F>, b: &P<F>, m: &P<F>) -> P<F> {
        self.rem(&self.mul(a, b), m).expect("nonzero modulus")
    }

    pub fn powmod(&self, a: &P<F>, mut e: u64, m: &P<F>) -> P<F> {
        let mut base = self.rem(a, m).expect("nonzero modulus");
        let mut acc = self.rem(&self.one(), m).expect("nonzero modulus");
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mulmod(&acc, &base, m);
            }
            e >>= 1;
            if e > 0 {
                base = self.mulmod(&base, &base, m);
            }
        }
        acc
    }

    /// `a^{|F|} mod m`, by repeated `p`-th powers.
    pub fn pow_order_mod(&self, a: &P<F>, m: &P<F>) -> P<F> {
        let p = self.field.characteristic() as u64;
        let e = self.field.prime_degree();
        match p.checked_pow(e) {
            Some(q) => self.powmod(a, q, m),
            None => {
                let mut r = self.rem(a, m).expect("nonzero modulus");
                for _ in 0..e {
                    r = self.powmod(&r, p, m);
                }
                r
            }
        }
    }

    /// `b` with `b^p = a`, when `a` only involves exponents divisible by `p`.
    pub fn pth_root_poly(&self, a: &P<F>) -> Option<P<F>> {
        let p = self.field.characteristic() as usize;
        let mut out = Vec::with_capacity(a.len() / p + 1);
        for (i, c) in a.coeffs.iter().enumerate() {
            if i % p == 0 {
                out.push(self.field.pth_root(c));
            } else if !self.field.is_zero(c) {
                return None;
            }
        }
        Some(self.poly(out))
    }

    /// Squarefree decomposition of a monic polynomial: pairs `(g_i, i)`
    /// with `a = prod g_i^i`, the `g_i` squarefree and pairwise coprime.
    /// The derivative-zero case is handled by extracting a `p`-th root.
    pub fn squarefree(&self, a: &P<F>) -> Vec<(P<F>, u32)> {
        let mut parts: BTreeMap<u32, P<F>> = BTreeMap::new();
        self.squarefree_into(a, 1, &mut parts);
        parts.into_iter().map(|(e, g)| (g, e)).collect()
    }

    fn squarefree_into(&self, a: &P<F>, mult: u32, out: &mut BTreeMap<u32, P<F>>) {
        if a.degree().unwrap_or(0) == 0 {
            return;
        }
        let p = self.field.characteristic();
        let d = self.derivative(a);
        if d.is_zero() {
            let root = self.pth_root_poly(a).expect("zero derivative implies p-th power");
            self.squarefree_into(&root, mult * p, out);
            return;
        }
        let mut c = self.gcd(a, &d);
        let mut w = self.div_exact(a, &c).expect("gcd divides");
        let mut i = 1u32;
        while !self.is_one(&w) {
            let y = self.gcd(&w, &c);
            let fac = self.div_exact(&w, &y).expect("gcd divides");
            if fac.degree().unwrap_or(0) > 0 {
                let entry = out.entry(i * mult).or_insert_with(|| self.one());
                *entry = self.mul(entry, &fac);
            }
            w = y;
            c = self.div_exact(&c, &w).expect("gcd divides");
            i += 1;
        }
        if c.degree().unwrap_or(0) > 0 {
            let root = self.pth_root_poly(&c).expect("remaining cofactor is a p-th power");
            self.squarefree_into(&root, mult * p, out);
        }
    }

    /// Distinct-degree factorization of a monic squarefree polynomial:
    /// pairs `(g, d)` where `g` is the product of all irreducible factors of
    /// degree `d`.
    pub fn ddf(&self, a: &P<F>) -> Vec<(P<F>, usize)> {
        let mut out = Vec::new();
        let mut rest = a.clone();
        let x = self.x();
        let mut h = self.rem(&x, &rest).expect("nonzero");
        let mut d = 1;
        while rest.degree().unwrap_or(0) >= 2 * d {
            h = self.pow_order_mod(&h, &rest);
            let g = self.gcd(&rest, &self.sub(&h, &x));
            if !self.is_one(&g) {
                rest = self.div_exact(&rest, &g).expect("gcd divides");
                h = self.rem(&h, &rest).expect("nonzero");
                out.push((g, d));
            }
            d += 1;
        }
        if let Some(deg) = rest.degree() {
            if deg > 0 {
                out.push((rest, deg));
            }
        }
        out
    }

    /// Equal-degree splitting (Cantor-Zassenhaus, trace map in
    /// characteristic 2) of a monic squarefree `a` whose irreducible factors
    /// all have degree `d`.
    pub fn edf<R: Rng + ?Sized>(&self, a: &P<F>, d: usize, rng: &mut R) -> Vec<P<F>> {
        let n = a.degree().unwrap_or(0);
        if n == 0 {
            return Vec::new();
        }
        if n == d {
            return vec![a.clone()];
        }
        let p = self.field.characteristic();
        let ext = self.field.prime_degree() as usize * d;
        loop {
            let r: Vec<F::Elem> = (0..n).map(|_| self.field.random_elem(rng)).collect();
            let r = self.poly(r);
            if r.degree().unwrap_or(0) == 0 {
                continue;
            }
            let cand = if p == 2 {
                let mut t = r.clone();
                let mut s = r.clone();
                for _ in 1..ext {
                    t = self.mulmod(&t, &t, a);
                    s = self.add(&s, &t);
                }
                s
            } else {
                let mut t = r.clone();
                let mut s = r.clone();
                for _ in 1..ext {
                    t = self.powmod(&t, p as u64, a);
                    s = self.mulmod(&s, &t, a);
                }
                let b = self.powmod(&s, (p as u64 - 1) / 2, a);
                self.sub(&b, &self.one())
            };
            let g = self.gcd(&cand, a);
            let dg = g.degree().unwrap_or(0);
            if dg > 0 && dg < n {
                let h = self.div_exact(a, &g).expect("gcd divides");
                let mut out = self.edf(&g, d, rng);
                out.extend(self.edf(&h, d, rng));
                return out;
            }
        }
    }

    /// Canonical factorization: unit and sorted `(monic irreducible, exponent)`.
    pub fn factor<R: Rng + ?Sized>(&self, a: &P<F>, rng: &mut R) -> Result<(F::Elem, Vec<(P<F>, u32)>)>
    where
        F::Elem: Ord,
    {
        if a.is_zero() {
            return Err(Error::domain("factorization of the zero polynomial"));
        }
        let (unit, monic) = self.make_monic(a);
        let mut acc: BTreeMap<P<F>, u32> = BTreeMap::new();
        for (part, e) in self.squarefree(&monic) {
            for (block, d) in self.ddf(&part) {
                for irr in self.edf(&block, d, rng) {
                    *acc.entry(irr).or_insert(0) += e;
                }
            }
        }
        Ok((unit, acc.into_iter().collect()))
    }

    /// Rabin's test: `X^{Q^n} = X mod a` and `gcd(X^{Q^{n/r}} - X, a) = 1`
    /// for every prime `r | n`, with `Q` the field order.
    pub fn is_irreducible(&self, a: &P<F>) -> Result<bool> {
        let n = match a.degree() {
            None | Some(0) => {
                return Err(Error::domain("irreducibility of a constant polynomial"))
            }
            Some(n) => n,
        };
        if n == 1 {
            return Ok(true);
        }
        let a = self.monic(a);
        let x = self.x();
        let mut powers = Vec::with_capacity(n + 1);
        let mut h = self.rem(&x, &a)?;
        powers.push(h.clone());
        for _ in 0..n {
            h = self.pow_order_mod(&h, &a);
            powers.push(h.clone());
        }
        if powers[n] != self.rem(&x, &a)? {
            return Ok(false);
        }
        for r in prime_divisors(n as u64) {
            let g = self.gcd(&a, &self.sub(&powers[n / r as usize], &x));
            if !self.is_one(&g) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Distinct roots in the field, via `gcd(a, X^Q - X)` and splitting.
    pub fn roots<R: Rng + ?Sized>(&self, a: &P<F>, rng: &mut R) -> Result<Vec<F::Elem>> {
        let n = a
            .degree()
            .ok_or_else(|| Error::domain("roots of the zero polynomial"))?;
        if n == 0 {
            return Ok(Vec::new());
        }
        let a = self.monic(a);
        let x = self.x();
        let h = self.pow_order_mod(&x, &a);
        let g = self.gcd(&a, &self.sub(&h, &x));
        Ok(self
            .edf(&g, 1, rng)
            .into_iter()
            .map(|lin| self.field.neg(&lin.coeffs[0]))
            .collect())
    }
}
