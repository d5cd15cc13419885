//! The ring `F_q[T]`: factorization, valuations, enumeration of `M_n`
//! and of monic primes, and the textual literal form.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf::{FieldCtx, GfElem};
use crate::literal;
use crate::poly::{Poly, PolyRing};

pub type TPoly = Poly<GfElem>;
pub type TRing<'a> = PolyRing<'a, FieldCtx>;

/// `unit * prod P^e` with monic irreducible keys in canonical order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Factorization {
    pub unit: GfElem,
    pub factors: Vec<(TPoly, u32)>,
}

impl Factorization {
    pub fn reconstruct(&self, ring: TRing<'_>) -> TPoly {
        self.factors.iter().fold(ring.constant(self.unit), |acc, (p, e)| {
            ring.mul(&acc, &ring.pow(p, *e as u64))
        })
    }

    pub fn radical(&self, ring: TRing<'_>) -> TPoly {
        self.factors
            .iter()
            .fold(ring.one(), |acc, (p, _)| ring.mul(&acc, p))
    }

    pub fn exponent_of(&self, prime: &TPoly) -> u32 {
        self.factors
            .iter()
            .find(|(p, _)| p == prime)
            .map_or(0, |(_, e)| *e)
    }
}

pub fn factor<R: Rng + ?Sized>(ctx: &FieldCtx, q: &TPoly, rng: &mut R) -> Result<Factorization> {
    let (unit, factors) = PolyRing::new(ctx).factor(q, rng)?;
    Ok(Factorization { unit, factors })
}

pub fn is_irreducible(ctx: &FieldCtx, q: &TPoly) -> Result<bool> {
    PolyRing::new(ctx).is_irreducible(q)
}

/// `v_P(Q)` by repeated exact division.
pub fn valuation(ctx: &FieldCtx, q: &TPoly, prime: &TPoly) -> Result<u32> {
    if q.is_zero() {
        return Err(Error::domain("valuation of zero is infinite"));
    }
    if prime.degree().unwrap_or(0) == 0 {
        return Err(Error::domain("valuation at a constant"));
    }
    let ring = PolyRing::new(ctx);
    let mut v = 0;
    let mut cur = q.clone();
    loop {
        let (s, r) = ring.divmod(&cur, prime)?;
        if !r.is_zero() {
            return Ok(v);
        }
        cur = s;
        v += 1;
    }
}

/// `q^n`, or `None` on overflow.
pub fn monic_count(ctx: &FieldCtx, n: u32) -> Option<u64> {
    (ctx.q() as u64).checked_pow(n)
}

/// The `idx`-th element of `M_n`: lower coefficients are the base-`q`
/// digits of `idx`, constant coefficient varying fastest.
pub fn monic_from_index(ctx: &FieldCtx, n: usize, mut idx: u64) -> TPoly {
    let q = ctx.q() as u64;
    let mut v = Vec::with_capacity(n + 1);
    for _ in 0..n {
        v.push(GfElem::from_index((idx % q) as u32));
        idx /= q;
    }
    v.push(GfElem::ONE);
    PolyRing::new(ctx).poly(v)
}

/// Inverse of [`monic_from_index`] on monic polynomials of degree `n`.
pub fn monic_index(ctx: &FieldCtx, m: &TPoly) -> u64 {
    let q = ctx.q() as u64;
    let n = m.degree().unwrap_or(0);
    m.coeffs()[..n]
        .iter()
        .rev()
        .fold(0u64, |acc, c| acc * q + c.index() as u64)
}

/// All of `M_n` in enumeration order.
pub fn enumerate_monic(ctx: &FieldCtx, n: usize) -> impl Iterator<Item = TPoly> + '_ {
    let count = (ctx.q() as u64).pow(n as u32);
    (0..count).map(move |i| monic_from_index(ctx, n, i))
}

/// Monic irreducibles of degree exactly `d`, in enumeration order.
pub fn primes_of_degree(ctx: &FieldCtx, d: usize) -> Vec<TPoly> {
    if d == 0 {
        return Vec::new();
    }
    enumerate_monic(ctx, d)
        .filter(|m| is_irreducible(ctx, m).expect("nonconstant"))
        .collect()
}

/// Monic irreducibles with `1 <= deg <= max_deg`, ordered by degree then
/// enumeration order.
pub fn enumerate_primes(ctx: &FieldCtx, max_deg: usize) -> Vec<TPoly> {
    (1..=max_deg).flat_map(|d| primes_of_degree(ctx, d)).collect()
}

/// Format with an arbitrary indeterminate name.
pub fn format_poly(ctx: &FieldCtx, a: &TPoly, var: char) -> String {
    if a.is_zero() {
        return "0".to_string();
    }
    let mut terms = Vec::new();
    for (i, c) in a.coeffs().iter().enumerate().rev() {
        if c.is_zero() {
            continue;
        }
        let cs = ctx.format_elem(*c);
        let mono = match i {
            0 => String::new(),
            1 => var.to_string(),
            _ => format!("{var}^{i}"),
        };
        let compound = cs.contains('+') || (ctx.k() > 1 && cs.contains('*'));
        terms.push(match (mono.is_empty(), cs.as_str()) {
            (true, _) if compound => format!("({cs})"),
            (true, _) => cs,
            (false, "1") => mono,
            (false, _) if compound => format!("({cs})*{mono}"),
            (false, _) => format!("{cs}*{mono}"),
        });
    }
    terms.join("+")
}

pub fn format_tpoly(ctx: &FieldCtx, a: &TPoly) -> String {
    format_poly(ctx, a, 'T')
}

/// Parse a `T`-polynomial literal; for `k > 1` coefficients may use `a`.
pub fn parse_tpoly(ctx: &FieldCtx, s: &str) -> Result<TPoly> {
    let vars: &[char] = if ctx.k() > 1 { &['a', 'T'] } else { &['T'] };
    let sparse = literal::parse_sparse(s, ctx.p(), vars)?;
    let ring = PolyRing::new(ctx);
    let deg = sparse.terms.keys().map(|k| k.1).max().unwrap_or(0) as usize;
    let mut coeffs = vec![GfElem::ZERO; deg + 1];
    let gen = ctx.generator();
    for (&(ea, et), &c) in &sparse.terms {
        let term = ctx.mul(ctx.elem(c as u64), ctx.pow(gen, ea as u64));
        let term = if ctx.k() == 1 { ctx.elem(c as u64) } else { term };
        coeffs[et as usize] = ctx.add(coeffs[et as usize], term);
    }
    Ok(ring.poly(coeffs))
}

/// Serialized factorization entry.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct FactorEntry {
    pub prime: String,
    pub exponent: u32,
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn t(ctx: &FieldCtx, s: &str) -> TPoly {
        parse_tpoly(ctx, s).unwrap()
    }

    #[test]
    fn arithmetic_examples() {
        let f3 = FieldCtx::prime(3).unwrap();
        let r = PolyRing::new(&f3);
        assert_eq!(r.mul(&t(&f3, "T+1"), &t(&f3, "T+2")), t(&f3, "T^2+2"));
        let f2 = FieldCtx::prime(2).unwrap();
        let r2 = PolyRing::new(&f2);
        assert_eq!(r2.gcd(&t(&f2, "T^2+T"), &t(&f2, "T^2+1")), t(&f2, "T+1"));
    }

    #[test]
    fn irreducibility_examples() {
        let f2 = FieldCtx::prime(2).unwrap();
        assert!(is_irreducible(&f2, &t(&f2, "T^2+T+1")).unwrap());
        assert!(is_irreducible(&f2, &t(&f2, "T^4+T+1")).unwrap());
        let f3 = FieldCtx::prime(3).unwrap();
        assert!(!is_irreducible(&f3, &t(&f3, "T^2+2")).unwrap());
        assert!(matches!(is_irreducible(&f3, &t(&f3, "2")), Err(Error::Domain(_))));
    }

    #[test]
    fn trial_division_oracle_agrees_deg4_f2() {
        // T^4+T+1 has no factor among the irreducibles of degree <= 2.
        let f2 = FieldCtx::prime(2).unwrap();
        let r = PolyRing::new(&f2);
        let target = t(&f2, "T^4+T+1");
        for d in 1..=2 {
            for m in enumerate_monic(&f2, d) {
                assert!(!r.rem(&target, &m).unwrap().is_zero());
            }
        }
    }

    #[test]
    fn factor_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let f2 = FieldCtx::prime(2).unwrap();
        let fac = factor(&f2, &t(&f2, "T^2+1"), &mut rng).unwrap();
        assert_eq!(fac.unit, GfElem::ONE);
        assert_eq!(fac.factors, vec![(t(&f2, "T+1"), 2)]);
        let f3 = FieldCtx::prime(3).unwrap();
        let fac = factor(&f3, &t(&f3, "2*T^2+2*T"), &mut rng).unwrap();
        assert_eq!(fac.unit, f3.elem(2));
        assert_eq!(fac.factors, vec![(t(&f3, "T"), 1), (t(&f3, "T+1"), 1)]);
        assert!(factor(&f3, &PolyRing::new(&f3).zero(), &mut rng).is_err());
    }

    #[test]
    fn valuation_examples() {
        let f2 = FieldCtx::prime(2).unwrap();
        assert_eq!(valuation(&f2, &t(&f2, "T^2+1"), &t(&f2, "T+1")).unwrap(), 2);
        assert_eq!(valuation(&f2, &t(&f2, "T+1"), &t(&f2, "T")).unwrap(), 0);
        assert!(matches!(
            valuation(&f2, &PolyRing::new(&f2).zero(), &t(&f2, "T")),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn monic_enumeration() {
        let f2 = FieldCtx::prime(2).unwrap();
        let m2: Vec<String> = enumerate_monic(&f2, 2).map(|m| format_tpoly(&f2, &m)).collect();
        assert_eq!(m2, vec!["T^2", "T^2+1", "T^2+T", "T^2+T+1"]);
        for (i, m) in enumerate_monic(&f2, 5).enumerate() {
            assert_eq!(monic_index(&f2, &m), i as u64);
        }
    }

    #[test]
    fn prime_counts_small() {
        let f3 = FieldCtx::prime(3).unwrap();
        assert_eq!(primes_of_degree(&f3, 1).len(), 3);
        let f2 = FieldCtx::prime(2).unwrap();
        // 2^4 = 1*pi(1) + 2*pi(2) + 4*pi(4) = 2 + 2 + 4*pi(4)
        assert_eq!(primes_of_degree(&f2, 4).len(), 3);
    }

    #[test]
    fn literal_round_trip_extension_field() {
        let f4 = FieldCtx::new(2, 2, None).unwrap();
        let a = t(&f4, "(a+1)*T^2+a");
        assert_eq!(format_tpoly(&f4, &a), "(a+1)*T^2+a");
        assert_eq!(t(&f4, &format_tpoly(&f4, &a)), a);
        let f9 = FieldCtx::new(3, 2, None).unwrap();
        let b = t(&f9, "2*a*T+a^2");
        // a^2 = -1 = 2 in F_9 with modulus a^2+1
        assert_eq!(format_tpoly(&f9, &b), "(2*a)*T+2");
        assert_eq!(t(&f9, &format_tpoly(&f9, &b)), b);
    }
}
