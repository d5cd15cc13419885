//! Roots in `K = F_q(T)` of polynomials with coefficients in `F_q[T]`.

use std::collections::BTreeSet;

use rand::Rng;

use crate::error::{Error, Result};
use crate::gf::FieldCtx;
use crate::kelem::{KElem, KField};
use crate::tpoly::{factor, TPoly, TRing};
use crate::xpoly::{XPoly, XRing};

/// Candidate-count ceiling; beyond it the search reports a budget error.
const MAX_CANDIDATES: u128 = 2_000_000;

/// All monic divisors of a nonzero polynomial.
pub fn monic_divisors<R: Rng + ?Sized>(ctx: &FieldCtx, a: &TPoly, rng: &mut R) -> Result<Vec<TPoly>> {
    let t = TRing::new(ctx);
    let fac = factor(ctx, a, rng)?;
    let mut out = vec![t.one()];
    for (p, e) in &fac.factors {
        let mut next = Vec::with_capacity(out.len() * (*e as usize + 1));
        for d in &out {
            let mut cur = d.clone();
            next.push(cur.clone());
            for _ in 0..*e {
                cur = t.mul(&cur, p);
                next.push(cur.clone());
            }
        }
        out = next;
    }
    out.sort();
    Ok(out)
}

fn divisor_count<R: Rng + ?Sized>(ctx: &FieldCtx, a: &TPoly, rng: &mut R) -> Result<u128> {
    Ok(factor(ctx, a, rng)?
        .factors
        .iter()
        .map(|(_, e)| *e as u128 + 1)
        .product())
}

/// Exact division of `h` by `w X - u` in `F_q[T][X]`, if it divides.
pub fn divide_linear(x: &XRing<'_>, h: &XPoly, u: &TPoly, w: &TPoly) -> Option<XPoly> {
    let t = x.t();
    let a = h.coeffs();
    let d = h.degree()?;
    if d == 0 {
        return None;
    }
    // a_i = w c_{i-1} - u c_i, from the top down.
    let mut c = vec![t.zero(); d];
    c[d - 1] = t.div_exact(&a[d], w).ok()?;
    for i in (1..d).rev() {
        let num = t.add(&a[i], &t.mul(u, &c[i]));
        c[i - 1] = t.div_exact(&num, w).ok()?;
    }
    if t.add(&a[0], &t.mul(u, &c[0])).is_zero() {
        Some(XPoly::new(c))
    } else {
        None
    }
}

/// `w^D h(u/w)`, the cleared-denominator value.
fn eval_cleared(x: &XRing<'_>, h: &XPoly, u: &TPoly, w: &TPoly) -> TPoly {
    let t = x.t();
    let d = h.d();
    let mut upow = t.one();
    let mut wpows = vec![t.one(); d + 1];
    for i in 1..=d {
        wpows[i] = t.mul(&wpows[i - 1], w);
    }
    let mut acc = t.zero();
    for (i, c) in h.coeffs().iter().enumerate() {
        acc = t.add(&acc, &t.mul(&t.mul(c, &upow), &wpows[d - i]));
        upow = t.mul(&upow, u);
    }
    acc
}

/// Every root of `h` in `K` with its multiplicity, sorted by the order
/// on `K`.
pub fn rational_roots<R: Rng + ?Sized>(
    ctx: &FieldCtx,
    h: &XPoly,
    rng: &mut R,
) -> Result<Vec<(KElem, u32)>> {
    if h.is_zero() {
        return Err(Error::domain("roots of the zero polynomial"));
    }
    let x = XRing::new(ctx);
    let k = KField::new(ctx);
    let mut out = Vec::new();
    let s = h.coeffs().iter().take_while(|c| c.is_zero()).count();
    if s > 0 {
        out.push((k.zero(), s as u32));
    }
    let mut rest = XPoly::new(h.coeffs()[s..].to_vec());
    if rest.d() == 0 {
        return Ok(out);
    }
    let trailing = rest.coeffs()[0].clone();
    let leading = rest.lead().expect("nonzero").clone();
    let units = (ctx.q() - 1) as u128;
    let required = divisor_count(ctx, &trailing, rng)? * divisor_count(ctx, &leading, rng)? * units;
    if required > MAX_CANDIDATES {
        return Err(Error::Budget {
            required,
            budget: MAX_CANDIDATES,
        });
    }
    let us = monic_divisors(ctx, &trailing, rng)?;
    let ws = monic_divisors(ctx, &leading, rng)?;
    let mut seen = BTreeSet::new();
    for w in &ws {
        for u in &us {
            for lam in ctx.enumerate_all().filter(|c| !c.is_zero()) {
                let cand = k
                    .make(x.t().scale(u, &lam), w.clone())
                    .expect("monic denominator");
                if !seen.insert(cand.clone()) {
                    continue;
                }
                if !eval_cleared(&x, &rest, cand.num(), cand.den()).is_zero() {
                    continue;
                }
                let mut mult = 0;
                while let Some(q) = divide_linear(&x, &rest, cand.num(), cand.den()) {
                    rest = q;
                    mult += 1;
                }
                out.push((cand, mult));
            }
        }
    }
    out.sort();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn roots_str(ctx: &FieldCtx, lits: &[&str]) -> Vec<(String, u32)> {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let k = KField::new(ctx);
        rational_roots(ctx, &XPoly::parse(ctx, lits).unwrap(), &mut rng)
            .unwrap()
            .into_iter()
            .map(|(r, m)| (k.format(&r), m))
            .collect()
    }

    #[test]
    fn difference_of_squares() {
        let f3 = FieldCtx::prime(3).unwrap();
        let r = roots_str(&f3, &["2*T^2", "0", "1"]);
        assert_eq!(r, vec![("T".into(), 1), ("2*T".into(), 1)]);
    }

    #[test]
    fn planted_double_root() {
        // (X - T)^2 (X + 1) = X^3 + (1-2T) X^2 + (T^2-2T) X + T^2 over F_3
        let f3 = FieldCtx::prime(3).unwrap();
        let r = roots_str(&f3, &["T^2", "T^2+T", "T+1", "1"]);
        assert_eq!(r, vec![("2".into(), 1), ("T".into(), 2)]);
    }

    #[test]
    fn no_roots_for_x2_plus_t() {
        let f3 = FieldCtx::prime(3).unwrap();
        assert!(roots_str(&f3, &["T", "0", "1"]).is_empty());
    }

    #[test]
    fn fractional_root_and_zero_root() {
        // X^2 (T X - 1): roots 0 (twice) and 1/T
        let f2 = FieldCtx::prime(2).unwrap();
        let r = roots_str(&f2, &["0", "0", "1", "T"]);
        assert_eq!(r, vec![("0".into(), 2), ("(1)/(T)".into(), 1)]);
    }

    #[test]
    fn zero_polynomial_is_domain_error() {
        let f2 = FieldCtx::prime(2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(matches!(
            rational_roots(&f2, &XPoly::new(vec![]), &mut rng),
            Err(Error::Domain(_))
        ));
    }
}
