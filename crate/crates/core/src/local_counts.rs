//! Root counts `rho_f(P^k) = #{Q mod P^k : f(Q) = 0 mod P^k}`.
//!
//! The lifting tree is the reference: roots modulo `P^{j+1}` are found
//! above each root `x` modulo `P^j` by scanning `x + t P^j` over all
//! residues `t` mod `P`. Two shortcuts cut the tree short; both can be
//! checked against the full tree with `paranoid`.

use std::collections::BTreeSet;

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gf::{FieldCtx, GfElem};
use crate::irreducibility::{irreducibility_guard, Irreducibility};
use crate::poly::PolyRing;
use crate::residue::ResidueField;
use crate::tpoly::{factor, format_tpoly, valuation, TPoly, TRing};
use crate::xpoly::{XPoly, XRing};

/// Largest `|P|^k` the residue-scan oracle accepts.
pub const ORACLE_LIMIT: u64 = 1_000_000;
/// Largest `k * deg P` the lifting tree accepts.
pub const MAX_PRECISION: usize = 4096;

/// Roots of `f mod P` in `F_q[T]/P`, as reduced residues in sorted order.
pub fn roots_mod_prime<R: Rng + ?Sized>(
    ctx: &FieldCtx,
    f: &XPoly,
    prime: &TPoly,
    rng: &mut R,
) -> Result<Vec<TPoly>> {
    let field = ResidueField::new(ctx, prime)?;
    let fbar = XRing::new(ctx).reduce_mod(f, &field);
    if fbar.is_zero() {
        return Err(Error::domain(format!(
            "f vanishes identically modulo {}",
            format_tpoly(ctx, prime)
        )));
    }
    let mut roots = PolyRing::new(&field).roots(&fbar, rng)?;
    roots.sort();
    Ok(roots)
}

/// `f(x) mod m`, with the coefficients reduced first.
fn eval_mod(ctx: &FieldCtx, f: &XPoly, x: &TPoly, m: &TPoly) -> TPoly {
    let t = TRing::new(ctx);
    let mut acc = t.zero();
    for c in f.coeffs().iter().rev() {
        acc = t.rem(&t.add(&t.mul(&acc, x), c), m).expect("nonzero modulus");
    }
    acc
}

/// Polynomials of degree `< n`, enumeration order.
fn residues_below(ctx: &FieldCtx, n: usize) -> impl Iterator<Item = TPoly> + '_ {
    let q = ctx.q() as u64;
    let count = q.pow(n as u32);
    (0..count).map(move |mut i| {
        let mut v = Vec::with_capacity(n);
        for _ in 0..n {
            v.push(GfElem::from_index((i % q) as u32));
            i /= q;
        }
        TRing::new(ctx).poly(v)
    })
}

/// Exhaustive count over all residues mod `P^k`; independent of the tree.
pub fn oracle_rho(ctx: &FieldCtx, f: &XPoly, prime: &TPoly, k: u32) -> Result<u64> {
    let n = prime.degree().unwrap_or(0) * k as usize;
    let size = (ctx.q() as u64).checked_pow(n as u32).filter(|&s| s <= ORACLE_LIMIT);
    if size.is_none() {
        return Err(Error::Budget {
            required: (ctx.q() as u128).saturating_pow(n as u32),
            budget: ORACLE_LIMIT as u128,
        });
    }
    let t = TRing::new(ctx);
    let pk = t.pow(prime, k as u64);
    Ok(residues_below(ctx, n)
        .filter(|x| eval_mod(ctx, f, x, &pk).is_zero())
        .count() as u64)
}

#[derive(Clone, Debug, Serialize)]
pub struct RhoProfile {
    pub prime: String,
    pub separable: bool,
    /// Which resultant `mu` is taken of.
    pub resultant: &'static str,
    pub mu: Option<u32>,
    /// `rho_f(P^1), ..., rho_f(P^kmax)`.
    pub values: Vec<u64>,
    /// First index (1-based) from which `values` is constant.
    pub stabilized_at: u32,
    /// First level supplied by a shortcut instead of the tree.
    pub fast_path_from: Option<u32>,
    pub paranoid: bool,
    pub irreducibility: Irreducibility,
}

/// Separability of `f` and `Res(f, f')`, or `Res(f, df/dT)` when `f` is
/// inseparable. Zero if the second argument vanishes.
pub fn relevant_resultant(ctx: &FieldCtx, f: &XPoly) -> Result<(bool, TPoly)> {
    let x = XRing::new(ctx);
    let separable = x.is_separable(f);
    let other = if separable {
        x.derivative_x(f)
    } else {
        x.derivative_t(f)
    };
    let res = if other.is_zero() {
        TRing::new(ctx).zero()
    } else {
        x.resultant_x(f, &other)?
    };
    Ok((separable, res))
}

/// Primes dividing the relevant resultant or the content of `f`.
pub fn bad_primes<R: Rng + ?Sized>(ctx: &FieldCtx, f: &XPoly, rng: &mut R) -> Result<Vec<TPoly>> {
    let (_, res) = relevant_resultant(ctx, f)?;
    let mut out = BTreeSet::new();
    if !res.is_zero() {
        out.extend(factor(ctx, &res, rng)?.factors.into_iter().map(|x| x.0));
    }
    let content = XRing::new(ctx).content(f);
    if !content.is_zero() {
        out.extend(factor(ctx, &content, rng)?.factors.into_iter().map(|x| x.0));
    }
    Ok(out.into_iter().collect())
}

/// Per-`f` data shared by all primes.
pub struct LocalCounts<'a> {
    ctx: &'a FieldCtx,
    f: XPoly,
    separable: bool,
    /// `Res(f, f')` if separable, `Res(f, df/dT)` otherwise.
    res: TPoly,
    guard: Irreducibility,
    budget: u64,
}

impl<'a> LocalCounts<'a> {
    /// Refuses `f` that is provably reducible. `budget` caps the number of
    /// evaluations in one lifting tree.
    pub fn new<R: Rng + ?Sized>(ctx: &'a FieldCtx, f: &XPoly, budget: u64, rng: &mut R) -> Result<Self> {
        if f.d() < 1 {
            return Err(Error::validation("root counts need deg_X f >= 1"));
        }
        let guard = irreducibility_guard(ctx, f, rng)?;
        if guard.is_reducible() {
            return Err(Error::validation(format!("f must be irreducible: {guard:?}")));
        }
        let (separable, res) = relevant_resultant(ctx, f)?;
        Ok(LocalCounts {
            ctx,
            f: f.clone(),
            separable,
            res,
            guard,
            budget,
        })
    }

    pub fn f(&self) -> &XPoly {
        &self.f
    }

    pub fn is_separable(&self) -> bool {
        self.separable
    }

    pub fn resultant(&self) -> &TPoly {
        &self.res
    }

    pub fn guard(&self) -> &Irreducibility {
        &self.guard
    }

    /// `v_P` of the relevant resultant; `None` if it vanishes.
    pub fn mu(&self, prime: &TPoly) -> Result<Option<u32>> {
        if self.res.is_zero() {
            return Ok(None);
        }
        Ok(Some(valuation(self.ctx, &self.res, prime)?))
    }

    pub fn bad_primes<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Vec<TPoly>> {
        bad_primes(self.ctx, &self.f, rng)
    }

    /// First level at which a shortcut determines every later value.
    fn shortcut_level(&self, prime: &TPoly) -> Result<Option<u32>> {
        Ok(self.mu(prime)?.map(|mu| {
            if self.separable {
                2 * mu + 1
            } else {
                mu + 2
            }
        }))
    }

    /// Counts at levels `1..=kmax` from the lifting tree alone.
    pub fn rho_tree<R: Rng + ?Sized>(&self, prime: &TPoly, kmax: u32, rng: &mut R) -> Result<Vec<u64>> {
        let dp = prime.degree().unwrap_or(0);
        if dp == 0 {
            return Err(Error::domain("root counts at a constant"));
        }
        if kmax as usize * dp > MAX_PRECISION {
            return Err(Error::Budget {
                required: kmax as u128 * dp as u128,
                budget: MAX_PRECISION as u128,
            });
        }
        let t = TRing::new(self.ctx);
        let mut out = Vec::with_capacity(kmax as usize);
        if kmax == 0 {
            return Ok(out);
        }
        let mut roots = roots_mod_prime(self.ctx, &self.f, prime, rng)?;
        out.push(roots.len() as u64);
        let residues: Vec<TPoly> = residues_below(self.ctx, dp).collect();
        let mut pj = prime.clone();
        let mut work: u64 = 0;
        for _ in 1..kmax {
            let pj1 = t.mul(&pj, prime);
            work = work.saturating_add(roots.len() as u64 * residues.len() as u64);
            if work > self.budget {
                return Err(Error::Budget {
                    required: work as u128,
                    budget: self.budget as u128,
                });
            }
            let mut next = Vec::new();
            for x in &roots {
                for r in &residues {
                    let y = t.add(x, &t.mul(r, &pj));
                    if eval_mod(self.ctx, &self.f, &y, &pj1).is_zero() {
                        next.push(y);
                    }
                }
            }
            roots = next;
            pj = pj1;
            out.push(roots.len() as u64);
        }
        Ok(out)
    }

    /// Levels `1..=kmax`, using the shortcuts unless `paranoid`.
    fn values<R: Rng + ?Sized>(
        &self,
        prime: &TPoly,
        kmax: u32,
        paranoid: bool,
        rng: &mut R,
    ) -> Result<(Vec<u64>, Option<u32>)> {
        let cut = self.shortcut_level(prime)?;
        let tree_depth = match cut {
            Some(c) if !paranoid => kmax.min(c),
            _ => kmax,
        };
        let mut values = self.rho_tree(prime, tree_depth, rng)?;
        let mut fast_from = None;
        if let Some(c) = cut {
            if paranoid {
                for k in c..=kmax {
                    let expect = if self.separable { values[c as usize - 1] } else { 0 };
                    if values[k as usize - 1] != expect {
                        return Err(Error::internal(format!(
                            "shortcut disagrees with the lifting tree at {}^{k}",
                            format_tpoly(self.ctx, prime)
                        )));
                    }
                }
            } else if kmax > c {
                let fill = if self.separable { values[c as usize - 1] } else { 0 };
                fast_from = Some(c + 1);
                values.resize(kmax as usize, fill);
            }
            if !self.separable && c <= kmax && values[c as usize - 1] != 0 {
                return Err(Error::internal("inseparable vanishing fails at the threshold"));
            }
        }
        Ok((values, fast_from))
    }

    /// `rho_f(P^k)`.
    pub fn rho<R: Rng + ?Sized>(&self, prime: &TPoly, k: u32, paranoid: bool, rng: &mut R) -> Result<u64> {
        if k == 0 {
            return Err(Error::validation("k must be at least 1"));
        }
        Ok(self.values(prime, k, paranoid, rng)?.0[k as usize - 1])
    }

    pub fn profile<R: Rng + ?Sized>(
        &self,
        prime: &TPoly,
        kmax: u32,
        paranoid: bool,
        rng: &mut R,
    ) -> Result<RhoProfile> {
        if kmax == 0 {
            return Err(Error::validation("kmax must be at least 1"));
        }
        let (values, fast_path_from) = self.values(prime, kmax, paranoid, rng)?;
        let last = *values.last().expect("kmax >= 1");
        let stabilized_at = values.iter().rposition(|&v| v != last).map_or(1, |i| i as u32 + 2);
        Ok(RhoProfile {
            prime: format_tpoly(self.ctx, prime),
            separable: self.separable,
            resultant: if self.separable { "Res(f, f')" } else { "Res(f, df/dT)" },
            mu: self.mu(prime)?,
            values,
            stabilized_at,
            fast_path_from,
            paranoid,
            irreducibility: self.guard.clone(),
        })
    }

    /// `rho_h(P)` for the separable `h` with `f(X) = h(X^{p^m})`, checked
    /// against `rho_f(P)`.
    pub fn descent_rho<R: Rng + ?Sized>(&self, prime: &TPoly, rng: &mut R) -> Result<u64> {
        if self.separable {
            return Err(Error::validation("descent applies to inseparable f"));
        }
        let (h, _) = XRing::new(self.ctx).inseparable_descent(&self.f);
        let from_h = roots_mod_prime(self.ctx, &h, prime, rng)?.len() as u64;
        let from_f = roots_mod_prime(self.ctx, &self.f, prime, rng)?.len() as u64;
        if from_h != from_f {
            return Err(Error::internal("descent changes the root count mod P"));
        }
        Ok(from_h)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tpoly::parse_tpoly;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn setup(p: u32, lits: &[&str]) -> (FieldCtx, XPoly) {
        let ctx = FieldCtx::prime(p).unwrap();
        let f = XPoly::parse(&ctx, lits).unwrap();
        (ctx, f)
    }

    #[test]
    fn roots_mod_t() {
        let (ctx, f) = setup(3, &["T", "0", "1"]);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let p = parse_tpoly(&ctx, "T").unwrap();
        let r = roots_mod_prime(&ctx, &f, &p, &mut rng).unwrap();
        assert_eq!(r, vec![TRing::new(&ctx).zero()]);
        let p2 = parse_tpoly(&ctx, "T+2").unwrap();
        let n = roots_mod_prime(&ctx, &f, &p2, &mut rng).unwrap().len() as u64;
        assert_eq!(n, oracle_rho(&ctx, &f, &p2, 1).unwrap());
    }

    #[test]
    fn vanishing_reduction_is_an_error() {
        let (ctx, f) = setup(3, &["T", "T"]);
        let p = parse_tpoly(&ctx, "T").unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(matches!(roots_mod_prime(&ctx, &f, &p, &mut rng), Err(Error::Domain(_))));
    }

    #[test]
    fn profile_x2_plus_t_at_t() {
        let (ctx, f) = setup(3, &["T", "0", "1"]);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let lc = LocalCounts::new(&ctx, &f, 1 << 20, &mut rng).unwrap();
        let p = parse_tpoly(&ctx, "T").unwrap();
        assert_eq!(lc.mu(&p).unwrap(), Some(1));
        let prof = lc.profile(&p, 5, true, &mut rng).unwrap();
        assert_eq!(prof.values, vec![1, 0, 0, 0, 0]);
        assert!(prof.stabilized_at <= 3);
        assert_eq!(lc.profile(&p, 5, false, &mut rng).unwrap().values, prof.values);
        for k in 1..=4 {
            assert_eq!(prof.values[k - 1], oracle_rho(&ctx, &f, &p, k as u32).unwrap());
        }
    }

    #[test]
    fn inseparable_cube_vanishes_above_level_one() {
        let (ctx, f) = setup(3, &["T", "0", "0", "1"]);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let lc = LocalCounts::new(&ctx, &f, 1 << 20, &mut rng).unwrap();
        assert_eq!(lc.resultant(), &parse_tpoly(&ctx, "1").unwrap());
        let p = parse_tpoly(&ctx, "T").unwrap();
        assert_eq!(lc.rho(&p, 2, true, &mut rng).unwrap(), 0);
        assert_eq!(oracle_rho(&ctx, &f, &p, 2).unwrap(), 0);
        assert_eq!(lc.descent_rho(&p, &mut rng).unwrap(), 1);
    }

    #[test]
    fn oracle_size_guard() {
        let (ctx, f) = setup(3, &["T", "0", "1"]);
        let p = parse_tpoly(&ctx, "T^2+1").unwrap();
        assert!(matches!(oracle_rho(&ctx, &f, &p, 7), Err(Error::Budget { .. })));
    }

    #[test]
    fn reducible_input_rejected() {
        let (ctx, f) = setup(3, &["T^2", "2*T", "1"]);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(matches!(
            LocalCounts::new(&ctx, &f, 1 << 20, &mut rng),
            Err(Error::Validation(_))
        ));
    }
}
