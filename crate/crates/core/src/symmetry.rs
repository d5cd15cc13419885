//! The shift group `V_f = {g in F_q[T] : f(X+g) = f(X)}` and `c_f = 1/|V_f|`.

use std::collections::BTreeSet;

use num_rational::Ratio;
use rand::Rng;

use crate::error::{Error, Result};
use crate::gf::{FieldCtx, GfElem};
use crate::roots::rational_roots;
use crate::tpoly::{monic_count, TPoly, TRing};
use crate::xpoly::{XPoly, XRing};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VSpace {
    /// `F_p`-basis in reduced echelon form.
    pub basis: Vec<TPoly>,
    pub v: u32,
    /// All `p^v` elements, sorted.
    pub elements: Vec<TPoly>,
}

impl VSpace {
    pub fn size(&self) -> u64 {
        self.elements.len() as u64
    }

    pub fn c_f(&self) -> Ratio<u64> {
        Ratio::new(1, self.size())
    }

    /// Largest degree of a nonzero element, `None` for the trivial group.
    pub fn max_degree(&self) -> Option<usize> {
        self.elements.iter().filter_map(|g| g.degree()).max()
    }

    pub fn contains(&self, g: &TPoly) -> bool {
        self.elements.binary_search(g).is_ok()
    }
}

/// Coordinates over `F_p` of a polynomial of degree `< len`.
fn fp_coords(ctx: &FieldCtx, g: &TPoly, len: usize) -> Vec<u32> {
    let mut out = Vec::with_capacity(len * ctx.k() as usize);
    for i in 0..len {
        out.extend(ctx.coords(g.coeff(i).copied().unwrap_or(GfElem::ZERO)));
    }
    out
}

fn from_fp_coords(ctx: &FieldCtx, c: &[u32]) -> TPoly {
    let k = ctx.k() as usize;
    let v = c
        .chunks(k)
        .map(|ch| ctx.from_coords(ch).expect("coordinates in range"))
        .collect();
    TRing::new(ctx).poly(v)
}

/// Reduced row-echelon basis of the `F_p`-span of `gens`.
pub fn fp_span_basis(ctx: &FieldCtx, gens: &[TPoly]) -> Vec<TPoly> {
    let p = ctx.p();
    let len = gens.iter().map(|g| g.len()).max().unwrap_or(0);
    let mut rows: Vec<Vec<u32>> = Vec::new();
    let mut pivots: Vec<usize> = Vec::new();
    for g in gens {
        let mut v = fp_coords(ctx, g, len);
        for (r, &pc) in rows.iter().zip(&pivots) {
            let c = v[pc];
            if c != 0 {
                for (x, y) in v.iter_mut().zip(r) {
                    *x = (*x + (p - c) * y) % p;
                }
            }
        }
        if let Some(pc) = v.iter().position(|&x| x != 0) {
            let inv = (1..p).find(|i| (i * v[pc]) % p == 1).expect("F_p unit");
            for x in v.iter_mut() {
                *x = (*x * inv) % p;
            }
            for r in rows.iter_mut() {
                let c = r[pc];
                if c != 0 {
                    for (x, y) in r.iter_mut().zip(&v) {
                        *x = (*x + (p - c) * y) % p;
                    }
                }
            }
            rows.push(v);
            pivots.push(pc);
        }
    }
    let mut basis: Vec<TPoly> = rows.iter().map(|r| from_fp_coords(ctx, r)).collect();
    basis.sort();
    basis
}

/// All `F_p`-combinations of `basis`, sorted.
pub fn fp_span(ctx: &FieldCtx, basis: &[TPoly]) -> Vec<TPoly> {
    let t = TRing::new(ctx);
    let mut out = vec![t.zero()];
    for b in basis {
        let mut next = Vec::with_capacity(out.len() * ctx.p() as usize);
        for e in &out {
            let mut cur = e.clone();
            for _ in 0..ctx.p() {
                next.push(cur.clone());
                cur = t.add(&cur, b);
            }
        }
        out = next;
    }
    out.sort();
    out
}

pub fn is_shift_symmetry(ctx: &FieldCtx, f: &XPoly, g: &TPoly) -> bool {
    XRing::new(ctx).shift(f, g) == *f
}

/// Exact `V_f`: candidates are the integral roots of `f(X) - f(0)`.
pub fn compute_vf<R: Rng + ?Sized>(ctx: &FieldCtx, f: &XPoly, rng: &mut R) -> Result<VSpace> {
    let d = f.d();
    if d < 1 {
        return Err(Error::validation("V_f needs deg_X f >= 1"));
    }
    let t = TRing::new(ctx);
    let mut h = f.coeffs().to_vec();
    h[0] = t.zero();
    let members: BTreeSet<TPoly> = rational_roots(ctx, &XPoly::new(h), rng)?
        .into_iter()
        .filter(|(r, _)| r.is_integral())
        .map(|(r, _)| t.scale(r.num(), &ctx.inv(r.den().coeffs()[0]).expect("unit")))
        .filter(|g| is_shift_symmetry(ctx, f, g))
        .collect();
    let gens: Vec<TPoly> = members.iter().cloned().collect();
    let basis = fp_span_basis(ctx, &gens);
    let elements = fp_span(ctx, &basis);
    if elements != gens {
        return Err(Error::internal("V_f candidates are not closed under addition"));
    }
    let vs = VSpace {
        v: basis.len() as u32,
        basis,
        elements,
    };
    check_vf_clauses(ctx, f, &vs)?;
    Ok(vs)
}

/// The structural properties every `V_f` must satisfy; a failure is a bug.
pub fn check_vf_clauses(ctx: &FieldCtx, f: &XPoly, vs: &VSpace) -> Result<()> {
    let t = TRing::new(ctx);
    let d = f.d() as u64;
    let p = ctx.p() as u64;
    let size = vs.size();
    let fail = |what: &str| Err(Error::internal(format!("V_f property violated: {what}")));
    if size > d {
        return fail("|V_f| <= d");
    }
    if p.pow(vs.v) != size {
        return fail("|V_f| = p^v");
    }
    for a in &vs.elements {
        for b in &vs.elements {
            if !vs.contains(&t.add(a, b)) {
                return fail("closure under addition");
            }
        }
    }
    if !d.is_multiple_of(p) && size != 1 {
        return fail("p does not divide d implies V_f trivial");
    }
    let fd = f.lead().expect("nonzero");
    let some_not_divisible = (1..f.d()).any(|i| !t.divides(fd, &f.coeffs()[i]).expect("nonzero"));
    if some_not_divisible && size > d - 1 {
        return fail("f_d not dividing some f_i implies |V_f| <= d-1");
    }
    Ok(())
}

/// Cross-validation: scan every `g` with `deg g <= bound`.
pub fn brute_vf(ctx: &FieldCtx, f: &XPoly, bound: u32, budget: u64) -> Result<Vec<TPoly>> {
    let count = monic_count(ctx, bound + 1).filter(|&c| c <= budget).ok_or(Error::Budget {
        required: (ctx.q() as u128).saturating_pow(bound + 1),
        budget: budget as u128,
    })?;
    let t = TRing::new(ctx);
    let q = ctx.q() as u64;
    let mut out = Vec::new();
    for mut idx in 0..count {
        let mut v = Vec::with_capacity(bound as usize + 1);
        for _ in 0..=bound {
            v.push(GfElem::from_index((idx % q) as u32));
            idx /= q;
        }
        let g = t.poly(v);
        if is_shift_symmetry(ctx, f, &g) {
            out.push(g);
        }
    }
    out.sort();
    Ok(out)
}
