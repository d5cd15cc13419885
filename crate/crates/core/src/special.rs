//! Special polynomials: `f(X) - f(Y)` a product of linear factors
//! `X - zeta^j Y - b` over `K = F_q(T)`. Detection with normal-form
//! recovery, and construction from normal-form data.

use std::collections::BTreeMap;

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gf::{FieldCtx, GfElem};
use crate::kelem::{KElem, KField, KPoly};
use crate::roots::rational_roots;
use crate::tpoly::{format_tpoly, TPoly};
use crate::xpoly::XPoly;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct LinearFactor {
    pub j: u64,
    pub b: KElem,
    pub multiplicity: u32,
}

/// `f = f_d prod_{b in V} (X - b + A)^{m p^{l-v}} + C`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpecialForm {
    pub f_d: TPoly,
    pub a: KElem,
    pub c: KElem,
    pub zeta: GfElem,
    pub m: u64,
    pub l: u32,
    pub v: u32,
    pub v_space: Vec<KElem>,
    pub linear_factors: Vec<LinearFactor>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum NotSpecialReason {
    NoRootOfUnity,
    DeficientFactorCount,
    /// Contradicts the classification; reported as an internal error flag.
    InconsistentMultiplicities,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Detection {
    Special(SpecialForm),
    NotSpecial(NotSpecialReason),
}

/// `d = p^l m` with `p` not dividing `m`.
pub fn split_degree(d: u64, p: u64) -> (u32, u64) {
    let mut l = 0;
    let mut m = d;
    while m.is_multiple_of(p) {
        m /= p;
        l += 1;
    }
    (l, m)
}

/// `C(n, k) mod p` by Lucas' theorem.
pub fn binom_mod_p(mut n: u64, mut k: u64, p: u64) -> u64 {
    let mut acc = 1u64;
    while n > 0 || k > 0 {
        let (a, b) = (n % p, k % p);
        if b > a {
            return 0;
        }
        let mut c = 1u64;
        for i in 0..b {
            c = c * (a - i) % p;
        }
        let mut den = 1u64;
        for i in 1..=b {
            den = den * i % p;
        }
        // den is a unit mod p since b < p.
        let inv = (1..p).find(|x| x * den % p == 1).unwrap_or(1);
        acc = acc * c % p * inv % p;
        n /= p;
        k /= p;
    }
    acc
}

fn to_k(k: &KField<'_>, f: &XPoly) -> Vec<KElem> {
    f.coeffs().iter().map(|c| k.from_t(c.clone())).collect()
}

/// Multiplicity of `X - z Y - b` in `f(X) - f(Y)`: the least `k` with
/// `f^{[k]}(zY + b) - [k = 0] f(Y) != 0`, `f^{[k]}` the Hasse derivative.
fn factor_multiplicity(k: &KField<'_>, fk: &[KElem], z: GfElem, b: &KElem) -> u32 {
    let ctx = k.ctx();
    let p = ctx.p() as u64;
    let d = fk.len() - 1;
    let lin: KPoly = k.kpoly_trim(vec![b.clone(), k.constant(z)]);
    let mut lin_pows: Vec<KPoly> = vec![vec![k.one()]];
    for i in 1..=d {
        lin_pows.push(k.kpoly_mul(&lin_pows[i - 1], &lin));
    }
    for order in 0..=d {
        let mut acc: KPoly = Vec::new();
        for (i, fi) in fk.iter().enumerate().skip(order) {
            let c = binom_mod_p(i as u64, order as u64, p);
            if c == 0 || fi.is_zero() {
                continue;
            }
            let coeff = k.scale(fi, ctx.elem(c));
            acc = k.kpoly_add(&acc, &k.kpoly_scale(&lin_pows[i - order], &coeff));
        }
        if order == 0 {
            let neg: KPoly = fk.iter().map(|c| k.neg(c)).collect();
            acc = k.kpoly_add(&acc, &k.kpoly_trim(neg));
        }
        if !acc.is_empty() {
            return order as u32;
        }
    }
    d as u32
}

/// Bivariate polynomial over `K`: index `i` holds the `K[Y]` coefficient of `X^i`.
type KBivar = Vec<KPoly>;

fn bivar_mul_linear(k: &KField<'_>, a: &KBivar, shift: &KPoly) -> KBivar {
    // a * (X + shift)
    let mut out: KBivar = vec![Vec::new(); a.len() + 1];
    for (i, c) in a.iter().enumerate() {
        out[i + 1] = k.kpoly_add(&out[i + 1], c);
        out[i] = k.kpoly_add(&out[i], &k.kpoly_mul(c, shift));
    }
    out
}

/// Check `f_d prod (X - zeta^j Y - b)^mult = f(X) - f(Y)` in `K[X, Y]`.
fn verify_bivariate(k: &KField<'_>, fk: &[KElem], zeta: GfElem, factors: &[LinearFactor]) -> bool {
    let ctx = k.ctx();
    let mut prod: KBivar = vec![vec![fk.last().expect("nonzero").clone()]];
    for lf in factors {
        let z = ctx.pow(zeta, lf.j);
        let shift = k.kpoly_trim(vec![k.neg(&lf.b), k.constant(ctx.neg(z))]);
        for _ in 0..lf.multiplicity {
            prod = bivar_mul_linear(k, &prod, &shift);
        }
    }
    // f(X) - f(Y): X^i has coefficient f_i for i >= 1, and the X^0 slot is -sum_{i>=1} f_i Y^i.
    let mut expect: KBivar = fk.iter().map(|c| k.kpoly_trim(vec![c.clone()])).collect();
    let mut y_part: KPoly = fk.iter().map(|c| k.neg(c)).collect();
    y_part[0] = k.zero();
    expect[0] = k.kpoly_trim(y_part);
    let norm = |v: KBivar| -> KBivar {
        let mut v: KBivar = v.into_iter().map(|c| k.kpoly_trim(c)).collect();
        while v.last().is_some_and(|c| c.is_empty()) {
            v.pop();
        }
        v
    };
    norm(prod) == norm(expect)
}

/// `f_d prod_{b in V} (X - b + A)^e + C` in `K[X]`.
fn normal_form_expand(
    k: &KField<'_>,
    f_d: &TPoly,
    a: &KElem,
    c: &KElem,
    v_space: &[KElem],
    e: u64,
) -> KPoly {
    let mut acc: KPoly = vec![k.from_t(f_d.clone())];
    for b in v_space {
        let lin = vec![k.sub(a, b), k.one()];
        for _ in 0..e {
            acc = k.kpoly_mul(&acc, &lin);
        }
    }
    k.kpoly_add(&acc, &k.kpoly_trim(vec![c.clone()]))
}

pub fn detect_special<R: Rng + ?Sized>(ctx: &FieldCtx, f: &XPoly, rng: &mut R) -> Result<Detection> {
    let d = f.d();
    if d < 2 {
        return Err(Error::validation("special detection needs deg_X f >= 2"));
    }
    let k = KField::new(ctx);
    let p = ctx.p() as u64;
    let (l, m) = split_degree(d as u64, p);
    let zeta = match ctx.root_of_unity(m) {
        Some(z) => z,
        None => return Ok(Detection::NotSpecial(NotSpecialReason::NoRootOfUnity)),
    };
    let fk = to_k(&k, f);
    let mut h = f.coeffs().to_vec();
    h[0] = TPoly::default();
    let candidates: Vec<KElem> = rational_roots(ctx, &XPoly::new(h), rng)?
        .into_iter()
        .map(|(b, _)| b)
        .collect();
    let mut factors = Vec::new();
    for j in 0..m {
        let z = ctx.pow(zeta, j);
        for b in &candidates {
            let mult = factor_multiplicity(&k, &fk, z, b);
            if mult > 0 {
                factors.push(LinearFactor {
                    j,
                    b: b.clone(),
                    multiplicity: mult,
                });
            }
        }
    }
    let total: u64 = factors.iter().map(|f| f.multiplicity as u64).sum();
    if total != d as u64 {
        return Ok(Detection::NotSpecial(NotSpecialReason::DeficientFactorCount));
    }
    let v_space: Vec<KElem> = factors.iter().filter(|f| f.j == 0).map(|f| f.b.clone()).collect();
    let size = v_space.len() as u64;
    let v = split_degree(size, p).0;
    let per_factor = p.pow(l.saturating_sub(v));
    let consistent = p.pow(v) == size
        && v <= l
        && factors.iter().all(|f| f.multiplicity as u64 == per_factor)
        && (0..m).all(|j| factors.iter().filter(|f| f.j == j).count() as u64 == size);
    if !consistent {
        return Ok(Detection::NotSpecial(NotSpecialReason::InconsistentMultiplicities));
    }
    // Center w of the symmetric form; A = -w.
    let w = if m > 1 {
        let b = factors
            .iter()
            .filter(|f| f.j == m - 1)
            .map(|f| &f.b)
            .min()
            .expect("m-1 block is nonempty");
        let zinv = ctx.inv(zeta)?;
        let denom = k.constant(ctx.sub(GfElem::ONE, zinv));
        k.div(b, &denom)?
    } else {
        k.zero()
    };
    let a = k.neg(&w);
    let e = m * per_factor;
    let f_d = f.lead().expect("nonzero").clone();
    let g0 = k.kpoly_eval(&fk, &w);
    let prod0 = v_space
        .iter()
        .fold(k.from_t(f_d.clone()), |acc, b| k.mul(&acc, &k.pow(&k.neg(b), e)));
    let c = k.sub(&g0, &prod0);
    let form = SpecialForm {
        f_d,
        a,
        c,
        zeta,
        m,
        l,
        v,
        v_space,
        linear_factors: factors,
    };
    let rebuilt = normal_form_expand(&k, &form.f_d, &form.a, &form.c, &form.v_space, e);
    if rebuilt != fk {
        return Err(Error::internal("special normal form does not reconstruct f"));
    }
    if !verify_bivariate(&k, &fk, zeta, &form.linear_factors) {
        return Err(Error::internal("linear factors do not multiply to f(X) - f(Y)"));
    }
    Ok(Detection::Special(form))
}

/// Parameters of the normal form accepted by [`construct_special`].
#[derive(Clone, Debug)]
pub struct SpecialParams {
    pub f_d: TPoly,
    pub a: KElem,
    pub c: KElem,
    pub m: u64,
    pub l: u32,
    pub v: u32,
    pub v_space: Vec<KElem>,
}

fn validate_params(ctx: &FieldCtx, k: &KField<'_>, prm: &SpecialParams) -> Result<GfElem> {
    let p = ctx.p() as u64;
    let d = p.pow(prm.l) * prm.m;
    if d < 2 {
        return Err(Error::validation("need d = p^l m >= 2"));
    }
    if prm.m.is_multiple_of(p) {
        return Err(Error::validation("p must not divide m"));
    }
    let zeta = ctx
        .root_of_unity(prm.m)
        .ok_or_else(|| Error::validation(format!("m = {} does not divide q - 1", prm.m)))?;
    if prm.v > prm.l {
        return Err(Error::validation("need v <= l"));
    }
    if prm.f_d.is_zero() {
        return Err(Error::validation("f_d must be nonzero"));
    }
    let mut set = prm.v_space.clone();
    set.sort();
    set.dedup();
    if set.len() != prm.v_space.len() || set.len() as u64 != p.pow(prm.v) {
        return Err(Error::validation(format!(
            "V must consist of p^v = {} distinct elements",
            p.pow(prm.v)
        )));
    }
    for a in &set {
        if set.binary_search(&k.scale(a, zeta)).is_err() {
            return Err(Error::validation("V is not closed under multiplication by zeta"));
        }
        for b in &set {
            if set.binary_search(&k.add(a, b)).is_err() {
                return Err(Error::validation("V is not closed under addition"));
            }
        }
    }
    Ok(zeta)
}

/// Expand the normal form; the result must have coefficients in `F_q[T]`.
pub fn construct_special(ctx: &FieldCtx, prm: &SpecialParams) -> Result<XPoly> {
    let k = KField::new(ctx);
    validate_params(ctx, &k, prm)?;
    let p = ctx.p() as u64;
    let e = prm.m * p.pow(prm.l - prm.v);
    let coeffs = normal_form_expand(&k, &prm.f_d, &prm.a, &prm.c, &prm.v_space, e);
    let bad: Vec<String> = coeffs
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_integral())
        .map(|(i, c)| format!("X^{i}: {}", k.format(c)))
        .collect();
    if !bad.is_empty() {
        return Err(Error::validation(format!(
            "construction is not integral; offending coefficients {}",
            bad.join(", ")
        )));
    }
    Ok(XPoly::new(coeffs.into_iter().map(|c| c.num().clone()).collect()))
}

/// Factor multiset `{(j, zeta^j A - A + b)}` predicted by the parameters,
/// each with multiplicity `p^{l-v}`.
pub fn expected_factors(ctx: &FieldCtx, prm: &SpecialParams) -> Result<Vec<LinearFactor>> {
    let k = KField::new(ctx);
    let zeta = validate_params(ctx, &k, prm)?;
    let mult = (ctx.p() as u64).pow(prm.l - prm.v) as u32;
    let mut out = Vec::new();
    for j in 0..prm.m {
        let z = ctx.pow(zeta, j);
        for b in &prm.v_space {
            let shift = k.add(&k.sub(&k.scale(&prm.a, z), &prm.a), b);
            out.push(LinearFactor {
                j,
                b: shift,
                multiplicity: mult,
            });
        }
    }
    out.sort();
    Ok(out)
}

pub fn factor_multiset(form: &SpecialForm) -> Vec<LinearFactor> {
    let mut v = form.linear_factors.clone();
    v.sort();
    v
}

/// Serializable view with every field element rendered as a literal.
#[derive(Clone, Debug, Serialize)]
pub struct SpecialFormView {
    pub special: bool,
    pub f_d: String,
    #[serde(rename = "A")]
    pub a: String,
    #[serde(rename = "C")]
    pub c: String,
    pub zeta: String,
    pub m: u64,
    pub l: u32,
    pub v: u32,
    #[serde(rename = "V")]
    pub v_space: Vec<String>,
    pub linear_factors: Vec<BTreeMap<String, String>>,
}

impl SpecialForm {
    pub fn view(&self, ctx: &FieldCtx) -> SpecialFormView {
        let k = KField::new(ctx);
        SpecialFormView {
            special: true,
            f_d: format_tpoly(ctx, &self.f_d),
            a: k.format(&self.a),
            c: k.format(&self.c),
            zeta: ctx.format_elem(self.zeta),
            m: self.m,
            l: self.l,
            v: self.v,
            v_space: self.v_space.iter().map(|b| k.format(b)).collect(),
            linear_factors: self
                .linear_factors
                .iter()
                .map(|lf| {
                    BTreeMap::from([
                        ("j".to_string(), lf.j.to_string()),
                        ("b".to_string(), k.format(&lf.b)),
                        ("multiplicity".to_string(), lf.multiplicity.to_string()),
                    ])
                })
                .collect(),
        }
    }
}
