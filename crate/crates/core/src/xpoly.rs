//! Polynomials in `X` over `F_q[T]`.

use crate::error::{Error, Result};
use crate::gf::{FieldCtx, GfElem};
use crate::poly::{Poly, PolyRing};
use crate::residue::ResidueField;
use crate::tpoly::{format_tpoly, parse_tpoly, TPoly, TRing};

/// `f = sum f_i X^i`; no trailing zero coefficients are stored.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct XPoly {
    coeffs: Vec<TPoly>,
}

impl XPoly {
    pub fn new(mut coeffs: Vec<TPoly>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        XPoly { coeffs }
    }

    pub fn coeffs(&self) -> &[TPoly] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `deg_X`, `None` for zero.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn d(&self) -> usize {
        self.degree().unwrap_or(0)
    }

    pub fn coeff(&self, i: usize) -> Option<&TPoly> {
        self.coeffs.get(i)
    }

    pub fn lead(&self) -> Option<&TPoly> {
        self.coeffs.last()
    }

    /// `max_i deg f_i`, or `-1` for zero.
    pub fn deg_t(&self) -> i64 {
        self.coeffs.iter().map(|c| c.degree_i64()).max().unwrap_or(-1)
    }

    /// Parse from one `T`-literal per power of `X`, constant first.
    pub fn parse(ctx: &FieldCtx, literals: &[impl AsRef<str>]) -> Result<Self> {
        let coeffs = literals
            .iter()
            .map(|s| parse_tpoly(ctx, s.as_ref()))
            .collect::<Result<Vec<_>>>()?;
        let f = XPoly::new(coeffs);
        if f.is_zero() {
            return Err(Error::validation("f is the zero polynomial"));
        }
        Ok(f)
    }

    /// Parse the JSON array form, e.g. `["T","0","1"]` for `X^2+T`.
    pub fn parse_json(ctx: &FieldCtx, json: &str) -> Result<Self> {
        let lits: Vec<String> = serde_json::from_str(json)
            .map_err(|e| Error::validation(format!("f must be a JSON array of strings: {e}")))?;
        XPoly::parse(ctx, &lits)
    }

    pub fn to_literals(&self, ctx: &FieldCtx) -> Vec<String> {
        self.coeffs.iter().map(|c| format_tpoly(ctx, c)).collect()
    }

    /// Human-readable form such as `X^3+2*X+T`.
    pub fn display(&self, ctx: &FieldCtx) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut parts = Vec::new();
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let cs = format_tpoly(ctx, c);
            let mono = match i {
                0 => String::new(),
                1 => "X".into(),
                _ => format!("X^{i}"),
            };
            parts.push(match (i, cs.as_str()) {
                (0, _) => cs,
                (_, "1") => mono,
                _ if cs.contains('+') => format!("({cs})*{mono}"),
                _ => format!("{cs}*{mono}"),
            });
        }
        parts.join("+")
    }
}

/// Operations on [`XPoly`] over a fixed `F_q`.
#[derive(Clone, Copy)]
pub struct XRing<'a> {
    ctx: &'a FieldCtx,
}

impl<'a> XRing<'a> {
    pub fn new(ctx: &'a FieldCtx) -> Self {
        XRing { ctx }
    }

    pub fn ctx(&self) -> &'a FieldCtx {
        self.ctx
    }

    pub fn t(&self) -> TRing<'a> {
        PolyRing::new(self.ctx)
    }

    pub fn constant(&self, c: TPoly) -> XPoly {
        XPoly::new(vec![c])
    }

    pub fn add(&self, a: &XPoly, b: &XPoly) -> XPoly {
        let t = self.t();
        let n = a.coeffs.len().max(b.coeffs.len());
        let zero = t.zero();
        XPoly::new(
            (0..n)
                .map(|i| t.add(a.coeffs.get(i).unwrap_or(&zero), b.coeffs.get(i).unwrap_or(&zero)))
                .collect(),
        )
    }

    pub fn sub(&self, a: &XPoly, b: &XPoly) -> XPoly {
        let t = self.t();
        let n = a.coeffs.len().max(b.coeffs.len());
        let zero = t.zero();
        XPoly::new(
            (0..n)
                .map(|i| t.sub(a.coeffs.get(i).unwrap_or(&zero), b.coeffs.get(i).unwrap_or(&zero)))
                .collect(),
        )
    }

    pub fn mul(&self, a: &XPoly, b: &XPoly) -> XPoly {
        if a.is_zero() || b.is_zero() {
            return XPoly::new(Vec::new());
        }
        let t = self.t();
        let mut out = vec![t.zero(); a.coeffs.len() + b.coeffs.len() - 1];
        for (i, x) in a.coeffs.iter().enumerate() {
            for (j, y) in b.coeffs.iter().enumerate() {
                out[i + j] = t.add(&out[i + j], &t.mul(x, y));
            }
        }
        XPoly::new(out)
    }

    pub fn scale(&self, a: &XPoly, c: &TPoly) -> XPoly {
        let t = self.t();
        XPoly::new(a.coeffs.iter().map(|x| t.mul(x, c)).collect())
    }

    /// `f(Q)` by Horner.
    pub fn eval(&self, f: &XPoly, q: &TPoly) -> TPoly {
        let t = self.t();
        f.coeffs
            .iter()
            .rev()
            .fold(t.zero(), |acc, c| t.add(&t.mul(&acc, q), c))
    }

    /// `f(X + g)`.
    pub fn shift(&self, f: &XPoly, g: &TPoly) -> XPoly {
        let lin = XPoly::new(vec![g.clone(), self.t().one()]);
        f.coeffs.iter().rev().fold(XPoly::new(Vec::new()), |acc, c| {
            self.add(&self.mul(&acc, &lin), &self.constant(c.clone()))
        })
    }

    pub fn derivative_x(&self, f: &XPoly) -> XPoly {
        let t = self.t();
        XPoly::new(
            f.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| t.scale(c, &self.ctx.elem(i as u64)))
                .collect(),
        )
    }

    pub fn derivative_t(&self, f: &XPoly) -> XPoly {
        let t = self.t();
        XPoly::new(f.coeffs.iter().map(|c| t.derivative(c)).collect())
    }

    pub fn is_separable(&self, f: &XPoly) -> bool {
        !self.derivative_x(f).is_zero()
    }

    /// Monic gcd of the coefficients.
    pub fn content(&self, f: &XPoly) -> TPoly {
        let t = self.t();
        f.coeffs.iter().fold(t.zero(), |g, c| t.gcd(&g, c))
    }

    /// Pseudo-remainder `lc(b)^{deg a - deg b + 1} a mod b`.
    fn prem(&self, a: &XPoly, b: &XPoly) -> XPoly {
        let t = self.t();
        let db = b.d();
        let lb = b.lead().expect("nonzero").clone();
        let mut r = a.coeffs.clone();
        let mut e = a.d() + 1 - db;
        while r.len() > db && !r.is_empty() {
            let top = r.len() - 1;
            let lr = r[top].clone();
            for c in r.iter_mut() {
                *c = t.mul(c, &lb);
            }
            for (j, bc) in b.coeffs.iter().enumerate() {
                let idx = top - db + j;
                r[idx] = t.sub(&r[idx], &t.mul(&lr, bc));
            }
            e -= 1;
            while r.last().is_some_and(|c| c.is_zero()) {
                r.pop();
            }
        }
        let factor = t.pow(&lb, e as u64);
        XPoly::new(r.iter().map(|c| t.mul(c, &factor)).collect())
    }

    /// `Res_X(a, b)` by the subresultant remainder sequence.
    /// Two constants give `1` (the empty determinant).
    pub fn resultant_x(&self, a: &XPoly, b: &XPoly) -> Result<TPoly> {
        if a.is_zero() || b.is_zero() {
            return Err(Error::domain("resultant with the zero polynomial"));
        }
        let t = self.t();
        let neg_one = self.ctx.neg(GfElem::ONE);
        let (mut a, mut b) = (a.clone(), b.clone());
        let mut sign = GfElem::ONE;
        if a.d() < b.d() {
            if a.d() % 2 == 1 && b.d() % 2 == 1 {
                sign = neg_one;
            }
            std::mem::swap(&mut a, &mut b);
        }
        if b.d() == 0 {
            let r = t.pow(b.lead().expect("nonzero"), a.d() as u64);
            return Ok(t.scale(&r, &sign));
        }
        let mut g = t.one();
        let mut h = t.one();
        loop {
            let delta = a.d() - b.d();
            if a.d() % 2 == 1 && b.d() % 2 == 1 {
                sign = self.ctx.mul(sign, neg_one);
            }
            let r = self.prem(&a, &b);
            a = b;
            let div = t.mul(&g, &t.pow(&h, delta as u64));
            b = XPoly::new(
                r.coeffs
                    .iter()
                    .map(|c| t.div_exact(c, &div))
                    .collect::<Result<Vec<_>>>()
                    .map_err(|_| Error::internal("subresultant division not exact"))?,
            );
            g = a.lead().expect("nonzero").clone();
            h = match delta {
                0 => h,
                1 => g.clone(),
                _ => t.div_exact(&t.pow(&g, delta as u64), &t.pow(&h, delta as u64 - 1))?,
            };
            if b.is_zero() {
                return Ok(t.zero());
            }
            if b.d() == 0 {
                break;
            }
        }
        let lb = b.lead().expect("nonzero");
        let da = a.d() as u64;
        let res = if da == 1 {
            lb.clone()
        } else {
            t.div_exact(&t.pow(lb, da), &t.pow(&h, da - 1))?
        };
        Ok(t.scale(&res, &sign))
    }

    /// `(h, m)` with `f(X) = h(X^{p^m})`, `m` maximal.
    pub fn inseparable_descent(&self, f: &XPoly) -> (XPoly, u32) {
        let p = self.ctx.p() as usize;
        let mut h = f.clone();
        let mut m = 0;
        while h.d() > 0 && !self.is_separable(&h) {
            h = XPoly::new(h.coeffs.iter().step_by(p).cloned().collect());
            m += 1;
        }
        (h, m)
    }

    /// `f(X^{p^m})`.
    pub fn inflate(&self, h: &XPoly, m: u32) -> XPoly {
        let step = (self.ctx.p() as usize).pow(m);
        let mut out = vec![self.t().zero(); h.d() * step + 1];
        for (i, c) in h.coeffs.iter().enumerate() {
            out[i * step] = c.clone();
        }
        XPoly::new(out)
    }

    /// Image of `f` in `(F_q[T]/P)[X]`.
    pub fn reduce_mod(&self, f: &XPoly, field: &ResidueField<'_>) -> Poly<TPoly> {
        PolyRing::new(field).poly(f.coeffs.iter().map(|c| field.reduce(c)).collect())
    }

    /// Swap the roles of `X` and `T`: the result is a polynomial in `T`
    /// (stored as the outer variable) whose coefficients are polynomials
    /// in `X` (stored as the inner one).
    pub fn transpose(&self, f: &XPoly) -> XPoly {
        let t = self.t();
        let dt = f.deg_t().max(0) as usize;
        let mut out = vec![vec![GfElem::ZERO; f.coeffs.len()]; dt + 1];
        for (i, c) in f.coeffs.iter().enumerate() {
            for (j, a) in c.coeffs().iter().enumerate() {
                out[j][i] = *a;
            }
        }
        XPoly::new(out.into_iter().map(|v| t.poly(v)).collect())
    }
}
