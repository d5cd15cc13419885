//! A partial irreducibility test for `f` in `F_q[T][X]`. It decides only
//! the shapes it can settle exactly and otherwise reports `Unverified`.

use rand::Rng;
use serde::Serialize;

use crate::error::Result;
use crate::gf::FieldCtx;
use crate::roots::rational_roots;
use crate::tpoly::{format_tpoly, is_irreducible};
use crate::xpoly::{XPoly, XRing};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", content = "reason", rename_all = "kebab-case")]
pub enum Irreducibility {
    Irreducible(String),
    Reducible(String),
    Unverified(String),
}

impl Irreducibility {
    pub fn is_reducible(&self) -> bool {
        matches!(self, Irreducibility::Reducible(_))
    }

    pub fn is_verified(&self) -> bool {
        matches!(self, Irreducibility::Irreducible(_))
    }
}

pub fn irreducibility_guard<R: Rng + ?Sized>(
    ctx: &FieldCtx,
    f: &XPoly,
    rng: &mut R,
) -> Result<Irreducibility> {
    use Irreducibility::*;
    let x = XRing::new(ctx);
    let d = f.d();
    if d == 0 {
        return Ok(Unverified("constant in X".into()));
    }
    let content = x.content(f);
    if content.degree().unwrap_or(0) > 0 {
        return Ok(Reducible(format!(
            "content {} is not a unit",
            format_tpoly(ctx, &content)
        )));
    }
    if d == 1 {
        return Ok(Irreducible("primitive and linear in X".into()));
    }
    if d <= 3 {
        let roots = rational_roots(ctx, f, rng)?;
        return Ok(if roots.is_empty() {
            Irreducible(format!("primitive of degree {d} in X without roots in F_q(T)"))
        } else {
            Reducible("has a root in F_q(T)".into())
        });
    }
    // Now view f in F_q[X][T].
    let ft = x.transpose(f);
    let e = ft.d();
    if e == 0 {
        let g = &ft.coeffs()[0];
        return Ok(if is_irreducible(ctx, g)? {
            Irreducible("irreducible element of F_q[X]".into())
        } else {
            Reducible("reducible element of F_q[X]".into())
        });
    }
    let content_x = x.content(&ft);
    if content_x.degree().unwrap_or(0) > 0 {
        return Ok(Reducible("nonconstant content in F_q[X]".into()));
    }
    if e == 1 {
        return Ok(Irreducible("primitive and linear in T".into()));
    }
    if e <= 3 {
        let roots = rational_roots(ctx, &ft, rng)?;
        return Ok(if roots.is_empty() {
            Irreducible(format!("primitive of degree {e} in T without roots in F_q(X)"))
        } else {
            Reducible("has a root T = r(X) in F_q(X)".into())
        });
    }
    Ok(Unverified(format!("degree {d} in X and {e} in T")))
}
