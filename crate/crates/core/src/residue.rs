//! Residue fields `F_q[T]/P` for a monic irreducible `P`, as a
//! [`FiniteField`] so that the generic polynomial toolkit can find roots
//! of `f mod P`.

use rand::Rng;

use crate::error::{Error, Result};
use crate::field::FiniteField;
use crate::gf::{FieldCtx, GfElem};
use crate::poly::PolyRing;
use crate::tpoly::{TPoly, TRing};

pub struct ResidueField<'a> {
    ctx: &'a FieldCtx,
    modulus: TPoly,
    deg: usize,
}

impl<'a> ResidueField<'a> {
    /// `P` must be monic irreducible of positive degree.
    pub fn new(ctx: &'a FieldCtx, prime: &TPoly) -> Result<Self> {
        let ring = PolyRing::new(ctx);
        let deg = match prime.degree() {
            Some(d) if d >= 1 => d,
            _ => return Err(Error::domain("residue field of a constant")),
        };
        if prime.lead() != Some(&GfElem::ONE) || !ring.is_irreducible(prime)? {
            return Err(Error::domain("residue field modulus must be monic irreducible"));
        }
        Ok(ResidueField {
            ctx,
            modulus: prime.clone(),
            deg,
        })
    }

    pub fn ctx(&self) -> &'a FieldCtx {
        self.ctx
    }

    pub fn modulus(&self) -> &TPoly {
        &self.modulus
    }

    pub fn degree(&self) -> usize {
        self.deg
    }

    fn ring(&self) -> TRing<'a> {
        PolyRing::new(self.ctx)
    }

    pub fn reduce(&self, a: &TPoly) -> TPoly {
        self.ring().rem(a, &self.modulus).expect("nonzero modulus")
    }

    /// Residues in enumeration order (`|P|` of them).
    pub fn elements(&self) -> impl Iterator<Item = TPoly> + '_ {
        let q = self.ctx.q() as u64;
        let count = q.pow(self.deg as u32);
        (0..count).map(move |mut i| {
            let mut v = Vec::with_capacity(self.deg);
            for _ in 0..self.deg {
                v.push(GfElem::from_index((i % q) as u32));
                i /= q;
            }
            self.ring().poly(v)
        })
    }
}

impl FiniteField for ResidueField<'_> {
    type Elem = TPoly;

    fn zero(&self) -> TPoly {
        self.ring().zero()
    }

    fn one(&self) -> TPoly {
        self.ring().one()
    }

    fn is_zero(&self, a: &TPoly) -> bool {
        a.is_zero()
    }

    fn add(&self, a: &TPoly, b: &TPoly) -> TPoly {
        self.ring().add(a, b)
    }

    fn sub(&self, a: &TPoly, b: &TPoly) -> TPoly {
        self.ring().sub(a, b)
    }

    fn neg(&self, a: &TPoly) -> TPoly {
        self.ring().neg(a)
    }

    fn mul(&self, a: &TPoly, b: &TPoly) -> TPoly {
        self.ring().mulmod(a, b, &self.modulus)
    }

    fn inv(&self, a: &TPoly) -> Option<TPoly> {
        if a.is_zero() {
            return None;
        }
        // Extended Euclid tracking only the cofactor of `a`.
        let ring = self.ring();
        let (mut r0, mut r1) = (self.modulus.clone(), self.reduce(a));
        let (mut s0, mut s1) = (ring.zero(), ring.one());
        while !r1.is_zero() {
            let (quot, rem) = ring.divmod(&r0, &r1).expect("nonzero");
            let s2 = ring.sub(&s0, &ring.mul(&quot, &s1));
            r0 = std::mem::replace(&mut r1, rem);
            s0 = std::mem::replace(&mut s1, s2);
        }
        // r0 is a nonzero constant since the modulus is irreducible.
        let c = self.ctx.inv(r0.coeffs()[0]).ok()?;
        Some(self.reduce(&ring.scale(&s0, &c)))
    }

    fn characteristic(&self) -> u32 {
        self.ctx.p()
    }

    fn prime_degree(&self) -> u32 {
        self.ctx.k() * self.deg as u32
    }

    fn random_elem<R: Rng + ?Sized>(&self, rng: &mut R) -> TPoly {
        let v = (0..self.deg).map(|_| self.ctx.random_elem(rng)).collect();
        self.ring().poly(v)
    }

    fn from_u64(&self, n: u64) -> TPoly {
        self.ring().constant(self.ctx.elem(n))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tpoly::parse_tpoly;

    #[test]
    fn residue_field_axioms_f2_deg3() {
        let f2 = FieldCtx::prime(2).unwrap();
        let p = parse_tpoly(&f2, "T^3+T+1").unwrap();
        let k = ResidueField::new(&f2, &p).unwrap();
        let elems: Vec<_> = k.elements().collect();
        assert_eq!(elems.len(), 8);
        for a in &elems {
            if !a.is_zero() {
                let inv = k.inv(a).unwrap();
                assert!(k.is_one(&k.mul(a, &inv)));
                assert!(k.is_one(&k.pow(a, 7)));
            }
            for b in &elems {
                assert_eq!(k.mul(a, b), k.mul(b, a));
            }
        }
    }

    #[test]
    fn rejects_reducible_modulus() {
        let f3 = FieldCtx::prime(3).unwrap();
        let p = parse_tpoly(&f3, "T^2+2").unwrap();
        assert!(ResidueField::new(&f3, &p).is_err());
    }

    #[test]
    fn pth_root_in_residue_field() {
        let f3 = FieldCtx::prime(3).unwrap();
        let p = parse_tpoly(&f3, "T^2+1").unwrap();
        let k = ResidueField::new(&f3, &p).unwrap();
        for a in k.elements() {
            assert_eq!(k.pow(&k.pth_root(&a), 3), a);
        }
    }
}
