//! The finite-field interface shared by `F_q` and the residue fields
//! `F_q[T]/P`. Elements are plain values; the field object carries all
//! context (modulus, tables), so one polynomial toolkit serves both.

use std::fmt::Debug;
use std::hash::Hash;

use rand::Rng;

pub trait FiniteField: Sync {
    type Elem: Clone + PartialEq + Eq + Hash + Debug + Send + Sync;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    /// `None` exactly when `a` is zero.
    fn inv(&self, a: &Self::Elem) -> Option<Self::Elem>;

    fn characteristic(&self) -> u32;
    /// `e` with field order `p^e`.
    fn prime_degree(&self) -> u32;

    fn random_elem<R: Rng + ?Sized>(&self, rng: &mut R) -> Self::Elem;

    fn is_one(&self, a: &Self::Elem) -> bool {
        *a == self.one()
    }

    fn pow(&self, a: &Self::Elem, mut e: u64) -> Self::Elem {
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

    /// Inverse of the Frobenius `x -> x^p`.
    fn pth_root(&self, a: &Self::Elem) -> Self::Elem {
        let p = self.characteristic() as u64;
        let mut r = a.clone();
        for _ in 1..self.prime_degree() {
            r = self.pow(&r, p);
        }
        r
    }

    /// Image of an integer under `Z -> F_p -> field`.
    fn from_u64(&self, n: u64) -> Self::Elem {
        let n = n % self.characteristic() as u64;
        let mut acc = self.zero();
        let one = self.one();
        for _ in 0..n {
            acc = self.add(&acc, &one);
        }
        acc
    }

    /// `dst[i] -= c * src[i]`; the inner loop of division and reduction.
    fn sub_mul_assign(&self, dst: &mut [Self::Elem], src: &[Self::Elem], c: &Self::Elem) {
        for (d, s) in dst.iter_mut().zip(src) {
            *d = self.sub(d, &self.mul(c, s));
        }
    }

    /// `dst[i] += c * src[i]`.
    fn add_mul_assign(&self, dst: &mut [Self::Elem], src: &[Self::Elem], c: &Self::Elem) {
        for (d, s) in dst.iter_mut().zip(src) {
            *d = self.add(d, &self.mul(c, s));
        }
    }
}
