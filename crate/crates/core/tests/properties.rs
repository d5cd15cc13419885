//! Randomized invariants, each checked against an independent oracle.

use fflcm_core::gf::FieldCtx;
use fflcm_core::kelem::KField;
use fflcm_core::lcm_engine::{lcm_oracle, Engine};
use fflcm_core::local_counts::{bad_primes, oracle_rho, LocalCounts};
use fflcm_core::roots::rational_roots;
use fflcm_core::symmetry::{brute_vf, compute_vf};
use fflcm_core::tpoly::{
    enumerate_monic, enumerate_primes, factor, is_irreducible, monic_count, primes_of_degree, valuation,
    TPoly, TRing,
};
use fflcm_core::xpoly::{XPoly, XRing};
use fflcm_core::GfElem;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const FIELDS: [(u32, u32); 5] = [(2, 1), (3, 1), (2, 2), (5, 1), (3, 2)];

fn field(i: usize) -> FieldCtx {
    let (p, k) = FIELDS[i % FIELDS.len()];
    FieldCtx::new(p, k, None).unwrap()
}

fn tpoly(ctx: &FieldCtx, raw: &[u32]) -> TPoly {
    TRing::new(ctx).poly(raw.iter().map(|&c| ctx.elem((c % ctx.q()) as u64)).collect())
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `det` by cofactor expansion along the first row.
fn det(t: &TRing<'_>, m: &[Vec<TPoly>]) -> TPoly {
    if m.is_empty() {
        return t.one();
    }
    let mut acc = t.zero();
    for (j, a) in m[0].iter().enumerate() {
        if a.is_zero() {
            continue;
        }
        let minor: Vec<Vec<TPoly>> = m[1..]
            .iter()
            .map(|row| row.iter().enumerate().filter(|(c, _)| *c != j).map(|(_, x)| x.clone()).collect())
            .collect();
        let term = t.mul(a, &det(t, &minor));
        acc = if j % 2 == 0 { t.add(&acc, &term) } else { t.sub(&acc, &term) };
    }
    acc
}

fn sylvester(t: &TRing<'_>, a: &XPoly, b: &XPoly) -> Vec<Vec<TPoly>> {
    let (da, db) = (a.d(), b.d());
    let size = da + db;
    let mut rows = Vec::new();
    for (src, shifts) in [(a, db), (b, da)] {
        for s in 0..shifts {
            let mut row = vec![t.zero(); size];
            for (i, c) in src.coeffs().iter().rev().enumerate() {
                row[s + i] = c.clone();
            }
            rows.push(row);
        }
    }
    rows
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn factorization_reconstructs(fi in 0usize..5, raw in prop::collection::vec(0u32..9, 1..13), seed in any::<u64>()) {
        let ctx = field(fi);
        let t = TRing::new(&ctx);
        let a = tpoly(&ctx, &raw);
        prop_assume!(!a.is_zero());
        let fac = factor(&ctx, &a, &mut rng(seed)).unwrap();
        prop_assert_eq!(fac.reconstruct(t), a.clone());
        for (p, e) in &fac.factors {
            prop_assert!(is_irreducible(&ctx, p).unwrap());
            prop_assert_eq!(p.lead().copied(), Some(GfElem::from_index(1)));
            prop_assert_eq!(valuation(&ctx, &a, p).unwrap(), *e);
        }
    }

    #[test]
    fn valuation_matches_factorization(fi in 0usize..5, raw in prop::collection::vec(0u32..9, 1..9)) {
        let ctx = field(fi);
        let a = tpoly(&ctx, &raw);
        prop_assume!(!a.is_zero());
        let fac = factor(&ctx, &a, &mut rng(1)).unwrap();
        for p in enumerate_primes(&ctx, 2) {
            prop_assert_eq!(valuation(&ctx, &a, &p).unwrap(), fac.exponent_of(&p));
        }
    }

    #[test]
    fn resultant_matches_sylvester_determinant(
        fi in 0usize..3,
        a in prop::collection::vec(prop::collection::vec(0u32..9, 0..3), 2..5),
        b in prop::collection::vec(prop::collection::vec(0u32..9, 0..3), 2..4),
    ) {
        let ctx = field(fi);
        let x = XRing::new(&ctx);
        let a = XPoly::new(a.iter().map(|c| tpoly(&ctx, c)).collect());
        let b = XPoly::new(b.iter().map(|c| tpoly(&ctx, c)).collect());
        prop_assume!(a.d() >= 1 && b.d() >= 1);
        let res = x.resultant_x(&a, &b).unwrap();
        prop_assert_eq!(res, det(&x.t(), &sylvester(&x.t(), &a, &b)));
    }

    #[test]
    fn shared_root_mod_p_divides_discriminant(
        fi in 0usize..3,
        r in prop::collection::vec(0u32..9, 1..3),
        g in prop::collection::vec(prop::collection::vec(0u32..9, 0..2), 1..3),
        h in prop::collection::vec(prop::collection::vec(0u32..9, 0..2), 1..4),
        pi in 0usize..8,
    ) {
        // f = (X - r)^2 g + P h has a double root mod P.
        let ctx = field(fi);
        let x = XRing::new(&ctx);
        let t = x.t();
        let primes = enumerate_primes(&ctx, 2);
        let prime = primes[pi % primes.len()].clone();
        let lin = XPoly::new(vec![t.neg(&tpoly(&ctx, &r)), t.one()]);
        let mut g = XPoly::new(g.iter().map(|c| tpoly(&ctx, c)).collect());
        if g.is_zero() {
            g = x.constant(t.one());
        }
        let h = XPoly::new(h.iter().map(|c| tpoly(&ctx, c)).collect());
        let f = x.add(&x.mul(&x.mul(&lin, &lin), &g), &x.scale(&h, &prime));
        prop_assume!(f.d() >= 2);
        prop_assume!(!t.divides(&prime, f.lead().unwrap()).unwrap());
        let df = x.derivative_x(&f);
        prop_assume!(!df.is_zero());
        let res = x.resultant_x(&f, &df).unwrap();
        prop_assert!(t.divides(&prime, &res).unwrap());
    }

    #[test]
    fn rational_roots_recover_planted_roots(
        fi in 0usize..3,
        roots in prop::collection::vec(prop::collection::vec(0u32..9, 0..3), 1..4),
        extra in prop::collection::vec(0u32..9, 0..2),
        seed in any::<u64>(),
    ) {
        let ctx = field(fi);
        let x = XRing::new(&ctx);
        let t = x.t();
        let k = KField::new(&ctx);
        let mut h = XPoly::new(vec![tpoly(&ctx, &extra), t.zero(), t.one()]);
        if h.coeffs()[0].is_zero() {
            h = x.constant(t.one());
        }
        let mut planted = Vec::new();
        for r in &roots {
            let r = tpoly(&ctx, r);
            h = x.mul(&h, &XPoly::new(vec![t.neg(&r), t.one()]));
            planted.push(k.from_t(r));
        }
        let found = rational_roots(&ctx, &h, &mut rng(seed)).unwrap();
        for r in &planted {
            let want = planted.iter().filter(|s| *s == r).count() as u32;
            let got = found.iter().find(|(s, _)| s == r).map_or(0, |(_, m)| *m);
            prop_assert!(got >= want, "root {} multiplicity {} < {}", k.format(r), got, want);
        }
        let total: u32 = found.iter().map(|(_, m)| m).sum();
        prop_assert!(total as usize <= h.d());
        for (r, _) in &found {
            let val = k.kpoly_eval(
                &h.coeffs().iter().map(|c| k.from_t(c.clone())).collect::<Vec<_>>(),
                r,
            );
            prop_assert!(val.is_zero());
        }
    }

    #[test]
    fn rho_matches_oracle(
        fi in 0usize..2,
        g in prop::collection::vec(0u32..9, 0..3),
        pi in 0usize..8,
        seed in any::<u64>(),
    ) {
        // X^d + g(X) + T is linear in T, hence irreducible.
        let ctx = field(fi);
        let t = TRing::new(&ctx);
        let mut coeffs: Vec<TPoly> = g.iter().map(|&c| t.constant(ctx.elem((c % ctx.q()) as u64))).collect();
        coeffs.resize(g.len().max(1), t.zero());
        coeffs[0] = t.add(&coeffs[0], &t.x());
        coeffs.push(t.one());
        let f = XPoly::new(coeffs);
        let primes = enumerate_primes(&ctx, 2);
        let prime = &primes[pi % primes.len()];
        let mut r = rng(seed);
        let lc = LocalCounts::new(&ctx, &f, u64::MAX, &mut r).unwrap();
        let size = monic_count(&ctx, prime.degree().unwrap() as u32).unwrap();
        let kmax = (1..6).take_while(|&k| size.pow(k) <= 729).last().unwrap_or(1);
        let tree = lc.rho_tree(prime, kmax, &mut r).unwrap();
        for k in 1..=kmax {
            prop_assert_eq!(tree[k as usize - 1], oracle_rho(&ctx, &f, prime, k).unwrap());
            prop_assert_eq!(lc.rho(prime, k, false, &mut r).unwrap(), tree[k as usize - 1]);
        }
        // Hensel: simple roots lift uniquely
        if lc.is_separable() && lc.mu(prime).unwrap() == Some(0) {
            prop_assert!(tree.iter().all(|&v| v == tree[0]));
        }
    }

    #[test]
    fn sweep_matches_lcm_oracle(
        fi in 0usize..2,
        g in prop::collection::vec(prop::collection::vec(0u32..9, 0..2), 1..3),
        n in 1u32..4,
        threads in 1usize..4,
    ) {
        let ctx = field(fi);
        let t = TRing::new(&ctx);
        let mut coeffs: Vec<TPoly> = g.iter().map(|c| tpoly(&ctx, c)).collect();
        coeffs[0] = t.add(&coeffs[0], &t.x());
        coeffs.push(t.one());
        let f = XPoly::new(coeffs);
        let mut r = rng(3);
        let vs = compute_vf(&ctx, &f, &mut r).unwrap();
        let bad = bad_primes(&ctx, &f, &mut r).unwrap();
        let eng = Engine::new(&ctx, &f, vs, bad, 5).with_threads(Some(threads));
        let table = eng.sweep(n, 1 << 12).unwrap();
        prop_assert_eq!(table.deg_l(), lcm_oracle(&ctx, &f, n, 1 << 12).unwrap());
        if n >= eng.n0() {
            for (name, ok) in eng.identity_checks(&table) {
                prop_assert!(ok, "{} fails at n = {}", name, n);
            }
        }
    }

    #[test]
    fn vf_matches_scan(
        fi in 0usize..2,
        g in prop::collection::vec(prop::collection::vec(0u32..9, 0..2), 1..3),
        b in prop::collection::vec(0u32..9, 0..2),
    ) {
        // f = g(X^p - c X) + T with c = b^{p-1}, so b F_p lies in V_f.
        let ctx = field(fi);
        let x = XRing::new(&ctx);
        let t = x.t();
        let p = ctx.p() as usize;
        let b = tpoly(&ctx, &b);
        let c = t.pow(&b, p as u64 - 1);
        let mut inner = vec![t.zero(); p + 1];
        inner[1] = t.neg(&c);
        inner[p] = t.one();
        let inner = XPoly::new(inner);
        let mut f = x.constant(t.x());
        let mut pow = x.constant(t.one());
        let mut gs: Vec<TPoly> = g.iter().map(|c| tpoly(&ctx, c)).collect();
        gs.push(t.one());
        for gi in &gs {
            f = x.add(&f, &x.scale(&pow, gi));
            pow = x.mul(&pow, &inner);
        }
        let vs = compute_vf(&ctx, &f, &mut rng(9)).unwrap();
        let scan = brute_vf(&ctx, &f, 1, 1 << 12).unwrap();
        prop_assert_eq!(&vs.elements, &scan);
        for s in 0..p as u64 {
            prop_assert!(vs.contains(&t.scale(&b, &ctx.elem(s))));
        }
    }
}

#[test]
fn prime_enumeration_matches_irreducibility_test() {
    for fi in 0..3 {
        let ctx = field(fi);
        for n in 1..=4usize {
            let by_test: Vec<TPoly> = enumerate_monic(&ctx, n).filter(|m| is_irreducible(&ctx, m).unwrap()).collect();
            let mut listed = primes_of_degree(&ctx, n);
            listed.sort();
            let mut by_test = by_test;
            by_test.sort();
            assert_eq!(listed, by_test, "q = {}, n = {n}", ctx.q());
        }
    }
}

#[test]
fn prime_counts_satisfy_divisor_sum() {
    // sum_{e | n} e * pi_q(e) = q^n
    for fi in 0..5 {
        let ctx = field(fi);
        for n in 1..=5u32 {
            let qn = monic_count(&ctx, n).unwrap();
            if qn > 1 << 12 {
                continue;
            }
            let total: u64 = (1..=n)
                .filter(|e| n % e == 0)
                .map(|e| e as u64 * primes_of_degree(&ctx, e as usize).len() as u64)
                .sum();
            assert_eq!(total, qn, "q = {}, n = {n}", ctx.q());
        }
    }
}
