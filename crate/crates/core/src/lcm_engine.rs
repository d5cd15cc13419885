//! Exhaustive sweep over `M_n`: factor every value `f(Q)` and aggregate
//! per-prime valuations, from which `deg L_f(n)`, its radical, `S_f(n)`
//! and the collision count are read off.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gf::FieldCtx;
use crate::poly::PolyRing;
use crate::symmetry::VSpace;
use crate::tpoly::{
    factor, format_tpoly, monic_count, monic_from_index, monic_index, valuation, TPoly, TRing,
};
use crate::xpoly::{XPoly, XRing};

/// Indices per work unit; fixed so that output never depends on threads.
const CHUNK: u64 = 64;

/// Aggregates for one prime over a full sweep.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PrimeEntry {
    /// `sum_Q v_P(f(Q))`.
    pub alpha: u64,
    /// `max_Q v_P(f(Q))`.
    pub beta: u32,
    /// Large primes only: class representatives of `{Q : P | f(Q)}`.
    pub support: BTreeSet<u64>,
    /// Large primes only: `e -> #{Q : v_P(f(Q)) = e}` for `e >= 1`.
    pub hist: BTreeMap<u32, u64>,
}

#[derive(Clone, Debug, Default)]
struct Acc {
    entries: BTreeMap<TPoly, PrimeEntry>,
    zero_values: Vec<u64>,
    degree_sum: u64,
    max_value_degree: u64,
    /// value -> class representative -> count
    values: HashMap<TPoly, BTreeMap<u64, u64>>,
}

impl Acc {
    fn merge(mut self, other: Acc) -> Acc {
        for (p, e) in other.entries {
            let slot = self.entries.entry(p).or_default();
            slot.alpha += e.alpha;
            slot.beta = slot.beta.max(e.beta);
            slot.support.extend(e.support);
            for (k, c) in e.hist {
                *slot.hist.entry(k).or_insert(0) += c;
            }
        }
        self.zero_values.extend(other.zero_values);
        self.degree_sum += other.degree_sum;
        self.max_value_degree = self.max_value_degree.max(other.max_value_degree);
        for (v, classes) in other.values {
            let slot = self.values.entry(v).or_default();
            for (rep, c) in classes {
                *slot.entry(rep).or_insert(0) += c;
            }
        }
        self
    }
}

/// Result of [`Engine::sweep`].
#[derive(Clone, Debug)]
pub struct ValuationTable {
    pub n: u32,
    pub n0: u32,
    /// Primes of degree above this are "large".
    pub large_threshold: usize,
    pub entries: BTreeMap<TPoly, PrimeEntry>,
    /// Indices in `M_n` of the `Q` with `f(Q) = 0`.
    pub zero_values: Vec<u64>,
    /// `sum_Q deg f(Q)` over nonzero values.
    pub degree_sum: u64,
    pub max_value_degree: u64,
    pub collisions: u64,
}

impl ValuationTable {
    pub fn defined(&self) -> bool {
        self.zero_values.is_empty()
    }

    fn large(&self) -> impl Iterator<Item = (&TPoly, &PrimeEntry)> {
        let th = self.large_threshold;
        self.entries.iter().filter(move |(p, _)| p.degree().unwrap_or(0) > th)
    }

    /// `sum beta_P deg P`; `None` when some value vanishes.
    pub fn deg_l(&self) -> Option<u64> {
        self.defined().then(|| {
            self.entries
                .iter()
                .map(|(p, e)| e.beta as u64 * p.degree().unwrap_or(0) as u64)
                .sum()
        })
    }

    pub fn deg_ell(&self) -> Option<u64> {
        self.defined().then(|| {
            self.entries
                .iter()
                .filter(|(_, e)| e.beta > 0)
                .map(|(p, _)| p.degree().unwrap_or(0) as u64)
                .sum()
        })
    }

    /// `sum alpha_P deg P`.
    pub fn deg_pf(&self) -> u64 {
        self.entries
            .iter()
            .map(|(p, e)| e.alpha * p.degree().unwrap_or(0) as u64)
            .sum()
    }

    /// Mass carried by primes with `deg P <= n + deg f_d`.
    pub fn deg_rf(&self) -> u64 {
        self.entries
            .iter()
            .filter(|(p, _)| p.degree().unwrap_or(0) <= self.large_threshold)
            .map(|(p, e)| e.alpha * p.degree().unwrap_or(0) as u64)
            .sum()
    }

    /// Large primes whose support meets at least two classes.
    pub fn s_f_support(&self) -> u64 {
        self.large().filter(|(_, e)| e.support.len() >= 2).count() as u64
    }

    /// Large primes with `|V_f| beta_P != alpha_P`.
    pub fn s_f_valuation(&self, vf_size: u64) -> u64 {
        self.large().filter(|(_, e)| vf_size * e.beta as u64 != e.alpha).count() as u64
    }
}

pub struct Engine<'a> {
    ctx: &'a FieldCtx,
    f: XPoly,
    vf: VSpace,
    n0: u32,
    bad: BTreeSet<TPoly>,
    seed: u64,
    threads: Option<usize>,
}

/// Least `n` with `deg f(Q) = dn + deg f_d` on `M_n` and every nonzero
/// element of `V_f` of degree `< n`.
pub fn compute_n0(f: &XPoly, vf: &VSpace) -> u32 {
    let d = f.d() as i64;
    let ed = f.lead().map_or(0, |c| c.degree_i64());
    let mut n_deg = 0i64;
    for (i, c) in f.coeffs().iter().enumerate().take(f.d()) {
        if c.is_zero() {
            continue;
        }
        // need (d - i) n + ed > deg f_i
        let gap = d - i as i64;
        let need = (c.degree_i64() - ed).div_euclid(gap) + 1;
        n_deg = n_deg.max(need);
    }
    let n_v = vf.max_degree().map_or(0, |m| m as i64 + 1);
    n_deg.max(n_v).max(0) as u32
}

impl<'a> Engine<'a> {
    /// `bad` lists the exceptional primes (resultant and content divisors).
    pub fn new(ctx: &'a FieldCtx, f: &XPoly, vf: VSpace, bad: Vec<TPoly>, seed: u64) -> Self {
        let n0 = compute_n0(f, &vf);
        Engine {
            ctx,
            f: f.clone(),
            vf,
            n0,
            bad: bad.into_iter().collect(),
            seed,
            threads: None,
        }
    }

    /// Cap the worker count; `None` uses the global pool.
    pub fn with_threads(mut self, threads: Option<usize>) -> Self {
        self.threads = threads;
        self
    }

    pub fn n0(&self) -> u32 {
        self.n0
    }

    pub fn vf(&self) -> &VSpace {
        &self.vf
    }

    pub fn f(&self) -> &XPoly {
        &self.f
    }

    pub fn is_bad(&self, p: &TPoly) -> bool {
        self.bad.contains(p)
    }

    pub fn large_threshold(&self, n: u32) -> usize {
        n as usize + self.f.lead().and_then(|c| c.degree()).unwrap_or(0)
    }

    /// Smallest index among `Q + g`, `g in V_f` with `deg g < n`.
    fn class_rep(&self, q: &TPoly, idx: u64, n: u32) -> u64 {
        let t = TRing::new(self.ctx);
        self.vf
            .elements
            .iter()
            .filter(|g| g.degree().is_none_or(|dg| dg < n as usize))
            .filter(|g| !g.is_zero())
            .map(|g| monic_index(self.ctx, &t.add(q, g)))
            .fold(idx, u64::min)
    }

    fn run_chunk(&self, n: u32, chunk: u64, count: u64) -> Result<Acc> {
        let x = XRing::new(self.ctx);
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(chunk);
        let th = self.large_threshold(n);
        let mut acc = Acc::default();
        let start = chunk * CHUNK;
        let end = (start + CHUNK).min(count);
        for idx in start..end {
            let q = monic_from_index(self.ctx, n as usize, idx);
            let value = x.eval(&self.f, &q);
            if value.is_zero() {
                acc.zero_values.push(idx);
                continue;
            }
            let deg = value.degree().unwrap_or(0) as u64;
            acc.degree_sum += deg;
            acc.max_value_degree = acc.max_value_degree.max(deg);
            let rep = self.class_rep(&q, idx, n);
            let fac = factor(self.ctx, &value, &mut rng)?;
            for (p, e) in fac.factors {
                let large = p.degree().unwrap_or(0) > th;
                let slot = acc.entries.entry(p).or_default();
                slot.alpha += e as u64;
                slot.beta = slot.beta.max(e);
                if large {
                    slot.support.insert(rep);
                    *slot.hist.entry(e).or_insert(0) += 1;
                }
            }
            *acc.values.entry(value).or_default().entry(rep).or_insert(0) += 1;
        }
        Ok(acc)
    }

    /// Factor every `f(Q)`, `Q in M_n`. `budget` caps `q^n`.
    pub fn sweep(&self, n: u32, budget: u64) -> Result<ValuationTable> {
        let count = check_budget(self.ctx, n, budget)?;
        let chunks = count.div_ceil(CHUNK);
        let work = || -> Result<Vec<Acc>> {
            (0..chunks)
                .into_par_iter()
                .map(|c| self.run_chunk(n, c, count))
                .collect()
        };
        let parts = match self.threads {
            Some(t) => rayon::ThreadPoolBuilder::new()
                .num_threads(t.max(1))
                .build()
                .map_err(|e| Error::internal(format!("thread pool: {e}")))?
                .install(work)?,
            None => work()?,
        };
        let acc = parts.into_iter().fold(Acc::default(), Acc::merge);
        let collisions = acc
            .values
            .values()
            .map(|classes| {
                let total: u64 = classes.values().sum();
                total * total - classes.values().map(|c| c * c).sum::<u64>()
            })
            .sum();
        let mut zero_values = acc.zero_values;
        zero_values.sort_unstable();
        Ok(ValuationTable {
            n,
            n0: self.n0,
            large_threshold: self.large_threshold(n),
            entries: acc.entries,
            zero_values,
            degree_sum: acc.degree_sum,
            max_value_degree: acc.max_value_degree,
            collisions,
        })
    }

    /// `B_i(P)` for `i = 1..=d+1`, from the sweep histogram.
    pub fn bi_counts(&self, table: &ValuationTable, prime: &TPoly) -> Result<Vec<u64>> {
        self.check_bi_prime(table.n, prime)?;
        let d = self.f.d() as u32;
        let hist = table.entries.get(prime).map(|e| e.hist.clone()).unwrap_or_default();
        Ok((1..=d + 1)
            .map(|i| hist.range(i..).map(|(_, c)| c).sum())
            .collect())
    }

    /// `B_i(P)` by direct enumeration of `M_n`, independent of the sweep.
    pub fn bi_counts_direct(&self, n: u32, prime: &TPoly, budget: u64) -> Result<Vec<u64>> {
        self.check_bi_prime(n, prime)?;
        let count = check_budget(self.ctx, n, budget)?;
        let x = XRing::new(self.ctx);
        let d = self.f.d() as u32;
        let mut out = vec![0u64; d as usize + 1];
        for idx in 0..count {
            let q = monic_from_index(self.ctx, n as usize, idx);
            let value = x.eval(&self.f, &q);
            if value.is_zero() {
                continue;
            }
            let v = valuation(self.ctx, &value, prime)?;
            for b in out.iter_mut().take(v.min(d + 1) as usize) {
                *b += 1;
            }
        }
        Ok(out)
    }

    fn check_bi_prime(&self, n: u32, prime: &TPoly) -> Result<()> {
        if prime.degree().unwrap_or(0) <= self.large_threshold(n) {
            return Err(Error::domain("B_i needs deg P > n + deg f_d"));
        }
        if self.bad.contains(prime) {
            return Err(Error::domain("B_i is not defined at an exceptional prime"));
        }
        Ok(())
    }

    /// Whether the sharper bound `B_1 <= d - 1` applies at this `n`.
    pub fn sharp_b1_applies(&self, n: u32) -> bool {
        let d = self.f.d();
        let p = self.ctx.p() as usize;
        let t = PolyRing::new(self.ctx);
        let fd = self.f.lead().expect("nonzero");
        let fd1 = &self.f.coeffs()[d - 1];
        let shape = !d.is_multiple_of(p) || !t.divides(fd, fd1).expect("nonzero");
        let gate = self.n0.max(fd1.degree().unwrap_or(0) as u32);
        shape && n >= gate
    }

    /// Every exact identity the table must satisfy, by name.
    pub fn identity_checks(&self, table: &ValuationTable) -> BTreeMap<&'static str, bool> {
        let mut out = BTreeMap::new();
        let n = table.n;
        let d = self.f.d() as u64;
        let ed = self.f.lead().and_then(|c| c.degree()).unwrap_or(0) as u64;
        let qn = monic_count(self.ctx, n).unwrap_or(u64::MAX);
        let vsize = self.vf.size();
        let gated = n >= self.n0;
        out.insert("mass_identity", table.deg_pf() == table.degree_sum);
        if let (Some(dl), Some(de)) = (table.deg_l(), table.deg_ell()) {
            out.insert("ell_le_l_le_pf", de <= dl && dl <= table.deg_pf());
        }
        out.insert(
            "beta_le_alpha",
            table.entries.values().all(|e| e.beta as u64 <= e.alpha),
        );
        out.insert(
            "beta_deg_le_value_degree",
            table
                .entries
                .iter()
                .all(|(p, e)| e.beta as u64 * p.degree().unwrap_or(0) as u64 <= table.max_value_degree),
        );
        if gated && table.defined() {
            out.insert("deg_pf_exact", table.deg_pf() == (d * n as u64 + ed) * qn);
            out.insert(
                "vf_beta_le_alpha",
                table.entries.values().all(|e| vsize * e.beta as u64 <= e.alpha),
            );
            out.insert(
                "beta_deg_le_dn_plus_deg_fd",
                table
                    .entries
                    .iter()
                    .all(|(p, e)| e.beta as u64 * p.degree().unwrap_or(0) as u64 <= d * n as u64 + ed),
            );
            out.insert("s_f_definitions_agree", table.s_f_support() == table.s_f_valuation(vsize));
        }
        let good_large: Vec<(&TPoly, &PrimeEntry)> =
            table.large().filter(|(p, _)| !self.bad.contains(*p)).collect();
        out.insert(
            "alpha_le_d_beta_large_good",
            good_large.iter().all(|(_, e)| e.alpha <= d * e.beta as u64),
        );
        if good_large.len() == table.large().count() {
            if let Some(dl) = table.deg_l() {
                let large_mass: u64 = table
                    .large()
                    .map(|(p, e)| e.alpha * p.degree().unwrap_or(0) as u64)
                    .sum();
                out.insert("d_deg_l_ge_large_mass", d * dl >= large_mass);
            }
        }
        let sharp = self.sharp_b1_applies(n);
        let b_ok = good_large.iter().all(|(p, _)| {
            let b = self.bi_counts(table, p).expect("large good prime");
            let b1 = b[0];
            b1 <= d
                && b.iter().all(|&bi| bi <= b1)
                && b[d as usize] == 0
                && (!sharp || b1 < d)
        });
        out.insert("b_i_bounds", b_ok);
        out
    }
}

/// `q^n`, refusing anything above `budget`.
pub fn check_budget(ctx: &FieldCtx, n: u32, budget: u64) -> Result<u64> {
    match monic_count(ctx, n) {
        Some(c) if c <= budget => Ok(c),
        _ => Err(Error::Budget {
            required: (ctx.q() as u128).saturating_pow(n),
            budget: budget as u128,
        }),
    }
}

/// `deg lcm(f(Q) : Q in M_n)` by folding `L <- L * (v / gcd(L, v))`,
/// without factoring. `None` if some value vanishes.
pub fn lcm_oracle(ctx: &FieldCtx, f: &XPoly, n: u32, budget: u64) -> Result<Option<u64>> {
    let count = check_budget(ctx, n, budget)?;
    let x = XRing::new(ctx);
    let t = TRing::new(ctx);
    let mut l = t.one();
    for idx in 0..count {
        let v = x.eval(f, &monic_from_index(ctx, n as usize, idx));
        if v.is_zero() {
            return Ok(None);
        }
        let g = t.gcd(&l, &v);
        let cof = t.div_exact(&v, &g)?;
        if cof.degree().unwrap_or(0) > 0 {
            l = t.mul(&l, &cof);
        }
    }
    Ok(Some(l.degree().unwrap_or(0) as u64))
}

/// Serializable per-prime row.
#[derive(Clone, Debug, Serialize)]
pub struct PrimeRow {
    pub prime: String,
    pub deg: usize,
    pub alpha: u64,
    pub beta: u32,
    pub large: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub support_classes: Option<usize>,
}

/// Serializable view of a [`ValuationTable`].
#[derive(Clone, Debug, Serialize)]
pub struct TableView {
    pub n: u32,
    pub n0: u32,
    pub q: u32,
    pub values: u64,
    pub zero_values: Vec<String>,
    pub deg_l: Option<u64>,
    pub deg_ell: Option<u64>,
    pub deg_pf: u64,
    pub deg_rf: u64,
    pub collisions: u64,
    pub entries: Vec<PrimeRow>,
}

impl ValuationTable {
    pub fn view(&self, ctx: &FieldCtx) -> TableView {
        TableView {
            n: self.n,
            n0: self.n0,
            q: ctx.q(),
            values: monic_count(ctx, self.n).unwrap_or(0),
            zero_values: self
                .zero_values
                .iter()
                .map(|&i| format_tpoly(ctx, &monic_from_index(ctx, self.n as usize, i)))
                .collect(),
            deg_l: self.deg_l(),
            deg_ell: self.deg_ell(),
            deg_pf: self.deg_pf(),
            deg_rf: self.deg_rf(),
            collisions: self.collisions,
            entries: self
                .entries
                .iter()
                .map(|(p, e)| {
                    let large = p.degree().unwrap_or(0) > self.large_threshold;
                    PrimeRow {
                        prime: format_tpoly(ctx, p),
                        deg: p.degree().unwrap_or(0),
                        alpha: e.alpha,
                        beta: e.beta,
                        large,
                        support_classes: large.then_some(e.support.len()),
                    }
                })
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symmetry::compute_vf;

    fn engine(ctx: &FieldCtx, lits: &[&str]) -> Engine<'static> {
        let ctx: &'static FieldCtx = Box::leak(Box::new(ctx.clone()));
        let f = XPoly::parse(ctx, lits).unwrap();
        let vf = compute_vf(ctx, &f, &mut ChaCha8Rng::seed_from_u64(0)).unwrap();
        Engine::new(ctx, &f, vf, Vec::new(), 0)
    }

    #[test]
    fn n1_sweep_for_x2_plus_t() {
        let f3 = FieldCtx::prime(3).unwrap();
        let e = engine(&f3, &["T", "0", "1"]);
        let table = e.sweep(1, 1 << 20).unwrap();
        assert_eq!(table.deg_pf(), 6);
        assert_eq!(table.degree_sum, 6);
        assert_eq!(table.deg_l(), lcm_oracle(&f3, e.f(), 1, 1 << 20).unwrap());
    }

    #[test]
    fn n0_values() {
        let f3 = FieldCtx::prime(3).unwrap();
        assert_eq!(engine(&f3, &["T", "0", "1"]).n0(), 1);
        let f2 = FieldCtx::prime(2).unwrap();
        // X^2 + T X + 1: V_f = {0, T}
        assert_eq!(engine(&f2, &["1", "T", "1"]).n0(), 2);
    }

    #[test]
    fn thread_count_does_not_change_tables() {
        let f2 = FieldCtx::prime(2).unwrap();
        let e = engine(&f2, &["T", "1", "1"]);
        let a = e.sweep(6, 1 << 20).unwrap();
        let e1 = engine(&f2, &["T", "1", "1"]).with_threads(Some(1));
        let b = e1.sweep(6, 1 << 20).unwrap();
        assert_eq!(a.entries, b.entries);
        assert_eq!(a.collisions, b.collisions);
    }

    #[test]
    fn budget_is_enforced() {
        let f2 = FieldCtx::prime(2).unwrap();
        let e = engine(&f2, &["T", "1", "1"]);
        assert!(matches!(e.sweep(12, 1000), Err(Error::Budget { .. })));
    }
}
