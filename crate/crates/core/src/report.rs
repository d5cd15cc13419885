//! Per-`n` summaries of sweeps, their CSV projection, and average root
//! counts over primes of fixed degree.

use std::collections::BTreeMap;
use std::io::Write;

use num_rational::Ratio;
use rand::Rng;
use serde::Serialize;

use crate::error::Result;
use crate::gf::FieldCtx;
use crate::lcm_engine::{Engine, ValuationTable};
use crate::local_counts::roots_mod_prime;
use crate::tpoly::{monic_count, primes_of_degree, valuation};
use crate::xpoly::{XPoly, XRing};

/// Round-half-up decimal with six places.
pub fn decimal6(r: Ratio<u64>) -> String {
    let num = *r.numer() as u128 * 1_000_000;
    let den = *r.denom() as u128;
    let scaled = (2 * num + den) / (2 * den);
    format!("{}.{:06}", scaled / 1_000_000, scaled % 1_000_000)
}

/// An exact rational with its rendered decimal.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Exact {
    pub exact: String,
    pub decimal: String,
    #[serde(skip)]
    pub value: Ratio<u64>,
}

impl Exact {
    pub fn new(value: Ratio<u64>) -> Self {
        Exact {
            exact: format!("{}/{}", value.numer(), value.denom()),
            decimal: decimal6(value),
            value,
        }
    }
}

fn ratio(num: u64, den: u64) -> Option<Exact> {
    (den > 0).then(|| Exact::new(Ratio::new(num, den)))
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepReport {
    pub n: u32,
    pub q: u32,
    pub d: usize,
    pub c_f: String,
    pub n0: u32,
    pub values: u64,
    pub zero_values: usize,
    pub deg_l: Option<u64>,
    pub deg_ell: Option<u64>,
    pub deg_pf: u64,
    pub deg_rf: u64,
    pub s_f: u64,
    pub s_f_by_valuation: u64,
    pub collisions: u64,
    /// `deg L / (c_f (d-1) n q^n)`
    pub ratio_conj: Option<Exact>,
    /// `deg L / (((d-1)/d) n q^n)`
    pub ratio_lower: Option<Exact>,
    /// `deg ell / deg L`
    pub ratio_rad: Option<Exact>,
    pub checks: BTreeMap<&'static str, bool>,
}

pub fn summarize(ctx: &FieldCtx, engine: &Engine<'_>, table: &ValuationTable) -> SweepReport {
    let n = table.n;
    let d = engine.f().d() as u64;
    let qn = monic_count(ctx, n).unwrap_or(u64::MAX);
    let vsize = engine.vf().size();
    let base = (d.saturating_sub(1)) * n as u64 * qn;
    let deg_l = table.deg_l();
    let deg_ell = table.deg_ell();
    SweepReport {
        n,
        q: ctx.q(),
        d: d as usize,
        c_f: if vsize == 1 { "1".into() } else { format!("1/{vsize}") },
        n0: table.n0,
        values: qn,
        zero_values: table.zero_values.len(),
        deg_l,
        deg_ell,
        deg_pf: table.deg_pf(),
        deg_rf: table.deg_rf(),
        s_f: table.s_f_support(),
        s_f_by_valuation: table.s_f_valuation(vsize),
        collisions: table.collisions,
        ratio_conj: deg_l.and_then(|l| ratio(l * vsize, base)),
        ratio_lower: deg_l.and_then(|l| ratio(l * d, base)),
        ratio_rad: deg_l.zip(deg_ell).and_then(|(l, e)| ratio(e, l)),
        checks: engine.identity_checks(table),
    }
}

/// Sweep and summarize every `n` in `range`.
pub fn run_report(
    ctx: &FieldCtx,
    engine: &Engine<'_>,
    range: std::ops::RangeInclusive<u32>,
    budget: u64,
) -> Result<Vec<SweepReport>> {
    range
        .map(|n| Ok(summarize(ctx, engine, &engine.sweep(n, budget)?)))
        .collect()
}

pub const CSV_HEADER: [&str; 13] = [
    "n", "q", "d", "c_f_num", "c_f_den", "deg_L", "deg_ell", "deg_Pf", "S_f", "collisions",
    "ratio_conj", "ratio_lower", "ratio_rad",
];

pub fn write_csv<W: Write>(out: W, reports: &[SweepReport], vf_size: u64) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    let opt = |x: Option<u64>| x.map(|v| v.to_string()).unwrap_or_default();
    let dec = |x: &Option<Exact>| x.as_ref().map(|e| e.decimal.clone()).unwrap_or_default();
    for r in reports {
        w.write_record([
            r.n.to_string(),
            r.q.to_string(),
            r.d.to_string(),
            "1".to_string(),
            vf_size.to_string(),
            opt(r.deg_l),
            opt(r.deg_ell),
            r.deg_pf.to_string(),
            r.s_f.to_string(),
            r.collisions.to_string(),
            dec(&r.ratio_conj),
            dec(&r.ratio_lower),
            dec(&r.ratio_rad),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Clone, Debug, Serialize)]
pub struct AvgRootsRow {
    pub k: u32,
    pub primes: u64,
    pub sum_rho: u64,
    /// `sum_{deg P = k} rho_f(P) * k / q^k`
    pub value: Exact,
}

/// Raw averages for `k = 1..=kmax`. A prime where `f` vanishes identically
/// contributes `|P|` roots.
pub fn avg_roots<R: Rng + ?Sized>(
    ctx: &FieldCtx,
    f: &XPoly,
    kmax: u32,
    rng: &mut R,
) -> Result<Vec<AvgRootsRow>> {
    let x = XRing::new(ctx);
    let content = x.content(f);
    let mut out = Vec::new();
    for k in 1..=kmax {
        let primes = primes_of_degree(ctx, k as usize);
        let qk = monic_count(ctx, k).expect("desk-scale q^k");
        let mut sum = 0u64;
        for p in &primes {
            let vanishes = valuation(ctx, &content, p).is_ok_and(|v| v > 0);
            sum += if vanishes {
                qk
            } else {
                roots_mod_prime(ctx, f, p, rng)?.len() as u64
            };
        }
        out.push(AvgRootsRow {
            k,
            primes: primes.len() as u64,
            sum_rho: sum,
            value: Exact::new(Ratio::new(sum * k as u64, qk)),
        });
    }
    Ok(out)
}

/// Mean of the first `rows.len()` values.
pub fn cesaro_mean(rows: &[AvgRootsRow]) -> Ratio<u64> {
    let total = rows
        .iter()
        .fold(Ratio::new(0u64, 1), |acc, r| acc + r.value.value);
    total / rows.len().max(1) as u64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decimal_rounding() {
        assert_eq!(decimal6(Ratio::new(1, 3)), "0.333333");
        assert_eq!(decimal6(Ratio::new(2, 3)), "0.666667");
        assert_eq!(decimal6(Ratio::new(7, 2)), "3.500000");
        assert_eq!(decimal6(Ratio::new(1, 2_000_000)), "0.000001");
    }
}
