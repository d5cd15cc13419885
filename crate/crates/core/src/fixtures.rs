//! Built-in fixture checks. Each returns an [`Outcome`]; `fflcm fixtures`
//! and the `acceptance` test target print one line per outcome.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::gf::FieldCtx;
use crate::kelem::{KElem, KField};
use crate::lcm_engine::{lcm_oracle, Engine, ValuationTable};
use crate::local_counts::{bad_primes, oracle_rho, LocalCounts, MAX_PRECISION};
use crate::report::{summarize, SweepReport};
use crate::special::{
    construct_special, detect_special, expected_factors, factor_multiset, Detection, NotSpecialReason,
    SpecialParams,
};
use crate::symmetry::{brute_vf, check_vf_clauses, compute_vf};
use crate::tpoly::{enumerate_primes, format_tpoly, monic_count, parse_tpoly, TPoly, TRing};
use crate::xpoly::XPoly;

const SEED: u64 = 0;
/// Sweeps run for every `n` with `q^n` at most this.
pub const SWEEP_LIMIT: u64 = 4096;
/// Root counts are compared with the oracle for `|P|^k` at most this.
pub const RHO_LIMIT: u64 = 729;

#[derive(Clone, Debug)]
pub struct Outcome {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl Outcome {
    fn new(id: u8, name: &'static str, failures: Vec<String>, ok: String) -> Self {
        let passed = failures.is_empty();
        Outcome {
            id,
            name,
            passed,
            detail: if passed { ok } else { failures.join("; ") },
        }
    }

    pub fn line(&self) -> String {
        format!(
            "[{}] {} {}: {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.detail
        )
    }
}

#[derive(Clone, Copy, Debug)]
pub struct Member {
    pub name: &'static str,
    pub p: u32,
    pub coeffs: &'static [&'static str],
}

pub const CORPUS: [Member; 6] = [
    Member { name: "X^2+T", p: 3, coeffs: &["T", "0", "1"] },
    Member { name: "X^2+X+T", p: 2, coeffs: &["T", "1", "1"] },
    Member { name: "X^3-X+T", p: 3, coeffs: &["T", "2", "0", "1"] },
    Member { name: "X^3+T", p: 3, coeffs: &["T", "0", "0", "1"] },
    Member { name: "X^3+T", p: 2, coeffs: &["T", "0", "0", "1"] },
    Member { name: "X^2+T*X+1", p: 2, coeffs: &["1", "T", "1"] },
];

impl Member {
    pub fn label(&self) -> String {
        format!("{} over F_{}", self.name, self.p)
    }

    pub fn load(&self) -> (FieldCtx, XPoly) {
        let ctx = FieldCtx::prime(self.p).expect("prime field");
        let f = XPoly::parse(&ctx, self.coeffs).expect("corpus literal");
        (ctx, f)
    }
}

pub fn engine<'a>(ctx: &'a FieldCtx, f: &XPoly, threads: Option<usize>) -> Result<Engine<'a>> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let vs = compute_vf(ctx, f, &mut rng)?;
    let bad = bad_primes(ctx, f, &mut rng)?;
    Ok(Engine::new(ctx, f, vs, bad, SEED).with_threads(threads))
}

/// Every sweep of one corpus member with `q^n <= SWEEP_LIMIT`.
pub struct MemberSweeps {
    pub member: Member,
    pub special: bool,
    pub n0: u32,
    pub tables: Vec<ValuationTable>,
    pub reports: Vec<SweepReport>,
}

fn sweep_member(member: Member) -> Result<MemberSweeps> {
    let (ctx, f) = member.load();
    let eng = engine(&ctx, &f, None)?;
    let special = matches!(
        detect_special(&ctx, &f, &mut ChaCha8Rng::seed_from_u64(SEED))?,
        Detection::Special(_)
    );
    let mut tables = Vec::new();
    let mut reports = Vec::new();
    let mut n = 1;
    while monic_count(&ctx, n).is_some_and(|c| c <= SWEEP_LIMIT) {
        let table = eng.sweep(n, SWEEP_LIMIT)?;
        reports.push(summarize(&ctx, &eng, &table));
        tables.push(table);
        n += 1;
    }
    Ok(MemberSweeps {
        member,
        special,
        n0: eng.n0(),
        tables,
        reports,
    })
}

/// Computed once per process and shared by the sweep-based checks.
pub fn corpus_sweeps() -> &'static std::result::Result<Vec<MemberSweeps>, String> {
    static CELL: OnceLock<std::result::Result<Vec<MemberSweeps>, String>> = OnceLock::new();
    CELL.get_or_init(|| {
        CORPUS
            .iter()
            .map(|&m| sweep_member(m).map_err(|e| format!("{}: {e}", m.label())))
            .collect()
    })
}

fn with_sweeps(id: u8, name: &'static str, body: impl FnOnce(&[MemberSweeps]) -> Outcome) -> Outcome {
    match corpus_sweeps() {
        Ok(s) => body(s),
        Err(e) => Outcome::new(id, name, vec![e.clone()], String::new()),
    }
}

pub fn oracle_equivalence() -> Outcome {
    with_sweeps(1, "sweep deg L matches the lcm oracle", |sweeps| {
        let mut failures = Vec::new();
        let mut checked = 0;
        for ms in sweeps {
            let (ctx, f) = ms.member.load();
            for table in &ms.tables {
                checked += 1;
                match lcm_oracle(&ctx, &f, table.n, SWEEP_LIMIT) {
                    Ok(o) if o == table.deg_l() => {}
                    Ok(o) => failures.push(format!(
                        "{} n={}: sweep {:?} oracle {:?}",
                        ms.member.label(),
                        table.n,
                        table.deg_l(),
                        o
                    )),
                    Err(e) => failures.push(format!("{} n={}: {e}", ms.member.label(), table.n)),
                }
            }
        }
        Outcome::new(1, "sweep deg L matches the lcm oracle", failures, format!("{checked} (f, n) pairs"))
    })
}

fn rho_member(member: Member, failures: &mut Vec<String>) -> Result<usize> {
    let (ctx, f) = member.load();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let lc = LocalCounts::new(&ctx, &f, u64::MAX, &mut rng)?;
    let mut checked = 0;
    for prime in enumerate_primes(&ctx, 2) {
        let size = monic_count(&ctx, prime.degree().unwrap_or(0) as u32).unwrap_or(u64::MAX);
        let mut kmax = 0u32;
        while size.checked_pow(kmax + 1).is_some_and(|s| s <= RHO_LIMIT) {
            kmax += 1;
        }
        let mu = lc.mu(&prime)?;
        let threshold = mu.map(|m| if lc.is_separable() { 2 * m + 1 } else { m + 2 });
        let dp = prime.degree().unwrap_or(1);
        let kfar = threshold.map_or(kmax, |t| kmax.max(t + 2)).min((MAX_PRECISION / dp) as u32);
        let tree = lc.rho_tree(&prime, kfar, &mut rng)?;
        let fast = lc.profile(&prime, kfar, false, &mut rng)?.values;
        let paranoid = lc.profile(&prime, kfar, true, &mut rng)?.values;
        let label = format!("{} P={}", member.label(), format_tpoly(&ctx, &prime));
        if fast != tree || paranoid != tree {
            failures.push(format!("{label}: shortcut {fast:?} tree {tree:?}"));
        }
        for k in 1..=kmax {
            checked += 1;
            let oracle = oracle_rho(&ctx, &f, &prime, k)?;
            if oracle != tree[k as usize - 1] {
                failures.push(format!("{label} k={k}: tree {} oracle {oracle}", tree[k as usize - 1]));
            }
        }
        if let Some(t) = threshold {
            let tail = &tree[(t as usize - 1).min(tree.len())..];
            let ok = if lc.is_separable() {
                tail.windows(2).all(|w| w[0] == w[1])
            } else {
                tail.iter().all(|&v| v == 0)
            };
            if !ok {
                failures.push(format!("{label}: no stabilization from k={t}: {tree:?}"));
            }
        }
    }
    Ok(checked)
}

pub fn rho_equivalence() -> Outcome {
    let mut failures = Vec::new();
    let mut checked = 0;
    for m in CORPUS {
        match rho_member(m, &mut failures) {
            Ok(c) => checked += c,
            Err(e) => failures.push(format!("{}: {e}", m.label())),
        }
    }
    Outcome::new(2, "rho matches the residue oracle", failures, format!("{checked} (f, P, k) triples"))
}

/// `(p, coefficients, expected V_f, expected 1/c_f)`.
pub const VF_FIXTURES: [(u32, &[&str], &[&str], u64); 4] = [
    (3, &["T", "0", "1"], &["0"], 1),
    (2, &["T", "1", "1"], &["0", "1"], 2),
    (2, &["T", "T^2+T", "T^2+T+1", "0", "1"], &["0", "1", "T", "T+1"], 4),
    (3, &["T", "2", "0", "1"], &["0", "1", "2"], 3),
];

pub fn vf_fixtures() -> Outcome {
    let mut failures = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    for (p, coeffs, expected, inv_c) in VF_FIXTURES {
        let ctx = FieldCtx::prime(p).expect("prime");
        let f = XPoly::parse(&ctx, coeffs).expect("fixture literal");
        let label = format!("{} over F_{p}", f.display(&ctx));
        let mut run = || -> Result<()> {
            let vs = compute_vf(&ctx, &f, &mut rng)?;
            let mut want: Vec<TPoly> = expected.iter().map(|s| parse_tpoly(&ctx, s)).collect::<Result<_>>()?;
            want.sort();
            let brute = brute_vf(&ctx, &f, 2, 1 << 20)?;
            if vs.elements != want || brute != want {
                return Err(Error::internal(format!(
                    "V_f {:?}, scan {:?}",
                    vs.elements.iter().map(|g| format_tpoly(&ctx, g)).collect::<Vec<_>>(),
                    brute.iter().map(|g| format_tpoly(&ctx, g)).collect::<Vec<_>>()
                )));
            }
            if vs.c_f() != num_rational::Ratio::new(1, inv_c) {
                return Err(Error::internal(format!("c_f = {}", vs.c_f())));
            }
            Ok(())
        };
        if let Err(e) = run() {
            failures.push(format!("{label}: {e}"));
        }
    }
    for m in CORPUS {
        let (ctx, f) = m.load();
        let res = compute_vf(&ctx, &f, &mut rng).and_then(|vs| check_vf_clauses(&ctx, &f, &vs));
        if let Err(e) = res {
            failures.push(format!("{}: {e}", m.label()));
        }
    }
    Outcome::new(
        3,
        "V_f fixtures and structural clauses",
        failures,
        format!("{} fixtures, {} corpus members", VF_FIXTURES.len(), CORPUS.len()),
    )
}

/// `(p, k, m, l, v)` shapes for generated normal forms.
const SHAPES: [(u32, u32, u64, u32, u32); 23] = [
    (2, 1, 1, 1, 0),
    (2, 1, 1, 1, 1),
    (2, 1, 1, 2, 0),
    (2, 1, 1, 2, 1),
    (2, 1, 1, 2, 2),
    (2, 2, 1, 1, 0),
    (2, 2, 1, 1, 1),
    (2, 2, 1, 2, 0),
    (2, 2, 1, 2, 1),
    (2, 2, 1, 2, 2),
    (3, 1, 1, 1, 0),
    (3, 1, 1, 1, 1),
    (3, 1, 1, 2, 1),
    (3, 1, 1, 2, 2),
    (3, 1, 2, 0, 0),
    (3, 1, 2, 1, 0),
    (3, 1, 2, 1, 1),
    (3, 1, 2, 2, 1),
    (3, 1, 2, 2, 2),
    (3, 2, 2, 1, 1),
    (3, 2, 4, 0, 0),
    (3, 2, 4, 1, 0),
    (3, 2, 1, 1, 1),
];

fn random_tpoly<R: Rng>(ctx: &FieldCtx, max_deg: usize, rng: &mut R) -> TPoly {
    let v = (0..=max_deg).map(|_| ctx.elem(rng.gen_range(0..ctx.q() as u64))).collect();
    TRing::new(ctx).poly(v)
}

/// An `F_p(zeta)`-subspace of `F_q[T]` of size `p^v`, spanned by
/// polynomials of degree at most 1.
fn random_subspace<R: Rng>(ctx: &FieldCtx, zeta_coords_in_fp: bool, v: u32, rng: &mut R) -> Vec<TPoly> {
    use crate::symmetry::{fp_span, fp_span_basis};
    let t = TRing::new(ctx);
    // Over F_9 with zeta of order 4, F_p(zeta) = F_q: a line F_q * g.
    let step = if zeta_coords_in_fp { 1 } else { ctx.k() };
    loop {
        let mut gens = Vec::new();
        for _ in 0..v / step {
            let g = random_tpoly(ctx, 1, rng);
            if step == 1 {
                gens.push(g);
            } else {
                gens.extend(ctx.enumerate_all().map(|c| t.scale(&g, &c)));
            }
        }
        let basis = fp_span_basis(ctx, &gens);
        if basis.len() as u32 == v {
            return fp_span(ctx, &basis);
        }
    }
}

pub fn generated_params(count_per_shape: usize) -> Vec<(FieldCtx, SpecialParams)> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut out = Vec::new();
    for (p, k, m, l, v) in SHAPES {
        let ctx = FieldCtx::new(p, k, None).expect("field");
        let kf = KField::new(&ctx);
        let zeta = ctx.root_of_unity(m).expect("m divides q - 1");
        let zeta_in_fp = ctx.pow(zeta, p as u64) == zeta;
        for _ in 0..count_per_shape {
            let mut f_d = random_tpoly(&ctx, 1, &mut rng);
            while f_d.is_zero() {
                f_d = random_tpoly(&ctx, 1, &mut rng);
            }
            let v_space: Vec<KElem> = random_subspace(&ctx, zeta_in_fp, v, &mut rng)
                .into_iter()
                .map(|g| kf.from_t(g))
                .collect();
            let prm = SpecialParams {
                f_d,
                a: kf.from_t(random_tpoly(&ctx, 1, &mut rng)),
                c: kf.from_t(random_tpoly(&ctx, 1, &mut rng)),
                m,
                l,
                v,
                v_space,
            };
            out.push((ctx.clone(), prm));
        }
    }
    // A non-integral shift that still expands to an integral polynomial:
    // T^2 (X + 1/T)^2 + T = T^2 X^2 + 1 + T over F_2.
    let ctx = FieldCtx::prime(2).expect("F_2");
    let kf = KField::new(&ctx);
    let t = TRing::new(&ctx);
    out.push((
        ctx.clone(),
        SpecialParams {
            f_d: parse_tpoly(&ctx, "T^2").expect("literal"),
            a: kf.make(t.one(), parse_tpoly(&ctx, "T").expect("literal")).expect("unit"),
            c: kf.from_t(parse_tpoly(&ctx, "T").expect("literal")),
            m: 1,
            l: 1,
            v: 0,
            v_space: vec![kf.zero()],
        },
    ));
    out
}

pub fn special_round_trip() -> Outcome {
    let mut failures = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let params = generated_params(1);
    for (ctx, prm) in &params {
        let label = format!("F_{} m={} l={} v={}", ctx.q(), prm.m, prm.l, prm.v);
        let run = || -> Result<bool> {
            let f = construct_special(ctx, prm)?;
            let det = detect_special(ctx, &f, &mut ChaCha8Rng::seed_from_u64(SEED))?;
            Ok(match det {
                Detection::Special(form) => factor_multiset(&form) == expected_factors(ctx, prm)?,
                Detection::NotSpecial(_) => false,
            })
        };
        match run() {
            Ok(true) => {}
            Ok(false) => failures.push(format!("{label}: factor multiset differs")),
            Err(e) => failures.push(format!("{label}: {e}")),
        }
    }
    let negatives: [(u32, &[&str], NotSpecialReason); 2] = [
        (2, &["T", "0", "0", "1"], NotSpecialReason::NoRootOfUnity),
        // (X-Y)^3 + (X-Y) over F_3: one linear factor where three are needed.
        (3, &["T", "1", "0", "1"], NotSpecialReason::DeficientFactorCount),
    ];
    for (p, coeffs, want) in negatives {
        let ctx = FieldCtx::prime(p).expect("prime");
        let f = XPoly::parse(&ctx, coeffs).expect("literal");
        match detect_special(&ctx, &f, &mut rng) {
            Ok(Detection::NotSpecial(r)) if r == want => {}
            other => failures.push(format!("{} over F_{p}: got {other:?}", f.display(&ctx))),
        }
    }
    Outcome::new(
        4,
        "special construction round-trip",
        failures,
        format!("{} parameter sets, 2 non-examples", params.len()),
    )
}

pub fn exact_identities() -> Outcome {
    with_sweeps(5, "exact identities on every sweep", |sweeps| {
        let mut failures = Vec::new();
        let mut checked = 0;
        for ms in sweeps {
            for r in ms.reports.iter().filter(|r| r.n >= ms.n0) {
                checked += 1;
                for (name, ok) in &r.checks {
                    if !ok {
                        failures.push(format!("{} n={}: {name}", ms.member.label(), r.n));
                    }
                }
            }
        }
        Outcome::new(5, "exact identities on every sweep", failures, format!("{checked} sweeps with n >= n0"))
    })
}

pub fn special_vanishing() -> Outcome {
    with_sweeps(6, "S_f and collisions vanish for special f", |sweeps| {
        let mut failures = Vec::new();
        let mut checked = 0;
        for ms in sweeps.iter().filter(|m| m.special) {
            for r in ms.reports.iter().filter(|r| r.n >= ms.n0) {
                checked += 1;
                if r.s_f != 0 || r.s_f_by_valuation != 0 || r.collisions != 0 {
                    failures.push(format!(
                        "{} n={}: S_f={} collisions={}",
                        ms.member.label(),
                        r.n,
                        r.s_f,
                        r.collisions
                    ));
                }
            }
        }
        let members = sweeps.iter().filter(|m| m.special).count();
        Outcome::new(
            6,
            "S_f and collisions vanish for special f",
            failures,
            format!("{members} special members, {checked} sweeps"),
        )
    })
}

/// `(n, ratio_conj, ratio_rad, ratio_lower)` for `X^2+T` over `F_3`,
/// recorded from the first oracle-checked run.
pub const TREND_FROZEN: [(u32, &str, &str, &str); 5] = [
    (4, "1.290123", "0.971292", "2.580247"),
    (5, "1.245267", "0.983477", "2.490535"),
    (6, "1.211248", "0.993205", "2.422497"),
    (7, "1.183944", "0.997131", "2.367888"),
    (8, "1.162666", "0.998132", "2.325332"),
];

pub fn trend_rows() -> Result<Vec<SweepReport>> {
    let (ctx, f) = CORPUS[0].load();
    let eng = engine(&ctx, &f, None)?;
    crate::report::run_report(&ctx, &eng, 4..=8, 1 << 20)
}

pub fn bound_trends() -> Outcome {
    let name = "ratio trends for X^2+T over F_3";
    let rows = match trend_rows() {
        Ok(r) => r,
        Err(e) => return Outcome::new(7, name, vec![e.to_string()], String::new()),
    };
    let mut failures = Vec::new();
    let get = |r: &SweepReport, which: usize| {
        let e = [&r.ratio_conj, &r.ratio_rad, &r.ratio_lower][which].clone();
        e.expect("values never vanish")
    };
    let conj: Vec<_> = rows.iter().map(|r| get(r, 0)).collect();
    let rad: Vec<_> = rows.iter().map(|r| get(r, 1)).collect();
    let lower: Vec<_> = rows.iter().map(|r| get(r, 2)).collect();
    let lo = num_rational::Ratio::new(3u64, 5);
    let hi = num_rational::Ratio::new(21u64, 20);
    if let Some(bad) = conj.iter().find(|e| e.value < lo || e.value > hi) {
        failures.push(format!("ratio_conj {} outside [0.6, 1.05]", bad.decimal));
    }
    if conj[2..].windows(2).any(|w| w[1].value < w[0].value) {
        failures.push("ratio_conj decreases over n = 6..8".into());
    }
    if rad[4].value < num_rational::Ratio::new(9, 10) {
        failures.push(format!("ratio_rad {} < 0.9 at n = 8", rad[4].decimal));
    }
    if rad.windows(2).any(|w| w[1].value < w[0].value) {
        failures.push("ratio_rad decreases".into());
    }
    if lower[4].value < num_rational::Ratio::new(1, 1) {
        failures.push(format!("ratio_lower {} < 1 at n = 8", lower[4].decimal));
    }
    let mut seen = BTreeMap::new();
    for (i, (n, c, r, l)) in TREND_FROZEN.iter().enumerate() {
        let got = (conj[i].decimal.as_str(), rad[i].decimal.as_str(), lower[i].decimal.as_str());
        seen.insert(*n, format!("{}/{}/{}", got.0, got.1, got.2));
        if rows[i].n != *n || got != (*c, *r, *l) {
            failures.push(format!("n={n}: got {got:?}, recorded ({c}, {r}, {l})"));
        }
    }
    let detail = seen
        .iter()
        .map(|(n, s)| format!("n={n} {s}"))
        .collect::<Vec<_>>()
        .join(", ");
    Outcome::new(7, name, failures, detail)
}

pub fn determinism() -> Outcome {
    let name = "report JSON independent of thread count";
    let args = |_: usize| {
        vec![
            "fflcm", "report", "--field", "3", "--f", r#"["T","0","1"]"#, "--n-range", "1..6", "--seed", "7",
        ]
    };
    let mut outputs = Vec::new();
    let mut failures = Vec::new();
    for threads in [1usize, 2, 4] {
        let (ctx, f) = CORPUS[0].load();
        let render = || -> Result<String> {
            let eng = engine(&ctx, &f, Some(threads))?;
            let rows = crate::report::run_report(&ctx, &eng, 1..=6, 1 << 20)?;
            Ok(serde_json::to_string_pretty(&rows)?)
        };
        match render() {
            Ok(s) => outputs.push(s),
            Err(e) => failures.push(format!("threads={threads}: {e}")),
        }
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = crate::cli::run_with_threads(args(threads), &mut out, &mut err, Some(threads));
        if code != 0 {
            failures.push(format!("threads={threads}: exit {code}"));
        }
        outputs.push(String::from_utf8_lossy(&out).into_owned());
    }
    let engine_same = outputs.iter().step_by(2).all(|o| o == &outputs[0]);
    let cli_same = outputs.iter().skip(1).step_by(2).all(|o| o == &outputs[1]);
    if !engine_same || !cli_same {
        failures.push("outputs differ across thread counts".into());
    }
    Outcome::new(8, name, failures, "threads 1, 2, 4 agree".into())
}

pub fn run_all() -> Vec<Outcome> {
    vec![
        oracle_equivalence(),
        rho_equivalence(),
        vf_fixtures(),
        special_round_trip(),
        exact_identities(),
        special_vanishing(),
        bound_trends(),
        determinism(),
    ]
}
