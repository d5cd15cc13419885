//! The `fflcm` command line. Every flag has a config-file counterpart in
//! [`ExperimentConfig`]; flags given on the command line win.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::gf::FieldCtx;
use crate::irreducibility::irreducibility_guard;
use crate::kelem::KField;
use crate::lcm_engine::Engine;
use crate::local_counts::{bad_primes, LocalCounts};
use crate::report::{avg_roots, cesaro_mean, run_report, summarize, write_csv, Exact};
use crate::special::{
    construct_special, detect_special, expected_factors, factor_multiset, Detection, NotSpecialReason,
    SpecialParams,
};
use crate::symmetry::{brute_vf, compute_vf, VSpace};
use crate::tpoly::{format_tpoly, parse_tpoly};
use crate::xpoly::XPoly;

pub const DEFAULT_BUDGET: u64 = 1 << 22;
pub const THREADS_ENV: &str = "FFLCM_THREADS";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub field: Option<String>,
    pub modulus: Option<String>,
    /// Coefficients `f_0, ..., f_d` as `F_q[T]` literals.
    pub f: Option<Vec<String>>,
    pub seed: u64,
    pub budget: u64,
    pub n: Option<u32>,
    /// `a..b`, both ends included.
    pub n_range: Option<String>,
    pub prime: Option<String>,
    pub kmax: Option<u32>,
    pub paranoid: bool,
    pub vf_bound: Option<u32>,
    pub out: Option<String>,
    pub csv: Option<String>,
    pub f_d: Option<String>,
    #[serde(rename = "A")]
    pub a: Option<String>,
    #[serde(rename = "C")]
    pub c: Option<String>,
    pub m: Option<u64>,
    pub l: Option<u32>,
    pub v: Option<u32>,
    #[serde(rename = "V")]
    pub v_space: Option<Vec<String>>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            field: None,
            modulus: None,
            f: None,
            seed: 0,
            budget: DEFAULT_BUDGET,
            n: None,
            n_range: None,
            prime: None,
            kmax: None,
            paranoid: false,
            vf_bound: None,
            out: None,
            csv: None,
            f_d: None,
            a: None,
            c: None,
            m: None,
            l: None,
            v: None,
            v_space: None,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.budget == 0 {
            return Err(Error::validation("budget must be positive"));
        }
        if let Some(r) = &self.n_range {
            parse_range(r)?;
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Fixed key order, two-space indent.
    pub fn to_canonical_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn field_ctx(&self) -> Result<FieldCtx> {
        let spec = self
            .field
            .as_deref()
            .ok_or_else(|| Error::validation("missing --field"))?;
        FieldCtx::parse(spec, self.modulus.as_deref())
    }

    pub fn poly(&self, ctx: &FieldCtx) -> Result<XPoly> {
        let lits = self.f.as_ref().ok_or_else(|| Error::validation("missing --f"))?;
        XPoly::parse(ctx, lits)
    }
}

#[derive(Parser, Debug)]
#[command(name = "fflcm", version, about = "lcm of polynomial values over F_q[T]")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Default)]
struct Common {
    /// JSON file with the same keys as the flags.
    #[arg(long)]
    config: Option<PathBuf>,
    /// `p`, `p^k`, or `p^k modulus="..."`.
    #[arg(long)]
    field: Option<String>,
    #[arg(long)]
    modulus: Option<String>,
    /// JSON array of coefficient literals, constant term first.
    #[arg(long)]
    f: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    budget: Option<u64>,
    /// Also write the JSON result here.
    #[arg(long)]
    out: Option<String>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// The shift-symmetry space V_f and c_f.
    Vf {
        #[command(flatten)]
        common: Common,
        /// Cross-check by scanning all g with deg g <= bound.
        #[arg(long)]
        vf_bound: Option<u32>,
    },
    /// Detect or construct special polynomials.
    Special {
        #[command(subcommand)]
        action: SpecialCmd,
    },
    /// rho_f(P^k) for k = 1..kmax.
    Rho {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        prime: Option<String>,
        #[arg(long)]
        kmax: Option<u32>,
        #[arg(long)]
        paranoid: bool,
    },
    /// Valuation table for one n.
    Sweep {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        n: Option<u32>,
    },
    /// Summaries for every n in a range.
    Report {
        #[command(flatten)]
        common: Common,
        /// `a..b`, both ends included.
        #[arg(long)]
        n_range: Option<String>,
        #[arg(long)]
        csv: Option<String>,
    },
    /// Average root counts over primes of degree k.
    Avgroots {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        kmax: Option<u32>,
    },
    /// Run the built-in fixture checks.
    Fixtures,
}

#[derive(Subcommand, Debug)]
enum SpecialCmd {
    Detect {
        #[command(flatten)]
        common: Common,
    },
    Construct {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        f_d: Option<String>,
        #[arg(long = "A")]
        a: Option<String>,
        #[arg(long = "C")]
        c: Option<String>,
        #[arg(long)]
        m: Option<u64>,
        #[arg(long)]
        l: Option<u32>,
        #[arg(long)]
        v: Option<u32>,
        /// JSON array of the elements of V.
        #[arg(long = "V")]
        v_space: Option<String>,
    },
}

/// `a..b` or `a..=b`, inclusive; a bare `n` means `n..n`.
pub fn parse_range(text: &str) -> Result<(u32, u32)> {
    let bad = || Error::validation(format!("n range `{text}` must look like 4..8"));
    let (a, b) = match text.split_once("..") {
        Some((a, b)) => (a.trim(), b.trim().trim_start_matches('=')),
        None => (text.trim(), text.trim()),
    };
    let lo: u32 = a.parse().map_err(|_| bad())?;
    let hi: u32 = b.parse().map_err(|_| bad())?;
    if lo > hi {
        return Err(bad());
    }
    Ok((lo, hi))
}

fn json_list(flag: &str, text: &str) -> Result<Vec<String>> {
    serde_json::from_str(text)
        .map_err(|e| Error::validation(format!("--{flag} must be a JSON array of strings: {e}")))
}

impl Common {
    fn load(&self) -> Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(path) => ExperimentConfig::from_json(&std::fs::read_to_string(path)?)?,
            None => ExperimentConfig::default(),
        };
        macro_rules! take {
            ($($name:ident),*) => {$(
                if let Some(x) = &self.$name { cfg.$name = Some(x.clone()); }
            )*};
        }
        take!(field, modulus, out);
        if let Some(f) = &self.f {
            cfg.f = Some(json_list("f", f)?);
        }
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Some(b) = self.budget {
            cfg.budget = b;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn threads_from_env() -> Result<Option<usize>> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(None),
        Ok(s) if s.trim().is_empty() => Ok(None),
        Ok(s) => match s.trim().parse::<usize>() {
            Ok(0) => Ok(None),
            Ok(n) => Ok(Some(n)),
            Err(_) => Err(Error::validation(format!("{THREADS_ENV} must be a number, got `{s}`"))),
        },
    }
}

fn vspace_json(ctx: &FieldCtx, vs: &VSpace) -> Value {
    let c = vs.c_f();
    json!({
        "v": vs.v,
        "c_f": if *c.denom() == 1 { c.numer().to_string() } else { format!("{}/{}", c.numer(), c.denom()) },
        "basis": vs.basis.iter().map(|g| format_tpoly(ctx, g)).collect::<Vec<_>>(),
        "elements": vs.elements.iter().map(|g| format_tpoly(ctx, g)).collect::<Vec<_>>(),
    })
}

fn detection_json(ctx: &FieldCtx, det: &Detection) -> Value {
    match det {
        Detection::Special(form) => serde_json::to_value(form.view(ctx)).expect("view serializes"),
        Detection::NotSpecial(reason) => json!({
            "special": false,
            "reason": reason,
            "internal_error": *reason == NotSpecialReason::InconsistentMultiplicities,
        }),
    }
}

fn header(ctx: &FieldCtx, f: &XPoly) -> Value {
    json!({ "field": ctx.describe(), "f": f.display(ctx) })
}

fn merge(mut a: Value, b: Value) -> Value {
    if let (Value::Object(x), Value::Object(y)) = (&mut a, b) {
        x.extend(y);
    }
    a
}

fn engine_for<'a>(
    ctx: &'a FieldCtx,
    f: &XPoly,
    cfg: &ExperimentConfig,
    threads: Option<usize>,
) -> Result<(Engine<'a>, Value)> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let guard = irreducibility_guard(ctx, f, &mut rng)?;
    let vs = compute_vf(ctx, f, &mut rng)?;
    let bad = bad_primes(ctx, f, &mut rng)?;
    let engine = Engine::new(ctx, f, vs, bad, cfg.seed).with_threads(threads);
    let meta = json!({
        "irreducibility": guard,
        "c_f": vspace_json(ctx, engine.vf())["c_f"],
        "n0": engine.n0(),
    });
    Ok((engine, meta))
}

fn cmd_vf(cfg: &ExperimentConfig, vf_bound: Option<u32>) -> Result<Value> {
    let ctx = cfg.field_ctx()?;
    let f = cfg.poly(&ctx)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let vs = compute_vf(&ctx, &f, &mut rng)?;
    let mut out = merge(header(&ctx, &f), vspace_json(&ctx, &vs));
    if let Some(bound) = vf_bound.or(cfg.vf_bound) {
        let brute = brute_vf(&ctx, &f, bound, cfg.budget)?;
        let within: Vec<_> = vs
            .elements
            .iter()
            .filter(|g| g.degree().is_none_or(|dg| dg <= bound as usize))
            .cloned()
            .collect();
        out = merge(
            out,
            json!({ "brute": {
                "bound": bound,
                "elements": brute.iter().map(|g| format_tpoly(&ctx, g)).collect::<Vec<_>>(),
                "agrees": brute == within,
            }}),
        );
    }
    Ok(out)
}

fn cmd_detect(cfg: &ExperimentConfig) -> Result<Value> {
    let ctx = cfg.field_ctx()?;
    let f = cfg.poly(&ctx)?;
    let det = detect_special(&ctx, &f, &mut ChaCha8Rng::seed_from_u64(cfg.seed))?;
    Ok(merge(header(&ctx, &f), detection_json(&ctx, &det)))
}

fn cmd_construct(cfg: &ExperimentConfig) -> Result<Value> {
    let ctx = cfg.field_ctx()?;
    let k = KField::new(&ctx);
    let need = |x: &Option<String>, name: &str| {
        x.clone()
            .ok_or_else(|| Error::validation(format!("missing --{name}")))
    };
    let prm = SpecialParams {
        f_d: parse_tpoly(&ctx, &need(&cfg.f_d, "f-d")?)?,
        a: k.parse(&cfg.a.clone().unwrap_or_else(|| "0".into()))?,
        c: k.parse(&cfg.c.clone().unwrap_or_else(|| "0".into()))?,
        m: cfg.m.ok_or_else(|| Error::validation("missing --m"))?,
        l: cfg.l.ok_or_else(|| Error::validation("missing --l"))?,
        v: cfg.v.unwrap_or(0),
        v_space: cfg
            .v_space
            .clone()
            .unwrap_or_else(|| vec!["0".into()])
            .iter()
            .map(|s| k.parse(s))
            .collect::<Result<_>>()?,
    };
    let f = construct_special(&ctx, &prm)?;
    let det = detect_special(&ctx, &f, &mut ChaCha8Rng::seed_from_u64(cfg.seed))?;
    let roundtrip = match &det {
        Detection::Special(form) => factor_multiset(form) == expected_factors(&ctx, &prm)?,
        Detection::NotSpecial(_) => false,
    };
    Ok(merge(
        header(&ctx, &f),
        json!({
            "coefficients": f.to_literals(&ctx),
            "detected": detection_json(&ctx, &det),
            "roundtrip": roundtrip,
        }),
    ))
}

fn cmd_rho(cfg: &ExperimentConfig) -> Result<Value> {
    let ctx = cfg.field_ctx()?;
    let f = cfg.poly(&ctx)?;
    let prime = parse_tpoly(
        &ctx,
        cfg.prime.as_deref().ok_or_else(|| Error::validation("missing --prime"))?,
    )?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let lc = LocalCounts::new(&ctx, &f, cfg.budget, &mut rng)?;
    let profile = lc.profile(&prime, cfg.kmax.unwrap_or(6), cfg.paranoid, &mut rng)?;
    Ok(merge(header(&ctx, &f), serde_json::to_value(profile)?))
}

fn cmd_sweep(cfg: &ExperimentConfig, threads: Option<usize>) -> Result<Value> {
    let ctx = cfg.field_ctx()?;
    let f = cfg.poly(&ctx)?;
    let n = cfg.n.ok_or_else(|| Error::validation("missing --n"))?;
    let (engine, meta) = engine_for(&ctx, &f, cfg, threads)?;
    let table = engine.sweep(n, cfg.budget)?;
    let summary = summarize(&ctx, &engine, &table);
    Ok(merge(
        merge(header(&ctx, &f), meta),
        json!({ "summary": summary, "table": table.view(&ctx) }),
    ))
}

fn cmd_report(cfg: &ExperimentConfig, threads: Option<usize>) -> Result<Value> {
    let ctx = cfg.field_ctx()?;
    let f = cfg.poly(&ctx)?;
    let (lo, hi) = match (&cfg.n_range, cfg.n) {
        (Some(r), _) => parse_range(r)?,
        (None, Some(n)) => (n, n),
        (None, None) => return Err(Error::validation("missing --n-range")),
    };
    let (engine, meta) = engine_for(&ctx, &f, cfg, threads)?;
    let rows = run_report(&ctx, &engine, lo..=hi, cfg.budget)?;
    if let Some(path) = &cfg.csv {
        write_csv(std::fs::File::create(path)?, &rows, engine.vf().size())?;
    }
    Ok(merge(
        merge(header(&ctx, &f), meta),
        json!({ "seed": cfg.seed, "rows": rows }),
    ))
}

fn cmd_avgroots(cfg: &ExperimentConfig) -> Result<Value> {
    let ctx = cfg.field_ctx()?;
    let f = cfg.poly(&ctx)?;
    let rows = avg_roots(&ctx, &f, cfg.kmax.unwrap_or(8), &mut ChaCha8Rng::seed_from_u64(cfg.seed))?;
    let mean = Exact::new(cesaro_mean(&rows));
    Ok(merge(header(&ctx, &f), json!({ "rows": rows, "cesaro_mean": mean })))
}

fn cmd_fixtures(out: &mut dyn Write) -> Result<bool> {
    let outcomes = crate::fixtures::run_all();
    for o in &outcomes {
        writeln!(out, "{}", o.line())?;
    }
    Ok(outcomes.iter().all(|o| o.passed))
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Validation(_) | Error::Parse { .. } | Error::Domain(_) | Error::Json(_) | Error::Io(_) => 2,
        Error::Budget { .. } => 3,
        Error::Internal(_) | Error::Csv(_) => 1,
    }
}

fn emit(value: &Value, cfg: &ExperimentConfig, out: &mut dyn Write) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    writeln!(out, "{text}")?;
    if let Some(path) = &cfg.out {
        std::fs::write(path, format!("{text}\n"))?;
    }
    Ok(())
}

fn dispatch(cli: Cli, out: &mut dyn Write, threads: Option<usize>) -> Result<i32> {
    let (cfg, value) = match cli.command {
        Command::Vf { common, vf_bound } => {
            let cfg = common.load()?;
            let v = cmd_vf(&cfg, vf_bound)?;
            (cfg, v)
        }
        Command::Special { action } => match action {
            SpecialCmd::Detect { common } => {
                let cfg = common.load()?;
                let v = cmd_detect(&cfg)?;
                (cfg, v)
            }
            SpecialCmd::Construct {
                common,
                f_d,
                a,
                c,
                m,
                l,
                v,
                v_space,
            } => {
                let mut cfg = common.load()?;
                cfg.f_d = f_d.or(cfg.f_d);
                cfg.a = a.or(cfg.a);
                cfg.c = c.or(cfg.c);
                cfg.m = m.or(cfg.m);
                cfg.l = l.or(cfg.l);
                cfg.v = v.or(cfg.v);
                if let Some(s) = v_space {
                    cfg.v_space = Some(json_list("V", &s)?);
                }
                let val = cmd_construct(&cfg)?;
                (cfg, val)
            }
        },
        Command::Rho {
            common,
            prime,
            kmax,
            paranoid,
        } => {
            let mut cfg = common.load()?;
            cfg.prime = prime.or(cfg.prime);
            cfg.kmax = kmax.or(cfg.kmax);
            cfg.paranoid |= paranoid;
            let v = cmd_rho(&cfg)?;
            (cfg, v)
        }
        Command::Sweep { common, n } => {
            let mut cfg = common.load()?;
            cfg.n = n.or(cfg.n);
            let v = cmd_sweep(&cfg, threads)?;
            (cfg, v)
        }
        Command::Report {
            common,
            n_range,
            csv,
        } => {
            let mut cfg = common.load()?;
            cfg.n_range = n_range.or(cfg.n_range);
            cfg.csv = csv.or(cfg.csv);
            cfg.validate()?;
            let v = cmd_report(&cfg, threads)?;
            (cfg, v)
        }
        Command::Avgroots { common, kmax } => {
            let mut cfg = common.load()?;
            cfg.kmax = kmax.or(cfg.kmax);
            let v = cmd_avgroots(&cfg)?;
            (cfg, v)
        }
        Command::Fixtures => {
            return Ok(if cmd_fixtures(out)? { 0 } else { 1 });
        }
    };
    cfg.validate()?;
    emit(&value, &cfg, out)?;
    Ok(0)
}

/// Parse `args` (program name first) and run. Returns the exit code.
/// The worker count comes from `FFLCM_THREADS`.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match threads_from_env() {
        Ok(t) => run_with_threads(args, out, err, t),
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

/// [`run`] with an explicit worker cap; `None` uses the global pool.
pub fn run_with_threads<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write, threads: Option<usize>) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { write!(out, "{text}") } else { write!(err, "{text}") };
            return code;
        }
    };
    match dispatch(cli, out, threads) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_str(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(std::iter::once("fflcm").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn config_round_trip() {
        let cfg = ExperimentConfig {
            field: Some("3".into()),
            f: Some(vec!["T".into(), "0".into(), "1".into()]),
            n_range: Some("4..8".into()),
            ..Default::default()
        };
        let text = cfg.to_canonical_json();
        let back = ExperimentConfig::from_json(&text).unwrap();
        assert_eq!(back, cfg);
        assert_eq!(back.to_canonical_json(), text);
    }

    #[test]
    fn zero_budget_rejected() {
        assert!(matches!(
            ExperimentConfig::from_json(r#"{"budget": 0}"#),
            Err(Error::Validation(_))
        ));
        assert!(ExperimentConfig::from_json(r#"{"bogus": 1}"#).is_err());
    }

    #[test]
    fn vf_example() {
        let (code, out, _) = run_str(&["vf", "--field", "2", "--f", r#"["T","1","1"]"#]);
        assert_eq!(code, 0);
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["v"], 1);
        assert_eq!(v["c_f"], "1/2");
        assert_eq!(v["basis"], json!(["1"]));
    }

    #[test]
    fn detect_example() {
        let (code, out, _) = run_str(&["special", "detect", "--field", "3", "--f", r#"["T","2","0","1"]"#]);
        assert_eq!(code, 0);
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["special"], true);
        assert_eq!((v["m"].as_u64(), v["l"].as_u64(), v["v"].as_u64()), (Some(1), Some(1), Some(1)));
    }

    #[test]
    fn exit_codes() {
        assert_eq!(run_str(&["vf", "--field", "6", "--f", r#"["T","1"]"#]).0, 2);
        assert_eq!(run_str(&["vf", "--field", "3", "--f", r#"["T+"]"#]).0, 2);
        assert_eq!(run_str(&["sweep", "--field", "3", "--f", r#"["T","0","1"]"#, "--n", "30"]).0, 3);
        assert_eq!(run_str(&["report", "--field", "3", "--f", r#"["T","0","1"]"#, "--n-range", "1..3", "--budget", "0"]).0, 2);
        assert_eq!(run_str(&["report", "--field", "3", "--f", r#"["T","0","1"]"#, "--n-range", "5..3"]).0, 2);
        assert_eq!(run_str(&["nonsense"]).0, 2);
    }
}
