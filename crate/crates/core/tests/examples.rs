//! Worked examples for the report layer and the `fflcm` binary.

use std::process::Command;

use fflcm_core::fixtures::{engine, CORPUS};
use fflcm_core::report::{avg_roots, cesaro_mean, run_report};
use fflcm_core::special::{construct_special, detect_special, expected_factors, factor_multiset, Detection};
use num_rational::Ratio;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

fn fflcm(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_fflcm"))
        .args(args)
        .env_remove("FFLCM_THREADS")
        .output()
        .expect("spawn fflcm");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn json(text: &str) -> Value {
    serde_json::from_str(text).expect("valid JSON")
}

#[test]
fn artin_schreier_cubic_ratio_at_seven() {
    let (ctx, f) = CORPUS[2].load();
    let eng = engine(&ctx, &f, None).unwrap();
    let rows = run_report(&ctx, &eng, 7..=7, 1 << 12).unwrap();
    let r = rows[0].ratio_conj.as_ref().unwrap();
    // recorded from the first run; deg L checked against the lcm oracle
    assert_eq!(rows[0].deg_l, Some(11471));
    assert_eq!(r.exact, "11471/10206");
    assert!(r.value >= Ratio::new(7, 10));
}

#[test]
fn average_root_counts_stay_near_one() {
    for m in CORPUS {
        let (ctx, f) = m.load();
        let kmax = if ctx.q() == 2 { 8 } else { 6 };
        let rows = avg_roots(&ctx, &f, kmax, &mut ChaCha8Rng::seed_from_u64(0)).unwrap();
        let mean = cesaro_mean(&rows);
        assert!(
            mean >= Ratio::new(1, 2) && mean <= Ratio::new(3, 2),
            "{}: Cesaro mean {mean}",
            m.label()
        );
    }
}

#[test]
fn generated_special_forms_round_trip() {
    let params = fflcm_core::fixtures::generated_params(2);
    assert!(params.len() >= 40);
    for (ctx, prm) in &params {
        let f = construct_special(ctx, prm).unwrap();
        match detect_special(ctx, &f, &mut ChaCha8Rng::seed_from_u64(1)).unwrap() {
            Detection::Special(form) => {
                assert_eq!(factor_multiset(&form), expected_factors(ctx, prm).unwrap());
                assert_eq!((form.m, form.l, form.v), (prm.m, prm.l, prm.v));
                assert_eq!(construct_special(ctx, &prm_from(&form)).unwrap(), f);
            }
            other => panic!("{}: {other:?}", f.display(ctx)),
        }
    }
}

fn prm_from(form: &fflcm_core::special::SpecialForm) -> fflcm_core::special::SpecialParams {
    fflcm_core::special::SpecialParams {
        f_d: form.f_d.clone(),
        a: form.a.clone(),
        c: form.c.clone(),
        m: form.m,
        l: form.l,
        v: form.v,
        v_space: form.v_space.clone(),
    }
}

#[test]
fn cli_vf_example() {
    let (code, out, _) = fflcm(&["vf", "--field", "2", "--f", r#"["T","1","1"]"#, "--vf-bound", "3"]);
    assert_eq!(code, 0);
    let v = json(&out);
    assert_eq!(v["v"], 1);
    assert_eq!(v["c_f"], "1/2");
    assert_eq!(v["basis"], serde_json::json!(["1"]));
    assert_eq!(v["brute"]["agrees"], true);
}

#[test]
fn cli_special_detect_and_construct() {
    let (code, out, _) = fflcm(&["special", "detect", "--field", "3", "--f", r#"["T","2","0","1"]"#]);
    assert_eq!(code, 0);
    let v = json(&out);
    assert_eq!(v["special"], true);
    assert_eq!((v["m"].as_u64(), v["l"].as_u64(), v["v"].as_u64()), (Some(1), Some(1), Some(1)));

    let (code, out, _) = fflcm(&["special", "detect", "--field", "2", "--f", r#"["T","0","0","1"]"#]);
    assert_eq!(code, 0);
    assert_eq!(json(&out)["reason"], "no-root-of-unity");

    let (code, out, _) = fflcm(&[
        "special", "construct", "--field", "3", "--f-d", "1", "--A", "0", "--C", "T", "--m", "1", "--l", "1", "--v",
        "1", "--V", r#"["0","1","2"]"#,
    ]);
    assert_eq!(code, 0, "{out}");
    let v = json(&out);
    assert_eq!(v["coefficients"], serde_json::json!(["T", "2", "0", "1"]));
    assert_eq!(v["roundtrip"], true);
}

#[test]
fn cli_rho_profile() {
    let (code, out, _) = fflcm(&[
        "rho", "--field", "3", "--f", r#"["T","0","1"]"#, "--prime", "T", "--kmax", "5", "--paranoid",
    ]);
    assert_eq!(code, 0);
    let v = json(&out);
    assert_eq!(v["values"], serde_json::json!([1, 0, 0, 0, 0]));
    assert_eq!(v["separable"], true);
}

#[test]
fn cli_report_csv_is_a_projection_of_json() {
    let dir = std::env::temp_dir().join(format!("fflcm-csv-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let csv_path = dir.join("out.csv");
    let (code, out, _) = fflcm(&[
        "report", "--field", "3", "--f", r#"["T","0","1"]"#, "--n-range", "2..5", "--csv",
        csv_path.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let v = json(&out);
    let mut reader = csv::Reader::from_path(&csv_path).unwrap();
    assert_eq!(
        reader.headers().unwrap().iter().collect::<Vec<_>>(),
        fflcm_core::report::CSV_HEADER.to_vec()
    );
    let rows: Vec<csv::StringRecord> = reader.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), 4);
    for (rec, j) in rows.iter().zip(v["rows"].as_array().unwrap()) {
        assert_eq!(rec[0], j["n"].to_string());
        assert_eq!(rec[5], j["deg_l"].to_string());
        assert_eq!(rec[6], j["deg_ell"].to_string());
        assert_eq!(rec[7], j["deg_pf"].to_string());
        assert_eq!(rec[8], j["s_f"].to_string());
        assert_eq!(rec[10], *j["ratio_conj"]["decimal"].as_str().unwrap());
        assert_eq!(rec[12], *j["ratio_rad"]["decimal"].as_str().unwrap());
    }
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn cli_config_file_matches_flags() {
    let dir = std::env::temp_dir().join(format!("fflcm-cfg-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let cfg = dir.join("cfg.json");
    std::fs::write(&cfg, r#"{"field": "3", "f": ["T","0","1"], "n": 4, "seed": 3}"#).unwrap();
    let (c1, from_file, _) = fflcm(&["sweep", "--config", cfg.to_str().unwrap()]);
    let (c2, from_flags, _) = fflcm(&["sweep", "--field", "3", "--f", r#"["T","0","1"]"#, "--n", "4", "--seed", "3"]);
    assert_eq!((c1, c2), (0, 0));
    assert_eq!(from_file, from_flags);
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn cli_exit_codes() {
    let (code, _, err) = fflcm(&["vf", "--field", "3", "--f", r#"["T+*2"]"#]);
    assert_eq!(code, 2);
    assert!(err.contains('*'), "{err}");
    let (code, _, err) = fflcm(&["sweep", "--field", "3", "--f", r#"["T","0","1"]"#, "--n", "9", "--budget", "1000"]);
    assert_eq!(code, 3);
    assert!(err.contains("19683"), "{err}");
    let (code, _, _) = fflcm(&["rho", "--field", "3", "--f", r#"["T^2","2*T","1"]"#, "--prime", "T"]);
    assert_eq!(code, 2);
    let (code, _, _) = fflcm(&["report", "--field", "3"]);
    assert_eq!(code, 2);
}

#[test]
fn cli_threads_do_not_change_output() {
    let run = |threads: &str| {
        Command::new(env!("CARGO_BIN_EXE_fflcm"))
            .args(["report", "--field", "2", "--f", r#"["1","T","1"]"#, "--n-range", "3..7"])
            .env("FFLCM_THREADS", threads)
            .output()
            .unwrap()
            .stdout
    };
    let one = run("1");
    assert!(!one.is_empty());
    assert_eq!(one, run("2"));
    assert_eq!(one, run("6"));
}
