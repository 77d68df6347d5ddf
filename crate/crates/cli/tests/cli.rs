use std::process::Command;

use klein_cli::dsl::{self, Item};
use klein_cli::run;
use klein::Segment;
use proptest::prelude::*;

fn invoke(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("klein").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

#[test]
fn scatter_klein_step() {
    let (code, out, _) = invoke(&["scatter", "--V", "5", "--E", "1.5"]);
    assert_eq!(code, 0);
    let mut rd = csv::Reader::from_reader(out.as_bytes());
    let row = rd.records().next().unwrap().unwrap();
    assert_eq!(row[1].parse::<f64>().unwrap(), 0.25);
    assert_eq!(row[2].parse::<f64>().unwrap(), 0.75);
}

#[test]
fn numeric_and_closed_form_agree() {
    let (_, a, _) = invoke(&["scatter", "--potential", "barrier", "--E", "2.2", "--format", "json"]);
    let (_, b, _) = invoke(&["scatter", "--potential", "barrier", "--E", "2.2", "--numeric", "--format", "json"]);
    let a: serde_json::Value = serde_json::from_str(&a).unwrap();
    let b: serde_json::Value = serde_json::from_str(&b).unwrap();
    assert!((a["T"].as_f64().unwrap() - b["T"].as_f64().unwrap()).abs() < 1e-10);
    assert!(b["matrix_cond"].as_f64().unwrap() >= 1.0);
}

#[test]
fn current_report_json() {
    let (code, out, _) = invoke(&["current", "--potential", "step", "--V", "5"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert!((v["j_vacuum"].as_f64().unwrap() + 0.3545281).abs() < 1e-6);
    assert_eq!(v["subcritical"], false);
    let (_, out, _) = invoke(&["current", "--V", "2"]);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["j_vacuum"].as_f64().unwrap(), 0.0);
    assert_eq!(v["subcritical"], true);
}

#[test]
fn exit_codes() {
    assert_eq!(invoke(&["scatter", "--E", "0.5"]).0, 2);
    assert_eq!(invoke(&["scatter", "--m", "-1"]).0, 2);
    assert_eq!(invoke(&["nonsense"]).0, 2);
    assert_eq!(invoke(&["--help"]).0, 0);
    let (code, _, err) = invoke(&["scatter", "--potential", "barrier", "--V", "5", "--a", "40", "--E", "4.5", "--numeric"]);
    assert_eq!(code, 3, "{err}");
    assert!(err.starts_with("error: numerical failure"));
    assert!(!err.contains("panicked"));
    assert_eq!(invoke(&["emission", "--V", "1.5"]).0, 2);
    assert_eq!(invoke(&["coulomb", "--E", "1"]).0, 2);
}

#[test]
fn profile_files_and_line_numbers() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.pot");
    std::fs::write(&bad, "mass 1\nsegment 0 1 2\nsegment 0.5 2 3\n").unwrap();
    let (code, _, err) = invoke(&["scatter", "--potential", bad.to_str().unwrap()]);
    assert_eq!(code, 2);
    assert!(err.contains("line 3: segment overlaps previous"), "{err}");

    let good = dir.path().join("barrier.pot");
    std::fs::write(&good, "# square barrier\nsegment -1 1 5\n").unwrap();
    let (code, file_out, _) = invoke(&["scatter", "--potential", good.to_str().unwrap(), "--E", "2.2"]);
    assert_eq!(code, 0);
    let (_, builtin, _) = invoke(&["scatter", "--potential", "barrier", "--numeric", "--E", "2.2"]);
    assert_eq!(file_out, builtin);
}

#[test]
fn repeated_runs_are_byte_identical() {
    let cases: &[&[&str]] = &[
        &["sweep", "--potential", "sauter", "--V", "10", "--emin", "1.1", "--emax", "8.9", "--esteps", "64"],
        &["current", "--potential", "sauter", "--V", "6", "--field", "1.0", "--steps", "100"],
        &["adiabatic", "--V", "4", "--a", "1", "--dv", "0.05"],
        &["spectrum", "--V", "3", "--a", "10"],
    ];
    for args in cases {
        let first = invoke(args);
        assert_eq!(first.0, 0, "{args:?}: {}", first.2);
        for _ in 0..3 {
            assert_eq!(invoke(args).1, first.1, "{args:?}");
        }
    }
}

#[test]
fn csv_values_reparse_exactly() {
    let (_, out, _) = invoke(&["sweep", "--potential", "barrier", "--esteps", "50", "--format", "json"]);
    let json: Vec<serde_json::Value> = serde_json::from_str(&out).unwrap();
    let (_, out, _) = invoke(&["sweep", "--potential", "barrier", "--esteps", "50"]);
    assert!(!out.contains('\r'));
    let mut rd = csv::Reader::from_reader(out.as_bytes());
    for (rec, obj) in rd.records().zip(&json) {
        let rec = rec.unwrap();
        let t_csv: f64 = rec[2].parse().unwrap();
        let t_json = obj["T"].as_f64().unwrap();
        assert_eq!(t_csv.to_bits(), t_json.to_bits());
    }
}

#[test]
fn out_flag_and_output_dir() {
    let dir = tempfile::tempdir().unwrap();
    let status = Command::new(env!("CARGO_BIN_EXE_klein"))
        .args(["resonances", "--out", "res.csv"])
        .env(klein_cli::OUTPUT_DIR_ENV, dir.path())
        .output()
        .unwrap();
    assert!(status.status.success());
    assert!(status.stdout.is_empty());
    let text = std::fs::read_to_string(dir.path().join("res.csv")).unwrap();
    assert!(text.starts_with("N,E\n1,3.1379041108"));
}

#[test]
fn binary_reports_exit_codes() {
    let status = Command::new(env!("CARGO_BIN_EXE_klein"))
        .args(["scatter", "--E", "0.2"])
        .output()
        .unwrap();
    assert_eq!(status.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&status.stderr);
    assert!(stderr.starts_with("error:") && !stderr.contains("panicked"));
}

fn finite() -> impl Strategy<Value = f64> {
    prop_oneof![-1e3..1e3f64, -1.0..1.0f64, -1e100..1e100f64]
}

proptest! {
    #[test]
    fn documents_round_trip(
        mass in 0.01..100.0f64,
        left in finite(),
        right in finite(),
        widths in proptest::collection::vec((0.001..10.0f64, finite()), 0..6),
        ramp in proptest::option::of((0.01..5.0f64, finite(), finite(), 1usize..40)),
    ) {
        let mut text = format!("mass {mass:?}\nleft {left:?}\nright {right:?}\n");
        let mut x = -1.0;
        for (w, v) in &widths {
            text += &format!("segment {x:?} {:?} {v:?}\n", x + w);
            x += w;
        }
        if let Some((w, v0, v1, n)) = ramp {
            text += &format!("ramp {x:?} {:?} {v0:?} {v1:?} {n}  # trailing\n", x + w);
        }
        let doc = dsl::parse(&text).unwrap();
        let again = dsl::parse(&doc.to_text()).unwrap();
        prop_assert_eq!(&again.items, &doc.items);
        let profile = doc.to_profile().unwrap();
        prop_assert_eq!(&again.to_profile().unwrap(), &profile);
        prop_assert_eq!(dsl::load(&dsl::profile_to_text(&profile)).unwrap(), profile);
        if let Some(Item::Segment(s)) = doc.items.first() {
            prop_assert_eq!(*s, Segment::new(-1.0, -1.0 + widths[0].0, widths[0].1));
        }
    }
}
