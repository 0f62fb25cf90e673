use std::io::Write;
use std::process::{Command, Output, Stdio};

use proptest::prelude::*;
use quasimod_cli::document::{Metadata, SeriesDocument};
use quasimod_core::qseries::{rat, QSeries};
use quasimod_core::Level;

fn quasimod(args: &[&str], stdin: Option<&str>) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_quasimod"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary runs");
    let mut pipe = child.stdin.take().unwrap();
    pipe.write_all(stdin.unwrap_or("").as_bytes()).unwrap();
    drop(pipe);
    child.wait_with_output().unwrap()
}

fn stdout(out: &Output) -> String {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn doc(out: &Output) -> SeriesDocument {
    SeriesDocument::parse(&stdout(out)).unwrap()
}

#[test]
fn builtin_expansions() {
    let c2 = doc(&quasimod(&["series", "C2", "--order", "3"], None));
    assert_eq!((c2.valuation, c2.order), (0, 3));
    assert_eq!(c2.coefficients, ["-1/24", "1", "3", "4"]);

    let inv = doc(&quasimod(&["series", "InvDelta", "--order", "2"], None));
    assert_eq!((inv.valuation, inv.order), (-1, 2));
    assert_eq!(inv.coefficients, ["1", "24", "324", "3200"]);

    let f = doc(&quasimod(&["series", "F_2_1_pp", "--order", "2"], None));
    assert_eq!((f.valuation, f.order), (-1, 2));
    assert_eq!(f.coefficients, ["0", "0", "1", "36"]);
}

#[test]
fn default_order_is_fifty() {
    let d = doc(&quasimod(&["series", "Delta"], None));
    assert_eq!(d.order, 50);
    assert_eq!(
        (d.valuation, &d.coefficients[..2]),
        (1, &["1".to_string(), "-24".to_string()][..])
    );
}

#[test]
fn unknown_name_fails() {
    let out = quasimod(&["series", "E7"], None);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown series"));
}

#[test]
fn apply_pipeline() {
    let inv = stdout(&quasimod(&["series", "InvDelta"], None));

    let t = doc(&quasimod(&["apply", "twrong", "-m", "2", "-l", "-2"], Some(&inv)));
    assert_eq!(t.valuation, -2);
    assert_eq!(t.coefficients[0], "1/8");

    let f02 = doc(&quasimod(&["apply", "mcf", "-g", "0", "-m", "2"], Some(&inv)));
    assert_eq!(f02.coefficients[2], "27");
    assert_eq!(f02.metadata, Some(Metadata::new(Level::Two, -12, 2)));

    let c2 = stdout(&quasimod(&["series", "C2", "--order", "30"], None));
    let d = doc(&quasimod(&["apply", "dq", "--order", "5"], Some(&c2)));
    assert_eq!(d.coefficients, ["0", "1", "6", "12", "28", "30"]);
    assert_eq!(d.metadata.unwrap().weight, 4);
}

#[test]
fn ddc2_through_stdin_and_file() {
    let c2 = stdout(&quasimod(&["series", "C2", "--order", "30"], None));
    let dq = stdout(&quasimod(&["apply", "dq"], Some(&c2)));
    let dir = std::env::temp_dir().join(format!("quasimod-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("dq.json");
    std::fs::write(&path, &dq).unwrap();
    let from_file = stdout(&quasimod(&["apply", "ddc2", "--input", path.to_str().unwrap()], None));
    let from_stdin = stdout(&quasimod(&["apply", "ddc2"], Some(&dq)));
    std::fs::remove_dir_all(&dir).unwrap();
    assert_eq!(from_file, from_stdin);
    // d/dC2 (10 C4 - 2 C2^2) = -4 C2.
    let d = SeriesDocument::parse(&from_file).unwrap();
    assert_eq!(&d.coefficients[..3], ["1/6", "-4", "-12"]);
}

#[test]
fn ddc2_without_metadata_fails() {
    let bare = r#"{"valuation":0,"order":2,"coefficients":["1","2","3"]}"#;
    let out = quasimod(&["apply", "ddc2"], Some(bare));
    assert!(!out.status.success());
}

#[test]
fn malformed_documents_fail() {
    for bad in [
        r#"{"valuation":0,"order":2,"coefficients":["1","2"]}"#,
        r#"{"valuation":0,"order":1,"coefficients":["1","2/4"]}"#,
        r#"{"valuation":0,"order":0,"coefficients":["1"],"extra":1}"#,
        "not json",
    ] {
        assert!(!quasimod(&["apply", "dq"], Some(bad)).status.success(), "{bad}");
    }
}

#[test]
fn emitted_documents_roundtrip() {
    for pretty in [false, true] {
        let mut args = vec!["series", "F_1_2_p", "--order", "12"];
        if pretty {
            args.push("--pretty");
        }
        let text = stdout(&quasimod(&args, None));
        let body = text.strip_suffix('\n').unwrap();
        assert_eq!(SeriesDocument::parse(body).unwrap().emit(pretty), body);
    }
}

#[test]
fn verify_suites_pass() {
    for (suite, order) in [
        ("degeneration", "10"),
        ("commutators", "40"),
        ("examples", "50"),
        ("compat", "50"),
        ("hecke-decomp", "40"),
        ("membership", "50"),
    ] {
        let text = stdout(&quasimod(&["verify", suite, "--order", order], None));
        assert!(text.lines().all(|l| !l.starts_with("FAIL")), "{suite}:\n{text}");
        assert!(text.trim_end().ends_with("0 failed"), "{suite}:\n{text}");
    }
    let text = stdout(&quasimod(&["verify", "degeneration", "--order", "10"], None));
    assert!(text.contains("36, 8760, 754992, 36694512"));
}

#[test]
fn verify_rejects_short_orders() {
    let out = quasimod(&["verify", "membership", "--order", "20"], None);
    assert!(!out.status.success());
}

fn document() -> impl Strategy<Value = SeriesDocument> {
    let coeffs = prop::collection::vec((-1000i64..1000, 1i64..50), 1..30);
    let meta = prop::option::of((1u32..=2, -20i64..=20, 0u32..=3));
    (-5i64..5, coeffs, meta).prop_map(|(v, cs, meta)| {
        let f = QSeries::new(v, cs.into_iter().map(|(n, d)| rat(n, d)).collect()).unwrap();
        let meta = meta.map(|(l, w, p)| Metadata::new(Level::from_number(l).unwrap(), w, p));
        SeriesDocument::from_series(&f, meta)
    })
}

proptest! {
    #[test]
    fn parse_then_emit_is_identity(d in document(), pretty in any::<bool>()) {
        let text = d.emit(pretty);
        let back = SeriesDocument::parse(&text).unwrap();
        prop_assert_eq!(back.emit(pretty), text);
        prop_assert_eq!(back.to_series().unwrap(), d.to_series().unwrap());
    }
}
