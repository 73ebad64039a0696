use std::process::{Command, Output};

use envelope::record::{OutputRecord, Payload, FORMAT_VERSION};
use envelope::PRECISION_ENV;

fn envelope(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_envelope"))
        .args(args)
        .env_remove(PRECISION_ENV)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn coeffs_csv_ends_with_last_table_entry() {
    let o = envelope(&["coeffs", "--family", "beta-tilde", "--max-k", "6", "--format", "csv"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let lines: Vec<_> = text.lines().collect();
    assert_eq!(lines.len(), 8, "header + 7 rows");
    assert_eq!(lines[0], "k,beta-tilde");
    assert_eq!(*lines.last().unwrap(), "6,5461/425984");
}

#[test]
fn json_round_trip_is_byte_identical() {
    let cases: [&[&str]; 5] = [
        &["coeffs", "--family", "beta-hat", "--max-k", "4", "--format", "json"],
        &["eval", "--series", "binet", "--z", "7.25", "--format", "json"],
        &["eval", "--series", "demoivre", "--z", "12", "--terms", "3", "--format", "json"],
        &["bound", "--series", "gamma-half", "--z", "3", "--terms", "2", "--format", "json"],
        &["demo", "--b", "2", "--steps", "3", "--k-max", "2", "--format", "json"],
    ];
    for args in cases {
        let o = envelope(args);
        assert!(o.status.success(), "{args:?}: {}", stderr(&o));
        let text = stdout(&o);
        let record = OutputRecord::from_json(&text).unwrap();
        assert_eq!(record.format_version, FORMAT_VERSION);
        assert_eq!(format!("{}\n", record.to_json()), text, "{args:?}");
    }
}

#[test]
fn eval_record_contains_central_binomial() {
    let o = envelope(&["eval", "--series", "central-binom", "--z", "10", "--tol", "1e-8", "--format", "json"]);
    assert!(o.status.success());
    let record = OutputRecord::from_json(&stdout(&o)).unwrap();
    assert_eq!(record.precision, 256);
    let Payload::Certified { lo, hi, k_used, error_sign, .. } = record.result else {
        panic!("expected a certified value");
    };
    assert_eq!((k_used, error_sign), (3, 1));
    let truth = 184756f64.ln();
    assert!(lo.parse::<f64>().unwrap() <= truth && truth <= hi.parse::<f64>().unwrap());
}

#[test]
fn precision_from_flag_and_environment() {
    let o = envelope(&["eval", "--series", "binet", "--z", "8", "--precision", "128", "--format", "json"]);
    assert_eq!(OutputRecord::from_json(&stdout(&o)).unwrap().precision, 128);

    let o = Command::new(env!("CARGO_BIN_EXE_envelope"))
        .args(["eval", "--series", "binet", "--z", "8", "--format", "json"])
        .env(PRECISION_ENV, "96")
        .output()
        .unwrap();
    let record = OutputRecord::from_json(&stdout(&o)).unwrap();
    assert_eq!(record.precision, 96);
    let Payload::Certified { value, .. } = record.result else { panic!() };
    // ⌈0.302 · 96⌉ = 29 significant digits
    let digits = value.split('e').next().unwrap().chars().filter(char::is_ascii_digit).count();
    assert_eq!(digits, 29, "{value}");
}

#[test]
fn plain_output_is_readable() {
    let o = envelope(&["bound", "--series", "binet", "--z", "2", "--terms", "1"]);
    assert!(o.status.success());
    assert!(!stdout(&o).is_empty());
}

#[test]
fn unattainable_tolerance_exits_two() {
    let o = envelope(&["eval", "--series", "binet", "--z", "1", "--tol", "1e-30"]);
    assert_eq!(o.status.code(), Some(2));
    let msg = stderr(&o);
    assert!(msg.contains("best achievable bound is 5.95238095238"), "{msg}");
    assert!(stdout(&o).is_empty());
}

#[test]
fn domain_errors_exit_two() {
    for args in [
        &["eval", "--series", "demoivre", "--z", "2.5"][..],
        &["eval", "--series", "central-binom", "--z", "0.5"],
        &["eval", "--series", "binet", "--z", "-1"],
        &["demo", "--b", "7"],
    ] {
        let o = envelope(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", stderr(&o));
        assert!(!stderr(&o).is_empty());
    }
}

#[test]
fn usage_errors_exit_one() {
    for args in [
        &["eval", "--series", "binet", "--z", "3", "--tol", "1e-5", "--terms", "2"][..],
        &["eval", "--series", "stirling", "--z", "3"],
        &["coeffs", "--family", "beta", "--format", "xml"],
        &["frobnicate"],
        &[],
    ] {
        let o = envelope(args);
        assert_eq!(o.status.code(), Some(1), "{args:?}");
    }
}

#[test]
fn help_exits_zero() {
    let o = envelope(&["--help"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("verify"));
}

#[test]
fn verify_passes() {
    let o = envelope(&["verify", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let record = OutputRecord::from_json(&stdout(&o)).unwrap();
    let Payload::Verification { passed, checks } = record.result else { panic!() };
    assert!(passed);
    assert!(checks.len() >= 10);
    assert!(checks.iter().all(|c| c.passed));
}

#[test]
fn demo_csv_has_header_and_rows() {
    let o = envelope(&["demo", "--b", "1", "--steps", "3", "--k-max", "1", "--format", "csv"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("x,k,"));
    assert!(lines.count() >= 1);
}
