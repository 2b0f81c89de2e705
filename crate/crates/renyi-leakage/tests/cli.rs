use std::path::PathBuf;
use std::process::Command;

use renyi_core::chain::VerificationReport;
use renyi_core::divergence::RenyiOrder;
use renyi_core::entropic::{cond_entropy_up, OptimizerConfig};
use renyi_core::io::parse_state;
use renyi_leakage::{
    classify, parse_curve_csv, run, ChannelSupOutput, ComputeOutput, CurveOutput, ErrorOutput, Outcome, PenaltyOutput,
    EXIT_INPUT, EXIT_NUMERICAL, EXIT_OK, EXIT_VERIFY_FAILED,
};
use serde::de::DeserializeOwned;
use serde::Serialize;

fn data(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "tests", "data", name].iter().collect();
    p.to_string_lossy().into_owned()
}

fn cli(args: &[&str]) -> Outcome {
    run(std::iter::once("renyi-leakage").chain(args.iter().copied()))
}

/// Parses `text` as `T` and checks that serializing it again reproduces the same JSON value.
fn round_trip<T: Serialize + DeserializeOwned>(text: &str) -> T {
    let v: T = serde_json::from_str(text).unwrap_or_else(|e| panic!("{e}: {text}"));
    let again: serde_json::Value = serde_json::to_value(&v).unwrap();
    let orig: serde_json::Value = serde_json::from_str(text).unwrap();
    assert_eq!(again, orig);
    v
}

fn ok<T: Serialize + DeserializeOwned>(args: &[&str]) -> T {
    let out = cli(args);
    assert_eq!(out.code, EXIT_OK, "{args:?}: {}", out.stdout);
    round_trip(&out.stdout)
}

#[test]
fn compute_h_up_matches_the_library() {
    let bell = data("bell.json");
    let out: ComputeOutput = ok(&[
        "compute",
        "--quantity",
        "H_up",
        "--alpha",
        "1.5",
        "--target",
        "A",
        "--given",
        "B",
        &bell,
    ]);
    let rho = parse_state(&std::fs::read_to_string(&bell).unwrap()).unwrap();
    let want = cond_entropy_up(
        &rho,
        &["A"],
        &["B"],
        RenyiOrder::new(1.5).unwrap(),
        &OptimizerConfig::default(),
    )
    .unwrap();
    assert_eq!(out.value, want.value);
    assert!((out.value + 1.0).abs() < 1e-9);
    assert_eq!(out.witness.as_ref().map(Vec::len), Some(1));
}

#[test]
fn compute_divergence_of_a_state_with_itself() {
    let q = data("qubit.json");
    let out: ComputeOutput = ok(&["compute", "--quantity", "D", "--alpha", "1", &q, &q]);
    assert_eq!(out.value, 0.0);
    let out: ComputeOutput = ok(&["compute", "--quantity", "D", "--alpha", "inf", &q, &data("mixed.json")]);
    assert!(out.value > 0.0);
}

#[test]
fn compute_imax_of_correlated_bits() {
    let out: ComputeOutput = ok(&["compute", "--quantity", "Imax_none", &data("corr_bits.json")]);
    assert!((out.value - 1.0).abs() < 1e-12, "{}", out.value);
    assert_eq!(out.target, vec!["A"]);
    assert_eq!(out.given, vec!["B"]);
    assert!(out.alpha.is_infinite());
}

#[test]
fn compute_other_quantities() {
    let bell = data("bell.json");
    let hmin: ComputeOutput = ok(&["compute", "--quantity", "Hmin_up", &bell]);
    assert!((hmin.value + 1.0).abs() < 1e-6);
    assert!(hmin.diagnostics.residual <= 1e-7);
    let i: ComputeOutput = ok(&["compute", "--quantity", "I", "--alpha", "2", &bell]);
    let idown: ComputeOutput = ok(&["compute", "--quantity", "I_down", "--alpha", "2", &bell]);
    let idd: ComputeOutput = ok(&["compute", "--quantity", "I_downdown", "--alpha", "2", &bell]);
    assert!(idd.value <= idown.value + 1e-7 && idown.value <= i.value + 1e-7);
    let h: ComputeOutput = ok(&["compute", "--quantity", "H_down", "--alpha", "0.5", &bell]);
    assert!((h.value + 1.0).abs() < 1e-9);
    let q = data("qubit.json");
    let smooth: ComputeOutput = ok(&[
        "compute",
        "--quantity",
        "D_smooth_max",
        "--alpha",
        "2",
        "--epsilon",
        "0.1",
        &q,
        &data("mixed.json"),
    ]);
    assert!(smooth.value.is_finite());
}

#[test]
fn compute_input_errors() {
    let bell = data("bell.json");
    for args in [
        vec!["compute", "--quantity", "H_up", "--target", "Z", bell.as_str()],
        vec!["compute", "--quantity", "H_up", "--alpha", "-1", bell.as_str()],
        vec!["compute", "--quantity", "D", bell.as_str()],
        vec!["compute", "--quantity", "I_cond", bell.as_str()],
        vec![
            "compute",
            "--quantity",
            "D_smooth_max",
            "--alpha",
            "2",
            bell.as_str(),
            bell.as_str(),
        ],
        vec!["compute", "--quantity", "nonsense", bell.as_str()],
        vec!["compute", "--quantity", "H", "/nonexistent/state.json"],
        vec!["compute", "--quantity", "H", data("leak_channel.json").as_str()],
    ] {
        let out = cli(&args);
        assert_eq!(out.code, EXIT_INPUT, "{args:?}");
        let e: ErrorOutput = round_trip(&out.stdout);
        assert_eq!(e.error.exit_code, EXIT_INPUT);
        assert!(!e.error.kind.is_empty());
    }
}

#[test]
fn numerical_failures_map_to_exit_three() {
    let e = renyi_core::Error::StalledOptimizer {
        best: 0.0,
        residual: 1.0,
        iters: 3,
    };
    assert_eq!(classify(&e), ("stalled_optimizer", EXIT_NUMERICAL));
    assert_eq!(classify(&renyi_core::Error::NumericalFailure("x".into())).1, EXIT_NUMERICAL);
    assert_eq!(classify(&renyi_core::Error::Parse("x".into())).1, EXIT_INPUT);
}

#[test]
fn penalty_reference_value() {
    let out: PenaltyOutput = ok(&[
        "penalty",
        "--n",
        "100",
        "--h",
        "0.5",
        "--xi",
        "0.01x100",
        "--alpha",
        "1.1",
        "--p-omega",
        "1",
    ]);
    assert_eq!(out.penalty, 49.0);
    assert_eq!((out.rate, out.leakage, out.conditioning), (50.0, 1.0, 0.0));
    let half: PenaltyOutput = ok(&[
        "penalty",
        "--n",
        "100",
        "--h",
        "0.5",
        "--xi",
        "0.01x100",
        "--alpha",
        "1.1",
        "--p-omega",
        "0.5",
    ]);
    assert!((half.penalty - 38.0).abs() < 1e-12);
}

#[test]
fn penalty_from_a_leakage_model() {
    let out: PenaltyOutput = ok(&[
        "penalty", "--n", "10", "--h", "1", "--model", "1,31,1", "--dim-z", "32", "--alpha", "1.2",
    ]);
    assert_eq!(out.xi_source, "model");
    assert_eq!(out.leakage, 50.0);
    assert_eq!(out.penalty, -40.0);
    for args in [
        vec!["penalty", "--n", "2", "--h", "1", "--alpha", "1.2"],
        vec!["penalty", "--n", "2", "--h", "1", "--xi", "0.1", "--alpha", "1.2"],
        vec![
            "penalty", "--n", "2", "--h", "1", "--xi", "0.1x2", "--model", "0.1,2,1", "--alpha", "1.2",
        ],
        vec!["penalty", "--n", "2", "--h", "1", "--model", "0.1,2", "--alpha", "1.2"],
        vec!["penalty", "--n", "2", "--h", "1", "--model", "0.1,2,1", "--alpha", "1.7"],
        vec![
            "penalty",
            "--n",
            "2",
            "--h",
            "1",
            "--xi",
            "0.1x2",
            "--alpha",
            "1.2",
            "--p-omega",
            "0",
        ],
    ] {
        assert_eq!(cli(&args).code, EXIT_INPUT, "{args:?}");
    }
}

#[test]
fn leakage_curves_are_ordered_in_alpha() {
    let out = cli(&["leakage-curve", "--alphas", "1.1,1.01,1.001", "--dim", "32", "--zeta", "1"]);
    assert_eq!(out.code, EXIT_OK);
    assert!(out.stdout.starts_with("# renyi-leakage-toolkit v"));
    let rows = parse_curve_csv(&out.stdout).unwrap();
    assert_eq!(rows.len(), 150);
    let curve = |a: f64| rows.iter().filter(|r| r.alpha == a).collect::<Vec<_>>();
    let (c1, c2, c3) = (curve(1.1), curve(1.01), curve(1.001));
    assert_eq!(c1.len(), 50);
    for i in 0..50 {
        assert_eq!(c1[i].delta, c2[i].delta);
        assert!(c1[i].bound >= c2[i].bound && c2[i].bound >= c3[i].bound, "row {i}");
    }
    assert_eq!(c1[49].bound, 5.0);
}

#[test]
fn zero_leakage_gives_a_zero_column() {
    let out = cli(&["leakage-curve", "--delta", "0"]);
    assert_eq!(out.code, EXIT_OK);
    let rows = parse_curve_csv(&out.stdout).unwrap();
    assert_eq!(rows.len(), 3);
    assert!(rows.iter().all(|r| r.bound == 0.0 && r.vn_limit == 0.0));
}

#[test]
fn curve_json_and_csv_agree() {
    let csv = cli(&["leakage-curve", "--delta-grid", "linear:0:1:11", "--alphas", "1.2,1.4"]);
    let json: CurveOutput = ok(&[
        "leakage-curve",
        "--delta-grid",
        "linear:0:1:11",
        "--alphas",
        "1.2,1.4",
        "--format",
        "json",
    ]);
    assert_eq!(parse_curve_csv(&csv.stdout).unwrap(), json.rows);
}

#[test]
fn invalid_grids_are_input_errors() {
    for grid in ["log:0:1", "log:-4:0:0", "linear:0:2:5", "abc", "log:-4:x:5"] {
        let out = cli(&["leakage-curve", "--delta-grid", grid]);
        assert_eq!(out.code, EXIT_INPUT, "{grid}");
        round_trip::<ErrorOutput>(&out.stdout);
    }
    assert_eq!(cli(&["leakage-curve", "--alphas", "1.6"]).code, EXIT_INPUT);
    assert_eq!(cli(&["leakage-curve", "--dim", "0"]).code, EXIT_INPUT);
    assert_eq!(
        cli(&["leakage-curve", "--delta", "0.1", "--delta-grid", "log:-2:0:3"]).code,
        EXIT_INPUT
    );
}

#[test]
fn verify_passes_and_reports() {
    let rep: VerificationReport = ok(&["verify", "--suite", "d-chain", "--trials", "200", "--seed", "42"]);
    assert!(rep.pass);
    assert_eq!(rep.records.len(), 600);
    assert!(rep.max_residual.unwrap() <= 1e-8);
}

#[test]
fn verify_failures_exit_one_and_name_seeds() {
    let out = cli(&[
        "verify", "--suite", "d-chain", "--trials", "5", "--seed", "1", "--tol", "1e-300",
    ]);
    assert_eq!(out.code, EXIT_VERIFY_FAILED);
    let rep: VerificationReport = round_trip(&out.stdout);
    assert!(!rep.pass);
    assert!(!rep.failing_seeds.is_empty());
    assert_eq!(cli(&["verify", "--suite", "no-such-suite"]).code, EXIT_INPUT);
    assert_eq!(cli(&["verify", "--suite", "d-chain", "--dims", "2,2"]).code, EXIT_INPUT);
    assert_eq!(cli(&["verify", "--suite", "d-chain", "--alphas", "1"]).code, EXIT_INPUT);
}

#[test]
fn verify_infinite_orders_round_trip() {
    let rep: VerificationReport = ok(&["verify", "--suite", "ordering", "--trials", "2", "--alphas", "1.5,inf"]);
    assert!(rep.alphas[1].is_infinite());
}

#[test]
fn channel_sup_stays_below_the_closed_form() {
    let out: ChannelSupOutput = ok(&[
        "channel-sup",
        &data("leak_channel.json"),
        "--alpha",
        "1.2",
        "--restarts",
        "3",
        "--seed",
        "4",
    ]);
    assert_eq!(out.leaked, vec!["L"]);
    assert_eq!(out.status, "LOWER_ESTIMATE");
    assert_eq!(out.within_closed_form, Some(true));
    assert!(out.estimate > 0.0);
    let outside: ChannelSupOutput = ok(&["channel-sup", &data("leak_channel.json"), "--alpha", "1.8", "--restarts", "2"]);
    assert_eq!(outside.closed_form, None);
}

#[test]
fn identical_invocations_are_byte_identical() {
    let runs = [
        vec![
            "verify".to_string(),
            "--suite".into(),
            "c-chain".into(),
            "--trials".into(),
            "3".into(),
            "--seed".into(),
            "9".into(),
        ],
        vec![
            "compute".into(),
            "--quantity".into(),
            "I_down".into(),
            "--alpha".into(),
            "1.5".into(),
            data("bell.json"),
        ],
        vec![
            "channel-sup".into(),
            data("leak_channel.json"),
            "--alpha".into(),
            "1.3".into(),
            "--restarts".into(),
            "2".into(),
        ],
        vec!["leakage-curve".into()],
    ];
    for args in runs {
        let a: Vec<&str> = args.iter().map(String::as_str).collect();
        let first = cli(&a);
        assert_eq!(first.code, EXIT_OK, "{a:?}");
        assert_eq!(first, cli(&a), "{a:?}");
    }
}

#[test]
fn out_flag_writes_the_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("curve.csv");
    let p = path.to_string_lossy().into_owned();
    let out = cli(&["leakage-curve", "--delta", "0.5", "--out", &p]);
    assert_eq!(out.code, EXIT_OK);
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text, cli(&["leakage-curve", "--delta", "0.5"]).stdout);
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_renyi-leakage");
    let st = Command::new(bin)
        .args(["penalty", "--n", "1", "--h", "1", "--xi", "0", "--alpha", "1.5"])
        .output()
        .unwrap();
    assert_eq!(st.status.code(), Some(0));
    let st = Command::new(bin)
        .args(["leakage-curve", "--delta-grid", "bad"])
        .output()
        .unwrap();
    assert_eq!(st.status.code(), Some(2));
    let e: ErrorOutput = serde_json::from_slice(&st.stdout).unwrap();
    assert_eq!(e.error.exit_code, 2);
    let st = Command::new(bin)
        .args(["verify", "--suite", "d-chain", "--trials", "2", "--tol", "1e-300"])
        .output()
        .unwrap();
    assert_eq!(st.status.code(), Some(1));
    let st = Command::new(bin).arg("--help").output().unwrap();
    assert_eq!(st.status.code(), Some(0));
}
