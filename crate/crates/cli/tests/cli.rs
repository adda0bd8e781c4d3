//! End-to-end tests of the `qmix` binary: output contents, schema round
//! trips, CSV format and the exit-code contract.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use qmix_cli::output::{
    ConditionOutput, DoubleSlitEnvOutput, EstimateOutput, MixOutput, SlitsOutput,
};
use qmix_cli::scenario::ScenarioFile;
use qmix_core::SuiteReport;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_qmix"))
}

fn scenario(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../scenarios")
        .join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout_json<T: serde::de::DeserializeOwned>(out: &Output) -> T {
    assert!(
        out.status.success(),
        "command failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("stdout is a valid output document")
}

#[test]
fn shipped_scenarios_parse_and_round_trip() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios");
    let mut seen = 0;
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().map(|e| e != "json").unwrap_or(true) {
            continue;
        }
        let text = std::fs::read_to_string(&path).unwrap();
        let parsed: ScenarioFile = serde_json::from_str(&text)
            .unwrap_or_else(|e| panic!("{} does not parse: {e}", path.display()));
        // Round trip through the schema types.
        let re = serde_json::to_string(&parsed).unwrap();
        let _: ScenarioFile = serde_json::from_str(&re).unwrap();
        seen += 1;
    }
    assert!(seen >= 16, "expected the shipped scenario corpus, saw {seen}");
}

#[test]
fn mix_endpoint_outputs() {
    let coherent: MixOutput = stdout_json(&run(&[
        "mix",
        scenario("mix_coherent.json").to_str().unwrap(),
    ]));
    assert!((coherent.purity - 1.0).abs() < 1e-10);
    assert_eq!(
        serde_json::to_value(&coherent.classification).unwrap()["verdict"],
        "Indistinguishable"
    );

    let incoherent: MixOutput = stdout_json(&run(&[
        "mix",
        scenario("mix_incoherent.json").to_str().unwrap(),
    ]));
    assert!((incoherent.purity - 0.5).abs() < 1e-10);
    assert_eq!(
        serde_json::to_value(&incoherent.classification).unwrap()["verdict"],
        "FullyDistinguishable"
    );

    let partial: MixOutput = stdout_json(&run(&[
        "mix",
        scenario("mix_partial.json").to_str().unwrap(),
    ]));
    let off = partial.reduced[0][1];
    let modulus = (off[0] * off[0] + off[1] * off[1]).sqrt();
    assert!((modulus - 0.25).abs() < 1e-10);
}

#[test]
fn slits_visibility_and_csv_format() {
    let tmp = tempfile::tempdir().unwrap();
    let csv_path = tmp.path().join("pattern.csv");
    let out: SlitsOutput = stdout_json(&run(&[
        "slits",
        scenario("two_slit_overlap_0_5.json").to_str().unwrap(),
        "--csv",
        csv_path.to_str().unwrap(),
    ]));
    assert!((out.visibility - 0.5).abs() < 1e-6);
    assert_eq!(out.samples, 20001);

    let csv = std::fs::read_to_string(&csv_path).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("angle,intensity"));
    let first = lines.next().unwrap();
    assert_eq!(first.split(',').count(), 2);
    assert!(!csv.contains('\r'), "LF line endings only");
    assert_eq!(csv.lines().count(), 20002);
    for field in first.split(',') {
        field.parse::<f64>().expect("numeric CSV fields");
    }
}

#[test]
fn condition_outputs() {
    let anti: ConditionOutput = stdout_json(&run(&[
        "condition",
        scenario("three_slit_anticoincidence.json").to_str().unwrap(),
    ]));
    assert!((anti.visibility - 1.0).abs() < 1e-6);
    assert!((anti.purity - 1.0).abs() < 1e-9);

    let coin: ConditionOutput = stdout_json(&run(&[
        "condition",
        scenario("three_slit_coincidence.json").to_str().unwrap(),
    ]));
    assert!((coin.purity - 1.0).abs() < 1e-9);
    assert!((coin.conditional_reduced[0][0][0] - 1.0).abs() < 1e-9);
}

#[test]
fn double_slit_env_outputs() {
    let collinear: DoubleSlitEnvOutput = stdout_json(&run(&[
        "double-slit-env",
        scenario("double_slit_collinear.json").to_str().unwrap(),
    ]));
    assert!((collinear.rho_s_purity - 1.0).abs() < 1e-10);
    assert!((collinear.rho_s_off_diagonal_modulus - 0.5).abs() < 1e-10);

    let orthogonal: DoubleSlitEnvOutput = stdout_json(&run(&[
        "double-slit-env",
        scenario("double_slit_orthogonal.json").to_str().unwrap(),
    ]));
    assert!((orthogonal.rho_s_purity - 0.5).abs() < 1e-10);
    assert!(orthogonal.rho_s_off_diagonal_modulus < 1e-12);
}

#[test]
fn estimate_outputs_and_trajectory_csv() {
    let tmp = tempfile::tempdir().unwrap();
    let csv_path = tmp.path().join("trajectory.csv");
    let out: EstimateOutput = stdout_json(&run(&[
        "estimate",
        scenario("estimate_unknown_pure.json").to_str().unwrap(),
        "--csv",
        csv_path.to_str().unwrap(),
    ]));
    assert_eq!(out.shots, 50);
    assert!(out.max_posterior > 0.99);

    let csv = std::fs::read_to_string(&csv_path).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("shot,w1,w2"));
    assert_eq!(csv.lines().count(), 52); // header + prior + 50 shots
}

#[test]
fn verify_passes_and_is_deterministic() {
    let tmp = tempfile::tempdir().unwrap();
    let out1 = tmp.path().join("r1.json");
    let out2 = tmp.path().join("r2.json");
    for out in [&out1, &out2] {
        let res = run(&[
            "verify",
            "--seed",
            "13",
            "--trials",
            "5",
            "--dims",
            "2,3",
            "--out",
            out.to_str().unwrap(),
        ]);
        assert!(res.status.success());
    }
    let b1 = std::fs::read(&out1).unwrap();
    let b2 = std::fs::read(&out2).unwrap();
    assert_eq!(b1, b2, "byte-identical reports for a fixed seed");

    let report: SuiteReport = serde_json::from_slice(&b1).unwrap();
    assert!(report.passed);
    assert_eq!(report.seed, 13);
}

#[test]
fn verify_corrupted_tolerance_exits_one() {
    let res = run(&[
        "verify",
        "--seed",
        "13",
        "--trials",
        "3",
        "--dims",
        "2",
        "--tolerance",
        "class=1e-30",
    ]);
    assert_eq!(res.status.code(), Some(1));
    let report: SuiteReport = serde_json::from_slice(&res.stdout).unwrap();
    assert!(!report.passed);
}

#[test]
fn exit_code_contract() {
    // 2: unreadable file.
    let res = run(&["mix", "/nonexistent/file.json"]);
    assert_eq!(res.status.code(), Some(2));

    // 2: schema violation (unknown field).
    let tmp = tempfile::tempdir().unwrap();
    let bad = tmp.path().join("bad.json");
    std::fs::write(
        &bad,
        r#"{"kind": "mix", "descriptors": [], "amplitudes": [], "gram": [], "extra": 1}"#,
    )
    .unwrap();
    let res = run(&["mix", bad.to_str().unwrap()]);
    assert_eq!(res.status.code(), Some(2));

    // 2: kind mismatch.
    let res = run(&[
        "mix",
        scenario("two_slit_overlap_0_5.json").to_str().unwrap(),
    ]);
    assert_eq!(res.status.code(), Some(2));

    // 3: numeric-domain error (null conditioning event). Conditioning the
    // fully coherent two-slit state on a vector orthogonal to its (single)
    // realized marker direction is a null event.
    let null_event = tmp.path().join("null.json");
    let mut doc: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(scenario("three_slit_anticoincidence.json")).unwrap(),
    )
    .unwrap();
    doc["detector"] = serde_json::json!({ "vector": [[0.0, 0.0], [0.0, 0.0]] });
    std::fs::write(&null_event, serde_json::to_string(&doc).unwrap()).unwrap();
    let res = run(&["condition", null_event.to_str().unwrap()]);
    assert_eq!(res.status.code(), Some(2), "zero vector is rejected as input");

    doc["detector"] = serde_json::json!({ "vector": [[1.0, 0.0], [0.0, 0.0]] });
    std::fs::write(&null_event, serde_json::to_string(&doc).unwrap()).unwrap();
    let res = run(&["condition", null_event.to_str().unwrap()]);
    assert!(res.status.success(), "conditioning on the click marker works");
}

#[test]
fn outputs_revalidate_against_schema_types() {
    // Re-parse emitted documents through the same (deny_unknown_fields)
    // serde types that define the schema.
    let out = run(&["mix", scenario("mix_partial.json").to_str().unwrap()]);
    let doc: MixOutput = stdout_json(&out);
    let re = serde_json::to_string(&doc).unwrap();
    let _: MixOutput = serde_json::from_str(&re).unwrap();

    let out = run(&[
        "slits",
        scenario("two_slit_overlap_0_0.json").to_str().unwrap(),
    ]);
    let doc: SlitsOutput = stdout_json(&out);
    assert!(doc.visibility < 1e-9);
    let re = serde_json::to_string(&doc).unwrap();
    let _: SlitsOutput = serde_json::from_str(&re).unwrap();
}
