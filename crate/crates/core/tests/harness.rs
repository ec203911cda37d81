mod common;

use std::f64::consts::PI;

use common::*;
use geophase::gates::{orange_slice_schedule, OrangeSliceParams};
use geophase::geometry::hausdorff_distance;
use geophase::harness::{
    emit, parse_report, parse_scenario, perturb_schedule, run_scenario, HarnessError, NoiseKind, NoiseModel,
    OutputFormat, Overrides, RunReport,
};
use geophase::{cyclic_basis, evolve, IntegratorConfig};

fn orange_scenario(analyses: &str, noise: &str) -> String {
    format!(
        r#"{{
  "version": 1,
  "id": "orange",
  "schedule": {{ "kind": "orange-slice", "phi": 1.5707963267948966 }},
  "analyses": [{analyses}],
  "integrator": {{ "steps_per_segment": 2000 }}{noise}
}}"#
    )
}

fn noise_block(kind: &str, strength: f64, samples: usize) -> String {
    format!(r#", "noise": {{ "kind": "{kind}", "strength": {strength}, "samples": {samples}, "seed": 7 }}"#)
}

fn run(text: &str) -> RunReport {
    run_scenario(&parse_scenario(text).unwrap(), &Overrides::default()).unwrap()
}

fn strip_timestamp(json: &str) -> String {
    json.lines().filter(|l| !l.trim_start().starts_with("\"generated_at\"")).collect::<Vec<_>>().join("\n")
}

#[test]
fn orange_slice_report_matches_product_oracle() {
    let r = run(&orange_scenario(r#""decompose", "relative-phase", "gamma-omega""#, ""));
    let d = r.decomposition.unwrap();
    assert!(d.labels.iter().all(|l| l.dynamical.abs() < 1e-9));
    let oracle = scale(&expm(&scale(&hamiltonian(0.0, 0.0, 0.0, 1.0), -I * (PI / 2.0))), c(-1.0));
    let e0 = [oracle[0][0], oracle[1][0]];
    let e1 = [oracle[0][1], oracle[1][1]];
    let expected = wrap(e0[0].arg() - e1[1].arg());
    assert!(angle_gap(r.relative_phase.unwrap().value, expected) < 1e-9);
    assert!(angle_gap(expected, PI) < 1e-12);
    assert!(r.gamma_omega.unwrap().iter().all(|g| g.discrepancy < 1e-9));
}

#[test]
fn zero_hamiltonian_gives_zero_phases() {
    let text = r#"{
  "version": 1,
  "id": "idle",
  "schedule": { "kind": "explicit-segments", "segments": [
    { "duration": 2.0, "drive": { "kind": "constant", "c0": 0.0, "cx": 0.0, "cy": 0.0, "cz": 0.0 } }
  ] },
  "analyses": ["decompose"]
}"#;
    let d = run(text).decomposition.unwrap();
    for l in d.labels {
        assert_eq!((l.total, l.dynamical, l.geometric), (0.0, 0.0, 0.0));
    }
}

#[test]
fn missing_duration_names_the_field() {
    let text = r#"{
  "version": 1,
  "id": "broken",
  "schedule": { "kind": "explicit-segments", "segments": [
    { "drive": { "kind": "constant", "c0": 0.0, "cx": 1.0, "cy": 0.0, "cz": 0.0 } }
  ] },
  "analyses": ["decompose"]
}"#;
    let err = parse_scenario(text).unwrap_err();
    assert_eq!(err.exit_code(), 2);
    match err {
        HarnessError::Schema { path, message } => {
            assert!(path.contains("segments[0]"), "{path}");
            assert!(message.contains("duration"), "{message}");
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn unknown_fields_and_versions_are_schema_errors() {
    let extra = orange_scenario(r#""decompose""#, r#", "colour": "red""#);
    assert_eq!(parse_scenario(&extra).unwrap_err().exit_code(), 2);
    let v2 = orange_scenario(r#""decompose""#, "").replace("\"version\": 1", "\"version\": 2");
    assert_eq!(parse_scenario(&v2).unwrap_err().exit_code(), 2);
}

#[test]
fn non_traceless_delta_is_numerical_error() {
    let text = r#"{
  "version": 1,
  "id": "offset",
  "schedule": { "kind": "explicit-segments", "segments": [
    { "duration": 1.0, "drive": { "kind": "constant", "c0": 0.5, "cx": 1.0, "cy": 0.0, "cz": 0.0 } }
  ] },
  "analyses": ["delta"]
}"#;
    let err = run_scenario(&parse_scenario(text).unwrap(), &Overrides::default()).unwrap_err();
    assert_eq!(err.exit_code(), 3);
}

#[test]
fn zero_strength_samples_equal_baseline() {
    let r = run(&orange_scenario(r#""decompose""#, &noise_block("axis-tilt", 0.0, 5)));
    let noise = r.noise.unwrap();
    assert!(noise.relative_phase.values.iter().all(|v| *v == noise.relative_phase.baseline));
    for q in &noise.delta {
        assert!(q.values.iter().all(|v| *v == q.baseline));
    }
}

#[test]
fn reparametrization_keeps_bloch_paths() {
    let s = orange_slice_schedule(&OrangeSliceParams::new(PI / 2.0)).unwrap();
    let cfg = IntegratorConfig { steps_per_segment: 40_000, record_stride: 100, ..Default::default() };
    let baseline = evolve(&s, &cfg).unwrap();
    let basis = cyclic_basis(&baseline.final_unitary()).unwrap();
    let model =
        NoiseModel { kind: NoiseKind::SolidAnglePreservingReparametrization, strength: 0.3, samples: 10, seed: 3 };
    for i in 0..model.samples as u64 {
        let p = evolve(&perturb_schedule(&s, &model, i, &baseline, &basis), &cfg).unwrap();
        for e in [&basis.e0, &basis.e1] {
            let d = hausdorff_distance(&baseline.bloch_path(e), &p.bloch_path(e));
            assert!(d < 1e-9, "sample {i}: {d}");
        }
    }
}

#[test]
fn axis_tilt_spreads_relative_phase() {
    let r = run(&orange_scenario(r#""decompose""#, &noise_block("axis-tilt", 0.05, 50)));
    assert!(r.noise.unwrap().relative_phase.stats.std > 1e-3);
}

#[test]
fn csv_row_counts() {
    let dir = tempfile::tempdir().unwrap();
    let r = run(&orange_scenario(r#""decompose""#, ""));
    let path = dir.path().join("r.csv");
    emit(&r, OutputFormat::from_path(&path), &path).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().count(), 1 + 8);

    let r = run(&orange_scenario(
        r#""relative-phase""#,
        &noise_block("solid-angle-preserving-reparametrization", 0.3, 200),
    ));
    let csv = r.to_csv();
    let noise_rows: Vec<&str> = csv.lines().filter(|l| l.contains(",noise,")).collect();
    let states = r.noise.as_ref().unwrap().delta.len();
    assert_eq!(noise_rows.len(), 200 * (1 + states));
    assert_eq!(noise_rows.iter().filter(|l| l.contains(",relative_phase,")).count(), 200);
}

#[test]
fn json_round_trip_is_lossless() {
    let r = run(&orange_scenario(
        r#""decompose", "delta", "gamma-omega", "relative-phase""#,
        &noise_block("amplitude-jitter", 0.1, 4),
    ));
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.json");
    emit(&r, OutputFormat::Json, &path).unwrap();
    let back = parse_report(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(back, r);
    assert_eq!(back.to_json(), r.to_json());
}

#[test]
fn identical_runs_give_identical_json() {
    let text = orange_scenario(r#""decompose", "delta""#, &noise_block("axis-tilt", 0.05, 20));
    let (a, b) = (run(&text), run(&text));
    assert_eq!(strip_timestamp(&a.to_json()), strip_timestamp(&b.to_json()));
}

#[test]
fn unwritable_output_is_io_error() {
    let r = run(&orange_scenario(r#""decompose""#, ""));
    let path = std::path::Path::new("/nonexistent-dir/out.json");
    assert_eq!(emit(&r, OutputFormat::Json, path).unwrap_err().exit_code(), 4);
}
