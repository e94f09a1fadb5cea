mod common;

use common::q;
use unitri::bounds::{five_term_bound, optimal_k, BoundInput, LogMode};
use unitri::grid::{classify, Grid};
use unitri::harness::emit::{emit, render, Format};
use unitri::harness::manifest::{ExperimentManifest, SetSource};
use unitri::harness::sweep::{run_sweep, SweepOptions};
use unitri::harness::verify::{verify, LemmaId, VerifyOptions};
use unitri::sets::GroundSet;
use unitri::Error;

#[test]
fn decomposition_json_schema() {
    let a = GroundSet::<i64>::from_ints(&[0, 1, 2, 3]).unwrap();
    let g = Grid::new(a.clone(), a, &q(1, 2)).unwrap();
    let d = classify(&g, 2, None).unwrap();
    let v: serde_json::Value = serde_json::from_str(&render(&d, Format::Json).unwrap()).unwrap();
    let keys: Vec<_> = v.as_object().unwrap().keys().cloned().collect();
    for k in ["rr", "rp", "pr", "pp", "total", "k"] {
        assert!(keys.iter().any(|x| x == k), "missing {k}");
    }
    assert_eq!(v["total"], d.total);
}

#[test]
fn manifest_file_drives_outputs() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("a.txt"), "# convex\n0\n1\n3\n6\n10\n").unwrap();
    let text = r#"{
        "id": "demo",
        "seed": 7,
        "a": {"file": "a.txt"},
        "b": {"generator": {"kind": "arithmetic", "start": "0", "step": "1/2", "m": 5}},
        "target_area": "1/2",
        "k_policy": {"explicit": 2},
        "outputs": {"csv": "out/poor.csv"}
    }"#;
    let path = dir.path().join("m.json");
    std::fs::write(&path, text).unwrap();
    let m = ExperimentManifest::load(&path).unwrap();
    assert_eq!(m.set_a::<num_rational::BigRational>().unwrap().len(), 5);
    let r = verify(LemmaId::PoorPoor, &m, &VerifyOptions::default()).unwrap();
    let out = m.output_path(m.outputs.csv.as_ref().unwrap());
    emit(&r, Format::Csv, &out).unwrap();
    let first = std::fs::read(&out).unwrap();
    let r2 = verify(LemmaId::PoorPoor, &m, &VerifyOptions::default()).unwrap();
    emit(&r2, Format::Csv, &out).unwrap();
    assert_eq!(std::fs::read(&out).unwrap(), first);
    let text = String::from_utf8(first).unwrap();
    assert!(text.starts_with("lemma,label,params,lhs,bound,ratio,verdict\n"));
    assert!(text.contains("ASSERTED-EXACT"));
}

#[test]
fn missing_file_reports_path() {
    let m = ExperimentManifest::new("x", SetSource::File("/nonexistent/set.txt".into()));
    match m.set_a::<i64>() {
        Err(Error::Io { path, .. }) => assert!(path.to_string_lossy().contains("nonexistent")),
        other => panic!("{other:?}"),
    }
}

#[test]
fn sweep_json_is_reproducible() {
    let mut m = ExperimentManifest::new("s", SetSource::Generator("random-convex".parse().unwrap()));
    m.seed = 3;
    m.target_area = q(1, 2);
    m.sweep_sizes = vec![5, 7, 9];
    let a = render(&run_sweep(&m, &SweepOptions::guarded()).unwrap(), Format::Json).unwrap();
    let b = render(&run_sweep(&m, &SweepOptions::guarded()).unwrap(), Format::Json).unwrap();
    assert_eq!(a, b);
    assert!(!a.contains("elapsed_ms"));
}

#[test]
fn balancing_is_near_optimal() {
    for e in (8..=40).step_by(4) {
        let inp = BoundInput::new(1u64 << e, 1.0, 1.0, LogMode::Base2).unwrap();
        let o = optimal_k(&inp).unwrap();
        let at_search = five_term_bound(&inp, o.search).unwrap().total();
        let at_formula = five_term_bound(&inp, o.formula).unwrap().total();
        assert!(at_search <= at_formula);
        assert!(at_formula <= 4.0 * at_search, "n=2^{e}");
    }
}
