use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use duality_lab::network::{path, Network};
use duality_lab_cli::format::{emit_network, parse_network_str, parse_pair_str};
use duality_lab_cli::{JobError, ParseError};
use proptest::prelude::*;

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_duality-lab"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

fn report_rows(dir: &Path) -> Vec<csv::StringRecord> {
    let mut r = csv::Reader::from_path(dir.join("report.csv")).unwrap();
    assert_eq!(
        r.headers().unwrap(),
        vec!["identity", "anchor", "residual", "tolerance", "pass"]
    );
    r.records().map(Result::unwrap).collect()
}

#[test]
fn scalar_operator_passes_and_writes_projection() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "t.mat", "# T = 2\nmatrix 1 1\n2\n");
    let out = bin(&[
        "--cmd",
        "charproj",
        "--in",
        &input,
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    assert!(report_rows(dir.path()).iter().all(|r| &r[4] == "true"));
    let mut e = csv::Reader::from_path(dir.path().join("projection.csv")).unwrap();
    let values: Vec<f64> = e.records().map(|r| r.unwrap()[2].parse().unwrap()).collect();
    let want = [0.2, 0.4, 0.4, 0.8];
    assert!(
        values.iter().zip(want).all(|(v, w)| (v - w).abs() < 1e-14),
        "{values:?}"
    );
}

#[test]
fn zero_tolerance_makes_rows_fail() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(
        dir.path(),
        "t.mat",
        "matrix 2 2\n1 2\n0 3\ngram 2\n2 1\n1 2\ngram 2\n1 0\n0 1\n",
    );
    let out = bin(&[
        "--cmd",
        "charproj",
        "--in",
        &input,
        "--out",
        dir.path().to_str().unwrap(),
        "--tol",
        "stone=0",
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn malformed_input_exits_2_with_location() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "bad.net", "network bad\nbase 0\nedge 0 1 one\n");
    let out = bin(&["--cmd", "dipole", "--in", &input, "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 3, column 10"), "{err}");
}

#[test]
fn module_error_exits_3_with_its_name() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "neg.net", "network neg\nbase 0\nedge 0 1 -1\n");
    let out = bin(&["--cmd", "dipole", "--in", &input, "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("NonpositiveConductance"));
}

#[test]
fn unknown_tolerance_is_a_usage_error() {
    let out = bin(&["--cmd", "defect", "--tol", "nonsense=1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn dipoles_of_the_bundled_path() {
    let dir = tempfile::tempdir().unwrap();
    let net = concat!(env!("CARGO_MANIFEST_DIR"), "/data/p3.net");
    let out = bin(&["--cmd", "dipole", "--in", net, "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let mut r = csv::Reader::from_path(dir.path().join("dipoles.csv")).unwrap();
    let v2: Vec<f64> = r
        .records()
        .map(Result::unwrap)
        .filter(|rec| &rec[0] == "2")
        .map(|rec| rec[2].parse().unwrap())
        .collect();
    // v_2 = (0, 1, 2)
    assert!(
        v2.iter().zip([0.0, 1.0, 2.0]).all(|(a, b)| (a - b).abs() < 1e-12),
        "{v2:?}"
    );
}

#[test]
fn spectra_of_a_network_lists_atoms() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "p2.net", "network p2\nbase 0\nedge 0 1 1\n");
    let out = bin(&[
        "--cmd",
        "spectra",
        "--in",
        &input,
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let mut r = csv::Reader::from_path(dir.path().join("spectral_measure.csv")).unwrap();
    let atoms: Vec<(f64, f64)> = r
        .records()
        .map(Result::unwrap)
        .filter(|rec| &rec[0] == "0")
        .map(|rec| (rec[1].parse().unwrap(), rec[2].parse().unwrap()))
        .collect();
    assert_eq!(atoms.len(), 2);
    assert!((atoms[0].0).abs() < 1e-12 && (atoms[0].1 - 0.5).abs() < 1e-12);
    assert!((atoms[1].0 - 2.0).abs() < 1e-12 && (atoms[1].1 - 0.5).abs() < 1e-12);
}

#[test]
fn duality_of_a_pair_file() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "d.pair", "pair\ngram 2\n1 0\n0 1\ngram 2\n2 0\n0 3\n");
    let out = bin(&[
        "--cmd",
        "duality",
        "--in",
        &input,
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let mut r = csv::Reader::from_path(dir.path().join("delta.csv")).unwrap();
    let d: Vec<f64> = r.records().map(|rec| rec.unwrap()[2].parse().unwrap()).collect();
    assert!(
        d.iter().zip([2.0, 0.0, 0.0, 3.0]).all(|(a, b)| (a - b).abs() < 1e-12),
        "{d:?}"
    );
}

#[test]
fn pair_with_proper_basis() {
    let cd = parse_pair_str("pair\ngram 2\n1 0\n0 1\ngram 2\n1 0\n0 1\nbasis 2 1\n1\n0\n").unwrap();
    assert_eq!(cd.basis().cols(), 1);
}

#[test]
fn exhaust_writes_gap_table() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin(&[
        "--cmd",
        "exhaust",
        "--family",
        "binary_tree:5:0.5",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let mut r = csv::Reader::from_path(dir.path().join("exhaustion.csv")).unwrap();
    let levels: Vec<String> = r.records().map(|rec| rec.unwrap()[0].to_string()).collect();
    assert_eq!(levels, ["2", "3", "4", "5"]);
}

#[test]
fn defect_with_network_adds_rows() {
    let dir = tempfile::tempdir().unwrap();
    let net = concat!(env!("CARGO_MANIFEST_DIR"), "/data/p3.net");
    let out = bin(&["--cmd", "defect", "--in", net, "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    assert!(report_rows(dir.path()).iter().any(|r| r[0].contains("on p3")));
    assert!(dir.path().join("interval_sweep.csv").exists());
}

#[test]
fn parse_error_reports_missing_header() {
    match parse_network_str("base 0\n") {
        Err(JobError::Parse(ParseError { line: 1, column: 1, .. })) => {}
        other => panic!("{other:?}"),
    }
}

#[test]
fn comments_and_blank_lines_are_skipped() {
    let n = parse_network_str("# a\n\nnetwork p\n  # b\nbase 0\nedge 0 1 2.5\n").unwrap();
    assert_eq!(n.edges(), [(0, 1, 2.5)]);
}

fn arbitrary_network() -> impl Strategy<Value = Network<f64>> {
    (2usize..12, any::<u64>(), prop::collection::vec(1e-3f64..1e3, 11)).prop_map(|(n, seed, cs)| {
        let mut edges = Vec::new();
        let mut state = seed;
        for k in 1..n {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            let parent = (state >> 33) as usize % k;
            edges.push((format!("v{parent}"), format!("v{k}"), cs[k - 1]));
        }
        Network::new(format!("net {n}"), "v0", edges).unwrap()
    })
}

proptest! {
    #[test]
    fn network_round_trip(n in arbitrary_network()) {
        let text = emit_network(&n);
        prop_assert_eq!(parse_network_str(&text).unwrap(), n);
    }
}

#[test]
fn path_round_trip() {
    let p = path::<f64>(5).unwrap();
    assert_eq!(parse_network_str(&emit_network(&p)).unwrap(), p);
}
