use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use radext::family::{AmbientSign, ExtremalParams, MetricClass};
use radext::profile::registry::REGISTRY_IDS;
use radext::profile::MetricProfile;
use radext::ratlaurent::{format_rational, rat, Rational};
use radext::resolvability::{actual_extreme, extremes_closed_form, q_sequence, Extreme, ExtremeTerm, ScanVerdict};
use radext_cli::report::{
    ClassifyReport, Det1Report, ExampleList, KeReport, ObstructReport, QTableReport, ReproduceReport, SeriesReport,
    StabilityReport,
};
use serde::de::DeserializeOwned;
use serde::Serialize;
use tempfile::TempDir;

fn radext(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_radext"))
        .args(args)
        .env_remove("RADEXT_KMAX")
        .env_remove("RADEXT_TOL")
        .output()
        .expect("binary runs")
}

/// Runs with `--output` into `dir` and returns the exit code and file contents.
fn run_to_file(dir: &Path, name: &str, args: &[&str]) -> (i32, String) {
    let path: PathBuf = dir.join(name);
    let mut full: Vec<&str> = args.to_vec();
    let p = path.to_str().unwrap();
    full.extend(["--output", p]);
    let out = radext(&full);
    let code = out.status.code().unwrap();
    assert!(code != 1, "{args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
    (code, std::fs::read_to_string(&path).unwrap())
}

/// `parse(emit(x)) = x`: the emitted text parses, and re-emitting gives the same text.
fn round_trip<T: Serialize + DeserializeOwned + PartialEq + std::fmt::Debug>(text: &str) -> T {
    let parsed: T = serde_json::from_str(text).expect("report parses");
    let again = serde_json::to_string_pretty(&parsed).unwrap() + "\n";
    assert_eq!(again, text);
    assert_eq!(serde_json::from_str::<T>(&again).unwrap(), parsed);
    parsed
}

#[test]
fn exit_codes_over_the_registry() {
    let dir = TempDir::new().unwrap();
    for id in REGISTRY_IDS {
        let (code, text) = run_to_file(dir.path(), "r.json", &["reproduce", id]);
        let report: ReproduceReport = round_trip(&text);
        let expected = if ["partbal", "exKENWB", "exrinf"].contains(&id) { 3 } else { 0 };
        assert_eq!(code, expected, "{id}");
        assert_eq!(report.discrepancies().count(), expected as usize / 3, "{id}");
        let (code, text) = run_to_file(dir.path(), "c.json", &["classify", "--example", id]);
        assert_eq!(code, 0);
        round_trip::<ClassifyReport>(&text);
    }
}

#[test]
fn exkenwb_obstruct_names_smallest_index() {
    let dir = TempDir::new().unwrap();
    let (code, text) = run_to_file(
        dir.path(),
        "o.json",
        &["obstruct", "--example", "exKENWB", "--eps", "1", "--kmax", "11", "--domain", "auto"],
    );
    assert_eq!(code, 2);
    let r: ObstructReport = round_trip(&text);
    assert!(matches!(r.scan.verdict, ScanVerdict::Obstructed { k: 9, .. }), "{:?}", r.scan.verdict);
    assert_eq!(r.anchor, Some(rat(2, 1)));
    // Clear below the first failing index.
    let (code, _) = run_to_file(dir.path(), "o8.json", &["obstruct", "--example", "exKENWB", "--kmax", "8"]);
    assert_eq!(code, 0);
}

#[test]
fn classify_flat_from_file() {
    let dir = TempDir::new().unwrap();
    let params = dir.path().join("flat.json");
    std::fs::write(&params, r#"{"n":3,"A":"0","B":"0","C":"0","D":"0"}"#).unwrap();
    let (code, text) = run_to_file(dir.path(), "c.json", &["classify", "--params", params.to_str().unwrap()]);
    assert_eq!(code, 0);
    let r: ClassifyReport = round_trip(&text);
    assert_eq!(r.class, MetricClass::ConstHolSecCurv);
    assert!(text.contains(r#""tag": "ConstHolSecCurv""#));
}

#[test]
fn usage_errors_exit_one() {
    let float = radext(&["classify", "--params", r#"{"n":2,"A":"0.5","B":"0","C":"0","D":"0"}"#]);
    assert_eq!(float.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&float.stderr).contains("floating-point literal"));
    for args in [
        &["classify"][..],
        &["reproduce", "nope"],
        &["obstruct", "--example", "exfond", "--kmax", "0"],
        &["obstruct", "--params", "/nonexistent.json"],
        &["det1", "--example", "exfond"],
        &["obstruct", "--example", "burns-simanca", "--domain", "0,2"],
        &["classify", "--example", "exfond", "--format", "csv"],
    ] {
        assert_eq!(radext(args).status.code(), Some(1), "{args:?}");
    }
    assert_eq!(radext(&["--help"]).status.code(), Some(0));
}

#[test]
fn environment_sets_default_k() {
    let out = Command::new(env!("CARGO_BIN_EXE_radext"))
        .args(["obstruct", "--example", "exKENWB"])
        .env("RADEXT_KMAX", "8")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let r: ObstructReport = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(r.scan.verdict, ScanVerdict::Clear { k: 8 });
}

#[test]
fn reports_round_trip() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    let (code, text) = run_to_file(d, "det.json", &["det1", "--params", r#"{"n":1,"A":"0","B":"0","C":"-3","D":"-2"}"#, "--eps", "-1", "--kmax", "3"]);
    assert_eq!(code, 0);
    let det: Det1Report = round_trip(&text);
    assert_eq!((det.scan.entries.len(), det.scan.first_violation), (3, None));

    let (code, text) = run_to_file(d, "bs.json", &["obstruct", "--example", "burns-simanca", "--eps", "0"]);
    assert_eq!(code, 2);
    round_trip::<ObstructReport>(&text);

    let (_, text) = run_to_file(d, "q.json", &["qtable", "--example", "eguchi-hanson", "--kmax", "5"]);
    round_trip::<QTableReport>(&text);

    let (_, text) = run_to_file(d, "s.json", &["series", "--example", "burns-simanca", "--eps", "0", "--r0", "1/2", "--kmax", "5"]);
    let s: SeriesReport = round_trip(&text);
    assert_eq!(s.coefficients.len(), 5);

    let (code, text) = run_to_file(d, "ke.json", &["ke", "--example", "exKENWB", "--kmax", "11"]);
    assert_eq!(code, 0);
    let ke: KeReport = round_trip(&text);
    assert_eq!((ke.diagnostics.predicted_obstruction_k, ke.falling_factorial_holds), (None, Some(true)));

    let (code, text) = run_to_file(d, "st.json", &["stability", "--params", r#"{"n":2,"A":"0","B":"0","C":"1","D":"0"}"#, "--anchor", "1/2", "--alphas", "1/2,1", "--kmax", "4"]);
    assert_eq!(code, 2);
    let st: StabilityReport = round_trip(&text);
    assert!(text.contains(r#""alpha": "1/2""#) && text.contains(r#""verdict": "obstructed""#));
    assert_eq!(st.entries[1].report.verdict, ScanVerdict::IdenticallyZero { k: 2 });

    let (_, text) = run_to_file(d, "l.json", &["list-examples"]);
    let list: ExampleList = round_trip(&text);
    assert_eq!(list.examples.len(), REGISTRY_IDS.len());

    let (_, text) = run_to_file(d, "p.json", &["profile", "--example", "eguchi-hanson"]);
    let prof: MetricProfile = serde_json::from_str(&text).unwrap();
    assert_eq!(serde_json::to_string_pretty(&prof).unwrap() + "\n", text);
    let (_, csv) = run_to_file(d, "p.csv", &["profile", "--example", "eguchi-hanson", "--format", "csv"]);
    assert_eq!(csv, prof.to_csv());
}

fn small(rng: &mut StdRng) -> Rational {
    rat(rng.gen_range(-5..=5), rng.gen_range(1..=4))
}

#[test]
fn qtable_matches_closed_forms() {
    let mut rng = StdRng::seed_from_u64(12);
    let dir = TempDir::new().unwrap();
    for i in 0..10 {
        let p = ExtremalParams::new(rng.gen_range(2..=4), small(&mut rng), small(&mut rng), small(&mut rng), small(&mut rng)).unwrap();
        let eps = [AmbientSign::Hyperbolic, AmbientSign::Flat, AmbientSign::Projective][i % 3];
        let file = dir.path().join(format!("p{i}.json"));
        std::fs::write(&file, serde_json::to_string(&p).unwrap()).unwrap();
        let eps_arg = eps.value().to_string();
        let (code, text) = run_to_file(dir.path(), "q.json", &["qtable", "--params", file.to_str().unwrap(), "--kmax", "12", "--eps", &eps_arg]);
        assert_eq!(code, 0);
        let table: QTableReport = round_trip(&text);
        assert_eq!((table.params.clone(), table.eps, table.rows.len()), (p.clone(), eps, 12));
        let seq = q_sequence(&p, eps, 12);
        for row in &table.rows {
            assert_eq!(&row.q, seq.get(row.k));
            for (which, check) in [(Extreme::Leading, &row.leading), (Extreme::Lower, &row.lower)] {
                let actual = actual_extreme(&row.q, which);
                assert_eq!((check.degree, check.coeff.clone()), (actual.as_ref().map(|a| a.0), actual.as_ref().map(|a| a.1.clone())));
                if row.k < 2 {
                    assert_eq!(check.predicted, None);
                    continue;
                }
                let predicted = extremes_closed_form(&p, eps, row.k, which).unwrap();
                assert_eq!(check.predicted.as_ref(), Some(&predicted));
                if let ExtremeTerm::Predicted { degree, coeff } = predicted {
                    assert_eq!(check.matches, Some(true), "{p} k={} {which:?}", row.k);
                    assert_eq!(actual, Some((degree, coeff)));
                }
            }
        }
        let (_, csv) = run_to_file(dir.path(), "q.csv", &["qtable", "--params", file.to_str().unwrap(), "--kmax", "12", "--eps", &eps_arg, "--format", "csv"]);
        assert_eq!(csv.lines().count(), 13);
        assert!(!csv.contains("false"), "{}", format_rational(&p.a));
    }
}
