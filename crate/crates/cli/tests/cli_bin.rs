//! End-to-end tests of the `multiholo` binary: exit codes and JSON output.

use std::io::Write;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_multiholo"))
}

fn write_file(dir: &std::path::Path, name: &str, content: &str) -> String {
    let path = dir.join(name);
    let mut f = std::fs::File::create(&path).unwrap();
    f.write_all(content.as_bytes()).unwrap();
    path.to_string_lossy().into_owned()
}

struct Workdir(std::path::PathBuf);

impl Workdir {
    fn new(tag: &str) -> Self {
        let dir = std::env::temp_dir().join(format!("multiholo-test-{tag}-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        Workdir(dir)
    }
}

impl Drop for Workdir {
    fn drop(&mut self) {
        let _ = std::fs::remove_dir_all(&self.0);
    }
}

#[test]
fn analyze_full_rank_json_round_trips() {
    let wd = Workdir::new("analyze");
    let spec = write_file(
        &wd.0,
        "spec34.json",
        r#"{"p":3,"n":4,"D":[[1,0,0,0,0,0],[0,1,0,0,0,0],[0,0,1,0,0,0],[0,0,0,1,0,0]]}"#,
    );
    let out = bin().args(["analyze", &spec, "--json"]).output().unwrap();
    assert!(out.status.success());
    let report: multiholo_cli::AnalysisReport =
        serde_json::from_slice(&out.stdout).expect("valid report JSON");
    assert_eq!(report.sym_part_order, num_bigint::BigUint::from(3u32).pow(60).to_string());
    assert_eq!(report.tg_order_status.as_deref(), Some("conditional-subgroup"));
    // serialize -> parse -> identical
    let round = serde_json::to_string(&report).unwrap();
    let again: multiholo_cli::AnalysisReport = serde_json::from_str(&round).unwrap();
    assert_eq!(report, again);
}

#[test]
fn analyze_malformed_spec_exits_2() {
    let wd = Workdir::new("malformed");
    let spec = write_file(&wd.0, "bad.json", "{ not json");
    let out = bin().args(["analyze", &spec]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let spec = write_file(&wd.0, "badfield.json", r#"{"p":3,"n":2,"D":[[1]]}"#);
    let out = bin().args(["analyze", &spec]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("`D`"), "error should name the field: {stderr}");
}

#[test]
fn verify_paths_and_exit_codes() {
    let wd = Workdir::new("verify");
    let spec = write_file(&wd.0, "spec32.json", r#"{"p":3,"n":2,"D":[[1],[0]]}"#);
    // power map witness
    let out = bin().args(["verify", &spec, "--power-c", "0"]).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    // excluded c: exit 3
    let out = bin().args(["verify", &spec, "--power-c", "1"]).output().unwrap();
    assert_eq!(out.status.code(), Some(3));
    // criterion pair from files
    let a = write_file(&wd.0, "a.json", "[[2,0],[0,2]]");
    let t = write_file(&wd.0, "t.json", "[[2]]");
    let out = bin()
        .args(["verify", &spec, "--criterion", &a, &t, "--json"])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report: multiholo_cli::VerifyReport = serde_json::from_slice(&out.stdout).unwrap();
    assert!(report.verified);
    assert_eq!(report.res_z, vec![vec![2]]);
    // a pair that fails the criterion: exit 3
    let t_bad = write_file(&wd.0, "t_bad.json", "[[1]]");
    let out = bin().args(["verify", &spec, "--criterion", &a, &t_bad]).output().unwrap();
    assert_eq!(out.status.code(), Some(3));
    // form literal
    let form = write_file(&wd.0, "form.json", r#"{"kind":"tensor","T":[[[1],[2]],[[2],[0]]]}"#);
    let out = bin().args(["verify", &spec, "--form", &form]).output().unwrap();
    assert!(out.status.success());
}

#[test]
fn oracle_exit_codes() {
    let wd = Workdir::new("oracle");
    let spec = write_file(&wd.0, "spec32.json", r#"{"p":3,"n":2,"D":[[0],[0]]}"#);
    let out = bin().args(["oracle", &spec, "--json"]).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report: multiholo_cli::OracleReport = serde_json::from_slice(&out.stdout).unwrap();
    assert!(report.bijection_confirmed);
    assert_eq!(report.forms_scanned, 81);
    // corrupted-form injection: exit 1 with the counterexample printed
    let out = bin().args(["oracle", &spec, "--corrupt-form"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stdout).contains("counterexample"));
    // out-of-bounds spec: exit 4
    let spec34 = write_file(
        &wd.0,
        "spec34.json",
        r#"{"p":3,"n":4,"D":[[1,0,0,0,0,0],[0,1,0,0,0,0],[0,0,1,0,0,0],[0,0,0,1,0,0]]}"#,
    );
    let out = bin().args(["oracle", &spec34]).output().unwrap();
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn verify_criterion_on_full_rank_n4() {
    use multiholo::linalg::FpMatrix;
    use multiholo::tg::{ReducedBasis, ResElement};
    use multiholo::GroupSpec;
    use rand::SeedableRng;

    let wd = Workdir::new("verify34");
    let spec_text =
        r#"{"p":3,"n":4,"D":[[1,0,0,0,0,0],[0,1,0,0,0,0],[0,0,1,0,0,0],[0,0,0,1,0,0]]}"#;
    let spec_path = write_file(&wd.0, "spec34.json", spec_text);
    let s = GroupSpec::from_json(spec_text).unwrap();
    let basis = ReducedBasis::compute(&s).unwrap();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(53);
    let r = ResElement::random(&s, &mut rng).unwrap();
    let (a, t) = r.to_criterion_pair(&basis).unwrap();
    let to_json = |m: &FpMatrix| serde_json::to_string(&m.rows_vec()).unwrap();
    let a_path = write_file(&wd.0, "a.json", &to_json(&a));
    let t_path = write_file(&wd.0, "t.json", &to_json(&t));
    let out = bin()
        .args(["verify", &spec_path, "--criterion", &a_path, &t_path, "--json", "--pairs", "10000"])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report: multiholo_cli::VerifyReport = serde_json::from_slice(&out.stdout).unwrap();
    assert!(report.verified);
    assert_eq!(report.pairs_checked, 10_000);
    // res_z = Â·T
    let expected = s.wedge_matrix(&a).mul(&t).unwrap().rows_vec();
    assert_eq!(report.res_z, expected);
    assert_eq!(report.circle_relations_hold, Some(true));
}

#[test]
fn selftest_runs_green() {
    let out = bin()
        .args(["selftest", "--seed", "42", "--pairs", "500", "--json"])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report: multiholo_cli::SelftestReport = serde_json::from_slice(&out.stdout).unwrap();
    assert!(report.all_passed);
    assert_eq!(report.suites.len(), 6);
}
