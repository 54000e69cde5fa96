use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn pnl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pnl")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn json(args: &[&str]) -> (i32, Value) {
    let mut all = vec!["--json"];
    all.extend_from_slice(args);
    let o = pnl(&all);
    (code(&o), serde_json::from_slice(&o.stdout).expect("json on stdout"))
}

fn extract() -> (TempDir, PathBuf) {
    let tmp = TempDir::new().unwrap();
    let dir = tmp.path().join("corpus");
    assert_eq!(code(&pnl(&["corpus", "extract", dir.to_str().unwrap()])), 0);
    (tmp, dir)
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn proofs(dir: &Path) -> Vec<PathBuf> {
    let mut v: Vec<PathBuf> = std::fs::read_dir(dir.join("lambda")).unwrap().map(|e| e.unwrap().path()).collect();
    v.sort();
    v
}

const FIXTURES: &str = "\
atomsort nu
basesort tau
propformer P : [nu]tau
unknown Y : tau # perm(+{}, -{nu#-1, nu#-2, nu#-3, nu#-4})
";

#[test]
fn alpha_eq_exit_codes() {
    let tmp = TempDir::new().unwrap();
    let f = tmp.path().join("fix.sig");
    std::fs::write(&f, FIXTURES).unwrap();
    let f = s(&f);
    for (l, r) in [
        ("[nu#-1][nu#-2]nu#-1", "[nu#-3][nu#-4]nu#-3"),
        ("[nu#-1][nu#-1]nu#-2", "[nu#-3][nu#-4]nu#-2"),
        ("((nu#-1 nu#-2)(nu#-3 nu#-4))*Y", "Y"),
        ("forall X:tau#perm(+{},-{nu#-2}). P([nu#-1]X)", "forall Y:tau#perm(+{},-{nu#-2}). P([nu#-2]((nu#-2 nu#-1))*Y)"),
    ] {
        assert_eq!(code(&pnl(&["alpha-eq", f, l, r])), 0, "{l} vs {r}");
    }
    assert_eq!(code(&pnl(&["alpha-eq", f, "nu#-1", "nu#-2"])), 1);
    let bad = pnl(&["alpha-eq", f, "[nu#-1", "nu#-2"]);
    assert_eq!(code(&bad), 2);
    assert!(String::from_utf8_lossy(&bad.stderr).contains("parse error"));
}

#[test]
fn restricted_checker_accepts_the_corpus() {
    let (_t, dir) = extract();
    let thy = dir.join("lambda.thy");
    let ps = proofs(&dir);
    assert!(ps.len() >= 10);
    for p in ps {
        let (c, v) = json(&["check", "--restricted", s(&thy), s(&p)]);
        assert_eq!(c, 0, "{}", p.display());
        assert_eq!(v["accepted"], true);
    }
}

#[test]
fn equivariant_axiom_separates_checkers() {
    let (_t, dir) = extract();
    let (thy, ax) = (dir.join("equivariance.thy"), dir.join("ax_perm.proof"));
    assert_eq!(code(&pnl(&["check", "--restricted", s(&thy), s(&ax)])), 1);
    assert_eq!(code(&pnl(&["check", "--full", s(&thy), s(&ax)])), 0);
    assert_eq!(code(&pnl(&["check", s(&thy), s(&ax)])), 2);
    let o = pnl(&["translate", s(&thy), s(&ax)]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("unsound"));
}

#[test]
fn translated_corpus_checks_in_hol() {
    let (t, dir) = extract();
    let thy = dir.join("lambda.thy");
    let out = t.path().join("hol");
    for p in proofs(&dir) {
        assert_eq!(code(&pnl(&["translate", s(&thy), s(&p), "--derivation", "--out", s(&out)])), 0);
        let stem = p.file_stem().unwrap().to_str().unwrap();
        let (sig, der) = (out.join(format!("{stem}.hsig")), out.join(format!("{stem}.hproof")));
        let (c, v) = json(&["check", "--hol", "--modulo-beta", s(&sig), s(&der)]);
        assert_eq!(c, 0, "{stem}: {v}");
        assert_eq!(v["checker"], "hol-modulo-beta");
    }
}

#[test]
fn eta_theory_translates_to_a_checked_hol_theory() {
    let tmp = TempDir::new().unwrap();
    let f = tmp.path().join("eta.thy");
    std::fs::write(
        &f,
        "atomsort nu\nbasesort iota\ntermformer var : (nu) iota\ntermformer app : (iota, iota) iota\n\
         termformer lam : ([nu]iota) iota\npropformer eq : (iota, iota)\n\
         axiom eta : forall Z:iota#perm(+{},-{nu#-1}). eq(lam([nu#-1] app(Z, var(nu#-1))), Z)\n",
    )
    .unwrap();
    let out = tmp.path().join("out");
    let o = pnl(&["translate", s(&f), s(&f), "--out", s(&out)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("eta : forall"));
    let sig = std::fs::read_to_string(out.join("eta.hsig")).unwrap();
    assert!(sig.contains("const g_lam : (mu_nu -> mu_iota) -> mu_iota"));
    assert!(out.join("eta.hol").exists() && out.join("eta.symbols").exists());
}

#[test]
fn raising_and_missing_atoms() {
    let (_t, dir) = extract();
    let thy = dir.join("lambda.thy");
    let (c, v) = json(&["translate", s(&thy), "((nu#-1 nu#-2))*W", "--D", "nu#-2"]);
    assert_eq!(c, 0);
    assert_eq!(v["translation"][0]["hol"], "W@[nu#-2] nu#-1");
    let o = pnl(&["translate", s(&thy), "((nu#-1 nu#-2))*W", "--D", "nu#-1"]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("add nu#-2"));
    assert_eq!(code(&pnl(&["translate", s(&thy), "var(nu#-1)", "--D", "nu-1"])), 2);
}

#[test]
fn countermodel_evaluation() {
    let (_t, dir) = extract();
    let (thy, cm) = (dir.join("equivariance.thy"), dir.join("countermodel.interp"));
    let (c, v) = json(&["semantics", "eval", s(&thy), s(&cm), "P(nu#-1)", "P(nu#-2)"]);
    assert_eq!(c, 1);
    assert_eq!(v["results"][0]["value"], 1);
    assert_eq!(v["results"][1]["value"], 0);
    assert_eq!(v["equivariant"], false);
    assert_eq!(code(&pnl(&["semantics", "eval", s(&thy), s(&cm), "P(nu#-1)"])), 0);
}

#[test]
fn square_test_has_no_mismatches() {
    let (c, v) = json(&["semantics", "square-test", "--seed", "3"]);
    assert_eq!(c, 0);
    assert_eq!(v["quantifier_free"]["agreed"], 200);
    assert_eq!(v["quantified"]["agreed"], 20);
}

#[test]
fn witness_fixtures_report_differences() {
    // Two of the claimed verdicts do not hold, so the run reports failure.
    let (c, v) = json(&["semantics", "witnesses"]);
    assert_eq!(c, 1);
    let observed: Vec<(String, bool)> = v
        .as_array()
        .unwrap()
        .iter()
        .map(|w| (w["part"].as_str().unwrap().to_string(), w["observed"].as_bool().unwrap()))
        .collect();
    let want: Vec<(String, bool)> = [("1", true), ("2a", true), ("2b", false), ("3", false), ("3'", true), ("4", true)]
        .iter()
        .map(|(p, b)| (p.to_string(), *b))
        .collect();
    assert_eq!(observed, want);
}

#[test]
fn json_output_is_deterministic() {
    let (_t, dir) = extract();
    let thy = dir.join("lambda.thy");
    let p = &proofs(&dir)[3];
    let a = pnl(&["--json", "translate", s(&thy), s(p)]);
    let b = pnl(&["--json", "translate", s(&thy), s(p)]);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(pnl(&["--json", "corpus", "list"]).stdout, pnl(&["--json", "corpus", "list"]).stdout);
}
