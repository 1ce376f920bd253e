use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn keller(args: &[&str], cache: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_keller"))
        .args(args)
        .env("KELLER_CACHE_DIR", cache)
        .output()
        .expect("run keller")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn schema_path(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../schema").join(name)
}

fn assert_valid(schema: &str, text: &str) -> Value {
    let schema: Value = serde_json::from_str(&std::fs::read_to_string(schema_path(schema)).unwrap()).unwrap();
    let validator = jsonschema::validator_for(&schema).unwrap();
    let instance: Value = serde_json::from_str(text).unwrap();
    let errors: Vec<String> = validator.iter_errors(&instance).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "schema violations: {errors:?}");
    instance
}

#[test]
fn check_rejects_the_obvious_example() {
    let cache = tempfile::tempdir().unwrap();
    let o = keller(&["check", "--p", "2", "--n", "2", "--d", "2", "--map", "[x+x^2; y]"], cache.path());
    assert_eq!(o.status.code(), Some(1));
    let v = assert_valid("check.schema.json", &stdout(&o));
    assert_eq!(v["outcome"], "fails");
    assert_eq!(v["witness"], "a1^2 + b1*b3");
    assert_eq!(v["value"], 1);
    assert_eq!(v["certified"], false);
}

#[test]
fn check_certifies_an_automorphism_at_large_p() {
    let cache = tempfile::tempdir().unwrap();
    let o = keller(&["check", "--p", "7", "--map", "[x+y^2; y]"], cache.path());
    assert_eq!(o.status.code(), Some(0));
    let v = assert_valid("check.schema.json", &stdout(&o));
    assert_eq!(v["outcome"], "certified");
    assert_eq!(v["nd_bound"], "4");
}

#[test]
fn check_normalizes_the_affine_part() {
    let cache = tempfile::tempdir().unwrap();
    let o = keller(&["check", "--p", "5", "--map", "[2*x+y^2+1; y]"], cache.path());
    assert_eq!(o.status.code(), Some(0));
    let v = assert_valid("check.schema.json", &stdout(&o));
    assert_eq!(v["normalized_map"], "[3*y^2 + x; y]");
}

#[test]
fn check_passes_known_generators_at_small_p() {
    let cache = tempfile::tempdir().unwrap();
    let o = keller(&["check", "--p", "3", "--map", "[x+y^2; y]"], cache.path());
    assert_eq!(o.status.code(), Some(0));
    let v = assert_valid("check.schema.json", &stdout(&o));
    assert_eq!(v["outcome"], "passes_known_generators");
}

#[test]
fn gen_writes_a_versioned_document() {
    let cache = tempfile::tempdir().unwrap();
    let out = cache.path().join("system.json");
    let o = keller(&["gen", "--n", "2", "--d", "3", "--out", out.to_str().unwrap()], cache.path());
    assert_eq!(o.status.code(), Some(0));
    let v = assert_valid("gen.schema.json", &std::fs::read_to_string(&out).unwrap());
    assert_eq!(v["version"], 1);
    assert_eq!(v["coeff_dimension"], 14);
    assert_eq!(v["variables"].as_array().unwrap().len(), 14);
    assert_eq!(v["display_variables"][0], "A");
    // det Jac has degree 4: one equation per nonconstant monomial of degree at most 4.
    assert_eq!(v["equations"].as_array().unwrap().len(), 2 + 3 + 4 + 5);
}

#[test]
fn repro_degree2_is_deterministic() {
    let cache = tempfile::tempdir().unwrap();
    let a = keller(&["repro", "degree2", "--json", "--no-cache"], cache.path());
    let b = keller(&["repro", "degree2", "--json", "--no-cache"], cache.path());
    assert_eq!(a.stdout, b.stdout);
    // The literal display comparison is expected to fail.
    assert_eq!(a.status.code(), Some(1));
    let v = assert_valid("repro.schema.json", &stdout(&a));
    assert_eq!(v["equations"].as_array().unwrap().len(), 5);
}

#[test]
fn repro_degree3_uses_the_cache_and_is_deterministic() {
    let cache = tempfile::tempdir().unwrap();
    let args = ["repro", "degree3", "--json", "--primes", "2"];
    let cold = keller(&args, cache.path());
    assert!(std::fs::read_dir(cache.path()).unwrap().next().is_some(), "cache directory stays empty");
    let warm = keller(&args, cache.path());
    let fresh = keller(&["repro", "degree3", "--json", "--primes", "2", "--no-cache"], cache.path());
    assert_eq!(cold.stdout, warm.stdout);
    assert_eq!(cold.stdout, fresh.stdout);
    let v = assert_valid("repro.schema.json", &stdout(&cold));
    let checks = v["checks"].as_array().unwrap();
    let passed = |name: &str| checks.iter().find(|c| c["name"] == name).map(|c| c["passed"] == true);
    assert_eq!(passed("displayed coefficients (literal)"), Some(true));
    assert_eq!(passed("G*E1-E*G1 in ideal"), Some(true));
    assert_eq!(passed("A^3*E^2-B^3*D^2 in radical, not in ideal"), Some(true));
}

#[test]
fn trial_reports_are_reproducible() {
    let cache = tempfile::tempdir().unwrap();
    let run = || {
        let o = keller(&["conjecture", "composition", "--p", "7", "--trials", "20", "--seed", "5", "--json"], cache.path());
        assert_eq!(o.status.code(), Some(0));
        let mut v = assert_valid("trial.schema.json", &stdout(&o));
        v.as_object_mut().unwrap().remove("wall_ms");
        v
    };
    assert_eq!(run(), run());
    let o = keller(&["conjecture", "lift", "--p", "5", "--trials", "5", "--bound", "10", "--json"], cache.path());
    let v = assert_valid("trial.schema.json", &stdout(&o));
    assert_eq!(v["counts"]["fail"], 0);
}

#[test]
fn injectivity_scan_report() {
    let cache = tempfile::tempdir().unwrap();
    let o = keller(&["scan", "injectivity", "--map", "[x+y^2; y]", "--primes", "2,3,5", "--json"], cache.path());
    let v = assert_valid("injectivity.schema.json", &stdout(&o));
    assert!(v["rows"].as_array().unwrap().iter().all(|r| r["injective"] == true));
    let o = keller(&["scan", "injectivity", "--map", "[x+x^2; y]", "--primes", "2", "--json"], cache.path());
    let v = assert_valid("injectivity.schema.json", &stdout(&o));
    assert_eq!(v["rows"][0]["injective"], false);
}

#[test]
fn map_operations() {
    let cache = tempfile::tempdir().unwrap();
    let text = |args: &[&str]| stdout(&keller(args, cache.path())).trim().to_string();
    assert_eq!(text(&["map", "det-jac", "--map", "[x+x^2; y]"]), "2*x + 1");
    assert_eq!(text(&["map", "invert", "--map", "[x+y^2; y]"]), "[-y^2 + x; y]");
    assert_eq!(text(&["map", "mod-p", "--p", "3", "--map", "[x+4*y^2; y]"]), "[y^2 + x; y]");
    assert_eq!(text(&["map", "compose", "--map", "[x+y^2; y]", "--inner", "[x; y+x^2]"]), "[x^4 + 2*x^2*y + y^2 + x; x^2 + y]");
    let o = keller(&["map", "injective", "--p", "2", "--map", "[x+x^2; y]"], cache.path());
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn ideal_membership_exit_codes() {
    let cache = tempfile::tempdir().unwrap();
    let member = keller(&["ideal", "member", "--gens", "x^2; y", "--poly", "x^2+x*y"], cache.path());
    assert_eq!(member.status.code(), Some(0));
    let not = keller(&["ideal", "member", "--gens", "x^2; y", "--poly", "x+y"], cache.path());
    assert_eq!(not.status.code(), Some(1));
    let rad = keller(&["ideal", "radical-member", "--gens", "x^2; y", "--poly", "x+y"], cache.path());
    assert_eq!(rad.status.code(), Some(0));
}

#[test]
fn error_exit_codes() {
    let cache = tempfile::tempdir().unwrap();
    assert_eq!(keller(&["check", "--p", "2", "--map", "[x+"], cache.path()).status.code(), Some(2));
    assert_eq!(keller(&["check", "--p", "4", "--map", "[x; y]"], cache.path()).status.code(), Some(2));
    assert_eq!(keller(&["no-such-command"], cache.path()).status.code(), Some(2));
    let big = keller(&["map", "injective", "--p", "1009", "--map", "[x; y]"], cache.path());
    assert_eq!(big.status.code(), Some(3));
}
