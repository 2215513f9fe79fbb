//! Acceptance criteria, one test per row. Each test prints a single
//! `criterion N ... PASS|FAIL` line and then asserts.

use modheat::cli::{run_suite, Check, VerifyReport};

const SEED: u64 = 20240607;

fn report(criterion: u32, label: &str, checks: &[&Check]) -> bool {
    let pass = !checks.is_empty() && checks.iter().all(|c| c.pass);
    println!("criterion {criterion:>2} {label}: {}", if pass { "PASS" } else { "FAIL" });
    for c in checks {
        println!(
            "    {:<36} measured {:<12.4e} tolerance {:<10.3e} {}",
            c.name,
            c.measured,
            c.tolerance,
            if c.pass { "ok" } else { "FAIL" }
        );
    }
    pass
}

fn whole_suite(criterion: u32, label: &str, suite: &str) {
    let rep = run_suite(suite, SEED).expect("suite runs");
    let checks: Vec<&Check> = rep.checks.iter().collect();
    assert!(report(criterion, label, &checks), "{suite} failed");
}

fn prefixed(criterion: u32, label: &str, rep: &VerifyReport, prefix: &str) {
    let checks: Vec<&Check> = rep.checks_with_prefix(prefix).collect();
    assert!(report(criterion, label, &checks), "{prefix}* checks failed");
}

#[test]
fn criterion_01_hermite() {
    whole_suite(1, "hermite gram and propagation", "hermite");
}

#[test]
fn criterion_02_semigroup() {
    whole_suite(2, "semigroup law and contractivity", "semigroup");
}

// Known to fail at density 1/4, see README.
#[test]
fn criterion_03_moyal_inversion() {
    whole_suite(3, "moyal identity and stft inversion", "moyal-inversion");
}

#[test]
fn criterion_04_gabor_routes() {
    whole_suite(4, "gabor matrix direct vs identity", "lemma41");
}

#[test]
fn criterion_05_gabor_decay() {
    whole_suite(5, "gabor matrix decay fit", "gbsm-decay");
}

#[test]
fn criterion_06_semigroup_bound() {
    whole_suite(6, "modulation space semigroup bound", "thm31-bound");
}

#[test]
fn criterion_07_picard() {
    let rep = run_suite("picard-contraction", SEED).expect("suite runs");
    prefixed(7, "picard contraction", &rep, "picard_");
}

#[test]
fn criterion_08_lipschitz() {
    let rep = run_suite("picard-contraction", SEED).expect("suite runs");
    prefixed(8, "lipschitz dependence", &rep, "lipschitz_");
}

#[test]
fn criterion_09_duhamel() {
    whole_suite(9, "duhamel closed forms", "duhamel");
}

#[test]
fn criterion_10_determinism() {
    // lemma41 and gbsm-decay are left out to keep the double run short; the
    // criterion asks for any suite.
    let suites = ["hermite", "semigroup", "moyal-inversion", "thm31-bound", "picard-contraction", "duhamel"];
    let mut checks = Vec::new();
    for s in suites {
        let a = serde_json::to_string(&run_suite(s, SEED).unwrap()).unwrap();
        let b = serde_json::to_string(&run_suite(s, SEED).unwrap()).unwrap();
        checks.push(Check::holds(format!("{s}_identical_json"), "byte-identical report", a == b));
    }
    let refs: Vec<&Check> = checks.iter().collect();
    assert!(report(10, "identical report json across runs", &refs));
}
