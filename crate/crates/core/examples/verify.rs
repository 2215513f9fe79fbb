//! Run verification suites by name. Without arguments the quick ones run.
//!
//!     cargo run --release --example verify -- lemma41 gbsm-decay

use modheat::cli::{list_suites, run_suite};

fn main() -> modheat::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let names: Vec<String> = if args.is_empty() {
        ["hermite", "semigroup", "duhamel", "picard-contraction"].map(String::from).to_vec()
    } else {
        args
    };
    for name in &names {
        let info = list_suites().iter().find(|s| s.name == name);
        let rep = run_suite(name, 1)?;
        println!(
            "{name} (criteria {:?}): {}",
            info.map(|i| i.criteria).unwrap_or(&[]),
            if rep.overall { "pass" } else { "FAIL" }
        );
        for c in &rep.checks {
            println!("  {:<36} {:<12.4e} vs {:.3e}  {}", c.name, c.measured, c.tolerance, if c.pass { "ok" } else { "FAIL" });
        }
    }
    Ok(())
}
