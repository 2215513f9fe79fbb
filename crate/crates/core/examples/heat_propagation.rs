//! Expand a Gaussian in the Hermite basis and run it through the fractional
//! heat semigroup for a few values of β.

use std::sync::Arc;

use modheat::cli::preset_grid;
use modheat::spectral::{analyze, apply_semigroup, rates, synthesize, HermiteBasis};

fn main() -> modheat::Result<()> {
    let basis = Arc::new(HermiteBasis::new(1, 32, 12.0, 2048)?);
    println!("basis: {} functions, gram deviation {:.2e}", basis.len(), basis.gram_deviation());

    let u0 = preset_grid("gauss", basis.spec())?;
    let c0 = analyze(&u0, &basis)?;
    println!("projection error {:.2e}", synthesize(&c0).relative_error(&u0)?);

    for beta in [0.25, 0.5, 1.0] {
        let r = rates(&basis, beta)?;
        print!("beta {beta:<5} rates [{:.3}, {:.3}, ..]  |K(t)u0|:", r[0], r[2]);
        for t in [0.0, 0.1, 0.5, 1.0] {
            print!(" {:.5}", apply_semigroup(&c0, t, beta)?.l2_norm());
        }
        println!();
    }
    Ok(())
}
