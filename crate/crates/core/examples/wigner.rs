//! τ-Wigner distributions of a Gaussian with a shifted Hermite function.

use modheat::cli::preset_grid;
use modheat::quant::{tau_wigner, Tau};
use modheat::GridSpec;

fn main() -> modheat::Result<()> {
    let spec = GridSpec::new(1, 8.0, 256)?;
    let f = preset_grid("gauss", &spec)?;
    let g = preset_grid("hermite:1", &spec)?;
    let fg = f.inner(&g)?;
    println!("<f, g> = {:.3e}", fg.norm());

    for tau in [0.0, 0.25, 0.5, 0.75, 1.0] {
        let w = tau_wigner(&f, &f, Tau::new(tau)?)?;
        let cross = tau_wigner(&f, &g, Tau::new(tau)?)?;
        // The integral over phase space is <f, g>.
        println!(
            "tau {tau:<4}  W(f,f): integral {:.6} max {:.4} imag {:.1e}   W(f,g): integral {:.1e}",
            w.integral().re,
            w.max_abs(),
            w.max_imag(),
            cross.integral().norm(),
        );
    }
    Ok(())
}
