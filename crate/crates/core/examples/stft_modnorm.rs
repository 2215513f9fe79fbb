//! STFT of a chirp on the default lattice, its Riemann-sum inverse, and a
//! handful of weighted modulation-space norms.

use modheat::cli::preset_grid;
use modheat::tf::{istft, mod_norm_on, stft, PhaseGrid, Weight, Window};
use modheat::GridSpec;

fn main() -> modheat::Result<()> {
    let spec = GridSpec::new(1, 12.0, 2048)?;
    let f = preset_grid("chirp", &spec)?;
    let g = Window::gaussian(spec);
    let lattice = PhaseGrid::default_for(&spec);
    println!("lattice: {} nodes, density {}", lattice.len(), lattice.density());

    let table = stft(&f, &g, &lattice)?;
    let back = istft(&table, &g)?;
    println!("round trip relative error {:.2e}", back.function.relative_error(&f)?);

    println!("|f|_2 = {:.6}", f.l2_norm());
    for (p, q, s) in [(2.0, 2.0, 0.0), (1.0, 1.0, 0.0), (1.0, 1.0, 1.0), (2.0, 1.0, 2.0), (f64::INFINITY, 1.0, 0.0)] {
        let v = mod_norm_on(&f, &g, &lattice, p, q, &Weight::frequency(s))?;
        println!("M^{{{p},{q}}}_{s}  {v:.6}");
    }

    // Coarser lattices lose the inversion first.
    for step in [0.5, 1.0] {
        let coarse = PhaseGrid::with_target_steps(&spec, step, step)?;
        let err = istft(&stft(&f, &g, &coarse)?, &g)?.function.relative_error(&f)?;
        println!("a = b = {step}: round trip {err:.2e}");
    }
    Ok(())
}
