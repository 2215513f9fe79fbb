//! Hörmander and Shubin semi-norms of the symbol presets, plus an
//! ellipticity check for the harmonic-oscillator root.

use modheat::quant::{ellipticity_check, shubin_seminorm, symbol_seminorm, SamplingBox, Symbol};

fn main() -> modheat::Result<()> {
    let bx = SamplingBox::new(2, 4.0, 33, 0.0625)?;
    for name in ["one", "gauss", "jbracket:-2", "jbracket:1", "sin1"] {
        let s = Symbol::preset(name)?;
        let h = symbol_seminorm(&s, 2, s.order, &bx)?;
        let k = shubin_seminorm(&s, 2, &bx)?;
        println!(
            "{name:<12} S^m_00 N=2: {:<10.4} (converged {})   Shubin k=2: {:.4}",
            h.value, h.converged, k.value
        );
    }

    let root = Symbol::harmonic_root();
    let wide = SamplingBox::new(2, 8.0, 65, 0.0625)?;
    let e = ellipticity_check(&root, 0.5, 2.0, &wide)?;
    println!("harmonic root >= 0.5<z> on |z| >= 2: {} (min ratio {:.4})", e.holds, e.min_ratio);
    Ok(())
}
