//! A τ-operator applied to a Gaussian, then its Gabor matrix computed by
//! direct inner products and through the STFT of the symbol, and a decay fit
//! over a small ray sweep.

use modheat::cli::preset_grid;
use modheat::quant::{
    decay_fit, gabor_matrix_direct, gabor_matrix_identity, gabor_sweep, RaySampling, Symbol, Tau, TauOperator,
};
use modheat::tf::Window;
use modheat::GridSpec;

fn main() -> modheat::Result<()> {
    let spec = GridSpec::new(1, 12.0, 576)?;
    let symbol = Symbol::jbracket(-2.0);
    let tau = Tau::new(0.25)?;

    let op = TauOperator::new(&symbol, tau, spec)?;
    let u = preset_grid("gauss", &spec)?;
    let v = op.apply(&u)?;
    println!("|Op u| / |u| = {:.6}", v.l2_norm() / u.l2_norm());

    let g = Window::gaussian(spec);
    let z = [0.5, -0.5];
    for y in [[0.5, -0.5], [1.5, 0.0], [2.5, 1.0]] {
        let d = gabor_matrix_direct(&symbol, tau, &g, &z, &y)?;
        let i = gabor_matrix_identity(&symbol, tau, &g, &z, &y)?;
        println!("z {z:?} y {y:?}: direct {:.6e} identity {:.6e}", d.value.norm(), i);
    }

    let sampling = RaySampling::lattice(1.0, 1.0, 4, 0.0, RaySampling::DEFAULT_RADII.to_vec());
    // Entries at r = 4, 8 sit near 1e-17, so the relative route discrepancy
    // there only measures roundoff.
    let sweep = gabor_sweep(&symbol, tau, &g, &sampling, true)?;
    println!("{} pairs, max route discrepancy {:.2e}", sweep.samples.len(), sweep.max_discrepancy().unwrap_or(0.0));
    for n in [1, 2] {
        let fit = decay_fit(&sweep.samples, symbol.order, n, tau)?;
        println!("N = {n}: C = {:.4}, off-diagonal slope {:.2}", fit.c, fit.slope.unwrap_or(f64::NAN));
    }
    Ok(())
}
