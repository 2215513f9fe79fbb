//! Empirical probes: the semigroup bound on a modulation space, Lipschitz
//! dependence on the data, and the local existence time.

use std::sync::Arc;

use num_complex::Complex64;
use modheat::evolution::{
    gaussian_class, lipschitz_probe, local_time_search, semigroup_bound_probe, BoundProbe, Nonlinearity,
    SearchOptions, TimeGrid,
};
use modheat::spectral::{HermiteBasis, SpectralField};
use modheat::tf::PhaseGrid;

fn main() -> modheat::Result<()> {
    let basis = Arc::new(HermiteBasis::new(1, 32, 12.0, 1024)?);
    let lattice = PhaseGrid::default_for(basis.spec());
    let set = gaussian_class(basis.spec(), 10, 7);
    for (p, q, s) in [(2.0, 2.0, 0.0), (1.0, 1.0, 1.0)] {
        let cfg = BoundProbe { p, q, s, beta: 0.5, horizon: 1.0, times: 11 };
        let rep = semigroup_bound_probe(&cfg, &set, &basis, &lattice)?;
        println!("M^{{{p},{q}}}_{s}: C_emp {:.6} at t = {}", rep.c_emp, rep.argmax_time);
    }

    let f = Nonlinearity::dissipative_cubic();
    let u0 = SpectralField::unit(basis.clone(), 0).scaled(Complex64::new(0.1, 0.0));
    let mut v0 = u0.clone();
    v0.coeffs_mut()[2] += Complex64::new(1e-3, 0.0);
    let lip = lipschitz_probe(&u0, &v0, &f, 1.0, TimeGrid::new(0.1, 64)?, 1e-12, 40)?;
    println!("Lipschitz ratio {:.6} for |u0 - v0| = {:.1e}", lip.ratio, lip.data_distance);

    let growth = Nonlinearity::power(Complex64::new(1.0, 0.0), 3);
    for amp in [0.5, 2.0, 8.0] {
        let data = SpectralField::unit(basis.clone(), 0).scaled(Complex64::new(amp, 0.0));
        let search = local_time_search(&data, &growth, 1.0, &SearchOptions::default())?;
        println!("+|u|^2 u, amplitude {amp}: T_est {:.4} after {} probes", search.t_est, search.probes.len());
    }
    Ok(())
}
