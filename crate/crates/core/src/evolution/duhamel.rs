use num_complex::Complex64;
use rayon::prelude::*;

use super::time::Trajectory;
use crate::error::{Error, Result};
use crate::spectral::{rates, SpectralField};

/// `φ₁(z) = (e^z − 1)/z` and `φ₂(z) = (e^z − 1 − z)/z²`, with Taylor sums
/// near zero where the closed forms cancel.
pub(crate) fn phi12(z: f64) -> (f64, f64) {
    if z.abs() < 0.1 {
        // Σ z^k/(k+1)! and Σ z^k/(k+2)!, 14 terms are exact to roundoff here
        let (mut p1, mut p2) = (0.0, 0.0);
        let mut zk = 1.0;
        let mut f1 = 1.0; // (k+1)!
        let mut f2 = 2.0; // (k+2)!
        for k in 0..14 {
            p1 += zk / f1;
            p2 += zk / f2;
            zk *= z;
            f1 *= (k + 2) as f64;
            f2 *= (k + 3) as f64;
        }
        (p1, p2)
    } else {
        let p1 = z.exp_m1() / z;
        (p1, (p1 - 1.0) / z)
    }
}

/// Per-mode step weights `(e^{−λh}, w₀, w₁)` such that one step of the
/// Duhamel integral is `e^{−λh} D + w₀ f_j + w₁ f_{j+1}`.
fn step_weights(rate: f64, h: f64) -> (f64, f64, f64) {
    let z = -rate * h;
    let (p1, p2) = phi12(z);
    (z.exp(), h * (p1 - p2), h * p2)
}

/// `∫₀^{t_i} K_β(t_i − s) f(s) ds` at every node, with `f` linearly interpolated
/// between nodes. Exact for piecewise-linear coefficient histories.
pub fn duhamel_all(forcing: &Trajectory, beta: f64) -> Result<Vec<SpectralField>> {
    let basis = forcing.basis().clone();
    let lam = rates(&basis, beta)?;
    let grid = *forcing.grid();
    let h = grid.step();
    let nodes = grid.len();
    // mode-major columns, assembled back into node-major fields
    let columns: Vec<Vec<Complex64>> = lam
        .par_iter()
        .enumerate()
        .map(|(a, &rate)| {
            let (decay, w0, w1) = step_weights(rate, h);
            let mut out = Vec::with_capacity(nodes);
            let mut acc = Complex64::new(0.0, 0.0);
            out.push(acc);
            for j in 0..grid.steps {
                let fj = forcing.state(j).coeffs()[a];
                let fk = forcing.state(j + 1).coeffs()[a];
                acc = acc * decay + fj * w0 + fk * w1;
                out.push(acc);
            }
            out
        })
        .collect();
    (0..nodes)
        .map(|i| SpectralField::from_coeffs(basis.clone(), columns.iter().map(|c| c[i]).collect()))
        .collect()
}

/// The Duhamel integral at node `t_index`.
pub fn duhamel(forcing: &Trajectory, t_index: usize, beta: f64) -> Result<SpectralField> {
    if t_index >= forcing.grid().len() {
        return Err(Error::invalid(format!(
            "time index {t_index} outside a grid of {} nodes",
            forcing.grid().len()
        )));
    }
    Ok(duhamel_all(forcing, beta)?.swap_remove(t_index))
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::evolution::TimeGrid;
    use crate::spectral::HermiteBasis;

    fn basis() -> Arc<HermiteBasis> {
        Arc::new(HermiteBasis::new(1, 12, 10.0, 128).unwrap())
    }

    fn forcing_from(basis: &Arc<HermiteBasis>, grid: TimeGrid, f: impl Fn(f64) -> f64) -> Trajectory {
        let states = grid
            .nodes()
            .into_iter()
            .map(|t| SpectralField::from_coeffs(basis.clone(), vec![Complex64::new(f(t), 0.0); basis.len()]).unwrap())
            .collect();
        Trajectory::new(grid, states).unwrap()
    }

    #[test]
    fn phi_functions_are_continuous_across_the_switch() {
        for z in [0.0999999, -0.0999999] {
            let a = phi12(z);
            let b = {
                let p1 = z.exp_m1() / z;
                (p1, (p1 - 1.0) / z)
            };
            assert!((a.0 - b.0).abs() < 1e-14 && (a.1 - b.1).abs() < 1e-13, "{a:?} {b:?}");
        }
        assert_eq!(phi12(0.0), (1.0, 0.5));
    }

    #[test]
    fn zero_forcing_gives_zero() {
        let b = basis();
        let g = TimeGrid::new(1.0, 8).unwrap();
        let out = duhamel_all(&Trajectory::zeros(b, g), 1.0).unwrap();
        assert!(out.iter().all(|s| s.l2_norm() == 0.0));
    }

    #[test]
    fn constant_and_linear_forcing_match_closed_forms() {
        let b = basis();
        let g = TimeGrid::new(0.7, 13).unwrap();
        for beta in [0.25, 0.5, 1.0] {
            let lam = rates(&b, beta).unwrap();
            let c = duhamel_all(&forcing_from(&b, g, |_| 1.0), beta).unwrap();
            let l = duhamel_all(&forcing_from(&b, g, |s| s), beta).unwrap();
            for i in 0..g.len() {
                let t = g.node(i);
                for (a, &r) in lam.iter().enumerate() {
                    let want_c = -(-r * t).exp_m1() / r;
                    let want_l = (t + (-r * t).exp_m1() / r) / r;
                    assert!((c[i].coeffs()[a].re - want_c).abs() < 1e-14);
                    assert!((l[i].coeffs()[a].re - want_l).abs() < 1e-14, "{} vs {want_l}", l[i].coeffs()[a].re);
                }
            }
        }
    }

    #[test]
    fn stiff_modes_stay_bounded() {
        let b = Arc::new(HermiteBasis::new(1, 60, 16.0, 512).unwrap());
        let g = TimeGrid::new(10.0, 2).unwrap();
        let out = duhamel(&forcing_from(&b, g, |_| 1.0), 2, 1.0).unwrap();
        let lam = rates(&b, 1.0).unwrap();
        for (v, r) in out.coeffs().iter().zip(lam) {
            assert!((v.re + (-r * 10.0).exp_m1() / r).abs() < 1e-12);
        }
        assert!(duhamel(&forcing_from(&b, g, |_| 1.0), 3, 1.0).is_err());
    }
}
