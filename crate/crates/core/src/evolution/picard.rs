use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::duhamel::duhamel_all;
use super::nonlinearity::{eval_nonlinearity, Nonlinearity};
use super::time::{TimeGrid, Trajectory};
use crate::error::{Error, Result};
use crate::spectral::{analyze, apply_semigroup, synthesize, SpectralField};

/// Per-iteration record of a Picard run.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ContractionReport {
    /// Number of Picard steps taken.
    pub iterates: usize,
    /// `sup_i ‖u⁽ⁿ⁺¹⁾(t_i) − u⁽ⁿ⁾(t_i)‖₂` for each step.
    pub diffs: Vec<f64>,
    /// `diffs[n] / diffs[n−1]`, defined where the previous diff is positive.
    pub ratios: Vec<f64>,
    pub converged: bool,
    /// Largest top-shell mass of `F(u)` seen, a proxy for aliasing.
    #[serde(default)]
    pub aliasing: f64,
}

impl ContractionReport {
    /// Largest ratio from the second iteration on, if any.
    pub fn max_ratio_after_first(&self) -> Option<f64> {
        self.ratios.iter().skip(1).cloned().reduce(f64::max)
    }
}

/// `t_i ↦ analyze(F(synthesize(u(t_i))))`.
pub fn nonlinear_trajectory(u: &Trajectory, f: &Nonlinearity) -> Result<Trajectory> {
    let basis = u.basis().clone();
    let states = u
        .states()
        .par_iter()
        .map(|s| analyze(&eval_nonlinearity(&synthesize(s), f), &basis))
        .collect::<Result<Vec<_>>>()?;
    Trajectory::new(*u.grid(), states)
}

fn check_inputs(current: &Trajectory, u0: &SpectralField) -> Result<()> {
    if !current.state(0).same_basis(u0) {
        return Err(Error::GridMismatch("initial data and trajectory use different bases".into()));
    }
    Ok(())
}

fn step_with_aliasing(current: &Trajectory, u0: &SpectralField, f: &Nonlinearity, beta: f64) -> Result<(Trajectory, f64)> {
    check_inputs(current, u0)?;
    let grid = *current.grid();
    if f.is_zero() {
        return Ok((Trajectory::linear(u0, grid, beta)?, 0.0));
    }
    let forcing = nonlinear_trajectory(current, f)?;
    let aliasing = forcing.states().iter().map(|s| s.top_shell_mass()).fold(0.0, f64::max);
    let b = duhamel_all(&forcing, beta)?;
    let states = b
        .into_iter()
        .enumerate()
        .map(|(i, bi)| apply_semigroup(u0, grid.node(i), beta)?.add(&bi))
        .collect::<Result<_>>()?;
    Ok((Trajectory::new(grid, states)?, aliasing))
}

/// One application of `u ↦ K_β(t)u0 + BF(u)`.
pub fn picard_step(current: &Trajectory, u0: &SpectralField, f: &Nonlinearity, beta: f64) -> Result<Trajectory> {
    Ok(step_with_aliasing(current, u0, f, beta)?.0)
}

/// Iterates from the linear trajectory until the sup-in-time difference drops
/// below `tol`. Fails with [`Error::NonConvergence`] after `max_iter` steps or
/// as soon as an iterate stops being finite.
pub fn picard_solve(
    u0: &SpectralField,
    f: &Nonlinearity,
    beta: f64,
    grid: TimeGrid,
    tol: f64,
    max_iter: usize,
) -> Result<(Trajectory, ContractionReport)> {
    if !(tol > 0.0) {
        return Err(Error::invalid(format!("tolerance must be positive, got {tol}")));
    }
    let mut current = Trajectory::linear(u0, grid, beta)?;
    let mut report = ContractionReport::default();
    while report.iterates < max_iter {
        let (next, aliasing) = step_with_aliasing(&current, u0, f, beta)?;
        let diff = next.sup_distance(&current)?;
        report.iterates += 1;
        report.aliasing = report.aliasing.max(aliasing);
        if let Some(&prev) = report.diffs.last() {
            if prev > 0.0 {
                report.ratios.push(diff / prev);
            }
        }
        report.diffs.push(diff);
        if !diff.is_finite() {
            break;
        }
        current = next;
        if diff < tol {
            report.converged = true;
            return Ok((current, report));
        }
    }
    Err(Error::NonConvergence { report: Box::new(report) })
}

/// `sup_i ‖u(t_i) − [K_β(t_i)u0 + BF(u)(t_i)]‖₂`.
pub fn fixed_point_residual(u: &Trajectory, u0: &SpectralField, f: &Nonlinearity, beta: f64) -> Result<f64> {
    picard_step(u, u0, f, beta)?.sup_distance(u)
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use num_complex::Complex64;

    use super::*;
    use crate::evolution::etd::etdrk4;
    use crate::spectral::HermiteBasis;

    fn basis() -> Arc<HermiteBasis> {
        Arc::new(HermiteBasis::new(1, 24, 11.0, 192).unwrap())
    }

    fn ground(b: &Arc<HermiteBasis>, amp: f64) -> SpectralField {
        SpectralField::unit(b.clone(), 0).scaled(Complex64::new(amp, 0.0))
    }

    #[test]
    fn zero_nonlinearity_converges_at_once_to_the_linear_flow() {
        let b = basis();
        let mut u0 = ground(&b, 0.3);
        u0.coeffs_mut()[3] = Complex64::new(0.1, -0.2);
        let grid = TimeGrid::new(0.5, 10).unwrap();
        let (traj, rep) = picard_solve(&u0, &Nonlinearity::zero(), 0.5, grid, 1e-12, 5).unwrap();
        assert_eq!(rep.iterates, 1);
        assert_eq!(rep.diffs, vec![0.0]);
        for (i, s) in traj.states().iter().enumerate() {
            assert!(s.distance(&apply_semigroup(&u0, grid.node(i), 0.5).unwrap()).unwrap() < 1e-12);
        }
    }

    #[test]
    fn zero_data_stays_zero() {
        let b = basis();
        let grid = TimeGrid::new(0.5, 10).unwrap();
        let (traj, rep) =
            picard_solve(&SpectralField::zeros(b), &Nonlinearity::dissipative_cubic(), 1.0, grid, 1e-12, 5).unwrap();
        assert!(rep.converged);
        assert!(traj.states().iter().all(|s| s.l2_norm() == 0.0));
    }

    #[test]
    fn small_cubic_data_contracts_and_matches_the_oracle() {
        let b = basis();
        let u0 = ground(&b, 0.1);
        let f = Nonlinearity::dissipative_cubic();
        let grid = TimeGrid::new(0.1, 64).unwrap();
        let tol = 1e-12;
        let (traj, rep) = picard_solve(&u0, &f, 1.0, grid, tol, 8).unwrap();
        assert!(rep.max_ratio_after_first().unwrap_or(0.0) <= 0.5, "{rep:?}");
        assert!(fixed_point_residual(&traj, &u0, &f, 1.0).unwrap() < 2.0 * tol);
        let oracle = etdrk4(&u0, &f, 1.0, 0.1, 1024).unwrap();
        let err = traj.endpoint().distance(&oracle).unwrap() / oracle.l2_norm();
        assert!(err < 1e-4, "{err}");
        let norms = traj.l2_norms();
        assert!(norms.windows(2).all(|w| w[1] <= w[0] + 1e-6));
    }

    #[test]
    fn one_step_is_first_order_perturbation() {
        // step(u_lin) = u_lin + BF(u_lin) differs from the solution by O(ε⁵)
        let b = basis();
        let f = Nonlinearity::dissipative_cubic();
        let grid = TimeGrid::new(0.2, 32).unwrap();
        let mut errs = Vec::new();
        for eps in [0.2, 0.1] {
            let u0 = ground(&b, eps);
            let lin = Trajectory::linear(&u0, grid, 1.0).unwrap();
            let one = picard_step(&lin, &u0, &f, 1.0).unwrap();
            let oracle = etdrk4(&u0, &f, 1.0, 0.2, 512).unwrap();
            errs.push(one.endpoint().distance(&oracle).unwrap());
        }
        assert!(errs[1] < 0.2f64.powi(4));
        assert!(errs[0] / errs[1] > 16.0, "{errs:?}");
    }

    #[test]
    fn large_data_does_not_converge() {
        let b = basis();
        let u0 = ground(&b, 100.0);
        let grid = TimeGrid::new(0.1, 64).unwrap();
        match picard_solve(&u0, &Nonlinearity::dissipative_cubic(), 1.0, grid, 1e-10, 12) {
            Err(Error::NonConvergence { report }) => {
                assert!(!report.converged);
                assert!(report.diffs.len() <= 12);
            }
            other => panic!("expected non-convergence, got {:?}", other.map(|r| r.1)),
        }
    }

    #[test]
    fn mismatched_bases_are_rejected() {
        let grid = TimeGrid::new(0.1, 4).unwrap();
        let lin = Trajectory::linear(&ground(&basis(), 0.1), grid, 1.0).unwrap();
        assert!(picard_step(&lin, &ground(&basis(), 0.1), &Nonlinearity::dissipative_cubic(), 1.0).is_err());
    }
}
