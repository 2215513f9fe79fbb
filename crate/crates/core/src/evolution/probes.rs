use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::nonlinearity::Nonlinearity;
use super::picard::{picard_solve, ContractionReport};
use super::time::TimeGrid;
use crate::error::{Error, Result};
use crate::grid::{GridFunction, GridSpec};
use crate::spectral::{analyze, apply_semigroup, synthesize, HermiteBasis, SpectralField};
use crate::tf::{mod_norm_on, PhaseGrid, Weight, Window};

/// `count` shifted, modulated and dilated ground states
/// `e^{−c(x−x₀)²/2 + iξ·x}`, drawn from a ChaCha stream seeded by `seed`.
pub fn gaussian_class(spec: &GridSpec, count: usize, seed: u64) -> Vec<GridFunction> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let c: f64 = rng.gen_range(0.7..1.4);
            let x0: Vec<f64> = (0..spec.d).map(|_| rng.gen_range(-1.5..1.5)).collect();
            let xi: Vec<f64> = (0..spec.d).map(|_| rng.gen_range(-1.5..1.5)).collect();
            GridFunction::from_fn(*spec, |x| {
                let mut r2 = 0.0;
                let mut phase = 0.0;
                for k in 0..x.len() {
                    r2 += (x[k] - x0[k]).powi(2);
                    phase += xi[k] * x[k];
                }
                Complex64::from_polar((-c * r2 / 2.0).exp(), phase)
            })
        })
        .collect()
}

/// Settings for [`semigroup_bound_probe`].
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BoundProbe {
    pub p: f64,
    pub q: f64,
    pub s: f64,
    pub beta: f64,
    #[serde(rename = "T")]
    pub horizon: f64,
    /// Number of sampled times in `[0, T]`, endpoints included.
    pub times: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BoundReport {
    pub c_emp: f64,
    /// Largest ratio per test function.
    pub per_function: Vec<f64>,
    pub argmax_time: f64,
    pub grid_meta: serde_json::Value,
}

/// `max_{u, t} ‖K_β(t)u‖_{M^{p,q}_s} / ‖u‖_{M^{p,q}_s}` with the frequency
/// weight `⟨ξ⟩^s` and the Gaussian window. Test functions are first projected
/// onto the basis so that `t = 0` is the identity.
pub fn semigroup_bound_probe(
    cfg: &BoundProbe,
    test_set: &[GridFunction],
    basis: &Arc<HermiteBasis>,
    lattice: &PhaseGrid,
) -> Result<BoundReport> {
    if test_set.is_empty() {
        return Err(Error::invalid("semigroup probe needs a non-empty test set"));
    }
    let g = Window::gaussian(*basis.spec());
    let w = Weight::frequency(cfg.s);
    let times: Vec<f64> = match cfg.times {
        0 => return Err(Error::invalid("semigroup probe needs at least one time")),
        1 => vec![cfg.horizon],
        k => (0..k).map(|i| cfg.horizon * i as f64 / (k - 1) as f64).collect(),
    };
    let mut c_emp: f64 = 0.0;
    let mut argmax_time = 0.0;
    let mut per_function = Vec::with_capacity(test_set.len());
    for u in test_set {
        let c = analyze(u, basis)?;
        let base = mod_norm_on(&synthesize(&c), &g, lattice, cfg.p, cfg.q, &w)?;
        let mut best: f64 = 0.0;
        for &t in &times {
            let ut = synthesize(&apply_semigroup(&c, t, cfg.beta)?);
            let r = mod_norm_on(&ut, &g, lattice, cfg.p, cfg.q, &w)? / base;
            if r > best {
                best = r;
            }
            if r > c_emp {
                c_emp = r;
                argmax_time = t;
            }
        }
        per_function.push(best);
    }
    Ok(BoundReport { c_emp, per_function, argmax_time, grid_meta: lattice.meta() })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LipschitzReport {
    pub ratio: f64,
    pub data_distance: f64,
    pub trajectory_distance: f64,
    pub reports: [ContractionReport; 2],
}

/// `sup_i ‖u(t_i) − v(t_i)‖₂ / ‖u0 − v0‖₂` for two converged solutions.
pub fn lipschitz_probe(
    u0: &SpectralField,
    v0: &SpectralField,
    f: &Nonlinearity,
    beta: f64,
    grid: TimeGrid,
    tol: f64,
    max_iter: usize,
) -> Result<LipschitzReport> {
    let data_distance = u0.distance(v0)?;
    let (u, ru) = picard_solve(u0, f, beta, grid, tol, max_iter)?;
    let (v, rv) = picard_solve(v0, f, beta, grid, tol, max_iter)?;
    let trajectory_distance = u.sup_distance(&v)?;
    let ratio = if data_distance == 0.0 { 0.0 } else { trajectory_distance / data_distance };
    Ok(LipschitzReport { ratio, data_distance, trajectory_distance, reports: [ru, rv] })
}
