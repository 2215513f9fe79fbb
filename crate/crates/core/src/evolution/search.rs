use serde::{Deserialize, Serialize};

use super::nonlinearity::Nonlinearity;
use super::picard::{picard_solve, ContractionReport};
use super::time::TimeGrid;
use crate::error::{Error, Result};
use crate::spectral::SpectralField;

/// Bisection settings for [`local_time_search`].
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct SearchOptions {
    pub lower: f64,
    pub upper: f64,
    pub iterations: usize,
    /// Time steps per probe.
    pub steps: usize,
    pub tol: f64,
    pub max_iter: usize,
    pub target_ratio: f64,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            lower: 2f64.powi(-10),
            upper: 1.0,
            iterations: 12,
            steps: 32,
            tol: 1e-10,
            max_iter: 40,
            target_ratio: 0.5,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TimeProbe {
    #[serde(rename = "T")]
    pub horizon: f64,
    pub accepted: bool,
    pub report: ContractionReport,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TimeSearch {
    pub t_est: f64,
    pub probes: Vec<TimeProbe>,
}

fn probe(u0: &SpectralField, f: &Nonlinearity, beta: f64, horizon: f64, opts: &SearchOptions) -> Result<TimeProbe> {
    let grid = TimeGrid::new(horizon, opts.steps)?;
    let (accepted, report) = match picard_solve(u0, f, beta, grid, opts.tol, opts.max_iter) {
        Ok((_, rep)) => (rep.ratios.iter().all(|&r| r <= opts.target_ratio), rep),
        Err(Error::NonConvergence { report }) => (false, *report),
        Err(e) => return Err(e),
    };
    Ok(TimeProbe { horizon, accepted, report })
}

/// Largest tested horizon at which Picard iteration converges with every
/// contraction ratio at most `target_ratio`. The bisection runs on `log T`
/// because the bracket spans three decades.
pub fn local_time_search(u0: &SpectralField, f: &Nonlinearity, beta: f64, opts: &SearchOptions) -> Result<TimeSearch> {
    if u0.l2_norm() == 0.0 {
        return Err(Error::invalid("time search needs non-zero initial data"));
    }
    if !(0.0 < opts.lower && opts.lower < opts.upper) {
        return Err(Error::invalid("time search needs 0 < lower < upper"));
    }
    let mut probes = Vec::new();
    let top = probe(u0, f, beta, opts.upper, opts)?;
    let top_ok = top.accepted;
    probes.push(top);
    if top_ok {
        return Ok(TimeSearch { t_est: opts.upper, probes });
    }
    let bottom = probe(u0, f, beta, opts.lower, opts)?;
    let bottom_ok = bottom.accepted;
    probes.push(bottom);
    if !bottom_ok {
        return Ok(TimeSearch { t_est: opts.lower, probes });
    }
    let (mut lo, mut hi) = (opts.lower, opts.upper);
    for _ in 0..opts.iterations {
        let mid = (lo * hi).sqrt();
        let p = probe(u0, f, beta, mid, opts)?;
        if p.accepted {
            lo = mid;
        } else {
            hi = mid;
        }
        probes.push(p);
    }
    Ok(TimeSearch { t_est: lo, probes })
}
