use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::GridSpec;

/// Step used by [`PhaseGrid::default_for`] on both axes before snapping it to
/// the sample grid.
pub const DEFAULT_STEP: f64 = 0.25;

/// Above this per-axis density `a·b` the Riemann-sum inversion is flagged.
pub const FRAME_DENSITY_LIMIT: f64 = 0.5;

/// Finite section of the lattice `aℤ^d × bℤ^d`: nodes `(j a, l b)` with the
/// multi-integers `j`, `l` ranging over inclusive per-axis extents.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseGrid {
    pub a: f64,
    pub b: f64,
    pub x_extent: Vec<(i64, i64)>,
    pub w_extent: Vec<(i64, i64)>,
}

fn count(extent: &[(i64, i64)]) -> usize {
    extent.iter().map(|(lo, hi)| (hi - lo + 1) as usize).product()
}

fn unravel(extent: &[(i64, i64)], mut flat: usize, step: f64) -> Vec<f64> {
    let mut out = vec![0.0; extent.len()];
    for k in (0..extent.len()).rev() {
        let (lo, hi) = extent[k];
        let len = (hi - lo + 1) as usize;
        out[k] = (lo + (flat % len) as i64) as f64 * step;
        flat /= len;
    }
    out
}

fn unravel_index(extent: &[(i64, i64)], mut flat: usize) -> Vec<i64> {
    let mut out = vec![0; extent.len()];
    for k in (0..extent.len()).rev() {
        let (lo, hi) = extent[k];
        let len = (hi - lo + 1) as usize;
        out[k] = lo + (flat % len) as i64;
        flat /= len;
    }
    out
}

impl PhaseGrid {
    pub fn new(a: f64, b: f64, x_extent: Vec<(i64, i64)>, w_extent: Vec<(i64, i64)>) -> Result<Self> {
        if !(a > 0.0 && a.is_finite() && b > 0.0 && b.is_finite()) {
            return Err(Error::invalid(format!("lattice steps must be positive, got a={a}, b={b}")));
        }
        if x_extent.is_empty() || x_extent.len() != w_extent.len() {
            return Err(Error::invalid("position and frequency extents must share a non-zero dimension"));
        }
        if x_extent.iter().chain(&w_extent).any(|(lo, hi)| lo > hi) {
            return Err(Error::invalid("lattice extents must be non-empty"));
        }
        Ok(PhaseGrid { a, b, x_extent, w_extent })
    }

    /// Lattice with steps `a`, `b` covering the whole sample box in position and
    /// every representable frequency bin.
    pub fn covering(spec: &GridSpec, a: f64, b: f64) -> Result<Self> {
        let m = bin_multiple(spec, b)?;
        let h = spec.spacing();
        let l = spec.half_width;
        let x_lo = (-l / a).ceil() as i64;
        let x_hi = ((l - h) / a).floor() as i64;
        let half = spec.n as i64 / 2;
        let w_lo = -(half / m as i64);
        let w_hi = (half - 1) / m as i64;
        PhaseGrid::new(a, b, vec![(x_lo, x_hi); spec.d], vec![(w_lo, w_hi); spec.d])
    }

    /// Default lattice: both steps close to [`DEFAULT_STEP`], with `a` an exact
    /// multiple of the sample spacing and `b` an exact multiple of the bin width.
    pub fn default_for(spec: &GridSpec) -> Self {
        Self::with_target_steps(spec, DEFAULT_STEP, DEFAULT_STEP)
            .expect("default lattice is representable")
    }

    /// Rounds the requested steps to the nearest admissible ones (`a ∈ hℤ`,
    /// `b ∈ ℤ/(2L)`) and covers the box.
    pub fn with_target_steps(spec: &GridSpec, a: f64, b: f64) -> Result<Self> {
        let h = spec.spacing();
        let bin = spec.frequency_spacing();
        let a = (a / h).round().max(1.0) * h;
        let b = (b / bin).round().max(1.0) * bin;
        Self::covering(spec, a, b)
    }

    pub fn dim(&self) -> usize {
        self.x_extent.len()
    }

    pub fn x_count(&self) -> usize {
        count(&self.x_extent)
    }

    pub fn w_count(&self) -> usize {
        count(&self.w_extent)
    }

    pub fn len(&self) -> usize {
        self.x_count() * self.w_count()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn x_node(&self, flat: usize) -> Vec<f64> {
        unravel(&self.x_extent, flat, self.a)
    }

    pub fn w_node(&self, flat: usize) -> Vec<f64> {
        unravel(&self.w_extent, flat, self.b)
    }

    pub fn w_index(&self, flat: usize) -> Vec<i64> {
        unravel_index(&self.w_extent, flat)
    }

    /// Per-axis product `a·b`.
    pub fn density(&self) -> f64 {
        self.a * self.b
    }

    /// `(a b)^d`, the Riemann weight of one lattice cell in ℝ^{2d}.
    pub fn cell_volume(&self) -> f64 {
        self.density().powi(self.dim() as i32)
    }

    pub fn frame_density_warning(&self) -> Option<String> {
        (self.density() > FRAME_DENSITY_LIMIT).then(|| {
            format!(
                "lattice density a·b = {} exceeds {FRAME_DENSITY_LIMIT}; Riemann-sum inversion is unreliable",
                self.density()
            )
        })
    }

    pub fn meta(&self) -> serde_json::Value {
        serde_json::json!({
            "a": self.a,
            "b": self.b,
            "x_extent": self.x_extent,
            "w_extent": self.w_extent,
            "density": self.density(),
        })
    }
}

/// `b · 2L` as an integer, or an error when `b` is not a whole number of bins.
pub(crate) fn bin_multiple(spec: &GridSpec, b: f64) -> Result<usize> {
    let bin = spec.frequency_spacing();
    let m = b / bin;
    let r = m.round();
    if r < 1.0 || (m - r).abs() > 1e-9 * r.max(1.0) {
        return Err(Error::IncompatibleStep { step: b, bin });
    }
    Ok(r as usize)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_grid_is_on_sample_nodes() {
        let spec = GridSpec::new(1, 12.0, 2048).unwrap();
        let g = PhaseGrid::default_for(&spec);
        let ratio = g.a / spec.spacing();
        assert!((ratio - ratio.round()).abs() < 1e-12);
        assert!((g.b - 0.25).abs() < 1e-15);
        assert!(g.density() <= FRAME_DENSITY_LIMIT);
        assert!(g.x_node(0)[0] >= -12.0);
        assert!(g.x_node(g.x_count() - 1)[0] < 12.0);
        let top = g.w_node(g.w_count() - 1)[0];
        assert!(top < spec.nyquist());
    }

    #[test]
    fn rejects_off_bin_frequency_steps() {
        let spec = GridSpec::new(1, 12.0, 2048).unwrap();
        assert!(matches!(
            PhaseGrid::covering(&spec, 0.25, 0.3),
            Err(Error::IncompatibleStep { .. })
        ));
        assert!(PhaseGrid::covering(&spec, 0.25, 0.5).is_ok());
        assert!(PhaseGrid::new(0.0, 1.0, vec![(0, 1)], vec![(0, 1)]).is_err());
        assert!(PhaseGrid::new(1.0, 1.0, vec![(2, 1)], vec![(0, 1)]).is_err());
    }

    #[test]
    fn density_warning() {
        let g = PhaseGrid::new(1.0, 1.0, vec![(0, 1)], vec![(0, 1)]).unwrap();
        assert!(g.frame_density_warning().is_some());
        let g = PhaseGrid::new(0.5, 0.5, vec![(0, 1)], vec![(0, 1)]).unwrap();
        assert!(g.frame_density_warning().is_none());
    }
}
