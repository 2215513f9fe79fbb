use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{apply_semigroup, synthesize, HermiteBasis, SpectralField};
use crate::tf::{mod_norm, Weight, Window};

/// Uniform nodes `t_i = i T / M`, `i = 0..=M`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    #[serde(rename = "T")]
    pub horizon: f64,
    #[serde(rename = "M")]
    pub steps: usize,
}

impl TimeGrid {
    pub fn new(horizon: f64, steps: usize) -> Result<Self> {
        if !(horizon > 0.0 && horizon.is_finite()) {
            return Err(Error::invalid(format!("time horizon must be positive, got {horizon}")));
        }
        if steps == 0 {
            return Err(Error::invalid("time grid needs at least one step"));
        }
        Ok(TimeGrid { horizon, steps })
    }

    pub fn step(&self) -> f64 {
        self.horizon / self.steps as f64
    }

    pub fn node(&self, i: usize) -> f64 {
        // exact at the endpoint
        if i == self.steps {
            self.horizon
        } else {
            i as f64 * self.horizon / self.steps as f64
        }
    }

    pub fn len(&self) -> usize {
        self.steps + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.node(i)).collect()
    }
}

/// One spectral state per time node, all in the same basis.
#[derive(Clone, Debug)]
pub struct Trajectory {
    grid: TimeGrid,
    states: Vec<SpectralField>,
}

impl Trajectory {
    pub fn new(grid: TimeGrid, states: Vec<SpectralField>) -> Result<Self> {
        if states.len() != grid.len() {
            return Err(Error::invalid(format!(
                "trajectory needs {} states, got {}",
                grid.len(),
                states.len()
            )));
        }
        if states.iter().any(|s| !s.same_basis(&states[0])) {
            return Err(Error::GridMismatch("trajectory states use different bases".into()));
        }
        Ok(Trajectory { grid, states })
    }

    /// `t_i ↦ K_β(t_i) u0`.
    pub fn linear(u0: &SpectralField, grid: TimeGrid, beta: f64) -> Result<Self> {
        let states = grid.nodes().into_iter().map(|t| apply_semigroup(u0, t, beta)).collect::<Result<_>>()?;
        Ok(Trajectory { grid, states })
    }

    pub fn zeros(basis: Arc<HermiteBasis>, grid: TimeGrid) -> Self {
        Trajectory { grid, states: vec![SpectralField::zeros(basis); grid.len()] }
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn basis(&self) -> &Arc<HermiteBasis> {
        self.states[0].basis()
    }

    pub fn states(&self) -> &[SpectralField] {
        &self.states
    }

    pub fn state(&self, i: usize) -> &SpectralField {
        &self.states[i]
    }

    pub fn endpoint(&self) -> &SpectralField {
        self.states.last().expect("at least two nodes")
    }

    /// `sup_i ‖u(t_i) − v(t_i)‖₂` on coefficients.
    pub fn sup_distance(&self, other: &Trajectory) -> Result<f64> {
        if self.grid != other.grid {
            return Err(Error::invalid("trajectories live on different time grids"));
        }
        let mut sup: f64 = 0.0;
        for (a, b) in self.states.iter().zip(&other.states) {
            sup = sup.max(a.distance(b)?);
        }
        Ok(sup)
    }

    pub fn sup_norm(&self) -> f64 {
        self.states.iter().map(|s| s.l2_norm()).fold(0.0, f64::max)
    }

    pub fn l2_norms(&self) -> Vec<f64> {
        self.states.iter().map(|s| s.l2_norm()).collect()
    }

    /// `{"time_grid", "states": [{"t", "coeffs"}]}`.
    pub fn to_json(&self) -> serde_json::Value {
        let states: Vec<_> = self
            .states
            .iter()
            .enumerate()
            .map(|(i, s)| serde_json::json!({ "t": self.grid.node(i), "coeffs": s.to_json() }))
            .collect();
        serde_json::json!({ "time_grid": self.grid, "states": states })
    }

    /// Rows `(t, ‖u(t)‖₂, ‖u(t)‖_{M^{1,1}_s})` with the Gaussian window.
    pub fn diagnostics(&self, s: f64) -> Result<Vec<(f64, f64, f64)>> {
        let g = Window::gaussian(*self.basis().spec());
        let w = Weight::frequency(s);
        self.states
            .iter()
            .enumerate()
            .map(|(i, st)| Ok((self.grid.node(i), st.l2_norm(), mod_norm(&synthesize(st), &g, 1.0, 1.0, &w)?)))
            .collect()
    }

    pub fn write_diagnostics_csv<W: std::io::Write>(&self, mut out: W, meta: &serde_json::Value, s: f64) -> Result<()> {
        writeln!(out, "# {}", serde_json::to_string(meta)?)?;
        writeln!(out, "t,l2_norm,mod_norm_p1q1s")?;
        for (t, l2, m) in self.diagnostics(s)? {
            writeln!(out, "{t:.17e},{l2:.17e},{m:.17e}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nodes_are_uniform_and_exact_at_end() {
        let g = TimeGrid::new(0.1, 64).unwrap();
        assert_eq!(g.len(), 65);
        assert_eq!(g.node(0), 0.0);
        assert_eq!(g.node(64), 0.1);
        assert!((g.node(32) - 0.05).abs() < 1e-17);
        assert!(TimeGrid::new(0.0, 4).is_err());
        assert!(TimeGrid::new(1.0, 0).is_err());
    }

    #[test]
    fn trajectory_rejects_mixed_bases() {
        let a = Arc::new(HermiteBasis::new(1, 4, 8.0, 64).unwrap());
        let b = Arc::new(HermiteBasis::new(1, 4, 8.0, 64).unwrap());
        let g = TimeGrid::new(1.0, 1).unwrap();
        assert!(Trajectory::new(g, vec![SpectralField::zeros(a.clone()), SpectralField::zeros(b)]).is_err());
        assert!(Trajectory::new(g, vec![SpectralField::zeros(a)]).is_err());
    }
}
