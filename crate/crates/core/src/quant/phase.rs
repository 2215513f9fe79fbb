use std::io::Write;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fft::shift_axis;
use crate::grid::GridSpec;
use crate::tf::PhaseGrid;

/// Samples of a function on ℝ^{2d} over the phase-space grid induced by a
/// sample grid: positions at the sample nodes `-L + j h`, frequencies at the
/// DFT bins `l / (2L)`, `l ∈ [-n/2, n/2)`.
///
/// Values are stored x-major with the frequency multi-index in centred order,
/// so the flat layout is that of a row-major `n^{2d}` tensor.
#[derive(Clone, Debug, PartialEq)]
pub struct PhaseSpaceFunction {
    spec: GridSpec,
    values: Vec<Complex64>,
}

impl PhaseSpaceFunction {
    pub fn zeros(spec: GridSpec) -> Self {
        let len = spec.len() * spec.len();
        PhaseSpaceFunction { spec, values: vec![Complex64::new(0.0, 0.0); len] }
    }

    pub fn from_values(spec: GridSpec, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != spec.len() * spec.len() {
            return Err(Error::invalid(format!(
                "phase-space table needs {} values, got {}",
                spec.len() * spec.len(),
                values.len()
            )));
        }
        Ok(PhaseSpaceFunction { spec, values })
    }

    pub fn from_fn<F>(spec: GridSpec, f: F) -> Self
    where
        F: Fn(&[f64]) -> Complex64,
    {
        let mut out = Self::zeros(spec);
        for (flat, v) in out.values.iter_mut().enumerate() {
            *v = f(&node_of(&spec, flat));
        }
        out
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    /// `(x, ω)` of flat entry `flat`.
    pub fn node(&self, flat: usize) -> Vec<f64> {
        node_of(&self.spec, flat)
    }

    pub fn frequency_spacing(&self) -> f64 {
        self.spec.frequency_spacing()
    }

    /// Riemann weight of one phase-space cell, `(h / 2L)^d`.
    pub fn cell_volume(&self) -> f64 {
        (self.spec.spacing() * self.spec.frequency_spacing()).powi(self.spec.d as i32)
    }

    /// The same nodes described as a lattice section.
    pub fn phase_grid(&self) -> PhaseGrid {
        let half = self.spec.n as i64 / 2;
        let ext = vec![(-half, half - 1); self.spec.d];
        PhaseGrid::new(self.spec.spacing(), self.spec.frequency_spacing(), ext.clone(), ext)
            .expect("induced phase grid is valid")
    }

    /// `∫∫ F dx dω` by the Riemann sum.
    pub fn integral(&self) -> Complex64 {
        self.values.iter().sum::<Complex64>() * self.cell_volume()
    }

    /// `⟨F, G⟩ = ∫∫ F conj(G)`.
    pub fn inner(&self, other: &PhaseSpaceFunction) -> Result<Complex64> {
        self.spec.check_same(&other.spec)?;
        let s: Complex64 = self.values.iter().zip(&other.values).map(|(a, b)| a * b.conj()).sum();
        Ok(s * self.cell_volume())
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn max_imag(&self) -> f64 {
        self.values.iter().map(|v| v.im.abs()).fold(0.0, f64::max)
    }

    /// Band-limited periodic translate `F(λ − u)`.
    pub fn translated(&self, u: &[f64]) -> Result<PhaseSpaceFunction> {
        let d = self.spec.d;
        if u.len() != 2 * d {
            return Err(Error::invalid(format!("translation needs {} coordinates", 2 * d)));
        }
        let shape = vec![self.spec.n; 2 * d];
        let mut values = self.values.clone();
        let h = self.spec.spacing();
        let b = self.spec.frequency_spacing();
        for axis in 0..2 * d {
            let step = if axis < d { h } else { b };
            shift_axis(&mut values, &shape, axis, u[axis] / step);
        }
        Ok(PhaseSpaceFunction { spec: self.spec, values })
    }

    /// Rows `x…, ω…, re, im, |value|` after a `# {json}` metadata line.
    pub fn write_csv<W: Write>(&self, mut out: W, meta: &serde_json::Value) -> Result<()> {
        writeln!(out, "# {}", serde_json::to_string(meta)?)?;
        let d = self.spec.d;
        let mut header: Vec<String> = (0..d).map(|k| format!("x{k}")).collect();
        header.extend((0..d).map(|k| format!("w{k}")));
        header.extend(["re".into(), "im".into(), "abs".into()]);
        writeln!(out, "{}", header.join(","))?;
        for (flat, v) in self.values.iter().enumerate() {
            let coords: Vec<String> = self.node(flat).iter().map(|c| format!("{c:.17e}")).collect();
            writeln!(out, "{},{:.17e},{:.17e},{:.17e}", coords.join(","), v.re, v.im, v.norm())?;
        }
        Ok(())
    }
}

fn node_of(spec: &GridSpec, mut flat: usize) -> Vec<f64> {
    let d = spec.d;
    let n = spec.n;
    let mut z = vec![0.0; 2 * d];
    for k in (0..2 * d).rev() {
        let j = flat % n;
        flat /= n;
        z[k] = if k < d {
            spec.coordinate(j)
        } else {
            (j as f64 - (n / 2) as f64) * spec.frequency_spacing()
        };
    }
    z
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;

    #[test]
    fn nodes_follow_layout() {
        let spec = GridSpec::new(1, 4.0, 16).unwrap();
        let f = PhaseSpaceFunction::zeros(spec);
        assert_eq!(f.node(0), vec![-4.0, -1.0]);
        assert_eq!(f.node(17), vec![-3.5, -0.875]);
        assert_eq!(f.phase_grid().len(), 256);
    }

    #[test]
    fn gaussian_integral_and_translation() {
        let spec = GridSpec::new(1, 8.0, 256).unwrap();
        let f = PhaseSpaceFunction::from_fn(spec, |z| {
            Complex64::new((-PI * (z[0] * z[0] + z[1] * z[1])).exp(), 0.0)
        });
        assert!((f.integral().re - 1.0).abs() < 1e-12);
        let u = [0.37, -1.21];
        let moved = f.translated(&u).unwrap();
        let expect = PhaseSpaceFunction::from_fn(spec, |z| {
            Complex64::new((-PI * ((z[0] - u[0]).powi(2) + (z[1] - u[1]).powi(2))).exp(), 0.0)
        });
        let err = moved.values().iter().zip(expect.values()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        assert!(err < 1e-12, "{err}");
    }
}
