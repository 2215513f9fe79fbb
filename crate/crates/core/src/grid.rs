//! Uniform tensor grids over `[-L, L)^d` and complex samples living on them.
//!
//! Node `j` on each axis sits at `-L + j h` with `h = 2L / n`. The grid is the
//! common carrier for the Hermite quadrature and for the DFT-based transforms,
//! so `n` is required to be even.

use std::io::{BufRead, Write};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Shape of a uniform tensor grid: dimension, half-width and samples per axis.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub d: usize,
    #[serde(rename = "L")]
    pub half_width: f64,
    pub n: usize,
}

impl GridSpec {
    pub fn new(d: usize, half_width: f64, n: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::invalid("grid dimension must be at least 1"));
        }
        if !(half_width.is_finite() && half_width > 0.0) {
            return Err(Error::invalid(format!("grid half-width must be positive, got {half_width}")));
        }
        if n < 2 || !n.is_multiple_of(2) {
            return Err(Error::invalid(format!("samples per axis must be even and >= 2, got {n}")));
        }
        n.checked_pow(d as u32)
            .ok_or_else(|| Error::invalid("grid too large"))?;
        Ok(GridSpec { d, half_width, n })
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / self.n as f64
    }

    /// Spacing of the DFT frequency bins, `1 / (2L)`.
    pub fn frequency_spacing(&self) -> f64 {
        1.0 / (2.0 * self.half_width)
    }

    /// Largest representable frequency magnitude, `1 / (2h)`.
    pub fn nyquist(&self) -> f64 {
        0.5 / self.spacing()
    }

    pub fn len(&self) -> usize {
        self.n.pow(self.d as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.d as i32)
    }

    pub fn coordinate(&self, j: usize) -> f64 {
        -self.half_width + j as f64 * self.spacing()
    }

    pub fn axis(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.coordinate(j)).collect()
    }

    pub fn shape(&self) -> Vec<usize> {
        vec![self.n; self.d]
    }

    /// Row-major unravel of a flat index; axis 0 varies slowest.
    pub fn unravel(&self, mut flat: usize, out: &mut [usize]) {
        for k in (0..self.d).rev() {
            out[k] = flat % self.n;
            flat /= self.n;
        }
    }

    pub fn ravel(&self, idx: &[usize]) -> usize {
        idx.iter().fold(0, |acc, &j| acc * self.n + j)
    }

    pub fn node(&self, flat: usize) -> Vec<f64> {
        let mut idx = vec![0; self.d];
        self.unravel(flat, &mut idx);
        idx.iter().map(|&j| self.coordinate(j)).collect()
    }

    /// Nearest node index to `x` on one axis, clamped to the grid.
    pub fn nearest_index(&self, x: f64) -> usize {
        let j = ((x + self.half_width) / self.spacing()).round();
        j.clamp(0.0, (self.n - 1) as f64) as usize
    }

    pub fn same_as(&self, other: &GridSpec) -> bool {
        self.d == other.d
            && self.n == other.n
            && (self.half_width - other.half_width).abs() <= 1e-12 * self.half_width
    }

    pub(crate) fn check_same(&self, other: &GridSpec) -> Result<()> {
        if self.same_as(other) {
            Ok(())
        } else {
            Err(Error::GridMismatch(format!(
                "(d={}, L={}, n={}) vs (d={}, L={}, n={})",
                self.d, self.half_width, self.n, other.d, other.half_width, other.n
            )))
        }
    }
}

/// Complex samples of a function on a [`GridSpec`].
#[derive(Clone, Debug, PartialEq)]
pub struct GridFunction {
    spec: GridSpec,
    samples: Vec<Complex64>,
}

impl GridFunction {
    pub fn zeros(spec: GridSpec) -> Self {
        GridFunction { spec, samples: vec![Complex64::new(0.0, 0.0); spec.len()] }
    }

    pub fn from_samples(spec: GridSpec, samples: Vec<Complex64>) -> Result<Self> {
        if samples.len() != spec.len() {
            return Err(Error::GridMismatch(format!(
                "expected {} samples, got {}",
                spec.len(),
                samples.len()
            )));
        }
        Ok(GridFunction { spec, samples })
    }

    pub fn from_fn<F>(spec: GridSpec, f: F) -> Self
    where
        F: Fn(&[f64]) -> Complex64,
    {
        let mut x = vec![0.0; spec.d];
        let mut idx = vec![0; spec.d];
        let samples = (0..spec.len())
            .map(|flat| {
                spec.unravel(flat, &mut idx);
                for (xk, &j) in x.iter_mut().zip(&idx) {
                    *xk = spec.coordinate(j);
                }
                f(&x)
            })
            .collect();
        GridFunction { spec, samples }
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn samples_mut(&mut self) -> &mut [Complex64] {
        &mut self.samples
    }

    pub fn into_samples(self) -> Vec<Complex64> {
        self.samples
    }

    /// `⟨self, other⟩ = Σ self · conj(other) h^d`.
    pub fn inner(&self, other: &GridFunction) -> Result<Complex64> {
        self.spec.check_same(&other.spec)?;
        let s: Complex64 = self
            .samples
            .iter()
            .zip(&other.samples)
            .map(|(a, b)| a * b.conj())
            .sum();
        Ok(s * self.spec.cell_volume())
    }

    pub fn l2_norm(&self) -> f64 {
        let s: f64 = self.samples.iter().map(|v| v.norm_sqr()).sum();
        (s * self.spec.cell_volume()).sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.samples.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn scaled(&self, factor: Complex64) -> GridFunction {
        GridFunction {
            spec: self.spec,
            samples: self.samples.iter().map(|v| v * factor).collect(),
        }
    }

    pub fn sub(&self, other: &GridFunction) -> Result<GridFunction> {
        self.spec.check_same(&other.spec)?;
        Ok(GridFunction {
            spec: self.spec,
            samples: self.samples.iter().zip(&other.samples).map(|(a, b)| a - b).collect(),
        })
    }

    pub fn add(&self, other: &GridFunction) -> Result<GridFunction> {
        self.spec.check_same(&other.spec)?;
        Ok(GridFunction {
            spec: self.spec,
            samples: self.samples.iter().zip(&other.samples).map(|(a, b)| a + b).collect(),
        })
    }

    /// Relative discrete L² distance `‖self − other‖ / ‖other‖`.
    pub fn relative_error(&self, reference: &GridFunction) -> Result<f64> {
        let diff = self.sub(reference)?.l2_norm();
        let base = reference.l2_norm();
        Ok(if base > 0.0 { diff / base } else { diff })
    }

    /// Largest modulus among samples within `margin` nodes of any face of the box.
    pub fn boundary_max(&self, margin: usize) -> f64 {
        let spec = self.spec;
        let mut idx = vec![0; spec.d];
        let mut worst: f64 = 0.0;
        for (flat, v) in self.samples.iter().enumerate() {
            spec.unravel(flat, &mut idx);
            if idx.iter().any(|&j| j < margin || j + margin >= spec.n) {
                worst = worst.max(v.norm());
            }
        }
        worst
    }

    /// CSV with one row per node: coordinates, real part, imaginary part.
    /// The first line is `# ` followed by the JSON metadata header.
    pub fn write_csv<W: Write>(&self, mut out: W, meta: &serde_json::Value) -> Result<()> {
        writeln!(out, "# {}", serde_json::to_string(meta)?)?;
        let names: Vec<String> = (0..self.spec.d).map(|k| format!("x{k}")).collect();
        writeln!(out, "{},re,im", names.join(","))?;
        let mut idx = vec![0; self.spec.d];
        for (flat, v) in self.samples.iter().enumerate() {
            self.spec.unravel(flat, &mut idx);
            for &j in &idx {
                write!(out, "{},", self.spec.coordinate(j))?;
            }
            writeln!(out, "{},{}", v.re, v.im)?;
        }
        Ok(())
    }

    /// Reads the format produced by [`GridFunction::write_csv`]. The header must
    /// carry `d`, `L` and `n`; rows are taken in file order.
    pub fn read_csv<R: BufRead>(input: R) -> Result<(GridFunction, serde_json::Value)> {
        let mut lines = input.lines();
        let first = lines.next().ok_or_else(|| Error::Schema("empty grid CSV".into()))??;
        let header = first
            .strip_prefix("# ")
            .ok_or_else(|| Error::Schema("grid CSV is missing its metadata header".into()))?;
        let meta: serde_json::Value = serde_json::from_str(header)?;
        let grid = meta.get("grid").unwrap_or(&meta);
        let spec: GridSpec = serde_json::from_value(grid.clone())
            .map_err(|e| Error::Schema(format!("grid header: {e}")))?;
        let spec = GridSpec::new(spec.d, spec.half_width, spec.n)?;
        lines.next().ok_or_else(|| Error::Schema("grid CSV is missing its column row".into()))??;
        let mut samples = Vec::with_capacity(spec.len());
        for line in lines {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != spec.d + 2 {
                return Err(Error::Schema(format!("bad grid row: {line}")));
            }
            let parse = |s: &str| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|e| Error::Schema(format!("bad number {s:?}: {e}")))
            };
            samples.push(Complex64::new(parse(fields[spec.d])?, parse(fields[spec.d + 1])?));
        }
        Ok((GridFunction::from_samples(spec, samples)?, meta))
    }
}
