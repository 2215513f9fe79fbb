use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::hermite::{HermiteBasis, MultiIndex};
use crate::error::{Error, Result};
use crate::grid::GridFunction;

/// Coefficients `c_α`, `|α| ≤ K`, in a shared Hermite basis.
#[derive(Clone, Debug)]
pub struct SpectralField {
    basis: Arc<HermiteBasis>,
    coeffs: Vec<Complex64>,
}

#[derive(Serialize, Deserialize)]
struct CoefficientEntry {
    multi_index: MultiIndex,
    re: f64,
    im: f64,
}

impl SpectralField {
    pub fn zeros(basis: Arc<HermiteBasis>) -> Self {
        let coeffs = vec![Complex64::new(0.0, 0.0); basis.len()];
        SpectralField { basis, coeffs }
    }

    /// The unit vector `e_α` at position `index` of the basis ordering.
    pub fn unit(basis: Arc<HermiteBasis>, index: usize) -> Self {
        let mut f = Self::zeros(basis);
        f.coeffs[index] = Complex64::new(1.0, 0.0);
        f
    }

    pub fn from_coeffs(basis: Arc<HermiteBasis>, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != basis.len() {
            return Err(Error::invalid(format!(
                "expected {} coefficients, got {}",
                basis.len(),
                coeffs.len()
            )));
        }
        Ok(SpectralField { basis, coeffs })
    }

    pub fn basis(&self) -> &Arc<HermiteBasis> {
        &self.basis
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn l2_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn same_basis(&self, other: &SpectralField) -> bool {
        Arc::ptr_eq(&self.basis, &other.basis)
    }

    fn check_basis(&self, other: &SpectralField) -> Result<()> {
        if self.same_basis(other) {
            Ok(())
        } else {
            Err(Error::GridMismatch("spectral fields live in different bases".into()))
        }
    }

    pub fn sub(&self, other: &SpectralField) -> Result<SpectralField> {
        self.check_basis(other)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect();
        Ok(SpectralField { basis: self.basis.clone(), coeffs })
    }

    pub fn add(&self, other: &SpectralField) -> Result<SpectralField> {
        self.check_basis(other)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect();
        Ok(SpectralField { basis: self.basis.clone(), coeffs })
    }

    pub fn scaled(&self, factor: Complex64) -> SpectralField {
        SpectralField {
            basis: self.basis.clone(),
            coeffs: self.coeffs.iter().map(|c| c * factor).collect(),
        }
    }

    pub fn distance(&self, other: &SpectralField) -> Result<f64> {
        Ok(self.sub(other)?.l2_norm())
    }

    /// ℓ² mass of the top shell `|α| = K`; the reported truncation indicator.
    pub fn top_shell_mass(&self) -> f64 {
        let k = self.basis.max_degree();
        self.basis
            .indices()
            .iter()
            .zip(&self.coeffs)
            .filter(|(a, _)| a.order() == k)
            .map(|(_, c)| c.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Groups coefficients of order `k`: the coordinates of `P_k u`.
    pub fn shell(&self, k: u32) -> Vec<(MultiIndex, Complex64)> {
        self.basis
            .indices()
            .iter()
            .zip(&self.coeffs)
            .filter(|(a, _)| a.order() == k)
            .map(|(a, c)| (a.clone(), *c))
            .collect()
    }

    /// JSON array of `{multi_index, re, im}` in basis order.
    pub fn to_json(&self) -> serde_json::Value {
        let entries: Vec<CoefficientEntry> = self
            .basis
            .indices()
            .iter()
            .zip(&self.coeffs)
            .map(|(a, c)| CoefficientEntry { multi_index: a.clone(), re: c.re, im: c.im })
            .collect();
        serde_json::to_value(entries).expect("coefficient entries serialize")
    }

    /// Inverse of [`SpectralField::to_json`]; entries may appear in any order and
    /// missing indices are zero.
    pub fn from_json(basis: Arc<HermiteBasis>, value: &serde_json::Value) -> Result<Self> {
        let entries: Vec<CoefficientEntry> = serde_json::from_value(value.clone())
            .map_err(|e| Error::Schema(format!("spectral field: {e}")))?;
        let mut field = SpectralField::zeros(basis);
        for e in entries {
            let pos = field.basis.position(&e.multi_index).ok_or_else(|| {
                Error::Schema(format!("multi-index {} is outside the basis", e.multi_index))
            })?;
            field.coeffs[pos] = Complex64::new(e.re, e.im);
        }
        Ok(field)
    }
}

/// Applies `matrix` (`rows × cols`, or its transpose when `transpose`) along
/// `axis` of a row-major tensor.
fn contract_axis(
    data: &[Complex64],
    shape: &[usize],
    axis: usize,
    matrix: &[f64],
    rows: usize,
    transpose: bool,
) -> (Vec<Complex64>, Vec<usize>) {
    let cols = shape[axis];
    let inner: usize = shape[axis + 1..].iter().product();
    let outer: usize = shape[..axis].iter().product();
    let mut out = vec![Complex64::new(0.0, 0.0); outer * rows * inner];
    let entry = |r: usize, c: usize| {
        if transpose {
            matrix[c * rows + r]
        } else {
            matrix[r * cols + c]
        }
    };
    out.par_chunks_mut(rows * inner)
        .zip(data.par_chunks(cols * inner))
        .for_each(|(dst, src)| {
            for r in 0..rows {
                let row = &mut dst[r * inner..(r + 1) * inner];
                for c in 0..cols {
                    let m = entry(r, c);
                    if m == 0.0 {
                        continue;
                    }
                    for (o, s) in row.iter_mut().zip(&src[c * inner..(c + 1) * inner]) {
                        *o += s * m;
                    }
                }
            }
        });
    let mut new_shape = shape.to_vec();
    new_shape[axis] = rows;
    (out, new_shape)
}

/// Trapezoid-rule coefficients `c_α ≈ ⟨u, Φ_α⟩`.
pub fn analyze(u: &GridFunction, basis: &Arc<HermiteBasis>) -> Result<SpectralField> {
    basis.spec().check_same(u.spec())?;
    let spec = *basis.spec();
    let kp1 = basis.max_degree() as usize + 1;
    let w = spec.cell_volume();
    let mut data: Vec<Complex64> = u.samples().iter().map(|v| v * w).collect();
    let mut shape = spec.shape();
    for axis in 0..spec.d {
        let (next, next_shape) = contract_axis(&data, &shape, axis, basis.table(), kp1, false);
        data = next;
        shape = next_shape;
    }
    let coeffs = basis.tensor_pos().iter().map(|&p| data[p]).collect();
    Ok(SpectralField { basis: basis.clone(), coeffs })
}

/// Pointwise `Σ_α c_α Φ_α` on the basis grid.
pub fn synthesize(c: &SpectralField) -> GridFunction {
    let basis = c.basis();
    let spec = *basis.spec();
    let kp1 = basis.max_degree() as usize + 1;
    let mut data = vec![Complex64::new(0.0, 0.0); kp1.pow(spec.d as u32)];
    for (&p, v) in basis.tensor_pos().iter().zip(c.coeffs()) {
        data[p] = *v;
    }
    let mut shape = vec![kp1; spec.d];
    for axis in 0..spec.d {
        let (next, next_shape) = contract_axis(&data, &shape, axis, basis.table(), spec.n, true);
        data = next;
        shape = next_shape;
    }
    GridFunction::from_samples(spec, data).expect("synthesis fills the basis grid")
}

pub(crate) fn check_beta(beta: f64) -> Result<()> {
    if beta > 0.0 && beta <= 1.0 {
        Ok(())
    } else {
        Err(Error::invalid(format!("fractional power must lie in (0, 1], got {beta}")))
    }
}

/// `(2|α| + d)^β`, the eigenvalue of `H^β` on `Φ_α`.
pub fn eigenvalue(alpha: &MultiIndex, d: usize, beta: f64) -> Result<f64> {
    check_beta(beta)?;
    if alpha.dim() != d {
        return Err(Error::invalid(format!(
            "multi-index {alpha} does not have dimension {d}"
        )));
    }
    Ok(shell_rate(alpha.order(), d, beta))
}

pub(crate) fn shell_rate(order: u32, d: usize, beta: f64) -> f64 {
    (2.0 * order as f64 + d as f64).powf(beta)
}

/// Eigenvalues of `H^β` in basis order.
pub fn rates(basis: &HermiteBasis, beta: f64) -> Result<Vec<f64>> {
    check_beta(beta)?;
    let d = basis.dim();
    Ok(basis.indices().iter().map(|a| shell_rate(a.order(), d, beta)).collect())
}

/// `c_α ↦ e^{-t(2|α|+d)^β} c_α`.
pub fn apply_semigroup(c: &SpectralField, t: f64, beta: f64) -> Result<SpectralField> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::invalid(format!("semigroup time must be finite and >= 0, got {t}")));
    }
    let rates = rates(c.basis(), beta)?;
    let coeffs = c
        .coeffs()
        .iter()
        .zip(&rates)
        .map(|(v, r)| v * (-t * r).exp())
        .collect();
    Ok(SpectralField { basis: c.basis().clone(), coeffs })
}

/// `K_β(t) u0 = synthesize(apply_semigroup(analyze(u0), t, β))`.
pub fn propagate(u0: &GridFunction, t: f64, beta: f64, basis: &Arc<HermiteBasis>) -> Result<GridFunction> {
    let c = analyze(u0, basis)?;
    Ok(synthesize(&apply_semigroup(&c, t, beta)?))
}
