use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::symbol::Symbol;
use crate::error::{Error, Result};
use crate::tf::japanese_bracket;

/// Highest total derivative order supported by the difference stencils.
pub const MAX_DERIVATIVE_ORDER: u32 = 6;

/// Relative tolerance for the Richardson convergence check.
const CONVERGENCE_TOL: f64 = 1e-3;

/// Cube `[-R, R]^{2d}` sampled with `points` nodes per axis, and the base
/// finite-difference step `δ`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SamplingBox {
    pub dim: usize,
    pub half_width: f64,
    pub points: usize,
    pub step: f64,
}

impl SamplingBox {
    pub fn new(dim: usize, half_width: f64, points: usize, step: f64) -> Result<Self> {
        if dim == 0 || !dim.is_multiple_of(2) {
            return Err(Error::invalid("phase-space dimension must be even and positive"));
        }
        if !(half_width >= 0.0 && step > 0.0) || points == 0 {
            return Err(Error::invalid("sampling box needs R ≥ 0, δ > 0 and at least one point"));
        }
        Ok(SamplingBox { dim, half_width, points, step })
    }

    pub fn len(&self) -> usize {
        self.points.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn node(&self, mut flat: usize) -> Vec<f64> {
        let mut z = vec![0.0; self.dim];
        let spacing = if self.points > 1 { 2.0 * self.half_width / (self.points - 1) as f64 } else { 0.0 };
        for k in (0..self.dim).rev() {
            let j = flat % self.points;
            flat /= self.points;
            z[k] = if self.points > 1 { -self.half_width + j as f64 * spacing } else { 0.0 };
        }
        z
    }

    pub fn meta(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("box serializes")
    }
}

/// Sup-type semi-norm estimate with its convergence diagnostics.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SeminormEstimate {
    #[serde(rename = "N")]
    pub n: u32,
    pub m: f64,
    pub value: f64,
    /// Point and multi-index at which the supremum was attained.
    pub argmax: Vec<f64>,
    pub alpha: Vec<u32>,
    pub converged: bool,
    pub warnings: Vec<String>,
    pub grid_meta: serde_json::Value,
}

/// All multi-indices in `ℕ^dim` with `|α| ≤ max`.
fn multi_indices(dim: usize, max: u32) -> Vec<Vec<u32>> {
    let mut out = vec![vec![]];
    for _ in 0..dim {
        let mut next = Vec::new();
        for a in &out {
            let used: u32 = a.iter().sum();
            for k in 0..=(max - used) {
                let mut b = a.clone();
                b.push(k);
                next.push(b);
            }
        }
        out = next;
    }
    out
}

fn binomial(n: u32, k: u32) -> f64 {
    (1..=k).fold(1.0, |acc, i| acc * (n - k + i) as f64 / i as f64)
}

/// Tensor central difference `D^α_δ σ(z)`, real part.
fn difference(symbol: &Symbol, z: &[f64], alpha: &[u32], delta: f64) -> Result<f64> {
    let mut stencil: Vec<(Vec<f64>, f64)> = vec![(z.to_vec(), 1.0)];
    for (axis, &k) in alpha.iter().enumerate() {
        if k == 0 {
            continue;
        }
        let mut next = Vec::with_capacity(stencil.len() * (k as usize + 1));
        for (p, w) in &stencil {
            for i in 0..=k {
                let mut q = p.clone();
                q[axis] += (k as f64 / 2.0 - i as f64) * delta;
                let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
                next.push((q, w * sign * binomial(k, i) / delta.powi(k as i32)));
            }
        }
        stencil = next;
    }
    let mut acc = 0.0;
    for (p, w) in &stencil {
        acc += w * symbol.eval(p)?.re;
    }
    Ok(acc)
}

/// Richardson-extrapolated derivative and whether the two step sizes agree.
fn derivative(symbol: &Symbol, z: &[f64], alpha: &[u32], delta: f64) -> Result<(f64, bool)> {
    if alpha.iter().all(|&a| a == 0) {
        return Ok((symbol.eval(z)?.re, true));
    }
    let coarse = difference(symbol, z, alpha, delta)?;
    let fine = difference(symbol, z, alpha, delta / 2.0)?;
    let value = (4.0 * fine - coarse) / 3.0;
    let ok = (fine - coarse).abs() / 3.0 <= CONVERGENCE_TOL * value.abs().max(1.0);
    Ok((value, ok))
}

/// `sup_z sup_{|α| ≤ N} |D^α σ(z)| w(z, |α|)` over the box.
fn sup_norm<W>(symbol: &Symbol, max_order: u32, bx: &SamplingBox, weight: W) -> Result<(f64, Vec<f64>, Vec<u32>, bool)>
where
    W: Fn(&[f64], u32) -> f64 + Sync,
{
    if max_order > MAX_DERIVATIVE_ORDER {
        return Err(Error::invalid(format!(
            "derivative order {max_order} exceeds the supported {MAX_DERIVATIVE_ORDER}"
        )));
    }
    let alphas = multi_indices(bx.dim, max_order);
    let per_node: Vec<(f64, Vec<f64>, Vec<u32>, bool)> = (0..bx.len())
        .into_par_iter()
        .map(|flat| {
            let z = bx.node(flat);
            let mut best = (0.0, z.clone(), vec![0; bx.dim], true);
            for a in &alphas {
                let (v, ok) = derivative(symbol, &z, a, bx.step)?;
                best.3 &= ok;
                let order: u32 = a.iter().sum();
                let val = v.abs() * weight(&z, order);
                if val > best.0 {
                    best.0 = val;
                    best.2 = a.clone();
                }
            }
            Ok(best)
        })
        .collect::<Result<_>>()?;
    let mut out = (0.0, bx.node(0), vec![0; bx.dim], true);
    for (v, z, a, ok) in per_node {
        out.3 &= ok;
        if v > out.0 {
            out = (v, z, a, out.3);
        }
    }
    Ok(out)
}

fn warnings_for(converged: bool, step: f64) -> Vec<String> {
    if converged {
        Vec::new()
    } else {
        vec![format!("finite differences at step {step} and {} disagree; derivatives unconverged", step / 2.0)]
    }
}

/// Hörmander semi-norm `|σ|_{N,m} = sup_{|α|≤N} |∂^α σ(z)| ⟨z⟩^{-m}`.
pub fn symbol_seminorm(symbol: &Symbol, n: u32, m: f64, bx: &SamplingBox) -> Result<SeminormEstimate> {
    let (value, argmax, alpha, converged) =
        sup_norm(symbol, n, bx, |z, _| japanese_bracket(z).powf(-m))?;
    Ok(SeminormEstimate {
        n,
        m,
        value,
        argmax,
        alpha,
        converged,
        warnings: warnings_for(converged, bx.step),
        grid_meta: bx.meta(),
    })
}

/// Shubin semi-norm `|a|_k = sup_{|α|≤k} |∂^α a(z)| ⟨z⟩^{|α|}`.
pub fn shubin_seminorm(symbol: &Symbol, k: u32, bx: &SamplingBox) -> Result<SeminormEstimate> {
    let (value, argmax, alpha, converged) =
        sup_norm(symbol, k, bx, |z, order| japanese_bracket(z).powi(order as i32))?;
    Ok(SeminormEstimate {
        n: k,
        m: 0.0,
        value,
        argmax,
        alpha,
        converged,
        warnings: warnings_for(converged, bx.step),
        grid_meta: bx.meta(),
    })
}

/// Outcome of sampling `a(z) ≥ C⟨z⟩` on `|z| ≥ R`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EllipticityReport {
    pub holds: bool,
    /// `min a(z)/⟨z⟩` over sampled `|z| ≥ R`.
    pub min_ratio: f64,
    /// `min_ratio − C`.
    pub margin: f64,
    pub argmin: Vec<f64>,
    pub sampled: usize,
}

pub fn ellipticity_check(symbol: &Symbol, c: f64, r: f64, bx: &SamplingBox) -> Result<EllipticityReport> {
    let mut min_ratio = f64::INFINITY;
    let mut argmin = Vec::new();
    let mut sampled = 0;
    for flat in 0..bx.len() {
        let z = bx.node(flat);
        let norm = z.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm < r {
            continue;
        }
        sampled += 1;
        let ratio = symbol.eval(&z)?.re / japanese_bracket(&z);
        if ratio < min_ratio {
            min_ratio = ratio;
            argmin = z;
        }
    }
    Ok(EllipticityReport { holds: min_ratio >= c, min_ratio, margin: min_ratio - c, argmin, sampled })
}

#[cfg(test)]
mod tests {
    use num_complex::Complex64;

    use super::*;

    fn bx() -> SamplingBox {
        SamplingBox::new(2, 4.0, 33, 0.0625).unwrap()
    }

    #[test]
    fn constant_symbol() {
        for n in [0, 2, 4] {
            let e = symbol_seminorm(&Symbol::one(), n, 0.0, &bx()).unwrap();
            assert!((e.value - 1.0).abs() < 1e-12);
            assert!(e.converged);
        }
        for k in [0, 1, 3] {
            assert!((shubin_seminorm(&Symbol::one(), k, &bx()).unwrap().value - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn bracket_symbols() {
        let e = symbol_seminorm(&Symbol::jbracket(2.0), 0, 2.0, &bx()).unwrap();
        assert!((e.value - 1.0).abs() < 1e-12);
        let s = shubin_seminorm(&Symbol::jbracket(-2.0), 0, &bx()).unwrap();
        assert!((s.value - 1.0).abs() < 1e-15);
        assert_eq!(s.argmax, vec![0.0, 0.0]);
    }

    #[test]
    fn sine_derivatives_are_bounded_by_one() {
        let e = symbol_seminorm(&Symbol::sin1(), 2, 0.0, &bx()).unwrap();
        assert!((e.value - 1.0).abs() < 1e-4, "{}", e.value);
        assert!(e.converged);
    }

    #[test]
    fn gaussian_shubin_norm_matches_analytic_derivatives() {
        let b = bx();
        let est = shubin_seminorm(&Symbol::gauss(), 1, &b).unwrap();
        let mut oracle: f64 = 0.0;
        for flat in 0..b.len() {
            let z = b.node(flat);
            let r2: f64 = z.iter().map(|v| v * v).sum();
            let e = (-r2).exp();
            oracle = oracle.max(e);
            let jb = (1.0 + r2).sqrt();
            for zi in &z {
                oracle = oracle.max((2.0 * zi * e).abs() * jb);
            }
        }
        assert!((est.value - oracle).abs() < 1e-4 * oracle, "{} vs {oracle}", est.value);
    }

    #[test]
    fn seminorm_is_monotone_in_order() {
        let sym = Symbol::closure("mix", 0.0, |z| Complex64::new((z[0] * 1.7).cos() * (-0.1 * z[1] * z[1]).exp(), 0.0));
        let mut prev = 0.0;
        for n in 0..=4 {
            let v = symbol_seminorm(&sym, n, 0.0, &bx()).unwrap().value;
            assert!(v >= prev);
            prev = v;
        }
        assert!(symbol_seminorm(&sym, 7, 0.0, &bx()).is_err());
    }

    #[test]
    fn ellipticity_examples() {
        let b = bx();
        assert!(ellipticity_check(&Symbol::jbracket(2.0), 1.0, 1.0, &b).unwrap().holds);
        assert!(!ellipticity_check(&Symbol::one(), 1.0, 1.0, &b).unwrap().holds);
        let rep = ellipticity_check(&Symbol::harmonic_root(), 0.5, 1.0, &b).unwrap();
        assert!(rep.holds && rep.margin > 0.0 && rep.sampled > 0);
    }

    #[test]
    fn multi_index_enumeration() {
        assert_eq!(multi_indices(2, 2).len(), 6);
        assert_eq!(multi_indices(4, 3).len(), 35);
    }
}
