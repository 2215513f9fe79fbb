use serde::{Deserialize, Serialize};

use super::gabor::GaborMatrixSample;
use super::wigner::{t_tau, Tau};
use crate::error::{Error, Result};
use crate::tf::japanese_bracket;

/// Radii window used for the off-diagonal slope.
pub const SLOPE_WINDOW: (f64, f64) = (2.0, 8.0);

fn diff(z: &[f64], y: &[f64]) -> Vec<f64> {
    y.iter().zip(z).map(|(a, b)| a - b).collect()
}

/// `⟨T_τ(z,y)⟩^m / ⟨y−z⟩^{2N}`.
pub fn bound_value(z: &[f64], y: &[f64], tau: Tau, m: f64, n: u32) -> f64 {
    japanese_bracket(&t_tau(z, y, tau)).powf(m) / japanese_bracket(&diff(z, y)).powi(2 * n as i32)
}

/// `⟨z+y⟩^m / ⟨y−z⟩^{2N}`.
pub fn corollary_bound(z: &[f64], y: &[f64], m: f64, n: u32) -> f64 {
    let sum: Vec<f64> = z.iter().zip(y).map(|(a, b)| a + b).collect();
    japanese_bracket(&sum).powf(m) / japanese_bracket(&diff(z, y)).powi(2 * n as i32)
}

/// Fitted constant and decay diagnostics for a set of Gabor-matrix samples.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DecayFit {
    pub tau: Tau,
    pub m: f64,
    #[serde(rename = "N")]
    pub n: u32,
    /// `max |M| / (⟨T_τ⟩^m ⟨y−z⟩^{-2N})`.
    #[serde(rename = "C")]
    pub c: f64,
    /// Smallest ratio `|M| / bound` among samples with non-zero entries.
    pub min_ratio: f64,
    /// Least-squares slope of `log max|M|` against `log⟨r⟩` on the radii window.
    pub slope: Option<f64>,
    /// Radii and per-radius maxima that entered the slope fit.
    pub slope_points: Vec<(f64, f64)>,
    /// Constant for the `⟨z+y⟩^m` form, reported for `τ ∈ (0, 1)`.
    pub corollary_c: Option<f64>,
    /// Range of `⟨T_τ(z,y)⟩ / ⟨z+y⟩` over the samples, for `τ ∈ (0, 1)`.
    pub equivalence_range: Option<(f64, f64)>,
    pub samples: usize,
    #[serde(default)]
    pub box_meta: serde_json::Value,
}

/// Fits `C` in `|M(z,y)| ≤ C ⟨T_τ(z,y)⟩^m / ⟨y−z⟩^{2N}` over the samples.
pub fn decay_fit(samples: &[GaborMatrixSample], m: f64, n: u32, tau: Tau) -> Result<DecayFit> {
    decay_fit_window(samples, m, n, tau, SLOPE_WINDOW)
}

pub fn decay_fit_window(
    samples: &[GaborMatrixSample],
    m: f64,
    n: u32,
    tau: Tau,
    window: (f64, f64),
) -> Result<DecayFit> {
    if samples.is_empty() {
        return Err(Error::invalid("decay fit needs at least one sample"));
    }
    let mut c: f64 = 0.0;
    let mut min_ratio = f64::INFINITY;
    let interior = tau.value() > 0.0 && tau.value() < 1.0;
    let mut cor: f64 = 0.0;
    let mut eq = (f64::INFINITY, 0.0f64);
    let mut by_radius: Vec<(f64, f64)> = Vec::new();
    for s in samples {
        let a = s.direct_value.norm();
        let ratio = a / bound_value(&s.z, &s.y, tau, m, n);
        c = c.max(ratio);
        if a > 0.0 {
            min_ratio = min_ratio.min(ratio);
        }
        if interior {
            cor = cor.max(a / corollary_bound(&s.z, &s.y, m, n));
            let sum: Vec<f64> = s.z.iter().zip(&s.y).map(|(p, q)| p + q).collect();
            let r = japanese_bracket(&t_tau(&s.z, &s.y, tau)) / japanese_bracket(&sum);
            eq = (eq.0.min(r), eq.1.max(r));
        }
        let r = s.distance();
        if r >= window.0 - 1e-9 && r <= window.1 + 1e-9 {
            match by_radius.iter_mut().find(|(q, _)| (q - r).abs() < 1e-9) {
                Some(entry) => entry.1 = entry.1.max(a),
                None => by_radius.push((r, a)),
            }
        }
    }
    by_radius.sort_by(|a, b| a.0.total_cmp(&b.0));
    let slope = fit_slope(&by_radius);
    Ok(DecayFit {
        tau,
        m,
        n,
        c,
        min_ratio,
        slope,
        slope_points: by_radius,
        corollary_c: interior.then_some(cor),
        equivalence_range: interior.then_some(eq),
        samples: samples.len(),
        box_meta: serde_json::Value::Null,
    })
}

/// Least-squares slope of `log v` against `log⟨r⟩`; zero maxima are floored
/// at the smallest positive double.
fn fit_slope(points: &[(f64, f64)]) -> Option<f64> {
    if points.len() < 2 {
        return None;
    }
    let xs: Vec<f64> = points.iter().map(|(r, _)| (1.0 + r * r).sqrt().ln()).collect();
    let ys: Vec<f64> = points.iter().map(|(_, v)| v.max(f64::MIN_POSITIVE).ln()).collect();
    let k = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / k;
    let my = ys.iter().sum::<f64>() / k;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

#[cfg(test)]
mod tests {
    use num_complex::Complex64;

    use super::*;

    fn sample(z: [f64; 2], y: [f64; 2], v: f64) -> GaborMatrixSample {
        GaborMatrixSample { z: z.to_vec(), y: y.to_vec(), direct_value: Complex64::new(v, 0.0), identity_magnitude: None }
    }

    #[test]
    fn diagonal_unit_sample_gives_unit_constant() {
        for n in [0, 1, 3] {
            let fit = decay_fit(&[sample([0.0, 0.0], [0.0, 0.0], 1.0)], 0.0, n, Tau::weyl()).unwrap();
            assert_eq!(fit.c, 1.0);
            assert!(fit.slope.is_none());
        }
        assert!(decay_fit(&[], 0.0, 1, Tau::weyl()).is_err());
    }

    #[test]
    fn power_law_slope_is_recovered() {
        let samples: Vec<_> = [2.0, 4.0, 8.0]
            .iter()
            .map(|&r: &f64| sample([0.0, 0.0], [r, 0.0], (1.0 + r * r).powf(-3.0)))
            .collect();
        let fit = decay_fit(&samples, 0.0, 1, Tau::new(0.0).unwrap()).unwrap();
        assert!((fit.slope.unwrap() + 6.0).abs() < 1e-12);
        assert!(fit.corollary_c.is_none());
    }

    #[test]
    fn bounds_examples() {
        let z = [1.0, 0.0];
        let y = [1.0, 2.0];
        let b = bound_value(&z, &y, Tau::weyl(), 2.0, 1);
        assert!((b - 3.0 / 5.0).abs() < 1e-15);
        let c = corollary_bound(&z, &y, -2.0, 1);
        assert!((c - 1.0 / 9.0 / 5.0).abs() < 1e-15);
    }
}
