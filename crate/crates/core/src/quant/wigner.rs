use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::phase::PhaseSpaceFunction;
use crate::error::{Error, Result};
use crate::fft::{fft_nd, shift_axis, signed_index};
use crate::grid::GridFunction;

/// Quantization parameter `τ ∈ [0, 1]`; `τ = 1/2` is the Weyl case.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Tau(f64);

impl Tau {
    pub fn new(tau: f64) -> Result<Self> {
        if (0.0..=1.0).contains(&tau) {
            Ok(Tau(tau))
        } else {
            Err(Error::invalid(format!("τ must lie in [0, 1], got {tau}")))
        }
    }

    pub fn weyl() -> Self {
        Tau(0.5)
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// `(p, q)` with `τ = p/q` in lowest terms and `q ≤ max_den`, if any.
    pub fn rational(self, max_den: u64) -> Option<(u64, u64)> {
        (1..=max_den).find_map(|q| {
            let p = (self.0 * q as f64).round();
            ((self.0 * q as f64 - p).abs() < 1e-12).then_some((p as u64, q))
        })
    }
}

impl TryFrom<f64> for Tau {
    type Error = Error;
    fn try_from(v: f64) -> Result<Self> {
        Tau::new(v)
    }
}

impl From<Tau> for f64 {
    fn from(t: Tau) -> f64 {
        t.0
    }
}

/// `T_τ(z, y) = ((1−τ) z₁ + τ y₁, τ z₂ + (1−τ) y₂)`.
pub fn t_tau(z: &[f64], y: &[f64], tau: Tau) -> Vec<f64> {
    let d = z.len() / 2;
    let t = tau.value();
    (0..2 * d)
        .map(|k| {
            if k < d {
                (1.0 - t) * z[k] + t * y[k]
            } else {
                t * z[k] + (1.0 - t) * y[k]
            }
        })
        .collect()
}

/// `J(z) = (z₂, −z₁)`.
pub fn j_map(z: &[f64]) -> Vec<f64> {
    let d = z.len() / 2;
    let mut out = z[d..].to_vec();
    out.extend(z[..d].iter().map(|v| -v));
    out
}

/// Cross-τ-Wigner distribution
/// `W_τ(f, g)(x, ω) = ∫ e^{-2πi y·ω} f(x + τy) conj(g(x − (1−τ)y)) dy`
/// on the phase-space grid of the common sample grid.
///
/// The lag `y` runs over the `n^d` signed multiples of `h`; off-node values
/// `f(x + τy)` come from band-limited periodic interpolation.
pub fn tau_wigner(f: &GridFunction, g: &GridFunction, tau: Tau) -> Result<PhaseSpaceFunction> {
    let spec = *f.spec();
    spec.check_same(g.spec())?;
    let d = spec.d;
    let n = spec.n;
    let len = spec.len();
    let shape = spec.shape();
    let t = tau.value();

    // Column `k` (FFT slot order) holds f(x + τ y_k) conj(g(x − (1−τ) y_k)) over x.
    let columns: Vec<Vec<Complex64>> = (0..len)
        .into_par_iter()
        .map(|slot| {
            let mut fk = f.samples().to_vec();
            let mut gk = g.samples().to_vec();
            let mut rest = slot;
            let mut lag = vec![0i64; d];
            for axis in (0..d).rev() {
                lag[axis] = signed_index(rest % n, n);
                rest /= n;
            }
            for axis in 0..d {
                let k = lag[axis] as f64;
                shift_axis(&mut fk, &shape, axis, -t * k);
                shift_axis(&mut gk, &shape, axis, (1.0 - t) * k);
            }
            fk.iter().zip(&gk).map(|(a, b)| a * b.conj()).collect()
        })
        .collect();

    let scale = spec.cell_volume();
    let rows: Vec<Vec<Complex64>> = (0..len)
        .into_par_iter()
        .map(|j| {
            let mut buf: Vec<Complex64> = columns.iter().map(|c| c[j]).collect();
            fft_nd(&mut buf, &shape, false);
            let mut row = vec![Complex64::new(0.0, 0.0); len];
            for (slot, v) in buf.iter().enumerate() {
                let mut rest = slot;
                let mut centred = 0;
                let mut stride = 1;
                for _ in 0..d {
                    let m = signed_index(rest % n, n);
                    rest /= n;
                    centred += (m + (n / 2) as i64) as usize * stride;
                    stride *= n;
                }
                row[centred] = v * scale;
            }
            row
        })
        .collect();

    PhaseSpaceFunction::from_values(spec, rows.into_iter().flatten().collect())
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;
    use crate::grid::GridSpec;

    fn spec() -> GridSpec {
        GridSpec::new(1, 8.0, 256).unwrap()
    }

    fn gaussian(spec: GridSpec, c: f64, w: f64, k: f64) -> GridFunction {
        GridFunction::from_fn(spec, |x| {
            Complex64::from_polar((-PI * (x[0] - c).powi(2) / w).exp(), 2.0 * PI * k * x[0])
        })
    }

    #[test]
    fn tau_validation_and_rationals() {
        assert!(Tau::new(-0.1).is_err());
        assert!(Tau::new(1.1).is_err());
        assert_eq!(Tau::new(0.25).unwrap().rational(64), Some((1, 4)));
        assert_eq!(Tau::new(0.0).unwrap().rational(64), Some((0, 1)));
        assert_eq!(Tau::new(1.0 / 3.0).unwrap().rational(64), Some((1, 3)));
        assert_eq!(Tau::new(0.1234567).unwrap().rational(64), None);
    }

    #[test]
    fn t_tau_and_j_examples() {
        let half = Tau::weyl();
        assert_eq!(t_tau(&[1.5, -2.0], &[1.5, -2.0], half), vec![1.5, -2.0]);
        assert_eq!(t_tau(&[0.0, 0.0], &[2.0, 4.0], half), vec![1.0, 2.0]);
        assert_eq!(t_tau(&[1.0, 2.0], &[3.0, 4.0], Tau::new(0.0).unwrap()), vec![1.0, 4.0]);
        assert_eq!(j_map(&[1.0, 0.0]), vec![0.0, -1.0]);
        assert_eq!(j_map(&j_map(&[0.3, -0.7])), vec![-0.3, 0.7]);
        assert_eq!(j_map(&[0.0, 0.0]), vec![0.0, -0.0]);
    }

    #[test]
    fn weyl_wigner_of_real_gaussian_is_real() {
        let g = gaussian(spec(), 0.0, 1.0, 0.0);
        let w = tau_wigner(&g, &g, Tau::weyl()).unwrap();
        assert!(w.max_imag() < 1e-8, "{}", w.max_imag());
        // W(g,g)(x,ω) = √2 e^{-2π(x²+ω²)} for g = e^{-πx²}.
        let c = 2f64.sqrt();
        let err = w
            .values()
            .iter()
            .enumerate()
            .map(|(i, v)| {
                let z = w.node(i);
                (v.re - c * (-2.0 * PI * (z[0] * z[0] + z[1] * z[1])).exp()).abs()
            })
            .fold(0.0, f64::max);
        assert!(err < 1e-10, "{err}");
    }

    #[test]
    fn marginal_mass_is_the_squared_norm() {
        let f = gaussian(spec(), 0.8, 0.7, 1.5);
        let nf2 = f.l2_norm().powi(2);
        for t in [0.0, 0.25, 0.5, 1.0] {
            let w = tau_wigner(&f, &f, Tau::new(t).unwrap()).unwrap();
            let mass = w.integral();
            assert!((mass.re - nf2).abs() < 1e-6 * nf2 && mass.im.abs() < 1e-6, "{t}: {mass}");
        }
    }

    #[test]
    fn tau_zero_and_one_are_conjugate_swaps() {
        let f = gaussian(spec(), 0.5, 1.2, -1.0);
        let g = gaussian(spec(), -0.3, 0.8, 0.5);
        let w0 = tau_wigner(&f, &g, Tau::new(0.0).unwrap()).unwrap();
        let w1 = tau_wigner(&g, &f, Tau::new(1.0).unwrap()).unwrap();
        let err = w0
            .values()
            .iter()
            .zip(w1.values())
            .map(|(a, b)| (a - b.conj()).norm())
            .fold(0.0, f64::max);
        assert!(err < 1e-8, "{err}");
    }
}
