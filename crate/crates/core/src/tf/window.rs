use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{GridFunction, GridSpec};

/// Analysis window with its cached L² norm.
#[derive(Clone, Debug)]
pub struct Window {
    g: GridFunction,
    l2norm: f64,
}

impl Window {
    pub fn new(g: GridFunction) -> Result<Self> {
        let l2norm = g.l2_norm();
        if !(l2norm > 0.0 && l2norm.is_finite()) {
            return Err(Error::invalid("window must be non-zero with finite norm"));
        }
        Ok(Window { g, l2norm })
    }

    /// `2^{d/4} e^{-π|t|²}`, unit L² norm on ℝ^d.
    pub fn gaussian(spec: GridSpec) -> Self {
        Self::gaussian_with_width(spec, 1.0)
    }

    /// `2^{d/4} s^{-d/2} e^{-π|t|²/s²}`, unit L² norm for every width `s`.
    pub fn gaussian_with_width(spec: GridSpec, width: f64) -> Self {
        let c = 2f64.powf(spec.d as f64 / 4.0) / width.powf(spec.d as f64 / 2.0);
        let g = GridFunction::from_fn(spec, |x| {
            let r2: f64 = x.iter().map(|v| v * v).sum();
            Complex64::new(c * (-PI * r2 / (width * width)).exp(), 0.0)
        });
        Window::new(g).expect("gaussian window is non-zero")
    }

    pub fn function(&self) -> &GridFunction {
        &self.g
    }

    pub fn spec(&self) -> &GridSpec {
        self.g.spec()
    }

    pub fn l2norm(&self) -> f64 {
        self.l2norm
    }
}

/// Integer translation `g(y − k h)` with zero fill outside the box.
pub(crate) fn translate(g: &GridFunction, shift: &[i64]) -> GridFunction {
    let spec = *g.spec();
    if shift.iter().all(|&s| s == 0) {
        return g.clone();
    }
    let mut out = GridFunction::zeros(spec);
    let mut idx = vec![0; spec.d];
    let mut src = vec![0; spec.d];
    let n = spec.n as i64;
    let values = g.samples();
    for (flat, v) in out.samples_mut().iter_mut().enumerate() {
        spec.unravel(flat, &mut idx);
        let mut inside = true;
        for k in 0..spec.d {
            let j = idx[k] as i64 - shift[k];
            if j < 0 || j >= n {
                inside = false;
                break;
            }
            src[k] = j as usize;
        }
        if inside {
            *v = values[spec.ravel(&src)];
        }
    }
    out
}

/// Snaps a translation to whole grid steps; returns the steps and the largest
/// per-axis snap distance.
pub(crate) fn snap_translation(spec: &GridSpec, x: &[f64]) -> (Vec<i64>, f64) {
    let h = spec.spacing();
    let steps: Vec<i64> = x.iter().map(|v| (v / h).round() as i64).collect();
    let snap = x
        .iter()
        .zip(&steps)
        .map(|(v, &s)| (v - s as f64 * h).abs())
        .fold(0.0, f64::max);
    (steps, snap)
}

/// `π(z) g = M_{z₂} T_{z₁} g`, i.e. samples of `e^{2πi z₂·y} g(y − z₁)`.
///
/// `z` holds the `d` position coordinates followed by the `d` frequency
/// coordinates. The translation is snapped to the grid; the snap distance is
/// returned alongside the shifted function.
pub fn tf_shift(g: &GridFunction, z: &[f64]) -> Result<(GridFunction, f64)> {
    let spec = *g.spec();
    if z.len() != 2 * spec.d {
        return Err(Error::invalid(format!(
            "phase-space point needs {} coordinates, got {}",
            2 * spec.d,
            z.len()
        )));
    }
    let (steps, snap) = snap_translation(&spec, &z[..spec.d]);
    let mut out = translate(g, &steps);
    let omega = &z[spec.d..];
    if omega.iter().any(|&w| w != 0.0) {
        let mut idx = vec![0; spec.d];
        for (flat, v) in out.samples_mut().iter_mut().enumerate() {
            spec.unravel(flat, &mut idx);
            let phase: f64 = idx
                .iter()
                .zip(omega)
                .map(|(&j, &w)| w * spec.coordinate(j))
                .sum();
            *v *= Complex64::from_polar(1.0, 2.0 * PI * phase);
        }
    }
    Ok((out, snap))
}

/// `π(z) g` with the translation carried out by band-limited periodic
/// interpolation instead of snapping, so off-node positions are exact for
/// well-resolved windows that vanish near the box edge.
pub fn tf_shift_interpolated(g: &GridFunction, z: &[f64]) -> Result<GridFunction> {
    let spec = *g.spec();
    if z.len() != 2 * spec.d {
        return Err(Error::invalid(format!(
            "phase-space point needs {} coordinates, got {}",
            2 * spec.d,
            z.len()
        )));
    }
    let shape = spec.shape();
    let h = spec.spacing();
    let mut values = g.samples().to_vec();
    for axis in 0..spec.d {
        crate::fft::shift_axis(&mut values, &shape, axis, z[axis] / h);
    }
    let mut out = GridFunction::from_samples(spec, values)?;
    let omega = &z[spec.d..];
    if omega.iter().any(|&w| w != 0.0) {
        let mut idx = vec![0; spec.d];
        for (flat, v) in out.samples_mut().iter_mut().enumerate() {
            spec.unravel(flat, &mut idx);
            let phase: f64 = idx.iter().zip(omega).map(|(&j, &w)| w * spec.coordinate(j)).sum();
            *v *= Complex64::from_polar(1.0, 2.0 * PI * phase);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec() -> GridSpec {
        GridSpec::new(1, 8.0, 1024).unwrap()
    }

    #[test]
    fn gaussian_window_is_normalized() {
        let w = Window::gaussian(spec());
        assert!((w.l2norm() - 1.0).abs() < 1e-13);
        let w2 = Window::gaussian_with_width(GridSpec::new(2, 6.0, 96).unwrap(), 1.5);
        assert!((w2.l2norm() - 1.0).abs() < 1e-12);
        assert!(Window::new(GridFunction::zeros(spec())).is_err());
    }

    #[test]
    fn zero_shift_is_identity() {
        let w = Window::gaussian(spec());
        let (s, snap) = tf_shift(w.function(), &[0.0, 0.0]).unwrap();
        assert_eq!(&s, w.function());
        assert_eq!(snap, 0.0);
    }

    #[test]
    fn shift_preserves_norm() {
        let w = Window::gaussian(spec());
        for z in [[1.0, 1.0], [-3.3, 2.5], [5.0, -7.25]] {
            let (s, snap) = tf_shift(w.function(), &z).unwrap();
            assert!(snap <= spec().spacing() / 2.0 + 1e-15);
            assert!((s.l2_norm() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn gaussian_overlap_matches_closed_form() {
        // ⟨π(z)g, g⟩ = e^{πi z₁z₂} e^{-π|z|²/2} for g = 2^{1/4} e^{-πt²}
        let w = Window::gaussian(spec());
        let z = [1.0, 1.0];
        let (s, _) = tf_shift(w.function(), &z).unwrap();
        let ip = s.inner(w.function()).unwrap();
        let expect = Complex64::from_polar((-PI).exp(), PI);
        assert!((ip - expect).norm() < 1e-6, "{ip} vs {expect}");
        assert!((ip - expect).norm() < 1e-12);
    }

    #[test]
    fn interpolated_shift_hits_off_node_positions() {
        let w = Window::gaussian(spec());
        let z = [0.737, -1.3];
        let s = tf_shift_interpolated(w.function(), &z).unwrap();
        let c = 2f64.powf(0.25);
        let expect = GridFunction::from_fn(spec(), |x| {
            Complex64::from_polar(c * (-PI * (x[0] - z[0]).powi(2)).exp(), 2.0 * PI * z[1] * x[0])
        });
        assert!(s.sub(&expect).unwrap().max_abs() < 1e-12);
        let (snapped, _) = tf_shift(w.function(), &[1.0, 0.5]).unwrap();
        let exact = tf_shift_interpolated(w.function(), &[1.0, 0.5]).unwrap();
        assert!(snapped.sub(&exact).unwrap().max_abs() < 1e-14);
    }
}
