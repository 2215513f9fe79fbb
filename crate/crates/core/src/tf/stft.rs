use std::io::Write;

use num_complex::Complex64;
use rayon::prelude::*;

use super::phase_grid::{bin_multiple, PhaseGrid};
use super::window::{snap_translation, translate, Window};
use crate::error::{Error, Result};
use crate::fft::{bin, fft_nd};
use crate::grid::{GridFunction, GridSpec};

/// Samples of `V_g f` on a [`PhaseGrid`], stored x-major: the value at
/// position node `i` and frequency node `k` sits at `i * w_count + k`.
#[derive(Clone, Debug)]
pub struct STFTTable {
    grid: PhaseGrid,
    spec: GridSpec,
    values: Vec<Complex64>,
    /// Largest distance between a requested position node and the grid node
    /// the window was actually translated to.
    snap: f64,
}

impl STFTTable {
    pub fn from_values(grid: PhaseGrid, spec: GridSpec, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::invalid(format!(
                "table needs {} values, got {}",
                grid.len(),
                values.len()
            )));
        }
        Ok(STFTTable { grid, spec, values, snap: 0.0 })
    }

    pub fn zeros(grid: PhaseGrid, spec: GridSpec) -> Self {
        let len = grid.len();
        STFTTable { grid, spec, values: vec![Complex64::new(0.0, 0.0); len], snap: 0.0 }
    }

    pub fn grid(&self) -> &PhaseGrid {
        &self.grid
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

    pub fn snap(&self) -> f64 {
        self.snap
    }

    pub fn get(&self, x_flat: usize, w_flat: usize) -> Complex64 {
        self.values[x_flat * self.grid.w_count() + w_flat]
    }

    /// Phase-space coordinates `(x, ω)` of flat table entry `flat`.
    pub fn node(&self, flat: usize) -> Vec<f64> {
        let wc = self.grid.w_count();
        let mut z = self.grid.x_node(flat / wc);
        z.extend(self.grid.w_node(flat % wc));
        z
    }

    /// Rows `x…, ω…, re, im, |value|` preceded by a `# {json}` metadata line.
    pub fn write_csv<W: Write>(&self, mut out: W, meta: &serde_json::Value) -> Result<()> {
        writeln!(out, "# {}", serde_json::to_string(meta)?)?;
        let d = self.grid.dim();
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

/// Bin slot for every frequency node plus the sign `(-1)^{Σ l m}` that moves
/// the DFT phase reference from `y = -L` to `y = 0`.
fn frequency_slots(grid: &PhaseGrid, spec: &GridSpec) -> Result<Vec<(usize, f64)>> {
    let m = bin_multiple(spec, grid.b)? as i64;
    let n = spec.n;
    let half = n as i64 / 2;
    (0..grid.w_count())
        .map(|k| {
            let idx = grid.w_index(k);
            let mut slot = 0;
            let mut parity = 0i64;
            for &l in &idx {
                let b = l * m;
                if b < -half || b >= half {
                    return Err(Error::invalid(format!(
                        "frequency node {} lies beyond the Nyquist limit {}",
                        l as f64 * grid.b,
                        spec.nyquist()
                    )));
                }
                slot = slot * n + bin(b, n);
                parity += b;
            }
            Ok((slot, if parity.rem_euclid(2) == 0 { 1.0 } else { -1.0 }))
        })
        .collect()
}

/// `V_g f(x, ω) = ⟨f, M_ω T_x g⟩`, one n-dimensional DFT of `f · conj(T_x g)`
/// per position node.
pub fn stft(f: &GridFunction, g: &Window, grid: &PhaseGrid) -> Result<STFTTable> {
    let spec = *f.spec();
    spec.check_same(g.spec())?;
    if grid.dim() != spec.d {
        return Err(Error::invalid("phase grid dimension differs from the sample grid"));
    }
    let slots = frequency_slots(grid, &spec)?;
    let scale = spec.cell_volume();
    let shape = spec.shape();
    let conj_g: Vec<Complex64> = g.function().samples().iter().map(|v| v.conj()).collect();
    let conj_g = GridFunction::from_samples(spec, conj_g)?;

    let rows: Vec<(Vec<Complex64>, f64)> = (0..grid.x_count())
        .into_par_iter()
        .map(|i| {
            let (steps, snap) = snap_translation(&spec, &grid.x_node(i));
            let tg = translate(&conj_g, &steps);
            let mut buf: Vec<Complex64> =
                f.samples().iter().zip(tg.samples()).map(|(a, b)| a * b).collect();
            fft_nd(&mut buf, &shape, false);
            let row = slots.iter().map(|&(s, sign)| buf[s] * (sign * scale)).collect();
            (row, snap)
        })
        .collect();

    let mut values = Vec::with_capacity(grid.len());
    let mut snap: f64 = 0.0;
    for (row, s) in rows {
        values.extend(row);
        snap = snap.max(s);
    }
    Ok(STFTTable { grid: grid.clone(), spec, values, snap })
}

/// Output of [`istft`]: the reconstructed samples and any density warnings.
#[derive(Clone, Debug)]
pub struct Reconstruction {
    pub function: GridFunction,
    pub warnings: Vec<String>,
}

/// Riemann-sum inversion `(a b)^d ‖g‖⁻² Σ_z V_g f(z) π(z) g`.
pub fn istft(table: &STFTTable, g: &Window) -> Result<Reconstruction> {
    let spec = table.spec;
    spec.check_same(g.spec())?;
    let grid = &table.grid;
    let slots = frequency_slots(grid, &spec)?;
    let shape = spec.shape();
    let weight = grid.cell_volume() / (g.l2norm() * g.l2norm());
    let wc = grid.w_count();

    let partials: Vec<Vec<Complex64>> = (0..grid.x_count())
        .into_par_iter()
        .map(|i| {
            let row = &table.values[i * wc..(i + 1) * wc];
            let mut buf = vec![Complex64::new(0.0, 0.0); spec.len()];
            for (&(s, sign), v) in slots.iter().zip(row) {
                buf[s] += v * sign;
            }
            fft_nd(&mut buf, &shape, true);
            let (steps, _) = snap_translation(&spec, &grid.x_node(i));
            let tg = translate(g.function(), &steps);
            buf.iter_mut().zip(tg.samples()).for_each(|(b, t)| *b *= t);
            buf
        })
        .collect();

    let mut out = vec![Complex64::new(0.0, 0.0); spec.len()];
    for p in &partials {
        out.iter_mut().zip(p).for_each(|(o, v)| *o += v);
    }
    out.iter_mut().for_each(|v| *v *= weight);

    let mut warnings = Vec::new();
    if let Some(w) = grid.frame_density_warning() {
        warnings.push(w);
    }
    if table.snap > 0.0 {
        warnings.push(format!("window translations snapped by up to {:.3e}", table.snap));
    }
    Ok(Reconstruction { function: GridFunction::from_samples(spec, out)?, warnings })
}

/// `V_g f` at a single phase-space point `z = (x, ω)`, by direct quadrature.
/// Off-lattice companion of [`stft`]; `x` is snapped to the sample grid.
pub fn stft_point(f: &GridFunction, g: &Window, z: &[f64]) -> Result<Complex64> {
    let spec = *f.spec();
    spec.check_same(g.spec())?;
    let (shifted, _) = super::window::tf_shift(g.function(), z)?;
    f.inner(&shifted)
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;
    use crate::tf::window::tf_shift;

    fn spec() -> GridSpec {
        GridSpec::new(1, 8.0, 512).unwrap()
    }

    fn gaussian_at(spec: GridSpec, c: f64) -> GridFunction {
        GridFunction::from_fn(spec, |x| Complex64::new((-PI * (x[0] - c).powi(2)).exp(), 0.0))
    }

    #[test]
    fn zero_function_gives_zero_table() {
        let s = spec();
        let g = Window::gaussian(s);
        let grid = PhaseGrid::default_for(&s);
        let t = stft(&GridFunction::zeros(s), &g, &grid).unwrap();
        assert!(t.values().iter().all(|v| v.norm() == 0.0));
        let r = istft(&STFTTable::zeros(grid, s), &g).unwrap();
        assert_eq!(r.function.max_abs(), 0.0);
    }

    #[test]
    fn gaussian_ambiguity_closed_form() {
        let s = spec();
        let g = Window::gaussian(s);
        let grid = PhaseGrid::default_for(&s);
        let t = stft(g.function(), &g, &grid).unwrap();
        let mut worst: f64 = 0.0;
        for flat in 0..grid.len() {
            let z = t.node(flat);
            let expect = (-PI * (z[0] * z[0] + z[1] * z[1]) / 2.0).exp();
            worst = worst.max((t.values()[flat].norm() - expect).abs());
        }
        assert!(worst < 1e-6, "{worst}");
    }

    #[test]
    fn table_matches_pointwise_inner_products() {
        let s = spec();
        let g = Window::gaussian(s);
        let f = gaussian_at(s, 0.7);
        let grid = PhaseGrid::default_for(&s);
        let t = stft(&f, &g, &grid).unwrap();
        for flat in [0, 17, grid.len() / 2 + 3, grid.len() - 5] {
            let direct = stft_point(&f, &g, &t.node(flat)).unwrap();
            assert!((direct - t.values()[flat]).norm() < 1e-12);
        }
    }

    #[test]
    fn covariance_under_time_frequency_shift() {
        let s = spec();
        let g = Window::gaussian(s);
        let grid = PhaseGrid::default_for(&s);
        let f = gaussian_at(s, -0.4);
        let ja = 4i64;
        let lb = 2i64;
        let w = [ja as f64 * grid.a, lb as f64 * grid.b];
        let (fw, snap) = tf_shift(&f, &w).unwrap();
        assert_eq!(snap, 0.0);
        let a = stft(&f, &g, &grid).unwrap();
        let b = stft(&fw, &g, &grid).unwrap();
        let wc = grid.w_count() as i64;
        let xc = grid.x_count() as i64;
        let mut worst: f64 = 0.0;
        for i in 0..xc - ja {
            for k in 0..wc - lb {
                let lhs = b.get((i + ja) as usize, (k + lb) as usize).norm();
                let rhs = a.get(i as usize, k as usize).norm();
                worst = worst.max((lhs - rhs).abs());
            }
        }
        assert!(worst < 1e-8, "{worst}");
    }

    #[test]
    fn inversion_at_default_density() {
        let s = GridSpec::new(1, 12.0, 2048).unwrap();
        let g = Window::gaussian(s);
        let f = GridFunction::from_fn(s, |x| {
            Complex64::from_polar((-PI * (x[0] - 1.0).powi(2) / 2.0).exp(), 3.0 * x[0])
        });
        let grid = PhaseGrid::default_for(&s);
        let r = istft(&stft(&f, &g, &grid).unwrap(), &g).unwrap();
        assert!(r.warnings.is_empty());
        let err = r.function.relative_error(&f).unwrap();
        assert!(err < 1e-6, "{err}");
    }

    #[test]
    fn inversion_error_shrinks_under_refinement() {
        let s = GridSpec::new(1, 8.0, 1024).unwrap();
        let g = Window::gaussian(s);
        let f = gaussian_at(s, 0.5);
        let mut prev = f64::INFINITY;
        for step in [1.0, 0.5, 0.25] {
            let grid = PhaseGrid::with_target_steps(&s, step, step).unwrap();
            let r = istft(&stft(&f, &g, &grid).unwrap(), &g).unwrap();
            let err = r.function.relative_error(&f).unwrap();
            assert!(err < prev, "{err} !< {prev} at step {step}");
            prev = err;
        }
    }

    #[test]
    fn rejects_mismatched_grids() {
        let g = Window::gaussian(spec());
        let f = GridFunction::zeros(GridSpec::new(1, 8.0, 256).unwrap());
        assert!(matches!(
            stft(&f, &g, &PhaseGrid::default_for(&spec())),
            Err(Error::GridMismatch(_))
        ));
    }

    #[test]
    fn table_csv_has_header_and_rows() {
        let s = GridSpec::new(1, 4.0, 32).unwrap();
        let g = Window::gaussian(s);
        let grid = PhaseGrid::with_target_steps(&s, 1.0, 1.0).unwrap();
        let t = stft(g.function(), &g, &grid).unwrap();
        let mut out = Vec::new();
        t.write_csv(&mut out, &serde_json::json!({"k": 1})).unwrap();
        let text = String::from_utf8(out).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert!(lines[0].starts_with("# {"));
        assert_eq!(lines[1], "x0,w0,re,im,abs");
        assert_eq!(lines.len(), 2 + grid.len());
    }
}
