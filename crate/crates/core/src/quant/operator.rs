use num_complex::Complex64;
use rayon::prelude::*;

use super::phase::PhaseSpaceFunction;
use super::symbol::{Symbol, SymbolBackend};
use super::wigner::Tau;
use crate::error::{Error, Result};
use crate::fft::{bin, fft, shift_axis, signed_index};
use crate::grid::{GridFunction, GridSpec};

/// Largest denominator for which `τ = p/q` is handled by grouping kernel rows
/// that share the quantization point `(1−τ)x + τy`.
pub const MAX_TAU_DENOMINATOR: u64 = 16;

/// Relative size of the wrapped-around kernel tail above which the symbol is
/// reported as unresolved by the frequency grid.
const RESOLUTION_TOL: f64 = 1e-8;

/// Dense discretization of `Op_τ(σ)` in kernel form
/// `K(x, y) = ∫ e^{2πi(x−y)ω} σ((1−τ)x + τy, ω) dω`, with the `ω` integral
/// taken over the DFT bins of the sample grid.
#[derive(Clone, Debug)]
pub struct TauOperator {
    spec: GridSpec,
    tau: Tau,
    /// Row-major `n × n`, already multiplied by the quadrature weight `h`.
    kernel: Vec<Complex64>,
    warnings: Vec<String>,
}

impl TauOperator {
    pub fn new(symbol: &Symbol, tau: Tau, spec: GridSpec) -> Result<Self> {
        if spec.d != 1 {
            return Err(Error::Unsupported(format!(
                "τ-operators are assembled in one space dimension, got d = {}",
                spec.d
            )));
        }
        let n = spec.n;
        let h = spec.spacing();
        let bin_w = spec.frequency_spacing();
        let omegas: Vec<f64> = (0..n).map(|s| signed_index(s, n) as f64 * bin_w).collect();
        // `columns(x)` = inverse DFT over ω of σ(x, ω), scaled by `h / 2L`,
        // so that K(j, k) = columns(p_jk)[(j − k) mod n].
        let transform = |col: &mut Vec<Complex64>| {
            fft(col, true);
            col.iter_mut().for_each(|v| *v *= h * bin_w);
        };

        let mut kernel = vec![Complex64::new(0.0, 0.0); n * n];
        let mut tail: f64 = 0.0;
        let mut peak: f64 = 0.0;
        let mut track = |col: &[Complex64]| {
            for (r, v) in col.iter().enumerate() {
                let a = v.norm();
                peak = peak.max(a);
                if signed_index(r, n).unsigned_abs() as usize >= n / 2 - n / 16 {
                    tail = tail.max(a);
                }
            }
        };

        match tau.rational(MAX_TAU_DENOMINATOR) {
            Some((p, q)) => {
                let (p, q) = (p as usize, q as usize);
                let source = ColumnSource::new(symbol, &spec, q, &omegas)?;
                let count = q * (n - 1) + 1;
                let cols: Vec<Vec<Complex64>> = (0..count)
                    .into_par_iter()
                    .map(|s| {
                        let mut col = source.column(s)?;
                        transform(&mut col);
                        Ok(col)
                    })
                    .collect::<Result<_>>()?;
                for c in &cols {
                    track(c);
                }
                kernel
                    .par_chunks_mut(n)
                    .enumerate()
                    .for_each(|(j, row)| {
                        for (k, v) in row.iter_mut().enumerate() {
                            let s = (q - p) * j + p * k;
                            *v = cols[s][bin(j as i64 - k as i64, n)];
                        }
                    });
            }
            None => {
                if symbol.is_sampled() {
                    return Err(Error::Unsupported(
                        "sampled symbols need a rational τ with small denominator".into(),
                    ));
                }
                let t = tau.value();
                let rows: Vec<(Vec<Complex64>, f64, f64)> = (0..n)
                    .into_par_iter()
                    .map(|j| {
                        let mut row = vec![Complex64::new(0.0, 0.0); n];
                        let (mut tl, mut pk) = (0.0f64, 0.0f64);
                        for (k, out) in row.iter_mut().enumerate() {
                            let x = (1.0 - t) * spec.coordinate(j) + t * spec.coordinate(k);
                            let mut col: Vec<Complex64> = omegas
                                .iter()
                                .map(|&w| symbol.eval(&[x, w]))
                                .collect::<Result<_>>()?;
                            transform(&mut col);
                            for (r, v) in col.iter().enumerate() {
                                pk = pk.max(v.norm());
                                if signed_index(r, n).unsigned_abs() as usize >= n / 2 - n / 16 {
                                    tl = tl.max(v.norm());
                                }
                            }
                            *out = col[bin(j as i64 - k as i64, n)];
                        }
                        Ok((row, tl, pk))
                    })
                    .collect::<Result<_>>()?;
                for (j, (row, tl, pk)) in rows.into_iter().enumerate() {
                    kernel[j * n..(j + 1) * n].copy_from_slice(&row);
                    tail = tail.max(tl);
                    peak = peak.max(pk);
                }
            }
        }

        let mut warnings = Vec::new();
        if peak > 0.0 && tail > RESOLUTION_TOL * peak {
            warnings.push(format!(
                "symbol varies below the frequency resolution: kernel tail {:.2e} relative to peak",
                tail / peak
            ));
        }
        Ok(TauOperator { spec, tau, kernel, warnings })
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn tau(&self) -> Tau {
        self.tau
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    pub fn kernel(&self) -> &[Complex64] {
        &self.kernel
    }

    pub fn apply(&self, f: &GridFunction) -> Result<GridFunction> {
        self.spec.check_same(f.spec())?;
        let n = self.spec.n;
        let fs = f.samples();
        let out: Vec<Complex64> = self
            .kernel
            .par_chunks(n)
            .map(|row| row.iter().zip(fs).map(|(k, v)| k * v).sum())
            .collect();
        GridFunction::from_samples(self.spec, out)
    }
}

/// `Op_τ(σ) f`.
pub fn opt_apply(symbol: &Symbol, tau: Tau, f: &GridFunction) -> Result<GridFunction> {
    TauOperator::new(symbol, tau, *f.spec())?.apply(f)
}

/// `σ(x_s, ω)` over the DFT bins (FFT slot order) at the quantization points
/// `x_s = -L + s h / q`.
struct ColumnSource<'a> {
    symbol: &'a Symbol,
    spec: GridSpec,
    q: usize,
    omegas: &'a [f64],
    /// For sampled symbols: `q` copies translated by `r h / q`, `r < q`.
    shifted: Vec<PhaseSpaceFunction>,
}

impl<'a> ColumnSource<'a> {
    fn new(symbol: &'a Symbol, spec: &GridSpec, q: usize, omegas: &'a [f64]) -> Result<Self> {
        let mut shifted = Vec::new();
        if let SymbolBackend::Sampled(table) = &symbol.backend {
            table.spec().check_same(spec)?;
            let shape = [spec.n, spec.n];
            for r in 0..q {
                let mut values = table.values().to_vec();
                shift_axis(&mut values, &shape, 0, -(r as f64) / q as f64);
                shifted.push(PhaseSpaceFunction::from_values(*spec, values)?);
            }
        }
        Ok(ColumnSource { symbol, spec: *spec, q, omegas, shifted })
    }

    fn column(&self, s: usize) -> Result<Vec<Complex64>> {
        let n = self.spec.n;
        if self.shifted.is_empty() {
            let x = -self.spec.half_width + s as f64 * self.spec.spacing() / self.q as f64;
            return self.omegas.iter().map(|&w| self.symbol.eval(&[x, w])).collect();
        }
        let table = &self.shifted[s % self.q];
        let j = s / self.q;
        Ok((0..n)
            .map(|slot| {
                let centred = (signed_index(slot, n) + (n / 2) as i64) as usize;
                table.values()[j * n + centred]
            })
            .collect())
    }
}

/// `⟨σ, W⟩ = ∫∫ σ conj(W)` on the phase-space grid.
pub fn symbol_pairing(symbol: &Symbol, w: &PhaseSpaceFunction) -> Result<Complex64> {
    symbol.tabulate(w.spec())?.inner(w)
}

/// Applies the Fourier multiplier `m(ω)` through the DFT of the sample grid.
pub fn fourier_multiplier<F>(f: &GridFunction, m: F) -> Result<GridFunction>
where
    F: Fn(f64) -> Complex64,
{
    let spec = *f.spec();
    if spec.d != 1 {
        return Err(Error::Unsupported("multiplier reference is one-dimensional".into()));
    }
    let n = spec.n;
    let mut buf = f.samples().to_vec();
    fft(&mut buf, false);
    for (slot, v) in buf.iter_mut().enumerate() {
        *v *= m(signed_index(slot, n) as f64 * spec.frequency_spacing());
    }
    fft(&mut buf, true);
    buf.iter_mut().for_each(|v| *v /= n as f64);
    GridFunction::from_samples(spec, buf)
}
