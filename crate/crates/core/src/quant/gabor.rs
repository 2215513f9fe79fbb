use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::operator::TauOperator;
use super::phase::PhaseSpaceFunction;
use super::symbol::Symbol;
use super::wigner::{j_map, t_tau, tau_wigner, Tau};
use crate::error::{Error, Result};
use crate::grid::GridFunction;
use crate::tf::{tf_shift_interpolated, Window};

/// Guard added to denominators of relative discrepancies.
pub const DIVISION_GUARD: f64 = 1e-12;

/// Grid cells from the edge inside which window mass triggers a warning.
const EDGE_CELLS: usize = 3;

/// One Gabor-matrix entry `⟨Op_τ(σ) π(z) g, π(y) g⟩` evaluated by both routes.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GaborMatrixSample {
    pub z: Vec<f64>,
    pub y: Vec<f64>,
    pub direct_value: Complex64,
    pub identity_magnitude: Option<f64>,
}

impl GaborMatrixSample {
    pub fn distance(&self) -> f64 {
        self.z.iter().zip(&self.y).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt()
    }

    /// `| |direct| − identity | / (identity + guard)`.
    pub fn discrepancy(&self) -> Option<f64> {
        self.identity_magnitude
            .map(|id| (self.direct_value.norm() - id).abs() / (id + DIVISION_GUARD))
    }
}

fn edge_warning(f: &GridFunction, what: &str) -> Option<String> {
    let edge = f.boundary_max(EDGE_CELLS);
    let peak = f.max_abs();
    (peak > 0.0 && edge > 1e-10 * peak)
        .then(|| format!("{what} has mass {edge:.2e} within {EDGE_CELLS} cells of the boundary"))
}

/// Direct route: the operator kernel is assembled once and `Op_τ(σ) π(z) g`
/// is reused for every `y`.
pub struct DirectRoute {
    op: TauOperator,
    g: GridFunction,
}

impl DirectRoute {
    pub fn new(symbol: &Symbol, tau: Tau, g: &Window) -> Result<Self> {
        Ok(DirectRoute { op: TauOperator::new(symbol, tau, *g.spec())?, g: g.function().clone() })
    }

    pub fn operator(&self) -> &TauOperator {
        &self.op
    }

    /// `(Op_τ(σ) π(z) g, warnings)`.
    pub fn column(&self, z: &[f64]) -> Result<(GridFunction, Vec<String>)> {
        let shifted = tf_shift_interpolated(&self.g, z)?;
        let warnings = edge_warning(&shifted, &format!("π({z:?})g")).into_iter().collect();
        Ok((self.op.apply(&shifted)?, warnings))
    }

    pub fn entry(&self, column: &GridFunction, y: &[f64]) -> Result<(Complex64, Vec<String>)> {
        let shifted = tf_shift_interpolated(&self.g, y)?;
        let warnings = edge_warning(&shifted, &format!("π({y:?})g")).into_iter().collect();
        Ok((column.inner(&shifted)?, warnings))
    }
}

/// Value and boundary warnings of a single direct-route entry.
#[derive(Clone, Debug)]
pub struct DirectEntry {
    pub value: Complex64,
    pub warnings: Vec<String>,
}

/// `⟨Op_τ(σ) π(z) g, π(y) g⟩` by discrete inner product.
pub fn gabor_matrix_direct(symbol: &Symbol, tau: Tau, g: &Window, z: &[f64], y: &[f64]) -> Result<DirectEntry> {
    let route = DirectRoute::new(symbol, tau, g)?;
    let (col, mut warnings) = route.column(z)?;
    let (value, w) = route.entry(&col, y)?;
    warnings.extend(w);
    warnings.extend(route.op.warnings().iter().cloned());
    Ok(DirectEntry { value, warnings })
}

/// Identity route: `|V_{Φ_τ} σ(T_τ(y, z), J(y − z))|` with `Φ_τ = W_τ(g, g)`.
pub struct IdentityRoute {
    tau: Tau,
    phi: PhaseSpaceFunction,
}

impl IdentityRoute {
    pub fn new(g: &Window, tau: Tau) -> Result<Self> {
        Ok(IdentityRoute { tau, phi: tau_wigner(g.function(), g.function(), tau)? })
    }

    pub fn window(&self) -> &PhaseSpaceFunction {
        &self.phi
    }

    /// Phase-space point and frequency at which the symbol's STFT is read.
    pub fn arguments(&self, z: &[f64], y: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let diff: Vec<f64> = y.iter().zip(z).map(|(a, b)| a - b).collect();
        // The centre is T_τ(y, z): with M(z, y) = ⟨Op π(z)g, π(y)g⟩ and the
        // Wigner convention used here the covariance lands on that order.
        (t_tau(y, z, self.tau), j_map(&diff))
    }

    /// `|V_{Φ_τ} σ(T_τ(y, z), J(y − z))|` for each tabulated symbol, sharing
    /// the translated window.
    pub fn magnitudes(&self, symbols: &[&PhaseSpaceFunction], z: &[f64], y: &[f64]) -> Result<Vec<f64>> {
        let (u, eta) = self.arguments(z, y);
        let moved = self.phi.translated(&u)?;
        symbols.iter().map(|s| Ok(phase_space_stft(s, &moved, &eta)?.norm())).collect()
    }
}

/// `Σ_λ σ(λ) conj(Ψ(λ)) e^{-2πi η·λ}` times the cell volume, where `Ψ` is an
/// already translated window.
pub fn phase_space_stft(sigma: &PhaseSpaceFunction, window: &PhaseSpaceFunction, eta: &[f64]) -> Result<Complex64> {
    let spec = *sigma.spec();
    spec.check_same(window.spec())?;
    let d = spec.d;
    if eta.len() != 2 * d {
        return Err(Error::invalid(format!("frequency needs {} coordinates", 2 * d)));
    }
    let n = spec.n;
    // Separable modulation e^{-2πi η·λ}: one table per phase-space axis.
    let tables: Vec<Vec<Complex64>> = (0..2 * d)
        .map(|axis| {
            (0..n)
                .map(|j| {
                    let c = if axis < d {
                        spec.coordinate(j)
                    } else {
                        (j as f64 - (n / 2) as f64) * spec.frequency_spacing()
                    };
                    Complex64::from_polar(1.0, -2.0 * PI * eta[axis] * c)
                })
                .collect()
        })
        .collect();
    let row = n.pow(d as u32);
    let sum: Complex64 = sigma
        .values()
        .par_chunks(row)
        .zip(window.values().par_chunks(row))
        .enumerate()
        .map(|(xi, (s, w))| {
            let xmod = axis_product(&tables[..d], xi, n);
            let inner: Complex64 = s
                .iter()
                .zip(w)
                .enumerate()
                .map(|(wi, (a, b))| a * b.conj() * axis_product(&tables[d..], wi, n))
                .sum();
            inner * xmod
        })
        .collect::<Vec<_>>()
        .into_iter()
        .sum();
    Ok(sum * sigma.cell_volume())
}

fn axis_product(tables: &[Vec<Complex64>], mut flat: usize, n: usize) -> Complex64 {
    let mut acc = Complex64::new(1.0, 0.0);
    for t in tables.iter().rev() {
        acc *= t[flat % n];
        flat /= n;
    }
    acc
}

/// `|⟨Op_τ(σ) π(z) g, π(y) g⟩|` through the STFT of the symbol.
pub fn gabor_matrix_identity(symbol: &Symbol, tau: Tau, g: &Window, z: &[f64], y: &[f64]) -> Result<f64> {
    let route = IdentityRoute::new(g, tau)?;
    let table = symbol.tabulate(g.spec())?;
    Ok(route.magnitudes(&[&table], z, y)?[0])
}

/// Pairs `(z, z + r u)` for `z` on a square lattice, unit directions `u` and
/// radii `r`, in one space dimension (phase space ℝ²).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RaySampling {
    pub z_points: Vec<Vec<f64>>,
    pub directions: Vec<Vec<f64>>,
    pub radii: Vec<f64>,
}

impl RaySampling {
    pub const DEFAULT_RADII: [f64; 6] = [0.0, 0.5, 1.0, 2.0, 4.0, 8.0];

    /// `z ∈ {-R, -R+s, …, R}²`, `count` directions at angles `2πk/count + offset`.
    pub fn lattice(half_width: f64, step: f64, count: usize, offset: f64, radii: Vec<f64>) -> Self {
        let per_axis = (half_width / step).round() as i64;
        let mut z_points = Vec::new();
        for i in -per_axis..=per_axis {
            for k in -per_axis..=per_axis {
                z_points.push(vec![i as f64 * step, k as f64 * step]);
            }
        }
        let directions = (0..count)
            .map(|k| {
                let th = 2.0 * PI * k as f64 / count as f64 + offset;
                vec![th.cos(), th.sin()]
            })
            .collect();
        RaySampling { z_points, directions, radii }
    }

    /// For each `z`, the `y` points in direction-major, radius-minor order;
    /// radius zero appears once.
    pub fn targets(&self, z: &[f64]) -> Vec<Vec<f64>> {
        let mut out = Vec::new();
        if self.radii.contains(&0.0) {
            out.push(z.to_vec());
        }
        for u in &self.directions {
            for &r in self.radii.iter().filter(|&&r| r != 0.0) {
                out.push(z.iter().zip(u).map(|(a, b)| a + r * b).collect());
            }
        }
        out
    }

    pub fn pair_count(&self) -> usize {
        self.z_points.len() * self.targets(&self.z_points[0]).len()
    }

    /// Largest coordinate magnitude reached by any `y`.
    pub fn reach(&self) -> f64 {
        let zmax = self
            .z_points
            .iter()
            .flat_map(|z| z.iter().map(|v| v.abs()))
            .fold(0.0, f64::max);
        zmax + self.radii.iter().cloned().fold(0.0, f64::max)
    }
}

/// Result of a matrix sweep.
#[derive(Clone, Debug)]
pub struct Sweep {
    pub samples: Vec<GaborMatrixSample>,
    pub warnings: Vec<String>,
}

impl Sweep {
    pub fn max_discrepancy(&self) -> Option<f64> {
        self.samples.iter().filter_map(|s| s.discrepancy()).fold(None, |acc, v| {
            Some(acc.map_or(v, |a: f64| a.max(v)))
        })
    }

    /// Rows `z…, y…, |direct|, identity, bound_value, ratio` with the bound
    /// `⟨T_τ(z,y)⟩^m / ⟨y−z⟩^{2N}`.
    pub fn write_csv<W: std::io::Write>(
        &self,
        mut out: W,
        meta: &serde_json::Value,
        tau: Tau,
        m: f64,
        n_order: u32,
    ) -> Result<()> {
        writeln!(out, "# {}", serde_json::to_string(meta)?)?;
        let d = self.samples.first().map_or(1, |s| s.z.len() / 2);
        let mut header: Vec<String> = Vec::new();
        for p in ["z", "y"] {
            header.extend((0..2 * d).map(|k| format!("{p}{k}")));
        }
        header.extend(["abs_direct", "identity", "bound_value", "ratio"].map(String::from));
        writeln!(out, "{}", header.join(","))?;
        for s in &self.samples {
            let bound = super::decay::bound_value(&s.z, &s.y, tau, m, n_order);
            let mut cells: Vec<String> = s.z.iter().chain(&s.y).map(|v| format!("{v:.17e}")).collect();
            cells.push(format!("{:.17e}", s.direct_value.norm()));
            cells.push(s.identity_magnitude.map_or("nan".into(), |v| format!("{v:.17e}")));
            cells.push(format!("{bound:.17e}"));
            cells.push(format!("{:.17e}", s.direct_value.norm() / bound));
            writeln!(out, "{}", cells.join(","))?;
        }
        Ok(())
    }
}

/// Samples the Gabor matrix along rays; the identity route is evaluated too
/// when `with_identity` is set.
pub fn gabor_sweep(
    symbol: &Symbol,
    tau: Tau,
    g: &Window,
    sampling: &RaySampling,
    with_identity: bool,
) -> Result<Sweep> {
    let direct = DirectRoute::new(symbol, tau, g)?;
    let identity = if with_identity {
        Some((IdentityRoute::new(g, tau)?, symbol.tabulate(g.spec())?))
    } else {
        None
    };
    let per_z: Vec<(Vec<GaborMatrixSample>, Vec<String>)> = sampling
        .z_points
        .par_iter()
        .map(|z| {
            let (col, mut warnings) = direct.column(z)?;
            let mut samples = Vec::new();
            for y in sampling.targets(z) {
                let (value, w) = direct.entry(&col, &y)?;
                warnings.extend(w);
                let identity_magnitude = match &identity {
                    Some((route, table)) => Some(route.magnitudes(&[table], z, &y)?[0]),
                    None => None,
                };
                samples.push(GaborMatrixSample { z: z.clone(), y, direct_value: value, identity_magnitude });
            }
            Ok((samples, warnings))
        })
        .collect::<Result<_>>()?;
    let mut samples = Vec::new();
    let mut warnings: Vec<String> = direct.operator().warnings().to_vec();
    for (s, w) in per_z {
        samples.extend(s);
        for msg in w {
            if !warnings.contains(&msg) {
                warnings.push(msg);
            }
        }
    }
    Ok(Sweep { samples, warnings })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridSpec;

    fn window() -> Window {
        Window::gaussian(GridSpec::new(1, 8.0, 256).unwrap())
    }

    #[test]
    fn unit_symbol_gives_gaussian_overlaps() {
        let g = window();
        let one = Symbol::one();
        let half = Tau::weyl();
        let e = gabor_matrix_direct(&one, half, &g, &[0.3, -0.2], &[0.3, -0.2]).unwrap();
        assert!((e.value.norm() - 1.0).abs() < 1e-8);
        for (z, y) in [([0.0, 0.0], [1.0, 0.5]), ([-0.5, 1.0], [0.7, -0.4]), ([1.0, 1.0], [1.0, 3.0])] {
            let e = gabor_matrix_direct(&one, half, &g, &z, &y).unwrap();
            let r2 = (z[0] - y[0]).powi(2) + (z[1] - y[1]).powi(2);
            assert!((e.value.norm() - (-PI * r2 / 2.0).exp()).abs() < 1e-6);
            assert!(e.warnings.is_empty(), "{:?}", e.warnings);
        }
    }

    #[test]
    fn routes_agree_for_weyl_quantization() {
        let g = window();
        let half = Tau::weyl();
        for sym in [Symbol::gauss(), Symbol::jbracket(-2.0), Symbol::one()] {
            for (z, y) in [([0.0, 0.0], [0.5, 0.0]), ([0.5, -1.0], [1.2, 0.3]), ([1.0, 1.0], [-0.5, 1.5])] {
                let d = gabor_matrix_direct(&sym, half, &g, &z, &y).unwrap().value.norm();
                let i = gabor_matrix_identity(&sym, half, &g, &z, &y).unwrap();
                assert!((d - i).abs() / (i + DIVISION_GUARD) < 1e-5, "{}: {d} vs {i}", sym.label);
            }
        }
    }

    #[test]
    fn identity_route_concentrates_on_the_diagonal() {
        // For σ ≡ 1 the ratio is exactly e^{π r²/2}: about 535 at r = 2.
        let g = window();
        let t = Tau::weyl();
        let on = gabor_matrix_identity(&Symbol::one(), t, &g, &[0.0, 0.0], &[0.0, 0.0]).unwrap();
        for r in [2.0f64, 2.5, 3.0] {
            let off = gabor_matrix_identity(&Symbol::one(), t, &g, &[0.0, 0.0], &[r, 0.0]).unwrap();
            let exact = (PI * r * r / 2.0).exp();
            assert!(((on / off) / exact - 1.0).abs() < 1e-6, "{r}: {}", on / off);
            if r > 2.0 {
                assert!(on >= 1e3 * off);
            }
        }
    }

    #[test]
    fn routes_agree_off_the_weyl_point() {
        let g = window();
        for tau in [0.0, 0.25, 0.75, 1.0] {
            let t = Tau::new(tau).unwrap();
            for (z, y) in [([0.5, -1.0], [1.2, 0.3]), ([0.3, 0.7], [-1.0, 2.5])] {
                let d = gabor_matrix_direct(&Symbol::gauss(), t, &g, &z, &y).unwrap().value.norm();
                let i = gabor_matrix_identity(&Symbol::gauss(), t, &g, &z, &y).unwrap();
                assert!((d - i).abs() / (i + DIVISION_GUARD) < 1e-10, "τ={tau}: {d} vs {i}");
            }
        }
    }

    #[test]
    fn weyl_magnitudes_are_symmetric() {
        let g = window();
        let sym = Symbol::jbracket(-2.0);
        let z = [0.4, -0.6];
        let y = [-0.3, 0.9];
        let a = gabor_matrix_direct(&sym, Tau::weyl(), &g, &z, &y).unwrap().value.norm();
        let b = gabor_matrix_direct(&sym, Tau::weyl(), &g, &y, &z).unwrap().value.norm();
        assert!((a - b).abs() < 1e-10 * a.max(1e-12));
    }

    #[test]
    fn ray_sampling_counts() {
        let s = RaySampling::lattice(1.0, 1.0, 8, 0.0, RaySampling::DEFAULT_RADII.to_vec());
        assert_eq!(s.z_points.len(), 9);
        assert_eq!(s.targets(&[0.0, 0.0]).len(), 1 + 8 * 5);
        assert_eq!(s.pair_count(), 9 * 41);
        assert!((s.reach() - 9.0).abs() < 1e-12);
    }

    #[test]
    fn edge_mass_is_reported() {
        let g = window();
        let e = gabor_matrix_direct(&Symbol::one(), Tau::weyl(), &g, &[7.5, 0.0], &[7.5, 0.0]).unwrap();
        assert!(!e.warnings.is_empty());
    }
}
