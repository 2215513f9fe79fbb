use serde::{Deserialize, Serialize};

use super::phase_grid::PhaseGrid;
use super::stft::{stft, STFTTable};
use super::window::Window;
use crate::error::{Error, Result};
use crate::grid::GridFunction;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightKind {
    /// `(1 ⊗ v_s)(x, ω) = ⟨ω⟩^s`.
    Frequency,
    /// `v_s(z) = ⟨z⟩^s` on the whole phase space.
    Full,
}

/// Polynomial weight `⟨·⟩^s`, `⟨z⟩ = (1 + |z|²)^{1/2}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Weight {
    pub kind: WeightKind,
    pub s: f64,
}

impl Weight {
    pub fn frequency(s: f64) -> Self {
        Weight { kind: WeightKind::Frequency, s }
    }

    pub fn full(s: f64) -> Self {
        Weight { kind: WeightKind::Full, s }
    }

    pub fn unit() -> Self {
        Weight::frequency(0.0)
    }

    /// Evaluates at `z = (x, ω)` with `x` and `ω` of equal length.
    pub fn eval(&self, z: &[f64]) -> f64 {
        weight_eval(self, z)
    }
}

/// `⟨t⟩ = (1 + |t|²)^{1/2}`.
pub fn japanese_bracket(t: &[f64]) -> f64 {
    (1.0 + t.iter().map(|v| v * v).sum::<f64>()).sqrt()
}

pub fn weight_eval(w: &Weight, z: &[f64]) -> f64 {
    if w.s == 0.0 {
        return 1.0;
    }
    let r2: f64 = match w.kind {
        WeightKind::Frequency => z[z.len() / 2..].iter().map(|v| v * v).sum(),
        WeightKind::Full => z.iter().map(|v| v * v).sum(),
    };
    (1.0 + r2).powf(w.s / 2.0)
}

fn check_exponent(p: f64, name: &str) -> Result<()> {
    if p >= 1.0 && !p.is_nan() {
        Ok(())
    } else {
        Err(Error::invalid(format!("{name} must lie in [1, ∞], got {p}")))
    }
}

/// `(Σ_ω (Σ_x |F|^p w^p)^{q/p})^{1/q}` with cell weights `cx` on the inner
/// sum and `cw` on the outer one; `∞` exponents become maxima.
fn weighted_mixed(table: &STFTTable, p: f64, q: f64, w: &Weight, cx: f64, cw: f64) -> Result<f64> {
    check_exponent(p, "p")?;
    check_exponent(q, "q")?;
    let grid = table.grid();
    let xc = grid.x_count();
    let wc = grid.w_count();
    let xs: Vec<Vec<f64>> = (0..xc).map(|i| grid.x_node(i)).collect();
    let mut outer = 0.0_f64;
    for k in 0..wc {
        let omega = grid.w_node(k);
        let mut inner = 0.0_f64;
        for (i, x) in xs.iter().enumerate() {
            let v = table.get(i, k).norm();
            if !v.is_finite() {
                return Err(Error::invalid("STFT table holds non-finite values"));
            }
            if v == 0.0 {
                continue;
            }
            let mut z = x.clone();
            z.extend_from_slice(&omega);
            let term = v * weight_eval(w, &z);
            if p.is_infinite() {
                inner = inner.max(term);
            } else {
                inner += term.powf(p) * cx;
            }
        }
        let row = if p.is_infinite() { inner } else { inner.powf(1.0 / p) };
        if q.is_infinite() {
            outer = outer.max(row);
        } else {
            outer += row.powf(q) * cw;
        }
    }
    Ok(if q.is_infinite() { outer } else { outer.powf(1.0 / q) })
}

/// Discrete `L^{p,q}_w` norm of an STFT table: Riemann sums with cell weights
/// `a^d` over positions (inner, exponent `p`) and `b^d` over frequencies
/// (outer, exponent `q`).
pub fn mixed_norm(table: &STFTTable, p: f64, q: f64, w: &Weight) -> Result<f64> {
    let d = table.grid().dim() as i32;
    weighted_mixed(table, p, q, w, table.grid().a.powi(d), table.grid().b.powi(d))
}

/// Same nesting as [`mixed_norm`] with unit cell weights, i.e. the weighted
/// sequence norm `ℓ^{p,q}_w` of the lattice samples.
pub fn mixed_sequence_norm(table: &STFTTable, p: f64, q: f64, w: &Weight) -> Result<f64> {
    weighted_mixed(table, p, q, w, 1.0, 1.0)
}

/// `‖f‖_{M^{p,q}_w}` estimated as `‖V_g f‖_{L^{p,q}_w}` on the default lattice.
pub fn mod_norm(f: &GridFunction, g: &Window, p: f64, q: f64, w: &Weight) -> Result<f64> {
    mod_norm_on(f, g, &PhaseGrid::default_for(f.spec()), p, q, w)
}

pub fn mod_norm_on(f: &GridFunction, g: &Window, grid: &PhaseGrid, p: f64, q: f64, w: &Weight) -> Result<f64> {
    check_exponent(p, "p")?;
    check_exponent(q, "q")?;
    mixed_norm(&stft(f, g, grid)?, p, q, w)
}

/// JSON-ready record of one norm evaluation.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NormReport {
    #[serde(serialize_with = "ser_exponent", deserialize_with = "de_exponent")]
    pub p: f64,
    #[serde(serialize_with = "ser_exponent", deserialize_with = "de_exponent")]
    pub q: f64,
    pub weight_kind: WeightKind,
    pub s: f64,
    pub value: f64,
    pub grid_meta: serde_json::Value,
}

impl NormReport {
    pub fn new(p: f64, q: f64, w: &Weight, value: f64, grid: &PhaseGrid) -> Self {
        NormReport { p, q, weight_kind: w.kind, s: w.s, value, grid_meta: grid.meta() }
    }
}

/// JSON has no infinity; exponents `∞` travel as the string `"inf"`.
fn ser_exponent<S: serde::Serializer>(p: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if p.is_infinite() {
        s.serialize_str("inf")
    } else {
        s.serialize_f64(*p)
    }
}

fn de_exponent<'de, D: serde::Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Raw {
        Num(f64),
        Str(String),
    }
    match Raw::deserialize(d)? {
        Raw::Num(v) => Ok(v),
        Raw::Str(s) => parse_exponent(&s).map_err(serde::de::Error::custom),
    }
}

/// Parses `"1"`, `"2.5"`, `"inf"` or `"∞"`.
pub fn parse_exponent(s: &str) -> std::result::Result<f64, String> {
    match s.trim() {
        "inf" | "infinity" | "∞" => Ok(f64::INFINITY),
        t => t.parse::<f64>().map_err(|e| format!("bad exponent {t:?}: {e}")),
    }
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use num_complex::Complex64;
    use proptest::prelude::*;

    use super::*;
    use crate::grid::GridSpec;
    use crate::spectral::hermite_eval;

    fn spec() -> GridSpec {
        GridSpec::new(1, 8.0, 512).unwrap()
    }

    #[test]
    fn weight_examples() {
        assert_eq!(weight_eval(&Weight::full(0.0), &[3.0, -2.0]), 1.0);
        assert_eq!(weight_eval(&Weight::full(2.0), &[0.0, 0.0]), 1.0);
        let z = [1.0, 1.0, 1.0, 0.0];
        assert!((weight_eval(&Weight::full(2.0), &z) - 4.0).abs() < 1e-15);
        assert!((weight_eval(&Weight::frequency(2.0), &[5.0, 1.0]) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn single_node_table() {
        let s = GridSpec::new(1, 4.0, 64).unwrap();
        let grid = PhaseGrid::new(0.5, 0.25, vec![(0, 3)], vec![(-2, 2)]).unwrap();
        let mut t = STFTTable::zeros(grid.clone(), s);
        let wc = grid.w_count();
        t.values_mut()[2 * wc + 4] = Complex64::new(3.0, 4.0);
        let z = t.node(2 * wc + 4);
        let w = Weight::full(1.0);
        for (p, q) in [(1.0, 1.0), (2.0, 1.0), (1.5, 3.0), (f64::INFINITY, 2.0)] {
            let got = mixed_norm(&t, p, q, &w).unwrap();
            let xw = if p.is_infinite() { 1.0 } else { grid.a.powf(1.0 / p) };
            let expect = 5.0 * weight_eval(&w, &z) * xw * grid.b.powf(1.0 / q);
            assert!((got - expect).abs() < 1e-13, "{p},{q}: {got} vs {expect}");
        }
    }

    #[test]
    fn rejects_bad_exponents() {
        let t = STFTTable::zeros(PhaseGrid::default_for(&spec()), spec());
        assert!(mixed_norm(&t, 0.5, 1.0, &Weight::unit()).is_err());
        assert!(mixed_norm(&t, 1.0, f64::NAN, &Weight::unit()).is_err());
        assert_eq!(mixed_norm(&t, 1.0, 1.0, &Weight::unit()).unwrap(), 0.0);
    }

    #[test]
    fn moyal_identity() {
        let s = GridSpec::new(1, 12.0, 2048).unwrap();
        let g = Window::gaussian(s);
        let f = GridFunction::from_fn(s, |x| {
            Complex64::from_polar((-PI * (x[0] + 0.8).powi(2) / 1.5).exp(), -2.0 * x[0])
        });
        let nf = f.l2_norm();
        let m = mod_norm(&f, &g, 2.0, 2.0, &Weight::unit()).unwrap();
        assert!((m - nf).abs() < 1e-6 * nf, "{m} vs {nf}");
        assert_eq!(mod_norm(&GridFunction::zeros(s), &g, 2.0, 2.0, &Weight::unit()).unwrap(), 0.0);
    }

    #[test]
    fn p2q2_is_discrete_l2() {
        let s = spec();
        let g = Window::gaussian(s);
        let f = GridFunction::from_fn(s, |x| Complex64::new(hermite_eval(3, x)[0], 0.0));
        let grid = PhaseGrid::default_for(&s);
        let t = stft(&f, &g, &grid).unwrap();
        let l2 = (t.values().iter().map(|v| v.norm_sqr()).sum::<f64>() * grid.cell_volume()).sqrt();
        assert!((mixed_norm(&t, 2.0, 2.0, &Weight::unit()).unwrap() - l2).abs() < 1e-13);
    }

    #[test]
    fn window_independence() {
        let s = GridSpec::new(1, 12.0, 1024).unwrap();
        let g1 = Window::gaussian(s);
        let g2 = Window::gaussian_with_width(s, 1.7);
        let mut lo = f64::INFINITY;
        let mut hi: f64 = 0.0;
        for (c, w, k) in [(0.0, 1.0, 0.0), (1.5, 0.6, 2.0), (-2.0, 2.0, -1.0), (0.5, 0.3, 4.0)] {
            let f = GridFunction::from_fn(s, |x| {
                Complex64::from_polar((-PI * (x[0] - c).powi(2) / (w * w)).exp(), 2.0 * PI * k * x[0])
            });
            for (p, q, wt) in [(1.0, 1.0, Weight::frequency(1.0)), (2.0, 1.0, Weight::full(1.0))] {
                let r = mod_norm(&f, &g1, p, q, &wt).unwrap() / mod_norm(&f, &g2, p, q, &wt).unwrap();
                lo = lo.min(r);
                hi = hi.max(r);
            }
        }
        assert!(hi / lo < 10.0, "ratios in [{lo}, {hi}]");
    }

    #[test]
    fn exponent_serialization() {
        let g = PhaseGrid::new(1.0, 1.0, vec![(0, 0)], vec![(0, 0)]).unwrap();
        let r = NormReport::new(f64::INFINITY, 2.0, &Weight::full(1.0), 3.0, &g);
        let js = serde_json::to_string(&r).unwrap();
        assert!(js.contains("\"p\":\"inf\""));
        let back: NormReport = serde_json::from_str(&js).unwrap();
        assert!(back.p.is_infinite() && back.q == 2.0);
        assert_eq!(parse_exponent("∞").unwrap(), f64::INFINITY);
        assert!(parse_exponent("x").is_err());
    }

    fn exponent() -> impl Strategy<Value = f64> {
        prop_oneof![Just(1.0), Just(1.5), Just(2.0), Just(3.0), Just(f64::INFINITY)]
    }

    proptest! {
        #[test]
        fn sequence_norm_is_monotone(
            vals in proptest::collection::vec((-3.0f64..3.0, -3.0f64..3.0), 12),
            p1 in exponent(), p2 in exponent(), q1 in exponent(), q2 in exponent(),
            s in 0.0f64..2.0,
        ) {
            let (p1, p2) = if p1 <= p2 { (p1, p2) } else { (p2, p1) };
            let (q1, q2) = if q1 <= q2 { (q1, q2) } else { (q2, q1) };
            let grid = PhaseGrid::new(0.3, 0.7, vec![(-1, 1)], vec![(0, 3)]).unwrap();
            let values = vals.iter().map(|&(a, b)| Complex64::new(a, b)).collect();
            let t = STFTTable::from_values(grid, spec(), values).unwrap();
            let w = Weight::full(s);
            let big = mixed_sequence_norm(&t, p1, q1, &w).unwrap();
            let small = mixed_sequence_norm(&t, p2, q2, &w).unwrap();
            prop_assert!(small <= big * (1.0 + 1e-12));
        }

        #[test]
        fn weight_is_submultiplicative(
            z1 in proptest::collection::vec(-20.0f64..20.0, 4),
            z2 in proptest::collection::vec(-20.0f64..20.0, 4),
            s in 0.0f64..6.0,
            full in any::<bool>(),
        ) {
            let w = if full { Weight::full(s) } else { Weight::frequency(s) };
            let sum: Vec<f64> = z1.iter().zip(&z2).map(|(a, b)| a + b).collect();
            let lhs = weight_eval(&w, &sum);
            prop_assert!(lhs > 0.0);
            prop_assert!(lhs <= weight_eval(&w, &z1) * weight_eval(&w, &z2) * (1.0 + 1e-12));
        }
    }
}
