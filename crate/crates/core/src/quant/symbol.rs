use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use super::phase::PhaseSpaceFunction;
use crate::error::{Error, Result};
use crate::tf::japanese_bracket;

type ClosedForm = Arc<dyn Fn(&[f64]) -> Complex64 + Send + Sync>;

/// How a symbol is evaluated.
#[derive(Clone)]
pub enum SymbolBackend {
    /// `σ ≡ 1`.
    One,
    /// `e^{-|z|²}`.
    Gauss,
    /// `⟨z⟩^m`.
    JBracket(f64),
    /// `sin(z₁)`.
    Sin1,
    /// `(|x|² + 4π²|ξ|²)^{1/2}`, the square root of the harmonic oscillator symbol.
    HarmonicRoot,
    /// Any closed-form rule on ℝ^{2d}.
    Closure(ClosedForm),
    /// Samples on the phase-space grid of a sample grid; evaluable at nodes only.
    Sampled(PhaseSpaceFunction),
}

impl fmt::Debug for SymbolBackend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SymbolBackend::One => write!(f, "One"),
            SymbolBackend::Gauss => write!(f, "Gauss"),
            SymbolBackend::JBracket(m) => write!(f, "JBracket({m})"),
            SymbolBackend::Sin1 => write!(f, "Sin1"),
            SymbolBackend::HarmonicRoot => write!(f, "HarmonicRoot"),
            SymbolBackend::Closure(_) => write!(f, "Closure"),
            SymbolBackend::Sampled(s) => write!(f, "Sampled({:?})", s.spec()),
        }
    }
}

/// Phase-space symbol `σ(z)`, `z = (x, ω) ∈ ℝ^{2d}`, with a declared order `m`.
#[derive(Clone, Debug)]
pub struct Symbol {
    pub backend: SymbolBackend,
    pub order: f64,
    pub label: String,
}

impl Symbol {
    pub fn one() -> Self {
        Symbol { backend: SymbolBackend::One, order: 0.0, label: "one".into() }
    }

    pub fn gauss() -> Self {
        Symbol { backend: SymbolBackend::Gauss, order: 0.0, label: "gauss".into() }
    }

    pub fn jbracket(m: f64) -> Self {
        Symbol { backend: SymbolBackend::JBracket(m), order: m, label: format!("jbracket:{m}") }
    }

    pub fn sin1() -> Self {
        Symbol { backend: SymbolBackend::Sin1, order: 0.0, label: "sin1".into() }
    }

    pub fn harmonic_root() -> Self {
        Symbol { backend: SymbolBackend::HarmonicRoot, order: 1.0, label: "harmonic".into() }
    }

    pub fn closure<F>(label: &str, order: f64, f: F) -> Self
    where
        F: Fn(&[f64]) -> Complex64 + Send + Sync + 'static,
    {
        Symbol { backend: SymbolBackend::Closure(Arc::new(f)), order, label: label.into() }
    }

    pub fn sampled(label: &str, order: f64, table: PhaseSpaceFunction) -> Self {
        Symbol { backend: SymbolBackend::Sampled(table), order, label: label.into() }
    }

    /// Parses a preset name: `one`, `gauss`, `sin1`, `harmonic` or `jbracket:<m>`.
    pub fn preset(name: &str) -> Result<Self> {
        let name = name.trim();
        match name {
            "one" => Ok(Self::one()),
            "gauss" => Ok(Self::gauss()),
            "sin1" => Ok(Self::sin1()),
            "harmonic" => Ok(Self::harmonic_root()),
            _ => {
                if let Some(m) = name.strip_prefix("jbracket:") {
                    let m: f64 = m
                        .parse()
                        .map_err(|_| Error::Schema(format!("bad symbol order in {name:?}")))?;
                    Ok(Self::jbracket(m))
                } else {
                    Err(Error::Schema(format!(
                        "unknown symbol preset {name:?} (expected one, gauss, sin1, harmonic, jbracket:<m>)"
                    )))
                }
            }
        }
    }

    pub fn preset_names() -> &'static [&'static str] {
        &["one", "gauss", "sin1", "harmonic", "jbracket:<m>"]
    }

    pub fn is_sampled(&self) -> bool {
        matches!(self.backend, SymbolBackend::Sampled(_))
    }

    /// Whether the symbol is real-valued by construction.
    pub fn is_real(&self) -> bool {
        match &self.backend {
            SymbolBackend::Closure(_) => false,
            SymbolBackend::Sampled(t) => t.max_imag() == 0.0,
            _ => true,
        }
    }

    /// `σ(z)` for closed-form backends; sampled symbols must be queried at one
    /// of their grid nodes.
    pub fn eval(&self, z: &[f64]) -> Result<Complex64> {
        let r = |v: f64| Ok(Complex64::new(v, 0.0));
        match &self.backend {
            SymbolBackend::One => r(1.0),
            SymbolBackend::Gauss => r((-z.iter().map(|v| v * v).sum::<f64>()).exp()),
            SymbolBackend::JBracket(m) => r(japanese_bracket(z).powf(*m)),
            SymbolBackend::Sin1 => r(z[0].sin()),
            SymbolBackend::HarmonicRoot => {
                let d = z.len() / 2;
                let x2: f64 = z[..d].iter().map(|v| v * v).sum();
                let w2: f64 = z[d..].iter().map(|v| v * v).sum();
                r((x2 + 4.0 * PI * PI * w2).sqrt())
            }
            SymbolBackend::Closure(f) => Ok(f(z)),
            SymbolBackend::Sampled(t) => sampled_at(t, z),
        }
    }

    /// Samples on the phase-space grid induced by `spec`.
    pub fn tabulate(&self, spec: &crate::grid::GridSpec) -> Result<PhaseSpaceFunction> {
        if let SymbolBackend::Sampled(t) = &self.backend {
            t.spec().check_same(spec)?;
            return Ok(t.clone());
        }
        let mut out = PhaseSpaceFunction::zeros(*spec);
        for flat in 0..out.values().len() {
            let z = out.node(flat);
            out.values_mut()[flat] = self.eval(&z)?;
        }
        Ok(out)
    }
}

fn sampled_at(t: &PhaseSpaceFunction, z: &[f64]) -> Result<Complex64> {
    let spec = t.spec();
    let d = spec.d;
    if z.len() != 2 * d {
        return Err(Error::invalid(format!("symbol expects {} coordinates", 2 * d)));
    }
    let n = spec.n;
    let mut flat = 0;
    for (k, &v) in z.iter().enumerate() {
        let pos = if k < d {
            (v + spec.half_width) / spec.spacing()
        } else {
            v / spec.frequency_spacing() + (n / 2) as f64
        };
        let j = pos.round();
        if (pos - j).abs() > 1e-9 || j < 0.0 || j >= n as f64 {
            return Err(Error::Unsupported(format!(
                "sampled symbol queried off its grid at {z:?}"
            )));
        }
        flat = flat * n + j as usize;
    }
    Ok(t.values()[flat])
}
