use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::GridSpec;

/// Extra half-width beyond the turning point `√(2K+d)` used by default.
pub const DEFAULT_MARGIN: f64 = 4.0;

/// Smallest accepted margin beyond the turning point.
pub const MIN_MARGIN: f64 = 1.0;

/// Normalized Hermite functions `h_k(x)` of `-d²/dx² + x²` at every point of `xs`.
///
/// Uses the three-term recurrence on the polynomial factor, renormalizing
/// whenever it grows past `1e150`, and folds the accumulated scale into the
/// Gaussian exponent so that neither factor overflows on its own.
pub fn hermite_eval(k: usize, xs: &[f64]) -> Vec<f64> {
    xs.iter().map(|&x| hermite_column(k, x)[k]).collect()
}

/// `[h_0(x), ..., h_max(x)]`.
pub fn hermite_column(max_degree: usize, x: f64) -> Vec<f64> {
    const BIG: f64 = 1e150;
    let mut out = Vec::with_capacity(max_degree + 1);
    let mut log_scale = -0.5 * x * x;
    let mut prev = 0.0_f64;
    let mut cur = PI.powf(-0.25);
    let emit = |p: f64, log_scale: f64| {
        if p == 0.0 {
            0.0
        } else {
            p.signum() * (p.abs().ln() + log_scale).exp()
        }
    };
    out.push(emit(cur, log_scale));
    for k in 0..max_degree {
        let kf = k as f64;
        let next = (2.0 / (kf + 1.0)).sqrt() * x * cur - (kf / (kf + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
        if cur.abs() > BIG {
            cur /= BIG;
            prev /= BIG;
            log_scale += BIG.ln();
        }
        out.push(emit(cur, log_scale));
    }
    out
}

/// Multi-index `α ∈ ℕ^d` labelling the tensor Hermite function `Φ_α`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(entries: Vec<u32>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::invalid("multi-index needs at least one entry"));
        }
        Ok(MultiIndex(entries))
    }

    pub fn entries(&self) -> &[u32] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// `|α| = Σ α_i`.
    pub fn order(&self) -> u32 {
        self.0.iter().sum()
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|a| a.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// All multi-indices of dimension `d` with `|α| ≤ max_order`, graded by order
/// and lexicographically descending within a shell.
pub fn enumerate_multi_indices(d: usize, max_order: u32) -> Vec<MultiIndex> {
    fn fill(prefix: &mut Vec<u32>, remaining_dims: usize, budget: u32, out: &mut Vec<MultiIndex>) {
        if remaining_dims == 1 {
            prefix.push(budget);
            out.push(MultiIndex(prefix.clone()));
            prefix.pop();
            return;
        }
        for a in (0..=budget).rev() {
            prefix.push(a);
            fill(prefix, remaining_dims - 1, budget - a, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    for k in 0..=max_order {
        fill(&mut Vec::with_capacity(d), d, k, &mut out);
    }
    out
}

/// Tensor Hermite eigenbasis truncated to `|α| ≤ K`, tabulated on a grid.
#[derive(Debug)]
pub struct HermiteBasis {
    spec: GridSpec,
    max_degree: u32,
    /// `(K+1) × n`, row `k` holds `h_k` on the axis.
    table: Vec<f64>,
    indices: Vec<MultiIndex>,
    /// Position of each multi-index in the dense `(K+1)^d` tensor.
    tensor_pos: Vec<usize>,
}

impl HermiteBasis {
    pub fn new(d: usize, max_degree: u32, half_width: f64, n: usize) -> Result<Self> {
        let spec = GridSpec::new(d, half_width, n)?;
        let turning = (2.0 * max_degree as f64 + d as f64).sqrt();
        if half_width < turning + MIN_MARGIN {
            return Err(Error::invalid(format!(
                "half-width {half_width} does not clear the turning point {turning:.3} by {MIN_MARGIN}"
            )));
        }
        if spec.spacing() * 2.0 * turning >= PI {
            return Err(Error::invalid(format!(
                "grid spacing {} under-resolves degree {max_degree}",
                spec.spacing()
            )));
        }
        let kp1 = max_degree as usize + 1;
        let mut table = vec![0.0; kp1 * n];
        for (j, x) in spec.axis().into_iter().enumerate() {
            for (k, v) in hermite_column(max_degree as usize, x).into_iter().enumerate() {
                table[k * n + j] = v;
            }
        }
        let indices = enumerate_multi_indices(d, max_degree);
        let tensor_pos = indices
            .iter()
            .map(|a| a.entries().iter().fold(0, |acc, &e| acc * kp1 + e as usize))
            .collect();
        Ok(HermiteBasis { spec, max_degree, table, indices, tensor_pos })
    }

    /// Basis on `[-L, L)^d` with `L = √(2K+d) + 4`.
    pub fn with_default_width(d: usize, max_degree: u32, n: usize) -> Result<Self> {
        Self::new(d, max_degree, default_half_width(d, max_degree), n)
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn dim(&self) -> usize {
        self.spec.d
    }

    pub fn max_degree(&self) -> u32 {
        self.max_degree
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn indices(&self) -> &[MultiIndex] {
        &self.indices
    }

    pub fn position(&self, alpha: &MultiIndex) -> Option<usize> {
        self.indices.iter().position(|a| a == alpha)
    }

    /// `h_k` on the axis grid.
    pub fn axis_values(&self, k: u32) -> &[f64] {
        let n = self.spec.n;
        &self.table[k as usize * n..(k as usize + 1) * n]
    }

    pub(crate) fn table(&self) -> &[f64] {
        &self.table
    }

    pub(crate) fn tensor_pos(&self) -> &[usize] {
        &self.tensor_pos
    }

    /// `max_{j,k ≤ K} |⟨h_j, h_k⟩_grid − δ_jk|`. Tensor products inherit the
    /// 1-D Gram matrix, so this bounds the d-dimensional deviation up to a
    /// factor `d`.
    pub fn gram_deviation(&self) -> f64 {
        let h = self.spec.spacing();
        let kp1 = self.max_degree as usize + 1;
        let mut worst: f64 = 0.0;
        for j in 0..kp1 {
            for k in j..kp1 {
                let dot: f64 = self
                    .axis_values(j as u32)
                    .iter()
                    .zip(self.axis_values(k as u32))
                    .map(|(a, b)| a * b)
                    .sum::<f64>()
                    * h;
                let target = if j == k { 1.0 } else { 0.0 };
                worst = worst.max((dot - target).abs());
            }
        }
        worst
    }
}

pub fn default_half_width(d: usize, max_degree: u32) -> f64 {
    (2.0 * max_degree as f64 + d as f64).sqrt() + DEFAULT_MARGIN
}
