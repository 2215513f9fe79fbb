use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::GridFunction;

/// One term `c_{jk} z^j z̄^k` of a truncated series nonlinearity.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesTerm {
    pub j: u32,
    pub k: u32,
    pub re: f64,
    pub im: f64,
}

/// Nonlinearity `F` with `F(0) = 0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "NonlinearitySpec", into = "NonlinearitySpec")]
pub enum Nonlinearity {
    /// `λ|u|^{2k} u`.
    Power { lambda: Complex64, k: u32 },
    /// `Σ c_{jk} u^j ū^k` over a finite table.
    Series { terms: Vec<SeriesTerm> },
}

/// Flat JSON shape: `{kind, lambda_re, lambda_im, k}` or `{kind, coeff_table}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct NonlinearitySpec {
    kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    lambda_re: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    lambda_im: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    k: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    coeff_table: Option<Vec<SeriesTerm>>,
}

impl TryFrom<NonlinearitySpec> for Nonlinearity {
    type Error = Error;

    fn try_from(s: NonlinearitySpec) -> Result<Self> {
        match s.kind.as_str() {
            "power" => {
                if s.coeff_table.is_some() {
                    return Err(Error::Schema("power nonlinearity takes no coeff_table".into()));
                }
                let lambda = Complex64::new(s.lambda_re.unwrap_or(0.0), s.lambda_im.unwrap_or(0.0));
                let k = s.k.ok_or_else(|| Error::Schema("power nonlinearity needs k".into()))?;
                Ok(Nonlinearity::power(lambda, k))
            }
            "series" => {
                if s.lambda_re.is_some() || s.lambda_im.is_some() || s.k.is_some() {
                    return Err(Error::Schema("series nonlinearity takes only coeff_table".into()));
                }
                let terms = s.coeff_table.ok_or_else(|| Error::Schema("series nonlinearity needs coeff_table".into()))?;
                Nonlinearity::series(terms)
            }
            other => Err(Error::Schema(format!("unknown nonlinearity kind '{other}'"))),
        }
    }
}

impl From<Nonlinearity> for NonlinearitySpec {
    fn from(f: Nonlinearity) -> Self {
        match f {
            Nonlinearity::Power { lambda, k } => NonlinearitySpec {
                kind: "power".into(),
                lambda_re: Some(lambda.re),
                lambda_im: Some(lambda.im),
                k: Some(k),
                coeff_table: None,
            },
            Nonlinearity::Series { terms } => NonlinearitySpec {
                kind: "series".into(),
                lambda_re: None,
                lambda_im: None,
                k: None,
                coeff_table: Some(terms),
            },
        }
    }
}

impl Nonlinearity {
    pub fn power(lambda: Complex64, k: u32) -> Self {
        Nonlinearity::Power { lambda, k }
    }

    /// `F(u) = −|u|²u`.
    pub fn dissipative_cubic() -> Self {
        Self::power(Complex64::new(-1.0, 0.0), 1)
    }

    pub fn zero() -> Self {
        Self::power(Complex64::new(0.0, 0.0), 0)
    }

    /// Rejects tables with a constant term, since `F(0)` must vanish.
    pub fn series(terms: Vec<SeriesTerm>) -> Result<Self> {
        for t in &terms {
            if t.j == 0 && t.k == 0 && (t.re != 0.0 || t.im != 0.0) {
                return Err(Error::invalid("series nonlinearity must have c_00 = 0"));
            }
            if !(t.re.is_finite() && t.im.is_finite()) {
                return Err(Error::invalid("series coefficients must be finite"));
            }
        }
        Ok(Nonlinearity::Series { terms })
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Nonlinearity::Power { lambda, .. } => lambda.norm() == 0.0,
            Nonlinearity::Series { terms } => terms.iter().all(|t| t.re == 0.0 && t.im == 0.0),
        }
    }

    /// Highest total degree in `u, ū`.
    pub fn degree(&self) -> u32 {
        match self {
            Nonlinearity::Power { k, .. } => 2 * k + 1,
            Nonlinearity::Series { terms } => terms.iter().map(|t| t.j + t.k).max().unwrap_or(0),
        }
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        match self {
            Nonlinearity::Power { lambda, k } => lambda * z * z.norm_sqr().powi(*k as i32),
            Nonlinearity::Series { terms } => terms
                .iter()
                .map(|t| Complex64::new(t.re, t.im) * z.powu(t.j) * z.conj().powu(t.k))
                .sum(),
        }
    }
}

/// Pointwise `F(u)` on the grid.
pub fn eval_nonlinearity(u: &GridFunction, f: &Nonlinearity) -> GridFunction {
    let samples = u.samples().iter().map(|&z| f.eval(z)).collect();
    GridFunction::from_samples(*u.spec(), samples).expect("same grid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridSpec;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn zero_maps_to_zero() {
        let spec = GridSpec::new(1, 4.0, 16).unwrap();
        let u = GridFunction::zeros(spec);
        let series = Nonlinearity::series(vec![SeriesTerm { j: 2, k: 1, re: 0.5, im: -1.0 }]).unwrap();
        for f in [Nonlinearity::dissipative_cubic(), Nonlinearity::power(c(3.0), 4), series] {
            assert!(eval_nonlinearity(&u, &f).max_abs() == 0.0);
        }
    }

    #[test]
    fn cubic_power_on_constant_patch() {
        let spec = GridSpec::new(1, 4.0, 16).unwrap();
        let u = GridFunction::from_fn(spec, |x| if x[0].abs() < 1.0 { c(2.0) } else { c(0.0) });
        let out = eval_nonlinearity(&u, &Nonlinearity::power(c(1.0), 1));
        for (x, v) in spec.axis().iter().zip(out.samples()) {
            let want = if x.abs() < 1.0 { 8.0 } else { 0.0 };
            assert_eq!(*v, c(want));
        }
    }

    #[test]
    fn linear_series_is_identity() {
        let f = Nonlinearity::series(vec![SeriesTerm { j: 1, k: 0, re: 1.0, im: 0.0 }]).unwrap();
        let spec = GridSpec::new(1, 4.0, 16).unwrap();
        let u = GridFunction::from_fn(spec, |x| Complex64::new(x[0].sin(), x[0]));
        assert_eq!(eval_nonlinearity(&u, &f).samples(), u.samples());
    }

    #[test]
    fn series_matches_power_form() {
        // λ|u|²u = λ u² ū
        let f = Nonlinearity::series(vec![SeriesTerm { j: 2, k: 1, re: -1.0, im: 0.5 }]).unwrap();
        let g = Nonlinearity::power(Complex64::new(-1.0, 0.5), 1);
        let z = Complex64::new(0.3, -1.2);
        assert!((f.eval(z) - g.eval(z)).norm() < 1e-15);
        assert_eq!(f.degree(), 3);
    }

    #[test]
    fn constant_term_is_rejected() {
        assert!(Nonlinearity::series(vec![SeriesTerm { j: 0, k: 0, re: 1.0, im: 0.0 }]).is_err());
    }

    #[test]
    fn json_shapes() {
        let f: Nonlinearity =
            serde_json::from_str(r#"{"kind":"power","lambda_re":-1.0,"lambda_im":0.0,"k":1}"#).unwrap();
        assert_eq!(f, Nonlinearity::dissipative_cubic());
        let back: Nonlinearity = serde_json::from_value(serde_json::to_value(&f).unwrap()).unwrap();
        assert_eq!(back, f);
        let s: Nonlinearity =
            serde_json::from_str(r#"{"kind":"series","coeff_table":[{"j":1,"k":0,"re":1.0,"im":0.0}]}"#).unwrap();
        assert!(matches!(s, Nonlinearity::Series { .. }));
        assert!(serde_json::from_str::<Nonlinearity>(r#"{"kind":"series","coeff_table":[{"j":0,"k":0,"re":1.0,"im":0.0}]}"#).is_err());
        assert!(serde_json::from_str::<Nonlinearity>(r#"{"kind":"exp"}"#).is_err());
        assert!(serde_json::from_str::<Nonlinearity>(r#"{"kind":"power"}"#).is_err());
    }
}
