use std::f64::consts::PI;
use std::io::BufReader;
use std::path::Path;
use std::sync::Arc;

use num_complex::Complex64;

use super::config::InitialData;
use crate::error::{Error, Result};
use crate::grid::{GridFunction, GridSpec};
use crate::spectral::{analyze, hermite_eval, HermiteBasis, MultiIndex, SpectralField};

/// Names accepted as initial-data presets.
pub const INITIAL_PRESETS: [&str; 3] = ["gauss", "hermite:<k>", "chirp"];

fn hermite_degree(name: &str) -> Result<Option<u32>> {
    match name.strip_prefix("hermite:") {
        Some(k) => k
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| Error::Schema(format!("bad Hermite degree in '{name}'"))),
        None => Ok(None),
    }
}

/// Samples a preset on the grid:
/// `gauss` is `e^{−π|x|²}`, `hermite:k` is `Φ_{(k,0,…,0)}` and `chirp` is
/// `e^{−|x|²/2 + i|x|²/4}`.
pub fn preset_grid(name: &str, spec: &GridSpec) -> Result<GridFunction> {
    let name = name.trim();
    if let Some(k) = hermite_degree(name)? {
        let axis = spec.axis();
        let hk = hermite_eval(k as usize, &axis);
        let h0 = hermite_eval(0, &axis);
        let mut idx = vec![0; spec.d];
        let samples = (0..spec.len())
            .map(|flat| {
                spec.unravel(flat, &mut idx);
                let mut v = hk[idx[0]];
                for &j in &idx[1..] {
                    v *= h0[j];
                }
                Complex64::new(v, 0.0)
            })
            .collect();
        return GridFunction::from_samples(*spec, samples);
    }
    match name {
        "gauss" => Ok(GridFunction::from_fn(*spec, |x| {
            Complex64::new((-PI * x.iter().map(|v| v * v).sum::<f64>()).exp(), 0.0)
        })),
        "chirp" => Ok(GridFunction::from_fn(*spec, |x| {
            let r2: f64 = x.iter().map(|v| v * v).sum();
            Complex64::from_polar((-r2 / 2.0).exp(), r2 / 4.0)
        })),
        other => Err(Error::Schema(format!(
            "unknown initial-data preset '{other}' (known: {})",
            INITIAL_PRESETS.join(", ")
        ))),
    }
}

fn scale_grid(u: GridFunction, amplitude: f64) -> GridFunction {
    if amplitude == 1.0 {
        u
    } else {
        u.scaled(Complex64::new(amplitude, 0.0))
    }
}

fn read_grid_file(path: &Path, spec: &GridSpec) -> Result<GridFunction> {
    let file = std::fs::File::open(path)?;
    let (u, _) = GridFunction::read_csv(BufReader::new(file))?;
    spec.check_same(u.spec())?;
    Ok(u)
}

/// Initial data as grid samples, times `amplitude`.
pub fn initial_grid(data: &InitialData, spec: &GridSpec, amplitude: f64) -> Result<GridFunction> {
    let u = match data {
        InitialData::Preset(name) => preset_grid(name, spec)?,
        InitialData::File { file } => {
            if file.extension().is_some_and(|e| e == "json") {
                return Err(Error::Schema(format!(
                    "{}: coefficient files need a spectral basis; use a grid CSV here",
                    file.display()
                )));
            }
            read_grid_file(file, spec)?
        }
    };
    Ok(scale_grid(u, amplitude))
}

/// Initial data as Hermite coefficients, times `amplitude`. `hermite:k` is the
/// exact unit vector; other presets are analyzed on the basis grid.
pub fn initial_field(data: &InitialData, basis: &Arc<HermiteBasis>, amplitude: f64) -> Result<SpectralField> {
    let field = match data {
        InitialData::Preset(name) => match hermite_degree(name.trim())? {
            Some(k) => {
                let mut entries = vec![0; basis.dim()];
                entries[0] = k;
                let pos = basis
                    .position(&MultiIndex::new(entries)?)
                    .ok_or_else(|| Error::invalid(format!("degree {k} exceeds the basis truncation")))?;
                SpectralField::unit(basis.clone(), pos)
            }
            None => analyze(&preset_grid(name, basis.spec())?, basis)?,
        },
        InitialData::File { file } => {
            if file.extension().is_some_and(|e| e == "json") {
                let value: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(file)?)
                    .map_err(|e| Error::Schema(format!("{}: {e}", file.display())))?;
                SpectralField::from_json(basis.clone(), &value)?
            } else {
                analyze(&read_grid_file(file, basis.spec())?, basis)?
            }
        }
    };
    Ok(if amplitude == 1.0 { field } else { field.scaled(Complex64::new(amplitude, 0.0)) })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_are_normalized_as_documented() {
        let spec = GridSpec::new(1, 8.0, 256).unwrap();
        let g = preset_grid("gauss", &spec).unwrap();
        assert!((g.l2_norm() - 2f64.powf(-0.25)).abs() < 1e-12);
        let h = preset_grid("hermite:3", &spec).unwrap();
        assert!((h.l2_norm() - 1.0).abs() < 1e-10);
        assert!(preset_grid("hermite:x", &spec).is_err());
        assert!(matches!(preset_grid("box", &spec), Err(Error::Schema(_))));
    }

    #[test]
    fn hermite_preset_is_a_unit_coefficient() {
        let basis = Arc::new(HermiteBasis::new(1, 8, 8.0, 128).unwrap());
        let c = initial_field(&InitialData::Preset("hermite:2".into()), &basis, 0.5).unwrap();
        assert_eq!(c.coeffs()[2], Complex64::new(0.5, 0.0));
        assert!(initial_field(&InitialData::Preset("hermite:9".into()), &basis, 1.0).is_err());
    }
}
