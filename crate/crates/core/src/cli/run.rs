use std::io::{BufRead, BufReader};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use num_complex::Complex64;

use super::config::*;
use super::output::{metadata, Emitter};
use super::presets::{initial_field, initial_grid};
use super::verify::run_suite;
use crate::error::{Error, Result};
use crate::evolution::{local_time_search, picard_solve, TimeGrid};
use crate::grid::GridSpec;
use crate::quant::{
    decay_fit, ellipticity_check, gabor_sweep, shubin_seminorm, symbol_seminorm, tau_wigner, GaborMatrixSample,
    RaySampling, SamplingBox, Symbol, Tau,
};
use crate::spectral::{apply_semigroup, synthesize, HermiteBasis};
use crate::tf::{istft, mod_norm_on, parse_exponent, stft, NormReport, PhaseGrid, Weight, Window};

/// What a run produced.
#[derive(Debug)]
pub struct RunOutcome {
    pub files: Vec<PathBuf>,
    /// Command summary, printed by the binary with `--json`.
    pub summary: serde_json::Value,
    /// 0 on success, 1 when a verification suite ran but did not pass.
    pub exit_code: i32,
}

/// Process exit status for an error: 2 schema/validation, 3 non-convergence,
/// 4 I/O.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::NonConvergence { .. } => 3,
        Error::Io(_) => 4,
        _ => 2,
    }
}

fn grid_meta(spec: &GridSpec) -> serde_json::Value {
    serde_json::json!({ "d": spec.d, "L": spec.half_width, "n": spec.n })
}

fn basis_meta(basis: &HermiteBasis) -> serde_json::Value {
    let s = basis.spec();
    serde_json::json!({ "d": s.d, "L": s.half_width, "n": s.n, "K": basis.max_degree() })
}

fn ok(out: Emitter, summary: serde_json::Value) -> Result<RunOutcome> {
    Ok(RunOutcome { files: out.files, summary, exit_code: 0 })
}

/// Validates the config, dispatches and writes outputs under `output_dir`.
pub fn run(cfg: &RunConfig) -> Result<RunOutcome> {
    if !cfg.params.is_object() {
        return Err(Error::Schema("params must be a JSON object".into()));
    }
    let out = Emitter::new(&cfg.output_dir);
    match cfg.command {
        Command::Propagate => propagate_cmd(cfg, out),
        Command::Solve => solve_cmd(cfg, out),
        Command::Stft => stft_cmd(cfg, out),
        Command::Modnorm => modnorm_cmd(cfg, out),
        Command::Wigner => wigner_cmd(cfg, out),
        Command::GaborMatrix => gabor_cmd(cfg, out),
        Command::Seminorm => seminorm_cmd(cfg, out),
        Command::DecayFit => decay_fit_cmd(cfg, out),
        Command::Verify => verify_cmd(cfg, out),
        Command::TimeSearch => time_search_cmd(cfg, out),
    }
}

fn propagate_cmd(cfg: &RunConfig, mut out: Emitter) -> Result<RunOutcome> {
    let p: PropagateParams = cfg.params_as()?;
    let basis = Arc::new(HermiteBasis::new(p.d, p.k, p.l, p.n)?);
    let c0 = initial_field(&p.initial_data, &basis, p.amplitude)?;
    let ct = apply_semigroup(&c0, p.t, p.beta)?;
    let u = synthesize(&ct);
    let meta = metadata(cfg, basis_meta(&basis));
    out.csv("propagate.csv", |buf| u.write_csv(buf, &meta))?;
    out.json("propagate.json", &meta, serde_json::json!({ "t": p.t, "beta": p.beta, "coeffs": ct.to_json() }))?;
    let summary = serde_json::json!({ "l2_norm_initial": c0.l2_norm(), "l2_norm_final": ct.l2_norm() });
    ok(out, summary)
}

fn solve_cmd(cfg: &RunConfig, mut out: Emitter) -> Result<RunOutcome> {
    let p: SolveParams = cfg.params_as()?;
    let basis = Arc::new(HermiteBasis::new(p.d, p.k, p.l, p.n)?);
    let u0 = initial_field(&p.initial_data, &basis, p.amplitude)?;
    let grid = TimeGrid::new(p.horizon, p.steps)?;
    let meta = metadata(cfg, basis_meta(&basis));
    match picard_solve(&u0, &p.nonlinearity, p.beta, grid, p.tol, p.max_iter) {
        Ok((traj, report)) => {
            out.json("trajectory.json", &meta, traj.to_json())?;
            out.csv("diagnostics.csv", |buf| traj.write_diagnostics_csv(buf, &meta, p.s))?;
            out.json("contraction.json", &meta, serde_json::to_value(&report)?)?;
            let summary = serde_json::json!({ "contraction": report, "endpoint_l2": traj.endpoint().l2_norm() });
            ok(out, summary)
        }
        Err(Error::NonConvergence { report }) => {
            out.json("contraction.json", &meta, serde_json::to_value(&report)?)?;
            Err(Error::NonConvergence { report })
        }
        Err(e) => Err(e),
    }
}

fn stft_cmd(cfg: &RunConfig, mut out: Emitter) -> Result<RunOutcome> {
    let p: StftParams = cfg.params_as()?;
    let spec = GridSpec::new(p.d, p.l, p.n)?;
    let f = initial_grid(&p.initial_data, &spec, p.amplitude)?;
    let g = Window::gaussian(spec);
    let lattice = PhaseGrid::with_target_steps(&spec, p.a, p.b)?;
    let table = stft(&f, &g, &lattice)?;
    let meta = metadata(cfg, serde_json::json!({ "grid": grid_meta(&spec), "lattice": lattice.meta() }));
    out.csv("stft.csv", |buf| table.write_csv(buf, &meta))?;
    let mut summary = serde_json::json!({ "nodes": lattice.len(), "density": lattice.density() });
    let mut warnings: Vec<String> = lattice.frame_density_warning().into_iter().collect();
    if p.invert {
        let back = istft(&table, &g)?;
        summary["roundtrip_relative_error"] = serde_json::json!(back.function.relative_error(&f)?);
        warnings.extend(back.warnings);
        out.csv("istft.csv", |buf| back.function.write_csv(buf, &meta))?;
    }
    summary["warnings"] = serde_json::json!(warnings);
    out.json("stft.json", &meta, summary.clone())?;
    ok(out, summary)
}

fn modnorm_cmd(cfg: &RunConfig, mut out: Emitter) -> Result<RunOutcome> {
    let p: ModnormParams = cfg.params_as()?;
    let exp = |s: &str| parse_exponent(s).map_err(Error::Schema);
    let (pe, qe) = (exp(&p.p)?, exp(&p.q)?);
    let spec = GridSpec::new(p.d, p.l, p.n)?;
    let f = initial_grid(&p.initial_data, &spec, p.amplitude)?;
    let g = Window::gaussian(spec);
    let lattice = PhaseGrid::with_target_steps(&spec, p.a, p.b)?;
    let w = Weight { kind: p.weight, s: p.s };
    let value = mod_norm_on(&f, &g, &lattice, pe, qe, &w)?;
    let report = NormReport::new(pe, qe, &w, value, &lattice);
    let meta = metadata(cfg, grid_meta(&spec));
    let body = serde_json::to_value(&report)?;
    out.json("modnorm.json", &meta, body.clone())?;
    ok(out, body)
}

fn wigner_cmd(cfg: &RunConfig, mut out: Emitter) -> Result<RunOutcome> {
    let p: WignerParams = cfg.params_as()?;
    let spec = GridSpec::new(1, p.l, p.n)?;
    let f = initial_grid(&p.f, &spec, 1.0)?;
    let g = match &p.g {
        Some(d) => initial_grid(d, &spec, 1.0)?,
        None => f.clone(),
    };
    let w = tau_wigner(&f, &g, Tau::new(p.tau)?)?;
    let meta = metadata(cfg, grid_meta(&spec));
    out.csv("wigner.csv", |buf| w.write_csv(buf, &meta))?;
    let summary = serde_json::json!({ "tau": p.tau, "integral": [w.integral().re, w.integral().im], "max_abs": w.max_abs() });
    out.json("wigner.json", &meta, summary.clone())?;
    ok(out, summary)
}

fn gabor_cmd(cfg: &RunConfig, mut out: Emitter) -> Result<RunOutcome> {
    let p: GaborParams = cfg.params_as()?;
    let symbol = Symbol::preset(&p.symbol)?;
    let tau = Tau::new(p.tau)?;
    let spec = GridSpec::new(1, p.l, p.n)?;
    let g = Window::gaussian(spec);
    if p.rays == 0 || p.z_step <= 0.0 {
        return Err(Error::Schema("rays must be positive and z_step > 0".into()));
    }
    let sampling = RaySampling::lattice(p.z_half_width, p.z_step, p.rays, 0.0, p.radii.clone());
    let sweep = gabor_sweep(&symbol, tau, &g, &sampling, p.identity)?;
    let m = p.m.unwrap_or(symbol.order);
    let mut fit = decay_fit(&sweep.samples, m, p.order, tau)?;
    fit.box_meta = serde_json::json!({ "z_half_width": p.z_half_width, "z_step": p.z_step, "rays": p.rays, "radii": p.radii });
    let meta = metadata(cfg, grid_meta(&spec));
    out.csv("gabor_sweep.csv", |buf| sweep.write_csv(buf, &meta, tau, m, p.order))?;
    let summary = serde_json::json!({
        "symbol": symbol.label,
        "pairs": sweep.samples.len(),
        "max_discrepancy": sweep.max_discrepancy(),
        "warnings": sweep.warnings,
        "fit": fit,
    });
    out.json("decay_fit.json", &meta, summary.clone())?;
    ok(out, summary)
}

fn seminorm_cmd(cfg: &RunConfig, mut out: Emitter) -> Result<RunOutcome> {
    let p: SeminormParams = cfg.params_as()?;
    let symbol = Symbol::preset(&p.symbol)?;
    let bx = SamplingBox::new(2, p.half_width, p.points, p.step)?;
    let estimate = match p.kind {
        SeminormKind::Hormander => symbol_seminorm(&symbol, p.order, p.m.unwrap_or(symbol.order), &bx)?,
        SeminormKind::Shubin => shubin_seminorm(&symbol, p.order, &bx)?,
    };
    let mut summary = serde_json::json!({ "symbol": symbol.label, "kind": p.kind, "estimate": estimate });
    if let Some(e) = p.ellipticity {
        summary["ellipticity"] = serde_json::to_value(ellipticity_check(&symbol, e.c, e.r, &bx)?)?;
    }
    let meta = metadata(cfg, bx.meta());
    out.json("seminorm.json", &meta, summary.clone())?;
    ok(out, summary)
}

/// Reads the `z…, y…, abs_direct, identity, …` rows of a sweep CSV.
pub fn read_sweep_csv(path: &Path) -> Result<Vec<GaborMatrixSample>> {
    let reader = BufReader::new(std::fs::File::open(path)?);
    let mut header: Option<Vec<String>> = None;
    let mut samples = Vec::new();
    for line in reader.lines() {
        let line = line?;
        if line.starts_with('#') || line.trim().is_empty() {
            continue;
        }
        let cells: Vec<&str> = line.split(',').collect();
        let Some(h) = &header else {
            header = Some(cells.iter().map(|c| c.to_string()).collect());
            continue;
        };
        let col = |name: &str| -> Result<f64> {
            let i = h.iter().position(|c| c == name).ok_or_else(|| Error::Schema(format!("sweep CSV lacks '{name}'")))?;
            let cell = cells.get(i).ok_or_else(|| Error::Schema("short sweep CSV row".into()))?;
            cell.parse().map_err(|_| Error::Schema(format!("bad number '{cell}'")))
        };
        let dims = h.iter().filter(|c| c.starts_with('z')).count();
        let z = (0..dims).map(|k| col(&format!("z{k}"))).collect::<Result<Vec<_>>>()?;
        let y = (0..dims).map(|k| col(&format!("y{k}"))).collect::<Result<Vec<_>>>()?;
        let identity = col("identity")?;
        samples.push(GaborMatrixSample {
            z,
            y,
            direct_value: Complex64::new(col("abs_direct")?, 0.0),
            identity_magnitude: identity.is_finite().then_some(identity),
        });
    }
    if samples.is_empty() {
        return Err(Error::Schema(format!("{}: no sweep rows", path.display())));
    }
    Ok(samples)
}

fn decay_fit_cmd(cfg: &RunConfig, mut out: Emitter) -> Result<RunOutcome> {
    let p: DecayFitParams = cfg.params_as()?;
    let samples = read_sweep_csv(&p.input)?;
    let fit = decay_fit(&samples, p.m, p.order, Tau::new(p.tau)?)?;
    let meta = metadata(cfg, serde_json::json!({ "input": p.input }));
    let body = serde_json::to_value(&fit)?;
    out.json("decay_fit.json", &meta, body.clone())?;
    ok(out, body)
}

fn verify_cmd(cfg: &RunConfig, mut out: Emitter) -> Result<RunOutcome> {
    let p: VerifyParams = cfg.params_as()?;
    let report = run_suite(&p.suite, cfg.seed)?;
    let meta = metadata(cfg, serde_json::Value::Null);
    let body = serde_json::to_value(&report)?;
    out.json(&format!("verify_{}.json", p.suite), &meta, body.clone())?;
    let exit_code = if report.overall { 0 } else { 1 };
    Ok(RunOutcome { files: out.files, summary: body, exit_code })
}

fn time_search_cmd(cfg: &RunConfig, mut out: Emitter) -> Result<RunOutcome> {
    let p: TimeSearchParams = cfg.params_as()?;
    let basis = Arc::new(HermiteBasis::new(p.d, p.k, p.l, p.n)?);
    let u0 = initial_field(&p.initial_data, &basis, p.amplitude)?;
    let search = local_time_search(&u0, &p.nonlinearity, p.beta, &p.options)?;
    let meta = metadata(cfg, basis_meta(&basis));
    let body = serde_json::to_value(&search)?;
    out.json("time_search.json", &meta, body.clone())?;
    ok(out, serde_json::json!({ "t_est": search.t_est, "probes": search.probes.len() }))
}

/// Sizes the global rayon pool from `MODHEAT_THREADS` when it is set.
pub fn init_threads_from_env() -> Result<()> {
    let Ok(value) = std::env::var("MODHEAT_THREADS") else {
        return Ok(());
    };
    let threads: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| Error::Schema(format!("MODHEAT_THREADS must be a positive integer, got '{value}'")))?;
    // a pool that already exists keeps its size
    let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    Ok(())
}
