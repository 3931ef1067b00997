//! Inverse problem: fit the free physical parameters of the chain
//! (κ, η_mid, δ, n_pump, θ_rms, η_inject) to a record of measured
//! observables, with a brute-force grid oracle validating the optimizer and
//! a finite-difference sensitivity matrix exposing non-identifiable
//! directions.
//!
//! Jitter enters the forward model wherever the seed path is involved: the
//! scanned parametric gains and the bright-beam noise levels are
//! Gaussian-phase-averaged with θ_rms, while the squeezed-vacuum levels
//! (seed blocked) are jitter-free.

use crate::chain::{downstream_loss, gain_extrema, opa_transform, ChainConfig, OpaParams};
use crate::gaussian::{DbValue, QuadratureState, DEFAULT_WAVELENGTH_M};
use crate::homodyne::jitter_averaged_variance;
use crate::pipeline::fmt_e9;
use crate::simplex::{minimize, SimplexOptions};
use std::f64::consts::PI;
use thiserror::Error;

pub const N_PARAMS: usize = 6;
pub const PARAM_NAMES: [&str; N_PARAMS] = [
    "kappa",
    "eta_mid",
    "delta",
    "n_pump",
    "theta_rms",
    "eta_inject",
];

pub const N_OBSERVABLES: usize = 9;
pub const OBSERVABLE_NAMES: [&str; N_OBSERVABLES] = [
    "gain_max",
    "gain_min",
    "vac_squeeze_db",
    "vac_antisqueeze_db",
    "bsl_squeeze_db",
    "bsl_antisqueeze_db",
    "unpumped_out_w",
    "amplified_out_w",
    "bsl_out_w",
];

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FitError {
    #[error("bounds for {name} are empty: lo {lo} > hi {hi}")]
    EmptyBounds { name: &'static str, lo: f64, hi: f64 },
    #[error("objective is not finite at the requested point")]
    NonFiniteObjective,
    #[error("grid of {points} points exceeds the 1e8 evaluation cap")]
    GridTooLarge { points: u128 },
    #[error("grid oracle needs n_per_axis >= 3, got {0}")]
    GridTooCoarse(usize),
    #[error("parameter {name} = {value} is on or outside the bounds boundary")]
    ParamOnBoundary { name: &'static str, value: f64 },
    #[error("invalid measurement record: {0}")]
    InvalidRecord(String),
}

/// Free parameter vector of the inverse problem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitParams {
    pub kappa: f64,
    pub eta_mid: f64,
    pub delta: f64,
    pub n_pump: f64,
    pub theta_rms: f64,
    pub eta_inject: f64,
}

impl FitParams {
    pub fn to_array(&self) -> [f64; N_PARAMS] {
        [
            self.kappa,
            self.eta_mid,
            self.delta,
            self.n_pump,
            self.theta_rms,
            self.eta_inject,
        ]
    }

    pub fn from_array(a: &[f64]) -> FitParams {
        FitParams {
            kappa: a[0],
            eta_mid: a[1],
            delta: a[2],
            n_pump: a[3],
            theta_rms: a[4],
            eta_inject: a[5],
        }
    }

    /// Amplifier parameters at a given total waveguide transmission.
    pub fn opa_params(&self, eta_wg: f64) -> OpaParams {
        OpaParams {
            kappa: self.kappa,
            eta_mid: self.eta_mid,
            delta: self.delta,
            n_pump: self.n_pump,
            eta_wg,
            eta_inject: self.eta_inject,
        }
    }

    /// Parameters packed into a chain's amplifier slot plus its jitter field.
    pub fn from_chain(cfg: &ChainConfig) -> FitParams {
        FitParams {
            kappa: cfg.opa.kappa,
            eta_mid: cfg.opa.eta_mid,
            delta: cfg.opa.delta,
            n_pump: cfg.opa.n_pump,
            theta_rms: cfg.phase_jitter_rms,
            eta_inject: cfg.opa.eta_inject,
        }
    }
}

/// Box bounds on the parameter vector. Collapsed axes (`lo == hi`) pin a
/// parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParamBounds {
    pub lo: FitParams,
    pub hi: FitParams,
}

impl ParamBounds {
    /// Default search box. The inter-pass transmission is bounded below by
    /// the total waveguide transmission so the residual output loss stays
    /// physical; the injection factor spans the plausible coupler-tap range.
    pub fn default_box(eta_wg: f64) -> ParamBounds {
        ParamBounds {
            lo: FitParams {
                kappa: 0.0,
                eta_mid: eta_wg,
                delta: -PI,
                n_pump: 0.0,
                theta_rms: 0.0,
                eta_inject: 0.3,
            },
            hi: FitParams {
                kappa: 5.0,
                eta_mid: 1.0,
                delta: PI,
                n_pump: 2.0,
                theta_rms: 1.0,
                eta_inject: 1.0,
            },
        }
    }

    pub fn collapse(&mut self, name: &str, value: f64) {
        let idx = PARAM_NAMES.iter().position(|n| *n == name);
        if let Some(idx) = idx {
            let mut lo = self.lo.to_array();
            let mut hi = self.hi.to_array();
            lo[idx] = value;
            hi[idx] = value;
            self.lo = FitParams::from_array(&lo);
            self.hi = FitParams::from_array(&hi);
        }
    }

    pub fn validate(&self) -> Result<(), FitError> {
        let lo = self.lo.to_array();
        let hi = self.hi.to_array();
        for j in 0..N_PARAMS {
            if lo[j] > hi[j] || !lo[j].is_finite() || !hi[j].is_finite() {
                return Err(FitError::EmptyBounds {
                    name: PARAM_NAMES[j],
                    lo: lo[j],
                    hi: hi[j],
                });
            }
        }
        Ok(())
    }

    pub fn center(&self) -> FitParams {
        let lo = self.lo.to_array();
        let hi = self.hi.to_array();
        let mut c = [0.0; N_PARAMS];
        for j in 0..N_PARAMS {
            c[j] = 0.5 * (lo[j] + hi[j]);
        }
        FitParams::from_array(&c)
    }
}

/// One measured scalar with its absolute tolerance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Measured {
    pub value: f64,
    pub tol: f64,
}

impl Measured {
    pub fn new(value: f64, tol: f64) -> Measured {
        Measured { value, tol }
    }
}

/// Observed scalars the fit targets, plus the two input powers they were
/// recorded at.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasurementRecord {
    pub gain_max: Measured,
    pub gain_min: Measured,
    pub vac_squeeze_db: Measured,
    pub vac_antisqueeze_db: Measured,
    pub bsl_squeeze_db: Measured,
    pub bsl_antisqueeze_db: Measured,
    pub unpumped_out_w: Measured,
    pub amplified_out_w: Measured,
    pub bsl_out_w: Measured,
    pub seed_in_w: f64,
    pub pump_w: f64,
}

/// Default weighting: gains to 0.05 absolute, noise levels to 0.1 dB,
/// powers to 5 % relative.
pub const GAIN_TOL: f64 = 0.05;
pub const DB_TOL: f64 = 0.1;
pub const POWER_REL_TOL: f64 = 0.05;

impl MeasurementRecord {
    /// The measured operating point of the reference experiment.
    pub fn reference() -> MeasurementRecord {
        MeasurementRecord {
            gain_max: Measured::new(5.06, GAIN_TOL),
            gain_min: Measured::new(0.62, GAIN_TOL),
            vac_squeeze_db: Measured::new(-1.85, DB_TOL),
            vac_antisqueeze_db: Measured::new(2.7, DB_TOL),
            bsl_squeeze_db: Measured::new(-1.04, DB_TOL),
            bsl_antisqueeze_db: Measured::new(2.0, DB_TOL),
            unpumped_out_w: Measured::new(29e-6, 29e-6 * POWER_REL_TOL),
            amplified_out_w: Measured::new(147e-6, 147e-6 * POWER_REL_TOL),
            bsl_out_w: Measured::new(18e-6, 18e-6 * POWER_REL_TOL),
            seed_in_w: 80e-6,
            pump_w: 60e-3,
        }
    }

    pub fn observables(&self) -> [Measured; N_OBSERVABLES] {
        [
            self.gain_max,
            self.gain_min,
            self.vac_squeeze_db,
            self.vac_antisqueeze_db,
            self.bsl_squeeze_db,
            self.bsl_antisqueeze_db,
            self.unpumped_out_w,
            self.amplified_out_w,
            self.bsl_out_w,
        ]
    }

    pub fn validate(&self) -> Result<(), FitError> {
        if !(self.gain_max.value > 1.0 && 1.0 > self.gain_min.value && self.gain_min.value > 0.0) {
            return Err(FitError::InvalidRecord(format!(
                "gains must satisfy max > 1 > min > 0, got {} and {}",
                self.gain_max.value, self.gain_min.value
            )));
        }
        for (name, m) in [
            ("vac_squeeze_db", self.vac_squeeze_db),
            ("bsl_squeeze_db", self.bsl_squeeze_db),
        ] {
            if m.value >= 0.0 {
                return Err(FitError::InvalidRecord(format!(
                    "{name} must be negative, got {}",
                    m.value
                )));
            }
        }
        for (name, m) in [
            ("vac_antisqueeze_db", self.vac_antisqueeze_db),
            ("bsl_antisqueeze_db", self.bsl_antisqueeze_db),
        ] {
            if m.value <= 0.0 {
                return Err(FitError::InvalidRecord(format!(
                    "{name} must be positive, got {}",
                    m.value
                )));
            }
        }
        for (j, m) in self.observables().iter().enumerate() {
            if m.tol <= 0.0 {
                return Err(FitError::InvalidRecord(format!(
                    "tolerance for {} must be positive, got {}",
                    OBSERVABLE_NAMES[j], m.tol
                )));
            }
        }
        Ok(())
    }

    /// Structured text document, same `path = value` family as the pipeline
    /// config format.
    pub fn to_text_doc(&self) -> String {
        let mut out = String::new();
        for (j, m) in self.observables().iter().enumerate() {
            out.push_str(&format!(
                "measurement.{} = {}\nmeasurement.{}_tol = {}\n",
                OBSERVABLE_NAMES[j],
                fmt_e9(m.value),
                OBSERVABLE_NAMES[j],
                fmt_e9(m.tol)
            ));
        }
        out.push_str(&format!("measurement.seed_in_w = {}\n", fmt_e9(self.seed_in_w)));
        out.push_str(&format!("measurement.pump_w = {}\n", fmt_e9(self.pump_w)));
        out
    }
}

/// Forward-model output, one entry per fitted observable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Predictions {
    pub gain_max: f64,
    pub gain_min: f64,
    pub vac_squeeze_db: f64,
    pub vac_antisqueeze_db: f64,
    pub bsl_squeeze_db: f64,
    pub bsl_antisqueeze_db: f64,
    pub unpumped_out_w: f64,
    pub amplified_out_w: f64,
    pub bsl_out_w: f64,
}

impl Predictions {
    pub fn to_array(&self) -> [f64; N_OBSERVABLES] {
        [
            self.gain_max,
            self.gain_min,
            self.vac_squeeze_db,
            self.vac_antisqueeze_db,
            self.bsl_squeeze_db,
            self.bsl_antisqueeze_db,
            self.unpumped_out_w,
            self.amplified_out_w,
            self.bsl_out_w,
        ]
    }
}

fn jitter_weight(theta_rms: f64) -> f64 {
    0.5 * (1.0 + (-2.0 * theta_rms * theta_rms).exp())
}

/// Run the full chain at one parameter point and predict every observable:
/// a vacuum-seeded pass for the squeezed-vacuum noise levels and a
/// coherent-seeded pass for the gains, output powers, and bright-beam noise
/// levels.
pub fn forward_observables(params: &FitParams, cfg: &ChainConfig) -> Predictions {
    let opa = params.opa_params(cfg.opa.eta_wg);
    let pump = cfg.pump_power_w;
    let w = jitter_weight(params.theta_rms);

    // Scanned parametric gains: phase-averaged extrema of the gain curve.
    let (g_hi, g_lo) = gain_extrema(&opa, pump);
    let gain_max = w * g_hi + (1.0 - w) * g_lo;
    let gain_min = w * g_lo + (1.0 - w) * g_hi;

    // Vacuum-seeded pass: the seed path is blocked, so its jitter does not
    // enter; detected levels are the clean covariance extrema.
    let vac = downstream_loss(&opa_transform(&QuadratureState::vacuum(), &opa, pump, 0.0), cfg);
    let (v_lo, v_hi) = vac.cov().eigenvalues();
    let vac_squeeze_db = DbValue::from_variance(v_lo).expect("positive variance").db();
    let vac_antisqueeze_db = DbValue::from_variance(v_hi).expect("positive variance").db();

    // Coherent-seeded pass.
    let seed = QuadratureState::coherent(cfg.seed_power_w, DEFAULT_WAVELENGTH_M)
        .expect("nonnegative seed power");
    let unpumped_out_w = opa_transform(&seed, &opa, 0.0, 0.0).optical_power();
    let bright = downstream_loss(&opa_transform(&seed, &opa, pump, 0.0), cfg);
    let (b_lo, b_hi) = bright.cov().eigenvalues();
    let bsl_min = jitter_averaged_variance(b_lo, b_hi, params.theta_rms)
        .expect("ordered eigenvalues");
    let bsl_max = w * b_hi + (1.0 - w) * b_lo;
    let bsl_squeeze_db = DbValue::from_variance(bsl_min).expect("positive variance").db();
    let bsl_antisqueeze_db = DbValue::from_variance(bsl_max).expect("positive variance").db();

    Predictions {
        gain_max,
        gain_min,
        vac_squeeze_db,
        vac_antisqueeze_db,
        bsl_squeeze_db,
        bsl_antisqueeze_db,
        unpumped_out_w,
        amplified_out_w: unpumped_out_w * gain_max,
        bsl_out_w: unpumped_out_w * gain_min,
    }
}

/// Tolerance-normalized residuals, `(model − measured) / tol` per
/// observable.
pub fn residuals(pred: &Predictions, record: &MeasurementRecord) -> [f64; N_OBSERVABLES] {
    let p = pred.to_array();
    let m = record.observables();
    let mut r = [0.0; N_OBSERVABLES];
    for j in 0..N_OBSERVABLES {
        r[j] = (p[j] - m[j].value) / m[j].tol;
    }
    r
}

/// Sum of squared tolerance-normalized residuals.
pub fn objective(params: &FitParams, record: &MeasurementRecord, cfg: &ChainConfig) -> f64 {
    residuals(&forward_observables(params, cfg), record)
        .iter()
        .map(|r| r * r)
        .sum()
}

/// Measurement conditions folded into the chain description: the record's
/// input powers override whatever the config carried.
fn measurement_chain(record: &MeasurementRecord, cfg: &ChainConfig) -> ChainConfig {
    ChainConfig {
        seed_power_w: record.seed_in_w,
        pump_power_w: record.pump_w,
        ..*cfg
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub params: FitParams,
    pub predictions: Predictions,
    /// Per-observable `(model − measured)/tolerance`, in `OBSERVABLE_NAMES`
    /// order.
    pub residuals: [f64; N_OBSERVABLES],
    pub objective: f64,
    pub iterations: usize,
    pub evaluations: usize,
    pub converged: bool,
}

impl FitResult {
    /// Observables whose normalized residual magnitude exceeds 1: the
    /// targets the best-fit point fails to reproduce within tolerance.
    pub fn violations(&self) -> Vec<&'static str> {
        self.residuals
            .iter()
            .enumerate()
            .filter(|(_, r)| r.abs() > 1.0)
            .map(|(j, _)| OBSERVABLE_NAMES[j])
            .collect()
    }

    /// Structured text document, same `path = value` family as the pipeline
    /// config format.
    pub fn to_text_doc(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("fit.objective = {}\n", fmt_e9(self.objective)));
        out.push_str(&format!("fit.iterations = {}\n", self.iterations));
        out.push_str(&format!("fit.evaluations = {}\n", self.evaluations));
        out.push_str(&format!("fit.converged = \"{}\"\n", self.converged));
        let p = self.params.to_array();
        for j in 0..N_PARAMS {
            out.push_str(&format!("params.{} = {}\n", PARAM_NAMES[j], fmt_e9(p[j])));
        }
        let pred = self.predictions.to_array();
        for j in 0..N_OBSERVABLES {
            out.push_str(&format!(
                "predicted.{} = {}\n",
                OBSERVABLE_NAMES[j],
                fmt_e9(pred[j])
            ));
        }
        for j in 0..N_OBSERVABLES {
            out.push_str(&format!(
                "residual.{} = {}\n",
                OBSERVABLE_NAMES[j],
                fmt_e9(self.residuals[j])
            ));
        }
        out.push_str(&format!("violations = \"{}\"\n", self.violations().join(",")));
        out
    }

    /// Flat CSV of residuals, one row per observable.
    pub fn residuals_csv(&self, record: &MeasurementRecord) -> String {
        let mut out = String::from("observable,measured,tolerance,predicted,residual\n");
        let m = record.observables();
        let p = self.predictions.to_array();
        for j in 0..N_OBSERVABLES {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                OBSERVABLE_NAMES[j],
                fmt_e9(m[j].value),
                fmt_e9(m[j].tol),
                fmt_e9(p[j]),
                fmt_e9(self.residuals[j])
            ));
        }
        out
    }
}

/// Halton low-discrepancy point in [0, 1].
fn halton(mut index: u64, base: u64) -> f64 {
    let mut f = 1.0;
    let mut r = 0.0;
    while index > 0 {
        f /= base as f64;
        r += f * (index % base) as f64;
        index /= base;
    }
    r
}

const HALTON_BASES: [u64; N_PARAMS] = [2, 3, 5, 7, 11, 13];

/// Number of quasi-random multistart points used by `fit`.
pub const FIT_RESTARTS: usize = 8;

/// Minimize the sum of squared tolerance-normalized residuals with a
/// bounded simplex search restarted from quasi-random points, then polished
/// from the best basin. Deterministic: the start list is a Halton sequence.
pub fn fit(
    record: &MeasurementRecord,
    cfg: &ChainConfig,
    bounds: &ParamBounds,
    seed_guess: Option<FitParams>,
) -> Result<FitResult, FitError> {
    record.validate()?;
    bounds.validate()?;
    let chain = measurement_chain(record, cfg);
    let lo = bounds.lo.to_array();
    let hi = bounds.hi.to_array();

    let f = |x: &[f64]| {
        let v = objective(&FitParams::from_array(x), record, &chain);
        if v.is_finite() {
            v
        } else {
            1e300
        }
    };

    let mut starts: Vec<[f64; N_PARAMS]> = Vec::new();
    starts.push(bounds.center().to_array());
    if let Some(guess) = seed_guess {
        let mut g = guess.to_array();
        for j in 0..N_PARAMS {
            g[j] = g[j].clamp(lo[j], hi[j]);
        }
        starts.push(g);
    }
    for k in 0..FIT_RESTARTS {
        let mut p = [0.0; N_PARAMS];
        for j in 0..N_PARAMS {
            p[j] = lo[j] + halton((k + 1) as u64, HALTON_BASES[j]) * (hi[j] - lo[j]);
        }
        starts.push(p);
    }

    let coarse = SimplexOptions {
        max_iterations: 2000,
        f_tolerance: 1e-12,
        x_tolerance: 1e-9,
    };
    let step: Vec<f64> = (0..N_PARAMS).map(|j| 0.08 * (hi[j] - lo[j])).collect();

    let mut iterations = 0;
    let mut evaluations = 0;
    let mut best: Option<crate::simplex::SimplexResult> = None;
    for start in &starts {
        let r = minimize(f, start, &step, &lo, &hi, &coarse);
        iterations += r.iterations;
        evaluations += r.evaluations;
        let better = match &best {
            None => true,
            Some(b) => r.fx < b.fx,
        };
        if better {
            best = Some(r);
        }
    }
    let best = best.expect("at least one start");

    let polish_opts = SimplexOptions {
        max_iterations: 6000,
        f_tolerance: 1e-15,
        x_tolerance: 1e-12,
    };
    let polish_step: Vec<f64> = (0..N_PARAMS).map(|j| 0.005 * (hi[j] - lo[j])).collect();
    let polished = minimize(f, &best.x, &polish_step, &lo, &hi, &polish_opts);
    iterations += polished.iterations;
    evaluations += polished.evaluations;

    let (final_x, final_fx, converged) = if polished.fx <= best.fx {
        (polished.x, polished.fx, polished.converged)
    } else {
        (best.x, best.fx, best.converged)
    };
    if !final_fx.is_finite() {
        return Err(FitError::NonFiniteObjective);
    }

    let params = FitParams::from_array(&final_x);
    let predictions = forward_observables(&params, &chain);
    let res = residuals(&predictions, record);
    Ok(FitResult {
        params,
        predictions,
        residuals: res,
        objective: final_fx,
        iterations,
        evaluations,
        converged,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridBest {
    pub params: FitParams,
    pub objective: f64,
    pub evaluated: usize,
}

/// Exhaustive objective evaluation over the Cartesian grid spanned by the
/// bounds; the deterministic lower-bound check for `fit`. Collapsed axes
/// contribute a single grid value.
pub fn grid_oracle(
    record: &MeasurementRecord,
    cfg: &ChainConfig,
    bounds: &ParamBounds,
    n_per_axis: usize,
) -> Result<GridBest, FitError> {
    if n_per_axis < 3 {
        return Err(FitError::GridTooCoarse(n_per_axis));
    }
    record.validate()?;
    bounds.validate()?;
    let chain = measurement_chain(record, cfg);
    let lo = bounds.lo.to_array();
    let hi = bounds.hi.to_array();

    let axes: Vec<Vec<f64>> = (0..N_PARAMS)
        .map(|j| {
            if hi[j] > lo[j] {
                (0..n_per_axis)
                    .map(|k| lo[j] + (hi[j] - lo[j]) * k as f64 / (n_per_axis - 1) as f64)
                    .collect()
            } else {
                vec![lo[j]]
            }
        })
        .collect();

    let total: u128 = axes.iter().map(|a| a.len() as u128).product();
    if total > 100_000_000 {
        return Err(FitError::GridTooLarge { points: total });
    }

    let mut idx = [0usize; N_PARAMS];
    let mut best_obj = f64::INFINITY;
    let mut best_point = [0.0; N_PARAMS];
    let mut evaluated = 0usize;
    loop {
        let mut x = [0.0; N_PARAMS];
        for j in 0..N_PARAMS {
            x[j] = axes[j][idx[j]];
        }
        let obj = objective(&FitParams::from_array(&x), record, &chain);
        evaluated += 1;
        if obj < best_obj {
            best_obj = obj;
            best_point = x;
        }
        // Odometer increment.
        let mut j = 0;
        loop {
            idx[j] += 1;
            if idx[j] < axes[j].len() {
                break;
            }
            idx[j] = 0;
            j += 1;
            if j == N_PARAMS {
                return Ok(GridBest {
                    params: FitParams::from_array(&best_point),
                    objective: best_obj,
                    evaluated,
                });
            }
        }
    }
}

/// Finite-difference sensitivity of every observable to every parameter.
#[derive(Debug, Clone, PartialEq)]
pub struct SensitivityMatrix {
    /// `matrix[i][j] = ∂observable_i / ∂param_j` at the expansion point.
    pub matrix: [[f64; N_PARAMS]; N_OBSERVABLES],
    /// Step used per parameter, as a fraction of the bound width.
    pub step_fraction: f64,
}

impl SensitivityMatrix {
    /// Columns with (dimensionless) norm below the threshold: parameters the
    /// observables cannot see at this point.
    pub fn non_identifiable(
        &self,
        record: &MeasurementRecord,
        bounds: &ParamBounds,
    ) -> [bool; N_PARAMS] {
        let m = record.observables();
        let lo = bounds.lo.to_array();
        let hi = bounds.hi.to_array();
        let mut flags = [false; N_PARAMS];
        for j in 0..N_PARAMS {
            let width = hi[j] - lo[j];
            let mut norm2 = 0.0;
            for i in 0..N_OBSERVABLES {
                let scaled = self.matrix[i][j] * width / m[i].tol;
                norm2 += scaled * scaled;
            }
            flags[j] = norm2.sqrt() < 1e-6;
        }
        flags
    }
}

/// Central-difference sensitivity with step `step_fraction` of each bound
/// width (1e-5 by default via `sensitivity`). The expansion point must be
/// interior to the bounds by at least one step on every axis.
pub fn sensitivity_with_step(
    params: &FitParams,
    cfg: &ChainConfig,
    bounds: &ParamBounds,
    step_fraction: f64,
) -> Result<SensitivityMatrix, FitError> {
    bounds.validate()?;
    let lo = bounds.lo.to_array();
    let hi = bounds.hi.to_array();
    let x = params.to_array();
    for j in 0..N_PARAMS {
        let h = step_fraction * (hi[j] - lo[j]);
        if hi[j] <= lo[j] || x[j] - h <= lo[j] || x[j] + h >= hi[j] {
            return Err(FitError::ParamOnBoundary {
                name: PARAM_NAMES[j],
                value: x[j],
            });
        }
    }

    let mut matrix = [[0.0; N_PARAMS]; N_OBSERVABLES];
    for j in 0..N_PARAMS {
        let h = step_fraction * (hi[j] - lo[j]);
        let mut xp = x;
        let mut xm = x;
        xp[j] += h;
        xm[j] -= h;
        let fp = forward_observables(&FitParams::from_array(&xp), cfg).to_array();
        let fm = forward_observables(&FitParams::from_array(&xm), cfg).to_array();
        for i in 0..N_OBSERVABLES {
            matrix[i][j] = (fp[i] - fm[i]) / (2.0 * h);
        }
    }
    Ok(SensitivityMatrix {
        matrix,
        step_fraction,
    })
}

/// `sensitivity_with_step` at the standard 1e-5 step fraction.
pub fn sensitivity(
    params: &FitParams,
    cfg: &ChainConfig,
    bounds: &ParamBounds,
) -> Result<SensitivityMatrix, FitError> {
    sensitivity_with_step(params, cfg, bounds, 1e-5)
}

/// Build a noiseless synthetic record from a known parameter point, with the
/// default tolerance scheme. Round-trip material for identifiability tests.
pub fn synthetic_record(params: &FitParams, cfg: &ChainConfig) -> MeasurementRecord {
    let chain = ChainConfig { ..*cfg };
    let p = forward_observables(params, &chain);
    MeasurementRecord {
        gain_max: Measured::new(p.gain_max, GAIN_TOL),
        gain_min: Measured::new(p.gain_min, GAIN_TOL),
        vac_squeeze_db: Measured::new(p.vac_squeeze_db, DB_TOL),
        vac_antisqueeze_db: Measured::new(p.vac_antisqueeze_db, DB_TOL),
        bsl_squeeze_db: Measured::new(p.bsl_squeeze_db, DB_TOL),
        bsl_antisqueeze_db: Measured::new(p.bsl_antisqueeze_db, DB_TOL),
        unpumped_out_w: Measured::new(p.unpumped_out_w, p.unpumped_out_w * POWER_REL_TOL),
        amplified_out_w: Measured::new(p.amplified_out_w, p.amplified_out_w * POWER_REL_TOL),
        bsl_out_w: Measured::new(p.bsl_out_w, p.bsl_out_w * POWER_REL_TOL),
        seed_in_w: chain.seed_power_w,
        pump_w: chain.pump_power_w,
    }
}
