//! Experiment orchestration: dispatch a parsed config to the simulator,
//! produce scalar reports, time-domain traces, parameter sweeps, and fit
//! documents, and serialize them as CSV or JSON.

use crate::chain::{opa_transform, scan_gain_trace, ChainError};
use crate::config::{ExperimentConfig, Mode, OutputFormat};
use crate::gaussian::{QuadratureState, DEFAULT_WAVELENGTH_M};
use crate::homodyne::{dc_lock_phase, scan_trace, HomodyneError, ScanTrace};
use crate::inference::{
    fit, forward_observables, FitError, FitParams, FitResult, MeasurementRecord,
};
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("config: {0}")]
    Config(#[from] crate::config::ConfigError),
    #[error("chain: {0}")]
    Chain(#[from] ChainError),
    #[error("homodyne: {0}")]
    Homodyne(#[from] HomodyneError),
    #[error("fit: {0}")]
    Fit(#[from] FitError),
    #[error("mode {0} has no {1} output; nothing to emit")]
    ModeMismatch(&'static str, &'static str),
    #[error("sweep section missing from config")]
    SweepMissing,
    #[error("sweep path `{0}` does not address a numeric field")]
    SweepPath(String),
    #[error("fit mode requires a measurement section")]
    MeasurementMissing,
}

/// C-style `%.9e` formatting used by every CSV emitter.
pub fn fmt_e9(x: f64) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    let s = format!("{x:.9e}");
    let (mantissa, exp) = s.split_once('e').expect("exponent in {:.9e} output");
    let exp: i32 = exp.parse().expect("integer exponent");
    format!(
        "{}e{}{:02}",
        mantissa,
        if exp < 0 { '-' } else { '+' },
        exp.abs()
    )
}

/// Scalar report of one simulated operating point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub mode: &'static str,
    pub squeeze_db: f64,
    pub antisqueeze_db: f64,
    pub output_power_w: f64,
    pub lock_phase_rad: f64,
    pub gain_max: f64,
    pub gain_min: f64,
    pub total_efficiency: f64,
}

pub const REPORT_COLUMNS: [&str; 8] = [
    "mode",
    "squeeze_db",
    "antisqueeze_db",
    "output_power_w",
    "lock_phase_rad",
    "gain_max",
    "gain_min",
    "total_efficiency",
];

impl Report {
    fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{}",
            self.mode,
            fmt_e9(self.squeeze_db),
            fmt_e9(self.antisqueeze_db),
            fmt_e9(self.output_power_w),
            fmt_e9(self.lock_phase_rad),
            fmt_e9(self.gain_max),
            fmt_e9(self.gain_min),
            fmt_e9(self.total_efficiency)
        )
    }

    pub fn to_csv(&self) -> String {
        format!("{}\n{}\n", REPORT_COLUMNS.join(","), self.csv_row())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Deamplification lock phase for the configured chain. A hypothetical unit
/// probe stands in when the configured seed is dark, so the lock point is
/// defined for every mode.
fn lock_phase(cfg: &ExperimentConfig) -> f64 {
    let probe_power = if cfg.chain.seed_power_w > 0.0 {
        cfg.chain.seed_power_w
    } else {
        1e-6
    };
    let probe = QuadratureState::coherent(probe_power, DEFAULT_WAVELENGTH_M)
        .expect("positive probe power");
    dc_lock_phase(&probe, &cfg.chain.opa, cfg.chain.pump_power_w)
        .expect("probe carries amplitude")
}

/// Scalar report for the configured mode. Vacuum-mode noise levels are the
/// clean covariance extrema (the seed path, the jitter source, is dark);
/// bright-mode levels and all scanned gains are jitter-averaged with the
/// chain's phase_jitter_rms.
pub fn simulate_report(cfg: &ExperimentConfig) -> Result<Report, PipelineError> {
    let params = FitParams::from_chain(&cfg.chain);
    let pred = forward_observables(&params, &cfg.chain);
    let lock = lock_phase(cfg);
    let common = |squeeze_db, antisqueeze_db, output_power_w| Report {
        mode: cfg.mode.as_str(),
        squeeze_db,
        antisqueeze_db,
        output_power_w,
        lock_phase_rad: lock,
        gain_max: pred.gain_max,
        gain_min: pred.gain_min,
        total_efficiency: cfg.chain.total_efficiency(),
    };
    let report = match cfg.mode {
        Mode::VacuumSqueeze => common(pred.vac_squeeze_db, pred.vac_antisqueeze_db, 0.0),
        Mode::BrightSqueeze | Mode::GainScan => {
            common(pred.bsl_squeeze_db, pred.bsl_antisqueeze_db, pred.bsl_out_w)
        }
        Mode::Fit => {
            return Err(PipelineError::ModeMismatch("fit", "report"));
        }
    };
    Ok(report)
}

/// Gain trace samples for gain_scan mode, spanning one waveform period.
pub fn gain_trace(cfg: &ExperimentConfig) -> Result<Vec<(f64, f64)>, PipelineError> {
    let period = cfg.waveform.period().unwrap_or(1.0);
    let n = ((period * cfg.scan.sample_rate_hz).round() as usize).max(2);
    Ok(scan_gain_trace(
        &cfg.chain.opa,
        cfg.chain.pump_power_w,
        &cfg.waveform,
        n,
    )?)
}

/// Homodyne noise trace for vacuum or bright mode. The state handed to the
/// detector is the amplifier output after fiber loss; interference and
/// detector efficiencies are applied inside the detector model.
pub fn noise_trace(cfg: &ExperimentConfig) -> Result<ScanTrace, PipelineError> {
    let (seed, theta_rms, seed_phase) = match cfg.mode {
        Mode::VacuumSqueeze => (QuadratureState::vacuum(), 0.0, 0.0),
        Mode::BrightSqueeze => {
            let lock = lock_phase(cfg);
            (
                QuadratureState::coherent(cfg.chain.seed_power_w, DEFAULT_WAVELENGTH_M)
                    .expect("validated seed power"),
                cfg.chain.phase_jitter_rms,
                lock,
            )
        }
        Mode::GainScan => return Err(PipelineError::ModeMismatch("gain_scan", "noise trace")),
        Mode::Fit => return Err(PipelineError::ModeMismatch("fit", "noise trace")),
    };
    let state = opa_transform(&seed, &cfg.chain.opa, cfg.chain.pump_power_w, seed_phase)
        .loss(cfg.chain.eta_fiber)
        .expect("validated fiber transmission");
    Ok(scan_trace(
        &state,
        &cfg.waveform,
        &cfg.bhd,
        cfg.scan.duration_s,
        cfg.scan.sample_rate_hz,
        theta_rms,
        cfg.rng_seed,
    )?)
}

/// Fit the configured measurement record, seeding the optimizer from the
/// chain's own parameter values.
pub fn run_fit(cfg: &ExperimentConfig) -> Result<(FitResult, MeasurementRecord), PipelineError> {
    let record = cfg
        .measurement
        .ok_or(PipelineError::MeasurementMissing)?;
    let guess = FitParams::from_chain(&cfg.chain);
    let result = fit(&record, &cfg.chain, &cfg.fit_bounds, Some(guess))?;
    Ok((result, record))
}

/// Everything `run` can produce, by mode.
#[derive(Debug)]
pub enum RunOutput {
    Report(Report),
    GainTrace(Vec<(f64, f64)>),
    Fit(Box<(FitResult, MeasurementRecord)>),
}

/// Dispatch a config by its mode: scalar reports for the squeeze modes, a
/// gain trace for gain_scan, a fit document for fit.
pub fn run(cfg: &ExperimentConfig) -> Result<RunOutput, PipelineError> {
    log::debug!("run mode={} seed={}", cfg.mode.as_str(), cfg.rng_seed);
    match cfg.mode {
        Mode::VacuumSqueeze | Mode::BrightSqueeze => {
            Ok(RunOutput::Report(simulate_report(cfg)?))
        }
        Mode::GainScan => Ok(RunOutput::GainTrace(gain_trace(cfg)?)),
        Mode::Fit => Ok(RunOutput::Fit(Box::new(run_fit(cfg)?))),
    }
}

/// One sweep table: the swept path and one report per grid value.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub param_path: String,
    pub rows: Vec<(f64, Report)>,
}

impl SweepTable {
    pub fn to_csv(&self) -> String {
        let mut out = format!("{},{}\n", self.param_path, REPORT_COLUMNS.join(","));
        for (value, report) in &self.rows {
            out.push_str(&format!("{},{}\n", fmt_e9(*value), report.csv_row()));
        }
        out
    }

    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Row<'a> {
            value: f64,
            #[serde(flatten)]
            report: &'a Report,
        }
        #[derive(Serialize)]
        struct Doc<'a> {
            param_path: &'a str,
            rows: Vec<Row<'a>>,
        }
        let doc = Doc {
            param_path: &self.param_path,
            rows: self
                .rows
                .iter()
                .map(|(value, report)| Row {
                    value: *value,
                    report,
                })
                .collect(),
        };
        serde_json::to_string_pretty(&doc).expect("sweep serializes")
    }
}

/// Evaluate the report at every grid point of the configured sweep. Rows are
/// independent and emitted in grid order.
pub fn sweep(cfg: &ExperimentConfig) -> Result<SweepTable, PipelineError> {
    let spec = cfg.sweep.clone().ok_or(PipelineError::SweepMissing)?;
    let mut rows = Vec::with_capacity(spec.n_points);
    for k in 0..spec.n_points {
        let t = k as f64 / (spec.n_points - 1) as f64;
        let value = spec.start + t * (spec.stop - spec.start);
        let mut point = cfg.clone();
        *point
            .numeric_field_mut(&spec.path)
            .ok_or_else(|| PipelineError::SweepPath(spec.path.clone()))? = value;
        rows.push((value, simulate_report(&point)?));
    }
    Ok(SweepTable {
        param_path: spec.path,
        rows,
    })
}

#[derive(Serialize)]
struct TraceSampleJson {
    time_s: f64,
    noise_db: f64,
    dc_arb: f64,
}

pub fn noise_trace_json(trace: &ScanTrace) -> String {
    #[derive(Serialize)]
    struct Doc {
        samples: Vec<TraceSampleJson>,
    }
    let doc = Doc {
        samples: trace
            .samples
            .iter()
            .map(|s| TraceSampleJson {
                time_s: s.time_s,
                noise_db: s.noise_db,
                dc_arb: s.dc_arb,
            })
            .collect(),
    };
    serde_json::to_string_pretty(&doc).expect("trace serializes")
}

pub fn gain_trace_csv(samples: &[(f64, f64)]) -> String {
    let mut out = String::from("time_s,gain\n");
    for (t, g) in samples {
        out.push_str(&format!("{},{}\n", fmt_e9(*t), fmt_e9(*g)));
    }
    out
}

pub fn gain_trace_json(samples: &[(f64, f64)]) -> String {
    #[derive(Serialize)]
    struct Sample {
        time_s: f64,
        gain: f64,
    }
    #[derive(Serialize)]
    struct Doc {
        samples: Vec<Sample>,
    }
    let doc = Doc {
        samples: samples
            .iter()
            .map(|(t, g)| Sample { time_s: *t, gain: *g })
            .collect(),
    };
    serde_json::to_string_pretty(&doc).expect("trace serializes")
}

pub fn fit_json(result: &FitResult, record: &MeasurementRecord) -> String {
    use crate::inference::{OBSERVABLE_NAMES, PARAM_NAMES};
    #[derive(Serialize)]
    struct Entry {
        observable: &'static str,
        measured: f64,
        tolerance: f64,
        predicted: f64,
        residual: f64,
    }
    #[derive(Serialize)]
    struct Doc {
        objective: f64,
        iterations: usize,
        evaluations: usize,
        converged: bool,
        params: std::collections::BTreeMap<&'static str, f64>,
        residuals: Vec<Entry>,
        violations: Vec<&'static str>,
    }
    let p = result.params.to_array();
    let params = PARAM_NAMES.iter().copied().zip(p).collect();
    let m = record.observables();
    let pred = result.predictions.to_array();
    let doc = Doc {
        objective: result.objective,
        iterations: result.iterations,
        evaluations: result.evaluations,
        converged: result.converged,
        params,
        residuals: (0..crate::inference::N_OBSERVABLES)
            .map(|j| Entry {
                observable: OBSERVABLE_NAMES[j],
                measured: m[j].value,
                tolerance: m[j].tol,
                predicted: pred[j],
                residual: result.residuals[j],
            })
            .collect(),
        violations: result.violations(),
    };
    serde_json::to_string_pretty(&doc).expect("fit serializes")
}

/// Render a run output in the requested format. Fit output in CSV form is
/// the structured text document followed by the flat residual CSV.
pub fn render(output: &RunOutput, format: OutputFormat) -> String {
    match (output, format) {
        (RunOutput::Report(r), OutputFormat::Csv) => r.to_csv(),
        (RunOutput::Report(r), OutputFormat::Json) => r.to_json(),
        (RunOutput::GainTrace(t), OutputFormat::Csv) => gain_trace_csv(t),
        (RunOutput::GainTrace(t), OutputFormat::Json) => gain_trace_json(t),
        (RunOutput::Fit(boxed), OutputFormat::Csv) => {
            let (result, record) = &**boxed;
            format!("{}\n{}", result.to_text_doc(), result.residuals_csv(record))
        }
        (RunOutput::Fit(boxed), OutputFormat::Json) => {
            let (result, record) = &**boxed;
            fit_json(result, record)
        }
    }
}
