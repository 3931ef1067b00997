//! Configuration parsing and serialization.
//!
//! The format is line-oriented: one `path = value` assignment per line with
//! dotted section paths, `#` comments, decimal or scientific numerics, and
//! double-quoted strings. Parsing is strict: unknown keys, duplicate keys,
//! missing required fields, and out-of-range values are all rejected with
//! the offending key path.

use crate::chain::{ChainConfig, OpaParams, PumpStage};
use crate::homodyne::{BhdSettings, PhaseWaveform, WaveformShape};
use crate::inference::{
    Measured, MeasurementRecord, ParamBounds, DB_TOL, GAIN_TOL, POWER_REL_TOL,
};
use std::collections::BTreeMap;
use std::fmt::Write as _;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: duplicate key `{path}`")]
    DuplicateKey { line: usize, path: String },
    #[error("unknown key `{path}`")]
    UnknownKey { path: String },
    #[error("missing required fields: {}", fields.join(", "))]
    MissingFields { fields: Vec<String> },
    #[error("`{path}` = {value} outside permitted interval [{lo}, {hi}]")]
    Range {
        path: String,
        value: f64,
        lo: f64,
        hi: f64,
    },
    #[error("`{path}`: {message}")]
    Invalid { path: String, message: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    VacuumSqueeze,
    BrightSqueeze,
    GainScan,
    Fit,
}

impl Mode {
    pub fn as_str(&self) -> &'static str {
        match self {
            Mode::VacuumSqueeze => "vacuum_squeeze",
            Mode::BrightSqueeze => "bright_squeeze",
            Mode::GainScan => "gain_scan",
            Mode::Fit => "fit",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl OutputFormat {
    pub fn as_str(&self) -> &'static str {
        match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputSpec {
    pub format: OutputFormat,
    pub path: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub path: String,
    pub start: f64,
    pub stop: f64,
    pub n_points: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanSpec {
    pub duration_s: f64,
    pub sample_rate_hz: f64,
}

/// Complete experiment description assembled from one config document.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub mode: Mode,
    pub rng_seed: u64,
    pub chain: ChainConfig,
    pub bhd: BhdSettings,
    pub waveform: PhaseWaveform,
    pub scan: ScanSpec,
    pub sweep: Option<SweepSpec>,
    pub measurement: Option<MeasurementRecord>,
    pub fit_bounds: ParamBounds,
    pub pump_stage: Option<PumpStage>,
    pub output: OutputSpec,
}

#[derive(Debug, Clone, PartialEq)]
enum Value {
    Num(f64),
    Str(String),
}

struct Entries {
    map: BTreeMap<String, (usize, Value)>,
}

impl Entries {
    fn take_num(&mut self, path: &str) -> Result<Option<f64>, ConfigError> {
        match self.map.remove(path) {
            None => Ok(None),
            Some((_, Value::Num(v))) => Ok(Some(v)),
            Some((_, Value::Str(_))) => Err(ConfigError::Invalid {
                path: path.into(),
                message: "expected a number, found a quoted string".into(),
            }),
        }
    }

    fn take_str(&mut self, path: &str) -> Result<Option<String>, ConfigError> {
        match self.map.remove(path) {
            None => Ok(None),
            Some((_, Value::Str(s))) => Ok(Some(s)),
            Some((_, Value::Num(_))) => Err(ConfigError::Invalid {
                path: path.into(),
                message: "expected a quoted string, found a number".into(),
            }),
        }
    }

    fn take_uint(&mut self, path: &str) -> Result<Option<u64>, ConfigError> {
        match self.take_num(path)? {
            None => Ok(None),
            Some(v) => {
                if v < 0.0 || v.fract() != 0.0 || v > 2f64.powi(53) {
                    return Err(ConfigError::Invalid {
                        path: path.into(),
                        message: format!("expected a nonnegative integer, got {v}"),
                    });
                }
                Ok(Some(v as u64))
            }
        }
    }
}

fn parse_lines(text: &str) -> Result<Entries, ConfigError> {
    let mut map = BTreeMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        // Strip a trailing comment, respecting quoted strings.
        let mut in_quotes = false;
        let mut cut = raw.len();
        for (pos, ch) in raw.char_indices() {
            match ch {
                '"' => in_quotes = !in_quotes,
                '#' if !in_quotes => {
                    cut = pos;
                    break;
                }
                _ => {}
            }
        }
        let line = raw[..cut].trim();
        if line.is_empty() {
            continue;
        }
        let Some((path, value)) = line.split_once('=') else {
            return Err(ConfigError::Syntax {
                line: line_no,
                message: format!("expected `path = value`, got `{line}`"),
            });
        };
        let path = path.trim();
        let value = value.trim();
        if path.is_empty()
            || !path
                .chars()
                .all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '.')
        {
            return Err(ConfigError::Syntax {
                line: line_no,
                message: format!("invalid key path `{path}`"),
            });
        }
        let parsed = if let Some(stripped) = value.strip_prefix('"') {
            let Some(inner) = stripped.strip_suffix('"') else {
                return Err(ConfigError::Syntax {
                    line: line_no,
                    message: format!("unterminated string for `{path}`"),
                });
            };
            Value::Str(inner.to_string())
        } else {
            match value.parse::<f64>() {
                Ok(v) if v.is_finite() => Value::Num(v),
                _ => {
                    return Err(ConfigError::Syntax {
                        line: line_no,
                        message: format!("`{value}` is not a finite number or quoted string"),
                    })
                }
            }
        };
        if map.contains_key(path) {
            return Err(ConfigError::DuplicateKey {
                line: line_no,
                path: path.into(),
            });
        }
        map.insert(path.to_string(), (line_no, parsed));
    }
    Ok(Entries { map })
}

fn check_range(path: &str, value: f64, lo: f64, hi: f64) -> Result<f64, ConfigError> {
    if !(lo..=hi).contains(&value) {
        return Err(ConfigError::Range {
            path: path.into(),
            value,
            lo,
            hi,
        });
    }
    Ok(value)
}

fn ranged(
    entries: &mut Entries,
    path: &str,
    default: f64,
    lo: f64,
    hi: f64,
) -> Result<f64, ConfigError> {
    match entries.take_num(path)? {
        Some(v) => check_range(path, v, lo, hi),
        None => Ok(default),
    }
}

/// Paths `mode = fit` requires a value for (tolerances have defaults).
const FIT_REQUIRED: [&str; 9] = [
    "measurement.gain_max",
    "measurement.gain_min",
    "measurement.vac_squeeze_db",
    "measurement.vac_antisqueeze_db",
    "measurement.bsl_squeeze_db",
    "measurement.bsl_antisqueeze_db",
    "measurement.unpumped_out_w",
    "measurement.amplified_out_w",
    "measurement.bsl_out_w",
];

/// Parse one config document with strict schema validation.
pub fn parse_config(text: &str) -> Result<ExperimentConfig, ConfigError> {
    let mut entries = parse_lines(text)?;

    // Required scalars first, reported together when absent.
    let mut missing = Vec::new();
    let mode_str = entries.take_str("mode")?;
    if mode_str.is_none() {
        missing.push("mode".to_string());
    }
    let rng_seed = entries.take_uint("rng_seed")?;
    if rng_seed.is_none() {
        missing.push("rng_seed".to_string());
    }
    let seed_power = entries.take_num("chain.seed_power")?;
    if seed_power.is_none() {
        missing.push("chain.seed_power".to_string());
    }
    let pump_power = entries.take_num("chain.pump_power")?;
    if pump_power.is_none() {
        missing.push("chain.pump_power".to_string());
    }
    let kappa = entries.take_num("chain.opa.kappa")?;
    if kappa.is_none() {
        missing.push("chain.opa.kappa".to_string());
    }
    if !missing.is_empty() {
        return Err(ConfigError::MissingFields { fields: missing });
    }

    let mode = match mode_str.unwrap().as_str() {
        "vacuum_squeeze" => Mode::VacuumSqueeze,
        "bright_squeeze" => Mode::BrightSqueeze,
        "gain_scan" => Mode::GainScan,
        "fit" => Mode::Fit,
        other => {
            return Err(ConfigError::Invalid {
                path: "mode".into(),
                message: format!(
                    "`{other}` is not one of vacuum_squeeze, bright_squeeze, gain_scan, fit"
                ),
            })
        }
    };
    let rng_seed = rng_seed.unwrap();
    let seed_power = check_range("chain.seed_power", seed_power.unwrap(), 0.0, f64::MAX)?;
    let pump_power = check_range("chain.pump_power", pump_power.unwrap(), 0.0, f64::MAX)?;
    let kappa = check_range("chain.opa.kappa", kappa.unwrap(), 0.0, f64::MAX)?;

    let eta_wg = ranged(&mut entries, "chain.opa.eta_wg", 0.75, 1e-6, 1.0)?;
    let opa = OpaParams {
        kappa,
        eta_mid: ranged(&mut entries, "chain.opa.eta_mid", 1.0, 0.0, 1.0)?,
        delta: ranged(
            &mut entries,
            "chain.opa.delta",
            0.0,
            -std::f64::consts::PI,
            std::f64::consts::PI,
        )?,
        n_pump: ranged(&mut entries, "chain.opa.n_pump", 0.0, 0.0, f64::MAX)?,
        eta_wg,
        eta_inject: ranged(&mut entries, "chain.opa.eta_inject", 1.0, 1e-6, 1.0)?,
    };
    let lo_power = ranged(&mut entries, "chain.lo_power", 5e-3, 0.0, f64::MAX)?;
    let chain = ChainConfig {
        seed_power_w: seed_power,
        pump_power_w: pump_power,
        opa,
        eta_fiber: ranged(&mut entries, "chain.eta_fiber", 0.74, 0.0, 1.0)?,
        eta_interference: ranged(&mut entries, "chain.eta_interference", 0.97, 0.0, 1.0)?,
        eta_detector: ranged(&mut entries, "chain.eta_detector", 0.99, 0.0, 1.0)?,
        lo_power_w: lo_power,
        balanced_coupler_insertion_db: ranged(
            &mut entries,
            "chain.balanced_coupler_insertion_db",
            0.21,
            0.0,
            f64::MAX,
        )?,
        ratio_deviation: ranged(&mut entries, "chain.ratio_deviation", 0.02, 0.0, 1.0)?,
        phase_jitter_rms: ranged(&mut entries, "chain.phase_jitter_rms", 0.0, 0.0, f64::MAX)?,
    };
    chain.validate().map_err(|e| ConfigError::Invalid {
        path: "chain".into(),
        message: e.to_string(),
    })?;

    let bhd = BhdSettings {
        lo_power_w: ranged(&mut entries, "bhd.lo_power", lo_power, 0.0, f64::MAX)?,
        visibility_efficiency: ranged(
            &mut entries,
            "bhd.visibility_efficiency",
            chain.eta_interference,
            0.0,
            1.0,
        )?,
        detector_efficiency: ranged(
            &mut entries,
            "bhd.detector_efficiency",
            chain.eta_detector,
            0.0,
            1.0,
        )?,
        dark_clearance_db: entries
            .take_num("bhd.dark_clearance_db")?
            .map(|v| check_range("bhd.dark_clearance_db", v, 0.0, f64::MAX))
            .transpose()?,
        analysis_frequency_hz: ranged(&mut entries, "bhd.analysis_frequency", 2.5e6, 0.0, f64::MAX)?,
    };

    let shape = match entries.take_str("waveform.shape")?.as_deref() {
        None | Some("triangle") => WaveformShape::Triangle,
        Some("constant") => WaveformShape::Constant,
        Some("sawtooth") => WaveformShape::Sawtooth,
        Some(other) => {
            return Err(ConfigError::Invalid {
                path: "waveform.shape".into(),
                message: format!("`{other}` is not one of triangle, constant, sawtooth"),
            })
        }
    };
    let frequency = ranged(&mut entries, "waveform.frequency", 3.0, 0.0, f64::MAX)?;
    let amplitude = ranged(
        &mut entries,
        "waveform.amplitude",
        2.0 * std::f64::consts::PI,
        0.0,
        f64::MAX,
    )?;
    let offset = match entries.take_num("waveform.offset")? {
        Some(v) => v,
        None => 0.0,
    };
    let waveform = PhaseWaveform::new(shape, frequency, amplitude, offset).map_err(|e| {
        ConfigError::Invalid {
            path: "waveform".into(),
            message: e.to_string(),
        }
    })?;

    let default_duration = waveform.period().unwrap_or(1.0);
    let scan = ScanSpec {
        duration_s: ranged(
            &mut entries,
            "scan.duration_s",
            default_duration,
            f64::MIN_POSITIVE,
            f64::MAX,
        )?,
        sample_rate_hz: ranged(
            &mut entries,
            "scan.sample_rate_hz",
            1000.0,
            f64::MIN_POSITIVE,
            f64::MAX,
        )?,
    };

    // Optional pump stage: all four fields required together.
    let pump_keys = [
        "pump_stage.fundamental_power",
        "pump_stage.shg_output",
        "pump_stage.phase_match_temp_c",
        "pump_stage.pump_into_wg2",
    ];
    let pump_present = pump_keys.iter().any(|k| entries.map.contains_key(*k));
    let pump_stage = if pump_present {
        let mut vals = [0.0; 4];
        let mut missing = Vec::new();
        for (slot, key) in pump_keys.iter().enumerate() {
            match entries.take_num(key)? {
                Some(v) => vals[slot] = v,
                None => missing.push((*key).to_string()),
            }
        }
        if !missing.is_empty() {
            return Err(ConfigError::MissingFields { fields: missing });
        }
        let stage = PumpStage {
            fundamental_power_w: vals[0],
            shg_output_w: vals[1],
            phase_match_temp_c: vals[2],
            pump_into_wg2_w: vals[3],
        };
        crate::chain::shg_pump(&stage).map_err(|e| ConfigError::Invalid {
            path: "pump_stage".into(),
            message: e.to_string(),
        })?;
        Some(stage)
    } else {
        None
    };

    // Optional sweep: all four fields required together.
    let sweep_keys = ["sweep.path", "sweep.start", "sweep.stop", "sweep.n_points"];
    let sweep_present = sweep_keys.iter().any(|k| entries.map.contains_key(*k));
    let sweep = if sweep_present {
        let path = entries.take_str("sweep.path")?;
        let start = entries.take_num("sweep.start")?;
        let stop = entries.take_num("sweep.stop")?;
        let n_points = entries.take_uint("sweep.n_points")?;
        let mut missing = Vec::new();
        if path.is_none() {
            missing.push("sweep.path".to_string());
        }
        if start.is_none() {
            missing.push("sweep.start".to_string());
        }
        if stop.is_none() {
            missing.push("sweep.stop".to_string());
        }
        if n_points.is_none() {
            missing.push("sweep.n_points".to_string());
        }
        if !missing.is_empty() {
            return Err(ConfigError::MissingFields { fields: missing });
        }
        let n_points = n_points.unwrap() as usize;
        if n_points < 2 {
            return Err(ConfigError::Range {
                path: "sweep.n_points".into(),
                value: n_points as f64,
                lo: 2.0,
                hi: f64::MAX,
            });
        }
        Some(SweepSpec {
            path: path.unwrap(),
            start: start.unwrap(),
            stop: stop.unwrap(),
            n_points,
        })
    } else {
        None
    };

    // Measurement record: required as a whole in fit mode, optional
    // otherwise.
    let meas_present = entries
        .map
        .keys()
        .any(|k| k.starts_with("measurement."));
    let measurement = if meas_present || mode == Mode::Fit {
        let mut missing = Vec::new();
        let mut value_of = |key: &str| -> Result<f64, ConfigError> {
            match entries.take_num(key) {
                Ok(Some(v)) => Ok(v),
                Ok(None) => {
                    missing.push(key.to_string());
                    Ok(f64::NAN)
                }
                Err(e) => Err(e),
            }
        };
        let mut values = [0.0; 9];
        for (slot, key) in FIT_REQUIRED.iter().enumerate() {
            values[slot] = value_of(key)?;
        }
        if !missing.is_empty() {
            return Err(ConfigError::MissingFields { fields: missing });
        }
        let tol = |entries: &mut Entries, key: &str, default: f64| -> Result<f64, ConfigError> {
            ranged(entries, key, default, f64::MIN_POSITIVE, f64::MAX)
        };
        let record = MeasurementRecord {
            gain_max: Measured::new(
                values[0],
                tol(&mut entries, "measurement.gain_max_tol", GAIN_TOL)?,
            ),
            gain_min: Measured::new(
                values[1],
                tol(&mut entries, "measurement.gain_min_tol", GAIN_TOL)?,
            ),
            vac_squeeze_db: Measured::new(
                values[2],
                tol(&mut entries, "measurement.vac_squeeze_db_tol", DB_TOL)?,
            ),
            vac_antisqueeze_db: Measured::new(
                values[3],
                tol(&mut entries, "measurement.vac_antisqueeze_db_tol", DB_TOL)?,
            ),
            bsl_squeeze_db: Measured::new(
                values[4],
                tol(&mut entries, "measurement.bsl_squeeze_db_tol", DB_TOL)?,
            ),
            bsl_antisqueeze_db: Measured::new(
                values[5],
                tol(&mut entries, "measurement.bsl_antisqueeze_db_tol", DB_TOL)?,
            ),
            unpumped_out_w: Measured::new(
                values[6],
                tol(
                    &mut entries,
                    "measurement.unpumped_out_w_tol",
                    values[6].abs() * POWER_REL_TOL,
                )?,
            ),
            amplified_out_w: Measured::new(
                values[7],
                tol(
                    &mut entries,
                    "measurement.amplified_out_w_tol",
                    values[7].abs() * POWER_REL_TOL,
                )?,
            ),
            bsl_out_w: Measured::new(
                values[8],
                tol(
                    &mut entries,
                    "measurement.bsl_out_w_tol",
                    values[8].abs() * POWER_REL_TOL,
                )?,
            ),
            seed_in_w: match entries.take_num("measurement.seed_in_w")? {
                Some(v) => check_range("measurement.seed_in_w", v, 0.0, f64::MAX)?,
                None => seed_power,
            },
            pump_w: match entries.take_num("measurement.pump_w")? {
                Some(v) => check_range("measurement.pump_w", v, 0.0, f64::MAX)?,
                None => pump_power,
            },
        };
        record.validate().map_err(|e| ConfigError::Invalid {
            path: "measurement".into(),
            message: e.to_string(),
        })?;
        Some(record)
    } else {
        None
    };

    // Fit bounds: defaults spanning the physical box, overridable per axis.
    let defaults = ParamBounds::default_box(eta_wg);
    let mut lo = defaults.lo.to_array();
    let mut hi = defaults.hi.to_array();
    for (j, name) in crate::inference::PARAM_NAMES.iter().enumerate() {
        if let Some(v) = entries.take_num(&format!("fit.bounds.{name}_lo"))? {
            lo[j] = v;
        }
        if let Some(v) = entries.take_num(&format!("fit.bounds.{name}_hi"))? {
            hi[j] = v;
        }
        if lo[j] > hi[j] {
            return Err(ConfigError::Invalid {
                path: format!("fit.bounds.{name}_lo"),
                message: format!("lower bound {} exceeds upper bound {}", lo[j], hi[j]),
            });
        }
    }
    let fit_bounds = ParamBounds {
        lo: crate::inference::FitParams::from_array(&lo),
        hi: crate::inference::FitParams::from_array(&hi),
    };

    let output = OutputSpec {
        format: match entries.take_str("output.format")?.as_deref() {
            None | Some("csv") => OutputFormat::Csv,
            Some("json") => OutputFormat::Json,
            Some(other) => {
                return Err(ConfigError::Invalid {
                    path: "output.format".into(),
                    message: format!("`{other}` is not one of csv, json"),
                })
            }
        },
        path: entries.take_str("output.path")?,
    };

    // Everything consumed? Report the first unknown key in path order.
    if let Some(path) = entries.map.keys().next() {
        return Err(ConfigError::UnknownKey { path: path.clone() });
    }

    let cfg = ExperimentConfig {
        mode,
        rng_seed,
        chain,
        bhd,
        waveform,
        scan,
        sweep,
        measurement,
        fit_bounds,
        pump_stage,
        output,
    };

    // Sweep paths must address a numeric field.
    if let Some(sweep) = &cfg.sweep {
        let mut probe = cfg.clone();
        if probe.numeric_field_mut(&sweep.path).is_none() {
            return Err(ConfigError::Invalid {
                path: "sweep.path".into(),
                message: format!("`{}` does not address a numeric field", sweep.path),
            });
        }
    }

    Ok(cfg)
}

// Debug float formatting round-trips exactly and uses scientific notation
// where natural, which the grammar accepts.
fn num(x: f64) -> String {
    format!("{x:?}")
}

impl ExperimentConfig {
    /// Resolve a dotted path to a mutable numeric field, for sweeps.
    pub fn numeric_field_mut(&mut self, path: &str) -> Option<&mut f64> {
        match path {
            "chain.seed_power" => Some(&mut self.chain.seed_power_w),
            "chain.pump_power" => Some(&mut self.chain.pump_power_w),
            "chain.lo_power" => Some(&mut self.chain.lo_power_w),
            "chain.eta_fiber" => Some(&mut self.chain.eta_fiber),
            "chain.eta_interference" => Some(&mut self.chain.eta_interference),
            "chain.eta_detector" => Some(&mut self.chain.eta_detector),
            "chain.balanced_coupler_insertion_db" => {
                Some(&mut self.chain.balanced_coupler_insertion_db)
            }
            "chain.ratio_deviation" => Some(&mut self.chain.ratio_deviation),
            "chain.phase_jitter_rms" => Some(&mut self.chain.phase_jitter_rms),
            "chain.opa.kappa" => Some(&mut self.chain.opa.kappa),
            "chain.opa.eta_mid" => Some(&mut self.chain.opa.eta_mid),
            "chain.opa.delta" => Some(&mut self.chain.opa.delta),
            "chain.opa.n_pump" => Some(&mut self.chain.opa.n_pump),
            "chain.opa.eta_wg" => Some(&mut self.chain.opa.eta_wg),
            "chain.opa.eta_inject" => Some(&mut self.chain.opa.eta_inject),
            "bhd.lo_power" => Some(&mut self.bhd.lo_power_w),
            "bhd.visibility_efficiency" => Some(&mut self.bhd.visibility_efficiency),
            "bhd.detector_efficiency" => Some(&mut self.bhd.detector_efficiency),
            "bhd.analysis_frequency" => Some(&mut self.bhd.analysis_frequency_hz),
            "waveform.frequency" => Some(&mut self.waveform.frequency_hz),
            "waveform.amplitude" => Some(&mut self.waveform.amplitude_rad),
            "waveform.offset" => Some(&mut self.waveform.offset_rad),
            "scan.duration_s" => Some(&mut self.scan.duration_s),
            "scan.sample_rate_hz" => Some(&mut self.scan.sample_rate_hz),
            _ => None,
        }
    }

    /// Canonical text form: every field explicit, stable ordering. Parsing
    /// the output reproduces this config exactly.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "mode = \"{}\"", self.mode.as_str());
        let _ = writeln!(s, "rng_seed = {}", self.rng_seed);
        let _ = writeln!(s, "output.format = \"{}\"", self.output.format.as_str());
        if let Some(path) = &self.output.path {
            let _ = writeln!(s, "output.path = \"{path}\"");
        }
        let c = &self.chain;
        let _ = writeln!(s, "chain.seed_power = {}", num(c.seed_power_w));
        let _ = writeln!(s, "chain.pump_power = {}", num(c.pump_power_w));
        let _ = writeln!(s, "chain.lo_power = {}", num(c.lo_power_w));
        let _ = writeln!(s, "chain.eta_fiber = {}", num(c.eta_fiber));
        let _ = writeln!(s, "chain.eta_interference = {}", num(c.eta_interference));
        let _ = writeln!(s, "chain.eta_detector = {}", num(c.eta_detector));
        let _ = writeln!(
            s,
            "chain.balanced_coupler_insertion_db = {}",
            num(c.balanced_coupler_insertion_db)
        );
        let _ = writeln!(s, "chain.ratio_deviation = {}", num(c.ratio_deviation));
        let _ = writeln!(s, "chain.phase_jitter_rms = {}", num(c.phase_jitter_rms));
        let _ = writeln!(s, "chain.opa.kappa = {}", num(c.opa.kappa));
        let _ = writeln!(s, "chain.opa.eta_mid = {}", num(c.opa.eta_mid));
        let _ = writeln!(s, "chain.opa.delta = {}", num(c.opa.delta));
        let _ = writeln!(s, "chain.opa.n_pump = {}", num(c.opa.n_pump));
        let _ = writeln!(s, "chain.opa.eta_wg = {}", num(c.opa.eta_wg));
        let _ = writeln!(s, "chain.opa.eta_inject = {}", num(c.opa.eta_inject));
        let b = &self.bhd;
        let _ = writeln!(s, "bhd.lo_power = {}", num(b.lo_power_w));
        let _ = writeln!(
            s,
            "bhd.visibility_efficiency = {}",
            num(b.visibility_efficiency)
        );
        let _ = writeln!(s, "bhd.detector_efficiency = {}", num(b.detector_efficiency));
        if let Some(dark) = b.dark_clearance_db {
            let _ = writeln!(s, "bhd.dark_clearance_db = {}", num(dark));
        }
        let _ = writeln!(s, "bhd.analysis_frequency = {}", num(b.analysis_frequency_hz));
        let w = &self.waveform;
        let shape = match w.shape {
            WaveformShape::Triangle => "triangle",
            WaveformShape::Constant => "constant",
            WaveformShape::Sawtooth => "sawtooth",
        };
        let _ = writeln!(s, "waveform.shape = \"{shape}\"");
        let _ = writeln!(s, "waveform.frequency = {}", num(w.frequency_hz));
        let _ = writeln!(s, "waveform.amplitude = {}", num(w.amplitude_rad));
        let _ = writeln!(s, "waveform.offset = {}", num(w.offset_rad));
        let _ = writeln!(s, "scan.duration_s = {}", num(self.scan.duration_s));
        let _ = writeln!(s, "scan.sample_rate_hz = {}", num(self.scan.sample_rate_hz));
        if let Some(p) = &self.pump_stage {
            let _ = writeln!(s, "pump_stage.fundamental_power = {}", num(p.fundamental_power_w));
            let _ = writeln!(s, "pump_stage.shg_output = {}", num(p.shg_output_w));
            let _ = writeln!(s, "pump_stage.phase_match_temp_c = {}", num(p.phase_match_temp_c));
            let _ = writeln!(s, "pump_stage.pump_into_wg2 = {}", num(p.pump_into_wg2_w));
        }
        if let Some(sw) = &self.sweep {
            let _ = writeln!(s, "sweep.path = \"{}\"", sw.path);
            let _ = writeln!(s, "sweep.start = {}", num(sw.start));
            let _ = writeln!(s, "sweep.stop = {}", num(sw.stop));
            let _ = writeln!(s, "sweep.n_points = {}", sw.n_points);
        }
        if let Some(m) = &self.measurement {
            let obs = m.observables();
            for (j, name) in crate::inference::OBSERVABLE_NAMES.iter().enumerate() {
                let _ = writeln!(s, "measurement.{name} = {}", num(obs[j].value));
                let _ = writeln!(s, "measurement.{name}_tol = {}", num(obs[j].tol));
            }
            let _ = writeln!(s, "measurement.seed_in_w = {}", num(m.seed_in_w));
            let _ = writeln!(s, "measurement.pump_w = {}", num(m.pump_w));
        }
        let lo = self.fit_bounds.lo.to_array();
        let hi = self.fit_bounds.hi.to_array();
        for (j, name) in crate::inference::PARAM_NAMES.iter().enumerate() {
            let _ = writeln!(s, "fit.bounds.{name}_lo = {}", num(lo[j]));
            let _ = writeln!(s, "fit.bounds.{name}_hi = {}", num(hi[j]));
        }
        s
    }
}
