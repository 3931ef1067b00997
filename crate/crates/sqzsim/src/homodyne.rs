//! Balanced homodyne detection: quadrature noise power versus LO phase,
//! interference and detector efficiencies as loss channels, Gaussian
//! phase-jitter averaging, synthetic phase-scan traces, and the
//! DC-minimization deamplification lock.

use crate::chain::{opa_transform, OpaParams};
use crate::gaussian::{DbValue, QuadratureState};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use std::f64::consts::{FRAC_PI_2, PI};
use thiserror::Error;

/// Minimum LO-to-signal power ratio for the shot-noise-limited detector
/// approximation to be declared valid.
pub const LO_DOMINANCE_RATIO: f64 = 100.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HomodyneError {
    #[error("LO power {lo_w} W below {LO_DOMINANCE_RATIO}x the signal power {signal_w} W")]
    LoNotDominant { lo_w: f64, signal_w: f64 },
    #[error("waveform frequency must be positive for a {0:?} shape")]
    NonpositiveFrequency(WaveformShape),
    #[error("waveform amplitude must be nonnegative, got {0}")]
    NegativeAmplitude(f64),
    #[error("v_min {v_min} exceeds v_max {v_max}")]
    VminAboveVmax { v_min: f64, v_max: f64 },
    #[error("phase jitter must be nonnegative, got {0}")]
    NegativeJitter(f64),
    #[error("sample rate {rate_hz} Hz below twice the waveform frequency {freq_hz} Hz")]
    SampleRateTooLow { rate_hz: f64, freq_hz: f64 },
    #[error("trace duration {duration_s} s shorter than one waveform period {period_s} s")]
    DurationTooShort { duration_s: f64, period_s: f64 },
    #[error("state has zero coherent amplitude; nothing to lock on")]
    ZeroMeanLock,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WaveformShape {
    Triangle,
    Constant,
    Sawtooth,
}

/// Phase drive applied by a piezoelectric fiber stretcher.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseWaveform {
    pub shape: WaveformShape,
    pub frequency_hz: f64,
    /// Peak-to-peak phase excursion in radians.
    pub amplitude_rad: f64,
    pub offset_rad: f64,
}

impl PhaseWaveform {
    pub fn new(
        shape: WaveformShape,
        frequency_hz: f64,
        amplitude_rad: f64,
        offset_rad: f64,
    ) -> Result<PhaseWaveform, HomodyneError> {
        if shape != WaveformShape::Constant && frequency_hz <= 0.0 {
            return Err(HomodyneError::NonpositiveFrequency(shape));
        }
        if amplitude_rad < 0.0 {
            return Err(HomodyneError::NegativeAmplitude(amplitude_rad));
        }
        Ok(PhaseWaveform {
            shape,
            frequency_hz,
            amplitude_rad,
            offset_rad,
        })
    }

    /// One period in seconds; `None` for a constant drive.
    pub fn period(&self) -> Option<f64> {
        match self.shape {
            WaveformShape::Constant => None,
            _ => Some(1.0 / self.frequency_hz),
        }
    }

    pub fn phase_at(&self, t_s: f64) -> f64 {
        match self.shape {
            WaveformShape::Constant => self.offset_rad,
            WaveformShape::Sawtooth => {
                let u = (t_s * self.frequency_hz).rem_euclid(1.0);
                self.offset_rad + self.amplitude_rad * u
            }
            WaveformShape::Triangle => {
                let u = (t_s * self.frequency_hz).rem_euclid(1.0);
                let tri = if u < 0.5 { 2.0 * u } else { 2.0 * (1.0 - u) };
                self.offset_rad + self.amplitude_rad * tri
            }
        }
    }
}

/// Balanced-detector settings. Interference efficiency enters
/// multiplicatively as a power transmission, matching the convention of the
/// efficiency budget it came from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BhdSettings {
    pub lo_power_w: f64,
    pub visibility_efficiency: f64,
    pub detector_efficiency: f64,
    /// Electronic noise floor below shot noise, in dB; `None` models an
    /// ideal dark-noise-free detector.
    pub dark_clearance_db: Option<f64>,
    /// Analysis sideband frequency, metadata only.
    pub analysis_frequency_hz: f64,
}

impl BhdSettings {
    pub fn reference() -> BhdSettings {
        BhdSettings {
            lo_power_w: 5e-3,
            visibility_efficiency: 0.97,
            detector_efficiency: 0.99,
            dark_clearance_db: None,
            analysis_frequency_hz: 2.5e6,
        }
    }

    fn check_dominance(&self, state: &QuadratureState) -> Result<(), HomodyneError> {
        let signal_w = state.optical_power();
        if self.lo_power_w < LO_DOMINANCE_RATIO * signal_w {
            return Err(HomodyneError::LoNotDominant {
                lo_w: self.lo_power_w,
                signal_w,
            });
        }
        Ok(())
    }
}

/// State actually seen by the detector: interference and detector
/// efficiencies as loss, plus an isotropic dark-noise term when the
/// electronic floor is finite.
pub fn detected_state(state: &QuadratureState, settings: &BhdSettings) -> QuadratureState {
    let out = state
        .loss(settings.visibility_efficiency)
        .expect("validated visibility efficiency")
        .loss(settings.detector_efficiency)
        .expect("validated detector efficiency");
    match settings.dark_clearance_db {
        Some(clearance_db) => {
            let n_dark = 10f64.powf(-clearance_db / 10.0);
            out.excess_noise(n_dark, 0.0)
                .and_then(|s| s.excess_noise(n_dark, FRAC_PI_2))
                .expect("nonnegative dark noise")
        }
        None => out,
    }
}

/// Noise power at one LO phase, in dB relative to shot noise.
pub fn noise_power_db(
    state: &QuadratureState,
    lo_phase: f64,
    settings: &BhdSettings,
) -> Result<DbValue, HomodyneError> {
    settings.check_dominance(state)?;
    let v = detected_state(state, settings).measure_variance(lo_phase);
    Ok(DbValue::from_variance(v).expect("positive detected variance"))
}

fn jitter_weight(theta_rms: f64) -> f64 {
    // <cos^2 eps> over eps ~ N(0, sigma^2)
    0.5 * (1.0 + (-2.0 * theta_rms * theta_rms).exp())
}

/// Gaussian-phase-averaged variance at the squeezing phase:
/// `V_eff = v_min·(1 + e^{-2σ²})/2 + v_max·(1 − e^{-2σ²})/2`.
pub fn jitter_averaged_variance(
    v_min: f64,
    v_max: f64,
    theta_rms: f64,
) -> Result<f64, HomodyneError> {
    if v_min > v_max {
        return Err(HomodyneError::VminAboveVmax { v_min, v_max });
    }
    if theta_rms < 0.0 {
        return Err(HomodyneError::NegativeJitter(theta_rms));
    }
    let w = jitter_weight(theta_rms);
    Ok(v_min * w + v_max * (1.0 - w))
}

/// Gaussian-phase-averaged variance at an arbitrary offset `delta` from the
/// squeezing phase; reduces to `jitter_averaged_variance` at `delta = 0`.
pub fn jitter_averaged_at(v_min: f64, v_max: f64, delta: f64, theta_rms: f64) -> f64 {
    let mid = 0.5 * (v_min + v_max);
    let half = 0.5 * (v_max - v_min);
    mid - half * (-2.0 * theta_rms * theta_rms).exp() * (2.0 * delta).cos()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceSample {
    pub time_s: f64,
    pub noise_db: f64,
    /// Uncalibrated DC channel; only extremum locations are meaningful.
    pub dc_arb: f64,
}

/// Synthetic noise-versus-phase scan with its settings snapshot.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanTrace {
    pub samples: Vec<TraceSample>,
    pub settings: BhdSettings,
    pub waveform: PhaseWaveform,
    pub theta_rms: f64,
    pub rng_seed: u64,
}

impl ScanTrace {
    /// CSV serialization: `time_s,noise_db,dc_arb`, one row per sample.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("time_s,noise_db,dc_arb\n");
        for s in &self.samples {
            out.push_str(&format!(
                "{},{},{}\n",
                crate::pipeline::fmt_e9(s.time_s),
                crate::pipeline::fmt_e9(s.noise_db),
                crate::pipeline::fmt_e9(s.dc_arb)
            ));
        }
        out
    }
}

/// Generate a deterministic noise-power scan. Each sample reports the
/// jitter-averaged variance at the drive phase perturbed by one Gaussian
/// phase-wander draw, so trace minima settle at the jitter-limited
/// squeezing level rather than the clean minimum; the DC channel is the
/// projection of the coherent amplitude onto the sampled LO axis.
pub fn scan_trace(
    state: &QuadratureState,
    waveform: &PhaseWaveform,
    settings: &BhdSettings,
    duration_s: f64,
    sample_rate_hz: f64,
    theta_rms: f64,
    rng_seed: u64,
) -> Result<ScanTrace, HomodyneError> {
    settings.check_dominance(state)?;
    if theta_rms < 0.0 {
        return Err(HomodyneError::NegativeJitter(theta_rms));
    }
    if let Some(period_s) = waveform.period() {
        if sample_rate_hz < 2.0 * waveform.frequency_hz {
            return Err(HomodyneError::SampleRateTooLow {
                rate_hz: sample_rate_hz,
                freq_hz: waveform.frequency_hz,
            });
        }
        if duration_s < period_s {
            return Err(HomodyneError::DurationTooShort {
                duration_s,
                period_s,
            });
        }
    }

    let detected = detected_state(state, settings);
    let (v_lo, v_hi) = detected.cov().eigenvalues();
    let minor_axis = detected.cov().principal_angle() + FRAC_PI_2;
    let mean = detected.mean();

    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let wander = if theta_rms > 0.0 {
        Some(Normal::new(0.0, theta_rms).expect("positive jitter sigma"))
    } else {
        None
    };

    let n = ((duration_s * sample_rate_hz).round() as usize).max(1);
    let mut samples = Vec::with_capacity(n);
    for i in 0..n {
        let t = i as f64 / sample_rate_hz;
        let eps = wander.map_or(0.0, |d| d.sample(&mut rng));
        let phase = waveform.phase_at(t) + eps;
        let v = jitter_averaged_at(v_lo, v_hi, phase - minor_axis, theta_rms);
        let (s, c) = phase.sin_cos();
        samples.push(TraceSample {
            time_s: t,
            noise_db: DbValue::from_variance(v).expect("positive variance").db(),
            dc_arb: mean[0] * c + mean[1] * s,
        });
    }

    Ok(ScanTrace {
        samples,
        settings: *settings,
        waveform: *waveform,
        theta_rms,
        rng_seed,
    })
}

/// Seed phase that minimizes the amplifier output power: the
/// deamplification lock point found by minimizing the DC component of the
/// detector output. Golden-section refinement after a coarse bracket.
pub fn dc_lock_phase(
    seed_state: &QuadratureState,
    params: &OpaParams,
    pump_w: f64,
) -> Result<f64, HomodyneError> {
    if seed_state.optical_power() <= 0.0 {
        return Err(HomodyneError::ZeroMeanLock);
    }
    let power_at = |phase: f64| opa_transform(seed_state, params, pump_w, phase).optical_power();

    // The normalized gain is pi-periodic in the seed phase. Bracket the
    // minimum on a coarse grid, then refine.
    let coarse = 64;
    let mut best_k = 0;
    let mut best_p = f64::INFINITY;
    for k in 0..coarse {
        let p = power_at(k as f64 * PI / coarse as f64);
        if p < best_p {
            best_p = p;
            best_k = k;
        }
    }
    let step = PI / coarse as f64;
    let mut a = (best_k as f64 - 1.0) * step;
    let mut b = (best_k as f64 + 1.0) * step;

    let inv_phi = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = power_at(c);
    let mut fd = power_at(d);
    while (b - a).abs() > 1e-12 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = power_at(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = power_at(d);
        }
    }
    Ok(0.5 * (a + b).rem_euclid(2.0 * PI))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::{gain_extrema, ChainConfig};
    use crate::gaussian::DEFAULT_WAVELENGTH_M;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use rand::Rng;

    #[test]
    fn detected_state_identity_when_ideal() {
        let settings = BhdSettings {
            lo_power_w: 5e-3,
            visibility_efficiency: 1.0,
            detector_efficiency: 1.0,
            dark_clearance_db: None,
            analysis_frequency_hz: 2.5e6,
        };
        let s = QuadratureState::vacuum().squeeze(0.4, 0.2);
        assert_eq!(detected_state(&s, &settings), s);
    }

    #[test]
    fn reference_detection_transmission() {
        // 0.97 * 0.99 = 0.9603
        let settings = BhdSettings::reference();
        let s = QuadratureState::coherent(1e-5, DEFAULT_WAVELENGTH_M).unwrap();
        let out = detected_state(&s, &settings);
        assert_relative_eq!(out.optical_power() / 1e-5, 0.9603, max_relative = 1e-12);
    }

    #[test]
    fn vacuum_stays_vacuum_through_detection() {
        let settings = BhdSettings::reference();
        let out = detected_state(&QuadratureState::vacuum(), &settings);
        assert_abs_diff_eq!(out.measure_variance(0.3), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn dark_noise_lifts_both_axes() {
        let settings = BhdSettings {
            dark_clearance_db: Some(10.0),
            ..BhdSettings::reference()
        };
        let out = detected_state(&QuadratureState::vacuum(), &settings);
        assert_abs_diff_eq!(out.cov().xx, 1.1, epsilon = 1e-12);
        assert_abs_diff_eq!(out.cov().pp, 1.1, epsilon = 1e-12);
    }

    #[test]
    fn vacuum_noise_is_zero_db_everywhere() {
        let settings = BhdSettings::reference();
        for k in 0..8 {
            let db = noise_power_db(&QuadratureState::vacuum(), k as f64 * PI / 4.0, &settings)
                .unwrap()
                .db();
            assert_abs_diff_eq!(db, 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn lo_dominance_enforced() {
        let settings = BhdSettings {
            lo_power_w: 1e-6,
            ..BhdSettings::reference()
        };
        let bright = QuadratureState::coherent(1e-4, DEFAULT_WAVELENGTH_M).unwrap();
        assert!(matches!(
            noise_power_db(&bright, 0.0, &settings),
            Err(HomodyneError::LoNotDominant { .. })
        ));
    }

    #[test]
    fn noise_power_pi_periodic() {
        let settings = BhdSettings::reference();
        let s = QuadratureState::vacuum().squeeze(0.5, 0.7);
        for k in 0..8 {
            let phase = k as f64 * 0.4;
            let a = noise_power_db(&s, phase, &settings).unwrap().db();
            let b = noise_power_db(&s, phase + PI, &settings).unwrap().db();
            assert_abs_diff_eq!(a, b, epsilon = 1e-9);
        }
    }

    #[test]
    fn noise_floor_matches_detected_eigenvalue() {
        let settings = BhdSettings::reference();
        let s = QuadratureState::vacuum().squeeze(0.6, 0.9);
        let detected = detected_state(&s, &settings);
        let (v_lo, _) = detected.cov().eigenvalues();
        let mut min_db = f64::INFINITY;
        for k in 0..4096 {
            let db = noise_power_db(&s, k as f64 * PI / 4096.0, &settings)
                .unwrap()
                .db();
            min_db = min_db.min(db);
        }
        assert_relative_eq!(
            10f64.powf(min_db / 10.0),
            v_lo,
            max_relative = 1e-6
        );
    }

    #[test]
    fn jitter_zero_returns_v_min() {
        assert_abs_diff_eq!(
            jitter_averaged_variance(0.5, 2.0, 0.0).unwrap(),
            0.5,
            epsilon = 1e-15
        );
    }

    #[test]
    fn jitter_large_sigma_approaches_midpoint() {
        let v = jitter_averaged_variance(0.5, 2.0, 50.0).unwrap();
        assert_abs_diff_eq!(v, 1.25, epsilon = 1e-12);
    }

    #[test]
    fn jitter_frozen_reference_value() {
        // v_min = 0.5, v_max = 2.0, sigma = 0.1:
        // w = (1 + e^{-0.02})/2 = 0.990099338...
        // V  = 0.5*w + 2*(1-w)  = 0.514851
        let v = jitter_averaged_variance(0.5, 2.0, 0.1).unwrap();
        assert_abs_diff_eq!(v, 0.5149, epsilon = 5e-5);
    }

    #[test]
    fn jitter_rejects_inverted_extrema() {
        assert!(jitter_averaged_variance(2.0, 0.5, 0.1).is_err());
    }

    #[test]
    fn jitter_closed_form_matches_monte_carlo() {
        // Freeze five sigma values; 1e6 Gaussian draws each.
        let (v_min, v_max) = (0.5, 2.0);
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for sigma in [0.01, 0.05, 0.1, 0.3, 1.0] {
            let normal = Normal::new(0.0, sigma).unwrap();
            let n = 1_000_000;
            let mut acc = 0.0;
            for _ in 0..n {
                let eps: f64 = normal.sample(&mut rng);
                acc += v_min * eps.cos().powi(2) + v_max * eps.sin().powi(2);
            }
            let mc = acc / n as f64;
            let closed = jitter_averaged_variance(v_min, v_max, sigma).unwrap();
            assert_relative_eq!(closed, mc, max_relative = 5e-3);
        }
    }

    #[test]
    fn jitter_monotonicity() {
        let mut last_min = 0.0;
        let mut last_max = f64::INFINITY;
        for k in 0..=20 {
            let sigma = k as f64 * 0.05;
            let at_sq = jitter_averaged_variance(0.5, 2.0, sigma).unwrap();
            let at_anti = jitter_averaged_at(0.5, 2.0, FRAC_PI_2, sigma);
            assert!(at_sq >= last_min - 1e-12);
            assert!(at_anti <= last_max + 1e-12);
            last_min = at_sq;
            last_max = at_anti;
        }
    }

    #[test]
    fn scan_trace_flat_for_vacuum_without_jitter() {
        let settings = BhdSettings::reference();
        let waveform = PhaseWaveform::new(WaveformShape::Triangle, 3.0, 2.0 * PI, 0.0).unwrap();
        let trace = scan_trace(
            &QuadratureState::vacuum(),
            &waveform,
            &settings,
            1.0,
            512.0,
            0.0,
            7,
        )
        .unwrap();
        for s in &trace.samples {
            assert_abs_diff_eq!(s.noise_db, 0.0, epsilon = 1e-12);
            assert_abs_diff_eq!(s.dc_arb, 0.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn scan_trace_deterministic_per_seed() {
        let settings = BhdSettings::reference();
        let waveform = PhaseWaveform::new(WaveformShape::Triangle, 3.0, 2.0 * PI, 0.0).unwrap();
        let s = QuadratureState::vacuum().squeeze(0.5, 0.0);
        let a = scan_trace(&s, &waveform, &settings, 1.0, 256.0, 0.2, 42).unwrap();
        let b = scan_trace(&s, &waveform, &settings, 1.0, 256.0, 0.2, 42).unwrap();
        assert_eq!(a, b);
        let c = scan_trace(&s, &waveform, &settings, 1.0, 256.0, 0.2, 43).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn scan_trace_floor_respects_jitter_limit() {
        let settings = BhdSettings::reference();
        let waveform = PhaseWaveform::new(WaveformShape::Triangle, 3.0, 2.0 * PI, 0.0).unwrap();
        let s = QuadratureState::vacuum().squeeze(0.6, 0.0);
        let theta_rms = 0.25;
        let trace = scan_trace(&s, &waveform, &settings, 2.0, 1024.0, theta_rms, 3).unwrap();
        let detected = detected_state(&s, &settings);
        let (v_lo, v_hi) = detected.cov().eigenvalues();
        let floor_db = DbValue::from_variance(
            jitter_averaged_variance(v_lo, v_hi, theta_rms).unwrap(),
        )
        .unwrap()
        .db();
        let min_db = trace
            .samples
            .iter()
            .map(|s| s.noise_db)
            .fold(f64::INFINITY, f64::min);
        // Minima approach the jitter-limited level but never dip below the
        // clean minimum.
        assert!(min_db >= DbValue::from_variance(v_lo).unwrap().db() - 0.01);
        assert_abs_diff_eq!(min_db, floor_db, epsilon = 0.05);
    }

    #[test]
    fn scan_trace_dc_extrema_align_with_noise_minima() {
        // Bright state with mean along the squeezed axis (deamplification
        // lock): |DC| peaks where the noise dips, within one sample step.
        let settings = BhdSettings::reference();
        let s = QuadratureState::coherent(1e-5, DEFAULT_WAVELENGTH_M)
            .unwrap()
            .squeeze(0.5, 0.0);
        let waveform = PhaseWaveform::new(WaveformShape::Sawtooth, 1.0, PI, 0.0).unwrap();
        let trace = scan_trace(&s, &waveform, &settings, 1.0, 1024.0, 0.0, 1).unwrap();
        let step = 1.0 / 1024.0;
        let noise_min = trace
            .samples
            .iter()
            .min_by(|a, b| a.noise_db.total_cmp(&b.noise_db))
            .unwrap();
        let dc_max = trace
            .samples
            .iter()
            .max_by(|a, b| a.dc_arb.abs().total_cmp(&b.dc_arb.abs()))
            .unwrap();
        assert!((noise_min.time_s - dc_max.time_s).abs() <= step + 1e-12);
    }

    #[test]
    fn scan_trace_rejects_undersampling_and_short_duration() {
        let settings = BhdSettings::reference();
        let waveform = PhaseWaveform::new(WaveformShape::Triangle, 10.0, PI, 0.0).unwrap();
        let v = QuadratureState::vacuum();
        assert!(matches!(
            scan_trace(&v, &waveform, &settings, 1.0, 5.0, 0.0, 0),
            Err(HomodyneError::SampleRateTooLow { .. })
        ));
        assert!(matches!(
            scan_trace(&v, &waveform, &settings, 0.05, 256.0, 0.0, 0),
            Err(HomodyneError::DurationTooShort { .. })
        ));
    }

    #[test]
    fn waveform_validation() {
        assert!(PhaseWaveform::new(WaveformShape::Triangle, 0.0, 1.0, 0.0).is_err());
        assert!(PhaseWaveform::new(WaveformShape::Sawtooth, 1.0, -1.0, 0.0).is_err());
        assert!(PhaseWaveform::new(WaveformShape::Constant, 0.0, 0.0, 0.3).is_ok());
    }

    #[test]
    fn dc_lock_single_squeezer_locks_at_zero() {
        let params = OpaParams::ideal(1.2);
        let seed = QuadratureState::coherent(80e-6, DEFAULT_WAVELENGTH_M).unwrap();
        let lock = dc_lock_phase(&seed, &params, 0.06).unwrap();
        // Minimum at phi = 0 (mod pi); power there is e^{-4r} of the input.
        let folded = lock.min((lock - PI).abs()).min((lock - 2.0 * PI).abs());
        assert_abs_diff_eq!(folded, 0.0, epsilon = 1e-6);
        let r = params.pass_rate(0.06);
        let power = opa_transform(&seed, &params, 0.06, lock).optical_power();
        assert_relative_eq!(power, 80e-6 * (-4.0 * r).exp(), max_relative = 1e-9);
    }

    #[test]
    fn dc_lock_matches_grid_oracle() {
        let params = crate::chain::OpaParams {
            kappa: 1.4,
            eta_mid: 0.85,
            delta: 0.7,
            n_pump: 0.2,
            eta_wg: 0.75,
            eta_inject: 0.6,
        };
        let pump = 0.06;
        let seed = QuadratureState::coherent(80e-6, DEFAULT_WAVELENGTH_M).unwrap();
        let lock = dc_lock_phase(&seed, &params, pump).unwrap();
        let lock_power = opa_transform(&seed, &params, pump, lock).optical_power();

        let mut oracle_best = f64::INFINITY;
        for k in 0..10_000 {
            let p = opa_transform(&seed, &params, pump, k as f64 * PI / 10_000.0).optical_power();
            oracle_best = oracle_best.min(p);
        }
        assert_relative_eq!(lock_power, oracle_best, max_relative = 1e-6);

        // At the lock the normalized gain sits at its minimum.
        let (_, gmin) = gain_extrema(&params, pump);
        let unpumped = opa_transform(&seed, &params, 0.0, lock).optical_power();
        assert_relative_eq!(lock_power / unpumped, gmin, max_relative = 1e-9);
    }

    #[test]
    fn dc_lock_rejects_vacuum() {
        let params = ChainConfig::reference().opa;
        assert!(matches!(
            dc_lock_phase(&QuadratureState::vacuum(), &params, 0.06),
            Err(HomodyneError::ZeroMeanLock)
        ));
    }

    #[test]
    fn lock_phase_aligns_with_gain_minimum_grid() {
        let params = crate::chain::OpaParams {
            kappa: 1.1,
            eta_mid: 0.9,
            delta: -0.5,
            n_pump: 0.0,
            eta_wg: 0.75,
            eta_inject: 1.0,
        };
        let pump = 0.05;
        let seed = QuadratureState::coherent(50e-6, DEFAULT_WAVELENGTH_M).unwrap();
        let lock = dc_lock_phase(&seed, &params, pump).unwrap();

        let n = 4096;
        let step = PI / n as f64;
        let mut best_k = 0;
        let mut best_g = f64::INFINITY;
        for k in 0..n {
            let g = crate::chain::opa_power_gain(&params, pump, k as f64 * step);
            if g < best_g {
                best_g = g;
                best_k = k;
            }
        }
        let grid_phase = best_k as f64 * step;
        let diff = (lock - grid_phase).rem_euclid(PI);
        let folded = diff.min(PI - diff);
        assert!(folded <= step + 1e-9, "lock {lock} vs grid {grid_phase}");
    }

    #[test]
    fn random_states_jitter_average_consistency() {
        // jitter_averaged_at at delta=0 equals jitter_averaged_variance.
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..50 {
            let v_min = rng.gen_range(0.1..1.0);
            let v_max = v_min + rng.gen_range(0.0..3.0);
            let sigma = rng.gen_range(0.0..1.5);
            assert_relative_eq!(
                jitter_averaged_at(v_min, v_max, 0.0, sigma),
                jitter_averaged_variance(v_min, v_max, sigma).unwrap(),
                max_relative = 1e-12
            );
        }
    }
}
