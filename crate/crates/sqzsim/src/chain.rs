//! Physical component models composing the generation chain: classical power
//! bookkeeping for the pump stage, the two-segment double-pass parametric
//! amplifier, and the downstream loss budget (fiber, interference, detector).
//!
//! The amplifier is modeled as squeeze → inter-pass loss → squeeze with a
//! relative axis offset, plus an additive pump-noise term on the
//! anti-squeezed axis. Its total passive transmission always equals
//! `eta_wg`, however the inter-pass share is chosen. An additional
//! `eta_inject` factor models seed delivery loss ahead of the first pass
//! (coupler tap and splices); it attenuates the coherent amplitude only and
//! cancels out of every normalized gain.

use crate::gaussian::{Mat2, QuadratureState};
use crate::homodyne::PhaseWaveform;
use std::f64::consts::FRAC_PI_2;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ChainError {
    #[error("parameter {name} = {value} outside permitted range [{lo}, {hi}]")]
    ParamOutOfRange {
        name: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },
    #[error("inter-pass transmission {eta_mid} below total waveguide transmission {eta_wg}")]
    MidTransmissionBelowTotal { eta_mid: f64, eta_wg: f64 },
    #[error("pump power chain not monotone: {0}")]
    PumpChainNotMonotone(String),
    #[error("gain trace needs at least 2 samples, got {0}")]
    TooFewSamples(usize),
}

/// Two-segment double-pass amplifier parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OpaParams {
    /// Squeezing-rate coefficient per √W: r = kappa·√P_pump per pass.
    pub kappa: f64,
    /// Inter-pass power transmission. Must satisfy `eta_mid ≥ eta_wg` so the
    /// residual output loss stays physical.
    pub eta_mid: f64,
    /// Second-pass squeezing-axis offset in radians.
    pub delta: f64,
    /// Pump-induced excess noise added on the anti-squeezed axis,
    /// shot-noise units.
    pub n_pump: f64,
    /// Total passive waveguide transmission of the double pass.
    pub eta_wg: f64,
    /// Seed injection transmission ahead of the first pass.
    pub eta_inject: f64,
}

impl OpaParams {
    /// Lossless, noiseless amplifier with the given rate coefficient.
    pub fn ideal(kappa: f64) -> OpaParams {
        OpaParams {
            kappa,
            eta_mid: 1.0,
            delta: 0.0,
            n_pump: 0.0,
            eta_wg: 1.0,
            eta_inject: 1.0,
        }
    }

    pub fn validate(&self) -> Result<(), ChainError> {
        let checks = [
            ("kappa", self.kappa, 0.0, f64::INFINITY),
            ("eta_mid", self.eta_mid, 0.0, 1.0),
            ("n_pump", self.n_pump, 0.0, f64::INFINITY),
            ("eta_wg", self.eta_wg, f64::MIN_POSITIVE, 1.0),
            ("eta_inject", self.eta_inject, f64::MIN_POSITIVE, 1.0),
        ];
        for (name, value, lo, hi) in checks {
            if !(lo..=hi).contains(&value) || !value.is_finite() {
                return Err(ChainError::ParamOutOfRange {
                    name,
                    value,
                    lo,
                    hi: hi.min(f64::MAX),
                });
            }
        }
        if self.eta_mid < self.eta_wg {
            return Err(ChainError::MidTransmissionBelowTotal {
                eta_mid: self.eta_mid,
                eta_wg: self.eta_wg,
            });
        }
        Ok(())
    }

    /// Per-pass squeezing rate at the given pump power.
    pub fn pass_rate(&self, pump_w: f64) -> f64 {
        self.kappa * pump_w.max(0.0).sqrt()
    }

    /// Composite amplitude map of the two squeezer passes (inter-pass and
    /// output losses excluded; those are scalar on the mean and cancel from
    /// normalized gains).
    fn composite_squeeze(&self, pump_w: f64, seed_phase: f64) -> Mat2 {
        let r = self.pass_rate(pump_w);
        Mat2::squeezer(r, seed_phase + self.delta).mul(&Mat2::squeezer(r, seed_phase))
    }
}

/// Apply the double-pass amplifier to a state: injection loss, first pass,
/// inter-pass loss, second pass, pump noise on the anti-squeezed axis, then
/// the residual output loss that completes the `eta_wg` budget.
pub fn opa_transform(
    state: &QuadratureState,
    params: &OpaParams,
    pump_w: f64,
    seed_phase: f64,
) -> QuadratureState {
    let r = params.pass_rate(pump_w);
    let composite = params.composite_squeeze(pump_w, seed_phase);
    // Anti-squeezed axis of the composite amplifier; arbitrary when the
    // amplifier is isotropic (no pump), in which case the orthogonal of the
    // seed axis is used.
    let (s_lo, s_hi) = composite.singular_values();
    let anti_axis = if (s_hi - s_lo).abs() > 1e-12 {
        composite.major_output_axis()
    } else {
        seed_phase + FRAC_PI_2
    };
    state
        .loss(params.eta_inject)
        .expect("validated injection transmission")
        .squeeze(r, seed_phase)
        .loss(params.eta_mid)
        .expect("validated inter-pass transmission")
        .squeeze(r, seed_phase + params.delta)
        .excess_noise(params.n_pump, anti_axis)
        .expect("validated pump noise")
        .loss(params.eta_wg / params.eta_mid)
        .expect("validated residual transmission")
}

/// Parametric power gain at one seed phase, normalized to the unpumped
/// transmission of the same amplifier.
pub fn opa_power_gain(params: &OpaParams, pump_w: f64, seed_phase: f64) -> f64 {
    let probe = QuadratureState::coherent(1.0, crate::gaussian::DEFAULT_WAVELENGTH_M)
        .expect("unit probe power");
    let pumped = opa_transform(&probe, params, pump_w, seed_phase).optical_power();
    let unpumped = opa_transform(&probe, params, 0.0, seed_phase).optical_power();
    pumped / unpumped
}

/// Analytic extrema of `opa_power_gain` over the seed phase, returned as
/// `(max, min)`. These are the squared singular values of the composite
/// two-pass amplitude map; passive losses cancel in the normalization.
pub fn gain_extrema(params: &OpaParams, pump_w: f64) -> (f64, f64) {
    let (s_lo, s_hi) = params.composite_squeeze(pump_w, 0.0).singular_values();
    (s_hi * s_hi, s_lo * s_lo)
}

/// Sample the normalized parametric gain along a phase waveform. The trace is
/// deterministic; one sample per uniformly spaced instant over one waveform
/// period (one second for a constant waveform).
pub fn scan_gain_trace(
    params: &OpaParams,
    pump_w: f64,
    waveform: &PhaseWaveform,
    n_samples: usize,
) -> Result<Vec<(f64, f64)>, ChainError> {
    if n_samples < 2 {
        return Err(ChainError::TooFewSamples(n_samples));
    }
    let duration = waveform.period().unwrap_or(1.0);
    let dt = duration / (n_samples - 1) as f64;
    Ok((0..n_samples)
        .map(|i| {
            let t = i as f64 * dt;
            (t, opa_power_gain(params, pump_w, waveform.phase_at(t)))
        })
        .collect())
}

/// Classical power bookkeeping of the pump preparation stage
/// (fundamental → second harmonic → attenuated pump into the amplifier).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PumpStage {
    pub fundamental_power_w: f64,
    pub shg_output_w: f64,
    /// Phase-matching temperature, metadata only.
    pub phase_match_temp_c: f64,
    pub pump_into_wg2_w: f64,
}

impl PumpStage {
    pub fn reference() -> PumpStage {
        PumpStage {
            fundamental_power_w: 0.8,
            shg_output_w: 0.11,
            phase_match_temp_c: 37.3,
            pump_into_wg2_w: 0.06,
        }
    }

    /// Second-harmonic conversion efficiency, derived metadata.
    pub fn conversion_efficiency(&self) -> f64 {
        if self.fundamental_power_w > 0.0 {
            self.shg_output_w / self.fundamental_power_w
        } else {
            0.0
        }
    }
}

/// Pump power delivered into the amplifier, after validating that the power
/// chain is monotone (energy conservation at each step).
pub fn shg_pump(stage: &PumpStage) -> Result<f64, ChainError> {
    if stage.shg_output_w > stage.fundamental_power_w {
        return Err(ChainError::PumpChainNotMonotone(format!(
            "shg output {} W exceeds fundamental {} W",
            stage.shg_output_w, stage.fundamental_power_w
        )));
    }
    if stage.pump_into_wg2_w > stage.shg_output_w {
        return Err(ChainError::PumpChainNotMonotone(format!(
            "delivered pump {} W exceeds shg output {} W",
            stage.pump_into_wg2_w, stage.shg_output_w
        )));
    }
    if stage.fundamental_power_w < 0.0 || stage.shg_output_w < 0.0 || stage.pump_into_wg2_w < 0.0 {
        return Err(ChainError::PumpChainNotMonotone(
            "negative power in pump chain".into(),
        ));
    }
    Ok(stage.pump_into_wg2_w)
}

/// Full chain description: seed and pump powers, amplifier parameters,
/// downstream efficiencies, detection settings, and the phase-jitter level
/// of the seed path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainConfig {
    pub seed_power_w: f64,
    pub pump_power_w: f64,
    pub opa: OpaParams,
    pub eta_fiber: f64,
    pub eta_interference: f64,
    pub eta_detector: f64,
    pub lo_power_w: f64,
    /// Balanced-coupler insertion loss, carried as metadata (the measured
    /// total efficiency budget already absorbs it).
    pub balanced_coupler_insertion_db: f64,
    /// Balanced-coupler splitting-ratio deviation, metadata.
    pub ratio_deviation: f64,
    /// RMS phase jitter of the seed path relative to the pump, radians.
    pub phase_jitter_rms: f64,
}

impl ChainConfig {
    /// Measured operating point of the reference experiment.
    pub fn reference() -> ChainConfig {
        ChainConfig {
            seed_power_w: 80e-6,
            pump_power_w: 60e-3,
            opa: OpaParams {
                kappa: 1.073914,
                eta_mid: 1.0,
                delta: 0.0,
                n_pump: 0.0,
                eta_wg: 0.75,
                eta_inject: 29.0 / 60.0,
            },
            eta_fiber: 0.74,
            eta_interference: 0.97,
            eta_detector: 0.99,
            lo_power_w: 5e-3,
            balanced_coupler_insertion_db: 0.21,
            ratio_deviation: 0.02,
            phase_jitter_rms: 0.348240,
        }
    }

    /// Lossless, jitter-free variant used as a documentation-by-example
    /// baseline.
    pub fn ideal() -> ChainConfig {
        ChainConfig {
            seed_power_w: 80e-6,
            pump_power_w: 60e-3,
            opa: OpaParams::ideal(1.0),
            eta_fiber: 1.0,
            eta_interference: 1.0,
            eta_detector: 1.0,
            lo_power_w: 5e-3,
            balanced_coupler_insertion_db: 0.0,
            ratio_deviation: 0.0,
            phase_jitter_rms: 0.0,
        }
    }

    /// Product of every passive transmission seen by the squeezed mode
    /// between generation and detection.
    pub fn total_efficiency(&self) -> f64 {
        self.opa.eta_wg * self.eta_fiber * self.eta_interference * self.eta_detector
    }

    pub fn validate(&self) -> Result<(), ChainError> {
        self.opa.validate()?;
        let checks = [
            ("seed_power", self.seed_power_w, 0.0, f64::INFINITY),
            ("pump_power", self.pump_power_w, 0.0, f64::INFINITY),
            ("eta_fiber", self.eta_fiber, 0.0, 1.0),
            ("eta_interference", self.eta_interference, 0.0, 1.0),
            ("eta_detector", self.eta_detector, 0.0, 1.0),
            ("lo_power", self.lo_power_w, 0.0, f64::INFINITY),
            ("phase_jitter_rms", self.phase_jitter_rms, 0.0, f64::INFINITY),
        ];
        for (name, value, lo, hi) in checks {
            if !(lo..=hi).contains(&value) || !value.is_finite() {
                return Err(ChainError::ParamOutOfRange {
                    name,
                    value,
                    lo,
                    hi: hi.min(f64::MAX),
                });
            }
        }
        Ok(())
    }
}

/// Everything after the amplifier: fiber, interference, and detector losses
/// applied in sequence (the amplifier's own `eta_wg` is applied inside
/// `opa_transform`).
pub fn downstream_loss(state: &QuadratureState, cfg: &ChainConfig) -> QuadratureState {
    state
        .loss(cfg.eta_fiber)
        .expect("validated fiber transmission")
        .loss(cfg.eta_interference)
        .expect("validated interference efficiency")
        .loss(cfg.eta_detector)
        .expect("validated detector efficiency")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::{DbValue, DEFAULT_WAVELENGTH_M};
    use crate::homodyne::WaveformShape;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use rand::{Rng, SeedableRng};
    use std::f64::consts::PI;

    fn seed_probe() -> QuadratureState {
        QuadratureState::coherent(80e-6, DEFAULT_WAVELENGTH_M).unwrap()
    }

    #[test]
    fn unpumped_amplifier_is_pure_injection_and_waveguide_loss() {
        let params = OpaParams {
            kappa: 1.0,
            eta_mid: 1.0,
            delta: 0.0,
            n_pump: 0.0,
            eta_wg: 0.75,
            eta_inject: 1.0,
        };
        let out = opa_transform(&seed_probe(), &params, 0.0, 0.3);
        let direct = seed_probe().loss(0.75).unwrap();
        assert_relative_eq!(out.optical_power(), direct.optical_power(), max_relative = 1e-12);
        assert_relative_eq!(out.cov().xx, direct.cov().xx, max_relative = 1e-12);
        assert_relative_eq!(out.cov().pp, direct.cov().pp, max_relative = 1e-12);
    }

    #[test]
    fn unpumped_output_power_matches_measured_budget() {
        // 80 uW in, 29 uW out with the injection factor calibrated to the
        // measured unpumped budget.
        let cfg = ChainConfig::reference();
        let out = opa_transform(&seed_probe(), &cfg.opa, 0.0, 0.0);
        assert_relative_eq!(out.optical_power(), 29e-6, max_relative = 1e-6);
    }

    #[test]
    fn equal_axis_passes_compose_additively() {
        let params = OpaParams {
            kappa: 0.9,
            eta_mid: 1.0,
            delta: 0.0,
            n_pump: 0.0,
            eta_wg: 0.75,
            eta_inject: 1.0,
        };
        let pump = 0.05;
        let r = params.pass_rate(pump);
        let out = opa_transform(&seed_probe(), &params, pump, 0.2);
        let direct = seed_probe().squeeze(2.0 * r, 0.2).loss(0.75).unwrap();
        assert_relative_eq!(out.mean()[0], direct.mean()[0], max_relative = 1e-12);
        assert_relative_eq!(out.mean()[1], direct.mean()[1], max_relative = 1e-12);
        assert_relative_eq!(out.cov().xx, direct.cov().xx, max_relative = 1e-12);
        assert_relative_eq!(out.cov().xp, direct.cov().xp, max_relative = 1e-12);
        assert_relative_eq!(out.cov().pp, direct.cov().pp, max_relative = 1e-12);
    }

    #[test]
    fn unpumped_gain_is_unity_at_every_phase() {
        let params = ChainConfig::reference().opa;
        for k in 0..12 {
            let phase = k as f64 * PI / 6.0;
            assert_abs_diff_eq!(opa_power_gain(&params, 0.0, phase), 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn lossless_gain_extrema_product_is_unity() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let params = OpaParams {
                kappa: rng.gen_range(0.1..3.0),
                eta_mid: 1.0,
                delta: rng.gen_range(-PI..PI),
                n_pump: 0.0,
                eta_wg: 1.0,
                eta_inject: 1.0,
            };
            let pump = rng.gen_range(1e-3..0.1);
            let (gmax, gmin) = gain_extrema(&params, pump);
            assert_abs_diff_eq!(gmax * gmin, 1.0, epsilon = 1e-9);
        }
    }

    // The product law above holds for lossy amplifiers too: passive losses
    // are scalars on the amplitude and divide out of the normalized gain.
    #[test]
    fn gain_extrema_product_is_loss_independent() {
        let params = OpaParams {
            kappa: 1.4,
            eta_mid: 0.8,
            delta: 0.6,
            n_pump: 0.4,
            eta_wg: 0.75,
            eta_inject: 0.5,
        };
        let (gmax, gmin) = gain_extrema(&params, 0.06);
        assert_abs_diff_eq!(gmax * gmin, 1.0, epsilon = 1e-9);
    }

    #[test]
    fn gain_extrema_match_dense_phase_sampling() {
        let params = OpaParams {
            kappa: 1.7,
            eta_mid: 0.85,
            delta: 0.9,
            n_pump: 0.1,
            eta_wg: 0.75,
            eta_inject: 0.7,
        };
        let pump = 0.06;
        let (gmax, gmin) = gain_extrema(&params, pump);
        let mut smax = f64::NEG_INFINITY;
        let mut smin = f64::INFINITY;
        for k in 0..20_000 {
            let g = opa_power_gain(&params, pump, k as f64 * PI / 20_000.0);
            smax = smax.max(g);
            smin = smin.min(g);
        }
        assert_relative_eq!(smax, gmax, max_relative = 1e-6);
        assert_relative_eq!(smin, gmin, max_relative = 1e-6);
    }

    #[test]
    fn normalized_gain_ignores_downstream_loss() {
        let params = ChainConfig::reference().opa;
        let pump = 0.06;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..10 {
            let eta = rng.gen_range(0.1..1.0);
            let phase = rng.gen_range(0.0..PI);
            let probe = seed_probe();
            let pumped = opa_transform(&probe, &params, pump, phase)
                .loss(eta)
                .unwrap()
                .optical_power();
            let unpumped = opa_transform(&probe, &params, 0.0, phase)
                .loss(eta)
                .unwrap()
                .optical_power();
            assert_relative_eq!(
                pumped / unpumped,
                opa_power_gain(&params, pump, phase),
                max_relative = 1e-9
            );
        }
    }

    #[test]
    fn pure_double_pass_preserves_purity_before_output_loss() {
        let params = OpaParams {
            kappa: 1.2,
            eta_mid: 1.0,
            delta: 0.4,
            n_pump: 0.0,
            eta_wg: 1.0,
            eta_inject: 1.0,
        };
        let out = opa_transform(&QuadratureState::vacuum(), &params, 0.06, 0.0);
        assert_abs_diff_eq!(out.cov().det(), 1.0, epsilon = 1e-9);
    }

    #[test]
    fn max_gain_monotone_in_pump_power() {
        let params = ChainConfig::reference().opa;
        let mut last = 0.0;
        for k in 0..=12 {
            let pump = k as f64 * 5e-3;
            let (gmax, _) = gain_extrema(&params, pump);
            assert!(gmax >= last - 1e-12, "gain dropped at pump {pump}");
            last = gmax;
        }
    }

    #[test]
    fn scan_gain_trace_flat_cases() {
        let params = ChainConfig::reference().opa;
        let constant = PhaseWaveform::new(WaveformShape::Constant, 0.0, 0.0, 0.0).unwrap();
        let trace = scan_gain_trace(&params, 0.0, &constant, 16).unwrap();
        for (_, g) in &trace {
            assert_abs_diff_eq!(*g, 1.0, epsilon = 1e-12);
        }
        // Constant waveform parked at the deamplification phase.
        let (_, gmin) = gain_extrema(&params, 0.06);
        let parked = PhaseWaveform::new(WaveformShape::Constant, 0.0, 0.0, 0.0).unwrap();
        let trace = scan_gain_trace(&params, 0.06, &parked, 16).unwrap();
        for (_, g) in &trace {
            assert_relative_eq!(*g, gmin, max_relative = 1e-9);
        }
    }

    #[test]
    fn triangle_scan_covers_gain_extrema() {
        let params = OpaParams {
            kappa: 1.5,
            eta_mid: 0.9,
            delta: 0.3,
            n_pump: 0.0,
            eta_wg: 0.75,
            eta_inject: 1.0,
        };
        let pump = 0.06;
        let waveform =
            PhaseWaveform::new(WaveformShape::Triangle, 5.0, 3.0 * PI, 0.0).unwrap();
        let trace = scan_gain_trace(&params, pump, &waveform, 4001).unwrap();
        let trace_max = trace.iter().map(|(_, g)| *g).fold(f64::MIN, f64::max);
        let trace_min = trace.iter().map(|(_, g)| *g).fold(f64::MAX, f64::min);
        let (gmax, gmin) = gain_extrema(&params, pump);
        assert_relative_eq!(trace_max, gmax, max_relative = 5e-3);
        assert_relative_eq!(trace_min, gmin, max_relative = 5e-3);
    }

    #[test]
    fn scan_gain_trace_rejects_tiny_sample_counts() {
        let params = ChainConfig::reference().opa;
        let waveform = PhaseWaveform::new(WaveformShape::Triangle, 5.0, PI, 0.0).unwrap();
        assert!(matches!(
            scan_gain_trace(&params, 0.06, &waveform, 1),
            Err(ChainError::TooFewSamples(1))
        ));
    }

    #[test]
    fn shg_pump_reference_values() {
        let stage = PumpStage::reference();
        assert_relative_eq!(shg_pump(&stage).unwrap(), 0.06, max_relative = 1e-12);
        assert_relative_eq!(stage.conversion_efficiency(), 0.1375, max_relative = 1e-12);
    }

    #[test]
    fn shg_pump_zero_fundamental() {
        let stage = PumpStage {
            fundamental_power_w: 0.0,
            shg_output_w: 0.0,
            phase_match_temp_c: 37.3,
            pump_into_wg2_w: 0.0,
        };
        assert_eq!(shg_pump(&stage).unwrap(), 0.0);
    }

    #[test]
    fn shg_pump_rejects_nonmonotone_chain() {
        let stage = PumpStage {
            pump_into_wg2_w: 0.2,
            ..PumpStage::reference()
        };
        assert!(shg_pump(&stage).is_err());
    }

    #[test]
    fn reference_total_efficiency_in_budget() {
        let cfg = ChainConfig::reference();
        let eta = cfg.total_efficiency();
        assert!(
            (0.528..=0.538).contains(&eta),
            "total efficiency {eta} outside [0.528, 0.538]"
        );
        assert_relative_eq!(eta, 0.533, max_relative = 0.01);
    }

    #[test]
    fn downstream_loss_identity_when_lossless() {
        let cfg = ChainConfig::ideal();
        let s = QuadratureState::vacuum().squeeze(0.6, 0.1);
        assert_eq!(downstream_loss(&s, &cfg), s);
    }

    #[test]
    fn downstream_loss_order_is_irrelevant() {
        let cfg = ChainConfig::reference();
        let s = QuadratureState::coherent(1e-4, DEFAULT_WAVELENGTH_M)
            .unwrap()
            .squeeze(0.5, 0.2);
        let chained = downstream_loss(&s, &cfg);
        let lumped = s
            .loss(cfg.eta_detector)
            .unwrap()
            .loss(cfg.eta_fiber)
            .unwrap()
            .loss(cfg.eta_interference)
            .unwrap();
        assert_relative_eq!(chained.cov().xx, lumped.cov().xx, max_relative = 1e-12);
        assert_relative_eq!(chained.cov().xp, lumped.cov().xp, max_relative = 1e-12);
        assert_relative_eq!(chained.cov().pp, lumped.cov().pp, max_relative = 1e-12);
    }

    #[test]
    fn detected_squeezing_arithmetic_through_reference_chain() {
        // A pure state squeezed to V_min = 0.349 at the amplifier output,
        // sent through the full 0.533 budget, detects at -1.85 dB.
        let cfg = ChainConfig::reference();
        let r = -0.25f64 * 0.349f64.ln();
        let pure = QuadratureState::vacuum().squeeze(2.0 * r, 0.0);
        // eta_wg belongs to the amplifier block; apply it by hand here.
        let after = downstream_loss(&pure.loss(cfg.opa.eta_wg).unwrap(), &cfg);
        let db = DbValue::from_variance(after.measure_variance(0.0)).unwrap().db();
        assert_abs_diff_eq!(db, -1.85, epsilon = 0.005);
    }

    #[test]
    fn validate_rejects_bad_parameters() {
        let mut params = ChainConfig::reference().opa;
        params.eta_mid = 0.5; // below eta_wg = 0.75
        assert!(matches!(
            params.validate(),
            Err(ChainError::MidTransmissionBelowTotal { .. })
        ));

        let mut cfg = ChainConfig::reference();
        cfg.eta_fiber = 1.2;
        assert!(cfg.validate().is_err());
    }
}
