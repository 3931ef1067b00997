//! Single-mode Gaussian-state algebra: states, symplectic transformations,
//! loss channels, quadrature statistics, and dB conversions.
//!
//! Units: shot-noise units throughout. The vacuum quadrature variance is 1,
//! and optical power is identified with the squared mean quadrature vector
//! (photon-flux normalization with the global constant fixed to 1), so only
//! power ratios are physically meaningful. Wavelength and linewidth ride
//! along as metadata and are never transformed.

use thiserror::Error;

/// Default carrier wavelength attached to states constructed without an
/// explicit wavelength.
pub const DEFAULT_WAVELENGTH_M: f64 = 1550e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GaussianError {
    #[error("optical power must be nonnegative, got {0}")]
    NegativePower(f64),
    #[error("power transmission must lie in [0, 1], got {0}")]
    TransmissionOutOfRange(f64),
    #[error("excess noise must be nonnegative, got {0}")]
    NegativeExcessNoise(f64),
    #[error("variance must be positive for a dB conversion, got {0}")]
    NonpositiveVariance(f64),
}

/// A 2×2 real matrix acting on quadrature vectors. Rotations and squeezers
/// are symplectic (det = 1); the type itself does not enforce that.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2(pub [[f64; 2]; 2]);

impl Mat2 {
    pub const IDENTITY: Mat2 = Mat2([[1.0, 0.0], [0.0, 1.0]]);

    /// Counter-clockwise rotation by `theta`.
    pub fn rotation(theta: f64) -> Mat2 {
        let (s, c) = theta.sin_cos();
        Mat2([[c, -s], [s, c]])
    }

    /// Single-mode squeezer `R(phi) · diag(e^{-r}, e^{+r}) · R(-phi)`:
    /// the quadrature along `phi` is contracted by `e^{-r}`, the orthogonal
    /// one stretched by `e^{+r}`.
    pub fn squeezer(r: f64, phi: f64) -> Mat2 {
        debug_assert!(r >= 0.0, "squeezing rate must be nonnegative");
        let (s, c) = phi.sin_cos();
        let em = (-r).exp();
        let ep = r.exp();
        Mat2([
            [em * c * c + ep * s * s, (em - ep) * s * c],
            [(em - ep) * s * c, em * s * s + ep * c * c],
        ])
    }

    pub fn mul(&self, rhs: &Mat2) -> Mat2 {
        let a = &self.0;
        let b = &rhs.0;
        Mat2([
            [
                a[0][0] * b[0][0] + a[0][1] * b[1][0],
                a[0][0] * b[0][1] + a[0][1] * b[1][1],
            ],
            [
                a[1][0] * b[0][0] + a[1][1] * b[1][0],
                a[1][0] * b[0][1] + a[1][1] * b[1][1],
            ],
        ])
    }

    pub fn apply(&self, v: [f64; 2]) -> [f64; 2] {
        [
            self.0[0][0] * v[0] + self.0[0][1] * v[1],
            self.0[1][0] * v[0] + self.0[1][1] * v[1],
        ]
    }

    pub fn det(&self) -> f64 {
        self.0[0][0] * self.0[1][1] - self.0[0][1] * self.0[1][0]
    }

    /// Singular values as `(min, max)`, from the eigenvalues of `M·Mᵀ`.
    pub fn singular_values(&self) -> (f64, f64) {
        let m = &self.0;
        let xx = m[0][0] * m[0][0] + m[0][1] * m[0][1];
        let xp = m[0][0] * m[1][0] + m[0][1] * m[1][1];
        let pp = m[1][0] * m[1][0] + m[1][1] * m[1][1];
        let (lo, hi) = Covariance { xx, xp, pp }.eigenvalues();
        (lo.max(0.0).sqrt(), hi.max(0.0).sqrt())
    }

    /// Angle of the eigenvector of `M·Mᵀ` with the largest eigenvalue: the
    /// output direction stretched the most by this map.
    pub fn major_output_axis(&self) -> f64 {
        let m = &self.0;
        let xx = m[0][0] * m[0][0] + m[0][1] * m[0][1];
        let xp = m[0][0] * m[1][0] + m[0][1] * m[1][1];
        let pp = m[1][0] * m[1][0] + m[1][1] * m[1][1];
        Covariance { xx, xp, pp }.principal_angle()
    }
}

/// 2×2 covariance matrix of the quadratures, symmetric by construction:
/// only the three independent entries are stored.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Covariance {
    pub xx: f64,
    pub xp: f64,
    pub pp: f64,
}

impl Covariance {
    pub const IDENTITY: Covariance = Covariance {
        xx: 1.0,
        xp: 0.0,
        pp: 1.0,
    };

    pub fn det(&self) -> f64 {
        self.xx * self.pp - self.xp * self.xp
    }

    /// Eigenvalues as `(min, max)`.
    pub fn eigenvalues(&self) -> (f64, f64) {
        let mid = 0.5 * (self.xx + self.pp);
        let rad = (0.25 * (self.xx - self.pp) * (self.xx - self.pp) + self.xp * self.xp).sqrt();
        (mid - rad, mid + rad)
    }

    /// Angle of the major-axis eigenvector. For an isotropic matrix the
    /// direction is arbitrary and 0 is returned.
    pub fn principal_angle(&self) -> f64 {
        0.5 * (2.0 * self.xp).atan2(self.xx - self.pp)
    }

    /// Variance of the quadrature along `theta`: `uᵀ·C·u` for
    /// `u = (cos θ, sin θ)`.
    pub fn variance_along(&self, theta: f64) -> f64 {
        let (s, c) = theta.sin_cos();
        self.xx * c * c + 2.0 * self.xp * s * c + self.pp * s * s
    }

    /// Congruence transform `S·C·Sᵀ`.
    pub fn congruence(&self, s: &Mat2) -> Covariance {
        let m = &s.0;
        let (a, b, c, d) = (m[0][0], m[0][1], m[1][0], m[1][1]);
        Covariance {
            xx: a * a * self.xx + 2.0 * a * b * self.xp + b * b * self.pp,
            xp: a * c * self.xx + (a * d + b * c) * self.xp + b * d * self.pp,
            pp: c * c * self.xx + 2.0 * c * d * self.xp + d * d * self.pp,
        }
    }
}

/// Carrier metadata carried by a state and never transformed by any
/// operation in this module.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OpticalMeta {
    pub wavelength_m: f64,
    pub linewidth_hz: f64,
}

impl Default for OpticalMeta {
    fn default() -> Self {
        OpticalMeta {
            wavelength_m: DEFAULT_WAVELENGTH_M,
            linewidth_hz: 0.0,
        }
    }
}

/// Single-mode Gaussian state: mean quadrature vector `(x, p)` plus a 2×2
/// covariance matrix, both in shot-noise units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureState {
    mean: [f64; 2],
    cov: Covariance,
    meta: OpticalMeta,
}

impl QuadratureState {
    /// The vacuum state: zero mean, identity covariance.
    pub fn vacuum() -> QuadratureState {
        QuadratureState {
            mean: [0.0, 0.0],
            cov: Covariance::IDENTITY,
            meta: OpticalMeta::default(),
        }
    }

    /// Coherent state of the given optical power, amplitude along the x
    /// quadrature. `|mean|² = power` under the fixed power convention.
    pub fn coherent(power_w: f64, wavelength_m: f64) -> Result<QuadratureState, GaussianError> {
        if power_w < 0.0 {
            return Err(GaussianError::NegativePower(power_w));
        }
        Ok(QuadratureState {
            mean: [power_w.sqrt(), 0.0],
            cov: Covariance::IDENTITY,
            meta: OpticalMeta {
                wavelength_m,
                linewidth_hz: 0.0,
            },
        })
    }

    pub fn with_linewidth(mut self, linewidth_hz: f64) -> QuadratureState {
        self.meta.linewidth_hz = linewidth_hz;
        self
    }

    pub fn mean(&self) -> [f64; 2] {
        self.mean
    }

    pub fn cov(&self) -> Covariance {
        self.cov
    }

    pub fn meta(&self) -> OpticalMeta {
        self.meta
    }

    /// Apply an arbitrary linear quadrature map: `mean → S·mean`,
    /// `cov → S·cov·Sᵀ`.
    pub fn transformed(&self, s: &Mat2) -> QuadratureState {
        QuadratureState {
            mean: s.apply(self.mean),
            cov: self.cov.congruence(s),
            meta: self.meta,
        }
    }

    /// Single-mode squeezing by rate `r` with squeezed axis along `phi`.
    pub fn squeeze(&self, r: f64, phi: f64) -> QuadratureState {
        self.transformed(&Mat2::squeezer(r, phi))
    }

    /// Rotate both mean and covariance by `theta`.
    pub fn phase_rotate(&self, theta: f64) -> QuadratureState {
        self.transformed(&Mat2::rotation(theta))
    }

    /// Pure-loss (beamsplitter) channel with power transmission `eta`:
    /// `mean → √η·mean`, `cov → η·cov + (1−η)·I`.
    pub fn loss(&self, eta: f64) -> Result<QuadratureState, GaussianError> {
        if !(0.0..=1.0).contains(&eta) {
            return Err(GaussianError::TransmissionOutOfRange(eta));
        }
        let rt = eta.sqrt();
        Ok(QuadratureState {
            mean: [self.mean[0] * rt, self.mean[1] * rt],
            cov: Covariance {
                xx: eta * self.cov.xx + (1.0 - eta),
                xp: eta * self.cov.xp,
                pp: eta * self.cov.pp + (1.0 - eta),
            },
            meta: self.meta,
        })
    }

    /// Add classical excess noise `n_ex` to the variance along axis `theta`;
    /// the mean is unchanged.
    pub fn excess_noise(&self, n_ex: f64, theta: f64) -> Result<QuadratureState, GaussianError> {
        if n_ex < 0.0 {
            return Err(GaussianError::NegativeExcessNoise(n_ex));
        }
        let (s, c) = theta.sin_cos();
        Ok(QuadratureState {
            mean: self.mean,
            cov: Covariance {
                xx: self.cov.xx + n_ex * c * c,
                xp: self.cov.xp + n_ex * s * c,
                pp: self.cov.pp + n_ex * s * s,
            },
            meta: self.meta,
        })
    }

    /// Quadrature variance along `theta` in shot-noise units.
    pub fn measure_variance(&self, theta: f64) -> f64 {
        self.cov.variance_along(theta)
    }

    /// Optical power carried by the coherent amplitude, in watts under the
    /// fixed `|mean|² = power` convention.
    pub fn optical_power(&self) -> f64 {
        self.mean[0] * self.mean[0] + self.mean[1] * self.mean[1]
    }
}

/// Relative noise power in decibels: `10·log10` of a variance ratio to shot
/// noise. Shot noise maps to exactly 0 dB; squeezing is negative,
/// anti-squeezing positive.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct DbValue(f64);

impl DbValue {
    pub fn new(db: f64) -> DbValue {
        DbValue(db)
    }

    /// `to_db`: convert a variance in shot-noise units to decibels.
    pub fn from_variance(variance: f64) -> Result<DbValue, GaussianError> {
        if variance <= 0.0 {
            return Err(GaussianError::NonpositiveVariance(variance));
        }
        Ok(DbValue(10.0 * variance.log10()))
    }

    /// `from_db`: convert back to a variance in shot-noise units.
    pub fn variance(self) -> f64 {
        10f64.powf(self.0 / 10.0)
    }

    pub fn db(self) -> f64 {
        self.0
    }
}
