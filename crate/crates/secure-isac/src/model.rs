//! Physical and geometric domain model: half-wavelength ULA steering vectors,
//! user/eavesdropper channels, and the discrete location prior with its
//! Gaussian-mixture relaxation.
//!
//! Antenna indices are 1-based in the formulas below and 0-based in storage;
//! entry `n` (1-based) of the transmit steering vector is
//! `exp(j*pi*(N+1-2n)*sin(theta)/2)`.

use crate::{C64, CMatrix, CVector};
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha12Rng;
use std::f64::consts::PI;

#[derive(Debug, thiserror::Error)]
pub enum ModelError {
    #[error("probabilities must sum to 1 within 1e-12 (got {0})")]
    ProbSum(f64),
    #[error("probability out of range: {0}")]
    ProbRange(f64),
    #[error("at least one candidate location is required")]
    NoLocations,
    #[error("angle {0} outside [-pi/2, pi/2)")]
    AngleRange(f64),
    #[error("candidate angles must be pairwise distinct")]
    DuplicateAngles,
    #[error("{0} must be positive (got {1})")]
    NonPositive(&'static str, f64),
    #[error("number of AN beams {0} exceeds transmit antennas {1}")]
    TooManyAnBeams(usize, usize),
    #[error("user channel has wrong dimension (expected {expected}, got {got})")]
    ChannelDim { expected: usize, got: usize },
    #[error("user channel is numerically parallel to steering vector at angle {0}")]
    ChannelAligned(f64),
    #[error("arcsin argument {0} outside [-1, 1]")]
    ArcsinDomain(f64),
    #[error("angle/probability lists have different lengths ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("beamformer power {used} exceeds budget {budget}")]
    PowerBudget { used: f64, budget: f64 },
    #[error("matrix is not positive semidefinite (min eigenvalue {0})")]
    NotPsd(f64),
}

/// Full physical configuration of one secure ISAC setup.
///
/// Powers and noise levels are linear milliwatts, gains linear, angles
/// radians. Construct with [`Scenario::new`], which enforces the invariants.
#[derive(Debug, Clone)]
pub struct Scenario {
    /// Number of BS transmit antennas.
    pub n_tx: usize,
    /// Number of BS receive antennas.
    pub n_rx: usize,
    /// Number of AN beams J (J <= n_tx).
    pub n_an: usize,
    /// Candidate target angles, each in [-pi/2, pi/2).
    pub angles: Vec<f64>,
    /// Prior probability of each candidate location.
    pub probs: Vec<f64>,
    /// Variance of each Gaussian mixture component (rad^2).
    pub sigma_theta_sq: f64,
    /// Common BS-target distance in meters.
    pub range_m: f64,
    /// Reference channel power gain at 1 m.
    pub beta0: f64,
    /// Minimum RCS amplitude gain |alpha_bar|.
    pub rcs_min_gain: f64,
    /// Noise power at the user receiver (mW).
    pub noise_user: f64,
    /// Noise power at the eavesdropper receiver (mW).
    pub noise_eve: f64,
    /// Noise power per BS receive antenna (mW).
    pub noise_radar: f64,
    /// Transmit power budget P (mW).
    pub power_budget: f64,
    /// Known downlink user channel h.
    pub user_channel: CVector,
}

impl Scenario {
    pub fn new(
        n_tx: usize,
        n_rx: usize,
        n_an: usize,
        angles: Vec<f64>,
        probs: Vec<f64>,
        sigma_theta_sq: f64,
        range_m: f64,
        beta0: f64,
        rcs_min_gain: f64,
        noise_user: f64,
        noise_eve: f64,
        noise_radar: f64,
        power_budget: f64,
        user_channel: CVector,
    ) -> Result<Self, ModelError> {
        let sc = Scenario {
            n_tx,
            n_rx,
            n_an,
            angles,
            probs,
            sigma_theta_sq,
            range_m,
            beta0,
            rcs_min_gain,
            noise_user,
            noise_eve,
            noise_radar,
            power_budget,
            user_channel,
        };
        sc.validate()?;
        Ok(sc)
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if self.angles.is_empty() {
            return Err(ModelError::NoLocations);
        }
        if self.angles.len() != self.probs.len() {
            return Err(ModelError::LengthMismatch(self.angles.len(), self.probs.len()));
        }
        let sum: f64 = self.probs.iter().sum();
        if (sum - 1.0).abs() > 1e-12 {
            return Err(ModelError::ProbSum(sum));
        }
        for &p in &self.probs {
            if !(0.0..=1.0).contains(&p) {
                return Err(ModelError::ProbRange(p));
            }
        }
        for &th in &self.angles {
            // Out-of-range angles are rejected, not wrapped: wrapping is
            // physically ambiguous for a ULA.
            if !(-PI / 2.0..PI / 2.0).contains(&th) {
                return Err(ModelError::AngleRange(th));
            }
        }
        for i in 0..self.angles.len() {
            for j in (i + 1)..self.angles.len() {
                if self.angles[i] == self.angles[j] {
                    return Err(ModelError::DuplicateAngles);
                }
            }
        }
        for (name, v) in [
            ("sigma_theta_sq", self.sigma_theta_sq),
            ("range_m", self.range_m),
            ("beta0", self.beta0),
            ("rcs_min_gain", self.rcs_min_gain),
            ("noise_user", self.noise_user),
            ("noise_eve", self.noise_eve),
            ("noise_radar", self.noise_radar),
            ("power_budget", self.power_budget),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(ModelError::NonPositive(name, v));
            }
        }
        if self.n_tx == 0 {
            return Err(ModelError::NonPositive("n_tx", 0.0));
        }
        if self.n_rx == 0 {
            return Err(ModelError::NonPositive("n_rx", 0.0));
        }
        if self.n_an == 0 {
            return Err(ModelError::NonPositive("n_an", 0.0));
        }
        if self.n_an > self.n_tx {
            return Err(ModelError::TooManyAnBeams(self.n_an, self.n_tx));
        }
        if self.user_channel.len() != self.n_tx {
            return Err(ModelError::ChannelDim {
                expected: self.n_tx,
                got: self.user_channel.len(),
            });
        }
        // h must not be parallel to any candidate steering vector, otherwise
        // the eavesdropper at that location sees exactly the user channel.
        let h_norm = self.user_channel.norm();
        if !(h_norm > 0.0) {
            return Err(ModelError::NonPositive("user_channel norm", h_norm));
        }
        for &th in &self.angles {
            let a = steering_tx(th, self.n_tx);
            let coef = a.dotc(&self.user_channel) / C64::new(a.norm_squared(), 0.0);
            let residual = &self.user_channel - a * coef;
            if residual.norm() <= 1e-9 * h_norm {
                return Err(ModelError::ChannelAligned(th));
            }
        }
        Ok(())
    }

    /// Number of candidate locations K.
    pub fn num_locations(&self) -> usize {
        self.angles.len()
    }

    /// One-way BS-target power gain beta0 / r^2.
    pub fn path_gain(&self) -> f64 {
        self.beta0 / (self.range_m * self.range_m)
    }

    /// Effective eavesdropper noise sigma_E^2 r^2 / beta0 after the LoS
    /// channel gain is folded out of the SINR.
    pub fn eve_noise_effective(&self) -> f64 {
        self.noise_eve / self.path_gain()
    }

    /// Worst-case squared reflection gain |beta_bar|^2 = (beta0/r^2)^2 |alpha_bar|^2.
    pub fn beta_bar_sq(&self) -> f64 {
        let g = self.path_gain() * self.rcs_min_gain;
        g * g
    }
}

/// Information beam plus AN beams.
#[derive(Debug, Clone)]
pub struct Beamformer {
    /// Information beamforming vector w.
    pub info_beam: CVector,
    /// AN beamforming vectors v_1..v_J.
    pub an_beams: Vec<CVector>,
}

impl Beamformer {
    pub fn total_power(&self) -> f64 {
        self.info_beam.norm_squared()
            + self.an_beams.iter().map(|v| v.norm_squared()).sum::<f64>()
    }

    /// Checks the power budget with a 1e-9 relative slack.
    pub fn validate(&self, power_budget: f64) -> Result<(), ModelError> {
        let used = self.total_power();
        if used > power_budget * (1.0 + 1e-9) {
            return Err(ModelError::PowerBudget { used, budget: power_budget });
        }
        Ok(())
    }

    /// Covariances W = w w^H and V = sum_j v_j v_j^H.
    pub fn covariance_pair(&self) -> CovariancePair {
        let n = self.info_beam.len();
        let info = &self.info_beam * self.info_beam.adjoint();
        let mut an = CMatrix::zeros(n, n);
        for v in &self.an_beams {
            an += v * v.adjoint();
        }
        CovariancePair { info, an }
    }
}

/// Transmit covariance split into the information part W and the AN part V.
#[derive(Debug, Clone)]
pub struct CovariancePair {
    pub info: CMatrix,
    pub an: CMatrix,
}

impl CovariancePair {
    /// Overall transmit covariance R_x = W + V.
    pub fn total(&self) -> CMatrix {
        &self.info + &self.an
    }

    /// Checks W >= 0 and V >= 0 with a -1e-9 * trace eigenvalue floor.
    pub fn validate(&self) -> Result<(), ModelError> {
        for m in [&self.info, &self.an] {
            let tr = m.trace().re;
            let eig = nalgebra::SymmetricEigen::new(m.clone());
            let min = eig.eigenvalues.min();
            if min < -1e-9 * tr.max(f64::MIN_POSITIVE) {
                return Err(ModelError::NotPsd(min));
            }
        }
        Ok(())
    }
}

fn symmetric_ula(theta: f64, n: usize, derivative: bool) -> CVector {
    let s = theta.sin();
    let c = theta.cos();
    CVector::from_fn(n, |i, _| {
        // 1-based antenna index n => weight (N + 1 - 2n).
        let weight = (n as f64) + 1.0 - 2.0 * ((i + 1) as f64);
        let phase = PI * weight * s / 2.0;
        let e = C64::new(phase.cos(), phase.sin());
        if derivative {
            e * C64::new(0.0, PI * weight * c / 2.0)
        } else {
            e
        }
    })
}

/// Transmit-array steering vector a(theta); `||a||^2 = n_tx` for any angle.
pub fn steering_tx(theta: f64, n_tx: usize) -> CVector {
    symmetric_ula(theta, n_tx, false)
}

/// Receive-array steering vector b(theta); `||b||^2 = n_rx` for any angle.
pub fn steering_rx(theta: f64, n_rx: usize) -> CVector {
    symmetric_ula(theta, n_rx, false)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SteeringKind {
    Tx,
    Rx,
}

/// Analytic elementwise derivative of the steering vector with respect to
/// theta. Entry n of the plain vector is multiplied by
/// `j*pi*(N+1-2n)*cos(theta)/2`; the symmetric index weights make
/// `a(theta)^H a'(theta) = 0`.
pub fn steering_derivative(theta: f64, n: usize, _kind: SteeringKind) -> CVector {
    symmetric_ula(theta, n, true)
}

/// AoD/AoA from the azimuth angle psi and the BS/target heights:
/// `theta = arcsin(sin(psi) * (h_bs - h_target) / range)`.
pub fn angle_from_geometry(
    psi: f64,
    h_bs: f64,
    h_target: f64,
    range_m: f64,
) -> Result<f64, ModelError> {
    if !(range_m > 0.0) {
        return Err(ModelError::NonPositive("range_m", range_m));
    }
    let arg = psi.sin() * (h_bs - h_target) / range_m;
    if !(-1.0..=1.0).contains(&arg) {
        return Err(ModelError::ArcsinDomain(arg));
    }
    Ok(arg.asin())
}

/// LoS BS-eavesdropper channel h_E(theta) = (sqrt(beta0)/r) a(theta).
pub fn eavesdropper_channel(theta: f64, scenario: &Scenario) -> CVector {
    let gain = scenario.beta0.sqrt() / scenario.range_m;
    steering_tx(theta, scenario.n_tx) * C64::new(gain, 0.0)
}

/// Gaussian-mixture relaxation of the location PMF:
/// `sum_k p_k N(theta; theta_k, sigma_theta^2)`.
pub fn mixture_pdf(theta: f64, scenario: &Scenario) -> f64 {
    let sigma = scenario.sigma_theta_sq.sqrt();
    let norm = 1.0 / ((2.0 * PI).sqrt() * sigma);
    scenario
        .angles
        .iter()
        .zip(&scenario.probs)
        .map(|(&th_k, &p_k)| {
            let z = (theta - th_k) / sigma;
            p_k * norm * (-0.5 * z * z).exp()
        })
        .sum()
}

/// Seeded Rayleigh-fading user channel draw, h ~ CN(0, sigma_h^2 I).
///
/// Deterministic for a fixed seed; each entry has total variance
/// `sigma_h_sq` split evenly between real and imaginary parts.
pub fn rayleigh_user_channel(seed: u64, sigma_h_sq: f64, n_tx: usize) -> CVector {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let std = (sigma_h_sq / 2.0).sqrt();
    let mut next_gaussian_pair = move || -> (f64, f64) {
        // Box-Muller on uniform draws from the seeded stream.
        let u1 = loop {
            let u = (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64;
            if u > 0.0 {
                break u;
            }
        };
        let u2 = (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64;
        let r = (-2.0 * u1.ln()).sqrt();
        let phi = 2.0 * PI * u2;
        (r * phi.cos(), r * phi.sin())
    };
    CVector::from_fn(n_tx, |_, _| {
        let (re, im) = next_gaussian_pair();
        C64::new(std * re, std * im)
    })
}
