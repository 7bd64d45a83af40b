//! Communication and sensing figures of merit for a beamformer: SINRs,
//! per-location and worst-case secrecy rates, and transmit beampatterns.

use crate::model::{mixture_pdf, steering_tx, Beamformer, Scenario};
use std::f64::consts::PI;

/// Floor reported for zero powers so CSV output stays numeric.
pub const DBM_FLOOR: f64 = -300.0;

#[derive(Debug, thiserror::Error)]
pub enum MetricsError {
    #[error("location index {0} out of range (K = {1})")]
    LocationIndex(usize, usize),
    #[error("empty angle grid")]
    EmptyGrid,
}

/// User SINR `|h^H w|^2 / (sum_j |h^H v_j|^2 + sigma^2)`.
pub fn sinr_user(beams: &Beamformer, scenario: &Scenario) -> f64 {
    let h = &scenario.user_channel;
    let signal = h.dotc(&beams.info_beam).norm_sqr();
    let interference: f64 = beams.an_beams.iter().map(|v| h.dotc(v).norm_sqr()).sum();
    signal / (interference + scenario.noise_user)
}

/// Eavesdropper SINR at candidate location `k`:
/// `|a_k^H w|^2 / (sum_j |a_k^H v_j|^2 + sigma_E^2 r^2 / beta0)`.
pub fn sinr_eve(beams: &Beamformer, k: usize, scenario: &Scenario) -> Result<f64, MetricsError> {
    let kk = scenario.num_locations();
    if k >= kk {
        return Err(MetricsError::LocationIndex(k, kk));
    }
    let a = steering_tx(scenario.angles[k], scenario.n_tx);
    let signal = a.dotc(&beams.info_beam).norm_sqr();
    let interference: f64 = beams.an_beams.iter().map(|v| a.dotc(v).norm_sqr()).sum();
    Ok(signal / (interference + scenario.eve_noise_effective()))
}

/// Per-location secrecy rates and their minimum.
#[derive(Debug, Clone)]
pub struct SecrecyRates {
    /// `[log2(1+SINR) - log2(1+SINR_E(theta_k))]^+` per location.
    pub per_location: Vec<f64>,
    /// Worst case over candidate locations.
    pub worst_case: f64,
}

pub fn secrecy_rate(beams: &Beamformer, scenario: &Scenario) -> SecrecyRates {
    let user = (1.0 + sinr_user(beams, scenario)).log2();
    let per_location: Vec<f64> = (0..scenario.num_locations())
        .map(|k| {
            let eve = (1.0 + sinr_eve(beams, k, scenario).expect("index in range")).log2();
            (user - eve).max(0.0)
        })
        .collect();
    let worst_case = per_location.iter().copied().fold(f64::INFINITY, f64::min);
    SecrecyRates { per_location, worst_case }
}

/// One beampattern sample at a probe angle.
#[derive(Debug, Clone, Copy)]
pub struct BeampatternSample {
    pub angle: f64,
    /// Received information-beam power in dBm at the evaluation path loss.
    pub info_power_dbm: f64,
    /// Received AN power in dBm at the evaluation path loss.
    pub an_power_dbm: f64,
    /// Prior mixture density at this angle.
    pub prior_density: f64,
}

fn to_dbm(linear_mw: f64) -> f64 {
    if linear_mw > 0.0 {
        (10.0 * linear_mw.log10()).max(DBM_FLOOR)
    } else {
        DBM_FLOOR
    }
}

/// Received info/AN power over a probe-angle grid, at a stated evaluation
/// path loss (e.g. 80 dB).
pub fn beampattern(
    beams: &Beamformer,
    angle_grid: &[f64],
    eval_path_loss_db: f64,
    scenario: &Scenario,
) -> Result<Vec<BeampatternSample>, MetricsError> {
    if angle_grid.is_empty() {
        return Err(MetricsError::EmptyGrid);
    }
    let loss = 10f64.powf(-eval_path_loss_db / 10.0);
    Ok(angle_grid
        .iter()
        .map(|&angle| {
            let a = steering_tx(angle, scenario.n_tx);
            let info = loss * a.dotc(&beams.info_beam).norm_sqr();
            let an: f64 = loss * beams.an_beams.iter().map(|v| a.dotc(v).norm_sqr()).sum::<f64>();
            BeampatternSample {
                angle,
                info_power_dbm: to_dbm(info),
                an_power_dbm: to_dbm(an),
                prior_density: mixture_pdf(angle, scenario),
            }
        })
        .collect())
}

/// Default probe grid: 2048 uniform angles over [-pi/2, pi/2).
pub fn default_angle_grid() -> Vec<f64> {
    let n = 2048;
    (0..n).map(|i| -PI / 2.0 + PI * i as f64 / n as f64).collect()
}

/// CSV rows for a beampattern: `angle_rad,info_dbm,an_dbm,prior_density`
/// with a header, '.' decimals and LF line endings.
pub fn beampattern_csv(samples: &[BeampatternSample]) -> String {
    let mut out = String::from("angle_rad,info_dbm,an_dbm,prior_density\n");
    for s in samples {
        out.push_str(&format!(
            "{:?},{:?},{:?},{:?}\n",
            s.angle, s.info_power_dbm, s.an_power_dbm, s.prior_density
        ));
    }
    out
}
