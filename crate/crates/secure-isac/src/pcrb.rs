//! Posterior Cramér-Rao bound machinery.
//!
//! The angle prior is a Gaussian mixture with small per-component variance,
//! so every mixture integral here is evaluated with fixed-order
//! Gauss-Legendre rules per component over `theta_k +- half_width * sigma`;
//! the tails beyond eight sigmas carry less than 1e-14 of the mass. Each
//! public computation is repeated with doubled node count and rejected if the
//! two disagree beyond `rel_tol`.
//!
//! Three bounds on the angle-estimation MSE are exposed for a transmit
//! covariance `R`:
//!
//! - [`pcrb_exact`]: `1 / ((1/s2 - eps) + (2|b|^2/sR2) (tr(M2 R) - |tr(M3 R)|^2 / tr(M1 R)))`
//! - [`pcrb_upper`]: drops the (nonnegative) fractional improvement, kernel `Q`
//! - [`pcrb_approx`]: closed-form kernel `Q~` built from the component centers
//!
//! with `M1 = Nr Int p(t) a a^H`, `M2 = Int p(t) ||b'||^2 a a^H + Nr Int p(t) a' a'^H`,
//! `M3 = Nr Int p(t) a' a^H`, and `Q` the first summand of `M2`.

use crate::la::{hermitian_part, min_eigenvalue, trace_product};
use crate::model::{steering_derivative, steering_rx, steering_tx, Scenario, SteeringKind};
use crate::{C64, CMatrix};
use nalgebra::Matrix3;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Debug, thiserror::Error)]
pub enum PcrbError {
    #[error(
        "quadrature did not converge: doubling nodes changed {quantity} by {rel:.3e} (> {tol:.3e})"
    )]
    QuadratureNonconvergence { quantity: &'static str, rel: f64, tol: f64 },
    #[error("sensing matrix {0} is not PSD (min eigenvalue {1:.3e})")]
    NotPsd(&'static str, f64),
    #[error("prior correction epsilon {eps:.3e} outside [0, 1/sigma_theta^2 = {limit:.3e})")]
    EpsilonRange { eps: f64, limit: f64 },
    #[error("tr(M1) = {got:.6e} deviates from Nt*Nr = {expected:.6e}")]
    TraceIdentity { got: f64, expected: f64 },
}

/// Gauss-Legendre configuration for the mixture integrals.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct QuadratureConfig {
    /// Nodes per mixture component.
    pub nodes_per_component: usize,
    /// Integration half width in units of sigma_theta.
    pub half_width_sigmas: f64,
    /// Maximum relative change allowed when the node count doubles.
    pub rel_tol: f64,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig { nodes_per_component: 64, half_width_sigmas: 8.0, rel_tol: 1e-8 }
    }
}

/// Precomputed quadrature products for one scenario.
#[derive(Debug, Clone)]
pub struct SensingMatrices {
    pub m1: CMatrix,
    pub m2: CMatrix,
    pub m3: CMatrix,
    /// Upper-bound kernel: first summand of M2.
    pub q: CMatrix,
    /// Closed-form kernel built from the component centers.
    pub q_tilde: CMatrix,
    /// Prior-FIM correction epsilon.
    pub epsilon: f64,
    /// Receive-array constant of the closed-form kernel: half the cos^2
    /// coefficient of ||b'(theta)||^2, i.e.
    /// `rho_0 = pi^2 sum_{n=1}^{Nr} (Nr+1-2n)^2 / 8` for the symmetric ULA,
    /// so that `Q~ ~= Q` and the closed-form bound stays tight.
    pub rho0: f64,
    /// |beta_bar|^2 = (beta0/r^2)^2 |alpha_bar|^2.
    pub beta_bar_sq: f64,
}

impl SensingMatrices {
    fn validate(&self, scenario: &Scenario) -> Result<(), PcrbError> {
        for (name, m) in [("M1", &self.m1), ("M2", &self.m2), ("Q", &self.q), ("Q~", &self.q_tilde)]
        {
            let min = min_eigenvalue(m);
            if min < -1e-9 * m.trace().re {
                return Err(PcrbError::NotPsd(name, min));
            }
        }
        let limit = 1.0 / scenario.sigma_theta_sq;
        if !(0.0..limit).contains(&self.epsilon) {
            return Err(PcrbError::EpsilonRange { eps: self.epsilon, limit });
        }
        let expected = (scenario.n_tx * scenario.n_rx) as f64;
        let got = self.m1.trace().re;
        if (got - expected).abs() > 1e-6 * expected {
            return Err(PcrbError::TraceIdentity { got, expected });
        }
        Ok(())
    }
}

/// Gauss-Legendre nodes and weights on [-1, 1], by Newton iteration on the
/// Legendre recurrence.
fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let mut p0 = 1.0;
            let mut p1 = x;
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// Flattened quadrature nodes for `Int pbar(theta) g(theta) dtheta`:
/// each `(theta_i, w_i)` already carries `p_k * N(theta_i; theta_k, s2)`.
fn mixture_nodes(scenario: &Scenario, quad: &QuadratureConfig, scale: usize) -> Vec<(f64, f64)> {
    let sigma = scenario.sigma_theta_sq.sqrt();
    let hw = quad.half_width_sigmas * sigma;
    let n = quad.nodes_per_component * scale;
    let (xs, ws) = gauss_legendre(n);
    let norm = 1.0 / ((2.0 * PI).sqrt() * sigma);
    let mut out = Vec::with_capacity(n * scenario.num_locations());
    for (&theta_k, &p_k) in scenario.angles.iter().zip(&scenario.probs) {
        if p_k == 0.0 {
            continue;
        }
        for (&x, &w) in xs.iter().zip(&ws) {
            let theta = theta_k + hw * x;
            let z = (theta - theta_k) / sigma;
            let density = p_k * norm * (-0.5 * z * z).exp();
            out.push((theta, w * hw * density));
        }
    }
    out
}

fn raw_matrices(scenario: &Scenario, quad: &QuadratureConfig, scale: usize) -> [CMatrix; 4] {
    let nt = scenario.n_tx;
    let nr = scenario.n_rx as f64;
    let mut m1 = CMatrix::zeros(nt, nt);
    let mut m2d = CMatrix::zeros(nt, nt);
    let mut m3 = CMatrix::zeros(nt, nt);
    let mut q = CMatrix::zeros(nt, nt);
    for (theta, w) in mixture_nodes(scenario, quad, scale) {
        let a = steering_tx(theta, nt);
        let da = steering_derivative(theta, nt, SteeringKind::Tx);
        let db_sq = steering_derivative(theta, scenario.n_rx, SteeringKind::Rx).norm_squared();
        let aa = &a * a.adjoint();
        m1 += &aa * C64::new(w * nr, 0.0);
        q += &aa * C64::new(w * db_sq, 0.0);
        m2d += &da * da.adjoint() * C64::new(w * nr, 0.0);
        m3 += &da * a.adjoint() * C64::new(w * nr, 0.0);
    }
    let m1 = hermitian_part(&m1);
    let q = hermitian_part(&q);
    let m2 = &q + hermitian_part(&m2d);
    [m1, m2, m3, q]
}

fn rel_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    (a - b).norm() / b.norm().max(f64::MIN_POSITIVE)
}

/// Computes M1, M2, M3, Q, Q~, epsilon, rho_0 for a scenario.
pub fn compute_sensing_matrices(
    scenario: &Scenario,
    quad: &QuadratureConfig,
) -> Result<SensingMatrices, PcrbError> {
    let coarse = raw_matrices(scenario, quad, 1);
    let fine = raw_matrices(scenario, quad, 2);
    for (name, c, f) in [
        ("M1", &coarse[0], &fine[0]),
        ("M2", &coarse[1], &fine[1]),
        ("M3", &coarse[2], &fine[2]),
        ("Q", &coarse[3], &fine[3]),
    ] {
        let rel = rel_diff(c, f);
        if rel > quad.rel_tol {
            return Err(PcrbError::QuadratureNonconvergence {
                quantity: name,
                rel,
                tol: quad.rel_tol,
            });
        }
    }
    let [m1, m2, m3, q] = fine;

    let nt = scenario.n_tx;
    let rho0: f64 = (1..=scenario.n_rx)
        .map(|n| {
            let w = (scenario.n_rx as f64) + 1.0 - 2.0 * n as f64;
            PI * PI * w * w / 8.0
        })
        .sum();
    let mut q_tilde = CMatrix::zeros(nt, nt);
    for (&theta_k, &p_k) in scenario.angles.iter().zip(&scenario.probs) {
        let a = steering_tx(theta_k, nt);
        let gain = rho0 * p_k * ((2.0 * theta_k).cos() + 1.0);
        q_tilde += &a * a.adjoint() * C64::new(gain, 0.0);
    }
    let q_tilde = hermitian_part(&q_tilde);

    let epsilon = compute_epsilon(scenario, quad)?;
    let matrices = SensingMatrices {
        m1,
        m2,
        m3,
        q,
        q_tilde,
        epsilon,
        rho0,
        beta_bar_sq: scenario.beta_bar_sq(),
    };
    matrices.validate(scenario)?;
    Ok(matrices)
}

fn epsilon_at(scenario: &Scenario, quad: &QuadratureConfig, scale: usize) -> f64 {
    let k = scenario.num_locations();
    if k == 1 {
        return 0.0;
    }
    let sigma = scenario.sigma_theta_sq.sqrt();
    let s2 = scenario.sigma_theta_sq;
    let hw = quad.half_width_sigmas * sigma;
    // Union of the per-component intervals, merged where they overlap.
    let mut intervals: Vec<(f64, f64, usize)> = scenario
        .angles
        .iter()
        .zip(&scenario.probs)
        .filter(|(_, &p)| p > 0.0)
        .map(|(&t, _)| (t - hw, t + hw, 1))
        .collect();
    intervals.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut merged: Vec<(f64, f64, usize)> = Vec::new();
    for iv in intervals {
        match merged.last_mut() {
            Some(last) if iv.0 <= last.1 => {
                last.1 = last.1.max(iv.1);
                last.2 += 1;
            }
            _ => merged.push(iv),
        }
    }
    let norm = 1.0 / ((2.0 * PI).sqrt() * sigma);
    let f_k = |theta: f64| -> Vec<f64> {
        scenario
            .angles
            .iter()
            .zip(&scenario.probs)
            .map(|(&t, &p)| {
                let z = (theta - t) / sigma;
                p * norm * (-0.5 * z * z).exp()
            })
            .collect()
    };
    let mut eps = 0.0;
    for (lo, hi, mult) in merged {
        let n = quad.nodes_per_component * mult * scale;
        let (xs, ws) = gauss_legendre(n);
        let mid = 0.5 * (lo + hi);
        let half = 0.5 * (hi - lo);
        for (&x, &w) in xs.iter().zip(&ws) {
            let theta = mid + half * x;
            let f = f_k(theta);
            let fsum: f64 = f.iter().sum();
            if fsum < 1e-300 {
                continue;
            }
            let mut cross = 0.0;
            for i in 0..k {
                for j in 0..k {
                    let d = scenario.angles[j] - scenario.angles[i];
                    cross += f[i] * f[j] * d * d / s2;
                }
            }
            eps += w * half * cross / (2.0 * fsum);
        }
    }
    eps
}

/// Prior-FIM correction from overlap between mixture components; zero for a
/// single component and doubly-exponentially small for well-separated ones.
pub fn compute_epsilon(scenario: &Scenario, quad: &QuadratureConfig) -> Result<f64, PcrbError> {
    let coarse = epsilon_at(scenario, quad, 1);
    let fine = epsilon_at(scenario, quad, 2);
    let scale = 1.0 / scenario.sigma_theta_sq;
    if (fine - coarse).abs() > quad.rel_tol * scale {
        return Err(PcrbError::QuadratureNonconvergence {
            quantity: "epsilon",
            rel: (fine - coarse).abs() / scale,
            tol: quad.rel_tol,
        });
    }
    Ok(fine)
}

fn fim_at(
    covariance: &CMatrix,
    beta: C64,
    scenario: &Scenario,
    quad: &QuadratureConfig,
    scale: usize,
) -> Matrix3<f64> {
    // Direct route through M(theta) = b a^H and its derivative, kept
    // independent of the M1/M2/M3 simplifications so the Schur identity can
    // be cross-checked against them.
    let nt = scenario.n_tx;
    let nr = scenario.n_rx;
    let sr2 = scenario.noise_radar;
    let mut f_tt = 0.0;
    let mut f_tb = [0.0; 2];
    let mut f_bb = 0.0;
    for (theta, w) in mixture_nodes(scenario, quad, scale) {
        let a = steering_tx(theta, nt);
        let da = steering_derivative(theta, nt, SteeringKind::Tx);
        let b = steering_rx(theta, nr);
        let db = steering_derivative(theta, nr, SteeringKind::Rx);
        let c_bb = b.dotc(&b);
        let c_dd = db.dotc(&db);
        let c_db = db.dotc(&b); // b^H db? careful below
        let c_bd = b.dotc(&db);
        // nalgebra dotc: x.dotc(y) = x^H y. So c_db = db^H b, c_bd = b^H db.
        let q_aa = a.dotc(&(covariance * &a));
        let q_ad = a.dotc(&(covariance * &da));
        let q_da = da.dotc(&(covariance * &a));
        let q_dd = da.dotc(&(covariance * &da));
        // tr(M^H M R) = (b^H b) a^H R a
        let g_mm = c_bb * q_aa;
        // tr(Mdot^H M R) = (db^H b) a^H R a + (b^H b) a^H R da
        let g_dm = c_db * q_aa + c_bb * q_ad;
        // tr(Mdot^H Mdot R) = (db^H db) a^H R a + (db^H b) da^H R a
        //                   + (b^H db) a^H R da + (b^H b) da^H R da
        let g_dd = c_dd * q_aa + c_db * q_da + c_bd * q_ad + c_bb * q_dd;
        f_tt += w * g_dd.re;
        let cross = beta.conj() * g_dm;
        f_tb[0] += w * cross.re;
        f_tb[1] += w * -cross.im;
        f_bb += w * g_mm.re;
    }
    let b2 = beta.norm_sqr();
    let mut f = Matrix3::zeros();
    f[(0, 0)] = 2.0 * b2 / sr2 * f_tt;
    f[(0, 1)] = 2.0 / sr2 * f_tb[0];
    f[(0, 2)] = 2.0 / sr2 * f_tb[1];
    f[(1, 0)] = f[(0, 1)];
    f[(2, 0)] = f[(0, 2)];
    f[(1, 1)] = 2.0 / sr2 * f_bb;
    f[(2, 2)] = f[(1, 1)];
    f
}

/// Full 3x3 posterior FIM for (theta, Re beta, Im beta): data part from
/// quadrature over the prior plus the prior part `1/s2 - eps` in the (1,1)
/// entry.
pub fn fim_blocks(
    covariance: &CMatrix,
    beta: C64,
    scenario: &Scenario,
    quad: &QuadratureConfig,
) -> Result<Matrix3<f64>, PcrbError> {
    let coarse = fim_at(covariance, beta, scenario, quad, 1);
    let fine = fim_at(covariance, beta, scenario, quad, 2);
    let rel = (fine - coarse).norm() / fine.norm().max(f64::MIN_POSITIVE);
    if rel > quad.rel_tol {
        return Err(PcrbError::QuadratureNonconvergence { quantity: "FIM", rel, tol: quad.rel_tol });
    }
    let eps = compute_epsilon(scenario, quad)?;
    let mut f = fine;
    f[(0, 0)] += 1.0 / scenario.sigma_theta_sq - eps;
    Ok(f)
}

/// Information functional tr(M2 R) - |tr(M3 R)|^2 / tr(M1 R); the fraction is
/// zero in the degenerate limit tr(M1 R) -> 0.
pub(crate) fn sensing_information(covariance: &CMatrix, m: &SensingMatrices) -> f64 {
    let t1 = trace_product(&m.m1, covariance).re;
    let t2 = trace_product(&m.m2, covariance).re;
    let t3 = trace_product(&m.m3, covariance);
    let tr_r = covariance.trace().re;
    let floor = 1e-15 * m.m1.trace().re * tr_r.abs();
    if t1 <= floor {
        t2
    } else {
        t2 - t3.norm_sqr() / t1
    }
}

fn prior_information(m: &SensingMatrices, scenario: &Scenario) -> f64 {
    1.0 / scenario.sigma_theta_sq - m.epsilon
}

fn data_scale(m: &SensingMatrices, scenario: &Scenario) -> f64 {
    2.0 * m.beta_bar_sq / scenario.noise_radar
}

/// Exact PCRB on the angle-estimation MSE for a transmit covariance.
pub fn pcrb_exact(covariance: &CMatrix, m: &SensingMatrices, scenario: &Scenario) -> f64 {
    1.0 / (prior_information(m, scenario) + data_scale(m, scenario) * sensing_information(covariance, m))
}

/// PCRB upper bound with kernel Q (drops the nonnegative fractional term).
pub fn pcrb_upper(covariance: &CMatrix, m: &SensingMatrices, scenario: &Scenario) -> f64 {
    let info = trace_product(&m.q, covariance).re;
    1.0 / (prior_information(m, scenario) + data_scale(m, scenario) * info)
}

/// Closed-form PCRB approximation with kernel Q~ (no epsilon term).
pub fn pcrb_approx(covariance: &CMatrix, m: &SensingMatrices, scenario: &Scenario) -> f64 {
    let info = trace_product(&m.q_tilde, covariance).re;
    1.0 / (data_scale(m, scenario) * info + 1.0 / scenario.sigma_theta_sq)
}

/// Scalar threshold used by every PCRB constraint:
/// `xi = (sR2 / 2|b|^2)(1/Gamma - 1/s2 + eps)`. Negative xi means the prior
/// alone meets the target and the constraint is vacuous.
pub fn xi_threshold(gamma_pcrb: f64, m: &SensingMatrices, scenario: &Scenario) -> f64 {
    (1.0 / gamma_pcrb - 1.0 / scenario.sigma_theta_sq + m.epsilon) / data_scale(m, scenario)
}
