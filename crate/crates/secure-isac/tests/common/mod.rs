//! Shared helpers for integration tests: the evaluation scenario, random
//! PSD matrices, and an exhaustive parametric grid oracle for two-antenna
//! instances.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha12Rng;
use secure_isac::model::{rayleigh_user_channel, steering_tx, Scenario};
use secure_isac::pcrb::{compute_sensing_matrices, pcrb_exact, xi_threshold, QuadratureConfig, SensingMatrices};
use secure_isac::{C64, CMatrix, CVector};
use std::f64::consts::PI;

/// The N_t = 8, N_r = 10, K = 4 evaluation scenario with a seeded Rayleigh
/// user channel.
pub fn vi_scenario(seed: u64) -> Scenario {
    Scenario::new(
        8,
        10,
        7,
        vec![-1.22, -0.79, -0.44, 0.87],
        vec![0.2, 0.1, 0.4, 0.3],
        1e-4,
        1.0,
        1e-4,
        0.32,
        1e-8,
        1e-8,
        1e-8,
        100.0,
        rayleigh_user_channel(seed, 1e-8, 8),
    )
    .unwrap()
}

pub fn vi_matrices(scenario: &Scenario) -> SensingMatrices {
    compute_sensing_matrices(scenario, &QuadratureConfig::default()).unwrap()
}

#[allow(dead_code)]
pub fn random_psd(n: usize, trace: f64, rng: &mut ChaCha12Rng) -> CMatrix {
    let mut g = CMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            g[(i, j)] = C64::new(
                rng.next_u64() as f64 / u64::MAX as f64 - 0.5,
                rng.next_u64() as f64 / u64::MAX as f64 - 0.5,
            );
        }
    }
    let r = &g * g.adjoint();
    let s = trace / r.trace().re;
    r * C64::new(s, 0.0)
}

/// A two-antenna, single-location instance small enough for exhaustive
/// search.
pub struct TinyInstance {
    pub scenario: Scenario,
    pub matrices: SensingMatrices,
    pub gamma_pcrb: f64,
}

pub fn tiny_instance(seed: u64) -> TinyInstance {
    let mut rng = ChaCha12Rng::seed_from_u64(seed.wrapping_mul(0x9e37_79b9) + 17);
    let theta = (rng.next_u64() as f64 / u64::MAX as f64 - 0.5) * 2.4;
    let scenario = Scenario::new(
        2,
        2,
        1,
        vec![theta],
        vec![1.0],
        1e-4,
        1.0,
        1e-4,
        0.32,
        1e-8,
        1e-8,
        1e-8,
        100.0,
        rayleigh_user_channel(seed + 1000, 1e-8, 2),
    )
    .unwrap();
    let matrices = compute_sensing_matrices(&scenario, &QuadratureConfig::default()).unwrap();
    // Threshold anchored at the isotropic full-power PCRB, so the instance
    // is feasible by construction and the constraint genuinely binds.
    let iso = CMatrix::identity(2, 2) * C64::new(scenario.power_budget / 2.0, 0.0);
    let anchor = pcrb_exact(&iso, &matrices, &scenario);
    let factor = 1.0 + 0.35 * (rng.next_u64() as f64 / u64::MAX as f64);
    TinyInstance { scenario, matrices, gamma_pcrb: anchor * factor }
}

/// Precomputed 2x2 instance data in the orthonormal basis (h/|h|, h-perp).
struct TinyData {
    hn2: f64,
    a1: C64,
    a2: C64,
    m1: [[C64; 2]; 2],
    m2: [[C64; 2]; 2],
    m3: [[C64; 2]; 2],
    sigma_user: f64,
    nu_e: f64,
    p: f64,
    xi: f64,
    prior_info: f64,
    data_scale: f64,
}

impl TinyData {
    fn new(inst: &TinyInstance) -> Self {
        let sc = &inst.scenario;
        let h = &sc.user_channel;
        let e1 = h / C64::new(h.norm(), 0.0);
        let mut e2 = CVector::zeros(2);
        e2[0] = e1[1].conj();
        e2[1] = -e1[0].conj();
        let a = steering_tx(sc.angles[0], 2);
        let basis = |m: &CMatrix| -> [[C64; 2]; 2] {
            let cols = [&e1, &e2];
            let mut out = [[C64::new(0.0, 0.0); 2]; 2];
            for (i, bi) in cols.iter().enumerate() {
                for (j, bj) in cols.iter().enumerate() {
                    out[i][j] = bi.dotc(&(m * *bj));
                }
            }
            out
        };
        let epsilon = inst.matrices.epsilon;
        TinyData {
            hn2: h.norm_squared(),
            a1: e1.dotc(&a),
            a2: e2.dotc(&a),
            m1: basis(&inst.matrices.m1),
            m2: basis(&inst.matrices.m2),
            m3: basis(&inst.matrices.m3),
            sigma_user: sc.noise_user,
            nu_e: sc.eve_noise_effective(),
            p: sc.power_budget,
            xi: xi_threshold(inst.gamma_pcrb, &inst.matrices, sc),
            prior_info: 1.0 / sc.sigma_theta_sq - epsilon,
            data_scale: 2.0 * inst.matrices.beta_bar_sq / sc.noise_radar,
        }
    }

    #[inline]
    fn quad(m: &[[C64; 2]; 2], u: (C64, C64)) -> C64 {
        let (u1, u2) = u;
        m[0][0] * u1.conj() * u1
            + m[0][1] * u1.conj() * u2
            + m[1][0] * u2.conj() * u1
            + m[1][1] * u2.conj() * u2
    }

    /// Worst-case secrecy rate of one parametric candidate, or None when it
    /// violates the PCRB constraint.
    #[inline]
    #[allow(clippy::too_many_arguments)]
    fn evaluate(
        &self,
        aw: f64,
        pw: f64,
        rho_w: f64,
        av: f64,
        pv: f64,
        rho_v: f64,
        eve_cap: Option<f64>,
    ) -> Option<(f64, f64)> {
        if rho_w + rho_v > 1.0 + 1e-12 {
            return None;
        }
        let sw = (self.p * rho_w).sqrt();
        let sv = (self.p * rho_v).sqrt();
        let w = (
            C64::new(sw * aw.cos(), 0.0),
            C64::new(0.0, pw).exp() * sw * aw.sin(),
        );
        let v = (
            C64::new(sv * av.cos(), 0.0),
            C64::new(0.0, pv).exp() * sv * av.sin(),
        );
        // User terms: h aligns with e1.
        let hw2 = self.hn2 * (w.0.norm_sqr());
        let hv2 = self.hn2 * (v.0.norm_sqr());
        // Eavesdropper terms.
        let awc = (self.a1.conj() * w.0 + self.a2.conj() * w.1).norm_sqr();
        let avc = (self.a1.conj() * v.0 + self.a2.conj() * v.1).norm_sqr();
        // PCRB constraint via the information functional.
        if self.xi > 0.0 {
            let q1 = (Self::quad(&self.m1, w) + Self::quad(&self.m1, v)).re;
            let q2 = (Self::quad(&self.m2, w) + Self::quad(&self.m2, v)).re;
            let q3 = Self::quad(&self.m3, w) + Self::quad(&self.m3, v);
            let info = if q1 > 1e-14 { q2 - q3.norm_sqr() / q1 } else { q2 };
            if info < self.xi {
                return None;
            }
        }
        let sinr_u = hw2 / (hv2 + self.sigma_user);
        let sinr_e = awc / (avc + self.nu_e);
        if let Some(cap) = eve_cap {
            if sinr_e > cap * (1.0 + 1e-12) {
                return None;
            }
        }
        let rate = ((1.0 + sinr_u) / (1.0 + sinr_e)).log2().max(0.0);
        Some((rate, sinr_u))
    }

    fn pcrb_of(&self, info: f64) -> f64 {
        1.0 / (self.prior_info + self.data_scale * info)
    }
}

/// Exhaustive coarse-to-fine grid search over beam angles and power splits.
/// `objective_rate = true` maximizes the worst-case secrecy rate (the outer
/// problem); `false` maximizes the user SINR under an eavesdropper-SINR cap
/// (the inner problem at fixed gamma). Final resolution is below 1e-2 in
/// every coordinate.
pub fn tiny_oracle(inst: &TinyInstance, eve_cap: Option<f64>, objective_rate: bool) -> f64 {
    let data = TinyData::new(inst);
    let _ = data.pcrb_of(0.0);
    // Coordinates: (alpha_w, phi_w, rho_w, alpha_v, phi_v, rho_v).
    let lo = [0.0, 0.0, 0.0, 0.0, 0.0, 0.0];
    let hi = [PI / 2.0, 2.0 * PI, 1.0, PI / 2.0, 2.0 * PI, 1.0];
    let coarse_steps = [
        PI / 2.0 / 16.0,
        2.0 * PI / 25.0,
        1.0 / 17.0,
        PI / 2.0 / 16.0,
        2.0 * PI / 25.0,
        1.0 / 17.0,
    ];
    let eval = |x: &[f64; 6]| -> f64 {
        match data.evaluate(x[0], x[1], x[2], x[3], x[4], x[5], eve_cap) {
            Some((rate, sinr)) => {
                if objective_rate {
                    rate
                } else {
                    sinr
                }
            }
            None => f64::NEG_INFINITY,
        }
    };

    let mut best_val = f64::NEG_INFINITY;
    let mut best_x = [0.0; 6];
    let scan = |center: &[f64; 6], steps: &[f64; 6], spans: &[usize; 6],
                best_val: &mut f64,
                best_x: &mut [f64; 6]| {
        let axis = |c: f64, step: f64, span: usize, lo: f64, hi: f64| -> Vec<f64> {
            (0..=2 * span)
                .map(|i| (c + (i as f64 - span as f64) * step).clamp(lo, hi))
                .collect()
        };
        let g0 = axis(center[0], steps[0], spans[0], lo[0], hi[0]);
        let g1 = axis(center[1], steps[1], spans[1], lo[1], hi[1]);
        let g2 = axis(center[2], steps[2], spans[2], lo[2], hi[2]);
        let g3 = axis(center[3], steps[3], spans[3], lo[3], hi[3]);
        let g4 = axis(center[4], steps[4], spans[4], lo[4], hi[4]);
        let g5 = axis(center[5], steps[5], spans[5], lo[5], hi[5]);
        for &x0 in &g0 {
            for &x1 in &g1 {
                for &x2 in &g2 {
                    for &x3 in &g3 {
                        for &x4 in &g4 {
                            for &x5 in &g5 {
                                let x = [x0, x1, x2, x3, x4, x5];
                                let v = eval(&x);
                                if v > *best_val {
                                    *best_val = v;
                                    *best_x = x;
                                }
                            }
                        }
                    }
                }
            }
        }
    };

    // Coarse pass over the full box.
    let center = [PI / 4.0, PI, 0.5, PI / 4.0, PI, 0.5];
    scan(
        &center,
        &coarse_steps,
        &[8, 13, 9, 8, 13, 9],
        &mut best_val,
        &mut best_x,
    );
    // Refinement rounds shrinking each step by 3x around the running best;
    // the +-8-cell window spans 2.7x the previous step so a basin missed by
    // one coarse cell is still recovered.
    let mut steps = coarse_steps;
    for _ in 0..4 {
        steps = steps.map(|s| s / 3.0);
        let c = best_x;
        scan(&c, &steps, &[8, 8, 8, 8, 8, 8], &mut best_val, &mut best_x);
    }
    best_val
}
