//! Beamforming designs: feasibility check, the two-stage optimal method, and
//! the two null-space suboptimal methods.
//!
//! The optimal method fixes an eavesdropper-SINR threshold `gamma`, solves
//! the inner covariance problem exactly as a convex SDP (Charnes-Cooper
//! lifting of the fractional objective, Schur-complement form of the PCRB
//! constraint, SDR of the rank constraint on W), then searches `gamma` over
//! a log grid with golden-section refinement. The SDR is tight: a rank-one
//! information covariance achieving the same objective is recovered in
//! closed form, `W~ = W h h^H W / (h^H W h)`, with the stripped component
//! moved into the AN covariance. Beams come from eigen-decompositions of the
//! reduced covariances.
//!
//! Suboptimal method I confines the information beam to the null space of
//! all candidate eavesdropper steering vectors and the AN to the null space
//! of the user channel; method II aligns the information beam with the user
//! channel, reuses method I's AN directions, and line-searches the power
//! split.
//!
//! Internally all SDPs are nondimensionalized (powers in units of the
//! budget, the Charnes-Cooper scalar in units of 1/noise) so the solver sees
//! O(1)-O(1e3) data instead of the raw milliwatt/channel scales.

use crate::la::hermitian_part;
use crate::metrics;
use crate::model::{steering_tx, Beamformer, CovariancePair, Scenario};
use crate::pcrb::{pcrb_exact, sensing_information, xi_threshold, SensingMatrices};
use crate::sdp::{self, Relation, Residuals, SdpProblem, SdpStatus};
use crate::{C64, CMatrix, CVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error)]
pub enum OptimizerError {
    #[error("problem is infeasible for the requested PCRB threshold")]
    Infeasible,
    #[error("candidate steering vectors span the whole transmit space; no information null space")]
    EmptyNullSpace,
    #[error("AN covariance has {significant} significant eigen-directions but only {max_beams} beams")]
    AnRankOverflow { significant: usize, max_beams: usize },
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
    #[error("solver failed with status {0}")]
    Solver(SdpStatus),
    #[error("no usable point on the gamma grid")]
    EmptyGammaCurve,
    #[error(transparent)]
    Sdp(#[from] sdp::SdpError),
    #[error("postcondition violated: {0}")]
    Postcondition(String),
}

/// One-dimensional search configuration for the eavesdropper-SINR threshold.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct GammaSearchConfig {
    /// Log-spaced grid points for the coarse stage.
    pub grid_points: usize,
    /// Lower end of the grid; the upper end is the no-AN eavesdropper SINR
    /// cap `P max_k ||a(theta_k)||^2 beta0 / (r^2 sigma_E^2)`.
    pub gamma_min: f64,
    /// Golden-section iterations around the grid argmax.
    pub golden_iters: usize,
    /// SDP solver tolerance for the inner problems.
    pub solver_tol: f64,
}

impl Default for GammaSearchConfig {
    fn default() -> Self {
        // gamma_min sits far below any plausible optimum: the objective
        // pays log2(1 + gamma_min) bits against the zero-leakage designs,
        // so 1e-8 keeps that bias under 1.5e-8 bits.
        GammaSearchConfig { grid_points: 72, gamma_min: 1e-8, golden_iters: 36, solver_tol: 1e-9 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Method {
    Optimal,
    SuboptimalNullSpace,
    SuboptimalAligned,
    UpperBound,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Method::Optimal => "optimal",
            Method::SuboptimalNullSpace => "sub1",
            Method::SuboptimalAligned => "sub2",
            Method::UpperBound => "upper_bound",
        };
        f.write_str(s)
    }
}

/// One evaluated point of the gamma search.
#[derive(Debug, Clone, Copy)]
pub struct GammaCurvePoint {
    pub gamma: f64,
    /// Optimal user SINR of the inner problem at this gamma.
    pub f_gamma: f64,
    /// `log2((1 + f(gamma)) / (1 + gamma))`.
    pub objective_bits: f64,
    pub status: SdpStatus,
}

#[derive(Debug, Clone, Default)]
pub struct Diagnostics {
    /// Coarse-grid gamma curve (optimal/upper-bound methods only).
    pub gamma_curve: Vec<GammaCurvePoint>,
    /// Solver residuals of the defining SDP solve.
    pub residuals: Residuals,
    /// Objective value promised by the search stage, in bits.
    pub objective_bits: f64,
}

#[derive(Debug, Clone)]
pub struct OptimizationResult {
    pub beams: Beamformer,
    pub covariances: CovariancePair,
    /// Worst-case secrecy rate recomputed from the actual beams (bits/s/Hz).
    pub worst_secrecy_rate: f64,
    /// Exact PCRB achieved by the transmit covariance.
    pub achieved_pcrb: f64,
    pub method: Method,
    /// Optimal SINR threshold (optimal/upper-bound methods).
    pub gamma_star: Option<f64>,
    pub diagnostics: Diagnostics,
}

/// Verdict of the covariance-level feasibility problem.
#[derive(Debug, Clone)]
pub enum FeasibilityP1 {
    /// A transmit covariance meeting power and PCRB constraints.
    Feasible(CMatrix),
    Infeasible,
}

// 2x2 selector matrices for the Schur LMI link equalities.
fn e11() -> CMatrix {
    CMatrix::from_fn(2, 2, |i, j| if i == 0 && j == 0 { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) })
}
fn e22() -> CMatrix {
    CMatrix::from_fn(2, 2, |i, j| if i == 1 && j == 1 { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) })
}
/// tr(e12_re() Y) = Re Y12 for Hermitian Y.
fn e12_re() -> CMatrix {
    CMatrix::from_fn(2, 2, |i, j| if i != j { C64::new(0.5, 0.0) } else { C64::new(0.0, 0.0) })
}
/// tr(e12_im() Y) = Im Y12 for Hermitian Y.
fn e12_im() -> CMatrix {
    CMatrix::from_fn(
        2,
        2,
        |i, j| {
            if i == 0 && j == 1 {
                C64::new(0.0, 0.5)
            } else if i == 1 && j == 0 {
                C64::new(0.0, -0.5)
            } else {
                C64::new(0.0, 0.0)
            }
        },
    )
}

/// Hermitian/skew split of M3: `tr(M3 R) = tr(m3_re R) + i tr(m3_im R)` for
/// Hermitian R, with both parts Hermitian.
fn m3_split(m3: &CMatrix) -> (CMatrix, CMatrix) {
    let re = hermitian_part(m3);
    let im = (m3 - m3.adjoint()) * C64::new(0.0, -0.5);
    (re, im)
}

struct LmiScale {
    lambda: f64,
    m1: CMatrix,
    m2: CMatrix,
    m3_re: CMatrix,
    m3_im: CMatrix,
}

fn lmi_scale(matrices: &SensingMatrices, xi_over_p: f64) -> LmiScale {
    let lambda = matrices
        .m1
        .norm()
        .max(matrices.m2.norm())
        .max(matrices.m3.norm())
        .max(xi_over_p.abs())
        .max(1e-300);
    let (m3_re, m3_im) = m3_split(&matrices.m3);
    let s = C64::new(1.0 / lambda, 0.0);
    LmiScale {
        lambda,
        m1: &matrices.m1 * s,
        m2: &matrices.m2 * s,
        m3_re: m3_re * s,
        m3_im: m3_im * s,
    }
}

/// Feasibility of the covariance-level problem: does any `R >= 0` with
/// `tr(R) <= P` satisfy the PCRB constraint at `gamma_pcrb`?
pub fn check_feasibility_p1(
    scenario: &Scenario,
    matrices: &SensingMatrices,
    gamma_pcrb: f64,
) -> Result<FeasibilityP1, OptimizerError> {
    let xi = xi_threshold(gamma_pcrb, matrices, scenario);
    let n = scenario.n_tx;
    if xi <= 0.0 {
        // The prior alone meets the threshold: constraint vacuous, R = 0 works.
        return Ok(FeasibilityP1::Feasible(CMatrix::zeros(n, n)));
    }
    let p = scenario.power_budget;
    let xi_p = xi / p;
    let lm = lmi_scale(matrices, xi_p);
    // Blocks: 0 = R/P, 1 = 2x2 LMI.
    let mut problem = SdpProblem::new(vec![n, 2]);
    problem.add_constraint(vec![(0, CMatrix::identity(n, n))], Relation::Le, 1.0);
    // Y11 has the constant -xi/P on the covariance side: move it to the rhs.
    let rows: [(CMatrix, &CMatrix, f64); 4] = [
        (e11(), &lm.m2, -xi_p / lm.lambda),
        (e12_re(), &lm.m3_re, 0.0),
        (e12_im(), &lm.m3_im, 0.0),
        (e22(), &lm.m1, 0.0),
    ];
    for (e, m, rhs) in rows {
        problem.add_constraint(
            vec![(1, e), (0, m * C64::new(-1.0, 0.0))],
            Relation::Eq,
            rhs,
        );
    }
    match sdp::check_feasible(&problem)? {
        sdp::Feasibility::Feasible(blocks) => {
            let r = hermitian_part(&(&blocks[0] * C64::new(p, 0.0)));
            Ok(FeasibilityP1::Feasible(r))
        }
        sdp::Feasibility::Infeasible { .. } => Ok(FeasibilityP1::Infeasible),
    }
}

/// Solution of the inner problem at one gamma, in Charnes-Cooper variables.
#[derive(Debug, Clone)]
pub struct InnerSolution {
    /// Lifted information covariance W* (satisfies tr(H V*) + t* sigma^2 = 1).
    pub w: CMatrix,
    /// Lifted AN covariance V*.
    pub v: CMatrix,
    /// Charnes-Cooper scalar t*.
    pub t: f64,
    /// Optimal value f(gamma) = tr(H W*), the achieved user SINR.
    pub f_gamma: f64,
    pub residuals: Residuals,
}

impl InnerSolution {
    /// De-normalized covariances (W*/t*, V*/t*).
    pub fn covariances(&self) -> CovariancePair {
        let s = C64::new(1.0 / self.t, 0.0);
        CovariancePair { info: &self.w * s, an: &self.v * s }
    }
}

/// Solves the lifted inner SDP at a fixed eavesdropper-SINR threshold.
/// `gamma_pcrb = None` drops the PCRB constraint (upper-bound path); a
/// nonpositive threshold margin (`xi <= 0`) drops it as vacuous.
pub fn solve_inner(
    gamma: f64,
    scenario: &Scenario,
    matrices: &SensingMatrices,
    gamma_pcrb: Option<f64>,
    tol: f64,
) -> Result<InnerSolution, OptimizerError> {
    let n = scenario.n_tx;
    let p = scenario.power_budget;
    let sig2 = scenario.noise_user;
    let nu_e = scenario.eve_noise_effective();
    let h = &scenario.user_channel;
    let h_norm_sq = h.norm_squared();
    let h_bar = h / C64::new(h_norm_sq.sqrt(), 0.0);
    let h_bar_outer = hermitian_part(&(&h_bar * h_bar.adjoint()));
    let kappa = p * h_norm_sq / sig2;

    let xi = gamma_pcrb.map(|g| xi_threshold(g, matrices, scenario)).filter(|&x| x > 0.0);

    // Change of variables W^ = T W~ T^H with T = [N | tau R], where R spans
    // the candidate steering vectors, N their orthogonal complement, and
    // tau^2 = min(gamma, 1). Dividing each leakage row by tau^2 then keeps
    // every coefficient O(1) as gamma -> 0, where the raw rows force
    // quadratic forms to a 1e-8-scale fraction of the other entries and
    // stall the interior point.
    let tau_sq = gamma.min(1.0);
    let tau = tau_sq.sqrt();
    let mut row_space: Vec<CVector> = Vec::new();
    for &theta in &scenario.angles {
        let mut r = steering_tx(theta, n);
        for b in &row_space {
            let c = b.dotc(&r);
            r -= b * c;
        }
        let norm = r.norm();
        if norm > 1e-8 * (n as f64).sqrt() {
            row_space.push(r / C64::new(norm, 0.0));
        }
    }
    let null_space = complete_orthonormal(&row_space, n);
    let mut t_mat = CMatrix::zeros(n, n);
    for (c, q) in null_space.iter().enumerate() {
        t_mat.set_column(c, q);
    }
    for (c, q) in row_space.iter().enumerate() {
        t_mat.set_column(null_space.len() + c, &(q * C64::new(tau, 0.0)));
    }
    let tilt = |m: &CMatrix| -> CMatrix { hermitian_part(&(t_mat.adjoint() * m * &t_mat)) };

    // Blocks: 0 = W~, 1 = V^, 2 = t^, 3 = LMI (when active), with
    // W = (P/sig2) T W~ T^H, V = (P/sig2) V^, t = t^/sig2.
    let mut dims = vec![n, n, 1];
    if xi.is_some() {
        dims.push(2);
    }
    let mut problem = SdpProblem::new(dims);
    problem.set_objective(0, tilt(&h_bar_outer));

    // Eavesdropper SINR caps, divided by tau^2:
    // tr(T^H A_k T W~)/tau^2 - (g/tau^2) tr(A_k V^) - (g nu_e / P tau^2) t^ <= 0.
    let g_row = gamma / tau_sq;
    for &theta in &scenario.angles {
        let a = steering_tx(theta, n);
        let outer = hermitian_part(&(&a * a.adjoint()));
        problem.add_constraint(
            vec![
                (0, tilt(&outer) * C64::new(1.0 / tau_sq, 0.0)),
                (1, &outer * C64::new(-g_row, 0.0)),
                (2, CMatrix::from_element(1, 1, C64::new(-g_row * nu_e / p, 0.0))),
            ],
            Relation::Le,
            0.0,
        );
    }
    // Charnes-Cooper normalization: kappa tr(H^ V^) + t^ = 1.
    problem.add_constraint(
        vec![(1, &h_bar_outer * C64::new(kappa, 0.0)), (2, CMatrix::identity(1, 1))],
        Relation::Eq,
        1.0,
    );
    // Power: tr(T^H T W~) + tr(V^) <= t^.
    problem.add_constraint(
        vec![
            (0, hermitian_part(&(t_mat.adjoint() * &t_mat))),
            (1, CMatrix::identity(n, n)),
            (2, CMatrix::from_element(1, 1, C64::new(-1.0, 0.0))),
        ],
        Relation::Le,
        0.0,
    );
    // t > 0 modeled as t >= 1e-10, i.e. t^ >= 1e-10 sigma^2.
    problem.add_constraint(vec![(2, CMatrix::identity(1, 1))], Relation::Ge, 1e-10 * sig2);
    if let Some(xi) = xi {
        let xi_p = xi / p;
        let lm = lmi_scale(matrices, xi_p);
        let rows: [(CMatrix, &CMatrix); 4] =
            [(e11(), &lm.m2), (e12_re(), &lm.m3_re), (e12_im(), &lm.m3_im), (e22(), &lm.m1)];
        for (idx, (e, m)) in rows.into_iter().enumerate() {
            let mut terms: Vec<(usize, CMatrix)> = vec![
                (3, e),
                (0, tilt(m) * C64::new(-1.0, 0.0)),
                (1, m * C64::new(-1.0, 0.0)),
            ];
            if idx == 0 {
                terms.push((2, CMatrix::from_element(1, 1, C64::new(xi_p / lm.lambda, 0.0))));
            }
            problem.add_constraint(terms, Relation::Eq, 0.0);
        }
    }

    let sol = sdp::solve(&problem, tol)?;
    match sol.status {
        SdpStatus::Optimal => {}
        SdpStatus::Infeasible => return Err(OptimizerError::Infeasible),
        other => return Err(OptimizerError::Solver(other)),
    }
    let unit = C64::new(p / sig2, 0.0);
    let w = hermitian_part(&(&t_mat * &sol.blocks[0] * t_mat.adjoint() * unit));
    let v = hermitian_part(&(&sol.blocks[1] * unit));
    let t = sol.blocks[2][(0, 0)].re / sig2;
    let f_gamma = kappa * sol.objective;
    Ok(InnerSolution { w, v, t, f_gamma, residuals: sol.residuals })
}

/// Closed-form rank-one reduction of Proposition-2 type:
/// `W~ = W h h^H W / (h^H W h)`, `V~ = V + (W - W~)`. Preserves the
/// objective, the power, and every inner constraint.
pub fn rank_one_reduce(
    w: &CMatrix,
    v: &CMatrix,
    h: &CVector,
) -> Result<(CMatrix, CMatrix), OptimizerError> {
    let wh = w * h;
    let quad = h.dotc(&wh).re;
    if quad <= 1e-12 * w.trace().re * h.norm_squared() {
        return Err(OptimizerError::DegenerateInput(format!(
            "h^H W h = {quad:.3e} is numerically zero"
        )));
    }
    let w_tilde = hermitian_part(&(&wh * wh.adjoint() * C64::new(1.0 / quad, 0.0)));
    let v_tilde = hermitian_part(&(v + w - &w_tilde));
    Ok((w_tilde, v_tilde))
}

fn sorted_eigs(m: &CMatrix) -> Vec<(f64, CVector)> {
    let eig = nalgebra::SymmetricEigen::new(m.clone());
    let mut pairs: Vec<(f64, CVector)> = eig
        .eigenvalues
        .iter()
        .enumerate()
        .map(|(i, &l)| (l, eig.eigenvectors.column(i).clone_owned()))
        .collect();
    pairs.sort_by(|a, b| b.0.total_cmp(&a.0));
    pairs
}

/// Recovers beams from a rank-one information covariance and an AN
/// covariance via eigen-decompositions. Fails if the AN covariance has more
/// than `j` significant eigen-directions; significance means above
/// `1e-7 * lambda_max` after eigenvalues at the solver-noise floor
/// (1e-9 of the total covariance trace) are treated as zero.
pub fn extract_beams(
    w_tilde: &CMatrix,
    v_tilde: &CMatrix,
    j: usize,
) -> Result<Beamformer, OptimizerError> {
    let n = w_tilde.nrows();
    let w_eigs = sorted_eigs(w_tilde);
    let lead = w_eigs[0].0;
    if lead < 0.0 {
        return Err(OptimizerError::DegenerateInput("information covariance negative".into()));
    }
    if n > 1 && w_eigs[1].0 > 1e-7 * lead.max(f64::MIN_POSITIVE) {
        return Err(OptimizerError::DegenerateInput(format!(
            "information covariance is not rank one (lambda2/lambda1 = {:.3e})",
            w_eigs[1].0 / lead
        )));
    }
    let info_beam = &w_eigs[0].1 * C64::new(lead.max(0.0).sqrt(), 0.0);

    let noise_floor = 1e-9 * (w_tilde.trace().re + v_tilde.trace().re).max(f64::MIN_POSITIVE);
    let v_eigs = sorted_eigs(v_tilde);
    let v_max = v_eigs[0].0;
    let significant = if v_max <= noise_floor {
        0
    } else {
        v_eigs.iter().filter(|(l, _)| *l > (1e-7 * v_max).max(noise_floor)).count()
    };
    if significant > j {
        return Err(OptimizerError::AnRankOverflow { significant, max_beams: j });
    }
    let mut an_beams = Vec::with_capacity(j);
    for k in 0..j {
        if k < significant {
            let (l, vec) = &v_eigs[k];
            an_beams.push(vec * C64::new(l.max(0.0).sqrt(), 0.0));
        } else {
            an_beams.push(CVector::zeros(n));
        }
    }
    Ok(Beamformer { info_beam, an_beams })
}

fn golden_max(mut f: impl FnMut(f64) -> f64, mut lo: f64, mut hi: f64, iters: usize) -> f64 {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..iters {
        if f1 >= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        }
    }
    if f1 >= f2 {
        x1
    } else {
        x2
    }
}

fn secrecy_objective_bits(f_gamma: f64, gamma: f64) -> f64 {
    ((1.0 + f_gamma) / (1.0 + gamma)).log2()
}

fn two_stage(
    scenario: &Scenario,
    matrices: &SensingMatrices,
    gamma_pcrb: Option<f64>,
    search: &GammaSearchConfig,
    method: Method,
) -> Result<OptimizationResult, OptimizerError> {
    if let Some(g) = gamma_pcrb {
        if matches!(check_feasibility_p1(scenario, matrices, g)?, FeasibilityP1::Infeasible) {
            return Err(OptimizerError::Infeasible);
        }
    }
    let gamma_max =
        scenario.power_budget * scenario.n_tx as f64 * scenario.path_gain() / scenario.noise_eve;
    let lo = search.gamma_min.min(gamma_max / 2.0);
    let n_grid = search.grid_points.max(2);
    let grid: Vec<f64> = (0..n_grid)
        .map(|i| {
            let t = i as f64 / (n_grid - 1) as f64;
            (lo.ln() + t * (gamma_max.ln() - lo.ln())).exp()
        })
        .collect();

    let evals: Vec<(f64, Result<InnerSolution, OptimizerError>)> = grid
        .par_iter()
        .map(|&g| (g, solve_inner(g, scenario, matrices, gamma_pcrb, search.solver_tol)))
        .collect();
    let mut curve = Vec::with_capacity(evals.len());
    let mut best: Option<(f64, f64, InnerSolution)> = None;
    for (g, res) in &evals {
        let point = match res {
            Ok(inner) => {
                let bits = secrecy_objective_bits(inner.f_gamma, *g);
                if best.as_ref().is_none_or(|(b, _, _)| bits > *b) {
                    best = Some((bits, *g, inner.clone()));
                }
                GammaCurvePoint {
                    gamma: *g,
                    f_gamma: inner.f_gamma,
                    objective_bits: bits,
                    status: SdpStatus::Optimal,
                }
            }
            Err(OptimizerError::Infeasible) => GammaCurvePoint {
                gamma: *g,
                f_gamma: f64::NAN,
                objective_bits: f64::NEG_INFINITY,
                status: SdpStatus::Infeasible,
            },
            Err(_) => GammaCurvePoint {
                gamma: *g,
                f_gamma: f64::NAN,
                objective_bits: f64::NEG_INFINITY,
                status: SdpStatus::NumericalFailure,
            },
        };
        curve.push(point);
    }
    let Some((_, best_gamma, _)) = best.as_ref().map(|(b, g, s)| (*b, *g, s.clone())) else {
        return Err(OptimizerError::EmptyGammaCurve);
    };

    // Golden-section refinement in log-gamma around the grid argmax.
    let idx = grid.iter().position(|&g| g == best_gamma).unwrap_or(0);
    let bracket_lo = grid[idx.saturating_sub(1)].ln();
    let bracket_hi = grid[(idx + 1).min(grid.len() - 1)].ln();
    let mut best_state = best;
    if bracket_hi > bracket_lo {
        let eval = |u: f64, best_state: &mut Option<(f64, f64, InnerSolution)>| -> f64 {
            let g = u.exp();
            match solve_inner(g, scenario, matrices, gamma_pcrb, search.solver_tol) {
                Ok(inner) => {
                    let bits = secrecy_objective_bits(inner.f_gamma, g);
                    if best_state.as_ref().is_none_or(|(b, _, _)| bits > *b) {
                        *best_state = Some((bits, g, inner));
                    }
                    bits
                }
                Err(_) => f64::NEG_INFINITY,
            }
        };
        let _ = golden_max(
            |u| eval(u, &mut best_state),
            bracket_lo,
            bracket_hi,
            search.golden_iters,
        );
    }
    let (best_bits, gamma_star, inner) = best_state.expect("best point exists");

    let h = &scenario.user_channel;
    let (w_tilde, v_tilde) = rank_one_reduce(&inner.w, &inner.v, h)?;
    let inv_t = C64::new(1.0 / inner.t, 0.0);
    let covariances =
        CovariancePair { info: &w_tilde * inv_t, an: &v_tilde * inv_t };
    let beams = extract_beams(&covariances.info, &covariances.an, scenario.n_an)?;
    let rates = metrics::secrecy_rate(&beams, scenario);
    if rates.worst_case < best_bits.max(0.0) - 1e-6 {
        return Err(OptimizerError::Postcondition(format!(
            "recomputed worst-case rate {} below search objective {}",
            rates.worst_case, best_bits
        )));
    }
    let achieved_pcrb = pcrb_exact(&covariances.total(), matrices, scenario);
    if let Some(g) = gamma_pcrb {
        if achieved_pcrb > g * (1.0 + 1e-6) {
            return Err(OptimizerError::Postcondition(format!(
                "achieved PCRB {achieved_pcrb:.6e} exceeds threshold {g:.6e}"
            )));
        }
    }
    Ok(OptimizationResult {
        beams,
        covariances,
        worst_secrecy_rate: rates.worst_case.max(0.0),
        achieved_pcrb,
        method,
        gamma_star: Some(gamma_star),
        diagnostics: Diagnostics {
            gamma_curve: curve,
            residuals: inner.residuals,
            objective_bits: best_bits,
        },
    })
}

/// Two-stage optimal design: grid-plus-golden search over the eavesdropper
/// SINR threshold with the exact inner SDP and tight rank-one reduction.
pub fn optimize_optimal(
    scenario: &Scenario,
    matrices: &SensingMatrices,
    gamma_pcrb: f64,
    search: &GammaSearchConfig,
) -> Result<OptimizationResult, OptimizerError> {
    two_stage(scenario, matrices, Some(gamma_pcrb), search, Method::Optimal)
}

/// Secrecy-rate upper bound: the two-stage design with no sensing duty
/// (PCRB constraint dropped).
pub fn secrecy_upper_bound(
    scenario: &Scenario,
    matrices: &SensingMatrices,
    search: &GammaSearchConfig,
) -> Result<OptimizationResult, OptimizerError> {
    two_stage(scenario, matrices, None, search, Method::UpperBound)
}

/// Orthonormal basis of the orthogonal complement of `span(cols)`, built by
/// modified Gram-Schmidt completion over the standard basis.
fn complete_orthonormal(cols: &[CVector], n: usize) -> Vec<CVector> {
    let mut basis: Vec<CVector> = cols.to_vec();
    let mut extra = Vec::new();
    for i in 0..n {
        let mut r = CVector::zeros(n);
        r[i] = C64::new(1.0, 0.0);
        for b in &basis {
            let coef = b.dotc(&r);
            r -= b * coef;
        }
        let norm = r.norm();
        if norm > 1e-7 {
            let q = r / C64::new(norm, 0.0);
            basis.push(q.clone());
            extra.push(q);
        }
    }
    extra
}

/// Null-space information-beam design (suboptimal solution I): zero leakage
/// to every candidate location, AN confined to the user-channel null space,
/// power split and AN shape from a small SDP.
pub fn optimize_suboptimal1(
    scenario: &Scenario,
    matrices: &SensingMatrices,
    gamma_pcrb: f64,
    tol: f64,
) -> Result<OptimizationResult, OptimizerError> {
    let n = scenario.n_tx;
    let p = scenario.power_budget;
    let h = &scenario.user_channel;

    // Row space of A = [a(theta_1) .. a(theta_K)]^H via SVD of the stacked
    // matrix; singular values below 1e-10 of the largest are treated as zero.
    let k = scenario.num_locations();
    let mut a_stack = CMatrix::zeros(k, n);
    for (row, &theta) in scenario.angles.iter().enumerate() {
        let a = steering_tx(theta, n);
        for c in 0..n {
            a_stack[(row, c)] = a[c].conj();
        }
    }
    let svd = nalgebra::SVD::new(a_stack.clone(), false, true);
    let smax = svd.singular_values.max();
    let rank = svd.singular_values.iter().filter(|&&s| s > 1e-10 * smax).count();
    if rank >= n {
        return Err(OptimizerError::EmptyNullSpace);
    }
    let vt = svd.v_t.expect("requested");
    let row_space: Vec<CVector> = (0..rank).map(|i| vt.row(i).adjoint().clone_owned()) .collect();
    let j2 = complete_orthonormal(&row_space, n);
    debug_assert_eq!(j2.len(), n - rank);

    // Information beam direction: projection of h onto the null space.
    let mut u_w = CVector::zeros(n);
    for q in &j2 {
        u_w += q * q.dotc(h);
    }
    let proj_norm_sq = u_w.norm_squared();
    if proj_norm_sq.sqrt() > 1e-12 * h.norm() {
        u_w /= C64::new(proj_norm_sq.sqrt(), 0.0);
    } else {
        u_w = j2[0].clone();
    }
    let gain_w = u_w.dotc(h).norm_sqr(); // equals ||J2^H h||^2 when aligned

    // AN basis: orthonormal complement of h (Householder columns).
    let x_tilde = complete_orthonormal(&[h / C64::new(h.norm(), 0.0)], n);
    let n_an_dim = n - 1;
    debug_assert_eq!(x_tilde.len(), n_an_dim);
    let mut x_mat = CMatrix::zeros(n, n_an_dim);
    for (c, q) in x_tilde.iter().enumerate() {
        x_mat.set_column(c, q);
    }

    let xi = xi_threshold(gamma_pcrb, matrices, scenario);
    let (p_w, v_small) = if xi <= 0.0 {
        // Vacuous sensing constraint: all power to the information beam.
        (p, CMatrix::zeros(n_an_dim, n_an_dim))
    } else {
        let xi_p = xi / p;
        let quad = |m: &CMatrix| -> C64 { u_w.dotc(&(m * &u_w)) };
        let m_bar_2 = quad(&matrices.m2).re;
        let m_bar_1 = quad(&matrices.m1).re;
        let m_bar_3 = quad(&matrices.m3);
        let proj = |m: &CMatrix| -> CMatrix { x_mat.adjoint() * m * &x_mat };
        let mt_1 = hermitian_part(&proj(&matrices.m1));
        let mt_2 = hermitian_part(&proj(&matrices.m2));
        let mt_3 = proj(&matrices.m3);
        let (mt3_re, mt3_im) = m3_split(&mt_3);
        let lambda = mt_1
            .norm()
            .max(mt_2.norm())
            .max(mt_3.norm())
            .max(m_bar_1.abs())
            .max(m_bar_2.abs())
            .max(m_bar_3.norm())
            .max(xi_p.abs())
            .max(1e-300);

        // Blocks: 0 = P_w/P (scalar), 1 = V~/P, 2 = LMI.
        let mut problem = SdpProblem::new(vec![1, n_an_dim, 2]);
        problem.set_objective(0, CMatrix::identity(1, 1));
        problem.add_constraint(
            vec![(0, CMatrix::identity(1, 1)), (1, CMatrix::identity(n_an_dim, n_an_dim))],
            Relation::Le,
            1.0,
        );
        let s = C64::new(-1.0 / lambda, 0.0);
        let rows: [(CMatrix, f64, CMatrix, f64); 4] = [
            (e11(), m_bar_2, &mt_2 * s, -xi_p / lambda),
            (e12_re(), m_bar_3.re, &mt3_re * s, 0.0),
            (e12_im(), m_bar_3.im, &mt3_im * s, 0.0),
            (e22(), m_bar_1, &mt_1 * s, 0.0),
        ];
        for (e, scalar, mat, rhs) in rows {
            problem.add_constraint(
                vec![
                    (2, e),
                    (0, CMatrix::from_element(1, 1, C64::new(-scalar / lambda, 0.0))),
                    (1, mat),
                ],
                Relation::Eq,
                rhs,
            );
        }
        let sol = sdp::solve(&problem, tol)?;
        match sol.status {
            SdpStatus::Optimal => {}
            SdpStatus::Infeasible => return Err(OptimizerError::Infeasible),
            other => return Err(OptimizerError::Solver(other)),
        }
        (p * sol.blocks[0][(0, 0)].re.max(0.0), &sol.blocks[1] * C64::new(p, 0.0))
    };

    // Beams: EVD of the small AN covariance mapped through the h null space.
    let v_eigs = sorted_eigs(&hermitian_part(&v_small));
    let v_max = v_eigs[0].0.max(0.0);
    let significant = if v_max <= 0.0 {
        0
    } else {
        v_eigs.iter().filter(|(l, _)| *l > 1e-7 * v_max).count()
    };
    if significant > scenario.n_an {
        return Err(OptimizerError::AnRankOverflow {
            significant,
            max_beams: scenario.n_an,
        });
    }
    let mut an_beams = Vec::with_capacity(scenario.n_an);
    for idx in 0..scenario.n_an {
        if idx < significant {
            let (l, vec) = &v_eigs[idx];
            an_beams.push(&x_mat * (vec * C64::new(l.max(0.0).sqrt(), 0.0)));
        } else {
            an_beams.push(CVector::zeros(n));
        }
    }
    let beams = Beamformer { info_beam: &u_w * C64::new(p_w.sqrt(), 0.0), an_beams };
    let covariances = beams.covariance_pair();
    let rates = metrics::secrecy_rate(&beams, scenario);
    let formula_rate = (1.0 + p_w * gain_w / scenario.noise_user).log2();
    let achieved_pcrb = pcrb_exact(&covariances.total(), matrices, scenario);
    if achieved_pcrb > gamma_pcrb * (1.0 + 1e-6) {
        return Err(OptimizerError::Postcondition(format!(
            "achieved PCRB {achieved_pcrb:.6e} exceeds threshold {gamma_pcrb:.6e}"
        )));
    }
    Ok(OptimizationResult {
        beams,
        covariances,
        worst_secrecy_rate: rates.worst_case.max(0.0),
        achieved_pcrb,
        method: Method::SuboptimalNullSpace,
        gamma_star: None,
        diagnostics: Diagnostics {
            gamma_curve: vec![],
            residuals: Residuals::default(),
            objective_bits: formula_rate,
        },
    })
}

/// User-aligned information-beam design (suboptimal solution II): reuses the
/// AN directions of suboptimal I and line-searches the information power
/// over `[0, P]` under the exact PCRB constraint.
pub fn optimize_suboptimal2(
    scenario: &Scenario,
    matrices: &SensingMatrices,
    gamma_pcrb: f64,
    sub1: &OptimizationResult,
    n_grid: usize,
) -> Result<OptimizationResult, OptimizerError> {
    let n = scenario.n_tx;
    let p = scenario.power_budget;
    let sig2 = scenario.noise_user;
    let nu_e = scenario.eve_noise_effective();
    let h = &scenario.user_channel;
    let h_norm_sq = h.norm_squared();
    let h_bar = h / C64::new(h_norm_sq.sqrt(), 0.0);
    let h_outer = hermitian_part(&(&h_bar * h_bar.adjoint()));

    // Reused AN directions; when the donor solution carries no AN at all
    // (vacuous sensing constraint), fall back to the full orthonormal
    // null(h) basis so the AN side of the split stays defined.
    let donor: Vec<CVector> = sub1
        .beams
        .an_beams
        .iter()
        .filter(|v| v.norm_squared() > 1e-300)
        .cloned()
        .collect();
    let an_dirs: Vec<CVector> = if donor.is_empty() {
        complete_orthonormal(std::slice::from_ref(&h_bar), n)
            .into_iter()
            .take(scenario.n_an)
            .collect()
    } else {
        donor
    };
    let s_tot: f64 = an_dirs.iter().map(|v| v.norm_squared()).sum();
    let v_bar = if s_tot > 1e-300 {
        let mut acc = CMatrix::zeros(n, n);
        for v in &an_dirs {
            acc += v * v.adjoint();
        }
        hermitian_part(&(acc * C64::new(1.0 / s_tot, 0.0)))
    } else {
        CMatrix::zeros(n, n)
    };

    // Per-location leakage data.
    let k = scenario.num_locations();
    let mut gain_h = vec![0.0; k];
    let mut an_at_k = vec![0.0; k];
    for (i, &theta) in scenario.angles.iter().enumerate() {
        let a = steering_tx(theta, n);
        gain_h[i] = a.dotc(h).norm_sqr() / h_norm_sq;
        an_at_k[i] = if s_tot > 1e-300 {
            an_dirs.iter().map(|v| a.dotc(v).norm_sqr()).sum::<f64>() / s_tot
        } else {
            0.0
        };
    }
    let rate = |pw: f64| -> f64 {
        let user = (1.0 + pw * h_norm_sq / sig2).log2();
        let mut worst = f64::INFINITY;
        for i in 0..k {
            let eve = pw * gain_h[i] / ((p - pw) * an_at_k[i] + nu_e);
            worst = worst.min(user - (1.0 + eve).log2());
        }
        worst
    };

    let xi = xi_threshold(gamma_pcrb, matrices, scenario);
    let info = |pw: f64| -> f64 {
        let r = &h_outer * C64::new(pw, 0.0) + &v_bar * C64::new(p - pw, 0.0);
        sensing_information(&r, matrices)
    };

    // Feasible interval of the concave constraint info(pw) >= xi.
    let (lo, hi) = if xi <= 0.0 {
        (0.0, p)
    } else {
        let n_scan = n_grid.max(16);
        let feas: Vec<bool> =
            (0..=n_scan).map(|i| info(p * i as f64 / n_scan as f64) >= xi).collect();
        let Some(first) = feas.iter().position(|&f| f) else {
            return Err(OptimizerError::Infeasible);
        };
        let last = feas.iter().rposition(|&f| f).unwrap();
        let refine = |mut ok: f64, mut bad: f64| -> f64 {
            for _ in 0..60 {
                let mid = 0.5 * (ok + bad);
                if info(mid) >= xi {
                    ok = mid;
                } else {
                    bad = mid;
                }
            }
            ok
        };
        let step = p / n_scan as f64;
        let lo = if first == 0 { 0.0 } else { refine(first as f64 * step, (first - 1) as f64 * step) };
        let hi = if last == n_scan { p } else { refine(last as f64 * step, (last + 1) as f64 * step) };
        (lo, hi)
    };

    // Grid plus golden refinement for the power split.
    let n_pts = n_grid.max(2);
    let mut best_i = 0;
    let mut best_val = f64::NEG_INFINITY;
    for i in 0..n_pts {
        let pw = lo + (hi - lo) * i as f64 / (n_pts - 1) as f64;
        let v = rate(pw);
        if v > best_val {
            best_val = v;
            best_i = i;
        }
    }
    let step = (hi - lo) / (n_pts - 1) as f64;
    let g_lo = (lo + step * best_i.saturating_sub(1) as f64).max(lo);
    let g_hi = (lo + step * (best_i + 1) as f64).min(hi);
    let pw_star = if g_hi > g_lo { golden_max(rate, g_lo, g_hi, 50) } else { lo };
    let pw_star = pw_star.clamp(lo, hi);

    let an_scale = if s_tot > 1e-300 { ((p - pw_star) / s_tot).sqrt() } else { 0.0 };
    let beams = Beamformer {
        info_beam: &h_bar * C64::new(pw_star.sqrt(), 0.0),
        an_beams: an_dirs.iter().map(|v| v * C64::new(an_scale, 0.0)).collect(),
    };
    let covariances = beams.covariance_pair();
    let rates = metrics::secrecy_rate(&beams, scenario);
    let achieved_pcrb = pcrb_exact(&covariances.total(), matrices, scenario);
    if achieved_pcrb > gamma_pcrb * (1.0 + 1e-6) {
        return Err(OptimizerError::Postcondition(format!(
            "achieved PCRB {achieved_pcrb:.6e} exceeds threshold {gamma_pcrb:.6e}"
        )));
    }
    Ok(OptimizationResult {
        beams,
        covariances,
        worst_secrecy_rate: rates.worst_case.max(0.0),
        achieved_pcrb,
        method: Method::SuboptimalAligned,
        gamma_star: None,
        diagnostics: Diagnostics {
            gamma_curve: vec![],
            residuals: Residuals::default(),
            objective_bits: best_val,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::rayleigh_user_channel;
    use crate::pcrb::{compute_sensing_matrices, QuadratureConfig};

    fn small_scenario() -> Scenario {
        Scenario::new(
            4,
            10,
            3,
            vec![-0.7, 0.5],
            vec![0.6, 0.4],
            1e-4,
            1.0,
            1e-4,
            0.32,
            1e-8,
            1e-8,
            1e-8,
            100.0,
            rayleigh_user_channel(11, 1e-8, 4),
        )
        .unwrap()
    }

    fn matrices_for(sc: &Scenario) -> SensingMatrices {
        compute_sensing_matrices(sc, &QuadratureConfig::default()).unwrap()
    }

    #[test]
    fn feasibility_vacuous_and_impossible() {
        let sc = small_scenario();
        let m = matrices_for(&sc);
        // Gamma above the prior-only PCRB: xi <= 0, trivially feasible.
        match check_feasibility_p1(&sc, &m, 1.0).unwrap() {
            FeasibilityP1::Feasible(r) => assert!(r.norm() == 0.0),
            _ => panic!("expected feasible"),
        }
        // Gamma near zero: unbounded information demand.
        assert!(matches!(
            check_feasibility_p1(&sc, &m, 1e-12).unwrap(),
            FeasibilityP1::Infeasible
        ));
        // A moderate threshold is feasible with a genuine witness.
        let gamma = 0.5 * sc.sigma_theta_sq;
        match check_feasibility_p1(&sc, &m, gamma).unwrap() {
            FeasibilityP1::Feasible(r) => {
                assert!(r.trace().re <= sc.power_budget * (1.0 + 1e-6));
                let got = pcrb_exact(&r, &m, &sc);
                assert!(got <= gamma * (1.0 + 1e-4), "witness pcrb {got} vs {gamma}");
            }
            _ => panic!("expected feasible"),
        }
    }

    #[test]
    fn inner_solution_hits_mrt_optimum_when_unconstrained() {
        let sc = small_scenario();
        let m = matrices_for(&sc);
        let gamma_max =
            sc.power_budget * sc.n_tx as f64 * sc.path_gain() / sc.noise_eve;
        let inner = solve_inner(gamma_max, &sc, &m, None, 1e-9).unwrap();
        let h = &sc.user_channel;
        let expect = sc.power_budget * h.norm_squared() / sc.noise_user;
        assert!(
            (inner.f_gamma - expect).abs() < 1e-5 * expect,
            "f = {}, MRT bound = {}",
            inner.f_gamma,
            expect
        );
        // W* rank-one along h.
        let cov = inner.covariances();
        let eigs = sorted_eigs(&cov.info);
        assert!(eigs[1].0 < 1e-6 * eigs[0].0);
        let corr = eigs[0].1.dotc(h).norm() / h.norm();
        assert!(corr > 1.0 - 1e-6, "leading eigenvector aligns with h");
    }

    #[test]
    fn f_gamma_is_nondecreasing() {
        let sc = small_scenario();
        let m = matrices_for(&sc);
        let gamma_pcrb = Some(0.9 * sc.sigma_theta_sq);
        let mut last = -1.0;
        for g in [1e-2, 1.0, 1e2, 1e4, 1e6] {
            let inner = solve_inner(g, &sc, &m, gamma_pcrb, 1e-9).unwrap();
            assert!(
                inner.f_gamma >= last * (1.0 - 1e-7),
                "f({g}) = {} < previous {last}",
                inner.f_gamma
            );
            last = inner.f_gamma;
        }
    }

    #[test]
    fn rank_one_reduction_identities() {
        let sc = small_scenario();
        let h = sc.user_channel.clone();
        // Already rank one and aligned: reduction is the identity.
        let w = hermitian_part(&(&h * h.adjoint() * C64::new(3.0, 0.0)));
        let v = CMatrix::identity(4, 4) * C64::new(0.5, 0.0);
        let (wt, vt) = rank_one_reduce(&w, &v, &h).unwrap();
        assert!((&wt - &w).norm() < 1e-10 * w.norm());
        assert!((&vt - &v).norm() < 1e-10);

        // u orthogonal to h is stripped into the AN part.
        let mut u = CVector::zeros(4);
        u[0] = h[1].conj();
        u[1] = -h[0].conj();
        u /= C64::new(u.norm(), 0.0);
        let r = &h * C64::new(1.0 / h.norm(), 0.0);
        let w = hermitian_part(&(&u * u.adjoint() + &r * r.adjoint() * C64::new(2.0, 0.0)));
        let (wt, vt) = rank_one_reduce(&w, &CMatrix::zeros(4, 4), &h).unwrap();
        assert!((&wt - &(&r * r.adjoint() * C64::new(2.0, 0.0))).norm() < 1e-9);
        assert!((&vt - &(&u * u.adjoint())).norm() < 1e-9);

        // Objective preserved exactly; stripped part PSD.
        let quad_before = h.dotc(&(&w * &h)).re;
        let quad_after = h.dotc(&(&wt * &h)).re;
        assert!((quad_before - quad_after).abs() <= 1e-10 * quad_before);
        let strip = &w - &wt;
        assert!(crate::la::min_eigenvalue(&strip) > -1e-8 * strip.trace().re.max(1e-12));

        // Degenerate input: W orthogonal to h.
        let w_perp = hermitian_part(&(&u * u.adjoint()));
        assert!(matches!(
            rank_one_reduce(&w_perp, &CMatrix::zeros(4, 4), &h),
            Err(OptimizerError::DegenerateInput(_))
        ));
    }

    #[test]
    fn beam_extraction_cases() {
        let p = 9.0;
        let mut w = CMatrix::zeros(3, 3);
        w[(0, 0)] = C64::new(p, 0.0);
        let v = CMatrix::zeros(3, 3);
        let bf = extract_beams(&w, &v, 2).unwrap();
        assert!((bf.info_beam.norm_squared() - p).abs() < 1e-12);
        assert!(bf.an_beams.iter().all(|b| b.norm() == 0.0));

        let mut v = CMatrix::zeros(3, 3);
        v[(0, 0)] = C64::new(2.0, 0.0);
        v[(1, 1)] = C64::new(1.0, 0.0);
        let bf = extract_beams(&w, &v, 2).unwrap();
        assert!((bf.an_beams[0].norm_squared() - 2.0).abs() < 1e-12);
        assert!((bf.an_beams[1].norm_squared() - 1.0).abs() < 1e-12);

        // Reconstruction matches the covariances.
        let pair = bf.covariance_pair();
        assert!((&pair.info - &w).norm() <= 1e-7 * w.norm());
        assert!((&pair.an - &v).norm() <= 1e-7 * v.norm());

        // Overflow: three significant directions but two beams.
        let mut v3 = CMatrix::identity(3, 3);
        v3[(0, 0)] = C64::new(2.0, 0.0);
        assert!(matches!(
            extract_beams(&w, &v3, 2),
            Err(OptimizerError::AnRankOverflow { significant: 3, max_beams: 2 })
        ));

        // Not rank one.
        let w2 = CMatrix::identity(3, 3);
        assert!(matches!(extract_beams(&w2, &v, 2), Err(OptimizerError::DegenerateInput(_))));
    }

    #[test]
    fn two_stage_beats_suboptimals_on_small_scenario() {
        let sc = small_scenario();
        let m = matrices_for(&sc);
        let gamma = 0.6 * sc.sigma_theta_sq;
        let search = GammaSearchConfig { grid_points: 24, golden_iters: 24, ..Default::default() };
        let opt = optimize_optimal(&sc, &m, gamma, &search).unwrap();
        let sub1 = optimize_suboptimal1(&sc, &m, gamma, 1e-9).unwrap();
        let sub2 = optimize_suboptimal2(&sc, &m, gamma, &sub1, 256).unwrap();
        assert!(opt.worst_secrecy_rate >= sub1.worst_secrecy_rate - 1e-6);
        assert!(opt.worst_secrecy_rate >= sub2.worst_secrecy_rate - 1e-6);
        for r in [&opt, &sub1, &sub2] {
            assert!(r.achieved_pcrb <= gamma * (1.0 + 1e-6));
            r.beams.validate(sc.power_budget).unwrap();
        }
        let ub = secrecy_upper_bound(&sc, &m, &search).unwrap();
        assert!(ub.worst_secrecy_rate >= opt.worst_secrecy_rate - 1e-6);
    }

    #[test]
    fn upper_bound_matches_optimal_at_vacuous_threshold() {
        let sc = small_scenario();
        let m = matrices_for(&sc);
        let search = GammaSearchConfig { grid_points: 24, golden_iters: 24, ..Default::default() };
        let loose = optimize_optimal(&sc, &m, 1.0, &search).unwrap();
        let ub = secrecy_upper_bound(&sc, &m, &search).unwrap();
        assert!((loose.worst_secrecy_rate - ub.worst_secrecy_rate).abs() < 1e-4);
    }

    #[test]
    fn sub1_leaks_nothing_and_sub2_search_matches_dense_grid() {
        let sc = small_scenario();
        let m = matrices_for(&sc);
        let gamma = 0.6 * sc.sigma_theta_sq;
        let sub1 = optimize_suboptimal1(&sc, &m, gamma, 1e-9).unwrap();
        for k in 0..sc.num_locations() {
            let leak = metrics::sinr_eve(&sub1.beams, k, &sc).unwrap();
            assert!(leak <= 1e-12, "leakage {leak} at location {k}");
        }
        // AN invisible at the user.
        let h = &sc.user_channel;
        let an_user: f64 =
            sub1.beams.an_beams.iter().map(|v| h.dotc(v).norm_sqr()).sum();
        assert!(an_user <= 1e-12 * sc.power_budget);

        let sub2 = optimize_suboptimal2(&sc, &m, gamma, &sub1, 512).unwrap();
        let an_user2: f64 =
            sub2.beams.an_beams.iter().map(|v| h.dotc(v).norm_sqr()).sum();
        assert!(an_user2 <= 1e-12 * sc.power_budget);

        // Dense-grid oracle for the power split of suboptimal II.
        let pw_sdp = sub2.beams.info_beam.norm_squared();
        let s_tot: f64 = sub1.beams.an_beams.iter().map(|v| v.norm_squared()).sum();
        let oracle = {
            let n_dense = 10_000;
            let mut best = (f64::NEG_INFINITY, 0.0);
            for i in 0..=n_dense {
                let pw = sc.power_budget * i as f64 / n_dense as f64;
                let scale = if s_tot > 0.0 { ((sc.power_budget - pw) / s_tot).sqrt() } else { 0.0 };
                let bf = Beamformer {
                    info_beam: h * C64::new((pw / h.norm_squared()).sqrt(), 0.0),
                    an_beams: sub1
                        .beams
                        .an_beams
                        .iter()
                        .map(|v| v * C64::new(scale, 0.0))
                        .collect(),
                    };
                let cov = bf.covariance_pair().total();
                if pcrb_exact(&cov, &m, &sc) > gamma * (1.0 + 1e-9) {
                    continue;
                }
                let r = metrics::secrecy_rate(&bf, &sc).worst_case;
                if r > best.0 {
                    best = (r, pw);
                }
            }
            best
        };
        let grid_step = sc.power_budget / 10_000.0;
        assert!(
            (pw_sdp - oracle.1).abs() <= sc.power_budget / 512.0 + grid_step,
            "pw {pw_sdp} vs oracle {}",
            oracle.1
        );
        assert!(sub2.worst_secrecy_rate >= oracle.0 - 1e-6);
    }

    #[test]
    fn sub1_rejects_full_rank_steering_set() {
        // K = N_t = 2: the steering vectors span C^2.
        let sc = Scenario::new(
            2,
            2,
            1,
            vec![-0.5, 0.4],
            vec![0.5, 0.5],
            1e-4,
            1.0,
            1e-4,
            0.32,
            1e-8,
            1e-8,
            1e-8,
            100.0,
            rayleigh_user_channel(7, 1e-8, 2),
        )
        .unwrap();
        let m = matrices_for(&sc);
        assert!(matches!(
            optimize_suboptimal1(&sc, &m, 1.0, 1e-9),
            Err(OptimizerError::EmptyNullSpace)
        ));
    }

    #[test]
    fn infeasible_threshold_propagates() {
        let sc = small_scenario();
        let m = matrices_for(&sc);
        let search = GammaSearchConfig::default();
        assert!(matches!(
            optimize_optimal(&sc, &m, 1e-12, &search),
            Err(OptimizerError::Infeasible)
        ));
        assert!(matches!(
            solve_inner(1.0, &sc, &m, Some(1e-12), 1e-9),
            Err(OptimizerError::Infeasible)
        ));
    }
}
