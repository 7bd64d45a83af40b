//! Primal-dual interior-point solver for small block-structured SDPs.
//!
//! Problems have Hermitian PSD variable blocks (a 1x1 block is a nonnegative
//! scalar) and real linear trace constraints
//! `sum_b Re tr(A_{c,b} X_b) {=, <=, >=} rhs`; the objective maximizes
//! `sum_b Re tr(C_b X_b)`. Complex Hermitian blocks are handled natively
//! (Hermitian Cholesky/eigen/SVD), not through a real 2dx2d embedding.
//!
//! The solver is an infeasible-start Mehrotra predictor-corrector with
//! Nesterov-Todd scaling and dense linear algebra; inequalities become
//! equalities with nonnegative 1x1 slack blocks, and the data are Ruiz
//! equilibrated before iterating. Feasibility questions are answered by a
//! phase-I margin problem (minimize the artificial variable `zeta` in
//! `A(X) + q zeta = b`), not by a homogeneous embedding.
//!
//! Everything is dense and sized for blocks of dimension <= ~10 with a few
//! dozen constraints; a solver run is single-threaded and a problem instance
//! is cheap to rebuild, so concurrent solves use distinct instances.

use crate::la::{hermitian_defect, hermitian_part, trace_product};
use crate::{C64, CMatrix};
use nalgebra::{DMatrix, DVector};

const MAX_ITER: usize = 200;
const STEP_FRACTION: f64 = 0.98;
const FEAS_TOL: f64 = 1e-7;

#[derive(Debug, thiserror::Error)]
pub enum SdpError {
    #[error("invalid problem: {0}")]
    Invalid(String),
    #[error("tolerance {0:.3e} outside [1e-12, 1e-4]")]
    TolOutOfRange(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Eq,
    Le,
    Ge,
}

/// One linear trace constraint: `sum_b Re tr(terms[b] X_b) relation rhs`.
#[derive(Debug, Clone)]
pub struct LinearConstraint {
    pub terms: Vec<(usize, CMatrix)>,
    pub relation: Relation,
    pub rhs: f64,
}

/// Block-structured Hermitian SDP in maximization form.
#[derive(Debug, Clone)]
pub struct SdpProblem {
    block_dims: Vec<usize>,
    objective: Vec<CMatrix>,
    constraints: Vec<LinearConstraint>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SdpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    NumericalFailure,
}

impl std::fmt::Display for SdpStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            SdpStatus::Optimal => "optimal",
            SdpStatus::Infeasible => "infeasible",
            SdpStatus::Unbounded => "unbounded",
            SdpStatus::NumericalFailure => "numerical-failure",
        };
        f.write_str(s)
    }
}

/// Relative KKT residuals of a returned solution.
#[derive(Debug, Clone, Copy, Default)]
pub struct Residuals {
    pub primal: f64,
    pub dual: f64,
    pub gap: f64,
}

#[derive(Debug, Clone)]
pub struct SdpSolution {
    pub status: SdpStatus,
    /// Per-block primal solution (meaningful when status is Optimal).
    pub blocks: Vec<CMatrix>,
    /// Objective value in maximization form.
    pub objective: f64,
    /// Equality multipliers of the internal minimization form, one per
    /// original constraint.
    pub duals: Vec<f64>,
    pub residuals: Residuals,
    pub iterations: usize,
}

/// Outcome of the phase-I margin problem.
#[derive(Debug, Clone)]
pub enum Feasibility {
    /// A (near-)feasible point, one matrix per problem block.
    Feasible(Vec<CMatrix>),
    /// Margin is `-zeta*`; strictly negative beyond tolerance.
    Infeasible { margin: f64 },
}

impl SdpProblem {
    pub fn new(block_dims: Vec<usize>) -> Self {
        let objective = block_dims.iter().map(|&d| CMatrix::zeros(d, d)).collect();
        SdpProblem { block_dims, objective, constraints: Vec::new() }
    }

    pub fn block_dims(&self) -> &[usize] {
        &self.block_dims
    }

    /// Sets the objective coefficient for one block (maximize direction).
    pub fn set_objective(&mut self, block: usize, c: CMatrix) {
        self.objective[block] = c;
    }

    pub fn add_constraint(&mut self, terms: Vec<(usize, CMatrix)>, relation: Relation, rhs: f64) {
        self.constraints.push(LinearConstraint { terms, relation, rhs });
    }

    pub fn num_constraints(&self) -> usize {
        self.constraints.len()
    }

    pub fn validate(&self) -> Result<(), SdpError> {
        if self.block_dims.contains(&0) {
            return Err(SdpError::Invalid("zero-dimensional block".into()));
        }
        let check = |m: &CMatrix, what: String| -> Result<(), SdpError> {
            let scale = 1.0 + m.iter().map(|v| v.norm()).fold(0.0f64, f64::max);
            if hermitian_defect(m) > 1e-12 * scale {
                return Err(SdpError::Invalid(format!("{what} is not Hermitian")));
            }
            Ok(())
        };
        for (b, c) in self.objective.iter().enumerate() {
            if c.nrows() != self.block_dims[b] || c.ncols() != self.block_dims[b] {
                return Err(SdpError::Invalid(format!("objective dim mismatch in block {b}")));
            }
            check(c, format!("objective block {b}"))?;
        }
        for (i, con) in self.constraints.iter().enumerate() {
            if !con.rhs.is_finite() {
                return Err(SdpError::Invalid(format!("constraint {i} rhs not finite")));
            }
            for (b, a) in &con.terms {
                if *b >= self.block_dims.len() {
                    return Err(SdpError::Invalid(format!(
                        "constraint {i} uses unknown block {b}"
                    )));
                }
                if a.nrows() != self.block_dims[*b] || a.ncols() != self.block_dims[*b] {
                    return Err(SdpError::Invalid(format!("constraint {i} dim mismatch")));
                }
                check(a, format!("constraint {i} block {b}"))?;
            }
        }
        Ok(())
    }

    /// Debug dump mirroring the SDPA sparse format, with an extra imaginary
    /// column (`matno block i j re im`; matno 0 is the objective). Slack
    /// blocks introduced internally for inequalities are not included; the
    /// dump reflects the problem as posed.
    pub fn to_sdpa_sparse(&self) -> String {
        use std::fmt::Write;
        let mut s = String::new();
        let _ = writeln!(s, "{} {}", self.constraints.len(), self.block_dims.len());
        let dims: Vec<String> = self.block_dims.iter().map(|d| d.to_string()).collect();
        let _ = writeln!(s, "{}", dims.join(" "));
        let rhs: Vec<String> = self.constraints.iter().map(|c| format!("{:?}", c.rhs)).collect();
        let _ = writeln!(s, "{}", rhs.join(" "));
        let emit = |matno: usize, block: usize, m: &CMatrix, out: &mut String| {
            for i in 0..m.nrows() {
                for j in i..m.ncols() {
                    let v = m[(i, j)];
                    if v.norm() > 0.0 {
                        let _ = writeln!(
                            out,
                            "{} {} {} {} {:?} {:?}",
                            matno,
                            block + 1,
                            i + 1,
                            j + 1,
                            v.re,
                            v.im
                        );
                    }
                }
            }
        };
        for (b, c) in self.objective.iter().enumerate() {
            emit(0, b, c, &mut s);
        }
        for (i, con) in self.constraints.iter().enumerate() {
            for (b, a) in &con.terms {
                emit(i + 1, *b, a, &mut s);
            }
        }
        s
    }
}

// ---------------------------------------------------------------------------
// Standard form and scaling
// ---------------------------------------------------------------------------

/// Equality-only minimization form; user blocks first, then one 1x1 slack
/// block per inequality.
struct Standard {
    dims: Vec<usize>,
    /// Minimization objective per block.
    c: Vec<CMatrix>,
    /// Constraint coefficients, one sparse row per equality.
    a: Vec<Vec<(usize, CMatrix)>>,
    b: Vec<f64>,
    n_user_blocks: usize,
}

struct Scaling {
    row: Vec<f64>,
    block: Vec<f64>,
    obj: f64,
}

fn standardize(p: &SdpProblem) -> Standard {
    let mut dims = p.block_dims.to_vec();
    let n_user_blocks = dims.len();
    let mut c: Vec<CMatrix> =
        p.objective.iter().map(|m| hermitian_part(m) * C64::new(-1.0, 0.0)).collect();
    let mut a = Vec::with_capacity(p.constraints.len());
    let mut b = Vec::with_capacity(p.constraints.len());
    for con in &p.constraints {
        let mut row: Vec<(usize, CMatrix)> =
            con.terms.iter().map(|(blk, m)| (*blk, hermitian_part(m))).collect();
        match con.relation {
            Relation::Eq => {}
            Relation::Le => {
                let slack = dims.len();
                dims.push(1);
                c.push(CMatrix::zeros(1, 1));
                row.push((slack, CMatrix::from_element(1, 1, C64::new(1.0, 0.0))));
            }
            Relation::Ge => {
                let slack = dims.len();
                dims.push(1);
                c.push(CMatrix::zeros(1, 1));
                row.push((slack, CMatrix::from_element(1, 1, C64::new(-1.0, 0.0))));
            }
        }
        a.push(row);
        b.push(con.rhs);
    }
    Standard { dims, c, a, b, n_user_blocks }
}

/// Ruiz equilibration on Frobenius norms of the constraint coefficients,
/// followed by objective normalization; returns the scaled copy.
fn equilibrate(std_form: &Standard) -> (Standard, Scaling) {
    let m = std_form.a.len();
    let nb = std_form.dims.len();
    let mut row = vec![1.0f64; m];
    let mut block = vec![1.0f64; nb];
    for _ in 0..8 {
        for (i, terms) in std_form.a.iter().enumerate() {
            let mx = terms
                .iter()
                .map(|(blk, mat)| row[i] * mat.norm() * block[*blk])
                .fold(0.0f64, f64::max);
            if mx > 0.0 {
                row[i] /= mx.sqrt();
            }
        }
        for b in 0..nb {
            let mut mx = 0.0f64;
            for (i, terms) in std_form.a.iter().enumerate() {
                for (blk, mat) in terms {
                    if *blk == b {
                        mx = mx.max(row[i] * mat.norm() * block[b]);
                    }
                }
            }
            if mx > 0.0 {
                block[b] /= mx.sqrt();
            }
        }
    }
    for v in row.iter_mut().chain(block.iter_mut()) {
        *v = v.clamp(1e-8, 1e8);
    }
    let mut scaled = Standard {
        dims: std_form.dims.clone(),
        c: std_form.c.iter().enumerate().map(|(b, m)| m * C64::new(block[b], 0.0)).collect(),
        a: std_form
            .a
            .iter()
            .enumerate()
            .map(|(i, terms)| {
                terms.iter().map(|(b, m)| (*b, m * C64::new(row[i] * block[*b], 0.0))).collect()
            })
            .collect(),
        b: std_form.b.iter().enumerate().map(|(i, v)| v * row[i]).collect(),
        n_user_blocks: std_form.n_user_blocks,
    };
    let cmax = scaled.c.iter().map(|m| m.norm()).fold(0.0f64, f64::max);
    let obj = 1.0 / cmax.max(1.0);
    for m in &mut scaled.c {
        *m *= C64::new(obj, 0.0);
    }
    (scaled, Scaling { row, block, obj })
}

fn apply_primal(std_form: &Standard, x: &[CMatrix]) -> DVector<f64> {
    DVector::from_fn(std_form.a.len(), |i, _| {
        std_form.a[i].iter().map(|(b, m)| trace_product(m, &x[*b]).re).sum()
    })
}

fn apply_adjoint(std_form: &Standard, y: &DVector<f64>) -> Vec<CMatrix> {
    let mut out: Vec<CMatrix> = std_form.dims.iter().map(|&d| CMatrix::zeros(d, d)).collect();
    for (i, terms) in std_form.a.iter().enumerate() {
        for (b, m) in terms {
            out[*b] += m * C64::new(y[i], 0.0);
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Interior-point core
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum RawStatus {
    Optimal,
    Diverged,
    Stalled,
    MaxIter,
}

struct Iterate {
    x: Vec<CMatrix>,
    y: DVector<f64>,
    z: Vec<CMatrix>,
}

struct IpmOutcome {
    iterate: Iterate,
    status: RawStatus,
    iterations: usize,
    residuals: Residuals,
}

/// Per-block Nesterov-Todd scaling data: `W = G G^H` with `W Z W = X` and
/// `G^-1 X G^-H = G^H Z G = diag(d)`.
struct NtBlock {
    g: CMatrix,
    g_inv: CMatrix,
    w: CMatrix,
    d: DVector<f64>,
}

fn nt_scaling(x: &CMatrix, z: &CMatrix) -> Option<NtBlock> {
    let lx = nalgebra::Cholesky::new(x.clone())?.l().clone_owned();
    let lz = nalgebra::Cholesky::new(z.clone())?.l().clone_owned();
    let svd = nalgebra::SVD::new(lz.adjoint() * &lx, true, true);
    let vt = svd.v_t?;
    let d = svd.singular_values.clone_owned();
    if d.iter().any(|&s| !(s > 0.0)) {
        return None;
    }
    let d_isqrt = DMatrix::from_diagonal(&d.map(|s| C64::new(1.0 / s.sqrt(), 0.0)));
    let d_sqrt = DMatrix::from_diagonal(&d.map(|s| C64::new(s.sqrt(), 0.0)));
    let v = vt.adjoint();
    let g = &lx * &v * d_isqrt;
    let n = x.nrows();
    let eye = CMatrix::identity(n, n);
    let lx_inv = lx.solve_lower_triangular(&eye)?;
    let g_inv = d_sqrt * v.adjoint() * lx_inv;
    let w = &g * g.adjoint();
    Some(NtBlock { g, g_inv, w, d })
}

/// Largest step alpha keeping `X + alpha dX >= 0`, from the Cholesky factor
/// of X.
fn step_to_boundary(l: &CMatrix, dx: &CMatrix) -> f64 {
    let n = l.nrows();
    let eye = CMatrix::identity(n, n);
    let Some(l_inv) = l.solve_lower_triangular(&eye) else { return 0.0 };
    let mid = hermitian_part(&(&l_inv * dx * l_inv.adjoint()));
    let min = crate::la::min_eigenvalue(&mid);
    if min >= -1e-300 {
        f64::INFINITY
    } else {
        -1.0 / min
    }
}

fn ipm(scaled: &Standard, orig: &Standard, scaling: &Scaling, tol: f64) -> IpmOutcome {
    let nb = scaled.dims.len();
    let m = scaled.b.len();
    let nu: f64 = scaled.dims.iter().map(|&d| d as f64).sum();

    let b_inf = scaled.b.iter().fold(0.0f64, |a, &v| a.max(v.abs()));
    let c_norm = scaled.c.iter().map(|c| c.norm()).fold(0.0f64, f64::max);
    let a_norm =
        scaled.a.iter().flat_map(|r| r.iter().map(|(_, mat)| mat.norm())).fold(0.0f64, f64::max);
    let xi = (1.0 + b_inf) * 10.0;
    let eta = (1.0 + c_norm.max(a_norm)) * 10.0;

    let mut it = Iterate {
        x: scaled.dims.iter().map(|&d| CMatrix::identity(d, d) * C64::new(xi, 0.0)).collect(),
        y: DVector::zeros(m),
        z: scaled.dims.iter().map(|&d| CMatrix::identity(d, d) * C64::new(eta, 0.0)).collect(),
    };

    let orig_bnorm = orig.b.iter().map(|v| v * v).sum::<f64>().sqrt();
    let orig_cnorm = orig.c.iter().map(|c| c.norm_squared()).sum::<f64>().sqrt();

    let unscale = |it: &Iterate| -> Iterate {
        Iterate {
            x: it.x.iter().enumerate().map(|(b, m)| m * C64::new(scaling.block[b], 0.0)).collect(),
            y: DVector::from_fn(m, |i, _| it.y[i] * scaling.row[i] / scaling.obj),
            z: it
                .z
                .iter()
                .enumerate()
                .map(|(b, mat)| mat * C64::new(1.0 / (scaling.block[b] * scaling.obj), 0.0))
                .collect(),
        }
    };
    let residuals_of = |raw: &Iterate| -> Residuals {
        let u = unscale(raw);
        let ax = apply_primal(orig, &u.x);
        let rp = DVector::from_fn(m, |i, _| orig.b[i] - ax[i]);
        let aty = apply_adjoint(orig, &u.y);
        let mut rd_sq = 0.0;
        for b in 0..nb {
            rd_sq += (&orig.c[b] - &aty[b] - &u.z[b]).norm_squared();
        }
        let pobj: f64 = (0..nb).map(|b| trace_product(&orig.c[b], &u.x[b]).re).sum();
        let dobj: f64 = orig.b.iter().zip(u.y.iter()).map(|(b, y)| b * y).sum();
        Residuals {
            primal: rp.norm() / (1.0 + orig_bnorm),
            dual: rd_sq.sqrt() / (1.0 + orig_cnorm),
            gap: (pobj - dobj).abs() / (1.0 + pobj.abs() + dobj.abs()),
        }
    };

    let mut stall = 0usize;
    for iter in 0..MAX_ITER {
        let res = residuals_of(&it);
        if res.primal <= tol && res.dual <= tol && res.gap <= tol {
            return IpmOutcome {
                iterate: it,
                status: RawStatus::Optimal,
                iterations: iter,
                residuals: res,
            };
        }
        let xnorm: f64 = it.x.iter().map(|x| x.norm()).fold(0.0, f64::max);
        let znorm: f64 = it.z.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if xnorm > 1e13 * (1.0 + b_inf) || znorm > 1e13 * (1.0 + c_norm.max(1.0)) {
            return IpmOutcome {
                iterate: it,
                status: RawStatus::Diverged,
                iterations: iter,
                residuals: res,
            };
        }

        let mu: f64 = it.x.iter().zip(&it.z).map(|(x, z)| trace_product(x, z).re).sum::<f64>() / nu;
        if !mu.is_finite() {
            return IpmOutcome {
                iterate: it,
                status: RawStatus::Stalled,
                iterations: iter,
                residuals: res,
            };
        }

        // NT scaling per block; jitter once if a factorization fails.
        let mut nt: Vec<NtBlock> = Vec::with_capacity(nb);
        let mut ok = true;
        for b in 0..nb {
            match nt_scaling(&it.x[b], &it.z[b]) {
                Some(s) => nt.push(s),
                None => {
                    let d = scaled.dims[b];
                    let bump =
                        C64::new(1e-13 * (it.x[b].trace().re.abs() / d as f64 + 1e-300), 0.0);
                    let xj = &it.x[b] + CMatrix::identity(d, d) * bump;
                    let zj = &it.z[b] + CMatrix::identity(d, d) * bump;
                    match nt_scaling(&xj, &zj) {
                        Some(s) => nt.push(s),
                        None => {
                            ok = false;
                            break;
                        }
                    }
                }
            }
        }
        if !ok {
            return IpmOutcome {
                iterate: it,
                status: RawStatus::Stalled,
                iterations: iter,
                residuals: res,
            };
        }

        // Schur complement M_ij = sum_b tr(A_i W A_j W), symmetric PD.
        let waw: Vec<Vec<(usize, CMatrix)>> = scaled
            .a
            .iter()
            .map(|terms| terms.iter().map(|(b, a)| (*b, &nt[*b].w * a * &nt[*b].w)).collect())
            .collect();
        let mut schur = DMatrix::<f64>::zeros(m, m);
        for i in 0..m {
            for j in i..m {
                let mut acc = 0.0;
                for (b, a) in &scaled.a[i] {
                    for (b2, p) in &waw[j] {
                        if b == b2 {
                            acc += trace_product(a, p).re;
                        }
                    }
                }
                schur[(i, j)] = acc;
                schur[(j, i)] = acc;
            }
        }
        let max_diag = (0..m).map(|i| schur[(i, i)]).fold(0.0f64, f64::max).max(1e-300);
        let mut chol = None;
        for k in 0..6 {
            let trial = if k == 0 {
                schur.clone()
            } else {
                let ridge = max_diag * 1e-14 * 100f64.powi(k - 1);
                &schur + DMatrix::identity(m, m) * ridge
            };
            if let Some(c) = nalgebra::Cholesky::new(trial) {
                chol = Some(c);
                break;
            }
        }
        let Some(schur_chol) = chol else {
            return IpmOutcome {
                iterate: it,
                status: RawStatus::Stalled,
                iterations: iter,
                residuals: res,
            };
        };

        let rp = {
            let ax = apply_primal(scaled, &it.x);
            DVector::from_fn(m, |i, _| scaled.b[i] - ax[i])
        };
        let aty = apply_adjoint(scaled, &it.y);
        let rd: Vec<CMatrix> = (0..nb).map(|b| &scaled.c[b] - &aty[b] - &it.z[b]).collect();
        let wrdw: Vec<CMatrix> = (0..nb).map(|b| &nt[b].w * &rd[b] * &nt[b].w).collect();

        // Newton direction for a given complementarity target T:
        //   A(dX) = rp,  A*(dy) + dZ = Rd,  dX = T - W dZ W.
        let solve_direction =
            |t: &[CMatrix]| -> Option<(Vec<CMatrix>, DVector<f64>, Vec<CMatrix>)> {
                let mut rhs = DVector::<f64>::zeros(m);
                for i in 0..m {
                    let mut acc = rp[i];
                    for (b, a) in &scaled.a[i] {
                        acc += trace_product(a, &wrdw[*b]).re;
                        acc -= trace_product(a, &t[*b]).re;
                    }
                    rhs[i] = acc;
                }
                let dy = schur_chol.solve(&rhs);
                let atdy = apply_adjoint(scaled, &dy);
                let mut dz = Vec::with_capacity(nb);
                let mut dx = Vec::with_capacity(nb);
                for b in 0..nb {
                    let dzb = &rd[b] - &atdy[b];
                    let dxb = &t[b] - &nt[b].w * &dzb * &nt[b].w;
                    if dxb.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
                        return None;
                    }
                    dz.push(dzb);
                    dx.push(dxb);
                }
                Some((dx, dy, dz))
            };

        // Predictor: target -X (RHS = -D^2 in the scaled space).
        let t_aff: Vec<CMatrix> = it.x.iter().map(|x| x * C64::new(-1.0, 0.0)).collect();
        let Some((dx_a, _dy_a, dz_a)) = solve_direction(&t_aff) else {
            return IpmOutcome {
                iterate: it,
                status: RawStatus::Stalled,
                iterations: iter,
                residuals: res,
            };
        };

        let lx: Option<Vec<CMatrix>> = (0..nb)
            .map(|b| nalgebra::Cholesky::new(it.x[b].clone()).map(|c| c.l().clone_owned()))
            .collect();
        let lz: Option<Vec<CMatrix>> = (0..nb)
            .map(|b| nalgebra::Cholesky::new(it.z[b].clone()).map(|c| c.l().clone_owned()))
            .collect();
        let (Some(lx), Some(lz)) = (lx, lz) else {
            return IpmOutcome {
                iterate: it,
                status: RawStatus::Stalled,
                iterations: iter,
                residuals: res,
            };
        };
        let alpha_of = |ls: &[CMatrix], ds: &[CMatrix]| -> f64 {
            (0..nb).map(|b| step_to_boundary(&ls[b], &ds[b])).fold(f64::INFINITY, f64::min)
        };
        let ap_aff = alpha_of(&lx, &dx_a).min(1.0);
        let ad_aff = alpha_of(&lz, &dz_a).min(1.0);
        let mut mu_aff = 0.0;
        for b in 0..nb {
            let xa = &it.x[b] + &dx_a[b] * C64::new(ap_aff, 0.0);
            let za = &it.z[b] + &dz_a[b] * C64::new(ad_aff, 0.0);
            mu_aff += trace_product(&xa, &za).re;
        }
        mu_aff = (mu_aff / nu).max(0.0);
        let sigma = (mu_aff / mu).powi(3).clamp(1e-10, 1.0);

        // Combined corrector target: G (E o (sigma mu I - D^2 - H(dX^ dZ^))) G^H.
        let mut t_cc = Vec::with_capacity(nb);
        for b in 0..nb {
            let g = &nt[b].g;
            let gi = &nt[b].g_inv;
            let d = &nt[b].d;
            let dxh = gi * &dx_a[b] * gi.adjoint();
            let dzh = g.adjoint() * &dz_a[b] * g;
            let cross = hermitian_part(&(&dxh * &dzh));
            let n = scaled.dims[b];
            let mut rhs = CMatrix::zeros(n, n);
            for i in 0..n {
                for j in 0..n {
                    let mut v = -cross[(i, j)];
                    if i == j {
                        v += C64::new(sigma * mu - d[i] * d[i], 0.0);
                    }
                    rhs[(i, j)] = v * C64::new(2.0 / (d[i] + d[j]), 0.0);
                }
            }
            t_cc.push(g * rhs * g.adjoint());
        }
        let Some((dx, dy, dz)) = solve_direction(&t_cc) else {
            return IpmOutcome {
                iterate: it,
                status: RawStatus::Stalled,
                iterations: iter,
                residuals: res,
            };
        };

        let ap = (STEP_FRACTION * alpha_of(&lx, &dx)).min(1.0);
        let ad = (STEP_FRACTION * alpha_of(&lz, &dz)).min(1.0);
        if ap < 1e-10 && ad < 1e-10 {
            stall += 1;
            if stall >= 5 {
                return IpmOutcome {
                    iterate: it,
                    status: RawStatus::Stalled,
                    iterations: iter,
                    residuals: res,
                };
            }
        } else {
            stall = 0;
        }
        for b in 0..nb {
            it.x[b] += &dx[b] * C64::new(ap, 0.0);
            it.z[b] += &dz[b] * C64::new(ad, 0.0);
            // keep exact Hermitian structure against roundoff drift
            it.x[b] = hermitian_part(&it.x[b]);
            it.z[b] = hermitian_part(&it.z[b]);
        }
        it.y += &dy * ad;
    }
    let res = residuals_of(&it);
    IpmOutcome { iterate: it, status: RawStatus::MaxIter, iterations: MAX_ITER, residuals: res }
}

// ---------------------------------------------------------------------------
// Public entry points
// ---------------------------------------------------------------------------

fn run_ipm(std_form: &Standard, tol: f64) -> (IpmOutcome, Scaling) {
    let (scaled, scaling) = equilibrate(std_form);
    let outcome = ipm(&scaled, std_form, &scaling, tol);
    (outcome, scaling)
}

fn unscale_outcome(outcome: &IpmOutcome, scaling: &Scaling) -> (Vec<CMatrix>, DVector<f64>) {
    let x = outcome
        .iterate
        .x
        .iter()
        .enumerate()
        .map(|(b, m)| m * C64::new(scaling.block[b], 0.0))
        .collect();
    let y = DVector::from_fn(outcome.iterate.y.len(), |i, _| {
        outcome.iterate.y[i] * scaling.row[i] / scaling.obj
    });
    (x, y)
}

/// Phase-I margin problem for a standard form: minimize `zeta >= 0` subject
/// to `A(X) + (b - A(I)) zeta = b`; feasible iff the optimum is numerically
/// zero. `(X, zeta) = (I, 1)` is a strictly feasible start by construction.
fn phase_one(std_form: &Standard, tol: f64) -> Option<(f64, Vec<CMatrix>)> {
    let mut dims = std_form.dims.clone();
    let zeta = dims.len();
    dims.push(1);
    let mut c: Vec<CMatrix> = std_form.dims.iter().map(|&d| CMatrix::zeros(d, d)).collect();
    c.push(CMatrix::from_element(1, 1, C64::new(1.0, 0.0)));
    let a = std_form
        .a
        .iter()
        .enumerate()
        .map(|(i, terms)| {
            let a_eye: f64 = terms.iter().map(|(_, m)| m.trace().re).sum();
            let gap = std_form.b[i] - a_eye;
            let mut row = terms.clone();
            if gap != 0.0 {
                row.push((zeta, CMatrix::from_element(1, 1, C64::new(gap, 0.0))));
            }
            row
        })
        .collect();
    let p1 =
        Standard { dims, c, a, b: std_form.b.clone(), n_user_blocks: std_form.n_user_blocks };
    let (outcome, scaling) = run_ipm(&p1, tol);
    if outcome.status != RawStatus::Optimal {
        return None;
    }
    let (x, _) = unscale_outcome(&outcome, &scaling);
    let zeta_val = x[zeta][(0, 0)].re;
    Some((zeta_val, x[..std_form.n_user_blocks].to_vec()))
}

/// Solves the SDP to relative KKT accuracy `tol` (primal, dual, and gap
/// residuals simultaneously). Infeasible/unbounded verdicts for failed main
/// runs come from a phase-I margin run; persistent non-convergence is
/// reported as `NumericalFailure` after at most 200 iterations.
pub fn solve(problem: &SdpProblem, tol: f64) -> Result<SdpSolution, SdpError> {
    problem.validate()?;
    if !(1e-12..=1e-4).contains(&tol) {
        return Err(SdpError::TolOutOfRange(tol));
    }
    let std_form = standardize(problem);
    let nb_user = problem.block_dims.len();

    if std_form.b.is_empty() {
        // No constraints: X = 0 is optimal unless the objective has an
        // ascent direction.
        let ascent = problem
            .objective
            .iter()
            .any(|c| nalgebra::SymmetricEigen::new(hermitian_part(c)).eigenvalues.max() > 1e-12);
        let status = if ascent { SdpStatus::Unbounded } else { SdpStatus::Optimal };
        return Ok(SdpSolution {
            status,
            blocks: problem.block_dims.iter().map(|&d| CMatrix::zeros(d, d)).collect(),
            objective: if ascent { f64::INFINITY } else { 0.0 },
            duals: vec![],
            residuals: Residuals::default(),
            iterations: 0,
        });
    }

    let (outcome, scaling) = run_ipm(&std_form, tol);
    match outcome.status {
        RawStatus::Optimal => {
            let (x, y) = unscale_outcome(&outcome, &scaling);
            let objective: f64 =
                (0..nb_user).map(|b| trace_product(&problem.objective[b], &x[b]).re).sum();
            Ok(SdpSolution {
                status: SdpStatus::Optimal,
                blocks: x[..nb_user].to_vec(),
                objective,
                duals: y.iter().copied().collect(),
                residuals: outcome.residuals,
                iterations: outcome.iterations,
            })
        }
        raw => {
            let status = match phase_one(&std_form, tol.max(1e-9)) {
                Some((zeta, _)) if zeta > FEAS_TOL => SdpStatus::Infeasible,
                Some(_) => {
                    if raw == RawStatus::Diverged {
                        SdpStatus::Unbounded
                    } else {
                        SdpStatus::NumericalFailure
                    }
                }
                None => SdpStatus::NumericalFailure,
            };
            Ok(SdpSolution {
                status,
                blocks: problem.block_dims.iter().map(|&d| CMatrix::zeros(d, d)).collect(),
                objective: f64::NAN,
                duals: vec![f64::NAN; problem.constraints.len()],
                residuals: outcome.residuals,
                iterations: outcome.iterations,
            })
        }
    }
}

/// Phase-I feasibility check; `Feasible` carries a witness point.
pub fn check_feasible(problem: &SdpProblem) -> Result<Feasibility, SdpError> {
    problem.validate()?;
    let std_form = standardize(problem);
    if std_form.b.is_empty() {
        return Ok(Feasibility::Feasible(
            problem.block_dims.iter().map(|&d| CMatrix::zeros(d, d)).collect(),
        ));
    }
    match phase_one(&std_form, 1e-9) {
        Some((zeta, witness)) => {
            if zeta <= FEAS_TOL {
                Ok(Feasibility::Feasible(witness))
            } else {
                Ok(Feasibility::Infeasible { margin: -zeta })
            }
        }
        None => Err(SdpError::Invalid("phase-I did not converge".into())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{RngCore, SeedableRng};
    use rand_chacha::ChaCha12Rng;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn scalar(v: f64) -> CMatrix {
        CMatrix::from_element(1, 1, c(v))
    }

    fn random_hermitian(n: usize, rng: &mut ChaCha12Rng) -> CMatrix {
        let mut g = CMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                g[(i, j)] = C64::new(
                    rng.next_u64() as f64 / u64::MAX as f64 - 0.5,
                    rng.next_u64() as f64 / u64::MAX as f64 - 0.5,
                );
            }
        }
        hermitian_part(&g)
    }

    #[test]
    fn lp_as_sdp() {
        let mut p = SdpProblem::new(vec![1]);
        p.set_objective(0, scalar(1.0));
        p.add_constraint(vec![(0, scalar(1.0))], Relation::Le, 1.0);
        let sol = solve(&p, 1e-9).unwrap();
        assert_eq!(sol.status, SdpStatus::Optimal);
        assert!((sol.objective - 1.0).abs() < 1e-8);
        assert!((sol.blocks[0][(0, 0)].re - 1.0).abs() < 1e-7);
    }

    #[test]
    fn eigenvalue_maximization_diagonal() {
        let mut p = SdpProblem::new(vec![2]);
        let mut cm = CMatrix::zeros(2, 2);
        cm[(0, 0)] = c(2.0);
        cm[(1, 1)] = c(1.0);
        p.set_objective(0, cm);
        p.add_constraint(vec![(0, CMatrix::identity(2, 2))], Relation::Eq, 1.0);
        let sol = solve(&p, 1e-9).unwrap();
        assert_eq!(sol.status, SdpStatus::Optimal);
        assert!((sol.objective - 2.0).abs() < 1e-7);
        assert!((sol.blocks[0][(0, 0)].re - 1.0).abs() < 1e-6);
        assert!(sol.blocks[0][(1, 1)].re.abs() < 1e-6);
    }

    #[test]
    fn eigenvalue_maximization_random_hermitian() {
        let mut rng = ChaCha12Rng::seed_from_u64(7);
        for _ in 0..10 {
            let cm = random_hermitian(3, &mut rng);
            let lam_max = nalgebra::SymmetricEigen::new(cm.clone()).eigenvalues.max();
            let mut p = SdpProblem::new(vec![3]);
            p.set_objective(0, cm);
            p.add_constraint(vec![(0, CMatrix::identity(3, 3))], Relation::Eq, 1.0);
            let sol = solve(&p, 1e-9).unwrap();
            assert_eq!(sol.status, SdpStatus::Optimal);
            assert!(
                (sol.objective - lam_max).abs() < 1e-7 * (1.0 + lam_max.abs()),
                "got {} want {}",
                sol.objective,
                lam_max
            );
        }
    }

    #[test]
    fn kkt_residuals_within_tolerance_on_optimal_exit() {
        let mut rng = ChaCha12Rng::seed_from_u64(9);
        for _ in 0..5 {
            let cm = random_hermitian(4, &mut rng);
            let mut p = SdpProblem::new(vec![4, 1]);
            p.set_objective(0, cm);
            p.set_objective(1, scalar(-1.0));
            p.add_constraint(
                vec![(0, CMatrix::identity(4, 4)), (1, scalar(1.0))],
                Relation::Eq,
                2.0,
            );
            p.add_constraint(vec![(0, random_hermitian(4, &mut rng))], Relation::Le, 3.0);
            let sol = solve(&p, 1e-9).unwrap();
            assert_eq!(sol.status, SdpStatus::Optimal);
            assert!(sol.residuals.primal <= 1e-9);
            assert!(sol.residuals.dual <= 1e-9);
            assert!(sol.residuals.gap <= 1e-9);
        }
    }

    #[test]
    fn objective_scaling_leaves_argmax_unchanged() {
        let mut rng = ChaCha12Rng::seed_from_u64(11);
        let cm = random_hermitian(3, &mut rng);
        let tol = 1e-9;
        let mut p = SdpProblem::new(vec![3]);
        p.set_objective(0, cm.clone());
        p.add_constraint(vec![(0, CMatrix::identity(3, 3))], Relation::Eq, 1.0);
        let base = solve(&p, tol).unwrap();
        let mut p2 = SdpProblem::new(vec![3]);
        p2.set_objective(0, cm * c(37.5));
        p2.add_constraint(vec![(0, CMatrix::identity(3, 3))], Relation::Eq, 1.0);
        let scaled = solve(&p2, tol).unwrap();
        assert!((&scaled.blocks[0] - &base.blocks[0]).norm() <= 10.0 * tol.sqrt());
        assert!(
            (scaled.objective - 37.5 * base.objective).abs()
                < 1e-6 * (1.0 + scaled.objective.abs())
        );
    }

    #[test]
    fn returned_blocks_are_hermitian() {
        let mut rng = ChaCha12Rng::seed_from_u64(13);
        let cm = random_hermitian(4, &mut rng);
        let mut p = SdpProblem::new(vec![4]);
        p.set_objective(0, cm);
        p.add_constraint(vec![(0, CMatrix::identity(4, 4))], Relation::Eq, 1.0);
        let sol = solve(&p, 1e-10).unwrap();
        let x = &sol.blocks[0];
        assert!(hermitian_defect(x) <= 1e-10 * x.norm().max(1e-300));
    }

    #[test]
    fn feasibility_trivial_cases() {
        let mut p = SdpProblem::new(vec![2]);
        p.add_constraint(vec![(0, CMatrix::identity(2, 2))], Relation::Eq, 1.0);
        assert!(matches!(check_feasible(&p).unwrap(), Feasibility::Feasible(_)));

        let mut p = SdpProblem::new(vec![2]);
        p.add_constraint(vec![(0, CMatrix::identity(2, 2))], Relation::Le, -1.0);
        match check_feasible(&p).unwrap() {
            Feasibility::Infeasible { margin } => assert!(margin < -FEAS_TOL),
            other => panic!("expected infeasible, got {other:?}"),
        }
    }

    #[test]
    fn infeasible_solve_is_classified() {
        let mut p = SdpProblem::new(vec![2]);
        p.set_objective(0, CMatrix::identity(2, 2));
        p.add_constraint(vec![(0, CMatrix::identity(2, 2))], Relation::Le, -1.0);
        let sol = solve(&p, 1e-9).unwrap();
        assert_eq!(sol.status, SdpStatus::Infeasible);
    }

    #[test]
    fn unbounded_solve_is_classified() {
        // max x11 constrained only through x22: x11 grows without bound.
        let mut p = SdpProblem::new(vec![2]);
        let mut cm = CMatrix::zeros(2, 2);
        cm[(0, 0)] = c(1.0);
        p.set_objective(0, cm);
        let mut a = CMatrix::zeros(2, 2);
        a[(1, 1)] = c(1.0);
        p.add_constraint(vec![(0, a)], Relation::Le, 1.0);
        let sol = solve(&p, 1e-9).unwrap();
        assert_eq!(sol.status, SdpStatus::Unbounded);
    }

    #[test]
    fn complex_offdiagonal_objective() {
        let mut cm = CMatrix::zeros(2, 2);
        cm[(0, 1)] = C64::new(0.0, -1.0);
        cm[(1, 0)] = C64::new(0.0, 1.0);
        let lam = nalgebra::SymmetricEigen::new(cm.clone()).eigenvalues.max();
        let mut p = SdpProblem::new(vec![2]);
        p.set_objective(0, cm);
        p.add_constraint(vec![(0, CMatrix::identity(2, 2))], Relation::Eq, 1.0);
        let sol = solve(&p, 1e-10).unwrap();
        assert_eq!(sol.status, SdpStatus::Optimal);
        assert!((sol.objective - lam).abs() < 1e-8);
    }

    #[test]
    fn sdpa_dump_is_parseable_text() {
        let mut p = SdpProblem::new(vec![2, 1]);
        p.set_objective(0, CMatrix::identity(2, 2));
        p.add_constraint(vec![(0, CMatrix::identity(2, 2)), (1, scalar(2.0))], Relation::Le, 1.0);
        let dump = p.to_sdpa_sparse();
        let mut lines = dump.lines();
        assert_eq!(lines.next().unwrap(), "1 2");
        assert_eq!(lines.next().unwrap(), "2 1");
        assert_eq!(lines.next().unwrap(), "1.0");
        let entries: Vec<&str> = lines.collect();
        assert!(entries.iter().all(|l| l.split_whitespace().count() == 6));
        assert_eq!(entries.len(), 5);
    }

    #[test]
    fn validation_rejects_bad_input() {
        let mut p = SdpProblem::new(vec![2]);
        let mut a = CMatrix::zeros(2, 2);
        a[(0, 1)] = c(1.0);
        p.add_constraint(vec![(0, a)], Relation::Eq, 0.0);
        assert!(matches!(solve(&p, 1e-8), Err(SdpError::Invalid(_))));
        assert!(matches!(solve(&SdpProblem::new(vec![1]), 1e-3), Err(SdpError::TolOutOfRange(_))));
    }
}
