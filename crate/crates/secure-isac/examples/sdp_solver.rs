//! The standalone Hermitian block-SDP solver on small instances: an
//! eigenvalue problem, an infeasible system, and the SDPA-style dump.
//!
//! ```bash
//! cargo run --release -p secure-isac --example sdp_solver
//! ```

use secure_isac::sdp::{check_feasible, solve, Feasibility, Relation, SdpProblem};
use secure_isac::{C64, CMatrix};

fn main() {
    // max Re tr(C X) s.t. tr(X) = 1, X >= 0 equals the top eigenvalue of C.
    let mut c = CMatrix::zeros(3, 3);
    c[(0, 0)] = C64::new(1.0, 0.0);
    c[(1, 1)] = C64::new(-0.5, 0.0);
    c[(0, 2)] = C64::new(0.3, 0.7);
    c[(2, 0)] = C64::new(0.3, -0.7);
    let lam_max = nalgebra::SymmetricEigen::new(c.clone()).eigenvalues.max();

    let mut p = SdpProblem::new(vec![3]);
    p.set_objective(0, c);
    p.add_constraint(vec![(0, CMatrix::identity(3, 3))], Relation::Eq, 1.0);
    let sol = solve(&p, 1e-10).unwrap();
    println!("eigenvalue maximization:");
    println!("  status     : {}", sol.status);
    println!("  objective  : {:.10}  (lambda_max = {lam_max:.10})", sol.objective);
    println!(
        "  residuals  : primal {:.1e}, dual {:.1e}, gap {:.1e} in {} iterations",
        sol.residuals.primal, sol.residuals.dual, sol.residuals.gap, sol.iterations
    );

    // Feasibility via the phase-I margin problem.
    let mut q = SdpProblem::new(vec![2]);
    q.add_constraint(vec![(0, CMatrix::identity(2, 2))], Relation::Le, -1.0);
    match check_feasible(&q).unwrap() {
        Feasibility::Infeasible { margin } => {
            println!("\ntrace(X) <= -1 with X >= 0: infeasible (margin {margin:.3e})")
        }
        Feasibility::Feasible(_) => unreachable!(),
    }

    println!("\nSDPA-style dump of the eigenvalue instance:");
    print!("{}", p.to_sdpa_sparse());
}
