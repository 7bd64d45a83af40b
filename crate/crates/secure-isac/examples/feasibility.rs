//! Locating the smallest reachable PCRB threshold by bisection on the
//! covariance-level feasibility problem.
//!
//! ```bash
//! cargo run --release -p secure-isac --example feasibility
//! ```

use secure_isac::experiment::builtin_scenario_config;
use secure_isac::optimizer::{check_feasibility_p1, FeasibilityP1};
use secure_isac::pcrb::{compute_sensing_matrices, pcrb_exact, xi_threshold, QuadratureConfig};

fn main() {
    let cfg = builtin_scenario_config();
    let scenario = cfg.scenario.build(1).unwrap();
    let matrices = compute_sensing_matrices(&scenario, &QuadratureConfig::default()).unwrap();

    println!("{:>10} {:>14} {:>11}", "Gamma", "xi", "verdict");
    for gamma in [1e-5, 2e-5, 3e-5, 1e-4, 1e-3] {
        let xi = xi_threshold(gamma, &matrices, &scenario);
        let verdict = match check_feasibility_p1(&scenario, &matrices, gamma).unwrap() {
            FeasibilityP1::Feasible(r) => {
                format!("feasible (witness PCRB {:.3e})", pcrb_exact(&r, &matrices, &scenario))
            }
            FeasibilityP1::Infeasible => "infeasible".into(),
        };
        println!("{gamma:>10.0e} {xi:>14.4e} {verdict}");
    }

    // Bisect the feasibility boundary.
    let mut lo: f64 = 1e-5;
    let mut hi: f64 = 3e-5;
    for _ in 0..40 {
        let mid = (lo * hi).sqrt();
        match check_feasibility_p1(&scenario, &matrices, mid).unwrap() {
            FeasibilityP1::Feasible(_) => hi = mid,
            FeasibilityP1::Infeasible => lo = mid,
        }
    }
    println!("\nsmallest reachable PCRB threshold ~= {hi:.5e} rad^2");
}
