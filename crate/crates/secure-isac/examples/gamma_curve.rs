//! Secrecy objective log2((1+f(gamma))/(1+gamma)) versus the eavesdropper
//! SINR threshold, for several PCRB constraints. Shows the interior optimum
//! moving left as the sensing constraint loosens.
//!
//! ```bash
//! cargo run --release -p secure-isac --example gamma_curve
//! ```

use secure_isac::experiment::builtin_scenario_config;
use secure_isac::optimizer::{optimize_optimal, GammaSearchConfig};
use secure_isac::pcrb::{compute_sensing_matrices, QuadratureConfig};

fn main() {
    let cfg = builtin_scenario_config();
    let scenario = cfg.scenario.build(1).unwrap();
    let matrices = compute_sensing_matrices(&scenario, &QuadratureConfig::default()).unwrap();
    let search = GammaSearchConfig { grid_points: 40, ..Default::default() };

    for gamma_pcrb in [3e-5, 7e-5, 2e-4] {
        let result = optimize_optimal(&scenario, &matrices, gamma_pcrb, &search).unwrap();
        println!("PCRB threshold {gamma_pcrb:.0e}:");
        println!("  gamma* = {:.4e}, rate = {:.4} bits/s/Hz", result.gamma_star.unwrap(), result.worst_secrecy_rate);
        println!("  {:>12} {:>12} {:>10}", "gamma", "f(gamma)", "bits");
        for p in result.diagnostics.gamma_curve.iter().step_by(4) {
            if p.objective_bits.is_finite() {
                println!("  {:>12.3e} {:>12.4e} {:>10.4}", p.gamma, p.f_gamma, p.objective_bits);
            }
        }
        println!();
    }
}
