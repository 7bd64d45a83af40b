//! End-to-end run of the optimal secure-ISAC design on the builtin
//! evaluation scenario: one channel realization, one PCRB threshold.
//!
//! ```bash
//! cargo run --release -p secure-isac --example quickstart
//! ```

use secure_isac::experiment::builtin_scenario_config;
use secure_isac::metrics;
use secure_isac::optimizer::{optimize_optimal, GammaSearchConfig};
use secure_isac::pcrb::{compute_sensing_matrices, QuadratureConfig};

fn main() {
    let cfg = builtin_scenario_config();
    let scenario = cfg.scenario.build(1).expect("valid scenario");
    let matrices =
        compute_sensing_matrices(&scenario, &QuadratureConfig::default()).expect("quadrature");
    let gamma_pcrb = 3e-5;

    let result = optimize_optimal(&scenario, &matrices, gamma_pcrb, &GammaSearchConfig::default())
        .expect("feasible threshold");

    println!("PCRB threshold          : {gamma_pcrb:.1e} rad^2");
    println!("achieved PCRB           : {:.4e} rad^2", result.achieved_pcrb);
    println!("worst-case secrecy rate : {:.4} bits/s/Hz", result.worst_secrecy_rate);
    println!("optimal SINR threshold  : {:.4e}", result.gamma_star.unwrap());
    println!("info-beam power         : {:.2} mW", result.beams.info_beam.norm_squared());
    let an_power: f64 = result.beams.an_beams.iter().map(|v| v.norm_squared()).sum();
    println!("AN power                : {:.2} mW across {} beams", an_power, result.beams.an_beams.len());

    let rates = metrics::secrecy_rate(&result.beams, &scenario);
    println!("\nper-location secrecy rates:");
    for (k, (theta, rate)) in scenario.angles.iter().zip(&rates.per_location).enumerate() {
        let eve = metrics::sinr_eve(&result.beams, k, &scenario).unwrap();
        println!("  theta_{} = {:+.2} rad  p = {:.1}  rate = {:.4}  eavesdropper SINR = {:.3e}",
            k + 1, theta, scenario.probs[k], rate, eve);
    }
}
