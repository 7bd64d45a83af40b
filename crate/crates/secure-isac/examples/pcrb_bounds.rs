//! Exact PCRB versus its upper bound and the closed-form approximation over
//! the prior variance, with the full-power isotropic transmit covariance.
//!
//! ```bash
//! cargo run --release -p secure-isac --example pcrb_bounds
//! ```

use secure_isac::experiment::builtin_scenario_config;
use secure_isac::pcrb::{
    compute_sensing_matrices, pcrb_approx, pcrb_exact, pcrb_upper, QuadratureConfig,
};
use secure_isac::{C64, CMatrix};

fn main() {
    let cfg = builtin_scenario_config();
    println!("{:>12} {:>13} {:>13} {:>13} {:>9}", "sigma^2", "exact", "upper", "approx", "gap%");
    let points = 13;
    for i in 0..points {
        let t = i as f64 / (points - 1) as f64;
        let sigma_sq = (1e-6f64.ln() + t * (1e-3f64.ln() - 1e-6f64.ln())).exp();
        let mut template = cfg.scenario.clone();
        template.sigma_theta_sq = sigma_sq;
        let sc = template.build(1).unwrap();
        let m = compute_sensing_matrices(&sc, &QuadratureConfig::default()).unwrap();
        let iso = CMatrix::identity(sc.n_tx, sc.n_tx)
            * C64::new(sc.power_budget / sc.n_tx as f64, 0.0);
        let exact = pcrb_exact(&iso, &m, &sc);
        let upper = pcrb_upper(&iso, &m, &sc);
        let approx = pcrb_approx(&iso, &m, &sc);
        println!(
            "{sigma_sq:>12.3e} {exact:>13.5e} {upper:>13.5e} {approx:>13.5e} {:>8.2}%",
            100.0 * (approx - upper).abs() / upper
        );
        assert!(exact <= upper + 1e-12);
    }
    println!("\nexact <= upper holds at every point; the approximation tracks the bound.");
}
