//! Thin command-line front end over the experiment harness.
//!
//! Exit codes: 0 on success, 2 on configuration errors, 3 on solver hard
//! failures.

use clap::{Parser, Subcommand};
use secure_isac::experiment::{
    self, builtin_scenario_config, ExperimentConfig, ExperimentError, MethodName,
};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "isac", about = "Secure ISAC beamforming experiments", version)]
struct Cli {
    /// JSON experiment configuration; the builtin evaluation scenario when
    /// omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory for result files.
    #[arg(long, global = true, default_value = "results")]
    out: PathBuf,
    /// Replace the configured seed list with 1..=N.
    #[arg(long, global = true)]
    seed_count: Option<usize>,
    /// Comma-separated method subset (optimal,sub1,sub2,upper_bound).
    #[arg(long, global = true)]
    method: Option<String>,
    /// Worker threads for sweep parallelism.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the configured sweep and write results.csv / aggregate.csv.
    Run,
    /// Sweep the prior variance and tabulate exact/upper/approximate PCRB.
    PcrbSweep,
    /// Transmit beampattern of the optimal design at one PCRB threshold.
    Beampattern {
        /// PCRB threshold; defaults to the configured operating point.
        #[arg(long)]
        gamma_pcrb: Option<f64>,
    },
    /// Secrecy objective versus the eavesdropper-SINR threshold.
    GammaCurve,
    /// Feasibility verdict for a PCRB threshold.
    Feasibility {
        #[arg(long)]
        gamma_pcrb: Option<f64>,
    },
}

fn load(cli: &Cli) -> Result<ExperimentConfig, ExperimentError> {
    let mut cfg = match &cli.config {
        Some(path) => experiment::load_config(path)?,
        None => builtin_scenario_config(),
    };
    if let Some(n) = cli.seed_count {
        if n == 0 {
            return Err(ExperimentError::Config("--seed-count must be positive".into()));
        }
        cfg.seeds = (1..=n as u64).collect();
    }
    if let Some(spec) = &cli.method {
        cfg.methods = MethodName::parse_list(spec)?;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let cfg = match load(&cli) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("isac: {e}");
            return ExitCode::from(2);
        }
    };
    let outcome = match cli.command {
        Command::Run => experiment::run(&cfg, &cli.out).map(|summary| {
            for f in &summary.files {
                println!("wrote {}", f.display());
            }
            println!("{} rows, {} hard failures", summary.rows, summary.hard_failures);
            summary.hard_failures == 0
        }),
        Command::PcrbSweep => experiment::pcrb_sweep(&cfg, &cli.out).map(|p| {
            println!("wrote {}", p.display());
            true
        }),
        Command::Beampattern { gamma_pcrb } => {
            let g = gamma_pcrb.unwrap_or(cfg.gamma_pcrb);
            experiment::beampattern_run(&cfg, g, &cli.out).map(|p| {
                println!("wrote {}", p.display());
                true
            })
        }
        Command::GammaCurve => experiment::gamma_curve(&cfg, &cli.out).map(|p| {
            println!("wrote {}", p.display());
            true
        }),
        Command::Feasibility { gamma_pcrb } => {
            let g = gamma_pcrb.unwrap_or(cfg.gamma_pcrb);
            experiment::feasibility_run(&cfg, g).map(|report| {
                let verdict = if report.feasible { "feasible" } else { "infeasible" };
                println!(
                    "gamma_pcrb = {:e}: {verdict} (xi = {:.6e}{})",
                    report.gamma_pcrb,
                    report.xi,
                    report
                        .witness_pcrb
                        .map(|p| format!(", witness PCRB = {p:.6e}"))
                        .unwrap_or_default()
                );
                true
            })
        }
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(3),
        Err(ExperimentError::Config(_)) | Err(ExperimentError::Parse { .. }) => ExitCode::from(2),
        Err(e) => {
            eprintln!("isac: {e}");
            match e {
                ExperimentError::Optimizer(_) => ExitCode::from(3),
                _ => ExitCode::from(1),
            }
        }
    }
}
