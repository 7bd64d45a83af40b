//! Secure integrated sensing and communication (ISAC) beamforming with a
//! discrete prior on the target (eavesdropper) location.
//!
//! A multi-antenna base station serves one single-antenna user while sensing
//! the angle of a target that may eavesdrop. The target angle is random with
//! a known probability mass function over `K` candidate locations. This crate
//! provides:
//!
//! - the physical model (steering vectors, channels, Gaussian-mixture prior)
//!   in [`model`],
//! - posterior Cramér-Rao bounds (exact, upper bound, closed-form
//!   approximation) for angle estimation in [`pcrb`],
//! - a self-contained primal-dual interior-point solver for small Hermitian
//!   block SDPs in [`sdp`],
//! - the beamforming designs in [`optimizer`]: a two-stage globally optimal
//!   method (SDR with a tight rank-one reduction plus a one-dimensional
//!   search over the eavesdropper-SINR threshold) and two lower-complexity
//!   null-space designs,
//! - communication/sensing figures of merit (SINRs, worst-case secrecy rate,
//!   beampatterns) in [`metrics`],
//! - a reproducible experiment harness with JSON configs and CSV output in
//!   [`experiment`], also exposed through the thin `isac` binary.
//!
//! # Quick start
//!
//! ```
//! use secure_isac::{experiment, model, optimizer, pcrb};
//!
//! let scenario = experiment::builtin_scenario_config()
//!     .scenario
//!     .build(7)
//!     .unwrap();
//! let quad = pcrb::QuadratureConfig::default();
//! let matrices = pcrb::compute_sensing_matrices(&scenario, &quad).unwrap();
//! let search = optimizer::GammaSearchConfig::default();
//! let result =
//!     optimizer::optimize_optimal(&scenario, &matrices, 7e-5, &search).unwrap();
//! assert!(result.worst_secrecy_rate > 0.0);
//! assert!(result.achieved_pcrb <= 7e-5 * (1.0 + 1e-6));
//! ```
//!
//! # Runnable examples
//!
//! One example per major capability, under `examples/`:
//!
//! - **`quickstart`** - end-to-end optimal design on the builtin scenario
//! - **`pcrb_bounds`** - exact PCRB vs. upper bound vs. closed-form
//!   approximation across prior variances
//! - **`gamma_curve`** - secrecy-rate objective vs. the eavesdropper SINR
//!   threshold for several PCRB constraints
//! - **`beampattern`** - transmit beampattern of the optimal design over the
//!   prior
//! - **`method_comparison`** - optimal vs. the two null-space designs vs. the
//!   no-sensing upper bound across PCRB thresholds
//! - **`power_gain`** - secrecy rate vs. transmit power for all methods
//! - **`feasibility`** - locating the smallest reachable PCRB threshold
//! - **`sdp_solver`** - the standalone SDP solver on small instances
//!
//! ```bash
//! cargo run --release -p secure-isac --example quickstart
//! ```
//!
//! # Units
//!
//! All powers are carried internally in linear milliwatts and all gains in
//! linear scale; JSON configuration accepts dBm/dB and converts at the
//! boundary. Angles are radians throughout.

// `!(x > 0.0)` style guards are deliberate: unlike `x <= 0.0` they also
// catch NaN. Constructor arity mirrors the domain types; index loops run
// over multiple matched arrays.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![allow(clippy::too_many_arguments)]
#![allow(clippy::needless_range_loop)]

pub mod experiment;
mod la;
pub mod metrics;
pub mod model;
pub mod optimizer;
pub mod pcrb;
pub mod sdp;

pub use nalgebra::Complex;

/// Complex scalar used throughout the crate.
pub type C64 = nalgebra::Complex<f64>;
/// Dynamically sized complex matrix.
pub type CMatrix = nalgebra::DMatrix<C64>;
/// Dynamically sized complex vector.
pub type CVector = nalgebra::DVector<C64>;
