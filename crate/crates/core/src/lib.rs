//! Monte Carlo sampling of harmonic measure, the exit distribution of
//! Brownian motion from a bounded domain.
//!
//! Three independent samplers draw from the same law:
//!
//! * [`brownian`]: a discretised Brownian path with boundary interpolation,
//! * [`wos`]: walk-on-spheres, free of any timestep,
//! * [`ball_exact`]: rejection sampling from the closed-form Poisson kernel
//!   of a ball.
//!
//! [`stats`] turns exit samples into mean/trace estimates with standard
//! errors and compares them against the closed forms (mean `θ` on any
//! domain, trace `r² − ‖θ − c‖²` on balls). [`privacy`] applies them to a
//! sample-mean attack on a cloaked start location.

pub mod ball_exact;
pub mod brownian;
pub mod cli;
pub mod error;
pub mod geometry;
pub mod privacy;
pub mod report;
pub mod sampler;
pub mod sampling;
pub mod stats;
pub mod wos;

pub use ball_exact::{
    expected_exit_time, kernel_normalization, poisson_kernel, sample_exact, theoretical_mean,
    theoretical_trace, KernelQuery,
};
pub use brownian::{simulate_exit, BrownianConfig, Overshoot};
pub use error::{Error, Result};
pub use geometry::{Ball, BoxDomain, Domain, Point};
pub use privacy::{privacy_curve, run_attack, CloakScenario, PrivacyReport};
pub use sampler::{sample_batch, ExitSample, Method, SamplerSettings};
pub use sampling::{gaussian_vector, uniform_on_sphere, RngStream};
pub use stats::{compare, reproduce_table1, summarize, ComparisonRow, SummaryStats, Verdict};
pub use wos::{hop_count_profile, wos_exit, WosConfig};
