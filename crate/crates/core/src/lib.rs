//! Beam tracking for mmWave links with adaptive beamwidth control.
//!
//! A receiver with a large uniform linear array must keep a narrow beam
//! pointed at a moving transmitter using only pilot measurements taken
//! *through* that beam. This crate simulates the whole loop:
//!
//! * [`array`] — steering vectors, analog combining, and the two
//!   independently implemented array-gain routes;
//! * [`channel`] — random-walk channel evolution and literal antenna-domain
//!   measurement synthesis;
//! * [`tracker`] — a particle filter over the joint (gain, angle) state that
//!   also reports its own posterior angle spread;
//! * [`beamwidth`] — the `tan x = 2x` rule that converts that spread into a
//!   gain-optimal active element count;
//! * [`sim`] — closed-loop episodes, parallel Monte Carlo reduction, and
//!   plot-ready CSV export.
//!
//! The interesting feedback is between the last three: a confident tracker
//! narrows the beam (more elements, more SNR), a shaky one widens it so the
//! next measurement still illuminates the target — sacrificing peak gain to
//! avoid losing the track outright.
//!
//! # Example
//!
//! ```
//! use beamtrack_core::{run_monte_carlo, Mode, SimConfig};
//!
//! let cfg = SimConfig {
//!     runs: 8,
//!     k_steps: 20,
//!     particles: 200,
//!     ..SimConfig::default()
//! };
//! let adaptive = run_monte_carlo(&cfg)?;
//! let fixed = run_monte_carlo(&cfg.with_mode(Mode::Fixed))?;
//! assert_eq!(adaptive.rmse_per_step.len(), 20);
//! assert_eq!(fixed.runs, 8);
//! # Ok::<(), beamtrack_core::Error>(())
//! ```

pub mod array;
pub mod beamwidth;
pub mod channel;
pub mod error;
pub mod sim;
pub mod tracker;

pub use array::{
    closed_form_gain, combine, normalized_gain, receive_snr, steering_inner, steering_vector,
    ArrayConfig, SteeringAngle, SteeringVector,
};
pub use beamwidth::{ideal_m, select_beamwidth, solve_root, x_star, BeamDecision, RootConstant};
pub use channel::{
    clamp_phi, evolve_state, synthesize_measurement, ChannelState, Measurement, Pilot,
    ProcessNoise, PHI_MAX, PHI_MIN,
};
pub use error::{Error, Result};
pub use sim::{
    aggregate, aggregate_csv, correlation, episode_seed, noise_power_from_snr, run_episode,
    run_episodes, run_monte_carlo, AggregateMetrics, EpisodeTrace, Mode, SimConfig, TraceRow,
};
pub use tracker::{log_likelihood, Particle, ParticleSet, StepOutcome, TrackerEstimate};
