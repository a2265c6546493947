//! Shared fixtures for the criterion benches: small-but-representative
//! configurations so a bench run finishes in seconds while still exercising
//! the real hot paths.

use beamtrack_core::{ChannelState, Mode, ProcessNoise, SimConfig, SteeringAngle};

/// The default experiment shrunk to bench scale: full-size array and
/// particle population, short horizon, few episodes.
pub fn bench_config() -> SimConfig {
    SimConfig {
        runs: 4,
        k_steps: 10,
        ..SimConfig::default()
    }
}

/// Same scale, fixed-beamwidth baseline.
pub fn bench_config_fixed() -> SimConfig {
    bench_config().with_mode(Mode::Fixed)
}

/// A state slightly off broadside, so gain evaluations don't sit on the
/// pattern peak.
pub fn offset_state() -> ChannelState {
    ChannelState::new(
        0.7,
        0.1,
        SteeringAngle::from_degrees(88.0).expect("within range"),
    )
}

/// Table-scale process noise.
pub fn default_noise() -> ProcessNoise {
    ProcessNoise::new(0.1, 0.1, 1f64.to_radians()).expect("nonnegative")
}
