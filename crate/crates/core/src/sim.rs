//! Episode orchestration, Monte Carlo aggregation, and plot-ready CSV export.
//!
//! One *episode* is a closed tracking loop over `k_steps` pilot slots: the
//! truth random-walks, a measurement is synthesized through the beam chosen
//! in the previous slot, the particle filter updates, and the beamwidth
//! controller picks the next active element count (adaptive mode) or keeps
//! the whole array (fixed mode — the baseline the adaptive controller is
//! judged against, identical in every other respect).
//!
//! A *Monte Carlo run* repeats the episode over independently seeded
//! channels and reduces per-step errors across episodes. Episodes run in
//! parallel; each one derives its own counter-based seed from the master
//! seed, and results are collected in episode order, so the aggregate is
//! byte-for-byte reproducible regardless of thread schedule.
//!
//! Angles are radians internally and degrees in every exported artifact.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::fmt::Write as _;
use std::str::FromStr;

use crate::array::{receive_snr, ArrayConfig, SteeringAngle};
use crate::beamwidth::select_beamwidth;
use crate::channel::{evolve_state, synthesize_measurement, ChannelState, Pilot, ProcessNoise};
use crate::error::{Error, Result};
use crate::tracker::ParticleSet;

/// Floor applied to a linear SNR before conversion to dB, so a perfectly
/// nulled beam exports a very negative number instead of `-inf`.
const SNR_DB_FLOOR: f64 = 1e-300;

/// Whether the element count reacts to the tracker's confidence or stays at
/// the full array.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// Choose `m_k` each slot from the posterior angle spread.
    Adaptive,
    /// Always use all `m0` elements (the comparison baseline).
    Fixed,
}

impl Mode {
    /// Lowercase name, used in file names and config values.
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Adaptive => "adaptive",
            Mode::Fixed => "fixed",
        }
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if t.eq_ignore_ascii_case("adaptive") {
            Ok(Mode::Adaptive)
        } else if t.eq_ignore_ascii_case("fixed") {
            Ok(Mode::Fixed)
        } else {
            Err(Error::InvalidConfig(format!(
                "mode must be 'adaptive' or 'fixed', got '{s}'"
            )))
        }
    }
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Everything an experiment needs: geometry, population sizes, horizons,
/// channel statistics, seeding, and mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    /// Hardware element budget `m0`.
    pub array: ArrayConfig,
    /// Particle population size `s`.
    pub particles: usize,
    /// Pilot symbols per slot `d`.
    pub pilot_len: usize,
    /// Slots per episode.
    pub k_steps: usize,
    /// Independent Monte Carlo episodes.
    pub runs: usize,
    /// Initial channel state; the filter initializes around it too.
    pub x0: ChannelState,
    /// Per-slot random-walk deviations of the channel (shared by the filter).
    pub process_noise: ProcessNoise,
    /// Receive SNR in dB at the aligned, full-array initial slot; fixes the
    /// per-element noise power for the whole experiment.
    pub snr0_db: f64,
    /// Master seed; every episode derives its own stream from it.
    pub seed: u64,
    /// Beamwidth control mode.
    pub mode: Mode,
}

impl Default for SimConfig {
    /// The experiment the rest of the crate is calibrated against: a
    /// 64-element array, 1000 particles, 5-symbol pilots, gain deviations of
    /// 0.1 per component, 1 degree of angle deviation per slot, 20 dB initial
    /// SNR, path gain `(1+j)/sqrt(2)` arriving broadside, 100 slots, and
    /// 1000 episodes.
    fn default() -> Self {
        let r = 1.0 / 2f64.sqrt();
        Self {
            array: ArrayConfig::new(64).expect("64 > 0"),
            particles: 1000,
            pilot_len: 5,
            k_steps: 100,
            runs: 1000,
            x0: ChannelState::new(
                r,
                r,
                SteeringAngle::from_degrees(90.0).expect("90 deg is physical"),
            ),
            process_noise: ProcessNoise::new(0.1, 0.1, 1f64.to_radians())
                .expect("positive deviations"),
            snr0_db: 20.0,
            seed: 42,
            mode: Mode::Adaptive,
        }
    }
}

impl SimConfig {
    /// Checks every cross-field requirement that the type system can't.
    pub fn validate(&self) -> Result<()> {
        if self.particles == 0 {
            return Err(Error::InvalidConfig("s (particles) must be >= 1".into()));
        }
        if self.pilot_len == 0 {
            return Err(Error::InvalidConfig("d (pilot length) must be >= 1".into()));
        }
        if self.k_steps == 0 {
            return Err(Error::InvalidConfig("k_steps must be >= 1".into()));
        }
        if self.runs == 0 {
            return Err(Error::InvalidConfig("runs must be >= 1".into()));
        }
        if !self.snr0_db.is_finite() {
            return Err(Error::InvalidConfig("snr0_db must be finite".into()));
        }
        if self.x0.alpha().norm_sqr() <= 0.0 {
            return Err(Error::InvalidConfig(
                "initial path gain must be nonzero (it anchors the SNR definition)".into(),
            ));
        }
        Ok(())
    }

    /// The same experiment in a different control mode.
    pub fn with_mode(mut self, mode: Mode) -> Self {
        self.mode = mode;
        self
    }
}

/// One slot of one episode, as exported to trace CSVs. Angles in radians;
/// `snr` linear.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRow {
    /// Slot index, 1-based.
    pub k: usize,
    /// True angle of arrival.
    pub phi_true: f64,
    /// Tracker's angle estimate after this slot's update.
    pub phi_hat: f64,
    /// Posterior RMS angle spread reported by the tracker.
    pub e_k: f64,
    /// Elements activated for the next slot by this slot's decision.
    pub m_k: usize,
    /// Receive SNR of the post-decision beam against the current truth.
    pub snr: f64,
    /// `|phi_true - phi_hat|`.
    pub abs_err: f64,
}

/// A full episode's trace, one row per slot.
#[derive(Debug, Clone, PartialEq)]
pub struct EpisodeTrace {
    /// Rows in slot order, `k = 1..=k_steps`.
    pub rows: Vec<TraceRow>,
}

fn db(linear: f64) -> f64 {
    10.0 * linear.max(SNR_DB_FLOOR).log10()
}

impl EpisodeTrace {
    /// Renders the trace as CSV with header
    /// `k,phi_true_deg,phi_hat_deg,e_k_deg,m_k,snr_db,abs_err_deg`,
    /// angles in degrees at six decimal places.
    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(64 * (self.rows.len() + 1));
        out.push_str("k,phi_true_deg,phi_hat_deg,e_k_deg,m_k,snr_db,abs_err_deg\n");
        for r in &self.rows {
            writeln!(
                out,
                "{},{:.6},{:.6},{:.6},{},{:.6},{:.6}",
                r.k,
                r.phi_true.to_degrees(),
                r.phi_hat.to_degrees(),
                r.e_k.to_degrees(),
                r.m_k,
                db(r.snr),
                r.abs_err.to_degrees(),
            )
            .expect("writing to a String cannot fail");
        }
        out
    }
}

/// Cross-episode reductions, one entry per slot.
#[derive(Debug, Clone, PartialEq)]
pub struct AggregateMetrics {
    /// Root-mean-square angle error across episodes, radians, per slot.
    pub rmse_per_step: Vec<f64>,
    /// Mean active element count across episodes, per slot.
    pub mean_m_per_step: Vec<f64>,
    /// Mean linear receive SNR across episodes, per slot.
    pub mean_snr_per_step: Vec<f64>,
    /// Pearson correlation between the tracker's error proxy and the actual
    /// absolute error, pooled over every (episode, slot) pair. NaN when the
    /// pool is degenerate (e.g. a noiseless run where both are constant).
    pub pearson_e_vs_abs_err: f64,
    /// Episodes reduced into these metrics.
    pub runs: usize,
}

impl AggregateMetrics {
    /// Mean of `rmse_per_step` over the horizon, radians — the single number
    /// used to compare control modes.
    pub fn time_averaged_rmse(&self) -> f64 {
        self.rmse_per_step.iter().sum::<f64>() / self.rmse_per_step.len() as f64
    }
}

/// Per-element noise power `n0` that realizes `snr0_db` at the aligned,
/// full-array initial slot: `n0 = m0 |alpha0|^2 / 10^(snr0_db/10)`.
///
/// Round-trips exactly through [`receive_snr`] at alignment.
pub fn noise_power_from_snr(snr0_db: f64, alpha0: Complex64, m0: usize) -> Result<f64> {
    if m0 == 0 {
        return Err(Error::ZeroAntennas);
    }
    Ok(m0 as f64 * alpha0.norm_sqr() / 10f64.powf(snr0_db / 10.0))
}

/// Derives episode `index`'s seed from the master seed with a SplitMix64
/// finalizer, so consecutive indices land on statistically unrelated streams
/// and any episode can be reproduced on its own.
pub fn episode_seed(master: u64, index: u64) -> u64 {
    // SplitMix64 stream seeded at `master`, element `index`: advance first,
    // then finalize, so (0, 0) does not collapse to the fixed point at zero.
    let mut z = master.wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Runs one closed-loop episode on the given random stream.
///
/// The first slot's measurement is taken through the acquisition beam: the
/// full array pointed at the initial estimate. From then on each slot uses
/// the previous slot's `(phi_hat, m)` decision, exactly as the receiver
/// would. Tracking divergence is never an error — the trace just records
/// large misses.
pub fn run_episode(cfg: &SimConfig, rng: &mut impl Rng) -> Result<EpisodeTrace> {
    cfg.validate()?;
    let m0 = cfg.array.total_elements();
    let n0 = noise_power_from_snr(cfg.snr0_db, cfg.x0.alpha(), m0)?;
    let pilot = Pilot::constant(cfg.pilot_len)?;

    let mut truth = cfg.x0;
    let mut filter = ParticleSet::init_gaussian(&cfg.x0, cfg.particles, &cfg.process_noise, rng)?;
    let mut phi_hat = cfg.x0.phi;
    let mut m_active = m0;

    let mut rows = Vec::with_capacity(cfg.k_steps);
    for k in 1..=cfg.k_steps {
        truth = evolve_state(&truth, &cfg.process_noise, rng);
        let z = synthesize_measurement(&truth, phi_hat, m_active, &pilot, n0, &[], rng)?;
        let outcome = filter.step(&z, &pilot, n0, &cfg.process_noise, rng)?;
        let est = outcome.estimate;
        phi_hat = est.state_hat.phi;
        m_active = match cfg.mode {
            Mode::Adaptive => select_beamwidth(phi_hat, est.aoa_rmse, m0)?.m_k,
            Mode::Fixed => m0,
        };
        let snr = receive_snr(truth.alpha(), n0, phi_hat, truth.phi, m_active)?;
        rows.push(TraceRow {
            k,
            phi_true: truth.phi.radians(),
            phi_hat: phi_hat.radians(),
            e_k: est.aoa_rmse,
            m_k: m_active,
            snr,
            abs_err: (truth.phi.radians() - phi_hat.radians()).abs(),
        });
    }
    Ok(EpisodeTrace { rows })
}

/// Runs all configured episodes in parallel, each on its own derived seed,
/// and returns them in episode order (so downstream artifacts are
/// schedule-independent).
pub fn run_episodes(cfg: &SimConfig) -> Result<Vec<EpisodeTrace>> {
    cfg.validate()?;
    (0..cfg.runs)
        .into_par_iter()
        .map(|run| {
            let mut rng = ChaCha8Rng::seed_from_u64(episode_seed(cfg.seed, run as u64));
            run_episode(cfg, &mut rng)
        })
        .collect()
}

/// Pearson correlation between the tracker's error proxy `e_k` and the true
/// absolute angle error, pooled over every slot of every trace.
///
/// Errors when fewer than two points are pooled or either pooled signal has
/// zero variance.
pub fn correlation(traces: &[EpisodeTrace]) -> Result<f64> {
    let mut n = 0usize;
    let (mut sum_x, mut sum_y) = (0.0, 0.0);
    for t in traces {
        for r in &t.rows {
            sum_x += r.e_k;
            sum_y += r.abs_err;
            n += 1;
        }
    }
    if n < 2 {
        return Err(Error::DegenerateStatistics(
            "correlation needs at least two pooled points",
        ));
    }
    let (mean_x, mean_y) = (sum_x / n as f64, sum_y / n as f64);
    let (mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0);
    for t in traces {
        for r in &t.rows {
            let dx = r.e_k - mean_x;
            let dy = r.abs_err - mean_y;
            sxx += dx * dx;
            syy += dy * dy;
            sxy += dx * dy;
        }
    }
    if sxx <= 0.0 || syy <= 0.0 {
        return Err(Error::DegenerateStatistics(
            "correlation undefined for a zero-variance signal",
        ));
    }
    Ok((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

/// Reduces an ensemble of equal-length traces into per-step metrics.
///
/// The pooled correlation is stored as NaN when degenerate (constant
/// signals), rather than failing the whole reduction.
pub fn aggregate(traces: &[EpisodeTrace]) -> Result<AggregateMetrics> {
    let Some(first) = traces.first() else {
        return Err(Error::DegenerateStatistics("no episodes to aggregate"));
    };
    let k_steps = first.rows.len();
    for t in traces {
        if t.rows.len() != k_steps {
            return Err(Error::DimensionMismatch {
                expected: k_steps,
                got: t.rows.len(),
            });
        }
    }
    let runs = traces.len() as f64;
    let mut rmse = Vec::with_capacity(k_steps);
    let mut mean_m = Vec::with_capacity(k_steps);
    let mut mean_snr = Vec::with_capacity(k_steps);
    for k in 0..k_steps {
        let (mut se, mut ms, mut sn) = (0.0, 0.0, 0.0);
        for t in traces {
            let r = &t.rows[k];
            se += r.abs_err * r.abs_err;
            ms += r.m_k as f64;
            sn += r.snr;
        }
        rmse.push((se / runs).sqrt());
        mean_m.push(ms / runs);
        mean_snr.push(sn / runs);
    }
    let pearson = correlation(traces).unwrap_or(f64::NAN);
    Ok(AggregateMetrics {
        rmse_per_step: rmse,
        mean_m_per_step: mean_m,
        mean_snr_per_step: mean_snr,
        pearson_e_vs_abs_err: pearson,
        runs: traces.len(),
    })
}

/// Full Monte Carlo experiment: parallel episodes plus reduction.
pub fn run_monte_carlo(cfg: &SimConfig) -> Result<AggregateMetrics> {
    aggregate(&run_episodes(cfg)?)
}

/// Renders the adaptive-vs-fixed comparison as CSV with header
/// `k,rmse_deg_adaptive,rmse_deg_fixed,mean_m,mean_snr_db`.
///
/// The `mean_m` and `mean_snr_db` columns describe the *adaptive* run (in
/// fixed mode they are constant by construction); SNR is the dB value of the
/// mean linear SNR.
pub fn aggregate_csv(adaptive: &AggregateMetrics, fixed: &AggregateMetrics) -> Result<String> {
    if adaptive.rmse_per_step.len() != fixed.rmse_per_step.len() {
        return Err(Error::DimensionMismatch {
            expected: adaptive.rmse_per_step.len(),
            got: fixed.rmse_per_step.len(),
        });
    }
    let mut out = String::with_capacity(48 * (adaptive.rmse_per_step.len() + 1));
    out.push_str("k,rmse_deg_adaptive,rmse_deg_fixed,mean_m,mean_snr_db\n");
    for k in 0..adaptive.rmse_per_step.len() {
        writeln!(
            out,
            "{},{:.6},{:.6},{:.6},{:.6}",
            k + 1,
            adaptive.rmse_per_step[k].to_degrees(),
            fixed.rmse_per_step[k].to_degrees(),
            adaptive.mean_m_per_step[k],
            db(adaptive.mean_snr_per_step[k]),
        )
        .expect("writing to a String cannot fail");
    }
    Ok(out)
}
