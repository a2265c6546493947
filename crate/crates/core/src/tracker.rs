//! Particle-filter tracking of the channel state from combined pilot
//! measurements.
//!
//! The filter keeps `s` weighted hypotheses over the joint state (complex
//! path gain plus angle of arrival). Each slot it:
//!
//! 1. **propagates** every particle through the same random-walk model the
//!    channel itself follows,
//! 2. **reweights** against the new measurement via a Gaussian residual
//!    likelihood evaluated in the log domain (max-subtracted, so slots where
//!    every hypothesis is terrible still normalize cleanly),
//! 3. **estimates** the state as the weighted posterior mean, alongside the
//!    posterior spread of the angle — the error proxy the beamwidth
//!    controller runs on, and
//! 4. **resamples** systematically back to uniform weights.
//!
//! The estimate is taken *before* resampling: resampling only adds variance,
//! it never sharpens the posterior.
//!
//! # Example
//!
//! ```
//! use beamtrack_core::{
//!     synthesize_measurement, ChannelState, ParticleSet, Pilot, ProcessNoise, SteeringAngle,
//! };
//! use rand::SeedableRng;
//! use rand_chacha::ChaCha8Rng;
//!
//! let mut rng = ChaCha8Rng::seed_from_u64(9);
//! let truth = ChannelState::new(1.0, 0.0, SteeringAngle::from_degrees(90.0)?);
//! let noise = ProcessNoise::new(0.05, 0.05, 0.5_f64.to_radians())?;
//! let pilot = Pilot::constant(5)?;
//! let n0 = 0.64;
//!
//! let mut filter = ParticleSet::init_gaussian(&truth, 500, &noise, &mut rng)?;
//! let z = synthesize_measurement(&truth, truth.phi, 64, &pilot, n0, &[], &mut rng)?;
//! let outcome = filter.step(&z, &pilot, n0, &noise, &mut rng)?;
//! assert!((outcome.estimate.state_hat.phi.degrees() - 90.0).abs() < 1.0);
//! # Ok::<(), beamtrack_core::Error>(())
//! ```

use rand::Rng;

use crate::array::steering_inner;
use crate::channel::{clamp_phi, evolve_state, ChannelState, Measurement, Pilot, ProcessNoise};
use crate::error::{Error, Result};

/// One weighted hypothesis over the channel state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Particle {
    /// Hypothesized channel state.
    pub state: ChannelState,
    /// Normalized importance weight.
    pub weight: f64,
}

/// Point estimate produced each slot: posterior-mean state plus the posterior
/// root-mean-square spread of the angle (radians), which serves as the
/// tracker's own report of how unsure it is.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrackerEstimate {
    /// Weighted-mean channel state; the angle is the beam direction for the
    /// next slot.
    pub state_hat: ChannelState,
    /// Posterior RMS angle spread around the mean, radians.
    pub aoa_rmse: f64,
}

/// Result of one full filter step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepOutcome {
    /// Posterior estimate taken after reweighting, before resampling.
    pub estimate: TrackerEstimate,
    /// True if the weight update collapsed (all unnormalized weights zero)
    /// and the filter fell back to uniform weights for this slot.
    pub degenerate: bool,
}

/// Gaussian log-likelihood of a hypothesized state against one slot's
/// measurement: `-sum_d |z_d - zhat_d|^2 / (n0 * m_used)`, where the
/// prediction `zhat_d = alpha * a(phi_hat_used)^H a(phi) * q_d` replays the
/// beam geometry recorded in the measurement itself.
///
/// The `n0 * m_used` scale is the post-combining noise variance per sample —
/// the combiner's unit-modulus weights add `m_used` independent noise terms.
/// Rejects `n0 <= 0` (a zero-noise likelihood is a delta, not a density) and
/// a pilot whose length disagrees with the measurement.
pub fn log_likelihood(
    state: &ChannelState,
    z: &Measurement,
    pilot: &Pilot,
    n0: f64,
) -> Result<f64> {
    if n0.is_nan() || n0 <= 0.0 {
        return Err(Error::NonPositiveNoisePower(n0));
    }
    if pilot.len() != z.samples().len() {
        return Err(Error::DimensionMismatch {
            expected: z.samples().len(),
            got: pilot.len(),
        });
    }
    let inner = steering_inner(z.phi_hat_used(), state.phi, z.m_used())?;
    let gain = state.alpha() * inner;
    let residual: f64 = z
        .samples()
        .iter()
        .zip(pilot.samples())
        .map(|(zd, qd)| (zd - gain * qd).norm_sqr())
        .sum();
    Ok(-residual / (n0 * z.m_used() as f64))
}

/// The particle population. Weights are kept normalized (sum 1) by every
/// method that touches them.
#[derive(Debug, Clone, PartialEq)]
pub struct ParticleSet {
    particles: Vec<Particle>,
}

impl ParticleSet {
    /// Draws `s` particles componentwise-Gaussian around `x0` with the given
    /// spread (angles clamped to the tracked window), all at weight `1/s`.
    pub fn init_gaussian(
        x0: &ChannelState,
        s: usize,
        spread: &ProcessNoise,
        rng: &mut impl Rng,
    ) -> Result<Self> {
        if s == 0 {
            return Err(Error::NoParticles);
        }
        let w = 1.0 / s as f64;
        let particles = (0..s)
            .map(|_| Particle {
                state: evolve_state(x0, spread, rng),
                weight: w,
            })
            .collect();
        Ok(Self { particles })
    }

    /// Adopts an explicit population, renormalizing its weights. Rejects an
    /// empty population and weights that are negative, non-finite, or all
    /// zero.
    pub fn from_particles(mut particles: Vec<Particle>) -> Result<Self> {
        if particles.is_empty() {
            return Err(Error::NoParticles);
        }
        let mut total = 0.0;
        for p in &particles {
            if !p.weight.is_finite() || p.weight < 0.0 {
                return Err(Error::DegenerateStatistics(
                    "particle weights must be finite and nonnegative",
                ));
            }
            total += p.weight;
        }
        if total.is_nan() || total <= 0.0 {
            return Err(Error::DegenerateStatistics(
                "particle weights must not all be zero",
            ));
        }
        for p in &mut particles {
            p.weight /= total;
        }
        Ok(Self { particles })
    }

    /// Read access to the population.
    pub fn particles(&self) -> &[Particle] {
        &self.particles
    }

    /// Population size `s`.
    pub fn len(&self) -> usize {
        self.particles.len()
    }

    /// Always false: constructors reject empty populations.
    pub fn is_empty(&self) -> bool {
        self.particles.is_empty()
    }

    /// Moves every particle one slot forward through the random-walk model.
    /// Weights are untouched.
    pub fn propagate(&mut self, noise: &ProcessNoise, rng: &mut impl Rng) {
        for p in &mut self.particles {
            p.state = evolve_state(&p.state, noise, rng);
        }
    }

    /// Multiplies each weight by its measurement likelihood and renormalizes,
    /// all in the log domain with max-subtraction.
    ///
    /// Returns `true` when every unnormalized weight collapsed to zero (or
    /// degenerated to NaN); the weights are then reset to uniform so the
    /// filter can keep moving, and the caller learns the slot carried no
    /// usable information.
    pub fn update_weights(&mut self, z: &Measurement, pilot: &Pilot, n0: f64) -> Result<bool> {
        let mut log_w = Vec::with_capacity(self.particles.len());
        for p in &self.particles {
            let lw = p.weight.ln() + log_likelihood(&p.state, z, pilot, n0)?;
            log_w.push(lw);
        }
        // f64::max skips NaN as long as one operand is a number, so a single
        // NaN hypothesis doesn't poison the maximum.
        let max = log_w.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if !max.is_finite() {
            return Ok(self.reset_uniform());
        }
        let mut total = 0.0;
        for lw in &mut log_w {
            let w = (*lw - max).exp();
            *lw = w;
            total += w;
        }
        if !total.is_finite() || total <= 0.0 {
            return Ok(self.reset_uniform());
        }
        for (p, w) in self.particles.iter_mut().zip(&log_w) {
            p.weight = w / total;
        }
        Ok(false)
    }

    fn reset_uniform(&mut self) -> bool {
        let w = 1.0 / self.particles.len() as f64;
        for p in &mut self.particles {
            p.weight = w;
        }
        true
    }

    /// Systematic resampling: one uniform draw positions `s` evenly spaced
    /// pointers on the weight CDF, so a particle with weight `w` receives
    /// between `floor(s*w)` and `ceil(s*w)` offspring. Weights reset to
    /// `1/s`.
    pub fn resample(&mut self, rng: &mut impl Rng) {
        let n = self.particles.len();
        let u0: f64 = rng.random::<f64>() / n as f64;
        let mut picks = Vec::with_capacity(n);
        let mut cum = 0.0;
        let mut j = 0usize;
        for i in 0..n {
            let pointer = u0 + i as f64 / n as f64;
            while cum + self.particles[j].weight <= pointer && j + 1 < n {
                cum += self.particles[j].weight;
                j += 1;
            }
            picks.push(j);
        }
        let w = 1.0 / n as f64;
        self.particles = picks
            .into_iter()
            .map(|j| Particle {
                state: self.particles[j].state,
                weight: w,
            })
            .collect();
    }

    /// Posterior-mean state and RMS angle spread under the current weights.
    /// Call after [`update_weights`](Self::update_weights) and before
    /// [`resample`](Self::resample) for the sharpest estimate.
    pub fn estimate(&self) -> TrackerEstimate {
        let mut alpha_re = 0.0;
        let mut alpha_im = 0.0;
        let mut phi = 0.0;
        for p in &self.particles {
            alpha_re += p.weight * p.state.alpha_re;
            alpha_im += p.weight * p.state.alpha_im;
            phi += p.weight * p.state.phi.radians();
        }
        let phi_hat = clamp_phi(phi);
        let spread: f64 = self
            .particles
            .iter()
            .map(|p| {
                let d = p.state.phi.radians() - phi_hat.radians();
                p.weight * d * d
            })
            .sum();
        TrackerEstimate {
            state_hat: ChannelState::new(alpha_re, alpha_im, phi_hat),
            aoa_rmse: spread.sqrt(),
        }
    }

    /// One full slot: propagate, reweight against `z`, estimate, resample.
    pub fn step(
        &mut self,
        z: &Measurement,
        pilot: &Pilot,
        n0: f64,
        noise: &ProcessNoise,
        rng: &mut impl Rng,
    ) -> Result<StepOutcome> {
        self.propagate(noise, rng);
        let degenerate = self.update_weights(z, pilot, n0)?;
        let estimate = self.estimate();
        self.resample(rng);
        Ok(StepOutcome {
            estimate,
            degenerate,
        })
    }
}
