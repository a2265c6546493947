//! Ground-truth channel evolution and synthetic uplink pilot measurements.
//!
//! The channel state is a complex path gain plus an angle of arrival. Between
//! pilot slots every component takes an independent Gaussian step (a
//! random-walk model: the state transition itself is the identity), with the
//! angle clamped to stay meaningfully inside the array's field of view.
//!
//! Measurement synthesis is deliberately literal: it forms the full
//! `m x d` antenna-sample matrix — array response times pilot plus
//! per-element complex Gaussian noise — and only then applies the analog
//! combiner. Nothing is collapsed analytically, so the post-combining noise
//! statistics (variance `n0 * m` per sample) emerge from the combiner rather
//! than being baked in. The tracker's likelihood assumes exactly those
//! statistics, and the two sides are kept honest by independent code paths.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::array::{combine, steering_vector, SteeringAngle};
use crate::error::{Error, Result};

/// Lower clamp on the evolving angle of arrival: 1 degree.
pub const PHI_MIN: f64 = std::f64::consts::PI / 180.0;

/// Upper clamp on the evolving angle of arrival: 179 degrees.
pub const PHI_MAX: f64 = 179.0 * std::f64::consts::PI / 180.0;

/// Clamps a raw angle value into the tracked range `[1, 179]` degrees.
///
/// Used wherever an angle is produced by arithmetic (a random step, a
/// weighted mean) rather than validated input.
pub fn clamp_phi(rad: f64) -> SteeringAngle {
    SteeringAngle::from_radians(rad.clamp(PHI_MIN, PHI_MAX))
        .expect("clamped value is always physical")
}

/// Instantaneous channel state: complex path gain (split into real and
/// imaginary parts, since they random-walk independently) and angle of
/// arrival.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelState {
    /// Real part of the path gain.
    pub alpha_re: f64,
    /// Imaginary part of the path gain.
    pub alpha_im: f64,
    /// Angle of arrival.
    pub phi: SteeringAngle,
}

impl ChannelState {
    /// Bundles the three state components.
    pub fn new(alpha_re: f64, alpha_im: f64, phi: SteeringAngle) -> Self {
        Self {
            alpha_re,
            alpha_im,
            phi,
        }
    }

    /// The path gain as one complex number.
    pub fn alpha(&self) -> Complex64 {
        Complex64::new(self.alpha_re, self.alpha_im)
    }
}

/// Per-slot standard deviations of the three state increments.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProcessNoise {
    sigma_alpha_re: f64,
    sigma_alpha_im: f64,
    sigma_phi: f64,
}

impl ProcessNoise {
    /// Builds the noise description, rejecting negative deviations.
    /// `sigma_phi` is in radians.
    pub fn new(sigma_alpha_re: f64, sigma_alpha_im: f64, sigma_phi: f64) -> Result<Self> {
        for s in [sigma_alpha_re, sigma_alpha_im, sigma_phi] {
            if s.is_nan() || s < 0.0 {
                return Err(Error::NegativeStdDev(s));
            }
        }
        Ok(Self {
            sigma_alpha_re,
            sigma_alpha_im,
            sigma_phi,
        })
    }

    /// A perfectly static channel.
    pub fn zero() -> Self {
        Self {
            sigma_alpha_re: 0.0,
            sigma_alpha_im: 0.0,
            sigma_phi: 0.0,
        }
    }

    /// Std-dev of the real gain increment.
    pub fn sigma_alpha_re(&self) -> f64 {
        self.sigma_alpha_re
    }

    /// Std-dev of the imaginary gain increment.
    pub fn sigma_alpha_im(&self) -> f64 {
        self.sigma_alpha_im
    }

    /// Std-dev of the angle increment, radians.
    pub fn sigma_phi(&self) -> f64 {
        self.sigma_phi
    }
}

/// Unit-energy pilot sequence transmitted each slot.
#[derive(Debug, Clone, PartialEq)]
pub struct Pilot {
    samples: Vec<Complex64>,
}

impl Pilot {
    /// The constant pilot of length `d`: every symbol `1/sqrt(d)`, so the
    /// sequence has unit energy regardless of length.
    pub fn constant(d: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::EmptyPilot);
        }
        let v = Complex64::new(1.0 / (d as f64).sqrt(), 0.0);
        Ok(Self {
            samples: vec![v; d],
        })
    }

    /// The pilot symbols.
    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    /// Number of pilot symbols per slot.
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    /// Always false: constructors reject empty pilots.
    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

/// One slot's combined observation, tagged with the beam that produced it so
/// the tracker can score hypotheses against the geometry actually used.
#[derive(Debug, Clone, PartialEq)]
pub struct Measurement {
    samples: Vec<Complex64>,
    phi_hat_used: SteeringAngle,
    m_used: usize,
}

impl Measurement {
    /// The `d` combined samples.
    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    /// Beam direction the combiner was pointed at during this slot.
    pub fn phi_hat_used(&self) -> SteeringAngle {
        self.phi_hat_used
    }

    /// Active element count during this slot.
    pub fn m_used(&self) -> usize {
        self.m_used
    }
}

/// Advances the channel one slot: each component takes an independent
/// Gaussian step (gain real, gain imaginary, then angle), and the angle is
/// clamped to `[1, 179]` degrees.
pub fn evolve_state(x: &ChannelState, noise: &ProcessNoise, rng: &mut impl Rng) -> ChannelState {
    let d_re: f64 = rng.sample(StandardNormal);
    let d_im: f64 = rng.sample(StandardNormal);
    let d_phi: f64 = rng.sample(StandardNormal);
    ChannelState {
        alpha_re: x.alpha_re + noise.sigma_alpha_re() * d_re,
        alpha_im: x.alpha_im + noise.sigma_alpha_im() * d_im,
        phi: clamp_phi(x.phi.radians() + noise.sigma_phi() * d_phi),
    }
}

/// Synthesizes one slot's measurement through the full antenna-domain route.
///
/// Builds the channel vector (the line-of-sight response scaled by the path
/// gain, plus any `extra_paths` as `(gain, angle)` pairs), forms the
/// `m_prev x d` sample matrix with per-element complex Gaussian noise of
/// power `n0`, and combines it with the beam from the previous slot's
/// estimate. With `n0 = 0` no noise is drawn at all, so the output is an
/// exact deterministic function of the state.
pub fn synthesize_measurement(
    x: &ChannelState,
    phi_hat_prev: SteeringAngle,
    m_prev: usize,
    pilot: &Pilot,
    n0: f64,
    extra_paths: &[(Complex64, SteeringAngle)],
    rng: &mut impl Rng,
) -> Result<Measurement> {
    if n0 < 0.0 {
        return Err(Error::NegativeNoisePower(n0));
    }
    let w = steering_vector(phi_hat_prev, m_prev)?;
    let a_los = steering_vector(x.phi, m_prev)?;
    let mut h: Vec<Complex64> = a_los.entries().iter().map(|e| x.alpha() * e).collect();
    for (gain, phi_path) in extra_paths {
        let a_path = steering_vector(*phi_path, m_prev)?;
        for (hm, am) in h.iter_mut().zip(a_path.entries()) {
            *hm += gain * am;
        }
    }

    let d = pilot.len();
    let mut rows: Vec<Vec<Complex64>> = Vec::with_capacity(m_prev);
    if n0 > 0.0 {
        let s = (n0 / 2.0).sqrt();
        for hm in &h {
            let mut row = Vec::with_capacity(d);
            for q in pilot.samples() {
                let e_re: f64 = rng.sample(StandardNormal);
                let e_im: f64 = rng.sample(StandardNormal);
                row.push(hm * q + Complex64::new(s * e_re, s * e_im));
            }
            rows.push(row);
        }
    } else {
        for hm in &h {
            rows.push(pilot.samples().iter().map(|q| hm * q).collect());
        }
    }

    let samples = combine(&w, &rows)?;
    Ok(Measurement {
        samples,
        phi_hat_used: phi_hat_prev,
        m_used: m_prev,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::array::steering_inner;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn deg(d: f64) -> SteeringAngle {
        SteeringAngle::from_degrees(d).unwrap()
    }

    fn table_state() -> ChannelState {
        let r = 1.0 / 2f64.sqrt();
        ChannelState::new(r, r, deg(90.0))
    }

    #[test]
    fn zero_noise_evolution_is_the_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let x = table_state();
        let y = evolve_state(&x, &ProcessNoise::zero(), &mut rng);
        assert_eq!(x, y);
    }

    #[test]
    fn clamp_pins_angles_to_the_tracked_window() {
        assert_abs_diff_eq!(clamp_phi(0.001).degrees(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(clamp_phi(3.2).degrees(), 179.0, epsilon = 1e-12);
        assert_abs_diff_eq!(clamp_phi(-5.0).degrees(), 1.0, epsilon = 1e-12);
        let inside = 1.234;
        assert_eq!(clamp_phi(inside).radians(), inside);
    }

    #[test]
    fn evolution_never_leaves_the_angle_window() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let noise = ProcessNoise::new(0.1, 0.1, 60f64.to_radians()).unwrap();
        let mut x = ChannelState::new(0.0, 0.0, deg(2.0));
        for _ in 0..500 {
            x = evolve_state(&x, &noise, &mut rng);
            let phi = x.phi.degrees();
            assert!((1.0..=179.0).contains(&phi), "escaped window: {phi}");
        }
    }

    #[test]
    fn evolution_increments_have_the_configured_spread() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let noise = ProcessNoise::new(0.1, 0.2, 0.01).unwrap();
        let x0 = table_state();
        let n = 20_000;
        let (mut sum_re2, mut sum_im2, mut sum_phi2) = (0.0, 0.0, 0.0);
        let (mut sum_re, mut sum_im) = (0.0, 0.0);
        for _ in 0..n {
            let y = evolve_state(&x0, &noise, &mut rng);
            let (dr, di, dp) = (
                y.alpha_re - x0.alpha_re,
                y.alpha_im - x0.alpha_im,
                y.phi.radians() - x0.phi.radians(),
            );
            sum_re += dr;
            sum_im += di;
            sum_re2 += dr * dr;
            sum_im2 += di * di;
            sum_phi2 += dp * dp;
        }
        let nf = n as f64;
        // Sample std within a few percent of the configured sigma, mean near 0.
        assert_relative_eq!((sum_re2 / nf).sqrt(), 0.1, max_relative = 0.03);
        assert_relative_eq!((sum_im2 / nf).sqrt(), 0.2, max_relative = 0.03);
        assert_relative_eq!((sum_phi2 / nf).sqrt(), 0.01, max_relative = 0.03);
        assert_abs_diff_eq!(sum_re / nf, 0.0, epsilon = 3.0 * 0.1 / nf.sqrt());
        assert_abs_diff_eq!(sum_im / nf, 0.0, epsilon = 3.0 * 0.2 / nf.sqrt());
    }

    #[test]
    fn process_noise_rejects_negative_sigmas() {
        assert!(ProcessNoise::new(-0.1, 0.0, 0.0).is_err());
        assert!(ProcessNoise::new(0.0, -0.1, 0.0).is_err());
        assert!(ProcessNoise::new(0.0, 0.0, -0.1).is_err());
        assert!(ProcessNoise::new(0.0, 0.0, f64::NAN).is_err());
    }

    #[test]
    fn constant_pilot_has_unit_energy() {
        for d in [1usize, 5, 16] {
            let p = Pilot::constant(d).unwrap();
            assert_eq!(p.len(), d);
            assert!(!p.is_empty());
            let energy: f64 = p.samples().iter().map(|q| q.norm_sqr()).sum();
            assert_relative_eq!(energy, 1.0, max_relative = 1e-12);
            for q in p.samples() {
                assert_relative_eq!(q.re, 1.0 / (d as f64).sqrt(), max_relative = 1e-15);
                assert_eq!(q.im, 0.0);
            }
        }
        assert!(matches!(Pilot::constant(0), Err(Error::EmptyPilot)));
    }

    #[test]
    fn noiseless_aligned_measurement_is_alpha_times_m_scaled_pilot() {
        // Beam aligned with the true angle: w^H a = m, so each combined
        // sample is alpha * m / sqrt(d).
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let x = table_state();
        let pilot = Pilot::constant(2).unwrap();
        let z = synthesize_measurement(&x, x.phi, 4, &pilot, 0.0, &[], &mut rng).unwrap();
        assert_eq!(z.m_used(), 4);
        assert_eq!(z.phi_hat_used(), x.phi);
        let want = x.alpha() * 4.0 / 2f64.sqrt();
        for s in z.samples() {
            assert_abs_diff_eq!(s.re, want.re, epsilon = 1e-12);
            assert_abs_diff_eq!(s.im, want.im, epsilon = 1e-12);
        }
    }

    #[test]
    fn noiseless_misaligned_measurement_matches_inner_product_route() {
        // Cross-check the matrix route (steering vectors + combine) against
        // the closed inner-product expression used by the tracker.
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let x = ChannelState::new(0.3, -0.8, deg(88.0));
        let phi_hat = deg(90.5);
        let m = 32;
        let pilot = Pilot::constant(5).unwrap();
        let z = synthesize_measurement(&x, phi_hat, m, &pilot, 0.0, &[], &mut rng).unwrap();
        let inner = steering_inner(phi_hat, x.phi, m).unwrap();
        for (s, q) in z.samples().iter().zip(pilot.samples()) {
            let want = x.alpha() * inner * q;
            assert_abs_diff_eq!(s.re, want.re, epsilon = 1e-10);
            assert_abs_diff_eq!(s.im, want.im, epsilon = 1e-10);
        }
    }

    #[test]
    fn extra_paths_superpose_linearly() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let x = ChannelState::new(1.0, 0.0, deg(80.0));
        let nlos_gain = Complex64::new(0.0, 0.25);
        let nlos_phi = deg(120.0);
        let phi_hat = deg(81.0);
        let m = 16;
        let pilot = Pilot::constant(3).unwrap();
        let z = synthesize_measurement(
            &x,
            phi_hat,
            m,
            &pilot,
            0.0,
            &[(nlos_gain, nlos_phi)],
            &mut rng,
        )
        .unwrap();
        let los = steering_inner(phi_hat, x.phi, m).unwrap() * x.alpha();
        let nlos = steering_inner(phi_hat, nlos_phi, m).unwrap() * nlos_gain;
        for (s, q) in z.samples().iter().zip(pilot.samples()) {
            let want = (los + nlos) * q;
            assert_abs_diff_eq!(s.re, want.re, epsilon = 1e-10);
            assert_abs_diff_eq!(s.im, want.im, epsilon = 1e-10);
        }
    }

    #[test]
    fn combined_noise_power_scales_with_active_elements() {
        // Signal off (alpha = 0): each combined sample is pure combined
        // noise, whose variance must come out as n0 * m because the combiner
        // has unit-modulus weights. This is the bookkeeping the tracker's
        // likelihood relies on.
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let silent = ChannelState::new(0.0, 0.0, deg(90.0));
        let pilot = Pilot::constant(5).unwrap();
        let n0 = 0.64;
        for m in [8usize, 64] {
            let mut acc = 0.0;
            let mut count = 0usize;
            for _ in 0..2_000 {
                let z = synthesize_measurement(&silent, deg(100.0), m, &pilot, n0, &[], &mut rng)
                    .unwrap();
                for s in z.samples() {
                    acc += s.norm_sqr();
                    count += 1;
                }
            }
            let measured = acc / count as f64;
            assert_relative_eq!(measured, n0 * m as f64, max_relative = 0.05);
        }
    }

    #[test]
    fn measurement_rejects_negative_noise_power() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let x = table_state();
        let pilot = Pilot::constant(2).unwrap();
        assert!(matches!(
            synthesize_measurement(&x, x.phi, 4, &pilot, -0.1, &[], &mut rng),
            Err(Error::NegativeNoisePower(_))
        ));
    }
}
