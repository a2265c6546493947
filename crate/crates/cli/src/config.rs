//! Flat `key=value` experiment configuration.
//!
//! A config file is a sequence of lines, each `key=value`; blank lines and
//! `#` comments are ignored. The same syntax powers `--set` overrides, so one
//! code path validates both. Keys are fixed — a typo is an error, not a
//! silent default — and a key given twice keeps its last value.

use std::str::FromStr;

use beamtrack_core::{ArrayConfig, ChannelState, Mode, ProcessNoise, SimConfig, SteeringAngle};

/// Every accepted key, in the order the error message lists them.
const KEYS: &[&str] = &[
    "m0",
    "s",
    "d",
    "k_steps",
    "runs",
    "seed",
    "alpha0_re",
    "alpha0_im",
    "phi0_deg",
    "sigma_alpha",
    "sigma_phi_deg",
    "snr0_db",
    "mode",
];

/// Scalar staging area for a [`SimConfig`].
///
/// Values arrive as loose strings (file lines, `--set` flags) and are parsed
/// immediately, but cross-field validation waits until [`Draft::build`], so a
/// file may e.g. set `phi0_deg=0.5` before `m0` without tripping over an
/// incomplete intermediate state.
#[derive(Debug, Clone, PartialEq)]
pub struct Draft {
    m0: usize,
    s: usize,
    d: usize,
    k_steps: usize,
    runs: usize,
    seed: u64,
    alpha0_re: f64,
    alpha0_im: f64,
    phi0_deg: f64,
    sigma_alpha: f64,
    sigma_phi_deg: f64,
    snr0_db: f64,
    mode: Mode,
}

impl Default for Draft {
    /// Mirrors [`SimConfig::default`] field for field.
    fn default() -> Self {
        let r = 1.0 / 2f64.sqrt();
        Self {
            m0: 64,
            s: 1000,
            d: 5,
            k_steps: 100,
            runs: 1000,
            seed: 42,
            alpha0_re: r,
            alpha0_im: r,
            phi0_deg: 90.0,
            sigma_alpha: 0.1,
            sigma_phi_deg: 1.0,
            snr0_db: 20.0,
            mode: Mode::Adaptive,
        }
    }
}

impl Draft {
    /// Applies one `key = value` pair. The value must parse for the key's
    /// type; unknown keys are rejected outright.
    pub fn apply(&mut self, key: &str, value: &str) -> Result<(), String> {
        let key = key.trim();
        let value = value.trim();
        match key {
            "m0" => self.m0 = parse(key, value)?,
            "s" => self.s = parse(key, value)?,
            "d" => self.d = parse(key, value)?,
            "k_steps" => self.k_steps = parse(key, value)?,
            "runs" => self.runs = parse(key, value)?,
            "seed" => self.seed = parse(key, value)?,
            "alpha0_re" => self.alpha0_re = parse(key, value)?,
            "alpha0_im" => self.alpha0_im = parse(key, value)?,
            "phi0_deg" => self.phi0_deg = parse(key, value)?,
            "sigma_alpha" => self.sigma_alpha = parse(key, value)?,
            "sigma_phi_deg" => self.sigma_phi_deg = parse(key, value)?,
            "snr0_db" => self.snr0_db = parse(key, value)?,
            "mode" => {
                self.mode = Mode::from_str(value)
                    .map_err(|_| format!("mode: expected 'adaptive' or 'fixed', got '{value}'"))?
            }
            _ => {
                return Err(format!(
                    "unknown config key '{key}' (valid keys: {})",
                    KEYS.join(", ")
                ))
            }
        }
        Ok(())
    }

    /// Applies a whole config file's text, reporting the first bad line by
    /// number.
    pub fn apply_text(&mut self, text: &str) -> Result<(), String> {
        for (idx, raw) in text.lines().enumerate() {
            let line = match raw.split_once('#') {
                Some((before, _)) => before,
                None => raw,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| format!("line {}: expected key=value, got '{line}'", idx + 1))?;
            self.apply(key, value)
                .map_err(|e| format!("line {}: {e}", idx + 1))?;
        }
        Ok(())
    }

    /// Applies one `--set key=value` argument.
    pub fn apply_override(&mut self, pair: &str) -> Result<(), String> {
        let (key, value) = pair
            .split_once('=')
            .ok_or_else(|| format!("--set expects key=value, got '{pair}'"))?;
        self.apply(key, value)
    }

    /// Forces the master seed (the `--seed` shorthand; applied last, so it
    /// wins over both the file and `--set seed=...`).
    pub fn set_seed(&mut self, seed: u64) {
        self.seed = seed;
    }

    /// Assembles and validates the final [`SimConfig`].
    ///
    /// The single `sigma_alpha` knob drives both gain components, matching
    /// the symmetric random walk the simulation uses.
    pub fn build(&self) -> Result<SimConfig, String> {
        let array = ArrayConfig::new(self.m0).map_err(|e| e.to_string())?;
        let phi0 = SteeringAngle::from_degrees(self.phi0_deg).map_err(|_| {
            format!(
                "phi0_deg: expected an angle in [0, 180], got {}",
                self.phi0_deg
            )
        })?;
        let process_noise = ProcessNoise::new(
            self.sigma_alpha,
            self.sigma_alpha,
            self.sigma_phi_deg.to_radians(),
        )
        .map_err(|e| e.to_string())?;
        let cfg = SimConfig {
            array,
            particles: self.s,
            pilot_len: self.d,
            k_steps: self.k_steps,
            runs: self.runs,
            x0: ChannelState::new(self.alpha0_re, self.alpha0_im, phi0),
            process_noise,
            snr0_db: self.snr0_db,
            seed: self.seed,
            mode: self.mode,
        };
        cfg.validate().map_err(|e| e.to_string())?;
        Ok(cfg)
    }
}

/// Parses `value` as `T`, naming the key and the offending text on failure.
fn parse<T: FromStr>(key: &str, value: &str) -> Result<T, String> {
    value
        .parse()
        .map_err(|_| format!("{key}: could not parse '{value}'"))
}
