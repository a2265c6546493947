//! Choosing how many antenna elements to activate, given the current angle
//! estimate and how much the tracker distrusts it.
//!
//! The expected beamforming gain under a Gaussian pointing error has an
//! interior optimum in the element count: more elements buy peak gain
//! quadratically but shrink the main lobe linearly, so past some point the
//! expected pointing loss wins. Maximizing the gain envelope
//! `sin(m t) / sin(t)`-style profile leads to the scalar stationarity
//! condition `tan x = 2x`, whose first positive root `x*` converts an
//! expected cosine-domain error into the gain-optimal element count
//! `m = 2 x* / (pi * |cosine gap|)`.
//!
//! [`select_beamwidth`] applies that rule two-sided: the tracker's posterior
//! angle spread `e_k` defines a plausible error band `phi_hat ± e_k`, each
//! edge contributes its own one-sided count, and the sum is rounded and
//! clamped to the hardware budget. Confident tracking (`e_k -> 0`) therefore
//! pushes the full array; shaky tracking widens the beam by switching
//! elements off.

use std::f64::consts::{FRAC_PI_2, PI};
use std::sync::OnceLock;

use crate::array::SteeringAngle;
use crate::error::{Error, Result};

/// Residual magnitude at which Newton iteration declares the root converged.
const ROOT_TOL: f64 = 1e-12;

/// Error proxies below this (radians) are treated as perfect confidence:
/// the full array is used.
const ERROR_PROXY_EPS: f64 = 1e-9;

/// Cosine gaps below this are numerically indistinguishable from a zero-width
/// beam-edge offset, so the ideal count diverges and the full array is used.
const COS_GAP_EPS: f64 = 1e-12;

/// The first positive root of `tan x = 2x`, with solver diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootConstant {
    value: f64,
    residual: f64,
    iterations: usize,
}

impl RootConstant {
    /// The root `x*` itself, about 1.1655611852.
    pub fn value(self) -> f64 {
        self.value
    }

    /// `tan(x*) - 2 x*` at the returned root — how well the equation is
    /// actually satisfied.
    pub fn residual(self) -> f64 {
        self.residual
    }

    /// Newton steps the solver needed.
    pub fn iterations(self) -> usize {
        self.iterations
    }
}

/// Finds the first positive root of `tan x = 2x` by Newton iteration on
/// `f(x) = tan x - 2x` from `x0 = 1.2`, converging when `|f| < 1e-12`.
///
/// The root lies strictly inside `(1, pi/2)`; iteration leaving that bracket
/// or failing to settle is reported as an error rather than returned as a
/// bogus constant.
pub fn solve_root() -> Result<RootConstant> {
    let f = |x: f64| x.tan() - 2.0 * x;
    // f'(x) = sec^2(x) - 2
    let fp = |x: f64| {
        let c = x.cos();
        1.0 / (c * c) - 2.0
    };
    let mut x = 1.2;
    for iterations in 0..64 {
        if !(0.0..FRAC_PI_2).contains(&x) {
            return Err(Error::RootSearchFailed(format!(
                "iteration left the bracket (0, pi/2) at x = {x}"
            )));
        }
        let fx = f(x);
        if fx.abs() < ROOT_TOL {
            return Ok(RootConstant {
                value: x,
                residual: fx,
                iterations,
            });
        }
        x -= fx / fp(x);
    }
    Err(Error::RootSearchFailed(
        "no convergence after 64 iterations".into(),
    ))
}

/// The cached value of [`solve_root`]'s `x*`. Solved once per process.
pub fn x_star() -> f64 {
    static X: OnceLock<f64> = OnceLock::new();
    *X.get_or_init(|| {
        solve_root()
            .expect("tan x = 2x has a root inside (0, pi/2)")
            .value()
    })
}

/// Gain-optimal (real-valued) element count for a beam pointed at `phi_hat`
/// when the arrival is actually at `phi`: `2 x* / (pi |cos phi_hat - cos phi|)`.
///
/// Errors when the two angles are numerically indistinguishable in cosine,
/// where the ideal count diverges.
pub fn ideal_m(phi_hat: SteeringAngle, phi: SteeringAngle) -> Result<f64> {
    let gap = (phi_hat.cos() - phi.cos()).abs();
    if gap < COS_GAP_EPS {
        return Err(Error::DegenerateGeometry(gap));
    }
    Ok(2.0 * x_star() / (PI * gap))
}

/// The controller's verdict for the next slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BeamDecision {
    /// Elements to activate, always within `[1, m0]`.
    pub m_k: usize,
    /// True when the count was pinned by the hardware budget, the unit
    /// floor, or a degenerate geometry fallback — i.e. whenever the returned
    /// value is not simply the rounded two-sided rule.
    pub clamped: bool,
}

/// Picks the active element count for a beam at `phi_hat` whose angle is
/// trusted to about `e_k` radians (the tracker's posterior RMS spread).
///
/// Each edge of the error band `phi_hat ± e_k` contributes a one-sided
/// optimal count `x* / (pi |cos(phi_hat ∓ e_k) - cos(phi_hat)|)`; their sum
/// is rounded half-away-from-zero and clamped to `[1, m0]`. A vanishing
/// error proxy, or an edge whose cosine coincides with the estimate's
/// (beams brushing the array axis), yields the full array.
pub fn select_beamwidth(phi_hat: SteeringAngle, e_k: f64, m0: usize) -> Result<BeamDecision> {
    if m0 == 0 {
        return Err(Error::ZeroAntennas);
    }
    if e_k.is_nan() || e_k < 0.0 {
        return Err(Error::NegativeErrorProxy(e_k));
    }
    if e_k < ERROR_PROXY_EPS {
        return Ok(BeamDecision {
            m_k: m0,
            clamped: true,
        });
    }
    let c0 = phi_hat.cos();
    let gap_minus = ((phi_hat.radians() - e_k).cos() - c0).abs();
    let gap_plus = ((phi_hat.radians() + e_k).cos() - c0).abs();
    if gap_minus < COS_GAP_EPS || gap_plus < COS_GAP_EPS {
        return Ok(BeamDecision {
            m_k: m0,
            clamped: true,
        });
    }
    let scale = x_star() / PI;
    let sum = scale / gap_minus + scale / gap_plus;
    let rounded = sum.round();
    if rounded < 1.0 {
        Ok(BeamDecision {
            m_k: 1,
            clamped: true,
        })
    } else if rounded > m0 as f64 {
        Ok(BeamDecision {
            m_k: m0,
            clamped: true,
        })
    } else {
        Ok(BeamDecision {
            m_k: rounded as usize,
            clamped: false,
        })
    }
}
