//! System-wide model parameters (the full symbol table of the network,
//! channel and sharing model), carried in linear units.

use crate::channel::PowerLevel;
use crate::error::{Error, Result};
use crate::scalar::{real, Real};

/// Every scalar the link and analytic evaluators need.
///
/// Powers are linear milliwatts, densities per square meter, distances in
/// meters, and `theta`/`k_factor` linear ratios; dB and dBm exist only at
/// the CLI boundary.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams<R: Real> {
    /// Macrocell transmit power (P_M).
    pub p_m: PowerLevel<R>,
    /// Small-cell transmit power (P_S).
    pub p_s: PowerLevel<R>,
    /// Access-link antenna transmit power (P_a).
    pub p_a: PowerLevel<R>,
    /// Macrocell density per m^2.
    pub lambda_m: R,
    /// Small-cell density per m^2.
    pub lambda_s: R,
    /// Non-LOS path-loss exponent (alpha_i).
    pub alpha_i: R,
    /// LOS path-loss exponent for the access link (alpha_o).
    pub alpha_o: R,
    /// Vehicular penetration factor, 0 < epsilon <= 1; lower is better
    /// isolation.
    pub epsilon: R,
    /// Residual SIC factor on the AL->BH self-interference, 0 (ideal
    /// cancellation) to 1 (none).
    pub gamma: R,
    /// Whether the small-cell tier transmits on the shared sub-channel.
    pub kappa: bool,
    /// SIR threshold (linear).
    pub theta: R,
    /// Rician K-factor (linear).
    pub k_factor: R,
    /// Backhaul antenna to AL antenna separation (meters).
    pub r_am: R,
    /// Maximum AL antenna to in-vehicle user distance (meters).
    pub r_av_max: R,
    /// A-MeNB to selected cellular user distance (meters).
    pub r_u: R,
    /// Mobile-cell to selected cellular user distance (meters).
    pub r_mu: R,
    /// Truncation limit for the Rician series index j.
    pub j_max: usize,
    /// Truncation limit for the Laplace-expansion index q.
    pub q_max: usize,
}

impl<R: Real> SystemParams<R> {
    /// The reference setup used across the simulation campaign: 45/3/0 dBm
    /// transmit powers, macrocell density 2e-6 with a 10x small-cell tier,
    /// alpha 4/3.5, epsilon 0.1, no SIC (gamma 1), theta -10 dB, K 2 dB,
    /// 5 m antenna separation, 8 m vehicle radius, 50 m cellular user.
    pub fn baseline() -> Self {
        SystemParams {
            p_m: PowerLevel::from_dbm(real(45.0)),
            p_s: PowerLevel::from_dbm(real(3.0)),
            p_a: PowerLevel::from_dbm(real(0.0)),
            lambda_m: real(2e-6),
            lambda_s: real(2e-5),
            alpha_i: real(4.0),
            alpha_o: real(3.5),
            epsilon: real(0.1),
            gamma: real(1.0),
            kappa: false,
            theta: real(0.1),
            k_factor: real::<R>(10.0).powf(real(0.2)),
            r_am: real(5.0),
            r_av_max: real(8.0),
            r_u: real(50.0),
            r_mu: real(100.0),
            j_max: 70,
            q_max: 70,
        }
    }

    /// Small-cell activity indicator as a scalar (1 or 0).
    #[inline]
    pub fn kappa_scalar(&self) -> R {
        if self.kappa {
            R::one()
        } else {
            R::zero()
        }
    }

    /// Check every invariant; returns the first violation.
    pub fn validate(&self) -> Result<()> {
        let pos = |name: &'static str, v: R| -> Result<()> {
            if v > R::zero() && v.is_finite() {
                Ok(())
            } else {
                Err(Error::invalid(name, format!("{v} must be > 0 and finite")))
            }
        };
        pos("lambda_m", self.lambda_m)?;
        pos("lambda_s", self.lambda_s)?;
        pos("theta", self.theta)?;
        pos("r_am", self.r_am)?;
        pos("r_av_max", self.r_av_max)?;
        pos("r_u", self.r_u)?;
        pos("r_mu", self.r_mu)?;
        if !(self.alpha_i > real(2.0)) {
            return Err(Error::invalid("alpha_i", "must be > 2"));
        }
        if !(self.alpha_o > real(2.0)) {
            return Err(Error::invalid("alpha_o", "must be > 2"));
        }
        if !(self.epsilon > R::zero() && self.epsilon <= R::one()) {
            return Err(Error::invalid("epsilon", "must lie in (0, 1]"));
        }
        if !(self.gamma >= R::zero() && self.gamma <= R::one()) {
            return Err(Error::invalid("gamma", "must lie in [0, 1]"));
        }
        if !(self.k_factor >= R::zero()) {
            return Err(Error::invalid("k_factor", "must be >= 0"));
        }
        if self.j_max < 1 {
            return Err(Error::invalid("j_max", "must be >= 1"));
        }
        if self.q_max < 1 {
            return Err(Error::invalid("q_max", "must be >= 1"));
        }
        Ok(())
    }
}
