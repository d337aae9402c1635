use crate::{Error, Result};

/// Physical parameters of the driven, feedback-controlled ensemble.
///
/// `gamma_total` is the rescaled collective rate Γ = γN and sets the unit of
/// time (default 1). `feedback_g` is the dimensionless feedback gain g; the
/// derived combination κ = 2g + 1 controls both the modified jump operator
/// and the phase boundary Ω_c = |κ|Γ/4.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams {
    /// Drive Rabi frequency Ω, in units of Γ.
    pub omega: f64,
    /// Rescaled collective decay rate Γ.
    pub gamma_total: f64,
    /// Feedback strength g.
    pub feedback_g: f64,
}

impl SystemParams {
    pub fn new(omega: f64, gamma_total: f64, feedback_g: f64) -> Result<Self> {
        let p = Self {
            omega,
            gamma_total,
            feedback_g,
        };
        p.validate()?;
        Ok(p)
    }

    /// Γ = 1 units with the given drive and feedback.
    pub fn with_unit_gamma(omega: f64, feedback_g: f64) -> Result<Self> {
        Self::new(omega, 1.0, feedback_g)
    }

    /// κ = 2g + 1.
    #[inline]
    pub fn kappa(&self) -> f64 {
        2.0 * self.feedback_g + 1.0
    }

    pub fn validate(&self) -> Result<()> {
        if !self.gamma_total.is_finite() || self.gamma_total <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "gamma_total must be positive and finite, got {}",
                self.gamma_total
            )));
        }
        if !self.omega.is_finite() || self.omega < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "omega must be nonnegative and finite, got {}",
                self.omega
            )));
        }
        if !self.feedback_g.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "feedback_g must be finite, got {}",
                self.feedback_g
            )));
        }
        Ok(())
    }
}
