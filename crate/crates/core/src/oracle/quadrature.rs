//! Direct quadrature of ξ(t) = ∫₀ᵗ η^γ and Γ(t) = (γ/2)∫₀ᵗ |η^γ|².

use quadrature::double_exponential;

use crate::dissipative::eta_gamma;
use crate::error::{Error, Result};
use crate::C64;

pub const QUADRATURE_TOLERANCE: f64 = 1e-12;

/// Panels are kept at most this wide so each one sees less than a period.
const PANEL: f64 = 1.0;

fn integrate(f: impl Fn(f64) -> f64, t: f64) -> Result<f64> {
    let panels = (t / PANEL).ceil().max(1.0) as usize;
    let w = t / panels as f64;
    let target = QUADRATURE_TOLERANCE / (4.0 * panels as f64);
    let mut total = 0.0;
    let mut err = 0.0;
    for i in 0..panels {
        let a = i as f64 * w;
        let b = if i + 1 == panels { t } else { a + w };
        let out = double_exponential::integrate(&f, a, b, target);
        total += out.integral;
        err += out.error_estimate;
    }
    // also rejects a NaN estimate
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    if !(err <= QUADRATURE_TOLERANCE) {
        return Err(Error::QuadratureNotConverged {
            error_estimate: err,
        });
    }
    Ok(total)
}

/// (ξ(t), Γ(t)) by adaptive double-exponential quadrature.
pub fn quadrature_xi_gamma(t: f64, gamma: f64) -> Result<(C64, f64)> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::invalid(
            "t",
            format!("{t} must be finite and nonnegative"),
        ));
    }
    if !(gamma >= 0.0 && gamma.is_finite()) {
        return Err(Error::invalid(
            "gamma",
            format!("{gamma} must be finite and nonnegative"),
        ));
    }
    if t == 0.0 {
        return Ok((C64::new(0.0, 0.0), 0.0));
    }
    let re = integrate(|s| eta_gamma(s, gamma).re, t)?;
    let im = integrate(|s| eta_gamma(s, gamma).im, t)?;
    let big_gamma = if gamma == 0.0 {
        0.0
    } else {
        gamma / 2.0 * integrate(|s| eta_gamma(s, gamma).norm_sqr(), t)?
    };
    Ok((C64::new(re, im), big_gamma))
}
