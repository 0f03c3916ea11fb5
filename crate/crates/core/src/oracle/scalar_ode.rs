//! Scalar ODE oracles for the mirror amplitude φ_kl(t) and the logarithmic
//! derivative of ρ_{km,ln}(t).

use crate::dissipative::phi_kl_gamma;
use crate::error::{Error, Result};
use crate::model::DimensionlessParams;
use crate::C64;

use super::integrate::RICHARDSON_TOLERANCE;

/// Upper bound on the step of the scalar integrators.
pub const SCALAR_STEP: f64 = 1e-3;

fn rk4(f: impl Fn(f64, C64) -> C64, y0: C64, t_end: f64, n: usize) -> C64 {
    let h = t_end / n as f64;
    let mut y = y0;
    for i in 0..n {
        let t = i as f64 * h;
        let k1 = f(t, y);
        let k2 = f(t + h / 2.0, y + k1 * (h / 2.0));
        let k3 = f(t + h / 2.0, y + k2 * (h / 2.0));
        let k4 = f(t + h, y + k3 * h);
        y += (k1 + 2.0 * k2 + 2.0 * k3 + k4) * (h / 6.0);
    }
    y
}

fn checked(f: impl Fn(f64, C64) -> C64, y0: C64, t_end: f64) -> Result<C64> {
    if !(t_end >= 0.0 && t_end.is_finite()) {
        return Err(Error::invalid(
            "t_end",
            format!("{t_end} must be finite and nonnegative"),
        ));
    }
    if t_end == 0.0 {
        return Ok(y0);
    }
    let n = (t_end / SCALAR_STEP).ceil() as usize;
    let coarse = rk4(&f, y0, t_end, n);
    let fine = rk4(&f, y0, t_end, 2 * n);
    let deviation = (coarse - fine).norm();
    if deviation > RICHARDSON_TOLERANCE {
        return Err(Error::StepTooLarge {
            deviation,
            tolerance: RICHARDSON_TOLERANCE,
        });
    }
    Ok(fine)
}

/// φ̇ + (i + γ/2) φ = iκ with φ(0) = φ0.
pub fn integrate_mirror_amplitude(kappa: f64, gamma: f64, phi0: C64, t_end: f64) -> Result<C64> {
    let s = C64::new(gamma / 2.0, 1.0);
    checked(|_, y| C64::new(0.0, kappa) - s * y, phi0, t_end)
}

/// ρ_{km,ln}(t_end)/ρ_{km,ln}(0), from the equation for ρ̇/ρ with the mirror
/// amplitudes φ_kl, φ_mn supplied by their closed form.
///
/// The logarithm is integrated, so the result is ρ(0) = 1 propagated.
#[allow(clippy::too_many_arguments)]
pub fn integrate_coefficient_ode(
    k: usize,
    m: usize,
    l: usize,
    n: usize,
    t_end: f64,
    p: &DimensionlessParams,
    phi0: C64,
) -> Result<C64> {
    let free = p.r_a * (k as f64 - m as f64) + p.r_b * (l as f64 - n as f64);
    let (kkl, kmn) = (p.kappa(k, l), p.kappa(m, n));
    let g = p.gamma;
    let log_rate = |t: f64, _: C64| {
        let a = phi_kl_gamma(k, l, t, p, phi0);
        let b = phi_kl_gamma(m, n, t, p, phi0);
        let phase = free - kkl * a.re + kmn * b.re - g * (a * b.conj()).im;
        C64::new(-g / 2.0 * (a - b).norm_sqr(), -phase)
    };
    Ok(checked(log_rate, C64::new(0.0, 0.0), t_end)?.exp())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_is_constant() {
        let p = DimensionlessParams::symmetric(0.5, 1.0, 1.0, 0.2).unwrap();
        let got = integrate_coefficient_ode(1, 1, 0, 0, 2.5, &p, C64::new(0.3, 0.3)).unwrap();
        assert_eq!(got, C64::new(1.0, 0.0));
    }

    #[test]
    fn modulus_constant_without_damping() {
        let p = DimensionlessParams::symmetric(0.5, 1.3, 0.7, 0.0).unwrap();
        for (k, m, l, n) in [(1, 0, 0, 0), (0, 1, 1, 0), (1, 0, 0, 1)] {
            let got = integrate_coefficient_ode(k, m, l, n, 3.0, &p, C64::new(0.0, 0.0)).unwrap();
            assert!((got.norm() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn mirror_amplitude_relaxes() {
        let got = integrate_mirror_amplitude(1.0, 0.07, C64::new(0.0, 0.0), 1.0).unwrap();
        let s = C64::new(0.035, 1.0);
        let want = C64::new(0.0, 1.0) / s * (1.0 - (-s).exp());
        assert!((got - want).norm() < 1e-12);
    }
}
