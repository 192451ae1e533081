//! Localised Fejér estimates.
//!
//! If `θ` is Lipschitz with `‖θ'‖∞ ≤ n` and `θ(x) = 0`, then
//!
//! ```text
//! |σ_n θ(x)| ≤ 1/4 + ‖θ‖∞/2   (n ≥ 8)      [EQ1]
//! |σ_n θ(x)| ≤ 4   + ‖θ‖∞/4   (n ≥ 4)      [EQ2]
//! ```
//!
//! The near-field part of the Fejér integral is controlled by the tail
//! quantity `u(n, δ) = 2∫_0^{δ/n} (sin nπy / sin πy)² y dy`, with `δ = 1` for
//! EQ1 and `δ = 2` for EQ2.

use std::fmt;

use num_complex::Complex64;
use rand::Rng;

use crate::error::{invalid, Error, Result};
use crate::quad;
use crate::trig::{signed_frequency, SampledFunction, TrigPoly};

/// Slack added to every right-hand side to absorb roundoff.
pub const HOLDS_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundForm {
    Eq1,
    Eq2,
}

impl BoundForm {
    pub fn delta(self) -> f64 {
        match self {
            BoundForm::Eq1 => 1.0,
            BoundForm::Eq2 => 2.0,
        }
    }

    pub fn min_n(self) -> u64 {
        match self {
            BoundForm::Eq1 => 8,
            BoundForm::Eq2 => 4,
        }
    }

    /// Right-hand side for a given `‖θ‖∞`.
    pub fn rhs(self, theta_sup: f64) -> f64 {
        match self {
            BoundForm::Eq1 => 0.25 + 0.5 * theta_sup,
            BoundForm::Eq2 => 4.0 + 0.25 * theta_sup,
        }
    }
}

impl fmt::Display for BoundForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BoundForm::Eq1 => "EQ1",
            BoundForm::Eq2 => "EQ2",
        })
    }
}

impl std::str::FromStr for BoundForm {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "EQ1" => Ok(BoundForm::Eq1),
            "EQ2" => Ok(BoundForm::Eq2),
            _ => invalid(format!("unknown bound form {s:?} (expected EQ1 or EQ2)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FejerBoundReport {
    pub n: u64,
    pub delta: f64,
    pub u_n: f64,
    pub form: BoundForm,
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

/// `u(n, δ) = 2∫_0^{δ/n} (sin(nπy)/sin(πy))² y dy`, absolute error ≤ 1e-9.
pub fn fejer_tail_u(n: u64, delta: f64) -> Result<f64> {
    if n == 0 {
        return invalid("tail quantity needs n >= 1");
    }
    if !(delta > 0.0 && delta <= 2.0) {
        return invalid(format!("delta = {delta} outside (0, 2]"));
    }
    let nf = n as f64;
    let pi = std::f64::consts::PI;
    let integrand = |y: f64| {
        if y <= 0.0 {
            return 0.0;
        }
        let r = (nf * pi * y).sin() / (pi * y).sin();
        r * r * y
    };
    let q = quad::integrate(integrand, 0.0, delta / nf, 1e-10, 4096)?;
    Ok(2.0 * q.value)
}

/// Bound on the tail used by each inequality: `u_8 ≤ 1/4` drives EQ1, and
/// `F_n ≤ n` gives `u(n, δ) ≤ δ²` in general.
pub fn tail_bound(delta: f64) -> f64 {
    if delta == 1.0 {
        0.25
    } else {
        delta * delta
    }
}

/// Checks one instance of the localisation lemma for sampled `θ` at `x`.
///
/// `θ` may be complex valued; the estimate only involves `|θ|`. Hypotheses
/// are verified first and a failure is reported as
/// [`Error::HypothesisViolated`], distinct from the bound not holding.
pub fn check_fejer_localization(theta: &SampledFunction, n: u64, x: f64, form: BoundForm) -> Result<FejerBoundReport> {
    if n < form.min_n() {
        return Err(Error::HypothesisViolated(format!("{form} needs n >= {}, got {n}", form.min_n())));
    }
    let m = theta.len();
    if (n as usize) >= m / 2 {
        return invalid(format!("n = {n} not resolved by {m} samples"));
    }
    let poly = interpolant(theta)?;
    let at_x = poly.eval(x);
    if at_x.norm() > 1e-9 {
        return Err(Error::HypothesisViolated(format!("theta(x) = {at_x} is not zero")));
    }
    let slope = theta.derivative_sup(2);
    if slope > n as f64 * (1.0 + 1e-12) {
        return Err(Error::HypothesisViolated(format!("sup |theta'| = {slope} exceeds n = {n}")));
    }
    let theta_sup = poly.sample(2 * m)?.sup_abs().max(theta.sup_abs());
    let lhs = poly.fejer_sum(n)?.eval(x).norm();
    let rhs = form.rhs(theta_sup);
    let delta = form.delta();
    Ok(FejerBoundReport {
        n,
        delta,
        u_n: fejer_tail_u(n, delta)?,
        form,
        lhs,
        rhs,
        holds: lhs <= rhs + HOLDS_SLACK,
    })
}

// Trigonometric interpolant of the samples; the Nyquist bin is dropped.
fn interpolant(f: &SampledFunction) -> Result<TrigPoly> {
    let m = f.len();
    let dft = f.dft();
    let half = (m / 2) as i64;
    let mut coeffs = vec![Complex64::default(); m - 1];
    for (i, c) in dft.iter().enumerate() {
        let k = signed_frequency(i, m);
        if k.abs() < half {
            coeffs[(k + half - 1) as usize] = *c;
        }
    }
    TrigPoly::new(-(half - 1), coeffs, f.label().to_string())
}

/// A random real trigonometric polynomial, scaled so that its grid
/// derivative supremum is `n` times a factor in `(1/2, 1]` and shifted so it
/// vanishes at `x`. Sampled on `m` points.
pub fn random_admissible_theta<R: Rng>(rng: &mut R, n: u64, x: f64, m: usize) -> Result<SampledFunction> {
    let degree = rng.gen_range(1..=16i64);
    let mut coeffs = vec![Complex64::default(); (2 * degree + 1) as usize];
    for k in 1..=degree {
        let decay = 1.0 / (k as f64).powf(rng.gen_range(0.0..2.0));
        let c = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * decay;
        coeffs[(degree + k) as usize] = c;
        coeffs[(degree - k) as usize] = c.conj();
    }
    let raw = TrigPoly::new(-degree, coeffs, "theta")?;
    let slope = raw.sample(m)?.derivative_sup(2);
    if slope == 0.0 {
        return invalid("degenerate random polynomial");
    }
    let scale = n as f64 / slope * rng.gen_range(0.5..1.0) * (1.0 - 1e-9);
    let scaled = raw.scale(Complex64::new(scale, 0.0));
    let shift = scaled.eval(x).re;
    let shifted = scaled.add_scaled(&TrigPoly::monomial(0), Complex64::new(-shift, 0.0));
    let samples = shifted.sample(m)?;
    Ok(samples.map(|z| Complex64::new(z.re, 0.0)))
}

/// `θ = 1 − χ` style helper: samples of `1 − P` on `m` points.
pub fn one_minus(p: &TrigPoly, m: usize) -> Result<SampledFunction> {
    Ok(p.sample(m)?.map(|z| Complex64::new(1.0, 0.0) - z))
}

/// The Fejér kernel `F_n(t) = (1/n)(sin nπt / sin πt)²` in closed form.
pub fn fejer_kernel_value(n: u64, t: f64) -> f64 {
    let nf = n as f64;
    let s = (std::f64::consts::PI * t).sin();
    if s.abs() < 1e-300 {
        return nf;
    }
    let r = (nf * std::f64::consts::PI * t).sin() / s;
    r * r / nf
}
