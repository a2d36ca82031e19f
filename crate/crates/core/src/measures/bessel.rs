//! Bessel functions `I_ν` and `J_ν` of real order and nonnegative argument.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Maximum number of series terms.
pub const SERIES_CAP: usize = 500;
/// Largest argument accepted by the public evaluators.
pub const Z_CAP: f64 = 700.0;
/// Above this (and above ν²) `J_ν` switches from the alternating series to
/// the Hankel expansion; the series loses `e^z` worth of digits.
const J_ASYMPTOTIC_FROM: f64 = 25.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BesselEval {
    pub nu: f64,
    pub z: f64,
    pub value: f64,
    pub terms_used: usize,
    pub truncation_bound: f64,
}

fn check(nu: f64, z: f64) -> Result<()> {
    if !(nu >= 0.0 && nu.is_finite()) {
        return Err(Error::Domain(format!("order nu = {nu} must be >= 0")));
    }
    if !(z >= 0.0) {
        return Err(Error::Domain(format!("argument z = {z} must be >= 0")));
    }
    if z > Z_CAP {
        return Err(Error::Overflow { z, cap: Z_CAP });
    }
    Ok(())
}

/// `Σ_k (±z²/4)^k (z/2)^ν / (k! Γ(ν+k+1))`, terms built recursively.
fn series(nu: f64, z: f64, alternating: bool) -> Result<BesselEval> {
    if z == 0.0 {
        let value = if nu == 0.0 { 1.0 } else { 0.0 };
        return Ok(BesselEval { nu, z, value, terms_used: 1, truncation_bound: 0.0 });
    }
    let q = if alternating { -0.25 * z * z } else { 0.25 * z * z };
    let mut term = (nu * (0.5 * z).ln() - libm::lgamma(nu + 1.0)).exp();
    let mut sum = term;
    for k in 0..SERIES_CAP - 1 {
        let kf = (k + 1) as f64;
        term *= q / (kf * (kf + nu));
        sum += term;
        if term.abs() < 1e-16 * sum.abs() {
            let ratio = q.abs() / ((kf + 1.0) * (kf + 1.0 + nu));
            let next = term.abs() * ratio;
            let bound = if ratio < 1.0 { next / (1.0 - ratio) } else { next };
            return Ok(BesselEval { nu, z, value: sum, terms_used: k + 2, truncation_bound: bound });
        }
    }
    Err(Error::SeriesTruncation { nu, z, terms: SERIES_CAP })
}

/// `I_ν(z)` from its power series.
pub fn bessel_i(nu: f64, z: f64) -> Result<BesselEval> {
    check(nu, z)?;
    series(nu, z, false)
}

/// `J_ν(z)`: power series for moderate `z`, Hankel expansion beyond.
pub fn bessel_j(nu: f64, z: f64) -> Result<BesselEval> {
    check(nu, z)?;
    if z > J_ASYMPTOTIC_FROM && z > nu * nu {
        let (value, terms_used, truncation_bound) = hankel_j(nu, z);
        return Ok(BesselEval { nu, z, value, terms_used, truncation_bound });
    }
    series(nu, z, true)
}

/// Hankel coefficients `a_k(ν) / z^k` summed until they stop shrinking.
fn hankel_terms(nu: f64, z: f64) -> Vec<f64> {
    let mu = 4.0 * nu * nu;
    let mut out = vec![1.0];
    let mut t = 1.0f64;
    for k in 1..200 {
        let odd = (2 * k - 1) as f64;
        let next = t * (mu - odd * odd) / (k as f64 * 8.0 * z);
        if next.abs() >= t.abs() || next == 0.0 {
            if next == 0.0 {
                out.push(0.0);
            }
            break;
        }
        t = next;
        out.push(t);
        if t.abs() < 1e-17 {
            break;
        }
    }
    out
}

fn hankel_j(nu: f64, z: f64) -> (f64, usize, f64) {
    let a = hankel_terms(nu, z);
    let (mut p, mut q) = (0.0, 0.0);
    for (k, ak) in a.iter().enumerate() {
        let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
        if k % 2 == 0 {
            p += sign * ak;
        } else {
            q += sign * ak;
        }
    }
    let chi = z - (0.5 * nu + 0.25) * std::f64::consts::PI;
    let value = (2.0 / (std::f64::consts::PI * z)).sqrt() * (p * chi.cos() - q * chi.sin());
    (value, a.len(), a.last().copied().unwrap_or(0.0).abs())
}

/// `e^{-z} I_ν(z)` for any `z >= 0`, no overflow.
pub fn bessel_i_scaled(nu: f64, z: f64) -> f64 {
    if z > 30.0 + 0.5 * nu * nu {
        let a = hankel_terms(nu, z);
        let s: f64 = a.iter().enumerate().map(|(k, ak)| if k % 2 == 0 { *ak } else { -ak }).sum();
        return s / (2.0 * std::f64::consts::PI * z).sqrt();
    }
    match series(nu, z, false) {
        Ok(e) => e.value * (-z).exp(),
        Err(_) => f64::NAN,
    }
}

/// `J_ν(z)` for any `z >= 0`.
pub fn bessel_j_value(nu: f64, z: f64) -> f64 {
    if z > J_ASYMPTOTIC_FROM && z > nu * nu {
        return hankel_j(nu, z).0;
    }
    series(nu, z, true).map(|e| e.value).unwrap_or(f64::NAN)
}

/// `Σ_k y^k / (k! (k+ν)!)` for integer `ν`, i.e. `y^{-ν/2} I_ν(2√y)` for
/// `y > 0` and `|y|^{-ν/2} J_ν(2√|y|)` for `y < 0`, as `(sign, ln|value|)`.
pub(crate) fn ln_entire_kernel(nu: u32, y: f64) -> (f64, f64) {
    let nuf = nu as f64;
    if y.abs() <= 25.0 {
        let mut term = (-libm::lgamma(nuf + 1.0)).exp();
        let mut sum = term;
        for k in 1..SERIES_CAP {
            let kf = k as f64;
            term *= y / (kf * (kf + nuf));
            sum += term;
            if term.abs() < 1e-17 * sum.abs() {
                break;
            }
        }
        return (sum.signum(), sum.abs().ln());
    }
    let z = 2.0 * y.abs().sqrt();
    if y > 0.0 {
        (1.0, z + bessel_i_scaled(nuf, z).ln() - 0.5 * nuf * y.ln())
    } else {
        let j = bessel_j_value(nuf, z);
        (j.signum(), j.abs().ln() - 0.5 * nuf * y.abs().ln())
    }
}
