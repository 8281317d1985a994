//! Closed-form kernels of the fractional Laplacian on the mesh `hZ`.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::special::{exp_checked, gamma_ratio, ln_gamma_ratio_shift, log_gamma};

/// Order and mesh of a one-dimensional kernel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Kernel1DParams {
    s: f64,
    h: f64,
}

fn check_mesh(h: f64) -> Result<()> {
    if h > 0.0 && h.is_finite() {
        Ok(())
    } else {
        Err(Error::domain("mesh size must be positive", h))
    }
}

fn check_order(s: f64) -> Result<()> {
    if s > -0.5 && s < 1.0 {
        Ok(())
    } else {
        Err(Error::domain(
            "one-dimensional order must lie in (-1/2, 1)",
            s,
        ))
    }
}

impl Kernel1DParams {
    /// `s` must lie in `(-1/2, 0) ∪ (0, 1)` and `h` must be positive.
    pub fn new(s: f64, h: f64) -> Result<Self> {
        check_order(s)?;
        if s == 0.0 {
            return Err(Error::domain("kernel order must be non-zero", s));
        }
        check_mesh(h)?;
        Ok(Kernel1DParams { s, h })
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn h(&self) -> f64 {
        self.h
    }
}

/// `c_h(s) = π^{-1/2} (2/h)^{2s} Γ(1/2 + s) / Γ(1 - s)`, equal to 1 at s = 0.
pub fn normalization_c(s: f64, h: f64) -> Result<f64> {
    check_order(s)?;
    check_mesh(h)?;
    if s == 0.0 {
        return Ok(1.0);
    }
    let ln = 2.0 * s * (2.0 / h).ln() + log_gamma(0.5 + s)? - log_gamma(1.0 - s)? - 0.5 * PI.ln();
    exp_checked(ln, "normalization_c")
}

/// `K^h_s(m) = |s| c_h(s) Γ(|m| - s) / Γ(|m| + 1 + s)` for m ≠ 0, and 0 at the origin.
pub fn kernel_1d(params: Kernel1DParams, m: i64) -> Result<f64> {
    if m == 0 {
        return Ok(0.0);
    }
    let Kernel1DParams { s, h } = params;
    let k = m.unsigned_abs() as f64;
    Ok(s.abs() * normalization_c(s, h)? * gamma_ratio(k - s, k + 1.0 + s)?)
}

/// The order-zero kernel `1/|m|`, 0 at the origin.
pub fn riesz_zero_kernel(m: i64) -> f64 {
    if m == 0 {
        0.0
    } else {
        1.0 / m.unsigned_abs() as f64
    }
}

/// `Γ(k - s) / (s Γ(k + s))`, the value of `Σ_{|m| >= k} Γ(|m| - s) / Γ(|m| + 1 + s)`.
pub fn tail_sum_closed_form(k: u64, s: f64) -> Result<f64> {
    if k == 0 {
        return Err(Error::Invalid("tail index k must be at least 1".into()));
    }
    if !(s > 0.0 && s < 0.5) {
        return Err(Error::domain("tail sum order must lie in (0, 1/2)", s));
    }
    let k = k as f64;
    Ok(exp_checked(
        ln_gamma_ratio_shift(k + s, -2.0 * s)?,
        "tail_sum_closed_form",
    )? / s)
}

/// Diagonal weight of the operator on `hZ`: `c_h(s) Γ(1 - s) / Γ(1 + s)`.
///
/// For s > 0 this is `Σ_{m≠0} K^h_s(m)`; for s < 0 it is the value of the Riesz
/// kernel at the origin. It equals 1 at s = 0 and its derivative there is `-ln h²`.
pub fn identity_weight_1d(s: f64, h: f64) -> Result<f64> {
    check_order(s)?;
    check_mesh(h)?;
    if s == 0.0 {
        return Ok(1.0);
    }
    Ok(normalization_c(s, h)? * gamma_ratio(1.0 - s, 1.0 + s)?)
}
