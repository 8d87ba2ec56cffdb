//! Uncertainty area `A_N = ½ ∫₀^{2π} ⟨(ΔX_φ)^N⟩² dφ`.
//!
//! For a state supported on `n ≡ 0 (mod 2K)` the integrand is
//! `R_N + X_N + Σ_p Y_N(p) cos(2pKφ)`, which gives
//! `A_N = π{R_N² + (2R_N + X_N)X_N + ½ Σ_p Y_N(p)²}`. [`area_numeric`]
//! integrates the raw quadrature moment instead and does not rely on that
//! harmonic structure.

use num_complex::Complex64 as C64;
use serde::Serialize;
use std::f64::consts::{PI, TAU};

use crate::error::{Error, Result};
use crate::fock::{central_quadrature_moment, normally_ordered_moment, FockVector, IMAG_TOLERANCE};
use crate::squeezing::r_const;

/// Trapezoid points per period in [`area_report`].
pub const DEFAULT_AREA_GRID: usize = 1024;

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

fn check_even(n: usize) -> Result<()> {
    if n < 2 || n % 2 != 0 {
        return Err(Error::InvalidParameter(format!("order must be even and ≥ 2, got {n}")));
    }
    Ok(())
}

/// `X_N = (N!/2^N) Σ_{m=1}^{N/2} 2^m ⟨a†^m a^m⟩ / ((m!)² (N/2 − m)!)`.
pub fn x_moment(v: &FockVector, n: usize) -> Result<f64> {
    check_even(n)?;
    let half = n / 2;
    let mut sum = 0.0;
    for m in 1..=half {
        let moment = normally_ordered_moment(v, m, m)?.re;
        sum += 2f64.powi(m as i32) * moment / (factorial(m).powi(2) * factorial(half - m));
    }
    Ok(factorial(n) / 2f64.powi(n as i32) * sum)
}

/// `Y_N(p) = (2^{pK} N!/2^{N−1}) Σ_{m=0}^{N/2−pK} 2^m ⟨a†^m a^{m+2pK}⟩ / (m! (m+2pK)! (N/2−m−pK)!)`
/// for `1 ≤ p ≤ ⌊N/(2K)⌋`.
pub fn y_moment(v: &FockVector, n: usize, k: usize, p: usize) -> Result<f64> {
    check_even(n)?;
    if k == 0 || p == 0 || p > n / (2 * k) {
        return Err(Error::InvalidParameter(format!("harmonic index p = {p} outside [1, ⌊N/2K⌋] for N = {n}, K = {k}")));
    }
    let half = n / 2;
    let shift = 2 * p * k;
    let mut sum = C64::default();
    for m in 0..=half - p * k {
        let moment = normally_ordered_moment(v, m, m + shift)?;
        sum += moment * 2f64.powi(m as i32) / (factorial(m) * factorial(m + shift) * factorial(half - m - p * k));
    }
    let value = sum * 2f64.powi((p * k) as i32) * factorial(n) / 2f64.powi(n as i32 - 1);
    if value.im.abs() > IMAG_TOLERANCE * value.re.abs().max(f64::MIN_POSITIVE) {
        return Err(Error::ImaginaryResidue { re: value.re, im: value.im });
    }
    Ok(value.re)
}

/// The moment-expansion area formula for a state on the `2K` lattice.
pub fn area_analytic(v: &FockVector, k: usize, n: usize) -> Result<f64> {
    let r = r_const(n)?;
    let x = x_moment(v, n)?;
    let mut harmonics = 0.0;
    for p in 1..=n / (2 * k.max(1)) {
        harmonics += y_moment(v, n, k, p)?.powi(2);
    }
    Ok(PI * (r * r + (2.0 * r + x) * x + 0.5 * harmonics))
}

/// Trapezoid quadrature of `½⟨(ΔX_φ)^N⟩²` over one period of the integrand,
/// scaled to the full turn. The period `2π/L` follows from the support
/// lattice `L` of `v`; `grid` points are placed in that period.
pub fn area_numeric(v: &FockVector, n: usize, grid: usize) -> Result<f64> {
    if grid < 64 {
        return Err(Error::InvalidParameter(format!("area quadrature needs at least 64 points, got {grid}")));
    }
    let lattice = v.support_lattice().max(1);
    let period = TAU / lattice as f64;
    let h = period / grid as f64;
    let mut acc = 0.0;
    for i in 0..grid {
        let m = central_quadrature_moment(v, h * i as f64, n)?;
        acc += m * m;
    }
    Ok(0.5 * acc * h * lattice as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AreaReport {
    pub k: usize,
    pub n: usize,
    pub xi_abs: f64,
    pub area_analytic: f64,
    pub area_numeric: f64,
    pub circle_area: f64,
}

impl AreaReport {
    pub fn relative_gap(&self) -> f64 {
        (self.area_analytic - self.area_numeric).abs() / self.area_analytic
    }
}

pub fn area_report(v: &FockVector, k: usize, n: usize, xi_abs: f64, grid: usize) -> Result<AreaReport> {
    let r = r_const(n)?;
    Ok(AreaReport {
        k,
        n,
        xi_abs,
        area_analytic: area_analytic(v, k, n)?,
        area_numeric: area_numeric(v, n, grid)?,
        circle_area: PI * r * r,
    })
}
