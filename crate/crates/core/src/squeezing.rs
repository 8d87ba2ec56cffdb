//! Hong–Mandel `N`th-order amplitude squeezing
//! `S_{φ,N} = ⟨(ΔX_φ)^N⟩ − (N−1)!!/2^{N/2}`.
//!
//! [`squeeze_numeric`] evaluates any state through the quadrature engine.
//! For fan-states with `f ≡ 1` and real `ξ` two families of closed forms are
//! available for `K ∈ {2, 4}`:
//!
//! - [`squeeze_analytic`] reproduces the published expressions character for
//!   character. Three of them, `(2,6)`, `(4,4)` and `(4,8)`, disagree with the
//!   numeric engine (see [`PRINTED_DEVIATIONS`]).
//! - [`squeeze_closed_form`] is the same set with those three coefficients
//!   rederived from the normally ordered moment expansion; it agrees with the
//!   numeric engine to roundoff.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use std::f64::consts::{SQRT_2, TAU};

use crate::error::{Error, Result};
use crate::fock::{central_quadrature_moment, FockVector};
use crate::nonlinear::NonlinearFn;
use crate::states::{build_fan_with, Truncation};

/// `(K, N)` pairs with a closed form.
pub const SUPPORTED_PAIRS: [(usize, usize); 7] = [(2, 2), (2, 4), (2, 6), (4, 2), (4, 4), (4, 6), (4, 8)];

/// Where the published expressions differ from the rederived ones.
pub const PRINTED_DEVIATIONS: [((usize, usize), &str); 3] = [
    ((2, 6), "cos(4φ) bracket lacks an overall factor ξ²"),
    ((4, 4), "sinh(ξ²) − sin(ξ²) + √2[…] term lacks a factor 2"),
    ((4, 8), "coefficient 622 of the ξ² term should be 630"),
];

pub fn is_supported(k: usize, n: usize) -> bool {
    SUPPORTED_PAIRS.contains(&(k, n))
}

fn check_order(n: usize) -> Result<()> {
    if n < 2 || n % 2 != 0 {
        return Err(Error::InvalidParameter(format!("squeezing order must be even and ≥ 2, got {n}")));
    }
    Ok(())
}

/// Coherent-state baseline `R_N = (N−1)!!/2^{N/2}`.
pub fn r_const(n: usize) -> Result<f64> {
    check_order(n)?;
    let dfact: f64 = (1..n).step_by(2).map(|k| k as f64).product();
    Ok(dfact / 2f64.powi((n / 2) as i32))
}

/// `S_{φ,N}` of an arbitrary normalized state.
pub fn squeeze_numeric(v: &FockVector, phi: f64, n: usize) -> Result<f64> {
    Ok(central_quadrature_moment(v, phi, n)? - r_const(n)?)
}

/// `S_{φ,N}` of the `f ≡ 1` fan-state at real amplitude `xi`.
pub fn fan_squeeze_numeric(k: usize, n: usize, xi: f64, phi: f64, truncation: Truncation) -> Result<f64> {
    let v = build_fan_with(C64::new(xi, 0.0), k, &NonlinearFn::unit(), truncation)?;
    squeeze_numeric(&v, phi, n)
}

/// Truncation giving `n` zero entries of headroom.
pub fn headroom_for(n: usize) -> Truncation {
    Truncation::adaptive(n.max(crate::states::DEFAULT_HEADROOM))
}

/// Above this `x` the building blocks carry the factor `e^{−x}`.
const SCALE_SWITCH: f64 = 300.0;

/// Hyperbolic and trigonometric building blocks at `x = ξ²` and `y = x/√2`,
/// all multiplied by a common factor so that ratios stay finite for large `x`.
struct Blocks {
    sh: f64,
    ch: f64,
    s: f64,
    c: f64,
    /// `sinh y cos y − sin y cosh y`
    p: f64,
    /// `sinh y cos y + sin y cosh y`
    q: f64,
    /// `cosh y cos y`
    hc: f64,
    /// `sinh y sin y`
    hs: f64,
}

impl Blocks {
    fn new(x: f64) -> Self {
        let y = x / SQRT_2;
        let (sy, cy) = y.sin_cos();
        let (sx, cx) = x.sin_cos();
        let (sh, ch, s, c, shy, chy) = if x <= SCALE_SWITCH {
            (x.sinh(), x.cosh(), sx, cx, y.sinh(), y.cosh())
        } else {
            let e = (-x).exp();
            let e2 = (-2.0 * x).exp();
            let up = (y - x).exp();
            let down = (-y - x).exp();
            (-0.5 * (-2.0 * x).exp_m1(), 0.5 * (1.0 + e2), sx * e, cx * e, 0.5 * (up - down), 0.5 * (up + down))
        };
        Self {
            sh,
            ch,
            s,
            c,
            p: shy * cy - sy * chy,
            q: shy * cy + sy * chy,
            hc: chy * cy,
            hs: shy * sy,
        }
    }

    fn d2(&self) -> f64 {
        self.ch + self.c
    }

    fn d4(&self) -> f64 {
        self.ch + self.c + 2.0 * self.hc
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Variant {
    Printed,
    Rederived,
}

fn closed_form(k: usize, n: usize, xi: f64, phi: f64, variant: Variant) -> Result<f64> {
    if !is_supported(k, n) {
        return Err(Error::UnsupportedPair { k, n });
    }
    if !(xi >= 0.0) || !xi.is_finite() {
        return Err(Error::InvalidParameter(format!("closed forms need real ξ ≥ 0, got {xi}")));
    }
    let printed = variant == Variant::Printed;
    let x = xi * xi;
    let b = Blocks::new(x);
    let value = match (k, n) {
        (2, 2) => x / b.d2() * (b.sh - b.s),
        (2, 4) => {
            x / 2.0 * (x * (4.0 * phi).cos() - 3.0 / b.d2() * (x * (b.c - b.ch) + 2.0 * (b.s - b.sh)))
        }
        (2, 6) => {
            let d = b.d2();
            let harmonic = 7.5 + 3.0 * x / d * (b.sh - b.s);
            let harmonic = if printed { harmonic } else { x * harmonic };
            let constant =
                (10.0 * x * x * (b.sh + b.s) + 45.0 * x * (b.ch - b.c) + 45.0 * (b.sh - b.s)) / (2.0 * d);
            x / 2.0 * (harmonic * (4.0 * phi).cos() + constant)
        }
        (4, 2) => x / b.d4() * (b.sh - b.s + SQRT_2 * b.p),
        (4, 4) => {
            let odd = b.sh - b.s + SQRT_2 * b.p;
            let odd = if printed { odd } else { 2.0 * odd };
            3.0 * x / (2.0 * b.d4()) * (x * (b.ch - b.c - 2.0 * b.hs) + odd)
        }
        (4, 6) => {
            5.0 * x / (4.0 * b.d4())
                * (2.0 * x * x * (b.sh + b.s - SQRT_2 * b.q)
                    + 9.0 * x * (b.ch - b.c - 2.0 * b.hs)
                    + 9.0 * (b.sh - b.s + SQRT_2 * b.p))
        }
        (4, 8) => {
            let c3 = if printed { 622.0 } else { 630.0 };
            let bracket = 35.0 * x.powi(3) * (b.ch + b.c - 2.0 * b.hc)
                + 280.0 * x * x * (b.sh + b.s - SQRT_2 * b.q)
                + c3 * x * (b.ch - b.c - 2.0 * b.hs)
                + 420.0 * (b.sh - b.s + SQRT_2 * b.p);
            x / 8.0 * (x.powi(3) * (8.0 * phi).cos() + bracket / b.d4())
        }
        _ => unreachable!(),
    };
    Ok(value)
}

/// Closed form `S^{(K)}_{φ,N}` exactly as published, for real `ξ ≥ 0`.
pub fn squeeze_analytic(k: usize, n: usize, xi: f64, phi: f64) -> Result<f64> {
    closed_form(k, n, xi, phi, Variant::Printed)
}

/// Closed form `S^{(K)}_{φ,N}` consistent with the moment expansion.
pub fn squeeze_closed_form(k: usize, n: usize, xi: f64, phi: f64) -> Result<f64> {
    closed_form(k, n, xi, phi, Variant::Rederived)
}

/// Threshold function of the `(K, N) = (2, 4)` squeezing condition
/// `cos(4φ) < g(|ξ|)`.
///
/// Both numerator and denominator vanish at `ξ = 0`; below `ξ² = 10⁻²` the
/// Taylor series `−5x²/2 + 83x⁶/840 − 3373x¹⁰/831600` (with `x = ξ²`) is used.
pub fn g_function(xi: f64) -> f64 {
    let x = xi * xi;
    if x < 1e-2 {
        let x2 = x * x;
        return x2 * (-2.5 + x2 * x2 * (83.0 / 840.0 - 3373.0 / 831600.0 * x2 * x2));
    }
    let b = Blocks::new(x);
    3.0 * (x * (b.c - b.ch) + 2.0 * (b.s - b.sh)) / (x * b.d2())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SqueezeSource {
    Numeric,
    /// Published closed form.
    Analytic,
    /// Rederived closed form.
    ClosedForm,
}

/// One point of a squeezing scan.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SqueezeSample {
    pub k: usize,
    pub n: usize,
    pub phi: f64,
    pub xi_abs: f64,
    pub s: f64,
    pub source: SqueezeSource,
}

/// `S` of the fan-state on the uniform grid `φ_i = 2πi/phi_grid`.
///
/// Every grid point yields a numeric sample, followed by the published and the
/// rederived closed form when `(K, N)` is supported.
pub fn squeeze_scan(k: usize, n: usize, xi: f64, phi_grid: usize) -> Result<Vec<SqueezeSample>> {
    if phi_grid < 8 {
        return Err(Error::InvalidParameter(format!("φ grid needs at least 8 points, got {phi_grid}")));
    }
    check_order(n)?;
    let v = build_fan_with(C64::new(xi, 0.0), k, &NonlinearFn::unit(), headroom_for(n))?;
    let supported = is_supported(k, n);
    let mut out = Vec::with_capacity(phi_grid * if supported { 3 } else { 1 });
    for i in 0..phi_grid {
        let phi = TAU * i as f64 / phi_grid as f64;
        let sample = |s, source| SqueezeSample { k, n, phi, xi_abs: xi, s, source };
        out.push(sample(squeeze_numeric(&v, phi, n)?, SqueezeSource::Numeric));
        if supported {
            out.push(sample(squeeze_analytic(k, n, xi, phi)?, SqueezeSource::Analytic));
            out.push(sample(squeeze_closed_form(k, n, xi, phi)?, SqueezeSource::ClosedForm));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::coherent;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_PI_4, PI};

    #[test]
    fn baseline_constants() {
        assert_eq!(r_const(2).unwrap(), 0.5);
        assert_eq!(r_const(4).unwrap(), 0.75);
        assert_eq!(r_const(6).unwrap(), 15.0 / 8.0);
        assert_eq!(r_const(8).unwrap(), 105.0 / 16.0);
        assert!(r_const(3).is_err());
        assert!(r_const(0).is_err());
    }

    #[test]
    fn coherent_state_has_zero_excess() {
        let v = coherent(C64::new(0.6, -0.3), Truncation::adaptive(16)).unwrap();
        for n in [2, 4, 6, 8] {
            for i in 0..9 {
                let s = squeeze_numeric(&v, i as f64 * 0.7, n).unwrap();
                assert_abs_diff_eq!(s, 0.0, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn fourth_order_squeezing_at_published_optimum() {
        let s = fan_squeeze_numeric(2, 4, 0.669272, FRAC_PI_4, headroom_for(4)).unwrap();
        assert!(s < 0.0);
        let m = central_quadrature_moment(
            &build_fan_with(C64::new(0.669272, 0.0), 2, &NonlinearFn::unit(), headroom_for(4)).unwrap(),
            FRAC_PI_4,
            4,
        )
        .unwrap();
        assert!(m < 0.75);
    }

    #[test]
    fn no_second_order_squeezing_for_k2() {
        for xi in [0.05, 0.4, 0.9, 1.4] {
            for i in 0..8 {
                assert!(fan_squeeze_numeric(2, 2, xi, i as f64 * 0.4, headroom_for(2)).unwrap() > 0.0);
            }
        }
    }

    #[test]
    fn closed_forms_vanish_at_origin_and_reject_bad_input() {
        for (k, n) in SUPPORTED_PAIRS {
            assert_eq!(squeeze_analytic(k, n, 0.0, 0.3).unwrap(), 0.0);
            assert_eq!(squeeze_closed_form(k, n, 0.0, 0.3).unwrap(), 0.0);
        }
        assert_eq!(squeeze_analytic(6, 12, 0.5, 0.0), Err(Error::UnsupportedPair { k: 6, n: 12 }));
        assert!(squeeze_analytic(2, 4, -0.5, 0.0).is_err());
    }

    #[test]
    fn fourth_order_onset_is_immediate_along_diagonal() {
        for xi in [1e-3, 0.01, 0.1] {
            assert!(squeeze_analytic(2, 4, xi, FRAC_PI_4).unwrap() < 0.0);
        }
    }

    #[test]
    fn published_forms_that_agree_with_numerics() {
        for (k, n) in [(2, 2), (2, 4), (4, 2), (4, 6)] {
            for xi in [0.1, 0.5, 0.9, 1.2] {
                for phi in [0.0, 0.3, 1.1] {
                    let num = fan_squeeze_numeric(k, n, xi, phi, headroom_for(n)).unwrap();
                    assert_abs_diff_eq!(squeeze_analytic(k, n, xi, phi).unwrap(), num, epsilon = 1e-10);
                }
            }
        }
    }

    #[test]
    fn published_forms_that_disagree_with_numerics() {
        for ((k, n), _) in PRINTED_DEVIATIONS {
            let xi = 1.2;
            let num = fan_squeeze_numeric(k, n, xi, 0.0, headroom_for(n)).unwrap();
            let gap = (squeeze_analytic(k, n, xi, 0.0).unwrap() - num).abs();
            assert!(gap > 1e-6, "{k},{n}: {gap}");
            assert_abs_diff_eq!(squeeze_closed_form(k, n, xi, 0.0).unwrap(), num, epsilon = 1e-10);
        }
    }

    #[test]
    fn overflow_guard_is_continuous() {
        // Both branches of the block evaluation around the switch point.
        for (k, n) in SUPPORTED_PAIRS {
            let lo = squeeze_closed_form(k, n, (SCALE_SWITCH - 1e-9).sqrt(), 0.2).unwrap();
            let hi = squeeze_closed_form(k, n, (SCALE_SWITCH + 1e-9).sqrt(), 0.2).unwrap();
            assert!(lo.is_finite() && hi.is_finite());
            assert!((lo - hi).abs() <= 1e-6 * lo.abs().max(1.0), "{k},{n}: {lo} vs {hi}");
        }
        assert!(squeeze_closed_form(4, 8, 40.0, 0.0).unwrap().is_finite());
    }

    #[test]
    fn g_function_shape() {
        assert_eq!(g_function(0.0), 0.0);
        assert_abs_diff_eq!(g_function(10.0), -3.06, epsilon = 1e-12);
        assert_abs_diff_eq!(g_function(100.0), -3.0, epsilon = 1e-3);
        assert_abs_diff_eq!(g_function(0.796541), -1.0, epsilon = 1e-4);
        // Series branch and direct branch meet.
        let edge = 1e-2f64.sqrt();
        let below = g_function(edge * (1.0 - 1e-13));
        let x = edge * edge;
        let b = Blocks::new(x);
        let direct = 3.0 * (x * (b.c - b.ch) + 2.0 * (b.s - b.sh)) / (x * b.d2());
        assert!((below - direct).abs() < 1e-10 * direct.abs());
        // S^{(2)}_{φ,4} = (ξ⁴/2)(cos 4φ − g).
        for xi in [0.3f64, 0.7, 1.1] {
            for phi in [0.0, 0.5, PI / 3.0] {
                let via_g = xi.powi(4) / 2.0 * ((4.0 * phi).cos() - g_function(xi));
                assert_abs_diff_eq!(via_g, squeeze_analytic(2, 4, xi, phi).unwrap(), epsilon = 1e-12);
            }
        }
        // Decreases from zero, dips below −3, approaches −3 from below.
        assert!(g_function(0.5) < 0.0 && g_function(0.5) > g_function(1.0));
        assert!(g_function(3.0) < -3.0);
    }

    #[test]
    fn scan_layout() {
        let scan = squeeze_scan(2, 4, 0.6, 16).unwrap();
        assert_eq!(scan.len(), 48);
        assert_eq!(scan[0].source, SqueezeSource::Numeric);
        assert_eq!(scan[1].source, SqueezeSource::Analytic);
        assert_eq!(scan[2].source, SqueezeSource::ClosedForm);
        assert_eq!(squeeze_scan(6, 12, 0.6, 8).unwrap().len(), 8);
        assert!(squeeze_scan(2, 4, 0.6, 4).is_err());
    }

    #[test]
    fn scan_phi_independence_below_minimum_order() {
        for (k, n) in [(2, 2), (4, 6)] {
            let vals: Vec<f64> = squeeze_scan(k, n, 0.7, 32)
                .unwrap()
                .into_iter()
                .filter(|s| s.source == SqueezeSource::Numeric)
                .map(|s| s.s)
                .collect();
            let (lo, hi) = vals.iter().fold((f64::MAX, f64::MIN), |(a, b), &v| (a.min(v), b.max(v)));
            assert!(hi - lo < 1e-10);
            assert!(lo > 0.0);
        }
    }
}
