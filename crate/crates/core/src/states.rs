//! Builders for nonlinear coherent states (NCS), K-quantum nonlinear coherent
//! states (KNCS), their symmetric-even members and the fan-states.
//!
//! Amplitudes are generated by the ratio recurrence
//! `c[n+K]/c[n] = ξ^K / (√((n+1)⋯(n+K)) · f(n+K))` in log space, which is the
//! recurrence imposed by `a^K f(n̂) |ψ⟩ = ξ^K |ψ⟩`, and normalized by direct
//! summation.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};

use crate::error::{Error, Result};
use crate::fock::{normalize, FockVector};
use crate::nonlinear::NonlinearFn;

/// Tail probability targeted by the adaptive cutoff.
pub const ADAPTIVE_TAIL: f64 = 1e-32;

/// Largest tail probability accepted for an explicit cutoff.
pub const FIXED_TAIL_LIMIT: f64 = 1e-12;

/// Hard ceiling on the support cutoff.
pub const MAX_CUTOFF: usize = 1 << 20;

/// Zero amplitudes appended above the support by default.
pub const DEFAULT_HEADROOM: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CutoffPolicy {
    /// Grow the support until the remaining tail probability is below
    /// [`ADAPTIVE_TAIL`].
    Adaptive,
    /// Populate `|0⟩..|n⟩`; fails if more than [`FIXED_TAIL_LIMIT`] is lost.
    Fixed(usize),
}

/// Where to stop the Fock expansion and how much zero headroom to keep above it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Truncation {
    pub policy: CutoffPolicy,
    pub headroom: usize,
}

impl Truncation {
    pub fn adaptive(headroom: usize) -> Self {
        Self { policy: CutoffPolicy::Adaptive, headroom }
    }

    pub fn fixed(cutoff: usize, headroom: usize) -> Self {
        Self { policy: CutoffPolicy::Fixed(cutoff), headroom }
    }
}

impl Default for Truncation {
    fn default() -> Self {
        Self::adaptive(DEFAULT_HEADROOM)
    }
}

/// Parameters of one KNCS build.
#[derive(Debug, Clone)]
pub struct KncsSpec {
    pub xi: C64,
    pub k: usize,
    pub j: usize,
    pub f: NonlinearFn,
    pub truncation: Truncation,
}

impl KncsSpec {
    pub fn new(xi: C64, k: usize, j: usize, f: NonlinearFn) -> Result<Self> {
        let spec = Self { xi, k, j, f, truncation: Truncation::default() };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_truncation(mut self, truncation: Truncation) -> Self {
        self.truncation = truncation;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::InvalidParameter("K must be at least 1".into()));
        }
        if self.j >= self.k {
            return Err(Error::InvalidParameter(format!("j = {} must lie in [0, K−1] for K = {}", self.j, self.k)));
        }
        if !(self.xi.re.is_finite() && self.xi.im.is_finite()) {
            return Err(Error::InvalidParameter("ξ must be finite".into()));
        }
        Ok(())
    }
}

/// A real number carried as `sign · exp(ln_abs)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignedLog {
    pub ln_abs: f64,
    pub negative: bool,
}

impl SignedLog {
    pub const ONE: Self = Self { ln_abs: 0.0, negative: false };

    pub fn value(self) -> f64 {
        let v = self.ln_abs.exp();
        if self.negative {
            -v
        } else {
            v
        }
    }
}

/// The f-factorial `f(nK+j)! = Π_{q=0}^{n} f(qK+j)` for `n ≥ 1`, and 1 for `n = 0`.
///
/// The builders do not use this product: they use `Π_{q=1}^{n} f(qK+j)`, which
/// differs from it by the constant `f(j)` for every `n ≥ 1` and is the one
/// consistent with the eigenvalue equation when `f(j) ≠ 1`.
pub fn f_factorial(f: &NonlinearFn, n: usize, k: usize, j: usize) -> Result<SignedLog> {
    if n == 0 {
        return Ok(SignedLog::ONE);
    }
    let mut acc = SignedLog::ONE;
    for q in 0..=n {
        let v = f.checked(q * k + j)?;
        acc.ln_abs += v.abs().ln();
        acc.negative ^= v < 0.0;
    }
    Ok(acc)
}

/// Unnormalized-then-normalized lattice series plus its normalization constant.
struct Series {
    /// Normalized amplitudes over `0..=support_cutoff`.
    amps: Vec<C64>,
    /// `ln C`, where `C` multiplies the raw series `ξ^n/(√n! F(n))` to unit norm.
    ln_c: f64,
    support_cutoff: usize,
}

/// One raw term on the lattice `n = mK + j`.
struct Term {
    n: usize,
    ln_mag: f64,
    negative: bool,
}

/// Generate raw log-terms of `ξ^n/(√n! F(n))` on `n ≡ j (mod K)`.
fn raw_terms(xi_abs: f64, k: usize, j: usize, f: &NonlinearFn, policy: CutoffPolicy) -> Result<(Vec<Term>, f64)> {
    let ln_xi = xi_abs.ln();
    let ln_fact_j: f64 = (1..=j).map(|i| (i as f64).ln()).sum();
    let ln_mag0 = if j == 0 { 0.0 } else { j as f64 * ln_xi - 0.5 * ln_fact_j };
    let mut terms = vec![Term { n: j, ln_mag: ln_mag0, negative: false }];
    if xi_abs == 0.0 {
        if j > 0 {
            return Err(Error::ZeroVector);
        }
        return Ok((terms, 0.0));
    }
    let fixed = match policy {
        CutoffPolicy::Fixed(n) => Some(n),
        CutoffPolicy::Adaptive => None,
    };
    // Log of the running probability sum, and of the mass beyond a fixed cutoff.
    let mut ln_total = 2.0 * terms[0].ln_mag;
    let mut ln_beyond = f64::NEG_INFINITY;
    let mut cursor = (j, terms[0].ln_mag, false);
    loop {
        let (last_n, prev, last_negative) = cursor;
        let n = last_n + k;
        if n > MAX_CUTOFF {
            return Err(Error::NotNormalizable { max_cutoff: MAX_CUTOFF });
        }
        let fv = f.checked(n)?;
        let ln_rise: f64 = (last_n + 1..=n).map(|i| (i as f64).ln()).sum();
        let ln_mag = prev + k as f64 * ln_xi - 0.5 * ln_rise - fv.abs().ln();
        let negative = last_negative ^ (fv < 0.0);
        cursor = (n, ln_mag, negative);
        let ln_p = 2.0 * ln_mag;
        ln_total = log_add(ln_total, ln_p);
        if fixed.is_some_and(|c| n > c) {
            ln_beyond = log_add(ln_beyond, ln_p);
        } else {
            terms.push(Term { n, ln_mag, negative });
        }
        // Tail bound for a non-increasing term ratio r: t·r/(1−r).
        let ln_ratio = 2.0 * (ln_mag - prev);
        if ln_ratio < 0.0 {
            let r = ln_ratio.exp();
            let ln_tail = ln_p + (r / (1.0 - r)).ln() - ln_total;
            let converged = ln_tail < ADAPTIVE_TAIL.ln();
            let past_fixed = fixed.map_or(true, |c| n >= c);
            if converged && past_fixed {
                break;
            }
        }
    }
    let tail = (ln_beyond - ln_total).exp();
    if let Some(cutoff) = fixed {
        if tail > FIXED_TAIL_LIMIT {
            return Err(Error::CutoffTooSmall { cutoff, tail });
        }
    }
    Ok((terms, ln_total))
}

fn log_add(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a > b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// Series on `n = mK + j`, optionally keeping only terms with `keep(m)`.
fn lattice_series(
    xi: C64,
    k: usize,
    j: usize,
    f: &NonlinearFn,
    policy: CutoffPolicy,
    keep: impl Fn(usize) -> bool,
) -> Result<Series> {
    let (xi_abs, arg) = xi.to_polar();
    let (terms, _) = raw_terms(xi_abs, k, j, f, policy)?;
    let kept: Vec<&Term> = terms.iter().filter(|t| keep((t.n - j) / k)).collect();
    let ln_max = kept.iter().map(|t| t.ln_mag).fold(f64::NEG_INFINITY, f64::max);
    let sum: f64 = kept.iter().map(|t| (2.0 * (t.ln_mag - ln_max)).exp()).sum();
    let ln_c = -(ln_max + 0.5 * sum.ln());
    let support_cutoff = match policy {
        CutoffPolicy::Fixed(c) => c,
        CutoffPolicy::Adaptive => terms.last().map_or(j, |t| t.n),
    };
    let mut amps = vec![C64::default(); support_cutoff + 1];
    for t in kept {
        let mag = (t.ln_mag + ln_c).exp();
        let mag = if t.negative { -mag } else { mag };
        amps[t.n] = C64::from_polar(mag, t.n as f64 * arg);
    }
    Ok(Series { amps, ln_c, support_cutoff })
}

fn finish(series: Series, headroom: usize) -> FockVector {
    let mut amps = series.amps;
    amps.resize(series.support_cutoff + headroom + 1, C64::default());
    FockVector::from_normalized(amps)
}

fn kncs_series(spec: &KncsSpec) -> Result<Series> {
    spec.validate()?;
    lattice_series(spec.xi, spec.k, spec.j, &spec.f, spec.truncation.policy, |_| true)
}

/// Normalized `|ξ; K, j, f⟩`.
pub fn build_kncs(spec: &KncsSpec) -> Result<FockVector> {
    Ok(finish(kncs_series(spec)?, spec.truncation.headroom))
}

/// Normalization constant `C_Kj(|ξ|²)`.
pub fn kncs_norm_constant(spec: &KncsSpec) -> Result<f64> {
    Ok(kncs_series(spec)?.ln_c.exp())
}

/// Nonlinear coherent state `|χ; f⟩`, the `K = 1` member.
pub fn build_ncs(chi: C64, f: &NonlinearFn, truncation: Truncation) -> Result<FockVector> {
    build_kncs(&KncsSpec { xi: chi, k: 1, j: 0, f: f.clone(), truncation })
}

/// Glauber coherent state `|α⟩`.
pub fn coherent(alpha: C64, truncation: Truncation) -> Result<FockVector> {
    build_ncs(alpha, &NonlinearFn::unit(), truncation)
}

/// `‖a^K f(n̂) v − ξ^K v‖` over the components `m` whose image index `m + K`
/// lies inside the populated support.
pub fn eigen_residual(v: &FockVector, spec: &KncsSpec) -> Result<f64> {
    let k = spec.k;
    let Some(top) = v.support_top() else { return Ok(0.0) };
    if top < k {
        return Ok((0..=top).map(|m| (spec.xi.powu(k as u32) * v.amp(m)).norm_sqr()).sum::<f64>().sqrt());
    }
    let xik = spec.xi.powu(k as u32);
    let mut acc = 0.0;
    for m in 0..=top - k {
        let n = m + k;
        let ladder: f64 = (m + 1..=n).map(|i| (i as f64).ln()).sum::<f64>() * 0.5;
        let lowered = v.amp(n) * spec.f.checked(n)? * ladder.exp();
        acc += (lowered - xik * v.amp(m)).norm_sqr();
    }
    Ok(acc.sqrt())
}

/// Decompose a KNCS into `K` nonlinear coherent states on the circle
/// `χ_l = ξ e^{2πil/K}` with weights `(1/K)(C_Kj/C_10) e^{−2πijl/K}`.
///
/// The identity is exact for `f ≡ 1`. For other `f` the components are
/// eigenstates of `a f(n̂)`, whose `K`-fold products do not reproduce the
/// `a^K f(n̂)` eigenstate, and the weighted sum differs from [`build_kncs`].
pub fn decompose_kncs(spec: &KncsSpec) -> Result<Vec<(C64, FockVector)>> {
    let ln_ckj = kncs_series(spec)?.ln_c;
    let ncs_spec = |chi: C64| KncsSpec { xi: chi, k: 1, j: 0, f: spec.f.clone(), truncation: spec.truncation };
    let ln_c10 = kncs_series(&ncs_spec(spec.xi))?.ln_c;
    let k = spec.k as f64;
    let scale = (ln_ckj - ln_c10).exp() / k;
    (0..spec.k)
        .map(|l| {
            let angle = TAU * l as f64 / k;
            let chi = spec.xi * C64::from_polar(1.0, angle);
            let weight = C64::from_polar(scale, -angle * spec.j as f64);
            Ok((weight, build_kncs(&ncs_spec(chi))?))
        })
        .collect()
}

/// `Σ w_i v_i`, zero-padding to the longest component. The result is not renormalized.
pub fn superpose(parts: &[(C64, FockVector)]) -> Result<FockVector> {
    let n_max = parts.iter().map(|(_, v)| v.n_max()).max().unwrap_or(0);
    let mut amps = vec![C64::default(); n_max + 1];
    for (w, v) in parts {
        for (slot, a) in amps.iter_mut().zip(v.amps()) {
            *slot += w * a;
        }
    }
    FockVector::new(amps)
}

/// Rotation `T_m`: every `χ_l` turned by `2πm/K`, i.e. `c_n ← e^{2πimn/K} c_n`.
pub fn rotate(v: &FockVector, m: usize, k: usize) -> Result<FockVector> {
    if k == 0 || m >= k {
        return Err(Error::InvalidParameter(format!("rotation index m = {m} must lie in [0, K−1] for K = {k}")));
    }
    let amps = v
        .amps()
        .iter()
        .enumerate()
        .map(|(n, a)| a * C64::from_polar(1.0, TAU * ((m * n) % k) as f64 / k as f64))
        .collect();
    let out = FockVector::new(amps)?;
    Ok(if v.is_normalized() { normalize(&out)? } else { out })
}

/// `Σ_{l=0}^{L−1} exp(2πiql/L)`.
pub fn roots_of_unity_sum(l: usize, q: i64) -> Result<C64> {
    if l == 0 {
        return Err(Error::InvalidParameter("L must be at least 1".into()));
    }
    let lq = q.rem_euclid(l as i64) as usize;
    Ok((0..l).map(|i| C64::from_polar(1.0, TAU * ((lq * i) % l) as f64 / l as f64)).sum())
}

/// `J_K(m) = Σ_{q=0}^{K−1} exp(iπqm)`.
pub fn j_sum(k: usize, m: usize) -> Result<C64> {
    require_even_k(k)?;
    Ok((0..k).map(|q| C64::from_polar(1.0, PI * ((q * m) % 2) as f64)).sum())
}

fn require_even_k(k: usize) -> Result<()> {
    if k < 2 || k % 2 != 0 {
        return Err(Error::InvalidParameter(format!("fan and symmetric-even states need an even K ≥ 2, got {k}")));
    }
    Ok(())
}

/// Symmetric-even KNCS `|ξ; K, f⟩_se = |ξ; K, 0, f⟩` for even `K`.
pub fn build_sekncs(xi: C64, k: usize, f: &NonlinearFn) -> Result<FockVector> {
    build_sekncs_with(xi, k, f, Truncation::default())
}

pub fn build_sekncs_with(xi: C64, k: usize, f: &NonlinearFn, truncation: Truncation) -> Result<FockVector> {
    require_even_k(k)?;
    build_kncs(&KncsSpec { xi, k, j: 0, f: f.clone(), truncation })
}

/// Fan-state `|ξ; K, f⟩_F` with the default truncation.
pub fn build_fan(xi: C64, k: usize, f: &NonlinearFn) -> Result<FockVector> {
    build_fan_with(xi, k, f, Truncation::default())
}

/// Fan-state built directly in Fock space: `c[mK] ∝ J_K(m) ξ^{mK}/(√(mK)! F(mK))`,
/// which keeps only even `m`, so the support is `n ≡ 0 (mod 2K)`.
pub fn build_fan_with(xi: C64, k: usize, f: &NonlinearFn, truncation: Truncation) -> Result<FockVector> {
    require_even_k(k)?;
    let series = lattice_series(xi, k, 0, f, truncation.policy, |m| m % 2 == 0)?;
    Ok(finish(series, truncation.headroom))
}

/// The constants tying the fan-state to its SEKNCS components.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FanNormalization {
    pub c_k0: f64,
    pub d_k: f64,
    pub b_k: f64,
}

/// `C_K0`, `D_K = Σ_m |ξ|^{2mK} |J_K(m)|² / ((mK)! F(mK)²)` and `B_K` from
/// `B_K² C_K0² D_K = 1`.
pub fn fan_normalization(xi: C64, k: usize, f: &NonlinearFn, truncation: Truncation) -> Result<FanNormalization> {
    require_even_k(k)?;
    let (terms, _) = raw_terms(xi.norm(), k, 0, f, truncation.policy)?;
    let ln_se: Vec<f64> = terms.iter().map(|t| 2.0 * t.ln_mag).collect();
    let ln_d_terms: Vec<f64> = terms
        .iter()
        .zip(&ln_se)
        .filter(|(t, _)| (t.n / k) % 2 == 0)
        .map(|(_, lp)| lp + 2.0 * (k as f64).ln())
        .collect();
    let ln_sum = |xs: &[f64]| xs.iter().fold(f64::NEG_INFINITY, |acc, &x| log_add(acc, x));
    let ln_c = -0.5 * ln_sum(&ln_se);
    let ln_d = ln_sum(&ln_d_terms);
    Ok(FanNormalization { c_k0: ln_c.exp(), d_k: ln_d.exp(), b_k: (-ln_c - 0.5 * ln_d).exp() })
}

/// Reference fan construction `B_K Σ_q |ξ_q; K, f⟩_se` with `ξ_q = ξ e^{iπq/K}`.
///
/// Summing `K` nearly parallel vectors cancels digits, so this path is kept
/// for cross-checking [`build_fan_with`] only. The result is scaled by `B_K`
/// and not renormalized.
pub fn fan_by_superposition(xi: C64, k: usize, f: &NonlinearFn, truncation: Truncation) -> Result<FockVector> {
    let norm = fan_normalization(xi, k, f, truncation)?;
    let parts = geometry_points(xi, k, GeometryMode::Xiq)?
        .into_iter()
        .map(|xq| Ok((C64::new(norm.b_k, 0.0), build_sekncs_with(xq, k, f, truncation)?)))
        .collect::<Result<Vec<_>>>()?;
    superpose(&parts)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GeometryMode {
    /// `χ_l = ξ e^{2πil/K}`, the circle of NCS labels.
    Chi,
    /// `ξ_q = ξ e^{iπq/K}`, the fan of SEKNCS labels.
    Xiq,
}

pub fn geometry_points(xi: C64, k: usize, mode: GeometryMode) -> Result<Vec<C64>> {
    if k == 0 {
        return Err(Error::InvalidParameter("K must be at least 1".into()));
    }
    let step = match mode {
        GeometryMode::Chi => TAU,
        GeometryMode::Xiq => PI,
    } / k as f64;
    Ok((0..k).map(|i| xi * C64::from_polar(1.0, step * i as f64)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{inner, number_distribution};
    use approx::assert_abs_diff_eq;

    fn real(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    #[test]
    fn f_factorial_conventions() {
        let unit = NonlinearFn::unit();
        for (n, k, j) in [(0, 1, 0), (3, 2, 1), (7, 4, 3)] {
            assert_eq!(f_factorial(&unit, n, k, j).unwrap().value(), 1.0);
        }
        let f = NonlinearFn::new("n+1", |n| (n + 1) as f64);
        assert_eq!(f_factorial(&f, 0, 3, 2).unwrap().value(), 1.0);
        assert_abs_diff_eq!(f_factorial(&f, 2, 1, 0).unwrap().value(), 6.0, epsilon = 1e-12);
        let neg = NonlinearFn::new("alt", |n| if n % 2 == 1 { -2.0 } else { 1.0 });
        let v = f_factorial(&neg, 3, 1, 0).unwrap();
        assert!(!v.negative);
        assert_abs_diff_eq!(v.value(), 4.0, epsilon = 1e-12);
        let zero = NonlinearFn::new("zero", |n| if n == 4 { 0.0 } else { 1.0 });
        assert_eq!(f_factorial(&zero, 2, 2, 0), Err(Error::ZeroFactorValue { n: 4 }));
    }

    #[test]
    fn spec_validation() {
        let f = NonlinearFn::unit();
        assert!(KncsSpec::new(real(0.5), 0, 0, f.clone()).is_err());
        assert!(KncsSpec::new(real(0.5), 3, 3, f.clone()).is_err());
        assert!(KncsSpec::new(C64::new(f64::INFINITY, 0.0), 2, 0, f).is_err());
    }

    #[test]
    fn kncs_k1_is_poisson_coherent() {
        let alpha = C64::new(0.5, 0.2);
        let v = coherent(alpha, Truncation::default()).unwrap();
        let pref = (-alpha.norm_sqr() / 2.0).exp();
        let mut fact = 1.0;
        for n in 0..25 {
            if n > 0 {
                fact *= n as f64;
            }
            let want = pref * alpha.powu(n as u32) / fact.sqrt();
            assert!((v.amp(n) - want).norm() < 1e-15, "n={n}");
        }
    }

    #[test]
    fn zero_amplitude_gives_vacuum() {
        let f = NonlinearFn::unit();
        let v = build_kncs(&KncsSpec::new(real(0.0), 3, 0, f.clone()).unwrap()).unwrap();
        assert_eq!(v.support_top(), Some(0));
        assert_eq!(v.amp(0), real(1.0));
        assert_eq!(build_fan(real(0.0), 4, &f).unwrap().support_top(), Some(0));
        // j > 0 at ξ = 0 has no nonzero amplitude at all.
        assert_eq!(build_kncs(&KncsSpec::new(real(0.0), 3, 1, f).unwrap()), Err(Error::ZeroVector));
    }

    #[test]
    fn odd_kncs_support_and_eigenvalue() {
        let spec = KncsSpec::new(real(0.8), 2, 1, NonlinearFn::unit()).unwrap();
        let v = build_kncs(&spec).unwrap();
        for (n, p) in number_distribution(&v).iter().enumerate() {
            if n % 2 == 0 {
                assert_eq!(*p, 0.0);
            }
        }
        assert!(eigen_residual(&v, &spec).unwrap() < 1e-10);
        assert_abs_diff_eq!(v.norm_sqr(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn eigen_residual_edge_cases() {
        let spec = KncsSpec::new(C64::new(0.3, 0.9), 1, 0, NonlinearFn::unit()).unwrap();
        assert!(eigen_residual(&build_kncs(&spec).unwrap(), &spec).unwrap() < 1e-12);
        let vac = KncsSpec::new(real(0.0), 2, 0, NonlinearFn::unit()).unwrap();
        assert_eq!(eigen_residual(&build_kncs(&vac).unwrap(), &vac).unwrap(), 0.0);
    }

    #[test]
    fn nonlinear_eigenstates_with_offset_residue() {
        // f(j) ≠ 1 here, so the eigenvalue equation fixes the product convention.
        let f = NonlinearFn::inv_sqrt();
        for (k, j) in [(2, 1), (3, 2), (4, 3)] {
            let spec = KncsSpec::new(C64::new(0.6, 0.3), k, j, f.clone()).unwrap();
            let v = build_kncs(&spec).unwrap();
            assert!(eigen_residual(&v, &spec).unwrap() < 1e-10, "k={k} j={j}");
        }
    }

    #[test]
    fn inv_sqrt_ncs_is_not_normalizable_at_unit_amplitude() {
        let r = build_ncs(real(1.0), &NonlinearFn::inv_sqrt(), Truncation::default());
        assert_eq!(r, Err(Error::NotNormalizable { max_cutoff: MAX_CUTOFF }));
    }

    #[test]
    fn fixed_cutoff_tail_check() {
        let spec = KncsSpec::new(real(1.0), 1, 0, NonlinearFn::unit()).unwrap();
        let small = spec.clone().with_truncation(Truncation::fixed(5, 4));
        assert!(matches!(build_kncs(&small), Err(Error::CutoffTooSmall { cutoff: 5, .. })));
        let big = spec.with_truncation(Truncation::fixed(40, 4));
        let v = build_kncs(&big).unwrap();
        assert_eq!(v.n_max(), 44);
    }

    #[test]
    fn decomposition_trivial_and_even_cases() {
        let f = NonlinearFn::unit();
        let spec = KncsSpec::new(real(0.9), 1, 0, f.clone()).unwrap();
        let parts = decompose_kncs(&spec).unwrap();
        assert_eq!(parts.len(), 1);
        assert_abs_diff_eq!(parts[0].0.re, 1.0, epsilon = 1e-14);

        let spec = KncsSpec::new(real(0.9), 2, 0, f).unwrap();
        let parts = decompose_kncs(&spec).unwrap();
        let w0 = parts[0].0;
        for (w, _) in &parts {
            assert!((w - w0).norm() < 1e-15);
        }
        let rebuilt = superpose(&parts).unwrap();
        let direct = build_kncs(&spec).unwrap();
        assert_abs_diff_eq!(inner(&direct, &rebuilt).norm(), 1.0, epsilon = 1e-10);
        assert_abs_diff_eq!(rebuilt.norm_sqr(), 1.0, epsilon = 1e-10);
    }

    #[test]
    fn decomposition_fails_for_nonunit_f_with_k_above_one() {
        let spec = KncsSpec::new(real(0.8), 2, 0, NonlinearFn::inv_sqrt()).unwrap();
        let rebuilt = normalize(&superpose(&decompose_kncs(&spec).unwrap()).unwrap()).unwrap();
        let overlap = inner(&build_kncs(&spec).unwrap(), &rebuilt).norm();
        assert!(overlap < 1.0 - 1e-6, "overlap {overlap}");
    }

    #[test]
    fn rotation_phase_law() {
        let f = NonlinearFn::unit();
        for k in 1..=5 {
            for j in 0..k {
                let spec = KncsSpec::new(C64::new(0.7, 0.1), k, j, f.clone()).unwrap();
                let v = build_kncs(&spec).unwrap();
                for m in 0..k {
                    let r = rotate(&v, m, k).unwrap();
                    let expected = v.scaled(C64::from_polar(1.0, TAU * (j * m) as f64 / k as f64));
                    let ov = inner(&expected, &r);
                    assert_abs_diff_eq!(ov.re, 1.0, epsilon = 1e-10);
                    assert_abs_diff_eq!(ov.im, 0.0, epsilon = 1e-10);
                }
            }
        }
        assert!(rotate(&FockVector::vacuum(2), 3, 3).is_err());
    }

    #[test]
    fn sekncs_is_rotation_invariant_and_even() {
        let f = NonlinearFn::unit();
        let v = build_sekncs(C64::new(0.9, 0.4), 4, &f).unwrap();
        for m in 0..4 {
            let r = rotate(&v, m, 4).unwrap();
            for n in 0..=v.n_max() {
                assert!((r.amp(n) - v.amp(n)).norm() < 1e-15);
            }
        }
        for n in (1..=v.n_max()).step_by(2) {
            assert_eq!(v.amp(n), C64::default());
        }
        assert!(build_sekncs(real(0.5), 3, &f).is_err());
    }

    #[test]
    fn sekncs_k2_is_even_cat() {
        let x = 0.8f64;
        let v = build_sekncs(real(x), 2, &NonlinearFn::unit()).unwrap();
        let plus = coherent(real(x), Truncation::default()).unwrap();
        let minus = coherent(real(-x), Truncation::default()).unwrap();
        let cat = normalize(&superpose(&[(real(1.0), plus), (real(1.0), minus)]).unwrap()).unwrap();
        assert_abs_diff_eq!(inner(&cat, &v).norm(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn roots_of_unity_and_j_sum() {
        assert!((roots_of_unity_sum(4, 0).unwrap() - real(4.0)).norm() < 1e-13);
        assert!(roots_of_unity_sum(4, 2).unwrap().norm() < 1e-13);
        assert!((roots_of_unity_sum(4, 8).unwrap() - real(4.0)).norm() < 1e-13);
        assert!(roots_of_unity_sum(7, -3).unwrap().norm() < 1e-13);
        assert!(roots_of_unity_sum(0, 1).is_err());
        assert!((j_sum(4, 2).unwrap() - real(4.0)).norm() < 1e-14);
        assert!(j_sum(4, 3).unwrap().norm() < 1e-14);
        assert!(j_sum(2, 1).unwrap().norm() < 1e-14);
        assert!(j_sum(3, 1).is_err());
    }

    #[test]
    fn fan_support_lattice() {
        let f = NonlinearFn::unit();
        for k in [2, 4, 6] {
            let v = build_fan(real(1.1), k, &f).unwrap();
            for n in 0..=v.n_max() {
                if n % (2 * k) != 0 {
                    assert_eq!(v.amp(n), C64::default());
                }
            }
            assert_eq!(v.support_lattice(), 2 * k);
            assert_abs_diff_eq!(v.norm_sqr(), 1.0, epsilon = 1e-12);
        }
        assert!(build_fan(real(0.5), 3, &f).is_err());
    }

    #[test]
    fn fan_k2_equals_orthogonal_even_state() {
        let f = NonlinearFn::unit();
        let xi = real(0.75);
        let direct = build_fan(xi, 2, &f).unwrap();
        let a = build_sekncs(xi, 2, &f).unwrap();
        let b = build_sekncs(xi * C64::i(), 2, &f).unwrap();
        let oe = normalize(&superpose(&[(real(1.0), a), (real(1.0), b)]).unwrap()).unwrap();
        assert_abs_diff_eq!(inner(&direct, &oe).norm(), 1.0, epsilon = 1e-10);
    }

    #[test]
    fn fan_superposition_is_normalized_by_b_k() {
        for f in [NonlinearFn::unit(), NonlinearFn::inv_sqrt()] {
            for k in [2, 4, 6] {
                let xi = C64::new(0.9, 0.2);
                let sup = fan_by_superposition(xi, k, &f, Truncation::default()).unwrap();
                assert_abs_diff_eq!(sup.norm_sqr(), 1.0, epsilon = 1e-10);
                let direct = build_fan(xi, k, &f).unwrap();
                assert_abs_diff_eq!(inner(&direct, &sup).norm(), 1.0, epsilon = 1e-10);
            }
        }
        let n0 = fan_normalization(real(0.0), 4, &NonlinearFn::unit(), Truncation::default()).unwrap();
        assert_abs_diff_eq!(n0.b_k, 0.25, epsilon = 1e-15);
        assert_abs_diff_eq!(n0.d_k, 16.0, epsilon = 1e-12);
    }

    #[test]
    fn geometry() {
        let pts = geometry_points(real(1.0), 4, GeometryMode::Chi).unwrap();
        let want = [real(1.0), C64::i(), real(-1.0), -C64::i()];
        for (p, w) in pts.iter().zip(want) {
            assert!((p - w).norm() < 1e-15);
        }
        let pts = geometry_points(real(1.0), 2, GeometryMode::Xiq).unwrap();
        assert!((pts[1] - C64::i()).norm() < 1e-15);
        let pts = geometry_points(real(1.0), 8, GeometryMode::Xiq).unwrap();
        assert_eq!(pts.len(), 8);
        for (q, p) in pts.iter().enumerate() {
            assert_abs_diff_eq!(p.arg(), PI * q as f64 / 8.0, epsilon = 1e-15);
        }
    }
}
