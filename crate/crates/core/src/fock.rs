//! Truncated Fock-space vectors and the two moment engines built on them.
//!
//! Normally ordered moments `⟨a†^p a^q⟩` are summed directly over the basis.
//! Quadrature moments `⟨(X_φ − ⟨X_φ⟩)^N⟩` are computed by repeated operator
//! application with explicit growth of the vector, so a state with enough
//! zero headroom above its support is acted on exactly. The two paths share
//! no code beyond the amplitude storage and serve as oracles for each other.

use num_complex::Complex64 as C64;
use std::f64::consts::FRAC_1_SQRT_2;

use crate::error::{Error, Result};

/// Weight allowed in the top `N` entries before a quadrature moment of order
/// `N` is considered truncated.
pub const HEADROOM_TOLERANCE: f64 = 1e-20;

/// Relative size of the estimated missing contribution at which a normally
/// ordered moment is rejected.
pub const MOMENT_TAIL_TOLERANCE: f64 = 1e-10;

/// Imaginary residue above which a Hermitian expectation value is an error.
pub const IMAG_TOLERANCE: f64 = 1e-8;

/// Complex amplitudes over `|0⟩..|n_max⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct FockVector {
    amps: Vec<C64>,
    normalized: bool,
}

impl FockVector {
    /// Wrap an amplitude array. The array must be non-empty.
    pub fn new(amps: Vec<C64>) -> Result<Self> {
        if amps.is_empty() {
            return Err(Error::InvalidParameter("Fock vector needs at least one amplitude".into()));
        }
        Ok(Self { amps, normalized: false })
    }

    pub fn from_real(amps: &[f64]) -> Result<Self> {
        Self::new(amps.iter().map(|&a| C64::new(a, 0.0)).collect())
    }

    /// Number state `|n⟩` stored with cutoff `n_max ≥ n`.
    pub fn basis(n: usize, n_max: usize) -> Self {
        let mut amps = vec![C64::new(0.0, 0.0); n_max.max(n) + 1];
        amps[n] = C64::new(1.0, 0.0);
        Self { amps, normalized: true }
    }

    pub fn vacuum(n_max: usize) -> Self {
        Self::basis(0, n_max)
    }

    /// Amplitudes already normalized by the caller.
    pub(crate) fn from_normalized(amps: Vec<C64>) -> Self {
        debug_assert!((norm_sqr_of(&amps) - 1.0).abs() < 1e-10);
        Self { amps, normalized: true }
    }

    pub fn n_max(&self) -> usize {
        self.amps.len() - 1
    }

    pub fn amps(&self) -> &[C64] {
        &self.amps
    }

    /// Amplitude of `|n⟩`, zero above the cutoff.
    pub fn amp(&self, n: usize) -> C64 {
        self.amps.get(n).copied().unwrap_or_default()
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn norm_sqr(&self) -> f64 {
        norm_sqr_of(&self.amps)
    }

    /// Same state with zeros appended up to `n_max`. Never truncates.
    pub fn padded(&self, n_max: usize) -> Self {
        let mut amps = self.amps.clone();
        if n_max + 1 > amps.len() {
            amps.resize(n_max + 1, C64::default());
        }
        Self { amps, normalized: self.normalized }
    }

    /// Highest index carrying a nonzero amplitude.
    pub fn support_top(&self) -> Option<usize> {
        self.amps.iter().rposition(|a| *a != C64::default())
    }

    /// Largest `L` such that the support lies in one residue class mod `L`.
    ///
    /// Returns 0 when the support is a single basis state (or empty).
    pub fn support_lattice(&self) -> usize {
        let mut support = self
            .amps
            .iter()
            .enumerate()
            .filter(|(_, a)| **a != C64::default())
            .map(|(n, _)| n);
        let Some(first) = support.next() else { return 0 };
        support.fold(0, |g, n| gcd(g, n - first))
    }

    /// Multiply every amplitude by `factor`.
    pub fn scaled(&self, factor: C64) -> Self {
        let normalized = self.normalized && (factor.norm() - 1.0).abs() < 1e-15;
        Self { amps: self.amps.iter().map(|a| a * factor).collect(), normalized }
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn norm_sqr_of(amps: &[C64]) -> f64 {
    amps.iter().map(|a| a.norm_sqr()).sum()
}

/// Scale `v` to unit norm.
pub fn normalize(v: &FockVector) -> Result<FockVector> {
    let peak = v.amps.iter().map(|a| a.norm()).fold(0.0, f64::max);
    if !(peak > 0.0) || !peak.is_finite() {
        return Err(Error::ZeroVector);
    }
    let rescaled: Vec<C64> = v.amps.iter().map(|a| a / peak).collect();
    let norm = norm_sqr_of(&rescaled).sqrt();
    let amps = rescaled.into_iter().map(|a| a / norm).collect();
    Ok(FockVector { amps, normalized: true })
}

/// `⟨u|v⟩ = Σ conj(u_n) v_n`; the shorter vector is implicitly zero-padded.
pub fn inner(u: &FockVector, v: &FockVector) -> C64 {
    u.amps.iter().zip(&v.amps).map(|(a, b)| a.conj() * b).sum()
}

/// `ln(n!/(n−k)!)` as a sum of `k` logarithms.
#[inline]
fn ln_falling(n: usize, k: usize) -> f64 {
    (n + 1 - k..=n).map(|i| (i as f64).ln()).sum()
}

/// `⟨a†^p a^q⟩` by direct summation over the Fock basis.
///
/// Terms whose partner index `n − q + p` lies above the cutoff are missing
/// from the sum; their size is estimated from the local amplitude and the
/// moment is rejected when that estimate is not negligible.
pub fn normally_ordered_moment(v: &FockVector, p: usize, q: usize) -> Result<C64> {
    let n_max = v.n_max();
    let mut sum = C64::default();
    let mut missing = 0.0;
    for n in q..=n_max {
        let m = n - q + p;
        let amp_n = v.amps[n];
        if amp_n == C64::default() {
            continue;
        }
        let weight = (0.5 * (ln_falling(n, q) + ln_falling(m, p))).exp();
        if m <= n_max {
            sum += v.amps[m].conj() * amp_n * weight;
        } else {
            missing += amp_n.norm_sqr() * weight;
        }
    }
    if missing > 0.0 && missing > MOMENT_TAIL_TOLERANCE * sum.norm() {
        return Err(Error::CutoffTooSmall { cutoff: n_max, tail: missing });
    }
    Ok(sum)
}

/// All normally ordered moments `⟨a†^p a^q⟩` with `p + q ≤ max_order`.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentTable {
    max_order: usize,
    entries: Vec<C64>,
}

impl MomentTable {
    pub fn new(v: &FockVector, max_order: usize) -> Result<Self> {
        let side = max_order + 1;
        let mut entries = vec![C64::default(); side * side];
        for p in 0..=max_order {
            for q in 0..=max_order - p {
                entries[p * side + q] = normally_ordered_moment(v, p, q)?;
            }
        }
        Ok(Self { max_order, entries })
    }

    pub fn max_order(&self) -> usize {
        self.max_order
    }

    pub fn get(&self, p: usize, q: usize) -> Option<C64> {
        (p + q <= self.max_order).then(|| self.entries[p * (self.max_order + 1) + q])
    }
}

/// `(X_φ − shift) w` with `X_φ = (a e^{−iφ} + a† e^{iφ})/√2`; output grows by one.
fn shifted_quadrature(w: &[C64], phase: C64, shift: f64) -> Vec<C64> {
    let len = w.len();
    let down = phase.conj() * FRAC_1_SQRT_2;
    let up = phase * FRAC_1_SQRT_2;
    let mut out = vec![C64::default(); len + 1];
    for (m, slot) in out.iter_mut().enumerate() {
        let mut acc = C64::default();
        if m + 1 < len {
            acc += down * ((m + 1) as f64).sqrt() * w[m + 1];
        }
        if m >= 1 && m - 1 < len {
            acc += up * (m as f64).sqrt() * w[m - 1];
        }
        if m < len {
            acc -= w[m] * shift;
        }
        *slot = acc;
    }
    out
}

/// `X_φ v`. The result has cutoff `n_max + 1`.
pub fn apply_quadrature(v: &FockVector, phi: f64) -> FockVector {
    let amps = shifted_quadrature(&v.amps, C64::from_polar(1.0, phi), 0.0);
    FockVector { amps, normalized: false }
}

/// `⟨X_φ⟩`, real for any state.
pub fn quadrature_mean(v: &FockVector, phi: f64) -> f64 {
    let xv = apply_quadrature(v, phi);
    inner(v, &xv).re
}

/// `⟨(ΔX_φ)^N⟩` with `ΔX_φ = X_φ − ⟨X_φ⟩`, by `N` applications of the
/// shifted quadrature.
pub fn central_quadrature_moment(v: &FockVector, phi: f64, order: usize) -> Result<f64> {
    if order < 2 || order % 2 != 0 {
        return Err(Error::InvalidParameter(format!("moment order must be even and ≥ 2, got {order}")));
    }
    let len = v.amps.len();
    let top: f64 = v.amps[len.saturating_sub(order)..].iter().map(|a| a.norm_sqr()).sum();
    if top > HEADROOM_TOLERANCE {
        return Err(Error::CutoffTooSmall { cutoff: v.n_max(), tail: top });
    }
    let phase = C64::from_polar(1.0, phi);
    let mean = inner(v, &FockVector { amps: shifted_quadrature(&v.amps, phase, 0.0), normalized: false }).re;
    let mut w = v.amps.clone();
    for _ in 0..order {
        w = shifted_quadrature(&w, phase, mean);
    }
    let value: C64 = v.amps.iter().zip(&w).map(|(a, b)| a.conj() * b).sum();
    if value.im.abs() > IMAG_TOLERANCE * value.re.abs().max(1.0) {
        return Err(Error::NonHermitianResult { imag: value.im });
    }
    Ok(value.re)
}

/// `P(n) = |amps[n]|²`.
pub fn number_distribution(v: &FockVector) -> Vec<f64> {
    v.amps.iter().map(|a| a.norm_sqr()).collect()
}
