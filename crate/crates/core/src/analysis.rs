//! Landmarks of the fan-state squeezing landscape: the critical amplitude
//! `ξ_c`, the optimal amplitude `ξ_M`, squeezing and stretching directions,
//! the minimum squeezing order and polar flower profiles.
//!
//! Everything here is evaluated along real `ξ` with `f ≡ 1`.

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::{PI, TAU};

use crate::error::{Error, Result};
use crate::fock::FockVector;
use crate::nonlinear::NonlinearFn;
use crate::search::{bisect, golden_section, parabolic_offset};
use crate::squeezing::{
    fan_squeeze_numeric, headroom_for, is_supported, squeeze_analytic, squeeze_closed_form, squeeze_numeric,
};
use crate::states::{build_fan_with, Truncation};

/// `S` below this counts as squeezed.
pub const SQUEEZE_THRESHOLD: f64 = -1e-9;

/// How `S(φ, ξ)` of the fan-state is evaluated.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "truncation")]
pub enum Evaluator {
    /// Rederived closed form where available, the moment engine elsewhere.
    #[default]
    ClosedForm,
    /// Published closed form where available, the moment engine elsewhere.
    Printed,
    /// Moment engine only.
    Numeric(Truncation),
}

impl Evaluator {
    pub fn label(&self) -> &'static str {
        match self {
            Self::ClosedForm => "closed_form",
            Self::Printed => "printed",
            Self::Numeric(_) => "numeric",
        }
    }

    pub fn squeeze(&self, k: usize, n: usize, xi: f64, phi: f64) -> Result<f64> {
        match self {
            Self::ClosedForm if is_supported(k, n) => squeeze_closed_form(k, n, xi, phi),
            Self::Printed if is_supported(k, n) => squeeze_analytic(k, n, xi, phi),
            Self::Numeric(t) => fan_squeeze_numeric(k, n, xi, phi, *t),
            _ => fan_squeeze_numeric(k, n, xi, phi, headroom_for(n)),
        }
    }

    /// `S` on the grid `φ_i = 2πi/grid`, building the state at most once.
    pub fn squeeze_row(&self, k: usize, n: usize, xi: f64, grid: usize) -> Result<Vec<f64>> {
        let phis = (0..grid).map(|i| TAU * i as f64 / grid as f64);
        let truncation = match self {
            Self::ClosedForm | Self::Printed if is_supported(k, n) => {
                return phis.map(|phi| self.squeeze(k, n, xi, phi)).collect();
            }
            Self::Numeric(t) => *t,
            _ => headroom_for(n),
        };
        let v = build_fan_with(C64::new(xi, 0.0), k, &NonlinearFn::unit(), truncation)?;
        phis.map(|phi| squeeze_numeric(&v, phi, n)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AnalysisOptions {
    pub bracket: (f64, f64),
    pub xtol: f64,
    /// Points of the coarse scan preceding every search.
    pub coarse: usize,
    /// φ points per turn for direction finding.
    pub direction_grid: usize,
    pub evaluator: Evaluator,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        Self { bracket: (0.01, 2.0), xtol: 1e-9, coarse: 64, direction_grid: 1024, evaluator: Evaluator::ClosedForm }
    }
}

impl AnalysisOptions {
    pub fn with_evaluator(mut self, evaluator: Evaluator) -> Self {
        self.evaluator = evaluator;
        self
    }

    fn coarse_grid(&self) -> Result<Vec<f64>> {
        let (lo, hi) = self.bracket;
        if !(lo > 0.0 && hi > lo && hi.is_finite()) {
            return Err(Error::InvalidParameter(format!("bad amplitude bracket ({lo}, {hi})")));
        }
        if self.coarse < 4 {
            return Err(Error::InvalidParameter(format!("coarse scan needs at least 4 points, got {}", self.coarse)));
        }
        let m = self.coarse - 1;
        Ok((0..=m).map(|i| lo + (hi - lo) * i as f64 / m as f64).collect())
    }
}

/// First squeezing direction `π/(2K)`.
pub fn first_squeezing_direction(k: usize) -> f64 {
    PI / (2 * k) as f64
}

fn check_pair(k: usize, n: usize) -> Result<()> {
    if k == 0 || n < 2 || n % 2 != 0 {
        return Err(Error::InvalidParameter(format!("need K ≥ 1 and even N ≥ 2, got K = {k}, N = {n}")));
    }
    Ok(())
}

/// Supremum of the squeezing interval along `φ = π/(2K)`: the last
/// negative-to-positive sign change of `S` on the coarse scan, bisected.
pub fn find_critical_xi(k: usize, n: usize, opts: &AnalysisOptions) -> Result<f64> {
    check_pair(k, n)?;
    let phi = first_squeezing_direction(k);
    let s = |xi: f64| opts.evaluator.squeeze(k, n, xi, phi);
    let xs = opts.coarse_grid()?;
    let vals = xs.iter().map(|&x| s(x)).collect::<Result<Vec<_>>>()?;
    let crossing = (1..xs.len()).rev().find(|&i| vals[i - 1] < 0.0 && vals[i] >= 0.0);
    match crossing {
        Some(i) => bisect(s, xs[i - 1], xs[i], opts.xtol),
        None => Err(Error::NoSignChange { lo: opts.bracket.0, hi: opts.bracket.1 }),
    }
}

/// Deepest squeezing along `φ = π/(2K)`: `(ξ_M, S(ξ_M))`.
pub fn find_optimal_xi(k: usize, n: usize, opts: &AnalysisOptions) -> Result<(f64, f64)> {
    check_pair(k, n)?;
    let phi = first_squeezing_direction(k);
    let s = |xi: f64| opts.evaluator.squeeze(k, n, xi, phi);
    let xs = opts.coarse_grid()?;
    let vals = xs.iter().map(|&x| s(x)).collect::<Result<Vec<_>>>()?;
    let minima: Vec<usize> = (1..xs.len() - 1)
        .filter(|&i| vals[i] < SQUEEZE_THRESHOLD && vals[i] <= vals[i - 1] && vals[i] < vals[i + 1])
        .collect();
    match minima.as_slice() {
        [] => Err(Error::NoSqueezing { k, n }),
        [i] => golden_section(s, xs[i - 1], xs[i + 1], opts.xtol),
        _ => Err(Error::NotUnimodal { minima: minima.len() }),
    }
}

fn wrap_angle(phi: f64) -> f64 {
    let w = phi.rem_euclid(TAU);
    if TAU - w < 1e-12 {
        0.0
    } else {
        w
    }
}

/// Local extrema of a periodic sample row, refined by a parabola through
/// each extremum and its neighbours. Empty when the row is flat.
pub fn periodic_extrema(values: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let m = values.len();
    let (lo, hi) = values.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    if m < 3 || hi - lo <= 1e-12 * hi.abs().max(lo.abs()).max(1.0) {
        return (Vec::new(), Vec::new());
    }
    let h = TAU / m as f64;
    let (mut minima, mut maxima) = (Vec::new(), Vec::new());
    for i in 0..m {
        let (y0, y1, y2) = (values[(i + m - 1) % m], values[i], values[(i + 1) % m]);
        let at = |i: usize| wrap_angle(h * i as f64 + parabolic_offset(y0, y1, y2, h));
        if y1 < y0 && y1 <= y2 {
            minima.push(at(i));
        } else if y1 > y0 && y1 >= y2 {
            maxima.push(at(i));
        }
    }
    minima.sort_by(f64::total_cmp);
    maxima.sort_by(f64::total_cmp);
    (minima, maxima)
}

/// Squeezing (minima of `S`) and stretching (maxima) directions over a turn.
pub fn find_directions(
    k: usize,
    n: usize,
    xi: f64,
    grid: usize,
    evaluator: &Evaluator,
) -> Result<(Vec<f64>, Vec<f64>)> {
    check_pair(k, n)?;
    if grid < 32 * k {
        return Err(Error::InvalidParameter(format!("direction grid needs at least 32K = {} points, got {grid}", 32 * k)));
    }
    Ok(periodic_extrema(&evaluator.squeeze_row(k, n, xi, grid)?))
}

/// Smallest even `N ≤ n_max` at which the fan-state squeezes somewhere on
/// `xi_grid × {2πi/(16K)}`, using the moment engine.
pub fn min_squeezing_order(k: usize, xi_grid: &[f64], n_max: usize) -> Result<usize> {
    if k == 0 || k % 2 != 0 {
        return Err(Error::InvalidParameter(format!("minimum order is defined for even K, got {k}")));
    }
    if n_max < 2 * k || n_max % 2 != 0 {
        return Err(Error::InvalidParameter(format!("N_max must be even and ≥ 2K, got {n_max}")));
    }
    let phi_grid = 16 * k;
    let orders: Vec<usize> = (2..=n_max).step_by(2).collect();
    let per_xi = xi_grid
        .par_iter()
        .map(|&xi| {
            let v = build_fan_with(C64::new(xi, 0.0), k, &NonlinearFn::unit(), headroom_for(n_max))?;
            orders
                .iter()
                .map(|&n| {
                    (0..phi_grid).try_fold(f64::INFINITY, |acc, i| {
                        Ok(acc.min(squeeze_numeric(&v, TAU * i as f64 / phi_grid as f64, n)?))
                    })
                })
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    orders
        .iter()
        .enumerate()
        .find(|&(idx, _)| per_xi.iter().any(|row| row[idx] < SQUEEZE_THRESHOLD))
        .map(|(_, &n)| n)
        .ok_or(Error::NotFound { k, n_max })
}

/// Polar samples `(φ_i, S(φ_i))` with `φ_i = 2πi/grid`.
pub fn flower_profile(k: usize, n: usize, xi: f64, grid: usize, evaluator: &Evaluator) -> Result<Vec<(f64, f64)>> {
    check_pair(k, n)?;
    check_flower_grid(grid)?;
    let row = evaluator.squeeze_row(k, n, xi, grid)?;
    Ok(row.into_iter().enumerate().map(|(i, s)| (TAU * i as f64 / grid as f64, s)).collect())
}

/// [`flower_profile`] of an arbitrary state through the moment engine.
pub fn flower_profile_of(v: &FockVector, n: usize, grid: usize) -> Result<Vec<(f64, f64)>> {
    check_flower_grid(grid)?;
    (0..grid)
        .map(|i| {
            let phi = TAU * i as f64 / grid as f64;
            Ok((phi, squeeze_numeric(v, phi, n)?))
        })
        .collect()
}

fn check_flower_grid(grid: usize) -> Result<()> {
    if grid < 64 {
        return Err(Error::InvalidParameter(format!("flower grid needs at least 64 points, got {grid}")));
    }
    Ok(())
}

/// Sign structure of a flower profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Wings {
    /// Negative lobes (squeezing).
    pub negative: usize,
    /// Positive lobes (stretching).
    pub positive: usize,
    /// Largest `S` on a positive lobe.
    pub big_wing_max: f64,
    /// Most negative `S`.
    pub small_wing_min: f64,
}

/// Counts maximal runs of one sign around the turn; samples with
/// `|S| ≤ 1e-12` do not split or start a lobe.
pub fn wings(profile: &[(f64, f64)]) -> Wings {
    let signs: Vec<i8> = profile
        .iter()
        .filter(|(_, s)| s.abs() > 1e-12)
        .map(|(_, s)| if *s > 0.0 { 1 } else { -1 })
        .collect();
    let (mut negative, mut positive) = (0, 0);
    for i in 0..signs.len() {
        let prev = signs[(i + signs.len() - 1) % signs.len()];
        if signs[i] != prev || signs.len() == 1 {
            if signs[i] > 0 {
                positive += 1;
            } else {
                negative += 1;
            }
        }
    }
    if negative == 0 && positive == 0 && !signs.is_empty() {
        if signs[0] > 0 {
            positive = 1;
        } else {
            negative = 1;
        }
    }
    let big_wing_max = profile.iter().map(|p| p.1).filter(|s| *s > 0.0).fold(0.0, f64::max);
    let small_wing_min = profile.iter().map(|p| p.1).filter(|s| *s < 0.0).fold(0.0, f64::min);
    Wings { negative, positive, big_wing_max, small_wing_min }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriticalReport {
    pub k: usize,
    pub n: usize,
    pub xi_c: f64,
    pub xi_m: f64,
    pub s_min: f64,
    pub directions_sq: Vec<f64>,
    pub directions_st: Vec<f64>,
}

/// `ξ_c`, `ξ_M`, `S(ξ_M)` and the directions at `ξ_M`.
pub fn critical_report(k: usize, n: usize, opts: &AnalysisOptions) -> Result<CriticalReport> {
    check_pair(k, n)?;
    if n < 2 * k {
        return Err(Error::NoSqueezing { k, n });
    }
    let xi_c = match find_critical_xi(k, n, opts) {
        Err(Error::NoSignChange { .. }) => return Err(Error::NoSqueezing { k, n }),
        other => other?,
    };
    let (xi_m, s_min) = find_optimal_xi(k, n, opts)?;
    let (directions_sq, directions_st) = find_directions(k, n, xi_m, opts.direction_grid.max(32 * k), &opts.evaluator)?;
    Ok(CriticalReport { k, n, xi_c, xi_m, s_min, directions_sq, directions_st })
}
