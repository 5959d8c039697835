//! Finite-size scaling fits, parameter derivatives of the Fisher density,
//! fidelity susceptibilities, and correlation-collapse diagnostics.
//!
//! The Fisher density follows `f_Q = 1 + c L^b`; `b` and `c` are extracted
//! by linear least squares on `(log L, log(f_Q - 1))`, with a flat branch
//! (`b = 0`, `c = mean(f_Q) - 1`) when the samples are size-independent.
//! The weighted derivative decomposes as
//!
//! ```text
//! (1/f_Q) ∂f_Q/∂η = cL^b/(1 + cL^b) · ((1/c) ∂c/∂η + ∂b/∂η · log L)
//! ```
//!
//! Fidelity susceptibilities come from the closed forms
//! `χ_η = (1/4) Σ_{n=0}^{L/2-1} (dθ_{k_n}/dη)²` over the half grid k < π.

use crate::correlators::{self, CorrelationProfile, OperatorKind};
use crate::error::{Error, Result};
use crate::model::{self, ModelParams};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Which model parameter a derivative or susceptibility refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ParamAxis {
    Mu,
    Delta,
    Alpha,
}

impl ParamAxis {
    pub fn get(&self, p: &ModelParams) -> f64 {
        match self {
            ParamAxis::Mu => p.mu,
            ParamAxis::Delta => p.delta,
            ParamAxis::Alpha => p.alpha,
        }
    }

    pub fn with_value(&self, p: &ModelParams, v: f64) -> ModelParams {
        let mut q = *p;
        match self {
            ParamAxis::Mu => q.mu = v,
            ParamAxis::Delta => q.delta = v,
            ParamAxis::Alpha => q.alpha = v,
        }
        q
    }

    pub fn label(&self) -> &'static str {
        match self {
            ParamAxis::Mu => "mu",
            ParamAxis::Delta => "delta",
            ParamAxis::Alpha => "alpha",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "mu" => Some(ParamAxis::Mu),
            "delta" => Some(ParamAxis::Delta),
            "alpha" => Some(ParamAxis::Alpha),
            _ => None,
        }
    }
}

/// How the operator kind is chosen when evaluating the Fisher density.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum KindSelector {
    /// Maximize over all four string operators.
    Best,
    Fixed(OperatorKind),
}

/// Fisher density for one parameter set under a kind selector.
pub fn fisher_density_for(params: &ModelParams, selector: KindSelector) -> Result<f64> {
    match selector {
        KindSelector::Best => Ok(correlators::best_operator(params)?.1.fisher_density),
        KindSelector::Fixed(kind) => {
            let sol = model::solve(params)?;
            let kernel = correlators::contraction_kernel(&sol);
            Ok(correlators::fisher_density(&kernel, kind)?.fisher_density)
        }
    }
}

/// Result of fitting `f_Q = 1 + c L^b` over several sizes.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScalingFit {
    pub b: f64,
    pub c: f64,
    pub r_squared: f64,
    pub sizes: Vec<usize>,
    pub kind: Option<OperatorKind>,
    /// True when the samples were size-independent and the b=0 branch was
    /// taken with c = mean(f_Q) - 1.
    pub flat: bool,
}

/// Relative spread below which the samples are treated as size-independent.
const FLAT_SPREAD_TOL: f64 = 1e-3;
/// Excess below which f_Q is treated as exactly 1 (product state).
const FLAT_EXCESS_TOL: f64 = 1e-6;

/// Least-squares fit of the scaling law on (L, f_Q) samples.
pub fn fit_scaling(samples: &[(usize, f64)]) -> Result<ScalingFit> {
    let mut sizes: Vec<usize> = samples.iter().map(|&(l, _)| l).collect();
    sizes.sort_unstable();
    sizes.dedup();
    if sizes.len() < 4 {
        return Err(Error::TooFewSizes(sizes.len()));
    }
    let excess: Vec<f64> = samples.iter().map(|&(_, f)| f - 1.0).collect();
    for &e in &excess {
        if e < -1e-9 {
            return Err(Error::NegativeExcess(e));
        }
    }
    let fmax = samples.iter().map(|&(_, f)| f).fold(f64::NEG_INFINITY, f64::max);
    let fmin = samples.iter().map(|&(_, f)| f).fold(f64::INFINITY, f64::min);
    let mean_excess = excess.iter().sum::<f64>() / excess.len() as f64;
    let all_tiny = excess.iter().all(|&e| e < FLAT_EXCESS_TOL);
    if all_tiny || fmax - fmin < FLAT_SPREAD_TOL * mean_excess.abs() {
        return Ok(ScalingFit {
            b: 0.0,
            c: mean_excess.max(0.0),
            r_squared: 1.0,
            sizes,
            kind: None,
            flat: true,
        });
    }
    // log-log linear least squares
    let pts: Vec<(f64, f64)> = samples
        .iter()
        .map(|&(l, f)| {
            let e = (f - 1.0).max(f64::MIN_POSITIVE);
            ((l as f64).ln(), e.ln())
        })
        .collect();
    let n = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    let denom = n * sxx - sx * sx;
    let b = (n * sxy - sx * sy) / denom;
    let intercept = (sy - b * sx) / n;
    let c = intercept.exp();
    let mean_y = sy / n;
    let ss_tot: f64 = pts.iter().map(|p| (p.1 - mean_y).powi(2)).sum();
    let ss_res: f64 = pts.iter().map(|p| (p.1 - (intercept + b * p.0)).powi(2)).sum();
    let r_squared = if ss_tot > 0.0 { 1.0 - ss_res / ss_tot } else { 1.0 };
    Ok(ScalingFit { b, c, r_squared, sizes, kind: None, flat: false })
}

/// Computes f_Q over a ladder of sizes and fits the scaling law.
pub fn fit_scaling_for(
    base: &ModelParams,
    sizes: &[usize],
    selector: KindSelector,
) -> Result<ScalingFit> {
    let mut samples = Vec::with_capacity(sizes.len());
    for &l in sizes {
        let p = ModelParams { l, ..*base };
        samples.push((l, fisher_density_for(&p, selector)?));
    }
    let mut fit = fit_scaling(&samples)?;
    fit.kind = match selector {
        KindSelector::Fixed(k) => Some(k),
        KindSelector::Best => None,
    };
    Ok(fit)
}

/// Default size ladder for scaling fits (log-spaced, desk scale).
pub const DEFAULT_SIZE_LADDER: [usize; 7] = [64, 96, 128, 192, 256, 384, 512];

/// Default finite-difference step for first derivatives.
pub const DEFAULT_DERIVATIVE_STEP: f64 = 1e-3;

/// Weighted derivative (1/f_Q) ∂f_Q/∂η at fixed L.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct DerivativeResult {
    pub eta: ParamAxis,
    pub value: f64,
    pub step: f64,
}

/// Central-difference weighted derivative of the Fisher density; one-sided
/// at the α >= 0 boundary.
pub fn weighted_derivative(
    params: &ModelParams,
    eta: ParamAxis,
    selector: KindSelector,
    step: f64,
) -> Result<DerivativeResult> {
    if !(step > 0.0) {
        return Err(Error::InvalidParams("derivative step must be > 0".into()));
    }
    let x0 = eta.get(params);
    let one_sided = eta == ParamAxis::Alpha && x0 <= step;
    let value = if one_sided {
        let f0 = fisher_density_for(params, selector)?;
        let fp = fisher_density_for(&eta.with_value(params, x0 + step), selector)?;
        (fp - f0) / step / f0
    } else {
        let fp = fisher_density_for(&eta.with_value(params, x0 + step), selector)?;
        let fm = fisher_density_for(&eta.with_value(params, x0 - step), selector)?;
        let f0 = fisher_density_for(params, selector)?;
        (fp - fm) / (2.0 * step) / f0
    };
    Ok(DerivativeResult { eta, value, step })
}

/// Per-size comparison of the direct weighted derivative against the
/// scaling-law decomposition.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DecompositionReport {
    pub eta: ParamAxis,
    /// (L, direct weighted derivative, reconstruction from b(η), c(η)).
    pub per_size: Vec<(usize, f64, f64)>,
    pub max_rel_discrepancy: f64,
    pub db_deta: f64,
    pub dc_deta: f64,
}

/// Fits b(η), c(η) at η ± step and checks the derivative decomposition
/// against the direct finite difference at each size.
pub fn check_derivative_decomposition(
    params: &ModelParams,
    eta: ParamAxis,
    sizes: &[usize],
    selector: KindSelector,
    step: f64,
) -> Result<DecompositionReport> {
    let x0 = eta.get(params);
    let fit_mid = fit_scaling_for(params, sizes, selector)?;
    let fit_plus = fit_scaling_for(&eta.with_value(params, x0 + step), sizes, selector)?;
    let fit_minus = fit_scaling_for(&eta.with_value(params, x0 - step), sizes, selector)?;
    let db = (fit_plus.b - fit_minus.b) / (2.0 * step);
    let dc = (fit_plus.c - fit_minus.c) / (2.0 * step);
    let mut per_size = Vec::with_capacity(sizes.len());
    let mut max_rel: f64 = 0.0;
    for &l in sizes {
        let p = ModelParams { l, ..*params };
        let direct = weighted_derivative(&p, eta, selector, step)?.value;
        let clb = fit_mid.c * (l as f64).powf(fit_mid.b);
        let reconstructed = if fit_mid.c == 0.0 {
            0.0
        } else {
            clb / (1.0 + clb) * (dc / fit_mid.c + db * (l as f64).ln())
        };
        let scale = direct.abs().max(reconstructed.abs()).max(1e-12);
        max_rel = max_rel.max((direct - reconstructed).abs() / scale);
        per_size.push((l, direct, reconstructed));
    }
    Ok(DecompositionReport { eta, per_size, max_rel_discrepancy: max_rel, db_deta: db, dc_deta: dc })
}

/// Fidelity susceptibilities with respect to μ, Δ and α.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SusceptibilityResult {
    pub chi_mu: f64,
    pub chi_delta: f64,
    pub chi_alpha: f64,
    pub params: ModelParams,
}

/// Closed-form susceptibilities `χ_η = (1/4) Σ_{k < π} (dθ_k/dη)²`.
pub fn susceptibility(params: &ModelParams) -> Result<SusceptibilityResult> {
    let grid = model::build_grid(params)?;
    let half = params.l / 2;
    let mut chi_mu = 0.0;
    let mut chi_delta = 0.0;
    let mut chi_alpha = 0.0;
    for &k in &grid.modes()[..half] {
        let a = params.j * k.cos() + params.mu;
        let f = model::f_alpha(k, params.alpha, params.l);
        let df = model::f_alpha_dalpha(k, params.alpha, params.l);
        let b = 0.5 * params.delta * f;
        let eps2 = a * a + b * b;
        if eps2 == 0.0 {
            continue; // degenerate mode: the susceptibility diverges there
        }
        let denom = eps2 * eps2;
        chi_mu += 0.25 * b * b / denom;
        chi_delta += 0.25 * a * a * (0.5 * f).powi(2) / denom;
        chi_alpha += 0.25 * a * a * (0.5 * params.delta * df).powi(2) / denom;
    }
    Ok(SusceptibilityResult { chi_mu, chi_delta, chi_alpha, params: *params })
}

/// Ground-state overlap `𝓕 = Π_{k<π} cos((θ_k - θ̃_k)/2)` between two
/// parameter sets on the same chain.
pub fn fidelity(a: &ModelParams, b: &ModelParams) -> Result<f64> {
    if a.l != b.l {
        return Err(Error::InvalidParams("fidelity requires equal chain lengths".into()));
    }
    let sa = model::solve(a)?;
    let sb = model::solve(b)?;
    let half = a.l / 2;
    let mut f = 1.0;
    for n in 0..half {
        let mut d = sb.theta()[n] - sa.theta()[n];
        // the angle is defined modulo 2π; take the short way around
        while d > PI {
            d -= 2.0 * PI;
        }
        while d <= -PI {
            d += 2.0 * PI;
        }
        f *= (0.5 * d).cos();
    }
    Ok(f)
}

/// Single-mode susceptibility integrand χ_α(k) in the thermodynamic limit,
/// built on the truncated polylogarithm series.
pub fn chi_alpha_single_mode(
    j: f64,
    mu: f64,
    delta: f64,
    alpha: f64,
    k: f64,
    n_terms: usize,
) -> Result<model::SeriesValue> {
    if !(k > 0.0 && k < 2.0 * PI) {
        return Err(Error::InvalidParams(format!("k = {k} outside (0, 2π)")));
    }
    let f = model::f_alpha_infinite(k, alpha, n_terms);
    let df = model::f_alpha_infinite_dalpha(k, alpha, n_terms);
    let a = j * k.cos() + mu;
    let b = 0.5 * delta * f.value;
    let eps2 = a * a + b * b;
    let value = if eps2 == 0.0 {
        0.0
    } else {
        a * a / (eps2 * eps2) * (0.5 * delta * df.value).powi(2)
    };
    Ok(model::SeriesValue {
        value,
        slow_convergence: f.slow_convergence || df.slow_convergence,
    })
}

/// Number of common abscissa points used by the collapse metric.
const COLLAPSE_GRID_POINTS: usize = 64;

/// Collapse diagnostic: rescales each profile to `(l/L, L^{1-b} C(l))`,
/// interpolates onto a common grid and returns the maximum pairwise
/// deviation normalized by the maximum curve amplitude.
///
/// The comparison window is clipped to `[0.1, 0.9]` in `l/L`: within a
/// lattice spacing of either chain end the scaling form does not hold, and
/// the non-universal short-distance region would otherwise dominate the
/// metric.
pub fn collapse_deviation(profiles: &[CorrelationProfile], b: f64) -> Result<f64> {
    if profiles.len() < 2 {
        return Err(Error::Collapse("need at least two system sizes".into()));
    }
    let first = &profiles[0];
    for p in &profiles[1..] {
        let same = p.kind == first.kind
            && p.params.j == first.params.j
            && p.params.mu == first.params.mu
            && p.params.delta == first.params.delta
            && p.params.alpha == first.params.alpha;
        if !same {
            return Err(Error::Collapse("profiles differ in more than the system size".into()));
        }
        if p.params.l == first.params.l {
            return Err(Error::Collapse("duplicate system size".into()));
        }
    }
    // restrict to the intersection of all profile domains so no curve is
    // extrapolated past its shortest or longest lattice distance
    let l_min = profiles.iter().map(|p| p.params.l).min().unwrap() as f64;
    let x_lo = (1.0 / l_min).max(0.1);
    let x_hi = (1.0 - 1.0 / l_min).min(0.9);
    let grid: Vec<f64> = (0..COLLAPSE_GRID_POINTS)
        .map(|i| x_lo + (x_hi - x_lo) * i as f64 / (COLLAPSE_GRID_POINTS - 1) as f64)
        .collect();
    // piecewise-linear sample of L^{1-b} C(l) at l/L = x, clamped at the ends
    let sample = |p: &CorrelationProfile, x: f64| -> f64 {
        let l = p.params.l as f64;
        let scale = l.powf(1.0 - b);
        let pos = x * l; // lattice distance, runs over 1..L-1
        let lo = pos.floor() as usize;
        if lo < 1 {
            return scale * p.c[0];
        }
        if lo >= p.c.len() {
            return scale * p.c[p.c.len() - 1];
        }
        let frac = pos - lo as f64;
        scale * (p.c[lo - 1] * (1.0 - frac) + p.c[lo] * frac)
    };
    let mut max_dev: f64 = 0.0;
    let mut max_amp: f64 = 0.0;
    for &x in &grid {
        let ys: Vec<f64> = profiles.iter().map(|p| sample(p, x)).collect();
        let hi = ys.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let lo = ys.iter().cloned().fold(f64::INFINITY, f64::min);
        max_dev = max_dev.max(hi - lo);
        max_amp = max_amp.max(ys.iter().fold(0.0f64, |m, y| m.max(y.abs())));
    }
    if max_amp == 0.0 {
        return Err(Error::Collapse("all rescaled correlators vanish".into()));
    }
    Ok(max_dev / max_amp)
}
