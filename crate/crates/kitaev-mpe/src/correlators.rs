//! String-operator correlation functions and the quantum Fisher information.
//!
//! For the Bogoliubov ground state, Wick's theorem reduces the string
//! correlator `C_ρ(l) = ⟨ô_ρ^(1) ô_ρ^(1+l)⟩` to a Toeplitz determinant of
//! Majorana cross-contractions `G(r) = ⟨B_m A_{m+r}⟩` with
//! `A_j = a_j† + a_j`, `B_j = a_j† - a_j`:
//!
//! ```text
//! G(r)   = -(1/L) Σ_k cos(k r + θ_k)
//! C_x(l) = det[ G(j - i + 1) ]_{i,j=1..l}
//! C_y(l) = det[ G(j - i - 1) ]_{i,j=1..l}
//! ```
//!
//! Staggered variants carry an extra `(-1)^l`. The Fisher density is
//! `f_Q = 1 + Σ_{l=1}^{L-1} C(l)`, and `f_Q > κ` witnesses (κ+1)-partite
//! entanglement, `f_Q = L` being the Heisenberg bound.
//!
//! Index conventions and the global sign of `G` are pinned by exact
//! agreement with the Fock-space oracle at small L (see the `oracle`
//! module and the acceptance suite).

use crate::error::{Error, Result};
use crate::model::{self, BogoliubovSolution, ModelParams};
use serde::{Deserialize, Serialize};

/// The four nonlocal string operators whose QFI is considered.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct OperatorKind {
    pub basis: StringBasis,
    pub staggered: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum StringBasis {
    X,
    Y,
}

impl OperatorKind {
    pub const X: Self = Self { basis: StringBasis::X, staggered: false };
    pub const Y: Self = Self { basis: StringBasis::Y, staggered: false };
    pub const X_STAGGERED: Self = Self { basis: StringBasis::X, staggered: true };
    pub const Y_STAGGERED: Self = Self { basis: StringBasis::Y, staggered: true };

    /// All four kinds in a fixed evaluation order.
    pub const ALL: [Self; 4] = [Self::X, Self::Y, Self::X_STAGGERED, Self::Y_STAGGERED];

    pub fn label(&self) -> &'static str {
        match (self.basis, self.staggered) {
            (StringBasis::X, false) => "x",
            (StringBasis::Y, false) => "y",
            (StringBasis::X, true) => "x_st",
            (StringBasis::Y, true) => "y_st",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "x" => Some(Self::X),
            "y" => Some(Self::Y),
            "x_st" | "xst" | "x-staggered" => Some(Self::X_STAGGERED),
            "y_st" | "yst" | "y-staggered" => Some(Self::Y_STAGGERED),
            _ => None,
        }
    }
}

impl std::fmt::Display for OperatorKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

/// Majorana cross-contractions G(r) for r = -(L-1)..=(L-1).
#[derive(Debug, Clone)]
pub struct ContractionKernel {
    g: Vec<f64>,
    l: usize,
    params: ModelParams,
}

impl ContractionKernel {
    /// G(r); valid for |r| <= L-1.
    pub fn g(&self, r: i64) -> f64 {
        debug_assert!(r.unsigned_abs() as usize <= self.l - 1);
        self.g[(r + self.l as i64 - 1) as usize]
    }

    pub fn chain_length(&self) -> usize {
        self.l
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }
}

/// Builds G(r) = -(1/L) Σ_k cos(k r + θ_k) from a Bogoliubov solution.
pub fn contraction_kernel(sol: &BogoliubovSolution) -> ContractionKernel {
    let l = sol.params().l;
    let grid = model::build_grid(sol.params()).expect("solution params are valid");
    let modes = grid.modes();
    let theta = sol.theta();
    let mut g = Vec::with_capacity(2 * l - 1);
    for r in -(l as i64 - 1)..=(l as i64 - 1) {
        let mut sum = 0.0;
        for (&k, &th) in modes.iter().zip(theta) {
            sum += (k * r as f64 + th).cos();
        }
        g.push(-sum / l as f64);
    }
    ContractionKernel { g, l, params: *sol.params() }
}

/// Determinant of a dense matrix via partially pivoted LU, returned as
/// (sign, log|det|). Gapped-phase correlators decay exponentially and would
/// underflow a plain pivot product near l ≈ L.
fn log_det(mut m: Vec<f64>, n: usize) -> (f64, f64) {
    let mut sign = 1.0;
    let mut log_abs = 0.0;
    for col in 0..n {
        let mut pivot_row = col;
        let mut pivot_val = m[col * n + col].abs();
        for row in col + 1..n {
            let v = m[row * n + col].abs();
            if v > pivot_val {
                pivot_val = v;
                pivot_row = row;
            }
        }
        if pivot_val == 0.0 {
            return (0.0, f64::NEG_INFINITY);
        }
        if pivot_row != col {
            for j in 0..n {
                m.swap(col * n + j, pivot_row * n + j);
            }
            sign = -sign;
        }
        let pivot = m[col * n + col];
        sign *= pivot.signum();
        log_abs += pivot.abs().ln();
        let inv = 1.0 / pivot;
        for row in col + 1..n {
            let factor = m[row * n + col] * inv;
            if factor == 0.0 {
                continue;
            }
            for j in col + 1..n {
                m[row * n + j] -= factor * m[col * n + j];
            }
        }
    }
    (sign, log_abs)
}

/// String correlator C(l) for one operator kind at one site distance.
pub fn correlation(kernel: &ContractionKernel, kind: OperatorKind, l: usize) -> Result<f64> {
    let len = kernel.chain_length();
    if l == 0 || l >= len {
        return Err(Error::DistanceOutOfRange { l, max: len - 1 });
    }
    // Toeplitz offset: +1 for the X string, -1 for the Y string.
    let offset: i64 = match kind.basis {
        StringBasis::X => 1,
        StringBasis::Y => -1,
    };
    let mut m = vec![0.0; l * l];
    for i in 0..l {
        for j in 0..l {
            m[i * l + j] = kernel.g(j as i64 - i as i64 + offset);
        }
    }
    let (sign, log_abs) = log_det(m, l);
    let mut c = sign * log_abs.exp();
    if kind.staggered && l % 2 == 1 {
        c = -c;
    }
    Ok(c)
}

/// C(l) for l = 1..L-1 for one string operator.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CorrelationProfile {
    pub kind: OperatorKind,
    /// c[i] = C(i+1), i = 0..L-2.
    pub c: Vec<f64>,
    pub params: ModelParams,
}

impl CorrelationProfile {
    pub fn correlation(&self, l: usize) -> Result<f64> {
        if l == 0 || l > self.c.len() {
            return Err(Error::DistanceOutOfRange { l, max: self.c.len() });
        }
        Ok(self.c[l - 1])
    }
}

/// Computes C(l) for every l = 1..L-1. Distances are independent; the sum
/// order downstream is fixed by the returned layout.
pub fn correlation_profile(kernel: &ContractionKernel, kind: OperatorKind) -> CorrelationProfile {
    use rayon::prelude::*;
    let len = kernel.chain_length();
    let c: Vec<f64> = (1..len)
        .into_par_iter()
        .map(|l| correlation(kernel, kind, l).expect("l in range"))
        .collect();
    CorrelationProfile { kind, c, params: *kernel.params() }
}

/// Fisher density and the entanglement depth it witnesses.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct QfiResult {
    pub kind: OperatorKind,
    /// f_Q = F_Q / L, in [0, L].
    pub fisher_density: f64,
    /// F_Q = L f_Q.
    pub fisher: f64,
    /// 1 + max{κ >= 0 : f_Q > κ}, floored at 1 and capped at L.
    pub witnessed_depth: usize,
    /// True iff f_Q > L - 1.
    pub genuine_l_partite: bool,
}

fn depth_from_density(f_q: f64, l: usize) -> usize {
    // tolerance keeps floating-point noise at integer f_Q from bumping the
    // witnessed depth (e.g. a product state with f_Q = 1 + 1e-15)
    const EPS: f64 = 1e-9;
    if f_q <= 1.0 + EPS {
        return 1;
    }
    // largest integer κ with f_Q > κ (beyond noise), plus one
    let kappa = (f_q - EPS).floor() as usize;
    (kappa + 1).min(l)
}

/// Fisher density f_Q = 1 + Σ_l C(l) for one operator kind.
pub fn fisher_density(kernel: &ContractionKernel, kind: OperatorKind) -> Result<QfiResult> {
    let profile = correlation_profile(kernel, kind);
    fisher_density_of_profile(&profile)
}

/// Fisher density from an already-computed correlation profile.
pub fn fisher_density_of_profile(profile: &CorrelationProfile) -> Result<QfiResult> {
    let l = profile.params.l;
    let f_q = 1.0 + profile.c.iter().sum::<f64>();
    if f_q < -1e-9 || f_q > l as f64 + 1e-6 {
        return Err(Error::VarianceBound(f_q));
    }
    Ok(QfiResult {
        kind: profile.kind,
        fisher_density: f_q,
        fisher: l as f64 * f_q,
        witnessed_depth: depth_from_density(f_q, l),
        genuine_l_partite: f_q > l as f64 - 1.0,
    })
}

/// Evaluates all four operator kinds and returns the maximizer.
pub fn best_operator(params: &ModelParams) -> Result<(OperatorKind, QfiResult)> {
    let sol = model::solve(params)?;
    let kernel = contraction_kernel(&sol);
    let mut best: Option<QfiResult> = None;
    for kind in OperatorKind::ALL {
        let q = fisher_density(&kernel, kind)?;
        let better = match &best {
            None => true,
            Some(b) => q.fisher_density > b.fisher_density,
        };
        if better {
            best = Some(q);
        }
    }
    let q = best.expect("four kinds evaluated");
    Ok((q.kind, q))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ALPHA_NN_SENTINEL;

    fn kernel_for(mu: f64, delta: f64, alpha: f64, l: usize) -> ContractionKernel {
        let p = ModelParams::new(1.0, mu, delta, alpha, l).unwrap();
        contraction_kernel(&model::solve(&p).unwrap())
    }

    #[test]
    fn deep_trivial_kernel_is_delta_r0() {
        let k = kernel_for(1.0e6, 1.0, 2.0, 8);
        assert!((k.g(0) - 1.0).abs() < 1e-6);
        for r in 1..8i64 {
            assert!(k.g(r).abs() < 1e-6);
            assert!(k.g(-r).abs() < 1e-6);
        }
    }

    #[test]
    fn free_fermion_kernel_direct_evaluation() {
        // Δ=0, μ=0: θ_k = atan2(0, -cos k), i.e. π where cos k > 0 and 0 where cos k < 0.
        let k = kernel_for(0.0, 0.0, 2.0, 8);
        let p = ModelParams::new(1.0, 0.0, 0.0, 2.0, 8).unwrap();
        let grid = model::build_grid(&p).unwrap();
        for r in -7i64..=7 {
            let mut sum = 0.0;
            for &q in grid.modes() {
                let th = if q.cos() > 0.0 { std::f64::consts::PI } else { 0.0 };
                sum += (q * r as f64 + th).cos();
            }
            assert!((k.g(r) + sum / 8.0).abs() < 1e-12, "r={r}");
        }
    }

    #[test]
    fn kernel_antiperiodic_in_r() {
        let k = kernel_for(0.5, 1.0, 0.5, 8);
        // G(r - L) = -G(r) follows from e^{ikL} = -1 on the antiperiodic grid.
        for r in 1..8i64 {
            assert!((k.g(r - 8) + k.g(r)).abs() < 1e-12);
        }
    }

    #[test]
    fn nearest_neighbor_critical_cx_is_one() {
        let k = kernel_for(0.0, 1.0, ALPHA_NN_SENTINEL, 16);
        for l in 1..16 {
            assert!((correlation(&k, OperatorKind::X, l).unwrap() - 1.0).abs() < 1e-12);
        }
        let q = fisher_density(&k, OperatorKind::X).unwrap();
        assert!((q.fisher_density - 16.0).abs() < 1e-10);
        assert!(q.genuine_l_partite);
        assert_eq!(q.witnessed_depth, 16);
    }

    #[test]
    fn product_state_line_fq_is_one() {
        // Δ=0, |μ|/J > 1: exact product ground state, C(l) = 0 for all kinds.
        let k = kernel_for(2.0, 0.0, 1.0, 12);
        for kind in OperatorKind::ALL {
            let q = fisher_density(&k, kind).unwrap();
            assert!((q.fisher_density - 1.0).abs() < 1e-12, "{kind}");
            assert_eq!(q.witnessed_depth, 1);
        }
    }

    #[test]
    fn correlation_bound() {
        for &(mu, delta, alpha) in &[(0.5, 1.0, 2.0), (-1.0, 1.0, 0.5), (2.0, -1.3, 0.0)] {
            let k = kernel_for(mu, delta, alpha, 16);
            for kind in OperatorKind::ALL {
                let prof = correlation_profile(&k, kind);
                for (i, &c) in prof.c.iter().enumerate() {
                    assert!(c.abs() <= 1.0 + 1e-9, "|C({})| = {} kind={kind}", i + 1, c);
                }
            }
        }
    }

    #[test]
    fn delta_sign_symmetry_swaps_x_and_y() {
        let l = 12;
        for &(mu, alpha) in &[(0.0, 2.0), (1.5, 0.5), (-0.7, 1.0)] {
            let kp = kernel_for(mu, 1.0, alpha, l);
            let km = kernel_for(mu, -1.0, alpha, l);
            for stag in [false, true] {
                let x = OperatorKind { basis: StringBasis::X, staggered: stag };
                let y = OperatorKind { basis: StringBasis::Y, staggered: stag };
                let fx = fisher_density(&kp, x).unwrap().fisher_density;
                let fy = fisher_density(&km, y).unwrap().fisher_density;
                assert!((fx - fy).abs() < 1e-10, "mu={mu} alpha={alpha} stag={stag}");
            }
        }
    }

    #[test]
    fn best_operator_selection() {
        let p = ModelParams::new(1.0, 0.0, 1.0, 2.0, 32).unwrap();
        let (kind, _) = best_operator(&p).unwrap();
        assert_eq!(kind, OperatorKind::X);

        let p = ModelParams::new(1.0, 2.0, 1.0, 0.5, 32).unwrap();
        let (kind, _) = best_operator(&p).unwrap();
        assert_eq!(kind, OperatorKind::Y_STAGGERED);
    }

    #[test]
    fn best_operator_delta_flip_preserves_maximum() {
        let p_plus = ModelParams::new(1.0, 0.0, 1.0, 2.0, 16).unwrap();
        let p_minus = ModelParams::new(1.0, 0.0, -1.0, 2.0, 16).unwrap();
        let (k_plus, q_plus) = best_operator(&p_plus).unwrap();
        let (k_minus, q_minus) = best_operator(&p_minus).unwrap();
        assert!((q_plus.fisher_density - q_minus.fisher_density).abs() < 1e-10);
        assert_eq!(k_plus, OperatorKind::X);
        assert_eq!(k_minus, OperatorKind::Y);
    }

    #[test]
    fn correlation_rejects_out_of_range() {
        let k = kernel_for(0.0, 1.0, 2.0, 8);
        assert!(correlation(&k, OperatorKind::X, 0).is_err());
        assert!(correlation(&k, OperatorKind::X, 8).is_err());
    }

    #[test]
    fn log_det_small_cases() {
        // 2x2 with known determinant
        let (s, la) = log_det(vec![2.0, 1.0, 1.0, 2.0], 2);
        assert!((s * la.exp() - 3.0).abs() < 1e-14);
        // singular
        let (s, la) = log_det(vec![1.0, 2.0, 2.0, 4.0], 2);
        assert!(s * la.exp() == 0.0 || la < -30.0);
        // negative determinant
        let (s, la) = log_det(vec![0.0, 1.0, 1.0, 0.0], 2);
        assert!((s * la.exp() + 1.0).abs() < 1e-14);
    }

    #[test]
    fn depth_from_density_edges() {
        assert_eq!(depth_from_density(0.0, 8), 1);
        assert_eq!(depth_from_density(1.0, 8), 1);
        assert_eq!(depth_from_density(3.04, 8), 4);
        assert_eq!(depth_from_density(8.0, 8), 8);
        assert_eq!(depth_from_density(7.5, 8), 8);
    }
}
