//! Brute-force ground truth in the full 2^L Fock space.
//!
//! The ground state is built from the product form
//! `|ψ_gs⟩ = Π_{n=0}^{L/2-1} (cos(θ_{k_n}/2) - i sin(θ_{k_n}/2) a_{k_n}† a_{-k_n}†)|0⟩`,
//! with `a_k† = (1/√L) Σ_j e^{-ikj} a_j†`. The Hamiltonian and the string
//! operators are applied directly to the state vector, independently of the
//! momentum-space solution, so energy and correlator checks are genuinely
//! two-route.
//!
//! Basis convention: bit `j-1` of the index is the occupation of site `j`;
//! a basis ket is the ordered product `a_1†^{n_1} a_2†^{n_2} ⋯ |0⟩`, so a
//! fermionic operator at site `j` picks up `(-1)^popcount(bits below j)`.

use crate::correlators::{OperatorKind, StringBasis};
use crate::error::{Error, Result};
use crate::model::{self, ModelParams, ALPHA_NN_SENTINEL};
use num_complex::Complex64;

/// Largest chain the ground-state builder accepts (dense 2^L amplitudes).
pub const MAX_BUILD_L: usize = 14;
/// Largest chain the QFI evaluator accepts.
pub const MAX_QFI_L: usize = 12;

/// Dense state vector over occupation bit-strings.
#[derive(Debug, Clone)]
pub struct FockState {
    pub amplitudes: Vec<Complex64>,
    pub l: usize,
}

impl FockState {
    pub fn vacuum(l: usize) -> Self {
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1 << l];
        amplitudes[0] = Complex64::new(1.0, 0.0);
        Self { amplitudes, l }
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn dot(&self, other: &Self) -> Complex64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// ⟨Π_j (1 - 2 n_j)⟩: +1 on an even-parity pair condensate.
    pub fn parity_expectation(&self) -> f64 {
        self.amplitudes
            .iter()
            .enumerate()
            .map(|(idx, a)| {
                let sign = if (idx as u64).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
                sign * a.norm_sqr()
            })
            .sum()
    }
}

fn jw_sign(idx: usize, site: usize) -> f64 {
    // popcount of bits strictly below `site` (1-based).
    let below = idx & ((1usize << (site - 1)) - 1);
    if (below as u64).count_ones() % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// out += coeff * a_site† |ψ⟩
fn add_creation(out: &mut [Complex64], psi: &[Complex64], site: usize, coeff: Complex64) {
    let bit = 1usize << (site - 1);
    for (idx, &a) in psi.iter().enumerate() {
        if a == Complex64::new(0.0, 0.0) || idx & bit != 0 {
            continue;
        }
        out[idx | bit] += coeff * jw_sign(idx, site) * a;
    }
}

/// out += coeff * a_site |ψ⟩
fn add_annihilation(out: &mut [Complex64], psi: &[Complex64], site: usize, coeff: Complex64) {
    let bit = 1usize << (site - 1);
    for (idx, &a) in psi.iter().enumerate() {
        if a == Complex64::new(0.0, 0.0) || idx & bit == 0 {
            continue;
        }
        out[idx & !bit] += coeff * jw_sign(idx, site) * a;
    }
}

/// a_k† |ψ⟩ with a_k† = (1/√L) Σ_j e^{-ikj} a_j†.
fn momentum_creation(psi: &FockState, k: f64) -> FockState {
    let l = psi.l;
    let mut out = vec![Complex64::new(0.0, 0.0); 1 << l];
    let norm = 1.0 / (l as f64).sqrt();
    for j in 1..=l {
        let phase = Complex64::from_polar(norm, -k * j as f64);
        add_creation(&mut out, &psi.amplitudes, j, phase);
    }
    FockState { amplitudes: out, l }
}

/// a_k |ψ⟩ with a_k = (1/√L) Σ_j e^{ikj} a_j.
fn momentum_annihilation(psi: &FockState, k: f64) -> FockState {
    let l = psi.l;
    let mut out = vec![Complex64::new(0.0, 0.0); 1 << l];
    let norm = 1.0 / (l as f64).sqrt();
    for j in 1..=l {
        let phase = Complex64::from_polar(norm, k * j as f64);
        add_annihilation(&mut out, &psi.amplitudes, j, phase);
    }
    FockState { amplitudes: out, l }
}

/// Builds the exact ground state from the Bogoliubov product form.
pub fn build_ground_state(params: &ModelParams) -> Result<FockState> {
    params.validate()?;
    if params.l > MAX_BUILD_L {
        return Err(Error::FockTooLarge(params.l));
    }
    let sol = model::solve(params)?;
    let grid = model::build_grid(params)?;
    let modes = grid.modes();
    let l = params.l;
    let mut psi = FockState::vacuum(l);
    // Pair (k_n, -k_n) with -k_n = 2π - k_n = k_{L-1-n}; n = 0..L/2-1 runs
    // over the modes with k < π.
    for n in 0..l / 2 {
        let k = modes[n];
        let k_partner = modes[l - 1 - n];
        let theta = sol.theta()[n];
        let u = (0.5 * theta).cos();
        let v = (0.5 * theta).sin();
        let paired = momentum_creation(&momentum_creation(&psi, k_partner), k);
        for (idx, amp) in psi.amplitudes.iter_mut().enumerate() {
            *amp = u * *amp + Complex64::new(0.0, -v) * paired.amplitudes[idx];
        }
    }
    Ok(psi)
}

/// Applies the string operator
/// `ô_ρ^(j) = (-i)^{δ_{ρ,y}} (a_j† S_j + (-1)^{δ_{ρ,y}} S_j a_j)`,
/// with `S_j = e^{iπ Σ_{l<j} n_l}` a diagonal ±1 per bit-string.
pub fn apply_string_operator(state: &FockState, kind: OperatorKind, site: usize) -> FockState {
    assert!(site >= 1 && site <= state.l, "site out of range");
    let l = state.l;
    // S_j ψ: diagonal parity phase of the occupied sites left of `site`.
    let mut phased = vec![Complex64::new(0.0, 0.0); 1 << l];
    let mask = (1usize << (site - 1)) - 1;
    for (idx, &a) in state.amplitudes.iter().enumerate() {
        let sign = if ((idx & mask) as u64).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
        phased[idx] = sign * a;
    }
    let mut out = vec![Complex64::new(0.0, 0.0); 1 << l];
    match kind.basis {
        StringBasis::X => {
            // a_j† S + S a_j  (S diagonal, commutes with whether we phase
            // before or after since a_j leaves the bits below j untouched)
            add_creation(&mut out, &phased, site, Complex64::new(1.0, 0.0));
            add_annihilation(&mut out, &phased, site, Complex64::new(1.0, 0.0));
        }
        StringBasis::Y => {
            // -i (a_j† S - S a_j)
            add_creation(&mut out, &phased, site, Complex64::new(0.0, -1.0));
            add_annihilation(&mut out, &phased, site, Complex64::new(0.0, 1.0));
        }
    }
    FockState { amplitudes: out, l }
}

fn inv_distance_pow(d: usize, alpha: f64) -> f64 {
    if alpha >= ALPHA_NN_SENTINEL {
        if d == 1 {
            1.0
        } else {
            0.0
        }
    } else {
        (d as f64).powf(-alpha)
    }
}

/// H |ψ⟩ built term by term from the real-space Hamiltonian, with the
/// antiperiodic wrap `a_{j+L} = -a_j`.
pub fn apply_hamiltonian(params: &ModelParams, psi: &FockState) -> FockState {
    let l = params.l;
    assert_eq!(psi.l, l);
    let dim = 1usize << l;
    let mut out = vec![Complex64::new(0.0, 0.0); dim];

    // chemical potential: diagonal -μ (Σ n_j - L/2)
    for (idx, &a) in psi.amplitudes.iter().enumerate() {
        let n = (idx as u64).count_ones() as f64;
        out[idx] += Complex64::new(-params.mu * (n - l as f64 / 2.0), 0.0) * a;
    }

    // helper: out += coeff * a_p† a_q |ψ⟩
    let hop = |out: &mut Vec<Complex64>, p: usize, q: usize, coeff: f64| {
        let mut tmp = vec![Complex64::new(0.0, 0.0); dim];
        add_annihilation(&mut tmp, &psi.amplitudes, q, Complex64::new(1.0, 0.0));
        add_creation(out, &tmp, p, Complex64::new(coeff, 0.0));
    };

    // hopping: -J/2 Σ_j (a_j† a_{j+1} + a_{j+1}† a_j)
    for j in 1..=l {
        let (m, wrap) = if j + 1 > l { (j + 1 - l, -1.0) } else { (j + 1, 1.0) };
        let coeff = -0.5 * params.j * wrap;
        hop(&mut out, j, m, coeff);
        hop(&mut out, m, j, coeff);
    }

    // pairing: (Δ/4) Σ_j Σ_{ℓ=1}^{L-1} d(ℓ)^{-α} (a_j a_{j+ℓ} + a_{j+ℓ}† a_j†)
    for j in 1..=l {
        for dist in 1..l {
            let d = dist.min(l - dist);
            let w = inv_distance_pow(d, params.alpha);
            if w == 0.0 {
                continue;
            }
            let (m, wrap) = if j + dist > l { (j + dist - l, -1.0) } else { (j + dist, 1.0) };
            let coeff = 0.25 * params.delta * w * wrap;
            // a_j a_m
            let mut tmp = vec![Complex64::new(0.0, 0.0); dim];
            add_annihilation(&mut tmp, &psi.amplitudes, m, Complex64::new(1.0, 0.0));
            add_annihilation(&mut out, &tmp, j, Complex64::new(coeff, 0.0));
            // a_m† a_j†
            let mut tmp = vec![Complex64::new(0.0, 0.0); dim];
            add_creation(&mut tmp, &psi.amplitudes, j, Complex64::new(1.0, 0.0));
            add_creation(&mut out, &tmp, m, Complex64::new(coeff, 0.0));
        }
    }

    FockState { amplitudes: out, l }
}

/// ⟨ψ|H|ψ⟩ (real part; the imaginary part vanishes for Hermitian H).
pub fn hamiltonian_expectation(params: &ModelParams, psi: &FockState) -> f64 {
    psi.dot(&apply_hamiltonian(params, psi)).re
}

/// ⟨ψ|H²|ψ⟩ - ⟨ψ|H|ψ⟩²; vanishes on an eigenstate.
pub fn hamiltonian_variance(params: &ModelParams, psi: &FockState) -> f64 {
    let hpsi = apply_hamiltonian(params, psi);
    let e = psi.dot(&hpsi).re;
    hpsi.dot(&hpsi).re - e * e
}

/// ⟨a_k† a_k⟩ for a grid mode.
pub fn momentum_occupation(psi: &FockState, k: f64) -> f64 {
    let akpsi = momentum_annihilation(psi, k);
    akpsi.dot(&akpsi).re
}

/// ⟨ψ|ô_ρ^(j)|ψ⟩.
pub fn string_expectation(psi: &FockState, kind: OperatorKind, site: usize) -> Complex64 {
    psi.dot(&apply_string_operator(psi, kind, site))
}

/// Variance of the collective string operator together with all C_ρ(l),
/// computed by direct state-vector algebra.
#[derive(Debug, Clone)]
pub struct OracleQfi {
    pub fisher: f64,
    pub fisher_density: f64,
    /// correlations[i] = C_ρ(i+1), staggering included.
    pub correlations: Vec<f64>,
    /// ⟨Ô_ρ⟩; vanishes by parity superselection.
    pub mean: Complex64,
}

/// Brute-force QFI of `Ô_ρ = Σ_j (±1)^j ô_ρ^(j)` on the exact ground state.
pub fn brute_force_qfi(params: &ModelParams, kind: OperatorKind) -> Result<OracleQfi> {
    if params.l > MAX_QFI_L {
        return Err(Error::FockTooLarge(params.l));
    }
    let psi = build_ground_state(params)?;
    let l = params.l;
    let dim = 1usize << l;

    let mut collective = vec![Complex64::new(0.0, 0.0); dim];
    for j in 1..=l {
        let sign = if kind.staggered && j % 2 == 1 { -1.0 } else { 1.0 };
        let oj = apply_string_operator(&psi, kind, j);
        for (o, &a) in collective.iter_mut().zip(&oj.amplitudes) {
            *o += sign * a;
        }
    }
    let phi = FockState { amplitudes: collective, l };
    let mean = psi.dot(&phi);
    let fisher = phi.dot(&phi).re - mean.norm_sqr();

    let o1 = apply_string_operator(&psi, kind, 1);
    let mut correlations = Vec::with_capacity(l - 1);
    for dist in 1..l {
        let ol = apply_string_operator(&psi, kind, 1 + dist);
        let mut c = o1.dot(&ol).re;
        if kind.staggered && dist % 2 == 1 {
            c = -c;
        }
        correlations.push(c);
    }

    Ok(OracleQfi { fisher, fisher_density: fisher / l as f64, correlations, mean })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(mu: f64, delta: f64, alpha: f64, l: usize) -> ModelParams {
        ModelParams::new(1.0, mu, delta, alpha, l).unwrap()
    }

    #[test]
    fn deep_trivial_ground_states() {
        // Δ=0, μ/J=2: every site filled.
        let psi = build_ground_state(&params(2.0, 0.0, 2.0, 6)).unwrap();
        let full = (1usize << 6) - 1;
        assert!((psi.amplitudes[full].norm() - 1.0).abs() < 1e-12);
        // Δ=0, μ/J=-2: vacuum.
        let psi = build_ground_state(&params(-2.0, 0.0, 2.0, 6)).unwrap();
        assert!((psi.amplitudes[0].norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn ground_state_norm_parity_and_energy() {
        for &(mu, delta, alpha) in &[(0.5, 1.0, 2.0), (-1.0, 0.7, 0.5), (2.0, -1.5, 0.0)] {
            let p = params(mu, delta, alpha, 8);
            let psi = build_ground_state(&p).unwrap();
            assert!((psi.norm() - 1.0).abs() < 1e-12);
            assert!((psi.parity_expectation() - 1.0).abs() < 1e-12);
            let sol = model::solve(&p).unwrap();
            let e = hamiltonian_expectation(&p, &psi);
            assert!(
                (e - sol.ground_energy()).abs() < 1e-10,
                "mu={mu} delta={delta} alpha={alpha}: {e} vs {}",
                sol.ground_energy()
            );
            let var = hamiltonian_variance(&p, &psi);
            let scale = sol.epsilon().iter().sum::<f64>().powi(2);
            // ⟨H²⟩ - ⟨H⟩² cancels two O(E²) numbers, so the residual floats
            // at ~1e-15 of that scale
            assert!(var.abs() <= 1e-15 * scale + 1e-13, "variance {var}");
        }
    }

    #[test]
    fn momentum_occupation_matches_angle() {
        let p = params(0.5, 1.0, 2.0, 8);
        let psi = build_ground_state(&p).unwrap();
        let sol = model::solve(&p).unwrap();
        let grid = model::build_grid(&p).unwrap();
        for (n, &k) in grid.modes().iter().enumerate() {
            let occ = momentum_occupation(&psi, k);
            let expect = (0.5 * sol.theta()[n]).sin().powi(2);
            assert!((occ - expect).abs() < 1e-10, "mode {n}");
        }
    }

    #[test]
    fn string_operator_squares_to_identity() {
        let p = params(0.3, 1.0, 1.0, 6);
        let psi = build_ground_state(&p).unwrap();
        for kind in OperatorKind::ALL {
            for site in [1, 3, 6] {
                let once = apply_string_operator(&psi, kind, site);
                let twice = apply_string_operator(&once, kind, site);
                let diff: f64 = twice
                    .amplitudes
                    .iter()
                    .zip(&psi.amplitudes)
                    .map(|(a, b)| (a - b).norm_sqr())
                    .sum();
                assert!(diff < 1e-24, "{kind} site={site}");
            }
        }
    }

    #[test]
    fn string_mean_vanishes() {
        let p = params(-0.8, 1.3, 0.7, 8);
        let psi = build_ground_state(&p).unwrap();
        for kind in OperatorKind::ALL {
            for site in 1..=8 {
                assert!(string_expectation(&psi, kind, site).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn string_on_vacuum_l2() {
        // No string on site 1: ô_x^(1)|0⟩ = a_1†|0⟩.
        let vac = FockState::vacuum(2);
        let out = apply_string_operator(&vac, OperatorKind::X, 1);
        assert!((out.amplitudes[0b01].re - 1.0).abs() < 1e-15);
        assert!(out.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>() - 1.0 < 1e-15);
    }

    #[test]
    fn product_state_qfi() {
        let q = brute_force_qfi(&params(2.0, 0.0, 2.0, 8), OperatorKind::X).unwrap();
        assert!((q.fisher_density - 1.0).abs() < 1e-10);
    }

    #[test]
    fn nearest_neighbor_saturation() {
        let q = brute_force_qfi(&params(0.0, 1.0, ALPHA_NN_SENTINEL, 8), OperatorKind::X).unwrap();
        assert!((q.fisher_density - 8.0).abs() < 1e-9, "{}", q.fisher_density);
    }

    #[test]
    fn rejects_large_l() {
        assert!(build_ground_state(&params(0.0, 1.0, 2.0, 16)).is_err());
        assert!(brute_force_qfi(&params(0.0, 1.0, 2.0, 14), OperatorKind::X).is_err());
    }
}
