//! Entanglement measures and the two-qubit rate law.
//!
//! For a state with Schmidt coefficient P ≤ 1/2 evolving under a Hamiltonian
//! with canonical couplings (μ1, μ2, μ3), the entanglement rate factorizes as
//!
//! ```text
//! Γ = f(P)·|h|,   f(P) = 2√(P(1−P))·E′(P),   h = ⟨φ,χ|H|φ⊥,χ⊥⟩,
//! ```
//!
//! so the two factors maximize independently: `|h| ≤ h_max = μ1 + μ2`, and
//! `f` peaks at a measure-dependent optimal coefficient `P0`. Driving the
//! state along the optimal family integrates to the closed form
//! `P(t) = sin²(h_max·t + φ0)`.

use num_complex::Complex64 as C64;

use crate::hamiltonian::{
    canonical_form, pauli_decompose, timescale, CanonicalForm, TwoQubitHamiltonian,
};
use crate::linalg::{schmidt_decompose, vec_kron, PureState};
use crate::{Error, Result};

/// An entanglement measure expressed through the Schmidt coefficient
/// P ∈ [0, 1/2] of a two-qubit pure state, together with its derivative.
///
/// Only the entropy of entanglement ships with validated constants; other
/// measures plug in through this trait.
pub trait EntanglementMeasure {
    /// E(P) in ebits; E(0) = 0 and E is nondecreasing on [0, 1/2].
    fn value(&self, p: f64) -> f64;
    /// dE/dP.
    fn derivative(&self, p: f64) -> f64;
}

/// The entropy of entanglement `E(P) = −P log2 P − (1−P) log2 (1−P)`.
#[derive(Debug, Clone, Copy, Default)]
pub struct EntropyOfEntanglement;

impl EntanglementMeasure for EntropyOfEntanglement {
    fn value(&self, p: f64) -> f64 {
        binary_entropy(p)
    }

    fn derivative(&self, p: f64) -> f64 {
        // log2((1−P)/P); diverges at the endpoints.
        (((1.0 - p) / p).ln()) / std::f64::consts::LN_2
    }
}

fn binary_entropy(p: f64) -> f64 {
    let term = |x: f64| if x <= 0.0 { 0.0 } else { -x * x.log2() };
    term(p) + term(1.0 - p)
}

fn check_unit_interval(name: &'static str, p: f64) -> Result<f64> {
    // Absorb round-off just outside the interval.
    if !(-1e-12..=1.0 + 1e-12).contains(&p) {
        return Err(Error::OutOfDomain { name, value: p });
    }
    Ok(p.clamp(0.0, 1.0))
}

/// Entropy of entanglement of a Schmidt coefficient p ∈ [0, 1], in ebits,
/// with the 0·log 0 = 0 limit.
pub fn entropy_of_entanglement(p: f64) -> Result<f64> {
    Ok(binary_entropy(check_unit_interval("p", p)?))
}

/// The state-dependent rate factor `f(P) = 2√(P(1−P))·E′(P)`.
///
/// The removable endpoint singularities are defined by their limits (0 for
/// the entropy measure).
pub fn rate_factor_f(p: f64, measure: &dyn EntanglementMeasure) -> Result<f64> {
    let p = check_unit_interval("p", p)?;
    if p == 0.0 || p == 1.0 {
        return Ok(0.0);
    }
    Ok(2.0 * (p * (1.0 - p)).sqrt() * measure.derivative(p))
}

/// Orthogonal complement of a qubit state `(a, b)`, fixed as `(−b̄, ā)`.
pub fn orthogonal_complement(q: &[C64; 2]) -> [C64; 2] {
    [-q[1].conj(), q[0].conj()]
}

/// The matrix element `h(H, φ, χ) = ⟨φ,χ|H|φ⊥,χ⊥⟩` whose modulus bounds the
/// entanglement rate.
pub fn matrix_element_h(h: &TwoQubitHamiltonian, phi: &[C64; 2], chi: &[C64; 2]) -> C64 {
    let bra = vec_kron(phi, chi);
    let ket = vec_kron(&orthogonal_complement(phi), &orthogonal_complement(chi));
    let hket = h.matrix().matvec(&ket);
    crate::linalg::inner(&bra, &hket)
}

/// The entanglement capability `h_max = μ1 + μ2`.
pub fn h_max(cf: &CanonicalForm) -> f64 {
    cf.mu[0] + cf.mu[1]
}

/// The Schmidt coefficient maximizing the rate factor `f`.
///
/// Located by bracketed bisection on df/dP over [1e−6, 1/2 − 1e−6] (at most
/// 200 iterations, absolute tolerance 1e−10), with a golden-section fallback
/// when the derivative is not usable. A maximum sitting at the maximally
/// entangled edge is reported as exactly 1/2; a rate factor that only
/// decreases from P = 0 has no interior maximum and is an error.
pub fn optimal_p0(measure: &dyn EntanglementMeasure) -> Result<f64> {
    let f = |p: f64| rate_factor_f(p, measure).unwrap_or(f64::NAN);
    let df = |p: f64| {
        let h = 1e-7_f64.min(0.5 * p).min(0.5 * (1.0 - p));
        (f(p + h) - f(p - h)) / (2.0 * h)
    };
    let (lo, hi) = (1e-6, 0.5 - 1e-6);
    let (d_lo, d_hi) = (df(lo), df(hi));
    if !d_lo.is_finite() || !d_hi.is_finite() {
        return golden_section_max(&f, lo, hi);
    }
    if d_lo <= 0.0 {
        return Err(Error::NoInteriorMaximum);
    }
    if d_hi >= 0.0 {
        // f still increasing at the right edge: the maximum is P = 1/2.
        return Ok(0.5);
    }
    let (mut lo, mut hi) = (lo, hi);
    for _ in 0..200 {
        if hi - lo <= 1e-10 {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if df(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

fn golden_section_max(f: &dyn Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> Result<f64> {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..200 {
        if hi - lo <= 1e-10 {
            break;
        }
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        }
    }
    let p = 0.5 * (lo + hi);
    if !f(p).is_finite() {
        return Err(Error::NoInteriorMaximum);
    }
    Ok(p)
}

/// The lab-frame state achieving the maximal rate at Schmidt coefficient `p`.
///
/// In the canonical frame the optimal state is `√P|0,1⟩ + i√(1−P)|1,0⟩` for
/// Ĥ+ and `√P|0,0⟩ + i√(1−P)|1,1⟩` for Ĥ−; the "+i" phases the second
/// Schmidt term so the rate-carrying matrix element contributes with positive
/// imaginary part. The result is mapped back through the inverse local basis
/// changes.
pub fn optimal_state(cf: &CanonicalForm, p: f64) -> Result<PureState> {
    if !(0.0..=0.5).contains(&p) {
        return Err(Error::OutOfDomain {
            name: "p",
            value: p,
        });
    }
    let amps = canonical_optimal_amplitudes(cf.det_sign, p);
    PureState::new(2, 2, cf.state_to_lab_frame(&amps))
}

/// Canonical-frame amplitudes of the optimal state (A-major ordering).
pub fn canonical_optimal_amplitudes(det_sign: i8, p: f64) -> Vec<C64> {
    let a = C64::new(p.sqrt(), 0.0);
    let b = C64::new(0.0, (1.0 - p).sqrt());
    let z = C64::new(0.0, 0.0);
    if det_sign >= 0 {
        vec![z, a, b, z] // √P|01⟩ + i√(1−P)|10⟩
    } else {
        vec![a, z, z, b] // √P|00⟩ + i√(1−P)|11⟩
    }
}

/// Time derivative of the Schmidt coefficient, with a degeneracy flag.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchmidtRate {
    /// dP/dt (one-sided at P = 1/2).
    pub value: f64,
    /// Set when the Schmidt coefficients are degenerate and the derivative
    /// is only one-sided.
    pub degenerate: bool,
}

/// Perturbative `dP/dt = 2√(P(1−P))·Im⟨φ,χ|H|φ⊥,χ⊥⟩` evaluated through the
/// Schmidt decomposition of the state (the relative phase `e^{iα}` is
/// carried inside the Schmidt vectors).
///
/// Local (single-qubit) terms of `H` drop out exactly by orthogonality.
pub fn dp_dt(state: &PureState, h: &TwoQubitHamiltonian) -> SchmidtRate {
    let sd = schmidt_decompose(state);
    let (lam_max, lam_min) = (sd.coefficients[0], sd.coefficients[1]);
    let bra = vec_kron(&sd.left_vectors[1], &sd.right_vectors[1]);
    let ket = vec_kron(&sd.left_vectors[0], &sd.right_vectors[0]);
    let me = crate::linalg::inner(&bra, &h.matrix().matvec(&ket));
    SchmidtRate {
        value: 2.0 * (lam_max * lam_min).max(0.0).sqrt() * me.im,
        degenerate: lam_max - lam_min <= 1e-10,
    }
}

/// Entanglement rate `Γ = E′(P)·dP/dt` of a two-qubit state.
pub fn rate_gamma(
    state: &PureState,
    h: &TwoQubitHamiltonian,
    measure: &dyn EntanglementMeasure,
) -> f64 {
    let rate = dp_dt(state, h);
    if rate.value == 0.0 {
        // Covers the product-state limit where E′ diverges but f → 0.
        return 0.0;
    }
    let p = schmidt_decompose(state).min_coefficient();
    measure.derivative(p) * rate.value
}

/// Closed-form optimal trajectory `P(t) = sin²(h_max·t + φ0)`.
///
/// Values above 1/2 are past the maximally entangled point; callers stop at
/// the first maximum.
pub fn closed_form_p(t: f64, h_max: f64, phi0: f64) -> f64 {
    let s = (h_max * t + phi0).sin();
    s * s
}

/// The optimal entanglement trajectory `E(P(t))` sampled on a grid,
/// truncated at the first maximum (P = 1/2).
pub fn e_max_curve(
    t_grid: &[f64],
    h_max: f64,
    phi0: f64,
    measure: &dyn EntanglementMeasure,
) -> Vec<(f64, f64)> {
    let t_stop = if h_max > 0.0 {
        (std::f64::consts::FRAC_PI_4 - phi0) / h_max
    } else {
        f64::INFINITY
    };
    t_grid
        .iter()
        .copied()
        .filter(|&t| t <= t_stop + 1e-12)
        .map(|t| (t, measure.value(closed_form_p(t, h_max, phi0).min(0.5))))
        .collect()
}

/// Invert an entanglement measure: the unique P ∈ [0, 1/2] with
/// `value(P) = e`, located by bisection to 1e−12.
pub fn invert_measure(e: f64, measure: &dyn EntanglementMeasure) -> Result<f64> {
    let e_max = measure.value(0.5);
    if !(-1e-12..=e_max + 1e-12).contains(&e) {
        return Err(Error::OutOfDomain {
            name: "e",
            value: e,
        });
    }
    let e = e.clamp(0.0, e_max);
    if e == 0.0 {
        return Ok(0.0);
    }
    if e == e_max {
        // The measure is flat at its maximum, where bisection on the value
        // only resolves P to √eps.
        return Ok(0.5);
    }
    let (mut lo, mut hi) = (0.0_f64, 0.5_f64);
    for _ in 0..200 {
        if hi - lo <= 1e-12 {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if measure.value(mid) < e {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Everything the rate law says about one Hamiltonian.
#[derive(Debug, Clone)]
pub struct CapabilityReport {
    /// Canonical couplings μ1 ≥ μ2 ≥ μ3.
    pub mu: [f64; 3],
    /// Standard-form branch (sign of det γ).
    pub det_sign: i8,
    /// Capability h_max = μ1 + μ2.
    pub h_max: f64,
    /// Ancilla-assisted capability h̃_max = μ1 + μ2 + μ3.
    pub h_tilde_max: f64,
    /// Optimal Schmidt coefficient of the entropy measure.
    pub p0: f64,
    /// Entropy of entanglement at p0.
    pub e_at_p0: f64,
    /// Rate factor at p0.
    pub f_at_p0: f64,
    /// Maximal rate Γ_max = f(P0)·h_max.
    pub gamma_max: f64,
    /// Typical time scale τ_H; absent when the spectrum is degenerate.
    pub tau_h: Option<f64>,
    /// Local terms dropped by the canonicalization: (α, β, trace part).
    pub dropped_local_terms: ([f64; 3], [f64; 3], f64),
}

impl CapabilityReport {
    /// Analyze a Hamiltonian with the entropy measure.
    pub fn for_hamiltonian(h: &TwoQubitHamiltonian) -> Result<Self> {
        let pc = pauli_decompose(h);
        let cf = canonical_form(&pc);
        let measure = EntropyOfEntanglement;
        let p0 = optimal_p0(&measure)?;
        let f_at_p0 = rate_factor_f(p0, &measure)?;
        let h_max = h_max(&cf);
        Ok(CapabilityReport {
            mu: cf.mu,
            det_sign: cf.det_sign,
            h_max,
            h_tilde_max: cf.mu_sum(),
            p0,
            e_at_p0: measure.value(p0),
            f_at_p0,
            gamma_max: f_at_p0 * h_max,
            tau_h: timescale(h).ok(),
            dropped_local_terms: (pc.alpha, pc.beta, pc.trace_part),
        })
    }
}
