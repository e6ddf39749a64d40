//! Ancilla-assisted entanglement rates.
//!
//! Each qubit carries a local ancilla qubit, so each side is a four-level
//! system and the state has four Schmidt coefficients. On the restricted
//! family λ = (P, (1−P)/3, (1−P)/3, (1−P)/3) the rate factorizes like the
//! two-qubit case,
//!
//! ```text
//! Γ̃ = f̃(P)·h̃,   f̃(P) = 2√(P(1−P)/3)·log2[(1−P)/(3P)],
//! ```
//!
//! and `|h̃| ≤ h̃_max = μ1 + μ2 + μ3`, attained when the Schmidt bases are
//! phased Bell states between each qubit and its ancilla. Since
//! `h̃_max ≥ h_max` while `|f̃(P̃0)| < f(P0)`, ancillas help exactly when the
//! couplings are anisotropic enough and the available entanglement is not
//! too small.

use num_complex::Complex64 as C64;

use crate::capability::{
    h_max, invert_measure, optimal_p0, rate_factor_f, EntanglementMeasure, EntropyOfEntanglement,
};
use crate::hamiltonian::{CanonicalForm, TwoQubitHamiltonian};
use crate::linalg::{inner, vec_kron, ComplexMatrix, PureState};
use crate::{Error, Result};

const LN_2: f64 = std::f64::consts::LN_2;

/// Bipartite pure state of two four-level systems (qubit ⊗ ancilla per
/// side) in explicit Schmidt form `|Ψ⟩ = Σ √λ_n |φ_n⟩⊗|χ_n⟩`.
#[derive(Debug, Clone)]
pub struct MultilevelSchmidtState {
    /// Schmidt coefficients, descending, Σλ = 1.
    pub lambdas: Vec<f64>,
    /// Orthonormal 4-dimensional vectors on side A (qubit ⊗ ancilla).
    pub phi_vectors: Vec<Vec<C64>>,
    /// Orthonormal 4-dimensional vectors on side B.
    pub chi_vectors: Vec<Vec<C64>>,
}

impl MultilevelSchmidtState {
    /// Validate the Schmidt-form invariants.
    pub fn new(
        lambdas: Vec<f64>,
        phi_vectors: Vec<Vec<C64>>,
        chi_vectors: Vec<Vec<C64>>,
    ) -> Result<Self> {
        assert_eq!(lambdas.len(), 4, "four Schmidt terms expected");
        assert_eq!(phi_vectors.len(), 4);
        assert_eq!(chi_vectors.len(), 4);
        let sum: f64 = lambdas.iter().sum();
        if (sum - 1.0).abs() > 1e-12 || lambdas.iter().any(|&l| l < -1e-15) {
            return Err(Error::NotNormalized { norm: sum });
        }
        if lambdas.windows(2).any(|w| w[0] < w[1] - 1e-12) {
            return Err(Error::OutOfDomain {
                name: "lambda order",
                value: 0.0,
            });
        }
        for set in [&phi_vectors, &chi_vectors] {
            for i in 0..4 {
                for j in 0..4 {
                    let ip = inner(&set[i], &set[j]);
                    let expect = if i == j { 1.0 } else { 0.0 };
                    if (ip - C64::new(expect, 0.0)).norm() > 1e-10 {
                        return Err(Error::OutOfDomain {
                            name: "orthonormality",
                            value: ip.norm(),
                        });
                    }
                }
            }
        }
        Ok(Self {
            lambdas,
            phi_vectors,
            chi_vectors,
        })
    }

    /// Assemble the 16-dimensional state vector.
    pub fn to_pure_state(&self) -> PureState {
        let mut amps = vec![C64::new(0.0, 0.0); 16];
        for n in 0..4 {
            let w = self.lambdas[n].max(0.0).sqrt();
            if w == 0.0 {
                continue;
            }
            let term = vec_kron(&self.phi_vectors[n], &self.chi_vectors[n]);
            for (a, t) in amps.iter_mut().zip(term) {
                *a += w * t;
            }
        }
        PureState::normalized(4, 4, amps).expect("Schmidt form assembles to a unit vector")
    }

    /// Schmidt form of a 4×4-amplitude pure state.
    pub fn from_pure_state(state: &PureState) -> Self {
        let sd = crate::linalg::schmidt_decompose(state);
        Self {
            lambdas: sd.coefficients,
            phi_vectors: sd.left_vectors,
            chi_vectors: sd.right_vectors,
        }
    }
}

/// Embed a two-qubit Hamiltonian as `H ⊗ 1` on the qubit factors of the
/// 16-dimensional space.
///
/// Index layout: side A is qubit⊗ancilla with index `a = 2·q_A + anc_A`,
/// likewise side B, and the full index is `4·a + b`. `H` itself is indexed
/// by `2·q_A + q_B`.
pub fn embed_on_qubits(h: &TwoQubitHamiltonian) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(16, 16);
    for qa in 0..2 {
        for aa in 0..2 {
            for qb in 0..2 {
                for ab in 0..2 {
                    let row = 4 * (2 * qa + aa) + (2 * qb + ab);
                    for qa2 in 0..2 {
                        for qb2 in 0..2 {
                            let col = 4 * (2 * qa2 + aa) + (2 * qb2 + ab);
                            out[(row, col)] = h.matrix()[(2 * qa + qb, 2 * qa2 + qb2)];
                        }
                    }
                }
            }
        }
    }
    out
}

/// `dλ_n/dt = 2 Σ_m √(λ_n λ_m)·Im⟨φ_n,χ_n|H|φ_m,χ_m⟩` for the n-th Schmidt
/// coefficient under a 16-dimensional Hamiltonian.
pub fn lambda_dot(state: &MultilevelSchmidtState, h_total: &ComplexMatrix, n: usize) -> f64 {
    assert!(n < 4, "Schmidt index out of range");
    let bra = vec_kron(&state.phi_vectors[n], &state.chi_vectors[n]);
    let mut acc = 0.0;
    for m in 0..4 {
        if m == n {
            continue; // diagonal element of a Hermitian operator is real
        }
        let ket = vec_kron(&state.phi_vectors[m], &state.chi_vectors[m]);
        let me = inner(&bra, &h_total.matvec(&ket));
        acc += 2.0 * (state.lambdas[n] * state.lambdas[m]).max(0.0).sqrt() * me.im;
    }
    acc
}

/// Multilevel entanglement rate with a degenerate-λ flag.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MultilevelRate {
    /// Γ̃ = Σ_n (∂E/∂λ_n)(dλ_n/dt), in ebits·u.
    pub value: f64,
    /// Set when some λ_n sits at zero, where ∂E/∂λ is defined by its
    /// (vanishing) product limit.
    pub degenerate: bool,
}

/// Rate of change of the multilevel entropy of entanglement
/// `E = −Σ λ_n log2 λ_n` under `h_total`.
///
/// The entropy derivative is `∂E/∂λ = −log2 λ − 1/ln 2`; at λ = 0 the term
/// `(∂E/∂λ_n)(dλ_n/dt)` tends to zero because `dλ_n/dt ∝ √λ_n`, and that
/// limit convention is applied with the flag set.
pub fn multilevel_rate(state: &MultilevelSchmidtState, h_total: &ComplexMatrix) -> MultilevelRate {
    let mut value = 0.0;
    let mut degenerate = false;
    for n in 0..4 {
        let lam = state.lambdas[n];
        if lam < 1e-18 {
            degenerate = true;
            continue;
        }
        let de = -lam.log2() - 1.0 / LN_2;
        value += de * lambda_dot(state, h_total, n);
    }
    MultilevelRate { value, degenerate }
}

/// Entropy of the equal-tail spectrum (P, (1−P)/3, (1−P)/3, (1−P)/3).
pub fn equal_tail_entropy(p: f64) -> f64 {
    let term = |x: f64| if x <= 0.0 { 0.0 } else { -x * x.log2() };
    let tail = (1.0 - p) / 3.0;
    term(p) + 3.0 * term(tail)
}

/// The restricted rate factor `f̃(P) = 2√(P(1−P)/3)·log2[(1−P)/(3P)]`.
///
/// Negative for P > 1/4; maximization uses |f̃|. Endpoints are defined by
/// their vanishing limits.
pub fn f_tilde(p: f64) -> Result<f64> {
    if !(-1e-12..=1.0 + 1e-12).contains(&p) {
        return Err(Error::OutOfDomain {
            name: "p",
            value: p,
        });
    }
    let p = p.clamp(0.0, 1.0);
    if p == 0.0 || p == 1.0 {
        return Ok(0.0);
    }
    Ok(2.0 * (p * (1.0 - p) / 3.0).sqrt() * (((1.0 - p) / (3.0 * p)).ln() / LN_2))
}

/// The coefficient P̃0 maximizing |f̃| on (0, 1), located by bisection on the
/// derivative over the dominant branch (1/4, 1) to absolute tolerance 1e−10.
pub fn optimal_p_tilde() -> f64 {
    // |f̃| = −f̃ on (1/4, 1); its derivative changes sign exactly once there.
    let df = |p: f64| {
        let h = 1e-7;
        -(f_tilde(p + h).unwrap() - f_tilde(p - h).unwrap()) / (2.0 * h)
    };
    let (mut lo, mut hi) = (0.26_f64, 1.0 - 1e-6);
    debug_assert!(df(lo) > 0.0 && df(hi) < 0.0);
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
    0.5 * (lo + hi)
}

/// Ancilla-assisted capability `h̃_max = μ1 + μ2 + μ3`.
pub fn h_tilde_max(cf: &CanonicalForm) -> f64 {
    cf.mu_sum()
}

/// The four Bell states in the (qubit ⊗ ancilla) ordering:
/// φ± = (|00⟩ ± |11⟩)/√2, ψ± = (|01⟩ ± |10⟩)/√2.
fn bell_state(which: usize) -> Vec<C64> {
    let s = C64::new(0.5_f64.sqrt(), 0.0);
    let z = C64::new(0.0, 0.0);
    match which {
        0 => vec![s, z, z, s],  // φ+
        1 => vec![z, s, s, z],  // ψ+
        2 => vec![z, s, -s, z], // ψ−
        3 => vec![s, z, z, -s], // φ−
        _ => unreachable!(),
    }
}

fn bell_base_phases() -> [C64; 4] {
    [
        C64::new(1.0, 0.0),
        C64::from_polar(1.0, 3.0 * std::f64::consts::FRAC_PI_4), // i^{3/2}
        C64::from_polar(1.0, std::f64::consts::FRAC_PI_4),       // i^{1/2}
        C64::from_polar(1.0, 3.0 * std::f64::consts::FRAC_PI_4), // i^{3/2}
    ]
}

/// The optimal Bell-basis configuration at dominant coefficient `p`.
///
/// The Schmidt bases are `φ1 = |φ+⟩`, `φ2 = i^{3/2}|ψ+⟩`, `φ3 = i^{1/2}|ψ−⟩`,
/// `φ4 = i^{3/2}|φ−⟩` with `χ_n = φ_n` and fractional powers on the principal
/// branch `i^x = e^{iπx/2}`. For det γ < 0 one phase is advanced by a further
/// factor i, found by a sign search over the term phases, so that all three
/// rate-carrying matrix elements keep a common sign and the canonical
/// Hamiltonian achieves `|h̃| = μ1 + μ2 + μ3`.
pub fn bell_configuration(p: f64, det_sign: i8) -> Result<MultilevelSchmidtState> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::OutOfDomain {
            name: "p",
            value: p,
        });
    }
    let base_phases = bell_base_phases();
    let flips = bell_phase_flips(det_sign);
    let vectors: Vec<Vec<C64>> = (0..4)
        .map(|n| {
            let phase = base_phases[n]
                * if flips[n] {
                    C64::new(0.0, 1.0)
                } else {
                    C64::new(1.0, 0.0)
                };
            bell_state(n).into_iter().map(|a| phase * a).collect()
        })
        .collect();

    let tail = (1.0 - p) / 3.0;
    let mut entries: Vec<(f64, usize)> = vec![(p, 0), (tail, 1), (tail, 2), (tail, 3)];
    // The state type keeps λ descending; for p < 1/4 the tail outweighs the
    // φ+ branch and the terms reorder (stable, so the tail order is kept).
    entries.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());
    let lambdas: Vec<f64> = entries.iter().map(|e| e.0).collect();
    let phi: Vec<Vec<C64>> = entries.iter().map(|e| vectors[e.1].clone()).collect();
    let chi = phi.clone();
    MultilevelSchmidtState::new(lambdas, phi, chi)
}

/// Extra per-term phase factors (i or 1) for the n ≥ 2 Bell vectors, chosen
/// at build time so the three matrix-element terms add with a common sign
/// for the standard form selected by `det_sign`.
fn bell_phase_flips(det_sign: i8) -> [bool; 4] {
    // Probe with distinct couplings so the search has no ties.
    let probe = CanonicalForm {
        mu: [3.0, 2.0, 1.0],
        det_sign,
        u_a: ComplexMatrix::identity(2),
        v_b: ComplexMatrix::identity(2),
    };
    let h_tot = embed_on_qubits(
        &TwoQubitHamiltonian::new(probe.standard_matrix()).expect("standard form is Hermitian"),
    );
    let base_phases = bell_base_phases();
    let term_im = |n: usize, flip: bool| -> f64 {
        let phase = base_phases[n]
            * if flip {
                C64::new(0.0, 1.0)
            } else {
                C64::new(1.0, 0.0)
            };
        let phi_n: Vec<C64> = bell_state(n).into_iter().map(|a| phase * a).collect();
        let bra = vec_kron(&bell_state(0), &bell_state(0));
        let ket = vec_kron(&phi_n, &phi_n);
        inner(&bra, &h_tot.matvec(&ket)).im
    };
    let mut flips = [false; 4];
    for (n, flip) in flips.iter_mut().enumerate().skip(1) {
        // Phasing φ_n by i multiplies its term by i² = −1; pick the sign
        // that sends the term negative (common direction).
        *flip = term_im(n, false) > 0.0;
    }
    flips
}

/// Rates with and without ancillas at a common entanglement `e`, plus the
/// crossover entanglement where the ancilla-assisted rate first wins.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AncillaComparison {
    /// Two-qubit rate Γ_E = f(P(e))·h_max (zero above 1 ebit, which two bare
    /// qubits cannot hold).
    pub gamma_e: f64,
    /// Restricted-family rate Γ̃_E = |f̃(P̃(e))|·h̃_max.
    pub gamma_tilde_e: f64,
    /// Γ̃_E ≥ Γ_E at this `e`.
    pub ancilla_wins: bool,
    /// Entanglement where the flag flips over (0, 1], when it does.
    pub crossover_e: Option<f64>,
}

/// Invert the equal-tail entropy on the descending branch P ∈ [1/4, 1].
pub fn invert_equal_tail_entropy(e: f64) -> Result<f64> {
    if !(-1e-12..=2.0 + 1e-12).contains(&e) {
        return Err(Error::OutOfDomain {
            name: "e",
            value: e,
        });
    }
    let e = e.clamp(0.0, 2.0);
    if e == 2.0 {
        return Ok(0.25);
    }
    // equal_tail_entropy decreases from 2 at P = 1/4 to 0 at P = 1.
    let (mut lo, mut hi) = (0.25_f64, 1.0_f64);
    for _ in 0..200 {
        if hi - lo <= 1e-12 {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if equal_tail_entropy(mid) > e {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

fn gamma_e_two_qubit(e: f64, h_max_v: f64, measure: &dyn EntanglementMeasure) -> f64 {
    if e > measure.value(0.5) {
        return 0.0;
    }
    let p = invert_measure(e, measure).expect("e within measure range");
    rate_factor_f(p, measure).expect("p in domain") * h_max_v
}

fn gamma_e_ancilla(e: f64, h_tilde: f64) -> f64 {
    let p = invert_equal_tail_entropy(e).expect("e within 4-level range");
    f_tilde(p).expect("p in domain").abs() * h_tilde
}

/// Compare the optimal rates with and without ancillas at entanglement `e`.
pub fn compare_with_without_ancilla(cf: &CanonicalForm, e: f64) -> Result<AncillaComparison> {
    if !(0.0..=2.0).contains(&e) {
        return Err(Error::OutOfDomain {
            name: "e",
            value: e,
        });
    }
    let measure = EntropyOfEntanglement;
    let hm = h_max(cf);
    let ht = h_tilde_max(cf);
    let gamma_e = gamma_e_two_qubit(e, hm, &measure);
    let gamma_tilde_e = gamma_e_ancilla(e, ht);
    let gap = |x: f64| gamma_e_ancilla(x, ht) - gamma_e_two_qubit(x, hm, &measure);
    let (mut lo, mut hi) = (1e-3, 1.0);
    let crossover_e = if gap(lo) * gap(hi) < 0.0 {
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if gap(mid) * gap(lo) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Some(0.5 * (lo + hi))
    } else {
        None
    };
    Ok(AncillaComparison {
        gamma_e,
        gamma_tilde_e,
        ancilla_wins: gamma_tilde_e >= gamma_e,
        crossover_e,
    })
}

/// Summary of the ancilla-assisted optimum for one Hamiltonian.
#[derive(Debug, Clone)]
pub struct AncillaReport {
    /// h̃_max = μ1 + μ2 + μ3.
    pub h_tilde_max: f64,
    /// Optimal dominant Schmidt coefficient P̃0.
    pub p_tilde0: f64,
    /// |f̃(P̃0)|.
    pub f_tilde_at_p0: f64,
    /// Γ̃_max = |f̃(P̃0)|·h̃_max.
    pub gamma_tilde_max: f64,
    /// Γ̃_max / Γ_max; absent when the Hamiltonian has no capability.
    pub ratio_vs_no_ancilla: Option<f64>,
    /// Crossover entanglement where Γ̃_E first wins, when it exists.
    pub crossover_e: Option<f64>,
}

impl AncillaReport {
    pub fn for_canonical_form(cf: &CanonicalForm) -> Result<Self> {
        let measure = EntropyOfEntanglement;
        let p_tilde0 = optimal_p_tilde();
        let f_tilde_at_p0 = f_tilde(p_tilde0)?.abs();
        let ht = h_tilde_max(cf);
        let gamma_tilde_max = f_tilde_at_p0 * ht;
        let gamma_max = rate_factor_f(optimal_p0(&measure)?, &measure)? * h_max(cf);
        let ratio = if gamma_max > 0.0 {
            Some(gamma_tilde_max / gamma_max)
        } else {
            None
        };
        let crossover_e = if ht > 0.0 {
            compare_with_without_ancilla(cf, 0.5)?.crossover_e
        } else {
            None
        };
        Ok(AncillaReport {
            h_tilde_max: ht,
            p_tilde0,
            f_tilde_at_p0,
            gamma_tilde_max,
            ratio_vs_no_ancilla: ratio,
            crossover_e,
        })
    }

    pub fn for_hamiltonian(h: &TwoQubitHamiltonian) -> Result<Self> {
        let cf = crate::hamiltonian::canonical_form(&crate::hamiltonian::pauli_decompose(h));
        Self::for_canonical_form(&cf)
    }
}
