//! Analysis of the entanglement capability of two-qubit interaction
//! Hamiltonians.
//!
//! Given an arbitrary Hermitian 4×4 interaction `H`, this crate
//!
//! - reduces the nonlocal part of `H` to its canonical diagonal form
//!   `μ1 σ1⊗σ1 ± μ2 σ2⊗σ2 + μ3 σ3⊗σ3` with explicit SU(2) local basis
//!   changes ([`hamiltonian`]),
//! - computes the maximal entanglement rate `Γ = f(P)·h_max` with
//!   `h_max = μ1 + μ2`, the optimal Schmidt coefficient `P0`, the optimal
//!   states, and the closed-form optimal trajectory `P(t) = sin²(h_max t + φ0)`
//!   ([`capability`]),
//! - evaluates the ancilla-assisted rate with `h̃_max = μ1 + μ2 + μ3` and the
//!   Bell-basis configuration that attains it ([`ancilla`]),
//! - simulates the step-wise optimal protocol of interleaved exact evolution
//!   and fast local corrections ([`protocol`]),
//! - synthesizes the action of any target two-qubit Hamiltonian from a source
//!   Hamiltonian plus local unitaries, within the `3α⁻¹t` time bound
//!   ([`hamsim`]),
//! - cross-checks every analytic optimum by brute-force search and finite
//!   differences ([`oracle`]).
//!
//! Units: ħ = 1 throughout. Energies are in arbitrary units `u`, times in
//! `1/u`, and entanglement in ebits (base-2 logarithms).

// Index loops over several parallel arrays dominate this crate's numerics;
// iterator rewrites hurt readability there.
#![allow(clippy::needless_range_loop)]

pub mod ancilla;
pub mod capability;
pub mod hamiltonian;
pub mod hamsim;
pub mod linalg;
pub mod oracle;
pub mod protocol;

use thiserror::Error;

/// Errors shared across the crate's modules.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A matrix that must be Hermitian failed the Hermiticity check.
    #[error("input matrix is not Hermitian (max deviation {deviation:.3e})")]
    NonHermitianInput { deviation: f64 },
    /// A 3×3 matrix that must lie in SO(3) failed the orthogonality or
    /// determinant check.
    #[error("input matrix is not special orthogonal")]
    NotSpecialOrthogonal,
    /// The spectrum of a Hamiltonian has no spread, so no time scale exists.
    #[error("Hamiltonian spectrum is degenerate; no time scale defined")]
    DegenerateSpectrum,
    /// A state vector is not normalized.
    #[error("state vector is not normalized (norm {norm})")]
    NotNormalized { norm: f64 },
    /// A scalar argument lies outside the domain of the operation.
    #[error("{name} = {value} is outside the valid domain")]
    OutOfDomain { name: &'static str, value: f64 },
    /// The rate factor has no interior maximum on (0, 1/2).
    #[error("rate factor has no interior maximum on (0, 1/2)")]
    NoInteriorMaximum,
    /// Schmidt coefficients are too close to degenerate for a finite
    /// difference check.
    #[error("Schmidt coefficients are degenerate; derivative check undefined")]
    DegenerateSchmidt,
    /// The protocol step exceeds the fast-local-operation limit.
    #[error("step dt = {dt} exceeds the limit {limit} (0.01 tau_H)")]
    StepTooLarge { dt: f64, limit: f64 },
    /// The source Hamiltonian has no nonlocal coupling to work with.
    #[error("source Hamiltonian has zero coupling (mu1 = 0)")]
    ZeroCoupling,
}

/// Crate-wide result type.
pub type Result<T> = std::result::Result<T, Error>;

/// Numerical tolerances used by validity checks and decompositions.
///
/// All checks in the crate read their thresholds from one of these records so
/// property tests have a single knob to tighten or relax.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Relative tolerance for Hermiticity checks.
    pub hermiticity: f64,
    /// Absolute tolerance for unitarity checks (`max|U†U − I|`).
    pub unitarity: f64,
    /// Absolute tolerance for reconstruction checks (Schmidt reassembly,
    /// SVD reassembly, Pauli reassembly).
    pub reconstruction: f64,
    /// Absolute tolerance for orthonormality of vector sets.
    pub orthonormality: f64,
    /// Absolute tolerance for normalization sums (state norms, Σλ = 1).
    pub normalization: f64,
}

impl Tolerances {
    pub const DEFAULT: Tolerances = Tolerances {
        hermiticity: 1e-12,
        unitarity: 1e-10,
        reconstruction: 1e-10,
        orthonormality: 1e-10,
        normalization: 1e-12,
    };
}

impl Default for Tolerances {
    fn default() -> Self {
        Self::DEFAULT
    }
}
