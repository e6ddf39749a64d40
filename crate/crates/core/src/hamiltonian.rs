//! Two-qubit Hamiltonians: the Pauli expansion
//!
//! ```text
//! H = c·1 + Σ_i α_i σ_i⊗1 + Σ_j β_j 1⊗σ_j + Σ_ij γ_ij σ_i⊗σ_j
//! ```
//!
//! and the reduction of the nonlocal part to one of the two standard forms
//!
//! ```text
//! Ĥ± = μ1 σ1⊗σ1 ± μ2 σ2⊗σ2 + μ3 σ3⊗σ3,    μ1 ≥ μ2 ≥ μ3 ≥ 0,
//! ```
//!
//! where the μ are the sorted singular values of γ and the sign is that of
//! det γ. The SU(2) local basis changes realizing the reduction are returned
//! explicitly so states and operators can be moved between the lab frame and
//! the canonical frame.

use num_complex::Complex64 as C64;

use crate::linalg::{hermitian_eigensystem, kron, svd3_special, ComplexMatrix};
use crate::{Error, Result, Tolerances};

/// Pauli matrix σ_k for k = 1, 2, 3; k = 0 gives the 2×2 identity.
pub fn pauli(k: usize) -> ComplexMatrix {
    let z = C64::new(0.0, 0.0);
    let one = C64::new(1.0, 0.0);
    let i = C64::new(0.0, 1.0);
    match k {
        0 => ComplexMatrix::identity(2),
        1 => ComplexMatrix::from_rows(2, 2, &[z, one, one, z]),
        2 => ComplexMatrix::from_rows(2, 2, &[z, -i, i, z]),
        3 => ComplexMatrix::from_rows(2, 2, &[one, z, z, -one]),
        _ => panic!("pauli index must be 0..=3"),
    }
}

/// `σ_i ⊗ σ_j` on the two-qubit space (index 0 is the identity).
pub fn pauli_pair(i: usize, j: usize) -> ComplexMatrix {
    kron(&pauli(i), &pauli(j))
}

/// A Hermitian 4×4 two-qubit interaction Hamiltonian, entries in energy
/// units u.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoQubitHamiltonian {
    matrix: ComplexMatrix,
}

impl TwoQubitHamiltonian {
    /// Validate shape and Hermiticity.
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        assert_eq!(
            (matrix.rows(), matrix.cols()),
            (4, 4),
            "two-qubit Hamiltonian must be 4x4"
        );
        let dev = matrix.hermiticity_deviation();
        if dev > Tolerances::DEFAULT.hermiticity {
            return Err(Error::NonHermitianInput { deviation: dev });
        }
        Ok(Self { matrix })
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    /// Ising interaction σ1⊗σ1.
    pub fn ising() -> Self {
        Self {
            matrix: pauli_pair(1, 1),
        }
    }

    /// Isotropic Heisenberg interaction Σ_k σ_k⊗σ_k.
    pub fn heisenberg() -> Self {
        Self {
            matrix: pauli_pair(1, 1)
                .add(&pauli_pair(2, 2))
                .add(&pauli_pair(3, 3)),
        }
    }

    /// Typical time scale τ_H = (e_max − e_min)⁻¹ of the evolution.
    pub fn timescale(&self) -> Result<f64> {
        timescale(self)
    }
}

/// Real coefficients of the Pauli expansion of a Hermitian two-qubit
/// Hamiltonian. `trace_part` holds the physically trivial constant
/// (coefficient of the identity).
#[derive(Debug, Clone, PartialEq)]
pub struct PauliCoefficients {
    pub alpha: [f64; 3],
    pub beta: [f64; 3],
    pub gamma: [[f64; 3]; 3],
    pub trace_part: f64,
}

impl PauliCoefficients {
    /// Coefficients of a purely nonlocal Hamiltonian with interaction
    /// matrix `gamma`.
    pub fn nonlocal(gamma: [[f64; 3]; 3]) -> Self {
        Self {
            alpha: [0.0; 3],
            beta: [0.0; 3],
            gamma,
            trace_part: 0.0,
        }
    }

    /// Reassemble `trace_part·1 + Σα_i σ_i⊗1 + Σβ_j 1⊗σ_j + Σγ_ij σ_i⊗σ_j`.
    pub fn reconstruct(&self) -> TwoQubitHamiltonian {
        let mut m = ComplexMatrix::identity(4).scale(C64::new(self.trace_part, 0.0));
        for i in 0..3 {
            m = m.add(&pauli_pair(i + 1, 0).scale(C64::new(self.alpha[i], 0.0)));
            m = m.add(&pauli_pair(0, i + 1).scale(C64::new(self.beta[i], 0.0)));
        }
        for i in 0..3 {
            for j in 0..3 {
                if self.gamma[i][j] != 0.0 {
                    m = m.add(&pauli_pair(i + 1, j + 1).scale(C64::new(self.gamma[i][j], 0.0)));
                }
            }
        }
        TwoQubitHamiltonian { matrix: m }
    }

    /// Reassemble only the nonlocal part Σγ_ij σ_i⊗σ_j.
    pub fn reconstruct_nonlocal(&self) -> TwoQubitHamiltonian {
        Self::nonlocal(self.gamma).reconstruct()
    }
}

/// Expand a Hamiltonian in the Pauli basis; each coefficient is
/// `Tr(H·basis)/4`. Coefficients of a Hermitian input are real; residual
/// imaginary parts are round-off and dropped.
pub fn pauli_decompose(h: &TwoQubitHamiltonian) -> PauliCoefficients {
    let coeff = |i: usize, j: usize| -> f64 {
        let basis = pauli_pair(i, j);
        let mut acc = C64::new(0.0, 0.0);
        for r in 0..4 {
            for c in 0..4 {
                // Tr(H·B) with Hermitian B: Σ_rc H[r,c]·B[c,r].
                acc += h.matrix[(r, c)] * basis[(c, r)];
            }
        }
        acc.re / 4.0
    };
    let mut gamma = [[0.0; 3]; 3];
    let mut alpha = [0.0; 3];
    let mut beta = [0.0; 3];
    for i in 0..3 {
        alpha[i] = coeff(i + 1, 0);
        beta[i] = coeff(0, i + 1);
        for j in 0..3 {
            gamma[i][j] = coeff(i + 1, j + 1);
        }
    }
    PauliCoefficients {
        alpha,
        beta,
        gamma,
        trace_part: coeff(0, 0),
    }
}

/// Canonical form of the nonlocal part of a two-qubit Hamiltonian.
///
/// The local basis changes satisfy
///
/// ```text
/// (u_a ⊗ v_b) · H_nonlocal · (u_a ⊗ v_b)† = μ1 σ1⊗σ1 ± μ2 σ2⊗σ2 + μ3 σ3⊗σ3
/// ```
///
/// with the sign of the μ2 term given by `det_sign` (the sign of det γ; a
/// zero determinant is assigned +1, where Ĥ+ and Ĥ− coincide).
#[derive(Debug, Clone)]
pub struct CanonicalForm {
    /// Sorted couplings μ1 ≥ μ2 ≥ μ3 ≥ 0, units u.
    pub mu: [f64; 3],
    /// +1 selects Ĥ+, −1 selects Ĥ−.
    pub det_sign: i8,
    /// Local basis change on qubit A.
    pub u_a: ComplexMatrix,
    /// Local basis change on qubit B.
    pub v_b: ComplexMatrix,
}

impl CanonicalForm {
    /// `h_max = μ1 + μ2` lives in the capability module; expose the raw sum
    /// of couplings here for reuse.
    pub fn mu_sum(&self) -> f64 {
        self.mu.iter().sum()
    }

    /// The combined local basis change `u_a ⊗ v_b`.
    pub fn local_change(&self) -> ComplexMatrix {
        kron(&self.u_a, &self.v_b)
    }

    /// The standard-form matrix `μ1 σ1⊗σ1 ± μ2 σ2⊗σ2 + μ3 σ3⊗σ3`.
    pub fn standard_matrix(&self) -> ComplexMatrix {
        let mut m = pauli_pair(1, 1).scale(C64::new(self.mu[0], 0.0));
        m = m.add(&pauli_pair(2, 2).scale(C64::new(self.det_sign as f64 * self.mu[1], 0.0)));
        m.add(&pauli_pair(3, 3).scale(C64::new(self.mu[2], 0.0)))
    }

    /// Conjugate a lab-frame operator into the canonical frame:
    /// `(u_a⊗v_b) · m · (u_a⊗v_b)†`.
    pub fn to_canonical_frame(&self, m: &ComplexMatrix) -> ComplexMatrix {
        let w = self.local_change();
        w.mul(m).mul(&w.adjoint())
    }

    /// Map a canonical-frame state back to the lab frame:
    /// `(u_a⊗v_b)† |ψ⟩`.
    pub fn state_to_lab_frame(&self, amps: &[C64]) -> Vec<C64> {
        self.local_change().adjoint().matvec(amps)
    }

    /// The lab-frame nonlocal Hamiltonian this form was extracted from,
    /// reconstructed as `(u_a⊗v_b)† · Ĥ± · (u_a⊗v_b)`.
    pub fn nonlocal_hamiltonian(&self) -> TwoQubitHamiltonian {
        let w = self.local_change();
        let m = w.adjoint().mul(&self.standard_matrix()).mul(&w);
        TwoQubitHamiltonian::new(m).expect("conjugated standard form stays Hermitian")
    }
}

/// Reduce Pauli coefficients to the canonical form. The local terms α, β and
/// the trace part give no contribution to the entanglement capability and
/// are discarded here; callers that need them keep the [`PauliCoefficients`].
pub fn canonical_form(c: &PauliCoefficients) -> CanonicalForm {
    let svd = svd3_special(&c.gamma);
    // With U†σ_iU = Σ_k O_ki σ_k, conjugating by u_a⊗v_b maps the coupling
    // matrix γ to R(u_a)ᵀ γ R(v_b). The SVD gives γ = o_a·D·o_b, so the
    // rotations R(u_a) = o_a and R(v_b) = o_bᵀ diagonalize it.
    //
    // The SVD carries a negative det γ as a sign on the third singular
    // value; the standard form Ĥ− wants it on the μ2 term. Absorbing the
    // π-rotation diag(1,−1,−1) into o_a moves the sign:
    //   o_a·diag(s1,s2,−s3)·o_b = (o_a·diag(1,−1,−1))·diag(s1,−s2,s3)·o_b.
    let mut o_a = svd.o_a;
    if svd.det_sign < 0 {
        for row in o_a.iter_mut() {
            row[1] = -row[1];
            row[2] = -row[2];
        }
    }
    let u_a = su2_from_so3(&o_a).expect("svd3 factor is special orthogonal");
    let v_b =
        su2_from_so3(&mat3_transpose_pub(&svd.o_b)).expect("svd3 factor is special orthogonal");
    CanonicalForm {
        mu: svd.sigma,
        det_sign: svd.det_sign,
        u_a,
        v_b,
    }
}

fn mat3_transpose_pub(a: &[[f64; 3]; 3]) -> [[f64; 3]; 3] {
    let mut out = [[0.0; 3]; 3];
    for r in 0..3 {
        for c in 0..3 {
            out[r][c] = a[c][r];
        }
    }
    out
}

/// SU(2) element realizing a given SO(3) rotation on the Pauli vector:
/// returns `U` with `U†σ_i U = Σ_k O_ki σ_k`.
///
/// The two candidates ±U give the same rotation; the overall sign is fixed by
/// making the largest-magnitude entry of `U` have nonnegative real part
/// (nonnegative imaginary part breaking the remaining tie), so the output is
/// deterministic.
pub fn su2_from_so3(o: &[[f64; 3]; 3]) -> Result<ComplexMatrix> {
    // Validate orthogonality and det = +1.
    let mut dev = 0.0_f64;
    for i in 0..3 {
        for j in 0..3 {
            let dot: f64 = (0..3).map(|k| o[k][i] * o[k][j]).sum();
            let expect = if i == j { 1.0 } else { 0.0 };
            dev = dev.max((dot - expect).abs());
        }
    }
    let det = o[0][0] * (o[1][1] * o[2][2] - o[1][2] * o[2][1])
        - o[0][1] * (o[1][0] * o[2][2] - o[1][2] * o[2][0])
        + o[0][2] * (o[1][0] * o[2][1] - o[1][1] * o[2][0]);
    if dev > 1e-10 || (det - 1.0).abs() > 1e-10 {
        return Err(Error::NotSpecialOrthogonal);
    }

    // Quaternion (w, x, y, z) of the rotation, branch chosen for stability.
    let trace = o[0][0] + o[1][1] + o[2][2];
    let (w, x, y, z);
    if trace > 0.0 {
        let s = (trace + 1.0).sqrt() * 2.0;
        w = 0.25 * s;
        x = (o[2][1] - o[1][2]) / s;
        y = (o[0][2] - o[2][0]) / s;
        z = (o[1][0] - o[0][1]) / s;
    } else if o[0][0] > o[1][1] && o[0][0] > o[2][2] {
        let s = (1.0 + o[0][0] - o[1][1] - o[2][2]).sqrt() * 2.0;
        w = (o[2][1] - o[1][2]) / s;
        x = 0.25 * s;
        y = (o[0][1] + o[1][0]) / s;
        z = (o[0][2] + o[2][0]) / s;
    } else if o[1][1] > o[2][2] {
        let s = (1.0 + o[1][1] - o[0][0] - o[2][2]).sqrt() * 2.0;
        w = (o[0][2] - o[2][0]) / s;
        x = (o[0][1] + o[1][0]) / s;
        y = 0.25 * s;
        z = (o[1][2] + o[2][1]) / s;
    } else {
        let s = (1.0 + o[2][2] - o[0][0] - o[1][1]).sqrt() * 2.0;
        w = (o[1][0] - o[0][1]) / s;
        x = (o[0][2] + o[2][0]) / s;
        y = (o[1][2] + o[2][1]) / s;
        z = 0.25 * s;
    }
    // Renormalize the quaternion to absorb round-off from the branch math.
    let qn = (w * w + x * x + y * y + z * z).sqrt();
    let (w, x, y, z) = (w / qn, x / qn, y / qn, z / qn);

    // U = w·1 + i(x σ1 + y σ2 + z σ3).
    let mut u = ComplexMatrix::zeros(2, 2);
    u[(0, 0)] = C64::new(w, z);
    u[(0, 1)] = C64::new(y, x);
    u[(1, 0)] = C64::new(-y, x);
    u[(1, 1)] = C64::new(w, -z);

    // Deterministic sign: largest-magnitude entry gets nonnegative real part.
    let mut best = (0usize, 0usize);
    let mut best_mag = -1.0_f64;
    for r in 0..2 {
        for c in 0..2 {
            let m = u[(r, c)].norm();
            if m > best_mag + 1e-15 {
                best_mag = m;
                best = (r, c);
            }
        }
    }
    let e = u[best];
    if e.re < 0.0 || (e.re == 0.0 && e.im < 0.0) {
        u = u.scale(C64::new(-1.0, 0.0));
    }
    Ok(u)
}

/// Typical time scale τ_H = (e_max − e_min)⁻¹.
pub fn timescale(h: &TwoQubitHamiltonian) -> Result<f64> {
    let (values, _) = hermitian_eigensystem(h.matrix())?;
    let (e_min, e_max) = (values[0], values[values.len() - 1]);
    let spread = e_max - e_min;
    if spread <= 1e-12 * 1.0_f64.max(e_max.abs()) {
        return Err(Error::DegenerateSpectrum);
    }
    Ok(1.0 / spread)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::unitary_evolution;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn random_hermitian4(rng: &mut ChaCha8Rng) -> TwoQubitHamiltonian {
        let mut g = ComplexMatrix::zeros(4, 4);
        for r in 0..4 {
            for col in 0..4 {
                g[(r, col)] = c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            }
        }
        TwoQubitHamiltonian::new(g.add(&g.adjoint()).scale(c(0.5, 0.0))).unwrap()
    }

    fn random_local_unitary(rng: &mut ChaCha8Rng) -> ComplexMatrix {
        let mut g = ComplexMatrix::zeros(2, 2);
        for r in 0..2 {
            for col in 0..2 {
                g[(r, col)] = c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            }
        }
        let h = g.add(&g.adjoint()).scale(c(0.5, 0.0));
        unitary_evolution(&h, 1.0).unwrap()
    }

    #[test]
    fn decompose_sigma3_sigma3() {
        let h = TwoQubitHamiltonian::new(pauli_pair(3, 3)).unwrap();
        let pc = pauli_decompose(&h);
        assert_eq!(pc.gamma[2][2], 1.0);
        let mut off = 0.0_f64;
        for i in 0..3 {
            off = off.max(pc.alpha[i].abs()).max(pc.beta[i].abs());
            for j in 0..3 {
                if (i, j) != (2, 2) {
                    off = off.max(pc.gamma[i][j].abs());
                }
            }
        }
        assert!(off < 1e-14);
        assert!(pc.trace_part.abs() < 1e-14);
    }

    #[test]
    fn decompose_sigma1_identity() {
        let h = TwoQubitHamiltonian::new(pauli_pair(1, 0)).unwrap();
        let pc = pauli_decompose(&h);
        assert_eq!(pc.alpha, [1.0, 0.0, 0.0]);
        assert_eq!(pc.beta, [0.0; 3]);
        assert_eq!(pc.gamma, [[0.0; 3]; 3]);
    }

    #[test]
    fn decompose_heisenberg_plus_constant() {
        let m = TwoQubitHamiltonian::heisenberg()
            .matrix()
            .add(&ComplexMatrix::identity(4).scale(c(2.0, 0.0)));
        let pc = pauli_decompose(&TwoQubitHamiltonian::new(m).unwrap());
        for i in 0..3 {
            for j in 0..3 {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((pc.gamma[i][j] - expect).abs() < 1e-14);
            }
        }
        assert!((pc.trace_part - 2.0).abs() < 1e-14);
    }

    #[test]
    fn decompose_reconstruct_roundtrip() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..30 {
            let h = random_hermitian4(&mut rng);
            let pc = pauli_decompose(&h);
            let h2 = pc.reconstruct();
            assert!(h.matrix().max_abs_diff(h2.matrix()) < 1e-12);
        }
    }

    #[test]
    fn canonical_form_diagonal_examples() {
        let cf = canonical_form(&PauliCoefficients::nonlocal([
            [0., 0., 0.],
            [0., 0., 0.],
            [0., 0., 1.],
        ]));
        assert!((cf.mu[0] - 1.0).abs() < 1e-12 && cf.mu[1].abs() < 1e-12);
        assert_eq!(cf.det_sign, 1);

        let cf = canonical_form(&PauliCoefficients::nonlocal([
            [1., 0., 0.],
            [0., 1., 0.],
            [0., 0., 1.],
        ]));
        assert!(cf.mu.iter().all(|&m| (m - 1.0).abs() < 1e-12));
        assert_eq!(cf.det_sign, 1);

        let cf = canonical_form(&PauliCoefficients::nonlocal([
            [1., 0., 0.],
            [0., 1., 0.],
            [0., 0., -1.],
        ]));
        assert!(cf.mu.iter().all(|&m| (m - 1.0).abs() < 1e-12));
        assert_eq!(cf.det_sign, -1);
    }

    #[test]
    fn canonical_conjugation_reaches_standard_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        for _ in 0..40 {
            let h = random_hermitian4(&mut rng);
            let pc = pauli_decompose(&h);
            let cf = canonical_form(&pc);
            let nonlocal = pc.reconstruct_nonlocal();
            let conj = cf.to_canonical_frame(nonlocal.matrix());
            let dev = conj.max_abs_diff(&cf.standard_matrix());
            assert!(dev < 1e-10, "standard-form deviation {dev}");
            // Round trip back to the lab frame.
            assert!(
                cf.nonlocal_hamiltonian()
                    .matrix()
                    .max_abs_diff(nonlocal.matrix())
                    < 1e-10
            );
        }
    }

    #[test]
    fn canonical_invariant_under_local_conjugation() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for _ in 0..25 {
            let h = random_hermitian4(&mut rng);
            let cf = canonical_form(&pauli_decompose(&h));
            let w = kron(
                &random_local_unitary(&mut rng),
                &random_local_unitary(&mut rng),
            );
            let h2 = TwoQubitHamiltonian::new(w.mul(h.matrix()).mul(&w.adjoint())).unwrap();
            let cf2 = canonical_form(&pauli_decompose(&h2));
            for k in 0..3 {
                assert!((cf.mu[k] - cf2.mu[k]).abs() < 1e-10);
            }
            assert_eq!(cf.det_sign, cf2.det_sign);
        }
    }

    #[test]
    fn canonical_invariant_under_local_terms() {
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        for _ in 0..25 {
            let h = random_hermitian4(&mut rng);
            let mut pc = pauli_decompose(&h);
            let cf = canonical_form(&pc);
            pc.alpha = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), 0.3];
            pc.beta = [0.1, rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
            pc.trace_part = rng.gen_range(-1.0..1.0);
            let cf2 = canonical_form(&pc);
            for k in 0..3 {
                assert!((cf.mu[k] - cf2.mu[k]).abs() < 1e-10);
            }
            assert_eq!(cf.det_sign, cf2.det_sign);
        }
    }

    #[test]
    fn canonical_scales_linearly() {
        let mut rng = ChaCha8Rng::seed_from_u64(47);
        let h = random_hermitian4(&mut rng);
        let cf = canonical_form(&pauli_decompose(&h));
        let h2 = TwoQubitHamiltonian::new(h.matrix().scale(c(2.5, 0.0))).unwrap();
        let cf2 = canonical_form(&pauli_decompose(&h2));
        for k in 0..3 {
            assert!((2.5 * cf.mu[k] - cf2.mu[k]).abs() < 1e-12);
        }
    }

    #[test]
    fn su2_identity() {
        let u = su2_from_so3(&[[1., 0., 0.], [0., 1., 0.], [0., 0., 1.]]).unwrap();
        assert!(u.max_abs_diff(&ComplexMatrix::identity(2)) < 1e-12);
    }

    #[test]
    fn su2_rejects_reflection() {
        let r = su2_from_so3(&[[1., 0., 0.], [0., 1., 0.], [0., 0., -1.]]);
        assert!(matches!(r, Err(Error::NotSpecialOrthogonal)));
    }

    fn rotation_z(theta: f64) -> [[f64; 3]; 3] {
        let (s, c) = theta.sin_cos();
        [[c, -s, 0.], [s, c, 0.], [0., 0., 1.]]
    }

    #[test]
    fn su2_pi_about_axis3_is_sigma3() {
        let u = su2_from_so3(&rotation_z(std::f64::consts::PI)).unwrap();
        // Proportional to σ3: off-diagonals vanish, |diagonal| = 1.
        assert!(u[(0, 1)].norm() < 1e-12 && u[(1, 0)].norm() < 1e-12);
        assert!((u[(0, 0)].norm() - 1.0).abs() < 1e-12);
        assert!((u[(0, 0)] + u[(1, 1)]).norm() < 1e-12);
    }

    #[test]
    fn su2_conjugation_relation() {
        let mut rng = ChaCha8Rng::seed_from_u64(51);
        let check = |o: [[f64; 3]; 3]| {
            let u = su2_from_so3(&o).unwrap();
            assert!(u.is_unitary(1e-12));
            for i in 0..3 {
                let lhs = u.adjoint().mul(&pauli(i + 1)).mul(&u);
                let mut rhs = ComplexMatrix::zeros(2, 2);
                for k in 0..3 {
                    rhs = rhs.add(&pauli(k + 1).scale(c(o[k][i], 0.0)));
                }
                assert!(lhs.max_abs_diff(&rhs) < 1e-10);
            }
        };
        check(rotation_z(std::f64::consts::FRAC_PI_3));
        check(rotation_z(std::f64::consts::FRAC_PI_2));
        // Random rotations via the SVD factors of random matrices.
        for _ in 0..20 {
            let mut g = [[0.0; 3]; 3];
            for row in g.iter_mut() {
                for x in row.iter_mut() {
                    *x = rng.gen_range(-1.0..1.0);
                }
            }
            let svd = crate::linalg::svd3_special(&g);
            check(svd.o_a);
        }
    }

    #[test]
    fn su2_rotation_about_axis3_is_diagonal_phase() {
        for theta in [std::f64::consts::FRAC_PI_3, std::f64::consts::FRAC_PI_2] {
            let u = su2_from_so3(&rotation_z(theta)).unwrap();
            // diag(e^{iθ/2}, e^{−iθ/2}) up to the sign convention.
            let e = C64::from_polar(1.0, theta / 2.0);
            let direct = ComplexMatrix::from_rows(2, 2, &[e, c(0., 0.), c(0., 0.), e.conj()]);
            let diff_plus = u.max_abs_diff(&direct);
            let diff_minus = u.max_abs_diff(&direct.scale(c(-1., 0.)));
            assert!(diff_plus.min(diff_minus) < 1e-12);
        }
    }

    #[test]
    fn timescale_examples() {
        let zz = TwoQubitHamiltonian::new(pauli_pair(3, 3)).unwrap();
        assert!((timescale(&zz).unwrap() - 0.5).abs() < 1e-12);
        let zz2 = TwoQubitHamiltonian::new(pauli_pair(3, 3).scale(c(2.0, 0.0))).unwrap();
        assert!((timescale(&zz2).unwrap() - 0.25).abs() < 1e-12);
        // Heisenberg spectrum: singlet at −3, triplet at +1, spread 4.
        let heis = TwoQubitHamiltonian::heisenberg();
        assert!((timescale(&heis).unwrap() - 0.25).abs() < 1e-12);
    }

    #[test]
    fn timescale_rejects_identity() {
        let h = TwoQubitHamiltonian::new(ComplexMatrix::identity(4)).unwrap();
        assert!(matches!(timescale(&h), Err(Error::DegenerateSpectrum)));
    }
}
