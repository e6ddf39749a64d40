//! Dense complex linear algebra on the small fixed dimensions (2, 3, 4, 16)
//! used by the rest of the crate: Kronecker products, Hermitian eigensystems,
//! matrix exponentials, partial traces, Schmidt decompositions, and a
//! sign-normalized 3×3 singular value decomposition.
//!
//! Everything here is a pure function of its inputs; values are immutable
//! after construction and safe to share between threads.

use num_complex::Complex64 as C64;

use crate::{Error, Result, Tolerances};

/// Which subsystem of a bipartite state to keep when tracing out the other.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subsystem {
    A,
    B,
}

// ---------------------------------------------------------------------------
// Vector helpers
// ---------------------------------------------------------------------------

/// Hermitian inner product ⟨a|b⟩ (conjugate-linear in the first argument).
pub fn inner(a: &[C64], b: &[C64]) -> C64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Euclidean norm of a complex vector.
pub fn vec_norm(v: &[C64]) -> f64 {
    v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

/// Tensor product of two vectors, `a` major.
pub fn vec_kron(a: &[C64], b: &[C64]) -> Vec<C64> {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for &x in a {
        for &y in b {
            out.push(x * y);
        }
    }
    out
}

fn scale_vec(v: &[C64], s: C64) -> Vec<C64> {
    v.iter().map(|&x| s * x).collect()
}

// ---------------------------------------------------------------------------
// ComplexMatrix
// ---------------------------------------------------------------------------

/// Dense complex matrix, row-major storage.
///
/// Houses Hamiltonians, unitaries, and density operators. Shape mismatches in
/// arithmetic are programming errors and panic; domain errors (failed
/// Hermiticity and the like) are reported through [`Result`].
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl std::fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            write!(f, "  ")?;
            for c in 0..self.cols {
                let z = self[(r, c)];
                write!(f, "{:+.4}{:+.4}i  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl std::ops::Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    fn index(&self, (r, c): (usize, usize)) -> &C64 {
        &self.data[r * self.cols + c]
    }
}

impl std::ops::IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut C64 {
        &mut self.data[r * self.cols + c]
    }
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![C64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    /// Build from a row-major slice of entries.
    pub fn from_rows(rows: usize, cols: usize, entries: &[C64]) -> Self {
        assert_eq!(rows * cols, entries.len(), "entry count must match shape");
        Self {
            rows,
            cols,
            data: entries.to_vec(),
        }
    }

    /// Build from real row-major entries.
    pub fn from_real(rows: usize, cols: usize, entries: &[f64]) -> Self {
        let data = entries
            .iter()
            .map(|&x| C64::new(x, 0.0))
            .collect::<Vec<_>>();
        Self::from_rows(rows, cols, &data)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out[(c, r)] = self[(r, c)].conj();
            }
        }
        out
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out[(c, r)] = self[(r, c)];
            }
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "shape mismatch in matrix product");
        let mut out = Self::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(r, k)];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                for c in 0..other.cols {
                    out[(r, c)] += a * other[(k, c)];
                }
            }
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a + b)
            .collect();
        Self {
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a - b)
            .collect();
        Self {
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn scale(&self, s: C64) -> Self {
        let data = self.data.iter().map(|&x| s * x).collect();
        Self {
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn trace(&self) -> C64 {
        assert_eq!(self.rows, self.cols);
        (0..self.rows).map(|i| self[(i, i)]).sum()
    }

    /// Matrix–vector product.
    pub fn matvec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(self.cols, v.len(), "shape mismatch in matvec");
        let mut out = vec![C64::new(0.0, 0.0); self.rows];
        for r in 0..self.rows {
            let mut acc = C64::new(0.0, 0.0);
            for c in 0..self.cols {
                acc += self[(r, c)] * v[c];
            }
            out[r] = acc;
        }
        out
    }

    /// Largest entry magnitude.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|x| x.norm()).fold(0.0, f64::max)
    }

    /// Largest entry magnitude of `self − other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Hermiticity deviation `max|M − M†|` relative to `max(1, max|M|)`.
    pub fn hermiticity_deviation(&self) -> f64 {
        assert_eq!(self.rows, self.cols);
        let mut dev: f64 = 0.0;
        for r in 0..self.rows {
            for c in r..self.cols {
                dev = dev.max((self[(r, c)] - self[(c, r)].conj()).norm());
            }
        }
        dev / 1.0_f64.max(self.max_abs())
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.rows == self.cols && self.hermiticity_deviation() <= tol
    }

    /// `max|U†U − I|`.
    pub fn unitarity_deviation(&self) -> f64 {
        let gram = self.adjoint().mul(self);
        gram.max_abs_diff(&Self::identity(self.cols))
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.rows == self.cols && self.unitarity_deviation() <= tol
    }

    /// Operator norm (largest singular value), computed from the top
    /// eigenvalue of `M†M`.
    pub fn operator_norm(&self) -> f64 {
        let gram = self.adjoint().mul(self);
        let (vals, _) = hermitian_eigensystem_unchecked(&gram);
        vals.last().copied().unwrap_or(0.0).max(0.0).sqrt()
    }
}

/// Kronecker product `a ⊗ b`; dimensions multiply.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(a.rows() * b.rows(), a.cols() * b.cols());
    for ra in 0..a.rows() {
        for ca in 0..a.cols() {
            let x = a[(ra, ca)];
            if x == C64::new(0.0, 0.0) {
                continue;
            }
            for rb in 0..b.rows() {
                for cb in 0..b.cols() {
                    out[(ra * b.rows() + rb, ca * b.cols() + cb)] = x * b[(rb, cb)];
                }
            }
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Hermitian eigensystem (cyclic Jacobi with complex rotations)
// ---------------------------------------------------------------------------

fn offdiag_norm(a: &ComplexMatrix) -> f64 {
    let n = a.rows();
    let mut s = 0.0;
    for r in 0..n {
        for c in 0..n {
            if r != c {
                s += a[(r, c)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// Eigensystem of a Hermitian matrix: eigenvalues ascending with matching
/// orthonormal eigenvector columns.
///
/// The input must pass the Hermiticity check at the default tolerance.
pub fn hermitian_eigensystem(m: &ComplexMatrix) -> Result<(Vec<f64>, ComplexMatrix)> {
    let dev = m.hermiticity_deviation();
    if dev > Tolerances::DEFAULT.hermiticity {
        return Err(Error::NonHermitianInput { deviation: dev });
    }
    Ok(hermitian_eigensystem_unchecked(m))
}

/// Jacobi eigensolver without the Hermiticity precondition check. The strict
/// lower triangle of the input is ignored (it is reconstructed from the upper
/// one), so tiny asymmetries cannot leak into the result.
fn hermitian_eigensystem_unchecked(m: &ComplexMatrix) -> (Vec<f64>, ComplexMatrix) {
    let n = m.rows();
    // Work on the exactly-Hermitian average of M and M†.
    let mut a = ComplexMatrix::zeros(n, n);
    for r in 0..n {
        a[(r, r)] = C64::new(m[(r, r)].re, 0.0);
        for c in (r + 1)..n {
            let z = (m[(r, c)] + m[(c, r)].conj()) * 0.5;
            a[(r, c)] = z;
            a[(c, r)] = z.conj();
        }
    }
    let mut v = ComplexMatrix::identity(n);
    let scale = a.max_abs().max(1e-300);
    let tol = 1e-15 * scale * (n as f64);

    for _sweep in 0..60 {
        if offdiag_norm(&a) <= tol {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                if apq.norm() <= tol / (n as f64) {
                    continue;
                }
                // Factor out the phase so the 2×2 block becomes real
                // symmetric, then apply a classic Jacobi rotation.
                let phase = apq / apq.norm(); // e^{i arg(apq)}
                let g = apq.norm();
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let tau = (aqq - app) / (2.0 * g);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // Combined rotation R: columns (p, q) mix with
                //   R[p,p] = c         R[p,q] = s
                //   R[q,p] = -s·e^{-iφ}  R[q,q] = c·e^{-iφ}
                // where e^{iφ} is the phase of a[p,q]. Then R†AR zeroes (p,q).
                let rpp = C64::new(c, 0.0);
                let rpq = C64::new(s, 0.0);
                let rqp = -phase.conj() * s;
                let rqq = phase.conj() * c;

                // A ← R† A R, applied as row then column updates.
                for j in 0..n {
                    let ap = a[(p, j)];
                    let aq = a[(q, j)];
                    a[(p, j)] = rpp.conj() * ap + rqp.conj() * aq;
                    a[(q, j)] = rpq.conj() * ap + rqq.conj() * aq;
                }
                for i in 0..n {
                    let ap = a[(i, p)];
                    let aq = a[(i, q)];
                    a[(i, p)] = ap * rpp + aq * rqp;
                    a[(i, q)] = ap * rpq + aq * rqq;
                }
                // Clean the rotated pair to keep the matrix exactly Hermitian.
                a[(p, q)] = C64::new(0.0, 0.0);
                a[(q, p)] = C64::new(0.0, 0.0);
                a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
                a[(q, q)] = C64::new(a[(q, q)].re, 0.0);

                for i in 0..n {
                    let vp = v[(i, p)];
                    let vq = v[(i, q)];
                    v[(i, p)] = vp * rpp + vq * rqp;
                    v[(i, q)] = vp * rpq + vq * rqq;
                }
            }
        }
    }

    // Sort ascending; stable so degenerate values keep their Jacobi order.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.partial_cmp(&a[(j, j)].re).unwrap());
    let values: Vec<f64> = order.iter().map(|&i| a[(i, i)].re).collect();
    let mut vectors = ComplexMatrix::zeros(n, n);
    for (new_col, &old_col) in order.iter().enumerate() {
        for r in 0..n {
            vectors[(r, new_col)] = v[(r, old_col)];
        }
    }
    (values, vectors)
}

/// Evolution operator `exp(−iHt)` via the eigensystem of the Hermitian `h`.
pub fn unitary_evolution(h: &ComplexMatrix, t: f64) -> Result<ComplexMatrix> {
    let (values, vectors) = hermitian_eigensystem(h)?;
    let n = h.rows();
    let mut u = ComplexMatrix::zeros(n, n);
    for (k, &e) in values.iter().enumerate() {
        let phase = C64::from_polar(1.0, -e * t);
        for r in 0..n {
            let vr = vectors[(r, k)];
            if vr == C64::new(0.0, 0.0) {
                continue;
            }
            for c in 0..n {
                u[(r, c)] += phase * vr * vectors[(c, k)].conj();
            }
        }
    }
    Ok(u)
}

// ---------------------------------------------------------------------------
// Pure states, partial trace, Schmidt decomposition
// ---------------------------------------------------------------------------

/// Normalized pure state of a bipartite system with local dimensions
/// `dim_a` and `dim_b` (2 or 4 in this crate). Amplitudes are stored
/// A-major: `amp[i·dim_b + j] = ⟨i,j|Ψ⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    dim_a: usize,
    dim_b: usize,
    amplitudes: Vec<C64>,
}

impl PureState {
    /// Build a state, validating the norm against the default tolerance.
    pub fn new(dim_a: usize, dim_b: usize, amplitudes: Vec<C64>) -> Result<Self> {
        assert_eq!(
            dim_a * dim_b,
            amplitudes.len(),
            "amplitude count must match dims"
        );
        let norm = vec_norm(&amplitudes);
        if (norm - 1.0).abs() > Tolerances::DEFAULT.normalization {
            return Err(Error::NotNormalized { norm });
        }
        Ok(Self {
            dim_a,
            dim_b,
            amplitudes,
        })
    }

    /// Build a state, rescaling the amplitudes to unit norm.
    pub fn normalized(dim_a: usize, dim_b: usize, amplitudes: Vec<C64>) -> Result<Self> {
        let norm = vec_norm(&amplitudes);
        if norm < 1e-300 {
            return Err(Error::NotNormalized { norm });
        }
        let amplitudes = scale_vec(&amplitudes, C64::new(1.0 / norm, 0.0));
        Ok(Self {
            dim_a,
            dim_b,
            amplitudes,
        })
    }

    /// Product state `|a⟩ ⊗ |b⟩`.
    pub fn product(a: &[C64], b: &[C64]) -> Result<Self> {
        Self::normalized(a.len(), b.len(), vec_kron(a, b))
    }

    pub fn dim_a(&self) -> usize {
        self.dim_a
    }

    pub fn dim_b(&self) -> usize {
        self.dim_b
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    /// Apply a `dim·dim` operator on the full space (dim = dim_a·dim_b),
    /// renormalizing to absorb round-off. Intended for unitaries.
    pub fn apply(&self, u: &ComplexMatrix) -> Self {
        let amps = u.matvec(&self.amplitudes);
        Self::normalized(self.dim_a, self.dim_b, amps).expect("unitary image of a state")
    }

    /// Apply local operators `a ⊗ b`.
    pub fn apply_local(&self, a: &ComplexMatrix, b: &ComplexMatrix) -> Self {
        self.apply(&kron(a, b))
    }

    /// Overlap `⟨self|other⟩`.
    pub fn overlap(&self, other: &Self) -> C64 {
        inner(&self.amplitudes, &other.amplitudes)
    }
}

/// Reduced density operator of `state` on the kept subsystem.
///
/// The result is Hermitian, positive semidefinite, and unit-trace to
/// round-off.
pub fn partial_trace(state: &PureState, keep: Subsystem) -> ComplexMatrix {
    let (da, db) = (state.dim_a, state.dim_b);
    let amp = |i: usize, j: usize| state.amplitudes[i * db + j];
    match keep {
        Subsystem::A => {
            let mut rho = ComplexMatrix::zeros(da, da);
            for i in 0..da {
                for i2 in 0..da {
                    let mut acc = C64::new(0.0, 0.0);
                    for j in 0..db {
                        acc += amp(i, j) * amp(i2, j).conj();
                    }
                    rho[(i, i2)] = acc;
                }
            }
            rho
        }
        Subsystem::B => {
            let mut rho = ComplexMatrix::zeros(db, db);
            for j in 0..db {
                for j2 in 0..db {
                    let mut acc = C64::new(0.0, 0.0);
                    for i in 0..da {
                        acc += amp(i, j) * amp(i, j2).conj();
                    }
                    rho[(j, j2)] = acc;
                }
            }
            rho
        }
    }
}

/// Schmidt decomposition `|Ψ⟩ = Σ √λ_n |φ_n⟩ ⊗ |χ_n⟩` with λ descending.
///
/// Any relative phase between the Schmidt terms is absorbed into the right
/// vectors, so the reassembly with real nonnegative weights is exact. For
/// degenerate coefficients the basis choice inside the degenerate subspace
/// is arbitrary; callers must not rely on it.
#[derive(Debug, Clone)]
pub struct SchmidtDecomposition {
    /// Squared Schmidt weights λ_n, descending, Σλ = 1.
    pub coefficients: Vec<f64>,
    /// Orthonormal left vectors |φ_n⟩ (dimension dim_a).
    pub left_vectors: Vec<Vec<C64>>,
    /// Orthonormal right vectors |χ_n⟩ (dimension dim_b).
    pub right_vectors: Vec<Vec<C64>>,
}

impl SchmidtDecomposition {
    /// Number of terms (min(dim_a, dim_b)).
    pub fn len(&self) -> usize {
        self.coefficients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coefficients.is_empty()
    }

    /// The minimum coefficient; for a 2×2 state this is the Schmidt
    /// coefficient P ≤ 1/2.
    pub fn min_coefficient(&self) -> f64 {
        self.coefficients.last().copied().unwrap_or(0.0)
    }

    /// Reassemble Σ √λ_n |φ_n⟩⊗|χ_n⟩.
    pub fn reassemble(&self) -> Vec<C64> {
        let da = self.left_vectors[0].len();
        let db = self.right_vectors[0].len();
        let mut out = vec![C64::new(0.0, 0.0); da * db];
        for n in 0..self.len() {
            let w = self.coefficients[n].max(0.0).sqrt();
            for i in 0..da {
                for j in 0..db {
                    out[i * db + j] += w * self.left_vectors[n][i] * self.right_vectors[n][j];
                }
            }
        }
        out
    }
}

/// Complete `vs` (orthonormal vectors of dimension `dim`) to a full
/// orthonormal set by Gram–Schmidt over the standard basis.
fn orthonormal_completion(vs: &mut Vec<Vec<C64>>, dim: usize) {
    let mut cand = 0;
    while vs.len() < dim {
        assert!(cand < dim, "completion exhausted candidates");
        let mut v = vec![C64::new(0.0, 0.0); dim];
        v[cand] = C64::new(1.0, 0.0);
        cand += 1;
        for u in vs.iter() {
            let c = inner(u, &v);
            for k in 0..dim {
                v[k] -= c * u[k];
            }
        }
        let n = vec_norm(&v);
        if n > 1e-6 {
            vs.push(scale_vec(&v, C64::new(1.0 / n, 0.0)));
        }
    }
}

/// Schmidt decomposition of a bipartite pure state.
///
/// Left vectors come from the eigensystem of the reduced operator ρ_A. The
/// weights and right vectors are then read off the amplitude matrix as
/// `w_n χ_n = conj(M†φ_n)`, which keeps tiny coefficients at the round-off
/// floor (w² instead of a √eps-noisy eigenvalue) and puts every relative
/// phase on the right side. Right vectors of negligible weight are replaced
/// by orthonormal completion.
pub fn schmidt_decompose(state: &PureState) -> SchmidtDecomposition {
    let (da, db) = (state.dim_a, state.dim_b);
    let nterms = da.min(db);
    let rho_a = partial_trace(state, Subsystem::A);
    let (values, vectors) = hermitian_eigensystem_unchecked(&rho_a);

    // Left vectors in descending eigenvalue order.
    let mut order: Vec<usize> = (0..da).collect();
    order.sort_by(|&i, &j| values[j].partial_cmp(&values[i]).unwrap());
    let left_vectors: Vec<Vec<C64>> = order[..nterms]
        .iter()
        .map(|&k| (0..da).map(|r| vectors[(r, k)]).collect())
        .collect();

    let amp = |i: usize, j: usize| state.amplitudes[i * db + j];
    let mut coefficients = Vec::with_capacity(nterms);
    let mut right_vectors: Vec<Vec<C64>> = Vec::with_capacity(nterms);
    for phi in &left_vectors {
        let mut chi = vec![C64::new(0.0, 0.0); db];
        for (j, c) in chi.iter_mut().enumerate() {
            let mut acc = C64::new(0.0, 0.0);
            for i in 0..da {
                acc += amp(i, j) * phi[i].conj();
            }
            *c = acc;
        }
        let w = vec_norm(&chi);
        coefficients.push(w * w);
        // Gram–Schmidt against the heavier, already-accepted branches. For a
        // genuine branch the correction is O(eps/w_prev); a weight at the
        // noise floor collapses here and is handed to the completion below.
        for prev in right_vectors.iter().filter(|v| !v.is_empty()) {
            let c = inner(prev, &chi);
            for k in 0..db {
                chi[k] -= c * prev[k];
            }
        }
        let n2 = vec_norm(&chi);
        if n2 > 0.5 * w && w > 1e-150 {
            right_vectors.push(scale_vec(&chi, C64::new(1.0 / n2, 0.0)));
        } else {
            right_vectors.push(Vec::new());
        }
    }
    let mut filled: Vec<Vec<C64>> = right_vectors
        .iter()
        .filter(|v| !v.is_empty())
        .cloned()
        .collect();
    orthonormal_completion(&mut filled, db);
    let mut extra = filled.split_off(right_vectors.iter().filter(|v| !v.is_empty()).count());
    for rv in right_vectors.iter_mut() {
        if rv.is_empty() {
            *rv = extra.remove(0);
        }
    }

    // Restore exact descending order (the weights can swap eigenvalue order
    // by round-off near degeneracies) and normalize Σλ = 1.
    let mut idx: Vec<usize> = (0..nterms).collect();
    idx.sort_by(|&i, &j| coefficients[j].partial_cmp(&coefficients[i]).unwrap());
    let mut coefficients: Vec<f64> = idx.iter().map(|&k| coefficients[k]).collect();
    let left_vectors: Vec<Vec<C64>> = idx.iter().map(|&k| left_vectors[k].clone()).collect();
    let right_vectors: Vec<Vec<C64>> = idx.iter().map(|&k| right_vectors[k].clone()).collect();
    let total: f64 = coefficients.iter().sum();
    if total > 0.0 {
        for c in coefficients.iter_mut() {
            *c /= total;
        }
    }

    SchmidtDecomposition {
        coefficients,
        left_vectors,
        right_vectors,
    }
}

// ---------------------------------------------------------------------------
// Real 3×3 special singular value decomposition
// ---------------------------------------------------------------------------

/// Result of [`svd3_special`]: `g = o_a · diag(s1, s2, det_sign·s3) · o_b`
/// with `det(o_a) = det(o_b) = +1` and `s1 ≥ s2 ≥ s3 ≥ 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct Svd3 {
    pub o_a: [[f64; 3]; 3],
    pub sigma: [f64; 3],
    pub o_b: [[f64; 3]; 3],
    /// Sign of det(g); a zero determinant is assigned +1.
    pub det_sign: i8,
}

fn mat3_mul(a: &[[f64; 3]; 3], b: &[[f64; 3]; 3]) -> [[f64; 3]; 3] {
    let mut out = [[0.0; 3]; 3];
    for r in 0..3 {
        for c in 0..3 {
            out[r][c] = (0..3).map(|k| a[r][k] * b[k][c]).sum();
        }
    }
    out
}

fn mat3_transpose(a: &[[f64; 3]; 3]) -> [[f64; 3]; 3] {
    let mut out = [[0.0; 3]; 3];
    for r in 0..3 {
        for c in 0..3 {
            out[r][c] = a[c][r];
        }
    }
    out
}

fn mat3_det(a: &[[f64; 3]; 3]) -> f64 {
    a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1])
        - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
        + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0])
}

fn mat3_matvec(a: &[[f64; 3]; 3], v: &[f64; 3]) -> [f64; 3] {
    let mut out = [0.0; 3];
    for r in 0..3 {
        out[r] = (0..3).map(|k| a[r][k] * v[k]).sum();
    }
    out
}

/// Cyclic Jacobi for a real symmetric 3×3 matrix. Returns eigenvalues with
/// matching eigenvector columns, unsorted.
fn jacobi_sym3(s: &[[f64; 3]; 3]) -> ([f64; 3], [[f64; 3]; 3]) {
    let mut a = *s;
    let mut v = [[0.0; 3]; 3];
    for (i, row) in v.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    let scale = a
        .iter()
        .flat_map(|r| r.iter())
        .fold(0.0_f64, |m, &x| m.max(x.abs()))
        .max(1e-300);
    for _sweep in 0..50 {
        let off = (a[0][1] * a[0][1] + a[0][2] * a[0][2] + a[1][2] * a[1][2]).sqrt();
        if off <= 1e-16 * scale {
            break;
        }
        for (p, q) in [(0, 1), (0, 2), (1, 2)] {
            let apq = a[p][q];
            if apq.abs() <= 1e-18 * scale {
                continue;
            }
            let tau = (a[q][q] - a[p][p]) / (2.0 * apq);
            let t = if tau >= 0.0 {
                1.0 / (tau + (1.0 + tau * tau).sqrt())
            } else {
                -1.0 / (-tau + (1.0 + tau * tau).sqrt())
            };
            let c = 1.0 / (1.0 + t * t).sqrt();
            let sn = t * c;
            for j in 0..3 {
                let ap = a[p][j];
                let aq = a[q][j];
                a[p][j] = c * ap - sn * aq;
                a[q][j] = sn * ap + c * aq;
            }
            for i in 0..3 {
                let ap = a[i][p];
                let aq = a[i][q];
                a[i][p] = c * ap - sn * aq;
                a[i][q] = sn * ap + c * aq;
                let vp = v[i][p];
                let vq = v[i][q];
                v[i][p] = c * vp - sn * vq;
                v[i][q] = sn * vp + c * vq;
            }
            a[p][q] = 0.0;
            a[q][p] = 0.0;
        }
    }
    ([a[0][0], a[1][1], a[2][2]], v)
}

/// Singular value decomposition of a real 3×3 matrix with both orthogonal
/// factors normalized to determinant +1.
///
/// Any negative determinant of `g` is carried as a sign on the third
/// (smallest) singular value, reported in `det_sign`, so that
/// `o_a · diag(s1, s2, det_sign·s3) · o_b` reproduces `g`. With both factors
/// in SO(3), that residual sign necessarily equals sign(det g); a zero
/// determinant is assigned +1.
pub fn svd3_special(g: &[[f64; 3]; 3]) -> Svd3 {
    let gtg = mat3_mul(&mat3_transpose(g), g);
    let (evals, evecs) = jacobi_sym3(&gtg);

    // Descending singular values; ties keep input axis order (stable sort).
    let mut order = [0usize, 1, 2];
    order.sort_by(|&i, &j| evals[j].partial_cmp(&evals[i]).unwrap());
    let mut v_cols = [[0.0; 3]; 3];
    let mut sigma = [0.0; 3];
    for (new, &old) in order.iter().enumerate() {
        sigma[new] = evals[old].max(0.0).sqrt();
        for r in 0..3 {
            v_cols[new][r] = evecs[r][old];
        }
    }

    // Left singular vectors u_k = g v_k / s_k, completed by cross product
    // when the smallest singular values vanish. The usable-direction cutoff
    // is gated on |g v_k| itself: below ~√eps the gᵀg route carries no
    // directional information and completion is more accurate.
    let smax = sigma[0].max(1e-300);
    let mut u_cols: Vec<[f64; 3]> = Vec::new();
    for k in 0..3 {
        let mut gv = mat3_matvec(g, &v_cols[k]);
        // Re-orthogonalize against earlier columns for numerical safety
        // near degenerate singular values.
        for uc in &u_cols {
            let d: f64 = (0..3).map(|r| uc[r] * gv[r]).sum();
            for r in 0..3 {
                gv[r] -= d * uc[r];
            }
        }
        let n = (gv.iter().map(|x| x * x).sum::<f64>()).sqrt();
        if n <= 1e-7 * smax {
            break;
        }
        u_cols.push([gv[0] / n, gv[1] / n, gv[2] / n]);
    }
    while u_cols.len() < 3 {
        if u_cols.len() == 2 {
            let (a, b) = (u_cols[0], u_cols[1]);
            u_cols.push([
                a[1] * b[2] - a[2] * b[1],
                a[2] * b[0] - a[0] * b[2],
                a[0] * b[1] - a[1] * b[0],
            ]);
        } else {
            let mut cvs: Vec<Vec<C64>> = u_cols
                .iter()
                .map(|c| c.iter().map(|&x| C64::new(x, 0.0)).collect())
                .collect();
            orthonormal_completion(&mut cvs, 3);
            u_cols = cvs
                .into_iter()
                .map(|c| [c[0].re, c[1].re, c[2].re])
                .collect();
        }
    }

    // Rayleigh-refined singular values u_kᵀ g v_k: exact to second order in
    // the subspace error, which matters when s3² sits near round-off in gᵀg.
    for k in 0..3 {
        let gv = mat3_matvec(g, &v_cols[k]);
        let s: f64 = (0..3).map(|r| u_cols[k][r] * gv[r]).sum();
        if s >= 0.0 {
            sigma[k] = s;
        } else {
            for x in u_cols[k].iter_mut() {
                *x = -*x;
            }
            sigma[k] = -s;
        }
    }
    // Refinement can reorder near-degenerate values by round-off; restore
    // the descending order, keeping column pairs attached.
    let mut idx = [0usize, 1, 2];
    idx.sort_by(|&i, &j| sigma[j].partial_cmp(&sigma[i]).unwrap());
    let sigma = [sigma[idx[0]], sigma[idx[1]], sigma[idx[2]]];
    let u_cols = [u_cols[idx[0]], u_cols[idx[1]], u_cols[idx[2]]];
    let v_cols = [v_cols[idx[0]], v_cols[idx[1]], v_cols[idx[2]]];

    // Move any negative determinant into the third (smallest-σ) column so
    // both factors land in SO(3).
    let mut u = [[0.0; 3]; 3];
    let mut v = [[0.0; 3]; 3];
    for k in 0..3 {
        for r in 0..3 {
            u[r][k] = u_cols[k][r];
            v[r][k] = v_cols[k][r];
        }
    }
    if mat3_det(&u) < 0.0 {
        for row in u.iter_mut() {
            row[2] = -row[2];
        }
    }
    if mat3_det(&v) < 0.0 {
        for row in v.iter_mut() {
            row[2] = -row[2];
        }
    }
    let det_sign: i8 = if mat3_det(g) < 0.0 { -1 } else { 1 };

    Svd3 {
        o_a: u,
        sigma,
        o_b: mat3_transpose(&v),
        det_sign,
    }
}

impl Svd3 {
    /// `o_a · diag(s1, s2, det_sign·s3) · o_b`.
    pub fn reassemble(&self) -> [[f64; 3]; 3] {
        let mut d = [[0.0; 3]; 3];
        d[0][0] = self.sigma[0];
        d[1][1] = self.sigma[1];
        d[2][2] = self.det_sign as f64 * self.sigma[2];
        mat3_mul(&mat3_mul(&self.o_a, &d), &self.o_b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn pauli(k: usize) -> ComplexMatrix {
        match k {
            1 => ComplexMatrix::from_rows(2, 2, &[c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.)]),
            2 => ComplexMatrix::from_rows(2, 2, &[c(0., 0.), c(0., -1.), c(0., 1.), c(0., 0.)]),
            3 => ComplexMatrix::from_rows(2, 2, &[c(1., 0.), c(0., 0.), c(0., 0.), c(-1., 0.)]),
            _ => ComplexMatrix::identity(2),
        }
    }

    fn random_hermitian(rng: &mut ChaCha8Rng, n: usize) -> ComplexMatrix {
        let mut g = ComplexMatrix::zeros(n, n);
        for r in 0..n {
            for col in 0..n {
                g[(r, col)] = c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            }
        }
        g.add(&g.adjoint()).scale(c(0.5, 0.0))
    }

    fn random_state(rng: &mut ChaCha8Rng, da: usize, db: usize) -> PureState {
        let amps: Vec<C64> = (0..da * db)
            .map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        PureState::normalized(da, db, amps).unwrap()
    }

    #[test]
    fn kron_identity_case() {
        let i2 = ComplexMatrix::identity(2);
        assert_eq!(kron(&i2, &i2), ComplexMatrix::identity(4));
    }

    #[test]
    fn kron_sigma3_sigma3_is_diagonal() {
        let zz = kron(&pauli(3), &pauli(3));
        let expect = ComplexMatrix::from_real(
            4,
            4,
            &[
                1., 0., 0., 0., //
                0., -1., 0., 0., //
                0., 0., -1., 0., //
                0., 0., 0., 1.,
            ],
        );
        assert!(zz.max_abs_diff(&expect) == 0.0);
    }

    #[test]
    fn kron_sigma1_sigma2_hand_expansion() {
        // Hand expansion: antidiagonal (−i, i, −i, i) reading from top-right.
        let xy = kron(&pauli(1), &pauli(2));
        let mut expect = ComplexMatrix::zeros(4, 4);
        expect[(0, 3)] = c(0., -1.);
        expect[(1, 2)] = c(0., 1.);
        expect[(2, 1)] = c(0., -1.);
        expect[(3, 0)] = c(0., 1.);
        assert!(xy.max_abs_diff(&expect) == 0.0);
    }

    #[test]
    fn eigensystem_sigma3() {
        let (vals, vecs) = hermitian_eigensystem(&pauli(3)).unwrap();
        assert!((vals[0] + 1.0).abs() < 1e-14);
        assert!((vals[1] - 1.0).abs() < 1e-14);
        assert!(vecs.is_unitary(1e-12));
    }

    #[test]
    fn eigensystem_sigma1_sigma1() {
        let (vals, _) = hermitian_eigensystem(&kron(&pauli(1), &pauli(1))).unwrap();
        let expect = [-1.0, -1.0, 1.0, 1.0];
        for (v, e) in vals.iter().zip(expect) {
            assert!((v - e).abs() < 1e-12);
        }
    }

    #[test]
    fn eigensystem_random_residuals() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let m = random_hermitian(&mut rng, 4);
            let (vals, vecs) = hermitian_eigensystem(&m).unwrap();
            assert!(vecs.is_unitary(1e-10));
            for k in 0..4 {
                let vk: Vec<C64> = (0..4).map(|r| vecs[(r, k)]).collect();
                let mv = m.matvec(&vk);
                let res: f64 = mv
                    .iter()
                    .zip(&vk)
                    .map(|(a, b)| (a - b * vals[k]).norm())
                    .fold(0.0, f64::max);
                assert!(res < 1e-10, "residual {res}");
            }
        }
    }

    #[test]
    fn eigensystem_rejects_non_hermitian() {
        let mut m = pauli(1);
        m[(0, 1)] = c(2.0, 0.0);
        assert!(matches!(
            hermitian_eigensystem(&m),
            Err(Error::NonHermitianInput { .. })
        ));
    }

    #[test]
    fn evolution_at_zero_is_identity() {
        let u = unitary_evolution(&kron(&pauli(1), &pauli(1)), 0.0).unwrap();
        assert!(u.max_abs_diff(&ComplexMatrix::identity(4)) < 1e-14);
    }

    #[test]
    fn evolution_sigma3_quarter_period() {
        let u = unitary_evolution(&pauli(3), std::f64::consts::FRAC_PI_2).unwrap();
        let expect = ComplexMatrix::from_rows(2, 2, &[c(0., -1.), c(0., 0.), c(0., 0.), c(0., 1.)]);
        assert!(u.max_abs_diff(&expect) < 1e-12);
    }

    #[test]
    fn evolution_xx_on_00() {
        // exp(−i σ1⊗σ1 π/4)|00⟩ = (|00⟩ − i|11⟩)/√2, from the two-term
        // eigen-expansion on the {|00⟩, |11⟩} block.
        let u =
            unitary_evolution(&kron(&pauli(1), &pauli(1)), std::f64::consts::FRAC_PI_4).unwrap();
        let out = u.matvec(&[c(1., 0.), c(0., 0.), c(0., 0.), c(0., 0.)]);
        let s = 0.5_f64.sqrt();
        let expect = [c(s, 0.), c(0., 0.), c(0., 0.), c(0., -s)];
        for (a, b) in out.iter().zip(expect) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn evolution_group_law() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..10 {
            let h = random_hermitian(&mut rng, 4);
            let (s, t) = (rng.gen_range(0.0..2.0), rng.gen_range(0.0..2.0));
            let a = unitary_evolution(&h, s)
                .unwrap()
                .mul(&unitary_evolution(&h, t).unwrap());
            let b = unitary_evolution(&h, s + t).unwrap();
            assert!(a.max_abs_diff(&b) < 1e-10);
            assert!(a.is_unitary(1e-10));
        }
    }

    #[test]
    fn partial_trace_product_state() {
        let st = PureState::product(&[c(1., 0.), c(0., 0.)], &[c(0., 0.), c(1., 0.)]).unwrap();
        let rho = partial_trace(&st, Subsystem::A);
        let mut expect = ComplexMatrix::zeros(2, 2);
        expect[(0, 0)] = c(1., 0.);
        assert!(rho.max_abs_diff(&expect) < 1e-14);
    }

    #[test]
    fn partial_trace_singlet_is_maximally_mixed() {
        let s = 0.5_f64.sqrt();
        let st = PureState::new(2, 2, vec![c(0., 0.), c(s, 0.), c(-s, 0.), c(0., 0.)]).unwrap();
        for keep in [Subsystem::A, Subsystem::B] {
            let rho = partial_trace(&st, keep);
            assert!(rho.max_abs_diff(&ComplexMatrix::identity(2).scale(c(0.5, 0.0))) < 1e-14);
        }
    }

    #[test]
    fn partial_trace_weighted_state_eigenvalues() {
        // √0.3 |01⟩ + √0.7 |10⟩: reduced operator has eigenvalues {0.3, 0.7}.
        let st = PureState::new(
            2,
            2,
            vec![
                c(0., 0.),
                c(0.3_f64.sqrt(), 0.),
                c(0.7_f64.sqrt(), 0.),
                c(0., 0.),
            ],
        )
        .unwrap();
        let rho = partial_trace(&st, Subsystem::A);
        let (vals, _) = hermitian_eigensystem(&rho).unwrap();
        assert!((vals[0] - 0.3).abs() < 1e-12);
        assert!((vals[1] - 0.7).abs() < 1e-12);
        assert!((rho.trace() - c(1., 0.)).norm() < 1e-12);
    }

    #[test]
    fn schmidt_product_state() {
        let st = PureState::product(&[c(1., 0.), c(0., 0.)], &[c(1., 0.), c(0., 0.)]).unwrap();
        let sd = schmidt_decompose(&st);
        assert!((sd.coefficients[0] - 1.0).abs() < 1e-14);
        assert!(sd.coefficients[1].abs() < 1e-14);
    }

    #[test]
    fn schmidt_singlet() {
        let s = 0.5_f64.sqrt();
        let st = PureState::new(2, 2, vec![c(0., 0.), c(s, 0.), c(-s, 0.), c(0., 0.)]).unwrap();
        let sd = schmidt_decompose(&st);
        assert!((sd.coefficients[0] - 0.5).abs() < 1e-12);
        assert!((sd.coefficients[1] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn schmidt_roundtrip_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..40 {
            let st = random_state(&mut rng, 4, 4);
            let sd = schmidt_decompose(&st);
            assert!((sd.coefficients.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            assert!(sd.coefficients.windows(2).all(|w| w[0] >= w[1] - 1e-15));
            // Orthonormality of both vector sets.
            for set in [&sd.left_vectors, &sd.right_vectors] {
                for i in 0..set.len() {
                    for j in 0..set.len() {
                        let ip = inner(&set[i], &set[j]);
                        let expect = if i == j { 1.0 } else { 0.0 };
                        assert!((ip - c(expect, 0.)).norm() < 1e-10);
                    }
                }
            }
            let re = sd.reassemble();
            let dev: f64 = re
                .iter()
                .zip(st.amplitudes())
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max);
            assert!(dev < 1e-10, "reassembly deviation {dev}");
        }
    }

    #[test]
    fn schmidt_invariant_under_local_unitaries() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let st = random_state(&mut rng, 2, 2);
            let ua = unitary_evolution(&random_hermitian(&mut rng, 2), 1.0).unwrap();
            let ub = unitary_evolution(&random_hermitian(&mut rng, 2), 1.0).unwrap();
            let st2 = st.apply_local(&ua, &ub);
            let (c1, c2) = (schmidt_decompose(&st), schmidt_decompose(&st2));
            for (a, b) in c1.coefficients.iter().zip(&c2.coefficients) {
                assert!((a - b).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn schmidt_matches_partial_trace_eigenvalues() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..20 {
            let st = random_state(&mut rng, 2, 2);
            let sd = schmidt_decompose(&st);
            let (vals, _) = hermitian_eigensystem(&partial_trace(&st, Subsystem::B)).unwrap();
            let mut desc = vals.clone();
            desc.reverse();
            for (a, b) in sd.coefficients.iter().zip(desc) {
                assert!((a - b).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn svd3_identity() {
        let s = svd3_special(&[[1., 0., 0.], [0., 1., 0.], [0., 0., 1.]]);
        assert_eq!(s.det_sign, 1);
        for k in 0..3 {
            assert!((s.sigma[k] - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn svd3_rank_one_axis() {
        let s = svd3_special(&[[0., 0., 0.], [0., 0., 0.], [0., 0., 1.]]);
        assert!((s.sigma[0] - 1.0).abs() < 1e-14);
        assert!(s.sigma[1].abs() < 1e-14);
        assert!(s.sigma[2].abs() < 1e-14);
        assert_eq!(s.det_sign, 1);
    }

    #[test]
    fn svd3_single_offdiagonal_entry() {
        let mut g = [[0.0; 3]; 3];
        g[0][1] = 1.0;
        let s = svd3_special(&g);
        assert!((s.sigma[0] - 1.0).abs() < 1e-14);
        assert!(s.sigma[1].abs() < 1e-14);
    }

    #[test]
    fn svd3_reconstruction_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for trial in 0..200 {
            let mut g = [[0.0; 3]; 3];
            for row in g.iter_mut() {
                for x in row.iter_mut() {
                    *x = rng.gen_range(-2.0..2.0);
                }
            }
            // Mix in rank-deficient cases.
            if trial % 5 == 0 {
                g[2] = [0.0; 3];
            }
            if trial % 7 == 0 {
                g[1] = g[0];
            }
            let s = svd3_special(&g);
            assert!((mat3_det(&s.o_a) - 1.0).abs() < 1e-10);
            assert!((mat3_det(&s.o_b) - 1.0).abs() < 1e-10);
            assert!(s.sigma[0] >= s.sigma[1] && s.sigma[1] >= s.sigma[2]);
            assert!(s.sigma[2] >= 0.0);
            assert_eq!(s.det_sign, if mat3_det(&g) < 0.0 { -1 } else { 1 });
            let re = s.reassemble();
            let mut dev = 0.0_f64;
            for r in 0..3 {
                for c in 0..3 {
                    dev = dev.max((re[r][c] - g[r][c]).abs());
                }
            }
            assert!(dev < 1e-10, "trial {trial}: reconstruction deviation {dev}");
        }
    }

    #[test]
    fn pure_state_rejects_bad_norm() {
        let r = PureState::new(2, 2, vec![c(1., 0.); 4]);
        assert!(matches!(r, Err(Error::NotNormalized { .. })));
    }
}
