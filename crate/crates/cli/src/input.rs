//! Hamiltonian input files: either a raw 4×4 complex matrix or Pauli
//! expansion coefficients, as JSON.

use entcap::hamiltonian::{PauliCoefficients, TwoQubitHamiltonian};
use entcap::linalg::ComplexMatrix;
use num_complex::Complex64 as C64;
use serde::Deserialize;

/// Raw file schema: exactly one of `matrix` / `pauli` must be present.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HamiltonianInputFile {
    /// 4×4 array of [re, im] pairs, row-major.
    #[serde(default)]
    pub matrix: Option<[[[f64; 2]; 4]; 4]>,
    /// Pauli expansion coefficients.
    #[serde(default)]
    pub pauli: Option<PauliInput>,
    /// Informational unit label.
    #[serde(default)]
    #[allow(dead_code)]
    pub units: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PauliInput {
    pub alpha: [f64; 3],
    pub beta: [f64; 3],
    pub gamma: [[f64; 3]; 3],
    #[serde(default)]
    pub trace_part: f64,
}

/// Why an input file was rejected; maps onto the process exit codes.
#[derive(Debug)]
pub enum InputError {
    /// Unreadable or unparsable file, or matrix/pauli not exactly-one.
    Malformed(String),
    /// The matrix failed the Hermiticity check.
    NotHermitian(String),
}

pub fn load_hamiltonian(path: &str) -> Result<(TwoQubitHamiltonian, Vec<u8>), InputError> {
    let bytes = std::fs::read(path)
        .map_err(|e| InputError::Malformed(format!("cannot read {path}: {e}")))?;
    let parsed: HamiltonianInputFile = serde_json::from_slice(&bytes)
        .map_err(|e| InputError::Malformed(format!("cannot parse {path}: {e}")))?;
    let h = match (parsed.matrix, parsed.pauli) {
        (Some(m), None) => {
            let entries: Vec<C64> = m
                .iter()
                .flat_map(|row| row.iter().map(|[re, im]| C64::new(*re, *im)))
                .collect();
            TwoQubitHamiltonian::new(ComplexMatrix::from_rows(4, 4, &entries))
                .map_err(|e| InputError::NotHermitian(e.to_string()))?
        }
        (None, Some(p)) => {
            let pc = PauliCoefficients {
                alpha: p.alpha,
                beta: p.beta,
                gamma: p.gamma,
                trace_part: p.trace_part,
            };
            pc.reconstruct()
        }
        _ => {
            return Err(InputError::Malformed(
                "exactly one of 'matrix' or 'pauli' must be present".into(),
            ))
        }
    };
    Ok((h, bytes))
}
