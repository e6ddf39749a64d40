//! Report structures and deterministic formatting.
//!
//! Every float is rounded to 12 significant digits before serialization, so
//! JSON output parses and re-serializes to identical bytes and golden files
//! stay stable across platforms.

use serde::Serialize;

/// Round to 12 significant digits (identity for zeros and non-finite
/// values).
pub fn sig12(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.11e}")
        .parse()
        .expect("scientific notation round-trips")
}

/// Plain-decimal rendering of a 12-significant-digit value for CSV and
/// tables.
pub fn fmt_plain(x: f64) -> String {
    format!("{}", sig12(x))
}

#[derive(Debug, Serialize)]
pub struct ReportOutput {
    pub tool: &'static str,
    pub version: &'static str,
    pub input_sha256: String,
    pub seed: u64,
    pub capability: CapabilityOut,
    pub ancilla: AncillaOut,
}

#[derive(Debug, Serialize)]
pub struct CapabilityOut {
    pub mu: [f64; 3],
    pub det_sign: i8,
    pub h_max: f64,
    pub h_tilde_max: f64,
    pub p0: f64,
    pub e_at_p0: f64,
    pub f_at_p0: f64,
    pub gamma_max: f64,
    pub tau_h: Option<f64>,
    pub dropped_local_terms: DroppedLocalTerms,
}

#[derive(Debug, Serialize)]
pub struct DroppedLocalTerms {
    pub alpha: [f64; 3],
    pub beta: [f64; 3],
    pub trace_part: f64,
}

#[derive(Debug, Serialize)]
pub struct AncillaOut {
    pub h_tilde_max: f64,
    pub p_tilde0: f64,
    pub f_tilde_at_p0: f64,
    pub gamma_tilde_max: f64,
    pub ratio_vs_no_ancilla: Option<f64>,
    pub crossover_e: Option<f64>,
}

impl ReportOutput {
    pub fn new(
        input_sha256: String,
        seed: u64,
        cap: &entcap::capability::CapabilityReport,
        anc: &entcap::ancilla::AncillaReport,
    ) -> Self {
        let r3 = |v: [f64; 3]| [sig12(v[0]), sig12(v[1]), sig12(v[2])];
        ReportOutput {
            tool: "entcap",
            version: env!("CARGO_PKG_VERSION"),
            input_sha256,
            seed,
            capability: CapabilityOut {
                mu: r3(cap.mu),
                det_sign: cap.det_sign,
                h_max: sig12(cap.h_max),
                h_tilde_max: sig12(cap.h_tilde_max),
                p0: sig12(cap.p0),
                e_at_p0: sig12(cap.e_at_p0),
                f_at_p0: sig12(cap.f_at_p0),
                gamma_max: sig12(cap.gamma_max),
                tau_h: cap.tau_h.map(sig12),
                dropped_local_terms: DroppedLocalTerms {
                    alpha: r3(cap.dropped_local_terms.0),
                    beta: r3(cap.dropped_local_terms.1),
                    trace_part: sig12(cap.dropped_local_terms.2),
                },
            },
            ancilla: AncillaOut {
                h_tilde_max: sig12(anc.h_tilde_max),
                p_tilde0: sig12(anc.p_tilde0),
                f_tilde_at_p0: sig12(anc.f_tilde_at_p0),
                gamma_tilde_max: sig12(anc.gamma_tilde_max),
                ratio_vs_no_ancilla: anc.ratio_vs_no_ancilla.map(sig12),
                crossover_e: anc.crossover_e.map(sig12),
            },
        }
    }

    /// Flat key,value rows for `--format csv`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("key,value\n");
        let mut push = |k: &str, v: String| {
            out.push_str(k);
            out.push(',');
            out.push_str(&v);
            out.push('\n');
        };
        let opt = |v: Option<f64>| v.map(fmt_plain).unwrap_or_else(|| "none".into());
        push("tool", self.tool.into());
        push("version", self.version.into());
        push("input_sha256", self.input_sha256.clone());
        push("seed", self.seed.to_string());
        for (k, v) in [
            ("mu1", self.capability.mu[0]),
            ("mu2", self.capability.mu[1]),
            ("mu3", self.capability.mu[2]),
        ] {
            push(k, fmt_plain(v));
        }
        push("det_sign", self.capability.det_sign.to_string());
        push("h_max", fmt_plain(self.capability.h_max));
        push("h_tilde_max", fmt_plain(self.capability.h_tilde_max));
        push("p0", fmt_plain(self.capability.p0));
        push("e_at_p0", fmt_plain(self.capability.e_at_p0));
        push("f_at_p0", fmt_plain(self.capability.f_at_p0));
        push("gamma_max", fmt_plain(self.capability.gamma_max));
        push("tau_h", opt(self.capability.tau_h));
        push("p_tilde0", fmt_plain(self.ancilla.p_tilde0));
        push("f_tilde_at_p0", fmt_plain(self.ancilla.f_tilde_at_p0));
        push("gamma_tilde_max", fmt_plain(self.ancilla.gamma_tilde_max));
        push("ratio_vs_no_ancilla", opt(self.ancilla.ratio_vs_no_ancilla));
        push("crossover_e", opt(self.ancilla.crossover_e));
        out
    }
}

/// Simulation command report.
#[derive(Debug, Serialize)]
pub struct SimulateOutput {
    pub tool: &'static str,
    pub version: &'static str,
    pub source_sha256: String,
    pub target_sha256: String,
    pub target_time: f64,
    pub dt: f64,
    pub alpha: Option<f64>,
    pub native_time: f64,
    pub time_bound: Option<f64>,
    pub simulation_error: f64,
    pub steps: usize,
}

/// Serialized pulse step: unitaries as 2×2 arrays of [re, im].
#[derive(Debug, Serialize)]
pub struct PulseStepOut {
    pub pre_local_a: [[[f64; 2]; 2]; 2],
    pub pre_local_b: [[[f64; 2]; 2]; 2],
    pub duration: f64,
    pub post_local_a: [[[f64; 2]; 2]; 2],
    pub post_local_b: [[[f64; 2]; 2]; 2],
}

pub fn matrix2_out(m: &entcap::linalg::ComplexMatrix) -> [[[f64; 2]; 2]; 2] {
    let mut out = [[[0.0; 2]; 2]; 2];
    for r in 0..2 {
        for c in 0..2 {
            out[r][c] = [sig12(m[(r, c)].re), sig12(m[(r, c)].im)];
        }
    }
    out
}

/// CSV protocol trace with the fixed header.
pub fn trace_to_csv(trace: &entcap::protocol::ProtocolTrace) -> String {
    let mut out = String::from("t,P,E,gamma,deviation\n");
    for r in &trace.records {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            fmt_plain(r.t),
            fmt_plain(r.p),
            fmt_plain(r.e),
            fmt_plain(r.gamma),
            fmt_plain(r.deviation),
        ));
    }
    out
}

/// Text table of a verification report.
pub fn verification_table(rep: &entcap::oracle::VerificationReport) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "{:<28} {:>18} {:>18} {:>12} {:>10} {:>6}\n",
        "quantity", "analytic", "oracle", "residual", "tol", "status"
    ));
    for row in &rep.rows {
        out.push_str(&format!(
            "{:<28} {:>18} {:>18} {:>12} {:>10} {:>6}\n",
            row.quantity,
            fmt_plain(row.analytic),
            fmt_plain(row.oracle),
            format!("{:.3e}", sig12(row.residual)),
            format!("{:.1e}", row.tolerance),
            if row.pass { "ok" } else { "FAIL" }
        ));
    }
    out.push_str(if rep.all_pass() {
        "all checks passed\n"
    } else {
        "verification FAILED\n"
    });
    out
}
