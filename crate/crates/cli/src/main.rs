//! Command-line front end: capability reports, protocol traces, simulation
//! schedules, and oracle verification for two-qubit interaction
//! Hamiltonians.
//!
//! Exit codes: 0 ok, 1 verification failure, 2 parse error, 3 invalid
//! Hamiltonian, 4 invalid protocol configuration, 5 zero coupling.

mod input;
mod output;

use clap::{Parser, Subcommand, ValueEnum};
use sha2::{Digest, Sha256};
use std::process::ExitCode;

use entcap::ancilla::AncillaReport;
use entcap::capability::CapabilityReport;
use entcap::hamiltonian::{canonical_form, pauli_decompose};
use entcap::hamsim::{build_schedule_for, default_dt, execute_schedule, simulation_error};
use entcap::oracle::{verify_hamiltonian, SearchConfig};
use entcap::protocol::{run_protocol, ProtocolConfig};
use entcap::Error as CoreError;

use input::{load_hamiltonian, InputError};
use output::{
    matrix2_out, sig12, trace_to_csv, verification_table, PulseStepOut, ReportOutput,
    SimulateOutput,
};

const EXIT_VERIFY_FAILED: u8 = 1;
const EXIT_PARSE: u8 = 2;
const EXIT_INVALID_HAMILTONIAN: u8 = 3;
const EXIT_INVALID_PROTOCOL: u8 = 4;
const EXIT_ZERO_COUPLING: u8 = 5;

#[derive(Parser)]
#[command(
    name = "entcap",
    version,
    about = "Entanglement capability analysis for two-qubit Hamiltonians"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    #[value(name = "two-qubit")]
    TwoQubit,
    Ancilla,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Analyze a Hamiltonian: canonical form, h_max, optimal coefficients,
    /// rates, ancilla comparison.
    Analyze {
        input: String,
        /// Write the report here instead of stdout.
        #[arg(long)]
        out: Option<String>,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        /// Recorded in the provenance block.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Simulate the optimal entangling protocol and emit a CSV trace.
    Protocol {
        input: String,
        #[arg(long, default_value_t = 1e-3)]
        dt: f64,
        #[arg(long = "t-end", default_value_t = 5.0)]
        t_end: f64,
        /// Initial Schmidt coefficient; defaults to 0 (two-qubit) or the
        /// ancilla optimum P~0.
        #[arg(long = "initial-p")]
        initial_p: Option<f64>,
        #[arg(long, value_enum, default_value = "two-qubit")]
        mode: Mode,
        #[arg(long)]
        out: Option<String>,
    },
    /// Build and execute a schedule where the source Hamiltonian simulates
    /// the target's nonlocal evolution.
    Simulate {
        source: String,
        target: String,
        #[arg(long, default_value_t = 1.0)]
        t: f64,
        /// Target-time slice; defaults to 1% of the faster interaction
        /// scale.
        #[arg(long)]
        dt: Option<f64>,
        /// Write the pulse schedule as JSON here.
        #[arg(long = "dump-schedule")]
        dump_schedule: Option<String>,
        #[arg(long)]
        out: Option<String>,
    },
    /// Cross-check the analytic optima against the brute-force oracle.
    Verify {
        input: String,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long, default_value_t = 64)]
        restarts: u64,
        #[arg(long)]
        out: Option<String>,
        /// Fault-injection hook for the exit-code path: shifts the first
        /// analytic value before comparison.
        #[arg(long, hide = true, default_value_t = false)]
        corrupt_analytic: bool,
    },
}

fn sha256_hex(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    hasher
        .finalize()
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

fn emit(text: &str, out: &Option<String>) -> std::io::Result<()> {
    match out {
        Some(path) => std::fs::write(path, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn fail(code: u8, msg: &str) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(code)
}

type LoadedHamiltonian = (entcap::hamiltonian::TwoQubitHamiltonian, String);

fn load_or_exit(path: &str) -> Result<LoadedHamiltonian, ExitCode> {
    match load_hamiltonian(path) {
        Ok((h, bytes)) => Ok((h, sha256_hex(&bytes))),
        Err(InputError::Malformed(msg)) => Err(fail(EXIT_PARSE, &msg)),
        Err(InputError::NotHermitian(msg)) => Err(fail(EXIT_INVALID_HAMILTONIAN, &msg)),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Analyze {
            input,
            out,
            format,
            seed,
        } => cmd_analyze(&input, &out, format, seed),
        Command::Protocol {
            input,
            dt,
            t_end,
            initial_p,
            mode,
            out,
        } => cmd_protocol(&input, dt, t_end, initial_p, mode, &out),
        Command::Simulate {
            source,
            target,
            t,
            dt,
            dump_schedule,
            out,
        } => cmd_simulate(&source, &target, t, dt, &dump_schedule, &out),
        Command::Verify {
            input,
            seed,
            restarts,
            out,
            corrupt_analytic,
        } => cmd_verify(&input, seed, restarts, &out, corrupt_analytic),
    }
}

fn cmd_analyze(input: &str, out: &Option<String>, format: Format, seed: u64) -> ExitCode {
    let (h, sha) = match load_or_exit(input) {
        Ok(v) => v,
        Err(code) => return code,
    };
    let cap = match CapabilityReport::for_hamiltonian(&h) {
        Ok(c) => c,
        Err(e) => return fail(EXIT_INVALID_HAMILTONIAN, &e.to_string()),
    };
    let anc = match AncillaReport::for_hamiltonian(&h) {
        Ok(a) => a,
        Err(e) => return fail(EXIT_INVALID_HAMILTONIAN, &e.to_string()),
    };
    let report = ReportOutput::new(sha, seed, &cap, &anc);
    let text = match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&report).expect("report serializes");
            s.push('\n');
            s
        }
        Format::Csv => report.to_csv(),
    };
    match emit(&text, out) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => fail(EXIT_PARSE, &format!("cannot write output: {e}")),
    }
}

fn cmd_protocol(
    input: &str,
    dt: f64,
    t_end: f64,
    initial_p: Option<f64>,
    mode: Mode,
    out: &Option<String>,
) -> ExitCode {
    let (h, _) = match load_or_exit(input) {
        Ok(v) => v,
        Err(code) => return code,
    };
    let cfg = match mode {
        Mode::TwoQubit => ProtocolConfig::two_qubit(dt, t_end, initial_p.unwrap_or(0.0)),
        Mode::Ancilla => ProtocolConfig::ancilla(
            dt,
            t_end,
            initial_p.unwrap_or_else(entcap::ancilla::optimal_p_tilde),
        ),
    };
    let trace = match run_protocol(&h, &cfg) {
        Ok(t) => t,
        Err(CoreError::StepTooLarge { dt, limit }) => {
            return fail(
                EXIT_INVALID_PROTOCOL,
                &format!(
                    "dt = {dt} exceeds the fast-local-operation limit {} (0.01 tau_H)",
                    sig12(limit)
                ),
            )
        }
        Err(e) => return fail(EXIT_INVALID_PROTOCOL, &e.to_string()),
    };
    match emit(&trace_to_csv(&trace), out) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => fail(EXIT_PARSE, &format!("cannot write output: {e}")),
    }
}

fn cmd_simulate(
    source: &str,
    target: &str,
    t: f64,
    dt: Option<f64>,
    dump_schedule: &Option<String>,
    out: &Option<String>,
) -> ExitCode {
    let (src, src_sha) = match load_or_exit(source) {
        Ok(v) => v,
        Err(code) => return code,
    };
    let (tgt, tgt_sha) = match load_or_exit(target) {
        Ok(v) => v,
        Err(code) => return code,
    };
    let source_cf = canonical_form(&pauli_decompose(&src));
    let target_cf = canonical_form(&pauli_decompose(&tgt));
    let dt = dt.unwrap_or_else(|| default_dt(&source_cf, &target_cf));
    let schedule = match build_schedule_for(&src, &tgt, t, dt) {
        Ok(s) => s,
        Err(CoreError::ZeroCoupling) => {
            return fail(
                EXIT_ZERO_COUPLING,
                "source Hamiltonian has zero coupling (mu1 = 0)",
            )
        }
        Err(e) => return fail(EXIT_INVALID_HAMILTONIAN, &e.to_string()),
    };
    let achieved = match execute_schedule(&schedule, &src) {
        Ok(u) => u,
        Err(e) => return fail(EXIT_INVALID_HAMILTONIAN, &e.to_string()),
    };
    let err = match simulation_error(&achieved, &target_cf.nonlocal_hamiltonian(), t) {
        Ok(e) => e,
        Err(e) => return fail(EXIT_INVALID_HAMILTONIAN, &e.to_string()),
    };
    let report = SimulateOutput {
        tool: "entcap",
        version: env!("CARGO_PKG_VERSION"),
        source_sha256: src_sha,
        target_sha256: tgt_sha,
        target_time: sig12(t),
        dt: sig12(dt),
        alpha: schedule.alpha.is_finite().then(|| sig12(schedule.alpha)),
        native_time: sig12(schedule.native_time),
        time_bound: schedule
            .time_bound()
            .is_finite()
            .then(|| sig12(schedule.time_bound())),
        simulation_error: sig12(err),
        steps: schedule.steps.len(),
    };
    if let Some(path) = dump_schedule {
        let steps: Vec<PulseStepOut> = schedule
            .steps
            .iter()
            .map(|s| PulseStepOut {
                pre_local_a: matrix2_out(&s.pre_local.0),
                pre_local_b: matrix2_out(&s.pre_local.1),
                duration: sig12(s.duration),
                post_local_a: matrix2_out(&s.post_local.0),
                post_local_b: matrix2_out(&s.post_local.1),
            })
            .collect();
        let mut text = serde_json::to_string_pretty(&steps).expect("schedule serializes");
        text.push('\n');
        if let Err(e) = std::fs::write(path, text) {
            return fail(EXIT_PARSE, &format!("cannot write schedule: {e}"));
        }
    }
    let mut text = serde_json::to_string_pretty(&report).expect("report serializes");
    text.push('\n');
    match emit(&text, out) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => fail(EXIT_PARSE, &format!("cannot write output: {e}")),
    }
}

fn cmd_verify(
    input: &str,
    seed: u64,
    restarts: u64,
    out: &Option<String>,
    corrupt_analytic: bool,
) -> ExitCode {
    let (h, _) = match load_or_exit(input) {
        Ok(v) => v,
        Err(code) => return code,
    };
    let cfg = SearchConfig {
        seed,
        restarts: restarts as usize,
        ..SearchConfig::default()
    };
    let mut report = match verify_hamiltonian(&h, &cfg) {
        Ok(r) => r,
        Err(e) => return fail(EXIT_INVALID_HAMILTONIAN, &e.to_string()),
    };
    if corrupt_analytic {
        if let Some(row) = report.rows.first_mut() {
            row.analytic += 0.1;
            row.residual = (row.oracle - row.analytic).abs();
            row.pass = row.residual <= row.tolerance;
        }
    }
    let text = verification_table(&report);
    if let Err(e) = emit(&text, out) {
        return fail(EXIT_PARSE, &format!("cannot write output: {e}"));
    }
    if report.all_pass() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_VERIFY_FAILED)
    }
}
