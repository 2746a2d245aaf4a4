// Copyright 2026 The kitehhl Authors
// SPDX-License-Identifier: Apache-2.0

//! `kitehhl` command-line tool.
//!
//! Exit codes: 0 success, 2 input or validation error, 3 degenerate instance.

use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use kitehhl::aqe::{self, AngleTable, MatrixFunctionSpec};
use kitehhl::circuit::{parse_circuit, Circuit, QubitLayout};
use kitehhl::codesign::{self, ARCHITECTURE_NAMES};
use kitehhl::daqc::{self, BangParams, CouplingGraph};
use kitehhl::hhl::{self, HHLConfig, ProblemInstance, SweepConfig};
use kitehhl::qsim::{circuit_unitary_with_limit, oracle_limit_from_env};
use kitehhl::Error;

#[derive(Parser)]
#[command(name = "kitehhl", version, about = "HHL synthesis, digital-analog compilation and routing")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve A·x = b from a problem JSON file and print the solution report.
    Solve {
        /// Problem file with A_re, b_re and optional A_im, b_im.
        #[arg(long)]
        problem: PathBuf,
        /// Register qubits.
        #[arg(long = "n-r")]
        n_r: usize,
        /// Shots for the observable estimate (0 = exact only).
        #[arg(long, default_value_t = 0)]
        shots: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Fixed time scale instead of the automatic 1/(2·λ_max).
        #[arg(long)]
        t0: Option<f64>,
        /// Write the report here instead of stdout.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Synthesize the AQE circuit and its angle table.
    SynthAqe {
        #[arg(long = "n-r")]
        n_r: usize,
        /// Encoded function: inverse, identity, half, sqrt or zero.
        #[arg(long, default_value = "inverse")]
        function: String,
        /// JSON array of f(p/2^n_R) samples, overriding --function.
        #[arg(long)]
        table: Option<PathBuf>,
        /// What goes to stdout.
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        /// Also write the circuit text here.
        #[arg(long)]
        emit: Option<PathBuf>,
        /// Also write the angle JSON here.
        #[arg(long)]
        angles: Option<PathBuf>,
    },
    /// Lower a circuit (default: the AQE circuit) to a digital-analog schedule.
    CompileDaqc {
        #[arg(long = "n-r", default_value_t = 2)]
        n_r: usize,
        #[arg(long, default_value = "inverse")]
        function: String,
        /// Circuit text file to compile instead of the AQE circuit.
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Mode::Sdaqc)]
        mode: Mode,
        #[arg(long, default_value = "star")]
        graph: String,
        /// Single-qubit pulse duration for bdaqc.
        #[arg(long, default_value_t = PI / 8.0 * 1e-3)]
        dt: f64,
        /// Merge analog blocks (default).
        #[arg(long, overrides_with = "no_merge")]
        merge: bool,
        /// Keep every analog block produced by the cZ lowering.
        #[arg(long = "no-merge", overrides_with = "merge")]
        no_merge: bool,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        /// Also write the schedule text here.
        #[arg(long)]
        emit: Option<PathBuf>,
        /// Also write the resource report JSON here.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Route a circuit (default: the decomposed HHL circuit) on one or more architectures.
    Route {
        /// Architectures, comma separated: kite, line, ring, star, complete.
        #[arg(long, value_delimiter = ',', default_value = "kite,line,ring,star,complete")]
        arch: Vec<String>,
        #[arg(long = "n-r", default_value_t = 3)]
        n_r: usize,
        /// Circuit text file to route instead of the HHL workload.
        #[arg(long)]
        input: Option<PathBuf>,
        /// Write the circuit routed on the first architecture here.
        #[arg(long = "emit-routed")]
        emit_routed: Option<PathBuf>,
    },
    /// Register-size and shot-count error sweep as CSV.
    Sweep {
        #[arg(long)]
        problem: PathBuf,
        /// Register sizes: `a..b` (inclusive) or a comma list.
        #[arg(long = "n-r")]
        n_r: String,
        /// Shot counts: `a..b` (inclusive) or a comma list.
        #[arg(long)]
        shots: String,
        /// Row i samples with seed + i.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Independent estimates per row (RMS error is reported).
        #[arg(long, default_value_t = 1)]
        repeats: usize,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Digital and digital-analog resource counts for the AQE circuit.
    Resources {
        #[arg(long = "n-r")]
        n_r: usize,
        #[arg(long, default_value = "inverse")]
        function: String,
        #[arg(long, default_value = "star")]
        graph: String,
        /// Count each SWAP as three CNOTs.
        #[arg(long = "native-swaps")]
        native_swaps: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Sdaqc,
    Bdaqc,
}

/// Failure with its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure { code: if e.is_degenerate() { 3 } else { 2 }, message: e.to_string() }
    }
}

fn input_error(message: impl Into<String>) -> Failure {
    Failure { code: 2, message: message.into() }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| input_error(format!("cannot read {}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| input_error(format!("cannot write {}: {e}", path.display())))
}

fn output(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => write(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn with_newline(mut s: String) -> String {
    if !s.ends_with('\n') {
        s.push('\n');
    }
    s
}

fn parse_range(spec: &str, what: &str) -> Result<Vec<usize>, Failure> {
    let bad = || input_error(format!("bad {what} range '{spec}' (use a..b or a,b,c)"));
    let spec = spec.trim();
    let values: Vec<usize> = if let Some((a, b)) = spec.split_once("..") {
        let a: usize = a.trim().parse().map_err(|_| bad())?;
        let b: usize = b.trim().parse().map_err(|_| bad())?;
        (a..=b).collect()
    } else if spec.is_empty() {
        Vec::new()
    } else {
        spec.split(',').map(|v| v.trim().parse().map_err(|_| bad())).collect::<Result<_, _>>()?
    };
    if values.is_empty() {
        return Err(input_error(format!("{what} range '{spec}' is empty")));
    }
    Ok(values)
}

fn function_spec(name: &str, table: Option<&Path>) -> Result<MatrixFunctionSpec, Failure> {
    match table {
        Some(path) => {
            let values: Vec<f64> =
                serde_json::from_str(&read(path)?).map_err(|e| input_error(format!("{}: {e}", path.display())))?;
            Ok(MatrixFunctionSpec::table(values)?)
        }
        None => Ok(MatrixFunctionSpec::by_name(name)?),
    }
}

fn load_problem(path: &Path) -> Result<ProblemInstance, Failure> {
    ProblemInstance::from_json(&read(path)?).map_err(|e| input_error(format!("{}: {e}", path.display())))
}

fn cmd_solve(problem: &Path, n_r: usize, shots: usize, seed: u64, t0: Option<f64>, out: Option<&Path>) -> Result<(), Failure> {
    let instance = load_problem(problem)?;
    let mut config = HHLConfig::new(n_r).with_shots(shots, seed);
    config.t0 = t0;
    let report = hhl::run(&instance, &config)?;
    output(out, &with_newline(report.to_json()))
}

fn cmd_synth_aqe(
    n_r: usize,
    function: &str,
    table: Option<&Path>,
    format: Format,
    emit: Option<&Path>,
    angles: Option<&Path>,
) -> Result<(), Failure> {
    let f = function_spec(function, table)?;
    let angle_table = AngleTable::new(n_r, &f)?;
    let circuit = aqe::circuit_from_table(QubitLayout::new(n_r, 1)?, &angle_table);
    let text = circuit.to_text();
    let json = with_newline(angle_table.to_json());
    if let Some(p) = emit {
        write(p, &text)?;
    }
    if let Some(p) = angles {
        write(p, &json)?;
    }
    match format {
        Format::Text => output(None, &text),
        Format::Json => output(None, &json),
    }
}

fn load_graph(name: &str, layout: &QubitLayout) -> Result<Arc<CouplingGraph>, Failure> {
    Ok(Arc::new(CouplingGraph::named(name, layout)?))
}

#[allow(clippy::too_many_arguments)]
fn cmd_compile_daqc(
    n_r: usize,
    function: &str,
    input: Option<&Path>,
    mode: Mode,
    graph: &str,
    dt: f64,
    merge: bool,
    format: Format,
    emit: Option<&Path>,
    report_path: Option<&Path>,
) -> Result<(), Failure> {
    let circuit = match input {
        Some(p) => parse_circuit(&read(p)?)?,
        None => aqe::synthesize(n_r, &MatrixFunctionSpec::by_name(function)?)?,
    };
    let graph = load_graph(graph, &circuit.layout())?;
    let schedule = daqc::compile_sdaqc_with(&circuit, &graph, merge)?;
    let mut report = serde_json::to_value(daqc::resource_report(&schedule)).expect("report serializes");
    let limit = oracle_limit_from_env();
    if circuit.n_qubits() <= limit {
        let target = circuit_unitary_with_limit(&circuit, limit)?;
        let sdaqc = schedule.unitary(limit)?;
        report["sdaqc_distance"] = json!(sdaqc.phase_aligned_distance(&target));
        if let Mode::Bdaqc = mode {
            let bang = daqc::simulate_bdaqc(&schedule, BangParams::new(dt)?)?;
            report["bdaqc_dt"] = json!(dt);
            report["bdaqc_distance_to_sdaqc"] = json!(bang.unitary.phase_aligned_distance(&sdaqc));
            report["bdaqc_overlap_warning"] = json!(bang.overlap_warning);
        }
    } else if let Mode::Bdaqc = mode {
        return Err(Error::OracleLimit { qubits: circuit.n_qubits(), limit }.into());
    }
    let text = schedule.to_circuit().to_text();
    let json = with_newline(serde_json::to_string_pretty(&report).expect("report serializes"));
    if let Some(p) = emit {
        write(p, &text)?;
    }
    if let Some(p) = report_path {
        write(p, &json)?;
    }
    match format {
        Format::Text => output(None, &text),
        Format::Json => output(None, &json),
    }
}

/// The worked 2×2 instance, rescaled, used when no circuit file is given.
fn default_workload(n_r: usize) -> Result<Circuit, Failure> {
    let instance = ProblemInstance::from_real(&[&[0.375, 0.125], &[0.125, 0.375]], &[1.0, 0.0])?;
    let scaled = hhl::rescale(instance.a())?;
    Ok(codesign::hhl_routing_workload(n_r, &scaled.a_scaled)?)
}

fn cmd_route(arch: &[String], n_r: usize, input: Option<&Path>, emit_routed: Option<&Path>) -> Result<(), Failure> {
    if let Some(bad) = arch.iter().find(|a| !ARCHITECTURE_NAMES.contains(&a.as_str())) {
        return Err(input_error(format!("unknown architecture '{bad}' (supported: {})", ARCHITECTURE_NAMES.join(", "))));
    }
    let circuit = match input {
        Some(p) => codesign::decompose_for_routing(&parse_circuit(&read(p)?)?)?,
        None => default_workload(n_r)?,
    };
    if let Some(p) = emit_routed {
        let layout = circuit.layout();
        let a = codesign::make_architecture(&arch[0], layout.n_register(), layout.n_memory())?;
        write(p, &codesign::route(&circuit, &a)?.circuit.to_text())?;
    }
    let names: Vec<&str> = arch.iter().map(String::as_str).collect();
    output(None, &codesign::compare_to_csv(&codesign::compare(&circuit, &names)))
}

fn cmd_sweep(problem: &Path, n_r: &str, shots: &str, seed: u64, repeats: usize, out: Option<&Path>) -> Result<(), Failure> {
    let n_r_values = parse_range(n_r, "n-r")?;
    let shots_values = parse_range(shots, "shots")?;
    let instance = load_problem(problem)?;
    let mut config = SweepConfig::new(n_r_values, shots_values, seed);
    config.repeats = repeats;
    let rows = hhl::error_sweep(&instance, &config)?;
    output(out, &hhl::sweep_to_csv(&rows))?;
    if rows.iter().all(|r| r.failure.is_some()) {
        return Err(Failure {
            code: 3,
            message: format!("every sweep row failed: {}", rows[0].failure.as_deref().unwrap_or("")),
        });
    }
    Ok(())
}

fn cmd_resources(n_r: usize, function: &str, graph: &str, native_swaps: bool) -> Result<(), Failure> {
    let circuit = aqe::synthesize(n_r, &MatrixFunctionSpec::by_name(function)?)?;
    let digital = circuit.count_resources(native_swaps);
    let graph = load_graph(graph, &circuit.layout())?;
    let schedule = daqc::compile_sdaqc(&circuit, &graph)?;
    let four = 1usize << (2 * n_r);
    let report = json!({
        "n_R": n_r,
        "digital": digital,
        "digital_bounds": { "single_qubit_gates": four, "cnot": four - (1usize << (n_r + 1)) },
        "digital_within_bounds": digital.single_qubit_gates <= four && digital.cnot_count <= four - (1usize << (n_r + 1)),
        "daqc": daqc::resource_report(&schedule),
    });
    output(None, &with_newline(serde_json::to_string_pretty(&report).expect("report serializes")))
}

fn dispatch(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Solve { problem, n_r, shots, seed, t0, output } => cmd_solve(&problem, n_r, shots, seed, t0, output.as_deref()),
        Command::SynthAqe { n_r, function, table, format, emit, angles } => {
            cmd_synth_aqe(n_r, &function, table.as_deref(), format, emit.as_deref(), angles.as_deref())
        }
        Command::CompileDaqc { n_r, function, input, mode, graph, dt, merge: _, no_merge, format, emit, report } => {
            cmd_compile_daqc(
                n_r,
                &function,
                input.as_deref(),
                mode,
                &graph,
                dt,
                !no_merge,
                format,
                emit.as_deref(),
                report.as_deref(),
            )
        }
        Command::Route { arch, n_r, input, emit_routed } => cmd_route(&arch, n_r, input.as_deref(), emit_routed.as_deref()),
        Command::Sweep { problem, n_r, shots, seed, repeats, output } => {
            cmd_sweep(&problem, &n_r, &shots, seed, repeats, output.as_deref())
        }
        Command::Resources { n_r, function, graph, native_swaps } => cmd_resources(n_r, &function, &graph, native_swaps),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
