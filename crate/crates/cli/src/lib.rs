//! `qitk` command-line front end: run the algorithms, apply channels,
//! compute measures, and emit machine-readable JSON reports (CSV for
//! parameter sweeps).
//!
//! Every report is deterministic for a fixed `--seed`; every numeric result
//! carries a `{"value", "formula"}` pair recording whether it came from a
//! closed form or a computation.

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use qitk_core::states::StateJson;
use qitk_core::{algorithms, bell, channels, circuits, entanglement, gates, infotheory, states};
use serde_json::{json, Map, Value};

/// Exit status 2: the inputs parsed but failed validation.
/// Exit status 64: unknown subcommand or unusable command line.
/// Exit status 65: a JSON input file failed to parse.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Validation(String),
    MalformedJson(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 64,
            CliError::Validation(_) => 2,
            CliError::MalformedJson(_) => 65,
        }
    }

    pub fn to_json(&self) -> String {
        let (kind, message) = match self {
            CliError::Usage(m) => ("usage", m),
            CliError::Validation(m) => ("validation", m),
            CliError::MalformedJson(m) => ("malformed_json", m),
        };
        serde_json::to_string_pretty(&json!({"error": {"kind": kind, "message": message}}))
            .expect("error serializes")
    }
}

impl From<qitk_core::Error> for CliError {
    fn from(e: qitk_core::Error) -> Self {
        CliError::Validation(e.to_string())
    }
}

#[derive(Parser, Debug)]
#[command(name = "qitk", disable_help_subcommand = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Classify a one-bit function as constant or balanced.
    Deutsch(DeutschArgs),
    /// Recover the hidden period of a two-to-one function.
    Simon(SimonArgs),
    /// Amplitude-amplification search over n qubits.
    Grover(GroverArgs),
    /// Exact phase-estimation distribution for a diagonal-phase unitary.
    Phase(PhaseArgs),
    /// Quantum Fourier transform circuit and matrix.
    Qft(QftArgs),
    /// Apply a named noise channel to a state.
    Channel(ChannelArgs),
    /// Distance measures between two states.
    Distance(DistanceArgs),
    /// Entropy report for a bipartite state.
    Entropy(EntropyArgs),
    /// Holevo chi of an ensemble.
    Holevo(HolevoArgs),
    /// Entanglement measures of a bipartite state.
    Entangle(EntangleArgs),
    /// CHSH statistic, optionally optimizing the detector settings.
    Chsh(ChshArgs),
    /// Gate-synthesis pipelines: two-level, Gray-code, Hadamard/T words.
    Synth(SynthArgs),
    /// Parameter sweeps emitted as CSV.
    Sweep(SweepArgs),
}

#[derive(Args, Debug)]
struct DeutschArgs {
    /// Function table "f(0),f(1)".
    #[arg(long)]
    table: String,
}

#[derive(Args, Debug)]
struct SimonArgs {
    /// JSON file {"n":3,"table":[...]}.
    #[arg(long)]
    table_file: String,
    #[arg(long)]
    seed: u64,
    #[arg(long, default_value_t = 1000)]
    max_calls: usize,
}

#[derive(Args, Debug)]
struct GroverArgs {
    #[arg(long)]
    n: usize,
    /// Comma-separated solution labels.
    #[arg(long)]
    solutions: String,
    /// Iteration count, or "auto" for the optimal k₀.
    #[arg(long, default_value = "auto")]
    k: String,
    #[arg(long)]
    emit_distribution: bool,
    /// Accepted for interface uniformity; the distribution is exact.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args, Debug)]
struct PhaseArgs {
    /// True phase φ of the eigenvalue e^{i2πφ}.
    #[arg(long)]
    phi: f64,
    #[arg(long)]
    bits: usize,
}

#[derive(Args, Debug)]
struct QftArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    emit_matrix: bool,
}

#[derive(Args, Debug)]
struct ChannelArgs {
    /// bit_flip | phase_flip | bit_phase_flip | depolarizing |
    /// amplitude_damping | phase_damping
    #[arg(long)]
    name: String,
    #[arg(long)]
    param: f64,
    /// State JSON file to send through the channel.
    #[arg(long)]
    apply: String,
}

#[derive(Args, Debug)]
struct DistanceArgs {
    #[arg(long)]
    a: String,
    #[arg(long)]
    b: String,
    /// trace | fidelity | relent
    #[arg(long)]
    measure: String,
}

#[derive(Args, Debug)]
struct EntropyArgs {
    #[arg(long)]
    state: String,
    /// Subsystem dimensions, e.g. "2,2".
    #[arg(long)]
    partition: String,
    /// Comma-separated subset of joint,cond,mutual,a,b.
    #[arg(long, default_value = "joint,cond,mutual")]
    report: String,
}

#[derive(Args, Debug)]
struct HolevoArgs {
    /// Ensemble JSON file {"entries":[{"p":0.5,"state":{...}}]}.
    #[arg(long)]
    ensemble: String,
}

#[derive(Args, Debug)]
struct EntangleArgs {
    #[arg(long)]
    state: String,
    #[arg(long)]
    partition: String,
    /// Comma-separated subset of entropy,concurrence,negativity,eof.
    #[arg(long, default_value = "entropy,concurrence,negativity,eof")]
    measures: String,
}

#[derive(Args, Debug)]
struct ChshArgs {
    /// State JSON file (two qubits).
    #[arg(long)]
    state: Option<String>,
    /// Built-in Bell state name: psi_minus.
    #[arg(long)]
    bell: Option<String>,
    #[arg(long)]
    optimize: bool,
    /// Required when --optimize is given.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args, Debug)]
struct SynthArgs {
    /// two-level | gray | ht
    #[arg(long)]
    mode: String,
    /// Unitary JSON file {"re":[[..]],"im":[[..]]} for two-level/gray.
    #[arg(long)]
    unitary_file: Option<String>,
    /// Gray mode: basis pair "i,j" and qubit count.
    #[arg(long)]
    pair: Option<String>,
    #[arg(long)]
    n: Option<usize>,
    /// HT mode: approximate R_z(angle).
    #[arg(long)]
    target_rz: Option<f64>,
    #[arg(long, default_value_t = 0.2)]
    epsilon: f64,
    #[arg(long, default_value_t = 40)]
    max_len: usize,
}

#[derive(Args, Debug)]
struct SweepArgs {
    /// werner_concurrence | holevo_chi | grover_success
    #[arg(long)]
    kind: String,
    #[arg(long, default_value_t = 0.0)]
    from: f64,
    #[arg(long, default_value_t = 1.0)]
    to: f64,
    #[arg(long, default_value_t = 0.05)]
    step: f64,
    /// Grover sweep: qubit count and solution labels.
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    solutions: Option<String>,
}

fn tolerance() -> f64 {
    std::env::var("QITK_TOL")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(qitk_core::DEFAULT_TOL)
}

fn val(value: f64, formula: &str) -> Value {
    json!({"value": value, "formula": formula})
}

fn computed(value: f64) -> Value {
    val(value, "computed")
}

fn report(command: &str, inputs: Value, results: Value, seed: Option<u64>) -> String {
    let mut map = Map::new();
    map.insert("command".into(), Value::String(command.into()));
    map.insert("inputs".into(), inputs);
    map.insert("results".into(), results);
    if let Some(s) = seed {
        map.insert("seed".into(), json!(s));
    }
    serde_json::to_string_pretty(&Value::Object(map)).expect("report serializes")
}

fn read_json<T: serde::de::DeserializeOwned>(path: &str) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Validation(format!("cannot read {path}: {e}")))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::MalformedJson(format!("{path}: {e}")))
}

fn parse_usize_list(text: &str, what: &str) -> Result<Vec<usize>, CliError> {
    text.split(',')
        .map(|tok| {
            tok.trim()
                .parse::<usize>()
                .map_err(|_| CliError::Validation(format!("bad {what} entry \"{tok}\"")))
        })
        .collect()
}

fn load_density(path: &str, dims: Option<Vec<usize>>) -> Result<states::DensityMatrix, CliError> {
    let sj: StateJson = read_json(path)?;
    let rho = sj.to_density(tolerance().max(1e-7))?;
    match dims {
        Some(d) => Ok(rho.with_dims(d)?),
        None => Ok(rho),
    }
}

/// Run the CLI on the given arguments (without the binary name); returns the
/// stdout payload or a structured error.
pub fn run(args: &[String]) -> Result<String, CliError> {
    let mut argv = vec!["qitk".to_string()];
    argv.extend_from_slice(args);
    let cli = Cli::try_parse_from(&argv).map_err(|e| match e.kind() {
        ErrorKind::InvalidSubcommand | ErrorKind::MissingSubcommand => {
            CliError::Usage(e.to_string())
        }
        ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => CliError::Usage(e.to_string()),
        _ => CliError::Validation(e.to_string()),
    })?;
    match cli.command {
        Command::Deutsch(a) => cmd_deutsch(a),
        Command::Simon(a) => cmd_simon(a),
        Command::Grover(a) => cmd_grover(a),
        Command::Phase(a) => cmd_phase(a),
        Command::Qft(a) => cmd_qft(a),
        Command::Channel(a) => cmd_channel(a),
        Command::Distance(a) => cmd_distance(a),
        Command::Entropy(a) => cmd_entropy(a),
        Command::Holevo(a) => cmd_holevo(a),
        Command::Entangle(a) => cmd_entangle(a),
        Command::Chsh(a) => cmd_chsh(a),
        Command::Synth(a) => cmd_synth(a),
        Command::Sweep(a) => cmd_sweep(a),
    }
}

fn cmd_deutsch(a: DeutschArgs) -> Result<String, CliError> {
    let table = parse_usize_list(&a.table, "table")?;
    if table.len() != 2 {
        return Err(CliError::Validation(
            "deutsch expects a two-entry table".into(),
        ));
    }
    let oracle = algorithms::BooleanOracle::new(1, 1, table.clone())?;
    let out = algorithms::deutsch(&oracle)?;
    let verdict = match out.verdict {
        algorithms::DeutschVerdict::Constant => "constant",
        algorithms::DeutschVerdict::Balanced => "balanced",
    };
    Ok(report(
        "deutsch",
        json!({"table": table}),
        json!({"result": verdict, "oracle_calls": out.oracle_calls}),
        None,
    ))
}

#[derive(serde::Deserialize)]
struct SimonTableFile {
    n: usize,
    table: Vec<usize>,
}

fn cmd_simon(a: SimonArgs) -> Result<String, CliError> {
    let file: SimonTableFile = read_json(&a.table_file)?;
    let oracle = algorithms::BooleanOracle::new(file.n, file.n, file.table.clone())?;
    let out = algorithms::simon(&oracle, a.seed, a.max_calls)?;
    let as_bits = |z: usize| format!("{z:0width$b}", width = file.n);
    Ok(report(
        "simon",
        json!({"n": file.n, "table": file.table, "max_calls": a.max_calls}),
        json!({
            "result": as_bits(out.s),
            "oracle_calls": out.oracle_calls,
            "samples": out.samples.iter().map(|&z| as_bits(z)).collect::<Vec<_>>(),
        }),
        Some(a.seed),
    ))
}

fn cmd_grover(a: GroverArgs) -> Result<String, CliError> {
    let solutions = parse_usize_list(&a.solutions, "solutions")?;
    let inst = algorithms::GroverInstance::new(a.n, solutions.clone())?;
    let k0 = algorithms::grover_k0(inst.n_states(), inst.m());
    let k = if a.k == "auto" {
        k0
    } else {
        a.k.parse::<usize>()
            .map_err(|_| CliError::Validation(format!("bad iteration count \"{}\"", a.k)))?
    };
    let success = algorithms::grover_success(&inst, k);
    let closed = algorithms::grover_success_closed_form(&inst, k);
    let mut results = Map::new();
    results.insert("k0".into(), json!(k0));
    results.insert("k".into(), json!(k));
    results.insert("success".into(), computed(success));
    results.insert(
        "success_closed_form".into(),
        val(closed, "sin^2((2k+1)*theta/2)"),
    );
    results.insert(
        "theta".into(),
        val(inst.theta(), "2*asin(sqrt(M/N))"),
    );
    if a.emit_distribution {
        results.insert("distribution".into(), json!(algorithms::grover(&inst, k)));
    }
    Ok(report(
        "grover",
        json!({"n": a.n, "solutions": solutions}),
        Value::Object(results),
        a.seed,
    ))
}

fn cmd_phase(a: PhaseArgs) -> Result<String, CliError> {
    if !(0.0..1.0).contains(&a.phi) {
        return Err(CliError::Validation("phi must lie in [0,1)".into()));
    }
    if a.bits == 0 || a.bits > 12 {
        return Err(CliError::Validation("bits must be between 1 and 12".into()));
    }
    let u = qitk_core::ComplexMatrix::from_diag(&[
        qitk_core::C64::new(1.0, 0.0),
        qitk_core::C64::from_polar(1.0, 2.0 * std::f64::consts::PI * a.phi),
    ]);
    let inst = algorithms::PhaseEstimationInstance::new(
        u,
        states::StateVector::basis(vec![2], 1),
        a.bits,
        1e-9,
    )?;
    let out = algorithms::phase_estimate(&inst);
    Ok(report(
        "phase",
        json!({"phi": a.phi, "bits": a.bits}),
        json!({
            "estimate": computed(out.estimate),
            "best_index": out.best_index,
            "best_probability": val(
                out.distribution[out.best_index],
                "|sin(2^n pi (phi-est))/(2^n sin(pi (phi-est)))|^2",
            ),
            "distribution": out.distribution,
        }),
        None,
    ))
}

fn cmd_qft(a: QftArgs) -> Result<String, CliError> {
    if a.n == 0 || a.n > 10 {
        return Err(CliError::Validation("n must be between 1 and 10".into()));
    }
    let circuit = circuits::qft_circuit(a.n)?;
    let mut results = Map::new();
    results.insert("gate_count".into(), json!(circuit.ops().len()));
    results.insert(
        "gate_count_formula".into(),
        val(circuits::qft_gate_count(a.n) as f64, "n(n+2)/2"),
    );
    results.insert(
        "gate_count_expanded".into(),
        json!(circuits::qft_gate_count_expanded(a.n)),
    );
    if a.emit_matrix {
        let m = circuits::qft_matrix(a.n);
        results.insert(
            "matrix".into(),
            serde_json::to_value(qitk_core::linalg::MatrixJson::from_matrix(&m))
                .expect("matrix serializes"),
        );
    }
    Ok(report(
        "qft",
        json!({"n": a.n}),
        Value::Object(results),
        None,
    ))
}

fn cmd_channel(a: ChannelArgs) -> Result<String, CliError> {
    let which = channels::NamedChannel::parse(&a.name)?;
    let ch = channels::named_channel(which, a.param)?;
    let rho = load_density(&a.apply, None)?;
    let out = channels::apply(&ch, &rho)?;
    let mut results = Map::new();
    results.insert(
        "output_state".into(),
        serde_json::to_value(StateJson::from_mixed(&out)).expect("state serializes"),
    );
    if rho.dim() == 2 {
        let map = channels::bloch_map(&ch)?;
        results.insert(
            "bloch_map".into(),
            json!({"linear": map.linear, "offset": map.offset}),
        );
    }
    Ok(report(
        "channel",
        json!({"name": a.name, "param": a.param, "state_file": a.apply}),
        Value::Object(results),
        None,
    ))
}

fn cmd_distance(a: DistanceArgs) -> Result<String, CliError> {
    let rho = load_density(&a.a, None)?;
    let sigma = load_density(&a.b, None)?;
    let (key, value, formula) = match a.measure.as_str() {
        "trace" => (
            "trace_distance",
            infotheory::trace_distance(&rho, &sigma)?,
            "Tr|rho-sigma|/2",
        ),
        "fidelity" => (
            "fidelity",
            infotheory::fidelity(&rho, &sigma)?,
            "Tr sqrt(sqrt(rho) sigma sqrt(rho))",
        ),
        "relent" => (
            "relative_entropy",
            infotheory::quantum_relative_entropy(&rho, &sigma)?,
            "Tr(rho log rho) - Tr(rho log sigma)",
        ),
        other => {
            return Err(CliError::Validation(format!(
                "unknown measure \"{other}\""
            )))
        }
    };
    let payload = if value.is_finite() {
        val(value, formula)
    } else {
        json!({"value": "infinity", "formula": formula})
    };
    let mut results = Map::new();
    results.insert(key.into(), payload);
    if a.measure == "relent" {
        results.insert("units".into(), json!("bits"));
    }
    Ok(report(
        "distance",
        json!({"a": a.a, "b": a.b, "measure": a.measure}),
        Value::Object(results),
        None,
    ))
}

fn cmd_entropy(a: EntropyArgs) -> Result<String, CliError> {
    let dims = parse_usize_list(&a.partition, "partition")?;
    if dims.len() != 2 {
        return Err(CliError::Validation(
            "entropy report needs a bipartition like 2,2".into(),
        ));
    }
    let rho = load_density(&a.state, Some(dims.clone()))?;
    let mut results = Map::new();
    for item in a.report.split(',') {
        match item.trim() {
            "joint" => {
                results.insert(
                    "joint".into(),
                    val(infotheory::quantum_joint_entropy(&rho)?, "S(A,B)"),
                );
            }
            "cond" => {
                results.insert(
                    "conditional".into(),
                    val(infotheory::quantum_conditional_entropy(&rho)?, "S(A,B)-S(B)"),
                );
            }
            "mutual" => {
                results.insert(
                    "mutual".into(),
                    val(
                        infotheory::quantum_mutual_information(&rho)?,
                        "S(A)+S(B)-S(A,B)",
                    ),
                );
            }
            "a" => {
                results.insert(
                    "entropy_a".into(),
                    val(
                        infotheory::von_neumann(&rho.partial_trace(&[0])?)?,
                        "S(A)",
                    ),
                );
            }
            "b" => {
                results.insert(
                    "entropy_b".into(),
                    val(
                        infotheory::von_neumann(&rho.partial_trace(&[1])?)?,
                        "S(B)",
                    ),
                );
            }
            other => {
                return Err(CliError::Validation(format!(
                    "unknown entropy report item \"{other}\""
                )))
            }
        }
    }
    results.insert("units".into(), json!("bits"));
    Ok(report(
        "entropy",
        json!({"state": a.state, "partition": dims, "report": a.report}),
        Value::Object(results),
        None,
    ))
}

#[derive(serde::Deserialize)]
struct EnsembleEntryJson {
    p: f64,
    state: StateJson,
}

#[derive(serde::Deserialize)]
struct EnsembleJson {
    entries: Vec<EnsembleEntryJson>,
}

fn cmd_holevo(a: HolevoArgs) -> Result<String, CliError> {
    let file: EnsembleJson = read_json(&a.ensemble)?;
    let tol = tolerance().max(1e-7);
    let entries = file
        .entries
        .iter()
        .map(|e| Ok((e.p, e.state.to_density(tol)?)))
        .collect::<Result<Vec<_>, qitk_core::Error>>()?;
    let ensemble = states::Ensemble::new(entries)?;
    let chi = infotheory::holevo_chi(&ensemble)?;
    Ok(report(
        "holevo",
        json!({"ensemble": a.ensemble}),
        json!({
            "chi": val(chi, "S(sum p rho) - sum p S(rho)"),
            "units": "bits",
        }),
        None,
    ))
}

fn cmd_entangle(a: EntangleArgs) -> Result<String, CliError> {
    let dims = parse_usize_list(&a.partition, "partition")?;
    if dims.len() != 2 {
        return Err(CliError::Validation(
            "entanglement report needs a bipartition like 2,2".into(),
        ));
    }
    let rho = load_density(&a.state, Some(dims.clone()))?;
    let mut results = Map::new();
    for item in a.measures.split(',') {
        match item.trim() {
            "entropy" => {
                // entanglement entropy needs a pure state
                let purity = states::purity(&rho);
                if purity < 1.0 - 1e-6 {
                    return Err(CliError::Validation(
                        "entanglement entropy needs a pure input state".into(),
                    ));
                }
                let eig = qitk_core::linalg::hermitian_eig(rho.matrix(), 1e-7)?;
                let top = eig.eigenvector(rho.dim() - 1);
                let psi = states::StateVector::new(dims.clone(), top)?;
                results.insert(
                    "entanglement_entropy".into(),
                    val(entanglement::entanglement_entropy(&psi)?, "S(rho_A)"),
                );
            }
            "concurrence" => {
                results.insert(
                    "concurrence".into(),
                    val(
                        entanglement::concurrence_mixed_2q(&rho)?,
                        "max(0, l1-l2-l3-l4)",
                    ),
                );
            }
            "negativity" => {
                results.insert(
                    "negativity".into(),
                    val(entanglement::negativity(&rho)?, "(|rho^pt|_1 - 1)/2"),
                );
            }
            "eof" => {
                results.insert(
                    "entanglement_of_formation".into(),
                    val(
                        entanglement::entanglement_of_formation_2q(&rho)?,
                        "binary_entropy((1+sqrt(1-c^2))/2)",
                    ),
                );
            }
            other => {
                return Err(CliError::Validation(format!(
                    "unknown entanglement measure \"{other}\""
                )))
            }
        }
    }
    results.insert("ppt".into(), json!(entanglement::is_ppt(&rho, 1e-9)?));
    Ok(report(
        "entangle",
        json!({"state": a.state, "partition": dims, "measures": a.measures}),
        Value::Object(results),
        None,
    ))
}

fn cmd_chsh(a: ChshArgs) -> Result<String, CliError> {
    let rho = match (&a.state, &a.bell) {
        (Some(path), None) => load_density(path, Some(vec![2, 2]))?,
        (None, Some(name)) => match name.as_str() {
            "psi_minus" => bell::psi_minus().to_density(),
            other => {
                return Err(CliError::Validation(format!(
                    "unknown Bell state \"{other}\" (try psi_minus)"
                )))
            }
        },
        _ => {
            return Err(CliError::Validation(
                "give exactly one of --state or --bell".into(),
            ))
        }
    };
    let (settings, value, seed) = if a.optimize {
        let seed = a.seed.ok_or_else(|| {
            CliError::Validation("--optimize samples restarts and requires --seed".into())
        })?;
        let (s, v) = bell::optimize_settings(&rho, seed)?;
        (s, v, Some(seed))
    } else {
        let s = bell::ChshSettings::optimal_family(0.0);
        let v = bell::chsh_value(&rho, &s)?;
        (s, v, None)
    };
    Ok(report(
        "chsh",
        json!({
            "state": a.state,
            "bell": a.bell,
            "optimize": a.optimize,
        }),
        json!({
            "settings": {
                "alpha": settings.alpha,
                "alpha_prime": settings.alpha_prime,
                "beta": settings.beta,
                "beta_prime": settings.beta_prime,
            },
            "value": val(value, "|E(a,b)-E(a,b')+E(a',b)+E(a',b')|"),
            "violates_classical": value > 2.0 + 1e-9,
        }),
        seed,
    ))
}

fn cmd_synth(a: SynthArgs) -> Result<String, CliError> {
    match a.mode.as_str() {
        "two-level" => {
            let path = a.unitary_file.ok_or_else(|| {
                CliError::Validation("two-level mode needs --unitary-file".into())
            })?;
            let mj: qitk_core::linalg::MatrixJson = read_json(&path)?;
            let u = mj.to_matrix()?;
            let factors = gates::two_level_decompose(&u, 1e-8)?;
            let residual = gates::two_level_product(&factors, u.rows()).max_abs_diff(&u);
            Ok(report(
                "synth",
                json!({"mode": "two-level", "unitary_file": path}),
                json!({
                    "factors": factors.len(),
                    "bound": u.rows() * (u.rows() - 1) / 2,
                    "residual": computed(residual),
                }),
                None,
            ))
        }
        "gray" => {
            let path = a.unitary_file.ok_or_else(|| {
                CliError::Validation("gray mode needs --unitary-file (a 2x2 block)".into())
            })?;
            let n = a
                .n
                .ok_or_else(|| CliError::Validation("gray mode needs --n".into()))?;
            let pair = parse_usize_list(
                &a.pair
                    .ok_or_else(|| CliError::Validation("gray mode needs --pair i,j".into()))?,
                "pair",
            )?;
            if pair.len() != 2 {
                return Err(CliError::Validation("--pair wants two indices".into()));
            }
            let mj: qitk_core::linalg::MatrixJson = read_json(&path)?;
            let block = mj.to_matrix()?;
            let t = gates::TwoLevelUnitary::new(1 << n, pair[0], pair[1], block)?;
            let circuit = gates::gray_synthesize(&t, n)?;
            let residual = circuits::unitary_of(&circuit)?.max_abs_diff(&t.embed());
            Ok(report(
                "synth",
                json!({"mode": "gray", "unitary_file": path, "pair": pair, "n": n}),
                json!({
                    "gates": circuit.ops().len(),
                    "residual": computed(residual),
                    "circuit": serde_json::to_value(circuits::CircuitJson::from_circuit(&circuit))
                        .expect("circuit serializes"),
                }),
                None,
            ))
        }
        "ht" => {
            let angle = a.target_rz.ok_or_else(|| {
                CliError::Validation("ht mode needs --target-rz <angle>".into())
            })?;
            let target = gates::rotation_matrix(&gates::RotationSpec::z(angle))?;
            let word = gates::ht_approximate(&target, a.epsilon, a.max_len)?;
            Ok(report(
                "synth",
                json!({
                    "mode": "ht",
                    "target_rz": angle,
                    "epsilon": a.epsilon,
                    "max_len": a.max_len,
                }),
                json!({
                    "word": word.letters_string(),
                    "length": word.letters.len(),
                    "error": val(word.error, "min_phase sigma_max(e^{i phase} W - U)"),
                    "within_epsilon": word.error <= a.epsilon,
                }),
                None,
            ))
        }
        other => Err(CliError::Validation(format!(
            "unknown synth mode \"{other}\""
        ))),
    }
}

fn cmd_sweep(a: SweepArgs) -> Result<String, CliError> {
    if a.step <= 0.0 || a.to < a.from {
        return Err(CliError::Validation("empty or backwards sweep range".into()));
    }
    let points: Vec<f64> = {
        let mut p = Vec::new();
        let mut x = a.from;
        while x <= a.to + 1e-12 {
            p.push(x);
            x += a.step;
        }
        p
    };
    if points.is_empty() {
        return Err(CliError::Validation("sweep range has no points".into()));
    }
    let mut out = String::new();
    match a.kind.as_str() {
        "werner_concurrence" => {
            out.push_str("p,concurrence,negativity\n");
            let bell = entanglement::maximally_entangled(2)?.to_density();
            for &p in &points {
                let mixed = qitk_core::ComplexMatrix::identity(4).scale_re((1.0 - p) / 4.0);
                let rho = states::DensityMatrix::new(
                    vec![2, 2],
                    bell.matrix().scale_re(p).add(&mixed),
                    1e-7,
                )?;
                let c = entanglement::concurrence_mixed_2q(&rho)?;
                let n = entanglement::negativity(&rho)?;
                out.push_str(&format!("{p},{c},{n}\n"));
            }
        }
        "holevo_chi" => {
            out.push_str("gamma,chi\n");
            for &gamma in &points {
                if !(0.0..=1.0).contains(&gamma) {
                    return Err(CliError::Validation("gamma must stay in [0,1]".into()));
                }
                let ensemble = states::Ensemble::new(vec![
                    (
                        (1.0 + gamma) / 2.0,
                        states::StateVector::basis(vec![2], 0).to_density(),
                    ),
                    (
                        (1.0 - gamma) / 2.0,
                        states::StateVector::basis(vec![2], 1).to_density(),
                    ),
                ])?;
                let chi = infotheory::holevo_chi(&ensemble)?;
                out.push_str(&format!("{gamma},{chi}\n"));
            }
        }
        "grover_success" => {
            let n = a
                .n
                .ok_or_else(|| CliError::Validation("grover sweep needs --n".into()))?;
            let solutions = parse_usize_list(
                &a.solutions
                    .ok_or_else(|| CliError::Validation("grover sweep needs --solutions".into()))?,
                "solutions",
            )?;
            let inst = algorithms::GroverInstance::new(n, solutions)?;
            out.push_str("k,success,closed_form\n");
            for &kf in &points {
                let k = kf.round() as usize;
                let s = algorithms::grover_success(&inst, k);
                let c = algorithms::grover_success_closed_form(&inst, k);
                out.push_str(&format!("{k},{s},{c}\n"));
            }
        }
        other => {
            return Err(CliError::Validation(format!(
                "unknown sweep kind \"{other}\""
            )))
        }
    }
    Ok(out)
}
