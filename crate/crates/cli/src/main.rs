use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Deserialize;

use mcqsim::circuit::{random_circuit, ArityDistribution};
use mcqsim::config::{apply_override, parse_architecture, parse_parameters};
use mcqsim::report::{emit, summarize, Format};
use mcqsim::sweep::{parse_vary, CircuitSource, Execution, Sweep};
use mcqsim::{load_mapping, parse_circuit, simulate, vanilla_map, Error, ErrorCategory};

#[derive(Parser)]
#[command(name = "mcqsim", version, about = "Execution-time simulator for multi-core quantum architectures")]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate one circuit and print its report.
    Run(RunArgs),
    /// Write a random circuit.
    Gen(GenArgs),
    /// Run a parameter sweep and write CSV.
    Sweep(SweepArgs),
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    circuit: PathBuf,
    #[arg(long)]
    arch: PathBuf,
    #[arg(long)]
    params: PathBuf,
    /// `qubit core` per line; vanilla `i mod M` mapping when absent.
    #[arg(long)]
    mapping: Option<PathBuf>,
    #[arg(long, default_value = "text")]
    format: Format,
    /// Write the per-bundle trace to this file.
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Include per-qubit operation and teleport counts.
    #[arg(long)]
    detailed: bool,
    /// Override a configuration key, e.g. `--set ltm_ports=2`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    qubits: usize,
    #[arg(long)]
    gates: usize,
    /// Probabilities of arity 1, 2, ... separated by commas.
    #[arg(long)]
    arity_dist: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    /// TOML file with sweep settings; flags take precedence.
    #[arg(long)]
    spec: Option<PathBuf>,
    #[arg(long)]
    arch: Option<PathBuf>,
    #[arg(long)]
    params: Option<PathBuf>,
    #[arg(long)]
    circuit: Option<PathBuf>,
    #[arg(long)]
    mapping: Option<PathBuf>,
    #[arg(long)]
    qubits: Option<usize>,
    #[arg(long)]
    gates: Option<usize>,
    #[arg(long)]
    arity_dist: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    repetitions: Option<usize>,
    /// `key=v1,v2,...` or `key=a..b`; repeat for a grid.
    #[arg(long, value_name = "KEY=VALUES")]
    vary: Vec<String>,
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    /// Worker threads; 0 picks the number of CPUs.
    #[arg(long, default_value_t = 0)]
    threads: usize,
    #[arg(long)]
    sequential: bool,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct SweepFile {
    arch: Option<PathBuf>,
    params: Option<PathBuf>,
    circuit: Option<PathBuf>,
    mapping: Option<PathBuf>,
    qubits: Option<usize>,
    gates: Option<usize>,
    arity_dist: Option<Vec<f64>>,
    seed: Option<u64>,
    repetitions: Option<usize>,
    #[serde(default)]
    vary: Vec<String>,
    #[serde(default)]
    set: Vec<String>,
    output: Option<PathBuf>,
}

struct Failure {
    code: u8,
    msg: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e.category() {
            ErrorCategory::Input => 4,
            ErrorCategory::Capacity => 5,
            ErrorCategory::Model => 6,
            ErrorCategory::Sweep => 7,
        };
        Failure { code, msg: e.to_string() }
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| Failure {
        code: 3,
        msg: format!("{}: {e}", path.display()),
    })
}

fn write_out(path: Option<&Path>, text: &str) -> CliResult<()> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| Failure {
            code: 3,
            msg: format!("{}: {e}", p.display()),
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Wraps a parse error with the file it came from.
fn in_file<T>(path: &Path, r: mcqsim::Result<T>) -> CliResult<T> {
    r.map_err(|e| {
        let mut f = Failure::from(e);
        f.msg = format!("{}: {}", path.display(), f.msg);
        f
    })
}

fn split_override(s: &str) -> CliResult<(&str, &str)> {
    s.split_once('=')
        .map(|(k, v)| (k.trim(), v.trim()))
        .ok_or_else(|| Failure {
            code: 4,
            msg: format!("--set expects KEY=VALUE, got `{s}`"),
        })
}

fn parse_dist(s: &str) -> CliResult<ArityDistribution> {
    let probs = s
        .split(',')
        .map(|p| p.trim().parse::<f64>())
        .collect::<std::result::Result<Vec<_>, _>>()
        .map_err(|_| Failure {
            code: 4,
            msg: format!("--arity-dist: expected comma-separated numbers, got `{s}`"),
        })?;
    Ok(ArityDistribution::new(probs)?)
}

fn cmd_run(a: RunArgs) -> CliResult<()> {
    let circuit = in_file(&a.circuit, parse_circuit(&read(&a.circuit)?))?;
    let mut arch = in_file(&a.arch, parse_architecture(&read(&a.arch)?))?;
    let mut params = in_file(&a.params, parse_parameters(&read(&a.params)?))?;
    for o in &a.overrides {
        let (k, v) = split_override(o)?;
        apply_override(&mut arch, &mut params, k, v)?;
    }
    let placement = match &a.mapping {
        Some(p) => in_file(p, load_mapping(&read(p)?, &arch))?,
        None => vanilla_map(circuit.num_qubits(), &arch)?,
    };
    let trace = simulate(&circuit, &arch, &params, placement)?;
    if let Some(path) = &a.trace {
        write_out(Some(path), &trace.dump())?;
    }
    let report = summarize(&trace, &arch, &params).with_detail(a.detailed);
    write_out(None, &emit(&report, a.format))
}

fn cmd_gen(a: GenArgs) -> CliResult<()> {
    let dist = parse_dist(&a.arity_dist)?;
    let c = random_circuit(a.qubits, a.gates, &dist, a.seed)?;
    write_out(a.output.as_deref(), &c.render())
}

fn cmd_sweep(a: SweepArgs) -> CliResult<()> {
    let (file, base) = match &a.spec {
        Some(p) => {
            let f: SweepFile = toml::from_str(&read(p)?).map_err(|e| Failure {
                code: 4,
                msg: format!("{}: {e}", p.display()),
            })?;
            (f, p.parent().map(Path::to_path_buf).unwrap_or_default())
        }
        None => (SweepFile::default(), PathBuf::new()),
    };
    // paths from the spec file are relative to it
    let rel = |p: Option<PathBuf>| p.map(|p| base.join(p));
    let usage = |what: &str| Failure {
        code: 2,
        msg: format!("sweep needs {what}"),
    };

    let arch_path = a.arch.or(rel(file.arch)).ok_or_else(|| usage("--arch"))?;
    let params_path = a.params.or(rel(file.params)).ok_or_else(|| usage("--params"))?;
    let mut arch = in_file(&arch_path, parse_architecture(&read(&arch_path)?))?;
    let mut params = in_file(&params_path, parse_parameters(&read(&params_path)?))?;
    for o in file.set.iter().chain(&a.overrides) {
        let (k, v) = split_override(o)?;
        apply_override(&mut arch, &mut params, k, v)?;
    }

    let circuit = match a.circuit.or(rel(file.circuit)) {
        Some(p) => CircuitSource::Fixed(in_file(&p, parse_circuit(&read(&p)?))?),
        None => {
            let arity = match (a.arity_dist, file.arity_dist) {
                (Some(s), _) => parse_dist(&s)?,
                (None, Some(v)) => ArityDistribution::new(v)?,
                (None, None) => return Err(usage("--circuit or --arity-dist")),
            };
            CircuitSource::Random {
                qubits: a.qubits.or(file.qubits).ok_or_else(|| usage("--qubits"))?,
                gates: a.gates.or(file.gates).ok_or_else(|| usage("--gates"))?,
                arity,
            }
        }
    };
    let mapping = match a.mapping.or(rel(file.mapping)) {
        Some(p) => Some(read(&p)?),
        None => None,
    };
    let vary_args = if a.vary.is_empty() { file.vary } else { a.vary };
    let vary = vary_args
        .iter()
        .map(|v| parse_vary(v))
        .collect::<mcqsim::Result<Vec<_>>>()?;

    let sweep = Sweep {
        arch,
        params,
        circuit,
        mapping,
        vary,
        repetitions: a.repetitions.or(file.repetitions).unwrap_or(1),
        base_seed: a.seed.or(file.seed).unwrap_or(0),
    };
    let exec = if a.sequential {
        Execution::Sequential
    } else {
        Execution::Parallel { threads: a.threads }
    };
    let rows = sweep.run(exec)?;
    let output = a.output.or(rel(file.output));
    write_out(output.as_deref(), &sweep.to_csv(&rows))?;
    let failed = rows.iter().filter(|r| r.result.is_err()).count();
    if failed > 0 {
        return Err(Failure {
            code: 7,
            msg: format!("{failed} of {} sweep points failed", rows.len()),
        });
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.cmd {
        Command::Run(a) => cmd_run(a),
        Command::Gen(a) => cmd_gen(a),
        Command::Sweep(a) => cmd_sweep(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("mcqsim: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}
