//! `mim`: figure data and validation for the mirror-in-the-middle system.

use std::fs::OpenOptions;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use mim_core::figures::{self, cat_couplings, CONCURRENCE_GAMMAS};
use mim_core::validate::{run_validation, ValidationOptions, ValidationReport};
use mim_core::{Error, Execution, SimulationConfig};
use serde::Serialize;

const EXIT_OTHER: u8 = 1;
const EXIT_VALIDATION: u8 = 2;
const EXIT_DIAGNOSTIC: u8 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "mim",
    version,
    about = "Mirror-in-the-middle optomechanics: figure data and validation"
)]
struct Cli {
    #[command(flatten)]
    common: Common,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Common {
    /// TOML file with parameter defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output path. A JSON-lines manifest is appended to `<out>.manifest.jsonl`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Disable data parallelism.
    #[arg(long, global = true)]
    sequential: bool,

    #[arg(long, global = true)]
    k_a: Option<f64>,
    #[arg(long, global = true)]
    k_b: Option<f64>,
    #[arg(long, global = true)]
    r_a: Option<f64>,
    #[arg(long, global = true)]
    r_b: Option<f64>,
    #[arg(long, global = true)]
    gamma: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    alpha_re: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    alpha_im: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    beta_re: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    beta_im: Option<f64>,
    #[arg(long, global = true)]
    phi_abs: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    phi_arg: Option<f64>,
    #[arg(long, global = true)]
    n_a: Option<usize>,
    #[arg(long, global = true)]
    n_b: Option<usize>,
    #[arg(long, global = true)]
    n_c: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// S_L of the optical|mirror split over t ∈ [0, 4π] (lossless).
    UnitaryEntropy {
        /// Couplings k_a = k_b = κ; defaults to 1/2, 1/√6, 1/(2√2).
        #[arg(long = "kappa", value_delimiter = ',')]
        kappas: Vec<f64>,
        #[arg(long, default_value_t = figures::UNITARY_ENTROPY_POINTS)]
        points: usize,
    },
    /// Optical-mode entropy at τ_q = 2qπ against κ ∈ [0, 1].
    CouplingSweep {
        #[arg(long = "q", value_delimiter = ',', default_values_t = [1u32, 2, 3])]
        qs: Vec<u32>,
        #[arg(long, default_value_t = figures::COUPLING_SWEEP_POINTS)]
        points: usize,
    },
    /// S_L(ρ_AB) and S_L(ρ_C) for |+⟩|+⟩|φ⟩ against γt ∈ [0, 3].
    QubitEntropy {
        #[arg(long = "kappa", value_delimiter = ',')]
        kappas: Vec<f64>,
        #[arg(long, default_value_t = figures::QUBIT_ENTROPY_POINTS)]
        points: usize,
    },
    /// Exact and approximate concurrence of ρ_AB over t ∈ [0, 8π].
    Concurrence {
        /// Decay rates; defaults to 0.01, 0.5, 1.
        #[arg(long = "gammas", value_delimiter = ',')]
        gammas: Vec<f64>,
        #[arg(long, default_value_t = figures::CONCURRENCE_POINTS)]
        points: usize,
    },
    /// Cross-check the closed forms against the numerical oracles.
    Validate,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::UnitaryEntropy { .. } => "unitary-entropy",
            Command::CouplingSweep { .. } => "coupling-sweep",
            Command::QubitEntropy { .. } => "qubit-entropy",
            Command::Concurrence { .. } => "concurrence",
            Command::Validate => "validate",
        }
    }
}

#[derive(Debug)]
enum Failure {
    Core(Error),
    Io(std::io::Error),
    Usage(String),
    Validation(ValidationReport),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e)
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure::Io(e.into())
    }
}

fn resolve_config(c: &Common) -> Result<SimulationConfig, Failure> {
    let mut cfg = match &c.config {
        Some(path) => SimulationConfig::load(path)?,
        None => SimulationConfig::default(),
    };
    macro_rules! apply {
        ($($field:ident),*) => {
            $(if let Some(v) = c.$field { cfg.$field = v; })*
        };
    }
    apply!(
        k_a, k_b, r_a, r_b, gamma, alpha_re, alpha_im, beta_re, beta_im, phi_abs, phi_arg, n_a,
        n_b, n_c
    );
    // re-run the same checks a config file goes through
    cfg.params()?;
    cfg.coherent_state()?;
    cfg.cutoff()?;
    Ok(cfg)
}

fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Serialize)]
struct Cutoff {
    n_a: usize,
    n_b: usize,
    n_c: usize,
}

#[derive(Serialize)]
struct Manifest<'a> {
    command: &'a str,
    params: &'a SimulationConfig,
    grid: serde_json::Value,
    cutoff: Cutoff,
    output: String,
    rows: usize,
    wall_clock_seconds: f64,
    execution: &'a str,
    validation: serde_json::Value,
}

fn manifest_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".manifest.jsonl");
    PathBuf::from(s)
}

fn append_manifest(out: &Path, m: &Manifest<'_>) -> Result<(), Failure> {
    let mut f = OpenOptions::new()
        .create(true)
        .append(true)
        .open(manifest_path(out))?;
    let line = serde_json::to_string(m).map_err(|e| Failure::Io(e.into()))?;
    writeln!(f, "{line}")?;
    Ok(())
}

struct Table {
    header: &'static [&'static str],
    rows: Vec<Vec<f64>>,
    grid: serde_json::Value,
    /// Checks on the produced values that go into the manifest.
    flags: serde_json::Value,
}

fn in_unit_interval(rows: &[Vec<f64>], cols: &[usize]) -> bool {
    rows.iter()
        .all(|r| cols.iter().all(|&c| (0.0..=1.0).contains(&r[c])))
}

fn all_finite(rows: &[Vec<f64>]) -> bool {
    rows.iter().flatten().all(|x| x.is_finite())
}

fn build_table(cmd: &Command, cfg: &SimulationConfig, exec: Execution) -> Result<Table, Failure> {
    let p = cfg.params()?;
    let table = match cmd {
        Command::UnitaryEntropy { kappas, points } => {
            let kappas = if kappas.is_empty() {
                cat_couplings().to_vec()
            } else {
                kappas.clone()
            };
            let rows: Vec<Vec<f64>> = figures::unitary_entropy(
                &p,
                &cfg.coherent_state()?,
                &cfg.cutoff()?,
                &kappas,
                *points,
                exec,
            )?
            .into_iter()
            .map(|r| vec![r.t, r.kappa, r.s_l])
            .collect();
            Table {
                header: &["t", "kappa", "S_L"],
                grid: serde_json::json!({ "kappa": kappas, "points": points, "t_max": 4.0 * std::f64::consts::PI }),
                flags: serde_json::json!({ "finite": all_finite(&rows), "entropy_in_unit_interval": in_unit_interval(&rows, &[2]) }),
                rows,
            }
        }
        Command::CouplingSweep { qs, points } => {
            let rows: Vec<Vec<f64>> = figures::coupling_sweep(
                &p,
                &cfg.coherent_state()?,
                &cfg.cutoff()?,
                qs,
                *points,
                exec,
            )?
            .into_iter()
            .map(|r| vec![r.kappa, f64::from(r.q), r.s_l])
            .collect();
            Table {
                header: &["kappa", "q", "S_L"],
                grid: serde_json::json!({ "q": qs, "points": points }),
                flags: serde_json::json!({ "finite": all_finite(&rows), "entropy_in_unit_interval": in_unit_interval(&rows, &[2]) }),
                rows,
            }
        }
        Command::QubitEntropy { kappas, points } => {
            let kappas = if kappas.is_empty() {
                cat_couplings().to_vec()
            } else {
                kappas.clone()
            };
            let rows: Vec<Vec<f64>> = figures::qubit_entropy(&p, &kappas, *points, exec)?
                .into_iter()
                .map(|r| vec![r.gamma_t, r.kappa, r.s_l_ab, r.s_l_c])
                .collect();
            Table {
                header: &["gamma_t", "kappa", "S_L_AB", "S_L_C"],
                grid: serde_json::json!({ "kappa": kappas, "points": points, "gamma_t_max": 3.0 }),
                flags: serde_json::json!({
                    "finite": all_finite(&rows),
                    "entropy_in_unit_interval": in_unit_interval(&rows, &[2, 3]),
                    "ab_not_below_c": rows.iter().all(|r| r[2] >= r[3]),
                }),
                rows,
            }
        }
        Command::Concurrence { gammas, points } => {
            let gammas = if gammas.is_empty() {
                CONCURRENCE_GAMMAS.to_vec()
            } else {
                gammas.clone()
            };
            let phi = cfg.qubit_state()?.phi();
            let rows: Vec<Vec<f64>> = figures::concurrence_series(&p, phi, &gammas, *points, exec)?
                .into_iter()
                .map(|r| vec![r.t, r.gamma, r.c_exact, r.c_approx, r.delta_c])
                .collect();
            Table {
                header: &["t", "gamma", "C_exact", "C_approx", "delta_C"],
                grid: serde_json::json!({ "gamma": gammas, "points": points, "t_max": 8.0 * std::f64::consts::PI }),
                flags: serde_json::json!({ "finite": all_finite(&rows), "concurrence_in_unit_interval": in_unit_interval(&rows, &[2, 3]) }),
                rows,
            }
        }
        Command::Validate => unreachable!("validate does not produce a table"),
    };
    Ok(table)
}

fn write_csv(out: &Path, table: &Table) -> Result<(), Failure> {
    let mut w = csv::Writer::from_path(out)?;
    w.write_record(table.header)?;
    for row in &table.rows {
        w.write_record(row.iter().map(|&x| fmt(x)))?;
    }
    w.flush()?;
    Ok(())
}

fn cutoff_of(cfg: &SimulationConfig) -> Cutoff {
    Cutoff {
        n_a: cfg.n_a,
        n_b: cfg.n_b,
        n_c: cfg.n_c,
    }
}

fn exec_label(exec: Execution) -> &'static str {
    if exec.is_parallel() {
        "parallel"
    } else {
        "sequential"
    }
}

fn run(cli: &Cli) -> Result<(), Failure> {
    let cfg = resolve_config(&cli.common)?;
    let exec = if cli.common.sequential {
        Execution::Sequential
    } else {
        Execution::Parallel
    };
    let start = Instant::now();
    let name = cli.command.name();

    if let Command::Validate = cli.command {
        let opts = ValidationOptions {
            integrator: ValidationOptions::default().integrator.with_execution(exec),
            exec,
            ..ValidationOptions::default()
        };
        let report = run_validation(&cfg, &opts)?;
        print!("{report}");
        if let Some(out) = &cli.common.out {
            std::fs::write(out, report.to_string())?;
            let checks: serde_json::Map<String, serde_json::Value> = report
                .checks
                .iter()
                .map(|c| {
                    (
                        c.name.to_string(),
                        serde_json::json!({ "passed": c.passed, "max_deviation": c.max_deviation, "tolerance": c.tolerance }),
                    )
                })
                .collect();
            append_manifest(
                out,
                &Manifest {
                    command: name,
                    params: &cfg,
                    grid: serde_json::Value::Null,
                    cutoff: cutoff_of(&cfg),
                    output: out.display().to_string(),
                    rows: report.checks.len(),
                    wall_clock_seconds: start.elapsed().as_secs_f64(),
                    execution: exec_label(exec),
                    validation: serde_json::json!({ "passed": report.passed(), "checks": checks }),
                },
            )?;
        }
        return if report.passed() {
            Ok(())
        } else {
            Err(Failure::Validation(report))
        };
    }

    let out = cli
        .common
        .out
        .as_ref()
        .ok_or_else(|| Failure::Usage(format!("`{name}` needs --out <path>")))?;
    let table = build_table(&cli.command, &cfg, exec)?;
    write_csv(out, &table)?;
    append_manifest(
        out,
        &Manifest {
            command: name,
            params: &cfg,
            grid: table.grid,
            cutoff: cutoff_of(&cfg),
            output: out.display().to_string(),
            rows: table.rows.len(),
            wall_clock_seconds: start.elapsed().as_secs_f64(),
            execution: exec_label(exec),
            validation: table.flags,
        },
    )?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // clap uses 2 for usage errors, which is reserved for validation failures
            return ExitCode::from(if e.use_stderr() { EXIT_OTHER } else { 0 });
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Validation(report)) => {
            let failed = report.checks.iter().filter(|c| !c.passed).count();
            eprintln!("mim: {failed} validation check(s) failed");
            ExitCode::from(EXIT_VALIDATION)
        }
        Err(Failure::Core(e)) => {
            eprintln!("mim: {e}");
            ExitCode::from(if e.is_numerical_diagnostic() {
                EXIT_DIAGNOSTIC
            } else {
                EXIT_OTHER
            })
        }
        Err(Failure::Io(e)) => {
            eprintln!("mim: {e}");
            ExitCode::from(EXIT_OTHER)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("mim: {msg}");
            ExitCode::from(EXIT_OTHER)
        }
    }
}
