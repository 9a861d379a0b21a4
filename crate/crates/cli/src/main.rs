//! `hlnsim`: compile, simulate, compare and validate notation programs.
//!
//! Exit status: 0 on success, 1 when a check fails or the input is invalid,
//! 2 on usage errors.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hlnsim::models::{builtin, BUILTIN_NAMES};
use hlnsim::{
    build_ode, compare, describe_weights, ensemble, ensemble_pi, enumerate_ctmc, enumerate_ctmc_pi,
    find_conservation, integrate, parse_program, simulate, simulate_pi, to_pi, to_reactions,
    OdeConfig, Process, ReactionNetwork, SsaConfig, State,
};

#[derive(Parser)]
#[command(
    name = "hlnsim",
    version,
    about = "Compile and simulate biochemical action programs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Translate a program to a reaction network or a process system (JSON).
    Compile {
        /// A .hln file or builtin:<name>
        input: String,
        #[arg(long, value_enum, default_value_t = Emit::Reactions)]
        emit: Emit,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Simulate a model and write a CSV trajectory.
    Simulate {
        /// builtin:<name>, a .hln program or a .json reaction network
        model: String,
        #[arg(long, value_enum, default_value_t = Method::Ssa)]
        method: Method,
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, default_value_t = 601)]
        samples: usize,
        #[arg(long, default_value_t = 1)]
        runs: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare an SSA ensemble mean with the ODE solution.
    Compare {
        model: String,
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, default_value_t = 20)]
        runs: usize,
        /// Cells whose ODE value is below this many molecules are excluded.
        #[arg(long, default_value_t = 500.0)]
        threshold: f64,
        /// Largest admissible relative deviation.
        #[arg(long, default_value_t = 0.05)]
        bound: f64,
        #[arg(long, default_value_t = 11)]
        samples: usize,
        /// Per-cell CSV report.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Report conservation laws and check that both stochastic backends
    /// generate the same Markov chain from a down-scaled population.
    Validate {
        model: String,
        /// Initial amounts, NAME=COUNT (repeatable).
        #[arg(long = "init", value_parser = parse_init)]
        init: Vec<(String, u64)>,
        #[arg(long, default_value_t = 100_000)]
        max_states: usize,
    },
}

#[derive(Args)]
struct RunArgs {
    /// End time in seconds (defaults to the model's own, else 600).
    #[arg(long)]
    t_end: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Initial amounts, NAME=COUNT (repeatable); unspecified species keep
    /// the model's amount (zero for files).
    #[arg(long = "init", value_parser = parse_init)]
    init: Vec<(String, u64)>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Emit {
    Reactions,
    Pi,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Method {
    Ssa,
    SsaPi,
    Ode,
}

fn parse_init(text: &str) -> Result<(String, u64), String> {
    let (name, count) = text
        .split_once('=')
        .ok_or_else(|| format!("expected NAME=COUNT, got {text:?}"))?;
    let count = count
        .trim()
        .parse()
        .map_err(|e| format!("bad count in {text:?}: {e}"))?;
    Ok((name.trim().to_string(), count))
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn invalid(message: impl Into<String>) -> Self {
        Self {
            code: 1,
            message: message.into(),
        }
    }

    fn usage(message: impl Into<String>) -> Self {
        Self {
            code: 2,
            message: message.into(),
        }
    }
}

impl From<hlnsim::Error> for Failure {
    fn from(e: hlnsim::Error) -> Self {
        Self::invalid(e.to_string())
    }
}

type CliResult<T> = Result<T, Failure>;

struct Model {
    name: String,
    network: ReactionNetwork,
    initial: State,
    process: Option<Process>,
    t_end: f64,
}

impl Model {
    fn load(source: &str) -> CliResult<Self> {
        if let Some(name) = source.strip_prefix("builtin:") {
            let m = builtin(name).ok_or_else(|| {
                Failure::usage(format!(
                    "unknown builtin {name:?} (available: {})",
                    BUILTIN_NAMES.join(", ")
                ))
            })?;
            let process = match m.process() {
                Some(p) => Some(p?),
                None => None,
            };
            return Ok(Self {
                name: m.name,
                network: m.network,
                initial: m.initial,
                process,
                t_end: m.t_end,
            });
        }
        let path = Path::new(source);
        let ext = path.extension().and_then(|e| e.to_str());
        if !matches!(ext, Some("hln" | "json")) {
            return Err(Failure::usage(format!(
                "{source}: expected builtin:<name>, a .hln file or a .json network"
            )));
        }
        let text = fs::read_to_string(path)
            .map_err(|e| Failure::invalid(format!("{}: {e}", path.display())))?;
        let name = path
            .file_stem()
            .map_or(source.into(), |s| s.to_string_lossy().into_owned());
        match ext {
            Some("hln") => {
                let process = parse_program(&text)
                    .map_err(|e| Failure::invalid(format!("{}:{e}", path.display())))?;
                let network = to_reactions(&process);
                let initial = State::zeros(network.species().len());
                Ok(Self {
                    name,
                    network,
                    initial,
                    process: Some(process),
                    t_end: 600.0,
                })
            }
            _ => {
                let network = ReactionNetwork::from_json(&text)
                    .map_err(|e| Failure::invalid(format!("{}: {e}", path.display())))?;
                let initial = State::zeros(network.species().len());
                Ok(Self {
                    name,
                    network,
                    initial,
                    process: None,
                    t_end: 600.0,
                })
            }
        }
    }

    fn with_init(mut self, init: &[(String, u64)]) -> CliResult<Self> {
        let mut counts = self.initial.into_counts();
        for (name, n) in init {
            let i = self.network.index_of(name)?;
            counts[i] = *n;
        }
        self.initial = State::new(counts);
        Ok(self)
    }

    fn process(&self) -> CliResult<&Process> {
        self.process
            .as_ref()
            .ok_or_else(|| Failure::invalid(format!("model {} has no notation program", self.name)))
    }

    /// The translated process system, started from this model's amounts.
    fn system(&self) -> CliResult<hlnsim::ProcessSystem> {
        let sys = to_pi(self.process()?);
        let initial = sys.state_from(
            self.network
                .species()
                .iter()
                .zip(self.initial.iter())
                .map(|(s, &n)| (s.as_str(), n)),
        )?;
        Ok(sys.with_initial(initial)?)
    }
}

fn emit(out: Option<&Path>, text: &str) -> CliResult<()> {
    match out {
        Some(path) => {
            fs::write(path, text).map_err(|e| Failure::invalid(format!("{}: {e}", path.display())))
        }
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

fn run(cli: Cli) -> CliResult<ExitCode> {
    match cli.command {
        Command::Compile {
            input,
            emit: what,
            out,
        } => {
            let model = Model::load(&input)?;
            let json = match what {
                Emit::Reactions => model.network.to_json(),
                Emit::Pi => to_pi(model.process()?).to_json(),
            };
            emit(out.as_deref(), &with_newline(json))?;
        }
        Command::Simulate {
            model,
            method,
            run,
            samples,
            runs,
            out,
        } => {
            let m = Model::load(&model)?.with_init(&run.init)?;
            let t_end = run.t_end.unwrap_or(m.t_end);
            let csv = match method {
                Method::Ode => {
                    if runs != 1 {
                        return Err(Failure::usage("--runs applies to stochastic methods only"));
                    }
                    let cfg = OdeConfig {
                        t_end,
                        sample_count: samples,
                        ..Default::default()
                    };
                    let x0: Vec<f64> = m.initial.iter().map(|&n| n as f64).collect();
                    integrate(&build_ode(&m.network), &x0, &cfg)?.to_csv()
                }
                Method::Ssa | Method::SsaPi => {
                    let cfg = SsaConfig {
                        t_end,
                        sample_count: samples,
                        seed: run.seed,
                        runs,
                    };
                    let pi = method == Method::SsaPi;
                    match (runs > 1, pi) {
                        (false, false) => simulate(&m.network, &m.initial, &cfg)?.to_csv(),
                        (false, true) => simulate_pi(&m.system()?, &cfg)?.to_csv(),
                        (true, false) => ensemble(&m.network, &m.initial, &cfg)?.to_csv(),
                        (true, true) => ensemble_pi(&m.system()?, &cfg)?.to_csv(),
                    }
                }
            };
            emit(out.as_deref(), &csv)?;
        }
        Command::Compare {
            model,
            run,
            runs,
            threshold,
            bound,
            samples,
            out,
        } => {
            let m = Model::load(&model)?.with_init(&run.init)?;
            let t_end = run.t_end.unwrap_or(m.t_end);
            let cfg = SsaConfig {
                t_end,
                sample_count: samples,
                seed: run.seed,
                runs,
            };
            let stats = ensemble(&m.network, &m.initial, &cfg)?;
            let x0: Vec<f64> = m.initial.iter().map(|&n| n as f64).collect();
            let ode_cfg = OdeConfig {
                t_end,
                sample_count: samples,
                ..Default::default()
            };
            let ode = integrate(&build_ode(&m.network), &x0, &ode_cfg)?;
            let report = compare(&stats, &ode, threshold)?;
            if let Some(path) = out.as_deref() {
                emit(Some(path), &report.to_csv())?;
            }
            let pass = report.passes(bound);
            println!("{report}");
            println!(
                "{}: max deviation {:.4} (bound {bound}, {runs} runs)",
                if pass { "PASS" } else { "FAIL" },
                report.max_deviation()
            );
            if !pass {
                return Ok(ExitCode::from(1));
            }
        }
        Command::Validate {
            model,
            init,
            max_states,
        } => {
            let m = Model::load(&model)?.with_init(&init)?;
            return validate(&m, max_states);
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn validate(m: &Model, max_states: usize) -> CliResult<ExitCode> {
    let net = &m.network;
    println!(
        "model {}: {} species, {} reactions",
        m.name,
        net.species().len(),
        net.reactions().len()
    );
    let basis = find_conservation(net);
    if basis.is_empty() {
        println!("conservation laws: none");
    } else {
        println!("conservation laws:");
        for w in &basis {
            let total: i128 = w
                .iter()
                .zip(m.initial.iter())
                .map(|(&a, &n)| a as i128 * n as i128)
                .sum();
            println!("  {} = {total}", describe_weights(net.species(), w));
        }
    }

    if m.process.is_none() {
        println!("ctmc: skipped (no notation program)");
        return Ok(ExitCode::SUCCESS);
    }
    let sys = m.system()?;
    let scaled = State::new(m.initial.iter().map(|&n| n.min(1)).collect());
    let shown: Vec<String> = net
        .species()
        .iter()
        .zip(scaled.iter())
        .map(|(s, n)| format!("{s}={n}"))
        .collect();
    println!("ctmc from down-scaled state {}", shown.join(" "));
    let a = enumerate_ctmc(net, &scaled, max_states)?;
    let b = enumerate_ctmc_pi(&sys, &scaled, max_states)?;
    let equal = a == b;
    println!(
        "  reactions: {} states, {} transitions",
        a.states.len(),
        a.edges.len()
    );
    println!(
        "  process:   {} states, {} transitions",
        b.states.len(),
        b.edges.len()
    );
    println!("  {}", if equal { "equal" } else { "DIFFERENT" });
    Ok(if equal {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
