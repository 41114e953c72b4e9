use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use ghz_forge::bounds::{theorem1_bound, Flag, Witness};
use ghz_forge::entropy::{EntropyProfile, SubsetMask};
use ghz_forge::protocol::{run_protocol, ProtocolConfig};
use ghz_forge::states::DEFAULT_TYPICAL_EPS;
use ghz_forge::subrank::{brute_force_subrank, greedy_free_diagonal, product_set};
use ghz_forge_cli::input::{apply_rotations, fmt6, StateSource};
use ghz_forge_cli::sweep::{run_sweep, SweepSpec};
use ghz_forge_cli::verify::verify;

#[derive(Parser)]
#[command(name = "ghz-forge", version, about = "GHZ distillation rate bounds and protocol simulation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct StateArgs {
    /// State file (JSON with k, dims, amps).
    #[arg(long, short = 'f')]
    file: Option<PathBuf>,
    /// Built-in family: ghz, w, asymmetric-w, rohrlich, permutations.
    #[arg(long)]
    family: Option<String>,
    /// Family parameter.
    #[arg(long, allow_negative_numbers = true)]
    param: Option<f64>,
}

impl StateArgs {
    fn source(&self) -> Result<StateSource> {
        StateSource::from_flags(self.file.as_deref(), self.family.as_deref(), self.param)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Asymptotic lower bound from the covering LP.
    Bound {
        #[command(flatten)]
        state: StateArgs,
        /// Local rotation SITE:NAME (hadamard, identity, or [a,b;c,d]); repeatable.
        #[arg(long)]
        rotate: Vec<String>,
    },
    /// CSV of bounds along a one-parameter family.
    Sweep {
        #[arg(long)]
        family: String,
        #[arg(long, default_value_t = 0.0)]
        start: f64,
        #[arg(long, default_value_t = 0.5)]
        stop: f64,
        #[arg(long, default_value_t = 51)]
        steps: usize,
        /// Comma-separated columns.
        #[arg(long, value_delimiter = ',', default_value = "theorem1,smolin,streltsov,cut")]
        bounds: Vec<String>,
        /// Rotation applied before evaluating the theorem1 column; repeatable.
        #[arg(long)]
        rotate: Vec<String>,
        /// Output file; standard output if absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the partition protocol on n copies.
    Simulate {
        #[command(flatten)]
        state: StateArgs,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        n: u64,
        #[arg(long, default_value_t = 0.05)]
        delta: f64,
        #[arg(long, default_value_t = 0.2)]
        eps: f64,
        #[arg(long, env = "GHZ_FORGE_SEED", default_value_t = 0)]
        seed: u64,
        /// Worker threads (0 = all cores); does not affect the output.
        #[arg(long, default_value_t = 0)]
        workers: usize,
        #[arg(long, default_value_t = DEFAULT_TYPICAL_EPS)]
        typical_eps: f64,
        /// Fixed Rényi order instead of the derived one.
        #[arg(long)]
        alpha: Option<f64>,
    },
    /// Exact subrank of a support by exhaustive search.
    Subrank {
        #[command(flatten)]
        state: StateArgs,
        /// Use the n-fold product of the support.
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
        power: u32,
    },
    /// Randomized property checks.
    Verify {
        /// meanbounds, duality or majorization.
        #[arg(long)]
        lemma: String,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, env = "GHZ_FORGE_SEED", default_value_t = 0)]
        seed: u64,
        /// Add a deliberately false case to exercise the failure path.
        #[arg(long)]
        plant: bool,
    },
}

fn bound(state: &StateArgs, rotate: &[String]) -> Result<String> {
    let psi = apply_rotations(state.source()?.load()?, rotate)?;
    let p = psi.distribution();
    let report = theorem1_bound(&p)?;
    let Witness::Lp { entropy, solution } = &report.witness else {
        unreachable!("theorem1_bound always returns an LP witness")
    };
    let k = psi.k();
    let profile = EntropyProfile::conditional_shannon(&p)?;
    let mut out = format!("k={k}\ndims={:?}\nH(P)={}\n", psi.dims(), fmt6(*entropy));
    for m in SubsetMask::proper(k) {
        out += &format!("h{m}={}\n", fmt6(profile.get(m)));
    }
    let xs: Vec<String> = solution.x.iter().map(|&v| fmt6(v)).collect();
    out += &format!("x=[{}]\nsum_x={}\n", xs.join(", "), fmt6(solution.objective));
    let tight: Vec<String> = solution.tight_constraints.iter().map(|m| m.to_string()).collect();
    out += &format!("tight=[{}]\n", tight.join(", "));
    let cert: Vec<String> = solution
        .certificate
        .iter()
        .filter(|(_, &y)| y.abs() > 1e-12)
        .map(|(m, &y)| format!("{m}:{}", fmt6(y)))
        .collect();
    out += &format!("certificate=[{}]\n", cert.join(", "));
    if report.flags.contains(&Flag::ClampedAtZero) {
        out += "flags=clamped-at-zero\n";
    }
    out += &format!("value={}\n", fmt6(report.value));
    Ok(out)
}

fn subrank(state: &StateArgs, power: u32) -> Result<String> {
    let base = state.source()?.load()?.support();
    let mut phi = base.clone();
    for _ in 1..power {
        phi = product_set(&phi, &base)?;
    }
    let (q, cert) = brute_force_subrank(&phi)?;
    let greedy = greedy_free_diagonal(&phi)?;
    let witness: Vec<String> = cert
        .elements
        .iter()
        .map(|e| format!("({})", e.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(",")))
        .collect();
    Ok(format!(
        "support_size={}\nsubrank={q}\nwitness=[{}]\ndiagonal={}\nfree={}\ngreedy_isolated={}\n",
        phi.len(),
        witness.join(", "),
        cert.diagonal,
        cert.free,
        greedy.len()
    ))
}

fn write_stdout(s: &str) -> Result<()> {
    let mut out = std::io::stdout().lock();
    out.write_all(s.as_bytes())?;
    out.flush()?;
    Ok(())
}

/// Exit status: 0 on success, 1 when a verification fails, 2 on usage,
/// parse or precondition errors.
fn execute(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Bound { state, rotate } => write_stdout(&bound(&state, &rotate)?)?,
        Command::Sweep {
            family,
            start,
            stop,
            steps,
            bounds,
            rotate,
            out,
        } => {
            let csv = run_sweep(&SweepSpec {
                family,
                start,
                stop,
                steps,
                bounds,
                rotations: rotate,
            })?;
            match out {
                Some(path) => std::fs::write(&path, csv).with_context(|| format!("writing {}", path.display()))?,
                None => write_stdout(&csv)?,
            }
        }
        Command::Simulate {
            state,
            n,
            delta,
            eps,
            seed,
            workers,
            typical_eps,
            alpha,
        } => {
            let psi = state.source()?.load()?;
            let mut config = ProtocolConfig::new(n as usize, delta, eps, seed);
            config.workers = workers;
            config.typical_eps = typical_eps;
            config.alpha = alpha;
            write_stdout(&run_protocol(&psi, &config)?.to_string())?;
        }
        Command::Subrank { state, power } => write_stdout(&subrank(&state, power)?)?,
        Command::Verify {
            lemma,
            trials,
            seed,
            plant,
        } => {
            let summary = verify(&lemma, trials, seed, plant)?;
            write_stdout(&summary.render())?;
            if !summary.passed() {
                return Ok(1);
            }
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
