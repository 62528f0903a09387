//! Command-line front end: `run`, `generate`, `verify` and `dfa`.
//!
//! Exit codes: 0 on success, 1 on usage or configuration errors, 2 when a
//! correctness check fails.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use octobench_core::generator::{generate, GeneratorParams};
use octobench_core::harness::{parse_key_values, run_all, HarnessConfig};
use octobench_core::report::{csv_string, json_string, render_console};
use octobench_core::text::write_generated;
use octobench_core::verify::{run_verify, Fault, VerifyConfig};
use octobench_core::{DomainKind, Octagon, Zone};
use octobench_dfa::{builtins, run_source, ClosureChoice, DEFAULT_WIDEN_DELAY};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_CHECK_FAILED: i32 = 2;

/// Base-seed override used when neither a flag nor the config file sets one.
pub const SEED_ENV: &str = "OCTOBENCH_SEED";

#[derive(Parser, Debug)]
#[command(name = "octobench", version, about = "Benchmarks and checks octagon closure algorithms")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Time operations over an (n, density) grid and report the results.
    Run(RunArgs),
    /// Write one generated state in the text format.
    Generate(GenerateArgs),
    /// Run the correctness property suite without timing.
    Verify(VerifyArgs),
    /// Analyze a small program with octagons.
    Dfa(DfaArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Console,
}

#[derive(Args, Debug, Default)]
pub struct RunArgs {
    /// key=value file with the same keys as these flags; flags win
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Variable counts [default: 25,50,100]
    #[arg(long, value_name = "LIST")]
    pub ns: Option<String>,
    /// Densities as start:end:step, both ends inclusive [default: 0.1:0.9:0.1]
    #[arg(long, value_name = "RANGE")]
    pub densities: Option<String>,
    /// Base seed; falls back to OCTOBENCH_SEED [default: 42]
    #[arg(long)]
    pub seed: Option<u64>,
    /// Warmup iterations per cell [default: 3]
    #[arg(long)]
    pub warmup: Option<usize>,
    /// Measured iterations per cell [default: 5]
    #[arg(long)]
    pub iters: Option<usize>,
    /// Operations: close-full, inc-mine, inc-chawdhary, join, forget, widen [default: close-full]
    #[arg(long, value_name = "LIST")]
    pub ops: Option<String>,
    /// octagon or zone [default: octagon]
    #[arg(long)]
    pub domain: Option<String>,
    /// Run the correctness checks after every invocation [default: off]
    #[arg(long)]
    pub check: bool,
    /// Also compare incremental closures against full closure [default: off]
    #[arg(long)]
    pub check_incremental: bool,
    /// Invocations per timing sample [default: 1]
    #[arg(long)]
    pub batch: Option<usize>,
    /// Output format [default: console]
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Write the report here instead of stdout
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct GenerateArgs {
    /// Number of variables
    #[arg(long, default_value_t = 10)]
    pub n: usize,
    /// Fraction of variable pairs to relate
    #[arg(long, default_value_t = 0.5)]
    pub density: f64,
    /// Seed; falls back to OCTOBENCH_SEED [default: 42]
    #[arg(long)]
    pub seed: Option<u64>,
    /// octagon or zone
    #[arg(long, default_value = "octagon")]
    pub domain: String,
    /// Write the state here instead of stdout
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// Number of random instances
    #[arg(long, default_value_t = 100)]
    pub seeds: u64,
    /// Largest variable count; instances cycle through 2..=max-n
    #[arg(long, default_value_t = 8)]
    pub max_n: usize,
    /// Also check closure against integer-point enumeration (n <= 3)
    #[arg(long)]
    pub oracle: bool,
    /// Base seed; falls back to OCTOBENCH_SEED [default: 42]
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, hide = true)]
    pub inject_fault: Option<String>,
}

#[derive(Args, Debug)]
pub struct DfaArgs {
    /// Program file, or builtin:loop / builtin:fib
    #[arg(long, default_value = "builtin:loop")]
    pub program: String,
    /// close-full, inc-mine or inc-chawdhary
    #[arg(long, default_value = "close-full")]
    pub closure: String,
    /// Loop-head updates joined plainly before widening starts
    #[arg(long, default_value_t = DEFAULT_WIDEN_DELAY)]
    pub widen_delay: u64,
    /// Write a JSON report here
    #[arg(long, value_name = "PATH")]
    pub report: Option<PathBuf>,
}

/// Outcome of a subcommand: exit code plus what goes to stdout.
struct Done {
    code: i32,
    stdout: String,
}

fn usage(msg: impl std::fmt::Display) -> Result<Done, (i32, String)> {
    Err((EXIT_USAGE, msg.to_string()))
}

fn env_seed(env_seed: Option<&str>) -> Result<Option<u64>, (i32, String)> {
    match env_seed {
        None => Ok(None),
        Some(s) => s
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| (EXIT_USAGE, format!("{SEED_ENV}=`{s}` is not an unsigned integer"))),
    }
}

fn write_out(path: &Path, text: &str) -> Result<(), (i32, String)> {
    fs::write(path, text).map_err(|e| (EXIT_USAGE, format!("cannot write {}: {e}", path.display())))
}

/// Layers defaults, the config file and flags, in that order; the
/// environment seed applies only when neither layer set one.
pub fn build_run_config(args: &RunArgs, env: Option<&str>) -> Result<HarnessConfig, String> {
    let mut cfg = HarnessConfig::default();
    let mut seed_set = false;
    if let Some(path) = &args.config {
        let text = fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
        for (k, v) in parse_key_values(&text).map_err(|e| e.to_string())? {
            seed_set |= k == "seed";
            cfg.set(&k, &v).map_err(|e| format!("{}: {e}", path.display()))?;
        }
    }
    let flags: [(&str, Option<String>); 8] = [
        ("ns", args.ns.clone()),
        ("densities", args.densities.clone()),
        ("seed", args.seed.map(|s| s.to_string())),
        ("warmup", args.warmup.map(|s| s.to_string())),
        ("iters", args.iters.map(|s| s.to_string())),
        ("ops", args.ops.clone()),
        ("domain", args.domain.clone()),
        ("batch", args.batch.map(|s| s.to_string())),
    ];
    for (k, v) in flags {
        if let Some(v) = v {
            seed_set |= k == "seed";
            cfg.set(k, &v).map_err(|e| e.to_string())?;
        }
    }
    if args.check {
        cfg.checks_enabled = true;
    }
    if args.check_incremental {
        cfg.incremental_matches_full = true;
    }
    if !seed_set {
        if let Some(s) = env_seed(env).map_err(|e| e.1)? {
            cfg.base_seed = s;
        }
    }
    cfg.validate().map_err(|e| e.to_string())?;
    Ok(cfg)
}

fn cmd_run(args: &RunArgs, env: Option<&str>) -> Result<Done, (i32, String)> {
    let cfg = build_run_config(args, env).map_err(|e| (EXIT_USAGE, e))?;
    // fail on a bad output path before spending time on the grid
    if let Some(p) = &args.out {
        fs::OpenOptions::new()
            .create(true)
            .append(true)
            .open(p)
            .map_err(|e| (EXIT_USAGE, format!("cannot write {}: {e}", p.display())))?;
    }
    let report = run_all(&cfg).map_err(|e| (EXIT_USAGE, e.to_string()))?;
    let text = match args.format.unwrap_or(Format::Console) {
        Format::Csv => csv_string(&report),
        Format::Json => json_string(&report),
        Format::Console => render_console(&report),
    };
    let code = if report.any_failed() { EXIT_CHECK_FAILED } else { EXIT_OK };
    match &args.out {
        Some(p) => {
            write_out(p, &text)?;
            let (passed, failed) = report.check_totals();
            Ok(Done {
                code,
                stdout: format!("wrote {} ({} cells, checks {passed} passed, {failed} failed)\n", p.display(), report.cells.len()),
            })
        }
        None => Ok(Done { code, stdout: text }),
    }
}

fn cmd_generate(args: &GenerateArgs, env: Option<&str>) -> Result<Done, (i32, String)> {
    let seed = match args.seed {
        Some(s) => s,
        None => env_seed(env)?.unwrap_or(42),
    };
    let domain: DomainKind = match args.domain.parse() {
        Ok(d) => d,
        Err(e) => return usage(e),
    };
    let mut p = GeneratorParams::new(args.n, args.density, seed);
    p.domain = domain;
    let text = match domain {
        DomainKind::Octagon => generate::<Octagon>(&p).map(|g| write_generated(&g)),
        DomainKind::Zone => generate::<Zone>(&p).map(|g| write_generated(&g)),
    };
    let text = match text {
        Ok(t) => t,
        Err(e) => return usage(e),
    };
    match &args.out {
        Some(path) => {
            write_out(path, &text)?;
            Ok(Done {
                code: EXIT_OK,
                stdout: String::new(),
            })
        }
        None => Ok(Done { code: EXIT_OK, stdout: text }),
    }
}

fn cmd_verify(args: &VerifyArgs, env: Option<&str>) -> Result<Done, (i32, String)> {
    if args.max_n < 2 {
        return usage("--max-n must be at least 2");
    }
    let fault = match &args.inject_fault {
        Some(f) => Some(f.parse::<Fault>().map_err(|e| (EXIT_USAGE, e))?),
        None => None,
    };
    let cfg = VerifyConfig {
        seeds: args.seeds,
        max_n: args.max_n,
        oracle: args.oracle,
        fault,
        base_seed: match args.seed {
            Some(s) => s,
            None => env_seed(env)?.unwrap_or(42),
        },
    };
    let report = run_verify(&cfg);
    Ok(Done {
        code: if report.all_passed() { EXIT_OK } else { EXIT_CHECK_FAILED },
        stdout: report.render(),
    })
}

fn cmd_dfa(args: &DfaArgs) -> Result<Done, (i32, String)> {
    let choice: ClosureChoice = args.closure.parse().map_err(|e| (EXIT_USAGE, e))?;
    let (name, text) = match args.program.strip_prefix("builtin:") {
        Some(b) => match builtins::source(b) {
            Some(src) => (args.program.clone(), src.to_string()),
            None => return usage(format!("unknown built-in `{b}` (expected one of: {})", builtins::NAMES.join(", "))),
        },
        None => match fs::read_to_string(&args.program) {
            Ok(t) => (args.program.clone(), t),
            Err(e) => return usage(format!("cannot read {}: {e}", args.program)),
        },
    };
    let report = run_source(&name, &text, choice, args.widen_delay).map_err(|e| (EXIT_USAGE, format!("{name}:{e}")))?;
    if let Some(p) = &args.report {
        write_out(p, &report.json())?;
    }
    Ok(Done {
        code: EXIT_OK,
        stdout: report.render(),
    })
}

/// Parses `argv` (program name first) and runs the subcommand. `env_seed`
/// is the value of OCTOBENCH_SEED, if set.
pub fn run_cli<I, T>(argv: I, env_seed: Option<&str>, out: &mut impl Write, err: &mut impl Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code;
        }
    };
    let result = match &cli.command {
        Command::Run(a) => cmd_run(a, env_seed),
        Command::Generate(a) => cmd_generate(a, env_seed),
        Command::Verify(a) => cmd_verify(a, env_seed),
        Command::Dfa(a) => cmd_dfa(a),
    };
    match result {
        Ok(done) => {
            let _ = out.write_all(done.stdout.as_bytes());
            done.code
        }
        Err((code, msg)) => {
            let _ = writeln!(err, "error: {msg}");
            code
        }
    }
}
