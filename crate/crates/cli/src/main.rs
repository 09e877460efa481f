use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use clap::{Parser, ValueEnum};

use treedepth::construct::{solve_deterministic_with, DeterministicConfig};
use treedepth::counting::{count_elim_forests_with, EngineOptions};
use treedepth::graph::{dfs_elimination_forest, BodlaenderConfig, Graph};
use treedepth::linear::{solve_randomized, LinearConfig};
use treedepth::oracle::{brute_td, clique, cycle, path, random_tree, star};
use treedepth::pace::{emit_pace_forest, parse_pace_forest, parse_pace_graph};
use treedepth::polyring::PrimeSamplerConfig;
use treedepth::{validate_elimination_forest, CoefficientRing, Outcome};

const FEASIBLE: u8 = 0;
const INFEASIBLE: u8 = 1;
const IO_ERROR: u8 = 2;
const SOLVER_ERROR: u8 = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Mode {
    Deterministic,
    Randomized,
}

/// Exact treedepth for graphs in the PACE 2020 `tdp` format.
#[derive(Parser, Debug)]
#[command(name = "treedepth", version)]
struct Args {
    /// Input graph; stdin when omitted.
    input: Option<PathBuf>,

    /// Depth budget d.
    #[arg(long, short = 'd')]
    max_depth: Option<usize>,

    /// Search d = 1, 2, ... and report the first feasible depth.
    #[arg(long, conflicts_with = "max_depth")]
    optimize: bool,

    #[arg(long, value_enum, default_value_t = Mode::Deterministic)]
    mode: Mode,

    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Print the number of depth-d elimination forests sensible for a DFS forest.
    #[arg(long)]
    count_only: bool,

    /// Check a PACE forest file against the graph.
    #[arg(long, value_name = "FOREST")]
    validate: Option<PathBuf>,

    /// Brute-force treedepth (at most 20 vertices).
    #[arg(long)]
    oracle: bool,

    /// Time a generated family instead of reading a graph, e.g. `path:1024`.
    #[arg(long, value_name = "FAMILY:N")]
    bench: Option<String>,

    /// Error exponent of the prime interval bound.
    #[arg(long = "const-C")]
    const_c: Option<f64>,

    /// Colors per coloring.
    #[arg(long = "const-B")]
    const_b: Option<usize>,

    /// Fraction constant of the contraction step.
    #[arg(long = "const-bod")]
    const_bod: Option<f64>,

    /// With --count-only, recount with the reference engine at full degree
    /// cap and compare.
    #[arg(long)]
    trunc_check: bool,

    #[arg(long, default_value_t = 1)]
    threads: usize,

    /// Give up after this many seconds (exit code 3).
    #[arg(long)]
    timeout: Option<f64>,
}

enum Failure {
    Io(String),
    Solver(String),
}

impl Failure {
    fn report(self) -> ExitCode {
        match self {
            Failure::Io(msg) => {
                eprintln!("error: {msg}");
                ExitCode::from(IO_ERROR)
            }
            Failure::Solver(msg) => {
                eprintln!("solver error: {msg}");
                ExitCode::from(SOLVER_ERROR)
            }
        }
    }
}

fn solver_err<E: std::fmt::Display>(e: E) -> Failure {
    Failure::Solver(e.to_string())
}

fn read_input(path: &Option<PathBuf>) -> Result<String, Failure> {
    let mut text = String::new();
    match path {
        Some(p) => {
            text = std::fs::read_to_string(p)
                .map_err(|e| Failure::Io(format!("{}: {e}", p.display())))?
        }
        None => {
            std::io::stdin()
                .read_to_string(&mut text)
                .map_err(|e| Failure::Io(format!("stdin: {e}")))?;
        }
    }
    Ok(text)
}

fn load_graph(args: &Args) -> Result<Graph, Failure> {
    let text = read_input(&args.input)?;
    parse_pace_graph(&text).map_err(|e| Failure::Io(e.to_string()))
}

fn linear_config(args: &Args) -> LinearConfig {
    let mut cfg = LinearConfig::with_seed(args.seed);
    cfg.deadline = args.timeout.map(Duration::from_secs_f64);
    if let Some(c) = args.const_c {
        cfg.prime = PrimeSamplerConfig {
            error_exponent: c,
            ..cfg.prime
        };
    }
    cfg.colors = args.const_b;
    cfg.bodlaender = BodlaenderConfig {
        fraction_constant: args.const_bod,
    };
    cfg
}

fn solve(args: &Args, g: &Graph, d: usize) -> Result<Outcome, Failure> {
    match args.mode {
        Mode::Deterministic => {
            let cfg = DeterministicConfig {
                threads: args.threads.max(1),
                deadline: args.timeout.map(Duration::from_secs_f64),
            };
            solve_deterministic_with(g, d, &cfg).map_err(solver_err)
        }
        Mode::Randomized => solve_randomized(g, d, &linear_config(args))
            .map(|(out, _)| out)
            .map_err(solver_err),
    }
}

fn caveat(args: &Args) {
    if args.mode == Mode::Randomized {
        eprintln!("note: randomized mode may report a false negative with small probability");
    }
}

fn run_solve(args: &Args, g: &Graph) -> Result<u8, Failure> {
    if args.optimize {
        for d in 0..=g.n() {
            if let Outcome::Feasible(f) = solve(args, g, d)? {
                print!("{}", emit_pace_forest(&f));
                return Ok(FEASIBLE);
            }
        }
        return Err(Failure::Solver("no depth up to n was accepted".into()));
    }
    let d = args
        .max_depth
        .ok_or_else(|| Failure::Io("one of --max-depth or --optimize is required".into()))?;
    match solve(args, g, d)? {
        Outcome::Feasible(f) => {
            print!("{}", emit_pace_forest(&f));
            Ok(FEASIBLE)
        }
        Outcome::Infeasible => {
            println!("td > {d}");
            caveat(args);
            Ok(INFEASIBLE)
        }
        Outcome::Timeout => Err(Failure::Solver("timed out".into())),
    }
}

fn run_count(args: &Args, g: &Graph) -> Result<u8, Failure> {
    let d = args.max_depth.unwrap_or(g.n());
    let t = dfs_elimination_forest(g);
    let ring = CoefficientRing::Exact;
    let c = count_elim_forests_with(g, &t, d, &ring, None, &EngineOptions::default())
        .map_err(solver_err)?;
    println!("{c}");
    if args.trunc_check {
        let full = EngineOptions::unpruned(Some(g.n() + 1));
        let r = count_elim_forests_with(g, &t, d, &ring, None, &full).map_err(solver_err)?;
        if r != c {
            return Err(Failure::Solver(format!("truncation check failed: {c} != {r}")));
        }
        eprintln!("truncation check: ok");
    }
    Ok(FEASIBLE)
}

fn run_validate(args: &Args, g: &Graph, forest: &PathBuf) -> Result<u8, Failure> {
    let text = std::fs::read_to_string(forest)
        .map_err(|e| Failure::Io(format!("{}: {e}", forest.display())))?;
    let f = parse_pace_forest(&text, g.n()).map_err(|e| Failure::Io(e.to_string()))?;
    let d = args.max_depth.unwrap_or(f.depth());
    if validate_elimination_forest(g, &f, d) {
        println!("valid");
        Ok(FEASIBLE)
    } else {
        println!("invalid");
        Ok(INFEASIBLE)
    }
}

fn run_oracle(args: &Args, g: &Graph) -> Result<u8, Failure> {
    let td = brute_td(g).map_err(solver_err)?;
    println!("{td}");
    Ok(match args.max_depth {
        Some(d) if td > d => INFEASIBLE,
        _ => FEASIBLE,
    })
}

fn bench_graph(target: &str, seed: u64) -> Result<Graph, Failure> {
    let (family, n) = target
        .split_once(':')
        .ok_or_else(|| Failure::Io(format!("expected FAMILY:N, got `{target}`")))?;
    let n: usize = n
        .parse()
        .map_err(|_| Failure::Io(format!("invalid size `{n}`")))?;
    Ok(match family {
        "path" => path(n),
        "cycle" => cycle(n),
        "star" => star(n.saturating_sub(1)),
        "clique" => clique(n),
        "tree" => random_tree(n, seed),
        _ => return Err(Failure::Io(format!("unknown family `{family}`"))),
    })
}

fn run_bench(args: &Args, target: &str) -> Result<u8, Failure> {
    let g = bench_graph(target, args.seed)?;
    let d = args
        .max_depth
        .ok_or_else(|| Failure::Io("--bench needs --max-depth".into()))?;
    let start = Instant::now();
    let out = solve(args, &g, d)?;
    let secs = start.elapsed().as_secs_f64();
    let result = match &out {
        Outcome::Feasible(f) => format!("feasible depth={}", f.depth()),
        Outcome::Infeasible => "infeasible".to_string(),
        Outcome::Timeout => "timeout".to_string(),
    };
    println!("{target} d={d} mode={:?} {result} seconds={secs:.6}", args.mode);
    Ok(if out.is_feasible() { FEASIBLE } else { INFEASIBLE })
}

fn run(args: &Args) -> Result<u8, Failure> {
    if let Some(target) = &args.bench {
        return run_bench(args, target);
    }
    let g = load_graph(args)?;
    if let Some(forest) = &args.validate {
        return run_validate(args, &g, forest);
    }
    if args.oracle {
        return run_oracle(args, &g);
    }
    if args.count_only {
        return run_count(args, &g);
    }
    run_solve(args, &g)
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run(&args) {
        Ok(code) => ExitCode::from(code),
        Err(f) => f.report(),
    }
}
