//! Command-line front end: propagate, solve, cross-check against the
//! brute-force oracle, benchmark both engines, or fill a crossword.
//!
//! Exit codes throughout: 0 for a stable/solved result, 1 for a failed,
//! unsatisfiable or diverging one, 2 for unusable input.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use clap::{Parser, Subcommand};

use arrayprop::crossword::{build_crossword, CrosswordSpec, Grid};
use arrayprop::generate::random_linear_model;
use arrayprop::model::CspModel;
use arrayprop::oracle;
use arrayprop::rules::ClosureOptions;
use arrayprop::solver::{propagate, solve, Engine, SearchOptions};
use arrayprop_cli::{json_report, parse_model_with, print_model, render_domains, render_solution, render_stats};

#[derive(Parser)]
#[command(name = "arrayprop", version, about = "Propagation and search for array constraints")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run propagation to a fixpoint and print the resulting domains.
    Propagate {
        file: PathBuf,
        /// Propagation engine: `naive` (rule worklist) or `arrac` (one-pass).
        #[arg(long, default_value = "arrac")]
        engine: String,
        /// Emit a machine-readable report instead of text.
        #[arg(long)]
        json: bool,
        /// Accept constraints in which a variable occurs more than once and
        /// propagate them position-wise.
        #[arg(long)]
        allow_nonlinear: bool,
        /// Shuffle the rule application order (naive engine only).
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Search for solutions with propagation at every node.
    Solve {
        file: PathBuf,
        #[arg(long, default_value = "arrac")]
        engine: String,
        /// Stop at the first solution (default).
        #[arg(long, conflicts_with = "all")]
        first: bool,
        /// Enumerate every solution.
        #[arg(long)]
        all: bool,
        /// Also print the propagation counters.
        #[arg(long)]
        stats: bool,
        #[arg(long)]
        allow_nonlinear: bool,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Compare both engines against the brute-force closure.
    Check {
        /// Model file to check; may be omitted with --random.
        file: Option<PathBuf>,
        /// Check this many generated instances instead of a file.
        #[arg(long)]
        random: Option<u64>,
        /// First seed for --random.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Time propagation with both engines on one model.
    Bench {
        file: PathBuf,
        /// Repetitions per engine; the median is reported.
        #[arg(long, default_value_t = 21)]
        repeat: usize,
        #[arg(long)]
        allow_nonlinear: bool,
    },
    /// Fill a crossword grid from a word list.
    Crossword {
        /// Grid file: one row per line, `.` open, `#` blocked.
        grid: PathBuf,
        /// Word file: one word per line.
        words: PathBuf,
        #[arg(long, default_value = "arrac")]
        engine: String,
        #[arg(long)]
        stats: bool,
        /// Print the generated constraint model instead of solving.
        #[arg(long)]
        emit_model: bool,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.cmd {
        Cmd::Propagate { file, engine, json, allow_nonlinear, seed } => {
            cmd_propagate(&file, &engine, json, allow_nonlinear, seed)
        }
        Cmd::Solve { file, engine, first: _, all, stats, allow_nonlinear, seed } => {
            cmd_solve(&file, &engine, all, stats, allow_nonlinear, seed)
        }
        Cmd::Check { file, random, seed } => cmd_check(file.as_deref(), random, seed),
        Cmd::Bench { file, repeat, allow_nonlinear } => {
            cmd_bench(&file, repeat, allow_nonlinear)
        }
        Cmd::Crossword { grid, words, engine, stats, emit_model } => {
            cmd_crossword(&grid, &words, &engine, stats, emit_model)
        }
    };
    ExitCode::from(code)
}

/// Reads and parses a model file; reports every problem to stderr.
fn load_model(file: &Path, allow_nonlinear: bool) -> Result<CspModel, u8> {
    let text = std::fs::read_to_string(file).map_err(|e| {
        eprintln!("{}: {}", file.display(), e);
        2u8
    })?;
    parse_model_with(&text, allow_nonlinear).map_err(|errors| {
        for e in &errors {
            eprintln!("{}: {}", file.display(), e);
        }
        2u8
    })
}

fn parse_engine(name: &str) -> Result<Engine, u8> {
    name.parse().map_err(|e: String| {
        eprintln!("{}", e);
        2u8
    })
}

fn search_options(engine: Engine, seed: Option<u64>) -> SearchOptions {
    SearchOptions {
        closure: ClosureOptions { order_seed: seed, ..Default::default() },
        ..SearchOptions::with_engine(engine)
    }
}

fn cmd_propagate(
    file: &Path,
    engine: &str,
    json: bool,
    allow_nonlinear: bool,
    seed: Option<u64>,
) -> u8 {
    let (m, engine) = match (load_model(file, allow_nonlinear), parse_engine(engine)) {
        (Ok(m), Ok(e)) => (m, e),
        _ => return 2,
    };
    let result = propagate(&m, &search_options(engine, seed));
    if json {
        println!("{}", json_report(&m, &result));
    } else {
        print!("{}", render_domains(&m, &result.table));
        println!("status: {}", if result.failed { "failed" } else { "stable" });
        print!("{}", render_stats(&result.stats));
    }
    u8::from(result.failed)
}

fn cmd_solve(
    file: &Path,
    engine: &str,
    all: bool,
    stats: bool,
    allow_nonlinear: bool,
    seed: Option<u64>,
) -> u8 {
    let (m, engine) = match (load_model(file, allow_nonlinear), parse_engine(engine)) {
        (Ok(m), Ok(e)) => (m, e),
        _ => return 2,
    };
    let opts = SearchOptions {
        limit: if all { None } else { Some(1) },
        ..search_options(engine, seed)
    };
    let result = solve(&m, &opts);
    for (i, sol) in result.solutions.iter().enumerate() {
        println!("solution {}: {}", i + 1, render_solution(&m, sol));
    }
    if result.solutions.is_empty() {
        println!("UNSAT");
    }
    println!("solutions: {}", result.solutions.len());
    println!("backtracks: {}", result.stats.backtracks);
    if stats {
        print!("{}", render_stats(&result.stats));
    }
    u8::from(result.solutions.is_empty())
}

/// Prints the variables on which the closures disagree; empty means pass.
fn closure_diff(m: &CspModel) -> Result<Vec<String>, String> {
    let naive = propagate(m, &search_options(Engine::Naive, None));
    let arrac = propagate(m, &SearchOptions::with_engine(Engine::Arrac));
    let exact = oracle::ac_closure_oracle(m, oracle::DEFAULT_LIMIT).map_err(|e| e.to_string())?;
    if naive.failed || arrac.failed {
        // a failed run stops early, so compare only the verdicts
        return if naive.failed && arrac.failed && exact.has_empty_domain() {
            Ok(Vec::new())
        } else {
            Err("engines and oracle disagree on failure".into())
        };
    }
    let mut diffs = Vec::new();
    for id in m.var_ids() {
        let (n, a, o) = (naive.table.get(id), arrac.table.get(id), exact.get(id));
        if n != a || a != o {
            diffs.push(format!(
                "{}: naive={} arrac={} oracle={}",
                m.var(id).name,
                n.display(m.interner()),
                a.display(m.interner()),
                o.display(m.interner())
            ));
        }
    }
    Ok(diffs)
}

fn cmd_check(file: Option<&Path>, random: Option<u64>, seed: u64) -> u8 {
    match (file, random) {
        (Some(file), None) => {
            let m = match load_model(file, false) {
                Ok(m) => m,
                Err(code) => return code,
            };
            match closure_diff(&m) {
                Ok(diffs) if diffs.is_empty() => {
                    println!("OK: closures agree on {} variables", m.var_count());
                    0
                }
                Ok(diffs) => {
                    for d in &diffs {
                        println!("{}", d);
                    }
                    1
                }
                Err(e) => {
                    eprintln!("{}", e);
                    1
                }
            }
        }
        (None, Some(count)) => {
            for i in 0..count {
                let m = random_linear_model(seed + i);
                match closure_diff(&m) {
                    Ok(diffs) if diffs.is_empty() => {}
                    Ok(diffs) => {
                        println!("seed {} diverges:", seed + i);
                        for d in &diffs {
                            println!("{}", d);
                        }
                        return 1;
                    }
                    Err(e) => {
                        eprintln!("seed {}: {}", seed + i, e);
                        return 1;
                    }
                }
            }
            println!("OK: {} random instances agree (seeds {}..{})", count, seed, seed + count);
            0
        }
        _ => {
            eprintln!("check needs a model file or --random N, not both");
            2
        }
    }
}

fn cmd_bench(file: &Path, repeat: usize, allow_nonlinear: bool) -> u8 {
    let m = match load_model(file, allow_nonlinear) {
        Ok(m) => m,
        Err(code) => return code,
    };
    let repeat = repeat.max(1);
    for engine in [Engine::Naive, Engine::Arrac] {
        let opts = SearchOptions::with_engine(engine);
        let sample = propagate(&m, &opts);
        let mut times: Vec<Duration> = (0..repeat)
            .map(|_| {
                let start = Instant::now();
                propagate(&m, &opts);
                start.elapsed()
            })
            .collect();
        times.sort();
        println!(
            "{}: median {:?}, cell_domain_reads {}, t_computations {}",
            engine.as_str(),
            times[times.len() / 2],
            sample.stats.cell_domain_reads,
            sample.stats.t_computations
        );
    }
    0
}

fn cmd_crossword(grid: &Path, words: &Path, engine: &str, stats: bool, emit_model: bool) -> u8 {
    let read = |path: &Path| {
        std::fs::read_to_string(path).map_err(|e| {
            eprintln!("{}: {}", path.display(), e);
            2u8
        })
    };
    let (grid_text, words_text) = match (read(grid), read(words)) {
        (Ok(g), Ok(w)) => (g, w),
        _ => return 2,
    };
    let engine = match parse_engine(engine) {
        Ok(e) => e,
        Err(code) => return code,
    };
    let parsed_grid = match Grid::parse(grid_text.trim_end()) {
        Ok(g) => g,
        Err(e) => {
            eprintln!("{}: {}", grid.display(), e);
            return 2;
        }
    };
    let spec = CrosswordSpec {
        grid: parsed_grid,
        words: words_text.lines().map(str::trim).filter(|w| !w.is_empty()).map(String::from).collect(),
    };
    let puzzle = match build_crossword(&spec) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("{}", e);
            return 2;
        }
    };
    if emit_model {
        print!("{}", print_model(&puzzle.model));
        return 0;
    }
    let opts = SearchOptions { limit: Some(1), ..SearchOptions::with_engine(engine) };
    let result = solve(&puzzle.model, &opts);
    match result.solutions.first() {
        Some(sol) => {
            println!("{}", puzzle.render(sol));
            if stats {
                println!("backtracks: {}", result.stats.backtracks);
                print!("{}", render_stats(&result.stats));
            }
            0
        }
        None => {
            println!("UNSAT");
            1
        }
    }
}
