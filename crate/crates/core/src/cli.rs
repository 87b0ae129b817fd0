//! Command-line interface. [`run`] takes its streams as arguments so it can
//! be driven in-process.
//!
//! Exit codes: 0 success or non-empty, 1 empty, 2 unknown, 64 usage errors,
//! 65 malformed input, 66 unreadable input, 74 output failures.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::barhillel::{intersect_naive, reduce};
use crate::forest::{ForestGrammar, Witness};
use crate::fsa::Fsa;
use crate::grammar::{skeleton_name, Grammar};
use crate::parser::{analyze, ParseError, Strategy, Verdict};
use crate::pcp::{x_chain, x_star, PcpInstance};

pub const EXIT_EMPTY: i32 = 1;
pub const EXIT_UNKNOWN: i32 = 2;
pub const EXIT_USAGE: i32 = 64;
pub const EXIT_DATA: i32 = 65;
pub const EXIT_NO_INPUT: i32 = 66;
pub const EXIT_IO: i32 = 74;

#[derive(Parser, Debug)]
#[command(name = "fsa-dcg", version, about = "Intersect automata with context-free and definite clause grammars")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Intersect a grammar with an automaton and print the parse forest.
    Intersect {
        grammar: PathBuf,
        fsa: PathBuf,
        #[arg(long, value_enum, default_value_t = Method::Parser)]
        method: Method,
        #[command(flatten)]
        opts: StrategyOpts,
        /// Keep only productive, reachable rules.
        #[arg(long)]
        reduce: bool,
        /// Write the forest here instead of standard output.
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Parse a sentence: intersect with the chain automaton of its tokens.
    Parse {
        grammar: PathBuf,
        tokens: Vec<String>,
        #[command(flatten)]
        opts: StrategyOpts,
        #[arg(long)]
        reduce: bool,
        /// Write the witness tree in DOT format here.
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Post correspondence instances: encode, solve, or solve through the
    /// grammar encoding.
    Pcp {
        /// Instance file, one `pair <a> <b>` per line.
        instance: PathBuf,
        /// Write the encoding grammar and automaton next to each other.
        #[arg(long, group = "mode")]
        encode_only: bool,
        /// Search for a solution directly.
        #[arg(long, group = "mode")]
        solve: bool,
        /// Search by intersecting the encoding with x-chains.
        #[arg(long, group = "mode")]
        via_intersection: bool,
        /// Largest number of pairs to try.
        #[arg(long, default_value_t = 4)]
        max: usize,
        /// With --via-intersection: use the threshold strategy on the loop
        /// automaton instead of chains.
        #[arg(long)]
        tau: Option<f64>,
        /// Loop weight for --tau.
        #[arg(long, default_value_t = 0.5)]
        weight: f64,
        /// Directory for --encode-only output.
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
    /// Report grammar properties.
    Check { grammar: PathBuf },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Method {
    Naive,
    Parser,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum StrategyName {
    /// cfg for context-free grammars, else acyclic or skeleton depending on
    /// the automaton.
    Auto,
    Cfg,
    Unrestricted,
    Acyclic,
    Threshold,
    Skeleton,
}

#[derive(clap::Args, Debug)]
struct StrategyOpts {
    #[arg(long, value_enum, default_value_t = StrategyName::Auto)]
    strategy: StrategyName,
    #[arg(long, default_value_t = 0.1)]
    tau: f64,
    #[arg(long, default_value_t = 10)]
    depth: usize,
}

impl StrategyOpts {
    fn resolve(&self, g: &Grammar, m: &Fsa) -> Strategy {
        match self.strategy {
            StrategyName::Auto if g.is_context_free() => Strategy::CfgExact,
            StrategyName::Auto if m.is_acyclic() => Strategy::AcyclicOnly,
            StrategyName::Auto => Strategy::Skeleton,
            StrategyName::Cfg => Strategy::CfgExact,
            StrategyName::Unrestricted => Strategy::Unrestricted { depth: self.depth },
            StrategyName::Acyclic => Strategy::AcyclicOnly,
            StrategyName::Threshold => Strategy::Threshold { tau: self.tau },
            StrategyName::Skeleton => Strategy::Skeleton,
        }
    }
}

struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn new(code: i32, message: impl Into<String>) -> Self {
        Failure {
            code,
            message: message.into(),
        }
    }
}

impl From<ParseError> for Failure {
    fn from(e: ParseError) -> Self {
        Failure::new(EXIT_USAGE, e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::new(EXIT_IO, e.to_string())
    }
}

type Outcome = Result<i32, Failure>;

/// Runs the CLI and returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(err, "{}", e.render());
                return EXIT_USAGE;
            }
            let _ = write!(out, "{}", e.render());
            return 0;
        }
    };
    match dispatch(cli.command, out, err) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path)
        .map_err(|e| Failure::new(EXIT_NO_INPUT, format!("{}: {e}", path.display())))
}

fn load<T: std::str::FromStr>(path: &Path) -> Result<T, Failure>
where
    T::Err: std::fmt::Display,
{
    read(path)?
        .parse()
        .map_err(|e: T::Err| Failure::new(EXIT_DATA, format!("{}: {e}", path.display())))
}

fn verdict_code(v: &Verdict) -> i32 {
    match v {
        Verdict::NonEmpty(_) => 0,
        Verdict::Empty => EXIT_EMPTY,
        Verdict::Unknown => EXIT_UNKNOWN,
    }
}

fn dispatch(command: Command, out: &mut dyn Write, err: &mut dyn Write) -> Outcome {
    match command {
        Command::Intersect {
            grammar,
            fsa,
            method,
            opts,
            reduce: do_reduce,
            out: out_path,
        } => {
            let g: Grammar = load(&grammar)?;
            let m: Fsa = load(&fsa)?;
            let (forest, verdict) = match method {
                Method::Naive => {
                    let forest = intersect_naive(&g, &m)
                        .map_err(|e| Failure::new(EXIT_USAGE, e.to_string()))?;
                    let verdict = if forest.is_empty() { "empty" } else { "non-empty" };
                    (forest, verdict.to_string())
                }
                Method::Parser => {
                    let strat = opts.resolve(&g, &m);
                    let a = analyze(&g, &m, strat)?;
                    writeln!(err, "strategy: {strat}")?;
                    (a.outcome.into_forest(), a.verdict.name().to_string())
                }
            };
            let forest = if do_reduce { reduce_forest(&forest)? } else { forest };
            match out_path {
                Some(p) => fs::write(&p, forest.to_string())?,
                None => write!(out, "{forest}")?,
            }
            writeln!(err, "verdict: {verdict}\nrules: {}", forest.rules().len())?;
            Ok(match verdict.as_str() {
                "non-empty" => 0,
                "empty" => EXIT_EMPTY,
                _ => EXIT_UNKNOWN,
            })
        }
        Command::Parse {
            grammar,
            tokens,
            opts,
            reduce: do_reduce,
            dot,
        } => {
            let g: Grammar = load(&grammar)?;
            let m = Fsa::from_string(&tokens);
            let strat = opts.resolve(&g, &m);
            let a = analyze(&g, &m, strat)?;
            let forest = a.outcome.forest();
            let forest = if do_reduce { reduce_forest(forest)? } else { forest.clone() };
            write!(out, "{forest}")?;
            if let Verdict::NonEmpty(tree) = &a.verdict {
                writeln!(out, "\ntree:")?;
                write!(out, "{}", tree.render())?;
                writeln!(out, "frontier: {}", tree.frontier().join(" "))?;
                if let Some(p) = dot {
                    fs::write(p, tree.to_dot())?;
                }
            }
            writeln!(err, "strategy: {strat}\nverdict: {}\nrules: {}", a.verdict.name(), forest.rules().len())?;
            Ok(verdict_code(&a.verdict))
        }
        Command::Pcp {
            instance,
            encode_only,
            solve,
            via_intersection,
            max,
            tau,
            weight,
            out_dir,
        } => {
            let p: PcpInstance = load(&instance)?;
            if encode_only {
                let stem = instance
                    .file_stem()
                    .map(|s| s.to_string_lossy().into_owned())
                    .unwrap_or_else(|| "pcp".into());
                let enc = p.encode();
                let gr = out_dir.join(format!("{stem}.gr"));
                let fa = out_dir.join(format!("{stem}.fsa"));
                fs::write(&gr, enc.grammar.to_string())?;
                fs::write(&fa, enc.fsa.to_string())?;
                writeln!(out, "{}\n{}", gr.display(), fa.display())?;
                return Ok(0);
            }
            if max == 0 {
                return Err(Failure::new(EXIT_USAGE, "--max must be at least 1"));
            }
            if via_intersection {
                return pcp_via_intersection(&p, max, tau, weight, out);
            }
            if !solve {
                return Err(Failure::new(
                    EXIT_USAGE,
                    "choose one of --encode-only, --solve, --via-intersection",
                ));
            }
            match p.solve_bounded(max) {
                Some(sol) => {
                    writeln!(out, "{sol}")?;
                    Ok(0)
                }
                None => {
                    writeln!(out, "no solution up to m={max}")?;
                    Ok(EXIT_EMPTY)
                }
            }
        }
        Command::Check { grammar } => {
            let g: Grammar = load(&grammar)?;
            let yes_no = |b: bool| if b { "yes" } else { "no" };
            let cats: Vec<String> = g
                .category_functors()
                .into_iter()
                .map(|(n, a)| skeleton_name(&crate::terms::Term::compound(n, vec![crate::terms::Term::var("_"); a])))
                .collect();
            writeln!(out, "rules: {}", g.rules.len())?;
            writeln!(out, "categories: {}", cats.join(" "))?;
            writeln!(out, "terminals: {}", g.terminals().into_iter().collect::<Vec<_>>().join(" "))?;
            writeln!(out, "context-free: {}", yes_no(g.is_context_free()))?;
            writeln!(out, "off-line parsable: {}", yes_no(g.offline_parsable()))?;
            if let Some(c) = g.unit_cycle() {
                writeln!(out, "unit cycle through: {c}")?;
            }
            Ok(0)
        }
    }
}

fn reduce_forest(f: &ForestGrammar) -> Result<ForestGrammar, Failure> {
    reduce(f).map_err(|e| Failure::new(EXIT_DATA, e.to_string()))
}

fn pcp_via_intersection(
    p: &PcpInstance,
    max: usize,
    tau: Option<f64>,
    weight: f64,
    out: &mut dyn Write,
) -> Outcome {
    let g = p.grammar();
    let report = |forest: &ForestGrammar, out: &mut dyn Write| -> Result<bool, Failure> {
        if let Witness::Found(tree) = forest.find_valid_tree() {
            if let Some(sol) = p.solution_from_tree(forest, &tree) {
                writeln!(out, "{sol}")?;
                return Ok(true);
            }
        }
        Ok(false)
    };
    if let Some(tau) = tau {
        if !(weight > 0.0 && weight <= 1.0) {
            return Err(Failure::new(EXIT_USAGE, "--weight must lie in (0,1]"));
        }
        let m = x_star(weight);
        let a = analyze(&g, &m, Strategy::Threshold { tau })?;
        if report(a.outcome.forest(), out)? {
            return Ok(0);
        }
        writeln!(out, "no solution found at threshold {tau}")?;
        return Ok(verdict_code(&a.verdict));
    }
    for m in 1..=max {
        let a = analyze(&g, &x_chain(m), Strategy::AcyclicOnly)?;
        if report(a.outcome.forest(), out)? {
            return Ok(0);
        }
    }
    writeln!(out, "no solution up to m={max}")?;
    Ok(EXIT_EMPTY)
}
