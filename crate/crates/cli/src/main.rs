use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;
use ostdigits::automata::{format, Dfao};
use ostdigits::numeration::{parse_digits, NumerationSystem};
use ostdigits::pipeline::{self, BetaLinkage, OutputDomain, PRESETS};
use ostdigits::qexact::{self, QuadraticIrrational};
use ostdigits_satmin::{self as satmin, Granularity, LadderConfig, SolverKind, Verification};

const USAGE: u8 = 1;
const MISMATCH: u8 = 2;
const SOLVER: u8 = 3;

#[derive(Parser)]
#[command(name = "ostdigits", version, about = "Digit automata for quadratic irrationals")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

/// α and base, either from a preset or given directly.
#[derive(Args, Clone)]
struct Target {
    /// Named configuration (see `presets`).
    #[arg(long, conflicts_with_all = ["alpha", "base"])]
    preset: Option<String>,
    /// α as text, e.g. "(1+sqrt(5))/2".
    #[arg(long)]
    alpha: Option<String>,
    #[arg(long)]
    base: Option<u32>,
    /// Numeration system; must agree with the one derived from α.
    #[arg(long)]
    system: Option<String>,
}

#[derive(Copy, Clone, ValueEnum)]
enum Domain {
    Live,
    Valid,
}

#[derive(Copy, Clone, ValueEnum)]
enum GranularityArg {
    Transitions,
    Automaton,
    WithBase,
}

#[derive(Subcommand)]
enum Cmd {
    /// Print α in base b to `count` places.
    Digits {
        alpha: String,
        base: u32,
        count: usize,
        /// Compute each digit by running the digit automaton on (b^n).
        #[arg(long)]
        via_automaton: bool,
    },
    /// Representation of a nonnegative integer.
    Encode {
        n: String,
        #[arg(long)]
        system: Option<String>,
        #[arg(long)]
        alpha: Option<String>,
    },
    /// Value of a representation.
    Decode {
        digits: String,
        #[arg(long)]
        system: Option<String>,
        #[arg(long)]
        alpha: Option<String>,
    },
    /// Build the minimal digit automaton and write it as text.
    Build {
        #[command(flatten)]
        target: Target,
        #[arg(long, short)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "live")]
        domain: Domain,
    },
    /// Run an automaton file on one input string.
    Run { automaton: PathBuf, input: String },
    /// Compare an automaton file with the digit oracle on (b^n), n < n-max.
    Verify {
        automaton: PathBuf,
        #[command(flatten)]
        target: Target,
        #[arg(long, default_value_t = 10_000)]
        n_max: u64,
    },
    /// SAT search for a minimal automaton.
    Satmin {
        #[command(flatten)]
        target: Target,
        /// Fix the state count (with --digits: a single cell).
        #[arg(long)]
        k: Option<usize>,
        /// Fix the digit set size.
        #[arg(long)]
        digits: Option<usize>,
        #[arg(long, default_value_t = 1)]
        k_min: usize,
        #[arg(long, default_value_t = 32)]
        k_max: usize,
        #[arg(long, default_value_t = 1)]
        digits_min: usize,
        #[arg(long, default_value_t = 400)]
        digits_max: usize,
        #[arg(long, default_value_t = 1)]
        step: usize,
        /// Enumerate all solutions once a verified one is found.
        #[arg(long)]
        enumerate: bool,
        /// Enumerate by growing the digit set on each wrong model instead of
        /// listing every solution.
        #[arg(long)]
        refine: bool,
        #[arg(long, value_enum, default_value = "transitions")]
        granularity: GranularityArg,
        #[arg(long, default_value_t = 10_000)]
        n_verify: u64,
        /// `cadical`, `dpll`, or the path of a DIMACS solver executable.
        #[arg(long, default_value = "cadical")]
        solver: String,
        /// Write the dictionary of the final cell here.
        #[arg(long)]
        dict_out: Option<PathBuf>,
        /// Write the CNF of the final cell here.
        #[arg(long)]
        cnf_out: Option<PathBuf>,
        /// Write the verified candidates (text format) with this path prefix.
        #[arg(long)]
        candidates_out: Option<PathBuf>,
    },
    /// Graphviz rendering of an automaton file, or of the validity DFA of a
    /// numeration system.
    ExportDot {
        automaton: Option<PathBuf>,
        #[arg(long, conflicts_with = "automaton")]
        base_dfa: Option<String>,
    },
    /// List the named configurations.
    Presets,
}

struct Fail(u8, String);

impl<E: std::fmt::Display> From<E> for Fail {
    fn from(e: E) -> Self {
        Fail(USAGE, e.to_string())
    }
}

type Outcome = std::result::Result<(), Fail>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli.cmd) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Fail(code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}

fn dispatch(cmd: Cmd) -> Outcome {
    match cmd {
        Cmd::Digits { alpha, base, count, via_automaton } => digits(&alpha, base, count, via_automaton),
        Cmd::Encode { n, system, alpha } => {
            let sys = system_of(system.as_deref(), alpha.as_deref())?;
            let n: BigUint = n.parse().map_err(|_| Fail(USAGE, format!("`{n}` is not a nonnegative integer")))?;
            println!("{}", sys.encode(&n));
            Ok(())
        }
        Cmd::Decode { digits, system, alpha } => {
            let sys = system_of(system.as_deref(), alpha.as_deref())?;
            println!("{}", sys.decode(&parse_digits(&digits)?)?);
            Ok(())
        }
        Cmd::Build { target, out, domain } => {
            let (link, base) = resolve(&target)?;
            let domain = match domain {
                Domain::Live => OutputDomain::Live,
                Domain::Valid => OutputDomain::Valid,
            };
            let bundle = pipeline::build_digit_dfao_with(&link, base, domain)?;
            let text = format::to_text(&bundle.dfao);
            match out {
                Some(path) => std::fs::write(&path, text)?,
                None => print!("{text}"),
            }
            eprintln!("{} states ({}, base {base})", bundle.dfao.num_states(), link.system);
            Ok(())
        }
        Cmd::Run { automaton, input } => {
            let a = load(&automaton)?;
            let digits = parse_digits(&input)?;
            match a.run(&digits)? {
                Some(o) => {
                    println!("{o}");
                    Ok(())
                }
                None => Err(Fail(USAGE, format!("invalid representation `{input}`"))),
            }
        }
        Cmd::Verify { automaton, target, n_max } => {
            let a = load(&automaton)?;
            let (link, base) = resolve(&target)?;
            match satmin::verify_candidate(&a, &link, base, n_max) {
                Verification::Pass => {
                    println!("pass: {n_max} digits");
                    Ok(())
                }
                Verification::Fail { n, expected, got } => {
                    let got = got.map_or("no output".to_string(), |g| g.to_string());
                    println!("fail at n = {n}: expected {expected}, got {got}");
                    Err(Fail(MISMATCH, format!("automaton disagrees with the oracle at n = {n}")))
                }
            }
        }
        Cmd::Satmin {
            target,
            k,
            digits,
            k_min,
            k_max,
            digits_min,
            digits_max,
            step,
            enumerate,
            refine,
            granularity,
            n_verify,
            solver,
            dict_out,
            cnf_out,
            candidates_out,
        } => {
            let (link, base) = resolve(&target)?;
            let cfg = LadderConfig {
                k_start: k.unwrap_or(k_min),
                k_max: k.unwrap_or(k_max),
                digits_start: digits.unwrap_or(digits_min),
                digits_max: digits.unwrap_or(digits_max),
                step,
                n_verify,
                enumerate,
                refine,
                solver: match solver.as_str() {
                    "cadical" => SolverKind::Cadical,
                    "dpll" => SolverKind::Dpll,
                    path => SolverKind::External { path: path.into(), args: Vec::new() },
                },
                granularity: match granularity {
                    GranularityArg::Transitions => Granularity::Transitions,
                    GranularityArg::Automaton => Granularity::Automaton,
                    GranularityArg::WithBase => Granularity::WithBase,
                },
                ..LadderConfig::default()
            };
            satmin_cmd(&link, base, &cfg, k.is_some() && digits.is_some(), dict_out, cnf_out, candidates_out)
        }
        Cmd::ExportDot { automaton, base_dfa } => {
            match (automaton, base_dfa) {
                (Some(path), None) => print!("{}", format::to_dot(&load(&path)?, "")),
                (None, Some(sys)) => {
                    let sys: NumerationSystem = sys.parse()?;
                    print!("{}", format::to_dot(&sys.validity_dfa().to_dfao(), "B"));
                }
                _ => return Err(Fail(USAGE, "give an automaton file or --base-dfa SYSTEM".into())),
            }
            Ok(())
        }
        Cmd::Presets => {
            println!("{:<12} {:<18} {:>4} {:>7}  system", "name", "alpha", "base", "states");
            for p in PRESETS {
                let states = p.states.map_or("-".to_string(), |s| s.to_string());
                let sys = p.link().map(|l| l.system.to_string()).unwrap_or_else(|e| e.to_string());
                println!("{:<12} {:<18} {:>4} {:>7}  {sys}", p.name, p.alpha, p.base, states);
            }
            Ok(())
        }
    }
}

fn digits(alpha: &str, base: u32, count: usize, via_automaton: bool) -> Outcome {
    if base < 2 {
        return Err(Fail(USAGE, "base must be at least 2".into()));
    }
    let q: QuadraticIrrational = alpha.parse()?;
    let frac = if via_automaton {
        let link = pipeline::derive_beta(&q)?;
        let bundle = pipeline::build_digit_dfao(&link, base)?;
        pipeline::run_on_powers(&bundle.dfao, &link.system, base, count as u64)
            .into_iter()
            .enumerate()
            .map(|(n, d)| d.ok_or_else(|| Fail(MISMATCH, format!("automaton has no output at n = {n}"))))
            .collect::<Result<Vec<u32>, Fail>>()?
    } else {
        qexact::digits(&q, base, count)
    };
    let int = q.floor();
    let sign = if int.sign() == num_bigint::Sign::Minus { "-" } else { "" };
    let int_text = int.magnitude().to_str_radix(base);
    let frac_text: String = frac.iter().map(|&d| char::from_digit(d, 36).unwrap()).collect();
    println!("{sign}{int_text}.{frac_text}");
    Ok(())
}

fn system_of(system: Option<&str>, alpha: Option<&str>) -> std::result::Result<NumerationSystem, Fail> {
    match (system, alpha) {
        (Some(s), None) => Ok(s.parse()?),
        (None, Some(a)) => Ok(pipeline::derive_beta(&a.parse()?)?.system),
        _ => Err(Fail(USAGE, "give exactly one of --system and --alpha".into())),
    }
}

fn resolve(t: &Target) -> std::result::Result<(BetaLinkage, u32), Fail> {
    let (link, base) = match (&t.preset, &t.alpha, t.base) {
        (Some(name), None, None) => {
            let p = pipeline::preset(name).ok_or_else(|| Fail(USAGE, format!("unknown preset `{name}`")))?;
            (p.link()?, p.base)
        }
        (None, Some(alpha), Some(base)) => (pipeline::derive_beta(&alpha.parse()?)?, base),
        _ => return Err(Fail(USAGE, "give --preset, or --alpha with --base".into())),
    };
    if base < 2 {
        return Err(Fail(USAGE, "base must be at least 2".into()));
    }
    if let Some(s) = &t.system {
        let sys: NumerationSystem = s.parse()?;
        if sys != link.system {
            return Err(Fail(USAGE, format!("α uses {}, not {sys}", link.system)));
        }
    }
    Ok((link, base))
}

fn load(path: &PathBuf) -> std::result::Result<Dfao, Fail> {
    let text = std::fs::read_to_string(path).map_err(|e| Fail(USAGE, format!("{}: {e}", path.display())))?;
    Ok(format::from_text(&text)?)
}

fn satmin_cmd(
    link: &BetaLinkage,
    base: u32,
    cfg: &LadderConfig,
    single: bool,
    dict_out: Option<PathBuf>,
    cnf_out: Option<PathBuf>,
    candidates_out: Option<PathBuf>,
) -> Outcome {
    let solver_fail = |e: satmin::Error| match e {
        satmin::Error::Solver { .. } => Fail(SOLVER, e.to_string()),
        other => Fail(USAGE, other.to_string()),
    };
    let ledger = if single {
        let cell = satmin::run_cell(link, base, cfg.k_start, cfg.digits_start, cfg, cfg.enumerate).map_err(solver_fail)?;
        satmin::Ledger { rows: vec![cell.row], candidates: cell.candidates }
    } else {
        satmin::run_ladder(link, base, cfg).map_err(solver_fail)?
    };
    print!("{}", ledger.to_markdown());
    if let Some(last) = ledger.last() {
        if let Some(path) = dict_out {
            std::fs::write(path, satmin::build_dictionary(link, base, last.digit_set).to_text())?;
        }
        if let Some(path) = cnf_out {
            let cnf = satmin::instance(link, base, last.k, last.digit_set, &cfg.encode).map_err(solver_fail)?;
            std::fs::write(path, satmin::dimacs::to_dimacs(&cnf))?;
        }
    }
    if let Some(prefix) = candidates_out {
        for (i, c) in ledger.candidates.iter().enumerate() {
            let mut name = prefix.clone().into_os_string();
            name.push(format!("-{i}.txt"));
            std::fs::write(PathBuf::from(name), format::to_text(c))?;
        }
    }
    Ok(())
}
