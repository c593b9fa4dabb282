use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use resproof::constructors::{refute_bin_op, refute_binphp_treelike, refute_by_search, refute_lop_unary, refute_op_unary};
use resproof::encoders::{encode_clique, encode_op, encode_php, encode_pi2, CliqueMode, OpVariant, PhpMode, Pi2Spec};
use resproof::experiments::{
    bound_calculator, brute_force_unsat, find_bottlenecks, survival_probability, xi, BottleneckMode, BoundKind, Family,
    Mode,
};
use resproof::formats::*;
use resproof::graphs::{check_extension_property, sample_graph};
use resproof::proofs::{check_branching_program, check_rule_proof, proof_stats, ProofStats};
use resproof::translators::{
    reduce_res_level, translate_binary_to_unary_functional, translate_tc_unary_to_binary, translate_unary_to_binary,
};
use resproof::{apply_to_formula, CnfFormula, Error, Literal, Term};

#[derive(Parser)]
#[command(name = "resproof", version, about = "Res(s) refutations for unary and binary CNF encodings")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Emit a formula family as DIMACS.
    Gen {
        /// clique-un, clique-bin, php-un, php-fun, php-bin, php-bin-canonical,
        /// op-un, lop-un, op-fun, op-bin, lop-bin-tc or pi2
        family: String,
        /// n k for cliques, m n for pigeons, n for orderings, <specfile> n for pi2
        params: Vec<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Exponent slack of the random clique graph.
        #[arg(long, default_value_t = 0.5)]
        epsilon: f64,
        /// Read the clique graph from a file instead of sampling it.
        #[arg(long)]
        graph: Option<PathBuf>,
        #[arg(short)]
        o: Option<PathBuf>,
    },
    /// Build an explicit refutation as a branching program.
    Refute {
        /// bin-op n, op-un n, lop-un n, binphp-tree m n, or search <cnf>
        constructor: String,
        params: Vec<String>,
        #[arg(short)]
        o: Option<PathBuf>,
    },
    /// Check a proof against a formula; exit 0 iff valid.
    Check {
        cnf: PathBuf,
        proof: PathBuf,
        /// Defaults to the proof file's header.
        #[arg(long, value_enum)]
        format: Option<Format>,
    },
    /// Translate a branching program.
    Translate {
        #[arg(value_enum)]
        kind: Translation,
        input: PathBuf,
        /// Formula the input refutes (u2b, b2uf, reduce).
        #[arg(long)]
        from: Option<PathBuf>,
        /// Target formula (u2b, b2uf).
        #[arg(long)]
        to: Option<PathBuf>,
        /// Values per group (tc-u2b, b2uf).
        #[arg(long)]
        n: Option<u32>,
        /// Covering-number bound (reduce).
        #[arg(long)]
        d: Option<usize>,
        #[arg(short)]
        o: Option<PathBuf>,
    },
    /// Print size, width, covering number, treelikeness and depth.
    Stats { proof: PathBuf },
    /// Apply a restriction file to a formula.
    Restrict {
        cnf: PathBuf,
        restriction: PathBuf,
        #[arg(short)]
        o: Option<PathBuf>,
    },
    /// Run an experiment and print report records.
    Experiment {
        #[command(subcommand)]
        kind: Experiment,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Rule,
    Bp,
}

#[derive(Clone, Copy, ValueEnum)]
enum Translation {
    U2b,
    TcU2b,
    B2uf,
    Reduce,
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyKind {
    Clique,
    Php,
}

#[derive(Subcommand)]
enum Experiment {
    /// Survival probability of a term under random restrictions.
    Survival {
        #[arg(long, value_enum)]
        family: FamilyKind,
        #[arg(long)]
        n: u32,
        /// Blocks (clique).
        #[arg(long, default_value_t = 2)]
        k: u32,
        /// Level (clique).
        #[arg(long, default_value_t = 1)]
        s: u32,
        /// Pigeons (php).
        #[arg(long, default_value_t = 2)]
        m: u32,
        /// Bits already fixed per pigeon (php).
        #[arg(long, default_value_t = 0)]
        t: u32,
        /// Bits fixed per pigeon by the restriction (php).
        #[arg(long, default_value_t = 1)]
        s_bits: u32,
        /// Signed DIMACS literals of the term, e.g. "1 -4"; empty for the
        /// trivially true term.
        #[arg(long, allow_hyphen_values = true, default_value = "")]
        term: String,
        /// Monte Carlo with this many trials instead of exact enumeration.
        #[arg(long)]
        trials: Option<u64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Records reaching a covering-number or pigeon-count threshold.
    Bottleneck {
        cnf: PathBuf,
        proof: PathBuf,
        #[arg(long)]
        threshold: usize,
        #[arg(long)]
        pigeons: bool,
    },
    /// Decide the transversal extension property of a sampled graph.
    Extension {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        k: u32,
        #[arg(long, default_value_t = 0.5)]
        epsilon: f64,
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        beta: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Evaluate a size bound (clique, php) or ξ(s).
    Bounds {
        #[arg(value_enum)]
        kind: BoundArg,
        #[arg(long, default_value_t = 16.0)]
        n: f64,
        #[arg(long, default_value_t = 3.0)]
        k: f64,
        #[arg(long, default_value_t = 1)]
        s: u32,
        #[arg(long, default_value_t = 0.0)]
        t: f64,
    },
    /// Decide unsatisfiability by enumeration (at most 24 variables).
    Unsat { cnf: PathBuf },
}

#[derive(Clone, Copy, ValueEnum)]
enum BoundArg {
    Clique,
    Php,
    Xi,
}

/// Exit status 1 is reserved for invalid proofs; everything else that
/// goes wrong is 2.
enum Failure {
    Invalid(String),
    Error(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        Failure::Error(e)
    }
}

type Res<T> = std::result::Result<T, Failure>;

fn read(path: &Path) -> Res<String> {
    fs::read_to_string(path).map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())).into())
}

fn emit(o: &Option<PathBuf>, text: &str) -> Res<()> {
    match o {
        Some(p) => fs::write(p, text).map_err(|e| Error::InvalidInput(format!("{}: {e}", p.display())).into()),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn arg<T: std::str::FromStr>(params: &[String], i: usize, what: &str) -> Res<T> {
    let s = params.get(i).ok_or_else(|| Error::Param(format!("missing parameter {what}")))?;
    s.parse().map_err(|_| Error::Param(format!("bad {what} '{s}'")).into())
}

fn cnf(path: &Path) -> Res<CnfFormula> {
    Ok(parse_dimacs(&read(path)?)?)
}

fn gen(family: &str, params: &[String], seed: u64, epsilon: f64, graph: &Option<PathBuf>) -> Res<CnfFormula> {
    let op = |v| -> Res<CnfFormula> { Ok(encode_op(arg(params, 0, "n")?, v)?) };
    let php = |mode| -> Res<CnfFormula> { Ok(encode_php(arg(params, 0, "m")?, arg(params, 1, "n")?, mode)?) };
    let clique = |mode| -> Res<CnfFormula> {
        let g = match graph {
            Some(p) => parse_graph(&read(p)?)?,
            None => sample_graph(arg(params, 0, "n")?, arg(params, 1, "k")?, epsilon, seed)?,
        };
        Ok(encode_clique(&g, mode))
    };
    match family {
        "clique-un" => clique(CliqueMode::Unary),
        "clique-bin" => clique(CliqueMode::Binary),
        "php-un" => php(PhpMode::Unary),
        "php-fun" => php(PhpMode::UnaryFunctional),
        "php-bin" => php(PhpMode::BinaryPairwise),
        "php-bin-canonical" => php(PhpMode::BinaryCanonical),
        "op-un" => op(OpVariant::OpUnary),
        "lop-un" => op(OpVariant::LopUnary),
        "op-fun" => op(OpVariant::OpUnaryFunctional),
        "op-bin" => op(OpVariant::OpBinary),
        "lop-bin-tc" => op(OpVariant::LopBinaryTc),
        "pi2" => {
            let path: PathBuf = arg(params, 0, "spec file")?;
            let spec: Pi2Spec = read(&path)?.parse()?;
            Ok(encode_pi2(&spec, arg(params, 1, "n")?)?)
        }
        other => Err(Error::Param(format!("unknown family '{other}'")).into()),
    }
}

fn refute(constructor: &str, params: &[String]) -> Res<String> {
    let n = || arg::<u32>(params, 0, "n");
    let bp = match constructor {
        "bin-op" => refute_bin_op(n()?)?,
        "op-un" => refute_op_unary(n()?)?,
        "lop-un" => refute_lop_unary(n()?)?,
        "binphp-tree" => refute_binphp_treelike(arg(params, 0, "m")?, arg(params, 1, "n")?)?,
        "search" => refute_by_search(&cnf(&arg::<PathBuf>(params, 0, "cnf file")?)?, &[])?,
        other => return Err(Error::Param(format!("unknown constructor '{other}'")).into()),
    };
    Ok(print_bp(&bp))
}

fn check(cnf_path: &Path, proof: &Path, format: Option<Format>) -> Res<()> {
    let f = cnf(cnf_path)?;
    let text = read(proof)?;
    let format = format.unwrap_or(if text.trim_start().starts_with("r ") { Format::Rule } else { Format::Bp });
    let verdict = match format {
        Format::Rule => check_rule_proof(&f, &parse_rule_proof(&text)?),
        Format::Bp => check_branching_program(&f, &parse_bp(&text)?),
    };
    verdict.map_err(|e| Failure::Invalid(e.to_string()))?;
    println!("valid");
    Ok(())
}

fn need<T: Clone>(x: &Option<T>, flag: &str) -> Res<T> {
    x.clone().ok_or_else(|| Error::Param(format!("--{flag} is required")).into())
}

fn translate(
    kind: Translation,
    input: &Path,
    from: &Option<PathBuf>,
    to: &Option<PathBuf>,
    n: Option<u32>,
    d: Option<usize>,
) -> Res<String> {
    let bp = parse_bp(&read(input)?)?;
    let out = match kind {
        Translation::U2b => translate_unary_to_binary(&bp, &cnf(&need(from, "from")?)?, &cnf(&need(to, "to")?)?)?,
        Translation::TcU2b => translate_tc_unary_to_binary(&bp, need(&n, "n")?)?,
        Translation::B2uf => translate_binary_to_unary_functional(
            &bp,
            &cnf(&need(from, "from")?)?,
            &cnf(&need(to, "to")?)?,
            need(&n, "n")?,
        )?,
        Translation::Reduce => reduce_res_level(&cnf(&need(from, "from")?)?, &bp, need(&d, "d")?)?,
    };
    Ok(print_bp(&out))
}

fn stats_line(s: &ProofStats) -> String {
    format!(
        "size={} max_width={} max_covering={} treelike={} depth={}",
        s.size, s.max_width, s.max_covering, s.treelike, s.depth
    )
}

fn stats(proof: &Path) -> Res<String> {
    let text = read(proof)?;
    let s = if text.trim_start().starts_with("r ") {
        proof_stats(&parse_rule_proof(&text)?)
    } else {
        proof_stats(&parse_bp(&text)?)
    };
    Ok(stats_line(&s))
}

fn experiment(kind: &Experiment) -> Res<String> {
    match *kind {
        Experiment::Survival { family, n, k, s, m, t, s_bits, ref term, trials, seed } => {
            let lits = term
                .split(|c: char| c == ',' || c.is_whitespace())
                .filter(|x| !x.is_empty())
                .map(|x| {
                    let v: i64 = x.parse().map_err(|_| Error::Param(format!("bad literal '{x}'")))?;
                    Literal::from_dimacs(v)
                })
                .collect::<resproof::Result<Vec<_>>>()?;
            let term = Term::new(lits).ok_or_else(|| Error::Param("term contains complementary literals".into()))?;
            let (fam, desc) = match family {
                FamilyKind::Clique => (Family::Clique { n, k, s }, format!("clique n={n} k={k} s={s}")),
                FamilyKind::Php => (Family::Php { m, n, t, s_bits }, format!("php m={m} n={n} t={t} s_bits={s_bits}")),
            };
            let mode = match trials {
                Some(trials) => Mode::MonteCarlo { trials, seed },
                None => Mode::Exact,
            };
            let r = survival_probability(&term, fam, mode)?;
            let mut line = format!("survival family={desc} term={term} p={} bound={} pass={}", r.probability, r.bound, r.pass);
            if let Some((a, b)) = r.exact {
                line += &format!(" exact={a}/{b}");
            }
            if let (Some(sigma), Some(seed)) = (r.sigma, r.seed) {
                line += &format!(" sigma={sigma} seed={seed}");
            }
            Ok(line)
        }
        Experiment::Bottleneck { ref cnf, ref proof, threshold, pigeons } => {
            let f = self::cnf(cnf)?;
            let bp = parse_bp(&read(proof)?)?;
            let mode = if pigeons { BottleneckMode::Pigeons } else { BottleneckMode::Covering };
            let nodes = find_bottlenecks(&f, &bp, mode, threshold)?;
            let ids: Vec<String> = nodes.iter().map(|i| i.to_string()).collect();
            Ok(format!("bottleneck threshold={threshold} count={} nodes={}", nodes.len(), ids.join(",")))
        }
        Experiment::Extension { n, k, epsilon, alpha, beta, seed } => {
            let g = sample_graph(n, k, epsilon, seed)?;
            match check_extension_property(&g, alpha, beta)? {
                None => Ok(format!("extension n={n} k={k} seed={seed} holds=true")),
                Some(c) => Ok(format!(
                    "extension n={n} k={k} seed={seed} holds=false u={:?} sigma={:?} block={}",
                    c.u, c.sigma, c.block
                )),
            }
        }
        Experiment::Bounds { kind, n, k, s, t } => match kind {
            BoundArg::Xi => Ok(format!("xi s={s} value={}", xi(s)?)),
            BoundArg::Clique => {
                let r = bound_calculator(BoundKind::Clique { n, k, s })?;
                Ok(format!("bound {} ln_bound={}", r.params, r.ln_bound))
            }
            BoundArg::Php => {
                let r = bound_calculator(BoundKind::Php { n, s, t })?;
                Ok(format!("bound {} ln_bound={}", r.params, r.ln_bound))
            }
        },
        Experiment::Unsat { ref cnf } => {
            let f = self::cnf(cnf)?;
            Ok(format!("unsat vars={} clauses={} result={}", f.num_vars, f.clauses.len(), brute_force_unsat(&f)?))
        }
    }
}

fn run(cli: Cli) -> Res<()> {
    match cli.cmd {
        Cmd::Gen { family, params, seed, epsilon, graph, o } => {
            emit(&o, &print_dimacs(&gen(&family, &params, seed, epsilon, &graph)?))
        }
        Cmd::Refute { constructor, params, o } => emit(&o, &refute(&constructor, &params)?),
        Cmd::Check { cnf, proof, format } => check(&cnf, &proof, format),
        Cmd::Translate { kind, input, from, to, n, d, o } => emit(&o, &translate(kind, &input, &from, &to, n, d)?),
        Cmd::Stats { proof } => emit(&None, &(stats(&proof)? + "\n")),
        Cmd::Restrict { cnf, restriction, o } => {
            let f = self::cnf(&cnf)?;
            let rho = parse_restriction(&read(&restriction)?)?;
            rho.validate()?;
            emit(&o, &print_dimacs(&apply_to_formula(&f, &rho)?))
        }
        Cmd::Experiment { kind } => emit(&None, &(experiment(&kind)? + "\n")),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Invalid(msg)) => {
            eprintln!("E_CHECK {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Error(e)) => {
            eprintln!("{} {e}", e.code());
            ExitCode::from(2)
        }
    }
}
