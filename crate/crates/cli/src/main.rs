use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use wordlogic::automata::io::Format;
use wordlogic::counting::{
    minimize_rep, parse_relations, reps_equal_certified, verify_piecewise_formula, verify_relations, Counted,
    LinearRep,
};
use wordlogic::logic::{Binding, Compiler, Library, Quant};
use wordlogic::numeration::DigitOrder;
use wordlogic::oracle::{
    self, count_palindromes_in_prefix, distinct_property_factors, stable_maximal_palindromes, FactorStats,
    Property,
};
use wordlogic::sequences::BuiltinSequence;
use wordlogic::Error;

/// Decide first-order properties of automatic sequences.
#[derive(Parser)]
#[command(name = "wordlogic", version)]
struct Cli {
    /// Machine-readable output
    #[arg(long, global = true)]
    json: bool,
    /// Extra predicate definitions
    #[arg(short = 'P', long = "predicates", global = true, value_name = "FILE")]
    predicates: Vec<PathBuf>,
    /// Read representations least significant digit first
    #[arg(long, global = true)]
    lsd: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Seq {
    /// Sequence bound to `X` (thue-morse, rudin-shapiro, paperfolding,
    /// period-doubling, fibonacci, seq-a, seq-b)
    #[arg(short, long, default_value = "thue-morse")]
    sequence: BuiltinSequence,
    /// Further bindings, `SYMBOL=sequence`
    #[arg(long = "bind", value_name = "SYM=SEQ")]
    bind: Vec<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Decide a sentence
    Decide {
        #[command(flatten)]
        seq: Seq,
        sentence: String,
    },
    /// Values of the single free variable accepted by a formula
    AcceptSet {
        #[command(flatten)]
        seq: Seq,
        formula: String,
        #[arg(long, default_value_t = 64)]
        bound: u64,
    },
    /// Count factors of each length through a linear representation
    Count {
        #[command(flatten)]
        seq: Seq,
        /// closed, privileged or privileged-palindrome
        #[arg(required_unless_present = "formula")]
        property: Option<Counted>,
        /// Custom counting formula in `i` and `n`
        #[arg(long, conflicts_with = "property")]
        formula: Option<String>,
        /// Counted variable of a custom formula
        #[arg(long, default_value = "i")]
        var: String,
        #[arg(long, default_value_t = 0)]
        from: u64,
        #[arg(long, default_value_t = 15)]
        to: u64,
    },
    /// Write an automaton for a formula, or a sequence's automaton
    Export {
        #[command(flatten)]
        seq: Seq,
        formula: Option<String>,
        #[arg(long, default_value = "text")]
        format: Format,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Compare a compiled predicate `P(i,n)` with the oracle on i+n ≤ bound
    Crosscheck {
        #[command(flatten)]
        seq: Seq,
        predicate: String,
        #[arg(long, default_value_t = 128)]
        bound: u64,
    },
    /// Brute-force checks on explicit words and sequence prefixes
    Oracle {
        #[command(subcommand)]
        command: OracleCommand,
    },
    /// Linear representations
    Rep {
        #[command(subcommand)]
        command: RepCommand,
    },
}

#[derive(Subcommand)]
enum OracleCommand {
    /// Every property of one word
    Word { word: String },
    /// Distinct factors with a property, per length
    Factors {
        #[command(flatten)]
        seq: Seq,
        property: Property,
        #[arg(long, default_value_t = 16)]
        max_len: usize,
        /// Print the factors too
        #[arg(long)]
        list: bool,
    },
    /// Maximal palindromes up to a length
    Maxpal {
        #[command(flatten)]
        seq: Seq,
        #[arg(long, default_value_t = 32)]
        max_len: usize,
    },
    /// Distinct palindromes in a prefix
    Palcount {
        #[command(flatten)]
        seq: Seq,
        n: usize,
    },
}

#[derive(Subcommand)]
enum RepCommand {
    /// Build a counting representation
    Build {
        #[command(flatten)]
        seq: Seq,
        #[arg(required_unless_present = "formula")]
        property: Option<Counted>,
        #[arg(long, conflicts_with = "property")]
        formula: Option<String>,
        #[arg(long, default_value = "i")]
        var: String,
        #[arg(long)]
        minimize: bool,
    },
    /// Evaluate a representation on 0..=to
    Eval {
        file: PathBuf,
        #[arg(long, default_value_t = 15)]
        to: u64,
    },
    /// Minimize a representation
    Minimize { file: PathBuf },
    /// Decide whether two representations define the same sequence
    Equal { a: PathBuf, b: PathBuf },
    /// Check a file of recurrences numerically
    Verify {
        file: PathBuf,
        relations: PathBuf,
        #[arg(long, default_value_t = 2048)]
        bound: u64,
    },
    /// Check the piecewise closed form for closed-factor counts
    Piecewise {
        file: PathBuf,
        #[arg(long, default_value_t = 32768)]
        bound: u64,
    },
}

enum Failure {
    Usage(String),
    Internal(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::NotStabilized { .. } | Error::AlphabetMismatch(..) => Failure::Internal(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

type Outcome = Result<bool, Failure>;

struct Ctx {
    json: bool,
    order: DigitOrder,
    library: Library,
}

impl Ctx {
    fn compiler(&self) -> Compiler {
        Compiler::new(self.library.clone()).with_order(self.order)
    }

    fn emit(&self, value: serde_json::Value, text: impl FnOnce() -> String) {
        if self.json {
            say(&(serde_json::to_string_pretty(&value).expect("json value") + "\n"));
        } else {
            say(&(text() + "\n"));
        }
    }
}

/// Writes to stdout; a closed pipe is not an error.
fn say(text: &str) {
    use std::io::Write;
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
}

fn binding(seq: &Seq) -> Result<Binding, Failure> {
    let mut b = Binding::new(seq.sequence);
    for spec in &seq.bind {
        let (sym, name) = spec
            .split_once('=')
            .ok_or_else(|| Failure::Usage(format!("binding `{spec}` is not SYM=SEQ")))?;
        b = b.with(sym.trim(), name.trim().parse()?);
    }
    Ok(b)
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn load_rep(path: &Path) -> Result<LinearRep, Failure> {
    Ok(LinearRep::load(&read(path)?)?)
}

fn show_word(w: &[u32]) -> String {
    w.iter().map(|d| char::from_digit(*d, 36).unwrap_or('?')).collect()
}

fn counting_rep(
    ctx: &Ctx,
    seq: &Seq,
    property: Option<Counted>,
    formula: Option<&str>,
    var: &str,
) -> Result<LinearRep, Failure> {
    let text = match (property, formula) {
        (_, Some(f)) => f,
        (Some(p), None) => p.formula(),
        (None, None) => return Err(Failure::Usage("give a property or --formula".into())),
    };
    let compiled = ctx.compiler().compile_str(text, &binding(seq)?)?;
    Ok(LinearRep::from_compiled(&compiled, var)?)
}

fn decide(ctx: &Ctx, seq: &Seq, sentence: &str) -> Outcome {
    let d = ctx.compiler().decide_str(sentence, &binding(seq)?)?;
    let quant = d.quantifier.map(|q| match q {
        Quant::Exists => "exists",
        Quant::Forall => "forall",
    });
    ctx.emit(
        json!({"truth": d.truth, "quantifier": quant, "vars": d.vars, "example": d.example, "states": d.states}),
        || {
            let mut out = d.truth.to_string();
            if let Some(ex) = &d.example {
                let label = if d.truth { "witness" } else { "counterexample" };
                let parts: Vec<String> = d.vars.iter().zip(ex).map(|(v, x)| format!("{v}={x}")).collect();
                out += &format!("\n{label}: {}", parts.join(" "));
            }
            out
        },
    );
    Ok(d.truth)
}

fn accept_set(ctx: &Ctx, seq: &Seq, formula: &str, bound: u64) -> Outcome {
    let c = ctx.compiler().compile_str(formula, &binding(seq)?)?;
    if c.arity() != 1 {
        return Err(Failure::Usage(format!(
            "accept-set needs exactly one free variable, got {:?}",
            c.vars
        )));
    }
    let values: Vec<u64> = c.enumerate(bound).into_iter().map(|v| v[0]).collect();
    let states = c.dfa.num_states_without_sink();
    ctx.emit(
        json!({"var": c.vars[0], "system": c.system.to_string(), "states": states, "bound": bound, "values": values}),
        || {
            let vals: Vec<String> = values.iter().map(u64::to_string).collect();
            format!("{} states ({})\n{} <= {bound}: {}", states, c.system, c.vars[0], vals.join(","))
        },
    );
    Ok(true)
}

fn count(ctx: &Ctx, seq: &Seq, property: Option<Counted>, formula: Option<&str>, var: &str, from: u64, to: u64) -> Outcome {
    let rep = counting_rep(ctx, seq, property, formula, var)?;
    let table = rep.table(to);
    let values: Vec<String> = table[from.min(to + 1) as usize..].iter().map(|x| x.to_string()).collect();
    ctx.emit(json!({"from": from, "to": to, "dim": rep.dim(), "values": values}), || {
        values
            .iter()
            .enumerate()
            .map(|(k, v)| format!("{} {v}", from + k as u64))
            .collect::<Vec<_>>()
            .join("\n")
    });
    Ok(true)
}

fn export(ctx: &Ctx, seq: &Seq, formula: Option<&str>, format: Format, output: Option<&Path>) -> Outcome {
    let text = match formula {
        Some(f) => ctx.compiler().compile_str(f, &binding(seq)?)?.dfa.export(format),
        None => seq.sequence.dfao_for(ctx.order).export(format),
    };
    match output {
        Some(path) => std::fs::write(path, text)?,
        None => say(&text),
    }
    Ok(true)
}

fn crosscheck(ctx: &Ctx, seq: &Seq, predicate: &str, bound: u64) -> Outcome {
    let predicate = predicate.trim_start_matches('$');
    let report = oracle::crosscheck(&mut ctx.compiler(), seq.sequence, predicate, bound)?;
    let ok = report.mismatches.is_empty();
    ctx.emit(serde_json::to_value(&report).expect("plain data"), || {
        let mut out = format!(
            "{} {} i+n<={}: {} pairs, {} mismatches",
            report.sequence,
            report.predicate,
            report.bound,
            report.pairs,
            report.mismatches.len()
        );
        for m in report.mismatches.iter().take(10) {
            out += &format!("\n  i={} n={} engine={} oracle={}", m.i, m.n, m.engine, m.oracle);
        }
        out
    });
    Ok(ok)
}

fn oracle_cmd(ctx: &Ctx, cmd: &OracleCommand) -> Outcome {
    match cmd {
        OracleCommand::Word { word } => {
            let w: Vec<char> = word.chars().collect();
            let stats = FactorStats::of(&w);
            let props = json!({
                "palindrome": oracle::is_palindrome(&w),
                "closed": oracle::is_closed(&w),
                "privileged": oracle::is_privileged(&w),
                "property_p": oracle::has_property_p(&w),
                "rich": oracle::is_rich(&w),
                "rich_by_suffixes": oracle::is_rich_by_suffixes(&w),
                "trapezoidal": oracle::is_trapezoidal(&w),
                "trapezoidal_by_rk": oracle::is_trapezoidal_by_rk(&w),
                "balanced": oracle::is_balanced(&w),
                "balanced_coven_hedlund": oracle::is_balanced_coven_hedlund(&w),
                "palindromic_factors": oracle::palindromic_factors(&w).len(),
                "stats": stats,
            });
            ctx.emit(props.clone(), || {
                let obj = props.as_object().expect("object");
                obj.iter()
                    .filter(|(k, _)| *k != "stats")
                    .map(|(k, v)| format!("{k}: {v}"))
                    .chain([format!("R: {}  K: {}", stats.min_no_right_special, stats.shortest_unrepeated_suffix)])
                    .collect::<Vec<_>>()
                    .join("\n")
            });
            Ok(true)
        }
        OracleCommand::Factors {
            seq,
            property,
            max_len,
            list,
        } => {
            let r = distinct_property_factors(seq.sequence, *property, *max_len)?;
            let factors: Option<Vec<String>> = list.then(|| {
                oracle::stable_factors(seq.sequence, *max_len, oracle::DEFAULT_CAP)
                    .map(|s| {
                        s.by_len
                            .iter()
                            .flatten()
                            .filter(|f| property.holds(f))
                            .map(|f| show_word(f))
                            .collect()
                    })
                    .unwrap_or_default()
            });
            ctx.emit(json!({"result": r, "factors": factors}), || {
                let mut out = format!(
                    "{} {} factors of length <= {}: total {}, longest {}\nper length: {:?}",
                    seq.sequence.name(),
                    property,
                    max_len,
                    r.total,
                    r.longest.map_or("none".to_string(), |l| l.to_string()),
                    r.per_length
                );
                for f in factors.iter().flatten() {
                    out += &format!("\n{f}");
                }
                out
            });
            Ok(true)
        }
        OracleCommand::Maxpal { seq, max_len } => {
            let pals: Vec<String> = stable_maximal_palindromes(seq.sequence, *max_len)?
                .iter()
                .map(|p| show_word(p))
                .collect();
            ctx.emit(json!({"stable_under_doubling": true, "max_len": max_len, "palindromes": pals}), || {
                if pals.is_empty() {
                    "none".to_string()
                } else {
                    pals.join("\n")
                }
            });
            Ok(true)
        }
        OracleCommand::Palcount { seq, n } => {
            let c = count_palindromes_in_prefix(seq.sequence, *n);
            ctx.emit(json!({"n": n, "palindromes": c}), || c.to_string());
            Ok(true)
        }
    }
}

fn rep_cmd(ctx: &Ctx, cmd: &RepCommand) -> Outcome {
    let print_rep = |rep: &LinearRep| {
        if ctx.json {
            say(&(rep.to_json() + "\n"));
        } else {
            say(&rep.to_string());
        }
    };
    match cmd {
        RepCommand::Build {
            seq,
            property,
            formula,
            var,
            minimize,
        } => {
            let rep = counting_rep(ctx, seq, *property, formula.as_deref(), var)?;
            print_rep(&if *minimize { minimize_rep(&rep) } else { rep });
            Ok(true)
        }
        RepCommand::Eval { file, to } => {
            let rep = load_rep(file)?;
            let values: Vec<String> = rep.table(*to).iter().map(|x| x.to_string()).collect();
            ctx.emit(json!({"values": values}), || values.join(","));
            Ok(true)
        }
        RepCommand::Minimize { file } => {
            print_rep(&minimize_rep(&load_rep(file)?));
            Ok(true)
        }
        RepCommand::Equal { a, b } => {
            let (a, b) = (load_rep(a)?, load_rep(b)?);
            let (equal, searched) = reps_equal_certified(&a, &b);
            ctx.emit(json!({"equal": equal, "dimension_searched": searched}), || equal.to_string());
            Ok(equal)
        }
        RepCommand::Verify { file, relations, bound } => {
            let rep = load_rep(file)?;
            let rels = parse_relations(&read(relations)?)?;
            let checks = verify_relations(&rels, &rep, *bound);
            let ok = checks.iter().all(|c| c.holds);
            ctx.emit(serde_json::to_value(&checks).expect("plain data"), || {
                checks
                    .iter()
                    .map(|c| match &c.failure {
                        None => format!("ok    {}", c.relation),
                        Some(f) => format!("FAIL  {}  (n={}: {} vs {})", c.relation, f.n, f.lhs, f.rhs),
                    })
                    .collect::<Vec<_>>()
                    .join("\n")
            });
            Ok(ok)
        }
        RepCommand::Piecewise { file, bound } => {
            let rep = load_rep(file)?;
            let check = verify_piecewise_formula(&rep, *bound);
            ctx.emit(serde_json::to_value(&check).expect("plain data"), || {
                format!(
                    "checked {} lengths: {} failures, {} uncovered",
                    check.checked,
                    check.failures.len(),
                    check.coverage.len()
                )
            });
            Ok(check.holds())
        }
    }
}

fn run(cli: &Cli) -> Outcome {
    let mut library = Library::stdlib();
    for p in &cli.predicates {
        library.extend(&read(p)?)?;
    }
    let ctx = Ctx {
        json: cli.json,
        order: if cli.lsd { DigitOrder::Lsd } else { DigitOrder::Msd },
        library,
    };
    match &cli.command {
        Command::Decide { seq, sentence } => decide(&ctx, seq, sentence),
        Command::AcceptSet { seq, formula, bound } => accept_set(&ctx, seq, formula, *bound),
        Command::Count {
            seq,
            property,
            formula,
            var,
            from,
            to,
        } => count(&ctx, seq, *property, formula.as_deref(), var, *from, *to),
        Command::Export {
            seq,
            formula,
            format,
            output,
        } => export(&ctx, seq, formula.as_deref(), *format, output.as_deref()),
        Command::Crosscheck { seq, predicate, bound } => crosscheck(&ctx, seq, predicate, *bound),
        Command::Oracle { command } => oracle_cmd(&ctx, command),
        Command::Rep { command } => rep_cmd(&ctx, command),
    }
}

#[derive(Serialize)]
struct ErrorReport<'a> {
    error: &'a str,
    kind: &'a str,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(f) => {
            let (kind, msg, code) = match &f {
                Failure::Usage(m) => ("usage", m, 2),
                Failure::Internal(m) => ("internal", m, 3),
            };
            if cli.json {
                let e = ErrorReport { error: msg, kind };
                say(&(serde_json::to_string(&e).expect("plain data") + "\n"));
            } else {
                eprintln!("error: {msg}");
            }
            ExitCode::from(code)
        }
    }
}
