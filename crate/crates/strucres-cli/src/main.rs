//! Command-line front end: runs one query against a logic program in any
//! of the five search modes, or hosts an interactive session. Results are
//! printed as plain bindings or as a single JSON object; the rewriting
//! tree behind an answer can be exported in DOT format.
//!
//! Exit codes: 0 answer, 1 no proof, 2 non-productive program rejected,
//! 3 budget exhausted, 64 usage error, 65 unreadable or malformed input.

use std::fs;
use std::io::{self, BufRead, IsTerminal, Write as _};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::error::ErrorKind;
use clap::{Parser, ValueEnum};
use serde_json::json;

use strucres::parser::{parse_program, parse_query};
use strucres::program::{GoalClause, Program, TypingFunction};
use strucres::rational::Resolved;
use strucres::reduction::productivity_check;
use strucres::rewtree::{build_rew, RewTree};
use strucres::search::{
    colp_solve_goal, implied_at_infinity, observe, s_refute_goal, sld_solve_goal, ColpOutcome,
    Evidence, ImpliedOutcome, ObserveOutcome, Refutation, SRefuteOutcome, SldOutcome,
};
use strucres::subst::Subst;
use strucres::term::{Term, Var};

const EXIT_OK: i32 = 0;
const EXIT_NO_PROOF: i32 = 1;
const EXIT_REJECTED: i32 = 2;
const EXIT_FUEL: i32 = 3;
const EXIT_USAGE: i32 = 64;
const EXIT_DATA: i32 = 65;

/// Structural resolution for logic programs: finite proofs, rational
/// answers to coinductive queries, and bounded observation of infinite
/// answers.
#[derive(Parser)]
#[command(name = "strucres", version)]
struct Cli {
    /// Logic program file.
    program: Option<PathBuf>,

    /// Query to run, e.g. "?- nats(X)."
    query: Option<String>,

    /// Search mode.
    #[arg(long, value_enum, default_value_t = Mode::Srew)]
    mode: Mode,

    /// Observation depth (required by the observe and implied modes).
    #[arg(long)]
    depth: Option<usize>,

    /// Step budget for search and productivity analysis.
    #[arg(long, default_value_t = 100_000)]
    fuel: usize,

    /// Print the result as a single JSON object.
    #[arg(long)]
    json: bool,

    /// Write the rewriting tree behind the result to FILE in DOT format.
    #[arg(long, value_name = "FILE")]
    dot: Option<PathBuf>,

    /// Start an interactive session instead of running a single query.
    #[arg(long)]
    repl: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    /// Plain clause resolution.
    Sld,
    /// Structural resolution: rewriting plus substitution steps.
    Srew,
    /// Coinductive proof search with loop detection.
    Colp,
    /// Observe a finite prefix of a possibly infinite answer.
    Observe,
    /// Check that the query is supported at the observed depth.
    Implied,
}

impl Mode {
    fn name(self) -> &'static str {
        match self {
            Mode::Sld => "sld",
            Mode::Srew => "srew",
            Mode::Colp => "colp",
            Mode::Observe => "observe",
            Mode::Implied => "implied",
        }
    }

    fn needs_depth(self) -> bool {
        matches!(self, Mode::Observe | Mode::Implied)
    }
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            std::process::exit(code);
        }
    };
    std::process::exit(run(cli));
}

fn run(cli: Cli) -> i32 {
    if cli.repl {
        if cli.query.is_some() {
            eprintln!("a query cannot be combined with --repl");
            return EXIT_USAGE;
        }
        return repl(cli);
    }
    let Some(path) = cli.program.clone() else {
        eprintln!("missing program file (pass --repl for an interactive session)");
        return EXIT_USAGE;
    };
    let Some(query_src) = cli.query.clone() else {
        eprintln!("missing query (pass --repl for an interactive session)");
        return EXIT_USAGE;
    };
    if cli.mode.needs_depth() && cli.depth.is_none() {
        eprintln!("--depth is required in {} mode", cli.mode.name());
        return EXIT_USAGE;
    }

    let (program, typing) = match load_program(&path) {
        Ok(loaded) => loaded,
        Err(message) => {
            eprintln!("error: {message}");
            return EXIT_DATA;
        }
    };
    let goal = match parse_query(&query_src) {
        Ok(goal) => goal,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_DATA;
        }
    };
    if cli.mode.needs_depth() && goal.body.len() != 1 {
        eprintln!("error: {} mode takes a single-atom query", cli.mode.name());
        return EXIT_DATA;
    }

    let (code, tree) =
        evaluate(&Arc::new(program), &typing, &goal, cli.mode, cli.depth, cli.fuel, cli.json);
    if let Some(dot_path) = &cli.dot {
        if let Err(e) = fs::write(dot_path, tree.to_dot()) {
            eprintln!("error: cannot write {}: {e}", dot_path.display());
            return EXIT_DATA;
        }
    }
    code
}

fn load_program(path: &Path) -> Result<(Program, TypingFunction), String> {
    let source = fs::read_to_string(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    let (program, typing, _) = parse_program(&source).map_err(|e| e.to_string())?;
    Ok((program, typing))
}

/// One result line per binding: `X = t`, with rational answers carrying
/// their full equation and a marker.
type AnswerEntry = (String, String, bool);

/// The reporting context for one evaluated query.
struct Report {
    json: bool,
    query: String,
    depth: Option<usize>,
}

impl Report {
    fn emit(&self, status: &str, entries: &[AnswerEntry], resolvents: usize) {
        let mut value = json!({
            "query": self.query,
            "status": status,
            "answer": entries
                .iter()
                .map(|(var, term, rational)| json!({
                    "var": var,
                    "term": term,
                    "rational": rational,
                }))
                .collect::<Vec<_>>(),
            "resolvents": resolvents,
        });
        if let Some(depth) = self.depth {
            value["depth"] = json!(depth);
        }
        println!("{value}");
    }

    fn answer(&self, entries: Vec<AnswerEntry>, resolvents: usize) -> i32 {
        if self.json {
            self.emit("answer", &entries, resolvents);
        } else if entries.is_empty() {
            println!("true");
        } else {
            for (var, term, rational) in &entries {
                if *rational {
                    println!("{term}  (rational)");
                } else {
                    println!("{var} = {term}");
                }
            }
        }
        EXIT_OK
    }

    fn no_proof(&self, line: &str) -> i32 {
        if self.json {
            self.emit("fail", &[], 0);
        } else {
            println!("{line}");
        }
        EXIT_NO_PROOF
    }

    fn rejected(&self, witness: &str) -> i32 {
        eprintln!("{witness}");
        if self.json {
            self.emit("rejected", &[], 0);
        } else {
            println!("rejected: non-productive");
        }
        EXIT_REJECTED
    }

    fn fuel_out(&self) -> i32 {
        if self.json {
            self.emit("fuel-out", &[], 0);
        } else {
            println!("fuel exhausted");
        }
        EXIT_FUEL
    }
}

/// Query variables in first-occurrence order across the goal's atoms.
fn goal_vars_in_order(goal: &GoalClause) -> Vec<Var> {
    let mut seen = Vec::new();
    for atom in &goal.body {
        for v in atom.vars_in_order() {
            if !seen.contains(&v) {
                seen.push(v);
            }
        }
    }
    seen
}

fn subst_entries(answer: &Subst, goal: &GoalClause) -> Vec<AnswerEntry> {
    let mut entries = Vec::new();
    for v in goal_vars_in_order(goal) {
        if let Some(t) = answer.get(&v) {
            entries.push((v.to_string(), t.to_string(), false));
        }
    }
    entries
}

/// Entries for a proof that bound no query variable: the values guessed
/// for clause-internal variables along the way.
fn resolvent_entries(resolvents: &[Subst]) -> Vec<AnswerEntry> {
    let mut acc = Subst::id();
    for theta in resolvents {
        acc = Subst::compose(theta, &acc);
    }
    acc.iter().map(|(v, t)| (v.to_string(), t.to_string(), false)).collect()
}

fn refutation_entries(r: &Refutation, goal: &GoalClause) -> Vec<AnswerEntry> {
    let entries = subst_entries(&r.answer, goal);
    if entries.is_empty() && !r.resolvents.is_empty() {
        return resolvent_entries(&r.resolvents);
    }
    entries
}

/// Replaces every remaining variable with the unobserved-part marker, for
/// displaying open stream bindings.
fn close_open_tail(t: &Term) -> Term {
    match t {
        Term::Var(_) => Term::diamond(),
        Term::App(f, args) => Term::App(f.clone(), args.iter().map(close_open_tail).collect()),
    }
}

fn describe_evidence(evidence: &Evidence) -> String {
    match evidence {
        Evidence::Refuted { answer } if answer.is_id() => "refuted".into(),
        Evidence::Refuted { answer } => format!("refuted with {answer}"),
        Evidence::Loop { answer } if answer.is_empty() => "loops".into(),
        Evidence::Loop { answer } => {
            let parts: Vec<String> = answer.iter().map(|(_, r)| r.to_string()).collect();
            format!("loops: {}", parts.join("; "))
        }
        Evidence::Observed { approximation, resolvents_used } => {
            format!("observed {approximation} ({resolvents_used} resolvents)")
        }
    }
}

/// Runs the query in the requested mode, prints the outcome, and returns
/// the exit code together with the rewriting tree behind the result (the
/// proof tree on success, the deepest explored tree on budget exhaustion,
/// and the initial tree otherwise).
fn evaluate(
    p: &Arc<Program>,
    ty: &TypingFunction,
    goal: &GoalClause,
    mode: Mode,
    depth: Option<usize>,
    fuel: usize,
    json: bool,
) -> (i32, RewTree) {
    let report = Report {
        json,
        query: goal.to_clause().to_string(),
        depth: if mode.needs_depth() { depth } else { None },
    };
    let initial = match build_rew(p, &goal.to_clause(), &Subst::id(), 2048) {
        Ok(tree) => tree,
        Err(e) => e.partial,
    };

    match mode {
        Mode::Sld => match sld_solve_goal(p, goal, fuel) {
            SldOutcome::Answer(answer) => {
                (report.answer(subst_entries(&answer, goal), 0), initial)
            }
            SldOutcome::Exhausted => (report.no_proof("no proof found"), initial),
            SldOutcome::FuelOut => (report.fuel_out(), initial),
        },
        Mode::Srew => match s_refute_goal(p, goal, fuel) {
            SRefuteOutcome::Refuted(r) => {
                let entries = refutation_entries(&r, goal);
                let code = report.answer(entries, r.resolvents.len());
                (code, r.final_tree)
            }
            SRefuteOutcome::Exhausted => (report.no_proof("no proof found"), initial),
            SRefuteOutcome::FuelOut(deepest) => {
                let tree = deepest.map(|t| *t).unwrap_or(initial);
                (report.fuel_out(), tree)
            }
        },
        Mode::Colp => match colp_solve_goal(p, goal, ty, fuel) {
            ColpOutcome::Refuted(r) => {
                let entries = refutation_entries(&r, goal);
                let code = report.answer(entries, r.resolvents.len());
                (code, r.final_tree)
            }
            ColpOutcome::Coinductive(ca) => {
                let entries = ca
                    .answer
                    .iter()
                    .map(|(v, resolved)| match resolved {
                        Resolved::Finite(t) => (v.to_string(), t.to_string(), false),
                        Resolved::Rational(r) => (v.to_string(), r.to_string(), true),
                    })
                    .collect();
                (report.answer(entries, ca.resolvents.len()), initial)
            }
            ColpOutcome::Fail => (report.no_proof("no proof found"), initial),
            ColpOutcome::NonProductiveRejected(w) => (report.rejected(&w.to_string()), initial),
            ColpOutcome::FuelOut => (report.fuel_out(), initial),
        },
        Mode::Observe => {
            let atom = &goal.body[0];
            match observe(p, atom, ty, depth.expect("validated by the caller"), fuel) {
                ObserveOutcome::Observed(o) => {
                    if o.bindings.is_empty() {
                        if json {
                            report.emit("answer", &[], o.resolvents_used);
                        } else {
                            println!("{}", o.approximation);
                        }
                        (EXIT_OK, initial)
                    } else {
                        let entries = o
                            .bindings
                            .iter()
                            .map(|(v, t)| {
                                (v.to_string(), close_open_tail(t).to_string(), false)
                            })
                            .collect();
                        (report.answer(entries, o.resolvents_used), initial)
                    }
                }
                ObserveOutcome::InductiveFailure(t) => {
                    (report.no_proof(&format!("no proof found: {t} is unprovable")), initial)
                }
                ObserveOutcome::NonProductiveRejected(w) => {
                    (report.rejected(&w.to_string()), initial)
                }
                ObserveOutcome::FuelOut => (report.fuel_out(), initial),
            }
        }
        Mode::Implied => {
            let atom = &goal.body[0];
            match implied_at_infinity(p, atom, ty, depth.expect("validated by the caller"), fuel)
            {
                ImpliedOutcome::Implied(w) => {
                    if json {
                        report.emit("answer", &[], w.rewrite_steps);
                    } else {
                        println!("implied");
                        for (atom, evidence) in &w.evidence {
                            println!("  {atom}: {}", describe_evidence(evidence));
                        }
                    }
                    (EXIT_OK, initial)
                }
                ImpliedOutcome::Fail(Some(t)) => {
                    (report.no_proof(&format!("not implied: no evidence for {t}")), initial)
                }
                ImpliedOutcome::Fail(None) => (report.no_proof("not implied"), initial),
            }
        }
    }
}

const COMMAND_HINT: &str =
    "commands: :load FILE, :mode MODE, :depth N, :fuel N, :productive, :dot FILE, :quit";

fn repl(cli: Cli) -> i32 {
    let mut loaded: Option<(Arc<Program>, TypingFunction)> = None;
    if let Some(path) = &cli.program {
        match load_program(path) {
            Ok((program, typing)) => loaded = Some((Arc::new(program), typing)),
            Err(message) => {
                eprintln!("error: {message}");
                return EXIT_DATA;
            }
        }
    }
    let mut mode = cli.mode;
    let mut depth = cli.depth;
    let mut fuel = cli.fuel;
    let mut last_tree: Option<RewTree> = None;

    let stdin = io::stdin();
    let interactive = stdin.is_terminal();
    loop {
        if interactive {
            print!("strucres> ");
            let _ = io::stdout().flush();
        }
        let mut line = String::new();
        match stdin.lock().read_line(&mut line) {
            Ok(0) => return EXIT_OK,
            Ok(_) => {}
            Err(e) => {
                eprintln!("error: {e}");
                return EXIT_OK;
            }
        }
        let line = line.trim();
        if line.is_empty() {
            continue;
        }

        if let Some(rest) = line.strip_prefix(':') {
            let (command, argument) = match rest.split_once(char::is_whitespace) {
                Some((c, a)) => (c, a.trim()),
                None => (rest, ""),
            };
            match command {
                "quit" => return EXIT_OK,
                "load" => {
                    if argument.is_empty() {
                        println!("usage: :load FILE");
                        continue;
                    }
                    match load_program(Path::new(argument)) {
                        Ok((program, typing)) => {
                            println!(
                                "loaded {} ({} clauses)",
                                argument,
                                program.clauses().len()
                            );
                            loaded = Some((Arc::new(program), typing));
                        }
                        Err(message) => println!("error: {message}"),
                    }
                }
                "mode" => {
                    if argument.is_empty() {
                        println!("mode: {}", mode.name());
                    } else {
                        match Mode::from_str(argument, true) {
                            Ok(m) => mode = m,
                            Err(_) => {
                                println!("unknown mode {argument} (sld, srew, colp, observe, implied)")
                            }
                        }
                    }
                }
                "depth" => match argument.parse::<usize>() {
                    Ok(n) => depth = Some(n),
                    Err(_) => println!("usage: :depth N"),
                },
                "fuel" => match argument.parse::<usize>() {
                    Ok(n) => fuel = n,
                    Err(_) => println!("usage: :fuel N"),
                },
                "productive" => match &loaded {
                    None => println!("no program loaded (use :load FILE)"),
                    Some((program, _)) => println!("{}", productivity_check(program, fuel)),
                },
                "dot" => {
                    if argument.is_empty() {
                        println!("usage: :dot FILE");
                        continue;
                    }
                    match &last_tree {
                        None => println!("no query has run yet"),
                        Some(tree) => match fs::write(argument, tree.to_dot()) {
                            Ok(()) => println!("wrote {argument}"),
                            Err(e) => println!("error: cannot write {argument}: {e}"),
                        },
                    }
                }
                _ => println!("unknown command; {COMMAND_HINT}"),
            }
            continue;
        }

        if line.starts_with("?-") {
            let Some((program, typing)) = &loaded else {
                println!("no program loaded (use :load FILE)");
                continue;
            };
            let goal = match parse_query(line) {
                Ok(goal) => goal,
                Err(e) => {
                    println!("error: {e}");
                    continue;
                }
            };
            if mode.needs_depth() {
                if depth.is_none() {
                    println!("no depth set (use :depth N)");
                    continue;
                }
                if goal.body.len() != 1 {
                    println!("error: {} mode takes a single-atom query", mode.name());
                    continue;
                }
            }
            let (_, tree) = evaluate(program, typing, &goal, mode, depth, fuel, cli.json);
            last_tree = Some(tree);
            continue;
        }

        println!("expected a query (?- ...) or a command; {COMMAND_HINT}");
    }
}
