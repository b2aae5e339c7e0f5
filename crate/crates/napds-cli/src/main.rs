//! Command-line front end: decide parameterised reachability, simulate
//! bounded instances, inspect read languages, run the spine-type engine
//! on a grammar, and generate benchmark instances.

use std::fs;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use napds::cfg::parse_grammar;
use napds::instance::{parse_instance, ParamInstance};
use napds::nfa::Nfa;
use napds::oracle;
use napds::product::{check, pair_read_nfas, store_pairs, CheckResult, Engine};
use napds::readlang::ReadAlphabet;
use napds::spines::er_nfa;
use napds::{Error, Limits, SymbolTable};

mod gen;

#[derive(Parser)]
#[command(
    name = "napds",
    version,
    about = "Parameterised reachability for pushdown networks with non-atomic shared-variable writes"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Decide whether any number of slave copies lets the master reach
    /// its target; print a validated witness if so.
    Check(CheckArgs),
    /// Explore the concrete semantics with a fixed number of slaves.
    Simulate(SimulateArgs),
    /// Print the per-(variable, value) read-language automata.
    Readlang(ReadlangArgs),
    /// Build the automaton of an upward-closed grammar by the spine-type
    /// construction.
    Er(ErArgs),
    /// Generate a relay-and-grammars benchmark instance.
    Gen(gen::GenArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum EngineArg {
    /// Minimal footprints and subword chains.
    Closure,
    /// Spine-type worklist over the closure grammar.
    Er,
}

impl From<EngineArg> for Engine {
    fn from(e: EngineArg) -> Engine {
        match e {
            EngineArg::Closure => Engine::Closure,
            EngineArg::Er => Engine::Er,
        }
    }
}

#[derive(Args)]
struct LimitArgs {
    /// Cap on automaton and saturation state counts.
    #[arg(long)]
    max_states: Option<usize>,
    /// Cap on the marked alphabet of the spine-type engine.
    #[arg(long)]
    max_types: Option<usize>,
    /// Cap on the minimal-footprint antichain size.
    #[arg(long)]
    max_antichain: Option<usize>,
}

impl LimitArgs {
    fn to_limits(&self) -> Limits {
        let mut l = Limits::default();
        if let Some(s) = self.max_states {
            l.det_states = s;
            l.er_states = s;
            l.saturation_transitions = s;
        }
        if let Some(t) = self.max_types {
            l.marked_alphabet = t;
        }
        if let Some(a) = self.max_antichain {
            l.antichain = a;
        }
        l
    }
}

#[derive(Args)]
struct CheckArgs {
    /// Instance file.
    file: String,
    /// Which regularization engine to use.
    #[arg(long, value_enum, default_value = "closure")]
    engine: EngineArg,
    #[command(flatten)]
    limits: LimitArgs,
}

#[derive(Args)]
struct SimulateArgs {
    /// Instance file.
    file: String,
    /// Number of slave copies.
    #[arg(long)]
    n: usize,
    /// Maximum number of interleaved steps.
    #[arg(long, default_value_t = 50)]
    depth: usize,
    /// Maximum stack height per process.
    #[arg(long, default_value_t = 64)]
    stack_bound: usize,
    /// Maximum number of distinct configurations.
    #[arg(long, default_value_t = 1_000_000)]
    max_configs: usize,
}

#[derive(Args)]
struct ReadlangArgs {
    /// Instance file.
    file: String,
    /// Which regularization engine to use.
    #[arg(long, value_enum, default_value = "closure")]
    engine: EngineArg,
    /// Only the automaton for this variable (requires --value).
    #[arg(long)]
    var: Option<String>,
    /// Only the automaton for this value (requires --var).
    #[arg(long)]
    value: Option<String>,
    /// Emit DOT digraphs instead of text.
    #[arg(long)]
    dot: bool,
    #[command(flatten)]
    limits: LimitArgs,
}

#[derive(Args)]
struct ErArgs {
    /// Grammar file: one `HEAD -> BODY...` production per line, `eps` for
    /// an empty body; the first head is the start symbol.
    file: String,
    /// Emit a DOT digraph instead of text.
    #[arg(long)]
    dot: bool,
    #[command(flatten)]
    limits: LimitArgs,
}

fn read_file(path: &str) -> Result<String, Error> {
    fs::read_to_string(path).map_err(|e| Error::Input(format!("{path}: {e}")))
}

fn load_instance(path: &str) -> Result<ParamInstance, Error> {
    parse_instance(&read_file(path)?).map_err(|e| match e {
        Error::Input(msg) => Error::Input(format!("{path}: {msg}")),
        other => other,
    })
}

/// Writes to stdout in one shot, ignoring write failures (e.g. a closed
/// pipe): the exit code carries the verdict either way.
fn emit(text: &str) {
    use std::io::Write;
    let _ = std::io::stdout().write_all(text.as_bytes());
}

fn push_trace(out: &mut String, steps: &[(usize, usize)]) {
    for (proc, rule) in steps {
        out.push_str(&format!("{proc} {rule}\n"));
    }
}

fn push_nfa_text(out: &mut String, nfa: &Nfa, table: &SymbolTable) {
    out.push_str(&format!("states: {}\n", nfa.state_count()));
    out.push_str(&format!("initial: {}\n", nfa.initial()));
    let finals: Vec<String> = (0..nfa.state_count())
        .filter(|&q| nfa.is_final(q))
        .map(|q| q.to_string())
        .collect();
    out.push_str(&format!("finals: {}\n", finals.join(" ")));
    for q in 0..nfa.state_count() {
        for &(sym, to) in nfa.edges_from(q) {
            out.push_str(&format!("{q} -{}-> {to}\n", table.name(sym)));
        }
    }
}

fn push_nfa_dot(out: &mut String, nfa: &Nfa, table: &SymbolTable, name: &str) {
    out.push_str(&format!("digraph \"{name}\" {{\n"));
    out.push_str("  rankdir=LR;\n");
    out.push_str("  hidden [shape=point, style=invis];\n");
    for q in 0..nfa.state_count() {
        let shape = if nfa.is_final(q) {
            "doublecircle"
        } else {
            "circle"
        };
        out.push_str(&format!("  q{q} [shape={shape}, label=\"{q}\"];\n"));
    }
    out.push_str(&format!("  hidden -> q{};\n", nfa.initial()));
    for q in 0..nfa.state_count() {
        for &(sym, to) in nfa.edges_from(q) {
            out.push_str(&format!("  q{q} -> q{to} [label=\"{}\"];\n", table.name(sym)));
        }
    }
    out.push_str("}\n");
}

fn cmd_check(args: &CheckArgs) -> Result<(), Error> {
    let inst = load_instance(&args.file)?;
    let limits = args.limits.to_limits();
    let mut out = String::new();
    match check(&inst, args.engine.into(), &limits)? {
        CheckResult::Reachable(w) => {
            out.push_str(&format!("REACHABLE\nn: {}\n", w.n));
            push_trace(&mut out, &w.steps);
        }
        CheckResult::Unreachable => out.push_str("UNREACHABLE\n"),
    }
    emit(&out);
    Ok(())
}

fn cmd_simulate(args: &SimulateArgs) -> Result<(), Error> {
    let inst = load_instance(&args.file)?;
    let mut out = String::new();
    match oracle::simulate(&inst, args.n, args.depth, args.stack_bound, args.max_configs)? {
        oracle::SimOutcome::Reached { trace } => {
            out.push_str(&format!("REACHED\nn: {}\n", args.n));
            push_trace(&mut out, &trace);
        }
        oracle::SimOutcome::NotReached { exhausted } => {
            if exhausted {
                out.push_str("NOT REACHED (state space exhausted)\n");
            } else {
                out.push_str("NOT REACHED (depth bound hit)\n");
            }
        }
        oracle::SimOutcome::Inconclusive => {
            out.push_str("INCONCLUSIVE (configuration cap hit)\n")
        }
    }
    emit(&out);
    Ok(())
}

fn cmd_readlang(args: &ReadlangArgs) -> Result<(), Error> {
    if args.var.is_some() != args.value.is_some() {
        return Err(Error::Input(
            "--var and --value must be given together".to_owned(),
        ));
    }
    let inst = load_instance(&args.file)?;
    let limits = args.limits.to_limits();
    let mut table = inst.table.clone();
    let ra = ReadAlphabet::new(&inst.vars, &mut table);
    let nfas = pair_read_nfas(&inst, args.engine.into(), &mut table, &ra, &limits)?;
    let pairs = store_pairs(&inst.vars);
    let mut out = String::new();
    let mut printed = false;
    for (i, &(var, val)) in pairs.iter().enumerate() {
        let var_name = &inst.vars[var].name;
        let val_name = table.name(val).to_owned();
        if let (Some(v), Some(x)) = (&args.var, &args.value) {
            if v != var_name || *x != val_name {
                continue;
            }
        }
        let title = format!("{var_name}={val_name}");
        if args.dot {
            push_nfa_dot(&mut out, &nfas[i], &table, &title);
        } else {
            if printed {
                out.push('\n');
            }
            out.push_str(&format!("read language for {title}\n"));
            push_nfa_text(&mut out, &nfas[i], &table);
        }
        printed = true;
    }
    if !printed {
        return Err(Error::Input(
            "no (variable, value) pair matched the filter".to_owned(),
        ));
    }
    emit(&out);
    Ok(())
}

fn cmd_er(args: &ErArgs) -> Result<(), Error> {
    let text = read_file(&args.file)?;
    let mut table = SymbolTable::new();
    let g = parse_grammar(&text, &mut table)?.to_cnf();
    let limits = args.limits.to_limits();
    let nfa = er_nfa(&g, &mut table, &limits)?;
    let mut out = String::new();
    if args.dot {
        push_nfa_dot(&mut out, &nfa, &table, &args.file);
    } else {
        push_nfa_text(&mut out, &nfa, &table);
    }
    emit(&out);
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.cmd {
        Cmd::Check(a) => cmd_check(a),
        Cmd::Simulate(a) => cmd_simulate(a),
        Cmd::Readlang(a) => cmd_readlang(a),
        Cmd::Er(a) => cmd_er(a),
        Cmd::Gen(a) => gen::cmd_gen(a),
    };
    match result {
        Ok(()) => ExitCode::from(0),
        Err(e) => {
            eprintln!("error: {e}");
            let code = match e {
                Error::Input(_) | Error::Precondition(_) => 2,
                Error::Limit { .. } => 3,
                Error::Contract(_) | Error::Internal(_) => 1,
            };
            ExitCode::from(code)
        }
    }
}
