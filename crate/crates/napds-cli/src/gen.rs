//! Benchmark instance generator: a token relay plus two grammar-driven
//! branches that rendezvous through the store.
//!
//! The slave template has one writer branch, one reader branch, and one
//! relay branch per chain position. The writer announces token 1 and
//! waits for token N; the reader consumes token 1 and produces token 2;
//! relays pass tokens 2 through N along. Once the chain completes, the
//! writer derives a word of its grammar on the stack, publishing each
//! terminal to the store and waiting for a `!` acknowledgement, then
//! publishes `f`; the reader derives a word of its own grammar,
//! consuming matching terminals and acknowledging each with `!`, then
//! waits for `f` and finally publishes `done`, which is the master's
//! target. The instance is solvable when the branches can agree on a
//! common word, using one slave copy per branch.

use std::fs;

use clap::Args;

use napds::cfg::{parse_grammar, Cfg, SymRef};
use napds::instance::parse_instance;
use napds::{Error, SymbolTable};

#[derive(Args)]
pub struct GenArgs {
    /// Relay chain length (at least 2).
    #[arg(long, default_value_t = 2)]
    chain: usize,
    /// Grammar file whose words the writer branch emits (default: S -> a).
    #[arg(long)]
    writes: Option<String>,
    /// Grammar file whose words the reader branch consumes (default: S -> a).
    #[arg(long)]
    reads: Option<String>,
}

const DEFAULT_GRAMMAR: &str = "S -> a\n";

fn load_grammar(path: &Option<String>) -> Result<(Cfg, SymbolTable), Error> {
    let text = match path {
        Some(p) => fs::read_to_string(p).map_err(|e| Error::Input(format!("{p}: {e}")))?,
        None => DEFAULT_GRAMMAR.to_owned(),
    };
    let mut table = SymbolTable::new();
    let g = parse_grammar(&text, &mut table)?;
    Ok((g, table))
}

/// Emits the grammar-simulation rules of one branch: `loop_st` expands
/// nonterminals on the stack; on a terminal it steps to `ack_st` with the
/// first action and pops back to `loop_st` with the second.
fn grammar_rules(
    out: &mut String,
    g: &Cfg,
    table: &SymbolTable,
    prefix: &str,
    loop_st: &str,
    ack_st: &str,
    on_terminal: impl Fn(&str) -> (String, String),
) {
    for p in &g.productions {
        let head = format!("{prefix}.{}", g.nt_names[p.head.0 as usize]);
        let body = if p.body.is_empty() {
            "eps".to_owned()
        } else {
            p.body
                .iter()
                .map(|s| match s {
                    SymRef::N(n) => format!("{prefix}.{}", g.nt_names[n.0 as usize]),
                    SymRef::T(t) => format!("{prefix}.{}", table.name(*t)),
                })
                .collect::<Vec<_>>()
                .join(" ")
        };
        out.push_str(&format!("  rule {loop_st} {head} -> {loop_st} {body}\n"));
    }
    for &t in &g.terminals {
        let name = table.name(t);
        let sym = format!("{prefix}.{name}");
        let (first, second) = on_terminal(name);
        out.push_str(&format!("  rule {loop_st} {sym} -> {ack_st} {sym} [{first}]\n"));
        out.push_str(&format!("  rule {ack_st} {sym} -> {loop_st} eps [{second}]\n"));
    }
}

pub fn cmd_gen(args: &GenArgs) -> Result<(), Error> {
    if args.chain < 2 {
        return Err(Error::Input("--chain must be at least 2".to_owned()));
    }
    let n = args.chain;
    let (gw, tw) = load_grammar(&args.writes)?;
    let (gr, tr) = load_grammar(&args.reads)?;

    // Store values: the idle token, the chain tokens, the grammar
    // terminals, the acknowledgement, and the two completion signals.
    let mut values: Vec<String> = vec!["0".to_owned()];
    for i in 1..=n {
        values.push(i.to_string());
    }
    let mut terminal_names: Vec<String> = Vec::new();
    for &t in &gw.terminals {
        terminal_names.push(tw.name(t).to_owned());
    }
    for &t in &gr.terminals {
        let name = tr.name(t).to_owned();
        if !terminal_names.contains(&name) {
            terminal_names.push(name);
        }
    }
    for t in &terminal_names {
        if values.contains(t) || t == "!" || t == "f" || t == "done" {
            return Err(Error::Input(format!(
                "grammar terminal `{t}` collides with a reserved store value"
            )));
        }
    }
    values.extend(terminal_names.iter().cloned());
    values.push("!".to_owned());
    values.push("f".to_owned());
    values.push("done".to_owned());

    let mut stack_syms: Vec<String> = Vec::new();
    for name in &gw.nt_names {
        stack_syms.push(format!("w.{name}"));
    }
    for &t in &gw.terminals {
        stack_syms.push(format!("w.{}", tw.name(t)));
    }
    for name in &gr.nt_names {
        let s = format!("r.{name}");
        if !stack_syms.contains(&s) {
            stack_syms.push(s);
        }
    }
    for &t in &gr.terminals {
        let s = format!("r.{}", tr.name(t));
        if !stack_syms.contains(&s) {
            stack_syms.push(s);
        }
    }

    let mut out = String::new();
    out.push_str(&format!("var g : {} init 0\n\n", values.join(" ")));
    out.push_str("process master\n");
    out.push_str("  initial: m0\n");
    out.push_str("  target: m1\n");
    out.push_str("  rule m0 $ -> m1 $ [read g=done]\n");
    out.push_str("end\n\n");

    out.push_str("process slave\n");
    out.push_str(&format!("  stack: {}\n", stack_syms.join(" ")));
    out.push_str("  initial: s0\n");

    // Writer branch: announce 1, await N, derive a word, publish f.
    out.push_str("  rule s0 $ -> w0 $ [write g=1]\n");
    out.push_str(&format!("  rule w0 $ -> w1 $ [read g={n}]\n"));
    out.push_str(&format!(
        "  rule w1 $ -> wg w.{} $\n",
        gw.nt_names[gw.start.0 as usize]
    ));
    grammar_rules(&mut out, &gw, &tw, "w", "wg", "wk", |t| {
        (format!("write g={t}"), "read g=!".to_owned())
    });
    out.push_str("  rule wg $ -> wend $ [write g=f]\n");

    // Reader branch: consume 1, produce 2, derive a word, then signal.
    out.push_str("  rule s0 $ -> r0 $ [read g=1]\n");
    out.push_str("  rule r0 $ -> r1 $ [write g=2]\n");
    out.push_str(&format!(
        "  rule r1 $ -> rg r.{} $\n",
        gr.nt_names[gr.start.0 as usize]
    ));
    grammar_rules(&mut out, &gr, &tr, "r", "rg", "rk", |t| {
        (format!("read g={t}"), "write g=!".to_owned())
    });
    out.push_str("  rule rg $ -> qf $ [read g=f]\n");
    out.push_str("  rule qf $ -> rend $ [write g=done]\n");

    // Relay branches: pass the token along.
    for i in 3..=n {
        out.push_str(&format!("  rule s0 $ -> y{i} $ [read g={}]\n", i - 1));
        out.push_str(&format!("  rule y{i} $ -> z{i} $ [write g={i}]\n"));
    }
    out.push_str("end\n");

    // The generator must only ever produce well-formed instances.
    parse_instance(&out).map_err(|e| {
        Error::Internal(format!("generated instance failed to parse: {e}"))
    })?;
    use std::io::Write;
    let _ = std::io::stdout().write_all(out.as_bytes());
    Ok(())
}
