//! The shipped example files stay parseable, print back to themselves,
//! and fit the default working limits.

mod common;

use napds::cfg::parse_grammar;
use napds::spines::er_nfa;
use napds::symbols::SymbolTable;
use napds::{check, format_instance, parse_instance, CheckResult, Engine, Limits};

#[test]
fn every_shipped_instance_parses_and_round_trips() {
    for (name, text) in common::INSTANCES {
        let inst = parse_instance(text).unwrap_or_else(|e| panic!("{name}: {e}"));
        let printed = format_instance(&inst);
        let again =
            parse_instance(&printed).unwrap_or_else(|e| panic!("{name} reprint: {e}"));
        assert_eq!(printed, format_instance(&again), "{name}: print not a fixpoint");
    }
}

#[test]
fn shipped_instances_decide_as_documented() {
    let limits = Limits::default();
    let expect = [
        ("handshake", true),
        ("handshake-missing-branch", false),
        ("ping", true),
        ("master-only", true),
        ("dead-read", false),
        ("stack-relay", true),
        ("two-flags", true),
        ("gate", true),
    ];
    for (name, reachable) in expect {
        let inst = parse_instance(instance(name)).unwrap();
        let got = check(&inst, Engine::Closure, &limits).unwrap();
        assert_eq!(
            matches!(got, CheckResult::Reachable(_)),
            reachable,
            "{name}: wrong verdict"
        );
    }
    assert_eq!(expect.len(), common::INSTANCES.len(), "corpus drifted");
}

#[test]
fn every_shipped_grammar_parses_and_fits_the_default_caps() {
    for (name, text) in common::GRAMMARS {
        let mut table = SymbolTable::new();
        let g = parse_grammar(text, &mut table).unwrap_or_else(|e| panic!("{name}: {e}"));
        let nfa = er_nfa(&g.to_cnf(), &mut table, &Limits::default())
            .unwrap_or_else(|e| panic!("{name}: {e}"));
        // Only the corpus entry named for it denotes the empty language.
        assert_eq!(nfa.is_empty(), *name == "empty", "{name}");
    }
}

fn instance(name: &str) -> &'static str {
    common::INSTANCES
        .iter()
        .find(|(n, _)| *n == name)
        .unwrap_or_else(|| panic!("no shipped instance named {name}"))
        .1
}
