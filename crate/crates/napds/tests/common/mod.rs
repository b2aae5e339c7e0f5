//! Shared helpers for the integration suites: the shipped corpus,
//! brute-force reference oracles and seeded random generators. Everything
//! here is deliberately independent of the library's own algorithms: word
//! sets come from exhaustive enumeration, reachability from plain
//! breadth-first search over explicit configurations.

#![allow(dead_code)]

use std::collections::{BTreeSet, HashSet, VecDeque};
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use napds::cfg::{Cfg, NtId, Production, SymRef};
use napds::nfa::{Nfa, NfaBuilder};
use napds::pds::{Pds, PdsRule};
use napds::symbols::{Sym, SymbolTable};

/// Every shipped instance, by name.
pub const INSTANCES: &[(&str, &str)] = &[
    ("handshake", include_str!("../../../../instances/handshake.napds")),
    (
        "handshake-missing-branch",
        include_str!("../../../../instances/handshake-missing-branch.napds"),
    ),
    ("ping", include_str!("../../../../instances/ping.napds")),
    ("gate", include_str!("../../../../instances/gate.napds")),
    ("dead-read", include_str!("../../../../instances/dead-read.napds")),
    ("master-only", include_str!("../../../../instances/master-only.napds")),
    ("stack-relay", include_str!("../../../../instances/stack-relay.napds")),
    ("two-flags", include_str!("../../../../instances/two-flags.napds")),
];

/// Every shipped grammar, by name.
pub const GRAMMARS: &[(&str, &str)] = &[
    ("empty", include_str!("../../../../instances/grammars/empty.cfg")),
    ("one-star", include_str!("../../../../instances/grammars/one-star.cfg")),
    ("one-plus", include_str!("../../../../instances/grammars/one-plus.cfg")),
    ("two-star", include_str!("../../../../instances/grammars/two-star.cfg")),
    (
        "three-star",
        include_str!("../../../../instances/grammars/three-star.cfg"),
    ),
    (
        "at-least-two",
        include_str!("../../../../instances/grammars/at-least-two.cfg"),
    ),
];

/// Seeded generator so every suite is reproducible.
pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// All words over `alpha` of length at most `max_len`, shortest first.
pub fn words_over(alpha: &[Sym], max_len: usize) -> Vec<Vec<Sym>> {
    let mut out: Vec<Vec<Sym>> = vec![Vec::new()];
    let mut layer: Vec<Vec<Sym>> = vec![Vec::new()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &layer {
            for &a in alpha {
                let mut v = w.clone();
                v.push(a);
                next.push(v);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

/// Reference automaton for an upward-closed language given by its base
/// words: one chain per base word, every state carrying self-loops over
/// the full alphabet, all chains hanging off a shared initial state. An
/// empty base list gives the empty language; an empty base word makes the
/// initial state accepting.
pub fn upward_chain_nfa(base: &[Vec<Sym>], alpha: &[Sym]) -> Nfa {
    let mut b = NfaBuilder::new();
    for &s in alpha {
        b.include_symbol(s);
    }
    let init = b.add_state();
    for &s in alpha {
        b.add_edge(init, s, init);
    }
    b.set_initial(init);
    for w in base {
        if w.is_empty() {
            b.set_final(init);
            continue;
        }
        let mut cur = init;
        for &s in w {
            let next = b.add_state();
            for &t in alpha {
                b.add_edge(next, t, next);
            }
            b.add_edge(cur, s, next);
            cur = next;
        }
        b.set_final(cur);
    }
    b.build()
}

/// Enumerates the words of `g` up to `max_len` by exhaustive leftmost
/// expansion of sentential forms, pruning forms whose minimum possible
/// yield already exceeds the bound. Returns `None` when `max_forms`
/// distinct forms were not enough to drain the queue, i.e. the
/// enumeration is incomplete and must not be used as an oracle.
pub fn cfg_words_upto(g: &Cfg, max_len: usize, max_forms: usize) -> Option<BTreeSet<Vec<Sym>>> {
    // Shortest terminal yield per nonterminal; None = derives no word.
    let mut min_len: Vec<Option<usize>> = vec![None; g.nt_count()];
    loop {
        let mut changed = false;
        for p in &g.productions {
            let mut sum = Some(0usize);
            for s in &p.body {
                sum = match (sum, s) {
                    (None, _) => None,
                    (Some(acc), SymRef::T(_)) => Some(acc + 1),
                    (Some(acc), SymRef::N(n)) => min_len[n.0 as usize].map(|m| acc + m),
                };
            }
            if let Some(v) = sum {
                let entry = &mut min_len[p.head.0 as usize];
                if entry.is_none_or(|old| v < old) {
                    *entry = Some(v);
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    let weight = |form: &[SymRef]| -> Option<usize> {
        let mut sum = 0usize;
        for s in form {
            match s {
                SymRef::T(_) => sum += 1,
                SymRef::N(n) => sum += min_len[n.0 as usize]?,
            }
        }
        Some(sum)
    };

    let mut words = BTreeSet::new();
    let start = vec![SymRef::N(g.start)];
    if weight(&start).is_none_or(|w| w > max_len) {
        return Some(words);
    }
    let by_head = g.productions_by_head();
    let mut seen: HashSet<Vec<SymRef>> = HashSet::new();
    let mut queue: VecDeque<Vec<SymRef>> = VecDeque::new();
    seen.insert(start.clone());
    queue.push_back(start);
    while let Some(form) = queue.pop_front() {
        let nt_at = form.iter().position(|s| matches!(s, SymRef::N(_)));
        let Some(pos) = nt_at else {
            let word: Vec<Sym> = form
                .iter()
                .map(|s| match s {
                    SymRef::T(t) => *t,
                    SymRef::N(_) => unreachable!(),
                })
                .collect();
            words.insert(word);
            continue;
        };
        let SymRef::N(head) = form[pos] else {
            unreachable!()
        };
        for &pi in &by_head[head.0 as usize] {
            let mut next: Vec<SymRef> = Vec::with_capacity(form.len() + 2);
            next.extend_from_slice(&form[..pos]);
            next.extend_from_slice(&g.productions[pi].body);
            next.extend_from_slice(&form[pos + 1..]);
            if weight(&next).is_none_or(|w| w > max_len) {
                continue;
            }
            // A form much longer than any achievable word means a pile of
            // nullable nonterminals; such grammars generate unboundedly
            // many forms, so give up rather than eat memory getting to
            // the form cap.
            if next.len() > max_len + 40 {
                return None;
            }
            if seen.contains(&next) {
                continue;
            }
            if seen.len() >= max_forms {
                return None;
            }
            seen.insert(next.clone());
            queue.push_back(next);
        }
    }
    Some(words)
}

/// A random grammar over two fixed terminals, arbitrary shape: empty
/// bodies, unit chains, left/right recursion, useless symbols all occur.
pub fn random_grammar(r: &mut ChaCha8Rng, a: Sym, b: Sym) -> Cfg {
    let nts = r.gen_range(1..=4usize);
    let nprods = r.gen_range(1..=6usize);
    let mut productions = Vec::new();
    for _ in 0..nprods {
        let head = NtId(r.gen_range(0..nts) as u32);
        let len = r.gen_range(0..=2usize);
        let mut body = Vec::new();
        for _ in 0..len {
            body.push(match r.gen_range(0..4u32) {
                0 => SymRef::T(a),
                1 => SymRef::T(b),
                _ => SymRef::N(NtId(r.gen_range(0..nts) as u32)),
            });
        }
        productions.push(Production { head, body });
    }
    let mut terminals = vec![a, b];
    terminals.sort_unstable();
    Cfg {
        nt_names: (0..nts).map(|i| format!("N{i}")).collect(),
        terminals,
        productions,
        start: NtId(0),
        cnf: false,
        accepts_empty: false,
    }
}

/// A random small instance in text form: at most three controls per
/// process, at most one extra stack symbol, at most two variables with at
/// most three values each.
pub fn random_instance_text(r: &mut ChaCha8Rng) -> String {
    let nvars = r.gen_range(1..=2usize);
    let vnames = ["g", "h"];
    let pool = ["v0", "v1", "v2"];
    let mut vals: Vec<Vec<&str>> = Vec::new();
    let mut text = String::new();
    for vname in vnames.iter().take(nvars) {
        let count = r.gen_range(1..=3usize);
        let vs: Vec<&str> = pool[..count].to_vec();
        let init = vs[r.gen_range(0..vs.len())];
        writeln!(text, "var {} : {} init {}", vname, vs.join(" "), init).unwrap();
        vals.push(vs);
    }

    let emit_process = |kind: &str, text: &mut String, r: &mut ChaCha8Rng| {
        let controls = r.gen_range(2..=3usize);
        let nrules = r.gen_range(if kind == "master" { 1..=4 } else { 2..=5 });
        let extra = r.gen_bool(0.5);
        writeln!(text, "\nprocess {kind}").unwrap();
        if extra {
            writeln!(text, "  stack: x").unwrap();
        }
        writeln!(text, "  initial: c0").unwrap();
        if kind == "master" {
            writeln!(text, "  target: c{}", controls - 1).unwrap();
        }
        for _ in 0..nrules {
            let from = r.gen_range(0..controls);
            let to = r.gen_range(0..controls);
            let (top, push) = if extra && r.gen_bool(0.4) {
                ("x", ["eps", "x", "x x"][r.gen_range(0..3usize)])
            } else if extra && r.gen_bool(0.3) {
                ("$", "x $")
            } else {
                ("$", "$")
            };
            let action = match r.gen_range(0..10u32) {
                0..=2 => String::new(),
                d => {
                    let v = r.gen_range(0..nvars);
                    let val = vals[v][r.gen_range(0..vals[v].len())];
                    let verb = if d <= 5 { "read" } else { "write" };
                    format!(" [{verb} {}={}]", vnames[v], val)
                }
            };
            writeln!(text, "  rule c{from} {top} -> c{to} {push}{action}").unwrap();
        }
        writeln!(text, "end").unwrap();
    };
    emit_process("master", &mut text, r);
    emit_process("slave", &mut text, r);
    text
}

/// A random plain pushdown system plus target controls. Pushes are capped
/// at `max_push` symbols; with `max_push` over two the system needs
/// normalization before saturation.
pub struct RandPds {
    pub pds: Pds,
    pub targets: Vec<usize>,
}

pub fn random_pds(r: &mut ChaCha8Rng, table: &mut SymbolTable, max_push: usize) -> RandPds {
    let bottom = table.intern("$");
    let x = table.intern("x");
    let y = table.intern("y");
    let a = table.intern("a");
    let b = table.intern("b");
    let extra: Vec<Sym> = match r.gen_range(0..3u32) {
        0 => vec![],
        1 => vec![x],
        _ => vec![x, y],
    };
    let controls = r.gen_range(1..=4usize);
    let nrules = r.gen_range(0..=8usize);
    let mut rules = Vec::new();
    for _ in 0..nrules {
        let from = r.gen_range(0..controls);
        let to = r.gen_range(0..controls);
        let on_bottom = extra.is_empty() || r.gen_bool(0.4);
        let (top, push) = if on_bottom {
            let room = max_push.saturating_sub(1);
            let len = if extra.is_empty() {
                0
            } else {
                r.gen_range(0..=room)
            };
            let mut p: Vec<Sym> = (0..len)
                .map(|_| extra[r.gen_range(0..extra.len())])
                .collect();
            p.push(bottom);
            (bottom, p)
        } else {
            let top = extra[r.gen_range(0..extra.len())];
            let len = r.gen_range(0..=max_push);
            let push: Vec<Sym> = (0..len).map(|_| extra[r.gen_range(0..extra.len())]).collect();
            (top, push)
        };
        let out = match r.gen_range(0..4u32) {
            0 | 1 => None,
            2 => Some(a),
            _ => Some(b),
        };
        rules.push(PdsRule {
            from,
            top,
            out,
            to,
            push,
        });
    }
    let mut stack_alphabet = vec![bottom];
    stack_alphabet.extend(extra.iter().copied());
    stack_alphabet.sort_unstable();
    let mut targets: Vec<usize> = vec![r.gen_range(0..controls)];
    if r.gen_bool(0.4) {
        targets.push(r.gen_range(0..controls));
    }
    targets.sort_unstable();
    targets.dedup();
    let pds = Pds {
        control_names: (0..controls).map(|i| format!("p{i}")).collect(),
        stack_alphabet,
        bottom,
        initial: 0,
        finals: targets.clone(),
        rules,
    };
    RandPds { pds, targets }
}

/// Plain breadth-first search over explicit configurations: which
/// controls are reachable with stacks of at most `stack_bound` symbols
/// and at most `max_configs` distinct configurations. The second result
/// is true when the search was truncated by either bound.
pub fn bfs_pds_controls(
    p: &Pds,
    stack_bound: usize,
    max_configs: usize,
) -> (HashSet<usize>, bool) {
    let mut seen: HashSet<(usize, Vec<Sym>)> = HashSet::new();
    let mut queue: VecDeque<(usize, Vec<Sym>)> = VecDeque::new();
    let init = (p.initial, vec![p.bottom]);
    seen.insert(init.clone());
    queue.push_back(init);
    let mut controls = HashSet::new();
    let mut truncated = false;
    while let Some((ctrl, stack)) = queue.pop_front() {
        controls.insert(ctrl);
        for rule in &p.rules {
            if rule.from != ctrl || stack.first() != Some(&rule.top) {
                continue;
            }
            let mut next = rule.push.clone();
            next.extend_from_slice(&stack[1..]);
            if next.len() > stack_bound {
                truncated = true;
                continue;
            }
            let cfg = (rule.to, next);
            if seen.contains(&cfg) {
                continue;
            }
            if seen.len() >= max_configs {
                truncated = true;
                continue;
            }
            seen.insert(cfg.clone());
            queue.push_back(cfg);
        }
    }
    (controls, truncated)
}

/// Whether the pushdown system can emit exactly `word` while reaching a
/// final control (with any stack left), decided by breadth-first search
/// over `(control, stack, position)` triples. The second result is true
/// when the search was truncated and a negative answer is unreliable.
pub fn bfs_pds_emits(
    p: &Pds,
    word: &[Sym],
    stack_bound: usize,
    max_configs: usize,
) -> (bool, bool) {
    let mut seen: HashSet<(usize, Vec<Sym>, usize)> = HashSet::new();
    let mut queue: VecDeque<(usize, Vec<Sym>, usize)> = VecDeque::new();
    let init = (p.initial, vec![p.bottom], 0usize);
    seen.insert(init.clone());
    queue.push_back(init);
    let mut truncated = false;
    while let Some((ctrl, stack, pos)) = queue.pop_front() {
        if pos == word.len() && p.finals.contains(&ctrl) {
            return (true, truncated);
        }
        for rule in &p.rules {
            if rule.from != ctrl || stack.first() != Some(&rule.top) {
                continue;
            }
            let npos = match rule.out {
                None => pos,
                Some(s) => {
                    if pos < word.len() && word[pos] == s {
                        pos + 1
                    } else {
                        continue;
                    }
                }
            };
            let mut next = rule.push.clone();
            next.extend_from_slice(&stack[1..]);
            if next.len() > stack_bound {
                truncated = true;
                continue;
            }
            let cfg = (rule.to, next, npos);
            if seen.contains(&cfg) {
                continue;
            }
            if seen.len() >= max_configs {
                truncated = true;
                continue;
            }
            seen.insert(cfg.clone());
            queue.push_back(cfg);
        }
    }
    (false, truncated)
}

/// A random automaton with up to three states over the given alphabet.
pub fn random_nfa(r: &mut ChaCha8Rng, alpha: &[Sym]) -> Nfa {
    let n = r.gen_range(1..=3usize);
    let mut b = NfaBuilder::new();
    for &s in alpha {
        b.include_symbol(s);
    }
    for _ in 0..n {
        b.add_state();
    }
    b.set_initial(0);
    for q in 0..n {
        for &s in alpha {
            for t in 0..n {
                if r.gen_bool(0.28) {
                    b.add_edge(q, s, t);
                }
            }
        }
        if r.gen_bool(0.4) {
            b.set_final(q);
        }
    }
    b.build()
}

/// Scattered-subword test: every symbol of `x` occurs in `y` in order.
pub fn is_scattered_subword(x: &[Sym], y: &[Sym]) -> bool {
    let mut it = y.iter();
    x.iter().all(|s| it.any(|t| t == s))
}
