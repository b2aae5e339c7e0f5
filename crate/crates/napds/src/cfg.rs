//! Context-free grammars: text format, normal-form conversion, membership
//! and emptiness.
//!
//! # Text format
//!
//! One production per line, `#` starts a comment, blank lines are ignored:
//!
//! ```text
//! S -> A S
//! S -> eps
//! A -> a
//! ```
//!
//! Every token that ever appears left of `->` is a nonterminal; everything
//! else is a terminal. The head of the first production is the start
//! symbol. `eps` alone as a body denotes the empty word (and is therefore
//! not usable as a terminal name).
//!
//! # Normal form
//!
//! [`Cfg::to_cnf`] produces a grammar whose productions are all of the
//! shapes `A -> B C` or `A -> a`, with the empty word tracked separately in
//! [`Cfg::accepts_empty`]. The original terminal alphabet is preserved even
//! if conversion prunes all uses of some terminal; several constructions in
//! this crate depend on alphabet stability.

use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::symbols::{Sym, SymbolTable};

/// Index of a nonterminal within its grammar.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NtId(pub u32);

/// One element of a production body.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SymRef {
    /// A terminal symbol.
    T(Sym),
    /// A nonterminal.
    N(NtId),
}

/// A production `head -> body` (empty body = empty word).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Production {
    /// Left-hand side.
    pub head: NtId,
    /// Right-hand side, possibly empty.
    pub body: Vec<SymRef>,
}

/// A context-free grammar.
#[derive(Debug, Clone)]
pub struct Cfg {
    /// Display names of the nonterminals, indexed by [`NtId`].
    pub nt_names: Vec<String>,
    /// The terminal alphabet (sorted). May strictly contain the set of
    /// terminals occurring in productions.
    pub terminals: Vec<Sym>,
    /// All productions.
    pub productions: Vec<Production>,
    /// Start nonterminal.
    pub start: NtId,
    /// True once the grammar is in normal form (see module docs).
    pub cnf: bool,
    /// In normal form: whether the empty word is in the language.
    pub accepts_empty: bool,
}

impl Cfg {
    /// Number of nonterminals.
    pub fn nt_count(&self) -> usize {
        self.nt_names.len()
    }

    /// Productions grouped by head nonterminal.
    pub fn productions_by_head(&self) -> Vec<Vec<usize>> {
        let mut by_head = vec![Vec::new(); self.nt_count()];
        for (i, p) in self.productions.iter().enumerate() {
            by_head[p.head.0 as usize].push(i);
        }
        by_head
    }

    /// True if the language is empty.
    ///
    /// Computed via the productive-nonterminal fixpoint; in normal form the
    /// separate empty-word flag is honoured as well.
    pub fn is_empty(&self) -> bool {
        if self.cnf && self.accepts_empty {
            return false;
        }
        let productive = self.productive_set();
        !productive[self.start.0 as usize]
    }

    /// Nonterminals that derive at least one terminal word.
    fn productive_set(&self) -> Vec<bool> {
        let mut productive = vec![false; self.nt_count()];
        let mut changed = true;
        while changed {
            changed = false;
            for p in &self.productions {
                if productive[p.head.0 as usize] {
                    continue;
                }
                let ok = p.body.iter().all(|s| match s {
                    SymRef::T(_) => true,
                    SymRef::N(n) => productive[n.0 as usize],
                });
                if ok {
                    productive[p.head.0 as usize] = true;
                    changed = true;
                }
            }
        }
        productive
    }

    /// CYK membership test. Requires normal form.
    pub fn member(&self, word: &[Sym]) -> Result<bool> {
        if !self.cnf {
            return Err(Error::Contract(
                "cfg membership requires a grammar in normal form".to_owned(),
            ));
        }
        if word.is_empty() {
            return Ok(self.accepts_empty);
        }
        let n = word.len();
        let nts = self.nt_count();
        // table[i][j] = set of nonterminals deriving word[i .. i + j + 1]
        let mut table = vec![vec![vec![false; nts]; n]; n];
        let mut binary: Vec<(usize, usize, usize)> = Vec::new(); // (head, left, right)
        for p in &self.productions {
            match p.body.as_slice() {
                [SymRef::T(t)] => {
                    for (i, &w) in word.iter().enumerate() {
                        if w == *t {
                            table[i][0][p.head.0 as usize] = true;
                        }
                    }
                }
                [SymRef::N(l), SymRef::N(r)] => {
                    binary.push((p.head.0 as usize, l.0 as usize, r.0 as usize));
                }
                _ => {
                    return Err(Error::Contract(
                        "grammar flagged as normal form has a non-normal production".to_owned(),
                    ))
                }
            }
        }
        for len in 2..=n {
            for i in 0..=(n - len) {
                for split in 1..len {
                    for &(h, l, r) in &binary {
                        if table[i][split - 1][l] && table[i + split][len - split - 1][r] {
                            table[i][len - 1][h] = true;
                        }
                    }
                }
            }
        }
        Ok(table[0][n - 1][self.start.0 as usize])
    }

    /// Converts to normal form (see module docs). The terminal alphabet is
    /// carried over unchanged.
    pub fn to_cnf(&self) -> Cfg {
        let mut nt_names = self.nt_names.clone();
        let mut prods: Vec<(u32, Vec<SymRef>)> = self
            .productions
            .iter()
            .map(|p| (p.head.0, p.body.clone()))
            .collect();

        let fresh = |names: &mut Vec<String>, base: String| -> u32 {
            let mut name = base;
            while names.contains(&name) {
                name.push('\'');
            }
            names.push(name);
            (names.len() - 1) as u32
        };

        // 1. Split long bodies so every body has length <= 2.
        let mut split: Vec<(u32, Vec<SymRef>)> = Vec::new();
        for (head, body) in prods {
            if body.len() <= 2 {
                split.push((head, body));
                continue;
            }
            let mut current = head;
            for (i, &sym) in body.iter().enumerate().take(body.len() - 2) {
                let rest = fresh(
                    &mut nt_names,
                    format!("{}.{}", self.nt_names[head as usize], i + 1),
                );
                split.push((current, vec![sym, SymRef::N(NtId(rest))]));
                current = rest;
            }
            split.push((current, body[body.len() - 2..].to_vec()));
        }
        prods = split;

        // 2. Replace terminals inside length-2 bodies by proxy nonterminals.
        let mut proxy: HashMap<Sym, u32> = HashMap::new();
        let mut extra: Vec<(u32, Vec<SymRef>)> = Vec::new();
        for (_, body) in prods.iter_mut() {
            if body.len() == 2 {
                for slot in body.iter_mut() {
                    if let SymRef::T(t) = *slot {
                        let id = *proxy.entry(t).or_insert_with(|| {
                            let id = fresh(&mut nt_names, format!("t.{}", t.0));
                            extra.push((id, vec![SymRef::T(t)]));
                            id
                        });
                        *slot = SymRef::N(NtId(id));
                    }
                }
            }
        }
        prods.extend(extra);

        // 3. Remove empty bodies. Nullable fixpoint first.
        let nt_count = nt_names.len();
        let mut nullable = vec![false; nt_count];
        let mut changed = true;
        while changed {
            changed = false;
            for (head, body) in &prods {
                if nullable[*head as usize] {
                    continue;
                }
                let all = body.iter().all(|s| match s {
                    SymRef::T(_) => false,
                    SymRef::N(n) => nullable[n.0 as usize],
                });
                if all {
                    nullable[*head as usize] = true;
                    changed = true;
                }
            }
        }
        let accepts_empty = nullable[self.start.0 as usize];
        let mut no_eps: HashSet<(u32, Vec<SymRef>)> = HashSet::new();
        for (head, body) in &prods {
            match body.as_slice() {
                [] => {}
                [x] => {
                    no_eps.insert((*head, vec![*x]));
                }
                [x, y] => {
                    no_eps.insert((*head, vec![*x, *y]));
                    let x_null = matches!(x, SymRef::N(n) if nullable[n.0 as usize]);
                    let y_null = matches!(y, SymRef::N(n) if nullable[n.0 as usize]);
                    if x_null {
                        no_eps.insert((*head, vec![*y]));
                    }
                    if y_null {
                        no_eps.insert((*head, vec![*x]));
                    }
                }
                _ => unreachable!("bodies were split to length <= 2"),
            }
        }

        // 4. Remove unit productions via unit-closure.
        let mut unit_next: Vec<HashSet<u32>> = vec![HashSet::new(); nt_count];
        for (head, body) in &no_eps {
            if let [SymRef::N(n)] = body.as_slice() {
                unit_next[*head as usize].insert(n.0);
            }
        }
        let unit_closure = |start: u32| -> Vec<u32> {
            let mut seen: HashSet<u32> = HashSet::new();
            let mut stack = vec![start];
            seen.insert(start);
            while let Some(q) = stack.pop() {
                for &t in &unit_next[q as usize] {
                    if seen.insert(t) {
                        stack.push(t);
                    }
                }
            }
            let mut v: Vec<u32> = seen.into_iter().collect();
            v.sort_unstable();
            v
        };
        let mut no_unit: HashSet<(u32, Vec<SymRef>)> = HashSet::new();
        for head in 0..nt_count as u32 {
            for reach in unit_closure(head) {
                for (h, body) in &no_eps {
                    if *h != reach {
                        continue;
                    }
                    let is_unit = matches!(body.as_slice(), [SymRef::N(_)]);
                    if !is_unit {
                        no_unit.insert((head, body.clone()));
                    }
                }
            }
        }

        // 5. Keep only productive and reachable nonterminals.
        let mut productive = vec![false; nt_count];
        changed = true;
        while changed {
            changed = false;
            for (head, body) in &no_unit {
                if productive[*head as usize] {
                    continue;
                }
                let ok = body.iter().all(|s| match s {
                    SymRef::T(_) => true,
                    SymRef::N(n) => productive[n.0 as usize],
                });
                if ok {
                    productive[*head as usize] = true;
                    changed = true;
                }
            }
        }
        let useful: Vec<(u32, Vec<SymRef>)> = no_unit
            .into_iter()
            .filter(|(head, body)| {
                productive[*head as usize]
                    && body.iter().all(|s| match s {
                        SymRef::T(_) => true,
                        SymRef::N(n) => productive[n.0 as usize],
                    })
            })
            .collect();
        let mut reachable = vec![false; nt_count];
        reachable[self.start.0 as usize] = true;
        changed = true;
        while changed {
            changed = false;
            for (head, body) in &useful {
                if !reachable[*head as usize] {
                    continue;
                }
                for s in body {
                    if let SymRef::N(n) = s {
                        if !reachable[n.0 as usize] {
                            reachable[n.0 as usize] = true;
                            changed = true;
                        }
                    }
                }
            }
        }

        // Compact ids; the start symbol always survives (possibly barren).
        let mut keep: Vec<u32> = (0..nt_count as u32)
            .filter(|&i| {
                i == self.start.0 || (reachable[i as usize] && productive[i as usize])
            })
            .collect();
        keep.sort_unstable();
        let remap: HashMap<u32, u32> = keep
            .iter()
            .enumerate()
            .map(|(new, &old)| (old, new as u32))
            .collect();
        let mut final_prods: Vec<Production> = useful
            .into_iter()
            .filter(|(head, body)| {
                reachable[*head as usize]
                    && body.iter().all(|s| match s {
                        SymRef::T(_) => true,
                        SymRef::N(n) => reachable[n.0 as usize],
                    })
            })
            .map(|(head, body)| Production {
                head: NtId(remap[&head]),
                body: body
                    .into_iter()
                    .map(|s| match s {
                        SymRef::T(t) => SymRef::T(t),
                        SymRef::N(n) => SymRef::N(NtId(remap[&n.0])),
                    })
                    .collect(),
            })
            .collect();
        final_prods.sort_by(|a, b| (a.head, format!("{:?}", a.body)).cmp(&(b.head, format!("{:?}", b.body))));
        Cfg {
            nt_names: keep
                .iter()
                .map(|&i| nt_names[i as usize].clone())
                .collect(),
            terminals: self.terminals.clone(),
            productions: final_prods,
            start: NtId(remap[&self.start.0]),
            cnf: true,
            accepts_empty,
        }
    }
}

/// Parses the grammar text format (see module docs).
pub fn parse_grammar(text: &str, table: &mut SymbolTable) -> Result<Cfg> {
    struct Line<'a> {
        no: usize,
        head: &'a str,
        body: Vec<&'a str>,
    }
    let mut lines: Vec<Line> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = match raw.find('#') {
            Some(p) => &raw[..p],
            None => raw,
        };
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.is_empty() {
            continue;
        }
        let no = idx + 1;
        if tokens.len() < 2 || tokens[1] != "->" {
            return Err(Error::Input(format!(
                "line {no}: expected `HEAD -> BODY...`"
            )));
        }
        let body = tokens[2..].to_vec();
        if body.is_empty() {
            return Err(Error::Input(format!(
                "line {no}: empty body; write `{} -> eps` for the empty word",
                tokens[0]
            )));
        }
        if body.contains(&"eps") && body.len() > 1 {
            return Err(Error::Input(format!(
                "line {no}: `eps` must be the only body token"
            )));
        }
        if body.contains(&"->") {
            return Err(Error::Input(format!("line {no}: stray `->` in body")));
        }
        lines.push(Line {
            no,
            head: tokens[0],
            body,
        });
    }
    if lines.is_empty() {
        return Err(Error::Input("grammar has no productions".to_owned()));
    }
    let mut nt_names: Vec<String> = Vec::new();
    let mut nt_ids: HashMap<&str, NtId> = HashMap::new();
    for l in &lines {
        if !nt_ids.contains_key(l.head) {
            let id = NtId(nt_names.len() as u32);
            nt_names.push(l.head.to_owned());
            nt_ids.insert(l.head, id);
        }
    }
    if nt_ids.contains_key("eps") {
        return Err(Error::Input(
            "`eps` cannot be used as a nonterminal name".to_owned(),
        ));
    }
    let mut terminals: Vec<Sym> = Vec::new();
    let mut productions: Vec<Production> = Vec::new();
    for l in &lines {
        let head = nt_ids[l.head];
        let body: Vec<SymRef> = if l.body == ["eps"] {
            Vec::new()
        } else {
            l.body
                .iter()
                .map(|&tok| match nt_ids.get(tok) {
                    Some(&id) => SymRef::N(id),
                    None => {
                        let s = table.intern(tok);
                        terminals.push(s);
                        SymRef::T(s)
                    }
                })
                .collect()
        };
        let _ = l.no;
        productions.push(Production { head, body });
    }
    terminals.sort_unstable();
    terminals.dedup();
    Ok(Cfg {
        nt_names,
        terminals,
        productions,
        start: NtId(0),
        cnf: false,
        accepts_empty: false,
    })
}

/// Renders a grammar in the text format. Inverse of [`parse_grammar`] up to
/// whitespace for grammars whose nonterminal names contain no whitespace.
pub fn display_grammar(cfg: &Cfg, table: &SymbolTable) -> String {
    let mut out = String::new();
    // Start symbol's productions first, since the first head is the start.
    let mut order: Vec<usize> = (0..cfg.productions.len()).collect();
    order.sort_by_key(|&i| (cfg.productions[i].head != cfg.start, i));
    for i in order {
        let p = &cfg.productions[i];
        let _ = write!(out, "{} ->", cfg.nt_names[p.head.0 as usize]);
        if p.body.is_empty() {
            out.push_str(" eps");
        } else {
            for s in &p.body {
                match s {
                    SymRef::T(t) => {
                        let _ = write!(out, " {}", table.name(*t));
                    }
                    SymRef::N(n) => {
                        let _ = write!(out, " {}", cfg.nt_names[n.0 as usize]);
                    }
                }
            }
        }
        out.push('\n');
    }
    out
}
