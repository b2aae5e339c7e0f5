//! Nondeterministic finite automata over interned symbols.
//!
//! Automata are built through [`NfaBuilder`], which accepts epsilon edges;
//! the finished [`Nfa`] is epsilon-free (closures are resolved once at
//! build time). The alphabet is explicit and may be larger than the set of
//! symbols actually occurring on edges, which matters for language
//! complement-style comparisons: [`nfa_equivalent`] requires both sides to
//! agree on the alphabet.

use std::collections::{HashMap, HashSet, VecDeque};

use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::symbols::Sym;

/// An epsilon-free NFA with a single initial state.
#[derive(Debug, Clone)]
pub struct Nfa {
    /// Sorted, deduplicated alphabet.
    alphabet: Vec<Sym>,
    /// Per state, sorted outgoing edges `(symbol, target)`.
    edges: Vec<Vec<(Sym, usize)>>,
    initial: usize,
    finals: Vec<bool>,
}

impl Nfa {
    /// The automaton's alphabet (sorted).
    pub fn alphabet(&self) -> &[Sym] {
        &self.alphabet
    }

    /// Number of states.
    pub fn state_count(&self) -> usize {
        self.edges.len()
    }

    /// The initial state.
    pub fn initial(&self) -> usize {
        self.initial
    }

    /// True if `state` is accepting.
    pub fn is_final(&self, state: usize) -> bool {
        self.finals[state]
    }

    /// Outgoing edges of `state`, sorted by `(symbol, target)`.
    pub fn edges_from(&self, state: usize) -> &[(Sym, usize)] {
        &self.edges[state]
    }

    /// Decides whether the automaton accepts `word`.
    ///
    /// Fails with an input error if the word uses a symbol outside the
    /// alphabet: such a word is not in the automaton's universe and asking
    /// about it is almost always a plumbing bug in the caller.
    pub fn accepts(&self, word: &[Sym]) -> Result<bool> {
        for &s in word {
            if self.alphabet.binary_search(&s).is_err() {
                return Err(Error::Input(format!(
                    "word symbol id {} is outside the automaton's alphabet",
                    s.0
                )));
            }
        }
        let mut current: HashSet<usize> = HashSet::new();
        current.insert(self.initial);
        for &s in word {
            let mut next = HashSet::new();
            for &q in &current {
                for &(sym, to) in &self.edges[q] {
                    if sym == s {
                        next.insert(to);
                    }
                }
            }
            if next.is_empty() {
                return Ok(false);
            }
            current = next;
        }
        Ok(current.iter().any(|&q| self.finals[q]))
    }

    /// True if the accepted language is empty.
    pub fn is_empty(&self) -> bool {
        let mut seen = vec![false; self.edges.len()];
        let mut queue = VecDeque::new();
        seen[self.initial] = true;
        queue.push_back(self.initial);
        while let Some(q) = queue.pop_front() {
            if self.finals[q] {
                return false;
            }
            for &(_, to) in &self.edges[q] {
                if !seen[to] {
                    seen[to] = true;
                    queue.push_back(to);
                }
            }
        }
        true
    }
}

/// Builder for [`Nfa`]; the only place where epsilon edges exist.
#[derive(Debug, Default)]
pub struct NfaBuilder {
    alphabet: Vec<Sym>,
    edges: Vec<Vec<(Sym, usize)>>,
    eps: Vec<Vec<usize>>,
    finals: Vec<bool>,
    initial: Option<usize>,
}

impl NfaBuilder {
    /// Creates an empty builder.
    pub fn new() -> Self {
        NfaBuilder::default()
    }

    /// Adds a state and returns its id.
    pub fn add_state(&mut self) -> usize {
        self.edges.push(Vec::new());
        self.eps.push(Vec::new());
        self.finals.push(false);
        self.edges.len() - 1
    }

    /// Marks the initial state (required exactly once before `build`).
    pub fn set_initial(&mut self, state: usize) {
        self.initial = Some(state);
    }

    /// Marks a state as accepting.
    pub fn set_final(&mut self, state: usize) {
        self.finals[state] = true;
    }

    /// Adds a labelled edge; the symbol joins the alphabet.
    pub fn add_edge(&mut self, from: usize, sym: Sym, to: usize) {
        self.alphabet.push(sym);
        self.edges[from].push((sym, to));
    }

    /// Adds an epsilon edge (resolved at build time).
    pub fn add_eps(&mut self, from: usize, to: usize) {
        self.eps[from].push(to);
    }

    /// Adds a symbol to the alphabet without using it on an edge.
    pub fn include_symbol(&mut self, sym: Sym) {
        self.alphabet.push(sym);
    }

    /// Resolves epsilon closures and freezes the automaton.
    ///
    /// Panics if no initial state was set; that is a static usage error.
    pub fn build(mut self) -> Nfa {
        let initial = self.initial.expect("NfaBuilder: initial state not set");
        let n = self.edges.len();
        // Epsilon closure per state, by BFS over eps edges.
        let mut closure: Vec<Vec<usize>> = Vec::with_capacity(n);
        for s in 0..n {
            let mut seen = vec![false; n];
            let mut queue = VecDeque::new();
            seen[s] = true;
            queue.push_back(s);
            let mut cl = Vec::new();
            while let Some(q) = queue.pop_front() {
                cl.push(q);
                for &t in &self.eps[q] {
                    if !seen[t] {
                        seen[t] = true;
                        queue.push_back(t);
                    }
                }
            }
            closure.push(cl);
        }
        let mut edges: Vec<Vec<(Sym, usize)>> = vec![Vec::new(); n];
        let mut finals = vec![false; n];
        for s in 0..n {
            let mut out: Vec<(Sym, usize)> = Vec::new();
            for &q in &closure[s] {
                if self.finals[q] {
                    finals[s] = true;
                }
                out.extend(self.edges[q].iter().copied());
            }
            out.sort_unstable();
            out.dedup();
            edges[s] = out;
        }
        self.alphabet.sort_unstable();
        self.alphabet.dedup();
        Nfa {
            alphabet: self.alphabet,
            edges,
            initial,
            finals,
        }
    }
}

/// A deterministic view produced by the subset construction. Transitions
/// are total over the alphabet only implicitly: a missing entry is the
/// (rejecting) sink.
struct Dfa {
    alphabet: Vec<Sym>,
    trans: Vec<HashMap<Sym, usize>>,
    finals: Vec<bool>,
}

fn determinize(nfa: &Nfa, limits: &Limits) -> Result<Dfa> {
    let mut subset_ids: HashMap<Vec<usize>, usize> = HashMap::new();
    let mut subsets: Vec<Vec<usize>> = Vec::new();
    let mut trans: Vec<HashMap<Sym, usize>> = Vec::new();
    let mut finals: Vec<bool> = Vec::new();

    let start = vec![nfa.initial()];
    subset_ids.insert(start.clone(), 0);
    subsets.push(start);
    trans.push(HashMap::new());
    finals.push(nfa.is_final(nfa.initial()));

    let mut queue = VecDeque::new();
    queue.push_back(0usize);
    while let Some(id) = queue.pop_front() {
        let subset = subsets[id].clone();
        let mut by_sym: HashMap<Sym, Vec<usize>> = HashMap::new();
        for &q in &subset {
            for &(sym, to) in nfa.edges_from(q) {
                by_sym.entry(sym).or_default().push(to);
            }
        }
        for (sym, mut targets) in by_sym {
            targets.sort_unstable();
            targets.dedup();
            let next_id = match subset_ids.get(&targets) {
                Some(&i) => i,
                None => {
                    let i = subsets.len();
                    if i >= limits.det_states {
                        return Err(Error::Limit {
                            what: "determinization states",
                            limit: limits.det_states,
                        });
                    }
                    subset_ids.insert(targets.clone(), i);
                    finals.push(targets.iter().any(|&q| nfa.is_final(q)));
                    subsets.push(targets);
                    trans.push(HashMap::new());
                    queue.push_back(i);
                    i
                }
            };
            trans[id].insert(sym, next_id);
        }
    }
    Ok(Dfa {
        alphabet: nfa.alphabet().to_vec(),
        trans,
        finals,
    })
}

/// Decides language equivalence of two NFAs over the same alphabet.
///
/// Both automata are determinized (subject to `limits.det_states`) and the
/// product of the two DFAs, completed with a rejecting sink, is searched for
/// a state pair that disagrees on acceptance. Automata with different
/// alphabets are rejected as an input error: their languages live in
/// different universes and silently intersecting the alphabets hides bugs.
pub fn nfa_equivalent(a: &Nfa, b: &Nfa, limits: &Limits) -> Result<bool> {
    if a.alphabet() != b.alphabet() {
        return Err(Error::Input(
            "cannot compare automata over different alphabets".to_owned(),
        ));
    }
    let da = determinize(a, limits)?;
    let db = determinize(b, limits)?;
    // Pair search; None encodes the sink of either side.
    let start = (Some(0usize), Some(0usize));
    let mut seen = HashSet::new();
    seen.insert(start);
    let mut queue = VecDeque::new();
    queue.push_back(start);
    let acc = |d: &Dfa, s: Option<usize>| s.map(|q| d.finals[q]).unwrap_or(false);
    while let Some((qa, qb)) = queue.pop_front() {
        if acc(&da, qa) != acc(&db, qb) {
            return Ok(false);
        }
        for &sym in &da.alphabet {
            let na = qa.and_then(|q| da.trans[q].get(&sym).copied());
            let nb = qb.and_then(|q| db.trans[q].get(&sym).copied());
            if na.is_none() && nb.is_none() {
                continue;
            }
            if seen.insert((na, nb)) {
                queue.push_back((na, nb));
            }
        }
    }
    Ok(true)
}
