//! Regularization of suitable context-free languages through spine types.
//!
//! This is the second, independent route to an automaton for an
//! upward-closed read language (the first being the minimal-word chain
//! construction in [`crate::readlang`]). It works directly on a
//! normal-form grammar `g` and builds a finite automaton for `L(g)` by a
//! worklist exploration of word classes, where two words are identified
//! when they have the same *spine types*.
//!
//! The *marked alphabet* of `g` has one symbol per (binary production,
//! child) pair, one per terminal production, and one per terminal
//! character. A derivation-tree path from the root to the leaf producing
//! the last character of a prefix `w` is summarised by its *spine*: the
//! sequence of (production, child) marks along it, ending with the mark of
//! the leaf's terminal production (the leaf's own character is determined
//! by that mark and is not repeated). The *type* of a spine `z` is any
//! repetition-free word `x` over the marked alphabet such that `z` can be
//! split into consecutive blocks, one per character `a` of `x`, each block
//! being `a` alone or starting and ending with `a`. A word `w` *has type*
//! `x` if some completion `wu ∈ L(g)` has a derivation tree whose path to
//! the last character of `w` yields a spine of type `x`.
//!
//! For each candidate type `x`, [`typed_grammar`] builds a grammar for
//! exactly the words having type `x`, so the full type set of a word is
//! one membership sweep ([`TypeContext::type_set`]); a worklist then
//! merges words with equal type sets into automaton states ([`er_nfa`]).
//! For languages closed upward under the subword order this abstraction
//! is exact. Types containing a bare terminal character are never
//! realizable (spines consist of production marks only), so their grammars
//! are skipped; the bare characters still count toward the alphabet size.

use std::collections::HashMap;
use std::rc::Rc;

use crate::cfg::{Cfg, NtId, Production, SymRef};
use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::nfa::{Nfa, NfaBuilder};
use crate::symbols::{Sym, SymbolTable};

/// A symbol of the marked alphabet of a normal-form grammar.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MarkedSymbol {
    /// A binary production together with the child the path descends into
    /// (1 = left, 2 = right).
    Branch {
        /// Index of the production in the grammar.
        prod: usize,
        /// Which child continues the path.
        child: u8,
    },
    /// A terminal production; the path ends at its leaf.
    Leaf {
        /// Index of the production in the grammar.
        prod: usize,
    },
    /// A bare terminal character.
    Plain {
        /// The terminal.
        sym: Sym,
    },
}

/// The marked alphabet of a normal-form grammar, in a fixed order: branch
/// marks in production order (left before right), then leaf marks in
/// production order, then bare terminals in symbol order.
pub fn marked_alphabet(g: &Cfg) -> Result<Vec<MarkedSymbol>> {
    if !g.cnf {
        return Err(Error::Contract(
            "the marked alphabet is defined for normal-form grammars".to_owned(),
        ));
    }
    let mut out = Vec::new();
    for (i, p) in g.productions.iter().enumerate() {
        if matches!(p.body.as_slice(), [SymRef::N(_), SymRef::N(_)]) {
            out.push(MarkedSymbol::Branch { prod: i, child: 1 });
            out.push(MarkedSymbol::Branch { prod: i, child: 2 });
        }
    }
    for (i, p) in g.productions.iter().enumerate() {
        if matches!(p.body.as_slice(), [SymRef::T(_)]) {
            out.push(MarkedSymbol::Leaf { prod: i });
        }
    }
    for &t in &g.terminals {
        out.push(MarkedSymbol::Plain { sym: t });
    }
    Ok(out)
}

/// Human-readable name of a marked symbol, e.g. `(S,A,B,1)`, `(A,a)`, `a`.
pub fn marked_symbol_name(g: &Cfg, table: &SymbolTable, m: &MarkedSymbol) -> String {
    match *m {
        MarkedSymbol::Branch { prod, child } => {
            let p = &g.productions[prod];
            if let [SymRef::N(b), SymRef::N(c)] = p.body.as_slice() {
                format!(
                    "({},{},{},{})",
                    g.nt_names[p.head.0 as usize],
                    g.nt_names[b.0 as usize],
                    g.nt_names[c.0 as usize],
                    child
                )
            } else {
                unreachable!("branch marks index binary productions")
            }
        }
        MarkedSymbol::Leaf { prod } => {
            let p = &g.productions[prod];
            if let [SymRef::T(t)] = p.body.as_slice() {
                format!("({},{})", g.nt_names[p.head.0 as usize], table.name(*t))
            } else {
                unreachable!("leaf marks index terminal productions")
            }
        }
        MarkedSymbol::Plain { sym } => table.name(sym).to_owned(),
    }
}

/// All candidate types over a marked alphabet of size `m`: the nonempty
/// repetition-free index sequences, ordered by length then lexicographic.
/// Their number is `sum over r of m!/(m-r)!`, e.g. 109,600 for `m = 8`.
pub fn enumerate_types(m: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current: Vec<usize> = Vec::new();
    let mut used = vec![false; m];
    fn go(m: usize, current: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Vec<usize>>) {
        if !current.is_empty() {
            out.push(current.clone());
        }
        if current.len() == m {
            return;
        }
        for i in 0..m {
            if !used[i] {
                used[i] = true;
                current.push(i);
                go(m, current, used, out);
                current.pop();
                used[i] = false;
            }
        }
    }
    go(m, &mut current, &mut used, &mut out);
    out.sort_by(|a, b| (a.len(), a.as_slice()).cmp(&(b.len(), b.as_slice())));
    out
}

/// The automaton of the spines having type `x` (given as indices into the
/// marked alphabet): the concatenation over the characters `a` of `x` of
/// `a | a M* a`, where `M` is the whole marked alphabet. `marked_syms` are
/// the interned symbols of the marked alphabet, in alphabet order.
pub fn type_nfa(x: &[usize], marked_syms: &[Sym]) -> Nfa {
    let mut b = NfaBuilder::new();
    for &s in marked_syms {
        b.include_symbol(s);
    }
    let chain: Vec<usize> = (0..=x.len()).map(|_| b.add_state()).collect();
    b.set_initial(chain[0]);
    b.set_final(chain[x.len()]);
    for (i, &mi) in x.iter().enumerate() {
        let a = marked_syms[mi];
        // Single occurrence, or a block a M* a.
        b.add_edge(chain[i], a, chain[i + 1]);
        let loop_st = b.add_state();
        b.add_edge(chain[i], a, loop_st);
        for &s in marked_syms {
            b.add_edge(loop_st, s, loop_st);
        }
        b.add_edge(loop_st, a, chain[i + 1]);
    }
    b.build()
}

/// The grammar of the words having type `x`: `w ∈ L(typed_grammar(g, x))`
/// iff some completion of `w` in `L(g)` has a path to `w`'s last character
/// whose spine has type `x`.
///
/// Nonterminal copies: the original `A` derives complete subtrees left of
/// the path, `A@q` derives the part of `w` below a path node while the
/// type automaton is in state `q`, and `A@e` derives the empty remainder
/// right of the path.
pub fn typed_grammar(
    g: &Cfg,
    marked: &[MarkedSymbol],
    marked_syms: &[Sym],
    x: &[usize],
) -> Result<Cfg> {
    if !g.cnf {
        return Err(Error::Contract(
            "typed grammars are defined for normal-form grammars".to_owned(),
        ));
    }
    let aut = type_nfa(x, marked_syms);
    let sym_to_mark: HashMap<Sym, usize> = marked_syms
        .iter()
        .enumerate()
        .map(|(i, &s)| (s, i))
        .collect();
    let n = g.nt_count();
    let states = aut.state_count();
    // Layout: plain copies 0..n, then A@q blocks, then A@e.
    let plain = |a: NtId| NtId(a.0);
    let at = |a: NtId, q: usize| NtId((n + q * n + a.0 as usize) as u32);
    let erased = |a: NtId| NtId((n + states * n + a.0 as usize) as u32);
    let mut nt_names: Vec<String> = g.nt_names.clone();
    for q in 0..states {
        for a in 0..n {
            nt_names.push(format!("{}@q{}", g.nt_names[a], q));
        }
    }
    for a in 0..n {
        nt_names.push(format!("{}@e", g.nt_names[a]));
    }

    let mut productions: Vec<Production> = Vec::new();
    // Complete subtrees: the original rules.
    for p in &g.productions {
        productions.push(p.clone());
    }
    // Path steps and the leaf, driven by the type automaton's edges.
    for q in 0..states {
        for &(sym, q2) in aut.edges_from(q) {
            match marked[sym_to_mark[&sym]] {
                MarkedSymbol::Branch { prod, child } => {
                    let p = &g.productions[prod];
                    if let [SymRef::N(b), SymRef::N(c)] = p.body.as_slice() {
                        let body = if child == 1 {
                            vec![SymRef::N(at(*b, q2)), SymRef::N(erased(*c))]
                        } else {
                            vec![SymRef::N(plain(*b)), SymRef::N(at(*c, q2))]
                        };
                        productions.push(Production {
                            head: at(p.head, q),
                            body,
                        });
                    }
                }
                MarkedSymbol::Leaf { prod } => {
                    if aut.is_final(q2) {
                        let p = &g.productions[prod];
                        if let [SymRef::T(t)] = p.body.as_slice() {
                            productions.push(Production {
                                head: at(p.head, q),
                                body: vec![SymRef::T(*t)],
                            });
                        }
                    }
                }
                MarkedSymbol::Plain { .. } => {
                    // Bare terminals never occur on realizable spines.
                }
            }
        }
    }
    // Erased copies derive nothing.
    for p in &g.productions {
        if let [SymRef::N(b), SymRef::N(c)] = p.body.as_slice() {
            productions.push(Production {
                head: erased(p.head),
                body: vec![SymRef::N(erased(*b)), SymRef::N(erased(*c))],
            });
        }
    }
    for a in 0..n {
        productions.push(Production {
            head: erased(NtId(a as u32)),
            body: Vec::new(),
        });
    }
    Ok(Cfg {
        nt_names,
        terminals: g.terminals.clone(),
        productions,
        start: at(g.start, aut.initial()),
        cnf: false,
        accepts_empty: false,
    })
}

/// Shared machinery for type-set queries against one grammar: the marked
/// alphabet, the enumerated candidate types, and a cache of the typed
/// grammars (in normal form) for the realizable candidates.
pub struct TypeContext {
    g: Cfg,
    marked: Vec<MarkedSymbol>,
    marked_syms: Vec<Sym>,
    types: Vec<Vec<usize>>,
    /// Indices of types free of bare terminals; only these get grammars.
    proper: Vec<bool>,
    cache: Vec<Option<Rc<Cfg>>>,
    set_words: usize,
}

impl TypeContext {
    /// Builds the context; fails if the marked alphabet exceeds the cap.
    pub fn new(g: Cfg, table: &mut SymbolTable, limits: &Limits) -> Result<TypeContext> {
        let marked = marked_alphabet(&g)?;
        if marked.len() > limits.marked_alphabet {
            return Err(Error::Limit {
                what: "marked alphabet size",
                limit: limits.marked_alphabet,
            });
        }
        let marked_syms: Vec<Sym> = marked
            .iter()
            .map(|m| {
                let name = marked_symbol_name(&g, table, m);
                table.intern(&name)
            })
            .collect();
        let types = enumerate_types(marked.len());
        let proper: Vec<bool> = types
            .iter()
            .map(|x| {
                x.iter()
                    .all(|&i| !matches!(marked[i], MarkedSymbol::Plain { .. }))
            })
            .collect();
        let cache = vec![None; types.len()];
        let set_words = types.len().div_ceil(64);
        Ok(TypeContext {
            g,
            marked,
            marked_syms,
            types,
            proper,
            cache,
            set_words,
        })
    }

    /// The candidate types (indices into [`TypeContext::marked`]).
    pub fn types(&self) -> &[Vec<usize>] {
        &self.types
    }

    /// The marked alphabet.
    pub fn marked(&self) -> &[MarkedSymbol] {
        &self.marked
    }

    /// The type set of `w` as a bitset over [`TypeContext::types`].
    pub fn type_set(&mut self, w: &[Sym]) -> Result<Vec<u64>> {
        let mut set = vec![0u64; self.set_words];
        if w.is_empty() {
            // By convention the empty word has no types: it has no last
            // character for a path to end on.
            return Ok(set);
        }
        for i in 0..self.types.len() {
            if !self.proper[i] {
                continue;
            }
            if self.cache[i].is_none() {
                let x = self.types[i].clone();
                let typed = typed_grammar(&self.g, &self.marked, &self.marked_syms, &x)?;
                self.cache[i] = Some(Rc::new(typed.to_cnf()));
            }
            let typed = self.cache[i].as_ref().unwrap().clone();
            if typed.member(w)? {
                set[i / 64] |= 1u64 << (i % 64);
            }
        }
        Ok(set)
    }
}

/// True if `w1` and `w2` have the same spine-type set.
pub fn spine_types_equal(ctx: &mut TypeContext, w1: &[Sym], w2: &[Sym]) -> Result<bool> {
    Ok(ctx.type_set(w1)? == ctx.type_set(w2)?)
}

/// Builds an automaton for `L(g)` by the type-set worklist construction.
///
/// States are type-set classes of explored words, grown breadth-first from
/// the empty word; the empty word keeps its own state (its conventional
/// type set is empty, which must not be conflated with dead words whose
/// type set is genuinely empty). Words with empty type sets share one
/// (dead) state. If two words about to be merged disagree on language
/// membership the grammar does not support the abstraction and a
/// precondition error is returned; if the state count exceeds the cap, a
/// resource-limit error.
pub fn er_nfa(g: &Cfg, table: &mut SymbolTable, limits: &Limits) -> Result<Nfa> {
    if !g.cnf {
        return Err(Error::Contract(
            "the worklist construction requires a normal-form grammar".to_owned(),
        ));
    }
    let mut ctx = TypeContext::new(g.clone(), table, limits)?;
    let sigma: Vec<Sym> = g.terminals.clone();

    struct State {
        repr: Vec<Sym>,
        is_final: bool,
    }
    let mut states: Vec<State> = vec![State {
        repr: Vec::new(),
        is_final: g.accepts_empty,
    }];
    // Nonempty representatives only; the empty word's state is not merged.
    let mut by_set: HashMap<Vec<u64>, usize> = HashMap::new();
    let mut edges: Vec<(usize, Sym, usize)> = Vec::new();
    let mut queue: std::collections::VecDeque<usize> = std::collections::VecDeque::new();
    queue.push_back(0);
    while let Some(si) = queue.pop_front() {
        let repr = states[si].repr.clone();
        for &a in &sigma {
            let mut wa = repr.clone();
            wa.push(a);
            let set = ctx.type_set(&wa)?;
            let is_member = g.member(&wa)?;
            let ti = match by_set.get(&set) {
                Some(&t) => {
                    if states[t].is_final != is_member {
                        return Err(Error::Precondition(format!(
                            "words with equal type sets disagree on membership \
                             (all-prefix lengths {} and {}); the language does not \
                             support the type abstraction",
                            states[t].repr.len(),
                            wa.len()
                        )));
                    }
                    t
                }
                None => {
                    let t = states.len();
                    if t >= limits.er_states {
                        return Err(Error::Limit {
                            what: "worklist automaton states",
                            limit: limits.er_states,
                        });
                    }
                    states.push(State {
                        repr: wa.clone(),
                        is_final: is_member,
                    });
                    by_set.insert(set, t);
                    queue.push_back(t);
                    t
                }
            };
            edges.push((si, a, ti));
        }
    }

    let mut b = NfaBuilder::new();
    for &s in &sigma {
        b.include_symbol(s);
    }
    for st in &states {
        let id = b.add_state();
        if st.is_final {
            b.set_final(id);
        }
    }
    b.set_initial(0);
    for (from, sym, to) in edges {
        b.add_edge(from, sym, to);
    }
    Ok(b.build())
}
