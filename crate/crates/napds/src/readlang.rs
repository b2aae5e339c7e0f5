//! Read languages of the slave process.
//!
//! For the parameterised check, everything an unbounded crowd of slave
//! copies can do for the master is summarised per store value `g` of a
//! variable `i`: which sequences of *reads* and *overwrites* can happen
//! between the start of some slave copy and the moment it writes `g` to
//! `i`. The construction is:
//!
//! 1. [`build_write_pds`] turns the slave into a plain output-labelled
//!    [`Pds`]: reads emit their read symbol, every write of any variable
//!    `l` emits that variable's overwrite symbol (`KILL`), and a fresh
//!    accepting control is entered silently wherever a write of `g` to `i`
//!    was possible. The language of this system is the set of read/kill
//!    words a single copy can produce up to (excluding) its decisive write.
//! 2. Because arbitrarily many other copies run interleaved, the relevant
//!    language is the *upward closure* of that word set inside `R*`
//!    (insert any other reads/overwrites anywhere), and that closure is
//!    regular. [`minimal_read_words`] computes the finitely many
//!    subword-minimal words by enumerating repetition-free derivation
//!    trees of the extracted grammar with antichain pruning, and
//!    [`chain_union_nfa`] assembles `R* a1 R* ... R* ak R*` automata from
//!    them; [`read_language_nfa`] is the whole pipeline.
//! 3. [`closure_member`] decides membership in the upward closure directly
//!    on the grammar (no automaton), as an independent route used to
//!    cross-check the automata. [`closure_grammar`] produces a grammar
//!    *of* the upward closure, which is what the alternative spine-type
//!    engine consumes.

use std::collections::HashMap;
use std::rc::Rc;

use crate::cfg::{Cfg, NtId, Production, SymRef};
use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::nfa::{Nfa, NfaBuilder};
use crate::pds::{Action, NaPds, Pds, PdsRule, VarDecl};
use crate::symbols::{Sym, SymbolTable};

/// The read/overwrite alphabet `R` of a variable declaration list: one
/// read symbol per (variable, value) pair and one overwrite symbol per
/// variable.
#[derive(Debug, Clone)]
pub struct ReadAlphabet {
    /// Per variable, per value index: the read symbol.
    pub reads: Vec<Vec<Sym>>,
    /// Per variable: the overwrite symbol.
    pub kills: Vec<Sym>,
    /// The full alphabet, sorted.
    pub all: Vec<Sym>,
    kind_of: HashMap<Sym, ReadSymKind>,
    by_value: HashMap<(usize, Sym), Sym>,
}

/// What a symbol of `R` denotes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReadSymKind {
    /// Read of the given value of the given variable.
    Read {
        /// Variable index.
        var: usize,
        /// The value read.
        val: Sym,
    },
    /// Overwrite of the given variable.
    Kill {
        /// Variable index.
        var: usize,
    },
}

impl ReadAlphabet {
    /// Builds the alphabet. Read symbols display as `r(v)`, qualified to
    /// `r(x.v)` when the value name `v` occurs in several variables;
    /// overwrite symbols display as `KILL` (one variable) or `KILL_x`.
    pub fn new(vars: &[VarDecl], table: &mut SymbolTable) -> ReadAlphabet {
        let mut value_owners: HashMap<Sym, usize> = HashMap::new();
        for v in vars {
            for &val in &v.values {
                *value_owners.entry(val).or_insert(0) += 1;
            }
        }
        let mut reads = Vec::new();
        let mut kind_of = HashMap::new();
        let mut by_value = HashMap::new();
        for (vi, v) in vars.iter().enumerate() {
            let mut row = Vec::new();
            for &val in &v.values {
                let name = if value_owners[&val] > 1 {
                    format!("r({}.{})", v.name, table.name(val))
                } else {
                    format!("r({})", table.name(val))
                };
                let s = table.intern(&name);
                kind_of.insert(s, ReadSymKind::Read { var: vi, val });
                by_value.insert((vi, val), s);
                row.push(s);
            }
            reads.push(row);
        }
        let mut kills = Vec::new();
        for (vi, v) in vars.iter().enumerate() {
            let name = if vars.len() == 1 {
                "KILL".to_owned()
            } else {
                format!("KILL_{}", v.name)
            };
            let s = table.intern(&name);
            kind_of.insert(s, ReadSymKind::Kill { var: vi });
            kills.push(s);
        }
        let mut all: Vec<Sym> = reads.iter().flatten().copied().collect();
        all.extend(kills.iter().copied());
        all.sort_unstable();
        all.dedup();
        ReadAlphabet {
            reads,
            kills,
            all,
            kind_of,
            by_value,
        }
    }

    /// What `s` denotes, if it belongs to this alphabet.
    pub fn classify(&self, s: Sym) -> Option<ReadSymKind> {
        self.kind_of.get(&s).copied()
    }

    /// The read symbol for value `val` of variable `var`.
    pub fn read_sym(&self, var: usize, val: Sym) -> Option<Sym> {
        self.by_value.get(&(var, val)).copied()
    }
}

/// Where each rule of a write-system came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WriteRuleOrigin {
    /// One-to-one image of the slave rule with this index (its action
    /// determines the output: read symbol, overwrite symbol, or silence).
    Step(usize),
    /// The silent switch into the accepting control, recording that the
    /// slave rule with this index (a write of the decisive value) was
    /// enabled here.
    Marker(usize),
}

/// A write-system: the slave specialised to one (variable, value) pair.
#[derive(Debug, Clone)]
pub struct WritePds {
    /// The output-labelled pushdown system.
    pub pds: Pds,
    /// Per rule of `pds`, its origin in the slave.
    pub origin: Vec<WriteRuleOrigin>,
}

/// Builds the write-system of the slave for writing value `val` to
/// variable `var` (see module docs).
pub fn build_write_pds(
    slave: &NaPds,
    var: usize,
    val: Sym,
    ra: &ReadAlphabet,
) -> Result<WritePds> {
    let accept = slave.control_names.len();
    let mut control_names = slave.control_names.clone();
    control_names.push("accept".to_owned());
    let mut rules = Vec::new();
    let mut origin = Vec::new();
    for (i, r) in slave.rules.iter().enumerate() {
        let out = match r.action {
            Action::Internal => None,
            Action::Read { var: l, val: v } => Some(ra.read_sym(l, v).ok_or_else(|| {
                Error::Input(format!("slave rule {i} reads an undeclared value"))
            })?),
            Action::Write { var: l, .. } => Some(ra.kills[l]),
        };
        rules.push(PdsRule {
            from: r.from,
            top: r.top,
            out,
            to: r.to,
            push: r.push.clone(),
        });
        origin.push(WriteRuleOrigin::Step(i));
        if let Action::Write { var: wv, val: wval } = r.action {
            if wv == var && wval == val {
                rules.push(PdsRule {
                    from: r.from,
                    top: r.top,
                    out: None,
                    to: accept,
                    push: vec![r.top],
                });
                origin.push(WriteRuleOrigin::Marker(i));
            }
        }
    }
    Ok(WritePds {
        pds: Pds {
            control_names,
            stack_alphabet: slave.stack_alphabet.clone(),
            bottom: slave.bottom,
            initial: slave.initial,
            finals: vec![accept],
            rules,
        },
        origin,
    })
}

/// Subword-minimal words of the language of a normal-form grammar.
///
/// These are the minimal elements of the language under the (scattered)
/// subword order; their number is finite and they determine the upward
/// closure. They are found among the yields of derivation trees in which
/// no nonterminal repeats along a root-to-leaf path: repeating trees can
/// always be shrunk to a subword-smaller yield by cutting the repetition.
/// Intermediate word sets are antichain-pruned, which is sound because the
/// subword order is compatible with concatenation.
pub fn minimal_read_words(g: &Cfg, limits: &Limits) -> Result<Vec<Vec<Sym>>> {
    if !g.cnf {
        return Err(Error::Contract(
            "minimal-word enumeration requires a grammar in normal form".to_owned(),
        ));
    }
    if g.accepts_empty {
        // The empty word is a subword of everything.
        return Ok(vec![Vec::new()]);
    }
    let nts = g.nt_count();
    let by_head = g.productions_by_head();
    let words = nts.div_ceil(64);

    // Nonterminals reachable from each nonterminal (for memo-key masking).
    let mut reach: Vec<Vec<u64>> = vec![vec![0u64; words]; nts];
    for a in 0..nts {
        reach[a][a / 64] |= 1u64 << (a % 64);
    }
    let mut changed = true;
    while changed {
        changed = false;
        for p in &g.productions {
            let h = p.head.0 as usize;
            for s in &p.body {
                if let SymRef::N(n) = s {
                    let n = n.0 as usize;
                    // Columns of two distinct rows; an iterator cannot
                    // borrow both at once.
                    #[allow(clippy::needless_range_loop)]
                    for w in 0..words {
                        let add = reach[n][w] & !reach[h][w];
                        if add != 0 {
                            reach[h][w] |= add;
                            changed = true;
                        }
                    }
                }
            }
        }
    }

    // Memo key: a nonterminal plus the forbidden set masked down to the
    // nonterminals it can actually reach.
    type Memo = HashMap<(u32, Vec<u64>), Rc<Vec<Vec<Sym>>>>;

    struct Ctx<'a> {
        g: &'a Cfg,
        by_head: &'a [Vec<usize>],
        reach: &'a [Vec<u64>],
        memo: Memo,
        limit: usize,
        words: usize,
    }

    fn go(ctx: &mut Ctx, a: usize, forbidden: &[u64]) -> Result<Rc<Vec<Vec<Sym>>>> {
        let key_mask: Vec<u64> = (0..ctx.words)
            .map(|w| forbidden[w] & ctx.reach[a][w])
            .collect();
        if let Some(hit) = ctx.memo.get(&(a as u32, key_mask.clone())) {
            return Ok(hit.clone());
        }
        let mut child_forbidden = forbidden.to_vec();
        child_forbidden[a / 64] |= 1u64 << (a % 64);
        let mut acc: Vec<Vec<Sym>> = Vec::new();
        for &pi in &ctx.by_head[a] {
            match ctx.g.productions[pi].body.as_slice() {
                [SymRef::T(t)] => {
                    antichain_insert(&mut acc, vec![*t], ctx.limit)?;
                }
                [SymRef::N(b), SymRef::N(c)] => {
                    let (b, c) = (b.0 as usize, c.0 as usize);
                    let b_blocked = child_forbidden[b / 64] >> (b % 64) & 1 == 1;
                    let c_blocked = child_forbidden[c / 64] >> (c % 64) & 1 == 1;
                    if b_blocked || c_blocked {
                        continue;
                    }
                    let wb = go(ctx, b, &child_forbidden)?;
                    let wc = go(ctx, c, &child_forbidden)?;
                    for x in wb.iter() {
                        for y in wc.iter() {
                            let mut xy = x.clone();
                            xy.extend_from_slice(y);
                            antichain_insert(&mut acc, xy, ctx.limit)?;
                        }
                    }
                }
                _ => {
                    return Err(Error::Contract(
                        "grammar flagged as normal form has a non-normal production".to_owned(),
                    ))
                }
            }
        }
        acc.sort_by(|x, y| (x.len(), x.as_slice()).cmp(&(y.len(), y.as_slice())));
        let rc = Rc::new(acc);
        ctx.memo.insert((a as u32, key_mask), rc.clone());
        Ok(rc)
    }

    let mut ctx = Ctx {
        g,
        by_head: &by_head,
        reach: &reach,
        memo: HashMap::new(),
        limit: limits.antichain,
        words,
    };
    let top = go(&mut ctx, g.start.0 as usize, &vec![0u64; words])?;
    Ok(top.as_ref().clone())
}

/// True if `x` is a (scattered) subword of `y`.
pub fn is_subword(x: &[Sym], y: &[Sym]) -> bool {
    let mut i = 0;
    for &s in y {
        if i < x.len() && x[i] == s {
            i += 1;
        }
    }
    i == x.len()
}

fn antichain_insert(set: &mut Vec<Vec<Sym>>, w: Vec<Sym>, limit: usize) -> Result<()> {
    if set.iter().any(|e| is_subword(e, &w)) {
        return Ok(());
    }
    set.retain(|e| !is_subword(&w, e));
    if set.len() >= limit {
        return Err(Error::Limit {
            what: "minimal-word antichain",
            limit,
        });
    }
    set.push(w);
    Ok(())
}

/// The automaton of `Union_i  R* w_i[0] R* w_i[1] ... R* w_i[k] R*` over
/// the alphabet `r`: the upward closure of the given word set within `R*`.
pub fn chain_union_nfa(min_words: &[Vec<Sym>], r: &[Sym]) -> Nfa {
    let mut b = NfaBuilder::new();
    for &s in r {
        b.include_symbol(s);
    }
    let start = b.add_state();
    b.set_initial(start);
    for w in min_words {
        let states: Vec<usize> = (0..=w.len()).map(|_| b.add_state()).collect();
        b.add_eps(start, states[0]);
        for &st in &states {
            for &s in r {
                b.add_edge(st, s, st);
            }
        }
        for (i, &m) in w.iter().enumerate() {
            b.add_edge(states[i], m, states[i + 1]);
        }
        b.set_final(states[w.len()]);
    }
    b.build()
}

/// Full pipeline: slave and (variable, value) to the read-language
/// automaton over `R`.
pub fn read_language_nfa(
    slave: &NaPds,
    var: usize,
    val: Sym,
    ra: &ReadAlphabet,
    table: &mut SymbolTable,
    limits: &Limits,
) -> Result<Nfa> {
    let wp = build_write_pds(slave, var, val, ra)?;
    let (norm, _) = wp.pds.normalize();
    let g = crate::pds::pds_to_cfg(&norm, table)?;
    let cnf = g.to_cnf();
    let words = minimal_read_words(&cnf, limits)?;
    Ok(chain_union_nfa(&words, &ra.all))
}

/// Decides membership of `word` in the upward closure of `L(g)` directly
/// on the normal-form grammar, independently of the minimal-word and
/// automata machinery: a dynamic program over `(nonterminal, interval)`
/// asking "does this nonterminal derive some subword of this interval".
pub fn closure_member(g: &Cfg, word: &[Sym]) -> Result<bool> {
    if !g.cnf {
        return Err(Error::Contract(
            "closure membership requires a grammar in normal form".to_owned(),
        ));
    }
    if g.accepts_empty {
        return Ok(true);
    }
    let n = word.len();
    let nts = g.nt_count();
    // der[len][i][A]: A derives a subword of word[i .. i + len].
    let mut der = vec![vec![vec![false; nts]; n + 1]; n + 1];
    let mut binary: Vec<(usize, usize, usize)> = Vec::new();
    let mut terminal: Vec<(usize, Sym)> = Vec::new();
    for p in &g.productions {
        match p.body.as_slice() {
            [SymRef::T(t)] => terminal.push((p.head.0 as usize, *t)),
            [SymRef::N(l), SymRef::N(r)] => {
                binary.push((p.head.0 as usize, l.0 as usize, r.0 as usize))
            }
            _ => {
                return Err(Error::Contract(
                    "grammar flagged as normal form has a non-normal production".to_owned(),
                ))
            }
        }
    }
    for len in 1..=n {
        for i in 0..=(n - len) {
            for &(h, t) in &terminal {
                if !der[len][i][h] && word[i..i + len].contains(&t) {
                    der[len][i][h] = true;
                }
            }
            for split in 1..len {
                for &(h, l, r) in &binary {
                    if der[split][i][l] && der[len - split][i + split][r] {
                        der[len][i][h] = true;
                    }
                }
            }
        }
    }
    Ok(n > 0 && der[n][0][g.start.0 as usize])
}

/// A normal-form grammar of the upward closure of `L(g)` within `R*`.
///
/// Two degenerate inputs are special-cased to keep the output minimal
/// (the spine-type engine's cost is factorial in grammar size): an empty
/// language yields the empty grammar, and `L = {eps}` yields the two-rule
/// `R*` grammar. Both are detected from grammar structure alone, without
/// the minimal-word machinery. Everything else goes through the generic
/// transform: a leading `R*` plus an `R*` after every terminal.
pub fn closure_grammar(g: &Cfg, r: &[Sym]) -> Result<Cfg> {
    if !g.cnf {
        return Err(Error::Contract(
            "closure grammar requires a normal-form input".to_owned(),
        ));
    }
    let mut terminals: Vec<Sym> = g.terminals.iter().chain(r.iter()).copied().collect();
    terminals.sort_unstable();
    terminals.dedup();

    let has_nonempty = {
        // Productivity of the start symbol over the (epsilon-free) rules.
        let tmp = Cfg {
            cnf: false,
            accepts_empty: false,
            ..g.clone()
        };
        !tmp.is_empty()
    };
    if !has_nonempty {
        if g.accepts_empty {
            // Closure of {eps} is R*.
            let mut prods = vec![Production {
                head: NtId(0),
                body: vec![SymRef::N(NtId(0)), SymRef::N(NtId(0))],
            }];
            for &s in r {
                prods.push(Production {
                    head: NtId(0),
                    body: vec![SymRef::T(s)],
                });
            }
            return Ok(Cfg {
                nt_names: vec!["S".to_owned()],
                terminals,
                productions: prods,
                start: NtId(0),
                cnf: true,
                accepts_empty: true,
            });
        }
        return Ok(Cfg {
            nt_names: vec!["S".to_owned()],
            terminals,
            productions: Vec::new(),
            start: NtId(0),
            cnf: true,
            accepts_empty: false,
        });
    }

    let base = g.nt_count() as u32;
    let rs = NtId(base); // fresh: derives R*
    let start = NtId(base + 1);
    let mut nt_names = g.nt_names.clone();
    nt_names.push("Rs".to_owned());
    nt_names.push("S^".to_owned());
    let mut productions: Vec<Production> = Vec::new();
    for p in &g.productions {
        match p.body.as_slice() {
            [SymRef::T(t)] => productions.push(Production {
                head: p.head,
                body: vec![SymRef::T(*t), SymRef::N(rs)],
            }),
            _ => productions.push(p.clone()),
        }
    }
    productions.push(Production {
        head: rs,
        body: Vec::new(),
    });
    for &s in r {
        productions.push(Production {
            head: rs,
            body: vec![SymRef::T(s), SymRef::N(rs)],
        });
    }
    productions.push(Production {
        head: start,
        body: vec![SymRef::N(rs), SymRef::N(g.start)],
    });
    if g.accepts_empty {
        productions.push(Production {
            head: start,
            body: vec![SymRef::N(rs)],
        });
    }
    let general = Cfg {
        nt_names,
        terminals,
        productions,
        start,
        cnf: false,
        accepts_empty: false,
    };
    Ok(general.to_cnf())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cfg::parse_grammar;
    use crate::nfa::nfa_equivalent;
    use crate::pds::NaRule;

    /// The two-branch slave: write 1, read ok, write go; or write 2,
    /// read go, write f. Every rule keeps `$` on top of the stack.
    fn two_branch_setup() -> (NaPds, Vec<VarDecl>, ReadAlphabet, SymbolTable) {
        let mut t = SymbolTable::new();
        let bot = t.intern("$");
        let vals: Vec<Sym> = ["1", "2", "ok", "go", "f"]
            .iter()
            .map(|v| t.intern(v))
            .collect();
        let vars = vec![VarDecl {
            name: "g".to_owned(),
            values: vals.clone(),
            init: vals[0],
        }];
        let names = ["s0", "s11", "s12", "s13", "s21", "s22", "s23"];
        let w = |from: usize, to: usize, val: Sym| NaRule {
            from,
            top: bot,
            action: Action::Write { var: 0, val },
            to,
            push: vec![bot],
        };
        let rd = |from: usize, to: usize, val: Sym| NaRule {
            from,
            top: bot,
            action: Action::Read { var: 0, val },
            to,
            push: vec![bot],
        };
        let slave = NaPds {
            control_names: names.iter().map(|s| s.to_string()).collect(),
            stack_alphabet: vec![bot],
            bottom: bot,
            initial: 0,
            rules: vec![
                w(0, 1, vals[0]),  // s0  -w(1)->  s11
                rd(1, 2, vals[2]), // s11 -r(ok)-> s12
                w(2, 3, vals[3]),  // s12 -w(go)-> s13
                w(0, 4, vals[1]),  // s0  -w(2)->  s21
                rd(4, 5, vals[3]), // s21 -r(go)-> s22
                w(5, 6, vals[4]),  // s22 -w(f)->  s23
            ],
        };
        slave.validate(&vars).unwrap();
        let ra = ReadAlphabet::new(&vars, &mut t);
        (slave, vars, ra, t)
    }

    fn pipeline_min_words(
        slave: &NaPds,
        var: usize,
        val: Sym,
        ra: &ReadAlphabet,
        t: &mut SymbolTable,
    ) -> Vec<Vec<Sym>> {
        let wp = build_write_pds(slave, var, val, ra).unwrap();
        let (norm, _) = wp.pds.normalize();
        let g = crate::pds::pds_to_cfg(&norm, t).unwrap().to_cnf();
        minimal_read_words(&g, &Limits::default()).unwrap()
    }

    #[test]
    fn alphabet_names_and_classification() {
        let (_, vars, ra, t) = two_branch_setup();
        assert_eq!(ra.kills.len(), 1);
        assert_eq!(t.name(ra.kills[0]), "KILL");
        assert_eq!(t.name(ra.reads[0][2]), "r(ok)");
        assert_eq!(ra.all.len(), 6);
        assert_eq!(
            ra.classify(ra.reads[0][3]),
            Some(ReadSymKind::Read { var: 0, val: vars[0].values[3] })
        );
        assert_eq!(ra.classify(ra.kills[0]), Some(ReadSymKind::Kill { var: 0 }));
        assert_eq!(ra.read_sym(0, vars[0].values[1]), Some(ra.reads[0][1]));
    }

    #[test]
    fn qualified_read_names_on_value_collisions() {
        let mut t = SymbolTable::new();
        let one = t.intern("1");
        let two = t.intern("2");
        let vars = vec![
            VarDecl { name: "x".into(), values: vec![one, two], init: one },
            VarDecl { name: "y".into(), values: vec![one], init: one },
        ];
        let ra = ReadAlphabet::new(&vars, &mut t);
        assert_eq!(t.name(ra.reads[0][0]), "r(x.1)");
        assert_eq!(t.name(ra.reads[1][0]), "r(y.1)");
        assert_eq!(t.name(ra.reads[0][1]), "r(2)");
        assert_eq!(t.name(ra.kills[0]), "KILL_x");
        assert_eq!(t.name(ra.kills[1]), "KILL_y");
    }

    #[test]
    fn write_system_shape_for_the_go_value() {
        let (slave, vars, ra, _) = two_branch_setup();
        let go = vars[0].values[3];
        let wp = build_write_pds(&slave, 0, go, &ra).unwrap();
        // Six rule images plus one marker for the single w(go) rule.
        assert_eq!(wp.pds.rules.len(), 7);
        assert_eq!(
            wp.origin
                .iter()
                .filter(|o| matches!(o, WriteRuleOrigin::Marker(_)))
                .count(),
            1
        );
        assert!(wp.origin.contains(&WriteRuleOrigin::Marker(2)));
        // All writes (both branches) became overwrite outputs.
        let kills = wp
            .pds
            .rules
            .iter()
            .filter(|r| r.out == Some(ra.kills[0]))
            .count();
        assert_eq!(kills, 4);
        assert!(wp.pds.validate().is_ok());
    }

    #[test]
    fn minimal_words_of_the_two_branch_slave() {
        let (slave, vars, ra, mut t) = two_branch_setup();
        let v = &vars[0].values;
        let kill = ra.kills[0];
        let r_ok = ra.reads[0][2];
        let r_go = ra.reads[0][3];
        // Writing 1 or 2 is a first action: the empty word is producible.
        assert_eq!(pipeline_min_words(&slave, 0, v[0], &ra, &mut t), vec![Vec::<Sym>::new()]);
        assert_eq!(pipeline_min_words(&slave, 0, v[1], &ra, &mut t), vec![Vec::<Sym>::new()]);
        // Nothing ever writes ok.
        assert_eq!(pipeline_min_words(&slave, 0, v[2], &ra, &mut t), Vec::<Vec<Sym>>::new());
        // go needs: overwrite (the w(1)), then read ok.
        assert_eq!(
            pipeline_min_words(&slave, 0, v[3], &ra, &mut t),
            vec![vec![kill, r_ok]]
        );
        // f needs: overwrite (the w(2)), then read go.
        assert_eq!(
            pipeline_min_words(&slave, 0, v[4], &ra, &mut t),
            vec![vec![kill, r_go]]
        );
    }

    #[test]
    fn read_language_nfas_match_hand_built_chains() {
        let (slave, vars, ra, mut t) = two_branch_setup();
        let v = &vars[0].values;
        let limits = Limits::default();
        let r_star = chain_union_nfa(&[vec![]], &ra.all);
        let none = chain_union_nfa(&[], &ra.all);
        let go_ref = chain_union_nfa(&[vec![ra.kills[0], ra.reads[0][2]]], &ra.all);
        let f_ref = chain_union_nfa(&[vec![ra.kills[0], ra.reads[0][3]]], &ra.all);
        for (val, reference) in [
            (v[0], &r_star),
            (v[1], &r_star),
            (v[2], &none),
            (v[3], &go_ref),
            (v[4], &f_ref),
        ] {
            let got = read_language_nfa(&slave, 0, val, &ra, &mut t, &limits).unwrap();
            assert!(
                nfa_equivalent(&got, reference, &limits).unwrap(),
                "read language for {} differs",
                t.name(val)
            );
        }
    }

    #[test]
    fn antichain_keeps_only_subword_minimal_words() {
        let mut t = SymbolTable::new();
        let a = t.intern("a");
        let b = t.intern("b");
        let mut set = Vec::new();
        antichain_insert(&mut set, vec![a, b, a], 100).unwrap();
        antichain_insert(&mut set, vec![b, b], 100).unwrap();
        // Dominated by [a b a]? No: [a b] is a subword of [a b a]; inserting
        // the shorter word must evict the longer one.
        antichain_insert(&mut set, vec![a, b], 100).unwrap();
        assert_eq!(set, vec![vec![b, b], vec![a, b]]);
        // Now a dominated word is a no-op.
        antichain_insert(&mut set, vec![a, a, b], 100).unwrap();
        assert_eq!(set, vec![vec![b, b], vec![a, b]]);
    }

    #[test]
    fn minimal_words_cut_pumping_repetitions() {
        // L = { a^n b^n }: the only repetition-free yield is ab.
        let mut t = SymbolTable::new();
        let g = parse_grammar("S -> a S b\nS -> a b\n", &mut t)
            .unwrap()
            .to_cnf();
        let a = t.lookup("a").unwrap();
        let b = t.lookup("b").unwrap();
        assert_eq!(
            minimal_read_words(&g, &Limits::default()).unwrap(),
            vec![vec![a, b]]
        );
    }

    #[test]
    fn closure_member_agrees_with_hand_reasoning() {
        let mut t = SymbolTable::new();
        let g = parse_grammar("S -> a b\n", &mut t).unwrap().to_cnf();
        let a = t.lookup("a").unwrap();
        let b = t.lookup("b").unwrap();
        // Upward closure of {ab}: any word with an a and a later b.
        assert!(closure_member(&g, &[a, b]).unwrap());
        assert!(closure_member(&g, &[b, a, b]).unwrap());
        assert!(closure_member(&g, &[a, a, b, a]).unwrap());
        assert!(!closure_member(&g, &[a]).unwrap());
        assert!(!closure_member(&g, &[b, a]).unwrap());
        assert!(!closure_member(&g, &[]).unwrap());

        // Empty-word languages absorb everything.
        let g = parse_grammar("S -> eps\n", &mut t).unwrap().to_cnf();
        assert!(closure_member(&g, &[]).unwrap());
        assert!(closure_member(&g, &[a, b]).unwrap());
    }

    #[test]
    fn closure_grammar_special_cases_and_generic_transform() {
        let mut t = SymbolTable::new();
        let a = t.intern("a");
        let b = t.intern("b");
        let r = vec![a, b];

        // L = {eps}: closure is R*, emitted as the minimal two-rule grammar.
        let g = parse_grammar("S -> eps\n", &mut t).unwrap().to_cnf();
        let c = closure_grammar(&g, &r).unwrap();
        assert!(c.cnf && c.accepts_empty);
        assert_eq!(c.nt_count(), 1);
        assert_eq!(c.productions.len(), 3); // S -> S S | a | b
        assert!(c.member(&[b, a, b]).unwrap());

        // L = {}: closure is empty.
        let g = parse_grammar("S -> a S\n", &mut t).unwrap().to_cnf();
        let c = closure_grammar(&g, &r).unwrap();
        assert!(c.is_empty());
        assert_eq!(c.terminals, r);

        // Generic: closure of {ab} within {a,b}*.
        let g = parse_grammar("S -> a b\n", &mut t).unwrap().to_cnf();
        let c = closure_grammar(&g, &r).unwrap();
        assert!(!c.accepts_empty);
        for (w, expect) in [
            (vec![a, b], true),
            (vec![b, a, b, a], true),
            (vec![b, a], false),
            (vec![a, a], false),
            (vec![], false),
        ] {
            assert_eq!(c.member(&w).unwrap(), expect, "word {w:?}");
        }
    }
}
