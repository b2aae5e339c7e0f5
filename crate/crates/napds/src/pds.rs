//! Pushdown systems.
//!
//! Two flavours live here. [`Pds`] is a plain pushdown system whose rules
//! optionally emit an output symbol; its runs start at `(initial, bottom)`
//! and accept by reaching a final control state with any stack, and the
//! emitted words form its language. [`NaPds`] is a pushdown process of a
//! shared-store network: instead of output symbols its rules carry an
//! [`Action`] (internal step, read of a store value, or write of one).
//!
//! Both obey the same bottom-of-stack discipline, checked by the
//! `validate` methods: a rule on a non-bottom top symbol must not push the
//! bottom symbol, and a rule on the bottom symbol must push a word that
//! ends with (exactly one) bottom. Consequently the bottom symbol is never
//! popped and always sits precisely at the bottom, so runs can never empty
//! the stack.
//!
//! The interesting operations:
//!
//! * [`Pds::normalize`] / [`NaPds::normalize`] rewrite rules so that no
//!   rule pushes more than two symbols (saturation and the grammar
//!   extraction need this), with a map back to original rule ids.
//! * [`pds_to_cfg`] extracts the emitted language into a context-free
//!   grammar by the classic control-pair construction, using a fresh
//!   *drain* control that silently pops the remaining stack so that
//!   "final control, any stack" becomes "empty stack".
//! * [`saturate_reach`] decides control-state reachability by forward
//!   saturation of a small automaton over stack contents, for any rule
//!   source implementing [`PdsSource`] — including the lazily constructed
//!   product system of the parameterised check — and returns a replayable
//!   rule trace obtained by unwinding saturation provenance.

use std::collections::hash_map::Entry;
use std::collections::{HashMap, HashSet, VecDeque};

use crate::cfg::{Cfg, NtId, Production, SymRef};
use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::symbols::{Sym, SymbolTable};

/// A shared-store variable declaration: a finite value alphabet and an
/// initial value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VarDecl {
    /// Variable name.
    pub name: String,
    /// The value alphabet (distinct, in declaration order).
    pub values: Vec<Sym>,
    /// Initial value; must occur in `values`.
    pub init: Sym,
}

/// A rule of a plain pushdown system: in control `from` with `top` on the
/// stack, optionally emit `out`, move to `to` and replace `top` by `push`
/// (first element becomes the new top).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PdsRule {
    /// Source control state.
    pub from: usize,
    /// Stack symbol that must be on top.
    pub top: Sym,
    /// Optional output label.
    pub out: Option<Sym>,
    /// Target control state.
    pub to: usize,
    /// Replacement for the top symbol; empty means pop.
    pub push: Vec<Sym>,
}

/// A plain pushdown system with output labels.
#[derive(Debug, Clone)]
pub struct Pds {
    /// Control state names.
    pub control_names: Vec<String>,
    /// Stack alphabet including the bottom symbol (sorted).
    pub stack_alphabet: Vec<Sym>,
    /// The bottom-of-stack symbol.
    pub bottom: Sym,
    /// Initial control state.
    pub initial: usize,
    /// Accepting control states.
    pub finals: Vec<usize>,
    /// All rules.
    pub rules: Vec<PdsRule>,
}

/// The action a network process performs alongside a rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Action {
    /// No store interaction.
    Internal,
    /// Enabled only when variable `var` currently holds `val`.
    Read {
        /// Store variable index.
        var: usize,
        /// Expected value.
        val: Sym,
    },
    /// Sets variable `var` to `val`.
    Write {
        /// Store variable index.
        var: usize,
        /// New value.
        val: Sym,
    },
}

/// A rule of a shared-store pushdown process.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NaRule {
    /// Source control state.
    pub from: usize,
    /// Stack symbol that must be on top.
    pub top: Sym,
    /// Store interaction.
    pub action: Action,
    /// Target control state.
    pub to: usize,
    /// Replacement for the top symbol; empty means pop.
    pub push: Vec<Sym>,
}

/// A pushdown process communicating through a shared store.
#[derive(Debug, Clone)]
pub struct NaPds {
    /// Control state names.
    pub control_names: Vec<String>,
    /// Stack alphabet including the bottom symbol (sorted).
    pub stack_alphabet: Vec<Sym>,
    /// The bottom-of-stack symbol.
    pub bottom: Sym,
    /// Initial control state.
    pub initial: usize,
    /// All rules.
    pub rules: Vec<NaRule>,
}

fn check_discipline(
    what: &str,
    rule_no: usize,
    top: Sym,
    push: &[Sym],
    bottom: Sym,
) -> Result<()> {
    if top == bottom {
        if push.last() != Some(&bottom) {
            return Err(Error::Input(format!(
                "{what} rule {rule_no}: a rule on the bottom symbol must push it back \
                 as the lowest symbol"
            )));
        }
        if push[..push.len() - 1].contains(&bottom) {
            return Err(Error::Input(format!(
                "{what} rule {rule_no}: the bottom symbol may only appear at the bottom"
            )));
        }
    } else if push.contains(&bottom) {
        return Err(Error::Input(format!(
            "{what} rule {rule_no}: only rules on the bottom symbol may push it"
        )));
    }
    Ok(())
}

fn check_syms(
    what: &str,
    rule_no: usize,
    alphabet: &[Sym],
    top: Sym,
    push: &[Sym],
) -> Result<()> {
    if alphabet.binary_search(&top).is_err() {
        return Err(Error::Input(format!(
            "{what} rule {rule_no}: top symbol not in the stack alphabet"
        )));
    }
    for &s in push {
        if alphabet.binary_search(&s).is_err() {
            return Err(Error::Input(format!(
                "{what} rule {rule_no}: pushed symbol not in the stack alphabet"
            )));
        }
    }
    Ok(())
}

impl Pds {
    /// Checks indices, alphabet membership and the bottom discipline.
    pub fn validate(&self) -> Result<()> {
        if self.stack_alphabet.binary_search(&self.bottom).is_err() {
            return Err(Error::Input(
                "bottom symbol missing from the stack alphabet".to_owned(),
            ));
        }
        let n = self.control_names.len();
        if self.initial >= n {
            return Err(Error::Input("initial control out of range".to_owned()));
        }
        for &f in &self.finals {
            if f >= n {
                return Err(Error::Input("final control out of range".to_owned()));
            }
        }
        for (i, r) in self.rules.iter().enumerate() {
            if r.from >= n || r.to >= n {
                return Err(Error::Input(format!("rule {i}: control out of range")));
            }
            check_syms("pds", i, &self.stack_alphabet, r.top, &r.push)?;
            check_discipline("pds", i, r.top, &r.push, self.bottom)?;
        }
        Ok(())
    }

    /// True if every rule pushes at most two symbols.
    pub fn is_normalized(&self) -> bool {
        self.rules.iter().all(|r| r.push.len() <= 2)
    }

    /// Splits every rule pushing more than two symbols into a chain of
    /// two-symbol pushes through fresh pass-through controls, building the
    /// stack bottom-up. The output label (if any) stays on the first rule
    /// of the chain. Returns the rewritten system and, per new rule, the
    /// index of the original rule it came from.
    pub fn normalize(&self) -> (Pds, Vec<usize>) {
        let mut out = Pds {
            control_names: self.control_names.clone(),
            stack_alphabet: self.stack_alphabet.clone(),
            bottom: self.bottom,
            initial: self.initial,
            finals: self.finals.clone(),
            rules: Vec::new(),
        };
        let mut origin = Vec::new();
        for (i, r) in self.rules.iter().enumerate() {
            if r.push.len() <= 2 {
                out.rules.push(r.clone());
                origin.push(i);
                continue;
            }
            let k = r.push.len();
            // Chain controls c_1 .. c_{k-2}; the first rule pushes the two
            // lowest symbols, each later rule pushes one more on top.
            let base = out.control_names.len();
            for j in 0..k - 2 {
                out.control_names.push(format!("norm{}#{}", i, j + 1));
            }
            out.rules.push(PdsRule {
                from: r.from,
                top: r.top,
                out: r.out,
                to: base,
                push: r.push[k - 2..].to_vec(),
            });
            origin.push(i);
            for j in 0..k - 2 {
                let to = if j + 1 < k - 2 { base + j + 1 } else { r.to };
                out.rules.push(PdsRule {
                    from: base + j,
                    top: r.push[k - 2 - j],
                    out: None,
                    to,
                    push: r.push[k - 3 - j..k - 1 - j].to_vec(),
                });
                origin.push(i);
            }
        }
        (out, origin)
    }
}

impl NaPds {
    /// Checks indices, alphabet membership, store actions against the
    /// variable declarations, and the bottom discipline.
    pub fn validate(&self, vars: &[VarDecl]) -> Result<()> {
        if self.stack_alphabet.binary_search(&self.bottom).is_err() {
            return Err(Error::Input(
                "bottom symbol missing from the stack alphabet".to_owned(),
            ));
        }
        let n = self.control_names.len();
        if self.initial >= n {
            return Err(Error::Input("initial control out of range".to_owned()));
        }
        for (i, r) in self.rules.iter().enumerate() {
            if r.from >= n || r.to >= n {
                return Err(Error::Input(format!("rule {i}: control out of range")));
            }
            check_syms("process", i, &self.stack_alphabet, r.top, &r.push)?;
            check_discipline("process", i, r.top, &r.push, self.bottom)?;
            match r.action {
                Action::Internal => {}
                Action::Read { var, val } | Action::Write { var, val } => {
                    let decl = vars.get(var).ok_or_else(|| {
                        Error::Input(format!("rule {i}: unknown variable index {var}"))
                    })?;
                    if !decl.values.contains(&val) {
                        return Err(Error::Input(format!(
                            "rule {i}: value not in the alphabet of variable {}",
                            decl.name
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// True if every rule pushes at most two symbols.
    pub fn is_normalized(&self) -> bool {
        self.rules.iter().all(|r| r.push.len() <= 2)
    }

    /// Same rewriting as [`Pds::normalize`]; the store action stays on the
    /// first rule of each chain.
    pub fn normalize(&self) -> (NaPds, Vec<usize>) {
        let mut out = NaPds {
            control_names: self.control_names.clone(),
            stack_alphabet: self.stack_alphabet.clone(),
            bottom: self.bottom,
            initial: self.initial,
            rules: Vec::new(),
        };
        let mut origin = Vec::new();
        for (i, r) in self.rules.iter().enumerate() {
            if r.push.len() <= 2 {
                out.rules.push(r.clone());
                origin.push(i);
                continue;
            }
            let k = r.push.len();
            let base = out.control_names.len();
            for j in 0..k - 2 {
                out.control_names.push(format!("norm{}#{}", i, j + 1));
            }
            out.rules.push(NaRule {
                from: r.from,
                top: r.top,
                action: r.action,
                to: base,
                push: r.push[k - 2..].to_vec(),
            });
            origin.push(i);
            for j in 0..k - 2 {
                let to = if j + 1 < k - 2 { base + j + 1 } else { r.to };
                out.rules.push(NaRule {
                    from: base + j,
                    top: r.push[k - 2 - j],
                    action: Action::Internal,
                    to,
                    push: r.push[k - 3 - j..k - 1 - j].to_vec(),
                });
                origin.push(i);
            }
        }
        (out, origin)
    }
}

/// A configuration of a plain pushdown system.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PdsConfig {
    /// Current control state.
    pub control: usize,
    /// Stack contents, top first; the last element is the bottom symbol.
    pub stack: Vec<Sym>,
}

/// Replays a rule trace from the initial configuration, failing with an
/// input error on the first disabled step. Returns the final configuration.
pub fn replay_pds(p: &Pds, trace: &[usize]) -> Result<PdsConfig> {
    let mut cfg = PdsConfig {
        control: p.initial,
        stack: vec![p.bottom],
    };
    for (step, &ri) in trace.iter().enumerate() {
        let r = p
            .rules
            .get(ri)
            .ok_or_else(|| Error::Input(format!("step {step}: rule {ri} out of range")))?;
        if r.from != cfg.control || cfg.stack.first() != Some(&r.top) {
            return Err(Error::Input(format!(
                "step {step}: rule {ri} is not enabled"
            )));
        }
        cfg.control = r.to;
        cfg.stack.splice(0..1, r.push.iter().copied());
    }
    Ok(cfg)
}

/// Extracts the emitted language of a normalized [`Pds`] into a grammar.
///
/// Nonterminals are control pairs `[p a q]` ("from `(p, a ...)` the system
/// can reach `(q, ...)` having consumed exactly `a`"), plus a start symbol.
/// A fresh drain control pops every symbol silently and is entered from any
/// final control, so acceptance-by-control becomes acceptance-by-empty
/// stack and the start production is `[initial bottom drain]`.
pub fn pds_to_cfg(p: &Pds, table: &mut SymbolTable) -> Result<Cfg> {
    if !p.is_normalized() {
        return Err(Error::Contract(
            "grammar extraction requires a normalized pushdown system".to_owned(),
        ));
    }
    p.validate()?;
    let n = p.control_names.len();
    let drain = n;
    let states = n + 1;
    let alpha = &p.stack_alphabet;
    let a_count = alpha.len();
    let sym_idx: HashMap<Sym, usize> = alpha.iter().enumerate().map(|(i, &s)| (s, i)).collect();

    // Triple nonterminal ids: [q a q'] -> 1 + ((q * states) + q') * a_count + idx(a).
    let nt_of = |q: usize, a: Sym, q2: usize| -> NtId {
        NtId((1 + (q * states + q2) * a_count + sym_idx[&a]) as u32)
    };
    let mut nt_names = vec!["start".to_owned()];
    let cname = |q: usize| -> &str {
        if q == drain {
            "drain"
        } else {
            &p.control_names[q]
        }
    };
    nt_names.resize(1 + states * states * a_count, String::new());
    for q in 0..states {
        for q2 in 0..states {
            for &a in alpha {
                let id = nt_of(q, a, q2).0 as usize;
                nt_names[id] = format!("[{} {} {}]", cname(q), table.name(a), cname(q2));
            }
        }
    }

    // Conceptual rule list: the system's own rules, a silent switch from
    // every final control to the drain, and silent drain pops. The switch
    // and pop rules are exempt from the bottom discipline on purpose.
    // Rows are (from, top, out, to, push).
    type ExtRule = (usize, Sym, Option<Sym>, usize, Vec<Sym>);
    let mut ext: Vec<ExtRule> = p
        .rules
        .iter()
        .map(|r| (r.from, r.top, r.out, r.to, r.push.clone()))
        .collect();
    for &f in &p.finals {
        for &a in alpha {
            ext.push((f, a, None, drain, vec![a]));
        }
    }
    for &a in alpha {
        ext.push((drain, a, None, drain, Vec::new()));
    }

    let mut productions = vec![Production {
        head: NtId(0),
        body: vec![SymRef::N(nt_of(p.initial, p.bottom, drain))],
    }];
    let mut terminals: Vec<Sym> = Vec::new();
    for (from, top, out, to, push) in &ext {
        let mut prefix: Vec<SymRef> = Vec::new();
        if let Some(o) = out {
            terminals.push(*o);
            prefix.push(SymRef::T(*o));
        }
        match push.as_slice() {
            [] => {
                productions.push(Production {
                    head: nt_of(*from, *top, *to),
                    body: prefix,
                });
            }
            [b] => {
                for q in 0..states {
                    let mut body = prefix.clone();
                    body.push(SymRef::N(nt_of(*to, *b, q)));
                    productions.push(Production {
                        head: nt_of(*from, *top, q),
                        body,
                    });
                }
            }
            [b, c] => {
                for q in 0..states {
                    for mid in 0..states {
                        let mut body = prefix.clone();
                        body.push(SymRef::N(nt_of(*to, *b, mid)));
                        body.push(SymRef::N(nt_of(mid, *c, q)));
                        productions.push(Production {
                            head: nt_of(*from, *top, q),
                            body,
                        });
                    }
                }
            }
            _ => unreachable!("normalization was checked above"),
        }
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

/// A rule as consumed by the saturation procedure: target control, pushed
/// word (at most two symbols) and an opaque tag identifying the rule for
/// trace reconstruction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SatRule {
    /// Opaque rule identifier, meaningful to the source.
    pub tag: usize,
    /// Target control.
    pub to: u32,
    /// Replacement for the consumed top symbol (`len() <= 2`).
    pub push: Vec<Sym>,
}

/// A supplier of pushdown rules for [`saturate_reach`]. Controls are dense
/// `u32` ids minted by the source; rule sets may be generated lazily and
/// must be deterministic per `(control, top)` pair.
pub trait PdsSource {
    /// The initial control id.
    fn initial_control(&mut self) -> Result<u32>;
    /// The bottom stack symbol.
    fn bottom(&self) -> Sym;
    /// All rules applicable in `control` with `top` on the stack.
    fn rules_from(&mut self, control: u32, top: Sym) -> Result<Vec<SatRule>>;
    /// Whether reaching `control` answers the query.
    fn is_target(&self, control: u32) -> bool;
}

/// A successful reachability answer: which control was reached and a rule
/// trace (source tags, in execution order) leading there from the initial
/// configuration.
#[derive(Debug, Clone)]
pub struct Reach {
    /// The target control that was reached.
    pub control: u32,
    /// Rule tags in execution order.
    pub trace: Vec<usize>,
}

type Trans = (u32, Sym, u32);

#[derive(Debug, Clone)]
enum TProv {
    Seed,
    Replace { tag: usize, premise: Trans },
    PushLeft { tag: usize },
    PushRight { tag: usize, premise: Trans },
    Combine { eps: (u32, u32), follow: Trans },
}

#[derive(Debug, Clone)]
struct EpsProv {
    tag: usize,
    premise: Trans,
}

/// Decides whether any target control of `src` is reachable from the
/// initial configuration `(initial, bottom)`, by forward saturation.
///
/// The automaton states are the source's controls plus one accepting state
/// and one auxiliary state per push rule; a transition `(p, a, q)` means
/// the system can reach a configuration with control `p` whose stack is `a`
/// followed by any word the automaton accepts from `q`. Pop rules create
/// epsilon pairs that are combined incrementally with outgoing transitions.
/// Every transition and epsilon pair remembers how it was first created,
/// which a backward unwinding turns into a replayable rule trace.
pub fn saturate_reach(src: &mut dyn PdsSource, limits: &Limits) -> Result<Option<Reach>> {
    let p0 = src.initial_control()?;
    if src.is_target(p0) {
        return Ok(Some(Reach {
            control: p0,
            trace: Vec::new(),
        }));
    }

    // State arena: 0 = accepting state, controls and aux states interned
    // on demand.
    const FIN: u32 = 0;
    let mut ctrl_state: HashMap<u32, u32> = HashMap::new();
    let mut state_ctrl: HashMap<u32, u32> = HashMap::new();
    let mut aux_state: HashMap<usize, u32> = HashMap::new();
    let mut next_state: u32 = 1;
    macro_rules! intern_ctrl {
        ($c:expr) => {{
            let c = $c;
            match ctrl_state.get(&c) {
                Some(&s) => s,
                None => {
                    let s = next_state;
                    next_state += 1;
                    ctrl_state.insert(c, s);
                    state_ctrl.insert(s, c);
                    s
                }
            }
        }};
    }

    let mut trans: HashMap<Trans, TProv> = HashMap::new();
    let mut out: HashMap<u32, Vec<(Sym, u32)>> = HashMap::new();
    let mut eps: HashMap<(u32, u32), EpsProv> = HashMap::new();
    let mut eps_by_second: HashMap<u32, Vec<u32>> = HashMap::new();
    let mut worklist: VecDeque<Trans> = VecDeque::new();
    let mut found: Option<Trans> = None;

    macro_rules! add_trans {
        ($t:expr, $prov:expr) => {{
            let t: Trans = $t;
            if !trans.contains_key(&t) {
                if trans.len() >= limits.saturation_transitions {
                    return Err(Error::Limit {
                        what: "saturation transitions",
                        limit: limits.saturation_transitions,
                    });
                }
                trans.insert(t, $prov);
                out.entry(t.0).or_default().push((t.1, t.2));
                worklist.push_back(t);
                if found.is_none() {
                    if let Some(&c) = state_ctrl.get(&t.0) {
                        if src.is_target(c) {
                            found = Some(t);
                        }
                    }
                }
            }
        }};
    }

    let s0 = intern_ctrl!(p0);
    add_trans!((s0, src.bottom(), FIN), TProv::Seed);

    'outer: while let Some(t) = worklist.pop_front() {
        if found.is_some() {
            break;
        }
        let (s, a, q) = t;
        if let Some(&c) = state_ctrl.get(&s) {
            let rules = src.rules_from(c, a)?;
            for r in rules {
                match r.push.as_slice() {
                    [] => {
                        if q == FIN {
                            return Err(Error::Internal(
                                "pop rule applied at the stack bottom; discipline was violated"
                                    .to_owned(),
                            ));
                        }
                        let to_state = intern_ctrl!(r.to);
                        let key = (to_state, q);
                        if let Entry::Vacant(slot) = eps.entry(key) {
                            slot.insert(EpsProv {
                                tag: r.tag,
                                premise: t,
                            });
                            eps_by_second.entry(q).or_default().push(to_state);
                            let follow: Vec<(Sym, u32)> =
                                out.get(&q).cloned().unwrap_or_default();
                            for (b, q2) in follow {
                                add_trans!(
                                    (to_state, b, q2),
                                    TProv::Combine {
                                        eps: key,
                                        follow: (q, b, q2),
                                    }
                                );
                                if found.is_some() {
                                    break 'outer;
                                }
                            }
                        }
                    }
                    [b] => {
                        let to_state = intern_ctrl!(r.to);
                        add_trans!(
                            (to_state, *b, q),
                            TProv::Replace {
                                tag: r.tag,
                                premise: t,
                            }
                        );
                        if found.is_some() {
                            break 'outer;
                        }
                    }
                    [b, c2] => {
                        let to_state = intern_ctrl!(r.to);
                        let aux = match aux_state.get(&r.tag) {
                            Some(&s) => s,
                            None => {
                                let s = next_state;
                                next_state += 1;
                                aux_state.insert(r.tag, s);
                                s
                            }
                        };
                        // Both halves must land before any early exit:
                        // the accepting-path search needs the outgoing
                        // edge of `aux` even when the left half already
                        // reaches a target control.
                        add_trans!(
                            (to_state, *b, aux),
                            TProv::PushLeft { tag: r.tag }
                        );
                        add_trans!(
                            (aux, *c2, q),
                            TProv::PushRight {
                                tag: r.tag,
                                premise: t,
                            }
                        );
                        if found.is_some() {
                            break 'outer;
                        }
                    }
                    _ => {
                        return Err(Error::Contract(
                            "saturation requires rules pushing at most two symbols".to_owned(),
                        ))
                    }
                }
            }
        }
        // New outgoing transition of `s`: combine with epsilon pairs that
        // end at `s`.
        let firsts: Vec<u32> = eps_by_second.get(&s).cloned().unwrap_or_default();
        for first in firsts {
            add_trans!(
                (first, a, q),
                TProv::Combine {
                    eps: (first, s),
                    follow: t,
                }
            );
            if found.is_some() {
                break 'outer;
            }
        }
    }

    let hit = match found {
        Some(t) => t,
        None => return Ok(None),
    };

    // Complete the accepting path from the hit transition to FIN (shortest
    // by number of edges), then unwind provenance back to the seed.
    let mut path: Vec<Trans> = vec![hit];
    if hit.2 != FIN {
        let mut prev: HashMap<u32, Trans> = HashMap::new();
        let mut queue = VecDeque::new();
        let mut seen = HashSet::new();
        queue.push_back(hit.2);
        seen.insert(hit.2);
        while let Some(s) = queue.pop_front() {
            if s == FIN {
                break;
            }
            for &(b, q2) in out.get(&s).map(|v| v.as_slice()).unwrap_or(&[]) {
                if seen.insert(q2) {
                    prev.insert(q2, (s, b, q2));
                    queue.push_back(q2);
                }
            }
        }
        if !seen.contains(&FIN) {
            return Err(Error::Internal(
                "saturation hit a target but no accepting path exists".to_owned(),
            ));
        }
        let mut suffix = Vec::new();
        let mut cur = FIN;
        while cur != hit.2 {
            let e = prev[&cur];
            suffix.push(e);
            cur = e.0;
        }
        suffix.reverse();
        path.extend(suffix);
    }

    let mut rules_rev: Vec<usize> = Vec::new();
    loop {
        let t1 = path[0];
        match trans
            .get(&t1)
            .cloned()
            .ok_or_else(|| Error::Internal("unwound through an unknown transition".to_owned()))?
        {
            TProv::Seed => break,
            TProv::Replace { tag, premise } => {
                rules_rev.push(tag);
                path[0] = premise;
            }
            TProv::PushLeft { tag } => {
                let t2 = *path.get(1).ok_or_else(|| {
                    Error::Internal("push transition without a continuation edge".to_owned())
                })?;
                match trans.get(&t2).cloned() {
                    Some(TProv::PushRight { tag: tag2, premise }) => {
                        if tag2 != tag {
                            return Err(Error::Internal(
                                "mismatched push halves during unwinding".to_owned(),
                            ));
                        }
                        rules_rev.push(tag);
                        path.splice(0..2, [premise]);
                    }
                    _ => {
                        return Err(Error::Internal(
                            "push continuation edge has unexpected provenance".to_owned(),
                        ))
                    }
                }
            }
            TProv::PushRight { .. } => {
                return Err(Error::Internal(
                    "accepting path starts inside a push".to_owned(),
                ))
            }
            TProv::Combine { eps: key, follow } => {
                let e = eps
                    .get(&key)
                    .cloned()
                    .ok_or_else(|| Error::Internal("missing epsilon pair".to_owned()))?;
                rules_rev.push(e.tag);
                path.splice(0..1, [e.premise, follow]);
            }
        }
    }
    rules_rev.reverse();
    Ok(Some(Reach {
        control: state_ctrl[&hit.0],
        trace: rules_rev,
    }))
}

/// [`PdsSource`] view of a concrete normalized [`Pds`]. Tags are rule
/// indices.
pub struct PdsRuleSource<'a> {
    pds: &'a Pds,
    index: HashMap<(u32, Sym), Vec<usize>>,
    targets: HashSet<u32>,
}

impl<'a> PdsRuleSource<'a> {
    /// Builds the index. Fails if the system is not normalized.
    pub fn new(pds: &'a Pds, targets: &[usize]) -> Result<Self> {
        if !pds.is_normalized() {
            return Err(Error::Contract(
                "saturation requires a normalized pushdown system".to_owned(),
            ));
        }
        let mut index: HashMap<(u32, Sym), Vec<usize>> = HashMap::new();
        for (i, r) in pds.rules.iter().enumerate() {
            index.entry((r.from as u32, r.top)).or_default().push(i);
        }
        Ok(PdsRuleSource {
            pds,
            index,
            targets: targets.iter().map(|&t| t as u32).collect(),
        })
    }
}

impl PdsSource for PdsRuleSource<'_> {
    fn initial_control(&mut self) -> Result<u32> {
        Ok(self.pds.initial as u32)
    }

    fn bottom(&self) -> Sym {
        self.pds.bottom
    }

    fn rules_from(&mut self, control: u32, top: Sym) -> Result<Vec<SatRule>> {
        Ok(self
            .index
            .get(&(control, top))
            .map(|v| {
                v.iter()
                    .map(|&i| SatRule {
                        tag: i,
                        to: self.pds.rules[i].to as u32,
                        push: self.pds.rules[i].push.clone(),
                    })
                    .collect()
            })
            .unwrap_or_default())
    }

    fn is_target(&self, control: u32) -> bool {
        self.targets.contains(&control)
    }
}

/// Control-state reachability for a concrete normalized [`Pds`]: returns
/// the reached target and a replayable rule trace, or `None`.
pub fn pds_control_reachable(
    pds: &Pds,
    targets: &[usize],
    limits: &Limits,
) -> Result<Option<(usize, Vec<usize>)>> {
    pds.validate()?;
    let mut src = PdsRuleSource::new(pds, targets)?;
    Ok(saturate_reach(&mut src, limits)?.map(|r| (r.control as usize, r.trace)))
}
