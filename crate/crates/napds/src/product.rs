//! The decision procedure: a product of the master with one read-language
//! automaton per (variable, value) pair, analysed by saturation.
//!
//! For every pair `(v, x)` the slave template induces a language over
//! reads and kill markers: the footprints of a single slave running from
//! its initial configuration up to a write of `x` into `v` (reads record
//! the value seen, kills record the slave's own intermediate writes).
//! Because slaves can be replicated arbitrarily, only the upward closure
//! of that language matters, and it is regular; [`Engine`] selects which
//! of the two independent constructions produces the automaton.
//!
//! The product is a single pushdown system: its stack is the master's
//! stack and its control state combines the master control, one automaton
//! state per pair, and an abstract store mapping every variable to a
//! concrete value or to "killed" (written by a slave mid-footprint, value
//! unknown). Automaton moves replay a representative footprint against
//! the abstract store; whenever the automaton of pair `(v, x)` is in an
//! accepting state, the product may perform that pair's write, setting
//! `v` to `x` concretely - and may do so repeatedly, since arbitrarily
//! many identical copies can stall just before their final write.
//!
//! Reachability of the master target in this product is decided by the
//! generic saturation in [`crate::pds`]. A positive answer is made
//! concrete by [`check`]: each accepted-write occurrence is expanded into
//! one slave copy whose rule sequence is recovered by embedding the pair's
//! consumed footprint back into the slave's own pushdown (a second, small
//! saturation), the copies are interleaved with the master at the recorded
//! instants, and the assembled trace is validated by the independent
//! simulator before it is returned. A greedy pass then drops copies whose
//! writes turn out to be redundant, and a short bounded search tries to
//! beat the remaining count outright.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::instance::ParamInstance;
use crate::limits::Limits;
use crate::nfa::Nfa;
use crate::oracle;
use crate::pds::{
    pds_to_cfg, saturate_reach, Action, NaPds, Pds, PdsSource, SatRule, VarDecl,
};
use crate::readlang::{
    build_write_pds, closure_grammar, read_language_nfa, ReadAlphabet, ReadSymKind,
    WriteRuleOrigin,
};
use crate::spines::er_nfa;
use crate::symbols::{Sym, SymbolTable};

/// Which construction turns a pair's footprint language into an automaton.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Engine {
    /// Minimal footprints, then a union of subword chains.
    Closure,
    /// Closure grammar, then the spine-type worklist construction.
    Er,
}

/// A concrete run proving reachability.
#[derive(Debug, Clone)]
pub struct Witness {
    /// Number of slave copies used.
    pub n: usize,
    /// Steps as `(process, rule)` pairs; process 0 is the master,
    /// processes `1..=n` are slave copies. Rule identifiers index the
    /// owning process's rules in declaration order.
    pub steps: Vec<(usize, usize)>,
}

/// Verdict of the analysis.
#[derive(Debug, Clone)]
pub enum CheckResult {
    /// Some number of slaves lets the master reach its target.
    Reachable(Witness),
    /// No number of slaves does.
    Unreachable,
}

/// The (variable, value) pairs of an instance, in declaration order.
pub fn store_pairs(vars: &[VarDecl]) -> Vec<(usize, Sym)> {
    let mut out = Vec::new();
    for (vi, v) in vars.iter().enumerate() {
        for &x in &v.values {
            out.push((vi, x));
        }
    }
    out
}

/// Builds the footprint automaton of every pair with the chosen engine.
/// The automata are returned in [`store_pairs`] order, over the shared
/// read/kill alphabet of `ra`.
pub fn pair_read_nfas(
    inst: &ParamInstance,
    engine: Engine,
    table: &mut SymbolTable,
    ra: &ReadAlphabet,
    limits: &Limits,
) -> Result<Vec<Nfa>> {
    let pairs = store_pairs(&inst.vars);
    let mut out = Vec::with_capacity(pairs.len());
    for &(var, val) in &pairs {
        let nfa = match engine {
            Engine::Closure => read_language_nfa(&inst.slave, var, val, ra, table, limits)?,
            Engine::Er => {
                let wp = build_write_pds(&inst.slave, var, val, ra)?;
                let (norm, _) = wp.pds.normalize();
                let g = pds_to_cfg(&norm, table)?.to_cnf();
                let closed = closure_grammar(&g, &ra.all)?;
                er_nfa(&closed, table, limits)?
            }
        };
        out.push(nfa);
    }
    Ok(out)
}

/// Store status of one variable inside the product control.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum StoreVal {
    /// Last write is known.
    Val(Sym),
    /// A slave wrote an unknown value mid-footprint.
    Killed,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct ProductControl {
    master: usize,
    nfa: Vec<u32>,
    store: Vec<StoreVal>,
}

/// What a product rule does, for trace reconstruction.
#[derive(Debug, Clone, Copy)]
enum StepInfo {
    /// A rule of the (normalized) master.
    Master { rule: usize },
    /// Pair `pair`'s automaton consumed one footprint symbol.
    Consume { pair: usize, sym: Sym },
    /// Pair `pair` performed its accepted write.
    Fire { pair: usize },
}

struct ProductSource<'a> {
    master: NaPds,
    pairs: &'a [(usize, Sym)],
    nfas: &'a [Nfa],
    ra: &'a ReadAlphabet,
    target: usize,
    controls: Vec<ProductControl>,
    ids: HashMap<ProductControl, u32>,
    infos: Vec<StepInfo>,
    cache: HashMap<(u32, Sym), Vec<SatRule>>,
}

impl<'a> ProductSource<'a> {
    fn intern(&mut self, c: ProductControl) -> u32 {
        if let Some(&i) = self.ids.get(&c) {
            return i;
        }
        let i = self.controls.len() as u32;
        self.controls.push(c.clone());
        self.ids.insert(c, i);
        i
    }

    fn rule(&mut self, info: StepInfo, to: ProductControl, push: Vec<Sym>) -> SatRule {
        let tag = self.infos.len();
        self.infos.push(info);
        SatRule {
            tag,
            to: self.intern(to),
            push,
        }
    }
}

impl<'a> PdsSource for ProductSource<'a> {
    fn initial_control(&mut self) -> Result<u32> {
        // The initial product control is interned as id 0 by `check`.
        Ok(0)
    }

    fn bottom(&self) -> Sym {
        self.master.bottom
    }

    fn rules_from(&mut self, control: u32, top: Sym) -> Result<Vec<SatRule>> {
        if let Some(r) = self.cache.get(&(control, top)) {
            return Ok(r.clone());
        }
        let c = self.controls[control as usize].clone();
        let mut out = Vec::new();
        // Master moves, gated by the abstract store.
        for ri in 0..self.master.rules.len() {
            let r = self.master.rules[ri].clone();
            if r.from != c.master || r.top != top {
                continue;
            }
            let store = match r.action {
                Action::Internal => Some(c.store.clone()),
                Action::Read { var, val } => {
                    if c.store[var] == StoreVal::Val(val) {
                        Some(c.store.clone())
                    } else {
                        None
                    }
                }
                Action::Write { var, val } => {
                    let mut s = c.store.clone();
                    s[var] = StoreVal::Val(val);
                    Some(s)
                }
            };
            if let Some(store) = store {
                let to = ProductControl {
                    master: r.to,
                    nfa: c.nfa.clone(),
                    store,
                };
                let rule = self.rule(StepInfo::Master { rule: ri }, to, r.push.clone());
                out.push(rule);
            }
        }
        // Footprint moves: one representative slave per pair replays its
        // reads (against the store) and kills (degrading the store).
        for (pi, nfa) in self.nfas.iter().enumerate() {
            let q = c.nfa[pi] as usize;
            for &(sym, q2) in nfa.edges_from(q) {
                let store = match self.ra.classify(sym) {
                    Some(ReadSymKind::Read { var, val }) => {
                        if c.store[var] == StoreVal::Val(val) {
                            Some(c.store.clone())
                        } else {
                            None
                        }
                    }
                    Some(ReadSymKind::Kill { var }) => {
                        let mut s = c.store.clone();
                        s[var] = StoreVal::Killed;
                        Some(s)
                    }
                    None => {
                        return Err(Error::Internal(format!(
                            "footprint automaton {pi} moves on a non-footprint symbol"
                        )))
                    }
                };
                if let Some(store) = store {
                    let mut nfa_states = c.nfa.clone();
                    nfa_states[pi] = q2 as u32;
                    let to = ProductControl {
                        master: c.master,
                        nfa: nfa_states,
                        store,
                    };
                    let rule = self.rule(
                        StepInfo::Consume { pair: pi, sym },
                        to,
                        vec![top],
                    );
                    out.push(rule);
                }
            }
            // Accepting state: unboundedly many copies have completed this
            // footprint and can perform the pair's write at any time.
            if nfa.is_final(q) {
                let (var, val) = self.pairs[pi];
                let mut store = c.store.clone();
                store[var] = StoreVal::Val(val);
                let to = ProductControl {
                    master: c.master,
                    nfa: c.nfa.clone(),
                    store,
                };
                let rule = self.rule(StepInfo::Fire { pair: pi }, to, vec![top]);
                out.push(rule);
            }
        }
        self.cache.insert((control, top), out.clone());
        Ok(out)
    }

    fn is_target(&self, control: u32) -> bool {
        self.controls[control as usize].master == self.target
    }
}

/// A second, tiny pushdown for witness extraction: the slave's write
/// system running alongside a position in the consumed footprint word.
/// Output rules must match the current position's symbol and advance it;
/// positions may also be skipped (other copies account for those
/// symbols). Reaching the accepting control at any position embeds a
/// concrete slave run into the footprint.
struct PositionedSource<'a> {
    wp: &'a Pds,
    word: &'a [Sym],
    accept: usize,
    infos: Vec<PosStep>,
    cache: HashMap<(u32, Sym), Vec<SatRule>>,
}

#[derive(Debug, Clone, Copy)]
enum PosStep {
    Skip,
    Rule(usize),
}

impl<'a> PositionedSource<'a> {
    fn width(&self) -> usize {
        self.word.len() + 1
    }

    fn encode(&self, ctrl: usize, pos: usize) -> u32 {
        (ctrl * self.width() + pos) as u32
    }

    fn rule(&mut self, step: PosStep, to: u32, push: Vec<Sym>) -> SatRule {
        let tag = self.infos.len();
        self.infos.push(step);
        SatRule { tag, to, push }
    }
}

impl<'a> PdsSource for PositionedSource<'a> {
    fn initial_control(&mut self) -> Result<u32> {
        Ok(self.encode(self.wp.initial, 0))
    }

    fn bottom(&self) -> Sym {
        self.wp.bottom
    }

    fn rules_from(&mut self, control: u32, top: Sym) -> Result<Vec<SatRule>> {
        if let Some(r) = self.cache.get(&(control, top)) {
            return Ok(r.clone());
        }
        let ctrl = control as usize / self.width();
        let pos = control as usize % self.width();
        let mut out = Vec::new();
        if pos < self.word.len() {
            let to = self.encode(ctrl, pos + 1);
            let rule = self.rule(PosStep::Skip, to, vec![top]);
            out.push(rule);
        }
        for (ri, r) in self.wp.rules.iter().enumerate() {
            if r.from != ctrl || r.top != top {
                continue;
            }
            let new_pos = match r.out {
                None => pos,
                Some(sym) => {
                    if pos < self.word.len() && self.word[pos] == sym {
                        pos + 1
                    } else {
                        continue;
                    }
                }
            };
            let to = self.encode(r.to, new_pos);
            let rule = self.rule(PosStep::Rule(ri), to, r.push.clone());
            out.push(rule);
        }
        self.cache.insert((control, top), out.clone());
        Ok(out)
    }

    fn is_target(&self, control: u32) -> bool {
        control as usize / self.width() == self.accept
    }
}

/// One slave action pinned to a footprint instant: any internal steps the
/// copy performs just before it, then the acting rule itself.
struct AnchoredStep {
    /// Which consumed symbol of the pair this action realizes.
    ord: usize,
    silents: Vec<usize>,
    action: usize,
}

/// The concrete run of one slave copy backing one accepted write.
struct CopyPlan {
    anchored: Vec<AnchoredStep>,
    /// Internal steps between the last anchored action and the write.
    tail: Vec<usize>,
    /// The decisive write rule, performed at the fire instant.
    decisive: usize,
}

/// A product-trace event, pre-digested for assembly.
enum Ev {
    MasterOrig(usize),
    MasterChain,
    Consume { pair: usize, ord: usize },
    Fire { fire_ix: usize },
}

struct FirePlan {
    pair: usize,
    copy: CopyPlan,
}

/// Recovers a concrete slave run for one accepted write: the footprint
/// consumed by pair `pair` up to the fire instant is `word`; the slave's
/// write system is embedded into it by saturation.
fn embed_copy(
    slave: &NaPds,
    ra: &ReadAlphabet,
    pair: (usize, Sym),
    word: &[Sym],
    limits: &Limits,
) -> Result<CopyPlan> {
    let wp = build_write_pds(slave, pair.0, pair.1, ra)?;
    let (norm, norm_origin) = wp.pds.normalize();
    let orig_ctrls = wp.pds.control_names.len();
    let accept = wp
        .pds
        .finals
        .first()
        .copied()
        .ok_or_else(|| Error::Internal("write system without accepting control".to_owned()))?;
    let mut src = PositionedSource {
        wp: &norm,
        word,
        accept,
        infos: Vec::new(),
        cache: HashMap::new(),
    };
    let reach = saturate_reach(&mut src, limits)?.ok_or_else(|| {
        Error::Internal(
            "a fired pair's consumed footprint does not embed any slave run; \
             the footprint automaton overshoots the write language"
                .to_owned(),
        )
    })?;
    let mut pos = 0usize;
    let mut pending: Vec<usize> = Vec::new();
    let mut anchored: Vec<AnchoredStep> = Vec::new();
    let mut decisive: Option<(usize, Vec<usize>)> = None;
    for &tag in &reach.trace {
        match src.infos[tag] {
            PosStep::Skip => pos += 1,
            PosStep::Rule(nri) => {
                let advances = norm.rules[nri].out.is_some();
                let from_original = norm.rules[nri].from < orig_ctrls;
                if from_original {
                    let o = norm_origin[nri];
                    match wp.origin[o] {
                        WriteRuleOrigin::Step(slave_rule) => {
                            if advances {
                                anchored.push(AnchoredStep {
                                    ord: pos,
                                    silents: std::mem::take(&mut pending),
                                    action: slave_rule,
                                });
                            } else {
                                pending.push(slave_rule);
                            }
                        }
                        WriteRuleOrigin::Marker(slave_rule) => {
                            decisive = Some((slave_rule, std::mem::take(&mut pending)));
                        }
                    }
                }
                if advances {
                    pos += 1;
                }
            }
        }
    }
    let (decisive, tail) = decisive.ok_or_else(|| {
        Error::Internal("embedded slave run ended without its write".to_owned())
    })?;
    Ok(CopyPlan {
        anchored,
        tail,
        decisive,
    })
}

/// Interleaves the master with the kept slave copies along the product
/// trace. Kept copies are numbered 1..=n in firing order.
fn assemble(
    events: &[Ev],
    fires: &[FirePlan],
    master_origin: &[usize],
    kept: &[bool],
) -> (usize, Vec<(usize, usize)>) {
    let mut proc_of: Vec<Option<usize>> = vec![None; fires.len()];
    let mut n = 0usize;
    for (i, k) in kept.iter().enumerate() {
        if *k {
            n += 1;
            proc_of[i] = Some(n);
        }
    }
    let mut steps: Vec<(usize, usize)> = Vec::new();
    for ev in events {
        match *ev {
            Ev::MasterOrig(r) => steps.push((0, master_origin[r])),
            Ev::MasterChain => {}
            Ev::Consume { pair, ord } => {
                for (fi, f) in fires.iter().enumerate() {
                    if f.pair != pair || !kept[fi] {
                        continue;
                    }
                    let p = proc_of[fi].unwrap();
                    if let Some(a) = f.copy.anchored.iter().find(|a| a.ord == ord) {
                        for &s in &a.silents {
                            steps.push((p, s));
                        }
                        steps.push((p, a.action));
                    }
                }
            }
            Ev::Fire { fire_ix } => {
                if kept[fire_ix] {
                    let p = proc_of[fire_ix].unwrap();
                    for &s in &fires[fire_ix].copy.tail {
                        steps.push((p, s));
                    }
                    steps.push((p, fires[fire_ix].copy.decisive));
                }
            }
        }
    }
    (n, steps)
}

/// A recorded run of the product system reaching the master target, as
/// returned by [`ParamProduct::reach`]. Feed it to [`reconstruct_witness`]
/// to obtain a concrete trace with an explicit number of slave copies.
#[derive(Debug, Clone)]
pub struct ProductTrace {
    infos: Vec<StepInfo>,
}

/// The product of a master with one footprint automaton per (variable,
/// value) pair: one pushdown system whose control combines the master
/// control, the automaton states, and an abstract store. Its control
/// space is unfolded lazily during [`ParamProduct::reach`], never
/// materialized eagerly.
pub struct ParamProduct<'a> {
    src: ProductSource<'a>,
}

/// Assembles the product system of an instance. `nfas` must be the
/// footprint automata in [`store_pairs`] order over the alphabet of `ra`,
/// e.g. from [`pair_read_nfas`].
pub fn build_param_pds<'a>(
    inst: &ParamInstance,
    nfas: &'a [Nfa],
    ra: &'a ReadAlphabet,
    pairs: &'a [(usize, Sym)],
) -> ParamProduct<'a> {
    let (master_norm, _) = inst.master.normalize();
    let initial = ProductControl {
        master: master_norm.initial,
        nfa: nfas.iter().map(|n| n.initial() as u32).collect(),
        store: inst.vars.iter().map(|v| StoreVal::Val(v.init)).collect(),
    };
    let mut ids = HashMap::new();
    ids.insert(initial.clone(), 0u32);
    ParamProduct {
        src: ProductSource {
            master: master_norm,
            pairs,
            nfas,
            ra,
            target: inst.target,
            controls: vec![initial],
            ids,
            infos: Vec::new(),
            cache: HashMap::new(),
        },
    }
}

impl ParamProduct<'_> {
    /// Decides whether the product reaches the master target, by
    /// saturation; on success the returned trace records every product
    /// step for witness reconstruction.
    pub fn reach(&mut self, limits: &Limits) -> Result<Option<ProductTrace>> {
        let reach = saturate_reach(&mut self.src, limits)?;
        Ok(reach.map(|r| ProductTrace {
            infos: r.trace.iter().map(|&t| self.src.infos[t]).collect(),
        }))
    }
}

/// Turns a product trace into a concrete validated witness: one slave
/// copy per accepted write, each copy's run recovered by embedding the
/// consumed footprint back into the slave's own pushdown, interleaved
/// with the master at the recorded instants. The assembly is validated by
/// the independent simulator, then shrunk.
pub fn reconstruct_witness(
    inst: &ParamInstance,
    trace: &ProductTrace,
    limits: &Limits,
) -> Result<Witness> {
    let mut table = inst.table.clone();
    let ra = ReadAlphabet::new(&inst.vars, &mut table);
    let pairs = store_pairs(&inst.vars);
    let (master_norm, master_origin) = inst.master.normalize();
    reconstruct(
        inst,
        &ra,
        &pairs,
        &master_origin,
        inst.master.control_names.len(),
        &master_norm,
        &trace.infos,
        limits,
    )
}

/// Turns a product trace into a validated witness, then shrinks it.
#[allow(clippy::too_many_arguments)]
fn reconstruct(
    inst: &ParamInstance,
    ra: &ReadAlphabet,
    pairs: &[(usize, Sym)],
    master_origin: &[usize],
    master_orig_ctrls: usize,
    master_norm: &NaPds,
    trace_infos: &[StepInfo],
    limits: &Limits,
) -> Result<Witness> {
    // Digest the trace: per-pair consumed words and fire prefixes.
    let mut consumed: Vec<Vec<Sym>> = vec![Vec::new(); pairs.len()];
    let mut events: Vec<Ev> = Vec::new();
    let mut fire_specs: Vec<(usize, usize)> = Vec::new(); // (pair, prefix length)
    for info in trace_infos {
        match *info {
            StepInfo::Master { rule } => {
                if master_norm.rules[rule].from < master_orig_ctrls {
                    events.push(Ev::MasterOrig(rule));
                } else {
                    events.push(Ev::MasterChain);
                }
            }
            StepInfo::Consume { pair, sym, .. } => {
                events.push(Ev::Consume {
                    pair,
                    ord: consumed[pair].len(),
                });
                consumed[pair].push(sym);
            }
            StepInfo::Fire { pair } => {
                events.push(Ev::Fire {
                    fire_ix: fire_specs.len(),
                });
                fire_specs.push((pair, consumed[pair].len()));
            }
        }
    }

    // Embed one slave run per accepted write.
    let mut fires: Vec<FirePlan> = Vec::new();
    for &(pair, prefix) in &fire_specs {
        let copy = embed_copy(
            &inst.slave,
            ra,
            pairs[pair],
            &consumed[pair][..prefix],
            limits,
        )?;
        fires.push(FirePlan { pair, copy });
    }

    // The full assembly must replay; anything else is a construction bug.
    let mut kept = vec![true; fires.len()];
    let (n, steps) = assemble(&events, &fires, master_origin, &kept);
    match oracle::replay(inst, n, &steps) {
        Ok(true) => {}
        other => {
            return Err(Error::Internal(format!(
                "reconstructed witness failed to replay: {other:?}"
            )))
        }
    }

    // Drop copies whose writes turn out to be redundant, newest first.
    for i in (0..fires.len()).rev() {
        kept[i] = false;
        let (n2, steps2) = assemble(&events, &fires, master_origin, &kept);
        if !matches!(oracle::replay(inst, n2, &steps2), Ok(true)) {
            kept[i] = true;
        }
    }
    let (mut n, mut steps) = assemble(&events, &fires, master_origin, &kept);

    // Try to beat the count with a short independent search.
    if n > 0 {
        let depth = (2 * steps.len() + 16).clamp(32, 256);
        for n2 in 0..n.min(5) {
            if let Ok(oracle::SimOutcome::Reached { trace }) =
                oracle::simulate(inst, n2, depth, depth + 1, 50_000)
            {
                if matches!(oracle::replay(inst, n2, &trace), Ok(true)) {
                    n = n2;
                    steps = trace;
                    break;
                }
            }
        }
    }
    Ok(Witness { n, steps })
}

/// Decides parameterised reachability of the master target and, when
/// reachable, returns a concrete validated witness.
pub fn check(inst: &ParamInstance, engine: Engine, limits: &Limits) -> Result<CheckResult> {
    let mut table = inst.table.clone();
    let ra = ReadAlphabet::new(&inst.vars, &mut table);
    let pairs = store_pairs(&inst.vars);
    let nfas = pair_read_nfas(inst, engine, &mut table, &ra, limits)?;
    let mut product = build_param_pds(inst, &nfas, &ra, &pairs);
    let trace = match product.reach(limits)? {
        None => return Ok(CheckResult::Unreachable),
        Some(t) => t,
    };
    let witness = reconstruct_witness(inst, &trace, limits)?;
    match oracle::replay(inst, witness.n, &witness.steps) {
        Ok(true) => Ok(CheckResult::Reachable(witness)),
        other => Err(Error::Internal(format!(
            "final witness failed validation: {other:?}"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::parse_instance;

    pub const FLAGSHIP: &str = include_str!("../../../instances/handshake.napds");

    #[test]
    fn flagship_is_reachable_with_two_copies() {
        let inst = parse_instance(FLAGSHIP).unwrap();
        match check(&inst, Engine::Closure, &Limits::default()).unwrap() {
            CheckResult::Reachable(w) => {
                assert_eq!(w.n, 2);
                assert!(oracle::replay(&inst, w.n, &w.steps).unwrap());
            }
            CheckResult::Unreachable => panic!("expected reachable"),
        }
    }

    #[test]
    fn the_staged_pipeline_matches_check() {
        let limits = Limits::default();
        let inst = parse_instance(FLAGSHIP).unwrap();
        let mut table = inst.table.clone();
        let ra = ReadAlphabet::new(&inst.vars, &mut table);
        let pairs = store_pairs(&inst.vars);
        let nfas = pair_read_nfas(&inst, Engine::Closure, &mut table, &ra, &limits).unwrap();
        let mut product = build_param_pds(&inst, &nfas, &ra, &pairs);
        let trace = product
            .reach(&limits)
            .unwrap()
            .expect("product reaches the target");
        let w = reconstruct_witness(&inst, &trace, &limits).unwrap();
        assert_eq!(w.n, 2);
        assert!(oracle::replay(&inst, w.n, &w.steps).unwrap());
    }

    #[test]
    fn the_product_of_an_unreachable_instance_has_no_run() {
        let limits = Limits::default();
        let cut = FLAGSHIP
            .lines()
            .filter(|l| !(l.contains("s21") || l.contains("s22")))
            .collect::<Vec<_>>()
            .join("\n");
        let inst = parse_instance(&cut).unwrap();
        let mut table = inst.table.clone();
        let ra = ReadAlphabet::new(&inst.vars, &mut table);
        let pairs = store_pairs(&inst.vars);
        let nfas = pair_read_nfas(&inst, Engine::Closure, &mut table, &ra, &limits).unwrap();
        let mut product = build_param_pds(&inst, &nfas, &ra, &pairs);
        assert!(product.reach(&limits).unwrap().is_none());
    }

    #[test]
    fn removing_the_second_branch_makes_it_unreachable() {
        let cut = FLAGSHIP
            .lines()
            .filter(|l| !(l.contains("s21") || l.contains("s22")))
            .collect::<Vec<_>>()
            .join("\n");
        let inst = parse_instance(&cut).unwrap();
        assert!(matches!(
            check(&inst, Engine::Closure, &Limits::default()).unwrap(),
            CheckResult::Unreachable
        ));
    }

    #[test]
    fn both_engines_decide_a_miniature_instance() {
        let text = "\
var g : 1 go init 1

process master
  initial: m0
  target: m1
  rule m0 $ -> m1 $ [read g=go]
end

process slave
  initial: s0
  rule s0 $ -> s1 $ [write g=go]
end
";
        let inst = parse_instance(text).unwrap();
        for engine in [Engine::Closure, Engine::Er] {
            match check(&inst, engine, &Limits::default()).unwrap() {
                CheckResult::Reachable(w) => {
                    assert_eq!(w.n, 1, "{engine:?}");
                    assert!(oracle::replay(&inst, w.n, &w.steps).unwrap());
                }
                CheckResult::Unreachable => panic!("{engine:?}: expected reachable"),
            }
        }
    }

    #[test]
    fn master_alone_needs_no_copies() {
        let text = "\
var g : 0 init 0

process master
  stack: x
  initial: m0
  target: m2
  rule m0 $ -> m1 x x $
  rule m1 x -> m2 eps
end

process slave
  initial: s0
  rule s0 $ -> s0 $
end
";
        let inst = parse_instance(text).unwrap();
        match check(&inst, Engine::Closure, &Limits::default()).unwrap() {
            CheckResult::Reachable(w) => {
                assert_eq!(w.n, 0);
                assert_eq!(w.steps, vec![(0, 0), (0, 1)]);
            }
            CheckResult::Unreachable => panic!("expected reachable"),
        }
    }

    #[test]
    fn unwritten_values_stay_unreadable() {
        let text = "\
var g : 1 2 init 1

process master
  initial: m0
  target: m1
  rule m0 $ -> m1 $ [read g=2]
end

process slave
  initial: s0
  rule s0 $ -> s1 $ [write g=1]
end
";
        let inst = parse_instance(text).unwrap();
        assert!(matches!(
            check(&inst, Engine::Closure, &Limits::default()).unwrap(),
            CheckResult::Unreachable
        ));
    }

    #[test]
    fn witnesses_survive_deep_stacks_and_wide_pushes() {
        let text = "\
var g : 0 1 ok done init 0

process master
  initial: m0
  target: m3
  rule m0 $ -> m1 $ [read g=1]
  rule m1 $ -> m2 $ [write g=ok]
  rule m2 $ -> m3 $ [read g=done]
end

process slave
  stack: x y
  initial: s0
  rule s0 $ -> s1 x y $ [write g=1]
  rule s1 x -> s2 eps [read g=ok]
  rule s2 y -> s3 eps
  rule s3 $ -> s4 $ [write g=done]
end
";
        let inst = parse_instance(text).unwrap();
        match check(&inst, Engine::Closure, &Limits::default()).unwrap() {
            CheckResult::Reachable(w) => {
                assert_eq!(w.n, 1);
                assert!(oracle::replay(&inst, w.n, &w.steps).unwrap());
            }
            CheckResult::Unreachable => panic!("expected reachable"),
        }
    }
}
