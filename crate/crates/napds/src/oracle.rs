//! Bounded explicit-state simulation of an instance with a fixed number
//! of slave copies.
//!
//! This is a direct breadth-first interleaving search over concrete
//! configurations (store contents, master control and stack, one control
//! and stack per slave copy). It shares no machinery with the decision
//! procedure and serves as an independent reference for small instances:
//! a reachability verdict from the analysis can be confirmed by replaying
//! its witness here, and an unreachability verdict can be corroborated by
//! exhausting the bounded state space.
//!
//! Slave copies are interchangeable, so states are canonicalised by
//! sorting the slave configurations; traces are mapped back to fixed
//! slave identities afterwards. A trace is a sequence of `(process,
//! rule)` pairs where process 0 is the master and processes `1..=n` are
//! the slave copies; rule identifiers index the owning process's rule
//! list in declaration order.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::instance::ParamInstance;
use crate::pds::{Action, NaPds, NaRule};
use crate::symbols::Sym;

/// Result of a bounded simulation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SimOutcome {
    /// The master reached the target; the trace drives it there.
    Reached {
        /// Steps as `(process, rule)` pairs; process 0 is the master.
        trace: Vec<(usize, usize)>,
    },
    /// The target was not reached within the bounds.
    NotReached {
        /// True if the entire state space within the step bound was
        /// explored, i.e. no path of any length reaches the target with
        /// this number of slaves and this stack budget.
        exhausted: bool,
    },
    /// The configuration cap was hit; nothing can be concluded.
    Inconclusive,
}

/// One process's local state: control and stack, top first.
type Local = (usize, Vec<Sym>);

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct Config {
    store: Vec<Sym>,
    master: Local,
    /// Sorted, identities forgotten.
    slaves: Vec<Local>,
}

/// A step in canonical coordinates: the acting process is the master or
/// the slave at a given position of the sorted slave vector.
#[derive(Debug, Clone, Copy)]
enum CanonProc {
    Master,
    Slave(usize),
}

fn enabled(rule: &NaRule, local: &Local, store: &[Sym]) -> bool {
    if rule.from != local.0 || local.1.first() != Some(&rule.top) {
        return false;
    }
    match rule.action {
        Action::Internal | Action::Write { .. } => true,
        Action::Read { var, val } => store[var] == val,
    }
}

fn apply(rule: &NaRule, local: &Local, store: &mut [Sym]) -> Local {
    let mut stack = rule.push.clone();
    stack.extend_from_slice(&local.1[1..]);
    if let Action::Write { var, val } = rule.action {
        store[var] = val;
    }
    (rule.to, stack)
}

fn initial_config(inst: &ParamInstance, n: usize) -> Config {
    let store: Vec<Sym> = inst.vars.iter().map(|v| v.init).collect();
    let master = (inst.master.initial, vec![inst.master.bottom]);
    let slave = (inst.slave.initial, vec![inst.slave.bottom]);
    let mut slaves = vec![slave; n];
    slaves.sort();
    Config {
        store,
        master,
        slaves,
    }
}

/// Explores all interleavings with `n` slave copies, breadth-first, up to
/// `depth` steps, `stack_bound` symbols per process stack and
/// `max_configs` distinct canonical configurations. Successors whose
/// stack would outgrow the budget are simply not part of the searched
/// space; `exhausted` is always relative to that budget.
pub fn simulate(
    inst: &ParamInstance,
    n: usize,
    depth: usize,
    stack_bound: usize,
    max_configs: usize,
) -> Result<SimOutcome> {
    let init = initial_config(inst, n);
    if init.master.0 == inst.target {
        return Ok(SimOutcome::Reached { trace: Vec::new() });
    }
    let mut configs: Vec<Config> = vec![init.clone()];
    let mut parent: Vec<Option<(usize, CanonProc, usize)>> = vec![None];
    let mut seen: HashMap<Config, usize> = HashMap::new();
    seen.insert(init, 0);
    let mut frontier: Vec<usize> = vec![0];
    let mut steps = 0usize;
    let mut hit: Option<usize> = None;

    'search: while !frontier.is_empty() && steps < depth {
        steps += 1;
        let mut next: Vec<usize> = Vec::new();
        for &ci in &frontier {
            let c = configs[ci].clone();
            let mut succs: Vec<(CanonProc, usize, Config)> = Vec::new();
            for (ri, rule) in inst.master.rules.iter().enumerate() {
                if enabled(rule, &c.master, &c.store)
                    && c.master.1.len() - 1 + rule.push.len() <= stack_bound
                {
                    let mut store = c.store.clone();
                    let master = apply(rule, &c.master, &mut store);
                    succs.push((
                        CanonProc::Master,
                        ri,
                        Config {
                            store,
                            master,
                            slaves: c.slaves.clone(),
                        },
                    ));
                }
            }
            for pos in 0..c.slaves.len() {
                // Identical neighbours in the sorted vector yield identical
                // successors; keep the first position only.
                if pos > 0 && c.slaves[pos] == c.slaves[pos - 1] {
                    continue;
                }
                for (ri, rule) in inst.slave.rules.iter().enumerate() {
                    if enabled(rule, &c.slaves[pos], &c.store)
                        && c.slaves[pos].1.len() - 1 + rule.push.len() <= stack_bound
                    {
                        let mut store = c.store.clone();
                        let local = apply(rule, &c.slaves[pos], &mut store);
                        let mut slaves = c.slaves.clone();
                        slaves[pos] = local;
                        slaves.sort();
                        succs.push((
                            CanonProc::Slave(pos),
                            ri,
                            Config {
                                store,
                                master: c.master.clone(),
                                slaves,
                            },
                        ));
                    }
                }
            }
            for (who, ri, succ) in succs {
                if seen.contains_key(&succ) {
                    continue;
                }
                if configs.len() >= max_configs {
                    return Ok(SimOutcome::Inconclusive);
                }
                let id = configs.len();
                seen.insert(succ.clone(), id);
                let reached = succ.master.0 == inst.target;
                configs.push(succ);
                parent.push(Some((ci, who, ri)));
                if reached {
                    hit = Some(id);
                    break 'search;
                }
                next.push(id);
            }
        }
        frontier = next;
    }

    let hit = match hit {
        Some(h) => h,
        None => {
            return Ok(SimOutcome::NotReached {
                exhausted: frontier.is_empty(),
            })
        }
    };

    // Unwind the canonical steps, then re-run them with fixed identities:
    // at each step the actor is the slave at the recorded position of the
    // vector sorted by (configuration, identity).
    let mut canon: Vec<(CanonProc, usize)> = Vec::new();
    let mut cur = hit;
    while let Some((prev, who, ri)) = parent[cur] {
        canon.push((who, ri));
        cur = prev;
    }
    canon.reverse();

    let mut store: Vec<Sym> = inst.vars.iter().map(|v| v.init).collect();
    let mut master = (inst.master.initial, vec![inst.master.bottom]);
    let mut slaves: Vec<Local> = vec![(inst.slave.initial, vec![inst.slave.bottom]); n];
    let mut trace: Vec<(usize, usize)> = Vec::new();
    for (who, ri) in canon {
        match who {
            CanonProc::Master => {
                let rule = &inst.master.rules[ri];
                debug_assert!(enabled(rule, &master, &store));
                master = apply(rule, &master, &mut store);
                trace.push((0, ri));
            }
            CanonProc::Slave(pos) => {
                let mut order: Vec<usize> = (0..n).collect();
                order.sort_by(|&a, &b| (&slaves[a], a).cmp(&(&slaves[b], b)));
                let id = order[pos];
                let rule = &inst.slave.rules[ri];
                debug_assert!(enabled(rule, &slaves[id], &store));
                slaves[id] = apply(rule, &slaves[id], &mut store);
                trace.push((id + 1, ri));
            }
        }
    }
    debug_assert_eq!(master.0, inst.target);
    Ok(SimOutcome::Reached { trace })
}

/// Replays a trace against `n` slave copies. Returns true if every step
/// is enabled in sequence and the master visits the target at some point
/// (the initial configuration counts). A disabled or malformed step is an
/// input error.
pub fn replay(inst: &ParamInstance, n: usize, trace: &[(usize, usize)]) -> Result<bool> {
    let mut store: Vec<Sym> = inst.vars.iter().map(|v| v.init).collect();
    let mut master = (inst.master.initial, vec![inst.master.bottom]);
    let mut slaves: Vec<Local> = vec![(inst.slave.initial, vec![inst.slave.bottom]); n];
    let mut visited = master.0 == inst.target;
    for (step, &(proc, ri)) in trace.iter().enumerate() {
        let (p, local): (&NaPds, &mut Local) = if proc == 0 {
            (&inst.master, &mut master)
        } else if proc <= n {
            (&inst.slave, &mut slaves[proc - 1])
        } else {
            return Err(Error::Input(format!(
                "trace step {step}: process {proc} does not exist with {n} slaves"
            )));
        };
        let rule = p.rules.get(ri).ok_or_else(|| {
            Error::Input(format!("trace step {step}: rule {ri} out of range"))
        })?;
        if !enabled(rule, local, &store) {
            return Err(Error::Input(format!(
                "trace step {step}: rule {ri} of process {proc} is not enabled"
            )));
        }
        *local = apply(rule, local, &mut store);
        visited = visited || (master.0 == inst.target);
    }
    Ok(visited)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::parse_instance;

    const SMALL: &str = "\
var g : 1 2 ack init 1

process master
  initial: m0
  target: m2
  rule m0 $ -> m1 $ [read g=2]
  rule m1 $ -> m2 $ [write g=ack]
end

process slave
  stack: x
  initial: s0
  rule s0 $ -> s1 x $ [write g=2]
  rule s1 x -> s1 x x
  rule s1 x -> s2 eps [read g=ack]
end
";

    #[test]
    fn one_slave_reaches_the_target_in_three_steps() {
        let inst = parse_instance(SMALL).unwrap();
        match simulate(&inst, 1, 20, 8, 100_000).unwrap() {
            SimOutcome::Reached { trace } => {
                // Slave announces, master reads, master acknowledges.
                assert_eq!(trace.len(), 3);
                assert_eq!(trace[0], (1, 0));
                assert_eq!(trace[1], (0, 0));
                assert_eq!(trace[2], (0, 1));
                assert!(replay(&inst, 1, &trace).unwrap());
            }
            other => panic!("expected a reach, got {other:?}"),
        }
    }

    #[test]
    fn zero_slaves_exhausts_without_reaching() {
        let inst = parse_instance(SMALL).unwrap();
        assert_eq!(
            simulate(&inst, 0, 20, 8, 100_000).unwrap(),
            SimOutcome::NotReached { exhausted: true }
        );
    }

    #[test]
    fn depth_cut_is_reported_as_not_exhausted() {
        let inst = parse_instance(SMALL).unwrap();
        assert_eq!(
            simulate(&inst, 1, 2, 8, 100_000).unwrap(),
            SimOutcome::NotReached { exhausted: false }
        );
    }

    #[test]
    fn a_tight_stack_budget_prunes_and_still_exhausts() {
        let inst = parse_instance(SMALL).unwrap();
        // Budget 1 blocks the slave's opening push, so nothing can move.
        assert_eq!(
            simulate(&inst, 1, 20, 1, 100_000).unwrap(),
            SimOutcome::NotReached { exhausted: true }
        );
    }

    #[test]
    fn config_cap_yields_inconclusive() {
        let inst = parse_instance(SMALL).unwrap();
        assert_eq!(
            simulate(&inst, 3, 50, 8, 2).unwrap(),
            SimOutcome::Inconclusive
        );
    }

    #[test]
    fn replay_rejects_disabled_steps() {
        let inst = parse_instance(SMALL).unwrap();
        // The master cannot read g=2 before any slave writes it.
        match replay(&inst, 1, &[(0, 0)]) {
            Err(Error::Input(msg)) => assert!(msg.contains("not enabled"), "{msg}"),
            other => panic!("{other:?}"),
        }
        // Process index out of range.
        assert!(replay(&inst, 1, &[(2, 0)]).is_err());
        // Rule index out of range.
        assert!(replay(&inst, 1, &[(1, 9)]).is_err());
        // A valid but targetless prefix replays to false.
        assert!(!replay(&inst, 1, &[(1, 0), (0, 0)]).unwrap());
    }

    #[test]
    fn identities_stay_fixed_with_several_slaves() {
        let inst = parse_instance(SMALL).unwrap();
        match simulate(&inst, 3, 20, 8, 1_000_000).unwrap() {
            SimOutcome::Reached { trace } => {
                assert!(replay(&inst, 3, &trace).unwrap());
            }
            other => panic!("expected a reach, got {other:?}"),
        }
    }
}
