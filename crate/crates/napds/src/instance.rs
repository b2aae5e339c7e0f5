//! The textual problem format: one master process, one slave process
//! template, and a shared store of finite-domain variables.
//!
//! A problem instance asks whether some number of identical slave copies,
//! run concurrently with the master under non-atomic store access, lets
//! the master reach its target control state. The format is line-based:
//!
//! ```text
//! # comment
//! var g : 1 2 ok go f init 1
//!
//! process master
//!   initial: m0
//!   target: m4
//!   rule m0 $ -> m1 $ [read g=1]
//! end
//!
//! process slave
//!   stack: x
//!   initial: s0
//!   rule s0 $ -> s1 x $ [write g=2]
//!   rule s1 x -> s1 eps
//! end
//! ```
//!
//! `$` is the bottom-of-stack marker; it is implicit in every stack
//! alphabet and must not be declared. A rule's right-hand side replaces
//! the matched top symbol, new top first; `eps` pops. The optional
//! bracketed action is `[read v=x]` or `[write v=x]`; rules carry at most
//! one action, so a read and a write never happen in the same step.
//! Rule identifiers, used in traces, number each process's rules in the
//! order written, starting from 0.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::pds::{Action, NaPds, NaRule, VarDecl};
use crate::symbols::{Sym, SymbolTable};

/// The bottom-of-stack marker as written in instance files.
pub const BOTTOM_NAME: &str = "$";

/// A parsed problem instance.
#[derive(Debug, Clone)]
pub struct ParamInstance {
    /// Interned names of stack symbols and store values.
    pub table: SymbolTable,
    /// The shared store variables.
    pub vars: Vec<VarDecl>,
    /// The unique master process.
    pub master: NaPds,
    /// The replicated slave process.
    pub slave: NaPds,
    /// The master control state to reach.
    pub target: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum ProcKind {
    Master,
    Slave,
}

struct ProcDraft {
    kind: ProcKind,
    start_line: usize,
    controls: Vec<String>,
    control_ix: HashMap<String, usize>,
    stack: Vec<Sym>,
    stack_by_name: HashMap<String, Sym>,
    initial: Option<usize>,
    target: Option<usize>,
    rules: Vec<NaRule>,
}

impl ProcDraft {
    fn new(kind: ProcKind, start_line: usize) -> ProcDraft {
        ProcDraft {
            kind,
            start_line,
            controls: Vec::new(),
            control_ix: HashMap::new(),
            stack: Vec::new(),
            stack_by_name: HashMap::new(),
            initial: None,
            target: None,
            rules: Vec::new(),
        }
    }

    fn control(&mut self, name: &str) -> usize {
        if let Some(&i) = self.control_ix.get(name) {
            return i;
        }
        let i = self.controls.len();
        self.controls.push(name.to_owned());
        self.control_ix.insert(name.to_owned(), i);
        i
    }

    fn stack_sym(&self, name: &str, bottom: Sym, ln: usize) -> Result<Sym> {
        if name == BOTTOM_NAME {
            return Ok(bottom);
        }
        self.stack_by_name.get(name).copied().ok_or_else(|| {
            Error::Input(format!(
                "line {ln}: stack symbol `{name}` is not declared in this \
                 process's `stack:` line"
            ))
        })
    }

    fn kind_name(&self) -> &'static str {
        match self.kind {
            ProcKind::Master => "master",
            ProcKind::Slave => "slave",
        }
    }

    fn finish(self, bottom: Sym, vars: &[VarDecl]) -> Result<NaPds> {
        let kind_name = self.kind_name();
        let initial = self.initial.ok_or_else(|| {
            Error::Input(format!(
                "process {} (line {}) has no `initial:` line",
                kind_name, self.start_line
            ))
        })?;
        let mut alphabet = self.stack.clone();
        alphabet.push(bottom);
        alphabet.sort_unstable();
        let p = NaPds {
            control_names: self.controls,
            stack_alphabet: alphabet,
            bottom,
            initial,
            rules: self.rules,
        };
        p.validate(vars)
            .map_err(|e| Error::Input(format!("process {kind_name}: {e}")))?;
        Ok(p)
    }
}

/// Parses an instance from its textual form.
pub fn parse_instance(text: &str) -> Result<ParamInstance> {
    let mut table = SymbolTable::new();
    let bottom = table.intern(BOTTOM_NAME);
    let mut vars: Vec<VarDecl> = Vec::new();
    let mut value_names: Vec<HashMap<String, Sym>> = Vec::new();
    let mut master: Option<ProcDraft> = None;
    let mut slave: Option<ProcDraft> = None;
    let mut current: Option<ProcDraft> = None;

    let lookup_value = |vars: &[VarDecl],
                        names: &[HashMap<String, Sym>],
                        var_name: &str,
                        val_name: &str,
                        ln: usize|
     -> Result<(usize, Sym)> {
        let var = vars
            .iter()
            .position(|v| v.name == var_name)
            .ok_or_else(|| Error::Input(format!("line {ln}: unknown variable `{var_name}`")))?;
        let val = names[var].get(val_name).copied().ok_or_else(|| {
            Error::Input(format!(
                "line {ln}: variable `{var_name}` has no value `{val_name}`"
            ))
        })?;
        Ok((var, val))
    };

    for (ln0, raw) in text.lines().enumerate() {
        let ln = ln0 + 1;
        let line = match raw.find('#') {
            Some(i) => &raw[..i],
            None => raw,
        };
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let toks: Vec<&str> = trimmed.split_whitespace().collect();
        match toks[0] {
            "var" => {
                if current.is_some() {
                    return Err(Error::Input(format!(
                        "line {ln}: variables must be declared outside process blocks"
                    )));
                }
                if toks.len() < 5 || toks[2] != ":" {
                    return Err(Error::Input(format!(
                        "line {ln}: expected `var NAME : VALUES... init VALUE`"
                    )));
                }
                let name = toks[1];
                if vars.iter().any(|v| v.name == name) {
                    return Err(Error::Input(format!(
                        "line {ln}: variable `{name}` is declared twice"
                    )));
                }
                let init_kw = toks.len() - 2;
                if toks[init_kw] != "init" {
                    return Err(Error::Input(format!(
                        "line {ln}: expected `init VALUE` at the end of the declaration"
                    )));
                }
                let value_toks = &toks[3..init_kw];
                if value_toks.is_empty() {
                    return Err(Error::Input(format!(
                        "line {ln}: variable `{name}` needs at least one value"
                    )));
                }
                let mut values = Vec::new();
                let mut by_name = HashMap::new();
                for &v in value_toks {
                    if v == BOTTOM_NAME {
                        return Err(Error::Input(format!(
                            "line {ln}: `{BOTTOM_NAME}` is reserved for the stack bottom"
                        )));
                    }
                    let s = table.intern(v);
                    if by_name.insert(v.to_owned(), s).is_some() {
                        return Err(Error::Input(format!(
                            "line {ln}: value `{v}` is listed twice"
                        )));
                    }
                    values.push(s);
                }
                let init = *by_name.get(toks[init_kw + 1]).ok_or_else(|| {
                    Error::Input(format!(
                        "line {ln}: initial value `{}` is not among the declared values",
                        toks[init_kw + 1]
                    ))
                })?;
                vars.push(VarDecl {
                    name: name.to_owned(),
                    values,
                    init,
                });
                value_names.push(by_name);
            }
            "process" => {
                if current.is_some() {
                    return Err(Error::Input(format!(
                        "line {ln}: process blocks do not nest; missing `end`?"
                    )));
                }
                if toks.len() != 2 {
                    return Err(Error::Input(format!(
                        "line {ln}: expected `process master` or `process slave`"
                    )));
                }
                let kind = match toks[1] {
                    "master" => ProcKind::Master,
                    "slave" => ProcKind::Slave,
                    other => {
                        return Err(Error::Input(format!(
                            "line {ln}: unknown process kind `{other}` \
                             (expected `master` or `slave`)"
                        )))
                    }
                };
                let taken = match kind {
                    ProcKind::Master => master.is_some(),
                    ProcKind::Slave => slave.is_some(),
                };
                if taken {
                    return Err(Error::Input(format!(
                        "line {ln}: a `process {}` block already exists",
                        toks[1]
                    )));
                }
                current = Some(ProcDraft::new(kind, ln));
            }
            "end" => {
                let draft = current.take().ok_or_else(|| {
                    Error::Input(format!("line {ln}: `end` outside a process block"))
                })?;
                match draft.kind {
                    ProcKind::Master => master = Some(draft),
                    ProcKind::Slave => slave = Some(draft),
                }
            }
            "stack:" => {
                let draft = current.as_mut().ok_or_else(|| {
                    Error::Input(format!("line {ln}: `stack:` outside a process block"))
                })?;
                for &s in &toks[1..] {
                    if s == BOTTOM_NAME {
                        return Err(Error::Input(format!(
                            "line {ln}: the bottom marker `{BOTTOM_NAME}` is implicit \
                             and must not be declared"
                        )));
                    }
                    let sym = table.intern(s);
                    if draft.stack_by_name.insert(s.to_owned(), sym).is_some() {
                        return Err(Error::Input(format!(
                            "line {ln}: stack symbol `{s}` is declared twice"
                        )));
                    }
                    draft.stack.push(sym);
                }
            }
            "initial:" => {
                let draft = current.as_mut().ok_or_else(|| {
                    Error::Input(format!("line {ln}: `initial:` outside a process block"))
                })?;
                if toks.len() != 2 {
                    return Err(Error::Input(format!(
                        "line {ln}: expected `initial: CONTROL`"
                    )));
                }
                if draft.initial.is_some() {
                    return Err(Error::Input(format!(
                        "line {ln}: `initial:` is given twice"
                    )));
                }
                let c = draft.control(toks[1]);
                draft.initial = Some(c);
            }
            "target:" => {
                let draft = current.as_mut().ok_or_else(|| {
                    Error::Input(format!("line {ln}: `target:` outside a process block"))
                })?;
                if draft.kind == ProcKind::Slave {
                    return Err(Error::Input(format!(
                        "line {ln}: `target:` belongs to the master; a slave goal \
                         must be signalled through the store and read by the master"
                    )));
                }
                if toks.len() != 2 {
                    return Err(Error::Input(format!(
                        "line {ln}: expected `target: CONTROL`"
                    )));
                }
                if draft.target.is_some() {
                    return Err(Error::Input(format!(
                        "line {ln}: `target:` is given twice"
                    )));
                }
                let c = draft.control(toks[1]);
                draft.target = Some(c);
            }
            "rule" => {
                let draft = current.as_mut().ok_or_else(|| {
                    Error::Input(format!("line {ln}: `rule` outside a process block"))
                })?;
                let (main, action) = match trimmed.find('[') {
                    Some(i) => {
                        if !trimmed.ends_with(']') {
                            return Err(Error::Input(format!(
                                "line {ln}: unterminated `[` in rule action"
                            )));
                        }
                        (&trimmed[..i], Some(&trimmed[i + 1..trimmed.len() - 1]))
                    }
                    None => (trimmed, None),
                };
                let t: Vec<&str> = main.split_whitespace().collect();
                if t.len() < 6 || t[3] != "->" {
                    return Err(Error::Input(format!(
                        "line {ln}: expected `rule FROM TOP -> TO BODY...`"
                    )));
                }
                let from = draft.control(t[1]);
                let top = draft.stack_sym(t[2], bottom, ln)?;
                let to = draft.control(t[4]);
                let body = &t[5..];
                let push: Vec<Sym> = if body == ["eps"] {
                    Vec::new()
                } else {
                    body.iter()
                        .map(|s| draft.stack_sym(s, bottom, ln))
                        .collect::<Result<_>>()?
                };
                let act = match action {
                    None => Action::Internal,
                    Some(inner) => {
                        let inner = inner.trim();
                        let (kind, rest) = inner.split_once(char::is_whitespace).ok_or_else(
                            || {
                                Error::Input(format!(
                                    "line {ln}: expected `read v=x` or `write v=x` \
                                     inside brackets"
                                ))
                            },
                        )?;
                        let (vn, xn) = rest
                            .split_once('=')
                            .map(|(a, b)| (a.trim(), b.trim()))
                            .ok_or_else(|| {
                                Error::Input(format!(
                                    "line {ln}: expected `{kind} v=x` with an `=`"
                                ))
                            })?;
                        let (var, val) = lookup_value(&vars, &value_names, vn, xn, ln)?;
                        match kind {
                            "read" => Action::Read { var, val },
                            "write" => Action::Write { var, val },
                            other => {
                                return Err(Error::Input(format!(
                                    "line {ln}: unknown action `{other}` \
                                     (expected `read` or `write`)"
                                )))
                            }
                        }
                    }
                };
                draft.rules.push(NaRule {
                    from,
                    top,
                    action: act,
                    to,
                    push,
                });
            }
            other => {
                return Err(Error::Input(format!(
                    "line {ln}: unexpected directive `{other}`"
                )));
            }
        }
    }
    if current.is_some() {
        return Err(Error::Input(
            "unexpected end of input inside a process block (missing `end`)".to_owned(),
        ));
    }
    let master = master.ok_or_else(|| Error::Input("no `process master` block".to_owned()))?;
    let slave = slave.ok_or_else(|| Error::Input("no `process slave` block".to_owned()))?;
    let target = master.target.ok_or_else(|| {
        Error::Input(format!(
            "process master (line {}) has no `target:` line",
            master.start_line
        ))
    })?;
    let master = master.finish(bottom, &vars)?;
    let slave = slave.finish(bottom, &vars)?;
    Ok(ParamInstance {
        table,
        vars,
        master,
        slave,
        target,
    })
}

fn format_process(
    out: &mut String,
    kind: &str,
    p: &NaPds,
    target: Option<usize>,
    table: &SymbolTable,
    vars: &[VarDecl],
) {
    out.push_str(&format!("process {kind}\n"));
    let extra: Vec<&str> = p
        .stack_alphabet
        .iter()
        .filter(|&&s| s != p.bottom)
        .map(|&s| table.name(s))
        .collect();
    if !extra.is_empty() {
        out.push_str(&format!("  stack: {}\n", extra.join(" ")));
    }
    out.push_str(&format!("  initial: {}\n", p.control_names[p.initial]));
    if let Some(t) = target {
        out.push_str(&format!("  target: {}\n", p.control_names[t]));
    }
    for r in &p.rules {
        let body = if r.push.is_empty() {
            "eps".to_owned()
        } else {
            r.push
                .iter()
                .map(|&s| table.name(s))
                .collect::<Vec<_>>()
                .join(" ")
        };
        let act = match r.action {
            Action::Internal => String::new(),
            Action::Read { var, val } => {
                format!(" [read {}={}]", vars[var].name, table.name(val))
            }
            Action::Write { var, val } => {
                format!(" [write {}={}]", vars[var].name, table.name(val))
            }
        };
        out.push_str(&format!(
            "  rule {} {} -> {} {}{}\n",
            p.control_names[r.from],
            table.name(r.top),
            p.control_names[r.to],
            body,
            act
        ));
    }
    out.push_str("end\n");
}

/// Renders an instance back to its textual form. Parsing the output
/// yields an instance identical to the input up to symbol numbering.
pub fn format_instance(inst: &ParamInstance) -> String {
    let mut out = String::new();
    for v in &inst.vars {
        let values: Vec<&str> = v.values.iter().map(|&s| inst.table.name(s)).collect();
        out.push_str(&format!(
            "var {} : {} init {}\n",
            v.name,
            values.join(" "),
            inst.table.name(v.init)
        ));
    }
    out.push('\n');
    format_process(
        &mut out,
        "master",
        &inst.master,
        Some(inst.target),
        &inst.table,
        &inst.vars,
    );
    out.push('\n');
    format_process(&mut out, "slave", &inst.slave, None, &inst.table, &inst.vars);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const SMALL: &str = "\
# A slave announces 2, the master acknowledges.
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
    fn parses_a_small_instance() {
        let inst = parse_instance(SMALL).unwrap();
        assert_eq!(inst.vars.len(), 1);
        assert_eq!(inst.vars[0].name, "g");
        assert_eq!(inst.vars[0].values.len(), 3);
        // Controls are numbered by first appearance: initial, then target,
        // then rule mentions.
        assert_eq!(inst.master.control_names, vec!["m0", "m2", "m1"]);
        assert_eq!(inst.target, 1);
        assert_eq!(inst.slave.control_names, vec!["s0", "s1", "s2"]);
        assert_eq!(inst.master.rules.len(), 2);
        assert_eq!(inst.slave.rules.len(), 3);
        // Rule 0 of the slave pushes x above the bottom.
        let r = &inst.slave.rules[0];
        assert_eq!(r.push.len(), 2);
        assert_eq!(r.push[1], inst.slave.bottom);
        assert!(matches!(r.action, Action::Write { var: 0, .. }));
        // Rule 2 pops.
        assert!(inst.slave.rules[2].push.is_empty());
        assert!(matches!(inst.slave.rules[2].action, Action::Read { var: 0, .. }));
    }

    #[test]
    fn formatting_reaches_a_fixpoint_after_one_parse() {
        let once = format_instance(&parse_instance(SMALL).unwrap());
        let twice = format_instance(&parse_instance(&once).unwrap());
        assert_eq!(once, twice);
    }

    #[test]
    fn rejects_malformed_instances() {
        let cases: Vec<(&str, &str)> = vec![
            ("var g : 1 init 2\n", "not among the declared values"),
            ("var g : 1 1 init 1\n", "listed twice"),
            (
                "var g : 1 init 1\nvar g : 2 init 2\n",
                "declared twice",
            ),
            ("var g : $ init $\n", "reserved"),
            ("process master\n  initial: m0\nend\n", "no `process slave`"),
            (
                "process slave\n  initial: s0\n  target: s0\nend\n",
                "belongs to the master",
            ),
            (
                "var g : 1 init 1\nprocess master\n  initial: m0\n  target: m0\n  \
                 rule m0 $ -> m0 $ [read h=1]\nend\nprocess slave\n  initial: s0\nend\n",
                "unknown variable",
            ),
            (
                "var g : 1 init 1\nprocess master\n  initial: m0\n  target: m0\n  \
                 rule m0 $ -> m0 $ [read g=9]\nend\nprocess slave\n  initial: s0\nend\n",
                "no value",
            ),
            (
                "process master\n  initial: m0\n  target: m0\n  rule m0 y -> m0 y\nend\n",
                "not declared",
            ),
            (
                "process master\n  stack: $\n  initial: m0\n  target: m0\nend\n",
                "implicit",
            ),
            (
                "process master\n  initial: m0\n  target: m0\n  rule m0 $ -> m0 eps\n\
                 end\nprocess slave\n  initial: s0\nend\n",
                "bottom",
            ),
            (
                "process master\n  stack: x\n  initial: m0\n  target: m0\n  \
                 rule m0 x -> m0 $ x\nend\nprocess slave\n  initial: s0\nend\n",
                "bottom",
            ),
            ("process master\nprocess slave\nend\nend\n", "do not nest"),
            ("bogus line\n", "unexpected directive"),
        ];
        for (text, needle) in cases {
            match parse_instance(text) {
                Err(Error::Input(msg)) => assert!(
                    msg.contains(needle),
                    "expected `{needle}` in `{msg}` for input:\n{text}"
                ),
                other => panic!("expected an input error for:\n{text}\ngot {other:?}"),
            }
        }
    }

    #[test]
    fn missing_initial_or_target_is_reported() {
        let no_init = "process master\n  target: m0\n  rule m0 $ -> m0 $\nend\n\
                       process slave\n  initial: s0\nend\n";
        match parse_instance(no_init) {
            Err(Error::Input(msg)) => assert!(msg.contains("no `initial:`"), "{msg}"),
            other => panic!("{other:?}"),
        }
        let no_target = "process master\n  initial: m0\nend\nprocess slave\n  initial: s0\nend\n";
        match parse_instance(no_target) {
            Err(Error::Input(msg)) => assert!(msg.contains("no `target:`"), "{msg}"),
            other => panic!("{other:?}"),
        }
    }
}
