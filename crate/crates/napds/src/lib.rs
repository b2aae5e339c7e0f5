//! Parameterised reachability for networks of pushdown processes that
//! communicate through shared variables with non-atomic writes.
//!
//! The library answers the question: given a *master* pushdown process and
//! a *slave* pushdown process template over a shared store, is there some
//! number `n` of identical slave copies such that the master can reach a
//! designated control state? The store is read and written non-atomically
//! (no process can read and write in one step), which makes the question
//! decidable: each value a slave network can supply is characterised by a
//! regular language of reads-and-overwrites, and the whole network
//! collapses into a single pushdown system (the master) running against a
//! product of finite automata.
//!
//! Module map:
//!
//! * [`symbols`], [`nfa`], [`mod@cfg`] — the language-theoretic ground floor.
//! * [`pds`] — pushdown systems: discipline validation, normalization,
//!   language extraction into a grammar, and forward saturation.
//! * [`readlang`] — per-value read languages of the slave and their
//!   regular upward closures (the "closure" engine).
//! * [`spines`] — an alternative regularization engine built from
//!   spine types of derivation trees (the "er" engine).
//! * [`product`] — the master/automata product and the reachability check
//!   itself, including witness reconstruction.
//! * [`oracle`] — an independent bounded explorer of the concrete
//!   semantics, used for validation and as the `simulate` command.
//! * [`instance`] — the `.napds` problem-instance text format.

#![forbid(unsafe_code)]

pub mod cfg;
pub mod error;
pub mod instance;
pub mod limits;
pub mod nfa;
pub mod oracle;
pub mod pds;
pub mod product;
pub mod readlang;
pub mod spines;
pub mod symbols;

pub use error::{Error, Result};
pub use instance::{format_instance, parse_instance, ParamInstance};
pub use limits::Limits;
pub use oracle::{replay, simulate, SimOutcome};
pub use product::{
    build_param_pds, check, reconstruct_witness, CheckResult, Engine, ParamProduct,
    ProductTrace, Witness,
};
pub use symbols::{Sym, SymbolTable};
