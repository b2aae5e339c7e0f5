//! Resource limits for the potentially expensive constructions.
//!
//! Every procedure that can blow up (subset construction, antichain
//! enumeration, spine-type sweeps, saturation, bounded search) takes a
//! [`Limits`] value and fails with [`crate::Error::Limit`] instead of
//! diverging.

/// Caps for the various worst-case-exponential constructions.
#[derive(Debug, Clone)]
pub struct Limits {
    /// Maximum number of subset states during determinization.
    pub det_states: usize,
    /// Maximum size of the marked alphabet of a grammar handed to the
    /// spine-type engine; the number of types enumerated grows factorially
    /// in this value (size 8 already gives 109,600 types).
    pub marked_alphabet: usize,
    /// Maximum number of states of a worklist-constructed automaton.
    pub er_states: usize,
    /// Maximum size of the antichain kept by the minimal-word enumeration.
    pub antichain: usize,
    /// Maximum number of transitions added during pushdown saturation.
    pub saturation_transitions: usize,
    /// Maximum number of configurations explored by the bounded simulator.
    pub oracle_configs: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            det_states: 1_000_000,
            marked_alphabet: 8,
            er_states: 10_000,
            antichain: 100_000,
            saturation_transitions: 1_000_000,
            oracle_configs: 1_000_000,
        }
    }
}
