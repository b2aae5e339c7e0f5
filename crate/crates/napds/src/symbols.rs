//! String interning.
//!
//! All alphabets in this crate (stack symbols, shared-store values, read
//! symbols, grammar terminals, marked symbols) are interned into a
//! [`SymbolTable`] and handled as dense [`Sym`] ids afterwards.

use std::collections::HashMap;
use std::fmt;

/// An interned symbol. Ordering follows interning order, which makes sorted
/// symbol vectors deterministic for a fixed construction sequence.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Sym(pub u32);

impl fmt::Debug for Sym {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Sym({})", self.0)
    }
}

/// A bijection between strings and dense symbol ids.
#[derive(Debug, Clone, Default)]
pub struct SymbolTable {
    names: Vec<String>,
    index: HashMap<String, Sym>,
}

impl SymbolTable {
    /// Creates an empty table.
    pub fn new() -> Self {
        SymbolTable::default()
    }

    /// Returns the id for `name`, interning it if necessary.
    pub fn intern(&mut self, name: &str) -> Sym {
        if let Some(&s) = self.index.get(name) {
            return s;
        }
        let s = Sym(self.names.len() as u32);
        self.names.push(name.to_owned());
        self.index.insert(name.to_owned(), s);
        s
    }

    /// Returns the id for `name` if it was interned before.
    pub fn lookup(&self, name: &str) -> Option<Sym> {
        self.index.get(name).copied()
    }

    /// Returns the name of `s`.
    ///
    /// Panics if `s` was not produced by this table.
    pub fn name(&self, s: Sym) -> &str {
        &self.names[s.0 as usize]
    }

    /// Number of interned symbols.
    pub fn len(&self) -> usize {
        self.names.len()
    }

    /// True if nothing was interned yet.
    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    /// Interns `base` if free, otherwise `base#2`, `base#3`, ... until a
    /// fresh name is found. Used for generated helper symbols that must not
    /// clash with user-visible names.
    pub fn intern_fresh(&mut self, base: &str) -> Sym {
        if self.index.contains_key(base) {
            let mut k = 2usize;
            loop {
                let candidate = format!("{base}#{k}");
                if !self.index.contains_key(&candidate) {
                    return self.intern(&candidate);
                }
                k += 1;
            }
        }
        self.intern(base)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interning_is_a_bijection() {
        let mut t = SymbolTable::new();
        let a = t.intern("a");
        let b = t.intern("b");
        assert_ne!(a, b);
        assert_eq!(t.intern("a"), a);
        assert_eq!(t.name(a), "a");
        assert_eq!(t.name(b), "b");
        assert_eq!(t.len(), 2);
    }

    #[test]
    fn fresh_names_avoid_collisions() {
        let mut t = SymbolTable::new();
        let a = t.intern("x");
        let b = t.intern_fresh("x");
        assert_ne!(a, b);
        assert_eq!(t.name(b), "x#2");
        let c = t.intern_fresh("y");
        assert_eq!(t.name(c), "y");
    }
}
