use std::collections::HashMap;
use std::fmt;
use std::sync::{OnceLock, RwLock};

/// An interned variable name.
///
/// Ids are process-local; anything that must be stable across runs (rendering,
/// ordering of output) goes through [`Symbol::name`].
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Symbol(u32);

/// The Laurent variable, the only symbol allowed negative exponents.
pub const RHO: Symbol = Symbol(0);
/// The variable of the orthogonal polynomials and generating functions.
pub const X: Symbol = Symbol(1);

struct Interner {
    names: Vec<&'static str>,
    ids: HashMap<&'static str, u32>,
}

fn interner() -> &'static RwLock<Interner> {
    static INTERNER: OnceLock<RwLock<Interner>> = OnceLock::new();
    INTERNER.get_or_init(|| {
        let names = vec!["rho", "x"];
        let ids = names.iter().enumerate().map(|(i, n)| (*n, i as u32)).collect();
        RwLock::new(Interner { names, ids })
    })
}

impl Symbol {
    pub fn new(name: &str) -> Symbol {
        if let Some(&id) = interner().read().unwrap().ids.get(name) {
            return Symbol(id);
        }
        let mut guard = interner().write().unwrap();
        if let Some(&id) = guard.ids.get(name) {
            return Symbol(id);
        }
        let leaked: &'static str = Box::leak(name.to_owned().into_boxed_str());
        let id = guard.names.len() as u32;
        guard.names.push(leaked);
        guard.ids.insert(leaked, id);
        Symbol(id)
    }

    pub fn name(self) -> &'static str {
        interner().read().unwrap().names[self.0 as usize]
    }

    pub fn is_rho(self) -> bool {
        self == RHO
    }

    /// Identifier syntax accepted by the parser: `[A-Za-z][A-Za-z0-9_]*`.
    pub fn is_valid_name(name: &str) -> bool {
        let mut chars = name.chars();
        matches!(chars.next(), Some(c) if c.is_ascii_alphabetic())
            && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
    }
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}
