//! Interned identifiers.
//!
//! Syntax trees never carry identifier text. Every name is interned once into
//! a process-wide table and referred to by a small positive integer, so the
//! rename engine works purely on numbers and the keyword check has to happen
//! on source text before interning.

use std::collections::HashMap;
use std::fmt;
use std::num::NonZeroU32;
use std::sync::{Arc, LazyLock, RwLock};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("malformed identifier `{0}`")]
pub struct IdentError(pub String);

/// An interned identifier. Two idents are equal iff their source texts are.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Ident(NonZeroU32);

#[derive(Default)]
struct Interner {
    by_name: HashMap<Arc<str>, Ident>,
    names: Vec<Arc<str>>,
}

static INTERNER: LazyLock<RwLock<Interner>> = LazyLock::new(Default::default);

/// C lexical rule for identifiers: `[A-Za-z_][A-Za-z0-9_]*`.
pub fn is_valid_identifier(text: &str) -> bool {
    let mut chars = text.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl Ident {
    /// Interns `text`, returning the existing ident if it was seen before.
    pub fn intern(text: &str) -> Result<Ident, IdentError> {
        if !is_valid_identifier(text) {
            return Err(IdentError(text.to_string()));
        }
        if let Some(id) = INTERNER.read().unwrap().by_name.get(text) {
            return Ok(*id);
        }
        let mut table = INTERNER.write().unwrap();
        // Another thread may have won the race between the two locks.
        if let Some(id) = table.by_name.get(text) {
            return Ok(*id);
        }
        let raw = u32::try_from(table.names.len() + 1).expect("intern table overflow");
        let id = Ident(NonZeroU32::new(raw).unwrap());
        let name: Arc<str> = Arc::from(text);
        table.names.push(name.clone());
        table.by_name.insert(name, id);
        Ok(id)
    }

    /// Interns a name known to be valid. Panics otherwise.
    pub fn new(text: &str) -> Ident {
        Ident::intern(text).unwrap_or_else(|e| panic!("{e}"))
    }

    pub fn id(self) -> u32 {
        self.0.get()
    }

    pub fn name(self) -> Arc<str> {
        INTERNER.read().unwrap().names[self.0.get() as usize - 1].clone()
    }
}

impl fmt::Display for Ident {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl fmt::Debug for Ident {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}#{}", self.name(), self.id())
    }
}
