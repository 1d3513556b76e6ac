use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::ident::Ident;
use crate::traces::Value;

/// What an external (library) function does when called.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ExtBehavior {
    /// Prints its arguments and returns the number of characters written.
    Pure,
    /// Returns the current value of a program global it reads directly.
    ReadsGlobal(Ident),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid external call spec `{0}` (expected `name:pure` or `name:reads_global(var)`)")]
pub struct ExtSpecError(pub String);

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ExtCallModel {
    oracles: BTreeMap<Ident, ExtBehavior>,
}

impl ExtCallModel {
    pub fn empty() -> ExtCallModel {
        ExtCallModel::default()
    }

    /// `printf`, `puts` and `putchar`, all pure.
    pub fn standard() -> ExtCallModel {
        let mut m = ExtCallModel::empty();
        for name in ["printf", "puts", "putchar"] {
            m.insert(Ident::new(name), ExtBehavior::Pure);
        }
        m
    }

    pub fn insert(&mut self, name: Ident, behavior: ExtBehavior) {
        self.oracles.insert(name, behavior);
    }

    pub fn with(mut self, name: Ident, behavior: ExtBehavior) -> ExtCallModel {
        self.insert(name, behavior);
        self
    }

    pub fn get(&self, name: Ident) -> Option<&ExtBehavior> {
        self.oracles.get(&name)
    }

    /// Parses `name:pure` or `name:reads_global(var)` and adds it.
    pub fn add_spec(&mut self, spec: &str) -> Result<(), ExtSpecError> {
        let bad = || ExtSpecError(spec.to_string());
        let (name, behavior) = spec.split_once(':').ok_or_else(bad)?;
        let name = Ident::intern(name.trim()).map_err(|_| bad())?;
        let behavior = behavior.trim();
        let behavior = if behavior == "pure" {
            ExtBehavior::Pure
        } else if let Some(var) = behavior.strip_prefix("reads_global(").and_then(|r| r.strip_suffix(')')) {
            ExtBehavior::ReadsGlobal(Ident::intern(var.trim()).map_err(|_| bad())?)
        } else {
            return Err(bad());
        };
        self.insert(name, behavior);
        Ok(())
    }

    /// Library code neither reads program globals nor uses either name, so a
    /// rename of `x` into `y` cannot be observed through it.
    pub fn is_compliant(&self, x: Ident, y: Ident) -> bool {
        self.oracles
            .iter()
            .all(|(name, b)| *name != x && *name != y && *b == ExtBehavior::Pure)
    }

    pub fn iter(&self) -> impl Iterator<Item = (Ident, &ExtBehavior)> {
        self.oracles.iter().map(|(i, b)| (*i, b))
    }
}

impl fmt::Display for ExtBehavior {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtBehavior::Pure => write!(f, "pure"),
            ExtBehavior::ReadsGlobal(g) => write!(f, "reads_global({g})"),
        }
    }
}

/// Characters a printf-like function writes for `args`.
pub(crate) fn printed_length(args: &[Value]) -> i64 {
    args.iter()
        .map(|a| match a {
            Value::Int(n) => n.to_string().len(),
            Value::Str(s) => s.chars().count(),
        })
        .sum::<usize>() as i64
}
