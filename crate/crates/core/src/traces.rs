//! Observable events, behaviors, and their renaming.
//!
//! Accesses to non-volatile globals are part of the trace, so renaming a
//! global visibly rewrites traces. Two programs are then compared by
//! renaming one side's behaviors and checking set equality in both
//! directions.

use std::fmt::{self, Write};

use crate::ident::Ident;
use crate::rename::{change_ident_untyped, RenameError};

/// A runtime value. Strings only ever flow into external calls.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Value {
    Int(i64),
    Str(String),
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(n) => write!(f, "{n}"),
            Value::Str(s) => write!(f, "{s:?}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Event {
    ExtCall { name: Ident, args: Vec<Value>, result: i64 },
    VolLoad { var: Ident, value: i64 },
    VolStore { var: Ident, value: i64 },
    GlobRead { var: Ident, value: i64 },
    GlobWrite { var: Ident, value: i64 },
}

impl Event {
    pub fn ident(&self) -> Ident {
        match self {
            Event::ExtCall { name, .. } => *name,
            Event::VolLoad { var, .. }
            | Event::VolStore { var, .. }
            | Event::GlobRead { var, .. }
            | Event::GlobWrite { var, .. } => *var,
        }
    }

    fn with_ident(&self, ident: Ident) -> Event {
        let mut e = self.clone();
        match &mut e {
            Event::ExtCall { name, .. } => *name = ident,
            Event::VolLoad { var, .. }
            | Event::VolStore { var, .. }
            | Event::GlobRead { var, .. }
            | Event::GlobWrite { var, .. } => *var = ident,
        }
        e
    }
}

/// `KIND ident value`, with external call arguments after the result.
impl fmt::Display for Event {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Event::ExtCall { name, args, result } => {
                write!(f, "EXTCALL {name} {result}")?;
                for a in args {
                    write!(f, " {a}")?;
                }
                Ok(())
            }
            Event::VolLoad { var, value } => write!(f, "VOLLOAD {var} {value}"),
            Event::VolStore { var, value } => write!(f, "VOLSTORE {var} {value}"),
            Event::GlobRead { var, value } => write!(f, "GLOBREAD {var} {value}"),
            Event::GlobWrite { var, value } => write!(f, "GLOBWRITE {var} {value}"),
        }
    }
}

pub type Trace = Vec<Event>;

/// One event per line, each terminated by `\n`.
pub fn serialize_trace(t: &[Event]) -> String {
    let mut out = String::new();
    for e in t {
        writeln!(out, "{e}").unwrap();
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Behavior {
    Terminates { trace: Trace, code: i64 },
    GoesWrong { trace: Trace },
    /// The step budget ran out; the trace is a prefix of a longer run.
    Unknown { trace: Trace },
}

impl Behavior {
    pub fn trace(&self) -> &Trace {
        match self {
            Behavior::Terminates { trace, .. } | Behavior::GoesWrong { trace } | Behavior::Unknown { trace } => trace,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Behavior::Terminates { .. } => "Terminates",
            Behavior::GoesWrong { .. } => "GoesWrong",
            Behavior::Unknown { .. } => "Unknown",
        }
    }

    fn with_trace(&self, trace: Trace) -> Behavior {
        match self {
            Behavior::Terminates { code, .. } => Behavior::Terminates { trace, code: *code },
            Behavior::GoesWrong { .. } => Behavior::GoesWrong { trace },
            Behavior::Unknown { .. } => Behavior::Unknown { trace },
        }
    }

    /// Header line (`Terminates 3`, `GoesWrong`, `Unknown`) followed by the
    /// trace, one indented event per line.
    pub fn serialize(&self) -> String {
        let mut out = match self {
            Behavior::Terminates { code, .. } => format!("Terminates {code}\n"),
            other => format!("{}\n", other.kind()),
        };
        for e in self.trace() {
            writeln!(out, "  {e}").unwrap();
        }
        out
    }
}

impl fmt::Display for Behavior {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.serialize())
    }
}

/// A duplicate-free set of behaviors kept in the order of their serialized
/// text, so that listings are independent of interning order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct BehaviorSet {
    items: Vec<Behavior>,
}

impl BehaviorSet {
    pub fn iter(&self) -> std::slice::Iter<'_, Behavior> {
        self.items.iter()
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn contains(&self, b: &Behavior) -> bool {
        self.items.contains(b)
    }

    pub fn is_subset(&self, other: &BehaviorSet) -> bool {
        self.items.iter().all(|b| other.contains(b))
    }

    pub fn serialize(&self) -> String {
        self.items.iter().map(Behavior::serialize).collect()
    }
}

impl FromIterator<Behavior> for BehaviorSet {
    fn from_iter<I: IntoIterator<Item = Behavior>>(iter: I) -> Self {
        let mut keyed: Vec<(String, Behavior)> = iter.into_iter().map(|b| (b.serialize(), b)).collect();
        keyed.sort_by(|a, b| a.0.cmp(&b.0));
        keyed.dedup_by(|a, b| a.1 == b.1);
        BehaviorSet {
            items: keyed.into_iter().map(|(_, b)| b).collect(),
        }
    }
}

impl<'a> IntoIterator for &'a BehaviorSet {
    type Item = &'a Behavior;
    type IntoIter = std::slice::Iter<'a, Behavior>;

    fn into_iter(self) -> Self::IntoIter {
        self.items.iter()
    }
}

pub fn rename_in_trace(x: Ident, y: Ident, t: &[Event]) -> Result<Trace, RenameError> {
    t.iter().map(|e| Ok(e.with_ident(change_ident_untyped(x, y, e.ident())?))).collect()
}

pub fn rename_behavior(x: Ident, y: Ident, b: &Behavior) -> Result<Behavior, RenameError> {
    Ok(b.with_trace(rename_in_trace(x, y, b.trace())?))
}

pub fn rename_behavior_set(x: Ident, y: Ident, set: &BehaviorSet) -> Result<BehaviorSet, RenameError> {
    set.iter().map(|b| rename_behavior(x, y, b)).collect()
}

/// Forward and backward inclusion of `original` and `renamed` modulo
/// renaming `x` into `y` in traces.
pub fn behaviors_equal_up_to_renaming(
    x: Ident,
    y: Ident,
    original: &BehaviorSet,
    renamed: &BehaviorSet,
) -> Result<bool, RenameError> {
    let forward = rename_behavior_set(x, y, original)?;
    let backward = rename_behavior_set(y, x, renamed)?;
    Ok(&forward == renamed && &backward == original)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Divergence {
    /// A behavior of the original program has no renamed counterpart.
    LostBehavior { original: Behavior, expected: Behavior },
    /// A behavior of the renamed program has no original counterpart.
    NewBehavior { renamed: Behavior, expected: Behavior },
    /// A behavior's trace could not be renamed at all.
    Unrenameable { behavior: Behavior, error: RenameError },
}

impl fmt::Display for Divergence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Divergence::LostBehavior { original, expected } => write!(
                f,
                "original behavior has no counterpart in the renamed program\noriginal:\n{original}expected in renamed program:\n{expected}"
            ),
            Divergence::NewBehavior { renamed, expected } => write!(
                f,
                "renamed program has a behavior the original lacks\nrenamed:\n{renamed}expected in original program:\n{expected}"
            ),
            Divergence::Unrenameable { behavior, error } => {
                write!(f, "trace cannot be renamed ({error})\n{behavior}")
            }
        }
    }
}

/// Like [`behaviors_equal_up_to_renaming`], but names the first offending
/// behavior in canonical order.
pub fn find_divergence(x: Ident, y: Ident, original: &BehaviorSet, renamed: &BehaviorSet) -> Option<Divergence> {
    for b in original {
        match rename_behavior(x, y, b) {
            Err(error) => return Some(Divergence::Unrenameable { behavior: b.clone(), error }),
            Ok(expected) if !renamed.contains(&expected) => {
                return Some(Divergence::LostBehavior { original: b.clone(), expected })
            }
            Ok(_) => {}
        }
    }
    for b in renamed {
        match rename_behavior(y, x, b) {
            Err(error) => return Some(Divergence::Unrenameable { behavior: b.clone(), error }),
            Ok(expected) if !original.contains(&expected) => {
                return Some(Divergence::NewBehavior { renamed: b.clone(), expected })
            }
            Ok(_) => {}
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rename::RenameErrorKind;
    use proptest::prelude::*;

    fn id(s: &str) -> Ident {
        Ident::new(s)
    }

    fn printf(s: &str) -> Event {
        Event::ExtCall { name: id("printf"), args: vec![Value::Str(s.into())], result: 1 }
    }

    #[test]
    fn trace_renaming_examples() {
        let (x, y) = (id("x"), id("y"));
        let t = vec![Event::GlobRead { var: x, value: 7 }, printf("A")];
        assert_eq!(
            rename_in_trace(x, y, &t).unwrap(),
            vec![Event::GlobRead { var: y, value: 7 }, printf("A")]
        );
        let err = rename_in_trace(x, y, &[Event::GlobRead { var: y, value: 1 }]).unwrap_err();
        assert_eq!(err.kind, RenameErrorKind::AlreadyOccurs);
        assert_eq!(rename_in_trace(x, y, &[]).unwrap(), vec![]);
    }

    #[test]
    fn behavior_renaming_examples() {
        let (x, y) = (id("x"), id("y"));
        let b = Behavior::Terminates { trace: vec![Event::GlobWrite { var: x, value: 3 }], code: 0 };
        assert_eq!(
            rename_behavior(x, y, &b).unwrap(),
            Behavior::Terminates { trace: vec![Event::GlobWrite { var: y, value: 3 }], code: 0 }
        );
        let b = Behavior::GoesWrong { trace: vec![] };
        assert_eq!(rename_behavior(x, y, &b).unwrap(), b);
        let b = Behavior::Unknown { trace: vec![Event::VolLoad { var: id("v"), value: 1 }, Event::GlobRead { var: x, value: 2 }] };
        assert_eq!(
            rename_behavior(x, y, &b).unwrap(),
            Behavior::Unknown { trace: vec![Event::VolLoad { var: id("v"), value: 1 }, Event::GlobRead { var: y, value: 2 }] }
        );
    }

    #[test]
    fn set_comparison_examples() {
        let (x, y) = (id("x"), id("y"));
        let b: BehaviorSet = [Behavior::Terminates { trace: vec![Event::GlobRead { var: x, value: 0 }], code: 0 }].into_iter().collect();
        let b2: BehaviorSet = [Behavior::Terminates { trace: vec![Event::GlobRead { var: y, value: 0 }], code: 0 }].into_iter().collect();
        assert!(behaviors_equal_up_to_renaming(x, y, &b, &b2).unwrap());

        let same: BehaviorSet = [Behavior::Terminates { trace: vec![], code: 0 }].into_iter().collect();
        assert!(behaviors_equal_up_to_renaming(x, y, &same, &same).unwrap());

        let ab = Behavior::Terminates { trace: vec![printf("A"), printf("B")], code: 2 };
        let ba = Behavior::Terminates { trace: vec![printf("B"), printf("A")], code: 2 };
        let both: BehaviorSet = [ab.clone(), ba].into_iter().collect();
        let one: BehaviorSet = [ab].into_iter().collect();
        assert!(!behaviors_equal_up_to_renaming(x, y, &both, &one).unwrap());
        assert!(one.is_subset(&both));
        assert!(matches!(find_divergence(x, y, &both, &one), Some(Divergence::LostBehavior { .. })));
    }

    #[test]
    fn sets_are_deduplicated_and_canonical() {
        let a = Behavior::GoesWrong { trace: vec![] };
        let b = Behavior::Terminates { trace: vec![], code: 1 };
        let s1: BehaviorSet = [a.clone(), b.clone(), a.clone()].into_iter().collect();
        let s2: BehaviorSet = [b, a].into_iter().collect();
        assert_eq!(s1, s2);
        assert_eq!(s1.len(), 2);
    }

    #[test]
    fn serialization_is_line_based() {
        let t = vec![Event::GlobRead { var: id("g"), value: 7 }, printf("A"), Event::VolStore { var: id("v"), value: -1 }];
        assert_eq!(serialize_trace(&t), "GLOBREAD g 7\nEXTCALL printf 1 \"A\"\nVOLSTORE v -1\n");
    }

    fn arb_event() -> impl Strategy<Value = Event> {
        let names = prop::sample::select(vec!["x", "a", "b", "printf"]);
        (0..5u8, names, -3i64..10).prop_map(|(kind, name, value)| {
            let var = Ident::new(name);
            match kind {
                0 => Event::ExtCall { name: var, args: vec![Value::Int(value)], result: value },
                1 => Event::VolLoad { var, value },
                2 => Event::VolStore { var, value },
                3 => Event::GlobRead { var, value },
                _ => Event::GlobWrite { var, value },
            }
        })
    }

    proptest! {
        #[test]
        fn renaming_inverts_and_preserves_length(t in prop::collection::vec(arb_event(), 0..12)) {
            let (x, y) = (id("x"), id("fresh_y"));
            let renamed = rename_in_trace(x, y, &t).unwrap();
            prop_assert_eq!(renamed.len(), t.len());
            prop_assert_eq!(rename_in_trace(y, x, &renamed).unwrap(), t);
        }

        #[test]
        fn renaming_is_injective(t1 in prop::collection::vec(arb_event(), 0..6), t2 in prop::collection::vec(arb_event(), 0..6)) {
            let (x, y) = (id("x"), id("fresh_y"));
            if t1 != t2 {
                prop_assert_ne!(rename_in_trace(x, y, &t1).unwrap(), rename_in_trace(x, y, &t2).unwrap());
            }
        }

        #[test]
        fn behavior_renaming_keeps_constructor(t in prop::collection::vec(arb_event(), 0..6), code in -5i64..5) {
            let (x, y) = (id("x"), id("fresh_y"));
            for b in [Behavior::Terminates { trace: t.clone(), code }, Behavior::GoesWrong { trace: t.clone() }, Behavior::Unknown { trace: t.clone() }] {
                let r = rename_behavior(x, y, &b).unwrap();
                prop_assert_eq!(r.kind(), b.kind());
                if let (Behavior::Terminates { code: c1, .. }, Behavior::Terminates { code: c2, .. }) = (&b, &r) {
                    prop_assert_eq!(c1, c2);
                }
            }
        }
    }
}
