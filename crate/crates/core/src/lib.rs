//! Renaming of global variables in a small subset of C, together with an
//! interpreter that lets the renaming be checked against program behavior.

pub mod ast;
pub mod harness;
pub mod ident;
pub mod rename;
pub mod semantics;
pub mod syntax;
pub mod traces;

pub use ast::{CType, Expr, Function, GlobDef, GlobVar, Program, Statement};
pub use ident::Ident;
pub use rename::{rename_globvar_hard, RenameError, RenameErrorKind, RenameRequest};
pub use semantics::{run, ExtCallModel, Mode};
pub use syntax::{is_c_keyword, parse, parse_str, pretty_print, ParseError, SourceFile};
pub use traces::{Behavior, BehaviorSet, Event, Trace, Value};
