//! Differential and property-based checking of the rename engine.

mod config;
mod corpus;
mod diff;
mod gen;
mod props;

pub use config::{ConfigError, HarnessConfig};
pub use corpus::{load_corpus, rename_source, CorpusError, Expected, Fixture, TextRenameError};
pub use diff::{diff_behaviors, DiffError, DiffOutcome};
pub use gen::{generate, GenProgram};
pub use props::{check_one, run_properties, standard_engine, Engine, Outcome, PropConfig, PropReport, Property};
