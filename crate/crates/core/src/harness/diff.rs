//! Differential comparison of a program with its renamed version.

use thiserror::Error;

use super::config::HarnessConfig;
use crate::ast::Program;
use crate::ident::Ident;
use crate::rename::{rename_globvar_hard, RenameError};
use crate::semantics::{run, RunError};
use crate::traces::{find_divergence, BehaviorSet, Divergence};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiffOutcome {
    pub renamed_program: Program,
    pub original: BehaviorSet,
    pub renamed: BehaviorSet,
    pub divergence: Option<Divergence>,
}

impl DiffOutcome {
    pub fn passed(&self) -> bool {
        self.divergence.is_none()
    }
}

#[derive(Debug, Error)]
pub enum DiffError {
    #[error(transparent)]
    Rename(#[from] RenameError),
    #[error("external call model is not safe for renaming `{x}` into `{y}`: some library function reads program globals or uses one of the names (use --unsafe to compare anyway)")]
    NonCompliantModel { x: Ident, y: Ident },
    #[error("{which} program: {source}")]
    Run { which: &'static str, source: RunError },
}

/// Renames `x` into `y` and compares the behaviors of both programs under
/// `cfg`. Unless `unsafe_model` is set, a library model that could observe
/// the rename is refused up front.
pub fn diff_behaviors(
    p: &Program,
    x: Ident,
    y: Ident,
    cfg: &HarnessConfig,
    unsafe_model: bool,
) -> Result<DiffOutcome, DiffError> {
    if !unsafe_model && !cfg.extcalls.is_compliant(x, y) {
        return Err(DiffError::NonCompliantModel { x, y });
    }
    let renamed_program = rename_globvar_hard(x, y, p)?;
    let exec = |which, prog: &Program| {
        run(prog, &cfg.extcalls, cfg.mode, cfg.step_budget).map_err(|source| DiffError::Run { which, source })
    };
    let original = exec("original", p)?;
    let renamed = exec("renamed", &renamed_program)?;
    let divergence = find_divergence(x, y, &original, &renamed);
    Ok(DiffOutcome { renamed_program, original, renamed, divergence })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semantics::ExtBehavior;
    use crate::syntax::parse_str;
    use crate::traces::Behavior;

    const BLACKBOX: &str = "int a = 0; int main(void) { a = 1; blackbox(); return a; }";

    #[test]
    fn compliant_rename_passes() {
        let p = parse_str("int x; int f(int y) { return y + 1; } int main(void) { x = 2; return f(x); }").unwrap();
        let out = diff_behaviors(&p, Ident::new("x"), Ident::new("y"), &HarnessConfig::default(), false).unwrap();
        assert!(out.passed());
        assert_eq!(out.original.len(), 1);
    }

    #[test]
    fn library_reading_global_is_refused_then_diverges() {
        let p = parse_str(BLACKBOX).unwrap();
        let mut cfg = HarnessConfig::default();
        cfg.extcalls.insert(Ident::new("blackbox"), ExtBehavior::ReadsGlobal(Ident::new("a")));
        let (a, b) = (Ident::new("a"), Ident::new("b"));
        assert!(matches!(diff_behaviors(&p, a, b, &cfg, false), Err(DiffError::NonCompliantModel { .. })));
        let out = diff_behaviors(&p, a, b, &cfg, true).unwrap();
        assert!(!out.passed());
        assert!(out.renamed.iter().all(|b| matches!(b, Behavior::GoesWrong { .. })));
    }
}
