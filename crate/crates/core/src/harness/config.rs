//! Harness configuration and its key-value file format.
//!
//! ```text
//! # comment
//! mode = exhaustive        # or deterministic
//! budget = 10000           # steps per run, at least 1
//! seed = 42
//! extcall = printf:pure    # repeatable
//! extcall = blackbox:reads_global(a)
//! ```
//!
//! Without any `extcall` line the standard library model is used.

use std::path::Path;

use thiserror::Error;

use crate::semantics::{ExtCallModel, ExtSpecError, Mode};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HarnessConfig {
    pub mode: Mode,
    pub step_budget: usize,
    pub extcalls: ExtCallModel,
    pub seed: u64,
}

impl Default for HarnessConfig {
    fn default() -> Self {
        HarnessConfig {
            mode: Mode::Exhaustive,
            step_budget: 10_000,
            extcalls: ExtCallModel::standard(),
            seed: 42,
        }
    }
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: {source}")]
    ExtCall { line: usize, source: ExtSpecError },
    #[error("step budget must be at least 1")]
    ZeroBudget,
    #[error("cannot read config: {0}")]
    Io(#[from] std::io::Error),
}

impl HarnessConfig {
    pub fn load(path: impl AsRef<Path>) -> Result<HarnessConfig, ConfigError> {
        HarnessConfig::parse(&std::fs::read_to_string(path)?)
    }

    pub fn parse(text: &str) -> Result<HarnessConfig, ConfigError> {
        let mut cfg = HarnessConfig::default();
        let mut extcalls: Option<ExtCallModel> = None;
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let syntax = |message: String| ConfigError::Syntax { line, message };
            let (key, value) = content
                .split_once('=')
                .ok_or_else(|| syntax(format!("expected `key = value`, found `{content}`")))?;
            let (key, value) = (key.trim(), value.trim());
            match key {
                "mode" => cfg.mode = value.parse().map_err(syntax)?,
                "budget" => {
                    cfg.step_budget = value.parse().map_err(|_| syntax(format!("invalid budget `{value}`")))?
                }
                "seed" => cfg.seed = value.parse().map_err(|_| syntax(format!("invalid seed `{value}`")))?,
                "extcall" => extcalls
                    .get_or_insert_with(ExtCallModel::empty)
                    .add_spec(value)
                    .map_err(|source| ConfigError::ExtCall { line, source })?,
                other => return Err(syntax(format!("unknown key `{other}`"))),
            }
        }
        if let Some(model) = extcalls {
            cfg.extcalls = model;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.step_budget == 0 {
            return Err(ConfigError::ZeroBudget);
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ident::Ident;
    use crate::semantics::ExtBehavior;

    #[test]
    fn parses_every_key() {
        let cfg = HarnessConfig::parse(
            "# demo\nmode = deterministic\nbudget = 50 # short\nseed=7\n\nextcall = blackbox:reads_global(a)\n",
        )
        .unwrap();
        assert_eq!(cfg.mode, Mode::Deterministic);
        assert_eq!(cfg.step_budget, 50);
        assert_eq!(cfg.seed, 7);
        assert_eq!(cfg.extcalls.get(Ident::new("blackbox")), Some(&ExtBehavior::ReadsGlobal(Ident::new("a"))));
        assert_eq!(cfg.extcalls.get(Ident::new("printf")), None);
    }

    #[test]
    fn defaults_keep_standard_library() {
        let cfg = HarnessConfig::parse("").unwrap();
        assert_eq!(cfg, HarnessConfig::default());
    }

    #[test]
    fn rejects_bad_lines() {
        for text in ["mode = sometimes", "budget = -1", "budget = 0", "colour = red", "just words", "extcall = f"] {
            assert!(HarnessConfig::parse(text).is_err(), "{text}");
        }
        let err = HarnessConfig::parse("\n\nseed = x").unwrap_err();
        assert!(err.to_string().starts_with("line 3:"), "{err}");
    }
}
