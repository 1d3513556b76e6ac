//! Checked-in example programs with their expected verdicts.
//!
//! A fixture is a `.c` file whose leading `//` comments carry directives:
//!
//! ```text
//! // rename: x y
//! // expect: renamed                  or  // expect: refused <message>
//! // behaviors: 2                     (exhaustive run, standard library)
//! // extcall: blackbox:reads_global(a)
//! // diff: diverges                   (compared with the model check off)
//! ```
//!
//! A successful rename is also compared byte for byte with
//! `<name>.expected.c` when that file exists.

use std::path::{Path, PathBuf};

use thiserror::Error;

use super::config::HarnessConfig;
use super::diff::diff_behaviors;
use super::props::Engine;
use crate::ast::Program;
use crate::ident::{Ident, IdentError};
use crate::rename::{RenameError, RenameErrorKind};
use crate::semantics::{run, ExtCallModel, Mode};
use crate::syntax::{is_c_keyword, parse_str, pretty_print, ParseError};

#[derive(Debug, Error)]
pub enum TextRenameError {
    #[error("{0}")]
    Parse(#[from] ParseError),
    #[error("{0}")]
    Ident(#[from] IdentError),
    #[error("{0}")]
    Rename(#[from] RenameError),
}

/// Parses `source` and renames `old` into `new` with `engine`, after
/// checking the new name against the C keywords.
pub fn rename_source(source: &str, old: &str, new: &str, engine: &Engine) -> Result<Program, TextRenameError> {
    if is_c_keyword(new) {
        return Err(RenameError::new(RenameErrorKind::TargetIsKeyword).into());
    }
    let p = parse_str(source)?;
    let (x, y) = (Ident::intern(old)?, Ident::intern(new)?);
    Ok(engine(x, y, &p)?)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expected {
    Renamed,
    Refused(String),
}

#[derive(Debug, Clone)]
pub struct Fixture {
    pub name: String,
    pub path: PathBuf,
    pub source: String,
    pub rename: Option<(String, String)>,
    pub expect: Option<Expected>,
    pub behaviors: Option<usize>,
    pub extcalls: Vec<String>,
    pub diverges: bool,
    pub golden: Option<String>,
}

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: bad directive `{line}`")]
    Directive { path: PathBuf, line: String },
}

impl Fixture {
    pub fn load(path: &Path) -> Result<Fixture, CorpusError> {
        let io = |source| CorpusError::Io { path: path.to_path_buf(), source };
        let source = std::fs::read_to_string(path).map_err(io)?;
        let name = path.file_stem().and_then(|s| s.to_str()).unwrap_or_default().to_string();
        let golden_path = path.with_file_name(format!("{name}.expected.c"));
        let golden = golden_path.exists().then(|| std::fs::read_to_string(&golden_path)).transpose().map_err(io)?;
        let mut f = Fixture {
            name,
            path: path.to_path_buf(),
            source: source.clone(),
            rename: None,
            expect: None,
            behaviors: None,
            extcalls: vec![],
            diverges: false,
            golden,
        };
        for line in source.lines().map_while(|l| l.trim().strip_prefix("//")) {
            let bad = || CorpusError::Directive { path: path.to_path_buf(), line: line.to_string() };
            let Some((key, value)) = line.split_once(':') else { continue };
            let value = value.trim();
            match key.trim() {
                "rename" => {
                    let (old, new) = value.split_once(' ').ok_or_else(bad)?;
                    f.rename = Some((old.trim().to_string(), new.trim().to_string()));
                }
                "expect" if value == "renamed" => f.expect = Some(Expected::Renamed),
                "expect" => {
                    let msg = value.strip_prefix("refused").ok_or_else(bad)?;
                    f.expect = Some(Expected::Refused(msg.trim().to_string()));
                }
                "behaviors" => f.behaviors = Some(value.parse().map_err(|_| bad())?),
                "extcall" => f.extcalls.push(value.to_string()),
                "diff" if value == "diverges" => f.diverges = true,
                _ => return Err(bad()),
            }
        }
        Ok(f)
    }

    fn config(&self) -> Result<HarnessConfig, String> {
        let mut cfg = HarnessConfig::default();
        for spec in &self.extcalls {
            cfg.extcalls.add_spec(spec).map_err(|e| e.to_string())?;
        }
        Ok(cfg)
    }

    /// Checks every expectation the fixture declares.
    pub fn check(&self, engine: &Engine) -> Result<(), String> {
        if let (Some((old, new)), Some(expect)) = (&self.rename, &self.expect) {
            let result = rename_source(&self.source, old, new, engine);
            match (expect, &result) {
                (Expected::Renamed, Ok(r)) => {
                    if let Some(golden) = &self.golden {
                        let printed = pretty_print(r);
                        if &printed != golden {
                            return Err(format!("renamed output differs from golden file:\n{printed}"));
                        }
                    }
                }
                (Expected::Refused(msg), Err(TextRenameError::Rename(e))) if e.message() == *msg => {}
                (_, Ok(_)) => return Err(format!("expected {expect:?}, but the rename succeeded")),
                (_, Err(e)) => return Err(format!("expected {expect:?}, got error: {e}")),
            }
        }
        if let Some(n) = self.behaviors {
            let p = parse_str(&self.source).map_err(|e| e.to_string())?;
            let b = run(&p, &ExtCallModel::standard(), Mode::Exhaustive, 10_000).map_err(|e| e.to_string())?;
            if b.len() != n {
                return Err(format!("expected {n} behaviors, found {}:\n{}", b.len(), b.serialize()));
            }
        }
        if self.diverges {
            let (old, new) = self.rename.as_ref().ok_or("`diff` needs a `rename` directive")?;
            let p = parse_str(&self.source).map_err(|e| e.to_string())?;
            let out = diff_behaviors(&p, Ident::new(old), Ident::new(new), &self.config()?, true)
                .map_err(|e| e.to_string())?;
            if out.passed() {
                return Err("expected a divergence, behaviors agree".to_string());
            }
        }
        Ok(())
    }
}

/// All `.c` fixtures of `dir` except golden files, sorted by name.
pub fn load_corpus(dir: impl AsRef<Path>) -> Result<Vec<Fixture>, CorpusError> {
    let dir = dir.as_ref();
    let entries = std::fs::read_dir(dir).map_err(|source| CorpusError::Io { path: dir.to_path_buf(), source })?;
    let mut paths: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|e| e == "c") && !p.to_string_lossy().ends_with(".expected.c"))
        .collect();
    paths.sort();
    paths.iter().map(|p| Fixture::load(p)).collect()
}
