//! Lockstep check that renaming commutes with every reachable transition.

use std::collections::{HashSet, VecDeque};
use std::fmt;

use super::extcall::ExtCallModel;
use super::rename_state::rename_state;
use super::state::ExecState;
use super::step::{step, Mode};
use super::{initial_state, RunError};
use crate::ast::Program;
use crate::ident::Ident;
use crate::rename::RenameError;
use crate::traces::{rename_in_trace, serialize_trace, Event};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CommutCounterexample {
    /// The renamed initial state is not the initial state of the renamed
    /// program.
    Initial { expected: Option<ExecState>, actual: Option<ExecState> },
    /// A reachable state, or a trace, could not be renamed.
    Unrenameable { state: ExecState, error: RenameError },
    /// `from --events--> to` has no renamed counterpart.
    MissingTransition { from: ExecState, events: Vec<Event>, to: ExecState },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommutReport {
    pub states: usize,
    pub transitions: usize,
    pub counterexample: Option<CommutCounterexample>,
}

impl CommutReport {
    pub fn passed(&self) -> bool {
        self.counterexample.is_none()
    }
}

impl fmt::Display for CommutCounterexample {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let show = |s: &Option<ExecState>| s.as_ref().map_or("none".to_string(), ToString::to_string);
        match self {
            CommutCounterexample::Initial { expected, actual } => write!(
                f,
                "initial states differ: renamed program starts at {}, renamed state is {}",
                show(expected),
                show(actual)
            ),
            CommutCounterexample::Unrenameable { state, error } => write!(f, "cannot rename {state}: {error}"),
            CommutCounterexample::MissingTransition { from, events, to } => {
                write!(f, "no renamed counterpart for {from} -> {to}")?;
                if !events.is_empty() {
                    write!(f, " emitting\n{}", serialize_trace(events).trim_end())?;
                }
                Ok(())
            }
        }
    }
}

/// Explores up to `budget` reachable states of `p` breadth-first and checks
/// each transition against the transitions of the renamed program.
pub fn check_step_commut(
    x: Ident,
    y: Ident,
    p: &Program,
    renamed: &Program,
    model: &ExtCallModel,
    budget: usize,
) -> Result<CommutReport, RunError> {
    let init = initial_state(p)?;
    let expected = initial_state(renamed).ok();
    let actual = rename_state(x, y, &init).ok();
    let mut report = CommutReport { states: 0, transitions: 0, counterexample: None };
    if expected.is_none() || expected != actual {
        report.counterexample = Some(CommutCounterexample::Initial { expected, actual });
        return Ok(report);
    }
    let mut seen = HashSet::new();
    let mut queue = VecDeque::from([init.clone()]);
    seen.insert(init);
    while let Some(st1) = queue.pop_front() {
        if report.states >= budget {
            break;
        }
        report.states += 1;
        let tr_st1 = match rename_state(x, y, &st1) {
            Ok(s) => s,
            Err(error) => {
                report.counterexample = Some(CommutCounterexample::Unrenameable { state: st1, error });
                return Ok(report);
            }
        };
        let renamed_succs = step(&tr_st1, model, Mode::Exhaustive);
        for (events, st2) in step(&st1, model, Mode::Exhaustive) {
            report.transitions += 1;
            let renamed_pair = rename_in_trace(x, y, &events)
                .map_err(|e| (st1.clone(), e))
                .and_then(|t| rename_state(x, y, &st2).map(|s| (t, s)).map_err(|e| (st2.clone(), e)));
            let (tr_events, tr_st2) = match renamed_pair {
                Ok(pair) => pair,
                Err((state, error)) => {
                    report.counterexample = Some(CommutCounterexample::Unrenameable { state, error });
                    return Ok(report);
                }
            };
            if !renamed_succs.iter().any(|(e, s)| *e == tr_events && *s == tr_st2) {
                report.counterexample =
                    Some(CommutCounterexample::MissingTransition { from: st1.clone(), events, to: st2 });
                return Ok(report);
            }
            if seen.insert(st2.clone()) {
                queue.push_back(st2);
            }
        }
    }
    Ok(report)
}
