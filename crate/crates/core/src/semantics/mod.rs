//! Small-step semantics with continuations, and the observable behaviors it
//! gives a program.

mod commut;
mod extcall;
mod rename_state;
mod state;
mod step;

use std::fmt;

use thiserror::Error;

use crate::ast::Program;
use crate::traces::{Behavior, BehaviorSet, Event, Value};

pub use commut::{check_step_commut, CommutCounterexample, CommutReport};
pub use extcall::{ExtBehavior, ExtCallModel, ExtSpecError};
pub use rename_state::{rename_globalenv, rename_state};
pub use state::{
    binds_in_env, Cont, CtxFrame, EvalCtx, ExecState, Frame, GlobalEnv, GlobalSlot, LocalEnv, StuckReason,
};
pub use step::{decompose, step, Mode, Transition};

/// Total number of states a single [`run`] may visit before giving up.
pub const DEFAULT_EXPLORATION_LIMIT: usize = 2_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RunError {
    #[error("no main function")]
    NoMain,
    #[error("exploration limit of {0} states reached")]
    ExplorationLimit(usize),
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Deterministic => "deterministic",
            Mode::Exhaustive => "exhaustive",
        })
    }
}

impl std::str::FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Mode, String> {
        match s {
            "deterministic" | "det" => Ok(Mode::Deterministic),
            "exhaustive" | "exh" => Ok(Mode::Exhaustive),
            other => Err(format!("unknown mode `{other}` (expected deterministic or exhaustive)")),
        }
    }
}

/// The state in which `main` starts with no arguments. A program whose
/// globals cannot be initialized starts stuck.
pub fn initial_state(p: &Program) -> Result<ExecState, RunError> {
    let main = p.function(p.main).ok_or(RunError::NoMain)?;
    if !main.params.is_empty() {
        return Err(RunError::NoMain);
    }
    let ge = match GlobalEnv::new(p) {
        Ok(ge) => ge,
        Err(reason) => return Ok(ExecState::Stuck(reason)),
    };
    let env = main.locals.iter().map(|(l, _)| (*l, None)).collect();
    Ok(ExecState::Stmt { func: main.clone(), stmt: main.body.clone(), k: Cont::default(), env, ge })
}

pub fn run(p: &Program, model: &ExtCallModel, mode: Mode, budget: usize) -> Result<BehaviorSet, RunError> {
    run_with_limit(p, model, mode, budget, DEFAULT_EXPLORATION_LIMIT)
}

/// Every maximal run from the initial state, each cut after `budget` steps.
pub fn run_with_limit(
    p: &Program,
    model: &ExtCallModel,
    mode: Mode,
    budget: usize,
    limit: usize,
) -> Result<BehaviorSet, RunError> {
    let init = initial_state(p)?;
    explore(init, model, mode, budget, limit)
}

fn explore(init: ExecState, model: &ExtCallModel, mode: Mode, budget: usize, limit: usize) -> Result<BehaviorSet, RunError> {
    struct Pending {
        state: ExecState,
        events: Vec<Event>,
        /// Trace length of the parent, to backtrack to.
        base: usize,
        steps: usize,
    }

    let mut trace: Vec<Event> = Vec::new();
    let mut behaviors = Vec::new();
    let mut stack = vec![Pending { state: init, events: vec![], base: 0, steps: 0 }];
    let mut visited = 0usize;
    while let Some(Pending { state, events, base, steps }) = stack.pop() {
        visited += 1;
        if visited > limit {
            return Err(RunError::ExplorationLimit(limit));
        }
        trace.truncate(base);
        trace.extend(events);
        if let Some(b) = final_behavior(&state, &trace) {
            behaviors.push(b);
            continue;
        }
        if steps >= budget {
            behaviors.push(Behavior::Unknown { trace: trace.clone() });
            continue;
        }
        let succs = step(&state, model, mode);
        if succs.is_empty() {
            behaviors.push(Behavior::GoesWrong { trace: trace.clone() });
            continue;
        }
        let base = trace.len();
        stack.extend(
            succs
                .into_iter()
                .rev()
                .map(|(events, state)| Pending { state, events, base, steps: steps + 1 }),
        );
    }
    Ok(behaviors.into_iter().collect())
}

fn final_behavior(st: &ExecState, trace: &[Event]) -> Option<Behavior> {
    match st {
        ExecState::Stuck(_) => Some(Behavior::GoesWrong { trace: trace.to_vec() }),
        ExecState::Returned { value, k, .. } if k.frames.is_empty() => Some(match value {
            Value::Int(code) => Behavior::Terminates { trace: trace.to_vec(), code: *code },
            Value::Str(_) => Behavior::GoesWrong { trace: trace.to_vec() },
        }),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ident::Ident;
    use crate::syntax::parse_str;
    use crate::traces::Event;

    const TWO_PRINTF: &str = "int main(void) { return printf(\"A\") + printf(\"B\"); }";
    const EXTRACTED: &str = "int main(void) { int a; a = printf(\"A\"); return a + printf(\"B\"); }";

    fn behaviors(src: &str, mode: Mode, budget: usize) -> BehaviorSet {
        run(&parse_str(src).unwrap(), &ExtCallModel::standard(), mode, budget).unwrap()
    }

    fn printed(b: &Behavior) -> String {
        b.trace()
            .iter()
            .filter_map(|e| match e {
                Event::ExtCall { args, .. } => Some(args.iter().map(|a| a.to_string().trim_matches('"').to_string()).collect::<String>()),
                _ => None,
            })
            .collect()
    }

    #[test]
    fn unspecified_order_gives_two_behaviors() {
        let b = behaviors(TWO_PRINTF, Mode::Exhaustive, 1000);
        let mut outputs: Vec<String> = b.iter().map(printed).collect();
        outputs.sort();
        assert_eq!(outputs, ["AB", "BA"]);
        assert!(b.iter().all(|b| matches!(b, Behavior::Terminates { code: 2, .. })));
    }

    #[test]
    fn extracted_variable_fixes_order() {
        let extracted = behaviors(EXTRACTED, Mode::Exhaustive, 1000);
        assert_eq!(extracted.len(), 1);
        assert_eq!(printed(extracted.iter().next().unwrap()), "AB");
        assert!(extracted.is_subset(&behaviors(TWO_PRINTF, Mode::Exhaustive, 1000)));
    }

    #[test]
    fn deterministic_mode_is_left_to_right() {
        let b = behaviors(TWO_PRINTF, Mode::Deterministic, 1000);
        assert_eq!(b.len(), 1);
        assert_eq!(printed(b.iter().next().unwrap()), "AB");
    }

    #[test]
    fn global_read_emits_value() {
        let p = parse_str("int g = 7; int main(void) { return g; }").unwrap();
        let st = initial_state(&p).unwrap();
        let model = ExtCallModel::standard();
        let st = step(&st, &model, Mode::Exhaustive).remove(0).1;
        assert!(matches!(&st, ExecState::Expr { expr: crate::ast::Expr::Var(..), .. }));
        let succs = step(&st, &model, Mode::Exhaustive);
        assert_eq!(succs.len(), 1);
        let (events, next) = &succs[0];
        assert_eq!(events, &vec![Event::GlobRead { var: Ident::new("g"), value: 7 }]);
        assert!(matches!(next, ExecState::Expr { expr: crate::ast::Expr::IntConst(7), .. }));
    }

    #[test]
    fn undefined_variable_gets_stuck() {
        let b = behaviors("int main(void) { return z; }", Mode::Exhaustive, 100);
        assert_eq!(b.serialize(), "GoesWrong\n");
    }

    #[test]
    fn infinite_loop_exhausts_budget() {
        let b = behaviors("int main(void) { while (1) { } }", Mode::Exhaustive, 1000);
        assert_eq!(b.iter().collect::<Vec<_>>(), vec![&Behavior::Unknown { trace: vec![] }]);
    }

    #[test]
    fn missing_main_is_an_error() {
        let model = ExtCallModel::standard();
        for src in ["", "int main;", "int main(int a) { return a; }"] {
            let r = run(&parse_str(src).unwrap(), &model, Mode::Deterministic, 10);
            assert_eq!(r, Err(RunError::NoMain), "{src}");
        }
    }

    #[test]
    fn calls_and_loops_compute() {
        let src = "int g; int sq(int n) { return n * n; } \
                   int main(void) { int i; i = 0; while (i < 3) { g = g + sq(i); i++; } return g; }";
        let b = behaviors(src, Mode::Exhaustive, 10_000);
        assert_eq!(b.len(), 1);
        assert!(matches!(b.iter().next().unwrap(), Behavior::Terminates { code: 5, .. }));
    }

    #[test]
    fn uninitialized_local_is_stuck() {
        let b = behaviors("int main(void) { int a; return a; }", Mode::Deterministic, 100);
        assert_eq!(b.serialize(), "GoesWrong\n");
    }

    #[test]
    fn volatile_accesses_are_marked() {
        let b = behaviors("volatile int v = 1; int main(void) { v = v + 1; return 0; }", Mode::Exhaustive, 100);
        let v = Ident::new("v");
        assert_eq!(
            b.iter().next().unwrap().trace(),
            &vec![Event::VolLoad { var: v, value: 1 }, Event::VolStore { var: v, value: 2 }]
        );
    }

    #[test]
    fn exploration_limit_is_reported() {
        let p = parse_str(TWO_PRINTF).unwrap();
        let r = run_with_limit(&p, &ExtCallModel::standard(), Mode::Exhaustive, 1000, 3);
        assert_eq!(r, Err(RunError::ExplorationLimit(3)));
    }
}
