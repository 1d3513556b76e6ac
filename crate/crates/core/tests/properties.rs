use grename_core::ast::{GlobDef, Program};
use grename_core::harness::{generate, GenProgram};
use grename_core::rename::rename_globvar_hard;
use grename_core::semantics::{initial_state, run, step, ExtCallModel, Mode};
use grename_core::{parse_str, pretty_print, Behavior, Ident};
use proptest::prelude::*;

fn shape(p: &Program) -> Vec<(bool, usize, bool)> {
    p.defs
        .iter()
        .map(|(_, d)| match d {
            GlobDef::Var(v) => (true, v.init.len(), v.volatile),
            GlobDef::Fun(f) => (false, f.params.len() + f.locals.len(), false),
        })
        .collect()
}

/// Every occurrence of `x` left in `p` sits in a function that binds it.
fn only_bound_occurrences(x: Ident, p: &Program) -> bool {
    p.defs.iter().all(|(name, d)| {
        *name != x
            && match d {
                GlobDef::Var(v) => !v.init.iter().any(|e| e.appears(x)),
                GlobDef::Fun(f) => grename_core::ast::binds(x, f) || !grename_core::ast::appears_statement(x, &f.body),
            }
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn generated_programs_round_trip(seed in any::<u64>()) {
        let GenProgram { program, .. } = generate(seed);
        prop_assert_eq!(parse_str(&pretty_print(&program)).unwrap(), program);
    }

    #[test]
    fn successful_rename_is_hygienic(seed in any::<u64>()) {
        let GenProgram { program: p, x, y, .. } = generate(seed);
        if let Ok(r) = rename_globvar_hard(x, y, &p) {
            prop_assert!(only_bound_occurrences(x, &r));
            prop_assert_eq!(r.ident_leaf_count(), p.ident_leaf_count());
            prop_assert_eq!(shape(&r), shape(&p));
            prop_assert_eq!(r.main, p.main);
            let renamed_names: Vec<Ident> = r.defs.iter().map(|(n, _)| *n).collect();
            let expected: Vec<Ident> = p.defs.iter().map(|(n, _)| if *n == x { y } else { *n }).collect();
            prop_assert_eq!(renamed_names, expected);
        }
    }

    #[test]
    fn deterministic_behavior_is_an_exhaustive_one(seed in any::<u64>()) {
        let p = generate(seed).program;
        let model = ExtCallModel::standard();
        let det = run(&p, &model, Mode::Deterministic, 2_000).unwrap();
        let exh = run(&p, &model, Mode::Exhaustive, 2_000).unwrap();
        prop_assert_eq!(det.len(), 1);
        prop_assert!(det.is_subset(&exh));
    }

    #[test]
    fn longer_budgets_extend_traces(seed in any::<u64>(), short in 1usize..200) {
        let p = generate(seed).program;
        let model = ExtCallModel::standard();
        let a = run(&p, &model, Mode::Deterministic, short).unwrap();
        let b = run(&p, &model, Mode::Deterministic, short + 300).unwrap();
        let (a, b) = (a.iter().next().unwrap(), b.iter().next().unwrap());
        match a {
            Behavior::Unknown { trace } => prop_assert!(b.trace().starts_with(trace)),
            finished => prop_assert_eq!(finished, b),
        }
    }

    #[test]
    fn steps_only_append_events(seed in any::<u64>()) {
        // Walk the leftmost path and check each step's events against the
        // final trace.
        let p = generate(seed).program;
        let model = ExtCallModel::standard();
        let mut st = initial_state(&p).unwrap();
        let mut trace = Vec::new();
        for _ in 0..500 {
            let mut succs = step(&st, &model, Mode::Deterministic);
            if succs.is_empty() {
                break;
            }
            let (events, next) = succs.remove(0);
            trace.extend(events);
            st = next;
        }
        let b = run(&p, &model, Mode::Deterministic, 500).unwrap();
        prop_assert_eq!(b.iter().next().unwrap().trace(), &trace);
    }
}

#[test]
fn generator_is_deterministic() {
    assert_eq!(generate(9), generate(9));
    assert_ne!(pretty_print(&generate(9).program), pretty_print(&generate(10).program));
}
