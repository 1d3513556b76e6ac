//! The property suite run over generated programs.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use super::gen::{generate, GenProgram};
use crate::ast::Program;
use crate::ident::Ident;
use crate::rename::{check_sufficient_precondition, rename_globvar_hard, Clause, RenameError, ShadowCase};
use crate::semantics::{check_step_commut, run, ExtCallModel, Mode};
use crate::syntax::{parse_str, pretty_print};
use crate::traces::find_divergence;

/// A rename engine: the real one, or a deliberately broken variant.
pub type Engine = dyn Fn(Ident, Ident, &Program) -> Result<Program, RenameError> + Sync;

pub fn standard_engine() -> &'static Engine {
    &rename_globvar_hard
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Property {
    /// Renaming back recovers the original program.
    Invertibility,
    /// A passing sufficient precondition implies the rename succeeds.
    Precondition,
    /// Behaviors are equal up to renaming, in both modes.
    Simulation,
    /// Every reachable transition has a renamed counterpart.
    StepCommut,
    /// Printing then parsing gives the program back.
    RoundTrip,
}

impl Property {
    pub const ALL: [Property; 5] = [
        Property::Invertibility,
        Property::Precondition,
        Property::Simulation,
        Property::StepCommut,
        Property::RoundTrip,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Property::Invertibility => "invertibility",
            Property::Precondition => "precondition",
            Property::Simulation => "simulation",
            Property::StepCommut => "step-commut",
            Property::RoundTrip => "round-trip",
        }
    }
}

impl fmt::Display for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone)]
pub struct PropConfig {
    pub iterations: usize,
    pub seed: u64,
    /// Step budget of each run compared by [`Property::Simulation`].
    pub budget: usize,
    /// States explored by [`Property::StepCommut`].
    pub commut_budget: usize,
    pub extcalls: ExtCallModel,
    pub properties: Vec<Property>,
    /// Worker threads; 0 uses the available parallelism.
    pub threads: usize,
}

impl Default for PropConfig {
    fn default() -> Self {
        PropConfig {
            iterations: 500,
            seed: 42,
            budget: 10_000,
            commut_budget: 2_000,
            extcalls: ExtCallModel::standard(),
            properties: Property::ALL.to_vec(),
            threads: 0,
        }
    }
}

impl PropConfig {
    pub fn only(mut self, properties: &[Property]) -> PropConfig {
        self.properties = properties.to_vec();
        self
    }

    pub fn program_seed(&self, iteration: usize) -> u64 {
        self.seed.wrapping_add(iteration as u64)
    }
}

/// What happened to one generated program.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub iteration: usize,
    pub seed: u64,
    pub x: Ident,
    pub y: Ident,
    pub cases: Vec<(Ident, ShadowCase)>,
    pub violated: Vec<Clause>,
    /// `Ok` on success, the refusal message otherwise.
    pub rename: Result<(), String>,
    pub checked: Vec<Property>,
    pub failures: Vec<(Property, String)>,
    pub source: String,
}

#[derive(Debug, Clone)]
pub struct PropReport {
    pub config_seed: u64,
    pub outcomes: Vec<Outcome>,
}

impl PropReport {
    pub fn iterations(&self) -> usize {
        self.outcomes.len()
    }

    pub fn renamed(&self) -> usize {
        self.outcomes.iter().filter(|o| o.rename.is_ok()).count()
    }

    pub fn refusals(&self) -> BTreeMap<String, usize> {
        let mut m = BTreeMap::new();
        for o in &self.outcomes {
            if let Err(msg) = &o.rename {
                *m.entry(msg.clone()).or_default() += 1;
            }
        }
        m
    }

    pub fn precondition_failing(&self) -> usize {
        self.outcomes.iter().filter(|o| !o.violated.is_empty()).count()
    }

    pub fn checked(&self, p: Property) -> usize {
        self.outcomes.iter().filter(|o| o.checked.contains(&p)).count()
    }

    pub fn failed(&self, p: Property) -> usize {
        self.outcomes.iter().filter(|o| o.failures.iter().any(|(q, _)| *q == p)).count()
    }

    pub fn counterexamples(&self) -> usize {
        self.outcomes.iter().map(|o| o.failures.len()).sum()
    }

    pub fn first_counterexample(&self) -> Option<(&Outcome, Property, &str)> {
        self.outcomes
            .iter()
            .find_map(|o| o.failures.first().map(|(p, detail)| (o, *p, detail.as_str())))
    }

    pub fn case_counts(&self) -> BTreeMap<&'static str, usize> {
        let mut m = BTreeMap::new();
        for o in &self.outcomes {
            for (_, case) in &o.cases {
                *m.entry(case_label(*case)).or_default() += 1;
            }
        }
        m
    }

    pub fn passed(&self) -> bool {
        self.counterexamples() == 0
    }

    /// Plain-text summary; the same configuration always renders the same
    /// text.
    pub fn render(&self, properties: &[Property]) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "seed {}, {} programs", self.config_seed, self.iterations());
        let _ = writeln!(s, "renamed: {}", self.renamed());
        for (msg, n) in self.refusals() {
            let _ = writeln!(s, "refused ({msg}): {n}");
        }
        let _ = writeln!(s, "precondition violated: {}", self.precondition_failing());
        let cases = self.case_counts();
        let _ = writeln!(
            s,
            "functions by binding pattern: {}",
            cases.iter().map(|(k, v)| format!("{k} {v}")).collect::<Vec<_>>().join(", ")
        );
        for p in properties {
            let _ = writeln!(s, "{p}: {} checked, {} failed", self.checked(*p), self.failed(*p));
        }
        match self.first_counterexample() {
            None => {
                let _ = writeln!(s, "no counterexample");
            }
            Some((o, p, detail)) => {
                let _ = writeln!(
                    s,
                    "first counterexample: {p} on program #{} (seed {}), renaming {} into {}",
                    o.iteration, o.seed, o.x, o.y
                );
                let _ = writeln!(s, "{}", detail.trim_end());
                let _ = write!(s, "program:\n{}", o.source);
            }
        }
        s
    }
}

fn case_label(c: ShadowCase) -> &'static str {
    match c {
        ShadowCase::BindsBoth => "binds-both",
        ShadowCase::BindsOld => "binds-x",
        ShadowCase::BindsNew => "binds-y",
        ShadowCase::BindsNeither => "binds-neither",
    }
}

pub fn run_properties(cfg: &PropConfig, engine: &Engine) -> PropReport {
    let threads = match cfg.threads {
        0 => std::thread::available_parallelism().map_or(1, |n| n.get()),
        n => n,
    }
    .min(cfg.iterations.max(1));
    let next = AtomicUsize::new(0);
    let slots: Mutex<Vec<Option<Outcome>>> = Mutex::new(vec![None; cfg.iterations]);
    std::thread::scope(|s| {
        for _ in 0..threads {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= cfg.iterations {
                    break;
                }
                let outcome = check_one(cfg, engine, i);
                slots.lock().expect("no worker panics while holding the lock")[i] = Some(outcome);
            });
        }
    });
    let outcomes = slots
        .into_inner()
        .expect("workers finished")
        .into_iter()
        .map(|o| o.expect("every iteration ran"))
        .collect();
    PropReport { config_seed: cfg.seed, outcomes }
}

/// Generates program number `iteration` and checks the selected properties
/// on it.
pub fn check_one(cfg: &PropConfig, engine: &Engine, iteration: usize) -> Outcome {
    let seed = cfg.program_seed(iteration);
    let GenProgram { program: p, x, y, cases } = generate(seed);
    let report = check_sufficient_precondition(x, y, &p);
    let result = engine(x, y, &p);
    let mut out = Outcome {
        iteration,
        seed,
        x,
        y,
        cases,
        violated: report.violated(),
        rename: result.as_ref().map(|_| ()).map_err(|e| e.message()),
        checked: vec![],
        failures: vec![],
        source: pretty_print(&p),
    };
    let compliant = cfg.extcalls.is_compliant(x, y);
    for &prop in &cfg.properties {
        let verdict: Option<Result<(), String>> = match (prop, &result) {
            (Property::RoundTrip, _) => Some(round_trip(&p).and_then(|_| match &result {
                Ok(r) => round_trip(r),
                Err(_) => Ok(()),
            })),
            (Property::Precondition, Err(e)) if report.passes() => {
                Some(Err(format!("precondition holds but the rename was refused: {e}")))
            }
            (Property::Precondition, _) => Some(Ok(())),
            (Property::Invertibility, Ok(r)) => Some(match engine(y, x, r) {
                Ok(back) if back == p => Ok(()),
                Ok(back) => Err(format!("renaming back gives a different program:\n{}", pretty_print(&back))),
                Err(e) => Err(format!("renaming back is refused: {e}\nrenamed program:\n{}", pretty_print(r))),
            }),
            (Property::Simulation, Ok(r)) if compliant => Some(simulation(cfg, x, y, &p, r)),
            (Property::StepCommut, Ok(r)) if compliant => {
                Some(match check_step_commut(x, y, &p, r, &cfg.extcalls, cfg.commut_budget) {
                    Ok(rep) => match rep.counterexample {
                        None => Ok(()),
                        Some(c) => Err(format!("{c}\nrenamed program:\n{}", pretty_print(r))),
                    },
                    Err(e) => Err(e.to_string()),
                })
            }
            _ => None,
        };
        if let Some(v) = verdict {
            out.checked.push(prop);
            if let Err(detail) = v {
                out.failures.push((prop, detail));
            }
        }
    }
    out
}

fn round_trip(p: &Program) -> Result<(), String> {
    let text = pretty_print(p);
    match parse_str(&text) {
        Ok(q) if q == *p => Ok(()),
        Ok(q) => Err(format!("reparsed program differs:\n{}", pretty_print(&q))),
        Err(e) => Err(format!("printed program does not parse: {e}\n{text}")),
    }
}

fn simulation(cfg: &PropConfig, x: Ident, y: Ident, p: &Program, r: &Program) -> Result<(), String> {
    for mode in [Mode::Deterministic, Mode::Exhaustive] {
        let original = run(p, &cfg.extcalls, mode, cfg.budget).map_err(|e| format!("original, {mode}: {e}"))?;
        let renamed = run(r, &cfg.extcalls, mode, cfg.budget).map_err(|e| format!("renamed, {mode}: {e}"))?;
        if let Some(d) = find_divergence(x, y, &original, &renamed) {
            return Err(format!("{mode} mode: {d}\nrenamed program:\n{}", pretty_print(r)));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_run_is_clean_and_reproducible() {
        let cfg = PropConfig { iterations: 40, seed: 7, ..PropConfig::default() };
        let a = run_properties(&cfg, standard_engine());
        let b = run_properties(&PropConfig { threads: 1, ..cfg.clone() }, standard_engine());
        assert!(a.passed(), "{}", a.render(&cfg.properties));
        assert_eq!(a.render(&cfg.properties), b.render(&cfg.properties));
    }
}
