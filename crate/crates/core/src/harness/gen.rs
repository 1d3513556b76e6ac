//! Random programs for the property suite.
//!
//! Each program comes with a rename request `x` into `y`. Most of the time
//! `x` is a global variable and `y` a fresh name, but both are sometimes
//! pointed at `main`, a function, a volatile variable or an existing global
//! so that every refusal path is exercised. Functions are assigned the four
//! binding patterns of `x` and `y` in round-robin order, and free occurrences
//! that make the rename refuse are injected at a low rate.
//!
//! Programs always terminate or get stuck: loops count up to at most three
//! and functions only call functions defined before them. Interleavings are
//! kept few: within an expression at most one operand has side effects,
//! except for a couple of expressions at the top level of `main`.

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::ast::{BinOp, CType, Expr, Function, GlobDef, GlobVar, Program, Statement, UnOp};
use crate::ident::Ident;
use crate::rename::ShadowCase;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenProgram {
    pub program: Program,
    pub x: Ident,
    pub y: Ident,
    /// Binding pattern of every function, in definition order.
    pub cases: Vec<(Ident, ShadowCase)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum XKind {
    Global { volatile: bool },
    Main,
    Function,
    Undeclared,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum YKind {
    Fresh,
    Global,
    Function,
    Main,
}

const CONFLICT_RATE: f64 = 0.15;
const PARAMS: [&str; 2] = ["a", "b"];
const LOCALS: [&str; 2] = ["c", "d"];
const COUNTERS: [&str; 2] = ["i", "j"];
const STRINGS: [&str; 3] = ["A", "B", "n="];

pub fn generate(seed: u64) -> GenProgram {
    Gen::new(seed).program()
}

struct Gen {
    rng: ChaCha8Rng,
    x: Ident,
    y: Ident,
    x_kind: XKind,
    y_kind: YKind,
    /// `x` occurs only where it is bound, which the sufficient precondition
    /// needs.
    x_unused: bool,
    /// Expressions still allowed to have two effectful operands.
    interleavings: u32,
}

/// What a function body may mention.
struct Scope {
    readable: Vec<Ident>,
    writable: Vec<Ident>,
    callable: Vec<(Ident, usize)>,
    /// Parameters and locals: reading them is silent.
    bound: Vec<Ident>,
    in_main: bool,
    loops: usize,
    counters: Vec<Ident>,
}

impl Gen {
    fn new(seed: u64) -> Gen {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x_kind = match rng.gen_range(0..100) {
            0..=79 => XKind::Global { volatile: rng.gen_bool(0.1) },
            80..=83 => XKind::Main,
            84..=88 => XKind::Function,
            _ => XKind::Undeclared,
        };
        let y_kind = match rng.gen_range(0..100) {
            0..=77 => YKind::Fresh,
            78..=87 => YKind::Global,
            88..=93 => YKind::Function,
            _ => YKind::Main,
        };
        let x = Ident::new(if x_kind == XKind::Main { "main" } else { "x" });
        let y = Ident::new(if y_kind == YKind::Main { "main" } else { "y" });
        let x_unused = rng.gen_bool(0.3);
        Gen { rng, x, y, x_kind, y_kind, x_unused, interleavings: 2 }
    }

    fn chance(&mut self, p: f64) -> bool {
        self.rng.gen_bool(p)
    }

    fn pick<T: Copy>(&mut self, items: &[T]) -> T {
        *items.choose(&mut self.rng).expect("nonempty choice")
    }

    fn program(mut self) -> GenProgram {
        let main = Ident::new("main");
        let mut globals: Vec<(Ident, bool)> = (0..self.rng.gen_range(0..=3))
            .map(|i| (Ident::new(&format!("g{i}")), self.rng.gen_bool(0.1)))
            .collect();
        if let XKind::Global { volatile } = self.x_kind {
            globals.push((self.x, volatile));
        }
        if self.y_kind == YKind::Global {
            globals.push((self.y, false));
        }
        globals.shuffle(&mut self.rng);

        let mut defs = Vec::new();
        for (k, &(name, volatile)) in globals.iter().enumerate() {
            let earlier: Vec<Ident> = globals[..k].iter().map(|(g, _)| *g).collect();
            let init = self.initializer(name, &earlier);
            defs.push((name, GlobDef::Var(GlobVar { ty: CType::Int, init, volatile })));
        }

        let mut names: Vec<Ident> = (0..self.rng.gen_range(0..=3)).map(|i| Ident::new(&format!("f{i}"))).collect();
        if self.x_kind == XKind::Function {
            names.insert(self.rng.gen_range(0..=names.len()), self.x);
        }
        if self.y_kind == YKind::Function {
            names.insert(self.rng.gen_range(0..=names.len()), self.y);
        }
        let global_vars: Vec<Ident> = globals.iter().map(|(g, _)| *g).collect();
        let offset = self.rng.gen_range(0..4);
        let mut callable = Vec::new();
        let mut cases = Vec::new();
        for (k, name) in names.into_iter().enumerate() {
            let case = [ShadowCase::BindsBoth, ShadowCase::BindsOld, ShadowCase::BindsNew, ShadowCase::BindsNeither]
                [(offset + k) % 4];
            let f = self.function(case, &global_vars, &callable, false);
            callable.push((name, f.params.len()));
            cases.push((name, ShadowCase::of(self.x, self.y, &f)));
            defs.push((name, GlobDef::Fun(Arc::new(f))));
        }
        let main_case = if self.chance(0.5) {
            ShadowCase::BindsNeither
        } else {
            self.pick(&[ShadowCase::BindsBoth, ShadowCase::BindsOld, ShadowCase::BindsNew])
        };
        let f = self.function(main_case, &global_vars, &callable, true);
        cases.push((main, ShadowCase::of(self.x, self.y, &f)));
        defs.push((main, GlobDef::Fun(Arc::new(f))));
        GenProgram { program: Program::new(defs), x: self.x, y: self.y, cases }
    }

    fn initializer(&mut self, name: Ident, earlier: &[Ident]) -> Vec<Expr> {
        if self.chance(0.4) {
            return vec![];
        }
        let mut refs: Vec<Ident> = earlier
            .iter()
            .copied()
            .filter(|g| *g != self.x || !self.x_unused)
            .collect();
        if name == self.x {
            if self.chance(0.1) {
                refs = vec![self.y];
            } else if self.chance(0.03) {
                refs = vec![self.x];
            }
        }
        let constant = Expr::IntConst(self.rng.gen_range(0..10));
        let init = match refs.as_slice() {
            [] => constant,
            _ if self.chance(0.4) => constant,
            _ => {
                let v = Expr::var(self.pick(&refs));
                if self.chance(0.5) {
                    v
                } else {
                    Expr::binop(self.pick(&[BinOp::Add, BinOp::Mul, BinOp::Sub]), v, constant)
                }
            }
        };
        vec![init]
    }

    fn function(&mut self, case: ShadowCase, globals: &[Ident], callable: &[(Ident, usize)], in_main: bool) -> Function {
        let main = Ident::new("main");
        let mut params: Vec<Ident> = if in_main {
            vec![]
        } else {
            PARAMS[..self.rng.gen_range(0..=2)].iter().map(|p| Ident::new(p)).collect()
        };
        let mut locals: Vec<Ident> = LOCALS[..self.rng.gen_range(0..=2)].iter().map(|l| Ident::new(l)).collect();
        let (bind_x, bind_y) = match case {
            ShadowCase::BindsBoth => (true, true),
            ShadowCase::BindsOld => (true, false),
            ShadowCase::BindsNew => (false, true),
            ShadowCase::BindsNeither => (false, false),
        };
        for (bind, name) in [(bind_x, self.x), (bind_y, self.y)] {
            if bind && name != main {
                if !in_main && self.chance(0.5) {
                    params.push(name);
                } else {
                    locals.push(name);
                }
            }
        }

        let is_global = |i: Ident| globals.contains(&i);
        let binds_x = params.contains(&self.x) || locals.contains(&self.x);
        let binds_y = params.contains(&self.y) || locals.contains(&self.y);
        let may_use_x = binds_x || (!binds_y && is_global(self.x) && !self.x_unused) || self.chance(CONFLICT_RATE);
        let may_use_y = binds_y || self.chance(CONFLICT_RATE);
        let mut visible: Vec<Ident> = globals
            .iter()
            .copied()
            .filter(|g| *g != self.x && *g != self.y)
            .collect();
        if may_use_x && !binds_x {
            visible.push(self.x);
        }
        if may_use_y && !binds_y {
            visible.push(self.y);
        }

        let mut scope = Scope {
            readable: params.iter().copied().chain(visible.iter().copied()).collect(),
            writable: visible.iter().copied().filter(|v| is_global(*v)).collect(),
            callable: callable
                .iter()
                .copied()
                .filter(|(f, _)| (*f != self.x || may_use_x) && (*f != self.y || may_use_y))
                .collect(),
            bound: params.iter().chain(&locals).copied().collect(),
            in_main,
            loops: 0,
            counters: vec![],
        };
        scope.writable.extend(params.iter().copied());

        let mut items = Vec::new();
        for l in &locals {
            let value = self.expr(&scope, 1, false).0;
            items.push(Statement::Expr(Expr::assign(*l, value)));
            scope.readable.push(*l);
            scope.writable.push(*l);
        }
        for _ in 0..self.rng.gen_range(1..=3) {
            items.push(self.statement(&mut scope, 2));
        }
        items.push(Statement::Return(Some(self.expr(&scope, 2, true).0)));
        locals.extend(scope.counters);

        Function {
            ret: CType::Int,
            params: params.into_iter().map(|p| (p, CType::Int)).collect(),
            locals: locals.into_iter().map(|l| (l, CType::Int)).collect(),
            body: Statement::block(items),
        }
    }

    fn statement(&mut self, scope: &mut Scope, depth: usize) -> Statement {
        let roll = self.rng.gen_range(0..100);
        match roll {
            0..=19 if depth > 0 => {
                let cond = self.expr(scope, 1, true).0;
                let then = self.block(scope, depth - 1);
                let otherwise = if self.chance(0.5) { self.block(scope, depth - 1) } else { Statement::Skip };
                Statement::if_(cond, then, otherwise)
            }
            20..=34 if depth > 0 && scope.counters.len() < COUNTERS.len() => {
                let i = Ident::new(COUNTERS[scope.counters.len()]);
                scope.counters.push(i);
                let bound = self.rng.gen_range(1..=3);
                scope.loops += 1;
                let body = self.block(scope, depth - 1);
                scope.loops -= 1;
                let step = Statement::Expr(Expr::assign(i, Expr::binop(BinOp::Add, Expr::var(i), Expr::IntConst(1))));
                Statement::block(vec![
                    Statement::Expr(Expr::assign(i, Expr::IntConst(0))),
                    Statement::while_(
                        Expr::binop(BinOp::Lt, Expr::var(i), Expr::IntConst(bound)),
                        Statement::block(vec![body, step]),
                    ),
                ])
            }
            35..=54 => {
                let text = self.pick(&STRINGS);
                let mut args = vec![Expr::StrLit(text.to_string())];
                if self.chance(0.7) {
                    args.push(self.expr(scope, 1, true).0);
                }
                Statement::Expr(Expr::Call(Ident::new("printf"), args))
            }
            _ if !scope.writable.is_empty() => {
                let target = self.pick(&scope.writable);
                Statement::Expr(Expr::assign(target, self.expr(scope, 2, true).0))
            }
            _ => Statement::Expr(self.expr(scope, 1, true).0),
        }
    }

    fn block(&mut self, scope: &mut Scope, depth: usize) -> Statement {
        let items = (0..self.rng.gen_range(1..=2)).map(|_| self.statement(scope, depth)).collect();
        Statement::block(items)
    }

    /// A random expression and whether evaluating it has effects.
    fn expr(&mut self, scope: &Scope, depth: usize, effects: bool) -> (Expr, bool) {
        let roll = self.rng.gen_range(0..100);
        if depth > 0 && roll < 40 {
            let op = self.pick(&[
                BinOp::Add, BinOp::Add, BinOp::Sub, BinOp::Mul, BinOp::Div, BinOp::Mod, BinOp::Lt, BinOp::Eq, BinOp::Ne,
                BinOp::Ge,
            ]);
            let both = effects && scope.in_main && scope.loops == 0 && self.interleavings > 0 && self.chance(0.5);
            let left_first = self.chance(0.5);
            let (l, l_eff) = self.expr(scope, depth - 1, effects && (both || left_first));
            let (r, r_eff) = self.expr(scope, depth - 1, effects && (both || !left_first || !l_eff));
            if l_eff && r_eff {
                self.interleavings = self.interleavings.saturating_sub(1);
            }
            return (Expr::binop(op, l, r), l_eff || r_eff);
        }
        if depth > 0 && roll < 48 {
            let (e, eff) = self.expr(scope, depth - 1, effects);
            return (Expr::Unop(self.pick(&[UnOp::Neg, UnOp::Not]), Box::new(e)), eff);
        }
        if effects && roll < 60 && !scope.callable.is_empty() {
            let (f, arity) = self.pick(&scope.callable);
            let with_effect = if arity > 0 { self.rng.gen_range(0..arity) } else { 0 };
            let args = (0..arity)
                .map(|k| self.expr(scope, depth.saturating_sub(1), k == with_effect).0)
                .collect();
            return (Expr::Call(f, args), true);
        }
        if roll < 80 && !scope.readable.is_empty() {
            let v = self.pick(&scope.readable);
            let global = !scope.bound.contains(&v);
            if !global || effects {
                return (Expr::var(v), global);
            }
        }
        (Expr::IntConst(self.rng.gen_range(0..10)), false)
    }
}
