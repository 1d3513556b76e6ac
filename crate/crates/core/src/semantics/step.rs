//! The transition relation.
//!
//! Expression evaluation order is unspecified in C. A step in an
//! expression state picks one redex; the relation offers every redex whose
//! order could be observed. Reductions that cannot fail, emit nothing and
//! touch no shared state (arithmetic, reads of initialized locals nobody else
//! in the expression assigns) commute with everything, so the leftmost such
//! redex is always taken first and alone. Deterministic mode keeps only the
//! first successor, which makes its single run one of the exhaustive runs.

use std::sync::Arc;

use super::extcall::{printed_length, ExtBehavior, ExtCallModel};
use super::state::{eval_binop, eval_unop, CtxFrame, EvalCtx, ExecState, Frame, GlobalSlot, LocalEnv, StuckReason};
use crate::ast::{Expr, Function, Statement};
use crate::ident::Ident;
use crate::traces::{Event, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    Deterministic,
    Exhaustive,
}

pub type Transition = (Vec<Event>, ExecState);

/// All successors of `st`. Empty for final and stuck states.
pub fn step(st: &ExecState, model: &ExtCallModel, mode: Mode) -> Vec<Transition> {
    let mut succs = match st {
        ExecState::Stuck(_) => vec![],
        ExecState::Returned { k, .. } if k.frames.is_empty() => vec![],
        ExecState::Returned { value, k, ge } => {
            let k = k.clone();
            let Some(Frame::Call { caller, env, resume }) = k.top().cloned() else {
                return vec![silent(ExecState::Stuck(StuckReason::MalformedContinuation))];
            };
            vec![silent(ExecState::Expr {
                func: caller,
                expr: resume.plug(value_expr(value)),
                k: k.pop(),
                env,
                ge: ge.clone(),
            })]
        }
        ExecState::Stmt { func, stmt, k, env, ge } => {
            let k = k.clone();
            let stmt_state = |stmt: Statement, k| ExecState::Stmt { func: func.clone(), stmt, k, env: env.clone(), ge: ge.clone() };
            let expr_state = |expr: Expr, k| ExecState::Expr { func: func.clone(), expr, k, env: env.clone(), ge: ge.clone() };
            let next = match stmt {
                Statement::Skip => match k.top().cloned() {
                    Some(Frame::Seq(s)) => stmt_state(s, k.pop()),
                    Some(Frame::Loop(c, body)) => expr_state(c.clone(), k.pop().push(Frame::LoopTest(c, body))),
                    None | Some(Frame::Call { .. }) => ExecState::Returned { value: Value::Int(0), k, ge: ge.clone() },
                    Some(_) => ExecState::Stuck(StuckReason::MalformedContinuation),
                },
                Statement::Expr(e) => expr_state(e.clone(), k.push(Frame::Do)),
                Statement::Seq(a, b) => stmt_state((**a).clone(), k.push(Frame::Seq((**b).clone()))),
                Statement::If(c, a, b) => {
                    expr_state(c.clone(), k.push(Frame::IfThenElse((**a).clone(), (**b).clone())))
                }
                Statement::While(c, body) => {
                    expr_state(c.clone(), k.push(Frame::LoopTest(c.clone(), (**body).clone())))
                }
                Statement::Return(None) => ExecState::Returned { value: Value::Int(0), k: k.call_cont(), ge: ge.clone() },
                Statement::Return(Some(e)) => expr_state(e.clone(), k.push(Frame::Return)),
            };
            vec![silent(next)]
        }
        ExecState::Expr { func, expr, k, env, ge } => {
            if let Some(v) = as_value(expr) {
                let k = k.clone();
                let stmt_state = |stmt: Statement, k| ExecState::Stmt { func: func.clone(), stmt, k, env: env.clone(), ge: ge.clone() };
                let truth = match &v {
                    Value::Int(n) => Some(*n != 0),
                    Value::Str(_) => None,
                };
                let next = match (k.top().cloned(), truth) {
                    (Some(Frame::Do), _) => stmt_state(Statement::Skip, k.pop()),
                    (Some(Frame::Return), _) => ExecState::Returned { value: v, k: k.pop().call_cont(), ge: ge.clone() },
                    (Some(Frame::IfThenElse(..) | Frame::LoopTest(..)), None) => ExecState::Stuck(StuckReason::StringAsInteger),
                    (Some(Frame::IfThenElse(a, b)), Some(t)) => stmt_state(if t { a } else { b }, k.pop()),
                    (Some(Frame::LoopTest(c, body)), Some(true)) => {
                        stmt_state(body.clone(), k.pop().push(Frame::Loop(c, body)))
                    }
                    (Some(Frame::LoopTest(..)), Some(false)) => stmt_state(Statement::Skip, k.pop()),
                    _ => ExecState::Stuck(StuckReason::MalformedContinuation),
                };
                vec![silent(next)]
            } else {
                let ctx = ExprCtx { func, k, env, ge: ge.clone() };
                ctx.reduce_choices(expr, model)
            }
        }
    };
    if mode == Mode::Deterministic {
        succs.truncate(1);
    }
    succs
}

fn silent(st: ExecState) -> Transition {
    (Vec::new(), st)
}

fn as_value(e: &Expr) -> Option<Value> {
    match e {
        Expr::IntConst(n) => Some(Value::Int(*n)),
        Expr::StrLit(s) => Some(Value::Str(s.clone())),
        _ => None,
    }
}

fn value_expr(v: &Value) -> Expr {
    match v {
        Value::Int(n) => Expr::IntConst(*n),
        Value::Str(s) => Expr::StrLit(s.clone()),
    }
}

/// Every redex of `e`, left to right, with its context.
pub fn decompose(e: &Expr) -> Vec<(EvalCtx, Expr)> {
    fn go(e: &Expr, path: &mut Vec<CtxFrame>, out: &mut Vec<(EvalCtx, Expr)>) {
        let here = |path: &Vec<CtxFrame>, out: &mut Vec<(EvalCtx, Expr)>| {
            out.push((EvalCtx { frames: path.clone() }, e.clone()))
        };
        match e {
            Expr::IntConst(_) | Expr::StrLit(_) => {}
            Expr::Var(..) => here(path, out),
            Expr::Unop(op, a) => {
                if a.is_value() {
                    here(path, out)
                } else {
                    path.push(CtxFrame::Unop(*op));
                    go(a, path, out);
                    path.pop();
                }
            }
            Expr::Binop(op, l, r) => {
                if l.is_value() && r.is_value() {
                    return here(path, out);
                }
                if !l.is_value() {
                    path.push(CtxFrame::BinopLeft(*op, (**r).clone()));
                    go(l, path, out);
                    path.pop();
                }
                if !r.is_value() {
                    path.push(CtxFrame::BinopRight(*op, (**l).clone()));
                    go(r, path, out);
                    path.pop();
                }
            }
            Expr::Assign(t, ty, v) => {
                if v.is_value() {
                    here(path, out)
                } else {
                    path.push(CtxFrame::AssignValue(*t, *ty));
                    go(v, path, out);
                    path.pop();
                }
            }
            Expr::Call(callee, args) => {
                if args.iter().all(Expr::is_value) {
                    return here(path, out);
                }
                for (i, a) in args.iter().enumerate() {
                    if a.is_value() {
                        continue;
                    }
                    path.push(CtxFrame::CallArg {
                        callee: *callee,
                        before: args[..i].to_vec(),
                        after: args[i + 1..].to_vec(),
                    });
                    go(a, path, out);
                    path.pop();
                }
            }
        }
    }
    let mut out = Vec::new();
    go(e, &mut Vec::new(), &mut out);
    out
}

fn count_assignments_to(e: &Expr, v: Ident) -> usize {
    match e {
        Expr::Var(..) | Expr::IntConst(_) | Expr::StrLit(_) => 0,
        Expr::Unop(_, a) => count_assignments_to(a, v),
        Expr::Binop(_, l, r) => count_assignments_to(l, v) + count_assignments_to(r, v),
        Expr::Assign(t, _, value) => (*t == v) as usize + count_assignments_to(value, v),
        Expr::Call(_, args) => args.iter().map(|a| count_assignments_to(a, v)).sum(),
    }
}

struct ExprCtx<'a> {
    func: &'a Arc<Function>,
    k: &'a super::state::Cont,
    env: &'a LocalEnv,
    ge: super::state::GlobalEnv,
}

impl ExprCtx<'_> {
    fn reduce_choices(&self, expr: &Expr, model: &ExtCallModel) -> Vec<Transition> {
        let redexes = decompose(expr);
        if let Some((ctx, r)) = redexes.iter().find(|(ctx, r)| self.commutes(expr, ctx, r)) {
            return vec![self.reduce(ctx, r, model)];
        }
        redexes.iter().map(|(ctx, r)| self.reduce(ctx, r, model)).collect()
    }

    /// Silent, infallible and independent of every other pending redex.
    fn commutes(&self, whole: &Expr, ctx: &EvalCtx, r: &Expr) -> bool {
        match r {
            Expr::Unop(_, a) => matches!(**a, Expr::IntConst(_)),
            Expr::Binop(op, l, r) => match (&**l, &**r) {
                (Expr::IntConst(a), Expr::IntConst(b)) => eval_binop(*op, *a, *b).is_some(),
                _ => false,
            },
            Expr::Var(v, _) => {
                // Assignments to `v` that enclose this read must wait for it;
                // any other one could run first.
                let enclosing = ctx.frames.iter().filter(|f| matches!(f, CtxFrame::AssignValue(t, _) if t == v)).count();
                matches!(self.env.get(v), Some(Some(_))) && count_assignments_to(whole, *v) == enclosing
            }
            _ => false,
        }
    }

    fn with_expr(&self, expr: Expr, ge: super::state::GlobalEnv, env: LocalEnv) -> ExecState {
        ExecState::Expr { func: self.func.clone(), expr, k: self.k.clone(), env, ge }
    }

    fn plugged(&self, ctx: &EvalCtx, e: Expr) -> ExecState {
        self.with_expr(ctx.plug(e), self.ge.clone(), self.env.clone())
    }

    fn reduce(&self, ctx: &EvalCtx, r: &Expr, model: &ExtCallModel) -> Transition {
        let stuck = |reason| silent(ExecState::Stuck(reason));
        match r {
            Expr::Var(v, _) => {
                if let Some(slot) = self.env.get(v) {
                    return match slot {
                        Some(n) => silent(self.plugged(ctx, Expr::IntConst(*n))),
                        None => stuck(StuckReason::UninitializedLocal(*v)),
                    };
                }
                match self.ge.get(*v) {
                    Some(GlobalSlot::Var { value, volatile }) => {
                        let event = if *volatile {
                            Event::VolLoad { var: *v, value: *value }
                        } else {
                            Event::GlobRead { var: *v, value: *value }
                        };
                        (vec![event], self.plugged(ctx, Expr::IntConst(*value)))
                    }
                    Some(GlobalSlot::Fun(_)) => stuck(StuckReason::FunctionAsValue(*v)),
                    None => stuck(StuckReason::UndefinedVariable(*v)),
                }
            }
            Expr::Unop(op, a) => match **a {
                Expr::IntConst(n) => silent(self.plugged(ctx, Expr::IntConst(eval_unop(*op, n)))),
                _ => stuck(StuckReason::StringAsInteger),
            },
            Expr::Binop(op, l, r) => match (&**l, &**r) {
                (Expr::IntConst(a), Expr::IntConst(b)) => match eval_binop(*op, *a, *b) {
                    Some(n) => silent(self.plugged(ctx, Expr::IntConst(n))),
                    None => stuck(StuckReason::DivisionByZero),
                },
                _ => stuck(StuckReason::StringAsInteger),
            },
            Expr::Assign(t, _, value) => {
                let Expr::IntConst(n) = **value else {
                    return stuck(StuckReason::StringAsInteger);
                };
                if self.env.contains_key(t) {
                    let mut env = self.env.clone();
                    env.insert(*t, Some(n));
                    return silent(self.with_expr(ctx.plug(Expr::IntConst(n)), self.ge.clone(), env));
                }
                match self.ge.get(*t) {
                    Some(GlobalSlot::Var { volatile, .. }) => {
                        let event = if *volatile {
                            Event::VolStore { var: *t, value: n }
                        } else {
                            Event::GlobWrite { var: *t, value: n }
                        };
                        let mut ge = self.ge.clone();
                        ge.store(*t, n);
                        (vec![event], self.with_expr(ctx.plug(Expr::IntConst(n)), ge, self.env.clone()))
                    }
                    Some(GlobalSlot::Fun(_)) => stuck(StuckReason::FunctionAsValue(*t)),
                    None => stuck(StuckReason::UndefinedVariable(*t)),
                }
            }
            Expr::Call(callee, args) => self.call(ctx, *callee, args, model),
            Expr::IntConst(_) | Expr::StrLit(_) => stuck(StuckReason::MalformedContinuation),
        }
    }

    fn call(&self, ctx: &EvalCtx, callee: Ident, args: &[Expr], model: &ExtCallModel) -> Transition {
        let stuck = |reason| silent(ExecState::Stuck(reason));
        let args: Vec<Value> = args.iter().filter_map(as_value).collect();
        if self.env.contains_key(&callee) {
            return stuck(StuckReason::LocalNotAFunction(callee));
        }
        match self.ge.get(callee) {
            Some(GlobalSlot::Fun(f)) => {
                if f.params.len() != args.len() {
                    return stuck(StuckReason::ArityMismatch(callee));
                }
                let mut env = LocalEnv::new();
                for ((p, _), a) in f.params.iter().zip(&args) {
                    let Value::Int(n) = a else {
                        return stuck(StuckReason::StringAsInteger);
                    };
                    env.insert(*p, Some(*n));
                }
                for (l, _) in &f.locals {
                    env.insert(*l, None);
                }
                let k = self.k.clone().push(Frame::Call {
                    caller: self.func.clone(),
                    env: self.env.clone(),
                    resume: ctx.clone(),
                });
                silent(ExecState::Stmt { func: f.clone(), stmt: f.body.clone(), k, env, ge: self.ge.clone() })
            }
            Some(GlobalSlot::Var { .. }) => stuck(StuckReason::GlobalNotAFunction(callee)),
            None => match model.get(callee) {
                Some(ExtBehavior::Pure) => {
                    let result = printed_length(&args);
                    let event = Event::ExtCall { name: callee, args, result };
                    (vec![event], self.plugged(ctx, Expr::IntConst(result)))
                }
                Some(ExtBehavior::ReadsGlobal(g)) => match self.ge.var(*g) {
                    Some((result, _)) => {
                        let event = Event::ExtCall { name: callee, args, result };
                        (vec![event], self.plugged(ctx, Expr::IntConst(result)))
                    }
                    None => stuck(StuckReason::ExternalReadsUndefined { function: callee, var: *g }),
                },
                None => stuck(StuckReason::UndefinedFunction(callee)),
            },
        }
    }
}
