//! Renaming lifted from programs to execution states.
//!
//! A continuation has no explicit binders. Call frames split it into
//! segments, and every frame of a segment belongs to the function whose
//! bindings are saved in the call frame closing it. The innermost segment
//! belongs to the running function, whose bindings are the state's own
//! environment.

use std::sync::Arc;

use super::state::{CtxFrame, EvalCtx, ExecState, Frame, GlobalEnv, GlobalSlot, LocalEnv};
use crate::ast::{Expr, Statement};
use crate::ident::Ident;
use crate::rename::{propagate_change_ident, rename_expr, rename_statement, RenameErrorKind, Result, ShadowCase};

pub fn rename_globalenv(x: Ident, y: Ident, ge: &GlobalEnv) -> Result<GlobalEnv> {
    if x == y {
        return Err(RenameErrorKind::AlreadyOccurs.into());
    }
    if x == ge.main {
        return Err(RenameErrorKind::XIsMain.into());
    }
    if y == ge.main {
        return Err(RenameErrorKind::YIsMain.into());
    }
    match ge.slots.get(&x) {
        None => return Err(RenameErrorKind::XNotGlobalVar.into()),
        Some(GlobalSlot::Fun(_)) => return Err(RenameErrorKind::XIsFunction.into()),
        Some(GlobalSlot::Var { volatile: true, .. }) => return Err(RenameErrorKind::Volatile.into()),
        Some(GlobalSlot::Var { .. }) => {}
    }
    if ge.slots.contains_key(&y) {
        return Err(RenameErrorKind::DefinesY.into());
    }
    let slots = ge
        .slots
        .iter()
        .map(|(name, slot)| {
            let slot = match slot {
                GlobalSlot::Fun(f) => GlobalSlot::Fun(Arc::new(propagate_change_ident(x, y, f)?)),
                var => var.clone(),
            };
            Ok((if *name == x { y } else { *name }, slot))
        })
        .collect::<Result<_>>()?;
    Ok(GlobalEnv { slots, main: ge.main })
}

/// The code of one continuation segment, renamed as the function it belongs
/// to would be.
struct Segment {
    x: Ident,
    y: Ident,
    case: ShadowCase,
}

impl Segment {
    fn of_env(x: Ident, y: Ident, env: &LocalEnv) -> Segment {
        Segment { x, y, case: ShadowCase::classify(env.contains_key(&x), env.contains_key(&y)) }
    }

    fn guard(&self, appears: impl Fn(Ident) -> bool) -> Result<()> {
        match self.case {
            ShadowCase::BindsOld if appears(self.y) => Err(RenameErrorKind::OccursInFunction.into()),
            ShadowCase::BindsNew if appears(self.x) => Err(RenameErrorKind::UndesiredShadowing.into()),
            _ => Ok(()),
        }
    }

    fn rewrites(&self) -> bool {
        self.case == ShadowCase::BindsNeither
    }

    fn expr(&self, e: &Expr) -> Result<Expr> {
        self.guard(|i| e.appears(i))?;
        if self.rewrites() {
            rename_expr(self.x, self.y, e)
        } else {
            Ok(e.clone())
        }
    }

    fn stmt(&self, s: &Statement) -> Result<Statement> {
        self.guard(|i| crate::ast::appears_statement(i, s))?;
        if self.rewrites() {
            rename_statement(self.x, self.y, s)
        } else {
            Ok(s.clone())
        }
    }

    fn ident(&self, i: Ident) -> Result<Ident> {
        self.guard(|j| i == j)?;
        if self.rewrites() {
            crate::rename::change_ident_untyped(self.x, self.y, i)
        } else {
            Ok(i)
        }
    }

    fn ctx(&self, ctx: &EvalCtx) -> Result<EvalCtx> {
        let frames = ctx
            .frames
            .iter()
            .map(|f| {
                Ok(match f {
                    CtxFrame::Unop(op) => CtxFrame::Unop(*op),
                    CtxFrame::BinopLeft(op, r) => CtxFrame::BinopLeft(*op, self.expr(r)?),
                    CtxFrame::BinopRight(op, l) => CtxFrame::BinopRight(*op, self.expr(l)?),
                    CtxFrame::AssignValue(t, ty) => CtxFrame::AssignValue(self.ident(*t)?, *ty),
                    CtxFrame::CallArg { callee, before, after } => CtxFrame::CallArg {
                        callee: self.ident(*callee)?,
                        before: before.iter().map(|e| self.expr(e)).collect::<Result<_>>()?,
                        after: after.iter().map(|e| self.expr(e)).collect::<Result<_>>()?,
                    },
                })
            })
            .collect::<Result<_>>()?;
        Ok(EvalCtx { frames })
    }
}

/// Renames `x` into `y` in every part of `st` that the program rename would
/// have touched. Local environments keep their names.
pub fn rename_state(x: Ident, y: Ident, st: &ExecState) -> Result<ExecState> {
    let rename_k = |k: &super::state::Cont, env: Option<&LocalEnv>| -> Result<super::state::Cont> {
        let mut seg = match env {
            Some(env) => Segment::of_env(x, y, env),
            None => Segment { x, y, case: ShadowCase::BindsBoth },
        };
        let mut frames = Vec::with_capacity(k.frames.len());
        for frame in k.frames.iter().rev() {
            frames.push(match frame {
                Frame::Seq(s) => Frame::Seq(seg.stmt(s)?),
                Frame::Loop(c, b) => Frame::Loop(seg.expr(c)?, seg.stmt(b)?),
                Frame::Do => Frame::Do,
                Frame::IfThenElse(a, b) => Frame::IfThenElse(seg.stmt(a)?, seg.stmt(b)?),
                Frame::LoopTest(c, b) => Frame::LoopTest(seg.expr(c)?, seg.stmt(b)?),
                Frame::Return => Frame::Return,
                Frame::Call { caller, env, resume } => {
                    seg = Segment::of_env(x, y, env);
                    Frame::Call {
                        caller: Arc::new(propagate_change_ident(x, y, caller)?),
                        env: env.clone(),
                        resume: seg.ctx(resume)?,
                    }
                }
            });
        }
        frames.reverse();
        Ok(super::state::Cont { frames })
    };
    Ok(match st {
        ExecState::Stmt { func, stmt, k, env, ge } => {
            let seg = Segment::of_env(x, y, env);
            ExecState::Stmt {
                func: Arc::new(propagate_change_ident(x, y, func)?),
                stmt: seg.stmt(stmt)?,
                k: rename_k(k, Some(env))?,
                env: env.clone(),
                ge: rename_globalenv(x, y, ge)?,
            }
        }
        ExecState::Expr { func, expr, k, env, ge } => {
            let seg = Segment::of_env(x, y, env);
            ExecState::Expr {
                func: Arc::new(propagate_change_ident(x, y, func)?),
                expr: seg.expr(expr)?,
                k: rename_k(k, Some(env))?,
                env: env.clone(),
                ge: rename_globalenv(x, y, ge)?,
            }
        }
        ExecState::Returned { value, k, ge } => {
            ExecState::Returned { value: value.clone(), k: rename_k(k, None)?, ge: rename_globalenv(x, y, ge)? }
        }
        ExecState::Stuck(reason) => ExecState::Stuck(reason.map_global_ident(|i| if i == x { y } else { i })),
    })
}
