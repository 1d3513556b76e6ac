use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::ast::{BinOp, CType, Expr, Function, GlobDef, Program, Statement, UnOp};
use crate::ident::Ident;
use crate::syntax::{print_expr, print_statement};
use crate::traces::Value;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum GlobalSlot {
    Var { value: i64, volatile: bool },
    Fun(Arc<Function>),
}

/// Global variables with their current values, and functions.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GlobalEnv {
    pub(crate) slots: BTreeMap<Ident, GlobalSlot>,
    pub(crate) main: Ident,
}

impl GlobalEnv {
    /// Builds the environment of `p`. Globals start at zero and initializers
    /// run silently in definition order; an initializer that reads anything
    /// but a global variable fails.
    pub fn new(p: &Program) -> Result<GlobalEnv, StuckReason> {
        let mut slots = BTreeMap::new();
        for (name, def) in &p.defs {
            let slot = match def {
                GlobDef::Var(v) => GlobalSlot::Var { value: 0, volatile: v.volatile },
                GlobDef::Fun(f) => GlobalSlot::Fun(f.clone()),
            };
            slots.insert(*name, slot);
        }
        let mut ge = GlobalEnv { slots, main: p.main };
        for (name, v) in p.globvars() {
            if let Some(init) = v.init.first() {
                let value = ge.eval_static(init).ok_or(StuckReason::BadInitializer(name))?;
                if let Some(GlobalSlot::Var { value: slot, .. }) = ge.slots.get_mut(&name) {
                    *slot = value;
                }
            }
        }
        Ok(ge)
    }

    fn eval_static(&self, e: &Expr) -> Option<i64> {
        match e {
            Expr::IntConst(n) => Some(*n),
            Expr::Var(v, _) => self.var(*v).map(|(value, _)| value),
            Expr::Unop(op, a) => Some(eval_unop(*op, self.eval_static(a)?)),
            Expr::Binop(op, l, r) => eval_binop(*op, self.eval_static(l)?, self.eval_static(r)?),
            Expr::StrLit(_) | Expr::Assign(..) | Expr::Call(..) => None,
        }
    }

    pub fn get(&self, name: Ident) -> Option<&GlobalSlot> {
        self.slots.get(&name)
    }

    /// Current value and volatility of a global variable.
    pub fn var(&self, name: Ident) -> Option<(i64, bool)> {
        match self.slots.get(&name) {
            Some(GlobalSlot::Var { value, volatile }) => Some((*value, *volatile)),
            _ => None,
        }
    }

    pub fn function(&self, name: Ident) -> Option<&Arc<Function>> {
        match self.slots.get(&name) {
            Some(GlobalSlot::Fun(f)) => Some(f),
            _ => None,
        }
    }

    pub(crate) fn store(&mut self, name: Ident, new: i64) {
        if let Some(GlobalSlot::Var { value, .. }) = self.slots.get_mut(&name) {
            *value = new;
        }
    }

    pub fn names(&self) -> impl Iterator<Item = Ident> + '_ {
        self.slots.keys().copied()
    }

    pub fn main(&self) -> Ident {
        self.main
    }
}

pub(crate) fn eval_unop(op: UnOp, n: i64) -> i64 {
    match op {
        UnOp::Neg => n.wrapping_neg(),
        UnOp::Not => (n == 0) as i64,
    }
}

/// `None` on division by zero.
pub(crate) fn eval_binop(op: BinOp, a: i64, b: i64) -> Option<i64> {
    Some(match op {
        BinOp::Add => a.wrapping_add(b),
        BinOp::Sub => a.wrapping_sub(b),
        BinOp::Mul => a.wrapping_mul(b),
        BinOp::Div if b == 0 => return None,
        BinOp::Div => a.wrapping_div(b),
        BinOp::Mod if b == 0 => return None,
        BinOp::Mod => a.wrapping_rem(b),
        BinOp::Lt => (a < b) as i64,
        BinOp::Le => (a <= b) as i64,
        BinOp::Gt => (a > b) as i64,
        BinOp::Ge => (a >= b) as i64,
        BinOp::Eq => (a == b) as i64,
        BinOp::Ne => (a != b) as i64,
    })
}

/// Parameters and locals of the running function; `None` is an
/// uninitialized local.
pub type LocalEnv = BTreeMap<Ident, Option<i64>>;

pub fn binds_in_env(env: &LocalEnv, x: Ident) -> bool {
    env.contains_key(&x)
}

/// One step of an evaluation context: the hole sits in the operand that the
/// frame does not store.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum CtxFrame {
    Unop(UnOp),
    BinopLeft(BinOp, Expr),
    BinopRight(BinOp, Expr),
    AssignValue(Ident, CType),
    CallArg { callee: Ident, before: Vec<Expr>, after: Vec<Expr> },
}

/// An expression with one hole, as a path from the root (first frame) down
/// to the hole (last frame).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct EvalCtx {
    pub frames: Vec<CtxFrame>,
}

impl EvalCtx {
    pub fn plug(&self, e: Expr) -> Expr {
        self.frames.iter().rev().fold(e, |inner, frame| match frame {
            CtxFrame::Unop(op) => Expr::Unop(*op, Box::new(inner)),
            CtxFrame::BinopLeft(op, r) => Expr::Binop(*op, Box::new(inner), Box::new(r.clone())),
            CtxFrame::BinopRight(op, l) => Expr::Binop(*op, Box::new(l.clone()), Box::new(inner)),
            CtxFrame::AssignValue(t, ty) => Expr::Assign(*t, *ty, Box::new(inner)),
            CtxFrame::CallArg { callee, before, after } => {
                let mut args = before.clone();
                args.push(inner);
                args.extend(after.iter().cloned());
                Expr::Call(*callee, args)
            }
        })
    }

    /// Expressions stored in the frames, in no particular order.
    pub fn exprs(&self) -> impl Iterator<Item = &Expr> {
        self.frames.iter().flat_map(|f| -> Box<dyn Iterator<Item = &Expr> + '_> {
            match f {
                CtxFrame::Unop(_) | CtxFrame::AssignValue(..) => Box::new(std::iter::empty()),
                CtxFrame::BinopLeft(_, e) | CtxFrame::BinopRight(_, e) => Box::new(std::iter::once(e)),
                CtxFrame::CallArg { before, after, .. } => Box::new(before.iter().chain(after)),
            }
        })
    }

    /// Identifiers held by the frames themselves (assignment targets and
    /// callees).
    pub fn frame_idents(&self) -> impl Iterator<Item = Ident> + '_ {
        self.frames.iter().filter_map(|f| match f {
            CtxFrame::AssignValue(t, _) => Some(*t),
            CtxFrame::CallArg { callee, .. } => Some(*callee),
            _ => None,
        })
    }

    pub fn appears(&self, x: Ident) -> bool {
        self.frame_idents().any(|i| i == x) || self.exprs().any(|e| e.appears(x))
    }
}

/// A continuation frame. Every frame has exactly one tail (the frames below
/// it in [`Cont`]), so continuations are plain stacks.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Frame {
    /// Run this statement next.
    Seq(Statement),
    /// Inside a loop body: test the condition again afterwards.
    Loop(Expr, Statement),
    /// The expression is a statement; drop its value.
    Do,
    /// The expression is the condition of an `if`.
    IfThenElse(Statement, Statement),
    /// The expression is a loop condition.
    LoopTest(Expr, Statement),
    /// The expression is a returned value.
    Return,
    /// Return point into a caller, whose bindings scope every frame below
    /// this one up to the next call frame.
    Call { caller: Arc<Function>, env: LocalEnv, resume: EvalCtx },
}

/// Continuation stack; the last frame is the innermost. Empty is `Kstop`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Cont {
    pub frames: Vec<Frame>,
}

impl Cont {
    pub fn top(&self) -> Option<&Frame> {
        self.frames.last()
    }

    pub fn push(mut self, frame: Frame) -> Cont {
        self.frames.push(frame);
        self
    }

    pub fn pop(mut self) -> Cont {
        self.frames.pop();
        self
    }

    /// Drops frames up to the nearest call frame (which is kept).
    pub fn call_cont(mut self) -> Cont {
        while let Some(top) = self.frames.last() {
            if matches!(top, Frame::Call { .. }) {
                break;
            }
            self.frames.pop();
        }
        self
    }

    pub fn depth(&self) -> usize {
        self.frames.len()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum StuckReason {
    UndefinedVariable(Ident),
    UninitializedLocal(Ident),
    FunctionAsValue(Ident),
    LocalNotAFunction(Ident),
    GlobalNotAFunction(Ident),
    UndefinedFunction(Ident),
    ArityMismatch(Ident),
    DivisionByZero,
    StringAsInteger,
    ExternalReadsUndefined { function: Ident, var: Ident },
    BadInitializer(Ident),
    NonIntegerExit,
    /// A frame met in a position the step rules never produce.
    MalformedContinuation,
}

impl StuckReason {
    /// Renames identifiers that live in the global namespace. Names of locals
    /// are left as they are, just as the functions binding them are.
    pub fn map_global_ident(&self, f: impl Fn(Ident) -> Ident) -> StuckReason {
        match self {
            StuckReason::UndefinedVariable(i) => StuckReason::UndefinedVariable(f(*i)),
            StuckReason::FunctionAsValue(i) => StuckReason::FunctionAsValue(f(*i)),
            StuckReason::GlobalNotAFunction(i) => StuckReason::GlobalNotAFunction(f(*i)),
            StuckReason::UndefinedFunction(i) => StuckReason::UndefinedFunction(f(*i)),
            StuckReason::ArityMismatch(i) => StuckReason::ArityMismatch(f(*i)),
            StuckReason::BadInitializer(i) => StuckReason::BadInitializer(f(*i)),
            other => other.clone(),
        }
    }
}

impl fmt::Display for StuckReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StuckReason::UndefinedVariable(i) => write!(f, "read of undefined variable `{i}`"),
            StuckReason::UninitializedLocal(i) => write!(f, "read of uninitialized local `{i}`"),
            StuckReason::FunctionAsValue(i) => write!(f, "function `{i}` used as a value"),
            StuckReason::LocalNotAFunction(i) | StuckReason::GlobalNotAFunction(i) => {
                write!(f, "called object `{i}` is not a function")
            }
            StuckReason::UndefinedFunction(i) => write!(f, "call of undefined function `{i}`"),
            StuckReason::ArityMismatch(i) => write!(f, "wrong number of arguments to `{i}`"),
            StuckReason::DivisionByZero => write!(f, "division by zero"),
            StuckReason::StringAsInteger => write!(f, "string used as an integer"),
            StuckReason::ExternalReadsUndefined { function, var } => {
                write!(f, "external function `{function}` reads undefined global `{var}`")
            }
            StuckReason::BadInitializer(i) => write!(f, "initializer of `{i}` cannot be evaluated"),
            StuckReason::NonIntegerExit => write!(f, "main returned a non-integer"),
            StuckReason::MalformedContinuation => write!(f, "malformed continuation"),
        }
    }
}

/// Interpreter configuration.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ExecState {
    /// Executing a statement of `func`.
    Stmt { func: Arc<Function>, stmt: Statement, k: Cont, env: LocalEnv, ge: GlobalEnv },
    /// Evaluating an expression of `func`; redexes are chosen inside `expr`.
    Expr { func: Arc<Function>, expr: Expr, k: Cont, env: LocalEnv, ge: GlobalEnv },
    /// A function returned `value`; `k` is empty or starts with a call frame.
    Returned { value: Value, k: Cont, ge: GlobalEnv },
    Stuck(StuckReason),
}

impl ExecState {
    pub fn ge(&self) -> Option<&GlobalEnv> {
        match self {
            ExecState::Stmt { ge, .. } | ExecState::Expr { ge, .. } | ExecState::Returned { ge, .. } => Some(ge),
            ExecState::Stuck(_) => None,
        }
    }

    pub fn is_final(&self) -> bool {
        matches!(self, ExecState::Returned { k, .. } if k.frames.is_empty()) || matches!(self, ExecState::Stuck(_))
    }
}

impl fmt::Display for ExecState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExecState::Stmt { stmt, k, .. } => {
                let text = print_statement(stmt);
                write!(f, "statement `{}` (continuation depth {})", text.trim().replace('\n', " "), k.depth())
            }
            ExecState::Expr { expr, k, .. } => {
                write!(f, "expression `{}` (continuation depth {})", print_expr(expr), k.depth())
            }
            ExecState::Returned { value, k, .. } => write!(f, "return of {value} (continuation depth {})", k.depth()),
            ExecState::Stuck(reason) => write!(f, "stuck: {reason}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_str;

    #[test]
    fn plug_rebuilds_expression() {
        let id = Ident::new;
        let ctx = EvalCtx {
            frames: vec![
                CtxFrame::BinopRight(BinOp::Add, Expr::IntConst(1)),
                CtxFrame::CallArg { callee: id("f"), before: vec![Expr::IntConst(2)], after: vec![Expr::var(id("a"))] },
            ],
        };
        let e = ctx.plug(Expr::IntConst(9));
        assert_eq!(print_expr(&e), "1 + f(2, 9, a)");
        assert!(ctx.appears(id("f")));
        assert!(ctx.appears(id("a")));
        assert!(!ctx.appears(id("b")));
    }

    #[test]
    fn globals_initialize_in_order() {
        let p = parse_str("int a = 2; int b = a * 3; int c; int d = c - 1;").unwrap();
        let ge = GlobalEnv::new(&p).unwrap();
        assert_eq!(ge.var(Ident::new("b")), Some((6, false)));
        assert_eq!(ge.var(Ident::new("c")), Some((0, false)));
        assert_eq!(ge.var(Ident::new("d")), Some((-1, false)));
    }

    #[test]
    fn bad_initializer_is_reported() {
        let p = parse_str("int a = nothere;").unwrap();
        assert_eq!(GlobalEnv::new(&p), Err(StuckReason::BadInitializer(Ident::new("a"))));
        let p = parse_str("int a = 1 / 0;").unwrap();
        assert!(GlobalEnv::new(&p).is_err());
    }

    #[test]
    fn call_cont_keeps_call_frame() {
        let f = Arc::new(crate::ast::Function { ret: CType::Int, params: vec![], locals: vec![], body: Statement::Skip });
        let k = Cont::default()
            .push(Frame::Do)
            .push(Frame::Call { caller: f, env: LocalEnv::new(), resume: EvalCtx::default() })
            .push(Frame::Seq(Statement::Skip))
            .push(Frame::Return);
        assert_eq!(k.clone().call_cont().depth(), 2);
        assert_eq!(Cont::default().call_cont().depth(), 0);
    }
}
