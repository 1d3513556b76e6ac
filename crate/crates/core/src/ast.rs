//! Abstract syntax of the mini-C subset and the syntactic predicates the
//! rename engine and the precondition checker are phrased in.
//!
//! Block-scoped declarations do not exist here: every local of a function is
//! declared at its top, exactly as if the parser had hoisted it.

use std::collections::HashSet;
use std::sync::Arc;

use thiserror::Error;

use crate::ident::Ident;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CType {
    Int,
    Void,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum UnOp {
    Neg,
    Not,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Mod,
    Lt,
    Le,
    Gt,
    Ge,
    Eq,
    Ne,
}

impl BinOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Mod => "%",
            BinOp::Lt => "<",
            BinOp::Le => "<=",
            BinOp::Gt => ">",
            BinOp::Ge => ">=",
            BinOp::Eq => "==",
            BinOp::Ne => "!=",
        }
    }

    /// C binding strength; larger binds tighter.
    pub fn precedence(self) -> u8 {
        match self {
            BinOp::Eq | BinOp::Ne => 2,
            BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge => 3,
            BinOp::Add | BinOp::Sub => 4,
            BinOp::Mul | BinOp::Div | BinOp::Mod => 5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Expr {
    Var(Ident, CType),
    IntConst(i64),
    /// Only meaningful as an argument of an external call (`printf("A")`).
    StrLit(String),
    Unop(UnOp, Box<Expr>),
    Binop(BinOp, Box<Expr>, Box<Expr>),
    /// The target is always a variable; other lvalues are not in the subset.
    Assign(Ident, CType, Box<Expr>),
    /// Direct call; the callee is a name, never an expression.
    Call(Ident, Vec<Expr>),
}

impl Expr {
    pub fn var(name: Ident) -> Expr {
        Expr::Var(name, CType::Int)
    }

    pub fn binop(op: BinOp, lhs: Expr, rhs: Expr) -> Expr {
        Expr::Binop(op, Box::new(lhs), Box::new(rhs))
    }

    pub fn assign(target: Ident, value: Expr) -> Expr {
        Expr::Assign(target, CType::Int, Box::new(value))
    }

    /// Fully evaluated expressions.
    pub fn is_value(&self) -> bool {
        matches!(self, Expr::IntConst(_) | Expr::StrLit(_))
    }

    /// Calls `f` on every identifier leaf: variables, assignment targets and
    /// callees, left to right.
    pub fn for_each_ident(&self, f: &mut impl FnMut(Ident)) {
        match self {
            Expr::Var(i, _) => f(*i),
            Expr::IntConst(_) | Expr::StrLit(_) => {}
            Expr::Unop(_, e) => e.for_each_ident(f),
            Expr::Binop(_, l, r) => {
                l.for_each_ident(f);
                r.for_each_ident(f);
            }
            Expr::Assign(t, _, e) => {
                f(*t);
                e.for_each_ident(f);
            }
            Expr::Call(callee, args) => {
                f(*callee);
                args.iter().for_each(|a| a.for_each_ident(f));
            }
        }
    }

    pub fn appears(&self, x: Ident) -> bool {
        let mut found = false;
        self.for_each_ident(&mut |i| found |= i == x);
        found
    }

    /// True if the expression contains an assignment or a call.
    pub fn has_side_effects(&self) -> bool {
        match self {
            Expr::Var(..) | Expr::IntConst(_) | Expr::StrLit(_) => false,
            Expr::Unop(_, e) => e.has_side_effects(),
            Expr::Binop(_, l, r) => l.has_side_effects() || r.has_side_effects(),
            Expr::Assign(..) | Expr::Call(..) => true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Statement {
    Skip,
    Expr(Expr),
    Seq(Box<Statement>, Box<Statement>),
    If(Expr, Box<Statement>, Box<Statement>),
    While(Expr, Box<Statement>),
    Return(Option<Expr>),
}

impl Statement {
    pub fn seq(first: Statement, second: Statement) -> Statement {
        Statement::Seq(Box::new(first), Box::new(second))
    }

    /// Right-nested sequence of `items`; `Skip` when empty.
    pub fn block(items: Vec<Statement>) -> Statement {
        let mut iter = items.into_iter().rev();
        match iter.next() {
            None => Statement::Skip,
            Some(last) => iter.fold(last, |acc, s| Statement::seq(s, acc)),
        }
    }

    pub fn if_(cond: Expr, then: Statement, otherwise: Statement) -> Statement {
        Statement::If(cond, Box::new(then), Box::new(otherwise))
    }

    pub fn while_(cond: Expr, body: Statement) -> Statement {
        Statement::While(cond, Box::new(body))
    }

    pub fn for_each_expr(&self, f: &mut impl FnMut(&Expr)) {
        match self {
            Statement::Skip | Statement::Return(None) => {}
            Statement::Expr(e) | Statement::Return(Some(e)) => f(e),
            Statement::Seq(a, b) => {
                a.for_each_expr(f);
                b.for_each_expr(f);
            }
            Statement::If(c, a, b) => {
                f(c);
                a.for_each_expr(f);
                b.for_each_expr(f);
            }
            Statement::While(c, body) => {
                f(c);
                body.for_each_expr(f);
            }
        }
    }
}

/// Does `x` occur anywhere in `s` (variable, assignment target or callee)?
pub fn appears_statement(x: Ident, s: &Statement) -> bool {
    let mut found = false;
    s.for_each_expr(&mut |e| found |= e.appears(x));
    found
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Function {
    pub ret: CType,
    pub params: Vec<(Ident, CType)>,
    pub locals: Vec<(Ident, CType)>,
    pub body: Statement,
}

impl Function {
    pub fn binders(&self) -> impl Iterator<Item = Ident> + '_ {
        self.params.iter().chain(&self.locals).map(|(i, _)| *i)
    }
}

/// Is `x` a parameter or a local of `f`?
pub fn binds(x: Ident, f: &Function) -> bool {
    f.binders().any(|i| i == x)
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GlobVar {
    pub ty: CType,
    pub init: Vec<Expr>,
    pub volatile: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GlobDef {
    Var(GlobVar),
    Fun(Arc<Function>),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Program {
    pub defs: Vec<(Ident, GlobDef)>,
    pub main: Ident,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WellFormedError {
    #[error("`{0}` is defined more than once")]
    DuplicateDefinition(Ident),
    #[error("`{1}` is declared more than once in function `{0}`")]
    DuplicateLocal(Ident, Ident),
    #[error("initializer of `{0}` is not a constant expression")]
    NonConstantInit(Ident),
    #[error("global variable `{0}` has type void")]
    VoidVariable(Ident),
}

impl Program {
    pub fn new(defs: Vec<(Ident, GlobDef)>) -> Program {
        Program {
            defs,
            main: Ident::new("main"),
        }
    }

    pub fn get(&self, name: Ident) -> Option<&GlobDef> {
        self.defs.iter().find(|(i, _)| *i == name).map(|(_, d)| d)
    }

    pub fn function(&self, name: Ident) -> Option<&Arc<Function>> {
        match self.get(name) {
            Some(GlobDef::Fun(f)) => Some(f),
            _ => None,
        }
    }

    pub fn functions(&self) -> impl Iterator<Item = (Ident, &Arc<Function>)> {
        self.defs.iter().filter_map(|(i, d)| match d {
            GlobDef::Fun(f) => Some((*i, f)),
            GlobDef::Var(_) => None,
        })
    }

    pub fn globvars(&self) -> impl Iterator<Item = (Ident, &GlobVar)> {
        self.defs.iter().filter_map(|(i, d)| match d {
            GlobDef::Var(v) => Some((*i, v)),
            GlobDef::Fun(_) => None,
        })
    }

    /// Number of identifier leaves across all bodies and initializers.
    pub fn ident_leaf_count(&self) -> usize {
        let mut n = 0;
        let mut count = |e: &Expr| e.for_each_ident(&mut |_| n += 1);
        for (_, def) in &self.defs {
            match def {
                GlobDef::Var(v) => v.init.iter().for_each(&mut count),
                GlobDef::Fun(f) => f.body.for_each_expr(&mut count),
            }
        }
        n
    }

    /// Structural well-formedness: unique definition names, pairwise distinct
    /// binders per function, constant initializers, no void variables.
    pub fn check_well_formed(&self) -> Result<(), WellFormedError> {
        let mut seen = HashSet::new();
        for (name, def) in &self.defs {
            if !seen.insert(*name) {
                return Err(WellFormedError::DuplicateDefinition(*name));
            }
            match def {
                GlobDef::Var(v) => {
                    if v.ty == CType::Void {
                        return Err(WellFormedError::VoidVariable(*name));
                    }
                    if v.init.iter().any(Expr::has_side_effects) {
                        return Err(WellFormedError::NonConstantInit(*name));
                    }
                }
                GlobDef::Fun(f) => {
                    let mut local = HashSet::new();
                    for b in f.binders() {
                        if !local.insert(b) {
                            return Err(WellFormedError::DuplicateLocal(*name, b));
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

pub fn defines_globvar(x: Ident, p: &Program) -> bool {
    p.globvars().any(|(i, _)| i == x)
}

pub fn defines_volatile_globvar(x: Ident, p: &Program) -> bool {
    p.globvars().any(|(i, v)| i == x && v.volatile)
}

pub fn defines_func(x: Ident, p: &Program) -> bool {
    p.functions().any(|(i, _)| i == x)
}

/// Does `x` occur in an initializer, or in the body of a function that does
/// not bind it?
pub fn appears_free(x: Ident, p: &Program) -> bool {
    p.defs.iter().any(|(_, def)| match def {
        GlobDef::Var(v) => v.init.iter().any(|e| e.appears(x)),
        GlobDef::Fun(f) => !binds(x, f) && appears_statement(x, &f.body),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn id(s: &str) -> Ident {
        Ident::new(s)
    }

    /// `int x; int f(int y) { return y + <tail>; }`
    fn shadow_listing(tail: Expr) -> Program {
        let f = Function {
            ret: CType::Int,
            params: vec![(id("y"), CType::Int)],
            locals: vec![],
            body: Statement::Return(Some(Expr::binop(BinOp::Add, Expr::var(id("y")), tail))),
        };
        Program::new(vec![
            (id("x"), GlobDef::Var(GlobVar { ty: CType::Int, init: vec![], volatile: false })),
            (id("f"), GlobDef::Fun(Arc::new(f))),
        ])
    }

    #[test]
    fn binds_params_and_locals() {
        let p = shadow_listing(Expr::var(id("x")));
        let f = p.function(id("f")).unwrap();
        assert!(binds(id("y"), f));
        assert!(!binds(id("x"), f));
        let g = Function {
            ret: CType::Int,
            params: vec![],
            locals: vec![(id("y"), CType::Int)],
            body: Statement::Skip,
        };
        assert!(binds(id("y"), &g));
    }

    #[test]
    fn appears_statement_examples() {
        let with_x = shadow_listing(Expr::var(id("x")));
        let with_one = shadow_listing(Expr::IntConst(1));
        assert!(appears_statement(id("x"), &with_x.function(id("f")).unwrap().body));
        assert!(!appears_statement(id("x"), &with_one.function(id("f")).unwrap().body));
        assert!(!appears_statement(id("x"), &Statement::Skip));
    }

    #[test]
    fn appears_counts_callees_and_targets() {
        let s = Statement::Expr(Expr::assign(id("t"), Expr::Call(id("g"), vec![])));
        assert!(appears_statement(id("t"), &s));
        assert!(appears_statement(id("g"), &s));
    }

    #[test]
    fn appears_distributes_over_seq() {
        let a = Statement::Expr(Expr::var(id("a")));
        let b = Statement::Return(Some(Expr::var(id("b"))));
        let s = Statement::seq(a.clone(), b.clone());
        for name in ["a", "b", "c"] {
            let x = id(name);
            assert_eq!(appears_statement(x, &s), appears_statement(x, &a) || appears_statement(x, &b));
        }
    }

    #[test]
    fn program_predicates_on_first_listing() {
        let p = shadow_listing(Expr::var(id("x")));
        assert!(defines_globvar(id("x"), &p));
        assert!(!defines_func(id("x"), &p));
        assert!(defines_func(id("f"), &p));
        assert!(appears_free(id("x"), &p));
        assert!(!appears_free(id("y"), &p));
    }

    #[test]
    fn volatile_flag_is_read_directly() {
        let p = Program::new(vec![(
            id("v"),
            GlobDef::Var(GlobVar { ty: CType::Int, init: vec![], volatile: true }),
        )]);
        assert!(defines_volatile_globvar(id("v"), &p));
        assert!(!defines_volatile_globvar(id("w"), &p));
    }

    #[test]
    fn bound_occurrence_is_not_free() {
        let f = Function {
            ret: CType::Int,
            params: vec![(id("y"), CType::Int)],
            locals: vec![],
            body: Statement::Return(Some(Expr::var(id("y")))),
        };
        let p = Program::new(vec![(id("f"), GlobDef::Fun(Arc::new(f)))]);
        assert!(!appears_free(id("y"), &p));
    }

    #[test]
    fn initializer_occurrence_is_free() {
        let p = Program::new(vec![(
            id("x"),
            GlobDef::Var(GlobVar { ty: CType::Int, init: vec![Expr::var(id("z"))], volatile: false }),
        )]);
        assert!(appears_free(id("z"), &p));
    }

    #[test]
    fn well_formedness_reports_duplicates() {
        let var = GlobDef::Var(GlobVar { ty: CType::Int, init: vec![], volatile: false });
        let p = Program::new(vec![(id("x"), var.clone()), (id("x"), var)]);
        assert_eq!(p.check_well_formed(), Err(WellFormedError::DuplicateDefinition(id("x"))));

        let f = Function {
            ret: CType::Int,
            params: vec![(id("a"), CType::Int)],
            locals: vec![(id("a"), CType::Int)],
            body: Statement::Skip,
        };
        let p = Program::new(vec![(id("f"), GlobDef::Fun(Arc::new(f)))]);
        assert_eq!(p.check_well_formed(), Err(WellFormedError::DuplicateLocal(id("f"), id("a"))));
    }

    #[test]
    fn block_folds_right() {
        let a = Statement::Expr(Expr::IntConst(1));
        let b = Statement::Expr(Expr::IntConst(2));
        let c = Statement::Expr(Expr::IntConst(3));
        assert_eq!(Statement::block(vec![]), Statement::Skip);
        assert_eq!(Statement::block(vec![a.clone()]), a);
        assert_eq!(
            Statement::block(vec![a.clone(), b.clone(), c.clone()]),
            Statement::seq(a, Statement::seq(b, c))
        );
    }
}
