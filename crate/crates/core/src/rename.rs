//! Renaming of a global variable `x` into `y`.
//!
//! The operation walks every definition of the program. The definition of `x`
//! itself is renamed after a handful of checks; every function is handled by
//! a four-way case analysis on whether it binds `x` and/or `y`, and only
//! functions binding neither have their body rewritten. Any leaf equal to `y`
//! met while rewriting aborts the whole operation, so a successful rename
//! never merges two distinct variables.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::ast::{
    appears_free, appears_statement, binds, defines_func, defines_globvar, defines_volatile_globvar, Expr,
    Function, GlobDef, GlobVar, Program, Statement,
};
use crate::ident::Ident;

/// The closed catalog of refusal messages.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Error)]
pub enum RenameErrorKind {
    #[error("target is a C keyword")]
    TargetIsKeyword,
    #[error("x equals main")]
    XIsMain,
    #[error("y equals main")]
    YIsMain,
    #[error("x not declared as a global variable")]
    XNotGlobalVar,
    #[error("x is declared as a function")]
    XIsFunction,
    #[error("x occurs in its own initialization")]
    XInOwnInit,
    #[error("replacing identifier already occurs")]
    AlreadyOccurs,
    #[error("variable is volatile")]
    Volatile,
    #[error("program defines y")]
    DefinesY,
    #[error("Replacing identifier occurring in function.")]
    OccursInFunction,
    #[error("This renaming would introduce an undesired shadowing.")]
    UndesiredShadowing,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RenameError {
    pub kind: RenameErrorKind,
    /// Definition being processed when the refusal happened, if any.
    pub location: Option<Ident>,
}

impl RenameError {
    pub fn new(kind: RenameErrorKind) -> RenameError {
        RenameError { kind, location: None }
    }

    fn at(mut self, def: Ident) -> RenameError {
        self.location.get_or_insert(def);
        self
    }

    pub fn message(&self) -> String {
        self.kind.to_string()
    }
}

impl fmt::Display for RenameError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.kind, f)
    }
}

impl std::error::Error for RenameError {}

impl From<RenameErrorKind> for RenameError {
    fn from(kind: RenameErrorKind) -> Self {
        RenameError::new(kind)
    }
}

pub type Result<T> = std::result::Result<T, RenameError>;

/// A pair of distinct names: `x` is renamed into `y`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RenameRequest {
    x: Ident,
    y: Ident,
}

impl RenameRequest {
    pub fn new(x: Ident, y: Ident) -> Result<RenameRequest> {
        if x == y {
            return Err(RenameErrorKind::AlreadyOccurs.into());
        }
        Ok(RenameRequest { x, y })
    }

    pub fn x(&self) -> Ident {
        self.x
    }

    pub fn y(&self) -> Ident {
        self.y
    }

    pub fn inverse(&self) -> RenameRequest {
        RenameRequest { x: self.y, y: self.x }
    }

    pub fn apply(&self, p: &Program) -> Result<Program> {
        rename_globvar_hard(self.x, self.y, p)
    }
}

/// Which of the engine's refusal checks are active. Everything is on except
/// in the harness-power meta-tests.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Checks {
    occurs_in_function: bool,
    undesired_shadowing: bool,
    volatile: bool,
    y_in_init: bool,
}

impl Checks {
    const ALL: Checks = Checks {
        occurs_in_function: true,
        undesired_shadowing: true,
        volatile: true,
        y_in_init: true,
    };
}

pub fn change_ident_untyped(x: Ident, y: Ident, i: Ident) -> Result<Ident> {
    if x == i {
        Ok(y)
    } else if i == y {
        Err(RenameErrorKind::AlreadyOccurs.into())
    } else {
        Ok(i)
    }
}

pub fn rename_expr(x: Ident, y: Ident, e: &Expr) -> Result<Expr> {
    Ok(match e {
        Expr::Var(i, ty) => Expr::Var(change_ident_untyped(x, y, *i)?, *ty),
        Expr::IntConst(n) => Expr::IntConst(*n),
        Expr::StrLit(s) => Expr::StrLit(s.clone()),
        Expr::Unop(op, inner) => Expr::Unop(*op, Box::new(rename_expr(x, y, inner)?)),
        Expr::Binop(op, l, r) => Expr::Binop(*op, Box::new(rename_expr(x, y, l)?), Box::new(rename_expr(x, y, r)?)),
        Expr::Assign(t, ty, value) => {
            Expr::Assign(change_ident_untyped(x, y, *t)?, *ty, Box::new(rename_expr(x, y, value)?))
        }
        Expr::Call(callee, args) => Expr::Call(
            change_ident_untyped(x, y, *callee)?,
            args.iter().map(|a| rename_expr(x, y, a)).collect::<Result<_>>()?,
        ),
    })
}

pub fn rename_statement(x: Ident, y: Ident, s: &Statement) -> Result<Statement> {
    Ok(match s {
        Statement::Skip => Statement::Skip,
        Statement::Expr(e) => Statement::Expr(rename_expr(x, y, e)?),
        Statement::Seq(a, b) => Statement::seq(rename_statement(x, y, a)?, rename_statement(x, y, b)?),
        Statement::If(c, a, b) => {
            Statement::if_(rename_expr(x, y, c)?, rename_statement(x, y, a)?, rename_statement(x, y, b)?)
        }
        Statement::While(c, body) => Statement::while_(rename_expr(x, y, c)?, rename_statement(x, y, body)?),
        Statement::Return(e) => Statement::Return(e.as_ref().map(|e| rename_expr(x, y, e)).transpose()?),
    })
}

/// Renames the body unconditionally; everything else is kept.
pub fn force_body(x: Ident, y: Ident, f: &Function) -> Result<Function> {
    let body = rename_statement(x, y, &f.body)?;
    Ok(Function {
        ret: f.ret,
        params: f.params.clone(),
        locals: f.locals.clone(),
        body,
    })
}

/// How a function relates to the two names. Drives both the program
/// transformation and the renaming of execution states.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ShadowCase {
    /// Binds `x` and `y`: left alone.
    BindsBoth,
    /// Binds `x` only: left alone, but `y` must not occur.
    BindsOld,
    /// Binds `y` only: left alone, but `x` must not occur.
    BindsNew,
    /// Binds neither: the body is rewritten.
    BindsNeither,
}

impl ShadowCase {
    pub fn classify(binds_x: bool, binds_y: bool) -> ShadowCase {
        match (binds_x, binds_y) {
            (true, true) => ShadowCase::BindsBoth,
            (true, false) => ShadowCase::BindsOld,
            (false, true) => ShadowCase::BindsNew,
            (false, false) => ShadowCase::BindsNeither,
        }
    }

    pub fn of(x: Ident, y: Ident, f: &Function) -> ShadowCase {
        ShadowCase::classify(binds(x, f), binds(y, f))
    }
}

pub fn propagate_change_ident(x: Ident, y: Ident, f: &Function) -> Result<Function> {
    propagate_with(Checks::ALL, x, y, f)
}

fn propagate_with(checks: Checks, x: Ident, y: Ident, f: &Function) -> Result<Function> {
    match ShadowCase::of(x, y, f) {
        ShadowCase::BindsBoth => Ok(f.clone()),
        ShadowCase::BindsOld => {
            if checks.occurs_in_function && appears_statement(y, &f.body) {
                Err(RenameErrorKind::OccursInFunction.into())
            } else {
                Ok(f.clone())
            }
        }
        ShadowCase::BindsNew => {
            if checks.undesired_shadowing && appears_statement(x, &f.body) {
                Err(RenameErrorKind::UndesiredShadowing.into())
            } else {
                Ok(f.clone())
            }
        }
        ShadowCase::BindsNeither => force_body(x, y, f),
    }
}

pub fn rename_definition(x: Ident, y: Ident, def: &(Ident, GlobDef)) -> Result<(Ident, GlobDef)> {
    rename_definition_with(Checks::ALL, x, y, def)
}

fn rename_definition_with(checks: Checks, x: Ident, y: Ident, def: &(Ident, GlobDef)) -> Result<(Ident, GlobDef)> {
    let (name, content) = def;
    let renamed = if *name == x {
        let GlobDef::Var(v) = content else {
            return Err(RenameError::new(RenameErrorKind::XIsFunction).at(*name));
        };
        if v.init.iter().any(|e| e.appears(x)) {
            return Err(RenameError::new(RenameErrorKind::XInOwnInit).at(*name));
        }
        if checks.y_in_init && v.init.iter().any(|e| e.appears(y)) {
            return Err(RenameError::new(RenameErrorKind::AlreadyOccurs).at(*name));
        }
        if checks.volatile && v.volatile {
            return Err(RenameError::new(RenameErrorKind::Volatile).at(*name));
        }
        (y, content.clone())
    } else if *name == y {
        return Err(RenameError::new(RenameErrorKind::DefinesY).at(*name));
    } else {
        let content = match content {
            GlobDef::Fun(f) => GlobDef::Fun(Arc::new(propagate_with(checks, x, y, f)?)),
            GlobDef::Var(v) => GlobDef::Var(GlobVar {
                ty: v.ty,
                init: v.init.iter().map(|e| rename_expr(x, y, e)).collect::<Result<_>>()?,
                volatile: v.volatile,
            }),
        };
        (*name, content)
    };
    Ok(renamed)
}

/// Renames global variable `x` into `y` throughout `p`.
///
/// Refuses when either name is `main`, when `x` is not a global variable,
/// or when any definition-level check fails; the first refusal in definition
/// order is reported. The keyword check on `y` happens earlier, on text.
pub fn rename_globvar_hard(x: Ident, y: Ident, p: &Program) -> Result<Program> {
    rename_with(Checks::ALL, x, y, p)
}

fn rename_with(checks: Checks, x: Ident, y: Ident, p: &Program) -> Result<Program> {
    if x == y {
        return Err(RenameErrorKind::AlreadyOccurs.into());
    }
    if x == p.main {
        return Err(RenameErrorKind::XIsMain.into());
    }
    if y == p.main {
        return Err(RenameErrorKind::YIsMain.into());
    }
    if !defines_globvar(x, p) {
        return Err(RenameErrorKind::XNotGlobalVar.into());
    }
    let defs = p
        .defs
        .iter()
        .map(|def| rename_definition_with(checks, x, y, def).map_err(|e| e.at(def.0)))
        .collect::<Result<_>>()?;
    Ok(Program { defs, main: p.main })
}

/// Engine variants with one refusal check removed. Used to show that the
/// property suite notices each missing check.
#[cfg(feature = "mutants")]
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mutant {
    DropOccursInFunction,
    DropUndesiredShadowing,
    SkipVolatile,
    SkipYInInit,
}

#[cfg(feature = "mutants")]
impl Mutant {
    pub const ALL: [Mutant; 4] = [
        Mutant::DropOccursInFunction,
        Mutant::DropUndesiredShadowing,
        Mutant::SkipVolatile,
        Mutant::SkipYInInit,
    ];

    pub fn rename(self, x: Ident, y: Ident, p: &Program) -> Result<Program> {
        let mut checks = Checks::ALL;
        match self {
            Mutant::DropOccursInFunction => checks.occurs_in_function = false,
            Mutant::DropUndesiredShadowing => checks.undesired_shadowing = false,
            Mutant::SkipVolatile => checks.volatile = false,
            Mutant::SkipYInInit => checks.y_in_init = false,
        }
        rename_with(checks, x, y, p)
    }
}

/// Renaming `x` into `y` in `f` would capture: `f` binds `y`, does not bind
/// `x`, and mentions `x`.
pub fn covers(y: Ident, x: Ident, f: &Function) -> bool {
    binds(y, f) && !binds(x, f) && appears_statement(x, &f.body)
}

pub fn no_cover_in_prog(x: Ident, y: Ident, p: &Program) -> bool {
    p.functions().all(|(_, f)| !covers(y, x, f))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Clause {
    Distinct,
    XNotMain,
    YNotMain,
    DefinesGlobvarX,
    NotDefinesGlobvarY,
    NotVolatileX,
    NotFuncX,
    NotFuncY,
    NotFreeY,
    NotFreeX,
    NoCover,
}

impl Clause {
    pub const ALL: [Clause; 11] = [
        Clause::Distinct,
        Clause::XNotMain,
        Clause::YNotMain,
        Clause::DefinesGlobvarX,
        Clause::NotDefinesGlobvarY,
        Clause::NotVolatileX,
        Clause::NotFuncX,
        Clause::NotFuncY,
        Clause::NotFreeY,
        Clause::NotFreeX,
        Clause::NoCover,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Clause::Distinct => "x != y",
            Clause::XNotMain => "x != main",
            Clause::YNotMain => "y != main",
            Clause::DefinesGlobvarX => "defines_globvar(x)",
            Clause::NotDefinesGlobvarY => "!defines_globvar(y)",
            Clause::NotVolatileX => "!defines_volatile_globvar(x)",
            Clause::NotFuncX => "!defines_func(x)",
            Clause::NotFuncY => "!defines_func(y)",
            Clause::NotFreeY => "!appears_free(y)",
            Clause::NotFreeX => "!appears_free(x)",
            Clause::NoCover => "no_cover_in_prog(x, y)",
        }
    }

    pub fn holds(self, x: Ident, y: Ident, p: &Program) -> bool {
        match self {
            Clause::Distinct => x != y,
            Clause::XNotMain => x != p.main,
            Clause::YNotMain => y != p.main,
            Clause::DefinesGlobvarX => defines_globvar(x, p),
            Clause::NotDefinesGlobvarY => !defines_globvar(y, p),
            Clause::NotVolatileX => !defines_volatile_globvar(x, p),
            Clause::NotFuncX => !defines_func(x, p),
            Clause::NotFuncY => !defines_func(y, p),
            Clause::NotFreeY => !appears_free(y, p),
            Clause::NotFreeX => !appears_free(x, p),
            Clause::NoCover => no_cover_in_prog(x, y, p),
        }
    }
}

/// Truth value of every clause of the sufficient precondition. The clause
/// about optimized global accesses is absent: the AST cannot express them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PreconditionReport {
    pub clauses: Vec<(Clause, bool)>,
}

impl PreconditionReport {
    pub fn passes(&self) -> bool {
        self.clauses.iter().all(|(_, ok)| *ok)
    }

    pub fn violated(&self) -> Vec<Clause> {
        self.clauses.iter().filter(|(_, ok)| !ok).map(|(c, _)| *c).collect()
    }
}

pub fn check_sufficient_precondition(x: Ident, y: Ident, p: &Program) -> PreconditionReport {
    PreconditionReport {
        clauses: Clause::ALL.iter().map(|c| (*c, c.holds(x, y, p))).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_str;
    use RenameErrorKind::*;

    fn id(s: &str) -> Ident {
        Ident::new(s)
    }

    fn f_of(p: &Program) -> &Function {
        p.function(id("f")).unwrap()
    }

    const CAPTURE: &str = "int x;\nint f(int y){\n  return y + x;\n}\n";
    const SHADOW_OK: &str = "int x;\nint f(int y){\n  return y + 1;\n}\n";
    const FREE_Y: &str = "int x;\nint f(int x){\n  return y;\n}\n";

    #[test]
    fn change_ident_untyped_cases() {
        let (x, y, z) = (id("x"), id("y"), id("z"));
        assert_eq!(change_ident_untyped(x, y, x), Ok(y));
        assert_eq!(change_ident_untyped(x, y, y), Err(AlreadyOccurs.into()));
        assert_eq!(change_ident_untyped(x, y, z), Ok(z));
    }

    #[test]
    fn rename_statement_cases() {
        let (x, y) = (id("x"), id("y"));
        let ret = |v: &str| Statement::Return(Some(Expr::binop(crate::ast::BinOp::Add, Expr::var(id(v)), Expr::IntConst(1))));
        assert_eq!(rename_statement(x, y, &ret("x")), Ok(ret("y")));
        assert_eq!(
            rename_statement(x, y, &Statement::Return(Some(Expr::var(y)))).unwrap_err().kind,
            AlreadyOccurs
        );
        assert_eq!(rename_statement(x, y, &Statement::Skip), Ok(Statement::Skip));
    }

    #[test]
    fn force_body_cases() {
        let (x, y) = (id("x"), id("y"));
        let p = parse_str("int g(void){ return x; }").unwrap();
        let g = p.function(id("g")).unwrap();
        assert_eq!(force_body(x, y, g).unwrap().body, Statement::Return(Some(Expr::var(y))));
        let p = parse_str("int g(void){ return y; }").unwrap();
        assert_eq!(force_body(x, y, p.function(id("g")).unwrap()).unwrap_err().kind, AlreadyOccurs);
        let p = parse_str("int g(int a){ int b; }").unwrap();
        let g = p.function(id("g")).unwrap();
        assert_eq!(&force_body(x, y, g).unwrap(), &**g);
    }

    #[test]
    fn four_shadowing_cases() {
        let (x, y) = (id("x"), id("y"));
        let p = parse_str(CAPTURE).unwrap();
        assert_eq!(propagate_change_ident(x, y, f_of(&p)).unwrap_err().kind, UndesiredShadowing);
        assert_eq!(
            UndesiredShadowing.to_string(),
            "This renaming would introduce an undesired shadowing."
        );

        let p = parse_str(SHADOW_OK).unwrap();
        assert_eq!(&propagate_change_ident(x, y, f_of(&p)).unwrap(), f_of(&p));

        let p = parse_str(FREE_Y).unwrap();
        assert_eq!(propagate_change_ident(x, y, f_of(&p)).unwrap_err().kind, OccursInFunction);
        assert_eq!(OccursInFunction.to_string(), "Replacing identifier occurring in function.");

        let p = parse_str("int f(int x){ int y; return x + y; }").unwrap();
        assert_eq!(&propagate_change_ident(x, y, f_of(&p)).unwrap(), f_of(&p));
    }

    #[test]
    fn definition_cases() {
        let (x, y) = (id("x"), id("y"));
        let p = parse_str("int x = 1; volatile int v; int y;").unwrap();
        let (name, def) = rename_definition(x, y, &p.defs[0]).unwrap();
        assert_eq!((name, &def), (y, &p.defs[0].1));
        assert_eq!(rename_definition(id("v"), y, &p.defs[1]).unwrap_err().kind, Volatile);
        assert_eq!(rename_definition(x, y, &p.defs[2]).unwrap_err().kind, DefinesY);
    }

    #[test]
    fn definition_check_order() {
        let (x, y) = (id("x"), id("y"));
        // (b) before (c) before (d)
        let p = parse_str("volatile int x = x + y;").unwrap();
        assert_eq!(rename_definition(x, y, &p.defs[0]).unwrap_err().kind, XInOwnInit);
        let p = parse_str("volatile int x = y;").unwrap();
        assert_eq!(rename_definition(x, y, &p.defs[0]).unwrap_err().kind, AlreadyOccurs);
        let p = parse_str("int x(void) { return 0; }").unwrap();
        assert_eq!(rename_definition(x, y, &p.defs[0]).unwrap_err().kind, XIsFunction);
    }

    #[test]
    fn program_level() {
        let (x, y) = (id("x"), id("y"));
        let p = parse_str(SHADOW_OK).unwrap();
        let r = rename_globvar_hard(x, y, &p).unwrap();
        assert_eq!(r.defs[0].0, y);
        assert_eq!(r.defs[1], p.defs[1]);

        let p = parse_str("int x; int main(void){ return x; }").unwrap();
        assert_eq!(rename_globvar_hard(id("main"), y, &p).unwrap_err().kind, XIsMain);
        assert_eq!(rename_globvar_hard(x, id("main"), &p).unwrap_err().kind, YIsMain);
        assert_eq!(rename_globvar_hard(id("z"), y, &p).unwrap_err().kind, XNotGlobalVar);
        assert_eq!(rename_globvar_hard(x, x, &p).unwrap_err().kind, AlreadyOccurs);

        let err = rename_globvar_hard(x, y, &parse_str(CAPTURE).unwrap()).unwrap_err();
        assert_eq!(err.location, Some(id("f")));
    }

    #[test]
    fn initializers_of_other_globals_are_renamed() {
        let (x, y) = (id("x"), id("y"));
        let p = parse_str("int x = 2; int z = x + 1;").unwrap();
        let r = rename_globvar_hard(x, y, &p).unwrap();
        assert_eq!(crate::syntax::pretty_print(&r), "int y = 2;\nint z = y + 1;\n");
        let p = parse_str("int x = 2; int z = y;").unwrap();
        assert_eq!(rename_globvar_hard(x, y, &p).unwrap_err().kind, AlreadyOccurs);
    }

    #[test]
    fn request_rejects_equal_names() {
        assert!(RenameRequest::new(id("x"), id("x")).is_err());
        let r = RenameRequest::new(id("x"), id("y")).unwrap();
        assert_eq!(r.inverse().x(), id("y"));
    }

    #[test]
    fn covers_examples() {
        let (x, y) = (id("x"), id("y"));
        assert!(covers(y, x, f_of(&parse_str(CAPTURE).unwrap())));
        assert!(!covers(y, x, f_of(&parse_str(SHADOW_OK).unwrap())));
        assert!(!covers(y, x, f_of(&parse_str("int f(int x, int y){ return x; }").unwrap())));
        assert!(!no_cover_in_prog(x, y, &parse_str(CAPTURE).unwrap()));
        assert!(no_cover_in_prog(x, y, &parse_str(SHADOW_OK).unwrap()));
        assert!(no_cover_in_prog(x, y, &parse_str("").unwrap()));
    }

    #[test]
    fn precondition_reports() {
        let (x, y) = (id("x"), id("y"));
        let report = check_sufficient_precondition(x, y, &parse_str(SHADOW_OK).unwrap());
        assert!(report.passes(), "{report:?}");

        let report = check_sufficient_precondition(x, y, &parse_str(CAPTURE).unwrap());
        assert_eq!(report.violated(), vec![Clause::NotFreeX, Clause::NoCover]);

        let report = check_sufficient_precondition(x, x, &parse_str(SHADOW_OK).unwrap());
        assert!(report.violated().contains(&Clause::Distinct));
    }
}
