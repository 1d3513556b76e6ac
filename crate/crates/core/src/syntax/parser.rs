use std::sync::Arc;

use super::lexer::{tokenize, Pos, Token};
use super::{is_c_keyword, ParseError};
use crate::ast::{BinOp, CType, Expr, Function, GlobDef, GlobVar, Program, Statement, UnOp, WellFormedError};
use crate::ident::Ident;

/// Parses a whole translation unit.
///
/// Names are interned but never made unique: a global `x` and a parameter
/// `x` produce the same [`Ident`]. Declarations in nested blocks are hoisted
/// to the enclosing function's locals; an initialized declaration becomes an
/// assignment at its original position.
pub fn parse_str(text: &str) -> Result<Program, ParseError> {
    let tokens = tokenize(text)?;
    let mut parser = Parser { tokens, pos: 0 };
    let mut defs = Vec::new();
    while !parser.at_eof() {
        defs.push(parser.top_level()?);
    }
    let program = Program::new(defs);
    program.check_well_formed().map_err(|e| {
        let eof = parser.tokens.last().unwrap().1;
        ParseError::new(eof, e.to_string())
    })?;
    Ok(program)
}

struct Parser {
    tokens: Vec<(Token, Pos)>,
    pos: usize,
}

/// Locals collected while parsing one function body.
struct FunctionScope {
    name: Ident,
    params: Vec<(Ident, CType)>,
    locals: Vec<(Ident, CType)>,
}

impl FunctionScope {
    fn declare(&mut self, name: Ident, pos: Pos) -> Result<(), ParseError> {
        if self.params.iter().chain(&self.locals).any(|(i, _)| *i == name) {
            return Err(ParseError::new(pos, WellFormedError::DuplicateLocal(self.name, name).to_string()));
        }
        self.locals.push((name, CType::Int));
        Ok(())
    }
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos].0
    }

    fn peek_at(&self, offset: usize) -> &Token {
        let i = (self.pos + offset).min(self.tokens.len() - 1);
        &self.tokens[i].0
    }

    fn here(&self) -> Pos {
        self.tokens[self.pos].1
    }

    fn at_eof(&self) -> bool {
        matches!(self.peek(), Token::Eof)
    }

    fn bump(&mut self) -> Token {
        let tok = self.tokens[self.pos].0.clone();
        if !self.at_eof() {
            self.pos += 1;
        }
        tok
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError::new(self.here(), message))
    }

    fn is_punct(&self, p: &str) -> bool {
        matches!(self.peek(), Token::Punct(q) if *q == p)
    }

    fn is_word(&self, w: &str) -> bool {
        matches!(self.peek(), Token::Ident(s) if s == w)
    }

    fn eat_punct(&mut self, p: &str) -> bool {
        if self.is_punct(p) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn eat_word(&mut self, w: &str) -> bool {
        if self.is_word(w) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect_punct(&mut self, p: &str) -> Result<(), ParseError> {
        if self.eat_punct(p) {
            Ok(())
        } else {
            self.error(format!("expected `{p}`, found {}", describe(self.peek())))
        }
    }

    /// A non-keyword identifier.
    fn name(&mut self) -> Result<Ident, ParseError> {
        match self.peek().clone() {
            Token::Ident(s) if !is_c_keyword(&s) => {
                self.bump();
                Ok(Ident::new(&s))
            }
            Token::Ident(s) => self.error(format!("unexpected keyword `{s}`")),
            other => self.error(format!("expected identifier, found {}", describe(&other))),
        }
    }

    fn type_name(&mut self) -> Result<CType, ParseError> {
        if self.eat_word("int") {
            Ok(CType::Int)
        } else if self.eat_word("void") {
            Ok(CType::Void)
        } else {
            self.error(format!("expected `int` or `void`, found {}", describe(self.peek())))
        }
    }

    fn top_level(&mut self) -> Result<(Ident, GlobDef), ParseError> {
        let volatile = self.eat_word("volatile");
        let ty = self.type_name()?;
        let name_pos = self.here();
        let name = self.name()?;
        if self.is_punct("(") {
            if volatile {
                return Err(ParseError::new(name_pos, "functions cannot be volatile"));
            }
            let f = self.function(name, ty)?;
            return Ok((name, GlobDef::Fun(Arc::new(f))));
        }
        if ty == CType::Void {
            return Err(ParseError::new(name_pos, WellFormedError::VoidVariable(name).to_string()));
        }
        let mut init = Vec::new();
        if self.eat_punct("=") {
            let init_pos = self.here();
            let e = self.expr()?;
            if e.has_side_effects() {
                return Err(ParseError::new(init_pos, WellFormedError::NonConstantInit(name).to_string()));
            }
            init.push(e);
        }
        self.expect_punct(";")?;
        Ok((name, GlobDef::Var(GlobVar { ty, init, volatile })))
    }

    fn function(&mut self, name: Ident, ret: CType) -> Result<Function, ParseError> {
        self.expect_punct("(")?;
        let mut scope = FunctionScope { name, params: Vec::new(), locals: Vec::new() };
        let no_params = self.is_punct(")") || (self.is_word("void") && matches!(self.peek_at(1), Token::Punct(")")));
        if no_params {
            self.eat_word("void");
        } else {
            loop {
                if self.type_name()? != CType::Int {
                    return self.error("parameters must have type int");
                }
                let pos = self.here();
                let p = self.name()?;
                if scope.params.iter().any(|(i, _)| *i == p) {
                    return Err(ParseError::new(pos, WellFormedError::DuplicateLocal(name, p).to_string()));
                }
                scope.params.push((p, CType::Int));
                if !self.eat_punct(",") {
                    break;
                }
            }
        }
        self.expect_punct(")")?;
        let body = self.block(&mut scope)?;
        Ok(Function { ret, params: scope.params, locals: scope.locals, body })
    }

    /// `{ items }` including the braces.
    fn block(&mut self, scope: &mut FunctionScope) -> Result<Statement, ParseError> {
        self.expect_punct("{")?;
        let mut items = Vec::new();
        while !self.eat_punct("}") {
            if self.at_eof() {
                return self.error("unexpected end of file, expected `}`");
            }
            if self.is_word("int") {
                self.declaration(scope, &mut items)?;
            } else {
                items.push(self.statement(scope)?);
            }
        }
        Ok(Statement::block(items))
    }

    fn declaration(&mut self, scope: &mut FunctionScope, items: &mut Vec<Statement>) -> Result<(), ParseError> {
        self.bump();
        loop {
            let pos = self.here();
            let name = self.name()?;
            scope.declare(name, pos)?;
            if self.eat_punct("=") {
                let value = self.expr()?;
                items.push(Statement::Expr(Expr::assign(name, value)));
            }
            if !self.eat_punct(",") {
                break;
            }
        }
        self.expect_punct(";")
    }

    fn statement(&mut self, scope: &mut FunctionScope) -> Result<Statement, ParseError> {
        if self.eat_punct(";") {
            return Ok(Statement::Skip);
        }
        if self.is_punct("{") {
            return self.block(scope);
        }
        if self.eat_word("if") {
            self.expect_punct("(")?;
            let cond = self.expr()?;
            self.expect_punct(")")?;
            let then = self.statement(scope)?;
            let otherwise = if self.eat_word("else") { self.statement(scope)? } else { Statement::Skip };
            return Ok(Statement::if_(cond, then, otherwise));
        }
        if self.eat_word("while") {
            self.expect_punct("(")?;
            let cond = self.expr()?;
            self.expect_punct(")")?;
            let body = self.statement(scope)?;
            return Ok(Statement::while_(cond, body));
        }
        if self.eat_word("return") {
            if self.eat_punct(";") {
                return Ok(Statement::Return(None));
            }
            let e = self.expr()?;
            self.expect_punct(";")?;
            return Ok(Statement::Return(Some(e)));
        }
        if let Token::Ident(w) = self.peek() {
            if is_c_keyword(w) {
                return self.error(format!("unsupported statement keyword `{w}`"));
            }
        }
        let start = self.here();
        let e = self.expr()?;
        // `v++;` and `v--;` are accepted as statements only.
        let step = if self.eat_punct("++") {
            Some(BinOp::Add)
        } else if self.eat_punct("--") {
            Some(BinOp::Sub)
        } else {
            None
        };
        let e = match (step, e) {
            (None, e) => e,
            (Some(op), Expr::Var(v, ty)) => Expr::Assign(v, ty, Box::new(Expr::binop(op, Expr::Var(v, ty), Expr::IntConst(1)))),
            (Some(_), _) => return Err(ParseError::new(start, "increment of a non-variable")),
        };
        self.expect_punct(";")?;
        Ok(Statement::Expr(e))
    }

    pub fn expr(&mut self) -> Result<Expr, ParseError> {
        let start = self.here();
        let lhs = self.binary(2)?;
        if self.eat_punct("=") {
            let Expr::Var(target, ty) = lhs else {
                return Err(ParseError::new(start, "assignment to a non-lvalue"));
            };
            let rhs = self.expr()?;
            return Ok(Expr::Assign(target, ty, Box::new(rhs)));
        }
        Ok(lhs)
    }

    fn binop_here(&self) -> Option<BinOp> {
        let Token::Punct(p) = self.peek() else { return None };
        Some(match *p {
            "+" => BinOp::Add,
            "-" => BinOp::Sub,
            "*" => BinOp::Mul,
            "/" => BinOp::Div,
            "%" => BinOp::Mod,
            "<" => BinOp::Lt,
            "<=" => BinOp::Le,
            ">" => BinOp::Gt,
            ">=" => BinOp::Ge,
            "==" => BinOp::Eq,
            "!=" => BinOp::Ne,
            _ => return None,
        })
    }

    /// Precedence climbing over left-associative binary operators.
    fn binary(&mut self, min_prec: u8) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        while let Some(op) = self.binop_here() {
            if op.precedence() < min_prec {
                break;
            }
            self.bump();
            let rhs = self.binary(op.precedence() + 1)?;
            lhs = Expr::binop(op, lhs, rhs);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.eat_punct("-") {
            return Ok(Expr::Unop(UnOp::Neg, Box::new(self.unary()?)));
        }
        if self.eat_punct("!") {
            return Ok(Expr::Unop(UnOp::Not, Box::new(self.unary()?)));
        }
        self.primary()
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        match self.peek().clone() {
            Token::Int(n) => {
                self.bump();
                Ok(Expr::IntConst(n))
            }
            Token::Str(s) => {
                self.bump();
                Ok(Expr::StrLit(s))
            }
            Token::Punct("(") => {
                self.bump();
                let e = self.expr()?;
                self.expect_punct(")")?;
                Ok(e)
            }
            Token::Ident(_) => {
                let name = self.name()?;
                if self.eat_punct("(") {
                    let mut args = Vec::new();
                    if !self.eat_punct(")") {
                        loop {
                            args.push(self.expr()?);
                            if self.eat_punct(")") {
                                break;
                            }
                            self.expect_punct(",")?;
                        }
                    }
                    Ok(Expr::Call(name, args))
                } else {
                    Ok(Expr::var(name))
                }
            }
            other => self.error(format!("expected expression, found {}", describe(&other))),
        }
    }
}

fn describe(tok: &Token) -> String {
    match tok {
        Token::Ident(s) => format!("`{s}`"),
        Token::Int(n) => format!("`{n}`"),
        Token::Str(_) => "string literal".to_string(),
        Token::Punct(p) => format!("`{p}`"),
        Token::Eof => "end of file".to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn id(s: &str) -> Ident {
        Ident::new(s)
    }

    #[test]
    fn first_shadowing_listing() {
        let p = parse_str("int x;\nint f(int y){\n  return y + x;\n}\n").unwrap();
        assert_eq!(p.defs.len(), 2);
        assert_eq!(p.defs[0].0, id("x"));
        assert!(matches!(p.defs[0].1, GlobDef::Var(_)));
        let f = p.function(id("f")).unwrap();
        assert_eq!(f.params, vec![(id("y"), CType::Int)]);
        assert_eq!(
            f.body,
            Statement::Return(Some(Expr::binop(BinOp::Add, Expr::var(id("y")), Expr::var(id("x")))))
        );
    }

    #[test]
    fn empty_file_is_an_empty_program() {
        let p = parse_str("").unwrap();
        assert!(p.defs.is_empty());
        assert_eq!(p.main, id("main"));
    }

    #[test]
    fn lexical_error_is_reported() {
        let err = parse_str("int 2x;").unwrap_err();
        assert_eq!((err.line, err.column), (1, 5));
    }

    #[test]
    fn shadowing_is_not_uniquified() {
        let p = parse_str("int x; int f(int x) { return x; }").unwrap();
        let f = p.function(id("f")).unwrap();
        assert_eq!(p.defs[0].0, f.params[0].0);
        assert_eq!(f.body, Statement::Return(Some(Expr::var(id("x")))));
    }

    #[test]
    fn nested_declarations_are_hoisted() {
        let p = parse_str("int x = 1; void main(void){ x++; { int y = 1; y++; } }").unwrap();
        let main = p.function(id("main")).unwrap();
        assert_eq!(main.locals, vec![(id("y"), CType::Int)]);
        let inc = |v: &str| {
            Statement::Expr(Expr::assign(id(v), Expr::binop(BinOp::Add, Expr::var(id(v)), Expr::IntConst(1))))
        };
        let init_y = Statement::Expr(Expr::assign(id("y"), Expr::IntConst(1)));
        assert_eq!(main.body, Statement::seq(inc("x"), Statement::seq(init_y, inc("y"))));
    }

    #[test]
    fn printf_listing() {
        let p = parse_str("int main(){\n  return printf(\"A\") + printf(\"B\");\n}").unwrap();
        let main = p.function(id("main")).unwrap();
        let call = |s: &str| Expr::Call(id("printf"), vec![Expr::StrLit(s.into())]);
        assert_eq!(main.body, Statement::Return(Some(Expr::binop(BinOp::Add, call("A"), call("B")))));
    }

    #[test]
    fn precedence_and_associativity() {
        let p = parse_str("int g = 1 - 2 - 3 * 4 < 5 == 0;").unwrap();
        let GlobDef::Var(v) = &p.defs[0].1 else { panic!() };
        let c = Expr::IntConst;
        let sub = Expr::binop(BinOp::Sub, Expr::binop(BinOp::Sub, c(1), c(2)), Expr::binop(BinOp::Mul, c(3), c(4)));
        let expected = Expr::binop(BinOp::Eq, Expr::binop(BinOp::Lt, sub, c(5)), c(0));
        assert_eq!(v.init, vec![expected]);
    }

    #[test]
    fn rejections() {
        for bad in [
            "int f(int a, int a) { return a; }",
            "int f(int a) { int a; return a; }",
            "int g = f();",
            "int x; int x;",
            "void v;",
            "int f() { 1 = 2; }",
            "int f() { goto l; }",
            "int while;",
            "volatile int f() { return 0; }",
            "int f() { return 0; ",
        ] {
            assert!(parse_str(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn volatile_globals() {
        let p = parse_str("volatile int v = 2;").unwrap();
        assert!(matches!(&p.defs[0].1, GlobDef::Var(v) if v.volatile));
    }
}
