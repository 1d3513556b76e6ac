use std::fmt::Write;

use crate::ast::{CType, Expr, Function, GlobDef, Program, Statement, UnOp};
use crate::ident::Ident;

const INDENT: &str = "  ";

/// Renders a program as C source. Output is a pure function of the AST;
/// `parse_str(pretty_print(p)) == p` for every well-formed `p` whose
/// constants are non-negative.
pub fn pretty_print(p: &Program) -> String {
    let mut out = String::new();
    for (name, def) in &p.defs {
        match def {
            GlobDef::Var(v) => {
                if v.volatile {
                    out.push_str("volatile ");
                }
                write!(out, "{} {name}", type_name(v.ty)).unwrap();
                if let Some(e) = v.init.first() {
                    write!(out, " = {}", print_expr(e)).unwrap();
                }
                out.push_str(";\n");
            }
            GlobDef::Fun(f) => print_function(&mut out, *name, f),
        }
    }
    out
}

fn type_name(ty: CType) -> &'static str {
    match ty {
        CType::Int => "int",
        CType::Void => "void",
    }
}

fn print_function(out: &mut String, name: Ident, f: &Function) {
    let params = if f.params.is_empty() {
        "void".to_string()
    } else {
        f.params.iter().map(|(p, ty)| format!("{} {p}", type_name(*ty))).collect::<Vec<_>>().join(", ")
    };
    writeln!(out, "{} {name}({params}) {{", type_name(f.ret)).unwrap();
    for (l, ty) in &f.locals {
        writeln!(out, "{INDENT}{} {l};", type_name(*ty)).unwrap();
    }
    print_items(out, &f.body, 1);
    out.push_str("}\n");
}

pub fn print_statement(s: &Statement) -> String {
    let mut out = String::new();
    print_items(&mut out, s, 0);
    out
}

/// Prints `s` as a list of block items. A right-nested `Seq` spine is
/// flattened; a `Seq` in first position gets its own braces so that the
/// parser's right fold rebuilds the same tree.
fn print_items(out: &mut String, s: &Statement, depth: usize) {
    match s {
        Statement::Skip => {}
        Statement::Seq(first, rest) => {
            print_item(out, first, depth);
            if **rest == Statement::Skip {
                pad(out, depth);
                out.push_str(";\n");
            } else {
                print_items(out, rest, depth);
            }
        }
        other => print_item(out, other, depth),
    }
}

fn print_item(out: &mut String, s: &Statement, depth: usize) {
    pad(out, depth);
    match s {
        Statement::Skip => out.push_str(";\n"),
        Statement::Expr(e) => writeln!(out, "{};", print_expr(e)).unwrap(),
        Statement::Return(None) => out.push_str("return;\n"),
        Statement::Return(Some(e)) => writeln!(out, "return {};", print_expr(e)).unwrap(),
        Statement::Seq(..) => {
            out.push_str("{\n");
            print_items(out, s, depth + 1);
            pad(out, depth);
            out.push_str("}\n");
        }
        Statement::If(c, then, otherwise) => {
            writeln!(out, "if ({}) {{", print_expr(c)).unwrap();
            print_items(out, then, depth + 1);
            pad(out, depth);
            if **otherwise == Statement::Skip {
                out.push_str("}\n");
            } else {
                out.push_str("} else {\n");
                print_items(out, otherwise, depth + 1);
                pad(out, depth);
                out.push_str("}\n");
            }
        }
        Statement::While(c, body) => {
            writeln!(out, "while ({}) {{", print_expr(c)).unwrap();
            print_items(out, body, depth + 1);
            pad(out, depth);
            out.push_str("}\n");
        }
    }
}

fn pad(out: &mut String, depth: usize) {
    for _ in 0..depth {
        out.push_str(INDENT);
    }
}

const ASSIGN_PREC: u8 = 1;
const UNARY_PREC: u8 = 6;
const ATOM_PREC: u8 = 7;

fn precedence(e: &Expr) -> u8 {
    match e {
        Expr::Assign(..) => ASSIGN_PREC,
        Expr::Binop(op, ..) => op.precedence(),
        Expr::Unop(..) => UNARY_PREC,
        Expr::IntConst(n) if *n < 0 => UNARY_PREC,
        _ => ATOM_PREC,
    }
}

pub fn print_expr(e: &Expr) -> String {
    let mut out = String::new();
    write_expr(&mut out, e, 0);
    out
}

fn write_expr(out: &mut String, e: &Expr, min_prec: u8) {
    let parens = precedence(e) < min_prec;
    if parens {
        out.push('(');
    }
    match e {
        Expr::Var(v, _) => write!(out, "{v}").unwrap(),
        Expr::IntConst(n) => write!(out, "{n}").unwrap(),
        Expr::StrLit(s) => {
            out.push('"');
            for c in s.chars() {
                match c {
                    '"' => out.push_str("\\\""),
                    '\\' => out.push_str("\\\\"),
                    '\n' => out.push_str("\\n"),
                    '\t' => out.push_str("\\t"),
                    c => out.push(c),
                }
            }
            out.push('"');
        }
        Expr::Unop(op, inner) => {
            out.push_str(match op {
                UnOp::Neg => "-",
                UnOp::Not => "!",
            });
            // `- -x` must not collapse into `--x`.
            let nested_unary = precedence(inner) == UNARY_PREC;
            write_expr(out, inner, if nested_unary { ATOM_PREC } else { UNARY_PREC });
        }
        Expr::Binop(op, l, r) => {
            write_expr(out, l, op.precedence());
            write!(out, " {} ", op.symbol()).unwrap();
            write_expr(out, r, op.precedence() + 1);
        }
        Expr::Assign(t, _, value) => {
            write!(out, "{t} = ").unwrap();
            write_expr(out, value, ASSIGN_PREC);
        }
        Expr::Call(callee, args) => {
            write!(out, "{callee}(").unwrap();
            for (i, a) in args.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                write_expr(out, a, ASSIGN_PREC);
            }
            out.push(')');
        }
    }
    if parens {
        out.push(')');
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ast::{BinOp, GlobVar};
    use crate::syntax::parse_str;
    use std::sync::Arc;

    fn id(s: &str) -> Ident {
        Ident::new(s)
    }

    #[test]
    fn golden_second_listing() {
        let src = "int x ;\nint f(int y){\n  return y + 1 ;\n}\n";
        let p = parse_str(src).unwrap();
        assert_eq!(pretty_print(&p), "int x;\nint f(int y) {\n  return y + 1;\n}\n");
        assert_eq!(parse_str(&pretty_print(&p)).unwrap(), p);
    }

    #[test]
    fn skip_body_prints_an_empty_function() {
        let f = Function { ret: CType::Void, params: vec![], locals: vec![], body: Statement::Skip };
        let p = Program::new(vec![(id("g"), GlobDef::Fun(Arc::new(f)))]);
        assert_eq!(pretty_print(&p), "void g(void) {\n}\n");
        assert_eq!(parse_str(&pretty_print(&p)).unwrap(), p);
    }

    #[test]
    fn volatile_survives() {
        let p = Program::new(vec![(
            id("v"),
            GlobDef::Var(GlobVar { ty: CType::Int, init: vec![Expr::IntConst(3)], volatile: true }),
        )]);
        assert_eq!(pretty_print(&p), "volatile int v = 3;\n");
        assert_eq!(parse_str(&pretty_print(&p)).unwrap(), p);
    }

    #[test]
    fn left_nested_seq_round_trips() {
        let e = |n| Statement::Expr(Expr::IntConst(n));
        let body = Statement::seq(
            Statement::seq(e(1), e(2)),
            Statement::seq(Statement::Skip, Statement::if_(Expr::IntConst(1), Statement::seq(e(3), Statement::Skip), Statement::Skip)),
        );
        let f = Function { ret: CType::Int, params: vec![], locals: vec![(id("a"), CType::Int)], body };
        let p = Program::new(vec![(id("h"), GlobDef::Fun(Arc::new(f)))]);
        assert_eq!(parse_str(&pretty_print(&p)).unwrap(), p);
    }

    #[test]
    fn minimal_parentheses() {
        let c = Expr::IntConst;
        let e = Expr::binop(BinOp::Sub, c(1), Expr::binop(BinOp::Sub, c(2), c(3)));
        assert_eq!(print_expr(&e), "1 - (2 - 3)");
        let e = Expr::binop(BinOp::Mul, Expr::binop(BinOp::Add, c(1), c(2)), c(3));
        assert_eq!(print_expr(&e), "(1 + 2) * 3");
        let e = Expr::Unop(UnOp::Neg, Box::new(Expr::Unop(UnOp::Neg, Box::new(c(1)))));
        assert_eq!(print_expr(&e), "-(-1)");
        let e = Expr::binop(BinOp::Add, Expr::assign(id("a"), c(1)), c(2));
        assert_eq!(print_expr(&e), "(a = 1) + 2");
        assert_eq!(print_expr(&Expr::StrLit("a\"b\n".into())), "\"a\\\"b\\n\"");
    }
}
