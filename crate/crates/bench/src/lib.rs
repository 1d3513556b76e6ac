//! Inputs shared by the benchmarks.

use grename_core::harness::{generate, GenProgram};
use grename_core::rename::rename_globvar_hard;

/// The first `n` generated programs whose rename succeeds.
pub fn renameable_programs(n: usize) -> Vec<GenProgram> {
    (0u64..)
        .map(generate)
        .filter(|g| rename_globvar_hard(g.x, g.y, &g.program).is_ok())
        .take(n)
        .collect()
}

/// A program with `n` functions, each shadowing `x` in a different way.
pub fn wide_program(n: usize) -> String {
    let mut src = String::from("int x = 1;\nint g;\n");
    for i in 0..n {
        let f = match i % 4 {
            0 => format!("int f{i}(int x, int y) {{ return x + y; }}\n"),
            1 => format!("int f{i}(int x) {{ return x * 2; }}\n"),
            2 => format!("int f{i}(int y) {{ return y - 1; }}\n"),
            _ => format!("int f{i}(int a) {{ g = x + a; return g; }}\n"),
        };
        src.push_str(&f);
    }
    src.push_str("int main(void) { return x; }\n");
    src
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inputs_are_usable() {
        assert_eq!(renameable_programs(3).len(), 3);
        let p = grename_core::parse_str(&wide_program(8)).unwrap();
        assert!(rename_globvar_hard(grename_core::Ident::new("x"), grename_core::Ident::new("z"), &p).is_ok());
    }
}
