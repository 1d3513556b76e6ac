use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

use grename_bench::{renameable_programs, wide_program};
use grename_core::rename::rename_globvar_hard;
use grename_core::semantics::{check_step_commut, run, ExtCallModel, Mode};
use grename_core::{parse_str, pretty_print, Ident};

fn rename(c: &mut Criterion) {
    let (x, z) = (Ident::new("x"), Ident::new("z"));
    let mut group = c.benchmark_group("rename");
    for n in [8, 64, 512] {
        let p = parse_str(&wide_program(n)).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(n), &p, |b, p| {
            b.iter(|| rename_globvar_hard(x, z, black_box(p)).unwrap())
        });
    }
    group.finish();
}

fn syntax(c: &mut Criterion) {
    let src = wide_program(256);
    let p = parse_str(&src).unwrap();
    c.bench_function("parse 256 functions", |b| b.iter(|| parse_str(black_box(&src)).unwrap()));
    c.bench_function("print 256 functions", |b| b.iter(|| pretty_print(black_box(&p))));
}

fn semantics(c: &mut Criterion) {
    let programs = renameable_programs(20);
    let model = ExtCallModel::standard();
    for mode in [Mode::Deterministic, Mode::Exhaustive] {
        c.bench_function(&format!("run 20 programs, {mode}"), |b| {
            b.iter(|| {
                for g in &programs {
                    black_box(run(&g.program, &model, mode, 10_000).unwrap());
                }
            })
        });
    }
    let renamed: Vec<_> = programs.iter().map(|g| rename_globvar_hard(g.x, g.y, &g.program).unwrap()).collect();
    c.bench_function("step commutation, 20 programs", |b| {
        b.iter(|| {
            for (g, r) in programs.iter().zip(&renamed) {
                black_box(check_step_commut(g.x, g.y, &g.program, r, &model, 2_000).unwrap());
            }
        })
    });
}

criterion_group!(benches, rename, syntax, semantics);
criterion_main!(benches);
