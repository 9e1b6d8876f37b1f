use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

use tamkit::compilers::{compile_square_pattern, compile_stripes};
use tamkit::diag::{compile_pn_lift, compute_bits, Universe};
use tamkit::patterns::{two_color_palette, Pattern};
use tamkit::sim::{Policy, SimState, TasRules};

fn grow(c: &mut Criterion) {
    let mut group = c.benchmark_group("grow");
    for n in [16u32, 32, 64] {
        let cs = compile_stripes(n, 3, 5).unwrap();
        let rules = TasRules::new(&cs.system);
        group.bench_with_input(BenchmarkId::new("stripes", n), &n, |b, _| {
            b.iter(|| {
                let mut st = SimState::new(&rules);
                black_box(st.run(1 << 20, Policy::PaperOrder).unwrap())
            })
        });
    }
    let p = Pattern::from_fn(32, 32, two_color_palette(), |x, y| ((x * 5 + y * 3) % 7 < 3) as u16);
    let cs = compile_square_pattern(&p).unwrap();
    let rules = TasRules::new(&cs.system);
    group.bench_function("square-32-random", |b| {
        b.iter(|| {
            let mut st = SimState::new(&rules);
            black_box(st.run(1 << 20, Policy::UniformRandom(1)).unwrap())
        })
    });
    let cs = compile_pn_lift(&[1, 1, 0, 1, 0, 1, 0, 1], 32).unwrap();
    let rules = TasRules::new(&cs.system);
    group.bench_function("lift-8-32", |b| {
        b.iter(|| {
            let mut st = SimState::new(&rules);
            black_box(st.run(1 << 20, Policy::PaperOrder).unwrap())
        })
    });
    group.finish();
}

fn diag(c: &mut Criterion) {
    let u: Universe = "tiles=1,colors=2,coops=2,coopbase=166,steps=400,pattsize=16".parse().unwrap();
    c.bench_function("compute_bits-micro", |b| b.iter(|| black_box(compute_bits(&u).unwrap())));
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(20);
    targets = grow, diag
}
criterion_main!(benches);
