use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use num_complex::Complex64;
use recurlerch::poles_residues::attach_residues_s;
use recurlerch::{Cplx, EvalParams, Execution, LerchZeta, PoleCaps, ResidueOptions, SWindow};

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn grid(n: usize) -> Vec<EvalParams> {
    (0..n)
        .map(|i| {
            let t = i as f64 / n as f64;
            let s = Complex64::new(-3.0 + 4.0 * t, 1.0 + 10.0 * t);
            EvalParams::new(128, Complex64::new(0.9, 0.2), s, 0.0)
        })
        .collect()
}

fn bench_eval_grid(c: &mut Criterion) {
    let f = LerchZeta::builtin("tribonacci", 128).unwrap();
    let points = grid(64);
    let mut g = c.benchmark_group("eval_grid_64");
    g.sample_size(10);
    for (name, exec) in MODES {
        g.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| f.eval_batch(&points, None, exec))
        });
    }
    g.finish();
}

fn bench_shells(c: &mut Criterion) {
    // deep in the continuation region the shells get wide
    let f = LerchZeta::builtin("tetranacci", 128).unwrap();
    let mut g = c.benchmark_group("tetranacci_deep_continuation");
    g.sample_size(10);
    for (name, exec) in MODES {
        let p = EvalParams::new(128, Complex64::new(1.0, 0.0), Complex64::new(-12.3, 4.1), 0.0).with_exec(exec);
        g.bench_function(name, |b| b.iter(|| f.eval(&p, None).unwrap()));
    }
    g.finish();
}

fn bench_residues(c: &mut Criterion) {
    let f = LerchZeta::builtin("fibonacci", 128).unwrap();
    let one = Cplx::one(128);
    let w = SWindow::new(-9.0, 1.0, -30.0, 30.0).unwrap();
    let recs = f.poles_s(&one, &w, PoleCaps::x0()).unwrap();
    let mut g = c.benchmark_group("fibonacci_residue_table");
    g.sample_size(10);
    for (name, exec) in MODES {
        let opts = ResidueOptions { exec, ..Default::default() };
        g.bench_function(name, |b| {
            b.iter(|| {
                let mut r = recs.clone();
                attach_residues_s(&f.norm, &f.binet, &one, &mut r, 0.0, &opts).unwrap();
                r
            })
        });
    }
    g.finish();
}

criterion_group!(benches, bench_eval_grid, bench_shells, bench_residues);
criterion_main!(benches);
