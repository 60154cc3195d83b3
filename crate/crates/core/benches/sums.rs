use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use semiclassical::dist_calc::TestFunction;
use semiclassical::functoriality::verify_restriction_with;
use semiclassical::models::Model;
use semiclassical::par::Exec;

const MODES: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn theta_pair(c: &mut Criterion) {
    let model = Model::complex_space(vec![vec![2, 0], vec![0, 2]], vec![0, 0]).unwrap();
    let phi = TestFunction::gaussian(2);
    let mut g = c.benchmark_group("theta_pair complex-space");
    for k in [16, 32] {
        for (name, exec) in MODES {
            g.bench_with_input(BenchmarkId::new(name, k), &k, |b, &k| {
                b.iter(|| model.theta_pair_with(k, &phi, exec).unwrap())
            });
        }
    }
    g.finish();
}

fn restriction(c: &mut Criterion) {
    let model = Model::su2_flag_square();
    let mut g = c.benchmark_group("restriction su2-flag-square");
    g.sample_size(10);
    for (name, exec) in MODES {
        g.bench_function(name, |b| b.iter(|| verify_restriction_with(&model, 30, 60, exec).unwrap()));
    }
    g.finish();
}

criterion_group!(benches, theta_pair, restriction);
criterion_main!(benches);
