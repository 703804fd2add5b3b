use borel_core::resum::{select_alpha_max, AsymptoticSeries, ResumConfig};
use borel_core::spectrum::{energy_series, COUPLING_SCALE};
use borel_core::BigReal;
use criterion::{criterion_group, criterion_main, Criterion};

fn alpha_scan(c: &mut Criterion) {
    let cfg = ResumConfig { alpha_tol: 1e-2, ..ResumConfig::default() };
    let prec = cfg.precision_bits;
    let scale = BigReal::from_int(COUPLING_SCALE, prec);
    let series = AsymptoticSeries::from_scalar(&energy_series(cfg.n).unwrap(), prec, "E(g)").scaled(&scale);
    let s0 = &scale / &BigReal::from_f64(1.0, prec);

    let mut group = c.benchmark_group("alpha_scan");
    group.sample_size(10);

    #[cfg(feature = "parallel")]
    {
        let single = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        group.bench_function("pool_single", |b| b.iter(|| single.install(|| select_alpha_max(&series, &s0, &cfg).unwrap())));

        let multi = rayon::ThreadPoolBuilder::new().build().unwrap();
        let name = format!("pool_multi_{}", multi.current_num_threads());
        group.bench_function(name, |b| b.iter(|| multi.install(|| select_alpha_max(&series, &s0, &cfg).unwrap())));
    }
    #[cfg(not(feature = "parallel"))]
    group.bench_function("sequential", |b| b.iter(|| select_alpha_max(&series, &s0, &cfg).unwrap()));

    group.finish();
}

criterion_group!(benches, alpha_scan);
criterion_main!(benches);
