use arakelov_core::elliptic::Point;
use arakelov_core::hyper_faltings::{bomemo_tau, faltings_jacobian, ArchPlace};
use arakelov_core::local_heights::{autissier_integral, canonical_height_q, mu_arch_series};
use arakelov_core::theta::{jacobi_thetas, theta_char, ThetaCharacteristic};
use arakelov_core::{faltings_elliptic, FiniteModel, PrecisionContext, SiegelMatrix, WeierstrassEquation};
use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

fn theta(c: &mut Criterion) {
    let mut g = c.benchmark_group("theta");
    for bits in [128u32, 512] {
        let ctx = PrecisionContext::new(bits);
        let tau = SiegelMatrix::from_f64(1, &[(0.1, 1.1)], ctx.prec()).unwrap();
        let z = ctx.complex(0.2, 0.1);
        g.bench_with_input(BenchmarkId::new("jacobi_g1", bits), &bits, |b, _| {
            b.iter(|| jacobi_thetas(black_box(&z), &tau, &ctx).unwrap())
        });
        let tau2 = bomemo_tau(&ctx);
        let m = ThetaCharacteristic::half(&[1, 0], &[1, 1]);
        let z2 = vec![ctx.complex(0.1, 0.0), ctx.complex(0.0, 0.1)];
        g.bench_with_input(BenchmarkId::new("char_g2", bits), &bits, |b, _| {
            b.iter(|| theta_char(&m, black_box(&z2), &tau2, &ctx).unwrap())
        });
    }
    g.finish();
}

fn heights(c: &mut Criterion) {
    let ctx = PrecisionContext::new(128);
    let e = WeierstrassEquation::elliptic_ints([0, 0, 1, -1, 0]).unwrap();
    c.bench_function("faltings_elliptic_37a1", |b| b.iter(|| faltings_elliptic(black_box(&e), FiniteModel::Semistable, &ctx).unwrap()));
    let p = Point::xy(0, 0);
    c.bench_function("canonical_height_37a1", |b| b.iter(|| canonical_height_q(&e, black_box(&p), &ctx).unwrap()));
    let e2 = WeierstrassEquation::elliptic_ints([0, 0, 0, 0, -2]).unwrap();
    let p2 = Point::xy(3, 5);
    c.bench_function("canonical_height_additive", |b| b.iter(|| canonical_height_q(&e2, black_box(&p2), &ctx).unwrap()));
    let tau = bomemo_tau(&ctx);
    c.bench_function("faltings_jacobian_g2", |b| b.iter(|| faltings_jacobian(2, &[], &[ArchPlace::real(tau.clone())], &ctx).unwrap()));
    let t1 = SiegelMatrix::from_f64(1, &[(0.2, 1.3)], ctx.prec()).unwrap();
    let z = ctx.complex(0.3, 0.1);
    c.bench_function("mu_series_74_terms", |b| b.iter(|| mu_arch_series(black_box(&z), &t1, 74, &ctx).unwrap()));
}

fn autissier(c: &mut Criterion) {
    let ctx = PrecisionContext::new(128);
    let t = SiegelMatrix::from_f64(1, &[(0.0, 1.0)], ctx.prec()).unwrap();
    let mut g = c.benchmark_group("autissier");
    g.sample_size(10);
    for n in [128usize, 512] {
        g.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, &n| b.iter(|| autissier_integral(&t, n, &ctx).unwrap()));
    }
    g.finish();
}

criterion_group!(benches, theta, heights, autissier);
criterion_main!(benches);
