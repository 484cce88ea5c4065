use criterion::{black_box, criterion_group, criterion_main, Criterion};
use virstag_core::staggered::{beta_invariants, data_from_beta, exists, BetaValue, StaggeredProblem};
use virstag_core::structure::classify;
use virstag_core::verma::{find_singular, kac_determinant_ratio, HwModule};
use virstag_core::Scalar;

// Verma modules and singular vectors are cached process-wide, so these
// figures are for warm caches.
fn singular_vectors(c: &mut Criterion) {
    let t = Scalar::ratio(3, 2);
    let h = Scalar::zero();
    c.bench_function("find_singular t=3/2 h=0 grade 7", |b| {
        b.iter(|| find_singular(black_box(&h), &t, 7).unwrap())
    });
    c.bench_function("classify t=3/2 h=0 up to grade 8", |b| b.iter(|| classify(black_box(&h), &t, 8).unwrap()));
    c.bench_function("kac ratio t=-2 grade 6", |b| {
        b.iter(|| kac_determinant_ratio(black_box(&Scalar::ratio(5, 7)), &Scalar::int(-2), 6).unwrap())
    });
}

fn staggered(c: &mut Criterion) {
    let t = Scalar::ratio(3, 2);
    let p = StaggeredProblem::from_weights(&t, &Scalar::zero(), &[], &Scalar::int(5), &[]).unwrap();
    let target = BetaValue::Pair(Scalar::int(1), Scalar::ratio(-2, 3));
    let d = data_from_beta(&p, &target).unwrap();
    c.bench_function("beta invariants case 2", |b| b.iter(|| beta_invariants(&p, black_box(&d)).unwrap()));
    let l = HwModule::new(&Scalar::zero(), &t, &[2]).unwrap();
    let r = HwModule::new(&Scalar::int(1), &t, &[4]).unwrap();
    c.bench_function("exists V0/V2 with V1/V5", |b| b.iter(|| exists(black_box(&l), &r).unwrap()));
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(10);
    targets = singular_vectors, staggered
}
criterion_main!(benches);
