use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use shtuka_core::galois::{openness_report_in, unit_group};
use shtuka_core::shtuka::rz_from_ints;
use shtuka_core::{
    rank_one_normalize, tate_generator_rank_one, BaseRingSpec, FieldSpec, Fq, LocalShtuka, Ring, TowerSpec,
    EXACT,
};

fn field_ops(c: &mut Criterion) {
    let f = FieldSpec::new(3, 6, None).unwrap();
    let els: Vec<Fq> = f.elements().step_by(7).take(64).collect();
    c.bench_function("field/mul_inv_F729", |b| {
        b.iter(|| {
            els.iter().fold(Fq::ONE, |acc, &x| match f.inv_fq(x) {
                Some(i) => f.mul_fq(f.mul_fq(acc, x), i),
                None => acc,
            })
        })
    });
}

fn series_inverse(c: &mut Criterion) {
    let mut group = c.benchmark_group("series/inverse");
    for prec in [32i64, 128] {
        let r = BaseRingSpec::new(FieldSpec::prime_field(5).unwrap(), prec, 4).unwrap().r_ring();
        let f = r.make(0, (0..prec).map(|i| Fq((i % 4 + 1) as u32)).collect(), EXACT);
        group.bench_with_input(BenchmarkId::from_parameter(prec), &f, |b, f| {
            b.iter(|| r.try_inv(black_box(f)).unwrap())
        });
    }
    group.finish();
}

fn tower(c: &mut Criterion) {
    let mut group = c.benchmark_group("tower");
    for (q, n) in [(3u64, 2u32), (3, 3), (5, 2)] {
        let base = BaseRingSpec::new(FieldSpec::prime_field(q).unwrap(), 16, n as i64 + 1).unwrap();
        group.bench_function(BenchmarkId::new("build", format!("q{q}_n{n}")), |b| {
            b.iter(|| TowerSpec::build(black_box(&base), n).unwrap())
        });
        let t = TowerSpec::build(&base, n).unwrap();
        let x = (0..=n).fold(t.one(), |acc, i| t.add(&acc, &t.gen(i)));
        group.bench_function(BenchmarkId::new("mul", format!("q{q}_n{n}")), |b| {
            b.iter(|| t.mul(black_box(&x), black_box(&x)))
        });
        group.bench_function(BenchmarkId::new("inv", format!("q{q}_n{n}")), |b| {
            b.iter(|| t.inv_checked(black_box(&x)).unwrap())
        });
        group.bench_function(BenchmarkId::new("frobenius_hom", format!("q{q}_n{n}")), |b| {
            b.iter(|| t.frobenius_hom(black_box(&x)))
        });
    }
    group.finish();
}

fn openness(c: &mut Criterion) {
    let mut group = c.benchmark_group("openness");
    for (q, n) in [(3u64, 3u32), (5, 3)] {
        let units = unit_group(&FieldSpec::prime_field(q).unwrap(), n).unwrap();
        group.bench_function(BenchmarkId::new("d_1_to_12", format!("q{q}_n{n}")), |b| {
            b.iter(|| (1..=12).map(|d| openness_report_in(&units, d).unwrap().index).sum::<u64>())
        });
    }
    group.finish();
}

fn shtukas(c: &mut Criterion) {
    let base = BaseRingSpec::new(FieldSpec::prime_field(3).unwrap(), 16, 24).unwrap();
    let two = LocalShtuka::rank_one(&base, rz_from_ints(&base, &[&[0, -2], &[2]])).unwrap();
    c.bench_function("shtuka/normalize_2(z-zeta)_s2", |b| {
        b.iter(|| rank_one_normalize(black_box(&two), 2, 4).unwrap())
    });
    let c3 = LocalShtuka::carlitz(&base, 3).unwrap();
    c.bench_function("shtuka/tate_generator_carlitz3_n3", |b| {
        b.iter(|| tate_generator_rank_one(black_box(&c3), 1, 3, 2).unwrap())
    });
    let m = LocalShtuka::carlitz(&base, 1).unwrap();
    let m2 = m.tensor(&LocalShtuka::carlitz(&base, 2).unwrap()).unwrap();
    c.bench_function("shtuka/hom_dual_tensor", |b| b.iter(|| black_box(&m).hom(black_box(&m2)).unwrap()));
}

criterion_group!(benches, field_ops, series_inverse, tower, openness, shtukas);
criterion_main!(benches);
