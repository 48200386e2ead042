use criterion::{black_box, criterion_group, criterion_main, Criterion};

use qtop_bench::{omega_space, powerset_metric, stacked_diamonds};
use qtop_core::borel::hk_decompose;
use qtop_core::domains::way_below_matrix;
use qtop_core::games::{play, player_one_by_name, player_two_chain, player_two_finite, ChainArena};
use qtop_core::quasimetric::qm_axioms_check;
use qtop_core::representations::{admissible_translate, fixture, RTable};
use qtop_core::{FiniteSpace, PointSet};

fn axioms(c: &mut Criterion) {
    let d = powerset_metric(4);
    c.bench_function("qm_axioms P(4)", |b| b.iter(|| qm_axioms_check(black_box(&d))));
}

fn hk(c: &mut Criterion) {
    let s = FiniteSpace::powerset(3);
    let target = PointSet::from_points([0, 3, 5, 6]);
    c.bench_function("hk_decompose P(3)", |b| b.iter(|| hk_decompose(black_box(&s), target, 8)));
}

fn games(c: &mut Criterion) {
    let arena = ChainArena::omega_plus_one_scott(50);
    let p2 = player_two_chain("qm-d1").unwrap();
    c.bench_function("play chain qm-d1 50", |b| {
        b.iter(|| {
            let mut p1 = player_one_by_name::<ChainArena>("chain", 0).unwrap();
            play(&arena, p1.as_mut(), p2.as_ref(), 50)
        })
    });
    let space = omega_space(12);
    let p2 = player_two_finite("qm", &space).unwrap();
    c.bench_function("play finite qm 24", |b| {
        b.iter(|| {
            let mut p1 = player_one_by_name::<FiniteSpace>("random", 3).unwrap();
            play(&space, p1.as_mut(), p2.as_ref(), 24)
        })
    });
}

fn translate(c: &mut Criterion) {
    let f = fixture("delta", 4, 5).unwrap();
    let r = RTable::cantor(4096);
    c.bench_function("admissible_translate delta 4^5", |b| b.iter(|| admissible_translate(black_box(&f), &r)));
}

fn way_below(c: &mut Criterion) {
    let p = stacked_diamonds(3);
    c.bench_function("way_below 10 elements", |b| b.iter(|| way_below_matrix(black_box(&p))));
}

criterion_group!(benches, axioms, hk, games, translate, way_below);
criterion_main!(benches);
