//! Benchmarks for the hot paths: model construction from a case file,
//! closed-form and delta-based rankings, and the Monte Carlo VuIx loop.

use std::hint::black_box;
use std::path::Path;

use criterion::{criterion_group, criterion_main, Criterion};

use vuix_core::attack::{CostParams, ExistingAttackState};
use vuix_core::grid::{build_dc_jacobian, parse_case, GridCase};
use vuix_core::stochastic::{sigma2_from_snr, StateCovariance, SystemModel};
use vuix_core::vuix::{closed_form_ranking, monte_carlo_vuix, vuix_ranking};

fn load_case(name: &str) -> GridCase {
    let path = Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../cases")
        .join(name);
    parse_case(&std::fs::read_to_string(path).expect("case file")).expect("case parses")
}

fn model_of(case: &GridCase) -> SystemModel {
    let jac = build_dc_jacobian(case).unwrap();
    let cov = StateCovariance::toeplitz(jac.n(), 0.1).unwrap();
    let noise = sigma2_from_snr(jac.matrix(), &cov, 30.0).unwrap();
    SystemModel::from_jacobian(&jac, cov, noise).unwrap()
}

fn bench_model_build(c: &mut Criterion) {
    let mut group = c.benchmark_group("model_build");
    for name in ["case9.m", "case30.m"] {
        let case = load_case(name);
        group.bench_function(name, |b| b.iter(|| black_box(model_of(black_box(&case)))));
    }
    group.finish();
}

fn bench_rankings(c: &mut Criterion) {
    let mut group = c.benchmark_group("ranking");
    for name in ["case9.m", "case30.m"] {
        let model = model_of(&load_case(name));
        let params = CostParams::new(2.0, 1.0).unwrap();

        group.bench_function(format!("closed_form/{name}"), |b| {
            b.iter(|| black_box(closed_form_ranking(black_box(&model))))
        });

        // A two-sensor existing attack forces the posterior-update path.
        let attacked = [0usize, model.m() / 2];
        let state = ExistingAttackState::new(model.m(), &attacked, 1.0).unwrap();
        group.bench_function(format!("delta_k2/{name}"), |b| {
            b.iter(|| black_box(vuix_ranking(black_box(&model), &state, &params).unwrap()))
        });
    }
    group.finish();
}

fn bench_monte_carlo(c: &mut Criterion) {
    let model = model_of(&load_case("case9.m"));
    let params = CostParams::new(2.0, 1.0).unwrap();
    c.bench_function("monte_carlo/case9_k2_100trials", |b| {
        b.iter(|| black_box(monte_carlo_vuix(black_box(&model), 2, &params, 100, 0).unwrap()))
    });
}

criterion_group!(
    benches,
    bench_model_build,
    bench_rankings,
    bench_monte_carlo
);
criterion_main!(benches);
