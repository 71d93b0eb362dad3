use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use std::hint::black_box;

use eonplan_bench::germany17_planner;
use eonplan_core::{
    generate_configs, k_shortest_paths, solve_additions, AdditionOption, PhyParams, Scheme, Span,
    Topology,
};

fn bench_k_shortest(c: &mut Criterion) {
    let topo = Topology::germany17();
    c.bench_function("yen_k3_germany17_all_pairs", |b| {
        b.iter(|| {
            let mut total = 0usize;
            for src in &topo.nodes {
                for dst in &topo.nodes {
                    if src.id == dst.id {
                        continue;
                    }
                    total += k_shortest_paths(&topo, src.id, dst.id, 3).unwrap().len();
                }
            }
            black_box(total)
        })
    });
}

fn bench_solver(c: &mut Criterion) {
    let phy = PhyParams::default();
    let catalog = generate_configs(&phy);
    let spans = vec![
        Span {
            length_km: 80.0,
            loss_db_per_km: 0.2,
            nf_db: 4.3,
        };
        4
    ];
    let options: Vec<AdditionOption> = catalog
        .iter()
        .enumerate()
        .map(|(ci, cfg)| AdditionOption {
            config_idx: ci,
            datarate_gbps: cfg.datarate_gbps,
            slot_count: cfg.slot_count,
            eta_nli: phy.eta_nli(&spans, cfg).unwrap(),
        })
        .collect();
    let budget: f64 = options.iter().map(|o| o.eta_nli).sum::<f64>() * 2.0;
    c.bench_function("solve_additions_theta_1250_full_catalog", |b| {
        b.iter(|| black_box(solve_additions(1250.0, &options, Some(budget), 100.0)))
    });
    c.bench_function("solve_additions_theta_1950_full_catalog", |b| {
        b.iter(|| black_box(solve_additions(1950.0, &options, None, 100.0)))
    });
}

fn bench_bootstrap_period(c: &mut Criterion) {
    let template = germany17_planner(Scheme::Upgrading, None);
    c.bench_function("plan_period_bootstrap_germany17", |b| {
        b.iter_batched(
            || template.clone(),
            |mut planner| black_box(planner.plan_period(2020).unwrap()),
            BatchSize::LargeInput,
        )
    });
}

fn bench_five_year_study(c: &mut Criterion) {
    let mut group = c.benchmark_group("study");
    group.sample_size(10);
    group.bench_function("germany17_scheme1_2020_to_2024", |b| {
        b.iter(|| {
            let planner = germany17_planner(Scheme::Upgrading, Some(2024));
            black_box(planner.run_study().unwrap())
        })
    });
    group.finish();
}

criterion_group!(
    benches,
    bench_k_shortest,
    bench_solver,
    bench_bootstrap_period,
    bench_five_year_study
);
criterion_main!(benches);
