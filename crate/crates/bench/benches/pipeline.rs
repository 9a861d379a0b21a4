use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use hlnsim::models::GPROTEIN_HLN;
use hlnsim::random::random_program;
use hlnsim::{
    build_ode, enumerate_ctmc, gprotein_hln, gprotein_network, integrate, parse_program, simulate,
    simulate_pi, to_pi, to_reactions, OdeConfig, SsaConfig, State,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::hint::black_box;

fn front_end(c: &mut Criterion) {
    c.bench_function("parse gprotein", |b| {
        b.iter(|| parse_program(black_box(GPROTEIN_HLN)))
    });
    let p = parse_program(GPROTEIN_HLN).unwrap();
    c.bench_function("to_reactions gprotein", |b| {
        b.iter(|| to_reactions(black_box(&p)))
    });
    c.bench_function("to_pi gprotein", |b| b.iter(|| to_pi(black_box(&p))));

    let programs: Vec<_> = {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        (0..100).map(|_| random_program(&mut rng, 10, 6)).collect()
    };
    c.bench_function("commuting square x100", |b| {
        b.iter(|| {
            programs
                .iter()
                .all(|p| to_reactions(p).same_reactions(&to_pi(p).reachable_reactions()))
        })
    });
}

fn simulation(c: &mut Criterion) {
    let mut group = c.benchmark_group("ssa");
    group.sample_size(20);
    let m = gprotein_network();
    let hln = gprotein_hln();
    let sys = hln.process_system().unwrap();
    for t_end in [10.0, 60.0] {
        let cfg = SsaConfig {
            t_end,
            sample_count: 61,
            seed: 7,
            runs: 1,
        };
        group.bench_with_input(BenchmarkId::new("network", t_end), &cfg, |b, cfg| {
            b.iter(|| simulate(&hln.network, &hln.initial, cfg).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("process", t_end), &cfg, |b, cfg| {
            b.iter(|| simulate_pi(&sys, cfg).unwrap())
        });
    }
    group.finish();

    let mut group = c.benchmark_group("ode");
    group.sample_size(10);
    let ode = build_ode(&m.network);
    let x0: Vec<f64> = m.initial.iter().map(|&n| n as f64).collect();
    for t_end in [60.0, 600.0] {
        let cfg = OdeConfig {
            t_end,
            sample_count: 61,
            ..Default::default()
        };
        group.bench_with_input(BenchmarkId::new("gprotein", t_end), &cfg, |b, cfg| {
            b.iter(|| integrate(&ode, &x0, cfg).unwrap())
        });
    }
    group.finish();
}

fn enumeration(c: &mut Criterion) {
    let m = gprotein_hln();
    let s0 = State::new(m.initial.iter().map(|&n| n.min(2)).collect());
    c.bench_function("ctmc gprotein down-scaled", |b| {
        b.iter(|| enumerate_ctmc(&m.network, &s0, 100_000).unwrap())
    });
}

criterion_group!(benches, front_end, simulation, enumeration);
criterion_main!(benches);
