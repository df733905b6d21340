use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use std::hint::black_box;

use kleinbox_core::config::RunConfig;
use kleinbox_core::dirac::{build_eigenstate, default_grid_step, find_levels};
use kleinbox_core::fit::{lm_minimize, LmOptions};
use kleinbox_core::lattice::{build_hamiltonian, eigensolve, solve_chain};
use kleinbox_core::pipeline::recover_from_half_chains;
use kleinbox_core::presets::{published, ExperimentPreset, PresetId};
use kleinbox_core::spectroscopy::{ldos_map, FreqGrid};

fn bench_continuum(c: &mut Criterion) {
    let p = published::e1_params();
    c.bench_function("find_levels e1", |b| b.iter(|| find_levels(black_box(&p)).unwrap()));
    let top = *find_levels(&p).unwrap().energies_mhz.last().unwrap();
    c.bench_function("build_eigenstate", |b| {
        b.iter(|| build_eigenstate(black_box(top), &p, default_grid_step(&p)).unwrap())
    });
}

fn bench_lattice(c: &mut Criterion) {
    let spec = ExperimentPreset::get(PresetId::E1).chain();
    let h = build_hamiltonian(&spec).unwrap();
    c.bench_function("eigensolve 60x60", |b| {
        b.iter_batched(|| h.clone(), |h| eigensolve(black_box(&h)).unwrap(), BatchSize::SmallInput)
    });

    let big = kleinbox_core::lattice::Tridiagonal {
        diag: vec![0.0; 600],
        off: (0..599).map(|i| if i % 2 == 0 { 74.219 } else { 61.325 }).collect(),
    };
    c.bench_function("eigensolve 600x600", |b| {
        b.iter_batched(
            || big.clone(),
            |h| eigensolve(black_box(&h)).unwrap(),
            BatchSize::SmallInput,
        )
    });
}

fn bench_spectroscopy(c: &mut Criterion) {
    let spec = ExperimentPreset::get(PresetId::E1).chain();
    let eig = solve_chain(&spec).unwrap();
    let grid = FreqGrid::new(6700.0, 6800.0, 1200);
    let sites: Vec<usize> = (0..eig.n_sites()).collect();
    c.bench_function("ldos_map 60 sites", |b| {
        b.iter(|| ldos_map(black_box(&eig), &sites, &grid, 2.0))
    });
}

fn bench_fits(c: &mut Criterion) {
    let residual = |p: &[f64]| vec![10.0 * (p[1] - p[0] * p[0]), 1.0 - p[0]];
    c.bench_function("lm bent valley", |b| {
        b.iter(|| lm_minimize(residual, black_box(&[-1.2, 1.0]), &LmOptions::default()).unwrap())
    });

    let cfg = RunConfig::preset(PresetId::E1);
    c.bench_function("half-chain recovery, one seed", |b| {
        b.iter(|| recover_from_half_chains(black_box(&cfg), 5).unwrap())
    });
}

criterion_group!(benches, bench_continuum, bench_lattice, bench_spectroscopy, bench_fits);
criterion_main!(benches);
