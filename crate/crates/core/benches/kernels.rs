use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use otoc_sim::{build_ising_hamiltonian, trotter_step, ExecMode, Split, Statevector, TrotterOrder};

fn trotter_step_modes(c: &mut Criterion) {
    let mut group = c.benchmark_group("trotter_step");
    group.sample_size(10);
    for n in [10, 14, 18] {
        let h = build_ising_hamiltonian(n, -1.0, 1.0, 1.0).unwrap();
        let step = trotter_step(&h, 0.01, TrotterOrder::Second, Split::HzHx).unwrap();
        let psi = Statevector::zero(n).unwrap();
        for (name, mode) in [("sequential", ExecMode::Sequential), ("parallel", ExecMode::Parallel)] {
            group.bench_with_input(BenchmarkId::new(name, n), &n, |b, _| {
                let mut s = psi.clone();
                b.iter(|| s.apply_circuit_with(&step, mode).unwrap());
            });
        }
    }
    group.finish();
}

criterion_group!(benches, trotter_step_modes);
criterion_main!(benches);
