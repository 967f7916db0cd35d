use num_complex::Complex64;
use proptest::prelude::*;

use otoc_sim::oracle::{circuit_matrix, gate_matrix, matvec, simulated_unitary, spectral_norm, CMatrix};
use otoc_sim::{Circuit, ExecMode, Gate, Polarity, Statevector};

fn simple_gate(width: usize) -> impl Strategy<Value = Gate> {
    let q = 1..=width;
    let angle = -6.3f64..6.3;
    prop_oneof![
        q.clone().prop_map(Gate::H),
        q.clone().prop_map(Gate::S),
        q.clone().prop_map(Gate::Sdag),
        q.clone().prop_map(Gate::X),
        (q.clone(), angle.clone()).prop_map(|(qubit, angle)| Gate::Rx { qubit, angle }),
        (q.clone(), angle).prop_map(|(qubit, angle)| Gate::Rz { qubit, angle }),
        (q.clone(), q).prop_filter_map("distinct", |(c, t)| (c != t).then_some(Gate::Cnot { control: c, target: t })),
    ]
}

/// Simple gates plus controlled blocks whose body avoids the control.
fn gate(width: usize) -> impl Strategy<Value = Gate> {
    let controlled = (1..=width, any::<bool>(), prop::collection::vec(simple_gate(width), 1..4)).prop_filter_map(
        "body touches control",
        move |(control, one, body)| {
            if body.iter().any(|g| g.support().contains(&control)) {
                return None;
            }
            let polarity = if one { Polarity::OnOne } else { Polarity::OnZero };
            Some(Gate::Controlled { control, polarity, body: Circuit::from_gates(width, body).unwrap() })
        },
    );
    prop_oneof![4 => simple_gate(width), 1 => controlled]
}

fn circuit() -> impl Strategy<Value = Circuit> {
    (2usize..=5).prop_flat_map(|w| prop::collection::vec(gate(w), 0..24).prop_map(move |g| Circuit::from_gates(w, g).unwrap()))
}

fn state(width: usize, seed: u64) -> Statevector {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let amps = (0..1 << width).map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
    Statevector::from_amplitudes(width, amps).unwrap()
}

proptest! {
    #[test]
    fn inverse_undoes_circuit(c in circuit()) {
        let mut u = simulated_unitary(&c).unwrap();
        u = simulated_unitary(&c.invert()).unwrap() * u;
        prop_assert!(spectral_norm(&(u - CMatrix::identity(1 << c.width(), 1 << c.width()))) < 1e-12);
    }

    #[test]
    fn engine_matches_kronecker_oracle(c in circuit(), seed in any::<u64>()) {
        let psi = state(c.width(), seed);
        let mut expected = psi.amplitudes().to_vec();
        for g in c.gates() {
            expected = matvec(&gate_matrix(g, c.width()), &expected);
        }
        let mut got = psi.clone();
        got.apply_circuit(&c).unwrap();
        let err: f64 = got.amplitudes().iter().zip(&expected).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        prop_assert!(err < 1e-12, "max amplitude error {err:e}");
        prop_assert!((got.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn simulated_unitary_matches_product(c in circuit()) {
        let diff = simulated_unitary(&c).unwrap() - circuit_matrix(&c);
        prop_assert!(spectral_norm(&diff) < 1e-12);
    }

    #[test]
    fn text_round_trip(c in circuit()) {
        let back = Circuit::parse_text(&c.to_text()).unwrap();
        prop_assert_eq!(back, c);
    }

    #[test]
    fn sequential_and_parallel_agree(c in circuit(), seed in any::<u64>()) {
        let psi = state(c.width(), seed);
        let (mut a, mut b) = (psi.clone(), psi);
        a.apply_circuit_with(&c, ExecMode::Sequential).unwrap();
        b.apply_circuit_with(&c, ExecMode::Parallel).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn depth_bounds(c in circuit()) {
        let r = c.depth_report();
        prop_assert_eq!(r.gate_count, c.len());
        prop_assert!(r.depth <= r.gate_count);
        prop_assert!(r.gate_count == 0 || r.depth >= 1);
        let twice = c.repeated_depth_report(2);
        prop_assert!(twice.depth <= 2 * r.depth && twice.depth >= r.depth);
    }
}

#[test]
fn composition_width_mismatch_is_rejected() {
    let a = Circuit::new(2);
    let b = Circuit::new(3);
    assert!(otoc_sim::compose(&a, &b).is_err());
    assert!(Circuit::from_gates(2, vec![Gate::H(3)]).is_err());
    assert!(Circuit::from_gates(2, vec![Gate::Cnot { control: 1, target: 1 }]).is_err());
}
