use num_complex::Complex64;
use proptest::prelude::*;

use otoc_sim::oracle::{dense_hamiltonian, dense_string, matvec};
use otoc_sim::pauli::strings_commute;
use otoc_sim::{build_ising_hamiltonian, expect_pauli, PauliLetter, PauliString, Statevector};

fn word(n: usize) -> impl Strategy<Value = PauliString> {
    prop::collection::vec(0usize..4, n).prop_map(|ks| PauliString::new(ks.into_iter().map(|k| PauliLetter::ALL[k]).collect(), 1.0).unwrap())
}

fn pair() -> impl Strategy<Value = (PauliString, PauliString)> {
    (1usize..=5).prop_flat_map(|n| (word(n), word(n)))
}

fn state(n: usize) -> impl Strategy<Value = Statevector> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1 << n)
        .prop_filter_map("zero vector", move |v| Statevector::from_amplitudes(n, v.into_iter().map(|(a, b)| Complex64::new(a, b)).collect()).ok())
}

proptest! {
    #[test]
    fn commutation_matches_dense((a, b) in pair()) {
        let (da, db) = (dense_string(&a).unwrap(), dense_string(&b).unwrap());
        let commutator = &da * &db - &db * &da;
        prop_assert_eq!(strings_commute(&a, &b).unwrap(), commutator.norm() < 1e-12);
    }

    #[test]
    fn strings_square_to_identity(s in (1usize..=5).prop_flat_map(word)) {
        let d = dense_string(&s).unwrap();
        let dim = d.nrows();
        prop_assert!((&d * &d - otoc_sim::oracle::CMatrix::identity(dim, dim)).norm() < 1e-12);
        prop_assert!((d.adjoint() - &d).norm() == 0.0);
    }

    #[test]
    fn expectation_matches_dense((s, psi) in (1usize..=5).prop_flat_map(|n| (word(n), state(n)))) {
        let d = dense_string(&s).unwrap();
        let image = matvec(&d, psi.amplitudes());
        let dense: Complex64 = psi.amplitudes().iter().zip(&image).map(|(a, b)| a.conj() * b).sum();
        let got = expect_pauli(&psi, &s).unwrap().value;
        prop_assert!((got - dense.re).abs() < 1e-12);
        prop_assert!(got.abs() <= 1.0 + 1e-12);
    }

    #[test]
    fn apply_pauli_matches_dense((s, psi) in (1usize..=5).prop_flat_map(|n| (word(n), state(n)))) {
        let expected = matvec(&dense_string(&s).unwrap(), psi.amplitudes());
        let got = psi.apply_pauli(&s).unwrap();
        let err = got.amplitudes().iter().zip(&expected).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        prop_assert!(err < 1e-14);
    }
}

#[test]
fn ising_terms_and_dense_form() {
    let h = build_ising_hamiltonian(2, -1.0, 1.0, 0.0).unwrap();
    let d = dense_hamiltonian(&h).unwrap();
    let diag: Vec<f64> = (0..4).map(|k| d[(k, k)].re).collect();
    assert_eq!(diag, vec![1.0, 1.0, 1.0, -3.0]);
    assert!(h.terms_commute());
    let chaotic = build_ising_hamiltonian(9, -1.0, 1.0, 1.0).unwrap();
    assert_eq!(chaotic.terms().len(), 8 + 9 + 9);
    assert!(!chaotic.terms_commute());
}
