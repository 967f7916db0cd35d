//! Dense-matrix ground truth.
//!
//! Everything here is built from Kronecker products and a Hermitian
//! eigendecomposition, never from the stride kernels, so it can check them.

use std::sync::OnceLock;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::circuit::{Circuit, Gate};
use crate::error::{Error, Result};
use crate::pauli::{PauliLetter, PauliString, PauliSumHamiltonian};
use crate::statevector::Statevector;

pub type CMatrix = DMatrix<Complex64>;

/// Largest register the dense oracle accepts unless configured otherwise.
pub const DEFAULT_ORACLE_LIMIT: usize = 12;

fn check_limit(n: usize, limit: usize) -> Result<()> {
    if n > limit {
        return Err(Error::OracleSize { n, limit });
    }
    Ok(())
}

fn two_by_two(m: [[Complex64; 2]; 2]) -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[m[0][0], m[0][1], m[1][0], m[1][1]])
}

fn kron_all(factors: impl IntoIterator<Item = CMatrix>) -> CMatrix {
    factors
        .into_iter()
        .fold(CMatrix::identity(1, 1), |acc, f| acc.kronecker(&f))
}

/// Kronecker product of the letters (site 1 leftmost) times the coefficient.
pub fn dense_string(s: &PauliString) -> Result<CMatrix> {
    dense_string_with_limit(s, DEFAULT_ORACLE_LIMIT)
}

pub fn dense_string_with_limit(s: &PauliString, limit: usize) -> Result<CMatrix> {
    check_limit(s.len(), limit)?;
    let m = kron_all(s.letters().iter().map(|l| two_by_two(l.matrix())));
    Ok(m * Complex64::new(s.coeff(), 0.0))
}

pub fn dense_hamiltonian(h: &PauliSumHamiltonian) -> Result<CMatrix> {
    dense_hamiltonian_with_limit(h, DEFAULT_ORACLE_LIMIT)
}

pub fn dense_hamiltonian_with_limit(h: &PauliSumHamiltonian, limit: usize) -> Result<CMatrix> {
    check_limit(h.n(), limit)?;
    let dim = 1 << h.n();
    let mut acc = CMatrix::zeros(dim, dim);
    for t in h.terms() {
        acc += dense_string_with_limit(t, limit)?;
    }
    Ok(acc)
}

fn single_site(width: usize, qubit: usize, m: CMatrix) -> CMatrix {
    kron_all((1..=width).map(|q| if q == qubit { m.clone() } else { CMatrix::identity(2, 2) }))
}

fn projector(width: usize, qubit: usize, bit: bool) -> CMatrix {
    let z = Complex64::new(0.0, 0.0);
    let o = Complex64::new(1.0, 0.0);
    let p = if bit { [[z, z], [z, o]] } else { [[o, z], [z, z]] };
    single_site(width, qubit, two_by_two(p))
}

/// Single-qubit matrix of a non-controlled gate, row-major.
pub fn gate_matrix_2x2(g: &Gate) -> Option<[[Complex64; 2]; 2]> {
    let z = Complex64::new(0.0, 0.0);
    let o = Complex64::new(1.0, 0.0);
    let i = Complex64::new(0.0, 1.0);
    let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    Some(match g {
        Gate::H(_) => [[h, h], [h, -h]],
        Gate::S(_) => [[o, z], [z, i]],
        Gate::Sdag(_) => [[o, z], [z, -i]],
        Gate::X(_) => PauliLetter::X.matrix(),
        Gate::Rx { angle, .. } => {
            let (s, c) = (angle / 2.0).sin_cos();
            [[Complex64::new(c, 0.0), Complex64::new(0.0, -s)], [Complex64::new(0.0, -s), Complex64::new(c, 0.0)]]
        }
        Gate::Rz { angle, .. } => [
            [Complex64::from_polar(1.0, -angle / 2.0), z],
            [z, Complex64::from_polar(1.0, angle / 2.0)],
        ],
        Gate::Cnot { .. } | Gate::Controlled { .. } => return None,
    })
}

/// Full-register matrix of one gate.
pub fn gate_matrix(g: &Gate, width: usize) -> CMatrix {
    match g {
        Gate::Cnot { control, target } => {
            let x = single_site(width, *target, two_by_two(PauliLetter::X.matrix()));
            projector(width, *control, false) + projector(width, *control, true) * x
        }
        Gate::Controlled { control, polarity, body } => {
            let on = polarity.bit();
            projector(width, *control, !on) + projector(width, *control, on) * circuit_matrix(body)
        }
        Gate::H(q) | Gate::S(q) | Gate::Sdag(q) | Gate::X(q) => {
            single_site(width, *q, two_by_two(gate_matrix_2x2(g).unwrap()))
        }
        Gate::Rx { qubit, .. } | Gate::Rz { qubit, .. } => {
            single_site(width, *qubit, two_by_two(gate_matrix_2x2(g).unwrap()))
        }
    }
}

/// Product of gate matrices, later gates on the left.
pub fn circuit_matrix(c: &Circuit) -> CMatrix {
    let dim = 1 << c.width();
    c.gates()
        .iter()
        .fold(CMatrix::identity(dim, dim), |acc, g| gate_matrix(g, c.width()) * acc)
}

/// Unitary obtained by running the circuit on every basis state through the
/// statevector engine (column k is the image of |k>).
pub fn simulated_unitary(c: &Circuit) -> Result<CMatrix> {
    let dim = 1 << c.width();
    let mut u = CMatrix::zeros(dim, dim);
    for k in 0..dim {
        let mut s = Statevector::basis(c.width(), k)?;
        s.apply_circuit(c)?;
        u.set_column(k, &DVector::from_column_slice(s.amplitudes()));
    }
    Ok(u)
}

/// Largest singular value.
pub fn spectral_norm(m: &CMatrix) -> f64 {
    m.clone().svd(false, false).singular_values.max()
}

/// `a * b` through the blocked complex GEMM of `matrixmultiply`.
pub fn matmul(a: &CMatrix, b: &CMatrix) -> CMatrix {
    assert_eq!(a.ncols(), b.nrows(), "matmul shape mismatch");
    let (m, k, n) = (a.nrows(), a.ncols(), b.ncols());
    let mut c = CMatrix::zeros(m, n);
    // Column-major storage: row stride 1, column stride = nrows.
    // SAFETY: Complex64 is repr(C) {re, im}, layout-identical to [f64; 2];
    // all three buffers are live, sized m*k, k*n, m*n and `c` is not aliased.
    unsafe {
        matrixmultiply::zgemm(
            matrixmultiply::CGemmOption::Standard,
            matrixmultiply::CGemmOption::Standard,
            m,
            k,
            n,
            [1.0, 0.0],
            a.as_ptr() as *const [f64; 2],
            1,
            m as isize,
            b.as_ptr() as *const [f64; 2],
            1,
            k as isize,
            [0.0, 0.0],
            c.as_mut_ptr() as *mut [f64; 2],
            1,
            m as isize,
        );
    }
    c
}

pub fn matvec(a: &CMatrix, v: &[Complex64]) -> Vec<Complex64> {
    let out = a * DVector::from_column_slice(v);
    out.as_slice().to_vec()
}

pub fn adjoint_matvec(a: &CMatrix, v: &[Complex64]) -> Vec<Complex64> {
    let out = a.ad_mul(&DVector::from_column_slice(v));
    out.as_slice().to_vec()
}

/// Eigenpairs of a Hermitian matrix, eigenvalues ascending.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

impl HermitianEigen {
    pub fn new(m: &CMatrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::Eigensolver("matrix is not square".into()));
        }
        let eig = nalgebra::SymmetricEigen::try_new(m.clone(), f64::EPSILON, 0)
            .ok_or_else(|| Error::Eigensolver("Hermitian eigensolver did not converge".into()))?;
        let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]).then(a.cmp(&b)));
        let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
        let vectors = CMatrix::from_columns(&order.iter().map(|&k| eig.eigenvectors.column(k)).collect::<Vec<_>>());
        Ok(Self { values, vectors })
    }

    /// `V diag(f(lambda)) V^dagger`.
    pub fn function(&self, f: impl Fn(f64) -> Complex64) -> CMatrix {
        let mut scaled = self.vectors.clone();
        for (k, mut col) in scaled.column_iter_mut().enumerate() {
            col *= f(self.values[k]);
        }
        matmul(&scaled, &self.vectors.adjoint())
    }

    /// `exp(-i t M)`.
    pub fn propagator(&self, t: f64) -> CMatrix {
        self.function(|l| Complex64::from_polar(1.0, -l * t))
    }

    /// Lowest eigenpair. Ties go to the lowest sorted index, which is
    /// reported through `degenerate`.
    pub fn ground_state(&self) -> GroundState {
        let energy = self.values[0];
        let scale = self.values.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        let degenerate = self.values.len() > 1 && (self.values[1] - energy).abs() <= 1e-10 * scale;
        GroundState { energy, vector: self.vectors.column(0).iter().copied().collect(), degenerate }
    }
}

#[derive(Clone, Debug)]
pub struct GroundState {
    pub energy: f64,
    pub vector: Vec<Complex64>,
    pub degenerate: bool,
}

/// `exp(-i t M)` for Hermitian `M` via eigendecomposition.
pub fn expm_hermitian(m: &CMatrix, t: f64) -> Result<CMatrix> {
    Ok(HermitianEigen::new(m)?.propagator(t))
}

/// Exact `e^{-iHt}` evolution with the eigendecomposition of `dense(H)`
/// computed once on first use.
#[derive(Debug)]
pub struct ExactEvolver {
    hamiltonian: PauliSumHamiltonian,
    limit: usize,
    eigen: OnceLock<std::result::Result<HermitianEigen, String>>,
}

impl ExactEvolver {
    pub fn new(hamiltonian: PauliSumHamiltonian) -> Result<Self> {
        Self::with_limit(hamiltonian, DEFAULT_ORACLE_LIMIT)
    }

    pub fn with_limit(hamiltonian: PauliSumHamiltonian, limit: usize) -> Result<Self> {
        check_limit(hamiltonian.n(), limit)?;
        Ok(Self { hamiltonian, limit, eigen: OnceLock::new() })
    }

    pub fn hamiltonian(&self) -> &PauliSumHamiltonian {
        &self.hamiltonian
    }

    /// The cached eigendecomposition. The first caller computes it; others
    /// block until it is available.
    pub fn eigen(&self) -> Result<&HermitianEigen> {
        self.eigen
            .get_or_init(|| {
                dense_hamiltonian_with_limit(&self.hamiltonian, self.limit)
                    .and_then(|m| HermitianEigen::new(&m))
                    .map_err(|e| e.to_string())
            })
            .as_ref()
            .map_err(|msg| Error::Eigensolver(msg.clone()))
    }

    /// `V e^{-i Lambda t} V^dagger s`.
    pub fn evolve(&self, s: &Statevector, t: f64) -> Result<Statevector> {
        if s.width() != self.hamiltonian.n() {
            return Err(Error::InvalidApplication { circuit: self.hamiltonian.n(), state: s.width() });
        }
        if t == 0.0 {
            return Ok(s.clone());
        }
        let e = self.eigen()?;
        let mut coords = adjoint_matvec(&e.vectors, s.amplitudes());
        for (c, &l) in coords.iter_mut().zip(&e.values) {
            *c *= Complex64::from_polar(1.0, -l * t);
        }
        Ok(Statevector::from_raw(s.width(), matvec(&e.vectors, &coords)))
    }

    pub fn propagator(&self, t: f64) -> Result<CMatrix> {
        Ok(self.eigen()?.propagator(t))
    }
}

/// One-off exact evolution.
pub fn exact_evolution(h: &PauliSumHamiltonian, t: f64, s: &Statevector) -> Result<Statevector> {
    ExactEvolver::new(h.clone())?.evolve(s, t)
}
