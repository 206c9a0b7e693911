use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64 as C64;
use rand::Rng;
use rand_distr::StandardNormal;

/// Eigen-decomposition of a Hermitian matrix, eigenvalues ascending.
///
/// Eigenvectors are returned as columns, each phase-fixed so that its
/// largest-magnitude entry is real and positive.
pub fn hermitian_eigen(m: &DMatrix<C64>) -> (Vec<f64>, DMatrix<C64>) {
    let n = m.nrows();
    if n == 0 {
        return (Vec::new(), DMatrix::zeros(0, 0));
    }
    if n == 1 {
        return (vec![m[(0, 0)].re], DMatrix::identity(1, 1));
    }
    let eig = SymmetricEigen::new(m.clone());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = DMatrix::zeros(n, n);
    for (c, &i) in order.iter().enumerate() {
        let mut col = eig.eigenvectors.column(i).into_owned();
        let pivot = col
            .iter()
            .cloned()
            .max_by(|a, b| a.norm().total_cmp(&b.norm()))
            .unwrap_or(C64::new(1.0, 0.0));
        if pivot.norm() > 0.0 {
            col *= pivot.conj() / C64::new(pivot.norm(), 0.0);
        }
        vectors.set_column(c, &col);
    }
    (values, vectors)
}

/// Sum of absolute eigenvalues of a Hermitian matrix.
pub fn trace_norm_hermitian(m: &DMatrix<C64>) -> f64 {
    if m.nrows() == 0 {
        return 0.0;
    }
    let eig = SymmetricEigen::try_new(m.clone(), f64::EPSILON, 0)
        .expect("symmetric eigen-decomposition converges");
    eig.eigenvalues.iter().map(|v| v.abs()).sum()
}

/// Haar-random unitary via QR of a complex Ginibre matrix.
pub fn haar_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> DMatrix<C64> {
    let g = DMatrix::from_fn(dim, dim, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        C64::new(re, im)
    });
    let qr = g.qr();
    let (mut q, r) = qr.unpack();
    for j in 0..dim {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / C64::new(d.norm(), 0.0) } else { C64::new(1.0, 0.0) };
        let mut col = q.column_mut(j);
        col *= phase;
    }
    q
}

/// Kronecker product.
pub fn kron(a: &DMatrix<C64>, b: &DMatrix<C64>) -> DMatrix<C64> {
    a.kronecker(b)
}

pub mod gates {
    use nalgebra::DMatrix;
    use num_complex::Complex64 as C64;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    pub fn hadamard() -> DMatrix<C64> {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        DMatrix::from_row_slice(2, 2, &[c(s), c(s), c(s), c(-s)])
    }

    pub fn phase_s() -> DMatrix<C64> {
        DMatrix::from_row_slice(2, 2, &[c(1.0), c(0.0), c(0.0), C64::new(0.0, 1.0)])
    }

    pub fn pauli_x() -> DMatrix<C64> {
        DMatrix::from_row_slice(2, 2, &[c(0.0), c(1.0), c(1.0), c(0.0)])
    }

    /// Single-qubit gate `g` on qubit `q` of an `n`-qubit register (qubit 0 most significant).
    pub fn on_qubit(g: &DMatrix<C64>, q: usize, n: usize) -> DMatrix<C64> {
        let left = DMatrix::<C64>::identity(1 << q, 1 << q);
        let right = DMatrix::<C64>::identity(1 << (n - q - 1), 1 << (n - q - 1));
        left.kronecker(g).kronecker(&right)
    }

    /// CNOT with `control` and `target` qubits of an `n`-qubit register.
    pub fn cnot(control: usize, target: usize, n: usize) -> DMatrix<C64> {
        let d = 1 << n;
        let mut m = DMatrix::zeros(d, d);
        for x in 0..d {
            let cbit = (x >> (n - 1 - control)) & 1;
            let y = if cbit == 1 { x ^ (1 << (n - 1 - target)) } else { x };
            m[(y, x)] = c(1.0);
        }
        m
    }
}
