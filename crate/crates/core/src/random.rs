//! Seeded random specimens: Gaussian matrices, Haar unitaries, contractions.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::freepoly::MatrixTuple;
use crate::numerics::{operator_norm, ComplexMatrix};

pub type SeededRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Standard complex Gaussian (real and imaginary parts of variance 1/2).
pub fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn gaussian_matrix<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| complex_normal(rng))
}

/// Haar-distributed unitary: QR of a Gaussian matrix with the phases of
/// `diag(R)` folded back into `Q`.
pub fn haar_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMatrix {
    let g = gaussian_matrix(n, n, rng);
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 {
            d / d.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        let mut col = q.column_mut(j);
        col *= phase;
    }
    q
}

/// Random matrix with spectral norm exactly `norm`.
pub fn matrix_with_norm<R: Rng + ?Sized>(n: usize, norm: f64, rng: &mut R) -> ComplexMatrix {
    let g = gaussian_matrix(n, n, rng);
    let s = operator_norm(&g);
    if s == 0.0 {
        return g;
    }
    g.scale(norm / s)
}

/// Random tuple of `d` strict contractions at level `n`, each with norm drawn
/// uniformly from `[0, max_norm)`.
pub fn contractive_tuple<R: Rng + ?Sized>(
    d: usize,
    n: usize,
    max_norm: f64,
    rng: &mut R,
) -> MatrixTuple {
    let comps = (0..d)
        .map(|_| {
            let r = rng.random::<f64>() * max_norm;
            matrix_with_norm(n, r, rng)
        })
        .collect();
    MatrixTuple::new(comps).expect("components share size")
}

pub fn unitary_tuple<R: Rng + ?Sized>(d: usize, n: usize, rng: &mut R) -> MatrixTuple {
    MatrixTuple::new((0..d).map(|_| haar_unitary(n, rng)).collect()).expect("components share size")
}
