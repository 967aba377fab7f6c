//! Small dense complex-matrix helpers shared by the Hilbert-space backend.
//!
//! Everything here operates on heap-allocated `nalgebra` matrices at the
//! dimensions this crate cares about (2–8). The Frobenius norm is used for
//! all matrix-distance checks.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

/// Square complex matrix, the working representation of operators.
pub type CMat = DMatrix<Complex64>;

pub fn zeros(dim: usize) -> CMat {
    CMat::zeros(dim, dim)
}

pub fn identity(dim: usize) -> CMat {
    CMat::identity(dim, dim)
}

/// Frobenius norm ‖A‖ = sqrt(Σ |a_ij|²).
pub fn fro_norm(a: &CMat) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Frobenius distance ‖A − B‖.
pub fn fro_dist(a: &CMat, b: &CMat) -> f64 {
    (a - b).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Real part of the trace. For Hermitian operators the trace is real up to
/// rounding, so this is the physically meaningful value.
pub fn trace_re(a: &CMat) -> f64 {
    a.trace().re
}

/// ‖A − A†‖, zero iff the matrix is self-adjoint.
pub fn hermiticity_defect(a: &CMat) -> f64 {
    fro_dist(a, &a.adjoint())
}

/// ‖A² − A‖, zero iff the matrix is idempotent.
pub fn idempotency_defect(a: &CMat) -> f64 {
    fro_dist(&(a * a), a)
}

/// Largest imaginary magnitude over all entries; zero iff the matrix is real.
pub fn max_imag(a: &CMat) -> f64 {
    a.iter().map(|z| z.im.abs()).fold(0.0, f64::max)
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub fn hermitian_eigenvalues(a: &CMat) -> Vec<f64> {
    let es = a.clone().symmetric_eigen();
    let mut vals: Vec<f64> = es.eigenvalues.iter().copied().collect();
    vals.sort_by(|x, y| x.partial_cmp(y).unwrap());
    vals
}

/// Eigenvector of a Hermitian matrix whose eigenvalue has the largest
/// magnitude, together with that eigenvalue. Ties break toward the positive
/// eigenvalue. Returns `None` for the zero matrix.
pub fn dominant_eigenpair(a: &CMat) -> Option<(f64, Vec<Complex64>)> {
    let es = a.clone().symmetric_eigen();
    let mut best: Option<usize> = None;
    for i in 0..es.eigenvalues.len() {
        let lam = es.eigenvalues[i];
        match best {
            None => best = Some(i),
            Some(j) => {
                let cur = es.eigenvalues[j];
                if lam.abs() > cur.abs() + 1e-15
                    || ((lam.abs() - cur.abs()).abs() <= 1e-15 && lam > cur)
                {
                    best = Some(i);
                }
            }
        }
    }
    let i = best?;
    if es.eigenvalues[i] == 0.0 {
        return None;
    }
    Some((es.eigenvalues[i], es.eigenvectors.column(i).iter().copied().collect()))
}

/// Rank-one matrix v·v† built from a unit-normalized copy of `v`.
pub fn outer_normalized(v: &[Complex64]) -> CMat {
    let n = v.len();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let mut m = zeros(n);
    for i in 0..n {
        for j in 0..n {
            m[(i, j)] = v[i] * v[j].conj() / (norm * norm);
        }
    }
    m
}

/// Matrix with independent standard complex Gaussian entries.
pub fn random_gaussian<R: Rng>(dim: usize, rng: &mut R) -> CMat {
    CMat::from_fn(dim, dim, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    })
}

/// Real-entried matrix with independent standard Gaussian entries.
pub fn random_gaussian_real<R: Rng>(dim: usize, rng: &mut R) -> CMat {
    CMat::from_fn(dim, dim, |_, _| Complex64::new(rng.sample(StandardNormal), 0.0))
}

/// Orthonormalizes the first `count` columns of `seed` by modified
/// Gram-Schmidt, retrying degenerate columns from `rng`. Returns a
/// `dim × count` column-orthonormal matrix.
pub fn orthonormal_columns<R: Rng>(dim: usize, count: usize, rng: &mut R, real: bool) -> CMat {
    assert!(count <= dim);
    let mut cols: Vec<Vec<Complex64>> = Vec::with_capacity(count);
    while cols.len() < count {
        let mut v: Vec<Complex64> = (0..dim)
            .map(|_| {
                if real {
                    Complex64::new(rng.sample(StandardNormal), 0.0)
                } else {
                    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
                }
            })
            .collect();
        for u in &cols {
            let dot: Complex64 = u.iter().zip(v.iter()).map(|(a, b)| a.conj() * b).sum();
            for i in 0..dim {
                v[i] -= dot * u[i];
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-6 {
            continue; // numerically degenerate draw, redo
        }
        for z in v.iter_mut() {
            *z /= norm;
        }
        cols.push(v);
    }
    CMat::from_fn(dim, count, |i, j| cols[j][i])
}
