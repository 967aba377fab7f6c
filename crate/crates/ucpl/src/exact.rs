//! Exact rational linear algebra for the state polytope: affine solution
//! spaces of equality systems and vertex enumeration over box constraints.
//! Uniqueness verdicts are structurally brittle under rounding, so
//! everything here runs on arbitrary-precision rationals.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, One, Signed, ToPrimitive, Zero};
use std::collections::BTreeSet;

pub type Q = BigRational;

pub fn q_int(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn q_ratio(num: i64, den: i64) -> Q {
    Q::new(BigInt::from(num), BigInt::from(den))
}

/// Exact conversion; every finite f64 is a rational.
pub fn q_from_f64(x: f64) -> Option<Q> {
    Q::from_f64(x)
}

pub fn q_to_f64(x: &Q) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum EnumError {
    #[error("vertex cap exceeded: more than {cap} vertices")]
    CapExceeded { cap: usize },
    #[error("basis-enumeration budget exceeded ({candidates} candidate active sets)")]
    BudgetExceeded { candidates: usize },
}

/// The solution set {x = origin + Σ tⱼ·basisⱼ} of a consistent linear
/// equality system. `basis` vectors are linearly independent; the affine
/// dimension is `basis.len()`.
#[derive(Clone, Debug)]
pub struct AffineSpace {
    pub n: usize,
    pub origin: Vec<Q>,
    pub basis: Vec<Vec<Q>>,
}

impl AffineSpace {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// The full ambient space (no constraints).
    pub fn whole(n: usize) -> AffineSpace {
        let origin = vec![Q::zero(); n];
        let basis = (0..n)
            .map(|i| {
                let mut v = vec![Q::zero(); n];
                v[i] = Q::one();
                v
            })
            .collect();
        AffineSpace { n, origin, basis }
    }

    /// Evaluates the point for parameter vector `t`.
    pub fn point(&self, t: &[Q]) -> Vec<Q> {
        let mut x = self.origin.clone();
        for (tj, bj) in t.iter().zip(self.basis.iter()) {
            if tj.is_zero() {
                continue;
            }
            for i in 0..self.n {
                if !bj[i].is_zero() {
                    x[i] += tj * &bj[i];
                }
            }
        }
        x
    }

    /// Intersects with further equality rows a·x = b (ambient coordinates).
    /// Returns `None` when the combined system is inconsistent.
    pub fn restrict(&self, rows: &[(Vec<Q>, Q)]) -> Option<AffineSpace> {
        let d = self.dim();
        // rewrite each row in parameter space: (a·B)·t = b − a·origin
        let mut trows: Vec<(Vec<Q>, Q)> = Vec::with_capacity(rows.len());
        for (a, b) in rows {
            let mut coeffs = vec![Q::zero(); d];
            for (j, bj) in self.basis.iter().enumerate() {
                let mut s = Q::zero();
                for i in 0..self.n {
                    if !a[i].is_zero() && !bj[i].is_zero() {
                        s += &a[i] * &bj[i];
                    }
                }
                coeffs[j] = s;
            }
            let mut rhs = b.clone();
            for (ai, oi) in a.iter().zip(self.origin.iter()) {
                if !ai.is_zero() && !oi.is_zero() {
                    rhs -= ai * oi;
                }
            }
            trows.push((coeffs, rhs));
        }
        let inner = solve_affine(d, &trows)?;
        // compose: x = origin + B·(t0 + T·s)
        let origin = self.point(&inner.origin);
        let basis = inner
            .basis
            .iter()
            .map(|tvec| {
                let mut v = vec![Q::zero(); self.n];
                for (j, bj) in self.basis.iter().enumerate() {
                    if tvec[j].is_zero() {
                        continue;
                    }
                    for i in 0..self.n {
                        if !bj[i].is_zero() {
                            v[i] += &tvec[j] * &bj[i];
                        }
                    }
                }
                v
            })
            .collect();
        Some(AffineSpace { n: self.n, origin, basis })
    }
}

/// Gauss-Jordan solution of rows·x = rhs over n variables.
/// Returns `None` when inconsistent.
pub fn solve_affine(n: usize, rows: &[(Vec<Q>, Q)]) -> Option<AffineSpace> {
    let mut aug: Vec<Vec<Q>> = rows
        .iter()
        .map(|(a, b)| {
            debug_assert_eq!(a.len(), n);
            let mut r = a.clone();
            r.push(b.clone());
            r
        })
        .collect();
    let m = aug.len();
    let mut pivot_cols: Vec<usize> = Vec::new();
    let mut rank = 0usize;

    for col in 0..n {
        let pivot = (rank..m).find(|&r| !aug[r][col].is_zero());
        let Some(prow) = pivot else { continue };
        aug.swap(rank, prow);
        let p = aug[rank][col].clone();
        for v in aug[rank].iter_mut() {
            *v /= &p;
        }
        let pivot_row = aug[rank].clone();
        for (r, row) in aug.iter_mut().enumerate() {
            if r != rank && !row[col].is_zero() {
                let factor = row[col].clone();
                for (dst, src) in row[col..=n].iter_mut().zip(&pivot_row[col..=n]) {
                    *dst -= &factor * src;
                }
            }
        }
        pivot_cols.push(col);
        rank += 1;
        if rank == m {
            break;
        }
    }
    // inconsistency: a zero row with nonzero rhs
    for row in aug.iter().skip(rank) {
        if !row[n].is_zero() {
            return None;
        }
    }

    let pivot_set: BTreeSet<usize> = pivot_cols.iter().copied().collect();
    let free_cols: Vec<usize> = (0..n).filter(|c| !pivot_set.contains(c)).collect();

    let mut origin = vec![Q::zero(); n];
    for (r, &pc) in pivot_cols.iter().enumerate() {
        origin[pc] = aug[r][n].clone();
    }
    let basis = free_cols
        .iter()
        .map(|&fc| {
            let mut v = vec![Q::zero(); n];
            v[fc] = Q::one();
            for (r, &pc) in pivot_cols.iter().enumerate() {
                v[pc] = -aug[r][fc].clone();
            }
            v
        })
        .collect();
    Some(AffineSpace { n, origin, basis })
}

fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let mut acc = 1usize;
    for i in 0..k {
        acc = acc.saturating_mul(n - i) / (i + 1);
    }
    acc
}

/// Enumerates all vertices of {x ∈ aff : lo ≤ x ≤ hi} exactly, in the
/// lexicographic order of their coordinate vectors.
///
/// A vertex is a feasible point with an active, parameter-spanning set of
/// bound constraints; every d-subset of coordinates with every low/high
/// pattern is solved and checked.
pub fn enumerate_vertices(
    aff: &AffineSpace,
    lo: &[Q],
    hi: &[Q],
    max_vertices: usize,
    max_bases: usize,
) -> Result<Vec<Vec<Q>>, EnumError> {
    let n = aff.n;
    let d = aff.dim();
    let feasible = |x: &Vec<Q>| (0..n).all(|i| x[i] >= lo[i] && x[i] <= hi[i]);

    if d == 0 {
        let x = aff.origin.clone();
        return Ok(if feasible(&x) { vec![x] } else { vec![] });
    }

    let candidates = binomial(n, d).saturating_mul(1usize << d);
    if candidates > max_bases {
        return Err(EnumError::BudgetExceeded { candidates });
    }

    let mut found: BTreeSet<Vec<Q>> = BTreeSet::new();
    let mut combo: Vec<usize> = (0..d).collect();
    loop {
        // all 2^d low/high patterns for this coordinate subset
        for pattern in 0..(1usize << d) {
            let rows: Vec<(Vec<Q>, Q)> = combo
                .iter()
                .enumerate()
                .map(|(j, &coord)| {
                    let coeffs: Vec<Q> =
                        aff.basis.iter().map(|b| b[coord].clone()).collect();
                    let bound =
                        if pattern & (1 << j) != 0 { hi[coord].clone() } else { lo[coord].clone() };
                    (coeffs, bound - &aff.origin[coord])
                })
                .collect();
            if let Some(sol) = solve_affine(d, &rows) {
                if sol.dim() == 0 {
                    let x = aff.point(&sol.origin);
                    if feasible(&x) {
                        found.insert(x);
                        if found.len() > max_vertices {
                            return Err(EnumError::CapExceeded { cap: max_vertices });
                        }
                    }
                }
            }
        }
        // next d-combination of 0..n
        let mut i = d;
        loop {
            if i == 0 {
                return Ok(found.into_iter().collect());
            }
            i -= 1;
            if combo[i] != i + n - d {
                combo[i] += 1;
                for j in (i + 1)..d {
                    combo[j] = combo[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Per-coordinate minima and maxima over a vertex list.
pub fn coordinate_ranges(vertices: &[Vec<Q>]) -> Option<Vec<(Q, Q)>> {
    let first = vertices.first()?;
    let mut ranges: Vec<(Q, Q)> = first.iter().map(|v| (v.clone(), v.clone())).collect();
    for v in &vertices[1..] {
        for (i, x) in v.iter().enumerate() {
            if *x < ranges[i].0 {
                ranges[i].0 = x.clone();
            }
            if *x > ranges[i].1 {
                ranges[i].1 = x.clone();
            }
        }
    }
    Some(ranges)
}

/// Exact L2 projection of `target` onto the affine space: solves the normal
/// equations BᵀB·t = Bᵀ·(target − origin).
pub fn project_onto(aff: &AffineSpace, target: &[Q]) -> Vec<Q> {
    let d = aff.dim();
    if d == 0 {
        return aff.origin.clone();
    }
    let mut rows: Vec<(Vec<Q>, Q)> = Vec::with_capacity(d);
    for bi in &aff.basis {
        let coeffs: Vec<Q> = aff
            .basis
            .iter()
            .map(|bj| {
                let mut s = Q::zero();
                for i in 0..aff.n {
                    if !bi[i].is_zero() && !bj[i].is_zero() {
                        s += &bi[i] * &bj[i];
                    }
                }
                s
            })
            .collect();
        let mut rhs = Q::zero();
        for i in 0..aff.n {
            if !bi[i].is_zero() {
                rhs += &bi[i] * (&target[i] - &aff.origin[i]);
            }
        }
        rows.push((coeffs, rhs));
    }
    let sol = solve_affine(d, &rows).expect("Gram system of independent columns is consistent");
    debug_assert_eq!(sol.dim(), 0, "Gram matrix must be invertible");
    aff.point(&sol.origin)
}

pub fn linf_distance(a: &[Q], b: &[Q]) -> Q {
    let mut worst = Q::zero();
    for (x, y) in a.iter().zip(b.iter()) {
        let d = (x - y).abs();
        if d > worst {
            worst = d;
        }
    }
    worst
}
