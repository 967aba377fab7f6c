//! P-projections: idempotent positive maps with a complementary partner
//! satisfying the four Alfsen-Shultz conditions, the abstract form of Lüders
//! conditioning. Two concrete families are provided: the associative corner
//! maps x ↦ exe on complex Hermitian matrices and the Jordan maps
//! x ↦ 2e∘(e∘x) − e∘x on real symmetric matrices.
//!
//! The four conditions quantify over all positive elements and all positive
//! functionals; [`verify_p_projection`] checks seeded sampled instances and
//! reports the outcome as sampled evidence, never as proof.

use crate::hilbert::{HilbertError, Projection, VALIDATION_TOL};
use crate::matrix::{self, CMat};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Which class of self-adjoint matrices a map acts on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MatrixDomain {
    ComplexHermitian,
    RealSymmetric,
}

type MapFn = Box<dyn Fn(&CMat) -> CMat + Send + Sync>;

/// A pair of linear maps (P, P′) on the self-adjoint matrices of one
/// dimension, candidates for a complementary P-projection pair.
pub struct PProjectionMap {
    dim: usize,
    domain: MatrixDomain,
    forward: MapFn,
    complement: MapFn,
}

/// Jordan product x∘y = ½(xy + yx).
pub fn jordan_product(x: &CMat, y: &CMat) -> CMat {
    (x * y + y * x) * Complex64::new(0.5, 0.0)
}

impl PProjectionMap {
    /// The corner maps Px = exe and P′x = e′xe′ of a von Neumann algebra.
    pub fn associative(e: &Projection) -> Self {
        let ec = e.complement();
        let em = e.matrix().clone();
        let cm = ec.matrix().clone();
        PProjectionMap {
            dim: e.dim(),
            domain: MatrixDomain::ComplexHermitian,
            forward: Box::new(move |x| &em * x * &em),
            complement: Box::new(move |x| &cm * x * &cm),
        }
    }

    /// The Jordan maps Px = 2e∘(e∘x) − e∘x on real symmetric matrices.
    ///
    /// Requires a real symmetric idempotent e. On this class the map agrees
    /// with x ↦ exe (the special Jordan identity); agreement is verified on
    /// sampled symmetric inputs at construction.
    pub fn jordan(e: &Projection) -> Result<Self, HilbertError> {
        let imag = matrix::max_imag(e.matrix());
        if imag > VALIDATION_TOL {
            return Err(HilbertError::NotReal { max_imag: imag, tol: VALIDATION_TOL });
        }
        let em = e.matrix().clone();
        let ecm = e.complement().matrix().clone();
        let map = PProjectionMap {
            dim: e.dim(),
            domain: MatrixDomain::RealSymmetric,
            forward: Box::new(move |x| {
                let ex = jordan_product(&em, x);
                jordan_product(&em, &ex) * Complex64::new(2.0, 0.0) - ex
            }),
            complement: Box::new(move |x| {
                let ex = jordan_product(&ecm, x);
                jordan_product(&ecm, &ex) * Complex64::new(2.0, 0.0) - ex
            }),
        };
        let worst = map.corner_agreement_defect(e, 16, 0x6a0b);
        if worst > VALIDATION_TOL {
            return Err(HilbertError::NotIdempotent { defect: worst, tol: VALIDATION_TOL });
        }
        Ok(map)
    }

    /// Arbitrary map pair, for adversarial verification inputs.
    pub fn custom(dim: usize, domain: MatrixDomain, forward: MapFn, complement: MapFn) -> Self {
        PProjectionMap { dim, domain, forward, complement }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn domain(&self) -> MatrixDomain {
        self.domain
    }

    pub fn forward(&self, x: &CMat) -> CMat {
        (self.forward)(x)
    }

    pub fn complement(&self, x: &CMat) -> CMat {
        (self.complement)(x)
    }

    /// Max ‖Px − exe‖ over sampled symmetric x.
    fn corner_agreement_defect(&self, e: &Projection, samples: usize, seed: u64) -> f64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut worst: f64 = 0.0;
        for _ in 0..samples {
            let x = random_self_adjoint(self.dim, self.domain, &mut rng);
            let corner = e.matrix() * &x * e.matrix();
            worst = worst.max(matrix::fro_dist(&self.forward(&x), &corner));
        }
        worst
    }

    /// Max ‖Px − exe‖ over `samples` random self-adjoint inputs; public form
    /// of the special-Jordan-identity check.
    pub fn corner_agreement(&self, e: &Projection, samples: usize, seed: u64) -> f64 {
        self.corner_agreement_defect(e, samples, seed)
    }
}

fn random_self_adjoint<R: Rng>(dim: usize, domain: MatrixDomain, rng: &mut R) -> CMat {
    let b = match domain {
        MatrixDomain::ComplexHermitian => matrix::random_gaussian(dim, rng),
        MatrixDomain::RealSymmetric => matrix::random_gaussian_real(dim, rng),
    };
    let mut m = &b * b.adjoint();
    let n = matrix::fro_norm(&m);
    if n > 0.0 {
        m /= Complex64::new(n, 0.0);
    }
    m
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub enum PCondition {
    A,
    B,
    C,
    D,
}

/// First failing sample of a condition check.
#[derive(Clone, Debug, serde::Serialize)]
pub struct PViolation {
    pub condition: PCondition,
    pub sample: usize,
    pub residual: f64,
    pub detail: String,
}

/// Outcome of the sampled verification of conditions (a)–(d).
#[derive(Clone, Debug, serde::Serialize)]
pub struct PProjectionReport {
    pub samples: usize,
    pub seed: u64,
    pub tol: f64,
    /// ‖P′𝟙 − (𝟙 − P𝟙)‖.
    pub unit_relation_defect: f64,
    pub condition_pass: [bool; 4],
    /// Non-vacuous checks that actually ran, per condition.
    pub checks_run: [usize; 4],
    pub first_violation: Option<PViolation>,
}

impl PProjectionReport {
    pub fn pass(&self) -> bool {
        self.condition_pass.iter().all(|&p| p) && self.unit_relation_defect <= self.tol
    }
}

/// Samples positive matrices x and positive functionals φ and checks:
/// (a) Px = 0 ⟺ P′x = x for positive x, (b) the mirrored statement,
/// (c) φ(P𝟙) = φ(𝟙) ⟹ φ(x) = φ(Px), (d) the mirrored statement.
///
/// Besides generic positive samples, each direction is materialized on
/// constructed inputs: P′y is a positive element that any genuine
/// complementary pair must send to a fixed point of P′ and to the kernel of
/// P, and premise states for (c)/(d) are mixed from the eigenvectors of P𝟙
/// (resp. P′𝟙) with eigenvalue 1.
pub fn verify_p_projection(
    map: &PProjectionMap,
    samples: usize,
    tol: f64,
    seed: u64,
) -> PProjectionReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dim = map.dim();
    let one = matrix::identity(dim);
    let p_one = map.forward(&one);
    let pc_one = map.complement(&one);
    let unit_relation_defect = matrix::fro_dist(&pc_one, &(&one - &p_one));

    let mut pass = [true; 4];
    let mut run = [0usize; 4];
    let mut first: Option<PViolation> = None;

    let record =
        |pass: &mut [bool; 4], first: &mut Option<PViolation>, v: PViolation| {
            pass[v.condition as usize] = false;
            if first.is_none() {
                *first = Some(v);
            }
        };

    let premise_states_c = premise_states(&p_one, samples.min(8), &mut rng);
    let premise_states_d = premise_states(&pc_one, samples.min(8), &mut rng);

    for k in 0..samples {
        let x = random_self_adjoint(dim, map.domain, &mut rng);
        let px = map.forward(&x);
        let pcx = map.complement(&x);

        // (a) forward/backward on the constructed element P′x and on x itself
        {
            let fixed = map.complement(&pcx);
            let r_fix = matrix::fro_dist(&fixed, &pcx);
            run[0] += 1;
            if r_fix > tol {
                record(&mut pass, &mut first, PViolation {
                    condition: PCondition::A,
                    sample: k,
                    residual: r_fix,
                    detail: "P′(P′x) ≠ P′x: complement map is not idempotent".into(),
                });
            } else {
                let r_ker = matrix::fro_norm(&map.forward(&pcx));
                if r_ker > tol {
                    record(&mut pass, &mut first, PViolation {
                        condition: PCondition::A,
                        sample: k,
                        residual: r_ker,
                        detail: "positive element fixed by P′ is not annihilated by P".into(),
                    });
                }
            }
            if matrix::fro_norm(&px) <= tol && matrix::fro_dist(&pcx, &x) > tol {
                record(&mut pass, &mut first, PViolation {
                    condition: PCondition::A,
                    sample: k,
                    residual: matrix::fro_dist(&pcx, &x),
                    detail: "Px = 0 but P′x ≠ x".into(),
                });
            }
            if matrix::fro_dist(&pcx, &x) <= tol && matrix::fro_norm(&px) > tol {
                record(&mut pass, &mut first, PViolation {
                    condition: PCondition::A,
                    sample: k,
                    residual: matrix::fro_norm(&px),
                    detail: "P′x = x but Px ≠ 0".into(),
                });
            }
        }

        // (b) mirrored
        {
            let fixed = map.forward(&px);
            let r_fix = matrix::fro_dist(&fixed, &px);
            run[1] += 1;
            if r_fix > tol {
                record(&mut pass, &mut first, PViolation {
                    condition: PCondition::B,
                    sample: k,
                    residual: r_fix,
                    detail: "P(Px) ≠ Px: forward map is not idempotent".into(),
                });
            } else {
                let r_ker = matrix::fro_norm(&map.complement(&px));
                if r_ker > tol {
                    record(&mut pass, &mut first, PViolation {
                        condition: PCondition::B,
                        sample: k,
                        residual: r_ker,
                        detail: "positive element fixed by P is not annihilated by P′".into(),
                    });
                }
            }
            if matrix::fro_norm(&pcx) <= tol && matrix::fro_dist(&px, &x) > tol {
                record(&mut pass, &mut first, PViolation {
                    condition: PCondition::B,
                    sample: k,
                    residual: matrix::fro_dist(&px, &x),
                    detail: "P′x = 0 but Px ≠ x".into(),
                });
            }
        }

        // (c)/(d): functionals φ(y) = tr(ρ·y); generic draws trigger only
        // when the premise happens to hold, constructed ones always do
        let rho = crate::hilbert::random_density_rng(dim, &mut rng);
        for cond in [PCondition::C, PCondition::D] {
            let (unit_image, x_image, states) = match cond {
                PCondition::C => (&p_one, &px, &premise_states_c),
                _ => (&pc_one, &pcx, &premise_states_d),
            };
            let premise = (matrix::trace_re(&(rho.matrix() * unit_image)) - 1.0).abs();
            if premise <= tol {
                run[cond as usize] += 1;
                let r = (matrix::trace_re(&(rho.matrix() * &x))
                    - matrix::trace_re(&(rho.matrix() * x_image)))
                .abs();
                if r > tol {
                    record(&mut pass, &mut first, PViolation {
                        condition: cond,
                        sample: k,
                        residual: r,
                        detail: "functional with φ(P𝟙)=φ(𝟙) moved by the map".into(),
                    });
                }
            }
            for st in states {
                run[cond as usize] += 1;
                let r = (matrix::trace_re(&(st * &x)) - matrix::trace_re(&(st * x_image))).abs();
                if r > tol {
                    record(&mut pass, &mut first, PViolation {
                        condition: cond,
                        sample: k,
                        residual: r,
                        detail: "constructed premise state moved by the map".into(),
                    });
                }
            }
        }
    }

    PProjectionReport {
        samples,
        seed,
        tol,
        unit_relation_defect,
        condition_pass: pass,
        checks_run: run,
        first_violation: first,
    }
}

/// States φ with φ(u) = φ(𝟙), mixed from eigenvectors of u at eigenvalue 1.
/// Empty when u has no eigenvalue near 1 (the premise is then vacuous on the
/// sampled family).
fn premise_states<R: Rng>(u: &CMat, count: usize, rng: &mut R) -> Vec<CMat> {
    let herm = (u + u.adjoint()) * Complex64::new(0.5, 0.0);
    let es = herm.clone().symmetric_eigen();
    let mut vecs: Vec<Vec<Complex64>> = Vec::new();
    for i in 0..es.eigenvalues.len() {
        if (es.eigenvalues[i] - 1.0).abs() <= 1e-6 {
            vecs.push(es.eigenvectors.column(i).iter().copied().collect());
        }
    }
    if vecs.is_empty() {
        return Vec::new();
    }
    let dim = herm.nrows();
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let mut weights: Vec<f64> = (0..vecs.len()).map(|_| rng.gen::<f64>() + 1e-3).collect();
        let total: f64 = weights.iter().sum();
        for w in weights.iter_mut() {
            *w /= total;
        }
        let mut rho = matrix::zeros(dim);
        for (v, w) in vecs.iter().zip(weights.iter()) {
            rho += matrix::outer_normalized(v) * Complex64::new(*w, 0.0);
        }
        // keep only states that satisfy the premise numerically
        if (matrix::trace_re(&(&rho * u)) - 1.0).abs() <= 1e-9 {
            out.push(rho);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::random_projection;

    #[test]
    fn associative_corner_on_basis_projection() {
        let e = Projection::diagonal(&[1, 0]);
        let p = PProjectionMap::associative(&e);
        let mut x = matrix::zeros(2);
        x[(0, 0)] = Complex64::new(1.0, 0.0);
        x[(0, 1)] = Complex64::new(2.0, 0.0);
        x[(1, 0)] = Complex64::new(3.0, 0.0);
        x[(1, 1)] = Complex64::new(4.0, 0.0);
        let y = p.forward(&x);
        assert!((y[(0, 0)].re - 1.0).abs() < 1e-15);
        assert!(y[(0, 1)].norm() < 1e-15);
        assert!(y[(1, 1)].norm() < 1e-15);
    }

    #[test]
    fn associative_identity_projection_gives_identity_map() {
        let p = PProjectionMap::associative(&Projection::one(3));
        let x = random_self_adjoint(3, MatrixDomain::ComplexHermitian, &mut ChaCha8Rng::seed_from_u64(4));
        assert!(matrix::fro_dist(&p.forward(&x), &x) < 1e-12);
    }

    #[test]
    fn forward_of_unit_is_the_projection() {
        let e = random_projection(4, 2, 99).unwrap();
        let p = PProjectionMap::associative(&e);
        assert!(matrix::fro_dist(&p.forward(&matrix::identity(4)), e.matrix()) < 1e-12);
    }

    #[test]
    fn jordan_of_identity_is_the_identity_map() {
        let p = PProjectionMap::jordan(&Projection::one(3)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let x = random_self_adjoint(3, MatrixDomain::RealSymmetric, &mut rng);
        assert!(matrix::fro_dist(&p.forward(&x), &x) < 1e-12);
        assert!(matrix::fro_norm(&p.complement(&x)) < 1e-12);
    }

    #[test]
    fn jordan_annihilates_off_corner() {
        let e = Projection::diagonal(&[1, 0]);
        let p = PProjectionMap::jordan(&e).unwrap();
        let mut x = matrix::zeros(2);
        x[(0, 1)] = Complex64::new(1.0, 0.0);
        x[(1, 0)] = Complex64::new(1.0, 0.0);
        assert!(matrix::fro_norm(&p.forward(&x)) < 1e-12);
    }

    #[test]
    fn jordan_map_is_idempotent_on_samples() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let e = crate::hilbert::random_projection_rng(3, 2, &mut rng, true).unwrap();
        let p = PProjectionMap::jordan(&e).unwrap();
        let mut sample_rng = ChaCha8Rng::seed_from_u64(40);
        for _ in 0..100 {
            let x = random_self_adjoint(3, MatrixDomain::RealSymmetric, &mut sample_rng);
            let once = p.forward(&x);
            let twice = p.forward(&once);
            assert!(matrix::fro_dist(&once, &twice) < 1e-12);
        }
    }

    #[test]
    fn jordan_rejects_complex_projection() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let e = crate::hilbert::random_projection_rng(3, 1, &mut rng, false).unwrap();
        assert!(matrix::max_imag(e.matrix()) > 1e-6, "draw should be genuinely complex");
        assert!(PProjectionMap::jordan(&e).is_err());
    }

    #[test]
    fn verify_passes_for_corner_maps() {
        let e = random_projection(3, 1, 42).unwrap();
        let report = verify_p_projection(&PProjectionMap::associative(&e), 50, 1e-9, 1);
        assert!(report.pass(), "{:?}", report.first_violation);
    }

    #[test]
    fn verify_fails_for_halving_map() {
        let half: MapFn = Box::new(|x: &CMat| x * Complex64::new(0.5, 0.0));
        let half2: MapFn = Box::new(|x: &CMat| x * Complex64::new(0.5, 0.0));
        let map = PProjectionMap::custom(2, MatrixDomain::ComplexHermitian, half, half2);
        let report = verify_p_projection(&map, 20, 1e-9, 3);
        assert!(!report.pass());
        let v = report.first_violation.expect("violation recorded");
        assert_eq!(v.condition, PCondition::A);
    }
}
