//! Property tests for the structural invariants: conditioning laws on the
//! Hilbert backend, the commutation coincidences, and state validity of
//! everything the abstract conditioning returns.

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ucpl::catalog;
use ucpl::hierarchy::{self, HilbertBackend};
use ucpl::hilbert::{self, Projection};
use ucpl::matrix;
use ucpl::states;

const TOL: f64 = 1e-9;

fn rng_pair(dim: usize, seed: u64) -> (Projection, Projection, ChaCha8Rng) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rank_e = rng.gen_range(0..=dim);
    let rank_f = rng.gen_range(0..=dim);
    let e = hilbert::random_projection_rng(dim, rank_e, &mut rng, false).unwrap();
    let f = hilbert::random_projection_rng(dim, rank_f, &mut rng, false).unwrap();
    (e, f, rng)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// μ(f|e) + μ(f′|e) = 1: the conditioned state is a state.
    #[test]
    fn conditional_probability_is_additive(dim in 2usize..=6, seed in any::<u64>()) {
        let (e, f, mut rng) = rng_pair(dim, seed);
        prop_assume!(e.rank_estimate() > 0.5);
        let rho = hilbert::random_density_rng(dim, &mut rng);
        let p = hilbert::cond_prob(&rho, &e, &f, TOL).unwrap();
        let pc = hilbert::cond_prob(&rho, &e, &f.complement(), TOL).unwrap();
        prop_assert!((p + pc - 1.0).abs() <= TOL);
        prop_assert!((0.0..=1.0).contains(&p));
    }

    /// For f ⊥ e′ the conditional probability is μ(f)/μ(e), the defining
    /// property.
    #[test]
    fn conditional_probability_defining_identity(
        dim in 2usize..=6,
        seed in any::<u64>(),
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rank = rng.gen_range(1..=dim);
        let sub_rank = rng.gen_range(1..=rank);
        let cols = matrix::orthonormal_columns(dim, rank, &mut rng, false);
        let e = Projection::new(&cols * cols.adjoint(), TOL).unwrap();
        let sub = cols.columns(0, sub_rank).into_owned();
        let f = Projection::new(&sub * sub.adjoint(), TOL).unwrap();
        // f lies under e
        prop_assert!(matrix::fro_dist(&(e.matrix() * f.matrix()), f.matrix()) <= 1e-12);

        let rho = hilbert::random_density_rng(dim, &mut rng);
        let lhs = hilbert::cond_prob(&rho, &e, &f, TOL).unwrap();
        let rhs = rho.expect(&f) / rho.expect(&e);
        prop_assert!((lhs - rhs).abs() <= TOL);
    }

    /// Conditioning twice on the same event changes nothing.
    #[test]
    fn lueders_conditioning_is_idempotent(dim in 2usize..=6, seed in any::<u64>()) {
        let (e, _, mut rng) = rng_pair(dim, seed);
        prop_assume!(e.rank_estimate() > 0.5);
        let rho = hilbert::random_density_rng(dim, &mut rng);
        let once = hilbert::lueders_condition(&rho, &e, TOL).unwrap();
        let twice = hilbert::lueders_condition(&once, &e, TOL).unwrap();
        prop_assert!(matrix::fro_dist(once.matrix(), twice.matrix()) <= TOL);
    }

    /// The four state-free commutation characterizations agree on every
    /// pair: ‖ef − fe‖ ≤ τ, both influence directions, and the existence of
    /// the algebraic decomposition.
    #[test]
    fn commutation_coincidences(dim in 2usize..=8, seed in any::<u64>()) {
        let (e, f, _) = rng_pair(dim, seed);
        let commuting = hilbert::commutes(&e, &f, TOL).unwrap();
        prop_assert_eq!(commuting, hilbert::influence_free_operator(&e, &f, TOL).unwrap());
        prop_assert_eq!(commuting, hilbert::influence_free_operator(&f, &e, TOL).unwrap());
        prop_assert_eq!(commuting, hilbert::algebraic_decomposition(&e, &f, TOL).unwrap().is_some());
        // complements always commute with e, as a positive instance
        prop_assert!(hilbert::commutes(&e, &e.complement(), TOL).unwrap());
        prop_assert!(hilbert::algebraic_decomposition(&e, &e.complement(), TOL).unwrap().is_some());
    }

    /// The decomposition parts recompose to e and f and are orthogonal.
    #[test]
    fn decomposition_recomposes(dim in 2usize..=6, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let basis = matrix::orthonormal_columns(dim, dim, &mut rng, false);
        let block = |bits: &[bool]| {
            let mut m = matrix::zeros(dim);
            for (i, &on) in bits.iter().enumerate() {
                if on {
                    let col = basis.column(i);
                    for r in 0..dim {
                        for c in 0..dim {
                            m[(r, c)] += col[r] * col[c].conj();
                        }
                    }
                }
            }
            Projection::new(m, TOL).unwrap()
        };
        let bits_e: Vec<bool> = (0..dim).map(|_| rng.gen()).collect();
        let bits_f: Vec<bool> = (0..dim).map(|_| rng.gen()).collect();
        let e = block(&bits_e);
        let f = block(&bits_f);
        let (d1, d2, d3) = hilbert::algebraic_decomposition(&e, &f, TOL).unwrap().unwrap();
        prop_assert!(hilbert::orthogonality_defect(&[&d1, &d2, &d3]) <= 1e-8);
        prop_assert!(matrix::fro_dist(&(d1.matrix() + d2.matrix()), e.matrix()) <= 1e-8);
        prop_assert!(matrix::fro_dist(&(d2.matrix() + d3.matrix()), f.matrix()) <= 1e-8);
    }

    /// Chain weights marginalize: the weight of (a,b) terminated by 𝟙 is
    /// μ(a)·μ_a(b).
    #[test]
    fn sequential_weight_marginalizes(dim in 2usize..=6, seed in any::<u64>()) {
        let (a, b, mut rng) = rng_pair(dim, seed);
        let rho = hilbert::random_density_rng(dim, &mut rng);
        let backend = HilbertBackend::new(dim);
        let chained = hilbert::sequential_weight(&rho, &[&a, &b], &Projection::one(dim));
        let product = hierarchy::sequential_product(&backend, &rho, &a, &b, TOL).unwrap();
        prop_assert!((chained - product).abs() <= TOL);
    }

    /// Strong comeasurability in a state implies weak comeasurability in it
    /// (select d = 𝟙).
    #[test]
    fn strong_implies_weak_in_state(dim in 2usize..=5, seed in any::<u64>()) {
        let (e, f, mut rng) = rng_pair(dim, seed);
        let rho = hilbert::random_density_rng(dim, &mut rng);
        let backend = HilbertBackend::new(dim);
        let strong = hierarchy::strongly_comeasurable_in_state(&backend, &rho, &e, &f, TOL).unwrap();
        if strong.holds {
            let weak = hierarchy::weakly_comeasurable_in_state(&backend, &rho, &e, &f, TOL).unwrap();
            prop_assert!(weak.holds);
        }
        // commuting instance: both always hold
        let ec = e.complement();
        let strong = hierarchy::strongly_comeasurable_in_state(&backend, &rho, &e, &ec, TOL).unwrap();
        let weak = hierarchy::weakly_comeasurable_in_state(&backend, &rho, &e, &ec, TOL).unwrap();
        prop_assert!(strong.holds && weak.holds);
    }

    /// The Jordan conditioning map is the corner map on symmetric matrices.
    #[test]
    fn jordan_map_is_the_corner_map(dim in 2usize..=6, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rank = rng.gen_range(1..dim);
        let e = hilbert::random_projection_rng(dim, rank, &mut rng, true).unwrap();
        let map = ucpl::pprojection::PProjectionMap::jordan(&e).unwrap();
        prop_assert!(map.corner_agreement(&e, 32, seed) <= TOL);
    }

    /// Every state returned by abstract conditioning satisfies the state
    /// invariants and gives its conditioning event probability one.
    #[test]
    fn abstract_conditioning_returns_states(weights in proptest::collection::vec(0.01f64..1.0, 3), idx in 0usize..7) {
        let l = catalog::boolean_logic(3);
        let p = states::build_polytope(&l).unwrap();
        let verts = states::enumerate_vertex_states(&p, 16).unwrap();
        let total: f64 = weights.iter().sum();
        let mix: Vec<f64> = (0..l.len())
            .map(|i| {
                let el = l.elem(i).unwrap();
                verts
                    .iter()
                    .zip(weights.iter())
                    .map(|(v, w)| v.value(el) * w / total)
                    .sum()
            })
            .collect();
        let mu = states::state_from_f64(&l, &p, &mix, 1e-6).unwrap();
        let e = l.elem(idx + 1).unwrap(); // skip 0
        if mu.value(e) > TOL {
            let nu = states::conditional_probability(&l, &p, &mu, e, TOL).unwrap();
            // unit, additivity on every orthogonal pair, box, and ν(e) = 1
            prop_assert!((nu.value(l.one()) - 1.0).abs() <= TOL);
            for (x, y) in l.orth_pairs_unordered() {
                let s = l.sum(x, y).unwrap();
                prop_assert!((nu.value(x) + nu.value(y) - nu.value(s)).abs() <= TOL);
            }
            for el in l.elements() {
                prop_assert!(nu.value(el) >= -TOL && nu.value(el) <= 1.0 + TOL);
            }
            prop_assert!((nu.value(e) - 1.0).abs() <= TOL);
        }
    }

    /// Influence holds in every state for commuting pairs, in both backends'
    /// per-state arithmetic.
    #[test]
    fn influence_identity_for_commuting_pairs(dim in 2usize..=6, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rank = rng.gen_range(0..=dim);
        let e = hilbert::random_projection_rng(dim, rank, &mut rng, false).unwrap();
        let rho = hilbert::random_density_rng(dim, &mut rng);
        let backend = HilbertBackend::new(dim);
        for event in [e.complement(), Projection::one(dim), Projection::zero(dim), e.clone()] {
            let check = hierarchy::influence_in_state(&backend, &rho, &e, &event, TOL).unwrap();
            prop_assert!(check.holds, "residual {}", check.residual);
        }
    }
}

/// The deliberate non-theorem guard: orthogonality to a sum must not be
/// assumed to descend to the summands. The pasted catalog logic passes every
/// axiom yet has f ⊥ (e1+e2) with neither f ⊥ e1 nor f ⊥ e2; the influence
/// sweep is run on it to confirm nothing downstream relies on the converse.
#[test]
fn orthogonality_to_sum_does_not_descend() {
    let l = catalog::pasted_logic();
    assert!(ucpl::logic::validate_axioms(&l).all_pass());
    let e1 = l.by_name("e1").unwrap();
    let f = l.by_name("f").unwrap();
    let s = l.by_name("s").unwrap();
    assert!(l.is_orth(f, s));
    assert!(!l.is_orth(f, e1));

    let p = states::build_polytope(&l).unwrap();
    let backend = hierarchy::AbstractBackend::new(&l, &p, &[]).unwrap();
    // orthogonal events are influence-free in every swept state even here
    for mu in backend.sample().to_vec() {
        let check = hierarchy::influence_in_state(&backend, &mu, &f, &s, 1e-9);
        if let Ok(check) = check {
            assert!(check.holds);
        }
    }
    // f and e1 are not comparable through the derived order either
    assert!(!l.derived_order(f, l.ocomp(e1)));
}

/// Dual-route check connecting the backends: the Boolean cube 2^3 embeds as
/// the diagonal projections of a dim-3 matrix algebra (subset mask ↔ 0/1
/// diagonal pattern), and a diagonal density matrix realizes exactly the
/// abstract state μ(S) = Σ_{i∈S} p_i. Every per-state quantity must then
/// agree across the two conditioning stacks: influence residuals, the 16
/// weak-comeasurability products, joint distribution cells and the
/// equivalence flags.
#[test]
fn boolean_cube_agrees_with_diagonal_projections() {
    let atoms = 3usize;
    let l = catalog::boolean_logic(atoms);
    let p = states::build_polytope(&l).unwrap();
    let hb = HilbertBackend::new(atoms);

    let mask_projection = |mask: usize| {
        let pattern: Vec<u8> = (0..atoms).map(|i| u8::from(mask & (1 << i) != 0)).collect();
        Projection::diagonal(&pattern)
    };

    let weights_list: [[f64; 3]; 3] =
        [[0.5, 0.3, 0.2], [0.001, 0.499, 0.5], [1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0]];
    for weights in weights_list {
        let mut m = ucpl::matrix::zeros(atoms);
        for (i, w) in weights.iter().enumerate() {
            m[(i, i)] = num_complex::Complex64::new(*w, 0.0);
        }
        let rho = ucpl::hilbert::DensityState::new(m, 1e-9).unwrap();
        let values: Vec<f64> = (0..(1usize << atoms))
            .map(|mask| (0..atoms).filter(|i| mask & (1 << i) != 0).map(|i| weights[i]).sum())
            .collect();
        let mu = states::state_from_f64(&l, &p, &values, 1e-9).unwrap();

        let ab = hierarchy::AbstractBackend::new(&l, &p, &[]).unwrap();
        for e_mask in 0..(1usize << atoms) {
            for f_mask in 0..(1usize << atoms) {
                let (eh, fh) = (mask_projection(e_mask), mask_projection(f_mask));
                let (ea, fa) = (l.elem(e_mask).unwrap(), l.elem(f_mask).unwrap());

                let inf_h = hierarchy::influence_in_state(&hb, &rho, &eh, &fh, TOL).unwrap();
                let inf_a = hierarchy::influence_in_state(&ab, &mu, &ea, &fa, TOL).unwrap();
                assert_eq!(inf_h.holds, inf_a.holds);
                assert!((inf_h.residual - inf_a.residual).abs() <= 1e-9);

                let weak_h =
                    hierarchy::weakly_comeasurable_in_state(&hb, &rho, &eh, &fh, TOL).unwrap();
                let weak_a =
                    hierarchy::weakly_comeasurable_in_state(&ab, &mu, &ea, &fa, TOL).unwrap();
                assert_eq!(weak_h.holds, weak_a.holds);
                assert!((weak_h.max_residual - weak_a.max_residual).abs() <= 1e-9);

                let joint_h = hierarchy::joint_distribution(&hb, &rho, &eh, &fh, "e", TOL);
                let joint_a = hierarchy::joint_distribution(&ab, &mu, &ea, &fa, "e", TOL);
                assert_eq!(joint_h.is_ok(), joint_a.is_ok());
                if let (Ok(jh), Ok(ja)) = (joint_h, joint_a) {
                    for k in 0..2 {
                        for cell in 0..2 {
                            assert!((jh.p(k, cell) - ja.p(k, cell)).abs() <= 1e-9);
                        }
                    }
                }

                let lem_h = hierarchy::lemma1_equivalence(&hb, &rho, &eh, &fh, TOL).unwrap();
                let lem_a = hierarchy::lemma1_equivalence(&ab, &mu, &ea, &fa, TOL).unwrap();
                assert!(lem_h.consistent && lem_a.consistent);
                assert_eq!(lem_h.weak, lem_a.weak);
            }
        }
    }
}
