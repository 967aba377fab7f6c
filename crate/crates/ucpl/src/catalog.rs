//! Built-in scenarios, addressable by name so that sweeps and acceptance
//! runs need no external files: Boolean cubes 2^n, the horizontal sums MO_n,
//! a two-block pasting that separates orthogonality-to-a-sum from
//! orthogonality-to-the-parts, and two Hilbert fixtures.

use crate::hilbert::{DensityState, HilbertScenario, Projection};
use crate::logic::OrthoLogic;
use crate::matrix::{self, CMat};
use crate::scenario::{AbstractScenario, Scenario};
use num_complex::Complex64;

pub const CATALOG_NAMES: [&str; 8] = [
    "boolean2",
    "boolean3",
    "boolean4",
    "mo2",
    "mo3",
    "pasted12",
    "qubit-standard",
    "dim4-diag",
];

/// Looks up a built-in scenario by its catalog name.
pub fn by_name(name: &str) -> Option<Scenario> {
    match name {
        "boolean1" => Some(abstract_scenario(boolean_logic(1), boolean_uniform(1))),
        "boolean2" => Some(abstract_scenario(boolean_logic(2), boolean_uniform(2))),
        "boolean3" => Some(abstract_scenario(boolean_logic(3), boolean_uniform(3))),
        "boolean4" => Some(abstract_scenario(boolean_logic(4), boolean_uniform(4))),
        "mo2" => Some(abstract_scenario(mo_logic(2), mo_uniform(2))),
        "mo3" => Some(abstract_scenario(mo_logic(3), mo_uniform(3))),
        "pasted12" => Some(abstract_scenario(pasted_logic(), pasted_uniform())),
        "qubit-standard" => Some(Scenario::Hilbert(qubit_standard())),
        "dim4-diag" => Some(Scenario::Hilbert(dim4_diag())),
        _ => None,
    }
}

fn abstract_scenario(logic: OrthoLogic, uniform: Vec<f64>) -> Scenario {
    Scenario::Abstract(AbstractScenario::from_f64_states(
        logic,
        vec![("uniform".to_string(), uniform)],
    ))
}

const ATOM_LETTERS: [char; 4] = ['a', 'b', 'c', 'd'];

fn subset_name(mask: usize, atoms: usize) -> String {
    if mask == 0 {
        return "0".to_string();
    }
    if mask == (1 << atoms) - 1 {
        return "1".to_string();
    }
    let letters: Vec<String> = (0..atoms)
        .filter(|i| mask & (1 << i) != 0)
        .map(|i| ATOM_LETTERS[i].to_string())
        .collect();
    format!("{{{}}}", letters.join(","))
}

/// The Boolean algebra 2^n on `atoms` atoms: elements are subsets, the sum
/// of two disjoint subsets is their union.
pub fn boolean_logic(atoms: usize) -> OrthoLogic {
    assert!((1..=4).contains(&atoms));
    let size = 1usize << atoms;
    let full = size - 1;
    let names: Vec<String> = (0..size).map(|m| subset_name(m, atoms)).collect();
    let ocomp: Vec<usize> = (0..size).map(|m| full ^ m).collect();
    let mut orth = Vec::new();
    let mut sums = Vec::new();
    for m1 in 0..size {
        for m2 in 0..size {
            if m1 & m2 == 0 {
                orth.push((m1, m2));
                sums.push(((m1, m2), m1 | m2));
            }
        }
    }
    OrthoLogic::from_tables(names, 0, full, ocomp, orth, sums).expect("catalog cube is well formed")
}

/// Uniform state on 2^n: each subset is weighted by its share of atoms.
fn boolean_uniform(atoms: usize) -> Vec<f64> {
    let size = 1usize << atoms;
    (0..size).map(|m: usize| m.count_ones() as f64 / atoms as f64).collect()
}

/// MO_n: n four-element Boolean blocks {0, aᵢ, aᵢ′, 1} glued at 0 and 1.
/// Events from different blocks are never orthogonal.
pub fn mo_logic(blocks: usize) -> OrthoLogic {
    assert!(blocks >= 1);
    let n = 2 + 2 * blocks;
    let mut names = vec!["0".to_string(), "1".to_string()];
    let mut ocomp = vec![1usize, 0usize];
    for k in 0..blocks {
        names.push(format!("a{}", k + 1));
        names.push(format!("a{}'", k + 1));
        ocomp.push(2 + 2 * k + 1);
        ocomp.push(2 + 2 * k);
    }
    let mut orth = Vec::new();
    let mut sums = Vec::new();
    for x in 0..n {
        orth.push((0, x));
        sums.push(((0, x), x));
        if x != 0 {
            orth.push((x, 0));
            sums.push(((x, 0), x));
        }
    }
    for k in 0..blocks {
        let a = 2 + 2 * k;
        let ac = a + 1;
        orth.push((a, ac));
        orth.push((ac, a));
        sums.push(((a, ac), 1));
        sums.push(((ac, a), 1));
    }
    OrthoLogic::from_tables(names, 0, 1, ocomp, orth, sums).expect("catalog MO_n is well formed")
}

fn mo_uniform(blocks: usize) -> Vec<f64> {
    let mut v = vec![0.0, 1.0];
    for _ in 0..blocks {
        v.push(0.5);
        v.push(0.5);
    }
    v
}

/// Two Boolean 2^3 blocks pasted along the subalgebra {0, s, s′, 1}: block A
/// on atoms {e1, e2, s′} and block B on atoms {f, s, u}. The element
/// s = e1+e2 satisfies f ⊥ s while neither f ⊥ e1 nor f ⊥ e2 holds, so
/// orthogonality to a sum does not descend to the summands here.
pub fn pasted_logic() -> OrthoLogic {
    let names: Vec<String> = [
        "0", "1", "e1", "e2", "s'", "s", "e2'", "e1'", "f", "u", "u'", "f'",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    let ocomp = vec![1, 0, 7, 6, 5, 4, 3, 2, 11, 10, 9, 8];

    // block elements indexed by atom bitmask; atoms listed low bit first
    let block_a = [0usize, 2, 3, 5, 4, 6, 7, 1]; // atoms e1, e2, s'
    let block_b = [0usize, 8, 5, 10, 9, 4, 11, 1]; // atoms f, s, u

    let mut orth = Vec::new();
    let mut sums = Vec::new();
    for block in [block_a, block_b] {
        for m1 in 0..8usize {
            for m2 in 0..8usize {
                if m1 & m2 == 0 {
                    orth.push((block[m1], block[m2]));
                    sums.push(((block[m1], block[m2]), block[m1 | m2]));
                }
            }
        }
    }
    OrthoLogic::from_tables(names, 0, 1, ocomp, orth, sums)
        .expect("catalog pasting is well formed")
}

fn pasted_uniform() -> Vec<f64> {
    // order: 0 1 e1 e2 s' s e2' e1' f u u' f'
    vec![0.0, 1.0, 0.25, 0.25, 0.5, 0.5, 0.75, 0.75, 0.25, 0.25, 0.75, 0.75]
}

/// The qubit separation fixture: e = diag(1,0), f = ½[[1,1],[1,1]], with the
/// maximally mixed state and the pure state ρ = f.
pub fn qubit_standard() -> HilbertScenario {
    let e = Projection::diagonal(&[1, 0]);
    let mut fm = matrix::zeros(2);
    for i in 0..2 {
        for j in 0..2 {
            fm[(i, j)] = Complex64::new(0.5, 0.0);
        }
    }
    let f = Projection::new(fm.clone(), 1e-12).expect("f is a projection");
    let rho_f = DensityState::new(fm, 1e-12).expect("f has unit trace");
    HilbertScenario::new(
        2,
        vec![("e".to_string(), e), ("f".to_string(), f)],
        vec![
            ("mixed".to_string(), DensityState::maximally_mixed(2)),
            ("rho_f".to_string(), rho_f),
        ],
    )
    .expect("qubit fixture is consistent")
}

/// A commuting diagonal pair in dimension 4: e = diag(1,1,0,0),
/// f = diag(0,1,1,0).
pub fn dim4_diag() -> HilbertScenario {
    let e = Projection::diagonal(&[1, 1, 0, 0]);
    let f = Projection::diagonal(&[0, 1, 1, 0]);
    let weights = CMat::from_diagonal(&nalgebra::DVector::from_vec(vec![
        Complex64::new(0.4, 0.0),
        Complex64::new(0.3, 0.0),
        Complex64::new(0.2, 0.0),
        Complex64::new(0.1, 0.0),
    ]));
    HilbertScenario::new(
        4,
        vec![("e".to_string(), e), ("f".to_string(), f)],
        vec![
            ("mixed".to_string(), DensityState::maximally_mixed(4)),
            (
                "weights".to_string(),
                DensityState::new(weights, 1e-12).expect("weights state is valid"),
            ),
        ],
    )
    .expect("dim4 fixture is consistent")
}
