//! States on an abstract logic form a convex polytope: one variable per
//! element, box constraints [0,1], the unit constraint and one additivity
//! equality per orthogonal pair. Conditional probabilities are solved as
//! exact linear feasibility problems, with uniqueness certified by
//! maximizing and minimizing every coordinate over the feasible region.
//!
//! "For all states" sweeps quantify over the polytope vertices, midpoints of
//! vertex pairs and any user-supplied states. Conditioning is nonlinear in
//! the state, so such verdicts are sample-relative and are labeled as such;
//! UC1 alone is decided exactly, because value equality is linear and the
//! vertices span the polytope.

use crate::exact::{self, AffineSpace, EnumError, Q};
use crate::logic::{validate_axioms, Elem, OrthoLogic};
use num_traits::{Signed, Zero};
use serde::Serialize;
use std::sync::OnceLock;

/// Internal enumeration guards; catalog-scale logics stay far below both.
const VERTEX_CAP: usize = 4096;
const BASIS_BUDGET: usize = 4_000_000;

#[derive(Clone, Debug, thiserror::Error)]
pub enum StateError {
    #[error("logic fails the orthologic axioms ({0})")]
    InvalidLogic(String),
    #[error("the equality system of the state polytope is inconsistent")]
    Infeasible,
    #[error(transparent)]
    Enumeration(#[from] EnumError),
    #[error("not a state: {0}")]
    NotAState(String),
}

#[derive(Clone, Debug, thiserror::Error)]
pub enum ConditionalError {
    #[error("cannot condition on null event {event}: μ = {prob:.3e} ≤ tol {tol:.1e}")]
    NullEvent { event: String, prob: f64, tol: f64 },
    #[error("no conditional state under {event} exists")]
    NoConditionalState { event: String },
    #[error("conditional state under {event} is not unique: {element} ranges over a gap of {gap:.4}")]
    NonUnique { event: String, element: String, gap: f64 },
    #[error(transparent)]
    State(#[from] StateError),
}

/// A valuation on the logic's elements: unit on 1, additive on orthogonal
/// sums. Values are exact rationals; every constructor guarantees the
/// equalities hold exactly, so conditioning constraints never suffer from
/// rounding.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct AbstractState {
    values: Vec<Q>,
}

impl AbstractState {
    pub(crate) fn from_exact(values: Vec<Q>) -> Self {
        AbstractState { values }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn value(&self, e: Elem) -> f64 {
        exact::q_to_f64(&self.values[e.index()])
    }

    pub fn value_exact(&self, e: Elem) -> &Q {
        &self.values[e.index()]
    }

    pub fn values_exact(&self) -> &[Q] {
        &self.values
    }

    pub fn values_f64(&self) -> Vec<f64> {
        self.values.iter().map(exact::q_to_f64).collect()
    }

    /// Exact midpoint of two states; states are convex.
    pub fn midpoint(&self, other: &AbstractState) -> AbstractState {
        let half = exact::q_ratio(1, 2);
        let values = self
            .values
            .iter()
            .zip(other.values.iter())
            .map(|(a, b)| (a + b) * &half)
            .collect();
        AbstractState { values }
    }
}

/// The linear constraint system over one variable per element, with its
/// solved affine form and a cached vertex list.
#[derive(Debug)]
pub struct StatePolytope {
    n: usize,
    equality_count: usize,
    affine: AffineSpace,
    vertices: OnceLock<Result<Vec<AbstractState>, StateError>>,
}

/// Builds the state polytope of a valid orthologic. The constraint system
/// has one equality per unordered orthogonal pair plus the unit constraint.
pub fn build_polytope(l: &OrthoLogic) -> Result<StatePolytope, StateError> {
    let report = validate_axioms(l);
    if !report.all_pass() {
        let failed: Vec<&str> = ["OS1", "OS2", "OS3", "OS4", "OS5", "OS6"]
            .iter()
            .zip(report.checks().iter())
            .filter(|(_, c)| !c.pass)
            .map(|(name, _)| *name)
            .collect();
        return Err(StateError::InvalidLogic(failed.join(", ")));
    }
    build_polytope_unchecked(l)
}

/// Polytope construction without the axiom gate, for diagnostics on
/// structures that fail some axiom.
pub fn build_polytope_unchecked(l: &OrthoLogic) -> Result<StatePolytope, StateError> {
    let n = l.len();
    let mut rows: Vec<(Vec<Q>, Q)> = Vec::new();

    let mut unit = vec![Q::zero(); n];
    unit[l.one().index()] = exact::q_int(1);
    rows.push((unit, exact::q_int(1)));

    let mut pairs = 0usize;
    for (a, b) in l.orth_pairs_unordered() {
        let Some(s) = l.sum(a, b) else { continue };
        pairs += 1;
        let mut coeffs = vec![Q::zero(); n];
        coeffs[a.index()] += exact::q_int(1);
        coeffs[b.index()] += exact::q_int(1);
        coeffs[s.index()] -= exact::q_int(1);
        if coeffs.iter().all(|c| c.is_zero()) {
            continue; // e + 0 = e style rows can cancel entirely
        }
        rows.push((coeffs, Q::zero()));
    }

    let affine = exact::solve_affine(n, &rows).ok_or(StateError::Infeasible)?;
    Ok(StatePolytope { n, equality_count: pairs + 1, affine, vertices: OnceLock::new() })
}

impl StatePolytope {
    pub fn n_variables(&self) -> usize {
        self.n
    }

    /// Unit constraint plus one equality per unordered orthogonal pair.
    pub fn equality_count(&self) -> usize {
        self.equality_count
    }

    /// Affine dimension of the state space.
    pub fn dim(&self) -> usize {
        self.affine.dim()
    }

    fn unit_box(&self) -> (Vec<Q>, Vec<Q>) {
        (vec![Q::zero(); self.n], vec![exact::q_int(1); self.n])
    }

    fn vertices_cached(&self) -> &Result<Vec<AbstractState>, StateError> {
        self.vertices.get_or_init(|| {
            let (lo, hi) = self.unit_box();
            let verts = exact::enumerate_vertices(&self.affine, &lo, &hi, VERTEX_CAP, BASIS_BUDGET)?;
            Ok(verts.into_iter().map(AbstractState::from_exact).collect())
        })
    }
}

/// All vertices of the polytope in deterministic (lexicographic) order,
/// failing with a cap-exceeded signal beyond `cap` vertices.
pub fn enumerate_vertex_states(
    p: &StatePolytope,
    cap: usize,
) -> Result<Vec<AbstractState>, StateError> {
    let verts = p.vertices_cached().clone()?;
    if verts.len() > cap {
        return Err(StateError::Enumeration(EnumError::CapExceeded { cap }));
    }
    Ok(verts)
}

/// Validates raw per-element values as a state, canonicalizing them onto the
/// equality subspace by exact L2 projection. Rejected when the projection
/// moves any value by more than `tol` or when a canonical value leaves
/// [−tol, 1+tol].
pub fn state_from_values(
    l: &OrthoLogic,
    p: &StatePolytope,
    values: &[Q],
    tol: f64,
) -> Result<AbstractState, StateError> {
    if values.len() != l.len() {
        return Err(StateError::NotAState(format!(
            "{} values for {} elements",
            values.len(),
            l.len()
        )));
    }
    let tol_q = exact::q_from_f64(tol).unwrap_or_else(Q::zero);
    let canon = exact::project_onto(&p.affine, values);
    let moved = exact::linf_distance(&canon, values);
    if moved > tol_q {
        return Err(StateError::NotAState(format!(
            "violates unit/additivity equalities: canonicalization moved a value by {:.3e}",
            exact::q_to_f64(&moved)
        )));
    }
    let lo = -tol_q.clone();
    let hi = exact::q_int(1) + &tol_q;
    for (i, v) in canon.iter().enumerate() {
        if *v < lo || *v > hi {
            return Err(StateError::NotAState(format!(
                "value for {} is {:.6}, outside [0,1]",
                l.name(l.elem(i).expect("index in range")),
                exact::q_to_f64(v)
            )));
        }
    }
    Ok(AbstractState::from_exact(canon))
}

pub fn state_from_f64(
    l: &OrthoLogic,
    p: &StatePolytope,
    values: &[f64],
    tol: f64,
) -> Result<AbstractState, StateError> {
    let exact_values: Option<Vec<Q>> = values.iter().map(|&v| exact::q_from_f64(v)).collect();
    let exact_values =
        exact_values.ok_or_else(|| StateError::NotAState("non-finite value".to_string()))?;
    state_from_values(l, p, &exact_values, tol)
}

/// The unique conditional state ν with ν(f) = μ(f)/μ(e) for every f ⊥ e′,
/// certified by exact per-coordinate max/min bounding over the feasible
/// region. Failure modes (ii) no feasible state and (iii) a coordinate gap
/// above `tol` are the UC2 counterexample witnesses.
pub fn conditional_probability(
    l: &OrthoLogic,
    p: &StatePolytope,
    mu: &AbstractState,
    e: Elem,
    tol: f64,
) -> Result<AbstractState, ConditionalError> {
    let tol_q = exact::q_from_f64(tol).unwrap_or_else(Q::zero);
    let pe = mu.value_exact(e).clone();
    if pe <= tol_q {
        return Err(ConditionalError::NullEvent {
            event: l.name(e).to_string(),
            prob: exact::q_to_f64(&pe),
            tol,
        });
    }

    let e_comp = l.ocomp(e);
    let one = exact::q_int(1);
    let mut pins: Vec<(Vec<Q>, Q)> = Vec::new();
    for f in l.elements() {
        if l.is_orth(f, e_comp) {
            let mut target = mu.value_exact(f) / &pe;
            // pinned values are probabilities; clamp stray rounding from
            // canonicalized inputs
            if target.is_negative() {
                target = Q::zero();
            } else if target > one {
                target = one.clone();
            }
            let mut coeffs = vec![Q::zero(); p.n];
            coeffs[f.index()] = one.clone();
            pins.push((coeffs, target));
        }
    }

    let restricted = p
        .affine
        .restrict(&pins)
        .ok_or_else(|| ConditionalError::NoConditionalState { event: l.name(e).to_string() })?;
    let (lo, hi) = p.unit_box();
    let verts = exact::enumerate_vertices(&restricted, &lo, &hi, VERTEX_CAP, BASIS_BUDGET)
        .map_err(StateError::from)?;
    if verts.is_empty() {
        return Err(ConditionalError::NoConditionalState { event: l.name(e).to_string() });
    }

    let ranges = exact::coordinate_ranges(&verts).expect("nonempty vertex list");
    let mut worst_gap = Q::zero();
    let mut worst_elem = l.zero();
    for (i, (min, max)) in ranges.iter().enumerate() {
        let gap = max - min;
        if gap > worst_gap {
            worst_gap = gap;
            worst_elem = l.elem(i).expect("index in range");
        }
    }
    if worst_gap > tol_q {
        return Err(ConditionalError::NonUnique {
            event: l.name(e).to_string(),
            element: l.name(worst_elem).to_string(),
            gap: exact::q_to_f64(&worst_gap),
        });
    }

    // unique within tol; return the exact centroid, which satisfies all
    // equalities and pins
    let count = exact::q_int(verts.len() as i64);
    let mut centroid = vec![Q::zero(); p.n];
    for v in &verts {
        for i in 0..p.n {
            centroid[i] += &v[i];
        }
    }
    for c in centroid.iter_mut() {
        *c /= &count;
    }
    Ok(AbstractState::from_exact(centroid))
}

/// UC1: distinct events must be separated by some state. Decided exactly on
/// the vertex set (value equality is linear, so vertices decide it for the
/// whole polytope).
#[derive(Clone, Debug, Serialize)]
pub struct Uc1Report {
    pub pass: bool,
    pub unseparated: Option<(String, String)>,
}

pub fn check_uc1(l: &OrthoLogic, p: &StatePolytope) -> Result<Uc1Report, StateError> {
    let verts = enumerate_vertex_states(p, VERTEX_CAP)?;
    for i in 0..l.len() {
        for j in (i + 1)..l.len() {
            let (ei, ej) = (l.elem(i).unwrap(), l.elem(j).unwrap());
            let separated =
                verts.iter().any(|v| v.value_exact(ei) != v.value_exact(ej));
            if !separated {
                return Ok(Uc1Report {
                    pass: false,
                    unseparated: Some((l.name(ei).to_string(), l.name(ej).to_string())),
                });
            }
        }
    }
    Ok(Uc1Report { pass: true, unseparated: None })
}

#[derive(Clone, Debug, Serialize)]
pub struct Uc2Witness {
    pub state_values: Vec<f64>,
    pub event: String,
    pub failure: String,
}

/// UC2 verdict over a state sample; explicitly sample-relative, not a proof
/// over all of S.
#[derive(Clone, Debug, Serialize)]
pub struct Uc2Report {
    pub pass: bool,
    pub cases_checked: usize,
    pub sample_description: String,
    pub witness: Option<Uc2Witness>,
}

pub fn check_uc2(
    l: &OrthoLogic,
    p: &StatePolytope,
    sample: &[AbstractState],
    tol: f64,
) -> Result<Uc2Report, StateError> {
    let mut cases = 0usize;
    for mu in sample {
        for e in l.elements() {
            if mu.value(e) <= tol {
                continue;
            }
            cases += 1;
            match conditional_probability(l, p, mu, e, tol) {
                Ok(_) => {}
                Err(ConditionalError::State(err)) => return Err(err),
                Err(failure @ (ConditionalError::NoConditionalState { .. }
                | ConditionalError::NonUnique { .. })) => {
                    return Ok(Uc2Report {
                        pass: false,
                        cases_checked: cases,
                        sample_description: sample_description(sample.len()),
                        witness: Some(Uc2Witness {
                            state_values: mu.values_f64(),
                            event: l.name(e).to_string(),
                            failure: failure.to_string(),
                        }),
                    });
                }
                Err(ConditionalError::NullEvent { .. }) => {}
            }
        }
    }
    Ok(Uc2Report {
        pass: true,
        cases_checked: cases,
        sample_description: sample_description(sample.len()),
        witness: None,
    })
}

fn sample_description(total: usize) -> String {
    format!("sample-relative: polytope vertices, vertex-pair midpoints and user states ({total} states)")
}

/// Combined unique-conditional-probability verdicts. UC1 is exact; UC2 is
/// relative to the checked state sample.
#[derive(Clone, Debug, Serialize)]
pub struct UcpReport {
    pub uc1: Uc1Report,
    pub uc2: Uc2Report,
    /// Both verdicts pass: a UCP space relative to the checked sample.
    pub is_ucp_space: bool,
    /// Informational: the UC axioms entail a state with μ(e) = 1 for every
    /// event e ≠ 0; this records whether the consequence holds here (decided
    /// exactly on the vertices), without reproving the implication.
    pub unit_state_for_every_nonzero_event: bool,
    pub event_without_unit_state: Option<String>,
}

pub fn check_ucp(
    l: &OrthoLogic,
    p: &StatePolytope,
    sample: &[AbstractState],
    tol: f64,
) -> Result<UcpReport, StateError> {
    let uc1 = check_uc1(l, p)?;
    let uc2 = check_uc2(l, p, sample, tol)?;
    let is_ucp_space = uc1.pass && uc2.pass;

    let verts = enumerate_vertex_states(p, VERTEX_CAP)?;
    let one = exact::q_int(1);
    let mut missing = None;
    for e in l.elements() {
        if e == l.zero() {
            continue;
        }
        if !verts.iter().any(|v| *v.value_exact(e) == one) {
            missing = Some(l.name(e).to_string());
            break;
        }
    }
    Ok(UcpReport {
        uc1,
        uc2,
        is_ucp_space,
        unit_state_for_every_nonzero_event: missing.is_none(),
        event_without_unit_state: missing,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Inclusion {
    Holds,
    Fails,
    Vacuous,
}

/// One instance of the support condition: does
/// {μ : μ(e) = 1} ⊆ {μ : μ(f) = 0} imply e ⊥ f?
#[derive(Clone, Debug, Serialize)]
pub struct SupportCheck {
    pub inclusion: Inclusion,
    pub orthogonal: bool,
    pub implication_holds: bool,
    /// max μ(f) subject to μ(e) = 1, when feasible.
    pub max_f_given_e: Option<f64>,
}

/// Decides the inclusion by maximizing μ(f) subject to μ(e) = 1 over the
/// polytope; an infeasible constraint set is a vacuous inclusion.
pub fn check_support_condition(
    l: &OrthoLogic,
    p: &StatePolytope,
    e: Elem,
    f: Elem,
) -> Result<SupportCheck, StateError> {
    let orthogonal = l.is_orth(e, f);
    let mut row = vec![Q::zero(); p.n];
    row[e.index()] = exact::q_int(1);
    let restricted = p.affine.restrict(&[(row, exact::q_int(1))]);
    let max_f = match restricted {
        None => None,
        Some(aff) => {
            let (lo, hi) = p.unit_box();
            let verts = exact::enumerate_vertices(&aff, &lo, &hi, VERTEX_CAP, BASIS_BUDGET)?;
            verts.into_iter().map(|v| v[f.index()].clone()).max()
        }
    };
    let inclusion = match &max_f {
        None => Inclusion::Vacuous,
        Some(m) if m.is_zero() => Inclusion::Holds,
        Some(_) => Inclusion::Fails,
    };
    let implication_holds = match inclusion {
        Inclusion::Fails => true,
        Inclusion::Holds | Inclusion::Vacuous => orthogonal,
    };
    Ok(SupportCheck {
        inclusion,
        orthogonal,
        implication_holds,
        max_f_given_e: max_f.as_ref().map(exact::q_to_f64),
    })
}

/// Aggregates the support condition over all ordered pairs.
#[derive(Clone, Debug, Serialize)]
pub struct SupportSweep {
    pub all_hold: bool,
    pub pairs_checked: usize,
    pub failures: Vec<(String, String)>,
}

pub fn support_condition_sweep(l: &OrthoLogic, p: &StatePolytope) -> Result<SupportSweep, StateError> {
    let mut failures = Vec::new();
    let mut pairs = 0usize;
    for e in l.elements() {
        for f in l.elements() {
            pairs += 1;
            let check = check_support_condition(l, p, e, f)?;
            if !check.implication_holds && failures.len() < 8 {
                failures.push((l.name(e).to_string(), l.name(f).to_string()));
            }
        }
    }
    Ok(SupportSweep { all_hold: failures.is_empty(), pairs_checked: pairs, failures })
}

/// The sweep sample: vertices, then midpoints of vertex pairs in index
/// order, then user states. Deterministic given the polytope and input.
pub fn state_sample(
    p: &StatePolytope,
    user: &[AbstractState],
) -> Result<Vec<AbstractState>, StateError> {
    let verts = enumerate_vertex_states(p, VERTEX_CAP)?;
    let mut sample = verts.clone();
    for i in 0..verts.len() {
        for j in (i + 1)..verts.len() {
            sample.push(verts[i].midpoint(&verts[j]));
        }
    }
    sample.extend(user.iter().cloned());
    Ok(sample)
}
