//! The five compatibility and comeasurability levels, defined uniformly over
//! a conditioning interface implemented by both backends:
//!
//! 1. influence freeness e → f (and its reverse),
//! 2. compatibility e ↔ f,
//! 3. weak comeasurability (the 16 symmetry identities over {e,e′,f,f′}),
//! 4. strong comeasurability (order independence of all three-step
//!    sequential measurement weights),
//! 5. algebraic compatibility (a common sixteen-element Boolean subalgebra).
//!
//! State-quantified verdicts are decided exactly on the Hilbert backend
//! (operator identities, linear in the density matrix) and by sweeping the
//! vertex/midpoint/user state sample on abstract backends, where they are
//! labeled sample-relative. The zero-product convention
//! μ(e)·μ_e(·) := 0 for μ(e) = 0 is centralized in the chain helpers.

use crate::hilbert::{self, DensityState, HilbertError, Projection};
use crate::logic::{self, Elem, OrthoLogic};
use crate::matrix;
use crate::states::{self, AbstractState, ConditionalError, StateError, StatePolytope};
use serde::Serialize;

#[derive(Debug, thiserror::Error)]
pub enum HierarchyError {
    #[error(transparent)]
    Hilbert(#[from] HilbertError),
    #[error(transparent)]
    Conditional(#[from] ConditionalError),
    #[error(transparent)]
    State(#[from] StateError),
    #[error("events {left} and {right} are not orthogonal")]
    NotOrthogonal { left: String, right: String },
    #[error("no joint distribution: the marginal identity fails with residual {residual:.6e}")]
    NoJointDistribution { residual: f64 },
    #[error("state-quantified verdict is undecidable: {context}")]
    Undecidable { context: String },
}

/// Conditioning interface shared by the Hilbert and abstract backends.
/// Everything the levels need: state evaluation, conditional states, the
/// event algebra, a d-quantification family and a "for all states" strategy.
pub trait Backend {
    type Event: Clone;
    type State: Clone;

    fn complement(&self, e: &Self::Event) -> Self::Event;
    fn unit_event(&self) -> Self::Event;
    fn zero_event(&self) -> Self::Event;
    fn value(&self, mu: &Self::State, e: &Self::Event) -> f64;
    fn condition(
        &self,
        mu: &Self::State,
        e: &Self::Event,
        tol: f64,
    ) -> Result<Self::State, HierarchyError>;
    fn is_orthogonal(&self, a: &Self::Event, b: &Self::Event, tol: f64) -> bool;
    fn orthogonal_sum(
        &self,
        a: &Self::Event,
        b: &Self::Event,
        tol: f64,
    ) -> Result<Self::Event, HierarchyError>;
    fn event_label(&self, e: &Self::Event) -> String;

    /// Quantification family for the strong level: exact by linearity on the
    /// Hilbert backend, the full element set on abstract backends.
    fn d_family(&self) -> Vec<Self::Event>;

    /// States swept by the default "for all states" deciders.
    fn sweep_states(&self) -> Vec<Self::State>;

    /// Whether for-all-states verdicts are exact or sample-relative.
    fn sweep_is_exact(&self) -> bool;

    fn decide_influence_all(
        &self,
        e: &Self::Event,
        f: &Self::Event,
        tol: f64,
    ) -> LevelOutcome<Self::State, Self::Event>
    where
        Self: Sized,
    {
        for mu in self.sweep_states() {
            match influence_in_state(self, &mu, e, f, tol) {
                Ok(check) if !check.holds => {
                    return LevelOutcome::fails_with_state(
                        mu,
                        self.sweep_is_exact(),
                        format!("residual {:.6e}", check.residual),
                    );
                }
                Ok(_) => {}
                Err(err) => return LevelOutcome::undecided(err.to_string()),
            }
        }
        LevelOutcome::holds(self.sweep_is_exact())
    }

    fn decide_weak_all(
        &self,
        e: &Self::Event,
        f: &Self::Event,
        tol: f64,
    ) -> LevelOutcome<Self::State, Self::Event>
    where
        Self: Sized,
    {
        for mu in self.sweep_states() {
            match weakly_comeasurable_in_state(self, &mu, e, f, tol) {
                Ok(check) if !check.holds => {
                    let (a, b) = check.witness_pair.unwrap_or_default();
                    return LevelOutcome::fails_with_state(
                        mu,
                        self.sweep_is_exact(),
                        format!("identity fails at (a,b) = ({a}, {b})"),
                    );
                }
                Ok(_) => {}
                Err(err) => return LevelOutcome::undecided(err.to_string()),
            }
        }
        LevelOutcome::holds(self.sweep_is_exact())
    }

    fn decide_strong_all(
        &self,
        e: &Self::Event,
        f: &Self::Event,
        tol: f64,
    ) -> LevelOutcome<Self::State, Self::Event>
    where
        Self: Sized,
    {
        for mu in self.sweep_states() {
            match strongly_comeasurable_in_state(self, &mu, e, f, tol) {
                Ok(check) if !check.holds => {
                    let witness = check.witness.expect("failing check carries a witness");
                    return LevelOutcome {
                        verdict: Verdict::Fails,
                        exact: self.sweep_is_exact(),
                        witness_state: Some(mu),
                        witness_event: Some(witness.d),
                        detail: Some(format!(
                            "chain weights differ at (a,b) = ({}, {}): {:.6} vs {:.6}",
                            witness.a_label, witness.b_label, witness.lhs, witness.rhs
                        )),
                    };
                }
                Ok(_) => {}
                Err(err) => return LevelOutcome::undecided(err.to_string()),
            }
        }
        LevelOutcome::holds(self.sweep_is_exact())
    }

    fn decide_algebraic(
        &self,
        e: &Self::Event,
        f: &Self::Event,
        tol: f64,
    ) -> AlgebraicOutcome<Self::Event>;
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Holds,
    Fails,
    Undecided,
}

/// Outcome of one state-quantified level, with the violating state (and for
/// the strong level the violating d) when it fails.
#[derive(Clone, Debug)]
pub struct LevelOutcome<S, E> {
    pub verdict: Verdict,
    /// Exact operator verdict versus sample-relative sweep.
    pub exact: bool,
    pub witness_state: Option<S>,
    pub witness_event: Option<E>,
    pub detail: Option<String>,
}

impl<S, E> LevelOutcome<S, E> {
    pub fn holds(exact: bool) -> Self {
        LevelOutcome { verdict: Verdict::Holds, exact, witness_state: None, witness_event: None, detail: None }
    }

    pub fn fails_with_state(state: S, exact: bool, detail: String) -> Self {
        LevelOutcome {
            verdict: Verdict::Fails,
            exact,
            witness_state: Some(state),
            witness_event: None,
            detail: Some(detail),
        }
    }

    pub fn undecided(detail: String) -> Self {
        LevelOutcome {
            verdict: Verdict::Undecided,
            exact: false,
            witness_state: None,
            witness_event: None,
            detail: Some(detail),
        }
    }

    pub fn holds_bool(&self) -> bool {
        self.verdict == Verdict::Holds
    }
}

/// Outcome of the algebraic level with the witness triple
/// (d₁, d₂, d₃) when present.
#[derive(Clone, Debug)]
pub struct AlgebraicOutcome<E> {
    pub verdict: Verdict,
    pub exact: bool,
    pub triple: Option<(E, E, E)>,
    pub detail: Option<String>,
}

impl<E> AlgebraicOutcome<E> {
    pub fn holds_bool(&self) -> bool {
        self.verdict == Verdict::Holds
    }
}

/// μ(a)·μ(b|a) with the zero-product convention.
pub fn sequential_product<B: Backend>(
    backend: &B,
    mu: &B::State,
    a: &B::Event,
    b: &B::Event,
    tol: f64,
) -> Result<f64, HierarchyError> {
    let pa = backend.value(mu, a);
    if pa <= tol {
        return Ok(0.0);
    }
    let mu_a = backend.condition(mu, a, tol)?;
    Ok(pa * backend.value(&mu_a, b))
}

/// μ(a)·μ_a(b)·(μ_a)_b(d) with the zero-product convention at every step.
pub fn sequential_chain<B: Backend>(
    backend: &B,
    mu: &B::State,
    a: &B::Event,
    b: &B::Event,
    d: &B::Event,
    tol: f64,
) -> Result<f64, HierarchyError> {
    let pa = backend.value(mu, a);
    if pa <= tol {
        return Ok(0.0);
    }
    let mu_a = backend.condition(mu, a, tol)?;
    let pb = backend.value(&mu_a, b);
    if pb <= tol {
        return Ok(0.0);
    }
    let mu_ab = backend.condition(&mu_a, b, tol)?;
    Ok(pa * pb * backend.value(&mu_ab, d))
}

/// The labeled quadruple {e, e′, f, f′}.
pub fn quadruple<B: Backend>(backend: &B, e: &B::Event, f: &B::Event) -> [(String, B::Event); 4] {
    [
        ("e".to_string(), e.clone()),
        ("e'".to_string(), backend.complement(e)),
        ("f".to_string(), f.clone()),
        ("f'".to_string(), backend.complement(f)),
    ]
}

#[derive(Clone, Debug, Serialize)]
pub struct InfluenceCheck {
    pub holds: bool,
    /// μ(f) − [μ(f|e)μ(e) + μ(f|e′)μ(e′)], signed.
    pub residual: f64,
}

/// e →_μ f: the total-probability identity holds in the state μ.
pub fn influence_in_state<B: Backend>(
    backend: &B,
    mu: &B::State,
    e: &B::Event,
    f: &B::Event,
    tol: f64,
) -> Result<InfluenceCheck, HierarchyError> {
    let ec = backend.complement(e);
    let lhs = backend.value(mu, f);
    let rhs = sequential_product(backend, mu, e, f, tol)?
        + sequential_product(backend, mu, &ec, f, tol)?;
    let residual = lhs - rhs;
    Ok(InfluenceCheck { holds: residual.abs() <= tol, residual })
}

/// A joint distribution over two successive yes/no measurements. The first
/// index is the outcome of the event measured first; `first_measured`
/// records which event that was.
#[derive(Clone, Debug, Serialize)]
pub struct JointDistribution {
    pub cells: [[f64; 2]; 2],
    pub first_measured: String,
}

impl JointDistribution {
    pub fn p(&self, k: usize, l: usize) -> f64 {
        self.cells[k][l]
    }

    pub fn total(&self) -> f64 {
        self.cells.iter().flatten().sum()
    }
}

/// Builds the joint distribution of (first, second) in μ from the four
/// sequential products. The first-marginal identity holds by construction;
/// the second-marginal identity is verified explicitly. Its failure is the
/// error case; it is equivalent to the failure of first →_μ second.
pub fn joint_distribution<B: Backend>(
    backend: &B,
    mu: &B::State,
    first: &B::Event,
    second: &B::Event,
    first_label: &str,
    tol: f64,
) -> Result<JointDistribution, HierarchyError> {
    let fc = backend.complement(first);
    let sc = backend.complement(second);
    let p11 = sequential_product(backend, mu, first, second, tol)?;
    let p10 = sequential_product(backend, mu, first, &sc, tol)?;
    let p01 = sequential_product(backend, mu, &fc, second, tol)?;
    let p00 = sequential_product(backend, mu, &fc, &sc, tol)?;
    let residual = p01 + p11 - backend.value(mu, second);
    if residual.abs() > tol {
        return Err(HierarchyError::NoJointDistribution { residual });
    }
    Ok(JointDistribution {
        cells: [[p00, p01], [p10, p11]],
        first_measured: first_label.to_string(),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct SymmetryCheck {
    pub holds: bool,
    pub lhs: f64,
    pub rhs: f64,
    pub residual: f64,
}

/// The symmetry identity
/// μ(e)μ(f′|e) + μ(e′)μ(f|e′) = μ(f)μ(e′|f) + μ(f′)μ(e|f′).
pub fn symmetry_condition<B: Backend>(
    backend: &B,
    mu: &B::State,
    e: &B::Event,
    f: &B::Event,
    tol: f64,
) -> Result<SymmetryCheck, HierarchyError> {
    let ec = backend.complement(e);
    let fc = backend.complement(f);
    let lhs = sequential_product(backend, mu, e, &fc, tol)?
        + sequential_product(backend, mu, &ec, f, tol)?;
    let rhs = sequential_product(backend, mu, f, &ec, tol)?
        + sequential_product(backend, mu, &fc, e, tol)?;
    let residual = lhs - rhs;
    Ok(SymmetryCheck { holds: residual.abs() <= tol, lhs, rhs, residual })
}

#[derive(Clone, Debug, Serialize)]
pub struct WeakCheck {
    pub holds: bool,
    pub max_residual: f64,
    pub witness_pair: Option<(String, String)>,
}

/// Per-event conditioning data reused across the 16 ordered pairs: μ(a) and
/// μ_a when μ(a) exceeds the null threshold.
type Conditioned<S> = Vec<(f64, Option<S>)>;

fn conditioned_family<B: Backend>(
    backend: &B,
    mu: &B::State,
    quad: &[(String, B::Event); 4],
    tol: f64,
) -> Result<Conditioned<B::State>, HierarchyError> {
    let mut out = Vec::with_capacity(4);
    for (_, a) in quad {
        let pa = backend.value(mu, a);
        if pa <= tol {
            out.push((pa, None));
        } else {
            out.push((pa, Some(backend.condition(mu, a, tol)?)));
        }
    }
    Ok(out)
}

/// Weak comeasurability in μ: μ(a)μ(b|a) = μ(b)μ(a|b) for all 16 ordered
/// pairs over the quadruple.
pub fn weakly_comeasurable_in_state<B: Backend>(
    backend: &B,
    mu: &B::State,
    e: &B::Event,
    f: &B::Event,
    tol: f64,
) -> Result<WeakCheck, HierarchyError> {
    let quad = quadruple(backend, e, f);
    let family = conditioned_family(backend, mu, &quad, tol)?;
    let product = |i: usize, j: usize| -> f64 {
        match &family[i].1 {
            None => 0.0,
            Some(mu_a) => family[i].0 * backend.value(mu_a, &quad[j].1),
        }
    };
    let mut max_residual = 0.0f64;
    let mut witness = None;
    for i in 0..4 {
        for j in 0..4 {
            let r = (product(i, j) - product(j, i)).abs();
            if r > max_residual {
                max_residual = r;
                if r > tol {
                    witness = Some((quad[i].0.clone(), quad[j].0.clone()));
                }
            }
        }
    }
    Ok(WeakCheck { holds: max_residual <= tol, max_residual, witness_pair: witness })
}

#[derive(Clone, Debug)]
pub struct StrongWitness<E> {
    pub a_label: String,
    pub b_label: String,
    pub d: E,
    pub lhs: f64,
    pub rhs: f64,
}

#[derive(Clone, Debug)]
pub struct StrongCheck<E> {
    pub holds: bool,
    pub max_residual: f64,
    pub witness: Option<StrongWitness<E>>,
}

/// Strong comeasurability in μ: μ(a)μ_a(b)(μ_a)_b(d) = μ(b)μ_b(a)(μ_b)_a(d)
/// for all a, b in the quadruple and all d in the backend's quantification
/// family.
pub fn strongly_comeasurable_in_state<B: Backend>(
    backend: &B,
    mu: &B::State,
    e: &B::Event,
    f: &B::Event,
    tol: f64,
) -> Result<StrongCheck<B::Event>, HierarchyError> {
    let quad = quadruple(backend, e, f);
    let first = conditioned_family(backend, mu, &quad, tol)?;
    // two-step weights and final states per ordered pair (a, b); None means
    // the chain weight is zero by the convention
    type ChainRow<S> = Vec<Option<(f64, S)>>;
    let mut table: Vec<ChainRow<B::State>> = Vec::with_capacity(4);
    for (pa, mu_a) in &first {
        let mut row = Vec::with_capacity(4);
        for (_, b) in &quad {
            match mu_a {
                None => row.push(None),
                Some(state_a) => {
                    let pb = backend.value(state_a, b);
                    if pb <= tol {
                        row.push(None);
                    } else {
                        row.push(Some((pa * pb, backend.condition(state_a, b, tol)?)));
                    }
                }
            }
        }
        table.push(row);
    }
    let chain = |i: usize, j: usize, d: &B::Event| -> f64 {
        match &table[i][j] {
            None => 0.0,
            Some((w, state_ab)) => w * backend.value(state_ab, d),
        }
    };

    let family = backend.d_family();
    let mut max_residual = 0.0f64;
    let mut witness = None;
    for i in 0..4 {
        for j in 0..4 {
            for d in &family {
                let lhs = chain(i, j, d);
                let rhs = chain(j, i, d);
                let r = (lhs - rhs).abs();
                if r > max_residual {
                    max_residual = r;
                    if r > tol && witness.is_none() {
                        witness = Some(StrongWitness {
                            a_label: quad[i].0.clone(),
                            b_label: quad[j].0.clone(),
                            d: d.clone(),
                            lhs,
                            rhs,
                        });
                    }
                }
            }
        }
    }
    // keep the first violation as witness but report the worst residual
    Ok(StrongCheck { holds: max_residual <= tol, max_residual, witness })
}

/// The three Lemma-1 ingredients evaluated independently, plus the
/// biconditional (i) ⟺ (ii) ∧ (iii) and the p/q exchange diagnostic.
#[derive(Clone, Debug, Serialize)]
pub struct Lemma1Check {
    /// (i) weak comeasurability in μ.
    pub weak: bool,
    /// (ii) e ↔_μ f.
    pub relative_compat: bool,
    /// (iii) the symmetry identity in μ.
    pub symmetry: bool,
    pub consistent: bool,
    /// max |p(k,l) − q(l,k)| when both joint distributions exist.
    pub pq_swap_residual: Option<f64>,
}

pub fn lemma1_equivalence<B: Backend>(
    backend: &B,
    mu: &B::State,
    e: &B::Event,
    f: &B::Event,
    tol: f64,
) -> Result<Lemma1Check, HierarchyError> {
    let weak = weakly_comeasurable_in_state(backend, mu, e, f, tol)?.holds;
    let fwd = influence_in_state(backend, mu, e, f, tol)?.holds;
    let rev = influence_in_state(backend, mu, f, e, tol)?.holds;
    let relative_compat = fwd && rev;
    let symmetry = symmetry_condition(backend, mu, e, f, tol)?.holds;
    let consistent = weak == (relative_compat && symmetry);

    let pq_swap_residual = if relative_compat {
        let p = joint_distribution(backend, mu, e, f, "e", tol)?;
        let q = joint_distribution(backend, mu, f, e, "f", tol)?;
        let mut worst = 0.0f64;
        for k in 0..2 {
            for l in 0..2 {
                worst = worst.max((p.p(k, l) - q.p(l, k)).abs());
            }
        }
        Some(worst)
    } else {
        None
    };

    Ok(Lemma1Check { weak, relative_compat, symmetry, consistent, pq_swap_residual })
}

/// Both residuals of the three-way identity
/// μ(e)μ_e(f)(μ_e)_f(a) = μ(d₂)μ_{d₂}(a) = μ(f)μ_f(e)(μ_f)_e(a)
/// for e = d₁+d₂ and f = d₂+d₃ with pairwise orthogonal parts.
pub fn lemma2_check<B: Backend>(
    backend: &B,
    mu: &B::State,
    d1: &B::Event,
    d2: &B::Event,
    d3: &B::Event,
    a: &B::Event,
    tol: f64,
) -> Result<(f64, f64), HierarchyError> {
    for (x, y) in [(d1, d2), (d1, d3), (d2, d3)] {
        if !backend.is_orthogonal(x, y, tol) {
            return Err(HierarchyError::NotOrthogonal {
                left: backend.event_label(x),
                right: backend.event_label(y),
            });
        }
    }
    let e = backend.orthogonal_sum(d1, d2, tol)?;
    let f = backend.orthogonal_sum(d2, d3, tol)?;
    let middle = sequential_product(backend, mu, d2, a, tol)?;
    let via_e = sequential_chain(backend, mu, &e, &f, a, tol)?;
    let via_f = sequential_chain(backend, mu, &f, &e, a, tol)?;
    Ok(((via_e - middle).abs(), (via_f - middle).abs()))
}

/// The Lemma-3 chain evaluated on a pair: (i) weak comeasurability with an
/// and-event matching μ(e)μ_e(f) on all swept states, (ii) strong
/// comeasurability with the chain identity, (iii) algebraic compatibility.
#[derive(Clone, Debug, Serialize)]
pub struct Lemma3Chain {
    pub i_weak_with_event: bool,
    pub ii_strong_with_event: bool,
    pub iii_algebraic: bool,
    pub consistent: bool,
}

/// Result of the and-operation search: the candidate event d (absent when no
/// event matches) and the Lemma-3 chain verdicts. Assumes the support
/// condition has been verified for abstract backends.
#[derive(Clone, Debug)]
pub struct AndCandidate<E> {
    pub d: Option<E>,
    pub chain: Lemma3Chain,
}

pub trait AndSearch: Backend {
    /// Finds an event d with μ(e)μ_e(f) = μ(f)μ_f(e) = μ(d) across the
    /// backend's state strategy. Errors when the search cannot be evaluated
    /// (non-unique conditioning, dimension mismatch).
    fn find_and_event(
        &self,
        e: &Self::Event,
        f: &Self::Event,
        tol: f64,
    ) -> Result<Option<Self::Event>, HierarchyError>;
}

pub fn and_candidate<B: AndSearch>(
    backend: &B,
    e: &B::Event,
    f: &B::Event,
    tol: f64,
) -> Result<AndCandidate<B::Event>, HierarchyError> {
    let d = backend.find_and_event(e, f, tol)?;

    let weak_outcome = backend.decide_weak_all(e, f, tol);
    let strong_outcome = backend.decide_strong_all(e, f, tol);
    for outcome in [&weak_outcome, &strong_outcome] {
        if outcome.verdict == Verdict::Undecided {
            return Err(HierarchyError::Undecidable {
                context: outcome
                    .detail
                    .clone()
                    .unwrap_or_else(|| "a for-all-states sweep could not be evaluated".to_string()),
            });
        }
    }
    let weak_all = weak_outcome.holds_bool();
    let strong_all = strong_outcome.holds_bool();
    let algebraic = backend.decide_algebraic(e, f, tol).holds_bool();

    let mut chain_ok_weak = d.is_some() && weak_all;
    let mut chain_ok_strong = d.is_some() && strong_all;
    if let Some(d_event) = &d {
        // (ii) also requires μ(e)μ_e(f)(μ_e)_f(a) = μ(d)μ_d(a) for all a, μ
        'outer: for mu in backend.sweep_states() {
            // hoist both chain prefixes out of the a-loop
            let ef_prefix = {
                let pe = backend.value(&mu, e);
                if pe <= tol {
                    None
                } else {
                    let mu_e = backend.condition(&mu, e, tol)?;
                    let pf = backend.value(&mu_e, f);
                    if pf <= tol {
                        None
                    } else {
                        Some((pe * pf, backend.condition(&mu_e, f, tol)?))
                    }
                }
            };
            let d_prefix = {
                let pd = backend.value(&mu, d_event);
                if pd <= tol {
                    None
                } else {
                    Some((pd, backend.condition(&mu, d_event, tol)?))
                }
            };
            for a in backend.d_family() {
                let lhs = ef_prefix.as_ref().map_or(0.0, |(w, st)| w * backend.value(st, &a));
                let rhs = d_prefix.as_ref().map_or(0.0, |(w, st)| w * backend.value(st, &a));
                if (lhs - rhs).abs() > tol {
                    chain_ok_strong = false;
                    break 'outer;
                }
            }
            // (i) requires μ(e)μ_e(f) = μ(d)
            let prod = ef_prefix.as_ref().map_or(0.0, |(w, _)| *w);
            if (prod - backend.value(&mu, d_event)).abs() > tol {
                chain_ok_weak = false;
                break;
            }
        }
    }

    let i = chain_ok_weak;
    let ii = chain_ok_strong;
    let iii = algebraic;
    Ok(AndCandidate {
        d,
        chain: Lemma3Chain {
            i_weak_with_event: i,
            ii_strong_with_event: ii,
            iii_algebraic: iii,
            consistent: i == ii && ii == iii,
        },
    })
}

/// e → f for all states, decided by the backend's strategy.
pub fn influence_all<B: Backend>(
    backend: &B,
    e: &B::Event,
    f: &B::Event,
    tol: f64,
) -> LevelOutcome<B::State, B::Event> {
    backend.decide_influence_all(e, f, tol)
}

/// e ↔ f: influence freeness in both directions for all states.
pub fn compatible<B: Backend>(
    backend: &B,
    e: &B::Event,
    f: &B::Event,
    tol: f64,
) -> LevelOutcome<B::State, B::Event> {
    let fwd = backend.decide_influence_all(e, f, tol);
    if fwd.verdict == Verdict::Fails {
        return fwd;
    }
    let rev = backend.decide_influence_all(f, e, tol);
    if rev.verdict == Verdict::Fails {
        return rev;
    }
    match (fwd.verdict, rev.verdict) {
        (Verdict::Holds, Verdict::Holds) => LevelOutcome::holds(fwd.exact && rev.exact),
        _ => LevelOutcome::undecided("one direction undecided".to_string()),
    }
}

/// The assembled five-level verdicts for one event pair.
#[derive(Clone, Debug)]
pub struct CompatReport<S, E> {
    pub l1_forward: LevelOutcome<S, E>,
    pub l1_reverse: LevelOutcome<S, E>,
    pub l2_compatible: LevelOutcome<S, E>,
    pub l3_weak: LevelOutcome<S, E>,
    pub l4_strong: LevelOutcome<S, E>,
    pub l5_algebraic: AlgebraicOutcome<E>,
    /// Whether any state-quantified verdict is sample-relative.
    pub sample_relative: bool,
    /// The hierarchy chain L5 ⟹ L4 ⟹ L3 ⟹ L2 ⟹ L1 ∧ L1ʳ among decided
    /// verdicts; a violation indicates a defect, never valid data.
    pub monotone: bool,
}

impl<S, E> CompatReport<S, E> {
    pub fn verdicts(&self) -> [Verdict; 6] {
        [
            self.l1_forward.verdict,
            self.l1_reverse.verdict,
            self.l2_compatible.verdict,
            self.l3_weak.verdict,
            self.l4_strong.verdict,
            self.l5_algebraic.verdict,
        ]
    }

    pub fn all_hold(&self) -> bool {
        self.verdicts().iter().all(|v| *v == Verdict::Holds)
    }

    pub fn all_fail(&self) -> bool {
        self.verdicts().iter().all(|v| *v == Verdict::Fails)
    }
}

fn implies(a: Verdict, b: Verdict) -> bool {
    !(a == Verdict::Holds && b == Verdict::Fails)
}

/// Runs all five levels and assembles the report.
pub fn classify<B: Backend>(
    backend: &B,
    e: &B::Event,
    f: &B::Event,
    tol: f64,
) -> CompatReport<B::State, B::Event> {
    let l1_forward = backend.decide_influence_all(e, f, tol);
    let l1_reverse = backend.decide_influence_all(f, e, tol);
    let l2_compatible = match (l1_forward.verdict, l1_reverse.verdict) {
        (Verdict::Holds, Verdict::Holds) => LevelOutcome::holds(l1_forward.exact && l1_reverse.exact),
        (Verdict::Fails, _) => l1_forward.clone(),
        (_, Verdict::Fails) => l1_reverse.clone(),
        _ => LevelOutcome::undecided("one direction undecided".to_string()),
    };
    let l3_weak = backend.decide_weak_all(e, f, tol);
    let l4_strong = backend.decide_strong_all(e, f, tol);
    let l5_algebraic = backend.decide_algebraic(e, f, tol);

    let both_l1 = match (l1_forward.verdict, l1_reverse.verdict) {
        (Verdict::Holds, Verdict::Holds) => Verdict::Holds,
        (Verdict::Fails, _) | (_, Verdict::Fails) => Verdict::Fails,
        _ => Verdict::Undecided,
    };
    let monotone = implies(l5_algebraic.verdict, l4_strong.verdict)
        && implies(l4_strong.verdict, l3_weak.verdict)
        && implies(l3_weak.verdict, l2_compatible.verdict)
        && implies(l2_compatible.verdict, both_l1);

    let sample_relative = !(l1_forward.exact
        && l1_reverse.exact
        && l3_weak.exact
        && l4_strong.exact
        && l5_algebraic.exact);

    CompatReport {
        l1_forward,
        l1_reverse,
        l2_compatible,
        l3_weak,
        l4_strong,
        l5_algebraic,
        sample_relative,
        monotone,
    }
}

// ---------------------------------------------------------------------------
// Hilbert backend
// ---------------------------------------------------------------------------

/// Backend over density matrices of one dimension. State-quantified levels
/// are decided by operator identities, which are exact; witnesses are pure
/// states built from a dominant eigenvector of the residual operator.
#[derive(Clone, Copy, Debug)]
pub struct HilbertBackend {
    dim: usize,
}

impl HilbertBackend {
    pub fn new(dim: usize) -> Self {
        HilbertBackend { dim }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    fn witness_from_residual(&self, residual: &crate::matrix::CMat) -> Option<(f64, DensityState)> {
        let (lam, vec) = matrix::dominant_eigenpair(residual)?;
        let rho = DensityState::normalized_unchecked(matrix::outer_normalized(&vec));
        Some((lam, rho))
    }
}

impl Backend for HilbertBackend {
    type Event = Projection;
    type State = DensityState;

    fn complement(&self, e: &Projection) -> Projection {
        e.complement()
    }

    fn unit_event(&self) -> Projection {
        Projection::one(self.dim)
    }

    fn zero_event(&self) -> Projection {
        Projection::zero(self.dim)
    }

    fn value(&self, mu: &DensityState, e: &Projection) -> f64 {
        mu.expect(e)
    }

    fn condition(
        &self,
        mu: &DensityState,
        e: &Projection,
        tol: f64,
    ) -> Result<DensityState, HierarchyError> {
        Ok(hilbert::lueders_condition(mu, e, tol)?)
    }

    fn is_orthogonal(&self, a: &Projection, b: &Projection, tol: f64) -> bool {
        matrix::fro_norm(&(a.matrix() * b.matrix())) <= tol
    }

    fn orthogonal_sum(
        &self,
        a: &Projection,
        b: &Projection,
        tol: f64,
    ) -> Result<Projection, HierarchyError> {
        if !self.is_orthogonal(a, b, tol) {
            return Err(HierarchyError::NotOrthogonal {
                left: self.event_label(a),
                right: self.event_label(b),
            });
        }
        let slack = (tol * 8.0).max(hilbert::VALIDATION_TOL);
        Ok(Projection::new(a.matrix() + b.matrix(), slack)?)
    }

    fn event_label(&self, e: &Projection) -> String {
        format!("projection(dim {}, rank {:.0})", e.dim(), e.rank_estimate())
    }

    fn d_family(&self) -> Vec<Projection> {
        hilbert::spanning_projection_family(self.dim)
    }

    fn sweep_states(&self) -> Vec<DensityState> {
        Vec::new() // unused: the level deciders are operator-exact
    }

    fn sweep_is_exact(&self) -> bool {
        true
    }

    fn decide_influence_all(
        &self,
        e: &Projection,
        f: &Projection,
        tol: f64,
    ) -> LevelOutcome<DensityState, Projection> {
        let residual = match hilbert::influence_defect_operator(e, f) {
            Ok(r) => r,
            Err(err) => return LevelOutcome::undecided(err.to_string()),
        };
        let norm = matrix::fro_norm(&residual);
        if norm <= tol {
            return LevelOutcome::holds(true);
        }
        match self.witness_from_residual(&residual) {
            Some((lam, rho)) => LevelOutcome::fails_with_state(
                rho,
                true,
                format!("operator defect ‖f − (efe + e'fe')‖ = {norm:.6e}; witness residual {lam:.6}"),
            ),
            None => LevelOutcome::fails_with_state(
                DensityState::maximally_mixed(self.dim),
                true,
                format!("operator defect {norm:.6e}"),
            ),
        }
    }

    fn decide_weak_all(
        &self,
        e: &Projection,
        f: &Projection,
        tol: f64,
    ) -> LevelOutcome<DensityState, Projection> {
        let quad = quadruple(self, e, f);
        let mut worst: Option<(f64, crate::matrix::CMat, String, String)> = None;
        for (la, a) in &quad {
            for (lb, b) in &quad {
                let aba = a.matrix() * b.matrix() * a.matrix();
                let bab = b.matrix() * a.matrix() * b.matrix();
                let residual = &aba - &bab;
                let norm = matrix::fro_norm(&residual);
                if worst.as_ref().map(|(w, ..)| norm > *w).unwrap_or(true) {
                    worst = Some((norm, residual, la.clone(), lb.clone()));
                }
            }
        }
        let (norm, residual, la, lb) = worst.expect("quadruple is nonempty");
        if norm <= tol {
            return LevelOutcome::holds(true);
        }
        match self.witness_from_residual(&residual) {
            Some((_, rho)) => LevelOutcome::fails_with_state(
                rho,
                true,
                format!("‖aba − bab‖ = {norm:.6e} at (a,b) = ({la}, {lb})"),
            ),
            None => LevelOutcome::undecided("degenerate residual".to_string()),
        }
    }

    fn decide_strong_all(
        &self,
        e: &Projection,
        f: &Projection,
        tol: f64,
    ) -> LevelOutcome<DensityState, Projection> {
        let quad = quadruple(self, e, f);
        let family = self.d_family();
        let mut worst: Option<(f64, crate::matrix::CMat, Projection, String, String)> = None;
        for (la, a) in &quad {
            for (lb, b) in &quad {
                let ab = a.matrix() * b.matrix();
                let ba = b.matrix() * a.matrix();
                for d in &family {
                    let lhs = &ab * d.matrix() * &ba;
                    let rhs = &ba * d.matrix() * &ab;
                    let residual = lhs - rhs;
                    let norm = matrix::fro_norm(&residual);
                    if worst.as_ref().map(|(w, ..)| norm > *w).unwrap_or(true) {
                        worst = Some((norm, residual, d.clone(), la.clone(), lb.clone()));
                    }
                }
            }
        }
        let (norm, residual, d, la, lb) = worst.expect("family is nonempty");
        if norm <= tol {
            return LevelOutcome::holds(true);
        }
        match self.witness_from_residual(&residual) {
            Some((_, rho)) => LevelOutcome {
                verdict: Verdict::Fails,
                exact: true,
                witness_state: Some(rho),
                witness_event: Some(d),
                detail: Some(format!(
                    "‖abdba − badab‖ = {norm:.6e} at (a,b) = ({la}, {lb})"
                )),
            },
            None => LevelOutcome::undecided("degenerate residual".to_string()),
        }
    }

    fn decide_algebraic(
        &self,
        e: &Projection,
        f: &Projection,
        tol: f64,
    ) -> AlgebraicOutcome<Projection> {
        match hilbert::algebraic_decomposition(e, f, tol) {
            Ok(Some((d1, d2, d3))) => AlgebraicOutcome {
                verdict: Verdict::Holds,
                exact: true,
                triple: Some((d1, d2, d3)),
                detail: None,
            },
            Ok(None) => AlgebraicOutcome {
                verdict: Verdict::Fails,
                exact: true,
                triple: None,
                detail: Some("events do not commute".to_string()),
            },
            Err(err) => AlgebraicOutcome {
                verdict: Verdict::Undecided,
                exact: false,
                triple: None,
                detail: Some(err.to_string()),
            },
        }
    }
}

impl AndSearch for HilbertBackend {
    fn find_and_event(
        &self,
        e: &Projection,
        f: &Projection,
        tol: f64,
    ) -> Result<Option<Projection>, HierarchyError> {
        if hilbert::commutes(e, f, tol)? {
            let slack = (tol * 8.0).max(hilbert::VALIDATION_TOL);
            Ok(Some(Projection::new(e.matrix() * f.matrix(), slack)?))
        } else {
            Ok(None)
        }
    }
}

// ---------------------------------------------------------------------------
// Abstract backend
// ---------------------------------------------------------------------------

/// Backend over an abstract logic and its state polytope. "For all states"
/// sweeps run over the vertex + midpoint + user sample and are
/// sample-relative; the algebraic level is an exact exhaustive search.
///
/// Conditioning results are memoized per (state, event, tol), since the
/// sweeps revisit the same small state set constantly; the cache makes this
/// type single-threaded.
pub struct AbstractBackend<'a> {
    logic: &'a OrthoLogic,
    polytope: &'a StatePolytope,
    sample: Vec<AbstractState>,
    cache: std::cell::RefCell<ConditionCache>,
}

type ConditionCache = std::collections::HashMap<
    (Vec<crate::exact::Q>, usize, u64),
    Result<AbstractState, ConditionalError>,
>;

impl<'a> AbstractBackend<'a> {
    pub fn new(
        logic: &'a OrthoLogic,
        polytope: &'a StatePolytope,
        user_states: &[AbstractState],
    ) -> Result<Self, StateError> {
        let sample = states::state_sample(polytope, user_states)?;
        Ok(AbstractBackend {
            logic,
            polytope,
            sample,
            cache: std::cell::RefCell::new(std::collections::HashMap::new()),
        })
    }

    pub fn logic(&self) -> &OrthoLogic {
        self.logic
    }

    pub fn polytope(&self) -> &StatePolytope {
        self.polytope
    }

    pub fn sample(&self) -> &[AbstractState] {
        &self.sample
    }
}

impl Backend for AbstractBackend<'_> {
    type Event = Elem;
    type State = AbstractState;

    fn complement(&self, e: &Elem) -> Elem {
        self.logic.ocomp(*e)
    }

    fn unit_event(&self) -> Elem {
        self.logic.one()
    }

    fn zero_event(&self) -> Elem {
        self.logic.zero()
    }

    fn value(&self, mu: &AbstractState, e: &Elem) -> f64 {
        mu.value(*e)
    }

    fn condition(
        &self,
        mu: &AbstractState,
        e: &Elem,
        tol: f64,
    ) -> Result<AbstractState, HierarchyError> {
        let key = (mu.values_exact().to_vec(), e.index(), tol.to_bits());
        if let Some(hit) = self.cache.borrow().get(&key) {
            return hit.clone().map_err(HierarchyError::from);
        }
        let result = states::conditional_probability(self.logic, self.polytope, mu, *e, tol);
        self.cache.borrow_mut().insert(key, result.clone());
        Ok(result?)
    }

    fn is_orthogonal(&self, a: &Elem, b: &Elem, _tol: f64) -> bool {
        self.logic.is_orth(*a, *b)
    }

    fn orthogonal_sum(&self, a: &Elem, b: &Elem, _tol: f64) -> Result<Elem, HierarchyError> {
        self.logic.sum(*a, *b).ok_or_else(|| HierarchyError::NotOrthogonal {
            left: self.event_label(a),
            right: self.event_label(b),
        })
    }

    fn event_label(&self, e: &Elem) -> String {
        self.logic.name(*e).to_string()
    }

    fn d_family(&self) -> Vec<Elem> {
        self.logic.elements().collect()
    }

    fn sweep_states(&self) -> Vec<AbstractState> {
        self.sample.clone()
    }

    fn sweep_is_exact(&self) -> bool {
        false
    }

    fn decide_algebraic(&self, e: &Elem, f: &Elem, _tol: f64) -> AlgebraicOutcome<Elem> {
        match logic::find_algebraic_compatibility(self.logic, *e, *f) {
            Some((d1, d2, d3)) => AlgebraicOutcome {
                verdict: Verdict::Holds,
                exact: true,
                triple: Some((d1, d2, d3)),
                detail: None,
            },
            None => AlgebraicOutcome {
                verdict: Verdict::Fails,
                exact: true,
                triple: None,
                detail: Some("no orthogonal decomposition exists".to_string()),
            },
        }
    }
}

impl AndSearch for AbstractBackend<'_> {
    fn find_and_event(&self, e: &Elem, f: &Elem, tol: f64) -> Result<Option<Elem>, HierarchyError> {
        'candidates: for d in self.logic.elements() {
            for mu in &self.sample {
                let ef = sequential_product(self, mu, e, f, tol)?;
                let fe = sequential_product(self, mu, f, e, tol)?;
                let pd = mu.value(d);
                if (ef - pd).abs() > tol || (fe - pd).abs() > tol {
                    continue 'candidates;
                }
            }
            return Ok(Some(d));
        }
        Ok(None)
    }
}
