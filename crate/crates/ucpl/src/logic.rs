//! Finite abstract event structures: a set with distinguished 0 and 1, an
//! orthocomplementation, an orthogonality relation and a partial sum defined
//! on orthogonal pairs. No order relation and no lattice structure is
//! assumed; the sum table is explicit and primitive.
//!
//! Instances are allowed to be broken: the axiom checks report failures as
//! data with witnesses, they do not reject at construction.

use serde::Serialize;
use std::collections::{BTreeMap, BTreeSet};

#[derive(Debug, thiserror::Error)]
pub enum LogicError {
    #[error("duplicate element name `{0}`")]
    DuplicateName(String),
    #[error("unknown element `{0}`")]
    UnknownElement(String),
    #[error("element index {index} out of range for {len} elements")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("orthocomplement table has {got} entries for {expected} elements")]
    BadComplementTable { got: usize, expected: usize },
    #[error("sum table entry for a pair that is not in the orthogonality relation: ({0}, {1})")]
    SumOffRelation(String, String),
    #[error("generators are not pairwise orthogonal: ({0}, {1})")]
    GeneratorsNotOrthogonal(String, String),
    #[error("required sum {0} + {1} is not defined")]
    SumMissing(String, String),
}

/// Index of an element within its logic.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Elem(usize);

impl Elem {
    pub fn index(self) -> usize {
        self.0
    }
}

/// A finite abstract event structure.
#[derive(Clone, Debug)]
pub struct OrthoLogic {
    names: Vec<String>,
    zero: Elem,
    one: Elem,
    ocomp: Vec<Elem>,
    orth: BTreeSet<(usize, usize)>,
    sum: BTreeMap<(usize, usize), Elem>,
}

impl OrthoLogic {
    /// Builds a logic from raw index tables. Only shape is checked here;
    /// the OS axioms are a separate, failure-reporting validation.
    pub fn from_tables(
        names: Vec<String>,
        zero: usize,
        one: usize,
        ocomp: Vec<usize>,
        orth: impl IntoIterator<Item = (usize, usize)>,
        sums: impl IntoIterator<Item = ((usize, usize), usize)>,
    ) -> Result<Self, LogicError> {
        let n = names.len();
        let mut seen = BTreeSet::new();
        for name in &names {
            if !seen.insert(name.clone()) {
                return Err(LogicError::DuplicateName(name.clone()));
            }
        }
        let check = |i: usize| {
            if i >= n {
                Err(LogicError::IndexOutOfRange { index: i, len: n })
            } else {
                Ok(Elem(i))
            }
        };
        let zero = check(zero)?;
        let one = check(one)?;
        if ocomp.len() != n {
            return Err(LogicError::BadComplementTable { got: ocomp.len(), expected: n });
        }
        let ocomp = ocomp.into_iter().map(check).collect::<Result<Vec<_>, _>>()?;
        let mut orth_set = BTreeSet::new();
        for (a, b) in orth {
            check(a)?;
            check(b)?;
            orth_set.insert((a, b));
        }
        let mut sum_map = BTreeMap::new();
        for ((a, b), s) in sums {
            check(a)?;
            check(b)?;
            sum_map.insert((a, b), check(s)?);
        }
        Ok(OrthoLogic { names, zero, one, ocomp, orth: orth_set, sum: sum_map })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn elements(&self) -> impl Iterator<Item = Elem> + '_ {
        (0..self.names.len()).map(Elem)
    }

    pub fn elem(&self, index: usize) -> Option<Elem> {
        (index < self.names.len()).then_some(Elem(index))
    }

    pub fn by_name(&self, name: &str) -> Option<Elem> {
        self.names.iter().position(|n| n == name).map(Elem)
    }

    pub fn name(&self, e: Elem) -> &str {
        &self.names[e.0]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn zero(&self) -> Elem {
        self.zero
    }

    pub fn one(&self) -> Elem {
        self.one
    }

    pub fn ocomp(&self, e: Elem) -> Elem {
        self.ocomp[e.0]
    }

    pub fn is_orth(&self, e: Elem, f: Elem) -> bool {
        self.orth.contains(&(e.0, f.0))
    }

    pub fn sum(&self, e: Elem, f: Elem) -> Option<Elem> {
        self.sum.get(&(e.0, f.0)).copied()
    }

    /// Ordered orthogonal pairs exactly as stored.
    pub fn orth_pairs(&self) -> impl Iterator<Item = (Elem, Elem)> + '_ {
        self.orth.iter().map(|&(a, b)| (Elem(a), Elem(b)))
    }

    /// Unordered orthogonal pairs (a ≤ b), including the diagonal if present.
    pub fn orth_pairs_unordered(&self) -> Vec<(Elem, Elem)> {
        let mut out = BTreeSet::new();
        for &(a, b) in &self.orth {
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            out.insert((lo, hi));
        }
        out.into_iter().map(|(a, b)| (Elem(a), Elem(b))).collect()
    }

    pub fn sum_entries(&self) -> impl Iterator<Item = (Elem, Elem, Elem)> + '_ {
        self.sum.iter().map(|(&(a, b), &s)| (Elem(a), Elem(b), s))
    }

    /// The derived relation e ≤ f :⟺ e ⊥ f′.
    pub fn derived_order(&self, e: Elem, f: Elem) -> bool {
        self.is_orth(e, self.ocomp(f))
    }
}

/// A witness tuple for one axiom violation.
#[derive(Clone, Debug, Serialize)]
pub struct AxiomWitness {
    pub elements: Vec<String>,
    pub detail: String,
}

/// Verdict for a single axiom with up to [`MAX_WITNESSES`] witnesses.
#[derive(Clone, Debug, Serialize)]
pub struct AxiomCheck {
    pub pass: bool,
    pub violations: usize,
    pub witnesses: Vec<AxiomWitness>,
}

pub const MAX_WITNESSES: usize = 8;

impl AxiomCheck {
    fn new() -> Self {
        AxiomCheck { pass: true, violations: 0, witnesses: Vec::new() }
    }

    fn violate(&mut self, elements: Vec<String>, detail: impl Into<String>) {
        self.pass = false;
        self.violations += 1;
        if self.witnesses.len() < MAX_WITNESSES {
            self.witnesses.push(AxiomWitness { elements, detail: detail.into() });
        }
    }
}

/// Exhaustive verdicts for the six orthologic axioms.
#[derive(Clone, Debug, Serialize)]
pub struct AxiomReport {
    pub os1_symmetry: AxiomCheck,
    pub os2_sum_domain: AxiomCheck,
    pub os3_associativity: AxiomCheck,
    pub os4_zero: AxiomCheck,
    pub os5_unique_complement: AxiomCheck,
    pub os6_difference: AxiomCheck,
    /// Pairs (e, f) for which the difference d in the sixth axiom is not
    /// unique. Existence is all the axiom asks; uniqueness only follows in a
    /// UCP space, so this is a flag, not a failure.
    pub non_unique_differences: Vec<(String, String)>,
}

impl AxiomReport {
    pub fn all_pass(&self) -> bool {
        self.checks().iter().all(|c| c.pass)
    }

    pub fn checks(&self) -> [&AxiomCheck; 6] {
        [
            &self.os1_symmetry,
            &self.os2_sum_domain,
            &self.os3_associativity,
            &self.os4_zero,
            &self.os5_unique_complement,
            &self.os6_difference,
        ]
    }
}

/// Checks OS1–OS6 exhaustively over the finite element set. Failures are
/// data with witness tuples, not errors.
pub fn validate_axioms(l: &OrthoLogic) -> AxiomReport {
    let nm = |e: Elem| l.name(e).to_string();

    let mut os1 = AxiomCheck::new();
    for (e, f) in l.orth_pairs() {
        if !l.is_orth(f, e) {
            os1.violate(vec![nm(e), nm(f)], "e ⊥ f holds but f ⊥ e does not");
        }
    }

    let mut os2 = AxiomCheck::new();
    for (e, f) in l.orth_pairs() {
        match l.sum(e, f) {
            None => os2.violate(vec![nm(e), nm(f)], "orthogonal pair without a defined sum"),
            Some(s) => {
                if let Some(s2) = l.sum(f, e) {
                    if s2 != s {
                        os2.violate(
                            vec![nm(e), nm(f)],
                            format!("sum not commutative: {} vs {}", nm(s), nm(s2)),
                        );
                    }
                }
            }
        }
    }
    for (e, f, _) in l.sum_entries() {
        if !l.is_orth(e, f) {
            os2.violate(vec![nm(e), nm(f)], "sum defined for a non-orthogonal pair");
        }
    }

    let mut os3 = AxiomCheck::new();
    for g in l.elements() {
        for e in l.elements() {
            for f in l.elements() {
                if !(l.is_orth(g, e) && l.is_orth(g, f) && l.is_orth(e, f)) {
                    continue;
                }
                let (Some(s_ef), Some(s_ge)) = (l.sum(e, f), l.sum(g, e)) else {
                    continue; // missing sums are OS2 violations
                };
                if !l.is_orth(g, s_ef) {
                    os3.violate(
                        vec![nm(g), nm(e), nm(f)],
                        format!("g ⊥ e and g ⊥ f and e ⊥ f, but g ⊥ {} fails", nm(s_ef)),
                    );
                    continue;
                }
                if !l.is_orth(f, s_ge) {
                    os3.violate(
                        vec![nm(g), nm(e), nm(f)],
                        format!("f ⊥ {} fails", nm(s_ge)),
                    );
                    continue;
                }
                match (l.sum(g, s_ef), l.sum(s_ge, f)) {
                    (Some(a), Some(b)) if a == b => {}
                    (Some(a), Some(b)) => os3.violate(
                        vec![nm(g), nm(e), nm(f)],
                        format!("g+(e+f) = {} but (g+e)+f = {}", nm(a), nm(b)),
                    ),
                    _ => os3.violate(
                        vec![nm(g), nm(e), nm(f)],
                        "an associativity sum is undefined",
                    ),
                }
            }
        }
    }

    let mut os4 = AxiomCheck::new();
    for e in l.elements() {
        if !l.is_orth(l.zero(), e) {
            os4.violate(vec![nm(e)], "0 ⊥ e fails");
            continue;
        }
        match l.sum(e, l.zero()) {
            Some(s) if s == e => {}
            Some(s) => os4.violate(vec![nm(e)], format!("e + 0 = {} instead of e", nm(s))),
            None => os4.violate(vec![nm(e)], "e + 0 is undefined"),
        }
    }

    let mut os5 = AxiomCheck::new();
    for e in l.elements() {
        let candidates: Vec<Elem> = l
            .elements()
            .filter(|&x| l.is_orth(e, x) && l.sum(e, x) == Some(l.one()))
            .collect();
        let table = l.ocomp(e);
        if candidates.len() != 1 || candidates[0] != table {
            let list = candidates.iter().map(|&c| nm(c)).collect::<Vec<_>>().join(", ");
            os5.violate(
                vec![nm(e)],
                format!(
                    "complements found: [{}], table says {}",
                    list,
                    nm(table)
                ),
            );
        }
    }

    let mut os6 = AxiomCheck::new();
    let mut non_unique = Vec::new();
    for e in l.elements() {
        for f in l.elements() {
            let differences: Vec<Elem> = l
                .elements()
                .filter(|&d| l.is_orth(e, d) && l.sum(e, d) == Some(f))
                .collect();
            let exists = !differences.is_empty();
            let orth_to_comp = l.is_orth(e, l.ocomp(f));
            if exists != orth_to_comp {
                os6.violate(
                    vec![nm(e), nm(f)],
                    if exists {
                        "a difference d with e + d = f exists although e ⊥ f′ fails"
                    } else {
                        "e ⊥ f′ holds but no d with e + d = f exists"
                    },
                );
            }
            if differences.len() > 1 {
                non_unique.push((nm(e), nm(f)));
            }
        }
    }

    AxiomReport {
        os1_symmetry: os1,
        os2_sum_domain: os2,
        os3_associativity: os3,
        os4_zero: os4,
        os5_unique_complement: os5,
        os6_difference: os6,
        non_unique_differences: non_unique,
    }
}

/// The Boolean subalgebra generated by three pairwise orthogonal events:
/// 0, 1, d₁, d₂, d₃, d₄ = (d₁+d₂+d₃)′ and all sums of pairs and triples.
/// Coinciding members are collapsed; the member count is part of the result.
#[derive(Clone, Debug)]
pub struct BooleanBlock {
    pub generators: [Elem; 4],
    pub members: Vec<Elem>,
}

impl BooleanBlock {
    pub fn contains(&self, e: Elem) -> bool {
        self.members.contains(&e)
    }

    pub fn member_count(&self) -> usize {
        self.members.len()
    }
}

pub fn boolean_block(
    l: &OrthoLogic,
    d1: Elem,
    d2: Elem,
    d3: Elem,
) -> Result<BooleanBlock, LogicError> {
    let gens = [d1, d2, d3];
    for i in 0..3 {
        for j in (i + 1)..3 {
            if !l.is_orth(gens[i], gens[j]) {
                return Err(LogicError::GeneratorsNotOrthogonal(
                    l.name(gens[i]).to_string(),
                    l.name(gens[j]).to_string(),
                ));
            }
        }
    }
    let add = |a: Elem, b: Elem| -> Result<Elem, LogicError> {
        l.sum(a, b)
            .ok_or_else(|| LogicError::SumMissing(l.name(a).to_string(), l.name(b).to_string()))
    };
    let s12 = add(d1, d2)?;
    let s123 = add(s12, d3)?;
    let d4 = l.ocomp(s123);

    let parts = [d1, d2, d3, d4];
    let mut members = BTreeSet::new();
    members.insert(l.zero());
    members.insert(l.one());
    for &p in &parts {
        members.insert(p);
    }
    for i in 0..4 {
        for j in (i + 1)..4 {
            members.insert(add(parts[i], parts[j])?);
        }
    }
    for i in 0..4 {
        for j in (i + 1)..4 {
            for k in (j + 1)..4 {
                let s = add(parts[i], parts[j])?;
                members.insert(add(s, parts[k])?);
            }
        }
    }
    Ok(BooleanBlock {
        generators: [d1, d2, d3, d4],
        members: members.into_iter().collect(),
    })
}

/// Exhaustive search for three orthogonal events with e = d₁+d₂ and
/// f = d₂+d₃. The first witness in ascending index order (d₁, then d₂, then
/// d₃) is returned, which makes reports reproducible.
pub fn find_algebraic_compatibility(
    l: &OrthoLogic,
    e: Elem,
    f: Elem,
) -> Option<(Elem, Elem, Elem)> {
    for d1 in l.elements() {
        for d2 in l.elements() {
            if !l.is_orth(d1, d2) || l.sum(d1, d2) != Some(e) {
                continue;
            }
            for d3 in l.elements() {
                if l.is_orth(d2, d3)
                    && l.is_orth(d1, d3)
                    && l.sum(d2, d3) == Some(f)
                {
                    return Some((d1, d2, d3));
                }
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    #[test]
    fn two_element_logic_passes() {
        let l = catalog::boolean_logic(1);
        assert_eq!(l.len(), 2);
        assert!(validate_axioms(&l).all_pass());
    }

    #[test]
    fn boolean_cube_passes() {
        for n in 1..=4 {
            let l = catalog::boolean_logic(n);
            let report = validate_axioms(&l);
            assert!(report.all_pass(), "2^{n} failed: {report:?}");
            assert!(report.non_unique_differences.is_empty());
        }
    }

    #[test]
    fn mo_logics_pass() {
        for n in 1..=3 {
            let l = catalog::mo_logic(n);
            assert!(validate_axioms(&l).all_pass(), "MO_{n} failed");
        }
    }

    #[test]
    fn asymmetric_orth_fails_os1() {
        // {0, 1} with the pair (0,1) listed but (1,0) missing
        let l = OrthoLogic::from_tables(
            vec!["0".into(), "1".into()],
            0,
            1,
            vec![1, 0],
            [(0, 0), (0, 1), (1, 1)],
            [((0, 0), 0), ((0, 1), 1), ((1, 1), 0)],
        )
        .unwrap();
        let report = validate_axioms(&l);
        assert!(!report.os1_symmetry.pass);
        assert_eq!(report.os1_symmetry.witnesses[0].elements, vec!["0", "1"]);
    }

    #[test]
    fn ocomp_involution_and_zero_complement_follow_from_axioms() {
        let l = catalog::boolean_logic(3);
        assert_eq!(l.ocomp(l.zero()), l.one());
        for e in l.elements() {
            assert_eq!(l.ocomp(l.ocomp(e)), e);
        }
    }

    #[test]
    fn derived_order_in_boolean_cube() {
        let l = catalog::boolean_logic(3);
        let a = l.by_name("{a}").unwrap();
        let ab = l.by_name("{a,b}").unwrap();
        assert!(l.derived_order(a, ab));
        assert!(!l.derived_order(ab, a));
        for e in l.elements() {
            assert!(l.derived_order(e, l.one()));
            assert!(l.derived_order(l.zero(), e));
        }
    }

    #[test]
    fn boolean_block_of_singletons_in_two_pow_four() {
        let l = catalog::boolean_logic(4);
        let d1 = l.by_name("{a}").unwrap();
        let d2 = l.by_name("{b}").unwrap();
        let d3 = l.by_name("{c}").unwrap();
        let block = boolean_block(&l, d1, d2, d3).unwrap();
        assert_eq!(block.member_count(), 16);
    }

    #[test]
    fn boolean_block_degenerate_generators() {
        let l = catalog::boolean_logic(2);
        let e = l.by_name("{a}").unwrap();
        let z = l.zero();
        let block = boolean_block(&l, e, z, z).unwrap();
        let names: Vec<&str> = block.members.iter().map(|&m| l.name(m)).collect();
        assert_eq!(block.member_count(), 4);
        assert!(names.contains(&"0") && names.contains(&"1"));
        assert!(names.contains(&"{a}") && names.contains(&"{b}"));
    }

    #[test]
    fn boolean_block_rejects_non_orthogonal_generators() {
        let l = catalog::boolean_logic(2);
        let a = l.by_name("{a}").unwrap();
        let one = l.one();
        assert!(matches!(
            boolean_block(&l, a, one, l.zero()),
            Err(LogicError::GeneratorsNotOrthogonal(..))
        ));
    }

    #[test]
    fn algebraic_compatibility_witnesses() {
        let l = catalog::boolean_logic(3);
        let e = l.by_name("{a,b}").unwrap();
        let f = l.by_name("{b,c}").unwrap();
        let (d1, d2, d3) = find_algebraic_compatibility(&l, e, f).unwrap();
        assert_eq!(l.name(d1), "{a}");
        assert_eq!(l.name(d2), "{b}");
        assert_eq!(l.name(d3), "{c}");

        // orthogonal pair: (e, 0, f)
        let a = l.by_name("{a}").unwrap();
        let c = l.by_name("{c}").unwrap();
        let (d1, d2, d3) = find_algebraic_compatibility(&l, a, c).unwrap();
        assert_eq!((d1, d2, d3), (a, l.zero(), c));

        // equal pair: (0, e, 0)
        let (d1, d2, d3) = find_algebraic_compatibility(&l, a, a).unwrap();
        assert_eq!((d1, d2, d3), (l.zero(), a, l.zero()));
    }

    #[test]
    fn witnesses_lie_in_their_boolean_block() {
        let l = catalog::boolean_logic(3);
        for e in l.elements() {
            for f in l.elements() {
                if let Some((d1, d2, d3)) = find_algebraic_compatibility(&l, e, f) {
                    let block = boolean_block(&l, d1, d2, d3).unwrap();
                    assert!(block.contains(e) && block.contains(f));
                }
            }
        }
    }

    #[test]
    fn mo2_has_no_cross_block_compatibility() {
        let l = catalog::mo_logic(2);
        let a = l.by_name("a1").unwrap();
        let b = l.by_name("a2").unwrap();
        assert!(find_algebraic_compatibility(&l, a, b).is_none());
    }

    #[test]
    fn pasted_logic_passes_and_breaks_the_converse() {
        let l = catalog::pasted_logic();
        let report = validate_axioms(&l);
        assert!(report.all_pass(), "{report:?}");

        // f ⊥ (e1+e2) holds while f ⊥ e1 fails: orthogonality to a sum does
        // not descend to the parts
        let e1 = l.by_name("e1").unwrap();
        let e2 = l.by_name("e2").unwrap();
        let f = l.by_name("f").unwrap();
        let s = l.sum(e1, e2).expect("e1 + e2 defined");
        assert_eq!(l.name(s), "s");
        assert!(l.is_orth(f, s));
        assert!(!l.is_orth(f, e1));
        assert!(!l.is_orth(f, e2));
    }
}
