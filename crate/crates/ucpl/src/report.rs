//! Structured report documents: one machine-readable JSON shape per command
//! plus a human rendering. Reports are deterministic given (target, flags,
//! seed): all collections are ordered and every residual is printed next to
//! the tolerance it was compared against.

use crate::hierarchy::{JointDistribution, Verdict};
use crate::logic::AxiomReport;
use crate::pprojection::PProjectionReport;
use crate::states::{SupportSweep, UcpReport};
use serde::Serialize;
use std::fmt::Write as _;

#[derive(Clone, Debug, Serialize)]
pub struct ReportDocument {
    pub command: String,
    pub target: String,
    pub kind: String,
    pub tol: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    pub pass: bool,
    pub body: ReportBody,
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
#[allow(clippy::large_enum_variant)]
pub enum ReportBody {
    Validate(ValidateBody),
    Classify(ClassifyBody),
    Sweep(SweepBody),
    Lemmas(LemmasBody),
    Joint(JointBody),
}

#[derive(Clone, Debug, Serialize)]
pub struct ProjectionInfo {
    pub name: String,
    pub rank: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct StateInfo {
    pub name: String,
    pub trace: f64,
    pub min_eigenvalue: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct HilbertValidation {
    pub dim: usize,
    pub projections: Vec<ProjectionInfo>,
    pub states: Vec<StateInfo>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ValidateBody {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hilbert: Option<HilbertValidation>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub axioms: Option<AxiomReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ucp: Option<UcpReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub vertex_count: Option<usize>,
    pub state_issues: Vec<String>,
    pub notes: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct LevelEntry {
    pub level: String,
    pub verdict: Verdict,
    pub exact: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness_state: Option<serde_json::Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness_event: Option<serde_json::Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ClassifyBody {
    pub e: String,
    pub f: String,
    pub levels: Vec<LevelEntry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub decomposition: Option<serde_json::Value>,
    pub sample_relative: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sample_description: Option<String>,
    pub monotone: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepBody {
    pub dims: Vec<usize>,
    pub pairs_per_dim: usize,
    pub total_pairs: usize,
    pub validation_ok: bool,
    pub coincidence_ok: bool,
    pub monotone_ok: bool,
    pub max_symmetry_residual: f64,
    pub max_trace_form_residual: f64,
    pub injected_bug: bool,
    pub failures: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct PProjectionSummary {
    pub label: String,
    pub report: PProjectionReport,
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "lemma")]
pub enum LemmasBody {
    #[serde(rename = "1")]
    One {
        cases: usize,
        consistent_all: bool,
        max_pq_swap_residual: f64,
        failures: Vec<String>,
    },
    #[serde(rename = "2")]
    Two {
        cases: usize,
        forced_zero_cases: usize,
        max_residual: f64,
        all_within_tol: bool,
        failures: Vec<String>,
    },
    #[serde(rename = "3")]
    Three {
        #[serde(skip_serializing_if = "Option::is_none")]
        support: Option<SupportSweep>,
        order_reflexive: bool,
        order_antisymmetric: bool,
        order_transitive: bool,
        chain_cases: usize,
        chain_consistent_all: bool,
        failures: Vec<String>,
    },
    #[serde(rename = "4")]
    Four {
        associative: Vec<PProjectionSummary>,
        jordan: Vec<PProjectionSummary>,
        max_jordan_corner_defect: f64,
        decompositions_checked: usize,
        max_decomposition_defect: f64,
        failures: Vec<String>,
    },
}

#[derive(Clone, Debug, Serialize)]
pub struct JointBody {
    pub state: String,
    pub e: String,
    pub f: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<JointDistribution>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p_error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q: Option<JointDistribution>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q_error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub swap_max_residual: Option<f64>,
    pub influence_ef: bool,
    pub influence_fe: bool,
}

impl ReportDocument {
    pub fn to_machine(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("report serializes");
        out.push('\n');
        out
    }

    pub fn to_human(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "== {} {} ({}) ==", self.command, self.target, self.kind);
        let _ = writeln!(
            s,
            "tol {:.1e}{}{}",
            self.tol,
            self.seed.map(|x| format!(", seed {x}")).unwrap_or_default(),
            self.samples.map(|x| format!(", samples {x}")).unwrap_or_default(),
        );
        match &self.body {
            ReportBody::Validate(b) => render_validate(&mut s, b, self.tol),
            ReportBody::Classify(b) => render_classify(&mut s, b),
            ReportBody::Sweep(b) => render_sweep(&mut s, b, self.tol),
            ReportBody::Lemmas(b) => render_lemmas(&mut s, b, self.tol),
            ReportBody::Joint(b) => render_joint(&mut s, b, self.tol),
        }
        let _ = writeln!(s, "overall: {}", if self.pass { "PASS" } else { "FAIL" });
        s
    }
}

fn verdict_str(v: Verdict) -> &'static str {
    match v {
        Verdict::Holds => "holds",
        Verdict::Fails => "fails",
        Verdict::Undecided => "undecided",
    }
}

fn render_validate(s: &mut String, b: &ValidateBody, tol: f64) {
    if let Some(h) = &b.hilbert {
        let _ = writeln!(s, "hilbert scenario, dim {}", h.dim);
        for p in &h.projections {
            let _ = writeln!(s, "  projection {:<12} rank {:.3} (valid at tol {:.1e})", p.name, p.rank, tol);
        }
        for st in &h.states {
            let _ = writeln!(
                s,
                "  state      {:<12} trace {:.12}, min eigenvalue {:+.3e}",
                st.name, st.trace, st.min_eigenvalue
            );
        }
    }
    if let Some(ax) = &b.axioms {
        let names = ["OS1", "OS2", "OS3", "OS4", "OS5", "OS6"];
        for (name, check) in names.iter().zip(ax.checks()) {
            if check.pass {
                let _ = writeln!(s, "  {name}: pass");
            } else {
                let _ = writeln!(s, "  {name}: FAIL ({} violations)", check.violations);
                for w in &check.witnesses {
                    let _ = writeln!(s, "      [{}] {}", w.elements.join(", "), w.detail);
                }
            }
        }
        if !ax.non_unique_differences.is_empty() {
            let _ = writeln!(
                s,
                "  note: non-unique differences in the sixth axiom for {} pair(s) (existence only is required)",
                ax.non_unique_differences.len()
            );
        }
    }
    if let Some(n) = b.vertex_count {
        let _ = writeln!(s, "  state polytope: {n} vertices");
    }
    if let Some(ucp) = &b.ucp {
        if ucp.uc1.pass {
            let _ = writeln!(s, "  UC1: pass (exact over vertices)");
        } else {
            let (x, y) = ucp.uc1.unseparated.clone().unwrap_or_default();
            let _ = writeln!(s, "  UC1: FAIL: {x} and {y} are not separated by any state");
        }
        if ucp.uc2.pass {
            let _ = writeln!(s, "  UC2: pass over {} cases ({})", ucp.uc2.cases_checked, ucp.uc2.sample_description);
        } else if let Some(w) = &ucp.uc2.witness {
            let _ = writeln!(s, "  UC2: FAIL at event {}: {}", w.event, w.failure);
            let _ = writeln!(s, "      witness state values: {:?}", w.state_values);
        }
        let _ = writeln!(
            s,
            "  UCP space (relative to sample): {}",
            if ucp.is_ucp_space { "yes" } else { "no" }
        );
        if let Some(e) = &ucp.event_without_unit_state {
            let _ = writeln!(s, "  note: no state assigns probability 1 to event {e}");
        } else {
            let _ = writeln!(s, "  every nonzero event has a state assigning it probability 1");
        }
    }
    for issue in &b.state_issues {
        let _ = writeln!(s, "  state issue: {issue}");
    }
    for note in &b.notes {
        let _ = writeln!(s, "  note: {note}");
    }
}

fn render_classify(s: &mut String, b: &ClassifyBody) {
    let _ = writeln!(s, "pair: e = {}, f = {}", b.e, b.f);
    for entry in &b.levels {
        let _ = writeln!(
            s,
            "  {:<26} {:<9} [{}]{}",
            entry.level,
            verdict_str(entry.verdict),
            if entry.exact { "exact" } else { "sample-relative" },
            entry.detail.as_ref().map(|d| format!(" ({d})")).unwrap_or_default()
        );
        if let Some(w) = &entry.witness_state {
            let _ = writeln!(s, "      witness state: {w}");
        }
        if let Some(w) = &entry.witness_event {
            let _ = writeln!(s, "      witness d: {w}");
        }
    }
    if let Some(d) = &b.decomposition {
        let _ = writeln!(s, "  decomposition (d1, d2, d3): {d}");
    }
    if let Some(desc) = &b.sample_description {
        let _ = writeln!(s, "  state quantification: {desc}");
    }
    let _ = writeln!(s, "  hierarchy chain intact: {}", b.monotone);
}

fn render_sweep(s: &mut String, b: &SweepBody, tol: f64) {
    let _ = writeln!(
        s,
        "dims {:?}, {} random pairs per dim ({} total)",
        b.dims, b.pairs_per_dim, b.total_pairs
    );
    if b.injected_bug {
        let _ = writeln!(s, "  injected-bug mode: perturbing one projection per pair");
    }
    let _ = writeln!(s, "  projection validity: {}", if b.validation_ok { "ok" } else { "FAIL" });
    let _ = writeln!(
        s,
        "  five-level coincidence with commutation: {}",
        if b.coincidence_ok { "ok" } else { "FAIL" }
    );
    let _ = writeln!(s, "  hierarchy chain: {}", if b.monotone_ok { "ok" } else { "FAIL" });
    let _ = writeln!(
        s,
        "  max symmetry-condition residual: {:.3e} (tol {:.1e})",
        b.max_symmetry_residual, tol
    );
    let _ = writeln!(
        s,
        "  max residual vs trace form tr(ρ(e+f−ef−fe)): {:.3e} (tol {:.1e})",
        b.max_trace_form_residual, tol
    );
    for f in &b.failures {
        let _ = writeln!(s, "  failure: {f}");
    }
}

fn render_pproj(s: &mut String, p: &PProjectionSummary, tol: f64) {
    let r = &p.report;
    let _ = writeln!(
        s,
        "  {:<34} (a) {} (b) {} (c) {} (d) {}  unit defect {:.2e} (tol {:.1e})",
        p.label,
        if r.condition_pass[0] { "ok" } else { "FAIL" },
        if r.condition_pass[1] { "ok" } else { "FAIL" },
        if r.condition_pass[2] { "ok" } else { "FAIL" },
        if r.condition_pass[3] { "ok" } else { "FAIL" },
        r.unit_relation_defect,
        tol,
    );
    if let Some(v) = &r.first_violation {
        let _ = writeln!(
            s,
            "      first violation: condition {:?} at sample {}: {} (residual {:.3e})",
            v.condition, v.sample, v.detail, v.residual
        );
    }
}

fn render_lemmas(s: &mut String, b: &LemmasBody, tol: f64) {
    match b {
        LemmasBody::One { cases, consistent_all, max_pq_swap_residual, failures } => {
            let _ = writeln!(s, "equivalence of weak comeasurability with compatibility + symmetry");
            let _ = writeln!(s, "  cases: {cases}, all biconditionals consistent: {consistent_all}");
            let _ = writeln!(
                s,
                "  max |p(k,l) − q(l,k)| over compatible cases: {:.3e} (tol {:.1e})",
                max_pq_swap_residual, tol
            );
            for f in failures {
                let _ = writeln!(s, "  failure: {f}");
            }
        }
        LemmasBody::Two { cases, forced_zero_cases, max_residual, all_within_tol, failures } => {
            let _ = writeln!(s, "three-way identity for orthogonal decompositions");
            let _ = writeln!(s, "  cases: {cases} (plus {forced_zero_cases} forced μ(d2)=0 cases)");
            let _ = writeln!(s, "  max residual: {:.3e} (tol {:.1e}), all within tol: {}", max_residual, tol, all_within_tol);
            for f in failures {
                let _ = writeln!(s, "  failure: {f}");
            }
        }
        LemmasBody::Three {
            support,
            order_reflexive,
            order_antisymmetric,
            order_transitive,
            chain_cases,
            chain_consistent_all,
            failures,
        } => {
            let _ = writeln!(s, "derived order and the and-operation chain");
            if let Some(sup) = support {
                let _ = writeln!(
                    s,
                    "  support condition over {} pairs: {}",
                    sup.pairs_checked,
                    if sup.all_hold { "holds" } else { "FAILS" }
                );
                for (e, f) in &sup.failures {
                    let _ = writeln!(s, "      fails at ({e}, {f})");
                }
            }
            let _ = writeln!(
                s,
                "  order relation: reflexive {order_reflexive}, antisymmetric {order_antisymmetric}, transitive {order_transitive}"
            );
            let _ = writeln!(s, "  and-chain cases: {chain_cases}, all consistent: {chain_consistent_all}");
            for f in failures {
                let _ = writeln!(s, "  failure: {f}");
            }
        }
        LemmasBody::Four {
            associative,
            jordan,
            max_jordan_corner_defect,
            decompositions_checked,
            max_decomposition_defect,
            failures,
        } => {
            let _ = writeln!(s, "conditioning maps as complementary projection pairs");
            for p in associative {
                render_pproj(s, p, tol);
            }
            for p in jordan {
                render_pproj(s, p, tol);
            }
            let _ = writeln!(
                s,
                "  max Jordan-vs-corner defect: {:.3e} (tol {:.1e})",
                max_jordan_corner_defect, tol
            );
            let _ = writeln!(
                s,
                "  decompositions d0 = P_e f, d1 = e−d0, d2 = f−d0 checked: {decompositions_checked}, max orthogonality defect {:.3e}",
                max_decomposition_defect
            );
            for f in failures {
                let _ = writeln!(s, "  failure: {f}");
            }
        }
    }
}

fn render_joint(s: &mut String, b: &JointBody, tol: f64) {
    let _ = writeln!(s, "state {}, pair e = {}, f = {}", b.state, b.e, b.f);
    let _ = writeln!(s, "  e → f in this state: {}", b.influence_ef);
    let _ = writeln!(s, "  f → e in this state: {}", b.influence_fe);
    let cells = |j: &JointDistribution| {
        format!(
            "p(0,0)={:.6} p(0,1)={:.6} p(1,0)={:.6} p(1,1)={:.6}",
            j.p(0, 0),
            j.p(0, 1),
            j.p(1, 0),
            j.p(1, 1)
        )
    };
    match (&b.p, &b.p_error) {
        (Some(p), _) => {
            let _ = writeln!(s, "  p (first {}): {}", p.first_measured, cells(p));
        }
        (None, Some(err)) => {
            let _ = writeln!(s, "  p: does not exist: {err}");
        }
        _ => {}
    }
    match (&b.q, &b.q_error) {
        (Some(q), _) => {
            let _ = writeln!(s, "  q (first {}): {}", q.first_measured, cells(q));
        }
        (None, Some(err)) => {
            let _ = writeln!(s, "  q: does not exist: {err}");
        }
        _ => {}
    }
    if let Some(r) = b.swap_max_residual {
        let _ = writeln!(s, "  max |p(k,l) − q(l,k)| = {:.3e} (tol {:.1e})", r, tol);
    }
}
