//! Command implementations behind the `ucpl` binary: validate, classify,
//! sweep, lemmas and joint. Every command produces a [`ReportDocument`]
//! rendered as human text or machine JSON.
//!
//! Exit-code contract: 0 success / all-pass, 1 property or validation
//! failure, 2 usage, parse or scenario/lemma mismatch errors.


use crate::hierarchy::{
    self, AbstractBackend, Backend, HilbertBackend, JointDistribution, Verdict,
};
use crate::hilbert::{
    self, DensityState, HilbertScenario, Projection, VALIDATION_TOL,
};
use crate::logic::{validate_axioms, Elem, OrthoLogic};
use crate::matrix::{self, CMat};
use crate::pprojection::{verify_p_projection, PProjectionMap};
use crate::report::*;
use crate::scenario::{self, AbstractScenario, Scenario, ScenarioError};
use crate::states::{self, AbstractState, StatePolytope};
use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Human,
    Machine,
}

#[derive(Parser, Debug)]
#[command(
    name = "ucpl",
    version,
    about = "Compatibility and comeasurability analysis for quantum logics with unique conditional probabilities"
)]
pub struct Cli {
    /// Classification tolerance for residual checks.
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub tol: f64,
    /// Seed for all randomized suites; fixed seeds give byte-identical
    /// machine reports.
    #[arg(long, global = true, default_value_t = 7)]
    pub seed: u64,
    /// Sample count per randomized suite.
    #[arg(long, global = true, default_value_t = 200)]
    pub samples: usize,
    #[arg(long, global = true, value_enum, default_value_t = Format::Human)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Validate a scenario: projection/density invariants for Hilbert files,
    /// the six structural axioms plus UC1/UC2 for abstract logics.
    Validate { target: String },
    /// Classify an event pair into the five-level hierarchy.
    Classify { target: String, e: String, f: String },
    /// Random-pair sweep: five-level coincidence with commutation and the
    /// symmetry-condition residuals. Target is a Hilbert scenario, a catalog
    /// name, or "random" (with --dims).
    Sweep {
        #[arg(default_value = "random")]
        target: String,
        /// Dimensions for the pure-random sweep.
        #[arg(long, value_delimiter = ',')]
        dims: Option<Vec<usize>>,
        /// Test hook: perturb one projection per pair; the sweep must then
        /// fail and exit 1.
        #[arg(long)]
        inject_bug: bool,
    },
    /// Run a structural property suite: 1 (weak-comeasurability
    /// equivalence), 2 (orthogonal-decomposition identity), 3 (derived
    /// order and the and-operation chain), 4 (conditioning-map projection
    /// pairs; Hilbert scenarios only).
    Lemmas { target: String, which: u8 },
    /// Print both joint distributions p and q of a pair in a named state.
    Joint { target: String, state: String, e: String, f: String },
}

pub struct CommandOutput {
    pub exit_code: i32,
    pub text: String,
}

pub fn run(cli: &Cli) -> CommandOutput {
    let result = match &cli.command {
        Command::Validate { target } => cmd_validate(cli, target),
        Command::Classify { target, e, f } => cmd_classify(cli, target, e, f),
        Command::Sweep { target, dims, inject_bug } => {
            cmd_sweep(cli, target, dims.as_deref(), *inject_bug)
        }
        Command::Lemmas { target, which } => cmd_lemmas(cli, target, *which),
        Command::Joint { target, state, e, f } => cmd_joint(cli, target, state, e, f),
    };
    match result {
        Ok(output) => output,
        Err(failure) => failure.render(cli.format),
    }
}

/// A command-level error with its exit code.
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure { code: 2, message: message.into() }
    }

    fn validation(message: impl Into<String>) -> Self {
        Failure { code: 1, message: message.into() }
    }

    fn render(&self, format: Format) -> CommandOutput {
        let text = match format {
            Format::Human => format!("error: {}\n", self.message),
            Format::Machine => {
                let doc = serde_json::json!({ "error": self.message, "exit_code": self.code });
                let mut s = serde_json::to_string_pretty(&doc).expect("error serializes");
                s.push('\n');
                s
            }
        };
        CommandOutput { exit_code: self.code, text }
    }
}

impl From<ScenarioError> for Failure {
    fn from(err: ScenarioError) -> Self {
        let code = match err {
            ScenarioError::Validation(_) => 1,
            _ => 2,
        };
        Failure { code, message: err.to_string() }
    }
}

fn resolve(target: &str) -> Result<Scenario, Failure> {
    Ok(scenario::resolve(target)?)
}

#[allow(clippy::too_many_arguments)]
fn finish(
    cli: &Cli,
    command: &str,
    target: &str,
    kind: &str,
    seed: Option<u64>,
    samples: Option<usize>,
    pass: bool,
    body: ReportBody,
) -> CommandOutput {
    let doc = ReportDocument {
        command: command.to_string(),
        target: target.to_string(),
        kind: kind.to_string(),
        tol: cli.tol,
        seed,
        samples,
        pass,
        body,
    };
    let text = match cli.format {
        Format::Human => doc.to_human(),
        Format::Machine => doc.to_machine(),
    };
    CommandOutput { exit_code: if pass { 0 } else { 1 }, text }
}

// -------------------------------------------------------------------------
// validate
// -------------------------------------------------------------------------

fn cmd_validate(cli: &Cli, target: &str) -> Result<CommandOutput, Failure> {
    let scenario = resolve(target)?;
    match scenario {
        Scenario::Hilbert(h) => {
            let projections = h
                .projections()
                .iter()
                .map(|(name, p)| ProjectionInfo { name: name.clone(), rank: p.rank_estimate() })
                .collect();
            let states = h
                .states()
                .iter()
                .map(|(name, s)| StateInfo {
                    name: name.clone(),
                    trace: matrix::trace_re(s.matrix()),
                    min_eigenvalue: matrix::hermitian_eigenvalues(s.matrix())
                        .first()
                        .copied()
                        .unwrap_or(0.0),
                })
                .collect();
            let mut notes = vec![
                "states are density matrices by fiat; the Gleason-type extension is taken as primitive".to_string(),
            ];
            if h.dim() == 2 {
                notes.push(
                    "dim 2 is a type I_2 algebra, where the linear state extension is not guaranteed by the classical theorems; conditioning mechanics still operate".to_string(),
                );
            }
            let body = ValidateBody {
                hilbert: Some(HilbertValidation { dim: h.dim(), projections, states }),
                axioms: None,
                ucp: None,
                vertex_count: None,
                state_issues: Vec::new(),
                notes,
            };
            Ok(finish(cli, "validate", target, "hilbert", None, None, true, ReportBody::Validate(body)))
        }
        Scenario::Abstract(a) => {
            let axioms = validate_axioms(&a.logic);
            let axioms_pass = axioms.all_pass();
            let mut body = ValidateBody {
                hilbert: None,
                axioms: Some(axioms),
                ucp: None,
                vertex_count: None,
                state_issues: Vec::new(),
                notes: Vec::new(),
            };
            let mut pass = axioms_pass;
            if axioms_pass {
                let p = states::build_polytope(&a.logic)
                    .map_err(|e| Failure::validation(e.to_string()))?;
                let (user, issues) = canonical_user_states(&a, &p, cli.tol);
                body.state_issues = issues;
                pass &= body.state_issues.is_empty();
                let verts = states::enumerate_vertex_states(&p, 4096)
                    .map_err(|e| Failure::validation(e.to_string()))?;
                body.vertex_count = Some(verts.len());
                let sample = states::state_sample(&p, &user)
                    .map_err(|e| Failure::validation(e.to_string()))?;
                let ucp = states::check_ucp(&a.logic, &p, &sample, cli.tol)
                    .map_err(|e| Failure::validation(e.to_string()))?;
                pass &= ucp.is_ucp_space;
                body.ucp = Some(ucp);
            }
            Ok(finish(cli, "validate", target, "abstract", None, None, pass, ReportBody::Validate(body)))
        }
    }
}

/// Canonicalizes a scenario's named states against the polytope; returns the
/// usable states and issue strings for the rest.
fn canonical_user_states(
    a: &AbstractScenario,
    p: &StatePolytope,
    tol: f64,
) -> (Vec<AbstractState>, Vec<String>) {
    let mut out = Vec::new();
    let mut issues = Vec::new();
    for (name, values) in &a.states {
        match states::state_from_values(&a.logic, p, values, tol) {
            Ok(state) => out.push(state),
            Err(err) => issues.push(format!("state `{name}`: {err}")),
        }
    }
    (out, issues)
}

// -------------------------------------------------------------------------
// classify
// -------------------------------------------------------------------------

fn matrix_json(m: &CMat) -> serde_json::Value {
    let rows: Vec<Vec<[f64; 2]>> = (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect();
    serde_json::json!(rows)
}

fn abstract_state_json(l: &OrthoLogic, s: &AbstractState) -> serde_json::Value {
    let map: serde_json::Map<String, serde_json::Value> = l
        .elements()
        .map(|e| (l.name(e).to_string(), serde_json::json!(s.value(e))))
        .collect();
    serde_json::Value::Object(map)
}

fn level_names() -> [&'static str; 6] {
    [
        "L1 influence-free e→f",
        "L1' influence-free f→e",
        "L2 compatible e↔f",
        "L3 weakly comeasurable",
        "L4 strongly comeasurable",
        "L5 algebraically compatible",
    ]
}

fn cmd_classify(cli: &Cli, target: &str, e_name: &str, f_name: &str) -> Result<CommandOutput, Failure> {
    let scenario = resolve(target)?;
    match scenario {
        Scenario::Hilbert(h) => {
            let e = h
                .projection(e_name)
                .ok_or_else(|| Failure::usage(format!("unknown projection `{e_name}`")))?;
            let f = h
                .projection(f_name)
                .ok_or_else(|| Failure::usage(format!("unknown projection `{f_name}`")))?;
            let backend = HilbertBackend::new(h.dim());
            let report = hierarchy::classify(&backend, e, f, cli.tol);

            let outcomes = [
                (&report.l1_forward, 0usize),
                (&report.l1_reverse, 1),
                (&report.l2_compatible, 2),
                (&report.l3_weak, 3),
                (&report.l4_strong, 4),
            ];
            let mut levels: Vec<LevelEntry> = outcomes
                .iter()
                .map(|(o, i)| LevelEntry {
                    level: level_names()[*i].to_string(),
                    verdict: o.verdict,
                    exact: o.exact,
                    witness_state: o.witness_state.as_ref().map(|s| matrix_json(s.matrix())),
                    witness_event: o.witness_event.as_ref().map(|p| matrix_json(p.matrix())),
                    detail: o.detail.clone(),
                })
                .collect();
            levels.push(LevelEntry {
                level: level_names()[5].to_string(),
                verdict: report.l5_algebraic.verdict,
                exact: report.l5_algebraic.exact,
                witness_state: None,
                witness_event: None,
                detail: report.l5_algebraic.detail.clone(),
            });
            let decomposition = report.l5_algebraic.triple.as_ref().map(|(d1, d2, d3)| {
                serde_json::json!([
                    matrix_json(d1.matrix()),
                    matrix_json(d2.matrix()),
                    matrix_json(d3.matrix())
                ])
            });
            let body = ClassifyBody {
                e: e_name.to_string(),
                f: f_name.to_string(),
                levels,
                decomposition,
                sample_relative: report.sample_relative,
                sample_description: None,
                monotone: report.monotone,
            };
            let mut out =
                finish(cli, "classify", target, "hilbert", None, None, true, ReportBody::Classify(body));
            out.exit_code = 0; // verdicts are data
            Ok(out)
        }
        Scenario::Abstract(a) => {
            let l = &a.logic;
            let e = l
                .by_name(e_name)
                .ok_or_else(|| Failure::usage(format!("unknown element `{e_name}`")))?;
            let f = l
                .by_name(f_name)
                .ok_or_else(|| Failure::usage(format!("unknown element `{f_name}`")))?;
            let p = states::build_polytope(l).map_err(|err| Failure::validation(err.to_string()))?;
            let (user, issues) = canonical_user_states(&a, &p, cli.tol);
            if !issues.is_empty() {
                return Err(Failure::validation(issues.join("; ")));
            }
            let backend = AbstractBackend::new(l, &p, &user)
                .map_err(|err| Failure::validation(err.to_string()))?;
            let report = hierarchy::classify(&backend, &e, &f, cli.tol);

            let render_event = |el: &Elem| serde_json::json!(l.name(*el));
            let outcomes = [
                (&report.l1_forward, 0usize),
                (&report.l1_reverse, 1),
                (&report.l2_compatible, 2),
                (&report.l3_weak, 3),
                (&report.l4_strong, 4),
            ];
            let mut levels: Vec<LevelEntry> = outcomes
                .iter()
                .map(|(o, i)| LevelEntry {
                    level: level_names()[*i].to_string(),
                    verdict: o.verdict,
                    exact: o.exact,
                    witness_state: o.witness_state.as_ref().map(|s| abstract_state_json(l, s)),
                    witness_event: o.witness_event.as_ref().map(render_event),
                    detail: o.detail.clone(),
                })
                .collect();
            levels.push(LevelEntry {
                level: level_names()[5].to_string(),
                verdict: report.l5_algebraic.verdict,
                exact: report.l5_algebraic.exact,
                witness_state: None,
                witness_event: None,
                detail: report.l5_algebraic.detail.clone(),
            });
            let decomposition = report.l5_algebraic.triple.as_ref().map(|(d1, d2, d3)| {
                serde_json::json!([l.name(*d1), l.name(*d2), l.name(*d3)])
            });
            let body = ClassifyBody {
                e: e_name.to_string(),
                f: f_name.to_string(),
                levels,
                decomposition,
                sample_relative: report.sample_relative,
                sample_description: Some(format!(
                    "vertices + vertex-pair midpoints + user states ({} states)",
                    backend.sample().len()
                )),
                monotone: report.monotone,
            };
            let mut out =
                finish(cli, "classify", target, "abstract", None, None, true, ReportBody::Classify(body));
            out.exit_code = 0;
            Ok(out)
        }
    }
}

// -------------------------------------------------------------------------
// sweep
// -------------------------------------------------------------------------

fn perturbed(p: &Projection) -> Projection {
    let mut m = p.matrix().clone();
    m[(0, 0)] += Complex64::new(1e-3, 0.0);
    if m.ncols() > 1 {
        m[(0, 1)] += Complex64::new(0.0, 1e-3);
    }
    Projection::from_matrix_unchecked(m)
}

fn cmd_sweep(
    cli: &Cli,
    target: &str,
    dims_flag: Option<&[usize]>,
    inject_bug: bool,
) -> Result<CommandOutput, Failure> {
    type NamedPairs = Vec<(String, Projection, String, Projection)>;
    let (dims, named_pairs): (Vec<usize>, NamedPairs) =
        if target == "random" {
            (dims_flag.map(<[usize]>::to_vec).unwrap_or_else(|| vec![2, 3, 4, 5, 6]), Vec::new())
        } else {
            match resolve(target)? {
                Scenario::Hilbert(h) => {
                    let mut pairs = Vec::new();
                    let ps = h.projections();
                    for i in 0..ps.len() {
                        for j in (i + 1)..ps.len() {
                            pairs.push((
                                ps[i].0.clone(),
                                ps[i].1.clone(),
                                ps[j].0.clone(),
                                ps[j].1.clone(),
                            ));
                        }
                    }
                    (vec![h.dim()], pairs)
                }
                Scenario::Abstract(_) => {
                    return Err(Failure::usage(
                        "sweep requires a Hilbert scenario, a Hilbert catalog name, or `random`",
                    ));
                }
            }
        };
    for &dim in &dims {
        if !(2..=16).contains(&dim) {
            return Err(Failure::usage(format!("sweep dimension {dim} out of range 2..=16")));
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(cli.seed);
    let mut failures: Vec<String> = Vec::new();
    let mut validation_ok = true;
    let mut coincidence_ok = true;
    let mut monotone_ok = true;
    let mut max_symmetry = 0.0f64;
    let mut max_trace_form = 0.0f64;
    let mut total_pairs = 0usize;

    let note_failure = |failures: &mut Vec<String>, msg: String| {
        if failures.len() < 8 {
            failures.push(msg);
        }
    };

    let mut check_pair = |e: &Projection,
                          f: &Projection,
                          rho: &DensityState,
                          label: &str,
                          failures: &mut Vec<String>| {
        let dim = e.dim();
        let backend = HilbertBackend::new(dim);

        for (which, p) in [("e", e), ("f", f)] {
            let herm = matrix::hermiticity_defect(p.matrix());
            let idem = matrix::idempotency_defect(p.matrix());
            if herm > VALIDATION_TOL || idem > VALIDATION_TOL {
                validation_ok = false;
                note_failure(failures, format!(
                    "{label}: projection {which} invalid (self-adjoint defect {herm:.3e}, idempotent defect {idem:.3e})"
                ));
            }
        }

        let report = hierarchy::classify(&backend, e, f, cli.tol);
        if !report.monotone {
            monotone_ok = false;
            note_failure(failures, format!("{label}: hierarchy chain violated"));
        }
        let commuting = match hilbert::commutes(e, f, cli.tol) {
            Ok(c) => c,
            Err(err) => {
                note_failure(failures, format!("{label}: {err}"));
                coincidence_ok = false;
                return;
            }
        };
        let expected = if commuting { Verdict::Holds } else { Verdict::Fails };
        if report.verdicts().iter().any(|v| *v != expected) {
            coincidence_ok = false;
            note_failure(failures, format!(
                "{label}: verdicts {:?} do not coincide with commutation ({commuting})",
                report.verdicts()
            ));
        }

        match hierarchy::symmetry_condition(&backend, rho, e, f, cli.tol) {
            Ok(check) => {
                max_symmetry = max_symmetry.max(check.residual.abs());
                let combined = e.matrix() + f.matrix()
                    - e.matrix() * f.matrix()
                    - f.matrix() * e.matrix();
                let trace_form = matrix::trace_re(&(rho.matrix() * combined));
                max_trace_form = max_trace_form
                    .max((check.lhs - trace_form).abs())
                    .max((check.rhs - trace_form).abs());
            }
            Err(err) => note_failure(failures, format!("{label}: symmetry evaluation failed: {err}")),
        }
    };

    for (e_name, e, f_name, f) in &named_pairs {
        total_pairs += 1;
        let rho = hilbert::random_density_rng(e.dim(), &mut rng);
        check_pair(e, f, &rho, &format!("named pair ({e_name}, {f_name})"), &mut failures);
    }

    for &dim in &dims {
        for k in 0..cli.samples {
            total_pairs += 1;
            let rank_e = rng.gen_range(0..=dim);
            let rank_f = rng.gen_range(0..=dim);
            let e = hilbert::random_projection_rng(dim, rank_e, &mut rng, false)
                .expect("rank within bounds");
            let f = hilbert::random_projection_rng(dim, rank_f, &mut rng, false)
                .expect("rank within bounds");
            let e = if inject_bug { perturbed(&e) } else { e };
            let rho = hilbert::random_density_rng(dim, &mut rng);
            check_pair(&e, &f, &rho, &format!("dim {dim} pair {k}"), &mut failures);
        }
    }

    let pass = validation_ok
        && coincidence_ok
        && monotone_ok
        && max_symmetry <= cli.tol
        && max_trace_form <= cli.tol;
    let body = SweepBody {
        dims,
        pairs_per_dim: cli.samples,
        total_pairs,
        validation_ok,
        coincidence_ok,
        monotone_ok,
        max_symmetry_residual: max_symmetry,
        max_trace_form_residual: max_trace_form,
        injected_bug: inject_bug,
        failures,
    };
    Ok(finish(
        cli,
        "sweep",
        target,
        "hilbert",
        Some(cli.seed),
        Some(cli.samples),
        pass,
        ReportBody::Sweep(body),
    ))
}

// -------------------------------------------------------------------------
// lemmas
// -------------------------------------------------------------------------

fn cmd_lemmas(cli: &Cli, target: &str, which: u8) -> Result<CommandOutput, Failure> {
    let scenario = resolve(target)?;
    let kind = scenario.kind();
    let (pass, body) = match (which, &scenario) {
        (1, Scenario::Hilbert(h)) => lemma1_hilbert(cli, h),
        (1, Scenario::Abstract(a)) => lemma1_abstract(cli, a)?,
        (2, Scenario::Hilbert(h)) => lemma2_hilbert(cli, h),
        (2, Scenario::Abstract(a)) => lemma2_abstract(cli, a)?,
        (3, Scenario::Hilbert(h)) => lemma3_hilbert(cli, h),
        (3, Scenario::Abstract(a)) => lemma3_abstract(cli, a)?,
        (4, Scenario::Hilbert(h)) => lemma4_hilbert(cli, h),
        (4, Scenario::Abstract(_)) => {
            return Err(Failure::usage(
                "suite 4 verifies conditioning maps on matrices; it requires a Hilbert scenario",
            ));
        }
        _ => return Err(Failure::usage(format!("unknown lemma suite {which}; expected 1..=4"))),
    };
    Ok(finish(
        cli,
        "lemmas",
        target,
        kind,
        Some(cli.seed),
        Some(cli.samples),
        pass,
        ReportBody::Lemmas(body),
    ))
}

fn random_pair_rng(dim: usize, rng: &mut ChaCha8Rng) -> (Projection, Projection) {
    let rank_e = rng.gen_range(0..=dim);
    let rank_f = rng.gen_range(0..=dim);
    (
        hilbert::random_projection_rng(dim, rank_e, rng, false).expect("rank within bounds"),
        hilbert::random_projection_rng(dim, rank_f, rng, false).expect("rank within bounds"),
    )
}

fn lemma1_hilbert(cli: &Cli, h: &HilbertScenario) -> (bool, LemmasBody) {
    let backend = HilbertBackend::new(h.dim());
    let mut rng = ChaCha8Rng::seed_from_u64(cli.seed);
    let mut failures = Vec::new();
    let mut max_pq = 0.0f64;
    let mut cases = 0usize;
    let mut consistent_all = true;

    let mut run_case = |e: &Projection, f: &Projection, rho: &DensityState, label: String| {
        cases += 1;
        match hierarchy::lemma1_equivalence(&backend, rho, e, f, cli.tol) {
            Ok(check) => {
                if !check.consistent {
                    consistent_all = false;
                    if failures.len() < 8 {
                        failures.push(format!(
                            "{label}: weak={} but compat={} symmetry={}",
                            check.weak, check.relative_compat, check.symmetry
                        ));
                    }
                }
                if let Some(r) = check.pq_swap_residual {
                    max_pq = max_pq.max(r);
                }
            }
            Err(err) => {
                consistent_all = false;
                if failures.len() < 8 {
                    failures.push(format!("{label}: {err}"));
                }
            }
        }
    };

    for (en, e) in h.projections() {
        for (fn_, f) in h.projections() {
            for (sn, rho) in h.states() {
                run_case(e, f, rho, format!("named ({en}, {fn_}) in {sn}"));
            }
        }
    }
    for k in 0..cli.samples {
        let (e, f) = random_pair_rng(h.dim(), &mut rng);
        let rho = hilbert::random_density_rng(h.dim(), &mut rng);
        run_case(&e, &f, &rho, format!("random case {k}"));
    }

    (consistent_all, LemmasBody::One { cases, consistent_all, max_pq_swap_residual: max_pq, failures })
}

fn abstract_backend_parts(
    a: &AbstractScenario,
    tol: f64,
) -> Result<(StatePolytope, Vec<AbstractState>), Failure> {
    let p = states::build_polytope(&a.logic).map_err(|e| Failure::validation(e.to_string()))?;
    let (user, issues) = canonical_user_states(a, &p, tol);
    if !issues.is_empty() {
        return Err(Failure::validation(issues.join("; ")));
    }
    Ok((p, user))
}

fn lemma1_abstract(cli: &Cli, a: &AbstractScenario) -> Result<(bool, LemmasBody), Failure> {
    let (p, user) = abstract_backend_parts(a, cli.tol)?;
    let backend = AbstractBackend::new(&a.logic, &p, &user)
        .map_err(|e| Failure::validation(e.to_string()))?;
    let l = &a.logic;
    let mut failures = Vec::new();
    let mut max_pq = 0.0f64;
    let mut cases = 0usize;
    let mut consistent_all = true;
    for e in l.elements() {
        for f in l.elements() {
            for mu in backend.sample().to_vec() {
                cases += 1;
                match hierarchy::lemma1_equivalence(&backend, &mu, &e, &f, cli.tol) {
                    Ok(check) => {
                        if !check.consistent {
                            consistent_all = false;
                            if failures.len() < 8 {
                                failures.push(format!(
                                    "pair ({}, {}): inconsistent biconditional",
                                    l.name(e),
                                    l.name(f)
                                ));
                            }
                        }
                        if let Some(r) = check.pq_swap_residual {
                            max_pq = max_pq.max(r);
                        }
                    }
                    Err(err) => {
                        return Err(Failure::usage(format!(
                            "suite 1 needs unique conditioning, which this logic lacks: {err}"
                        )));
                    }
                }
            }
        }
    }
    Ok((consistent_all, LemmasBody::One { cases, consistent_all, max_pq_swap_residual: max_pq, failures }))
}

/// Random orthogonal triple d1, d2, d3: diagonal index blocks conjugated by
/// a random unitary basis.
fn random_orthogonal_triple(
    dim: usize,
    rng: &mut ChaCha8Rng,
) -> (Projection, Projection, Projection, CMat) {
    let basis = matrix::orthonormal_columns(dim, dim, rng, false);
    let sizes = loop {
        let s1 = rng.gen_range(0..=dim);
        let s2 = rng.gen_range(0..=dim.saturating_sub(s1));
        let s3 = rng.gen_range(0..=dim.saturating_sub(s1 + s2));
        if s1 + s2 + s3 <= dim && (s1 > 0 || s2 > 0 || s3 > 0) {
            break (s1, s2, s3);
        }
    };
    let block = |from: usize, len: usize| -> Projection {
        let mut m = matrix::zeros(dim);
        for i in from..from + len {
            let col = basis.column(i);
            for r in 0..dim {
                for c in 0..dim {
                    m[(r, c)] += col[r] * col[c].conj();
                }
            }
        }
        Projection::new(m, 1e-9).expect("orthonormal block is a projection")
    };
    let d1 = block(0, sizes.0);
    let d2 = block(sizes.0, sizes.1);
    let d3 = block(sizes.0 + sizes.1, sizes.2);
    (d1, d2, d3, basis)
}

fn lemma2_hilbert(cli: &Cli, h: &HilbertScenario) -> (bool, LemmasBody) {
    let dim = h.dim();
    let backend = HilbertBackend::new(dim);
    let mut rng = ChaCha8Rng::seed_from_u64(cli.seed);
    let mut failures = Vec::new();
    let mut max_residual = 0.0f64;
    let mut cases = 0usize;
    let mut forced_zero_cases = 0usize;
    let mut all_within = true;

    for k in 0..cli.samples {
        let (d1, d2, d3, basis) = random_orthogonal_triple(dim, &mut rng);
        let force_zero = k % 5 == 4 && d2.rank_estimate() > 0.5;
        let rho = if force_zero {
            // diagonal in the same basis, zero weight on the d2 block
            forced_zero_cases += 1;
            let d2_rank = d2.rank_estimate().round() as usize;
            let d1_rank = d1.rank_estimate().round() as usize;
            let mut weights: Vec<f64> =
                (0..dim).map(|_| rng.gen::<f64>() + 1e-3).collect();
            for w in weights.iter_mut().take(d1_rank + d2_rank).skip(d1_rank) {
                *w = 0.0;
            }
            let total: f64 = weights.iter().sum();
            let mut m = matrix::zeros(dim);
            for (i, w) in weights.iter().enumerate() {
                let col = basis.column(i);
                for r in 0..dim {
                    for c in 0..dim {
                        m[(r, c)] += col[r] * col[c].conj() * Complex64::new(w / total, 0.0);
                    }
                }
            }
            DensityState::new(m, 1e-6).expect("mixture of basis projectors")
        } else {
            hilbert::random_density_rng(dim, &mut rng)
        };
        let rank_a = rng.gen_range(0..=dim);
        let a = hilbert::random_projection_rng(dim, rank_a, &mut rng, false)
            .expect("rank within bounds");
        cases += 1;
        match hierarchy::lemma2_check(&backend, &rho, &d1, &d2, &d3, &a, cli.tol) {
            Ok((r1, r2)) => {
                max_residual = max_residual.max(r1).max(r2);
                if r1 > cli.tol || r2 > cli.tol {
                    all_within = false;
                    if failures.len() < 8 {
                        failures.push(format!("case {k}: residuals {r1:.3e}, {r2:.3e}"));
                    }
                }
                if force_zero && (r1 != 0.0 || r2 != 0.0) {
                    all_within = false;
                    if failures.len() < 8 {
                        failures.push(format!(
                            "case {k}: forced μ(d2)=0 should give exact zeros, got {r1:.3e}, {r2:.3e}"
                        ));
                    }
                }
            }
            Err(err) => {
                all_within = false;
                if failures.len() < 8 {
                    failures.push(format!("case {k}: {err}"));
                }
            }
        }
    }

    (
        all_within,
        LemmasBody::Two { cases, forced_zero_cases, max_residual, all_within_tol: all_within, failures },
    )
}

fn lemma2_abstract(cli: &Cli, a: &AbstractScenario) -> Result<(bool, LemmasBody), Failure> {
    let (p, user) = abstract_backend_parts(a, cli.tol)?;
    let backend = AbstractBackend::new(&a.logic, &p, &user)
        .map_err(|e| Failure::validation(e.to_string()))?;
    let l = &a.logic;
    let mut failures = Vec::new();
    let mut max_residual = 0.0f64;
    let mut cases = 0usize;
    let mut forced_zero_cases = 0usize;
    let mut all_within = true;

    'outer: for d1 in l.elements() {
        for d2 in l.elements() {
            for d3 in l.elements() {
                if !(l.is_orth(d1, d2) && l.is_orth(d1, d3) && l.is_orth(d2, d3)) {
                    continue;
                }
                if l.sum(d1, d2).is_none() || l.sum(d2, d3).is_none() {
                    continue;
                }
                for mu in backend.sample().to_vec() {
                    for e in l.elements() {
                        if cases >= cli.samples {
                            break 'outer;
                        }
                        cases += 1;
                        if mu.value(d2) <= cli.tol {
                            forced_zero_cases += 1;
                        }
                        match hierarchy::lemma2_check(&backend, &mu, &d1, &d2, &d3, &e, cli.tol) {
                            Ok((r1, r2)) => {
                                max_residual = max_residual.max(r1).max(r2);
                                if r1 > cli.tol || r2 > cli.tol {
                                    all_within = false;
                                    if failures.len() < 8 {
                                        failures.push(format!(
                                            "triple ({}, {}, {}) at a = {}: residuals {r1:.3e}, {r2:.3e}",
                                            l.name(d1),
                                            l.name(d2),
                                            l.name(d3),
                                            l.name(e)
                                        ));
                                    }
                                }
                            }
                            Err(err) => {
                                return Err(Failure::usage(format!(
                                    "suite 2 needs unique conditioning, which this logic lacks: {err}"
                                )));
                            }
                        }
                    }
                }
            }
        }
    }
    Ok((
        all_within,
        LemmasBody::Two { cases, forced_zero_cases, max_residual, all_within_tol: all_within, failures },
    ))
}

fn lemma3_abstract(cli: &Cli, a: &AbstractScenario) -> Result<(bool, LemmasBody), Failure> {
    let (p, user) = abstract_backend_parts(a, cli.tol)?;
    let backend = AbstractBackend::new(&a.logic, &p, &user)
        .map_err(|e| Failure::validation(e.to_string()))?;
    let l = &a.logic;
    let mut failures = Vec::new();

    let support = states::support_condition_sweep(l, &p)
        .map_err(|e| Failure::validation(e.to_string()))?;

    // the derived relation is an order exactly under the support hypothesis
    let mut reflexive = true;
    let mut antisymmetric = true;
    let mut transitive = true;
    for e in l.elements() {
        if !l.derived_order(e, e) {
            reflexive = false;
            if failures.len() < 8 {
                failures.push(format!("order not reflexive at {}", l.name(e)));
            }
        }
    }
    if support.all_hold {
        for e in l.elements() {
            for f in l.elements() {
                if l.derived_order(e, f) && l.derived_order(f, e) && e != f {
                    antisymmetric = false;
                    if failures.len() < 8 {
                        failures.push(format!(
                            "order not antisymmetric at ({}, {})",
                            l.name(e),
                            l.name(f)
                        ));
                    }
                }
                for g in l.elements() {
                    if l.derived_order(e, f) && l.derived_order(f, g) && !l.derived_order(e, g) {
                        transitive = false;
                        if failures.len() < 8 {
                            failures.push(format!(
                                "order not transitive at ({}, {}, {})",
                                l.name(e),
                                l.name(f),
                                l.name(g)
                            ));
                        }
                    }
                }
            }
        }
    }

    // the and-chain presupposes the support hypothesis; when it fails,
    // reporting the failing pairs is the result
    let mut chain_cases = 0usize;
    let mut chain_consistent_all = true;
    if support.all_hold {
        for e in l.elements() {
            for f in l.elements() {
                chain_cases += 1;
                match hierarchy::and_candidate(&backend, &e, &f, cli.tol) {
                    Ok(found) => {
                        if !found.chain.consistent {
                            chain_consistent_all = false;
                            if failures.len() < 8 {
                                failures.push(format!(
                                    "and-chain inconsistent at ({}, {}): (i)={} (ii)={} (iii)={}",
                                    l.name(e),
                                    l.name(f),
                                    found.chain.i_weak_with_event,
                                    found.chain.ii_strong_with_event,
                                    found.chain.iii_algebraic
                                ));
                            }
                        }
                    }
                    Err(err) => {
                        return Err(Failure::usage(format!(
                            "suite 3 needs unique conditioning, which this logic lacks: {err}"
                        )));
                    }
                }
            }
        }
    } else if failures.len() < 8 {
        failures.push("and-chain skipped: the support hypothesis fails".to_string());
    }

    let pass = support.all_hold
        && reflexive
        && antisymmetric
        && transitive
        && chain_consistent_all;
    Ok((
        pass,
        LemmasBody::Three {
            support: Some(support),
            order_reflexive: reflexive,
            order_antisymmetric: antisymmetric,
            order_transitive: transitive,
            chain_cases,
            chain_consistent_all,
            failures,
        },
    ))
}

fn lemma3_hilbert(cli: &Cli, h: &HilbertScenario) -> (bool, LemmasBody) {
    let dim = h.dim();
    let backend = HilbertBackend::new(dim);
    let mut rng = ChaCha8Rng::seed_from_u64(cli.seed);
    let mut failures = Vec::new();

    // event family: named projections, their complements, 0, 1, and random
    // draws
    let mut events: Vec<Projection> = vec![Projection::zero(dim), Projection::one(dim)];
    for (_, p) in h.projections() {
        events.push(p.clone());
        events.push(p.complement());
    }
    for _ in 0..8 {
        let rank = rng.gen_range(0..=dim);
        events.push(hilbert::random_projection_rng(dim, rank, &mut rng, false).expect("valid rank"));
    }

    let leq = |e: &Projection, f: &Projection| -> bool {
        matrix::fro_norm(&(e.matrix() * f.complement().matrix())) <= cli.tol
    };
    let mut reflexive = true;
    let mut antisymmetric = true;
    let mut transitive = true;
    for e in &events {
        if !leq(e, e) {
            reflexive = false;
        }
    }
    for e in &events {
        for f in &events {
            if leq(e, f) && leq(f, e) && matrix::fro_dist(e.matrix(), f.matrix()) > cli.tol * 8.0 {
                antisymmetric = false;
                if failures.len() < 8 {
                    failures.push("order not antisymmetric on sampled projections".to_string());
                }
            }
            for g in &events {
                if leq(e, f) && leq(f, g) && !leq(e, g) {
                    transitive = false;
                    if failures.len() < 8 {
                        failures.push("order not transitive on sampled projections".to_string());
                    }
                }
            }
        }
    }

    let mut chain_cases = 0usize;
    let mut chain_consistent_all = true;
    let mut run_pair = |e: &Projection, f: &Projection, label: String| {
        chain_cases += 1;
        match hierarchy::and_candidate(&backend, e, f, cli.tol) {
            Ok(found) => {
                if !found.chain.consistent {
                    chain_consistent_all = false;
                    if failures.len() < 8 {
                        failures.push(format!("and-chain inconsistent at {label}"));
                    }
                }
            }
            Err(err) => {
                chain_consistent_all = false;
                if failures.len() < 8 {
                    failures.push(format!("{label}: {err}"));
                }
            }
        }
    };
    for (en, e) in h.projections() {
        for (fn_, f) in h.projections() {
            run_pair(e, f, format!("named ({en}, {fn_})"));
        }
    }
    for k in 0..cli.samples.min(64) {
        let (e, f) = random_pair_rng(dim, &mut rng);
        run_pair(&e, &f, format!("random pair {k}"));
    }

    let pass = reflexive && antisymmetric && transitive && chain_consistent_all;
    (
        pass,
        LemmasBody::Three {
            support: None,
            order_reflexive: reflexive,
            order_antisymmetric: antisymmetric,
            order_transitive: transitive,
            chain_cases,
            chain_consistent_all,
            failures,
        },
    )
}

fn lemma4_hilbert(cli: &Cli, h: &HilbertScenario) -> (bool, LemmasBody) {
    let dim = h.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(cli.seed);
    let mut failures = Vec::new();
    let mut pass = true;
    let verify_samples = cli.samples.clamp(20, 200);

    let mut associative = Vec::new();
    let mut targets: Vec<(String, Projection)> = h
        .projections()
        .iter()
        .map(|(n, p)| (format!("corner map of `{n}`"), p.clone()))
        .collect();
    for k in 0..3usize {
        let rank = 1 + rng.gen_range(0..dim.max(2) - 1);
        let p = hilbert::random_projection_rng(dim, rank, &mut rng, false).expect("valid rank");
        targets.push((format!("corner map of random projection {k}"), p));
    }
    for (label, p) in &targets {
        let map = PProjectionMap::associative(p);
        let report = verify_p_projection(&map, verify_samples, cli.tol, cli.seed ^ 0xa5a5);
        if !report.pass() {
            pass = false;
            if failures.len() < 8 {
                failures.push(format!("{label}: conditions failed"));
            }
        }
        associative.push(PProjectionSummary { label: label.clone(), report });
    }

    let mut jordan = Vec::new();
    let mut max_corner = 0.0f64;
    for k in 0..3usize {
        let rank = 1 + rng.gen_range(0..dim.max(2) - 1);
        let p = hilbert::random_projection_rng(dim, rank, &mut rng, true).expect("valid rank");
        let label = format!("Jordan map of random symmetric projection {k}");
        match PProjectionMap::jordan(&p) {
            Ok(map) => {
                max_corner = max_corner.max(map.corner_agreement(&p, verify_samples, cli.seed ^ 0x77));
                let report = verify_p_projection(&map, verify_samples, cli.tol, cli.seed ^ 0x1234);
                if !report.pass() {
                    pass = false;
                    if failures.len() < 8 {
                        failures.push(format!("{label}: conditions failed"));
                    }
                }
                jordan.push(PProjectionSummary { label, report });
            }
            Err(err) => {
                pass = false;
                if failures.len() < 8 {
                    failures.push(format!("{label}: {err}"));
                }
            }
        }
    }
    if max_corner > cli.tol {
        pass = false;
        if failures.len() < 8 {
            failures.push(format!("Jordan map deviates from corner map by {max_corner:.3e}"));
        }
    }

    // decomposition d0 = P_e f, d1 = e − d0, d2 = f − d0 wherever e → f
    let mut decompositions = 0usize;
    let mut max_defect = 0.0f64;
    let mut decomposition_pairs: Vec<(Projection, Projection)> = Vec::new();
    let named = h.projections();
    for i in 0..named.len() {
        for j in 0..named.len() {
            decomposition_pairs.push((named[i].1.clone(), named[j].1.clone()));
        }
    }
    for _ in 0..16 {
        // commuting pairs: diagonal patterns in a shared random basis
        let basis = matrix::orthonormal_columns(dim, dim, &mut rng, false);
        let mut pattern_e = vec![0u8; dim];
        let mut pattern_f = vec![0u8; dim];
        for i in 0..dim {
            pattern_e[i] = u8::from(rng.gen::<bool>());
            pattern_f[i] = u8::from(rng.gen::<bool>());
        }
        let build = |pattern: &[u8]| {
            let mut m = matrix::zeros(dim);
            for (i, &bit) in pattern.iter().enumerate() {
                if bit == 1 {
                    let col = basis.column(i);
                    for r in 0..dim {
                        for c in 0..dim {
                            m[(r, c)] += col[r] * col[c].conj();
                        }
                    }
                }
            }
            Projection::new(m, 1e-9).expect("basis blocks are projections")
        };
        decomposition_pairs.push((build(&pattern_e), build(&pattern_f)));
    }
    for (e, f) in &decomposition_pairs {
        match hilbert::lemma4_decomposition(e, f, cli.tol) {
            Ok(Some((d0, d1, d2))) => {
                decompositions += 1;
                let defect = hilbert::orthogonality_defect(&[&d0, &d1, &d2]);
                max_defect = max_defect.max(defect);
                if defect > cli.tol * 8.0 {
                    pass = false;
                    if failures.len() < 8 {
                        failures.push(format!("decomposition not orthogonal: defect {defect:.3e}"));
                    }
                }
            }
            Ok(None) => {}
            Err(err) => {
                pass = false;
                if failures.len() < 8 {
                    failures.push(format!("decomposition failed: {err}"));
                }
            }
        }
    }

    (
        pass,
        LemmasBody::Four {
            associative,
            jordan,
            max_jordan_corner_defect: max_corner,
            decompositions_checked: decompositions,
            max_decomposition_defect: max_defect,
            failures,
        },
    )
}

// -------------------------------------------------------------------------
// joint
// -------------------------------------------------------------------------

fn cmd_joint(
    cli: &Cli,
    target: &str,
    state_name: &str,
    e_name: &str,
    f_name: &str,
) -> Result<CommandOutput, Failure> {
    let scenario = resolve(target)?;
    let (kind, body) = match &scenario {
        Scenario::Hilbert(h) => {
            let e = h
                .projection(e_name)
                .ok_or_else(|| Failure::usage(format!("unknown projection `{e_name}`")))?;
            let f = h
                .projection(f_name)
                .ok_or_else(|| Failure::usage(format!("unknown projection `{f_name}`")))?;
            let rho = h
                .state(state_name)
                .ok_or_else(|| Failure::usage(format!("unknown state `{state_name}`")))?;
            let backend = HilbertBackend::new(h.dim());
            ("hilbert", joint_body(&backend, rho, e, f, state_name, e_name, f_name, cli.tol))
        }
        Scenario::Abstract(a) => {
            let l = &a.logic;
            let e = l
                .by_name(e_name)
                .ok_or_else(|| Failure::usage(format!("unknown element `{e_name}`")))?;
            let f = l
                .by_name(f_name)
                .ok_or_else(|| Failure::usage(format!("unknown element `{f_name}`")))?;
            let raw = a
                .state_values(state_name)
                .ok_or_else(|| Failure::usage(format!("unknown state `{state_name}`")))?;
            let p = states::build_polytope(l).map_err(|e| Failure::validation(e.to_string()))?;
            let mu = states::state_from_values(l, &p, raw, cli.tol)
                .map_err(|e| Failure::validation(e.to_string()))?;
            let backend = AbstractBackend::new(l, &p, &[])
                .map_err(|e| Failure::validation(e.to_string()))?;
            ("abstract", joint_body(&backend, &mu, &e, &f, state_name, e_name, f_name, cli.tol))
        }
    };
    Ok(finish(cli, "joint", target, kind, None, None, true, ReportBody::Joint(body)))
}

#[allow(clippy::too_many_arguments)]
fn joint_body<B: Backend>(
    backend: &B,
    mu: &B::State,
    e: &B::Event,
    f: &B::Event,
    state_name: &str,
    e_name: &str,
    f_name: &str,
    tol: f64,
) -> JointBody {
    let influence_ef = hierarchy::influence_in_state(backend, mu, e, f, tol)
        .map(|c| c.holds)
        .unwrap_or(false);
    let influence_fe = hierarchy::influence_in_state(backend, mu, f, e, tol)
        .map(|c| c.holds)
        .unwrap_or(false);
    let (p, p_error) = split(hierarchy::joint_distribution(backend, mu, e, f, e_name, tol));
    let (q, q_error) = split(hierarchy::joint_distribution(backend, mu, f, e, f_name, tol));
    let swap_max_residual = match (&p, &q) {
        (Some(p), Some(q)) => {
            let mut worst = 0.0f64;
            for k in 0..2 {
                for l in 0..2 {
                    worst = worst.max((p.p(k, l) - q.p(l, k)).abs());
                }
            }
            Some(worst)
        }
        _ => None,
    };
    JointBody {
        state: state_name.to_string(),
        e: e_name.to_string(),
        f: f_name.to_string(),
        p,
        p_error,
        q,
        q_error,
        swap_max_residual,
        influence_ef,
        influence_fe,
    }
}

fn split(
    result: Result<JointDistribution, hierarchy::HierarchyError>,
) -> (Option<JointDistribution>, Option<String>) {
    match result {
        Ok(j) => (Some(j), None),
        Err(err) => (None, Some(err.to_string())),
    }
}
