use rayon::prelude::*;
use voa_core::fields::{
    borcherds_oracle_check, covariance_check, locality_order, n_product, virasoro_bracket_check, FieldError, FieldTable,
    LocalityOrder, Window,
};
use voa_core::models::{Model, ModelDescriptor, ModelError, ModelKind};
use voa_core::reconstruct::{
    axiom_suite, build_y, l1_closure_check, state_of_field, ReconstructError, VAStructure,
};
use voa_core::report::{Check, Status, SuiteReport, Witness, MAX_WITNESSES};
use voa_core::smear::SmearError;
use voa_core::space::Vector;
use voa_core::unitarity::{hermitian_generating_criterion, invariant_form_check};
use voa_core::Scalar;

use crate::config::Suite;

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Reconstruct(#[from] ReconstructError),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Smear(#[from] SmearError),
}

impl RunError {
    /// Budget exhaustion is a truncation outcome; everything else means the
    /// requested structure could not be verified.
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Reconstruct(ReconstructError::BudgetExhausted { .. }) => 3,
            _ => 1,
        }
    }
}

/// A model together with the vertex algebra reconstructed from its
/// generator on degrees `≤ D`.
#[derive(Clone, Debug)]
pub struct Built {
    pub model: Model,
    pub va: VAStructure,
}

impl Built {
    pub fn name(&self) -> String {
        self.model.descriptor.name()
    }

    pub fn depth(&self) -> usize {
        self.model.depth()
    }

    pub fn weight(&self) -> i64 {
        self.model.generator.weight()
    }
}

pub fn build(desc: &ModelDescriptor) -> Result<Built, RunError> {
    let model = desc.build()?;
    let va = build_y(&model.space, &[model.generator.clone()], model.depth())?;
    Ok(Built { model, va })
}

/// Runs the suites in parallel; the result keeps the requested order.
pub fn verify(built: &Built, suites: &[Suite]) -> Result<Vec<SuiteReport>, RunError> {
    suites.par_iter().map(|&s| run_suite(built, s)).collect()
}

pub fn run_suite(built: &Built, suite: Suite) -> Result<SuiteReport, RunError> {
    let checks = match suite {
        Suite::Axioms => return Ok(axiom_suite(&built.va, &built.name())),
        Suite::Locality => locality_checks(built)?,
        Suite::Covariance => covariance_checks(built)?,
        Suite::Reconstruction => reconstruction_checks(built)?,
        Suite::Unitarity => {
            let mut checks = vec![invariant_form_check(&built.va, &built.model.theta)];
            checks.extend(hermitian_generating_criterion(&built.va, &built.model.theta, &built.name()).checks);
            checks
        }
    };
    Ok(SuiteReport::new(suite.name(), built.name(), built.depth(), checks))
}

/// 0 if everything passed, 1 on any failure, 3 if something could only be
/// evaluated beyond the truncation.
pub fn exit_code(reports: &[SuiteReport]) -> i32 {
    match reports.iter().map(|r| r.status).max() {
        Some(Status::Fail) => 1,
        Some(Status::Truncated) | None => 3,
        Some(Status::Pass) => 0,
    }
}

fn locality_check(built: &Built, name: &str, a: &FieldTable, b: &FieldTable, n_max: usize, bound: Option<usize>) -> Check {
    let space = &built.model.space;
    let r = locality_order(space, a, b, n_max, built.depth());
    let mut check = Check::new(name, "(z−w)^N [Y(a,z), Y(b,w)] = 0 for minimal N");
    match r.order {
        LocalityOrder::Local(n) => {
            let within = bound.map_or(true, |b| n <= b);
            check.record(within, || Witness::new("order", format!("≤ {}", bound.unwrap_or(n)), n));
            check.note(format!("N = {n} from {} coefficient identities up to degree {}", r.checked, r.checked_depth));
        }
        LocalityOrder::NotLocalUpTo(m) => check.fail(Witness::new("order", format!("N ≤ {m}"), "no N found")),
    }
    check.finish()
}

fn locality_checks(built: &Built) -> Result<Vec<Check>, RunError> {
    let g = &built.model.generator;
    let d = built.weight() as usize;
    let order = match locality_order(&built.model.space, g, g, 2 * d + 2, built.depth()).order {
        LocalityOrder::Local(n) => Some(n + 1),
        LocalityOrder::NotLocalUpTo(_) => None,
    };
    let modes = built.model.working_depth() as i64;
    Ok(vec![
        locality_check(built, "locality(G,G)", g, g, 2 * d + 2, None),
        locality_check(built, "locality(dG,G)", &g.derivative(), g, 2 * d + 3, order),
        borcherds_oracle_check(&built.model.space, g, g, built.depth(), modes)?,
    ])
}

fn covariance_checks(built: &Built) -> Result<Vec<Check>, RunError> {
    let space = &built.model.space;
    let g = &built.model.generator;
    let depth = built.depth();
    let modes = built.model.working_depth() as i64;
    let mut checks = vec![covariance_as_check(built, g, built.weight(), "covariance(G)")];
    match &built.model.descriptor.model {
        ModelKind::Heisenberg => {
            let t = n_product(g, g, -1)?.scale(&Scalar::new(1, 2));
            let mut c = virasoro_bracket_check(space, &t, &Scalar::one(), depth, modes);
            c.name = "sugawara".into();
            checks.push(c);
            checks.push(covariance_as_check(built, &t, 2, "covariance(sugawara)"));
        }
        ModelKind::Virasoro { c } => checks.push(virasoro_bracket_check(space, g, c, depth, modes)),
    }
    Ok(checks)
}

fn covariance_as_check(built: &Built, a: &FieldTable, d: i64, name: &str) -> Check {
    let space = &built.model.space;
    let r = covariance_check(space, a, d, built.depth());
    let mut check = Check::new(name, "[L_k, φ_m] = (k(d−1) − m) φ_{m+k}, k ∈ {−1, 0, 1}");
    check.checked = r.checked;
    check.truncated = r.truncated;
    check.failures = r.violations.len();
    check.witnesses = r
        .violations
        .iter()
        .take(MAX_WITNESSES)
        .map(|v| Witness::new(format!("k={} m={} v={}", v.k, v.m, space.label(v.degree, v.index)), "equal", "differs"))
        .collect();
    check.note(format!("declared weight d = {d}"));
    check.finish()
}

fn reconstruction_checks(built: &Built) -> Result<Vec<Check>, RunError> {
    let va = &built.va;
    let space = &built.model.space;
    let g = &built.model.generator;

    let mut round = Check::new("round_trip", "Y(state(A)) = A and state(Y(v)) = v");
    let y = va.field_of(&state_of_field(g)?)?;
    for part in y.components() {
        let (checked, bad) = part.compare(g, Window::square(va.depth));
        round.record(checked > 0 && bad.is_empty(), || {
            Witness::new("generator", "entrywise equal", format!("{} of {checked} blocks differ", bad.len()))
        });
    }
    for (d, i) in va.basis() {
        let s = state_of_field(va.y_basis(d, i))?;
        round.record(s.same_coefficients(&Vector::basis(space, d, i)), || {
            Witness::new(format!("state(Y({}))", space.label(d, i)), space.label(d, i), s.describe(space))
        });
    }
    round.note(format!(
        "closure: {} fields, {} candidates evaluated",
        va.closure_origins.len(),
        va.candidates_evaluated
    ));
    let round = round.finish();

    let l1 = l1_closure_all(va)?;
    Ok(vec![round, l1])
}

/// The L₁ relation for every pair of basis fields and every `n` whose
/// product has weight in `[−1, D]`.
pub fn l1_closure_all(va: &VAStructure) -> Result<Check, RunError> {
    let fields: Vec<(usize, usize)> = va.basis().collect();
    let depth = va.depth as i64;
    let triples: Vec<((usize, usize), (usize, usize), i64)> = fields
        .iter()
        .flat_map(|&a| fields.iter().map(move |&b| (a, b)))
        .flat_map(|(a, b)| {
            let top = a.0 as i64 + b.0 as i64 - 1;
            (top - depth..=top + 1).map(move |n| (a, b, n))
        })
        .collect();
    let results: Vec<Check> = triples
        .par_iter()
        .map(|&(a, b, n)| l1_closure_check(va, va.y_basis(a.0, a.1), va.y_basis(b.0, b.1), n))
        .collect::<Result<_, _>>()?;
    let mut total = Check::new("l1_closure", "[L₁, Y(v,z)] = (z²∂ + 2d z) Y(v,z) + Y(L₁v, z) is preserved by (n)-products");
    for (c, &(a, b, n)) in results.iter().zip(&triples) {
        total.checked += c.checked;
        total.truncated += c.truncated;
        total.failures += c.failures;
        for w in &c.witnesses {
            if total.witnesses.len() < MAX_WITNESSES {
                let loc = format!("A=Y({}) B=Y({}) n={n}: {}", va.space.label(a.0, a.1), va.space.label(b.0, b.1), w.location);
                total.witnesses.push(Witness::new(loc, &w.expected, &w.found));
            }
        }
    }
    total.note(format!("{} (A, B, n) triples", triples.len()));
    Ok(total.finish())
}
