//! Entanglement-generation circuits: builders, outcome enumeration, JSON
//! reports and the classical retry walk.
//!
//! A [`Scheme`] is a register, an initial product state, an ordered element
//! list, and an exhaustive set of detector outcomes. [`run`] propagates the
//! initial state, projects onto every outcome, removes the flying qubit and
//! applies the recorded local correction.

mod atoms;
mod fields;
mod retry;

use serde::ser::{Serialize, SerializeStruct, Serializer};
use serde_json::value::RawValue;

pub use atoms::{
    build_cluster_atoms, build_ghz_atoms, build_w3_deterministic, build_w3_probabilistic,
    build_w_pow2,
};
pub use fields::{
    build_field_cz_pair, build_field_graph, build_field_graph_kind, build_ghz_fields, graph_passes,
    GraphKind,
};
pub use retry::{
    retry_walk, retry_walk_monte_carlo, MonteCarloResult, RetryWalkParams, RetryWalkResult,
};

use crate::elements::Element;
use crate::error::{Error, Result};
use crate::qstate::{PureState, Register, TOL};
use crate::verify::{fidelity, LocalCorrection};

/// One exhaustive measurement outcome: a basis value for each clicked
/// subsystem, the correction to apply, and the expected corrected state.
#[derive(Debug, Clone, PartialEq)]
pub struct Detector {
    pub id: String,
    /// `(subsystem label, basis index)` pairs, projected in order.
    pub clicks: Vec<(String, usize)>,
    pub correction: LocalCorrection,
    /// `None` marks a failure outcome.
    pub target: Option<PureState>,
}

impl Detector {
    pub fn success(&self) -> bool {
        self.target.is_some()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scheme {
    pub name: String,
    pub n: usize,
    pub register: Register,
    pub elements: Vec<Element>,
    /// One basis label per subsystem of `register`.
    pub initial: Vec<String>,
    /// Subsystems of the flying qubit, removed after detection.
    pub flying: Vec<String>,
    pub detectors: Vec<Detector>,
}

impl Scheme {
    pub fn initial_state(&self) -> Result<PureState> {
        let labels: Vec<&str> = self.initial.iter().map(String::as_str).collect();
        PureState::product_state(&self.register, &labels)
    }

    pub fn validate(&self) -> Result<()> {
        if self.initial.len() != self.register.len() {
            return Err(Error::InvalidConfiguration(format!(
                "{} initial labels for {} subsystems",
                self.initial.len(),
                self.register.len()
            )));
        }
        for f in &self.flying {
            self.register.position(f)?;
        }
        for d in &self.detectors {
            for (label, value) in &d.clicks {
                let sub = self.register.subsystem(label)?;
                if *value >= sub.dim {
                    return Err(Error::InvalidConfiguration(format!(
                        "detector {} reads {label:?} = {value}, dimension is {}",
                        d.id, sub.dim
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn corrections(&self) -> Vec<(&str, &LocalCorrection)> {
        self.detectors
            .iter()
            .map(|d| (d.id.as_str(), &d.correction))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutcomeReport {
    pub detector: String,
    pub success: bool,
    pub probability: f64,
    /// Retained state after projection, before correction. `None` when the
    /// outcome has zero probability.
    pub post_state: Option<PureState>,
    pub corrected_state: Option<PureState>,
    pub correction: LocalCorrection,
    /// `|⟨target|corrected⟩|²`; `None` for failure or impossible outcomes.
    pub fidelity_vs_target: Option<f64>,
}

/// State after the first `count` elements.
pub fn propagate_until(scheme: &Scheme, count: usize) -> Result<PureState> {
    scheme.validate()?;
    let mut state = scheme.initial_state()?;
    for el in scheme.elements.iter().take(count) {
        state = el.apply(&state)?;
    }
    Ok(state)
}

pub fn propagate(scheme: &Scheme) -> Result<PureState> {
    propagate_until(scheme, scheme.elements.len())
}

fn outcome(state: &PureState, scheme: &Scheme, det: &Detector) -> Result<OutcomeReport> {
    let mut prob = 1.0;
    let mut post = Some(state.clone());
    for (label, value) in &det.clicks {
        let Some(current) = post else { break };
        let (p, next) = current.collapse_out(label, *value)?;
        prob *= p;
        post = next;
    }
    let post = match post {
        Some(mut s) => {
            for f in &scheme.flying {
                if s.register().position(f).is_ok() {
                    s = s.factor_out(f)?.0;
                }
            }
            Some(s)
        }
        None => None,
    };
    let corrected = post.as_ref().map(|s| det.correction.apply(s)).transpose()?;
    let fid = match (&corrected, &det.target) {
        (Some(c), Some(t)) => Some(fidelity(c, t, true)?),
        _ => None,
    };
    Ok(OutcomeReport {
        detector: det.id.clone(),
        success: det.success(),
        probability: prob,
        post_state: post,
        corrected_state: corrected,
        correction: det.correction.clone(),
        fidelity_vs_target: fid,
    })
}

/// Propagate and report every detector outcome.
///
/// Fails with [`Error::LossyWiring`] if the outcome probabilities do not
/// sum to one, which means the detectors do not cover every terminal port.
pub fn run(scheme: &Scheme) -> Result<Vec<OutcomeReport>> {
    if scheme.detectors.is_empty() {
        scheme.validate()?;
        return Ok(Vec::new());
    }
    let state = propagate(scheme)?;
    let reports = scheme
        .detectors
        .iter()
        .map(|d| outcome(&state, scheme, d))
        .collect::<Result<Vec<_>>>()?;
    let total: f64 = reports.iter().map(|r| r.probability).sum();
    if (total - 1.0).abs() > TOL {
        return Err(Error::LossyWiring(total));
    }
    Ok(reports)
}

/// JSON number with 17 significant digits; non-finite values become `null`.
#[derive(Debug, Clone, Copy)]
pub struct Num(pub f64);

impl Serialize for Num {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if !self.0.is_finite() {
            return s.serialize_none();
        }
        let raw =
            RawValue::from_string(format!("{:.16e}", self.0)).map_err(serde::ser::Error::custom)?;
        raw.serialize(s)
    }
}

struct StateJson<'a>(&'a PureState);

impl Serialize for StateJson<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let pairs: Vec<[Num; 2]> = self
            .0
            .amplitudes()
            .iter()
            .map(|a| [Num(a.re), Num(a.im)])
            .collect();
        pairs.serialize(s)
    }
}

struct SchemeJson<'a>(&'a Scheme);

impl Serialize for SchemeJson<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let sc = self.0;
        let mut st = s.serialize_struct("Scheme", 5)?;
        st.serialize_field("name", &sc.name)?;
        st.serialize_field("n", &sc.n)?;
        st.serialize_field("subsystems", sc.register.subsystems())?;
        st.serialize_field("elements", &sc.elements)?;
        st.serialize_field("initial", &sc.initial)?;
        st.end()
    }
}

struct OutcomeJson<'a>(&'a OutcomeReport);

impl Serialize for OutcomeJson<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let r = self.0;
        let mut st = s.serialize_struct("Outcome", 7)?;
        st.serialize_field("detector", &r.detector)?;
        st.serialize_field("success", &r.success)?;
        st.serialize_field("probability", &Num(r.probability))?;
        st.serialize_field("fidelity", &r.fidelity_vs_target.map(Num))?;
        st.serialize_field("correction", &r.correction.gates)?;
        st.serialize_field(
            "basis",
            &r.corrected_state.as_ref().map(|c| c.register().labels()),
        )?;
        st.serialize_field(
            "corrected_state",
            &r.corrected_state.as_ref().map(StateJson),
        )?;
        st.end()
    }
}

struct ReportJson<'a> {
    scheme: &'a Scheme,
    outcomes: &'a [OutcomeReport],
}

impl Serialize for ReportJson<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let outcomes: Vec<OutcomeJson> = self.outcomes.iter().map(OutcomeJson).collect();
        let mut st = s.serialize_struct("Report", 2)?;
        st.serialize_field("scheme", &SchemeJson(self.scheme))?;
        st.serialize_field("outcomes", &outcomes)?;
        st.end()
    }
}

/// `{"scheme": {name, n, subsystems, elements, initial}, "outcomes": [...]}`,
/// pretty-printed, with probabilities, fidelities and amplitudes at 17
/// significant digits.
pub fn report_json(scheme: &Scheme, outcomes: &[OutcomeReport]) -> Result<String> {
    serde_json::to_string_pretty(&ReportJson { scheme, outcomes })
        .map_err(|e| Error::InvalidConfiguration(format!("report serialization failed: {e}")))
}
