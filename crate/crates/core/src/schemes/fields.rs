//! Atom-mediated schemes entangling cavity fields.

use super::{Detector, Scheme};
use crate::elements::{Element, LocalGate, PATH};
use crate::error::{Error, Result};
use crate::qstate::{Register, Subsystem};
use crate::verify::{ghz_target, graph_target, Graph, LocalCorrection};

fn field(k: usize) -> String {
    format!("f{}", k + 1)
}

fn atom(k: usize) -> String {
    format!("a{}", k + 1)
}

const FLYING_ATOM: &str = "atom";

/// GHZ state of `n_fields` (even) cavity fields, prepared `|1100…⟩`, from
/// one two-level atom sent through an atomic interferometer. Odd-numbered
/// cavities sit on rail 0, even-numbered on rail 1.
pub fn build_ghz_fields(n_fields: usize) -> Result<Scheme> {
    if n_fields < 2 || !n_fields.is_multiple_of(2) {
        return Err(Error::Parameter(format!(
            "GHZ-fields needs an even number of fields ≥ 2, got {n_fields}"
        )));
    }
    let pattern: Vec<&str> = (0..n_fields)
        .map(|k| if (k / 2) % 2 == 0 { "1" } else { "0" })
        .collect();

    let mut subs: Vec<Subsystem> = (0..n_fields).map(|k| Subsystem::field(field(k))).collect();
    subs.push(Subsystem::atom_ge(FLYING_ATOM));
    subs.push(Subsystem::path(PATH, 2));

    let mut elements = vec![Element::AtomicBeamSplitter { rails: [0, 1] }];
    for k in 0..n_fields {
        elements.push(Element::FieldPiBlock {
            atom: FLYING_ATOM.into(),
            field: field(k),
            rail: Some(k % 2),
        });
    }
    elements.push(Element::AtomicBeamSplitter { rails: [0, 1] });

    // Branch 1 empties or fills the rail-0 cavities; relabel where it reads 1.
    let flips = (0..n_fields).filter(|&k| (pattern[k] == "1") == (k % 2 == 1));
    let correction = LocalCorrection::on(n_fields, flips, LocalGate::X);
    let detectors = [(0, 1), (1, -1)]
        .into_iter()
        .map(|(rail, sign)| {
            Ok(Detector {
                id: format!("D{}", rail + 1),
                clicks: vec![(PATH.into(), rail)],
                correction: correction.clone(),
                target: Some(ghz_target(n_fields, sign, "0")?),
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut initial: Vec<String> = pattern.iter().map(|s| s.to_string()).collect();
    initial.extend(["g".into(), "0".into()]);
    Ok(Scheme {
        name: "ghz-fields".into(),
        n: n_fields,
        register: Register::new(subs)?,
        elements,
        initial,
        flying: vec![PATH.into(), FLYING_ATOM.into()],
        detectors,
    })
}

/// Two-field cluster state: the atom is entangled with field 1 by a π/2
/// pulse and an external π pulse, picks up a conditional phase from field 2
/// in `|+⟩`, and is measured after a Ramsey zone.
pub fn build_field_cz_pair() -> Result<Scheme> {
    let register = Register::new(vec![
        Subsystem::atom_ge("a"),
        Subsystem::field("f1"),
        Subsystem::field("f2"),
    ])?;
    let elements = vec![
        Element::Prepare {
            target: "f2".into(),
            gate: LocalGate::H,
        },
        Element::FieldHalfPiBlock {
            atom: "a".into(),
            field: "f1".into(),
            rail: None,
        },
        Element::ExternalPiPulse { atom: "a".into() },
        Element::DispersiveBlock {
            atom: "a".into(),
            field: "f2".into(),
            rail: None,
        },
        Element::RamseyZone { atom: "a".into() },
    ];
    let target = graph_target(&Graph::path(2)?)?;
    let detectors = vec![
        Detector {
            id: "g".into(),
            clicks: vec![("a".into(), 0)],
            correction: LocalCorrection::identity(2),
            target: Some(target.clone()),
        },
        Detector {
            id: "e".into(),
            clicks: vec![("a".into(), 1)],
            correction: LocalCorrection::on(2, [0], LocalGate::Z),
            target: Some(target),
        },
    ];
    Ok(Scheme {
        name: "field-cz".into(),
        n: 2,
        register,
        elements,
        initial: vec!["g".into(), "1".into(), "0".into()],
        flying: vec!["a".into()],
        detectors,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GraphKind {
    Star,
    Linear,
    Ring,
}

impl std::str::FromStr for GraphKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "star" => Ok(GraphKind::Star),
            "linear" => Ok(GraphKind::Linear),
            "ring" => Ok(GraphKind::Ring),
            other => Err(Error::Parameter(format!(
                "unknown graph kind {other:?} (expected star, linear or ring)"
            ))),
        }
    }
}

/// Dispersive passes `(atom j, cavity k)` realizing every edge of `graph`
/// once: edge `(u, v)` with `u < v` sends atom `v` through cavity `u`.
pub fn graph_passes(graph: &Graph) -> Vec<(usize, usize)> {
    graph.edges().iter().map(|&(u, v)| (v, u)).collect()
}

fn kind_passes(kind: GraphKind, n: usize) -> Vec<(usize, usize)> {
    match kind {
        GraphKind::Star => (1..n).map(|j| (j, 0)).collect(),
        GraphKind::Linear => (1..n).map(|j| (j, j - 1)).collect(),
        GraphKind::Ring => (1..n).map(|j| (j, j - 1)).chain([(0, n - 1)]).collect(),
    }
}

/// Star, linear or ring field graph state on `n` cavities.
pub fn build_field_graph_kind(kind: GraphKind, n: usize) -> Result<Scheme> {
    if n < 2 {
        return Err(Error::Graph(format!("graph scheme needs n ≥ 2, got {n}")));
    }
    let graph = match kind {
        GraphKind::Star => Graph::star(n)?,
        GraphKind::Linear => Graph::path(n)?,
        GraphKind::Ring => Graph::ring(n)?,
    };
    graph_scheme(&graph, &kind_passes(kind, n))
}

/// Graph state of an arbitrary graph, one dispersive pass per edge.
pub fn build_field_graph(graph: &Graph) -> Result<Scheme> {
    graph_scheme(graph, &graph_passes(graph))
}

/// Every carrier atom `j` is first entangled with its own cavity as
/// `(|0,g⟩ + |1,e⟩)/√2`; the other cavities start in `|+⟩`. Atoms then make
/// their passes in order of first appearance, each followed by a Ramsey
/// zone. Outcome `e` on atom `j` needs `Z` on field `j`.
fn graph_scheme(graph: &Graph, passes: &[(usize, usize)]) -> Result<Scheme> {
    let n = graph.vertices();
    let mut carriers: Vec<usize> = Vec::new();
    for &(j, k) in passes {
        if j >= n || k >= n || j == k {
            return Err(Error::Graph(format!(
                "pass ({j}, {k}) invalid for {n} cavities"
            )));
        }
        if !carriers.contains(&j) {
            carriers.push(j);
        }
    }

    let mut subs: Vec<Subsystem> = (0..n).map(|k| Subsystem::field(field(k))).collect();
    let mut by_index = carriers.clone();
    by_index.sort_unstable();
    subs.extend(by_index.iter().map(|&j| Subsystem::atom_ge(atom(j))));

    let mut initial: Vec<String> = (0..n)
        .map(|k| if carriers.contains(&k) { "1" } else { "0" }.to_string())
        .collect();
    initial.extend(by_index.iter().map(|_| "g".to_string()));

    let mut elements = Vec::new();
    for k in 0..n {
        if carriers.contains(&k) {
            elements.push(Element::FieldHalfPiBlock {
                atom: atom(k),
                field: field(k),
                rail: None,
            });
            elements.push(Element::ExternalPiPulse { atom: atom(k) });
        } else {
            elements.push(Element::Prepare {
                target: field(k),
                gate: LocalGate::H,
            });
        }
    }
    for &j in &carriers {
        for &(_, k) in passes.iter().filter(|(a, _)| *a == j) {
            elements.push(Element::DispersiveBlock {
                atom: atom(j),
                field: field(k),
                rail: None,
            });
        }
        elements.push(Element::RamseyZone { atom: atom(j) });
    }

    let target = graph_target(graph)?;
    let m = by_index.len();
    let detectors = (0..1usize << m)
        .map(|bits| {
            let outcome = |i: usize| (bits >> (m - 1 - i)) & 1;
            let id = if m == 0 {
                "none".to_string()
            } else {
                by_index
                    .iter()
                    .enumerate()
                    .map(|(i, &j)| format!("{}={}", atom(j), ["g", "e"][outcome(i)]))
                    .collect::<Vec<_>>()
                    .join(",")
            };
            let flips = by_index
                .iter()
                .enumerate()
                .filter(|&(i, _)| outcome(i) == 1)
                .map(|(_, &j)| j);
            Detector {
                id,
                clicks: by_index
                    .iter()
                    .enumerate()
                    .map(|(i, &j)| (atom(j), outcome(i)))
                    .collect(),
                correction: LocalCorrection::on(n, flips, LocalGate::Z),
                target: Some(target.clone()),
            }
        })
        .collect();

    Ok(Scheme {
        name: "graph".into(),
        n,
        register: Register::new(subs)?,
        elements,
        initial,
        flying: by_index.iter().map(|&j| atom(j)).collect(),
        detectors,
    })
}
