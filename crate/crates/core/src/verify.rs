//! Target states and checks: GHZ, W, and graph states, stabilizer
//! expectations, single-excitation canonicalization and fidelity.
//!
//! Logical `|0⟩` is atom `|L⟩`, atom `|g⟩` or field `|0⟩` throughout.

use std::collections::BTreeSet;
use std::f64::consts::FRAC_1_SQRT_2;

use serde::{Deserialize, Serialize};

use crate::elements::LocalGate;
use crate::error::{Error, Result};
use crate::qstate::{PureState, Register, SubsystemKind, C64};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "GraphSpec", into = "GraphSpec")]
pub struct Graph {
    vertices: usize,
    edges: Vec<(usize, usize)>,
}

/// Wire shape: `{"vertices": n, "edges": [[u, v], ...]}`, 0-indexed.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GraphSpec {
    pub vertices: usize,
    pub edges: Vec<[usize; 2]>,
}

impl TryFrom<GraphSpec> for Graph {
    type Error = Error;

    fn try_from(spec: GraphSpec) -> Result<Self> {
        Graph::new(spec.vertices, spec.edges.iter().map(|&[u, v]| (u, v)))
    }
}

impl From<Graph> for GraphSpec {
    fn from(g: Graph) -> Self {
        GraphSpec {
            vertices: g.vertices,
            edges: g.edges.iter().map(|&(u, v)| [u, v]).collect(),
        }
    }
}

impl Graph {
    /// Edges are stored as given (order kept), normalized to `u < v`.
    pub fn new(vertices: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        if vertices == 0 {
            return Err(Error::Graph("graph needs at least one vertex".into()));
        }
        let mut seen = BTreeSet::new();
        let mut list = Vec::new();
        for (u, v) in edges {
            if u >= vertices || v >= vertices {
                return Err(Error::Graph(format!(
                    "edge ({u}, {v}) references a missing vertex (graph has {vertices})"
                )));
            }
            if u == v {
                return Err(Error::Graph(format!("self-loop on vertex {u}")));
            }
            let e = (u.min(v), u.max(v));
            if !seen.insert(e) {
                return Err(Error::Graph(format!("duplicate edge ({}, {})", e.0, e.1)));
            }
            list.push(e);
        }
        Ok(Graph {
            vertices,
            edges: list,
        })
    }

    pub fn empty(n: usize) -> Result<Self> {
        Self::new(n, [])
    }

    pub fn path(n: usize) -> Result<Self> {
        Self::new(n, (1..n).map(|j| (j - 1, j)))
    }

    /// Star centered on vertex 0.
    pub fn star(n: usize) -> Result<Self> {
        Self::new(n, (1..n).map(|j| (0, j)))
    }

    pub fn ring(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::Graph(format!(
                "a ring needs at least 3 vertices, got {n}"
            )));
        }
        Self::new(n, (1..n).map(|j| (j - 1, j)).chain([(0, n - 1)]))
    }

    pub fn vertices(&self) -> usize {
        self.vertices
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> Vec<usize> {
        self.edges
            .iter()
            .filter_map(|&(a, b)| {
                if a == v {
                    Some(b)
                } else if b == v {
                    Some(a)
                } else {
                    None
                }
            })
            .collect()
    }
}

/// One single-qubit gate per subsystem of a register.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalCorrection {
    pub gates: Vec<LocalGate>,
}

impl LocalCorrection {
    pub fn identity(n: usize) -> Self {
        LocalCorrection {
            gates: vec![LocalGate::I; n],
        }
    }

    /// Identity except `gate` on each listed qubit position.
    pub fn on(n: usize, positions: impl IntoIterator<Item = usize>, gate: LocalGate) -> Self {
        let mut c = Self::identity(n);
        for p in positions {
            c.gates[p] = gate;
        }
        c
    }

    pub fn is_identity(&self) -> bool {
        self.gates.iter().all(|g| *g == LocalGate::I)
    }

    pub fn apply(&self, state: &PureState) -> Result<PureState> {
        let reg = state.register();
        if self.gates.len() != reg.len() {
            return Err(Error::Shape(format!(
                "correction has {} gates, register has {} subsystems",
                self.gates.len(),
                reg.len()
            )));
        }
        let mut out = state.clone();
        for (gate, sub) in self.gates.iter().zip(reg.subsystems()) {
            if *gate != LocalGate::I {
                out = out.apply_unitary(&[&sub.label], &gate.matrix())?;
            }
        }
        Ok(out)
    }
}

fn kind_of_label(label: &str) -> Result<(SubsystemKind, usize)> {
    Ok(match label {
        "L" => (SubsystemKind::AtomLR, 0),
        "R" => (SubsystemKind::AtomLR, 1),
        "g" => (SubsystemKind::AtomGe, 0),
        "e" => (SubsystemKind::AtomGe, 1),
        "0" => (SubsystemKind::Field01, 0),
        "1" => (SubsystemKind::Field01, 1),
        other => {
            return Err(Error::InvalidLabel {
                subsystem: "qubit".into(),
                label: other.into(),
            })
        }
    })
}

fn prefix(kind: SubsystemKind) -> &'static str {
    match kind {
        SubsystemKind::Field01 => "f",
        _ => "a",
    }
}

/// `n` two-level subsystems of `kind` named `a1..an` (atoms) or `f1..fn`.
pub fn qubit_register(kind: SubsystemKind, n: usize) -> Result<Register> {
    if kind == SubsystemKind::Path {
        return Err(Error::Parameter(
            "qubit targets cannot live on a path subsystem".into(),
        ));
    }
    Register::qubits(prefix(kind), kind, n)
}

/// `(|z…z⟩ + sign·|z̄…z̄⟩)/√2`; the kind of qubit is inferred from
/// `zero_label` (`L`/`R` atoms, `g`/`e` two-level atoms, `0`/`1` fields).
pub fn ghz_target(n: usize, sign: i32, zero_label: &str) -> Result<PureState> {
    if n < 2 {
        return Err(Error::Parameter(format!("GHZ target needs n ≥ 2, got {n}")));
    }
    if sign != 1 && sign != -1 {
        return Err(Error::Parameter(format!("GHZ sign must be ±1, got {sign}")));
    }
    let (kind, bit) = kind_of_label(zero_label)?;
    let reg = qubit_register(kind, n)?;
    let all = reg.total_dim() - 1;
    let first = if bit == 1 { all } else { 0 };
    let mut amps = vec![C64::new(0.0, 0.0); reg.total_dim()];
    amps[first] = C64::new(FRAC_1_SQRT_2, 0.0);
    amps[all - first] = C64::new(sign as f64 * FRAC_1_SQRT_2, 0.0);
    PureState::from_amplitudes(&reg, amps)
}

/// Uniform single-excitation state on `n` atoms (excitation `|R⟩`).
pub fn w_target(n: usize) -> Result<PureState> {
    w_target_on(SubsystemKind::AtomLR, n)
}

pub fn w_target_on(kind: SubsystemKind, n: usize) -> Result<PureState> {
    if n < 2 {
        return Err(Error::Parameter(format!("W target needs n ≥ 2, got {n}")));
    }
    let reg = qubit_register(kind, n)?;
    let amp = C64::new(1.0 / (n as f64).sqrt(), 0.0);
    let mut amps = vec![C64::new(0.0, 0.0); reg.total_dim()];
    for k in 0..n {
        amps[1 << (n - 1 - k)] = amp;
    }
    PureState::from_amplitudes(&reg, amps)
}

/// Bit mask of qubit `k` in an `n`-qubit register (first qubit most significant).
#[inline]
fn bit(n: usize, k: usize) -> usize {
    1 << (n - 1 - k)
}

/// `∏_{(u,v)∈E} CZ_{uv} |+⟩^⊗n` on cavity fields.
pub fn graph_target(graph: &Graph) -> Result<PureState> {
    graph_target_on(graph, SubsystemKind::Field01)
}

pub fn graph_target_on(graph: &Graph, kind: SubsystemKind) -> Result<PureState> {
    let n = graph.vertices();
    let reg = qubit_register(kind, n)?;
    let amp = 1.0 / ((1usize << n) as f64).sqrt();
    let amps = (0..reg.total_dim())
        .map(|x| {
            let parity = graph
                .edges()
                .iter()
                .filter(|&&(u, v)| x & bit(n, u) != 0 && x & bit(n, v) != 0)
                .count();
            C64::new(if parity % 2 == 0 { amp } else { -amp }, 0.0)
        })
        .collect();
    PureState::from_amplitudes(&reg, amps)
}

fn check_qubits(state: &PureState) -> Result<usize> {
    let reg = state.register();
    if reg.subsystems().iter().any(|s| s.dim != 2) {
        return Err(Error::Shape(
            "expected a register of two-level subsystems".into(),
        ));
    }
    Ok(reg.len())
}

/// `⟨K_v⟩` for every vertex, `K_v = X_v ∏_{w∈N(v)} Z_w`.
pub fn stabilizer_expectations(state: &PureState, graph: &Graph) -> Result<Vec<f64>> {
    let n = check_qubits(state)?;
    if n != graph.vertices() {
        return Err(Error::Shape(format!(
            "state has {n} qubits, graph has {} vertices",
            graph.vertices()
        )));
    }
    let amps = state.amplitudes();
    Ok((0..n)
        .map(|v| {
            let xmask = bit(n, v);
            let zmask = graph.neighbors(v).into_iter().fold(0, |m, w| m | bit(n, w));
            let value: C64 = (0..amps.len())
                .map(|x| {
                    let sign = if (x & zmask).count_ones() % 2 == 0 {
                        1.0
                    } else {
                        -1.0
                    };
                    amps[x ^ xmask].conj() * amps[x] * sign
                })
                .sum();
            value.re
        })
        .collect())
}

/// Remove the relative phases of a single-excitation state with one
/// diagonal phase gate per qubit, making every amplitude real and positive.
pub fn canonicalize_single_excitation(state: &PureState) -> Result<(PureState, LocalCorrection)> {
    let n = check_qubits(state)?;
    let amps = state.amplitudes();
    for i in state.support(1e-12) {
        if i.count_ones() != 1 {
            return Err(Error::NotSingleExcitation(format!(
                "component |{}⟩ has {} excitations",
                state.register().basis_string(i),
                i.count_ones()
            )));
        }
    }
    let gates = (0..n)
        .map(|k| {
            let a = amps[bit(n, k)];
            if a.norm() <= 1e-12 {
                LocalGate::I
            } else {
                LocalGate::unphase(a.arg())
            }
        })
        .collect();
    let correction = LocalCorrection { gates };
    let corrected = correction.apply(state)?;
    Ok((corrected, correction))
}

/// `|⟨target|state⟩|²`. With `ignore_global_phase = false` the overlap must
/// also be in phase: the result is `max(Re⟨target|state⟩, 0)²`.
pub fn fidelity(state: &PureState, target: &PureState, ignore_global_phase: bool) -> Result<f64> {
    let o = target.overlap(state)?;
    Ok(if ignore_global_phase {
        o.norm_sqr()
    } else {
        o.re.max(0.0).powi(2)
    })
}

/// Exhaustive search over per-qubit `{I, X, Z, XZ}` for a correction mapping
/// `state` onto `target` up to global phase. Debugging aid, `4^n` cost.
pub fn search_pauli_correction(
    state: &PureState,
    target: &PureState,
) -> Result<Option<LocalCorrection>> {
    let n = check_qubits(state)?;
    if n > 8 {
        return Err(Error::Parameter(format!(
            "exhaustive search limited to 8 qubits, got {n}"
        )));
    }
    const CHOICES: [LocalGate; 4] = [LocalGate::I, LocalGate::X, LocalGate::Z, LocalGate::XZ];
    for code in 0..(1usize << (2 * n)) {
        let gates = (0..n).map(|k| CHOICES[(code >> (2 * k)) & 3]).collect();
        let c = LocalCorrection { gates };
        if fidelity(&c.apply(state)?, target, true)? > 1.0 - 1e-9 {
            return Ok(Some(c));
        }
    }
    Ok(None)
}
