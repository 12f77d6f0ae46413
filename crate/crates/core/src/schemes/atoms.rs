//! Photon-mediated schemes entangling atoms held in cavities.
//!
//! Register layout: atoms `a1..an` (L/R), then the photon's `path` and
//! `pol`. The photon always enters rail 0 left-circularly polarized.

use std::f64::consts::FRAC_PI_2;

use super::{Detector, Scheme};
use crate::elements::{path_transfer, Element, LocalGate, PATH, POL};
use crate::error::{Error, Result};
use crate::qstate::{PureState, Register, Subsystem, SubsystemKind};
use crate::verify::{ghz_target, graph_target_on, w_target, Graph, LocalCorrection};

fn atom(k: usize) -> String {
    format!("a{}", k + 1)
}

fn photonic_register(n_atoms: usize, modes: usize) -> Result<Register> {
    let mut subs: Vec<Subsystem> = (0..n_atoms).map(|k| Subsystem::atom_lr(atom(k))).collect();
    subs.push(Subsystem::path(PATH, modes));
    subs.push(Subsystem::pol(POL));
    Register::new(subs)
}

fn photonic_initial(atoms: impl IntoIterator<Item = &'static str>) -> Vec<String> {
    atoms
        .into_iter()
        .chain(["0", "L"])
        .map(String::from)
        .collect()
}

fn bs(reflectivity: f64, a: usize, b: usize) -> Element {
    Element::BeamSplitter {
        reflectivity,
        rails: [a, b],
    }
}

fn port_detector(
    id: String,
    rail: usize,
    correction: LocalCorrection,
    target: Option<PureState>,
) -> Detector {
    Detector {
        id,
        clicks: vec![(PATH.to_string(), rail)],
        correction,
        target,
    }
}

/// GHZ state of `n_atoms` (even) atoms from one photon in a two-arm
/// interferometer. Odd-numbered atoms sit on rail 0, even-numbered on rail 1;
/// the alternating initial pattern `LLRRLL…` keeps the photon resonant with
/// every cavity it meets.
pub fn build_ghz_atoms(n_atoms: usize) -> Result<Scheme> {
    if n_atoms < 2 || !n_atoms.is_multiple_of(2) {
        return Err(Error::Parameter(format!(
            "GHZ-atoms needs an even number of atoms ≥ 2, got {n_atoms}"
        )));
    }
    let pattern: Vec<&'static str> = (0..n_atoms)
        .map(|k| if (k / 2) % 2 == 0 { "L" } else { "R" })
        .collect();

    let mut elements = vec![bs(0.5, 0, 1)];
    for k in 0..n_atoms {
        elements.push(Element::CavityAtomBlock {
            atom: atom(k),
            rail: k % 2,
        });
    }
    elements.push(bs(0.5, 0, 1));

    // Branch 1 flips the rail-0 atoms; relabel wherever it reads L.
    let flips = (0..n_atoms).filter(|&k| {
        let flipped = k % 2 == 0;
        (pattern[k] == "L") == !flipped
    });
    let correction = LocalCorrection::on(n_atoms, flips, LocalGate::X);
    let detectors = vec![
        port_detector(
            "D1".into(),
            0,
            correction.clone(),
            Some(ghz_target(n_atoms, 1, "R")?),
        ),
        port_detector(
            "D2".into(),
            1,
            correction,
            Some(ghz_target(n_atoms, -1, "R")?),
        ),
    ];

    Ok(Scheme {
        name: "ghz-atoms".into(),
        n: n_atoms,
        register: photonic_register(n_atoms, 2)?,
        elements,
        initial: photonic_initial(pattern),
        flying: vec![PATH.into(), POL.into()],
        detectors,
    })
}

/// Balanced 50/50 tree fanning rail `lo` over rails `lo..lo+size`.
fn fan_tree(lo: usize, size: usize, out: &mut Vec<Element>) {
    if size < 2 {
        return;
    }
    let half = size / 2;
    out.push(bs(0.5, lo, lo + half));
    fan_tree(lo, half, out);
    fan_tree(lo + half, half, out);
}

/// Butterfly of 50/50 splitters on rails `0..size` (a power of two). Its
/// transfer matrix is the Sylvester-Hadamard matrix, so every rail reaches
/// every detector with amplitude `±1/√size`. The plain mirror image of the
/// fan tree would not do: it returns most rails to only a few detectors.
fn butterfly(size: usize) -> Vec<Element> {
    let mut out = Vec::new();
    let mut span = 1;
    while span < size {
        for i in (0..size).filter(|i| i & span == 0) {
            out.push(bs(0.5, i, i + span));
        }
        span *= 2;
    }
    out
}

/// W-type scheme: `fan` spreads the photon, atom `k` sits on rail `k`, and
/// `recombine` mixes the rails before detection. Rails listed in `failure`
/// are detectors that herald no entanglement.
fn w_scheme(
    name: &str,
    n_atoms: usize,
    modes: usize,
    fan: Vec<Element>,
    recombine: Vec<Element>,
    failure: &[usize],
) -> Result<Scheme> {
    let f = path_transfer(&fan, modes)?;
    let v = path_transfer(&recombine, modes)?;
    let target = w_target(n_atoms)?;

    let detectors = (0..modes)
        .map(|d| {
            let id = format!("D{}", d + 1);
            if failure.contains(&d) {
                return port_detector(id, d, LocalCorrection::identity(n_atoms), None);
            }
            let gates = (0..n_atoms)
                .map(|k| LocalGate::unphase((v[[d, k]] * f[[k, 0]]).arg()))
                .collect();
            port_detector(id, d, LocalCorrection { gates }, Some(target.clone()))
        })
        .collect();

    let mut elements = fan;
    elements.extend((0..n_atoms).map(|k| Element::CavityAtomBlock {
        atom: atom(k),
        rail: k,
    }));
    elements.extend(recombine);

    Ok(Scheme {
        name: name.into(),
        n: n_atoms,
        register: photonic_register(n_atoms, modes)?,
        elements,
        initial: photonic_initial(vec!["L"; n_atoms]),
        flying: vec![PATH.into(), POL.into()],
        detectors,
    })
}

/// W state of `n_atoms = 2^m` atoms: a balanced beam-splitter tree, one
/// cavity per rail, and a butterfly recombination before `n_atoms` detectors.
pub fn build_w_pow2(n_atoms: usize) -> Result<Scheme> {
    if n_atoms < 2 || !n_atoms.is_power_of_two() {
        return Err(Error::Parameter(format!(
            "W scheme needs a power of two ≥ 2 atoms, got {n_atoms}"
        )));
    }
    let mut fan = Vec::new();
    fan_tree(0, n_atoms, &mut fan);
    w_scheme("w", n_atoms, n_atoms, fan, butterfly(n_atoms), &[])
}

/// Three-atom W state from the four-rail tree with the fourth cavity
/// removed: its rail is diverted by a mirror to detector D5, which heralds
/// failure with probability 1/4.
pub fn build_w3_probabilistic() -> Result<Scheme> {
    let mut fan = Vec::new();
    fan_tree(0, 4, &mut fan);
    fan.push(Element::Mirror { rails: [3, 4] });
    w_scheme("w3-prob", 3, 5, fan, butterfly(4), &[4])
}

/// Three-atom W state with certainty: a 1/3 and a 1/2 beam splitter fan the
/// photon evenly over three rails, and a tritter (every entry of modulus
/// 1/√3) erases which-cavity information.
pub fn build_w3_deterministic() -> Result<Scheme> {
    let fan = vec![bs(1.0 / 3.0, 0, 1), bs(0.5, 0, 2)];
    let recombine = vec![
        bs(0.5, 0, 2),
        bs(1.0 / 3.0, 0, 1),
        Element::PhaseShifter {
            rail: 2,
            phase: FRAC_PI_2,
        },
        bs(0.5, 1, 2),
    ];
    w_scheme("w3-det", 3, 3, fan, recombine, &[])
}

/// Linear cluster state of `n_atoms` atoms from a chain of Mach-Zehnder
/// stages. In each stage rail 1 passes cavity `i` and a polarization
/// rotator, then a 50/50 splitter closes the stage. Outcome D2 needs `Z` on
/// the last atom.
pub fn build_cluster_atoms(n_atoms: usize) -> Result<Scheme> {
    if n_atoms < 1 {
        return Err(Error::Parameter(
            "cluster scheme needs at least one atom".into(),
        ));
    }
    let mut elements = vec![bs(0.5, 0, 1)];
    for k in 0..n_atoms {
        elements.push(Element::CavityAtomBlock {
            atom: atom(k),
            rail: 1,
        });
        elements.push(Element::PolarizationRotator { rail: 1 });
        elements.push(bs(0.5, 0, 1));
    }
    let target = graph_target_on(&Graph::path(n_atoms)?, SubsystemKind::AtomLR)?;
    let detectors = vec![
        port_detector(
            "D1".into(),
            0,
            LocalCorrection::identity(n_atoms),
            Some(target.clone()),
        ),
        port_detector(
            "D2".into(),
            1,
            LocalCorrection::on(n_atoms, [n_atoms - 1], LocalGate::Z),
            Some(target),
        ),
    ];
    Ok(Scheme {
        name: "cluster".into(),
        n: n_atoms,
        register: photonic_register(n_atoms, 2)?,
        elements,
        initial: photonic_initial(vec!["L"; n_atoms]),
        flying: vec![PATH.into(), POL.into()],
        detectors,
    })
}
