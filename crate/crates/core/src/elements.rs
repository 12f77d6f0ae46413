//! Network elements and the unitaries they implement.
//!
//! Rail (path-mode) elements act on the `path` subsystem of a scheme; blocks
//! that involve an atom act only on the branch where the flying qubit
//! occupies their rail. Field blocks used without a path subsystem (e.g. an
//! atom flying through a fixed sequence of cavities) carry `rail: None`.
//!
//! Basis order for two-subsystem blocks follows the target order given in
//! each constructor's doc, first target most significant.

use std::f64::consts::FRAC_1_SQRT_2;

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qstate::{real_matrix, Matrix, PureState, C64, ZERO_PROBABILITY};

/// Label of the flying qubit's path subsystem in every scheme.
pub const PATH: &str = "path";
/// Label of the photon polarization subsystem.
pub const POL: &str = "pol";

/// Beam splitter of reflectivity `R` on (top, bottom) rails:
/// `[[√(1−R), √R], [√R, −√(1−R)]]`. The sign sits on the bottom rail, so the
/// matrix is real symmetric and its own inverse.
pub fn bs_unitary(reflectivity: f64) -> Result<Matrix> {
    if !(reflectivity > 0.0 && reflectivity < 1.0) {
        return Err(Error::Parameter(format!(
            "beam splitter reflectivity {reflectivity} outside (0, 1)"
        )));
    }
    let t = (1.0 - reflectivity).sqrt();
    let r = reflectivity.sqrt();
    Ok(real_matrix(2, &[t, r, r, -t]))
}

/// 50/50 atomic beam splitter on momentum modes (p₀, p₋₂).
pub fn atomic_bs_unitary() -> Matrix {
    real_matrix(
        2,
        &[FRAC_1_SQRT_2, FRAC_1_SQRT_2, FRAC_1_SQRT_2, -FRAC_1_SQRT_2],
    )
}

/// Adiabatic cavity-atom flip block on (atom-LR, pol-LR).
///
/// Matched pairs swap, `|L,𝓛⟩ ↔ |R,𝓡⟩`, with unit amplitude. A photon whose
/// polarization does not couple to the atom's current state sees an empty
/// resonant cavity and reflects with phase −1.
pub fn cavity_atom_block_unitary() -> Matrix {
    // basis: L𝓛, L𝓡, R𝓛, R𝓡
    real_matrix(
        4,
        &[
            0., 0., 0., 1., //
            0., -1., 0., 0., //
            0., 0., -1., 0., //
            1., 0., 0., 0.,
        ],
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PbsPort {
    Transmit,
    Reflect,
}

/// Output port of a polarizing beam splitter: 𝓛 transmits, 𝓡 reflects.
pub fn pbs_route(pol: &str) -> Result<PbsPort> {
    match pol {
        "L" | "𝓛" => Ok(PbsPort::Transmit),
        "R" | "𝓡" => Ok(PbsPort::Reflect),
        other => Err(Error::InvalidLabel {
            subsystem: POL.into(),
            label: other.into(),
        }),
    }
}

/// Polarizing beam splitter on (two rails, pol): 𝓛 keeps its rail, 𝓡
/// crosses to the other one. Phaseless permutation.
pub fn pbs_unitary() -> Matrix {
    // basis: (rail a, 𝓛), (a, 𝓡), (b, 𝓛), (b, 𝓡)
    real_matrix(
        4,
        &[
            1., 0., 0., 0., //
            0., 0., 0., 1., //
            0., 0., 1., 0., //
            0., 1., 0., 0.,
        ],
    )
}

/// Polarization rotator, `|𝓛⟩ ↔ |𝓡⟩`.
pub fn pr_unitary() -> Matrix {
    real_matrix(2, &[0., 1., 1., 0.])
}

/// Resonant π-pulse exchange on (atom-ge, field-01): `|g,1⟩ → |e,0⟩`,
/// `|e,0⟩ → −|g,1⟩`. `|e,1⟩` is left alone here, callers must reject it.
pub fn field_pi_block_unitary() -> Matrix {
    // basis: g0, g1, e0, e1
    real_matrix(
        4,
        &[
            1., 0., 0., 0., //
            0., 0., -1., 0., //
            0., 1., 0., 0., //
            0., 0., 0., 1.,
        ],
    )
}

/// π/2-pulse version of [`field_pi_block_unitary`].
pub fn field_half_pi_block_unitary() -> Matrix {
    let h = FRAC_1_SQRT_2;
    real_matrix(
        4,
        &[
            1., 0., 0., 0., //
            0., h, -h, 0., //
            0., h, h, 0., //
            0., 0., 0., 1.,
        ],
    )
}

/// Dispersive phase on (atom-ge, field-01): −1 on `|e,1⟩` only.
pub fn dispersive_unitary() -> Matrix {
    let mut u = Array2::from_diag_elem(4, C64::new(1.0, 0.0));
    u[[3, 3]] = C64::new(-1.0, 0.0);
    u
}

/// `|g⟩ → (|g⟩+|e⟩)/√2`, `|e⟩ → (|g⟩−|e⟩)/√2`.
pub fn ramsey_unitary() -> Matrix {
    atomic_bs_unitary()
}

pub fn external_pi_unitary() -> Matrix {
    real_matrix(2, &[0., 1., 1., 0.])
}

/// Single-qubit gates used for state preparation and local corrections.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "gate", content = "phase")]
pub enum LocalGate {
    I,
    X,
    Z,
    /// `Z·X`.
    XZ,
    /// Hadamard form, same matrix as the Ramsey zone.
    H,
    /// `diag(1, e^{iφ})`.
    Phase(f64),
}

impl LocalGate {
    pub fn matrix(&self) -> Matrix {
        match *self {
            LocalGate::I => real_matrix(2, &[1., 0., 0., 1.]),
            LocalGate::X => real_matrix(2, &[0., 1., 1., 0.]),
            LocalGate::Z => real_matrix(2, &[1., 0., 0., -1.]),
            LocalGate::XZ => real_matrix(2, &[0., 1., -1., 0.]),
            LocalGate::H => ramsey_unitary(),
            LocalGate::Phase(phi) => {
                let mut u = Array2::from_diag_elem(2, C64::new(1.0, 0.0));
                u[[1, 1]] = C64::from_polar(1.0, phi);
                u
            }
        }
    }

    /// Phase gate that rotates an amplitude of argument `arg` onto the
    /// positive real axis, using I or Z for the real cases.
    pub fn unphase(arg: f64) -> LocalGate {
        let wrapped = (-arg).rem_euclid(2.0 * std::f64::consts::PI);
        if wrapped.abs() < 1e-12 || (wrapped - 2.0 * std::f64::consts::PI).abs() < 1e-12 {
            LocalGate::I
        } else if (wrapped - std::f64::consts::PI).abs() < 1e-12 {
            LocalGate::Z
        } else {
            LocalGate::Phase(wrapped)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum Element {
    BeamSplitter {
        reflectivity: f64,
        rails: [usize; 2],
    },
    AtomicBeamSplitter {
        rails: [usize; 2],
    },
    PolarizingBeamSplitter {
        rails: [usize; 2],
    },
    PolarizationRotator {
        rail: usize,
    },
    PhaseShifter {
        rail: usize,
        phase: f64,
    },
    /// Redirects one rail onto another (exchange of the two modes).
    Mirror {
        rails: [usize; 2],
    },
    CavityAtomBlock {
        atom: String,
        rail: usize,
    },
    FieldPiBlock {
        atom: String,
        field: String,
        rail: Option<usize>,
    },
    FieldHalfPiBlock {
        atom: String,
        field: String,
        rail: Option<usize>,
    },
    DispersiveBlock {
        atom: String,
        field: String,
        rail: Option<usize>,
    },
    RamseyZone {
        atom: String,
    },
    ExternalPiPulse {
        atom: String,
    },
    /// Local state preparation on a stationary subsystem.
    Prepare {
        target: String,
        gate: LocalGate,
    },
}

/// `modes × modes` identity with a 2×2 block on rails `(a, b)`.
fn embed_rails(block: &Matrix, modes: usize, [a, b]: [usize; 2]) -> Result<Matrix> {
    if a >= modes || b >= modes || a == b {
        return Err(Error::InvalidConfiguration(format!(
            "rails ({a}, {b}) invalid for {modes} path modes"
        )));
    }
    let mut u = Array2::from_diag_elem(modes, C64::new(1.0, 0.0));
    u[[a, a]] = block[[0, 0]];
    u[[a, b]] = block[[0, 1]];
    u[[b, a]] = block[[1, 0]];
    u[[b, b]] = block[[1, 1]];
    Ok(u)
}

fn path_modes(state: &PureState) -> Result<usize> {
    Ok(state.register().subsystem(PATH)?.dim)
}

fn check_rail(state: &PureState, rail: usize) -> Result<()> {
    let modes = path_modes(state)?;
    if rail >= modes {
        return Err(Error::InvalidConfiguration(format!(
            "rail {rail} invalid for {modes} path modes"
        )));
    }
    Ok(())
}

/// Reject amplitude in the two-excitation sector `|e,1⟩`, where the pulse
/// area of a calibrated π or π/2 block is wrong.
fn check_no_double_excitation(
    state: &PureState,
    atom: &str,
    field: &str,
    rail: Option<usize>,
) -> Result<()> {
    let reg = state.register();
    let a = reg.position(atom)?;
    let f = reg.position(field)?;
    let p = match rail {
        Some(_) => Some(reg.position(PATH)?),
        None => None,
    };
    let weight: f64 = state
        .amplitudes()
        .iter()
        .enumerate()
        .filter(|&(i, _)| {
            reg.digit(i, a) == 1
                && reg.digit(i, f) == 1
                && p.zip(rail).is_none_or(|(p, r)| reg.digit(i, p) == r)
        })
        .map(|(_, z)| z.norm_sqr())
        .sum();
    if weight.sqrt() > ZERO_PROBABILITY {
        return Err(Error::InvalidConfiguration(format!(
            "atom {atom:?} and field {field:?} populate |e,1⟩ (amplitude {:.3e})",
            weight.sqrt()
        )));
    }
    Ok(())
}

fn apply_on_rail(
    state: &PureState,
    rail: Option<usize>,
    targets: &[&str],
    u: &Matrix,
) -> Result<PureState> {
    match rail {
        Some(r) => {
            check_rail(state, r)?;
            state.apply_controlled(PATH, r, targets, u)
        }
        None => state.apply_unitary(targets, u),
    }
}

impl Element {
    pub fn apply(&self, state: &PureState) -> Result<PureState> {
        match self {
            Element::BeamSplitter {
                reflectivity,
                rails,
            } => {
                let u = embed_rails(&bs_unitary(*reflectivity)?, path_modes(state)?, *rails)?;
                state.apply_unitary(&[PATH], &u)
            }
            Element::AtomicBeamSplitter { rails } => {
                let u = embed_rails(&atomic_bs_unitary(), path_modes(state)?, *rails)?;
                state.apply_unitary(&[PATH], &u)
            }
            Element::Mirror { rails } => {
                let u = embed_rails(
                    &real_matrix(2, &[0., 1., 1., 0.]),
                    path_modes(state)?,
                    *rails,
                )?;
                state.apply_unitary(&[PATH], &u)
            }
            Element::PhaseShifter { rail, phase } => {
                check_rail(state, *rail)?;
                let mut u = Array2::from_diag_elem(path_modes(state)?, C64::new(1.0, 0.0));
                u[[*rail, *rail]] = C64::from_polar(1.0, *phase);
                state.apply_unitary(&[PATH], &u)
            }
            Element::PolarizingBeamSplitter { rails } => {
                let modes = path_modes(state)?;
                let crossed = embed_rails(&real_matrix(2, &[0., 1., 1., 0.]), modes, *rails)?;
                // 𝓛 branch untouched, 𝓡 branch exchanges the rails.
                state.apply_controlled(POL, 1, &[PATH], &crossed)
            }
            Element::PolarizationRotator { rail } => {
                apply_on_rail(state, Some(*rail), &[POL], &pr_unitary())
            }
            Element::CavityAtomBlock { atom, rail } => apply_on_rail(
                state,
                Some(*rail),
                &[atom, POL],
                &cavity_atom_block_unitary(),
            ),
            Element::FieldPiBlock { atom, field, rail } => {
                check_no_double_excitation(state, atom, field, *rail)?;
                apply_on_rail(state, *rail, &[atom, field], &field_pi_block_unitary())
            }
            Element::FieldHalfPiBlock { atom, field, rail } => {
                check_no_double_excitation(state, atom, field, *rail)?;
                apply_on_rail(state, *rail, &[atom, field], &field_half_pi_block_unitary())
            }
            Element::DispersiveBlock { atom, field, rail } => {
                apply_on_rail(state, *rail, &[atom, field], &dispersive_unitary())
            }
            Element::RamseyZone { atom } => state.apply_unitary(&[atom], &ramsey_unitary()),
            Element::ExternalPiPulse { atom } => {
                state.apply_unitary(&[atom], &external_pi_unitary())
            }
            Element::Prepare { target, gate } => state.apply_unitary(&[target], &gate.matrix()),
        }
    }

    /// Mode matrix of a passive rail element, `None` for anything else.
    fn rail_matrix(&self, modes: usize) -> Result<Option<Matrix>> {
        Ok(Some(match self {
            Element::BeamSplitter {
                reflectivity,
                rails,
            } => embed_rails(&bs_unitary(*reflectivity)?, modes, *rails)?,
            Element::AtomicBeamSplitter { rails } => {
                embed_rails(&atomic_bs_unitary(), modes, *rails)?
            }
            Element::Mirror { rails } => {
                embed_rails(&real_matrix(2, &[0., 1., 1., 0.]), modes, *rails)?
            }
            Element::PhaseShifter { rail, phase } => {
                if *rail >= modes {
                    return Err(Error::InvalidConfiguration(format!(
                        "rail {rail} out of range"
                    )));
                }
                let mut u = Array2::from_diag_elem(modes, C64::new(1.0, 0.0));
                u[[*rail, *rail]] = C64::from_polar(1.0, *phase);
                u
            }
            _ => return Ok(None),
        }))
    }
}

/// Single-particle transfer matrix of a sequence of passive rail elements:
/// entry `[out, in]` is the amplitude to go from rail `in` to rail `out`.
pub fn path_transfer(elements: &[Element], modes: usize) -> Result<Matrix> {
    let mut total = Array2::from_diag_elem(modes, C64::new(1.0, 0.0));
    for el in elements {
        let u = el.rail_matrix(modes)?.ok_or_else(|| {
            Error::InvalidConfiguration(format!("{el:?} is not a passive rail element"))
        })?;
        total = u.dot(&total);
    }
    Ok(total)
}
