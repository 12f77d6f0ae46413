//! Independent reference implementations used as test oracles.
//!
//! Nothing here calls the crate's integrator or state engine; only plain
//! data (element lists, register shapes) is read from the crate.

#![allow(dead_code)]

use std::collections::BTreeMap;

use cqed_net::elements::{Element, LocalGate, PATH, POL};
use cqed_net::qstate::{Register, C64};

/// Flip and no-flip probabilities from a textbook RK4 with half the
/// crate's default step and a longer window.
pub fn rk4_flip_oracle(g_l: f64, g_r: f64, kappa: f64, tau: f64) -> (f64, f64) {
    let big_g = (g_l * g_l + g_r * g_r).sqrt();
    let mut h = tau.min(1.0 / kappa);
    if big_g > 0.0 {
        h = h.min(1.0 / big_g);
    }
    h /= 200.0;

    // Slowest eigenvalue of the homogeneous 3×3 system, found by hand.
    let disc = kappa * kappa / 16.0 - big_g * big_g;
    let slow = if big_g == 0.0 {
        kappa / 2.0
    } else if disc <= 0.0 {
        kappa / 4.0
    } else {
        kappa / 4.0 - disc.sqrt()
    };
    let tail = (40.0 / slow).min(800.0 / kappa).max(20.0 / kappa);
    let t0 = -7.0 * tau;
    let t1 = 7.0 * tau + tail;
    let steps = ((t1 - t0) / h).ceil() as usize;
    let h = (t1 - t0) / steps as f64;

    let norm = 1.0 / (tau * std::f64::consts::PI.sqrt());
    let drive = |t: f64| (norm * (-(t * t) / (tau * tau)).exp()).sqrt();
    let sk = kappa.sqrt();
    let deriv = |y: [f64; 3], f: f64| {
        [
            -0.5 * kappa * y[0] - g_l * y[2] - sk * f,
            -0.5 * kappa * y[1] - g_r * y[2],
            g_l * y[0] + g_r * y[1],
        ]
    };
    let add =
        |y: [f64; 3], k: [f64; 3], s: f64| [y[0] + s * k[0], y[1] + s * k[1], y[2] + s * k[2]];

    let mut y = [0.0f64; 3];
    let mut flip = Vec::with_capacity(steps + 1);
    let mut noflip = Vec::with_capacity(steps + 1);
    let mut t = t0;
    flip.push(0.0);
    noflip.push(drive(t).powi(2));
    for i in 0..steps {
        let k1 = deriv(y, drive(t));
        let k2 = deriv(add(y, k1, h / 2.0), drive(t + h / 2.0));
        let k3 = deriv(add(y, k2, h / 2.0), drive(t + h / 2.0));
        let k4 = deriv(add(y, k3, h), drive(t + h));
        for j in 0..3 {
            y[j] += h * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]) / 6.0;
        }
        t = t0 + (i + 1) as f64 * h;
        flip.push((sk * y[1]).powi(2));
        noflip.push((drive(t) + sk * y[0]).powi(2));
    }
    let integrate = |v: &[f64]| {
        let inner: f64 = v[1..v.len() - 1].iter().sum();
        h * (inner + 0.5 * (v[0] + v[v.len() - 1]))
    };
    (integrate(&flip), integrate(&noflip))
}

/// Sparse state keyed by the digit string of every subsystem.
pub type Sparse = BTreeMap<Vec<usize>, C64>;

fn c(x: f64) -> C64 {
    C64::new(x, 0.0)
}

fn push(out: &mut Sparse, key: Vec<usize>, amp: C64) {
    *out.entry(key).or_insert(C64::new(0.0, 0.0)) += amp;
}

/// Apply `rule` to every basis component; `rule` returns the successor
/// components of one basis state.
fn map(state: &Sparse, rule: impl Fn(&[usize]) -> Vec<(Vec<usize>, C64)>) -> Sparse {
    let mut out = Sparse::new();
    for (k, a) in state {
        for (k2, b) in rule(k) {
            push(&mut out, k2, a * b);
        }
    }
    out.retain(|_, a| a.norm() > 1e-14);
    out
}

fn with(k: &[usize], pos: usize, v: usize) -> Vec<usize> {
    let mut k = k.to_vec();
    k[pos] = v;
    k
}

fn with2(k: &[usize], p1: usize, v1: usize, p2: usize, v2: usize) -> Vec<usize> {
    let mut k = k.to_vec();
    k[p1] = v1;
    k[p2] = v2;
    k
}

fn bs_rule(k: &[usize], p: usize, r: f64, a: usize, b: usize) -> Vec<(Vec<usize>, C64)> {
    let (t, s) = ((1.0 - r).sqrt(), r.sqrt());
    if k[p] == a {
        vec![(with(k, p, a), c(t)), (with(k, p, b), c(s))]
    } else if k[p] == b {
        vec![(with(k, p, a), c(s)), (with(k, p, b), c(-t))]
    } else {
        vec![(k.to_vec(), c(1.0))]
    }
}

/// Atom (g/e) plus field (0/1) rules, each from its defining transformation.
fn atom_field_rule(k: &[usize], a: usize, f: usize, el: &Element) -> Vec<(Vec<usize>, C64)> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    match (el, k[a], k[f]) {
        (_, 0, 0) => vec![(k.to_vec(), c(1.0))],
        (Element::DispersiveBlock { .. }, 1, 1) => vec![(k.to_vec(), c(-1.0))],
        (Element::DispersiveBlock { .. }, _, _) => vec![(k.to_vec(), c(1.0))],
        (_, 1, 1) => panic!("oracle: |e,1⟩ populated"),
        (Element::FieldPiBlock { .. }, 0, 1) => vec![(with2(k, a, 1, f, 0), c(1.0))],
        (Element::FieldPiBlock { .. }, 1, 0) => vec![(with2(k, a, 0, f, 1), c(-1.0))],
        (Element::FieldHalfPiBlock { .. }, 0, 1) => {
            vec![(k.to_vec(), c(h)), (with2(k, a, 1, f, 0), c(h))]
        }
        (Element::FieldHalfPiBlock { .. }, 1, 0) => {
            vec![(with2(k, a, 0, f, 1), c(-h)), (k.to_vec(), c(h))]
        }
        _ => unreachable!(),
    }
}

fn hadamard_rule(k: &[usize], p: usize) -> Vec<(Vec<usize>, C64)> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let sign = if k[p] == 0 { 1.0 } else { -1.0 };
    vec![(with(k, p, 0), c(h)), (with(k, p, 1), c(sign * h))]
}

/// Propagate a basis state through `elements` using only the physical
/// rules of each element.
pub fn propagate(register: &Register, initial: &[usize], elements: &[Element]) -> Sparse {
    let pos = |label: &str| register.position(label).expect("label");
    let mut state = Sparse::new();
    state.insert(initial.to_vec(), c(1.0));
    for el in elements {
        state = match el {
            Element::BeamSplitter {
                reflectivity,
                rails: [a, b],
            } => {
                let p = pos(PATH);
                map(&state, |k| bs_rule(k, p, *reflectivity, *a, *b))
            }
            Element::AtomicBeamSplitter { rails: [a, b] } => {
                let p = pos(PATH);
                map(&state, |k| bs_rule(k, p, 0.5, *a, *b))
            }
            Element::Mirror { rails: [a, b] } => {
                let p = pos(PATH);
                map(&state, |k| {
                    let v = if k[p] == *a {
                        *b
                    } else if k[p] == *b {
                        *a
                    } else {
                        k[p]
                    };
                    vec![(with(k, p, v), c(1.0))]
                })
            }
            Element::PhaseShifter { rail, phase } => {
                let p = pos(PATH);
                map(&state, |k| {
                    let amp = if k[p] == *rail {
                        C64::from_polar(1.0, *phase)
                    } else {
                        c(1.0)
                    };
                    vec![(k.to_vec(), amp)]
                })
            }
            Element::PolarizingBeamSplitter { rails: [a, b] } => {
                let (p, q) = (pos(PATH), pos(POL));
                map(&state, |k| {
                    let v = match (k[q], k[p]) {
                        (1, x) if x == *a => *b,
                        (1, x) if x == *b => *a,
                        (_, x) => x,
                    };
                    vec![(with(k, p, v), c(1.0))]
                })
            }
            Element::PolarizationRotator { rail } => {
                let (p, q) = (pos(PATH), pos(POL));
                map(&state, |k| {
                    if k[p] == *rail {
                        vec![(with(k, q, 1 - k[q]), c(1.0))]
                    } else {
                        vec![(k.to_vec(), c(1.0))]
                    }
                })
            }
            Element::CavityAtomBlock { atom, rail } => {
                let (p, q, a) = (pos(PATH), pos(POL), pos(atom));
                map(&state, |k| {
                    if k[p] != *rail {
                        return vec![(k.to_vec(), c(1.0))];
                    }
                    match (k[a], k[q]) {
                        (0, 0) => vec![(with2(k, a, 1, q, 1), c(1.0))],
                        (1, 1) => vec![(with2(k, a, 0, q, 0), c(1.0))],
                        _ => vec![(k.to_vec(), c(-1.0))],
                    }
                })
            }
            Element::FieldPiBlock { atom, field, rail }
            | Element::FieldHalfPiBlock { atom, field, rail }
            | Element::DispersiveBlock { atom, field, rail } => {
                let (a, f) = (pos(atom), pos(field));
                let p = rail.map(|_| pos(PATH));
                map(&state, |k| match (p, rail) {
                    (Some(p), Some(r)) if k[p] != *r => vec![(k.to_vec(), c(1.0))],
                    _ => atom_field_rule(k, a, f, el),
                })
            }
            Element::RamseyZone { atom } => {
                let a = pos(atom);
                map(&state, |k| hadamard_rule(k, a))
            }
            Element::ExternalPiPulse { atom } => {
                let a = pos(atom);
                map(&state, |k| vec![(with(k, a, 1 - k[a]), c(1.0))])
            }
            Element::Prepare { target, gate } => {
                let t = pos(target);
                match gate {
                    LocalGate::H => map(&state, |k| hadamard_rule(k, t)),
                    other => panic!("oracle does not model {other:?}"),
                }
            }
        };
    }
    state
}

/// Dense amplitude vector of a sparse state (first subsystem most significant).
pub fn dense(register: &Register, state: &Sparse) -> Vec<C64> {
    let mut v = vec![C64::new(0.0, 0.0); register.total_dim()];
    for (k, a) in state {
        v[register.index_of_digits(k).expect("digits")] = *a;
    }
    v
}

pub fn max_diff(a: &[C64], b: &[C64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Fine-grid oracle sweep grid: g/κ ∈ {0.5, 1, 2, 5} × 20 log-spaced κτ in [0.1, 40].
pub fn golden_grid() -> (Vec<f64>, Vec<f64>) {
    let g = vec![0.5, 1.0, 2.0, 5.0];
    let tau = (0..20)
        .map(|i| 0.1 * (400.0f64).powf(i as f64 / 19.0))
        .collect();
    (g, tau)
}
