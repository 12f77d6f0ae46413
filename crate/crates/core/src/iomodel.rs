//! Input-output dynamics of a single three-level atom in a two-mode cavity
//! driven by a single-photon Gaussian pulse.
//!
//! Amplitudes (time in units where `kappa` sets the rate scale):
//!
//! ```text
//! dc_L/dt = -κ/2 c_L - g_L c_e - √κ f_in(t)
//! dc_R/dt = -κ/2 c_R - g_R c_e
//! dc_e/dt =  g_L c_L + g_R c_R
//! f_L,out = f_in + √κ c_L,   f_R,out = √κ c_R
//! ```
//!
//! With a real drive every amplitude stays real, so the integrator works in
//! `f64` and only the reported trajectories are complex.

use std::io::{self, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qstate::C64;

/// Tail added after the pulse never exceeds this many cavity lifetimes.
const MAX_TAIL_LIFETIMES: f64 = 400.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PulseParams {
    pub g_l: f64,
    pub g_r: f64,
    pub kappa: f64,
    pub tau: f64,
}

impl PulseParams {
    pub fn new(g_l: f64, g_r: f64, kappa: f64, tau: f64) -> Result<Self> {
        let p = PulseParams {
            g_l,
            g_r,
            kappa,
            tau,
        };
        p.validate()?;
        Ok(p)
    }

    /// `g_L = g_R = g`, `κ = 1`.
    pub fn symmetric(g: f64, tau: f64) -> Result<Self> {
        Self::new(g, g, 1.0, tau)
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.g_l, self.g_r, self.kappa, self.tau]
            .iter()
            .all(|x| x.is_finite());
        if !finite {
            return Err(Error::Parameter(format!(
                "non-finite pulse parameter in {self:?}"
            )));
        }
        if self.kappa <= 0.0 {
            return Err(Error::Parameter(format!(
                "kappa must be > 0, got {}",
                self.kappa
            )));
        }
        if self.tau <= 0.0 {
            return Err(Error::Parameter(format!(
                "tau must be > 0, got {}",
                self.tau
            )));
        }
        if self.g_l < 0.0 || self.g_r < 0.0 {
            return Err(Error::Parameter(format!(
                "couplings must be ≥ 0, got g_L = {}, g_R = {}",
                self.g_l, self.g_r
            )));
        }
        Ok(())
    }

    pub fn coupling(&self) -> f64 {
        self.g_l.hypot(self.g_r)
    }

    /// Slowest amplitude decay rate of the undriven equations.
    ///
    /// The dark mode decays at κ/2; the coupled pair has eigenvalues
    /// `-κ/4 ± sqrt(κ²/16 - G²)` with `G² = g_L² + g_R²`.
    pub fn slowest_decay_rate(&self) -> f64 {
        let k = self.kappa;
        let g2 = self.g_l * self.g_l + self.g_r * self.g_r;
        if g2 == 0.0 {
            return k / 2.0;
        }
        let disc = k * k / 16.0 - g2;
        if disc <= 0.0 {
            k / 4.0
        } else {
            // κ/4 - sqrt(disc), written to avoid cancellation for small G.
            g2 / (k / 4.0 + disc.sqrt())
        }
    }
}

/// Gaussian single-photon envelope with unit integrated intensity.
pub fn gaussian_pulse(tau: f64, t: f64) -> f64 {
    (1.0 / (tau * std::f64::consts::PI.sqrt())).sqrt() * (-t * t / (2.0 * tau * tau)).exp()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    pub t_start: f64,
    pub t_end: f64,
    pub step: f64,
}

impl TimeGrid {
    /// `[-6τ, 6τ + tail]` with step `min(τ, 1/κ, 1/G)/100`.
    ///
    /// The tail is at least `10/κ` and long enough for the slowest mode to
    /// decay by `e^-16` in amplitude, capped at `400/κ`.
    pub fn default_for(params: &PulseParams) -> TimeGrid {
        let k = params.kappa;
        let ring_down = (16.0 / params.slowest_decay_rate()).min(MAX_TAIL_LIFETIMES / k);
        let tail = (10.0 / k).max(ring_down);
        let mut scale = params.tau.min(1.0 / k);
        let g = params.coupling();
        if g > 0.0 {
            scale = scale.min(1.0 / g);
        }
        TimeGrid {
            t_start: -6.0 * params.tau,
            t_end: 6.0 * params.tau + tail,
            step: scale / 100.0,
        }
    }

    pub fn with_step(self, step: f64) -> TimeGrid {
        TimeGrid { step, ..self }
    }

    /// Largest step accepted for `params`.
    pub fn step_limit(params: &PulseParams) -> f64 {
        params.tau.min(1.0 / params.kappa) / 50.0
    }

    pub fn validate_for(&self, params: &PulseParams) -> Result<()> {
        if !(self.step.is_finite() && self.step > 0.0) {
            return Err(Error::Parameter(format!(
                "step must be > 0, got {}",
                self.step
            )));
        }
        let limit = Self::step_limit(params);
        if self.step > limit * (1.0 + 1e-12) {
            return Err(Error::Accuracy {
                step: self.step,
                limit,
            });
        }
        if self.t_start > -5.0 * params.tau || self.t_end < 5.0 * params.tau {
            return Err(Error::Parameter(format!(
                "window [{}, {}] must cover [-5τ, 5τ] = [{}, {}]",
                self.t_start,
                self.t_end,
                -5.0 * params.tau,
                5.0 * params.tau
            )));
        }
        Ok(())
    }

    /// Number of RK4 steps; the actual step is `span / n ≤ step`.
    pub fn n_steps(&self) -> usize {
        ((self.t_end - self.t_start) / self.step).ceil().max(1.0) as usize
    }

    pub fn actual_step(&self) -> f64 {
        (self.t_end - self.t_start) / self.n_steps() as f64
    }
}

/// Pulse given by samples on a uniform grid, linearly interpolated and zero
/// outside the sampled range.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledPulse {
    pub t0: f64,
    pub dt: f64,
    pub samples: Vec<f64>,
}

impl SampledPulse {
    pub fn from_fn(t0: f64, dt: f64, n: usize, f: impl Fn(f64) -> f64) -> Self {
        SampledPulse {
            t0,
            dt,
            samples: (0..n).map(|i| f(t0 + i as f64 * dt)).collect(),
        }
    }

    pub fn value(&self, t: f64) -> f64 {
        let x = (t - self.t0) / self.dt;
        if x < 0.0 || self.samples.is_empty() {
            return 0.0;
        }
        let i = x.floor() as usize;
        if i + 1 >= self.samples.len() {
            return if i + 1 == self.samples.len() && x == i as f64 {
                self.samples[i]
            } else {
                0.0
            };
        }
        let frac = x - i as f64;
        self.samples[i] * (1.0 - frac) + self.samples[i + 1] * frac
    }

    /// `∫|f|²` by the trapezoid rule over the samples.
    pub fn energy(&self) -> f64 {
        trapezoid(self.samples.iter().map(|s| s * s), self.dt)
    }
}

fn trapezoid(values: impl Iterator<Item = f64>, h: f64) -> f64 {
    let mut sum = 0.0;
    let mut prev: Option<f64> = None;
    for v in values {
        if let Some(p) = prev {
            sum += 0.5 * (p + v) * h;
        }
        prev = Some(v);
    }
    sum
}

#[derive(Debug, Clone, PartialEq)]
pub struct PulseResult {
    pub time_grid: Vec<f64>,
    pub c_l: Vec<C64>,
    pub c_r: Vec<C64>,
    pub c_e: Vec<C64>,
    pub f_l_out: Vec<C64>,
    pub f_r_out: Vec<C64>,
    pub p_flip: f64,
    pub p_noflip: f64,
    /// `|c_L|² + |c_R|² + |c_e|²` left at the end of the window.
    pub residual_excitation: f64,
}

/// Outcome of an integration without stored trajectories.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlipProbability {
    pub p_flip: f64,
    pub p_noflip: f64,
    pub residual_excitation: f64,
}

type State = [f64; 3];

struct Rhs {
    half_kappa: f64,
    sqrt_kappa: f64,
    g_l: f64,
    g_r: f64,
}

impl Rhs {
    fn new(p: &PulseParams) -> Self {
        Rhs {
            half_kappa: p.kappa / 2.0,
            sqrt_kappa: p.kappa.sqrt(),
            g_l: p.g_l,
            g_r: p.g_r,
        }
    }

    #[inline]
    fn eval(&self, y: &State, f_in: f64) -> State {
        let [cl, cr, ce] = *y;
        [
            -self.half_kappa * cl - self.g_l * ce - self.sqrt_kappa * f_in,
            -self.half_kappa * cr - self.g_r * ce,
            self.g_l * cl + self.g_r * cr,
        ]
    }
}

#[inline]
fn axpy(y: &State, h: f64, k: &State) -> State {
    [y[0] + h * k[0], y[1] + h * k[1], y[2] + h * k[2]]
}

/// Drives the RK4 loop and hands every grid point to `visit(t, f_in, y)`.
fn integrate_core(
    params: &PulseParams,
    grid: &TimeGrid,
    drive: &dyn Fn(f64) -> f64,
    mut visit: impl FnMut(f64, f64, &State),
) -> Result<State> {
    params.validate()?;
    grid.validate_for(params)?;
    let rhs = Rhs::new(params);
    let n = grid.n_steps();
    let h = grid.actual_step();
    let mut y: State = [0.0; 3];
    let mut t = grid.t_start;
    let mut f0 = drive(t);
    visit(t, f0, &y);
    for i in 0..n {
        let f_mid = drive(t + 0.5 * h);
        let t1 = grid.t_start + (i + 1) as f64 * h;
        let f1 = drive(t1);
        let k1 = rhs.eval(&y, f0);
        let k2 = rhs.eval(&axpy(&y, 0.5 * h, &k1), f_mid);
        let k3 = rhs.eval(&axpy(&y, 0.5 * h, &k2), f_mid);
        let k4 = rhs.eval(&axpy(&y, h, &k3), f1);
        for j in 0..3 {
            y[j] += h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
        }
        if !y.iter().all(|v| v.is_finite()) {
            return Err(Error::NumericalBlowup(t1));
        }
        t = t1;
        f0 = f1;
        visit(t, f0, &y);
    }
    Ok(y)
}

fn integrate_trajectory(
    params: &PulseParams,
    grid: &TimeGrid,
    drive: &dyn Fn(f64) -> f64,
) -> Result<PulseResult> {
    let sk = params.kappa.sqrt();
    let capacity = grid.n_steps() + 1;
    let mut out = PulseResult {
        time_grid: Vec::with_capacity(capacity),
        c_l: Vec::with_capacity(capacity),
        c_r: Vec::with_capacity(capacity),
        c_e: Vec::with_capacity(capacity),
        f_l_out: Vec::with_capacity(capacity),
        f_r_out: Vec::with_capacity(capacity),
        p_flip: 0.0,
        p_noflip: 0.0,
        residual_excitation: 0.0,
    };
    let y = integrate_core(params, grid, drive, |t, f_in, y| {
        out.time_grid.push(t);
        out.c_l.push(C64::new(y[0], 0.0));
        out.c_r.push(C64::new(y[1], 0.0));
        out.c_e.push(C64::new(y[2], 0.0));
        out.f_l_out.push(C64::new(f_in + sk * y[0], 0.0));
        out.f_r_out.push(C64::new(sk * y[1], 0.0));
    })?;
    let h = grid.actual_step();
    out.p_flip = trapezoid(out.f_r_out.iter().map(|f| f.norm_sqr()), h);
    out.p_noflip = trapezoid(out.f_l_out.iter().map(|f| f.norm_sqr()), h);
    out.residual_excitation = y.iter().map(|v| v * v).sum();
    Ok(out)
}

fn integrate_streaming(
    params: &PulseParams,
    grid: &TimeGrid,
    drive: &dyn Fn(f64) -> f64,
) -> Result<FlipProbability> {
    let sk = params.kappa.sqrt();
    let h = grid.actual_step();
    let (mut flip, mut noflip) = (0.0, 0.0);
    let mut prev: Option<(f64, f64)> = None;
    let y = integrate_core(params, grid, drive, |_, f_in, y| {
        let l = (f_in + sk * y[0]).powi(2);
        let r = (sk * y[1]).powi(2);
        if let Some((pl, pr)) = prev {
            noflip += 0.5 * (pl + l) * h;
            flip += 0.5 * (pr + r) * h;
        }
        prev = Some((l, r));
    })?;
    Ok(FlipProbability {
        p_flip: flip,
        p_noflip: noflip,
        residual_excitation: y.iter().map(|v| v * v).sum(),
    })
}

/// RK4 trajectory for the Gaussian input pulse.
pub fn integrate_pulse(params: &PulseParams, grid: &TimeGrid) -> Result<PulseResult> {
    let tau = params.tau;
    integrate_trajectory(params, grid, &|t| gaussian_pulse(tau, t))
}

/// RK4 trajectory for an arbitrary real input envelope.
pub fn integrate_with_drive(
    params: &PulseParams,
    grid: &TimeGrid,
    drive: &dyn Fn(f64) -> f64,
) -> Result<PulseResult> {
    integrate_trajectory(params, grid, drive)
}

pub fn integrate_sampled(
    params: &PulseParams,
    grid: &TimeGrid,
    pulse: &SampledPulse,
) -> Result<PulseResult> {
    integrate_trajectory(params, grid, &|t| pulse.value(t))
}

/// Flip and no-flip probabilities for the Gaussian pulse without storing
/// the trajectory.
pub fn flip_probability(params: &PulseParams, grid: &TimeGrid) -> Result<FlipProbability> {
    let tau = params.tau;
    integrate_streaming(params, grid, &|t| gaussian_pulse(tau, t))
}

/// Reflection and transfer coefficients `(r_LL, t_LR)` for a pulse much
/// longer than the cavity response time.
pub fn adiabatic_output_coefficients(params: &PulseParams) -> Result<(f64, f64)> {
    params.validate()?;
    let (gl, gr) = (params.g_l, params.g_r);
    let s = gl * gl + gr * gr;
    if s == 0.0 {
        return Err(Error::DegenerateCoupling);
    }
    Ok((1.0 - 2.0 * gr * gr / s, 2.0 * gl * gr / s))
}

/// Reflection amplitude of a pulse that does not couple to the atom.
/// Independent of `kappa` (which must be positive).
pub fn empty_cavity_phase(kappa: f64) -> f64 {
    debug_assert!(kappa > 0.0, "kappa must be positive");
    -1.0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub g_over_kappa: f64,
    pub kappa_tau: f64,
    pub p_flip: f64,
    pub p_noflip: f64,
}

/// `n` values from `a` to `b` evenly spaced on a log scale.
pub fn log_spaced(a: f64, b: f64, n: usize) -> Result<Vec<f64>> {
    if !(a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite()) || n == 0 {
        return Err(Error::Parameter(format!(
            "log range needs positive finite bounds and n ≥ 1, got {a}:{b}:{n}"
        )));
    }
    if n == 1 {
        return Ok(vec![a]);
    }
    let ratio = (b / a).ln() / (n - 1) as f64;
    let mut v: Vec<f64> = (0..n).map(|i| a * (ratio * i as f64).exp()).collect();
    v[n - 1] = b;
    Ok(v)
}

fn check_positive(name: &str, values: &[f64]) -> Result<()> {
    if values.is_empty() {
        return Err(Error::Parameter(format!("{name} list is empty")));
    }
    if let Some(v) = values.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
        return Err(Error::Parameter(format!(
            "{name} values must be positive, got {v}"
        )));
    }
    Ok(())
}

/// `P_flip` on the grid `g_over_kappa × kappa_tau` with `κ = 1` and
/// `g_L = g_R = g`. Rows are ordered g-major, in input order.
pub fn flip_probability_sweep(g_over_kappa: &[f64], kappa_tau: &[f64]) -> Result<Vec<SweepRow>> {
    flip_probability_sweep_with_step(g_over_kappa, kappa_tau, None)
}

/// As [`flip_probability_sweep`] with an optional fixed RK4 step replacing
/// the default for every point.
pub fn flip_probability_sweep_with_step(
    g_over_kappa: &[f64],
    kappa_tau: &[f64],
    step: Option<f64>,
) -> Result<Vec<SweepRow>> {
    check_positive("g/κ", g_over_kappa)?;
    check_positive("κτ", kappa_tau)?;
    let points: Vec<(f64, f64)> = g_over_kappa
        .iter()
        .flat_map(|&g| kappa_tau.iter().map(move |&t| (g, t)))
        .collect();
    points
        .par_iter()
        .map(|&(g, tau)| {
            let params = PulseParams::symmetric(g, tau)?;
            let mut grid = TimeGrid::default_for(&params);
            if let Some(h) = step {
                grid = grid.with_step(h);
            }
            let p = flip_probability(&params, &grid)?;
            Ok(SweepRow {
                g_over_kappa: g,
                kappa_tau: tau,
                p_flip: p.p_flip,
                p_noflip: p.p_noflip,
            })
        })
        .collect()
}

pub const SWEEP_CSV_HEADER: &str = "g_over_kappa,kappa_tau,P_flip";

/// CSV with LF line endings and 17 significant digits per value.
pub fn write_sweep_csv<W: Write>(rows: &[SweepRow], mut out: W) -> io::Result<()> {
    writeln!(out, "{SWEEP_CSV_HEADER}")?;
    for r in rows {
        writeln!(
            out,
            "{:.16e},{:.16e},{:.16e}",
            r.g_over_kappa, r.kappa_tau, r.p_flip
        )?;
    }
    Ok(())
}
