//! Classical model of the photon walking back and forth along a chain of
//! cavities until it reaches the detector.
//!
//! Sites `1..=n` are cavities and site `n + 1` is the detector. From cavity
//! `i` the photon moves to `i + 1` with probability `p` (correct flip) and
//! to `i - 1` otherwise; stepping back from cavity 1 re-enters cavity 1.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RetryWalkParams {
    pub p_flip: f64,
    pub n_cavities: usize,
    pub max_steps: usize,
}

impl RetryWalkParams {
    pub fn validate(&self) -> Result<()> {
        if self.p_flip == 0.0 {
            return Err(Error::DegenerateWalk);
        }
        if !(self.p_flip > 0.0 && self.p_flip <= 1.0) {
            return Err(Error::Parameter(format!(
                "p_flip must lie in (0, 1], got {}",
                self.p_flip
            )));
        }
        if self.n_cavities == 0 {
            return Err(Error::Parameter("n_cavities must be ≥ 1".into()));
        }
        if self.max_steps == 0 {
            return Err(Error::Parameter("max_steps must be ≥ 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RetryWalkResult {
    /// Probability of reaching the detector within `max_steps`.
    pub success_prob: f64,
    /// Fidelity of the heralded state; a detection always heralds the
    /// intended state.
    pub conditional_fidelity: f64,
    /// Mean number of cavity visits before detection, without a step cap.
    pub expected_steps: f64,
}

pub fn retry_walk(params: &RetryWalkParams) -> Result<RetryWalkResult> {
    params.validate()?;
    Ok(RetryWalkResult {
        success_prob: absorption_probability(params),
        conditional_fidelity: 1.0,
        expected_steps: expected_steps(params.p_flip, params.n_cavities),
    })
}

fn absorption_probability(params: &RetryWalkParams) -> f64 {
    let (p, n) = (params.p_flip, params.n_cavities);
    // dist[i] is the mass at cavity i + 1.
    let mut dist = vec![0.0; n];
    let mut next = vec![0.0; n];
    dist[0] = 1.0;
    let mut absorbed = 0.0;
    for _ in 0..params.max_steps {
        next.iter_mut().for_each(|x| *x = 0.0);
        for (i, &m) in dist.iter().enumerate() {
            if m == 0.0 {
                continue;
            }
            if i + 1 == n {
                absorbed += p * m;
            } else {
                next[i + 1] += p * m;
            }
            next[i.saturating_sub(1)] += (1.0 - p) * m;
        }
        std::mem::swap(&mut dist, &mut next);
    }
    absorbed.min(1.0)
}

/// Mean hitting time of the detector from cavity 1, by solving the
/// tridiagonal system `E_i = 1 + p E_{i+1} + (1-p) E_{max(i-1, 1)}`.
fn expected_steps(p: f64, n: usize) -> f64 {
    let q = 1.0 - p;
    // Row i: lower a_i, diagonal b_i, upper c_i, rhs 1.
    let mut lower = vec![0.0; n];
    let mut diag = vec![1.0; n];
    let mut upper = vec![0.0; n];
    for i in 0..n {
        if i == 0 {
            diag[0] = 1.0 - q;
        } else {
            lower[i] = -q;
        }
        if i + 1 < n {
            upper[i] = -p;
        }
    }
    let mut rhs = vec![1.0; n];
    for i in 1..n {
        let w = lower[i] / diag[i - 1];
        diag[i] -= w * upper[i - 1];
        rhs[i] -= w * rhs[i - 1];
    }
    let mut e = vec![0.0; n];
    e[n - 1] = rhs[n - 1] / diag[n - 1];
    for i in (0..n - 1).rev() {
        e[i] = (rhs[i] - upper[i] * e[i + 1]) / diag[i];
    }
    e[0]
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloResult {
    pub trajectories: u64,
    pub seed: u64,
    pub success_prob: f64,
    /// Mean steps over successful trajectories.
    pub mean_steps: f64,
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Seed of trajectory `index` under root seed `seed`.
pub fn trajectory_seed(seed: u64, index: u64) -> u64 {
    splitmix64(splitmix64(seed) ^ index)
}

fn trajectory(params: &RetryWalkParams, seed: u64) -> Option<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pos = 1usize;
    for step in 1..=params.max_steps {
        if rng.random::<f64>() < params.p_flip {
            pos += 1;
            if pos > params.n_cavities {
                return Some(step);
            }
        } else {
            pos = pos.saturating_sub(1).max(1);
        }
    }
    None
}

/// Simulated trajectories, each with its own generator seeded from
/// `(seed, index)`, so the result does not depend on thread scheduling.
pub fn retry_walk_monte_carlo(
    params: &RetryWalkParams,
    trajectories: u64,
    seed: u64,
) -> Result<MonteCarloResult> {
    params.validate()?;
    if trajectories == 0 {
        return Err(Error::Parameter("need at least one trajectory".into()));
    }
    let (hits, steps) = (0..trajectories)
        .into_par_iter()
        .map(|i| match trajectory(params, trajectory_seed(seed, i)) {
            Some(s) => (1u64, s as u64),
            None => (0, 0),
        })
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
    Ok(MonteCarloResult {
        trajectories,
        seed,
        success_prob: hits as f64 / trajectories as f64,
        mean_steps: if hits > 0 {
            steps as f64 / hits as f64
        } else {
            f64::NAN
        },
    })
}
