//! Metropolized random walk on one bounded variable with uniform proposals.
//!
//! The proposal ignores the current state, so every accept/reject step also
//! accepts from *any* state whenever `u < exp(ρ·φ(z) − M)` with `M ≥ sup ρ·φ`.
//! [`Mrw1d::run_coalescing`] uses this coupling to draw the final state of a
//! chain of any length exactly, scanning the step sequence backwards until such
//! a step is found and replaying only the steps after it.

use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::math::exp;
use crate::model::{Basis, Interval};

/// Grid size used to bound `sup ρ·φ` on the interval.
const ENVELOPE_GRID: usize = 1024;

/// Uniform-proposal Metropolis kernel for the density `∝ exp(ρ·φ(w))` on an interval.
#[derive(Debug, Clone)]
pub struct Mrw1d<'a> {
    basis: &'a Basis,
    rho: &'a [f64],
    interval: Interval,
    log_envelope: f64,
    phi: Vec<f64>,
    replay: Vec<(f64, f64, f64)>,
}

impl<'a> Mrw1d<'a> {
    pub fn new(basis: &'a Basis, rho: &'a [f64], interval: Interval) -> Self {
        let log_envelope = energy_upper_bound(basis, rho, interval);
        Self { basis, rho, interval, log_envelope, phi: vec![0.0; basis.k()], replay: Vec::new() }
    }

    /// `ρ·φ(w)`.
    #[inline]
    pub fn energy(&mut self, w: f64) -> f64 {
        self.basis.eval_into(w, &mut self.phi);
        self.rho.iter().zip(&self.phi).map(|(a, b)| a * b).sum()
    }

    /// Upper bound `M ≥ sup ρ·φ` used by the coupling.
    pub fn log_envelope(&self) -> f64 {
        self.log_envelope
    }

    #[inline]
    fn propose<R: Rng + ?Sized>(&mut self, rng: &mut R) -> (f64, f64, f64) {
        let z = self.interval.l + self.interval.len() * rng.random::<f64>();
        let u = rng.random::<f64>();
        let ez = self.energy(z);
        (z, ez, u)
    }

    /// One accept/reject step from `w` with energy `ew`; returns the new state and energy.
    #[inline]
    pub fn step<R: Rng + ?Sized>(&mut self, w: f64, ew: f64, rng: &mut R) -> (f64, f64) {
        let (z, ez, u) = self.propose(rng);
        accept(w, ew, z, ez, u)
    }

    /// Runs `steps` accept/reject steps from `w0` one by one.
    pub fn run_literal<R: Rng + ?Sized>(&mut self, w0: f64, steps: usize, rng: &mut R) -> f64 {
        let mut w = w0;
        let mut ew = self.energy(w0);
        for _ in 0..steps {
            (w, ew) = self.step(w, ew, rng);
        }
        w
    }

    /// Final state of a `steps`-step chain from `w0`, drawn with the same law as
    /// [`Mrw1d::run_literal`] at a cost independent of `steps` once it is large.
    pub fn run_coalescing<R: Rng + ?Sized>(&mut self, w0: f64, steps: usize, rng: &mut R) -> f64 {
        self.replay.clear();
        let mut start = None;
        for _ in 0..steps {
            let (z, ez, u) = self.propose(rng);
            if u < exp(ez - self.log_envelope) {
                start = Some((z, ez));
                break;
            }
            self.replay.push((z, ez, u));
        }
        let (mut w, mut ew) = match start {
            Some(s) => s,
            None => (w0, self.energy(w0)),
        };
        for &(z, ez, u) in self.replay.iter().rev() {
            (w, ew) = accept(w, ew, z, ez, u);
        }
        w
    }

    /// Replays a fixed step sequence forwards; used to check the coupling.
    pub fn replay_forward(&mut self, w0: f64, draws: &[(f64, f64)]) -> f64 {
        let mut w = w0;
        let mut ew = self.energy(w0);
        for &(z, u) in draws {
            let ez = self.energy(z);
            (w, ew) = accept(w, ew, z, ez, u);
        }
        w
    }

    /// Reconstructs the final state of [`Mrw1d::replay_forward`] from the last
    /// coalescing step of the same sequence.
    pub fn replay_from_last_coalescence(&mut self, w0: f64, draws: &[(f64, f64)]) -> f64 {
        let last = draws.iter().rposition(|&(z, u)| u < exp(self.energy(z) - self.log_envelope));
        match last {
            Some(t) => {
                let (z, _) = draws[t];
                self.replay_forward(z, &draws[t + 1..])
            }
            None => self.replay_forward(w0, draws),
        }
    }
}

#[inline]
fn accept(w: f64, ew: f64, z: f64, ez: f64, u: f64) -> (f64, f64) {
    if ez >= ew || u < exp(ez - ew) {
        (z, ez)
    } else {
        (w, ew)
    }
}

/// Rigorous upper bound on `sup_{w∈iv} ρ·φ(w)`: grid maximum plus a Lipschitz slack.
pub fn energy_upper_bound(basis: &Basis, rho: &[f64], iv: Interval) -> f64 {
    let mut phi = vec![0.0; basis.k()];
    let h = iv.len() / (ENVELOPE_GRID - 1) as f64;
    let mut best = f64::NEG_INFINITY;
    for q in 0..ENVELOPE_GRID {
        let x = iv.l + q as f64 * h;
        basis.eval_into(x, &mut phi);
        let e: f64 = rho.iter().zip(&phi).map(|(a, b)| a * b).sum();
        best = best.max(e);
    }
    let lip: f64 = rho.iter().map(|r| r.abs()).sum::<f64>() * basis.phi_bar_max();
    best + 0.5 * h * lip
}
