//! Derivative-free optimization over measurement axes on the Bloch sphere.
//!
//! One round of the search consists of
//!
//! 1. the coordinate axes x, y, z (first round only),
//! 2. `samples` uniformly distributed axes (normalized Gaussian triples),
//! 3. `refine_iters` steps of a shrinking Gaussian perturbation of the best
//!    axis; the scale starts at [`INITIAL_REFINE_SCALE`] and is halved after
//!    every [`PATIENCE`] consecutive non-improving steps,
//! 4. a compass polish in the tangent plane (eight directions, step halved on
//!    failure) until the step drops below [`POLISH_MIN_STEP`].
//!
//! Every round continues from the best axis found so far and draws from its
//! own random stream, so a search with `restarts = 2r` evaluates a superset of
//! the axes visited with `restarts = r` and never reports a worse value.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::qstate::BlochVector;
use crate::rng::stream_rng;

pub const INITIAL_REFINE_SCALE: f64 = 0.1;
pub const PATIENCE: usize = 25;
pub const POLISH_MIN_STEP: f64 = 1e-10;
const POLISH_MAX_EVALS: usize = 4000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchBudget {
    pub samples: usize,
    pub refine_iters: usize,
    pub restarts: usize,
}

impl Default for SearchBudget {
    fn default() -> Self {
        Self {
            samples: 2000,
            refine_iters: 200,
            restarts: 1,
        }
    }
}

impl SearchBudget {
    /// Twice the number of rounds.
    pub fn doubled(self) -> Self {
        Self {
            restarts: self.restarts.max(1) * 2,
            ..self
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Goal {
    Maximize,
    Minimize,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SearchOutcome {
    pub axis: BlochVector,
    pub value: f64,
    pub evaluations: usize,
}

struct Tracker<F> {
    objective: F,
    goal: Goal,
    best: SearchOutcome,
}

impl<F: Fn(&BlochVector) -> f64> Tracker<F> {
    fn better(&self, a: f64, b: f64) -> bool {
        match (a.is_nan(), b.is_nan()) {
            (true, _) => false,
            (false, true) => true,
            _ => match self.goal {
                Goal::Maximize => a > b,
                Goal::Minimize => a < b,
            },
        }
    }

    /// Evaluates `axis`, returns true if it became the new best.
    fn offer(&mut self, axis: BlochVector) -> bool {
        let v = (self.objective)(&axis);
        self.best.evaluations += 1;
        if self.better(v, self.best.value) {
            self.best.axis = axis;
            self.best.value = v;
            true
        } else {
            false
        }
    }
}

fn gaussian3(rng: &mut impl Rng) -> [f64; 3] {
    [
        rng.sample(StandardNormal),
        rng.sample(StandardNormal),
        rng.sample(StandardNormal),
    ]
}

fn perturb(axis: &BlochVector, delta: [f64; 3], scale: f64) -> Option<BlochVector> {
    let a = axis.components();
    BlochVector::normalized([
        a[0] + scale * delta[0],
        a[1] + scale * delta[1],
        a[2] + scale * delta[2],
    ])
}

fn tangent_basis(axis: &BlochVector) -> ([f64; 3], [f64; 3]) {
    let a = axis.components();
    // Pick the coordinate direction least aligned with the axis.
    let helper = if a[0].abs() <= a[1].abs() && a[0].abs() <= a[2].abs() {
        [1.0, 0.0, 0.0]
    } else if a[1].abs() <= a[2].abs() {
        [0.0, 1.0, 0.0]
    } else {
        [0.0, 0.0, 1.0]
    };
    let cross = |u: [f64; 3], v: [f64; 3]| {
        [
            u[1] * v[2] - u[2] * v[1],
            u[2] * v[0] - u[0] * v[2],
            u[0] * v[1] - u[1] * v[0],
        ]
    };
    let e1 = cross(a, helper);
    let n1 = (e1[0] * e1[0] + e1[1] * e1[1] + e1[2] * e1[2]).sqrt();
    let e1 = [e1[0] / n1, e1[1] / n1, e1[2] / n1];
    let e2 = cross(a, e1);
    (e1, e2)
}

/// Optimizes `objective` over the sphere with the given budget and seed.
pub fn search_sphere<F>(objective: F, goal: Goal, budget: SearchBudget, seed: u64) -> SearchOutcome
where
    F: Fn(&BlochVector) -> f64,
{
    let start = BlochVector::Z;
    let first = objective(&start);
    let mut t = Tracker {
        objective,
        goal,
        best: SearchOutcome {
            axis: start,
            value: first,
            evaluations: 1,
        },
    };
    t.offer(BlochVector::X);
    t.offer(BlochVector::Y);

    for round in 0..budget.restarts.max(1) {
        let mut rng = stream_rng(seed, round as u64);
        for _ in 0..budget.samples {
            if let Some(axis) = BlochVector::normalized(gaussian3(&mut rng)) {
                t.offer(axis);
            }
        }

        let mut scale = INITIAL_REFINE_SCALE;
        let mut misses = 0;
        for _ in 0..budget.refine_iters {
            let delta = gaussian3(&mut rng);
            let improved = match perturb(&t.best.axis, delta, scale) {
                Some(axis) => t.offer(axis),
                None => false,
            };
            if improved {
                misses = 0;
            } else {
                misses += 1;
                if misses == PATIENCE {
                    scale /= 2.0;
                    misses = 0;
                }
            }
        }

        let mut step = scale;
        let budget_end = t.best.evaluations + POLISH_MAX_EVALS;
        while step >= POLISH_MIN_STEP && t.best.evaluations < budget_end {
            let (e1, e2) = tangent_basis(&t.best.axis);
            let centre = t.best.axis;
            let mut moved = false;
            for k in 0..8 {
                let th = k as f64 * std::f64::consts::FRAC_PI_4;
                let dir = [
                    th.cos() * e1[0] + th.sin() * e2[0],
                    th.cos() * e1[1] + th.sin() * e2[1],
                    th.cos() * e1[2] + th.sin() * e2[2],
                ];
                if let Some(axis) = perturb(&centre, dir, step) {
                    moved |= t.offer(axis);
                }
            }
            if !moved {
                step /= 2.0;
            }
        }
    }
    t.best
}
