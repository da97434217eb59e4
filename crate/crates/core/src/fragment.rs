//! Environment fragments of a monolithic N-level environment.
//!
//! Two partitioning schemes are supported:
//!
//! * **Pérez** (level elimination): a fragment is a set of levels `F`; the
//!   system-fragment state keeps the `n, m in F` blocks and renormalizes by
//!   their total weight `N_F`. It does not commute with the ordinary partial
//!   trace over the environment.
//! * **Staircase**: level `n >= 1` is read as the single excitation of
//!   subenvironment `n`, level 0 as the common vacuum. Tracing out the
//!   subenvironments outside `F` keeps the block over `{0} ∪ F` and deposits
//!   the populations `c_ijkk` of every traced `k` on the vacuum element. The
//!   result lives in the `(|F| + 1)`-dimensional vacuum-plus-single-excitation
//!   subspace, which carries the same nonzero spectrum as the full
//!   `2^(N-1)`-dimensional representation.

use rand::seq::index;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qstate::{CMatrix, DensityMatrix, EIGEN_CLIP};
use crate::rng::stream_rng;

/// Subsets beyond this environment size are sampled instead of enumerated.
pub const EXHAUSTIVE_LIMIT: usize = 16;
pub const DEFAULT_FRAGMENT_SAMPLES: usize = 500;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TraceMethod {
    Perez,
    Staircase,
}

impl TraceMethod {
    pub fn name(self) -> &'static str {
        match self {
            TraceMethod::Perez => "perez",
            TraceMethod::Staircase => "staircase",
        }
    }

    /// Number of selectable units: levels for Pérez, subenvironments for staircase.
    pub fn cardinality(self, n: usize) -> usize {
        match self {
            TraceMethod::Perez => n,
            TraceMethod::Staircase => n.saturating_sub(1),
        }
    }

    fn first_member(self) -> usize {
        match self {
            TraceMethod::Perez => 0,
            TraceMethod::Staircase => 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FragmentSelection {
    method: TraceMethod,
    env_levels: usize,
    members: Vec<usize>,
}

impl FragmentSelection {
    /// `members` are levels `0..N` (Pérez) or subenvironments `1..N` (staircase).
    pub fn new(method: TraceMethod, env_levels: usize, mut members: Vec<usize>) -> Result<Self> {
        if env_levels < 2 {
            return Err(Error::argument(format!(
                "environment needs >= 2 levels, got {env_levels}"
            )));
        }
        members.sort_unstable();
        if members.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::argument(format!(
                "duplicate fragment member in {members:?}"
            )));
        }
        let lo = method.first_member();
        if let Some(&bad) = members.iter().find(|&&m| m < lo || m >= env_levels) {
            return Err(Error::argument(format!(
                "member {bad} outside {lo}..{env_levels} for the {} trace",
                method.name()
            )));
        }
        Ok(Self {
            method,
            env_levels,
            members,
        })
    }

    pub fn full(method: TraceMethod, env_levels: usize) -> Self {
        let members = (method.first_member()..env_levels).collect();
        Self {
            method,
            env_levels,
            members,
        }
    }

    pub fn method(&self) -> TraceMethod {
        self.method
    }

    pub fn env_levels(&self) -> usize {
        self.env_levels
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn size(&self) -> usize {
        self.members.len()
    }

    pub fn fraction(&self) -> f64 {
        self.size() as f64 / self.method.cardinality(self.env_levels) as f64
    }

    /// The remaining units of the same universe.
    pub fn complement(&self) -> Self {
        let members = (self.method.first_member()..self.env_levels)
            .filter(|m| self.members.binary_search(m).is_err())
            .collect();
        Self {
            method: self.method,
            env_levels: self.env_levels,
            members,
        }
    }
}

fn check_input(rho: &DensityMatrix, f: &FragmentSelection, method: TraceMethod) -> Result<usize> {
    if f.method != method {
        return Err(Error::argument(format!(
            "fragment built for the {} trace passed to the {} trace",
            f.method.name(),
            method.name()
        )));
    }
    let n = f.env_levels;
    if rho.dims() != [2, n] {
        return Err(Error::argument(format!(
            "expected a [2, {n}] state, got dims {:?}",
            rho.dims()
        )));
    }
    Ok(n)
}

/// Level-elimination trace. Returns the zero state (dims `[2, max(|F|, 1)]`)
/// when the fragment carries no weight.
pub fn perez_trace(rho: &DensityMatrix, f: &FragmentSelection) -> Result<DensityMatrix> {
    let n = check_input(rho, f, TraceMethod::Perez)?;
    let c = rho.entries();
    let k = f.size();
    let weight: f64 = (0..2)
        .flat_map(|i| f.members.iter().map(move |&m| c[(i * n + m, i * n + m)].re))
        .sum();
    if k == 0 || weight <= EIGEN_CLIP {
        return Ok(DensityMatrix::zero(vec![2, k.max(1)]));
    }
    let idx: Vec<usize> = (0..2)
        .flat_map(|i| f.members.iter().map(move |&m| i * n + m))
        .collect();
    let scale = 1.0 / weight;
    let out = CMatrix::from_fn(2 * k, 2 * k, |a, b| c[(idx[a], idx[b])] * scale);
    DensityMatrix::from_parts_unchecked(vec![2, k], out, rho.tolerance())
}

/// Staircase trace in the compact `(|F| + 1)`-dimensional representation.
/// Fragment basis: index 0 is the vacuum (level 0), index `r + 1` is `members[r]`.
pub fn staircase_trace(rho: &DensityMatrix, f: &FragmentSelection) -> Result<DensityMatrix> {
    let n = check_input(rho, f, TraceMethod::Staircase)?;
    let c = rho.entries();
    let d = f.size() + 1;
    let mut levels = Vec::with_capacity(d);
    levels.push(0);
    levels.extend_from_slice(&f.members);
    let traced: Vec<usize> = f.complement().members;

    let mut out = CMatrix::zeros(2 * d, 2 * d);
    for i in 0..2 {
        for j in 0..2 {
            for (a, &la) in levels.iter().enumerate() {
                for (b, &lb) in levels.iter().enumerate() {
                    out[(i * d + a, j * d + b)] = c[(i * n + la, j * n + lb)];
                }
            }
            for &k in &traced {
                out[(i * d, j * d)] += c[(i * n + k, j * n + k)];
            }
        }
    }
    DensityMatrix::from_parts_unchecked(vec![2, d], out, rho.tolerance())
}

/// Dispatches on the fragment's trace method.
pub fn reduce(rho: &DensityMatrix, f: &FragmentSelection) -> Result<DensityMatrix> {
    match f.method {
        TraceMethod::Perez => perez_trace(rho, f),
        TraceMethod::Staircase => staircase_trace(rho, f),
    }
}

/// Every size-`k` fragment in lexicographic order.
pub fn enumerate_fragments(
    method: TraceMethod,
    n: usize,
    k: usize,
) -> Result<Vec<FragmentSelection>> {
    let card = method.cardinality(n);
    if n < 2 {
        return Err(Error::argument(format!(
            "environment needs >= 2 levels, got {n}"
        )));
    }
    if k > card {
        return Err(Error::argument(format!(
            "fragment size {k} exceeds the {card} available units"
        )));
    }
    let lo = method.first_member();
    let mut out = Vec::new();
    let mut combo: Vec<usize> = (0..k).collect();
    loop {
        out.push(FragmentSelection {
            method,
            env_levels: n,
            members: combo.iter().map(|c| c + lo).collect(),
        });
        // Advance to the next k-combination of 0..card.
        let Some(i) = (0..k).rev().find(|&i| combo[i] < card - k + i) else {
            return Ok(out);
        };
        combo[i] += 1;
        for j in i + 1..k {
            combo[j] = combo[j - 1] + 1;
        }
    }
}

pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// Fragments used for averaging at size `k`: exhaustive below
/// [`EXHAUSTIVE_LIMIT`] levels or when there are at most `samples` subsets,
/// otherwise `samples` uniformly drawn subsets (seeded, sorted members).
pub fn fragments_for_size(
    method: TraceMethod,
    n: usize,
    k: usize,
    seed: u64,
    samples: usize,
) -> Result<Vec<FragmentSelection>> {
    let card = method.cardinality(n);
    if n < EXHAUSTIVE_LIMIT || binomial(card, k) <= samples as u128 {
        return enumerate_fragments(method, n, k);
    }
    let lo = method.first_member();
    let mut rng = stream_rng(seed, 0xf7a6_0000 + k as u64);
    (0..samples)
        .map(|_| {
            let members = index::sample(&mut rng, card, k)
                .into_iter()
                .map(|m| m + lo)
                .collect();
            FragmentSelection::new(method, n, members)
        })
        .collect()
}
