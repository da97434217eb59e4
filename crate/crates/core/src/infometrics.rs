//! Mutual information between the qubit system and an environment fragment,
//! split into accessible (Holevo) information and quantum discord.
//!
//! The accessible information is maximized over rank-one projective
//! measurements `(1 ± r.sigma)/2` on the system, so the value reported by a
//! finite search is a lower bound and the discord an upper bound.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fragment::FragmentSelection;
use crate::qstate::{
    matrix_entropy, partial_trace, von_neumann_entropy, BlochVector, CMatrix, DensityMatrix,
    EIGEN_CLIP,
};
use crate::search::{search_sphere, Goal, SearchBudget};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SystemSource {
    /// `H(S)` from `tr_E rho_SE`.
    TrueSystem,
    /// `H(S)` from `tr_F rho_SF`.
    FragmentDerived,
}

impl SystemSource {
    pub fn name(self) -> &'static str {
        match self {
            SystemSource::TrueSystem => "true",
            SystemSource::FragmentDerived => "fragment",
        }
    }
}

/// Where `H(S)` comes from when forming `I(S:F)`.
#[derive(Clone, Copy, Debug)]
pub enum SystemReference<'a> {
    True(&'a DensityMatrix),
    FragmentDerived,
}

impl SystemReference<'_> {
    pub fn source(&self) -> SystemSource {
        match self {
            SystemReference::True(_) => SystemSource::TrueSystem,
            SystemReference::FragmentDerived => SystemSource::FragmentDerived,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InformationReport {
    pub t: f64,
    pub fragment: FragmentSelection,
    pub h_s: f64,
    pub h_f: f64,
    pub h_sf: f64,
    pub mutual_information: f64,
    pub chi: f64,
    pub discord: f64,
    pub best_axis: BlochVector,
    pub system_source: SystemSource,
}

fn check_qubit_system(rho_sf: &DensityMatrix) -> Result<usize> {
    match rho_sf.dims() {
        [2, d] => Ok(*d),
        dims => Err(Error::argument(format!(
            "expected a [2, d] system-fragment state, got dims {dims:?}"
        ))),
    }
}

/// The `d x d` blocks `rho_ij` of a `[2, d]` operator.
pub(crate) fn system_blocks(m: &CMatrix) -> [[CMatrix; 2]; 2] {
    let d = m.nrows() / 2;
    let b = |i: usize, j: usize| m.view((i * d, j * d), (d, d)).into_owned();
    [[b(0, 0), b(0, 1)], [b(1, 0), b(1, 1)]]
}

/// Unnormalized conditional fragment states `tr_S[(P_± (x) 1) rho]`.
pub(crate) fn conditional_fragments(
    blocks: &[[CMatrix; 2]; 2],
    axis: &BlochVector,
) -> [CMatrix; 2] {
    axis.projectors().map(|p| {
        // sum_{a,k} P_ak rho_ka
        let mut out = &blocks[0][0] * p[0][0];
        out += &blocks[1][0] * p[0][1];
        out += &blocks[0][1] * p[1][0];
        out += &blocks[1][1] * p[1][1];
        out
    })
}

/// `H(S)`, `H(F)`, `H(SF)` for a `[2, d]` state.
pub fn entropy_terms(rho_sf: &DensityMatrix, reference: SystemReference<'_>) -> Result<[f64; 3]> {
    check_qubit_system(rho_sf)?;
    if rho_sf.is_zero() {
        return Ok([0.0; 3]);
    }
    let h_s = match reference {
        SystemReference::True(rho_s) => von_neumann_entropy(rho_s),
        SystemReference::FragmentDerived => von_neumann_entropy(&partial_trace(rho_sf, &[0])?),
    };
    let h_f = von_neumann_entropy(&partial_trace(rho_sf, &[1])?);
    let h_sf = von_neumann_entropy(rho_sf);
    Ok([h_s, h_f, h_sf])
}

/// `I(S:F) = H(S) + H(F) - H(SF)` in bits.
pub fn mutual_information(rho_sf: &DensityMatrix, reference: SystemReference<'_>) -> Result<f64> {
    let [h_s, h_f, h_sf] = entropy_terms(rho_sf, reference)?;
    Ok(h_s + h_f - h_sf)
}

/// `H(rho_F) - sum_± p_± H(rho_F|±)` for one measurement axis.
pub fn holevo_for_axis(blocks: &[[CMatrix; 2]; 2], h_f: f64, axis: &BlochVector) -> f64 {
    let conditional: f64 = conditional_fragments(blocks, axis)
        .iter()
        .map(|sigma| {
            let p = sigma.trace().re;
            if p > EIGEN_CLIP {
                p * matrix_entropy(&(sigma / Complex64::new(p, 0.0)))
            } else {
                0.0
            }
        })
        .sum();
    h_f - conditional
}

/// Accessible information maximized over system measurement axes.
pub fn holevo_chi(
    rho_sf: &DensityMatrix,
    budget: SearchBudget,
    seed: u64,
) -> Result<(f64, BlochVector)> {
    check_qubit_system(rho_sf)?;
    if rho_sf.is_zero() {
        return Ok((0.0, BlochVector::Z));
    }
    let blocks = system_blocks(rho_sf.entries());
    let h_f = von_neumann_entropy(&partial_trace(rho_sf, &[1])?);
    let best = search_sphere(
        |axis| holevo_for_axis(&blocks, h_f, axis),
        Goal::Maximize,
        budget,
        seed,
    );
    Ok((best.value, best.axis))
}

/// `D = I - chi` with the same system reference used for `I`.
pub fn discord(
    rho_sf: &DensityMatrix,
    reference: SystemReference<'_>,
    budget: SearchBudget,
    seed: u64,
) -> Result<f64> {
    let i = mutual_information(rho_sf, reference)?;
    let (chi, _) = holevo_chi(rho_sf, budget, seed)?;
    Ok(i - chi)
}

/// Full report for one system-fragment state. Without a search budget the
/// measurement search is skipped and `chi = discord = NaN`.
pub fn evaluate(
    t: f64,
    fragment: &FragmentSelection,
    rho_sf: &DensityMatrix,
    reference: SystemReference<'_>,
    budget: Option<SearchBudget>,
    seed: u64,
) -> Result<InformationReport> {
    let [h_s, h_f, h_sf] = entropy_terms(rho_sf, reference)?;
    let mutual = h_s + h_f - h_sf;
    let (chi, axis) = match budget {
        Some(b) => holevo_chi(rho_sf, b, seed)?,
        None => (f64::NAN, BlochVector::Z),
    };
    Ok(InformationReport {
        t,
        fragment: fragment.clone(),
        h_s,
        h_f,
        h_sf,
        mutual_information: mutual,
        chi,
        discord: mutual - chi,
        best_axis: axis,
        system_source: reference.source(),
    })
}
