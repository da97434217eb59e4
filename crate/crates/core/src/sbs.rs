//! Upper bound on the trace distance from a system-fragment state to the set
//! of spectrum-broadcast-structure states.
//!
//! For a system measurement axis `n` with projectors `P_± = (1 ± n.sigma)/2`,
//!
//! ```text
//! eta(n) = || rho - sum_i P_i rho P_i ||_1  +  sum_{i != j} sqrt(p_i p_j) B(rho_i^F, rho_j^F)
//! ```
//!
//! where `p_i = tr[P_i rho]`, `rho_i^F = tr_S[P_i rho] / p_i` and
//! `B(a, b) = ||sqrt(a) sqrt(b)||_1`. The bound is `min_n eta(n)`.

use nalgebra::DVector;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fragment::FragmentSelection;
use crate::infometrics::{conditional_fragments, system_blocks};
use crate::qstate::{
    fidelity_of_matrices, hermitian_eigenvalues, max_abs_diff, trace_norm, BlochVector, CMatrix,
    DensityMatrix,
};
use crate::search::{search_sphere, Goal, SearchBudget};

/// Branches lighter than this carry no fidelity term.
pub const BRANCH_CUTOFF: f64 = 1e-12;

#[derive(Clone, Debug)]
pub struct SeparableProjection {
    /// `sum_i (P_i (x) 1) rho (P_i (x) 1)`.
    pub rho_sep: CMatrix,
    /// `rho - rho_sep`.
    pub sigma: CMatrix,
    pub p: [f64; 2],
    /// Normalized branch states; `None` for an empty branch.
    pub branches: [Option<DensityMatrix>; 2],
}

fn check_qubit_system(rho_sf: &DensityMatrix) -> Result<usize> {
    match rho_sf.dims() {
        [2, d] => Ok(*d),
        dims => Err(Error::argument(format!(
            "expected a [2, d] system-fragment state, got dims {dims:?}"
        ))),
    }
}

fn projector_matrix(p: &[[Complex64; 2]; 2]) -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[p[0][0], p[0][1], p[1][0], p[1][1]])
}

pub fn separable_projection(
    rho_sf: &DensityMatrix,
    axis: &BlochVector,
) -> Result<SeparableProjection> {
    let d = check_qubit_system(rho_sf)?;
    let id = CMatrix::identity(d, d);
    let rho = rho_sf.entries();
    let mut rho_sep = CMatrix::zeros(2 * d, 2 * d);
    for p in axis.projectors() {
        let big = projector_matrix(&p).kronecker(&id);
        rho_sep += &big * rho * &big;
    }
    let sigma = rho - &rho_sep;

    let blocks = system_blocks(rho);
    let conditional = conditional_fragments(&blocks, axis);
    let p = [conditional[0].trace().re, conditional[1].trace().re];
    let branches = [0, 1].map(|i| {
        (p[i] > BRANCH_CUTOFF).then(|| {
            let m = &conditional[i] / Complex64::new(p[i], 0.0);
            DensityMatrix::from_parts_unchecked(vec![d], m, rho_sf.tolerance())
                .expect("branch state has fragment dims")
        })
    });
    Ok(SeparableProjection {
        rho_sep,
        sigma,
        p,
        branches,
    })
}

/// `sum_{i != j} sqrt(p_i p_j) B(rho_i, rho_j)`; branches with `p_i` below
/// [`BRANCH_CUTOFF`] are skipped.
pub fn distinguishability_term(p: &[f64], states: &[DensityMatrix]) -> Result<f64> {
    if p.len() != states.len() {
        return Err(Error::argument("one probability per branch state required"));
    }
    let total: f64 = p.iter().sum();
    if (total - 1.0).abs() > 1e-10 || p.iter().any(|&x| x < -1e-12) {
        return Err(Error::argument(format!(
            "branch probabilities sum to {total}"
        )));
    }
    if let Some(s) = states.iter().find(|s| s.dims() != states[0].dims()) {
        return Err(Error::argument(format!(
            "branch dims {:?} differ",
            s.dims()
        )));
    }
    let mut sum = 0.0;
    for i in 0..p.len() {
        for j in 0..p.len() {
            if i != j && p[i] > BRANCH_CUTOFF && p[j] > BRANCH_CUTOFF {
                sum += (p[i] * p[j]).sqrt()
                    * fidelity_of_matrices(states[i].entries(), states[j].entries());
            }
        }
    }
    Ok(sum)
}

/// `(eta, nonsep, disting, p)` for a single axis, computed in the rotated system basis.
fn eta_for_axis(blocks: &[[CMatrix; 2]; 2], axis: &BlochVector) -> (f64, f64, f64, [f64; 2]) {
    let [vp, vm] = axis.eigenbasis();
    // Coherence block <+|rho|-> on the fragment; sigma has singular values of it twice.
    let mut x = &blocks[0][0] * (vp[0].conj() * vm[0]);
    x += &blocks[0][1] * (vp[0].conj() * vm[1]);
    x += &blocks[1][0] * (vp[1].conj() * vm[0]);
    x += &blocks[1][1] * (vp[1].conj() * vm[1]);
    let nonsep = 2.0 * trace_norm(&x);

    let conditional = conditional_fragments(blocks, axis);
    let p = [conditional[0].trace().re, conditional[1].trace().re];
    let disting = if p[0] > BRANCH_CUTOFF && p[1] > BRANCH_CUTOFF {
        // sqrt(p0 p1) B(s0/p0, s1/p1) = B(s0, s1) for unnormalized s_i.
        2.0 * fidelity_of_matrices(&conditional[0], &conditional[1])
    } else {
        0.0
    };
    (nonsep + disting, nonsep, disting, p)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EtaBound {
    pub eta: f64,
    pub nonsep_term: f64,
    pub disting_term: f64,
    pub best_axis: BlochVector,
    pub p: [f64; 2],
}

/// Minimizes `eta(n)` over system axes.
pub fn eta_bound(rho_sf: &DensityMatrix, budget: SearchBudget, seed: u64) -> Result<EtaBound> {
    check_qubit_system(rho_sf)?;
    if rho_sf.is_zero() {
        return Err(Error::argument("the zero state has no broadcast bound"));
    }
    let blocks = system_blocks(rho_sf.entries());
    let best = search_sphere(
        |axis| eta_for_axis(&blocks, axis).0,
        Goal::Minimize,
        budget,
        seed,
    );
    let (eta, nonsep, disting, p) = eta_for_axis(&blocks, &best.axis);
    Ok(EtaBound {
        eta,
        nonsep_term: nonsep,
        disting_term: disting,
        best_axis: best.axis,
        p,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SBSBoundReport {
    pub t: f64,
    pub fragment: FragmentSelection,
    pub eta: f64,
    pub nonsep_term: f64,
    pub disting_term: f64,
    pub best_axis: BlochVector,
    pub p: [f64; 2],
    /// The fragment is one-dimensional, so a vanishing bound says nothing about broadcasting.
    pub degenerate: bool,
    pub budget: SearchBudget,
}

pub fn evaluate(
    t: f64,
    fragment: &FragmentSelection,
    rho_sf: &DensityMatrix,
    budget: SearchBudget,
    seed: u64,
) -> Result<SBSBoundReport> {
    let b = eta_bound(rho_sf, budget, seed)?;
    Ok(SBSBoundReport {
        t,
        fragment: fragment.clone(),
        eta: b.eta,
        nonsep_term: b.nonsep_term,
        disting_term: b.disting_term,
        best_axis: b.best_axis,
        p: b.p,
        degenerate: rho_sf.dims()[1] == 1,
        budget,
    })
}

/// `sum_i p_i tr[rho_i (1 - Pi_i)]` for a complete set of fragment projectors.
pub fn discrimination_error(
    p: &[f64],
    states: &[DensityMatrix],
    projectors: &[CMatrix],
) -> Result<f64> {
    if p.len() != states.len() || projectors.len() != states.len() {
        return Err(Error::argument(
            "need one probability and one projector per state",
        ));
    }
    let d = states.first().map(|s| s.dim()).unwrap_or(0);
    let mut total = CMatrix::zeros(d, d);
    for pi in projectors {
        if pi.nrows() != d || pi.ncols() != d {
            return Err(Error::argument(
                "projector dimension does not match the states",
            ));
        }
        total += pi;
    }
    if max_abs_diff(&total, &CMatrix::identity(d, d)) > 1e-10 {
        return Err(Error::argument("projectors do not sum to the identity"));
    }
    let id = CMatrix::identity(d, d);
    Ok(p.iter()
        .zip(states)
        .zip(projectors)
        .map(|((&pi, s), proj)| pi * (s.entries() * (&id - proj)).trace().re)
        .sum())
}

/// Helstrom measurement for two weighted states: `Pi_0` projects onto the
/// positive part of `p0 rho0 - p1 rho1`.
pub fn helstrom_projectors(p: [f64; 2], states: [&DensityMatrix; 2]) -> [CMatrix; 2] {
    let gamma = states[0].entries() * Complex64::new(p[0], 0.0)
        - states[1].entries() * Complex64::new(p[1], 0.0);
    let d = gamma.nrows();
    let herm = (&gamma + gamma.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = herm.symmetric_eigen();
    let mut pi0 = CMatrix::zeros(d, d);
    for (k, &lambda) in eig.eigenvalues.iter().enumerate() {
        if lambda > 0.0 {
            let v = eig.eigenvectors.column(k);
            pi0 += v * v.adjoint();
        }
    }
    let pi1 = CMatrix::identity(d, d) - &pi0;
    [pi0, pi1]
}

/// `(1 - ||p0 rho0 - p1 rho1||_1) / 2`.
pub fn helstrom_error(p: [f64; 2], states: [&DensityMatrix; 2]) -> f64 {
    let gamma = states[0].entries() * Complex64::new(p[0], 0.0)
        - states[1].entries() * Complex64::new(p[1], 0.0);
    let norm: f64 = hermitian_eigenvalues(&gamma).iter().map(|x| x.abs()).sum();
    (1.0 - norm) / 2.0
}

/// Diagonal fragment projector onto the listed basis indices.
pub fn basis_projector(d: usize, indices: &[usize]) -> CMatrix {
    let mut diag = DVector::from_element(d, Complex64::new(0.0, 0.0));
    for &i in indices {
        diag[i] = Complex64::new(1.0, 0.0);
    }
    CMatrix::from_diagonal(&diag)
}
