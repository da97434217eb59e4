//! Exact propagation under the time-independent total Hamiltonian (hbar = 1).
//!
//! With `H = V diag(E) V^T` the evolved state is
//! `rho(t) = V (Phi(t) o rho') V^T`, where `rho' = V^T rho0 V` is computed once
//! and `Phi_ab = exp(-i (E_a - E_b) t)` is applied elementwise.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::HamiltonianSet;
use crate::par;
use crate::qstate::{
    partial_trace, von_neumann_entropy, CMatrix, DensityMatrix, DEFAULT_TOLERANCE,
};

/// Validation tolerance for states evolved to time `t`; reaches 1e-8 at t = 500.
pub fn tolerance_at(t: f64) -> f64 {
    DEFAULT_TOLERANCE.max(2e-11 * t.abs())
}

#[derive(Clone, Debug)]
pub struct Propagator {
    energies: DVector<f64>,
    vectors: CMatrix,
}

impl Propagator {
    pub fn new(h: &HamiltonianSet) -> Self {
        Self {
            energies: h.spectrum.energies.clone(),
            vectors: h.spectrum.vectors.map(|x| Complex64::new(x, 0.0)),
        }
    }

    pub fn dim(&self) -> usize {
        self.energies.len()
    }

    /// `exp(-i H t)`.
    pub fn unitary(&self, t: f64) -> CMatrix {
        let mut scaled = self.vectors.clone();
        for (k, &e) in self.energies.iter().enumerate() {
            let phase = Complex64::from_polar(1.0, -e * t);
            scaled.column_mut(k).iter_mut().for_each(|z| *z *= phase);
        }
        scaled * self.vectors.adjoint()
    }

    pub fn reconstructed_hamiltonian(&self) -> CMatrix {
        let diag = DMatrix::from_diagonal(&self.energies.map(|e| Complex64::new(e, 0.0)));
        &self.vectors * diag * self.vectors.adjoint()
    }
}

/// A fixed initial state in the energy eigenbasis, ready to be evaluated at any time.
#[derive(Clone, Debug)]
pub struct Evolution {
    dims: Vec<usize>,
    rho0: DensityMatrix,
    propagator: Propagator,
    rotated: CMatrix,
    /// `K_ij = V_i^T V_j` for system rows `i, j`, used for the 2x2 reduced state.
    system_kernels: [[CMatrix; 2]; 2],
}

impl Evolution {
    pub fn new(rho0: &DensityMatrix, h: &HamiltonianSet) -> Result<Self> {
        let propagator = Propagator::new(h);
        let n = h.env_dim();
        if rho0.dims() != [2, n] || propagator.dim() != 2 * n {
            return Err(Error::argument(format!(
                "state dims {:?} do not match Hamiltonian dims [2, {n}]",
                rho0.dims()
            )));
        }
        let v = &propagator.vectors;
        let rotated = v.adjoint() * rho0.entries() * v;
        let block = |i: usize| v.rows(i * n, n).into_owned();
        let (b0, b1) = (block(0), block(1));
        let k = |a: &CMatrix, b: &CMatrix| a.transpose() * b;
        let system_kernels = [[k(&b0, &b0), k(&b0, &b1)], [k(&b1, &b0), k(&b1, &b1)]];
        Ok(Self {
            dims: rho0.dims().to_vec(),
            rho0: rho0.clone(),
            propagator,
            rotated,
            system_kernels,
        })
    }

    pub fn propagator(&self) -> &Propagator {
        &self.propagator
    }

    fn phased(&self, t: f64) -> CMatrix {
        let e = &self.propagator.energies;
        let mut m = self.rotated.clone();
        for a in 0..m.nrows() {
            for b in 0..m.ncols() {
                m[(a, b)] *= Complex64::from_polar(1.0, -(e[a] - e[b]) * t);
            }
        }
        m
    }

    /// Full joint state at time `t`.
    pub fn state_at(&self, t: f64) -> DensityMatrix {
        if t == 0.0 {
            return self.rho0.clone();
        }
        let v = &self.propagator.vectors;
        let mut rho = v * self.phased(t) * v.adjoint();
        // Restore exact Hermiticity lost to roundoff.
        rho = (&rho + rho.adjoint()) * Complex64::new(0.5, 0.0);
        DensityMatrix::from_parts_unchecked(self.dims.clone(), rho, tolerance_at(t))
            .expect("dims checked at construction")
    }

    /// `tr_E rho(t)` without forming the joint state.
    pub fn reduced_system_at(&self, t: f64) -> DensityMatrix {
        if t == 0.0 {
            return partial_trace(&self.rho0, &[0]).expect("joint state has a system factor");
        }
        let m = self.phased(t);
        let mut out = CMatrix::zeros(2, 2);
        for i in 0..2 {
            for j in 0..2 {
                // sum_ab M_ab K_ij[a, b]
                out[(i, j)] = m.component_mul(&self.system_kernels[i][j]).sum();
            }
        }
        out[(1, 0)] = out[(0, 1)].conj();
        out[(0, 0)].im = 0.0;
        out[(1, 1)].im = 0.0;
        DensityMatrix::from_parts_unchecked(vec![2], out, tolerance_at(t))
            .expect("2x2 system state")
    }
}

/// `rho(t) = U rho0 U^dagger` with `U = exp(-i H_total t)`.
pub fn propagate(rho0: &DensityMatrix, h: &HamiltonianSet, t: f64) -> Result<DensityMatrix> {
    Ok(Evolution::new(rho0, h)?.state_at(t))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ObservableRecord {
    pub t: f64,
    /// `H(S)` in bits.
    pub entropy: f64,
    /// `<1|rho_S|1>`.
    pub excited: f64,
    /// `|<0|rho_S|1>|`.
    pub coherence: f64,
}

pub fn system_observables(t: f64, rho_s: &DensityMatrix) -> ObservableRecord {
    ObservableRecord {
        t,
        entropy: von_neumann_entropy(rho_s),
        excited: rho_s.entries()[(1, 1)].re,
        coherence: rho_s.entries()[(0, 1)].norm(),
    }
}

/// One record per time point; `times` must be nondecreasing.
pub fn observables_series(
    rho0: &DensityMatrix,
    h: &HamiltonianSet,
    times: &[f64],
) -> Result<Vec<ObservableRecord>> {
    if times.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::argument("time grid must be nondecreasing"));
    }
    let evolution = Evolution::new(rho0, h)?;
    Ok(par::map(times, |&t| {
        system_observables(t, &evolution.reduced_system_at(t))
    }))
}
