//! Hamiltonians and initial states for a qubit coupled to an N-level
//! environment through a GOE random matrix.
//!
//! Joint basis ordering is system-major: index `i * N + n` for system level
//! `i` and environment level `n`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qstate::{CMatrix, DensityMatrix, DEFAULT_TOLERANCE};
use crate::rng::stream_rng;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EnvInit {
    /// Uniform superposition over all levels.
    Superposition,
    /// Gibbs state at inverse temperature `beta`.
    Thermal,
}

impl EnvInit {
    pub fn name(self) -> &'static str {
        match self {
            EnvInit::Superposition => "superposition",
            EnvInit::Thermal => "thermal",
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SysInit {
    /// `(|0> + |1>)/sqrt(2)`.
    #[default]
    #[serde(rename = "plus")]
    PlusSuperposition,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub delta_e: f64,
    pub delta_eps: f64,
    pub lambda: f64,
    pub n: usize,
    pub beta: f64,
    pub env_init: EnvInit,
    pub sys_init: SysInit,
    pub seed: u64,
}

impl Default for ModelParams {
    fn default() -> Self {
        Self {
            delta_e: 1.0,
            delta_eps: 1.0,
            lambda: 0.2,
            n: 10,
            beta: 10.0,
            env_init: EnvInit::Superposition,
            sys_init: SysInit::PlusSuperposition,
            seed: 0,
        }
    }
}

impl ModelParams {
    pub fn validate(&self) -> Result<()> {
        let finite = [self.delta_e, self.delta_eps, self.lambda, self.beta]
            .iter()
            .all(|v| v.is_finite());
        if !finite {
            return Err(Error::config("model parameters must be finite"));
        }
        if self.delta_e <= 0.0 {
            return Err(Error::config(format!(
                "delta_e must be > 0, got {}",
                self.delta_e
            )));
        }
        if self.delta_eps < 0.0 {
            return Err(Error::config(format!(
                "delta_eps must be >= 0, got {}",
                self.delta_eps
            )));
        }
        if self.n < 2 {
            return Err(Error::config(format!("N must be >= 2, got {}", self.n)));
        }
        if self.beta < 0.0 {
            return Err(Error::config(format!(
                "beta must be >= 0, got {}",
                self.beta
            )));
        }
        if self.lambda < 0.0 {
            return Err(Error::config(format!(
                "lambda must be >= 0, got {}",
                self.lambda
            )));
        }
        Ok(())
    }

    /// Environment level energies, equally spaced on `[-delta_eps/2, delta_eps/2]`.
    pub fn env_levels(&self) -> Vec<f64> {
        let n = self.n;
        (0..n)
            .map(|k| -self.delta_eps / 2.0 + self.delta_eps * k as f64 / (n - 1) as f64)
            .collect()
    }
}

/// Draws `R = X / sqrt(8N)` from realization stream 0 of `seed`.
pub fn goe_sample(n: usize, seed: u64) -> DMatrix<f64> {
    goe_sample_stream(n, seed, 0)
}

/// GOE sample for one realization.
///
/// Standard normals come from `rand_distr::StandardNormal` (ziggurat method)
/// driven by ChaCha8, consumed row-major over the upper triangle including the
/// diagonal. Off-diagonal `X_ij ~ N(0,1)`, diagonal `X_ii ~ sqrt(2) N(0,1)`.
pub fn goe_sample_stream(n: usize, seed: u64, realization: u64) -> DMatrix<f64> {
    let mut rng = stream_rng(seed, realization);
    let scale = 1.0 / (8.0 * n as f64).sqrt();
    let mut r = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let z: f64 = StandardNormal.sample(&mut rng);
            if i == j {
                r[(i, i)] = std::f64::consts::SQRT_2 * z * scale;
            } else {
                r[(i, j)] = z * scale;
                r[(j, i)] = z * scale;
            }
        }
    }
    r
}

/// Eigendecomposition `H = V diag(E) V^T` of the (real symmetric) total Hamiltonian.
#[derive(Clone, Debug)]
pub struct Spectrum {
    pub energies: DVector<f64>,
    pub vectors: DMatrix<f64>,
}

#[derive(Clone, Debug)]
pub struct HamiltonianSet {
    pub h_s: DMatrix<f64>,
    pub env_levels: Vec<f64>,
    pub h_e: DMatrix<f64>,
    pub h_se: DMatrix<f64>,
    pub h_total: DMatrix<f64>,
    pub spectrum: Spectrum,
}

impl HamiltonianSet {
    pub fn env_dim(&self) -> usize {
        self.env_levels.len()
    }

    pub fn h_total_complex(&self) -> CMatrix {
        self.h_total.map(|x| Complex64::new(x, 0.0))
    }
}

/// `H_S = (dE/2) sz`, `H_E = diag(eps_n)`, `H_SE = sx (x) lambda R`.
///
/// `sz = |1><1| - |0><0|`, so `|1>` is the excited system level.
pub fn build_hamiltonians(params: &ModelParams, r: &DMatrix<f64>) -> Result<HamiltonianSet> {
    params.validate()?;
    let n = params.n;
    if r.nrows() != n || r.ncols() != n {
        return Err(Error::argument(format!(
            "coupling matrix is {}x{}, expected {n}x{n}",
            r.nrows(),
            r.ncols()
        )));
    }
    if r != &r.transpose() {
        return Err(Error::argument("coupling matrix must be symmetric"));
    }

    let h_s = DMatrix::from_row_slice(
        2,
        2,
        &[-params.delta_e / 2.0, 0.0, 0.0, params.delta_e / 2.0],
    );
    let env_levels = params.env_levels();
    let h_e = DMatrix::from_diagonal(&DVector::from_vec(env_levels.clone()));
    let sx = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
    let h_se = sx.kronecker(&(r * params.lambda));
    let h_total = h_s.kronecker(&DMatrix::identity(n, n))
        + DMatrix::<f64>::identity(2, 2).kronecker(&h_e)
        + &h_se;

    let eig = h_total.clone().symmetric_eigen();
    let spectrum = Spectrum {
        energies: eig.eigenvalues,
        vectors: eig.eigenvectors,
    };
    Ok(HamiltonianSet {
        h_s,
        env_levels,
        h_e,
        h_se,
        h_total,
        spectrum,
    })
}

/// Environment initial state `rho_E(0)`.
pub fn initial_env_state(params: &ModelParams) -> DensityMatrix {
    let n = params.n;
    let entries = match params.env_init {
        EnvInit::Superposition => CMatrix::from_element(n, n, Complex64::new(1.0 / n as f64, 0.0)),
        EnvInit::Thermal => {
            let levels = params.env_levels();
            let e0 = levels.iter().copied().fold(f64::INFINITY, f64::min);
            let w: Vec<f64> = levels
                .iter()
                .map(|e| (-params.beta * (e - e0)).exp())
                .collect();
            let z: f64 = w.iter().sum();
            CMatrix::from_diagonal(&DVector::from_iterator(
                n,
                w.iter().map(|x| Complex64::new(x / z, 0.0)),
            ))
        }
    };
    DensityMatrix::new(vec![n], entries, DEFAULT_TOLERANCE)
        .expect("environment initial state is valid by construction")
}

pub fn initial_system_state(sys: SysInit) -> DensityMatrix {
    match sys {
        SysInit::PlusSuperposition => {
            let h = Complex64::new(0.5, 0.0);
            DensityMatrix::new(vec![2], CMatrix::from_element(2, 2, h), DEFAULT_TOLERANCE)
                .expect("|+><+| is valid")
        }
    }
}

/// `rho_SE(0) = rho_S(0) (x) rho_E(0)`, dims `[2, N]`.
pub fn initial_state(params: &ModelParams) -> Result<DensityMatrix> {
    params.validate()?;
    Ok(initial_system_state(params.sys_init).tensor(&initial_env_state(params)))
}
