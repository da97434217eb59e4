//! Experiment runners. Each returns one [`Summary`] per output group: a time
//! point of a series, or a `(method, t, fragment size)` cell of a sweep.

use serde::Serialize;

use crate::error::Result;
use crate::evolve::{observables_series, Evolution};
use crate::fragment::{fragments_for_size, reduce, FragmentSelection, TraceMethod};
use crate::harness::config::{Experiment, ExperimentConfig};
use crate::infometrics::{self, SystemReference, SystemSource};
use crate::model::{
    build_hamiltonians, goe_sample_stream, initial_state, EnvInit, HamiltonianSet, ModelParams,
};
use crate::par;
use crate::qstate::{von_neumann_entropy, DensityMatrix};
use crate::rng::task_key;
use crate::sbs;

/// One coupling realization, propagated from its initial state.
#[derive(Clone, Debug)]
pub struct Scenario {
    pub params: ModelParams,
    pub realization: u64,
    pub hamiltonians: HamiltonianSet,
    pub initial: DensityMatrix,
    pub evolution: Evolution,
}

impl Scenario {
    pub fn new(params: &ModelParams, realization: u64) -> Result<Self> {
        params.validate()?;
        let r = goe_sample_stream(params.n, params.seed, realization);
        let hamiltonians = build_hamiltonians(params, &r)?;
        let initial = initial_state(params)?;
        let evolution = Evolution::new(&initial, &hamiltonians)?;
        Ok(Self {
            params: params.clone(),
            realization,
            hamiltonians,
            initial,
            evolution,
        })
    }

    /// Joint state at `t`, checked against the time-dependent tolerance.
    pub fn state_at(&self, t: f64) -> Result<DensityMatrix> {
        let rho = self.evolution.state_at(t);
        rho.validate()?;
        Ok(rho)
    }

    pub fn system_at(&self, t: f64) -> DensityMatrix {
        self.evolution.reduced_system_at(t)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Summary {
    pub experiment: Experiment,
    pub method: Option<TraceMethod>,
    pub env_init: EnvInit,
    pub n: usize,
    pub t: f64,
    pub k: Option<usize>,
    pub f: Option<f64>,
    pub n_fragments: Option<usize>,
    pub values: Vec<(&'static str, f64)>,
}

impl Summary {
    pub fn value(&self, name: &str) -> Option<f64> {
        self.values
            .iter()
            .find(|(k, _)| *k == name)
            .map(|(_, v)| *v)
    }
}

/// Per-fragment quantities needed by any of the sweeps.
#[derive(Clone, Debug, Default)]
pub struct FragmentValues {
    pub mutual_information: f64,
    pub h_s: f64,
    pub chi: f64,
    pub discord: f64,
    pub eta: f64,
    pub nonsep_term: f64,
    pub disting_term: f64,
    pub axis: [f64; 3],
    pub p: [f64; 2],
    pub degenerate: bool,
}

fn method_index(m: TraceMethod) -> u64 {
    match m {
        TraceMethod::Perez => 0,
        TraceMethod::Staircase => 1,
    }
}

fn env_index(e: EnvInit) -> u64 {
    match e {
        EnvInit::Superposition => 0,
        EnvInit::Thermal => 1,
    }
}

/// Evaluates one fragment; `None` for a zero reduced state.
pub fn evaluate_fragment(
    experiment: Experiment,
    cfg: &ExperimentConfig,
    rho: &DensityMatrix,
    rho_s: &DensityMatrix,
    t: f64,
    fragment: &FragmentSelection,
    seed: u64,
) -> Result<Option<FragmentValues>> {
    let rho_sf = reduce(rho, fragment)?;
    if rho_sf.is_zero() {
        return Ok(None);
    }
    let reference = match cfg.system_source {
        SystemSource::TrueSystem => SystemReference::True(rho_s),
        SystemSource::FragmentDerived => SystemReference::FragmentDerived,
    };
    let mut out = FragmentValues::default();
    match experiment {
        Experiment::MiSweep | Experiment::InfoDecomposition => {
            let budget = (experiment == Experiment::InfoDecomposition).then_some(cfg.search);
            let r = infometrics::evaluate(t, fragment, &rho_sf, reference, budget, seed)?;
            out.mutual_information = r.mutual_information;
            out.h_s = r.h_s;
            out.chi = r.chi;
            out.discord = r.discord;
            out.axis = r.best_axis.components();
        }
        Experiment::SbsSweep => {
            let r = sbs::evaluate(t, fragment, &rho_sf, cfg.search, seed)?;
            out.eta = r.eta;
            out.nonsep_term = r.nonsep_term;
            out.disting_term = r.disting_term;
            out.axis = r.best_axis.components();
            out.p = r.p;
            out.degenerate = r.degenerate;
        }
        Experiment::Evolution => unreachable!("series runs do not evaluate fragments"),
    }
    Ok(Some(out))
}

fn aggregate(
    experiment: Experiment,
    h_true: f64,
    source: SystemSource,
    kept: &[FragmentValues],
) -> Vec<(&'static str, f64)> {
    let pick = |f: fn(&FragmentValues) -> f64| -> Vec<f64> { kept.iter().map(f).collect() };
    // An empty fragment set carries no information.
    let mean_or_zero = |v: &[f64]| if v.is_empty() { 0.0 } else { par::mean(v) };
    let i_mean = mean_or_zero(&pick(|v| v.mutual_information));
    let h_s = match source {
        SystemSource::TrueSystem => h_true,
        SystemSource::FragmentDerived => mean_or_zero(&pick(|v| v.h_s)),
    };
    match experiment {
        Experiment::MiSweep => vec![
            ("I_mean", i_mean),
            ("I_norm", if h_s > 0.0 { i_mean / h_s } else { f64::NAN }),
            ("H_S", h_s),
            ("two_H_S", 2.0 * h_s),
        ],
        Experiment::InfoDecomposition => {
            let chi = mean_or_zero(&pick(|v| v.chi));
            let d = mean_or_zero(&pick(|v| v.discord));
            vec![
                ("I_mean", i_mean),
                ("chi_mean", chi),
                ("D_mean", d),
                ("additivity_residual", chi + d - i_mean),
                (
                    "D_over_I",
                    if i_mean > 1e-12 { d / i_mean } else { f64::NAN },
                ),
                ("H_S", h_s),
            ]
        }
        Experiment::SbsSweep => {
            let best = kept
                .iter()
                .min_by(|a, b| a.eta.total_cmp(&b.eta))
                .cloned()
                .unwrap_or(FragmentValues {
                    eta: f64::NAN,
                    nonsep_term: f64::NAN,
                    disting_term: f64::NAN,
                    axis: [f64::NAN; 3],
                    p: [f64::NAN; 2],
                    ..Default::default()
                });
            let eta_mean = if kept.is_empty() {
                f64::NAN
            } else {
                par::mean(&pick(|v| v.eta))
            };
            vec![
                ("eta_min", best.eta),
                ("nonsep_term", best.nonsep_term),
                ("disting_term", best.disting_term),
                ("axis_x", best.axis[0]),
                ("axis_y", best.axis[1]),
                ("axis_z", best.axis[2]),
                ("p0", best.p[0]),
                ("p1", best.p[1]),
                ("degenerate", if best.degenerate { 1.0 } else { 0.0 }),
                ("eta_mean", eta_mean),
            ]
        }
        Experiment::Evolution => unreachable!(),
    }
}

/// All fragment sizes for one `(scenario, method, t)` cell.
pub fn sweep_cell(
    cfg: &ExperimentConfig,
    scenario: &Scenario,
    method: TraceMethod,
    t: f64,
) -> Result<Vec<Summary>> {
    let experiment = cfg.experiment;
    let n = scenario.params.n;
    let rho = scenario.state_at(t)?;
    let rho_s = scenario.system_at(t);
    let h_true = von_neumann_entropy(&rho_s);
    let base = [
        scenario.params.seed,
        scenario.realization,
        n as u64,
        env_index(scenario.params.env_init),
        method_index(method),
        t.to_bits(),
    ];

    let mut tasks = Vec::new();
    for k in 0..=method.cardinality(n) {
        let size_seed = task_key(&[&base[..], &[k as u64]].concat());
        for (idx, frag) in fragments_for_size(method, n, k, size_seed, cfg.fragment_samples)?
            .into_iter()
            .enumerate()
        {
            tasks.push((k, task_key(&[size_seed, idx as u64]), frag));
        }
    }
    let results = par::map(&tasks, |(_, seed, frag)| {
        evaluate_fragment(experiment, cfg, &rho, &rho_s, t, frag, *seed)
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;

    let mut out = Vec::new();
    let mut cursor = 0;
    for k in 0..=method.cardinality(n) {
        let mut kept = Vec::new();
        let mut excluded = 0usize;
        while cursor < tasks.len() && tasks[cursor].0 == k {
            match &results[cursor] {
                Some(v) => kept.push(v.clone()),
                None => excluded += 1,
            }
            cursor += 1;
        }
        if excluded > 0 {
            log::info!(
                "{} t={t} k={k}: excluded {excluded} zero-state fragment(s) from the average",
                method.name()
            );
        }
        let mut values = aggregate(experiment, h_true, cfg.system_source, &kept);
        values.push(("zero_excluded", excluded as f64));
        out.push(Summary {
            experiment,
            method: Some(method),
            env_init: scenario.params.env_init,
            n,
            t,
            k: Some(k),
            f: Some(k as f64 / method.cardinality(n) as f64),
            n_fragments: Some(kept.len()),
            values,
        });
    }
    Ok(out)
}

/// Observable series for one scenario.
pub fn evolution_series(cfg: &ExperimentConfig, scenario: &Scenario) -> Result<Vec<Summary>> {
    let series = observables_series(&scenario.initial, &scenario.hamiltonians, &cfg.times)?;
    Ok(series
        .into_iter()
        .map(|r| Summary {
            experiment: Experiment::Evolution,
            method: None,
            env_init: scenario.params.env_init,
            n: scenario.params.n,
            t: r.t,
            k: None,
            f: None,
            n_fragments: None,
            values: vec![
                ("entropy", r.entropy),
                ("excited", r.excited),
                ("coherence", r.coherence),
            ],
        })
        .collect())
}

fn run_one_realization(cfg: &ExperimentConfig, realization: u64) -> Result<Vec<Summary>> {
    let mut out = Vec::new();
    for &n in &cfg.env_sizes {
        for &env in &cfg.env_inits {
            let scenario = Scenario::new(&cfg.params_for(n, env), realization)?;
            if cfg.experiment == Experiment::Evolution {
                out.extend(evolution_series(cfg, &scenario)?);
                continue;
            }
            for &method in &cfg.trace_methods {
                for &t in &cfg.times {
                    out.extend(sweep_cell(cfg, &scenario, method, t)?);
                }
            }
        }
    }
    Ok(out)
}

/// Averages each value over realizations; the groups line up by construction.
fn average_realizations(mut runs: Vec<Vec<Summary>>) -> Vec<Summary> {
    if runs.len() == 1 {
        return runs.pop().unwrap_or_default();
    }
    let mut out = runs[0].clone();
    for (g, summary) in out.iter_mut().enumerate() {
        for (v, entry) in summary.values.iter_mut().enumerate() {
            let column: Vec<f64> = runs.iter().map(|r| r[g].values[v].1).collect();
            entry.1 = par::mean(&column);
        }
    }
    out
}

/// Runs the configured experiment under the configured worker cap.
pub fn run(cfg: &ExperimentConfig) -> Result<Vec<Summary>> {
    cfg.validate()?;
    par::with_jobs(cfg.jobs, || {
        let runs = (0..cfg.ensemble as u64)
            .map(|m| run_one_realization(cfg, m))
            .collect::<Result<Vec<_>>>()?;
        Ok(average_realizations(runs))
    })
}

pub fn run_evolution(cfg: &ExperimentConfig) -> Result<Vec<Summary>> {
    run(&ExperimentConfig {
        experiment: Experiment::Evolution,
        ..cfg.clone()
    })
}

pub fn run_mi_sweep(cfg: &ExperimentConfig) -> Result<Vec<Summary>> {
    run(&ExperimentConfig {
        experiment: Experiment::MiSweep,
        ..cfg.clone()
    })
}

pub fn run_info_decomposition(cfg: &ExperimentConfig) -> Result<Vec<Summary>> {
    run(&ExperimentConfig {
        experiment: Experiment::InfoDecomposition,
        ..cfg.clone()
    })
}

pub fn run_sbs_sweep(cfg: &ExperimentConfig) -> Result<Vec<Summary>> {
    run(&ExperimentConfig {
        experiment: Experiment::SbsSweep,
        ..cfg.clone()
    })
}
