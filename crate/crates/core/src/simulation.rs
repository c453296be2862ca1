//! Switched-system execution `x_{k+1} = f_{σ(k)}(x_k, d_k)` with safety
//! monitoring against `∩_p B_p` and Monte Carlo campaigns driven by a
//! certificate.

use std::io::Write;

use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::certificates::Certificate;
use crate::error::{check_dim, invalid, Error, Result};
use crate::linalg::norm;
use crate::primitives::PrimitiveLibrary;
use crate::seed::{rng_for, stream, Rng};
use crate::switching::{DwellTimeBudget, Supervisor, SwitchingSignal};

#[derive(Debug, Clone, PartialEq)]
pub struct DisturbanceSequence {
    values: Vec<Vec<f64>>,
    sup_norm: f64,
}

impl DisturbanceSequence {
    pub fn new(values: Vec<Vec<f64>>) -> Result<Self> {
        if let Some(first) = values.first() {
            let m = first.len();
            for v in &values {
                check_dim("disturbance", m, v.len())?;
                if v.iter().any(|x| !x.is_finite()) {
                    return Err(invalid("disturbance values must be finite"));
                }
            }
        }
        let sup_norm = values.iter().map(|v| norm(v)).fold(0.0, f64::max);
        Ok(Self { values, sup_norm })
    }

    pub fn zeros(len: usize, dim: usize) -> Self {
        Self {
            values: vec![vec![0.0; dim]; len],
            sup_norm: 0.0,
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, k: usize) -> &[f64] {
        &self.values[k]
    }

    pub fn values(&self) -> &[Vec<f64>] {
        &self.values
    }

    /// `‖d‖∞ = sup_k ‖d_k‖₂`.
    pub fn sup_norm(&self) -> f64 {
        self.sup_norm
    }
}

/// Per-step record of a run. `states`, `lyapunov` and `in_all_basins` have
/// `horizon + 1` entries; `sigma` and `disturbances` have `horizon`.
#[derive(Debug, Clone, PartialEq)]
pub struct Trace {
    pub primitive_ids: Vec<usize>,
    pub states: Vec<Vec<f64>>,
    pub sigma: Vec<usize>,
    pub disturbances: Vec<Vec<f64>>,
    /// `V_p(x_k)` for every primitive in library order; empty when recording
    /// was switched off.
    pub lyapunov: Vec<Vec<f64>>,
    pub in_all_basins: Vec<bool>,
    /// `max_k min_p V_p(x_k)`.
    pub peak_min_lyapunov: f64,
    pub first_violation: Option<usize>,
}

impl Trace {
    pub fn horizon(&self) -> usize {
        self.sigma.len()
    }

    /// Largest `V_{σ(k)}(x_{k+1}) / V_{σ(k)}(x_k)` over steps with
    /// `x_k ≠ x*_{σ(k)}`.
    pub fn max_decrease_ratio(&self, lib: &PrimitiveLibrary) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for k in 0..self.horizon() {
            let p = lib.get(self.sigma[k])?;
            let v = p.lyapunov.value_unchecked(&self.states[k]);
            if v > 0.0 {
                worst = worst.max(p.lyapunov.value_unchecked(&self.states[k + 1]) / v);
            }
        }
        Ok(worst)
    }

    /// CSV with columns `k, sigma, x_i…, d_j…, V_<id>…, in_all_basins`. The
    /// last row carries the final state with empty `sigma` and `d` cells.
    pub fn write_csv(&self, lib: &PrimitiveLibrary, writer: impl Write) -> Result<()> {
        let n = self.states.first().map_or(0, Vec::len);
        let m = self.disturbances.first().map_or(lib.dist_dim(), Vec::len);
        let mut w = csv::Writer::from_writer(writer);
        let mut header = vec!["k".to_string(), "sigma".to_string()];
        header.extend((0..n).map(|i| format!("x{i}")));
        header.extend((0..m).map(|j| format!("d{j}")));
        header.extend(self.primitive_ids.iter().map(|id| format!("V{id}")));
        header.push("in_all_basins".into());
        w.write_record(&header)?;
        for (k, x) in self.states.iter().enumerate() {
            let mut row = vec![k.to_string()];
            match self.sigma.get(k) {
                Some(s) => row.push(s.to_string()),
                None => row.push(String::new()),
            }
            row.extend(x.iter().map(|v| v.to_string()));
            match self.disturbances.get(k) {
                Some(d) => row.extend(d.iter().map(|v| v.to_string())),
                None => row.extend((0..m).map(|_| String::new())),
            }
            let values = match self.lyapunov.get(k) {
                Some(v) => v.clone(),
                None => lib
                    .primitives()
                    .iter()
                    .map(|p| p.lyapunov.value_unchecked(x))
                    .collect(),
            };
            row.extend(values.iter().map(|v| v.to_string()));
            row.push(self.in_all_basins[k].to_string());
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunOptions {
    pub record_lyapunov: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            record_lyapunov: true,
        }
    }
}

pub fn run(
    lib: &PrimitiveLibrary,
    sigma: &SwitchingSignal,
    x0: &[f64],
    d: &DisturbanceSequence,
    horizon: usize,
) -> Result<Trace> {
    run_with(lib, sigma, x0, d, horizon, RunOptions::default())
}

/// Iterates the switched map for `horizon` steps. Leaving a basin is
/// flagged, never fatal.
pub fn run_with(
    lib: &PrimitiveLibrary,
    sigma: &SwitchingSignal,
    x0: &[f64],
    d: &DisturbanceSequence,
    horizon: usize,
    opts: RunOptions,
) -> Result<Trace> {
    let n = lib.state_dim();
    check_dim("initial state", n, x0.len())?;
    if x0.iter().any(|v| !v.is_finite()) {
        return Err(invalid("initial state must be finite"));
    }
    if sigma.len() < horizon {
        return Err(invalid(format!(
            "switching signal has {} steps, horizon is {horizon}",
            sigma.len()
        )));
    }
    if d.len() < horizon {
        return Err(invalid(format!(
            "disturbance sequence has {} steps, horizon is {horizon}",
            d.len()
        )));
    }
    if horizon > 0 {
        check_dim("disturbance", lib.dist_dim(), d.get(0).len())?;
    }
    let positions = (0..horizon)
        .map(|k| lib.position(sigma.at(k)))
        .collect::<Result<Vec<_>>>()?;

    let prims = lib.primitives();
    let mut states = Vec::with_capacity(horizon + 1);
    let mut lyapunov = Vec::with_capacity(if opts.record_lyapunov { horizon + 1 } else { 0 });
    let mut in_all = Vec::with_capacity(horizon + 1);
    let mut peak: f64 = 0.0;
    let mut first_violation = None;

    let mut record = |k: usize, x: &[f64]| {
        let values: Vec<f64> = prims
            .iter()
            .map(|p| p.lyapunov.value_unchecked(x))
            .collect();
        let inside = prims.iter().zip(&values).all(|(p, v)| *v <= p.basin_level);
        peak = peak.max(values.iter().copied().fold(f64::INFINITY, f64::min));
        if !inside && first_violation.is_none() {
            first_violation = Some(k);
        }
        in_all.push(inside);
        if opts.record_lyapunov {
            lyapunov.push(values);
        }
    };

    let mut x = x0.to_vec();
    record(0, &x);
    states.push(x.clone());
    let mut next = vec![0.0; n];
    for (k, &pos) in positions.iter().enumerate() {
        prims[pos].map.eval_into(&x, d.get(k), &mut next);
        std::mem::swap(&mut x, &mut next);
        record(k + 1, &x);
        states.push(x.clone());
    }

    Ok(Trace {
        primitive_ids: lib.ids().collect(),
        states,
        sigma: sigma.assignments()[..horizon].to_vec(),
        disturbances: d.values()[..horizon].to_vec(),
        lyapunov,
        in_all_basins: in_all,
        peak_min_lyapunov: peak,
        first_violation,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SafetyReport {
    pub safe: bool,
    /// `(k, p)`: state `x_k` lies outside `B_p`.
    pub violations: Vec<(usize, usize)>,
    /// `(q, p)`: fixed point `x_q*` lies outside `B_p`.
    pub fixed_point_violations: Vec<(usize, usize)>,
}

/// Safe iff every fixed point and every recorded state lies in every basin.
/// Recomputes from the states, so it does not depend on recording options.
pub fn safety_monitor(trace: &Trace, lib: &PrimitiveLibrary) -> SafetyReport {
    let mut violations = Vec::new();
    for (k, x) in trace.states.iter().enumerate() {
        for p in lib.primitives() {
            if !p.in_basin(x) {
                violations.push((k, p.id));
            }
        }
    }
    let fixed_point_violations = lib.fixed_point_violations();
    SafetyReport {
        safe: violations.is_empty() && fixed_point_violations.is_empty(),
        violations,
        fixed_point_violations,
    }
}

/// `max` over traces and steps of `min_p V_p(x_k)`: the tightest level `c`
/// with every observed state in `M(c)`.
pub fn empirical_trapping_level(traces: &[Trace], lib: &PrimitiveLibrary) -> Result<f64> {
    if traces.is_empty() {
        return Err(invalid("need at least one trace"));
    }
    Ok(traces
        .iter()
        .flat_map(|t| t.states.iter())
        .map(|x| lib.min_lyapunov(x))
        .fold(0.0, f64::max))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DisturbanceShape {
    /// `‖d_k‖ = amplitude` at every step.
    Sphere,
    /// `d_k` uniform in the ball of radius `amplitude`.
    Ball,
}

impl std::str::FromStr for DisturbanceShape {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sphere" => Ok(Self::Sphere),
            "ball" => Ok(Self::Ball),
            other => Err(invalid(format!(
                "unknown disturbance shape {other:?}, expected sphere|ball"
            ))),
        }
    }
}

fn unit_ball_sample(dim: usize, rng: &mut Rng) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.0..=1.0)).collect();
        let r = norm(&v);
        if r <= 1.0 && r > 1e-12 {
            return v;
        }
    }
}

pub fn sample_disturbance(
    dim: usize,
    amplitude: f64,
    shape: DisturbanceShape,
    len: usize,
    rng: &mut Rng,
) -> DisturbanceSequence {
    if dim == 0 || amplitude == 0.0 {
        return DisturbanceSequence::zeros(len, dim);
    }
    let values = (0..len)
        .map(|_| {
            let v = unit_ball_sample(dim, rng);
            let scale = match shape {
                DisturbanceShape::Sphere => amplitude / norm(&v),
                DisturbanceShape::Ball => amplitude,
            };
            v.into_iter().map(|c| c * scale).collect()
        })
        .collect();
    DisturbanceSequence::new(values).expect("sampled disturbances are finite")
}

/// Uniform sample of `∩_p M_p(level)` by rejection from `M_{p0}(level)`.
pub fn sample_initial_state(lib: &PrimitiveLibrary, level: f64, rng: &mut Rng) -> Result<Vec<f64>> {
    const MAX_ATTEMPTS: usize = 1_000_000;
    let base = &lib.primitives()[0];
    for _ in 0..MAX_ATTEMPTS {
        let x = base.lyapunov.sample_sublevel(level, rng);
        if lib.in_all_sublevels(&x, level) {
            return Ok(x);
        }
    }
    Err(Error::Precondition(format!(
        "could not sample the intersection of sublevel sets at level {level}"
    )))
}

/// Random signal at the budget limit: at each step a switch to a uniformly
/// chosen other primitive is proposed with probability `min(1, 1/Nₐ)` and
/// filtered through the supervisor.
pub fn random_admissible_signal(
    lib: &PrimitiveLibrary,
    budget: &DwellTimeBudget,
    horizon: usize,
    rng: &mut Rng,
) -> Result<SwitchingSignal> {
    let ids: Vec<usize> = lib.ids().collect();
    let rate = (1.0 / budget.na).min(1.0);
    let mut sup = Supervisor::new(*budget);
    let mut current = ids[rng.random_range(0..ids.len())];
    sup.step(current);
    for _ in 1..horizon.max(1) {
        let requested = if ids.len() > 1 && rng.random_bool(rate) {
            let mut pick = ids[rng.random_range(0..ids.len() - 1)];
            if pick == current {
                pick = ids[ids.len() - 1];
            }
            pick
        } else {
            current
        };
        current = sup.step(requested).1;
    }
    sup.signal()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Episode {
    pub x0: Vec<f64>,
    pub sigma: SwitchingSignal,
    pub disturbances: DisturbanceSequence,
}

impl Episode {
    pub fn horizon(&self) -> usize {
        self.disturbances.len()
    }

    pub fn run(&self, lib: &PrimitiveLibrary, opts: RunOptions) -> Result<Trace> {
        run_with(
            lib,
            &self.sigma,
            &self.x0,
            &self.disturbances,
            self.horizon(),
            opts,
        )
    }

    /// Whether the state ever leaves `∩_p B_p`, stopping at the first exit.
    pub fn leaves_basins(&self, lib: &PrimitiveLibrary) -> bool {
        let prims = lib.primitives();
        let mut x = self.x0.clone();
        let mut next = vec![0.0; x.len()];
        if !lib.in_all_basins(&x) {
            return true;
        }
        for k in 0..self.horizon() {
            let pos = lib
                .position(self.sigma.at(k))
                .expect("episode ids come from the library");
            prims[pos]
                .map
                .eval_into(&x, self.disturbances.get(k), &mut next);
            std::mem::swap(&mut x, &mut next);
            if !lib.in_all_basins(&x) {
                return true;
            }
        }
        false
    }
}

/// One certificate-driven episode: `x₀ ∈ ∩_p M_p(ω)`, a budget-limit
/// switching signal and disturbances of the given amplitude and shape.
pub fn sample_episode(
    lib: &PrimitiveLibrary,
    cert: &Certificate,
    amplitude: f64,
    shape: DisturbanceShape,
    horizon: usize,
    rng: &mut Rng,
) -> Result<Episode> {
    sample_episode_from(lib, cert, cert.omega, amplitude, shape, horizon, rng)
}

fn sample_episode_from(
    lib: &PrimitiveLibrary,
    cert: &Certificate,
    initial_level: f64,
    amplitude: f64,
    shape: DisturbanceShape,
    horizon: usize,
    rng: &mut Rng,
) -> Result<Episode> {
    let x0 = sample_initial_state(lib, initial_level, rng)?;
    let sigma = random_admissible_signal(lib, &cert.budget(), horizon, rng)?;
    let disturbances = sample_disturbance(lib.dist_dim(), amplitude, shape, horizon, rng);
    Ok(Episode {
        x0,
        sigma,
        disturbances,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct CampaignConfig {
    pub episodes: usize,
    pub horizon: usize,
    pub amplitude: f64,
    pub shape: DisturbanceShape,
    pub seed: u64,
    /// How many of the first episodes keep their full trace in the report.
    pub keep_traces: usize,
    /// Initial-set level; defaults to the certificate's ω(κ).
    pub initial_level: Option<f64>,
}

impl CampaignConfig {
    pub fn new(episodes: usize, horizon: usize, amplitude: f64, seed: u64) -> Self {
        Self {
            episodes,
            horizon,
            amplitude,
            shape: DisturbanceShape::Ball,
            seed,
            keep_traces: 0,
            initial_level: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignReport {
    pub episodes: usize,
    pub horizon: usize,
    pub amplitude: f64,
    pub shape: DisturbanceShape,
    pub seed: u64,
    pub initial_level: f64,
    pub violating_episodes: usize,
    pub violation_rate: f64,
    /// Empirical `max_k min_p V_p(x_k)` across all episodes.
    pub trapping_level: f64,
    /// `μ^{N̄₀} ω` from the certificate.
    pub trapping_bound: f64,
    /// Largest `V_{σ(k)}(x_{k+1}) / V_{σ(k)}(x_k)` seen.
    pub max_decrease_ratio: f64,
    pub lambda: f64,
    /// Largest switch count of any episode.
    pub max_switches: usize,
    #[serde(skip)]
    pub traces: Vec<Trace>,
}

struct EpisodeOutcome {
    violated: bool,
    trapping: f64,
    decrease: f64,
    switches: usize,
    trace: Option<Trace>,
}

/// Runs `episodes` independent episodes, each seeded from
/// `(seed, CAMPAIGN, index)`. Aggregates are order independent.
pub fn monte_carlo(
    lib: &PrimitiveLibrary,
    cert: &Certificate,
    cfg: &CampaignConfig,
) -> Result<CampaignReport> {
    cert.check_library(lib)?;
    if cfg.episodes == 0 || cfg.horizon == 0 {
        return Err(invalid("episodes and horizon must be positive"));
    }
    if !(cfg.amplitude >= 0.0 && cfg.amplitude.is_finite()) {
        return Err(invalid("amplitude must be nonnegative"));
    }
    let initial_level = cfg.initial_level.unwrap_or(cert.omega);
    let outcomes = (0..cfg.episodes)
        .into_par_iter()
        .map(|i| -> Result<EpisodeOutcome> {
            let mut rng = rng_for(cfg.seed, stream::CAMPAIGN, i as u64);
            let ep = sample_episode_from(
                lib,
                cert,
                initial_level,
                cfg.amplitude,
                cfg.shape,
                cfg.horizon,
                &mut rng,
            )?;
            let keep = i < cfg.keep_traces;
            let trace = ep.run(
                lib,
                RunOptions {
                    record_lyapunov: keep,
                },
            )?;
            Ok(EpisodeOutcome {
                violated: trace.first_violation.is_some(),
                trapping: trace.peak_min_lyapunov,
                decrease: trace.max_decrease_ratio(lib)?,
                switches: ep.sigma.switch_times().len(),
                trace: keep.then_some(trace),
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let violating = outcomes.iter().filter(|o| o.violated).count();
    let mut report = CampaignReport {
        episodes: cfg.episodes,
        horizon: cfg.horizon,
        amplitude: cfg.amplitude,
        shape: cfg.shape,
        seed: cfg.seed,
        initial_level,
        violating_episodes: violating,
        violation_rate: violating as f64 / cfg.episodes as f64,
        trapping_level: outcomes.iter().map(|o| o.trapping).fold(0.0, f64::max),
        trapping_bound: cert.trapping_level(),
        max_decrease_ratio: outcomes.iter().map(|o| o.decrease).fold(0.0, f64::max),
        lambda: cert.lambda,
        max_switches: outcomes.iter().map(|o| o.switches).max().unwrap_or(0),
        traces: Vec::new(),
    };
    report.traces = outcomes.into_iter().filter_map(|o| o.trace).collect();
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Matrix;
    use crate::primitives::{Primitive, PrimitiveMap, QuadraticLyapunov};

    fn lib2() -> PrimitiveLibrary {
        let mk = |id: usize, c: [f64; 2]| {
            let map = PrimitiveMap::new(
                c.to_vec(),
                Matrix::identity(2, 2) * 0.5,
                vec![],
                Matrix::identity(2, 2),
            )
            .unwrap();
            let v = QuadraticLyapunov::new(c.to_vec(), Matrix::identity(2, 2)).unwrap();
            Primitive::new(id, map, v, 1.0, 0.25).unwrap()
        };
        PrimitiveLibrary::new(vec![mk(0, [0.0, 0.0]), mk(1, [0.1, 0.0])]).unwrap()
    }

    #[test]
    fn sup_norm_matches_recomputation() {
        let d = DisturbanceSequence::new(vec![vec![3.0, 4.0], vec![0.0, 1.0]]).unwrap();
        assert_eq!(d.sup_norm(), 5.0);
        assert!(DisturbanceSequence::new(vec![vec![1.0], vec![1.0, 2.0]]).is_err());
    }

    #[test]
    fn constant_signal_at_fixed_point_stays() {
        let lib = lib2();
        let sigma = SwitchingSignal::constant(1, 10).unwrap();
        let t = run(
            &lib,
            &sigma,
            &[0.1, 0.0],
            &DisturbanceSequence::zeros(10, 2),
            10,
        )
        .unwrap();
        assert!(t.states.iter().all(|x| x == &vec![0.1, 0.0]));
        assert!(safety_monitor(&t, &lib).safe);
    }

    #[test]
    fn constant_signal_contracts() {
        let lib = lib2();
        let sigma = SwitchingSignal::constant(0, 20).unwrap();
        let t = run(
            &lib,
            &sigma,
            &[0.6, -0.5],
            &DisturbanceSequence::zeros(20, 2),
            20,
        )
        .unwrap();
        for k in 0..20 {
            assert!(t.lyapunov[k + 1][0] <= 0.25 * t.lyapunov[k][0] + 1e-15);
        }
        assert!(t.max_decrease_ratio(&lib).unwrap() <= 0.25 + 1e-12);
    }

    #[test]
    fn monitor_flags_violation() {
        let lib = lib2();
        let sigma = SwitchingSignal::constant(0, 3).unwrap();
        let d =
            DisturbanceSequence::new(vec![vec![2.0, 0.0], vec![0.0, 0.0], vec![0.0, 0.0]]).unwrap();
        let t = run(&lib, &sigma, &[0.0, 0.0], &d, 3).unwrap();
        assert_eq!(t.first_violation, Some(1));
        let r = safety_monitor(&t, &lib);
        assert!(!r.safe);
        assert!(r.violations.contains(&(1, 0)) && r.violations.contains(&(1, 1)));
        let quiet = run_with(
            &lib,
            &sigma,
            &[0.0, 0.0],
            &d,
            3,
            RunOptions {
                record_lyapunov: false,
            },
        )
        .unwrap();
        assert!(quiet.lyapunov.is_empty());
        assert_eq!(safety_monitor(&quiet, &lib), r);
    }

    #[test]
    fn run_input_errors() {
        let lib = lib2();
        let sigma = SwitchingSignal::constant(0, 3).unwrap();
        let d = DisturbanceSequence::zeros(3, 2);
        assert!(run(&lib, &sigma, &[0.0], &d, 3).is_err());
        assert!(run(&lib, &sigma, &[0.0, 0.0], &d, 4).is_err());
        assert!(run(
            &lib,
            &sigma,
            &[0.0, 0.0],
            &DisturbanceSequence::zeros(3, 1),
            3
        )
        .is_err());
        let bad = SwitchingSignal::constant(7, 3).unwrap();
        assert!(run(&lib, &bad, &[0.0, 0.0], &d, 3).is_err());
    }

    #[test]
    fn trapping_level_at_shared_fixed_point_is_zero() {
        let lib = lib2();
        let sigma = SwitchingSignal::constant(0, 5).unwrap();
        let t = run(
            &lib,
            &sigma,
            &[0.0, 0.0],
            &DisturbanceSequence::zeros(5, 2),
            5,
        )
        .unwrap();
        assert_eq!(empirical_trapping_level(&[t], &lib).unwrap(), 0.0);
        assert!(empirical_trapping_level(&[], &lib).is_err());
    }

    #[test]
    fn disturbance_shapes() {
        let mut rng = rng_for(1, 99, 0);
        let s = sample_disturbance(3, 0.5, DisturbanceShape::Sphere, 50, &mut rng);
        assert!(s.values().iter().all(|v| (norm(v) - 0.5).abs() < 1e-12));
        let b = sample_disturbance(3, 0.5, DisturbanceShape::Ball, 50, &mut rng);
        assert!(b.sup_norm() <= 0.5);
    }

    #[test]
    fn random_signals_respect_budget() {
        let lib = lib2();
        let budget = DwellTimeBudget::new(2.0, 3.0).unwrap();
        let mut rng = rng_for(5, 99, 0);
        for _ in 0..20 {
            let s = random_admissible_signal(&lib, &budget, 120, &mut rng).unwrap();
            assert_eq!(s.len(), 120);
            assert!(crate::switching::validate_dwell_time(&s, &budget).valid);
        }
    }

    #[test]
    fn trace_csv_layout() {
        let lib = lib2();
        let sigma = SwitchingSignal::new(vec![0, 1]).unwrap();
        let t = run(
            &lib,
            &sigma,
            &[0.5, 0.0],
            &DisturbanceSequence::zeros(2, 2),
            2,
        )
        .unwrap();
        let mut buf = Vec::new();
        t.write_csv(&lib, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "k,sigma,x0,x1,d0,d1,V0,V1,in_all_basins");
        assert_eq!(lines[1], "0,0,0.5,0,0,0,0.25,0.16000000000000003,true");
        assert!(lines[3].starts_with("2,,"));
    }
}
