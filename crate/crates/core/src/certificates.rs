//! Set constructions behind the average dwell-time certificate.
//!
//! For a level κ, `M_p(κ) = {V_p ≤ κ}` and `M(κ) = ∪_p M_p(κ)`:
//!
//! ```text
//! ω(κ) = max_p max_{x ∈ M(κ)} V_p(x)
//! μ(κ) = max_{p,q} max_{x ∈ B_p \ int M_p(κ)} V_q(x) / V_p(x)
//! N̄ₐ   = ln μ(κ) / ln(ε / λ),   ε ∈ (λ, 1)
//! ```
//!
//! and a certificate is feasible when `M(μ^{N̄₀} ω) ⊂ ∩_p int B_p`. Each of
//! ω and μ comes in two forms: a closed-form upper bound from ellipsoid
//! inclusion, and a brute-force grid oracle (state dimension ≤ 4) that
//! under-approximates the true optimum. The bounds always dominate the
//! grid values.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::linalg::{euclidean_distance, inverse_sqrt_spd, symmetric_eigen_bounds, Matrix};
use crate::primitives::PrimitiveLibrary;
use crate::schema::library_fingerprint;
use crate::seed::{rng_for, stream};
use crate::simulation::{sample_episode, DisturbanceShape};
use crate::switching::DwellTimeBudget;

/// Largest state dimension the grid oracles accept.
pub const GRID_MAX_DIM: usize = 4;
pub const DEFAULT_RESOLUTION: usize = 201;
pub const DEFAULT_KAPPA_COUNT: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundMethod {
    Analytic,
    Grid,
}

impl std::str::FromStr for BoundMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "analytic" => Ok(Self::Analytic),
            "grid" => Ok(Self::Grid),
            other => Err(invalid(format!(
                "unknown method {other:?}, expected analytic|grid"
            ))),
        }
    }
}

impl std::fmt::Display for BoundMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Analytic => "analytic",
            Self::Grid => "grid",
        })
    }
}

/// `M_p(c) = {x | V_p(x) ≤ c}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SublevelSetDescriptor {
    pub primitive: usize,
    pub level: f64,
}

impl SublevelSetDescriptor {
    pub fn new(primitive: usize, level: f64) -> Result<Self> {
        if !(level > 0.0) {
            return Err(invalid("sublevel set level must be positive"));
        }
        Ok(Self { primitive, level })
    }

    pub fn contains(&self, lib: &PrimitiveLibrary, x: &[f64]) -> Result<bool> {
        Ok(lib.get(self.primitive)?.lyapunov.value(x)? <= self.level)
    }
}

/// Euclidean radii `(r_inner, r_outer)` of the balls inscribed in and
/// circumscribing `{e | eᵀ P e ≤ level}`.
pub fn ellipsoid_radii(p: &Matrix, level: f64) -> Result<(f64, f64)> {
    if !(level > 0.0) {
        return Err(invalid("level must be positive"));
    }
    if !crate::linalg::is_symmetric(p, crate::primitives::SYMMETRY_TOL) {
        return Err(invalid("matrix must be symmetric"));
    }
    let (lo, hi) = symmetric_eigen_bounds(p);
    if !(lo > 0.0) {
        return Err(invalid("matrix must be positive definite"));
    }
    Ok(((level / hi).sqrt(), (level / lo).sqrt()))
}

fn check_kappa_for_omega(lib: &PrimitiveLibrary, kappa: f64) -> Result<()> {
    if !(kappa > 0.0 && kappa.is_finite()) {
        return Err(invalid("kappa must be positive"));
    }
    if let Some(p) = lib.primitives().iter().find(|p| kappa > p.basin_level) {
        return Err(Error::Precondition(format!(
            "kappa {kappa} exceeds the basin level {} of primitive {}",
            p.basin_level, p.id
        )));
    }
    Ok(())
}

fn check_kappa_for_mu(lib: &PrimitiveLibrary, kappa: f64) -> Result<()> {
    if !(kappa > 0.0 && kappa.is_finite()) {
        return Err(invalid("kappa must be positive"));
    }
    if let Some(p) = lib.primitives().iter().find(|p| kappa >= p.basin_level) {
        return Err(Error::Precondition(format!(
            "kappa {kappa} is not below the basin level {} of primitive {}",
            p.basin_level, p.id
        )));
    }
    Ok(())
}

/// Closed-form upper bound on ω(κ):
/// `max_{p,q} λ_max(P_p) (‖x_q* − x_p*‖ + sqrt(κ / λ_min(P_q)))²`.
pub fn omega_analytic(lib: &PrimitiveLibrary, kappa: f64) -> Result<f64> {
    check_kappa_for_omega(lib, kappa)?;
    // ω(κ) ≥ κ holds exactly; the clamp absorbs rounding in sqrt(κ)².
    let mut best: f64 = kappa;
    for p in lib.primitives() {
        for q in lib.primitives() {
            let offset = euclidean_distance(q.fixed_point(), p.fixed_point());
            let r = (kappa / q.lyapunov.eig_min()).sqrt();
            best = best.max(p.lyapunov.eig_max() * (offset + r).powi(2));
        }
    }
    Ok(best)
}

/// Closed-form upper bound on μ(κ).
///
/// For `x ∈ B_p \ int M_p(κ)` write `y = x − x_p*` and `Δ = x_p* − x_q*`.
/// Two ellipsoid-inclusion bounds hold on that annulus:
///
/// * coarse: `V_q ≤ λ_max(P_q)(r_out(B_p) + ‖Δ‖)²` and `V_p ≥ κ`;
/// * radial: `V_q/V_p ≤ λ_max(P_q)/λ_min(P_p) · (1 + ‖Δ‖/‖y‖)²` with
///   `‖y‖ ≥ sqrt(κ/λ_max(P_p))`.
///
/// The result is the pairwise minimum of the two, maximized over ordered
/// pairs and clamped below at 1.
pub fn mu_analytic(lib: &PrimitiveLibrary, kappa: f64) -> Result<f64> {
    check_kappa_for_mu(lib, kappa)?;
    let mut best: f64 = 1.0;
    for p in lib.primitives() {
        for q in lib.primitives() {
            let offset = euclidean_distance(p.fixed_point(), q.fixed_point());
            let r_basin = (p.basin_level / p.lyapunov.eig_min()).sqrt();
            let coarse = q.lyapunov.eig_max() * (r_basin + offset).powi(2) / kappa;
            let r_core = (kappa / p.lyapunov.eig_max()).sqrt();
            let radial =
                q.lyapunov.eig_max() / p.lyapunov.eig_min() * (1.0 + offset / r_core).powi(2);
            best = best.max(coarse.min(radial));
        }
    }
    Ok(best)
}

fn check_grid(lib: &PrimitiveLibrary, resolution: usize) -> Result<()> {
    if resolution < 2 {
        return Err(invalid("grid resolution must be at least 2"));
    }
    if lib.state_dim() > GRID_MAX_DIM {
        return Err(Error::GridTooLarge {
            dim: lib.state_dim(),
        });
    }
    Ok(())
}

/// Calls `visit` on every point of a uniform `resolution^n` grid spanning
/// the box `[lo, hi]`. Grids with resolution `r` and `2r − 1` are nested.
fn for_each_grid_point(lo: &[f64], hi: &[f64], resolution: usize, mut visit: impl FnMut(&[f64])) {
    let n = lo.len();
    let mut idx = vec![0usize; n];
    let mut x = lo.to_vec();
    let step = |i: usize, k: usize| {
        if k + 1 == resolution {
            hi[i]
        } else {
            lo[i] + (hi[i] - lo[i]) * (k as f64) / ((resolution - 1) as f64)
        }
    };
    loop {
        for i in 0..n {
            x[i] = step(i, idx[i]);
        }
        visit(&x);
        let mut axis = 0;
        loop {
            if axis == n {
                return;
            }
            idx[axis] += 1;
            if idx[axis] < resolution {
                break;
            }
            idx[axis] = 0;
            axis += 1;
        }
    }
}

/// Grid oracle for ω(κ): the maximum of `max_p V_p` over grid points of the
/// bounding box of `M(κ)` that lie in `M(κ)`. ω(κ) ≥ κ is attained exactly
/// on the boundary of every `M_q(κ)`, so the grid value is clamped at κ.
pub fn omega_grid(lib: &PrimitiveLibrary, kappa: f64, resolution: usize) -> Result<f64> {
    check_kappa_for_omega(lib, kappa)?;
    check_grid(lib, resolution)?;
    let n = lib.state_dim();
    let mut lo = vec![f64::INFINITY; n];
    let mut hi = vec![f64::NEG_INFINITY; n];
    for q in lib.primitives() {
        let half = q.lyapunov.bounding_half_widths(kappa);
        for i in 0..n {
            lo[i] = lo[i].min(q.fixed_point()[i] - half[i]);
            hi[i] = hi[i].max(q.fixed_point()[i] + half[i]);
        }
    }
    let mut best = kappa;
    for_each_grid_point(&lo, &hi, resolution, |x| {
        if lib.min_lyapunov(x) <= kappa {
            best = best.max(lib.max_lyapunov(x));
        }
    });
    Ok(best)
}

/// Grid oracle for μ(κ): for each `p`, the maximum of `V_q/V_p` over grid
/// points of the bounding box of `B_p` with `κ ≤ V_p ≤ κ̄_p`. The `(p, p)`
/// pairs make the result at least 1.
pub fn mu_grid(lib: &PrimitiveLibrary, kappa: f64, resolution: usize) -> Result<f64> {
    check_kappa_for_mu(lib, kappa)?;
    check_grid(lib, resolution)?;
    let n = lib.state_dim();
    let per_p: Vec<f64> = lib
        .primitives()
        .par_iter()
        .map(|p| {
            let half = p.lyapunov.bounding_half_widths(p.basin_level);
            let lo: Vec<f64> = (0..n).map(|i| p.fixed_point()[i] - half[i]).collect();
            let hi: Vec<f64> = (0..n).map(|i| p.fixed_point()[i] + half[i]).collect();
            let mut best: f64 = 1.0;
            for_each_grid_point(&lo, &hi, resolution, |x| {
                let vp = p.lyapunov.value_unchecked(x);
                if vp >= kappa && vp <= p.basin_level {
                    best = best.max(lib.max_lyapunov(x) / vp);
                }
            });
            best
        })
        .collect();
    Ok(per_p.into_iter().fold(1.0, f64::max))
}

/// `N̄ₐ = ln μ / ln(ε/λ)`.
pub fn dwell_time_bound(mu: f64, lambda: f64, epsilon: f64) -> Result<f64> {
    if !(lambda > 0.0 && lambda < 1.0) {
        return Err(invalid(format!("lambda must lie in (0, 1), got {lambda}")));
    }
    if !(epsilon > lambda && epsilon < 1.0) {
        return Err(invalid(format!(
            "epsilon must lie in (lambda, 1) = ({lambda}, 1), got {epsilon}"
        )));
    }
    if !(mu >= 1.0 && mu.is_finite()) {
        return Err(invalid(format!("mu must be a finite value >= 1, got {mu}")));
    }
    Ok(mu.ln() / (epsilon / lambda).ln())
}

/// `ε = λ + 0.9 (1 − λ)`.
pub fn default_epsilon(lambda: f64) -> f64 {
    lambda + 0.9 * (1.0 - lambda)
}

/// `count` logarithmically spaced levels in `[1e-4 κ̄_min, 0.9 κ̄_min]`.
pub fn default_kappa_grid(lib: &PrimitiveLibrary, count: usize) -> Vec<f64> {
    let top = 0.9 * lib.min_basin_level();
    let bottom = 1e-4 * lib.min_basin_level();
    if count <= 1 {
        return vec![top];
    }
    let (l0, l1) = (bottom.ln(), top.ln());
    (0..count)
        .map(|i| (l0 + (l1 - l0) * i as f64 / (count - 1) as f64).exp())
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ContainmentRoute {
    /// Circumscribing ball of `M_q(L)` inside the inscribed ball of `B_p`.
    Analytic,
    /// Dense sampling of the boundary of `M_q(L)`.
    Grid,
    /// Analytic test failed and the grid is unavailable (dimension > 4).
    Unchecked,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairContainment {
    /// `q` of `M_q(L)`.
    pub inner: usize,
    /// `p` of `B_p`.
    pub outer: usize,
    pub route: ContainmentRoute,
    /// Upper bound (analytic) or sampled maximum (grid) of `V_p` over `M_q(L)`.
    pub max_outer_value: f64,
    /// `κ̄_p − max_outer_value`; positive when the pair passes.
    pub margin: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContainmentReport {
    pub n0: u32,
    /// `L = μ^{N̄₀} ω`.
    pub level: f64,
    pub pass: bool,
    pub pairs: Vec<PairContainment>,
}

/// Checks `M_q(μ^{N̄₀} ω) ⊂ int B_p` for every ordered pair.
pub fn feasibility_check(
    lib: &PrimitiveLibrary,
    kappa: f64,
    n0_bar: u32,
    omega: f64,
    mu: f64,
    resolution: usize,
) -> Result<ContainmentReport> {
    if n0_bar < 1 {
        return Err(invalid("N0 must be at least 1"));
    }
    if !(kappa > 0.0 && omega >= kappa && mu >= 1.0) {
        return Err(invalid("expected kappa > 0, omega >= kappa and mu >= 1"));
    }
    let level = mu.powi(n0_bar as i32) * omega;
    let grid_ok = resolution >= 2 && lib.state_dim() <= GRID_MAX_DIM;
    let mut pairs = Vec::with_capacity(lib.len() * lib.len());
    for q in lib.primitives() {
        let whitening = if grid_ok && level.is_finite() {
            Some(inverse_sqrt_spd(q.lyapunov.weight()) * level.sqrt())
        } else {
            None
        };
        for p in lib.primitives() {
            let offset = euclidean_distance(q.fixed_point(), p.fixed_point());
            let reach = offset + (level / q.lyapunov.eig_min()).sqrt();
            let bound = p.lyapunov.eig_max() * reach * reach;
            if bound < p.basin_level {
                pairs.push(PairContainment {
                    inner: q.id,
                    outer: p.id,
                    route: ContainmentRoute::Analytic,
                    max_outer_value: bound,
                    margin: p.basin_level - bound,
                    pass: true,
                });
                continue;
            }
            match &whitening {
                Some(w) => {
                    let sampled =
                        max_over_ellipsoid_boundary(q.fixed_point(), w, resolution, |x| {
                            p.lyapunov.value_unchecked(x)
                        });
                    pairs.push(PairContainment {
                        inner: q.id,
                        outer: p.id,
                        route: ContainmentRoute::Grid,
                        max_outer_value: sampled,
                        margin: p.basin_level - sampled,
                        pass: sampled < p.basin_level,
                    });
                }
                None => pairs.push(PairContainment {
                    inner: q.id,
                    outer: p.id,
                    route: ContainmentRoute::Unchecked,
                    max_outer_value: bound,
                    margin: p.basin_level - bound,
                    pass: false,
                }),
            }
        }
    }
    Ok(ContainmentReport {
        n0: n0_bar,
        level,
        pass: pairs.iter().all(|c| c.pass),
        pairs,
    })
}

/// Maximum of a convex function over the ellipsoid `{c + W y | ‖y‖ ≤ 1}`,
/// sampled on the boundary: grid points of `[-1, 1]^n` projected radially
/// onto the unit sphere.
fn max_over_ellipsoid_boundary(
    center: &[f64],
    whitening: &Matrix,
    resolution: usize,
    f: impl Fn(&[f64]) -> f64,
) -> f64 {
    let n = center.len();
    let lo = vec![-1.0; n];
    let hi = vec![1.0; n];
    let mut x = vec![0.0; n];
    let mut best = f(center);
    for_each_grid_point(&lo, &hi, resolution, |y| {
        let r = crate::linalg::norm(y);
        if r == 0.0 {
            return;
        }
        for i in 0..n {
            let mut acc = 0.0;
            for j in 0..n {
                acc += whitening[(i, j)] * y[j] / r;
            }
            x[i] = center[i] + acc;
        }
        best = best.max(f(&x));
    });
    best
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub kappa: f64,
    pub omega: f64,
    pub mu: f64,
    pub epsilon: f64,
    pub lambda: f64,
    pub n0_bar: u32,
    pub na_bar: f64,
    pub method: BoundMethod,
    pub resolution: usize,
    pub containment: ContainmentReport,
    pub delta_hat: Option<f64>,
    pub library_fingerprint: String,
}

impl Certificate {
    /// `μ^{N̄₀} ω`: the sublevel the undisturbed state never leaves.
    pub fn trapping_level(&self) -> f64 {
        self.mu.powi(self.n0_bar as i32) * self.omega
    }

    /// Budget at the certificate limit, `(N₀, Nₐ) = (N̄₀, N̄ₐ)`. A zero
    /// `N̄ₐ` (μ = 1) places no average constraint and maps to the smallest
    /// positive dwell time.
    pub fn budget(&self) -> DwellTimeBudget {
        DwellTimeBudget::new(self.n0_bar as f64, self.na_bar.max(f64::MIN_POSITIVE))
            .expect("certificates carry N0 >= 1")
    }

    pub fn check_library(&self, lib: &PrimitiveLibrary) -> Result<()> {
        let got = library_fingerprint(lib);
        if got != self.library_fingerprint {
            return Err(Error::FingerprintMismatch {
                expected: self.library_fingerprint.clone(),
                got,
            });
        }
        Ok(())
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificates always serialize")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthesisOptions {
    pub kappa_grid: Vec<f64>,
    pub epsilon: f64,
    pub n0_candidates: Vec<u32>,
    pub method: BoundMethod,
    pub resolution: usize,
}

impl SynthesisOptions {
    /// Defaults: 32 log-spaced κ, `ε = λ + 0.9(1 − λ)`, `N̄₀ ∈ {2}`, 201
    /// grid points per axis.
    pub fn defaults(lib: &PrimitiveLibrary, method: BoundMethod) -> Self {
        Self {
            kappa_grid: default_kappa_grid(lib, DEFAULT_KAPPA_COUNT),
            epsilon: default_epsilon(lib.lambda()),
            n0_candidates: vec![2],
            method,
            resolution: DEFAULT_RESOLUTION,
        }
    }
}

/// One row of the κ sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KappaDiagnostic {
    pub kappa: f64,
    pub omega: Option<f64>,
    pub mu: Option<f64>,
    pub na_bar: Option<f64>,
    pub feasible_n0: Vec<u32>,
    pub note: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthesisOutcome {
    pub certificate: Option<Certificate>,
    pub sweep: Vec<KappaDiagnostic>,
    /// `(q, p)` pairs with `x_q* ∉ B_p`; nonempty makes every κ infeasible.
    pub fixed_point_violations: Vec<(usize, usize)>,
}

impl SynthesisOutcome {
    pub fn is_feasible(&self) -> bool {
        self.certificate.is_some()
    }
}

/// Sweeps κ in ascending order and returns the first feasible certificate,
/// taking the largest feasible N̄₀ at that κ.
pub fn synthesize_certificate(
    lib: &PrimitiveLibrary,
    opts: &SynthesisOptions,
) -> Result<SynthesisOutcome> {
    let lambda = lib.lambda();
    if !(opts.epsilon > lambda && opts.epsilon < 1.0) {
        return Err(invalid(format!(
            "epsilon must lie in (lambda, 1) = ({lambda}, 1), got {}",
            opts.epsilon
        )));
    }
    if opts.kappa_grid.is_empty() {
        return Err(invalid("kappa grid must be nonempty"));
    }
    if opts.kappa_grid.windows(2).any(|w| !(w[0] <= w[1])) {
        return Err(invalid("kappa grid must be sorted ascending"));
    }
    if opts.n0_candidates.is_empty() || opts.n0_candidates.contains(&0) {
        return Err(invalid("N0 candidates must be nonempty and at least 1"));
    }
    let fingerprint = library_fingerprint(lib);
    let fixed_point_violations = lib.fixed_point_violations();
    let mut sweep = Vec::new();
    if !fixed_point_violations.is_empty() {
        for &kappa in &opts.kappa_grid {
            sweep.push(KappaDiagnostic {
                kappa,
                omega: None,
                mu: None,
                na_bar: None,
                feasible_n0: vec![],
                note: "some fixed point lies outside another primitive's basin".into(),
            });
        }
        return Ok(SynthesisOutcome {
            certificate: None,
            sweep,
            fixed_point_violations,
        });
    }

    let mut candidates = opts.n0_candidates.clone();
    candidates.sort_unstable();
    candidates.dedup();

    for &kappa in &opts.kappa_grid {
        let bounds = match opts.method {
            BoundMethod::Analytic => {
                omega_analytic(lib, kappa).and_then(|w| Ok((w, mu_analytic(lib, kappa)?)))
            }
            BoundMethod::Grid => omega_grid(lib, kappa, opts.resolution)
                .and_then(|w| Ok((w, mu_grid(lib, kappa, opts.resolution)?))),
        };
        let (omega, mu) = match bounds {
            Ok(v) => v,
            Err(Error::Precondition(msg)) => {
                sweep.push(KappaDiagnostic {
                    kappa,
                    omega: None,
                    mu: None,
                    na_bar: None,
                    feasible_n0: vec![],
                    note: msg,
                });
                continue;
            }
            Err(e) => return Err(e),
        };
        let na_bar = dwell_time_bound(mu, lambda, opts.epsilon)?;
        let mut reports = Vec::new();
        for &n0 in &candidates {
            let report = feasibility_check(lib, kappa, n0, omega, mu, opts.resolution)?;
            if report.pass {
                reports.push(report);
            }
        }
        let feasible_n0: Vec<u32> = reports.iter().map(|r| r.n0).collect();
        sweep.push(KappaDiagnostic {
            kappa,
            omega: Some(omega),
            mu: Some(mu),
            na_bar: Some(na_bar),
            feasible_n0: feasible_n0.clone(),
            note: if reports.is_empty() {
                "containment fails for every N0 candidate".into()
            } else {
                "feasible".into()
            },
        });
        // N̄ₐ does not depend on N̄₀, so the largest feasible N̄₀ wins outright.
        if let Some(containment) = reports.pop() {
            return Ok(SynthesisOutcome {
                certificate: Some(Certificate {
                    kappa,
                    omega,
                    mu,
                    epsilon: opts.epsilon,
                    lambda,
                    n0_bar: containment.n0,
                    na_bar,
                    method: opts.method,
                    resolution: opts.resolution,
                    containment,
                    delta_hat: None,
                    library_fingerprint: fingerprint,
                }),
                sweep,
                fixed_point_violations,
            });
        }
    }
    Ok(SynthesisOutcome {
        certificate: None,
        sweep,
        fixed_point_violations,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct MarginOptions {
    pub trial_budget: usize,
    pub seed: u64,
    pub horizon: usize,
    /// Upper end of the amplitude search. `None` derives it from the library.
    pub upper: Option<f64>,
    pub iterations: usize,
    pub relative_tolerance: f64,
}

impl Default for MarginOptions {
    fn default() -> Self {
        Self {
            trial_budget: 256,
            seed: 0,
            horizon: 200,
            upper: None,
            iterations: 20,
            relative_tolerance: 1e-3,
        }
    }
}

/// Default search ceiling: the disturbance size that, through the largest
/// gain, moves the state across the widest basin.
pub fn default_margin_ceiling(lib: &PrimitiveLibrary) -> f64 {
    let widest = lib
        .primitives()
        .iter()
        .map(|p| 2.0 * (p.basin_level / p.lyapunov.eig_min()).sqrt())
        .fold(0.0, f64::max);
    let gain = lib
        .primitives()
        .iter()
        .map(|p| p.map.disturbance_gain().norm())
        .fold(0.0, f64::max);
    if gain > 0.0 {
        widest / gain
    } else {
        widest
    }
}

/// Monte Carlo falsification estimate δ̂ of the disturbance margin.
///
/// Bisects the amplitude; at each candidate, `trial_budget` episodes run
/// with random initial states in `∩_p M_p(ω)`, random budget-limit
/// switching signals and disturbances of norm exactly the candidate at every
/// step. δ̂ is the largest amplitude with no episode leaving `∩_p B_p`.
/// Trials reuse their seeds across amplitudes.
pub fn estimate_disturbance_margin(
    lib: &PrimitiveLibrary,
    cert: &Certificate,
    opts: &MarginOptions,
) -> Result<f64> {
    cert.check_library(lib)?;
    if !cert.containment.pass {
        return Err(Error::Precondition("certificate is not feasible".into()));
    }
    if opts.trial_budget == 0 || opts.horizon == 0 {
        return Err(invalid("trial budget and horizon must be positive"));
    }
    let upper = opts.upper.unwrap_or_else(|| default_margin_ceiling(lib));
    if !(upper > 0.0 && upper.is_finite()) {
        return Err(invalid("margin search ceiling must be positive"));
    }
    let violates = |amplitude: f64| -> Result<bool> {
        let any = (0..opts.trial_budget)
            .into_par_iter()
            .map(|i| -> Result<bool> {
                let mut rng = rng_for(opts.seed, stream::MARGIN, i as u64);
                let ep = sample_episode(
                    lib,
                    cert,
                    amplitude,
                    DisturbanceShape::Sphere,
                    opts.horizon,
                    &mut rng,
                )?;
                Ok(ep.leaves_basins(lib))
            })
            .collect::<Result<Vec<bool>>>()?;
        Ok(any.into_iter().any(|v| v))
    };
    if !violates(upper)? {
        return Ok(upper);
    }
    let (mut lo, mut hi) = (0.0, upper);
    for _ in 0..opts.iterations {
        if hi - lo <= opts.relative_tolerance * hi {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if violates(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(lo)
}
