//! Reduced leader-following walker.
//!
//! Each stride applies one primitive to the reduced state `z` and composes
//! the walker pose in SE(2). A leader pulls on the walker through an
//! impedance law; the stride integral of that force gives a heading estimate
//! `Φ_k`, which picks the primitive for the next stride.

use std::f64::consts::PI;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::certificates::Certificate;
use crate::error::{check_dim, invalid, Error, Result};
use crate::linalg::{matrix_from_rows, matrix_to_rows, Matrix};
use crate::primitives::{Primitive, PrimitiveLibrary};
use crate::schema::load_library;
use crate::switching::{heading_policy, Decision, Supervisor, SwitchingSignal};

pub type Vec2 = [f64; 2];

/// Minimum number of Simpson panels per stride integral.
pub const MIN_PANELS: usize = 64;
pub const DEFAULT_STRIDE_DURATION: f64 = 0.5;
pub const DEFAULT_LEADER_SPEED: f64 = 0.65;
/// Endpoint refinements: the force depends on the stride endpoint, which in
/// turn depends on the force through the reduced state.
const ENDPOINT_PASSES: usize = 3;
/// Arcs are split so each Hermite piece turns by at most this much.
const MAX_PIECE_TURN: f64 = PI / 16.0;

/// Wraps an angle to `(−π, π]`.
pub fn wrap_angle(a: f64) -> f64 {
    let r = a.rem_euclid(2.0 * PI);
    if r > PI {
        r - 2.0 * PI
    } else {
        r
    }
}

pub fn rotate(v: Vec2, theta: f64) -> Vec2 {
    let (s, c) = theta.sin_cos();
    [c * v[0] - s * v[1], s * v[0] + c * v[1]]
}

fn add(a: Vec2, b: Vec2) -> Vec2 {
    [a[0] + b[0], a[1] + b[1]]
}

fn sub(a: Vec2, b: Vec2) -> Vec2 {
    [a[0] - b[0], a[1] - b[1]]
}

fn scale(a: Vec2, s: f64) -> Vec2 {
    [a[0] * s, a[1] * s]
}

fn mat_vec(m: &[Vec2; 2], v: Vec2) -> Vec2 {
    [
        m[0][0] * v[0] + m[0][1] * v[1],
        m[1][0] * v[0] + m[1][1] * v[1],
    ]
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pose {
    pub position: Vec2,
    pub heading: f64,
}

impl Pose {
    pub fn new(position: Vec2, heading: f64) -> Self {
        Self {
            position,
            heading: wrap_angle(heading),
        }
    }

    pub fn rotated(&self, theta: f64) -> Self {
        Self::new(rotate(self.position, theta), self.heading + theta)
    }
}

/// A reduced primitive together with the pose change it produces per stride.
#[derive(Debug, Clone, PartialEq)]
pub struct StridePrimitive {
    pub reduced: Primitive,
    pub nominal_heading_change: f64,
    /// Body frame: (forward, left), metres.
    pub nominal_displacement: Vec2,
    pub stride_duration: f64,
    /// Body-frame stride force `(fx, fy)` to the reduced disturbance channel,
    /// `dist_dim × 2`.
    pub force_coupling: Matrix,
    /// Heading perturbation `h · (z' − z*)`.
    pub heading_gain: Vec<f64>,
    /// Displacement perturbation `D (z' − z*)`, `2 × state_dim`.
    pub displacement_gain: Matrix,
}

impl StridePrimitive {
    pub fn new(
        reduced: Primitive,
        nominal_heading_change: f64,
        nominal_displacement: Vec2,
        stride_duration: f64,
        force_coupling: Matrix,
        heading_gain: Vec<f64>,
        displacement_gain: Matrix,
    ) -> Result<Self> {
        let n = reduced.state_dim();
        if reduced.id > 2 {
            return Err(invalid(format!(
                "stride primitive ids are 0, 1, 2; got {}",
                reduced.id
            )));
        }
        if !(stride_duration > 0.0 && stride_duration.is_finite()) {
            return Err(invalid("stride duration must be positive"));
        }
        check_dim(
            "force coupling rows",
            reduced.map.dist_dim(),
            force_coupling.nrows(),
        )?;
        check_dim("force coupling columns", 2, force_coupling.ncols())?;
        check_dim("heading gain", n, heading_gain.len())?;
        check_dim("displacement gain rows", 2, displacement_gain.nrows())?;
        check_dim("displacement gain columns", n, displacement_gain.ncols())?;
        let finite = nominal_heading_change.is_finite()
            && nominal_displacement.iter().all(|v| v.is_finite())
            && heading_gain.iter().all(|v| v.is_finite())
            && force_coupling.iter().all(|v| v.is_finite())
            && displacement_gain.iter().all(|v| v.is_finite());
        if !finite {
            return Err(invalid("stride kinematics must be finite"));
        }
        Ok(Self {
            reduced,
            nominal_heading_change,
            nominal_displacement,
            stride_duration,
            force_coupling,
            heading_gain,
            displacement_gain,
        })
    }

    pub fn id(&self) -> usize {
        self.reduced.id
    }

    fn coupled_disturbance(&self, body_force: Vec2) -> Vec<f64> {
        let c = &self.force_coupling;
        (0..c.nrows())
            .map(|i| c[(i, 0)] * body_force[0] + c[(i, 1)] * body_force[1])
            .collect()
    }
}

/// Cubic Hermite piece on `[t0, t1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HermitePiece {
    pub t0: f64,
    pub t1: f64,
    pub p0: Vec2,
    pub p1: Vec2,
    pub v0: Vec2,
    pub v1: Vec2,
}

impl HermitePiece {
    fn position(&self, t: f64) -> Vec2 {
        let h = self.t1 - self.t0;
        let s = (t - self.t0) / h;
        let (s2, s3) = (s * s, s * s * s);
        let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
        let h10 = s3 - 2.0 * s2 + s;
        let h01 = -2.0 * s3 + 3.0 * s2;
        let h11 = s3 - s2;
        std::array::from_fn(|i| {
            h00 * self.p0[i] + h10 * h * self.v0[i] + h01 * self.p1[i] + h11 * h * self.v1[i]
        })
    }

    fn velocity(&self, t: f64) -> Vec2 {
        let h = self.t1 - self.t0;
        let s = (t - self.t0) / h;
        let s2 = s * s;
        let d00 = 6.0 * s2 - 6.0 * s;
        let d10 = 3.0 * s2 - 4.0 * s + 1.0;
        let d01 = -6.0 * s2 + 6.0 * s;
        let d11 = 3.0 * s2 - 2.0 * s;
        std::array::from_fn(|i| {
            (d00 * self.p0[i] + d01 * self.p1[i]) / h + d10 * self.v0[i] + d11 * self.v1[i]
        })
    }

    fn map_points(&self, f: impl Fn(Vec2) -> Vec2) -> Self {
        Self {
            p0: f(self.p0),
            p1: f(self.p1),
            v0: f(self.v0),
            v1: f(self.v1),
            ..*self
        }
    }
}

/// Leader trajectory `p_L(t)` with impedance gains `K_L`, `N_L`.
#[derive(Debug, Clone, PartialEq)]
pub struct LeaderModel {
    pieces: Vec<HermitePiece>,
    stiffness: [Vec2; 2],
    damping: [Vec2; 2],
}

const SPAN_TOL: f64 = 1e-9;

fn is_psd2(m: &[Vec2; 2]) -> bool {
    // Quadratic form only sees the symmetric part.
    let a = m[0][0];
    let c = m[1][1];
    let b = 0.5 * (m[0][1] + m[1][0]);
    let tol = 1e-12 * (1.0 + a.abs() + c.abs());
    a >= -tol && c >= -tol && a * c - b * b >= -tol
}

impl LeaderModel {
    pub fn new(
        pieces: Vec<HermitePiece>,
        stiffness: [Vec2; 2],
        damping: [Vec2; 2],
    ) -> Result<Self> {
        if pieces.is_empty() {
            return Err(invalid("leader trajectory needs at least one piece"));
        }
        for (i, piece) in pieces.iter().enumerate() {
            if !(piece.t1 > piece.t0) {
                return Err(invalid(format!("leader piece {i} has an empty time span")));
            }
            if i > 0 && (piece.t0 - pieces[i - 1].t1).abs() > SPAN_TOL {
                return Err(invalid(format!(
                    "leader piece {i} does not start where piece {} ends",
                    i - 1
                )));
            }
            let values = [
                piece.t0,
                piece.t1,
                piece.p0[0],
                piece.p0[1],
                piece.p1[0],
                piece.p1[1],
            ];
            if values
                .iter()
                .chain(&piece.v0)
                .chain(&piece.v1)
                .any(|v| !v.is_finite())
            {
                return Err(invalid("leader trajectory must be finite"));
            }
        }
        if !is_psd2(&stiffness) || !is_psd2(&damping) {
            return Err(invalid("impedance gains must be positive semidefinite"));
        }
        Ok(Self {
            pieces,
            stiffness,
            damping,
        })
    }

    /// Constant-speed path made of arcs with the given `(duration, curvature)`
    /// segments; zero curvature is a straight segment.
    pub fn arcs(
        start: Vec2,
        heading: f64,
        speed: f64,
        segments: &[(f64, f64)],
        stiffness: [Vec2; 2],
        damping: [Vec2; 2],
    ) -> Result<Self> {
        if !(speed >= 0.0 && speed.is_finite()) {
            return Err(invalid("leader speed must be nonnegative"));
        }
        let mut pieces = Vec::new();
        let (mut t, mut p, mut th) = (0.0, start, heading);
        for &(duration, curvature) in segments {
            if !(duration > 0.0 && duration.is_finite() && curvature.is_finite()) {
                return Err(invalid(
                    "arc segments need positive duration and finite curvature",
                ));
            }
            let turn = curvature * speed * duration;
            let count = ((turn.abs() / MAX_PIECE_TURN).ceil() as usize).max(1);
            let dt = duration / count as f64;
            for _ in 0..count {
                let dth = curvature * speed * dt;
                let p1 = if curvature == 0.0 {
                    add(p, rotate([speed * dt, 0.0], th))
                } else {
                    let r = 1.0 / curvature;
                    add(
                        p,
                        [
                            r * ((th + dth).sin() - th.sin()),
                            r * (th.cos() - (th + dth).cos()),
                        ],
                    )
                };
                let v0 = rotate([speed, 0.0], th);
                let v1 = rotate([speed, 0.0], th + dth);
                pieces.push(HermitePiece {
                    t0: t,
                    t1: t + dt,
                    p0: p,
                    p1,
                    v0,
                    v1,
                });
                t += dt;
                p = p1;
                th += dth;
            }
        }
        Self::new(pieces, stiffness, damping)
    }

    pub fn straight(
        start: Vec2,
        heading: f64,
        speed: f64,
        duration: f64,
        stiffness: [Vec2; 2],
        damping: [Vec2; 2],
    ) -> Result<Self> {
        Self::arcs(
            start,
            heading,
            speed,
            &[(duration, 0.0)],
            stiffness,
            damping,
        )
    }

    /// Catmull-Rom interpolation through timestamped waypoints, with one-sided
    /// tangents at the ends.
    pub fn waypoints(
        points: &[(f64, Vec2)],
        stiffness: [Vec2; 2],
        damping: [Vec2; 2],
    ) -> Result<Self> {
        if points.len() < 2 {
            return Err(invalid("need at least two waypoints"));
        }
        if points.windows(2).any(|w| !(w[1].0 > w[0].0)) {
            return Err(invalid("waypoint times must be strictly increasing"));
        }
        let n = points.len();
        let tangent = |i: usize| -> Vec2 {
            let (a, b) = match i {
                0 => (0, 1),
                i if i == n - 1 => (n - 2, n - 1),
                i => (i - 1, i + 1),
            };
            scale(
                sub(points[b].1, points[a].1),
                1.0 / (points[b].0 - points[a].0),
            )
        };
        let pieces = (0..n - 1)
            .map(|i| HermitePiece {
                t0: points[i].0,
                t1: points[i + 1].0,
                p0: points[i].1,
                p1: points[i + 1].1,
                v0: tangent(i),
                v1: tangent(i + 1),
            })
            .collect();
        Self::new(pieces, stiffness, damping)
    }

    pub fn start_time(&self) -> f64 {
        self.pieces[0].t0
    }

    pub fn end_time(&self) -> f64 {
        self.pieces[self.pieces.len() - 1].t1
    }

    pub fn pieces(&self) -> &[HermitePiece] {
        &self.pieces
    }

    pub fn stiffness(&self) -> &[Vec2; 2] {
        &self.stiffness
    }

    pub fn damping(&self) -> &[Vec2; 2] {
        &self.damping
    }

    fn piece(&self, t: f64) -> Result<&HermitePiece> {
        if !(t >= self.start_time() - SPAN_TOL && t <= self.end_time() + SPAN_TOL) {
            return Err(invalid(format!(
                "time {t} outside the leader span [{}, {}]",
                self.start_time(),
                self.end_time()
            )));
        }
        let i = self.pieces.partition_point(|p| p.t1 < t);
        Ok(&self.pieces[i.min(self.pieces.len() - 1)])
    }

    pub fn position(&self, t: f64) -> Result<Vec2> {
        Ok(self.piece(t)?.position(t))
    }

    pub fn velocity(&self, t: f64) -> Result<Vec2> {
        Ok(self.piece(t)?.velocity(t))
    }

    /// Rotation of the path about the origin; gains rotate as `R K Rᵀ`.
    pub fn rotated(&self, theta: f64) -> Self {
        let conj = |m: &[Vec2; 2]| -> [Vec2; 2] {
            let c0 = rotate(mat_vec(m, rotate([1.0, 0.0], -theta)), theta);
            let c1 = rotate(mat_vec(m, rotate([0.0, 1.0], -theta)), theta);
            [[c0[0], c1[0]], [c0[1], c1[1]]]
        };
        Self {
            pieces: self
                .pieces
                .iter()
                .map(|p| p.map_points(|v| rotate(v, theta)))
                .collect(),
            stiffness: conj(&self.stiffness),
            damping: conj(&self.damping),
        }
    }

    /// Mirror image across the X axis.
    pub fn reflected(&self) -> Self {
        let flip = |m: &[Vec2; 2]| [[m[0][0], -m[0][1]], [-m[1][0], m[1][1]]];
        Self {
            pieces: self
                .pieces
                .iter()
                .map(|p| p.map_points(|v| [v[0], -v[1]]))
                .collect(),
            stiffness: flip(&self.stiffness),
            damping: flip(&self.damping),
        }
    }
}

/// `F_e(t) = K_L (p_L(t) − p_E) + N_L (ṗ_L(t) − v_E)`, world frame.
pub fn impedance_force(leader: &LeaderModel, p_e: Vec2, v_e: Vec2, t: f64) -> Result<Vec2> {
    let piece = leader.piece(t)?;
    let (p_l, v_l) = (piece.position(t), piece.velocity(t));
    Ok(add(
        mat_vec(&leader.stiffness, sub(p_l, p_e)),
        mat_vec(&leader.damping, sub(v_l, v_e)),
    ))
}

/// Stride integrals of the force components and the heading estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StrideForce {
    pub fx: f64,
    pub fy: f64,
    pub phi: f64,
}

impl StrideForce {
    pub fn new(fx: f64, fy: f64) -> Self {
        Self {
            fx,
            fy,
            phi: heading_estimate(fx, fy),
        }
    }

    /// Components expressed in a frame rotated by `heading`.
    pub fn in_frame(&self, heading: f64) -> Self {
        let v = rotate([self.fx, self.fy], -heading);
        Self::new(v[0], v[1])
    }
}

/// `Φ = atan2(fy, fx)`, with the zero vector read as straight ahead.
pub fn heading_estimate(fx: f64, fy: f64) -> f64 {
    if fx == 0.0 && fy == 0.0 {
        0.0
    } else {
        fy.atan2(fx)
    }
}

/// Composite Simpson integral of the impedance force while the walker moves
/// in a straight line from `start` to `end` at constant speed over
/// `[t0, t1]`. World frame.
pub fn integrate_stride_force(
    leader: &LeaderModel,
    start: Vec2,
    end: Vec2,
    t0: f64,
    t1: f64,
    panels: usize,
) -> Result<StrideForce> {
    if !(t1 > t0) {
        return Err(invalid(format!("degenerate stride interval [{t0}, {t1}]")));
    }
    if panels < MIN_PANELS || panels % 2 != 0 {
        return Err(invalid(format!(
            "Simpson needs an even panel count of at least {MIN_PANELS}, got {panels}"
        )));
    }
    let duration = t1 - t0;
    let v_e = scale(sub(end, start), 1.0 / duration);
    let h = duration / panels as f64;
    let mut acc = [0.0; 2];
    for i in 0..=panels {
        let w = if i == 0 || i == panels {
            1.0
        } else if i % 2 == 1 {
            4.0
        } else {
            2.0
        };
        let s = i as f64 / panels as f64;
        let t = if i == panels { t1 } else { t0 + i as f64 * h };
        let p_e = add(start, scale(sub(end, start), s));
        let f = impedance_force(leader, p_e, v_e, t)?;
        acc[0] += w * f[0];
        acc[1] += w * f[1];
    }
    Ok(StrideForce::new(acc[0] * h / 3.0, acc[1] * h / 3.0))
}

/// One stride: `z' = f_p(z, C·F_body)`, then the pose advances by the nominal
/// step plus perturbations affine in `z' − z*`. `body_force` must already be
/// expressed in the walker frame at stride start.
pub fn stride_update(
    pose: &Pose,
    prim: &StridePrimitive,
    z: &[f64],
    body_force: &StrideForce,
) -> Result<(Pose, Vec<f64>)> {
    if z.iter().any(|v| !v.is_finite()) {
        return Err(invalid("reduced state must be finite"));
    }
    let d = prim.coupled_disturbance([body_force.fx, body_force.fy]);
    let next = prim.reduced.eval(z, &d)?;
    let e: Vec<f64> = next
        .iter()
        .zip(prim.reduced.fixed_point())
        .map(|(a, b)| a - b)
        .collect();
    let dh: f64 = prim.heading_gain.iter().zip(&e).map(|(g, v)| g * v).sum();
    let g = &prim.displacement_gain;
    let step: Vec2 = std::array::from_fn(|r| {
        prim.nominal_displacement[r] + (0..e.len()).map(|c| g[(r, c)] * e[c]).sum::<f64>()
    });
    let position = add(pose.position, rotate(step, pose.heading));
    let heading = pose.heading + prim.nominal_heading_change + dh;
    Ok((Pose::new(position, heading), next))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WalkerMode {
    Adaptive,
    Fixed(usize),
}

impl FromStr for WalkerMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "adaptive" {
            return Ok(Self::Adaptive);
        }
        s.strip_prefix("fixed:")
            .and_then(|id| id.parse().ok())
            .map(Self::Fixed)
            .ok_or_else(|| {
                invalid(format!(
                    "mode must be `adaptive` or `fixed:<id>`, got `{s}`"
                ))
            })
    }
}

impl std::fmt::Display for WalkerMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Adaptive => f.write_str("adaptive"),
            Self::Fixed(id) => write!(f, "fixed:{id}"),
        }
    }
}

impl Serialize for WalkerMode {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for WalkerMode {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Fully resolved closed-loop configuration.
#[derive(Debug, Clone)]
pub struct WalkerScenario {
    primitives: Vec<StridePrimitive>,
    library: PrimitiveLibrary,
    certificate: Certificate,
    pub leader: LeaderModel,
    pub initial_pose: Pose,
    pub initial_state: Vec<f64>,
    pub initial_primitive: usize,
    pub mode: WalkerMode,
    pub stride_count: usize,
    pub dead_zone: f64,
    pub panels: usize,
}

impl WalkerScenario {
    /// Defaults: first stride uses primitive 1, the walker starts on the
    /// leader at `t = 0` with the leader's heading, `z₀` at that primitive's
    /// fixed point, and the stride count fills the leader span.
    pub fn new(
        primitives: Vec<StridePrimitive>,
        certificate: Certificate,
        leader: LeaderModel,
        mode: WalkerMode,
    ) -> Result<Self> {
        let mut primitives = primitives;
        primitives.sort_by_key(StridePrimitive::id);
        let ids: Vec<usize> = primitives.iter().map(StridePrimitive::id).collect();
        if ids != [0, 1, 2] {
            return Err(invalid(format!(
                "walker needs primitives 0, 1 and 2, got {ids:?}"
            )));
        }
        let library =
            PrimitiveLibrary::new(primitives.iter().map(|p| p.reduced.clone()).collect())?;
        certificate.check_library(&library)?;
        let t0 = leader.start_time();
        let v0 = leader.velocity(t0)?;
        let initial_pose = Pose::new(leader.position(t0)?, heading_estimate(v0[0], v0[1]));
        let initial_primitive = 1;
        let initial_state = primitives[initial_primitive].reduced.fixed_point().to_vec();
        let span = leader.end_time() - t0;
        let stride_count = (span / primitives[1].stride_duration + 1e-9).floor() as usize;
        let scenario = Self {
            primitives,
            library,
            certificate,
            leader,
            initial_pose,
            initial_state,
            initial_primitive,
            mode,
            stride_count,
            dead_zone: 0.0,
            panels: MIN_PANELS,
        };
        Ok(scenario)
    }

    pub fn primitives(&self) -> &[StridePrimitive] {
        &self.primitives
    }

    pub fn library(&self) -> &PrimitiveLibrary {
        &self.library
    }

    pub fn certificate(&self) -> &Certificate {
        &self.certificate
    }

    /// The same scenario with leader and initial pose rotated about the
    /// origin.
    pub fn rotated(&self, theta: f64) -> Self {
        Self {
            leader: self.leader.rotated(theta),
            initial_pose: self.initial_pose.rotated(theta),
            ..self.clone()
        }
    }

    /// Mirror image across the X axis. Only a symmetry of the closed loop
    /// when primitives 0 and 2 are exact mirrors of each other.
    pub fn reflected(&self) -> Self {
        let p = self.initial_pose;
        Self {
            leader: self.leader.reflected(),
            initial_pose: Pose::new([p.position[0], -p.position[1]], -p.heading),
            ..self.clone()
        }
    }

    fn validate(&self) -> Result<()> {
        check_dim(
            "initial reduced state",
            self.library.state_dim(),
            self.initial_state.len(),
        )?;
        if self.initial_primitive > 2 {
            return Err(Error::UnknownPrimitive(self.initial_primitive));
        }
        if let WalkerMode::Fixed(id) = self.mode {
            if id > 2 {
                return Err(Error::UnknownPrimitive(id));
            }
        }
        if self.stride_count == 0 {
            return Err(invalid("stride count must be positive"));
        }
        if !(self.dead_zone >= 0.0) {
            return Err(invalid("dead zone must be nonnegative"));
        }
        if self.panels < MIN_PANELS || self.panels % 2 != 0 {
            return Err(invalid(format!(
                "panels must be even and at least {MIN_PANELS}"
            )));
        }
        if !self.certificate.containment.pass {
            return Err(Error::Precondition("certificate is not feasible".into()));
        }
        Ok(())
    }
}

/// Everything recorded by [`run_scenario`]. Per-stride vectors have
/// `strides` entries; `times`, `poses`, `reduced`, `leader_*` and
/// `in_all_basins` have one more.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioTrace {
    pub mode: WalkerMode,
    pub times: Vec<f64>,
    pub poses: Vec<Pose>,
    pub reduced: Vec<Vec<f64>>,
    pub sigma: Vec<usize>,
    /// Primitive asked for by the policy (or the mode) before supervision.
    pub requested: Vec<usize>,
    pub decisions: Vec<Decision>,
    /// Stride integrals in the walker frame at stride start.
    pub forces: Vec<StrideForce>,
    pub leader_positions: Vec<Vec2>,
    pub leader_velocities: Vec<Vec2>,
    pub in_all_basins: Vec<bool>,
    pub deferrals: usize,
}

impl ScenarioTrace {
    pub fn strides(&self) -> usize {
        self.sigma.len()
    }

    pub fn signal(&self) -> Result<SwitchingSignal> {
        SwitchingSignal::new(self.sigma.clone())
    }

    /// Distance of the walker from the leader, perpendicular to the leader's
    /// direction of travel, at each stride boundary.
    pub fn lateral_deviation(&self) -> Vec<f64> {
        self.poses
            .iter()
            .zip(self.leader_positions.iter().zip(&self.leader_velocities))
            .map(|(pose, (pl, vl))| {
                let d = sub(pose.position, *pl);
                let speed = vl[0].hypot(vl[1]);
                if speed > 0.0 {
                    (vl[0] * d[1] - vl[1] * d[0]).abs() / speed
                } else {
                    d[0].hypot(d[1])
                }
            })
            .collect()
    }

    pub fn max_lateral_deviation(&self) -> f64 {
        self.lateral_deviation().into_iter().fold(0.0, f64::max)
    }

    pub fn final_lateral_deviation(&self) -> f64 {
        *self
            .lateral_deviation()
            .last()
            .expect("trace has an initial pose")
    }

    pub fn final_leader_distance(&self) -> f64 {
        let d = sub(
            self.poses.last().expect("nonempty").position,
            *self.leader_positions.last().expect("nonempty"),
        );
        d[0].hypot(d[1])
    }

    pub fn usage_counts(&self) -> [usize; 3] {
        let mut c = [0; 3];
        for &s in &self.sigma {
            c[s] += 1;
        }
        c
    }

    pub fn all_in_basins(&self) -> bool {
        self.in_all_basins.iter().all(|b| *b)
    }

    pub fn write_poses_csv(&self, writer: impl Write) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record([
            "k",
            "t",
            "x",
            "y",
            "heading",
            "leader_x",
            "leader_y",
            "lateral_deviation",
        ])?;
        for (k, ((pose, pl), lat)) in self
            .poses
            .iter()
            .zip(&self.leader_positions)
            .zip(self.lateral_deviation())
            .enumerate()
        {
            w.write_record([
                k.to_string(),
                self.times[k].to_string(),
                pose.position[0].to_string(),
                pose.position[1].to_string(),
                pose.heading.to_string(),
                pl[0].to_string(),
                pl[1].to_string(),
                lat.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    /// Reduced state per stride boundary with `V_p` for each primitive.
    pub fn write_reduced_csv(&self, lib: &PrimitiveLibrary, writer: impl Write) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let n = lib.state_dim();
        let mut header = vec!["k".to_string(), "sigma".to_string()];
        header.extend((0..n).map(|i| format!("z{i}")));
        header.extend(lib.ids().map(|id| format!("V{id}")));
        header.push("in_all_basins".into());
        w.write_record(&header)?;
        for (k, z) in self.reduced.iter().enumerate() {
            let mut row = vec![
                k.to_string(),
                self.sigma.get(k).map(|s| s.to_string()).unwrap_or_default(),
            ];
            row.extend(z.iter().map(|v| v.to_string()));
            row.extend(
                lib.primitives()
                    .iter()
                    .map(|p| p.lyapunov.value_unchecked(z).to_string()),
            );
            row.push(self.in_all_basins[k].to_string());
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn write_forces_csv(&self, writer: impl Write) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["k", "fx", "fy", "phi", "requested", "sigma", "decision"])?;
        for (k, f) in self.forces.iter().enumerate() {
            let decision = match self.decisions[k] {
                Decision::Admit => "admit",
                Decision::Defer => "defer",
            };
            w.write_record([
                k.to_string(),
                f.fx.to_string(),
                f.fy.to_string(),
                f.phi.to_string(),
                self.requested[k].to_string(),
                self.sigma[k].to_string(),
                decision.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Runs the closed loop. Per stride: integrate the leader force along the
/// stride, apply the primitive, then map `Φ_k` through the heading policy and
/// the supervisor to choose the primitive for stride `k + 1`.
pub fn run_scenario(scenario: &WalkerScenario) -> Result<ScenarioTrace> {
    scenario.validate()?;
    let leader = &scenario.leader;
    let mut supervisor = Supervisor::new(scenario.certificate.budget());
    let first = match scenario.mode {
        WalkerMode::Adaptive => scenario.initial_primitive,
        WalkerMode::Fixed(id) => id,
    };
    let (decision, mut current) = supervisor.step(first);

    let k_total = scenario.stride_count;
    let mut t = leader.start_time();
    let mut pose = scenario.initial_pose;
    let mut z = scenario.initial_state.clone();
    let mut trace = ScenarioTrace {
        mode: scenario.mode,
        times: vec![t],
        poses: vec![pose],
        reduced: vec![z.clone()],
        sigma: Vec::with_capacity(k_total),
        requested: vec![first],
        decisions: vec![decision],
        forces: Vec::with_capacity(k_total),
        leader_positions: vec![leader.position(t)?],
        leader_velocities: vec![leader.velocity(t)?],
        in_all_basins: vec![scenario.library.in_all_basins(&z)],
        deferrals: 0,
    };

    for k in 0..k_total {
        let prim = &scenario.primitives[current];
        let t_next = t + prim.stride_duration;
        let mut end = add(
            pose.position,
            rotate(prim.nominal_displacement, pose.heading),
        );
        let mut body = StrideForce::new(0.0, 0.0);
        let mut outcome = (pose, z.clone());
        for _ in 0..ENDPOINT_PASSES {
            let world =
                integrate_stride_force(leader, pose.position, end, t, t_next, scenario.panels)?;
            body = world.in_frame(pose.heading);
            outcome = stride_update(&pose, prim, &z, &body)?;
            end = outcome.0.position;
        }
        trace.sigma.push(current);
        trace.forces.push(body);
        (pose, z) = outcome;
        t = t_next;
        trace.times.push(t);
        trace.poses.push(pose);
        trace.in_all_basins.push(scenario.library.in_all_basins(&z));
        trace.reduced.push(z.clone());
        trace.leader_positions.push(leader.position(t)?);
        trace.leader_velocities.push(leader.velocity(t)?);

        if k + 1 < k_total {
            let requested = match scenario.mode {
                WalkerMode::Adaptive => heading_policy(body.phi, scenario.dead_zone)?,
                WalkerMode::Fixed(id) => id,
            };
            let (decision, chosen) = supervisor.step(requested);
            trace.requested.push(requested);
            trace.decisions.push(decision);
            current = chosen;
        }
    }
    trace.deferrals = supervisor.deferrals();
    Ok(trace)
}

/// Semi-axes of the ellipse `{V_p ≤ level}` for plotting.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BasinEllipse {
    pub id: usize,
    pub center: Vec<f64>,
    pub weight: Vec<Vec<f64>>,
    pub level: f64,
    /// Unit eigenvectors of `P` paired with semi-axis lengths
    /// `sqrt(level / eigenvalue)`.
    pub axes: Vec<(Vec<f64>, f64)>,
}

/// Leader path against walker path, plus the reduced trace with basin
/// ellipses.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlotBundle {
    pub leader_path: Vec<(f64, Vec2)>,
    pub walker_path: Vec<(f64, Vec2)>,
    pub reduced_trace: Vec<Vec<f64>>,
    pub sigma: Vec<usize>,
    pub basins: Vec<BasinEllipse>,
    pub trapping_level: f64,
}

pub fn plot_bundle(
    scenario: &WalkerScenario,
    trace: &ScenarioTrace,
    samples_per_stride: usize,
) -> Result<PlotBundle> {
    let leader = &scenario.leader;
    let end = *trace.times.last().expect("nonempty");
    let start = leader.start_time();
    let count = samples_per_stride.max(1) * trace.strides().max(1);
    let leader_path = (0..=count)
        .map(|i| {
            let t = start + (end - start) * i as f64 / count as f64;
            leader.position(t).map(|p| (t, p))
        })
        .collect::<Result<Vec<_>>>()?;
    let basins = scenario
        .library
        .primitives()
        .iter()
        .map(|p| {
            let eig = p.lyapunov.weight().clone().symmetric_eigen();
            let axes = (0..eig.eigenvalues.len())
                .map(|i| {
                    let v = eig.eigenvectors.column(i).iter().copied().collect();
                    (v, (p.basin_level / eig.eigenvalues[i]).sqrt())
                })
                .collect();
            BasinEllipse {
                id: p.id,
                center: p.fixed_point().to_vec(),
                weight: matrix_to_rows(p.lyapunov.weight()),
                level: p.basin_level,
                axes,
            }
        })
        .collect();
    Ok(PlotBundle {
        leader_path,
        walker_path: trace
            .times
            .iter()
            .zip(&trace.poses)
            .map(|(t, p)| (*t, p.position))
            .collect(),
        reduced_trace: trace.reduced.clone(),
        sigma: trace.sigma.clone(),
        basins,
        trapping_level: scenario.certificate.trapping_level(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StrideDocument {
    pub id: usize,
    pub heading_change: f64,
    pub displacement: Vec2,
    #[serde(default = "default_duration")]
    pub duration: f64,
    pub force_coupling: Vec<Vec<f64>>,
    pub heading_gain: Vec<f64>,
    pub displacement_gain: Vec<Vec<f64>>,
}

fn default_duration() -> f64 {
    DEFAULT_STRIDE_DURATION
}

/// Pose kinematics for each reduced primitive of a library, keyed by id.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StrideSetDocument {
    pub strides: Vec<StrideDocument>,
}

impl StrideSetDocument {
    pub fn resolve(&self, lib: &PrimitiveLibrary) -> Result<Vec<StridePrimitive>> {
        self.strides
            .iter()
            .map(|s| {
                StridePrimitive::new(
                    lib.get(s.id)?.clone(),
                    s.heading_change,
                    s.displacement,
                    s.duration,
                    matrix_from_rows(&s.force_coupling)?,
                    s.heading_gain.clone(),
                    matrix_from_rows(&s.displacement_gain)?,
                )
            })
            .collect()
    }

    pub fn from_strides(strides: &[StridePrimitive]) -> Self {
        Self {
            strides: strides
                .iter()
                .map(|s| StrideDocument {
                    id: s.id(),
                    heading_change: s.nominal_heading_change,
                    displacement: s.nominal_displacement,
                    duration: s.stride_duration,
                    force_coupling: matrix_to_rows(&s.force_coupling),
                    heading_gain: s.heading_gain.clone(),
                    displacement_gain: matrix_to_rows(&s.displacement_gain),
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArcSegment {
    pub duration: f64,
    #[serde(default)]
    pub curvature: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum LeaderPath {
    /// Constant speed along arcs and straight segments.
    Arcs {
        #[serde(default)]
        start: Vec2,
        #[serde(default)]
        heading: f64,
        #[serde(default = "default_speed")]
        speed: f64,
        segments: Vec<ArcSegment>,
    },
    /// `[t, x, y]` rows.
    Waypoints { points: Vec<[f64; 3]> },
}

fn default_speed() -> f64 {
    DEFAULT_LEADER_SPEED
}

/// Walker pose relative to the leader at its start time, in the leader's
/// frame.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PoseOffset {
    #[serde(default)]
    pub forward: f64,
    #[serde(default)]
    pub left: f64,
    #[serde(default)]
    pub heading: f64,
}

/// Scenario configuration. Paths are relative to the document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioDocument {
    pub library: PathBuf,
    pub strides: PathBuf,
    pub certificate: PathBuf,
    pub leader: LeaderPath,
    pub stiffness: [Vec2; 2],
    pub damping: [Vec2; 2],
    #[serde(default = "default_mode")]
    pub mode: WalkerMode,
    #[serde(default)]
    pub initial_offset: PoseOffset,
    #[serde(default = "default_initial_primitive")]
    pub initial_primitive: usize,
    #[serde(default)]
    pub initial_state: Option<Vec<f64>>,
    #[serde(default)]
    pub stride_count: Option<usize>,
    #[serde(default)]
    pub dead_zone: f64,
    #[serde(default = "default_panels")]
    pub panels: usize,
}

fn default_mode() -> WalkerMode {
    WalkerMode::Adaptive
}

fn default_initial_primitive() -> usize {
    1
}

fn default_panels() -> usize {
    MIN_PANELS
}

impl ScenarioDocument {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn leader_model(&self) -> Result<LeaderModel> {
        match &self.leader {
            LeaderPath::Arcs {
                start,
                heading,
                speed,
                segments,
            } => {
                let segs: Vec<(f64, f64)> =
                    segments.iter().map(|s| (s.duration, s.curvature)).collect();
                LeaderModel::arcs(
                    *start,
                    *heading,
                    *speed,
                    &segs,
                    self.stiffness,
                    self.damping,
                )
            }
            LeaderPath::Waypoints { points } => {
                let pts: Vec<(f64, Vec2)> = points.iter().map(|r| (r[0], [r[1], r[2]])).collect();
                LeaderModel::waypoints(&pts, self.stiffness, self.damping)
            }
        }
    }

    /// Loads the referenced files, resolving relative paths against
    /// `base_dir`.
    pub fn resolve(&self, base_dir: &Path) -> Result<WalkerScenario> {
        let lib = load_library(&base_dir.join(&self.library))?;
        let strides: StrideSetDocument =
            serde_json::from_str(&std::fs::read_to_string(base_dir.join(&self.strides))?)?;
        let cert = Certificate::load(&base_dir.join(&self.certificate))?;
        let mut scenario = WalkerScenario::new(
            strides.resolve(&lib)?,
            cert,
            self.leader_model()?,
            self.mode,
        )?;
        let base = scenario.initial_pose;
        let off = self.initial_offset;
        scenario.initial_pose = Pose::new(
            add(base.position, rotate([off.forward, off.left], base.heading)),
            base.heading + off.heading,
        );
        scenario.initial_primitive = self.initial_primitive;
        scenario.initial_state = match &self.initial_state {
            Some(z) => z.clone(),
            None => scenario
                .library()
                .get(self.initial_primitive)?
                .fixed_point()
                .to_vec(),
        };
        if let Some(n) = self.stride_count {
            scenario.stride_count = n;
        }
        scenario.dead_zone = self.dead_zone;
        scenario.panels = self.panels;
        scenario.validate()?;
        Ok(scenario)
    }
}

/// Loads a scenario document and everything it references.
pub fn load_scenario(path: &Path) -> Result<WalkerScenario> {
    let doc = ScenarioDocument::load(path)?;
    doc.resolve(path.parent().unwrap_or(Path::new(".")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::primitives::{PrimitiveMap, QuadraticLyapunov};

    const I2: [Vec2; 2] = [[1.0, 0.0], [0.0, 1.0]];
    const ZERO2: [Vec2; 2] = [[0.0, 0.0], [0.0, 0.0]];

    fn diag(a: f64) -> [Vec2; 2] {
        [[a, 0.0], [0.0, a]]
    }

    fn still_leader(p: Vec2, k: [Vec2; 2], n: [Vec2; 2]) -> LeaderModel {
        LeaderModel::new(
            vec![HermitePiece {
                t0: 0.0,
                t1: 10.0,
                p0: p,
                p1: p,
                v0: [0.0, 0.0],
                v1: [0.0, 0.0],
            }],
            k,
            n,
        )
        .unwrap()
    }

    fn stride(id: usize, turn: f64) -> StridePrimitive {
        let c = [0.0, 0.0];
        let map = PrimitiveMap::new(
            c.to_vec(),
            Matrix::identity(2, 2) * 0.5,
            vec![],
            Matrix::identity(2, 2),
        )
        .unwrap();
        let v = QuadraticLyapunov::new(c.to_vec(), Matrix::identity(2, 2)).unwrap();
        StridePrimitive::new(
            Primitive::new(id, map, v, 1.0, 0.3).unwrap(),
            turn,
            [0.3, 0.0],
            0.5,
            Matrix::identity(2, 2) * 0.1,
            vec![1.0, 0.0],
            Matrix::from_row_slice(2, 2, &[0.0, 0.5, 0.5, 0.0]),
        )
        .unwrap()
    }

    #[test]
    fn angles_wrap_to_half_open_interval() {
        assert_eq!(wrap_angle(PI), PI);
        assert_eq!(wrap_angle(-PI), PI);
        assert!((wrap_angle(3.0 * PI / 2.0) + PI / 2.0).abs() < 1e-15);
        assert_eq!(wrap_angle(0.0), 0.0);
    }

    #[test]
    fn impedance_examples() {
        let leader = still_leader([1.0, 0.0], I2, ZERO2);
        assert_eq!(
            impedance_force(&leader, [0.0, 0.0], [0.0, 0.0], 1.0).unwrap(),
            [1.0, 0.0]
        );
        assert_eq!(
            impedance_force(&leader, [1.0, 0.0], [0.0, 0.0], 1.0).unwrap(),
            [0.0, 0.0]
        );
        assert!(impedance_force(&leader, [0.0, 0.0], [0.0, 0.0], 11.0).is_err());

        let moving =
            LeaderModel::straight([1.0, 1.0], 0.0, 0.65, 1.0, diag(10.0), diag(2.0)).unwrap();
        let f = impedance_force(&moving, [0.0, 0.0], [0.6, 0.0], 0.0).unwrap();
        assert!(
            (f[0] - 10.1).abs() < 1e-12 && (f[1] - 10.0).abs() < 1e-12,
            "{f:?}"
        );
    }

    #[test]
    fn perfect_tracking_has_no_force() {
        let leader = LeaderModel::arcs(
            [0.0, 0.0],
            0.3,
            0.65,
            &[(2.0, 0.0), (3.0, 0.4)],
            diag(20.0),
            diag(5.0),
        )
        .unwrap();
        for t in [0.0, 0.7, 2.0, 3.3, 5.0] {
            let f = impedance_force(
                &leader,
                leader.position(t).unwrap(),
                leader.velocity(t).unwrap(),
                t,
            )
            .unwrap();
            assert_eq!(f, [0.0, 0.0]);
        }
    }

    #[test]
    fn arcs_hit_exact_circle_points() {
        let r = 3.0;
        let leader =
            LeaderModel::arcs([0.0, 0.0], 0.0, 0.65, &[(10.0, 1.0 / r)], I2, ZERO2).unwrap();
        for t in [0.0, 2.5, 7.1, 10.0] {
            let th = 0.65 * t / r;
            let want = [r * th.sin(), r * (1.0 - th.cos())];
            let got = leader.position(t).unwrap();
            // Cubic Hermite against the circle with ≤ π/16 per piece.
            assert!((got[0] - want[0]).abs() < 1e-5 && (got[1] - want[1]).abs() < 1e-5);
        }
        let end = leader.velocity(10.0).unwrap();
        let th = 0.65 * 10.0 / r;
        assert!(
            (end[0] - 0.65 * th.cos()).abs() < 1e-12 && (end[1] - 0.65 * th.sin()).abs() < 1e-12
        );
    }

    #[test]
    fn waypoints_pass_through_points() {
        let pts = [(0.0, [0.0, 0.0]), (1.0, [1.0, 0.5]), (3.0, [2.0, -1.0])];
        let leader = LeaderModel::waypoints(&pts, I2, ZERO2).unwrap();
        for (t, p) in pts {
            assert_eq!(leader.position(t).unwrap(), p);
        }
        assert!(
            LeaderModel::waypoints(&[(0.0, [0.0, 0.0]), (0.0, [1.0, 0.0])], I2, ZERO2).is_err()
        );
    }

    #[test]
    fn gains_must_be_psd() {
        let bad = [[1.0, 0.0], [0.0, -1.0]];
        assert!(LeaderModel::straight([0.0, 0.0], 0.0, 1.0, 1.0, bad, ZERO2).is_err());
    }

    #[test]
    fn heading_estimate_examples() {
        assert_eq!(heading_estimate(1.0, 0.0), 0.0);
        assert!((heading_estimate(1.0, 1.0) - PI / 4.0).abs() < 1e-15);
        assert_eq!(heading_estimate(-1.0, 0.0), PI);
        assert_eq!(heading_estimate(0.0, 0.0), 0.0);
    }

    #[test]
    fn stride_force_examples() {
        let zero = still_leader([0.0, 0.0], ZERO2, ZERO2);
        let sf = integrate_stride_force(&zero, [0.0, 0.0], [1.0, 0.0], 0.0, 0.5, 64).unwrap();
        assert_eq!((sf.fx, sf.fy, sf.phi), (0.0, 0.0, 0.0));

        // Constant force: walker at rest, leader fixed.
        let leader = still_leader([2.0, -1.0], I2, ZERO2);
        let sf = integrate_stride_force(&leader, [0.0, 0.0], [0.0, 0.0], 1.0, 1.5, 64).unwrap();
        assert!((sf.fx - 1.0).abs() < 1e-14 && (sf.fy + 0.5).abs() < 1e-14);

        // Leader ahead at constant offset moving with the walker.
        let k = 7.0;
        let ahead = LeaderModel::straight([0.4, 0.0], 0.0, 0.6, 2.0, diag(k), ZERO2).unwrap();
        let sf = integrate_stride_force(&ahead, [0.0, 0.0], [0.3, 0.0], 0.0, 0.5, 64).unwrap();
        // ∫ k (0.4 + 0.6t − 0.6t) dt over 0.5 s.
        assert!((sf.fx - k * 0.4 * 0.5).abs() < 1e-12 && sf.fy.abs() < 1e-15);
        assert_eq!(heading_policy(sf.phi, 0.0).unwrap(), 1);

        assert!(integrate_stride_force(&ahead, [0.0, 0.0], [0.3, 0.0], 0.5, 0.5, 64).is_err());
        assert!(integrate_stride_force(&ahead, [0.0, 0.0], [0.3, 0.0], 0.0, 0.5, 63).is_err());
        assert!(integrate_stride_force(&ahead, [0.0, 0.0], [0.3, 0.0], 0.0, 0.5, 32).is_err());
    }

    #[test]
    fn simpson_matches_closed_form_for_quadratic_leader() {
        // p_L(t) = (t², 0) on one Hermite piece; walker at rest at the origin.
        let leader = LeaderModel::new(
            vec![HermitePiece {
                t0: 0.0,
                t1: 1.0,
                p0: [0.0, 0.0],
                p1: [1.0, 0.0],
                v0: [0.0, 0.0],
                v1: [2.0, 0.0],
            }],
            diag(3.0),
            diag(0.5),
        )
        .unwrap();
        let sf = integrate_stride_force(&leader, [0.0, 0.0], [0.0, 0.0], 0.2, 0.9, 64).unwrap();
        let exact = 3.0 * (0.9f64.powi(3) - 0.2f64.powi(3)) / 3.0 + 0.5 * (0.81 - 0.04);
        assert!((sf.fx - exact).abs() < 1e-13);
    }

    #[test]
    fn stride_update_examples() {
        let pose = Pose::new([1.0, 2.0], PI / 2.0);
        let none = StrideForce::new(0.0, 0.0);
        let (p, z) = stride_update(&pose, &stride(1, 0.0), &[0.0, 0.0], &none).unwrap();
        assert_eq!(z, vec![0.0, 0.0]);
        assert!((p.position[0] - 1.0).abs() < 1e-15 && (p.position[1] - 2.3).abs() < 1e-15);
        assert_eq!(p.heading, PI / 2.0);

        let (p, _) = stride_update(
            &Pose::new([0.0, 0.0], 0.0),
            &stride(2, PI / 6.0),
            &[0.0, 0.0],
            &none,
        )
        .unwrap();
        assert_eq!(p.heading, PI / 6.0);

        // z' = 0.5 z = (0.2, −0.1): heading +0.2, displacement (0.3 − 0.05, 0.1).
        let (p, z) = stride_update(
            &Pose::new([0.0, 0.0], 0.0),
            &stride(1, 0.0),
            &[0.4, -0.2],
            &none,
        )
        .unwrap();
        assert_eq!(z, vec![0.2, -0.1]);
        assert!((p.heading - 0.2).abs() < 1e-15);
        assert!((p.position[0] - 0.25).abs() < 1e-15 && (p.position[1] - 0.1).abs() < 1e-15);

        // Force enters through C = 0.1 I.
        let (_, z) = stride_update(
            &Pose::new([0.0, 0.0], 0.0),
            &stride(1, 0.0),
            &[0.0, 0.0],
            &StrideForce::new(1.0, -2.0),
        )
        .unwrap();
        assert!((z[0] - 0.1).abs() < 1e-15 && (z[1] + 0.2).abs() < 1e-15);
    }

    #[test]
    fn body_frame_rotation() {
        let f = StrideForce::new(0.0, 1.0).in_frame(PI / 2.0);
        assert!((f.fx - 1.0).abs() < 1e-15 && f.fy.abs() < 1e-15);
        assert!(f.phi.abs() < 1e-15);
    }

    #[test]
    fn mode_parsing() {
        assert_eq!(
            "adaptive".parse::<WalkerMode>().unwrap(),
            WalkerMode::Adaptive
        );
        assert_eq!(
            "fixed:0".parse::<WalkerMode>().unwrap(),
            WalkerMode::Fixed(0)
        );
        assert!("fixed:x".parse::<WalkerMode>().is_err());
        assert!("sometimes".parse::<WalkerMode>().is_err());
        assert_eq!(WalkerMode::Fixed(2).to_string(), "fixed:2");
    }
}
