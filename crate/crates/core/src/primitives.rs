//! Dynamical movement primitives, their quadratic Lyapunov functions and
//! basin-of-attraction levels.
//!
//! A primitive is a discrete-time map with an exponentially stable fixed
//! point `x*`:
//!
//! ```text
//! f(x, d) = x* + A (x − x*) + q(x − x*) + B d,    q_i(e) = eᵀ Q_i e
//! ```
//!
//! certified by `V(x) = (x − x*)ᵀ P (x − x*)` with `V(f(x, 0)) ≤ λ V(x)` on
//! the basin estimate `B = {x | V(x) ≤ κ̄}`. The basin and rate checks here
//! are sampling based: they falsify, they do not prove.

use std::collections::HashMap;

use rand::Rng as _;

use crate::error::{check_dim, invalid, Error, Result};
use crate::linalg::{is_symmetric, quad_form, spectral_radius, symmetric_eigen_bounds, Matrix};
use crate::seed::{rng_for, stream, Rng};

/// Symmetry and positive-definiteness tolerance for `P` and `Q_i`.
pub const SYMMETRY_TOL: f64 = 1e-10;
/// Allowed distance between the map fixed point and the Lyapunov center.
pub const FIXED_POINT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct PrimitiveMap {
    fixed_point: Vec<f64>,
    linear: Matrix,
    quadratic: Vec<Matrix>,
    disturbance_gain: Matrix,
}

impl PrimitiveMap {
    /// `quadratic` is either empty (no quadratic part) or one symmetric
    /// `n×n` matrix per output coordinate.
    pub fn new(
        fixed_point: Vec<f64>,
        linear: Matrix,
        quadratic: Vec<Matrix>,
        disturbance_gain: Matrix,
    ) -> Result<Self> {
        let n = fixed_point.len();
        if n == 0 {
            return Err(invalid("state dimension must be positive"));
        }
        if fixed_point.iter().any(|v| !v.is_finite()) {
            return Err(invalid("fixed point must be finite"));
        }
        check_dim("linear part rows", n, linear.nrows())?;
        check_dim("linear part columns", n, linear.ncols())?;
        check_dim("disturbance gain rows", n, disturbance_gain.nrows())?;
        if !quadratic.is_empty() {
            check_dim("quadratic part outputs", n, quadratic.len())?;
            for q in &quadratic {
                check_dim("quadratic coefficient size", n, q.nrows())?;
                check_dim("quadratic coefficient size", n, q.ncols())?;
                if !is_symmetric(q, SYMMETRY_TOL) {
                    return Err(invalid("quadratic coefficients must be symmetric"));
                }
            }
        }
        let rho = spectral_radius(&linear);
        if !(rho < 1.0) {
            return Err(invalid(format!(
                "linear part must have spectral radius < 1, got {rho}"
            )));
        }
        Ok(Self {
            fixed_point,
            linear,
            quadratic,
            disturbance_gain,
        })
    }

    pub fn state_dim(&self) -> usize {
        self.fixed_point.len()
    }

    pub fn dist_dim(&self) -> usize {
        self.disturbance_gain.ncols()
    }

    pub fn fixed_point(&self) -> &[f64] {
        &self.fixed_point
    }

    pub fn linear(&self) -> &Matrix {
        &self.linear
    }

    pub fn quadratic(&self) -> &[Matrix] {
        &self.quadratic
    }

    pub fn disturbance_gain(&self) -> &Matrix {
        &self.disturbance_gain
    }

    pub fn eval(&self, x: &[f64], d: &[f64]) -> Result<Vec<f64>> {
        check_dim("state", self.state_dim(), x.len())?;
        check_dim("disturbance", self.dist_dim(), d.len())?;
        let mut out = vec![0.0; x.len()];
        self.eval_into(x, d, &mut out);
        Ok(out)
    }

    /// Unchecked variant of [`eval`](Self::eval) for hot loops. An empty
    /// `d` means zero disturbance.
    pub fn eval_into(&self, x: &[f64], d: &[f64], out: &mut [f64]) {
        let n = self.state_dim();
        debug_assert_eq!(x.len(), n);
        debug_assert_eq!(out.len(), n);
        let mut e = [0.0; 8];
        let mut e_heap;
        let e: &mut [f64] = if n <= 8 {
            &mut e[..n]
        } else {
            e_heap = vec![0.0; n];
            &mut e_heap
        };
        for i in 0..n {
            e[i] = x[i] - self.fixed_point[i];
        }
        for i in 0..n {
            let mut acc = 0.0;
            for j in 0..n {
                acc += self.linear[(i, j)] * e[j];
            }
            if let Some(q) = self.quadratic.get(i) {
                acc += quad_form(q, e);
            }
            for (j, dj) in d.iter().enumerate() {
                acc += self.disturbance_gain[(i, j)] * dj;
            }
            out[i] = self.fixed_point[i] + acc;
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticLyapunov {
    center: Vec<f64>,
    weight: Matrix,
    eig_min: f64,
    eig_max: f64,
    /// Diagonal of `P⁻¹`; the bounding box of `{V ≤ c}` has half-widths
    /// `sqrt(c · (P⁻¹)_ii)`.
    inv_diag: Vec<f64>,
}

impl QuadraticLyapunov {
    pub fn new(center: Vec<f64>, weight: Matrix) -> Result<Self> {
        let n = center.len();
        check_dim("Lyapunov weight rows", n, weight.nrows())?;
        check_dim("Lyapunov weight columns", n, weight.ncols())?;
        if !is_symmetric(&weight, SYMMETRY_TOL) {
            return Err(invalid("Lyapunov weight must be symmetric"));
        }
        let (eig_min, eig_max) = symmetric_eigen_bounds(&weight);
        if !(eig_min > 0.0) {
            return Err(invalid(format!(
                "Lyapunov weight must be positive definite, smallest eigenvalue {eig_min}"
            )));
        }
        let inv = weight
            .clone()
            .try_inverse()
            .ok_or_else(|| invalid("Lyapunov weight is singular"))?;
        let inv_diag = (0..n).map(|i| inv[(i, i)]).collect();
        Ok(Self {
            center,
            weight,
            eig_min,
            eig_max,
            inv_diag,
        })
    }

    pub fn center(&self) -> &[f64] {
        &self.center
    }

    pub fn weight(&self) -> &Matrix {
        &self.weight
    }

    pub fn eig_min(&self) -> f64 {
        self.eig_min
    }

    pub fn eig_max(&self) -> f64 {
        self.eig_max
    }

    pub fn value(&self, x: &[f64]) -> Result<f64> {
        check_dim("state", self.center.len(), x.len())?;
        Ok(self.value_unchecked(x))
    }

    #[inline]
    pub fn value_unchecked(&self, x: &[f64]) -> f64 {
        let n = self.center.len();
        let mut acc = 0.0;
        for i in 0..n {
            let ei = x[i] - self.center[i];
            let mut row = 0.0;
            for j in 0..n {
                row += self.weight[(i, j)] * (x[j] - self.center[j]);
            }
            acc += ei * row;
        }
        acc.max(0.0)
    }

    pub fn bounding_half_widths(&self, level: f64) -> Vec<f64> {
        self.inv_diag.iter().map(|v| (level * v).sqrt()).collect()
    }

    /// Uniform sample in `{x | V(x) ≤ 1}` relative to the center, by
    /// rejection from the bounding box.
    pub fn sample_unit_offset(&self, rng: &mut Rng) -> Vec<f64> {
        let half = self.bounding_half_widths(1.0);
        loop {
            let u: Vec<f64> = half.iter().map(|h| rng.random_range(-*h..=*h)).collect();
            if quad_form(&self.weight, &u) <= 1.0 {
                return u;
            }
        }
    }

    /// Uniform sample in the sublevel set `{x | V(x) ≤ level}`.
    pub fn sample_sublevel(&self, level: f64, rng: &mut Rng) -> Vec<f64> {
        let s = level.sqrt();
        self.sample_unit_offset(rng)
            .iter()
            .zip(&self.center)
            .map(|(u, c)| c + s * u)
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Primitive {
    pub id: usize,
    pub map: PrimitiveMap,
    pub lyapunov: QuadraticLyapunov,
    /// κ̄: the basin estimate is `{x | V(x) ≤ basin_level}`.
    pub basin_level: f64,
    /// Declared decrease rate λ_p.
    pub contraction: f64,
}

impl Primitive {
    pub fn new(
        id: usize,
        map: PrimitiveMap,
        lyapunov: QuadraticLyapunov,
        basin_level: f64,
        contraction: f64,
    ) -> Result<Self> {
        check_dim("Lyapunov center", map.state_dim(), lyapunov.center().len())?;
        let offset = crate::linalg::euclidean_distance(map.fixed_point(), lyapunov.center());
        if offset > FIXED_POINT_TOL {
            return Err(invalid(format!(
                "primitive {id}: Lyapunov center is {offset} away from the fixed point"
            )));
        }
        if !(basin_level > 0.0 && basin_level.is_finite()) {
            return Err(invalid(format!(
                "primitive {id}: basin level must be positive"
            )));
        }
        if !(contraction > 0.0 && contraction < 1.0) {
            return Err(invalid(format!(
                "primitive {id}: contraction rate must lie in (0, 1), got {contraction}"
            )));
        }
        Ok(Self {
            id,
            map,
            lyapunov,
            basin_level,
            contraction,
        })
    }

    pub fn state_dim(&self) -> usize {
        self.map.state_dim()
    }

    pub fn fixed_point(&self) -> &[f64] {
        self.map.fixed_point()
    }

    pub fn eval(&self, x: &[f64], d: &[f64]) -> Result<Vec<f64>> {
        self.map.eval(x, d)
    }

    pub fn value(&self, x: &[f64]) -> Result<f64> {
        self.lyapunov.value(x)
    }

    pub fn in_basin(&self, x: &[f64]) -> bool {
        self.lyapunov.value_unchecked(x) <= self.basin_level
    }

    /// Ratio `V(f(x, 0)) / V(x)`, or `None` at the fixed point.
    pub fn decrease_ratio(&self, x: &[f64], scratch: &mut [f64]) -> Option<f64> {
        let v = self.lyapunov.value_unchecked(x);
        if v <= 0.0 {
            return None;
        }
        self.map.eval_into(x, &[], scratch);
        Some(self.lyapunov.value_unchecked(scratch) / v)
    }
}

pub fn eval_map(primitive: &Primitive, x: &[f64], d: &[f64]) -> Result<Vec<f64>> {
    primitive.eval(x, d)
}

pub fn lyapunov_value(v: &QuadraticLyapunov, x: &[f64]) -> Result<f64> {
    v.value(x)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContractionReport {
    pub pass: bool,
    pub worst_ratio: f64,
    pub witness: Vec<f64>,
}

/// Samples the basin uniformly and checks `V(f(x,0)) ≤ λ_p V(x)`.
pub fn verify_contraction(
    primitive: &Primitive,
    sample_count: usize,
    seed: u64,
) -> Result<ContractionReport> {
    if sample_count == 0 {
        return Err(invalid("sample_count must be at least 1"));
    }
    let mut rng = rng_for(seed, stream::CONTRACTION, primitive.id as u64);
    let mut scratch = vec![0.0; primitive.state_dim()];
    let mut worst_ratio = 0.0;
    let mut witness = primitive.fixed_point().to_vec();
    for _ in 0..sample_count {
        let x = primitive
            .lyapunov
            .sample_sublevel(primitive.basin_level, &mut rng);
        if let Some(r) = primitive.decrease_ratio(&x, &mut scratch) {
            if r > worst_ratio {
                worst_ratio = r;
                witness = x;
            }
        }
    }
    Ok(ContractionReport {
        pass: worst_ratio <= primitive.contraction,
        worst_ratio,
        witness,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct BasinReport {
    pub certified: bool,
    pub worst_ratio: f64,
    /// Largest `V(f(x,0))` seen, for the forward-invariance half of the check.
    pub worst_image_level: f64,
    /// First sample that failed either check.
    pub witness: Option<Vec<f64>>,
}

/// Falsification check of a candidate basin level: on samples of
/// `{V ≤ candidate_level}` both the decrease condition with λ_p and forward
/// invariance `V(f(x,0)) ≤ candidate_level` must hold.
///
/// Samples are drawn in the unit sublevel set and rescaled by
/// `sqrt(candidate_level)`, so one seed probes the same rays at every level.
pub fn certify_basin(
    primitive: &Primitive,
    candidate_level: f64,
    sample_count: usize,
    seed: u64,
) -> Result<BasinReport> {
    if !(candidate_level > 0.0 && candidate_level.is_finite()) {
        return Err(invalid("candidate basin level must be positive"));
    }
    if sample_count == 0 {
        return Err(invalid("sample_count must be at least 1"));
    }
    let mut rng = rng_for(seed, stream::BASIN, primitive.id as u64);
    let n = primitive.state_dim();
    let s = candidate_level.sqrt();
    let center = primitive.fixed_point();
    let mut x = vec![0.0; n];
    let mut image = vec![0.0; n];
    let mut report = BasinReport {
        certified: true,
        worst_ratio: 0.0,
        worst_image_level: 0.0,
        witness: None,
    };
    for _ in 0..sample_count {
        let u = primitive.lyapunov.sample_unit_offset(&mut rng);
        for i in 0..n {
            x[i] = center[i] + s * u[i];
        }
        let v = primitive.lyapunov.value_unchecked(&x);
        primitive.map.eval_into(&x, &[], &mut image);
        let v_next = primitive.lyapunov.value_unchecked(&image);
        report.worst_image_level = report.worst_image_level.max(v_next);
        let ratio_ok = if v > 0.0 {
            let r = v_next / v;
            report.worst_ratio = report.worst_ratio.max(r);
            r <= primitive.contraction
        } else {
            v_next <= 0.0
        };
        if !(ratio_ok && v_next <= candidate_level) && report.witness.is_none() {
            report.certified = false;
            report.witness = Some(x.clone());
        }
    }
    Ok(report)
}

/// Ordered collection of primitives sharing state and disturbance
/// dimensions, with common rate `λ = max_p λ_p`.
#[derive(Debug, Clone, PartialEq)]
pub struct PrimitiveLibrary {
    primitives: Vec<Primitive>,
    lambda: f64,
    index: HashMap<usize, usize>,
}

impl PrimitiveLibrary {
    pub fn new(primitives: Vec<Primitive>) -> Result<Self> {
        let first = primitives
            .first()
            .ok_or_else(|| invalid("a library needs at least one primitive"))?;
        let (n, m) = (first.state_dim(), first.map.dist_dim());
        let mut index = HashMap::new();
        for (pos, p) in primitives.iter().enumerate() {
            check_dim("primitive state dimension", n, p.state_dim())?;
            check_dim("primitive disturbance dimension", m, p.map.dist_dim())?;
            if index.insert(p.id, pos).is_some() {
                return Err(invalid(format!("duplicate primitive id {}", p.id)));
            }
        }
        let lambda = primitives.iter().map(|p| p.contraction).fold(0.0, f64::max);
        Ok(Self {
            primitives,
            lambda,
            index,
        })
    }

    pub fn primitives(&self) -> &[Primitive] {
        &self.primitives
    }

    pub fn len(&self) -> usize {
        self.primitives.len()
    }

    pub fn is_empty(&self) -> bool {
        self.primitives.is_empty()
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn state_dim(&self) -> usize {
        self.primitives[0].state_dim()
    }

    pub fn dist_dim(&self) -> usize {
        self.primitives[0].map.dist_dim()
    }

    pub fn ids(&self) -> impl Iterator<Item = usize> + '_ {
        self.primitives.iter().map(|p| p.id)
    }

    pub fn position(&self, id: usize) -> Result<usize> {
        self.index
            .get(&id)
            .copied()
            .ok_or(Error::UnknownPrimitive(id))
    }

    pub fn get(&self, id: usize) -> Result<&Primitive> {
        Ok(&self.primitives[self.position(id)?])
    }

    pub fn min_basin_level(&self) -> f64 {
        self.primitives
            .iter()
            .map(|p| p.basin_level)
            .fold(f64::INFINITY, f64::min)
    }

    /// Pairs `(q, p)` whose fixed point `x_q*` lies outside basin `B_p`.
    /// An empty result means the first clause of the safety criterion holds.
    pub fn fixed_point_violations(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for q in &self.primitives {
            for p in &self.primitives {
                if !p.in_basin(q.fixed_point()) {
                    out.push((q.id, p.id));
                }
            }
        }
        out
    }

    pub fn in_all_basins(&self, x: &[f64]) -> bool {
        self.primitives.iter().all(|p| p.in_basin(x))
    }

    /// `min_p V_p(x)`: the smallest level `c` with `x ∈ M(c)`.
    pub fn min_lyapunov(&self, x: &[f64]) -> f64 {
        self.primitives
            .iter()
            .map(|p| p.lyapunov.value_unchecked(x))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn max_lyapunov(&self, x: &[f64]) -> f64 {
        self.primitives
            .iter()
            .map(|p| p.lyapunov.value_unchecked(x))
            .fold(0.0, f64::max)
    }

    /// Membership in `∩_p M_p(level)`.
    pub fn in_all_sublevels(&self, x: &[f64], level: f64) -> bool {
        self.primitives
            .iter()
            .all(|p| p.lyapunov.value_unchecked(x) <= level)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::matrix_from_rows;

    fn linear_primitive(a: f64, lambda: f64) -> Primitive {
        let map = PrimitiveMap::new(
            vec![0.0, 0.0],
            Matrix::identity(2, 2) * a,
            vec![],
            Matrix::identity(2, 2),
        )
        .unwrap();
        let v = QuadraticLyapunov::new(vec![0.0, 0.0], Matrix::identity(2, 2)).unwrap();
        Primitive::new(0, map, v, 1.0, lambda).unwrap()
    }

    #[test]
    fn eval_fixed_point_is_identity() {
        let p = linear_primitive(0.5, 0.3);
        assert_eq!(p.eval(&[0.0, 0.0], &[0.0, 0.0]).unwrap(), vec![0.0, 0.0]);
    }

    #[test]
    fn eval_pure_contraction() {
        let p = linear_primitive(0.5, 0.3);
        assert_eq!(p.eval(&[1.0, 0.0], &[0.0, 0.0]).unwrap(), vec![0.5, 0.0]);
    }

    #[test]
    fn eval_with_disturbance() {
        let p = linear_primitive(0.5, 0.3);
        let y = p.eval(&[1.0, 0.0], &[0.1, 0.2]).unwrap();
        // independent evaluation of x* + A(x − x*) + B d
        let expected = [0.5 * 1.0 + 0.1, 0.5 * 0.0 + 0.2];
        assert!((y[0] - expected[0]).abs() < 1e-15);
        assert!((y[1] - expected[1]).abs() < 1e-15);
        assert!((y[0] - 0.6).abs() < 1e-15 && (y[1] - 0.2).abs() < 1e-15);
    }

    #[test]
    fn eval_rejects_bad_dimensions() {
        let p = linear_primitive(0.5, 0.3);
        assert!(matches!(
            p.eval(&[1.0], &[0.0, 0.0]),
            Err(Error::Dimension { .. })
        ));
        assert!(matches!(
            p.eval(&[1.0, 0.0], &[0.0]),
            Err(Error::Dimension { .. })
        ));
    }

    #[test]
    fn unstable_linear_part_rejected() {
        let r = PrimitiveMap::new(
            vec![0.0],
            Matrix::identity(1, 1) * 1.0,
            vec![],
            Matrix::zeros(1, 1),
        );
        assert!(r.is_err());
    }

    #[test]
    fn lyapunov_examples() {
        let v = QuadraticLyapunov::new(vec![0.0, 0.0], Matrix::identity(2, 2)).unwrap();
        assert_eq!(v.value(&[0.0, 0.0]).unwrap(), 0.0);
        assert_eq!(v.value(&[3.0, 4.0]).unwrap(), 25.0);
        let w = QuadraticLyapunov::new(
            vec![1.0, 0.0],
            matrix_from_rows(&[vec![2.0, 0.0], vec![0.0, 1.0]]).unwrap(),
        )
        .unwrap();
        assert_eq!(w.value(&[2.0, 2.0]).unwrap(), 6.0);
        assert!(w.value(&[2.0]).is_err());
    }

    #[test]
    fn lyapunov_rejects_indefinite_and_asymmetric() {
        let indefinite = matrix_from_rows(&[vec![1.0, 0.0], vec![0.0, -1.0]]).unwrap();
        assert!(QuadraticLyapunov::new(vec![0.0, 0.0], indefinite).is_err());
        let asym = matrix_from_rows(&[vec![1.0, 0.1], vec![0.0, 1.0]]).unwrap();
        assert!(QuadraticLyapunov::new(vec![0.0, 0.0], asym).is_err());
    }

    #[test]
    fn center_must_match_fixed_point() {
        let map = PrimitiveMap::new(
            vec![0.0, 0.0],
            Matrix::identity(2, 2) * 0.5,
            vec![],
            Matrix::zeros(2, 1),
        )
        .unwrap();
        let v = QuadraticLyapunov::new(vec![0.1, 0.0], Matrix::identity(2, 2)).unwrap();
        assert!(Primitive::new(0, map, v, 1.0, 0.5).is_err());
    }

    #[test]
    fn contraction_linear_pass_and_fail() {
        let pass = verify_contraction(&linear_primitive(0.5, 0.25), 500, 1).unwrap();
        assert!(pass.pass);
        assert!((pass.worst_ratio - 0.25).abs() < 1e-12);
        let fail = verify_contraction(&linear_primitive(0.5, 0.2), 500, 1).unwrap();
        assert!(!fail.pass);
        assert!((fail.worst_ratio - 0.25).abs() < 1e-12);
        assert!(verify_contraction(&linear_primitive(0.5, 0.2), 0, 1).is_err());
    }

    #[test]
    fn contraction_deterministic_for_seed() {
        let p = linear_primitive(0.5, 0.25);
        assert_eq!(
            verify_contraction(&p, 50, 9).unwrap(),
            verify_contraction(&p, 50, 9).unwrap()
        );
    }

    #[test]
    fn basin_linear_certified_at_any_level() {
        let p = linear_primitive(0.5, 0.25);
        for level in [1e-3, 0.5, 1.0, 40.0] {
            assert!(certify_basin(&p, level, 300, 3).unwrap().certified);
        }
    }

    #[test]
    fn basin_rejects_expanding_quadratic_part() {
        // q_0(e) = 4 e_0²: at e = (1, 0) the image is (0.5 + 4, 0), V = 20.25 > 1.
        let q0 = matrix_from_rows(&[vec![4.0, 0.0], vec![0.0, 0.0]]).unwrap();
        let map = PrimitiveMap::new(
            vec![0.0, 0.0],
            Matrix::identity(2, 2) * 0.5,
            vec![q0, Matrix::zeros(2, 2)],
            Matrix::zeros(2, 1),
        )
        .unwrap();
        let boundary_image = map.eval(&[1.0, 0.0], &[0.0]).unwrap();
        assert_eq!(boundary_image, vec![4.5, 0.0]);
        let v = QuadraticLyapunov::new(vec![0.0, 0.0], Matrix::identity(2, 2)).unwrap();
        let p = Primitive::new(0, map, v, 1.0, 0.3).unwrap();
        let report = certify_basin(&p, 1.0, 500, 5).unwrap();
        assert!(!report.certified);
        let w = report.witness.unwrap();
        let img = p.eval(&w, &[0.0]).unwrap();
        let (vw, vi) = (p.value(&w).unwrap(), p.value(&img).unwrap());
        assert!(vi > 0.3 * vw || vi > 1.0);
    }

    #[test]
    fn library_rejects_duplicates_and_empty() {
        assert!(PrimitiveLibrary::new(vec![]).is_err());
        let p = linear_primitive(0.5, 0.3);
        assert!(PrimitiveLibrary::new(vec![p.clone(), p]).is_err());
    }

    #[test]
    fn library_lambda_is_max() {
        let mut a = linear_primitive(0.5, 0.3);
        let mut b = linear_primitive(0.5, 0.6);
        a.id = 0;
        b.id = 4;
        let lib = PrimitiveLibrary::new(vec![a, b]).unwrap();
        assert_eq!(lib.lambda(), 0.6);
        assert_eq!(lib.position(4).unwrap(), 1);
        assert!(matches!(lib.get(2), Err(Error::UnknownPrimitive(2))));
    }
}
