//! The shipped surrogate walker: three 2-D stride maps where the two turn
//! primitives mirror each other under `z ↦ diag(−1, 1) z`.
//!
//! Each `P_p` solves `AᵀPA − P = −I` for the linear part. The basin level is
//! the largest level (up to a ceiling) that survives dense basin sampling at
//! a design rate, and the declared `λ_p` is the worst decrease ratio on a
//! dense grid of that basin plus a 10% margin.

use std::f64::consts::PI;

use crate::error::{invalid, Result};
use crate::linalg::{discrete_lyapunov, Matrix};
use crate::primitives::{
    certify_basin, Primitive, PrimitiveLibrary, PrimitiveMap, QuadraticLyapunov,
};
use crate::walker::{StridePrimitive, DEFAULT_STRIDE_DURATION};

#[derive(Debug, Clone, PartialEq)]
pub struct DesignOptions {
    /// Fixed points sit at `(∓offset, 0)` for the turn primitives.
    pub offset: f64,
    pub basin_ceiling: f64,
    /// Decrease rate the basin must support during the level search.
    pub design_rate: f64,
    pub rate_margin: f64,
    pub grid_resolution: usize,
    /// Samples of the basin check; the level search uses ten times as many.
    pub sample_count: usize,
    pub seed: u64,
    pub bisection_steps: usize,
}

impl Default for DesignOptions {
    fn default() -> Self {
        Self {
            offset: 0.03,
            basin_ceiling: 0.3,
            design_rate: 0.5,
            rate_margin: 1.1,
            grid_resolution: 401,
            sample_count: 20_000,
            seed: 0,
            bisection_steps: 30,
        }
    }
}

/// Largest `V(f(x,0)) / V(x)` over a uniform grid of the bounding box of
/// `{V ≤ level}`, restricted to the sublevel set.
pub fn grid_max_ratio(
    map: &PrimitiveMap,
    lyapunov: &QuadraticLyapunov,
    level: f64,
    resolution: usize,
) -> f64 {
    let h = lyapunov.bounding_half_widths(level);
    let c = map.fixed_point();
    let mut worst: f64 = 0.0;
    let mut x = [0.0; 2];
    let mut image = [0.0; 2];
    let step = |i: usize, half: f64| -half + 2.0 * half * i as f64 / (resolution - 1) as f64;
    for i in 0..resolution {
        for j in 0..resolution {
            x[0] = c[0] + step(i, h[0]);
            x[1] = c[1] + step(j, h[1]);
            let v = lyapunov.value_unchecked(&x);
            if v <= level && v > 1e-14 {
                map.eval_into(&x, &[], &mut image);
                worst = worst.max(lyapunov.value_unchecked(&image) / v);
            }
        }
    }
    worst
}

/// Builds a primitive from a 2-D map: Lyapunov weight, basin level and
/// declared rate.
pub fn calibrate(id: usize, map: PrimitiveMap, opts: &DesignOptions) -> Result<Primitive> {
    if map.state_dim() != 2 {
        return Err(invalid("surrogate design is for 2-D reduced states"));
    }
    let weight = discrete_lyapunov(map.linear(), &Matrix::identity(2, 2))
        .ok_or_else(|| invalid("linear part has no Lyapunov solution"))?;
    let lyapunov = QuadraticLyapunov::new(map.fixed_point().to_vec(), weight)?;
    let passes = |level: f64| -> Result<bool> {
        let trial = Primitive::new(id, map.clone(), lyapunov.clone(), level, opts.design_rate)?;
        Ok(certify_basin(&trial, level, 10 * opts.sample_count, opts.seed)?.certified)
    };
    let mut level = opts.basin_ceiling;
    if !passes(level)? {
        let (mut lo, mut hi) = (0.0, level);
        for _ in 0..opts.bisection_steps {
            let mid = 0.5 * (lo + hi);
            if passes(mid)? {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        if lo <= 0.0 {
            return Err(invalid(format!("primitive {id}: no basin level passes")));
        }
        level = lo;
    }
    let rate = opts.rate_margin * grid_max_ratio(&map, &lyapunov, level, opts.grid_resolution);
    if !(rate < 1.0) {
        return Err(invalid(format!(
            "primitive {id}: declared rate {rate} is not contracting"
        )));
    }
    Primitive::new(id, map, lyapunov, level, rate)
}

fn sym(a: f64, b: f64, c: f64) -> Matrix {
    Matrix::from_row_slice(2, 2, &[a, b, b, c])
}

/// Mirror image of a 2-D primitive under `S = diag(−1, 1)` acting on both
/// state and disturbance: `f'(z, d) = S f(S z, S d)`.
fn mirror(id: usize, p: &Primitive) -> Result<Primitive> {
    let s = Matrix::from_diagonal(&nalgebra::DVector::from_vec(vec![-1.0, 1.0]));
    let x = p.fixed_point();
    let q = p.map.quadratic();
    let map = PrimitiveMap::new(
        vec![-x[0], x[1]],
        &s * p.map.linear() * &s,
        vec![-(&s * &q[0] * &s), &s * &q[1] * &s],
        &s * p.map.disturbance_gain() * &s,
    )?;
    let lyapunov =
        QuadraticLyapunov::new(map.fixed_point().to_vec(), &s * p.lyapunov.weight() * &s)?;
    Primitive::new(id, map, lyapunov, p.basin_level, p.contraction)
}

/// The three-primitive walker: 0 turns clockwise by π/6, 1 walks straight,
/// 2 turns counter-clockwise by π/6.
pub fn surrogate_walker(opts: &DesignOptions) -> Result<(PrimitiveLibrary, Vec<StridePrimitive>)> {
    let eye = Matrix::identity(2, 2);
    let straight = PrimitiveMap::new(
        vec![0.0, 0.0],
        Matrix::from_row_slice(2, 2, &[0.25, 0.0, 0.0, 0.2]),
        vec![sym(0.0, 0.15, 0.0), sym(0.3, 0.0, 0.2)],
        eye.clone(),
    )?;
    let right = PrimitiveMap::new(
        vec![-opts.offset, 0.0],
        Matrix::from_row_slice(2, 2, &[0.25, 0.06, -0.04, 0.2]),
        vec![sym(0.1, 0.15, 0.05), sym(0.3, 0.05, 0.2)],
        eye,
    )?;
    let g1 = calibrate(1, straight, opts)?;
    let g0 = calibrate(0, right, opts)?;
    let g2 = mirror(2, &g0)?;

    let coupling = Matrix::from_row_slice(2, 2, &[0.0, 0.02, 0.02, 0.0]);
    let displacement_gain = Matrix::from_row_slice(2, 2, &[0.0, 0.5, 0.5, 0.0]);
    let kinematics = [
        (-PI / 6.0, [0.31, -0.04]),
        (0.0, [0.31, 0.0]),
        (PI / 6.0, [0.31, 0.04]),
    ];
    let strides = [g0, g1, g2]
        .into_iter()
        .zip(kinematics)
        .map(|(p, (turn, disp))| {
            StridePrimitive::new(
                p,
                turn,
                disp,
                DEFAULT_STRIDE_DURATION,
                coupling.clone(),
                vec![1.0, 0.0],
                displacement_gain.clone(),
            )
        })
        .collect::<Result<Vec<_>>>()?;
    let lib = PrimitiveLibrary::new(strides.iter().map(|s| s.reduced.clone()).collect())?;
    Ok((lib, strides))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mirror_conjugates_the_map() {
        let opts = DesignOptions {
            grid_resolution: 41,
            sample_count: 500,
            ..DesignOptions::default()
        };
        let (lib, _) = surrogate_walker(&opts).unwrap();
        let (g0, g2) = (lib.get(0).unwrap(), lib.get(2).unwrap());
        for z in [[0.1, 0.05], [-0.2, 0.13], [0.0, -0.3]] {
            let d = [0.01, -0.02];
            let a = g0.eval(&z, &d).unwrap();
            let b = g2.eval(&[-z[0], z[1]], &[-d[0], d[1]]).unwrap();
            assert!((a[0] + b[0]).abs() < 1e-15 && (a[1] - b[1]).abs() < 1e-15);
            assert_eq!(g0.value(&z).unwrap(), g2.value(&[-z[0], z[1]]).unwrap());
        }
        assert_eq!(g0.contraction, g2.contraction);
    }

    #[test]
    fn grid_ratio_of_linear_diagonal_map() {
        // V = zᵀPz with A = diag(a, b) and P from the Lyapunov relation is
        // diagonal; the worst ratio is at an axis: a² or b².
        let map = PrimitiveMap::new(
            vec![0.0, 0.0],
            Matrix::from_row_slice(2, 2, &[0.5, 0.0, 0.0, 0.2]),
            vec![],
            Matrix::identity(2, 2),
        )
        .unwrap();
        let p = discrete_lyapunov(map.linear(), &Matrix::identity(2, 2)).unwrap();
        let v = QuadraticLyapunov::new(vec![0.0, 0.0], p).unwrap();
        assert!((grid_max_ratio(&map, &v, 1.0, 101) - 0.25).abs() < 1e-12);
    }
}
