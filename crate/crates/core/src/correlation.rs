//! Geometric cross-correlation at the origin,
//! `(A * B)(0) = int reverse(A(y)) B(y) dy`.
//!
//! For two vector fields the integrand is `a b = a.b + a^b`, so the result is
//! determined by the cross-moment matrix `C_ij = int a_i b_j dy`: the scalar
//! part is `trace(C)` and the `e_ij` coefficient is `C_ij - C_ji`. Linear and
//! piecewise-constant pairs evaluate `C` in closed form from box moments.
//! Pairs involving a sampled grid fall back to cell-center quadrature, which
//! accumulates full multivector products and reports any odd-grade residue.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fields::{mat_mul, mat_vec, transpose, Matrix3, SampledField, VectorField};
use crate::ga3::{polar_decompose, GaError, Multivector, PolarForm, Vector3};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CorrelationError {
    #[error("sampled fields are on different grids")]
    IncompatibleGrids,
    #[error("cannot normalize the correlation of a zero-norm field")]
    ZeroField,
    #[error(transparent)]
    Algebra(#[from] GaError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrelationResult {
    pub raw: Multivector,
    /// `raw / (|A| |B|)`.
    pub normalized: Multivector,
    pub polar: PolarForm,
    /// Norm of the grade-1 and grade-3 parts of `raw`.
    pub odd_residue: f64,
}

fn moment_to_multivector(c: &Matrix3) -> Multivector {
    Multivector::even(
        c[0][0] + c[1][1] + c[2][2],
        [c[0][1] - c[1][0], c[0][2] - c[2][0], c[1][2] - c[2][1]],
    )
}

fn outer(a: Vector3, b: Vector3) -> Matrix3 {
    [0, 1, 2].map(|i| [0, 1, 2].map(|j| a[i] * b[j]))
}

fn add_assign(acc: &mut Matrix3, m: &Matrix3) {
    for i in 0..3 {
        for j in 0..3 {
            acc[i][j] += m[i][j];
        }
    }
}

/// Closed-form cross moment for analytic pairs; `None` when a grid is involved.
fn analytic_cross_moment(a: &VectorField, b: &VectorField) -> Option<Matrix3> {
    use VectorField::*;
    let mut c = [[0.0; 3]; 3];
    match (a, b) {
        (Linear(la), Linear(lb)) => {
            if let Some(region) = la.support.intersect(&lb.support) {
                c = mat_mul(&mat_mul(&la.matrix, &region.second_moment()), &transpose(&lb.matrix));
            }
        }
        (Piecewise(pa), Piecewise(pb)) => {
            for ca in &pa.cells {
                for cb in &pb.cells {
                    if let Some(region) = ca.region.intersect(&cb.region) {
                        let vol = region.volume();
                        add_assign(&mut c, &outer(ca.vector, cb.vector.map(|x| x * vol)));
                    }
                }
            }
        }
        (Piecewise(pa), Linear(lb)) => {
            for ca in &pa.cells {
                if let Some(region) = ca.region.intersect(&lb.support) {
                    add_assign(&mut c, &outer(ca.vector, mat_vec(&lb.matrix, region.first_moment())));
                }
            }
        }
        (Linear(la), Piecewise(pb)) => {
            for cb in &pb.cells {
                if let Some(region) = la.support.intersect(&cb.region) {
                    add_assign(&mut c, &outer(mat_vec(&la.matrix, region.first_moment()), cb.vector));
                }
            }
        }
        _ => return None,
    }
    Some(c)
}

/// Midpoint rule over the cells of `grid`, with `value(index, center)` giving
/// the `(a, b)` pair at each cell. Slabs along the first axis are summed in
/// parallel and reduced in index order.
fn grid_quadrature<F>(grid: &SampledField, value: F) -> Multivector
where
    F: Fn(usize, Vector3) -> (Vector3, Vector3) + Sync,
{
    let [nx, ny, nz] = grid.resolution;
    let slabs: Vec<Multivector> = (0..nx)
        .into_par_iter()
        .map(|i| {
            let mut acc = Multivector::ZERO;
            for j in 0..ny {
                for k in 0..nz {
                    let idx = grid.index([i, j, k]);
                    let (a, b) = value(idx, grid.center([i, j, k]));
                    acc = acc + Multivector::vector(a).reverse() * Multivector::vector(b);
                }
            }
            acc
        })
        .collect();
    let sum = slabs.into_iter().fold(Multivector::ZERO, |acc, m| acc + m);
    sum.scale(grid.cell_volume())
}

/// `int reverse(A(y)) B(y) dy` over all space.
pub fn correlate_at_origin(a: &VectorField, b: &VectorField) -> Result<Multivector, CorrelationError> {
    if let Some(c) = analytic_cross_moment(a, b) {
        return Ok(moment_to_multivector(&c));
    }
    use VectorField::Grid;
    let m = match (a, b) {
        (Grid(ga), Grid(gb)) => {
            if !ga.same_geometry(gb) {
                return Err(CorrelationError::IncompatibleGrids);
            }
            grid_quadrature(ga, |idx, _| (ga.data[idx], gb.data[idx]))
        }
        (Grid(ga), other) => grid_quadrature(ga, |idx, x| (ga.data[idx], other.eval(x))),
        (other, Grid(gb)) => grid_quadrature(gb, |idx, x| (other.eval(x), gb.data[idx])),
        _ => unreachable!("analytic pairs are handled above"),
    };
    Ok(m)
}

/// Correlation normalized by the product of the L2 norms, with its polar form.
pub fn normalized_correlation(a: &VectorField, b: &VectorField) -> Result<CorrelationResult, CorrelationError> {
    let norms = a.l2_norm() * b.l2_norm();
    if norms.is_nan() || norms <= 0.0 {
        return Err(CorrelationError::ZeroField);
    }
    let raw = correlate_at_origin(a, b)?;
    let normalized = raw.scale(1.0 / norms);
    let polar = polar_decompose(&normalized)?;
    Ok(CorrelationResult { raw, normalized, polar, odd_residue: raw.odd_norm() })
}
