//! Compactly supported vector fields `R^3 -> R^3`.
//!
//! Three representations are supported: linear fields `v(x) = M x` on a box,
//! piecewise-constant fields on disjoint boxes, and sampled fields on a
//! regular grid. All boxes are half-open, `low <= x < high` per axis.
//!
//! Outer rotations act on the values only; the support never moves.

use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ga3::{dot, Multivector, Rotation, UnitBivector, Vector3};

pub type Matrix3 = [[f64; 3]; 3];

#[derive(Debug, Error)]
pub enum FieldError {
    #[error("box is empty or not finite: low {low:?}, high {high:?}")]
    InvalidBox { low: Vector3, high: Vector3 },
    #[error("cells {0} and {1} overlap")]
    OverlappingCells(usize, usize),
    #[error("grid with resolution {resolution:?} needs {expected} samples, found {found}")]
    GridSize { resolution: [usize; 3], expected: usize, found: usize },
    #[error("field contains non-finite values")]
    NonFinite,
    #[error("field has zero L2 norm")]
    ZeroField,
    #[error("malformed field file: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("cannot read field file: {0}")]
    Io(#[from] std::io::Error),
}

/// Axis-aligned box `[low, high)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Aabb {
    pub low: Vector3,
    pub high: Vector3,
}

impl Default for Aabb {
    fn default() -> Self {
        Self::CUBE
    }
}

impl Aabb {
    /// `(-1, 1)^3`.
    pub const CUBE: Self = Self { low: [-1.0; 3], high: [1.0; 3] };

    pub fn new(low: Vector3, high: Vector3) -> Result<Self, FieldError> {
        let b = Self { low, high };
        b.validate()?;
        Ok(b)
    }

    pub fn validate(&self) -> Result<(), FieldError> {
        let ok = (0..3).all(|k| {
            self.low[k].is_finite() && self.high[k].is_finite() && self.low[k] < self.high[k]
        });
        if ok {
            Ok(())
        } else {
            Err(FieldError::InvalidBox { low: self.low, high: self.high })
        }
    }

    pub fn contains(&self, x: Vector3) -> bool {
        (0..3).all(|k| self.low[k] <= x[k] && x[k] < self.high[k])
    }

    pub fn extent(&self) -> Vector3 {
        [0, 1, 2].map(|k| self.high[k] - self.low[k])
    }

    pub fn volume(&self) -> f64 {
        self.extent().iter().product()
    }

    /// Intersection with positive volume, if any.
    pub fn intersect(&self, other: &Self) -> Option<Self> {
        let low = [0, 1, 2].map(|k| self.low[k].max(other.low[k]));
        let high = [0, 1, 2].map(|k| self.high[k].min(other.high[k]));
        (0..3).all(|k| low[k] < high[k]).then_some(Self { low, high })
    }

    /// `int x dx` over the box.
    pub fn first_moment(&self) -> Vector3 {
        let vol = self.volume();
        [0, 1, 2].map(|k| vol * 0.5 * (self.low[k] + self.high[k]))
    }

    /// `int x x^T dx` over the box.
    pub fn second_moment(&self) -> Matrix3 {
        let len = self.extent();
        let vol = self.volume();
        let mean = [0, 1, 2].map(|k| 0.5 * (self.low[k] + self.high[k]));
        let mut s = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                s[i][j] = if i == j {
                    let (a, b) = (self.low[i], self.high[i]);
                    vol / len[i] * (b * b * b - a * a * a) / 3.0
                } else {
                    vol * mean[i] * mean[j]
                };
            }
        }
        s
    }
}

pub(crate) fn mat_vec(m: &Matrix3, v: Vector3) -> Vector3 {
    [dot(m[0], v), dot(m[1], v), dot(m[2], v)]
}

pub(crate) fn mat_mul(a: &Matrix3, b: &Matrix3) -> Matrix3 {
    let mut out = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = (0..3).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    out
}

pub(crate) fn transpose(m: &Matrix3) -> Matrix3 {
    let mut t = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            t[i][j] = m[j][i];
        }
    }
    t
}

/// `v(x) = M x` inside `support`, zero outside.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearField {
    /// Row-major coefficient matrix.
    pub matrix: Matrix3,
    #[serde(rename = "box", default)]
    pub support: Aabb,
}

impl LinearField {
    pub fn new(matrix: Matrix3, support: Aabb) -> Self {
        Self { matrix, support }
    }

    /// Linear field on the default cube `(-1, 1)^3`.
    pub fn on_cube(matrix: Matrix3) -> Self {
        Self::new(matrix, Aabb::CUBE)
    }

    pub fn eval(&self, x: Vector3) -> Vector3 {
        if self.support.contains(x) {
            mat_vec(&self.matrix, x)
        } else {
            [0.0; 3]
        }
    }

    fn transformed(&self, map: &Matrix3) -> Self {
        Self { matrix: mat_mul(map, &self.matrix), support: self.support }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    #[serde(rename = "box")]
    pub region: Aabb,
    pub vector: Vector3,
}

/// Constant vectors on pairwise disjoint boxes, zero elsewhere.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PiecewiseConstantField {
    pub cells: Vec<Cell>,
}

impl PiecewiseConstantField {
    pub fn new(cells: Vec<Cell>) -> Result<Self, FieldError> {
        let f = Self { cells };
        f.validate()?;
        Ok(f)
    }

    pub fn validate(&self) -> Result<(), FieldError> {
        for (i, c) in self.cells.iter().enumerate() {
            c.region.validate()?;
            if c.vector.iter().any(|x| !x.is_finite()) {
                return Err(FieldError::NonFinite);
            }
            for (j, d) in self.cells.iter().enumerate().skip(i + 1) {
                if c.region.intersect(&d.region).is_some() {
                    return Err(FieldError::OverlappingCells(i, j));
                }
            }
        }
        Ok(())
    }

    pub fn eval(&self, x: Vector3) -> Vector3 {
        self.cells
            .iter()
            .find(|c| c.region.contains(x))
            .map_or([0.0; 3], |c| c.vector)
    }

    fn transformed(&self, map: &Matrix3) -> Self {
        let cells = self
            .cells
            .iter()
            .map(|c| Cell { region: c.region, vector: mat_vec(map, c.vector) })
            .collect();
        Self { cells }
    }
}

/// Samples at the cell centers of a regular grid over `support`.
///
/// `data` is row-major over `(i, j, k)` with `k` (the x3 axis) fastest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampledField {
    #[serde(rename = "box")]
    pub support: Aabb,
    pub resolution: [usize; 3],
    pub data: Vec<Vector3>,
}

impl SampledField {
    pub fn new(support: Aabb, resolution: [usize; 3], data: Vec<Vector3>) -> Result<Self, FieldError> {
        let f = Self { support, resolution, data };
        f.validate()?;
        Ok(f)
    }

    /// Samples `f` at the cell centers.
    pub fn from_fn(support: Aabb, resolution: [usize; 3], f: impl Fn(Vector3) -> Vector3) -> Self {
        let mut s = Self { support, resolution, data: Vec::with_capacity(resolution.iter().product()) };
        for i in 0..resolution[0] {
            for j in 0..resolution[1] {
                for k in 0..resolution[2] {
                    let x = s.center([i, j, k]);
                    s.data.push(f(x));
                }
            }
        }
        s
    }

    pub fn validate(&self) -> Result<(), FieldError> {
        self.support.validate()?;
        let expected: usize = self.resolution.iter().product();
        if expected == 0 || expected != self.data.len() {
            return Err(FieldError::GridSize {
                resolution: self.resolution,
                expected,
                found: self.data.len(),
            });
        }
        if self.data.iter().flatten().any(|x| !x.is_finite()) {
            return Err(FieldError::NonFinite);
        }
        Ok(())
    }

    pub fn spacing(&self) -> Vector3 {
        let e = self.support.extent();
        [0, 1, 2].map(|k| e[k] / self.resolution[k] as f64)
    }

    pub fn cell_volume(&self) -> f64 {
        self.spacing().iter().product()
    }

    pub fn index(&self, ijk: [usize; 3]) -> usize {
        (ijk[0] * self.resolution[1] + ijk[1]) * self.resolution[2] + ijk[2]
    }

    pub fn center(&self, ijk: [usize; 3]) -> Vector3 {
        let h = self.spacing();
        [0, 1, 2].map(|a| self.support.low[a] + (ijk[a] as f64 + 0.5) * h[a])
    }

    /// Nearest-cell lookup; zero outside the support.
    pub fn eval(&self, x: Vector3) -> Vector3 {
        if !self.support.contains(x) {
            return [0.0; 3];
        }
        let h = self.spacing();
        let ijk = [0, 1, 2].map(|a| {
            let t = ((x[a] - self.support.low[a]) / h[a]).floor() as usize;
            t.min(self.resolution[a] - 1)
        });
        self.data[self.index(ijk)]
    }

    pub fn same_geometry(&self, other: &Self) -> bool {
        self.support == other.support && self.resolution == other.resolution
    }

    fn transformed(&self, map: &Matrix3) -> Self {
        Self {
            support: self.support,
            resolution: self.resolution,
            data: self.data.iter().map(|v| mat_vec(map, *v)).collect(),
        }
    }
}

/// Any supported vector field. Serializes as the externally tagged union
/// `{"linear": ...}`, `{"piecewise": [...]}` or `{"grid": ...}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VectorField {
    Linear(LinearField),
    Piecewise(PiecewiseConstantField),
    Grid(SampledField),
}

impl From<LinearField> for VectorField {
    fn from(f: LinearField) -> Self {
        Self::Linear(f)
    }
}

impl From<PiecewiseConstantField> for VectorField {
    fn from(f: PiecewiseConstantField) -> Self {
        Self::Piecewise(f)
    }
}

impl From<SampledField> for VectorField {
    fn from(f: SampledField) -> Self {
        Self::Grid(f)
    }
}

/// A field split relative to a plane `P`.
#[derive(Debug, Clone, PartialEq)]
pub struct PlaneDecomposition {
    /// Component lying in `P`.
    pub parallel: VectorField,
    /// Component along the normal of `P`.
    pub perpendicular: VectorField,
}

impl VectorField {
    pub fn from_json(text: &str) -> Result<Self, FieldError> {
        let f: Self = serde_json::from_str(text)?;
        f.validate()?;
        Ok(f)
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self, FieldError> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("fields always serialize")
    }

    pub fn validate(&self) -> Result<(), FieldError> {
        match self {
            Self::Linear(f) => {
                f.support.validate()?;
                if f.matrix.iter().flatten().any(|x| !x.is_finite()) {
                    return Err(FieldError::NonFinite);
                }
                Ok(())
            }
            Self::Piecewise(f) => f.validate(),
            Self::Grid(f) => f.validate(),
        }
    }

    pub fn eval(&self, x: Vector3) -> Vector3 {
        match self {
            Self::Linear(f) => f.eval(x),
            Self::Piecewise(f) => f.eval(x),
            Self::Grid(f) => f.eval(x),
        }
    }

    /// Applies the linear map `map` to every value of the field.
    pub fn map_values(&self, map: &Matrix3) -> Self {
        match self {
            Self::Linear(f) => Self::Linear(f.transformed(map)),
            Self::Piecewise(f) => Self::Piecewise(f.transformed(map)),
            Self::Grid(f) => Self::Grid(f.transformed(map)),
        }
    }

    pub fn rotated(&self, rotation: &Rotation) -> Self {
        self.map_values(&rotation.matrix())
    }

    /// `x -> e^{-(angle/2) P} v(x) e^{(angle/2) P}`.
    pub fn rotate_outer(&self, plane: UnitBivector, angle: f64) -> Self {
        self.rotated(&Rotation::new(plane, angle))
    }

    pub fn decompose(&self, plane: UnitBivector) -> PlaneDecomposition {
        let par = plane_projection(plane);
        let mut perp = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                perp[i][j] = if i == j { 1.0 } else { 0.0 } - par[i][j];
            }
        }
        PlaneDecomposition { parallel: self.map_values(&par), perpendicular: self.map_values(&perp) }
    }

    pub fn l2_norm_squared(&self) -> f64 {
        match self {
            Self::Linear(f) => {
                // trace(M S M^T)
                let mst = mat_mul(&mat_mul(&f.matrix, &f.support.second_moment()), &transpose(&f.matrix));
                (0..3).map(|i| mst[i][i]).sum()
            }
            Self::Piecewise(f) => f.cells.iter().map(|c| dot(c.vector, c.vector) * c.region.volume()).sum(),
            Self::Grid(f) => f.data.iter().map(|v| dot(*v, *v)).sum::<f64>() * f.cell_volume(),
        }
    }

    pub fn l2_norm(&self) -> f64 {
        self.l2_norm_squared().max(0.0).sqrt()
    }

    pub fn scaled(&self, k: f64) -> Self {
        let m = [[k, 0.0, 0.0], [0.0, k, 0.0], [0.0, 0.0, k]];
        self.map_values(&m)
    }

    pub fn normalize(&self) -> Result<Self, FieldError> {
        let n = self.l2_norm();
        if n.is_nan() || n <= 0.0 {
            return Err(FieldError::ZeroField);
        }
        Ok(self.scaled(1.0 / n))
    }

    pub fn as_linear(&self) -> Option<&LinearField> {
        match self {
            Self::Linear(f) => Some(f),
            _ => None,
        }
    }
}

/// Projection of a single vector onto `plane`: `<<v P>_1 P^-1>_1`.
pub fn project_onto_plane(v: Vector3, plane: UnitBivector) -> Vector3 {
    let p = plane.to_multivector();
    let contraction = (Multivector::vector(v) * p).grade(1).expect("grade 1 is valid");
    // P^-1 = -P for a unit bivector.
    (contraction * -p).vector_part()
}

/// Matrix of [`project_onto_plane`].
pub fn plane_projection(plane: UnitBivector) -> Matrix3 {
    let cols = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]].map(|e| project_onto_plane(e, plane));
    let mut m = [[0.0; 3]; 3];
    for (c, col) in cols.iter().enumerate() {
        for r in 0..3 {
            m[r][c] = col[r];
        }
    }
    m
}

/// Half-cube field: `a` for `x1 >= 0`, `b` for `x1 < 0`, both on `(-1, 1)^3`.
pub fn half_cube_field(a: Vector3, b: Vector3) -> PiecewiseConstantField {
    PiecewiseConstantField {
        cells: vec![
            Cell { region: Aabb { low: [0.0, -1.0, -1.0], high: [1.0, 1.0, 1.0] }, vector: a },
            Cell { region: Aabb { low: [-1.0, -1.0, -1.0], high: [0.0, 1.0, 1.0] }, vector: b },
        ],
    }
}

/// `e1` on the right half of the cube, `e2` on the left half.
pub fn example_field_axes() -> VectorField {
    half_cube_field([1.0, 0.0, 0.0], [0.0, 1.0, 0.0]).into()
}

/// `e1 + e2` on the right half of the cube, `e2` on the left half.
pub fn example_field_skew() -> VectorField {
    half_cube_field([1.0, 1.0, 0.0], [0.0, 1.0, 0.0]).into()
}
