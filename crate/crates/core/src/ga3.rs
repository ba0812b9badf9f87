//! Dense arithmetic in the geometric algebra Cl(3,0).
//!
//! Multivectors are stored on the fixed basis
//!
//! ```text
//! [1, e1, e2, e3, e12, e13, e23, e123]
//! ```
//!
//! The product table is derived once from the two rules that define the
//! algebra (`ei ei = +1`, `ei ej = -ej ei` for `i != j`) by treating every
//! basis blade as a bitmask of the basis vectors it contains.
//!
//! Angles follow the positive-angle convention: an angle lives in `[0, pi]`
//! and the orientation of a rotation is carried by the sign of its plane.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::ops::{Add, Index, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Plain 3D vector used for field values and points.
pub type Vector3 = [f64; 3];

/// Relative threshold below which the bivector part of an even multivector
/// is treated as absent.
pub const ZERO_BIVECTOR_TOL: f64 = 1e-12;

/// Odd-grade content (relative to the multivector norm) tolerated by
/// [`polar_decompose`].
pub const ODD_GRADE_TOL: f64 = 1e-9;

/// Basis blade bitmask for each storage slot.
const SLOT_MASK: [u8; 8] = [0b000, 0b001, 0b010, 0b100, 0b011, 0b101, 0b110, 0b111];

/// Grade of each storage slot.
const SLOT_GRADE: [usize; 8] = [0, 1, 1, 1, 2, 2, 2, 3];

const fn slot_of(mask: u8) -> usize {
    let mut s = 0;
    while s < 8 {
        if SLOT_MASK[s] == mask {
            return s;
        }
        s += 1;
    }
    panic!("mask out of range");
}

/// Sign picked up when the blade `a` is moved into canonical order against `b`.
const fn reorder_sign(a: u8, b: u8) -> i8 {
    let mut a = a >> 1;
    let mut swaps = 0u32;
    while a != 0 {
        swaps += (a & b).count_ones();
        a >>= 1;
    }
    if swaps.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

const fn build_table() -> [[(usize, i8); 8]; 8] {
    let mut table = [[(0usize, 0i8); 8]; 8];
    let mut i = 0;
    while i < 8 {
        let mut j = 0;
        while j < 8 {
            let (a, b) = (SLOT_MASK[i], SLOT_MASK[j]);
            // Euclidean signature: every repeated basis vector squares to +1.
            table[i][j] = (slot_of(a ^ b), reorder_sign(a, b));
            j += 1;
        }
        i += 1;
    }
    table
}

/// `PRODUCT_TABLE[i][j] = (k, s)` means `basis[i] * basis[j] = s * basis[k]`.
const PRODUCT_TABLE: [[(usize, i8); 8]; 8] = build_table();

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GaError {
    #[error("grade {0} is outside 0..=3")]
    GradeOutOfRange(usize),
    #[error("expected a pure vector, found grades other than 1 (residue {0:e})")]
    NotAVector(f64),
    #[error("cannot decompose the zero multivector")]
    ZeroMultivector,
    #[error("multivector has odd-grade content {0:e} relative to its norm")]
    OddGrade(f64),
    #[error("bivector has zero magnitude")]
    ZeroBivector,
}

/// Element of Cl(3,0) on the basis `[1, e1, e2, e3, e12, e13, e23, e123]`.
#[derive(Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Multivector(pub [f64; 8]);

impl Multivector {
    pub const ZERO: Self = Self([0.0; 8]);
    pub const ONE: Self = Self::basis(0);
    pub const E1: Self = Self::basis(1);
    pub const E2: Self = Self::basis(2);
    pub const E3: Self = Self::basis(3);
    pub const E12: Self = Self::basis(4);
    pub const E13: Self = Self::basis(5);
    pub const E23: Self = Self::basis(6);
    pub const E123: Self = Self::basis(7);

    pub const fn basis(slot: usize) -> Self {
        let mut c = [0.0; 8];
        c[slot] = 1.0;
        Self(c)
    }

    pub const fn scalar(s: f64) -> Self {
        Self([s, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0])
    }

    pub const fn vector(v: Vector3) -> Self {
        Self([0.0, v[0], v[1], v[2], 0.0, 0.0, 0.0, 0.0])
    }

    /// Builds `s + b12 e12 + b13 e13 + b23 e23`.
    pub const fn even(s: f64, b: [f64; 3]) -> Self {
        Self([s, 0.0, 0.0, 0.0, b[0], b[1], b[2], 0.0])
    }

    pub fn coefficients(&self) -> &[f64; 8] {
        &self.0
    }

    pub fn scalar_part(&self) -> f64 {
        self.0[0]
    }

    pub fn vector_part(&self) -> Vector3 {
        [self.0[1], self.0[2], self.0[3]]
    }

    /// `(e12, e13, e23)` coefficients.
    pub fn bivector_part(&self) -> [f64; 3] {
        [self.0[4], self.0[5], self.0[6]]
    }

    pub fn trivector_part(&self) -> f64 {
        self.0[7]
    }

    pub fn scale(&self, k: f64) -> Self {
        Self(self.0.map(|c| c * k))
    }

    /// Euclidean norm of the coefficient array.
    pub fn norm(&self) -> f64 {
        self.0.iter().map(|c| c * c).sum::<f64>().sqrt()
    }

    /// Norm of the grade-1 and grade-3 parts.
    pub fn odd_norm(&self) -> f64 {
        let v = self.vector_part();
        (v[0] * v[0] + v[1] * v[1] + v[2] * v[2] + self.0[7] * self.0[7]).sqrt()
    }

    pub fn geometric_product(&self, rhs: &Self) -> Self {
        let mut out = [0.0; 8];
        for (i, &a) in self.0.iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            for (j, &b) in rhs.0.iter().enumerate() {
                let (k, sign) = PRODUCT_TABLE[i][j];
                out[k] += f64::from(sign) * a * b;
            }
        }
        Self(out)
    }

    /// Reversion: grades 2 and 3 change sign.
    pub fn reverse(&self) -> Self {
        let mut out = self.0;
        for (slot, c) in out.iter_mut().enumerate() {
            if matches!(SLOT_GRADE[slot], 2 | 3) {
                *c = -*c;
            }
        }
        Self(out)
    }

    /// Projection onto grade `k`.
    pub fn grade(&self, k: usize) -> Result<Self, GaError> {
        if k > 3 {
            return Err(GaError::GradeOutOfRange(k));
        }
        let mut out = [0.0; 8];
        for slot in 0..8 {
            if SLOT_GRADE[slot] == k {
                out[slot] = self.0[slot];
            }
        }
        Ok(Self(out))
    }

    pub fn abs_diff(&self, other: &Self) -> f64 {
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

impl fmt::Debug for Multivector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Multivector({self})")
    }
}

impl fmt::Display for Multivector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        const NAMES: [&str; 8] = ["", "e1", "e2", "e3", "e12", "e13", "e23", "e123"];
        let mut first = true;
        for (c, name) in self.0.iter().zip(NAMES) {
            if *c == 0.0 {
                continue;
            }
            if first {
                if *c < 0.0 {
                    write!(f, "-")?;
                }
            } else if *c < 0.0 {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let mag = c.abs();
            if name.is_empty() {
                write!(f, "{mag}")?;
            } else if mag == 1.0 {
                write!(f, "{name}")?;
            } else {
                write!(f, "{mag}{name}")?;
            }
            first = false;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

impl Index<usize> for Multivector {
    type Output = f64;
    fn index(&self, slot: usize) -> &f64 {
        &self.0[slot]
    }
}

impl Add for Multivector {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let mut out = self.0;
        for (o, r) in out.iter_mut().zip(rhs.0) {
            *o += r;
        }
        Self(out)
    }
}

impl Sub for Multivector {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl Neg for Multivector {
    type Output = Self;
    fn neg(self) -> Self {
        Self(self.0.map(|c| -c))
    }
}

impl Mul for Multivector {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        self.geometric_product(&rhs)
    }
}

impl Mul<f64> for Multivector {
    type Output = Self;
    fn mul(self, k: f64) -> Self {
        self.scale(k)
    }
}

pub fn geometric_product(a: &Multivector, b: &Multivector) -> Multivector {
    a.geometric_product(b)
}

pub fn reverse(a: &Multivector) -> Multivector {
    a.reverse()
}

pub fn grade(a: &Multivector, k: usize) -> Result<Multivector, GaError> {
    a.grade(k)
}

/// Normalized grade-2 element: an oriented plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnitBivector {
    e12: f64,
    e13: f64,
    e23: f64,
}

impl UnitBivector {
    pub const E12: Self = Self { e12: 1.0, e13: 0.0, e23: 0.0 };
    pub const E13: Self = Self { e12: 0.0, e13: 1.0, e23: 0.0 };
    pub const E23: Self = Self { e12: 0.0, e13: 0.0, e23: 1.0 };

    /// Normalizes the `(e12, e13, e23)` triple.
    pub fn new(e12: f64, e13: f64, e23: f64) -> Result<Self, GaError> {
        let n = (e12 * e12 + e13 * e13 + e23 * e23).sqrt();
        if !(n.is_finite() && n > 0.0) {
            return Err(GaError::ZeroBivector);
        }
        Ok(Self { e12: e12 / n, e13: e13 / n, e23: e23 / n })
    }

    pub fn from_components(c: [f64; 3]) -> Result<Self, GaError> {
        Self::new(c[0], c[1], c[2])
    }

    /// Plane dual to the normal `n`, i.e. `n e123`. A positive rotation in
    /// this plane turns right-handedly about `n`.
    pub fn from_normal(n: Vector3) -> Result<Self, GaError> {
        Self::new(n[2], -n[1], n[0])
    }

    pub fn components(&self) -> [f64; 3] {
        [self.e12, self.e13, self.e23]
    }

    /// Unit normal `n` with `self = n e123`.
    pub fn normal(&self) -> Vector3 {
        [self.e23, -self.e13, self.e12]
    }

    pub fn to_multivector(&self) -> Multivector {
        Multivector::even(0.0, self.components())
    }
}

impl Neg for UnitBivector {
    type Output = Self;
    fn neg(self) -> Self {
        Self { e12: -self.e12, e13: -self.e13, e23: -self.e23 }
    }
}

/// A rotation in the positive-angle convention: `angle` in `[0, pi]` about
/// an oriented `plane`. It maps `v` to `e^{-(angle/2) plane} v e^{(angle/2) plane}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rotation {
    pub angle: f64,
    pub plane: UnitBivector,
}

impl Rotation {
    pub const IDENTITY: Self = Self { angle: 0.0, plane: UnitBivector::E12 };

    pub fn new(plane: UnitBivector, angle: f64) -> Self {
        Self { angle, plane }
    }

    /// The rotor `e^{(angle/2) plane}`.
    pub fn rotor(&self) -> Rotor {
        exp_bivector(self.plane, 0.5 * self.angle)
    }

    pub fn inverse(&self) -> Self {
        Self { angle: self.angle, plane: -self.plane }
    }

    pub fn apply(&self, v: Vector3) -> Vector3 {
        self.rotor().rotate(v)
    }

    pub fn matrix(&self) -> [[f64; 3]; 3] {
        self.rotor().matrix()
    }
}

/// Unit even multivector. Rotates vectors as `reverse(R) v R`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rotor {
    scalar: f64,
    bivector: [f64; 3],
}

impl Rotor {
    pub const IDENTITY: Self = Self { scalar: 1.0, bivector: [0.0; 3] };

    /// Renormalizes an even multivector into a rotor. Odd grades are dropped.
    pub fn from_even(m: &Multivector) -> Result<Self, GaError> {
        let s = m.scalar_part();
        let b = m.bivector_part();
        let n = (s * s + b[0] * b[0] + b[1] * b[1] + b[2] * b[2]).sqrt();
        if n.is_nan() || n <= 0.0 {
            return Err(GaError::ZeroMultivector);
        }
        Ok(Self { scalar: s / n, bivector: b.map(|c| c / n) })
    }

    pub fn scalar(&self) -> f64 {
        self.scalar
    }

    pub fn bivector(&self) -> [f64; 3] {
        self.bivector
    }

    pub fn to_multivector(&self) -> Multivector {
        Multivector::even(self.scalar, self.bivector)
    }

    pub fn reverse(&self) -> Self {
        Self { scalar: self.scalar, bivector: self.bivector.map(|c| -c) }
    }

    /// Product of two rotors; stays even, magnitude is restored to 1.
    pub fn then(&self, rhs: &Self) -> Self {
        let m = self.to_multivector() * rhs.to_multivector();
        Self::from_even(&m).expect("product of unit rotors is nonzero")
    }

    /// `reverse(R) v R`.
    pub fn rotate(&self, v: Vector3) -> Vector3 {
        let r = self.to_multivector();
        (r.reverse() * Multivector::vector(v) * r).vector_part()
    }

    /// 3x3 matrix `M` with `M v = self.rotate(v)`, columns built from the
    /// images of the basis vectors.
    pub fn matrix(&self) -> [[f64; 3]; 3] {
        let cols = [
            self.rotate([1.0, 0.0, 0.0]),
            self.rotate([0.0, 1.0, 0.0]),
            self.rotate([0.0, 0.0, 1.0]),
        ];
        let mut m = [[0.0; 3]; 3];
        for (c, col) in cols.iter().enumerate() {
            for r in 0..3 {
                m[r][c] = col[r];
            }
        }
        m
    }

    /// Rotation this rotor performs, in positive-angle form.
    pub fn rotation(&self) -> Rotation {
        let polar = polar_decompose(&self.to_multivector())
            .expect("unit rotor always has a polar form");
        canonical_rotation(polar.angle, polar.plane)
    }
}

/// `cos(angle) + sin(angle) plane`, i.e. `e^{angle plane}`.
pub fn exp_bivector(plane: UnitBivector, angle: f64) -> Rotor {
    let (s, c) = angle.sin_cos();
    Rotor { scalar: c, bivector: plane.components().map(|b| b * s) }
}

/// Outer rotation of a single vector: `e^{-(angle/2) plane} v e^{(angle/2) plane}`.
pub fn sandwich(plane: UnitBivector, angle: f64, v: &Multivector) -> Result<Multivector, GaError> {
    let residue = (v.scalar_part().powi(2)
        + v.bivector_part().iter().map(|c| c * c).sum::<f64>()
        + v.trivector_part().powi(2))
    .sqrt();
    if residue > 0.0 {
        return Err(GaError::NotAVector(residue));
    }
    let r = exp_bivector(plane, 0.5 * angle).to_multivector();
    (r.reverse() * *v * r).grade(1)
}

/// `magnitude * (cos(angle) + sin(angle) plane)` with `angle` in `[0, pi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolarForm {
    pub angle: f64,
    pub plane: UnitBivector,
    pub magnitude: f64,
}

impl PolarForm {
    pub fn reconstruct(&self) -> Multivector {
        exp_bivector(self.plane, self.angle).to_multivector().scale(self.magnitude)
    }
}

pub(crate) fn bivector_norm(m: &Multivector) -> f64 {
    let b = m.bivector_part();
    (b[0] * b[0] + b[1] * b[1] + b[2] * b[2]).sqrt()
}

/// `|<m>_2| <= 1e-12 * max(1, |<m>_0|)`.
pub fn bivector_is_negligible(m: &Multivector) -> bool {
    bivector_norm(m) <= ZERO_BIVECTOR_TOL * m.scalar_part().abs().max(1.0)
}

/// Polar form of a scalar-plus-bivector element.
pub fn polar_decompose(m: &Multivector) -> Result<PolarForm, GaError> {
    let norm = m.norm();
    if norm == 0.0 {
        return Err(GaError::ZeroMultivector);
    }
    let odd = m.odd_norm() / norm;
    if odd > ODD_GRADE_TOL {
        return Err(GaError::OddGrade(odd));
    }
    let s = m.scalar_part();
    let bn = bivector_norm(m);
    let magnitude = (s * s + bn * bn).sqrt();
    if bivector_is_negligible(m) {
        let angle = if s >= 0.0 { 0.0 } else { PI };
        return Ok(PolarForm { angle, plane: UnitBivector::E12, magnitude });
    }
    let angle = bn.atan2(s);
    let plane = UnitBivector::from_components(m.bivector_part())?;
    Ok(PolarForm { angle, plane, magnitude })
}

/// Maps a rotor half-angle in `[0, pi]` to the equivalent rotation with
/// angle in `[0, pi]`.
fn canonical_rotation(half_angle: f64, plane: UnitBivector) -> Rotation {
    if half_angle > FRAC_PI_2 {
        Rotation { angle: 2.0 * (PI - half_angle), plane: -plane }
    } else {
        Rotation { angle: 2.0 * half_angle, plane }
    }
}

/// `(beta, R)` with `e^{(beta/2) R} = e^{(alpha/2) P} e^{(phi/2) Q}`, beta in `[0, pi]`.
pub fn compose_rotation(
    alpha: f64,
    p: UnitBivector,
    phi: f64,
    q: UnitBivector,
) -> (f64, UnitBivector) {
    if phi == 0.0 {
        return (alpha, p);
    }
    let m = exp_bivector(p, 0.5 * alpha).to_multivector() * exp_bivector(q, 0.5 * phi).to_multivector();
    let polar = polar_decompose(&m).expect("product of unit rotors is nonzero and even");
    let r = canonical_rotation(polar.angle, polar.plane);
    (r.angle, r.plane)
}

pub fn dot(a: Vector3, b: Vector3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub fn norm3(a: Vector3) -> f64 {
    dot(a, a).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4};

    const TOL: f64 = 1e-12;

    /// Hand expansion of the basis rules: returns `(sign, product)` for two
    /// canonical index lists, by bubble sorting and cancelling equal neighbours.
    fn symbolic_blade_product(a: &[u8], b: &[u8]) -> (f64, Vec<u8>) {
        let mut word: Vec<u8> = a.iter().chain(b.iter()).copied().collect();
        let mut sign = 1.0;
        loop {
            let mut changed = false;
            let mut i = 0;
            while i + 1 < word.len() {
                if word[i] == word[i + 1] {
                    word.drain(i..i + 2);
                    changed = true;
                } else if word[i] > word[i + 1] {
                    word.swap(i, i + 1);
                    sign = -sign;
                    changed = true;
                    i += 1;
                } else {
                    i += 1;
                }
            }
            if !changed {
                break;
            }
        }
        (sign, word)
    }

    #[test]
    fn product_table_matches_symbolic_expansion() {
        let blades: [&[u8]; 8] = [&[], &[1], &[2], &[3], &[1, 2], &[1, 3], &[2, 3], &[1, 2, 3]];
        for i in 0..8 {
            for j in 0..8 {
                let (sign, word) = symbolic_blade_product(blades[i], blades[j]);
                let k = blades.iter().position(|b| *b == word.as_slice()).unwrap();
                let prod = Multivector::basis(i) * Multivector::basis(j);
                assert_eq!(prod, Multivector::basis(k).scale(sign), "{i} * {j}");
            }
        }
    }

    #[test]
    fn basis_products() {
        assert_eq!(Multivector::E1 * Multivector::E1, Multivector::ONE);
        assert_eq!(Multivector::E1 * Multivector::E2, Multivector::E12);
        assert_eq!(Multivector::E2 * Multivector::E1, -Multivector::E12);
        assert_eq!(
            (Multivector::E1 + Multivector::E2) * Multivector::E1,
            Multivector::ONE - Multivector::E12
        );
        assert_eq!(Multivector::E12 * Multivector::E12, -Multivector::ONE);
        assert_eq!(Multivector::E123 * Multivector::E123, -Multivector::ONE);
    }

    #[test]
    fn reverse_examples() {
        assert_eq!(Multivector::E12.reverse(), -Multivector::E12);
        assert_eq!(Multivector::E1.reverse(), Multivector::E1);
        let m = Multivector::ONE + Multivector::E12 + Multivector::E123;
        assert_eq!(m.reverse(), Multivector::ONE - Multivector::E12 - Multivector::E123);
    }

    #[test]
    fn grade_examples() {
        let m = Multivector::scalar(3.0) + Multivector::E1 * 2.0 + Multivector::E13;
        assert_eq!(m.grade(2).unwrap(), Multivector::E13);
        assert_eq!(m.grade(0).unwrap(), Multivector::scalar(3.0));
        assert_eq!(Multivector::E123.grade(3).unwrap(), Multivector::E123);
        assert_eq!(m.grade(4), Err(GaError::GradeOutOfRange(4)));
        let sum = (0..4).fold(Multivector::ZERO, |acc, k| acc + m.grade(k).unwrap());
        assert_eq!(sum, m);
    }

    #[test]
    fn exp_bivector_examples() {
        assert_eq!(exp_bivector(UnitBivector::E12, 0.0).to_multivector(), Multivector::ONE);
        let quarter = exp_bivector(UnitBivector::E12, FRAC_PI_2).to_multivector();
        assert!(quarter.abs_diff(&Multivector::E12) < TOL);
        let r = exp_bivector(UnitBivector::E13, -FRAC_PI_4).to_multivector();
        let expected = (Multivector::ONE - Multivector::E13).scale(FRAC_1_SQRT_2);
        assert!(r.abs_diff(&expected) < TOL);
        let scaled = r.scale(32f64.sqrt());
        assert!(scaled.abs_diff(&Multivector::even(4.0, [0.0, -4.0, 0.0])) < TOL);
    }

    #[test]
    fn sandwich_examples() {
        // e1 -> e3 is the positive quarter turn in the e13 plane.
        let r = sandwich(UnitBivector::E13, FRAC_PI_2, &Multivector::E1).unwrap();
        assert!(r.abs_diff(&Multivector::E3) < TOL);
        let r = sandwich(UnitBivector::E13, FRAC_PI_2, &Multivector::E3).unwrap();
        assert!(r.abs_diff(&-Multivector::E1) < TOL);
        for a in [0.1, 1.0, 2.5, PI] {
            let r = sandwich(UnitBivector::E12, a, &Multivector::E3).unwrap();
            assert!(r.abs_diff(&Multivector::E3) < TOL);
        }
        let r = sandwich(UnitBivector::E12, PI, &Multivector::E1).unwrap();
        assert!(r.abs_diff(&-Multivector::E1) < TOL);
        // anticlockwise in e12
        let r = sandwich(UnitBivector::E12, FRAC_PI_2, &Multivector::E1).unwrap();
        assert!(r.abs_diff(&Multivector::E2) < TOL);
    }

    #[test]
    fn sandwich_rejects_non_vectors() {
        assert!(matches!(
            sandwich(UnitBivector::E12, 1.0, &Multivector::E12),
            Err(GaError::NotAVector(_))
        ));
    }

    #[test]
    fn polar_examples() {
        let p = polar_decompose(&Multivector::even(4.0, [0.0, -4.0, 0.0])).unwrap();
        assert!((p.angle - FRAC_PI_4).abs() < TOL);
        assert_eq!(p.plane, -UnitBivector::E13);
        assert!((p.magnitude - 32f64.sqrt()).abs() < TOL);

        let p = polar_decompose(&Multivector::ONE).unwrap();
        assert_eq!((p.angle, p.plane, p.magnitude), (0.0, UnitBivector::E12, 1.0));

        let p = polar_decompose(&Multivector::scalar(-2.0)).unwrap();
        assert_eq!((p.angle, p.plane, p.magnitude), (PI, UnitBivector::E12, 2.0));

        let p = polar_decompose(&Multivector::E12).unwrap();
        assert!((p.angle - FRAC_PI_2).abs() < TOL);
        assert_eq!(p.plane, UnitBivector::E12);
    }

    #[test]
    fn polar_errors() {
        assert_eq!(polar_decompose(&Multivector::ZERO), Err(GaError::ZeroMultivector));
        assert!(matches!(
            polar_decompose(&(Multivector::ONE + Multivector::E1)),
            Err(GaError::OddGrade(_))
        ));
    }

    #[test]
    fn compose_examples() {
        let q = UnitBivector::new(0.3, -0.2, 0.9).unwrap();
        assert_eq!(compose_rotation(1.2, q, 0.0, UnitBivector::E23), (1.2, q));

        let (b, r) = compose_rotation(FRAC_PI_2, UnitBivector::E12, FRAC_PI_2, UnitBivector::E12);
        assert!((b - PI).abs() < TOL);
        assert_eq!(r, UnitBivector::E12);

        // (1 + e12)(1 + e13)/2 = (1 + e12 + e13 - e23)/2
        let (b, r) = compose_rotation(FRAC_PI_2, UnitBivector::E12, FRAC_PI_2, UnitBivector::E13);
        assert!((b - 2.0 * PI / 3.0).abs() < TOL);
        let k = 1.0 / 3f64.sqrt();
        for (got, want) in r.components().iter().zip([k, k, -k]) {
            assert!((got - want).abs() < TOL);
        }
    }

    #[test]
    fn compose_clamps_to_half_turn() {
        // 3pi/4 + 3pi/4 in one plane is a turn of 3pi/2, i.e. pi/2 the other way.
        let a = 3.0 * FRAC_PI_4;
        let (b, r) = compose_rotation(a, UnitBivector::E23, a, UnitBivector::E23);
        assert!((b - FRAC_PI_2).abs() < TOL);
        assert_eq!(r, -UnitBivector::E23);
    }

    #[test]
    fn normal_duality() {
        assert_eq!(UnitBivector::E12.normal(), [0.0, 0.0, 1.0]);
        assert_eq!(UnitBivector::E23.normal(), [1.0, 0.0, 0.0]);
        assert_eq!(UnitBivector::E13.normal(), [0.0, -1.0, 0.0]);
        let n = [0.2, -0.5, 0.7];
        let b = UnitBivector::from_normal(n).unwrap();
        let nn = norm3(n);
        for (got, want) in b.normal().iter().zip(n) {
            assert!((got - want / nn).abs() < TOL);
        }
        // n e123 as a multivector product
        let prod = Multivector::vector(b.normal()) * Multivector::E123;
        assert!(prod.abs_diff(&b.to_multivector()) < TOL);
    }

    #[test]
    fn rotor_matrix_matches_rotate() {
        let rot = Rotation::new(UnitBivector::new(1.0, 2.0, -0.5).unwrap(), 1.1);
        let m = rot.matrix();
        let v = [0.3, -1.2, 0.8];
        let mv = [0, 1, 2].map(|r| dot(m[r], v));
        let direct = rot.apply(v);
        for k in 0..3 {
            assert!((mv[k] - direct[k]).abs() < TOL);
        }
    }

    #[test]
    fn display_reads_naturally() {
        let m = Multivector::even(4.0, [0.0, -4.0, 0.0]);
        assert_eq!(m.to_string(), "4 - 4e13");
        assert_eq!(Multivector::ZERO.to_string(), "0");
        assert_eq!((-Multivector::E12).to_string(), "-e12");
    }
}
