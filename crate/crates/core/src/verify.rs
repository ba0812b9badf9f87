//! Built-in golden checks run by `georot verify`.

use std::f64::consts::FRAC_PI_2;

use crate::correlation::{correlate_at_origin, normalized_correlation};
use crate::detector::{detect, DetectionConfig};
use crate::fields::{LinearField, VectorField};
use crate::ga3::{exp_bivector, polar_decompose, Multivector, UnitBivector};

pub const EXAMPLE1_REFERENCE: &str = include_str!("../fixtures/example1_reference.json");
pub const EXAMPLE1_PATTERN: &str = include_str!("../fixtures/example1_pattern.json");
pub const EXAMPLE2_REFERENCE: &str = include_str!("../fixtures/example2_reference.json");
pub const EXAMPLE2_PATTERN: &str = include_str!("../fixtures/example2_pattern.json");

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: &'static str, passed: bool, detail: String) -> Self {
        Self { name, passed, detail }
    }

    fn failed(name: &'static str, err: impl std::fmt::Display) -> Self {
        Self::new(name, false, format!("error: {err}"))
    }
}

fn fixture(text: &str) -> VectorField {
    VectorField::from_json(text).expect("shipped fixtures are valid")
}

fn half_turn_correlation() -> Check {
    const NAME: &str = "half-angle correlation of the axis field";
    let (v, u) = (fixture(EXAMPLE1_REFERENCE), fixture(EXAMPLE1_PATTERN));
    match correlate_at_origin(&u, &v) {
        Ok(c) => {
            let expected = Multivector::even(4.0, [0.0, -4.0, 0.0]);
            let diff = c.abs_diff(&expected);
            Check::new(NAME, diff <= 1e-12, format!("correlation = {c} (expected 4 - 4e13, diff {diff:.1e})"))
        }
        Err(e) => Check::failed(NAME, e),
    }
}

fn wrong_plane_correlation() -> Check {
    const NAME: &str = "tilted-plane correlation of the skew field";
    let (v, u) = (fixture(EXAMPLE2_REFERENCE), fixture(EXAMPLE2_PATTERN));
    let polar = match correlate_at_origin(&u, &v).map(|c| (c, polar_decompose(&c))) {
        Ok((c, Ok(p))) => (c, p),
        Ok((_, Err(e))) => return Check::failed(NAME, e),
        Err(e) => return Check::failed(NAME, e),
    };
    let (c, p) = polar;
    let k = 1.0 / 3f64.sqrt();
    // The plane spanned by e12 + e13 + e23, in either orientation.
    let comps = p.plane.components();
    let sign = comps[0].signum();
    let plane_ok = comps.iter().all(|b| (b * sign - k).abs() <= 1e-10);
    let angle_ok = (p.angle - (3f64.sqrt() / 2.0).atan()).abs() <= 1e-10;
    Check::new(
        NAME,
        plane_ok && angle_ok,
        format!("correlation = {c}, angle {:.12}, plane {:?}", p.angle, comps),
    )
}

fn planar_one_shot() -> Check {
    const NAME: &str = "planar field recovered in one step";
    let v = VectorField::from(LinearField::on_cube([[0.6, -0.2, 0.3], [0.1, 0.8, -0.5], [0.0, 0.0, 0.0]]));
    let angle = 0.7;
    let u = v.rotate_outer(UnitBivector::E12, angle);
    match normalized_correlation(&u, &v) {
        Ok(r) => {
            let expected = exp_bivector(-UnitBivector::E12, angle).to_multivector();
            let diff = r.normalized.abs_diff(&expected);
            Check::new(NAME, diff <= 1e-10, format!("normalized correlation = {} (diff {diff:.1e})", r.normalized))
        }
        Err(e) => Check::failed(NAME, e),
    }
}

fn scalar_identity() -> Check {
    const NAME: &str = "scalar part equals cos(a)|v_par|^2 + |v_perp|^2";
    let v = VectorField::from(LinearField::on_cube([[0.62, -0.35, 0.18], [0.07, 0.91, -0.44], [-0.53, 0.26, 0.39]]))
        .normalize()
        .expect("nonzero field");
    let plane = UnitBivector::new(0.3, -0.8, 0.5).expect("nonzero plane");
    let angle = 1.9;
    let u = v.rotate_outer(plane, angle);
    let d = v.decompose(plane);
    let expected = angle.cos() * d.parallel.l2_norm_squared() + d.perpendicular.l2_norm_squared();
    match normalized_correlation(&u, &v) {
        Ok(r) => {
            let diff = (r.normalized.scalar_part() - expected).abs();
            Check::new(NAME, diff <= 1e-10, format!("{:.12} vs {expected:.12}", r.normalized.scalar_part()))
        }
        Err(e) => Check::failed(NAME, e),
    }
}

fn iterated_detection() -> Check {
    const NAME: &str = "iteration recovers the quarter turn in e13";
    let (v, u) = (fixture(EXAMPLE1_REFERENCE), fixture(EXAMPLE1_PATTERN));
    match detect(&v, &u, &DetectionConfig::with_epsilon(1e-6)) {
        Ok(r) => {
            let plane = r.plane.components();
            let ok = r.converged
                && (r.alpha - FRAC_PI_2).abs() <= 1e-5
                && (plane[1] - 1.0).abs() <= 1e-5;
            Check::new(NAME, ok, format!("alpha {:.8} plane {plane:?} after {} rounds", r.alpha, r.iterations))
        }
        Err(e) => Check::failed(NAME, e),
    }
}

pub fn run_checks() -> Vec<Check> {
    vec![
        half_turn_correlation(),
        wrong_plane_correlation(),
        planar_one_shot(),
        scalar_identity(),
        iterated_detection(),
    ]
}
