//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.
//!
//! Run with `cargo test -p georot --test acceptance`.

use std::f64::consts::{FRAC_PI_2, PI};
use std::time::{Duration, Instant};

use georot::correlation::{correlate_at_origin, normalized_correlation};
use georot::detector::{detect, residual_angle, residual_series, DetectionConfig};
use georot::experiments::{coefficient_error, random_linear_field, random_rotation, run_trials, trial_rng};
use georot::fields::{example_field_axes, example_field_skew, LinearField, VectorField};
use georot::ga3::{sandwich, Multivector, UnitBivector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Master seed of the convergence and monotonicity trials. Fixed before
/// the criteria were run.
const ACCEPTANCE_SEED: u64 = 4;
/// Master seed of the benchmark reproduction, the CLI default.
const TABLE_SEED: u64 = 7;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome { passed, detail: detail.into() }
}

// ---------------------------------------------------------------------------
// Independent oracles. Nothing here calls into the library's algebra.

/// Blade bitmask of each storage slot `[1, e1, e2, e3, e12, e13, e23, e123]`.
const MASK: [u8; 8] = [0b000, 0b001, 0b010, 0b100, 0b011, 0b101, 0b110, 0b111];

fn slot(mask: u8) -> usize {
    MASK.iter().position(|&m| m == mask).unwrap()
}

/// Sign of moving blade `b` past blade `a` into canonical order.
fn blade_sign(a: u8, b: u8) -> f64 {
    let mut swaps = 0;
    for i in 0..3 {
        if a & (1 << i) != 0 {
            swaps += (b & ((1 << i) - 1)).count_ones();
        }
    }
    if swaps.is_multiple_of(2) { 1.0 } else { -1.0 }
}

fn oracle_gp(a: &[f64; 8], b: &[f64; 8]) -> [f64; 8] {
    let mut out = [0.0; 8];
    for i in 0..8 {
        for j in 0..8 {
            out[slot(MASK[i] ^ MASK[j])] += blade_sign(MASK[i], MASK[j]) * a[i] * b[j];
        }
    }
    out
}

fn oracle_reverse(a: &[f64; 8]) -> [f64; 8] {
    let mut out = *a;
    for c in &mut out[4..] {
        *c = -*c;
    }
    out
}

fn vec_mv(v: [f64; 3]) -> [f64; 8] {
    [0.0, v[0], v[1], v[2], 0.0, 0.0, 0.0, 0.0]
}

fn max_abs_diff(a: &[f64; 8], b: &[f64; 8]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn mv_norm(a: &[f64; 8]) -> f64 {
    a.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

/// Normal whose right-handed rotation matches the outer rotation in `plane`.
fn dual_normal(p: [f64; 3]) -> [f64; 3] {
    [p[2], -p[1], p[0]]
}

/// Rodrigues rotation about the unit axis `n`.
fn rodrigues(v: [f64; 3], n: [f64; 3], angle: f64) -> [f64; 3] {
    let (s, c) = angle.sin_cos();
    let k = cross(n, v);
    let d = dot(n, v) * (1.0 - c);
    [0, 1, 2].map(|i| v[i] * c + k[i] * s + n[i] * d)
}

fn mat_apply(m: &[[f64; 3]; 3], x: [f64; 3]) -> [f64; 3] {
    [dot(m[0], x), dot(m[1], x), dot(m[2], x)]
}

/// Two-point Gauss-Legendre rule on `(-1, 1)^3`; exact for the quadratic
/// integrands formed by pairs of linear fields.
fn gauss_cube(mut f: impl FnMut([f64; 3]) -> [f64; 8]) -> [f64; 8] {
    let g = 1.0 / 3f64.sqrt();
    let mut acc = [0.0; 8];
    for x in [-g, g] {
        for y in [-g, g] {
            for z in [-g, g] {
                let v = f([x, y, z]);
                for k in 0..8 {
                    acc[k] += v[k];
                }
            }
        }
    }
    acc
}

/// Midpoint rule with `n^3` cells on `(-1, 1)^3` for `reverse(a) b` of two
/// vector fields.
fn midpoint_correlation(a: &[[f64; 3]; 3], b: &[[f64; 3]; 3], n: usize) -> [f64; 8] {
    let h = 2.0 / n as f64;
    let mut acc = [0.0; 8];
    for i in 0..n {
        let x = -1.0 + (i as f64 + 0.5) * h;
        for j in 0..n {
            let y = -1.0 + (j as f64 + 0.5) * h;
            for k in 0..n {
                let z = -1.0 + (k as f64 + 0.5) * h;
                let (u, v) = (mat_apply(a, [x, y, z]), mat_apply(b, [x, y, z]));
                acc[0] += dot(u, v);
                acc[4] += u[0] * v[1] - u[1] * v[0];
                acc[5] += u[0] * v[2] - u[2] * v[0];
                acc[6] += u[1] * v[2] - u[2] * v[1];
            }
        }
    }
    acc.map(|c| c * h * h * h)
}

fn random_matrix(rng: &mut impl Rng) -> [[f64; 3]; 3] {
    [(); 3].map(|_| [(); 3].map(|_| rng.random_range(-1.0..=1.0)))
}

fn random_plane(rng: &mut impl Rng) -> UnitBivector {
    loop {
        let c = [(); 3].map(|_| rng.random_range(-1.0..=1.0));
        let r2 = dot(c, c);
        if r2 > 1e-6 && r2 <= 1.0 {
            return UnitBivector::new(c[0], c[1], c[2]).unwrap();
        }
    }
}

fn random_mv(rng: &mut impl Rng) -> [f64; 8] {
    [(); 8].map(|_| rng.random_range(-2.0..=2.0))
}

fn lib(m: &[f64; 8]) -> Multivector {
    Multivector(*m)
}

// ---------------------------------------------------------------------------
// Criteria.

fn criterion_1() -> Outcome {
    let v = example_field_axes();
    let u = v.rotate_outer(UnitBivector::E13, FRAC_PI_2);
    let start = Instant::now();
    let c = correlate_at_origin(&u, &v).unwrap();
    let elapsed = start.elapsed();
    let want = [4.0, 0.0, 0.0, 0.0, 0.0, -4.0, 0.0, 0.0];
    let diff = max_abs_diff(&c.0, &want);
    outcome(
        diff <= 1e-12 && elapsed < Duration::from_millis(1),
        format!("correlation {c}, max deviation {diff:.1e}, {elapsed:?}"),
    )
}

fn criterion_2() -> Outcome {
    let v = example_field_skew();
    let u = v.rotate_outer(UnitBivector::E13, FRAC_PI_2);
    let start = Instant::now();
    let c = correlate_at_origin(&u, &v).unwrap();
    let polar = georot::polar_decompose(&c).unwrap();
    let elapsed = start.elapsed();
    let k = 1.0 / 3f64.sqrt();
    let got = polar.plane.components();
    // The correlation is 8 - 4(e12 + e13 + e23), so in the orientation fixed by
    // criterion 1 the polar plane is -(e12 + e13 + e23)/sqrt(3). The plane it
    // spans is the stated one; the orientation is checked exactly.
    let plane_dev = got.iter().map(|g| (g + k).abs()).fold(0.0, f64::max);
    let span_dev = got.iter().map(|g| (g.abs() - k).abs()).fold(0.0, f64::max);
    let angle_dev = (polar.angle - (3f64.sqrt() / 2.0).atan()).abs();
    outcome(
        plane_dev <= 1e-10 && span_dev <= 1e-10 && angle_dev <= 1e-10 && elapsed < Duration::from_millis(1),
        format!(
            "correlation {c}, plane {got:.12?} spans (e12+e13+e23)/sqrt3 (oriented -), \
             plane dev {plane_dev:.1e}, angle {:.12} dev {angle_dev:.1e}, {elapsed:?}",
            polar.angle
        ),
    )
}

fn criterion_3() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let cfg = DetectionConfig::with_epsilon(1e-6);
    let (mut worst_phi, mut worst_residual, mut failures) = (0.0f64, 0.0f64, 0);
    for _ in 0..100 {
        let mut m = random_matrix(&mut rng);
        m[2] = [0.0; 3];
        let v = VectorField::from(LinearField::on_cube(m));
        let alpha = rng.random_range(0.0..PI);
        let u = v.rotate_outer(UnitBivector::E12, alpha);
        let report = detect(&v, &u, &cfg).unwrap();
        // phi of the round that follows the first correction
        let phi = report.phi_trace.get(1).copied().unwrap_or(f64::INFINITY);
        let residual = residual_angle(&report.corrections[..1], UnitBivector::E12, alpha);
        worst_phi = worst_phi.max(phi);
        worst_residual = worst_residual.max(residual);
        if phi > 1e-10 {
            failures += 1;
        }
    }
    outcome(
        failures == 0,
        format!("100 planar fields, worst phi after first correction {worst_phi:.1e}, worst residual angle {worst_residual:.1e}"),
    )
}

struct TrialRun {
    residuals: Vec<f64>,
    converged: bool,
    iterations: usize,
    error: f64,
}

fn acceptance_trials(cfg: &DetectionConfig) -> Vec<TrialRun> {
    (0..1000)
        .map(|i| {
            let mut rng = trial_rng(ACCEPTANCE_SEED, i);
            let field = random_linear_field(&mut rng);
            let (plane, angle) = random_rotation(&mut rng);
            let v = VectorField::Linear(field.clone());
            let u = v.rotate_outer(plane, angle);
            let report = detect(&v, &u, cfg).unwrap();
            let recovered = report.corrected_pattern.as_linear().unwrap();
            TrialRun {
                residuals: residual_series(&report.corrections, plane, angle),
                converged: report.converged,
                iterations: report.iterations,
                error: coefficient_error(&field, recovered),
            }
        })
        .collect()
}

fn criterion_4(runs: &[TrialRun], elapsed: Duration) -> Outcome {
    let mut worst = f64::NEG_INFINITY;
    let mut violations = 0;
    for r in runs {
        for w in r.residuals.windows(2) {
            let rise = w[1] - w[0];
            worst = worst.max(rise);
            if rise > 1e-9 {
                violations += 1;
            }
        }
    }
    outcome(
        violations == 0 && elapsed < Duration::from_secs(30),
        format!("1000 trials, seed {ACCEPTANCE_SEED}, largest step increase {worst:.1e}, {violations} violations, {elapsed:.2?}"),
    )
}

fn criterion_5(runs: &[TrialRun], eps: f64) -> Outcome {
    let nonconverged = runs.iter().filter(|r| !r.converged).count();
    let max_iters = runs.iter().map(|r| r.iterations).max().unwrap_or(0);
    let over = runs.iter().filter(|r| r.error > 10.0 * eps).count();
    let max_error = runs.iter().map(|r| r.error).fold(0.0, f64::max);
    let mut errors: Vec<f64> = runs.iter().map(|r| r.error).collect();
    errors.sort_by(f64::total_cmp);
    let median = errors[errors.len() / 2];
    outcome(
        nonconverged == 0 && over == 0,
        format!(
            "{nonconverged} not converged (max {max_iters} rounds), {over} trials with error > 10 eps, \
             max error {max_error:.2e}, median {median:.2e}"
        ),
    )
}

fn criterion_6() -> Outcome {
    let start = Instant::now();
    let targets = [(0.1, 0.17, 4.23), (0.01, 0.02, 11.76), (0.001, 0.002, 21.44)];
    let mut ok = true;
    let mut parts = Vec::new();
    for (eps, err_ref, iter_ref) in targets {
        let s = run_trials(10_000, eps, TABLE_SEED);
        let err_ok = s.average_error >= 0.5 * err_ref && s.average_error <= 5.0 * err_ref;
        let iter_ok = (s.average_iterations - iter_ref).abs() <= 0.5 * iter_ref;
        ok &= s.n_nonconverged == 0 && err_ok && iter_ok;
        parts.push(format!(
            "eps {eps}: avg error {:.4} (max {:.3}), avg rounds {:.2}, {} not converged",
            s.average_error, s.max_error, s.average_iterations, s.n_nonconverged
        ));
    }
    let elapsed = start.elapsed();
    ok &= elapsed < Duration::from_secs(300);
    outcome(ok, format!("{}; {elapsed:.2?}", parts.join("; ")))
}

fn criterion_7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (mut scalar_dev, mut bivector_dev, mut cs_slack, mut norm_excess) = (0.0f64, 0.0f64, f64::INFINITY, 0.0f64);
    for _ in 0..500 {
        let m = random_matrix(&mut rng);
        // Normalize with the oracle's own norm.
        let n2 = gauss_cube(|x| {
            let a = mat_apply(&m, x);
            [dot(a, a), 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]
        })[0];
        let m = m.map(|row| row.map(|c| c / n2.sqrt()));
        let plane = random_plane(&mut rng);
        let alpha = rng.random_range(0.0..PI);
        let v = VectorField::from(LinearField::on_cube(m));
        let u = v.rotate_outer(plane, alpha);
        let got = normalized_correlation(&u, &v).unwrap().normalized;

        let n = dual_normal(plane.components());
        let split = |x: [f64; 3]| {
            let a = mat_apply(&m, x);
            let d = dot(a, n);
            let perp = n.map(|c| c * d);
            ([a[0] - perp[0], a[1] - perp[1], a[2] - perp[2]], perp)
        };
        let par2 = gauss_cube(|x| {
            let (p, _) = split(x);
            [dot(p, p), 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]
        })[0];
        let perp2 = gauss_cube(|x| {
            let (_, q) = split(x);
            [dot(q, q), 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]
        })[0];
        let cross_term = gauss_cube(|x| {
            let (p, q) = split(x);
            oracle_gp(&vec_mv(p), &vec_mv(q))
        });

        let expected_scalar = alpha.cos() * par2 + perp2;
        scalar_dev = scalar_dev.max((got.scalar_part() - expected_scalar).abs());

        let p = plane.components();
        let pm = [0.0, 0.0, 0.0, 0.0, p[0], p[1], p[2], 0.0];
        let (s, c) = alpha.sin_cos();
        let factor = [c - 1.0, 0.0, 0.0, 0.0, -s * p[0], -s * p[1], -s * p[2], 0.0];
        let mixed = oracle_gp(&factor, &cross_term);
        let expected_bivector = [0, 1, 2].map(|k| -s * pm[4 + k] * par2 + mixed[4 + k]);
        let gb = got.bivector_part();
        for k in 0..3 {
            bivector_dev = bivector_dev.max((gb[k] - expected_bivector[k]).abs());
        }

        let lhs = mv_norm(&cross_term).powi(2);
        cs_slack = cs_slack.min(par2 * perp2 - lhs);
        norm_excess = norm_excess.max(got.norm() - 1.0);
    }

    let (mut assoc, mut rev, mut table, mut sandwich_dev) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for _ in 0..1000 {
        let (a, b, c) = (random_mv(&mut rng), random_mv(&mut rng), random_mv(&mut rng));
        let (la, lb, lc) = (lib(&a), lib(&b), lib(&c));
        table = table.max(max_abs_diff(&(la * lb).0, &oracle_gp(&a, &b)));
        assoc = assoc.max(((la * lb) * lc).abs_diff(&(la * (lb * lc))));
        rev = rev.max((la * lb).reverse().abs_diff(&(lb.reverse() * la.reverse())));
        let ref_rev = oracle_reverse(&a);
        rev = rev.max(max_abs_diff(&la.reverse().0, &ref_rev));

        let plane = random_plane(&mut rng);
        let angle = rng.random_range(-PI..PI);
        let x = [(); 3].map(|_| rng.random_range(-2.0..=2.0));
        let out = sandwich(plane, angle, &Multivector::vector(x)).unwrap();
        let want = rodrigues(x, dual_normal(plane.components()), angle);
        let got = out.vector_part();
        for k in 0..3 {
            sandwich_dev = sandwich_dev.max((got[k] - want[k]).abs());
        }
        sandwich_dev = sandwich_dev.max((dot(got, got).sqrt() - dot(x, x).sqrt()).abs());
    }

    let ok = scalar_dev <= 1e-10
        && bivector_dev <= 1e-10
        && cs_slack >= -1e-10
        && norm_excess <= 1e-10
        && table <= 1e-12
        && assoc <= 1e-11
        && rev <= 1e-12
        && sandwich_dev <= 1e-12;
    outcome(
        ok,
        format!(
            "500 fields: scalar dev {scalar_dev:.1e}, bivector dev {bivector_dev:.1e}, \
             Cauchy-Schwarz min slack {cs_slack:.1e}, |normalized| - 1 <= {norm_excess:.1e}; \
             1000 draws: product table {table:.1e}, associativity {assoc:.1e}, reversion {rev:.1e}, sandwich {sandwich_dev:.1e}"
        ),
    )
}

fn criterion_8() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let (ma, mb) = (random_matrix(&mut rng), random_matrix(&mut rng));
        let a = VectorField::from(LinearField::on_cube(ma));
        let b = VectorField::from(LinearField::on_cube(mb));
        let analytic = correlate_at_origin(&a, &b).unwrap();
        let quad = midpoint_correlation(&ma, &mb, 64);
        let rel = analytic.abs_diff(&lib(&quad)) / analytic.norm();
        worst = worst.max(rel);
    }
    outcome(worst <= 1e-3, format!("50 random pairs, worst relative deviation from 64^3 midpoint rule {worst:.2e}"))
}

fn main() {
    let mut results: Vec<(&str, Outcome)> = Vec::new();
    let mut report = |name: &'static str, o: Outcome| {
        println!("[{}] {name}: {}", if o.passed { "PASS" } else { "FAIL" }, o.detail);
        results.push((name, o));
    };

    report("1 golden correlation 4 - 4e13", criterion_1());
    report("2 golden counterexample plane and angle", criterion_2());
    report("3 planar rotation restored in one correction", criterion_3());

    let eps = 1e-6;
    let start = Instant::now();
    let runs = acceptance_trials(&DetectionConfig::with_epsilon(eps));
    let elapsed = start.elapsed();
    report("4 residual angle never increases", criterion_4(&runs, elapsed));
    report("5 all trials converge with error <= 10 eps", criterion_5(&runs, eps));
    report("6 benchmark table reproduction", criterion_6());
    report("7 algebraic identity suite", criterion_7());
    report("8 analytic correlation matches quadrature", criterion_8());

    let failed: Vec<&str> = results.iter().filter(|(_, o)| !o.passed).map(|(n, _)| *n).collect();
    println!("acceptance: {} passed, {} failed", results.len() - failed.len(), failed.len());
    if !failed.is_empty() {
        std::process::exit(1);
    }
}
