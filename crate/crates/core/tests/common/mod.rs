#![allow(dead_code)]

use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::DMatrix;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use sqrtlap_core::constants::{lambda_star, Geometry};
use sqrtlap_core::*;

pub fn rectangle() -> DomainSpec {
    DomainSpec::rectangle(&[std::f64::consts::PI, std::f64::consts::PI]).unwrap()
}

pub fn unit_disk() -> DomainSpec {
    DomainSpec::disk(1.0).unwrap()
}

/// Coefficients decaying like λ_j^{-1/2} so that X-norms stay moderate.
pub fn random_field(basis: &Arc<Basis>, rng: &mut ChaCha8Rng) -> SpectralField {
    let s = basis.sqrt_eigenvalues();
    let c = (0..basis.len()).map(|j| rng.random_range(-1.0..1.0) * s[0] / s[j]).collect();
    SpectralField::new(basis.clone(), c).unwrap()
}

pub fn quick_embedding() -> EmbeddingChoice {
    EmbeddingChoice {
        options: EmbeddingOptions { restarts: 8, steps: 100, ..Default::default() },
        ..Default::default()
    }
}

/// f(t) = t²(1 − t) on the unit disk, β ≡ 1, x0 = 0, τ = 1, λ = 100.
pub fn worked_disk(modes: usize, order: usize) -> (ProblemInstance, ConstantsBundle) {
    let nl = Nonlinearity::truncated_bump(2.0, 1.0).unwrap();
    let choice = VariationalChoice { x0: Some(vec![0.0, 0.0]), tau: Some(1.0), lambda: Some(100.0), ..Default::default() };
    let d = derive(&unit_disk(), &BetaField::Constant(1.0), &nl, &choice, &quick_embedding()).unwrap();
    let inst = ProblemInstance::new(unit_disk(), BetaField::Constant(1.0), nl, d.lambda, modes, order).unwrap();
    (inst, d.bundle)
}

/// f(t) = t^{3/2}(1 − t) on the disk of radius 2√3 with λ = 1.05 λ*, a
/// configuration with λ ∈ (μ1, μ2) whose solutions are resolved by a few
/// hundred modes.
pub fn resolved_disk(modes: usize, order: usize) -> (ProblemInstance, ConstantsBundle) {
    let radius = 12f64.sqrt();
    let domain = DomainSpec::disk(radius).unwrap();
    let nl = Nonlinearity::truncated_bump(1.5, 1.0).unwrap();
    let geo = Geometry::new(&domain, &[0.0, 0.0], radius).unwrap();
    let ls = lambda_star(&geo, 1.0, 1.0, &|t| nl.potential(t)).unwrap();
    let choice = VariationalChoice {
        x0: Some(vec![0.0, 0.0]),
        tau: Some(radius),
        lambda: Some(1.05 * ls.value),
        ..Default::default()
    };
    let d = derive(&domain, &BetaField::Constant(1.0), &nl, &choice, &quick_embedding()).unwrap();
    let inst = ProblemInstance::new(domain, BetaField::Constant(1.0), nl, d.lambda, modes, order).unwrap();
    (inst, d.bundle)
}

/// Eigenvalues of the 1-D three-point Dirichlet Laplacian on (0, π).
fn fd_1d(points: usize) -> Vec<f64> {
    let h = PI / (points + 1) as f64;
    let m = DMatrix::from_fn(points, points, |i, j| {
        if i == j {
            2.0 / (h * h)
        } else if i.abs_diff(j) == 1 {
            -1.0 / (h * h)
        } else {
            0.0
        }
    });
    let mut e: Vec<f64> = m.symmetric_eigen().eigenvalues.iter().copied().collect();
    e.sort_by(f64::total_cmp);
    e
}

/// First `count` eigenvalues of the five-point Laplacian on (0, π)², which
/// separates into sums of 1-D eigenvalues.
fn fd_square(points: usize, count: usize) -> Vec<f64> {
    let e = fd_1d(points);
    let k = e.len().min(12);
    let mut sums: Vec<f64> = (0..k).flat_map(|i| (0..k).map(move |j| (i, j))).map(|(i, j)| e[i] + e[j]).collect();
    sums.sort_by(f64::total_cmp);
    sums.truncate(count);
    sums
}

/// h² Richardson extrapolation of the five-point spectrum.
pub fn fd_square_extrapolated(count: usize) -> Vec<f64> {
    let coarse = fd_square(99, count);
    let fine = fd_square(199, count);
    coarse.iter().zip(&fine).map(|(c, f)| (4.0 * f - c) / 3.0).collect()
}


/// J_0 by its power series.
pub fn j0_series(x: f64) -> f64 {
    let q = 0.25 * x * x;
    let (mut term, mut sum) = (1.0, 1.0);
    for k in 1..60 {
        term *= -q / (k * k) as f64;
        sum += term;
    }
    sum
}

pub fn bisect(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let fa0 = f(a);
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if (f(m) > 0.0) == (fa0 > 0.0) {
            a = m;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}


/// ∫ |∇ω|² by central differences at the midpoints of an n×n grid on the
/// bounding square of B(x0, τ).
pub fn cone_gradient_midpoint(cone: &ConeFunction, n: usize) -> f64 {
    let (cx, cy, t) = (cone.x0[0], cone.x0[1], cone.tau);
    let h = 2.0 * t / n as f64;
    let d = 1e-3 * h;
    let mut total = 0.0;
    for i in 0..n {
        for j in 0..n {
            let x = cx - t + (i as f64 + 0.5) * h;
            let y = cy - t + (j as f64 + 0.5) * h;
            let gx = (cone.value(&[x + d, y]) - cone.value(&[x - d, y])) / (2.0 * d);
            let gy = (cone.value(&[x, y + d]) - cone.value(&[x, y - d])) / (2.0 * d);
            total += (gx * gx + gy * gy) * h * h;
        }
    }
    total
}

pub fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        s += f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    s * h / 3.0
}

/// 2π ∫ ω(r)² r dr, split at the kink r = τ/2.
pub fn cone_l2_radial(cone: &ConeFunction) -> f64 {
    let f = |r: f64| cone.value(&[cone.x0[0] + r, cone.x0[1]]).powi(2) * r;
    2.0 * PI * (simpson(f, 0.0, 0.5 * cone.tau, 2000) + simpson(f, 0.5 * cone.tau, cone.tau, 2000))
}
