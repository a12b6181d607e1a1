//! Exact Dirichlet eigenpairs of −Δ on rectangles and on the disk.

use std::cmp::Ordering;
use std::f64::consts::PI;
use std::fmt;

use nalgebra::DMatrix;

use crate::bessel::{bessel_j_orders, bessel_j_with_derivative, bessel_j_zeros_below, MAX_ZERO_ORDER};
use crate::error::{Error, Result};
use crate::quadrature::{DomainQuadrature, QuadratureLayout};

const BOUNDARY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub enum DomainKind {
    /// The box (0, L_1) × … × (0, L_n), n ∈ {2, 3}.
    Rectangle { sides: Vec<f64> },
    /// The disk of the given radius centred at the origin (n = 2).
    Disk { radius: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct DomainSpec {
    kind: DomainKind,
}

impl DomainSpec {
    pub fn rectangle(sides: &[f64]) -> Result<Self> {
        if !(2..=3).contains(&sides.len()) {
            return Err(Error::UnsupportedDomain(format!(
                "rectangles need 2 or 3 sides, got {}",
                sides.len()
            )));
        }
        if sides.iter().any(|&l| !(l.is_finite() && l > 0.0)) {
            return Err(Error::UnsupportedDomain(format!("side lengths must be positive: {sides:?}")));
        }
        Ok(DomainSpec { kind: DomainKind::Rectangle { sides: sides.to_vec() } })
    }

    pub fn disk(radius: f64) -> Result<Self> {
        if !(radius.is_finite() && radius > 0.0) {
            return Err(Error::UnsupportedDomain(format!("disk radius must be positive: {radius}")));
        }
        Ok(DomainSpec { kind: DomainKind::Disk { radius } })
    }

    pub fn kind(&self) -> &DomainKind {
        &self.kind
    }

    pub fn dimension(&self) -> usize {
        match &self.kind {
            DomainKind::Rectangle { sides } => sides.len(),
            DomainKind::Disk { .. } => 2,
        }
    }

    /// |Ω|.
    pub fn measure(&self) -> f64 {
        match &self.kind {
            DomainKind::Rectangle { sides } => sides.iter().product(),
            DomainKind::Disk { radius } => PI * radius * radius,
        }
    }

    pub fn centroid(&self) -> Vec<f64> {
        match &self.kind {
            DomainKind::Rectangle { sides } => sides.iter().map(|l| 0.5 * l).collect(),
            DomainKind::Disk { .. } => vec![0.0, 0.0],
        }
    }

    /// Axis-aligned bounding box as (lower, upper) corners.
    pub fn bounding_box(&self) -> (Vec<f64>, Vec<f64>) {
        match &self.kind {
            DomainKind::Rectangle { sides } => (vec![0.0; sides.len()], sides.clone()),
            DomainKind::Disk { radius } => (vec![-radius, -radius], vec![*radius, *radius]),
        }
    }

    /// Signed distance to the boundary (positive inside).
    pub fn distance_to_boundary(&self, x: &[f64]) -> f64 {
        match &self.kind {
            DomainKind::Rectangle { sides } => sides
                .iter()
                .zip(x)
                .map(|(l, xi)| xi.min(l - xi))
                .fold(f64::INFINITY, f64::min),
            DomainKind::Disk { radius } => radius - x[0].hypot(x[1]),
        }
    }

    fn scale(&self) -> f64 {
        match &self.kind {
            DomainKind::Rectangle { sides } => sides.iter().cloned().fold(0.0, f64::max),
            DomainKind::Disk { radius } => *radius,
        }
    }

    /// Membership of the closure Ω̄, up to a relative tolerance of 1e-12.
    pub fn contains_closure(&self, x: &[f64]) -> bool {
        x.len() == self.dimension() && self.distance_to_boundary(x) >= -BOUNDARY_TOL * self.scale()
    }

    /// Does the open ball B(center, radius) lie inside Ω?
    pub fn contains_ball(&self, center: &[f64], radius: f64) -> bool {
        center.len() == self.dimension()
            && radius > 0.0
            && radius <= self.distance_to_boundary(center) * (1.0 + 1e-14)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Parity {
    Cos,
    Sin,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ModeDescriptor {
    /// ∏ sin(k_i π x_i / L_i).
    Tensor(Vec<usize>),
    /// J_m(j_{m,k} r / R) × cos(mθ) or sin(mθ).
    Bessel { order: usize, radial: usize, parity: Parity, zero: f64 },
}

impl ModeDescriptor {
    fn lexicographic(&self, other: &Self) -> Ordering {
        match (self, other) {
            (ModeDescriptor::Tensor(a), ModeDescriptor::Tensor(b)) => a.cmp(b),
            (
                ModeDescriptor::Bessel { order: m1, radial: k1, parity: p1, .. },
                ModeDescriptor::Bessel { order: m2, radial: k2, parity: p2, .. },
            ) => (m1, k1, p1).cmp(&(m2, k2, p2)),
            (ModeDescriptor::Tensor(_), _) => Ordering::Less,
            (_, ModeDescriptor::Tensor(_)) => Ordering::Greater,
        }
    }
}

impl fmt::Display for ModeDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModeDescriptor::Tensor(k) => {
                let parts: Vec<String> = k.iter().map(|v| v.to_string()).collect();
                write!(f, "({})", parts.join(";"))
            }
            ModeDescriptor::Bessel { order, radial, parity, .. } => {
                let p = match parity {
                    Parity::Cos => "cos",
                    Parity::Sin => "sin",
                };
                write!(f, "m={order};k={radial};{p}")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EigenPair {
    /// 1-based position in the ascending sequence.
    pub index: usize,
    pub eigenvalue: f64,
    pub mode: ModeDescriptor,
    /// Factor making the eigenfunction L²-normalised.
    pub normalization: f64,
}

fn by_eigenvalue(a: &(f64, ModeDescriptor), b: &(f64, ModeDescriptor)) -> Ordering {
    let tol = 1e-12 * a.0.abs().max(b.0.abs());
    if (a.0 - b.0).abs() <= tol {
        a.1.lexicographic(&b.1)
    } else {
        a.0.partial_cmp(&b.0).unwrap_or(Ordering::Equal)
    }
}

/// The first `count` Dirichlet eigenpairs in ascending order; ties are
/// broken lexicographically by mode descriptor.
pub fn eigenpairs(domain: &DomainSpec, count: usize) -> Result<Vec<EigenPair>> {
    if count == 0 {
        return Err(Error::Range("at least one eigenpair must be requested".into()));
    }
    let n = domain.dimension() as f64;
    // Weyl: N(Λ) ≈ ω_n |Ω| Λ^{n/2} / (2π)^n; start a little above it.
    let omega = crate::constants::unit_ball_measure(domain.dimension());
    let weyl = (count as f64 * (2.0 * PI).powf(n) / (omega * domain.measure())).powf(2.0 / n);
    let mut cutoff = 1.5 * weyl + 10.0 / domain.scale().powi(2);
    loop {
        let mut cands = candidates(domain, cutoff)?;
        if cands.len() >= count {
            cands.sort_by(by_eigenvalue);
            cands.truncate(count);
            return Ok(cands
                .into_iter()
                .enumerate()
                .map(|(i, (eigenvalue, mode))| EigenPair {
                    index: i + 1,
                    eigenvalue,
                    normalization: normalization(domain, &mode),
                    mode,
                })
                .collect());
        }
        cutoff *= 2.0;
    }
}

fn candidates(domain: &DomainSpec, cutoff: f64) -> Result<Vec<(f64, ModeDescriptor)>> {
    let mut out = Vec::new();
    match &domain.kind {
        DomainKind::Rectangle { sides } => {
            let freq: Vec<f64> = sides.iter().map(|l| PI / l).collect();
            let maxk: Vec<usize> =
                freq.iter().map(|w| (cutoff.sqrt() / w).floor().max(1.0) as usize).collect();
            let mut k = vec![1usize; sides.len()];
            'outer: loop {
                let lam: f64 = k.iter().zip(&freq).map(|(&ki, w)| (ki as f64 * w).powi(2)).sum();
                if lam <= cutoff {
                    out.push((lam, ModeDescriptor::Tensor(k.clone())));
                }
                for d in (0..k.len()).rev() {
                    k[d] += 1;
                    if k[d] <= maxk[d] {
                        continue 'outer;
                    }
                    k[d] = 1;
                }
                break;
            }
        }
        DomainKind::Disk { radius } => {
            let limit = radius * cutoff.sqrt();
            let mut m = 0usize;
            while (m as f64) < limit {
                if m > MAX_ZERO_ORDER {
                    return Err(Error::Range(format!(
                        "disk basis needs angular order above {MAX_ZERO_ORDER}"
                    )));
                }
                for (i, z) in bessel_j_zeros_below(m, limit).into_iter().enumerate() {
                    let lam = (z / radius).powi(2);
                    let parities: &[Parity] = if m == 0 { &[Parity::Cos] } else { &[Parity::Cos, Parity::Sin] };
                    for &parity in parities {
                        out.push((lam, ModeDescriptor::Bessel { order: m, radial: i + 1, parity, zero: z }));
                    }
                }
                m += 1;
            }
        }
    }
    Ok(out)
}

fn normalization(domain: &DomainSpec, mode: &ModeDescriptor) -> f64 {
    match (&domain.kind, mode) {
        (DomainKind::Rectangle { sides }, ModeDescriptor::Tensor(_)) => {
            sides.iter().map(|l| (2.0 / l).sqrt()).product()
        }
        (DomainKind::Disk { radius }, ModeDescriptor::Bessel { order, zero, .. }) => {
            let jn1 = bessel_j_orders(order + 1, *zero)[order + 1].abs();
            let angular = if *order == 0 { 1.0 } else { 2f64.sqrt() };
            angular / (PI.sqrt() * radius * jn1)
        }
        _ => unreachable!("mode descriptor does not match the domain"),
    }
}

/// A domain together with its first N eigenpairs.
#[derive(Debug, Clone, PartialEq)]
pub struct Basis {
    domain: DomainSpec,
    pairs: Vec<EigenPair>,
    sqrt_eigs: Vec<f64>,
}

impl Basis {
    pub fn new(domain: DomainSpec, count: usize) -> Result<Self> {
        let pairs = eigenpairs(&domain, count)?;
        let sqrt_eigs = pairs.iter().map(|p| p.eigenvalue.sqrt()).collect();
        Ok(Basis { domain, pairs, sqrt_eigs })
    }

    pub fn domain(&self) -> &DomainSpec {
        &self.domain
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn pairs(&self) -> &[EigenPair] {
        &self.pairs
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        self.pairs.iter().map(|p| p.eigenvalue).collect()
    }

    /// λ_j^{1/2}, the eigenvalues of A_{1/2}.
    pub fn sqrt_eigenvalues(&self) -> &[f64] {
        &self.sqrt_eigs
    }

    fn max_angular_order(&self) -> usize {
        self.pairs
            .iter()
            .map(|p| match p.mode {
                ModeDescriptor::Bessel { order, .. } => order,
                ModeDescriptor::Tensor(_) => 0,
            })
            .max()
            .unwrap_or(0)
    }

    /// Default rule of `order` points per axis: tensor Gauss-Legendre on
    /// rectangles, Gauss-Legendre in r × trapezoid in θ on the disk. The
    /// angular count is raised when the basis carries high angular orders.
    pub fn quadrature(&self, order: usize) -> DomainQuadrature {
        match &self.domain.kind {
            DomainKind::Rectangle { sides } => DomainQuadrature::tensor(sides, &vec![order; sides.len()]),
            DomainKind::Disk { radius } => {
                let angular = (2 * order).max(4 * self.max_angular_order() + 4);
                DomainQuadrature::polar(*radius, order, angular)
            }
        }
    }

    /// Values φ_j(x_q) as a modes × nodes matrix, built axis by axis.
    pub fn tabulate(&self, quad: &DomainQuadrature) -> DMatrix<f64> {
        let nq = quad.len();
        let mut table = DMatrix::zeros(self.len(), nq);
        match (&self.domain.kind, &quad.layout) {
            (DomainKind::Rectangle { sides }, QuadratureLayout::Tensor { axes }) => {
                let orders: Vec<usize> = axes.iter().map(|a| a.0.len()).collect();
                for (j, pair) in self.pairs.iter().enumerate() {
                    let ModeDescriptor::Tensor(k) = &pair.mode else { unreachable!() };
                    let factors: Vec<Vec<f64>> = axes
                        .iter()
                        .zip(k)
                        .zip(sides)
                        .map(|(((x, _), &kd), l)| x.iter().map(|xi| (kd as f64 * PI * xi / l).sin()).collect())
                        .collect();
                    let mut idx = vec![0usize; orders.len()];
                    for q in 0..nq {
                        let mut v = pair.normalization;
                        for (d, &i) in idx.iter().enumerate() {
                            v *= factors[d][i];
                        }
                        table[(j, q)] = v;
                        for d in (0..orders.len()).rev() {
                            idx[d] += 1;
                            if idx[d] < orders[d] {
                                break;
                            }
                            idx[d] = 0;
                        }
                    }
                }
            }
            (DomainKind::Disk { radius }, QuadratureLayout::Polar { radii, angles, .. }) => {
                let na = angles.len();
                for (j, pair) in self.pairs.iter().enumerate() {
                    let ModeDescriptor::Bessel { order, parity, zero, .. } = pair.mode else { unreachable!() };
                    let radial: Vec<f64> = radii
                        .iter()
                        .map(|r| bessel_j_orders(order, zero * r / radius)[order])
                        .collect();
                    let angular: Vec<f64> = angles
                        .iter()
                        .map(|t| match parity {
                            Parity::Cos => (order as f64 * t).cos(),
                            Parity::Sin => (order as f64 * t).sin(),
                        })
                        .collect();
                    for (ir, rv) in radial.iter().enumerate() {
                        for (ia, av) in angular.iter().enumerate() {
                            table[(j, ir * na + ia)] = pair.normalization * rv * av;
                        }
                    }
                }
            }
            _ => {
                for j in 0..self.len() {
                    for q in 0..nq {
                        table[(j, q)] = self.value(j, quad.point(q));
                    }
                }
            }
        }
        table
    }

    /// φ_j(x) without the domain check.
    pub fn value(&self, j: usize, x: &[f64]) -> f64 {
        let pair = &self.pairs[j];
        match (&self.domain.kind, &pair.mode) {
            (DomainKind::Rectangle { sides }, ModeDescriptor::Tensor(k)) => {
                let mut v = pair.normalization;
                for ((xi, l), &kd) in x.iter().zip(sides).zip(k) {
                    v *= (kd as f64 * PI * xi / l).sin();
                }
                v
            }
            (DomainKind::Disk { radius }, &ModeDescriptor::Bessel { order, parity, zero, .. }) => {
                let r = x[0].hypot(x[1]);
                let theta = x[1].atan2(x[0]);
                let radial = bessel_j_orders(order, zero * r / radius)[order];
                let angular = match parity {
                    Parity::Cos => (order as f64 * theta).cos(),
                    Parity::Sin => (order as f64 * theta).sin(),
                };
                pair.normalization * radial * angular
            }
            _ => unreachable!(),
        }
    }

    /// ∇φ_j(x).
    pub fn gradient(&self, j: usize, x: &[f64]) -> Vec<f64> {
        let pair = &self.pairs[j];
        match (&self.domain.kind, &pair.mode) {
            (DomainKind::Rectangle { sides }, ModeDescriptor::Tensor(k)) => {
                let w: Vec<f64> = k.iter().zip(sides).map(|(&kd, l)| kd as f64 * PI / l).collect();
                (0..sides.len())
                    .map(|d| {
                        let mut v = pair.normalization;
                        for e in 0..sides.len() {
                            v *= if e == d { w[e] * (w[e] * x[e]).cos() } else { (w[e] * x[e]).sin() };
                        }
                        v
                    })
                    .collect()
            }
            (DomainKind::Disk { radius }, &ModeDescriptor::Bessel { order, parity, zero, .. }) => {
                let r = x[0].hypot(x[1]);
                let kappa = zero / radius;
                let m = order as f64;
                if r < 1e-300 {
                    if order != 1 {
                        return vec![0.0, 0.0];
                    }
                    let s = pair.normalization * kappa * 0.5;
                    return match parity {
                        Parity::Cos => vec![s, 0.0],
                        Parity::Sin => vec![0.0, s],
                    };
                }
                let theta = x[1].atan2(x[0]);
                let (jv, jd) = bessel_j_with_derivative(order, kappa * r);
                let (a, da) = match parity {
                    Parity::Cos => ((m * theta).cos(), -m * (m * theta).sin()),
                    Parity::Sin => ((m * theta).sin(), m * (m * theta).cos()),
                };
                let dr = pair.normalization * kappa * jd * a;
                let dt = pair.normalization * jv * da / r;
                let (c, s) = (theta.cos(), theta.sin());
                vec![c * dr - s * dt, s * dr + c * dt]
            }
            _ => unreachable!(),
        }
    }
}

/// Values of the normalised eigenfunction of `pair` at each point.
pub fn eval_eigenfunction(domain: &DomainSpec, pair: &EigenPair, points: &[Vec<f64>]) -> Result<Vec<f64>> {
    let basis = Basis { domain: domain.clone(), pairs: vec![pair.clone()], sqrt_eigs: vec![pair.eigenvalue.sqrt()] };
    points
        .iter()
        .map(|x| {
            if !domain.contains_closure(x) {
                return Err(Error::OutOfDomain(x.clone()));
            }
            if domain.distance_to_boundary(x) <= 0.0 {
                return Ok(0.0);
            }
            Ok(basis.value(0, x))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square() -> DomainSpec {
        DomainSpec::rectangle(&[PI, PI]).unwrap()
    }

    #[test]
    fn domain_validation() {
        assert_eq!(DomainSpec::rectangle(&[1.0]).unwrap_err().code(), "UNSUPPORTED_DOMAIN");
        assert_eq!(DomainSpec::rectangle(&[1.0, 1.0, 1.0, 1.0]).unwrap_err().code(), "UNSUPPORTED_DOMAIN");
        assert_eq!(DomainSpec::rectangle(&[1.0, -2.0]).unwrap_err().code(), "UNSUPPORTED_DOMAIN");
        assert_eq!(DomainSpec::disk(0.0).unwrap_err().code(), "UNSUPPORTED_DOMAIN");
        assert_eq!(DomainSpec::rectangle(&[2.0, 3.0]).unwrap().measure(), 6.0);
        assert_eq!(DomainSpec::disk(2.0).unwrap().measure(), 4.0 * PI);
    }

    #[test]
    fn square_spectrum_head() {
        let pairs = eigenpairs(&square(), 6).unwrap();
        assert_eq!(pairs[0].eigenvalue, 2.0);
        assert_eq!(pairs[1].eigenvalue, 5.0);
        assert_eq!(pairs[1].mode, ModeDescriptor::Tensor(vec![1, 2]));
        assert_eq!(pairs[2].mode, ModeDescriptor::Tensor(vec![2, 1]));
        assert_eq!(pairs[3].eigenvalue, 8.0);
        assert!(pairs.windows(2).all(|w| w[0].eigenvalue <= w[1].eigenvalue));
        assert!(pairs.iter().enumerate().all(|(i, p)| p.index == i + 1));
    }

    #[test]
    fn disk_spectrum_head() {
        let pairs = eigenpairs(&DomainSpec::disk(1.0).unwrap(), 4).unwrap();
        assert!((pairs[0].eigenvalue - 5.783_185_962_946_784).abs() < 1e-11);
        // the m = 1 pair is degenerate, cos first
        assert_eq!(pairs[1].eigenvalue, pairs[2].eigenvalue);
        assert!(matches!(pairs[1].mode, ModeDescriptor::Bessel { order: 1, parity: Parity::Cos, .. }));
        assert!(matches!(pairs[2].mode, ModeDescriptor::Bessel { order: 1, parity: Parity::Sin, .. }));
    }

    #[test]
    fn disk_radius_scaling() {
        let a = eigenpairs(&DomainSpec::disk(1.0).unwrap(), 10).unwrap();
        let b = eigenpairs(&DomainSpec::disk(2.0).unwrap(), 10).unwrap();
        for (p, q) in a.iter().zip(&b) {
            assert!((p.eigenvalue - 4.0 * q.eigenvalue).abs() < 1e-10 * p.eigenvalue);
        }
    }

    #[test]
    fn three_dimensional_box() {
        let pairs = eigenpairs(&DomainSpec::rectangle(&[1.0, 1.0, 1.0]).unwrap(), 4).unwrap();
        assert!((pairs[0].eigenvalue - 3.0 * PI * PI).abs() < 1e-12);
        assert_eq!(pairs[1].mode, ModeDescriptor::Tensor(vec![1, 1, 2]));
    }

    #[test]
    fn eigenfunction_values() {
        let d = square();
        let pairs = eigenpairs(&d, 3).unwrap();
        let v = eval_eigenfunction(&d, &pairs[0], &[vec![PI / 2.0, PI / 2.0]]).unwrap();
        assert!((v[0] - 2.0 / PI).abs() < 1e-15);
        let b = eval_eigenfunction(&d, &pairs[1], &[vec![0.0, 1.0], vec![PI, 2.0], vec![1.0, PI]]).unwrap();
        assert!(b.iter().all(|&x| x == 0.0));
        let err = eval_eigenfunction(&d, &pairs[0], &[vec![4.0, 1.0]]).unwrap_err();
        assert_eq!(err.code(), "OUT_OF_DOMAIN");
        let disk = DomainSpec::disk(1.0).unwrap();
        let dp = eigenpairs(&disk, 5).unwrap();
        for p in &dp {
            let v = eval_eigenfunction(&disk, p, &[vec![0.6, 0.8], vec![-1.0, 0.0]]).unwrap();
            assert_eq!(v, vec![0.0, 0.0]);
        }
    }

    #[test]
    fn tabulation_matches_pointwise_values() {
        for domain in [square(), DomainSpec::disk(1.3).unwrap()] {
            let basis = Basis::new(domain, 12).unwrap();
            let quad = basis.quadrature(6);
            let table = basis.tabulate(&quad);
            for j in 0..basis.len() {
                for q in (0..quad.len()).step_by(5) {
                    let v = basis.value(j, quad.point(q));
                    assert!((table[(j, q)] - v).abs() < 1e-13);
                }
            }
        }
    }

    #[test]
    fn orthonormality_by_quadrature() {
        for domain in [square(), DomainSpec::disk(1.0).unwrap()] {
            let basis = Basis::new(domain, 20).unwrap();
            let quad = basis.quadrature(64);
            let table = basis.tabulate(&quad);
            let w = nalgebra::DVector::from_vec(quad.weights.clone());
            for i in 0..basis.len() {
                for j in 0..basis.len() {
                    let g: f64 = (0..quad.len()).map(|q| w[q] * table[(i, q)] * table[(j, q)]).sum();
                    let target = if i == j { 1.0 } else { 0.0 };
                    let tol = if i == j { 1e-8 } else { 1e-10 };
                    assert!((g - target).abs() < tol, "({i},{j}) -> {g}");
                }
            }
        }
    }

    #[test]
    fn dirichlet_energy_equals_eigenvalue() {
        for domain in [square(), DomainSpec::disk(1.0).unwrap()] {
            let basis = Basis::new(domain, 20).unwrap();
            let quad = basis.quadrature(64);
            for j in 0..basis.len() {
                let e = quad.integrate(|x| basis.gradient(j, x).iter().map(|g| g * g).sum());
                let lam = basis.pairs()[j].eigenvalue;
                assert!((e - lam).abs() < 1e-6 * lam, "mode {j}: {e} vs {lam}");
            }
        }
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let basis = Basis::new(DomainSpec::disk(1.0).unwrap(), 8).unwrap();
        let x = [0.31, -0.42];
        let h = 1e-6;
        for j in 0..basis.len() {
            let g = basis.gradient(j, &x);
            for d in 0..2 {
                let mut p = x;
                let mut m = x;
                p[d] += h;
                m[d] -= h;
                let fd = (basis.value(j, &p) - basis.value(j, &m)) / (2.0 * h);
                assert!((g[d] - fd).abs() < 1e-7);
            }
        }
    }
}
