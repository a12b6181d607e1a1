//! Truncated cones ω_τ^ρ, their lifts e^{−y/2}ω_τ^ρ, exact energies and
//! the comparison chain that places the lift above the γ-ball.

use std::fmt;
use std::sync::Arc;

use nalgebra::DVector;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::constants::{unit_ball_measure, ConstantsBundle};
use crate::energy::ProblemInstance;
use crate::error::{Error, Result};
use crate::function_space::SpectralField;
use crate::spectral_basis::{Basis, DomainSpec};

/// ρ on B(x0, τ/2), 2ρ/τ (τ − |x − x0|) on the annulus, 0 outside B(x0, τ).
#[derive(Debug, Clone, PartialEq)]
pub struct ConeFunction {
    pub x0: Vec<f64>,
    pub tau: f64,
    pub rho: f64,
    /// |Ω|, needed for the upper energy bound.
    pub measure: f64,
}

impl ConeFunction {
    pub fn new(domain: &DomainSpec, x0: &[f64], tau: f64, rho: f64) -> Result<Self> {
        if x0.len() != domain.dimension() {
            return Err(Error::Invalid(format!("x0 must have {} coordinates", domain.dimension())));
        }
        if !(tau > 0.0) || !(rho >= 0.0) || !rho.is_finite() {
            return Err(Error::Invalid(format!("cone needs τ > 0 and ρ ≥ 0, got τ = {tau}, ρ = {rho}")));
        }
        if !domain.contains_ball(x0, tau) {
            return Err(Error::Precondition(format!("B(x0, {tau}) is not contained in the domain")));
        }
        Ok(ConeFunction { x0: x0.to_vec(), tau, rho, measure: domain.measure() })
    }

    pub fn dimension(&self) -> usize {
        self.x0.len()
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        let r = x.iter().zip(&self.x0).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
        if r >= self.tau {
            0.0
        } else if r > 0.5 * self.tau {
            2.0 * self.rho / self.tau * (self.tau - r)
        } else {
            self.rho
        }
    }

    pub fn with_rho(&self, rho: f64) -> Self {
        ConeFunction { rho, ..self.clone() }
    }
}

/// e^{−y/2} ω_τ^ρ.
#[derive(Debug, Clone, PartialEq)]
pub struct ConeLift {
    pub cone: ConeFunction,
}

/// ∫ |∇ω_τ^ρ|² = 4ρ² ω_n τ^{n−2} (1 − 2^{−n}).
pub fn cone_gradient_energy(cone: &ConeFunction) -> f64 {
    let n = cone.dimension();
    4.0 * cone.rho * cone.rho * unit_ball_measure(n) * cone.tau.powi(n as i32 - 2) * (1.0 - 0.5f64.powi(n as i32))
}

/// ∫ (ω_τ^ρ)², integrating the radial polynomial exactly.
pub fn cone_l2(cone: &ConeFunction) -> f64 {
    let n = cone.dimension() as i32;
    let nf = n as f64;
    let (tau, rho) = (cone.tau, cone.rho);
    let omega = unit_ball_measure(cone.dimension());
    let inner = rho * rho * omega * (0.5 * tau).powi(n);
    // (τ − r)² r^{n−1} = τ² r^{n−1} − 2τ r^n + r^{n+1}
    let anti = |r: f64| tau * tau * r.powi(n) / nf - 2.0 * tau * r.powi(n + 1) / (nf + 1.0) + r.powi(n + 2) / (nf + 2.0);
    let annulus = (2.0 * rho / tau).powi(2) * nf * omega * (anti(tau) - anti(0.5 * tau));
    inner + annulus
}

/// The lower term of the two-sided lift bound, 4ω_n τ^{n−2}(1 − 2^{−n}) ρ².
pub fn lift_lower_bound(cone: &ConeFunction) -> f64 {
    cone_gradient_energy(cone)
}

pub fn lift_upper_bound(cone: &ConeFunction) -> f64 {
    cone_gradient_energy(cone) + 0.25 * cone.measure * cone.rho * cone.rho
}

/// ‖e^{−y/2}ω‖² = ∫|∇ω|² + ¼∫ω², checked against the two-sided bound.
pub fn lift_energy(lift: &ConeLift) -> Result<f64> {
    let c = &lift.cone;
    let value = cone_gradient_energy(c) + 0.25 * cone_l2(c);
    let (lo, hi) = (lift_lower_bound(c), lift_upper_bound(c));
    let slack = 1e-12 * hi.max(1e-300);
    if value < lo - slack || value > hi + slack {
        return Err(Error::InternalInconsistency(format!("lift energy {value} outside [{lo}, {hi}]")));
    }
    Ok(value)
}

/// L² projection of a cone onto a basis.
#[derive(Debug, Clone)]
pub struct Projection {
    pub field: SpectralField,
    /// ‖ω − Pω‖_{L²} via Pythagoras with the exact ‖ω‖.
    pub error: f64,
    pub relative_error: f64,
}

pub fn project_onto_basis(cone: &ConeFunction, basis: &Arc<Basis>, order: usize) -> Projection {
    let quad = basis.quadrature(order);
    let table = basis.tabulate(&quad);
    let g = DVector::from_iterator(quad.len(), (0..quad.len()).map(|i| quad.weights[i] * cone.value(quad.point(i))));
    let coeffs = &table * g;
    let norm2 = cone_l2(cone);
    let err2 = (norm2 - coeffs.norm_squared()).max(0.0);
    let field = SpectralField::new(basis.clone(), coeffs.as_slice().to_vec()).expect("finite projection");
    let error = err2.sqrt();
    Projection { field, error, relative_error: if norm2 > 0.0 { error / norm2.sqrt() } else { 0.0 } }
}

/// Ψ of the exact cone: ∫ β F(ω) on the instance quadrature.
pub fn cone_psi(inst: &ProblemInstance, cone: &ConeFunction) -> f64 {
    let quad = inst.sampled().quadrature();
    let nl = inst.nonlinearity();
    (0..quad.len())
        .map(|i| {
            let x = quad.point(i);
            quad.weights[i] * inst.beta().eval(x) * nl.potential(cone.value(x))
        })
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClauseStatus {
    Pass,
    Fail,
    Skipped,
}

impl fmt::Display for ClauseStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ClauseStatus::Pass => "PASS",
            ClauseStatus::Fail => "FAIL",
            ClauseStatus::Skipped => "SKIPPED",
        })
    }
}

/// One inequality `lhs (relation) rhs`.
#[derive(Debug, Clone, PartialEq)]
pub struct Clause {
    pub name: &'static str,
    pub status: ClauseStatus,
    pub lhs: f64,
    pub rhs: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChainReport {
    pub lambda: f64,
    pub phi: f64,
    pub psi: f64,
    pub energy: f64,
    /// Analytic upper bound on sup Ψ over {Φ ≤ γ²}.
    pub psi_sup_bound: f64,
    /// Largest Ψ found by sampling {Φ ≤ γ²}; a lower estimate of the sup.
    pub psi_sup_sampled: f64,
    pub clauses: Vec<Clause>,
}

impl ChainReport {
    pub fn clause(&self, name: &str) -> Option<&Clause> {
        self.clauses.iter().find(|c| c.name == name)
    }

    pub fn passed(&self) -> bool {
        self.clauses.iter().all(|c| c.status != ClauseStatus::Fail)
    }
}

/// Largest Ψ over `samples` random fields on the sphere Φ = r, plus the
/// first mode.
pub fn sample_psi_sup(inst: &ProblemInstance, r: f64, samples: usize, seed: u64) -> f64 {
    let n = inst.modes();
    let radius = (2.0 * r).sqrt();
    let s = inst.basis().sqrt_eigenvalues();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = f64::NEG_INFINITY;
    for k in 0..=samples {
        let mut a = if k == 0 {
            let mut e = DVector::zeros(n);
            e[0] = 1.0;
            e
        } else {
            DVector::from_fn(n, |j, _| {
                let z: f64 = StandardNormal.sample(&mut rng);
                z * s[0] / s[j]
            })
        };
        let norm = inst.x_norm(&a);
        if norm == 0.0 {
            continue;
        }
        a *= radius / norm;
        for sign in [1.0, -1.0] {
            best = best.max(inst.psi(&(sign * &a)));
        }
    }
    best
}

/// Certifies the inequalities that place the cone lift outside the γ-ball
/// and below the truncated energy level there.
pub fn verify_competitor_chain(bundle: &ConstantsBundle, inst: &ProblemInstance, seed: u64) -> Result<ChainReport> {
    let geo = &bundle.geometry;
    if !bundle.rho_gamma_ok {
        return Err(Error::Precondition(format!(
            "ρ√g > γ fails: ρ = {}, γ = {}, g = {}",
            bundle.rho, bundle.gamma, geo.g
        )));
    }
    if !inst.nonlinearity().sign {
        return Err(Error::Precondition("the chain needs F ≥ 0 on [0, ∞)".into()));
    }
    let cone = ConeFunction::new(inst.domain(), &geo.x0, geo.tau, bundle.rho)?;
    let phi = 0.5 * lift_energy(&ConeLift { cone: cone.clone() })?;
    let psi = cone_psi(inst, &cone);
    let lambda = inst.lambda();
    let gamma2 = bundle.gamma * bundle.gamma;
    let f_rho = inst.nonlinearity().potential(bundle.rho);
    let mut clauses = Vec::new();

    let status = |ok: bool| if ok { ClauseStatus::Pass } else { ClauseStatus::Fail };
    clauses.push(Clause { name: "phi_above_gamma", status: status(phi > gamma2), lhs: phi, rhs: gamma2 });

    let psi_lower = bundle.beta0 * geo.omega * (0.5 * geo.tau).powi(geo.n as i32) * f_rho;
    clauses.push(Clause {
        name: "psi_lower_bound",
        status: status(psi >= psi_lower * (1.0 - 1e-6)),
        lhs: psi,
        rhs: psi_lower,
    });

    let ratio_rhs = bundle.beta0 * geo.omega / geo.h * (0.5 * geo.tau).powi(geo.n as i32) * f_rho / (bundle.rho * bundle.rho);
    clauses.push(Clause {
        name: "ratio_condition",
        status: status(psi / phi >= ratio_rhs * (1.0 - 1e-6)),
        lhs: psi / phi,
        rhs: ratio_rhs,
    });

    let sup_bound = bundle.psi_sup_bound(gamma2);
    let sup_sampled = sample_psi_sup(inst, gamma2, 200, seed);
    let energy = phi - lambda * psi;
    let level = gamma2 - lambda * sup_bound;
    let level_status = if bundle.contains(lambda) { status(energy < level) } else { ClauseStatus::Skipped };
    clauses.push(Clause { name: "below_truncated_level", status: level_status, lhs: energy, rhs: level });

    let report =
        ChainReport { lambda, phi, psi, energy, psi_sup_bound: sup_bound, psi_sup_sampled: sup_sampled, clauses };
    if let Some(bad) = report.clauses.iter().find(|c| c.status == ClauseStatus::Fail) {
        return Err(Error::ChainViolation(format!("{}: lhs = {}, rhs = {}", bad.name, bad.lhs, bad.rhs)));
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn unit_disk() -> DomainSpec {
        DomainSpec::disk(1.0).unwrap()
    }

    #[test]
    fn exact_energies_of_the_unit_cone() {
        let cone = ConeFunction::new(&unit_disk(), &[0.0, 0.0], 1.0, 1.0).unwrap();
        assert!((cone_gradient_energy(&cone) - 3.0 * PI).abs() < 1e-14);
        assert!((cone_l2(&cone) - 11.0 * PI / 24.0).abs() < 1e-14);
        let e = lift_energy(&ConeLift { cone: cone.clone() }).unwrap();
        assert!((e - 299.0 * PI / 96.0).abs() < 1e-13);
        assert!((3.0 * PI..=3.0 * PI + PI / 4.0).contains(&e));
        let big = cone.with_rho(2.0);
        assert!((cone_gradient_energy(&big) - 4.0 * cone_gradient_energy(&cone)).abs() < 1e-13);
        assert!((lift_energy(&ConeLift { cone: big }).unwrap() - 4.0 * e).abs() < 1e-12);
    }

    #[test]
    fn l2_bounds_in_three_dimensions() {
        let dom = DomainSpec::rectangle(&[2.0, 2.0, 3.0]).unwrap();
        let cone = ConeFunction::new(&dom, &[1.0, 1.0, 1.5], 0.9, 0.7).unwrap();
        let l2 = cone_l2(&cone);
        assert!(l2 <= 0.49 * dom.measure());
        assert!(l2 >= 0.49 * 4.0 * PI / 3.0 * 0.45f64.powi(3));
    }

    #[test]
    fn cone_invariants_at_sample_points() {
        let dom = DomainSpec::rectangle(&[PI, PI]).unwrap();
        let cone = ConeFunction::new(&dom, &[1.5, 1.7], 1.2, 0.8).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let lip = 2.0 * cone.rho / cone.tau;
        for _ in 0..10_000 {
            let x: Vec<f64> = (0..2).map(|_| rand::Rng::random_range(&mut rng, 0.0..PI)).collect();
            let y: Vec<f64> = (0..2).map(|_| rand::Rng::random_range(&mut rng, 0.0..PI)).collect();
            let (vx, vy) = (cone.value(&x), cone.value(&y));
            assert!((0.0..=cone.rho).contains(&vx));
            let r = ((x[0] - 1.5f64).powi(2) + (x[1] - 1.7f64).powi(2)).sqrt();
            if r < 0.6 {
                assert_eq!(vx, cone.rho);
            }
            if r >= 1.2 {
                assert_eq!(vx, 0.0);
            }
            let d = ((x[0] - y[0]).powi(2) + (x[1] - y[1]).powi(2)).sqrt();
            assert!((vx - vy).abs() <= lip * d * (1.0 + 1e-12));
        }
    }

    #[test]
    fn cone_outside_domain_is_rejected() {
        assert_eq!(ConeFunction::new(&unit_disk(), &[0.5, 0.0], 0.6, 1.0).unwrap_err().code(), "PRECONDITION");
    }

    #[test]
    fn projections() {
        let b = Arc::new(Basis::new(unit_disk(), 16).unwrap());
        let zero = ConeFunction::new(&unit_disk(), &[0.0, 0.0], 1.0, 0.0).unwrap();
        assert!(project_onto_basis(&zero, &b, 32).field.coeffs().iter().all(|c| *c == 0.0));
        let cone = zero.with_rho(1.0);
        let p = project_onto_basis(&cone, &b, 64);
        assert!(p.field.l2_norm() <= cone_l2(&cone).sqrt());
        assert!(p.relative_error < 0.2);
    }
}
