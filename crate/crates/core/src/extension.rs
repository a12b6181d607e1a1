//! Fields on the half-cylinder Ω × (0, ∞) kept in closed form: harmonic
//! extensions Σ b_j φ_j e^{−λ_j^{1/2} y}, and products p(y)·v(x).

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::function_space::SpectralField;
use crate::quadrature::GaussLegendre;
use crate::spectral_basis::Basis;
use crate::test_functions::{cone_gradient_energy, cone_l2, project_onto_basis, ConeFunction};

/// Explicit y-profiles of product fields.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum YProfile {
    /// e^{−k y}
    Exponential { rate: f64 },
    /// (1 + y)^{−s}
    Algebraic { power: f64 },
}

impl YProfile {
    pub fn value(&self, y: f64) -> f64 {
        match *self {
            YProfile::Exponential { rate } => (-rate * y).exp(),
            YProfile::Algebraic { power } => (1.0 + y).powf(-power),
        }
    }

    pub fn derivative(&self, y: f64) -> f64 {
        match *self {
            YProfile::Exponential { rate } => -rate * (-rate * y).exp(),
            YProfile::Algebraic { power } => -power * (1.0 + y).powf(-power - 1.0),
        }
    }

    /// (∫_0^∞ p², ∫_0^∞ p'²).
    pub fn integrals(&self) -> Result<(f64, f64)> {
        match *self {
            YProfile::Exponential { rate } => {
                if !(rate > 0.0) {
                    return Err(Error::Divergent(format!("e^{{-{rate} y}} is not square integrable")));
                }
                Ok((0.5 / rate, 0.5 * rate))
            }
            YProfile::Algebraic { power } => {
                if !(power > 0.5) {
                    return Err(Error::Divergent(format!("(1+y)^(-{power}) is not square integrable")));
                }
                // 1 + y = e^z turns both integrands into decaying exponentials
                let decay = 2.0 * power - 1.0;
                let zmax = 40.0 / decay;
                let rule = GaussLegendre::new(32);
                let panels = 40;
                let (mut p2, mut d2) = (0.0, 0.0);
                for k in 0..panels {
                    let a = zmax * k as f64 / panels as f64;
                    let b = zmax * (k + 1) as f64 / panels as f64;
                    let (zs, ws) = rule.on_interval(a, b);
                    for (z, w) in zs.iter().zip(&ws) {
                        let y = z.exp() - 1.0;
                        let jac = z.exp();
                        p2 += w * jac * self.value(y).powi(2);
                        d2 += w * jac * self.derivative(y).powi(2);
                    }
                }
                Ok((p2, d2))
            }
        }
    }
}

/// The x-factor of a product field.
#[derive(Debug, Clone, PartialEq)]
pub enum TraceFactor {
    Spectral(SpectralField),
    Cone(ConeFunction),
}

#[derive(Debug, Clone, PartialEq)]
pub enum CylinderProfile {
    Harmonic,
    Product { profile: YProfile, factor: TraceFactor },
}

#[derive(Debug, Clone, PartialEq)]
pub struct CylinderField {
    basis: Arc<Basis>,
    /// b_j for harmonic fields; unused (empty) for products.
    amplitudes: Vec<f64>,
    profile: CylinderProfile,
}

impl CylinderField {
    pub fn product(basis: Arc<Basis>, profile: YProfile, factor: TraceFactor) -> Result<Self> {
        profile.integrals()?;
        if let TraceFactor::Spectral(v) = &factor {
            if v.len() != basis.len() {
                return Err(Error::Invalid("trace factor lives on a different basis".into()));
            }
        }
        Ok(CylinderField { basis, amplitudes: Vec::new(), profile: CylinderProfile::Product { profile, factor } })
    }

    /// e^{−y/2} ω_τ^ρ.
    pub fn cone_lift(basis: Arc<Basis>, cone: ConeFunction) -> Self {
        CylinderField {
            basis,
            amplitudes: Vec::new(),
            profile: CylinderProfile::Product { profile: YProfile::Exponential { rate: 0.5 }, factor: TraceFactor::Cone(cone) },
        }
    }

    pub fn basis(&self) -> &Arc<Basis> {
        &self.basis
    }

    pub fn amplitudes(&self) -> &[f64] {
        &self.amplitudes
    }

    pub fn profile(&self) -> &CylinderProfile {
        &self.profile
    }

    /// w(x, y) for x ∈ Ω̄, y ≥ 0.
    pub fn eval(&self, x: &[f64], y: f64) -> Result<f64> {
        let domain = self.basis.domain();
        if !domain.contains_closure(x) || y < 0.0 {
            let mut p = x.to_vec();
            p.push(y);
            return Err(Error::OutOfDomain(p));
        }
        match &self.profile {
            CylinderProfile::Harmonic => {
                let s = self.basis.sqrt_eigenvalues();
                Ok(self
                    .amplitudes
                    .iter()
                    .enumerate()
                    .filter(|(_, b)| **b != 0.0)
                    .map(|(j, b)| b * self.basis.value(j, x) * (-s[j] * y).exp())
                    .sum())
            }
            CylinderProfile::Product { profile, factor } => {
                let v = match factor {
                    TraceFactor::Spectral(v) => v.eval_at(&[x.to_vec()])?[0],
                    TraceFactor::Cone(c) => c.value(x),
                };
                Ok(profile.value(y) * v)
            }
        }
    }
}

/// E(u): mode j decays as e^{−λ_j^{1/2} y}.
pub fn extend(u: &SpectralField) -> CylinderField {
    CylinderField { basis: u.basis().clone(), amplitudes: u.coeffs().to_vec(), profile: CylinderProfile::Harmonic }
}

/// ∫ |∇w|² over the half-cylinder.
pub fn cylinder_energy(w: &CylinderField) -> Result<f64> {
    match &w.profile {
        CylinderProfile::Harmonic => {
            Ok(w.amplitudes.iter().zip(w.basis.sqrt_eigenvalues()).map(|(b, s)| b * b * s).sum())
        }
        CylinderProfile::Product { profile, factor } => {
            let (p2, d2) = profile.integrals()?;
            let (grad, mass) = match factor {
                TraceFactor::Spectral(v) => {
                    let lam = w.basis.eigenvalues();
                    let grad: f64 = v.coeffs().iter().zip(&lam).map(|(a, l)| a * a * l).sum();
                    let mass: f64 = v.coeffs().iter().map(|a| a * a).sum();
                    (grad, mass)
                }
                TraceFactor::Cone(c) => (cone_gradient_energy(c), cone_l2(c)),
            };
            Ok(p2 * grad + d2 * mass)
        }
    }
}

/// Tr(w) = w(·, 0) on the basis of `w`.
pub fn trace(w: &CylinderField) -> SpectralField {
    trace_with_order(w, 64)
}

/// [`trace`] with an explicit quadrature order for projecting cones.
pub fn trace_with_order(w: &CylinderField, order: usize) -> SpectralField {
    match &w.profile {
        CylinderProfile::Harmonic => SpectralField::new(w.basis.clone(), w.amplitudes.clone()).expect("valid amplitudes"),
        CylinderProfile::Product { profile, factor } => {
            let p0 = profile.value(0.0);
            match factor {
                TraceFactor::Spectral(v) => p0 * v,
                TraceFactor::Cone(c) => p0 * &project_onto_basis(c, &w.basis, order).field,
            }
        }
    }
}

/// −∂_y w(·, 0), which for harmonic fields is A_{1/2} Tr(w).
pub fn neumann_datum(w: &CylinderField) -> SpectralField {
    match &w.profile {
        CylinderProfile::Harmonic => {
            let s = w.basis.sqrt_eigenvalues();
            SpectralField::new(w.basis.clone(), w.amplitudes.iter().zip(s).map(|(b, s)| b * s).collect())
                .expect("valid amplitudes")
        }
        CylinderProfile::Product { profile, .. } => {
            let d0 = -profile.derivative(0.0);
            d0 * &trace(w)
        }
    }
}

/// Height of the finite window used for export: the slowest mode has
/// decayed by e^{−6} there.
pub fn default_window(basis: &Basis) -> f64 {
    6.0 / basis.sqrt_eigenvalues()[0]
}
