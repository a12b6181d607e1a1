//! From a problem description to a [`ConstantsBundle`] and a value of λ:
//! embedding constants, the threshold λ*, the choice of (γ, ρ).

use crate::constants::{k_constants, lambda_star, recommended_gamma, BundleInputs, ConstantsBundle, Geometry, LambdaStar};
use crate::energy::{BetaField, Nonlinearity};
use crate::error::{Error, Result};
use crate::function_space::{estimate_embedding_constant, EmbeddingOptions};
use crate::spectral_basis::DomainSpec;

/// User choices; `None` means "derive it".
#[derive(Debug, Clone, PartialEq, Default)]
pub struct VariationalChoice {
    pub x0: Option<Vec<f64>>,
    pub tau: Option<f64>,
    pub gamma: Option<f64>,
    pub rho: Option<f64>,
    pub lambda: Option<f64>,
}

/// c_1, c_q supplied by hand or estimated on `modes` eigenfunctions.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingChoice {
    pub c1: Option<f64>,
    pub cq: Option<f64>,
    pub modes: usize,
    pub options: EmbeddingOptions,
}

impl Default for EmbeddingChoice {
    fn default() -> Self {
        EmbeddingChoice { c1: None, cq: None, modes: 32, options: EmbeddingOptions::default() }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Derived {
    pub bundle: ConstantsBundle,
    pub lambda: f64,
    pub lambda_auto: bool,
    pub gamma_auto: bool,
}

/// Fraction of the admissible γ actually used.
pub const GAMMA_FRACTION: f64 = 0.5;

pub fn derive(
    domain: &DomainSpec,
    beta: &BetaField,
    nl: &Nonlinearity,
    choice: &VariationalChoice,
    emb: &EmbeddingChoice,
) -> Result<Derived> {
    let n = domain.dimension();
    nl.validate(n)?;
    let geometry = match (&choice.x0, choice.tau) {
        (None, None) => Geometry::default_for(domain),
        (x0, tau) => {
            let x0 = x0.clone().unwrap_or_else(|| domain.centroid());
            let tau = tau.unwrap_or_else(|| 0.99 * domain.distance_to_boundary(&x0));
            Geometry::new(domain, &x0, tau)?
        }
    };
    let (beta0, beta_inf) = (beta.beta0(), beta.beta_inf());
    let growth = nl.growth;
    let estimate = |p: f64| -> Result<f64> { Ok(estimate_embedding_constant(domain, p, emb.modes, &emb.options)?.estimate) };
    let indicative = emb.c1.is_none() || emb.cq.is_none();
    let c1 = match emb.c1 {
        Some(c) => c,
        None => estimate(1.0)?,
    };
    let cq = match emb.cq {
        Some(c) => c,
        None => estimate(growth.q)?,
    };
    let c2 = estimate(2.0)?;
    let potential = |t: f64| nl.potential(t);
    let ls: Option<LambdaStar> = match nl.zeta {
        Some(zeta) => Some(lambda_star(&geometry, beta0, zeta, &potential)?),
        None => None,
    };
    let rho = match (choice.rho, &ls) {
        (Some(r), _) => r,
        (None, Some(ls)) => ls.rho_bar,
        (None, None) => return Err(Error::Invalid("ρ must be given when f has no truncation level ζ".into())),
    };
    let (_, k2) = k_constants(n, geometry.tau, beta0, beta_inf, c1, cq, growth.q, geometry.h)?;
    let gamma = match choice.gamma {
        Some(g) => g,
        None => {
            let reference = match (choice.lambda, &ls) {
                (Some(l), _) => l,
                (None, Some(ls)) => 2.0 * ls.value,
                (None, None) => f64::INFINITY,
            };
            let m = nl.m.unwrap_or(growth.q - 1.0);
            if m > 1.0 && reference.is_finite() {
                recommended_gamma(&geometry, beta0, growth.a2, k2, reference, m, rho, GAMMA_FRACTION)
            } else {
                GAMMA_FRACTION * geometry.g.sqrt() * rho
            }
        }
    };
    let inputs = BundleInputs {
        geometry,
        beta0,
        beta_inf,
        a1: growth.a1,
        a2: growth.a2,
        q: growth.q,
        c1,
        cq,
        c2,
        gamma,
        rho,
        indicative,
    };
    let bundle = ConstantsBundle::assemble(inputs, &potential, ls)?;
    let lambda = match choice.lambda {
        Some(l) => l,
        None if bundle.interval_valid && bundle.mu2.is_finite() => 0.5 * (bundle.mu1 + bundle.mu2),
        None => match ls {
            Some(ls) => 2.0 * ls.value,
            None => return Err(Error::Invalid("λ = auto needs a valid (μ1, μ2) or a threshold λ*".into())),
        },
    };
    Ok(Derived { bundle, lambda, lambda_auto: choice.lambda.is_none(), gamma_auto: choice.gamma.is_none() })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn worked_disk_bundle() {
        let disk = DomainSpec::disk(1.0).unwrap();
        let nl = Nonlinearity::truncated_bump(2.0, 1.0).unwrap();
        let choice = VariationalChoice { x0: Some(vec![0.0, 0.0]), tau: Some(1.0), lambda: Some(100.0), ..Default::default() };
        let emb = EmbeddingChoice { options: EmbeddingOptions { restarts: 4, steps: 60, ..Default::default() }, modes: 16, ..Default::default() };
        let d = derive(&disk, &BetaField::Constant(1.0), &nl, &choice, &emb).unwrap();
        let b = &d.bundle;
        assert!((b.lambda_star.unwrap().value - 58.5).abs() < 1e-9);
        assert!((b.mu1 - 58.5).abs() < 1e-9);
        assert!(b.guarantees(100.0) && b.indicative);
        assert_eq!(d.lambda, 100.0);
        let (m1, m2, valid) = crate::constants::mu_interval(b, &|t| nl.potential(t)).unwrap();
        assert_eq!((m1, m2, valid), (b.mu1, b.mu2, true));
    }

    #[test]
    fn auto_lambda_is_the_midpoint() {
        let disk = DomainSpec::disk(1.0).unwrap();
        let nl = Nonlinearity::truncated_bump(2.0, 1.0).unwrap();
        let emb = EmbeddingChoice { c1: Some(1.0), cq: Some(0.6), ..Default::default() };
        let d = derive(&disk, &BetaField::Constant(1.0), &nl, &VariationalChoice::default(), &emb).unwrap();
        assert!(d.lambda_auto && !d.bundle.indicative);
        assert!((d.lambda - 0.5 * (d.bundle.mu1 + d.bundle.mu2)).abs() < 1e-9 * d.lambda);
        assert!(d.bundle.guarantees(d.lambda));
    }

    #[test]
    fn rho_is_required_without_zeta() {
        let disk = DomainSpec::disk(1.0).unwrap();
        let nl = Nonlinearity::power(1.0, 2.5).unwrap();
        let emb = EmbeddingChoice { c1: Some(1.0), cq: Some(1.0), ..Default::default() };
        let err = derive(&disk, &BetaField::Constant(1.0), &nl, &VariationalChoice::default(), &emb).unwrap_err();
        assert_eq!(err.code(), "INVALID");
    }
}
