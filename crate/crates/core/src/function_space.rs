//! Elements of H_0^{1/2}(Ω) as finite coefficient vectors on the
//! Dirichlet eigenbasis, the operator A_{1/2}, norms and trace-embedding
//! constant estimates.

use std::ops::{Add, Mul, Sub};
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::constants::critical_exponent;
use crate::error::{Error, Result};
use crate::quadrature::DomainQuadrature;
use crate::spectral_basis::{Basis, DomainSpec};

/// u = Σ a_j φ_j on a fixed basis.
#[derive(Debug, Clone)]
pub struct SpectralField {
    basis: Arc<Basis>,
    coeffs: Vec<f64>,
}

impl PartialEq for SpectralField {
    fn eq(&self, other: &Self) -> bool {
        (Arc::ptr_eq(&self.basis, &other.basis) || self.basis == other.basis) && self.coeffs == other.coeffs
    }
}

impl SpectralField {
    pub fn new(basis: Arc<Basis>, coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.len() != basis.len() {
            return Err(Error::Invalid(format!(
                "{} coefficients for a basis of {} modes",
                coeffs.len(),
                basis.len()
            )));
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::Invalid("coefficients must be finite".into()));
        }
        Ok(SpectralField { basis, coeffs })
    }

    pub fn zeros(basis: Arc<Basis>) -> Self {
        let n = basis.len();
        SpectralField { basis, coeffs: vec![0.0; n] }
    }

    /// The single eigenfunction φ_j (0-based j).
    pub fn mode(basis: Arc<Basis>, j: usize) -> Self {
        let mut u = SpectralField::zeros(basis);
        u.coeffs[j] = 1.0;
        u
    }

    pub fn basis(&self) -> &Arc<Basis> {
        &self.basis
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<f64> {
        self.coeffs
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    fn check_same_basis(&self, other: &Self) {
        assert!(
            Arc::ptr_eq(&self.basis, &other.basis) || self.basis == other.basis,
            "fields live on different bases"
        );
    }

    pub fn map_coeffs<F: Fn(usize, f64) -> f64>(&self, f: F) -> Self {
        SpectralField {
            basis: self.basis.clone(),
            coeffs: self.coeffs.iter().enumerate().map(|(j, &a)| f(j, a)).collect(),
        }
    }

    /// ⟨u, v⟩ in H_0^{1/2}: Σ a_j b_j λ_j^{1/2}.
    pub fn inner(&self, other: &Self) -> f64 {
        self.check_same_basis(other);
        let s = self.basis.sqrt_eigenvalues();
        self.coeffs.iter().zip(&other.coeffs).zip(s).map(|((a, b), l)| a * b * l).sum()
    }

    /// ‖u‖_{L²(Ω)} by Parseval.
    pub fn l2_norm(&self) -> f64 {
        self.coeffs.iter().map(|a| a * a).sum::<f64>().sqrt()
    }

    /// u(x) at points of Ω̄.
    pub fn eval_at(&self, points: &[Vec<f64>]) -> Result<Vec<f64>> {
        let domain = self.basis.domain();
        points
            .iter()
            .map(|x| {
                if !domain.contains_closure(x) {
                    return Err(Error::OutOfDomain(x.clone()));
                }
                if domain.distance_to_boundary(x) <= 0.0 {
                    return Ok(0.0);
                }
                Ok(self.coeffs.iter().enumerate().filter(|(_, a)| **a != 0.0).map(|(j, a)| a * self.basis.value(j, x)).sum())
            })
            .collect()
    }
}

impl Add for &SpectralField {
    type Output = SpectralField;
    fn add(self, rhs: &SpectralField) -> SpectralField {
        self.check_same_basis(rhs);
        self.map_coeffs(|j, a| a + rhs.coeffs[j])
    }
}

impl Sub for &SpectralField {
    type Output = SpectralField;
    fn sub(self, rhs: &SpectralField) -> SpectralField {
        self.check_same_basis(rhs);
        self.map_coeffs(|j, a| a - rhs.coeffs[j])
    }
}

impl Mul<&SpectralField> for f64 {
    type Output = SpectralField;
    fn mul(self, rhs: &SpectralField) -> SpectralField {
        rhs.map_coeffs(|_, a| self * a)
    }
}

/// (Σ a_j² λ_j^{1/2})^{1/2}.
pub fn h_half_norm(u: &SpectralField) -> f64 {
    u.inner(u).max(0.0).sqrt()
}

/// A_{1/2}u: a_j ↦ a_j λ_j^{1/2}.
pub fn apply_sqrt_laplacian(u: &SpectralField) -> SpectralField {
    let s = u.basis.sqrt_eigenvalues().to_vec();
    u.map_coeffs(|j, a| a * s[j])
}

/// |t|^p with fast paths for small integer exponents.
pub fn abs_pow(t: f64, p: f64) -> f64 {
    let a = t.abs();
    if p == 1.0 {
        a
    } else if p == 2.0 {
        a * a
    } else if p == 3.0 {
        a * a * a
    } else if p == 4.0 {
        (a * a) * (a * a)
    } else {
        a.powf(p)
    }
}

/// A basis sampled on a quadrature rule: the modes × nodes table that
/// turns coefficient vectors into nodal values and back.
#[derive(Debug, Clone)]
pub struct SampledBasis {
    basis: Arc<Basis>,
    quad: DomainQuadrature,
    table: DMatrix<f64>,
    weights: DVector<f64>,
}

impl SampledBasis {
    pub fn new(basis: Arc<Basis>, order: usize) -> Self {
        let quad = basis.quadrature(order);
        let table = basis.tabulate(&quad);
        let weights = DVector::from_column_slice(&quad.weights);
        SampledBasis { basis, quad, table, weights }
    }

    pub fn basis(&self) -> &Arc<Basis> {
        &self.basis
    }

    pub fn quadrature(&self) -> &DomainQuadrature {
        &self.quad
    }

    pub fn table(&self) -> &DMatrix<f64> {
        &self.table
    }

    pub fn weights(&self) -> &DVector<f64> {
        &self.weights
    }

    pub fn nodes(&self) -> usize {
        self.quad.len()
    }

    /// Nodal values Σ_j a_j φ_j(x_q).
    pub fn synthesize(&self, coeffs: &DVector<f64>) -> DVector<f64> {
        self.table.tr_mul(coeffs)
    }

    /// ∫ g φ_j for nodal values g, as a coefficient vector.
    pub fn project_nodal(&self, nodal: &DVector<f64>) -> DVector<f64> {
        let weighted = nodal.component_mul(&self.weights);
        &self.table * weighted
    }

    pub fn integrate_nodal(&self, nodal: &DVector<f64>) -> f64 {
        nodal.dot(&self.weights)
    }

    pub fn lp_norm_nodal(&self, nodal: &DVector<f64>, p: f64) -> f64 {
        let s: f64 = nodal.iter().zip(self.weights.iter()).map(|(u, w)| w * abs_pow(*u, p)).sum();
        s.powf(1.0 / p)
    }
}

/// Quadrature approximation of ‖u‖_{L^p(Ω)}, 1 ≤ p ≤ 2♯.
pub fn lp_trace_norm(u: &SpectralField, p: f64, order: usize) -> Result<f64> {
    let crit = critical_exponent(u.basis.domain().dimension());
    if !(p >= 1.0 && p <= crit) {
        return Err(Error::Range(format!("p = {p} outside [1, {crit}]")));
    }
    let sampled = SampledBasis::new(u.basis.clone(), order);
    let nodal = sampled.synthesize(&DVector::from_column_slice(&u.coeffs));
    Ok(sampled.lp_norm_nodal(&nodal, p))
}

/// Search budget for [`estimate_embedding_constant`].
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingOptions {
    pub restarts: usize,
    pub steps: usize,
    pub quad_order: usize,
    pub seed: u64,
}

impl Default for EmbeddingOptions {
    fn default() -> Self {
        EmbeddingOptions { restarts: 32, steps: 200, quad_order: 32, seed: 0 }
    }
}

/// A lower bound on the best trace-embedding constant c_p.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingConstants {
    pub p: f64,
    /// sup over the sampled starts of ‖u‖_{L^p} / ‖u‖_{H_0^{1/2}}; never
    /// larger than the true constant.
    pub estimate: f64,
    pub critical_exponent: f64,
    pub modes: usize,
    pub restarts: usize,
    pub steps: usize,
    /// Coefficients of the best field found (unit H_0^{1/2} norm).
    pub maximizer: Vec<f64>,
}

struct RatioProblem<'a> {
    sampled: &'a SampledBasis,
    modes: usize,
    p: f64,
    /// λ_j^{-1/4}: maps normalised coordinates b to coefficients a.
    scale: Vec<f64>,
}

impl RatioProblem<'_> {
    fn coefficients(&self, b: &[f64]) -> DVector<f64> {
        let mut a = DVector::zeros(self.sampled.basis.len());
        for j in 0..self.modes {
            a[j] = b[j] * self.scale[j];
        }
        a
    }

    /// ‖u‖_p on the unit sphere |b| = 1, and its nodal values.
    fn value(&self, b: &[f64]) -> (f64, DVector<f64>) {
        let nodal = self.sampled.synthesize(&self.coefficients(b));
        (self.sampled.lp_norm_nodal(&nodal, self.p), nodal)
    }

    fn ascend(&self, start: Vec<f64>, steps: usize) -> (f64, Vec<f64>) {
        let mut b = normalized(start);
        let (mut val, mut nodal) = self.value(&b);
        let mut step = 0.5;
        for _ in 0..steps {
            if val == 0.0 {
                break;
            }
            // d‖u‖_p / da_j = ‖u‖_p^{1-p} ∫ |u|^{p-2} u φ_j
            let pow: DVector<f64> = nodal.map(|u| u.signum() * abs_pow(u, self.p - 1.0));
            let da = self.sampled.project_nodal(&pow) * val.powf(1.0 - self.p);
            let mut grad: Vec<f64> = (0..self.modes).map(|j| da[j] * self.scale[j]).collect();
            let radial: f64 = grad.iter().zip(&b).map(|(g, x)| g * x).sum();
            for (g, x) in grad.iter_mut().zip(&b) {
                *g -= radial * x;
            }
            let gnorm = grad.iter().map(|g| g * g).sum::<f64>().sqrt();
            if gnorm < 1e-14 * val {
                break;
            }
            let mut improved = false;
            while step > 1e-12 {
                let trial = normalized(b.iter().zip(&grad).map(|(x, g)| x + step * g / gnorm).collect());
                let (tv, tn) = self.value(&trial);
                if tv > val {
                    b = trial;
                    val = tv;
                    nodal = tn;
                    improved = true;
                    step = (step * 1.5).min(1.0);
                    break;
                }
                step *= 0.5;
            }
            if !improved {
                break;
            }
        }
        (val, b)
    }
}

fn normalized(mut v: Vec<f64>) -> Vec<f64> {
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if n > 0.0 {
        v.iter_mut().for_each(|x| *x /= n);
    }
    v
}

/// Lower bound on c_p by ascent of ‖u‖_{L^p}/‖u‖_{H_0^{1/2}} over the
/// first `modes` eigenfunctions.
///
/// The search on N modes is seeded with the maximiser found on ⌈N/2⌉ modes,
/// so estimates never decrease when N doubles.
pub fn estimate_embedding_constant(
    domain: &DomainSpec,
    p: f64,
    modes: usize,
    options: &EmbeddingOptions,
) -> Result<EmbeddingConstants> {
    let crit = critical_exponent(domain.dimension());
    if p == crit {
        return Err(Error::CriticalExponent { p, critical: crit });
    }
    if !(p >= 1.0 && p < crit) {
        return Err(Error::Range(format!("p = {p} outside [1, {crit})")));
    }
    if modes == 0 {
        return Err(Error::Range("the embedding estimate needs at least one mode".into()));
    }
    let sub = Arc::new(Basis::new(domain.clone(), modes)?);
    let sampled = SampledBasis::new(sub, options.quad_order);
    Ok(estimate_on(&sampled, p, modes, options))
}

fn estimate_on(sampled: &SampledBasis, p: f64, modes: usize, options: &EmbeddingOptions) -> EmbeddingConstants {
    let crit = critical_exponent(sampled.basis.domain().dimension());
    let warm = if modes > 1 { Some(estimate_on(sampled, p, modes.div_ceil(2), options).maximizer) } else { None };
    let sqrt_eigs = sampled.basis.sqrt_eigenvalues();
    let problem = RatioProblem { sampled, modes, p, scale: sqrt_eigs.iter().map(|s| 1.0 / s.sqrt()).collect() };
    let lam1 = sqrt_eigs[0];
    let results: Vec<(f64, Vec<f64>)> = (0..options.restarts.max(1))
        .into_par_iter()
        .map(|r| {
            let start: Vec<f64> = if r == 0 {
                let mut e = vec![0.0; modes];
                e[0] = 1.0;
                e
            } else if r == 1 && warm.is_some() {
                let w = warm.as_ref().unwrap();
                let mut e = vec![0.0; modes];
                for (j, v) in w.iter().enumerate().take(modes) {
                    e[j] = v / problem.scale[j];
                }
                e
            } else {
                let mut rng = ChaCha8Rng::seed_from_u64(options.seed ^ (r as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
                (0..modes)
                    .map(|j| {
                        let z: f64 = StandardNormal.sample(&mut rng);
                        z * (lam1 / sqrt_eigs[j])
                    })
                    .collect()
            };
            problem.ascend(start, options.steps)
        })
        .collect();
    let (best_val, best_b) = results
        .into_iter()
        .fold((f64::NEG_INFINITY, Vec::new()), |acc, r| if r.0 > acc.0 { r } else { acc });
    let mut maximizer = vec![0.0; modes];
    for j in 0..modes {
        maximizer[j] = best_b[j] * problem.scale[j];
    }
    EmbeddingConstants {
        p,
        estimate: best_val,
        critical_exponent: crit,
        modes,
        restarts: options.restarts,
        steps: options.steps,
        maximizer,
    }
}
