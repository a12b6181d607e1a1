//! Explicit constants of the three-solution theory and the parameter
//! thresholds derived from them.
//!
//! All formulas take plain scalars so that they can be audited in
//! isolation; [`ConstantsBundle`] assembles them for a concrete problem.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::spectral_basis::DomainSpec;

/// ω_n, the Lebesgue measure of the unit ball of R^n.
pub fn unit_ball_measure(n: usize) -> f64 {
    match n {
        0 => 1.0,
        1 => 2.0,
        2 => PI,
        _ => 2.0 * PI / n as f64 * unit_ball_measure(n - 2),
    }
}

/// 2♯ = 2n/(n−1).
pub fn critical_exponent(n: usize) -> f64 {
    2.0 * n as f64 / (n as f64 - 1.0)
}

/// (g_Ω, h_Ω) with g = (2^n − 1)/2^{n−1} τ^{n−2} ω_n and h = g + |Ω|/8.
pub fn geometry_constants(n: usize, tau: f64, measure: f64) -> (f64, f64) {
    let p = 2f64.powi(n as i32);
    let g = (p - 1.0) / (0.5 * p) * tau.powi(n as i32 - 2) * unit_ball_measure(n);
    (g, g + measure / 8.0)
}

/// 2^n / (τ^n ω_n β0), the prefactor shared by μ1, μ2 and λ*.
pub fn threshold_prefactor(n: usize, tau: f64, beta0: f64) -> f64 {
    2f64.powi(n as i32) / (tau.powi(n as i32) * unit_ball_measure(n) * beta0)
}

/// (K1, K2).
#[allow(clippy::too_many_arguments)]
pub fn k_constants(
    n: usize,
    tau: f64,
    beta0: f64,
    beta_inf: f64,
    c1: f64,
    cq: f64,
    q: f64,
    h: f64,
) -> Result<(f64, f64)> {
    let crit = critical_exponent(n);
    if !(q > 1.0 && q < crit) {
        return Err(Error::GrowthRange { q, critical: crit });
    }
    let common = h * beta_inf / (unit_ball_measure(n) * beta0) * (2.0 / tau).powi(n as i32);
    let k1 = 2f64.sqrt() * c1 * common;
    let k2 = 2f64.powf(q / 2.0) * cq.powf(q) / q * common;
    Ok((k1, k2))
}

/// μ2 = prefactor · hγ / (a1 K1 + a2 K2 γ^{q−1}); +∞ when the denominator vanishes.
#[allow(clippy::too_many_arguments)]
pub fn mu2(n: usize, tau: f64, beta0: f64, h: f64, gamma: f64, a1: f64, a2: f64, q: f64, k1: f64, k2: f64) -> f64 {
    let denom = a1 * k1 + a2 * k2 * gamma.powf(q - 1.0);
    if denom <= 0.0 {
        return f64::INFINITY;
    }
    threshold_prefactor(n, tau, beta0) * h * gamma / denom
}

/// μ1 = prefactor · h ρ² / F(ρ).
pub fn mu1(n: usize, tau: f64, beta0: f64, h: f64, rho: f64, f_rho: f64) -> Result<f64> {
    if !(f_rho > 0.0) {
        return Err(Error::PotentialNonpositive { rho, value: f_rho });
    }
    Ok(threshold_prefactor(n, tau, beta0) * h * rho * rho / f_rho)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AiCheck {
    pub holds: bool,
    /// F(ρ)/ρ² − (a1 K1/γ + a2 K2 γ^{q−2}).
    pub margin: f64,
}

#[allow(clippy::too_many_arguments)]
pub fn check_ai(rho: f64, gamma: f64, a1: f64, a2: f64, q: f64, k1: f64, k2: f64, f_rho: f64) -> AiCheck {
    let margin = f_rho / (rho * rho) - (a1 * k1 / gamma + a2 * k2 * gamma.powf(q - 2.0));
    AiCheck { holds: margin > 0.0, margin }
}

/// ρ √g > γ (strict).
pub fn check_rho_gamma(rho: f64, gamma: f64, g: f64) -> bool {
    rho * g.sqrt() > gamma
}

/// Upper bound on χ(r) = sup_{Φ ≤ r} Ψ / r.
#[allow(clippy::too_many_arguments)]
pub fn chi_bound(r: f64, a1: f64, a2: f64, q: f64, c1: f64, cq: f64, beta_inf: f64) -> f64 {
    (2.0 / r).sqrt() * a1 * c1 * beta_inf + 2f64.powf(q / 2.0) * a2 * cq.powf(q) / q * r.powf(q / 2.0 - 1.0) * beta_inf
}

/// Upper bound on sup_{Φ ≤ r} Ψ: √(2r) a1 c1 ‖β‖∞ + (2r)^{q/2} a2 c_q^q ‖β‖∞ / q.
#[allow(clippy::too_many_arguments)]
pub fn psi_sup_bound(r: f64, a1: f64, a2: f64, q: f64, c1: f64, cq: f64, beta_inf: f64) -> f64 {
    (2.0 * r).sqrt() * a1 * c1 * beta_inf + (2.0 * r).powf(q / 2.0) * a2 * cq.powf(q) / q * beta_inf
}

/// Ball B(x0, τ) inside Ω and the geometric constants it induces.
#[derive(Debug, Clone, PartialEq)]
pub struct Geometry {
    pub n: usize,
    pub x0: Vec<f64>,
    pub tau: f64,
    pub measure: f64,
    pub omega: f64,
    pub g: f64,
    pub h: f64,
}

impl Geometry {
    pub fn new(domain: &DomainSpec, x0: &[f64], tau: f64) -> Result<Self> {
        if x0.len() != domain.dimension() {
            return Err(Error::Invalid(format!("x0 must have {} coordinates", domain.dimension())));
        }
        if !domain.contains_ball(x0, tau) {
            return Err(Error::Precondition(format!(
                "B(x0, {tau}) is not contained in the domain (distance to boundary {})",
                domain.distance_to_boundary(x0)
            )));
        }
        let n = domain.dimension();
        let measure = domain.measure();
        let (g, h) = geometry_constants(n, tau, measure);
        Ok(Geometry { n, x0: x0.to_vec(), tau, measure, omega: unit_ball_measure(n), g, h })
    }

    /// x0 at the centroid, τ = 0.99 · dist(x0, ∂Ω).
    pub fn default_for(domain: &DomainSpec) -> Self {
        let x0 = domain.centroid();
        let tau = 0.99 * domain.distance_to_boundary(&x0);
        Geometry::new(domain, &x0, tau).expect("centroid ball is admissible")
    }

    pub fn prefactor(&self, beta0: f64) -> f64 {
        threshold_prefactor(self.n, self.tau, beta0)
    }
}

/// Result of the λ* computation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LambdaStar {
    pub value: f64,
    /// Minimiser of ρ²/F(ρ) on (0, ζ].
    pub rho_bar: f64,
    /// inf_{0<ρ≤ζ} ρ²/F(ρ).
    pub inf_ratio: f64,
}

const SCAN_POINTS: usize = 4096;

/// sup over (0, ζ] of F(ρ)/ρ², located by a dense scan and golden-section
/// refinement. Returns (argmax, max).
pub fn maximize_potential_ratio<F: Fn(f64) -> f64>(potential: &F, zeta: f64) -> (f64, f64) {
    let ratio = |r: f64| potential(r) / (r * r);
    let mut best = (zeta / SCAN_POINTS as f64, f64::NEG_INFINITY);
    let mut best_i = 1;
    for i in 1..=SCAN_POINTS {
        let r = zeta * i as f64 / SCAN_POINTS as f64;
        let v = ratio(r);
        if v > best.1 {
            best = (r, v);
            best_i = i;
        }
    }
    if best_i == 1 {
        // the supremum may sit at 0⁺; follow the ratio down geometrically
        let mut r = best.0;
        for _ in 0..60 {
            let next = 0.5 * r;
            let v = ratio(next);
            if !(v > best.1) {
                break;
            }
            best = (next, v);
            r = next;
        }
        if best.0 < zeta / SCAN_POINTS as f64 {
            return best;
        }
    }
    let step = zeta / SCAN_POINTS as f64;
    let mut a = (best.0 - step).max(0.5 * step);
    let mut b = (best.0 + step).min(zeta);
    let invphi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - invphi * (b - a);
    let mut d = a + invphi * (b - a);
    let (mut fc, mut fd) = (ratio(c), ratio(d));
    for _ in 0..200 {
        if (b - a).abs() < 1e-14 * zeta {
            break;
        }
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - invphi * (b - a);
            fc = ratio(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + invphi * (b - a);
            fd = ratio(d);
        }
    }
    let r = 0.5 * (a + b);
    let v = ratio(r);
    if v >= best.1 {
        (r, v)
    } else {
        best
    }
}

/// λ* = prefactor · h · inf_{0<ρ≤ζ} ρ²/F(ρ).
pub fn lambda_star<F: Fn(f64) -> f64>(geometry: &Geometry, beta0: f64, zeta: f64, potential: &F) -> Result<LambdaStar> {
    let (rho_bar, sup) = maximize_potential_ratio(potential, zeta);
    if !(sup > 0.0) {
        return Err(Error::NoAdmissibleRho { zeta });
    }
    let inf_ratio = 1.0 / sup;
    Ok(LambdaStar { value: geometry.prefactor(beta0) * geometry.h * inf_ratio, rho_bar, inf_ratio })
}

/// γ from the min-formula of the two-positive-solutions argument, scaled by
/// `fraction` ∈ (0, 1) to make the strict inequality strict in floating point.
#[allow(clippy::too_many_arguments)]
pub fn recommended_gamma(
    geometry: &Geometry,
    beta0: f64,
    a2: f64,
    k2: f64,
    lambda: f64,
    m: f64,
    rho_bar: f64,
    fraction: f64,
) -> f64 {
    let first = geometry.g.sqrt() * rho_bar;
    let second = if a2 * k2 > 0.0 {
        (geometry.prefactor(beta0) * geometry.h / (a2 * k2 * lambda)).powf(1.0 / (m - 1.0))
    } else {
        f64::INFINITY
    };
    fraction * first.min(second)
}

/// Every scalar of the construction for one problem and one (γ, ρ) choice.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstantsBundle {
    pub geometry: Geometry,
    pub beta0: f64,
    pub beta_inf: f64,
    pub a1: f64,
    pub a2: f64,
    pub q: f64,
    pub c1: f64,
    pub cq: f64,
    pub c2: f64,
    pub k1: f64,
    pub k2: f64,
    pub gamma: f64,
    pub rho: f64,
    pub f_rho: f64,
    pub mu1: f64,
    pub mu2: f64,
    pub interval_valid: bool,
    pub ai: AiCheck,
    pub rho_gamma_ok: bool,
    pub lambda_star: Option<LambdaStar>,
    /// Set when c_1, c_q are numerical lower bounds rather than certified
    /// constants; every derived threshold inherits the flag.
    pub indicative: bool,
}

/// Inputs to [`ConstantsBundle::assemble`].
#[derive(Debug, Clone)]
pub struct BundleInputs {
    pub geometry: Geometry,
    pub beta0: f64,
    pub beta_inf: f64,
    pub a1: f64,
    pub a2: f64,
    pub q: f64,
    pub c1: f64,
    pub cq: f64,
    pub c2: f64,
    pub gamma: f64,
    pub rho: f64,
    pub indicative: bool,
}

impl ConstantsBundle {
    pub fn assemble<F: Fn(f64) -> f64>(inp: BundleInputs, potential: &F, lambda_star: Option<LambdaStar>) -> Result<Self> {
        let geo = &inp.geometry;
        if !(inp.beta0 > 0.0) || inp.beta_inf < inp.beta0 {
            return Err(Error::Invalid(format!("need 0 < β0 ≤ ‖β‖∞, got {} and {}", inp.beta0, inp.beta_inf)));
        }
        if !(inp.gamma > 0.0 && inp.rho > 0.0) {
            return Err(Error::Precondition("γ and ρ must be positive".into()));
        }
        let (k1, k2) = k_constants(geo.n, geo.tau, inp.beta0, inp.beta_inf, inp.c1, inp.cq, inp.q, geo.h)?;
        let f_rho = potential(inp.rho);
        let mu1 = mu1(geo.n, geo.tau, inp.beta0, geo.h, inp.rho, f_rho)?;
        let mu2 = mu2(geo.n, geo.tau, inp.beta0, geo.h, inp.gamma, inp.a1, inp.a2, inp.q, k1, k2);
        let ai = check_ai(inp.rho, inp.gamma, inp.a1, inp.a2, inp.q, k1, k2, f_rho);
        Ok(ConstantsBundle {
            geometry: inp.geometry.clone(),
            beta0: inp.beta0,
            beta_inf: inp.beta_inf,
            a1: inp.a1,
            a2: inp.a2,
            q: inp.q,
            c1: inp.c1,
            cq: inp.cq,
            c2: inp.c2,
            k1,
            k2,
            gamma: inp.gamma,
            rho: inp.rho,
            f_rho,
            mu1,
            mu2,
            interval_valid: mu1 < mu2,
            ai,
            rho_gamma_ok: check_rho_gamma(inp.rho, inp.gamma, inp.geometry.g),
            lambda_star,
            indicative: inp.indicative,
        })
    }

    pub fn contains(&self, lambda: f64) -> bool {
        self.interval_valid && lambda > self.mu1 && lambda < self.mu2
    }

    /// All hypotheses of the three-solution statement hold and λ ∈ (μ1, μ2).
    pub fn guarantees(&self, lambda: f64) -> bool {
        self.ai.holds && self.rho_gamma_ok && self.contains(lambda)
    }

    pub fn chi_bound(&self, r: f64) -> f64 {
        chi_bound(r, self.a1, self.a2, self.q, self.c1, self.cq, self.beta_inf)
    }

    pub fn psi_sup_bound(&self, r: f64) -> f64 {
        psi_sup_bound(r, self.a1, self.a2, self.q, self.c1, self.cq, self.beta_inf)
    }
}

/// (μ1, μ2, μ1 < μ2) recomputed from the scalars of a bundle.
pub fn mu_interval<F: Fn(f64) -> f64>(bundle: &ConstantsBundle, potential: &F) -> Result<(f64, f64, bool)> {
    let geo = &bundle.geometry;
    let m1 = mu1(geo.n, geo.tau, bundle.beta0, geo.h, bundle.rho, potential(bundle.rho))?;
    let m2 = mu2(geo.n, geo.tau, bundle.beta0, geo.h, bundle.gamma, bundle.a1, bundle.a2, bundle.q, bundle.k1, bundle.k2);
    Ok((m1, m2, m1 < m2))
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Γ(1 + n/2) in closed form at integers and half-integers.
    fn gamma_one_plus_half(n: usize) -> f64 {
        if n.is_multiple_of(2) {
            (1..=n / 2).map(|k| k as f64).product()
        } else {
            // Γ(k + 1/2) = (2k)! √π / (4^k k!), here k = (n + 1)/2
            let k = n.div_ceil(2);
            let mut v = PI.sqrt();
            for i in 0..k {
                v *= i as f64 + 0.5;
            }
            v
        }
    }

    #[test]
    fn unit_ball_measures() {
        assert_eq!(unit_ball_measure(1), 2.0);
        assert_eq!(unit_ball_measure(2), PI);
        assert!((unit_ball_measure(3) - 4.0 * PI / 3.0).abs() < 1e-15);
        for n in 1..=10 {
            let gamma = PI.powf(n as f64 / 2.0) / gamma_one_plus_half(n);
            assert!((unit_ball_measure(n) - gamma).abs() < 1e-12, "n = {n}");
        }
    }

    #[test]
    fn geometry_formulas() {
        let (g, h) = geometry_constants(2, 1.0, PI);
        assert!((g - 1.5 * PI).abs() < 1e-15);
        assert!((h - 13.0 * PI / 8.0).abs() < 1e-15);
        let (g3, _) = geometry_constants(3, 1.0, 1.0);
        assert!((g3 - 7.0 * PI / 3.0).abs() < 1e-14);
    }

    #[test]
    fn k_constants_worked_values() {
        let h = 13.0 * PI / 8.0;
        let (k1, k2) = k_constants(2, 1.0, 1.0, 1.0, 1.0, 1.0, 3.0, h).unwrap();
        assert!((k1 - 13.0 * 2f64.sqrt() / 2.0).abs() < 1e-12);
        assert!((k2 - 2f64.powf(1.5) * 13.0 / 6.0).abs() < 1e-12);
        let (k1b, k2b) = k_constants(2, 1.0, 1.0, 3.0, 1.0, 1.0, 3.0, h).unwrap();
        assert!((k1b / k1 - 3.0).abs() < 1e-14 && (k2b / k2 - 3.0).abs() < 1e-14);
        let (k1c, _) = k_constants(2, 1.0, 2.0, 6.0, 1.0, 1.0, 3.0, h).unwrap();
        assert!((k1c - k1b).abs() < 1e-12);
        assert_eq!(k_constants(2, 1.0, 1.0, 1.0, 1.0, 1.0, 4.0, h).unwrap_err().code(), "GROWTH_RANGE");
        assert_eq!(k_constants(2, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, h).unwrap_err().code(), "GROWTH_RANGE");
    }

    #[test]
    fn mu2_scaling_in_gamma() {
        let h = 13.0 * PI / 8.0;
        let a = mu2(2, 1.0, 1.0, h, 0.3, 0.0, 1.0, 3.0, 5.0, 6.0);
        let b = mu2(2, 1.0, 1.0, h, 0.6, 0.0, 1.0, 3.0, 5.0, 6.0);
        assert!((b / a - 0.5).abs() < 1e-14);
        assert_eq!(mu2(2, 1.0, 1.0, h, 0.3, 0.0, 0.0, 3.0, 5.0, 6.0), f64::INFINITY);
    }

    #[test]
    fn mu1_rejects_nonpositive_potential() {
        assert_eq!(mu1(2, 1.0, 1.0, 1.0, 0.5, 0.0).unwrap_err().code(), "POTENTIAL_NONPOSITIVE");
    }

    #[test]
    fn ai_check_edges() {
        assert!(!check_ai(0.5, 0.1, 0.0, 1.0, 3.0, 1.0, 1.0, 0.0).holds);
        let base = check_ai(0.5, 0.1, 0.2, 0.3, 3.0, 1.0, 2.0, 0.1).margin;
        assert!(check_ai(0.5, 0.1, 0.3, 0.3, 3.0, 1.0, 2.0, 0.1).margin < base);
        assert!(check_ai(0.5, 0.1, 0.2, 0.4, 3.0, 1.0, 2.0, 0.1).margin < base);
    }

    #[test]
    fn rho_gamma_condition() {
        let g = 1.5 * PI;
        assert!(check_rho_gamma(0.5, 1.0, g));
        assert!(check_rho_gamma(1e-3, 1e-300, g));
        assert!(!check_rho_gamma(1.0, g.sqrt(), g));
    }

    #[test]
    fn chi_bound_identity() {
        assert_eq!(chi_bound(0.7, 0.0, 0.0, 3.0, 1.0, 1.0, 1.0), 0.0);
        let h = 13.0 * PI / 8.0;
        let (k1, k2) = k_constants(2, 1.0, 1.0, 2.0, 0.8, 0.9, 2.5, h).unwrap();
        let gamma = 0.37;
        let m2 = mu2(2, 1.0, 1.0, h, gamma, 0.4, 1.3, 2.5, k1, k2);
        let chi = chi_bound(gamma * gamma, 0.4, 1.3, 2.5, 0.8, 0.9, 2.0);
        assert!((chi * m2 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn lambda_star_worked_instance() {
        let disk = DomainSpec::disk(1.0).unwrap();
        let geo = Geometry::new(&disk, &[0.0, 0.0], 1.0).unwrap();
        let f = |t: f64| t.powi(3) / 3.0 - t.powi(4) / 4.0;
        let ls = lambda_star(&geo, 1.0, 1.0, &f).unwrap();
        assert!((ls.value - 58.5).abs() < 1e-9);
        assert!((ls.rho_bar - 2.0 / 3.0).abs() < 1e-6);
        assert!((ls.inf_ratio - 9.0).abs() < 1e-10);
        let doubled = lambda_star(&geo, 2.0, 1.0, &f).unwrap();
        assert!((doubled.value - 29.25).abs() < 1e-9);
        let scaled = lambda_star(&geo, 1.0, 1.0, &|t| 3.0 * f(t)).unwrap();
        assert!((scaled.value - 19.5).abs() < 1e-9);
        assert_eq!(lambda_star(&geo, 1.0, 1.0, &|_| 0.0).unwrap_err().code(), "NO_ADMISSIBLE_RHO");
    }

    #[test]
    fn ratio_supremum_at_zero_end() {
        // F(ρ)/ρ² = ρ^{-1/2}: unbounded as ρ → 0⁺, so ρ̄ is pushed towards 0
        let (r, v) = maximize_potential_ratio(&|t: f64| t.powf(1.5), 1.0);
        assert!(r < 1e-3 && v > 30.0);
    }

    #[test]
    fn geometry_rejects_large_balls() {
        let disk = DomainSpec::disk(1.0).unwrap();
        assert!(Geometry::new(&disk, &[0.0, 0.0], 1.0).is_ok());
        assert_eq!(Geometry::new(&disk, &[0.5, 0.0], 0.6).unwrap_err().code(), "PRECONDITION");
        let geo = Geometry::default_for(&DomainSpec::rectangle(&[PI, 2.0]).unwrap());
        assert!((geo.tau - 0.99).abs() < 1e-14);
        assert_eq!(geo.x0, vec![PI / 2.0, 1.0]);
    }
}
