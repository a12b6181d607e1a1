//! Gauss-Legendre rules and the domain quadratures built from them.

use std::f64::consts::PI;

/// A one-dimensional rule on [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    /// `order`-point rule; roots of P_order found by Newton from the
    /// Chebyshev-like initial guesses.
    pub fn new(order: usize) -> Self {
        assert!(order >= 1, "Gauss-Legendre order must be positive");
        let n = order;
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..n.div_ceil(2) {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        GaussLegendre { nodes, weights }
    }

    /// Nodes and weights mapped affinely onto [a, b].
    pub fn on_interval(&self, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let x = self.nodes.iter().map(|t| mid + half * t).collect();
        let w = self.weights.iter().map(|w| half * w).collect();
        (x, w)
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Nodes and weights on the domain, flattened as `dim` coordinates per node.
///
/// Tensor rules additionally remember their per-axis factorisation so that
/// separable integrands can be evaluated axis by axis.
#[derive(Debug, Clone)]
pub struct DomainQuadrature {
    pub dim: usize,
    pub points: Vec<f64>,
    pub weights: Vec<f64>,
    pub layout: QuadratureLayout,
}

#[derive(Debug, Clone)]
pub enum QuadratureLayout {
    /// Row-major tensor product of per-axis rules (last axis fastest).
    Tensor { axes: Vec<(Vec<f64>, Vec<f64>)> },
    /// Radius-major polar rule: Gauss-Legendre in r (weights include r),
    /// trapezoid in θ.
    Polar { radii: Vec<f64>, radial_weights: Vec<f64>, angles: Vec<f64> },
}

impl DomainQuadrature {
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i * self.dim..(i + 1) * self.dim]
    }

    pub fn integrate<F: FnMut(&[f64]) -> f64>(&self, mut f: F) -> f64 {
        (0..self.len()).map(|i| self.weights[i] * f(self.point(i))).sum()
    }

    pub fn tensor(lengths: &[f64], orders: &[usize]) -> Self {
        assert_eq!(lengths.len(), orders.len());
        let dim = lengths.len();
        let axes: Vec<(Vec<f64>, Vec<f64>)> = lengths
            .iter()
            .zip(orders)
            .map(|(&l, &o)| GaussLegendre::new(o).on_interval(0.0, l))
            .collect();
        let total: usize = orders.iter().product();
        let mut points = Vec::with_capacity(total * dim);
        let mut weights = Vec::with_capacity(total);
        let mut idx = vec![0usize; dim];
        for _ in 0..total {
            let mut w = 1.0;
            for (d, &i) in idx.iter().enumerate() {
                points.push(axes[d].0[i]);
                w *= axes[d].1[i];
            }
            weights.push(w);
            for d in (0..dim).rev() {
                idx[d] += 1;
                if idx[d] < orders[d] {
                    break;
                }
                idx[d] = 0;
            }
        }
        DomainQuadrature { dim, points, weights, layout: QuadratureLayout::Tensor { axes } }
    }

    /// Disk of `radius` centred at the origin.
    pub fn polar(radius: f64, radial_order: usize, angular_points: usize) -> Self {
        let (r, wr) = GaussLegendre::new(radial_order).on_interval(0.0, radius);
        let radial_weights: Vec<f64> = r.iter().zip(&wr).map(|(r, w)| r * w).collect();
        let dtheta = 2.0 * PI / angular_points as f64;
        let angles: Vec<f64> = (0..angular_points).map(|l| l as f64 * dtheta).collect();
        let mut points = Vec::with_capacity(2 * r.len() * angular_points);
        let mut weights = Vec::with_capacity(r.len() * angular_points);
        for (ri, wi) in r.iter().zip(&radial_weights) {
            for th in &angles {
                points.push(ri * th.cos());
                points.push(ri * th.sin());
                weights.push(wi * dtheta);
            }
        }
        DomainQuadrature {
            dim: 2,
            points,
            weights,
            layout: QuadratureLayout::Polar { radii: r, radial_weights, angles },
        }
    }
}

/// Adaptive Simpson quadrature of a scalar function on [a, b].
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    fn step<F: Fn(f64) -> f64>(
        f: &F,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: usize,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = f(lm);
        let frm = f(rm);
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
            + step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    }
    if a == b {
        return 0.0;
    }
    let fa = f(a);
    let fb = f(b);
    let fm = f(0.5 * (a + b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    step(f, a, b, fa, fm, fb, whole, tol, 48)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_is_exact_for_polynomials() {
        let rule = GaussLegendre::new(8);
        for deg in 0..16 {
            let q: f64 = rule.nodes.iter().zip(&rule.weights).map(|(x, w)| w * x.powi(deg)).sum();
            let exact = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
            assert!((q - exact).abs() < 1e-14, "degree {deg}");
        }
    }

    #[test]
    fn high_order_rule_is_accurate() {
        let (x, w) = GaussLegendre::new(64).on_interval(0.0, PI);
        let q: f64 = x.iter().zip(&w).map(|(x, w)| w * x.sin()).sum();
        assert!((q - 2.0).abs() < 1e-14);
        assert!((w.iter().sum::<f64>() - PI).abs() < 1e-13);
    }

    #[test]
    fn polar_rule_area_and_moments() {
        let q = DomainQuadrature::polar(2.0, 16, 32);
        assert!((q.integrate(|_| 1.0) - 4.0 * PI).abs() < 1e-12);
        // ∫ x² over the disk of radius R is πR⁴/4
        assert!((q.integrate(|p| p[0] * p[0]) - 4.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn tensor_rule_volume() {
        let q = DomainQuadrature::tensor(&[1.0, 2.0, 3.0], &[3, 4, 5]);
        assert_eq!(q.len(), 60);
        assert!((q.integrate(|_| 1.0) - 6.0).abs() < 1e-13);
        assert!((q.integrate(|p| p[0] * p[1] * p[2]) - 0.5 * 2.0 * 4.5).abs() < 1e-12);
    }

    #[test]
    fn simpson_integrates_smooth_functions() {
        let v = adaptive_simpson(&|t: f64| t.exp(), 0.0, 1.0, 1e-12);
        assert!((v - (1f64.exp() - 1.0)).abs() < 1e-11);
    }
}
