//! The nonlinearity f with its certificates, the weight β, and the energy
//! J_λ = Φ − λΨ on the Galerkin subspace.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::constants::critical_exponent;
use crate::error::{Error, Result};
use crate::function_space::{h_half_norm, SampledBasis, SpectralField};
use crate::spectral_basis::{Basis, DomainSpec};

/// Growth certificate |f(t)| ≤ a1 + a2|t|^{q−1}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Growth {
    pub a1: f64,
    pub a2: f64,
    pub q: f64,
}

/// Subquadratic certificate F(t) ≤ b(1 + |t|^l), l < 2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Subquadratic {
    pub b: f64,
    pub l: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum NonlinearityKind {
    /// c|t|^{q−2}t.
    Power { c: f64, q: f64 },
    /// t^m(ζ − t) for t ≥ 0, zero for t < 0.
    Bump { m: f64, zeta: f64 },
    /// base(t) on (0, ζ], zero elsewhere.
    Truncated { base: Box<NonlinearityKind>, zeta: f64 },
    /// lin·t + cub·t³ on [−clamp, clamp], held constant beyond.
    Cubic { lin: f64, cub: f64, clamp: f64 },
    /// Piecewise-linear interpolant of (t_i, f_i), constant outside the table.
    Tabulated { t: Vec<f64>, f: Vec<f64> },
}

fn powr(t: f64, m: f64) -> f64 {
    if m.fract() == 0.0 && m.abs() < 64.0 {
        t.powi(m as i32)
    } else {
        t.powf(m)
    }
}

impl NonlinearityKind {
    fn f(&self, t: f64) -> f64 {
        match self {
            NonlinearityKind::Power { c, q } => {
                if t == 0.0 {
                    0.0
                } else {
                    c * powr(t.abs(), q - 2.0) * t
                }
            }
            NonlinearityKind::Bump { m, zeta } => {
                if t <= 0.0 {
                    0.0
                } else {
                    powr(t, *m) * (zeta - t)
                }
            }
            NonlinearityKind::Truncated { base, zeta } => {
                if t > 0.0 && t <= *zeta {
                    base.f(t)
                } else {
                    0.0
                }
            }
            NonlinearityKind::Cubic { lin, cub, clamp } => {
                let s = t.clamp(-clamp, *clamp);
                lin * s + cub * s * s * s
            }
            NonlinearityKind::Tabulated { t: ts, f } => interp(ts, f, t),
        }
    }

    fn df(&self, t: f64) -> f64 {
        match self {
            NonlinearityKind::Power { c, q } => {
                if t == 0.0 {
                    if *q == 2.0 {
                        *c
                    } else {
                        0.0
                    }
                } else {
                    c * (q - 1.0) * powr(t.abs(), q - 2.0)
                }
            }
            NonlinearityKind::Bump { m, zeta } => {
                if t <= 0.0 {
                    0.0
                } else {
                    m * powr(t, m - 1.0) * zeta - (m + 1.0) * powr(t, *m)
                }
            }
            NonlinearityKind::Truncated { base, zeta } => {
                if t > 0.0 && t <= *zeta {
                    base.df(t)
                } else {
                    0.0
                }
            }
            NonlinearityKind::Cubic { lin, cub, clamp } => {
                if t.abs() > *clamp {
                    0.0
                } else {
                    lin + 3.0 * cub * t * t
                }
            }
            NonlinearityKind::Tabulated { t: ts, f } => {
                if t <= ts[0] || t >= ts[ts.len() - 1] {
                    return 0.0;
                }
                let i = ts.partition_point(|&x| x <= t) - 1;
                (f[i + 1] - f[i]) / (ts[i + 1] - ts[i])
            }
        }
    }

    /// Closed-form antiderivative vanishing at 0 (tabulated kinds go
    /// through [`Nonlinearity::potential`]).
    fn potential(&self, t: f64) -> f64 {
        match self {
            NonlinearityKind::Power { c, q } => c * powr(t.abs(), *q) / q,
            NonlinearityKind::Bump { m, zeta } => {
                if t <= 0.0 {
                    0.0
                } else {
                    zeta * powr(t, m + 1.0) / (m + 1.0) - powr(t, m + 2.0) / (m + 2.0)
                }
            }
            NonlinearityKind::Truncated { base, zeta } => {
                if t <= 0.0 {
                    0.0
                } else {
                    base.potential(t.min(*zeta))
                }
            }
            NonlinearityKind::Cubic { lin, cub, clamp } => {
                let a = t.abs();
                let s = a.min(*clamp);
                let inner = lin * s * s / 2.0 + cub * s.powi(4) / 4.0;
                if a <= *clamp {
                    inner
                } else {
                    inner + (lin * clamp + cub * clamp.powi(3)) * (a - clamp)
                }
            }
            NonlinearityKind::Tabulated { .. } => unreachable!("tabulated potentials use the cumulative table"),
        }
    }
}

fn interp(ts: &[f64], fs: &[f64], t: f64) -> f64 {
    let last = ts.len() - 1;
    if t <= ts[0] {
        return fs[0];
    }
    if t >= ts[last] {
        return fs[last];
    }
    let i = ts.partition_point(|&x| x <= t) - 1;
    let s = (t - ts[i]) / (ts[i + 1] - ts[i]);
    fs[i] + s * (fs[i + 1] - fs[i])
}

/// f together with the certificates the existence theory consumes.
#[derive(Debug, Clone, PartialEq)]
pub struct Nonlinearity {
    pub kind: NonlinearityKind,
    pub growth: Growth,
    /// inf_{t ≥ 0} F(t) ≥ 0.
    pub sign: bool,
    pub subquadratic: Option<Subquadratic>,
    /// ζ and m where the kind defines them.
    pub zeta: Option<f64>,
    pub m: Option<f64>,
    // tabulated kinds: F at the knots
    cumulative: Vec<f64>,
}

impl Nonlinearity {
    fn build(kind: NonlinearityKind, growth: Growth, sign: bool, sub: Option<Subquadratic>) -> Self {
        let (zeta, m) = match &kind {
            NonlinearityKind::Bump { m, zeta } => (Some(*zeta), Some(*m)),
            NonlinearityKind::Truncated { base, zeta } => match base.as_ref() {
                NonlinearityKind::Bump { m, .. } => (Some(*zeta), Some(*m)),
                _ => (Some(*zeta), None),
            },
            _ => (None, None),
        };
        let cumulative = match &kind {
            NonlinearityKind::Tabulated { t, f } => {
                let mut c = vec![0.0; t.len()];
                for i in 1..t.len() {
                    c[i] = c[i - 1] + 0.5 * (f[i] + f[i - 1]) * (t[i] - t[i - 1]);
                }
                c
            }
            _ => Vec::new(),
        };
        Nonlinearity { kind, growth, sign, subquadratic: sub, zeta, m, cumulative }
    }

    pub fn power(c: f64, q: f64) -> Result<Self> {
        if !(c.is_finite() && q > 1.0) {
            return Err(Error::Invalid(format!("power nonlinearity needs finite c and q > 1, got c = {c}, q = {q}")));
        }
        let sub = if c <= 0.0 {
            Some(Subquadratic { b: 0.0, l: 1.0 })
        } else if q < 2.0 {
            Some(Subquadratic { b: c / q, l: q })
        } else {
            None
        };
        Ok(Self::build(NonlinearityKind::Power { c, q }, Growth { a1: 0.0, a2: c.abs(), q }, c >= 0.0, sub))
    }

    pub fn bump(m: f64, zeta: f64) -> Result<Self> {
        if !(m > 0.0 && zeta > 0.0) {
            return Err(Error::Invalid(format!("bump needs m > 0 and ζ > 0, got m = {m}, ζ = {zeta}")));
        }
        let kind = NonlinearityKind::Bump { m, zeta };
        let top = kind.potential(zeta);
        // ζt^m ≤ ζ(1 + t^{m+1}) splits the growth into a1 + a2 t^{m+1}
        Ok(Self::build(kind, Growth { a1: zeta, a2: 1.0 + zeta, q: m + 2.0 }, false, Some(Subquadratic { b: top, l: 1.0 })))
    }

    /// The bump truncated at its zero ζ: f* = t^m(ζ − t) on (0, ζ].
    pub fn truncated_bump(m: f64, zeta: f64) -> Result<Self> {
        Self::truncate(Self::bump(m, zeta)?, zeta)
    }

    /// base on (0, ζ], zero elsewhere.
    pub fn truncate(base: Nonlinearity, zeta: f64) -> Result<Self> {
        if !(zeta > 0.0) {
            return Err(Error::Invalid(format!("truncation level must be positive, got {zeta}")));
        }
        let kind = NonlinearityKind::Truncated { base: Box::new(base.kind.clone()), zeta };
        let tmp = Self::build(kind.clone(), Growth { a1: 0.0, a2: 0.0, q: 2.0 }, true, None);
        let grid: Vec<f64> = (1..=2048).map(|i| zeta * i as f64 / 2048.0).collect();
        let growth = match base.kind {
            NonlinearityKind::Bump { m, zeta: z } if z >= zeta => Growth { a1: 0.0, a2: z, q: m + 1.0 },
            _ => Growth { a1: grid.iter().map(|&t| tmp.f(t).abs()).fold(0.0, f64::max), a2: 0.0, q: 2.0 },
        };
        let fmin = grid.iter().map(|&t| tmp.potential(t)).fold(f64::INFINITY, f64::min);
        let fmax = grid.iter().map(|&t| tmp.potential(t)).fold(0.0, f64::max);
        Ok(Self::build(kind, growth, fmin >= 0.0, Some(Subquadratic { b: fmax, l: 1.0 })))
    }

    pub fn cubic(lin: f64, cub: f64, clamp: f64) -> Result<Self> {
        if !(lin.is_finite() && cub.is_finite() && clamp > 0.0) {
            return Err(Error::Invalid("cubic nonlinearity needs finite coefficients and clamp > 0".into()));
        }
        let kind = NonlinearityKind::Cubic { lin, cub, clamp };
        let grid: Vec<f64> = (0..=2048).map(|i| clamp * i as f64 / 2048.0).collect();
        let a1 = grid.iter().map(|&t| kind.f(t).abs()).fold(0.0, f64::max);
        let fabs = grid.iter().map(|&t| kind.potential(t).abs()).fold(0.0, f64::max);
        let sign = grid.iter().all(|&t| kind.potential(t) >= 0.0) && kind.f(clamp) >= 0.0;
        let b = fabs + kind.f(clamp).abs();
        Ok(Self::build(kind, Growth { a1, a2: 0.0, q: 2.0 }, sign, Some(Subquadratic { b, l: 1.0 })))
    }

    pub fn tabulated(t: Vec<f64>, f: Vec<f64>) -> Result<Self> {
        if t.len() < 2 || t.len() != f.len() {
            return Err(Error::Invalid("a tabulated nonlinearity needs at least two (t, f) pairs".into()));
        }
        if t.windows(2).any(|w| !(w[1] > w[0])) || t.iter().chain(&f).any(|v| !v.is_finite()) {
            return Err(Error::Invalid("tabulated knots must be finite and strictly increasing".into()));
        }
        if !(t[0] <= 0.0 && t[t.len() - 1] >= 0.0) {
            return Err(Error::Invalid("the tabulated range must contain t = 0".into()));
        }
        let a1 = f.iter().map(|v| v.abs()).fold(0.0, f64::max);
        let kind = NonlinearityKind::Tabulated { t, f };
        let mut nl = Self::build(kind, Growth { a1, a2: 0.0, q: 2.0 }, true, None);
        let (ts, fs) = match &nl.kind {
            NonlinearityKind::Tabulated { t, f } => (t.clone(), f.clone()),
            _ => unreachable!(),
        };
        let last = ts.len() - 1;
        let sign = ts.iter().filter(|&&x| x >= 0.0).all(|&x| nl.potential(x) >= 0.0) && fs[last] >= 0.0;
        let reach = ts[0].abs().max(ts[last].abs());
        let fmax = ts.iter().map(|&x| nl.potential(x).abs()).fold(0.0, f64::max);
        nl.sign = sign;
        nl.subquadratic = Some(Subquadratic { b: fmax + a1 * reach + a1, l: 1.0 });
        Ok(nl)
    }

    /// Replace the default growth certificate.
    pub fn with_growth(mut self, growth: Growth) -> Self {
        self.growth = growth;
        self
    }

    pub fn with_subquadratic(mut self, sub: Option<Subquadratic>) -> Self {
        self.subquadratic = sub;
        self
    }

    pub fn f(&self, t: f64) -> f64 {
        self.kind.f(t)
    }

    pub fn df(&self, t: f64) -> f64 {
        self.kind.df(t)
    }

    /// F(t) = ∫_0^t f.
    pub fn potential(&self, t: f64) -> f64 {
        match &self.kind {
            NonlinearityKind::Tabulated { t: ts, f } => {
                // exact integral of the interpolant, measured from t = 0
                self.cumulative_at(ts, f, t) - self.cumulative_at(ts, f, 0.0)
            }
            other => other.potential(t),
        }
    }

    fn cumulative_at(&self, ts: &[f64], fs: &[f64], t: f64) -> f64 {
        let last = ts.len() - 1;
        if t <= ts[0] {
            return fs[0] * (t - ts[0]);
        }
        if t >= ts[last] {
            return self.cumulative[last] + fs[last] * (t - ts[last]);
        }
        let i = ts.partition_point(|&x| x <= t) - 1;
        let ft = interp(ts, fs, t);
        self.cumulative[i] + 0.5 * (fs[i] + ft) * (t - ts[i])
    }

    /// True when f(0) = 0, so that u = 0 is always a critical point.
    pub fn vanishes_at_zero(&self) -> bool {
        self.f(0.0) == 0.0
    }

    /// True when f ≡ 0 on the real line up to the tabulated/clamped data.
    pub fn is_zero(&self) -> bool {
        match &self.kind {
            NonlinearityKind::Power { c, .. } => *c == 0.0,
            NonlinearityKind::Cubic { lin, cub, .. } => *lin == 0.0 && *cub == 0.0,
            NonlinearityKind::Tabulated { f, .. } => f.iter().all(|v| *v == 0.0),
            _ => false,
        }
    }

    /// f vanishes on (−∞, 0).
    pub fn one_sided(&self) -> bool {
        match &self.kind {
            NonlinearityKind::Bump { .. } | NonlinearityKind::Truncated { .. } => true,
            NonlinearityKind::Tabulated { t, f } => t.iter().zip(f).all(|(t, f)| *t > 0.0 || *f == 0.0),
            _ => false,
        }
    }

    /// Checks 1 < q < 2♯, l < 2 and the growth certificate on a log grid.
    pub fn validate(&self, n: usize) -> Result<()> {
        let crit = critical_exponent(n);
        let g = self.growth;
        if !(g.q > 1.0 && g.q < crit) {
            return Err(Error::GrowthRange { q: g.q, critical: crit });
        }
        if g.a1 < 0.0 || g.a2 < 0.0 {
            return Err(Error::Invalid("growth constants must be nonnegative".into()));
        }
        if let Some(s) = self.subquadratic {
            if !(s.l < 2.0) || s.b < 0.0 {
                return Err(Error::Invalid(format!("subquadratic certificate needs b ≥ 0 and l < 2, got l = {}", s.l)));
            }
        }
        for t in log_grid(1e-6, 1e3, 400) {
            for s in [t, -t] {
                let bound = g.a1 + g.a2 * s.abs().powf(g.q - 1.0);
                if self.f(s).abs() > bound * (1.0 + 1e-12) + 1e-300 {
                    return Err(Error::Invalid(format!(
                        "growth certificate fails at t = {s}: |f| = {} > {bound}",
                        self.f(s).abs()
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Log-spaced points on [lo, hi].
pub fn log_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..count).map(|i| (a + (b - a) * i as f64 / (count - 1) as f64).exp()).collect()
}

/// F(t) for a nonlinearity.
pub fn potential_f(nl: &Nonlinearity, t: f64) -> f64 {
    nl.potential(t)
}

/// The weight β on Ω.
#[derive(Debug, Clone, PartialEq)]
pub enum BetaField {
    Constant(f64),
    /// Values on a uniform grid over `[lo, hi]` (row-major, last axis
    /// fastest), interpolated multilinearly.
    Grid { lo: Vec<f64>, hi: Vec<f64>, shape: Vec<usize>, values: Vec<f64> },
}

impl BetaField {
    pub fn constant(b: f64) -> Result<Self> {
        let beta = BetaField::Constant(b);
        beta.check()?;
        Ok(beta)
    }

    pub fn grid(lo: Vec<f64>, hi: Vec<f64>, shape: Vec<usize>, values: Vec<f64>) -> Result<Self> {
        if lo.len() != hi.len() || lo.len() != shape.len() || shape.iter().any(|&s| s < 2) {
            return Err(Error::Invalid("β grid needs at least two points per axis".into()));
        }
        if shape.iter().product::<usize>() != values.len() {
            return Err(Error::Invalid("β grid shape does not match the number of values".into()));
        }
        let beta = BetaField::Grid { lo, hi, shape, values };
        beta.check()?;
        Ok(beta)
    }

    fn check(&self) -> Result<()> {
        let b0 = self.beta0();
        if !(b0 > 0.0) || !self.beta_inf().is_finite() {
            return Err(Error::Invalid(format!("β must be bounded with positive infimum, got inf β = {b0}")));
        }
        Ok(())
    }

    pub fn beta0(&self) -> f64 {
        match self {
            BetaField::Constant(b) => *b,
            BetaField::Grid { values, .. } => values.iter().copied().fold(f64::INFINITY, f64::min),
        }
    }

    pub fn beta_inf(&self) -> f64 {
        match self {
            BetaField::Constant(b) => *b,
            BetaField::Grid { values, .. } => values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            BetaField::Constant(b) => *b,
            BetaField::Grid { lo, hi, shape, values } => {
                let dim = shape.len();
                let mut base = vec![0usize; dim];
                let mut frac = vec![0.0; dim];
                for d in 0..dim {
                    let s = ((x[d] - lo[d]) / (hi[d] - lo[d]) * (shape[d] - 1) as f64).clamp(0.0, (shape[d] - 1) as f64);
                    let i = (s.floor() as usize).min(shape[d] - 2);
                    base[d] = i;
                    frac[d] = s - i as f64;
                }
                let mut total = 0.0;
                for corner in 0..(1usize << dim) {
                    let mut w = 1.0;
                    let mut flat = 0usize;
                    for d in 0..dim {
                        let bit = (corner >> d) & 1;
                        w *= if bit == 1 { frac[d] } else { 1.0 - frac[d] };
                        flat = flat * shape[d] + base[d] + bit;
                    }
                    if w != 0.0 {
                        total += w * values[flat];
                    }
                }
                total
            }
        }
    }
}

/// A fully specified Galerkin problem A_{1/2}u = λβf(u).
#[derive(Debug, Clone)]
pub struct ProblemInstance {
    domain: DomainSpec,
    basis: Arc<Basis>,
    sampled: Arc<SampledBasis>,
    beta: BetaField,
    nonlinearity: Nonlinearity,
    lambda: f64,
    order: usize,
    // quadrature weight × β at each node
    weighted_beta: DVector<f64>,
}

impl ProblemInstance {
    pub fn new(
        domain: DomainSpec,
        beta: BetaField,
        nonlinearity: Nonlinearity,
        lambda: f64,
        modes: usize,
        order: usize,
    ) -> Result<Self> {
        if !(lambda >= 0.0 && lambda.is_finite()) {
            return Err(Error::Invalid(format!("λ must be finite and nonnegative, got {lambda}")));
        }
        if order < 2 {
            return Err(Error::Invalid("quadrature order must be at least 2".into()));
        }
        nonlinearity.validate(domain.dimension())?;
        let basis = Arc::new(Basis::new(domain.clone(), modes)?);
        let sampled = Arc::new(SampledBasis::new(basis.clone(), order));
        let quad = sampled.quadrature();
        let weighted_beta = DVector::from_iterator(quad.len(), (0..quad.len()).map(|i| quad.weights[i] * beta.eval(quad.point(i))));
        Ok(ProblemInstance { domain, basis, sampled, beta, nonlinearity, lambda, order, weighted_beta })
    }

    /// Same discretisation, different λ.
    pub fn with_lambda(&self, lambda: f64) -> Result<Self> {
        if !(lambda >= 0.0 && lambda.is_finite()) {
            return Err(Error::Invalid(format!("λ must be finite and nonnegative, got {lambda}")));
        }
        let mut out = self.clone();
        out.lambda = lambda;
        Ok(out)
    }

    pub fn domain(&self) -> &DomainSpec {
        &self.domain
    }

    pub fn basis(&self) -> &Arc<Basis> {
        &self.basis
    }

    pub fn sampled(&self) -> &SampledBasis {
        &self.sampled
    }

    pub fn beta(&self) -> &BetaField {
        &self.beta
    }

    pub fn nonlinearity(&self) -> &Nonlinearity {
        &self.nonlinearity
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn modes(&self) -> usize {
        self.basis.len()
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn field(&self, coeffs: &DVector<f64>) -> SpectralField {
        SpectralField::new(self.basis.clone(), coeffs.as_slice().to_vec()).expect("coefficient vector matches the basis")
    }

    pub fn coeffs(&self, u: &SpectralField) -> DVector<f64> {
        assert_eq!(u.len(), self.modes(), "field does not belong to this instance");
        DVector::from_column_slice(u.coeffs())
    }

    pub fn nodal(&self, a: &DVector<f64>) -> DVector<f64> {
        self.sampled.synthesize(a)
    }

    /// Φ = ½ Σ a_j² λ_j^{1/2}.
    pub fn phi(&self, a: &DVector<f64>) -> f64 {
        0.5 * self.x_norm_sq(a)
    }

    pub fn x_norm_sq(&self, a: &DVector<f64>) -> f64 {
        a.iter().zip(self.basis.sqrt_eigenvalues()).map(|(a, s)| a * a * s).sum()
    }

    pub fn x_norm(&self, a: &DVector<f64>) -> f64 {
        self.x_norm_sq(a).sqrt()
    }

    pub fn x_inner(&self, a: &DVector<f64>, b: &DVector<f64>) -> f64 {
        a.iter().zip(b.iter()).zip(self.basis.sqrt_eigenvalues()).map(|((a, b), s)| a * b * s).sum()
    }

    fn psi_nodal(&self, nodal: &DVector<f64>) -> f64 {
        nodal.iter().zip(self.weighted_beta.iter()).map(|(u, w)| w * self.nonlinearity.potential(*u)).sum()
    }

    /// Ψ = ∫ β F(u).
    pub fn psi(&self, a: &DVector<f64>) -> f64 {
        self.psi_nodal(&self.nodal(a))
    }

    pub fn energy(&self, a: &DVector<f64>) -> f64 {
        self.phi(a) - self.lambda * self.psi(a)
    }

    /// ∫ β f(u) φ_j for every mode.
    fn load(&self, nodal: &DVector<f64>) -> DVector<f64> {
        let g = DVector::from_iterator(
            nodal.len(),
            nodal.iter().zip(self.weighted_beta.iter()).map(|(u, w)| w * self.nonlinearity.f(*u)),
        );
        self.sampled.table() * g
    }

    /// J_λ and its X-representer together, sharing one synthesis.
    pub fn energy_and_gradient(&self, a: &DVector<f64>) -> (f64, DVector<f64>) {
        let nodal = self.nodal(a);
        let e = self.phi(a) - self.lambda * self.psi_nodal(&nodal);
        (e, self.representer(a, &nodal))
    }

    fn representer(&self, a: &DVector<f64>, nodal: &DVector<f64>) -> DVector<f64> {
        let load = self.load(nodal);
        let s = self.basis.sqrt_eigenvalues();
        DVector::from_iterator(a.len(), (0..a.len()).map(|j| a[j] - self.lambda * load[j] / s[j]))
    }

    /// Components a_j − λ λ_j^{−1/2} ∫ β f(u) φ_j.
    pub fn gradient(&self, a: &DVector<f64>) -> DVector<f64> {
        self.representer(a, &self.nodal(a))
    }

    pub fn residual(&self, a: &DVector<f64>) -> f64 {
        self.x_norm(&self.gradient(a))
    }

    /// Coordinate Hessian ∂²J/∂a_i∂a_j = δ_ij λ_j^{1/2} − λ ∫ β f'(u) φ_i φ_j.
    pub fn hessian(&self, a: &DVector<f64>) -> DMatrix<f64> {
        let nodal = self.nodal(a);
        let table = self.sampled.table();
        let d: Vec<f64> =
            nodal.iter().zip(self.weighted_beta.iter()).map(|(u, w)| w * self.nonlinearity.df(*u)).collect();
        let mut scaled = table.clone();
        for (k, mut col) in scaled.column_iter_mut().enumerate() {
            col *= d[k];
        }
        let mut h = -self.lambda * (&scaled * table.transpose());
        for (j, s) in self.basis.sqrt_eigenvalues().iter().enumerate() {
            h[(j, j)] += s;
        }
        h
    }
}

/// J_λ(u) = ½‖u‖² − λ ∫ β F(u).
pub fn j_lambda(inst: &ProblemInstance, u: &SpectralField) -> f64 {
    inst.energy(&inst.coeffs(u))
}

/// Riesz representer of J_λ'(u) in the H_0^{1/2} inner product.
pub fn j_gradient(inst: &ProblemInstance, u: &SpectralField) -> SpectralField {
    inst.field(&inst.gradient(&inst.coeffs(u)))
}

/// γ² − λΨ(u) on {Φ ≤ γ²}, J_λ(u) outside.
pub fn truncated_j(inst: &ProblemInstance, gamma: f64, u: &SpectralField) -> f64 {
    let a = inst.coeffs(u);
    let phi = inst.phi(&a);
    if phi <= gamma * gamma {
        gamma * gamma - inst.lambda * inst.psi(&a)
    } else {
        phi - inst.lambda * inst.psi(&a)
    }
}

/// H_0^{1/2}-norm of the gradient representer (a subspace dual norm).
pub fn residual_norm(inst: &ProblemInstance, u: &SpectralField) -> f64 {
    h_half_norm(&j_gradient(inst, u))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::adaptive_simpson;
    use std::f64::consts::PI;

    fn square() -> DomainSpec {
        DomainSpec::rectangle(&[PI, PI]).unwrap()
    }

    #[test]
    fn bump_potential_values() {
        let nl = Nonlinearity::truncated_bump(2.0, 1.0).unwrap();
        assert!((nl.potential(2.0 / 3.0) - 4.0 / 81.0).abs() < 1e-15);
        assert_eq!(nl.potential(0.0), 0.0);
        assert_eq!(nl.potential(1.0), nl.potential(5.0));
        assert_eq!(nl.potential(-3.0), 0.0);
        let q = adaptive_simpson(&|t| nl.f(t), 0.0, 0.8, 1e-12);
        assert!((q - nl.potential(0.8)).abs() < 1e-12);
        assert_eq!(nl.growth, Growth { a1: 0.0, a2: 1.0, q: 3.0 });
        assert!(nl.sign);
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let kinds = [
            Nonlinearity::power(1.5, 3.0).unwrap(),
            Nonlinearity::bump(1.5, 2.0).unwrap(),
            Nonlinearity::truncated_bump(2.0, 1.0).unwrap(),
            Nonlinearity::cubic(1.0, -1.0, 2.0).unwrap(),
        ];
        for nl in &kinds {
            for &t in &[-1.3, 0.2, 0.55, 1.7] {
                let h = 1e-6;
                let fd = (nl.f(t + h) - nl.f(t - h)) / (2.0 * h);
                assert!((nl.df(t) - fd).abs() < 1e-6, "{:?} at {t}", nl.kind);
                let fdp = (nl.potential(t + h) - nl.potential(t - h)) / (2.0 * h);
                assert!((nl.f(t) - fdp).abs() < 1e-6, "{:?} at {t}", nl.kind);
            }
        }
    }

    #[test]
    fn tabulated_potential_matches_quadrature() {
        let t: Vec<f64> = (0..=40).map(|i| -1.0 + 0.1 * i as f64).collect();
        let f: Vec<f64> = t.iter().map(|x| x.sin()).collect();
        let nl = Nonlinearity::tabulated(t, f).unwrap();
        for &x in &[-0.95, -0.3, 0.0, 0.77, 2.5, 4.0] {
            let q = adaptive_simpson(&|s| nl.f(s), 0.0, x, 1e-12);
            assert!((nl.potential(x) - q).abs() < 1e-10, "t = {x}");
        }
    }

    #[test]
    fn certificates_are_validated() {
        // the untruncated m = 2 bump grows like t³, i.e. q = 2♯ in the plane
        let bump = Nonlinearity::bump(2.0, 1.0).unwrap();
        assert_eq!(bump.validate(2).unwrap_err().code(), "GROWTH_RANGE");
        assert!(Nonlinearity::bump(2.0, 1.0).unwrap().validate(3).is_err());
        assert!(Nonlinearity::bump(1.0, 1.0).unwrap().validate(2).is_ok());
        let wrong = Nonlinearity::power(2.0, 3.0).unwrap().with_growth(Growth { a1: 0.0, a2: 1.0, q: 3.0 });
        assert_eq!(wrong.validate(2).unwrap_err().code(), "INVALID");
    }

    #[test]
    fn growth_consequence_on_log_grid() {
        let kinds = [
            Nonlinearity::power(2.0, 2.5).unwrap(),
            Nonlinearity::bump(1.0, 0.5).unwrap(),
            Nonlinearity::truncated_bump(2.0, 1.0).unwrap(),
            Nonlinearity::cubic(1.0, -1.0, 1.5).unwrap(),
        ];
        for nl in &kinds {
            let g = nl.growth;
            for t in log_grid(1e-6, 1e3, 300) {
                for s in [t, -t] {
                    let bound = g.a1 * s.abs() + g.a2 / g.q * s.abs().powf(g.q);
                    assert!(nl.potential(s) <= bound * (1.0 + 1e-12) + 1e-300, "{:?} at {s}", nl.kind);
                }
            }
        }
    }

    #[test]
    fn beta_grid_interpolates() {
        let beta = BetaField::grid(vec![0.0, 0.0], vec![1.0, 2.0], vec![2, 3], vec![1.0, 2.0, 3.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(beta.beta0(), 1.0);
        assert_eq!(beta.beta_inf(), 4.0);
        assert!((beta.eval(&[0.5, 1.0]) - 2.5).abs() < 1e-15);
        assert!((beta.eval(&[1.0, 2.0]) - 4.0).abs() < 1e-15);
        assert!(BetaField::constant(0.0).is_err());
    }

    #[test]
    fn linear_problem_energy() {
        let nl = Nonlinearity::power(1.0, 2.0).unwrap();
        let inst = ProblemInstance::new(square(), BetaField::Constant(1.0), nl, 3.0, 6, 48).unwrap();
        let c = 0.7;
        let u = SpectralField::new(inst.basis().clone(), vec![c, 0.0, 0.0, 0.0, 0.0, 0.0]).unwrap();
        let exact = 0.5 * 2f64.sqrt() * c * c - 0.5 * 3.0 * c * c;
        assert!((j_lambda(&inst, &u) - exact).abs() < 1e-8);
        assert_eq!(j_lambda(&inst, &SpectralField::zeros(inst.basis().clone())), 0.0);
        let free = inst.with_lambda(0.0).unwrap();
        assert!((j_lambda(&free, &u) - 0.5 * h_half_norm(&u).powi(2)).abs() < 1e-15);
    }

    #[test]
    fn eigen_equation_is_a_fixed_point() {
        let nl = Nonlinearity::power(1.0, 2.0).unwrap();
        let inst = ProblemInstance::new(square(), BetaField::Constant(1.0), nl, 2f64.sqrt(), 8, 48).unwrap();
        let u = SpectralField::mode(inst.basis().clone(), 0);
        let g = j_gradient(&inst, &(1.7 * &u));
        assert!(g.coeffs().iter().all(|c| c.abs() < 1e-12));
        assert!(residual_norm(&inst, &u) < 1e-12);
    }

    #[test]
    fn truncated_functional_branches() {
        let nl = Nonlinearity::truncated_bump(2.0, 1.0).unwrap();
        let inst = ProblemInstance::new(DomainSpec::disk(1.0).unwrap(), BetaField::Constant(1.0), nl, 50.0, 8, 32).unwrap();
        let gamma = 0.3;
        let zero = SpectralField::zeros(inst.basis().clone());
        assert_eq!(truncated_j(&inst, gamma, &zero), gamma * gamma);
        let phi1 = SpectralField::mode(inst.basis().clone(), 0);
        let scale = gamma * 2f64.sqrt() / h_half_norm(&phi1);
        let edge = scale * &phi1;
        assert!((truncated_j(&inst, gamma, &edge) - j_lambda(&inst, &edge)).abs() < 1e-12);
        let far = (10.0 * scale) * &phi1;
        assert_eq!(truncated_j(&inst, gamma, &far), j_lambda(&inst, &far));
    }

    #[test]
    fn hessian_matches_gradient_differences() {
        let nl = Nonlinearity::truncated_bump(2.0, 1.0).unwrap();
        let inst = ProblemInstance::new(DomainSpec::disk(1.0).unwrap(), BetaField::Constant(1.0), nl, 80.0, 10, 32).unwrap();
        let a = DVector::from_fn(10, |j, _| 0.4 / (1.0 + j as f64));
        let h = inst.hessian(&a);
        let s = inst.basis().sqrt_eigenvalues().to_vec();
        let eps = 1e-6;
        for k in 0..10 {
            let mut ap = a.clone();
            ap[k] += eps;
            let mut am = a.clone();
            am[k] -= eps;
            let gp = inst.gradient(&ap);
            let gm = inst.gradient(&am);
            for j in 0..10 {
                // coordinate gradient is λ_j^{1/2} times the representer
                let fd = s[j] * (gp[j] - gm[j]) / (2.0 * eps);
                assert!((h[(j, k)] - fd).abs() < 1e-5 * (1.0 + fd.abs()), "({j},{k})");
            }
        }
    }
}
