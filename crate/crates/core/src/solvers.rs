//! Critical points of J_λ: a minimum inside the γ-ball, a global minimum,
//! and a mountain-pass point between two minima.
//!
//! Each stage runs a first-order method until the residual is small and
//! then hands over to Newton's method on J_λ' = 0, which reaches the
//! residual tolerance in a few steps.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::constants::ConstantsBundle;
use crate::energy::ProblemInstance;
use crate::error::{Error, Result};
use crate::function_space::SpectralField;
use crate::test_functions::{project_onto_basis, ConeFunction};

#[derive(Debug, Clone, PartialEq)]
pub struct SolverOptions {
    pub tol_res: f64,
    pub max_iter: usize,
    pub armijo_c: f64,
    pub backtrack: f64,
    pub initial_step: f64,
    /// Residual below which Newton refinement is attempted.
    pub newton_switch: f64,
    pub max_newton: usize,
    pub seed: u64,
    /// Random starts per radius in the global search.
    pub restarts: usize,
    pub path_nodes: usize,
    pub mp_max_iter: usize,
    /// Redistribute path nodes every this many iterations.
    pub redistribute_every: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            tol_res: 1e-8,
            max_iter: 100_000,
            armijo_c: 1e-4,
            backtrack: 0.5,
            initial_step: 1.0,
            newton_switch: 1.0,
            max_newton: 60,
            seed: 0,
            restarts: 1,
            path_nodes: 40,
            mp_max_iter: 20_000,
            redistribute_every: 10,
        }
    }
}

/// A point with small residual, and how it was reached.
#[derive(Debug, Clone, PartialEq)]
pub struct CriticalPoint {
    pub coeffs: DVector<f64>,
    pub energy: f64,
    pub phi: f64,
    pub residual: f64,
    pub iterations: usize,
    pub newton_steps: usize,
}

impl CriticalPoint {
    fn at(inst: &ProblemInstance, coeffs: DVector<f64>, iterations: usize, newton_steps: usize) -> Self {
        let (energy, g) = inst.energy_and_gradient(&coeffs);
        CriticalPoint { phi: inst.phi(&coeffs), residual: inst.x_norm(&g), energy, coeffs, iterations, newton_steps }
    }

    pub fn field(&self, inst: &ProblemInstance) -> SpectralField {
        inst.field(&self.coeffs)
    }
}

fn project(inst: &ProblemInstance, a: DVector<f64>, radius: Option<f64>) -> DVector<f64> {
    match radius {
        Some(r) => {
            let limit = (1.0 - 1e-9) * r;
            let n = inst.x_norm(&a);
            if n > limit {
                a * (limit / n)
            } else {
                a
            }
        }
        None => a,
    }
}

/// Newton on J_λ' = 0 with a residual line search; the Hessian must stay
/// positive definite, so the limit is a strict local minimum.
fn newton(inst: &ProblemInstance, start: &DVector<f64>, opts: &SolverOptions) -> Option<(DVector<f64>, usize)> {
    let s = DVector::from_column_slice(inst.basis().sqrt_eigenvalues());
    let mut a = start.clone();
    let mut g = inst.gradient(&a);
    let mut res = inst.x_norm(&g);
    let mut steps = 0;
    for _ in 0..opts.max_newton {
        if res < 1e-3 * opts.tol_res {
            break;
        }
        let h = inst.hessian(&a);
        h.clone().cholesky()?;
        let rhs = -g.component_mul(&s);
        let delta = match h.lu().solve(&rhs) {
            Some(d) if d.iter().all(|v| v.is_finite()) => d,
            _ => return None,
        };
        let mut t = 1.0;
        let mut accepted = false;
        for _ in 0..30 {
            let trial = &a + t * &delta;
            let tg = inst.gradient(&trial);
            let tr = inst.x_norm(&tg);
            if tr < (1.0 - 1e-4 * t) * res {
                a = trial;
                g = tg;
                res = tr;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        steps += 1;
        if !accepted {
            break;
        }
    }
    if res < opts.tol_res {
        Some((a, steps))
    } else {
        None
    }
}

/// Armijo descent, optionally projected onto the ball of X-radius `radius`.
fn descend(inst: &ProblemInstance, start: &DVector<f64>, opts: &SolverOptions, radius: Option<f64>) -> Result<CriticalPoint> {
    let mut a = project(inst, start.clone(), radius);
    let mut last_newton = f64::INFINITY;
    for it in 0..opts.max_iter {
        let (e, g) = inst.energy_and_gradient(&a);
        let res = inst.x_norm(&g);
        if res < opts.tol_res {
            return Ok(CriticalPoint::at(inst, a, it, 0));
        }
        if res < opts.newton_switch && res < 0.5 * last_newton {
            last_newton = res;
            if let Some((c, steps)) = newton(inst, &a, opts) {
                let inside = radius.is_none_or(|r| inst.x_norm(&c) < (1.0 - 1e-9) * r);
                if inside && inst.energy(&c) <= e + 1e-12 * (1.0 + e.abs()) {
                    return Ok(CriticalPoint::at(inst, c, it, steps));
                }
            }
        }
        let mut t = opts.initial_step;
        let mut moved = false;
        while t > 1e-20 {
            let trial = project(inst, &a - t * &g, radius);
            let step = &a - &trial;
            let decrease = opts.armijo_c * inst.x_inner(&g, &step);
            if inst.energy(&trial) <= e - decrease {
                if let Some(r) = radius {
                    let on_edge = inst.x_norm(&trial) >= (1.0 - 1e-8) * r;
                    if on_edge && inst.x_norm(&step) < opts.tol_res {
                        return Err(Error::BoundaryMinimum { residual: res });
                    }
                }
                a = trial;
                moved = true;
                break;
            }
            t *= opts.backtrack;
        }
        if !moved {
            return Err(Error::NoConvergence { iterations: it, residual: res });
        }
    }
    let res = inst.residual(&a);
    Err(Error::NoConvergence { iterations: opts.max_iter, residual: res })
}

/// Interior critical point in {Φ < γ²} by projected Armijo descent.
pub fn minimize_in_ball(inst: &ProblemInstance, gamma: f64, init: &DVector<f64>, opts: &SolverOptions) -> Result<CriticalPoint> {
    if !(gamma > 0.0) {
        return Err(Error::Invalid(format!("γ must be positive, got {gamma}")));
    }
    descend(inst, init, opts, Some(2f64.sqrt() * gamma))
}

/// Unconstrained descent from one start.
pub fn minimize(inst: &ProblemInstance, init: &DVector<f64>, opts: &SolverOptions) -> Result<CriticalPoint> {
    descend(inst, init, opts, None)
}

/// The projected cone scaled to X-norm `norm` (or unscaled when `None`).
pub fn cone_start(inst: &ProblemInstance, bundle: &ConstantsBundle, norm: Option<f64>) -> Result<DVector<f64>> {
    let geo = &bundle.geometry;
    let cone = ConeFunction::new(inst.domain(), &geo.x0, geo.tau, bundle.rho)?;
    let p = project_onto_basis(&cone, inst.basis(), inst.order());
    let mut a = inst.coeffs(&p.field);
    if let Some(n) = norm {
        let cur = inst.x_norm(&a);
        if cur > 0.0 {
            a *= n / cur;
        }
    }
    Ok(a)
}

/// One start of the global search and where it ended.
#[derive(Debug, Clone, PartialEq)]
pub struct StartOutcome {
    pub label: String,
    pub energy: Option<f64>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GlobalResult {
    pub point: CriticalPoint,
    pub start: String,
    pub outcomes: Vec<StartOutcome>,
    /// Whether Φ(w) > γ² was asserted (hypotheses held).
    pub asserted_outside: bool,
}

/// Best of several unconstrained descents: the projected cone, random
/// fields at radii {½, 1, 2, 4}·√2γ, and 0.
pub fn global_minimize(
    inst: &ProblemInstance,
    bundle: &ConstantsBundle,
    opts: &SolverOptions,
) -> Result<GlobalResult> {
    let n = inst.modes();
    let base = 2f64.sqrt() * bundle.gamma;
    let mut starts: Vec<(String, DVector<f64>)> = vec![("cone".into(), cone_start(inst, bundle, None)?)];
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let s = inst.basis().sqrt_eigenvalues();
    for &scale in &[0.5, 1.0, 2.0, 4.0] {
        for r in 0..opts.restarts.max(1) {
            let mut a = DVector::from_fn(n, |j, _| {
                let z: f64 = StandardNormal.sample(&mut rng);
                z * s[0] / s[j]
            });
            let norm = inst.x_norm(&a);
            if norm > 0.0 {
                a *= scale * base / norm;
            }
            starts.push((format!("random[{scale}x,{r}]"), a));
        }
    }
    starts.push(("zero".into(), DVector::zeros(n)));

    let mut best: Option<(CriticalPoint, String)> = None;
    let mut outcomes = Vec::new();
    let mut first_err = None;
    for (label, a0) in starts {
        match minimize(inst, &a0, opts) {
            Ok(cp) => {
                outcomes.push(StartOutcome { label: label.clone(), energy: Some(cp.energy), error: None });
                if best.as_ref().is_none_or(|(b, _)| cp.energy < b.energy) {
                    best = Some((cp, label));
                }
            }
            Err(e) => {
                outcomes.push(StartOutcome { label, energy: None, error: Some(e.code().into()) });
                first_err.get_or_insert(e);
            }
        }
    }
    let (point, start) = match best {
        Some(b) => b,
        None => return Err(first_err.unwrap_or(Error::NoConvergence { iterations: 0, residual: f64::NAN })),
    };
    let asserted = certified(inst, bundle) && inst.nonlinearity().subquadratic.is_some();
    if asserted && point.phi <= bundle.gamma * bundle.gamma {
        return Err(Error::TheoremViolation(format!(
            "global minimum has Φ = {} ≤ γ² = {}",
            point.phi,
            bundle.gamma * bundle.gamma
        )));
    }
    Ok(GlobalResult { point, start, outcomes, asserted_outside: asserted })
}

/// The bundle certifies this instance: it was built for the same F and
/// holds at the instance's λ.
pub fn certified(inst: &ProblemInstance, bundle: &ConstantsBundle) -> bool {
    let f_rho = inst.nonlinearity().potential(bundle.rho);
    let same = (f_rho - bundle.f_rho).abs() <= 1e-12 * bundle.f_rho.abs().max(f64::MIN_POSITIVE);
    same && bundle.guarantees(inst.lambda())
}

/// δ_dist = 1e-3 · max(1, ‖w1‖, ‖w2‖).
pub fn distinct_tolerance(inst: &ProblemInstance, w1: &DVector<f64>, w2: &DVector<f64>) -> f64 {
    1e-3 * inst.x_norm(w1).max(inst.x_norm(w2)).max(1.0)
}

/// `count` points at equal X-arclength along a polyline.
fn resample(inst: &ProblemInstance, line: &[DVector<f64>], count: usize) -> Vec<DVector<f64>> {
    let p = line.len() - 1;
    let mut cum = vec![0.0; p + 1];
    for i in 1..=p {
        cum[i] = cum[i - 1] + inst.x_norm(&(&line[i] - &line[i - 1]));
    }
    let total = cum[p];
    let mut out = Vec::with_capacity(count);
    let mut seg = 0;
    for i in 0..count {
        if i == 0 || p == 0 || !(total > 0.0) {
            out.push(line[0].clone());
            continue;
        }
        if i == count - 1 {
            out.push(line[p].clone());
            continue;
        }
        let target = total * i as f64 / (count - 1) as f64;
        while seg + 1 < p && cum[seg + 1] < target {
            seg += 1;
        }
        let len = cum[seg + 1] - cum[seg];
        let s = if len > 0.0 { (target - cum[seg]) / len } else { 0.0 };
        out.push(&line[seg] + s * (&line[seg + 1] - &line[seg]));
    }
    out
}

// Rebuild the path so that node `k` moves to index p/2 with equal spacing
// on either side.
fn recenter(inst: &ProblemInstance, nodes: &[DVector<f64>], k: usize) -> Vec<DVector<f64>> {
    let p = nodes.len() - 1;
    let half = p / 2;
    let mut out = resample(inst, &nodes[..=k], half + 1);
    out.extend(resample(inst, &nodes[k..], p - half + 1).into_iter().skip(1));
    out
}

/// Highest point of J on the two segments adjacent to `nodes[k]`, by golden
/// section in the polyline parameter s ∈ [−1, 1].
fn local_peak(inst: &ProblemInstance, nodes: &[DVector<f64>], k: usize) -> (DVector<f64>, f64) {
    let point = |s: f64| {
        if s < 0.0 {
            &nodes[k] + (-s) * (&nodes[k - 1] - &nodes[k])
        } else {
            &nodes[k] + s * (&nodes[k + 1] - &nodes[k])
        }
    };
    let invphi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut lo, mut hi) = (-1.0, 1.0);
    let mut c = hi - invphi * (hi - lo);
    let mut d = lo + invphi * (hi - lo);
    let (mut fc, mut fd) = (inst.energy(&point(c)), inst.energy(&point(d)));
    for _ in 0..40 {
        if fc > fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - invphi * (hi - lo);
            fc = inst.energy(&point(c));
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + invphi * (hi - lo);
            fd = inst.energy(&point(d));
        }
    }
    let s = 0.5 * (lo + hi);
    let a = point(s);
    let e = inst.energy(&a);
    let e0 = inst.energy(&nodes[k]);
    if e >= e0 {
        (a, e)
    } else {
        (nodes[k].clone(), e0)
    }
}

/// Position t ∈ (0, 1) of the highest point of J on the segment w1 + t(w2 − w1).
fn segment_peak(inst: &ProblemInstance, w1: &DVector<f64>, w2: &DVector<f64>) -> f64 {
    const SCAN: usize = 512;
    let at = |t: f64| inst.energy(&(w1 + t * (w2 - w1)));
    let mut best = (0.5, f64::NEG_INFINITY);
    for i in 1..SCAN {
        let t = i as f64 / SCAN as f64;
        let e = at(t);
        if e > best.1 {
            best = (t, e);
        }
    }
    // the barrier may sit inside the first or last scan cell
    for end in [0.0, 1.0] {
        let mut t = if end == 0.0 { 1.0 / SCAN as f64 } else { 1.0 - 1.0 / SCAN as f64 };
        for _ in 0..40 {
            t = 0.5 * (t + end);
            let e = at(t);
            if e > best.1 {
                best = (t, e);
            }
        }
    }
    best.0
}

/// Trust-region Newton for a saddle of Morse index one: in X-orthonormal
/// coordinates the step is Newton's along every Hessian eigenvector except
/// the lowest, along which it ascends. `radius` caps the first step.
fn saddle_newton(inst: &ProblemInstance, start: &DVector<f64>, opts: &SolverOptions, radius: f64) -> Option<(DVector<f64>, usize)> {
    let s = DVector::from_column_slice(inst.basis().sqrt_eigenvalues());
    let root = s.map(f64::sqrt);
    let mut a = start.clone();
    let mut g = inst.gradient(&a);
    let mut res = inst.x_norm(&g);
    let mut trust = radius;
    let mut steps = 0;
    while steps < 4 * opts.max_newton && res >= 1e-3 * opts.tol_res && trust > 1e-14 * (1.0 + inst.x_norm(&a)) {
        let mut h = inst.hessian(&a);
        for i in 0..h.nrows() {
            for j in 0..h.ncols() {
                h[(i, j)] /= root[i] * root[j];
            }
        }
        let eig = h.symmetric_eigen();
        let gc = g.component_mul(&root);
        let low = eig.eigenvalues.imin();
        let mut dc = DVector::zeros(gc.len());
        for (i, mu) in eig.eigenvalues.iter().enumerate() {
            let v = eig.eigenvectors.column(i);
            let coef = v.dot(&gc) / mu.abs().max(1e-10);
            if i == low {
                dc += coef * v;
            } else {
                dc -= coef * v;
            }
        }
        let len = dc.norm();
        if len > trust {
            dc *= trust / len;
        }
        let trial = &a + dc.component_div(&root);
        let tg = inst.gradient(&trial);
        let tr = inst.x_norm(&tg);
        steps += 1;
        if tr < res {
            a = trial;
            g = tg;
            res = tr;
            trust = (2.0 * trust).max(2.0 * len.min(trust));
        } else {
            trust = 0.25 * len.min(trust);
        }
    }
    if res < opts.tol_res {
        Some((a, steps))
    } else {
        None
    }
}

/// Third critical point between two distinct minima by a discrete
/// mountain-pass path, refined with Newton's method.
pub fn mountain_pass(
    inst: &ProblemInstance,
    w1: &DVector<f64>,
    w2: &DVector<f64>,
    opts: &SolverOptions,
) -> Result<CriticalPoint> {
    let delta = distinct_tolerance(inst, w1, w2);
    if inst.x_norm(&(w1 - w2)) <= delta {
        return Err(Error::Precondition("mountain pass needs two distinct endpoints".into()));
    }
    for w in [w1, w2] {
        let r = inst.residual(w);
        if !(r < opts.tol_res) {
            return Err(Error::Precondition(format!("endpoint is not critical (residual {r})")));
        }
    }
    let p = opts.path_nodes.max(2);
    // linear path, with the middle node on the highest point of the segment
    let peak = segment_peak(inst, w1, w2);
    let half = p / 2;
    let mut nodes: Vec<DVector<f64>> = (0..=p)
        .map(|i| {
            let t = if i <= half {
                peak * i as f64 / half as f64
            } else {
                peak + (1.0 - peak) * (i - half) as f64 / (p - half) as f64
            };
            w1 + t * (w2 - w1)
        })
        .collect();
    let mut energies: Vec<f64> = nodes.iter().map(|a| inst.energy(a)).collect();
    let floor = energies[0].max(energies[p]);
    let qualifies = |c: &DVector<f64>| {
        inst.energy(c) >= floor - 1e-9 && inst.x_norm(&(c - w1)) > delta && inst.x_norm(&(c - w2)) > delta
    };
    let mut step = opts.initial_step;
    let mut last_newton = f64::INFINITY;
    let argmax = |energies: &[f64]| {
        let mut k = 1;
        for i in 2..p {
            if energies[i] > energies[k] {
                k = i;
            }
        }
        k
    };
    let half = p / 2;
    for it in 0..opts.mp_max_iter {
        let k = argmax(&energies);
        if k != half {
            nodes = recenter(inst, &nodes, k);
            for i in 1..p {
                energies[i] = inst.energy(&nodes[i]);
            }
        }
        let (peak, peak_e) = local_peak(inst, &nodes, half);
        nodes[half] = peak;
        energies[half] = peak_e;
        if peak_e <= floor + 1e-14 * (1.0 + floor.abs()) {
            return Err(Error::MountainPassCollapse);
        }
        let (e, g) = inst.energy_and_gradient(&nodes[half]);
        let res = inst.x_norm(&g);
        if res < opts.tol_res && qualifies(&nodes[half]) {
            return Ok(CriticalPoint::at(inst, nodes[half].clone(), it, 0));
        }
        if res < opts.newton_switch && res < 0.5 * last_newton {
            last_newton = res;
            let room = inst.x_norm(&(&nodes[half] - w1)).min(inst.x_norm(&(&nodes[half] - w2)));
            if let Some((c, steps)) = saddle_newton(inst, &nodes[half], opts, 0.5 * room) {
                if qualifies(&c) {
                    return Ok(CriticalPoint::at(inst, c, it, steps));
                }
            }
        }
        // descend across the path; along it the node already sits at the top
        let tangent = &nodes[half + 1] - &nodes[half - 1];
        let tn = inst.x_norm(&tangent);
        let dir = if tn > 0.0 { &g - (inst.x_inner(&g, &tangent) / (tn * tn)) * &tangent } else { g.clone() };
        let dn = inst.x_norm(&dir);
        let room = inst.x_norm(&(&nodes[half] - w1)).min(inst.x_norm(&(&nodes[half] - w2)));
        let mut t = (2.0 * step).min(opts.initial_step).min(0.25 * room / dn.max(1e-300));
        loop {
            let trial = &nodes[half] - t * &dir;
            let te = inst.energy(&trial);
            if te <= e - opts.armijo_c * t * dn * dn {
                nodes[half] = trial;
                energies[half] = te;
                step = t;
                break;
            }
            t *= opts.backtrack;
            if t < 1e-20 {
                return Err(Error::NoConvergence { iterations: it, residual: res });
            }
        }
        if inst.x_norm(&(&nodes[half] - w1)) <= delta || inst.x_norm(&(&nodes[half] - w2)) <= delta {
            return Err(Error::MountainPassCollapse);
        }
        if (it + 1) % opts.redistribute_every.max(1) == 0 {
            nodes = recenter(inst, &nodes, half);
            for i in 1..p {
                energies[i] = inst.energy(&nodes[i]);
            }
        }
    }
    let k = argmax(&energies);
    Err(Error::NoConvergence { iterations: opts.mp_max_iter, residual: inst.residual(&nodes[k]) })
}

/// One reported critical point.
#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub label: &'static str,
    pub coeffs: DVector<f64>,
    pub energy: f64,
    pub phi: f64,
    pub residual: f64,
    pub norm: f64,
    pub trace_max: f64,
    pub trace_min: f64,
    pub trivial: bool,
    pub nonnegative: bool,
    pub inside_ball: bool,
    pub iterations: usize,
    pub newton_steps: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StageFailure {
    pub stage: &'static str,
    pub code: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub lambda: f64,
    pub gamma: f64,
    /// λ ∈ (μ1, μ2) with every hypothesis certified.
    pub guaranteed: bool,
    pub solutions: Vec<Solution>,
    /// X-distances between solutions, in `solutions` order.
    pub distances: DMatrix<f64>,
    pub tol_zero: f64,
    pub delta_dist: f64,
    pub distinct_nontrivial: usize,
    pub failures: Vec<StageFailure>,
    pub notes: Vec<String>,
    pub global_starts: Vec<StartOutcome>,
    pub bundle: ConstantsBundle,
}

impl SolveReport {
    pub fn solution(&self, label: &str) -> Option<&Solution> {
        self.solutions.iter().find(|s| s.label == label)
    }

    /// The failure that decides the exit status, if any stage failed.
    pub fn first_failure(&self) -> Option<&StageFailure> {
        self.failures.first()
    }
}

fn describe(inst: &ProblemInstance, label: &'static str, cp: &CriticalPoint, gamma: f64, tol_zero: f64) -> Solution {
    let nodal = inst.nodal(&cp.coeffs);
    let trace_max = nodal.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let trace_min = nodal.iter().copied().fold(f64::INFINITY, f64::min);
    let scale = nodal.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let norm = inst.x_norm(&cp.coeffs);
    Solution {
        label,
        coeffs: cp.coeffs.clone(),
        energy: cp.energy,
        phi: cp.phi,
        residual: cp.residual,
        norm,
        trace_max,
        trace_min,
        trivial: norm < tol_zero,
        nonnegative: trace_min >= -1e-6 * scale,
        inside_ball: cp.phi < gamma * gamma,
        iterations: cp.iterations,
        newton_steps: cp.newton_steps,
    }
}

fn failure(stage: &'static str, e: &Error) -> StageFailure {
    StageFailure { stage, code: e.code().into(), message: e.to_string() }
}

/// Runs the three stages and classifies what they found. Stage errors are
/// recorded in the report; only invalid inputs abort.
pub fn solve_three(inst: &ProblemInstance, bundle: &ConstantsBundle, opts: &SolverOptions) -> Result<SolveReport> {
    let gamma = bundle.gamma;
    let lambda = inst.lambda();
    let tol_zero = 1e-8 * 2f64.sqrt() * gamma;
    let guaranteed = certified(inst, bundle);
    let mut notes = Vec::new();
    let mut failures = Vec::new();
    if !guaranteed {
        notes.push("exploratory mode: the hypotheses of the three-solution statement are not all certified".into());
    }
    if lambda >= bundle.mu2 {
        notes.push(format!("λ = {lambda} ≥ μ2 = {}: the interior-minimum guarantee lapses", bundle.mu2));
    }
    if inst.nonlinearity().subquadratic.is_none() {
        notes.push("no subquadratic certificate: a global minimum may not exist".into());
    }
    let mut points: Vec<(&'static str, CriticalPoint)> = Vec::new();

    let start = cone_start(inst, bundle, Some(0.1 * 2f64.sqrt() * gamma))?;
    let w1 = match minimize_in_ball(inst, gamma, &start, opts) {
        Ok(cp) => Some(cp),
        Err(e) => {
            failures.push(failure("local_minimum", &e));
            None
        }
    };
    if let Some(cp) = &w1 {
        points.push(("w1", cp.clone()));
    }
    let mut global_starts = Vec::new();
    let w2 = if lambda == 0.0 {
        notes.push("λ = 0: the energy is Φ and zero is its only critical point".into());
        None
    } else {
        match global_minimize(inst, bundle, opts) {
            Ok(g) => {
                global_starts = g.outcomes.clone();
                Some(g.point)
            }
            Err(e) => {
                failures.push(failure("global_minimum", &e));
                None
            }
        }
    };
    if let Some(cp) = &w2 {
        points.push(("w2", cp.clone()));
    }
    if let (Some(a), Some(b)) = (&w1, &w2) {
        let delta = distinct_tolerance(inst, &a.coeffs, &b.coeffs);
        if inst.x_norm(&(&a.coeffs - &b.coeffs)) > delta {
            match mountain_pass(inst, &a.coeffs, &b.coeffs, opts) {
                Ok(cp) => points.push(("w3", cp)),
                Err(e) => failures.push(failure("mountain_pass", &e)),
            }
        } else {
            notes.push("local and global minima coincide: no mountain-pass stage".into());
        }
    }

    let solutions: Vec<Solution> = points.iter().map(|(l, cp)| describe(inst, l, cp, gamma, tol_zero)).collect();
    let m = solutions.len();
    let distances = DMatrix::from_fn(m, m, |i, j| inst.x_norm(&(&solutions[i].coeffs - &solutions[j].coeffs)));
    let delta_dist = if m >= 2 {
        distinct_tolerance(inst, &solutions[0].coeffs, &solutions[1].coeffs)
    } else {
        1e-3 * solutions.first().map_or(1.0, |s| s.norm.max(1.0))
    };
    let mut counted: Vec<usize> = Vec::new();
    for (i, s) in solutions.iter().enumerate() {
        if s.trivial || counted.iter().any(|&c| distances[(c, i)] <= delta_dist) {
            continue;
        }
        counted.push(i);
    }
    for i in 0..m {
        for j in (i + 1)..m {
            if distances[(i, j)] <= delta_dist && !(solutions[i].trivial && solutions[j].trivial) {
                notes.push(format!("{} and {} are not distinct (distance {})", solutions[i].label, solutions[j].label, distances[(i, j)]));
            }
        }
    }
    if counted.len() < 2 {
        notes.push("multiplicity not exhibited".into());
    }
    if inst.nonlinearity().one_sided() {
        for s in &solutions {
            if !s.nonnegative {
                notes.push(format!("{} has a negative trace minimum {}", s.label, s.trace_min));
            }
        }
    }
    Ok(SolveReport {
        lambda,
        gamma,
        guaranteed,
        solutions,
        distances,
        tol_zero,
        delta_dist,
        distinct_nontrivial: counted.len(),
        failures,
        notes,
        global_starts,
        bundle: bundle.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::energy::{BetaField, Nonlinearity};
    use crate::spectral_basis::DomainSpec;
    use std::f64::consts::PI;

    fn square() -> DomainSpec {
        DomainSpec::rectangle(&[PI, PI]).unwrap()
    }

    #[test]
    fn zero_nonlinearity_minimises_to_zero() {
        let nl = Nonlinearity::power(0.0, 2.0).unwrap();
        let inst = ProblemInstance::new(square(), BetaField::Constant(1.0), nl, 5.0, 6, 24).unwrap();
        let a0 = DVector::from_fn(6, |j, _| 0.01 * (j as f64 + 1.0));
        let cp = minimize_in_ball(&inst, 0.5, &a0, &SolverOptions::default()).unwrap();
        assert!(cp.coeffs.norm() < 1e-9);
        let cp = minimize(&inst, &(a0 * 100.0), &SolverOptions::default()).unwrap();
        assert!(cp.coeffs.norm() < 1e-9);
    }

    #[test]
    fn double_well_saddle_is_zero() {
        // f(t) = λ-scaled t − t³ on one mode: minima at ±a*, saddle at 0
        let nl = Nonlinearity::cubic(1.0, -1.0, 10.0).unwrap();
        let lambda = 2.0 * 2f64.sqrt();
        let inst = ProblemInstance::new(square(), BetaField::Constant(1.0), nl, lambda, 1, 48).unwrap();
        let a_star = ((lambda - 2f64.sqrt()) * 4.0 * PI * PI / (9.0 * lambda)).sqrt();
        let opts = SolverOptions::default();
        let plus = minimize(&inst, &DVector::from_element(1, 1.0), &opts).unwrap();
        let minus = minimize(&inst, &DVector::from_element(1, -1.0), &opts).unwrap();
        assert!((plus.coeffs[0] - a_star).abs() < 1e-6, "{} vs {a_star}", plus.coeffs[0]);
        assert!((minus.coeffs[0] + a_star).abs() < 1e-6);
        let mp = mountain_pass(&inst, &minus.coeffs, &plus.coeffs, &opts).unwrap();
        assert!(mp.coeffs[0].abs() < 1e-9);
        assert!(mp.energy.abs() < 1e-12 && mp.energy >= plus.energy.max(minus.energy));
    }

    #[test]
    fn identical_endpoints_are_refused() {
        let nl = Nonlinearity::cubic(1.0, -1.0, 10.0).unwrap();
        let inst = ProblemInstance::new(square(), BetaField::Constant(1.0), nl, 1.0, 1, 16).unwrap();
        let z = DVector::zeros(1);
        assert_eq!(mountain_pass(&inst, &z, &z, &SolverOptions::default()).unwrap_err().code(), "PRECONDITION");
    }
}
