//! Derivative-free minimisers with a shared evaluation budget.
//!
//! Both optimisers stop at the evaluation budget or on a plateau: the best
//! value has not improved by at least `plateau_tol` during the last
//! `plateau_window` evaluations.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StopRule {
    pub max_evaluations: usize,
    pub plateau_window: usize,
    pub plateau_tol: f64,
}

impl StopRule {
    /// Plateau window `50 * dim`, tolerance `1e-9`.
    pub fn for_dim(dim: usize, max_evaluations: usize) -> Self {
        Self { max_evaluations, plateau_window: 50 * dim.max(1), plateau_tol: 1e-9 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    Budget,
    Plateau,
    /// Nothing to optimise (zero parameters).
    NoParameters,
}

/// Records every evaluation and decides when to stop.
pub struct Tracker<F: FnMut(&[f64]) -> f64> {
    f: F,
    rule: StopRule,
    pub trace: Vec<f64>,
    pub best: f64,
    pub best_x: Vec<f64>,
    anchor: (f64, usize),
}

impl<F: FnMut(&[f64]) -> f64> Tracker<F> {
    pub fn new(f: F, rule: StopRule) -> Self {
        Self { f, rule, trace: Vec::new(), best: f64::INFINITY, best_x: Vec::new(), anchor: (f64::INFINITY, 0) }
    }

    pub fn evaluations(&self) -> usize {
        self.trace.len()
    }

    pub fn stop_reason(&self) -> Option<StopReason> {
        if self.trace.len() >= self.rule.max_evaluations {
            Some(StopReason::Budget)
        } else if self.trace.len() - self.anchor.1 >= self.rule.plateau_window {
            Some(StopReason::Plateau)
        } else {
            None
        }
    }

    /// `None` once a stop condition holds; the point is then not evaluated.
    pub fn eval(&mut self, x: &[f64]) -> Option<f64> {
        if self.stop_reason().is_some() {
            return None;
        }
        let v = (self.f)(x);
        self.trace.push(v);
        if v < self.best {
            self.best = v;
            self.best_x = x.to_vec();
        }
        if self.best < self.anchor.0 - self.rule.plateau_tol || !self.anchor.0.is_finite() {
            self.anchor = (self.best, self.trace.len());
        }
        Some(v)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct OptimResult {
    pub best_x: Vec<f64>,
    pub best: f64,
    /// Last iterate (simplex best vertex or SPSA position).
    pub final_x: Vec<f64>,
    pub trace: Vec<f64>,
    pub stop: StopReason,
}

fn finish<F: FnMut(&[f64]) -> f64>(t: Tracker<F>, final_x: Vec<f64>) -> OptimResult {
    let stop = t.stop_reason().unwrap_or(StopReason::Budget);
    OptimResult { best_x: t.best_x, best: t.best, final_x, trace: t.trace, stop }
}

fn zero_dim<F: FnMut(&[f64]) -> f64>(f: F, rule: StopRule) -> OptimResult {
    let mut t = Tracker::new(f, rule);
    t.eval(&[]);
    let mut r = finish(t, Vec::new());
    r.stop = StopReason::NoParameters;
    r
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimplexOptions {
    /// Edge length of the initial (and every restart) simplex.
    pub initial_step: f64,
    /// Simplex is considered collapsed below this diameter.
    pub x_tol: f64,
    /// ... or when vertex values span less than this.
    pub f_tol: f64,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        Self { initial_step: 0.5, x_tol: 1e-10, f_tol: 1e-13 }
    }
}

/// Nelder-Mead with dimension-adapted coefficients. A collapsed simplex is
/// rebuilt around the best point until a stop rule fires.
pub fn nelder_mead<F: FnMut(&[f64]) -> f64>(f: F, x0: &[f64], opts: SimplexOptions, rule: StopRule) -> OptimResult {
    let d = x0.len();
    if d == 0 {
        return zero_dim(f, rule);
    }
    let df = d as f64;
    let (alpha, beta, gamma, delta) = (1.0, 1.0 + 2.0 / df, 0.75 - 1.0 / (2.0 * df), 1.0 - 1.0 / df);
    let mut t = Tracker::new(f, rule);
    let mut centre = x0.to_vec();
    let mut step = opts.initial_step;

    'restart: loop {
        let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(d + 1);
        let Some(v) = t.eval(&centre) else { break };
        simplex.push((centre.clone(), v));
        for i in 0..d {
            let mut x = centre.clone();
            x[i] += step;
            let Some(v) = t.eval(&x) else { break 'restart };
            simplex.push((x, v));
        }
        loop {
            simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
            let spread = simplex[d].1 - simplex[0].1;
            let diameter = simplex[1..]
                .iter()
                .map(|(x, _)| x.iter().zip(&simplex[0].0).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
                .fold(0.0, f64::max);
            if diameter < opts.x_tol || spread.abs() < opts.f_tol {
                centre = simplex[0].0.clone();
                step = (step * 0.5).max(opts.initial_step * 1e-3);
                continue 'restart;
            }
            let mut mean = vec![0.0; d];
            for (x, _) in &simplex[..d] {
                for (m, xi) in mean.iter_mut().zip(x) {
                    *m += xi / df;
                }
            }
            let towards = |c: f64| -> Vec<f64> {
                mean.iter().zip(&simplex[d].0).map(|(m, w)| m + c * (m - w)).collect()
            };
            let xr = towards(alpha);
            let Some(fr) = t.eval(&xr) else { break 'restart };
            if fr < simplex[0].1 {
                let xe = towards(alpha * beta);
                let Some(fe) = t.eval(&xe) else { break 'restart };
                simplex[d] = if fe < fr { (xe, fe) } else { (xr, fr) };
            } else if fr < simplex[d - 1].1 {
                simplex[d] = (xr, fr);
            } else {
                let outside = fr < simplex[d].1;
                let xc = if outside { towards(alpha * gamma) } else { towards(-gamma) };
                let Some(fc) = t.eval(&xc) else { break 'restart };
                if fc < fr.min(simplex[d].1) {
                    simplex[d] = (xc, fc);
                } else {
                    let best = simplex[0].0.clone();
                    for vertex in simplex.iter_mut().skip(1) {
                        let x: Vec<f64> = best.iter().zip(&vertex.0).map(|(b, v)| b + delta * (v - b)).collect();
                        let Some(v) = t.eval(&x) else { break 'restart };
                        *vertex = (x, v);
                    }
                }
            }
        }
    }
    let final_x = t.best_x.clone();
    finish(t, final_x)
}

/// Gain schedule `a_k = a / (k + 1 + big_a)^alpha`, `c_k = c / (k + 1)^gamma`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpsaOptions {
    pub a: f64,
    pub c: f64,
    pub alpha: f64,
    pub gamma: f64,
    pub big_a: f64,
}

impl Default for SpsaOptions {
    fn default() -> Self {
        Self { a: 0.2, c: 0.1, alpha: 0.602, gamma: 0.101, big_a: 20.0 }
    }
}

/// Simultaneous-perturbation stochastic approximation; two evaluations per
/// iteration, Rademacher perturbations drawn from `seed`.
pub fn spsa<F: FnMut(&[f64]) -> f64>(f: F, x0: &[f64], opts: SpsaOptions, rule: StopRule, seed: u64) -> OptimResult {
    let d = x0.len();
    if d == 0 {
        return zero_dim(f, rule);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut t = Tracker::new(f, rule);
    let mut x = x0.to_vec();
    let mut k = 0usize;
    loop {
        let ak = opts.a / (k as f64 + 1.0 + opts.big_a).powf(opts.alpha);
        let ck = opts.c / (k as f64 + 1.0).powf(opts.gamma);
        let delta: Vec<f64> = (0..d).map(|_| if rng.gen::<bool>() { 1.0 } else { -1.0 }).collect();
        let plus: Vec<f64> = x.iter().zip(&delta).map(|(xi, di)| xi + ck * di).collect();
        let minus: Vec<f64> = x.iter().zip(&delta).map(|(xi, di)| xi - ck * di).collect();
        let Some(fp) = t.eval(&plus) else { break };
        let Some(fm) = t.eval(&minus) else { break };
        let g = (fp - fm) / (2.0 * ck);
        for (xi, di) in x.iter_mut().zip(&delta) {
            *xi -= ak * g * di;
        }
        k += 1;
    }
    finish(t, x)
}

/// Highest angle frequency the sequential optimiser resolves per
/// coordinate. Chain-ansatz mixing angles reach frequency 2; phase angles
/// and single-qubit rotations reach 1.
pub const TRIG_ORDER: usize = 2;

/// `a0 + sum_k (a_k cos k phi + b_k sin k phi)`.
#[derive(Clone, Copy, Debug, PartialEq)]
struct TrigPoly {
    a0: f64,
    a: [f64; TRIG_ORDER],
    b: [f64; TRIG_ORDER],
}

impl TrigPoly {
    /// Interpolates values sampled at `phi_m = 2 pi m / (2K + 1)`.
    fn fit(samples: &[f64]) -> Self {
        let m = samples.len() as f64;
        let mut p = Self { a0: samples.iter().sum::<f64>() / m, a: [0.0; TRIG_ORDER], b: [0.0; TRIG_ORDER] };
        for k in 0..TRIG_ORDER {
            for (i, f) in samples.iter().enumerate() {
                let t = 2.0 * std::f64::consts::PI * ((k + 1) * i) as f64 / m;
                p.a[k] += 2.0 / m * f * t.cos();
                p.b[k] += 2.0 / m * f * t.sin();
            }
        }
        p
    }

    /// Value and first two derivatives.
    fn eval(&self, phi: f64) -> (f64, f64, f64) {
        let (mut v, mut d1, mut d2) = (self.a0, 0.0, 0.0);
        for k in 0..TRIG_ORDER {
            let kf = (k + 1) as f64;
            let (s, c) = (kf * phi).sin_cos();
            v += self.a[k] * c + self.b[k] * s;
            d1 += kf * (self.b[k] * c - self.a[k] * s);
            d2 -= kf * kf * (self.a[k] * c + self.b[k] * s);
        }
        (v, d1, d2)
    }

    /// Global minimiser on one period: grid search, then Newton polishing.
    fn argmin(&self) -> f64 {
        const GRID: usize = 360;
        let mut best = (0.0, self.eval(0.0).0);
        for i in 1..GRID {
            let phi = 2.0 * std::f64::consts::PI * i as f64 / GRID as f64;
            let v = self.eval(phi).0;
            if v < best.1 {
                best = (phi, v);
            }
        }
        let mut phi = best.0;
        for _ in 0..20 {
            let (_, d1, d2) = self.eval(phi);
            if d2 <= 0.0 {
                break;
            }
            let next = phi - d1 / d2;
            if self.eval(next).0 > self.eval(phi).0 {
                break;
            }
            phi = next;
            if d1.abs() < 1e-15 {
                break;
            }
        }
        phi
    }
}

/// Exact coordinate minimisation for costs that are trigonometric
/// polynomials of order at most [`TRIG_ORDER`] in every parameter. Each
/// coordinate step samples `2K + 1` equally spaced angles, interpolates, and
/// jumps to the interpolant's minimum. Coordinates are swept in order.
pub fn sequential<F: FnMut(&[f64]) -> f64>(f: F, x0: &[f64], rule: StopRule) -> OptimResult {
    let d = x0.len();
    if d == 0 {
        return zero_dim(f, rule);
    }
    let points = 2 * TRIG_ORDER + 1;
    let mut t = Tracker::new(f, rule);
    let mut x = x0.to_vec();
    'sweep: loop {
        for i in 0..d {
            let centre = x[i];
            let mut samples = Vec::with_capacity(points);
            for m in 0..points {
                let mut y = x.clone();
                y[i] = centre + 2.0 * std::f64::consts::PI * m as f64 / points as f64;
                let Some(v) = t.eval(&y) else { break 'sweep };
                samples.push(v);
            }
            x[i] = crate::profile::wrap_phase(centre + TrigPoly::fit(&samples).argmin());
        }
    }
    finish(t, x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bowl(x: &[f64]) -> f64 {
        x.iter().enumerate().map(|(i, v)| (i as f64 + 1.0) * (v - 0.3).powi(2)).sum::<f64>() - 1.0
    }

    #[test]
    fn simplex_finds_bowl_minimum() {
        let r = nelder_mead(bowl, &[1.0, -1.0, 2.0], SimplexOptions::default(), StopRule::for_dim(3, 5000));
        assert!((r.best + 1.0).abs() < 1e-9, "{}", r.best);
        assert!(r.trace.len() <= 5000);
    }

    #[test]
    fn running_minimum_matches_best() {
        let r = nelder_mead(bowl, &[1.0, 1.0], SimplexOptions::default(), StopRule::for_dim(2, 300));
        let min = r.trace.iter().copied().fold(f64::INFINITY, f64::min);
        assert_eq!(min, r.best);
        assert_eq!(bowl(&r.best_x), r.best);
    }

    #[test]
    fn budget_is_respected() {
        let r = nelder_mead(bowl, &[5.0; 4], SimplexOptions::default(), StopRule::for_dim(4, 37));
        assert_eq!(r.trace.len(), 37);
        assert_eq!(r.stop, StopReason::Budget);
        let r = spsa(bowl, &[5.0; 4], SpsaOptions::default(), StopRule::for_dim(4, 41), 1);
        assert_eq!(r.trace.len(), 41);
    }

    #[test]
    fn plateau_stops_flat_objective() {
        let r = nelder_mead(|_| 3.0, &[0.0, 0.0], SimplexOptions::default(), StopRule::for_dim(2, 10_000));
        assert_eq!(r.stop, StopReason::Plateau);
        // First evaluation sets the anchor, then 100 without improvement.
        assert_eq!(r.trace.len(), 101);
    }

    #[test]
    fn spsa_descends_and_is_deterministic() {
        let run = || spsa(bowl, &[1.0, -1.0], SpsaOptions::default(), StopRule::for_dim(2, 4000), 9);
        let (a, b) = (run(), run());
        assert_eq!(a.trace, b.trace);
        assert!(bowl(&a.final_x) < -0.99, "{}", bowl(&a.final_x));
    }

    #[test]
    fn trig_fit_is_exact_and_minimised() {
        let g = |p: f64| 0.3 + 1.2 * p.cos() - 0.4 * p.sin() + 0.7 * (2.0 * p).cos() + 0.1 * (2.0 * p).sin();
        let samples: Vec<f64> = (0..5).map(|m| g(2.0 * std::f64::consts::PI * m as f64 / 5.0)).collect();
        let poly = TrigPoly::fit(&samples);
        for i in 0..50 {
            let p = i as f64 * 0.13;
            assert!((poly.eval(p).0 - g(p)).abs() < 1e-12);
        }
        let m = poly.argmin();
        let brute = (0..100_000).map(|i| g(i as f64 * 2.0 * std::f64::consts::PI / 100_000.0)).fold(f64::INFINITY, f64::min);
        assert!(g(m) <= brute + 1e-12);
    }

    #[test]
    fn sequential_solves_separable_trig_cost() {
        let f = |x: &[f64]| x.iter().map(|v| (v - 1.0).cos() + 0.5 * (2.0 * v).sin()).sum::<f64>();
        let r = sequential(f, &[0.0; 6], StopRule::for_dim(6, 1000));
        let single = (0..100_000)
            .map(|i| {
                let v = i as f64 * 2.0 * std::f64::consts::PI / 100_000.0;
                (v - 1.0).cos() + 0.5 * (2.0 * v).sin()
            })
            .fold(f64::INFINITY, f64::min);
        assert!((r.best - 6.0 * single).abs() < 1e-9, "{} vs {}", r.best, 6.0 * single);
        assert_eq!(r.stop, StopReason::Plateau);
    }

    #[test]
    fn zero_parameters_evaluate_once() {
        let r = nelder_mead(|_| 2.0, &[], SimplexOptions::default(), StopRule::for_dim(0, 100));
        assert_eq!(r.trace, vec![2.0]);
        assert_eq!(r.stop, StopReason::NoParameters);
    }
}
