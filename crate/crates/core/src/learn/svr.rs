//! Linear support vector regression with an unregularized bias.
//!
//! The primal problem is `min 1/2 |w|^2 + sum_i L(y_i - <w, x_i> - b)` with
//! `L(r) = c_up * max(0, r - eps) + c_low * max(0, -r - eps)`. The
//! epsilon-insensitive loss takes `c_up = c_low = C`; the pinball loss takes
//! `eps = 0`, `c_up = C tau` and `c_low = C (1 - tau)`. Both are solved in the
//! dual by sequential minimal optimization over the `2n` box-constrained
//! variables with second-order working set selection.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::landscape::{l2_inner, FeatureVector};

use super::TrainingSet;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "camelCase", tag = "type"))]
pub enum Loss {
    EpsilonInsensitive,
    Pinball { tau: f64 },
}

/// A linear predictor `f(x) = <w, x> + b` in the feature inner product.
#[derive(Debug, Clone, PartialEq)]
pub struct SvrModel {
    pub weights: FeatureVector,
    pub bias: f64,
    pub c: f64,
    pub epsilon: f64,
    pub loss: Loss,
}

impl SvrModel {
    pub fn predict(&self, query: &FeatureVector) -> Result<f64> {
        Ok(l2_inner(&self.weights, query)? + self.bias)
    }

    /// Primal objective on a training set.
    pub fn objective(&self, train: &TrainingSet) -> Result<f64> {
        let (c_up, c_low, eps) = self.loss_parameters();
        let mut total = 0.5 * l2_inner(&self.weights, &self.weights)?;
        for (x, y) in train.features().iter().zip(train.labels()) {
            let r = y - self.predict(x)?;
            total += c_up * (r - eps).max(0.0) + c_low * (-r - eps).max(0.0);
        }
        Ok(total)
    }

    fn loss_parameters(&self) -> (f64, f64, f64) {
        match self.loss {
            Loss::EpsilonInsensitive => (self.c, self.c, self.epsilon),
            Loss::Pinball { tau } => (self.c * tau, self.c * (1.0 - tau), 0.0),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    /// Stop when the maximal KKT violation falls below this.
    pub tolerance: f64,
    /// Iteration cap, counted in sweeps of `2n` pair updates.
    pub max_sweeps: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions { tolerance: 1e-9, max_sweeps: 100_000 }
    }
}

/// A trained model with the solver's convergence report.
#[derive(Debug, Clone, PartialEq)]
pub struct SvrFit {
    pub model: SvrModel,
    pub converged: bool,
    pub iterations: usize,
    /// Primal minus dual objective at the returned point.
    pub duality_gap: f64,
}

pub fn svr_train(train: &TrainingSet, c: f64, epsilon: f64) -> Result<SvrFit> {
    svr_train_with(train, c, epsilon, Loss::EpsilonInsensitive, SolverOptions::default())
}

pub fn quantile_train(train: &TrainingSet, tau: f64, c: f64) -> Result<SvrFit> {
    svr_train_with(train, c, 0.0, Loss::Pinball { tau }, SolverOptions::default())
}

pub fn svr_train_with(train: &TrainingSet, c: f64, epsilon: f64, loss: Loss, opts: SolverOptions) -> Result<SvrFit> {
    if !(c > 0.0) || !c.is_finite() {
        return Err(Error::domain("cost C must be positive and finite"));
    }
    if !(epsilon >= 0.0) || !epsilon.is_finite() {
        return Err(Error::domain("epsilon must be nonnegative and finite"));
    }
    if let Loss::Pinball { tau } = loss {
        if !(tau > 0.0 && tau < 1.0) {
            return Err(Error::domain("tau must lie in (0, 1)"));
        }
    }
    if train.is_empty() {
        return Err(Error::domain("regression needs a nonempty training set"));
    }
    let mut model = SvrModel { weights: train.features()[0].clone(), bias: 0.0, c, epsilon, loss };
    let (c_up, c_low, eps) = model.loss_parameters();
    let gram = train.gram();
    let sol = smo(&gram, train.labels(), eps, c_up, c_low, opts);

    let mut w = alloc::vec![0.0; model.weights.len()];
    for (beta, x) in sol.beta.iter().zip(train.features()) {
        for (wi, xi) in w.iter_mut().zip(&x.values) {
            *wi += beta * xi;
        }
    }
    model.weights = model.weights.with_values(w)?;
    let residuals: Vec<f64> = train
        .features()
        .iter()
        .zip(train.labels())
        .map(|(x, y)| Ok(y - l2_inner(&model.weights, x)?))
        .collect::<Result<_>>()?;
    model.bias = best_bias(&residuals, c_up, c_low, eps, -sol.rho);
    if !model.bias.is_finite() || model.weights.values.iter().any(|v| !v.is_finite()) {
        return Err(Error::numerical("regression solver produced non-finite weights"));
    }
    let duality_gap = model.objective(train)? + sol.dual_objective;
    Ok(SvrFit { model, converged: sol.converged, iterations: sol.iterations, duality_gap })
}

/// Exact minimizer over `b` of `sum_i L(r_i - b)` for fixed residuals. The
/// objective is convex and piecewise linear with breakpoints `r_i -+ eps`;
/// on a flat minimum the point closest to `hint` is taken.
fn best_bias(residuals: &[f64], c_up: f64, c_low: f64, eps: f64, hint: f64) -> f64 {
    let cost =
        |b: f64| residuals.iter().map(|r| c_up * (r - b - eps).max(0.0) + c_low * (b - r - eps).max(0.0)).sum::<f64>();
    let mut knots: Vec<f64> = residuals.iter().flat_map(|r| [r - eps, r + eps]).collect();
    knots.sort_by(f64::total_cmp);
    let costs: Vec<f64> = knots.iter().map(|b| cost(*b)).collect();
    let best = costs.iter().copied().fold(f64::INFINITY, f64::min);
    let flat = |c: f64| c <= best + 1e-13 * (1.0 + libm::fabs(best));
    let lo = knots.iter().zip(&costs).find(|(_, c)| flat(**c)).map_or(hint, |(b, _)| *b);
    let hi = knots.iter().zip(&costs).rev().find(|(_, c)| flat(**c)).map_or(hint, |(b, _)| *b);
    hint.clamp(lo, hi)
}

struct Solution {
    /// `alpha_i - alpha_{i+n}`: the expansion coefficients of `w`.
    beta: Vec<f64>,
    rho: f64,
    /// Minimal dual value `1/2 a'Qa + p'a`; the primal optimum is its negative.
    dual_objective: f64,
    converged: bool,
    iterations: usize,
}

const TAU: f64 = 1e-12;

fn smo(gram: &[f64], y: &[f64], eps: f64, c_up: f64, c_low: f64, opts: SolverOptions) -> Solution {
    let n = y.len();
    let l = 2 * n;
    let sign = |t: usize| if t < n { 1.0 } else { -1.0 };
    let bound = |t: usize| if t < n { c_up } else { c_low };
    let kernel = |s: usize, t: usize| gram[(s % n) * n + t % n];
    let qbar = |s: usize, t: usize| sign(s) * sign(t) * kernel(s, t);
    let p: Vec<f64> = (0..l).map(|t| if t < n { eps - y[t] } else { eps + y[t - n] }).collect();
    let qd: Vec<f64> = (0..l).map(|t| kernel(t, t)).collect();

    let mut alpha = alloc::vec![0.0; l];
    let mut grad = p.clone();
    let below_upper = |a: &[f64], t: usize| a[t] < bound(t);
    let above_lower = |a: &[f64], t: usize| a[t] > 0.0;
    let dual = |a: &[f64], g: &[f64]| 0.5 * a.iter().zip(g).zip(&p).map(|((a, g), p)| a * (g + p)).sum::<f64>();

    let max_iter = opts.max_sweeps.saturating_mul(l.max(1));
    let mut iterations = 0;
    let mut converged = false;
    let mut last_dual = 0.0f64;
    while iterations < max_iter {
        // i maximizes -y_t G_t over the "up" set
        let mut gmax = f64::NEG_INFINITY;
        let mut i = usize::MAX;
        for (t, &g) in grad.iter().enumerate() {
            let up = if sign(t) > 0.0 { below_upper(&alpha, t) } else { above_lower(&alpha, t) };
            if up && -sign(t) * g >= gmax {
                gmax = -sign(t) * g;
                i = t;
            }
        }
        let mut gmax2 = f64::NEG_INFINITY;
        let mut j = usize::MAX;
        let mut best = f64::INFINITY;
        for t in 0..l {
            let low = if sign(t) > 0.0 { above_lower(&alpha, t) } else { below_upper(&alpha, t) };
            if !low {
                continue;
            }
            let v = sign(t) * grad[t];
            gmax2 = gmax2.max(v);
            if i == usize::MAX {
                continue;
            }
            let diff = gmax + v;
            if diff > 0.0 {
                let mut quad = qd[i] + qd[t] - 2.0 * kernel(i, t);
                if quad <= 0.0 {
                    quad = TAU;
                }
                let obj = -(diff * diff) / quad;
                if obj <= best {
                    best = obj;
                    j = t;
                }
            }
        }
        if gmax + gmax2 < opts.tolerance || j == usize::MAX || i == usize::MAX {
            converged = true;
            break;
        }
        iterations += 1;

        let (old_i, old_j) = (alpha[i], alpha[j]);
        let (ci, cj) = (bound(i), bound(j));
        let qij = qbar(i, j);
        if sign(i) != sign(j) {
            let mut quad = qd[i] + qd[j] + 2.0 * qij;
            if quad <= 0.0 {
                quad = TAU;
            }
            let delta = (-grad[i] - grad[j]) / quad;
            let diff = alpha[i] - alpha[j];
            alpha[i] += delta;
            alpha[j] += delta;
            if diff > 0.0 {
                if alpha[j] < 0.0 {
                    alpha[j] = 0.0;
                    alpha[i] = diff;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = -diff;
            }
            if diff > ci - cj {
                if alpha[i] > ci {
                    alpha[i] = ci;
                    alpha[j] = ci - diff;
                }
            } else if alpha[j] > cj {
                alpha[j] = cj;
                alpha[i] = cj + diff;
            }
        } else {
            let mut quad = qd[i] + qd[j] - 2.0 * qij;
            if quad <= 0.0 {
                quad = TAU;
            }
            let delta = (grad[i] - grad[j]) / quad;
            let sum = alpha[i] + alpha[j];
            alpha[i] -= delta;
            alpha[j] += delta;
            if sum > ci {
                if alpha[i] > ci {
                    alpha[i] = ci;
                    alpha[j] = sum - ci;
                }
            } else if alpha[j] < 0.0 {
                alpha[j] = 0.0;
                alpha[i] = sum;
            }
            if sum > cj {
                if alpha[j] > cj {
                    alpha[j] = cj;
                    alpha[i] = sum - cj;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = sum;
            }
        }
        let (di, dj) = (alpha[i] - old_i, alpha[j] - old_j);
        for (t, g) in grad.iter_mut().enumerate() {
            *g += qbar(i, t) * di + qbar(j, t) * dj;
        }
        if cfg!(debug_assertions) {
            let d = dual(&alpha, &grad);
            debug_assert!(
                d <= last_dual + 1e-9 * (1.0 + libm::fabs(last_dual)),
                "dual objective increased: {last_dual} -> {d}"
            );
            last_dual = d;
        }
    }

    let (mut ub, mut lb, mut sum_free, mut free) = (f64::INFINITY, f64::NEG_INFINITY, 0.0, 0usize);
    for t in 0..l {
        let yg = sign(t) * grad[t];
        let at_upper = alpha[t] >= bound(t);
        let at_lower = alpha[t] <= 0.0;
        if at_upper && at_lower {
            // zero-width box: no information about rho
            continue;
        }
        if at_upper {
            if sign(t) < 0.0 {
                ub = ub.min(yg)
            } else {
                lb = lb.max(yg)
            }
        } else if at_lower {
            if sign(t) > 0.0 {
                ub = ub.min(yg)
            } else {
                lb = lb.max(yg)
            }
        } else {
            free += 1;
            sum_free += yg;
        }
    }
    let rho = if free > 0 { sum_free / free as f64 } else { (ub + lb) / 2.0 };
    let beta = (0..n).map(|i| alpha[i] - alpha[i + n]).collect();
    Solution { beta, rho, dual_objective: dual(&alpha, &grad), converged, iterations }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::persistence::DeathVector;
    use alloc::vec;
    use alloc::vec::Vec;

    fn fv(x: &[f64]) -> FeatureVector {
        let mut v = FeatureVector::from_death_vector(&DeathVector::from_deaths(vec![0.0; x.len()]));
        v.values = x.to_vec();
        v
    }

    fn set(xs: &[Vec<f64>], ys: &[f64]) -> TrainingSet {
        TrainingSet::new(xs.iter().map(|x| fv(x)).collect(), ys.to_vec()).unwrap()
    }

    #[test]
    fn interpolates_a_line() {
        let xs: Vec<Vec<f64>> = (0..10).map(|i| vec![i as f64]).collect();
        let ys: Vec<f64> = (0..10).map(|i| 2.0 * i as f64 + 1.0).collect();
        let fit = svr_train(&set(&xs, &ys), 100.0, 0.0).unwrap();
        assert!(fit.converged);
        for (x, y) in xs.iter().zip(&ys) {
            assert!((fit.model.predict(&fv(x)).unwrap() - y).abs() < 1e-3);
        }
        assert!((fit.model.predict(&fv(&[20.0])).unwrap() - 41.0).abs() < 1e-2);
    }

    #[test]
    fn constant_labels_and_wide_tube() {
        let xs: Vec<Vec<f64>> = (0..6).map(|i| vec![i as f64, (i * i) as f64 * 0.1]).collect();
        let fit = svr_train(&set(&xs, &[3.0; 6]), 10.0, 0.0).unwrap();
        assert!(fit.model.weights.values.iter().all(|w| w.abs() < 1e-6));
        assert!((fit.model.predict(&fv(&[7.0, -2.0])).unwrap() - 3.0).abs() < 1e-5);

        let ys = [0.1, -0.2, 0.3, 0.0, -0.1, 0.2];
        let fit = svr_train(&set(&xs, &ys), 10.0, 1.0).unwrap();
        assert!(fit.model.weights.values.iter().all(|w| *w == 0.0));
        for y in ys {
            assert!((fit.model.predict(&fv(&[0.0, 0.0])).unwrap() - y).abs() <= 1.0);
        }
    }

    #[test]
    fn prediction_is_affine() {
        let model =
            SvrModel { weights: fv(&[0.5, -1.5]), bias: 0.25, c: 1.0, epsilon: 0.0, loss: Loss::EpsilonInsensitive };
        let (q1, q2, a) = ([1.0, 2.0], [-3.0, 0.5], 0.25);
        let mix = fv(&[a * q1[0] + (1.0 - a) * q2[0], a * q1[1] + (1.0 - a) * q2[1]]);
        let lhs = model.predict(&mix).unwrap();
        let rhs = a * model.predict(&fv(&q1)).unwrap() + (1.0 - a) * model.predict(&fv(&q2)).unwrap();
        assert!((lhs - rhs).abs() < 1e-14);
        let zero = SvrModel { weights: fv(&[0.0, 0.0]), bias: 3.0, ..model };
        assert_eq!(zero.predict(&fv(&[9.0, -4.0])).unwrap(), 3.0);
        assert!(zero.predict(&fv(&[1.0])).is_err());
    }

    #[test]
    fn quantiles_of_constant_features() {
        let xs: Vec<Vec<f64>> = vec![vec![1.0]; 100];
        let ys: Vec<f64> = (1..=100).map(f64::from).collect();
        let t = set(&xs, &ys);
        let median = quantile_train(&t, 0.5, 1.0).unwrap();
        let q = median.model.predict(&fv(&[1.0])).unwrap();
        assert!((q - 50.5).abs() <= 1.0, "{q}");
        let low = quantile_train(&t, 0.05, 1.0).unwrap();
        let q = low.model.predict(&fv(&[1.0])).unwrap();
        assert!((q - 5.0).abs() <= 2.0, "{q}");
    }

    #[test]
    fn median_matches_absolute_loss() {
        let xs: Vec<Vec<f64>> = (0..12).map(|i| vec![i as f64 * 0.3, ((i * 7) % 5) as f64]).collect();
        let ys: Vec<f64> =
            (0..12).map(|i| 0.8 * i as f64 * 0.3 - 0.2 * ((i * 7) % 5) as f64 + [0.3, -0.3][i % 2]).collect();
        let t = set(&xs, &ys);
        let a = svr_train(&t, 2.0, 0.0).unwrap().model;
        let b = quantile_train(&t, 0.5, 4.0).unwrap().model;
        for (wa, wb) in a.weights.values.iter().zip(&b.weights.values) {
            assert!((wa - wb).abs() < 1e-6);
        }
        for x in &xs {
            assert!((a.predict(&fv(x)).unwrap() - b.predict(&fv(x)).unwrap()).abs() < 1e-5);
        }
    }

    /// Exact minimum over b for fixed w: the objective is piecewise linear in
    /// b, so it is minimized at a breakpoint.
    fn best_bias_objective(xs: &[Vec<f64>], ys: &[f64], w: [f64; 2], cu: f64, cl: f64, eps: f64) -> f64 {
        let loss = |b: f64| {
            xs.iter()
                .zip(ys)
                .map(|(x, y)| {
                    let r = y - (w[0] * x[0] + w[1] * x[1] + b);
                    cu * (r - eps).max(0.0) + cl * (-r - eps).max(0.0)
                })
                .sum::<f64>()
        };
        let reg = 0.5 * (w[0] * w[0] + w[1] * w[1]);
        xs.iter()
            .zip(ys)
            .flat_map(|(x, y)| {
                let base = y - (w[0] * x[0] + w[1] * x[1]);
                [base - eps, base + eps]
            })
            .map(|b| reg + loss(b))
            .fold(f64::INFINITY, f64::min)
    }

    fn golden(mut lo: f64, mut hi: f64, f: impl Fn(f64) -> f64) -> f64 {
        let g = (5f64.sqrt() - 1.0) / 2.0;
        for _ in 0..120 {
            let a = hi - g * (hi - lo);
            let b = lo + g * (hi - lo);
            if f(a) <= f(b) {
                hi = b;
            } else {
                lo = a;
            }
        }
        f((lo + hi) / 2.0)
    }

    #[test]
    fn tiny_instances_reach_the_brute_force_minimum() {
        let mut state = 0x2545F4914F6CDD1Du64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0
        };
        for case in 0..24 {
            let n = 2 + case % 4;
            let xs: Vec<Vec<f64>> = (0..n).map(|_| vec![next() * 2.0, next() * 2.0]).collect();
            let ys: Vec<f64> = (0..n).map(|_| next() * 3.0).collect();
            let t = set(&xs, &ys);
            let (loss, c, eps) = match case % 3 {
                0 => (Loss::EpsilonInsensitive, 1.0 + 4.0 * next().abs(), 0.0),
                1 => (Loss::EpsilonInsensitive, 0.5 + next().abs(), 0.3 * next().abs()),
                _ => (Loss::Pinball { tau: 0.1 + 0.8 * next().abs() }, 2.0, 0.0),
            };
            let fit = svr_train_with(&t, c, eps, loss, SolverOptions::default()).unwrap();
            let got = fit.model.objective(&t).unwrap();
            let (cu, cl, e) = fit.model.loss_parameters();
            let r = 20.0;
            let oracle = golden(-r, r, |w0| golden(-r, r, |w1| best_bias_objective(&xs, &ys, [w0, w1], cu, cl, e)));
            assert!(fit.converged);
            assert!((got - oracle).abs() <= 1e-6 * (1.0 + oracle.abs()), "case {case}: solver {got}, oracle {oracle}");
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        let t = set(&[vec![0.0], vec![1.0]], &[0.0, 1.0]);
        assert!(svr_train(&t, 0.0, 0.0).is_err());
        assert!(svr_train(&t, 1.0, -0.1).is_err());
        assert!(quantile_train(&t, 1.0, 1.0).is_err());
        assert!(quantile_train(&t, 0.0, 1.0).is_err());
        let empty = TrainingSet::new(Vec::new(), Vec::new()).unwrap();
        assert!(svr_train(&empty, 1.0, 0.0).is_err());
    }
}
