//! One-feature logistic regression on a commit's lines-added count.

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::Prediction;
use crate::corpus::Label;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LaOptions {
    /// Use `ln(1 + la)` instead of the raw count.
    pub log_transform: bool,
    /// L2 penalty on both weight and intercept.
    pub lambda: f64,
    pub tolerance: f64,
    pub max_iterations: u32,
}

impl Default for LaOptions {
    fn default() -> Self {
        LaOptions {
            log_transform: true,
            lambda: 1e-4,
            tolerance: 1e-8,
            max_iterations: 10_000,
        }
    }
}

/// `P(buggy | la) = sigmoid(weight * x + intercept)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LaModel {
    pub weight: f64,
    pub intercept: f64,
    pub log_transform: bool,
}

impl LaModel {
    pub fn feature(&self, la: u64) -> f64 {
        feature(la, self.log_transform)
    }

    pub fn probability(&self, la: u64) -> f64 {
        sigmoid(self.weight * self.feature(la) + self.intercept)
    }
}

fn feature(la: u64, log_transform: bool) -> f64 {
    if log_transform {
        libm::log1p(la as f64)
    } else {
        la as f64
    }
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + libm::exp(-z))
    } else {
        let e = libm::exp(z);
        e / (1.0 + e)
    }
}

/// `ln(1 + e^z)` without overflow.
fn softplus(z: f64) -> f64 {
    z.max(0.0) + libm::log1p(libm::exp(-libm::fabs(z)))
}

struct Problem {
    xs: Vec<f64>,
    ys: Vec<f64>,
    lambda: f64,
}

impl Problem {
    /// Penalized log-likelihood.
    fn objective(&self, w: f64, c: f64) -> f64 {
        let ll: f64 = self
            .xs
            .iter()
            .zip(&self.ys)
            .map(|(&x, &y)| {
                let z = w * x + c;
                // y ln s(z) + (1 - y) ln s(-z)
                -(y * softplus(-z) + (1.0 - y) * softplus(z))
            })
            .sum();
        ll - 0.5 * self.lambda * (w * w + c * c)
    }

    /// Gradient and (negated, positive definite) Hessian of the objective.
    fn derivatives(&self, w: f64, c: f64) -> ([f64; 2], [[f64; 2]; 2]) {
        let mut g = [-self.lambda * w, -self.lambda * c];
        let mut h = [[self.lambda, 0.0], [0.0, self.lambda]];
        for (&x, &y) in self.xs.iter().zip(&self.ys) {
            let p = sigmoid(w * x + c);
            let r = y - p;
            g[0] += r * x;
            g[1] += r;
            let v = p * (1.0 - p);
            h[0][0] += v * x * x;
            h[0][1] += v * x;
            h[1][1] += v;
        }
        h[1][0] = h[0][1];
        (g, h)
    }
}

/// Fits the lines-added model by Newton's method with backtracking, stopping
/// once the gradient norm drops below the tolerance.
pub fn train_la(training: &[(u64, Label)], options: &LaOptions) -> LaModel {
    let problem = Problem {
        xs: training.iter().map(|&(la, _)| feature(la, options.log_transform)).collect(),
        ys: training
            .iter()
            .map(|&(_, l)| if l.is_buggy() { 1.0 } else { 0.0 })
            .collect(),
        lambda: options.lambda,
    };
    let (mut w, mut c) = (0.0f64, 0.0f64);
    let mut current = problem.objective(w, c);

    for _ in 0..options.max_iterations {
        let (g, h) = problem.derivatives(w, c);
        if libm::sqrt(g[0] * g[0] + g[1] * g[1]) < options.tolerance {
            break;
        }
        let det = h[0][0] * h[1][1] - h[0][1] * h[1][0];
        let (dw, dc) = if det > 0.0 && det.is_finite() {
            (
                (h[1][1] * g[0] - h[0][1] * g[1]) / det,
                (h[0][0] * g[1] - h[1][0] * g[0]) / det,
            )
        } else {
            (g[0], g[1])
        };

        let mut step = 1.0;
        let mut moved = false;
        while step > 1e-12 {
            let (nw, nc) = (w + step * dw, c + step * dc);
            let next = problem.objective(nw, nc);
            if next >= current {
                w = nw;
                c = nc;
                moved = next > current;
                current = next;
                break;
            }
            step *= 0.5;
        }
        if !moved {
            break;
        }
    }

    LaModel {
        weight: w,
        intercept: c,
        log_transform: options.log_transform,
    }
}

/// Buggy iff the model's probability is at least one half.
pub fn la_classify(model: &LaModel, la: u64) -> Prediction {
    let p = model.probability(la);
    Prediction {
        verdict: if p >= 0.5 { Label::Buggy } else { Label::Clean },
        confidence: p,
        supporting_matches: Vec::new(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn one_class_training_predicts_clean() {
        let training: Vec<(u64, Label)> = (0..50).map(|i| (i * 7, Label::Clean)).collect();
        let model = train_la(&training, &LaOptions::default());
        for la in 0..400 {
            assert!(model.probability(la) < 0.5);
            assert_eq!(la_classify(&model, la).verdict, Label::Clean);
        }
    }

    #[test]
    fn separated_data_classified_correctly() {
        let mut training = Vec::new();
        for la in [1u64, 2, 3, 5, 8, 10, 12, 15] {
            training.push((la, Label::Clean));
        }
        for la in [100u64, 150, 200, 400, 800, 1000] {
            training.push((la, Label::Buggy));
        }
        let model = train_la(&training, &LaOptions::default());
        assert!(model.weight > 0.0);
        for &(la, label) in &training {
            assert_eq!(la_classify(&model, la).verdict, label, "la = {la}");
        }
    }

    #[test]
    fn constant_feature_follows_majority() {
        let mut training = vec![(20u64, Label::Buggy); 7];
        training.extend(vec![(20u64, Label::Clean); 3]);
        let model = train_la(&training, &LaOptions::default());
        let p = model.probability(20);
        assert!((p - 0.7).abs() < 1e-3, "p = {p}");
        assert_eq!(la_classify(&model, 20).verdict, Label::Buggy);
    }

    #[test]
    fn stationary_point_matches_gradient_ascent() {
        // overlapping classes: a plain gradient-ascent fit lands on the same optimum
        let training: Vec<(u64, Label)> = (0..60u64)
            .map(|i| {
                let la = (i * 37) % 300 + 1;
                let buggy = (la > 120 && i % 3 != 0) || i % 11 == 0;
                (la, if buggy { Label::Buggy } else { Label::Clean })
            })
            .collect();
        let options = LaOptions::default();
        let model = train_la(&training, &options);

        let xs: Vec<f64> = training.iter().map(|&(la, _)| libm::log1p(la as f64)).collect();
        let ys: Vec<f64> = training.iter().map(|&(_, l)| if l.is_buggy() { 1.0 } else { 0.0 }).collect();
        let (mut w, mut c) = (0.0f64, 0.0f64);
        for _ in 0..200_000 {
            let (mut gw, mut gc) = (-options.lambda * w, -options.lambda * c);
            for (&x, &y) in xs.iter().zip(&ys) {
                let p = 1.0 / (1.0 + libm::exp(-(w * x + c)));
                gw += (y - p) * x;
                gc += y - p;
            }
            w += 2e-3 * gw;
            c += 2e-3 * gc;
        }
        assert!((model.weight - w).abs() < 1e-4, "{} vs {w}", model.weight);
        assert!((model.intercept - c).abs() < 1e-4, "{} vs {c}", model.intercept);
    }
}
