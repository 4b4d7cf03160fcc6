//! The optimal decision boundary between two univariate Gaussian classes.
//!
//! For one-dimensional data with class densities f₁, f₂ and priors π₁, π₂,
//! the probability of misclassifying at a cut point x* is
//! `(1 − F₁(x*)) π₁ + F₂(x*) π₂`. Setting its derivative to zero gives the
//! stationarity condition `f₁(x*) π₁ = f₂(x*) π₂` — the boundary sits where
//! the scaled densities cross. In log form that condition is a quadratic in
//! x, solved here in closed form.

use crate::gaussian::std_normal_cdf;
use crate::{Error, Result};

/// One univariate Gaussian class: mean, variance, prior.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnivariateClass {
    pub mean: f64,
    pub variance: f64,
    pub prior: f64,
}

/// A pair of univariate Gaussian classes with the first mean below the
/// second and priors summing to one.
#[derive(Debug, Clone, Copy)]
pub struct UnivariateClassPair {
    lower: UnivariateClass,
    upper: UnivariateClass,
}

impl UnivariateClassPair {
    pub fn new(lower: UnivariateClass, upper: UnivariateClass) -> Result<Self> {
        if !(lower.mean < upper.mean) {
            return Err(Error::Shape(
                "the first class mean must be strictly below the second".into(),
            ));
        }
        if !(lower.variance > 0.0) || !(upper.variance > 0.0) {
            return Err(Error::Shape("variances must be positive".into()));
        }
        let sum = lower.prior + upper.prior;
        if !(lower.prior > 0.0) || !(upper.prior > 0.0) || (sum - 1.0).abs() > 1e-12 {
            return Err(Error::PriorSumInvalid { sum });
        }
        Ok(Self { lower, upper })
    }

    pub fn lower(&self) -> &UnivariateClass {
        &self.lower
    }

    pub fn upper(&self) -> &UnivariateClass {
        &self.upper
    }
}

/// Misclassification probability of cutting at `x`:
/// `(1 − F₁(x)) π₁ + F₂(x) π₂`, with everything below `x` labeled class 1
/// and everything above labeled class 2.
pub fn error_probability(pair: &UnivariateClassPair, x: f64) -> f64 {
    let z1 = (x - pair.lower.mean) / pair.lower.variance.sqrt();
    let z2 = (x - pair.upper.mean) / pair.upper.variance.sqrt();
    (1.0 - std_normal_cdf(z1)) * pair.lower.prior + std_normal_cdf(z2) * pair.upper.prior
}

/// Solution of the boundary equation.
#[derive(Debug, Clone)]
pub struct OptimalBoundary {
    /// The crossing point minimizing the error probability.
    pub x_star: f64,
    /// Every real root of `ln(f₁π₁) = ln(f₂π₂)`. Unequal variances can
    /// produce a second, far crossing; it is reported here for diagnosis.
    pub roots: Vec<f64>,
    /// Error probability at `x_star`.
    pub error_probability: f64,
}

/// Finds the boundary x* with `f₁(x*) π₁ = f₂(x*) π₂` that minimizes the
/// misclassification probability.
///
/// The log form of the condition is `a x² + b x + c = 0`; with equal
/// variances it degenerates to a line with the closed-form root
/// `(μ₁+μ₂)/2 + σ² ln(π₁/π₂)/(μ₂−μ₁)`. Roots are computed with the
/// cancellation-safe `q = −½(b + sign(b)√disc)` form. When the discriminant
/// is negative the scaled densities never meet and [`Error::NoCrossing`] is
/// returned instead of a fabricated point.
pub fn optimal_boundary(pair: &UnivariateClassPair) -> Result<OptimalBoundary> {
    let (m1, v1, p1) = (pair.lower.mean, pair.lower.variance, pair.lower.prior);
    let (m2, v2, p2) = (pair.upper.mean, pair.upper.variance, pair.upper.prior);

    // ln f₁ + ln π₁ − ln f₂ − ln π₂ = 0, expanded in powers of x.
    let a = 0.5 / v2 - 0.5 / v1;
    let b = m1 / v1 - m2 / v2;
    let c = 0.5 * m2 * m2 / v2 - 0.5 * m1 * m1 / v1 + 0.5 * (v2 / v1).ln() + (p1 / p2).ln();

    let roots = if a == 0.0 {
        // Equal variances: single linear crossing.
        vec![-c / b]
    } else {
        let disc = b * b - 4.0 * a * c;
        if disc < 0.0 {
            return Err(Error::NoCrossing);
        }
        let sqrt_disc = disc.sqrt();
        let q = -0.5 * (b + b.signum() * sqrt_disc);
        if q == 0.0 {
            vec![0.0]
        } else {
            let r1 = q / a;
            let r2 = c / q;
            if (r1 - r2).abs() <= f64::EPSILON * (r1.abs() + r2.abs()) {
                vec![r1]
            } else {
                vec![r1.min(r2), r1.max(r2)]
            }
        }
    };

    let in_span = |x: f64| x > m1 && x < m2;
    let mut best = roots[0];
    for &root in &roots[1..] {
        let (e_best, e_root) = (error_probability(pair, best), error_probability(pair, root));
        if e_root < e_best || (e_root == e_best && in_span(root) && !in_span(best)) {
            best = root;
        }
    }
    Ok(OptimalBoundary {
        x_star: best,
        error_probability: error_probability(pair, best),
        roots,
    })
}
