//! Discrete distributions on `{0, ..., n}` and the closed-form laws built from them.

use crate::error::{ConfigError, Result};

/// Normalization tolerance for every [`Pmf`].
pub const PMF_TOLERANCE: f64 = 1e-9;

/// Probability mass function on `{0, ..., len-1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Pmf {
    probs: Vec<f64>,
}

impl Pmf {
    /// Validates a vector that is already a distribution.
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(ConfigError::InvalidPmf("empty support".into()));
        }
        if let Some((k, p)) = probs.iter().enumerate().find(|(_, p)| !(0.0..=1.0).contains(*p)) {
            return Err(ConfigError::InvalidPmf(format!("entry {k} = {p} is outside [0, 1]")));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > PMF_TOLERANCE {
            return Err(ConfigError::InvalidPmf(format!("entries sum to {total}")));
        }
        Ok(Self { probs })
    }

    /// Normalizes nonnegative weights.
    pub fn from_weights(weights: Vec<f64>) -> Result<Self> {
        if let Some((k, w)) = weights.iter().enumerate().find(|(_, w)| !(**w >= 0.0 && w.is_finite())) {
            return Err(ConfigError::InvalidPmf(format!("weight {k} = {w} is negative or not finite")));
        }
        let total: f64 = weights.iter().sum();
        if total <= 0.0 {
            return Err(ConfigError::InvalidPmf("weights sum to zero".into()));
        }
        Ok(Self {
            probs: weights.into_iter().map(|w| w / total).collect(),
        })
    }

    /// All mass at `at`, on support `{0, ..., max}`.
    pub fn point(max: usize, at: usize) -> Self {
        assert!(at <= max, "point mass at {at} outside 0..={max}");
        let mut probs = vec![0.0; max + 1];
        probs[at] = 1.0;
        Self { probs }
    }

    /// Wraps the output of an exact recursion. Round-off below `1e-12` is clamped; anything
    /// larger is a bug and panics.
    pub(crate) fn assemble(mut probs: Vec<f64>) -> Self {
        for p in probs.iter_mut() {
            assert!(*p > -1e-12 && *p < 1.0 + 1e-12, "probability {p} out of range");
            *p = p.clamp(0.0, 1.0);
        }
        let total: f64 = probs.iter().sum();
        assert!((total - 1.0).abs() <= PMF_TOLERANCE, "recursion lost mass: sum = {total}");
        Self { probs }
    }

    /// `P(X = k)`, zero outside the support.
    pub fn get(&self, k: usize) -> f64 {
        self.probs.get(k).copied().unwrap_or(0.0)
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// Largest representable value.
    pub fn max_value(&self) -> usize {
        self.probs.len() - 1
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.probs.iter().copied().enumerate()
    }

    pub fn mean(&self) -> f64 {
        self.iter().map(|(k, p)| k as f64 * p).sum()
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }

    /// `E[f(X)]`.
    pub fn expect(&self, mut f: impl FnMut(usize) -> f64) -> f64 {
        self.iter().filter(|(_, p)| *p > 0.0).map(|(k, p)| p * f(k)).sum()
    }

    /// Largest absolute entrywise difference, padding the shorter support with zeros.
    pub fn max_abs_diff(&self, other: &Pmf) -> f64 {
        let n = self.probs.len().max(other.probs.len());
        (0..n).map(|k| (self.get(k) - other.get(k)).abs()).fold(0.0, f64::max)
    }
}

/// `C(n, k)` as a float, by the multiplicative formula.
pub fn binomial_coefficient(n: u32, k: u32) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (1..=k).fold(1.0, |acc, m| acc * (n - k + m) as f64 / m as f64)
}

/// `P(X = k)` for `X ~ Binomial(n, p)`.
pub fn binomial_pmf(n: u32, p: f64, k: u32) -> f64 {
    if k > n {
        return 0.0;
    }
    // 0^0 = 1 handles the degenerate p = 0 and p = 1 cases.
    binomial_coefficient(n, k) * p.powi(k as i32) * (1.0 - p).powi((n - k) as i32)
}

/// Binomial law as a [`Pmf`] on `{0, ..., n}`.
pub fn binomial(n: u32, p: f64) -> Pmf {
    Pmf::assemble((0..=n).map(|k| binomial_pmf(n, p, k)).collect())
}

/// `P(X = k)` when drawing `draws` items without replacement from `population`
/// items of which `marked` are marked.
pub fn hypergeometric_pmf(population: u32, marked: u32, draws: u32, k: u32) -> f64 {
    if marked > population || draws > population || k > marked || k > draws || draws - k > population - marked {
        return 0.0;
    }
    binomial_coefficient(marked, k) * binomial_coefficient(population - marked, draws - k)
        / binomial_coefficient(population, draws)
}

/// Poisson probabilities `P(X = 0..len)` computed by the ratio recursion.
pub fn poisson_head(mean: f64, len: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(len);
    let mut term = (-mean).exp();
    for k in 0..len {
        out.push(term);
        term *= mean / (k + 1) as f64;
    }
    out
}
