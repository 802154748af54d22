//! Small numeric kernels: compensated summation, log-sum-exp, bisection,
//! and the standard normal CDF.
//!
//! Everything here is deterministic and evaluated in a fixed order so
//! results are bit-reproducible for identical inputs on one build.

/// Neumaier (improved Kahan) compensated summation.
///
/// Used wherever a sum participates in a conservation check or a
/// probability normalizer; the compensation keeps accumulated error near
/// one ulp of the true sum instead of growing with the number of terms.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct RunningSum {
    sum: f64,
    compensation: f64,
}

impl RunningSum {
    pub(crate) fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub(crate) fn add(&mut self, value: f64) {
        let t = self.sum + value;
        if self.sum.abs() >= value.abs() {
            self.compensation += (self.sum - t) + value;
        } else {
            self.compensation += (value - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub(crate) fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

#[cfg(test)]
pub(crate) fn compensated_sum(values: &[f64]) -> f64 {
    let mut acc = RunningSum::new();
    for &v in values {
        acc.add(v);
    }
    acc.value()
}

/// log(sum(exp(terms))) with max subtraction.
///
/// `-inf` terms contribute nothing; if every term is `-inf` the result is
/// `-inf`. Finite results are produced whenever the true value is
/// representable, no matter how large the individual terms are.
pub(crate) fn log_sum_exp(terms: impl Iterator<Item = f64> + Clone) -> f64 {
    let max = terms
        .clone()
        .fold(f64::NEG_INFINITY, |m, t| if t > m { t } else { m });
    if max == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    let mut acc = RunningSum::new();
    for t in terms {
        acc.add((t - max).exp());
    }
    max + acc.value().ln()
}

/// Bisection for a strictly decreasing function with `f(lo) > 0 > f(hi)`.
///
/// Iterates until the bracket collapses to floating-point resolution, so
/// the returned midpoint is accurate to about one ulp of the root.
pub(crate) fn bisect_decreasing(mut lo: f64, mut hi: f64, f: impl Fn(f64) -> f64) -> f64 {
    debug_assert!(lo < hi);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break; // bracket exhausted at f64 resolution
        }
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Standard normal CDF via the complementary error function.
pub(crate) fn normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / std::f64::consts::SQRT_2)
}
