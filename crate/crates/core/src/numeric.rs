//! Small numerical helpers shared across the statistics.

/// Neumaier-compensated running sum.
///
/// Sliding-window sums add and remove terms of very different magnitude
/// (squared jumps next to squared diffusive increments); the compensation
/// term keeps the window value accurate after large terms leave it.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Compensated sum of an iterator.
pub fn compensated_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut acc = CompensatedSum::new();
    for v in values {
        acc.add(v);
    }
    acc.value()
}

/// 1-based rank of the empirical quantile at probability `p` among `count`
/// sorted values: the `ceil(p * count)`-th order statistic.
pub fn order_statistic_rank(p: f64, count: usize) -> usize {
    // 0.95 * 100 evaluates to 95.00000000000001 in binary floating point
    let raw = (p * count as f64 - 1e-9).ceil();
    (raw.max(1.0) as usize).min(count)
}

/// Left-continuous empirical quantile (`inf { x : F_B(x) >= p }`).
///
/// `values` is sorted in place.
pub fn empirical_quantile(values: &mut [f64], p: f64) -> f64 {
    assert!(!values.is_empty(), "quantile of an empty sample");
    values.sort_by(|a, b| a.total_cmp(b));
    values[order_statistic_rank(p, values.len()) - 1]
}

/// Index of the first maximum (smallest index on ties). NaN never wins.
pub fn argmax_first(values: &[f64]) -> Option<(usize, f64)> {
    let mut best: Option<(usize, f64)> = None;
    for (i, &v) in values.iter().enumerate() {
        match best {
            Some((_, b)) if v <= b || v.is_nan() => {}
            _ if v.is_nan() => {}
            _ => best = Some((i, v)),
        }
    }
    best
}

/// Sup-norm distance between the empirical CDF of `sample` and `cdf`.
pub fn ks_distance<F: Fn(f64) -> f64>(sample: &[f64], cdf: F) -> f64 {
    let mut sorted = sample.to_vec();
    sorted.sort_by(|a, b| a.total_cmp(b));
    let r = sorted.len() as f64;
    sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / r).abs().max(((i + 1) as f64 / r - f).abs())
        })
        .fold(0.0, f64::max)
}
