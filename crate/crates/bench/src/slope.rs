use crate::error::{BenchError, Result};

/// Fewest points a slope fit accepts.
pub const MIN_FIT_POINTS: usize = 10;

/// `out[j] = min(values[..=j])`.
pub fn running_minimum(values: &[f64]) -> Vec<f64> {
    let mut best = f64::INFINITY;
    values
        .iter()
        .map(|&v| {
            best = best.min(v);
            best
        })
        .collect()
}

/// Least-squares slope of `log gap` against `log k` over
/// `k_min <= k <= k_max`.
///
/// `points` are `(k, gap)` pairs in increasing `k`. The fit uses the
/// running minimum of the gap taken from the first point, and drops every
/// point whose envelope value is at most `floor`.
pub fn fit_loglog_slope(points: &[(u64, f64)], k_min: u64, k_max: u64, floor: f64) -> Result<f64> {
    if k_min < 1 || k_max <= k_min {
        return Err(BenchError::Invalid(format!(
            "fit window needs 1 <= k_min < k_max, got [{k_min}, {k_max}]"
        )));
    }
    let gaps: Vec<f64> = points.iter().map(|p| p.1).collect();
    let envelope = running_minimum(&gaps);
    let (xs, ys): (Vec<f64>, Vec<f64>) = points
        .iter()
        .zip(&envelope)
        .filter(|((k, _), &g)| (k_min..=k_max).contains(k) && g > floor.max(0.0) && g.is_finite())
        .map(|((k, _), &g)| ((*k as f64).ln(), g.ln()))
        .unzip();
    if xs.len() < MIN_FIT_POINTS {
        return Err(BenchError::InsufficientData {
            found: xs.len(),
            needed: MIN_FIT_POINTS,
        });
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (x, y) in xs.iter().zip(&ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
    }
    Ok(sxy / sxx)
}
