//! Least-squares exponential decay fits.

/// Fits `value ≈ A·exp(−rate·t)` by least squares on `ln value`, using only
/// samples in the last decade of the time range (`t ≥ t_max / 10`) whose
/// value exceeds `floor`. Returns `None` with fewer than two usable samples.
pub fn tail_decay_rate(times: &[f64], values: &[f64], floor: f64) -> Option<f64> {
    let t_max = times.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let pts: Vec<(f64, f64)> = times
        .iter()
        .zip(values)
        .filter(|(&t, &v)| t >= t_max / 10.0 && v > floor && v.is_finite())
        .map(|(&t, &v)| (t, v.ln()))
        .collect();
    slope(&pts).map(|s| -s)
}

fn slope(pts: &[(f64, f64)]) -> Option<f64> {
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mean_t = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mean_t).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mean_t) * (p.1 - mean_y)).sum();
    Some(sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_exact_exponential() {
        let ts: Vec<f64> = (0..40).map(|k| 0.25 * k as f64).collect();
        let vs: Vec<f64> = ts.iter().map(|t| 3.0 * (-1.7 * t).exp()).collect();
        assert!((tail_decay_rate(&ts, &vs, 1e-12).unwrap() - 1.7).abs() < 1e-12);
    }

    #[test]
    fn floor_excludes_noise() {
        let ts = [1.0, 5.0, 10.0];
        let vs = [1e-13, 1e-14, 1e-15];
        assert!(tail_decay_rate(&ts, &vs, 1e-12).is_none());
    }
}
