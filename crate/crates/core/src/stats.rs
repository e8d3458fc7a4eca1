//! Descriptive statistics over per-run results.

use statrs::distribution::{ContinuousCDF, Normal};

/// Arithmetic mean, summed in slice order. `NaN` for an empty slice.
pub fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Sample standard deviation (divisor `n - 1`); 0 for fewer than two values.
pub fn sample_std(values: &[f64]) -> f64 {
    let n = values.len();
    if n < 2 {
        return 0.0;
    }
    let m = mean(values);
    let ss: f64 = values.iter().map(|v| (v - m) * (v - m)).sum();
    (ss / (n - 1) as f64).sqrt()
}

/// Percentile `q` in `[0, 1]` of an ascending-sorted slice, interpolating
/// linearly between closest ranks (position `q (n - 1)`).
pub fn percentile_sorted(sorted: &[f64], q: f64) -> f64 {
    assert!(!sorted.is_empty(), "percentile of an empty sample");
    let pos = q.clamp(0.0, 1.0) * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    if lo == hi {
        sorted[lo]
    } else {
        sorted[lo] + (sorted[hi] - sorted[lo]) * frac
    }
}

pub fn sorted_copy(values: &[f64]) -> Vec<f64> {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    v
}

/// Two-sided Mann-Whitney U test p-value using the normal approximation with
/// tie and continuity corrections. Returns 1 when every observation is tied.
pub fn mann_whitney_p(a: &[f64], b: &[f64]) -> f64 {
    let (n1, n2) = (a.len(), b.len());
    if n1 == 0 || n2 == 0 {
        return 1.0;
    }
    let mut pooled: Vec<(f64, bool)> = a
        .iter()
        .map(|&v| (v, true))
        .chain(b.iter().map(|&v| (v, false)))
        .collect();
    pooled.sort_by(|x, y| x.0.total_cmp(&y.0));

    let n = pooled.len();
    let mut rank_sum_a = 0.0;
    let mut tie_term = 0.0;
    let mut i = 0;
    while i < n {
        let mut j = i + 1;
        while j < n && pooled[j].0 == pooled[i].0 {
            j += 1;
        }
        // ranks i+1 ..= j share their average
        let avg_rank = (i + 1 + j) as f64 / 2.0;
        let t = (j - i) as f64;
        tie_term += t * t * t - t;
        rank_sum_a += pooled[i..j].iter().filter(|e| e.1).count() as f64 * avg_rank;
        i = j;
    }

    let (n1f, n2f, nf) = (n1 as f64, n2 as f64, n as f64);
    let u1 = rank_sum_a - n1f * (n1f + 1.0) / 2.0;
    let mu = n1f * n2f / 2.0;
    let var = n1f * n2f / 12.0 * ((nf + 1.0) - tie_term / (nf * (nf - 1.0)));
    if var <= 0.0 {
        return 1.0;
    }
    let z = ((u1 - mu).abs() - 0.5).max(0.0) / var.sqrt();
    let normal = Normal::standard();
    (2.0 * normal.sf(z)).min(1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_sample() {
        let v = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(mean(&v), 2.5);
        // sqrt(5/3) by hand: squared deviations 2.25+0.25+0.25+2.25 = 5, over 3.
        assert!((sample_std(&v) - 1.290994).abs() < 1e-6);
        assert!((sample_std(&v) - (5.0f64 / 3.0).sqrt()).abs() < 1e-15);
        assert_eq!(percentile_sorted(&v, 0.5), 2.5);
        assert_eq!(percentile_sorted(&v, 0.25), 1.75);
        assert_eq!(percentile_sorted(&v, 0.75), 3.25);
    }

    #[test]
    fn constant_sample() {
        let v = [7.5; 9];
        assert_eq!(mean(&v), 7.5);
        assert_eq!(sample_std(&v), 0.0);
        assert_eq!(percentile_sorted(&v, 0.25), percentile_sorted(&v, 0.75));
        assert_eq!(mann_whitney_p(&v, &v), 1.0);
    }

    #[test]
    fn single_value() {
        assert_eq!(sample_std(&[3.0]), 0.0);
        assert_eq!(percentile_sorted(&[3.0], 0.9), 3.0);
    }

    #[test]
    fn mann_whitney_separated_samples() {
        let a: Vec<f64> = (0..30).map(f64::from).collect();
        let b: Vec<f64> = (100..130).map(f64::from).collect();
        // U = 0, mu = 450, var = 30*30*61/12 = 4575; z = 449.5 / 67.64 = 6.646
        let p = mann_whitney_p(&a, &b);
        assert!(p < 1e-9, "{p}");
        assert_eq!(mann_whitney_p(&a, &b), mann_whitney_p(&b, &a));
        let interleaved: Vec<f64> = (0..30).map(|i| f64::from(i) + 0.5).collect();
        assert!(mann_whitney_p(&a, &interleaved) > 0.5);
    }
}
