//! Summary statistics over per-task differences.

use serde::Serialize;
use statrs::distribution::{ContinuousCDF, Normal, StudentsT};

use crate::error::{HarnessError, Result};

/// Each statistic is `None` when there is too little data for it.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct StatsSummary {
    pub n: usize,
    pub mean: f64,
    pub ci95_halfwidth: Option<f64>,
    pub ttest_p: Option<f64>,
    pub wilcoxon_stat: Option<f64>,
    pub wilcoxon_p: Option<f64>,
    pub spearman_rho: Option<f64>,
}

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

fn sample_sd(xs: &[f64]) -> f64 {
    let m = mean(xs);
    (xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() - 1) as f64).sqrt()
}

fn t_dist(df: f64) -> StudentsT {
    StudentsT::new(0.0, 1.0, df).expect("positive degrees of freedom")
}

/// Half-width of the Student-t 95% interval for the mean; needs two values.
pub fn ci95_halfwidth(xs: &[f64]) -> Option<f64> {
    if xs.len() < 2 {
        return None;
    }
    let n = xs.len() as f64;
    Some(t_dist(n - 1.0).inverse_cdf(0.975) * sample_sd(xs) / n.sqrt())
}

/// Two-sided one-sample t-test of mean zero (the paired test on differences).
/// Undefined for fewer than two values or zero spread.
pub fn ttest_p(xs: &[f64]) -> Option<f64> {
    if xs.len() < 2 {
        return None;
    }
    let sd = sample_sd(xs);
    if sd == 0.0 || !sd.is_finite() {
        return None;
    }
    let n = xs.len() as f64;
    let t = mean(xs) / (sd / n.sqrt());
    Some((2.0 * t_dist(n - 1.0).sf(t.abs())).min(1.0))
}

/// t statistic of the one-sample test, when defined.
pub fn t_statistic(xs: &[f64]) -> Option<f64> {
    let sd = sample_sd(xs);
    (xs.len() >= 2 && sd > 0.0).then(|| mean(xs) / (sd / (xs.len() as f64).sqrt()))
}

/// Ranks starting at 1, ties sharing their average rank.
pub fn average_ranks(xs: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..xs.len()).collect();
    idx.sort_by(|&a, &b| xs[a].total_cmp(&xs[b]));
    let mut ranks = vec![0.0; xs.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && xs[idx[j + 1]] == xs[idx[i]] {
            j += 1;
        }
        let r = (i + j) as f64 / 2.0 + 1.0;
        for &k in &idx[i..=j] {
            ranks[k] = r;
        }
        i = j + 1;
    }
    ranks
}

pub const WILCOXON_MIN_NONZERO: usize = 5;
const WILCOXON_EXACT_MAX: usize = 50;

/// Two-sided Wilcoxon signed-rank test. Zero differences are dropped. The
/// statistic is the smaller of the positive and negative rank sums; the
/// p-value is exact for up to 50 values without ties and from the normal
/// approximation with tie correction otherwise.
pub fn wilcoxon(xs: &[f64]) -> Option<(f64, f64)> {
    let d: Vec<f64> = xs.iter().copied().filter(|x| *x != 0.0).collect();
    let n = d.len();
    if n < WILCOXON_MIN_NONZERO {
        return None;
    }
    let abs: Vec<f64> = d.iter().map(|x| x.abs()).collect();
    let ranks = average_ranks(&abs);
    let r_plus: f64 = d.iter().zip(&ranks).filter(|(x, _)| **x > 0.0).map(|(_, r)| r).sum();
    let r_minus: f64 = d.iter().zip(&ranks).filter(|(x, _)| **x < 0.0).map(|(_, r)| r).sum();
    let stat = r_plus.min(r_minus);
    let mut sorted = abs.clone();
    sorted.sort_by(f64::total_cmp);
    let has_ties = sorted.windows(2).any(|w| w[0] == w[1]);
    let p = if n <= WILCOXON_EXACT_MAX && !has_ties {
        2.0 * signed_rank_cdf(n, stat as usize)
    } else {
        let nf = n as f64;
        let mn = nf * (nf + 1.0) / 4.0;
        let mut tie_term = 0.0;
        let mut i = 0;
        while i < sorted.len() {
            let mut j = i;
            while j + 1 < sorted.len() && sorted[j + 1] == sorted[i] {
                j += 1;
            }
            let t = (j - i + 1) as f64;
            tie_term += t * t * t - t;
            i = j + 1;
        }
        let var = nf * (nf + 1.0) * (2.0 * nf + 1.0) / 24.0 - tie_term / 48.0;
        let z = (stat - mn) / var.sqrt();
        let normal = Normal::new(0.0, 1.0).expect("standard normal");
        2.0 * normal.sf(z.abs())
    };
    Some((stat, p.min(1.0)))
}

/// `P(W+ <= k)` for `n` untied ranks under the null.
fn signed_rank_cdf(n: usize, k: usize) -> f64 {
    let max = n * (n + 1) / 2;
    // counts[s] = number of sign assignments with positive rank sum s.
    let mut counts = vec![0f64; max + 1];
    counts[0] = 1.0;
    for r in 1..=n {
        for s in (r..=max).rev() {
            counts[s] += counts[s - r];
        }
    }
    let total = 2f64.powi(n as i32);
    counts[..=k.min(max)].iter().sum::<f64>() / total
}

/// Spearman correlation: Pearson correlation of average ranks. Undefined
/// when either side is constant.
pub fn spearman(xs: &[f64], ys: &[f64]) -> Result<Option<f64>> {
    if xs.len() != ys.len() {
        return Err(HarnessError::Data(format!(
            "spearman needs paired values ({} vs {})",
            xs.len(),
            ys.len()
        )));
    }
    if xs.len() < 2 {
        return Ok(None);
    }
    let (rx, ry) = (average_ranks(xs), average_ranks(ys));
    let (mx, my) = (mean(&rx), mean(&ry));
    let cov: f64 = rx.iter().zip(&ry).map(|(a, b)| (a - mx) * (b - my)).sum();
    let vx: f64 = rx.iter().map(|a| (a - mx).powi(2)).sum();
    let vy: f64 = ry.iter().map(|b| (b - my).powi(2)).sum();
    if vx == 0.0 || vy == 0.0 {
        return Ok(None);
    }
    Ok(Some((cov / (vx * vy).sqrt()).clamp(-1.0, 1.0)))
}

pub fn summarize(diffs: &[f64]) -> Result<StatsSummary> {
    if diffs.is_empty() {
        return Err(HarnessError::Data("no values to summarize".into()));
    }
    let w = wilcoxon(diffs);
    Ok(StatsSummary {
        n: diffs.len(),
        mean: mean(diffs),
        ci95_halfwidth: ci95_halfwidth(diffs),
        ttest_p: ttest_p(diffs),
        wilcoxon_stat: w.map(|x| x.0),
        wilcoxon_p: w.map(|x| x.1),
        spearman_rho: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_zero() {
        let s = summarize(&[0.0; 6]).unwrap();
        assert_eq!(s.mean, 0.0);
        assert_eq!(s.ci95_halfwidth, Some(0.0));
        assert_eq!(s.wilcoxon_p, None);
        assert_eq!(s.ttest_p, None);
    }

    #[test]
    fn ranks_with_ties() {
        assert_eq!(average_ranks(&[3.0, 1.0, 3.0, 2.0]), vec![3.5, 1.0, 3.5, 2.0]);
    }

    #[test]
    fn spearman_limits() {
        let a = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(spearman(&a, &a).unwrap(), Some(1.0));
        assert_eq!(spearman(&a, &[4.0, 3.0, 2.0, 1.0]).unwrap(), Some(-1.0));
        assert_eq!(spearman(&a, &[1.0; 4]).unwrap(), None);
        assert!(spearman(&a, &[1.0]).is_err());
    }

    #[test]
    fn exact_signed_rank_distribution() {
        // n = 3: sums 0..6 with counts 1,1,1,2,1,1,1.
        assert_eq!(signed_rank_cdf(3, 0), 1.0 / 8.0);
        assert_eq!(signed_rank_cdf(3, 3), 5.0 / 8.0);
        assert_eq!(signed_rank_cdf(3, 6), 1.0);
    }
}
