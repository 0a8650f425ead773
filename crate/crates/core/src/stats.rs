//! Numeric primitives: per-group moments, fixed-width histograms over
//! `[0, 1]`, and base-2 KL divergence.

use serde::{Deserialize, Serialize};

use crate::error::{FairnessError, Result};
use crate::types::{GroupScores, GroupStats};

pub const DEFAULT_BINS: usize = 100;

/// Probability mass over `B` equal-width bins spanning `[0, 1]`.
///
/// Bin `i` covers `[i/B, (i+1)/B)`; the last bin also holds `1.0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Histogram(Vec<f64>);

impl Histogram {
    /// Wraps raw masses, normalizing them to unit sum.
    pub fn from_masses(masses: Vec<f64>) -> Result<Self> {
        if masses.len() < 2 {
            return Err(FairnessError::InvalidBinCount(masses.len()));
        }
        if masses.iter().any(|m| !m.is_finite() || *m < 0.0) {
            return Err(FairnessError::InvalidArgument(
                "histogram masses must be finite and non-negative".into(),
            ));
        }
        let total: f64 = masses.iter().sum();
        if total <= 0.0 {
            return Err(FairnessError::InvalidArgument("histogram has no mass".into()));
        }
        Ok(Self(masses.into_iter().map(|m| m / total).collect()))
    }

    /// Normalized histogram of `scores`, all of which must lie in `[0, 1]`.
    pub fn from_scores<'a>(scores: impl IntoIterator<Item = &'a f64>, bins: usize) -> Result<Self> {
        if bins < 2 {
            return Err(FairnessError::InvalidBinCount(bins));
        }
        let mut counts = vec![0u64; bins];
        let mut total = 0u64;
        for &s in scores {
            crate::types::check_score(s)?;
            counts[bin_index(s, bins)] += 1;
            total += 1;
        }
        if total == 0 {
            return Err(FairnessError::InvalidArgument("no scores to histogram".into()));
        }
        let n = total as f64;
        Ok(Self(counts.into_iter().map(|c| c as f64 / n).collect()))
    }

    pub fn bins(&self) -> usize {
        self.0.len()
    }

    pub fn masses(&self) -> &[f64] {
        &self.0
    }

    pub fn into_masses(self) -> Vec<f64> {
        self.0
    }

    /// Lower and upper edge of bin `i`.
    pub fn edges(bins: usize, i: usize) -> (f64, f64) {
        (i as f64 / bins as f64, (i + 1) as f64 / bins as f64)
    }
}

/// Bin holding `score`, consistent with the edges reported by [`Histogram::edges`].
pub fn bin_index(score: f64, bins: usize) -> usize {
    let b = bins as f64;
    let mut i = ((score * b).floor() as usize).min(bins - 1);
    // score * b can round across an edge; settle against the exact edge values
    if i + 1 < bins && score >= (i + 1) as f64 / b {
        i += 1;
    } else if i > 0 && score < i as f64 / b {
        i -= 1;
    }
    i
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Population (1/n) standard deviation around a precomputed mean.
fn population_std(xs: &[f64], mean: f64) -> f64 {
    let ss: f64 = xs.iter().map(|x| (x - mean) * (x - mean)).sum();
    (ss / xs.len() as f64).sqrt()
}

/// Means, population standard deviations and the combined-score histogram of one group.
pub fn group_stats(g: &GroupScores, bins: usize) -> Result<GroupStats> {
    if g.genuine.len() < 2 || g.imposter.len() < 2 {
        return Err(FairnessError::InsufficientScores {
            group: g.demographic.clone(),
            genuine: g.genuine.len(),
            imposter: g.imposter.len(),
        });
    }
    let histogram = Histogram::from_scores(g.genuine.iter().chain(&g.imposter), bins)?;
    let mu_genuine = mean(&g.genuine);
    let mu_imposter = mean(&g.imposter);
    Ok(GroupStats {
        demographic: g.demographic.clone(),
        mu_genuine,
        mu_imposter,
        sigma_genuine: population_std(&g.genuine, mu_genuine),
        sigma_imposter: population_std(&g.imposter, mu_imposter),
        histogram: histogram.into_masses(),
        n_genuine: g.genuine.len(),
        n_imposter: g.imposter.len(),
    })
}

/// `D_KL(a ‖ b)` in bits. Bins where `a` is zero contribute nothing.
pub fn kl_divergence(a: &Histogram, b: &Histogram) -> Result<f64> {
    if a.bins() != b.bins() {
        return Err(FairnessError::BinMismatch {
            left: a.bins(),
            right: b.bins(),
        });
    }
    let mut total = 0.0;
    for (bin, (&p, &q)) in a.0.iter().zip(&b.0).enumerate() {
        if p == 0.0 {
            continue;
        }
        if q <= 0.0 {
            return Err(FairnessError::DivergenceUndefined { bin, mass: p });
        }
        total += p * (p / q).log2();
    }
    // rounding can leave a tiny negative residue when a == b
    Ok(total.max(0.0))
}

/// Elementwise arithmetic mean of at least two histograms.
pub fn mean_histogram(hs: &[Histogram]) -> Result<Histogram> {
    let first = match hs {
        [first, _, ..] => first,
        _ => {
            return Err(FairnessError::InvalidArgument(format!(
                "mean histogram needs at least 2 histograms, got {}",
                hs.len()
            )))
        }
    };
    let bins = first.bins();
    // accumulate offsets from the first histogram so identical inputs
    // give back exactly the same masses
    let mut acc = vec![0.0; bins];
    for h in hs {
        if h.bins() != bins {
            return Err(FairnessError::BinMismatch {
                left: bins,
                right: h.bins(),
            });
        }
        for ((a, m), f) in acc.iter_mut().zip(&h.0).zip(&first.0) {
            *a += m - f;
        }
    }
    let k = hs.len() as f64;
    Ok(Histogram(
        acc.into_iter()
            .zip(&first.0)
            .map(|(a, f)| (f + a / k).max(0.0))
            .collect(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn h(m: &[f64]) -> Histogram {
        Histogram::from_masses(m.to_vec()).unwrap()
    }

    #[test]
    fn constant_sets_have_zero_spread() {
        let g = GroupScores::new("d", vec![0.8, 0.8], vec![0.2, 0.2]);
        let s = group_stats(&g, 100).unwrap();
        assert_eq!((s.mu_genuine, s.mu_imposter), (0.8, 0.2));
        assert_eq!((s.sigma_genuine, s.sigma_imposter), (0.0, 0.0));
    }

    #[test]
    fn two_point_population_std() {
        let g = GroupScores::new("d", vec![0.6, 1.0], vec![0.2, 0.2]);
        let s = group_stats(&g, 100).unwrap();
        assert!((s.mu_genuine - 0.8).abs() < 1e-15);
        assert!((s.sigma_genuine - 0.2).abs() < 1e-15);
    }

    #[test]
    fn hand_binned_histogram() {
        let g = GroupScores::new("d", vec![0.9, 0.9], vec![0.1, 0.1]);
        let s = group_stats(&g, 100).unwrap();
        for (i, &m) in s.histogram.iter().enumerate() {
            let expected = if i == 90 || i == 10 { 0.5 } else { 0.0 };
            assert_eq!(m, expected, "bin {i}");
        }
    }

    #[test]
    fn bin_edges() {
        assert_eq!(bin_index(0.0, 100), 0);
        assert_eq!(bin_index(1.0, 100), 99);
        assert_eq!(bin_index(0.999_999, 100), 99);
        assert_eq!(bin_index(0.5, 2), 1);
        assert_eq!(bin_index(0.499_999, 2), 0);
        // 0.29 * 100 rounds below 29 in binary; the edge check still puts it with its edge
        assert_eq!(bin_index(0.29, 100), 29);
        for b in [2, 3, 7, 10, 50, 100, 256] {
            for i in 0..b {
                let (lo, hi) = Histogram::edges(b, i);
                assert_eq!(bin_index(lo, b), i);
                if i + 1 < b {
                    assert_eq!(bin_index(hi, b), i + 1);
                }
            }
        }
    }

    #[test]
    fn insufficient_scores_rejected() {
        let g = GroupScores::new("d", vec![0.6], vec![0.2, 0.2]);
        assert!(matches!(group_stats(&g, 100), Err(FairnessError::InsufficientScores { .. })));
    }

    #[test]
    fn kl_examples() {
        let p = h(&[0.5, 0.5]);
        let m = h(&[0.75, 0.25]);
        assert_eq!(kl_divergence(&p, &p).unwrap(), 0.0);
        let expected = 0.5 * (2.0f64 / 3.0).log2() + 0.5 * 2.0f64.log2();
        assert!((kl_divergence(&p, &m).unwrap() - expected).abs() < 1e-15);
        assert!((expected - 0.20752).abs() < 1e-5);
        let one = h(&[1.0, 0.0]);
        let v = kl_divergence(&one, &m).unwrap();
        assert!((v - (4.0f64 / 3.0).log2()).abs() < 1e-15);
        assert!((v - 0.41504).abs() < 1e-5);
    }

    #[test]
    fn kl_support_violation() {
        let a = h(&[0.5, 0.5]);
        let b = h(&[1.0, 0.0]);
        assert_eq!(
            kl_divergence(&a, &b).unwrap_err(),
            FairnessError::DivergenceUndefined { bin: 1, mass: 0.5 }
        );
        assert!(matches!(
            kl_divergence(&a, &h(&[0.2, 0.3, 0.5])),
            Err(FairnessError::BinMismatch { .. })
        ));
    }

    #[test]
    fn mean_histogram_examples() {
        let p = h(&[0.3, 0.7]);
        assert_eq!(mean_histogram(&[p.clone(), p.clone()]).unwrap(), p);
        assert_eq!(
            mean_histogram(&[h(&[1.0, 0.0]), h(&[0.0, 1.0])]).unwrap().masses(),
            &[0.5, 0.5]
        );
        assert_eq!(
            mean_histogram(&[h(&[1.0, 0.0]), h(&[0.5, 0.5]), h(&[0.0, 1.0])])
                .unwrap()
                .masses(),
            &[0.5, 0.5]
        );
        assert!(mean_histogram(std::slice::from_ref(&p)).is_err());
        assert!(mean_histogram(&[p, h(&[0.2, 0.3, 0.5])]).is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn masses(bins: usize) -> impl Strategy<Value = Vec<f64>> {
            prop::collection::vec(prop_oneof![Just(0.0), 0.0f64..1.0], bins)
                .prop_filter("needs mass", |v| v.iter().sum::<f64>() > 1e-6)
        }

        fn histograms() -> impl Strategy<Value = Vec<Histogram>> {
            (2usize..7, 2usize..24).prop_flat_map(|(k, bins)| {
                prop::collection::vec(masses(bins).prop_map(|m| Histogram::from_masses(m).unwrap()), k)
            })
        }

        proptest! {
            #[test]
            fn kl_to_mean_bounded_by_log2_k(hs in histograms()) {
                let mean = mean_histogram(&hs).unwrap();
                let bound = (hs.len() as f64).log2();
                for a in &hs {
                    let d = kl_divergence(a, &mean).unwrap();
                    prop_assert!(d >= 0.0);
                    prop_assert!(d <= bound + 1e-12, "{} > {}", d, bound);
                }
            }

            #[test]
            fn kl_nonnegative_and_zero_iff_equal(a in masses(12), b in prop::collection::vec(1e-3f64..1.0, 12)) {
                let a = Histogram::from_masses(a).unwrap();
                let b = Histogram::from_masses(b).unwrap();
                let d = kl_divergence(&a, &b).unwrap();
                prop_assert!(d >= 0.0);
                let equal = a.masses().iter().zip(b.masses()).all(|(x, y)| (x - y).abs() <= 1e-12);
                if !equal {
                    prop_assert!(d > 0.0);
                }
                prop_assert!(kl_divergence(&b, &b).unwrap().abs() <= 1e-12);
            }

            #[test]
            fn kl_permutation_equivariant(a in masses(10), b in prop::collection::vec(1e-3f64..1.0, 10), perm in Just((0..10).collect::<Vec<usize>>()).prop_shuffle()) {
                let pa = Histogram::from_masses(perm.iter().map(|&i| a[i]).collect()).unwrap();
                let pb = Histogram::from_masses(perm.iter().map(|&i| b[i]).collect()).unwrap();
                let a = Histogram::from_masses(a).unwrap();
                let b = Histogram::from_masses(b).unwrap();
                let d1 = kl_divergence(&a, &b).unwrap();
                let d2 = kl_divergence(&pa, &pb).unwrap();
                prop_assert!((d1 - d2).abs() <= 1e-12 * d1.max(1.0));
            }

            #[test]
            fn moments_match_brute_force(
                gen in prop::collection::vec(0.0f64..=1.0, 2..200),
                imp in prop::collection::vec(0.0f64..=1.0, 2..200),
                bins in 2usize..150,
            ) {
                let g = GroupScores::new("d", gen.clone(), imp.clone());
                let s = group_stats(&g, bins).unwrap();
                for (xs, mu, sigma) in [(&gen, s.mu_genuine, s.sigma_genuine), (&imp, s.mu_imposter, s.sigma_imposter)] {
                    // brute force: sort-free naive two-pass with index loops
                    let n = xs.len() as f64;
                    let mut sum = 0.0;
                    for i in 0..xs.len() { sum += xs[i]; }
                    let m = sum / n;
                    let mut ss = 0.0;
                    for i in 0..xs.len() { ss += (xs[i] - m).powi(2); }
                    prop_assert!((mu - m).abs() <= 1e-12);
                    prop_assert!((sigma - (ss / n).sqrt()).abs() <= 1e-12);
                    prop_assert!((0.0..=0.5).contains(&sigma));
                }
                prop_assert_eq!(s.histogram.len(), bins);
                prop_assert!(s.histogram.iter().all(|&m| m >= 0.0));
                prop_assert!((s.histogram.iter().sum::<f64>() - 1.0).abs() <= 1e-9);
            }
        }
    }
}
