//! Shared helpers for integration tests: random dataset builders and a
//! direct, loop-by-loop transcription of the weighting and index formulas
//! that does not call into the library's math.

#![allow(dead_code)]

use bvfair::{Dataset, GroupScores};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Scores concentrated around `centre` with random spread, kept inside [0, 1].
pub fn cluster(rng: &mut ChaCha8Rng, centre: f64, n: usize) -> Vec<f64> {
    let width: f64 = rng.random_range(0.01..0.4);
    (0..n)
        .map(|_| (centre + width * (rng.random::<f64>() - 0.5)).clamp(0.0, 1.0))
        .collect()
}

/// A random valid dataset with `k` groups and independently drawn sizes.
pub fn random_dataset(rng: &mut ChaCha8Rng, k: usize, max_per_kind: usize) -> Dataset {
    let groups = (0..k)
        .map(|i| {
            let ng = rng.random_range(2..=max_per_kind);
            let ni = rng.random_range(2..=max_per_kind);
            let cg = rng.random_range(0.3..1.0);
            let ci = rng.random_range(0.0..0.7);
            GroupScores::new(format!("g{i}"), cluster(rng, cg, ng), cluster(rng, ci, ni))
        })
        .collect();
    Dataset::from_groups(groups).unwrap()
}

/// Like [`random_dataset`] but every group has the same genuine and imposter counts.
pub fn random_balanced_dataset(rng: &mut ChaCha8Rng, k: usize, per_kind: usize) -> Dataset {
    let groups = (0..k)
        .map(|i| {
            let cg = rng.random_range(0.3..1.0);
            let ci = rng.random_range(0.0..0.7);
            GroupScores::new(
                format!("g{i}"),
                cluster(rng, cg, per_kind),
                cluster(rng, ci, per_kind),
            )
        })
        .collect();
    Dataset::from_groups(groups).unwrap()
}

/// Inputs to the index formulas for one random instance.
#[derive(Debug, Clone)]
pub struct Instance {
    pub sizes: Vec<u64>,
    pub mu_g: Vec<f64>,
    pub mu_i: Vec<f64>,
    pub sd_g: Vec<f64>,
    pub sd_i: Vec<f64>,
    /// Unit-sum histograms, one per group.
    pub hist: Vec<Vec<f64>>,
}

pub fn random_instance(rng: &mut ChaCha8Rng, k: usize) -> Instance {
    let bins = rng.random_range(2..=100);
    let hist = (0..k)
        .map(|_| {
            let mut h: Vec<f64> = (0..bins)
                .map(|_| if rng.random_bool(0.3) { 0.0 } else { rng.random::<f64>() })
                .collect();
            let i = rng.random_range(0..bins);
            h[i] += 0.5;
            let s: f64 = h.iter().sum();
            h.iter().map(|x| x / s).collect()
        })
        .collect();
    Instance {
        sizes: (0..k).map(|_| rng.random_range(1..5000)).collect(),
        mu_g: (0..k).map(|_| rng.random::<f64>()).collect(),
        mu_i: (0..k).map(|_| rng.random::<f64>()).collect(),
        sd_g: (0..k).map(|_| rng.random::<f64>() * 0.5).collect(),
        sd_i: (0..k).map(|_| rng.random::<f64>() * 0.5).collect(),
        hist,
    }
}

/// Nine index values in the order sfi/cfi/dfi × normal/extremal/weighted,
/// plus the normalized fusion weights and unnormalized weights.
#[derive(Debug, Clone)]
pub struct OracleResult {
    pub raw_weights: Vec<f64>,
    pub weights: Vec<f64>,
    pub kl: Vec<f64>,
    pub indices: [f64; 9],
}

/// Straight transcription of the formulas with plain index loops.
pub fn oracle(inst: &Instance) -> OracleResult {
    let k = inst.sizes.len();
    let kf = k as f64;

    // fusion weights
    let mut n_total = 0.0;
    for i in 0..k {
        n_total += inst.sizes[i] as f64;
    }
    let sigma = 1.0 / (2.0 * kf);
    let mut raw_weights = vec![0.0; k];
    for i in 0..k {
        let x = inst.sizes[i] as f64 / n_total - 1.0 / (2.0 * kf);
        raw_weights[i] = 1.0 + f64::exp(-1.0 / (2.0 * sigma * sigma) * x * x);
    }
    let mut wsum = 0.0;
    for i in 0..k {
        wsum += raw_weights[i];
    }
    let mut w = vec![0.0; k];
    for i in 0..k {
        w[i] = raw_weights[i] / wsum;
    }

    let variants = |z: &[f64]| -> [f64; 3] {
        let mut mean = 0.0;
        for i in 0..k {
            mean += z[i];
        }
        mean /= kf;
        let mut sum = 0.0;
        let mut max = 0.0f64;
        let mut wsum = 0.0;
        for i in 0..k {
            let d = if z[i] > mean { z[i] - mean } else { mean - z[i] };
            sum += d;
            if d > max {
                max = d;
            }
            wsum += w[i] * d;
        }
        [1.0 - 2.0 / kf * sum, 1.0 - 2.0 * max, 1.0 - 2.0 * wsum]
    };

    let mut zs = vec![0.0; k];
    let mut zc = vec![0.0; k];
    for i in 0..k {
        zs[i] = (inst.mu_g[i] - inst.mu_i[i]).abs();
        zc[i] = inst.sd_g[i] + inst.sd_i[i];
    }
    let sfi = variants(&zs);
    let cfi = variants(&zc);

    // distribution index; KL via natural log divided by ln 2
    let bins = inst.hist[0].len();
    let mut mean_h = vec![0.0; bins];
    for x in 0..bins {
        for i in 0..k {
            mean_h[x] += inst.hist[i][x];
        }
        mean_h[x] /= kf;
    }
    let mut kl = vec![0.0; k];
    for i in 0..k {
        let mut d = 0.0;
        for x in 0..bins {
            let a = inst.hist[i][x];
            if a > 0.0 {
                d += a * (a / mean_h[x]).ln();
            }
        }
        kl[i] = d / std::f64::consts::LN_2;
    }
    let log2k = kf.ln() / std::f64::consts::LN_2;
    let mut sum = 0.0;
    let mut max = 0.0f64;
    let mut wsum = 0.0;
    for i in 0..k {
        sum += kl[i];
        max = max.max(kl[i]);
        wsum += w[i] * kl[i];
    }
    let dfi = [
        1.0 - sum / (kf * log2k),
        1.0 - max / log2k,
        1.0 - wsum / log2k,
    ];

    OracleResult {
        raw_weights,
        weights: w,
        kl,
        indices: [
            sfi[0], sfi[1], sfi[2], cfi[0], cfi[1], cfi[2], dfi[0], dfi[1], dfi[2],
        ],
    }
}
