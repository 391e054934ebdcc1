//! Closed-form expected traffic of the coded and uncoded (baseline) schemes.
//!
//! A bit lands in a given user's cache with probability `a = M/N`,
//! independently across users. A transmission to `s` receivers carries, for
//! each receiver, the bits of its request cached by exactly the other `s - 1`
//! receivers, so its expected size is `F a^(s-1) (1-a)^(K-s+1)`. Summing over
//! all nonempty subsets gives the coded total
//! `K (1-a) (1/(K a)) (1 - (1-a)^K) F`.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::config::SystemConfig;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("receiver count {s} outside 1..={k}")]
    ReceiverCount { s: usize, k: usize },
    #[error("coded traffic formula is singular at M = 0; the limit is the baseline {limit_bits} bits")]
    ZeroCache { limit_bits: f64 },
}

/// `C(n, r)` as a float.
pub fn binomial(n: usize, r: usize) -> f64 {
    if r > n {
        return 0.0;
    }
    let r = r.min(n - r);
    (0..r).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Expected payload of a transmission with `s` receivers.
pub fn expected_payload_size(cfg: &SystemConfig, s: usize) -> Result<f64, ModelError> {
    let k = cfg.num_users;
    if s == 0 || s > k {
        return Err(ModelError::ReceiverCount { s, k });
    }
    let a = cfg.cache_fraction();
    Ok(cfg.content_size as f64 * a.powi(s as i32 - 1) * (1.0 - a).powi((k - s + 1) as i32))
}

/// Expected coded delivery traffic, bits. Errors at `M = 0` where the
/// closed form divides by zero; the error carries the limiting value.
pub fn coded_total_traffic(cfg: &SystemConfig) -> Result<f64, ModelError> {
    let a = cfg.cache_fraction();
    let k = cfg.num_users as f64;
    let f = cfg.content_size as f64;
    if a == 0.0 {
        return Err(ModelError::ZeroCache {
            limit_bits: baseline_total_traffic(cfg),
        });
    }
    let local_gain = k * (1.0 - a);
    // 1 - (1-a)^K without cancellation at small a
    let global_gain = -(k * (-a).ln_1p()).exp_m1() / (k * a);
    Ok(local_gain * global_gain * f)
}

/// Uncoded unicast traffic `K (1 - M/N) F`.
pub fn baseline_total_traffic(cfg: &SystemConfig) -> f64 {
    cfg.num_users as f64 * (1.0 - cfg.cache_fraction()) * cfg.content_size as f64
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrafficSummary {
    pub coded_total: f64,
    pub baseline_total: f64,
    /// Expected payload per transmission, keyed by receiver count.
    pub per_subset_size: BTreeMap<usize, f64>,
    /// `baseline_total / coded_total`; 1 when both are zero.
    pub traffic_gain: f64,
    /// Set when `M = 0` and `coded_total` is the no-cache limit rather than
    /// the closed form.
    pub zero_cache_limit: bool,
}

pub fn traffic_summary(cfg: &SystemConfig) -> TrafficSummary {
    let per_subset_size: BTreeMap<usize, f64> = (1..=cfg.num_users)
        .map(|s| (s, expected_payload_size(cfg, s).expect("s in range")))
        .collect();
    let baseline_total = baseline_total_traffic(cfg);
    let (coded_total, zero_cache_limit) = match coded_total_traffic(cfg) {
        Ok(v) => (v, false),
        Err(ModelError::ZeroCache { limit_bits }) => (limit_bits, true),
        Err(e) => unreachable!("{e}"),
    };
    let traffic_gain = if coded_total > 0.0 {
        baseline_total / coded_total
    } else {
        1.0
    };
    TrafficSummary {
        coded_total,
        baseline_total,
        per_subset_size,
        traffic_gain,
        zero_cache_limit,
    }
}

#[cfg(test)]
mod tests {
    use approx::assert_relative_eq;

    use super::*;

    fn cfg(n: usize, k: usize, f: usize, m: f64) -> SystemConfig {
        SystemConfig::new(n, k, f, m, 1.0, 1.0, 1, 1.0).unwrap()
    }

    #[test]
    fn example_one_sizes() {
        for m in [0.25, 0.5, 1.0, 1.5] {
            let c = cfg(2, 2, 1, m);
            let a = m / 2.0;
            assert_relative_eq!(expected_payload_size(&c, 2).unwrap(), a * (1.0 - a), max_relative = 1e-15);
            assert_relative_eq!(expected_payload_size(&c, 1).unwrap(), (1.0 - a).powi(2), max_relative = 1e-15);
            assert_relative_eq!(
                coded_total_traffic(&c).unwrap(),
                (1.0 - m / 4.0) * (2.0 - m),
                max_relative = 1e-12
            );
            assert_relative_eq!(baseline_total_traffic(&c), 2.0 - m, max_relative = 1e-15);
        }
        assert_relative_eq!(coded_total_traffic(&cfg(2, 2, 1, 1.0)).unwrap(), 0.75);
    }

    #[test]
    fn unicast_size_is_uncached_mass() {
        let c = cfg(5, 4, 1000, 2.0);
        assert_relative_eq!(expected_payload_size(&c, 1).unwrap(), 1000.0 * 0.6f64.powi(4));
    }

    #[test]
    fn zero_cache_limit() {
        let c = cfg(3, 4, 10, 0.0);
        assert_eq!(expected_payload_size(&c, 1).unwrap(), 10.0);
        assert_eq!(expected_payload_size(&c, 3).unwrap(), 0.0);
        assert_eq!(
            coded_total_traffic(&c),
            Err(ModelError::ZeroCache { limit_bits: 40.0 })
        );
        let summary = traffic_summary(&c);
        assert!(summary.zero_cache_limit);
        assert_eq!(summary.coded_total, 40.0);
        assert_eq!(summary.traffic_gain, 1.0);
    }

    #[test]
    fn near_full_cache_vanishes() {
        let c = cfg(2, 3, 1000, 2.0 - 1e-9);
        assert!(coded_total_traffic(&c).unwrap() < 1e-5);
    }

    #[test]
    fn subset_sum_identity_small() {
        let c = cfg(4, 3, 1, 1.0);
        let by_subsets: f64 = (1..=3)
            .map(|s| binomial(3, s) * expected_payload_size(&c, s).unwrap())
            .sum();
        // a = 1/4: 3 * 0.75 * 4/3 * (1 - 0.75^3) = 1.734375
        assert_relative_eq!(coded_total_traffic(&c).unwrap(), 1.734375, max_relative = 1e-15);
        assert_relative_eq!(by_subsets, 1.734375, max_relative = 1e-12);
    }

    #[test]
    fn baseline_direct() {
        assert_relative_eq!(baseline_total_traffic(&cfg(3, 5, 100, 1.5)), 250.0);
    }

    #[test]
    fn receiver_count_domain() {
        let c = cfg(2, 3, 1, 1.0);
        assert_eq!(
            expected_payload_size(&c, 0),
            Err(ModelError::ReceiverCount { s: 0, k: 3 })
        );
        assert!(expected_payload_size(&c, 4).is_err());
    }

    #[test]
    fn dominance_and_summary_consistency() {
        for k in 1..=12 {
            for step in 1..20 {
                let c = cfg(10, k, 1000, step as f64 * 0.5);
                let s = traffic_summary(&c);
                assert!(s.coded_total <= s.baseline_total * (1.0 + 1e-12));
                assert!(s.traffic_gain >= 1.0 - 1e-12);
                let rebuilt: f64 = s
                    .per_subset_size
                    .iter()
                    .map(|(&r, &v)| binomial(k, r) * v)
                    .sum();
                assert_relative_eq!(rebuilt, s.coded_total, max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn binomial_values() {
        assert_eq!(binomial(5, 2), 10.0);
        assert_eq!(binomial(16, 8), 12870.0);
        assert_eq!(binomial(3, 4), 0.0);
    }
}
