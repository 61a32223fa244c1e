//! Downlink SINR, throughput, cell spectral efficiency and CDF helpers.

use crate::channel::ChannelTensor;
use crate::precoding::PrecodingMatrix;
use crate::radio::SUBFRAME_SYMBOLS;
use crate::training::PilotPlan;
use crate::{Result, SimError};

/// Per-RB spectral efficiency ceiling (about 256-QAM), bit/s/Hz.
pub const DEFAULT_SE_CAP: f64 = 7.8;

/// Downlink SINR of user `k` on RB `rb` for a materialized channel tensor.
///
/// `precoders[j][rb]` holds one column per user of sector `j`, ordered by
/// pilot index. The first sum runs over the co-scheduled users of the anchor,
/// the second over every user of every other sector.
pub fn downlink_sinr(
    k: usize,
    rb: usize,
    plan: &PilotPlan,
    precoders: &[Vec<PrecodingMatrix>],
    channels: &ChannelTensor,
    noise_mw: f64,
) -> f64 {
    let anchor = plan.anchor[k];
    let slot = plan.pilot_index[k];
    let mut signal = 0.0;
    let mut interference = 0.0;
    for (j, per_rb) in precoders.iter().enumerate() {
        let w = &per_rb[rb];
        let g = w.apply(channels.row(k, j, rb));
        for (i, gi) in g.iter().enumerate() {
            if j == anchor && i == slot {
                signal += gi.norm_sqr();
            } else {
                interference += gi.norm_sqr();
            }
        }
    }
    signal / (interference + noise_mw)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThroughputModel {
    pub rb_bandwidth_hz: f64,
    pub se_cap: f64,
}

impl Default for ThroughputModel {
    fn default() -> Self {
        Self { rb_bandwidth_hz: 180e3, se_cap: DEFAULT_SE_CAP }
    }
}

impl ThroughputModel {
    /// Fraction of the subframe left for downlink data.
    pub fn data_fraction(tau: u32) -> f64 {
        1.0 - tau as f64 / SUBFRAME_SYMBOLS as f64
    }

    /// Capped Shannon spectral efficiency on one RB.
    pub fn spectral_efficiency(&self, sinr: f64) -> f64 {
        (1.0 + sinr).log2().min(self.se_cap)
    }

    /// User throughput in Mbit/s from its per-RB linear SINRs.
    pub fn user_throughput(&self, sinr_per_rb: &[f64], tau: u32) -> f64 {
        let se: f64 = sinr_per_rb.iter().map(|&s| self.spectral_efficiency(s)).sum();
        Self::data_fraction(tau) * se * self.rb_bandwidth_hz / 1e6
    }
}

/// Sum throughput of a sector over the system bandwidth, bit/s/Hz.
pub fn cell_spectral_efficiency(throughputs_mbps: &[f64], system_bandwidth_hz: f64) -> f64 {
    throughputs_mbps.iter().sum::<f64>() * 1e6 / system_bandwidth_hz
}

/// Empirical CDF: sorted samples with cumulative probabilities `i / n`.
#[derive(Debug, Clone, PartialEq)]
pub struct CdfSeries {
    values: Vec<f64>,
}

impl CdfSeries {
    /// NaN samples are dropped.
    pub fn new(mut samples: Vec<f64>) -> Self {
        samples.retain(|x| !x.is_nan());
        samples.sort_by(|a, b| a.partial_cmp(b).unwrap());
        Self { values: samples }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `(value, cumulative probability)` pairs.
    pub fn points(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        let n = self.values.len() as f64;
        self.values.iter().enumerate().map(move |(i, &v)| (v, (i + 1) as f64 / n))
    }

    /// Linear-interpolation percentile at position `p·(n-1)` of the sorted
    /// samples (the common "linear" convention).
    pub fn percentile(&self, p: f64) -> Result<f64> {
        if self.values.is_empty() {
            return Err(SimError::EmptySeries);
        }
        let p = p.clamp(0.0, 1.0);
        let pos = p * (self.values.len() - 1) as f64;
        let lo = pos.floor() as usize;
        let hi = pos.ceil() as usize;
        let frac = pos - lo as f64;
        Ok(self.values[lo] + frac * (self.values[hi] - self.values[lo]))
    }

    pub fn fraction_at_least(&self, threshold: f64) -> f64 {
        if self.values.is_empty() {
            return 0.0;
        }
        self.values.iter().filter(|&&v| v >= threshold).count() as f64 / self.values.len() as f64
    }
}

pub fn percentile(samples: &[f64], p: f64) -> Result<f64> {
    CdfSeries::new(samples.to_vec()).percentile(p)
}

/// KPIs of one operating point on one drop. Per-user vectors are indexed by
/// the drop's user order (anchor-major, then pilot index).
#[derive(Debug, Clone, PartialEq)]
pub struct DropKpis {
    pub throughput_mbps: Vec<f64>,
    pub sector_cse: Vec<f64>,
    pub pilot_power_dbm: Vec<f64>,
    /// Empty under perfect CSI.
    pub estimation_sinr_db: Vec<f64>,
    /// Wideband downlink SINR per user (mean linear SINR over RBs), dB.
    pub downlink_sinr_db: Vec<f64>,
    pub fraction_at_max: f64,
    /// Precoders that needed ZF diagonal loading.
    pub zf_regularized: u32,
    /// Re-sampled drop attempts before this drop was accepted.
    pub rejected_attempts: u32,
    pub pathloss_clamps: u32,
}

impl DropKpis {
    pub fn mean_cse(&self) -> f64 {
        if self.sector_cse.is_empty() {
            0.0
        } else {
            self.sector_cse.iter().sum::<f64>() / self.sector_cse.len() as f64
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn throughput_arithmetic() {
        let m = ThroughputModel::default();
        let thr = m.user_throughput(&[1.0; 50], 1);
        assert!((thr - 13.0 / 14.0 * 50.0 * 0.18).abs() < 1e-12);
        assert!((thr - 8.357).abs() < 1e-3);
        let r3 = m.user_throughput(&[1.0; 50], 3);
        assert!((r3 / thr - 11.0 / 13.0).abs() < 1e-15);
        let capped = m.user_throughput(&[1e30; 50], 1);
        assert!((capped - 13.0 / 14.0 * 50.0 * 0.18 * 7.8).abs() < 1e-12);
    }

    #[test]
    fn overhead_factors_are_exact() {
        assert_eq!(ThroughputModel::data_fraction(1), 13.0 / 14.0);
        assert_eq!(ThroughputModel::data_fraction(3), 11.0 / 14.0);
    }

    #[test]
    fn cse_arithmetic() {
        let thr = ThroughputModel::default().user_throughput(&[1.0; 50], 1);
        let cse = cell_spectral_efficiency(&[thr; 16], 10e6);
        assert!((cse - 13.37).abs() < 1e-2);
        assert_eq!(cell_spectral_efficiency(&[], 10e6), 0.0);
    }

    #[test]
    fn percentile_conventions() {
        let s: Vec<f64> = (1..=100).map(|x| x as f64).collect();
        assert!((percentile(&s, 0.05).unwrap() - 5.95).abs() < 1e-12);
        assert_eq!(percentile(&[3.5; 7], 0.05).unwrap(), 3.5);
        assert_eq!(percentile(&[3.5; 7], 0.9).unwrap(), 3.5);
        assert_eq!(percentile(&[1.0, 2.0, 3.0, 4.0, 5.0], 0.5).unwrap(), 3.0);
        assert!((percentile(&[1.0, 2.0, 3.0, 4.0], 0.5).unwrap() - 2.5).abs() < 1e-15);
        assert!(matches!(percentile(&[], 0.5), Err(SimError::EmptySeries)));
    }

    proptest! {
        #[test]
        fn cdf_is_lossless_and_monotone(samples in proptest::collection::vec(-1e6..1e6f64, 1..200)) {
            let cdf = CdfSeries::new(samples.clone());
            let mut sorted = samples.clone();
            sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
            prop_assert_eq!(cdf.values(), sorted.as_slice());
            let pts: Vec<_> = cdf.points().collect();
            for w in pts.windows(2) {
                prop_assert!(w[1].1 > w[0].1);
                prop_assert!(w[1].0 >= w[0].0);
            }
            prop_assert!((pts.last().unwrap().1 - 1.0).abs() < 1e-15);
        }
    }
}
