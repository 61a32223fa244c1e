//! Uplink pilot allocation and least-squares channel estimation.
//!
//! Pilots are orthogonal inside a sector. Under reuse 1 every sector uses the
//! same pilot set; under reuse 3 the three sectors of a site get mutually
//! orthogonal sets (color = sector index within the site), so user `k` is
//! contaminated only by users with the same pilot index in other sectors of
//! the same color.
//!
//! After de-spreading a unit-norm pilot, the observation at the anchor
//! sector `j` of user `k` on RB `n` gives the LS estimate
//!
//! ```text
//! ĥ_k = h_k + Σ_i sqrt(q_i / q_k) h_i + w / sqrt(q_k),    w ~ CN(0, σ² I)
//! ```
//!
//! with `q` the per-RB linear pilot powers.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::channel::{ChannelTensor, SectorChannels};
use crate::deployment::NetworkLayout;
use crate::radio::SUBFRAME_SYMBOLS;
use crate::{Result, SimError, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Reuse {
    R1,
    R3,
}

impl Reuse {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "r1" => Some(Self::R1),
            "r3" => Some(Self::R3),
            _ => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::R1 => "r1",
            Self::R3 => "r3",
        }
    }

    /// Pilot OFDM symbols per subframe.
    pub fn tau(self) -> u32 {
        match self {
            Self::R1 => 1,
            Self::R3 => 3,
        }
    }

    /// Share of the subframe spent on training.
    pub fn overhead(self) -> f64 {
        self.tau() as f64 / SUBFRAME_SYMBOLS as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CsiMode {
    Estimated,
    /// Perfect CSI: the precoder sees the true channel.
    Perfect,
}

impl CsiMode {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "estimated" => Some(Self::Estimated),
            "pcsi" => Some(Self::Perfect),
            _ => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Estimated => "estimated",
            Self::Perfect => "pcsi",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PilotPlan {
    pub reuse: Reuse,
    pub tau: u32,
    /// Pilot index of every user, unique within its anchor sector.
    pub pilot_index: Vec<usize>,
    /// Reuse color of every sector.
    pub color: Vec<usize>,
    pub anchor: Vec<usize>,
    contaminators: Vec<Vec<usize>>,
}

impl PilotPlan {
    /// Assigns pilot indices in user order within each sector.
    pub fn new(reuse: Reuse, sector_colors: Vec<usize>, anchors: &[usize]) -> Self {
        let mut next = vec![0usize; sector_colors.len()];
        let pilot_index: Vec<usize> = anchors
            .iter()
            .map(|&s| {
                let p = next[s];
                next[s] += 1;
                p
            })
            .collect();

        let mut groups: std::collections::BTreeMap<(usize, usize), Vec<usize>> = Default::default();
        for (u, (&s, &p)) in anchors.iter().zip(&pilot_index).enumerate() {
            groups.entry((sector_colors[s], p)).or_default().push(u);
        }
        let contaminators = (0..anchors.len())
            .map(|k| {
                groups[&(sector_colors[anchors[k]], pilot_index[k])]
                    .iter()
                    .copied()
                    .filter(|&i| anchors[i] != anchors[k])
                    .collect()
            })
            .collect();

        Self { reuse, tau: reuse.tau(), pilot_index, color: sector_colors, anchor: anchors.to_vec(), contaminators }
    }

    /// Users sharing pilot and color with `k` in other sectors.
    pub fn contaminators(&self, k: usize) -> &[usize] {
        &self.contaminators[k]
    }

    pub fn users(&self) -> usize {
        self.anchor.len()
    }
}

/// Reuse colors of every sector of `layout`.
pub fn sector_colors(layout: &NetworkLayout, reuse: Reuse) -> Vec<usize> {
    (0..layout.sector_count())
        .map(|s| match reuse {
            Reuse::R1 => 0,
            Reuse::R3 => layout.sector_index_in_site(s),
        })
        .collect()
}

pub fn allocate_pilots(layout: &NetworkLayout, anchors: &[usize], reuse: Reuse) -> PilotPlan {
    PilotPlan::new(reuse, sector_colors(layout, reuse), anchors)
}

/// Unit-variance circularly-symmetric Gaussian samples.
pub fn unit_noise<R: Rng + ?Sized>(rng: &mut R, len: usize) -> Vec<C64> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    (0..len)
        .map(|_| {
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            C64::new(re * s, im * s)
        })
        .collect()
}

/// LS estimate of user `k` at its anchor, on all RBs (`N × M`, row-major).
///
/// `at_anchor` holds the channels of every user to the anchor sector.
/// `noise` carries unit-variance samples scaled here by `sqrt(σ²/q_k)`;
/// `None` gives the noiseless estimate.
pub fn ls_estimate_user(
    plan: &PilotPlan,
    k: usize,
    at_anchor: &SectorChannels,
    q: &[f64],
    noise: Option<&[C64]>,
    noise_var: f64,
) -> Result<Vec<C64>> {
    let qk = q[k];
    if !(qk > 0.0) {
        return Err(SimError::config(format!("pilot power of user {k} must be positive, got {qk}")));
    }
    let (rbs, ports) = (at_anchor.rbs(), at_anchor.ports());
    let mut est = Vec::with_capacity(rbs * ports);
    for n in 0..rbs {
        est.extend_from_slice(at_anchor.row(k, n));
    }
    for &i in plan.contaminators(k) {
        let a = (q[i] / qk).sqrt();
        for n in 0..rbs {
            let dst = &mut est[n * ports..(n + 1) * ports];
            for (d, h) in dst.iter_mut().zip(at_anchor.row(i, n)) {
                *d += h * a;
            }
        }
    }
    if let Some(w) = noise {
        let s = (noise_var / qk).sqrt();
        for (d, z) in est.iter_mut().zip(w) {
            *d += z * s;
        }
    }
    Ok(est)
}

/// Estimated channels of every user at its anchor sector.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelEstimate {
    pub mode: CsiMode,
    /// Per user, `N × M` row-major.
    pub rows: Vec<Vec<C64>>,
}

/// LS estimates for every user of a fully materialized tensor. Noise is
/// drawn in user order from `rng`.
pub fn ls_estimate<R: Rng + ?Sized>(
    plan: &PilotPlan,
    channels: &ChannelTensor,
    q: &[f64],
    noise_var: f64,
    rng: &mut R,
) -> Result<ChannelEstimate> {
    let rows = (0..plan.users())
        .map(|k| {
            let at = &channels.sectors[plan.anchor[k]];
            let w = unit_noise(rng, at.rbs() * at.ports());
            ls_estimate_user(plan, k, at, q, Some(&w), noise_var)
        })
        .collect::<Result<_>>()?;
    Ok(ChannelEstimate { mode: CsiMode::Estimated, rows })
}

/// Perfect CSI: the true channels at each anchor.
pub fn perfect_csi(plan: &PilotPlan, channels: &ChannelTensor) -> ChannelEstimate {
    let rows = (0..plan.users())
        .map(|k| {
            let at = &channels.sectors[plan.anchor[k]];
            (0..at.rbs()).flat_map(|n| at.row(k, n).iter().copied()).collect()
        })
        .collect();
    ChannelEstimate { mode: CsiMode::Perfect, rows }
}

/// Pilot SINR of user `k` at its anchor in dB: desired energy over
/// contamination plus noise energy, both summed over RBs and ports.
pub fn estimation_sinr(plan: &PilotPlan, k: usize, at_anchor: &SectorChannels, q: &[f64], noise_var: f64) -> f64 {
    let signal = q[k] * at_anchor.energy(k);
    let contamination: f64 = plan.contaminators(k).iter().map(|&i| q[i] * at_anchor.energy(i)).sum();
    let noise = (at_anchor.rbs() * at_anchor.ports()) as f64 * noise_var;
    10.0 * (signal / (contamination + noise)).log10()
}

/// Per-user estimation SINR, dB.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimationReport {
    pub sinr_db: Vec<f64>,
}

impl EstimationReport {
    pub fn new(plan: &PilotPlan, channels: &ChannelTensor, q: &[f64], noise_var: f64) -> Self {
        let sinr_db = (0..plan.users())
            .map(|k| estimation_sinr(plan, k, &channels.sectors[plan.anchor[k]], q, noise_var))
            .collect();
        Self { sinr_db }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::deployment::build_layout;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn anchors(sectors: usize, k: usize) -> Vec<usize> {
        (0..sectors * k).map(|u| u / k).collect()
    }

    #[test]
    fn reuse_one_shares_everything() {
        let l = build_layout(19, 500.0, 25.0).unwrap();
        let plan = allocate_pilots(&l, &anchors(57, 16), Reuse::R1);
        assert_eq!(plan.tau, 1);
        for k in 0..plan.users() {
            assert_eq!(plan.contaminators(k).len(), 56);
        }
    }

    #[test]
    fn reuse_three_is_orthogonal_within_site() {
        let l = build_layout(19, 500.0, 25.0).unwrap();
        let a = anchors(57, 16);
        let plan = allocate_pilots(&l, &a, Reuse::R3);
        assert_eq!(plan.tau, 3);
        let r1 = allocate_pilots(&l, &a, Reuse::R1);
        for k in 0..plan.users() {
            let c = plan.contaminators(k);
            assert_eq!(c.len(), 18);
            assert!(c.len() < r1.contaminators(k).len());
            assert!(c.iter().all(|&i| l.site_of(a[i]) != l.site_of(a[k])));
            assert!(c.iter().all(|&i| plan.pilot_index[i] == plan.pilot_index[k]));
            // Symmetric relation.
            assert!(c.iter().all(|&i| plan.contaminators(i).contains(&k)));
        }
        // Pilots unique within a sector.
        for s in 0..57 {
            let mut p: Vec<_> = (0..plan.users()).filter(|&u| a[u] == s).map(|u| plan.pilot_index[u]).collect();
            p.sort();
            p.dedup();
            assert_eq!(p.len(), 16);
        }
    }

    #[test]
    fn overheads() {
        assert!((Reuse::R3.overhead() - 3.0 / 14.0).abs() < 1e-15);
        assert!((Reuse::R3.overhead() - 0.214).abs() < 1e-3);
        assert!((Reuse::R1.overhead() - 0.0714).abs() < 1e-3);
    }

    fn two_sector_instance(ports: usize, seed: u64) -> (PilotPlan, ChannelTensor) {
        let plan = PilotPlan::new(Reuse::R1, vec![0, 0], &[0, 1]);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sectors = (0..2)
            .map(|j| {
                let mut s = SectorChannels::zeros(j, 2, 1, ports);
                for u in 0..2 {
                    s.row_mut(u, 0).copy_from_slice(&unit_noise(&mut rng, ports));
                }
                s
            })
            .collect();
        (plan, ChannelTensor::new(sectors))
    }

    #[test]
    fn clean_and_equal_power_estimates() {
        let (plan, t) = two_sector_instance(4, 1);
        let lone = PilotPlan::new(Reuse::R3, vec![0, 1], &[0, 1]);
        let e = ls_estimate_user(&lone, 0, &t.sectors[0], &[1.0, 1.0], None, 0.0).unwrap();
        assert_eq!(e, t.row(0, 0, 0));
        let e = ls_estimate_user(&plan, 0, &t.sectors[0], &[2.0, 2.0], None, 0.0).unwrap();
        for m in 0..4 {
            assert!((e[m] - (t.row(0, 0, 0)[m] + t.row(1, 0, 0)[m])).norm() < 1e-15);
        }
    }

    #[test]
    fn quarter_power_contaminator_has_half_amplitude() {
        let (plan, t) = two_sector_instance(4, 2);
        let full = ls_estimate_user(&plan, 0, &t.sectors[0], &[1.0, 1.0], None, 0.0).unwrap();
        let quarter = ls_estimate_user(&plan, 0, &t.sectors[0], &[1.0, 0.25], None, 0.0).unwrap();
        let h = t.row(0, 0, 0);
        for m in 0..4 {
            assert!(((quarter[m] - h[m]) * 2.0 - (full[m] - h[m])).norm() < 1e-14);
        }
    }

    #[test]
    fn zero_pilot_power_is_config_error() {
        let (plan, t) = two_sector_instance(4, 3);
        assert!(matches!(
            ls_estimate_user(&plan, 0, &t.sectors[0], &[0.0, 1.0], None, 1.0),
            Err(SimError::Config(_))
        ));
    }

    #[test]
    fn perfect_csi_returns_truth() {
        let (plan, t) = two_sector_instance(4, 4);
        let p = perfect_csi(&plan, &t);
        assert_eq!(p.rows[1], t.row(1, 1, 0));
        assert_eq!(p.mode, CsiMode::Perfect);
    }

    #[test]
    fn sinr_reference_cases() {
        let lone = PilotPlan::new(Reuse::R1, vec![0], &[0]);
        let mut s = SectorChannels::zeros(0, 1, 1, 4);
        s.row_mut(0, 0).iter_mut().for_each(|z| *z = C64::new(1.0, 0.0));
        // q‖h‖² = σ² M
        assert!(estimation_sinr(&lone, 0, &s, &[1.0], 1.0).abs() < 1e-12);
        assert!((estimation_sinr(&lone, 0, &s, &[2.0], 1.0) - 10.0 * 2f64.log10()).abs() < 1e-12);
    }

    #[test]
    fn estimation_error_statistics() {
        // Error ĥ - h has zero mean and variance Σ q_i/q_k g_i M + M σ²/q_k per RB.
        let plan = PilotPlan::new(Reuse::R1, vec![0, 0, 0], &[0, 1, 2]);
        let q = [0.5, 2.0, 1.0];
        let gains: [f64; 3] = [1.0, 0.3, 0.1];
        let ports = 8;
        let noise_var = 0.2;
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let trials = 20_000;
        let mut mean = C64::new(0.0, 0.0);
        let mut var = 0.0;
        for _ in 0..trials {
            let mut s = SectorChannels::zeros(0, 3, 1, ports);
            for u in 0..3 {
                let h: Vec<C64> = unit_noise(&mut rng, ports).into_iter().map(|z| z * gains[u as usize].sqrt()).collect();
                s.row_mut(u, 0).copy_from_slice(&h);
            }
            let w = unit_noise(&mut rng, ports);
            let e = ls_estimate_user(&plan, 0, &s, &q, Some(&w), noise_var).unwrap();
            for m in 0..ports {
                let err = e[m] - s.row(0, 0)[m];
                mean += err;
                var += err.norm_sqr();
            }
        }
        let n = (trials * ports) as f64;
        let expect = (q[1] / q[0] * gains[1] + q[2] / q[0] * gains[2]) * ports as f64 + ports as f64 * noise_var / q[0];
        assert!((mean / n).norm() < 0.02);
        let got = var / trials as f64;
        assert!((got / expect - 1.0).abs() < 0.03, "{got} vs {expect}");
    }
}
