//! Large-scale attenuation and per-RB small-scale channel vectors.
//!
//! Path loss, LOS probability and the element pattern follow the 3GPP UMa
//! formulas. Fast fading uses a reduced clustered model: a handful of
//! single-ray clusters with Laplacian angular spread around the LOS
//! direction, an exponential power-delay profile and a per-cluster
//! polarization response. See [`smallscale`].

mod array;
pub mod smallscale;
mod tensor;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::deployment::{LinkGeometry, UserTerminal};

pub use array::{ArrayGeometry, PortLayout, Polarization};
pub use smallscale::{generate_clusters, small_scale, ClusterState, LinkBasis};
pub use tensor::{ChannelTensor, SectorChannels};

/// Parameters of the propagation model.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelParams {
    pub carrier_ghz: f64,
    pub sigma_sf_los_db: f64,
    pub sigma_sf_nlos_db: f64,
    /// Composite outer-wall loss for indoor users, dB.
    pub o2i_wall_db: f64,
    /// Additional indoor loss per metre of penetration depth, dB/m.
    pub o2i_per_m_db: f64,
    pub clusters_los: usize,
    pub clusters_nlos: usize,
    /// RMS azimuth spread of the cluster angles around the LOS direction, deg.
    pub asd_deg: f64,
    /// RMS elevation spread, deg.
    pub zsd_deg: f64,
    pub delay_spread_s: f64,
    /// Cross-polarization power ratio, dB.
    pub xpr_db: f64,
    /// Power of the specular component relative to the diffuse clusters in LOS, dB.
    pub ricean_k_db: f64,
    /// Per-cluster log-normal power perturbation, dB.
    pub cluster_shadow_db: f64,
}

impl Default for ChannelParams {
    fn default() -> Self {
        Self {
            carrier_ghz: 2.0,
            sigma_sf_los_db: 4.0,
            sigma_sf_nlos_db: 6.0,
            o2i_wall_db: 20.0,
            o2i_per_m_db: 0.5,
            clusters_los: 8,
            clusters_nlos: 12,
            asd_deg: 10.0,
            zsd_deg: 5.0,
            delay_spread_s: 300e-9,
            xpr_db: 8.0,
            ricean_k_db: 9.0,
            cluster_shadow_db: 3.0,
        }
    }
}

/// Large-scale state of one (user, sector) link.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkState {
    pub los: bool,
    pub pathloss: f64,
    pub shadowing: f64,
    pub o2i_loss: f64,
    pub element_gain: f64,
    /// Total attenuation `pathloss + shadowing + o2i_loss - element_gain`, dB.
    pub attenuation: f64,
    /// The 2D distance fell outside the model range and was clamped.
    pub clamped: bool,
}

impl LinkState {
    /// Linear power gain `10^(-L/10)`.
    pub fn gain(&self) -> f64 {
        10f64.powf(-self.attenuation / 10.0)
    }
}

/// UMa LOS probability for an outdoor 2D distance and UE height.
pub fn los_probability(d2d: f64, ue_height: f64) -> f64 {
    if d2d <= 18.0 {
        return 1.0;
    }
    let c = if ue_height <= 13.0 {
        0.0
    } else {
        ((ue_height - 13.0) / 10.0).powf(1.5)
    };
    let base = 18.0 / d2d + (-d2d / 63.0).exp() * (1.0 - 18.0 / d2d);
    let boost = 1.0 + c * 1.25 * (d2d / 100.0).powi(3) * (-d2d / 150.0).exp();
    (base * boost).clamp(0.0, 1.0)
}

pub const PATHLOSS_MIN_D2D: f64 = 10.0;
pub const PATHLOSS_MAX_D2D: f64 = 5000.0;
/// Effective environment height used in the breakpoint distance, m.
const ENV_HEIGHT_M: f64 = 1.0;

/// UMa path loss in dB. Returns `(pathloss, clamped)`, where `clamped` reports
/// that `d2d` was outside `[10 m, 5 km]` and was pulled back into range.
pub fn pathloss_uma(d2d: f64, bs_height: f64, ue_height: f64, los: bool, carrier_ghz: f64) -> (f64, bool) {
    let d = d2d.clamp(PATHLOSS_MIN_D2D, PATHLOSS_MAX_D2D);
    let clamped = d != d2d;
    let dh = bs_height - ue_height;
    let d3d = (d * d + dh * dh).sqrt();
    let fc_term = 20.0 * carrier_ghz.log10();

    let d_bp = 4.0 * (bs_height - ENV_HEIGHT_M) * (ue_height - ENV_HEIGHT_M) * carrier_ghz * 1e9
        / crate::radio::SPEED_OF_LIGHT;
    let pl_los = if d <= d_bp {
        28.0 + 22.0 * d3d.log10() + fc_term
    } else {
        28.0 + 40.0 * d3d.log10() + fc_term - 9.0 * (d_bp * d_bp + dh * dh).log10()
    };
    if los {
        return (pl_los, clamped);
    }
    let pl_nlos = 13.54 + 39.08 * d3d.log10() + fc_term - 0.6 * (ue_height - 1.5);
    (pl_los.max(pl_nlos), clamped)
}

/// Parabolic element pattern: `G_max - min(A_az + A_zen, FBR)` with each
/// plane attenuating `min(12 (θ/HPBW)², FBR)`.
pub fn element_gain(az_off: f64, zen_off: f64, array: &ArrayGeometry) -> f64 {
    let plane = |theta: f64, hpbw: f64| (12.0 * (theta / hpbw).powi(2)).min(array.fbr_db);
    let att = (plane(az_off, array.hpbw_az_deg) + plane(zen_off, array.hpbw_zen_deg)).min(array.fbr_db);
    array.element_gain_max_dbi - att
}

/// Draws the large-scale state of a link: LOS from [`los_probability`], then
/// log-normal shadowing with the LOS or NLOS deviation.
pub fn large_scale<R: Rng + ?Sized>(
    geom: &LinkGeometry,
    user: &UserTerminal,
    bs_height: f64,
    array: &ArrayGeometry,
    params: &ChannelParams,
    rng: &mut R,
) -> LinkState {
    let d2d_out = (geom.d2d - user.d2d_indoor).max(0.0);
    let los = rng.gen::<f64>() < los_probability(d2d_out, user.ue_height());
    let z: f64 = StandardNormal.sample(rng);
    let sigma = if los { params.sigma_sf_los_db } else { params.sigma_sf_nlos_db };

    let (pathloss, clamped) = pathloss_uma(geom.d2d, bs_height, user.ue_height(), los, params.carrier_ghz);
    let shadowing = sigma * z;
    let o2i_loss = if user.indoor {
        params.o2i_wall_db + params.o2i_per_m_db * user.d2d_indoor
    } else {
        0.0
    };
    let element_gain = element_gain(geom.az_offset, geom.zen_offset, array);
    LinkState {
        los,
        pathloss,
        shadowing,
        o2i_loss,
        element_gain,
        attenuation: pathloss + shadowing + o2i_loss - element_gain,
        clamped,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn los_probability_shape() {
        assert_eq!(los_probability(10.0, 1.5), 1.0);
        assert_eq!(los_probability(18.0, 22.5), 1.0);
        assert!(los_probability(1e5, 1.5) < 1e-3);
        // Hand evaluation: 18/100 + exp(-100/63)·(1 - 0.18)
        let oracle = 0.18 + (-100.0f64 / 63.0).exp() * 0.82;
        assert!((los_probability(100.0, 1.5) - oracle).abs() < 1e-12);
        assert!((oracle - 0.347_671).abs() < 1e-5);
        let mut prev = 1.0;
        for d in (18..3000).step_by(7) {
            let p = los_probability(d as f64, 1.5);
            assert!(p <= prev + 1e-15);
            prev = p;
        }
    }

    #[test]
    fn high_ue_is_more_likely_los() {
        assert!(los_probability(100.0, 22.5) > los_probability(100.0, 1.5));
    }

    #[test]
    fn pathloss_los_reference_point() {
        let (pl, clamped) = pathloss_uma(100.0, 25.0, 1.5, true, 2.0);
        let d3d = (100.0f64.powi(2) + 23.5f64.powi(2)).sqrt();
        assert!((d3d - 102.72).abs() < 5e-3);
        let oracle = 28.0 + 22.0 * d3d.log10() + 20.0 * 2f64.log10();
        assert!(!clamped);
        assert!((pl - oracle).abs() < 1e-12);
        assert!((pl - 78.28).abs() < 0.01);
    }

    #[test]
    fn pathloss_nlos_dominates_and_frequency_scaling() {
        for d in [20.0, 100.0, 400.0, 1200.0] {
            let los = pathloss_uma(d, 25.0, 1.5, true, 2.0).0;
            let nlos = pathloss_uma(d, 25.0, 1.5, false, 2.0).0;
            assert!(nlos >= los);
        }
        // Keep the breakpoint beyond d2d for both carriers.
        let a = pathloss_uma(100.0, 25.0, 1.5, true, 2.0).0;
        let b = pathloss_uma(100.0, 25.0, 1.5, true, 4.0).0;
        assert!((b - a - 20.0 * 2f64.log10()).abs() < 1e-12);
    }

    #[test]
    fn pathloss_clamps_out_of_range_distance() {
        let (pl, clamped) = pathloss_uma(2.0, 25.0, 1.5, true, 2.0);
        assert!(clamped);
        assert_eq!(pl, pathloss_uma(10.0, 25.0, 1.5, true, 2.0).0);
        assert!(pathloss_uma(9000.0, 25.0, 1.5, false, 2.0).1);
    }

    #[test]
    fn element_pattern_reference_values() {
        let a = ArrayGeometry::new(64).unwrap();
        assert!((element_gain(0.0, 0.0, &a) - 8.0).abs() < 1e-12);
        assert!((element_gain(32.5, 0.0, &a) - 5.0).abs() < 1e-12);
        assert!((element_gain(180.0, 0.0, &a) + 22.0).abs() < 1e-12);
        assert!((element_gain(60.0, 60.0, &a) + 12.449_704).abs() < 1e-6);
        assert!((element_gain(60.0, 90.0, &a) + 22.0).abs() < 1e-12);
    }

    fn user(indoor: bool) -> UserTerminal {
        UserTerminal {
            position: [200.0, 0.0, 1.5],
            indoor,
            floor: 1,
            d2d_indoor: if indoor { 10.0 } else { 0.0 },
            anchor_sector: 0,
        }
    }

    fn geom(d2d: f64) -> LinkGeometry {
        LinkGeometry { d2d, d3d: (d2d * d2d + 23.5f64.powi(2)).sqrt(), az_offset: 10.0, zen_offset: 2.0, chosen_wrap: 0 }
    }

    #[test]
    fn large_scale_composition() {
        let a = ArrayGeometry::new(64).unwrap();
        let p = ChannelParams::default();
        let s = large_scale(&geom(200.0), &user(false), 25.0, &a, &p, &mut ChaCha8Rng::seed_from_u64(4));
        assert_eq!(s.o2i_loss, 0.0);
        assert!((s.attenuation - (s.pathloss + s.shadowing + s.o2i_loss - s.element_gain)).abs() < 1e-12);
        let again = large_scale(&geom(200.0), &user(false), 25.0, &a, &p, &mut ChaCha8Rng::seed_from_u64(4));
        assert_eq!(s, again);
        let indoor = large_scale(&geom(200.0), &user(true), 25.0, &a, &p, &mut ChaCha8Rng::seed_from_u64(4));
        assert!((indoor.o2i_loss - 25.0).abs() < 1e-12);
        assert!(s.attenuation > 0.0);
    }

    #[test]
    fn nlos_shadowing_deviation() {
        let a = ArrayGeometry::new(64).unwrap();
        let p = ChannelParams::default();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        // Far links are NLOS with overwhelming probability; keep only NLOS draws.
        let samples: Vec<f64> = (0..200_000)
            .map(|_| large_scale(&geom(2000.0), &user(false), 25.0, &a, &p, &mut rng))
            .filter(|s| !s.los)
            .map(|s| s.shadowing)
            .take(100_000)
            .collect();
        assert_eq!(samples.len(), 100_000);
        let n = samples.len() as f64;
        let mean = samples.iter().sum::<f64>() / n;
        let std = (samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
        assert!(mean.abs() < 0.1);
        assert!((std - 6.0).abs() < 0.1, "std {std}");
    }
}
