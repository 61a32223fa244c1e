//! Plain-Rust computations behind the browser bindings.

use fpcsim::campaign::{evaluate_drop, realize_drop, CampaignConfig, Network, OperatingPoint};
use fpcsim::channel::{element_gain, ArrayGeometry};
use fpcsim::kpi::CdfSeries;
use fpcsim::powerctl::{PowerControlConfig, PowerControlMode};
use fpcsim::precoding::dot;
use fpcsim::Result;

/// Pilot power `P_k` (dBm) for `points` attenuations evenly spaced on
/// `[l_min, l_max]` dB.
pub fn power_curve(p0_dbm: f64, alpha: f64, rb_count: usize, l_min: f64, l_max: f64, points: usize) -> Result<Vec<f64>> {
    let pc = PowerControlConfig::new(PowerControlMode::Fpc { p0_dbm, alpha }, rb_count)?;
    let step = if points > 1 { (l_max - l_min) / (points - 1) as f64 } else { 0.0 };
    Ok((0..points).map(|i| pc.fpc_power(l_min + step * i as f64)).collect())
}

/// Horizontal cut of the panel gain (dBi) at zero elevation, azimuth
/// -180..180 in `points` steps, for a beam steered to `steer_az_deg`.
/// Combines the element pattern with the array factor of a conjugate
/// steering beam normalized to unit power.
pub fn beam_cut(ports: usize, steer_az_deg: f64, points: usize) -> Result<Vec<f64>> {
    let array = ArrayGeometry::new(ports)?;
    let w: Vec<_> = array.steering(steer_az_deg, 0.0).into_iter().map(|z| z.conj() / (ports as f64).sqrt()).collect();
    let step = if points > 1 { 360.0 / (points - 1) as f64 } else { 0.0 };
    Ok((0..points)
        .map(|i| {
            let az = -180.0 + step * i as f64;
            let af = dot(&array.steering(az, 0.0), &w).norm_sqr().max(1e-12);
            element_gain(az, 0.0, &array) + 10.0 * af.log10()
        })
        .collect())
}

/// One small network evaluated under noPC and one FPC setting.
pub struct DropSummary {
    pub sites: Vec<f64>,
    pub isd: f64,
    pub users: Vec<f64>,
    pub anchors: Vec<u32>,
    /// Sector boresights, degrees.
    pub orientations: Vec<f64>,
    /// Per point (noPC, FPC).
    pub pilot_power_dbm: [Vec<f64>; 2],
    pub throughput_sorted: [Vec<f64>; 2],
    pub cse: [f64; 2],
    pub cbt: [f64; 2],
}

/// Desk-scale network (7 sites, M=32, K=8, 12 RBs) pooled over `drops`.
pub fn desk_drop(seed: u64, drops: u64, p0_dbm: f64, alpha: f64, reuse: &str, criterion: &str) -> Result<DropSummary> {
    let cfg = CampaignConfig::from_pairs([
        ("layout.sites", "7"),
        ("array.m", "32"),
        ("sim.k", "8"),
        ("sim.rbs", "12"),
        ("pilot.reuse", reuse),
        ("bf.criterion", criterion),
    ])?;
    PowerControlConfig::new(PowerControlMode::Fpc { p0_dbm, alpha }, cfg.scenario.radio.rb_count)?;
    let net = Network::new(&cfg.scenario)?;
    let points = [
        OperatingPoint::estimated(PowerControlMode::NoPc),
        OperatingPoint::estimated(PowerControlMode::Fpc { p0_dbm, alpha }),
    ];

    let mut pooled: [Vec<f64>; 2] = Default::default();
    let mut cse = [0.0; 2];
    let mut first = None;
    for d in 0..drops.max(1) {
        let real = realize_drop(&net, seed, d)?;
        let kpis = evaluate_drop(&net, seed, &real, &points)?;
        for p in 0..2 {
            pooled[p].extend_from_slice(&kpis[p].throughput_mbps);
            cse[p] += kpis[p].mean_cse() / drops.max(1) as f64;
        }
        if first.is_none() {
            first = Some((real, kpis));
        }
    }
    let (real, kpis) = first.expect("at least one drop");
    let cdfs = pooled.map(CdfSeries::new);
    Ok(DropSummary {
        sites: net.layout.site_positions.iter().flatten().copied().collect(),
        isd: net.layout.inter_site_distance,
        users: real.users.iter().flat_map(|u| u.xy()).collect(),
        anchors: real.users.iter().map(|u| u.anchor_sector as u32).collect(),
        orientations: net.layout.sector_orientations.clone(),
        pilot_power_dbm: [kpis[0].pilot_power_dbm.clone(), kpis[1].pilot_power_dbm.clone()],
        cbt: [cdfs[0].percentile(0.05)?, cdfs[1].percentile(0.05)?],
        throughput_sorted: cdfs.map(|c| c.values().to_vec()),
        cse,
    })
}
