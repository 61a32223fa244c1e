//! One Monte Carlo drop: deployment, channels, pilot powers, estimation,
//! precoding and KPIs for a set of operating points sharing the same
//! realization.
//!
//! Channels are generated one sector at a time (all users to that sector, on
//! all RBs). That single pass has everything needed to estimate the channels
//! of the sector's own users, build its precoders, and add its contribution
//! to the received signal or interference of every user in the network.

use crate::channel::{generate_clusters, large_scale, ArrayGeometry, LinkBasis, LinkState, SectorChannels};
use crate::deployment::{build_layout, sample_user, strongest_sector, LinkGeometry, NetworkLayout, UserTerminal};
use crate::kpi::{cell_spectral_efficiency, DropKpis, ThroughputModel};
use crate::powerctl::{PowerControlConfig, PowerPlan};
use crate::precoding::precode;
use crate::seed::{drop_attempt_key, stream, Purpose};
use crate::training::{allocate_pilots, estimation_sinr, ls_estimate_user, unit_noise, CsiMode, PilotPlan};
use crate::{Result, SimError, C64};

use super::config::{OperatingPoint, Scenario};

/// Drop attempts before giving up on filling every sector.
pub const MAX_DROP_ATTEMPTS: u32 = 8;
/// Candidate users per required user within one attempt.
const CANDIDATES_PER_USER: usize = 200;

/// Immutable pieces shared by every drop of a scenario.
#[derive(Debug, Clone)]
pub struct Network {
    pub scenario: Scenario,
    pub layout: NetworkLayout,
    pub array: ArrayGeometry,
}

impl Network {
    pub fn new(scenario: &Scenario) -> Result<Self> {
        let layout = build_layout(scenario.sites, scenario.isd, scenario.radio.bs_height_m)?;
        let mut array = ArrayGeometry::with_layout(scenario.ports, scenario.port_layout)?;
        array.downtilt_deg = scenario.downtilt_deg;
        Ok(Self { scenario: scenario.clone(), layout, array })
    }

    pub fn sectors(&self) -> usize {
        self.layout.sector_count()
    }

    pub fn users(&self) -> usize {
        self.sectors() * self.scenario.users_per_sector
    }
}

/// Users and large-scale state of one accepted drop. Users are ordered by
/// anchor sector, then by acceptance order (which is also the pilot index).
#[derive(Debug, Clone, PartialEq)]
pub struct DropRealization {
    pub drop: u64,
    /// Key actually used for the random streams (differs from `drop` after a rejection).
    pub drop_key: u64,
    pub users: Vec<UserTerminal>,
    /// Candidate index of each user, used as its stream entity.
    pub entity: Vec<u64>,
    /// `users × sectors`, row-major.
    pub links: Vec<LinkState>,
    pub geometry: Vec<LinkGeometry>,
    pub rejected_attempts: u32,
    pub pathloss_clamps: u32,
}

impl DropRealization {
    pub fn link(&self, user: usize, sector: usize, sectors: usize) -> &LinkState {
        &self.links[user * sectors + sector]
    }

    pub fn anchors(&self) -> Vec<usize> {
        self.users.iter().map(|u| u.anchor_sector).collect()
    }

    /// Attenuation of every user towards its anchor, dB.
    pub fn anchor_attenuation(&self, sectors: usize) -> Vec<f64> {
        self.users
            .iter()
            .enumerate()
            .map(|(u, t)| self.link(u, t.anchor_sector, sectors).attenuation)
            .collect()
    }
}

/// Drops candidate users until every sector holds exactly K users whose
/// strongest sector it is. Candidates whose strongest sector is already full
/// are discarded. If the candidate budget runs out, the whole drop is
/// re-sampled on a derived stream.
pub fn realize_drop(net: &Network, master_seed: u64, drop: u64) -> Result<DropRealization> {
    let scn = &net.scenario;
    let sectors = net.sectors();
    let k = scn.users_per_sector;
    let needed = sectors * k;

    for attempt in 0..MAX_DROP_ATTEMPTS {
        let key = drop_attempt_key(drop, attempt);
        let mut rng_users = stream(master_seed, Purpose::UserDrop, key, 0);
        let mut loads = vec![0usize; sectors];
        let mut accepted: Vec<(usize, u64, UserTerminal, Vec<LinkState>, Vec<LinkGeometry>)> = Vec::with_capacity(needed);
        let mut candidate = 0u64;

        while accepted.len() < needed && (candidate as usize) < CANDIDATES_PER_USER * needed {
            let mut user = sample_user(&net.layout, &scn.drop, &mut rng_users);
            let mut rng_links = stream(master_seed, Purpose::LargeScale, key, candidate);
            let geoms: Vec<LinkGeometry> = (0..sectors)
                .map(|s| net.layout.link_geometry(&user, s, net.array.downtilt_deg))
                .collect();
            let states: Vec<LinkState> = geoms
                .iter()
                .map(|g| large_scale(g, &user, scn.radio.bs_height_m, &net.array, &scn.channel, &mut rng_links))
                .collect();
            let att: Vec<f64> = states.iter().map(|s| s.attenuation).collect();
            let best = strongest_sector(&att);
            if loads[best] < k {
                loads[best] += 1;
                user.anchor_sector = best;
                accepted.push((best, candidate, user, states, geoms));
            }
            candidate += 1;
        }

        if accepted.len() == needed {
            // Stable: keeps acceptance order inside each sector.
            accepted.sort_by_key(|a| a.0);
            let mut real = DropRealization {
                drop,
                drop_key: key,
                users: Vec::with_capacity(needed),
                entity: Vec::with_capacity(needed),
                links: Vec::with_capacity(needed * sectors),
                geometry: Vec::with_capacity(needed * sectors),
                rejected_attempts: attempt,
                pathloss_clamps: 0,
            };
            for (_, cand, user, states, geoms) in accepted {
                real.pathloss_clamps += states.iter().filter(|s| s.clamped).count() as u32;
                real.users.push(user);
                real.entity.push(cand);
                real.links.extend(states);
                real.geometry.extend(geoms);
            }
            return Ok(real);
        }
        log::warn!("drop {drop} attempt {attempt}: sectors not filled, re-sampling");
    }
    Err(SimError::InfeasibleDrop { drop, per_sector: k, attempts: MAX_DROP_ATTEMPTS })
}

/// Spatial basis of the link between `user` and `sector`.
pub fn link_basis(net: &Network, master_seed: u64, real: &DropRealization, user: usize, sector: usize) -> LinkBasis {
    let sectors = net.sectors();
    let state = real.link(user, sector, sectors);
    let geom = &real.geometry[user * sectors + sector];
    let entity = real.entity[user] * sectors as u64 + sector as u64;
    let mut rng = stream(master_seed, Purpose::Clusters, real.drop_key, entity);
    let clusters = generate_clusters(geom, state.los, &net.scenario.channel, &mut rng);
    LinkBasis::new(&clusters, &net.array, state.attenuation)
}

/// True channels from every user to `sector` on every RB.
pub fn sector_channels(net: &Network, master_seed: u64, real: &DropRealization, sector: usize) -> SectorChannels {
    let rbs = net.scenario.radio.rb_count;
    let freqs: Vec<f64> = (0..rbs).map(|n| net.scenario.radio.rb_center_offset_hz(n)).collect();
    let mut out = SectorChannels::zeros(sector, real.users.len(), rbs, net.array.ports);
    for u in 0..real.users.len() {
        let basis = link_basis(net, master_seed, real, u, sector);
        for (n, &f) in freqs.iter().enumerate() {
            basis.evaluate_into(f, out.row_mut(u, n));
        }
    }
    out
}

/// Unit-variance pilot noise of `user` at its anchor (`N × M`).
pub fn pilot_noise(net: &Network, master_seed: u64, real: &DropRealization, user: usize) -> Vec<C64> {
    let mut rng = stream(master_seed, Purpose::PilotNoise, real.drop_key, real.entity[user]);
    unit_noise(&mut rng, net.scenario.radio.rb_count * net.array.ports)
}

struct PointState {
    point: OperatingPoint,
    plan: PowerPlan,
    signal: Vec<f64>,
    interference: Vec<f64>,
    est_sinr_db: Vec<f64>,
    regularized: u32,
}

/// KPIs of every operating point on one realization.
pub fn evaluate_drop(
    net: &Network,
    master_seed: u64,
    real: &DropRealization,
    points: &[OperatingPoint],
) -> Result<Vec<DropKpis>> {
    let scn = &net.scenario;
    let sectors = net.sectors();
    let users = real.users.len();
    let k = scn.users_per_sector;
    let rbs = scn.radio.rb_count;
    let ports = net.array.ports;

    let anchors = real.anchors();
    let pilots: PilotPlan = allocate_pilots(&net.layout, &anchors, scn.reuse);
    let l_anchor = real.anchor_attenuation(sectors);
    let ul_noise = scn.radio.pilot_noise_mw(scn.reuse.tau(), scn.pilot_despread);
    let dl_noise = scn.radio.downlink_noise_mw();
    let p_rb = scn.radio.bs_power_per_rb_mw();

    let mut states: Vec<PointState> = points
        .iter()
        .map(|&point| {
            let mut pc = PowerControlConfig::new(point.pc, rbs)?;
            pc.p_max_dbm = scn.radio.ue_max_power_dbm;
            Ok(PointState {
                point,
                plan: pc.plan_powers(&l_anchor),
                signal: vec![0.0; users * rbs],
                interference: vec![0.0; users * rbs],
                est_sinr_db: if point.csi == CsiMode::Estimated { vec![f64::NAN; users] } else { Vec::new() },
                regularized: 0,
            })
        })
        .collect::<Result<_>>()?;
    let any_estimated = states.iter().any(|s| s.point.csi == CsiMode::Estimated);

    let mut gains = vec![C64::new(0.0, 0.0); k];
    for j in 0..sectors {
        let chans = sector_channels(net, master_seed, real, j);
        let members: Vec<usize> = (0..users).filter(|&u| anchors[u] == j).collect();
        let noise: Vec<Vec<C64>> = if any_estimated {
            members.iter().map(|&u| pilot_noise(net, master_seed, real, u)).collect()
        } else {
            Vec::new()
        };

        for st in states.iter_mut() {
            // Rows used for precoding, one N × M block per member.
            let csi: Vec<Vec<C64>> = match st.point.csi {
                CsiMode::Perfect => members
                    .iter()
                    .map(|&u| (0..rbs).flat_map(|n| chans.row(u, n).iter().copied()).collect())
                    .collect(),
                CsiMode::Estimated => members
                    .iter()
                    .zip(&noise)
                    .map(|(&u, w)| {
                        st.est_sinr_db[u] = estimation_sinr(&pilots, u, &chans, &st.plan.per_rb_mw, ul_noise);
                        ls_estimate_user(&pilots, u, &chans, &st.plan.per_rb_mw, Some(w), ul_noise)
                    })
                    .collect::<Result<_>>()?,
            };

            let mut h = Vec::with_capacity(members.len() * ports);
            for n in 0..rbs {
                h.clear();
                for rows in &csi {
                    h.extend_from_slice(&rows[n * ports..(n + 1) * ports]);
                }
                let w = precode(scn.criterion, &h, members.len(), ports, p_rb, scn.normalization);
                st.regularized += w.regularized as u32;
                let g = &mut gains[..members.len()];
                for u in 0..users {
                    w.apply_into(chans.row(u, n), g);
                    let idx = u * rbs + n;
                    for (slot, gi) in g.iter().enumerate() {
                        if members[slot] == u {
                            st.signal[idx] += gi.norm_sqr();
                        } else {
                            st.interference[idx] += gi.norm_sqr();
                        }
                    }
                }
            }
        }
    }

    let model = ThroughputModel { rb_bandwidth_hz: scn.radio.rb_bandwidth_hz, se_cap: scn.se_cap };
    let tau = scn.reuse.tau();
    let bandwidth = scn.radio.system_bandwidth_hz();
    Ok(states
        .into_iter()
        .map(|st| {
            let mut throughput = Vec::with_capacity(users);
            let mut dl_sinr_db = Vec::with_capacity(users);
            let mut sinr = vec![0.0; rbs];
            for u in 0..users {
                for n in 0..rbs {
                    let idx = u * rbs + n;
                    sinr[n] = st.signal[idx] / (st.interference[idx] + dl_noise);
                }
                throughput.push(model.user_throughput(&sinr, tau));
                dl_sinr_db.push(10.0 * (sinr.iter().sum::<f64>() / rbs as f64).log10());
            }
            let sector_cse = (0..sectors)
                .map(|j| cell_spectral_efficiency(&throughput[j * k..(j + 1) * k], bandwidth))
                .collect();
            DropKpis {
                throughput_mbps: throughput,
                sector_cse,
                pilot_power_dbm: st.plan.total_dbm,
                estimation_sinr_db: st.est_sinr_db,
                downlink_sinr_db: dl_sinr_db,
                fraction_at_max: st.plan.fraction_at_max,
                zf_regularized: st.regularized,
                rejected_attempts: real.rejected_attempts,
                pathloss_clamps: real.pathloss_clamps,
            }
        })
        .collect())
}

/// Realizes drop `drop` and evaluates every operating point on it.
pub fn run_drop(net: &Network, master_seed: u64, drop: u64, points: &[OperatingPoint]) -> Result<Vec<DropKpis>> {
    let real = realize_drop(net, master_seed, drop)?;
    evaluate_drop(net, master_seed, &real, points)
}
