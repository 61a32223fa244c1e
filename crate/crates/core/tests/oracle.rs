//! Brute-force cross-checks of the LS estimator, the precoders and the
//! downlink SINR on a tiny two-sector network, and of the streaming drop
//! engine against the materialized-tensor path.

mod common;

use common::rel;
use fpcsim::campaign::engine::{pilot_noise, sector_channels};
use fpcsim::campaign::{evaluate_drop, realize_drop, CampaignConfig, Network, OperatingPoint};
use fpcsim::channel::ChannelTensor;
use fpcsim::kpi::{downlink_sinr, ThroughputModel};
use fpcsim::powerctl::PowerControlConfig;
use fpcsim::precoding::{build_precoders, Criterion};
use fpcsim::training::{allocate_pilots, ls_estimate_user, ChannelEstimate, CsiMode};

#[test]
fn ls_estimate_and_sinr_match_brute_force() {
    for seed in 0..5 {
        let (ls, sinr) = common::oracle_errors(seed);
        assert!(ls < 1e-9, "seed {seed}: LS error {ls}");
        assert!(sinr < 1e-9, "seed {seed}: SINR error {sinr}");
    }
}

#[test]
fn streaming_engine_matches_materialized_path() {
    let cfg = CampaignConfig::from_pairs([
        ("layout.sites", "1"),
        ("array.m", "8"),
        ("sim.k", "2"),
        ("sim.rbs", "3"),
        ("pilot.reuse", "r1"),
        ("pc.preset", "nopc,fpc08"),
        ("csi.mode", "estimated,pcsi"),
    ])
    .unwrap();
    let net = Network::new(&cfg.scenario).unwrap();
    let scn = &net.scenario;
    let seed = 99;
    for criterion in [Criterion::Mrt, Criterion::Zf] {
        let mut net = net.clone();
        net.scenario.criterion = criterion;
        let real = realize_drop(&net, seed, 4).unwrap();
        let kpis = evaluate_drop(&net, seed, &real, &cfg.points).unwrap();

        let tensor = ChannelTensor::new((0..net.sectors()).map(|j| sector_channels(&net, seed, &real, j)).collect());
        let anchors = real.anchors();
        let plan = allocate_pilots(&net.layout, &anchors, scn.reuse);
        let att = real.anchor_attenuation(net.sectors());
        let model = ThroughputModel { rb_bandwidth_hz: scn.radio.rb_bandwidth_hz, se_cap: scn.se_cap };
        let noise_var = scn.radio.pilot_noise_mw(scn.reuse.tau(), scn.pilot_despread);

        for (point, got) in cfg.points.iter().zip(&kpis) {
            let q = PowerControlConfig::new(point.pc, scn.radio.rb_count).unwrap().plan_powers(&att).per_rb_mw;
            let csi = match point.csi {
                CsiMode::Perfect => fpcsim::training::perfect_csi(&plan, &tensor),
                CsiMode::Estimated => ChannelEstimate {
                    mode: CsiMode::Estimated,
                    rows: (0..plan.users())
                        .map(|u| {
                            let w = pilot_noise(&net, seed, &real, u);
                            ls_estimate_user(&plan, u, &tensor.sectors[anchors[u]], &q, Some(&w), noise_var).unwrap()
                        })
                        .collect(),
                },
            };
            let w = build_precoders(
                &plan,
                &csi,
                net.sectors(),
                scn.radio.rb_count,
                net.array.ports,
                criterion,
                scn.normalization,
                scn.radio.bs_power_per_rb_mw(),
            );
            for u in 0..plan.users() {
                let sinr: Vec<f64> = (0..scn.radio.rb_count)
                    .map(|n| downlink_sinr(u, n, &plan, &w, &tensor, scn.radio.downlink_noise_mw()))
                    .collect();
                let thr = model.user_throughput(&sinr, scn.reuse.tau());
                assert!(rel(got.throughput_mbps[u], thr) < 1e-9, "{} user {u}", point.label());
            }
        }
        assert_eq!(cfg.points[2], OperatingPoint::perfect());
    }
}
