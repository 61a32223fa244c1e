//! Ensemble checks of the user drop and association.

use fpcsim::campaign::{realize_drop, CampaignConfig, Network};
use fpcsim::deployment::{build_layout, sample_user, DropParams};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn users(n: usize) -> Vec<fpcsim::deployment::UserTerminal> {
    let layout = build_layout(19, 500.0, 25.0).unwrap();
    let params = DropParams::default();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    (0..n).map(|_| sample_user(&layout, &params, &mut rng)).collect()
}

#[test]
fn indoor_fraction_converges() {
    let u = users(100_000);
    let frac = u.iter().filter(|u| u.indoor).count() as f64 / u.len() as f64;
    assert!((frac - 0.8).abs() < 0.01, "{frac}");
    assert!(u.iter().filter(|u| !u.indoor).all(|u| u.floor == 1 && u.d2d_indoor == 0.0 && u.ue_height() == 1.5));
}

#[test]
fn floor_distribution_within_three_sigma() {
    let indoor: Vec<_> = users(125_000).into_iter().filter(|u| u.indoor).collect();
    let n = indoor.len() as f64;
    for f in 1..=8u32 {
        // Building height B uniform on 4..=8, floor uniform on 1..=B.
        let p: f64 = (f.max(4)..=8).map(|b| 0.2 / b as f64).sum();
        let count = indoor.iter().filter(|u| u.floor == f).count() as f64;
        let sigma = (n * p * (1.0 - p)).sqrt();
        assert!((count - n * p).abs() <= 3.0 * sigma, "floor {f}: {count} vs {}", n * p);
    }
    assert!(indoor.iter().all(|u| (u.ue_height() - (3.0 * (u.floor - 1) as f64 + 1.5)).abs() < 1e-12));
    assert!(indoor.iter().all(|u| (0.0..=25.0).contains(&u.d2d_indoor)));
}

#[test]
fn full_scale_drop_fills_every_sector() {
    let cfg = CampaignConfig::default();
    let net = Network::new(&cfg.scenario).unwrap();
    let real = realize_drop(&net, 7, 0).unwrap();
    assert_eq!(net.sectors(), 57);
    assert_eq!(real.users.len(), 57 * 16);
    let mut loads = vec![0usize; 57];
    for (u, t) in real.users.iter().enumerate() {
        loads[t.anchor_sector] += 1;
        // The anchor is the strongest sector of the user.
        let anchor = real.link(u, t.anchor_sector, 57).attenuation;
        assert!((0..57).all(|s| real.link(u, s, 57).attenuation >= anchor));
    }
    assert!(loads.iter().all(|&l| l == 16));
    // Users are grouped by anchor.
    assert!(real.users.windows(2).all(|w| w[0].anchor_sector <= w[1].anchor_sector));
}
