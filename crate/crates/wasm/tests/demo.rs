use fpcsim_wasm::demo;

#[test]
fn power_curve_follows_the_law() {
    let c = demo::power_curve(-60.0, 0.5, 50, 100.0, 160.0, 4).unwrap();
    let oracle = |l: f64| (-60.0 + 10.0 * 50f64.log10() + 0.5 * l).min(23.0);
    for (i, p) in c.iter().enumerate() {
        assert!((p - oracle(100.0 + 20.0 * i as f64)).abs() < 1e-12);
    }
    assert!(demo::power_curve(-60.0, 1.5, 50, 100.0, 160.0, 4).is_err());
}

#[test]
fn beam_cut_peaks_at_steering_angle() {
    let cut = demo::beam_cut(64, 30.0, 361).unwrap();
    let peak = (0..cut.len()).max_by(|&a, &b| cut[a].partial_cmp(&cut[b]).unwrap()).unwrap();
    let az = -180.0 + peak as f64;
    assert!((az - 30.0).abs() <= 3.0, "{az}");
    // A unit-power beam over 64 ports gains at most 10 log10(64) over the element.
    assert!(cut[peak] <= 8.0 + 10.0 * 64f64.log10() + 1e-9);
    assert!(demo::beam_cut(60, 0.0, 10).is_err());
}

#[test]
fn desk_drop_summary_is_consistent() {
    let s = demo::desk_drop(1, 2, -100.0, 0.8, "r3", "zf").unwrap();
    assert_eq!(s.sites.len(), 14);
    assert_eq!(s.anchors.len(), 21 * 8);
    assert_eq!(s.users.len(), 2 * 21 * 8);
    assert_eq!(s.throughput_sorted[0].len(), 2 * 21 * 8);
    assert!(s.pilot_power_dbm[0].iter().all(|&p| p == 23.0));
    assert!(s.pilot_power_dbm[1].iter().all(|&p| p <= 23.0));
    assert!(s.cbt[1] > s.cbt[0]);
    assert!(demo::desk_drop(1, 1, -100.0, 0.8, "r2", "zf").is_err());
}
