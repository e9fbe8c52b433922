use combsync_core::clockmodel::ClockModel;
use combsync_core::quantum::{EstimatorModel, Method};
use combsync_core::synclink::{
    link_efficiency, one_way_offset, run_sync_campaign, simulate_exchange, two_way_offset,
    CampaignConfig, LinkModel,
};
use combsync_core::NoiseSpec;
use proptest::prelude::*;

fn quiet() -> ClockModel {
    ClockModel::new(1.94e14).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn reciprocal_links_cancel(delay in 0.0f64..5e-3, offset in -1e-3f64..1e-3, seed: u64) {
        let link = LinkModel { delay_ab: delay, delay_ba: delay, ..LinkModel::symmetric(1000.0) };
        let rec = simulate_exchange(&quiet(), &quiet(), &link, offset, seed).unwrap();
        prop_assert!((two_way_offset(&rec) - offset).abs() < 1e-15);
        prop_assert!((one_way_offset(&rec, delay) - two_way_offset(&rec)).abs() < 1e-15);
    }

    #[test]
    fn asymmetry_bias_is_independent_of_common_delay(
        common in 0.0f64..5e-3,
        delta in -1e-6f64..1e-6,
        offset in -1e-6f64..1e-6,
    ) {
        let link = LinkModel { delay_ab: common + delta, delay_ba: common, ..LinkModel::symmetric(1000.0) };
        let rec = simulate_exchange(&quiet(), &quiet(), &link, offset, 0).unwrap();
        prop_assert!((two_way_offset(&rec) - offset - delta / 2.0).abs() < 1e-17 + 1e-15 * common);
    }

    #[test]
    fn efficiency_stays_in_unit_interval(km in 1.0f64..5000.0, seed: u64) {
        let eta = link_efficiency(&LinkModel::leo_inter_satellite(km), seed).unwrap();
        prop_assert!((0.0..=1.0).contains(&eta));
    }
}

#[test]
fn efficiency_is_monotone_in_distance() {
    let mut prev = f64::INFINITY;
    for i in 0..200 {
        let km = 1.0 + 25.0 * i as f64;
        let link = LinkModel { pointing_sigma: 0.0, ..LinkModel::leo_inter_satellite(km) };
        let eta = link_efficiency(&link, 0).unwrap();
        assert!(eta <= prev);
        prev = eta;
        assert!(link.mean_efficiency().unwrap() <= eta + 1e-15);
    }
}

#[test]
fn campaign_error_shrinks_with_photon_number() {
    let sigma_at = |n: f64| {
        let mut cfg = CampaignConfig::new(quiet(), quiet(), LinkModel::symmetric(100.0), 1.0);
        cfg.estimator = Some(EstimatorModel { method: Method::TemporalMode, n, nu0: 1.92e14, t0: 1e-13, r: 0.0 });
        run_sync_campaign(&cfg, 4096, 17).unwrap().sigma_dt
    };
    let ratio = sigma_at(1e4) / sigma_at(2e4);
    assert!((ratio / 2f64.sqrt() - 1.0).abs() < 0.1, "{ratio}");
}

#[test]
fn campaign_is_reproducible() {
    let clock = quiet().with_noise(NoiseSpec::white_pm_with_rms(1e-12, 1.0, 0));
    let mut cfg = CampaignConfig::new(clock.clone(), clock, LinkModel::leo_inter_satellite(100.0), 1.0);
    cfg.estimator = Some(EstimatorModel { method: Method::TemporalMode, n: 1e4, nu0: 1.92e14, t0: 1e-13, r: 0.5 });
    let a = run_sync_campaign(&cfg, 512, 3).unwrap();
    let b = run_sync_campaign(&cfg, 512, 3).unwrap();
    let c = run_sync_campaign(&cfg, 512, 4).unwrap();
    assert_eq!(a, b);
    assert_ne!(a.trials, c.trials);
}
