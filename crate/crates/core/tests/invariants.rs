use dot11ee::dcf::{self, ResolvedPlan};
use dot11ee::energy;
use dot11ee::phy;
use dot11ee::profiles;
use dot11ee::{DcfParams, Mode, TxPower};
use proptest::prelude::*;

fn mode() -> impl Strategy<Value = Mode> {
    (1u8..=8).prop_map(|i| Mode::from_index(i).unwrap())
}

fn plan() -> impl Strategy<Value = ResolvedPlan> {
    (1usize..=10, 1usize..=phy::MAX_PAYLOAD).prop_flat_map(|(n, payload)| {
        (prop::collection::vec(mode(), n), prop::collection::vec(0.0f64..=1.0, n))
            .prop_map(move |(modes, q)| ResolvedPlan::new(payload, modes, q).unwrap())
    })
}

proptest! {
    #[test]
    fn per_is_a_probability_and_falls_with_snr(m in mode(), payload in 1usize..=2304, snr in -10.0f64..40.0, d in 0.01f64..5.0) {
        let lo = phy::packet_error_rate(payload, snr, m).unwrap();
        let hi = phy::packet_error_rate(payload, snr + d, m).unwrap();
        prop_assert!((0.0..=1.0).contains(&lo));
        prop_assert!(hi <= lo);
    }

    #[test]
    fn per_grows_with_payload(m in mode(), a in 1usize..=2304, b in 1usize..=2304, snr in 0.0f64..25.0) {
        let (short, long) = (a.min(b), a.max(b));
        prop_assert!(
            phy::packet_error_rate(short, snr, m).unwrap()
                <= phy::packet_error_rate(long, snr, m).unwrap()
        );
    }

    #[test]
    fn success_distribution_closes(plan in plan()) {
        let d = dcf::p_success(&plan);
        let sum: f64 = d.p_succ_at_n.iter().sum();
        prop_assert!((sum + d.p_fail - 1.0).abs() <= 1e-12);
        prop_assert!((sum - d.p_succ).abs() <= 1e-12);
        prop_assert!(d.p_succ_at_n.iter().all(|&p| (0.0..=1.0).contains(&p)));
    }

    #[test]
    fn goodput_is_bounded_by_the_fastest_mode(plan in plan()) {
        let p = DcfParams::default().with_retry_limit(plan.attempts()).unwrap();
        let g = dcf::goodput(&plan, &p).unwrap();
        let fastest = plan.modes().iter().map(|m| m.rate_mbps()).max().unwrap();
        prop_assert!(g.goodput_mbps >= 0.0);
        prop_assert!(g.goodput_mbps <= f64::from(fastest));
        prop_assert!(g.e_d_data > 0.0);
    }

    #[test]
    fn energy_is_positive_and_grows_with_txp(plan in plan(), idx in 0usize..5, lo in 0.0f64..29.0, d in 0.01f64..1.0) {
        let p = DcfParams::default().with_retry_limit(plan.attempts()).unwrap();
        let profile = &profiles::builtin_profiles()[idx];
        let a = energy::energy_per_frame(&plan, &p, profile, TxPower::from_dbm(lo)).unwrap();
        let b = energy::energy_per_frame(&plan, &p, profile, TxPower::from_dbm(lo + d)).unwrap();
        prop_assert!(a.e_frame_mj >= profile.gamma_xg_mj);
        prop_assert!(b.e_frame_mj >= a.e_frame_mj);
        prop_assert!(a.efficiency_bpj >= 0.0);
    }

    #[test]
    fn transmission_time_is_monotone(m in mode(), a in 1usize..=2304, b in 1usize..=2304) {
        let (short, long) = (a.min(b), a.max(b));
        prop_assert!(phy::t_data(short, m).unwrap() <= phy::t_data(long, m).unwrap());
        prop_assert!(phy::ack_mode_for(m).rate_mbps() <= m.rate_mbps());
    }
}
