//! Conservation, ordering and degenerate-case properties of the analytic engine.

use proptest::prelude::*;
use pushpull_core::analytic::{ns_given_np, push_success_given, query_pmf, run_horizon, AlarmRecursion, PushLaw};
use pushpull_core::energy::{energy_frame, horizon_energy};
use pushpull_core::pmf::binomial;
use pushpull_core::{analyze, FrameGeometry, HorizonConfig, PowerProfile, Scenario, Scheme, TrafficConfig};

fn wur(nodes: u32, pull: u32, lambda_q: f64, alpha: f64) -> Scenario {
    let frame = FrameGeometry::preset().with_pull_slots(pull).unwrap();
    let traffic = TrafficConfig::with_alpha(nodes, lambda_q, alpha, frame.duration()).unwrap();
    Scenario::new(frame, traffic, PowerProfile::preset(), HorizonConfig::preset(), Scheme::WakeUp).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn frame_laws_are_consistent(nodes in 2u32..30, pull in 0u32..=8, lambda_q in 0.0f64..60.0, alpha in 0.0f64..0.6) {
        let s = wur(nodes, pull, lambda_q, alpha);
        let h = run_horizon(&s);
        for f in &h.frames {
            prop_assert!((f.na.total() - 1.0).abs() < 1e-9);
            prop_assert!((f.np.total() - 1.0).abs() < 1e-9);
            // pulling only removes contenders
            prop_assert!(f.np.mean() <= f.na.mean() + 1e-9);
            prop_assert!(f.p_i <= f.p_w.min(f.p_p) + 1e-12);
            prop_assert!((0.0..=1.0 + 1e-12).contains(&f.p_a));
            prop_assert!((0.0..=1.0 + 1e-12).contains(&f.p_q));
            prop_assert!((f.p_a - (f.p_w + f.p_p - f.p_i)).abs() < 1e-12);
        }
        // n_a(t+1) = n_f(t) + n_n(t) in expectation
        let rec = AlarmRecursion::new(&s);
        for w in h.frames.windows(2) {
            let nf = rec.push().nf_pmf(&w[0].np);
            let fresh = alpha * (nodes as f64 - w[0].na.mean());
            prop_assert!((w[1].na.mean() - nf.mean() - fresh).abs() < 1e-8);
        }
    }

    #[test]
    fn no_queries_means_push_only(nodes in 2u32..30, pull in 0u32..=8, alpha in 0.0f64..0.6) {
        let s = wur(nodes, pull, 0.0, alpha);
        let h = run_horizon(&s);
        let p_bar_p = h.average(|f| f.p_p);
        prop_assert!((h.summary.p_bar_a - p_bar_p).abs() < 1e-12);
        prop_assert_eq!(h.summary.p_bar_q, 0.0);
    }

    #[test]
    fn mean_successes_match_tagged_probability(k in 0u32..25, slots in 0u32..41) {
        let ns = ns_given_np(k, slots);
        prop_assert!((ns.mean() - k as f64 * push_success_given(k, slots)).abs() < 1e-9);
    }

    #[test]
    fn failures_complement_successes(k in 0usize..20, slots in 1u32..10) {
        let law = PushLaw::new(20, slots);
        let nf: Vec<(usize, f64)> = law.failures_given(k).collect();
        for (f, p) in nf {
            prop_assert!((p - law.successes_given(k).get(k - f)).abs() < 1e-15);
        }
    }
}

#[test]
fn degenerate_cases_hold_exactly() {
    // no pull capacity: no query is ever served
    for lambda in [10.0, 30.0, 50.0] {
        let r = analyze(&Scenario::preset(lambda, lambda, 0).unwrap());
        assert_eq!(r.p_bar_q, 0.0);
    }
    // no push slots: zero contention energy
    let s = Scenario::preset(30.0, 30.0, 8).unwrap();
    assert_eq!(s.push_slots(), 0);
    let e = horizon_energy(&s, &run_horizon(&s));
    assert!(e.frames.iter().all(|f| f.e2 == 0.0));
    // no anomalies: every frame succeeds by convention
    let r = analyze(&wur(40, 4, 20.0, 0.0));
    assert_eq!(r.p_bar_a, 1.0);
}

#[test]
fn query_energy_grows_with_load() {
    let frame = FrameGeometry::preset().with_pull_slots(4).unwrap();
    let power = PowerProfile::preset();
    let na = binomial(40, 0.1);
    let mut last = None;
    for lambda_q in [0.0, 5.0, 10.0, 20.0, 40.0, 80.0] {
        let nq = query_pmf(&TrafficConfig::new(40, lambda_q, 0.0, frame.duration()).unwrap());
        let e = energy_frame(&frame, &power, &nq, &na);
        if let Some(prev) = last {
            assert!(e.e1 >= prev - 1e-18, "E1 fell at lambda_q = {lambda_q}");
        }
        last = Some(e.e1);
    }
}

#[test]
fn listening_energy_grows_with_pull_capacity() {
    let na = binomial(40, 0.1);
    let mut last = 0.0;
    for pull in 0..=8 {
        let frame = FrameGeometry::preset().with_pull_slots(pull).unwrap();
        let nq = query_pmf(&TrafficConfig::new(40, 15.0, 0.0, frame.duration()).unwrap());
        let e = energy_frame(&frame, &PowerProfile::preset(), &nq, &na);
        assert!(e.e3 >= last - 1e-18, "E3 fell at Q = {pull}");
        last = e.e3;
    }
}

#[test]
fn main_radio_never_beats_wake_up_radio() {
    for push in [5, 10, 15, 20, 25, 30, 35] {
        let wur = analyze(&Scenario::preset(15.0, 15.0, FrameGeometry::preset().with_push_slots(push).unwrap().pull_slots()).unwrap());
        for k_s in [1, 4] {
            let mr = analyze(&Scenario::preset_main_radio(15.0, 15.0, push, k_s).unwrap());
            assert!(mr.e_bar >= wur.e_bar, "P = {push}, k_s = {k_s}");
        }
    }
}

#[test]
fn warmup_flag_shifts_the_window() {
    let s = Scenario::preset(20.0, 20.0, 4).unwrap();
    let with = s.with_horizon(HorizonConfig::new(10, true).unwrap());
    let a = run_horizon(&s);
    let b = run_horizon(&with);
    assert_eq!(a.observed().first().unwrap().t, 1);
    assert_eq!(b.observed().first().unwrap().t, 0);
    assert_eq!(b.observed()[0].p_a, 1.0);
    assert!(b.summary.p_bar_a > a.summary.p_bar_a);
}
