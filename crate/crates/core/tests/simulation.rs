//! Statistical checks of the simulator against exact small-case answers.

use pushpull_core::config::{FrameGeometry, HorizonConfig, PowerProfile, TrafficConfig};
use pushpull_core::pmf::binomial;
use pushpull_core::sim::{Network, Simulator};
use pushpull_core::{analyze, Scenario, Scheme};

fn scenario(geometry: FrameGeometry, nodes: u32, pull: u32, lambda_q: f64, alpha: f64) -> Scenario {
    let frame = geometry.with_pull_slots(pull).unwrap();
    let traffic = TrafficConfig::with_alpha(nodes, lambda_q, alpha, frame.duration()).unwrap();
    Scenario::new(frame, traffic, PowerProfile::preset(), HorizonConfig::preset(), Scheme::WakeUp).unwrap()
}

#[test]
fn two_alarms_collide_with_birthday_probability() {
    // N = 2, every node alarmed each frame, 40 push slots, no queries
    let s = scenario(FrameGeometry::preset(), 2, 0, 0.0, 1.0);
    let sim = Simulator::new(&s);
    let mut rng = Simulator::trial_rng(99, 0);
    let frames = 200_000;
    let mut collided = 0u32;
    for _ in 0..frames {
        let mut net = Network::new(2);
        net.nodes[0].alarmed = true;
        net.nodes[1].alarmed = true;
        if sim.step_frame(&mut net, &mut rng).push_collisions == 1 {
            collided += 1;
        }
    }
    let rate = collided as f64 / frames as f64;
    let expected = 1.0 / 40.0;
    let se = (expected * (1.0 - expected) / frames as f64).sqrt();
    assert!((rate - expected).abs() < 4.0 * se, "rate {rate}");
}

#[test]
fn idle_network_spends_exactly_the_listening_energy() {
    let s = scenario(FrameGeometry::preset(), 40, 5, 0.0, 0.0);
    let agg = Simulator::new(&s).monte_carlo(16, 1);
    let expected = 40.0 * 1e-3 * 5.0 * 5.0 * 0.25e-3;
    assert!((agg.e_bar.mean - expected).abs() < 1e-15);
    assert_eq!(agg.e_bar.std_err, 0.0);
    assert_eq!(agg.p_bar_a.mean, 1.0);
    assert!((analyze(&s).e_bar - expected).abs() < 1e-15);
}

#[test]
fn first_alarms_are_binomial() {
    let (nodes, alpha) = (12u32, 0.2);
    let s = scenario(FrameGeometry::preset(), nodes, 3, 10.0, alpha);
    let sim = Simulator::new(&s);
    let trials = 40_000u64;
    let mut counts = vec![0u64; nodes as usize + 1];
    for t in 0..trials {
        let mut rng = Simulator::trial_rng(5, t);
        let mut net = Network::new(nodes);
        sim.step_frame(&mut net, &mut rng);
        counts[net.alarmed_count() as usize] += 1;
    }
    // pool sparse tail cells so each expected count is at least 5
    let law = binomial(nodes, alpha);
    let (mut chi2, mut cells, mut obs_tail, mut exp_tail) = (0.0, 0, 0.0, 0.0);
    for k in 0..=nodes as usize {
        let e = law.get(k) * trials as f64;
        if e >= 5.0 {
            chi2 += (counts[k] as f64 - e).powi(2) / e;
            cells += 1;
        } else {
            obs_tail += counts[k] as f64;
            exp_tail += e;
        }
    }
    if exp_tail > 0.0 {
        chi2 += (obs_tail - exp_tail).powi(2) / exp_tail;
        cells += 1;
    }
    // 99.9% quantile of chi-square with up to 9 degrees of freedom is below 28
    assert!(cells <= 10 && chi2 < 28.0, "chi2 = {chi2} over {cells} cells");
}

#[test]
fn pull_energy_ranks_follow_wus_order() {
    // a single node queried every frame with certainty sits first in the WuS list
    let s = scenario(FrameGeometry::preset(), 1, 2, 1e6, 0.0);
    let sim = Simulator::new(&s);
    let mut net = Network::new(1);
    let o = sim.step_frame(&mut net, &mut Simulator::trial_rng(0, 0));
    assert_eq!(o.queries, 1);
    let exchange = 0.25e-3 * (55e-3 * 4.0 / 7.0 + 50e-3 * 3.0 / 7.0);
    let expected = 0.25e-3 * 1e-3 * 4.0 + exchange;
    assert!((o.energy.e1 - expected).abs() < 1e-15);
    assert_eq!(o.served_queries, 1);
}

#[test]
fn main_radio_idle_cost_is_schedule_listening() {
    let mut s = Scenario::preset_main_radio(0.0, 0.0, 20, 3).unwrap();
    s = s.with_horizon(HorizonConfig::new(4, false).unwrap());
    let agg = Simulator::new(&s).monte_carlo(4, 0);
    let expected = 40.0 * 50e-3 * 3.0 * 0.25e-3;
    assert!((agg.e_bar.mean - expected).abs() < 1e-15);
}
