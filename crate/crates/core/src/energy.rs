//! Node energy per frame, for the WuR scheme and the always-on main-radio baseline.
//!
//! WuR nodes fall in exactly one of three cases each frame: pulled (case 1),
//! alarmed and contending in the push sub-frame (case 2), or idle listeners (case 3).

use crate::analytic::{Horizon, PullLaw};
use crate::config::{FrameConfig, PowerProfile, Scenario, Scheme};
use crate::pmf::Pmf;

/// Energy of one frame in joules, split by node case.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct EnergyBreakdown {
    pub e1: f64,
    pub e2: f64,
    pub e3: f64,
}

impl EnergyBreakdown {
    pub fn total(&self) -> f64 {
        self.e1 + self.e2 + self.e3
    }
}

impl std::ops::AddAssign for EnergyBreakdown {
    fn add_assign(&mut self, rhs: Self) {
        self.e1 += rhs.e1;
        self.e2 += rhs.e2;
        self.e3 += rhs.e3;
    }
}

/// Law of `n_u = min(Q, n_q)`, the number of WuS actually sent.
pub fn nu_pmf(nq: &Pmf, pull_capacity: u32) -> Pmf {
    let mut probs = vec![0.0; nq.max_value() + 1];
    for (q, p) in nq.iter() {
        probs[q.min(pull_capacity as usize)] += p;
    }
    Pmf::assemble(probs)
}

/// Law of `n_y`, the non-alarmed nodes that receive no WuS.
pub fn ny_pmf(nq: &Pmf, na: &Pmf, nodes: u32, pull_capacity: u32) -> Pmf {
    IdleLaw::new(&PullLaw::new(nq, nodes, pull_capacity)).ny_pmf(na)
}

/// `P(n_y = . | n_a = i)` for every `i`, via `n_z = min(Q, q) - j` and `n_y = N - n_z - i`.
#[derive(Debug, Clone)]
struct IdleLaw {
    rows: Vec<Vec<f64>>,
}

impl IdleLaw {
    fn new(pull: &PullLaw) -> Self {
        let nodes = pull.nodes() as usize;
        let capacity = pull.capacity();
        let nq = pull.query_pmf();
        let rows = (0..=nodes)
            .map(|i| {
                let mut row = vec![0.0; nodes + 1];
                for (q, pq) in nq.iter().filter(|(_, p)| *p > 0.0) {
                    let d = q.min(capacity as usize);
                    for j in 0..=d.min(i) {
                        let hit = crate::analytic::wus_hit_prob(j as u32, q as u32, i as u32, nodes as u32, capacity);
                        if hit > 0.0 {
                            row[nodes - (d - j) - i] += pq * hit;
                        }
                    }
                }
                row
            })
            .collect();
        Self { rows }
    }

    fn ny_pmf(&self, na: &Pmf) -> Pmf {
        let mut probs = vec![0.0; self.rows.len()];
        for (i, pi) in na.iter().filter(|(_, p)| *p > 0.0) {
            for (y, py) in self.rows[i].iter().enumerate() {
                probs[y] += pi * py;
            }
        }
        Pmf::assemble(probs)
    }
}

/// Per-node energy of each case, in joules.
#[derive(Debug, Clone, Copy)]
struct CaseCosts {
    /// Pulled node answering the `n`-th WuS (`n` from 1).
    pulled_base: f64,
    pulled_per_rank: f64,
    /// Alarmed node contending in the push sub-frame.
    push: f64,
    /// Idle listener through the whole pull sub-frame.
    idle: f64,
}

impl CaseCosts {
    fn new(frame: &FrameConfig, power: &PowerProfile, pull_capacity: u32) -> Self {
        let tau = frame.tau();
        let exchange = power.xi_t() * frame.beta_t() + power.xi_r() * frame.beta_r();
        let listen = power.xi_w() * pull_capacity as f64 * (frame.wus_slots() + 1) as f64;
        Self {
            // xi_w (n k_w + n - 1) + exchange = n * xi_w (k_w + 1) + (exchange - xi_w)
            pulled_base: tau * (exchange - power.xi_w()),
            pulled_per_rank: tau * power.xi_w() * (frame.wus_slots() + 1) as f64,
            push: tau * (listen + power.xi_r() * frame.control_slots() as f64 + exchange),
            idle: tau * listen,
        }
    }

    /// Energy of the first `u` pulled nodes together.
    fn pulled_total(&self, u: usize) -> f64 {
        let u = u as f64;
        u * self.pulled_base + self.pulled_per_rank * u * (u + 1.0) / 2.0
    }

    #[cfg(test)]
    fn pulled(&self, rank: usize) -> f64 {
        self.pulled_base + self.pulled_per_rank * rank as f64
    }
}

/// Expected per-case energy of a WuR frame with pull capacity `frame.pull_slots()`.
pub fn energy_frame(frame: &FrameConfig, power: &PowerProfile, nq: &Pmf, na: &Pmf) -> EnergyBreakdown {
    let nodes = na.max_value() as u32;
    let pull = PullLaw::new(nq, nodes, frame.pull_slots());
    let np = pull.np_pmf(na);
    let ny = IdleLaw::new(&pull).ny_pmf(na);
    wur_energy(frame, power, frame.pull_slots(), &nu_pmf(nq, frame.pull_slots()), &np, &ny)
}

fn wur_energy(frame: &FrameConfig, power: &PowerProfile, capacity: u32, nu: &Pmf, np: &Pmf, ny: &Pmf) -> EnergyBreakdown {
    let costs = CaseCosts::new(frame, power, capacity);
    let e1 = nu.expect(|u| costs.pulled_total(u));
    let e2 = if frame.push_slots() == 0 {
        0.0
    } else {
        np.expect(|k| k as f64 * costs.push)
    };
    let e3 = ny.expect(|y| y as f64 * costs.idle);
    EnergyBreakdown { e1, e2, e3 }
}

/// Main-radio baseline energy of one frame, split by contribution.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct MrEnergy {
    /// Every node listens to the `k_s`-slot schedule.
    pub schedule: f64,
    /// Scheduled nodes transmit and receive the ACK.
    pub scheduled: f64,
    /// Unscheduled alarmed nodes contend in the push sub-frame.
    pub push: f64,
}

impl MrEnergy {
    pub fn total(&self) -> f64 {
        self.schedule + self.scheduled + self.push
    }
}

/// Expected baseline energy of one frame; `nq`/`na` laws must come from the `Q'` recursion.
pub fn mr_energy_frame(
    frame: &FrameConfig,
    schedule_slots: u32,
    scheduled_capacity: u32,
    power: &PowerProfile,
    nq: &Pmf,
    na: &Pmf,
) -> MrEnergy {
    let nodes = na.max_value() as u32;
    let np = PullLaw::new(nq, nodes, scheduled_capacity).np_pmf(na);
    mr_energy(frame, schedule_slots, power, nodes, &nu_pmf(nq, scheduled_capacity), &np)
}

fn mr_energy(frame: &FrameConfig, schedule_slots: u32, power: &PowerProfile, nodes: u32, nu: &Pmf, np: &Pmf) -> MrEnergy {
    let tau = frame.tau();
    let exchange = power.xi_t() * frame.beta_t() + power.xi_r() * frame.beta_r();
    let push = if frame.push_slots() == 0 {
        0.0
    } else {
        np.expect(|k| k as f64 * tau * (power.xi_r() * frame.control_slots() as f64 + exchange))
    };
    MrEnergy {
        schedule: nodes as f64 * power.xi_r() * schedule_slots as f64 * tau,
        scheduled: nu.expect(|u| u as f64 * tau * exchange),
        push,
    }
}

/// Per-frame energy over a horizon, in joules.
#[derive(Debug, Clone)]
pub struct EnergySeries {
    /// One entry per evaluated frame (warm-up included); MR frames report
    /// `e1 = scheduled`, `e2 = push`, `e3 = schedule listening`.
    pub frames: Vec<EnergyBreakdown>,
    first: usize,
}

impl EnergySeries {
    /// `E_bar` in joules over the observation window.
    pub fn mean_total(&self) -> f64 {
        let window = &self.frames[self.first..];
        window.iter().map(EnergyBreakdown::total).sum::<f64>() / window.len() as f64
    }

    pub fn mean_breakdown(&self) -> EnergyBreakdown {
        let window = &self.frames[self.first..];
        let mut acc = EnergyBreakdown::default();
        for e in window {
            acc += *e;
        }
        let n = window.len() as f64;
        EnergyBreakdown {
            e1: acc.e1 / n,
            e2: acc.e2 / n,
            e3: acc.e3 / n,
        }
    }
}

/// Energy of every frame of an analytic horizon.
pub fn horizon_energy(scenario: &Scenario, horizon: &Horizon) -> EnergySeries {
    let capacity = scenario.pull_capacity();
    let pull = PullLaw::new(&horizon.nq, scenario.nodes(), capacity);
    let nu = nu_pmf(&horizon.nq, capacity);
    let frames = match scenario.scheme() {
        Scheme::WakeUp => {
            let idle = IdleLaw::new(&pull);
            horizon
                .frames
                .iter()
                .map(|f| wur_energy(scenario.frame(), scenario.power(), capacity, &nu, &f.np, &idle.ny_pmf(&f.na)))
                .collect()
        }
        Scheme::MainRadio(mr) => horizon
            .frames
            .iter()
            .map(|f| {
                let e = mr_energy(scenario.frame(), mr.schedule_slots, scenario.power(), scenario.nodes(), &nu, &f.np);
                EnergyBreakdown {
                    e1: e.scheduled,
                    e2: e.push,
                    e3: e.schedule,
                }
            })
            .collect(),
    };
    EnergySeries {
        frames,
        first: scenario.horizon().first_frame(),
    }
}

/// Delivered packets per frame and the energy it costs to deliver one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EfficiencySummary {
    /// `S_bar = mu_q p_bar_q + mu_a p_bar_a`, packets/frame.
    pub s_bar: f64,
    pub mu_a: f64,
    /// `E_bar / S_bar` in joules; `None` when nothing is ever delivered.
    pub e_per_success: Option<f64>,
}

pub fn efficiency(p_bar_a: f64, p_bar_q: f64, mu_q: f64, mu_a: f64, e_bar: f64) -> EfficiencySummary {
    let s_bar = mu_q * p_bar_q + mu_a * p_bar_a;
    EfficiencySummary {
        s_bar,
        mu_a,
        e_per_success: (s_bar > 0.0).then(|| e_bar / s_bar),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::{np_pmf, query_pmf};
    use crate::config::{FrameGeometry, TrafficConfig};
    use crate::pmf::binomial;

    fn frame(q: u32) -> FrameConfig {
        FrameGeometry::preset().with_pull_slots(q).unwrap()
    }

    #[test]
    fn nu_examples() {
        let t = TrafficConfig::new(40, 10.0, 0.0, 0.01025).unwrap();
        let nq = query_pmf(&t);
        assert_eq!(nu_pmf(&nq, 0), Pmf::point(40, 0));
        assert_eq!(nu_pmf(&nq, 40), nq);
        let nu = nu_pmf(&nq, 1);
        assert!((nu.get(1) - (1.0 - (-4.1f64).exp())).abs() < 1e-12);
    }

    #[test]
    fn ny_examples() {
        let nq = query_pmf(&TrafficConfig::new(40, 10.0, 0.0, 0.01025).unwrap());
        assert_eq!(ny_pmf(&nq, &Pmf::point(40, 0), 40, 0), Pmf::point(40, 40));
        assert_eq!(ny_pmf(&Pmf::point(10, 6), &Pmf::point(10, 0), 10, 4), Pmf::point(10, 6));
        let ny = ny_pmf(&Pmf::point(2, 1), &Pmf::point(2, 1), 2, 1);
        assert!((ny.get(0) - 0.5).abs() < 1e-12 && (ny.get(1) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn idle_population_identity() {
        // E[n_y] + E[n_z] + E[n_a] = N with E[n_z] = E[n_u] - E[n_w]
        let t = TrafficConfig::new(40, 25.0, 0.0, 0.01025).unwrap();
        let nq = query_pmf(&t);
        let na = binomial(40, 0.2);
        for q in [0, 1, 4, 8] {
            let pull = PullLaw::new(&nq, 40, q);
            let nz = nu_pmf(&nq, q).mean() - pull.nw_pmf(&na).mean();
            let ny = ny_pmf(&nq, &na, 40, q).mean();
            assert!((ny + nz + na.mean() - 40.0).abs() < 1e-9, "Q = {q}");
        }
    }

    #[test]
    fn nobody_active_costs_nothing() {
        let nq = Pmf::point(40, 0);
        let na = Pmf::point(40, 0);
        let e = energy_frame(&frame(0), &PowerProfile::preset(), &nq, &na);
        assert_eq!(e.total(), 0.0);
    }

    #[test]
    fn no_push_slots_means_no_push_energy() {
        let nq = query_pmf(&TrafficConfig::new(40, 15.0, 15.0, 0.01025).unwrap());
        let na = binomial(40, 0.3);
        let e = energy_frame(&frame(8), &PowerProfile::preset(), &nq, &na);
        assert_eq!(e.e2, 0.0);
        assert!(e.e1 > 0.0 && e.e3 > 0.0);
    }

    #[test]
    fn pulled_closed_form_matches_sum() {
        let c = CaseCosts::new(&frame(4), &PowerProfile::preset(), 4);
        let p = PowerProfile::preset();
        for u in 0..=6usize {
            let direct: f64 = (1..=u)
                .map(|i| {
                    0.25e-3 * (p.xi_w() * (i * 4 + i - 1) as f64 + p.xi_t() * 4.0 / 7.0 + p.xi_r() * 3.0 / 7.0)
                })
                .sum();
            assert!((c.pulled_total(u) - direct).abs() < 1e-18);
            assert!((c.pulled_total(u) - (1..=u).map(|r| c.pulled(r)).sum::<f64>()).abs() < 1e-18);
        }
    }

    #[test]
    fn mr_idle_network_pays_only_schedule() {
        let fr = FrameGeometry::preset().with_push_slots(25).unwrap();
        let nq = Pmf::point(40, 0);
        let na = Pmf::point(40, 0);
        let e = mr_energy_frame(&fr, 1, 14, &PowerProfile::preset(), &nq, &na);
        assert_eq!(e.total(), 40.0 * 50e-3 * 1.0 * 0.25e-3);
    }

    #[test]
    fn mr_push_matches_np() {
        let fr = FrameGeometry::preset().with_push_slots(25).unwrap();
        let nq = query_pmf(&TrafficConfig::new(40, 15.0, 15.0, 0.01025).unwrap());
        let na = binomial(40, 0.2);
        let e = mr_energy_frame(&fr, 4, 11, &PowerProfile::preset(), &nq, &na);
        let np = np_pmf(&na, &nq, 40, 11);
        let expected = np.mean() * 0.25e-3 * (50e-3 + 55e-3 * 4.0 / 7.0 + 50e-3 * 3.0 / 7.0);
        assert!((e.push - expected).abs() < 1e-15);
    }

    #[test]
    fn efficiency_marks_zero_throughput() {
        let e = efficiency(1.0, 0.0, 0.0, 0.0, 0.0);
        assert_eq!(e.s_bar, 0.0);
        assert_eq!(e.e_per_success, None);
        let e = efficiency(0.5, 0.5, 2.0, 4.0, 3.0);
        assert_eq!(e.s_bar, 3.0);
        assert_eq!(e.e_per_success, Some(1.0));
    }
}
