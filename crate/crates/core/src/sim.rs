//! Node-level Monte Carlo simulation of the dual-mode MAC.
//!
//! Trials are seeded from one master seed: trial `n` uses
//! `ChaCha8Rng::seed_from_u64(seed)` switched to stream `n`, so every trial owns an
//! independent, reproducible stream regardless of how trials are scheduled.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use rayon::prelude::*;

use crate::config::{Scenario, Scheme};
use crate::energy::{efficiency, EfficiencySummary, EnergyBreakdown};

#[derive(Debug, Clone, PartialEq)]
pub struct NodeState {
    pub id: u32,
    pub alarmed: bool,
    /// Energy spent since the start of the trial, in joules.
    pub energy_j: f64,
}

/// Population of nodes plus scratch space reused across frames.
#[derive(Debug, Clone)]
pub struct Network {
    pub nodes: Vec<NodeState>,
    ids: Vec<u32>,
    was_alarmed: Vec<bool>,
    pulled: Vec<bool>,
    slot_load: Vec<u32>,
    choice: Vec<u32>,
}

impl Network {
    /// `nodes` nodes, none alarmed.
    pub fn new(nodes: u32) -> Self {
        Self {
            nodes: (0..nodes)
                .map(|id| NodeState {
                    id,
                    alarmed: false,
                    energy_j: 0.0,
                })
                .collect(),
            ids: (0..nodes).collect(),
            was_alarmed: vec![false; nodes as usize],
            pulled: vec![false; nodes as usize],
            slot_load: Vec::new(),
            choice: vec![0; nodes as usize],
        }
    }

    pub fn alarmed_count(&self) -> u32 {
        self.nodes.iter().filter(|n| n.alarmed).count() as u32
    }
}

/// Everything that happened in one simulated frame.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FrameOutcome {
    /// Alarmed nodes at the start of the frame (`n_a`).
    pub alarmed: u32,
    /// Queries collected (`n_q`).
    pub queries: u32,
    /// Distinct queried ids; the first `min(q, Q)` receive a WuS.
    pub ids_queried: Vec<u32>,
    /// Alarmed nodes that received a WuS (`n_w`).
    pub pulled_alarms: u32,
    /// Queries answered with the requested data.
    pub served_queries: u32,
    /// Push contenders (`n_p`).
    pub push_attempts: u32,
    /// Slots with exactly one contender (`n_s`).
    pub push_successes: u32,
    /// Slots with two or more contenders.
    pub push_collisions: u32,
    /// Contenders that stay alarmed (`n_f`).
    pub push_failures: u32,
    /// Non-alarmed nodes that received no WuS (`n_y`).
    pub idle: u32,
    /// Alarms raised during this frame, active from the next one (`n_n`).
    pub new_alarms: u32,
    pub energy: EnergyBreakdown,
}

impl FrameOutcome {
    /// Delivered fraction of this frame's alarms; 1 when there were none.
    pub fn alarm_success(&self) -> f64 {
        if self.alarmed == 0 {
            1.0
        } else {
            (self.pulled_alarms + self.push_successes) as f64 / self.alarmed as f64
        }
    }

    /// Served fraction of this frame's queries; 0 when there were none.
    pub fn query_success(&self) -> f64 {
        if self.queries == 0 {
            0.0
        } else {
            self.served_queries as f64 / self.queries as f64
        }
    }
}

/// Resolved per-frame parameters of one scenario.
#[derive(Debug, Clone)]
pub struct Simulator {
    scenario: Scenario,
    queries: Option<Poisson<f64>>,
}

impl Simulator {
    pub fn new(scenario: &Scenario) -> Self {
        let mu = scenario.traffic().mu_q();
        Self {
            scenario: *scenario,
            queries: (mu > 0.0).then(|| Poisson::new(mu).expect("finite positive mean")),
        }
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    fn draw_queries<R: Rng + ?Sized>(&self, rng: &mut R) -> u32 {
        match &self.queries {
            Some(dist) => (dist.sample(rng) as u64).min(self.scenario.nodes() as u64) as u32,
            None => 0,
        }
    }

    /// Advances `net` by one frame.
    pub fn step_frame<R: Rng + ?Sized>(&self, net: &mut Network, rng: &mut R) -> FrameOutcome {
        let s = &self.scenario;
        let frame = s.frame();
        let power = s.power();
        let tau = frame.tau();
        let capacity = s.pull_capacity();
        let push_slots = s.push_slots();
        let exchange = tau * (power.xi_t() * frame.beta_t() + power.xi_r() * frame.beta_r());
        let pull_period = frame.wus_slots() + 1;

        let mut out = FrameOutcome::default();
        for (k, n) in net.nodes.iter().enumerate() {
            net.was_alarmed[k] = n.alarmed;
            net.pulled[k] = false;
        }
        out.alarmed = net.was_alarmed.iter().filter(|a| **a).count() as u32;

        // pull sub-frame
        out.queries = self.draw_queries(rng);
        let (queried, _) = net.ids.partial_shuffle(rng, out.queries as usize);
        out.ids_queried = queried.to_vec();
        let sent = out.queries.min(capacity) as usize;
        for (rank0, &id) in out.ids_queried[..sent].iter().enumerate() {
            let k = id as usize;
            net.pulled[k] = true;
            let node = &mut net.nodes[k];
            if node.alarmed {
                node.alarmed = false;
                out.pulled_alarms += 1;
            } else {
                out.served_queries += 1;
            }
            let e = match s.scheme() {
                // WuR on through `rank` WuSs and the `rank - 1` earlier pull slots
                Scheme::WakeUp => {
                    let rank = rank0 as u32 + 1;
                    tau * power.xi_w() * (rank * frame.wus_slots() + rank - 1) as f64 + exchange
                }
                Scheme::MainRadio(_) => exchange,
            };
            node.energy_j += e;
            out.energy.e1 += e;
        }

        // push sub-frame
        let contenders: Vec<usize> = (0..net.nodes.len()).filter(|&k| net.nodes[k].alarmed).collect();
        out.push_attempts = contenders.len() as u32;
        if push_slots > 0 && !contenders.is_empty() {
            net.slot_load.clear();
            net.slot_load.resize(push_slots as usize, 0);
            for &k in &contenders {
                let slot = rng.random_range(0..push_slots);
                net.choice[k] = slot;
                net.slot_load[slot as usize] += 1;
            }
            for &k in &contenders {
                if net.slot_load[net.choice[k] as usize] == 1 {
                    net.nodes[k].alarmed = false;
                    out.push_successes += 1;
                }
            }
            out.push_collisions = net.slot_load.iter().filter(|&&l| l >= 2).count() as u32;
            let listen = match s.scheme() {
                Scheme::WakeUp => tau * power.xi_w() * (capacity * pull_period) as f64,
                Scheme::MainRadio(_) => 0.0,
            };
            let e = listen + tau * power.xi_r() * frame.control_slots() as f64 + exchange;
            for &k in &contenders {
                net.nodes[k].energy_j += e;
                out.energy.e2 += e;
            }
        }
        out.push_failures = out.push_attempts - out.push_successes;

        // idle listeners and, for the baseline, the schedule everyone decodes
        for k in 0..net.nodes.len() {
            if !net.was_alarmed[k] && !net.pulled[k] {
                out.idle += 1;
                if let Scheme::WakeUp = s.scheme() {
                    let e = tau * power.xi_w() * (capacity * pull_period) as f64;
                    net.nodes[k].energy_j += e;
                    out.energy.e3 += e;
                }
            }
            if let Scheme::MainRadio(mr) = s.scheme() {
                let e = tau * power.xi_r() * mr.schedule_slots as f64;
                net.nodes[k].energy_j += e;
                out.energy.e3 += e;
            }
        }

        // anomalies detected now raise the alarm from the next frame on
        let alpha = s.traffic().alpha();
        for k in 0..net.nodes.len() {
            if !net.was_alarmed[k] && rng.random_bool(alpha) {
                net.nodes[k].alarmed = true;
                out.new_alarms += 1;
            }
        }
        out
    }

    /// One trial: the warm-up frame (unless the horizon observes it) followed by `T_O`
    /// recorded frames.
    pub fn run_trial<R: Rng + ?Sized>(&self, rng: &mut R) -> TrialMetrics {
        let horizon = self.scenario.horizon();
        let mut net = Network::new(self.scenario.nodes());
        let mut metrics = TrialMetrics::default();
        for t in 0..horizon.frames_needed() {
            let outcome = self.step_frame(&mut net, rng);
            if t >= horizon.first_frame() {
                metrics.record(&outcome);
            }
        }
        metrics
    }

    pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(trial);
        rng
    }

    /// `n_trials` independent trials on the rayon pool, reduced in trial order.
    pub fn monte_carlo(&self, n_trials: u64, seed: u64) -> Aggregate {
        assert!(n_trials >= 1, "need at least one trial");
        let trials: Vec<TrialSummary> = (0..n_trials)
            .into_par_iter()
            .map(|n| self.run_trial(&mut Self::trial_rng(seed, n)).summary())
            .collect();
        Aggregate::from_trials(&trials, self.scenario.traffic().mu_q(), seed)
    }
}

/// Per-frame record of one trial's observed frames.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TrialMetrics {
    pub alarm_success: Vec<f64>,
    pub query_success: Vec<f64>,
    pub alarmed: Vec<u32>,
    pub energy: Vec<EnergyBreakdown>,
}

impl TrialMetrics {
    fn record(&mut self, o: &FrameOutcome) {
        self.alarm_success.push(o.alarm_success());
        self.query_success.push(o.query_success());
        self.alarmed.push(o.alarmed);
        self.energy.push(o.energy);
    }

    fn mean(xs: impl ExactSizeIterator<Item = f64>) -> f64 {
        let n = xs.len() as f64;
        xs.sum::<f64>() / n
    }

    pub fn summary(&self) -> TrialSummary {
        TrialSummary {
            p_bar_a: Self::mean(self.alarm_success.iter().copied()),
            p_bar_q: Self::mean(self.query_success.iter().copied()),
            e_bar: Self::mean(self.energy.iter().map(EnergyBreakdown::total)),
            mu_a: Self::mean(self.alarmed.iter().map(|&a| a as f64)),
        }
    }
}

/// Horizon averages of one trial.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialSummary {
    pub p_bar_a: f64,
    pub p_bar_q: f64,
    /// Joules per frame.
    pub e_bar: f64,
    pub mu_a: f64,
}

/// Trial mean and its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub mean: f64,
    /// Sample standard deviation over `sqrt(trials)`; zero for a single trial.
    pub std_err: f64,
}

impl Estimate {
    pub fn from_samples(xs: &[f64]) -> Self {
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let std_err = if xs.len() < 2 {
            0.0
        } else {
            let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
            (var / n).sqrt()
        };
        Self { mean, std_err }
    }

    /// `(mean - reference) / std_err`; infinite when the estimate is exact but off.
    pub fn z_score(&self, reference: f64) -> f64 {
        let diff = self.mean - reference;
        if self.std_err > 0.0 {
            diff / self.std_err
        } else if diff == 0.0 {
            0.0
        } else {
            diff.signum() * f64::INFINITY
        }
    }
}

/// Monte Carlo estimates across trials.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Aggregate {
    pub trials: u64,
    pub seed: u64,
    pub p_bar_a: Estimate,
    pub p_bar_q: Estimate,
    /// Joules per frame.
    pub e_bar: Estimate,
    pub mu_a: Estimate,
    /// Plug-in `S_bar` and `E_bar / S_bar` from the trial means.
    pub efficiency: EfficiencySummary,
}

impl Aggregate {
    pub fn from_trials(trials: &[TrialSummary], mu_q: f64, seed: u64) -> Self {
        let col = |f: fn(&TrialSummary) -> f64| Estimate::from_samples(&trials.iter().map(f).collect::<Vec<_>>());
        let p_bar_a = col(|t| t.p_bar_a);
        let p_bar_q = col(|t| t.p_bar_q);
        let e_bar = col(|t| t.e_bar);
        let mu_a = col(|t| t.mu_a);
        Self {
            trials: trials.len() as u64,
            seed,
            p_bar_a,
            p_bar_q,
            e_bar,
            mu_a,
            efficiency: efficiency(p_bar_a.mean, p_bar_q.mean, mu_q, mu_a.mean, e_bar.mean),
        }
    }
}
