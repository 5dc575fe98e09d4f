//! One-call evaluation of a scenario with either engine.

use crate::analytic::run_horizon;
use crate::config::Scenario;
use crate::energy::{efficiency, horizon_energy};
use crate::sim::Simulator;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Engine {
    Analytic,
    MonteCarlo { trials: u64, seed: u64 },
}

impl Engine {
    pub fn name(&self) -> &'static str {
        match self {
            Engine::Analytic => "analytic",
            Engine::MonteCarlo { .. } => "sim",
        }
    }
}

/// Standard errors of the Monte Carlo means.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StdErrors {
    pub p_a: f64,
    pub p_q: f64,
    /// Joules.
    pub e: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunSummary {
    pub engine: Engine,
    pub p_bar_a: f64,
    pub p_bar_q: f64,
    /// `None` when both traffic rates are zero.
    pub p_bar_s: Option<f64>,
    /// Mean energy per frame, joules.
    pub e_bar: f64,
    pub mu_a: f64,
    pub s_bar: f64,
    /// Joules per delivered packet; `None` when `s_bar = 0`.
    pub e_per_success: Option<f64>,
    pub std_errors: Option<StdErrors>,
}

impl RunSummary {
    pub fn e_bar_mj(&self) -> f64 {
        self.e_bar * 1e3
    }

    pub fn e_per_success_mj(&self) -> Option<f64> {
        self.e_per_success.map(|e| e * 1e3)
    }
}

fn weighted(scenario: &Scenario, p_bar_a: f64, p_bar_q: f64) -> Option<f64> {
    let (wq, wa) = scenario.traffic().success_weights().ok()?;
    Some(wq * p_bar_q + wa * p_bar_a)
}

/// Closed-form evaluation.
pub fn analyze(scenario: &Scenario) -> RunSummary {
    let horizon = run_horizon(scenario);
    let e_bar = horizon_energy(scenario, &horizon).mean_total();
    let s = horizon.summary;
    let eff = efficiency(s.p_bar_a, s.p_bar_q, scenario.traffic().mu_q(), horizon.mean_alarmed(), e_bar);
    RunSummary {
        engine: Engine::Analytic,
        p_bar_a: s.p_bar_a,
        p_bar_q: s.p_bar_q,
        p_bar_s: s.p_bar_s().ok(),
        e_bar,
        mu_a: eff.mu_a,
        s_bar: eff.s_bar,
        e_per_success: eff.e_per_success,
        std_errors: None,
    }
}

/// Monte Carlo evaluation.
pub fn simulate(scenario: &Scenario, trials: u64, seed: u64) -> RunSummary {
    let agg = Simulator::new(scenario).monte_carlo(trials, seed);
    RunSummary {
        engine: Engine::MonteCarlo { trials, seed },
        p_bar_a: agg.p_bar_a.mean,
        p_bar_q: agg.p_bar_q.mean,
        p_bar_s: weighted(scenario, agg.p_bar_a.mean, agg.p_bar_q.mean),
        e_bar: agg.e_bar.mean,
        mu_a: agg.mu_a.mean,
        s_bar: agg.efficiency.s_bar,
        e_per_success: agg.efficiency.e_per_success,
        std_errors: Some(StdErrors {
            p_a: agg.p_bar_a.std_err,
            p_q: agg.p_bar_q.std_err,
            e: agg.e_bar.std_err,
        }),
    }
}

pub fn evaluate(scenario: &Scenario, engine: Engine) -> RunSummary {
    match engine {
        Engine::Analytic => analyze(scenario),
        Engine::MonteCarlo { trials, seed } => simulate(scenario, trials, seed),
    }
}
