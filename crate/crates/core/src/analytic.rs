//! Finite-horizon recursion on the number of alarmed nodes.
//!
//! Each frame the law of `n_a(t)` is combined with the query law to obtain the
//! pulled alarms `n_w`, the push contenders `n_p = n_a - n_w`, the Framed ALOHA
//! outcome `(n_s, n_f)` and finally `n_a(t+1) = n_n(t) + n_f(t)` with
//! `n_n(t) | n_a(t) = i ~ Binomial(N - i, alpha)`.

use crate::config::{Scenario, TrafficConfig};
use crate::error::{ConfigError, Result};
use crate::pmf::{binomial, hypergeometric_pmf, poisson_head, Pmf};

/// Law of `n_q = min(Pois(mu_q), N)`.
pub fn query_pmf(traffic: &TrafficConfig) -> Pmf {
    capped_poisson(traffic.mu_q(), traffic.nodes())
}

pub(crate) fn capped_poisson(mean: f64, cap: u32) -> Pmf {
    let cap = cap as usize;
    if mean == 0.0 {
        return Pmf::point(cap, 0);
    }
    let mut probs = poisson_head(mean, cap);
    let head: f64 = probs.iter().sum();
    probs.push((1.0 - head).max(0.0));
    Pmf::assemble(probs)
}

/// `P(n_w = j | n_q = q, n_a = i)`: `min(q, Q)` WuS targets drawn without replacement
/// from `N` nodes, `i` of them alarmed.
pub fn wus_hit_prob(j: u32, q: u32, i: u32, nodes: u32, pull_capacity: u32) -> f64 {
    if q > nodes || i > nodes {
        return 0.0;
    }
    hypergeometric_pmf(nodes, i, q.min(pull_capacity), j)
}

/// `P(n_w = j | n_a = i)` for `j = 0..=N`, queries marginalized out.
pub fn nw_given_na(i: u32, nq: &Pmf, nodes: u32, pull_capacity: u32) -> Pmf {
    let mut probs = vec![0.0; nodes as usize + 1];
    for (q, pq) in nq.iter().filter(|(_, p)| *p > 0.0) {
        let d = (q as u32).min(pull_capacity);
        for j in 0..=d.min(i) {
            probs[j as usize] += pq * wus_hit_prob(j, q as u32, i, nodes, pull_capacity);
        }
    }
    Pmf::assemble(probs)
}

/// Probability that one of `contenders` packets is alone in its slot out of `slots`.
/// With no push slots nobody succeeds; with no contenders the frame counts as a success.
pub fn push_success_given(contenders: u32, slots: u32) -> f64 {
    match (contenders, slots) {
        (0, _) => 1.0,
        (_, 0) => 0.0,
        (1, _) => 1.0,
        (_, 1) => 0.0,
        (k, p) => (1.0 - 1.0 / p as f64).powi(k as i32 - 1),
    }
}

/// Joint law of (singleton slots `s`, collided slots `c`) when `k` packets pick
/// uniformly among `P` slots.
#[derive(Debug, Clone, PartialEq)]
pub struct AlohaJointTable {
    contenders: u32,
    slots: u32,
    /// `entries[s][c]`, `0 <= s <= k`, `0 <= c <= k / 2`.
    entries: Vec<Vec<f64>>,
}

impl AlohaJointTable {
    fn initial(slots: u32) -> Self {
        Self {
            contenders: 0,
            slots,
            entries: vec![vec![1.0]],
        }
    }

    /// One more packet chooses a slot: it lands in a free slot, a collided slot, or a
    /// singleton slot (turning it into a collision).
    fn next(&self) -> Self {
        let k = self.contenders + 1;
        let p = self.slots as f64;
        let max_c = (k / 2) as usize;
        let prev = |s: isize, c: isize| -> f64 {
            if s < 0 || c < 0 {
                return 0.0;
            }
            self.entries
                .get(s as usize)
                .and_then(|row| row.get(c as usize))
                .copied()
                .unwrap_or(0.0)
        };
        let entries = (0..=k as isize)
            .map(|s| {
                (0..=max_c as isize)
                    .map(|c| {
                        let free = (p - s as f64 + 1.0 - c as f64).max(0.0) / p;
                        free * prev(s - 1, c) + (c as f64 / p) * prev(s, c) + ((s + 1) as f64 / p) * prev(s + 1, c - 1)
                    })
                    .collect()
            })
            .collect();
        Self {
            contenders: k,
            slots: self.slots,
            entries,
        }
    }

    pub fn contenders(&self) -> u32 {
        self.contenders
    }

    pub fn slots(&self) -> u32 {
        self.slots
    }

    /// `P(s, c | k)`, zero outside the table.
    pub fn prob(&self, s: u32, c: u32) -> f64 {
        self.entries
            .get(s as usize)
            .and_then(|row| row.get(c as usize))
            .copied()
            .unwrap_or(0.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (u32, u32, f64)> + '_ {
        self.entries
            .iter()
            .enumerate()
            .flat_map(|(s, row)| row.iter().enumerate().map(move |(c, &p)| (s as u32, c as u32, p)))
    }

    /// Marginal law of the number of successful packets.
    pub fn successes(&self) -> Pmf {
        Pmf::assemble(self.entries.iter().map(|row| row.iter().sum()).collect())
    }
}

/// Framed ALOHA joint success/collision law for `contenders` packets on `slots` slots.
pub fn aloha_joint(contenders: u32, slots: u32) -> Result<AlohaJointTable> {
    Ok(aloha_joint_series(contenders, slots)?.pop().expect("series is never empty"))
}

/// Tables for every population `0..=max_contenders`, sharing one recursion.
pub fn aloha_joint_series(max_contenders: u32, slots: u32) -> Result<Vec<AlohaJointTable>> {
    if slots == 0 {
        return Err(ConfigError::InvalidParameter {
            name: "P",
            reason: "Framed ALOHA needs at least one slot".into(),
        });
    }
    let mut out = Vec::with_capacity(max_contenders as usize + 1);
    out.push(AlohaJointTable::initial(slots));
    for _ in 0..max_contenders {
        let next = out.last().unwrap().next();
        out.push(next);
    }
    Ok(out)
}

/// `P(n_s = s | n_p = k)`; with `P = 0` every contender fails.
pub fn ns_given_np(contenders: u32, slots: u32) -> Pmf {
    match aloha_joint(contenders, slots) {
        Ok(table) => table.successes(),
        Err(_) => Pmf::point(contenders as usize, 0),
    }
}

/// Push sub-frame outcome laws for every contender count up to `N`.
#[derive(Debug, Clone)]
pub struct PushLaw {
    slots: u32,
    successes: Vec<Pmf>,
}

impl PushLaw {
    pub fn new(nodes: u32, slots: u32) -> Self {
        let successes = match aloha_joint_series(nodes, slots) {
            Ok(series) => series.iter().map(AlohaJointTable::successes).collect(),
            Err(_) => (0..=nodes as usize).map(|k| Pmf::point(k, 0)).collect(),
        };
        Self { slots, successes }
    }

    pub fn slots(&self) -> u32 {
        self.slots
    }

    /// `P(n_s = . | n_p = k)`.
    pub fn successes_given(&self, contenders: usize) -> &Pmf {
        &self.successes[contenders]
    }

    /// `P(n_f = . | n_p = k)` on `0..=k`.
    pub fn failures_given(&self, contenders: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.successes[contenders].iter().map(move |(s, p)| (contenders - s, p))
    }

    /// Per-packet push success probability `p_p`.
    pub fn p_push(&self, np: &Pmf) -> f64 {
        np.expect(|k| push_success_given(k as u32, self.slots))
    }

    pub fn nf_pmf(&self, np: &Pmf) -> Pmf {
        let mut probs = vec![0.0; np.max_value() + 1];
        for (k, pk) in np.iter().filter(|(_, p)| *p > 0.0) {
            for (f, pf) in self.failures_given(k) {
                probs[f] += pk * pf;
            }
        }
        Pmf::assemble(probs)
    }
}

/// Pull sub-frame laws for a fixed query law and capacity.
#[derive(Debug, Clone)]
pub struct PullLaw {
    nodes: u32,
    capacity: u32,
    nq: Pmf,
    pulled: Vec<Pmf>,
    served: Vec<f64>,
}

impl PullLaw {
    pub fn new(nq: &Pmf, nodes: u32, pull_capacity: u32) -> Self {
        let pulled = (0..=nodes).map(|i| nw_given_na(i, nq, nodes, pull_capacity)).collect();
        // E[(min(q, Q) - n_w) / q | n_a = i], with q = 0 contributing nothing
        let served = (0..=nodes)
            .map(|i| {
                nq.iter()
                    .skip(1)
                    .filter(|(_, p)| *p > 0.0)
                    .map(|(q, pq)| {
                        let x = (q as u32).min(pull_capacity);
                        let inner: f64 = (0..=x.min(i))
                            .map(|j| (x - j) as f64 / q as f64 * wus_hit_prob(j, q as u32, i, nodes, pull_capacity))
                            .sum();
                        pq * inner
                    })
                    .sum()
            })
            .collect();
        Self {
            nodes,
            capacity: pull_capacity,
            nq: nq.clone(),
            pulled,
            served,
        }
    }

    pub fn nodes(&self) -> u32 {
        self.nodes
    }

    pub fn capacity(&self) -> u32 {
        self.capacity
    }

    pub fn query_pmf(&self) -> &Pmf {
        &self.nq
    }

    /// `P(n_w = . | n_a = i)`.
    pub fn pulled_given(&self, alarmed: usize) -> &Pmf {
        &self.pulled[alarmed]
    }

    /// Joint `(i, j, P(n_a = i) P(n_w = j | n_a = i))` over the positive-mass scenarios.
    fn scenarios<'a>(&'a self, na: &'a Pmf) -> impl Iterator<Item = (usize, usize, f64)> + 'a {
        na.iter().filter(|(_, p)| *p > 0.0).flat_map(move |(i, pi)| {
            self.pulled[i]
                .iter()
                .take(i + 1)
                .filter(|(_, p)| *p > 0.0)
                .map(move |(j, pj)| (i, j, pi * pj))
        })
    }

    pub fn np_pmf(&self, na: &Pmf) -> Pmf {
        let mut probs = vec![0.0; self.nodes as usize + 1];
        for (i, j, p) in self.scenarios(na) {
            probs[i - j] += p;
        }
        Pmf::assemble(probs)
    }

    /// Law of `n_w` itself.
    pub fn nw_pmf(&self, na: &Pmf) -> Pmf {
        let mut probs = vec![0.0; self.nodes as usize + 1];
        for (_, j, p) in self.scenarios(na) {
            probs[j] += p;
        }
        Pmf::assemble(probs)
    }

    /// `p_w(t)`: average pulled fraction of the alarmed nodes.
    pub fn p_pull(&self, na: &Pmf) -> f64 {
        self.scenarios(na)
            .filter(|(i, _, _)| *i > 0)
            .map(|(i, j, p)| j as f64 / i as f64 * p)
            .sum()
    }

    /// `p_i(t)` for a push sub-frame of `push_slots` slots.
    pub fn p_intersection(&self, na: &Pmf, push_slots: u32) -> f64 {
        self.scenarios(na)
            .filter(|(i, _, _)| *i > 0)
            .map(|(i, j, p)| j as f64 / i as f64 * push_success_given((i - j) as u32, push_slots) * p)
            .sum()
    }

    /// `p_q(t)`: fraction of the queries answered with the requested data.
    pub fn p_query(&self, na: &Pmf) -> f64 {
        na.expect(|i| self.served[i])
    }
}

/// `P(n_p = k)` from the laws of `n_a` and `n_q`.
pub fn np_pmf(na: &Pmf, nq: &Pmf, nodes: u32, pull_capacity: u32) -> Pmf {
    PullLaw::new(nq, nodes, pull_capacity).np_pmf(na)
}

/// `P(n_f = f)` from the law of `n_p`.
pub fn nf_pmf(np: &Pmf, push_slots: u32) -> Pmf {
    PushLaw::new(np.max_value() as u32, push_slots).nf_pmf(np)
}

pub fn p_push(np: &Pmf, push_slots: u32) -> f64 {
    np.expect(|k| push_success_given(k as u32, push_slots))
}

pub fn p_pull(na: &Pmf, nq: &Pmf, nodes: u32, pull_capacity: u32) -> f64 {
    PullLaw::new(nq, nodes, pull_capacity).p_pull(na)
}

pub fn p_intersection(na: &Pmf, nq: &Pmf, nodes: u32, pull_capacity: u32, push_slots: u32) -> f64 {
    PullLaw::new(nq, nodes, pull_capacity).p_intersection(na, push_slots)
}

pub fn p_query(na: &Pmf, nq: &Pmf, nodes: u32, pull_capacity: u32) -> f64 {
    PullLaw::new(nq, nodes, pull_capacity).p_query(na)
}

/// Law of `n_a(t+1)` given the law of `n_a(t)`.
pub fn na_step(na: &Pmf, nq: &Pmf, traffic: &TrafficConfig, pull_capacity: u32, push_slots: u32) -> Pmf {
    let nodes = traffic.nodes();
    AlarmRecursion {
        alpha: traffic.alpha(),
        pull: PullLaw::new(nq, nodes, pull_capacity),
        push: PushLaw::new(nodes, push_slots),
    }
    .step(na)
}

/// Cached pull/push laws for one operating point.
#[derive(Debug, Clone)]
pub struct AlarmRecursion {
    alpha: f64,
    pull: PullLaw,
    push: PushLaw,
}

impl AlarmRecursion {
    pub fn new(scenario: &Scenario) -> Self {
        let nodes = scenario.nodes();
        let nq = query_pmf(scenario.traffic());
        Self {
            alpha: scenario.traffic().alpha(),
            pull: PullLaw::new(&nq, nodes, scenario.pull_capacity()),
            push: PushLaw::new(nodes, scenario.push_slots()),
        }
    }

    pub fn pull(&self) -> &PullLaw {
        &self.pull
    }

    pub fn push(&self) -> &PushLaw {
        &self.push
    }

    /// `P(n_f = . | n_a = i)`.
    fn failures_given_alarmed(&self, alarmed: usize) -> Vec<f64> {
        let mut nf = vec![0.0; alarmed + 1];
        for (j, pj) in self.pull.pulled_given(alarmed).iter().take(alarmed + 1) {
            if pj == 0.0 {
                continue;
            }
            for (f, pf) in self.push.failures_given(alarmed - j) {
                nf[f] += pj * pf;
            }
        }
        nf
    }

    pub fn step(&self, na: &Pmf) -> Pmf {
        let nodes = self.pull.nodes();
        let mut next = vec![0.0; nodes as usize + 1];
        for (i, pi) in na.iter().filter(|(_, p)| *p > 0.0) {
            let fresh = binomial(nodes - i as u32, self.alpha);
            for (f, pf) in self.failures_given_alarmed(i).into_iter().enumerate() {
                if pf == 0.0 {
                    continue;
                }
                for (m, pm) in fresh.iter() {
                    next[f + m] += pi * pf * pm;
                }
            }
        }
        Pmf::assemble(next)
    }

    pub fn frame_law(&self, t: usize, na: Pmf) -> FrameLaw {
        let np = self.pull.np_pmf(&na);
        let p_w = self.pull.p_pull(&na);
        let p_p = self.push.p_push(&np);
        let p_i = self.pull.p_intersection(&na, self.push.slots());
        let p_q = self.pull.p_query(&na);
        FrameLaw {
            t,
            na,
            np,
            p_w,
            p_p,
            p_i,
            p_a: p_w + p_p - p_i,
            p_q,
        }
    }
}

/// Distributions and success probabilities of one frame.
#[derive(Debug, Clone)]
pub struct FrameLaw {
    pub t: usize,
    pub na: Pmf,
    pub np: Pmf,
    pub p_w: f64,
    pub p_p: f64,
    pub p_i: f64,
    pub p_a: f64,
    pub p_q: f64,
}

/// Horizon-averaged success metrics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuccessSummary {
    pub p_bar_a: f64,
    pub p_bar_q: f64,
    /// `(w_q, w_a)`; `None` when both rates are zero.
    pub weights: Option<(f64, f64)>,
}

impl SuccessSummary {
    /// `w_q p_bar_q + w_a p_bar_a`.
    pub fn p_bar_s(&self) -> Result<f64> {
        let (wq, wa) = self.weights.ok_or(ConfigError::UndefinedWeights)?;
        Ok(wq * self.p_bar_q + wa * self.p_bar_a)
    }
}

/// Result of [`run_horizon`].
#[derive(Debug, Clone)]
pub struct Horizon {
    /// Every evaluated frame, starting at `t = 0`.
    pub frames: Vec<FrameLaw>,
    /// Query law, identical for every frame.
    pub nq: Pmf,
    pub summary: SuccessSummary,
    first: usize,
}

impl Horizon {
    /// Frames inside the observation window.
    pub fn observed(&self) -> &[FrameLaw] {
        &self.frames[self.first..]
    }

    /// Window average of a per-frame quantity.
    pub fn average(&self, f: impl Fn(&FrameLaw) -> f64) -> f64 {
        let window = self.observed();
        window.iter().map(f).sum::<f64>() / window.len() as f64
    }

    /// `mu_a`: mean number of alarmed nodes per observed frame.
    pub fn mean_alarmed(&self) -> f64 {
        self.average(|f| f.na.mean())
    }
}

/// Iterates the recursion from `n_a(0) = 0` over the scenario's horizon.
pub fn run_horizon(scenario: &Scenario) -> Horizon {
    let recursion = AlarmRecursion::new(scenario);
    let horizon = scenario.horizon();
    let mut frames = Vec::with_capacity(horizon.frames_needed());
    let mut na = Pmf::point(scenario.nodes() as usize, 0);
    for t in 0..horizon.frames_needed() {
        let next = recursion.step(&na);
        frames.push(recursion.frame_law(t, na));
        na = next;
    }
    let first = horizon.first_frame();
    let mut out = Horizon {
        frames,
        nq: recursion.pull.query_pmf().clone(),
        summary: SuccessSummary {
            p_bar_a: 0.0,
            p_bar_q: 0.0,
            weights: scenario.traffic().success_weights().ok(),
        },
        first,
    };
    out.summary.p_bar_a = out.average(|f| f.p_a);
    out.summary.p_bar_q = out.average(|f| f.p_q);
    out
}
