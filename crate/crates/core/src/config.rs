//! Frame geometry, traffic, power and horizon configuration.
//!
//! Every type here is validated on construction and immutable afterwards.
//! The default operating point is available as
//! [`FrameGeometry::preset`], [`PowerProfile::preset`], [`HorizonConfig::preset`]
//! and the combined [`BaseConfig::preset`].

use std::ops::RangeInclusive;
use std::path::Path;

use serde::Deserialize;

use crate::error::{invalid, ConfigError, Result};

pub const PRESET_NODES: u32 = 40;
pub const PRESET_TAU_S: f64 = 0.25e-3;
pub const PRESET_FRAME_SLOTS: u32 = 41;
pub const PRESET_WUS_SLOTS: u32 = 4;
pub const PRESET_CONTROL_SLOTS: u32 = 1;
pub const PRESET_XI_W: f64 = 1e-3;
pub const PRESET_XI_T: f64 = 55e-3;
pub const PRESET_XI_R: f64 = 50e-3;
pub const PRESET_BETA_T: f64 = 4.0 / 7.0;
pub const PRESET_BETA_R: f64 = 3.0 / 7.0;
pub const PRESET_OBSERVED_FRAMES: u32 = 10;

/// Push slots left once `pull` WuS/pull-slot pairs and the control signal are placed.
pub fn derive_partition(frame_slots: u32, wus_slots: u32, control_slots: u32, pull: u32) -> Result<u32> {
    let push = frame_slots as i64 - pull as i64 * (wus_slots as i64 + 1) - control_slots as i64;
    if push < 0 {
        return Err(ConfigError::NegativePushSlots {
            frame_slots,
            wus_slots,
            control_slots,
            pull,
            push,
        });
    }
    Ok(push as u32)
}

/// Largest number of pull opportunities that fits next to `push` push slots.
pub fn derive_q(frame_slots: u32, wus_slots: u32, control_slots: u32, push: u32) -> Result<u32> {
    let room = frame_slots as i64 - push as i64 - control_slots as i64;
    if room < 0 {
        return Err(ConfigError::PushSlotsTooLarge {
            frame_slots,
            control_slots,
            push,
        });
    }
    Ok((room / (wus_slots as i64 + 1)) as u32)
}

/// Every `Q` for which `P >= 0`.
pub fn feasible_pull_slots(frame_slots: u32, wus_slots: u32, control_slots: u32) -> RangeInclusive<u32> {
    let max = frame_slots.saturating_sub(control_slots) / (wus_slots + 1);
    0..=max
}

/// Per-node per-frame alarm probability from a rate in alarms/s.
pub fn alpha_from_rate(lambda_a: f64, frame_duration: f64) -> Result<f64> {
    let alpha = lambda_a * frame_duration;
    if !(0.0..=1.0).contains(&alpha) || !alpha.is_finite() {
        return Err(ConfigError::AlarmProbability(alpha));
    }
    Ok(alpha)
}

/// Slot-level layout shared by every partition of the frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameGeometry {
    /// Slot duration in seconds.
    pub tau: f64,
    pub frame_slots: u32,
    /// Slots needed to send one WuS and wake the main radio (`k_w`).
    pub wus_slots: u32,
    /// Slots of the push control signal (`k_c`).
    pub control_slots: u32,
    /// Fraction of a slot used by the uplink payload.
    pub beta_t: f64,
    /// Fraction of a slot used by the ACK.
    pub beta_r: f64,
}

impl FrameGeometry {
    pub fn preset() -> Self {
        Self {
            tau: PRESET_TAU_S,
            frame_slots: PRESET_FRAME_SLOTS,
            wus_slots: PRESET_WUS_SLOTS,
            control_slots: PRESET_CONTROL_SLOTS,
            beta_t: PRESET_BETA_T,
            beta_r: PRESET_BETA_R,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.tau > 0.0 && self.tau.is_finite()) {
            return Err(invalid("tau", format!("{} must be positive", self.tau)));
        }
        if self.frame_slots == 0 {
            return Err(invalid("F", "must be at least 1"));
        }
        if !(self.beta_t >= 0.0 && self.beta_r >= 0.0 && self.beta_t + self.beta_r <= 1.0 + 1e-12) {
            return Err(invalid(
                "beta_t/beta_r",
                format!("need beta_t, beta_r >= 0 and beta_t + beta_r <= 1, got {} and {}", self.beta_t, self.beta_r),
            ));
        }
        Ok(())
    }

    /// Frame with `pull` WuS opportunities; `P` follows from the slot budget.
    pub fn with_pull_slots(self, pull: u32) -> Result<FrameConfig> {
        self.validate()?;
        let push = derive_partition(self.frame_slots, self.wus_slots, self.control_slots, pull)?;
        Ok(FrameConfig {
            geometry: self,
            pull_slots: pull,
            push_slots: push,
        })
    }

    /// Frame with `push` contention slots and as many pull opportunities as fit.
    pub fn with_push_slots(self, push: u32) -> Result<FrameConfig> {
        self.validate()?;
        let pull = derive_q(self.frame_slots, self.wus_slots, self.control_slots, push)?;
        Ok(FrameConfig {
            geometry: self,
            pull_slots: pull,
            push_slots: push,
        })
    }
}

/// A feasible pull/push partition of the frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameConfig {
    geometry: FrameGeometry,
    pull_slots: u32,
    push_slots: u32,
}

impl FrameConfig {
    pub fn geometry(&self) -> &FrameGeometry {
        &self.geometry
    }
    pub fn tau(&self) -> f64 {
        self.geometry.tau
    }
    pub fn frame_slots(&self) -> u32 {
        self.geometry.frame_slots
    }
    pub fn wus_slots(&self) -> u32 {
        self.geometry.wus_slots
    }
    pub fn control_slots(&self) -> u32 {
        self.geometry.control_slots
    }
    pub fn beta_t(&self) -> f64 {
        self.geometry.beta_t
    }
    pub fn beta_r(&self) -> f64 {
        self.geometry.beta_r
    }
    /// `Q`.
    pub fn pull_slots(&self) -> u32 {
        self.pull_slots
    }
    /// `P`.
    pub fn push_slots(&self) -> u32 {
        self.push_slots
    }
    /// `T = tau * F`.
    pub fn duration(&self) -> f64 {
        self.geometry.tau * self.geometry.frame_slots as f64
    }
    /// `T_w = (k_w + 1) tau`.
    pub fn wus_period(&self) -> f64 {
        (self.geometry.wus_slots + 1) as f64 * self.geometry.tau
    }
    pub fn pull_duration(&self) -> f64 {
        self.pull_slots as f64 * self.wus_period()
    }
    pub fn push_duration(&self) -> f64 {
        (self.push_slots + self.geometry.control_slots) as f64 * self.geometry.tau
    }
}

/// Query and alarm load.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrafficConfig {
    nodes: u32,
    lambda_q: f64,
    lambda_a: f64,
    alpha: f64,
    mu_q: f64,
}

impl TrafficConfig {
    /// `lambda_q`, `lambda_a` in events/s per node, `frame_duration` in seconds.
    pub fn new(nodes: u32, lambda_q: f64, lambda_a: f64, frame_duration: f64) -> Result<Self> {
        let alpha = alpha_from_rate(lambda_a, frame_duration)?;
        Self::build(nodes, lambda_q, lambda_a, alpha, frame_duration)
    }

    /// Same as [`TrafficConfig::new`] but with the per-frame alarm probability given directly.
    pub fn with_alpha(nodes: u32, lambda_q: f64, alpha: f64, frame_duration: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&alpha) {
            return Err(ConfigError::AlarmProbability(alpha));
        }
        Self::build(nodes, lambda_q, alpha / frame_duration, alpha, frame_duration)
    }

    fn build(nodes: u32, lambda_q: f64, lambda_a: f64, alpha: f64, frame_duration: f64) -> Result<Self> {
        if nodes == 0 {
            return Err(invalid("N", "must be at least 1"));
        }
        if !(lambda_q >= 0.0 && lambda_q.is_finite()) {
            return Err(invalid("lambda_q", format!("{lambda_q} must be a finite rate >= 0")));
        }
        if !(frame_duration > 0.0) {
            return Err(invalid("T", "frame duration must be positive"));
        }
        Ok(Self {
            nodes,
            lambda_q,
            lambda_a,
            alpha,
            mu_q: nodes as f64 * lambda_q * frame_duration,
        })
    }

    pub fn nodes(&self) -> u32 {
        self.nodes
    }
    pub fn lambda_q(&self) -> f64 {
        self.lambda_q
    }
    pub fn lambda_a(&self) -> f64 {
        self.lambda_a
    }
    /// Per-node per-frame alarm probability.
    pub fn alpha(&self) -> f64 {
        self.alpha
    }
    /// Mean number of queries per frame, `N lambda_q T`.
    pub fn mu_q(&self) -> f64 {
        self.mu_q
    }

    /// Load-proportional weights `(w_q, w_a)`.
    pub fn success_weights(&self) -> Result<(f64, f64)> {
        let total = self.lambda_q + self.lambda_a;
        if total <= 0.0 {
            return Err(ConfigError::UndefinedWeights);
        }
        Ok((self.lambda_q / total, self.lambda_a / total))
    }
}

/// Radio power draw in watts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerProfile {
    xi_w: f64,
    xi_r: f64,
    xi_t: f64,
}

impl PowerProfile {
    pub fn new(xi_w: f64, xi_r: f64, xi_t: f64) -> Result<Self> {
        if !(0.0 <= xi_w && xi_w <= xi_r && xi_r <= xi_t && xi_t.is_finite()) {
            return Err(invalid(
                "xi",
                format!("need 0 <= xi_w <= xi_r <= xi_t, got {xi_w}, {xi_r}, {xi_t}"),
            ));
        }
        Ok(Self { xi_w, xi_r, xi_t })
    }

    pub fn preset() -> Self {
        Self {
            xi_w: PRESET_XI_W,
            xi_r: PRESET_XI_R,
            xi_t: PRESET_XI_T,
        }
    }

    /// Wake-up receiver on.
    pub fn xi_w(&self) -> f64 {
        self.xi_w
    }
    /// Main radio receiving.
    pub fn xi_r(&self) -> f64 {
        self.xi_r
    }
    /// Main radio transmitting.
    pub fn xi_t(&self) -> f64 {
        self.xi_t
    }
}

/// Observation window of the horizon averages.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HorizonConfig {
    observed_frames: u32,
    include_warmup_frame: bool,
}

impl HorizonConfig {
    /// `include_warmup_frame = false` averages frames `1..=T_O`; `true` averages `0..T_O`.
    pub fn new(observed_frames: u32, include_warmup_frame: bool) -> Result<Self> {
        if observed_frames == 0 {
            return Err(invalid("T_O", "must be at least 1"));
        }
        Ok(Self {
            observed_frames,
            include_warmup_frame,
        })
    }

    pub fn preset() -> Self {
        Self {
            observed_frames: PRESET_OBSERVED_FRAMES,
            include_warmup_frame: false,
        }
    }

    pub fn observed_frames(&self) -> u32 {
        self.observed_frames
    }
    pub fn include_warmup_frame(&self) -> bool {
        self.include_warmup_frame
    }
    /// First averaged frame index.
    pub fn first_frame(&self) -> usize {
        if self.include_warmup_frame {
            0
        } else {
            1
        }
    }
    /// Number of frames that must be evaluated, warm-up included.
    pub fn frames_needed(&self) -> usize {
        self.first_frame() + self.observed_frames as usize
    }
}

/// Always-on main radio baseline: a `k_s`-slot schedule replaces the WuSs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MrConfig {
    pub schedule_slots: u32,
}

impl MrConfig {
    /// `Q' = F - P - 1 - k_s`.
    pub fn scheduled_capacity(&self, frame: &FrameConfig) -> Result<u32> {
        let q = frame.frame_slots() as i64 - frame.push_slots() as i64 - 1 - self.schedule_slots as i64;
        if q < 0 {
            return Err(ConfigError::NegativeScheduledCapacity(q));
        }
        Ok(q as u32)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    WakeUp,
    MainRadio(MrConfig),
}

/// One fully resolved operating point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scenario {
    frame: FrameConfig,
    traffic: TrafficConfig,
    power: PowerProfile,
    horizon: HorizonConfig,
    scheme: Scheme,
    pull_capacity: u32,
}

impl Scenario {
    pub fn new(
        frame: FrameConfig,
        traffic: TrafficConfig,
        power: PowerProfile,
        horizon: HorizonConfig,
        scheme: Scheme,
    ) -> Result<Self> {
        let pull_capacity = match scheme {
            Scheme::WakeUp => frame.pull_slots(),
            Scheme::MainRadio(mr) => mr.scheduled_capacity(&frame)?,
        };
        Ok(Self {
            frame,
            traffic,
            power,
            horizon,
            scheme,
            pull_capacity,
        })
    }

    /// Default deployment with WuRs and `pull` WuS opportunities.
    pub fn preset(lambda_a: f64, lambda_q: f64, pull: u32) -> Result<Self> {
        let frame = FrameGeometry::preset().with_pull_slots(pull)?;
        let traffic = TrafficConfig::new(PRESET_NODES, lambda_q, lambda_a, frame.duration())?;
        Self::new(frame, traffic, PowerProfile::preset(), HorizonConfig::preset(), Scheme::WakeUp)
    }

    /// Default deployment under the main-radio baseline with `push` push slots.
    pub fn preset_main_radio(lambda_a: f64, lambda_q: f64, push: u32, schedule_slots: u32) -> Result<Self> {
        let frame = FrameGeometry::preset().with_push_slots(push)?;
        let traffic = TrafficConfig::new(PRESET_NODES, lambda_q, lambda_a, frame.duration())?;
        Self::new(
            frame,
            traffic,
            PowerProfile::preset(),
            HorizonConfig::preset(),
            Scheme::MainRadio(MrConfig { schedule_slots }),
        )
    }

    pub fn frame(&self) -> &FrameConfig {
        &self.frame
    }
    pub fn traffic(&self) -> &TrafficConfig {
        &self.traffic
    }
    pub fn power(&self) -> &PowerProfile {
        &self.power
    }
    pub fn horizon(&self) -> &HorizonConfig {
        &self.horizon
    }
    pub fn scheme(&self) -> Scheme {
        self.scheme
    }
    pub fn nodes(&self) -> u32 {
        self.traffic.nodes()
    }
    /// Queries that can be served per frame: `Q` with WuRs, `Q'` for the baseline.
    pub fn pull_capacity(&self) -> u32 {
        self.pull_capacity
    }
    pub fn push_slots(&self) -> u32 {
        self.frame.push_slots()
    }

    pub fn with_horizon(mut self, horizon: HorizonConfig) -> Self {
        self.horizon = horizon;
        self
    }
}

/// Everything except the swept quantities; the result of reading a config file.
#[derive(Debug, Clone, PartialEq)]
pub struct BaseConfig {
    pub geometry: FrameGeometry,
    pub nodes: u32,
    pub power: PowerProfile,
    pub horizon: HorizonConfig,
    pub pull_slots: Option<u32>,
    pub push_slots: Option<u32>,
    pub schedule_slots: Option<u32>,
    pub lambda_q: Option<f64>,
    pub lambda_a: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    #[serde(rename = "N")]
    nodes: Option<u32>,
    tau: Option<f64>,
    #[serde(rename = "F")]
    frame_slots: Option<u32>,
    k_w: Option<u32>,
    k_c: Option<u32>,
    #[serde(rename = "Q")]
    pull_slots: Option<u32>,
    #[serde(rename = "P")]
    push_slots: Option<u32>,
    k_s: Option<u32>,
    beta_t: Option<f64>,
    beta_r: Option<f64>,
    lambda_q: Option<f64>,
    lambda_a: Option<f64>,
    xi_w: Option<f64>,
    xi_r: Option<f64>,
    xi_t: Option<f64>,
    #[serde(rename = "T_O")]
    observed_frames: Option<u32>,
    include_warmup_frame: Option<bool>,
}

impl BaseConfig {
    pub fn preset() -> Self {
        Self {
            geometry: FrameGeometry::preset(),
            nodes: PRESET_NODES,
            power: PowerProfile::preset(),
            horizon: HorizonConfig::preset(),
            pull_slots: None,
            push_slots: None,
            schedule_slots: None,
            lambda_q: None,
            lambda_a: None,
        }
    }

    /// Parses `key = value` lines (TOML syntax). Keys left out keep their default value.
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let file: ConfigFile = toml::from_str(text).map_err(|e| ConfigError::File(e.message().to_string()))?;
        let mut base = Self::preset();
        let g = &mut base.geometry;
        g.tau = file.tau.unwrap_or(g.tau);
        g.frame_slots = file.frame_slots.unwrap_or(g.frame_slots);
        g.wus_slots = file.k_w.unwrap_or(g.wus_slots);
        g.control_slots = file.k_c.unwrap_or(g.control_slots);
        g.beta_t = file.beta_t.unwrap_or(g.beta_t);
        g.beta_r = file.beta_r.unwrap_or(g.beta_r);
        g.validate()?;
        base.nodes = file.nodes.unwrap_or(base.nodes);
        if base.nodes == 0 {
            return Err(invalid("N", "must be at least 1"));
        }
        let p = PowerProfile::preset();
        base.power = PowerProfile::new(
            file.xi_w.unwrap_or(p.xi_w),
            file.xi_r.unwrap_or(p.xi_r),
            file.xi_t.unwrap_or(p.xi_t),
        )?;
        base.horizon = HorizonConfig::new(
            file.observed_frames.unwrap_or(PRESET_OBSERVED_FRAMES),
            file.include_warmup_frame.unwrap_or(false),
        )?;
        base.pull_slots = file.pull_slots;
        base.push_slots = file.push_slots;
        base.schedule_slots = file.k_s;
        base.lambda_q = file.lambda_q;
        base.lambda_a = file.lambda_a;
        if let (Some(q), Some(p)) = (file.pull_slots, file.push_slots) {
            if file.k_s.is_none() {
                let derived = derive_partition(base.geometry.frame_slots, base.geometry.wus_slots, base.geometry.control_slots, q)?;
                if derived != p {
                    return Err(invalid("P", format!("Q = {q} implies P = {derived}, config says {p}")));
                }
            }
        }
        Ok(base)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::File(format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    /// Resolves one operating point. With `schedule_slots` the point runs the main-radio
    /// baseline and is keyed by `push`; otherwise by `pull`.
    pub fn scenario(
        &self,
        lambda_a: f64,
        lambda_q: f64,
        pull: Option<u32>,
        push: Option<u32>,
        schedule_slots: Option<u32>,
    ) -> Result<Scenario> {
        let frame = match (schedule_slots, pull, push) {
            (Some(_), _, Some(p)) => self.geometry.with_push_slots(p)?,
            (Some(_), Some(q), None) => self.geometry.with_pull_slots(q)?,
            (None, Some(q), _) => self.geometry.with_pull_slots(q)?,
            (None, None, Some(p)) => self.geometry.with_push_slots(p)?,
            (_, None, None) => return Err(invalid("Q", "neither Q nor P given")),
        };
        let traffic = TrafficConfig::new(self.nodes, lambda_q, lambda_a, frame.duration())?;
        let scheme = match schedule_slots {
            Some(k_s) => Scheme::MainRadio(MrConfig { schedule_slots: k_s }),
            None => Scheme::WakeUp,
        };
        Scenario::new(frame, traffic, self.power, self.horizon, scheme)
    }
}
