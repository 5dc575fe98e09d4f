//! Analytic model, Monte Carlo simulator and energy accounting for a dual-mode
//! (pull by wake-up signal, push by framed ALOHA) MAC over a population of sensor nodes.

pub mod analytic;
pub mod config;
pub mod energy;
pub mod error;
pub mod pmf;
pub mod sim;
pub mod summary;

pub use config::{BaseConfig, FrameConfig, FrameGeometry, HorizonConfig, MrConfig, PowerProfile, Scenario, Scheme, TrafficConfig};
pub use error::{ConfigError, Result};
pub use pmf::Pmf;
pub use summary::{analyze, evaluate, simulate, Engine, RunSummary, StdErrors};
