use thiserror::Error;

/// Errors raised while building or validating a model configuration.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("infeasible frame: {pull} pull slots of {wus_slots}+1 and {control_slots} control slots exceed F = {frame_slots} (P would be {push})")]
    NegativePushSlots {
        frame_slots: u32,
        wus_slots: u32,
        control_slots: u32,
        pull: u32,
        push: i64,
    },
    #[error("infeasible main-radio frame: Q' = F - P - 1 - k_s = {0} < 0")]
    NegativeScheduledCapacity(i64),
    #[error("push slots P = {push} exceed what F = {frame_slots} allows with k_c = {control_slots}")]
    PushSlotsTooLarge {
        frame_slots: u32,
        control_slots: u32,
        push: u32,
    },
    #[error("alarm probability lambda_a * T = {0} is not in [0, 1]")]
    AlarmProbability(f64),
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },
    #[error("invalid probability vector: {0}")]
    InvalidPmf(String),
    #[error("success weights undefined: lambda_q = lambda_a = 0")]
    UndefinedWeights,
    #[error("config file: {0}")]
    File(String),
}

pub type Result<T> = std::result::Result<T, ConfigError>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> ConfigError {
    ConfigError::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
