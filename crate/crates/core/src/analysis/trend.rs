use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::store::TimeSeries;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TrendDirection {
    High,
    Low,
    None,
}

impl TrendDirection {
    pub fn as_str(self) -> &'static str {
        match self {
            TrendDirection::High => "high",
            TrendDirection::Low => "low",
            TrendDirection::None => "none",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrendDescriptor {
    pub direction: TrendDirection,
    pub window_days: u32,
    pub current: f64,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TrendError {
    #[error("no prior values in the window")]
    EmptySeries,
    #[error("trend window must be at least 2 days, got {0}")]
    WindowTooShort(u32),
}

/// Compares `current` against the prior values of the window. Only a strict
/// new maximum is `high` and only a strict new minimum is `low`; ties yield
/// `none`.
pub fn detect_trend(series: &TimeSeries, current: f64, window_days: u32) -> Result<TrendDescriptor, TrendError> {
    if window_days < 2 {
        return Err(TrendError::WindowTooShort(window_days));
    }
    if series.is_empty() {
        return Err(TrendError::EmptySeries);
    }
    let direction = if series.values().all(|v| current > v) {
        TrendDirection::High
    } else if series.values().all(|v| current < v) {
        TrendDirection::Low
    } else {
        TrendDirection::None
    };
    Ok(TrendDescriptor {
        direction,
        window_days,
        current,
    })
}
