//! Content selection, trend detection and criticality routing.

mod content;
mod routing;
mod trend;

pub use content::{format_payload_value, select_content, ContentConfig, ContentError};
pub use routing::{
    classify_criticality, route, Architecture, Classification, Comparator, Criticality, CriticalityRule,
    CriticalityRules, RoutingDecision, RulesError,
};
pub use trend::{detect_trend, TrendDescriptor, TrendDirection, TrendError};
