//! Robot-journalism engine for daily reports about the Brazilian coast.
//!
//! Observations are ingested into a file-backed [`store`], turned into an
//! intent document by [`analysis`], and verbalized in Brazilian Portuguese
//! by one of three architectures: slot-filling [`template`]s, the staged
//! [`pipeline`], or an external [`neural`] generator. [`eval`] scores the
//! outputs and checks them for hallucinated values; [`publish`] splits
//! reports into threads and delivers them. [`daily`] wires it all together.

pub mod analysis;
pub mod daily;
pub mod eval;
pub mod fixtures;
pub mod format;
pub mod ir;
pub mod neural;
pub mod pipeline;
pub mod predicate;
pub mod publish;
pub mod report;
pub mod store;
pub mod template;

pub use ir::{linearize, parse_ir, serialize_ir, Intent, IntentDocument, IrError};
