//! Mission planning frontend for the low-thrust transfer solver: TOML
//! mission descriptions, a burn-coast-burn pipeline with several solve
//! levels, text reports, and re-loadable solution records.

pub mod config;
pub mod pipeline;
pub mod record;
pub mod report;
