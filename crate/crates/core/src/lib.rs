//! Clock synchronization over dynamic networks.

pub mod analysis;
pub mod engine;
pub mod graph;
pub mod init;
pub mod invariants;
pub mod minmax;
pub mod sap;
pub mod scenarios;
