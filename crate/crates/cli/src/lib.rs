//! Library side of the workbench CLI: supply bounds and their inversion,
//! field-size gap reports, and experiment/preset orchestration.

pub mod bounds;
pub mod experiment;
pub mod gap;
