pub mod materials;
pub mod grid;
pub mod solver;
pub mod dataset;
pub mod analysis;
pub mod units;
pub mod cli;
