pub mod js;
pub mod miner;
pub mod classifier;
pub mod exec;
pub mod extractor;
pub mod fuzz;
pub mod probe;
pub mod mutate;
pub mod planner;
