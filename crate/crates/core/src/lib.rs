pub mod bench;
pub mod harness;
pub mod kernels;
pub mod report;
pub mod rng;
pub mod stats;
pub mod swarm;
