pub mod baselines;
pub mod cli;
pub mod config;
pub mod error;
pub mod harness;
pub mod linalg;
pub mod model;
pub mod receiver;
pub mod selftest;
pub mod spca;
pub mod subsolver;
