//! Distributed gradient descent for cooperative multi-agent reinforcement
//! learning, with the environments, baselines and analysis tools needed to
//! compare it against joint gradient descent and tabular Q-learning.

pub mod analysis;
pub mod baseline_q;
pub mod envs;
pub mod error;
pub mod game;
pub mod harness;
pub mod learner;
pub mod policy;
pub mod rng;

pub use error::{Error, Result};
