//! # greedylr
//!
//! A loss-reactive learning-rate scheduler and the machinery needed to study it.
//!
//! GreedyLR watches the training loss and multiplies the learning rate by a
//! factor `F ∈ (0, 1)` when the loss gets worse, or divides by `F` when it
//! improves. This crate provides:
//!
//! * [`sched`]: the minimal and detailed GreedyLR schedulers plus six closed-form
//!   baseline schedules behind one [`sched::LrScheduler`] trait.
//! * [`optim`]: plain SGD and bias-corrected Adam on flat `f64` vectors.
//! * [`problems`]: finite-sum objectives (random quadratics with exact
//!   smoothness constants, logistic regression, a small tanh MLP, Rosenbrock).
//! * [`noise`]: additive perturbations of the loss the scheduler observes.
//! * [`runner`]: single runs, seeded grids, summary metrics, paired
//!   comparisons and convergence-bound checks.
//!
//! ```
//! use greedylr::sched::{GreedyConfig, GreedyLr, LrScheduler};
//!
//! let cfg = GreedyConfig { patience: 0, ..GreedyConfig::new(0.1) };
//! let mut sched = GreedyLr::new(cfg).unwrap();
//! // Two improvements in a row raise the learning rate twice.
//! sched.step(1.0).unwrap();
//! let lr = sched.step(0.5).unwrap();
//! assert!(lr > 0.1);
//! ```

pub mod error;
pub mod noise;
pub mod optim;
pub mod problems;
pub mod rng;
pub mod runner;
pub mod sched;

pub use error::{Error, Result};
