//! Improvement callbacks and stopping conditions shared by all solvers.

use std::time::{Duration, Instant};

/// Observer handed to every solver.
///
/// `improved` is called whenever the solver holds a labeling better than any
/// it reported before; `should_stop` is polled between solver iterations.
pub trait Progress {
    fn improved(&mut self, _energy: f64) {}

    fn should_stop(&self) -> bool {
        false
    }
}

/// Never stops, records nothing.
#[derive(Clone, Copy, Debug, Default)]
pub struct Unobserved;

impl Progress for Unobserved {}

/// Stops once a wall-clock budget has elapsed.
#[derive(Clone, Copy, Debug)]
pub struct Deadline(Option<Instant>);

impl Deadline {
    pub fn after(budget: Option<Duration>) -> Self {
        Self(budget.map(|b| Instant::now() + b))
    }
}

impl Progress for Deadline {
    fn should_stop(&self) -> bool {
        self.0.is_some_and(|d| Instant::now() >= d)
    }
}
