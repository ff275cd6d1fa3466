//! Work limits for the exhaustive searches.

use std::time::{Duration, Instant};

use crate::Error;

/// Caps the number of candidates a search may examine and, optionally, its
/// wall-clock time. Exceeding either yields [`Error::ResourceExceeded`],
/// which callers keep distinct from "nothing found".
#[derive(Clone, Debug)]
pub struct Budget {
    max_steps: u64,
    deadline: Option<Instant>,
    steps: u64,
}

impl Budget {
    pub const DEFAULT_MAX_STEPS: u64 = 2_000_000_000;

    pub fn new(max_steps: u64, time_limit: Option<Duration>) -> Self {
        Budget { max_steps, deadline: time_limit.map(|d| Instant::now() + d), steps: 0 }
    }

    pub fn unlimited() -> Self {
        Budget::new(u64::MAX, None)
    }

    pub fn with_time_limit(time_limit: Duration) -> Self {
        Budget::new(Self::DEFAULT_MAX_STEPS, Some(time_limit))
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    /// Records one unit of work.
    pub fn tick(&mut self) -> Result<(), Error> {
        self.steps += 1;
        if self.steps > self.max_steps {
            return Err(Error::ResourceExceeded(format!("more than {} steps", self.max_steps)));
        }
        // Clock reads are comparatively slow; sample every 4096 steps.
        if self.steps & 0xfff == 0 {
            if let Some(deadline) = self.deadline {
                if Instant::now() > deadline {
                    return Err(Error::ResourceExceeded("time limit reached".into()));
                }
            }
        }
        Ok(())
    }

    /// Fails up front when a search is known to need more than the step cap.
    pub fn reserve(&self, needed: u128) -> Result<(), Error> {
        if needed > (self.max_steps - self.steps.min(self.max_steps)) as u128 {
            return Err(Error::ResourceExceeded(format!(
                "search needs {needed} steps, budget allows {}",
                self.max_steps
            )));
        }
        Ok(())
    }
}

impl Default for Budget {
    fn default() -> Self {
        Budget::new(Self::DEFAULT_MAX_STEPS, None)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn step_cap() {
        let mut b = Budget::new(3, None);
        assert!(b.tick().is_ok());
        assert!(b.tick().is_ok());
        assert!(b.tick().is_ok());
        assert!(b.tick().unwrap_err().is_resource_exceeded());
        assert!(Budget::new(10, None).reserve(11).is_err());
        assert!(Budget::new(10, None).reserve(10).is_ok());
    }

    #[test]
    fn deadline() {
        let mut b = Budget::new(u64::MAX, Some(Duration::ZERO));
        std::thread::sleep(Duration::from_millis(2));
        let err = (0..10_000).try_for_each(|_| b.tick()).unwrap_err();
        assert!(err.is_resource_exceeded());
    }
}
