use std::sync::Mutex;

use chrono::{DateTime, Duration, Utc};

/// Source of message timestamps.
pub trait Clock: Send + Sync {
    fn now(&self) -> DateTime<Utc>;
}

#[derive(Debug, Clone, Copy, Default)]
pub struct SystemClock;

impl Clock for SystemClock {
    fn now(&self) -> DateTime<Utc> {
        Utc::now()
    }
}

/// Starts at a fixed instant and advances by `step` on every reading, so
/// replayed sessions carry identical timestamps.
#[derive(Debug)]
pub struct SteppingClock {
    next: Mutex<DateTime<Utc>>,
    step: Duration,
}

impl SteppingClock {
    pub fn new(start: DateTime<Utc>, step: Duration) -> Self {
        Self {
            next: Mutex::new(start),
            step,
        }
    }

    /// Unix epoch, one second per reading.
    pub fn epoch() -> Self {
        Self::new(DateTime::UNIX_EPOCH, Duration::seconds(1))
    }
}

impl Clock for SteppingClock {
    fn now(&self) -> DateTime<Utc> {
        let mut next = self.next.lock().expect("clock lock");
        let t = *next;
        *next = t + self.step;
        t
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stepping_clock_advances() {
        let c = SteppingClock::epoch();
        assert_eq!(c.now(), DateTime::UNIX_EPOCH);
        assert_eq!(c.now(), DateTime::UNIX_EPOCH + Duration::seconds(1));
    }
}
