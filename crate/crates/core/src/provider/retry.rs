//! Exponential backoff and a minimum-interval rate limiter.

use std::sync::Mutex;
use std::time::{Duration, Instant};

use super::ProviderError;

/// `max_attempts` tries in total; the wait before retry `n` (1-based) is
/// `base_delay * factor^(n-1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RetryPolicy {
    pub max_attempts: u32,
    pub base_delay: Duration,
    pub factor: f64,
}

impl Default for RetryPolicy {
    fn default() -> Self {
        Self {
            max_attempts: 5,
            base_delay: Duration::from_secs(1),
            factor: 2.0,
        }
    }
}

impl RetryPolicy {
    pub fn delay_before_retry(&self, retry: u32) -> Duration {
        let exp = retry.saturating_sub(1) as i32;
        self.base_delay.mul_f64(self.factor.powi(exp))
    }

    /// Every wait the policy would take if all attempts fail.
    pub fn schedule(&self) -> Vec<Duration> {
        (1..self.max_attempts).map(|n| self.delay_before_retry(n)).collect()
    }

    pub fn total_backoff(&self) -> Duration {
        self.schedule().into_iter().sum()
    }
}

pub trait Sleeper: Send + Sync {
    fn sleep(&self, duration: Duration);
}

#[derive(Debug, Default, Clone, Copy)]
pub struct ThreadSleeper;

impl Sleeper for ThreadSleeper {
    fn sleep(&self, duration: Duration) {
        std::thread::sleep(duration);
    }
}

/// Runs `op` until it succeeds, fails with a non-retryable error, or the
/// policy runs out of attempts. `op` receives the 1-based attempt number.
pub fn retry_call<T>(
    policy: &RetryPolicy,
    sleeper: &dyn Sleeper,
    mut op: impl FnMut(u32) -> Result<T, ProviderError>,
) -> Result<T, ProviderError> {
    let attempts = policy.max_attempts.max(1);
    let mut attempt = 1;
    loop {
        match op(attempt) {
            Ok(v) => return Ok(v),
            Err(e) if e.retryable() && attempt < attempts => {
                let wait = policy.delay_before_retry(attempt);
                log::warn!("attempt {attempt}/{attempts} failed ({e}); retrying in {wait:?}");
                sleeper.sleep(wait);
                attempt += 1;
            }
            Err(mut e) => {
                if e.retryable() {
                    e.detail = format!("{} (after {attempt} attempts)", e.detail);
                }
                return Err(e);
            }
        }
    }
}

/// Keeps successive calls at least `min_interval` apart across threads.
#[derive(Debug)]
pub struct RateLimiter {
    min_interval: Duration,
    last: Mutex<Option<Instant>>,
}

impl RateLimiter {
    pub fn new(min_interval: Duration) -> Self {
        Self {
            min_interval,
            last: Mutex::new(None),
        }
    }

    pub fn acquire(&self, sleeper: &dyn Sleeper) {
        if self.min_interval.is_zero() {
            return;
        }
        let mut last = self.last.lock().expect("rate limiter poisoned");
        if let Some(prev) = *last {
            let elapsed = prev.elapsed();
            if elapsed < self.min_interval {
                sleeper.sleep(self.min_interval - elapsed);
            }
        }
        *last = Some(Instant::now());
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::provider::ProviderErrorKind;

    #[derive(Default)]
    pub(crate) struct RecordingSleeper(pub Mutex<Vec<Duration>>);

    impl Sleeper for RecordingSleeper {
        fn sleep(&self, d: Duration) {
            self.0.lock().unwrap().push(d);
        }
    }

    #[test]
    fn default_schedule_sums_to_fifteen_seconds() {
        let p = RetryPolicy::default();
        // independent: 1 + 2 + 4 + 8
        let expected: u64 = (0..4).map(|k| 1u64 << k).sum();
        assert_eq!(expected, 15);
        assert_eq!(p.total_backoff(), Duration::from_secs(expected));
        assert_eq!(
            p.schedule(),
            [1, 2, 4, 8].map(Duration::from_secs).to_vec()
        );
    }

    #[test]
    fn gives_up_after_max_attempts() {
        let sleeper = RecordingSleeper::default();
        let mut calls = 0;
        let err = retry_call::<()>(&RetryPolicy::default(), &sleeper, |_| {
            calls += 1;
            Err(ProviderError::new(ProviderErrorKind::Transport, "down"))
        })
        .unwrap_err();
        assert_eq!(calls, 5);
        assert_eq!(err.kind, ProviderErrorKind::Transport);
        let waited: Duration = sleeper.0.lock().unwrap().iter().sum();
        assert_eq!(waited, Duration::from_secs(15));
    }

    #[test]
    fn non_retryable_surfaces_immediately() {
        let sleeper = RecordingSleeper::default();
        let mut calls = 0;
        let err = retry_call::<()>(&RetryPolicy::default(), &sleeper, |_| {
            calls += 1;
            Err(ProviderError::new(ProviderErrorKind::Auth, "bad key"))
        })
        .unwrap_err();
        assert_eq!(calls, 1);
        assert_eq!(err.kind, ProviderErrorKind::Auth);
        assert!(sleeper.0.lock().unwrap().is_empty());
    }

    #[test]
    fn recovers_after_transient_failure() {
        let sleeper = RecordingSleeper::default();
        let out = retry_call(&RetryPolicy::default(), &sleeper, |n| {
            if n < 3 {
                Err(ProviderError::new(ProviderErrorKind::RateLimit, "slow down"))
            } else {
                Ok(n)
            }
        })
        .unwrap();
        assert_eq!(out, 3);
        assert_eq!(
            *sleeper.0.lock().unwrap(),
            vec![Duration::from_secs(1), Duration::from_secs(2)]
        );
    }

    #[test]
    fn limiter_spaces_calls() {
        let sleeper = RecordingSleeper::default();
        let limiter = RateLimiter::new(Duration::from_secs(10));
        limiter.acquire(&sleeper);
        limiter.acquire(&sleeper);
        let waits = sleeper.0.lock().unwrap();
        assert_eq!(waits.len(), 1);
        assert!(waits[0] > Duration::from_secs(9));
    }
}
