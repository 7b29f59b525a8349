use std::sync::{Condvar, Mutex};
use std::time::{Duration, Instant};

/// Caps the number of requests in flight across threads.
#[derive(Debug)]
pub struct InFlightLimit {
    max: usize,
    active: Mutex<usize>,
    freed: Condvar,
}

pub struct InFlightGuard<'a> {
    limit: &'a InFlightLimit,
}

impl InFlightLimit {
    pub fn new(max: usize) -> Self {
        InFlightLimit {
            max: max.max(1),
            active: Mutex::new(0),
            freed: Condvar::new(),
        }
    }

    pub fn acquire(&self) -> InFlightGuard<'_> {
        let mut active = self.active.lock().unwrap_or_else(|e| e.into_inner());
        while *active >= self.max {
            active = self.freed.wait(active).unwrap_or_else(|e| e.into_inner());
        }
        *active += 1;
        InFlightGuard { limit: self }
    }

    pub fn active(&self) -> usize {
        *self.active.lock().unwrap_or_else(|e| e.into_inner())
    }
}

impl Drop for InFlightGuard<'_> {
    fn drop(&mut self) {
        let mut active = self.limit.active.lock().unwrap_or_else(|e| e.into_inner());
        *active -= 1;
        self.limit.freed.notify_one();
    }
}

/// Token bucket shared across threads. A rate of 0 never blocks.
#[derive(Debug)]
pub struct TokenBucket {
    rate: f64,
    capacity: f64,
    state: Mutex<(f64, Instant)>,
}

impl TokenBucket {
    pub fn new(per_second: f64) -> Self {
        let capacity = per_second.max(1.0);
        TokenBucket {
            rate: per_second,
            capacity,
            state: Mutex::new((capacity, Instant::now())),
        }
    }

    /// Blocks until a token is available and takes it.
    pub fn take(&self) {
        if self.rate <= 0.0 {
            return;
        }
        loop {
            let wait = {
                let mut state = self.state.lock().unwrap_or_else(|e| e.into_inner());
                let now = Instant::now();
                let (tokens, last) = *state;
                let tokens = (tokens + now.duration_since(last).as_secs_f64() * self.rate).min(self.capacity);
                if tokens >= 1.0 {
                    *state = (tokens - 1.0, now);
                    return;
                }
                *state = (tokens, now);
                Duration::from_secs_f64((1.0 - tokens) / self.rate)
            };
            std::thread::sleep(wait);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::atomic::{AtomicUsize, Ordering};
    use std::sync::Arc;

    #[test]
    fn in_flight_never_exceeds_the_limit() {
        let limit = Arc::new(InFlightLimit::new(2));
        let peak = Arc::new(AtomicUsize::new(0));
        let handles: Vec<_> = (0..8)
            .map(|_| {
                let (limit, peak) = (limit.clone(), peak.clone());
                std::thread::spawn(move || {
                    let _g = limit.acquire();
                    peak.fetch_max(limit.active(), Ordering::SeqCst);
                    std::thread::sleep(Duration::from_millis(5));
                })
            })
            .collect();
        for h in handles {
            h.join().unwrap();
        }
        assert!(peak.load(Ordering::SeqCst) <= 2);
        assert_eq!(limit.active(), 0);
    }

    #[test]
    fn bucket_paces_requests() {
        let bucket = TokenBucket::new(50.0);
        let start = Instant::now();
        for _ in 0..60 {
            bucket.take();
        }
        // 50 tokens up front, then 10 more at 50/s.
        assert!(start.elapsed() >= Duration::from_millis(150));
        TokenBucket::new(0.0).take();
    }
}
