//! Per-host request spacing. A host's slot is held for the whole request,
//! and the next request to that host starts no earlier than `delay` after
//! the previous one finished.

use std::collections::HashMap;
use std::sync::Arc;
use std::time::{Duration, Instant};

use tokio::sync::{Mutex, OwnedMutexGuard};

pub(crate) struct HostLimiter {
    delay: Duration,
    hosts: std::sync::Mutex<HashMap<String, Arc<Mutex<Option<Instant>>>>>,
}

pub(crate) struct Slot {
    last_end: OwnedMutexGuard<Option<Instant>>,
    delay: Duration,
}

impl HostLimiter {
    pub(crate) fn new(delay: Duration) -> Self {
        HostLimiter {
            delay,
            hosts: Default::default(),
        }
    }

    pub(crate) async fn acquire(&self, host: &str) -> Slot {
        let lock = self
            .hosts
            .lock()
            .unwrap()
            .entry(host.to_string())
            .or_default()
            .clone();
        let mut slot = Slot {
            last_end: lock.lock_owned().await,
            delay: self.delay,
        };
        slot.wait().await;
        slot
    }
}

impl Slot {
    /// Sleeps until the delay since the last recorded request has passed.
    pub(crate) async fn wait(&mut self) {
        if let Some(last) = *self.last_end {
            tokio::time::sleep_until((last + self.delay).into()).await;
        }
    }

    /// Records that a request to the host just finished.
    pub(crate) fn mark(&mut self) {
        *self.last_end = Some(Instant::now());
    }
}
