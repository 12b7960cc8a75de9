use serde::Serialize;

use super::Path;
use crate::kinematics::NodeId;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct EntryId(pub u64);

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RouteCacheEntry {
    pub id: EntryId,
    pub source: NodeId,
    pub destination: NodeId,
    pub path: Path,
    /// Usable while `now < expires_at`.
    pub expires_at: f64,
}

/// Result of a cache lookup: how many live routes exist, and which.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CacheLookup {
    pub count: usize,
    pub entry_ids: Vec<EntryId>,
}

#[derive(Debug, Clone, Default)]
pub struct RouteCache {
    entries: Vec<RouteCacheEntry>,
    next_id: u64,
}

impl RouteCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, source: NodeId, destination: NodeId, path: Path, expires_at: f64) -> EntryId {
        let id = EntryId(self.next_id);
        self.next_id += 1;
        self.entries.push(RouteCacheEntry { id, source, destination, path, expires_at });
        id
    }

    pub fn get(&self, id: EntryId) -> Option<&RouteCacheEntry> {
        self.entries.iter().find(|e| e.id == id)
    }

    pub fn entries(&self) -> &[RouteCacheEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Live entries for `(source, destination)` in insertion order.
    pub fn check(&self, source: NodeId, destination: NodeId, now: f64) -> CacheLookup {
        let entry_ids: Vec<_> = self
            .entries
            .iter()
            .filter(|e| e.source == source && e.destination == destination && now < e.expires_at)
            .map(|e| e.id)
            .collect();
        CacheLookup { count: entry_ids.len(), entry_ids }
    }

    /// Drops every entry whose lifetime is over. Returns how many were removed.
    pub fn maintain(&mut self, now: f64) -> usize {
        let before = self.entries.len();
        self.entries.retain(|e| e.expires_at > now);
        before - self.entries.len()
    }

    /// Earliest pending expiry, if any.
    pub fn next_expiry(&self) -> Option<f64> {
        self.entries.iter().map(|e| e.expires_at).min_by(f64::total_cmp)
    }
}
