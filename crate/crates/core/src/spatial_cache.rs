//! The archive of discovered positions.
//!
//! Every stored entry is more than `threshold` meters from every other
//! entry, so the archive is a K-net over the space the agents have visited.
//! Each entry carries the checkpoint captured when it was first seen and a
//! visit count that grows whenever an observation lands closest to it.
//!
//! Nearest-neighbour queries go through an R*-tree. All mutation of the
//! tree happens under a write lock, which makes the check-then-insert in
//! [`SpatialCache::insert_if_novel`] a single atomic step. Visit counts are
//! atomics so that [`SpatialCache::record_visit`] only needs the read lock.

use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};

use parking_lot::{RwLock, RwLockReadGuard};
use rstar::primitives::GeomWithData;
use rstar::RTree;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::environment::Checkpoint;
use crate::geometry::Position;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct EntryId(pub usize);

impl fmt::Display for EntryId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum CacheError {
    #[error("position {0} has a non-finite coordinate")]
    NonFinite(Position),
    #[error("threshold must be a positive finite distance, got {0}")]
    InvalidThreshold(f64),
    #[error("the cache is empty")]
    Empty,
}

/// Point-in-time copy of one entry (without its checkpoint).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EntrySnapshot {
    pub id: EntryId,
    pub position: Position,
    pub visit_count: u64,
    pub first_seen: u64,
}

/// Result of feeding one observed position to the cache.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Observed {
    Inserted(EntryId),
    Visited(EntryId),
}

impl Observed {
    pub fn id(self) -> EntryId {
        match self {
            Observed::Inserted(id) | Observed::Visited(id) => id,
        }
    }
}

type TreePoint = GeomWithData<[f64; 3], usize>;

#[derive(Default)]
struct Inner {
    tree: RTree<TreePoint>,
    positions: Vec<Position>,
    first_seen: Vec<u64>,
    checkpoints: Vec<Checkpoint>,
    counts: Vec<AtomicU64>,
}

impl Inner {
    /// Nearest entry and its distance. Ties go to the lowest id.
    fn nearest(&self, p: &Position) -> Option<(usize, f64)> {
        let query = p.to_array();
        let mut iter = self.tree.nearest_neighbor_iter_with_distance_2(&query);
        let (first, best_d2) = iter.next()?;
        let mut best = first.data;
        for (candidate, d2) in iter {
            if d2 > best_d2 {
                break;
            }
            best = best.min(candidate.data);
        }
        Some((best, self.positions[best].distance(p)))
    }

    fn push(&mut self, p: Position, checkpoint: Checkpoint, t: u64) -> EntryId {
        let id = self.positions.len();
        self.tree.insert(TreePoint::new(p.to_array(), id));
        self.positions.push(p);
        self.first_seen.push(t);
        self.checkpoints.push(checkpoint);
        self.counts.push(AtomicU64::new(1));
        EntryId(id)
    }
}

pub struct SpatialCache {
    threshold: f64,
    inner: RwLock<Inner>,
}

impl fmt::Debug for SpatialCache {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SpatialCache")
            .field("threshold", &self.threshold)
            .field("len", &self.len())
            .finish()
    }
}

fn check_finite(p: &Position) -> Result<(), CacheError> {
    if p.is_finite() {
        Ok(())
    } else {
        Err(CacheError::NonFinite(*p))
    }
}

impl SpatialCache {
    pub fn new(threshold: f64) -> Result<Self, CacheError> {
        if !(threshold.is_finite() && threshold > 0.0) {
            return Err(CacheError::InvalidThreshold(threshold));
        }
        Ok(Self {
            threshold,
            inner: RwLock::new(Inner::default()),
        })
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    pub fn len(&self) -> usize {
        self.inner.read().positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Stores `p` when the cache is empty or every entry is strictly farther
    /// than the threshold. A distance exactly equal to the threshold does not
    /// insert.
    pub fn insert_if_novel(
        &self,
        p: Position,
        checkpoint: Checkpoint,
        t: u64,
    ) -> Result<Option<EntryId>, CacheError> {
        check_finite(&p)?;
        let mut inner = self.inner.write();
        match inner.nearest(&p) {
            Some((_, d)) if d <= self.threshold => Ok(None),
            _ => Ok(Some(inner.push(p, checkpoint, t))),
        }
    }

    /// Minimum distance from `p` to any entry, `+inf` when empty.
    pub fn nearest_distance(&self, p: &Position) -> f64 {
        self.inner
            .read()
            .nearest(p)
            .map_or(f64::INFINITY, |(_, d)| d)
    }

    pub fn nearest(&self, p: &Position) -> Option<(EntryId, f64)> {
        self.inner.read().nearest(p).map(|(i, d)| (EntryId(i), d))
    }

    /// Increments the visit count of the entry nearest to `p`.
    pub fn record_visit(&self, p: &Position) -> Result<EntryId, CacheError> {
        let inner = self.inner.read();
        let (id, _) = inner.nearest(p).ok_or(CacheError::Empty)?;
        inner.counts[id].fetch_add(1, Ordering::Relaxed);
        Ok(EntryId(id))
    }

    /// One exploration step against the cache: insert when novel, otherwise
    /// count a visit to the nearest entry. The checkpoint is only built when
    /// an insertion actually happens.
    pub fn observe(
        &self,
        p: Position,
        checkpoint: impl FnOnce() -> Checkpoint,
        t: u64,
    ) -> Result<Observed, CacheError> {
        check_finite(&p)?;
        {
            let inner = self.inner.read();
            if let Some((id, d)) = inner.nearest(&p) {
                if d <= self.threshold {
                    inner.counts[id].fetch_add(1, Ordering::Relaxed);
                    return Ok(Observed::Visited(EntryId(id)));
                }
            }
        }
        let mut inner = self.inner.write();
        // Another writer may have covered `p` since the read lock was dropped.
        if let Some((id, d)) = inner.nearest(&p) {
            if d <= self.threshold {
                inner.counts[id].fetch_add(1, Ordering::Relaxed);
                return Ok(Observed::Visited(EntryId(id)));
            }
        }
        Ok(Observed::Inserted(inner.push(p, checkpoint(), t)))
    }

    /// Consistent copy of every entry, ordered by id.
    pub fn snapshot_entries(&self) -> Vec<EntrySnapshot> {
        // The write lock keeps concurrent record_visit calls out while counts are read.
        let inner = self.inner.write();
        (0..inner.positions.len())
            .map(|i| EntrySnapshot {
                id: EntryId(i),
                position: inner.positions[i],
                visit_count: inner.counts[i].load(Ordering::Relaxed),
                first_seen: inner.first_seen[i],
            })
            .collect()
    }

    pub fn checkpoint(&self, id: EntryId) -> Option<Checkpoint> {
        self.inner.read().checkpoints.get(id.0).cloned()
    }

    /// Shared read access to the entries without copying them.
    pub fn view(&self) -> CacheView<'_> {
        CacheView {
            inner: self.inner.read(),
        }
    }
}

/// Borrowed view of the cache. Inserts block while a view is alive; visit
/// counts may still advance.
pub struct CacheView<'a> {
    inner: RwLockReadGuard<'a, Inner>,
}

impl CacheView<'_> {
    pub fn len(&self) -> usize {
        self.inner.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inner.positions.is_empty()
    }

    pub fn positions(&self) -> &[Position] {
        &self.inner.positions
    }

    pub fn visit_count(&self, index: usize) -> u64 {
        self.inner.counts[index].load(Ordering::Relaxed)
    }

    pub fn first_seen(&self, index: usize) -> u64 {
        self.inner.first_seen[index]
    }

    pub fn checkpoint(&self, index: usize) -> &Checkpoint {
        &self.inner.checkpoints[index]
    }
}
