//! Swept footprints and the time-bucketed reservation table.
//!
//! Motions are cut into pieces of at most `piece` seconds, each covered by a
//! convex region that contains the padded footprint at every instant of the
//! piece. Straight drives at constant yaw are covered exactly by the hull of
//! the footprints at both ends. Rotations are sampled and the hull of the
//! samples is dilated by the largest displacement any body point can make
//! between two samples.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock};

use crate::geometry::{Aabb, ConvexPolygon, Point};
use crate::kinematics::MotionProfile;
use crate::model::RobotId;
use crate::routing::{Motion, RArcId, RNodeId, RoutingArc, RoutingGraph};
use crate::time::Time;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepParams {
    pub piece: Time,
    /// Sampling step for rotations, seconds.
    pub sample_dt: f64,
}

impl Default for SweepParams {
    fn default() -> Self {
        SweepParams { piece: Time::from_whole_secs(1), sample_dt: 0.1 }
    }
}

/// A region occupied during `[start, end)`, relative to the start of a motion.
#[derive(Clone, Debug)]
pub struct SweepPiece {
    pub start: Time,
    pub end: Time,
    pub region: ConvexPolygon,
}

/// Conservative cover of `footprint` (robot frame) moving along `arc` with
/// `profile`, lasting `duration`.
pub fn sweep_arc(
    arc: &RoutingArc,
    profile: &MotionProfile,
    duration: Time,
    footprint: &ConvexPolygon,
    reversed: bool,
    params: &SweepParams,
) -> Vec<SweepPiece> {
    let place = |t: f64| {
        let (p, yaw) = arc.pose_with(profile, reversed, t);
        footprint.transformed(yaw, p)
    };
    if duration <= Time::ZERO {
        return Vec::new();
    }
    let mut pieces = Vec::new();
    let mut start = Time::ZERO;
    while start < duration {
        let end = (start + params.piece).min(duration);
        let (t0, t1) = (start.secs(), end.secs());
        let region = match arc.motion {
            Motion::Translate { .. } | Motion::Stay { .. } => {
                let mut pts: Vec<Point> = place(t0).vertices().to_vec();
                pts.extend_from_slice(place(t1).vertices());
                ConvexPolygon::hull(&pts)
            }
            Motion::Rotate { .. } => {
                let steps = ((t1 - t0) / params.sample_dt).ceil().max(1.0) as usize;
                let radius = footprint.radius();
                let mut pts = Vec::new();
                let mut slack: f64 = 0.0;
                let mut prev = arc.pose_with(profile, reversed, t0);
                for k in 0..=steps {
                    let t = t0 + (t1 - t0) * k as f64 / steps as f64;
                    let pose = arc.pose_with(profile, reversed, t);
                    pts.extend_from_slice(footprint.transformed(pose.1, pose.0).vertices());
                    let dyaw = crate::geometry::angle_diff(pose.1, prev.1);
                    slack = slack.max(pose.0.dist(prev.0) + radius * dyaw);
                    prev = pose;
                }
                ConvexPolygon::hull(&pts).dilated(slack)
            }
        };
        pieces.push(SweepPiece { start, end, region });
        start = end;
    }
    pieces
}

/// Per-footprint cache of arc sweeps and resting regions over one routing graph.
pub struct SweepCache {
    pub graph: Arc<RoutingGraph>,
    pub footprint: ConvexPolygon,
    pub params: SweepParams,
    arcs: Vec<OnceLock<Arc<[SweepPiece]>>>,
    resting: Vec<OnceLock<ConvexPolygon>>,
}

impl std::fmt::Debug for SweepCache {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SweepCache").field("footprint", &self.footprint).finish()
    }
}

impl SweepCache {
    pub fn new(graph: Arc<RoutingGraph>, footprint: ConvexPolygon, params: SweepParams) -> SweepCache {
        let arcs = (0..graph.arcs.len() * 4).map(|_| OnceLock::new()).collect();
        let resting = (0..graph.nodes.len() * 2).map(|_| OnceLock::new()).collect();
        SweepCache { graph, footprint, params, arcs, resting }
    }

    pub fn arc(&self, arc: RArcId, loaded: bool, reversed: bool) -> Arc<[SweepPiece]> {
        self.arcs[arc * 4 + 2 * loaded as usize + reversed as usize]
            .get_or_init(|| {
                let a = &self.graph.arcs[arc];
                sweep_arc(a, &a.profile[loaded as usize], a.duration(loaded), &self.footprint, reversed, &self.params).into()
            })
            .clone()
    }

    /// Footprint of a robot resting on direction node `r`.
    pub fn resting(&self, r: RNodeId, reversed: bool) -> &ConvexPolygon {
        self.resting[2 * r + reversed as usize].get_or_init(|| {
            let p = self.graph.positions[self.graph.nodes[r].base.0];
            self.footprint.transformed(self.graph.yaw(r, reversed), p)
        })
    }
}

#[derive(Clone, Debug)]
pub struct Reservation {
    pub robot: RobotId,
    pub start: Time,
    pub end: Time,
    pub region: ConvexPolygon,
    pub tag: u64,
}

pub type RecordId = usize;

/// Bucket entry: a record's widened interval and bounding box, kept inline
/// so that most candidates are rejected without touching the record.
#[derive(Clone, Copy, Debug)]
struct Entry {
    lo: Time,
    hi: Time,
    aabb: Aabb,
    robot: RobotId,
    id: RecordId,
}

/// Occupancy records of planned robots, indexed by time bucket.
///
/// Every stored interval is widened by `margin` on both sides when compared.
/// Intervals are half-open, so touching intervals do not conflict.
#[derive(Clone, Debug)]
pub struct ReservationTable {
    records: Vec<Option<Reservation>>,
    free: Vec<RecordId>,
    /// Records by time bucket; negative buckets share slot 0.
    buckets: Vec<Vec<Entry>>,
    open: Vec<RecordId>,
    by_tag: HashMap<u64, Vec<RecordId>>,
    bucket_len: Time,
    margin: Time,
    live: usize,
}

impl ReservationTable {
    pub fn new(margin: Time) -> Self {
        Self::with_bucket(margin, Time::from_whole_secs(1))
    }

    pub fn with_bucket(margin: Time, bucket_len: Time) -> Self {
        ReservationTable {
            records: Vec::new(),
            free: Vec::new(),
            buckets: Vec::new(),
            open: Vec::new(),
            by_tag: HashMap::new(),
            bucket_len,
            margin,
            live: 0,
        }
    }

    pub fn margin(&self) -> Time {
        self.margin
    }

    pub fn len(&self) -> usize {
        self.live
    }

    pub fn is_empty(&self) -> bool {
        self.live == 0
    }

    pub fn records(&self) -> impl Iterator<Item = (RecordId, &Reservation)> {
        self.records.iter().enumerate().filter_map(|(i, r)| r.as_ref().map(|r| (i, r)))
    }

    pub fn get(&self, id: RecordId) -> Option<&Reservation> {
        self.records.get(id).and_then(|r| r.as_ref())
    }

    /// Latest finite end among stored records.
    pub fn max_finite_end(&self) -> Time {
        self.records().filter(|(_, r)| !r.end.is_infinite()).map(|(_, r)| r.end).max().unwrap_or(Time::ZERO)
    }

    fn slots(&self, start: Time, end: Time) -> std::ops::RangeInclusive<usize> {
        let lo = (start - self.margin).bucket(self.bucket_len).max(0) as usize;
        let hi = Time((end + self.margin).0 - 1).bucket(self.bucket_len).max(0) as usize;
        lo..=hi
    }

    fn index(&mut self, id: RecordId) {
        let r = self.records[id].as_ref().expect("live record");
        if r.end.is_infinite() {
            self.open.push(id);
        } else {
            let range = self.slots(r.start, r.end);
            let entry = Entry { lo: r.start - self.margin, hi: r.end + self.margin, aabb: *r.region.aabb(), robot: r.robot, id };
            if self.buckets.len() <= *range.end() {
                self.buckets.resize_with(range.end() + 1, Vec::new);
            }
            for b in range {
                self.buckets[b].push(entry);
            }
        }
    }

    fn unindex(&mut self, id: RecordId) {
        let r = self.records[id].as_ref().expect("live record");
        if r.end.is_infinite() {
            self.open.retain(|&o| o != id);
        } else {
            for b in self.slots(r.start, r.end) {
                self.buckets[b].retain(|e| e.id != id);
            }
        }
    }

    pub fn reserve(&mut self, robot: RobotId, start: Time, end: Time, region: ConvexPolygon, tag: u64) -> RecordId {
        assert!(end > start, "empty reservation [{start}, {end})");
        let rec = Reservation { robot, start, end, region, tag };
        let id = match self.free.pop() {
            Some(id) => {
                self.records[id] = Some(rec);
                id
            }
            None => {
                self.records.push(Some(rec));
                self.records.len() - 1
            }
        };
        self.index(id);
        self.by_tag.entry(tag).or_default().push(id);
        self.live += 1;
        id
    }

    pub fn remove(&mut self, id: RecordId) -> Option<Reservation> {
        self.records.get(id)?.as_ref()?;
        self.unindex(id);
        let rec = self.records[id].take().expect("live record");
        if let Some(list) = self.by_tag.get_mut(&rec.tag) {
            list.retain(|&o| o != id);
        }
        self.free.push(id);
        self.live -= 1;
        Some(rec)
    }

    /// Removes every record carrying `tag`.
    pub fn release_tag(&mut self, tag: u64) -> usize {
        let ids = self.by_tag.remove(&tag).unwrap_or_default();
        let n = ids.len();
        for id in ids {
            if self.records[id].is_some() {
                self.unindex(id);
                self.records[id] = None;
                self.free.push(id);
                self.live -= 1;
            }
        }
        n
    }

    /// Shortens a record so that it ends at `end`; removes it if that leaves nothing.
    pub fn truncate(&mut self, id: RecordId, end: Time) {
        let Some(r) = self.records.get(id).and_then(|r| r.as_ref()) else { return };
        if end >= r.end {
            return;
        }
        if end <= r.start {
            self.remove(id);
            return;
        }
        self.unindex(id);
        self.records[id].as_mut().expect("live record").end = end;
        self.index(id);
    }

    fn overlaps(&self, r: &Reservation, start: Time, end: Time) -> bool {
        let lo = r.start - self.margin;
        let hi = r.end + self.margin;
        start < hi && lo < end
    }

    /// First record of another robot whose region meets `region` during `[start, end)`.
    pub fn first_conflict(&self, robot: RobotId, start: Time, end: Time, region: &ConvexPolygon) -> Option<&Reservation> {
        let check = |id: &RecordId| {
            let r = self.records[*id].as_ref().expect("indexed record");
            (r.robot != robot && self.overlaps(r, start, end) && r.region.intersects(region)).then_some(r)
        };
        if let Some(hit) = self.open.iter().find_map(check) {
            return Some(hit);
        }
        if end.is_infinite() {
            return self
                .records
                .iter()
                .flatten()
                .find(|r| r.robot != robot && self.overlaps(r, start, end) && r.region.intersects(region));
        }
        let lo = start.bucket(self.bucket_len).max(0) as usize;
        let hi = Time(end.0 - 1).bucket(self.bucket_len).max(0) as usize;
        let hi = hi.min(self.buckets.len().saturating_sub(1));
        if lo >= self.buckets.len() {
            return None;
        }
        let bb = region.aabb();
        for list in &self.buckets[lo..=hi] {
            for e in list {
                if e.robot != robot && start < e.hi && e.lo < end && e.aabb.overlaps(bb) {
                    let r = self.records[e.id].as_ref().expect("indexed record");
                    if r.region.intersects(region) {
                        return Some(r);
                    }
                }
            }
        }
        None
    }

    pub fn conflicts(&self, robot: RobotId, start: Time, end: Time, region: &ConvexPolygon) -> bool {
        self.first_conflict(robot, start, end, region).is_some()
    }

    /// Whether `robot` can occupy `region` from `from` on, forever.
    pub fn can_stay(&self, robot: RobotId, region: &ConvexPolygon, from: Time) -> bool {
        !self.conflicts(robot, from, Time::INFINITY, region)
    }

    /// Whether a motion starting at `t0` whose sweep is `pieces` is free.
    pub fn motion_is_free(&self, robot: RobotId, t0: Time, pieces: &[SweepPiece]) -> bool {
        let (Some(first), Some(last)) = (pieces.first(), pieces.last()) else { return true };
        let (start, end) = (t0 + first.start, t0 + last.end);
        let mut bb = *first.region.aabb();
        for p in &pieces[1..] {
            let b = p.region.aabb();
            bb.min.x = bb.min.x.min(b.min.x);
            bb.min.y = bb.min.y.min(b.min.y);
            bb.max.x = bb.max.x.max(b.max.x);
            bb.max.y = bb.max.y.max(b.max.y);
        }
        // Pieces are sorted and contiguous in time.
        let hits = |lo: Time, hi: Time, r: &Reservation| {
            let from = pieces.partition_point(|p| t0 + p.end <= lo);
            pieces[from..].iter().take_while(|p| t0 + p.start < hi).any(|p| r.region.intersects(&p.region))
        };
        for &id in &self.open {
            let r = self.records[id].as_ref().expect("indexed record");
            if r.robot != robot && self.overlaps(r, start, end) && r.region.aabb().overlaps(&bb) && hits(r.start - self.margin, r.end + self.margin, r) {
                return false;
            }
        }
        if self.buckets.is_empty() {
            return true;
        }
        let lo = start.bucket(self.bucket_len).max(0) as usize;
        let hi = (Time(end.0 - 1).bucket(self.bucket_len).max(0) as usize).min(self.buckets.len() - 1);
        if lo > hi {
            return true;
        }
        for (b, list) in self.buckets[lo..=hi].iter().enumerate() {
            for e in list {
                // Records spanning several buckets are checked in the first one scanned.
                let first = (e.lo.bucket(self.bucket_len).max(0) as usize).max(lo);
                if first == lo + b && e.robot != robot && start < e.hi && e.lo < end && e.aabb.overlaps(&bb) {
                    let r = self.records[e.id].as_ref().expect("indexed record");
                    if hits(e.lo, e.hi, r) {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Pairs of records of different robots that overlap in time (with margin) and space.
    pub fn violations(&self) -> Vec<(RecordId, RecordId)> {
        let all: Vec<(RecordId, &Reservation)> = self.records().collect();
        let mut out = Vec::new();
        for (i, (ia, a)) in all.iter().enumerate() {
            for (ib, b) in &all[i + 1..] {
                if a.robot != b.robot && a.start < b.end && b.start < a.end && a.region.intersects(&b.region) {
                    out.push((*ia, *ib));
                }
            }
        }
        out
    }
}
