//! Physics-lite queries over axis-aligned boxes.
//!
//! Every collider in the simulator is an [`Aabb`]. Ray and overlap queries
//! use closed-boundary semantics: a ray grazing a face hits it, and two boxes
//! sharing a face overlap. [`ColliderSet`] buckets colliders by their Z extent
//! so that queries stay local on long runs; results never depend on bucket
//! layout.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

/// Plain 3-vector in metres (x lateral, y up, z forward).
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Vec3 {
    pub const ZERO: Vec3 = Vec3 { x: 0.0, y: 0.0, z: 0.0 };

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn dot(self, other: Vec3) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn length(self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn axis(self, i: usize) -> f64 {
        match i {
            0 => self.x,
            1 => self.y,
            _ => self.z,
        }
    }

    pub fn abs(self) -> Vec3 {
        Vec3::new(self.x.abs(), self.y.abs(), self.z.abs())
    }
}

impl Add for Vec3 {
    type Output = Vec3;
    fn add(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl Sub for Vec3 {
    type Output = Vec3;
    fn sub(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Mul<f64> for Vec3 {
    type Output = Vec3;
    fn mul(self, s: f64) -> Vec3 {
        Vec3::new(self.x * s, self.y * s, self.z * s)
    }
}

impl Neg for Vec3 {
    type Output = Vec3;
    fn neg(self) -> Vec3 {
        Vec3::new(-self.x, -self.y, -self.z)
    }
}

/// Axis-aligned box given by centre and non-negative half extents.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Aabb {
    pub center: Vec3,
    pub half_extents: Vec3,
}

impl Aabb {
    pub fn new(center: Vec3, half_extents: Vec3) -> Self {
        debug_assert!(
            half_extents.x >= 0.0 && half_extents.y >= 0.0 && half_extents.z >= 0.0,
            "negative half extents: {half_extents:?}"
        );
        Self { center, half_extents }
    }

    pub fn from_min_max(min: Vec3, max: Vec3) -> Self {
        Self::new((min + max) * 0.5, (max - min) * 0.5)
    }

    pub fn min(&self) -> Vec3 {
        self.center - self.half_extents
    }

    pub fn max(&self) -> Vec3 {
        self.center + self.half_extents
    }

    pub fn size(&self) -> Vec3 {
        self.half_extents * 2.0
    }

    /// Closed-interval intersection test.
    pub fn intersects(&self, other: &Aabb) -> bool {
        let (a_min, a_max) = (self.min(), self.max());
        let (b_min, b_max) = (other.min(), other.max());
        (0..3).all(|i| a_min.axis(i) <= b_max.axis(i) && b_min.axis(i) <= a_max.axis(i))
    }

    pub fn contains_point(&self, p: Vec3) -> bool {
        let (lo, hi) = (self.min(), self.max());
        (0..3).all(|i| lo.axis(i) <= p.axis(i) && p.axis(i) <= hi.axis(i))
    }

    /// Box grown by `margin` on every side.
    pub fn inflated(&self, margin: Vec3) -> Aabb {
        Aabb::new(self.center, self.half_extents + margin)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Layer {
    Ground,
    Obstacles,
    Agent,
    Other,
}

impl Layer {
    fn bit(self) -> u8 {
        match self {
            Layer::Ground => 1,
            Layer::Obstacles => 2,
            Layer::Agent => 4,
            Layer::Other => 8,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Layer::Ground => "Ground",
            Layer::Obstacles => "Obstacles",
            Layer::Agent => "Agent",
            Layer::Other => "Other",
        }
    }
}

/// Set of layers a query may report.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LayerMask(u8);

impl LayerMask {
    pub const ALL: LayerMask = LayerMask(0b1111);
    pub const NONE: LayerMask = LayerMask(0);
    pub const GROUND: LayerMask = LayerMask(1);
    pub const OBSTACLES: LayerMask = LayerMask(2);

    pub fn of(layers: &[Layer]) -> Self {
        LayerMask(layers.iter().fold(0, |acc, l| acc | l.bit()))
    }

    pub fn with(self, layer: Layer) -> Self {
        LayerMask(self.0 | layer.bit())
    }

    pub fn without(self, layer: Layer) -> Self {
        LayerMask(self.0 & !layer.bit())
    }

    pub fn contains(self, layer: Layer) -> bool {
        self.0 & layer.bit() != 0
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Collider {
    pub aabb: Aabb,
    pub layer: Layer,
    pub owner_id: u64,
    pub root_name: String,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Ray {
    pub origin: Vec3,
    pub direction: Vec3,
    pub max_distance: f64,
}

impl Ray {
    /// Builds a ray, normalising `direction`. Returns `None` for a zero
    /// direction or non-positive distance.
    pub fn new(origin: Vec3, direction: Vec3, max_distance: f64) -> Option<Self> {
        let len = direction.length();
        if !(len > 0.0) || !(max_distance > 0.0) {
            return None;
        }
        Some(Self {
            origin,
            direction: direction * (1.0 / len),
            max_distance,
        })
    }

    pub fn down(origin: Vec3, max_distance: f64) -> Self {
        Self {
            origin,
            direction: Vec3::new(0.0, -1.0, 0.0),
            max_distance,
        }
    }

    pub fn at(&self, t: f64) -> Vec3 {
        self.origin + self.direction * t
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Hit<'a> {
    pub collider: &'a Collider,
    pub point: Vec3,
    pub distance: f64,
}

/// Slab-method ray/box test. Returns the smallest `t` in `[0, max_distance]`
/// at which the ray touches the closed box; a ray starting inside reports 0.
pub fn ray_aabb(ray: &Ray, aabb: &Aabb) -> Option<f64> {
    let (lo, hi) = (aabb.min(), aabb.max());
    let mut t_enter = 0.0_f64;
    let mut t_exit = ray.max_distance;
    for i in 0..3 {
        let o = ray.origin.axis(i);
        let d = ray.direction.axis(i);
        let (a, b) = (lo.axis(i), hi.axis(i));
        if d == 0.0 {
            if o < a || o > b {
                return None;
            }
            continue;
        }
        let inv = 1.0 / d;
        let (mut t0, mut t1) = ((a - o) * inv, (b - o) * inv);
        if t0 > t1 {
            std::mem::swap(&mut t0, &mut t1);
        }
        t_enter = t_enter.max(t0);
        t_exit = t_exit.min(t1);
        if t_enter > t_exit {
            return None;
        }
    }
    Some(t_enter)
}

const BUCKET_SIZE: f64 = 16.0;

fn bucket_of(z: f64) -> i64 {
    (z / BUCKET_SIZE).floor() as i64
}

/// Collider store with per-Z bucketing. Iteration and query results are
/// ordered by `owner_id`.
#[derive(Clone, Debug, Default)]
pub struct ColliderSet {
    colliders: BTreeMap<u64, Collider>,
    buckets: HashMap<i64, BTreeSet<u64>>,
}

impl ColliderSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.colliders.len()
    }

    pub fn is_empty(&self) -> bool {
        self.colliders.is_empty()
    }

    pub fn get(&self, owner_id: u64) -> Option<&Collider> {
        self.colliders.get(&owner_id)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Collider> {
        self.colliders.values()
    }

    /// Inserts a collider, replacing any previous one with the same owner.
    pub fn insert(&mut self, collider: Collider) {
        let id = collider.owner_id;
        self.remove(id);
        for b in Self::bucket_span(collider.aabb.min().z, collider.aabb.max().z) {
            self.buckets.entry(b).or_default().insert(id);
        }
        self.colliders.insert(id, collider);
    }

    pub fn remove(&mut self, owner_id: u64) -> Option<Collider> {
        let c = self.colliders.remove(&owner_id)?;
        for b in Self::bucket_span(c.aabb.min().z, c.aabb.max().z) {
            if let Some(set) = self.buckets.get_mut(&b) {
                set.remove(&owner_id);
                if set.is_empty() {
                    self.buckets.remove(&b);
                }
            }
        }
        Some(c)
    }

    fn bucket_span(z_lo: f64, z_hi: f64) -> std::ops::RangeInclusive<i64> {
        bucket_of(z_lo)..=bucket_of(z_hi)
    }

    fn candidates(&self, z_lo: f64, z_hi: f64) -> BTreeSet<u64> {
        let mut out = BTreeSet::new();
        for b in Self::bucket_span(z_lo, z_hi) {
            if let Some(set) = self.buckets.get(&b) {
                out.extend(set.iter().copied());
            }
        }
        out
    }

    /// Nearest mask-passing hit along the ray. Ties go to the lowest owner id.
    pub fn raycast(&self, ray: &Ray, mask: LayerMask) -> Option<Hit<'_>> {
        let z_end = ray.origin.z + ray.direction.z * ray.max_distance;
        let mut best: Option<(f64, &Collider)> = None;
        for id in self.candidates(ray.origin.z.min(z_end), ray.origin.z.max(z_end)) {
            let c = &self.colliders[&id];
            if !mask.contains(c.layer) {
                continue;
            }
            if let Some(t) = ray_aabb(ray, &c.aabb) {
                if best.is_none_or(|(bt, _)| t < bt) {
                    best = Some((t, c));
                }
            }
        }
        best.map(|(t, c)| Hit {
            collider: c,
            point: ray.at(t),
            distance: t,
        })
    }

    /// All mask-passing colliders intersecting `query` (closed intervals).
    pub fn overlap_box(&self, query: &Aabb, mask: LayerMask) -> Vec<&Collider> {
        self.candidates(query.min().z, query.max().z)
            .into_iter()
            .map(|id| &self.colliders[&id])
            .filter(|c| mask.contains(c.layer) && c.aabb.intersects(query))
            .collect()
    }
}

impl Serialize for ColliderSet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(self.colliders.values())
    }
}
