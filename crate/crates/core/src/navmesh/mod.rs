//! Walkable-surface mesh: convex planar polygons plus an optional adjacency
//! list. Used to sample exploration goals and to judge whether a discovered
//! position is somewhere a player is expected to be.

mod goals;
mod io;

pub use goals::{sample_goals, Goal, GoalSet, GoalStatus, DRAIN_RADIUS};
pub use io::{parse_navmesh, write_navmesh};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{Aabb, Position};

/// Tolerance for planarity, convexity and shared-edge checks.
pub const MESH_TOLERANCE: f64 = 1e-6;

/// Discovered points within this distance of the mesh are expected.
pub const NEAR_MESH_RADIUS: f64 = 3.0;

#[derive(Debug, Error, PartialEq)]
pub enum NavMeshError {
    #[error("polygon {polygon} has {count} vertices, need at least 3")]
    TooFewVertices { polygon: usize, count: usize },
    #[error("polygon {polygon} references vertex {vertex} but only {len} exist")]
    BadVertexIndex { polygon: usize, vertex: usize, len: usize },
    #[error("polygon {0} is degenerate (zero area)")]
    Degenerate(usize),
    #[error("polygon {0} is not planar")]
    NonPlanar(usize),
    #[error("polygon {0} is not convex")]
    NonConvex(usize),
    #[error("adjacency ({0}, {1}) refers to a missing polygon or the polygons share no edge")]
    BadAdjacency(usize, usize),
    #[error("vertex {0} has a non-finite coordinate")]
    NonFiniteVertex(usize),
    #[error("goal spacing must be positive and finite, got {0}")]
    InvalidSpacing(f64),
    #[error("the mesh has no polygons")]
    Empty,
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

/// Where a discovered (non-goal) point sits relative to the mesh. Goal
/// markers use `GoalReached`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PointClass {
    GoalReached,
    NearMesh,
    OffMesh,
}

impl PointClass {
    pub fn as_str(self) -> &'static str {
        match self {
            PointClass::GoalReached => "goal_reached",
            PointClass::NearMesh => "near_mesh",
            PointClass::OffMesh => "off_mesh",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "goal_reached" => Some(PointClass::GoalReached),
            "near_mesh" => Some(PointClass::NearMesh),
            "off_mesh" => Some(PointClass::OffMesh),
            _ => None,
        }
    }
}

/// A convex planar polygon with a cached local frame.
#[derive(Clone, Debug, PartialEq)]
pub struct Polygon {
    indices: Vec<usize>,
    vertices: Vec<Position>,
    origin: Position,
    normal: Position,
    u: Position,
    v: Position,
    /// Vertex coordinates in the (u, v) frame, counter-clockwise.
    local: Vec<(f64, f64)>,
    area: f64,
    bounds: Aabb,
}

impl Polygon {
    fn build(id: usize, indices: Vec<usize>, all: &[Position]) -> Result<Self, NavMeshError> {
        if indices.len() < 3 {
            return Err(NavMeshError::TooFewVertices { polygon: id, count: indices.len() });
        }
        let mut vertices = Vec::with_capacity(indices.len());
        for &i in &indices {
            let v = all.get(i).ok_or(NavMeshError::BadVertexIndex {
                polygon: id,
                vertex: i,
                len: all.len(),
            })?;
            vertices.push(*v);
        }
        let n = vertices.len();
        let origin = vertices.iter().fold(Position::default(), |acc, p| acc + *p) * (1.0 / n as f64);

        // Newell's method: robust normal for planar polygons of any size.
        let mut newell = Position::default();
        for i in 0..n {
            let a = vertices[i];
            let b = vertices[(i + 1) % n];
            newell.x += (a.y - b.y) * (a.z + b.z);
            newell.y += (a.z - b.z) * (a.x + b.x);
            newell.z += (a.x - b.x) * (a.y + b.y);
        }
        let twice_area = newell.norm();
        if twice_area <= MESH_TOLERANCE * MESH_TOLERANCE {
            return Err(NavMeshError::Degenerate(id));
        }
        let mut normal = newell * (1.0 / twice_area);
        if normal.z < 0.0 {
            normal = normal * -1.0;
        }
        for p in &vertices {
            if (*p - origin).dot(&normal).abs() > MESH_TOLERANCE {
                return Err(NavMeshError::NonPlanar(id));
            }
        }

        // In-plane axes: world x projected onto the plane, unless the plane
        // is nearly perpendicular to x.
        let world_x = Position::new(1.0, 0.0, 0.0);
        let world_y = Position::new(0.0, 1.0, 0.0);
        let mut u = world_x - normal * world_x.dot(&normal);
        if u.norm() < 0.1 {
            u = world_y - normal * world_y.dot(&normal);
        }
        let u = u * (1.0 / u.norm());
        let v = normal.cross(&u);

        let mut local: Vec<(f64, f64)> = vertices
            .iter()
            .map(|p| {
                let r = *p - origin;
                (r.dot(&u), r.dot(&v))
            })
            .collect();
        let signed: f64 = (0..n)
            .map(|i| {
                let (ax, ay) = local[i];
                let (bx, by) = local[(i + 1) % n];
                ax * by - bx * ay
            })
            .sum();
        if signed < 0.0 {
            local.reverse();
        }
        // Convexity: every turn is left (or straight within tolerance).
        for i in 0..n {
            let (ax, ay) = local[i];
            let (bx, by) = local[(i + 1) % n];
            let (cx, cy) = local[(i + 2) % n];
            let (ex, ey) = (bx - ax, by - ay);
            let len = (ex * ex + ey * ey).sqrt();
            if len <= MESH_TOLERANCE {
                return Err(NavMeshError::Degenerate(id));
            }
            // Signed distance of c from the supporting line of edge a→b.
            let side = (ex * (cy - ay) - ey * (cx - ax)) / len;
            if side < -MESH_TOLERANCE {
                return Err(NavMeshError::NonConvex(id));
            }
        }

        let bounds = Aabb::from_points(&vertices).expect("non-empty polygon");
        Ok(Self {
            indices,
            vertices,
            origin,
            normal,
            u,
            v,
            local,
            area: twice_area / 2.0,
            bounds,
        })
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn vertices(&self) -> &[Position] {
        &self.vertices
    }

    pub fn normal(&self) -> Position {
        self.normal
    }

    pub fn area(&self) -> f64 {
        self.area
    }

    pub fn bounds(&self) -> &Aabb {
        &self.bounds
    }

    /// Vertex average, which lies inside any convex polygon.
    pub fn centroid(&self) -> Position {
        self.origin
    }

    fn to_local(&self, p: &Position) -> (f64, f64, f64) {
        let r = *p - self.origin;
        (r.dot(&self.u), r.dot(&self.v), r.dot(&self.normal))
    }

    fn local_to_world(&self, a: f64, b: f64) -> Position {
        self.origin + self.u * a + self.v * b
    }

    fn contains_local(&self, a: f64, b: f64, tol: f64) -> bool {
        let n = self.local.len();
        (0..n).all(|i| {
            let (ax, ay) = self.local[i];
            let (bx, by) = self.local[(i + 1) % n];
            let (ex, ey) = (bx - ax, by - ay);
            let len = (ex * ex + ey * ey).sqrt();
            (ex * (b - ay) - ey * (a - ax)) / len >= -tol
        })
    }

    /// Exact Euclidean distance from `p` to the polygon surface.
    pub fn distance_to(&self, p: &Position) -> f64 {
        let (a, b, h) = self.to_local(p);
        if self.contains_local(a, b, 0.0) {
            return h.abs();
        }
        let n = self.vertices.len();
        (0..n)
            .map(|i| point_segment_distance(p, &self.vertices[i], &self.vertices[(i + 1) % n]))
            .fold(f64::INFINITY, f64::min)
    }
}

fn point_segment_distance(p: &Position, a: &Position, b: &Position) -> f64 {
    let ab = *b - *a;
    let len2 = ab.dot(&ab);
    let t = if len2 > 0.0 {
        ((*p - *a).dot(&ab) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    p.distance(&(*a + ab * t))
}

#[derive(Clone, Debug, PartialEq)]
pub struct NavMesh {
    vertices: Vec<Position>,
    polygons: Vec<Polygon>,
    adjacency: Vec<(usize, usize)>,
}

impl NavMesh {
    pub fn new(
        vertices: Vec<Position>,
        polygons: Vec<Vec<usize>>,
        adjacency: Vec<(usize, usize)>,
    ) -> Result<Self, NavMeshError> {
        if let Some(i) = vertices.iter().position(|v| !v.is_finite()) {
            return Err(NavMeshError::NonFiniteVertex(i));
        }
        let polygons = polygons
            .into_iter()
            .enumerate()
            .map(|(i, idx)| Polygon::build(i, idx, &vertices))
            .collect::<Result<Vec<_>, _>>()?;
        for &(m, n) in &adjacency {
            let (Some(a), Some(b)) = (polygons.get(m), polygons.get(n)) else {
                return Err(NavMeshError::BadAdjacency(m, n));
            };
            if m == n || !share_edge(a, b) {
                return Err(NavMeshError::BadAdjacency(m, n));
            }
        }
        Ok(Self {
            vertices,
            polygons,
            adjacency,
        })
    }

    pub fn empty() -> Self {
        Self {
            vertices: Vec::new(),
            polygons: Vec::new(),
            adjacency: Vec::new(),
        }
    }

    pub fn vertices(&self) -> &[Position] {
        &self.vertices
    }

    pub fn polygons(&self) -> &[Polygon] {
        &self.polygons
    }

    pub fn adjacency(&self) -> &[(usize, usize)] {
        &self.adjacency
    }

    pub fn is_empty(&self) -> bool {
        self.polygons.is_empty()
    }

    pub fn surface_area(&self) -> f64 {
        self.polygons.iter().map(Polygon::area).sum()
    }

    pub fn bounds(&self) -> Option<Aabb> {
        Aabb::from_points(&self.vertices)
    }

    /// Exact minimum distance from `p` to the union of polygon surfaces.
    pub fn distance_to(&self, p: &Position) -> Result<f64, NavMeshError> {
        if self.polygons.is_empty() {
            return Err(NavMeshError::Empty);
        }
        let mut best = f64::INFINITY;
        for poly in &self.polygons {
            // The bounding box distance is a lower bound on the polygon distance.
            if poly.bounds.distance_to(p) >= best {
                continue;
            }
            best = best.min(poly.distance_to(p));
        }
        Ok(best)
    }

    /// `NearMesh` within [`NEAR_MESH_RADIUS`] (inclusive), otherwise `OffMesh`.
    pub fn classify_point(&self, p: &Position) -> Result<PointClass, NavMeshError> {
        Ok(classify_distance(self.distance_to(p)?))
    }
}

pub fn classify_distance(d: f64) -> PointClass {
    if d <= NEAR_MESH_RADIUS {
        PointClass::NearMesh
    } else {
        PointClass::OffMesh
    }
}

/// Whether some edge of `a` and some edge of `b` overlap along a segment of
/// positive length. Handles T-junctions, where the polygons share no vertex.
fn share_edge(a: &Polygon, b: &Polygon) -> bool {
    let t = MESH_TOLERANCE;
    let edges = |p: &Polygon| {
        let n = p.vertices.len();
        (0..n).map(move |i| (p.vertices[i], p.vertices[(i + 1) % n])).collect::<Vec<_>>()
    };
    let eb = edges(b);
    edges(a).into_iter().any(|(a0, a1)| {
        let d = a1 - a0;
        let len = d.norm();
        let u = d * (1.0 / len);
        eb.iter().any(|&(b0, b1)| {
            let off = |p: Position| {
                let r = p - a0;
                (r - u * r.dot(&u)).norm()
            };
            if off(b0) > t || off(b1) > t {
                return false;
            }
            let (s0, s1) = ((b0 - a0).dot(&u), (b1 - a0).dot(&u));
            let lo = s0.min(s1).max(0.0);
            let hi = s0.max(s1).min(len);
            hi - lo > t
        })
    })
}

fn boxes_touch(a: &Aabb, b: &Aabb) -> bool {
    let t = MESH_TOLERANCE;
    a.min.x <= b.max.x + t
        && b.min.x <= a.max.x + t
        && a.min.y <= b.max.y + t
        && b.min.y <= a.max.y + t
        && a.min.z <= b.max.z + t
        && b.min.z <= a.max.z + t
}

/// Pairs of polygons whose boundaries overlap along an edge segment.
pub fn shared_edge_adjacency(polygons: &[Vec<usize>], vertices: &[Position]) -> Vec<(usize, usize)> {
    let built: Vec<Option<Polygon>> = polygons
        .iter()
        .enumerate()
        .map(|(i, idx)| Polygon::build(i, idx.clone(), vertices).ok())
        .collect();
    let mut out = Vec::new();
    for i in 0..built.len() {
        for j in i + 1..built.len() {
            if let (Some(a), Some(b)) = (&built[i], &built[j]) {
                if boxes_touch(&a.bounds, &b.bounds) && share_edge(a, b) {
                    out.push((i, j));
                }
            }
        }
    }
    out
}
