//! Cell-grid builder shared by the built-in worlds.

use std::collections::HashMap;

use super::{BoxRegion, SeededBug};
use crate::environment::physics::Heightfield;
use crate::geometry::{Aabb, Position};
use crate::navmesh::{shared_edge_adjacency, NavMesh};

/// Half-open cell rectangle `[x0, x1) x [y0, y1)` in world cell coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) struct Cells {
    pub x0: i64,
    pub y0: i64,
    pub x1: i64,
    pub y1: i64,
}

impl Cells {
    pub fn new(x0: i64, y0: i64, x1: i64, y1: i64) -> Self {
        debug_assert!(x0 < x1 && y0 < y1);
        Self { x0, y0, x1, y1 }
    }

    pub fn sized(x0: i64, y0: i64, w: i64, h: i64) -> Self {
        Self::new(x0, y0, x0 + w, y0 + h)
    }

    pub fn iter(self) -> impl Iterator<Item = (i64, i64)> {
        (self.y0..self.y1).flat_map(move |y| (self.x0..self.x1).map(move |x| (x, y)))
    }

    pub fn footprint(self, z0: f64, z1: f64) -> Aabb {
        Aabb::new(
            Position::new(self.x0 as f64, self.y0 as f64, z0),
            Position::new(self.x1 as f64, self.y1 as f64, z1),
        )
    }
}

/// Nav-mesh clearance from walls, drops and holes.
pub(crate) const AGENT_RADIUS: f64 = 0.5;

pub(crate) struct GridBuilder {
    pub field: Heightfield,
    /// Cells the level designer intends to be walkable; becomes the nav-mesh.
    walkable: Vec<bool>,
    pub walls: Vec<BoxRegion>,
    pub bugs: Vec<SeededBug>,
}

impl GridBuilder {
    pub fn new(origin_x: i64, origin_y: i64, cols: usize, rows: usize, ground: f64) -> Self {
        Self {
            field: Heightfield::new(origin_x, origin_y, cols, rows, ground),
            walkable: vec![false; cols * rows],
            walls: Vec::new(),
            bugs: Vec::new(),
        }
    }

    fn index(&self, x: i64, y: i64) -> Option<usize> {
        let c = x - self.field.origin_x;
        let r = y - self.field.origin_y;
        if c < 0 || r < 0 || c >= self.field.cols as i64 || r >= self.field.rows as i64 {
            None
        } else {
            Some(r as usize * self.field.cols + c as usize)
        }
    }

    /// Sets ground height and marks the cells as intended floor.
    pub fn floor(&mut self, cells: Cells, h: f64) {
        for (x, y) in cells.iter() {
            self.field.set(x, y, h);
            if let Some(i) = self.index(x, y) {
                self.walkable[i] = true;
            }
        }
    }

    /// A solid box: raises the ground to its top and removes it from the floor.
    pub fn solid(&mut self, label: &str, cells: Cells, top: f64) {
        let base = cells
            .iter()
            .map(|(x, y)| self.field.cell_height(x, y))
            .filter(|h| h.is_finite())
            .fold(f64::INFINITY, f64::min);
        for (x, y) in cells.iter() {
            self.field.set(x, y, top);
            if let Some(i) = self.index(x, y) {
                self.walkable[i] = false;
            }
        }
        self.walls.push(BoxRegion {
            label: label.to_string(),
            bounds: cells.footprint(if base.is_finite() { base } else { 0.0 }, top),
            solid: true,
        });
    }

    /// A box that is drawn but has no collision. The cells leave the floor.
    pub fn decorative(&mut self, label: &str, cells: Cells, bottom: f64, top: f64) {
        for (x, y) in cells.iter() {
            if let Some(i) = self.index(x, y) {
                self.walkable[i] = false;
            }
        }
        self.walls.push(BoxRegion {
            label: label.to_string(),
            bounds: cells.footprint(bottom, top),
            solid: false,
        });
    }

    pub fn hole(&mut self, cells: Cells) {
        for (x, y) in cells.iter() {
            self.field.set(x, y, f64::NEG_INFINITY);
            if let Some(i) = self.index(x, y) {
                self.walkable[i] = false;
            }
        }
    }

    pub fn bug(&mut self, label: &str, region: Aabb) {
        self.bugs.push(SeededBug {
            label: label.to_string(),
            region,
        });
    }

    /// Walkable cells, eroded by [`AGENT_RADIUS`] away from anything that is
    /// not walkable, as a mesh of equal-height rectangles on a half-metre
    /// grid. Greedy decomposition, scanning rows from the south.
    pub fn navmesh(&self) -> NavMesh {
        let cols = self.field.cols as i64;
        let rows = self.field.rows as i64;
        let (sub_cols, sub_rows) = (2 * cols, 2 * rows);
        let walkable = |c: i64, r: i64| c >= 0 && r >= 0 && c < cols && r < rows && self.walkable[(r * cols + c) as usize];
        let reach = (AGENT_RADIUS * 2.0).round() as i64;
        let open: Vec<bool> = (0..sub_rows)
            .flat_map(|sr| (0..sub_cols).map(move |sc| (sc, sr)))
            .map(|(sc, sr)| {
                (-reach..=reach).all(|dy| (-reach..=reach).all(|dx| walkable((sc + dx).div_euclid(2), (sr + dy).div_euclid(2))))
            })
            .collect();
        let height = |sc: i64, sr: i64| self.field.heights[((sr / 2) * cols + sc / 2) as usize];
        let (sub_cols, sub_rows) = (sub_cols as usize, sub_rows as usize);
        let mut used = vec![false; sub_cols * sub_rows];
        let mut vertices: Vec<Position> = Vec::new();
        let mut vertex_ids: HashMap<(i64, i64, u64), usize> = HashMap::new();
        let mut polygons: Vec<Vec<usize>> = Vec::new();

        let free = |c: usize, r: usize, used: &[bool], h: f64| {
            let i = r * sub_cols + c;
            open[i] && !used[i] && height(c as i64, r as i64) == h
        };
        for r in 0..sub_rows {
            for c in 0..sub_cols {
                let i = r * sub_cols + c;
                if !open[i] || used[i] {
                    continue;
                }
                let h = height(c as i64, r as i64);
                let mut c1 = c + 1;
                while c1 < sub_cols && free(c1, r, &used, h) {
                    c1 += 1;
                }
                let mut r1 = r + 1;
                while r1 < sub_rows && (c..c1).all(|cc| free(cc, r1, &used, h)) {
                    r1 += 1;
                }
                for rr in r..r1 {
                    used[rr * sub_cols + c..rr * sub_cols + c1].fill(true);
                }
                // Corners in half-metre units.
                let (ox, oy) = (2 * self.field.origin_x, 2 * self.field.origin_y);
                let corners = [
                    (ox + c as i64, oy + r as i64),
                    (ox + c1 as i64, oy + r as i64),
                    (ox + c1 as i64, oy + r1 as i64),
                    (ox + c as i64, oy + r1 as i64),
                ];
                let poly = corners
                    .iter()
                    .map(|&(x, y)| {
                        *vertex_ids.entry((x, y, h.to_bits())).or_insert_with(|| {
                            vertices.push(Position::new(x as f64 * 0.5, y as f64 * 0.5, h));
                            vertices.len() - 1
                        })
                    })
                    .collect();
                polygons.push(poly);
            }
        }
        let adjacency = shared_edge_adjacency(&polygons, &vertices);
        NavMesh::new(vertices, polygons, adjacency).expect("grid rectangles form a valid mesh")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decomposes_floor_with_obstacle() {
        let mut g = GridBuilder::new(0, 0, 10, 10, 0.0);
        g.floor(Cells::new(0, 0, 10, 10), 0.0);
        g.solid("pillar", Cells::new(4, 4, 6, 6), 3.0);
        let mesh = g.navmesh();
        // 10x10 floor shrunk by 0.5 at the grid edge, minus a 3x3 hole
        // around the 2x2 pillar.
        assert!((mesh.surface_area() - (81.0 - 9.0)).abs() < 1e-9);
        assert!((mesh.distance_to(&Position::new(5.0, 5.0, 0.0)).unwrap() - 1.5).abs() < 1e-9);
        assert_eq!(mesh.distance_to(&Position::new(1.0, 1.0, 0.0)).unwrap(), 0.0);
        assert!((mesh.distance_to(&Position::new(0.0, 5.0, 0.0)).unwrap() - AGENT_RADIUS).abs() < 1e-9);
        assert!(!mesh.adjacency().is_empty());
        assert_eq!(g.field.ground(5.5, 5.5), 3.0);
        assert_eq!(g.walls.len(), 1);
    }
}
