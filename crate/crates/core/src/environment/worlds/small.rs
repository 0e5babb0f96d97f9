use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::layout::{Cells, GridBuilder};
use super::{WorldName, WorldSpec};
use crate::geometry::{Aabb, Position};

pub(crate) const SIZE: i64 = 50;
pub(crate) const WALL_HEIGHT: f64 = 2.0;
pub(crate) const LOWERED_WALL_HEIGHT: f64 = 1.5;
/// Posts either side of the lowered stretch; out of reach from its top, so
/// the rest of the wall cannot be walked.
pub(crate) const GATEPOST_HEIGHT: f64 = 3.5;
/// x-range of the lowered stretch of the south wall.
pub(crate) const LOWERED: (i64, i64) = (30, 33);
/// Width of the corridor running round the arena and across its middle.
const CORRIDOR: i64 = 3;
/// South edge of the cross corridor; the spawn sits in it.
const BAR: i64 = 24;
/// The hole sits at the back of an alcove cut into the north block.
const ALCOVE: i64 = 4;
const HOLE: i64 = 2;
const TALLEST_BLOCK: u8 = 5;

/// Footprint of the collision-less box over the floor hole.
pub(crate) fn hidden_hole(seed: u64) -> Cells {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x401e);
    let x = rng.gen_range(6..=14) + (ALCOVE - HOLE) / 2;
    let y = BAR + CORRIDOR + ALCOVE - HOLE;
    Cells::sized(x, y, HOLE, HOLE)
}

pub(super) fn build(seed: u64) -> WorldSpec {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5a11);
    let mut g = GridBuilder::new(-1, -1, (SIZE + 2) as usize, (SIZE + 2) as usize, 0.0);
    g.floor(Cells::new(0, 0, SIZE, SIZE), 0.0);

    g.solid("south wall west", Cells::new(-1, -1, LOWERED.0 - 1, 0), WALL_HEIGHT);
    g.solid("south gatepost west", Cells::sized(LOWERED.0 - 1, -1, 1, 1), GATEPOST_HEIGHT);
    g.solid("south wall lowered", Cells::new(LOWERED.0, -1, LOWERED.1, 0), LOWERED_WALL_HEIGHT);
    g.solid("south gatepost east", Cells::sized(LOWERED.1, -1, 1, 1), GATEPOST_HEIGHT);
    g.solid("south wall east", Cells::new(LOWERED.1 + 1, -1, SIZE + 1, 0), WALL_HEIGHT);
    g.solid("north wall", Cells::new(-1, SIZE, SIZE + 1, SIZE + 1), WALL_HEIGHT);
    g.solid("west wall", Cells::new(-1, 0, 0, SIZE), WALL_HEIGHT);
    g.solid("east wall", Cells::new(SIZE, 0, SIZE + 1, SIZE), WALL_HEIGHT);

    // Two blocks leave a ring corridor along the walls and a bar across the
    // middle.
    let (lo, hi) = (CORRIDOR, SIZE - CORRIDOR);
    let south_height = f64::from(rng.gen_range(3..=TALLEST_BLOCK));
    let north_height = f64::from(rng.gen_range(3..=TALLEST_BLOCK));
    g.solid("south block", Cells::new(lo, lo, hi, BAR), south_height);
    g.solid("north block", Cells::new(lo, BAR + CORRIDOR, hi, hi), north_height);

    let hole = hidden_hole(seed);
    let alcove = Cells::sized(hole.x0 - (ALCOVE - HOLE) / 2, BAR + CORRIDOR, ALCOVE, ALCOVE);
    g.floor(alcove, 0.0);
    g.decorative("hidden hole cover", hole, 0.0, north_height);
    g.hole(hole);

    g.bug(
        "wall escape",
        Aabb::new(
            Position::new(-1.0, -40.0, -60.0),
            Position::new(SIZE as f64 + 1.0, -1.0, -4.0),
        ),
    );
    g.bug("out-of-bounds fall", hole.footprint(-60.0, -4.0));

    let navmesh = g.navmesh();
    WorldSpec {
        name: WorldName::SmallAnalog,
        seed,
        bounds: Aabb::new(
            Position::new(-1.0, -1.0, 0.0),
            Position::new(SIZE as f64 + 1.0, SIZE as f64 + 1.0, f64::from(TALLEST_BLOCK)),
        ),
        spawn: Position::new(25.5, 25.5, 0.0),
        heightfield: g.field,
        walls: g.walls,
        navmesh,
        seeded_bugs: g.bugs,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bug_regions_are_far_from_the_mesh() {
        for seed in 0..4 {
            let w = build(seed);
            for bug in &w.seeded_bugs {
                // Dense sample of the region box, including its faces.
                let r = bug.region;
                let n = 24;
                for i in 0..=n {
                    for j in 0..=n {
                        for k in 0..=n {
                            let p = Position::new(
                                r.min.x + (r.max.x - r.min.x) * i as f64 / n as f64,
                                r.min.y + (r.max.y - r.min.y) * j as f64 / n as f64,
                                r.min.z + (r.max.z - r.min.z) * k as f64 / n as f64,
                            );
                            let d = w.navmesh.distance_to(&p).unwrap();
                            assert!(d > 3.0, "{} reaches the mesh at {p} ({d})", bug.label);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn hole_sits_behind_open_floor() {
        for seed in 0..32 {
            let w = build(seed);
            assert_eq!(w.heightfield.ground(w.spawn.x, w.spawn.y), 0.0);
            let hole = hidden_hole(seed);
            for (x, y) in hole.iter() {
                assert_eq!(w.heightfield.cell_height(x, y), f64::NEG_INFINITY);
                // The alcove floor in front of it is open.
                assert_eq!(w.heightfield.cell_height(x, y - HOLE), 0.0);
            }
            w.validate().unwrap();
        }
    }

    #[test]
    fn mesh_follows_the_corridors() {
        let w = build(0);
        let area = w.navmesh.surface_area();
        assert!((440.0..500.0).contains(&area), "{area}");
        // Corridor centre lines are on the mesh; block interiors are not.
        for (x, y) in [(1.5, 10.0), (48.5, 30.0), (25.0, 1.5), (25.0, 48.5), (40.0, 25.5)] {
            assert!(w.navmesh.distance_to(&Position::new(x, y, 0.0)).unwrap() < 1e-9, "({x}, {y})");
        }
        assert!(w.navmesh.distance_to(&Position::new(40.0, 12.0, 0.0)).unwrap() > 5.0);
    }
}
