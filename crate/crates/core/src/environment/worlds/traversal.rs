use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::layout::{Cells, GridBuilder};
use super::{WorldName, WorldSpec};
use crate::geometry::{Aabb, Position};

pub(crate) const SIZE: i64 = 150;
const RAMP_WIDTH: i64 = 3;
const RAMP_CELLS: i64 = 8;

/// Ground level; reachable only by falling, and not part of the mesh.
fn ground(g: &mut GridBuilder) {
    for x in 0..SIZE {
        for y in 0..SIZE {
            g.field.set(x, y, 0.0);
        }
    }
}

pub(super) fn build(seed: u64) -> WorldSpec {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x7a3e);
    let mut g = GridBuilder::new(0, 0, SIZE as usize, SIZE as usize, f64::NEG_INFINITY);
    ground(&mut g);

    // Storey 1 at 4 m, split by a 2 m jump gap.
    g.floor(Cells::new(10, 10, 60, 60), 4.0);
    g.floor(Cells::new(10, 62, 60, 110), 4.0);

    // Ramp east to 8 m, then a bridge to storey 2.
    let r1 = 20 + rng.gen_range(0..=20);
    for k in 0..RAMP_CELLS {
        g.floor(Cells::sized(60 + k, r1, 1, RAMP_WIDTH), 4.5 + 0.5 * k as f64);
    }
    g.floor(Cells::new(60 + RAMP_CELLS, r1, 90, r1 + RAMP_WIDTH), 8.0);
    g.floor(Cells::new(90, 10, 140, 60), 8.0);

    // Ramp north to 12 m, a bridge with a 2 m gap, then storey 3.
    let r2 = 100 + rng.gen_range(0..=30);
    for k in 0..RAMP_CELLS {
        g.floor(Cells::sized(r2, 60 + k, RAMP_WIDTH, 1), 8.5 + 0.5 * k as f64);
    }
    g.floor(Cells::new(r2, 60 + RAMP_CELLS, r2 + RAMP_WIDTH, 80), 12.0);
    g.floor(Cells::new(r2, 82, r2 + RAMP_WIDTH, 90), 12.0);
    g.floor(Cells::new(90, 90, 140, 140), 12.0);

    let edge = SIZE as f64;
    g.bug(
        "ground fall",
        Aabb::new(Position::new(0.0, 0.0, -0.5), Position::new(edge, edge, 0.5)),
    );
    for (label, lo, hi) in [
        ("off-map fall west", (-60.0, -60.0), (0.0, edge + 60.0)),
        ("off-map fall east", (edge, -60.0), (edge + 60.0, edge + 60.0)),
        ("off-map fall south", (0.0, -60.0), (edge, 0.0)),
        ("off-map fall north", (0.0, edge), (edge, edge + 60.0)),
    ] {
        g.bug(
            label,
            Aabb::new(Position::new(lo.0, lo.1, -60.0), Position::new(hi.0, hi.1, -4.0)),
        );
    }

    let navmesh = g.navmesh();
    WorldSpec {
        name: WorldName::TraversalAnalog,
        seed,
        bounds: Aabb::new(Position::new(0.0, 0.0, 0.0), Position::new(edge, edge, 12.0)),
        spawn: Position::new(35.5, 35.5, 4.0),
        heightfield: g.field,
        walls: g.walls,
        navmesh,
        seeded_bugs: g.bugs,
    }
}
