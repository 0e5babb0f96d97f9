use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::layout::{Cells, GridBuilder};
use super::{WorldName, WorldSpec};
use crate::geometry::{Aabb, Position};

pub(crate) const SIZE: i64 = 300;
const BLOCKS: i64 = 2;
const PITCH: i64 = 150;
const STREET: i64 = 10;
const BLOCK: i64 = PITCH - STREET;
const WALL_HEIGHT: f64 = 2.0;
const LOWERED_WALL_HEIGHT: f64 = 1.5;
const GATEPOST_HEIGHT: f64 = 3.5;
const ESCAPE_LEN: i64 = 3;
/// Centre of the middle street crossing.
const SPAWN: f64 = (BLOCKS / 2 * PITCH) as f64 + STREET as f64 / 2.0;

pub(super) fn build(seed: u64) -> WorldSpec {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x1a76e);
    let mut g = GridBuilder::new(-1, -1, (SIZE + 2) as usize, (SIZE + 2) as usize, 0.0);
    g.floor(Cells::new(0, 0, SIZE, SIZE), 0.0);

    // Escape routes: one lowered stretch on the west wall, one on the south.
    let west_at = rng.gen_range(20..SIZE - 20);
    let south_at = rng.gen_range(20..SIZE - 20);
    // Gateposts keep the lowered stretches from connecting to the wall tops.
    let end = west_at + ESCAPE_LEN;
    g.solid("west wall a", Cells::new(-1, 0, 0, west_at - 1), WALL_HEIGHT);
    g.solid("west gatepost a", Cells::sized(-1, west_at - 1, 1, 1), GATEPOST_HEIGHT);
    g.solid("west wall lowered", Cells::new(-1, west_at, 0, end), LOWERED_WALL_HEIGHT);
    g.solid("west gatepost b", Cells::sized(-1, end, 1, 1), GATEPOST_HEIGHT);
    g.solid("west wall b", Cells::new(-1, end + 1, 0, SIZE), WALL_HEIGHT);
    let end = south_at + ESCAPE_LEN;
    g.solid("south wall a", Cells::new(-1, -1, south_at - 1, 0), WALL_HEIGHT);
    g.solid("south gatepost a", Cells::sized(south_at - 1, -1, 1, 1), GATEPOST_HEIGHT);
    g.solid("south wall lowered", Cells::new(south_at, -1, end, 0), LOWERED_WALL_HEIGHT);
    g.solid("south gatepost b", Cells::sized(end, -1, 1, 1), GATEPOST_HEIGHT);
    g.solid("south wall b", Cells::new(end + 1, -1, SIZE + 1, 0), WALL_HEIGHT);
    g.solid("north wall", Cells::new(-1, SIZE, SIZE + 1, SIZE + 1), WALL_HEIGHT);
    g.solid("east wall", Cells::new(SIZE, 0, SIZE + 1, SIZE), WALL_HEIGHT);

    for bx in 0..BLOCKS {
        for by in 0..BLOCKS {
            let cells = Cells::sized(bx * PITCH + STREET, by * PITCH + STREET, BLOCK, BLOCK);
            let height = f64::from(rng.gen_range(6..=12));
            g.solid(&format!("block {bx},{by}"), cells, height);
        }
    }

    g.bug(
        "west escape",
        Aabb::new(
            Position::new(-60.0, west_at as f64 - 30.0, -60.0),
            Position::new(-1.0, (west_at + ESCAPE_LEN) as f64 + 30.0, -4.0),
        ),
    );
    g.bug(
        "south escape",
        Aabb::new(
            Position::new(south_at as f64 - 30.0, -60.0, -60.0),
            Position::new((south_at + ESCAPE_LEN) as f64 + 30.0, -1.0, -4.0),
        ),
    );

    let navmesh = g.navmesh();
    WorldSpec {
        name: WorldName::LargeAnalog,
        seed,
        bounds: Aabb::new(
            Position::new(-1.0, -1.0, 0.0),
            Position::new(SIZE as f64 + 1.0, SIZE as f64 + 1.0, 12.0),
        ),
        spawn: Position::new(SPAWN, SPAWN, 0.0),
        heightfield: g.field,
        walls: g.walls,
        navmesh,
        seeded_bugs: g.bugs,
    }
}
