//! Fixed-tick kinematics.
//!
//! Per tick, in this order:
//!
//! 1. A frozen agent (below `bounds.min.z - 50`) does nothing.
//! 2. `yaw = (yaw + turn * TURN_RATE * DT) mod 2π`.
//! 3. Planar velocity is `SPEED` along the normalized `(forward, strafe)`
//!    direction rotated by yaw (forward is +x at yaw 0, strafe is +y).
//!    An airborne agent outside the bounds footprint has no control and
//!    just falls: its planar velocity is zero.
//! 4. A grounded agent pressing jump gets `vz = JUMP_SPEED` and leaves the
//!    ground.
//! 5. Horizontal move to `(x + vx*DT, y + vy*DT)`; if blocked, the x-only
//!    then y-only moves are tried. A cell is enterable when its ground is at
//!    most `STEP_UP` above the agent's feet.
//! 6. A grounded agent snaps to the new ground if it is within `STEP_UP`
//!    below, otherwise it starts to fall with `vz = 0`.
//! 7. An airborne agent integrates `z += vz*DT - 0.5*G*DT*DT`,
//!    `vz -= G*DT`, and lands when `z` reaches the ground.
//!
//! Every expression is evaluated exactly as written (no fused multiply-add),
//! so trajectories are bit-identical on any platform whose `sin`/`cos`
//! agree.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use super::{Action, Observation};
use crate::geometry::{Aabb, Position};

pub const DT: f64 = 0.1;
pub const SPEED: f64 = 4.0;
pub const JUMP_SPEED: f64 = 5.0;
pub const GRAVITY: f64 = 9.8;
pub const STEP_UP: f64 = 0.5;
pub const TURN_RATE: f64 = PI / 2.0;
/// Agents this far below the world's lowest point stop simulating.
pub const FREEZE_DEPTH: f64 = 50.0;

/// Where simulation stops steering and where it stops altogether.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Limits {
    pub min_x: f64,
    pub min_y: f64,
    pub max_x: f64,
    pub max_y: f64,
    pub freeze_z: f64,
}

impl Limits {
    pub fn from_bounds(bounds: &Aabb) -> Self {
        Self {
            min_x: bounds.min.x,
            min_y: bounds.min.y,
            max_x: bounds.max.x,
            max_y: bounds.max.y,
            freeze_z: bounds.min.z - FREEZE_DEPTH,
        }
    }

    fn inside(&self, x: f64, y: f64) -> bool {
        x >= self.min_x && x <= self.max_x && y >= self.min_y && y <= self.max_y
    }
}

/// Ground heights on a 1 m grid. `-inf` marks a hole; everything outside
/// the grid is also a hole.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Heightfield {
    /// World coordinates of the lower-left corner of cell (0, 0).
    pub origin_x: i64,
    pub origin_y: i64,
    pub cols: usize,
    pub rows: usize,
    /// Row-major, row 0 at `origin_y`.
    pub heights: Vec<f64>,
}

impl Heightfield {
    pub fn new(origin_x: i64, origin_y: i64, cols: usize, rows: usize, fill: f64) -> Self {
        Self {
            origin_x,
            origin_y,
            cols,
            rows,
            heights: vec![fill; cols * rows],
        }
    }

    pub fn cell_of(&self, x: f64, y: f64) -> (i64, i64) {
        (x.floor() as i64, y.floor() as i64)
    }

    fn index(&self, cx: i64, cy: i64) -> Option<usize> {
        let col = cx - self.origin_x;
        let row = cy - self.origin_y;
        if col < 0 || row < 0 || col >= self.cols as i64 || row >= self.rows as i64 {
            None
        } else {
            Some(row as usize * self.cols + col as usize)
        }
    }

    pub fn cell_height(&self, cx: i64, cy: i64) -> f64 {
        self.index(cx, cy).map_or(f64::NEG_INFINITY, |i| self.heights[i])
    }

    pub fn set(&mut self, cx: i64, cy: i64, h: f64) {
        if let Some(i) = self.index(cx, cy) {
            self.heights[i] = h;
        }
    }

    pub fn ground(&self, x: f64, y: f64) -> f64 {
        let (cx, cy) = self.cell_of(x, y);
        self.cell_height(cx, cy)
    }

    /// Whether an agent with feet at `z` may move from `(x, y)` to `(nx, ny)`.
    fn passable(&self, x: f64, y: f64, nx: f64, ny: f64, z: f64) -> bool {
        let limit = z + STEP_UP;
        let (cx, cy) = self.cell_of(x, y);
        let (ncx, ncy) = self.cell_of(nx, ny);
        if self.cell_height(ncx, ncy) > limit {
            return false;
        }
        // No cutting across a blocked corner.
        if ncx != cx && ncy != cy {
            return self.cell_height(ncx, cy) <= limit && self.cell_height(cx, ncy) <= limit;
        }
        true
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AgentState {
    pub position: Position,
    pub velocity: Position,
    pub yaw: f64,
    pub grounded: bool,
}

impl AgentState {
    pub fn at_rest(position: Position) -> Self {
        Self {
            position,
            velocity: Position::default(),
            yaw: 0.0,
            grounded: true,
        }
    }

    pub fn observation(&self) -> Observation {
        Observation {
            position: self.position,
            yaw: self.yaw,
            grounded: self.grounded,
        }
    }

    /// Advances one tick. The action must already be validated.
    pub fn tick(&mut self, action: Action, field: &Heightfield, limits: &Limits) {
        if self.position.z < limits.freeze_z {
            return;
        }
        self.yaw = wrap_angle(self.yaw + f64::from(action.turn) * TURN_RATE * DT);

        let f = f64::from(action.forward);
        let s = f64::from(action.strafe);
        let steering = self.grounded || limits.inside(self.position.x, self.position.y);
        if !steering || (f == 0.0 && s == 0.0) {
            self.velocity.x = 0.0;
            self.velocity.y = 0.0;
        } else {
            let inv = 1.0 / (f * f + s * s).sqrt();
            let (sin, cos) = self.yaw.sin_cos();
            self.velocity.x = SPEED * ((f * cos - s * sin) * inv);
            self.velocity.y = SPEED * ((f * sin + s * cos) * inv);
        }

        if self.grounded && action.jump == 1 {
            self.velocity.z = JUMP_SPEED;
            self.grounded = false;
        }

        let Position { x, y, z } = self.position;
        let nx = x + self.velocity.x * DT;
        let ny = y + self.velocity.y * DT;
        if nx != x || ny != y {
            for (tx, ty) in [(nx, ny), (nx, y), (x, ny)] {
                if (tx != x || ty != y) && field.passable(x, y, tx, ty, z) {
                    self.position.x = tx;
                    self.position.y = ty;
                    break;
                }
            }
        }

        let ground = field.ground(self.position.x, self.position.y);
        if self.grounded {
            if ground >= self.position.z - STEP_UP {
                self.position.z = ground;
            } else {
                self.grounded = false;
                self.velocity.z = 0.0;
            }
        }
        if !self.grounded {
            let vz = self.velocity.z;
            let nz = self.position.z + vz * DT - 0.5 * GRAVITY * DT * DT;
            self.velocity.z = vz - GRAVITY * DT;
            if nz <= ground {
                self.position.z = ground;
                self.velocity.z = 0.0;
                self.grounded = true;
            } else {
                self.position.z = nz;
            }
        }
    }
}

pub fn wrap_angle(a: f64) -> f64 {
    let w = a.rem_euclid(TAU);
    if w >= TAU {
        0.0
    } else {
        w
    }
}
