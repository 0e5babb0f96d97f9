//! Plain-text world export.
//!
//! ```text
//! world small_analog
//! seed 0
//! spawn 25.500000 25.500000 0.000000
//! bounds -1.000000 -1.000000 0.000000 51.000000 51.000000 3.000000
//! grid -1 -1 52 52
//! row 2 2 2 ... hole ...
//! box solid x0 y0 z0 x1 y1 z1 label words
//! bug x0 y0 z0 x1 y1 z1 label words
//! ```
//!
//! Rows run south to north. Heights use the shortest exact decimal form so
//! the grid round-trips; everything else is 6-decimal fixed. The nav-mesh
//! travels in its own file, see [`crate::navmesh::write_navmesh`].

use std::fmt::Write as _;

use super::physics::Heightfield;
use super::worlds::{BoxRegion, SeededBug, WorldName, WorldSpec};
use super::EnvError;
use crate::geometry::{Aabb, Position};
use crate::navmesh::NavMesh;

pub fn write_world(spec: &WorldSpec) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "world {}", spec.name);
    let _ = writeln!(out, "seed {}", spec.seed);
    let _ = writeln!(out, "spawn {}", fixed(&spec.spawn));
    let _ = writeln!(out, "bounds {}", aabb(&spec.bounds));
    let f = &spec.heightfield;
    let _ = writeln!(out, "grid {} {} {} {}", f.origin_x, f.origin_y, f.cols, f.rows);
    for row in f.heights.chunks(f.cols) {
        out.push_str("row");
        for h in row {
            if *h == f64::NEG_INFINITY {
                out.push_str(" hole");
            } else {
                let _ = write!(out, " {h}");
            }
        }
        out.push('\n');
    }
    for w in &spec.walls {
        let kind = if w.solid { "solid" } else { "decorative" };
        let _ = writeln!(out, "box {kind} {} {}", aabb(&w.bounds), w.label);
    }
    for b in &spec.seeded_bugs {
        let _ = writeln!(out, "bug {} {}", aabb(&b.region), b.label);
    }
    out
}

/// Rebuilds a world from its export and its nav-mesh.
pub fn parse_world(text: &str, navmesh: NavMesh) -> Result<WorldSpec, EnvError> {
    let mut name = None;
    let mut seed = None;
    let mut spawn = None;
    let mut bounds = None;
    let mut field: Option<Heightfield> = None;
    let mut rows_read = 0;
    let mut walls = Vec::new();
    let mut bugs = Vec::new();

    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let err = |message: String| EnvError::Parse { line, message };
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let mut words = body.split_whitespace();
        let tag = words.next().unwrap_or_default();
        let rest: Vec<&str> = words.collect();
        match tag {
            "world" => {
                let w = rest.first().ok_or_else(|| err("missing world name".into()))?;
                name = Some(w.parse::<WorldName>().map_err(|e| err(e.to_string()))?);
            }
            "seed" => {
                let s = rest.first().ok_or_else(|| err("missing seed".into()))?;
                seed = Some(s.parse::<u64>().map_err(|e| err(e.to_string()))?);
            }
            "spawn" => spawn = Some(Position::from_array(numbers::<3>(&rest).map_err(err)?)),
            "bounds" => bounds = Some(parse_aabb(&rest).map_err(err)?),
            "grid" => {
                if rest.len() != 4 {
                    return Err(err("grid needs origin_x origin_y cols rows".into()));
                }
                let int = |s: &str| s.parse::<i64>().map_err(|e| err(e.to_string()));
                let (ox, oy, cols, rows) = (int(rest[0])?, int(rest[1])?, int(rest[2])?, int(rest[3])?);
                if cols <= 0 || rows <= 0 {
                    return Err(err("empty grid".into()));
                }
                field = Some(Heightfield::new(ox, oy, cols as usize, rows as usize, 0.0));
            }
            "row" => {
                let f = field.as_mut().ok_or_else(|| err("row before grid".into()))?;
                if rest.len() != f.cols {
                    return Err(err(format!("expected {} heights, got {}", f.cols, rest.len())));
                }
                if rows_read >= f.rows {
                    return Err(err("too many rows".into()));
                }
                for (c, word) in rest.iter().enumerate() {
                    let h = if *word == "hole" {
                        f64::NEG_INFINITY
                    } else {
                        word.parse::<f64>().map_err(|e| err(e.to_string()))?
                    };
                    f.heights[rows_read * f.cols + c] = h;
                }
                rows_read += 1;
            }
            "box" => {
                let solid = match rest.first() {
                    Some(&"solid") => true,
                    Some(&"decorative") => false,
                    _ => return Err(err("box kind must be solid or decorative".into())),
                };
                if rest.len() < 8 {
                    return Err(err("box needs 6 coordinates and a label".into()));
                }
                walls.push(BoxRegion {
                    label: rest[7..].join(" "),
                    bounds: parse_aabb(&rest[1..7]).map_err(err)?,
                    solid,
                });
            }
            "bug" => {
                if rest.len() < 7 {
                    return Err(err("bug needs 6 coordinates and a label".into()));
                }
                bugs.push(SeededBug {
                    label: rest[6..].join(" "),
                    region: parse_aabb(&rest[..6]).map_err(err)?,
                });
            }
            other => return Err(err(format!("unknown record {other:?}"))),
        }
    }

    let missing = |what: &str| EnvError::Parse { line: 0, message: format!("missing {what}") };
    let heightfield = field.ok_or_else(|| missing("grid"))?;
    if rows_read != heightfield.rows {
        return Err(missing("grid rows"));
    }
    Ok(WorldSpec {
        name: name.ok_or_else(|| missing("world"))?,
        seed: seed.ok_or_else(|| missing("seed"))?,
        heightfield,
        walls,
        bounds: bounds.ok_or_else(|| missing("bounds"))?,
        navmesh,
        spawn: spawn.ok_or_else(|| missing("spawn"))?,
        seeded_bugs: bugs,
    })
}

fn fixed(p: &Position) -> String {
    format!("{:.6} {:.6} {:.6}", p.x, p.y, p.z)
}

fn aabb(b: &Aabb) -> String {
    format!("{} {}", fixed(&b.min), fixed(&b.max))
}

fn numbers<const N: usize>(words: &[&str]) -> Result<[f64; N], String> {
    if words.len() != N {
        return Err(format!("expected {N} numbers, got {}", words.len()));
    }
    let mut out = [0.0; N];
    for (o, w) in out.iter_mut().zip(words) {
        *o = w.parse::<f64>().map_err(|e| format!("{w:?}: {e}"))?;
    }
    Ok(out)
}

fn parse_aabb(words: &[&str]) -> Result<Aabb, String> {
    let v = numbers::<6>(words)?;
    Ok(Aabb::new(Position::new(v[0], v[1], v[2]), Position::new(v[3], v[4], v[5])))
}
