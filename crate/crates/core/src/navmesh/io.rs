//! Line-oriented nav-mesh text format:
//!
//! ```text
//! # comment
//! v x y z          vertex in meters
//! p i j k ...      convex polygon, zero-based vertex indices
//! a m n            optional adjacency between polygons m and n
//! ```

use std::fmt::Write as _;

use super::{NavMesh, NavMeshError};
use crate::geometry::Position;

fn parse_err(line: usize, message: impl Into<String>) -> NavMeshError {
    NavMeshError::Parse {
        line,
        message: message.into(),
    }
}

pub fn parse_navmesh(text: &str) -> Result<NavMesh, NavMeshError> {
    let mut vertices = Vec::new();
    let mut polygons = Vec::new();
    let mut adjacency = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line_no = n + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut fields = line.split_whitespace();
        let tag = fields.next().unwrap_or_default();
        let rest: Vec<&str> = fields.collect();
        match tag {
            "v" => {
                if rest.len() != 3 {
                    return Err(parse_err(line_no, "vertex needs exactly 3 coordinates"));
                }
                let c: Vec<f64> = rest
                    .iter()
                    .map(|s| s.parse::<f64>().map_err(|e| parse_err(line_no, format!("bad coordinate {s:?}: {e}"))))
                    .collect::<Result<_, _>>()?;
                vertices.push(Position::new(c[0], c[1], c[2]));
            }
            "p" => {
                let idx: Vec<usize> = rest
                    .iter()
                    .map(|s| s.parse::<usize>().map_err(|e| parse_err(line_no, format!("bad vertex index {s:?}: {e}"))))
                    .collect::<Result<_, _>>()?;
                polygons.push(idx);
            }
            "a" => {
                if rest.len() != 2 {
                    return Err(parse_err(line_no, "adjacency needs exactly 2 polygon indices"));
                }
                let m = rest[0].parse::<usize>().map_err(|e| parse_err(line_no, e.to_string()))?;
                let k = rest[1].parse::<usize>().map_err(|e| parse_err(line_no, e.to_string()))?;
                adjacency.push((m, k));
            }
            other => return Err(parse_err(line_no, format!("unknown record {other:?}"))),
        }
    }
    NavMesh::new(vertices, polygons, adjacency)
}

pub fn write_navmesh(mesh: &NavMesh) -> String {
    let mut out = String::new();
    out.push_str("# reachprobe nav-mesh\n");
    let _ = writeln!(
        out,
        "# {} vertices, {} polygons, {} adjacencies",
        mesh.vertices().len(),
        mesh.polygons().len(),
        mesh.adjacency().len()
    );
    for v in mesh.vertices() {
        let _ = writeln!(out, "v {:.6} {:.6} {:.6}", v.x, v.y, v.z);
    }
    for p in mesh.polygons() {
        out.push('p');
        for i in p.indices() {
            let _ = write!(out, " {i}");
        }
        out.push('\n');
    }
    for (m, n) in mesh.adjacency() {
        let _ = writeln!(out, "a {m} {n}");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = "\
# two triangles forming a unit square
v 0 0 0
v 1 0 0   # trailing comment
v 1 1 0
v 0 1 0

p 0 1 2
p 0 2 3
a 0 1
";

    #[test]
    fn parses_and_round_trips() {
        let mesh = parse_navmesh(SAMPLE).unwrap();
        assert_eq!(mesh.vertices().len(), 4);
        assert_eq!(mesh.polygons().len(), 2);
        assert_eq!(mesh.adjacency(), &[(0, 1)]);
        let text = write_navmesh(&mesh);
        let again = parse_navmesh(&text).unwrap();
        assert_eq!(write_navmesh(&again), text);
    }

    #[test]
    fn reports_line_numbers() {
        let err = parse_navmesh("v 0 0 0\nv 1 x 0\n").unwrap_err();
        assert_eq!(err, NavMeshError::Parse { line: 2, message: "bad coordinate \"x\": invalid float literal".into() });
        assert!(matches!(parse_navmesh("q 1 2\n"), Err(NavMeshError::Parse { line: 1, .. })));
        assert!(matches!(parse_navmesh("v 0 0\n"), Err(NavMeshError::Parse { line: 1, .. })));
        assert!(matches!(
            parse_navmesh("v 0 0 0\nv 1 0 0\nv 0 1 0\np 0 1 7\n"),
            Err(NavMeshError::BadVertexIndex { .. })
        ));
    }
}
