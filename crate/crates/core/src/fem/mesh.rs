use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};

pub type Point = [f64; 2];

#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryEdge {
    pub vertices: [usize; 2],
    pub tag: String,
}

/// Conforming triangulation with tagged boundary edges.
///
/// Edges are numbered in order of first appearance over the triangles; edge `e`
/// of triangle `t` is the one opposite local vertex `e`.
#[derive(Clone, Debug)]
pub struct TriMesh {
    vertices: Vec<Point>,
    triangles: Vec<[usize; 3]>,
    boundary: Vec<BoundaryEdge>,
    edges: Vec<[usize; 2]>,
    triangle_edges: Vec<[usize; 3]>,
    edge_tags: Vec<Option<usize>>,
}

fn edge_key(a: usize, b: usize) -> (usize, usize) {
    (a.min(b), a.max(b))
}

impl TriMesh {
    /// Builds and validates a mesh. Triangles with negative orientation are
    /// flipped; degenerate ones are rejected.
    pub fn new(vertices: Vec<Point>, mut triangles: Vec<[usize; 3]>, boundary: Vec<BoundaryEdge>) -> Result<Self> {
        let nv = vertices.len();
        for (t, tri) in triangles.iter_mut().enumerate() {
            if tri.iter().any(|&v| v >= nv) {
                return Err(Error::Mesh(format!("triangle {t} references a missing vertex")));
            }
            let a = signed_area(&vertices, *tri);
            let scale = diameter(&vertices, *tri).powi(2);
            if !(a.abs() > 1e-14 * scale) {
                return Err(Error::Mesh(format!("triangle {t} is degenerate (area {a:e})")));
            }
            if a < 0.0 {
                tri.swap(1, 2);
            }
        }

        let mut index: HashMap<(usize, usize), usize> = HashMap::new();
        let mut edges = Vec::new();
        let mut count = Vec::new();
        let mut triangle_edges = Vec::with_capacity(triangles.len());
        for tri in &triangles {
            let mut te = [0; 3];
            for (e, slot) in te.iter_mut().enumerate() {
                let (a, b) = (tri[(e + 1) % 3], tri[(e + 2) % 3]);
                let id = *index.entry(edge_key(a, b)).or_insert_with(|| {
                    edges.push([a, b]);
                    count.push(0);
                    edges.len() - 1
                });
                count[id] += 1;
                *slot = id;
            }
            triangle_edges.push(te);
        }
        if let Some(e) = count.iter().position(|&c| c > 2) {
            return Err(Error::Mesh(format!("edge {:?} shared by more than two triangles", edges[e])));
        }

        let mut edge_tags = vec![None; edges.len()];
        for (i, be) in boundary.iter().enumerate() {
            let [a, b] = be.vertices;
            let id = *index
                .get(&edge_key(a, b))
                .ok_or_else(|| Error::Mesh(format!("boundary edge ({a}, {b}) is not a mesh edge")))?;
            if count[id] != 1 {
                return Err(Error::Mesh(format!("tagged edge ({a}, {b}) is interior")));
            }
            if edge_tags[id].is_some() {
                return Err(Error::Mesh(format!("boundary edge ({a}, {b}) tagged twice")));
            }
            edge_tags[id] = Some(i);
        }
        if let Some(e) = (0..edges.len()).find(|&e| count[e] == 1 && edge_tags[e].is_none()) {
            return Err(Error::Mesh(format!("boundary edge {:?} has no tag", edges[e])));
        }

        Ok(TriMesh {
            vertices,
            triangles,
            boundary,
            edges,
            triangle_edges,
            edge_tags,
        })
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn boundary(&self) -> &[BoundaryEdge] {
        &self.boundary
    }

    pub fn edges(&self) -> &[[usize; 2]] {
        &self.edges
    }

    pub fn triangle_edges(&self) -> &[[usize; 3]] {
        &self.triangle_edges
    }

    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn n_triangles(&self) -> usize {
        self.triangles.len()
    }

    /// Global edge id of a boundary edge.
    pub fn boundary_edge_id(&self, i: usize) -> usize {
        self.edge_tags.iter().position(|t| *t == Some(i)).expect("validated boundary edge")
    }

    /// Boundary edges (index into `boundary()`, global edge id) carrying `tag`.
    pub fn tagged(&self, tag: &str) -> Vec<(usize, usize)> {
        let mut out: Vec<(usize, usize)> = self
            .edge_tags
            .iter()
            .enumerate()
            .filter_map(|(e, t)| t.filter(|&i| self.boundary[i].tag == tag).map(|i| (i, e)))
            .collect();
        out.sort_unstable();
        out
    }

    pub fn tags(&self) -> Vec<String> {
        let mut tags: Vec<String> = self.boundary.iter().map(|b| b.tag.clone()).collect();
        tags.sort();
        tags.dedup();
        tags
    }

    pub fn area(&self, t: usize) -> f64 {
        signed_area(&self.vertices, self.triangles[t])
    }

    pub fn edge_midpoint(&self, e: usize) -> Point {
        let [a, b] = self.edges[e];
        let (p, q) = (self.vertices[a], self.vertices[b]);
        [0.5 * (p[0] + q[0]), 0.5 * (p[1] + q[1])]
    }

    /// Triangle containing `x`, lowest index on ties; barycentric coordinates.
    pub fn locate(&self, x: Point) -> Option<(usize, [f64; 3])> {
        const TOL: f64 = 1e-12;
        self.triangles.iter().enumerate().find_map(|(t, tri)| {
            let l = barycentric(&self.vertices, *tri, x);
            l.iter().all(|&v| v >= -TOL).then_some((t, l))
        })
    }

    /// Plain-text form: header counts, then vertex, triangle and boundary lines.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# vertices triangles boundary_edges");
        let _ = writeln!(s, "{} {} {}", self.vertices.len(), self.triangles.len(), self.boundary.len());
        for v in &self.vertices {
            let _ = writeln!(s, "{:?} {:?}", v[0], v[1]);
        }
        for t in &self.triangles {
            let _ = writeln!(s, "{} {} {}", t[0], t[1], t[2]);
        }
        for b in &self.boundary {
            let _ = writeln!(s, "{} {} {}", b.vertices[0], b.vertices[1], b.tag);
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .map(|l| l.split('#').next().unwrap_or("").trim())
            .filter(|l| !l.is_empty());
        let perr = |m: String| Error::parse("mesh", m);
        let header = lines.next().ok_or_else(|| perr("empty mesh file".into()))?;
        let counts: Vec<usize> = header
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| perr(format!("bad count '{t}'"))))
            .collect::<Result<_>>()?;
        let [nv, nt, nb] = counts[..] else {
            return Err(perr("header needs three counts".into()));
        };
        let mut next = |what: &str, i: usize| lines.next().ok_or_else(|| perr(format!("missing {what} line {i}")));
        let mut vertices = Vec::with_capacity(nv);
        for i in 0..nv {
            let f: Vec<f64> = next("vertex", i)?
                .split_whitespace()
                .map(|t| t.parse().map_err(|_| perr(format!("bad coordinate '{t}'"))))
                .collect::<Result<_>>()?;
            let [x, y] = f[..] else {
                return Err(perr(format!("vertex line {i} needs two coordinates")));
            };
            vertices.push([x, y]);
        }
        let mut triangles = Vec::with_capacity(nt);
        for i in 0..nt {
            let f: Vec<usize> = next("triangle", i)?
                .split_whitespace()
                .map(|t| t.parse().map_err(|_| perr(format!("bad vertex index '{t}'"))))
                .collect::<Result<_>>()?;
            let [a, b, c] = f[..] else {
                return Err(perr(format!("triangle line {i} needs three indices")));
            };
            triangles.push([a, b, c]);
        }
        let mut boundary = Vec::with_capacity(nb);
        for i in 0..nb {
            let f: Vec<&str> = next("boundary", i)?.split_whitespace().collect();
            let [a, b, tag] = f[..] else {
                return Err(perr(format!("boundary line {i} needs 'i j tag'")));
            };
            let idx = |t: &str| t.parse::<usize>().map_err(|_| perr(format!("bad vertex index '{t}'")));
            boundary.push(BoundaryEdge {
                vertices: [idx(a)?, idx(b)?],
                tag: tag.to_string(),
            });
        }
        TriMesh::new(vertices, triangles, boundary)
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        TriMesh::from_text(&text)
    }

    /// Structured grid on `[x0, x1] × [y0, y1]` with `nx × ny` cells.
    ///
    /// `rising(i, j)` chooses the diagonal of cell (i, j): `true` joins its
    /// lower-left and upper-right corners. Cells where `keep` is false are
    /// removed. Boundary edges are tagged by `tag(midpoint)`.
    pub fn structured(
        [x0, x1]: [f64; 2],
        [y0, y1]: [f64; 2],
        nx: usize,
        ny: usize,
        rising: impl Fn(usize, usize) -> bool,
        keep: impl Fn(usize, usize) -> bool,
        tag: impl Fn(Point) -> String,
    ) -> Result<Self> {
        if nx == 0 || ny == 0 {
            return Err(Error::Mesh("structured grid needs at least one cell".into()));
        }
        let id = |i: usize, j: usize| j * (nx + 1) + i;
        let mut vertices = Vec::with_capacity((nx + 1) * (ny + 1));
        for j in 0..=ny {
            for i in 0..=nx {
                // exact endpoints, symmetric spacing
                let x = x0 + (x1 - x0) * (i as f64 / nx as f64);
                let y = y0 + (y1 - y0) * (j as f64 / ny as f64);
                vertices.push([x, y]);
            }
        }
        let mut triangles = Vec::new();
        for j in 0..ny {
            for i in 0..nx {
                if !keep(i, j) {
                    continue;
                }
                let (a, b, c, d) = (id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1));
                if rising(i, j) {
                    triangles.push([a, b, c]);
                    triangles.push([a, c, d]);
                } else {
                    triangles.push([a, b, d]);
                    triangles.push([b, c, d]);
                }
            }
        }
        // drop vertices not used by any kept cell
        let mut used = vec![usize::MAX; vertices.len()];
        let mut kept = Vec::new();
        for t in triangles.iter_mut() {
            for v in t.iter_mut() {
                if used[*v] == usize::MAX {
                    used[*v] = kept.len();
                    kept.push(vertices[*v]);
                }
                *v = used[*v];
            }
        }
        let mut count: HashMap<(usize, usize), usize> = HashMap::new();
        for t in &triangles {
            for e in 0..3 {
                *count.entry(edge_key(t[(e + 1) % 3], t[(e + 2) % 3])).or_default() += 1;
            }
        }
        let mut boundary = Vec::new();
        for t in &triangles {
            for e in 0..3 {
                let (a, b) = (t[(e + 1) % 3], t[(e + 2) % 3]);
                if count[&edge_key(a, b)] == 1 {
                    let m = [0.5 * (kept[a][0] + kept[b][0]), 0.5 * (kept[a][1] + kept[b][1])];
                    boundary.push(BoundaryEdge {
                        vertices: [a, b],
                        tag: tag(m),
                    });
                }
            }
        }
        TriMesh::new(kept, triangles, boundary)
    }

    /// Unit square, `n × n` cells, rising diagonals, sides tagged
    /// `bottom`, `right`, `top`, `left`.
    pub fn unit_square(n: usize) -> Result<Self> {
        TriMesh::structured([0.0, 1.0], [0.0, 1.0], n, n, |_, _| true, |_, _| true, side_tag)
    }
}

/// Tag of a unit-square side from an edge midpoint.
pub fn side_tag(m: Point) -> String {
    const EPS: f64 = 1e-12;
    if m[1] < EPS {
        "bottom"
    } else if m[1] > 1.0 - EPS {
        "top"
    } else if m[0] < EPS {
        "left"
    } else {
        "right"
    }
    .to_string()
}

pub fn signed_area(v: &[Point], t: [usize; 3]) -> f64 {
    let (a, b, c) = (v[t[0]], v[t[1]], v[t[2]]);
    0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]))
}

fn diameter(v: &[Point], t: [usize; 3]) -> f64 {
    (0..3)
        .map(|i| {
            let (p, q) = (v[t[i]], v[t[(i + 1) % 3]]);
            (p[0] - q[0]).hypot(p[1] - q[1])
        })
        .fold(0.0, f64::max)
}

pub fn barycentric(v: &[Point], t: [usize; 3], x: Point) -> [f64; 3] {
    let area = signed_area(v, t);
    let sub = |a: Point, b: Point| 0.5 * ((a[0] - x[0]) * (b[1] - x[1]) - (b[0] - x[0]) * (a[1] - x[1]));
    [
        sub(v[t[1]], v[t[2]]) / area,
        sub(v[t[2]], v[t[0]]) / area,
        sub(v[t[0]], v[t[1]]) / area,
    ]
}
