//! Finite balls of the (q+1)-homogeneous tree around the reference vertex.
//!
//! Vertices are numbered breadth-first with children in creation order and
//! the reference vertex `o` at index 0. With this numbering the ball of
//! radius `R` is exactly the first `vertex_count(q, R)` vertices of any ball
//! of larger radius, so vertex ids are stable across radii.

use crate::error::{Error, Result};

pub type VertexId = usize;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vertex {
    pub depth: usize,
    pub parent: Option<VertexId>,
    pub children: Vec<VertexId>,
}

/// Immutable ball `{x : |x| <= R}` of the homogeneous tree with degree `q + 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeBall {
    q: usize,
    radius: usize,
    vertices: Vec<Vertex>,
    /// Start index of each sphere `{|x| = j}`, plus a final sentinel.
    sphere_start: Vec<usize>,
}

/// Number of vertices in the ball, `1 + (q+1)(q^R - 1)/(q - 1)`, or `None` on overflow.
pub fn vertex_count(q: usize, radius: usize) -> Option<usize> {
    let mut total: usize = 1;
    let mut sphere: usize = 1;
    for j in 1..=radius {
        sphere = sphere.checked_mul(if j == 1 { q + 1 } else { q })?;
        total = total.checked_add(sphere)?;
    }
    Some(total)
}

impl TreeBall {
    pub fn new(q: usize, radius: usize) -> Result<Self> {
        if q < 2 {
            return Err(Error::InvalidDegree(q));
        }
        let n = vertex_count(q, radius).ok_or(Error::BallTooLarge { q, radius })?;
        // The vertex table itself must be addressable; refuse absurd sizes up front.
        if n.checked_mul(std::mem::size_of::<Vertex>()).is_none_or(|b| b > isize::MAX as usize) {
            return Err(Error::BallTooLarge { q, radius });
        }

        let mut vertices = Vec::with_capacity(n);
        vertices.push(Vertex {
            depth: 0,
            parent: None,
            children: Vec::new(),
        });
        let mut sphere_start = vec![0, 1];
        let mut frontier = 0..1;
        for depth in 1..=radius {
            let start = vertices.len();
            for v in frontier.clone() {
                let arity = if v == 0 { q + 1 } else { q };
                for _ in 0..arity {
                    let id = vertices.len();
                    vertices.push(Vertex {
                        depth,
                        parent: Some(v),
                        children: Vec::new(),
                    });
                    vertices[v].children.push(id);
                }
            }
            frontier = start..vertices.len();
            sphere_start.push(vertices.len());
        }
        debug_assert_eq!(vertices.len(), n);
        Ok(TreeBall {
            q,
            radius,
            vertices,
            sphere_start,
        })
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn root(&self) -> VertexId {
        0
    }

    pub fn vertex(&self, v: VertexId) -> Result<&Vertex> {
        self.vertices.get(v).ok_or(Error::VertexOutOfRange {
            vertex: v,
            len: self.len(),
        })
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn depth(&self, v: VertexId) -> Result<usize> {
        Ok(self.vertex(v)?.depth)
    }

    /// Vertices with `|x| = j`, as a contiguous id range.
    pub fn sphere(&self, j: usize) -> std::ops::Range<VertexId> {
        if j > self.radius {
            return 0..0;
        }
        self.sphere_start[j]..self.sphere_start[j + 1]
    }

    /// The vertex at depth `d` on the root path of `v` (requires `d <= |v|`).
    pub fn ancestor(&self, mut v: VertexId, d: usize) -> Result<VertexId> {
        let mut depth = self.depth(v)?;
        if d > depth {
            return Err(Error::Incompatible(format!(
                "vertex {v} at depth {depth} has no ancestor at depth {d}"
            )));
        }
        while depth > d {
            v = self.vertices[v].parent.expect("non-root vertex has a parent");
            depth -= 1;
        }
        Ok(v)
    }

    /// Root path `[o, ..., v]`.
    pub fn root_path(&self, v: VertexId) -> Result<Vec<VertexId>> {
        let mut path = vec![v];
        let mut cur = self.vertex(v)?;
        while let Some(p) = cur.parent {
            path.push(p);
            cur = &self.vertices[p];
        }
        path.reverse();
        Ok(path)
    }

    /// Deepest common vertex of the root paths of `x` and `y`.
    pub fn confluence(&self, x: VertexId, y: VertexId) -> Result<VertexId> {
        let (mut a, mut b) = (x, y);
        let (mut da, mut db) = (self.depth(a)?, self.depth(b)?);
        while da > db {
            a = self.vertices[a].parent.unwrap();
            da -= 1;
        }
        while db > da {
            b = self.vertices[b].parent.unwrap();
            db -= 1;
        }
        while a != b {
            a = self.vertices[a].parent.unwrap();
            b = self.vertices[b].parent.unwrap();
        }
        Ok(a)
    }

    pub fn distance(&self, x: VertexId, y: VertexId) -> Result<usize> {
        let c = self.confluence(x, y)?;
        Ok(self.vertices[x].depth + self.vertices[y].depth - 2 * self.vertices[c].depth)
    }

    /// The geodesic `x -> confluence(x, y) -> y`, endpoints included.
    pub fn geodesic(&self, x: VertexId, y: VertexId) -> Result<Vec<VertexId>> {
        let c = self.confluence(x, y)?;
        let mut up = Vec::new();
        let mut v = x;
        while v != c {
            up.push(v);
            v = self.vertices[v].parent.unwrap();
        }
        up.push(c);
        let mut down = Vec::new();
        let mut v = y;
        while v != c {
            down.push(v);
            v = self.vertices[v].parent.unwrap();
        }
        up.extend(down.into_iter().rev());
        Ok(up)
    }
}
