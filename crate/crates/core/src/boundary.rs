//! Depth-`D` discretization of the boundary by cylinder sets.
//!
//! A cylinder `E(y)` is the set of rays from `o` through the depth-`D`
//! vertex `y`. For `|x| <= D` the confluence of `x` with any ray of `E(y)`
//! equals `confluence(x, y)`, so heights `h_w(x)` are constant on
//! cylinders and every boundary integral of a height-dependent integrand
//! is an exact finite sum.

use num_complex::Complex64;
use num_rational::Ratio;

use crate::error::{Error, Result};
use crate::tree::{TreeBall, VertexId};

pub type CylinderId = usize;

/// Partition of the boundary into the `(q+1) q^(D-1)` cylinders of depth `D`.
///
/// The partition owns the radius-`D` ball its cylinders hang from. Any
/// ball of radius `R <= D` shares its vertex ids with that ball.
#[derive(Debug, Clone, PartialEq)]
pub struct CylinderPartition {
    tree: TreeBall,
    depth: usize,
    weight: Ratio<u64>,
    weight_f64: f64,
}

impl CylinderPartition {
    pub fn new(q: usize, depth: usize) -> Result<Self> {
        if depth == 0 {
            return Err(Error::InvalidCylinderDepth(depth));
        }
        let tree = TreeBall::new(q, depth)?;
        let count = tree.sphere(depth).len() as u64;
        let weight = Ratio::new(1, count);
        Ok(CylinderPartition {
            tree,
            depth,
            weight,
            weight_f64: 1.0 / count as f64,
        })
    }

    pub fn q(&self) -> usize {
        self.tree.q()
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn len(&self) -> usize {
        self.tree.sphere(self.depth).len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// The depth-`D` ball; its vertex ids extend those of every smaller ball.
    pub fn tree(&self) -> &TreeBall {
        &self.tree
    }

    /// Representative vertex `y_c` of cylinder `c`.
    pub fn representative(&self, c: CylinderId) -> Result<VertexId> {
        if c >= self.len() {
            return Err(Error::CylinderOutOfRange {
                cylinder: c,
                len: self.len(),
            });
        }
        Ok(self.tree.sphere(self.depth).start + c)
    }

    /// `nu(E(y))`, identical for all cylinders.
    pub fn weight(&self) -> Ratio<u64> {
        self.weight
    }

    pub fn weight_f64(&self) -> f64 {
        self.weight_f64
    }

    pub fn weights_exact(&self) -> Vec<Ratio<u64>> {
        vec![self.weight; self.len()]
    }

    /// Checks that `ball` lives inside this partition's tree.
    pub fn check_ball(&self, ball: &TreeBall) -> Result<()> {
        if ball.q() != self.q() {
            return Err(Error::Incompatible(format!(
                "ball has q = {}, partition has q = {}",
                ball.q(),
                self.q()
            )));
        }
        if ball.radius() > self.depth {
            return Err(Error::Truncation {
                depth: self.depth,
                needed: ball.radius(),
            });
        }
        Ok(())
    }

    fn check_vertex(&self, ball: &TreeBall, x: VertexId) -> Result<usize> {
        let depth = ball.depth(x)?;
        if depth > self.depth {
            return Err(Error::Truncation {
                depth: self.depth,
                needed: depth,
            });
        }
        Ok(depth)
    }

    /// `h_w(x) = 2 |c(x, w)| - |x|` for any ray `w` in cylinder `c`.
    pub fn height(&self, ball: &TreeBall, x: VertexId, c: CylinderId) -> Result<i32> {
        let depth = self.check_vertex(ball, x)?;
        let y = self.representative(c)?;
        let conf = self.tree.confluence(x, y)?;
        Ok(2 * self.tree.depth(conf)? as i32 - depth as i32)
    }

    /// `h_w(x) - h_w(x0)`: the height of `x` seen from base point `x0`.
    pub fn height_rel(&self, ball: &TreeBall, x: VertexId, x0: VertexId, c: CylinderId) -> Result<i32> {
        Ok(self.height(ball, x, c)? - self.height(ball, x0, c)?)
    }

    /// `d nu_y / d nu_x (w) = q^(h_w(y) - h_w(x))` on cylinder `c`.
    pub fn radon_nikodym(&self, ball: &TreeBall, x: VertexId, y: VertexId, c: CylinderId) -> Result<Ratio<u64>> {
        let e = self.height_rel(ball, y, x, c)?;
        let p = (self.q() as u64).pow(e.unsigned_abs());
        Ok(if e >= 0 {
            Ratio::from_integer(p)
        } else {
            Ratio::new(1, p)
        })
    }

    /// Index of the depth-`n` ancestor group of each cylinder, numbered in order of appearance.
    fn groups(&self, n: usize) -> Vec<usize> {
        let mut labels = Vec::with_capacity(self.len());
        let mut last: Option<VertexId> = None;
        let mut next = 0usize;
        for c in 0..self.len() {
            let y = self.tree.sphere(self.depth).start + c;
            let a = self.tree.ancestor(y, n).expect("n <= D");
            if last != Some(a) {
                if last.is_some() {
                    next += 1;
                }
                last = Some(a);
            }
            labels.push(next);
        }
        labels
    }

    /// Conditional expectation onto depth-`n` cylinders, applied independently per spectral node.
    pub fn averaging(&self, f: &BoundaryFunction, n: usize) -> Result<BoundaryFunction> {
        if n > self.depth {
            return Err(Error::AveragingLevel {
                level: n,
                depth: self.depth,
            });
        }
        f.check(self)?;
        let labels = self.groups(n);
        let groups = labels.last().map_or(0, |l| l + 1);
        let nodes = f.nodes;
        let mut sums = vec![Complex64::new(0.0, 0.0); groups * nodes];
        let mut counts = vec![0usize; groups];
        for (c, &g) in labels.iter().enumerate() {
            counts[g] += 1;
            for m in 0..nodes {
                sums[g * nodes + m] += f.values[c * nodes + m];
            }
        }
        let mut values = Vec::with_capacity(f.values.len());
        for &g in &labels {
            let k = counts[g] as f64;
            values.extend((0..nodes).map(|m| sums[g * nodes + m] / k));
        }
        Ok(BoundaryFunction { values, nodes })
    }

    /// `sum_c nu_c F(c)`, one value per spectral node.
    pub fn integrate(&self, f: &BoundaryFunction) -> Result<Vec<Complex64>> {
        f.check(self)?;
        let mut out = vec![Complex64::new(0.0, 0.0); f.nodes];
        for c in 0..self.len() {
            for (m, o) in out.iter_mut().enumerate() {
                *o += f.values[c * f.nodes + m];
            }
        }
        Ok(out.into_iter().map(|v| v * self.weight_f64).collect())
    }
}

/// `q / ((q + 1) q^j)`.
///
/// For a vertex `x` this is the mass of rays whose confluence with `x` has
/// depth exactly `j` when `j = 0` or `j = |x|`, and depth at least `j` when
/// `1 <= j <= |x|`.
pub fn level_set_measure(q: u64, j: u32) -> Ratio<u64> {
    Ratio::new(q, (q + 1) * q.pow(j))
}

/// A function on the cylinders, optionally depending on the spectral node.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryFunction {
    /// Row-major `[cylinder][node]`.
    pub values: Vec<Complex64>,
    /// Number of spectral nodes; 1 for an `s`-independent function.
    pub nodes: usize,
}

impl BoundaryFunction {
    pub fn constant(part: &CylinderPartition, value: Complex64) -> Self {
        BoundaryFunction {
            values: vec![value; part.len()],
            nodes: 1,
        }
    }

    pub fn from_fn(part: &CylinderPartition, mut f: impl FnMut(CylinderId) -> Complex64) -> Self {
        BoundaryFunction {
            values: (0..part.len()).map(&mut f).collect(),
            nodes: 1,
        }
    }

    fn check(&self, part: &CylinderPartition) -> Result<()> {
        let expected = part.len() * self.nodes;
        if self.nodes == 0 || self.values.len() != expected {
            return Err(Error::Dimension {
                what: "boundary function",
                expected,
                got: self.values.len(),
            });
        }
        Ok(())
    }
}

/// Heights `h(x, c)` for every ball vertex and cylinder, stored row-major `[x][c]`.
#[derive(Debug, Clone, PartialEq)]
pub struct HeightTable {
    vertices: usize,
    cylinders: usize,
    max_abs: usize,
    values: Vec<i32>,
}

impl HeightTable {
    pub fn new(ball: &TreeBall, part: &CylinderPartition) -> Result<Self> {
        part.check_ball(ball)?;
        let n = ball.len();
        let cylinders = part.len();
        let tree = part.tree();
        let d = part.depth();
        let mut values = vec![0i32; n * cylinders];
        for c in 0..cylinders {
            let y = part.representative(c)?;
            let path = tree.root_path(y)?;
            debug_assert_eq!(path.len(), d + 1);
            for x in 0..n {
                let dx = ball.vertices()[x].depth;
                // Deepest j <= |x| with ancestor_j(x) on the root path of y.
                let mut a = x;
                let mut j = dx;
                while path[j] != a {
                    a = ball.vertices()[a].parent.expect("root is on every path");
                    j -= 1;
                }
                values[x * cylinders + c] = 2 * j as i32 - dx as i32;
            }
        }
        Ok(HeightTable {
            vertices: n,
            cylinders,
            max_abs: ball.radius(),
            values,
        })
    }

    #[inline]
    pub fn get(&self, x: VertexId, c: CylinderId) -> i32 {
        self.values[x * self.cylinders + c]
    }

    /// Heights of vertex `x` over all cylinders.
    pub fn row(&self, x: VertexId) -> &[i32] {
        &self.values[x * self.cylinders..(x + 1) * self.cylinders]
    }

    pub fn vertices(&self) -> usize {
        self.vertices
    }

    pub fn cylinders(&self) -> usize {
        self.cylinders
    }

    /// Bound on `|h|`; equals the ball radius.
    pub fn max_abs(&self) -> usize {
        self.max_abs
    }
}
