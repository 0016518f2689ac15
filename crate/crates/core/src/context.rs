//! Shared discretization: ball, cylinder partition, spectral grid, height
//! table and the tabulated characters `q^{(1/2 ± is) h}`.

use num_complex::Complex64;

use crate::boundary::{CylinderPartition, HeightTable};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::spectral::SpectralGrid;
use crate::tree::TreeBall;

/// `q^{(1/2 + is_m) h}`, `q^{(1/2 - is_m) h}` and `q^{-(1/2 - is_m) h}` for `|h| <= H`.
#[derive(Debug, Clone)]
pub struct PowerTable {
    max_abs: usize,
    nodes: usize,
    plus: Vec<Complex64>,
    minus: Vec<Complex64>,
    minus_inv: Vec<Complex64>,
}

impl PowerTable {
    pub fn new(q: usize, max_abs: usize, grid: &SpectralGrid) -> Self {
        let lnq = (q as f64).ln();
        let m = grid.len();
        let rows = 2 * max_abs + 1;
        let mut plus = Vec::with_capacity(rows * m);
        let mut minus = Vec::with_capacity(rows * m);
        let mut minus_inv = Vec::with_capacity(rows * m);
        for r in 0..rows {
            let h = r as f64 - max_abs as f64;
            for &s in grid.nodes() {
                plus.push((Complex64::new(0.5, s) * (h * lnq)).exp());
                minus.push((Complex64::new(0.5, -s) * (h * lnq)).exp());
                minus_inv.push((Complex64::new(-0.5, s) * (h * lnq)).exp());
            }
        }
        PowerTable {
            max_abs,
            nodes: m,
            plus,
            minus,
            minus_inv,
        }
    }

    #[inline]
    fn offset(&self, h: i32) -> usize {
        (h + self.max_abs as i32) as usize * self.nodes
    }

    /// `q^{(1/2 + is_m) h}` for all `m`.
    #[inline]
    pub fn plus(&self, h: i32) -> &[Complex64] {
        let o = self.offset(h);
        &self.plus[o..o + self.nodes]
    }

    /// `q^{(1/2 - is_m) h}` for all `m`.
    #[inline]
    pub fn minus(&self, h: i32) -> &[Complex64] {
        let o = self.offset(h);
        &self.minus[o..o + self.nodes]
    }

    /// `q^{-(1/2 - is_m) h}` for all `m`.
    #[inline]
    pub fn minus_inv(&self, h: i32) -> &[Complex64] {
        let o = self.offset(h);
        &self.minus_inv[o..o + self.nodes]
    }

    pub fn max_abs(&self) -> usize {
        self.max_abs
    }
}

/// Everything a transform or symbol computation needs, built once per `(q, R, D, M)`.
#[derive(Debug, Clone)]
pub struct Context {
    ball: TreeBall,
    partition: CylinderPartition,
    grid: SpectralGrid,
    heights: HeightTable,
    powers: PowerTable,
    exec: Exec,
}

impl Context {
    /// Ball of radius `radius`, cylinders of depth `depth` (must be `>= radius`), `nodes` spectral nodes.
    pub fn new(q: usize, radius: usize, depth: usize, nodes: usize) -> Result<Self> {
        if depth < radius {
            return Err(Error::Truncation {
                depth,
                needed: radius,
            });
        }
        let ball = TreeBall::new(q, radius)?;
        let partition = CylinderPartition::new(q, depth)?;
        let grid = SpectralGrid::new(q, nodes)?;
        Self::from_parts(ball, partition, grid)
    }

    pub fn from_parts(ball: TreeBall, partition: CylinderPartition, grid: SpectralGrid) -> Result<Self> {
        if grid.q() != ball.q() {
            return Err(Error::Incompatible(format!(
                "grid has q = {}, ball has q = {}",
                grid.q(),
                ball.q()
            )));
        }
        let heights = HeightTable::new(&ball, &partition)?;
        let powers = PowerTable::new(ball.q(), heights.max_abs(), &grid);
        Ok(Context {
            ball,
            partition,
            grid,
            heights,
            powers,
            exec: Exec::default(),
        })
    }

    pub fn with_exec(mut self, exec: Exec) -> Self {
        self.exec = exec;
        self
    }

    pub fn exec(&self) -> Exec {
        self.exec
    }

    pub fn q(&self) -> usize {
        self.ball.q()
    }

    pub fn ball(&self) -> &TreeBall {
        &self.ball
    }

    pub fn partition(&self) -> &CylinderPartition {
        &self.partition
    }

    pub fn grid(&self) -> &SpectralGrid {
        &self.grid
    }

    pub fn heights(&self) -> &HeightTable {
        &self.heights
    }

    pub fn powers(&self) -> &PowerTable {
        &self.powers
    }

    pub fn vertices(&self) -> usize {
        self.ball.len()
    }

    pub fn cylinders(&self) -> usize {
        self.partition.len()
    }

    pub fn nodes(&self) -> usize {
        self.grid.len()
    }

    pub fn nu(&self) -> f64 {
        self.partition.weight_f64()
    }

    /// `(q, R, D, M)`.
    pub fn dims(&self) -> (usize, usize, usize, usize) {
        (self.q(), self.ball.radius(), self.partition.depth(), self.nodes())
    }
}
