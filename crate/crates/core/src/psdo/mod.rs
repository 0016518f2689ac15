//! Pseudo-differential operators on the tree: symbols on the
//! vertex x cylinder x spectral-node grid, their kernels, norms, traces,
//! adjoints and products.
//!
//! Every operator-level identity is checked against the dense
//! [`KernelMatrix`], which is the ground truth for composition, adjoints
//! and singular values.

mod calculus;
mod composition;
mod norms;

pub use calculus::{
    apply, b_function, hs_norm_via_b, kernel_from_symbol, symbol_from_decomposition, trace_via_symbol,
};
pub use composition::{adjoint_symbol, adjoint_symbol_direct, product_symbol, product_symbol_grid};
pub use norms::{
    hs_norm_via_kernel, l2_bound_check, lemma_schatten_power_check, normal_residual, operator_norm,
    operator_report, schatten_norm, selfadjoint_residual, singular_values, L2BoundReport, OperatorReport,
    PremiseViolation,
};

use num_complex::Complex64;

use crate::context::Context;
use crate::error::{Error, Result};
use crate::transform::TreeFunction;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Symbol values `sigma(x, c, m)`, stored row-major `[x][c][m]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSymbol {
    pub vertices: usize,
    pub cylinders: usize,
    pub nodes: usize,
    pub values: Vec<Complex64>,
}

impl GridSymbol {
    pub fn zeros(ctx: &Context) -> Self {
        let (n, c, m) = (ctx.vertices(), ctx.cylinders(), ctx.nodes());
        GridSymbol {
            vertices: n,
            cylinders: c,
            nodes: m,
            values: vec![ZERO; n * c * m],
        }
    }

    /// Fills every entry from `f(x, c, m)`.
    pub fn from_fn(ctx: &Context, f: impl Fn(usize, usize, usize) -> Complex64 + Sync + Send) -> Self {
        let mut s = Self::zeros(ctx);
        let (cyl, m) = (s.cylinders, s.nodes);
        ctx.exec().fill_chunks(&mut s.values, cyl * m, |x, row| {
            for c in 0..cyl {
                for k in 0..m {
                    row[c * m + k] = f(x, c, k);
                }
            }
        });
        s
    }

    #[inline]
    pub fn get(&self, x: usize, c: usize, m: usize) -> Complex64 {
        self.values[(x * self.cylinders + c) * self.nodes + m]
    }

    /// All `(c, m)` values for vertex `x`.
    #[inline]
    pub fn row(&self, x: usize) -> &[Complex64] {
        let len = self.cylinders * self.nodes;
        &self.values[x * len..(x + 1) * len]
    }

    pub fn max_abs_diff(&self, other: &GridSymbol) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub(crate) fn check(&self, ctx: &Context) -> Result<()> {
        let expected = ctx.vertices() * ctx.cylinders() * ctx.nodes();
        if self.vertices != ctx.vertices()
            || self.cylinders != ctx.cylinders()
            || self.nodes != ctx.nodes()
            || self.values.len() != expected
        {
            return Err(Error::Dimension {
                what: "grid symbol",
                expected,
                got: self.values.len(),
            });
        }
        Ok(())
    }
}

/// Finite nuclear decomposition: the operator with kernel `sum_k f_k(x) g_k(y)`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct NuclearDecomposition {
    pub pairs: Vec<(TreeFunction, TreeFunction)>,
}

impl NuclearDecomposition {
    pub fn new(pairs: Vec<(TreeFunction, TreeFunction)>) -> Self {
        NuclearDecomposition { pairs }
    }

    /// `{(delta_a, delta_b)}`: the rank-one kernel `delta_a ⊗ delta_b`.
    pub fn delta_pair(n: usize, a: usize, b: usize) -> Self {
        Self::new(vec![(TreeFunction::delta(n, a), TreeFunction::delta(n, b))])
    }

    /// `sum_a (delta_a, delta_a)`: the identity operator on the ball.
    pub fn identity(n: usize) -> Self {
        Self::new((0..n).map(|a| (TreeFunction::delta(n, a), TreeFunction::delta(n, a))).collect())
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// `sum_k f_k ⊗ g_k` assembled directly; the outer-product reference kernel.
    pub fn outer_product_kernel(&self, n: usize) -> KernelMatrix {
        let mut k = KernelMatrix::zeros(n);
        for (f, g) in &self.pairs {
            for x in 0..n {
                for y in 0..n {
                    k.data[x * n + y] += f.values[x] * g.values[y];
                }
            }
        }
        k
    }

    /// `sum_k ||g_k||_{p1'} ||f_k||_{p2}`, the nuclear norm bound of this decomposition.
    pub fn nuclear_bound(&self, p1_dual: f64, p2: f64) -> f64 {
        let lp = |f: &TreeFunction, p: f64| {
            if p.is_infinite() {
                f.max_abs()
            } else {
                f.values.iter().map(|v| v.norm().powf(p)).sum::<f64>().powf(1.0 / p)
            }
        };
        self.pairs.iter().map(|(f, g)| lp(g, p1_dual) * lp(f, p2)).sum()
    }

    /// `sum_k ||f_k||_inf ||g_k||_inf`, the scale used for entrywise kernel tolerances.
    pub fn sup_scale(&self) -> f64 {
        self.nuclear_bound(f64::INFINITY, f64::INFINITY)
    }

    /// `sum_k sum_x f_k(x) g_k(x)`, the nuclear trace.
    pub fn trace(&self) -> Complex64 {
        self.pairs
            .iter()
            .map(|(f, g)| f.values.iter().zip(&g.values).map(|(a, b)| a * b).sum::<Complex64>())
            .sum()
    }

    pub(crate) fn check(&self, ctx: &Context) -> Result<()> {
        for (f, g) in &self.pairs {
            f.check(ctx)?;
            g.check(ctx)?;
        }
        Ok(())
    }
}

/// A symbol given either on the grid or through a nuclear decomposition.
#[derive(Debug, Clone, PartialEq)]
pub enum Symbol {
    Grid(GridSymbol),
    Nuclear(NuclearDecomposition),
}

impl Symbol {
    pub fn materialize(&self, ctx: &Context) -> Result<GridSymbol> {
        match self {
            Symbol::Grid(g) => {
                g.check(ctx)?;
                Ok(g.clone())
            }
            Symbol::Nuclear(d) => symbol_from_decomposition(ctx, d),
        }
    }
}

/// Dense kernel `K(x, y)`, row `x`, column `y`.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelMatrix {
    pub n: usize,
    pub data: Vec<Complex64>,
}

impl KernelMatrix {
    pub fn zeros(n: usize) -> Self {
        KernelMatrix {
            n,
            data: vec![ZERO; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut k = Self::zeros(n);
        for i in 0..n {
            k.data[i * n + i] = Complex64::new(1.0, 0.0);
        }
        k
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for x in 0..n {
            for y in 0..n {
                data.push(f(x, y));
            }
        }
        KernelMatrix { n, data }
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> Complex64 {
        self.data[x * self.n + y]
    }

    pub fn row(&self, x: usize) -> &[Complex64] {
        &self.data[x * self.n..(x + 1) * self.n]
    }

    /// `(K f)(x) = sum_y K(x, y) f(y)`.
    pub fn apply(&self, f: &TreeFunction) -> TreeFunction {
        assert_eq!(f.len(), self.n, "kernel/function dimension mismatch");
        TreeFunction::from_values(
            (0..self.n)
                .map(|x| self.row(x).iter().zip(&f.values).map(|(k, v)| k * v).sum())
                .collect(),
        )
    }

    pub fn matmul(&self, other: &KernelMatrix) -> KernelMatrix {
        assert_eq!(self.n, other.n);
        let n = self.n;
        let mut out = Self::zeros(n);
        for x in 0..n {
            for z in 0..n {
                let a = self.data[x * n + z];
                if a == ZERO {
                    continue;
                }
                for y in 0..n {
                    out.data[x * n + y] += a * other.data[z * n + y];
                }
            }
        }
        out
    }

    pub fn conj_transpose(&self) -> KernelMatrix {
        let n = self.n;
        KernelMatrix::from_fn(n, |x, y| self.data[y * n + x].conj())
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.n).map(|i| self.data[i * self.n + i]).sum()
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &KernelMatrix) -> f64 {
        assert_eq!(self.n, other.n);
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn to_nalgebra(&self) -> nalgebra::DMatrix<Complex64> {
        nalgebra::DMatrix::from_row_slice(self.n, self.n, &self.data)
    }
}
