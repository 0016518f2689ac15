//! Fourier-Helgason transform of functions on the ball, its inversion and
//! the Plancherel pairing.
//!
//! The boundary integral is an exact sum over cylinders; the only
//! approximation is the Gauss-Legendre rule in `s`. Both directions group
//! vertices by height, since the character `q^{(1/2 ± is) h}` depends on a
//! vertex only through `h(x, c)`.

use num_complex::Complex64;

use crate::context::Context;
use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Complex function on the vertices of a ball.
#[derive(Debug, Clone, PartialEq)]
pub struct TreeFunction {
    pub values: Vec<Complex64>,
}

impl TreeFunction {
    pub fn zeros(n: usize) -> Self {
        TreeFunction {
            values: vec![ZERO; n],
        }
    }

    pub fn delta(n: usize, at: usize) -> Self {
        let mut f = Self::zeros(n);
        f.values[at] = Complex64::new(1.0, 0.0);
        f
    }

    pub fn from_values(values: Vec<Complex64>) -> Self {
        TreeFunction { values }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn conj(&self) -> Self {
        TreeFunction {
            values: self.values.iter().map(|v| v.conj()).collect(),
        }
    }

    pub fn scale(&self, a: Complex64) -> Self {
        TreeFunction {
            values: self.values.iter().map(|v| v * a).collect(),
        }
    }

    /// `self + a * other`.
    pub fn axpy(&self, a: Complex64, other: &TreeFunction) -> Self {
        TreeFunction {
            values: self.values.iter().zip(&other.values).map(|(x, y)| x + a * y).collect(),
        }
    }

    /// `sum_x f(x) conj(g(x))`.
    pub fn inner(&self, other: &TreeFunction) -> Complex64 {
        self.values.iter().zip(&other.values).map(|(a, b)| a * b.conj()).sum()
    }

    pub fn norm2(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub(crate) fn check(&self, ctx: &Context) -> Result<()> {
        if self.values.len() != ctx.vertices() {
            return Err(Error::Dimension {
                what: "tree function",
                expected: ctx.vertices(),
                got: self.values.len(),
            });
        }
        Ok(())
    }
}

/// Function on cylinders x spectral nodes, stored row-major `[c][m]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralFunction {
    pub cylinders: usize,
    pub nodes: usize,
    pub values: Vec<Complex64>,
}

impl SpectralFunction {
    pub fn zeros(cylinders: usize, nodes: usize) -> Self {
        SpectralFunction {
            cylinders,
            nodes,
            values: vec![ZERO; cylinders * nodes],
        }
    }

    pub fn constant(ctx: &Context, v: Complex64) -> Self {
        SpectralFunction {
            cylinders: ctx.cylinders(),
            nodes: ctx.nodes(),
            values: vec![v; ctx.cylinders() * ctx.nodes()],
        }
    }

    #[inline]
    pub fn get(&self, c: usize, m: usize) -> Complex64 {
        self.values[c * self.nodes + m]
    }

    pub fn row(&self, c: usize) -> &[Complex64] {
        &self.values[c * self.nodes..(c + 1) * self.nodes]
    }

    pub fn conj(&self) -> Self {
        SpectralFunction {
            cylinders: self.cylinders,
            nodes: self.nodes,
            values: self.values.iter().map(|v| v.conj()).collect(),
        }
    }

    pub(crate) fn check(&self, ctx: &Context) -> Result<()> {
        let expected = ctx.cylinders() * ctx.nodes();
        if self.cylinders != ctx.cylinders() || self.nodes != ctx.nodes() || self.values.len() != expected {
            return Err(Error::Dimension {
                what: "spectral function",
                expected,
                got: self.values.len(),
            });
        }
        Ok(())
    }
}

/// Sums `f` over the vertices of each height class for cylinder `c`; index `h + H`.
fn bucket_by_height(ctx: &Context, f: &[Complex64], c: usize, buckets: &mut [Complex64]) {
    let heights = ctx.heights();
    let off = heights.max_abs() as i32;
    buckets.iter_mut().for_each(|b| *b = ZERO);
    for (x, v) in f.iter().enumerate() {
        buckets[(heights.get(x, c) + off) as usize] += v;
    }
}

/// `Hf(c, m) = sum_y f(y) q^{(1/2 + is_m) h(y, c)}`.
pub fn fh_forward(ctx: &Context, f: &TreeFunction) -> Result<SpectralFunction> {
    f.check(ctx)?;
    let (cyl, nodes) = (ctx.cylinders(), ctx.nodes());
    let hmax = ctx.heights().max_abs() as i32;
    let mut out = SpectralFunction::zeros(cyl, nodes);
    ctx.exec().fill_chunks(&mut out.values, nodes, |c, row| {
        let mut buckets = vec![ZERO; 2 * hmax as usize + 1];
        bucket_by_height(ctx, &f.values, c, &mut buckets);
        for (i, b) in buckets.iter().enumerate() {
            if *b == ZERO {
                continue;
            }
            let p = ctx.powers().plus(i as i32 - hmax);
            for (o, pm) in row.iter_mut().zip(p) {
                *o += b * pm;
            }
        }
    });
    Ok(out)
}

/// `f(x) = sum_c nu_c sum_m w_m q^{(1/2 - is_m) h(x, c)} F(c, m)`.
pub fn fh_inverse(ctx: &Context, big_f: &SpectralFunction) -> Result<TreeFunction> {
    big_f.check(ctx)?;
    let hmax = ctx.heights().max_abs() as i32;
    let w = ctx.grid().weights();
    // G[c][h] = sum_m w_m q^{(1/2 - is_m) h} F(c, m)
    let per_c: Vec<Vec<Complex64>> = ctx.exec().map(ctx.cylinders(), |c| {
        let row = big_f.row(c);
        (-hmax..=hmax)
            .map(|h| {
                let p = ctx.powers().minus(h);
                row.iter().zip(p).zip(w).map(|((fv, pv), wv)| fv * pv * wv).sum()
            })
            .collect()
    });
    let nu = ctx.nu();
    let values = ctx.exec().map(ctx.vertices(), |x| {
        let hs = ctx.heights().row(x);
        let s: Complex64 = hs
            .iter()
            .zip(&per_c)
            .map(|(&h, g)| g[(h + hmax) as usize])
            .sum();
        s * nu
    });
    Ok(TreeFunction { values })
}

/// `sum_c nu_c sum_m w_m F(c, m) conj(G(c, m))`.
pub fn plancherel_pairing(ctx: &Context, f: &SpectralFunction, g: &SpectralFunction) -> Result<Complex64> {
    f.check(ctx)?;
    g.check(ctx)?;
    let w = ctx.grid().weights();
    let rows = ctx.exec().map(ctx.cylinders(), |c| {
        f.row(c)
            .iter()
            .zip(g.row(c))
            .zip(w)
            .map(|((a, b), wm)| a * b.conj() * wm)
            .sum::<Complex64>()
    });
    Ok(rows.into_iter().sum::<Complex64>() * ctx.nu())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SeededRng;

    fn ctx(q: usize, r: usize, m: usize) -> Context {
        Context::new(q, r, r, m).unwrap()
    }

    #[test]
    fn delta_at_root_transforms_to_one() {
        let c = ctx(2, 3, 32);
        let big_f = fh_forward(&c, &TreeFunction::delta(c.vertices(), 0)).unwrap();
        assert!(big_f.values.iter().all(|v| (v - 1.0).norm() < 1e-15));
    }

    #[test]
    fn delta_transform_is_single_character() {
        let c = ctx(3, 2, 16);
        for x in 0..c.vertices() {
            let big_f = fh_forward(&c, &TreeFunction::delta(c.vertices(), x)).unwrap();
            for cy in 0..c.cylinders() {
                let h = c.partition().height(c.ball(), x, cy).unwrap();
                for (m, &s) in c.grid().nodes().iter().enumerate() {
                    let expected = (Complex64::new(0.5, s) * (h as f64 * 3f64.ln())).exp();
                    assert!((big_f.get(cy, m) - expected).norm() < 1e-13);
                    assert!((big_f.get(cy, m).norm() - 3f64.powf(h as f64 / 2.0)).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn forward_is_linear() {
        let c = ctx(2, 3, 32);
        let mut rng = SeededRng::new(7);
        let f = rng.tree_function(c.vertices());
        let g = rng.tree_function(c.vertices());
        let (a, b) = (Complex64::new(0.3, -1.2), Complex64::new(-2.0, 0.5));
        let lhs = fh_forward(&c, &f.scale(a).axpy(b, &g)).unwrap();
        let (hf, hg) = (fh_forward(&c, &f).unwrap(), fh_forward(&c, &g).unwrap());
        for i in 0..lhs.values.len() {
            assert!((lhs.values[i] - (a * hf.values[i] + b * hg.values[i])).norm() < 1e-12);
        }
    }

    /// Direct evaluation of the defining double sum, vertex by vertex.
    fn brute_inverse(c: &Context, big_f: &SpectralFunction) -> Vec<Complex64> {
        let lnq = (c.q() as f64).ln();
        (0..c.vertices())
            .map(|x| {
                let mut acc = Complex64::new(0.0, 0.0);
                for cy in 0..c.cylinders() {
                    let h = c.partition().height(c.ball(), x, cy).unwrap() as f64;
                    for (m, &s) in c.grid().nodes().iter().enumerate() {
                        let k = (Complex64::new(0.5, -s) * (h * lnq)).exp();
                        acc += c.nu() * c.grid().weights()[m] * k * big_f.get(cy, m);
                    }
                }
                acc
            })
            .collect()
    }

    #[test]
    fn inverse_matches_direct_sum() {
        let c = ctx(2, 2, 24);
        let mut rng = SeededRng::new(3);
        let big_f = SpectralFunction {
            cylinders: c.cylinders(),
            nodes: c.nodes(),
            values: (0..c.cylinders() * c.nodes()).map(|_| rng.complex()).collect(),
        };
        let fast = fh_inverse(&c, &big_f).unwrap();
        for (a, b) in fast.values.iter().zip(brute_inverse(&c, &big_f)) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn inverse_of_one_is_delta_at_root() {
        let c = ctx(2, 4, 256);
        let f = fh_inverse(&c, &SpectralFunction::constant(&c, Complex64::new(1.0, 0.0))).unwrap();
        assert!((f.values[0] - 1.0).norm() < 1e-10);
        assert!(f.values[1..].iter().all(|v| v.norm() < 1e-10));
        let zero = fh_inverse(&c, &SpectralFunction::zeros(c.cylinders(), c.nodes())).unwrap();
        assert!(zero.values.iter().all(|v| *v == ZERO));
    }

    #[test]
    fn round_trip_and_plancherel() {
        for (q, r) in [(2, 4), (3, 3)] {
            let c = ctx(q, r, 256);
            let mut rng = SeededRng::new(11);
            for _ in 0..3 {
                let f = rng.tree_function(c.vertices());
                let g = rng.tree_function(c.vertices());
                let (hf, hg) = (fh_forward(&c, &f).unwrap(), fh_forward(&c, &g).unwrap());
                let back = fh_inverse(&c, &hf).unwrap();
                let err = back.values.iter().zip(&f.values).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
                assert!(err <= 1e-8 * f.max_abs(), "q={q} r={r} err={err}");
                let p = plancherel_pairing(&c, &hf, &hg).unwrap();
                assert!((p - f.inner(&g)).norm() <= 1e-8 * f.norm2() * g.norm2());
            }
        }
    }

    #[test]
    fn pairing_edge_cases() {
        let c = ctx(2, 3, 256);
        let one = fh_forward(&c, &TreeFunction::delta(c.vertices(), 0)).unwrap();
        let p = plancherel_pairing(&c, &one, &one).unwrap();
        assert!((p - 1.0).norm() < 1e-10);
        let zero = SpectralFunction::zeros(c.cylinders(), c.nodes());
        assert_eq!(plancherel_pairing(&c, &one, &zero).unwrap(), ZERO);
    }

    #[test]
    fn dimension_errors() {
        let c = ctx(2, 2, 8);
        assert!(matches!(fh_forward(&c, &TreeFunction::zeros(3)), Err(Error::Dimension { .. })));
        assert!(matches!(
            fh_inverse(&c, &SpectralFunction::zeros(2, 8)),
            Err(Error::Dimension { .. })
        ));
    }

    #[test]
    fn coarse_grid_round_trip_improves_with_m() {
        let mut rng = SeededRng::new(5);
        let f = rng.tree_function(crate::tree::vertex_count(2, 4).unwrap());
        let err = |m: usize| {
            let c = ctx(2, 4, m);
            let back = fh_inverse(&c, &fh_forward(&c, &f).unwrap()).unwrap();
            back.values.iter().zip(&f.values).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
        };
        assert!(err(8) > err(16));
    }
}
