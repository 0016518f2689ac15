//! Singular-value quantities, residuals and the L^2 boundedness check.

use num_complex::Complex64;

use super::{kernel_from_symbol, trace_via_symbol, GridSymbol, KernelMatrix};
use crate::context::Context;
use crate::error::{Error, Result};
use crate::rng::SeededRng;
use crate::transform::TreeFunction;

/// Singular values below this fraction of the largest are treated as zero.
pub const SINGULAR_CUTOFF: f64 = 1e-12;

const POWER_ITERATIONS: usize = 200;
const POWER_TOLERANCE: f64 = 1e-12;
const POWER_SEED: u64 = 0x5eed;

/// Singular values of `k`, descending, with the relative cutoff applied.
pub fn singular_values(k: &KernelMatrix) -> Vec<f64> {
    if k.n == 0 {
        return Vec::new();
    }
    let mut s: Vec<f64> = k.to_nalgebra().singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    let cutoff = SINGULAR_CUTOFF * s.first().copied().unwrap_or(0.0);
    for v in &mut s {
        if *v <= cutoff {
            *v = 0.0;
        }
    }
    s
}

fn check_exponent(name: &'static str, r: f64) -> Result<()> {
    if r > 0.0 && r.is_finite() {
        Ok(())
    } else {
        Err(Error::Exponent {
            name,
            constraint: "0 < value < inf",
            value: r,
        })
    }
}

pub fn hs_norm_via_kernel(k: &KernelMatrix) -> f64 {
    k.frobenius()
}

/// `(sum s_n^r)^{1/r}`; a quasi-norm when `r < 1`.
pub fn schatten_norm(k: &KernelMatrix, r: f64) -> Result<f64> {
    check_exponent("r", r)?;
    Ok(schatten_from_singular(&singular_values(k), r))
}

fn schatten_from_singular(s: &[f64], r: f64) -> f64 {
    s.iter().filter(|&&v| v > 0.0).map(|v| v.powf(r)).sum::<f64>().powf(1.0 / r)
}

/// `| ||K||_{S_r}^r - || |K|^{r/t} ||_{S_t}^t |`.
///
/// `|K|^{r/t} = V diag(s^{r/t}) V^*` is formed explicitly from the SVD and
/// its singular values are recomputed before taking the `S_t` norm.
pub fn lemma_schatten_power_check(k: &KernelMatrix, r: f64, t: f64) -> Result<f64> {
    check_exponent("r", r)?;
    check_exponent("t", t)?;
    if r == t {
        return Ok(0.0);
    }
    if k.n == 0 {
        return Ok(0.0);
    }
    let svd = k.to_nalgebra().svd(false, true);
    let v_t = svd.v_t.expect("requested V^*");
    let smax = svd.singular_values.iter().copied().fold(0.0, f64::max);
    let cutoff = SINGULAR_CUTOFF * smax;
    let powered: Vec<f64> = svd
        .singular_values
        .iter()
        .map(|&s| if s <= cutoff { 0.0 } else { s.powf(r / t) })
        .collect();
    let lhs: f64 = svd
        .singular_values
        .iter()
        .filter(|&&s| s > cutoff)
        .map(|s| s.powf(r))
        .sum();

    // |K|^{r/t} = V diag(powered) V^*, with V^* = v_t.
    let n = k.n;
    let mut abs_pow = nalgebra::DMatrix::<Complex64>::zeros(n, n);
    for (j, &p) in powered.iter().enumerate() {
        if p == 0.0 {
            continue;
        }
        let row = v_t.row(j);
        for a in 0..n {
            let va = row[a].conj() * p;
            for b in 0..n {
                abs_pow[(a, b)] += va * row[b];
            }
        }
    }
    let data: Vec<Complex64> = (0..n).flat_map(|a| (0..n).map(move |b| (a, b))).map(|(a, b)| abs_pow[(a, b)]).collect();
    let rhs_s = singular_values(&KernelMatrix { n, data });
    let rhs: f64 = rhs_s.iter().filter(|&&v| v > 0.0).map(|v| v.powf(t)).sum();
    Ok((lhs - rhs).abs())
}

/// `max |K - K^H|`.
pub fn selfadjoint_residual(k: &KernelMatrix) -> f64 {
    k.max_abs_diff(&k.conj_transpose())
}

/// `max |K K^H - K^H K|`.
pub fn normal_residual(k: &KernelMatrix) -> f64 {
    let kh = k.conj_transpose();
    k.matmul(&kh).max_abs_diff(&kh.matmul(k))
}

/// Largest singular value by power iteration on `K^H K` from a fixed seeded start.
pub fn operator_norm(k: &KernelMatrix) -> f64 {
    let n = k.n;
    if n == 0 {
        return 0.0;
    }
    let kh = k.conj_transpose();
    let mut rng = SeededRng::new(POWER_SEED);
    let mut v = rng.tree_function(n);
    let nv = v.norm2();
    v = v.scale(Complex64::new(1.0 / nv, 0.0));
    let mut estimate = 0.0;
    for _ in 0..POWER_ITERATIONS {
        let w = kh.apply(&k.apply(&v));
        let lambda = w.norm2();
        if lambda == 0.0 {
            return 0.0;
        }
        v = w.scale(Complex64::new(1.0 / lambda, 0.0));
        let converged = (lambda - estimate).abs() <= POWER_TOLERANCE * lambda;
        estimate = lambda;
        if converged {
            break;
        }
    }
    estimate.sqrt()
}

#[derive(Debug, Clone, PartialEq)]
pub struct OperatorReport {
    pub frobenius: f64,
    pub singular_values: Vec<f64>,
    /// `(r, ||K||_{S_r})` for each requested `r`.
    pub schatten: Vec<(f64, f64)>,
    pub trace_via_symbol: Complex64,
    pub trace_via_kernel: Complex64,
    pub operator_norm: f64,
    pub selfadjoint_residual: f64,
    pub normal_residual: f64,
}

pub fn operator_report(ctx: &Context, sigma: &GridSymbol, schatten_r: &[f64]) -> Result<OperatorReport> {
    let k = kernel_from_symbol(ctx, sigma)?;
    let s = singular_values(&k);
    let schatten = schatten_r
        .iter()
        .map(|&r| {
            check_exponent("r", r)?;
            Ok((r, schatten_from_singular(&s, r)))
        })
        .collect::<Result<_>>()?;
    Ok(OperatorReport {
        frobenius: k.frobenius(),
        singular_values: s,
        schatten,
        trace_via_symbol: trace_via_symbol(ctx, sigma)?,
        trace_via_kernel: k.trace(),
        operator_norm: operator_norm(&k),
        selfadjoint_residual: selfadjoint_residual(&k),
        normal_residual: normal_residual(&k),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PremiseViolation {
    pub vertex: usize,
    pub cylinder: usize,
    pub node: usize,
    /// `|q^{h/2} sigma|` at the witness.
    pub lhs: f64,
    /// `C |v(x)|` at the witness.
    pub rhs: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct L2BoundReport {
    pub constant: f64,
    pub premise_holds: bool,
    /// Worst violation of `|q^{h/2} sigma(x, c, m)| <= C |v(x)|`, if any.
    pub worst_violation: Option<PremiseViolation>,
    pub violations: usize,
    pub operator_norm: f64,
    pub v_norm: f64,
    /// `||T_sigma|| / ||v||_2`.
    pub measured_constant: f64,
}

/// Checks the pointwise premise `|q^{h_w(x)/2} sigma(x, w, s)| <= C |v(x)|` and measures `||T_sigma||`.
pub fn l2_bound_check(ctx: &Context, sigma: &GridSymbol, v: &TreeFunction, constant: f64) -> Result<L2BoundReport> {
    sigma.check(ctx)?;
    v.check(ctx)?;
    if !(constant > 0.0) {
        return Err(Error::Exponent {
            name: "C",
            constraint: "C > 0",
            value: constant,
        });
    }
    let nodes = ctx.nodes();
    let q = ctx.q() as f64;
    let mut worst: Option<PremiseViolation> = None;
    let mut violations = 0usize;
    for x in 0..ctx.vertices() {
        let rhs = constant * v.values[x].norm();
        for (c, &h) in ctx.heights().row(x).iter().enumerate() {
            let scale = q.powf(h as f64 / 2.0);
            for m in 0..nodes {
                let lhs = scale * sigma.get(x, c, m).norm();
                // Relative slack for the rounding in q^{h/2} * |sigma|.
                if lhs > rhs * (1.0 + 1e-12) {
                    violations += 1;
                    if worst.is_none_or(|w| lhs - rhs > w.lhs - w.rhs) {
                        worst = Some(PremiseViolation {
                            vertex: x,
                            cylinder: c,
                            node: m,
                            lhs,
                            rhs,
                        });
                    }
                }
            }
        }
    }
    let k = kernel_from_symbol(ctx, sigma)?;
    let op = operator_norm(&k);
    let vn = v.norm2();
    Ok(L2BoundReport {
        constant,
        premise_holds: violations == 0,
        worst_violation: worst,
        violations,
        operator_norm: op,
        v_norm: vn,
        measured_constant: if vn > 0.0 { op / vn } else { f64::INFINITY },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SeededRng;

    fn random_kernel(n: usize, seed: u64) -> KernelMatrix {
        let mut rng = SeededRng::new(seed);
        KernelMatrix {
            n,
            data: (0..n * n).map(|_| rng.complex()).collect(),
        }
    }

    #[test]
    fn schatten_examples() {
        let n = 6;
        let rank_one = KernelMatrix::from_fn(n, |x, y| Complex64::new(if x == 1 && y == 4 { 1.0 } else { 0.0 }, 0.0));
        for r in [0.5, 1.0, 2.0, 3.0] {
            assert!((schatten_norm(&rank_one, r).unwrap() - 1.0).abs() < 1e-14);
        }
        assert_eq!(hs_norm_via_kernel(&rank_one), 1.0);
        let diag = KernelMatrix::from_fn(2, |x, y| Complex64::new(if x == y { 3.0 + x as f64 } else { 0.0 }, 0.0));
        assert!((schatten_norm(&diag, 1.0).unwrap() - 7.0).abs() < 1e-13);
        assert_eq!(hs_norm_via_kernel(&KernelMatrix::zeros(4)), 0.0);
        assert!(schatten_norm(&diag, 0.0).is_err());
        assert!(schatten_norm(&diag, -1.0).is_err());
    }

    #[test]
    fn frobenius_matches_singular_values() {
        let k = random_kernel(20, 3);
        let s = singular_values(&k);
        assert!(s.windows(2).all(|w| w[0] >= w[1]) && s.iter().all(|&v| v >= 0.0));
        let l2 = s.iter().map(|v| v * v).sum::<f64>().sqrt();
        assert!((l2 - k.frobenius()).abs() <= 1e-10 * k.frobenius());
        assert!((schatten_norm(&k, 2.0).unwrap() - k.frobenius()).abs() <= 1e-10 * k.frobenius());
    }

    #[test]
    fn lemma_residuals() {
        let k = random_kernel(15, 5);
        assert_eq!(lemma_schatten_power_check(&k, 1.5, 1.5).unwrap(), 0.0);
        for (r, t) in [(2.0 / 3.0, 2.0), (1.0, 2.0), (2.0, 1.0)] {
            assert!(lemma_schatten_power_check(&k, r, t).unwrap() <= 1e-8);
        }
        assert_eq!(lemma_schatten_power_check(&KernelMatrix::zeros(5), 2.0 / 3.0, 2.0).unwrap(), 0.0);
        assert!(lemma_schatten_power_check(&k, 0.0, 1.0).is_err());
        assert!(lemma_schatten_power_check(&k, 1.0, -2.0).is_err());
    }

    #[test]
    fn residual_examples() {
        let k = random_kernel(8, 9);
        let herm = KernelMatrix::from_fn(8, |x, y| k.get(x, y) + k.get(y, x).conj());
        assert!(selfadjoint_residual(&herm) == 0.0);
        let rank_one = KernelMatrix::from_fn(8, |x, y| Complex64::new(if x == 2 && y == 5 { 1.0 } else { 0.0 }, 0.0));
        assert_eq!(selfadjoint_residual(&rank_one), 1.0);
        let perm = KernelMatrix::from_fn(8, |x, y| Complex64::new(if y == (x + 3) % 8 { 1.0 } else { 0.0 }, 0.0));
        assert!(normal_residual(&perm) <= 1e-12);
        assert!(normal_residual(&rank_one) > 0.5);
    }

    #[test]
    fn power_iteration_matches_top_singular_value() {
        let k = random_kernel(12, 17);
        let s = singular_values(&k);
        assert!((operator_norm(&k) - s[0]).abs() <= 1e-6 * s[0]);
        assert_eq!(operator_norm(&KernelMatrix::zeros(3)), 0.0);
    }
}
