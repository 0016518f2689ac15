//! Distribution functions and L^p / weak-L^p norms for the counting measure
//! on the ball, and executable forms of the weak-type boundedness theorems.
//!
//! Exponents of Lebesgue spaces are called `p`, `q_exp` and `r`; `q` is
//! reserved for the tree degree.
//!
//! Weak constants are relative to a concrete family of test functions: the
//! reported `C` is the smallest constant for which the weak-type inequality
//! holds on that family.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::psdo::KernelMatrix;
use crate::transform::TreeFunction;

/// Remainder bound at which the `sum k^q/(k-1)^r` series is truncated.
pub const SERIES_TOLERANCE: f64 = 1e-12;

/// Relative slack on the floating comparisons `lhs <= bound`.
const ROUNDING_SLACK: f64 = 1e-12;

/// Absolute slack on `max |Kf| <= 2C`.
pub const INTERMEDIATE_SLACK: f64 = 1e-9;

fn exponent(name: &'static str, constraint: &'static str, value: f64, ok: bool) -> Result<()> {
    if ok && !value.is_nan() {
        Ok(())
    } else {
        Err(Error::Exponent { name, constraint, value })
    }
}

/// `m(lambda) = #{x : |f(x)| > lambda}` for a fixed function.
#[derive(Debug, Clone, PartialEq)]
pub struct DistributionProfile {
    /// `|f(x)|` sorted ascending.
    sorted: Vec<f64>,
}

impl DistributionProfile {
    pub fn new(f: &TreeFunction) -> Self {
        let mut sorted: Vec<f64> = f.values.iter().map(|v| v.norm()).collect();
        sorted.sort_by(f64::total_cmp);
        DistributionProfile { sorted }
    }

    pub fn sorted_abs(&self) -> &[f64] {
        &self.sorted
    }

    pub fn max(&self) -> f64 {
        self.sorted.last().copied().unwrap_or(0.0)
    }

    pub fn m(&self, lambda: f64) -> usize {
        self.sorted.len() - self.sorted.partition_point(|&v| v <= lambda)
    }

    /// `p * int_0^inf lambda^{p-1} m(lambda) d lambda`, summed exactly between breakpoints.
    ///
    /// On `[a_{i-1}, a_i)` (ascending breakpoints, `a_0 = 0`) the count is
    /// the number of values `>= a_i`, and the integral is `m (a_i^p - a_{i-1}^p)`.
    pub fn layercake(&self, p: f64) -> f64 {
        let n = self.sorted.len();
        let mut total = 0.0;
        let mut prev = 0.0f64;
        let mut i = 0;
        while i < n {
            let a = self.sorted[i];
            if a > prev {
                total += (n - i) as f64 * (a.powf(p) - prev.powf(p));
                prev = a;
            }
            i += 1;
        }
        total
    }

    /// `sup_lambda lambda m(lambda)^{1/q_exp}`: the max over descending values `b_k` of `b_k k^{1/q_exp}`.
    pub fn weak(&self, q_exp: f64) -> f64 {
        self.sorted
            .iter()
            .rev()
            .enumerate()
            .map(|(k, &b)| b * ((k + 1) as f64).powf(1.0 / q_exp))
            .fold(0.0, f64::max)
    }
}

fn lp_unchecked(f: &TreeFunction, p: f64) -> f64 {
    if p.is_infinite() {
        return f.max_abs();
    }
    f.values.iter().map(|v| v.norm().powf(p)).sum::<f64>().powf(1.0 / p)
}

/// `(sum |f|^p)^{1/p}`; `p = inf` gives the max norm.
pub fn lp_norm(f: &TreeFunction, p: f64) -> Result<f64> {
    exponent("p", "p >= 1", p, p >= 1.0)?;
    Ok(lp_unchecked(f, p))
}

/// `| sum |f|^p - layer-cake integral |`.
pub fn layercake_residual(f: &TreeFunction, p: f64) -> Result<f64> {
    exponent("p", "1 <= p < inf", p, p >= 1.0 && p.is_finite())?;
    let direct: f64 = f.values.iter().map(|v| v.norm().powf(p)).sum();
    Ok((direct - DistributionProfile::new(f).layercake(p)).abs())
}

pub fn weak_norm(f: &TreeFunction, q_exp: f64) -> Result<f64> {
    exponent("q_exp", "q_exp >= 1", q_exp, q_exp >= 1.0)?;
    Ok(DistributionProfile::new(f).weak(q_exp))
}

fn check_family(k: &KernelMatrix, family: &[TreeFunction]) -> Result<()> {
    if family.is_empty() {
        return Err(Error::EmptyFamily);
    }
    for (index, f) in family.iter().enumerate() {
        if f.len() != k.n {
            return Err(Error::Dimension {
                what: "family function",
                expected: k.n,
                got: f.len(),
            });
        }
        if f.values.iter().all(|v| *v == Complex64::new(0.0, 0.0)) {
            return Err(Error::ZeroFunction { index });
        }
    }
    Ok(())
}

/// Per-function data shared by the weak-type checks.
struct Measured {
    f_norm: f64,
    image: TreeFunction,
    weak_ratio: f64,
}

fn measure(exec: Exec, k: &KernelMatrix, p: f64, q_exp: f64, family: &[TreeFunction]) -> Vec<Measured> {
    exec.map(family.len(), |i| {
        let f = &family[i];
        let f_norm = lp_unchecked(f, p);
        let image = k.apply(f);
        let weak_ratio = DistributionProfile::new(&image).weak(q_exp) / f_norm;
        Measured {
            f_norm,
            image,
            weak_ratio,
        }
    })
}

/// Smallest `C` with `#{|Kf| > lambda} <= (C ||f||_p / lambda)^{q_exp}` on the family.
pub fn weak_constant(exec: Exec, k: &KernelMatrix, p: f64, q_exp: f64, family: &[TreeFunction]) -> Result<f64> {
    exponent("p", "p >= 1", p, p >= 1.0)?;
    exponent("q_exp", "q_exp >= 1", q_exp, q_exp >= 1.0)?;
    check_family(k, family)?;
    Ok(measure(exec, k, p, q_exp, family)
        .iter()
        .map(|m| m.weak_ratio)
        .fold(0.0, f64::max))
}

/// `2^{(p-q)/p} C (p/(p-q))^{1/p}`.
pub fn strong_type_constant(p: f64, q_exp: f64, c: f64) -> f64 {
    2f64.powf((p - q_exp) / p) * c * (p / (p - q_exp)).powf(1.0 / p)
}

/// `C^{q/r} (S + (2C)^r)^{1/r}` with `S = sum_{k>=2} k^q / (k-1)^r`.
pub fn lr_constant(q_exp: f64, r: f64, c: f64) -> Result<f64> {
    let s = weak_series(q_exp, r)?;
    Ok(c.powf(q_exp / r) * (s + (2.0 * c).powf(r)).powf(1.0 / r))
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeakTypeReport {
    pub p: f64,
    pub q_exp: f64,
    /// Target exponent of the `L^p -> L^r` bound, when checked.
    pub r: Option<f64>,
    pub weak_constant: f64,
    /// `||Kf||` in the target norm (`p` or `r`), one per family member.
    pub strong_norms: Vec<f64>,
    /// `sum_{k>=2} k^q/(k-1)^r`, when checked.
    pub series: Option<f64>,
    pub theorem_constant: f64,
    /// `max ||Kf|| / ||f||_p`.
    pub worst_ratio: f64,
    pub worst_index: usize,
    /// `max_x |Kf(x)|` over the normalized family, when checked.
    pub intermediate_max: Option<f64>,
    pub pass: bool,
}

fn worst(ratios: &[f64]) -> (f64, usize) {
    ratios
        .iter()
        .enumerate()
        .fold((0.0, 0), |(best, at), (i, &r)| if r > best { (r, i) } else { (best, at) })
}

/// Checks `||Kf||_p <= 2^{(p-q)/p} C (p/(p-q))^{1/p} ||f||_p` on the family, `C` measured on the same family.
pub fn strong_type_check(
    exec: Exec,
    k: &KernelMatrix,
    p: f64,
    q_exp: f64,
    family: &[TreeFunction],
) -> Result<WeakTypeReport> {
    exponent("q_exp", "q_exp >= 1", q_exp, q_exp >= 1.0)?;
    exponent("p", "p > q_exp", p, p > q_exp && p.is_finite())?;
    check_family(k, family)?;
    let measured = measure(exec, k, p, q_exp, family);
    let c = measured.iter().map(|m| m.weak_ratio).fold(0.0, f64::max);
    let bound = strong_type_constant(p, q_exp, c);
    let strong_norms: Vec<f64> = measured.iter().map(|m| lp_unchecked(&m.image, p)).collect();
    let ratios: Vec<f64> = strong_norms.iter().zip(&measured).map(|(s, m)| s / m.f_norm).collect();
    let (worst_ratio, worst_index) = worst(&ratios);
    Ok(WeakTypeReport {
        p,
        q_exp,
        r: None,
        weak_constant: c,
        strong_norms,
        series: None,
        theorem_constant: bound,
        worst_ratio,
        worst_index,
        intermediate_max: None,
        pass: worst_ratio <= bound * (1.0 + ROUNDING_SLACK),
    })
}

/// Checks `||Kf||_r <= C^{q/r} (S + (2C)^r)^{1/r}` for the family scaled to `||f||_p = 1`,
/// together with the pointwise step `|Kf| <= 2C`.
pub fn lr_embedding_check(
    exec: Exec,
    k: &KernelMatrix,
    p: f64,
    q_exp: f64,
    r: f64,
    family: &[TreeFunction],
) -> Result<WeakTypeReport> {
    exponent("p", "p >= 1", p, p >= 1.0)?;
    exponent("q_exp", "q_exp >= 1", q_exp, q_exp >= 1.0)?;
    exponent("r", "r > q_exp + 1", r, r > q_exp + 1.0 && r.is_finite())?;
    check_family(k, family)?;
    let normalized: Vec<TreeFunction> = family
        .iter()
        .map(|f| f.scale(Complex64::new(1.0 / lp_unchecked(f, p), 0.0)))
        .collect();
    let measured = measure(exec, k, p, q_exp, &normalized);
    let c = measured.iter().map(|m| m.weak_ratio).fold(0.0, f64::max);
    let series = weak_series(q_exp, r)?;
    let bound = c.powf(q_exp / r) * (series + (2.0 * c).powf(r)).powf(1.0 / r);
    let strong_norms: Vec<f64> = measured.iter().map(|m| lp_unchecked(&m.image, r)).collect();
    let (worst_ratio, worst_index) = worst(&strong_norms);
    let intermediate = measured.iter().map(|m| m.image.max_abs()).fold(0.0, f64::max);
    let pass = worst_ratio <= bound * (1.0 + ROUNDING_SLACK) && intermediate <= 2.0 * c + INTERMEDIATE_SLACK;
    Ok(WeakTypeReport {
        p,
        q_exp,
        r: Some(r),
        weak_constant: c,
        strong_norms,
        series: Some(series),
        theorem_constant: bound,
        worst_ratio,
        worst_index,
        intermediate_max: Some(intermediate),
        pass,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct KernelBoundReport {
    pub p: f64,
    /// Dual exponent `p / (p - 1)`.
    pub q_exp: f64,
    /// `(sum_{x,y} |K(x,y)|^{q_exp})^{1/q_exp}`.
    pub bound: f64,
    /// `||Kf||_{q_exp} / ||f||_p`, one per family member.
    pub ratios: Vec<f64>,
    pub max_ratio: f64,
    pub worst_index: usize,
    /// `bound - max_ratio`.
    pub margin: f64,
    pub pass: bool,
}

/// Checks `||Kf||_{q} <= (sum |K|^q)^{1/q} ||f||_p`, `1/p + 1/q = 1`, `p > 2`.
pub fn kernel_lq_bound_check(exec: Exec, k: &KernelMatrix, p: f64, family: &[TreeFunction]) -> Result<KernelBoundReport> {
    exponent("p", "2 < p < inf", p, p > 2.0 && p.is_finite())?;
    check_family(k, family)?;
    let q_exp = p / (p - 1.0);
    let bound = k.data.iter().map(|v| v.norm().powf(q_exp)).sum::<f64>().powf(1.0 / q_exp);
    let ratios = exec.map(family.len(), |i| {
        let f = &family[i];
        lp_unchecked(&k.apply(f), q_exp) / lp_unchecked(f, p)
    });
    let (max_ratio, worst_index) = worst(&ratios);
    Ok(KernelBoundReport {
        p,
        q_exp,
        bound,
        ratios,
        max_ratio,
        worst_index,
        margin: bound - max_ratio,
        pass: max_ratio <= bound * (1.0 + ROUNDING_SLACK),
    })
}

/// `sum_{k>=2} k^q / (k-1)^r` for `r > q + 1`.
///
/// With `j = k - 1` the sum is `2^q + sum_{j>=2} j^{q-r} (1 + 1/j)^q`. Expanding
/// `(1 + 1/j)^q` binomially (convergent since `1/j <= 1/2`) gives
/// `2^q + sum_i binom(q, i) (zeta(r - q + i) - 1)`, whose terms decay like `2^{-i}`.
pub fn weak_series(q_exp: f64, r: f64) -> Result<f64> {
    exponent("r", "r > q_exp + 1", r, r > q_exp + 1.0 && r.is_finite() && q_exp.is_finite())?;
    let s0 = r - q_exp;
    let mut total = 2f64.powf(q_exp);
    let mut binom = 1.0f64;
    for i in 0.. {
        let s = s0 + i as f64;
        total += binom * zeta_minus_one(s);
        let next = binom * (q_exp - i as f64) / (i as f64 + 1.0);
        // Once |binom| is nonincreasing, the remainder is at most
        // |binom_{i+1}| sum_{l>=0} (zeta(s+1+l) - 1) <= |binom_{i+1}| 2 (zeta(s+1) - 1).
        let shrinking = (q_exp - i as f64).abs() <= i as f64 + 1.0;
        if next == 0.0 || (shrinking && 2.0 * next.abs() * zeta_minus_one(s + 1.0) < SERIES_TOLERANCE * 1e-4) {
            break;
        }
        binom = next;
    }
    Ok(total)
}

/// `zeta(s) - 1` for real `s > 1`, by Euler-Maclaurin after `N - 1` explicit terms.
pub fn zeta_minus_one(s: f64) -> f64 {
    // B_2, B_4, ..., B_16 divided by (2j)!.
    const B_OVER_FACT: [f64; 8] = [
        1.0 / 12.0,
        -1.0 / 720.0,
        1.0 / 30240.0,
        -1.0 / 1209600.0,
        1.0 / 47900160.0,
        -691.0 / 1307674368000.0,
        1.0 / 74724249600.0,
        -3617.0 / 10670622842880000.0,
    ];
    const N: f64 = 16.0;
    let mut total = 0.0;
    for n in 2..N as usize {
        total += (n as f64).powf(-s);
    }
    let tail_head = N.powf(-s);
    total += N * tail_head / (s - 1.0) + 0.5 * tail_head;
    // s (s+1) ... (s + 2j - 2) N^{-s-2j+1}
    let mut rising = s;
    let mut power = tail_head / N;
    for (j, b) in B_OVER_FACT.iter().enumerate() {
        total += b * rising * power;
        let base = s + 2.0 * j as f64;
        rising *= (base + 1.0) * (base + 2.0);
        power /= N * N;
    }
    total
}
