//! The acceptance suite: every identity of the toolkit checked against an
//! independent oracle on seeded data.
//!
//! Each check draws its data from its own stream of the configured seed
//! (see [`crate::rng`]), so checks can be run alone or reordered without
//! changing their inputs.

use std::time::Instant;

use anyhow::Context as _;
use num_complex::Complex64;

use super::config::RunConfig;
use super::report::{sha256_hex, Report, ReportSet};
use crate::context::Context;
use crate::exec::Exec;
use crate::lp;
use crate::psdo::{
    adjoint_symbol, adjoint_symbol_direct, apply, hs_norm_via_b, kernel_from_symbol, lemma_schatten_power_check,
    operator_report, product_symbol, schatten_norm, symbol_from_decomposition, trace_via_symbol, GridSymbol,
    KernelMatrix, NuclearDecomposition,
};
use crate::rng::SeededRng;
use crate::spectral::{c_function, tau, SpectralGrid};
use crate::transform::{fh_forward, fh_inverse, plancherel_pairing, TreeFunction};

pub const TRANSFORM_SAMPLES: usize = 20;
pub const DECOMPOSITIONS: usize = 10;
pub const DECOMPOSITION_RANKS: [usize; 3] = [1, 3, 8];
pub const SCHATTEN_KERNELS: usize = 10;
pub const SCHATTEN_PAIRS: [(f64, f64); 3] = [(2.0 / 3.0, 2.0), (1.0, 2.0), (2.0, 1.0)];
pub const LAYERCAKE_EXPONENTS: [f64; 3] = [1.0, 2.0, 3.5];
pub const WEAK_FAMILY: usize = 50;
pub const STRONG_EXPONENTS: [(f64, f64); 2] = [(2.0, 1.0), (3.0, 2.0)];
pub const LR_EXPONENTS: (f64, f64, f64) = (2.0, 1.0, 3.0);
pub const LQ_FAMILY: usize = 100;
pub const LQ_EXPONENT: f64 = 4.0;
pub const C_FUNCTION_DEGREES: [usize; 3] = [2, 3, 5];
/// Traces smaller than this are compared in absolute terms.
pub const TRACE_FLOOR: f64 = 1e-2;

/// Stream numbers of the seeded generator, one per data family.
mod stream {
    pub const ROUND_TRIP: u64 = 3;
    pub const PLANCHEREL: u64 = 4;
    pub const DECOMPOSITIONS: u64 = 5;
    pub const PRODUCT: u64 = 9;
    pub const SCHATTEN: u64 = 10;
    pub const LAYERCAKE: u64 = 11;
    pub const WEAK_KERNEL: u64 = 12;
    pub const WEAK_FAMILY: u64 = 13;
    pub const LQ_FAMILY: u64 = 14;
}

pub fn anchor(check: &str) -> &'static str {
    match check {
        "plancherel_mass" => "fh.inversion-at-root",
        "c_function" => "spectral.c-function",
        "round_trip" => "fh.inversion",
        "plancherel_identity" => "fh.plancherel",
        "nuclear_kernel" => "psdo.nuclear-kernel",
        "kernel_apply" => "psdo.kernel",
        "hs_equality" => "psdo.hilbert-schmidt",
        "trace" => "psdo.nuclear-trace",
        "adjoint" => "psdo.adjoint",
        "product" => "psdo.product",
        "schatten_hs" => "psdo.schatten-two",
        "schatten_power" => "psdo.schatten-power",
        "layercake" => "lp.layer-cake",
        "strong_type" => "lp.weak-to-strong",
        "lr_embedding" => "lp.weak-to-lr",
        "intermediate_bound" => "lp.weak-to-lr.pointwise",
        "kernel_lq" => "lp.kernel-lq",
        "kernel_lq_tight" => "lp.kernel-lq",
        _ => "unanchored",
    }
}

/// New report for `check` with anchor, input digest and configured tolerance.
pub fn start(cfg: &RunConfig, check: &str, extra: &str) -> Report {
    let digest = sha256_hex(&format!("{}check={check}\n{extra}", cfg.canonical()));
    Report::new(check, anchor(check), &digest)
}

fn timed(f: impl FnOnce() -> anyhow::Result<Report>) -> anyhow::Result<Report> {
    let t = Instant::now();
    let mut r = f()?;
    r.wall_time = t.elapsed();
    Ok(r)
}

pub fn random_decomposition(rng: &mut SeededRng, n: usize, rank: usize) -> NuclearDecomposition {
    NuclearDecomposition::new((0..rank).map(|_| (rng.tree_function(n), rng.tree_function(n))).collect())
}

/// The decomposition family shared by the kernel, norm, trace and adjoint checks.
pub fn decomposition_family(cfg: &RunConfig, n: usize) -> Vec<NuclearDecomposition> {
    let mut rng = SeededRng::with_stream(cfg.seed, stream::DECOMPOSITIONS);
    (0..DECOMPOSITIONS)
        .map(|i| random_decomposition(&mut rng, n, DECOMPOSITION_RANKS[i % DECOMPOSITION_RANKS.len()]))
        .collect()
}

fn argmax(v: &[f64]) -> (f64, usize) {
    v.iter()
        .enumerate()
        .fold((0.0, 0), |(b, at), (i, &x)| if x > b || x.is_nan() { (x, i) } else { (b, at) })
}

pub fn check_plancherel_mass(cfg: &RunConfig, ctx: &Context) -> anyhow::Result<Report> {
    let err = (ctx.grid().total_mass() - 1.0).abs();
    let mut r = start(cfg, "plancherel_mass", "")
        .value("mass", ctx.grid().total_mass())
        .value("nodes", ctx.nodes());
    // The error must also drop strictly when M/2 nodes are doubled to M.
    let mut decreasing = true;
    let mut err_half = f64::NAN;
    if ctx.nodes() >= 4 {
        let half = SpectralGrid::new(ctx.q(), ctx.nodes() / 2)?;
        err_half = (half.total_mass() - 1.0).abs();
        decreasing = err < err_half;
        r = r.value("mass_half_nodes", half.total_mass()).value("half_nodes", ctx.nodes() / 2);
    }
    let r = r.judge(err, cfg.tolerances.get("plancherel_mass")).require(decreasing);
    Ok(if decreasing {
        r
    } else {
        r.witness(format!(
            "error did not decrease from M/2 to M: {} -> {}",
            super::report::fmt_f64(err_half),
            super::report::fmt_f64(err)
        ))
    })
}

pub fn check_c_function(cfg: &RunConfig) -> anyhow::Result<Report> {
    let mut degrees = C_FUNCTION_DEGREES.to_vec();
    if !degrees.contains(&cfg.q) {
        degrees.push(cfg.q);
    }
    let mut r = start(cfg, "c_function", "");
    let mut residuals = Vec::new();
    for &q in &degrees {
        let v = c_function(q, Complex64::new(tau(q) / 2.0, 0.0))?;
        residuals.push((v - 0.5).norm());
        r = r.value(&format!("c_mid_q{q}"), v);
    }
    let (res, at) = argmax(&residuals);
    Ok(r.judge(res, cfg.tolerances.get("c_function")).witness(format!("q={}", degrees[at])))
}

pub fn check_round_trip(cfg: &RunConfig, ctx: &Context) -> anyhow::Result<Report> {
    let mut rng = SeededRng::with_stream(cfg.seed, stream::ROUND_TRIP);
    let mut res = Vec::new();
    for f in rng.family(ctx.vertices(), TRANSFORM_SAMPLES) {
        let back = fh_inverse(ctx, &fh_forward(ctx, &f)?)?;
        res.push(back.axpy(Complex64::new(-1.0, 0.0), &f).max_abs() / f.max_abs());
    }
    let (worst, at) = argmax(&res);
    Ok(start(cfg, "round_trip", "")
        .value("samples", res.len())
        .value("relative_errors", res)
        .judge(worst, cfg.tolerances.get("round_trip"))
        .witness(format!("sample {at}")))
}

pub fn check_plancherel_identity(cfg: &RunConfig, ctx: &Context) -> anyhow::Result<Report> {
    let mut rng = SeededRng::with_stream(cfg.seed, stream::PLANCHEREL);
    let n = ctx.vertices();
    let mut res = Vec::new();
    for _ in 0..TRANSFORM_SAMPLES {
        let (f, g) = (rng.tree_function(n), rng.tree_function(n));
        let lhs = plancherel_pairing(ctx, &fh_forward(ctx, &f)?, &fh_forward(ctx, &g)?)?;
        res.push((lhs - f.inner(&g)).norm() / (f.norm2() * g.norm2()));
    }
    let (worst, at) = argmax(&res);
    Ok(start(cfg, "plancherel_identity", "")
        .value("relative_errors", res)
        .judge(worst, cfg.tolerances.get("plancherel_identity"))
        .witness(format!("pair {at}")))
}

/// `max |K - sum f_k ⊗ g_k| / max |sum f_k ⊗ g_k|` over the decompositions.
pub fn check_nuclear_kernel(cfg: &RunConfig, ctx: &Context, decs: &[NuclearDecomposition], extra: &str) -> anyhow::Result<Report> {
    let n = ctx.vertices();
    let mut res = Vec::new();
    for d in decs {
        let k = kernel_from_symbol(ctx, &symbol_from_decomposition(ctx, d)?)?;
        let oracle = d.outer_product_kernel(n);
        let scale = oracle.max_abs();
        res.push(if scale > 0.0 { k.max_abs_diff(&oracle) / scale } else { k.max_abs() });
    }
    let (worst, at) = argmax(&res);
    Ok(start(cfg, "nuclear_kernel", extra)
        .value("relative_errors", res)
        .judge(worst, cfg.tolerances.get("nuclear_kernel"))
        .witness(format!("decomposition {at}")))
}

/// `T_sigma f` through the transform against `K f`, plus the operator summary of `K`.
pub fn check_kernel_apply(cfg: &RunConfig, ctx: &Context, sigma: &GridSymbol, extra: &str) -> anyhow::Result<Report> {
    let f = SeededRng::new(cfg.seed).tree_function(ctx.vertices());
    let direct = apply(ctx, sigma, &f)?;
    let k = kernel_from_symbol(ctx, sigma)?;
    let via_k = k.apply(&f);
    let scale = via_k.max_abs().max(f64::MIN_POSITIVE);
    let err = direct.axpy(Complex64::new(-1.0, 0.0), &via_k).max_abs() / scale;
    let op = operator_report(ctx, sigma, &[1.0, 2.0])?;
    Ok(start(cfg, "kernel_apply", extra)
        .value("frobenius", op.frobenius)
        .value("hs_via_b", hs_norm_via_b(ctx, sigma)?)
        .value("operator_norm", op.operator_norm)
        .value("trace_via_symbol", op.trace_via_symbol)
        .value("trace_via_kernel", op.trace_via_kernel)
        .value("selfadjoint_residual", op.selfadjoint_residual)
        .value("normal_residual", op.normal_residual)
        .value("singular_values", op.singular_values)
        .judge(err, cfg.tolerances.get("kernel_apply")))
}

pub fn check_hs_equality(cfg: &RunConfig, ctx: &Context, decs: &[NuclearDecomposition], extra: &str) -> anyhow::Result<Report> {
    let n = ctx.vertices();
    let (mut res, mut via_b, mut frob) = (Vec::new(), Vec::new(), Vec::new());
    for d in decs {
        let b = hs_norm_via_b(ctx, &symbol_from_decomposition(ctx, d)?)?;
        let f = d.outer_product_kernel(n).frobenius();
        res.push(if f > 0.0 { (b - f).abs() / f } else { b });
        via_b.push(b);
        frob.push(f);
    }
    let (worst, at) = argmax(&res);
    Ok(start(cfg, "hs_equality", extra)
        .value("hs_via_b", via_b)
        .value("frobenius_oracle", frob)
        .judge(worst, cfg.tolerances.get("hs_equality"))
        .witness(format!("decomposition {at}")))
}

/// Symbol, kernel and nuclear traces, compared relative to `max(|nuclear trace|, TRACE_FLOOR)`.
pub fn check_trace(cfg: &RunConfig, ctx: &Context, decs: &[NuclearDecomposition], extra: &str) -> anyhow::Result<Report> {
    let mut res = Vec::new();
    let mut r = start(cfg, "trace", extra);
    for (i, d) in decs.iter().enumerate() {
        let sigma = symbol_from_decomposition(ctx, d)?;
        let ts = trace_via_symbol(ctx, &sigma)?;
        let tk = kernel_from_symbol(ctx, &sigma)?.trace();
        let tn = d.trace();
        let diff = (ts - tn).norm().max((tk - tn).norm());
        res.push(diff / tn.norm().max(TRACE_FLOOR));
        r = r.value(&format!("trace_{i:02}_symbol"), ts).value(&format!("trace_{i:02}_kernel"), tk).value(&format!("trace_{i:02}_nuclear"), tn);
    }
    let (worst, at) = argmax(&res);
    Ok(r.value("normalized_errors", res).judge(worst, cfg.tolerances.get("trace")).witness(format!("decomposition {at}")))
}

/// Both adjoint formulas against `K^H`, and against each other.
pub fn check_adjoint(cfg: &RunConfig, ctx: &Context, decs: &[NuclearDecomposition], extra: &str) -> anyhow::Result<Report> {
    let (mut via_dec, mut via_direct, mut agree) = (Vec::new(), Vec::new(), Vec::new());
    for d in decs {
        let sigma = symbol_from_decomposition(ctx, d)?;
        let kh = kernel_from_symbol(ctx, &sigma)?.conj_transpose();
        let a = adjoint_symbol(ctx, d)?;
        let b = adjoint_symbol_direct(ctx, &sigma)?;
        via_dec.push(kernel_from_symbol(ctx, &a)?.max_abs_diff(&kh));
        via_direct.push(kernel_from_symbol(ctx, &b)?.max_abs_diff(&kh));
        agree.push(a.max_abs_diff(&b));
    }
    let all: Vec<f64> = via_dec.iter().chain(&via_direct).chain(&agree).copied().collect();
    let (worst, at) = argmax(&all);
    let which = ["decomposition formula", "direct formula", "formula agreement"][at / decs.len().max(1)];
    Ok(start(cfg, "adjoint", extra)
        .value("kernel_error_decomposition", via_dec)
        .value("kernel_error_direct", via_direct)
        .value("symbol_disagreement", agree)
        .judge(worst, cfg.tolerances.get("adjoint"))
        .witness(format!("{which}, decomposition {}", at % decs.len().max(1))))
}

/// The seeded `(eta, sigma)` pairs; the last uses the identity decomposition for `eta`.
pub fn product_family(cfg: &RunConfig, n: usize) -> Vec<(NuclearDecomposition, NuclearDecomposition)> {
    let mut rng = SeededRng::with_stream(cfg.seed, stream::PRODUCT);
    let mut pairs: Vec<_> = (0..DECOMPOSITIONS - 1)
        .map(|i| {
            let eta = random_decomposition(&mut rng, n, DECOMPOSITION_RANKS[i % 3]);
            let sigma = random_decomposition(&mut rng, n, DECOMPOSITION_RANKS[(i + 1) % 3]);
            (eta, sigma)
        })
        .collect();
    pairs.push((NuclearDecomposition::identity(n), random_decomposition(&mut rng, n, 3)));
    pairs
}

/// `max |K_lambda - K_eta K_sigma|` with exact outer-product kernels on the right.
pub fn check_product(
    cfg: &RunConfig,
    ctx: &Context,
    pairs: &[(NuclearDecomposition, NuclearDecomposition)],
    extra: &str,
) -> anyhow::Result<Report> {
    let n = ctx.vertices();
    let mut res = Vec::new();
    for (eta, sigma) in pairs {
        let lambda = product_symbol(ctx, eta, sigma)?;
        let oracle = eta.outer_product_kernel(n).matmul(&sigma.outer_product_kernel(n));
        res.push(kernel_from_symbol(ctx, &lambda)?.max_abs_diff(&oracle));
    }
    let (worst, at) = argmax(&res);
    Ok(start(cfg, "product", extra)
        .value("kernel_errors", res)
        .judge(worst, cfg.tolerances.get("product"))
        .witness(format!("pair {at}")))
}

pub fn schatten_family(cfg: &RunConfig, n: usize) -> Vec<KernelMatrix> {
    let mut rng = SeededRng::with_stream(cfg.seed, stream::SCHATTEN);
    (0..SCHATTEN_KERNELS)
        .map(|_| KernelMatrix {
            n,
            data: (0..n * n).map(|_| rng.complex()).collect(),
        })
        .collect()
}

/// `| ||K||_{S_2} - ||K||_F | / ||K||_F`.
pub fn check_schatten_hs(cfg: &RunConfig, kernels: &[KernelMatrix], extra: &str) -> anyhow::Result<Report> {
    let mut res = Vec::new();
    for k in kernels {
        let f = k.frobenius();
        let s2 = schatten_norm(k, 2.0)?;
        res.push(if f > 0.0 { (s2 - f).abs() / f } else { s2 });
    }
    let (worst, at) = argmax(&res);
    Ok(start(cfg, "schatten_hs", extra)
        .value("relative_errors", res)
        .judge(worst, cfg.tolerances.get("schatten_hs"))
        .witness(format!("kernel {at}")))
}

pub fn check_schatten_power(cfg: &RunConfig, kernels: &[KernelMatrix], extra: &str) -> anyhow::Result<Report> {
    let mut res = Vec::new();
    for k in kernels {
        for &(r, t) in &SCHATTEN_PAIRS {
            res.push(lemma_schatten_power_check(k, r, t)?);
        }
    }
    let (worst, at) = argmax(&res);
    let (r, t) = SCHATTEN_PAIRS[at % SCHATTEN_PAIRS.len()];
    Ok(start(cfg, "schatten_power", extra)
        .value("residuals", res)
        .judge(worst, cfg.tolerances.get("schatten_power"))
        .witness(format!("kernel {}, r={r}, t={t}", at / SCHATTEN_PAIRS.len())))
}

pub fn check_layercake(cfg: &RunConfig, ctx: &Context) -> anyhow::Result<Report> {
    let mut rng = SeededRng::with_stream(cfg.seed, stream::LAYERCAKE);
    let mut res = Vec::new();
    for f in rng.family(ctx.vertices(), TRANSFORM_SAMPLES) {
        for p in LAYERCAKE_EXPONENTS {
            res.push(lp::layercake_residual(&f, p)? / lp::lp_norm(&f, p)?.powf(p));
        }
    }
    let (worst, at) = argmax(&res);
    Ok(start(cfg, "layercake", "")
        .value("relative_residuals", res)
        .judge(worst, cfg.tolerances.get("layercake"))
        .witness(format!("function {}, p={}", at / 3, LAYERCAKE_EXPONENTS[at % 3])))
}

/// Kernel of a seeded rank-3 decomposition symbol, the operator used by the weak-type checks.
pub fn weak_kernel(cfg: &RunConfig, ctx: &Context) -> anyhow::Result<KernelMatrix> {
    let mut rng = SeededRng::with_stream(cfg.seed, stream::WEAK_KERNEL);
    let d = random_decomposition(&mut rng, ctx.vertices(), 3);
    Ok(kernel_from_symbol(ctx, &symbol_from_decomposition(ctx, &d)?)?)
}

pub fn weak_family(cfg: &RunConfig, n: usize) -> Vec<TreeFunction> {
    SeededRng::with_stream(cfg.seed, stream::WEAK_FAMILY).family(n, WEAK_FAMILY)
}

pub fn lq_family(cfg: &RunConfig, n: usize) -> Vec<TreeFunction> {
    SeededRng::with_stream(cfg.seed, stream::LQ_FAMILY).family(n, LQ_FAMILY)
}

/// Residual of `lhs <= bound`: the relative excess, zero when the bound holds.
fn excess(lhs: f64, bound: f64) -> f64 {
    if bound > 0.0 {
        (lhs / bound - 1.0).max(0.0)
    } else {
        lhs
    }
}

pub fn check_strong_type(cfg: &RunConfig, exec: Exec, k: &KernelMatrix, family: &[TreeFunction], extra: &str) -> anyhow::Result<Report> {
    let mut r = start(cfg, "strong_type", extra);
    let mut res = Vec::new();
    for (p, q_exp) in STRONG_EXPONENTS {
        let rep = lp::strong_type_check(exec, k, p, q_exp, family)?;
        let tag = format!("p{p}_q{q_exp}");
        r = r
            .value(&format!("{tag}_weak_constant"), rep.weak_constant)
            .value(&format!("{tag}_theorem_constant"), rep.theorem_constant)
            .value(&format!("{tag}_worst_ratio"), rep.worst_ratio);
        res.push(excess(rep.worst_ratio, rep.theorem_constant));
    }
    let (worst, at) = argmax(&res);
    let (p, q_exp) = STRONG_EXPONENTS[at];
    Ok(r.judge(worst, cfg.tolerances.get("strong_type")).witness(format!("p={p}, q_exp={q_exp}")))
}

/// The `L^p -> L^r` theorem and its pointwise step `|Kf| <= 2C`, as two reports.
pub fn check_lr_embedding(
    cfg: &RunConfig,
    exec: Exec,
    k: &KernelMatrix,
    family: &[TreeFunction],
    extra: &str,
) -> anyhow::Result<(Report, Report)> {
    let (p, q_exp, r_exp) = LR_EXPONENTS;
    let rep = lp::lr_embedding_check(exec, k, p, q_exp, r_exp, family)?;
    let main = start(cfg, "lr_embedding", extra)
        .value("p", p)
        .value("q_exp", q_exp)
        .value("r", r_exp)
        .value("series", rep.series.unwrap_or(f64::NAN))
        .value("weak_constant", rep.weak_constant)
        .value("theorem_constant", rep.theorem_constant)
        .value("worst_norm", rep.worst_ratio)
        .judge(excess(rep.worst_ratio, rep.theorem_constant), cfg.tolerances.get("lr_embedding"))
        .witness(format!("function {}", rep.worst_index));
    let peak = rep.intermediate_max.unwrap_or(f64::NAN);
    let bound = 2.0 * rep.weak_constant;
    let pointwise = start(cfg, "intermediate_bound", extra)
        .value("max_abs_image", peak)
        .value("two_c", bound)
        .judge((peak - bound).max(0.0), cfg.tolerances.get("intermediate_bound"));
    Ok((main, pointwise))
}

pub fn check_kernel_lq(cfg: &RunConfig, exec: Exec, k: &KernelMatrix, family: &[TreeFunction], extra: &str) -> anyhow::Result<Report> {
    let rep = lp::kernel_lq_bound_check(exec, k, LQ_EXPONENT, family)?;
    Ok(start(cfg, "kernel_lq", extra)
        .value("p", rep.p)
        .value("bound", rep.bound)
        .value("max_ratio", rep.max_ratio)
        .value("margin", rep.margin)
        .judge(excess(rep.max_ratio, rep.bound), cfg.tolerances.get("kernel_lq"))
        .witness(format!("function {}", rep.worst_index)))
}

/// `delta_a ⊗ delta_b` applied to `delta_b`: ratio and bound are both 1.
pub fn check_kernel_lq_tight(cfg: &RunConfig, exec: Exec, n: usize) -> anyhow::Result<Report> {
    let (a, b) = (n / 2, n - 1);
    let k = NuclearDecomposition::delta_pair(n, a, b).outer_product_kernel(n);
    let rep = lp::kernel_lq_bound_check(exec, &k, LQ_EXPONENT, &[TreeFunction::delta(n, b)])?;
    let ratio = rep.max_ratio / rep.bound;
    Ok(start(cfg, "kernel_lq_tight", "")
        .value("bound", rep.bound)
        .value("max_ratio", rep.max_ratio)
        .judge((ratio - 1.0).abs(), cfg.tolerances.get("kernel_lq_tight"))
        .witness(format!("delta_{a} x delta_{b}")))
}

pub fn context(cfg: &RunConfig, exec: Exec) -> anyhow::Result<Context> {
    cfg.validate()?;
    Ok(Context::new(cfg.q, cfg.radius, cfg.depth(), cfg.nodes)
        .context("building the tree context")?
        .with_exec(exec))
}

/// Runs every check for `cfg`.
pub fn run_suite(cfg: &RunConfig, exec: Exec) -> anyhow::Result<ReportSet> {
    let ctx = context(cfg, exec)?;
    let n = ctx.vertices();
    let mut out = ReportSet::default();
    out.push(timed(|| check_plancherel_mass(cfg, &ctx))?);
    out.push(timed(|| check_c_function(cfg))?);
    out.push(timed(|| check_round_trip(cfg, &ctx))?);
    out.push(timed(|| check_plancherel_identity(cfg, &ctx))?);

    let decs = decomposition_family(cfg, n);
    out.push(timed(|| check_nuclear_kernel(cfg, &ctx, &decs, ""))?);
    let sigma = symbol_from_decomposition(&ctx, &decs[decs.len() - 1])?;
    out.push(timed(|| check_kernel_apply(cfg, &ctx, &sigma, ""))?);
    out.push(timed(|| check_hs_equality(cfg, &ctx, &decs, ""))?);
    let mut trace_decs = decs.clone();
    trace_decs.push(NuclearDecomposition::delta_pair(n, 1, n - 1));
    trace_decs.push(NuclearDecomposition::identity(n));
    out.push(timed(|| check_trace(cfg, &ctx, &trace_decs, ""))?);
    out.push(timed(|| check_adjoint(cfg, &ctx, &decs, ""))?);
    out.push(timed(|| check_product(cfg, &ctx, &product_family(cfg, n), ""))?);

    let kernels = schatten_family(cfg, n);
    out.push(timed(|| check_schatten_hs(cfg, &kernels, ""))?);
    out.push(timed(|| check_schatten_power(cfg, &kernels, ""))?);

    out.push(timed(|| check_layercake(cfg, &ctx))?);
    let k = weak_kernel(cfg, &ctx)?;
    let family = weak_family(cfg, n);
    out.push(timed(|| check_strong_type(cfg, exec, &k, &family, ""))?);
    let t = Instant::now();
    let (mut lr, mut pointwise) = check_lr_embedding(cfg, exec, &k, &family, "")?;
    lr.wall_time = t.elapsed();
    pointwise.wall_time = lr.wall_time;
    out.push(lr);
    out.push(pointwise);
    out.push(timed(|| check_kernel_lq(cfg, exec, &k, &lq_family(cfg, n), ""))?);
    out.push(timed(|| check_kernel_lq_tight(cfg, exec, n))?);
    Ok(out)
}
