use num_complex::Complex64;

use super::{GridSymbol, KernelMatrix, NuclearDecomposition, ZERO};
use crate::context::{Context, PowerTable};
use crate::error::Result;
use crate::transform::{fh_forward, SpectralFunction, TreeFunction};

/// Which character multiplies the column variable in [`assemble`].
#[derive(Clone, Copy)]
pub(crate) enum ColumnCharacter {
    /// `q^{(1/2 + is) h(y)}`
    Plus,
    /// `q^{(1/2 - is) h(y)}`
    Minus,
}

impl ColumnCharacter {
    fn table(self, p: &PowerTable, h: i32) -> &[Complex64] {
        match self {
            ColumnCharacter::Plus => p.plus(h),
            ColumnCharacter::Minus => p.minus(h),
        }
    }
}

/// `M(x, y) = sum_c nu sum_m w_m a(x, c, m) chi(h(y, c), m)` for a row integrand `a`.
///
/// `integrand(x, out)` writes `a(x, ., .)` row-major `[c][m]` into `out`.
/// The column character depends on `y` only through `h(y, c)`, so each row
/// first collapses `m` against every height and then reads the collapsed
/// table once per `(y, c)`.
pub(crate) fn assemble<F>(ctx: &Context, column: ColumnCharacter, integrand: F) -> KernelMatrix
where
    F: Fn(usize, &mut [Complex64]) + Sync + Send,
{
    let (n, cyl, nodes) = (ctx.vertices(), ctx.cylinders(), ctx.nodes());
    let hmax = ctx.heights().max_abs() as i32;
    let span = 2 * hmax as usize + 1;
    let w = ctx.grid().weights();
    let nu = ctx.nu();
    let mut k = KernelMatrix::zeros(n);
    ctx.exec().fill_chunks(&mut k.data, n, |x, out| {
        let mut a = vec![ZERO; cyl * nodes];
        integrand(x, &mut a);
        let mut collapsed = vec![ZERO; cyl * span];
        for c in 0..cyl {
            let ac = &a[c * nodes..(c + 1) * nodes];
            for (i, h) in (-hmax..=hmax).enumerate() {
                let chi = column.table(ctx.powers(), h);
                collapsed[c * span + i] = ac
                    .iter()
                    .zip(chi)
                    .zip(w)
                    .map(|((av, cv), wv)| av * cv * wv)
                    .sum::<Complex64>()
                    * nu;
            }
        }
        for (y, o) in out.iter_mut().enumerate() {
            *o = ctx
                .heights()
                .row(y)
                .iter()
                .enumerate()
                .map(|(c, &h)| collapsed[c * span + (h + hmax) as usize])
                .sum();
        }
    });
    k
}

/// `K(x, y) = sum_c nu sum_m w_m q^{(1/2 - is) h(x)} q^{(1/2 + is) h(y)} sigma(x, c, m)`.
pub fn kernel_from_symbol(ctx: &Context, sigma: &GridSymbol) -> Result<KernelMatrix> {
    sigma.check(ctx)?;
    let nodes = ctx.nodes();
    Ok(assemble(ctx, ColumnCharacter::Plus, |x, out| {
        let hs = ctx.heights().row(x);
        for (c, &h) in hs.iter().enumerate() {
            let p = ctx.powers().minus(h);
            let s = &sigma.row(x)[c * nodes..(c + 1) * nodes];
            for ((o, pv), sv) in out[c * nodes..(c + 1) * nodes].iter_mut().zip(p).zip(s) {
                *o = pv * sv;
            }
        }
    }))
}

/// `(T_sigma f)(x) = sum_c nu sum_m w_m q^{(1/2 - is) h(x)} sigma(x, c, m) Hf(c, m)`.
pub fn apply(ctx: &Context, sigma: &GridSymbol, f: &TreeFunction) -> Result<TreeFunction> {
    sigma.check(ctx)?;
    let hf = fh_forward(ctx, f)?;
    let (nodes, nu) = (ctx.nodes(), ctx.nu());
    let w = ctx.grid().weights();
    let values = ctx.exec().map(ctx.vertices(), |x| {
        let row = sigma.row(x);
        let mut acc = ZERO;
        for (c, &h) in ctx.heights().row(x).iter().enumerate() {
            let p = ctx.powers().minus(h);
            let s = &row[c * nodes..(c + 1) * nodes];
            acc += p
                .iter()
                .zip(s)
                .zip(hf.row(c))
                .zip(w)
                .map(|(((pv, sv), fv), wv)| pv * sv * fv * wv)
                .sum::<Complex64>();
        }
        acc * nu
    });
    Ok(TreeFunction::from_values(values))
}

/// `sigma(x, c, m) = q^{-(1/2 - is) h(x, c)} sum_k a_k(x) S_k(c, m)`.
pub(crate) fn symbol_from_terms(ctx: &Context, terms: &[(&TreeFunction, SpectralFunction)]) -> GridSymbol {
    let nodes = ctx.nodes();
    let mut sigma = GridSymbol::zeros(ctx);
    let cyl = ctx.cylinders();
    ctx.exec().fill_chunks(&mut sigma.values, cyl * nodes, |x, row| {
        for (a, s) in terms {
            let ax = a.values[x];
            if ax == ZERO {
                continue;
            }
            for (o, sv) in row.iter_mut().zip(&s.values) {
                *o += ax * sv;
            }
        }
        for (c, &h) in ctx.heights().row(x).iter().enumerate() {
            let inv = ctx.powers().minus_inv(h);
            for (o, iv) in row[c * nodes..(c + 1) * nodes].iter_mut().zip(inv) {
                *o *= iv;
            }
        }
    });
    sigma
}

/// `sigma(x, w, s) = q^{-(1/2 - is) h_w(x)} sum_k f_k(x) conj(H conj(g_k)(w, s))`.
pub fn symbol_from_decomposition(ctx: &Context, dec: &NuclearDecomposition) -> Result<GridSymbol> {
    dec.check(ctx)?;
    let terms = dec
        .pairs
        .iter()
        .map(|(f, g)| Ok((f, fh_forward(ctx, &g.conj())?.conj())))
        .collect::<Result<Vec<_>>>()?;
    Ok(symbol_from_terms(ctx, &terms))
}

/// `b(x, w, s) = conj(sigma(x, w, s)) q^{(1/2 + is) h_w(x)}`.
pub fn b_function(ctx: &Context, sigma: &GridSymbol) -> Result<GridSymbol> {
    sigma.check(ctx)?;
    let nodes = ctx.nodes();
    let mut b = sigma.clone();
    let cyl = ctx.cylinders();
    ctx.exec().fill_chunks(&mut b.values, cyl * nodes, |x, row| {
        for (c, &h) in ctx.heights().row(x).iter().enumerate() {
            let p = ctx.powers().plus(h);
            for (o, pv) in row[c * nodes..(c + 1) * nodes].iter_mut().zip(p) {
                *o = o.conj() * pv;
            }
        }
    });
    Ok(b)
}

/// `||b||` in `L^2(ball x boundary x [0, tau])`, which equals `||T_sigma||_{S_2}`.
pub fn hs_norm_via_b(ctx: &Context, sigma: &GridSymbol) -> Result<f64> {
    let b = b_function(ctx, sigma)?;
    let nodes = ctx.nodes();
    let w = ctx.grid().weights();
    let rows = ctx.exec().map(ctx.vertices(), |x| {
        b.row(x)
            .chunks(nodes)
            .map(|c| c.iter().zip(w).map(|(v, wv)| v.norm_sqr() * wv).sum::<f64>())
            .sum::<f64>()
    });
    Ok((rows.into_iter().sum::<f64>() * ctx.nu()).sqrt())
}

/// `Tr(T_sigma) = sum_x sum_c nu sum_m w_m q^{h(x, c)} sigma(x, c, m)`.
pub fn trace_via_symbol(ctx: &Context, sigma: &GridSymbol) -> Result<Complex64> {
    sigma.check(ctx)?;
    let nodes = ctx.nodes();
    let w = ctx.grid().weights();
    let q = ctx.q() as f64;
    let rows = ctx.exec().map(ctx.vertices(), |x| {
        let row = sigma.row(x);
        ctx.heights()
            .row(x)
            .iter()
            .enumerate()
            .map(|(c, &h)| {
                let s: Complex64 = row[c * nodes..(c + 1) * nodes].iter().zip(w).map(|(v, wv)| v * wv).sum();
                s * q.powi(h)
            })
            .sum::<Complex64>()
    });
    Ok(rows.into_iter().sum::<Complex64>() * ctx.nu())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use crate::psdo::Symbol;
    use crate::rng::SeededRng;
    use crate::transform::fh_inverse;

    fn ctx(q: usize, r: usize, m: usize) -> Context {
        Context::new(q, r, r, m).unwrap()
    }

    /// The defining triple sum for one kernel entry, evaluated term by term.
    fn brute_kernel_entry(c: &Context, sigma: &GridSymbol, x: usize, y: usize) -> Complex64 {
        let lnq = (c.q() as f64).ln();
        let mut acc = ZERO;
        for cy in 0..c.cylinders() {
            let hx = c.partition().height(c.ball(), x, cy).unwrap() as f64;
            let hy = c.partition().height(c.ball(), y, cy).unwrap() as f64;
            for (m, &s) in c.grid().nodes().iter().enumerate() {
                let chi = (Complex64::new(0.5, -s) * (hx * lnq)).exp() * (Complex64::new(0.5, s) * (hy * lnq)).exp();
                acc += c.nu() * c.grid().weights()[m] * chi * sigma.get(x, cy, m);
            }
        }
        acc
    }

    fn random_symbol(c: &Context, seed: u64) -> GridSymbol {
        let mut rng = SeededRng::new(seed);
        let mut s = GridSymbol::zeros(c);
        s.values.iter_mut().for_each(|v| *v = rng.complex());
        s
    }

    fn random_dec(c: &Context, rng: &mut SeededRng, k: usize) -> NuclearDecomposition {
        NuclearDecomposition::new(
            (0..k)
                .map(|_| (rng.tree_function(c.vertices()), rng.tree_function(c.vertices())))
                .collect(),
        )
    }

    #[test]
    fn kernel_assembly_matches_defining_sum() {
        let c = ctx(2, 2, 12);
        let sigma = random_symbol(&c, 1);
        let k = kernel_from_symbol(&c, &sigma).unwrap();
        for x in 0..c.vertices() {
            for y in 0..c.vertices() {
                assert!((k.get(x, y) - brute_kernel_entry(&c, &sigma, x, y)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn apply_agrees_with_kernel() {
        let c = ctx(2, 3, 64);
        let sigma = random_symbol(&c, 2);
        let k = kernel_from_symbol(&c, &sigma).unwrap();
        let mut rng = SeededRng::new(9);
        let f = rng.tree_function(c.vertices());
        let direct = apply(&c, &sigma, &f).unwrap();
        let via_k = k.apply(&f);
        for (a, b) in direct.values.iter().zip(&via_k.values) {
            assert!((a - b).norm() <= 1e-10 * (1.0 + b.norm()));
        }
        let zero = apply(&c, &sigma, &TreeFunction::zeros(c.vertices())).unwrap();
        assert!(zero.values.iter().all(|v| *v == ZERO));
    }

    #[test]
    fn inversion_symbol_reproduces_function() {
        let c = ctx(2, 3, 256);
        let sigma = GridSymbol::from_fn(&c, |_, _, _| Complex64::new(1.0, 0.0));
        let mut rng = SeededRng::new(4);
        let f = rng.tree_function(c.vertices());
        let tf = apply(&c, &sigma, &f).unwrap();
        let round = fh_inverse(&c, &fh_forward(&c, &f).unwrap()).unwrap();
        for ((a, b), v) in tf.values.iter().zip(&round.values).zip(&f.values) {
            assert!((a - b).norm() < 1e-11);
            assert!((a - v).norm() < 1e-9);
        }
    }

    #[test]
    fn delta_pair_symbol() {
        let c = ctx(2, 3, 256);
        let n = c.vertices();
        let (a, b) = (3, 11);
        let dec = NuclearDecomposition::delta_pair(n, a, b);
        let sigma = Symbol::Nuclear(dec.clone()).materialize(&c).unwrap();
        let k = kernel_from_symbol(&c, &sigma).unwrap();
        assert!(k.max_abs_diff(&dec.outer_product_kernel(n)) < 1e-6);
        let mut rng = SeededRng::new(1);
        let f = rng.tree_function(n);
        let tf = apply(&c, &sigma, &f).unwrap();
        for x in 0..n {
            let expected = if x == a { f.values[b] } else { ZERO };
            assert!((tf.values[x] - expected).norm() < 1e-6);
        }
        assert!((hs_norm_via_b(&c, &sigma).unwrap() - 1.0).abs() < 1e-6);
        assert!(trace_via_symbol(&c, &sigma).unwrap().norm() < 1e-6);
        let diag = symbol_from_decomposition(&c, &NuclearDecomposition::delta_pair(n, a, a)).unwrap();
        assert!((trace_via_symbol(&c, &diag).unwrap() - 1.0).norm() < 1e-6);
    }

    #[test]
    fn root_delta_symbol_closed_form() {
        let c = ctx(3, 2, 32);
        let n = c.vertices();
        let sigma = symbol_from_decomposition(&c, &NuclearDecomposition::delta_pair(n, 0, 0)).unwrap();
        for x in 0..n {
            for cy in 0..c.cylinders() {
                for m in 0..c.nodes() {
                    let expected = if x == 0 { Complex64::new(1.0, 0.0) } else { ZERO };
                    assert!((sigma.get(x, cy, m) - expected).norm() < 1e-14);
                }
            }
        }
        let empty = symbol_from_decomposition(&c, &NuclearDecomposition::default()).unwrap();
        assert!(empty.values.iter().all(|v| *v == ZERO));
        assert!(kernel_from_symbol(&c, &empty).unwrap().max_abs() == 0.0);
    }

    #[test]
    fn random_decomposition_identities() {
        for (q, r) in [(2, 3), (3, 2)] {
            let c = ctx(q, r, 256);
            let n = c.vertices();
            let mut rng = SeededRng::new(21);
            let dec = random_dec(&c, &mut rng, 3);
            let sigma = symbol_from_decomposition(&c, &dec).unwrap();
            let k = kernel_from_symbol(&c, &sigma).unwrap();
            let oracle = dec.outer_product_kernel(n);
            assert!(k.max_abs_diff(&oracle) <= 1e-6 * dec.sup_scale());
            assert!((hs_norm_via_b(&c, &sigma).unwrap() - oracle.frobenius()).abs() <= 1e-6 * oracle.frobenius());
            assert!((trace_via_symbol(&c, &sigma).unwrap() - dec.trace()).norm() <= 1e-6 * (1.0 + dec.trace().norm()));
        }
    }

    #[test]
    fn b_function_properties() {
        let c = ctx(2, 2, 32);
        let n = c.vertices();
        let mut rng = SeededRng::new(8);
        let dec = random_dec(&c, &mut rng, 2);
        let sigma = symbol_from_decomposition(&c, &dec).unwrap();
        let b = b_function(&c, &sigma).unwrap();
        let hg: Vec<_> = dec.pairs.iter().map(|(_, g)| fh_forward(&c, &g.conj()).unwrap()).collect();
        for x in 0..n {
            for cy in 0..c.cylinders() {
                let h = c.heights().get(x, cy);
                for m in 0..c.nodes() {
                    let expected: Complex64 = dec
                        .pairs
                        .iter()
                        .zip(&hg)
                        .map(|((f, _), hgk)| f.values[x].conj() * hgk.get(cy, m))
                        .sum();
                    assert!((b.get(x, cy, m) - expected).norm() < 1e-12 * (1.0 + expected.norm()));
                    let scaled = 2f64.powf(h as f64 / 2.0) * sigma.get(x, cy, m).norm();
                    assert!((b.get(x, cy, m).norm() - scaled).abs() < 1e-12 * (1.0 + scaled));
                }
            }
        }
        let zero = GridSymbol::zeros(&c);
        assert!(b_function(&c, &zero).unwrap().values.iter().all(|v| *v == ZERO));
        assert_eq!(hs_norm_via_b(&c, &zero).unwrap(), 0.0);
    }

    #[test]
    fn dimension_checks() {
        let c = ctx(2, 2, 8);
        let other = ctx(2, 3, 8);
        let s = GridSymbol::zeros(&other);
        assert!(matches!(kernel_from_symbol(&c, &s), Err(Error::Dimension { .. })));
        assert!(matches!(
            symbol_from_decomposition(&c, &NuclearDecomposition::delta_pair(other.vertices(), 0, 1)),
            Err(Error::Dimension { .. })
        ));
    }
}
