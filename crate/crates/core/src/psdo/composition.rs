//! Symbols of adjoints and products.

use super::calculus::{assemble, symbol_from_terms, ColumnCharacter};
use super::{GridSymbol, NuclearDecomposition, ZERO};
use crate::context::Context;
use crate::error::Result;
use crate::transform::{fh_forward, fh_inverse, SpectralFunction, TreeFunction};

/// Adjoint symbol from a decomposition:
/// `sigma*(x, w, s) = q^{-(1/2 - is) h_w(x)} sum_k conj(H f_k(w, s)) conj(g_k(x))`.
pub fn adjoint_symbol(ctx: &Context, dec: &NuclearDecomposition) -> Result<GridSymbol> {
    dec.check(ctx)?;
    let conj_g: Vec<TreeFunction> = dec.pairs.iter().map(|(_, g)| g.conj()).collect();
    let terms = dec
        .pairs
        .iter()
        .zip(&conj_g)
        .map(|((f, _), gc)| Ok((gc, fh_forward(ctx, f)?.conj())))
        .collect::<Result<Vec<_>>>()?;
    Ok(symbol_from_terms(ctx, &terms))
}

/// Adjoint symbol computed from the grid alone:
///
/// `sigma*(y, w1, s1) = q^{-(1/2 - is1) h_w1(y)} sum_x q^{(1/2 - is1) h_w1(x)} I(x, y)`,
/// `I(x, y) = int int conj(sigma(x, w, s)) q^{(1/2 + is) h_w(x)} q^{(1/2 - is) h_w(y)} dnu dmu`.
pub fn adjoint_symbol_direct(ctx: &Context, sigma: &GridSymbol) -> Result<GridSymbol> {
    sigma.check(ctx)?;
    let nodes = ctx.nodes();
    let inner = assemble(ctx, ColumnCharacter::Minus, |x, out| {
        let row = sigma.row(x);
        for (c, &h) in ctx.heights().row(x).iter().enumerate() {
            let p = ctx.powers().plus(h);
            for ((o, sv), pv) in out[c * nodes..(c + 1) * nodes].iter_mut().zip(&row[c * nodes..]).zip(p) {
                *o = sv.conj() * pv;
            }
        }
    });

    let n = ctx.vertices();
    let cyl = ctx.cylinders();
    let hmax = ctx.heights().max_abs() as i32;
    let span = 2 * hmax as usize + 1;
    let mut out = GridSymbol::zeros(ctx);
    ctx.exec().fill_chunks(&mut out.values, cyl * nodes, |y, row| {
        let mut buckets = vec![ZERO; span];
        for (c, &hy) in ctx.heights().row(y).iter().enumerate() {
            // Group the x-sum by h(x, c).
            buckets.iter_mut().for_each(|b| *b = ZERO);
            for x in 0..n {
                buckets[(ctx.heights().get(x, c) + hmax) as usize] += inner.get(x, y);
            }
            let dst = &mut row[c * nodes..(c + 1) * nodes];
            for (i, b) in buckets.iter().enumerate() {
                if *b == ZERO {
                    continue;
                }
                let p = ctx.powers().minus(i as i32 - hmax);
                for (o, pv) in dst.iter_mut().zip(p) {
                    *o += pv * b;
                }
            }
            for (o, iv) in dst.iter_mut().zip(ctx.powers().minus_inv(hy)) {
                *o *= iv;
            }
        }
    });
    Ok(out)
}

/// Product symbol from grids: `eta_star` is the symbol of `T_eta^*`, `sigma` that of `T_sigma`.
///
/// `lambda(b, w, s) = q^{-(1/2 - is) h_w(b)} sum_x q^{(1/2 - is) h_w(x)} sigma(x, w, s) (H^{-1} eta'(x, ., .))(b)`
/// with `eta'(x, w, s) = q^{(1/2 + is) h_w(x)} conj(eta*(x, w, s))`. The kernel of `lambda` is `K_eta K_sigma`.
pub fn product_symbol_grid(ctx: &Context, eta_star: &GridSymbol, sigma: &GridSymbol) -> Result<GridSymbol> {
    eta_star.check(ctx)?;
    sigma.check(ctx)?;
    let n = ctx.vertices();
    let cyl = ctx.cylinders();
    let nodes = ctx.nodes();

    // inv_eta[x][b] = (H^{-1} eta'(x, ., .))(b)
    let inv_eta: Vec<TreeFunction> = ctx
        .exec()
        .map(n, |x| {
            let mut spec = SpectralFunction::zeros(cyl, nodes);
            let row = eta_star.row(x);
            for (c, &h) in ctx.heights().row(x).iter().enumerate() {
                let p = ctx.powers().plus(h);
                for ((o, ev), pv) in spec.values[c * nodes..(c + 1) * nodes]
                    .iter_mut()
                    .zip(&row[c * nodes..])
                    .zip(p)
                {
                    *o = pv * ev.conj();
                }
            }
            fh_inverse(ctx, &spec)
        })
        .into_iter()
        .collect::<Result<_>>()?;

    // weighted[x][c][m] = q^{(1/2 - is) h(x, c)} sigma(x, c, m)
    let mut weighted = sigma.clone();
    ctx.exec().fill_chunks(&mut weighted.values, cyl * nodes, |x, row| {
        for (c, &h) in ctx.heights().row(x).iter().enumerate() {
            for (o, pv) in row[c * nodes..(c + 1) * nodes].iter_mut().zip(ctx.powers().minus(h)) {
                *o *= pv;
            }
        }
    });

    let mut lambda = GridSymbol::zeros(ctx);
    ctx.exec().fill_chunks(&mut lambda.values, cyl * nodes, |b, row| {
        for (x, e) in inv_eta.iter().enumerate() {
            let coeff = e.values[b];
            if coeff == ZERO {
                continue;
            }
            for (o, wv) in row.iter_mut().zip(weighted.row(x)) {
                *o += coeff * wv;
            }
        }
        for (c, &h) in ctx.heights().row(b).iter().enumerate() {
            for (o, iv) in row[c * nodes..(c + 1) * nodes].iter_mut().zip(ctx.powers().minus_inv(h)) {
                *o *= iv;
            }
        }
    });
    Ok(lambda)
}

/// Symbol of `T_eta T_sigma` for two decompositions; `eta*` comes from [`adjoint_symbol`].
pub fn product_symbol(
    ctx: &Context,
    eta: &NuclearDecomposition,
    sigma: &NuclearDecomposition,
) -> Result<GridSymbol> {
    let eta_star = adjoint_symbol(ctx, eta)?;
    let sigma_grid = super::symbol_from_decomposition(ctx, sigma)?;
    product_symbol_grid(ctx, &eta_star, &sigma_grid)
}
