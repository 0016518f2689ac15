//! The spectral interval `[0, tau]`, the c-function and the Plancherel measure.
//!
//! The measure used for quadrature is `dmu(s) = 2 c_P |c(s)|^-2 ds` on
//! `[0, tau]` with `tau = pi / ln q`. The integrand `q^{is}` has period
//! `2 tau`; folding the full period onto its first half (using
//! `|c(-s)| = |c(s)|`) doubles the density. With this normalization the
//! measure has total mass one, which the inversion formula at `delta_o`
//! requires.

use std::f64::consts::PI;

use gauss_quad::GaussLegendre;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Factor applied to `c_P |c(s)|^-2` when integrating over `[0, tau]` only.
pub const HALF_PERIOD_FOLD: f64 = 2.0;

pub const DEFAULT_NODES: usize = 256;

pub fn tau(q: usize) -> f64 {
    PI / (q as f64).ln()
}

/// `c_P = q ln q / (4 pi (q + 1))`.
pub fn plancherel_constant(q: usize) -> f64 {
    let qf = q as f64;
    qf * qf.ln() / (4.0 * PI * (qf + 1.0))
}

/// `c(z) = q^{1/2}/(q+1) * (q^{1/2+iz} - q^{-1/2-iz}) / (q^{iz} - q^{-iz})`.
pub fn c_function(q: usize, z: Complex64) -> Result<Complex64> {
    let lnq = (q as f64).ln();
    let i = Complex64::i();
    let pow = |w: Complex64| (w * lnq).exp();
    let den = pow(i * z) - pow(-i * z);
    let scale = pow(i * z).norm().max(pow(-i * z).norm());
    if den.norm() <= 8.0 * f64::EPSILON * scale {
        return Err(Error::Pole { re: z.re, im: z.im });
    }
    let half = Complex64::new(0.5, 0.0);
    let num = pow(half + i * z) - pow(-half - i * z);
    Ok((q as f64).sqrt() / (q as f64 + 1.0) * num / den)
}

/// `c_P |c(s)|^-2` for `0 < s < tau`.
///
/// This is the density as written against `ds`; the quadrature weights in
/// [`SpectralGrid`] additionally carry [`HALF_PERIOD_FOLD`].
pub fn plancherel_density(q: usize, s: f64) -> Result<f64> {
    let t = tau(q);
    if !(s > 0.0 && s < t) {
        return Err(Error::OutsideSpectralInterval { s, tau: t });
    }
    let c = c_function(q, Complex64::new(s, 0.0))?;
    Ok(plancherel_constant(q) / c.norm_sqr())
}

/// Gauss-Legendre nodes on `(0, tau)` with Plancherel weights.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralGrid {
    q: usize,
    tau: f64,
    nodes: Vec<f64>,
    base_weights: Vec<f64>,
    plancherel_weights: Vec<f64>,
}

impl SpectralGrid {
    pub fn new(q: usize, m: usize) -> Result<Self> {
        if q < 2 {
            return Err(Error::InvalidDegree(q));
        }
        if m < 2 {
            return Err(Error::TooFewNodes(m));
        }
        let rule = GaussLegendre::new(m).map_err(|_| Error::TooFewNodes(m))?;
        let mut pairs = rule.into_node_weight_pairs();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));

        let t = tau(q);
        let half = 0.5 * t;
        let mut nodes = Vec::with_capacity(m);
        let mut base_weights = Vec::with_capacity(m);
        let mut plancherel_weights = Vec::with_capacity(m);
        for (x, w) in pairs {
            let s = half * (x + 1.0);
            let bw = half * w;
            nodes.push(s);
            base_weights.push(bw);
            plancherel_weights.push(bw * HALF_PERIOD_FOLD * plancherel_density(q, s)?);
        }
        Ok(SpectralGrid {
            q,
            tau: t,
            nodes,
            base_weights,
            plancherel_weights,
        })
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn base_weights(&self) -> &[f64] {
        &self.base_weights
    }

    pub fn weights(&self) -> &[f64] {
        &self.plancherel_weights
    }

    /// `sum_m w_m`, the quadrature value of `mu([0, tau])`.
    pub fn total_mass(&self) -> f64 {
        self.plancherel_weights.iter().sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn c_at_midpoint_is_one_half() {
        for q in [2, 3, 5] {
            let c = c_function(q, Complex64::new(tau(q) / 2.0, 0.0)).unwrap();
            assert!((c - 0.5).norm() <= 1e-12, "q={q} c={c}");
        }
    }

    #[test]
    fn c_blows_up_like_inverse_s() {
        let q = 2;
        let lnq = 2f64.ln();
        let lim = (2f64.sqrt() - 1.0 / 2f64.sqrt()) * 2f64.sqrt() / 3.0 / (2.0 * lnq);
        for s in [1e-3, 1e-5, 1e-7] {
            let c = c_function(q, Complex64::new(s, 0.0)).unwrap();
            assert!((c.norm() * s - lim).abs() < 1e-2 * lim);
        }
    }

    #[test]
    fn modulus_squared_is_c_times_c_of_minus_s() {
        for q in [2, 3] {
            for k in 1..20 {
                let s = tau(q) * k as f64 / 20.0;
                let a = c_function(q, Complex64::new(s, 0.0)).unwrap();
                let b = c_function(q, Complex64::new(-s, 0.0)).unwrap();
                assert!((a * b - a.norm_sqr()).norm() < 1e-13);
            }
        }
    }

    #[test]
    fn pole_detection() {
        assert!(matches!(c_function(2, Complex64::new(0.0, 0.0)), Err(Error::Pole { .. })));
        assert!(matches!(c_function(3, Complex64::new(2.0 * tau(3), 0.0)), Err(Error::Pole { .. })));
        assert!(c_function(3, Complex64::new(0.0, 0.3)).is_ok());
    }

    #[test]
    fn density_values() {
        for q in [2usize, 3] {
            let qf = q as f64;
            let mid = plancherel_density(q, tau(q) / 2.0).unwrap();
            assert!((mid - qf * qf.ln() / (PI * (qf + 1.0))).abs() < 1e-14);
        }
        // Frozen from a 40-digit evaluation of the same closed forms.
        let d2 = plancherel_density(2, tau(2) / 4.0).unwrap();
        assert!((d2 - 0.132_381_360_091_590_956_037_873_859_270_798_6).abs() < 1e-14);
        let d3 = plancherel_density(3, tau(3) / 4.0).unwrap();
        assert!((d3 - 0.209_819_491_539_635_866_798_482_769_271_255_0).abs() < 1e-14);
    }

    #[test]
    fn density_rejects_endpoints_and_is_nonnegative() {
        assert!(plancherel_density(2, 0.0).is_err());
        assert!(plancherel_density(2, tau(2)).is_err());
        assert!(plancherel_density(2, -1.0).is_err());
        for q in [2, 3, 5] {
            let t = tau(q);
            for k in 1..1000 {
                assert!(plancherel_density(q, t * k as f64 / 1000.0).unwrap() >= 0.0);
            }
            let eps = 1e-4;
            assert!(plancherel_density(q, eps * t).unwrap() < 1e-6);
            assert!(plancherel_density(q, (1.0 - eps) * t).unwrap() < 1e-6);
        }
    }

    #[test]
    fn grid_mass_converges_to_one() {
        for q in [2, 3] {
            let g = SpectralGrid::new(q, 256).unwrap();
            assert!((g.total_mass() - 1.0).abs() <= 1e-10);
            assert!(g.nodes().iter().all(|&s| s > 0.0 && s < g.tau()));
            assert!(g.nodes().windows(2).all(|w| w[0] < w[1]));
            assert!(g.weights().iter().all(|&w| w >= 0.0));
            let coarse = SpectralGrid::new(q, 8).unwrap();
            let mid = SpectralGrid::new(q, 16).unwrap();
            assert!((mid.total_mass() - 1.0).abs() < (coarse.total_mass() - 1.0).abs());
        }
        assert_eq!(SpectralGrid::new(2, 1), Err(Error::TooFewNodes(1)));
    }
}
