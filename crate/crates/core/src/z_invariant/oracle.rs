//! Infinite-lattice inverse by Fourier transform over a fine grid of the
//! unit torus, built from the twisted Kasteleyn matrix of the 2 x 2
//! fundamental domain. Independent of the contour formulas.

use super::lattice::{RhombicLattice, Site};
use super::ZInvWeights;
use crate::error::{Error, Result};
use crate::kasteleyn::{deco, Kasteleyn};
use crate::linalg::{c, inverse};
use crate::quad_graph::{build_rhombic_torus, lozenge_angles};
use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::PI;

/// Decoration index in the 2 x 2 torus and lattice cell of a site.
fn local(s: Site) -> (usize, (i64, i64)) {
    let (fx, fy) = (s.x.rem_euclid(2) as usize, s.y.rem_euclid(2) as usize);
    (deco(fx + 2 * fy, s.i), (s.x.div_euclid(2), s.y.div_euclid(2)))
}

/// `K^{-1}[x, y]` of the infinite lattice with elliptic weights, from an
/// `n x n` half-shifted grid. The aliasing error decays exponentially in
/// `n` once `n` exceeds the correlation length measured in cells.
pub fn bloch_inverse(lat: &RhombicLattice, weights: &ZInvWeights, n: usize, pairs: &[(Site, Site)]) -> Result<Vec<Complex64>> {
    if n == 0 {
        return Err(Error::Argument("grid size must be positive".into()));
    }
    let q = build_rhombic_torus(2, 2, lat.s1, lat.s2)?;
    let phi = lozenge_angles(&q)?;
    let kast = Kasteleyn::new(&q, &phi)?;
    let thetas = q.theta.clone().expect("rhombic tori carry angles");
    let field = weights.field(&thetas)?;
    let idx: Vec<(usize, usize, (i64, i64))> = pairs
        .iter()
        .map(|&(x, y)| {
            let (lx, cx) = local(x);
            let (ly, cy) = local(y);
            (lx, ly, (cy.0 - cx.0, cy.1 - cx.1))
        })
        .collect();
    let phase = |a: usize| 2.0 * PI * (a as f64 + 0.5) / n as f64;
    let sums = (0..n)
        .into_par_iter()
        .map(|a| -> Result<Vec<Complex64>> {
            let mut acc = vec![c(0.0, 0.0); idx.len()];
            let z = Complex64::from_polar(1.0, phase(a));
            for b in 0..n {
                let w = Complex64::from_polar(1.0, phase(b));
                let inv = inverse(&kast.k_twisted(&field, z, w)?)?;
                for (slot, &(lx, ly, (dx, dy))) in acc.iter_mut().zip(&idx) {
                    *slot += inv[(lx, ly)] * z.powi(-dx as i32) * w.powi(-dy as i32);
                }
            }
            Ok(acc)
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(vec![c(0.0, 0.0); idx.len()], |mut a, b| {
            for (x, y) in a.iter_mut().zip(b) {
                *x += y;
            }
            a
        });
    let norm = (n * n) as f64;
    Ok(sums.into_iter().map(|s| s / norm).collect())
}

/// `Kcal_k^{-1}[b, w]` from the oracle, through `K_{k,k}^{-1}[w, b] = -i Kcal_k^{-1}[b, w]`.
pub fn bloch_inverse_6v(lat: &RhombicLattice, k: f64, n: usize, pairs: &[(Site, Site)]) -> Result<Vec<Complex64>> {
    let swapped: Vec<(Site, Site)> = pairs.iter().map(|&(b, w)| (w, b)).collect();
    let w = ZInvWeights::from_moduli(k, k)?;
    Ok(bloch_inverse(lat, &w, n, &swapped)?
        .into_iter()
        .map(|v| v * c(0.0, 1.0))
        .collect())
}
