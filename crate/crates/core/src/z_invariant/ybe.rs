//! Checkerboard Yang-Baxter equations for the elliptic weights.
//!
//! A star-triangle move replaces three rhombi with half-angles
//! `theta_1 + theta_2 + theta_3 = pi/2` by three rhombi of opposite vertex
//! colors, whose black half-angles are `pi/2 - theta_i`. The move preserves
//! partition functions up to a global factor iff sixteen cubic relations hold
//! with one common proportionality constant.

use super::ZInvWeights;
use crate::error::{Error, Result};
use crate::weights::FaceWeights;
use std::f64::consts::PI;

/// Tolerance on `theta_1 + theta_2 + theta_3 = pi/2`.
pub const ANGLE_SUM_TOL: f64 = 1e-12;

#[derive(Clone, Debug)]
pub struct YbeResiduals {
    /// Relative residuals of the sixteen relations after dividing by the
    /// constant fitted from the first one.
    pub residuals: Vec<f64>,
    /// Ratio left / right of the first relation.
    pub constant: f64,
    /// Template index (0..5) and face permutation of each relation.
    pub labels: Vec<(usize, [usize; 3])>,
}

impl YbeResiduals {
    pub fn max(&self) -> f64 {
        self.residuals.iter().cloned().fold(0.0, f64::max)
    }
}

/// The sixteen distinct `(template, (i, j, k))` combinations: template 0 is
/// symmetric in all faces, templates 1 to 3 in `j, k`, template 4 in none.
pub fn relation_labels() -> Vec<(usize, [usize; 3])> {
    let mut out = vec![(0, [0, 1, 2])];
    for t in 1..4 {
        for i in 0..3 {
            let rest: Vec<usize> = (0..3).filter(|&j| j != i).collect();
            out.push((t, [i, rest[0], rest[1]]));
        }
    }
    for p in [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]] {
        out.push((4, p));
    }
    out
}

/// Left and right sides of one relation.
fn relation(t: usize, [i, j, k]: [usize; 3], x: &[FaceWeights; 3], y: &[FaceWeights; 3]) -> (f64, f64) {
    let (a, b, c, d) = (|f: usize| x[f].a, |f: usize| x[f].b, |f: usize| x[f].c, |f: usize| x[f].d);
    let (ap, bp, cp, dp) = (|f: usize| y[f].a, |f: usize| y[f].b, |f: usize| y[f].c, |f: usize| y[f].d);
    match t {
        0 => (
            c(i) * c(j) * c(k) + a(i) * a(j) * a(k),
            cp(i) * cp(j) * cp(k) + bp(i) * bp(j) * bp(k),
        ),
        1 => (
            a(i) * c(j) * c(k) + c(i) * a(j) * a(k),
            cp(i) * ap(j) * ap(k) + bp(i) * dp(j) * dp(k),
        ),
        2 => (
            c(i) * b(j) * b(k) + a(i) * d(j) * d(k),
            bp(i) * cp(j) * cp(k) + cp(i) * bp(j) * bp(k),
        ),
        3 => (
            c(i) * d(j) * d(k) + a(i) * b(j) * b(k),
            cp(i) * dp(j) * dp(k) + bp(i) * ap(j) * ap(k),
        ),
        _ => (
            c(i) * b(j) * d(k) + a(i) * d(j) * b(k),
            dp(i) * ap(j) * cp(k) + ap(i) * dp(j) * bp(k),
        ),
    }
}

/// Residuals for explicit weights before (`x`) and after (`y`) the move.
pub fn ybe_residuals_for(x: &[FaceWeights; 3], y: &[FaceWeights; 3]) -> Result<YbeResiduals> {
    let labels = relation_labels();
    let (l0, r0) = relation(0, [0, 1, 2], x, y);
    if r0 == 0.0 || l0 == 0.0 {
        return Err(Error::Argument("degenerate first relation".into()));
    }
    let constant = l0 / r0;
    let residuals = labels
        .iter()
        .map(|&(t, p)| {
            let (l, r) = relation(t, p, x, y);
            let scale = l.abs().max((constant * r).abs());
            if scale == 0.0 {
                0.0
            } else {
                (l - constant * r).abs() / scale
            }
        })
        .collect();
    Ok(YbeResiduals { residuals, constant, labels })
}

/// Residuals of the elliptic weights with parameters `k2`, `l2` for the
/// half-angles `theta`.
pub fn ybe_residuals(theta: [f64; 3], k2: f64, l2: f64) -> Result<YbeResiduals> {
    let sum: f64 = theta.iter().sum();
    if (sum - PI / 2.0).abs() > ANGLE_SUM_TOL {
        return Err(Error::Argument(format!("half-angles sum to {sum}, expected pi/2")));
    }
    let z = ZInvWeights::new(k2, l2)?;
    let x = [z.face(theta[0])?, z.face(theta[1])?, z.face(theta[2])?];
    let y = [
        z.face(PI / 2.0 - theta[0])?,
        z.face(PI / 2.0 - theta[1])?,
        z.face(PI / 2.0 - theta[2])?,
    ];
    ybe_residuals_for(&x, &y)
}

/// Weights before and after the move, for perturbation studies.
pub fn star_triangle_weights(theta: [f64; 3], k2: f64, l2: f64) -> Result<([FaceWeights; 3], [FaceWeights; 3])> {
    let z = ZInvWeights::new(k2, l2)?;
    Ok((
        [z.face(theta[0])?, z.face(theta[1])?, z.face(theta[2])?],
        [
            z.face(PI / 2.0 - theta[0])?,
            z.face(PI / 2.0 - theta[1])?,
            z.face(PI / 2.0 - theta[2])?,
        ],
    ))
}
