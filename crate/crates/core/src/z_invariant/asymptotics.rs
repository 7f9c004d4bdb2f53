//! Exponential decay of the six-vertex inverse along a rhombus path: the
//! rate function, its minimizer, the saddle-point prediction and fits.

use super::lattice::RhombusPath;
use super::local_inverse::{f_bw, massive_exp};
use crate::elliptic::{complete_k, jacobi_real, EllipticContext};
use crate::error::{Error, Result};
use crate::linalg::c;
use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::PI;

/// Margin kept from the ends of the sector when bracketing `u0`.
const BRACKET_MARGIN: f64 = 1e-6;
/// Bracket width at which bisection hands over to Newton.
const BISECTION_WIDTH: f64 = 1e-3;
/// Step size at which Newton stops.
const NEWTON_TOL: f64 = 1e-12;
/// Default minimal distance from `u0` to the end directions.
pub const HYPOTHESIS_EPS: f64 = 1e-2;

fn context(k: f64) -> Result<EllipticContext> {
    if !(k > 0.0 && k < 1.0) {
        return Err(Error::Argument(format!("decay rate needs 0 < k < 1, got {k}")));
    }
    EllipticContext::from_modulus(k)
}

fn check_path(path: &RhombusPath) -> Result<()> {
    if !(path.distance > 0.0) || path.interior().is_empty() {
        return Err(Error::Argument("path has no full step".into()));
    }
    Ok(())
}

/// Jacobi values at `K (u - a) / pi`.
fn jac(ctx: &EllipticContext, u: f64, a: f64) -> Result<(f64, f64, f64)> {
    jacobi_real(ctx.big_k * (u - a) / PI, ctx.k2)
}

/// `log(sqrt(k') nd)` and its first two derivatives in `u`.
fn g_terms(ctx: &EllipticContext, u: f64, a: f64) -> Result<[f64; 3]> {
    let (sn, cn, dn) = jac(ctx, u, a)?;
    let s = ctx.big_k / PI;
    let k2 = ctx.k2;
    Ok([
        (ctx.kp.sqrt() / dn).ln(),
        s * k2 * sn * cn / dn,
        s * s * k2 * (cn * cn - sn * sn + k2 * sn * sn * cn * cn / (dn * dn)),
    ])
}

fn chi_terms(ctx: &EllipticContext, path: &RhombusPath, u: f64) -> Result<[f64; 3]> {
    let mut acc = [0.0; 3];
    for &a in path.interior() {
        let g = g_terms(ctx, u, a)?;
        for i in 0..3 {
            acc[i] += g[i];
        }
    }
    Ok(acc.map(|v| v / path.distance))
}

/// Decay rate function `(1/r) sum_j log(sqrt(k') nd(K (u - alpha_j) / pi))`
/// over the full steps, `r` the distance between the path ends.
pub fn chi(path: &RhombusPath, u: f64, k: f64) -> Result<f64> {
    check_path(path)?;
    Ok(chi_terms(&context(k)?, path, u)?[0])
}

pub fn chi_derivative(path: &RhombusPath, u: f64, k: f64) -> Result<f64> {
    check_path(path)?;
    Ok(chi_terms(&context(k)?, path, u)?[1])
}

pub fn chi_second_derivative(path: &RhombusPath, u: f64, k: f64) -> Result<f64> {
    check_path(path)?;
    Ok(chi_terms(&context(k)?, path, u)?[2])
}

/// Unique critical point of `chi` in the sector around the path center.
pub fn u0(path: &RhombusPath, k: f64) -> Result<f64> {
    check_path(path)?;
    let ctx = context(k)?;
    let d = |u: f64| chi_terms(&ctx, path, u);
    let half = PI / 2.0 - BRACKET_MARGIN;
    let (mut lo, mut hi) = (path.center - half, path.center + half);
    let (flo, fhi) = (d(lo)?[1], d(hi)?[1]);
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() {
        return Err(Error::Root(format!("derivative of chi not bracketed on [{lo}, {hi}]")));
    }
    let rising = fhi > 0.0;
    while hi - lo > BISECTION_WIDTH {
        let mid = 0.5 * (lo + hi);
        let v = d(mid)?[1];
        if v == 0.0 {
            return Ok(mid);
        }
        if (v > 0.0) == rising {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let mut u = 0.5 * (lo + hi);
    for _ in 0..100 {
        let t = d(u)?;
        if t[2] == 0.0 {
            break;
        }
        let next = u - t[1] / t[2];
        if !(next > lo && next < hi) {
            return Err(Error::Root(format!("Newton step for u0 left [{lo}, {hi}]")));
        }
        let step = (next - u).abs();
        u = next;
        if step < NEWTON_TOL {
            return Ok(u);
        }
    }
    Ok(u)
}

/// Residual of the Landen characterization of `u0`:
/// `sum_j sn(2 K(kt) (u - alpha_j) / pi | kt)` with `kt = (1 - k') / (1 + k')`.
pub fn landen_residual(path: &RhombusPath, u: f64, k: f64) -> Result<f64> {
    let ctx = context(k)?;
    let kt = (1.0 - ctx.kp) / (1.0 + ctx.kp);
    let kk = complete_k(kt * kt)?;
    let mut s = 0.0;
    for &a in path.interior() {
        s += jacobi_real(2.0 * kk * (u - a) / PI, kt * kt)?.0;
    }
    Ok(s)
}

/// Saddle-point value of `Kcal_k^{-1}[b, w]` along `path`; errors when `u0`
/// is within `eps` of the first or last direction.
pub fn asymptotic_prediction(path: &RhombusPath, theta_b: f64, k: f64, eps: f64) -> Result<Complex64> {
    let ctx = context(k)?;
    let u = u0(path, k)?;
    for a in [path.alpha_first(), path.alpha_last()] {
        if (u - a).abs() <= eps {
            return Err(Error::Argument(format!(
                "u0 = {u} lies within {eps} of the end direction {a}"
            )));
        }
    }
    let second = chi_terms(&ctx, path, u)?[2];
    let big_kp = ctx.big_kp.ok_or_else(|| Error::Argument("k must be positive".into()))?;
    let saddle = c(u, PI * big_kp / ctx.big_k);
    let f = f_bw(path, theta_b, saddle, k)?;
    Ok(f * ctx.big_k / (2.0 * PI.powi(3) * path.distance * second).sqrt())
}

/// `chi(u0(k), k) / k^2` over a grid of moduli.
#[derive(Clone, Debug, Serialize)]
pub struct ExponentScan {
    pub k: Vec<f64>,
    pub rate: Vec<f64>,
    pub scaled: Vec<f64>,
    /// max / min of `|scaled|`.
    pub ratio: f64,
}

pub fn critical_exponent_scan(path: &RhombusPath, ks: &[f64]) -> Result<ExponentScan> {
    let mut rate = Vec::with_capacity(ks.len());
    for &k in ks {
        let u = u0(path, k)?;
        rate.push(chi(path, u, k)?);
    }
    let scaled: Vec<f64> = rate.iter().zip(ks).map(|(r, k)| r / (k * k)).collect();
    let mags = scaled.iter().map(|s| s.abs());
    let (lo, hi) = mags.fold((f64::INFINITY, 0.0f64), |(a, b), v| (a.min(v), b.max(v)));
    Ok(ExponentScan { k: ks.to_vec(), rate, scaled, ratio: hi / lo })
}

/// Counts `#{alpha_j < u0 - pi/2}` and `#{alpha_j > u0}` after reflecting
/// the directions so that `u0` is not below the sector center; `None` when
/// all directions coincide.
pub fn cardinal_counts(path: &RhombusPath, k: f64) -> Result<Option<(usize, usize)>> {
    let dirs = path.interior();
    if dirs.iter().all(|&a| a == dirs[0]) {
        return Ok(None);
    }
    let u = u0(path, k)?;
    let (u, dirs): (f64, Vec<f64>) = if u >= path.center {
        (u, dirs.to_vec())
    } else {
        (2.0 * path.center - u, dirs.iter().map(|a| 2.0 * path.center - a).collect())
    };
    let below = dirs.iter().filter(|&&a| a < u - PI / 2.0).count();
    let above = dirs.iter().filter(|&&a| a > u).count();
    Ok(Some((below, above)))
}

/// The inequality of cardinals around `u0`; `None` when all directions
/// coincide.
pub fn cardinal_check(path: &RhombusPath, k: f64) -> Result<Option<bool>> {
    Ok(cardinal_counts(path, k)?.map(|(b, a)| b < a))
}

/// Least-squares fit of `log|G(r)| + log(r) / 2 = c0 + slope r + c1 p(r) + c2 / r`
/// with `p` the parity of `r`.
#[derive(Clone, Debug, Serialize)]
pub struct DecayFit {
    pub slope: f64,
    pub intercept: f64,
    pub parity: f64,
    pub inverse: f64,
    pub rms: f64,
}

pub fn decay_fit(rs: &[usize], log_abs: &[f64]) -> Result<DecayFit> {
    if rs.len() != log_abs.len() || rs.len() < 6 {
        return Err(Error::Argument("decay fit needs at least six matching samples".into()));
    }
    let a = nalgebra::DMatrix::from_fn(rs.len(), 4, |i, j| {
        let r = rs[i] as f64;
        match j {
            0 => 1.0,
            1 => r,
            2 => (rs[i] % 2) as f64,
            _ => 1.0 / r,
        }
    });
    let y = nalgebra::DVector::from_fn(rs.len(), |i, _| log_abs[i] + 0.5 * (rs[i] as f64).ln());
    let sol = a
        .clone()
        .svd(true, true)
        .solve(&y, 1e-14)
        .map_err(|e| Error::Argument(e.to_string()))?;
    let res = &a * &sol - &y;
    Ok(DecayFit {
        intercept: sol[0],
        slope: sol[1],
        parity: sol[2],
        inverse: sol[3],
        rms: (res.norm_squared() / rs.len() as f64).sqrt(),
    })
}

/// `massive_exp` at the saddle, equal to `(-1)^(n-2) exp(r chi(u0))`.
pub fn saddle_massive_exp(path: &RhombusPath, k: f64) -> Result<Complex64> {
    let ctx = context(k)?;
    let u = u0(path, k)?;
    let big_kp = ctx.big_kp.ok_or_else(|| Error::Argument("k must be positive".into()))?;
    massive_exp(path, c(u, PI * big_kp / ctx.big_k), k)
}
