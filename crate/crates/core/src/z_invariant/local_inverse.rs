//! Local formulas for the inverse Kasteleyn operators of the infinite
//! elliptic model, as contour integrals on the torus of modulus `k`.

use super::lattice::{RhombicLattice, RhombusPath, Site};
use super::ZInvWeights;
use crate::elliptic::{jacobi_projective, EllipticContext};
use crate::error::{Error, Result};
use crate::linalg::{c, det, I};
use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use std::collections::BTreeMap;
use std::f64::consts::PI;

/// Vertical contour on the torus `C / (2 pi Z + 2 i pi K'/K Z)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ContourSpec {
    /// Real part of the contour; the path's sector center when `None`.
    pub x0: Option<f64>,
    /// Minimal distance from the contour to the poles `alpha_j + pi`.
    pub delta: f64,
    /// Absolute tolerance between successive node doublings.
    pub tol: f64,
    pub start_nodes: usize,
    pub max_nodes: usize,
}

impl Default for ContourSpec {
    fn default() -> Self {
        ContourSpec { x0: None, delta: PI / 12.0, tol: 1e-10, start_nodes: 32, max_nodes: 1 << 16 }
    }
}

/// Half-width of the truncated line integral used at `k = 0`.
const CRITICAL_HALF_WIDTH: f64 = 50.0;

/// `K(k) (u - a) / pi`, the argument of the kernel factors.
fn kernel_arg(ctx: &EllipticContext, u: Complex64, a: f64) -> Complex64 {
    (u - a) * (ctx.big_k / PI)
}

fn check_modulus(k: f64) -> Result<EllipticContext> {
    if !(0.0..1.0).contains(&k) {
        return Err(Error::Argument(format!("modulus {k} outside [0, 1)")));
    }
    EllipticContext::from_modulus(k)
}

/// Interior directions grouped with their multiplicities.
fn grouped(angles: &[f64]) -> Vec<(f64, i32)> {
    let mut out: Vec<(f64, i32)> = Vec::new();
    for &a in angles {
        match out.iter_mut().find(|(b, _)| *b == a) {
            Some(e) => e.1 += 1,
            None => out.push((a, 1)),
        }
    }
    out
}

fn massive_exp_ctx(ctx: &EllipticContext, path: &RhombusPath, u: Complex64) -> Result<Complex64> {
    let s = ctx.kp.sqrt();
    let mut e = c(1.0, 0.0);
    for (a, m) in grouped(path.interior()) {
        let j = jacobi_projective(kernel_arg(ctx, u, a), ctx.k2)?;
        e *= (I * s * j.sc()?).powi(m);
    }
    Ok(e)
}

/// Discrete massive exponential: product over the full steps of
/// `i sqrt(k') sc(K (u - alpha_j) / pi | k)`.
pub fn massive_exp(path: &RhombusPath, u: Complex64, k: f64) -> Result<Complex64> {
    let ctx = check_modulus(k)?;
    massive_exp_ctx(&ctx, path, u)
}

/// Endpoint factor whose quasi-periodicity matches the massive exponential.
fn h_ctx(ctx: &EllipticContext, path: &RhombusPath, u: Complex64) -> Result<Complex64> {
    let j1 = jacobi_projective(kernel_arg(ctx, u, path.alpha_first()), ctx.k2)?;
    let jn = jacobi_projective(kernel_arg(ctx, u, path.alpha_last()), ctx.k2)?;
    let kp = ctx.kp;
    Ok(match (path.first_black, path.last_black) {
        (true, true) => -kp * j1.nc()? * jn.nc()?,
        (true, false) => -kp.sqrt() * j1.nc()? * jn.dc()?,
        (false, true) => kp.sqrt() * j1.dc()? * jn.nc()?,
        (false, false) => j1.dc()? * jn.dc()?,
    })
}

fn prefactor(path: &RhombusPath, theta_b: f64) -> Complex64 {
    Complex64::from_polar(1.0, theta_b - 0.5 * (path.alpha_last() - path.alpha_first()))
}

fn f_ctx(ctx: &EllipticContext, path: &RhombusPath, theta_b: f64, u: Complex64) -> Result<Complex64> {
    Ok(prefactor(path, theta_b) * h_ctx(ctx, path, u)? * massive_exp_ctx(ctx, path, u)?)
}

/// Integrand of the local formula, meromorphic on the torus of modulus `k`.
pub fn f_bw(path: &RhombusPath, theta_b: f64, u: Complex64, k: f64) -> Result<Complex64> {
    let ctx = check_modulus(k)?;
    f_ctx(&ctx, path, theta_b, u)
}

/// The integrand at `k = 0` from trigonometric functions.
pub fn f_bw_critical(path: &RhombusPath, theta_b: f64, u: Complex64) -> Result<Complex64> {
    let half = |a: f64| (u - a) * 0.5;
    let sec = |z: Complex64| -> Result<Complex64> {
        let cz = z.cos();
        if cz.norm() < 1e-12 {
            return Err(Error::Pole(format!("{z}")));
        }
        Ok(1.0 / cz)
    };
    let mut e = c(1.0, 0.0);
    for &a in path.interior() {
        e *= I * sec(half(a))? * half(a).sin();
    }
    let h = sec(half(path.alpha_first()))? * sec(half(path.alpha_last()))?;
    let sign = match (path.first_black, path.last_black) {
        (true, true) | (true, false) => -1.0,
        _ => 1.0,
    };
    Ok(prefactor(path, theta_b) * sign * h * e)
}

fn contour_position(path: &RhombusPath, spec: &ContourSpec) -> Result<f64> {
    let x0 = spec.x0.unwrap_or(path.center);
    for &a in &path.angles {
        let d = (x0 - a - PI).rem_euclid(2.0 * PI);
        let dist = d.min(2.0 * PI - d);
        if dist < spec.delta {
            return Err(Error::Argument(format!(
                "contour at {x0} is {dist:.3} from the pole {}",
                a + PI
            )));
        }
    }
    Ok(x0)
}

/// Trapezoid sums with doubling until two successive values agree.
fn doubling<F>(spec: &ContourSpec, sum: F) -> Result<Complex64>
where
    F: Fn(usize, usize) -> Result<Complex64>,
{
    // sum(n, j) evaluates node j of the n-point rule
    let mut n = spec.start_nodes.max(4);
    let mut acc = c(0.0, 0.0);
    for j in 0..n {
        acc += sum(n, j)?;
    }
    let mut prev = acc / n as f64;
    while n < spec.max_nodes {
        let mut extra = c(0.0, 0.0);
        for j in 0..n {
            extra += sum(2 * n, 2 * j + 1)?;
        }
        acc += extra;
        n *= 2;
        let cur = acc / n as f64;
        if (cur - prev).norm() <= spec.tol {
            return Ok(cur);
        }
        prev = cur;
    }
    Err(Error::Root(format!("contour quadrature did not settle with {n} nodes")))
}

/// `Kcal_k^{-1}[b, w]` for an explicit path and the half-angle of the face of `b`.
pub fn kinv6v_path(path: &RhombusPath, theta_b: f64, k: f64, spec: &ContourSpec) -> Result<Complex64> {
    let ctx = check_modulus(k)?;
    let x0 = contour_position(path, spec)?;
    if k == 0.0 {
        // the torus opens into the full vertical line
        let l = CRITICAL_HALF_WIDTH;
        let mean = doubling(spec, |n, j| {
            let t = -l + 2.0 * l * j as f64 / n as f64;
            f_bw_critical(path, theta_b, c(x0, t))
        })?;
        return Ok(mean * 2.0 * l / (4.0 * PI));
    }
    let height = ctx.torus_height()?;
    let mean = doubling(spec, |n, j| f_ctx(&ctx, path, theta_b, c(x0, height * j as f64 / n as f64)))?;
    // K / (2 i pi^2) times i * height * mean
    Ok(mean * ctx.big_k * height / (2.0 * PI * PI))
}

/// `Kcal_k^{-1}[b, w]` on a rhombic lattice.
pub fn kinv6v_entry(lat: &RhombicLattice, b: Site, w: Site, k: f64, spec: &ContourSpec) -> Result<Complex64> {
    let path = lat.path(b, w)?;
    kinv6v_path(&path, lat.site_theta(b), k, spec)
}

/// Translate a pair so that the first site lies in the base 2 x 2 block.
fn normalized(b: Site, w: Site) -> (Site, Site) {
    let (dx, dy) = (-2 * b.x.div_euclid(2), -2 * b.y.div_euclid(2));
    (b.translated(dx, dy), w.translated(dx, dy))
}

/// Inverse of the eight-vertex Kasteleyn operator with moduli `k <= l`,
/// assembled from the six-vertex inverses of both moduli.
#[derive(Clone, Debug)]
pub struct LocalInverse {
    pub lattice: RhombicLattice,
    pub k: f64,
    pub l: f64,
    pub spec: ContourSpec,
}

/// An eight-vertex entry as `scale * (G_k[b, w] + sign_l G_l[b, w])`, the
/// bracket conjugated when `conj` is set, with `G` the six-vertex inverses.
#[derive(Clone, Copy)]
struct Need {
    b: Site,
    w: Site,
    conj: bool,
    scale: Complex64,
    sign_l: f64,
}

impl LocalInverse {
    pub fn new(lattice: RhombicLattice, k: f64, l: f64, spec: ContourSpec) -> Result<Self> {
        check_modulus(k)?;
        check_modulus(l)?;
        if k > l {
            return Err(Error::Argument(format!("moduli must satisfy k <= l, got ({k}, {l})")));
        }
        Ok(LocalInverse { lattice, k, l, spec })
    }

    pub fn weights(&self) -> ZInvWeights {
        ZInvWeights { k2: self.k * self.k, l2: self.l * self.l }
    }

    fn need(&self, x: Site, y: Site) -> Need {
        let lat = &self.lattice;
        let half = c(0.0, -0.5);
        match (x.is_black(), y.is_black()) {
            (false, true) => Need { b: y, w: x, conj: false, scale: half, sign_l: 1.0 },
            (true, false) => Need { b: x, w: y, conj: true, scale: half, sign_l: 1.0 },
            (false, false) => {
                let ph = Complex64::from_polar(1.0, lat.leg_phase(x));
                Need { b: RhombicLattice::partner(x), w: y, conj: true, scale: 0.5 * I * ph, sign_l: -1.0 }
            }
            (true, true) => {
                let ph = Complex64::from_polar(1.0, -lat.leg_phase(x));
                Need { b: y, w: RhombicLattice::partner(x), conj: false, scale: 0.5 * I * ph, sign_l: -1.0 }
            }
        }
    }

    /// `K^{-1}[x, y]` for many pairs, sharing six-vertex evaluations across
    /// translates by the period.
    pub fn entries(&self, pairs: &[(Site, Site)]) -> Result<Vec<Complex64>> {
        let needs: Vec<Need> = pairs.iter().map(|&(x, y)| self.need(x, y)).collect();
        let moduli: Vec<f64> = if self.k == self.l { vec![self.k] } else { vec![self.k, self.l] };
        let mut keys: BTreeMap<(usize, Site, Site), Complex64> = BTreeMap::new();
        for n in &needs {
            let Need { b, w, .. } = *n;
            let (nb, nw) = normalized(b, w);
            for m in 0..moduli.len() {
                keys.insert((m, nb, nw), c(0.0, 0.0));
            }
        }
        let list: Vec<(usize, Site, Site)> = keys.keys().cloned().collect();
        let values: Vec<Complex64> = list
            .par_iter()
            .map(|&(m, b, w)| kinv6v_entry(&self.lattice, b, w, moduli[m], &self.spec))
            .collect::<Result<_>>()?;
        for (key, v) in list.into_iter().zip(values) {
            keys.insert(key, v);
        }
        Ok(needs
            .iter()
            .map(|n| {
                let Need { b, w, conj, scale, sign_l } = *n;
                let (nb, nw) = normalized(b, w);
                let gk = keys[&(0, nb, nw)];
                let gl = if moduli.len() == 1 { gk } else { keys[&(1, nb, nw)] };
                let sum = gk + sign_l * gl;
                scale * if conj { sum.conj() } else { sum }
            })
            .collect())
    }

    pub fn entry(&self, x: Site, y: Site) -> Result<Complex64> {
        Ok(self.entries(&[(x, y)])?[0])
    }

    /// Largest deviation of `(K K^{-1})[x, y]` from the identity over the
    /// given rows and columns.
    pub fn row_residual(&self, rows: &[Site], cols: &[Site]) -> Result<f64> {
        let weights = self.weights();
        let mut pairs = Vec::new();
        let mut terms = Vec::new();
        for &x in rows {
            let row = self.lattice.k_row(x, &weights)?;
            for &y in cols {
                let start = pairs.len();
                for &(z, _) in &row {
                    pairs.push((z, y));
                }
                terms.push((x, y, start, row.clone()));
            }
        }
        let vals = self.entries(&pairs)?;
        let mut worst: f64 = 0.0;
        for (x, y, start, row) in terms {
            let s: Complex64 = row.iter().enumerate().map(|(j, &(_, kv))| kv * vals[start + j]).sum();
            let target = if x == y { 1.0 } else { 0.0 };
            worst = worst.max((s - target).norm());
        }
        Ok(worst)
    }

    /// Leg endpoints of the given edges, each edge named by one of its two
    /// decoration vertices, sorted without repetition.
    pub fn leg_vertices(edges: &[Site]) -> Vec<Site> {
        let mut v: Vec<Site> = edges.iter().flat_map(|&s| [s, RhombicLattice::partner(s)]).collect();
        v.sort();
        v.dedup();
        v
    }

    /// Principal minor of `K^{-1}` on the leg endpoints of `edges`.
    pub fn edge_minor(&self, edges: &[Site]) -> Result<Complex64> {
        let v = Self::leg_vertices(edges);
        if v.is_empty() {
            return Ok(c(1.0, 0.0));
        }
        let pairs: Vec<(Site, Site)> = v.iter().flat_map(|&a| v.iter().map(move |&b| (a, b))).collect();
        let vals = self.entries(&pairs)?;
        let n = v.len();
        Ok(det(&DMatrix::from_fn(n, n, |i, j| vals[i * n + j])))
    }

    /// Probability that all `edges` carry a dimer leg.
    pub fn edge_probability(&self, edges: &[Site]) -> Result<f64> {
        if !(self.k < self.l) {
            return Err(Error::Regime(format!("need 0 <= k < l < 1, got ({}, {})", self.k, self.l)));
        }
        let m = self.edge_minor(edges)?;
        if m.re < -MINOR_NEGATIVE_TOL {
            return Err(Error::Regime(format!("negative principal minor {m}")));
        }
        Ok(m.re.max(0.0).sqrt())
    }
}

/// Principal minors below `-MINOR_NEGATIVE_TOL` signal an inconsistency.
pub const MINOR_NEGATIVE_TOL: f64 = 1e-9;
/// Principal minors below this modulus are reported as indeterminate.
pub const MINOR_INDETERMINATE: f64 = 1e-12;

/// `K^{-1}_{k,l}[x, y]` on a rhombic lattice.
pub fn kinv8v_entries(lat: &RhombicLattice, x: Site, y: Site, k: f64, l: f64) -> Result<Complex64> {
    LocalInverse::new(*lat, k, l, ContourSpec::default())?.entry(x, y)
}

/// Probability that the edges next to the given decoration vertices all
/// belong to the configuration, for `0 <= k < l < 1`.
pub fn edge_probabilities_planar(lat: &RhombicLattice, edges: &[Site], k: f64, l: f64) -> Result<f64> {
    LocalInverse::new(*lat, k, l, ContourSpec::default())?.edge_probability(edges)
}
