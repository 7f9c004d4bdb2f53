//! Characteristic polynomials of toric Kasteleyn matrices, their switching and
//! factorization identities, free energy, amoebas and torus correlations.

use crate::error::{Error, Result};
use crate::kasteleyn::{inverse_switch, Flavor, Kasteleyn};
use crate::linalg::{c, det, CMat, I};
use crate::quad_graph::{corner_angles, Color, Quadrangulation, Surface};
use crate::weights::{c2, ff_weights, Angles, FaceWeights, WeightField};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;

/// Evaluator of the characteristic polynomials of one toric instance.
#[derive(Clone, Debug)]
pub struct SpectralSampler {
    pub kast: Kasteleyn,
    pub weights: WeightField,
}

impl SpectralSampler {
    pub fn new(q: &Quadrangulation, weights: WeightField) -> Result<Self> {
        if q.surface != Surface::Torus {
            return Err(Error::Surface("characteristic polynomial needs a torus".into()));
        }
        let kast = Kasteleyn::new(q, &corner_angles(q)?)?;
        Ok(SpectralSampler { kast, weights })
    }

    pub fn from_angles(q: &Quadrangulation, angles: &[Angles]) -> Result<Self> {
        Self::new(q, ff_weights(angles))
    }

    /// `det K(z, w)` for the stored weights.
    pub fn p8v(&self, z: Complex64, w: Complex64) -> Result<Complex64> {
        p8v(&self.kast, &self.weights, z, w)
    }
}

pub fn p8v(kast: &Kasteleyn, x: &[FaceWeights], z: Complex64, w: Complex64) -> Result<Complex64> {
    Ok(det(&kast.assemble(x, Flavor::SkewHermitian, Some((z, w)))?))
}

/// Bipartite block of the six-vertex matrix, rows indexed by white and
/// columns by black decoration vertices: `-i K[b, w]`.
pub fn six_vertex_block(kast: &Kasteleyn, x: &[FaceWeights], z: Complex64, w: Complex64) -> Result<CMat> {
    if let Some(f) = x.iter().position(|v| v.d != 0.0) {
        return Err(Error::Argument(format!("face {f} has a diagonal weight; not a six-vertex field")));
    }
    let k = kast.assemble(x, Flavor::SkewHermitian, Some((z, w)))?;
    let colors = &kast.gt.colors;
    let blacks: Vec<usize> = (0..colors.len()).filter(|&v| colors[v] == Color::Black).collect();
    let whites: Vec<usize> = (0..colors.len()).filter(|&v| colors[v] == Color::White).collect();
    Ok(CMat::from_fn(whites.len(), blacks.len(), |i, j| -I * k[(blacks[j], whites[i])]))
}

/// Six-vertex characteristic polynomial for the angle field `(alpha, alpha)`.
pub fn p6v(kast: &Kasteleyn, alpha: &[f64], z: Complex64, w: Complex64) -> Result<Complex64> {
    let x = ff_weights(&alpha.iter().map(|&a| Angles::new(a, a)).collect::<Vec<_>>());
    Ok(det(&six_vertex_block(kast, &x, z, w)?))
}

/// Random point with moduli in `[lo, hi]` and uniform phases.
pub fn sample_point<R: rand::Rng>(rng: &mut R, lo: f64, hi: f64) -> (Complex64, Complex64) {
    let mut one = || Complex64::from_polar(rng.random_range(lo..hi), rng.random_range(0.0..2.0 * PI));
    (one(), one())
}

#[derive(Clone, Debug, Serialize)]
pub struct SwitchReport {
    pub samples: usize,
    /// Largest relative residual of `P_ab P_a'b' - c2 P_ab' P_a'b`.
    pub max_residual: f64,
    /// `c2` from the weights.
    pub c2: f64,
    /// Ratio `P_ab P_a'b' / (P_ab' P_a'b)` at the first sample.
    pub fitted_c2: [f64; 2],
}

fn mixed(p: &[Angles], r: &[Angles]) -> Vec<Angles> {
    p.iter().zip(r).map(|(u, v)| Angles::new(u.alpha, v.beta)).collect()
}

/// Polynomial switching identity at the given sample points.
pub fn poly_switch_check(
    kast: &Kasteleyn,
    first: &[Angles],
    second: &[Angles],
    samples: &[(Complex64, Complex64)],
) -> Result<SwitchReport> {
    let fields = [
        ff_weights(first),
        ff_weights(second),
        ff_weights(&mixed(first, second)),
        ff_weights(&mixed(second, first)),
    ];
    let constant = c2(first, second)?;
    let values: Vec<(Complex64, Complex64)> = samples
        .par_iter()
        .map(|&(z, w)| -> Result<(Complex64, Complex64)> {
            let p: Vec<Complex64> = fields.iter().map(|x| p8v(kast, x, z, w)).collect::<Result<_>>()?;
            Ok((p[0] * p[1], p[2] * p[3]))
        })
        .collect::<Result<_>>()?;
    let max_residual = values
        .iter()
        .map(|&(lhs, rhs)| {
            let scale = lhs.norm().max((rhs * constant).norm());
            if scale == 0.0 {
                0.0
            } else {
                (lhs - rhs * constant).norm() / scale
            }
        })
        .fold(0.0, f64::max);
    let fitted = values.first().map(|&(l, r)| l / r).unwrap_or(c(constant, 0.0));
    Ok(SwitchReport {
        samples: samples.len(),
        max_residual,
        c2: constant,
        fitted_c2: [fitted.re, fitted.im],
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct FactorizationReport {
    pub samples: usize,
    /// Largest relative deviation of `|P8V| / (|P6V_a| |P6V_b|)` from `|c~|`.
    pub max_residual: f64,
    pub c_tilde_abs: f64,
    pub fitted_abs: f64,
    /// Phase of the fitted constant at the first sample.
    pub fitted_phase: f64,
    /// Largest deviation of `P8V_{a,a} / P6V_a^2` from the unit circle.
    pub six_vertex_square: f64,
}

/// Factorization of the eight-vertex polynomial into two six-vertex ones.
pub fn factorization_check(
    kast: &Kasteleyn,
    angles: &[Angles],
    samples: &[(Complex64, Complex64)],
) -> Result<FactorizationReport> {
    let x = ff_weights(angles);
    let alpha: Vec<f64> = angles.iter().map(|t| t.alpha).collect();
    let beta: Vec<f64> = angles.iter().map(|t| t.beta).collect();
    let target = crate::weights::c_tilde_abs(angles)?;
    let diag = ff_weights(&alpha.iter().map(|&a| Angles::new(a, a)).collect::<Vec<_>>());
    let ratios: Vec<(Complex64, f64)> = samples
        .par_iter()
        .map(|&(z, w)| -> Result<(Complex64, f64)> {
            let pa = p6v(kast, &alpha, z, w)?;
            let pb = p6v(kast, &beta, z, w)?;
            let square = p8v(kast, &diag, z, w)? / (pa * pa);
            Ok((p8v(kast, &x, z, w)? / (pa * pb), (square.norm() - 1.0).abs()))
        })
        .collect::<Result<_>>()?;
    let max_residual = ratios.iter().map(|(r, _)| (r.norm() - target).abs() / target).fold(0.0, f64::max);
    let six_vertex_square = ratios.iter().map(|&(_, s)| s).fold(0.0, f64::max);
    let first = ratios.first().map(|&(r, _)| r).unwrap_or(c(target, 0.0));
    Ok(FactorizationReport {
        samples: samples.len(),
        max_residual,
        c_tilde_abs: target,
        fitted_abs: first.norm(),
        fitted_phase: first.arg(),
        six_vertex_square,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct FreeEnergy {
    pub value: f64,
    /// Difference between the last two refinement levels.
    pub error: f64,
    /// Points per direction at the last level.
    pub grid: usize,
    pub converged: bool,
}

/// Mean of `log |P|` over the unit torus by the tensor trapezoid rule on a
/// grid shifted by half a step.
fn mean_log_abs(sampler: &SpectralSampler, n: usize) -> Result<f64> {
    let h = 2.0 * PI / n as f64;
    let rows: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|i| -> Result<f64> {
            let z = Complex64::from_polar(1.0, (i as f64 + 0.5) * h);
            let mut s = 0.0;
            for j in 0..n {
                let w = Complex64::from_polar(1.0, (j as f64 + 0.5) * h);
                s += sampler.p8v(z, w)?.norm().max(f64::MIN_POSITIVE).ln();
            }
            Ok(s)
        })
        .collect::<Result<_>>()?;
    Ok(rows.iter().sum::<f64>() / (n * n) as f64)
}

/// Free energy per fundamental domain, `-sum log C - mean(log |P|) / 2`,
/// refined by doubling the grid from `start` until two successive levels
/// agree to `tol` or the grid reaches `cap` points per direction.
pub fn free_energy(sampler: &SpectralSampler, start: usize, cap: usize, tol: f64) -> Result<FreeEnergy> {
    if sampler.weights.iter().any(|w| w.c <= 0.0) {
        return Err(Error::Regime("free energy needs positive C".into()));
    }
    let log_c: f64 = sampler.weights.iter().map(|w| w.c.ln()).sum();
    let mut n = start.max(2);
    let mut prev = -log_c - 0.5 * mean_log_abs(sampler, n)?;
    loop {
        let next_n = 2 * n;
        if next_n > cap {
            return Ok(FreeEnergy { value: prev, error: f64::NAN, grid: n, converged: false });
        }
        let value = -log_c - 0.5 * mean_log_abs(sampler, next_n)?;
        let error = (value - prev).abs();
        n = next_n;
        if error < tol || 2 * n > cap {
            return Ok(FreeEnergy { value, error, grid: n, converged: error < tol });
        }
        prev = value;
    }
}

/// `-(log Z) / cells` from the four-Pfaffian partition function.
pub fn finite_free_energy(kast: &Kasteleyn, x: &[FaceWeights], cells: usize) -> Result<f64> {
    let z = kast.torus_partition(x)?;
    if z <= 0.0 {
        return Err(Error::Regime(format!("non-positive partition function {z}")));
    }
    Ok(-z.ln() / cells as f64)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum AmoebaTag {
    #[serde(rename = "p8v")]
    P8v,
    #[serde(rename = "p6v_a")]
    P6vA,
    #[serde(rename = "p6v_b")]
    P6vB,
}

impl AmoebaTag {
    pub fn name(self) -> &'static str {
        match self {
            AmoebaTag::P8v => "p8v",
            AmoebaTag::P6vA => "p6v_a",
            AmoebaTag::P6vB => "p6v_b",
        }
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct AmoebaPoint {
    pub x: f64,
    pub y: f64,
    pub tag: AmoebaTag,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct AmoebaCloud {
    pub points: Vec<AmoebaPoint>,
}

impl AmoebaCloud {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("x,y,tag\n");
        for p in &self.points {
            s.push_str(&format!("{},{},{}\n", p.x, p.y, p.tag.name()));
        }
        s
    }

    pub fn tagged(&self, tag: AmoebaTag) -> Vec<(f64, f64)> {
        self.points.iter().filter(|p| p.tag == tag).map(|p| (p.x, p.y)).collect()
    }
}

/// Square window of `(log|z|, log|w|)` sampled on a regular grid, with the
/// phase torus of each fiber scanned on `phases x phases` points.
#[derive(Clone, Copy, Debug)]
pub struct AmoebaGrid {
    pub half_width: f64,
    pub resolution: usize,
    pub phases: usize,
    /// Relative size of `|P|` below which a fiber minimum counts as a zero.
    pub tol: f64,
}

impl Default for AmoebaGrid {
    fn default() -> Self {
        AmoebaGrid { half_width: 3.0, resolution: 41, phases: 32, tol: 1e-6 }
    }
}

impl AmoebaGrid {
    pub fn coords(&self) -> Vec<f64> {
        let r = self.resolution.max(2);
        (0..r)
            .map(|i| -self.half_width + 2.0 * self.half_width * i as f64 / (r - 1) as f64)
            .collect()
    }
}

/// Whether `p` vanishes somewhere on the fiber over `(x, y)`: coarse scan of
/// the phase torus, then compass search from the best grid cells.
pub fn fiber_has_zero<F>(p: &F, x: f64, y: f64, grid: &AmoebaGrid) -> Result<bool>
where
    F: Fn(Complex64, Complex64) -> Result<Complex64>,
{
    let m = grid.phases.max(4);
    let h = 2.0 * PI / m as f64;
    let eval = |s: f64, t: f64| -> Result<f64> {
        Ok(p(Complex64::from_polar(x.exp(), s), Complex64::from_polar(y.exp(), t))?.norm())
    };
    let mut values = vec![0.0; m * m];
    for i in 0..m {
        for j in 0..m {
            values[i * m + j] = eval(i as f64 * h, j as f64 * h)?;
        }
    }
    let scale = values.iter().sum::<f64>() / values.len() as f64;
    if scale == 0.0 {
        return Ok(true);
    }
    // local minima of the coarse grid, best first
    let mut starts: Vec<(f64, usize, usize)> = Vec::new();
    for i in 0..m {
        for j in 0..m {
            let v = values[i * m + j];
            let is_min = (-1i64..=1).all(|di| {
                (-1i64..=1).all(|dj| {
                    let ii = (i as i64 + di).rem_euclid(m as i64) as usize;
                    let jj = (j as i64 + dj).rem_euclid(m as i64) as usize;
                    values[ii * m + jj] >= v
                })
            });
            if is_min {
                starts.push((v, i, j));
            }
        }
    }
    starts.sort_by(|a, b| a.0.total_cmp(&b.0));
    for &(v0, i, j) in starts.iter().take(12) {
        let (mut s, mut t, mut best) = (i as f64 * h, j as f64 * h, v0);
        let mut step = h;
        while step > 1e-12 {
            let mut moved = false;
            for (ds, dt) in [(1.0, 0.0), (-1.0, 0.0), (0.0, 1.0), (0.0, -1.0), (1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)] {
                let v = eval(s + ds * step, t + dt * step)?;
                if v < best {
                    best = v;
                    s += ds * step;
                    t += dt * step;
                    moved = true;
                    break;
                }
            }
            if !moved {
                step *= 0.5;
            }
            if best < grid.tol * scale {
                return Ok(true);
            }
        }
    }
    Ok(false)
}

/// Amoeba points of the eight-vertex polynomial and of both six-vertex factors.
pub fn amoeba_sample(kast: &Kasteleyn, angles: &[Angles], grid: &AmoebaGrid) -> Result<AmoebaCloud> {
    let x = ff_weights(angles);
    let alpha: Vec<f64> = angles.iter().map(|t| t.alpha).collect();
    let beta: Vec<f64> = angles.iter().map(|t| t.beta).collect();
    let coords = grid.coords();
    let cells: Vec<(f64, f64)> = coords.iter().flat_map(|&a| coords.iter().map(move |&b| (a, b))).collect();
    let found: Vec<Vec<AmoebaPoint>> = cells
        .par_iter()
        .map(|&(cx, cy)| -> Result<Vec<AmoebaPoint>> {
            let mut out = Vec::new();
            let p8 = |z, w| p8v(kast, &x, z, w);
            let pa = |z, w| p6v(kast, &alpha, z, w);
            let pb = |z, w| p6v(kast, &beta, z, w);
            if fiber_has_zero(&p8, cx, cy, grid)? {
                out.push(AmoebaPoint { x: cx, y: cy, tag: AmoebaTag::P8v });
            }
            if fiber_has_zero(&pa, cx, cy, grid)? {
                out.push(AmoebaPoint { x: cx, y: cy, tag: AmoebaTag::P6vA });
            }
            if fiber_has_zero(&pb, cx, cy, grid)? {
                out.push(AmoebaPoint { x: cx, y: cy, tag: AmoebaTag::P6vB });
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;
    Ok(AmoebaCloud { points: found.into_iter().flatten().collect() })
}

/// Inverse switching at a twist `(z, w)`.
pub fn torus_inverse_switch(
    kast: &Kasteleyn,
    first: &[Angles],
    second: &[Angles],
    z: Complex64,
    w: Complex64,
) -> Result<(CMat, CMat)> {
    if kast.gt.surface != Surface::Torus {
        return Err(Error::Surface("twisted inverse switching needs a torus".into()));
    }
    inverse_switch(kast, first, second, Some((z, w)))
}
