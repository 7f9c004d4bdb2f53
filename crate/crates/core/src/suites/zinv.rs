//! Elliptic weights on rhombic lattices: Yang-Baxter relations, local
//! inverse formulas and decay rates.

use super::{rng, Recorder, SuiteConfig};
use crate::error::{Error, Result};
use crate::z_invariant::asymptotics::{cardinal_check, critical_exponent_scan, landen_residual};
use crate::z_invariant::oracle::bloch_inverse;
use crate::z_invariant::ybe::{star_triangle_weights, ybe_residuals, ybe_residuals_for};
use crate::z_invariant::{chi, kinv6v_entry, u0, ContourSpec, LocalInverse, RhombicLattice, RhombusPath, Site};
use rand::Rng;
use serde_json::json;
use std::f64::consts::{FRAC_PI_2, PI};

const YBE_TOL: f64 = 1e-10;
const PERTURBATION: f64 = 1e-3;
const PERTURBATION_FLOOR: f64 = 1e-4;
const ROW_TOL: f64 = 1e-7;
const SHIFT_TOL: f64 = 1e-10;
const ORACLE_TOL: f64 = 1e-6;
const ORACLE_GRID: usize = 512;
const EXPONENT_RATIO: f64 = 2.0;
const EXPONENT_LIMIT_TOL: f64 = 0.05;
const LANDEN_TOL: f64 = 1e-9;

/// Random half-angles summing to `pi/2`, each at least 0.02.
fn random_triple(r: &mut impl Rng) -> [f64; 3] {
    let a = r.random_range(0.05..1.4);
    let b = r.random_range(0.05..(FRAC_PI_2 - a - 0.05).max(0.06));
    let b = b.min(FRAC_PI_2 - a - 0.02);
    [a, b, FRAC_PI_2 - a - b]
}

pub(super) fn ybe(cfg: &SuiteConfig, rec: &mut Recorder) -> Result<f64> {
    let tol = cfg.tol.unwrap_or(YBE_TOL);
    let mut r = rng(cfg.seed);
    for trial in 0..cfg.trials.unwrap_or(50) {
        let theta = random_triple(&mut r);
        let k2 = cfg.k2.unwrap_or_else(|| r.random_range(-0.99..0.99));
        let l2 = cfg.l2.unwrap_or_else(|| r.random_range(-0.99..0.99));
        let params = || json!({"trial": trial, "theta": theta, "k2": k2, "l2": l2});
        let res = ybe_residuals(theta, k2, l2)?;
        rec.at_most("ybe_residual", res.max(), tol, params);
        rec.holds("relation_count", res.residuals.len() == 16, params);
        let (mut x, y) = star_triangle_weights(theta, k2, l2)?;
        x[1].a += PERTURBATION;
        rec.at_least("perturbation_sensitivity", ybe_residuals_for(&x, &y)?.max(), PERTURBATION_FLOOR, params);
    }
    Ok(tol)
}

fn moduli(cfg: &SuiteConfig) -> Result<(f64, f64)> {
    let (k2, l2) = (cfg.k2.unwrap_or(0.09), cfg.l2.unwrap_or(0.49));
    if !(0.0 <= k2 && k2 < l2 && l2 < 1.0) {
        return Err(Error::Regime(format!("local inverse needs 0 <= k2 < l2 < 1, got ({k2}, {l2})")));
    }
    Ok((k2.sqrt(), l2.sqrt()))
}

fn patch(n: i64) -> Vec<Site> {
    let mut v = Vec::new();
    for x in 0..n {
        for y in 0..n {
            for i in 0..4 {
                v.push(Site::new(x, y, i));
            }
        }
    }
    v
}

pub(super) fn local_inverse(cfg: &SuiteConfig, rec: &mut Recorder) -> Result<f64> {
    let tol = cfg.tol.unwrap_or(ROW_TOL);
    let (k, l) = moduli(cfg)?;
    let lat = RhombicLattice::square();
    let spec = ContourSpec::default();
    let li = LocalInverse::new(lat, k, l, spec)?;
    let mut r = rng(cfg.seed);
    let sites = patch(10);
    let interior: Vec<Site> = sites.iter().copied().filter(|s| (1..9).contains(&s.x) && (1..9).contains(&s.y)).collect();
    let rows: Vec<Site> = (0..cfg.trials.unwrap_or(60)).map(|_| interior[r.random_range(0..interior.len())]).collect();
    let mut cols: Vec<Site> = (0..6).map(|_| sites[r.random_range(0..sites.len())]).collect();
    cols.extend(rows.iter().take(4).copied());
    let site_json = |s: &Site| [s.x, s.y, s.i as i64];
    let res = li.row_residual(&rows, &cols)?;
    rec.at_most("row_identity", res, tol, || {
        json!({"k": k, "l": l, "rows": rows.iter().map(site_json).collect::<Vec<_>>(),
               "cols": cols.iter().map(site_json).collect::<Vec<_>>()})
    });
    rec.metric("rows", rows.len());
    rec.metric("moduli", [k, l]);
    for (x, y) in [(3, 0), (2, 2), (4, 1)] {
        let b = RhombicLattice::site_of_edge((0, 0), (0, 1), true)?;
        let w = RhombicLattice::site_of_edge((x, y), (x, y + 1), false)?;
        let p = lat.path(b, w)?;
        for m in [k, l] {
            let lo = kinv6v_entry(&lat, b, w, m, &ContourSpec { x0: Some(p.center - 0.2), ..spec })?;
            let hi = kinv6v_entry(&lat, b, w, m, &ContourSpec { x0: Some(p.center + 0.2), ..spec })?;
            rec.at_most("contour_shift", (lo - hi).norm(), SHIFT_TOL, || {
                json!({"modulus": m, "b": site_json(&b), "w": site_json(&w)})
            });
        }
    }
    let pairs: Vec<(Site, Site)> = (0..40)
        .map(|_| {
            let x = Site::new(r.random_range(0..2), r.random_range(0..2), r.random_range(0..4));
            let y = Site::new(r.random_range(-4..5), r.random_range(-4..5), r.random_range(0..4));
            (x, y)
        })
        .collect();
    let oracle = bloch_inverse(&lat, &li.weights(), ORACLE_GRID, &pairs)?;
    let local = li.entries(&pairs)?;
    for ((x, y), (a, b)) in pairs.iter().zip(local.iter().zip(&oracle)) {
        rec.at_most("oracle_agreement", (a - b).norm(), ORACLE_TOL, || {
            json!({"x": site_json(x), "y": site_json(y), "local": [a.re, a.im], "oracle": [b.re, b.im]})
        });
    }
    rec.metric("oracle_grid", ORACLE_GRID);
    Ok(tol)
}

/// Path from the black end of the vertical edge at the origin to the white
/// end of the vertical edge at `(x, y)`.
pub fn vertical_path(lat: &RhombicLattice, x: i64, y: i64) -> Result<(Site, Site, RhombusPath)> {
    let b = RhombicLattice::site_of_edge((0, 0), (0, 1), true)?;
    let w = RhombicLattice::site_of_edge((x, y), (x, y + 1), false)?;
    Ok((b, w, lat.path(b, w)?))
}

/// Paths of mixed directions on the square and the `pi/3` rhombic lattices.
pub fn scan_paths() -> Result<Vec<RhombusPath>> {
    let sq = RhombicLattice::square();
    let rh = RhombicLattice::new(0.0, PI / 3.0)?;
    let ends = [(&sq, 12, 0), (&sq, 6, 6), (&sq, 8, 4), (&sq, 9, 3), (&rh, 6, 3), (&rh, 3, 7)];
    ends.iter().map(|&(lat, x, y)| Ok(vertical_path(lat, x, y)?.2)).collect()
}

pub(super) fn monotonicity(_cfg: &SuiteConfig, rec: &mut Recorder) -> Result<f64> {
    let ks: Vec<f64> = (1..=9).map(|j| j as f64 / 10.0).collect();
    let mut rates = Vec::new();
    for (j, p) in scan_paths()?.iter().enumerate() {
        let abs: Vec<f64> = ks.iter().map(|&k| Ok(chi(p, u0(p, k)?, k)?.abs())).collect::<Result<_>>()?;
        rec.holds("strictly_increasing", abs.windows(2).all(|w| w[1] > w[0]), || json!({"path": j, "rates": abs}));
        for &k in &ks {
            let u = u0(p, k)?;
            rec.at_most("landen_characterization", landen_residual(p, u, k)?.abs(), LANDEN_TOL, || {
                json!({"path": j, "k": k})
            });
        }
        if let Some(ok) = cardinal_check(p, 0.5)? {
            rec.holds("cardinal_inequality", ok, || json!({"path": j, "k": 0.5}));
        }
        rates.push(abs);
    }
    rec.metric("k", &ks);
    rec.metric("abs_rates", rates);
    Ok(LANDEN_TOL)
}

pub(super) fn exponent(cfg: &SuiteConfig, rec: &mut Recorder) -> Result<f64> {
    let tol = cfg.tol.unwrap_or(EXPONENT_LIMIT_TOL);
    let ks: Vec<f64> = (1..=10).map(|j| j as f64 / 100.0).collect();
    let n = 10usize;
    let mut angles = vec![-FRAC_PI_2];
    angles.extend(std::iter::repeat_n(0.0, n));
    angles.push(FRAC_PI_2);
    let straight = RhombusPath::from_angles(angles, true, n % 2 == 0, n as f64)?;
    let scan = critical_exponent_scan(&straight, &[0.01])?;
    let limit = -((straight.len() - 2) as f64) / (4.0 * straight.distance);
    rec.at_most("equal_angle_limit", super::rel_err(scan.scaled[0], limit), tol, || json!({"k": 0.01, "steps": n}));
    rec.metric("equal_angle_scaled", scan.scaled[0]);
    rec.metric("equal_angle_limit", limit);
    let diag = vertical_path(&RhombicLattice::square(), 10, 10)?.2;
    let scan = critical_exponent_scan(&diag, &ks)?;
    rec.at_most("scaled_ratio", scan.ratio, EXPONENT_RATIO, || json!({"k": ks}));
    rec.metric("scan", &scan);
    Ok(tol)
}
