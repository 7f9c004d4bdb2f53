//! Identities between characteristic polynomials on tori.

use super::{angles_json, random_field, rel_err, require_surface, rng, Recorder, SuiteConfig};
use crate::error::Result;
use crate::kasteleyn::Kasteleyn;
use crate::quad_graph::{corner_angles, Quadrangulation, Surface};
use crate::torus_spectral::{factorization_check, poly_switch_check, sample_point};
use crate::weights::c_tilde_abs;
use num_complex::Complex64;
use serde_json::json;

const POLY_TOL: f64 = 1e-8;
const SAMPLES: usize = 100;

fn points(r: &mut rand_chacha::ChaCha8Rng) -> Vec<(Complex64, Complex64)> {
    (0..SAMPLES).map(|_| sample_point(r, 0.5, 2.0)).collect()
}

pub(super) fn poly_switch(q: &Quadrangulation, cfg: &SuiteConfig, rec: &mut Recorder) -> Result<f64> {
    require_surface(q, Surface::Torus, "poly-switch")?;
    let tol = cfg.tol.unwrap_or(POLY_TOL);
    let kast = Kasteleyn::new(q, &corner_angles(q)?)?;
    let mut r = rng(cfg.seed);
    let pts = points(&mut r);
    let nf = q.num_faces();
    for trial in 0..cfg.trials.unwrap_or(3) {
        let first = random_field(&mut r, nf);
        let second = random_field(&mut r, nf);
        let params = || json!({"trial": trial, "first": angles_json(&first), "second": angles_json(&second)});
        let rep = poly_switch_check(&kast, &first, &second, &pts)?;
        rec.at_most("polynomial_switching", rep.max_residual, tol, params);
        let fitted = Complex64::new(rep.fitted_c2[0], rep.fitted_c2[1]);
        rec.at_most("fitted_constant", (fitted - rep.c2).norm() / rep.c2, tol, params);
    }
    rec.metric("samples", SAMPLES);
    Ok(tol)
}

pub(super) fn factorization(q: &Quadrangulation, cfg: &SuiteConfig, rec: &mut Recorder) -> Result<f64> {
    require_surface(q, Surface::Torus, "factorization")?;
    let tol = cfg.tol.unwrap_or(POLY_TOL);
    let kast = Kasteleyn::new(q, &corner_angles(q)?)?;
    let mut r = rng(cfg.seed);
    let pts = points(&mut r);
    let nf = q.num_faces();
    let mut phases = Vec::new();
    for trial in 0..cfg.trials.unwrap_or(3) {
        let angles = random_field(&mut r, nf);
        let params = || json!({"trial": trial, "angles": angles_json(&angles)});
        let rep = factorization_check(&kast, &angles, &pts)?;
        rec.at_most("factorization", rep.max_residual, tol, params);
        rec.at_most("fitted_abs_constant", rel_err(rep.fitted_abs, c_tilde_abs(&angles)?), tol, params);
        rec.at_most("six_vertex_square", rep.six_vertex_square, tol, params);
        phases.push(rep.fitted_phase);
    }
    rec.metric("samples", SAMPLES);
    rec.metric("fitted_phases", phases);
    Ok(tol)
}
