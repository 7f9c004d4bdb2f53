//! Pfaffian formulas for partition functions and edge probabilities, checked
//! against enumeration.

use super::{angles_json, ordered_field, random_field, rel_err, require_surface, rng, Recorder, SuiteConfig};
use crate::brute_force::{boltzmann, partition_fn};
use crate::error::Result;
use crate::kasteleyn::{inverse_residual, inverse_switch, Kasteleyn, TORUS_SIGNS};
use crate::linalg::{det, identity, inverse, max_abs};
use crate::quad_graph::{corner_angles, Quadrangulation, Surface};
use crate::torus_spectral::sample_point;
use crate::weights::{ff_weights, FaceWeights};
use serde_json::json;

const SPHERE_TOL: f64 = 1e-10;
const TORUS_TOL: f64 = 1e-9;
const INVERSE_TOL: f64 = 1e-10;
const PROBABILITY_TOL: f64 = 1e-9;

fn marginal(q: &Quadrangulation, x: &[FaceWeights], edges: &[usize]) -> Result<f64> {
    Ok(boltzmann(q, x)?
        .into_iter()
        .filter(|(tau, _)| edges.iter().all(|&e| tau >> e & 1 == 1))
        .map(|(_, p)| p)
        .sum())
}

pub(super) fn sphere(q: &Quadrangulation, cfg: &SuiteConfig, rec: &mut Recorder) -> Result<f64> {
    require_surface(q, Surface::Sphere, "kasteleyn-sphere")?;
    let tol = cfg.tol.unwrap_or(SPHERE_TOL);
    let trials = cfg.trials.unwrap_or(20);
    let kast = Kasteleyn::new(q, &corner_angles(q)?)?;
    let bad = kast.admissibility_failures()?;
    rec.holds("admissible_orientation", bad.is_empty(), || json!({"failures": format!("{bad:?}")}));
    let mut r = rng(cfg.seed);
    let nf = q.num_faces();
    for trial in 0..trials {
        let t = random_field(&mut r, nf);
        let params = || json!({"trial": trial, "angles": angles_json(&t)});
        let x = ff_weights(&t);
        let z = partition_fn(q, &x)?;
        let prod: f64 = x.iter().map(|w| w.c).product();
        let d = det(&kast.k_matrix(&x)?);
        rec.identity("pfaffian_square", z * z, prod * prod * d.re, tol, params);
        rec.at_most("determinant_imaginary", d.im.abs() / d.norm(), tol, params);
        rec.identity("sphere_partition", kast.sphere_partition(&x)?, z, tol, params);
    }
    let t = ordered_field(&mut r, nf);
    let x = ff_weights(&t);
    let mut sets: Vec<Vec<usize>> = (0..q.num_edges()).map(|e| vec![e]).collect();
    let f = &q.faces[0];
    sets.push(vec![f.edges[0], f.edges[1]]);
    sets.push(vec![f.edges[0], f.edges[2]]);
    for edges in sets {
        let err = (kast.edge_probability_sphere(&x, &edges)? - marginal(q, &x, &edges)?).abs();
        rec.at_most("edge_probability", err, PROBABILITY_TOL, || {
            json!({"angles": angles_json(&t), "edges": edges})
        });
    }
    Ok(tol)
}

pub(super) fn torus(q: &Quadrangulation, cfg: &SuiteConfig, rec: &mut Recorder) -> Result<f64> {
    require_surface(q, Surface::Torus, "kasteleyn-torus")?;
    let tol = cfg.tol.unwrap_or(TORUS_TOL);
    let trials = cfg.trials.unwrap_or(20);
    let kast = Kasteleyn::new(q, &corner_angles(q)?)?;
    let mut r = rng(cfg.seed);
    let nf = q.num_faces();
    let fields: Vec<_> = (0..trials).map(|_| random_field(&mut r, nf)).collect();
    let mut data = Vec::with_capacity(trials);
    for t in &fields {
        let x = ff_weights(t);
        let prod: f64 = x.iter().map(|w| w.c).product();
        data.push((partition_fn(q, &x)?, prod, kast.torus_pfaffians(&x)?, kast.torus_partition(&x)?));
    }
    let combine = |s: &[f64; 4], prod: f64, p: &[f64; 4]| 0.5 * prod * (0..4).map(|i| s[i] * p[i]).sum::<f64>();
    // one-time calibration on the first field, then frozen for the rest
    let calibrated = data.first().and_then(|(z, prod, p, _)| {
        (0..16u32)
            .map(|mask| std::array::from_fn(|i| if mask >> i & 1 == 1 { -1.0 } else { 1.0 }))
            .find(|s: &[f64; 4]| rel_err(combine(s, *prod, p), *z) <= tol)
    });
    rec.holds("sign_calibration", calibrated.is_some(), || json!({"angles": fields.first().map(|t| angles_json(t))}));
    if let Some(s) = calibrated {
        rec.metric("calibrated_signs", s);
        rec.metric("matches_frozen_signs", s == TORUS_SIGNS || s.map(|v| -v) == TORUS_SIGNS);
        for (trial, (z, prod, p, frozen)) in data.iter().enumerate() {
            let params = || json!({"trial": trial, "angles": angles_json(&fields[trial])});
            rec.identity("four_pfaffian", combine(&s, *prod, p), *z, tol, params);
            rec.identity("frozen_sign_partition", *frozen, *z, tol, params);
        }
    }
    let d = kast.d_matrix();
    let n = kast.num_vertices();
    for trial in 0..trials {
        let (zt, wt) = sample_point(&mut r, 0.5, 2.0);
        let first = random_field(&mut r, nf);
        let second = random_field(&mut r, nf);
        let params = || {
            json!({"trial": trial, "z": [zt.re, zt.im], "w": [wt.re, wt.im],
                   "first": angles_json(&first), "second": angles_json(&second)})
        };
        let twist = Some((zt, wt));
        let (m1, m2) = inverse_switch(&kast, &first, &second, twist)?;
        let k1 = kast.k_twisted(&ff_weights(&first), zt, wt)?;
        let k2 = kast.k_twisted(&ff_weights(&second), zt, wt)?;
        rec.at_most("twisted_inverse_switching", inverse_residual(&k1, &m1).max(inverse_residual(&k2, &m2)), INVERSE_TOL, params);
        let t = kast.t_matrix(twist);
        rec.at_most("involution", max_abs(&(&t * &t - identity(n))), INVERSE_TOL, params);
        let inv = inverse(&k1)?;
        let comm = max_abs(&(&inv * &t - &t * &inv - &d)).max(max_abs(&(&k1 * &t - &t * &k1 + &k1 * &d * &k1)));
        rec.at_most("commutator", comm, INVERSE_TOL, params);
    }
    Ok(tol)
}
