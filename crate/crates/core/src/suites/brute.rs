//! Suites checked against exhaustive enumeration on small spheres.

use super::{angles_json, ordered_field, random_field, require_surface, rng, Recorder, SuiteConfig};
use crate::brute_force::forms::{
    bilinear, correlator_by_forms, fourier, fourier_naive, image_of_phi, kernel_of_psi, orthogonal, rank,
    phi, psi, sum_over, symplectic, vertex_mask, weight_table, xor_with_defects,
};
use crate::brute_force::{
    correlator, ising_correlator, ising_partition, partition_fn, switched_insertions, total_variation, xor_distribution,
    Insertion, VertexSets,
};
use crate::error::Result;
use crate::kasteleyn::{inverse_residual, inverse_switch, Kasteleyn};
use crate::linalg::{inverse, max_abs};
use crate::quad_graph::{corner_angles, diagonal_path, Color, Quadrangulation, Surface};
use crate::weights::{
    c0, c1, duality_face, duality_hat, ff_weights, ising_couplings, spin_face_weights, Angles, FaceWeights, Paths,
};
use num_complex::Complex64;
use serde_json::json;

const BRUTE_TOL: f64 = 1e-10;
const EXACT_TOL: f64 = 1e-12;
const XOR_TOL: f64 = 1e-12;

fn mixed(p: &[Angles], r: &[Angles]) -> Vec<Angles> {
    p.iter().zip(r).map(|(u, v)| Angles::new(u.alpha, v.beta)).collect()
}

/// Order and disorder sets joined pairwise by shortest diagonal paths.
fn insertion(q: &Quadrangulation, ob: &[usize], ow: &[usize], db: &[usize], dw: &[usize]) -> Result<Insertion> {
    let path = |vs: &[usize]| -> Result<Vec<usize>> {
        let mut out = Vec::new();
        for c in vs.chunks(2) {
            out.extend(diagonal_path(q, c[0], c[1])?);
        }
        Ok(out)
    };
    Ok(Insertion {
        sets: VertexSets {
            order_black: ob.to_vec(),
            order_white: ow.to_vec(),
            disorder_black: db.to_vec(),
            disorder_white: dw.to_vec(),
        },
        paths: Paths {
            order_black: path(ob)?,
            order_white: path(ow)?,
            disorder_black: path(db)?,
            disorder_white: path(dw)?,
        },
    })
}

fn corr(q: &Quadrangulation, x: &[FaceWeights], ins: &Insertion) -> Result<f64> {
    correlator(q, x, &ins.sets, &ins.paths)
}

/// Four black and four white vertices, or `None` on smaller graphs.
fn corners(q: &Quadrangulation) -> Option<(Vec<usize>, Vec<usize>)> {
    let (b, w) = (q.blacks(), q.whites());
    (b.len() >= 4 && w.len() >= 4).then_some((b, w))
}

pub(super) fn switching(q: &Quadrangulation, cfg: &SuiteConfig, rec: &mut Recorder) -> Result<f64> {
    require_surface(q, Surface::Sphere, "switching")?;
    let tol = cfg.tol.unwrap_or(BRUTE_TOL);
    let trials = cfg.trials.unwrap_or(20);
    let nf = q.num_faces();
    let kast = Kasteleyn::new(q, &corner_angles(q)?)?;
    let mut r = rng(cfg.seed);
    let pair = match corners(q) {
        Some((b, w)) => {
            let first = insertion(q, &[b[0], b[1]], &[w[0], w[1]], &[b[2], b[3]], &[])?;
            let second = insertion(q, &[b[1], b[2]], &[], &[], &[w[2], w[3]])?;
            let (third, fourth) = switched_insertions(&first, &second);
            Some([first, second, third, fourth])
        }
        None => None,
    };
    rec.metric("correlator_insertions", pair.is_some());
    let d = kast.d_matrix();
    let t = kast.t_matrix(None);
    for trial in 0..trials {
        let t1 = random_field(&mut r, nf);
        let t2 = random_field(&mut r, nf);
        let params = || json!({"trial": trial, "first": angles_json(&t1), "second": angles_json(&t2)});
        let z = |t: &[Angles]| partition_fn(q, &ff_weights(t));
        let (a, b) = (mixed(&t1, &t2), mixed(&t2, &t1));
        let lhs = z(&t1)? * z(&t2)?;
        let rhs = c1(&t1, &t2)? * z(&a)? * z(&b)?;
        rec.identity("partition_switching", lhs, rhs, tol, params);
        if let Some(ins) = &pair {
            let lhs = corr(q, &ff_weights(&t1), &ins[0])? * corr(q, &ff_weights(&t2), &ins[1])?;
            let rhs = c1(&t1, &t2)? * corr(q, &ff_weights(&a), &ins[2])? * corr(q, &ff_weights(&b), &ins[3])?;
            rec.identity_up_to_sign("correlator_switching", lhs, rhs, tol, params);
        }
        let (m1, m2) = inverse_switch(&kast, &t1, &t2, None)?;
        let k1 = kast.k_matrix(&ff_weights(&t1))?;
        let k2 = kast.k_matrix(&ff_weights(&t2))?;
        let res = inverse_residual(&k1, &m1).max(inverse_residual(&k2, &m2));
        rec.at_most("inverse_switching", res, tol, params);
        let inv = inverse(&k1)?;
        let comm = max_abs(&(&inv * &t - &t * &inv - &d)).max(max_abs(&(&k1 * &t - &t * &k1 + &k1 * &d * &k1)));
        rec.at_most("commutator", comm, tol, params);
    }
    Ok(tol)
}

pub(super) fn xor(q: &Quadrangulation, cfg: &SuiteConfig, rec: &mut Recorder) -> Result<f64> {
    require_surface(q, Surface::Sphere, "xor")?;
    let tol = cfg.tol.unwrap_or(XOR_TOL);
    let trials = cfg.trials.unwrap_or(3);
    let nf = q.num_faces();
    let mut r = rng(cfg.seed);
    for trial in 0..trials {
        let t1 = ordered_field(&mut r, nf);
        let mut t2 = ordered_field(&mut r, nf);
        // cross combinations must stay in the probability regime
        for (a, b) in t2.iter_mut().zip(&t1) {
            let lo = a.alpha.min(b.alpha);
            let hi = a.beta.max(b.beta).max(a.alpha.max(b.alpha));
            *a = Angles::new(lo, hi);
        }
        let lhs = xor_distribution(q, &ff_weights(&t1), &ff_weights(&t2))?;
        let rhs = xor_distribution(q, &ff_weights(&mixed(&t1, &t2)), &ff_weights(&mixed(&t2, &t1)))?;
        let tv = total_variation(&lhs, &rhs);
        rec.at_most("total_variation", tv, tol, || {
            json!({"trial": trial, "first": angles_json(&t1), "second": angles_json(&t2)})
        });
    }
    if let Some((b, w)) = corners(q) {
        let t1 = random_field(&mut r, nf);
        let t2 = random_field(&mut r, nf);
        let (b1, w1) = (vertex_mask(&[b[0], b[1]]), vertex_mask(&[w[0], w[1]]));
        let (b1p, w1p) = (vertex_mask(&[b[1], b[2]]), 0);
        let lhs = xor_with_defects(q, &ff_weights(&t1), &ff_weights(&t2), b1 | w1, b1p | w1p)?;
        let rhs = xor_with_defects(q, &ff_weights(&mixed(&t1, &t2)), &ff_weights(&mixed(&t2, &t1)), b1p | w1, b1 | w1p)?;
        let err = lhs.iter().zip(&rhs).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        let params = || json!({"first": angles_json(&t1), "second": angles_json(&t2), "defects": [b1 | w1, b1p | w1p]});
        rec.at_most("disorder_xor", err, tol, params);
        rec.holds("disorder_xor_nontrivial", lhs.iter().any(|&v| v.abs() > 1e-3), params);
    }
    Ok(tol)
}

pub(super) fn duality(q: &Quadrangulation, cfg: &SuiteConfig, rec: &mut Recorder) -> Result<f64> {
    require_surface(q, Surface::Sphere, "duality")?;
    let tol = cfg.tol.unwrap_or(BRUTE_TOL);
    let trials = cfg.trials.unwrap_or(5);
    let nf = q.num_faces();
    let mut r = rng(cfg.seed);
    let pair = match corners(q) {
        Some((b, w)) => {
            let ins = insertion(q, &[b[0], b[2]], &[], &[b[1], b[3]], &[w[0], w[1]])?;
            let hat = Insertion {
                sets: VertexSets {
                    order_black: ins.sets.disorder_black.clone(),
                    order_white: ins.sets.disorder_white.clone(),
                    disorder_black: ins.sets.order_black.clone(),
                    disorder_white: ins.sets.order_white.clone(),
                },
                paths: Paths {
                    order_black: ins.paths.disorder_black.clone(),
                    order_white: ins.paths.disorder_white.clone(),
                    disorder_black: ins.paths.order_black.clone(),
                    disorder_white: ins.paths.order_white.clone(),
                },
            };
            Some((ins, hat))
        }
        None => None,
    };
    for trial in 0..trials {
        let t = random_field(&mut r, nf);
        let params = || json!({"trial": trial, "angles": angles_json(&t)});
        let x = ff_weights(&t);
        let xh = duality_hat(&x);
        rec.identity("dual_partition", partition_fn(q, &x)?, partition_fn(q, &xh)?, tol, params);
        let back = x
            .iter()
            .map(|&w| {
                let twice = duality_face(duality_face(w));
                (0..4).map(|i| (twice.to_array()[i] - w.to_array()[i]).abs()).fold(0.0, f64::max)
            })
            .fold(0.0, f64::max);
        rec.at_most("hat_involution", back, EXACT_TOL, params);
        if let Some((ins, hat)) = &pair {
            rec.identity_up_to_sign("order_disorder_exchange", corr(q, &x, ins)?, corr(q, &xh, hat)?, tol, params);
        }
    }
    Ok(tol)
}

pub(super) fn spin_vertex(q: &Quadrangulation, cfg: &SuiteConfig, rec: &mut Recorder) -> Result<f64> {
    require_surface(q, Surface::Sphere, "spin-vertex")?;
    let tol = cfg.tol.unwrap_or(BRUTE_TOL);
    let trials = cfg.trials.unwrap_or(5);
    let nf = q.num_faces();
    let mut r = rng(cfg.seed);
    let ins = match corners(q) {
        Some((b, w)) => Some(insertion(q, &[b[0], b[1]], &[w[0], w[2]], &[b[2], b[3]], &[w[1], w[3]])?),
        None => None,
    };
    for trial in 0..trials {
        let t = random_field(&mut r, nf);
        let params = || json!({"trial": trial, "angles": angles_json(&t)});
        let (jb, jw): (Vec<f64>, Vec<f64>) = t.iter().map(|&a| ising_couplings(a)).unzip();
        let x: Vec<FaceWeights> = jb.iter().zip(&jw).map(|(&b, &w)| spin_face_weights(b, w)).collect();
        let cb: Vec<Complex64> = jb.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        let cw: Vec<Complex64> = jw.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        let zb = ising_partition(q, &cb, Color::Black)?;
        let zw = ising_partition(q, &cw, Color::White)?;
        let z8 = partition_fn(q, &x)?;
        rec.identity("spin_vertex_partition", 2.0 * z8, (zb * zw).re, tol, params);
        rec.at_most("ising_product_imaginary", (zb * zw).im.abs() / (zb * zw).norm(), tol, params);
        let z = partition_fn(q, &ff_weights(&t))?;
        rec.identity("free_fermion_factorization", z, c0(&t)? * zb.re * zw.re, tol, params);
        if let Some(ins) = &ins {
            let lhs = 2.0 * corr(q, &x, ins)?;
            let cb = ising_correlator(q, &jb, Color::Black, &ins.paths.order_black, &ins.paths.disorder_white)?;
            let cw = ising_correlator(q, &jw, Color::White, &ins.paths.order_white, &ins.paths.disorder_black)?;
            let rhs = cb * cw;
            rec.at_most("ising_correlator_imaginary", rhs.im.abs() / rhs.norm().max(1e-300), tol, params);
            rec.identity_up_to_sign("spin_vertex_correlator", lhs, rhs.re, tol, params);
        }
    }
    Ok(tol)
}

pub(super) fn forms(q: &Quadrangulation, cfg: &SuiteConfig, rec: &mut Recorder) -> Result<f64> {
    require_surface(q, Surface::Sphere, "forms")?;
    let tol = cfg.tol.unwrap_or(EXACT_TOL);
    let nf = q.num_faces();
    let im = image_of_phi(q)?;
    let ker = kernel_of_psi(q)?;
    let perp = orthogonal(&im, nf)?;
    rec.metric("dim_image", rank(&im));
    rec.metric("dim_kernel", rank(&ker));
    rec.holds("image_equals_kernel", im == ker, || json!({}));
    rec.holds("image_dimension", rank(&im) == q.num_vertices() - 2, || json!({"dim": rank(&im)}));
    rec.holds("lagrangian", perp == im, || json!({}));
    let mut adj = 0;
    for v in 0..q.num_vertices() {
        for k in 0..2 * nf {
            let (s, t) = (1u64 << v, 1u64 << k);
            if symplectic(phi(q, s), t) != bilinear(s, psi(q, t)) {
                adj += 1;
            }
        }
    }
    rec.holds("adjointness", adj == 0, || json!({"failures": adj}));
    let mut r = rng(cfg.seed);
    let trials = cfg.trials.unwrap_or(3);
    for trial in 0..trials {
        let t = random_field(&mut r, nf);
        let params = || json!({"trial": trial, "angles": angles_json(&t)});
        let x = ff_weights(&t);
        let g = weight_table(&x)?;
        let gh = fourier(&g, nf)?;
        let scale = g.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let dual = weight_table(&duality_hat(&x))?;
        let err = gh.iter().zip(&dual).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max) / scale;
        rec.at_most("fourier_gives_dual_weights", err, tol, params);
        let back = fourier(&gh, nf)?;
        let err = back.iter().zip(&g).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max) / scale;
        rec.at_most("fourier_involution", err, tol, params);
        rec.identity("poisson", sum_over(&g, &im), sum_over(&gh, &perp), tol, params);
        rec.identity("poisson_partition", 2.0 * sum_over(&g, &im), partition_fn(q, &x)?, tol, params);
        if let Some((b, w)) = corners(q) {
            let ins = insertion(q, &[b[0], b[3]], &[w[1], w[2]], &[b[1], b[2]], &[w[0], w[3]])?;
            let defect = vertex_mask(&ins.sets.disorder_black) | vertex_mask(&ins.sets.disorder_white);
            let by_forms = correlator_by_forms(q, &x, &ins.paths.order_black, &ins.paths.order_white, defect)?;
            rec.identity_up_to_sign("correlator_by_forms", corr(q, &x, &ins)?, by_forms, BRUTE_TOL, params);
        }
        if nf <= 8 {
            let naive = fourier_naive(&g, nf)?;
            let err = naive.iter().zip(&gh).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max) / scale;
            rec.at_most("fast_transform", err, tol, params);
        }
    }
    Ok(tol)
}
