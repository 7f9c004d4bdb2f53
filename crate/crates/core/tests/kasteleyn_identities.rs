mod common;

use common::*;
use ff8v::brute_force::{boltzmann, partition_fn};
use ff8v::kasteleyn::*;
use ff8v::linalg::{c, det, identity, inverse, max_abs, pfaffian, CMat};
use ff8v::quad_graph::{build_cube_sphere, build_square_torus, corner_angles, Color, Quadrangulation};
use ff8v::weights::{ff_weights, Angles, FaceWeights};
use num_complex::Complex64;
use rand::Rng;
use std::f64::consts::PI;

fn setup(q: &Quadrangulation) -> Kasteleyn {
    Kasteleyn::new(q, &corner_angles(q).unwrap()).unwrap()
}

fn marginal(q: &Quadrangulation, x: &[FaceWeights], edges: &[usize]) -> f64 {
    boltzmann(q, x)
        .unwrap()
        .into_iter()
        .filter(|(tau, _)| edges.iter().all(|&e| tau >> e & 1 == 1))
        .map(|(_, p)| p)
        .sum()
}

#[test]
fn pfaffian_of_four_by_four_matches_expansion() {
    let mut r = rng(3);
    let mut a = CMat::zeros(4, 4);
    for i in 0..4 {
        for j in i + 1..4 {
            let v = c(r.random_range(-1.0..1.0), r.random_range(-1.0..1.0));
            a[(i, j)] = v;
            a[(j, i)] = -v;
        }
    }
    let expect = a[(0, 1)] * a[(2, 3)] - a[(0, 2)] * a[(1, 3)] + a[(0, 3)] * a[(1, 2)];
    assert!((pfaffian(&a) - expect).norm() < 1e-15);
}

#[test]
fn cube_partition_function_matches_enumeration() {
    let q = build_cube_sphere();
    let k = setup(&q);
    let mut r = rng(11);
    for trial in 0..20 {
        let x = ff_weights(&random_field(&mut r, 6));
        let z = partition_fn(&q, &x).unwrap();
        assert!(rel(k.sphere_partition(&x).unwrap(), z) < 1e-10, "trial {trial}");
        let prod: f64 = x.iter().map(|w| w.c).product();
        let d = det(&k.k_matrix(&x).unwrap());
        assert!(d.im.abs() < 1e-10 * d.re.abs());
        assert!(rel(z * z, prod * prod * d.re) < 1e-10);
        let kt = k.k_tilde(&x, (0, 0)).unwrap();
        let pf = pfaffian(&kt);
        assert!((pf * pf - det(&kt)).norm() < 1e-10 * det(&kt).norm());
    }
}

#[test]
fn non_standard_weights_are_rejected() {
    let q = build_cube_sphere();
    let k = setup(&q);
    let mut x = ff_weights(&vec![Angles::new(0.4, 0.7); 6]);
    x[2].c = 0.0;
    assert!(k.sphere_partition(&x).is_err());
}

#[test]
fn gauge_does_not_depend_on_weights() {
    let q = build_cube_sphere();
    let k = setup(&q);
    let mut r = rng(5);
    for _ in 0..5 {
        let x = ff_weights(&random_field(&mut r, 6));
        assert!(k.gauge_residual(&x, None).unwrap() < 1e-12);
        let h = k.k_matrix(&x).unwrap();
        let s = k.k_tilde(&x, (0, 0)).unwrap();
        // K = g^-1 K~ g
        let back = CMat::from_fn(24, 24, |i, j| k.gauge[i].conj() * s[(i, j)] * k.gauge[j]);
        assert!(max_abs(&(back - h)) < 1e-12);
    }
}

#[test]
fn orientation_is_admissible() {
    let q = build_cube_sphere();
    let k = setup(&q);
    assert!(k.admissibility_failures().unwrap().is_empty());
    let o = k.orientation().unwrap();
    // the four triangles inside each decoration are all clockwise-odd
    for f in 0..6 {
        let d = |i| deco(f, i);
        let tris = [
            vec![d(0), d(1), d(3)],
            vec![d(1), d(2), d(3)],
            vec![d(0), d(1), d(2)],
            vec![d(0), d(2), d(3)],
        ];
        assert!(o.parity_failures(&tris).is_empty());
    }
    let t = build_square_torus(4, 4).unwrap();
    assert!(setup(&t).admissibility_failures().unwrap().is_empty());
}

#[test]
fn faces_of_planar_restrictions_satisfy_euler() {
    let q = build_cube_sphere();
    let k = setup(&q);
    for color in [Color::Black, Color::White] {
        let faces = k.gt.faces_without(color).unwrap();
        let v = 24i64;
        let e = 5 * 6 + 12;
        assert_eq!(v - e + faces.len() as i64, 2);
    }
}

#[test]
fn six_vertex_specialization_has_no_diagonals() {
    let q = build_cube_sphere();
    let k = setup(&q);
    let x = ff_weights(&vec![Angles::new(0.6, 0.6); 6]);
    let m = k.k_matrix(&x).unwrap();
    for f in 0..6 {
        assert_eq!(m[(deco(f, 0), deco(f, 2))], c(0.0, 0.0));
        assert_eq!(m[(deco(f, 1), deco(f, 3))], c(0.0, 0.0));
    }
}

#[test]
fn torus_partition_function_matches_enumeration() {
    let mut r = rng(17);
    for (m, n, trials) in [(2, 2, 20), (4, 2, 3), (4, 4, 2)] {
        let q = build_square_torus(m, n).unwrap();
        let k = setup(&q);
        for trial in 0..trials {
            let x = ff_weights(&random_field(&mut r, m * n));
            let z = partition_fn(&q, &x).unwrap();
            assert!(rel(k.torus_partition(&x).unwrap(), z) < 1e-9, "{m}x{n} trial {trial}");
        }
    }
}

#[test]
fn torus_sign_pattern_is_forced() {
    // among all 16 sign vectors only the frozen one and its negative fit
    let q = build_square_torus(2, 2).unwrap();
    let k = setup(&q);
    let mut r = rng(23);
    let fields: Vec<_> = (0..4).map(|_| ff_weights(&random_field(&mut r, 4))).collect();
    let mut fits = Vec::new();
    for mask in 0..16u32 {
        let signs: [f64; 4] = std::array::from_fn(|i| if mask >> i & 1 == 1 { -1.0 } else { 1.0 });
        let ok = fields.iter().all(|x| {
            let z = partition_fn(&q, x).unwrap();
            k.torus_partition_with(x, &signs).map(|v| rel(v, z) < 1e-9).unwrap_or(false)
        });
        if ok {
            fits.push(signs);
        }
    }
    assert!(fits.contains(&TORUS_SIGNS));
    assert!(fits.iter().all(|s| *s == TORUS_SIGNS || s.map(|v| -v) == TORUS_SIGNS));
}

#[test]
fn sphere_edge_probabilities_match_enumeration() {
    let q = build_cube_sphere();
    let k = setup(&q);
    let x = ff_weights(&vec![Angles::new(PI / 4.0, PI / 4.0); 6]);
    for e in 0..q.num_edges() {
        let p = k.edge_probability_sphere(&x, &[e]).unwrap();
        assert!((p - marginal(&q, &x, &[e])).abs() < 1e-9, "edge {e}");
    }
    let mut r = rng(29);
    let x = ff_weights(&ordered_field(&mut r, 6));
    let face = &q.faces[0];
    for pair in [[face.edges[0], face.edges[1]], [face.edges[0], face.edges[2]]] {
        let p = k.edge_probability_sphere(&x, &pair).unwrap();
        assert!((p - marginal(&q, &x, &pair)).abs() < 1e-9);
    }
}

#[test]
fn torus_edge_probabilities_match_enumeration() {
    let q = build_square_torus(2, 2).unwrap();
    let k = setup(&q);
    let mut r = rng(31);
    let x = ff_weights(&ordered_field(&mut r, 4));
    for e in 0..q.num_edges() {
        let p = k.edge_probability_torus(&x, &[e]).unwrap();
        assert!(rel(p, marginal(&q, &x, &[e])) < 1e-9, "edge {e}");
    }
    for pair in [[0, 1], [0, 5], [2, 7], [3, 4]] {
        let p = k.edge_probability_torus(&x, &pair).unwrap();
        assert!(rel(p, marginal(&q, &x, &pair)) < 1e-9, "pair {pair:?}");
    }
    let all: Vec<usize> = (0..q.num_edges()).collect();
    let p = k.edge_probability_torus(&x, &all).unwrap();
    assert!((p - marginal(&q, &x, &all)).abs() < 1e-12);
    assert_eq!(k.edge_probability_torus(&x, &[]).unwrap(), 1.0);

    let q = build_square_torus(4, 2).unwrap();
    let k = setup(&q);
    let x = ff_weights(&ordered_field(&mut r, 8));
    for e in 0..q.num_edges() {
        let p = k.edge_probability_torus(&x, &[e]).unwrap();
        assert!(rel(p, marginal(&q, &x, &[e])) < 1e-9, "edge {e} of 4x2");
    }
    for pair in [[0, 9], [3, 14]] {
        let p = k.edge_probability_torus(&x, &pair).unwrap();
        assert!(rel(p, marginal(&q, &x, &pair)) < 1e-9, "pair {pair:?} of 4x2");
    }
}

fn mixed(p: &[Angles], r: &[Angles]) -> Vec<Angles> {
    p.iter().zip(r).map(|(u, v)| Angles::new(u.alpha, v.beta)).collect()
}

#[test]
fn inverse_switching_on_the_cube() {
    let q = build_cube_sphere();
    let k = setup(&q);
    let mut r = rng(37);
    for _ in 0..20 {
        let first = random_field(&mut r, 6);
        let second = random_field(&mut r, 6);
        let (m1, m2) = inverse_switch(&k, &first, &second, None).unwrap();
        let k1 = k.k_matrix(&ff_weights(&first)).unwrap();
        let k2 = k.k_matrix(&ff_weights(&second)).unwrap();
        assert!(inverse_residual(&k1, &m1) < 1e-10);
        assert!(inverse_residual(&k2, &m2) < 1e-10);
    }
    // identity quadruple
    let first = random_field(&mut r, 6);
    let (m1, _) = inverse_switch(&k, &first, &first, None).unwrap();
    let direct = inverse(&k.k_matrix(&ff_weights(&first)).unwrap()).unwrap();
    assert!(max_abs(&(m1 - direct)) < 1e-10);
    // exchanging the angles expresses the 8V inverse through two 6V inverses
    let swapped: Vec<Angles> = first.iter().map(|a| a.swapped()).collect();
    let six_a = ff_weights(&mixed(&first, &swapped));
    assert!(six_a.iter().all(|w| w.d.abs() < 1e-15));
    let (m1, _) = inverse_switch(&k, &first, &swapped, None).unwrap();
    assert!(inverse_residual(&k.k_matrix(&ff_weights(&first)).unwrap(), &m1) < 1e-10);
}

#[test]
fn inverse_switching_and_commutators_on_the_torus() {
    let q = build_square_torus(2, 2).unwrap();
    let k = setup(&q);
    let mut r = rng(41);
    let mut twists = vec![(c(0.7, 0.2), c(1.3, 0.0)), (c(1.0, 0.0), c(1.0, 0.0))];
    for _ in 0..20 {
        let z = Complex64::from_polar(r.random_range(0.5..2.0), r.random_range(0.0..2.0 * PI));
        let w = Complex64::from_polar(r.random_range(0.5..2.0), r.random_range(0.0..2.0 * PI));
        twists.push((z, w));
    }
    let d = k.d_matrix();
    for (z, w) in twists {
        let first = random_field(&mut r, 4);
        let second = random_field(&mut r, 4);
        let (m1, m2) = inverse_switch(&k, &first, &second, Some((z, w))).unwrap();
        let k1 = k.k_twisted(&ff_weights(&first), z, w).unwrap();
        let k2 = k.k_twisted(&ff_weights(&second), z, w).unwrap();
        assert!(inverse_residual(&k1, &m1) < 1e-10);
        assert!(inverse_residual(&k2, &m2) < 1e-10);
        let t = k.t_matrix(Some((z, w)));
        assert!(max_abs(&(&t * &t - identity(16))) < 1e-12);
        let comm = &k1 * &t - &t * &k1;
        assert!(max_abs(&(comm + &k1 * &d * &k1)) < 1e-10);
        let inv = inverse(&k1).unwrap();
        assert!(max_abs(&(&inv * &t - &t * &inv - &d)) < 1e-10);
    }
}

#[test]
fn t_times_d_is_the_leg_part() {
    let q = build_cube_sphere();
    let k = setup(&q);
    let x = ff_weights(&vec![Angles::new(0.3, 1.1); 6]);
    let full = k.k_matrix(&x).unwrap();
    let td = k.t_matrix(None) * k.d_matrix();
    for leg in k.gt.legs.iter().flatten() {
        assert!((td[(leg.white, leg.black)] - full[(leg.white, leg.black)]).norm() < 1e-15);
        assert!((td[(leg.black, leg.white)] - full[(leg.black, leg.white)]).norm() < 1e-15);
    }
    assert_eq!(td.iter().filter(|v| v.norm() > 0.0).count(), 24);
}
