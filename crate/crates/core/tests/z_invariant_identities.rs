mod common;

use common::*;
use ff8v::elliptic::EllipticContext;
use ff8v::linalg::c;
use ff8v::weights::{ff_face, FaceWeights};
use ff8v::z_invariant::asymptotics::{chi_derivative, landen_residual, HYPOTHESIS_EPS};
use ff8v::z_invariant::local_inverse::{f_bw, f_bw_critical, massive_exp};
use ff8v::z_invariant::ybe::{star_triangle_weights, ybe_residuals_for};
use ff8v::z_invariant::*;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::Rng;
use std::f64::consts::{FRAC_PI_2, PI};

fn prop(a: FaceWeights, b: FaceWeights) -> f64 {
    let (x, y) = (a.to_array(), b.to_array());
    let s = x.iter().zip(&y).map(|(p, q)| p * q).sum::<f64>() / y.iter().map(|q| q * q).sum::<f64>();
    x.iter().zip(&y).map(|(p, q)| (p - s * q).abs()).fold(0.0, f64::max) / x.iter().fold(0.0f64, |m, v| m.max(v.abs()))
}

#[test]
fn equal_moduli_have_no_d_weight() {
    for k2 in [-0.7, 0.0, 0.3, 0.8] {
        for t in [0.1, 0.5, 1.0, 1.4] {
            let w = zinv_weights(t, k2, k2).unwrap();
            assert!(w.d.abs() < 1e-14, "{w:?}");
        }
    }
}

#[test]
fn trigonometric_weights() {
    for t in [0.2, PI / 4.0, 1.3] {
        let w = zinv_weights(t, 0.0, 0.0).unwrap();
        assert!(prop(w, FaceWeights::new(t.sin(), t.cos(), 1.0, 0.0)) < 1e-14, "{w:?}");
    }
}

#[test]
fn free_fermion_predicate() {
    let w = zinv_weights(PI / 4.0, 0.0, 0.36).unwrap();
    assert!(w.ff_residual().abs() < 1e-12);
    let mut r = rng(11);
    for _ in 0..100 {
        let (k2, l2) = (r.random_range(-3.0..0.95), r.random_range(-3.0..0.95));
        let w = zinv_weights(open_quarter(&mut r), k2, l2).unwrap();
        assert!(w.ff_residual().abs() < 1e-12 * w.c * w.c, "{w:?}");
    }
}

#[test]
fn weights_match_amplitude_parametrization() {
    let mut r = rng(12);
    for _ in 0..50 {
        let z = ZInvWeights::new(r.random_range(-2.0..0.9), r.random_range(-2.0..0.9)).unwrap();
        let t = open_quarter(&mut r);
        let a = z.face(t).unwrap().to_array();
        let b = ff_face(z.angles(t).unwrap()).to_array();
        for i in 0..4 {
            assert!((a[i] - b[i]).abs() < 1e-13, "{a:?} {b:?}");
        }
    }
}

#[test]
fn ordered_moduli_give_probability_angles() {
    for (k, l) in [(0.0, 0.4), (0.3, 0.7), (0.6, 0.61), (0.2, 0.95)] {
        let z = ZInvWeights::from_moduli(k, l).unwrap();
        assert!(z.is_probabilistic());
        for t in [0.05, 0.4, 0.9, 1.5] {
            let a = z.angles(t).unwrap();
            assert!(a.is_probabilistic(), "{a:?}");
        }
    }
}

#[test]
fn reciprocal_complements_recover_non_checkerboard_weights() {
    // k'^2 = 1.5 and l'^2 = 2/3
    let (k2, l2) = (-0.5, 1.0 / 3.0);
    for t in [0.2, 0.7, 1.1] {
        let w = zinv_weights(t, k2, l2).unwrap();
        let v = zinv_weights(FRAC_PI_2 - t, k2, l2).unwrap();
        assert!(prop(v, FaceWeights::new(w.b, w.a, w.c, w.d)) < 1e-12, "{v:?} {w:?}");
    }
}

#[test]
fn out_of_range_angle_is_rejected() {
    assert!(zinv_weights(0.0, 0.1, 0.2).is_err());
    assert!(zinv_weights(FRAC_PI_2, 0.1, 0.2).is_err());
    assert!(zinv_weights(0.3, 1.0, 0.2).is_err());
}

fn random_triple(r: &mut impl Rng) -> [f64; 3] {
    let a = r.random_range(0.05..1.4);
    let b = r.random_range(0.05..(FRAC_PI_2 - a - 0.05).max(0.06));
    let b = b.min(FRAC_PI_2 - a - 0.02);
    [a, b, FRAC_PI_2 - a - b]
}

#[test]
fn ybe_random_draws() {
    let mut r = rng(13);
    assert_eq!(relation_count(), 16);
    for j in 0..50 {
        let (k2, l2) = if j % 2 == 0 {
            (r.random_range(-1.0..0.0), r.random_range(0.0..0.9))
        } else {
            (r.random_range(-1.0..0.9), r.random_range(-1.0..0.9))
        };
        let res = ybe_residuals(random_triple(&mut r), k2, l2).unwrap();
        assert!(res.max() < 1e-10, "{res:?}");
    }
}

fn relation_count() -> usize {
    ybe::relation_labels().len()
}

#[test]
fn ybe_trigonometric_case() {
    let res = ybe_residuals([PI / 6.0; 3], 0.0, 0.0).unwrap();
    assert_eq!(res.residuals.len(), 16);
    assert!(res.max() < 1e-12, "{res:?}");
}

#[test]
fn ybe_detects_perturbation() {
    let (mut x, y) = star_triangle_weights([0.3, 0.5, FRAC_PI_2 - 0.8], 0.2, 0.6).unwrap();
    x[1].a += 1e-3;
    let res = ybe_residuals_for(&x, &y).unwrap();
    assert!(res.max() >= 1e-4, "{res:?}");
}

#[test]
fn ybe_rejects_bad_angle_sum() {
    assert!(ybe_residuals([0.3, 0.3, 0.3], 0.1, 0.2).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]
    #[test]
    fn ybe_holds(a in 0.05f64..1.4, frac in 0.05f64..0.95, k2 in -2.0f64..0.9, l2 in -2.0f64..0.9) {
        let b = frac * (FRAC_PI_2 - a);
        let res = ybe_residuals([a, b, FRAC_PI_2 - a - b], k2, l2).unwrap();
        prop_assert!(res.max() < 1e-10);
    }

    #[test]
    fn free_fermion_holds(t in 0.01f64..1.56, k2 in -5.0f64..0.99, l2 in -5.0f64..0.99) {
        let w = zinv_weights(t, k2, l2).unwrap();
        prop_assert!(w.ff_residual().abs() <= 1e-12 * w.c * w.c);
    }

    #[test]
    fn massive_exp_periodicity(re in -3.0f64..3.0, im in -2.0f64..2.0, k in 0.05f64..0.9, n in 1usize..6) {
        let path = straight(n);
        let ctx = EllipticContext::from_modulus(k).unwrap();
        let u = c(re, im);
        let v = massive_exp(&path, u, k);
        prop_assume!(v.as_ref().map(|v| v.norm() < 1e6 && v.norm() > 1e-6).unwrap_or(false));
        let v = v.unwrap();
        let shifted = massive_exp(&path, u + 2.0 * PI, k).unwrap();
        prop_assert!((shifted - v).norm() < 1e-9 * v.norm());
        let h = c(0.0, ctx.torus_height().unwrap());
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        prop_assert!((massive_exp(&path, u + h, k).unwrap() - sign * v).norm() < 1e-9 * v.norm());
    }
}

/// Path with `n` full steps along direction 0 between vertical half steps.
fn straight(n: usize) -> RhombusPath {
    let mut a = vec![-FRAC_PI_2];
    a.extend(std::iter::repeat(0.0).take(n));
    a.push(FRAC_PI_2);
    RhombusPath::from_angles(a, true, n % 2 == 0, n as f64).unwrap()
}

#[test]
fn massive_exp_trivial_path() {
    let p = RhombusPath::from_angles(vec![0.3, 0.9], true, true, 0.0).unwrap();
    assert_eq!(massive_exp(&p, c(0.4, 0.2), 0.5).unwrap(), c(1.0, 0.0));
}

#[test]
fn massive_exp_is_path_independent() {
    // the detour runs back and forth along x and reorders the steps
    let direct = RhombusPath::from_angles(vec![FRAC_PI_2, 0.0, FRAC_PI_2, 0.0, FRAC_PI_2], true, false, 0.0).unwrap();
    let detour =
        RhombusPath::from_angles(vec![FRAC_PI_2, 0.0, PI, FRAC_PI_2, 0.0, 0.0, FRAC_PI_2], true, false, 0.0).unwrap();
    let mut r = rng(14);
    for _ in 0..10 {
        let u = c(r.random_range(-1.0..1.0), r.random_range(-1.0..1.0));
        for k in [0.2, 0.7] {
            let a = massive_exp(&direct, u, k).unwrap();
            let b = massive_exp(&detour, u, k).unwrap();
            assert!((a - b).norm() < 1e-10 * a.norm(), "{a} {b}");
        }
    }
}

fn color_cases() -> Vec<RhombusPath> {
    let q = FRAC_PI_2;
    [(true, true), (true, false), (false, true), (false, false)]
        .into_iter()
        .map(|(fb, lb)| {
            let mut a = vec![-q, 0.0, q];
            if fb != lb {
                a.push(0.0);
            }
            a.push(q);
            let n = a.len() - 2;
            RhombusPath::from_angles(a, fb, lb, n as f64).unwrap()
        })
        .collect()
}

#[test]
fn integrand_is_doubly_periodic() {
    let mut r = rng(15);
    for path in color_cases() {
        for k in [0.3, 0.8] {
            let h = c(0.0, EllipticContext::from_modulus(k).unwrap().torus_height().unwrap());
            for _ in 0..10 {
                let u = c(r.random_range(-2.0..2.0), r.random_range(-2.0..2.0));
                let v = f_bw(&path, 0.4, u, k).unwrap();
                for s in [c(2.0 * PI, 0.0), h] {
                    let w = f_bw(&path, 0.4, u + s, k).unwrap();
                    assert!((w - v).norm() < 1e-9 * v.norm().max(1.0), "{path:?} {u} {v} {w}");
                }
            }
        }
    }
}

#[test]
fn integrand_critical_limit() {
    let mut r = rng(16);
    for path in color_cases() {
        for _ in 0..10 {
            let u = c(r.random_range(-1.0..1.0), r.random_range(-1.0..1.0));
            let a = f_bw(&path, 0.4, u, 1e-6).unwrap();
            let b = f_bw_critical(&path, 0.4, u).unwrap();
            assert!((a - b).norm() < 1e-8 * b.norm().max(1.0), "{a} {b}");
        }
    }
}

fn lattice_pair(lat: &RhombicLattice, x: i64, y: i64) -> (Site, Site, RhombusPath) {
    let _ = lat;
    let b = RhombicLattice::site_of_edge((0, 0), (0, 1), true).unwrap();
    let w = RhombicLattice::site_of_edge((x, y), (x, y + 1), false).unwrap();
    (b, w, lat.path(b, w).unwrap())
}

#[test]
fn square_lattice_paths_cover_all_color_cases() {
    let lat = RhombicLattice::square();
    let mut seen = std::collections::BTreeSet::new();
    for x in -3..=3 {
        for y in -3..=3 {
            for i in [0, 2] {
                let b = Site::new(0, 0, i);
                for j in [1, 3] {
                    let w = Site::new(x, y, j);
                    let p = lat.path(b, w).unwrap();
                    assert!(p.width <= PI + 1e-12);
                    seen.insert((p.first_black, p.last_black));
                }
            }
        }
    }
    assert_eq!(seen.len(), 4);
}

#[test]
fn contour_shift_invariance() {
    let lat = RhombicLattice::square();
    for (x, y) in [(3, 0), (2, 2), (4, 1)] {
        let (b, w, p) = lattice_pair(&lat, x, y);
        for k in [0.0, 0.4] {
            let base = ContourSpec::default();
            let lo = kinv6v_entry(&lat, b, w, k, &ContourSpec { x0: Some(p.center - 0.2), ..base }).unwrap();
            let hi = kinv6v_entry(&lat, b, w, k, &ContourSpec { x0: Some(p.center + 0.2), ..base }).unwrap();
            assert!((lo - hi).norm() < 1e-10, "{lo} {hi}");
        }
    }
}

#[test]
fn contour_through_pole_is_rejected() {
    let lat = RhombicLattice::square();
    let (b, w, p) = lattice_pair(&lat, 3, 0);
    let spec = ContourSpec { x0: Some(p.angles[1] + PI), ..ContourSpec::default() };
    assert!(kinv6v_entry(&lat, b, w, 0.4, &spec).is_err());
}

#[test]
fn six_vertex_rows_invert() {
    let spec = ContourSpec::default();
    for lat in [RhombicLattice::square(), RhombicLattice::new(0.0, PI / 3.0).unwrap()] {
        for k in [0.0, 0.5] {
            let cols = [Site::new(0, 0, 0), Site::new(1, 0, 2), Site::new(-1, 2, 0)];
            for x in -1..=1 {
                for y in -1..=1 {
                    for i in [1, 3] {
                        let w = Site::new(x, y, i);
                        for &bcol in &[Site::new(0, 0, 1), Site::new(1, 1, 3), Site::new(2, -1, 1)] {
                            let _ = cols;
                            let mut s = c(0.0, 0.0);
                            for (b, v) in lat.k6_row(w, k * k).unwrap() {
                                s += v * kinv6v_entry(&lat, b, bcol, k, &spec).unwrap();
                            }
                            let target = if w == bcol { 1.0 } else { 0.0 };
                            assert!((s - target).norm() < 1e-9, "{lat:?} k={k} {w:?} {bcol:?} {s}");
                        }
                    }
                }
            }
        }
    }
}

#[test]
fn u0_all_equal_directions() {
    for n in [3, 8, 20] {
        let p = straight(n);
        for k in [0.1, 0.5, 0.9] {
            let u = u0(&p, k).unwrap();
            assert!(u.abs() < 1e-12, "{u}");
            let kp = (1.0 - k * k).sqrt();
            let expect = n as f64 / (2.0 * p.distance) * kp.ln();
            assert!(rel(chi(&p, u, k).unwrap(), expect) < 1e-12);
        }
    }
}

fn scan_paths() -> Vec<RhombusPath> {
    let sq = RhombicLattice::square();
    let rh = RhombicLattice::new(0.0, PI / 3.0).unwrap();
    vec![
        lattice_pair(&sq, 12, 0).2,
        lattice_pair(&sq, 6, 6).2,
        lattice_pair(&sq, 8, 4).2,
        lattice_pair(&sq, 9, 3).2,
        lattice_pair(&rh, 6, 3).2,
        lattice_pair(&rh, 3, 7).2,
    ]
}

#[test]
fn u0_matches_landen_characterization() {
    for p in scan_paths() {
        for k in [0.1, 0.3, 0.5, 0.7, 0.9] {
            let u = u0(&p, k).unwrap();
            assert!((u - p.center).abs() < FRAC_PI_2);
            assert!(chi_derivative(&p, u, k).unwrap().abs() < 1e-12);
            assert!(landen_residual(&p, u, k).unwrap().abs() < 1e-9, "{p:?} {k}");
            assert!(chi(&p, u, k).unwrap() < 0.0);
        }
    }
}

#[test]
fn chi_derivatives_match_finite_differences() {
    let h = 1e-4;
    for p in scan_paths() {
        for k in [0.2, 0.6] {
            let u = u0(&p, k).unwrap() + 0.1;
            let f = |v: f64| chi(&p, v, k).unwrap();
            let d1 = (f(u + h) - f(u - h)) / (2.0 * h);
            let d2 = (f(u + h) - 2.0 * f(u) + f(u - h)) / (h * h);
            assert!((d1 - chi_derivative(&p, u, k).unwrap()).abs() < 1e-7);
            assert!((d2 - chi_second_derivative(&p, u, k).unwrap()).abs() < 1e-5);
        }
    }
}

#[test]
fn decay_rate_grows_with_modulus() {
    let ks: Vec<f64> = (1..=9).map(|j| j as f64 / 10.0).collect();
    let paths = scan_paths();
    assert!(paths.len() >= 5);
    for p in paths {
        let rates: Vec<f64> = ks.iter().map(|&k| chi(&p, u0(&p, k).unwrap(), k).unwrap().abs()).collect();
        assert!(rates.windows(2).all(|w| w[1] > w[0]), "{rates:?}");
    }
}

#[test]
fn critical_exponent_is_quadratic() {
    let ks: Vec<f64> = (1..=10).map(|j| j as f64 / 100.0).collect();
    let diag = lattice_pair(&RhombicLattice::square(), 10, 10).2;
    let scan = critical_exponent_scan(&diag, &ks).unwrap();
    assert!(scan.ratio <= 2.0, "{scan:?}");
    let p = straight(10);
    let scan = critical_exponent_scan(&p, &[0.01]).unwrap();
    let limit = -(p.interior().len() as f64) / (4.0 * p.distance);
    assert!(rel(scan.scaled[0], limit) < 0.05, "{scan:?}");
    // the rate stays below the single-step bound at distance eps from the saddle
    let eps = 0.1;
    for &k in &ks {
        let ctx = EllipticContext::from_modulus(k).unwrap();
        let (_, _, dn) = ff8v::elliptic::jacobi_real(ctx.big_k * eps / PI, k * k).unwrap();
        let u = u0(&diag, k).unwrap();
        assert!(chi(&diag, u, k).unwrap() <= (ctx.kp.sqrt() / dn).ln());
    }
}

#[test]
fn cardinal_inequality() {
    let sym = RhombusPath::from_angles(vec![-FRAC_PI_2, 0.0, FRAC_PI_2, 0.0, FRAC_PI_2, FRAC_PI_2], true, true, 2.0f64.sqrt() * 2.0)
        .unwrap();
    assert_eq!(cardinal_check(&sym, 0.5).unwrap(), Some(true));
    assert_eq!(cardinal_check(&straight(5), 0.5).unwrap(), None);
    let mut r = rng(17);
    for _ in 0..20 {
        let dirs: Vec<f64> = (0..4).map(|_| r.random_range(0.0..PI - 0.1)).collect();
        let mut a = vec![dirs[0]];
        for _ in 0..12 {
            a.push(dirs[r.random_range(0..4)]);
        }
        a.push(dirs[1]);
        let p = RhombusPath::from_angles(a, true, true, 8.0).unwrap();
        if p.interior().iter().all(|&x| x == p.interior()[0]) {
            continue;
        }
        assert_eq!(cardinal_check(&p, 0.5).unwrap(), Some(true), "{p:?}");
    }
}

#[test]
fn prediction_checks_hypothesis() {
    let p = RhombusPath::from_angles(vec![0.0, 0.0, 0.0, FRAC_PI_2], true, false, 2.0).unwrap();
    assert!(asymptotic_prediction(&p, 0.7, 0.4, HYPOTHESIS_EPS).is_err());
}

#[test]
fn saddle_value_of_massive_exponential() {
    for p in scan_paths() {
        let k = 0.5;
        let u = u0(&p, k).unwrap();
        let e = asymptotics::saddle_massive_exp(&p, k).unwrap();
        let sign = if p.interior().len() % 2 == 0 { 1.0 } else { -1.0 };
        let expect = Complex64::from(sign * (p.distance * chi(&p, u, k).unwrap()).exp());
        assert!((e - expect).norm() < 1e-10 * expect.norm(), "{e} {expect}");
    }
}
