use ff8v::elliptic::{am, complete_e, complete_k, dg_dk, g_fn, jacobi, jacobi_real, EllipticContext};
use num_complex::Complex64;
use proptest::prelude::*;
use std::f64::consts::PI;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[test]
fn complete_integrals_match_reference() {
    // reference values computed with an arbitrary-precision library
    let table = [
        (0.09, 1.608_048_619_930_512_8, 1.534_833_464_923_249),
        (0.81, 2.280_549_138_422_770_3, 1.171_697_052_781_614),
        (0.9801, 3.356_600_523_361_191_7, 1.028_475_809_028_804),
        (-4.0, 1.009_452_909_989_211_6, 2.635_183_581_595_630),
    ];
    for (k2, kk, ee) in table {
        assert!((complete_k(k2).unwrap() - kk).abs() < 1e-13, "K({k2})");
        assert!((complete_e(k2).unwrap() - ee).abs() < 1e-13, "E({k2})");
    }
}

#[test]
fn complex_values_match_reference() {
    let u = c(0.7, 0.4);
    let cases = [
        (
            0.81,
            [
                c(0.673_680_308_456_648_6, 0.263_439_869_220_828_8),
                c(0.814_283_851_631_106_2, -0.217_951_334_784_504_7),
                c(0.846_997_889_106_505_1, -0.169_721_963_015_024_9),
            ],
        ),
        (
            -4.0,
            [
                c(0.871_446_499_880_642_9, 0.627_699_352_151_037_8),
                c(0.974_506_718_927_820_4, -0.561_316_194_937_271_2),
                c(1.934_238_988_897_110_0, 1.131_207_480_666_633_3),
            ],
        ),
    ];
    for (k2, [sn, cn, dn]) in cases {
        let j = jacobi(u, k2).unwrap();
        assert!((j.sn - sn).norm() < 1e-12, "sn at k2 = {k2}");
        assert!((j.cn - cn).norm() < 1e-12, "cn at k2 = {k2}");
        assert!((j.dn - dn).norm() < 1e-12, "dn at k2 = {k2}");
    }
}

#[test]
fn legendre_relation() {
    for k2 in [0.09f64, 0.3, 0.81, 0.9801] {
        let ctx = EllipticContext::new(k2).unwrap();
        let kp = ctx.big_kp.unwrap();
        let ep = complete_e(1.0 - k2).unwrap();
        let lhs = ctx.big_e * kp + ep * ctx.big_k - ctx.big_k * kp;
        assert!((lhs - PI / 2.0).abs() < 1e-12);
    }
}

#[test]
fn landen_transformation() {
    // (sn cn / dn)(v | k) = (1 + t) / 2 * sn(2 K(t) v / K(k) | t), t = (1 - k') / (1 + k')
    for k in [0.3f64, 0.6, 0.95] {
        let kp = (1.0 - k * k).sqrt();
        let t = (1.0 - kp) / (1.0 + kp);
        let scale = 2.0 * complete_k(t * t).unwrap() / complete_k(k * k).unwrap();
        for v in [0.1, 0.5, 1.0, 2.3] {
            let (sn, cn, dn) = jacobi_real(v, k * k).unwrap();
            let (s2, _, _) = jacobi_real(scale * v, t * t).unwrap();
            assert!((sn * cn / dn - 0.5 * (1.0 + t) * s2).abs() < 1e-13);
        }
    }
}

#[test]
fn amplitude_decreases_with_parameter() {
    for u in [0.3, 0.9, 1.4] {
        let mut prev = f64::INFINITY;
        for k2 in [-4.0, -1.0, 0.0, 0.3, 0.6, 0.9, 0.99] {
            let a = am(u, k2).unwrap();
            assert!(a < prev, "am({u}) not decreasing at k2 = {k2}");
            prev = a;
        }
    }
}

#[test]
fn dg_dk_increasing_on_half_period() {
    for k in [0.3, 0.7] {
        let vals: Vec<f64> = (0..=40).map(|i| dg_dk(PI * i as f64 / 40.0, k).unwrap()).collect();
        assert!(vals.windows(2).all(|w| w[1] > w[0]));
    }
}

#[test]
fn g_minimum_at_origin() {
    for k in [0.2f64, 0.5, 0.9] {
        let g0 = g_fn(0.0, k).unwrap();
        assert!((g0 - 0.25 * (1.0 - k * k).ln()).abs() < 1e-14);
        for i in 1..20 {
            assert!(g_fn(2.0 * PI * i as f64 / 20.0, k).unwrap() > g0);
        }
    }
}

fn parameters() -> impl Strategy<Value = f64> {
    prop_oneof![Just(-4.0), Just(0.0), Just(0.09), Just(0.81), Just(0.9801)]
}

proptest! {
    #[test]
    fn pythagorean_identities(k2 in parameters(), x in -3.0f64..3.0, y in -0.8f64..0.8) {
        let j = jacobi(c(x, y), k2).unwrap();
        let one = c(1.0, 0.0);
        prop_assert!((j.sn * j.sn + j.cn * j.cn - one).norm() < 1e-11);
        prop_assert!((j.dn * j.dn + k2 * j.sn * j.sn - one).norm() < 1e-11);
    }

    #[test]
    fn derivative_of_sn(k2 in parameters(), x in -3.0f64..3.0, y in -0.8f64..0.8) {
        let h = 1e-6;
        let u = c(x, y);
        let j = jacobi(u, k2).unwrap();
        let fd = (jacobi(u + h, k2).unwrap().sn - jacobi(u - h, k2).unwrap().sn) / (2.0 * h);
        prop_assert!((fd - j.cn * j.dn).norm() < 1e-7 * (1.0 + fd.norm()));
    }

    #[test]
    fn odd_and_even(k2 in parameters(), x in -3.0f64..3.0, y in -0.8f64..0.8) {
        let u = c(x, y);
        let a = jacobi(u, k2).unwrap();
        let b = jacobi(-u, k2).unwrap();
        prop_assert!((a.sn + b.sn).norm() < 1e-12);
        prop_assert!((a.cn - b.cn).norm() < 1e-12);
        prop_assert!((a.dn - b.dn).norm() < 1e-12);
    }

    #[test]
    fn addition_formula(k2 in parameters(), x in -1.5f64..1.5, y in -1.5f64..1.5) {
        let a = jacobi(c(x, 0.0), k2).unwrap();
        let b = jacobi(c(y, 0.0), k2).unwrap();
        let s = jacobi(c(x + y, 0.0), k2).unwrap();
        let den = c(1.0, 0.0) - k2 * a.sn * a.sn * b.sn * b.sn;
        let rhs = (a.sn * b.cn * b.dn + b.sn * a.cn * a.dn) / den;
        prop_assert!((s.sn - rhs).norm() < 1e-12);
    }

    #[test]
    fn g_antisymmetry_and_period(k in 0.05f64..0.95, u in -4.0f64..4.0) {
        let g = g_fn(u, k).unwrap();
        prop_assert!((g + g_fn(PI - u, k).unwrap()).abs() < 1e-11);
        prop_assert!((g - g_fn(u + 2.0 * PI, k).unwrap()).abs() < 1e-11);
        prop_assert!((g - g_fn(-u, k).unwrap()).abs() < 1e-11);
    }

    #[test]
    fn dg_dk_matches_finite_difference(k in 0.05f64..0.9, u in 0.0f64..PI) {
        let h = 1e-5;
        let fd = (g_fn(u, k + h).unwrap() - g_fn(u, k - h).unwrap()) / (2.0 * h);
        prop_assert!((fd - dg_dk(u, k).unwrap()).abs() < 1e-6);
    }
}
