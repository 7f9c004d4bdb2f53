//! Jacobi elliptic functions and complete/incomplete elliptic integrals.
//!
//! Moduli are passed as the parameter `k2 = k^2`, which may be negative.
//! Real arguments use the descending AGM recursion; complex arguments use the
//! addition formulas with the complementary parameter. Negative parameters are
//! reduced to `(0, 1)` by the imaginary-modulus transformation.

use crate::error::{Error, Result};
use num_complex::Complex64;
use std::f64::consts::PI;

const AGM_TOL: f64 = 1e-16;
/// Squared distance to a pole below which evaluation is refused.
const POLE_DEN: f64 = 1e-16;
/// Modulus of a denominator below which a ratio function reports a pole.
const POLE_RATIO: f64 = 1e-8;

fn check_parameter(k2: f64) -> Result<()> {
    if !(k2 < 1.0) || !k2.is_finite() {
        return Err(Error::Argument(format!("elliptic parameter k^2 = {k2} must be < 1")));
    }
    Ok(())
}

/// `(a_n, c_n)` of the AGM sequence started at `(1, sqrt(1 - m))`, `0 <= m < 1`.
fn agm_sequence(m: f64) -> (Vec<f64>, Vec<f64>) {
    let mut a = vec![1.0];
    let mut c = vec![m.sqrt()];
    let mut b = (1.0 - m).sqrt();
    while c.last().unwrap().abs() > AGM_TOL && a.len() < 64 {
        let an = *a.last().unwrap();
        a.push(0.5 * (an + b));
        c.push(0.5 * (an - b));
        b = (an * b).sqrt();
    }
    (a, c)
}

/// Complete integral of the first kind `K(k)`.
pub fn complete_k(k2: f64) -> Result<f64> {
    check_parameter(k2)?;
    if k2 < 0.0 {
        let mu = -k2 / (1.0 - k2);
        return Ok(complete_k(mu)? / (1.0 - k2).sqrt());
    }
    let (a, _) = agm_sequence(k2);
    Ok(PI / (2.0 * a.last().unwrap()))
}

/// Complete integral of the second kind `E(k)`.
pub fn complete_e(k2: f64) -> Result<f64> {
    check_parameter(k2)?;
    if k2 < 0.0 {
        let mu = -k2 / (1.0 - k2);
        return Ok(complete_e(mu)? * (1.0 - k2).sqrt());
    }
    let (a, c) = agm_sequence(k2);
    let mut s = 0.0;
    let mut p = 0.5;
    for cn in &c {
        s += p * cn * cn;
        p *= 2.0;
    }
    Ok(PI / (2.0 * a.last().unwrap()) * (1.0 - s))
}

/// Real Jacobi functions and amplitude for `0 <= m <= 1`.
#[derive(Clone, Copy, Debug)]
struct RealJacobi {
    sn: f64,
    cn: f64,
    dn: f64,
    am: f64,
}

fn real_jacobi(u: f64, m: f64) -> RealJacobi {
    if m >= 1.0 {
        let t = u.tanh();
        let s = 1.0 / u.cosh();
        return RealJacobi { sn: t, cn: s, dn: s, am: 2.0 * (0.5 * u).tanh().atan() };
    }
    let (a, c) = agm_sequence(m);
    let n = a.len() - 1;
    let quarter = PI / (2.0 * a[n]);
    // reduce by the real period 4K for accuracy; am grows by 2 pi per period
    let turns = (u / (4.0 * quarter)).round();
    let ur = u - 4.0 * quarter * turns;
    let mut phi = 2f64.powi(n as i32) * a[n] * ur;
    for j in (1..=n).rev() {
        phi = 0.5 * (phi + (c[j] / a[j] * phi.sin()).asin());
    }
    let (sn, cn) = phi.sin_cos();
    let dn = (1.0 - m * sn * sn).sqrt();
    RealJacobi { sn, cn, dn, am: phi + 2.0 * PI * turns }
}

/// Values of sn, cn, dn at one point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jacobi {
    pub sn: Complex64,
    pub cn: Complex64,
    pub dn: Complex64,
}

fn ratio(num: Complex64, den: Complex64) -> Result<Complex64> {
    if den.norm() < POLE_RATIO {
        Err(Error::Pole("zero of a ratio denominator".into()))
    } else {
        Ok(num / den)
    }
}

impl Jacobi {
    pub fn sc(&self) -> Result<Complex64> {
        ratio(self.sn, self.cn)
    }
    pub fn nc(&self) -> Result<Complex64> {
        ratio(Complex64::new(1.0, 0.0), self.cn)
    }
    pub fn dc(&self) -> Result<Complex64> {
        ratio(self.dn, self.cn)
    }
    pub fn nd(&self) -> Result<Complex64> {
        ratio(Complex64::new(1.0, 0.0), self.dn)
    }
    pub fn sd(&self) -> Result<Complex64> {
        ratio(self.sn, self.dn)
    }
    pub fn cd(&self) -> Result<Complex64> {
        ratio(self.cn, self.dn)
    }
}

/// Numerators of sn, cn, dn over their common denominator, `0 <= m < 1`.
fn unit_projective(u: Complex64, m: f64) -> ([Complex64; 3], f64) {
    let r = real_jacobi(u.re, m);
    if u.im == 0.0 {
        return ([r.sn.into(), r.cn.into(), r.dn.into()], 1.0);
    }
    let i = real_jacobi(u.im, 1.0 - m);
    let (s, c, d) = (r.sn, r.cn, r.dn);
    let (s1, c1, d1) = (i.sn, i.cn, i.dn);
    let num = [
        Complex64::new(s * d1, c * d * s1 * c1),
        Complex64::new(c * c1, -s * d * s1 * d1),
        Complex64::new(d * c1 * d1, -m * s * c * s1),
    ];
    (num, c1 * c1 + m * s * s * s1 * s1)
}

fn jacobi_unit(u: Complex64, m: f64) -> Result<Jacobi> {
    let ([sn, cn, dn], den) = unit_projective(u, m);
    if den < POLE_DEN {
        return Err(Error::Pole(format!("{u}")));
    }
    Ok(Jacobi { sn: sn / den, cn: cn / den, dn: dn / den })
}

/// sn, cn, dn as numerators over the common denominator `den`. Ratios stay
/// finite at the poles of the individual functions, where `jacobi` refuses
/// to evaluate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProjectiveJacobi {
    pub sn: Complex64,
    pub cn: Complex64,
    pub dn: Complex64,
    pub den: f64,
}

impl ProjectiveJacobi {
    fn ratio(&self, num: Complex64, den: Complex64) -> Result<Complex64> {
        let scale = self.sn.norm().max(self.cn.norm()).max(self.dn.norm()).max(self.den);
        if den.norm() < POLE_RATIO * scale {
            Err(Error::Pole("zero of a ratio denominator".into()))
        } else {
            Ok(num / den)
        }
    }
    pub fn sc(&self) -> Result<Complex64> {
        self.ratio(self.sn, self.cn)
    }
    pub fn nc(&self) -> Result<Complex64> {
        self.ratio(self.den.into(), self.cn)
    }
    pub fn dc(&self) -> Result<Complex64> {
        self.ratio(self.dn, self.cn)
    }
    pub fn nd(&self) -> Result<Complex64> {
        self.ratio(self.den.into(), self.dn)
    }
}

/// Projective sn, cn, dn for `0 <= k2 < 1`.
pub fn jacobi_projective(u: Complex64, k2: f64) -> Result<ProjectiveJacobi> {
    if !(0.0..1.0).contains(&k2) {
        return Err(Error::Argument(format!("projective evaluation needs 0 <= k^2 < 1, got {k2}")));
    }
    let ([sn, cn, dn], den) = unit_projective(u, k2);
    Ok(ProjectiveJacobi { sn, cn, dn, den })
}

/// sn, cn, dn at a complex argument for parameter `k2 < 1`.
pub fn jacobi(u: Complex64, k2: f64) -> Result<Jacobi> {
    check_parameter(k2)?;
    if k2 >= 0.0 {
        return jacobi_unit(u, k2);
    }
    let p = -k2;
    let mu = p / (1.0 + p);
    let scale = (1.0 + p).sqrt();
    let j = jacobi_unit(u * scale, mu)?;
    Ok(Jacobi {
        sn: j.sd()? / scale,
        cn: j.cd()?,
        dn: j.nd()?,
    })
}

/// Real-argument shortcut returning `(sn, cn, dn)`.
pub fn jacobi_real(u: f64, k2: f64) -> Result<(f64, f64, f64)> {
    let j = jacobi(u.into(), k2)?;
    Ok((j.sn.re, j.cn.re, j.dn.re))
}

/// Jacobi amplitude, continuous and increasing in `u`.
pub fn am(u: f64, k2: f64) -> Result<f64> {
    check_parameter(k2)?;
    if k2 >= 0.0 {
        return Ok(real_jacobi(u, k2).am);
    }
    let (sn, cn, _) = jacobi_real(u, k2)?;
    let base = sn.atan2(cn);
    let linear = PI * u / (2.0 * complete_k(k2)?);
    let turns = ((linear - base) / (2.0 * PI)).round();
    Ok(base + 2.0 * PI * turns)
}

/// Rescaling of an angle so that `pi / 2` maps to `K(k)`.
pub fn theta_scale(theta: f64, k2: f64) -> Result<f64> {
    Ok(2.0 * complete_k(k2)? / PI * theta)
}

/// Quantities derived from one modulus.
#[derive(Clone, Copy, Debug)]
pub struct EllipticContext {
    pub k2: f64,
    /// Complementary modulus `sqrt(1 - k^2)`, larger than 1 when `k^2 < 0`.
    pub kp: f64,
    pub big_k: f64,
    pub big_e: f64,
    /// `K(k')`, defined for `0 <= k^2 < 1`.
    pub big_kp: Option<f64>,
    /// Nome `exp(-pi K' / K)`, defined for `0 <= k^2 < 1`.
    pub nome: Option<f64>,
}

impl EllipticContext {
    pub fn new(k2: f64) -> Result<Self> {
        check_parameter(k2)?;
        let big_k = complete_k(k2)?;
        let big_kp = if k2 >= 0.0 && k2 < 1.0 && k2 > 0.0 {
            Some(complete_k(1.0 - k2)?)
        } else {
            None
        };
        Ok(EllipticContext {
            k2,
            kp: (1.0 - k2).sqrt(),
            big_k,
            big_e: complete_e(k2)?,
            big_kp,
            nome: big_kp.map(|kp| (-PI * kp / big_k).exp()),
        })
    }

    pub fn from_modulus(k: f64) -> Result<Self> {
        Self::new(k * k)
    }

    pub fn jacobi(&self, u: Complex64) -> Result<Jacobi> {
        jacobi(u, self.k2)
    }

    /// Angle rescaled so that `pi/2` maps to `K`.
    pub fn scale(&self, theta: f64) -> f64 {
        2.0 * self.big_k / PI * theta
    }

    /// Imaginary period of the torus on which the local kernels live,
    /// `2 pi K' / K`.
    pub fn torus_height(&self) -> Result<f64> {
        self.big_kp
            .map(|kp| 2.0 * PI * kp / self.big_k)
            .ok_or_else(|| Error::Argument("torus height needs 0 < k^2 < 1".into()))
    }
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for j in 2..=n {
                let p2 = ((2 * j - 1) as f64 * z * p1 - (j - 1) as f64 * p0) / j as f64;
                p0 = p1;
                p1 = p2;
            }
            let dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                let (mut q0, mut q1) = (1.0, z);
                for j in 2..=n {
                    let q2 = ((2 * j - 1) as f64 * z * q1 - (j - 1) as f64 * q0) / j as f64;
                    q0 = q1;
                    q1 = q2;
                }
                let dq = n as f64 * (z * q1 - q0) / (z * z - 1.0);
                w[i] = 2.0 / ((1.0 - z * z) * dq * dq);
                break;
            }
        }
        x[i] = z;
    }
    (x, w)
}

/// Incomplete integral of the second kind in Jacobi form, `int_0^v dn^2`.
pub fn incomplete_e(v: f64, k2: f64) -> Result<f64> {
    let big_k = complete_k(k2)?;
    let panels = ((v.abs() / (0.25 * big_k)).ceil() as usize).max(1);
    let (x, w) = gauss_legendre(16);
    let h = v / panels as f64;
    let mut s = 0.0;
    for p in 0..panels {
        let mid = (p as f64 + 0.5) * h;
        for (xi, wi) in x.iter().zip(&w) {
            let (_, _, dn) = jacobi_real(mid + 0.5 * h * xi, k2)?;
            s += wi * dn * dn;
        }
    }
    Ok(0.5 * h * s)
}

/// `log(sqrt(k') nd(K u / pi | k))`, for real `0 < k < 1`.
pub fn g_fn(u: f64, k: f64) -> Result<f64> {
    let ctx = EllipticContext::from_modulus(k)?;
    let (_, _, dn) = jacobi_real(ctx.big_k * u / PI, ctx.k2)?;
    Ok(0.5 * ctx.kp.ln() - dn.ln())
}

/// Closed-form derivative of `g_fn` in the modulus.
pub fn dg_dk(u: f64, k: f64) -> Result<f64> {
    let ctx = EllipticContext::from_modulus(k)?;
    let kp2 = ctx.kp * ctx.kp;
    let v = ctx.big_k * u / PI;
    let (sn, cn, dn) = jacobi_real(v, ctx.k2)?;
    let bracket = v * ctx.big_e / ctx.big_k - incomplete_e(v, ctx.k2)?;
    // the pole of sn dn / cn cancels against sn cn / dn, leaving sn^2
    Ok(-k / (2.0 * kp2) + k / kp2 * (bracket * sn * cn / dn + sn * sn))
}
