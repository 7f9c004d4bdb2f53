//! Face weights of the eight-vertex model and the transformations acting on them.

use crate::error::{Error, Result};
use crate::quad_graph::{Color, Quadrangulation};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Weights of the four local configuration types at one face.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FaceWeights {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl FaceWeights {
    pub const fn new(a: f64, b: f64, c: f64, d: f64) -> Self {
        FaceWeights { a, b, c, d }
    }

    pub fn to_array(self) -> [f64; 4] {
        [self.a, self.b, self.c, self.d]
    }

    pub fn from_array(x: [f64; 4]) -> Self {
        FaceWeights::new(x[0], x[1], x[2], x[3])
    }

    /// `A^2 + B^2 - C^2 - D^2`, zero on the free-fermion manifold.
    pub fn ff_residual(&self) -> f64 {
        self.a * self.a + self.b * self.b - self.c * self.c - self.d * self.d
    }

    pub fn is_free_fermion(&self, tol: f64) -> bool {
        let scale = self.to_array().iter().map(|v| v * v).sum::<f64>().max(1e-300);
        self.ff_residual().abs() <= tol * scale
    }

    pub fn scaled(self, s: f64) -> Self {
        FaceWeights::new(self.a * s, self.b * s, self.c * s, self.d * s)
    }
}

pub type WeightField = Vec<FaceWeights>;

/// Per-face angle pair parametrizing the free-fermion manifold.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Angles {
    pub alpha: f64,
    pub beta: f64,
}

impl Angles {
    pub const fn new(alpha: f64, beta: f64) -> Self {
        Angles { alpha, beta }
    }

    pub fn swapped(self) -> Self {
        Angles::new(self.beta, self.alpha)
    }

    /// Standard iff `alpha - beta != pi (mod 2 pi)`, checked with a band of `1e-10`.
    pub fn is_standard(&self) -> bool {
        let r = (self.alpha - self.beta - PI).rem_euclid(2.0 * PI);
        r.min(2.0 * PI - r) > STANDARD_TOL
    }

    /// Probability regime `0 < alpha <= beta < pi/2`.
    pub fn is_probabilistic(&self) -> bool {
        0.0 < self.alpha && self.alpha <= self.beta && self.beta < PI / 2.0
    }
}

pub type AngleField = Vec<Angles>;

pub const STANDARD_TOL: f64 = 1e-10;

/// Free-fermion weights of one face.
pub fn ff_face(t: Angles) -> FaceWeights {
    let (sa, ca) = t.alpha.sin_cos();
    let (sb, cb) = t.beta.sin_cos();
    FaceWeights::new(sa + sb, ca + cb, 1.0 + sa * sb + ca * cb, ca * sb - sa * cb)
}

pub fn ff_weights(angles: &[Angles]) -> WeightField {
    angles.iter().map(|&t| ff_face(t)).collect()
}

/// Angles whose free-fermion weights are proportional to `w`.
///
/// The representative returned has `(alpha - beta) / 2` in `(-pi/2, pi/2]` and
/// `(alpha + beta) / 2` in `(-pi, pi]`.
pub fn homogeneous_params(w: FaceWeights, face: usize) -> Result<Angles> {
    if w.c == 0.0 {
        return Err(Error::NonStandard { face, c: 0.0 });
    }
    if !w.is_free_fermion(1e-9) {
        return Err(Error::NotFreeFermion { face, residual: w.ff_residual() });
    }
    // A : B : C : D = sin u : cos u : cos v : -sin v with u, v the half sum and difference
    let s = w.c.signum();
    let u = (s * w.a).atan2(s * w.b);
    let v = (-s * w.d).atan2(s * w.c);
    Ok(Angles::new(u + v, u - v))
}

/// Per-face gauge factor turning a free-fermion face into its normalized form.
pub fn normalizing_gauge(w: FaceWeights) -> f64 {
    2.0 * w.c / (w.a * w.a + w.b * w.b)
}

pub fn gauge(x: &[FaceWeights], lambda: &[f64]) -> Result<WeightField> {
    if lambda.len() != x.len() {
        return Err(Error::Argument("gauge length does not match face count".into()));
    }
    x.iter()
        .zip(lambda)
        .enumerate()
        .map(|(f, (w, &l))| {
            if l == 0.0 {
                Err(Error::Argument(format!("zero gauge factor at face {f}")))
            } else {
                Ok(w.scaled(l))
            }
        })
        .collect()
}

pub const DUALITY: [[f64; 4]; 4] = [
    [0.5, -0.5, 0.5, -0.5],
    [-0.5, 0.5, 0.5, -0.5],
    [0.5, 0.5, 0.5, 0.5],
    [-0.5, -0.5, 0.5, 0.5],
];

pub fn duality_face(w: FaceWeights) -> FaceWeights {
    let x = w.to_array();
    let mut y = [0.0; 4];
    for i in 0..4 {
        y[i] = (0..4).map(|j| DUALITY[i][j] * x[j]).sum();
    }
    FaceWeights::from_array(y)
}

pub fn duality_hat(x: &[FaceWeights]) -> WeightField {
    x.iter().map(|&w| duality_face(w)).collect()
}

pub fn negate_d(x: &[FaceWeights]) -> WeightField {
    x.iter().map(|w| FaceWeights::new(w.a, w.b, w.c, -w.d)).collect()
}

/// Single-face order and disorder operators.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FaceOp {
    /// Order line on the black diagonal: negates B and D.
    OrderBlack,
    /// Order line on the white diagonal: negates A and D.
    OrderWhite,
    /// Disorder line on the black diagonal: (A, B, C, D) to (C, D, A, B).
    DisorderBlack,
    /// Disorder line on the white diagonal: (A, B, C, D) to (D, C, B, A).
    DisorderWhite,
}

pub fn apply_face_op(op: FaceOp, w: FaceWeights) -> FaceWeights {
    let FaceWeights { a, b, c, d } = w;
    match op {
        FaceOp::OrderBlack => FaceWeights::new(a, -b, c, -d),
        FaceOp::OrderWhite => FaceWeights::new(-a, b, c, -d),
        FaceOp::DisorderBlack => FaceWeights::new(c, d, a, b),
        FaceOp::DisorderWhite => FaceWeights::new(d, c, b, a),
    }
}

/// Order lines and disorder lines as face sets: `order_black` and
/// `order_white` run along black and white diagonals and pair up the order
/// variables, `disorder_black` and `disorder_white` pair up the disorder
/// variables.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Paths {
    pub order_black: Vec<usize>,
    pub order_white: Vec<usize>,
    pub disorder_black: Vec<usize>,
    pub disorder_white: Vec<usize>,
}

impl Paths {
    pub fn is_empty(&self) -> bool {
        self.order_black.is_empty()
            && self.order_white.is_empty()
            && self.disorder_black.is_empty()
            && self.disorder_white.is_empty()
    }
}

/// Vertices of odd degree in the subgraph of the black (or white) diagonal
/// graph formed by the diagonals of the given faces. For a union of disjoint
/// simple paths this is the set of endpoints.
pub fn path_endpoints(q: &Quadrangulation, faces: &[usize], color: Color) -> Result<Vec<usize>> {
    let mut parity = vec![false; q.num_vertices()];
    let mut seen = vec![false; q.num_faces()];
    for &f in faces {
        let face = q
            .faces
            .get(f)
            .ok_or_else(|| Error::Argument(format!("path face {f} out of range")))?;
        if std::mem::replace(&mut seen[f], true) {
            return Err(Error::Argument(format!("path uses face {f} twice")));
        }
        let (u, v) = match color {
            Color::Black => (face.cycle[0], face.cycle[2]),
            Color::White => (face.cycle[1], face.cycle[3]),
        };
        parity[u] ^= true;
        parity[v] ^= true;
    }
    Ok((0..q.num_vertices()).filter(|&v| parity[v]).collect())
}

/// Modified weights: order operators first, then disorder operators.
pub fn apply_disorder_ops(q: &Quadrangulation, x: &[FaceWeights], paths: &Paths) -> Result<WeightField> {
    for (faces, color) in [
        (&paths.order_black, Color::Black),
        (&paths.order_white, Color::White),
        (&paths.disorder_black, Color::Black),
        (&paths.disorder_white, Color::White),
    ] {
        path_endpoints(q, faces, color)?;
    }
    let mut out = x.to_vec();
    for (faces, op) in [
        (&paths.order_white, FaceOp::OrderWhite),
        (&paths.order_black, FaceOp::OrderBlack),
        (&paths.disorder_white, FaceOp::DisorderWhite),
        (&paths.disorder_black, FaceOp::DisorderBlack),
    ] {
        for &f in faces {
            out[f] = apply_face_op(op, out[f]);
        }
    }
    Ok(out)
}

/// Ising couplings on the black and white diagonal graphs.
pub fn ising_couplings(t: Angles) -> (f64, f64) {
    let jb = 0.5 * ((1.0 + t.alpha.sin()) / t.alpha.cos()).ln();
    let jw = 0.5 * ((1.0 + t.beta.cos()) / t.beta.sin()).ln();
    (jb, jw)
}

/// Face weights of the spin representation with the given couplings.
pub fn spin_face_weights(jb: f64, jw: f64) -> FaceWeights {
    FaceWeights::new((jb - jw).exp(), (jw - jb).exp(), (jb + jw).exp(), (-jb - jw).exp())
}

fn check_standard(angles: &[Angles]) -> Result<()> {
    for (f, t) in angles.iter().enumerate() {
        if !t.is_standard() {
            return Err(Error::NonStandard { face: f, c: ff_face(*t).c });
        }
    }
    Ok(())
}

fn combine(alpha: &[Angles], beta: &[Angles]) -> AngleField {
    alpha.iter().zip(beta).map(|(x, y)| Angles::new(x.alpha, y.beta)).collect()
}

/// Product of C over all faces.
pub fn c_product(angles: &[Angles]) -> Result<f64> {
    check_standard(angles)?;
    Ok(angles.iter().map(|&t| ff_face(t).c).product())
}

/// Constant relating the free-fermion partition function to the product of
/// the two Ising partition functions.
pub fn c0(angles: &[Angles]) -> Result<f64> {
    check_standard(angles)?;
    Ok(0.5
        * angles
            .iter()
            .map(|&t| (t.alpha.cos() * t.beta.sin() * ff_face(t).c).sqrt())
            .product::<f64>())
}

/// Switching constant for the pair of fields `(alpha, beta)` and `(alpha', beta')`.
pub fn c1(first: &[Angles], second: &[Angles]) -> Result<f64> {
    let num = c_product(first)? * c_product(second)?;
    let den = c_product(&combine(first, second))? * c_product(&combine(second, first))?;
    Ok((num / den).sqrt())
}

/// Constant of the polynomial switching identity on the torus.
pub fn c2(first: &[Angles], second: &[Angles]) -> Result<f64> {
    let num = c_product(&combine(first, second))? * c_product(&combine(second, first))?;
    Ok(num / (c_product(first)? * c_product(second)?))
}

/// Modulus of the constant in the characteristic polynomial factorization.
pub fn c_tilde_abs(angles: &[Angles]) -> Result<f64> {
    check_standard(angles)?;
    Ok(angles.iter().map(|&t| 2.0 / ff_face(t).c.abs()).product())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: FaceWeights, b: FaceWeights, tol: f64) -> bool {
        a.to_array().iter().zip(b.to_array()).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn ff_examples() {
        let s = 2f64.sqrt();
        let w = ff_face(Angles::new(PI / 4.0, PI / 4.0));
        assert!(close(w, FaceWeights::new(s, s, 2.0, 0.0), 1e-14));
        let t = Angles::new(0.3, 1.1);
        let (w, ws) = (ff_face(t), ff_face(t.swapped()));
        assert!(close(ws, FaceWeights::new(w.a, w.b, w.c, -w.d), 1e-14));
        let w = ff_face(Angles::new(0.7, 0.7));
        assert!(w.d.abs() < 1e-15);
        assert!((w.a / w.c - 0.7f64.sin()).abs() < 1e-14);
        assert!((w.b / w.c - 0.7f64.cos()).abs() < 1e-14);
    }

    #[test]
    fn homogeneous_examples() {
        let s = 2f64.sqrt();
        let t = homogeneous_params(FaceWeights::new(s, s, 2.0, 0.0), 0).unwrap();
        assert!((t.alpha - PI / 4.0).abs() < 1e-14 && (t.beta - PI / 4.0).abs() < 1e-14);
        let t = homogeneous_params(FaceWeights::new(2.0, 0.0, 2.0, 0.0), 0).unwrap();
        assert!((t.alpha - PI / 2.0).abs() < 1e-14 && (t.beta - PI / 2.0).abs() < 1e-14);
        assert!(homogeneous_params(FaceWeights::new(1.0, 1.0, 1.0, 0.0), 0).is_err());
        assert!(homogeneous_params(FaceWeights::new(1.0, 0.0, 0.0, 1.0), 0).is_err());
    }

    #[test]
    fn duality_examples() {
        let w = duality_face(FaceWeights::new(1.0, 1.0, 1.0, 1.0));
        assert!(close(w, FaceWeights::new(0.0, 0.0, 2.0, 0.0), 1e-15));
        let x = FaceWeights::new(0.3, -1.2, 2.5, 0.7);
        assert!(close(duality_face(duality_face(x)), x, 1e-14));
    }

    #[test]
    fn operator_order_matters() {
        let x = FaceWeights::new(1.0, 2.0, 3.0, 4.0);
        let a = apply_face_op(FaceOp::DisorderWhite, apply_face_op(FaceOp::OrderBlack, x));
        let b = apply_face_op(FaceOp::OrderBlack, apply_face_op(FaceOp::DisorderWhite, x));
        assert!(close(a, b.scaled(-1.0), 0.0));
        let c = apply_face_op(FaceOp::DisorderBlack, x);
        assert!(close(c, FaceWeights::new(3.0, 4.0, 1.0, 2.0), 0.0));
    }

    #[test]
    fn c_examples() {
        let t = vec![Angles::new(PI / 4.0, PI / 4.0); 6];
        assert!((c_product(&t).unwrap() - 64.0).abs() < 1e-12);
        let r = vec![Angles::new(0.2, 0.9); 6];
        assert!((c1(&r, &r).unwrap() - 1.0).abs() < 1e-14);
        assert!(c_product(&[Angles::new(PI, 0.0)]).is_err());
    }
}
