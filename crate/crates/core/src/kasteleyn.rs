//! Decorated dimer graph, Kasteleyn matrices and their Pfaffians.
//!
//! Every face `f` of the quadrangulation carries four decoration vertices
//! `4 f + i`, the vertex `i` sitting next to the face edge `e_i`. Vertices with
//! even `i` are black, odd ones white. Inside a face the decoration is a
//! complete graph; every interior edge of the quadrangulation carries a leg
//! joining the two decoration vertices on either side of it.

use crate::error::{Error, Result};
use crate::linalg::{c, det, identity, inverse, max_abs, pfaffian, principal, CMat, I};
use crate::quad_graph::{Color, Quadrangulation, Surface};
use crate::weights::{ff_weights, Angles, FaceWeights};
use num_complex::Complex64;
use std::collections::VecDeque;
use std::f64::consts::PI;

/// Sign pattern of the four twisted Pfaffians `(00, 01, 10, 11)` in the toric
/// partition function, calibrated against exhaustive enumeration.
pub const TORUS_SIGNS: [f64; 4] = [-1.0, 1.0, 1.0, 1.0];

/// Entries below this modulus are treated as absent when propagating phases.
const GAUGE_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Leg {
    /// Primal edge crossed by the leg.
    pub edge: usize,
    pub black: usize,
    pub white: usize,
    pub phi: f64,
    /// Lattice cell of the black endpoint seen from the white endpoint.
    pub shift: (i32, i32),
}

#[derive(Clone, Debug)]
pub struct DecoratedGraph {
    pub surface: Surface,
    pub num_faces: usize,
    pub colors: Vec<Color>,
    /// One entry per primal edge; boundary edges of patches carry no leg.
    pub legs: Vec<Option<Leg>>,
    /// Primal edge next to each decoration vertex.
    pub edge_of: Vec<usize>,
    /// Other endpoint of the leg at each decoration vertex.
    pub partner: Vec<Option<usize>>,
    /// Face cycles of the quadrangulation, kept for the parity check.
    cycles: Vec<[usize; 4]>,
    num_primal_vertices: usize,
}

/// Decoration vertex of face `f` next to its edge `i`.
pub fn deco(f: usize, i: usize) -> usize {
    4 * f + i
}

pub fn build_gt(q: &Quadrangulation, phi: &[f64]) -> Result<DecoratedGraph> {
    if phi.len() != q.num_edges() {
        return Err(Error::Argument(format!(
            "{} leg angles for {} edges",
            phi.len(),
            q.num_edges()
        )));
    }
    let nf = q.num_faces();
    let colors = (0..4 * nf)
        .map(|x| if x % 2 == 0 { Color::Black } else { Color::White })
        .collect();
    let mut legs = Vec::with_capacity(q.num_edges());
    let mut partner = vec![None; 4 * nf];
    for (e, edge) in q.edges.iter().enumerate() {
        let leg = match (edge.black_side, edge.white_side) {
            (Some((fb, i)), Some((fw, j))) => {
                let leg = Leg {
                    edge: e,
                    black: deco(fb, i),
                    white: deco(fw, j),
                    phi: phi[e],
                    shift: edge.shift,
                };
                partner[leg.black] = Some(leg.white);
                partner[leg.white] = Some(leg.black);
                Some(leg)
            }
            _ => None,
        };
        legs.push(leg);
    }
    let edge_of = (0..4 * nf).map(|x| q.faces[x / 4].edges[x % 4]).collect();
    Ok(DecoratedGraph {
        surface: q.surface,
        num_faces: nf,
        colors,
        legs,
        edge_of,
        partner,
        cycles: q.faces.iter().map(|f| f.cycle).collect(),
        num_primal_vertices: q.num_vertices(),
    })
}

impl DecoratedGraph {
    pub fn num_vertices(&self) -> usize {
        4 * self.num_faces
    }

    /// Edges of the decorated graph as unordered pairs.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for f in 0..self.num_faces {
            for (i, j) in [(0, 1), (1, 2), (2, 3), (3, 0), (0, 2), (1, 3)] {
                out.push((deco(f, i), deco(f, j)));
            }
        }
        out.extend(self.legs.iter().flatten().map(|l| (l.black, l.white)));
        out
    }

    /// Faces of the graph obtained by deleting the diagonals of one color,
    /// each given as a counterclockwise vertex cycle: two triangles per face
    /// of the quadrangulation and one cycle around each primal vertex.
    pub fn faces_without(&self, removed: Color) -> Result<Vec<Vec<usize>>> {
        if self.surface == Surface::Patch {
            return Err(Error::Surface("face structure needs a closed surface".into()));
        }
        let mut out = Vec::new();
        for f in 0..self.num_faces {
            let d = |i| deco(f, i);
            match removed {
                // the white diagonal d1 d3 splits the decoration
                Color::Black => {
                    out.push(vec![d(0), d(1), d(3)]);
                    out.push(vec![d(1), d(2), d(3)]);
                }
                Color::White => {
                    out.push(vec![d(0), d(1), d(2)]);
                    out.push(vec![d(0), d(2), d(3)]);
                }
            }
        }
        // around vertex v, crossing edge e_i of face f leads from d_i to d_{i-1}
        // inside f, then along the leg of e_{i-1} into the next face
        let mut start: Vec<Option<(usize, usize)>> = vec![None; self.num_primal_vertices];
        for (f, cyc) in self.cycles.iter().enumerate() {
            for (i, &v) in cyc.iter().enumerate() {
                start[v].get_or_insert((f, i));
            }
        }
        for (v, s) in start.into_iter().enumerate() {
            let Some((f0, i0)) = s else { continue };
            let mut cycle = Vec::new();
            let (mut f, mut i) = (f0, i0);
            loop {
                let from = deco(f, i);
                let to = deco(f, (i + 3) % 4);
                cycle.push(from);
                cycle.push(to);
                let across = self.partner[to]
                    .ok_or_else(|| Error::InvalidGraph(format!("missing leg around vertex {v}")))?;
                f = across / 4;
                i = across % 4;
                if self.cycles[f][i] != v {
                    return Err(Error::InvalidGraph(format!("inconsistent rotation at vertex {v}")));
                }
                if (f, i) == (f0, i0) {
                    break;
                }
                if cycle.len() > 4 * self.num_faces {
                    return Err(Error::InvalidGraph(format!("rotation at vertex {v} does not close")));
                }
            }
            out.push(cycle);
        }
        Ok(out)
    }
}

/// Direction of every decorated edge: `true` when oriented from the first to
/// the second listed endpoint.
#[derive(Clone, Debug)]
pub struct Orientation {
    pub edges: Vec<(usize, usize)>,
    pub forward: Vec<bool>,
}

impl Orientation {
    /// Sign of the oriented edge from `x` to `y`, zero if not adjacent.
    pub fn sign(&self, x: usize, y: usize) -> f64 {
        for (k, &(a, b)) in self.edges.iter().enumerate() {
            if (a, b) == (x, y) {
                return if self.forward[k] { 1.0 } else { -1.0 };
            }
            if (a, b) == (y, x) {
                return if self.forward[k] { -1.0 } else { 1.0 };
            }
        }
        0.0
    }

    /// Faces of `faces` with an even number of clockwise edges.
    pub fn parity_failures(&self, faces: &[Vec<usize>]) -> Vec<usize> {
        faces
            .iter()
            .enumerate()
            .filter(|(_, cyc)| {
                let clockwise = (0..cyc.len())
                    .filter(|&j| self.sign(cyc[j], cyc[(j + 1) % cyc.len()]) < 0.0)
                    .count();
                clockwise % 2 == 0
            })
            .map(|(k, _)| k)
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Flavor {
    /// Real skew-symmetric matrix obtained from an admissible orientation.
    SkewSymmetric,
    /// Complex skew-Hermitian matrix with leg phases.
    SkewHermitian,
}

/// Decorated graph together with the unitary gauge relating the two flavors.
#[derive(Clone, Debug)]
pub struct Kasteleyn {
    pub gt: DecoratedGraph,
    /// Unit diagonal with `gauge * K * conj(gauge)` real for every weight field.
    pub gauge: Vec<Complex64>,
}

fn face_entries(m: &mut CMat, f: usize, w: FaceWeights) -> Result<()> {
    if w.c == 0.0 {
        return Err(Error::NonStandard { face: f, c: w.c });
    }
    let (a, b, d) = (w.a / w.c, w.b / w.c, w.d / w.c);
    let x = |i| deco(f, i);
    for (p, q) in [(0, 1), (2, 3)] {
        m[(x(p), x(q))] += I * a;
        m[(x(q), x(p))] += I * a;
    }
    for (p, q) in [(3, 0), (1, 2)] {
        m[(x(p), x(q))] += c(b, 0.0);
        m[(x(q), x(p))] -= c(b, 0.0);
    }
    for (p, q) in [(1, 3), (0, 2)] {
        m[(x(p), x(q))] += I * d;
        m[(x(q), x(p))] += I * d;
    }
    Ok(())
}

fn twist_factor(shift: (i32, i32), z: Complex64, w: Complex64) -> Complex64 {
    z.powi(shift.0) * w.powi(shift.1)
}

/// Skew-Hermitian matrix with leg phases, optionally twisted by `(z, w)`.
fn assemble_hermitian(gt: &DecoratedGraph, x: &[FaceWeights], twist: Option<(Complex64, Complex64)>) -> Result<CMat> {
    if x.len() != gt.num_faces {
        return Err(Error::Argument(format!("{} weights for {} faces", x.len(), gt.num_faces)));
    }
    let n = gt.num_vertices();
    let mut m = CMat::zeros(n, n);
    for (f, &w) in x.iter().enumerate() {
        face_entries(&mut m, f, w)?;
    }
    let (z, w) = twist.unwrap_or((c(1.0, 0.0), c(1.0, 0.0)));
    for leg in gt.legs.iter().flatten() {
        let t = twist_factor(leg.shift, z, w);
        let ph = Complex64::from_polar(1.0, leg.phi);
        m[(leg.white, leg.black)] += -ph * t;
        m[(leg.black, leg.white)] += ph.conj() / t;
    }
    Ok(m)
}

impl Kasteleyn {
    pub fn new(q: &Quadrangulation, phi: &[f64]) -> Result<Self> {
        let gt = build_gt(q, phi)?;
        let unit = vec![FaceWeights::new(1.0, 1.0, 1.0, 1.0); gt.num_faces];
        let pattern = assemble_hermitian(&gt, &unit, None)?;
        let gauge = propagate_gauge(&pattern)?;
        Ok(Kasteleyn { gt, gauge })
    }

    pub fn num_vertices(&self) -> usize {
        self.gt.num_vertices()
    }

    /// Kasteleyn matrix of the requested flavor. On the torus the twist
    /// multiplies each leg entry from white to black by `z^m w^n`.
    pub fn assemble(&self, x: &[FaceWeights], flavor: Flavor, twist: Option<(Complex64, Complex64)>) -> Result<CMat> {
        let m = assemble_hermitian(&self.gt, x, twist)?;
        Ok(match flavor {
            Flavor::SkewHermitian => m,
            Flavor::SkewSymmetric => self.conjugate(&m),
        })
    }

    /// `gauge * m * conj(gauge)`.
    pub fn conjugate(&self, m: &CMat) -> CMat {
        let g = &self.gauge;
        CMat::from_fn(m.nrows(), m.ncols(), |i, j| g[i] * m[(i, j)] * g[j].conj())
    }

    pub fn k_matrix(&self, x: &[FaceWeights]) -> Result<CMat> {
        self.assemble(x, Flavor::SkewHermitian, None)
    }

    pub fn k_twisted(&self, x: &[FaceWeights], z: Complex64, w: Complex64) -> Result<CMat> {
        self.assemble(x, Flavor::SkewHermitian, Some((z, w)))
    }

    /// Real skew-symmetric matrix with the sign flips `(theta, tau)`.
    pub fn k_tilde(&self, x: &[FaceWeights], flips: (u8, u8)) -> Result<CMat> {
        let s = |b: u8| c(if b == 0 { 1.0 } else { -1.0 }, 0.0);
        let twist = (flips != (0, 0)).then(|| (s(flips.0), s(flips.1)));
        let mut m = self.assemble(x, Flavor::SkewSymmetric, twist)?;
        for v in m.iter_mut() {
            v.im = 0.0;
        }
        Ok(m)
    }

    /// Largest imaginary part of the gauged matrix, zero when the gauge is valid.
    pub fn gauge_residual(&self, x: &[FaceWeights], twist: Option<(Complex64, Complex64)>) -> Result<f64> {
        let m = self.assemble(x, Flavor::SkewSymmetric, twist)?;
        Ok(m.iter().fold(0.0, |acc, v| acc.max(v.im.abs())))
    }

    /// Orientation read off the gauged unit-weight pattern.
    pub fn orientation(&self) -> Result<Orientation> {
        let unit = vec![FaceWeights::new(1.0, 1.0, 1.0, 1.0); self.gt.num_faces];
        let m = self.assemble(&unit, Flavor::SkewSymmetric, None)?;
        let edges = self.gt.edges();
        let forward = edges.iter().map(|&(a, b)| m[(a, b)].re > 0.0).collect();
        Ok(Orientation { edges, forward })
    }

    /// Faces of both planar restrictions that violate the Kasteleyn parity
    /// condition, as `(color of removed diagonals, face index)`.
    pub fn admissibility_failures(&self) -> Result<Vec<(Color, usize)>> {
        let o = self.orientation()?;
        let mut out = Vec::new();
        for color in [Color::Black, Color::White] {
            let faces = self.gt.faces_without(color)?;
            out.extend(o.parity_failures(&faces).into_iter().map(|k| (color, k)));
        }
        Ok(out)
    }

    /// Leg-only matrix with `T[w, w^] = -e^{i phi}` and `T[w^, w] = -e^{-i phi}`,
    /// twisted like the legs of `K(z, w)`.
    pub fn t_matrix(&self, twist: Option<(Complex64, Complex64)>) -> CMat {
        let n = self.num_vertices();
        let mut t = CMat::zeros(n, n);
        let (z, w) = twist.unwrap_or((c(1.0, 0.0), c(1.0, 0.0)));
        for leg in self.gt.legs.iter().flatten() {
            let tw = twist_factor(leg.shift, z, w);
            let ph = Complex64::from_polar(1.0, leg.phi);
            t[(leg.white, leg.black)] = -ph * tw;
            t[(leg.black, leg.white)] = -ph.conj() / tw;
        }
        t
    }

    /// Diagonal matrix with `+1` on black and `-1` on white vertices.
    pub fn d_matrix(&self) -> CMat {
        let n = self.num_vertices();
        CMat::from_fn(n, n, |i, j| {
            if i != j {
                c(0.0, 0.0)
            } else if self.gt.colors[i] == Color::Black {
                c(1.0, 0.0)
            } else {
                c(-1.0, 0.0)
            }
        })
    }

    /// Sign relating the Pfaffian to the partition function, fixed by the
    /// reference field with all angles at `pi/4`.
    fn reference_sign(&self, raw: impl Fn(&[FaceWeights]) -> Result<f64>) -> Result<f64> {
        let reference = ff_weights(&vec![Angles::new(PI / 4.0, PI / 4.0); self.gt.num_faces]);
        let v = raw(&reference)?;
        if v == 0.0 {
            return Err(Error::Singular);
        }
        Ok(v.signum())
    }

    fn sphere_raw(&self, x: &[FaceWeights]) -> Result<f64> {
        let prod: f64 = x.iter().map(|w| w.c).product();
        Ok(prod * pfaffian(&self.k_tilde(x, (0, 0))?).re)
    }

    /// Partition function on the sphere, `prod C * Pf K~` with the ordering
    /// sign fixed so that the reference field is positive.
    pub fn sphere_partition(&self, x: &[FaceWeights]) -> Result<f64> {
        if self.gt.surface != Surface::Sphere {
            return Err(Error::Surface("sphere partition function on a non-sphere".into()));
        }
        let eps = self.reference_sign(|y| self.sphere_raw(y))?;
        Ok(eps * self.sphere_raw(x)?)
    }

    /// The four Pfaffians of the sign-flipped matrices, in the order
    /// `(0,0), (0,1), (1,0), (1,1)`.
    pub fn torus_pfaffians(&self, x: &[FaceWeights]) -> Result<[f64; 4]> {
        let mut out = [0.0; 4];
        for (k, flips) in [(0, 0), (0, 1), (1, 0), (1, 1)].into_iter().enumerate() {
            out[k] = pfaffian(&self.k_tilde(x, flips)?).re;
        }
        Ok(out)
    }

    fn torus_raw(&self, x: &[FaceWeights], signs: &[f64; 4]) -> Result<f64> {
        let prod: f64 = x.iter().map(|w| w.c).product();
        let p = self.torus_pfaffians(x)?;
        Ok(0.5 * prod * signs.iter().zip(&p).map(|(s, v)| s * v).sum::<f64>())
    }

    /// Partition function on the torus from the four Pfaffians with the
    /// frozen sign pattern.
    pub fn torus_partition(&self, x: &[FaceWeights]) -> Result<f64> {
        self.torus_partition_with(x, &TORUS_SIGNS)
    }

    pub fn torus_partition_with(&self, x: &[FaceWeights], signs: &[f64; 4]) -> Result<f64> {
        if self.gt.surface != Surface::Torus {
            return Err(Error::Surface("torus partition function on a non-torus".into()));
        }
        let eps = self.reference_sign(|y| self.torus_raw(y, signs))?;
        Ok(eps * self.torus_raw(x, signs)?)
    }

    /// Leg endpoints of the given primal edges.
    pub fn leg_vertices(&self, edges: &[usize]) -> Result<Vec<usize>> {
        let mut out = Vec::with_capacity(2 * edges.len());
        for (k, &e) in edges.iter().enumerate() {
            if edges[..k].contains(&e) {
                return Err(Error::Argument(format!("edge {e} listed twice")));
            }
            let leg = self
                .gt
                .legs
                .get(e)
                .copied()
                .flatten()
                .ok_or_else(|| Error::Argument(format!("edge {e} carries no leg")))?;
            out.push(leg.black);
            out.push(leg.white);
        }
        Ok(out)
    }

    /// Probability that the dual edges of `edges` are all occupied, from the
    /// principal minor of the inverse matrix.
    pub fn edge_probability_sphere(&self, x: &[FaceWeights], edges: &[usize]) -> Result<f64> {
        if self.gt.surface != Surface::Sphere {
            return Err(Error::Surface("sphere edge probability on a non-sphere".into()));
        }
        check_regime(x)?;
        let idx = self.leg_vertices(edges)?;
        if idx.is_empty() {
            return Ok(1.0);
        }
        let kinv = inverse(&self.k_matrix(x)?)?;
        let d = det(&principal(&kinv, &idx));
        Ok(d.re.max(0.0).sqrt())
    }

    /// Torus edge probability from complementary minors of the four
    /// sign-flipped matrices.
    pub fn edge_probability_torus(&self, x: &[FaceWeights], edges: &[usize]) -> Result<f64> {
        if self.gt.surface != Surface::Torus {
            return Err(Error::Surface("torus edge probability on a non-torus".into()));
        }
        check_regime(x)?;
        let idx = self.leg_vertices(edges)?;
        if idx.is_empty() {
            return Ok(1.0);
        }
        let z = self.torus_partition(x)?;
        let eps = self.reference_sign(|y| self.torus_raw(y, &TORUS_SIGNS))?;
        let keep: Vec<usize> = (0..self.num_vertices()).filter(|v| !idx.contains(v)).collect();
        let mut comb = 0.0;
        for (s, flips) in TORUS_SIGNS.iter().zip([(0, 0), (0, 1), (1, 0), (1, 1)]) {
            let m = self.k_tilde(x, flips)?;
            // each removed leg contributes its signed entry in this flavor
            let legs: f64 = idx.chunks(2).map(|p| m[(p[0], p[1])].re).product();
            comb += s * legs * pfaffian(&principal(&m, &keep)).re;
        }
        let prod: f64 = x.iter().map(|w| w.c).product();
        Ok(eps * removal_sign(&idx) * prod * comb / (2.0 * z))
    }
}

/// Sign of the permutation moving the listed indices, in pairs, to the front
/// of the ordering while keeping the rest in order.
fn removal_sign(idx: &[usize]) -> f64 {
    let mut order: Vec<usize> = idx.to_vec();
    let max = idx.iter().copied().max().unwrap_or(0);
    order.extend((0..=max).filter(|v| !idx.contains(v)));
    let mut inversions = 0usize;
    for i in 0..order.len() {
        for j in i + 1..order.len() {
            if order[i] > order[j] {
                inversions += 1;
            }
        }
    }
    if inversions % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

fn check_regime(x: &[FaceWeights]) -> Result<()> {
    for (f, w) in x.iter().enumerate() {
        if w.a < 0.0 || w.b < 0.0 || w.c <= 0.0 || w.d < 0.0 {
            return Err(Error::Regime(format!("face {f} has a negative weight")));
        }
    }
    Ok(())
}

/// Unit diagonal `g` with `g_x m_xy conj(g_y)` real on every nonzero entry,
/// built along a breadth-first spanning forest and then verified.
pub fn propagate_gauge(m: &CMat) -> Result<Vec<Complex64>> {
    let n = m.nrows();
    let mut g: Vec<Option<Complex64>> = vec![None; n];
    for root in 0..n {
        if g[root].is_some() {
            continue;
        }
        g[root] = Some(c(1.0, 0.0));
        let mut queue = VecDeque::from([root]);
        while let Some(x) = queue.pop_front() {
            let gx = g[x].unwrap();
            for y in 0..n {
                let v = m[(x, y)];
                if v.norm() > GAUGE_TOL && g[y].is_none() {
                    // g_x v conj(g_y) real: g_y = g_x e^{i arg v}
                    g[y] = Some(gx * Complex64::from_polar(1.0, v.arg()));
                    queue.push_back(y);
                }
            }
        }
    }
    let g: Vec<Complex64> = g.into_iter().map(|v| v.unwrap()).collect();
    for x in 0..n {
        for y in 0..n {
            let v = g[x] * m[(x, y)] * g[y].conj();
            if v.im.abs() > 1e-9 * (1.0 + v.norm()) {
                return Err(Error::InvalidGraph(format!(
                    "leg phases admit no real gauge (entry {x},{y})"
                )));
            }
        }
    }
    Ok(g)
}

/// Inverses of `K_{a,b}` and `K_{a',b'}` from those of `K_{a,b'}` and `K_{a',b}`.
pub fn switch_inverses(t: &CMat, inv_ab2: &CMat, inv_a2b: &CMat) -> (CMat, CMat) {
    let id = identity(t.nrows());
    let plus = &id + t;
    let minus = &id - t;
    let first = (&plus * inv_ab2 + &minus * inv_a2b) * c(0.5, 0.0);
    let second = (&minus * inv_ab2 + &plus * inv_a2b) * c(0.5, 0.0);
    (first, second)
}

/// Switching of inverse matrices for the quadruple `(a, b), (a', b')` given
/// as the two angle fields, optionally at a twist.
pub fn inverse_switch(
    kast: &Kasteleyn,
    first: &[Angles],
    second: &[Angles],
    twist: Option<(Complex64, Complex64)>,
) -> Result<(CMat, CMat)> {
    let mixed = |p: &[Angles], r: &[Angles]| -> Vec<Angles> {
        p.iter().zip(r).map(|(u, v)| Angles::new(u.alpha, v.beta)).collect()
    };
    let ab2 = ff_weights(&mixed(first, second));
    let a2b = ff_weights(&mixed(second, first));
    let inv_ab2 = inverse(&kast.assemble(&ab2, Flavor::SkewHermitian, twist)?)?;
    let inv_a2b = inverse(&kast.assemble(&a2b, Flavor::SkewHermitian, twist)?)?;
    Ok(switch_inverses(&kast.t_matrix(twist), &inv_ab2, &inv_a2b))
}

/// `max |K M - I|`.
pub fn inverse_residual(k: &CMat, m: &CMat) -> f64 {
    max_abs(&(k * m - identity(k.nrows())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::pfaffian_real;
    use crate::quad_graph::{build_cube_sphere, build_square_torus, corner_angles};

    fn cube() -> Kasteleyn {
        let q = build_cube_sphere();
        Kasteleyn::new(&q, &corner_angles(&q).unwrap()).unwrap()
    }

    #[test]
    fn sizes() {
        assert_eq!(cube().num_vertices(), 24);
        let q = build_square_torus(2, 2).unwrap();
        let k = Kasteleyn::new(&q, &corner_angles(&q).unwrap()).unwrap();
        assert_eq!(k.num_vertices(), 16);
        assert_eq!(k.gt.legs.iter().flatten().count(), 8);
        assert!(k.gt.partner.iter().all(|p| p.is_some()));
    }

    #[test]
    fn small_pfaffians() {
        let a = CMat::from_row_slice(2, 2, &[c(0.0, 0.0), c(3.0, 0.0), c(-3.0, 0.0), c(0.0, 0.0)]);
        assert_eq!(pfaffian_real(&a), 3.0);
    }

    #[test]
    fn matrices_are_skew() {
        let k = cube();
        let x = ff_weights(&vec![Angles::new(0.3, 0.9); 6]);
        let h = k.k_matrix(&x).unwrap();
        assert!(max_abs(&(&h + h.adjoint())) < 1e-15);
        let s = k.k_tilde(&x, (0, 0)).unwrap();
        assert!(max_abs(&(&s + s.transpose())) < 1e-15);
        assert!(k.gauge_residual(&x, None).unwrap() < 1e-12);
    }

    #[test]
    fn t_and_d_are_involutions() {
        let k = cube();
        let t = k.t_matrix(None);
        let d = k.d_matrix();
        assert!(max_abs(&(&t * &t - identity(24))) < 1e-15);
        assert!(max_abs(&(&d * &d - identity(24))) < 1e-15);
    }

    #[test]
    fn empty_edge_set_has_probability_one() {
        let k = cube();
        let x = ff_weights(&vec![Angles::new(0.4, 0.9); 6]);
        assert_eq!(k.edge_probability_sphere(&x, &[]).unwrap(), 1.0);
    }
}
