//! Infinite rhombic lattices, their decorated graph and rhombus paths.
//!
//! Vertex `(x, y)` of the lattice sits at `x e^{i s1} + y e^{i s2}` and is
//! black iff `x + y` is even. Face `(x, y)` is the rhombus with lower-left
//! corner `(x, y)`; its cycle starts at its black corner, exactly as in
//! `build_rhombic_torus`, so that a 2 x 2 block of faces is a fundamental
//! domain matching the torus builder.

use super::ZInvWeights;
use crate::error::{Error, Result};
use crate::linalg::{c, I};
use crate::quad_graph::Point;
use num_complex::Complex64;
use std::f64::consts::PI;

/// Lattice point.
pub type Vertex = (i64, i64);

/// Decoration vertex of face `(x, y)` next to its local edge `i`; even `i`
/// is black.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Site {
    pub x: i64,
    pub y: i64,
    pub i: usize,
}

impl Site {
    pub const fn new(x: i64, y: i64, i: usize) -> Self {
        Site { x, y, i }
    }

    pub fn is_black(&self) -> bool {
        self.i % 2 == 0
    }

    pub fn translated(&self, dx: i64, dy: i64) -> Self {
        Site::new(self.x + dx, self.y + dy, self.i)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RhombicLattice {
    pub s1: f64,
    pub s2: f64,
}

/// Path along lattice edges from the midpoint of the edge of a black
/// decoration vertex to the midpoint of the edge of a white one. The first
/// and last steps are half edges.
#[derive(Clone, Debug, PartialEq)]
pub struct RhombusPath {
    /// Step directions, lifted to an interval of length at most pi.
    pub angles: Vec<f64>,
    /// First and last lattice vertices of the path.
    pub first: Vertex,
    pub last: Vertex,
    pub first_black: bool,
    pub last_black: bool,
    /// Center of the interval holding the directions.
    pub center: f64,
    pub width: f64,
    /// Euclidean distance between `first` and `last`.
    pub distance: f64,
}

const LIFT_TOL: f64 = 1e-9;

/// Lift angles into the shortest closed arc holding them all; returns the
/// lifted angles and the arc start, or `None` when the arc exceeds pi.
pub fn lift_angles(angles: &[f64]) -> Option<(Vec<f64>, f64)> {
    let tau = 2.0 * PI;
    let mut vals: Vec<f64> = angles.iter().map(|a| a.rem_euclid(tau)).collect();
    vals.sort_by(|a, b| a.total_cmp(b));
    vals.dedup_by(|a, b| (*a - *b).abs() < LIFT_TOL);
    if vals.len() == 1 {
        return Some((vec![vals[0]; angles.len()], vals[0]));
    }
    let n = vals.len();
    let (mut best, mut start) = (-1.0, 0.0);
    for j in 0..n {
        let next = if j + 1 < n { vals[j + 1] } else { vals[0] + tau };
        let gap = next - vals[j];
        if gap > best + LIFT_TOL {
            best = gap;
            start = next.rem_euclid(tau);
        }
    }
    if best < PI - LIFT_TOL {
        return None;
    }
    let lifted = angles
        .iter()
        .map(|a| {
            let r = (a - start).rem_euclid(tau);
            start + if r > tau - LIFT_TOL { 0.0 } else { r }
        })
        .collect();
    Some((lifted, start))
}

impl RhombusPath {
    /// Path given directly by its lifted step angles.
    pub fn from_angles(angles: Vec<f64>, first_black: bool, last_black: bool, distance: f64) -> Result<Self> {
        if angles.len() < 2 {
            return Err(Error::Argument("a path needs two half steps".into()));
        }
        let lo = angles.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = angles.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        if hi - lo > PI + LIFT_TOL {
            return Err(Error::Argument("path directions span more than pi".into()));
        }
        Ok(RhombusPath {
            angles,
            first: (0, 0),
            last: (0, 0),
            first_black,
            last_black,
            center: 0.5 * (lo + hi),
            width: hi - lo,
            distance,
        })
    }

    pub fn len(&self) -> usize {
        self.angles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.angles.is_empty()
    }

    /// Directions of the full steps between `first` and `last`.
    pub fn interior(&self) -> &[f64] {
        &self.angles[1..self.angles.len() - 1]
    }

    pub fn alpha_first(&self) -> f64 {
        self.angles[0]
    }

    pub fn alpha_last(&self) -> f64 {
        *self.angles.last().unwrap()
    }

    /// Whether the two endpoints have the same color.
    pub fn same_color(&self) -> bool {
        self.first_black == self.last_black
    }
}

impl RhombicLattice {
    pub fn new(s1: f64, s2: f64) -> Result<Self> {
        let d = s2 - s1;
        if !(d > 0.0 && d < PI) {
            return Err(Error::Argument("directions must satisfy 0 < s2 - s1 < pi".into()));
        }
        Ok(RhombicLattice { s1, s2 })
    }

    pub fn square() -> Self {
        RhombicLattice { s1: 0.0, s2: PI / 2.0 }
    }

    pub fn point(&self, v: Vertex) -> Point {
        let (x, y) = (v.0 as f64, v.1 as f64);
        [x * self.s1.cos() + y * self.s2.cos(), x * self.s1.sin() + y * self.s2.sin()]
    }

    pub fn is_black(v: Vertex) -> bool {
        (v.0 + v.1).rem_euclid(2) == 0
    }

    fn rotation(x: i64, y: i64) -> usize {
        (x + y).rem_euclid(2) as usize
    }

    /// Counterclockwise cycle of face `(x, y)` starting at its black corner.
    pub fn face_cycle(x: i64, y: i64) -> [Vertex; 4] {
        let corners = [(x, y), (x + 1, y), (x + 1, y + 1), (x, y + 1)];
        let k = Self::rotation(x, y);
        [corners[k], corners[(k + 1) % 4], corners[(k + 2) % 4], corners[(k + 3) % 4]]
    }

    /// Rhombus half-angle at the black corners of face `(x, y)`.
    pub fn theta(&self, x: i64, y: i64) -> f64 {
        let d = self.s2 - self.s1;
        if Self::rotation(x, y) == 0 {
            d / 2.0
        } else {
            (PI - d) / 2.0
        }
    }

    pub fn site_theta(&self, s: Site) -> f64 {
        self.theta(s.x, s.y)
    }

    /// Lattice edge next to a decoration vertex, as `(cycle[i], cycle[i + 1])`.
    pub fn edge(s: Site) -> (Vertex, Vertex) {
        let cyc = Self::face_cycle(s.x, s.y);
        (cyc[s.i], cyc[(s.i + 1) % 4])
    }

    /// Other endpoint of the leg at `s`.
    pub fn partner(s: Site) -> Site {
        let (p, q) = Self::edge(s);
        let faces = if p.1 == q.1 {
            let x = p.0.min(q.0);
            [(x, p.1), (x, p.1 - 1)]
        } else {
            let y = p.1.min(q.1);
            [(p.0, y), (p.0 - 1, y)]
        };
        let (fx, fy) = if faces[0] == (s.x, s.y) { faces[1] } else { faces[0] };
        let cyc = Self::face_cycle(fx, fy);
        let j = (0..4)
            .find(|&j| {
                let (a, b) = (cyc[j], cyc[(j + 1) % 4]);
                (a == p && b == q) || (a == q && b == p)
            })
            .expect("adjacent face shares the edge");
        Site::new(fx, fy, j)
    }

    /// Decoration vertex of the given color next to the lattice edge `(p, q)`.
    pub fn site_of_edge(p: Vertex, q: Vertex, black: bool) -> Result<Site> {
        let faces = match (q.0 - p.0, q.1 - p.1) {
            (1 | -1, 0) => {
                let x = p.0.min(q.0);
                [(x, p.1), (x, p.1 - 1)]
            }
            (0, 1 | -1) => {
                let y = p.1.min(q.1);
                [(p.0, y), (p.0 - 1, y)]
            }
            _ => return Err(Error::Argument(format!("{p:?} and {q:?} are not adjacent"))),
        };
        for (fx, fy) in faces {
            let cyc = Self::face_cycle(fx, fy);
            for i in 0..4 {
                let (a, b) = (cyc[i], cyc[(i + 1) % 4]);
                if ((a == p && b == q) || (a == q && b == p)) && (i % 2 == 0) == black {
                    return Ok(Site::new(fx, fy, i));
                }
            }
        }
        unreachable!("each edge has one decoration vertex of each color")
    }

    /// Leg angle: the half-angle of the face holding the black end of the leg.
    pub fn leg_phase(&self, s: Site) -> f64 {
        let b = if s.is_black() { s } else { Self::partner(s) };
        self.site_theta(b)
    }

    /// Direction angle of a unit lattice step.
    fn direction(&self, d: (i64, i64)) -> f64 {
        match d {
            (1, 0) => self.s1,
            (-1, 0) => self.s1 + PI,
            (0, 1) => self.s2,
            (0, -1) => self.s2 + PI,
            _ => unreachable!("not a unit step"),
        }
    }

    fn distance(&self, a: Vertex, b: Vertex) -> f64 {
        let (p, q) = (self.point(a), self.point(b));
        (p[0] - q[0]).hypot(p[1] - q[1])
    }

    /// Path from the edge of the black decoration vertex `b` to the edge of
    /// the white decoration vertex `w`, with directions in an arc of length
    /// at most pi. Among admissible endpoint choices the shortest is kept,
    /// ties going to the first in the order (first endpoint of `b`'s edge
    /// before second, likewise for `w`).
    pub fn path(&self, b: Site, w: Site) -> Result<RhombusPath> {
        if !b.is_black() || w.is_black() {
            return Err(Error::Argument("path runs from a black to a white decoration vertex".into()));
        }
        let (p0, p1) = Self::edge(b);
        let (q0, q1) = Self::edge(w);
        let mid_b = (p0.0 + p1.0, p0.1 + p1.1);
        let mid_w = (q0.0 + q1.0, q0.1 + q1.1);
        if mid_b == mid_w {
            // same edge: half step to the black endpoint and back, lifted counterclockwise
            let pb = if Self::is_black(p0) { p0 } else { p1 };
            let a1 = self.direction((2 * pb.0 - mid_b.0, 2 * pb.1 - mid_b.1));
            return Ok(RhombusPath {
                angles: vec![a1, a1 + PI],
                first: pb,
                last: pb,
                first_black: true,
                last_black: true,
                center: a1 + PI / 2.0,
                width: PI,
                distance: 0.0,
            });
        }
        let mut best: Option<(i64, RhombusPath)> = None;
        for a1 in [p0, p1] {
            for an in [q0, q1] {
                let (dx, dy) = (an.0 - a1.0, an.1 - a1.1);
                let mut steps = vec![(2 * a1.0 - mid_b.0, 2 * a1.1 - mid_b.1)];
                steps.extend(std::iter::repeat((dx.signum(), 0)).take(dx.unsigned_abs() as usize));
                steps.extend(std::iter::repeat((0, dy.signum())).take(dy.unsigned_abs() as usize));
                steps.push((mid_w.0 - 2 * an.0, mid_w.1 - 2 * an.1));
                let raw: Vec<f64> = steps.iter().map(|&d| self.direction(d)).collect();
                let Some((angles, start)) = lift_angles(&raw) else { continue };
                let hi = angles.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                let len = dx.abs() + dy.abs();
                if best.as_ref().is_some_and(|(l, _)| *l <= len) {
                    continue;
                }
                best = Some((
                    len,
                    RhombusPath {
                        angles,
                        first: a1,
                        last: an,
                        first_black: Self::is_black(a1),
                        last_black: Self::is_black(an),
                        center: 0.5 * (start + hi),
                        width: hi - start,
                        distance: self.distance(a1, an),
                    },
                ));
            }
        }
        best.map(|(_, p)| p)
            .ok_or_else(|| Error::Argument(format!("no admissible path from {b:?} to {w:?}")))
    }

    /// Nonzero entries `K[s, t]` of the skew-Hermitian Kasteleyn operator of
    /// the elliptic weights, in the same conventions as the finite matrices.
    pub fn k_row(&self, s: Site, z: &ZInvWeights) -> Result<Vec<(Site, Complex64)>> {
        let w = z.face(self.site_theta(s))?;
        let (a, b, d) = (w.a / w.c, w.b / w.c, w.d / w.c);
        let at = |i: usize| Site::new(s.x, s.y, i);
        let mut out = Vec::with_capacity(4);
        for (p, q) in [(0, 1), (2, 3), (1, 3), (0, 2)] {
            let v = if (p, q) == (1, 3) || (p, q) == (0, 2) { I * d } else { I * a };
            if s.i == p {
                out.push((at(q), v));
            } else if s.i == q {
                out.push((at(p), v));
            }
        }
        for (p, q) in [(3, 0), (1, 2)] {
            if s.i == p {
                out.push((at(q), c(b, 0.0)));
            } else if s.i == q {
                out.push((at(p), c(-b, 0.0)));
            }
        }
        let ph = Complex64::from_polar(1.0, self.leg_phase(s));
        let leg = if s.is_black() { ph.conj() } else { -ph };
        out.push((Self::partner(s), leg));
        Ok(out)
    }

    /// Nonzero entries `Kcal[w, b]` of the six-vertex operator with modulus
    /// parameter `k2`, for a white decoration vertex `w`.
    pub fn k6_row(&self, w: Site, k2: f64) -> Result<Vec<(Site, Complex64)>> {
        if w.is_black() {
            return Err(Error::Argument("six-vertex rows are indexed by white vertices".into()));
        }
        let z = ZInvWeights::new(k2, k2)?;
        Ok(self
            .k_row(w, &z)?
            .into_iter()
            .filter(|(t, _)| t.is_black())
            .map(|(t, v)| (t, (-I * v).conj()))
            .collect())
    }
}
