//! Quadrangulations of the sphere, the torus and planar lozenge patches.
//!
//! Faces are stored as counterclockwise cycles `[b, w, b2, w2]` starting at a
//! black vertex. Local edge `i` of a face joins `cycle[i]` and `cycle[i + 1]`.
//! Every weight and matrix convention in the crate is expressed relative to
//! this order.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashMap, VecDeque};
use std::f64::consts::PI;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Color {
    Black,
    White,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Surface {
    Sphere,
    Torus,
    Patch,
}

pub type Point = [f64; 2];

#[derive(Clone, Debug)]
pub struct Face {
    /// Counterclockwise boundary `[b, w, b2, w2]`.
    pub cycle: [usize; 4],
    /// `edges[i]` joins `cycle[i]` and `cycle[(i + 1) % 4]`.
    pub edges: [usize; 4],
    /// Corner positions in a lift of the face to the plane.
    pub pos: Option<[Point; 4]>,
}

#[derive(Clone, Debug)]
pub struct Edge {
    pub black: usize,
    pub white: usize,
    /// Face and local index where the edge is traversed black to white (index 0 or 2).
    pub black_side: Option<(usize, usize)>,
    /// Face and local index where the edge is traversed white to black (index 1 or 3).
    pub white_side: Option<(usize, usize)>,
    /// Torus only: lattice cell of the black-side face lift adjacent to the
    /// white-side face lift.
    pub shift: (i32, i32),
}

impl Edge {
    pub fn is_interior(&self) -> bool {
        self.black_side.is_some() && self.white_side.is_some()
    }
}

#[derive(Clone, Debug)]
pub struct Quadrangulation {
    pub surface: Surface,
    pub colors: Vec<Color>,
    pub edges: Vec<Edge>,
    pub faces: Vec<Face>,
    /// Torus period vectors.
    pub periods: Option<[Point; 2]>,
    /// Torus homology cycles as sequences of faces whose black diagonals chain up.
    pub gamma_x: Vec<usize>,
    pub gamma_y: Vec<usize>,
    /// Rhombus half-angle at the black corners, for lozenge embeddings.
    pub theta: Option<Vec<f64>>,
}

/// Serializable interchange format shared by the CLI and the tests.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct GraphSpec {
    pub surface: Option<Surface>,
    pub vertices: Vec<VertexSpec>,
    pub edges: Vec<[usize; 2]>,
    pub faces: Vec<FaceSpec>,
    #[serde(default)]
    pub gamma_x: Vec<usize>,
    #[serde(default)]
    pub gamma_y: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub periods: Option<[Point; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub embedding: Option<EmbeddingSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<BTreeMap<String, [f64; 4]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub angles: Option<BTreeMap<String, [f64; 2]>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VertexSpec {
    pub id: usize,
    pub color: Color,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FaceSpec {
    pub cycle: [usize; 4],
    /// Optional explicit edge indices, needed when the graph has multiple edges.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub edges: Option<[usize; 4]>,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct EmbeddingSpec {
    #[serde(default)]
    pub theta: BTreeMap<String, f64>,
    #[serde(default)]
    pub positions: BTreeMap<String, Point>,
    /// Per-face lifted corner positions (torus embeddings).
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub face_positions: BTreeMap<String, [Point; 4]>,
}

fn sub(a: Point, b: Point) -> Point {
    [a[0] - b[0], a[1] - b[1]]
}

fn angle_of(v: Point) -> f64 {
    v[1].atan2(v[0])
}

fn pos_key(p: Point) -> (i64, i64) {
    ((p[0] * 1e6).round() as i64, (p[1] * 1e6).round() as i64)
}

/// Solve `d = m * p1 + n * p2` for integers `(m, n)`.
fn lattice_coords(d: Point, periods: &[Point; 2]) -> Option<(i32, i32)> {
    let [p1, p2] = *periods;
    let det = p1[0] * p2[1] - p1[1] * p2[0];
    let m = (d[0] * p2[1] - d[1] * p2[0]) / det;
    let n = (p1[0] * d[1] - p1[1] * d[0]) / det;
    let (mr, nr) = (m.round(), n.round());
    if (m - mr).abs() < 1e-6 && (n - nr).abs() < 1e-6 {
        Some((mr as i32, nr as i32))
    } else {
        None
    }
}

impl Quadrangulation {
    /// Assemble a quadrangulation from face cycles. Edges are identified by
    /// their endpoints, and on the torus additionally by their lifted
    /// displacement so that multiple edges are kept apart.
    pub fn from_faces(
        surface: Surface,
        colors: Vec<Color>,
        cycles: Vec<[usize; 4]>,
        pos: Option<Vec<[Point; 4]>>,
        periods: Option<[Point; 2]>,
    ) -> Result<Self> {
        if surface == Surface::Torus && (pos.is_none() || periods.is_none()) {
            return Err(Error::InvalidGraph(
                "torus construction needs lifted face positions and periods".into(),
            ));
        }
        let mut index: HashMap<(usize, usize, (i64, i64)), usize> = HashMap::new();
        let mut edges: Vec<Edge> = Vec::new();
        let mut faces = Vec::with_capacity(cycles.len());
        for (f, cyc) in cycles.iter().enumerate() {
            let mut fe = [0usize; 4];
            for i in 0..4 {
                let (a, b) = (cyc[i], cyc[(i + 1) % 4]);
                let (bl, wh) = if i % 2 == 0 { (a, b) } else { (b, a) };
                let disp = match (&pos, surface) {
                    (Some(p), Surface::Torus) => {
                        let (pb, pw) = if i % 2 == 0 {
                            (p[f][i], p[f][(i + 1) % 4])
                        } else {
                            (p[f][(i + 1) % 4], p[f][i])
                        };
                        pos_key(sub(pw, pb))
                    }
                    _ => (0, 0),
                };
                let key = (bl, wh, disp);
                let e = *index.entry(key).or_insert_with(|| {
                    edges.push(Edge {
                        black: bl,
                        white: wh,
                        black_side: None,
                        white_side: None,
                        shift: (0, 0),
                    });
                    edges.len() - 1
                });
                let slot = if i % 2 == 0 {
                    &mut edges[e].black_side
                } else {
                    &mut edges[e].white_side
                };
                if slot.is_some() {
                    return Err(Error::InvalidGraph(format!(
                        "edge ({bl},{wh}) traversed twice in the same direction"
                    )));
                }
                *slot = Some((f, i));
                fe[i] = e;
            }
            faces.push(Face {
                cycle: *cyc,
                edges: fe,
                pos: pos.as_ref().map(|p| p[f]),
            });
        }
        let mut q = Quadrangulation {
            surface,
            colors,
            edges,
            faces,
            periods,
            gamma_x: Vec::new(),
            gamma_y: Vec::new(),
            theta: None,
        };
        q.compute_shifts()?;
        Ok(q)
    }

    fn compute_shifts(&mut self) -> Result<()> {
        let Some(periods) = self.periods else {
            return Ok(());
        };
        for e in 0..self.edges.len() {
            let edge = &self.edges[e];
            let (Some((fb, i)), Some((fw, j))) = (edge.black_side, edge.white_side) else {
                continue;
            };
            let pb = self.faces[fb].pos.unwrap()[i];
            let pw = self.faces[fw].pos.unwrap()[(j + 1) % 4];
            let shift = lattice_coords(sub(pw, pb), &periods).ok_or_else(|| {
                Error::InvalidGraph(format!("edge {e}: face lifts are not related by a period"))
            })?;
            self.edges[e].shift = shift;
        }
        Ok(())
    }

    pub fn num_vertices(&self) -> usize {
        self.colors.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn num_faces(&self) -> usize {
        self.faces.len()
    }

    pub fn blacks(&self) -> Vec<usize> {
        (0..self.colors.len()).filter(|&v| self.colors[v] == Color::Black).collect()
    }

    pub fn whites(&self) -> Vec<usize> {
        (0..self.colors.len()).filter(|&v| self.colors[v] == Color::White).collect()
    }

    /// Edges of the black diagonal graph, one per face.
    pub fn black_graph(&self) -> Vec<(usize, usize)> {
        self.faces.iter().map(|f| (f.cycle[0], f.cycle[2])).collect()
    }

    /// Edges of the white diagonal graph, one per face.
    pub fn white_graph(&self) -> Vec<(usize, usize)> {
        self.faces.iter().map(|f| (f.cycle[1], f.cycle[3])).collect()
    }

    /// Dual edges: for each primal edge, the pair of faces it separates.
    pub fn dual_edges(&self) -> Vec<Option<(usize, usize)>> {
        self.edges
            .iter()
            .map(|e| match (e.black_side, e.white_side) {
                (Some((f, _)), Some((g, _))) => Some((f, g)),
                _ => None,
            })
            .collect()
    }

    /// Faces incident to each vertex.
    pub fn vertex_faces(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.num_vertices()];
        for (f, face) in self.faces.iter().enumerate() {
            for &v in &face.cycle {
                out[v].push(f);
            }
        }
        out
    }

    /// Euler characteristic V - E + F.
    pub fn euler(&self) -> i64 {
        self.num_vertices() as i64 - self.num_edges() as i64 + self.num_faces() as i64
    }

    pub fn to_spec(&self) -> GraphSpec {
        let mut emb = EmbeddingSpec::default();
        if let Some(th) = &self.theta {
            for (f, t) in th.iter().enumerate() {
                emb.theta.insert(f.to_string(), *t);
            }
        }
        for (f, face) in self.faces.iter().enumerate() {
            if let Some(p) = face.pos {
                if self.surface == Surface::Torus {
                    emb.face_positions.insert(f.to_string(), p);
                } else {
                    for i in 0..4 {
                        emb.positions.insert(face.cycle[i].to_string(), p[i]);
                    }
                }
            }
        }
        let multi = self.has_multi_edges();
        GraphSpec {
            surface: Some(self.surface),
            vertices: self
                .colors
                .iter()
                .enumerate()
                .map(|(id, &color)| VertexSpec { id, color })
                .collect(),
            edges: self.edges.iter().map(|e| [e.black, e.white]).collect(),
            faces: self
                .faces
                .iter()
                .map(|f| FaceSpec {
                    cycle: f.cycle,
                    edges: if multi { Some(f.edges) } else { None },
                })
                .collect(),
            gamma_x: self.gamma_x.clone(),
            gamma_y: self.gamma_y.clone(),
            periods: self.periods,
            embedding: Some(emb),
            weights: None,
            angles: None,
        }
    }

    pub fn has_multi_edges(&self) -> bool {
        let mut seen = std::collections::HashSet::new();
        self.edges.iter().any(|e| !seen.insert((e.black, e.white)))
    }

    /// Build from the interchange format, rejecting invalid input.
    pub fn from_spec(spec: &GraphSpec) -> Result<Self> {
        let report = validate_spec(spec);
        if !report.is_empty() {
            return Err(Error::InvalidGraph(report.join("; ")));
        }
        let surface = spec.surface.unwrap_or(Surface::Sphere);
        let colors: Vec<Color> = spec.vertices.iter().map(|v| v.color).collect();
        let cycles: Vec<[usize; 4]> = spec.faces.iter().map(|f| f.cycle).collect();
        let emb = spec.embedding.clone().unwrap_or_default();
        let pos: Option<Vec<[Point; 4]>> = if !emb.face_positions.is_empty() {
            (0..cycles.len())
                .map(|f| emb.face_positions.get(&f.to_string()).copied())
                .collect()
        } else if !emb.positions.is_empty() {
            cycles
                .iter()
                .map(|c| {
                    let mut out = [[0.0; 2]; 4];
                    for i in 0..4 {
                        out[i] = *emb.positions.get(&c[i].to_string())?;
                    }
                    Some(out)
                })
                .collect()
        } else {
            None
        };
        let mut q = if surface == Surface::Torus && pos.is_none() {
            Self::from_explicit_edges(spec, surface, colors, cycles)?
        } else {
            Self::from_faces(surface, colors, cycles, pos, spec.periods)?
        };
        q.gamma_x = spec.gamma_x.clone();
        q.gamma_y = spec.gamma_y.clone();
        if !emb.theta.is_empty() {
            let th: Option<Vec<f64>> = (0..q.num_faces())
                .map(|f| emb.theta.get(&f.to_string()).copied())
                .collect();
            q.theta = th;
        }
        let report = q.validate();
        if !report.is_empty() {
            return Err(Error::InvalidGraph(report.join("; ")));
        }
        Ok(q)
    }

    fn from_explicit_edges(
        spec: &GraphSpec,
        surface: Surface,
        colors: Vec<Color>,
        cycles: Vec<[usize; 4]>,
    ) -> Result<Self> {
        let mut edges: Vec<Edge> = spec
            .edges
            .iter()
            .map(|&[b, w]| Edge {
                black: b,
                white: w,
                black_side: None,
                white_side: None,
                shift: (0, 0),
            })
            .collect();
        let mut faces = Vec::new();
        for (f, fs) in spec.faces.iter().enumerate() {
            let fe = fs.edges.ok_or_else(|| {
                Error::InvalidGraph("torus without positions needs explicit face edges".into())
            })?;
            for i in 0..4 {
                let slot = if i % 2 == 0 {
                    &mut edges[fe[i]].black_side
                } else {
                    &mut edges[fe[i]].white_side
                };
                *slot = Some((f, i));
            }
            faces.push(Face {
                cycle: cycles[f],
                edges: fe,
                pos: None,
            });
        }
        Ok(Quadrangulation {
            surface,
            colors,
            edges,
            faces,
            periods: spec.periods,
            gamma_x: Vec::new(),
            gamma_y: Vec::new(),
            theta: None,
        })
    }

    /// List of violated invariants; empty iff the graph is valid.
    pub fn validate(&self) -> Vec<String> {
        let mut out = Vec::new();
        for (e, edge) in self.edges.iter().enumerate() {
            if self.colors.get(edge.black) != Some(&Color::Black)
                || self.colors.get(edge.white) != Some(&Color::White)
            {
                out.push(format!("edge {e} is not black-white"));
            }
            let sides = edge.black_side.is_some() as usize + edge.white_side.is_some() as usize;
            match self.surface {
                Surface::Patch if sides == 0 => out.push(format!("edge {e} bounds no face")),
                Surface::Sphere | Surface::Torus if sides != 2 => {
                    out.push(format!("edge {e} borders {sides} faces instead of 2"))
                }
                _ => {}
            }
        }
        for (f, face) in self.faces.iter().enumerate() {
            for i in 0..4 {
                let want = if i % 2 == 0 { Color::Black } else { Color::White };
                if self.colors.get(face.cycle[i]) != Some(&want) {
                    out.push(format!("face {f} does not alternate colors"));
                    break;
                }
            }
        }
        if !self.is_connected() {
            out.push("graph is not connected".into());
        }
        match self.surface {
            Surface::Sphere => {
                if self.euler() != 2 {
                    out.push(format!("Euler characteristic {} != 2", self.euler()));
                }
                if 4 * self.num_faces() != 2 * self.num_edges() {
                    out.push("4|F| != 2|E|".into());
                }
                if self.has_multi_edges() {
                    out.push("multiple edges on a sphere".into());
                }
            }
            Surface::Torus => {
                if self.euler() != 0 {
                    out.push(format!("Euler characteristic {} != 0", self.euler()));
                }
                for (name, cyc, which) in [("gamma_x", &self.gamma_x, 0), ("gamma_y", &self.gamma_y, 1)]
                {
                    if let Err(msg) = self.check_cycle(cyc, which) {
                        out.push(format!("{name}: {msg}"));
                    }
                }
            }
            Surface::Patch => {}
        }
        out
    }

    fn is_connected(&self) -> bool {
        let n = self.num_vertices();
        if n == 0 {
            return true;
        }
        let mut adj = vec![Vec::new(); n];
        for e in &self.edges {
            if e.black < n && e.white < n {
                adj[e.black].push(e.white);
                adj[e.white].push(e.black);
            }
        }
        let mut seen = vec![false; n];
        let mut queue = VecDeque::from([0]);
        seen[0] = true;
        while let Some(v) = queue.pop_front() {
            for &u in &adj[v] {
                if !seen[u] {
                    seen[u] = true;
                    queue.push_back(u);
                }
            }
        }
        seen.iter().all(|&s| s)
    }

    /// A homology cycle is a closed chain of face diagonals of the black graph,
    /// visiting each black vertex once, whose lifted displacement is the
    /// corresponding period.
    fn check_cycle(&self, faces: &[usize], which: usize) -> std::result::Result<(), String> {
        if faces.is_empty() {
            return Err("empty cycle".into());
        }
        let mut cur = None;
        let mut start = None;
        let mut visited = Vec::new();
        let mut disp = [0.0, 0.0];
        for (k, &f) in faces.iter().enumerate() {
            let face = self.faces.get(f).ok_or("face index out of range")?;
            let (a, b) = (face.cycle[0], face.cycle[2]);
            let (from, to, sign) = match cur {
                None => {
                    // orient the first diagonal so that it chains into the next one
                    let next = faces.get(1).and_then(|&g| self.faces.get(g));
                    let forward = match next {
                        Some(nf) => nf.cycle[0] == b || nf.cycle[2] == b,
                        None => true,
                    };
                    if forward {
                        (a, b, 1.0)
                    } else {
                        (b, a, -1.0)
                    }
                }
                Some(c) if c == a => (a, b, 1.0),
                Some(c) if c == b => (b, a, -1.0),
                _ => return Err(format!("step {k} does not continue the path")),
            };
            if k == 0 {
                start = Some(from);
            }
            if visited.contains(&from) {
                return Err("cycle is not simple".into());
            }
            visited.push(from);
            if let Some(p) = face.pos {
                let d = sub(p[2], p[0]);
                disp[0] += sign * d[0];
                disp[1] += sign * d[1];
            }
            cur = Some(to);
        }
        if cur != start {
            return Err("path does not close".into());
        }
        if let Some(periods) = self.periods {
            if self.faces.iter().all(|f| f.pos.is_some()) {
                let target = periods[which];
                let (m, n) = lattice_coords(disp, &periods).ok_or("displacement off-lattice")?;
                let want = if which == 0 { (1, 0) } else { (0, 1) };
                let neg = if which == 0 { (-1, 0) } else { (0, -1) };
                if (m, n) != want && (m, n) != neg {
                    return Err(format!(
                        "winds ({m},{n}) instead of once along {:?}",
                        target
                    ));
                }
            }
        }
        Ok(())
    }
}

/// Structural checks on raw interchange data, before any assembly.
pub fn validate_spec(spec: &GraphSpec) -> Vec<String> {
    let mut out = Vec::new();
    let n = spec.vertices.len();
    for (i, v) in spec.vertices.iter().enumerate() {
        if v.id != i {
            out.push(format!("vertex ids must be 0..{n} in order"));
            break;
        }
    }
    let color = |v: usize| spec.vertices.get(v).map(|x| x.color);
    let mut edge_set = std::collections::HashSet::new();
    for &[b, w] in &spec.edges {
        if color(b) != Some(Color::Black) || color(w) != Some(Color::White) {
            out.push(format!("edge ({b},{w}) is not black-white"));
        }
        edge_set.insert((b, w));
    }
    for (f, face) in spec.faces.iter().enumerate() {
        let c = face.cycle;
        for i in 0..4 {
            let want = if i % 2 == 0 { Color::Black } else { Color::White };
            if color(c[i]) != Some(want) {
                out.push(format!("face {f} does not alternate colors"));
                break;
            }
        }
        let missing = (0..4)
            .filter(|&i| {
                let (a, b) = (c[i], c[(i + 1) % 4]);
                let (bl, wh) = if i % 2 == 0 { (a, b) } else { (b, a) };
                !edge_set.contains(&(bl, wh))
            })
            .count();
        if missing > 0 {
            out.push(format!(
                "face {f} has degree {} instead of 4",
                4 - missing
            ));
        }
    }
    out
}

/// The cube as a spherical quadrangulation, built from its black diagonal
/// graph: the tetrahedron drawn as a center joined to a triangle.
pub fn build_cube_sphere() -> Quadrangulation {
    let mut pos = vec![[0.0, 0.0]];
    for j in 0..3 {
        let t = PI / 2.0 + 2.0 * PI * j as f64 / 3.0;
        pos.push([t.cos(), t.sin()]);
    }
    build_from_black_graph(&pos, &[(0, 1), (0, 2), (0, 3), (1, 2), (2, 3), (3, 1)])
        .expect("cube construction")
}

/// Spherical quadrangulation whose black diagonal graph is the given straight-line
/// planar graph. White vertices are the faces of that graph (the outer face
/// included); each black edge becomes one quadrilateral face.
pub fn build_from_black_graph(pos: &[Point], edges: &[(usize, usize)]) -> Result<Quadrangulation> {
    let n = pos.len();
    let mut nbrs = vec![Vec::new(); n];
    for &(i, j) in edges {
        nbrs[i].push(j);
        nbrs[j].push(i);
    }
    for (i, l) in nbrs.iter_mut().enumerate() {
        l.sort_by(|&a, &b| {
            angle_of(sub(pos[a], pos[i]))
                .partial_cmp(&angle_of(sub(pos[b], pos[i])))
                .unwrap()
        });
    }
    // faces of the black graph: the face left of u->v continues with the
    // neighbour of v that precedes u in counterclockwise order
    let mut left_face: HashMap<(usize, usize), usize> = HashMap::new();
    let mut face_cycles: Vec<Vec<usize>> = Vec::new();
    for &(i, j) in edges {
        for (u, v) in [(i, j), (j, i)] {
            if left_face.contains_key(&(u, v)) {
                continue;
            }
            let id = face_cycles.len();
            let mut cyc = Vec::new();
            let (mut a, mut b) = (u, v);
            while !left_face.contains_key(&(a, b)) {
                left_face.insert((a, b), id);
                cyc.push(a);
                let l = &nbrs[b];
                let k = l.iter().position(|&x| x == a).unwrap();
                let c = l[(k + l.len() - 1) % l.len()];
                a = b;
                b = c;
            }
            face_cycles.push(cyc);
        }
    }
    let nw = face_cycles.len();
    let wpos: Vec<Point> = face_cycles
        .iter()
        .map(|cyc| {
            let m = cyc.len() as f64;
            let cx = cyc.iter().map(|&v| pos[v][0]).sum::<f64>() / m;
            let cy = cyc.iter().map(|&v| pos[v][1]).sum::<f64>() / m;
            let area: f64 = (0..cyc.len())
                .map(|k| {
                    let (p, q) = (pos[cyc[k]], pos[cyc[(k + 1) % cyc.len()]]);
                    p[0] * q[1] - q[0] * p[1]
                })
                .sum();
            if area > 0.0 {
                [cx, cy]
            } else {
                // outer face: place its white vertex far away
                [-10.0 * cx + 100.0, -10.0 * cy + 37.0]
            }
        })
        .collect();
    let mut colors = vec![Color::Black; n];
    colors.extend(std::iter::repeat(Color::White).take(nw));
    let mut cycles = Vec::new();
    let mut fpos = Vec::new();
    for &(i, j) in edges {
        let wl = left_face[&(i, j)];
        let wr = left_face[&(j, i)];
        cycles.push([i, n + wr, j, n + wl]);
        fpos.push([pos[i], wpos[wr], pos[j], wpos[wl]]);
    }
    Quadrangulation::from_faces(Surface::Sphere, colors, cycles, Some(fpos), None)
}

/// Square lattice quotiented to an m x n torus.
pub fn build_square_torus(m: usize, n: usize) -> Result<Quadrangulation> {
    build_rhombic_torus(m, n, 0.0, PI / 2.0)
}

/// Rhombic lattice with unit edges along directions `s1` and `s2`
/// (0 < s2 - s1 < pi), quotiented to an m x n torus. Vertex (x, y) is black
/// iff x + y is even, so m and n must be even.
pub fn build_rhombic_torus(m: usize, n: usize, s1: f64, s2: f64) -> Result<Quadrangulation> {
    if m == 0 || n == 0 || m % 2 == 1 || n % 2 == 1 {
        return Err(Error::InvalidGraph(format!(
            "{m}x{n} torus quotient is not bipartite; both sides must be even"
        )));
    }
    let delta = s2 - s1;
    if !(delta > 0.0 && delta < PI) {
        return Err(Error::InvalidGraph("directions must satisfy 0 < s2 - s1 < pi".into()));
    }
    let u = [s1.cos(), s1.sin()];
    let v = [s2.cos(), s2.sin()];
    let at = |x: i64, y: i64| [x as f64 * u[0] + y as f64 * v[0], x as f64 * u[1] + y as f64 * v[1]];
    let vid = |x: i64, y: i64| (x.rem_euclid(m as i64) + m as i64 * y.rem_euclid(n as i64)) as usize;
    let mut colors = vec![Color::Black; m * n];
    for y in 0..n {
        for x in 0..m {
            if (x + y) % 2 == 1 {
                colors[x + m * y] = Color::White;
            }
        }
    }
    let mut cycles = Vec::new();
    let mut fpos = Vec::new();
    let mut theta = Vec::new();
    for y in 0..n as i64 {
        for x in 0..m as i64 {
            let corners = [(x, y), (x + 1, y), (x + 1, y + 1), (x, y + 1)];
            let k = if (x + y) % 2 == 0 { 0 } else { 1 };
            let mut cyc = [0; 4];
            let mut p = [[0.0; 2]; 4];
            for i in 0..4 {
                let (cx, cy) = corners[(i + k) % 4];
                cyc[i] = vid(cx, cy);
                p[i] = at(cx, cy);
            }
            cycles.push(cyc);
            fpos.push(p);
            theta.push(if k == 0 { delta / 2.0 } else { (PI - delta) / 2.0 });
        }
    }
    let periods = [
        [m as f64 * u[0], m as f64 * u[1]],
        [n as f64 * v[0], n as f64 * v[1]],
    ];
    let mut q = Quadrangulation::from_faces(Surface::Torus, colors, cycles, Some(fpos), Some(periods))?;
    q.theta = Some(theta);
    // gamma_x zigzags along the bottom two rows, gamma_y along the left two columns
    let face = |x: usize, y: usize| x + m * y;
    q.gamma_x = (0..m).map(|x| face(x, 0)).collect();
    q.gamma_y = (0..n).map(|y| face(0, y)).collect();
    Ok(q)
}

/// Direction data for a lozenge patch.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LozengeSpec {
    /// Edge directions (radians), strictly increasing, spanning less than pi.
    pub directions: Vec<f64>,
    pub extent: usize,
}

/// Planar lozenge patch: two directions give an extent x extent parallelogram
/// of rhombi, three directions give the hexagon of side `extent` tiled by
/// three parallelogram blocks meeting at a central vertex.
pub fn build_lozenge_patch(spec: &LozengeSpec) -> Result<Quadrangulation> {
    let d = &spec.directions;
    let n = spec.extent;
    if n == 0 {
        return Err(Error::Argument("extent must be positive".into()));
    }
    for w in d.windows(2) {
        if !(w[1] > w[0]) {
            return Err(Error::Argument("directions must be strictly increasing".into()));
        }
    }
    if d.len() < 2 || d.len() > 3 || d[d.len() - 1] - d[0] >= PI {
        return Err(Error::Argument(
            "need two or three directions spanning less than pi".into(),
        ));
    }
    let unit = |s: f64| [s.cos(), s.sin()];
    let e: Vec<Point> = d.iter().map(|&s| unit(s)).collect();
    // rhombi as (origin, direction index a, direction index b) with a < b
    let mut rhombi: Vec<(Point, usize, usize)> = Vec::new();
    let add = |p: Point, q: Point| [p[0] + q[0], p[1] + q[1]];
    let scale = |p: Point, s: f64| [p[0] * s, p[1] * s];
    let block = |rh: &mut Vec<(Point, usize, usize)>, base: Point, a: usize, b: usize| {
        for i in 0..n {
            for j in 0..n {
                let o = add(base, add(scale(e[a], i as f64), scale(e[b], j as f64)));
                rh.push((o, a, b));
            }
        }
    };
    if d.len() == 2 {
        block(&mut rhombi, [0.0, 0.0], 0, 1);
    } else {
        let nf = n as f64;
        block(&mut rhombi, [0.0, 0.0], 0, 1);
        block(&mut rhombi, scale(e[1], nf), 0, 2);
        block(&mut rhombi, [0.0, 0.0], 1, 2);
    }
    let mut ids: HashMap<(i64, i64), usize> = HashMap::new();
    let mut points: Vec<Point> = Vec::new();
    let mut corner_ids = Vec::new();
    for &(o, a, b) in &rhombi {
        let cs = [o, add(o, e[a]), add(add(o, e[a]), e[b]), add(o, e[b])];
        let mut ci = [0usize; 4];
        for i in 0..4 {
            let key = pos_key(cs[i]);
            ci[i] = *ids.entry(key).or_insert_with(|| {
                points.push(cs[i]);
                points.len() - 1
            });
        }
        corner_ids.push((ci, cs, a, b));
    }
    // two-color by breadth-first search from vertex 0
    let nv = points.len();
    let mut adj = vec![Vec::new(); nv];
    for (ci, _, _, _) in &corner_ids {
        for i in 0..4 {
            adj[ci[i]].push(ci[(i + 1) % 4]);
            adj[ci[(i + 1) % 4]].push(ci[i]);
        }
    }
    let mut col: Vec<Option<Color>> = vec![None; nv];
    col[0] = Some(Color::Black);
    let mut queue = VecDeque::from([0usize]);
    while let Some(v) = queue.pop_front() {
        let other = if col[v] == Some(Color::Black) { Color::White } else { Color::Black };
        for &u in &adj[v] {
            match col[u] {
                None => {
                    col[u] = Some(other);
                    queue.push_back(u);
                }
                Some(c) if c != other => {
                    return Err(Error::InvalidGraph("patch is not bipartite".into()))
                }
                _ => {}
            }
        }
    }
    let colors: Vec<Color> = col.into_iter().map(|c| c.unwrap_or(Color::Black)).collect();
    let mut cycles = Vec::new();
    let mut fpos = Vec::new();
    let mut theta = Vec::new();
    for (ci, cs, a, b) in corner_ids {
        let k = if colors[ci[0]] == Color::Black { 0 } else { 1 };
        let mut cyc = [0; 4];
        let mut p = [[0.0; 2]; 4];
        for i in 0..4 {
            cyc[i] = ci[(i + k) % 4];
            p[i] = cs[(i + k) % 4];
        }
        let opening = d[b] - d[a];
        let t = if k == 0 { opening / 2.0 } else { (PI - opening) / 2.0 };
        if t < 1e-9 || t > PI / 2.0 - 1e-9 {
            return Err(Error::InvalidGraph("degenerate rhombus".into()));
        }
        cycles.push(cyc);
        fpos.push(p);
        theta.push(t);
    }
    let mut q = Quadrangulation::from_faces(Surface::Patch, colors, cycles, Some(fpos), None)?;
    q.theta = Some(theta);
    Ok(q)
}

/// Half corner angles of the embedded black graph, one per primal edge.
/// For edge e = (b, w), 2 phi_e is the counterclockwise angle at b, inside the
/// face of the black graph containing w, between the diagonals of the two
/// faces of Q adjacent to e. Boundary edges of patches fall back to the
/// rhombus half-angle of their only face.
pub fn corner_angles(q: &Quadrangulation) -> Result<Vec<f64>> {
    let mut phi = Vec::with_capacity(q.num_edges());
    for (e, edge) in q.edges.iter().enumerate() {
        match (edge.black_side, edge.white_side) {
            (Some((f, i)), Some((g, j))) => {
                let (pf, pg) = match (q.faces[f].pos, q.faces[g].pos) {
                    (Some(a), Some(b)) => (a, b),
                    _ => return Err(Error::InvalidGraph(format!("edge {e}: no embedding"))),
                };
                let to_far = sub(pf[(i + 2) % 4], pf[i]);
                let to_near = sub(pg[(j + 3) % 4], pg[(j + 1) % 4]);
                let a = (angle_of(to_far) - angle_of(to_near)).rem_euclid(2.0 * PI);
                phi.push(a / 2.0);
            }
            (Some((f, _)), None) | (None, Some((f, _))) => {
                let th = q
                    .theta
                    .as_ref()
                    .ok_or_else(|| Error::InvalidGraph(format!("boundary edge {e} has no angle")))?;
                phi.push(th[f]);
            }
            _ => return Err(Error::InvalidGraph(format!("edge {e} bounds no face"))),
        }
    }
    Ok(phi)
}

/// Leg angles for lozenge embeddings: each edge takes the rhombus half-angle of
/// the face in which it is traversed from black to white.
pub fn lozenge_angles(q: &Quadrangulation) -> Result<Vec<f64>> {
    let th = q
        .theta
        .as_ref()
        .ok_or_else(|| Error::InvalidGraph("no lozenge embedding".into()))?;
    q.edges
        .iter()
        .map(|e| match (e.black_side, e.white_side) {
            (Some((f, _)), _) | (None, Some((f, _))) => Ok(th[f]),
            _ => Err(Error::InvalidGraph("isolated edge".into())),
        })
        .collect()
}

/// Shortest path between two vertices of the same color along face
/// diagonals, returned as the list of faces used.
pub fn diagonal_path(q: &Quadrangulation, from: usize, to: usize) -> Result<Vec<usize>> {
    let color = *q
        .colors
        .get(from)
        .ok_or_else(|| Error::Argument(format!("vertex {from} out of range")))?;
    if q.colors.get(to) != Some(&color) {
        return Err(Error::Argument("path endpoints have different colors".into()));
    }
    let off = if color == Color::Black { 0 } else { 1 };
    let mut adj = vec![Vec::new(); q.num_vertices()];
    for (f, face) in q.faces.iter().enumerate() {
        let (u, v) = (face.cycle[off], face.cycle[off + 2]);
        adj[u].push((v, f));
        adj[v].push((u, f));
    }
    let mut prev: Vec<Option<(usize, usize)>> = vec![None; q.num_vertices()];
    let mut seen = vec![false; q.num_vertices()];
    seen[from] = true;
    let mut queue = VecDeque::from([from]);
    while let Some(v) = queue.pop_front() {
        if v == to {
            break;
        }
        for &(u, f) in &adj[v] {
            if !seen[u] {
                seen[u] = true;
                prev[u] = Some((v, f));
                queue.push_back(u);
            }
        }
    }
    if !seen[to] {
        return Err(Error::Argument(format!("no diagonal path from {from} to {to}")));
    }
    let mut path = Vec::new();
    let mut v = to;
    while let Some((p, f)) = prev[v] {
        path.push(f);
        v = p;
    }
    path.reverse();
    Ok(path)
}

/// Sums of leg angles around every vertex: sum of phi at black vertices and
/// sum of (pi/2 - phi) at white vertices.
pub fn angle_sums(q: &Quadrangulation, phi: &[f64]) -> Vec<f64> {
    let mut sums = vec![0.0; q.num_vertices()];
    for (e, edge) in q.edges.iter().enumerate() {
        sums[edge.black] += phi[e];
        sums[edge.white] += PI / 2.0 - phi[e];
    }
    sums
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cube_counts() {
        let q = build_cube_sphere();
        assert_eq!((q.num_vertices(), q.num_edges(), q.num_faces()), (8, 12, 6));
        assert_eq!(q.euler(), 2);
        assert!(q.validate().is_empty());
        let dual = q.dual_edges();
        assert_eq!(dual.iter().filter(|d| d.is_some()).count(), 12);
        let mut deg = vec![0; 6];
        for (f, g) in dual.into_iter().flatten() {
            deg[f] += 1;
            deg[g] += 1;
        }
        assert!(deg.iter().all(|&d| d == 4));
    }

    #[test]
    fn torus_counts() {
        let q = build_square_torus(2, 2).unwrap();
        assert_eq!((q.num_vertices(), q.num_edges(), q.num_faces()), (4, 8, 4));
        assert!(q.validate().is_empty(), "{:?}", q.validate());
        let q = build_square_torus(4, 2).unwrap();
        assert_eq!(q.num_faces(), 8);
        assert!(q.validate().is_empty());
        assert!(build_square_torus(3, 2).is_err());
    }

    #[test]
    fn non_winding_cycle_reported() {
        let mut q = build_square_torus(2, 2).unwrap();
        q.gamma_x = vec![0, 0];
        assert!(q.validate().iter().any(|m| m.contains("gamma_x")));
    }

    #[test]
    fn deleted_edge_reported() {
        let mut spec = build_cube_sphere().to_spec();
        spec.edges.remove(0);
        let report = validate_spec(&spec);
        assert!(report.iter().any(|m| m.contains("degree")), "{report:?}");
        assert!(Quadrangulation::from_spec(&spec).is_err());
    }

    #[test]
    fn spec_round_trip() {
        for q in [build_cube_sphere(), build_square_torus(2, 2).unwrap()] {
            let spec = q.to_spec();
            let text = serde_json::to_string(&spec).unwrap();
            let back: GraphSpec = serde_json::from_str(&text).unwrap();
            let q2 = Quadrangulation::from_spec(&back).unwrap();
            assert_eq!(q2.num_edges(), q.num_edges());
            assert_eq!(corner_angles(&q2).unwrap(), corner_angles(&q).unwrap());
        }
    }

    #[test]
    fn square_angles() {
        let q = build_square_torus(4, 4).unwrap();
        for p in corner_angles(&q).unwrap() {
            assert!((p - PI / 4.0).abs() < 1e-12);
        }
    }

    #[test]
    fn cube_angle_sums() {
        let q = build_cube_sphere();
        let phi = corner_angles(&q).unwrap();
        let sums = angle_sums(&q, &phi);
        for v in 0..q.num_vertices() {
            let s = sums[v];
            if q.colors[v] == Color::Black {
                assert!((s - PI).abs() < 1e-12);
            } else {
                let r = (s - PI).rem_euclid(2.0 * PI);
                assert!(r < 1e-12 || (2.0 * PI - r) < 1e-12);
            }
        }
    }

    #[test]
    fn rhombic_patch_angles() {
        let q = build_lozenge_patch(&LozengeSpec { directions: vec![0.0, PI / 3.0], extent: 3 }).unwrap();
        let th = q.theta.clone().unwrap();
        assert!(th.iter().all(|&t| (t - PI / 6.0).abs() < 1e-12 || (t - PI / 3.0).abs() < 1e-12));
        let sq = build_lozenge_patch(&LozengeSpec { directions: vec![0.0, PI / 2.0], extent: 3 }).unwrap();
        assert!(sq.theta.clone().unwrap().iter().all(|&t| (t - PI / 4.0).abs() < 1e-12));
        let phi = corner_angles(&sq).unwrap();
        let loz = lozenge_angles(&sq).unwrap();
        for (a, b) in phi.iter().zip(&loz) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn hexagon_star_triangle() {
        let q = build_lozenge_patch(&LozengeSpec {
            directions: vec![0.0, PI / 3.0, 2.0 * PI / 3.0],
            extent: 1,
        })
        .unwrap();
        assert_eq!(q.num_faces(), 3);
        let s: f64 = q.theta.unwrap().iter().sum();
        assert!((s - PI / 2.0).abs() < 1e-12);
    }
}
