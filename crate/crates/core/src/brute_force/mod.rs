//! Exhaustive enumeration of eight-vertex configurations and spin systems.
//!
//! A configuration is a set of dual edges, stored as a bitmask indexed like
//! the primal edges (a dual edge crosses exactly one primal edge). Every face
//! must contain an even number of them. Configurations are enumerated in Gray
//! code order over a fundamental cycle basis of the dual graph.

pub mod forms;

use crate::error::{Error, Result};
use crate::quad_graph::{Color, Quadrangulation};
use crate::weights::{apply_disorder_ops, path_endpoints, FaceWeights, Paths};
use num_complex::Complex64;
use rayon::prelude::*;
use std::collections::{BTreeMap, VecDeque};

pub type Config = u64;

/// Largest cycle-space dimension accepted for streaming sums.
pub const MAX_CYCLE_DIM: usize = 30;
/// Largest cycle-space dimension for which configurations are materialized.
pub const MAX_LISTED_DIM: usize = 24;
/// Largest vertex count for spin enumeration.
pub const MAX_SPINS: usize = 26;

/// Local configuration type at a face.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FaceType {
    A,
    B,
    C,
    D,
}

impl FaceType {
    pub fn index(self) -> usize {
        self as usize
    }
}

/// Type of a face from the presence bits of its four dual half-edges, local
/// edge `i` at bit `i`. `None` for an odd number of edges.
pub fn classify(bits: u8) -> Option<FaceType> {
    match bits & 0xf {
        0b0000 | 0b1111 => Some(FaceType::C),
        0b0011 | 0b1100 => Some(FaceType::A),
        0b0110 | 0b1001 => Some(FaceType::B),
        0b0101 | 0b1010 => Some(FaceType::D),
        _ => None,
    }
}

fn local_bits(q: &Quadrangulation, f: usize, tau: Config) -> u8 {
    let mut bits = 0u8;
    for (i, &e) in q.faces[f].edges.iter().enumerate() {
        if tau >> e & 1 == 1 {
            bits |= 1 << i;
        }
    }
    bits
}

pub fn face_types(q: &Quadrangulation, tau: Config) -> Result<Vec<FaceType>> {
    (0..q.num_faces())
        .map(|f| {
            classify(local_bits(q, f, tau))
                .ok_or_else(|| Error::InvalidConfig(format!("odd number of dual edges at face {f}")))
        })
        .collect()
}

/// Fundamental cycle basis of the dual graph, built from a breadth-first
/// spanning tree over faces.
pub fn cycle_basis(q: &Quadrangulation) -> Result<Vec<Config>> {
    if q.num_edges() > 64 {
        return Err(Error::TooLarge(q.num_edges(), 64));
    }
    let nf = q.num_faces();
    let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); nf];
    for (e, d) in q.dual_edges().into_iter().enumerate() {
        if let Some((f, g)) = d {
            adj[f].push((g, e));
            adj[g].push((f, e));
        }
    }
    // path from each face to the root, as a mask of tree edges
    let mut to_root: Vec<Option<Config>> = vec![None; nf];
    let mut tree = 0u64;
    let mut basis = Vec::new();
    if nf == 0 {
        return Ok(basis);
    }
    to_root[0] = Some(0);
    let mut queue = VecDeque::from([0usize]);
    while let Some(f) = queue.pop_front() {
        for &(g, e) in &adj[f] {
            if to_root[g].is_none() {
                to_root[g] = Some(to_root[f].unwrap() ^ (1 << e));
                tree |= 1 << e;
                queue.push_back(g);
            }
        }
    }
    if to_root.iter().any(|p| p.is_none()) {
        return Err(Error::InvalidGraph("dual graph is not connected".into()));
    }
    for (e, d) in q.dual_edges().into_iter().enumerate() {
        if let Some((f, g)) = d {
            if tree >> e & 1 == 0 {
                basis.push(to_root[f].unwrap() ^ to_root[g].unwrap() ^ (1 << e));
            }
        }
    }
    Ok(basis)
}

/// Visit every configuration exactly once, splitting the work across threads,
/// and sum the values returned by `f`.
pub fn sum_over_configs<F>(q: &Quadrangulation, f: F) -> Result<f64>
where
    F: Fn(Config) -> f64 + Sync,
{
    let basis = cycle_basis(q)?;
    let dim = basis.len();
    if dim > MAX_CYCLE_DIM {
        return Err(Error::TooLarge(dim, MAX_CYCLE_DIM));
    }
    let split = dim.min(8);
    // the last `split` basis vectors select a chunk, the rest are walked in Gray order
    let (inner, outer) = basis.split_at(dim - split);
    let total = (0u64..1 << split)
        .into_par_iter()
        .map(|prefix| {
            let mut tau = 0;
            for (j, b) in outer.iter().enumerate() {
                if prefix >> j & 1 == 1 {
                    tau ^= b;
                }
            }
            let mut acc = f(tau);
            for i in 1u64..1 << inner.len() {
                tau ^= inner[i.trailing_zeros() as usize];
                acc += f(tau);
            }
            acc
        })
        .sum();
    Ok(total)
}

/// All configurations, in a deterministic Gray code order starting at the
/// empty configuration.
pub fn enumerate_configs(q: &Quadrangulation) -> Result<Vec<Config>> {
    let basis = cycle_basis(q)?;
    if basis.len() > MAX_LISTED_DIM {
        return Err(Error::TooLarge(basis.len(), MAX_LISTED_DIM));
    }
    let mut out = Vec::with_capacity(1 << basis.len());
    let mut tau = 0u64;
    out.push(tau);
    for i in 1u64..1 << basis.len() {
        tau ^= basis[i.trailing_zeros() as usize];
        out.push(tau);
    }
    Ok(out)
}

/// Per-face lookup from the four local bits to the face weight.
struct WeightTable {
    table: Vec<[f64; 16]>,
    edges: Vec<[usize; 4]>,
}

impl WeightTable {
    fn new(q: &Quadrangulation, x: &[FaceWeights]) -> Result<Self> {
        if x.len() != q.num_faces() {
            return Err(Error::Argument("weight field does not match face count".into()));
        }
        let table = x
            .iter()
            .map(|w| {
                let vals = w.to_array();
                let mut t = [f64::NAN; 16];
                for (bits, slot) in t.iter_mut().enumerate() {
                    if let Some(ty) = classify(bits as u8) {
                        *slot = vals[ty.index()];
                    }
                }
                t
            })
            .collect();
        Ok(WeightTable { table, edges: q.faces.iter().map(|f| f.edges).collect() })
    }

    fn weight(&self, tau: Config) -> f64 {
        let mut w = 1.0;
        for (t, e) in self.table.iter().zip(&self.edges) {
            let bits = (tau >> e[0] & 1) | (tau >> e[1] & 1) << 1 | (tau >> e[2] & 1) << 2 | (tau >> e[3] & 1) << 3;
            w *= t[bits as usize];
        }
        w
    }
}

pub fn config_weight(q: &Quadrangulation, x: &[FaceWeights], tau: Config) -> Result<f64> {
    let types = face_types(q, tau)?;
    if x.len() != types.len() {
        return Err(Error::Argument("weight field does not match face count".into()));
    }
    Ok(types.iter().zip(x).map(|(t, w)| w.to_array()[t.index()]).product())
}

pub fn partition_fn(q: &Quadrangulation, x: &[FaceWeights]) -> Result<f64> {
    let table = WeightTable::new(q, x)?;
    sum_over_configs(q, |tau| table.weight(tau))
}

/// Boltzmann probabilities of all configurations, in enumeration order.
pub fn boltzmann(q: &Quadrangulation, x: &[FaceWeights]) -> Result<Vec<(Config, f64)>> {
    let table = WeightTable::new(q, x)?;
    let configs = enumerate_configs(q)?;
    let weights: Vec<f64> = configs.iter().map(|&t| table.weight(t)).collect();
    if weights.iter().any(|&w| w < 0.0) {
        return Err(Error::Regime("negative configuration weight".into()));
    }
    let z: f64 = weights.iter().sum();
    if !(z > 0.0) {
        return Err(Error::Regime("partition function is not positive".into()));
    }
    Ok(configs.into_iter().zip(weights).map(|(t, w)| (t, w / z)).collect())
}

/// Vertex sets carrying order variables (`order_*`) and disorder variables
/// (`disorder_*`).
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct VertexSets {
    pub order_black: Vec<usize>,
    pub order_white: Vec<usize>,
    pub disorder_black: Vec<usize>,
    pub disorder_white: Vec<usize>,
}

fn check_endpoints(q: &Quadrangulation, set: &[usize], path: &[usize], color: Color, what: &str) -> Result<()> {
    if set.len() % 2 == 1 {
        return Err(Error::Argument(format!("{what} has odd cardinality")));
    }
    let mut want = set.to_vec();
    want.sort_unstable();
    want.dedup();
    if want.len() != set.len() || want.iter().any(|&v| q.colors.get(v) != Some(&color)) {
        return Err(Error::Argument(format!("{what} has repeated or miscolored vertices")));
    }
    if path_endpoints(q, path, color)? != want {
        return Err(Error::Argument(format!("paths for {what} do not end at its vertices")));
    }
    Ok(())
}

/// Mixed order/disorder correlator: the partition function of the modified weights.
pub fn correlator(q: &Quadrangulation, x: &[FaceWeights], sets: &VertexSets, paths: &Paths) -> Result<f64> {
    check_endpoints(q, &sets.order_black, &paths.order_black, Color::Black, "order_black")?;
    check_endpoints(q, &sets.order_white, &paths.order_white, Color::White, "order_white")?;
    check_endpoints(q, &sets.disorder_black, &paths.disorder_black, Color::Black, "disorder_black")?;
    check_endpoints(q, &sets.disorder_white, &paths.disorder_white, Color::White, "disorder_white")?;
    partition_fn(q, &apply_disorder_ops(q, x, paths)?)
}

/// Outcome of comparing two quantities defined up to a global sign.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SignMatch {
    Equal,
    Negated,
    Mismatch,
}

pub fn compare_up_to_sign(lhs: f64, rhs: f64, tol: f64) -> SignMatch {
    let scale = lhs.abs().max(rhs.abs()).max(1e-300);
    if (lhs - rhs).abs() <= tol * scale {
        SignMatch::Equal
    } else if (lhs + rhs).abs() <= tol * scale {
        SignMatch::Negated
    } else {
        SignMatch::Mismatch
    }
}

/// Ising partition function on the black (or white) diagonal graph with
/// possibly complex couplings, one per face.
pub fn ising_partition(q: &Quadrangulation, couplings: &[Complex64], side: Color) -> Result<Complex64> {
    if couplings.len() != q.num_faces() {
        return Err(Error::Argument("coupling count does not match face count".into()));
    }
    let verts: Vec<usize> = (0..q.num_vertices()).filter(|&v| q.colors[v] == side).collect();
    if verts.len() > MAX_SPINS {
        return Err(Error::TooLarge(verts.len(), MAX_SPINS));
    }
    let mut pos = vec![usize::MAX; q.num_vertices()];
    for (i, &v) in verts.iter().enumerate() {
        pos[v] = i;
    }
    let off = if side == Color::Black { 0 } else { 1 };
    let bonds: Vec<(usize, usize, Complex64, Complex64)> = q
        .faces
        .iter()
        .zip(couplings)
        .map(|(f, &j)| (pos[f.cycle[off]], pos[f.cycle[off + 2]], j.exp(), (-j).exp()))
        .collect();
    let total = (0u64..1 << verts.len())
        .into_par_iter()
        .map(|s| {
            bonds.iter().fold(Complex64::new(1.0, 0.0), |acc, &(u, v, same, diff)| {
                acc * if (s >> u ^ s >> v) & 1 == 0 { same } else { diff }
            })
        })
        .collect::<Vec<_>>()
        .into_iter()
        .sum();
    Ok(total)
}

/// Ising correlator: `i pi / 2` is added to the couplings on the order
/// path, and the couplings on the disorder path are then negated.
pub fn ising_correlator(
    q: &Quadrangulation,
    couplings: &[f64],
    side: Color,
    order_path: &[usize],
    disorder_path: &[usize],
) -> Result<Complex64> {
    let mut j: Vec<Complex64> = couplings.iter().map(|&c| Complex64::new(c, 0.0)).collect();
    for &f in order_path {
        j[f] += Complex64::new(0.0, std::f64::consts::FRAC_PI_2);
    }
    for &f in disorder_path {
        j[f] = -j[f];
    }
    ising_partition(q, &j, side)
}

/// Exact law of the XOR of two independent Boltzmann samples.
pub fn xor_distribution(q: &Quadrangulation, x1: &[FaceWeights], x2: &[FaceWeights]) -> Result<BTreeMap<Config, f64>> {
    let p1 = boltzmann(q, x1)?;
    let p2 = boltzmann(q, x2)?;
    let mut out: BTreeMap<Config, f64> = BTreeMap::new();
    for &(t1, a) in &p1 {
        if a == 0.0 {
            continue;
        }
        for &(t2, b) in &p2 {
            *out.entry(t1 ^ t2).or_insert(0.0) += a * b;
        }
    }
    Ok(out)
}

pub fn total_variation(p: &BTreeMap<Config, f64>, r: &BTreeMap<Config, f64>) -> f64 {
    let mut keys: Vec<&Config> = p.keys().chain(r.keys()).collect();
    keys.sort_unstable();
    keys.dedup();
    0.5 * keys
        .into_iter()
        .map(|k| (p.get(k).unwrap_or(&0.0) - r.get(k).unwrap_or(&0.0)).abs())
        .sum::<f64>()
}

/// Presence of the dual edge crossing each primal edge when spins are drawn
/// on both colors: present iff the endpoint spins differ.
pub fn spins_to_config(q: &Quadrangulation, spins: u64) -> Config {
    q.edges.iter().enumerate().fold(0, |acc, (e, edge)| {
        if (spins >> edge.black ^ spins >> edge.white) & 1 == 1 {
            acc | 1 << e
        } else {
            acc
        }
    })
}

/// Symmetric difference of two sets, sorted.
pub fn sym_diff(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out: Vec<usize> = a.iter().filter(|v| !b.contains(v)).copied().collect();
    out.extend(b.iter().filter(|v| !a.contains(v)));
    out.sort_unstable();
    out
}

/// Vertex sets together with the paths joining them.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Insertion {
    pub sets: VertexSets,
    pub paths: Paths,
}

/// Arguments of the two correlators on the right side of the switching
/// identity, given those of the left side.
pub fn switched_insertions(first: &Insertion, second: &Insertion) -> (Insertion, Insertion) {
    fn mix(
        x: (&VertexSets, &Paths),
        y: (&VertexSets, &Paths),
        db: (&[usize], &[usize]),
        dw: (&[usize], &[usize]),
    ) -> Insertion {
        let (xs, xp) = x;
        let (ys, yp) = y;
        Insertion {
            sets: VertexSets {
                order_black: xs.order_black.clone(),
                order_white: ys.order_white.clone(),
                disorder_black: sym_diff(&sym_diff(&xs.order_black, &ys.order_black), db.0),
                disorder_white: sym_diff(&sym_diff(&xs.order_white, &ys.order_white), dw.0),
            },
            paths: Paths {
                order_black: xp.order_black.clone(),
                order_white: yp.order_white.clone(),
                disorder_black: sym_diff(&sym_diff(&xp.order_black, &yp.order_black), db.1),
                disorder_white: sym_diff(&sym_diff(&xp.order_white, &yp.order_white), dw.1),
            },
        }
    }
    let (s, p) = (&first.sets, &first.paths);
    let (s2, p2) = (&second.sets, &second.paths);
    let left = mix(
        (s, p),
        (s2, p2),
        (&s2.disorder_black, &p2.disorder_black),
        (&s.disorder_white, &p.disorder_white),
    );
    let right = mix(
        (s2, p2),
        (s, p),
        (&s.disorder_black, &p.disorder_black),
        (&s2.disorder_white, &p2.disorder_white),
    );
    (left, right)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad_graph::{build_cube_sphere, build_square_torus};

    #[test]
    fn config_counts() {
        let cube = build_cube_sphere();
        let c = enumerate_configs(&cube).unwrap();
        assert_eq!(c.len(), 128);
        assert_eq!(c[0], 0);
        let t = enumerate_configs(&build_square_torus(2, 2).unwrap()).unwrap();
        assert_eq!(t.len(), 32);
        let full = (1u64 << cube.num_edges()) - 1;
        assert!(c.contains(&full));
    }

    #[test]
    fn brute_parity_oracle() {
        // independent oracle: scan every subset of dual edges
        let cube = build_cube_sphere();
        let mut count = 0;
        for tau in 0u64..1 << cube.num_edges() {
            if face_types(&cube, tau).is_ok() {
                count += 1;
            }
        }
        assert_eq!(count, 128);
    }

    #[test]
    fn weights_of_simple_configs() {
        let cube = build_cube_sphere();
        let x: Vec<FaceWeights> = (0..6).map(|f| FaceWeights::new(1.0, 2.0, 3.0 + f as f64, 5.0)).collect();
        let empty = config_weight(&cube, &x, 0).unwrap();
        assert_eq!(empty, x.iter().map(|w| w.c).product::<f64>());
        let full = (1u64 << 12) - 1;
        for tau in enumerate_configs(&cube).unwrap() {
            let a = config_weight(&cube, &x, tau).unwrap();
            let b = config_weight(&cube, &x, tau ^ full).unwrap();
            assert_eq!(a, b);
            let nd = face_types(&cube, tau).unwrap().iter().filter(|&&t| t == FaceType::D).count();
            assert_eq!(nd % 2, 0);
        }
        let ones = vec![FaceWeights::new(1.0, 1.0, 1.0, 1.0); 6];
        assert_eq!(partition_fn(&cube, &ones).unwrap(), 128.0);
    }

    #[test]
    fn ising_trivial() {
        let cube = build_cube_sphere();
        let z = ising_partition(&cube, &vec![Complex64::new(0.0, 0.0); 6], Color::Black).unwrap();
        assert_eq!(z.re, 16.0);
    }

    #[test]
    fn spin_map_lands_on_configs() {
        let cube = build_cube_sphere();
        let all: std::collections::HashSet<Config> = enumerate_configs(&cube).unwrap().into_iter().collect();
        for s in 0u64..256 {
            assert!(all.contains(&spins_to_config(&cube, s)));
        }
    }

    #[test]
    fn point_mass_xor() {
        let cube = build_cube_sphere();
        let x = vec![FaceWeights::new(0.0, 0.0, 1.0, 0.0); 6];
        let d = xor_distribution(&cube, &x, &x).unwrap();
        // the full configuration is also of type C at every face
        let full = (1u64 << 12) - 1;
        assert!((d[&0] - 0.5).abs() < 1e-15 && (d[&full] - 0.5).abs() < 1e-15);
        assert!(d.iter().filter(|(_, &p)| p > 0.0).count() == 2);
    }
}
