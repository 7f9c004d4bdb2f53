//! Configurations as Z2-valued 1-forms on faces.
//!
//! A form assigns each face a pair of bits `(a_f, b_f)`, stored at bits `2f`
//! and `2f + 1`. The first bit records whether the black spins of the face
//! differ, the second whether the white spins differ. Spin configurations are
//! bitmasks over vertices.

use super::{classify, Config, FaceType};
use crate::error::{Error, Result};
use crate::quad_graph::{Color, Quadrangulation};
use crate::weights::FaceWeights;

pub type Form = u64;
pub type Spins = u64;

/// Largest face count for which full tables over all forms are built.
pub const MAX_TABLE_FACES: usize = 8;

fn pair(x: Form, f: usize) -> (u64, u64) {
    (x >> (2 * f) & 1, x >> (2 * f + 1) & 1)
}

/// Differences of spins across the two diagonals of every face.
pub fn phi(q: &Quadrangulation, sigma: Spins) -> Form {
    q.faces.iter().enumerate().fold(0, |acc, (f, face)| {
        let [b, w, b2, w2] = face.cycle;
        let a = (sigma >> b ^ sigma >> b2) & 1;
        let c = (sigma >> w ^ sigma >> w2) & 1;
        acc | a << (2 * f) | c << (2 * f + 1)
    })
}

/// Sum of second components around black vertices and of first components
/// around white vertices.
pub fn psi(q: &Quadrangulation, tau: Form) -> Spins {
    let mut out = 0u64;
    for (f, face) in q.faces.iter().enumerate() {
        let (a, b) = pair(tau, f);
        for &v in &face.cycle {
            let bit = if q.colors[v] == Color::Black { b } else { a };
            out ^= bit << v;
        }
    }
    out
}

/// Symplectic pairing `sum_f a_f b'_f + a'_f b_f`.
pub fn symplectic(x: Form, y: Form) -> u32 {
    let even = 0x5555_5555_5555_5555u64;
    let xa = x & even;
    let xb = (x >> 1) & even;
    let ya = y & even;
    let yb = (y >> 1) & even;
    ((xa & yb) ^ (ya & xb)).count_ones() & 1
}

/// Canonical pairing on spin configurations.
pub fn bilinear(s: Spins, t: Spins) -> u32 {
    (s & t).count_ones() & 1
}

fn type_bits(t: FaceType) -> (u64, u64) {
    match t {
        FaceType::C => (0, 0),
        FaceType::A => (0, 1),
        FaceType::B => (1, 0),
        FaceType::D => (1, 1),
    }
}

fn bits_type(a: u64, b: u64) -> FaceType {
    match (a, b) {
        (0, 0) => FaceType::C,
        (0, 1) => FaceType::A,
        (1, 0) => FaceType::B,
        _ => FaceType::D,
    }
}

/// Form of a configuration (two configurations related by complement share it).
pub fn config_to_form(q: &Quadrangulation, tau: Config) -> Result<Form> {
    let mut out = 0;
    for (f, face) in q.faces.iter().enumerate() {
        let mut bits = 0u8;
        for (i, &e) in face.edges.iter().enumerate() {
            bits |= ((tau >> e & 1) as u8) << i;
        }
        let t = classify(bits).ok_or_else(|| Error::InvalidConfig(format!("odd face {f}")))?;
        let (a, b) = type_bits(t);
        out |= a << (2 * f) | b << (2 * f + 1);
    }
    Ok(out)
}

/// Weight function extended to all forms.
pub fn form_weight(x: &[FaceWeights], tau: Form) -> f64 {
    x.iter()
        .enumerate()
        .map(|(f, w)| {
            let (a, b) = pair(tau, f);
            w.to_array()[bits_type(a, b).index()]
        })
        .product()
}

fn check_faces(nf: usize) -> Result<()> {
    if nf > MAX_TABLE_FACES {
        return Err(Error::TooLarge(nf, MAX_TABLE_FACES));
    }
    Ok(())
}

fn check_table(nf: usize, len: usize) -> Result<()> {
    check_faces(nf)?;
    if len != 1 << (2 * nf) {
        return Err(Error::Argument(format!("table length {len} is not 4^{nf}")));
    }
    Ok(())
}

/// Table of `form_weight` over all `4^F` forms.
pub fn weight_table(x: &[FaceWeights]) -> Result<Vec<f64>> {
    check_faces(x.len())?;
    Ok((0..1u64 << (2 * x.len())).map(|t| form_weight(x, t)).collect())
}

/// Fourier transform over `(Z2^2)^F`, normalized to be an involution.
/// Applied one face at a time, since the character factorizes over faces.
pub fn fourier(g: &[f64], nf: usize) -> Result<Vec<f64>> {
    check_table(nf, g.len())?;
    let mut out = g.to_vec();
    for f in 0..nf {
        let stride = 1usize << (2 * f);
        for base in 0..out.len() {
            if (base >> (2 * f)) & 3 != 0 {
                continue;
            }
            let v = [0, 1, 2, 3].map(|k| out[base + k * stride]);
            // character (-1)^(a b' + a' b) with k = a + 2 b
            for k in 0..4usize {
                let (a, b) = (k & 1, k >> 1);
                let mut s = 0.0;
                for (kk, &val) in v.iter().enumerate() {
                    let (a2, b2) = (kk & 1, kk >> 1);
                    s += if (a * b2 + a2 * b) % 2 == 0 { val } else { -val };
                }
                out[base + k * stride] = 0.5 * s;
            }
        }
    }
    Ok(out)
}

/// Direct double-sum Fourier transform, for cross-checking on small tables.
pub fn fourier_naive(g: &[f64], nf: usize) -> Result<Vec<f64>> {
    check_table(nf, g.len())?;
    let norm = 0.5f64.powi(nf as i32);
    Ok((0..g.len() as u64)
        .map(|t| {
            norm * g
                .iter()
                .enumerate()
                .map(|(t2, &v)| if symplectic(t, t2 as u64) == 0 { v } else { -v })
                .sum::<f64>()
        })
        .collect())
}

/// The subspace of forms coming from spin configurations.
pub fn image_of_phi(q: &Quadrangulation) -> Result<Vec<Form>> {
    if q.num_vertices() > super::MAX_SPINS {
        return Err(Error::TooLarge(q.num_vertices(), super::MAX_SPINS));
    }
    let mut out: Vec<Form> = (0..1u64 << q.num_vertices()).map(|s| phi(q, s)).collect();
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

/// Forms annihilated by `psi`.
pub fn kernel_of_psi(q: &Quadrangulation) -> Result<Vec<Form>> {
    check_faces(q.num_faces())?;
    Ok((0..1u64 << (2 * q.num_faces())).filter(|&t| psi(q, t) == 0).collect())
}

/// Symplectic orthogonal of a subspace given by a spanning set.
pub fn orthogonal(span: &[Form], nf: usize) -> Result<Vec<Form>> {
    check_faces(nf)?;
    Ok((0..1u64 << (2 * nf))
        .filter(|&t| span.iter().all(|&s| symplectic(s, t) == 0))
        .collect())
}

/// Rank over Z2 of a set of bit vectors.
pub fn rank(vectors: &[u64]) -> usize {
    let mut rows: Vec<u64> = vectors.to_vec();
    let mut r = 0;
    for bit in 0..64 {
        if let Some(p) = (r..rows.len()).find(|&i| rows[i] >> bit & 1 == 1) {
            rows.swap(r, p);
            let pivot = rows[r];
            for (i, row) in rows.iter_mut().enumerate() {
                if i != r && *row >> bit & 1 == 1 {
                    *row ^= pivot;
                }
            }
            r += 1;
        }
    }
    r
}

/// Sum of `g` over a subset of forms.
pub fn sum_over(g: &[f64], subset: &[Form]) -> f64 {
    subset.iter().map(|&t| g[t as usize]).sum()
}

/// Correlator as a signed sum over forms with prescribed defect: twice the
/// sum over forms `t` with `psi(t)` equal to the disorder set of
/// `(-1)^<t_gamma | t> w(t)`, where `t_gamma` carries the order paths.
pub fn correlator_by_forms(
    q: &Quadrangulation,
    x: &[FaceWeights],
    order_black: &[usize],
    order_white: &[usize],
    defect: Spins,
) -> Result<f64> {
    let nf = q.num_faces();
    check_faces(nf)?;
    let mut t_gamma = 0u64;
    for &f in order_white {
        t_gamma ^= 1 << (2 * f);
    }
    for &f in order_black {
        t_gamma ^= 1 << (2 * f + 1);
    }
    Ok(2.0
        * (0..1u64 << (2 * nf))
            .filter(|&t| psi(q, t) == defect)
            .map(|t| {
                let w = form_weight(x, t);
                if symplectic(t_gamma, t) == 0 {
                    w
                } else {
                    -w
                }
            })
            .sum::<f64>())
}

/// Normalized XOR law of forms drawn with prescribed defects, as a table over
/// all forms: the sum over `t1 + t2 = t` with `psi(t1) = d1`, `psi(t2) = d2`
/// of `w1(t1) w2(t2) / (z1 z2)`.
pub fn xor_with_defects(
    q: &Quadrangulation,
    x1: &[FaceWeights],
    x2: &[FaceWeights],
    d1: Spins,
    d2: Spins,
) -> Result<Vec<f64>> {
    let nf = q.num_faces();
    check_faces(nf)?;
    let z1 = super::partition_fn(q, x1)?;
    let z2 = super::partition_fn(q, x2)?;
    let all = 1u64 << (2 * nf);
    let s1: Vec<Form> = (0..all).filter(|&t| psi(q, t) == d1).collect();
    let s2: Vec<Form> = (0..all).filter(|&t| psi(q, t) == d2).collect();
    let mut out = vec![0.0; all as usize];
    for &t1 in &s1 {
        let w1 = form_weight(x1, t1) / z1;
        for &t2 in &s2 {
            out[(t1 ^ t2) as usize] += w1 * form_weight(x2, t2) / z2;
        }
    }
    Ok(out)
}

/// Defect set of a vertex subset, as a spin mask.
pub fn vertex_mask(vs: &[usize]) -> Spins {
    vs.iter().fold(0, |acc, &v| acc ^ 1 << v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad_graph::build_cube_sphere;

    #[test]
    fn constant_spins_in_kernel() {
        let q = build_cube_sphere();
        let blacks = vertex_mask(&q.blacks());
        let whites = vertex_mask(&q.whites());
        for s in [0, blacks, whites, blacks | whites] {
            assert_eq!(phi(&q, s), 0);
        }
    }

    #[test]
    fn adjointness_on_basis() {
        let q = build_cube_sphere();
        for v in 0..q.num_vertices() {
            for k in 0..2 * q.num_faces() {
                let s = 1u64 << v;
                let t = 1u64 << k;
                assert_eq!(symplectic(phi(&q, s), t), bilinear(s, psi(&q, t)));
            }
        }
    }

    #[test]
    fn exact_sequence() {
        let q = build_cube_sphere();
        let im = image_of_phi(&q).unwrap();
        let ker = kernel_of_psi(&q).unwrap();
        assert_eq!(im, ker);
        assert_eq!(rank(&im), q.num_vertices() - 2);
        assert_eq!(orthogonal(&im, q.num_faces()).unwrap(), im);
    }

    #[test]
    fn fourier_of_delta() {
        let mut g = vec![0.0; 1 << 8];
        g[0] = 1.0;
        let h = fourier(&g, 4).unwrap();
        assert!(h.iter().all(|&v| (v - 1.0 / 16.0).abs() < 1e-15));
        let naive = fourier_naive(&g, 4).unwrap();
        assert_eq!(h, naive);
    }
}
