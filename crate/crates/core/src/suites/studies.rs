//! Numerical studies behind the data commands: decay scans of the local
//! inverses, edge probability tables and the free energy with its finite
//! torus sequence.

use super::zinv::vertical_path;
use super::{angles_json, random_field, rel_err, rng};
use crate::brute_force::{enumerate_configs, partition_fn};
use crate::error::{Error, Result};
use crate::kasteleyn::Kasteleyn;
use crate::quad_graph::{build_square_torus, corner_angles, Quadrangulation, Surface};
use crate::weights::ff_weights;
use crate::torus_spectral::{
    amoeba_sample, finite_free_energy, free_energy, AmoebaCloud, AmoebaGrid, FreeEnergy, SpectralSampler,
};
use crate::z_invariant::asymptotics::HYPOTHESIS_EPS;
use crate::z_invariant::{
    asymptotic_prediction, chi, decay_fit, kinv6v_entry, u0, ContourSpec, DecayFit, LocalInverse, RhombicLattice, Site,
    ZInvWeights,
};
use serde::Serialize;

/// Start, cap and stopping tolerance of the free-energy quadrature.
pub const QUADRATURE_START: usize = 16;
pub const QUADRATURE_CAP: usize = 4096;
pub const QUADRATURE_TOL: f64 = 1e-6;

fn check_regime(k2: f64, l2: f64) -> Result<(f64, f64)> {
    if !(0.0 <= k2 && k2 < l2 && l2 < 1.0) {
        return Err(Error::Regime(format!(
            "the infinite-volume measure needs 0 <= k < l < 1, got k^2 = {k2}, l^2 = {l2}"
        )));
    }
    Ok((k2.sqrt(), l2.sqrt()))
}

#[derive(Clone, Debug, Serialize)]
pub struct DecayRow {
    pub r: usize,
    /// `log |K^{-1}_{k,l}[w, b]|`, or the six-vertex entry when no `l` is given.
    pub log_abs: f64,
    /// Six-vertex entries of both moduli.
    pub log_abs_k: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub log_abs_l: Option<f64>,
    /// Saddle-point value of the six-vertex entry of modulus `k`, absent when
    /// the end directions are within the hypothesis margin of the saddle.
    pub prediction: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct DecayStudy {
    pub k: f64,
    pub l: Option<f64>,
    pub rows: Vec<DecayRow>,
    /// Rate `chi(u0)` of the straight path, per unit length.
    pub rate_k: Option<f64>,
    pub rate_l: Option<f64>,
    pub fit: DecayFit,
    pub fit_k: DecayFit,
    pub fit_l: Option<DecayFit>,
    pub hypothesis_eps: f64,
}

impl DecayStudy {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("r,log_abs,prediction\n");
        for row in &self.rows {
            let pred = row.prediction.map(|p| p.to_string()).unwrap_or_default();
            s.push_str(&format!("{},{},{}\n", row.r, row.log_abs, pred));
        }
        s
    }
}

fn rate(k: f64, r: usize) -> Result<Option<f64>> {
    if k == 0.0 {
        return Ok(None);
    }
    let p = vertical_path(&RhombicLattice::square(), r as i64, 0)?.2;
    Ok(Some(chi(&p, u0(&p, k)?, k)?))
}

/// Entries between the vertical edge at the origin and the vertical edge at
/// `(r, 0)` on the square lattice, with fits of their decay rate.
pub fn decay_study(k: f64, l: Option<f64>, rs: &[usize]) -> Result<DecayStudy> {
    let lat = RhombicLattice::square();
    let spec = ContourSpec::default();
    let ends: Vec<(Site, Site, _)> = rs.iter().map(|&r| vertical_path(&lat, r as i64, 0)).collect::<Result<_>>()?;
    let six = |m: f64| -> Result<Vec<f64>> {
        ends.iter().map(|(b, w, _)| Ok(kinv6v_entry(&lat, *b, *w, m, &spec)?.norm().ln())).collect()
    };
    let series_k = six(k)?;
    let series_l = l.map(six).transpose()?;
    let eight = match l {
        Some(l) => {
            let li = LocalInverse::new(lat, k, l, spec)?;
            let pairs: Vec<(Site, Site)> = ends.iter().map(|(b, w, _)| (*w, *b)).collect();
            Some(li.entries(&pairs)?.iter().map(|v| v.norm().ln()).collect::<Vec<f64>>())
        }
        None => None,
    };
    let mut rows = Vec::with_capacity(rs.len());
    for (j, (b, _, p)) in ends.iter().enumerate() {
        let prediction = if k > 0.0 {
            asymptotic_prediction(p, lat.site_theta(*b), k, HYPOTHESIS_EPS).ok().map(|v| v.norm().ln())
        } else {
            None
        };
        rows.push(DecayRow {
            r: rs[j],
            log_abs: eight.as_ref().map_or(series_k[j], |e| e[j]),
            log_abs_k: series_k[j],
            log_abs_l: series_l.as_ref().map(|s| s[j]),
            prediction,
        });
    }
    let r_max = rs.iter().copied().max().unwrap_or(1);
    Ok(DecayStudy {
        k,
        l,
        rate_k: rate(k, r_max)?,
        rate_l: l.map(|l| rate(l, r_max)).transpose()?.flatten(),
        fit: decay_fit(rs, &rows.iter().map(|r| r.log_abs).collect::<Vec<_>>())?,
        fit_k: decay_fit(rs, &series_k)?,
        fit_l: series_l.as_ref().map(|s| decay_fit(rs, s)).transpose()?,
        rows,
        hypothesis_eps: HYPOTHESIS_EPS,
    })
}

/// Decay study in the probabilistic regime, from the squared moduli.
pub fn decay_study_regime(k2: f64, l2: f64, rs: &[usize]) -> Result<DecayStudy> {
    let (k, l) = check_regime(k2, l2)?;
    decay_study(k, Some(l), rs)
}

#[derive(Clone, Debug, Serialize)]
pub struct EdgeRow {
    pub k: f64,
    pub l: f64,
    /// Edges named by one decoration vertex each, as `[x, y, i]`.
    pub edges: Vec<[i64; 3]>,
    pub probability: f64,
}

/// Probabilities that all edges of each set are occupied, for each `k^2`.
pub fn edge_table(k2s: &[f64], l2: f64, sets: &[Vec<Site>]) -> Result<Vec<EdgeRow>> {
    let mut out = Vec::new();
    for &k2 in k2s {
        let (k, l) = check_regime(k2, l2)?;
        let li = LocalInverse::new(RhombicLattice::square(), k, l, ContourSpec::default())?;
        for set in sets {
            out.push(EdgeRow {
                k,
                l,
                edges: set.iter().map(|s| [s.x, s.y, s.i as i64]).collect(),
                probability: li.edge_probability(set)?,
            });
        }
    }
    Ok(out)
}

pub fn edge_table_csv(rows: &[EdgeRow]) -> String {
    let mut s = String::from("k,l,edges,probability\n");
    for r in rows {
        let e: Vec<String> = r.edges.iter().map(|v| format!("{}:{}:{}", v[0], v[1], v[2])).collect();
        s.push_str(&format!("{},{},{},{}\n", r.k, r.l, e.join(" "), r.probability));
    }
    s
}

#[derive(Clone, Debug, Serialize)]
pub struct FiniteTorus {
    /// Number of fundamental domains along each side.
    pub n: usize,
    pub value: f64,
    pub gap: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct FreeEnergyStudy {
    pub k2: f64,
    pub l2: f64,
    /// Free energy per 2 x 2 fundamental domain.
    pub quadrature: FreeEnergy,
    pub finite: Vec<FiniteTorus>,
    pub monotone: bool,
    /// Error of the shift `-4 log(lambda)` after scaling every weight by `lambda = 2`.
    pub gauge_shift_error: f64,
}

/// Free energy of the elliptic weights on the square lattice, with the
/// sequence `-(1/n^2) log Z` on tori of `n x n` fundamental domains.
pub fn free_energy_study(k2: f64, l2: f64, ns: &[usize]) -> Result<FreeEnergyStudy> {
    let weights = ZInvWeights::new(k2, l2)?;
    let theta = std::f64::consts::FRAC_PI_4;
    let q = build_square_torus(2, 2)?;
    let field = weights.field(&vec![theta; q.num_faces()])?;
    let sampler = SpectralSampler::new(&q, field.clone())?;
    let quadrature = free_energy(&sampler, QUADRATURE_START, QUADRATURE_CAP, QUADRATURE_TOL)?;
    let scaled = SpectralSampler::new(&q, field.iter().map(|w| w.scaled(2.0)).collect())?;
    let shifted = free_energy(&scaled, QUADRATURE_START, QUADRATURE_CAP, QUADRATURE_TOL)?;
    let gauge_shift_error = (shifted.value - (quadrature.value - 4.0 * 2f64.ln())).abs();
    let mut finite = Vec::with_capacity(ns.len());
    for &n in ns {
        let qn = build_square_torus(2 * n, 2 * n)?;
        let sn = SpectralSampler::new(&qn, weights.field(&vec![theta; qn.num_faces()])?)?;
        let value = finite_free_energy(&sn.kast, &sn.weights, n * n)?;
        finite.push(FiniteTorus { n, value, gap: (value - quadrature.value).abs() });
    }
    let monotone = finite.windows(2).all(|w| w[1].gap < w[0].gap);
    Ok(FreeEnergyStudy { k2, l2, quadrature, finite, monotone, gauge_shift_error })
}

#[derive(Clone, Debug, Serialize)]
pub struct OracleReport {
    pub surface: Surface,
    pub faces: usize,
    pub configurations: usize,
    pub angles: serde_json::Value,
    pub partition_function: f64,
    /// Pfaffian value on spheres and tori with an embedding.
    pub pfaffian: Option<f64>,
    pub rel_err: Option<f64>,
}

/// Brute-force partition function of a seeded random free-fermion field,
/// next to its Pfaffian formula when one applies.
pub fn oracle_report(q: &Quadrangulation, seed: u64) -> Result<OracleReport> {
    let angles = random_field(&mut rng(seed), q.num_faces());
    let x = ff_weights(&angles);
    let z = partition_fn(q, &x)?;
    let pfaffian = match (q.surface, corner_angles(q)) {
        (Surface::Sphere, Ok(phi)) => Some(Kasteleyn::new(q, &phi)?.sphere_partition(&x)?),
        (Surface::Torus, Ok(phi)) => Some(Kasteleyn::new(q, &phi)?.torus_partition(&x)?),
        _ => None,
    };
    Ok(OracleReport {
        surface: q.surface,
        faces: q.num_faces(),
        configurations: enumerate_configs(q)?.len(),
        angles: angles_json(&angles),
        partition_function: z,
        pfaffian,
        rel_err: pfaffian.map(|p| rel_err(p, z)),
    })
}

/// Amoeba points of the elliptic weights at angle `theta` on every face of a torus.
pub fn amoeba_study(q: &Quadrangulation, k2: f64, l2: f64, theta: f64, grid: &AmoebaGrid) -> Result<AmoebaCloud> {
    if q.surface != Surface::Torus {
        return Err(Error::Surface(format!("the amoeba needs a toric graph, got {:?}", q.surface)));
    }
    let angles = ZInvWeights::new(k2, l2)?.angles(theta)?;
    let kast = Kasteleyn::new(q, &corner_angles(q)?)?;
    amoeba_sample(&kast, &vec![angles; q.num_faces()], grid)
}
