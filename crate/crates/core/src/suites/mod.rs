//! Verification suites shared by the command line, the bindings and the
//! acceptance tests. Each suite draws all randomness from one seeded
//! generator and returns a serializable report holding its tolerances and
//! the parameters of every failing instance.

mod brute;
mod kasteleyn;
mod spectral;
pub mod studies;
mod zinv;

use crate::brute_force::{compare_up_to_sign, SignMatch};
use crate::error::{Error, Result};
use crate::quad_graph::{build_cube_sphere, build_square_torus, GraphSpec, Quadrangulation, Surface};
use crate::weights::Angles;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use std::collections::BTreeMap;

pub const SUITES: [&str; 13] = [
    "switching",
    "xor",
    "duality",
    "spin-vertex",
    "kasteleyn-sphere",
    "kasteleyn-torus",
    "poly-switch",
    "factorization",
    "ybe",
    "local-inverse",
    "monotonicity",
    "exponent",
    "forms",
];

/// Options of a suite run; unset fields take the suite defaults.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct SuiteConfig {
    /// Builtin name (`cube`, `torus`, `torus:MxN`) or path to a JSON graph.
    pub graph: Option<String>,
    pub seed: u64,
    /// Overrides the tolerance of the main identity of the suite.
    pub tol: Option<f64>,
    pub k2: Option<f64>,
    pub l2: Option<f64>,
    pub trials: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Bound {
    AtMost,
    AtLeast,
}

/// One named check aggregated over all its instances.
#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub bound: Bound,
    pub limit: f64,
    /// Largest value for `at_most` checks, smallest for `at_least` ones.
    pub worst: f64,
    pub instances: usize,
    pub pass: bool,
}

/// A failing instance, with what is needed to replay it.
#[derive(Clone, Debug, Serialize)]
pub struct Failure {
    pub check: String,
    pub value: f64,
    pub limit: f64,
    pub params: Value,
}

/// Left and right sides of one identity instance.
#[derive(Clone, Debug, Serialize)]
pub struct IdentityRecord {
    pub identity: String,
    pub lhs: f64,
    pub rhs: f64,
    pub rel_err: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sign: Option<SignMatch>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub graph: Option<String>,
    pub seed: u64,
    /// Tolerance of the main identity.
    pub tol: f64,
    pub pass: bool,
    pub checks: Vec<Check>,
    pub metrics: BTreeMap<String, Value>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub identities: Vec<IdentityRecord>,
    pub failures: Vec<Failure>,
}

impl SuiteReport {
    /// One human-readable line.
    pub fn summary(&self) -> String {
        let failed: Vec<&str> = self.checks.iter().filter(|c| !c.pass).map(|c| c.name.as_str()).collect();
        let main = self
            .checks
            .iter()
            .find(|c| c.bound == Bound::AtMost)
            .map(|c| format!(", {} worst {:.3e} (limit {:.0e})", c.name, c.worst, c.limit))
            .unwrap_or_default();
        if failed.is_empty() {
            format!("{}: PASS ({} checks{main})", self.suite, self.checks.len())
        } else {
            format!("{}: FAIL ({} of {} checks failed: {})", self.suite, failed.len(), self.checks.len(), failed.join(", "))
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Accumulates checks, identity records and metrics while a suite runs.
pub(crate) struct Recorder {
    checks: Vec<Check>,
    failures: Vec<Failure>,
    identities: Vec<IdentityRecord>,
    metrics: BTreeMap<String, Value>,
}

impl Recorder {
    fn new() -> Self {
        Recorder { checks: Vec::new(), failures: Vec::new(), identities: Vec::new(), metrics: BTreeMap::new() }
    }

    fn record(&mut self, name: &str, bound: Bound, value: f64, limit: f64, params: impl FnOnce() -> Value) {
        let ok = match bound {
            Bound::AtMost => value <= limit,
            Bound::AtLeast => value >= limit,
        };
        let idx = match self.checks.iter().position(|c| c.name == name) {
            Some(i) => i,
            None => {
                self.checks.push(Check {
                    name: name.to_string(),
                    bound,
                    limit,
                    worst: value,
                    instances: 0,
                    pass: true,
                });
                self.checks.len() - 1
            }
        };
        let c = &mut self.checks[idx];
        c.instances += 1;
        let worse = match bound {
            Bound::AtMost => !(value <= c.worst),
            Bound::AtLeast => !(value >= c.worst),
        };
        if worse || c.instances == 1 {
            c.worst = value;
        }
        if !ok {
            c.pass = false;
            self.failures.push(Failure { check: name.to_string(), value, limit, params: params() });
        }
    }

    pub(crate) fn at_most(&mut self, name: &str, value: f64, limit: f64, params: impl FnOnce() -> Value) {
        self.record(name, Bound::AtMost, value, limit, params)
    }

    pub(crate) fn at_least(&mut self, name: &str, value: f64, limit: f64, params: impl FnOnce() -> Value) {
        self.record(name, Bound::AtLeast, value, limit, params)
    }

    pub(crate) fn holds(&mut self, name: &str, ok: bool, params: impl FnOnce() -> Value) {
        self.record(name, Bound::AtLeast, if ok { 1.0 } else { 0.0 }, 1.0, params)
    }

    /// Exact identity `lhs = rhs` up to relative error `tol`.
    pub(crate) fn identity(&mut self, name: &str, lhs: f64, rhs: f64, tol: f64, params: impl FnOnce() -> Value) {
        let err = rel_err(lhs, rhs);
        self.identities.push(IdentityRecord { identity: name.to_string(), lhs, rhs, rel_err: err, sign: None });
        self.at_most(name, err, tol, params);
    }

    /// Identity holding up to a global sign; the error is that of `|lhs| = |rhs|`.
    pub(crate) fn identity_up_to_sign(&mut self, name: &str, lhs: f64, rhs: f64, tol: f64, params: impl FnOnce() -> Value) {
        let err = rel_err(lhs.abs(), rhs.abs());
        let sign = compare_up_to_sign(lhs, rhs, tol);
        self.identities.push(IdentityRecord { identity: name.to_string(), lhs, rhs, rel_err: err, sign: Some(sign) });
        self.at_most(name, err, tol, params);
    }

    pub(crate) fn metric(&mut self, name: &str, value: impl Serialize) {
        self.metrics.insert(name.to_string(), serde_json::to_value(value).unwrap_or(Value::Null));
    }

    fn finish(self, suite: &str, cfg: &SuiteConfig, graph: Option<String>, tol: f64) -> SuiteReport {
        SuiteReport {
            suite: suite.to_string(),
            graph,
            seed: cfg.seed,
            tol,
            pass: self.checks.iter().all(|c| c.pass),
            checks: self.checks,
            metrics: self.metrics,
            identities: self.identities,
            failures: self.failures,
        }
    }
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

pub(crate) fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Angle strictly inside `(0, pi/2)`, away from the ends.
pub(crate) fn open_quarter(r: &mut ChaCha8Rng) -> f64 {
    r.random_range(0.05..1.52)
}

pub(crate) fn random_field(r: &mut ChaCha8Rng, n: usize) -> Vec<Angles> {
    (0..n).map(|_| Angles::new(open_quarter(r), open_quarter(r))).collect()
}

/// Field in the probability regime `0 < alpha <= beta < pi/2`.
pub(crate) fn ordered_field(r: &mut ChaCha8Rng, n: usize) -> Vec<Angles> {
    (0..n)
        .map(|_| {
            let a = open_quarter(r);
            let b = open_quarter(r);
            Angles::new(a.min(b), a.max(b))
        })
        .collect()
}

pub(crate) fn angles_json(t: &[Angles]) -> Value {
    json!(t.iter().map(|a| [a.alpha, a.beta]).collect::<Vec<_>>())
}

/// Builtin graph or JSON file.
pub fn resolve_graph(name: &str) -> Result<Quadrangulation> {
    match name {
        "cube" => return Ok(build_cube_sphere()),
        "torus" => return build_square_torus(2, 2),
        _ => {}
    }
    if let Some(dims) = name.strip_prefix("torus:") {
        let parsed: Option<(usize, usize)> = dims
            .split_once('x')
            .and_then(|(m, n)| Some((m.parse().ok()?, n.parse().ok()?)));
        let (m, n) = parsed.ok_or_else(|| Error::Argument(format!("torus size must read MxN, got {dims}")))?;
        return build_square_torus(m, n);
    }
    let text = std::fs::read_to_string(name)
        .map_err(|e| Error::Argument(format!("graph {name} is neither builtin nor a readable file: {e}")))?;
    let spec: GraphSpec = serde_json::from_str(&text)?;
    Quadrangulation::from_spec(&spec)
}

pub(crate) fn require_surface(q: &Quadrangulation, surface: Surface, suite: &str) -> Result<()> {
    if q.surface != surface {
        return Err(Error::Surface(format!("suite {suite} needs a {surface:?} graph, got {:?}", q.surface)));
    }
    Ok(())
}

/// Runs the named suite.
pub fn run_suite(name: &str, cfg: &SuiteConfig) -> Result<SuiteReport> {
    let default_graph = match name {
        "kasteleyn-torus" | "poly-switch" | "factorization" => Some("torus"),
        "switching" | "xor" | "duality" | "spin-vertex" | "kasteleyn-sphere" | "forms" => Some("cube"),
        _ => None,
    };
    let graph = cfg.graph.clone().or(default_graph.map(String::from));
    let mut rec = Recorder::new();
    let q = match (&graph, default_graph) {
        (Some(g), Some(_)) => Some(resolve_graph(g)?),
        (Some(_), None) => return Err(Error::Argument(format!("suite {name} does not take a graph"))),
        _ => None,
    };
    let tol = match (name, &q) {
        ("switching", Some(q)) => brute::switching(q, cfg, &mut rec)?,
        ("xor", Some(q)) => brute::xor(q, cfg, &mut rec)?,
        ("duality", Some(q)) => brute::duality(q, cfg, &mut rec)?,
        ("spin-vertex", Some(q)) => brute::spin_vertex(q, cfg, &mut rec)?,
        ("forms", Some(q)) => brute::forms(q, cfg, &mut rec)?,
        ("kasteleyn-sphere", Some(q)) => kasteleyn::sphere(q, cfg, &mut rec)?,
        ("kasteleyn-torus", Some(q)) => kasteleyn::torus(q, cfg, &mut rec)?,
        ("poly-switch", Some(q)) => spectral::poly_switch(q, cfg, &mut rec)?,
        ("factorization", Some(q)) => spectral::factorization(q, cfg, &mut rec)?,
        ("ybe", None) => zinv::ybe(cfg, &mut rec)?,
        ("local-inverse", None) => zinv::local_inverse(cfg, &mut rec)?,
        ("monotonicity", None) => zinv::monotonicity(cfg, &mut rec)?,
        ("exponent", None) => zinv::exponent(cfg, &mut rec)?,
        _ => {
            return Err(Error::Argument(format!(
                "unknown suite {name}; expected one of {}",
                SUITES.join(", ")
            )))
        }
    };
    Ok(rec.finish(name, cfg, graph, tol))
}
