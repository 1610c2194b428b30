//! Builtin fixtures, the JSON manifest format, and point sampling.
//!
//! A manifest describes either a chart presentation of `(M, g, φ, ξ, η, ε)`
//! or a hypersurface bundle (ambient `(g̃, J)` plus an embedding). Bundles
//! carry no metric of their own: it is induced.
//!
//! ```json
//! {
//!   "name": "E1",
//!   "dim": 3,
//!   "coords": ["x1", "x2", "y"],
//!   "epsilon": 1,
//!   "index": 0,
//!   "metric": ["1/(y*y)", "0", "0", "0", "1/(y*y)", "0", "0", "0", "1/(y*y)"],
//!   "phi": ["-1", "0", "0", "0", "-1", "0", "0", "0", "0"],
//!   "xi": ["0", "0", "y"],
//!   "eta": ["0", "0", "1/y"],
//!   "domain": [[-1, 1], [-1, 1], [0.2, 3]]
//! }
//! ```

use std::fmt;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::expr::{parse_expr, ParseError, ScalarExpr};
use crate::geometry::GeometryError;
use crate::hypersurface::{
    AmbientProductModel, Embedding, EmbeddingJets, HypersurfaceError, HypersurfacePoint,
};
use crate::jet::{eval_f64, jet_eval, EvalError};
use crate::paracontact::{ParacontactStructure, PointContext};
use crate::tensor::{MetricAtPoint, TensorValue};

/// Jet order for chart fields. Curvature consumes two orders and the
/// third-derivative checks one more.
pub const JET_ORDER: usize = 4;
/// Points at which a manifest's invariants are checked before acceptance.
pub const VALIDATION_POINTS: usize = 10;
const VALIDATION_SEED: u64 = 0x5eed;
/// Rejected draws allowed per requested sample point.
const MAX_REJECTIONS: usize = 100;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error("manifest syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("manifest field `{field}`: {source}")]
    Expression { field: String, source: ParseError },
    #[error("invalid model: {0}")]
    Invalid(String),
    #[error("declared index {declared} but metric has index {computed} at {point:?}")]
    IndexMismatch {
        declared: usize,
        computed: usize,
        point: Vec<f64>,
    },
    #[error("unknown model `{0}`")]
    UnknownModel(String),
    #[error("could not find {wanted} regular points in the domain ({rejected} draws rejected)")]
    Sampling { wanted: usize, rejected: usize },
    #[error("evaluation failed at {point:?}: {source}")]
    Eval { point: Vec<f64>, source: EvalError },
    #[error("geometry failed at {point:?}: {source}")]
    Geometry {
        point: Vec<f64>,
        source: GeometryError,
    },
    #[error(transparent)]
    Hypersurface(#[from] HypersurfaceError),
}

/// Chart presentation of a (possibly structured) semi-Riemannian manifold.
#[derive(Debug, Clone, PartialEq)]
pub struct ManifoldModel {
    pub name: String,
    pub coords: Vec<String>,
    pub epsilon: f64,
    pub index: usize,
    /// Row-major `g_ij`.
    pub metric: Vec<ScalarExpr>,
    /// Row-major `φ^i_j`.
    pub phi: Option<Vec<ScalarExpr>>,
    pub xi: Option<Vec<ScalarExpr>>,
    pub eta: Option<Vec<ScalarExpr>>,
    pub domain: Vec<(f64, f64)>,
}

/// A hypersurface `F: U → M̃` of an indefinite almost product manifold.
#[derive(Debug, Clone, PartialEq)]
pub struct HypersurfaceBundle {
    pub name: String,
    pub coords: Vec<String>,
    pub epsilon: f64,
    /// Declared index of the induced metric.
    pub index: usize,
    pub domain: Vec<(f64, f64)>,
    pub ambient: AmbientProductModel,
    pub embedding: Embedding,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Model {
    Manifold(ManifoldModel),
    Hypersurface(HypersurfaceBundle),
}

/// Everything evaluated at one sample point.
#[derive(Debug)]
pub enum ModelPoint {
    Manifold(PointContext),
    Hypersurface(Box<HypersurfacePoint>),
}

impl ModelPoint {
    /// Intrinsic context carrying the (induced) structure, if any.
    pub fn context(&self) -> Option<&PointContext> {
        match self {
            ModelPoint::Manifold(c) => Some(c),
            ModelPoint::Hypersurface(h) => h.induced.as_ref(),
        }
    }

    pub fn hypersurface(&self) -> Option<&HypersurfacePoint> {
        match self {
            ModelPoint::Manifold(_) => None,
            ModelPoint::Hypersurface(h) => Some(h),
        }
    }
}

impl Model {
    pub fn name(&self) -> &str {
        match self {
            Model::Manifold(m) => &m.name,
            Model::Hypersurface(b) => &b.name,
        }
    }

    pub fn dim(&self) -> usize {
        self.coords().len()
    }

    pub fn coords(&self) -> &[String] {
        match self {
            Model::Manifold(m) => &m.coords,
            Model::Hypersurface(b) => &b.coords,
        }
    }

    pub fn epsilon(&self) -> f64 {
        match self {
            Model::Manifold(m) => m.epsilon,
            Model::Hypersurface(b) => b.epsilon,
        }
    }

    pub fn index(&self) -> usize {
        match self {
            Model::Manifold(m) => m.index,
            Model::Hypersurface(b) => b.index,
        }
    }

    pub fn domain(&self) -> &[(f64, f64)] {
        match self {
            Model::Manifold(m) => &m.domain,
            Model::Hypersurface(b) => &b.domain,
        }
    }

    pub fn is_hypersurface(&self) -> bool {
        matches!(self, Model::Hypersurface(_))
    }

    /// Short human-readable description for `list-models`.
    pub fn summary(&self) -> String {
        let kind = match self {
            Model::Manifold(m) if m.phi.is_some() => "structured manifold",
            Model::Manifold(_) => "manifold",
            Model::Hypersurface(_) => "hypersurface bundle",
        };
        format!(
            "{kind}, dim {}, epsilon {:+}, index {}",
            self.dim(),
            self.epsilon(),
            self.index()
        )
    }

    /// Evaluates all fields at `point`.
    pub fn evaluate(&self, point: &[f64]) -> Result<ModelPoint, ModelError> {
        match self {
            Model::Manifold(m) => m.context(point).map(ModelPoint::Manifold),
            Model::Hypersurface(b) => {
                HypersurfacePoint::compute(&b.ambient, &b.embedding, point, JET_ORDER)
                    .map(|h| ModelPoint::Hypersurface(Box::new(h)))
                    .map_err(ModelError::from)
            }
        }
    }

    /// Index of the (induced) metric at `point`; also rejects points where
    /// the fields cannot be evaluated or the metric degenerates.
    pub fn metric_index_at(&self, point: &[f64]) -> Result<usize, ModelError> {
        match self {
            Model::Manifold(m) => m.metric_at(point).map(|g| g.index),
            Model::Hypersurface(b) => {
                let jets = EmbeddingJets::compute(&b.ambient, &b.embedding, point, 1)?;
                MetricAtPoint::new(jets.induced_metric.at_center())
                    .map(|g| g.index)
                    .map_err(|e| ModelError::Geometry {
                        point: point.to_vec(),
                        source: GeometryError::DegenerateMetric(e),
                    })
            }
        }
    }

    /// `count` regular points drawn uniformly from the domain box.
    pub fn sample_points(&self, count: usize, rng: &mut impl Rng) -> Result<Vec<Vec<f64>>, ModelError> {
        let mut points = Vec::with_capacity(count);
        let mut rejected = 0;
        while points.len() < count {
            let p: Vec<f64> = self
                .domain()
                .iter()
                .map(|&(lo, hi)| if lo == hi { lo } else { rng.gen_range(lo..=hi) })
                .collect();
            if self.metric_index_at(&p).is_ok() {
                points.push(p);
            } else {
                rejected += 1;
                if rejected > MAX_REJECTIONS * count.max(1) {
                    return Err(ModelError::Sampling {
                        wanted: count,
                        rejected,
                    });
                }
            }
        }
        Ok(points)
    }

    /// Checks the invariants of the model at [`VALIDATION_POINTS`] points.
    pub fn validate(&self) -> Result<(), ModelError> {
        let n = self.dim();
        let invalid = |s: String| Err(ModelError::Invalid(s));
        if n == 0 {
            return invalid("dimension must be positive".into());
        }
        if self.epsilon() != 1.0 && self.epsilon() != -1.0 {
            return invalid(format!("epsilon must be +1 or -1, got {}", self.epsilon()));
        }
        if self.index() > n {
            return invalid(format!("index {} exceeds dimension {n}", self.index()));
        }
        for (i, c) in self.coords().iter().enumerate() {
            if self.coords()[..i].contains(c) {
                return invalid(format!("coordinate `{c}` declared twice"));
            }
        }
        if self.domain().len() != n {
            return invalid(format!("domain has {} intervals, expected {n}", self.domain().len()));
        }
        for (c, &(lo, hi)) in self.coords().iter().zip(self.domain()) {
            if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
                return invalid(format!("domain interval for `{c}` is empty or unbounded: [{lo}, {hi}]"));
            }
        }
        match self {
            Model::Manifold(m) => m.validate_shapes()?,
            Model::Hypersurface(b) => b.validate_shapes()?,
        }
        let mut rng = ChaCha8Rng::seed_from_u64(VALIDATION_SEED);
        for p in self.sample_points(VALIDATION_POINTS, &mut rng)? {
            let computed = self.metric_index_at(&p)?;
            if computed != self.index() {
                return Err(ModelError::IndexMismatch {
                    declared: self.index(),
                    computed,
                    point: p,
                });
            }
        }
        Ok(())
    }
}

impl ManifoldModel {
    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    fn validate_shapes(&self) -> Result<(), ModelError> {
        let n = self.dim();
        let check = |field: &str, len: usize, want: usize| {
            if len == want {
                Ok(())
            } else {
                Err(ModelError::Invalid(format!("`{field}` has {len} entries, expected {want}")))
            }
        };
        check("metric", self.metric.len(), n * n)?;
        for i in 0..n {
            for j in 0..i {
                if self.metric[i * n + j] != self.metric[j * n + i] {
                    return Err(ModelError::Invalid(format!(
                        "metric is not symmetric as written: entry ({i},{j}) differs from ({j},{i})"
                    )));
                }
            }
        }
        match (&self.phi, &self.xi, &self.eta) {
            (Some(phi), Some(xi), Some(eta)) => {
                check("phi", phi.len(), n * n)?;
                check("xi", xi.len(), n)?;
                check("eta", eta.len(), n)
            }
            (None, None, None) => Ok(()),
            _ => Err(ModelError::Invalid("phi, xi and eta must be given together".into())),
        }
    }

    fn metric_at(&self, point: &[f64]) -> Result<MetricAtPoint, ModelError> {
        let n = self.dim();
        let values = self
            .metric
            .iter()
            .map(|e| eval_f64(e, point))
            .collect::<Result<Vec<_>, _>>()
            .map_err(|source| ModelError::Eval {
                point: point.to_vec(),
                source,
            })?;
        if values.iter().any(|v| !v.is_finite()) {
            return Err(ModelError::Invalid(format!("metric is not finite at {point:?}")));
        }
        let g = TensorValue::new(n, 0, 2, values).expect("shape validated");
        MetricAtPoint::new(g).map_err(|e| ModelError::Geometry {
            point: point.to_vec(),
            source: GeometryError::DegenerateMetric(e),
        })
    }

    /// Jets of every field at `point` and the derived connection.
    pub fn context(&self, point: &[f64]) -> Result<PointContext, ModelError> {
        let n = self.dim();
        let eval = |exprs: &[ScalarExpr], upper, lower| {
            let data = exprs
                .iter()
                .map(|e| jet_eval(e, point, JET_ORDER))
                .collect::<Result<Vec<_>, _>>()
                .map_err(|source| ModelError::Eval {
                    point: point.to_vec(),
                    source,
                })?;
            Ok::<_, ModelError>(TensorValue::new(n, upper, lower, data).expect("shape validated"))
        };
        let metric = eval(&self.metric, 0, 2)?;
        let structure = match (&self.phi, &self.xi, &self.eta) {
            (Some(phi), Some(xi), Some(eta)) => Some(ParacontactStructure {
                phi: eval(phi, 1, 1)?,
                xi: eval(xi, 1, 0)?,
                eta: eval(eta, 0, 1)?,
                epsilon: self.epsilon,
            }),
            _ => None,
        };
        PointContext::new(point.to_vec(), metric, structure).map_err(|source| ModelError::Geometry {
            point: point.to_vec(),
            source,
        })
    }
}

impl HypersurfaceBundle {
    fn validate_shapes(&self) -> Result<(), ModelError> {
        let n = self.coords.len();
        let m = self.ambient.dim();
        let invalid = |s: String| Err(ModelError::Invalid(s));
        if m != n + 1 {
            return invalid(format!("ambient has dimension {m}, expected {}", n + 1));
        }
        if self.ambient.metric.len() != m * m || self.ambient.j.len() != m * m {
            return invalid(format!("ambient metric and J need {} entries each", m * m));
        }
        for i in 0..m {
            for j in 0..i {
                if self.ambient.metric[i * m + j] != self.ambient.metric[j * m + i] {
                    return invalid(format!(
                        "ambient metric is not symmetric as written: entry ({i},{j}) differs from ({j},{i})"
                    ));
                }
            }
        }
        if self.embedding.map.len() != m {
            return invalid(format!("embedding has {} components, expected {m}", self.embedding.map.len()));
        }
        if self.embedding.orientation != 1.0 && self.embedding.orientation != -1.0 {
            return invalid("embedding orientation must be +1 or -1".into());
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------
// Builtin fixtures

fn names(coords: &[&str]) -> Vec<String> {
    coords.iter().map(|s| s.to_string()).collect()
}

fn parse_all(src: &[String], coords: &[String]) -> Vec<ScalarExpr> {
    src.iter()
        .map(|s| parse_expr(s, coords).unwrap_or_else(|e| panic!("builtin expression `{s}`: {e}")))
        .collect()
}

fn diagonal(entries: &[String]) -> Vec<String> {
    let n = entries.len();
    (0..n * n)
        .map(|k| if k / n == k % n { entries[k / n].clone() } else { "0".into() })
        .collect()
}

fn half_space_coords(n: usize) -> Vec<String> {
    let mut c: Vec<String> = (1..n).map(|i| format!("x{i}")).collect();
    c.push("y".into());
    c
}

/// Upper half-space with `g = y⁻²(Σdxᵢ² + ε dy²)`, `ξ = y∂_y`, `η = dy/y`
/// and `φ = −ε(I − η⊗ξ)`.
fn half_space(name: &str, n: usize, epsilon: f64, phi_scale: f64) -> ManifoldModel {
    let coords = half_space_coords(n);
    let mut g: Vec<String> = vec!["1/(y*y)".into(); n];
    if epsilon < 0.0 {
        g[n - 1] = "-1/(y*y)".into();
    }
    let mut phi: Vec<String> = vec![format!("{}", -epsilon * phi_scale); n];
    phi[n - 1] = "0".into();
    let mut xi = vec!["0".to_string(); n];
    xi[n - 1] = "y".into();
    let mut eta = vec!["0".to_string(); n];
    eta[n - 1] = "1/y".into();
    let mut domain = vec![(-1.0, 1.0); n];
    domain[n - 1] = (0.2, 3.0);
    ManifoldModel {
        name: name.into(),
        metric: parse_all(&diagonal(&g), &coords),
        phi: Some(parse_all(&diagonal(&phi), &coords)),
        xi: Some(parse_all(&xi, &coords)),
        eta: Some(parse_all(&eta, &coords)),
        coords,
        epsilon,
        index: usize::from(epsilon < 0.0),
        domain,
    }
}

fn flat_formal() -> ManifoldModel {
    let coords = names(&["x", "y", "z"]);
    let s = |v: &[&str]| v.iter().map(|s| s.to_string()).collect::<Vec<_>>();
    ManifoldModel {
        name: "F0".into(),
        metric: parse_all(&diagonal(&s(&["1", "1", "1"])), &coords),
        phi: Some(parse_all(&diagonal(&s(&["1", "-1", "0"])), &coords)),
        xi: Some(parse_all(&s(&["0", "0", "1"]), &coords)),
        eta: Some(parse_all(&s(&["0", "0", "1"]), &coords)),
        coords,
        epsilon: 1.0,
        index: 0,
        domain: vec![(-1.0, 1.0); 3],
    }
}

/// Flat `ℝ² × ℝ²` with `J = diag(I, −I)`.
fn flat_product_ambient() -> AmbientProductModel {
    let coords = names(&["x1", "x2", "x3", "x4"]);
    let s = |v: &[&str]| v.iter().map(|s| s.to_string()).collect::<Vec<_>>();
    AmbientProductModel {
        metric: parse_all(&diagonal(&s(&["1", "1", "1", "1"])), &coords),
        j: parse_all(&diagonal(&s(&["1", "1", "-1", "-1"])), &coords),
        coords,
        index: 0,
        k: Some(0.0),
    }
}

fn bundle(name: &str, coords: &[&str], map: &[&str], domain: Vec<(f64, f64)>) -> HypersurfaceBundle {
    let coords = names(coords);
    let map: Vec<String> = map.iter().map(|s| s.to_string()).collect();
    HypersurfaceBundle {
        name: name.into(),
        embedding: Embedding {
            map: parse_all(&map, &coords),
            orientation: 1.0,
        },
        coords,
        epsilon: 1.0,
        index: 0,
        domain,
        ambient: flat_product_ambient(),
    }
}

/// The builtin catalog, in listing order.
pub fn builtin_models() -> Vec<Model> {
    vec![
        Model::Manifold(half_space("E1", 3, 1.0, 1.0)),
        Model::Manifold(half_space("E1-5", 5, 1.0, 1.0)),
        Model::Manifold(half_space("E2", 3, -1.0, 1.0)),
        Model::Manifold(half_space("E2-5", 5, -1.0, 1.0)),
        Model::Manifold(half_space("N1", 3, 1.0, 1.01)),
        Model::Manifold(flat_formal()),
        Model::Hypersurface(bundle(
            "E3a",
            &["s", "t", "w"],
            &["s*sqrt(0.5)", "t", "-s*sqrt(0.5)", "w"],
            vec![(-1.0, 1.0); 3],
        )),
        Model::Hypersurface(bundle(
            "E3b",
            &["t", "theta", "psi"],
            &["t*cos(theta)", "t*sin(theta)", "t*cos(psi)", "t*sin(psi)"],
            vec![(0.8, 1.5), (-1.0, 1.0), (-1.0, 1.0)],
        )),
        Model::Hypersurface(bundle(
            "S1",
            &["a", "b", "c"],
            &["sqrt(4 - a*a - b*b - c*c)", "a", "b", "c"],
            vec![(-0.5, 0.5); 3],
        )),
    ]
}

pub fn builtin(name: &str) -> Option<Model> {
    builtin_models().into_iter().find(|m| m.name() == name)
}

// ---------------------------------------------------------------------
// Manifest format

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Manifest {
    name: String,
    dim: usize,
    coords: Vec<String>,
    epsilon: f64,
    index: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    metric: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    phi: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    xi: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    eta: Option<Vec<String>>,
    domain: Vec<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    ambient: Option<AmbientManifest>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    embedding: Option<EmbeddingManifest>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AmbientManifest {
    coords: Vec<String>,
    metric: Vec<String>,
    #[serde(rename = "J")]
    j: Vec<String>,
    #[serde(default)]
    index: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    k: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EmbeddingManifest {
    map: Vec<String>,
    #[serde(default = "positive")]
    orientation: f64,
}

fn positive() -> f64 {
    1.0
}

fn parse_field(field: &str, src: &[String], coords: &[String]) -> Result<Vec<ScalarExpr>, ModelError> {
    src.iter()
        .enumerate()
        .map(|(i, s)| {
            parse_expr(s, coords).map_err(|source| ModelError::Expression {
                field: format!("{field}[{i}]"),
                source,
            })
        })
        .collect()
}

fn show(exprs: &[ScalarExpr], coords: &[String]) -> Vec<String> {
    exprs.iter().map(|e| e.display(coords).to_string()).collect()
}

impl Manifest {
    fn into_model(self) -> Result<Model, ModelError> {
        if self.dim != self.coords.len() {
            return Err(ModelError::Invalid(format!(
                "dim is {} but {} coordinates are declared",
                self.dim,
                self.coords.len()
            )));
        }
        let coords = self.coords;
        let domain = self.domain.iter().map(|&[lo, hi]| (lo, hi)).collect();
        let opt = |field: &str, v: Option<Vec<String>>| {
            v.map(|v| parse_field(field, &v, &coords)).transpose()
        };
        match (self.ambient, self.embedding) {
            (None, None) => {
                let Some(metric) = self.metric else {
                    return Err(ModelError::Invalid("`metric` is required".into()));
                };
                Ok(Model::Manifold(ManifoldModel {
                    name: self.name,
                    metric: parse_field("metric", &metric, &coords)?,
                    phi: opt("phi", self.phi)?,
                    xi: opt("xi", self.xi)?,
                    eta: opt("eta", self.eta)?,
                    coords,
                    epsilon: self.epsilon,
                    index: self.index,
                    domain,
                }))
            }
            (Some(a), Some(e)) => {
                if self.metric.is_some() || self.phi.is_some() || self.xi.is_some() || self.eta.is_some() {
                    return Err(ModelError::Invalid(
                        "a hypersurface bundle induces its metric and structure; remove metric/phi/xi/eta".into(),
                    ));
                }
                let ambient = AmbientProductModel {
                    metric: parse_field("ambient.metric", &a.metric, &a.coords)?,
                    j: parse_field("ambient.J", &a.j, &a.coords)?,
                    coords: a.coords,
                    index: a.index,
                    k: a.k,
                };
                Ok(Model::Hypersurface(HypersurfaceBundle {
                    name: self.name,
                    embedding: Embedding {
                        map: parse_field("embedding.map", &e.map, &coords)?,
                        orientation: e.orientation,
                    },
                    coords,
                    epsilon: self.epsilon,
                    index: self.index,
                    domain,
                    ambient,
                }))
            }
            _ => Err(ModelError::Invalid(
                "`ambient` and `embedding` must be given together".into(),
            )),
        }
    }

    fn from_model(model: &Model) -> Manifest {
        let coords = model.coords().to_vec();
        let domain = model.domain().iter().map(|&(lo, hi)| [lo, hi]).collect();
        let base = |metric, phi, xi, eta, ambient, embedding| Manifest {
            name: model.name().to_string(),
            dim: model.dim(),
            coords: coords.clone(),
            epsilon: model.epsilon(),
            index: model.index(),
            metric,
            phi,
            xi,
            eta,
            domain,
            ambient,
            embedding,
        };
        match model {
            Model::Manifold(m) => base(
                Some(show(&m.metric, &coords)),
                m.phi.as_ref().map(|v| show(v, &coords)),
                m.xi.as_ref().map(|v| show(v, &coords)),
                m.eta.as_ref().map(|v| show(v, &coords)),
                None,
                None,
            ),
            Model::Hypersurface(b) => base(
                None,
                None,
                None,
                None,
                Some(AmbientManifest {
                    metric: show(&b.ambient.metric, &b.ambient.coords),
                    j: show(&b.ambient.j, &b.ambient.coords),
                    coords: b.ambient.coords.clone(),
                    index: b.ambient.index,
                    k: b.ambient.k,
                }),
                Some(EmbeddingManifest {
                    map: show(&b.embedding.map, &coords),
                    orientation: b.embedding.orientation,
                }),
            ),
        }
    }
}

/// Parses and validates a manifest document.
pub fn parse_manifest(text: &str) -> Result<Model, ModelError> {
    let manifest: Manifest = serde_json::from_str(text).map_err(|e| ModelError::Syntax {
        line: e.line(),
        column: e.column(),
        message: strip_position(&e.to_string()),
    })?;
    let model = manifest.into_model()?;
    model.validate()?;
    Ok(model)
}

fn strip_position(message: &str) -> String {
    match message.rfind(" at line ") {
        Some(i) => message[..i].to_string(),
        None => message.to_string(),
    }
}

pub fn load_manifest(path: &Path) -> Result<Model, ModelError> {
    let text = std::fs::read_to_string(path).map_err(|e| ModelError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    parse_manifest(&text)
}

/// Serializes a model as a pretty-printed manifest.
pub fn manifest_json(model: &Model) -> String {
    serde_json::to_string_pretty(&Manifest::from_model(model)).expect("manifest is serializable")
}

/// A builtin name or a path to a manifest.
pub fn resolve_model(name_or_path: &str) -> Result<Model, ModelError> {
    if let Some(m) = builtin(name_or_path) {
        return Ok(m);
    }
    let path = Path::new(name_or_path);
    if path.exists() {
        load_manifest(path)
    } else {
        Err(ModelError::UnknownModel(name_or_path.to_string()))
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:<6} {}", self.name(), self.summary())
    }
}
