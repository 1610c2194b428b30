//! Hypersurfaces of indefinite almost product manifolds `(M̃, g̃, J)`.
//!
//! For an embedding `F: U ⊂ ℝⁿ → M̃` with unit normal `N`, the structure
//! induced by `JN = ξ` and `JX = φX + η(X)N` is an (ε)-almost paracontact
//! metric structure with `ε = g̃(N,N)`. This module builds that structure as
//! jets in the chart coordinates, computes the shape operator from the
//! Weingarten formula `∇̃_X N = −AX`, and checks the identities relating the
//! two. The second fundamental form is `h(X,Y) = εg(AX,Y)`, and the Gauss
//! formula reads `∇̃_X Y = ∇_X Y + h(X,Y)N`, i.e. `g̃(∇̃_X Y, N) = εh(X,Y)`.
//!
//! A pointwise tangent-space model of the almost-constant-curvature Gauss
//! equation lives at the end of the module (`synthetic_gauss_check`).

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::einstein::{fit_einstein_like, min_norm_solve, FitSample};
use crate::expr::ScalarExpr;
use crate::geometry::{invert_metric, Connection, Curvature, GeometryError};
use crate::jet::{eval_with, jet_eval, EvalError, Jet};
use crate::paracontact::{
    para_sasakian_rhs, CurvatureAtPoint, ParacontactStructure, PointContext, StructureAtPoint,
    StructureDerivatives,
};
use crate::report::{
    CheckDef, Measurement, TOL_ALGEBRAIC, TOL_EXACT, TOL_FIRST_ORDER, TOL_SECOND_ORDER,
    TOL_THIRD_ORDER,
};
use crate::tensor::{Frame, MetricAtPoint, TensorValue};

/// `|g̃(JN,N)|` above this means `JN` is not tangent.
pub const TANGENCY_TOLERANCE: f64 = 1e-8;
/// Normals with `|g̃(N,N)| / (‖N‖‖g̃N‖)` below this are treated as null.
pub const LIGHTLIKE_TOLERANCE: f64 = 1e-6;
/// Jet order used for ambient fields at the image point.
const AMBIENT_ORDER: usize = 3;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HypersurfaceError {
    #[error("evaluation failed at {point:?}: {source}")]
    Eval { point: Vec<f64>, source: EvalError },
    #[error("geometry failed at {point:?}: {source}")]
    Geometry {
        point: Vec<f64>,
        source: GeometryError,
    },
    #[error("embedding differential has rank < {dim} at {point:?}")]
    RankDeficient { point: Vec<f64>, dim: usize },
    #[error("normal direction is lightlike at {point:?} (ratio {ratio:.3e}); unsupported")]
    LightlikeNormal { point: Vec<f64>, ratio: f64 },
    #[error("JN not tangent at {point:?}: g̃(JN,N) = {value:.3e}")]
    JnNotTangent { point: Vec<f64>, value: f64 },
    #[error("embedding has {got} components, ambient has dimension {want}")]
    Dimension { got: usize, want: usize },
}

/// An (n+1)-dimensional ambient `(g̃, J)` given by chart expressions.
#[derive(Debug, Clone, PartialEq)]
pub struct AmbientProductModel {
    pub coords: Vec<String>,
    /// Row-major `g̃_AB`.
    pub metric: Vec<ScalarExpr>,
    /// Row-major `J^A_B`.
    pub j: Vec<ScalarExpr>,
    pub index: usize,
    /// Almost-constant-curvature constant, when the ambient claims one.
    pub k: Option<f64>,
}

impl AmbientProductModel {
    pub fn dim(&self) -> usize {
        self.coords.len()
    }
}

/// `F: chart → ambient`, one expression per ambient coordinate.
#[derive(Debug, Clone, PartialEq)]
pub struct Embedding {
    pub map: Vec<ScalarExpr>,
    /// `+1` or `−1`, applied after the canonical orientation.
    pub orientation: f64,
}

/// Ambient data at the image point `F(u)`, in ambient coordinates.
#[derive(Debug)]
pub struct AmbientAtPoint {
    pub ctx: PointContext,
    pub j: TensorValue<Jet>,
    pub j_num: DMatrix<f64>,
    pub g: DMatrix<f64>,
    /// `[A, B, C]`: `(∇̃_C J)^A_B`.
    pub nabla_j: TensorValue<f64>,
    /// `Γ̃^A_{BC}`.
    pub gamma: TensorValue<f64>,
    pub riemann_lowered: TensorValue<f64>,
}

impl AmbientAtPoint {
    pub fn compute(amb: &AmbientProductModel, x: &[f64]) -> Result<AmbientAtPoint, HypersurfaceError> {
        let m = amb.dim();
        let ev = |e: &ScalarExpr| {
            jet_eval(e, x, AMBIENT_ORDER).map_err(|source| HypersurfaceError::Eval {
                point: x.to_vec(),
                source,
            })
        };
        let g = TensorValue::new(m, 0, 2, amb.metric.iter().map(ev).collect::<Result<_, _>>()?)
            .map_err(|e| geo(x, e.into()))?;
        let j = TensorValue::new(m, 1, 1, amb.j.iter().map(ev).collect::<Result<_, _>>()?)
            .map_err(|e| geo(x, e.into()))?;
        let ctx = PointContext::new(x.to_vec(), g, None).map_err(|e| geo(x, e))?;
        let nabla_j = ctx.conn.covariant_derivative(&j).map_err(|e| geo(x, e))?.at_center();
        let curv = ctx.curvature().map_err(|e| geo(x, e))?;
        let riemann_lowered = curv.riemann_lowered.at_center();
        let gamma = ctx.conn.gamma.at_center();
        let g_num = ctx.metric().matrix();
        Ok(AmbientAtPoint {
            j_num: j.at_center().to_matrix(),
            j,
            g: g_num,
            nabla_j,
            gamma,
            riemann_lowered,
            ctx,
        })
    }

    /// Almost-constant-curvature tensor divided by `k`:
    /// `g̃(Y,Z)g̃(X,W) − g̃(X,Z)g̃(Y,W) + g̃(JY,Z)g̃(JX,W) − g̃(JX,Z)g̃(JY,W)`.
    pub fn ansatz_unit(&self) -> TensorValue<f64> {
        almost_constant_unit(&self.g, &self.j_num)
    }
}

fn geo(point: &[f64], source: GeometryError) -> HypersurfaceError {
    HypersurfaceError::Geometry {
        point: point.to_vec(),
        source,
    }
}

/// Unit ansatz tensor for metric `g` and product structure `j`.
pub fn almost_constant_unit(g: &DMatrix<f64>, j: &DMatrix<f64>) -> TensorValue<f64> {
    let m = g.nrows();
    // g(JY, Z) = (J^T g)[y, z]
    let jg = j.transpose() * g;
    TensorValue::from_fn(m, 0, 4, |i| {
        let (x, y, z, w) = (i[0], i[1], i[2], i[3]);
        g[(y, z)] * g[(x, w)] - g[(x, z)] * g[(y, w)] + jg[(y, z)] * jg[(x, w)]
            - jg[(x, z)] * jg[(y, w)]
    })
}

/// Jets of the embedding and everything derived from it at one chart point.
#[derive(Debug, Clone)]
pub struct EmbeddingJets {
    pub point: Vec<f64>,
    pub ambient_point: Vec<f64>,
    /// `F^A`, order `K + 1`.
    pub map: Vec<Jet>,
    /// `tangents[i][A] = ∂_i F^A`.
    pub tangents: Vec<Vec<Jet>>,
    pub ambient_metric: TensorValue<Jet>,
    pub j: TensorValue<Jet>,
    pub induced_metric: TensorValue<Jet>,
    pub induced_inverse: TensorValue<Jet>,
    /// Unit normal `N^A`.
    pub normal: Vec<Jet>,
    pub epsilon: f64,
    /// `g̃(JN, N)` at the point.
    pub jn_normal: f64,
}

fn determinant(m: &[Vec<Jet>]) -> Jet {
    let n = m.len();
    if n == 1 {
        return m[0][0].clone();
    }
    let mut acc = m[0][0].zero_like();
    for col in 0..n {
        let minor: Vec<Vec<Jet>> = m[1..]
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|(c, _)| *c != col)
                    .map(|(_, j)| j.clone())
                    .collect()
            })
            .collect();
        let term = m[0][col].times(&determinant(&minor));
        acc = if col % 2 == 0 { acc.plus(&term) } else { acc.minus(&term) };
    }
    acc
}

fn pair(g: &TensorValue<Jet>, x: &[Jet], y: &[Jet]) -> Jet {
    let m = x.len();
    let mut acc = x[0].zero_like();
    for a in 0..m {
        for b in 0..m {
            let xy = x[a].times(&y[b]);
            acc.add_product(g.get(&[a, b]), &xy);
        }
    }
    acc
}

fn apply_op(j: &TensorValue<Jet>, x: &[Jet]) -> Vec<Jet> {
    let m = x.len();
    (0..m)
        .map(|a| {
            let mut acc = x[0].zero_like();
            for b in 0..m {
                acc.add_product(j.get(&[a, b]), &x[b]);
            }
            acc
        })
        .collect()
}

impl EmbeddingJets {
    pub fn compute(
        amb: &AmbientProductModel,
        emb: &Embedding,
        point: &[f64],
        order: usize,
    ) -> Result<EmbeddingJets, HypersurfaceError> {
        let n = point.len();
        let m = amb.dim();
        if emb.map.len() != m || m != n + 1 {
            return Err(HypersurfaceError::Dimension {
                got: emb.map.len(),
                want: m,
            });
        }
        let eval_err = |source| HypersurfaceError::Eval {
            point: point.to_vec(),
            source,
        };
        let coords = Jet::coordinates(point, order + 1);
        let map: Vec<Jet> = emb
            .map
            .iter()
            .map(|e| eval_with(e, &coords))
            .collect::<Result<_, _>>()
            .map_err(eval_err)?;
        let ambient_point: Vec<f64> = map.iter().map(Jet::value).collect();
        let tangents: Vec<Vec<Jet>> = (0..n)
            .map(|i| map.iter().map(|f| f.derivative(i)).collect::<Result<Vec<_>, _>>())
            .collect::<Result<_, _>>()
            .map_err(eval_err)?;
        let compose = |exprs: &[ScalarExpr]| -> Result<Vec<Jet>, HypersurfaceError> {
            exprs
                .iter()
                .map(|e| eval_with(e, &map).map(|j| j.truncate(order)))
                .collect::<Result<_, _>>()
                .map_err(eval_err)
        };
        let ambient_metric = TensorValue::new(m, 0, 2, compose(&amb.metric)?)
            .map_err(|e| geo(point, e.into()))?;
        let j = TensorValue::new(m, 1, 1, compose(&amb.j)?).map_err(|e| geo(point, e.into()))?;
        let induced_metric = TensorValue::from_fn(n, 0, 2, |idx| {
            pair(&ambient_metric, &tangents[idx[0]], &tangents[idx[1]])
        });
        let (induced_inverse, _) = invert_metric(&induced_metric).map_err(|e| geo(point, e))?;

        // Conormal by cofactors: ν(∂_i F) = 0 for every i.
        let numeric_rank = {
            let dm = DMatrix::from_fn(m, n, |a, i| tangents[i][a].value());
            dm.rank(1e-10 * dm.abs().max().max(1e-300))
        };
        if numeric_rank < n {
            return Err(HypersurfaceError::RankDeficient {
                point: point.to_vec(),
                dim: n,
            });
        }
        let conormal: Vec<Jet> = (0..m)
            .map(|a| {
                let rows: Vec<Vec<Jet>> = (0..m)
                    .filter(|&r| r != a)
                    .map(|r| (0..n).map(|i| tangents[i][r].clone()).collect())
                    .collect();
                let d = determinant(&rows);
                if a % 2 == 0 {
                    d
                } else {
                    d.scaled(-1.0)
                }
            })
            .collect();
        let (ambient_inverse, _) = invert_metric(&ambient_metric).map_err(|e| geo(point, e))?;
        let raw_normal = apply_op(&ambient_inverse_as_op(&ambient_inverse), &conormal);
        let norm2 = {
            let mut acc = conormal[0].zero_like();
            for a in 0..m {
                acc.add_product(&conormal[a], &raw_normal[a]);
            }
            acc
        };
        let len_n: f64 = raw_normal.iter().map(|j| j.value().powi(2)).sum::<f64>().sqrt();
        let len_nu: f64 = conormal.iter().map(|j| j.value().powi(2)).sum::<f64>().sqrt();
        let ratio = norm2.value().abs() / (len_n * len_nu).max(1e-300);
        if ratio < LIGHTLIKE_TOLERANCE {
            return Err(HypersurfaceError::LightlikeNormal {
                point: point.to_vec(),
                ratio,
            });
        }
        let epsilon = norm2.value().signum();
        let canonical = raw_normal
            .iter()
            .map(|j| j.value())
            .find(|v| v.abs() > 1e-12 * len_n)
            .map_or(1.0, f64::signum);
        let inv_len = norm2
            .scaled(epsilon)
            .powf(-0.5)
            .map_err(eval_err)?
            .scaled(canonical * emb.orientation);
        let normal: Vec<Jet> = raw_normal.iter().map(|j| j.times(&inv_len)).collect();
        let jn = apply_op(&j, &normal);
        let jn_normal = pair(&ambient_metric, &jn, &normal).value();
        Ok(EmbeddingJets {
            point: point.to_vec(),
            ambient_point,
            map,
            tangents,
            ambient_metric,
            j,
            induced_metric,
            induced_inverse,
            normal,
            epsilon,
            jn_normal,
        })
    }

    pub fn dim(&self) -> usize {
        self.point.len()
    }

    /// Tangential components `V^i = g^{ij} g̃(V, ∂_j F)` of an ambient vector.
    fn tangential(&self, v: &[Jet]) -> Vec<Jet> {
        let n = self.dim();
        let dots: Vec<Jet> = (0..n)
            .map(|j| pair(&self.ambient_metric, v, &self.tangents[j]))
            .collect();
        (0..n)
            .map(|i| {
                let mut acc = dots[0].zero_like();
                for j in 0..n {
                    acc.add_product(self.induced_inverse.get(&[i, j]), &dots[j]);
                }
                acc
            })
            .collect()
    }

    /// Induced `(φ, ξ, η)` from `JN = ξ`, `JX = φX + η(X)N`. Fails when
    /// `JN` is not tangent.
    pub fn induced_structure(&self) -> Result<ParacontactStructure, HypersurfaceError> {
        if self.jn_normal.abs() > TANGENCY_TOLERANCE {
            return Err(HypersurfaceError::JnNotTangent {
                point: self.point.clone(),
                value: self.jn_normal,
            });
        }
        let n = self.dim();
        let jn = apply_op(&self.j, &self.normal);
        let xi = self.tangential(&jn);
        let j_tangents: Vec<Vec<Jet>> = self.tangents.iter().map(|t| apply_op(&self.j, t)).collect();
        let phi_cols: Vec<Vec<Jet>> = j_tangents.iter().map(|jt| self.tangential(jt)).collect();
        let eta: Vec<Jet> = j_tangents
            .iter()
            .map(|jt| pair(&self.ambient_metric, jt, &self.normal).scaled(self.epsilon))
            .collect();
        let phi = TensorValue::from_fn(n, 1, 1, |idx| phi_cols[idx[1]][idx[0]].clone());
        let wrap = |upper, lower, data| TensorValue::new(n, upper, lower, data).expect("sizes match");
        Ok(ParacontactStructure {
            phi,
            xi: wrap(1, 0, xi),
            eta: wrap(0, 1, eta),
            epsilon: self.epsilon,
        })
    }

    /// Shape operator and second fundamental form at the point.
    pub fn shape_operator(&self, ambient: &AmbientAtPoint) -> Result<ShapeData, HypersurfaceError> {
        let n = self.dim();
        let m = n + 1;
        let err = |source| HypersurfaceError::Eval {
            point: self.point.clone(),
            source,
        };
        let t = DMatrix::from_fn(m, n, |a, i| self.tangents[i][a].value());
        let nv = DVector::from_iterator(m, self.normal.iter().map(Jet::value));
        let g_amb = &ambient.g;
        let gamma = &ambient.gamma;
        let christoffel = |x: &DVector<f64>, y: &DVector<f64>| {
            DVector::from_fn(m, |a, _| {
                let mut s = 0.0;
                for b in 0..m {
                    for c in 0..m {
                        s += gamma.get(&[a, b, c]) * x[b] * y[c];
                    }
                }
                s
            })
        };
        let g_ind = self.induced_metric.at_center().to_matrix();
        let g_inv = self.induced_inverse.at_center().to_matrix();
        // ∇̃_{∂_j} N
        let mut a = DMatrix::zeros(n, n);
        for j in 0..n {
            let dn = DVector::from_iterator(
                m,
                self.normal
                    .iter()
                    .map(|c| c.derivative(j).map(|d| d.value()))
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(err)?,
            );
            let cov = dn + christoffel(&t.column(j).into(), &nv);
            let dots = t.transpose() * g_amb * cov;
            let col = -(&g_inv * dots);
            a.set_column(j, &col);
        }
        // h(∂_i,∂_j) = ε g̃(∇̃_{∂_i} ∂_j F, N)
        let mut h = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let second = DVector::from_iterator(
                    m,
                    self.tangents[j]
                        .iter()
                        .map(|c| c.derivative(i).map(|d| d.value()))
                        .collect::<Result<Vec<_>, _>>()
                        .map_err(err)?,
                );
                let cov = second + christoffel(&t.column(i).into(), &t.column(j).into());
                h[(i, j)] = self.epsilon * (cov.transpose() * g_amb * &nv)[(0, 0)];
            }
        }
        Ok(ShapeData {
            a,
            h,
            normal: nv,
            epsilon: self.epsilon,
            tangents: t,
            g: g_ind,
        })
    }
}

fn ambient_inverse_as_op(inv: &TensorValue<Jet>) -> TensorValue<Jet> {
    // g̃^{AB} viewed as a (1,1) map acting on the conormal index
    TensorValue::new(inv.dim(), 1, 1, inv.data().to_vec()).expect("same size")
}

/// Shape data at one point, in chart coordinates.
#[derive(Debug, Clone)]
pub struct ShapeData {
    /// `A^i_j`: `A∂_j = A^i_j ∂_i`.
    pub a: DMatrix<f64>,
    /// Second fundamental form from the Gauss formula.
    pub h: DMatrix<f64>,
    pub normal: DVector<f64>,
    pub epsilon: f64,
    /// Columns `∂_i F` in ambient coordinates.
    pub tangents: DMatrix<f64>,
    pub g: DMatrix<f64>,
}

impl ShapeData {
    /// `εg(A·,·)` as a matrix `[x, y]`.
    pub fn h_from_a(&self) -> DMatrix<f64> {
        (self.a.transpose() * &self.g) * self.epsilon
    }

    /// Eigenvalues of `A` (real for the fixtures in use), sorted.
    pub fn eigenvalues(&self) -> Option<Vec<f64>> {
        let ev = self.a.clone().schur().eigenvalues()?;
        let mut v: Vec<f64> = ev.iter().copied().collect();
        v.sort_by(f64::total_cmp);
        Some(v)
    }
}

/// Components of a (1,1) operator in the frame of `ctx`.
pub fn operator_frame(ctx: &PointContext, m: &DMatrix<f64>) -> DMatrix<f64> {
    let n = m.nrows();
    let mut out = DMatrix::zeros(n, n);
    for b in 0..n {
        let image = m * DVector::from_vec(ctx.frame.vector(b));
        let comps = ctx.frame_components(&image);
        for a in 0..n {
            out[(a, b)] = comps[a];
        }
    }
    out
}

fn form_gap(frame: &Frame, l: &DMatrix<f64>, r: &DMatrix<f64>) -> f64 {
    frame.form_components(&(l - r)).abs().max()
}

/// A sampled point of a hypersurface with everything the checks need.
#[derive(Debug)]
pub struct HypersurfacePoint {
    pub jets: EmbeddingJets,
    pub ambient: AmbientAtPoint,
    /// Induced context; `None` when `JN` is not tangent.
    pub induced: Option<PointContext>,
    pub shape: Option<ShapeData>,
}

impl HypersurfacePoint {
    pub fn compute(
        amb: &AmbientProductModel,
        emb: &Embedding,
        point: &[f64],
        order: usize,
    ) -> Result<HypersurfacePoint, HypersurfaceError> {
        let jets = EmbeddingJets::compute(amb, emb, point, order)?;
        let ambient = AmbientAtPoint::compute(amb, &jets.ambient_point)?;
        let (induced, shape) = match jets.induced_structure() {
            Ok(structure) => {
                let ctx = PointContext::new(point.to_vec(), jets.induced_metric.clone(), Some(structure))
                    .map_err(|e| geo(point, e))?;
                let shape = jets.shape_operator(&ambient)?;
                (Some(ctx), Some(shape))
            }
            Err(HypersurfaceError::JnNotTangent { .. }) => (None, None),
            Err(e) => return Err(e),
        };
        Ok(HypersurfacePoint {
            jets,
            ambient,
            induced,
            shape,
        })
    }
}

pub static AMBIENT_J_SQUARED: CheckDef =
    CheckDef::new("ambient.j-squared", "J² = I", TOL_ALGEBRAIC);
pub static AMBIENT_J_METRIC: CheckDef = CheckDef::new(
    "ambient.j-metric",
    "g̃(JX,JY) = g̃(X,Y)",
    TOL_ALGEBRAIC,
);
pub static AMBIENT_NABLA_J: CheckDef =
    CheckDef::new("ambient.nabla-j", "(∇̃_X J)Y = 0", TOL_FIRST_ORDER);
pub static AMBIENT_CURVATURE: CheckDef = CheckDef::new(
    "ambient.curvature-ansatz",
    "R̃ = k{g̃(Y,Z)g̃(X,W) − g̃(X,Z)g̃(Y,W) + g̃(JY,Z)g̃(JX,W) − g̃(JX,Z)g̃(JY,W)}",
    TOL_SECOND_ORDER,
);

/// Product-structure axioms of the ambient at the image point.
pub fn check_ambient(
    amb: &AmbientProductModel,
    at: &AmbientAtPoint,
    rng: &mut impl Rng,
    vectors: usize,
) -> Vec<Measurement> {
    let ctx = &at.ctx;
    let j = &at.j_num;
    let g = &at.g;
    let mut worst = [0.0_f64; 4];
    let unit = at.ansatz_unit();
    for _ in 0..vectors {
        let x = ctx.random_vector(rng);
        let y = ctx.random_vector(rng);
        let z = ctx.random_vector(rng);
        let w = ctx.random_vector(rng);
        worst[0] = worst[0].max(ctx.vector_gap(&(j * (j * &x)), &x).gap);
        let jx = j * &x;
        let jy = j * &y;
        let lhs = (jx.transpose() * g * &jy)[(0, 0)];
        let rhs = (x.transpose() * g * &y)[(0, 0)];
        worst[1] = worst[1].max((lhs - rhs).abs());
        let nj = DVector::from_vec(at.nabla_j.apply_lower(&[y.as_slice(), x.as_slice()]));
        worst[2] = worst[2].max(ctx.vector_gap(&nj, &DVector::zeros(x.len())).gap);
        if let Some(k) = amb.k {
            let args = [x.as_slice(), y.as_slice(), z.as_slice(), w.as_slice()];
            let actual = at.riemann_lowered.apply_lower(&args)[0];
            let model = k * unit.apply_lower(&args)[0];
            worst[3] = worst[3].max((actual - model).abs());
        }
    }
    let mut out = vec![
        AMBIENT_J_SQUARED.residual(worst[0]),
        AMBIENT_J_METRIC.residual(worst[1]),
        AMBIENT_NABLA_J.residual(worst[2]),
    ];
    out.push(if amb.k.is_some() {
        AMBIENT_CURVATURE.residual(worst[3])
    } else {
        AMBIENT_CURVATURE.not_applicable()
    });
    out
}

pub static JN_TANGENT: CheckDef =
    CheckDef::new("hypersurface.jn-tangent", "JN = ξ ∈ 𝔛(M)", TANGENCY_TOLERANCE);
pub static EPSILON_CONSISTENT: CheckDef = CheckDef::new(
    "hypersurface.epsilon",
    "g̃(N,N) = ε",
    TOL_ALGEBRAIC,
);

/// Tangency of `JN` and agreement of `g̃(N,N)` with the declared `ε`.
pub fn check_induced_hypotheses(p: &HypersurfacePoint, declared_epsilon: f64) -> Vec<Measurement> {
    let nv: Vec<Jet> = p.jets.normal.clone();
    let norm = pair(&p.jets.ambient_metric, &nv, &nv).value();
    vec![
        JN_TANGENT.residual(p.jets.jn_normal),
        EPSILON_CONSISTENT.residual(norm - declared_epsilon),
    ]
}

pub static SHAPE_SELF_ADJOINT: CheckDef = CheckDef::new(
    "shape.self-adjoint",
    "g(AX,Y) = g(X,AY)",
    TOL_FIRST_ORDER,
);
pub static SHAPE_H: CheckDef = CheckDef::new(
    "shape.second-fundamental-form",
    "∇̃_XY = ∇_XY + εg(AX,Y)N",
    TOL_ALGEBRAIC,
);
pub static INDUCED_NABLA_PHI: CheckDef = CheckDef::new(
    "hypersurface.nabla-phi",
    "(∇_Xφ)Y = η(Y)AX + εg(AX,Y)ξ",
    TOL_SECOND_ORDER,
);
pub static INDUCED_NABLA_ETA: CheckDef = CheckDef::new(
    "hypersurface.nabla-eta",
    "(∇_Xη)Y = −εg(AX,φY)",
    TOL_SECOND_ORDER,
);
pub static INDUCED_NABLA_XI: CheckDef = CheckDef::new(
    "hypersurface.nabla-xi",
    "∇_Xξ = −φAX",
    TOL_SECOND_ORDER,
);
pub static GAUSS_EQUATION: CheckDef = CheckDef::new(
    "hypersurface.gauss-equation",
    "R(X,Y,Z,W) = R̃(X,Y,Z,W) + ε{h(Y,Z)h(X,W) − h(X,Z)h(Y,W)}",
    TOL_THIRD_ORDER,
);

/// Shape-operator invariants, the induced-derivative displays and Gauss
/// consistency of the intrinsic curvature.
pub fn verify_induced_derivatives(
    p: &HypersurfacePoint,
    rng: &mut impl Rng,
    vectors: usize,
) -> Result<Vec<Measurement>, HypersurfaceError> {
    let defs: [&'static CheckDef; 6] = [
        &SHAPE_SELF_ADJOINT,
        &SHAPE_H,
        &INDUCED_NABLA_PHI,
        &INDUCED_NABLA_ETA,
        &INDUCED_NABLA_XI,
        &GAUSS_EQUATION,
    ];
    let (Some(ctx), Some(shape)) = (&p.induced, &p.shape) else {
        return Ok(defs.iter().map(|d| d.not_applicable()).collect());
    };
    let point = &p.jets.point;
    let s = ctx.snapshot().expect("induced context carries a structure");
    let d = StructureDerivatives::compute(ctx)
        .map_err(|e| geo(point, e))?
        .expect("structure present");
    let curv = CurvatureAtPoint::from_jets(ctx.curvature().map_err(|e| geo(point, e))?);
    let eps = shape.epsilon;
    let a = &shape.a;
    let h = &shape.h;
    let t = &shape.tangents;
    let mut worst = [0.0_f64; 6];
    let ga = a.transpose() * &s.g;
    worst[0] = form_gap(&ctx.frame, &ga, &ga.transpose());
    worst[1] = form_gap(&ctx.frame, h, &shape.h_from_a());
    for _ in 0..vectors {
        let x = ctx.random_vector(rng);
        let y = ctx.random_vector(rng);
        let z = ctx.random_vector(rng);
        let w = ctx.random_vector(rng);
        let ax = a * &x;
        let rhs = &ax * s.eta_of(&y) + &s.xi * (eps * s.inner(&ax, &y));
        worst[2] = worst[2].max(ctx.vector_gap(&d.nabla_phi(&x, &y), &rhs).gap);
        let rhs = -eps * s.inner(&ax, &s.phi_of(&y));
        worst[3] = worst[3].max((d.nabla_eta(&x, &y) - rhs).abs());
        worst[4] = worst[4].max(ctx.vector_gap(&d.nabla_xi(&x), &-s.phi_of(&ax)).gap);
        let hf = |u: &DVector<f64>, v: &DVector<f64>| (u.transpose() * h * v)[(0, 0)];
        let (tx, ty, tz, tw) = (t * &x, t * &y, t * &z, t * &w);
        let ambient = p.ambient.riemann_lowered.apply_lower(&[
            tx.as_slice(),
            ty.as_slice(),
            tz.as_slice(),
            tw.as_slice(),
        ])[0];
        let expected = ambient + eps * (hf(&y, &z) * hf(&x, &w) - hf(&x, &z) * hf(&y, &w));
        worst[5] = worst[5].max((curv.r4(&x, &y, &z, &w) - expected).abs());
    }
    Ok(defs.iter().zip(worst).map(|(d, w)| d.residual(w)).collect())
}

pub static CHAR_FORWARD: CheckDef = CheckDef::new(
    "characterization.forward",
    "(ε)-para Sasakian ⟹ A = −εI + εη⊗ξ",
    TOL_SECOND_ORDER,
);
pub static CHAR_CONVERSE: CheckDef = CheckDef::new(
    "characterization.converse",
    "A = −εI + εη⊗ξ ⟹ (ε)-para Sasakian",
    TOL_SECOND_ORDER,
);
pub static CHAR_IFF: CheckDef = CheckDef::new(
    "characterization.iff",
    "(ε)-para Sasakian ⟺ A = −εI + εη⊗ξ",
    TOL_SECOND_ORDER,
);
pub static CHAR_CONSTRUCTIVE: CheckDef = CheckDef::new(
    "characterization.constructive",
    "(∇_Xφ)Y = η(Y)AX + εg(AX,Y)ξ solved for A gives A = −εI + εη⊗ξ",
    1e-10,
);

/// Outcome of the shape-operator characterization at one point.
#[derive(Debug, Clone)]
pub struct Characterization {
    /// Gap in the (ε)-para Sasakian defining equation.
    pub rho_ps: f64,
    /// Gap between `A` and `−εI + εη⊗ξ`.
    pub rho_shape: f64,
    /// Gap between the reconstructed and expected operator; `None` when the
    /// linear system is rank-deficient.
    pub constructive: Option<f64>,
    pub measurements: Vec<Measurement>,
}

/// `−εI + εη⊗ξ` in coordinates.
pub fn para_sasakian_shape(s: &StructureAtPoint) -> DMatrix<f64> {
    let n = s.dim();
    DMatrix::identity(n, n) * -s.epsilon + &s.xi * s.eta.transpose() * s.epsilon
}

/// Solve `η(Y)AX + εg(AX,Y)ξ = −g(φX,φY)ξ − εη(Y)φ²X` for `A` from
/// `n²` random pairs.
pub fn reconstruct_shape(
    s: &StructureAtPoint,
    mut random_vector: impl FnMut() -> DVector<f64>,
) -> Option<DMatrix<f64>> {
    let n = s.dim();
    let pairs = n * n;
    let mut sys = DMatrix::zeros(pairs * n, n * n);
    let mut rhs = DVector::zeros(pairs * n);
    for p in 0..pairs {
        let x = random_vector();
        let y = random_vector();
        let gy = &s.g * &y;
        let ey = s.eta_of(&y);
        let target = para_sasakian_rhs(s, &x, &y);
        for row in 0..n {
            let r = p * n + row;
            rhs[r] = target[row];
            for i in 0..n {
                for j in 0..n {
                    let mut coef = s.epsilon * s.xi[row] * x[j] * gy[i];
                    if i == row {
                        coef += ey * x[j];
                    }
                    sys[(r, i * n + j)] += coef;
                }
            }
        }
    }
    let sol = min_norm_solve(&sys, &rhs, 1e-10)?;
    if sol.rank < n * n {
        return None;
    }
    Some(DMatrix::from_fn(n, n, |i, j| sol.x[i * n + j]))
}

/// The shape-operator characterization of (ε)-para Sasakian hypersurfaces.
pub fn check_ps_characterization(
    ctx: &PointContext,
    shape: &ShapeData,
    rng: &mut impl Rng,
    vectors: usize,
) -> Result<Characterization, GeometryError> {
    let s = ctx.snapshot().expect("induced context carries a structure");
    let d = StructureDerivatives::compute(ctx)?.expect("structure present");
    let mut rho_ps = 0.0_f64;
    for _ in 0..vectors {
        let x = ctx.random_vector(rng);
        let y = ctx.random_vector(rng);
        let gap = ctx.vector_gap(&d.nabla_phi(&x, &y), &para_sasakian_rhs(s, &x, &y));
        rho_ps = rho_ps.max(gap.gap);
    }
    let expected = para_sasakian_shape(s);
    let rho_shape = operator_frame(ctx, &(&shape.a - &expected)).abs().max();
    let constructive = reconstruct_shape(s, || ctx.random_vector(rng))
        .map(|a| operator_frame(ctx, &(a - &expected)).abs().max());
    let tol_ps = CHAR_FORWARD.tolerance;
    let mut measurements = vec![
        if rho_ps <= tol_ps {
            CHAR_FORWARD.residual(rho_shape)
        } else {
            CHAR_FORWARD.not_applicable()
        },
        if rho_shape <= CHAR_CONVERSE.tolerance {
            CHAR_CONVERSE.residual(rho_ps)
        } else {
            CHAR_CONVERSE.not_applicable()
        },
    ];
    // both sides true: their gaps; both false: consistent; mixed: the
    // larger gap, which exceeds the tolerance by construction
    let iff = match (rho_ps <= tol_ps, rho_shape <= CHAR_CONVERSE.tolerance) {
        (false, false) => 0.0,
        _ => rho_ps.max(rho_shape),
    };
    measurements.push(CHAR_IFF.residual(iff));
    measurements.push(CHAR_CONSTRUCTIVE.residual(constructive.unwrap_or(f64::INFINITY)));
    Ok(Characterization {
        rho_ps,
        rho_shape,
        constructive,
        measurements,
    })
}

pub static QUASI_UMBILICAL: CheckDef = CheckDef::new(
    "hypersurface.quasi-umbilical",
    "h(X,Y) = αg(X,Y) + βu(X)u(Y), α = −1, β = ε, u = η",
    TOL_ALGEBRAIC,
);

/// `h − (−g + εη⊗η)` in frame components.
pub fn quasi_umbilical_gap(frame: &Frame, h: &DMatrix<f64>, s: &StructureAtPoint) -> f64 {
    let expected = -&s.g + s.eta_eta_matrix() * s.epsilon;
    form_gap(frame, h, &expected)
}

/// Quasi-umbilical decomposition; only applicable when the shape operator
/// has the (ε)-para Sasakian form.
pub fn quasi_umbilical_check(ctx: &PointContext, shape: &ShapeData, rho_shape: f64) -> Measurement {
    if rho_shape > CHAR_CONVERSE.tolerance {
        return QUASI_UMBILICAL.not_applicable();
    }
    let s = ctx.snapshot().expect("induced context carries a structure");
    QUASI_UMBILICAL.residual(quasi_umbilical_gap(&ctx.frame, &shape.h_from_a(), s))
}

// ---------------------------------------------------------------------
// Tangent-space model of the almost-constant-curvature Gauss equation.

/// A random almost paracontact metric structure on a single tangent space,
/// together with a shape operator.
#[derive(Debug, Clone)]
pub struct TangentModel {
    pub structure: StructureAtPoint,
    pub frame: Frame,
    pub a: DMatrix<f64>,
}

impl TangentModel {
    /// Draws a model with `ξ = e₀` of norm `ε`, `φ` diagonal with random
    /// `±1` entries on `ker η` in a random basis `P` (condition number at
    /// most 10), and `A = −εI + εη⊗ξ + perturb·(random self-adjoint)`.
    /// Returns the model and the number of rejected bases.
    pub fn random(rng: &mut impl Rng, n: usize, epsilon: f64, perturb: f64) -> (TangentModel, usize) {
        let mut rejected = 0;
        let p = loop {
            let p = DMatrix::from_fn(n, n, |i, j| {
                f64::from(u8::from(i == j)) + 0.4 * rng.gen_range(-1.0..=1.0)
            });
            let sv = p.singular_values();
            let cond = sv.max() / sv.min();
            if cond.is_finite() && cond <= 10.0 {
                break p;
            }
            rejected += 1;
        };
        let p_inv = p.clone().try_inverse().expect("well-conditioned basis");
        let mut signs = vec![epsilon];
        let mut tau = vec![0.0];
        for _ in 1..n {
            signs.push(if rng.gen_bool(0.5) { 1.0 } else { -1.0 });
            tau.push(if rng.gen_bool(0.5) { 1.0 } else { -1.0 });
        }
        let sig = DMatrix::from_diagonal(&DVector::from_vec(signs.clone()));
        let g = p_inv.transpose() * &sig * &p_inv;
        let phi = &p * DMatrix::from_diagonal(&DVector::from_vec(tau)) * &p_inv;
        let xi = p.column(0).into_owned();
        let eta = (&g * &xi) * epsilon;
        let structure = StructureAtPoint {
            phi,
            xi,
            eta,
            epsilon,
            g,
        };
        let mut a = para_sasakian_shape(&structure);
        if perturb != 0.0 {
            let sym = DMatrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..=1.0));
            let sym = (&sym + sym.transpose()) * 0.5;
            // self-adjoint in the frame: A_frame = Σ · sym
            a += &p * (&sig * sym) * &p_inv * perturb;
        }
        let frame = Frame {
            vectors: p,
            signs,
        };
        (TangentModel { structure, frame, a }, rejected)
    }

    pub fn dim(&self) -> usize {
        self.structure.dim()
    }

    /// `h = εg(A·,·)`.
    pub fn h(&self) -> DMatrix<f64> {
        (self.a.transpose() * &self.structure.g) * self.structure.epsilon
    }

    /// Ambient `(g̃, J)` on `T ⊕ ℝN`: `g̃ = g ⊕ ε`, `JX = φX + η(X)N`,
    /// `JN = ξ`.
    pub fn ambient(&self) -> (DMatrix<f64>, DMatrix<f64>) {
        let s = &self.structure;
        let n = self.dim();
        let mut g = DMatrix::zeros(n + 1, n + 1);
        g.view_mut((0, 0), (n, n)).copy_from(&s.g);
        g[(n, n)] = s.epsilon;
        let mut j = DMatrix::zeros(n + 1, n + 1);
        j.view_mut((0, 0), (n, n)).copy_from(&s.phi);
        for i in 0..n {
            j[(i, n)] = s.xi[i];
            j[(n, i)] = s.eta[i];
        }
        (g, j)
    }

    /// Tangential restriction of the unit ansatz and the Gauss correction
    /// `ε{h(Y,Z)h(X,W) − h(X,Z)h(Y,W)}`.
    pub fn gauss_parts(&self) -> (TensorValue<f64>, TensorValue<f64>) {
        let n = self.dim();
        let (g_amb, j) = self.ambient();
        let unit = almost_constant_unit(&g_amb, &j);
        let restricted = TensorValue::from_fn(n, 0, 4, |i| *unit.get(i));
        let h = self.h();
        let eps = self.structure.epsilon;
        let correction = TensorValue::from_fn(n, 0, 4, |i| {
            let (x, y, z, w) = (i[0], i[1], i[2], i[3]);
            eps * (h[(y, z)] * h[(x, w)] - h[(x, z)] * h[(y, w)])
        });
        (restricted, correction)
    }
}

/// Building blocks `{gg}`, `{ΦΦ}`, `{η}` of the induced curvature display.
pub fn gauss_blocks(s: &StructureAtPoint) -> [TensorValue<f64>; 3] {
    let n = s.dim();
    let g = &s.g;
    let f = s.fundamental_matrix();
    let e = &s.eta;
    let gg = TensorValue::from_fn(n, 0, 4, |i| {
        let (x, y, z, w) = (i[0], i[1], i[2], i[3]);
        g[(y, z)] * g[(x, w)] - g[(x, z)] * g[(y, w)]
    });
    let ff = TensorValue::from_fn(n, 0, 4, |i| {
        let (x, y, z, w) = (i[0], i[1], i[2], i[3]);
        f[(y, z)] * f[(x, w)] - f[(x, z)] * f[(y, w)]
    });
    let ee = TensorValue::from_fn(n, 0, 4, |i| {
        let (x, y, z, w) = (i[0], i[1], i[2], i[3]);
        g[(y, z)] * e[x] * e[w] + g[(x, w)] * e[y] * e[z]
            - g[(x, z)] * e[y] * e[w]
            - g[(y, w)] * e[x] * e[z]
    });
    [gg, ff, ee]
}

/// Induced curvature in closed form for `A = −εI + εη⊗ξ`:
/// `(k+ε){gg} + k{ΦΦ} − {η}`.
pub fn derived_gauss_display(s: &StructureAtPoint, k: f64) -> TensorValue<f64> {
    let [gg, ff, ee] = gauss_blocks(s);
    gg.scaled(k + s.epsilon).plus(&ff.scaled(k)).minus(&ee)
}

/// The induced curvature display as printed: `(k−1){gg} + k{ΦΦ} − ε{η}`.
pub fn printed_gauss_display(s: &StructureAtPoint, k: f64) -> TensorValue<f64> {
    let [gg, ff, ee] = gauss_blocks(s);
    gg.scaled(k - 1.0).plus(&ff.scaled(k)).minus(&ee.scaled(s.epsilon))
}

/// `S_{yz} = g^{xw} R_{xyzw}`.
pub fn ricci_from_lowered(r: &TensorValue<f64>, g_inv: &DMatrix<f64>) -> DMatrix<f64> {
    let n = g_inv.nrows();
    DMatrix::from_fn(n, n, |y, z| {
        let mut acc = 0.0;
        for x in 0..n {
            for w in 0..n {
                acc += g_inv[(x, w)] * r.get(&[x, y, z, w]);
            }
        }
        acc
    })
}

/// Ricci tensor of the hypersurface in closed form for `k = −ε`:
/// `S = −ε trace(φ)Φ − (n−1)η⊗η`.
pub fn derived_ricci(s: &StructureAtPoint) -> DMatrix<f64> {
    let n = s.dim() as f64;
    s.fundamental_matrix() * (-s.epsilon * s.trace_phi()) - s.eta_eta_matrix() * (n - 1.0)
}

/// The final Ricci display as printed:
/// `((2−ε)(n−2) − n)g + (2−ε)trace(φ)Φ + ε(4−ε−n)η⊗η`.
pub fn printed_ricci(s: &StructureAtPoint) -> DMatrix<f64> {
    let [a, b, c] = printed_ricci_coefficients(s);
    &s.g * a + s.fundamental_matrix() * b + s.eta_eta_matrix() * c
}

pub fn printed_ricci_coefficients(s: &StructureAtPoint) -> [f64; 3] {
    let e = s.epsilon;
    let n = s.dim() as f64;
    [
        (2.0 - e) * (n - 2.0) - n,
        (2.0 - e) * s.trace_phi(),
        e * (4.0 - e - n),
    ]
}

/// Almost-constant-curvature constant forced by the Gauss equation.
pub fn derived_k(epsilon: f64) -> f64 {
    -epsilon
}

/// The value of `k` as printed.
pub fn printed_k(epsilon: f64) -> f64 {
    2.0 - epsilon
}

pub static SYN_GAUSS_DISPLAY: CheckDef = CheckDef::new(
    "synthetic.gauss-display",
    "R = (k+ε){g(Y,Z)g(X,W) − g(X,Z)g(Y,W)} + k{g(φY,Z)g(φX,W) − g(φX,Z)g(φY,W)} − {η-terms}",
    1e-10,
);
pub static SYN_GAUSS_DISPLAY_PRINTED: CheckDef = CheckDef::printed(
    "synthetic.gauss-display-printed",
    "R = (k−1){g(Y,Z)g(X,W) − g(X,Z)g(Y,W)} + k{g(φY,Z)g(φX,W) − g(φX,Z)g(φY,W)} − ε{η-terms}",
    1e-10,
);
pub static SYN_K_SOLVABLE: CheckDef = CheckDef::new(
    "synthetic.k-solvable",
    "R(X,Y)ξ = η(X)Y − η(Y)X has a solution k",
    1e-10,
);
pub static SYN_K: CheckDef = CheckDef::new("synthetic.k-value", "k = −ε", 1e-10);
pub static SYN_K_PRINTED: CheckDef = CheckDef::printed("synthetic.k-value-printed", "k = 2 − ε", 1e-10);
pub static SYN_RICCI: CheckDef = CheckDef::new(
    "synthetic.ricci",
    "S = −ε trace(φ)Φ − (n−1)η⊗η",
    1e-10,
);
pub static SYN_RICCI_PRINTED: CheckDef = CheckDef::printed(
    "synthetic.ricci-printed",
    "S = ((2−ε)(n−2) − n)g + (2−ε)trace(φ)Φ + ε(4−ε−n)η⊗η",
    1e-10,
);
pub static SYN_COEFF_SUM: CheckDef = CheckDef::new(
    "synthetic.coefficient-sum",
    "εa + c = 1 − n",
    1e-10,
);
pub static SYN_COEFF_SUM_PRINTED: CheckDef = CheckDef::printed(
    "synthetic.coefficient-sum-printed",
    "ε((2−ε)(n−2) − n) + ε(4−ε−n) = 1 − n",
    1e-10,
);
pub static SYN_QUASI_UMBILICAL: CheckDef = CheckDef::new(
    "synthetic.quasi-umbilical",
    "h(X,Y) = −g(X,Y) + εη(X)η(Y)",
    TOL_EXACT,
);
pub static SYN_CHARACTERIZATION: CheckDef = CheckDef::new(
    "synthetic.characterization",
    "η(Y)AX + εg(AX,Y)ξ = −g(φX,φY)ξ − εη(Y)φ²X",
    TOL_EXACT,
);
pub static SYN_CONSTRUCTIVE: CheckDef = CheckDef::new(
    "synthetic.constructive",
    "(∇_Xφ)Y = η(Y)AX + εg(AX,Y)ξ solved for A gives A = −εI + εη⊗ξ",
    1e-10,
);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SyntheticConfig {
    pub epsilon: f64,
    pub dim: usize,
    pub trials: usize,
    pub seed: u64,
    /// Amplitude of a random self-adjoint perturbation added to the planted
    /// shape operator (0 for none).
    pub perturb: f64,
}

/// Per-trial results of the synthetic Gauss check.
#[derive(Debug, Clone)]
pub struct SyntheticTrial {
    pub k: f64,
    pub ricci: DMatrix<f64>,
    pub ricci_at_printed_k: DMatrix<f64>,
    pub quasi_umbilical_gap: f64,
    pub rejected: usize,
    pub measurements: Vec<Measurement>,
}

fn rel_gap(l: &[f64], r: &[f64]) -> f64 {
    l.iter().zip(r).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
}

/// One trial; `rng` should be a per-trial stream.
pub fn synthetic_trial(rng: &mut impl Rng, cfg: &SyntheticConfig) -> SyntheticTrial {
    let (model, rejected) = TangentModel::random(rng, cfg.dim, cfg.epsilon, cfg.perturb);
    let s = &model.structure;
    let n = cfg.dim;
    let eps = cfg.epsilon;
    let (unit, correction) = model.gauss_parts();
    let induced = |k: f64| unit.scaled(k).plus(&correction);
    let mut out = Vec::new();

    // (i) closed forms, polynomial in k
    let mut derived_gap = 0.0_f64;
    let mut printed_gap = 0.0_f64;
    for k in [0.0, 1.0, 2.0, 3.0] {
        let r = induced(k);
        derived_gap = derived_gap.max(rel_gap(r.data(), derived_gauss_display(s, k).data()));
        printed_gap = printed_gap.max(rel_gap(r.data(), printed_gauss_display(s, k).data()));
    }
    out.push(SYN_GAUSS_DISPLAY.residual(derived_gap));
    out.push(SYN_GAUSS_DISPLAY_PRINTED.residual(printed_gap));

    // (ii) R(X,Y,ξ,W) = η(X)g(Y,W) − η(Y)g(X,W), linear in k
    let xi = &s.xi;
    let contract_xi = |t: &TensorValue<f64>| {
        TensorValue::from_fn(n, 0, 3, |i| {
            (0..n).map(|z| t.get(&[i[0], i[1], z, i[2]]) * xi[z]).sum::<f64>()
        })
    };
    let b = contract_xi(&unit);
    let c = contract_xi(&correction);
    let target = TensorValue::from_fn(n, 0, 3, |i| {
        let (x, y, w) = (i[0], i[1], i[2]);
        s.eta[x] * s.g[(y, w)] - s.eta[y] * s.g[(x, w)]
    });
    let bb: f64 = b.data().iter().map(|v| v * v).sum();
    let k = if bb > 0.0 {
        b.data()
            .iter()
            .zip(c.data())
            .zip(target.data())
            .map(|((bv, cv), tv)| bv * (tv - cv))
            .sum::<f64>()
            / bb
    } else {
        f64::NAN
    };
    let solved = b.scaled(k).plus(&c);
    out.push(SYN_K_SOLVABLE.residual(rel_gap(solved.data(), target.data())));
    out.push(SYN_K.residual(k - derived_k(eps)));
    out.push(SYN_K_PRINTED.residual(k - printed_k(eps)));

    // (iii) Ricci tensors
    let g_inv = s.g.clone().try_inverse().expect("non-degenerate");
    let ricci = ricci_from_lowered(&induced(k), &g_inv);
    let ricci_at_printed_k = ricci_from_lowered(&induced(printed_k(eps)), &g_inv);
    out.push(SYN_RICCI.residual(rel_gap(ricci.as_slice(), derived_ricci(s).as_slice())));
    out.push(SYN_RICCI_PRINTED.residual(rel_gap(
        ricci_at_printed_k.as_slice(),
        printed_ricci(s).as_slice(),
    )));

    // (iv) coefficient constraint
    let sample = FitSample::from_parts(vec![0.0], &model.frame, s, &ricci);
    let sum = match fit_einstein_like(std::slice::from_ref(&sample)) {
        Ok(fit) => fit
            .members()
            .iter()
            .map(|[a, _, c]| (eps * a + c - (1.0 - n as f64)).abs())
            .fold(0.0, f64::max)
            .max(fit.residual),
        Err(_) => f64::INFINITY,
    };
    out.push(SYN_COEFF_SUM.residual(sum));
    let [pa, _, pc] = printed_ricci_coefficients(s);
    out.push(SYN_COEFF_SUM_PRINTED.residual(eps * pa + pc - (1.0 - n as f64)));

    // quasi-umbilical, characterization, constructive inverse
    let qu = quasi_umbilical_gap(&model.frame, &model.h(), s);
    out.push(SYN_QUASI_UMBILICAL.residual(qu));
    let mut random_vector = || {
        let u: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..=1.0)).collect();
        DVector::from_vec(model.frame.combine(&u))
    };
    let mut ch = 0.0_f64;
    for _ in 0..crate::paracontact::VECTORS_PER_POINT {
        let x = random_vector();
        let y = random_vector();
        let ax = &model.a * &x;
        let lhs = &ax * s.eta_of(&y) + xi * (eps * s.inner(&ax, &y));
        ch = ch.max(rel_gap(lhs.as_slice(), para_sasakian_rhs(s, &x, &y).as_slice()));
    }
    out.push(SYN_CHARACTERIZATION.residual(ch));
    let constructive = reconstruct_shape(s, &mut random_vector)
        .map_or(f64::INFINITY, |a| rel_gap(a.as_slice(), para_sasakian_shape(s).as_slice()));
    out.push(SYN_CONSTRUCTIVE.residual(constructive));

    SyntheticTrial {
        k,
        ricci,
        ricci_at_printed_k,
        quasi_umbilical_gap: qu,
        rejected,
        measurements: out,
    }
}

/// Runs `cfg.trials` independent trials; trial `t` uses stream `t + 1` of
/// the master seed.
pub fn synthetic_gauss_check(cfg: &SyntheticConfig) -> Vec<SyntheticTrial> {
    (0..cfg.trials)
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(t as u64 + 1);
            synthetic_trial(&mut rng, cfg)
        })
        .collect()
}

/// The intrinsic curvature of the induced metric at a point, for callers
/// that only need curvature.
pub fn induced_curvature(jets: &EmbeddingJets) -> Result<Curvature, GeometryError> {
    Curvature::from_connection(&Connection::from_metric(jets.induced_metric.clone())?)
}

/// Checks that the declared signature of the induced metric holds.
pub fn induced_index(jets: &EmbeddingJets) -> Result<usize, GeometryError> {
    MetricAtPoint::new(jets.induced_metric.at_center())
        .map(|m| m.index)
        .map_err(GeometryError::DegenerateMetric)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_expr;

    fn exprs(src: &[&str], coords: &[&str]) -> Vec<ScalarExpr> {
        let names: Vec<String> = coords.iter().map(|s| s.to_string()).collect();
        src.iter().map(|s| parse_expr(s, &names).unwrap()).collect()
    }

    fn flat_product() -> AmbientProductModel {
        let c = ["x1", "x2", "x3", "x4"];
        AmbientProductModel {
            coords: c.iter().map(|s| s.to_string()).collect(),
            metric: exprs(
                &["1", "0", "0", "0", "0", "1", "0", "0", "0", "0", "1", "0", "0", "0", "0", "1"],
                &c,
            ),
            j: exprs(
                &["1", "0", "0", "0", "0", "1", "0", "0", "0", "0", "-1", "0", "0", "0", "0", "-1"],
                &c,
            ),
            index: 0,
            k: Some(0.0),
        }
    }

    fn cone() -> Embedding {
        Embedding {
            map: exprs(
                &["t*cos(u)", "t*sin(u)", "t*cos(v)", "t*sin(v)"],
                &["t", "u", "v"],
            ),
            orientation: 1.0,
        }
    }

    #[test]
    fn cone_shape_operator_eigenvalues() {
        let p = HypersurfacePoint::compute(&flat_product(), &cone(), &[1.0, 0.0, 0.0], 4).unwrap();
        let shape = p.shape.as_ref().unwrap();
        let ev = shape.eigenvalues().unwrap();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert!((ev[0] + r).abs() < 1e-12 && ev[1].abs() < 1e-12 && (ev[2] - r).abs() < 1e-12);
        assert_eq!(shape.epsilon, 1.0);
        // ξ = ∂_t / √2
        let s = p.induced.as_ref().unwrap().snapshot().unwrap();
        assert!((s.xi[0] - r).abs() < 1e-12 && s.xi[1].abs() < 1e-12);
    }

    #[test]
    fn cone_induced_identities_hold() {
        let p = HypersurfacePoint::compute(&flat_product(), &cone(), &[1.2, 0.3, -0.4], 4).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let ms = verify_induced_derivatives(&p, &mut rng, 10).unwrap();
        for m in ms {
            match m.outcome {
                crate::report::Outcome::Residual(r) => assert!(r < 1e-9, "{} {r}", m.def.id),
                _ => panic!("{} not evaluated", m.def.id),
            }
        }
    }

    #[test]
    fn sphere_normal_is_not_j_tangent() {
        let emb = Embedding {
            map: exprs(&["sqrt(4 - a*a - b*b - c*c)", "a", "b", "c"], &["a", "b", "c"]),
            orientation: 1.0,
        };
        let p = HypersurfacePoint::compute(&flat_product(), &emb, &[0.1, 0.2, 0.3], 4).unwrap();
        assert!(p.induced.is_none());
        assert!(p.jets.jn_normal.abs() > 1e-3);
        assert!(matches!(
            p.jets.induced_structure(),
            Err(HypersurfaceError::JnNotTangent { .. })
        ));
    }

    #[test]
    fn synthetic_trial_recovers_gauss_constant() {
        for eps in [1.0, -1.0] {
            let cfg = SyntheticConfig {
                epsilon: eps,
                dim: 3,
                trials: 3,
                seed: 9,
                perturb: 0.0,
            };
            for t in synthetic_gauss_check(&cfg) {
                assert!((t.k + eps).abs() < 1e-10, "k = {}", t.k);
                assert!(t.quasi_umbilical_gap < 1e-12);
            }
        }
    }

    #[test]
    fn perturbed_shape_is_not_quasi_umbilical() {
        let cfg = SyntheticConfig {
            epsilon: 1.0,
            dim: 3,
            trials: 2,
            seed: 9,
            perturb: 0.05,
        };
        for t in synthetic_gauss_check(&cfg) {
            assert!(t.quasi_umbilical_gap > 1e-4);
        }
    }

    #[test]
    fn printed_coefficient_sum_is_consistent() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let (m, _) = TangentModel::random(&mut rng, 5, 1.0, 0.0);
        let [a, _, c] = printed_ricci_coefficients(&m.structure);
        assert_eq!((a, c), (-2.0, -2.0));
    }
}
