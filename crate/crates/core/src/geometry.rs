//! Levi-Civita connection, curvature and Lie derivatives from metric jets.
//!
//! Conventions:
//!
//! - `Γ^k_{ij}` stored as a (1,2) tensor with slots `[k, i, j]`.
//! - `R(X,Y)Z = ∇_X∇_Y Z − ∇_Y∇_X Z − ∇_{[X,Y]} Z`, stored as `R^l_{ijk}` with
//!   slots `[l, i, j, k]` so that `R(∂_i, ∂_j)∂_k = R^l_{ijk} ∂_l`.
//! - `R(X,Y,Z,W) = g(R(X,Y)Z, W)`, slots `[i, j, k, l]`.
//! - `S(Y,Z) = trace(X ↦ R(X,Y)Z)`, i.e. `S_{jk} = R^i_{ijk}`.
//! - Covariant derivatives append the differentiation direction as the last
//!   covariant slot: `(∇T)^{a..}_{b.. c} = ∇_c T^{a..}_{b..}`.

use nalgebra::DMatrix;
use thiserror::Error;

use crate::jet::{EvalError, Jet};
use crate::tensor::{MetricAtPoint, TensorError, TensorValue};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("degenerate metric at point: {0}")]
    DegenerateMetric(TensorError),
    #[error("insufficient jet order: have {have}, need {need}")]
    InsufficientOrder { have: usize, need: usize },
    #[error("unsupported valence ({0},{1}) for this operation")]
    UnsupportedValence(usize, usize),
    #[error("jet evaluation failed: {0}")]
    Eval(EvalError),
    #[error(transparent)]
    Tensor(#[from] TensorError),
}

impl From<EvalError> for GeometryError {
    fn from(e: EvalError) -> Self {
        match e {
            EvalError::InsufficientOrder { have, need } => {
                GeometryError::InsufficientOrder { have, need }
            }
            other => GeometryError::Eval(other),
        }
    }
}

/// Order of a jet-valued tensor (all components share it).
pub fn tensor_order(t: &TensorValue<Jet>) -> usize {
    t.data().iter().map(|j| j.order()).min().unwrap_or(0)
}

fn require_order(t: &TensorValue<Jet>, need: usize) -> Result<(), GeometryError> {
    let have = tensor_order(t);
    if have < need {
        Err(GeometryError::InsufficientOrder { have, need })
    } else {
        Ok(())
    }
}

/// Partial derivatives of every component: result gains a trailing
/// covariant slot for the direction.
pub fn partial_derivative(t: &TensorValue<Jet>) -> Result<TensorValue<Jet>, GeometryError> {
    require_order(t, 1)?;
    let n = t.dim();
    let (p, q) = t.valence();
    let derivs: Vec<Vec<Jet>> = t
        .data()
        .iter()
        .map(|j| (0..n).map(|c| j.derivative(c)).collect::<Result<Vec<_>, _>>())
        .collect::<Result<_, _>>()?;
    let rank = p + q;
    Ok(TensorValue::from_fn(n, p, q + 1, |idx| {
        let off = t.offset(&idx[..rank]);
        derivs[off][idx[rank]].clone()
    }))
}

/// Inverse of a jet-valued (0,2) metric, as a (2,0) jet tensor of the same
/// order, via the Neumann series around the numeric inverse.
pub fn invert_metric(g: &TensorValue<Jet>) -> Result<(TensorValue<Jet>, MetricAtPoint), GeometryError> {
    let n = g.dim();
    let at = MetricAtPoint::new(g.at_center()).map_err(GeometryError::DegenerateMetric)?;
    let m0 = at.inverse_matrix();
    let order = tensor_order(g);
    let template = g.data()[0].zero_like();
    // T = -M0 · (g - g0)
    let delta: Vec<Jet> = g
        .data()
        .iter()
        .map(|j| j.add_constant(-j.value()))
        .collect();
    let t: Vec<Jet> = (0..n * n)
        .map(|ij| {
            let (i, j) = (ij / n, ij % n);
            let mut acc = template.clone();
            for k in 0..n {
                acc = acc.plus(&delta[k * n + j].scaled(-m0[(i, k)]));
            }
            acc
        })
        .collect();
    let m0_jets: Vec<Jet> = (0..n * n)
        .map(|ij| template.constant_like(m0[(ij / n, ij % n)]))
        .collect();
    let mut result = m0_jets.clone();
    let mut term = m0_jets;
    for _ in 0..order {
        let next: Vec<Jet> = (0..n * n)
            .map(|ij| {
                let (i, j) = (ij / n, ij % n);
                let mut acc = template.clone();
                for k in 0..n {
                    acc.add_product(&t[i * n + k], &term[k * n + j]);
                }
                acc
            })
            .collect();
        for (r, x) in result.iter_mut().zip(&next) {
            *r = r.plus(x);
        }
        term = next;
    }
    Ok((TensorValue::new(n, 2, 0, result)?, at))
}

/// Levi-Civita connection of a metric given by its jets at a point.
#[derive(Debug, Clone)]
pub struct Connection {
    pub metric: TensorValue<Jet>,
    pub metric_inv: TensorValue<Jet>,
    /// `Γ^k_{ij}`, jets of order `K − 1`.
    pub gamma: TensorValue<Jet>,
    pub at: MetricAtPoint,
}

impl Connection {
    /// `Γ^k_ij = ½ g^{kl}(∂_i g_jl + ∂_j g_il − ∂_l g_ij)`.
    pub fn from_metric(metric: TensorValue<Jet>) -> Result<Connection, GeometryError> {
        require_order(&metric, 1)?;
        let n = metric.dim();
        let (metric_inv, at) = invert_metric(&metric)?;
        let dg = partial_derivative(&metric)?; // slots [i, j, l] = ∂_l g_ij
        let first_kind = TensorValue::from_fn(n, 0, 3, |idx| {
            let (l, i, j) = (idx[0], idx[1], idx[2]);
            dg.get(&[j, l, i])
                .plus(dg.get(&[i, l, j]))
                .minus(dg.get(&[i, j, l]))
                .scaled(0.5)
        });
        let gamma = first_kind.metric_convert_with(0, crate::tensor::Direction::Raise, &metric_inv)?;
        Ok(Connection {
            metric,
            metric_inv,
            gamma,
            at,
        })
    }

    pub fn dim(&self) -> usize {
        self.metric.dim()
    }

    /// Covariant derivative of a jet tensor field; the direction becomes the
    /// last covariant slot.
    pub fn covariant_derivative(
        &self,
        t: &TensorValue<Jet>,
    ) -> Result<TensorValue<Jet>, GeometryError> {
        let n = t.dim();
        let (p, q) = t.valence();
        let rank = p + q;
        let partial = partial_derivative(t)?;
        let mut src = vec![0; rank];
        let out = TensorValue::from_fn(n, p, q + 1, |idx| {
            let c = idx[rank];
            let mut acc = partial.get(idx).clone();
            src.copy_from_slice(&idx[..rank]);
            for s in 0..rank {
                let original = src[s];
                for m in 0..n {
                    src[s] = m;
                    if s < p {
                        // + Γ^{a_s}_{c m} T^{..m..}
                        acc.add_product(self.gamma.get(&[original, c, m]), t.get(&src));
                    } else {
                        // − Γ^m_{c b_s} T_{..m..}
                        let term = self.gamma.get(&[m, c, original]).times(t.get(&src));
                        acc = acc.minus(&term);
                    }
                }
                src[s] = original;
            }
            acc
        });
        Ok(out)
    }

    /// Lie derivative of a covariant tensor along `x`, via covariant
    /// derivatives: `(L_X T)_{b..} = X^c ∇_c T_{b..} + Σ_s T_{..m..} ∇_{b_s} X^m`.
    pub fn lie_derivative(
        &self,
        t: &TensorValue<Jet>,
        x: &TensorValue<Jet>,
    ) -> Result<TensorValue<Jet>, GeometryError> {
        let (p, q) = t.valence();
        if p != 0 || !(1..=2).contains(&q) || x.valence() != (1, 0) {
            return Err(GeometryError::UnsupportedValence(p, q));
        }
        let nabla_t = self.covariant_derivative(t)?;
        let nabla_x = self.covariant_derivative(x)?; // [m, b] = ∇_b X^m
        Ok(lie_terms(t, x, &nabla_t, &nabla_x))
    }
}

/// Coordinate form of the Lie derivative:
/// `(L_X T)_{b..} = X^c ∂_c T_{b..} + Σ_s T_{..m..} ∂_{b_s} X^m`.
pub fn lie_derivative_partial(
    t: &TensorValue<Jet>,
    x: &TensorValue<Jet>,
) -> Result<TensorValue<Jet>, GeometryError> {
    let (p, q) = t.valence();
    if p != 0 || !(1..=2).contains(&q) || x.valence() != (1, 0) {
        return Err(GeometryError::UnsupportedValence(p, q));
    }
    let dt = partial_derivative(t)?;
    let dx = partial_derivative(x)?;
    Ok(lie_terms(t, x, &dt, &dx))
}

fn lie_terms(
    t: &TensorValue<Jet>,
    x: &TensorValue<Jet>,
    dt: &TensorValue<Jet>,
    dx: &TensorValue<Jet>,
) -> TensorValue<Jet> {
    let n = t.dim();
    let q = t.valence().1;
    let mut src = vec![0; q + 1];
    let mut tsrc = vec![0; q];
    TensorValue::from_fn(n, 0, q, |idx| {
        src[..q].copy_from_slice(idx);
        let mut acc = dt.get(&{
            src[q] = 0;
            src.clone()
        })
        .times(x.get(&[0]));
        for c in 1..n {
            src[q] = c;
            acc.add_product(x.get(&[c]), dt.get(&src));
        }
        tsrc.copy_from_slice(idx);
        for s in 0..q {
            let original = tsrc[s];
            for m in 0..n {
                tsrc[s] = m;
                acc.add_product(t.get(&tsrc), dx.get(&[m, original]));
            }
            tsrc[s] = original;
        }
        acc
    })
}

/// Curvature data derived from a connection. All fields are jets, two
/// orders below the metric.
#[derive(Debug, Clone)]
pub struct Curvature {
    /// `R^l_{ijk}`.
    pub riemann: TensorValue<Jet>,
    /// `R_{ijkl} = g(R(∂_i,∂_j)∂_k, ∂_l)`.
    pub riemann_lowered: TensorValue<Jet>,
    pub ricci: TensorValue<Jet>,
    /// `Q^i_j = g^{ik} S_{kj}`.
    pub ricci_op: TensorValue<Jet>,
    pub scalar: Jet,
}

impl Curvature {
    pub fn from_connection(conn: &Connection) -> Result<Curvature, GeometryError> {
        require_order(&conn.gamma, 1)?;
        let n = conn.dim();
        let dgamma = partial_derivative(&conn.gamma)?; // [l, j, k, i] = ∂_i Γ^l_{jk}
        let gamma = &conn.gamma;
        let riemann = TensorValue::from_fn(n, 1, 3, |idx| {
            let (l, i, j, k) = (idx[0], idx[1], idx[2], idx[3]);
            let mut acc = dgamma.get(&[l, j, k, i]).minus(dgamma.get(&[l, i, k, j]));
            for m in 0..n {
                acc.add_product(gamma.get(&[l, i, m]), gamma.get(&[m, j, k]));
                let back = gamma.get(&[l, j, m]).times(gamma.get(&[m, i, k]));
                acc = acc.minus(&back);
            }
            acc
        });
        let metric = &conn.metric;
        let riemann_lowered = TensorValue::from_fn(n, 0, 4, |idx| {
            let (i, j, k, l) = (idx[0], idx[1], idx[2], idx[3]);
            let mut acc = riemann.get(&[0, i, j, k]).times(metric.get(&[l, 0]));
            for m in 1..n {
                acc.add_product(metric.get(&[l, m]), riemann.get(&[m, i, j, k]));
            }
            acc
        });
        let ricci = riemann.contract(0, 1)?;
        let ricci_op = ricci.metric_convert_with(0, crate::tensor::Direction::Raise, &conn.metric_inv)?;
        // ricci_op slots after raising slot 0: [i (raised), k]
        let scalar = ricci_op.contract(0, 1)?.data()[0].clone();
        Ok(Curvature {
            riemann,
            riemann_lowered,
            ricci,
            ricci_op,
            scalar,
        })
    }

    /// `dr` from the jet of the scalar curvature field.
    pub fn scalar_differential(&self) -> Result<Vec<f64>, GeometryError> {
        if self.scalar.order() < 1 {
            return Err(GeometryError::InsufficientOrder { have: 0, need: 1 });
        }
        Ok(self.scalar.gradient())
    }

    /// `(div Q)_j = ∇_i Q^i_j` as a (0,1) jet tensor.
    pub fn ricci_op_divergence(&self, conn: &Connection) -> Result<TensorValue<Jet>, GeometryError> {
        let nabla_q = conn.covariant_derivative(&self.ricci_op)?; // [i, j, c]
        Ok(nabla_q.contract(0, 2)?)
    }
}

/// Numeric Riemann tensor in `(1,3)` form from plain matrices, used by
/// point-level oracles.
pub fn ricci_from_riemann(riemann: &TensorValue<f64>) -> DMatrix<f64> {
    riemann
        .contract(0, 1)
        .expect("riemann has valence (1,3)")
        .to_matrix()
}
