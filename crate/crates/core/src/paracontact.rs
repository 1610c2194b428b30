//! Almost paracontact metric structures `(φ, ξ, η, g, ε)` and their
//! pointwise identity checks.
//!
//! Every check draws random tangent vectors whose components in a
//! `g`-orthonormal frame (adapted to `ξ` when a structure is present) are
//! uniform in `[-1, 1]`, evaluates both sides of an identity, and reports
//! the largest frame-component gap. In this module the gap is normalized by
//! `1 + max |component|` of the compared quantities.

use std::sync::OnceLock;

use nalgebra::{DMatrix, DVector};
use rand::Rng;

use crate::geometry::{Connection, Curvature, GeometryError};
use crate::jet::Jet;
use crate::report::{
    CheckDef, Measurement, TOL_ALGEBRAIC, TOL_FIRST_ORDER, TOL_SECOND_ORDER,
};
use crate::tensor::{Direction, Frame, MetricAtPoint, TensorValue};

/// Random vector tuples drawn per sample point.
pub const VECTORS_PER_POINT: usize = 20;

/// Jet-valued structure tensors on a chart.
#[derive(Debug, Clone)]
pub struct ParacontactStructure {
    /// `φ^i_j`, valence (1,1).
    pub phi: TensorValue<Jet>,
    /// `ξ^i`, valence (1,0).
    pub xi: TensorValue<Jet>,
    /// `η_i`, valence (0,1).
    pub eta: TensorValue<Jet>,
    pub epsilon: f64,
}

impl ParacontactStructure {
    /// `Φ(X,Y) = g(φX, Y)` as a jet (0,2) tensor.
    pub fn fundamental_form(&self, metric: &TensorValue<Jet>) -> TensorValue<Jet> {
        let lowered = self
            .phi
            .metric_convert_with(0, Direction::Lower, metric)
            .expect("phi has a contravariant slot");
        // lowered slots: [k, j] = g_{km} φ^m_j, so Φ_{jk} is its transpose
        lowered.swap_slots(0, 1).expect("two covariant slots")
    }

    /// `η ⊗ η` as a jet (0,2) tensor.
    pub fn eta_eta(&self) -> TensorValue<Jet> {
        self.eta
            .tensor_product(&self.eta)
            .expect("eta has consistent dimension")
    }
}

/// Numeric snapshot of the structure at one point.
#[derive(Debug, Clone)]
pub struct StructureAtPoint {
    pub phi: DMatrix<f64>,
    pub xi: DVector<f64>,
    pub eta: DVector<f64>,
    pub epsilon: f64,
    pub g: DMatrix<f64>,
}

impl StructureAtPoint {
    pub fn from_jets(s: &ParacontactStructure, g: DMatrix<f64>) -> StructureAtPoint {
        StructureAtPoint {
            phi: s.phi.at_center().to_matrix(),
            xi: s.xi.at_center().to_vector(),
            eta: s.eta.at_center().to_vector(),
            epsilon: s.epsilon,
            g,
        }
    }

    pub fn dim(&self) -> usize {
        self.xi.len()
    }

    pub fn phi_of(&self, x: &DVector<f64>) -> DVector<f64> {
        &self.phi * x
    }

    pub fn eta_of(&self, x: &DVector<f64>) -> f64 {
        self.eta.dot(x)
    }

    pub fn inner(&self, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
        (x.transpose() * &self.g * y)[(0, 0)]
    }

    /// `Φ(X,Y) = g(φX, Y)`.
    pub fn fundamental(&self, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
        self.inner(&self.phi_of(x), y)
    }

    /// Matrix of `Φ` in coordinates.
    pub fn fundamental_matrix(&self) -> DMatrix<f64> {
        self.phi.transpose() * &self.g
    }

    /// Matrix of `η ⊗ η` in coordinates.
    pub fn eta_eta_matrix(&self) -> DMatrix<f64> {
        &self.eta * self.eta.transpose()
    }

    pub fn trace_phi(&self) -> f64 {
        self.phi.trace()
    }
}

/// Everything the checks need at one sample point. Curvature is computed
/// on first use.
#[derive(Debug)]
pub struct PointContext {
    pub point: Vec<f64>,
    pub conn: Connection,
    pub structure: Option<ParacontactStructure>,
    pub frame: Frame,
    snapshot: Option<StructureAtPoint>,
    curvature: OnceLock<Result<Curvature, GeometryError>>,
}

impl PointContext {
    pub fn new(
        point: Vec<f64>,
        metric: TensorValue<Jet>,
        structure: Option<ParacontactStructure>,
    ) -> Result<PointContext, GeometryError> {
        let conn = Connection::from_metric(metric)?;
        let snapshot = structure
            .as_ref()
            .map(|s| StructureAtPoint::from_jets(s, conn.at.matrix()));
        let frame = match &snapshot {
            Some(s) => Frame::adapted(&conn.at, s.xi.as_slice()),
            None => Frame::orthonormal(&conn.at),
        };
        Ok(PointContext {
            point,
            conn,
            structure,
            frame,
            snapshot,
            curvature: OnceLock::new(),
        })
    }

    pub fn dim(&self) -> usize {
        self.conn.dim()
    }

    pub fn metric(&self) -> &MetricAtPoint {
        &self.conn.at
    }

    pub fn snapshot(&self) -> Option<&StructureAtPoint> {
        self.snapshot.as_ref()
    }

    pub fn curvature(&self) -> Result<&Curvature, GeometryError> {
        self.curvature
            .get_or_init(|| Curvature::from_connection(&self.conn))
            .as_ref()
            .map_err(Clone::clone)
    }

    /// Random tangent vector with frame components uniform in `[-1, 1]`.
    pub fn random_vector(&self, rng: &mut impl Rng) -> DVector<f64> {
        let n = self.dim();
        loop {
            let u: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..=1.0)).collect();
            if u.iter().fold(0.0_f64, |m, x| m.max(x.abs())) >= 1e-3 {
                return DVector::from_vec(self.frame.combine(&u));
            }
        }
    }

    /// Frame components of a coordinate vector.
    pub fn frame_components(&self, v: &DVector<f64>) -> Vec<f64> {
        self.frame.vector_components(self.metric(), v.as_slice())
    }

    pub fn vector_gap(&self, lhs: &DVector<f64>, rhs: &DVector<f64>) -> Gap {
        Gap::of_slices(&self.frame_components(lhs), &self.frame_components(rhs))
    }
}

/// Difference between two evaluated sides of an identity.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Gap {
    pub gap: f64,
    pub scale: f64,
}

impl Gap {
    pub fn of_scalars(lhs: f64, rhs: f64) -> Gap {
        Gap {
            gap: (lhs - rhs).abs(),
            scale: lhs.abs().max(rhs.abs()),
        }
    }

    pub fn of_slices(lhs: &[f64], rhs: &[f64]) -> Gap {
        lhs.iter().zip(rhs).fold(Gap::default(), |acc, (l, r)| {
            acc.max(Gap::of_scalars(*l, *r))
        })
    }

    pub fn of_matrices(lhs: &DMatrix<f64>, rhs: &DMatrix<f64>) -> Gap {
        Gap::of_slices(lhs.as_slice(), rhs.as_slice())
    }

    pub fn max(self, other: Gap) -> Gap {
        Gap {
            gap: self.gap.max(other.gap),
            scale: self.scale.max(other.scale),
        }
    }

    pub fn relative(self) -> f64 {
        self.gap / (1.0 + self.scale)
    }
}

/// Running maximum of relative gaps for one check.
#[derive(Debug, Clone, Copy, Default)]
struct Worst(f64);

impl Worst {
    fn note(&mut self, g: Gap) {
        let r = g.relative();
        self.0 = if r.is_nan() { f64::INFINITY } else { self.0.max(r) };
    }
}

pub static AXIOM_PHI_SQUARED: CheckDef =
    CheckDef::new("axiom.phi-squared", "φ² = I − η⊗ξ", TOL_ALGEBRAIC);
pub static AXIOM_ETA_XI: CheckDef = CheckDef::new("axiom.eta-xi", "η(ξ) = 1", TOL_ALGEBRAIC);
pub static AXIOM_PHI_XI: CheckDef = CheckDef::new("axiom.phi-xi", "φξ = 0", TOL_ALGEBRAIC);
pub static AXIOM_ETA_PHI: CheckDef = CheckDef::new("axiom.eta-phi", "η∘φ = 0", TOL_ALGEBRAIC);
pub static AXIOM_METRIC_PHI: CheckDef = CheckDef::new(
    "axiom.metric-phi",
    "g(φX,φY) = g(X,Y) − εη(X)η(Y)",
    TOL_ALGEBRAIC,
);
pub static AXIOM_PHI_SYMMETRIC: CheckDef =
    CheckDef::new("axiom.phi-symmetric", "g(X,φY) = g(φX,Y)", TOL_ALGEBRAIC);
pub static AXIOM_METRIC_XI: CheckDef =
    CheckDef::new("axiom.metric-xi", "g(X,ξ) = εη(X)", TOL_ALGEBRAIC);
pub static AXIOM_XI_NORM: CheckDef = CheckDef::new("axiom.xi-norm", "g(ξ,ξ) = ε", TOL_ALGEBRAIC);

/// The seven structure axioms plus the non-null condition on `ξ`.
pub fn check_axioms(ctx: &PointContext, rng: &mut impl Rng, vectors: usize) -> Vec<Measurement> {
    let defs: [&'static CheckDef; 8] = [
        &AXIOM_PHI_SQUARED,
        &AXIOM_ETA_XI,
        &AXIOM_PHI_XI,
        &AXIOM_ETA_PHI,
        &AXIOM_METRIC_PHI,
        &AXIOM_PHI_SYMMETRIC,
        &AXIOM_METRIC_XI,
        &AXIOM_XI_NORM,
    ];
    let Some(s) = ctx.snapshot() else {
        return defs.iter().map(|d| d.not_applicable()).collect();
    };
    let eps = s.epsilon;
    let mut worst = [Worst::default(); 8];
    worst[1].note(Gap::of_scalars(s.eta_of(&s.xi), 1.0));
    worst[2].note(ctx.vector_gap(&s.phi_of(&s.xi), &DVector::zeros(s.dim())));
    worst[7].note(Gap::of_scalars(s.inner(&s.xi, &s.xi), eps));
    for _ in 0..vectors {
        let x = ctx.random_vector(rng);
        let y = ctx.random_vector(rng);
        let phx = s.phi_of(&x);
        let phy = s.phi_of(&y);
        let rhs = &x - &s.xi * s.eta_of(&x);
        worst[0].note(ctx.vector_gap(&s.phi_of(&phx), &rhs));
        worst[3].note(Gap::of_scalars(s.eta_of(&phx), 0.0));
        worst[4].note(Gap::of_scalars(
            s.inner(&phx, &phy),
            s.inner(&x, &y) - eps * s.eta_of(&x) * s.eta_of(&y),
        ));
        worst[5].note(Gap::of_scalars(s.inner(&x, &phy), s.inner(&phx, &y)));
        worst[6].note(Gap::of_scalars(s.inner(&x, &s.xi), eps * s.eta_of(&x)));
    }
    defs.iter().zip(worst).map(|(d, w)| d.residual(w.0)).collect()
}

pub static PS_NABLA_PHI: CheckDef = CheckDef::new(
    "sasakian.nabla-phi",
    "(∇_Xφ)Y = −g(φX,φY)ξ − εη(Y)φ²X",
    TOL_FIRST_ORDER,
);
pub static PS_NABLA_XI: CheckDef = CheckDef::new("sasakian.nabla-xi", "∇ξ = εφ", TOL_FIRST_ORDER);
pub static PS_NABLA_ETA: CheckDef = CheckDef::new(
    "sasakian.nabla-eta",
    "Φ(X,Y) = g(φX,Y) = (∇_Xη)Y",
    TOL_FIRST_ORDER,
);
pub static PS_PHI_SYMMETRIC: CheckDef =
    CheckDef::new("sasakian.fundamental-symmetric", "Φ(X,Y) = Φ(Y,X)", TOL_ALGEBRAIC);
pub static PS_NABLA_XI_PHI: CheckDef =
    CheckDef::new("sasakian.nabla-xi-phi", "∇_ξφ = 0", TOL_FIRST_ORDER);

/// Numeric covariant derivatives of the structure tensors at a point.
#[derive(Debug, Clone)]
pub struct StructureDerivatives {
    /// `[a, b, c]`: `(∇_X φ)Y = Σ ∇φ[a,b,c] Y^b X^c`.
    pub nabla_phi: TensorValue<f64>,
    /// `[a, c]`: `∇_X ξ`.
    pub nabla_xi: TensorValue<f64>,
    /// `[b, c]`: `(∇_X η)Y`.
    pub nabla_eta: TensorValue<f64>,
}

impl StructureDerivatives {
    pub fn compute(ctx: &PointContext) -> Result<Option<StructureDerivatives>, GeometryError> {
        let Some(s) = &ctx.structure else {
            return Ok(None);
        };
        Ok(Some(StructureDerivatives {
            nabla_phi: ctx.conn.covariant_derivative(&s.phi)?.at_center(),
            nabla_xi: ctx.conn.covariant_derivative(&s.xi)?.at_center(),
            nabla_eta: ctx.conn.covariant_derivative(&s.eta)?.at_center(),
        }))
    }

    pub fn nabla_phi(&self, x: &DVector<f64>, y: &DVector<f64>) -> DVector<f64> {
        DVector::from_vec(self.nabla_phi.apply_lower(&[y.as_slice(), x.as_slice()]))
    }

    pub fn nabla_xi(&self, x: &DVector<f64>) -> DVector<f64> {
        DVector::from_vec(self.nabla_xi.apply_lower(&[x.as_slice()]))
    }

    pub fn nabla_eta(&self, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
        self.nabla_eta.apply_lower(&[y.as_slice(), x.as_slice()])[0]
    }
}

/// Right side of the (ε)-para Sasakian defining equation.
pub fn para_sasakian_rhs(s: &StructureAtPoint, x: &DVector<f64>, y: &DVector<f64>) -> DVector<f64> {
    let phx = s.phi_of(x);
    let phy = s.phi_of(y);
    -&s.xi * s.inner(&phx, &phy) - s.phi_of(&phx) * (s.epsilon * s.eta_of(y))
}

/// The (ε)-para Sasakian defining equations at one point.
pub fn check_para_sasakian(
    ctx: &PointContext,
    rng: &mut impl Rng,
    vectors: usize,
) -> Result<Vec<Measurement>, GeometryError> {
    let defs: [&'static CheckDef; 5] = [
        &PS_NABLA_PHI,
        &PS_NABLA_XI,
        &PS_NABLA_ETA,
        &PS_PHI_SYMMETRIC,
        &PS_NABLA_XI_PHI,
    ];
    let (Some(s), Some(d)) = (ctx.snapshot(), StructureDerivatives::compute(ctx)?) else {
        return Ok(defs.iter().map(|d| d.not_applicable()).collect());
    };
    let mut worst = [Worst::default(); 5];
    for _ in 0..vectors {
        let x = ctx.random_vector(rng);
        let y = ctx.random_vector(rng);
        worst[0].note(ctx.vector_gap(&d.nabla_phi(&x, &y), &para_sasakian_rhs(s, &x, &y)));
        worst[1].note(ctx.vector_gap(&d.nabla_xi(&x), &(s.phi_of(&x) * s.epsilon)));
        worst[2].note(Gap::of_scalars(d.nabla_eta(&x, &y), s.fundamental(&x, &y)));
        worst[3].note(Gap::of_scalars(s.fundamental(&x, &y), s.fundamental(&y, &x)));
        worst[4].note(ctx.vector_gap(&d.nabla_phi(&s.xi, &x), &DVector::zeros(s.dim())));
    }
    Ok(defs.iter().zip(worst).map(|(d, w)| d.residual(w.0)).collect())
}

/// Numeric curvature at the sample point.
#[derive(Debug, Clone)]
pub struct CurvatureAtPoint {
    pub riemann: TensorValue<f64>,
    pub riemann_lowered: TensorValue<f64>,
    pub ricci: DMatrix<f64>,
    pub scalar: f64,
}

impl CurvatureAtPoint {
    pub fn from_jets(c: &Curvature) -> CurvatureAtPoint {
        CurvatureAtPoint {
            riemann: c.riemann.at_center(),
            riemann_lowered: c.riemann_lowered.at_center(),
            ricci: c.ricci.at_center().to_matrix(),
            scalar: c.scalar.value(),
        }
    }

    /// `R(X,Y)Z`.
    pub fn r(&self, x: &DVector<f64>, y: &DVector<f64>, z: &DVector<f64>) -> DVector<f64> {
        DVector::from_vec(
            self.riemann
                .apply_lower(&[x.as_slice(), y.as_slice(), z.as_slice()]),
        )
    }

    /// `R(X,Y,Z,W) = g(R(X,Y)Z, W)`.
    pub fn r4(&self, x: &DVector<f64>, y: &DVector<f64>, z: &DVector<f64>, w: &DVector<f64>) -> f64 {
        self.riemann_lowered.apply_lower(&[
            x.as_slice(),
            y.as_slice(),
            z.as_slice(),
            w.as_slice(),
        ])[0]
    }

    pub fn s(&self, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
        (x.transpose() * &self.ricci * y)[(0, 0)]
    }
}

pub static CONN_METRICITY: CheckDef =
    CheckDef::new("connection.metricity", "∇g = 0", TOL_ALGEBRAIC);
pub static CURV_RICCI_SYMMETRIC: CheckDef =
    CheckDef::new("curvature.ricci-symmetric", "S(X,Y) = S(Y,X)", TOL_ALGEBRAIC);
pub static CURV_BIANCHI: CheckDef = CheckDef::new(
    "curvature.first-bianchi",
    "R(X,Y)Z + R(Y,Z)X + R(Z,X)Y = 0",
    TOL_FIRST_ORDER,
);
pub static CURV_ANTISYMMETRY: CheckDef = CheckDef::new(
    "curvature.antisymmetry",
    "R(X,Y,Z,W) = −R(Y,X,Z,W) = −R(X,Y,W,Z)",
    TOL_ALGEBRAIC,
);
pub static CURV_PAIR_SYMMETRY: CheckDef = CheckDef::new(
    "curvature.pair-symmetry",
    "R(X,Y,Z,W) = R(Z,W,X,Y)",
    TOL_ALGEBRAIC,
);
pub static CURV_CONTRACTED_BIANCHI: CheckDef = CheckDef::new(
    "curvature.contracted-bianchi",
    "Xr = 2(div Q)X",
    TOL_SECOND_ORDER,
);

/// Structure-independent connection and curvature invariants.
pub fn check_curvature_invariants(
    ctx: &PointContext,
    rng: &mut impl Rng,
    vectors: usize,
) -> Result<Vec<Measurement>, GeometryError> {
    let curv = ctx.curvature()?;
    let c = CurvatureAtPoint::from_jets(curv);
    let nabla_g = ctx.conn.covariant_derivative(&ctx.conn.metric)?.at_center();
    let dr = curv.scalar_differential()?;
    let div_q = curv.ricci_op_divergence(&ctx.conn)?.at_center().to_vector();
    let dr = DVector::from_vec(dr);
    let mut worst = [Worst::default(); 6];
    for _ in 0..vectors {
        let x = ctx.random_vector(rng);
        let y = ctx.random_vector(rng);
        let z = ctx.random_vector(rng);
        let w = ctx.random_vector(rng);
        let ng = nabla_g.apply_lower(&[y.as_slice(), z.as_slice(), x.as_slice()])[0];
        worst[0].note(Gap::of_scalars(ng, 0.0));
        worst[1].note(Gap::of_scalars(c.s(&x, &y), c.s(&y, &x)));
        let cyclic = c.r(&x, &y, &z) + c.r(&y, &z, &x) + c.r(&z, &x, &y);
        let scale = ctx.vector_gap(&c.r(&x, &y, &z), &DVector::zeros(ctx.dim()));
        worst[2].note(Gap {
            gap: ctx.vector_gap(&cyclic, &DVector::zeros(ctx.dim())).gap,
            scale: scale.gap,
        });
        let base = c.r4(&x, &y, &z, &w);
        worst[3].note(Gap::of_scalars(base, -c.r4(&y, &x, &z, &w)));
        worst[3].note(Gap::of_scalars(base, -c.r4(&x, &y, &w, &z)));
        worst[4].note(Gap::of_scalars(base, c.r4(&z, &w, &x, &y)));
        worst[5].note(Gap::of_scalars(dr.dot(&x), 2.0 * div_q.dot(&x)));
    }
    let defs: [&'static CheckDef; 6] = [
        &CONN_METRICITY,
        &CURV_RICCI_SYMMETRIC,
        &CURV_BIANCHI,
        &CURV_ANTISYMMETRY,
        &CURV_PAIR_SYMMETRY,
        &CURV_CONTRACTED_BIANCHI,
    ];
    Ok(defs.iter().zip(worst).map(|(d, w)| d.residual(w.0)).collect())
}

pub static PS_R_XI: CheckDef = CheckDef::new(
    "curvature.r-xi",
    "R(X,Y)ξ = η(X)Y − η(Y)X",
    TOL_SECOND_ORDER,
);
pub static PS_R_PHI: CheckDef = CheckDef::new(
    "curvature.r-phi",
    "R(X,Y)φZ = φR(X,Y)Z + εΦ(Y,Z)X − εΦ(X,Z)Y − 2εΦ(Y,Z)η(X)ξ + …",
    TOL_SECOND_ORDER,
);
pub static PS_S_PHI: CheckDef = CheckDef::new(
    "curvature.s-phi",
    "S(X,φY) = S(φX,Y)",
    TOL_SECOND_ORDER,
);
pub static PS_S_XI: CheckDef = CheckDef::new(
    "curvature.s-xi",
    "S(X,ξ) = −(n−1)η(X)",
    TOL_SECOND_ORDER,
);

/// Right side of the `R(X,Y)φZ` expansion valid on (ε)-para Sasakian
/// manifolds.
pub fn r_phi_rhs(
    s: &StructureAtPoint,
    c: &CurvatureAtPoint,
    x: &DVector<f64>,
    y: &DVector<f64>,
    z: &DVector<f64>,
) -> DVector<f64> {
    let e = s.epsilon;
    let (ex, ey, ez) = (s.eta_of(x), s.eta_of(y), s.eta_of(z));
    let phi_yz = s.fundamental(y, z);
    let phi_xz = s.fundamental(x, z);
    let phx = s.phi_of(x);
    let phy = s.phi_of(y);
    s.phi_of(&c.r(x, y, z)) + x * (e * phi_yz) - y * (e * phi_xz)
        - &s.xi * (2.0 * e * phi_yz * ex)
        + &s.xi * (2.0 * e * phi_xz * ey)
        - &phx * (e * s.inner(y, z))
        + &phy * (e * s.inner(x, z))
        + &phx * (2.0 * ey * ez)
        - &phy * (2.0 * ex * ez)
}

/// Curvature identities satisfied by every (ε)-para Sasakian manifold.
pub fn check_ps_curvature_identities(
    ctx: &PointContext,
    rng: &mut impl Rng,
    vectors: usize,
) -> Result<Vec<Measurement>, GeometryError> {
    let defs: [&'static CheckDef; 4] = [&PS_R_XI, &PS_R_PHI, &PS_S_PHI, &PS_S_XI];
    let Some(s) = ctx.snapshot() else {
        return Ok(defs.iter().map(|d| d.not_applicable()).collect());
    };
    let c = CurvatureAtPoint::from_jets(ctx.curvature()?);
    let n = s.dim() as f64;
    let mut worst = [Worst::default(); 4];
    for _ in 0..vectors {
        let x = ctx.random_vector(rng);
        let y = ctx.random_vector(rng);
        let z = ctx.random_vector(rng);
        let expected = &y * s.eta_of(&x) - &x * s.eta_of(&y);
        worst[0].note(ctx.vector_gap(&c.r(&x, &y, &s.xi), &expected));
        worst[1].note(ctx.vector_gap(&c.r(&x, &y, &s.phi_of(&z)), &r_phi_rhs(s, &c, &x, &y, &z)));
        worst[2].note(Gap::of_scalars(
            c.s(&x, &s.phi_of(&y)),
            c.s(&s.phi_of(&x), &y),
        ));
        worst[3].note(Gap::of_scalars(c.s(&x, &s.xi), (1.0 - n) * s.eta_of(&x)));
    }
    Ok(defs.iter().zip(worst).map(|(d, w)| d.residual(w.0)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_expr;
    use crate::jet::jet_eval;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn jets(entries: &[&str], upper: usize, lower: usize, point: &[f64]) -> TensorValue<Jet> {
        let names: Vec<String> = ["x1", "x2", "y"].iter().map(|s| s.to_string()).collect();
        let data = entries
            .iter()
            .map(|s| jet_eval(&parse_expr(s, &names).unwrap(), point, 4).unwrap())
            .collect();
        TensorValue::new(3, upper, lower, data).unwrap()
    }

    /// Hyperbolic 3-space in the upper half-space chart with φ = −(I − η⊗ξ).
    fn hyperbolic(point: &[f64], phi_scale: &str) -> PointContext {
        let g = jets(
            &["1/(y*y)", "0", "0", "0", "1/(y*y)", "0", "0", "0", "1/(y*y)"],
            0,
            2,
            point,
        );
        let m = format!("-{phi_scale}");
        let phi = jets(&[&m, "0", "0", "0", &m, "0", "0", "0", "0"], 1, 1, point);
        let xi = jets(&["0", "0", "y"], 1, 0, point);
        let eta = jets(&["0", "0", "1/y"], 0, 1, point);
        let s = ParacontactStructure {
            phi,
            xi,
            eta,
            epsilon: 1.0,
        };
        PointContext::new(point.to_vec(), g, Some(s)).unwrap()
    }

    fn max_of(ms: &[Measurement]) -> f64 {
        ms.iter()
            .map(|m| match m.outcome {
                crate::report::Outcome::Residual(r) => r,
                _ => f64::INFINITY,
            })
            .fold(0.0, f64::max)
    }

    #[test]
    fn hyperbolic_structure_is_para_sasakian() {
        let ctx = hyperbolic(&[0.3, -0.2, 1.4], "1");
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!(max_of(&check_axioms(&ctx, &mut rng, 20)) < 1e-12);
        assert!(max_of(&check_para_sasakian(&ctx, &mut rng, 20).unwrap()) < 1e-12);
        assert!(max_of(&check_ps_curvature_identities(&ctx, &mut rng, 20).unwrap()) < 1e-10);
        assert!(max_of(&check_curvature_invariants(&ctx, &mut rng, 20).unwrap()) < 1e-10);
    }

    #[test]
    fn scaled_phi_breaks_axioms() {
        let ctx = hyperbolic(&[0.3, -0.2, 1.4], "1.01");
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let ms = check_axioms(&ctx, &mut rng, 20);
        let phi2 = ms.iter().find(|m| m.def.id == "axiom.phi-squared").unwrap();
        match phi2.outcome {
            crate::report::Outcome::Residual(r) => assert!(r > 1e-3),
            _ => panic!("expected a residual"),
        }
    }

    #[test]
    fn fundamental_form_matches_numeric() {
        let p = [0.1, 0.2, 0.9];
        let ctx = hyperbolic(&p, "1");
        let s = ctx.structure.as_ref().unwrap();
        let big_phi = s.fundamental_form(&ctx.conn.metric).at_center().to_matrix();
        let snap = ctx.snapshot().unwrap();
        assert!((big_phi - snap.fundamental_matrix()).abs().max() < 1e-14);
    }
}
