//! Check-suite orchestration: sampling, per-point evaluation and the
//! cross-point Einstein-like fit.
//!
//! Randomness is counter-derived from one master seed: stream 0 draws the
//! sample points, stream `1 + i` drives everything at point `i`, so results
//! do not depend on how rayon schedules the points.

use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::einstein::{
    self, fit_einstein_like, verify_c11_decomposition, verify_coefficient_constraints,
    verify_lie_formulas, verify_scalar_ode, verify_trace_formula, EinsteinLikeFit, EinsteinPoint,
    FitError, LieData,
};
use crate::geometry::GeometryError;
use crate::hypersurface::{
    self, check_ambient, check_induced_hypotheses, check_ps_characterization,
    quasi_umbilical_check, synthetic_gauss_check, verify_induced_derivatives, HypersurfaceError,
    SyntheticConfig,
};
use crate::models::{HypersurfaceBundle, Model, ModelError, ModelPoint};
use crate::paracontact::{
    check_axioms, check_curvature_invariants, check_para_sasakian, check_ps_curvature_identities,
    VECTORS_PER_POINT,
};
use crate::report::{CheckDef, CheckReport, Measurement, Tally, TOL_EXACT};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HypersurfacePart {
    Induced,
    Gauss,
    Characterization,
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Structure,
    Sasakian,
    Curvature,
    Einstein,
    Lie,
    Hypersurface(HypersurfacePart),
    Synthetic,
    /// Every model-level suite (including the hypersurface suite for bundles).
    All,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown suite `{0}`")]
pub struct UnknownSuite(pub String);

impl FromStr for Suite {
    type Err = UnknownSuite;

    fn from_str(s: &str) -> Result<Suite, UnknownSuite> {
        Ok(match s {
            "structure" => Suite::Structure,
            "sasakian" => Suite::Sasakian,
            "curvature" => Suite::Curvature,
            "einstein" => Suite::Einstein,
            "lie" => Suite::Lie,
            "hypersurface" => Suite::Hypersurface(HypersurfacePart::All),
            "synthetic" => Suite::Synthetic,
            "all" => Suite::All,
            _ => return Err(UnknownSuite(s.to_string())),
        })
    }
}

impl FromStr for HypersurfacePart {
    type Err = UnknownSuite;

    fn from_str(s: &str) -> Result<HypersurfacePart, UnknownSuite> {
        Ok(match s {
            "induced" => HypersurfacePart::Induced,
            "gauss" => HypersurfacePart::Gauss,
            "characterization" => HypersurfacePart::Characterization,
            "all" => HypersurfacePart::All,
            _ => return Err(UnknownSuite(s.to_string())),
        })
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Suite::Structure => "structure",
            Suite::Sasakian => "sasakian",
            Suite::Curvature => "curvature",
            Suite::Einstein => "einstein",
            Suite::Lie => "lie",
            Suite::Hypersurface(HypersurfacePart::All) => "hypersurface",
            Suite::Hypersurface(HypersurfacePart::Induced) => "hypersurface/induced",
            Suite::Hypersurface(HypersurfacePart::Gauss) => "hypersurface/gauss",
            Suite::Hypersurface(HypersurfacePart::Characterization) => {
                "hypersurface/characterization"
            }
            Suite::Synthetic => "synthetic",
            Suite::All => "all",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunConfig {
    pub points: usize,
    pub seed: u64,
    /// Multiplies every tolerance.
    pub tol_scale: f64,
    pub vectors: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            points: 100,
            seed: 42,
            tol_scale: 1.0,
            vectors: VECTORS_PER_POINT,
        }
    }
}

#[derive(Debug, Error)]
pub enum SuiteError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("geometry failed at {point:?}: {source}")]
    Geometry {
        point: Vec<f64>,
        source: GeometryError,
    },
    #[error(transparent)]
    Hypersurface(#[from] HypersurfaceError),
    #[error("suite `{0}` needs a hypersurface bundle")]
    NeedsBundle(Suite),
    #[error("Einstein-like fit failed: {0}")]
    Fit(#[from] FitError),
}

pub static METRIC_INDEX: CheckDef =
    CheckDef::new("metric.index", "ν = number of negative eigenvalues of g", TOL_EXACT);

/// Per-point rng: stream `1 + index` of the master seed.
pub fn point_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64 + 1);
    rng
}

/// The `count` sample points of a run.
pub fn sample_points(model: &Model, count: usize, seed: u64) -> Result<Vec<Vec<f64>>, ModelError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(0);
    model.sample_points(count, &mut rng)
}

struct PointRun {
    point: Vec<f64>,
    eval: ModelPoint,
    rng: ChaCha8Rng,
}

fn geo(point: &[f64]) -> impl Fn(GeometryError) -> SuiteError + '_ {
    move |source| SuiteError::Geometry {
        point: point.to_vec(),
        source,
    }
}

#[derive(Debug, Clone, Copy)]
struct Parts {
    structure: bool,
    sasakian: bool,
    curvature: bool,
    einstein: bool,
    lie: bool,
    hypersurface: Option<HypersurfacePart>,
}

impl Parts {
    fn of(suite: Suite, model: &Model) -> Parts {
        let none = Parts {
            structure: false,
            sasakian: false,
            curvature: false,
            einstein: false,
            lie: false,
            hypersurface: None,
        };
        match suite {
            Suite::Structure => Parts { structure: true, ..none },
            Suite::Sasakian => Parts { sasakian: true, ..none },
            Suite::Curvature => Parts { curvature: true, ..none },
            Suite::Einstein => Parts { einstein: true, ..none },
            Suite::Lie => Parts { lie: true, ..none },
            Suite::Hypersurface(p) => Parts {
                hypersurface: Some(p),
                ..none
            },
            Suite::Synthetic => none,
            Suite::All => Parts {
                structure: true,
                sasakian: true,
                curvature: true,
                einstein: true,
                lie: true,
                hypersurface: model.is_hypersurface().then_some(HypersurfacePart::All),
            },
        }
    }
}

/// Runs `suite` on `model`.
pub fn run_suite(model: &Model, suite: Suite, cfg: &RunConfig) -> Result<CheckReport, SuiteError> {
    let tally = match suite {
        Suite::Synthetic => synthetic_tally(&SyntheticConfig {
            epsilon: model.epsilon(),
            dim: model.dim(),
            trials: cfg.points,
            seed: cfg.seed,
            perturb: 0.0,
        }),
        _ => model_tally(model, suite, cfg)?,
    };
    Ok(CheckReport::new(
        model.name(),
        &suite.to_string(),
        cfg.seed,
        cfg.points,
        tally.records(cfg.tol_scale),
    ))
}

/// Runs the tangent-space Gauss check on its own.
pub fn run_synthetic(cfg: &SyntheticConfig, tol_scale: f64) -> CheckReport {
    let name = format!("synthetic(eps={:+},n={})", cfg.epsilon, cfg.dim);
    let name = if cfg.perturb != 0.0 {
        format!("{name},perturb={}", cfg.perturb)
    } else {
        name
    };
    CheckReport::new(
        &name,
        "synthetic",
        cfg.seed,
        cfg.trials,
        synthetic_tally(cfg).records(tol_scale),
    )
}

fn synthetic_tally(cfg: &SyntheticConfig) -> Tally {
    let mut tally = Tally::new();
    for trial in synthetic_gauss_check(cfg) {
        tally.extend(trial.measurements);
    }
    tally
}

fn model_tally(model: &Model, suite: Suite, cfg: &RunConfig) -> Result<Tally, SuiteError> {
    let parts = Parts::of(suite, model);
    let bundle = match model {
        Model::Hypersurface(b) => Some(b),
        Model::Manifold(_) => None,
    };
    if parts.hypersurface.is_some() && bundle.is_none() {
        return Err(SuiteError::NeedsBundle(suite));
    }
    let points = sample_points(model, cfg.points, cfg.seed)?;
    let mut runs: Vec<PointRun> = points
        .into_par_iter()
        .enumerate()
        .map(|(i, point)| {
            let eval = model.evaluate(&point)?;
            Ok(PointRun {
                point,
                eval,
                rng: point_rng(cfg.seed, i),
            })
        })
        .collect::<Result<_, SuiteError>>()?;

    let tallies: Vec<Tally> = runs
        .par_iter_mut()
        .map(|run| local_checks(model, bundle, parts, run, cfg.vectors))
        .collect::<Result<_, _>>()?;
    let mut tally = Tally::new();
    for t in tallies {
        tally.merge(t);
    }
    if parts.einstein || parts.lie {
        tally.merge(einstein_checks(&mut runs, parts, cfg)?);
    }
    Ok(tally)
}

/// Checks that need nothing beyond the point itself.
fn local_checks(
    model: &Model,
    bundle: Option<&HypersurfaceBundle>,
    parts: Parts,
    run: &mut PointRun,
    vectors: usize,
) -> Result<Tally, SuiteError> {
    let mut t = Tally::new();
    let rng = &mut run.rng;
    let ctx = run.eval.context();
    let computed = model.metric_index_at(&run.point)?;
    t.push(METRIC_INDEX.residual(computed.abs_diff(model.index()) as f64));
    if parts.structure {
        if let Some(ctx) = ctx {
            t.extend(check_axioms(ctx, rng, vectors));
        }
    }
    if parts.sasakian {
        if let Some(ctx) = ctx {
            t.extend(check_para_sasakian(ctx, rng, vectors).map_err(geo(&run.point))?);
        }
    }
    if parts.curvature {
        if let Some(ctx) = ctx {
            t.extend(check_curvature_invariants(ctx, rng, vectors).map_err(geo(&run.point))?);
            t.extend(check_ps_curvature_identities(ctx, rng, vectors).map_err(geo(&run.point))?);
        }
    }
    if let (Some(part), Some(b), Some(h)) = (parts.hypersurface, bundle, run.eval.hypersurface()) {
        let ms = hypersurface_checks(b, h, rng, vectors)?;
        t.extend(ms.into_iter().filter(|m| part_contains(part, m.def.id)));
    }
    Ok(t)
}

fn part_contains(part: HypersurfacePart, id: &str) -> bool {
    let gauss = ["hypersurface.gauss-equation", "ambient.curvature-ansatz"];
    let characterization = id.starts_with("characterization.") || id == "hypersurface.quasi-umbilical";
    match part {
        HypersurfacePart::All => true,
        HypersurfacePart::Gauss => gauss.contains(&id),
        HypersurfacePart::Characterization => characterization,
        HypersurfacePart::Induced => !gauss.contains(&id) && !characterization,
    }
}

fn hypersurface_checks(
    b: &HypersurfaceBundle,
    h: &hypersurface::HypersurfacePoint,
    rng: &mut ChaCha8Rng,
    vectors: usize,
) -> Result<Vec<Measurement>, SuiteError> {
    let mut out = check_ambient(&b.ambient, &h.ambient, rng, vectors);
    out.extend(check_induced_hypotheses(h, b.epsilon));
    if let Some(ctx) = &h.induced {
        out.extend(check_axioms(ctx, rng, vectors));
    }
    out.extend(verify_induced_derivatives(h, rng, vectors)?);
    match (&h.induced, &h.shape) {
        (Some(ctx), Some(shape)) => {
            let ch = check_ps_characterization(ctx, shape, rng, vectors)
                .map_err(geo(&h.jets.point))?;
            out.push(quasi_umbilical_check(ctx, shape, ch.rho_shape));
            out.extend(ch.measurements);
        }
        _ => out.extend(
            [
                &hypersurface::CHAR_FORWARD,
                &hypersurface::CHAR_CONVERSE,
                &hypersurface::CHAR_IFF,
                &hypersurface::CHAR_CONSTRUCTIVE,
                &hypersurface::QUASI_UMBILICAL,
            ]
            .map(CheckDef::not_applicable),
        ),
    }
    Ok(out)
}

fn einstein_defs() -> [&'static CheckDef; 20] {
    use einstein::*;
    [
        &FIT_RESIDUAL,
        &FIT_CONSTANT,
        &S_PHI,
        &S_XI,
        &COEFF_SUM,
        &SCALAR_FORMULA,
        &NABLA_Q,
        &DIV_Q,
        &SCALAR_REDUCED,
        &DR,
        &SCALAR_ODE,
        &TRACE_CONSTANT,
        &TRACE_FORMULA,
        &C11_SYMMETRIC,
        &C11_S_PHI,
        &C11_DECOMPOSITION,
        &C11_DECOMPOSITION_PRINTED,
        &C11_PARALLEL,
        &LIE_RICCI,
        &LIE_C11,
    ]
}

fn lie_defs() -> [&'static CheckDef; 8] {
    use einstein::*;
    [
        &LIE_ETA,
        &LIE_METRIC,
        &LIE_FUNDAMENTAL,
        &LIE_FUNDAMENTAL_PRINTED,
        &LIE_COORDINATE_FORM,
        &LIE_RICCI,
        &LIE_C11,
        &LIE_C11_PRINTED,
    ]
}

/// Outcome of the global fit over a run's sample points.
#[derive(Debug, Clone)]
pub struct GlobalFit {
    pub fit: EinsteinLikeFit,
    /// Largest coefficient difference between fits on the even- and
    /// odd-indexed halves; `None` with fewer than two points.
    pub constancy: Option<f64>,
    /// Spread of `trace(φ)` over the points.
    pub trace_spread: f64,
}

impl GlobalFit {
    pub fn compute(points: &[&EinsteinPoint]) -> Result<GlobalFit, FitError> {
        let samples: Vec<_> = points.iter().map(|p| p.fit_sample()).collect();
        let fit = fit_einstein_like(&samples)?;
        let constancy = if samples.len() >= 2 {
            let half = |parity: usize| {
                let s: Vec<_> = samples
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| i % 2 == parity)
                    .map(|(_, s)| s.clone())
                    .collect();
                fit_einstein_like(&s)
            };
            let (even, odd) = (half(0)?, half(1)?);
            Some(
                (0..3)
                    .map(|k| (even.coefficients[k] - odd.coefficients[k]).abs())
                    .fold(0.0, f64::max),
            )
        } else {
            None
        };
        let traces: Vec<f64> = points.iter().map(|p| p.trace_phi()).collect();
        let lo = traces.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = traces.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Ok(GlobalFit {
            fit,
            constancy,
            trace_spread: hi - lo,
        })
    }

    /// Residual and constancy both within tolerance.
    pub fn einstein_like(&self, tol_scale: f64) -> bool {
        self.fit.residual <= einstein::FIT_RESIDUAL.tolerance * tol_scale
            && self
                .constancy
                .is_none_or(|c| c <= einstein::FIT_CONSTANT.tolerance * tol_scale)
    }

    pub fn trace_constant(&self, tol_scale: f64) -> bool {
        self.trace_spread <= einstein::TRACE_CONSTANT.tolerance * tol_scale
    }
}

fn einstein_checks(runs: &mut [PointRun], parts: Parts, cfg: &RunConfig) -> Result<Tally, SuiteError> {
    let vectors = cfg.vectors;
    // phase 1: pointwise quantities
    let phase1: Vec<(Option<EinsteinPoint>, Option<LieData>)> = runs
        .par_iter_mut()
        .map(|run| {
            let Some(ctx) = run.eval.context() else {
                return Ok((None, None));
            };
            let ep = EinsteinPoint::compute(ctx, &mut run.rng).map_err(geo(&run.point))?;
            let lie = if parts.lie {
                LieData::compute(ctx).map_err(geo(&run.point))?
            } else {
                None
            };
            Ok((ep, lie))
        })
        .collect::<Result<_, SuiteError>>()?;

    let mut tally = Tally::new();
    let wanted: Vec<&'static CheckDef> = {
        let mut v: Vec<&'static CheckDef> = Vec::new();
        if parts.einstein {
            v.extend(einstein_defs());
        }
        if parts.lie {
            v.extend(lie_defs());
        }
        v
    };
    let eps: Vec<&EinsteinPoint> = phase1.iter().filter_map(|(e, _)| e.as_ref()).collect();
    if eps.is_empty() {
        tally.extend(wanted.iter().map(|d| d.not_applicable()));
        return Ok(tally);
    }
    let global = GlobalFit::compute(&eps)?;
    let einstein_like = global.einstein_like(cfg.tol_scale);
    let trace_constant = global.trace_constant(cfg.tol_scale);
    if parts.einstein {
        tally.push(einstein::FIT_RESIDUAL.residual(global.fit.residual));
        tally.push(match global.constancy {
            Some(c) => einstein::FIT_CONSTANT.residual(c),
            None => einstein::FIT_CONSTANT.vacuous(),
        });
        tally.push(einstein::TRACE_CONSTANT.residual(global.trace_spread));
    }
    // phase 2: consequences of the global fit
    let fit = &global.fit;
    let tallies: Vec<Tally> = runs
        .par_iter_mut()
        .zip(phase1.par_iter())
        .map(|(run, (ep, lie))| {
            let mut t = Tally::new();
            let Some(p) = ep else {
                t.extend(wanted.iter().map(|d| d.not_applicable()));
                return t;
            };
            let rng = &mut run.rng;
            if parts.einstein {
                if einstein_like {
                    t.extend(verify_coefficient_constraints(fit, p, rng, vectors));
                    t.extend(verify_scalar_ode(fit, p, rng, vectors));
                    t.push(verify_trace_formula(fit, p, trace_constant));
                } else {
                    use einstein::*;
                    t.extend(
                        [
                            &S_PHI,
                            &S_XI,
                            &COEFF_SUM,
                            &SCALAR_FORMULA,
                            &NABLA_Q,
                            &DIV_Q,
                            &SCALAR_REDUCED,
                            &DR,
                            &SCALAR_ODE,
                            &TRACE_FORMULA,
                        ]
                        .map(CheckDef::not_applicable),
                    );
                }
                t.extend(verify_c11_decomposition(fit, p, trace_constant, einstein_like));
            }
            if let Some(lie) = lie {
                let fit = einstein_like.then_some(fit);
                t.extend(verify_lie_formulas(lie, p, fit, trace_constant));
            }
            t
        })
        .collect();
    for t in tallies {
        tally.merge(t);
    }
    // the lie-only suite must not leak einstein records and vice versa
    tally.retain(|id| wanted.iter().any(|d| d.id == id));
    Ok(tally)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::builtin;
    use crate::report::Status;

    fn quick() -> RunConfig {
        RunConfig {
            points: 6,
            ..RunConfig::default()
        }
    }

    #[test]
    fn suite_names_parse() {
        for s in ["structure", "sasakian", "curvature", "einstein", "lie", "hypersurface", "synthetic", "all"] {
            assert_eq!(s.parse::<Suite>().unwrap().to_string(), s);
        }
        assert!("nope".parse::<Suite>().is_err());
    }

    #[test]
    fn negative_control_fails_structure() {
        let r = run_suite(&builtin("N1").unwrap(), Suite::Structure, &quick()).unwrap();
        assert_eq!(r.check("axiom.phi-squared").unwrap().status, Status::Fail);
        assert_eq!(r.exit_code(), 1);
    }

    #[test]
    fn hyperbolic_model_passes_everything() {
        let r = run_suite(&builtin("E1").unwrap(), Suite::All, &quick()).unwrap();
        assert_eq!(r.exit_code(), 0, "{}", r.to_text());
        assert_eq!(r.check("einstein.fit").unwrap().status, Status::Pass);
    }

    #[test]
    fn lie_suite_only_reports_lie_checks() {
        let r = run_suite(&builtin("E2").unwrap(), Suite::Lie, &quick()).unwrap();
        assert!(r.checks.iter().all(|c| c.id.starts_with("lie.") || c.id == "metric.index"));
        let mismatches = r
            .checks
            .iter()
            .filter(|c| c.status == Status::PrintedFormMismatch)
            .count();
        assert_eq!(mismatches, 2, "{}", r.to_text());
        assert_eq!(r.exit_code(), 0);
    }

    #[test]
    fn manifold_rejects_hypersurface_suite() {
        let e = run_suite(&builtin("E1").unwrap(), Suite::Hypersurface(HypersurfacePart::All), &quick());
        assert!(matches!(e, Err(SuiteError::NeedsBundle(_))));
    }
}
