//! Helpers shared by the integration tests: model evaluation shortcuts and
//! an independent finite-difference curvature pipeline.
#![allow(dead_code)]

use nalgebra::DMatrix;

use paracontact::einstein::EinsteinPoint;
use paracontact::hypersurface::HypersurfacePoint;
use paracontact::jet::{eval_f64, jet_eval};
use paracontact::models::{builtin, Model, ModelPoint};
use paracontact::paracontact::PointContext;
use paracontact::report::{CheckReport, Status};
use paracontact::suite::{point_rng, run_suite, sample_points, RunConfig, Suite};

pub fn model(name: &str) -> Model {
    builtin(name).unwrap_or_else(|| panic!("no builtin model `{name}`"))
}

pub fn report(name: &str, suite: Suite, points: usize, seed: u64) -> CheckReport {
    let cfg = RunConfig {
        points,
        seed,
        ..RunConfig::default()
    };
    run_suite(&model(name), suite, &cfg).expect("suite runs")
}

/// Largest residual recorded for `id`; panics when the check is missing or
/// was never evaluated.
pub fn residual(report: &CheckReport, id: &str) -> f64 {
    let rec = report
        .check(id)
        .unwrap_or_else(|| panic!("{}: no check `{id}`", report.model));
    rec.residual
        .unwrap_or_else(|| panic!("{}: `{id}` has status {:?}", report.model, rec.status))
}

pub fn status(report: &CheckReport, id: &str) -> Status {
    report
        .check(id)
        .unwrap_or_else(|| panic!("{}: no check `{id}`", report.model))
        .status
}

/// Point contexts of a manifold model at the suite's sample points.
pub fn contexts(m: &Model, count: usize, seed: u64) -> Vec<PointContext> {
    sample_points(m, count, seed)
        .expect("sampling succeeds")
        .iter()
        .map(|p| match m.evaluate(p).expect("point evaluates") {
            ModelPoint::Manifold(ctx) => ctx,
            ModelPoint::Hypersurface(_) => panic!("{} is a hypersurface bundle", m.name()),
        })
        .collect()
}

pub fn hypersurface_points(m: &Model, count: usize, seed: u64) -> Vec<HypersurfacePoint> {
    sample_points(m, count, seed)
        .expect("sampling succeeds")
        .iter()
        .map(|p| match m.evaluate(p).expect("point evaluates") {
            ModelPoint::Hypersurface(h) => *h,
            ModelPoint::Manifold(_) => panic!("{} is not a hypersurface bundle", m.name()),
        })
        .collect()
}

pub fn einstein_points(m: &Model, count: usize, seed: u64) -> Vec<EinsteinPoint> {
    contexts(m, count, seed)
        .iter()
        .enumerate()
        .map(|(i, ctx)| {
            EinsteinPoint::compute(ctx, &mut point_rng(seed, i))
                .expect("geometry evaluates")
                .expect("model carries a structure")
        })
        .collect()
}

/// Metric components as plain numbers: the model's own metric, or for a
/// bundle the pull-back `g̃(∂_aF, ∂_bF)` with `∂F` from first-order jets.
pub fn metric_fn(m: &Model) -> impl Fn(&[f64]) -> DMatrix<f64> + '_ {
    move |p: &[f64]| match m {
        Model::Manifold(mm) => {
            let n = mm.coords.len();
            DMatrix::from_fn(n, n, |i, j| eval_f64(&mm.metric[i * n + j], p).unwrap())
        }
        Model::Hypersurface(b) => {
            let n = b.coords.len();
            let big = b.ambient.coords.len();
            let image: Vec<f64> = b.embedding.map.iter().map(|e| eval_f64(e, p).unwrap()).collect();
            let gt = DMatrix::from_fn(big, big, |a, c| {
                eval_f64(&b.ambient.metric[a * big + c], &image).unwrap()
            });
            let df = DMatrix::from_fn(big, n, |a, i| {
                jet_eval(&b.embedding.map[a], p, 1).unwrap().gradient()[i]
            });
            df.transpose() * gt * df
        }
    }
}

/// Curvature computed by nested central differences: metric derivatives at
/// step `1e-4`, Christoffel derivatives at step `1e-3`.
#[derive(Debug, Clone)]
pub struct FdCurvature {
    /// `R^l_{ijk}` at index `((l·n + i)·n + j)·n + k`.
    pub riemann: Vec<f64>,
    pub ricci: DMatrix<f64>,
    pub scalar: f64,
    pub metric: DMatrix<f64>,
}

pub const FD_METRIC_STEP: f64 = 1e-4;
pub const FD_GAMMA_STEP: f64 = 1e-3;

fn shifted(p: &[f64], i: usize, h: f64) -> Vec<f64> {
    let mut q = p.to_vec();
    q[i] += h;
    q
}

/// `Γ^k_{ij}` at index `(k·n + i)·n + j`.
pub fn fd_christoffel(metric: &dyn Fn(&[f64]) -> DMatrix<f64>, p: &[f64]) -> Vec<f64> {
    let n = p.len();
    let h = FD_METRIC_STEP;
    let dg: Vec<DMatrix<f64>> = (0..n)
        .map(|l| (metric(&shifted(p, l, h)) - metric(&shifted(p, l, -h))) / (2.0 * h))
        .collect();
    let inv = metric(p).try_inverse().expect("metric is non-degenerate");
    let mut gamma = vec![0.0; n * n * n];
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                gamma[(k * n + i) * n + j] = (0..n)
                    .map(|l| 0.5 * inv[(k, l)] * (dg[i][(j, l)] + dg[j][(i, l)] - dg[l][(i, j)]))
                    .sum();
            }
        }
    }
    gamma
}

pub fn fd_curvature(metric: &dyn Fn(&[f64]) -> DMatrix<f64>, p: &[f64]) -> FdCurvature {
    let n = p.len();
    let h = FD_GAMMA_STEP;
    let gamma = fd_christoffel(metric, p);
    // dgamma[m][(l·n + j)·n + k] = ∂_m Γ^l_{jk}
    let dgamma: Vec<Vec<f64>> = (0..n)
        .map(|m| {
            let plus = fd_christoffel(metric, &shifted(p, m, h));
            let minus = fd_christoffel(metric, &shifted(p, m, -h));
            plus.iter().zip(&minus).map(|(a, b)| (a - b) / (2.0 * h)).collect()
        })
        .collect();
    let gm = |l: usize, i: usize, j: usize| gamma[(l * n + i) * n + j];
    let mut riemann = vec![0.0; n * n * n * n];
    for l in 0..n {
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let mut acc = dgamma[i][(l * n + j) * n + k] - dgamma[j][(l * n + i) * n + k];
                    for m in 0..n {
                        acc += gm(l, i, m) * gm(m, j, k) - gm(l, j, m) * gm(m, i, k);
                    }
                    riemann[((l * n + i) * n + j) * n + k] = acc;
                }
            }
        }
    }
    let ricci = DMatrix::from_fn(n, n, |j, k| (0..n).map(|i| riemann[((i * n + i) * n + j) * n + k]).sum());
    let g = metric(p);
    let inv = g.clone().try_inverse().expect("metric is non-degenerate");
    let scalar = inv.component_mul(&ricci).sum();
    FdCurvature {
        riemann,
        ricci,
        scalar,
        metric: g,
    }
}

/// `max |a − b| / max(1, max |b|)`.
pub fn relative_gap(a: &[f64], b: &[f64]) -> f64 {
    let scale = b.iter().fold(1.0_f64, |m, v| m.max(v.abs()));
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max) / scale
}
