//! Turning a parsed scenario into identity reports.

use std::time::{Duration, Instant};

use curvint_core::identities::{
    flux_residual, katsurada_ratio, katsurada_residual, minkowski_residual, spaceform_integrand,
    spaceform_residual,
};
use curvint_core::immersion::{shape_operator_at, Hypersurface, ShapeData};
use curvint_core::linalg::Matrix;
use curvint_core::quadrature::{surface_grid, GridRule};
use curvint_core::spaceform::{
    killing_field, position_field, warp_functions, AmbientKind, AmbientModel, DerivativeBackend,
    KillingField, Warp,
};
use curvint_core::surfaces::Builtin;
use curvint_core::{Grid64, Model64, Point64, Report64, Surface64};
use rayon::prelude::*;

use crate::error::CliError;
use crate::scenario::{AmbientSpec, CheckKind, CheckSpec, Scenario, SurfaceKind};

/// One CSV row.
#[derive(Clone, Debug, PartialEq)]
pub struct Row {
    pub identity: String,
    pub i: i64,
    pub residual: f64,
    pub normalizer: f64,
    pub tolerance: f64,
    pub resolution: Vec<usize>,
    /// Free-form diagnostic shown in the summary, never in the CSV.
    pub note: Option<String>,
}

impl Row {
    pub fn relative(&self) -> f64 {
        if self.normalizer > 0.0 {
            self.residual.abs() / self.normalizer
        } else {
            self.residual.abs()
        }
    }

    pub fn passes(&self) -> bool {
        self.residual.abs() <= self.tolerance * self.normalizer
    }

    fn from_report(r: Report64, tolerance: f64, identity: String) -> Self {
        Row {
            identity,
            i: r.i,
            residual: r.residual,
            normalizer: r.normalizer,
            tolerance,
            resolution: r.resolution,
            note: r.note,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Report {
    pub rows: Vec<Row>,
    pub elapsed: Duration,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(Row::passes)
    }
}

/// Everything a check needs, built once per scenario.
pub struct Experiment {
    pub surface: Surface64,
    pub base: Point64,
    pub killing: Option<KillingField<f64>>,
    pub v0: Vec<Vec<f64>>,
    /// Principal curvature every point of the surface should have, when
    /// the surface is a known umbilic one.
    pub umbilic_value: Option<f64>,
    pub checks: Vec<CheckSpec>,
    pub resolution: Vec<usize>,
}

fn ambient_model(spec: &AmbientSpec) -> Result<Model64, CliError> {
    Ok(match spec {
        AmbientSpec::Euclidean { dim } => AmbientModel::euclidean(*dim),
        AmbientSpec::Sphere { dim, radius } => AmbientModel::sphere(*dim, *radius)?,
        AmbientSpec::Hyperboloid { dim, radius } => AmbientModel::hyperboloid(*dim, *radius)?,
        AmbientSpec::WarpedSpaceForm { dim, c } => {
            AmbientModel::warped(*dim, Warp::SpaceForm { c: *c })
        }
        AmbientSpec::WarpedPolynomial { dim, coeffs } => {
            AmbientModel::warped(*dim, Warp::Polynomial(coeffs.clone()))
        }
    })
}

fn chart(kind: &SurfaceKind, model: &Model64) -> Result<Builtin<f64>, CliError> {
    let n = model.dim() - 1;
    let flat_only = |name: &str| {
        if model.kind() == AmbientKind::Euclidean {
            Ok(())
        } else {
            Err(CliError::input(format!(
                "{name} surfaces are built in a Euclidean ambient"
            )))
        }
    };
    let surface_3d = |name: &str| {
        flat_only(name)?;
        if n == 2 {
            Ok(())
        } else {
            Err(CliError::input(format!(
                "{name} needs a 3-dimensional ambient"
            )))
        }
    };
    Ok(match kind {
        SurfaceKind::Sphere { radius, center } => {
            flat_only("sphere")?;
            let center = center.clone().unwrap_or_else(|| vec![0.0; n + 1]);
            if center.len() != n + 1 {
                return Err(CliError::input(format!(
                    "center needs {} coordinates",
                    n + 1
                )));
            }
            Builtin::Sphere {
                n,
                radius: *radius,
                center,
            }
        }
        SurfaceKind::Torus { major, minor } => {
            surface_3d("torus")?;
            Builtin::Torus {
                major: *major,
                minor: *minor,
            }
        }
        SurfaceKind::Ellipsoid { axes } => {
            surface_3d("ellipsoid")?;
            Builtin::Ellipsoid { axes: *axes }
        }
        SurfaceKind::GeodesicSphere { rho } => {
            if model.kind() == AmbientKind::SphereEmbedded
                && *rho >= std::f64::consts::PI * model.radius()
            {
                return Err(CliError::input(
                    "geodesic sphere radius must stay below πR₀",
                ));
            }
            Builtin::GeodesicSphere {
                model: model.clone(),
                rho: *rho,
            }
        }
        SurfaceKind::LatitudeSphere { t } => Builtin::LatitudeSphere {
            n,
            radius: model.radius(),
            t: *t,
        },
    })
}

/// Principal curvature of a totally umbilic built-in under the default
/// orientation (outward normal).
fn umbilic_value(
    kind: &SurfaceKind,
    model: &Model64,
    chart: &Builtin<f64>,
) -> Result<Option<f64>, CliError> {
    Ok(match kind {
        SurfaceKind::Sphere { radius, .. } => Some(1.0 / radius),
        SurfaceKind::GeodesicSphere { rho } => match model.warp() {
            Some(w) => Some(w.derivative(*rho) / w.eval(*rho)),
            None => {
                let c = model.curvature().expect("embedded models are space forms");
                let (s, lambda) = warp_functions(c, *rho)?;
                Some(lambda / s)
            }
        },
        SurfaceKind::LatitudeSphere { t } => {
            let rt = chart.latitude_radius().expect("latitude chart");
            Some(-t / (model.radius() * rt))
        }
        _ => None,
    })
}

fn plane_generator(model: &Model64, a: usize, b: usize) -> Result<Matrix<f64>, CliError> {
    let len = model.coord_len();
    if a >= len || b >= len {
        return Err(CliError::input(format!(
            "rotation indices must be below {len}"
        )));
    }
    let mut m = Matrix::zeros(len, len);
    if model.kind() == AmbientKind::Hyperboloid && (a == 0 || b == 0) {
        // a boost mixing the timelike axis
        m[(a, b)] = 1.0;
        m[(b, a)] = 1.0;
    } else {
        m[(a, b)] = -1.0;
        m[(b, a)] = 1.0;
    }
    Ok(m)
}

impl Experiment {
    pub fn new(s: &Scenario) -> Result<Self, CliError> {
        let model = ambient_model(&s.ambient)?;
        let chart = chart(&s.surface.kind, &model)?;
        let umbilic = umbilic_value(&s.surface.kind, &model, &chart)?
            .map(|k| k * f64::from(s.surface.normal_sign));
        let backend = match s.surface.backend.as_str() {
            "analytic" => DerivativeBackend::Analytic,
            "central" => DerivativeBackend::Central,
            _ => DerivativeBackend::Forward,
        };
        let surface = Hypersurface::new(model.clone(), chart)?
            .with_normal_sign(s.surface.normal_sign)
            .with_backend(backend);

        let base = match &s.field.base {
            None => model.pole(),
            Some(coords) if model.kind() == AmbientKind::WarpedProduct => {
                if coords.len() != model.coord_len() {
                    return Err(CliError::input(format!(
                        "base needs {} coordinates",
                        model.coord_len()
                    )));
                }
                Point64 {
                    coords: coords.clone(),
                }
            }
            Some(coords) => model.point(coords.clone())?,
        };

        let generator = match (&s.field.generator, s.field.rotation) {
            (Some(rows), _) => {
                if rows.iter().any(|r| r.len() != rows.len()) {
                    return Err(CliError::input("generator must be a square matrix"));
                }
                Some(Matrix::from_rows(rows))
            }
            (None, Some((a, b))) => Some(plane_generator(&model, a, b)?),
            (None, None) if s.field.translation.is_some() => {
                Some(Matrix::zeros(model.coord_len(), model.coord_len()))
            }
            (None, None) => None,
        };
        let killing = generator
            .map(|g| killing_field(&model, g, s.field.translation.clone()))
            .transpose()?;

        for v in &s.field.v0 {
            if v.len() != model.coord_len() {
                return Err(CliError::input(format!(
                    "v0 needs {} coordinates",
                    model.coord_len()
                )));
            }
        }

        for check in &s.checks {
            let missing = match check.kind {
                CheckKind::Katsurada | CheckKind::KatsuradaRatio => killing
                    .is_none()
                    .then_some("a Killing generator (rotation, generator or translation)"),
                CheckKind::Flux => s.field.v0.is_empty().then_some("v0"),
                CheckKind::ClosedFormH | CheckKind::PrincipalCurvatures => umbilic
                    .is_none()
                    .then_some("a surface with known closed-form curvatures"),
                _ => None,
            };
            if let Some(what) = missing {
                return Err(CliError::Parse {
                    line: check.line,
                    msg: format!("`{}` needs {what}", check.kind.name()),
                });
            }
        }

        Ok(Experiment {
            surface,
            base,
            killing,
            v0: s.field.v0.clone(),
            umbilic_value: umbilic,
            checks: s.checks.clone(),
            resolution: s.resolution.clone(),
        })
    }

    pub fn grid(&self, scale: usize) -> Result<Grid64, CliError> {
        let res: Vec<usize> = self.resolution.iter().map(|r| r * scale).collect();
        Ok(surface_grid(&self.surface, &res)?)
    }

    fn killing(&self) -> &KillingField<f64> {
        self.killing.as_ref().expect("checked at construction")
    }

    /// Runs every check at `resolution × scale`.
    pub fn run(&self, scale: usize) -> Result<Report, CliError> {
        let start = Instant::now();
        let grid = self.grid(scale)?;
        let jobs: Vec<(&CheckSpec, i64, Option<usize>)> = self
            .checks
            .iter()
            .flat_map(|c| {
                let v0s: Vec<Option<usize>> = if c.kind == CheckKind::Flux {
                    (0..self.v0.len()).map(Some).collect()
                } else {
                    vec![None]
                };
                v0s.into_iter()
                    .flat_map(move |v| c.indices.iter().map(move |&i| (c, i, v)))
            })
            .collect();
        let rows = jobs
            .par_iter()
            .map(|&(c, i, v)| self.evaluate(c, i, v, &grid))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Report {
            rows,
            elapsed: start.elapsed(),
        })
    }

    fn evaluate(
        &self,
        check: &CheckSpec,
        i: i64,
        v0: Option<usize>,
        grid: &Grid64,
    ) -> Result<Row, CliError> {
        let s = &self.surface;
        let tol = check.tol;
        let name = check.kind.name().to_string();
        let row = match check.kind {
            CheckKind::Minkowski => {
                Row::from_report(minkowski_residual(s, &self.base, i, grid)?, tol, name)
            }
            CheckKind::Spaceform => {
                Row::from_report(spaceform_residual(s, &self.base, i, grid)?, tol, name)
            }
            CheckKind::Flux => {
                let k = v0.expect("flux jobs carry a v0");
                let name = if self.v0.len() > 1 {
                    format!("flux[{}]", k + 1)
                } else {
                    name
                };
                Row::from_report(flux_residual(s, &self.v0[k], i, grid)?, tol, name)
            }
            CheckKind::Katsurada => {
                Row::from_report(katsurada_residual(s, self.killing(), i, grid)?, tol, name)
            }
            CheckKind::KatsuradaRatio => {
                let (lhs, rhs, r) = katsurada_ratio(s, self.killing(), i, grid)?;
                let mut row = Row::from_report(r, tol, name);
                row.normalizer += lhs.abs() + rhs.abs();
                row.note = Some(format!("lhs {lhs:.6e}, rhs {rhs:.6e}"));
                row
            }
            CheckKind::PointwiseMinkowski => {
                if !(0..s.dim() as i64).contains(&i) {
                    return Err(CliError::Parse {
                        line: check.line,
                        msg: format!("index {i} outside 0..={}", s.dim() - 1),
                    });
                }
                let field = position_field(s.ambient(), &self.base)?;
                let dev = max_over_nodes(s, grid, |shape| {
                    let (a, b) = spaceform_integrand(&field, shape, i)?;
                    Ok((a - b).abs())
                })?;
                pointwise_row(name, i, dev.0, tol, grid, None)
            }
            CheckKind::ClosedFormH => {
                if !(0..=s.dim() as i64).contains(&i) {
                    return Err(CliError::Parse {
                        line: check.line,
                        msg: format!("index {i} outside 0..={}", s.dim()),
                    });
                }
                let expected = self
                    .umbilic_value
                    .expect("checked at construction")
                    .powi(i as i32);
                let (dev, worst) = max_over_nodes(s, grid, |shape| {
                    Ok((shape.mean_curvatures().get(i) - expected).abs())
                })?;
                let computed = shape_operator_at(s, &grid.node(worst).0)?
                    .mean_curvatures()
                    .get(i);
                let note = format!("H_{i} computed {computed:.12e}, closed form {expected:.12e}");
                pointwise_row(name, i, dev, tol, grid, Some(note))
            }
            CheckKind::PrincipalCurvatures => {
                let expected = self.umbilic_value.expect("checked at construction");
                let (dev, _) = max_over_nodes(s, grid, |shape| {
                    Ok(shape
                        .principal_curvatures()
                        .iter()
                        .map(|k| (k - expected).abs())
                        .fold(0.0, f64::max))
                })?;
                let note = format!("closed form {expected:.12e}");
                pointwise_row(name, 0, dev, tol, grid, Some(note))
            }
            CheckKind::Umbilic => {
                let (dev, _) = max_over_nodes(s, grid, |shape| {
                    let k = shape.principal_curvatures();
                    Ok(k.last().copied().unwrap_or(0.0) - k.first().copied().unwrap_or(0.0))
                })?;
                pointwise_row(name, 0, dev, tol, grid, None)
            }
        };
        Ok(row)
    }
}

/// Absolute deviations are recorded with a unit normalizer so the verdict
/// `|residual| ≤ tol·normalizer` is an absolute bound.
fn pointwise_row(
    identity: String,
    i: i64,
    dev: f64,
    tol: f64,
    grid: &Grid64,
    note: Option<String>,
) -> Row {
    Row {
        identity,
        i,
        residual: dev,
        normalizer: 1.0,
        tolerance: tol,
        resolution: grid.resolution(),
        note,
    }
}

/// Maximum of a per-node quantity and the node where it occurs. The
/// reduction is order-independent, so thread count cannot change it.
fn max_over_nodes<F>(
    surface: &Surface64,
    grid: &GridRule<f64>,
    f: F,
) -> Result<(f64, usize), CliError>
where
    F: Fn(&ShapeData<f64>) -> curvint_core::Result<f64> + Sync,
{
    let worst = (0..grid.len())
        .into_par_iter()
        .map(|k| {
            let shape = shape_operator_at(surface, &grid.node(k).0)?;
            Ok((f(&shape)?, k))
        })
        .try_reduce(
            || (0.0, usize::MAX),
            |a, b| {
                // NaN wins, then the larger value, then the lower index
                Ok(
                    if a.0.is_nan() || (!b.0.is_nan() && (a.0 > b.0 || (a.0 == b.0 && a.1 < b.1))) {
                        a
                    } else {
                        b
                    },
                )
            },
        )
        .map_err(|e: curvint_core::Error| CliError::from(e))?;
    Ok(worst)
}
