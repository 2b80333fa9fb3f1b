//! Integral identities as residual functionals.
//!
//! Every check returns a signed residual (the integral the theorem says
//! vanishes) and a normalizer (the integral of the absolute values of the
//! integrand's parts). Pass/fail thresholds belong to the caller.
//!
//! Out-of-range curvature terms are zero (`H_{−1} = H_{n+1} = 0`), so the
//! Katsurada edge cases `i = 0` and `i = n` run through the same code.

use std::time::{Duration, Instant};

use crate::error::{Error, Result};
use crate::immersion::{Chart, Hypersurface, ShapeData};
use crate::quadrature::{integrate_shape, GridRule};
use crate::scalar::{binomial, Scalar};
use crate::spaceform::{
    killing_defect, position_field, AmbientKind, AmbientPoint, KillingField, KillingSample,
    PositionField, VectorField,
};

/// Threshold for certifying a Killing field before Katsurada evaluation.
pub const KILLING_THRESHOLD: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq)]
pub struct IdentityReport<S> {
    pub name: &'static str,
    pub i: i64,
    pub residual: S,
    pub normalizer: S,
    pub resolution: Vec<usize>,
    pub elapsed: Duration,
    /// Diagnostic attached to otherwise valid inputs (e.g. `j = 0` flux).
    pub note: Option<String>,
}

impl<S: Scalar> IdentityReport<S> {
    /// `|residual| / normalizer`, or `|residual|` when the normalizer is zero.
    pub fn relative(&self) -> S {
        if self.normalizer > S::zero() {
            self.residual.abs() / self.normalizer
        } else {
            self.residual.abs()
        }
    }

    pub fn passes(&self, tol: S) -> bool {
        self.residual.abs() <= tol * self.normalizer
    }
}

fn check_index(what: &'static str, i: i64, lo: i64, hi: i64) -> Result<()> {
    if i < lo || i > hi {
        return Err(Error::OutOfRange {
            what,
            detail: format!("{i} not in {lo}..={hi}"),
        });
    }
    Ok(())
}

fn finish<S: Scalar>(
    name: &'static str,
    i: i64,
    [residual, normalizer]: [S; 2],
    grid: &GridRule<S>,
    start: Instant,
) -> IdentityReport<S> {
    IdentityReport {
        name,
        i,
        residual,
        normalizer,
        resolution: grid.resolution(),
        elapsed: start.elapsed(),
        note: None,
    }
}

/// The two parts `(λ·H_i, ⟨P,ν⟩·H_{i+1})` of the Hsiung–Minkowski integrand.
pub fn spaceform_integrand<S: Scalar>(
    field: &PositionField<S>,
    shape: &ShapeData<S>,
    i: i64,
) -> Result<(S, S)> {
    let p = &shape.first.point;
    let model = field.model();
    let h = shape.mean_curvatures();
    let lambda = field.lambda(p)?;
    let pn = model.metric(p, &field.value(p)?, &shape.first.normal);
    Ok((lambda * h.get(i), pn * h.get(i + 1)))
}

fn minkowski_type<S: Scalar, C: Chart<S>>(
    name: &'static str,
    surface: &Hypersurface<S, C>,
    base: &AmbientPoint<S>,
    i: i64,
    grid: &GridRule<S>,
) -> Result<IdentityReport<S>> {
    let start = Instant::now();
    check_index("Minkowski index", i, 0, surface.dim() as i64 - 1)?;
    let field = position_field(surface.ambient(), base)?;
    let sums = integrate_shape(surface, grid, |shape| {
        let (a, b) = spaceform_integrand(&field, shape, i)?;
        Ok([a - b, a.abs() + b.abs()])
    })?;
    Ok(finish(name, i, sums, grid, start))
}

/// `∫_N (H_i − ⟨P,ν⟩H_{i+1})` in Euclidean space, `P = x − base`.
pub fn minkowski_residual<S: Scalar, C: Chart<S>>(
    surface: &Hypersurface<S, C>,
    base: &AmbientPoint<S>,
    i: i64,
    grid: &GridRule<S>,
) -> Result<IdentityReport<S>> {
    if surface.ambient().kind() != AmbientKind::Euclidean {
        return Err(Error::Unsupported(
            "the Minkowski formula is posed in Euclidean space; use the space-form version".into(),
        ));
    }
    minkowski_type("minkowski", surface, base, i, grid)
}

/// `∫_N (λ_c(r) H_i − ⟨P,ν⟩H_{i+1})` in a space form of curvature `c`.
pub fn spaceform_residual<S: Scalar, C: Chart<S>>(
    surface: &Hypersurface<S, C>,
    base: &AmbientPoint<S>,
    i: i64,
    grid: &GridRule<S>,
) -> Result<IdentityReport<S>> {
    if surface.ambient().curvature().is_none() {
        return Err(Error::NonConstantCurvature);
    }
    minkowski_type("spaceform", surface, base, i, grid)
}

/// `∫_N ⟨v₀,ν⟩ H_j` for a constant vector `v₀` in Euclidean space.
///
/// `j = 0` is accepted as a diagnostic (it is the divergence theorem) and
/// flagged in the report's note.
pub fn flux_residual<S: Scalar, C: Chart<S>>(
    surface: &Hypersurface<S, C>,
    v0: &[S],
    j: i64,
    grid: &GridRule<S>,
) -> Result<IdentityReport<S>> {
    let start = Instant::now();
    let amb = surface.ambient();
    if amb.kind() != AmbientKind::Euclidean {
        return Err(Error::Unsupported(
            "flux identity needs a parallel field".into(),
        ));
    }
    if v0.len() != amb.coord_len() {
        return Err(Error::Dimension {
            expected: amb.coord_len(),
            got: v0.len(),
        });
    }
    check_index("flux index", j, 0, surface.dim() as i64)?;
    let sums = integrate_shape(surface, grid, |shape| {
        let x = crate::linalg::dot(v0, &shape.first.normal) * shape.mean_curvatures().get(j);
        Ok([x, x.abs()])
    })?;
    let mut report = finish("flux", j, sums, grid, start);
    if j == 0 {
        report.note = Some("j = 0 is outside the stated range (divergence-theorem case)".into());
    }
    Ok(report)
}

/// Checks `X` against the Killing equation on `{T_j, ν}` at a spread of
/// grid nodes.
pub fn certify_killing<S: Scalar, C: Chart<S>>(
    surface: &Hypersurface<S, C>,
    field: &KillingField<S>,
    grid: &GridRule<S>,
) -> Result<S> {
    let amb = surface.ambient();
    let picks = 8.min(grid.len());
    let mut samples = Vec::new();
    for k in 0..picks {
        let (u, _) = grid.node(k * grid.len() / picks.max(1));
        let first = crate::immersion::frame_at(surface, &u)?;
        let mut dirs = first.frame.clone();
        dirs.push(first.normal.clone());
        for (a, y) in dirs.iter().enumerate() {
            for z in &dirs[a..] {
                samples.push(KillingSample {
                    point: first.point.clone(),
                    y: y.clone(),
                    z: z.clone(),
                });
            }
        }
    }
    let defect = killing_defect(amb, field, &samples, surface.backend())?;
    if !(defect <= S::of(KILLING_THRESHOLD)) {
        return Err(Error::NotKilling {
            defect: defect.primal(),
            threshold: KILLING_THRESHOLD,
        });
    }
    Ok(defect)
}

fn space_form_curvature<S: Scalar, C: Chart<S>>(surface: &Hypersurface<S, C>) -> Result<S> {
    surface
        .ambient()
        .curvature()
        .ok_or(Error::NonConstantCurvature)
}

fn killing_normal<S: Scalar>(
    surface_amb: &crate::spaceform::AmbientModel<S>,
    field: &KillingField<S>,
    shape: &ShapeData<S>,
) -> S {
    let p = &shape.first.point;
    surface_amb.metric(p, &field.eval(p), &shape.first.normal)
}

/// `∫_N ⟨X,ν⟩ [(i+1)·binom(n,i+1)H_{i+1} − c(n−i+1)·binom(n,i−1)H_{i−1}]`.
pub fn katsurada_residual<S: Scalar, C: Chart<S>>(
    surface: &Hypersurface<S, C>,
    field: &KillingField<S>,
    i: i64,
    grid: &GridRule<S>,
) -> Result<IdentityReport<S>> {
    let start = Instant::now();
    let n = surface.dim() as i64;
    check_index("Katsurada index", i, 0, n)?;
    let c = space_form_curvature(surface)?;
    certify_killing(surface, field, grid)?;
    let amb = surface.ambient();
    let up = S::of_usize((i + 1) as usize);
    let down = c * S::of_usize((n - i + 1) as usize);
    let sums = integrate_shape(surface, grid, |shape| {
        let xn = killing_normal(amb, field, shape);
        let h = shape.mean_curvatures();
        let a = up * xn * h.weighted(i + 1);
        let b = down * xn * h.weighted(i - 1);
        Ok([a - b, a.abs() + b.abs()])
    })?;
    Ok(finish("katsurada", i, sums, grid, start))
}

/// Both sides of `∫⟨X,ν⟩H_{i+1} = (ic/(n−i)) ∫⟨X,ν⟩H_{i−1}`.
///
/// The report's residual is `lhs − rhs`; its normalizer integrates the
/// absolute values of both integrands.
pub fn katsurada_ratio<S: Scalar, C: Chart<S>>(
    surface: &Hypersurface<S, C>,
    field: &KillingField<S>,
    i: i64,
    grid: &GridRule<S>,
) -> Result<(S, S, IdentityReport<S>)> {
    let start = Instant::now();
    let n = surface.dim() as i64;
    if n % 2 != 0 {
        return Err(Error::OutOfRange {
            what: "hypersurface dimension",
            detail: format!("n = {n} must be even"),
        });
    }
    check_index("Katsurada ratio index", i, 1, n - 1)?;
    let c = space_form_curvature(surface)?;
    certify_killing(surface, field, grid)?;
    let amb = surface.ambient();
    let factor = S::of_usize(i as usize) * c / S::of_usize((n - i) as usize);
    let [lhs, rhs, norm] = integrate_shape(surface, grid, |shape| {
        let xn = killing_normal(amb, field, shape);
        let h = shape.mean_curvatures();
        let a = xn * h.get(i + 1);
        let b = factor * xn * h.get(i - 1);
        Ok([a, b, a.abs() + b.abs()])
    })?;
    let report = finish("katsurada_ratio", i, [lhs - rhs, norm], grid, start);
    Ok((lhs, rhs, report))
}

/// Order-`i` Katsurada weight `(i+1)·binom(n,i+1) = (n−i)·binom(n,i)`.
pub fn ladder(n: i64, i: i64) -> (u128, u128) {
    (
        (i + 1) as u128 * binomial(n, i + 1),
        (n - i).max(0) as u128 * binomial(n, i),
    )
}
