//! Ambient spaces: Euclidean space, the round sphere and hyperbolic space as
//! embedded models, and warped products `dr² + ψ(r)² g_{Sⁿ}`.
//!
//! Coordinates are always those of the concrete realization:
//!
//! | kind            | coordinates             | membership                 |
//! |-----------------|-------------------------|----------------------------|
//! | `Euclidean`     | `x ∈ ℝ^m`               | none                       |
//! | `SphereEmbedded`| `x ∈ ℝ^{m+1}`           | `⟨x,x⟩ = R₀²`              |
//! | `Hyperboloid`   | `x ∈ ℝ^{1,m}`           | `⟨x,x⟩_L = −R₀², x⁰ > 0`   |
//! | `WarpedProduct` | `(r, y) ∈ ℝ × ℝ^m`      | `‖y‖ = 1`, `ψ(r) > 0`      |
//!
//! where `m = n + 1` is the ambient dimension. The sphere's pole sits on the
//! last coordinate axis, the hyperboloid's on the first (time) axis.

use crate::dual::{directional, Dual};
use crate::error::{Error, Result};
use crate::linalg::{axpy, dot, norm, scaled, sub, Matrix};
use crate::scalar::{Real, Scalar};

const MEMBERSHIP_TOL: f64 = 1e-12;
const SKEW_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum AmbientKind {
    Euclidean,
    SphereEmbedded,
    Hyperboloid,
    WarpedProduct,
}

/// Warping function ψ of a warped product.
#[derive(Clone, Debug, PartialEq)]
pub enum Warp<S> {
    /// ψ = s_c, which makes the warped product a space form of curvature `c`.
    SpaceForm { c: S },
    /// ψ(r) = Σ a_k r^k
    Polynomial(Vec<S>),
}

impl<S: Scalar> Warp<S> {
    pub fn eval<T: Real>(&self, r: T) -> T {
        match self {
            Warp::SpaceForm { c } => s_c(c.primal(), r),
            Warp::Polynomial(coeffs) => coeffs
                .iter()
                .rev()
                .fold(T::zero(), |acc, &a| acc * r + a.lift::<T>()),
        }
    }

    pub fn derivative(&self, r: S) -> S {
        match self {
            Warp::SpaceForm { c } => lambda_c(c.primal(), r),
            Warp::Polynomial(coeffs) => coeffs
                .iter()
                .enumerate()
                .skip(1)
                .rev()
                .fold(S::zero(), |acc, (k, &a)| acc * r + a * S::of_usize(k)),
        }
    }

    /// Sectional curvature when ψ = s_c; warped products with other warps
    /// are not space forms in general.
    pub fn constant_curvature(&self) -> Option<S> {
        match self {
            Warp::SpaceForm { c } => Some(*c),
            Warp::Polynomial(_) => None,
        }
    }

    /// Whether `r` lies in the open interval where the metric is defined.
    pub fn admits(&self, r: S) -> bool {
        if !(r > S::zero()) {
            return false;
        }
        if let Warp::SpaceForm { c } = self {
            if *c > S::zero() && r >= S::pi() / c.sqrt() {
                return false;
            }
        }
        self.eval(r) > S::zero()
    }
}

fn s_c<T: Real>(c: f64, r: T) -> T {
    if c > 0.0 {
        let k = c.sqrt();
        (r.mul_f64(k)).sin().mul_f64(1.0 / k)
    } else if c < 0.0 {
        let k = (-c).sqrt();
        (r.mul_f64(k)).sinh().mul_f64(1.0 / k)
    } else {
        r
    }
}

fn lambda_c<T: Real>(c: f64, r: T) -> T {
    if c > 0.0 {
        r.mul_f64(c.sqrt()).cos()
    } else if c < 0.0 {
        r.mul_f64((-c).sqrt()).cosh()
    } else {
        T::one()
    }
}

/// The warp pair `(s_c(r), λ_c(r))` with `λ_c = s_c′`.
///
/// `s_c(r)` is `sin(√c r)/√c`, `r`, or `sinh(√−c r)/√−c` for positive, zero
/// and negative `c`; `λ_c` is the matching `cos`, `1`, `cosh`.
pub fn warp_functions<S: Scalar>(c: S, r: S) -> Result<(S, S)> {
    if r < S::zero() {
        return Err(Error::OutOfRange {
            what: "geodesic radius",
            detail: format!("r = {r} < 0"),
        });
    }
    if c > S::zero() && r >= S::pi() / c.sqrt() {
        return Err(Error::OutOfRange {
            what: "geodesic radius",
            detail: format!("r = {r} ≥ π/√c for c = {c}"),
        });
    }
    Ok((s_c(c.primal(), r), lambda_c(c.primal(), r)))
}

#[derive(Clone, Debug, PartialEq)]
pub struct AmbientPoint<S> {
    pub coords: Vec<S>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TangentVector<S> {
    pub base: AmbientPoint<S>,
    pub vec: Vec<S>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AmbientModel<S> {
    kind: AmbientKind,
    dim: usize,
    radius: S,
    warp: Option<Warp<S>>,
}

/// Lorentz product with signature (−, +, …, +).
#[inline]
pub fn lorentz<T: Real>(u: &[T], v: &[T]) -> T {
    dot(&u[1..], &v[1..]) - u[0] * v[0]
}

impl<S: Scalar> AmbientModel<S> {
    pub fn euclidean(dim: usize) -> Self {
        AmbientModel {
            kind: AmbientKind::Euclidean,
            dim,
            radius: S::one(),
            warp: None,
        }
    }

    /// Round sphere of radius `radius` (curvature 1/R₀²) in ℝ^{dim+1}.
    pub fn sphere(dim: usize, radius: S) -> Result<Self> {
        Self::check_radius(radius)?;
        Ok(AmbientModel {
            kind: AmbientKind::SphereEmbedded,
            dim,
            radius,
            warp: None,
        })
    }

    /// Upper hyperboloid sheet of curvature −1/R₀².
    pub fn hyperboloid(dim: usize, radius: S) -> Result<Self> {
        Self::check_radius(radius)?;
        Ok(AmbientModel {
            kind: AmbientKind::Hyperboloid,
            dim,
            radius,
            warp: None,
        })
    }

    /// Warped product over the round unit sphere S^{dim−1}.
    pub fn warped(dim: usize, warp: Warp<S>) -> Self {
        AmbientModel {
            kind: AmbientKind::WarpedProduct,
            dim,
            radius: S::one(),
            warp: Some(warp),
        }
    }

    fn check_radius(radius: S) -> Result<()> {
        if radius > S::zero() && radius.is_finite() {
            Ok(())
        } else {
            Err(Error::OutOfRange {
                what: "model radius",
                detail: format!("R0 = {radius}"),
            })
        }
    }

    pub fn kind(&self) -> AmbientKind {
        self.kind
    }

    /// Ambient dimension `m = n + 1`.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn radius(&self) -> S {
        self.radius
    }

    pub fn warp(&self) -> Option<&Warp<S>> {
        self.warp.as_ref()
    }

    /// Length of a coordinate vector in this realization.
    pub fn coord_len(&self) -> usize {
        match self.kind {
            AmbientKind::Euclidean => self.dim,
            _ => self.dim + 1,
        }
    }

    pub fn is_embedded(&self) -> bool {
        matches!(
            self.kind,
            AmbientKind::SphereEmbedded | AmbientKind::Hyperboloid
        )
    }

    /// Sectional curvature, when constant.
    pub fn curvature(&self) -> Option<S> {
        let r2 = self.radius * self.radius;
        match self.kind {
            AmbientKind::Euclidean => Some(S::zero()),
            AmbientKind::SphereEmbedded => Some(S::one() / r2),
            AmbientKind::Hyperboloid => Some(-S::one() / r2),
            AmbientKind::WarpedProduct => self.warp.as_ref().and_then(Warp::constant_curvature),
        }
    }

    /// Distinguished point: the origin, the sphere's pole `R₀e_last`, the
    /// hyperboloid's vertex `R₀e_0`. Warped products have none in their
    /// coordinate domain (`r = 0` is excluded); `r = 0` is returned with
    /// `y = e_1` and is accepted as a distance base.
    pub fn pole(&self) -> AmbientPoint<S> {
        let mut c = vec![S::zero(); self.coord_len()];
        match self.kind {
            AmbientKind::Euclidean => {}
            AmbientKind::SphereEmbedded => *c.last_mut().unwrap() = self.radius,
            AmbientKind::Hyperboloid => c[0] = self.radius,
            AmbientKind::WarpedProduct => c[1] = S::one(),
        }
        AmbientPoint { coords: c }
    }

    fn warp_ref(&self) -> &Warp<S> {
        self.warp.as_ref().expect("warped model carries a warp")
    }

    /// Relative violation of the model membership constraint.
    pub fn membership_residual(&self, p: &[S]) -> S {
        let r2 = self.radius * self.radius;
        match self.kind {
            AmbientKind::Euclidean => S::zero(),
            AmbientKind::SphereEmbedded => (dot(p, p) - r2).abs() / r2,
            AmbientKind::Hyperboloid => {
                let base = (lorentz(p, p) + r2).abs() / dot(p, p).max(r2);
                if p[0] > S::zero() {
                    base
                } else {
                    base.max(S::one())
                }
            }
            AmbientKind::WarpedProduct => {
                let y = &p[1..];
                let unit = (dot(y, y) - S::one()).abs();
                if p[0] == S::zero() || self.warp_ref().admits(p[0]) {
                    unit
                } else {
                    unit.max(S::one())
                }
            }
        }
    }

    fn tolerance() -> S {
        S::of(MEMBERSHIP_TOL).max(S::epsilon() * S::of(64.0))
    }

    fn check_len(&self, v: &[S]) -> Result<()> {
        if v.len() == self.coord_len() {
            Ok(())
        } else {
            Err(Error::Dimension {
                expected: self.coord_len(),
                got: v.len(),
            })
        }
    }

    pub fn check_point(&self, p: &[S]) -> Result<()> {
        self.check_len(p)?;
        let residual = self.membership_residual(p);
        if residual <= Self::tolerance() {
            Ok(())
        } else {
            Err(Error::NotOnModel {
                residual: residual.primal(),
            })
        }
    }

    pub fn point(&self, coords: Vec<S>) -> Result<AmbientPoint<S>> {
        self.check_point(&coords)?;
        Ok(AmbientPoint { coords })
    }

    pub fn tangency_residual(&self, p: &[S], v: &[S]) -> S {
        let nv = norm(v);
        if nv == S::zero() {
            return S::zero();
        }
        match self.kind {
            AmbientKind::Euclidean => S::zero(),
            AmbientKind::SphereEmbedded => dot(p, v).abs() / (norm(p) * nv),
            AmbientKind::Hyperboloid => lorentz(p, v).abs() / (norm(p) * nv),
            AmbientKind::WarpedProduct => {
                let vy = &v[1..];
                let ny = norm(vy);
                if ny == S::zero() {
                    S::zero()
                } else {
                    dot(&p[1..], vy).abs() / ny
                }
            }
        }
    }

    pub fn tangent(&self, base: &AmbientPoint<S>, vec: Vec<S>) -> Result<TangentVector<S>> {
        self.check_len(&vec)?;
        let residual = self.tangency_residual(&base.coords, &vec);
        if residual > Self::tolerance() {
            return Err(Error::NotTangent {
                residual: residual.primal(),
            });
        }
        Ok(TangentVector {
            base: base.clone(),
            vec,
        })
    }

    /// Riemannian inner product of coordinate vectors tangent at `p`.
    pub fn metric<T: Real>(&self, p: &[T], u: &[T], v: &[T]) -> T {
        match self.kind {
            AmbientKind::Euclidean | AmbientKind::SphereEmbedded => dot(u, v),
            AmbientKind::Hyperboloid => lorentz(u, v),
            AmbientKind::WarpedProduct => {
                let psi = self.warp_ref().eval(p[0]);
                u[0] * v[0] + psi * psi * dot(&u[1..], &v[1..])
            }
        }
    }

    pub fn metric_norm<T: Real>(&self, p: &[T], v: &[T]) -> T {
        let q = self.metric(p, v, v);
        if q > T::zero() {
            q.sqrt()
        } else {
            T::zero()
        }
    }

    /// Orthogonal projection onto the tangent space at `p`. Euclidean space
    /// uses the identity; warped products project the base-sphere component.
    pub fn project<T: Real>(&self, p: &[T], w: &[T]) -> Vec<T> {
        let r2: T = (self.radius * self.radius).lift();
        match self.kind {
            AmbientKind::Euclidean => w.to_vec(),
            AmbientKind::SphereEmbedded => axpy(w, -dot(w, p) / r2, p),
            AmbientKind::Hyperboloid => axpy(w, lorentz(w, p) / r2, p),
            AmbientKind::WarpedProduct => {
                let y = &p[1..];
                let wy = &w[1..];
                let mut out = Vec::with_capacity(w.len());
                out.push(w[0]);
                out.extend(axpy(wy, -dot(wy, y), y));
                out
            }
        }
    }

    /// Unit normal of the model inside its flat coordinate space, used only
    /// to fix orientations. `None` for Euclidean space.
    pub fn model_normal<T: Real>(&self, p: &[T]) -> Option<Vec<T>> {
        let inv: T = (S::one() / self.radius).lift();
        match self.kind {
            AmbientKind::Euclidean => None,
            AmbientKind::SphereEmbedded => Some(scaled(p, inv)),
            AmbientKind::Hyperboloid => {
                let mut raised = scaled(p, inv);
                raised[0] = -raised[0];
                Some(raised)
            }
            AmbientKind::WarpedProduct => {
                let mut n = vec![T::zero()];
                n.extend_from_slice(&p[1..]);
                Some(n)
            }
        }
    }

    /// A spanning set of the tangent space at `p`: projected coordinate
    /// directions.
    pub fn tangent_spanning_set<T: Real>(&self, p: &[T]) -> Vec<Vec<T>> {
        (0..self.coord_len())
            .map(|k| {
                let mut e = vec![T::zero(); self.coord_len()];
                e[k] = T::one();
                self.project(p, &e)
            })
            .collect()
    }

    /// Levi-Civita derivative `∇_Y V` at `p` from the field value `v` and its
    /// flat coordinate derivative `dv` along `y`.
    pub fn connection(&self, p: &[S], y: &[S], v: &[S], dv: &[S]) -> Vec<S> {
        match self.kind {
            AmbientKind::Euclidean => dv.to_vec(),
            // Gauss formula: tangential part of the ambient flat derivative.
            AmbientKind::SphereEmbedded | AmbientKind::Hyperboloid => self.project(p, dv),
            AmbientKind::WarpedProduct => {
                let warp = self.warp_ref();
                let r = p[0];
                let psi = warp.eval(r);
                let f = warp.derivative(r) / psi;
                let yy = &p[1..];
                let (y_r, y_s) = (y[0], &y[1..]);
                let (v_r, v_s) = (v[0], &v[1..]);
                let dv_s = &dv[1..];
                let mut out = Vec::with_capacity(v.len());
                out.push(dv[0] - f * psi * psi * dot(y_s, v_s));
                let sphere_part = axpy(dv_s, -dot(dv_s, yy), yy);
                out.extend(
                    sphere_part
                        .iter()
                        .zip(v_s.iter().zip(y_s))
                        .map(|(&d, (&vs, &ys))| d + f * (y_r * vs + v_r * ys)),
                );
                out
            }
        }
    }

    /// Geodesic distance from `base` to `p`. For warped products `base` must
    /// be the origin (`r = 0`) or lie on the same radial ray as `p`.
    pub fn geodesic_distance(&self, base: &[S], p: &[S]) -> Result<S> {
        self.check_len(base)?;
        self.check_len(p)?;
        let r0 = self.radius;
        let r2 = r0 * r0;
        Ok(match self.kind {
            AmbientKind::Euclidean => norm(&sub(p, base)),
            AmbientKind::SphereEmbedded => {
                let cos = dot(p, base) / r2;
                let sin = norm(&axpy(base, -cos, p)) / r0;
                r0 * sin.atan2(cos)
            }
            AmbientKind::Hyperboloid => {
                let cosh = -lorentz(p, base) / r2;
                let w = axpy(base, -cosh, p);
                let sinh = lorentz(&w, &w).max(S::zero()).sqrt() / r0;
                let theta = sinh.asinh();
                // asinh loses nothing; the sign of cosh only guards sheet mixups
                if cosh < S::one() - S::of(1e-9) {
                    return Err(Error::NotOnModel {
                        residual: (S::one() - cosh).primal(),
                    });
                }
                r0 * theta
            }
            AmbientKind::WarpedProduct => {
                if base[0] == S::zero() {
                    p[0]
                } else if crate::linalg::max_abs_diff(&base[1..], &p[1..]) <= Self::tolerance() {
                    (p[0] - base[0]).abs()
                } else {
                    return Err(Error::Unsupported(
                        "warped distance between points on different radial rays".into(),
                    ));
                }
            }
        })
    }

    /// True when `p` is (numerically) antipodal to `base` on the sphere.
    pub fn is_antipodal(&self, base: &[S], p: &[S]) -> bool {
        self.kind == AmbientKind::SphereEmbedded
            && dot(p, base) / (self.radius * self.radius) < S::of(-1.0 + 1e-10)
    }

    /// Point at geodesic distance `rho` from the pole in unit direction
    /// `dir ∈ S^{m−1}` (polar coordinates about the pole).
    pub fn polar_point<T: Real>(&self, rho: T, dir: &[T]) -> Vec<T> {
        let r0: T = self.radius.lift();
        match self.kind {
            AmbientKind::Euclidean => dir.iter().map(|&d| rho * d).collect(),
            AmbientKind::SphereEmbedded => {
                let a = rho / r0;
                let s = r0 * a.sin();
                let mut out: Vec<T> = dir.iter().map(|&d| s * d).collect();
                out.push(r0 * a.cos());
                out
            }
            AmbientKind::Hyperboloid => {
                let a = rho / r0;
                let s = r0 * a.sinh();
                let mut out = vec![r0 * a.cosh()];
                out.extend(dir.iter().map(|&d| s * d));
                out
            }
            AmbientKind::WarpedProduct => {
                let mut out = vec![rho];
                out.extend_from_slice(dir);
                out
            }
        }
    }
}

impl<S: Scalar> AmbientModel<S> {
    fn same_base(u: &TangentVector<S>, v: &TangentVector<S>) -> Result<()> {
        if u.base == v.base {
            Ok(())
        } else {
            Err(Error::MismatchedBase)
        }
    }
}

/// Riemannian inner product of two tangent vectors at the same point.
pub fn inner<S: Scalar>(
    model: &AmbientModel<S>,
    u: &TangentVector<S>,
    v: &TangentVector<S>,
) -> Result<S> {
    AmbientModel::same_base(u, v)?;
    model.check_point(&u.base.coords)?;
    Ok(model.metric(&u.base.coords, &u.vec, &v.vec))
}

/// Orthogonal projection of `w` onto the tangent space at `p`.
pub fn project_tangent<S: Scalar>(
    model: &AmbientModel<S>,
    p: &AmbientPoint<S>,
    w: &[S],
) -> Result<TangentVector<S>> {
    model.check_point(&p.coords)?;
    model.check_len(w)?;
    Ok(TangentVector {
        base: p.clone(),
        vec: model.project(&p.coords, w),
    })
}

pub fn geodesic_distance<S: Scalar>(
    model: &AmbientModel<S>,
    base: &AmbientPoint<S>,
    p: &AmbientPoint<S>,
) -> Result<S> {
    model.geodesic_distance(&base.coords, &p.coords)
}

/// How directional derivatives of charts and fields are obtained.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum DerivativeBackend {
    /// Hand-written closed forms; not every object provides them.
    Analytic,
    /// Forward-mode dual numbers through the generic evaluation program.
    #[default]
    Forward,
    /// Central differences, step `cbrt(ε)·(1 + ‖x‖)`.
    Central,
}

impl DerivativeBackend {
    pub fn name(self) -> &'static str {
        match self {
            DerivativeBackend::Analytic => "analytic",
            DerivativeBackend::Forward => "forward",
            DerivativeBackend::Central => "central",
        }
    }
}

/// Central-difference step for a point of norm `scale`.
pub fn central_step<S: Scalar>(scale: S) -> S {
    S::epsilon().primal().cbrt().lift::<S>() * (S::one() + scale)
}

/// A vector field given by a program over coordinates.
///
/// `eval` must be written generically so forward-mode differentiation can
/// run through it; it receives ambient coordinates, possibly slightly off
/// the model, and should be smooth there.
pub trait VectorField<S: Scalar>: Sync {
    fn eval<T: Real>(&self, p: &[T]) -> Vec<T>;

    /// Closed-form directional derivative `dV_p(y)`, if known.
    fn analytic_derivative(&self, _p: &[S], _y: &[S]) -> Option<Vec<S>> {
        None
    }
}

/// Flat coordinate derivative of `field` at `p` along `y`.
pub fn field_derivative<S: Scalar, F: VectorField<S>>(
    field: &F,
    p: &[S],
    y: &[S],
    backend: DerivativeBackend,
) -> Result<Vec<S>> {
    match backend {
        DerivativeBackend::Analytic => field
            .analytic_derivative(p, y)
            .ok_or(Error::DerivativeUnavailable("vector field")),
        DerivativeBackend::Forward => {
            let (_, d) = directional(p, y, |x: &[Dual<S>]| field.eval(x));
            Ok(d)
        }
        DerivativeBackend::Central => {
            let ny = norm(y);
            if ny == S::zero() {
                return Ok(vec![S::zero(); field.eval(p).len()]);
            }
            let h = central_step(norm(p));
            let dir = scaled(y, S::one() / ny);
            let plus = field.eval(&axpy(p, h, &dir));
            let minus = field.eval(&axpy(p, -h, &dir));
            let k = ny / (h + h);
            Ok(plus
                .iter()
                .zip(&minus)
                .map(|(&a, &b)| (a - b) * k)
                .collect())
        }
    }
}

/// `∇_Y V` at `p` on raw coordinates, without membership checks.
pub fn covariant_derivative_at<S: Scalar, F: VectorField<S>>(
    model: &AmbientModel<S>,
    field: &F,
    p: &[S],
    y: &[S],
    backend: DerivativeBackend,
) -> Result<Vec<S>> {
    if model.kind == AmbientKind::WarpedProduct && !model.warp_ref().admits(p[0]) {
        return Err(Error::OutOfRange {
            what: "warped radius",
            detail: format!("r = {} outside the warp interval", p[0]),
        });
    }
    let v = field.eval(p);
    let dv = field_derivative(field, p, y, backend)?;
    Ok(model.connection(p, y, &v, &dv))
}

/// Levi-Civita covariant derivative `∇_Y V` of a vector field.
pub fn covariant_derivative<S: Scalar, F: VectorField<S>>(
    model: &AmbientModel<S>,
    field: &F,
    p: &AmbientPoint<S>,
    y: &TangentVector<S>,
    backend: DerivativeBackend,
) -> Result<TangentVector<S>> {
    if y.base != *p {
        return Err(Error::MismatchedBase);
    }
    model.check_point(&p.coords)?;
    let vec = covariant_derivative_at(model, field, &p.coords, &y.vec, backend)?;
    Ok(TangentVector {
        base: p.clone(),
        vec,
    })
}

/// Constant coordinate field `v₀` (parallel in Euclidean space).
#[derive(Clone, Debug, PartialEq)]
pub struct ConstantField<S>(pub Vec<S>);

impl<S: Scalar> VectorField<S> for ConstantField<S> {
    fn eval<T: Real>(&self, _p: &[T]) -> Vec<T> {
        self.0.iter().map(|&c| c.lift()).collect()
    }

    fn analytic_derivative(&self, _p: &[S], _y: &[S]) -> Option<Vec<S>> {
        Some(vec![S::zero(); self.0.len()])
    }
}

/// Position vector field `P` with `∇_Y P = λ Y`.
///
/// On the embedded models `P(p) = −proj_p(base)`, which points away from
/// `base` along the minimizing geodesic and has length exactly `s_c(r)`. On a
/// warped product `P = ψ(r) ∂_r`.
#[derive(Clone, Debug, PartialEq)]
pub struct PositionField<S> {
    model: AmbientModel<S>,
    base: Vec<S>,
}

pub fn position_field<S: Scalar>(
    model: &AmbientModel<S>,
    base: &AmbientPoint<S>,
) -> Result<PositionField<S>> {
    if model.kind != AmbientKind::WarpedProduct {
        model.check_point(&base.coords)?;
    } else {
        model.check_len(&base.coords)?;
    }
    Ok(PositionField {
        model: model.clone(),
        base: base.coords.clone(),
    })
}

impl<S: Scalar> PositionField<S> {
    pub fn base(&self) -> &[S] {
        &self.base
    }

    pub fn model(&self) -> &AmbientModel<S> {
        &self.model
    }

    /// The conformal factor λ at `p`: `λ_c(r)` on space forms, `ψ′(r)` on
    /// warped products.
    pub fn lambda(&self, p: &[S]) -> Result<S> {
        let model = &self.model;
        match model.kind {
            AmbientKind::Euclidean => Ok(S::one()),
            AmbientKind::SphereEmbedded | AmbientKind::Hyperboloid => {
                if model.is_antipodal(&self.base, p) {
                    return Err(Error::Antipodal);
                }
                let r = model.geodesic_distance(&self.base, p)?;
                let c = model.curvature().expect("space form");
                Ok(warp_functions(c, r)?.1)
            }
            AmbientKind::WarpedProduct => Ok(model.warp_ref().derivative(p[0])),
        }
    }

    /// `P(p)` with the antipodal locus rejected.
    pub fn value(&self, p: &[S]) -> Result<Vec<S>> {
        if self.model.is_antipodal(&self.base, p) {
            return Err(Error::Antipodal);
        }
        Ok(self.eval(p))
    }
}

impl<S: Scalar> VectorField<S> for PositionField<S> {
    fn eval<T: Real>(&self, p: &[T]) -> Vec<T> {
        let model = &self.model;
        let b: Vec<T> = self.base.iter().map(|&x| x.lift()).collect();
        let r2: T = (model.radius * model.radius).lift();
        match model.kind {
            AmbientKind::Euclidean => sub(p, &b),
            AmbientKind::SphereEmbedded => {
                let k = dot(&b, p) / r2;
                p.iter().zip(&b).map(|(&x, &y)| k * x - y).collect()
            }
            AmbientKind::Hyperboloid => {
                let k = -lorentz(&b, p) / r2;
                p.iter().zip(&b).map(|(&x, &y)| k * x - y).collect()
            }
            AmbientKind::WarpedProduct => {
                let mut out = vec![T::zero(); p.len()];
                out[0] = model.warp_ref().eval(p[0]);
                out
            }
        }
    }

    fn analytic_derivative(&self, p: &[S], y: &[S]) -> Option<Vec<S>> {
        let model = &self.model;
        let b = &self.base;
        let r2 = model.radius * model.radius;
        Some(match model.kind {
            AmbientKind::Euclidean => y.to_vec(),
            AmbientKind::SphereEmbedded => axpy(&scaled(p, dot(b, y) / r2), dot(b, p) / r2, y),
            AmbientKind::Hyperboloid => {
                axpy(&scaled(p, -lorentz(b, y) / r2), -lorentz(b, p) / r2, y)
            }
            AmbientKind::WarpedProduct => {
                let mut out = vec![S::zero(); p.len()];
                out[0] = model.warp_ref().derivative(p[0]) * y[0];
                out
            }
        })
    }
}

/// Linear Killing field `X(x) = Ωx + v₀` of an embedded model.
#[derive(Clone, Debug, PartialEq)]
pub struct KillingField<S> {
    omega: Matrix<S>,
    translation: Vec<S>,
}

/// Build a Killing field from its generator.
///
/// Euclidean space accepts a skew `Ω` plus translation `v₀`; the sphere a
/// skew `Ω` on ℝ^{m+1}; the hyperboloid a Lorentz-skew `Ω` (`Ωᵀη + ηΩ = 0`).
pub fn killing_field<S: Scalar>(
    model: &AmbientModel<S>,
    omega: Matrix<S>,
    translation: Option<Vec<S>>,
) -> Result<KillingField<S>> {
    let len = model.coord_len();
    if omega.rows() != len || omega.cols() != len {
        return Err(Error::Dimension {
            expected: len,
            got: omega.rows(),
        });
    }
    let translation = translation.unwrap_or_else(|| vec![S::zero(); len]);
    if translation.len() != len {
        return Err(Error::Dimension {
            expected: len,
            got: translation.len(),
        });
    }
    let (kind, defect) = match model.kind {
        AmbientKind::Euclidean | AmbientKind::SphereEmbedded => {
            let s = omega.transpose();
            let sum = Matrix::from_fn(len, len, |r, c| omega[(r, c)] + s[(r, c)]);
            ("orthogonally", sum.max_abs())
        }
        AmbientKind::Hyperboloid => {
            let eta = |k: usize| if k == 0 { -S::one() } else { S::one() };
            // (Ωᵀη + ηΩ)_{rc} = Ω_{cr}η_c + η_r Ω_{rc}
            let sum = Matrix::from_fn(len, len, |r, c| {
                omega[(c, r)] * eta(c) + eta(r) * omega[(r, c)]
            });
            ("Lorentz", sum.max_abs())
        }
        AmbientKind::WarpedProduct => {
            return Err(Error::Unsupported(
                "Killing generators on warped products".into(),
            ))
        }
    };
    let scale = S::one().max(omega.max_abs());
    if defect > S::of(SKEW_TOL) * scale {
        return Err(Error::NotSkew {
            kind,
            defect: defect.primal(),
        });
    }
    if model.kind != AmbientKind::Euclidean && translation.iter().any(|t| *t != S::zero()) {
        return Err(Error::Unsupported(
            "translations are Killing only in Euclidean space".into(),
        ));
    }
    Ok(KillingField { omega, translation })
}

impl<S: Scalar> KillingField<S> {
    pub fn generator(&self) -> &Matrix<S> {
        &self.omega
    }

    pub fn translation(&self) -> &[S] {
        &self.translation
    }
}

impl<S: Scalar> VectorField<S> for KillingField<S> {
    fn eval<T: Real>(&self, p: &[T]) -> Vec<T> {
        (0..self.omega.rows())
            .map(|r| {
                self.omega
                    .row(r)
                    .iter()
                    .zip(p)
                    .fold(self.translation[r].lift::<T>(), |acc, (&w, &x)| {
                        acc + w.lift::<T>() * x
                    })
            })
            .collect()
    }

    fn analytic_derivative(&self, _p: &[S], y: &[S]) -> Option<Vec<S>> {
        Some(
            (0..self.omega.rows())
                .map(|r| dot(self.omega.row(r), y))
                .collect(),
        )
    }
}

/// One sample for [`killing_defect`]: a point and two tangent directions.
#[derive(Clone, Debug)]
pub struct KillingSample<S> {
    pub point: Vec<S>,
    pub y: Vec<S>,
    pub z: Vec<S>,
}

/// `max |⟨∇_Y X, Z⟩ + ⟨∇_Z X, Y⟩| / (‖Y‖‖Z‖)` over the samples.
pub fn killing_defect<S: Scalar, F: VectorField<S>>(
    model: &AmbientModel<S>,
    field: &F,
    samples: &[KillingSample<S>],
    backend: DerivativeBackend,
) -> Result<S> {
    let mut worst = S::zero();
    for s in samples {
        let p = &s.point;
        let ny = model.metric_norm(p, &s.y);
        let nz = model.metric_norm(p, &s.z);
        if ny == S::zero() || nz == S::zero() {
            continue;
        }
        let dy = covariant_derivative_at(model, field, p, &s.y, backend)?;
        let dz = covariant_derivative_at(model, field, p, &s.z, backend)?;
        let sym = model.metric(p, &dy, &s.z) + model.metric(p, &dz, &s.y);
        worst = worst.max(sym.abs() / (ny * nz));
    }
    Ok(worst)
}
