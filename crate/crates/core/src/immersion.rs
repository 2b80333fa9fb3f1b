//! Parametrized hypersurfaces: first-order data, unit normal and the shape
//! operator `A = ∇ν`.
//!
//! A hypersurface is a single [`Chart`] covering it up to a measure-zero set,
//! immersed in an [`AmbientModel`]. Charts are generic programs over
//! [`Real`], so derivatives come from any [`DerivativeBackend`].
//!
//! The shape operator is represented in the coordinate frame `T_j = ∂f/∂u^j`
//! as `W = g⁻¹ b` with `b_{jk} = ⟨∇_{T_j} ν, T_k⟩`. Its eigenvalues are the
//! principal curvatures under the convention `A = +∇ν`: the unit sphere with
//! outward normal has `W = I`.
//!
//! Two independent routes produce `b`:
//!
//! * forward and central backends differentiate the normal program `u ↦ ν(u)`
//!   and apply the ambient connection;
//! * the analytic backend (and [`second_fundamental_form_from_jet`]) uses the
//!   Weingarten relation `b_{jk} = −⟨ν, ∇_{T_j} T_k⟩` with second derivatives
//!   of the chart.

use crate::curvature::{mean_curvatures, MeanCurvatures};
use crate::dual::Dual;
use crate::error::{Error, Result};
use crate::linalg::{det_real, dot, max_abs_diff, scaled, solve_real, Matrix};
use crate::quadrature::Axis;
use crate::scalar::{Real, Scalar};
use crate::spaceform::{central_step, AmbientModel, DerivativeBackend};

const MEMBERSHIP_TOL: f64 = 1e-10;
const MAX_CONDITION: f64 = 1e12;

/// A parametrization `u ↦ f(u)` into the coordinates of an ambient model.
pub trait Chart<S: Scalar>: Sync {
    /// Number of parameters `n`.
    fn param_dim(&self) -> usize;

    fn domain(&self) -> Vec<Axis<S>>;

    fn eval<T: Real>(&self, u: &[T]) -> Vec<T>;

    /// Closed-form point, first and second partials, when provided.
    fn analytic_jet(&self, _u: &[S]) -> Option<Jet<S>> {
        None
    }
}

/// Point with first and (optionally) second partial derivatives of a chart.
#[derive(Clone, Debug, PartialEq)]
pub struct Jet<S> {
    pub point: Vec<S>,
    /// `first[j] = ∂f/∂u^j`
    pub first: Vec<Vec<S>>,
    /// `second[j][k] = ∂²f/∂u^j∂u^k`
    pub second: Option<Vec<Vec<Vec<S>>>>,
}

fn unit_seed<T: Real>(u: &[T], k: usize) -> Vec<Dual<T>> {
    u.iter()
        .enumerate()
        .map(|(l, &x)| Dual::new(x, if l == k { T::one() } else { T::zero() }))
        .collect()
}

/// Point and coordinate frame through forward-mode differentiation.
fn forward_frame<S: Scalar, C: Chart<S>, T: Real>(chart: &C, u: &[T]) -> (Vec<T>, Vec<Vec<T>>) {
    let n = chart.param_dim();
    let mut point = Vec::new();
    let mut frame = Vec::with_capacity(n);
    for k in 0..n {
        let out = chart.eval(&unit_seed(u, k));
        if k == 0 {
            point = out.iter().map(|d| d.re).collect();
        }
        frame.push(out.iter().map(|d| d.eps).collect());
    }
    (point, frame)
}

fn central_frame<S: Scalar, C: Chart<S>>(chart: &C, u: &[S]) -> (Vec<S>, Vec<Vec<S>>) {
    let h = central_step(crate::linalg::norm(u));
    let point = chart.eval(u);
    let frame = (0..chart.param_dim())
        .map(|k| {
            let mut up = u.to_vec();
            let mut um = u.to_vec();
            up[k] += h;
            um[k] -= h;
            let (a, b) = (chart.eval(&up), chart.eval(&um));
            a.iter().zip(&b).map(|(&x, &y)| (x - y) / (h + h)).collect()
        })
        .collect();
    (point, frame)
}

/// Step for central second differences: `ε^{1/4}·(1 + ‖u‖)`.
fn second_difference_step<S: Scalar>(scale: S) -> S {
    S::of(S::epsilon().primal().powf(0.25)) * (S::one() + scale)
}

/// Chart jet from the requested backend.
pub fn chart_jet<S: Scalar, C: Chart<S>>(
    chart: &C,
    u: &[S],
    backend: DerivativeBackend,
    with_second: bool,
) -> Result<Jet<S>> {
    let n = chart.param_dim();
    if u.len() != n {
        return Err(Error::Dimension {
            expected: n,
            got: u.len(),
        });
    }
    match backend {
        DerivativeBackend::Analytic => {
            let jet = chart
                .analytic_jet(u)
                .ok_or(Error::DerivativeUnavailable("chart"))?;
            if with_second && jet.second.is_none() {
                return Err(Error::DerivativeUnavailable("chart second derivatives"));
            }
            Ok(jet)
        }
        DerivativeBackend::Forward => {
            if !with_second {
                let (point, first) = forward_frame(chart, u);
                return Ok(Jet {
                    point,
                    first,
                    second: None,
                });
            }
            let m = chart.eval(u).len();
            let mut first = vec![Vec::new(); n];
            let mut second = vec![vec![vec![S::zero(); m]; n]; n];
            let mut point = Vec::new();
            for j in 0..n {
                for k in j..n {
                    // u + ε₁e_j + ε₂e_k: the ε₁ε₂ coefficient is ∂_j∂_k f
                    let x: Vec<Dual<Dual<S>>> = u
                        .iter()
                        .enumerate()
                        .map(|(l, &ul)| {
                            let inner = Dual::new(ul, if l == k { S::one() } else { S::zero() });
                            let outer = Dual::constant(if l == j { S::one() } else { S::zero() });
                            Dual::new(inner, outer)
                        })
                        .collect();
                    let out = chart.eval(&x);
                    if j == 0 && k == 0 {
                        point = out.iter().map(|d| d.re.re).collect();
                    }
                    if j == k {
                        first[j] = out.iter().map(|d| d.eps.re).collect();
                    }
                    let d2: Vec<S> = out.iter().map(|d| d.eps.eps).collect();
                    second[k][j] = d2.clone();
                    second[j][k] = d2;
                }
            }
            Ok(Jet {
                point,
                first,
                second: Some(second),
            })
        }
        DerivativeBackend::Central => {
            let (point, first) = central_frame(chart, u);
            if !with_second {
                return Ok(Jet {
                    point,
                    first,
                    second: None,
                });
            }
            let h = second_difference_step(crate::linalg::norm(u));
            let shifted = |dj: Option<(usize, S)>, dk: Option<(usize, S)>| {
                let mut v = u.to_vec();
                for (idx, step) in dj.into_iter().chain(dk) {
                    v[idx] += step;
                }
                chart.eval(&v)
            };
            let m = point.len();
            let mut second = vec![vec![vec![S::zero(); m]; n]; n];
            for j in 0..n {
                for k in j..n {
                    let d2: Vec<S> = if j == k {
                        let (a, b) = (shifted(Some((j, h)), None), shifted(Some((j, -h)), None));
                        (0..m)
                            .map(|i| (a[i] - point[i] - point[i] + b[i]) / (h * h))
                            .collect()
                    } else {
                        let pp = shifted(Some((j, h)), Some((k, h)));
                        let pm = shifted(Some((j, h)), Some((k, -h)));
                        let mp = shifted(Some((j, -h)), Some((k, h)));
                        let mm = shifted(Some((j, -h)), Some((k, -h)));
                        let four = S::of(4.0);
                        (0..m)
                            .map(|i| (pp[i] - pm[i] - mp[i] + mm[i]) / (four * h * h))
                            .collect()
                    };
                    second[k][j] = d2.clone();
                    second[j][k] = d2;
                }
            }
            Ok(Jet {
                point,
                first,
                second: Some(second),
            })
        }
    }
}

/// Unit normal to the frame inside the ambient tangent space, oriented so
/// that `det(T₁,…,T_n, ν[, N_model]) > 0`, then multiplied by `sign`.
pub fn oriented_normal<S: Scalar, T: Real>(
    ambient: &AmbientModel<S>,
    point: &[T],
    frame: &[Vec<T>],
    sign: i8,
) -> Result<Vec<T>> {
    let n = frame.len();
    let gram: Vec<Vec<T>> = frame
        .iter()
        .map(|a| frame.iter().map(|b| ambient.metric(point, a, b)).collect())
        .collect();
    let mut best: Option<(f64, Vec<T>)> = None;
    for cand in ambient.tangent_spanning_set(point) {
        let rhs: Vec<T> = frame
            .iter()
            .map(|t| ambient.metric(point, t, &cand))
            .collect();
        let coeffs = solve_real(gram.clone(), &rhs)
            .ok_or_else(|| Error::NormalConstruction("singular first fundamental form".into()))?;
        let mut resid = cand;
        for (t, &a) in frame.iter().zip(&coeffs) {
            for (r, &x) in resid.iter_mut().zip(t) {
                *r -= a * x;
            }
        }
        let len = ambient.metric(point, &resid, &resid).primal();
        if best.as_ref().is_none_or(|(l, _)| len > *l) {
            best = Some((len, resid));
        }
    }
    let (len, resid) =
        best.ok_or_else(|| Error::NormalConstruction("empty tangent space".into()))?;
    if !(len > 1e-24) {
        return Err(Error::NormalConstruction(format!(
            "frame of {n} vectors spans the ambient tangent space"
        )));
    }
    let length = ambient.metric(point, &resid, &resid).sqrt();
    let mut nu = scaled(&resid, T::one() / length);

    let mut cols: Vec<Vec<T>> = frame.to_vec();
    cols.push(nu.clone());
    if let Some(nm) = ambient.model_normal(point) {
        cols.push(nm);
    }
    if cols.len() != point.len() {
        return Err(Error::NormalConstruction(format!(
            "orientation matrix is {}x{}",
            point.len(),
            cols.len()
        )));
    }
    let flip = det_real(&cols).primal() < 0.0;
    if flip != (sign < 0) {
        nu = nu.into_iter().map(|x| -x).collect();
    }
    Ok(nu)
}

/// A closed oriented hypersurface given by one chart.
#[derive(Clone, Debug)]
pub struct Hypersurface<S, C> {
    ambient: AmbientModel<S>,
    chart: C,
    normal_sign: i8,
    backend: DerivativeBackend,
}

impl<S: Scalar, C: Chart<S>> Hypersurface<S, C> {
    pub fn new(ambient: AmbientModel<S>, chart: C) -> Result<Self> {
        let m = chart.eval(&vec![S::zero(); chart.param_dim()]).len();
        if m != ambient.coord_len() {
            return Err(Error::Dimension {
                expected: ambient.coord_len(),
                got: m,
            });
        }
        if chart.param_dim() + 1 != ambient.dim() {
            return Err(Error::Dimension {
                expected: ambient.dim() - 1,
                got: chart.param_dim(),
            });
        }
        Ok(Hypersurface {
            ambient,
            chart,
            normal_sign: 1,
            backend: DerivativeBackend::default(),
        })
    }

    /// Flip (`-1`) or keep (`+1`) the default orientation.
    pub fn with_normal_sign(mut self, sign: i8) -> Self {
        self.normal_sign = if sign < 0 { -1 } else { 1 };
        self
    }

    pub fn with_backend(mut self, backend: DerivativeBackend) -> Self {
        self.backend = backend;
        self
    }

    pub fn ambient(&self) -> &AmbientModel<S> {
        &self.ambient
    }

    pub fn chart(&self) -> &C {
        &self.chart
    }

    pub fn normal_sign(&self) -> i8 {
        self.normal_sign
    }

    pub fn backend(&self) -> DerivativeBackend {
        self.backend
    }

    /// Hypersurface dimension `n`.
    pub fn dim(&self) -> usize {
        self.chart.param_dim()
    }

    pub fn domain(&self) -> Vec<Axis<S>> {
        self.chart.domain()
    }

    /// ν(u) computed entirely in the evaluation type `T` (forward frames).
    pub fn normal_program<T: Real>(&self, u: &[T]) -> Result<Vec<T>> {
        let (point, frame) = forward_frame(&self.chart, u);
        oriented_normal(&self.ambient, &point, &frame, self.normal_sign)
    }

    fn normal_central(&self, u: &[S]) -> Result<Vec<S>> {
        let (point, frame) = central_frame(&self.chart, u);
        oriented_normal(&self.ambient, &point, &frame, self.normal_sign)
    }

    fn first_from_jet(&self, u: &[S], jet: &Jet<S>) -> Result<FirstOrderData<S>> {
        let residual = self.ambient.membership_residual(&jet.point);
        if residual > S::of(MEMBERSHIP_TOL) {
            return Err(Error::NotOnModel {
                residual: residual.primal(),
            });
        }
        let n = self.dim();
        let p = &jet.point;
        let metric = Matrix::from_fn(n, n, |j, k| {
            self.ambient.metric(p, &jet.first[j], &jet.first[k])
        });
        let det = metric.determinant();
        let inverse = match metric.inverse() {
            Some(inv) if det > S::zero() => inv,
            _ => {
                return Err(Error::RankDeficient {
                    u: u.iter().map(|x| x.primal()).collect(),
                })
            }
        };
        let cond = metric.norm1() * inverse.norm1();
        if !(cond <= S::of(MAX_CONDITION)) {
            return Err(Error::IllConditioned {
                cond: cond.primal(),
            });
        }
        let normal = oriented_normal(&self.ambient, p, &jet.first, self.normal_sign)?;
        Ok(FirstOrderData {
            u: u.to_vec(),
            point: jet.point.clone(),
            frame: jet.first.clone(),
            density: det.sqrt(),
            metric,
            metric_inverse: inverse,
            normal,
        })
    }
}

/// Point, frame, first fundamental form and unit normal at a parameter.
#[derive(Clone, Debug, PartialEq)]
pub struct FirstOrderData<S> {
    pub u: Vec<S>,
    pub point: Vec<S>,
    pub frame: Vec<Vec<S>>,
    pub metric: Matrix<S>,
    pub metric_inverse: Matrix<S>,
    pub normal: Vec<S>,
    /// `√det g`
    pub density: S,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ShapeData<S> {
    pub first: FirstOrderData<S>,
    /// `b_{jk} = ⟨∇_{T_j} ν, T_k⟩`
    pub second_form: Matrix<S>,
    /// `W = g⁻¹ b`, so that `A T_j = Σ_k W_{kj} T_k`.
    pub weingarten: Matrix<S>,
}

impl<S: Scalar> ShapeData<S> {
    pub fn mean_curvatures(&self) -> MeanCurvatures<S> {
        mean_curvatures(&self.weingarten)
    }

    /// Principal curvatures in ascending order.
    ///
    /// Solves the symmetric problem `L⁻¹ b L⁻ᵀ` (with `g = LLᵀ`) by cyclic
    /// Jacobi rotations.
    pub fn principal_curvatures(&self) -> Vec<S> {
        let n = self.second_form.rows();
        let l = cholesky(&self.first.metric);
        // y = L⁻¹ b L⁻ᵀ
        let linv = lower_inverse(&l);
        let tmp = linv.matmul(&self.second_form);
        let sym = tmp.matmul(&linv.transpose());
        let mut a = Matrix::from_fn(n, n, |r, c| (sym[(r, c)] + sym[(c, r)]) / S::of(2.0));
        jacobi_eigenvalues(&mut a)
    }

    /// `‖gW − (gW)ᵀ‖_max`
    pub fn self_adjointness_defect(&self) -> S {
        let gw = self.first.metric.matmul(&self.weingarten);
        gw.sub(&gw.transpose()).max_abs()
    }
}

fn cholesky<S: Scalar>(g: &Matrix<S>) -> Matrix<S> {
    let n = g.rows();
    let mut l = Matrix::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let mut s = g[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)];
            }
            l[(i, j)] = if i == j {
                s.max(S::zero()).sqrt()
            } else {
                s / l[(j, j)]
            };
        }
    }
    l
}

fn lower_inverse<S: Scalar>(l: &Matrix<S>) -> Matrix<S> {
    let n = l.rows();
    let mut inv = Matrix::zeros(n, n);
    for c in 0..n {
        for r in c..n {
            let mut s = if r == c { S::one() } else { S::zero() };
            for k in c..r {
                s -= l[(r, k)] * inv[(k, c)];
            }
            inv[(r, c)] = s / l[(r, r)];
        }
    }
    inv
}

fn jacobi_eigenvalues<S: Scalar>(a: &mut Matrix<S>) -> Vec<S> {
    let n = a.rows();
    for _sweep in 0..100 {
        let off: S = (0..n)
            .flat_map(|r| (0..n).filter(move |&c| c != r).map(move |c| (r, c)))
            .map(|(r, c)| a[(r, c)] * a[(r, c)])
            .sum();
        if off <= S::epsilon() * S::epsilon() * (S::one() + a.max_abs() * a.max_abs()) {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[(p, q)] == S::zero() {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (S::of(2.0) * a[(p, q)]);
                let sign = if theta >= S::zero() {
                    S::one()
                } else {
                    -S::one()
                };
                let t = sign / (theta.abs() + (theta * theta + S::one()).sqrt());
                let c = S::one() / (t * t + S::one()).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[(k, p)], a[(k, q)]);
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[(p, k)], a[(q, k)]);
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut ev: Vec<S> = (0..n).map(|i| a[(i, i)]).collect();
    ev.sort_by(|x, y| x.partial_cmp(y).unwrap_or(std::cmp::Ordering::Equal));
    ev
}

/// First-order data at `u`.
pub fn frame_at<S: Scalar, C: Chart<S>>(
    surface: &Hypersurface<S, C>,
    u: &[S],
) -> Result<FirstOrderData<S>> {
    let jet = chart_jet(&surface.chart, u, surface.backend, false)?;
    surface.first_from_jet(u, &jet)
}

/// `b_{jk} = −⟨ν, ∇_{T_j} T_k⟩` from a jet with second derivatives.
pub fn second_fundamental_form_from_jet<S: Scalar, C: Chart<S>>(
    surface: &Hypersurface<S, C>,
    first: &FirstOrderData<S>,
    jet: &Jet<S>,
) -> Result<Matrix<S>> {
    let second = jet
        .second
        .as_ref()
        .ok_or(Error::DerivativeUnavailable("chart second derivatives"))?;
    let n = surface.dim();
    let p = &first.point;
    let amb = &surface.ambient;
    Ok(Matrix::from_fn(n, n, |j, k| {
        let d = amb.connection(p, &first.frame[j], &first.frame[k], &second[j][k]);
        -amb.metric(p, &first.normal, &d)
    }))
}

/// Shape operator at `u` using the surface's derivative backend.
pub fn shape_operator_at<S: Scalar, C: Chart<S>>(
    surface: &Hypersurface<S, C>,
    u: &[S],
) -> Result<ShapeData<S>> {
    let n = surface.dim();
    let amb = &surface.ambient;
    let (first, b) = match surface.backend {
        DerivativeBackend::Analytic => {
            let jet = chart_jet(&surface.chart, u, DerivativeBackend::Analytic, true)?;
            let first = surface.first_from_jet(u, &jet)?;
            let b = second_fundamental_form_from_jet(surface, &first, &jet)?;
            (first, b)
        }
        DerivativeBackend::Forward | DerivativeBackend::Central => {
            let first = frame_at(surface, u)?;
            let p = &first.point;
            let mut b = Matrix::zeros(n, n);
            for j in 0..n {
                let dnu = if surface.backend == DerivativeBackend::Forward {
                    let nu = surface.normal_program(&unit_seed(u, j))?;
                    nu.iter().map(|d| d.eps).collect::<Vec<S>>()
                } else {
                    let h = second_difference_step(crate::linalg::norm(u));
                    let mut up = u.to_vec();
                    let mut um = u.to_vec();
                    up[j] += h;
                    um[j] -= h;
                    let (a, c) = (surface.normal_central(&up)?, surface.normal_central(&um)?);
                    a.iter().zip(&c).map(|(&x, &y)| (x - y) / (h + h)).collect()
                };
                let cov = amb.connection(p, &first.frame[j], &first.normal, &dnu);
                for k in 0..n {
                    b[(j, k)] = amb.metric(p, &cov, &first.frame[k]);
                }
            }
            (first, b)
        }
    };
    let weingarten = first.metric_inverse.matmul(&b);
    Ok(ShapeData {
        first,
        second_form: b,
        weingarten,
    })
}

/// `max_j |⟨ν, T_j⟩|` and `|⟨ν, ν⟩ − 1|` at a frame.
pub fn normal_defects<S: Scalar>(ambient: &AmbientModel<S>, first: &FirstOrderData<S>) -> (S, S) {
    let p = &first.point;
    let ortho = first
        .frame
        .iter()
        .map(|t| ambient.metric(p, &first.normal, t).abs() / ambient.metric_norm(p, t))
        .fold(S::zero(), S::max);
    let unit = (ambient.metric(p, &first.normal, &first.normal) - S::one()).abs();
    (ortho, unit)
}

#[doc(hidden)]
pub fn frames_close<S: Scalar>(a: &[Vec<S>], b: &[Vec<S>]) -> S {
    a.iter()
        .zip(b)
        .map(|(x, y)| max_abs_diff(x, y))
        .fold(S::zero(), S::max)
}

#[doc(hidden)]
pub fn flat_dot<S: Scalar>(a: &[S], b: &[S]) -> S {
    dot(a, b)
}
