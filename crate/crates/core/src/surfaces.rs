//! Built-in closed hypersurfaces.
//!
//! Sphere-type charts use the parameter order `(θ₁, …, θ_{n−1}, φ)` with
//! polar angles on open axes `(0, π)` and the azimuth periodic, and put
//! `cos θ₁` in the last coordinate. In ℝ³ this is the usual
//! `(sin θ cos φ, sin θ sin φ, cos θ)`.

use std::f64::consts::PI;

use crate::immersion::{Chart, Jet};
use crate::quadrature::Axis;
use crate::scalar::{Real, Scalar};
use crate::spaceform::{AmbientKind, AmbientModel};

/// Point of the unit sphere `S^n ⊂ ℝ^{n+1}` at angles `(θ₁, …, θ_{n−1}, φ)`.
pub fn sphere_direction<T: Real>(u: &[T]) -> Vec<T> {
    match u {
        [] => vec![T::one()],
        [phi] => vec![phi.cos(), phi.sin()],
        [theta, rest @ ..] => {
            let s = theta.sin();
            let mut out: Vec<T> = sphere_direction(rest).into_iter().map(|x| s * x).collect();
            out.push(theta.cos());
            out
        }
    }
}

fn sphere_domain<S: Scalar>(n: usize) -> Vec<Axis<S>> {
    let mut axes = vec![Axis::open(S::zero(), S::pi()); n - 1];
    axes.push(Axis::periodic(S::zero(), S::of(2.0 * PI)));
    axes
}

#[derive(Clone, Debug, PartialEq)]
pub enum Builtin<S> {
    /// Round sphere of radius `radius` centred at `center` in ℝ^{n+1}.
    Sphere { n: usize, radius: S, center: Vec<S> },
    /// Torus of revolution in ℝ³, `((R + r cos v) cos u, (R + r cos v) sin u, r sin v)`.
    Torus { major: S, minor: S },
    /// Ellipsoid with semi-axes `(a, b, c)` in ℝ³.
    Ellipsoid { axes: [S; 3] },
    /// Geodesic sphere of radius `rho` about the pole of a model.
    GeodesicSphere { model: AmbientModel<S>, rho: S },
    /// `N_t = {(x, t) : |x|² = R₀² − t²}` in `S^{n+1}(R₀) ⊂ ℝ^{n+2}`.
    ///
    /// Parameters are ordered `(φ, θ_{n−1}, …, θ₁)` so that the default
    /// orientation gives `ν = (−t x, R_t²)/(R₀R_t)`.
    LatitudeSphere { n: usize, radius: S, t: S },
}

impl<S: Scalar> Builtin<S> {
    pub fn name(&self) -> &'static str {
        match self {
            Builtin::Sphere { .. } => "sphere",
            Builtin::Torus { .. } => "torus",
            Builtin::Ellipsoid { .. } => "ellipsoid",
            Builtin::GeodesicSphere { .. } => "geodesic-sphere",
            Builtin::LatitudeSphere { .. } => "latitude-sphere",
        }
    }

    /// `R_t = √(R₀² − t²)` for a latitude sphere.
    pub fn latitude_radius(&self) -> Option<S> {
        match self {
            Builtin::LatitudeSphere { radius, t, .. } => Some((*radius * *radius - *t * *t).sqrt()),
            _ => None,
        }
    }
}

/// Jet of `(A sin θ cos φ, B sin θ sin φ, C cos θ)`.
fn spherical_jet<S: Scalar>(abc: [S; 3], theta: S, phi: S) -> Jet<S> {
    let [a, b, c] = abc;
    let (st, ct, sp, cp) = (theta.sin(), theta.cos(), phi.sin(), phi.cos());
    let z = S::zero();
    Jet {
        point: vec![a * st * cp, b * st * sp, c * ct],
        first: vec![
            vec![a * ct * cp, b * ct * sp, -c * st],
            vec![-a * st * sp, b * st * cp, z],
        ],
        second: Some(vec![
            vec![
                vec![-a * st * cp, -b * st * sp, -c * ct],
                vec![-a * ct * sp, b * ct * cp, z],
            ],
            vec![
                vec![-a * ct * sp, b * ct * cp, z],
                vec![-a * st * cp, -b * st * sp, z],
            ],
        ]),
    }
}

impl<S: Scalar> Jet<S> {
    fn map_vectors(self, f: impl Fn(Vec<S>, bool) -> Vec<S>) -> Jet<S> {
        Jet {
            point: f(self.point, true),
            first: self.first.into_iter().map(|v| f(v, false)).collect(),
            second: self.second.map(|s| {
                s.into_iter()
                    .map(|row| row.into_iter().map(|v| f(v, false)).collect())
                    .collect()
            }),
        }
    }

    fn swap_params(mut self, j: usize, k: usize) -> Jet<S> {
        self.first.swap(j, k);
        if let Some(second) = self.second.as_mut() {
            second.swap(j, k);
            for row in second.iter_mut() {
                row.swap(j, k);
            }
        }
        self
    }
}

impl<S: Scalar> Chart<S> for Builtin<S> {
    fn param_dim(&self) -> usize {
        match self {
            Builtin::Sphere { n, .. } | Builtin::LatitudeSphere { n, .. } => *n,
            Builtin::Torus { .. } | Builtin::Ellipsoid { .. } => 2,
            Builtin::GeodesicSphere { model, .. } => model.dim() - 1,
        }
    }

    fn domain(&self) -> Vec<Axis<S>> {
        match self {
            Builtin::Torus { .. } => vec![Axis::periodic(S::zero(), S::of(2.0 * PI)); 2],
            Builtin::LatitudeSphere { n, .. } => {
                let mut d = sphere_domain(*n);
                d.reverse();
                d
            }
            _ => sphere_domain(self.param_dim()),
        }
    }

    fn eval<T: Real>(&self, u: &[T]) -> Vec<T> {
        match self {
            Builtin::Sphere { radius, center, .. } => {
                let r: T = radius.lift();
                sphere_direction(u)
                    .into_iter()
                    .zip(center)
                    .map(|(d, &c)| r * d + c.lift::<T>())
                    .collect()
            }
            Builtin::Torus { major, minor } => {
                let (big, small): (T, T) = (major.lift(), minor.lift());
                let ring = big + small * u[1].cos();
                vec![ring * u[0].cos(), ring * u[0].sin(), small * u[1].sin()]
            }
            Builtin::Ellipsoid { axes } => sphere_direction(u)
                .into_iter()
                .zip(axes)
                .map(|(d, &a)| a.lift::<T>() * d)
                .collect(),
            Builtin::GeodesicSphere { model, rho } => {
                model.polar_point(rho.lift::<T>(), &sphere_direction(u))
            }
            Builtin::LatitudeSphere { radius, t, .. } => {
                let (r0, t): (T, T) = (radius.lift(), t.lift());
                let rt = (r0 * r0 - t * t).sqrt();
                let angles: Vec<T> = u.iter().rev().copied().collect();
                let mut out: Vec<T> = sphere_direction(&angles)
                    .into_iter()
                    .map(|d| rt * d)
                    .collect();
                out.push(t);
                out
            }
        }
    }

    fn analytic_jet(&self, u: &[S]) -> Option<Jet<S>> {
        if u.len() != 2 {
            return None;
        }
        match self {
            Builtin::Sphere { radius, center, .. } => {
                let jet = spherical_jet([*radius; 3], u[0], u[1]);
                Some(jet.map_vectors(|v, is_point| {
                    if is_point {
                        v.iter().zip(center).map(|(&x, &c)| x + c).collect()
                    } else {
                        v
                    }
                }))
            }
            Builtin::Ellipsoid { axes } => Some(spherical_jet(*axes, u[0], u[1])),
            Builtin::Torus { major, minor } => {
                let (big, r) = (*major, *minor);
                let (su, cu, sv, cv) = (u[0].sin(), u[0].cos(), u[1].sin(), u[1].cos());
                let ring = big + r * cv;
                let z = S::zero();
                Some(Jet {
                    point: vec![ring * cu, ring * su, r * sv],
                    first: vec![
                        vec![-ring * su, ring * cu, z],
                        vec![-r * sv * cu, -r * sv * su, r * cv],
                    ],
                    second: Some(vec![
                        vec![
                            vec![-ring * cu, -ring * su, z],
                            vec![r * sv * su, -r * sv * cu, z],
                        ],
                        vec![
                            vec![r * sv * su, -r * sv * cu, z],
                            vec![-r * cv * cu, -r * cv * su, -r * sv],
                        ],
                    ]),
                })
            }
            Builtin::GeodesicSphere { model, rho } => {
                let r0 = model.radius();
                let (scale, extra) = match model.kind() {
                    AmbientKind::Euclidean => (*rho, None),
                    AmbientKind::SphereEmbedded => {
                        let a = *rho / r0;
                        (r0 * a.sin(), Some(r0 * a.cos()))
                    }
                    AmbientKind::Hyperboloid => {
                        let a = *rho / r0;
                        (r0 * a.sinh(), Some(r0 * a.cosh()))
                    }
                    AmbientKind::WarpedProduct => (S::one(), Some(*rho)),
                };
                let kind = model.kind();
                let jet = spherical_jet([scale; 3], u[0], u[1]);
                Some(jet.map_vectors(|v, is_point| {
                    let fill = if is_point {
                        extra
                    } else {
                        extra.map(|_| S::zero())
                    };
                    match (kind, fill) {
                        (AmbientKind::SphereEmbedded, Some(x)) => {
                            let mut v = v;
                            v.push(x);
                            v
                        }
                        (_, Some(x)) => {
                            let mut out = vec![x];
                            out.extend(v);
                            out
                        }
                        (_, None) => v,
                    }
                }))
            }
            Builtin::LatitudeSphere { radius, t, .. } => {
                let rt = (*radius * *radius - *t * *t).sqrt();
                let jet = spherical_jet([rt; 3], u[1], u[0]).swap_params(0, 1);
                let t = *t;
                Some(jet.map_vectors(|mut v, is_point| {
                    v.push(if is_point { t } else { S::zero() });
                    v
                }))
            }
        }
    }
}
