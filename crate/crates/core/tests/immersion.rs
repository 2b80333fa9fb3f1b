use std::f64::consts::{FRAC_PI_2, PI};

use approx::assert_abs_diff_eq;
use curvint_core::immersion::{
    chart_jet, frame_at, normal_defects, second_fundamental_form_from_jet, shape_operator_at,
    Chart, Hypersurface, Jet,
};
use curvint_core::linalg::Matrix;
use curvint_core::quadrature::{build_grid, Axis};
use curvint_core::spaceform::{AmbientModel, DerivativeBackend};
use curvint_core::surfaces::Builtin;
use curvint_core::{Error, Real};

const BACKENDS: [DerivativeBackend; 3] = [
    DerivativeBackend::Analytic,
    DerivativeBackend::Forward,
    DerivativeBackend::Central,
];

fn unit_sphere() -> Hypersurface<f64, Builtin<f64>> {
    let chart = Builtin::Sphere {
        n: 2,
        radius: 1.0,
        center: vec![0.0; 3],
    };
    Hypersurface::new(AmbientModel::euclidean(3), chart).unwrap()
}

fn torus() -> Hypersurface<f64, Builtin<f64>> {
    let chart = Builtin::Torus {
        major: 2.0,
        minor: 1.0,
    };
    Hypersurface::new(AmbientModel::euclidean(3), chart).unwrap()
}

fn latitude(t: f64) -> Hypersurface<f64, Builtin<f64>> {
    let chart = Builtin::LatitudeSphere {
        n: 2,
        radius: 1.0,
        t,
    };
    Hypersurface::new(AmbientModel::sphere(3, 1.0).unwrap(), chart).unwrap()
}

fn max_entry_diff(a: &Matrix<f64>, b: &Matrix<f64>) -> f64 {
    a.sub(b).max_abs()
}

#[test]
fn unit_sphere_frame_at_equator() {
    let f = frame_at(&unit_sphere(), &[FRAC_PI_2, 0.0]).unwrap();
    assert_abs_diff_eq!(f.normal[0], 1.0, epsilon = 1e-15);
    assert_abs_diff_eq!(f.normal[1], 0.0, epsilon = 1e-15);
    assert_abs_diff_eq!(f.normal[2], 0.0, epsilon = 1e-15);
    assert_abs_diff_eq!(f.density, 1.0, epsilon = 1e-15);
}

#[test]
fn torus_density_is_r_times_ring_radius() {
    let s = torus();
    for &(u, v) in &[(0.0, 0.0), (1.0, 2.0), (4.0, 3.3), (0.3, PI)] {
        let f = frame_at(&s, &[u, v]).unwrap();
        assert_abs_diff_eq!(f.density, 2.0 + v.cos(), epsilon = 1e-13);
    }
}

#[test]
fn latitude_normal_matches_closed_form() {
    let t = 0.5;
    let rt = (1.0f64 - t * t).sqrt();
    for backend in BACKENDS {
        let s = latitude(t).with_backend(backend);
        for u in [[0.3, 1.1], [2.0, 2.5], [5.5, 0.2]] {
            let f = frame_at(&s, &u).unwrap();
            let p = &f.point;
            // (−t x, R_t²)/(R₀R_t)
            let expected = [-t * p[0] / rt, -t * p[1] / rt, -t * p[2] / rt, rt];
            for k in 0..4 {
                assert_abs_diff_eq!(f.normal[k], expected[k], epsilon = 1e-9);
            }
            let (ortho, unit) = normal_defects(s.ambient(), &f);
            assert!(ortho <= 1e-10 && unit <= 1e-12);
            // tangent to the model sphere
            assert!(
                p.iter()
                    .zip(&f.normal)
                    .map(|(a, b)| a * b)
                    .sum::<f64>()
                    .abs()
                    < 1e-12
            );
        }
    }
}

#[test]
fn unit_sphere_weingarten_is_identity() {
    for backend in BACKENDS {
        let s = unit_sphere().with_backend(backend);
        let shape = shape_operator_at(&s, &[0.9, 2.1]).unwrap();
        let err = max_entry_diff(&shape.weingarten, &Matrix::identity(2));
        assert!(err < 1e-7, "{}: {err}", backend.name());
    }
}

#[test]
fn latitude_sphere_is_umbilic_with_negative_curvature() {
    let t = 0.5;
    let lam = -t / (1.0f64 - t * t).sqrt();
    for backend in BACKENDS {
        let s = latitude(t).with_backend(backend);
        let shape = shape_operator_at(&s, &[1.3, 0.8]).unwrap();
        let expected = Matrix::identity(2).scale(&lam);
        assert!(max_entry_diff(&shape.weingarten, &expected) < 1e-7);
        for k in shape.principal_curvatures() {
            assert_abs_diff_eq!(k, lam, epsilon = 1e-7);
        }
    }
}

/// The plane `z = 0` over the square; not closed, but enough for local data.
struct Plane;

impl Chart<f64> for Plane {
    fn param_dim(&self) -> usize {
        2
    }
    fn domain(&self) -> Vec<Axis<f64>> {
        vec![Axis::open(-1.0, 1.0); 2]
    }
    fn eval<T: Real>(&self, u: &[T]) -> Vec<T> {
        vec![u[0] + u[1], u[1].mul_f64(2.0), T::zero()]
    }
}

#[test]
fn flat_plane_has_zero_shape_operator() {
    let s = Hypersurface::new(AmbientModel::euclidean(3), Plane).unwrap();
    let shape = shape_operator_at(&s, &[0.2, -0.4]).unwrap();
    assert!(shape.weingarten.max_abs() < 1e-14);
    let c = Hypersurface::new(AmbientModel::euclidean(3), Plane)
        .unwrap()
        .with_backend(DerivativeBackend::Central);
    assert!(
        shape_operator_at(&c, &[0.2, -0.4])
            .unwrap()
            .weingarten
            .max_abs()
            < 1e-7
    );
}

#[test]
fn analytic_backend_requires_a_closed_form_chart() {
    let s = Hypersurface::new(AmbientModel::euclidean(3), Plane)
        .unwrap()
        .with_backend(DerivativeBackend::Analytic);
    assert!(matches!(
        shape_operator_at(&s, &[0.0, 0.0]),
        Err(Error::DerivativeUnavailable(_))
    ));
}

#[test]
fn backends_agree_on_sphere_and_torus() {
    for make in [unit_sphere as fn() -> _, torus] {
        for u in [[0.4, 0.1], [1.7, 3.0], [2.9, 5.0]] {
            let reference =
                shape_operator_at(&make().with_backend(DerivativeBackend::Analytic), &u)
                    .unwrap()
                    .weingarten;
            for backend in [DerivativeBackend::Forward, DerivativeBackend::Central] {
                let w = shape_operator_at(&make().with_backend(backend), &u)
                    .unwrap()
                    .weingarten;
                assert!(max_entry_diff(&w, &reference) <= 1e-6, "{}", backend.name());
            }
        }
    }
}

#[test]
fn weingarten_route_matches_normal_derivative_route() {
    // b_jk = −⟨ν, ∇_{T_j}T_k⟩ with forward-mode second partials
    let s = latitude(0.3);
    let u = [0.7, 2.2];
    let shape = shape_operator_at(&s, &u).unwrap();
    let jet: Jet<f64> = chart_jet(s.chart(), &u, DerivativeBackend::Forward, true).unwrap();
    let b = second_fundamental_form_from_jet(&s, &shape.first, &jet).unwrap();
    assert!(max_entry_diff(&b, &shape.second_form) < 1e-12);
}

#[test]
fn self_adjoint_at_every_node() {
    let surfaces = [
        unit_sphere(),
        torus(),
        Hypersurface::new(
            AmbientModel::euclidean(3),
            Builtin::Ellipsoid {
                axes: [1.0, 1.3, 0.7],
            },
        )
        .unwrap(),
        latitude(0.5),
    ];
    for s in &surfaces {
        let grid = build_grid(&s.domain(), &[12, 12]).unwrap();
        for idx in 0..grid.len() {
            let (u, _) = grid.node(idx);
            let shape = shape_operator_at(s, &u).unwrap();
            let gw = shape.first.metric.matmul(&shape.weingarten);
            assert!(shape.self_adjointness_defect() <= 1e-8 * (1.0 + gw.max_abs()));
        }
    }
}

fn geodesic_sphere(model: AmbientModel<f64>, rho: f64) -> Hypersurface<f64, Builtin<f64>> {
    Hypersurface::new(model.clone(), Builtin::GeodesicSphere { model, rho }).unwrap()
}

#[test]
fn geodesic_spheres_are_umbilic_in_all_space_forms() {
    let cases = [
        (AmbientModel::euclidean(3), 0.8, 1.0 / 0.8),
        (
            AmbientModel::sphere(3, 2.0).unwrap(),
            1.1,
            (1.1f64 / 2.0).cos() / (2.0 * (1.1f64 / 2.0).sin()),
        ),
        (
            AmbientModel::hyperboloid(3, 1.0).unwrap(),
            1.0,
            1.0 / 1.0f64.tanh(),
        ),
    ];
    for (model, rho, expected) in cases {
        let s = geodesic_sphere(model, rho);
        let grid = build_grid(&s.domain(), &[6, 8]).unwrap();
        for idx in 0..grid.len() {
            let shape = shape_operator_at(&s, &grid.node(idx).0).unwrap();
            let lam = shape.weingarten[(0, 0)];
            let umbilic = max_entry_diff(&shape.weingarten, &Matrix::identity(2).scale(&lam));
            assert!(umbilic <= 1e-7);
            assert_abs_diff_eq!(lam.abs(), expected, epsilon = 1e-7);
        }
    }
}

#[test]
fn hyperbolic_geodesic_sphere_outward_normal_gives_coth() {
    let s = geodesic_sphere(AmbientModel::hyperboloid(3, 1.0).unwrap(), 1.0);
    let shape = shape_operator_at(&s, &[1.0, 1.0]).unwrap();
    let lam = shape.weingarten[(0, 0)];
    // default orientation on these charts points away from the pole
    assert_abs_diff_eq!(lam, 1.0 / 1.0f64.tanh(), epsilon = 1e-9);
    let flipped = shape_operator_at(&s.clone().with_normal_sign(-1), &[1.0, 1.0]).unwrap();
    assert_abs_diff_eq!(flipped.weingarten[(0, 0)], -lam, epsilon = 1e-12);
}

/// `u ↦ chart(M u + b)`
struct Affine<C> {
    inner: C,
    m: [[f64; 2]; 2],
    b: [f64; 2],
}

impl<C: Chart<f64>> Chart<f64> for Affine<C> {
    fn param_dim(&self) -> usize {
        2
    }
    fn domain(&self) -> Vec<Axis<f64>> {
        self.inner.domain()
    }
    fn eval<T: Real>(&self, u: &[T]) -> Vec<T> {
        let v: Vec<T> = (0..2)
            .map(|r| {
                u[0].mul_f64(self.m[r][0]) + u[1].mul_f64(self.m[r][1]) + T::from_f64(self.b[r])
            })
            .collect();
        self.inner.eval(&v)
    }
}

#[test]
fn principal_curvatures_survive_affine_reparametrization() {
    let ell = Builtin::Ellipsoid {
        axes: [1.0, 1.3, 0.7],
    };
    let m = [[0.5, 0.25], [-0.3, 1.5]];
    let b = [0.1, -0.2];
    let original = Hypersurface::new(AmbientModel::euclidean(3), ell.clone()).unwrap();
    let reparam =
        Hypersurface::new(AmbientModel::euclidean(3), Affine { inner: ell, m, b }).unwrap();
    for w in [[0.3, 0.4], [1.0, 2.0], [-0.5, 0.9]] {
        let u = [
            m[0][0] * w[0] + m[0][1] * w[1] + b[0],
            m[1][0] * w[0] + m[1][1] * w[1] + b[1],
        ];
        let a = shape_operator_at(&original, &u)
            .unwrap()
            .principal_curvatures();
        let c = shape_operator_at(&reparam, &w)
            .unwrap()
            .principal_curvatures();
        // the reparametrization has negative Jacobian sign iff det M < 0
        let flip = if m[0][0] * m[1][1] - m[0][1] * m[1][0] < 0.0 {
            -1.0
        } else {
            1.0
        };
        let mut c: Vec<f64> = c.iter().map(|k| flip * k).collect();
        c.sort_by(|x, y| x.partial_cmp(y).unwrap());
        for (x, y) in a.iter().zip(&c) {
            assert_abs_diff_eq!(x, y, epsilon = 1e-8);
        }
    }
}

/// Collapses the θ direction.
struct Degenerate;

impl Chart<f64> for Degenerate {
    fn param_dim(&self) -> usize {
        2
    }
    fn domain(&self) -> Vec<Axis<f64>> {
        vec![Axis::open(0.0, 1.0), Axis::periodic(0.0, 2.0 * PI)]
    }
    fn eval<T: Real>(&self, u: &[T]) -> Vec<T> {
        vec![u[1].cos(), u[1].sin(), T::zero()]
    }
}

#[test]
fn degenerate_and_off_model_charts_are_rejected() {
    let s = Hypersurface::new(AmbientModel::euclidean(3), Degenerate).unwrap();
    assert!(matches!(
        frame_at(&s, &[0.5, 1.0]),
        Err(Error::RankDeficient { .. })
    ));

    // a unit sphere placed in S³(2) is not on the model
    let off = Hypersurface::new(
        AmbientModel::sphere(3, 2.0).unwrap(),
        latitude_chart(1.0, 0.5),
    );
    let off = off.unwrap();
    assert!(matches!(
        frame_at(&off, &[0.5, 1.0]),
        Err(Error::NotOnModel { .. })
    ));

    assert!(matches!(
        Hypersurface::new(AmbientModel::euclidean(4), Plane),
        Err(Error::Dimension { .. })
    ));
}

fn latitude_chart(radius: f64, t: f64) -> Builtin<f64> {
    Builtin::LatitudeSphere { n: 2, radius, t }
}

/// Near-singular parametrization: `(u, ε v)` stretched.
struct Squashed;

impl Chart<f64> for Squashed {
    fn param_dim(&self) -> usize {
        2
    }
    fn domain(&self) -> Vec<Axis<f64>> {
        vec![Axis::open(0.0, 1.0); 2]
    }
    fn eval<T: Real>(&self, u: &[T]) -> Vec<T> {
        vec![u[0], u[1].mul_f64(1e-7), T::zero()]
    }
}

#[test]
fn ill_conditioned_metric_is_reported() {
    let s = Hypersurface::new(AmbientModel::euclidean(3), Squashed).unwrap();
    assert!(matches!(
        shape_operator_at(&s, &[0.5, 0.5]),
        Err(Error::IllConditioned { .. })
    ));
}

#[test]
fn three_dimensional_sphere_is_umbilic() {
    let s = Hypersurface::new(
        AmbientModel::euclidean(4),
        Builtin::Sphere {
            n: 3,
            radius: 2.0,
            center: vec![0.0; 4],
        },
    )
    .unwrap();
    let shape = shape_operator_at(&s, &[0.7, 1.2, 4.0]).unwrap();
    for k in shape.principal_curvatures() {
        assert_abs_diff_eq!(k, 0.5, epsilon = 1e-12);
    }
}
