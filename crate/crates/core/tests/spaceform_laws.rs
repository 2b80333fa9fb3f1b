use curvint_core::dual::{directional, Dual};
use curvint_core::linalg::{norm, scaled, sub};
use curvint_core::spaceform::{
    covariant_derivative_at, position_field, AmbientKind, AmbientModel, AmbientPoint,
    DerivativeBackend, VectorField, Warp,
};
use curvint_core::Real;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_unit(rng: &mut ChaCha8Rng, len: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..len).map(|_| rng.random_range(-1.0..1.0)).collect();
        let n = norm(&v);
        if n > 0.1 {
            return scaled(&v, 1.0 / n);
        }
    }
}

/// A random point of the model, kept away from degenerate loci.
fn random_point(model: &AmbientModel<f64>, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let m = model.dim();
    match model.kind() {
        AmbientKind::Euclidean => (0..m).map(|_| rng.random_range(-3.0..3.0)).collect(),
        AmbientKind::SphereEmbedded => {
            let rho = rng.random_range(0.05..0.9) * std::f64::consts::PI * model.radius();
            model.polar_point(rho, &random_unit(rng, m))
        }
        AmbientKind::Hyperboloid => {
            model.polar_point(rng.random_range(0.0..2.5), &random_unit(rng, m))
        }
        AmbientKind::WarpedProduct => {
            let mut p = vec![rng.random_range(0.1..3.0)];
            p.extend(random_unit(rng, m));
            p
        }
    }
}

fn random_tangent(model: &AmbientModel<f64>, p: &[f64], rng: &mut ChaCha8Rng) -> Vec<f64> {
    let w: Vec<f64> = (0..p.len()).map(|_| rng.random_range(-2.0..2.0)).collect();
    model.project(p, &w)
}

fn models() -> Vec<(&'static str, AmbientModel<f64>)> {
    vec![
        ("c=0", AmbientModel::euclidean(3)),
        ("c=+1", AmbientModel::sphere(3, 1.0).unwrap()),
        ("c=-1", AmbientModel::hyperboloid(3, 1.0).unwrap()),
        (
            "psi=r^2+1",
            AmbientModel::warped(3, Warp::Polynomial(vec![1.0, 0.0, 1.0])),
        ),
    ]
}

fn base_for(model: &AmbientModel<f64>, rng: &mut ChaCha8Rng) -> AmbientPoint<f64> {
    match model.kind() {
        AmbientKind::WarpedProduct => {
            let mut b = vec![0.0];
            b.extend(random_unit(rng, model.dim()));
            AmbientPoint { coords: b }
        }
        AmbientKind::SphereEmbedded => model.pole(),
        _ => model.point(random_point(model, rng)).unwrap(),
    }
}

#[test]
fn position_field_law_on_every_model() {
    for (name, model) in models() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let base = base_for(&model, &mut rng);
        let field = position_field(&model, &base).unwrap();
        for backend in [
            DerivativeBackend::Analytic,
            DerivativeBackend::Forward,
            DerivativeBackend::Central,
        ] {
            let mut worst: f64 = 0.0;
            for _ in 0..100 {
                let p = random_point(&model, &mut rng);
                let y = random_tangent(&model, &p, &mut rng);
                let d = covariant_derivative_at(&model, &field, &p, &y, backend).unwrap();
                let lam = field.lambda(&p).unwrap();
                let diff = sub(&d, &scaled(&y, lam));
                worst = worst.max(model.metric_norm(&p, &diff) / model.metric_norm(&p, &y));
            }
            assert!(worst <= 1e-6, "{name} {}: {worst:e}", backend.name());
        }
    }
}

/// `U(p) = proj_p(M p + a)`
struct Linear {
    model: AmbientModel<f64>,
    m: Vec<Vec<f64>>,
    a: Vec<f64>,
}

impl VectorField<f64> for Linear {
    fn eval<T: Real>(&self, p: &[T]) -> Vec<T> {
        let raw: Vec<T> = self
            .m
            .iter()
            .zip(&self.a)
            .map(|(row, &a)| {
                row.iter()
                    .zip(p)
                    .fold(T::from_f64(a), |acc, (&w, &x)| acc + x.mul_f64(w))
            })
            .collect();
        self.model.project(p, &raw)
    }
}

fn random_linear(model: &AmbientModel<f64>, rng: &mut ChaCha8Rng) -> Linear {
    let len = model.coord_len();
    Linear {
        model: model.clone(),
        m: (0..len)
            .map(|_| (0..len).map(|_| rng.random_range(-1.0..1.0)).collect())
            .collect(),
        a: (0..len).map(|_| rng.random_range(-1.0..1.0)).collect(),
    }
}

#[test]
fn connection_is_metric_compatible() {
    for (name, model) in models() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let u = random_linear(&model, &mut rng);
            let v = random_linear(&model, &mut rng);
            let p = random_point(&model, &mut rng);
            let y = random_tangent(&model, &p, &mut rng);
            let (_, d) = directional(&p, &y, |x: &[Dual<f64>]| {
                vec![model.metric(x, &u.eval(x), &v.eval(x))]
            });
            let du =
                covariant_derivative_at(&model, &u, &p, &y, DerivativeBackend::Forward).unwrap();
            let dv =
                covariant_derivative_at(&model, &v, &p, &y, DerivativeBackend::Forward).unwrap();
            let rhs = model.metric(&p, &du, &v.eval(&p)) + model.metric(&p, &u.eval(&p), &dv);
            assert!((d[0] - rhs).abs() <= 1e-6, "{name}: {} vs {rhs}", d[0]);
        }
    }
}

#[test]
fn covariant_derivative_is_tangent() {
    for (name, model) in models() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let u = random_linear(&model, &mut rng);
            let p = random_point(&model, &mut rng);
            let y = random_tangent(&model, &p, &mut rng);
            let d =
                covariant_derivative_at(&model, &u, &p, &y, DerivativeBackend::Forward).unwrap();
            assert!(model.tangency_residual(&p, &d) < 1e-12, "{name}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn distance_is_symmetric(seed in any::<u64>(), which in 0usize..3) {
        let (_, model) = models().swap_remove(which);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_point(&model, &mut rng);
        let b = random_point(&model, &mut rng);
        let ab = model.geodesic_distance(&a, &b).unwrap();
        let ba = model.geodesic_distance(&b, &a).unwrap();
        prop_assert!((ab - ba).abs() <= 1e-12 * (1.0 + ab));
        prop_assert!(model.geodesic_distance(&a, &a).unwrap().abs() <= 1e-12);
    }

    #[test]
    fn distance_from_pole_recovers_polar_radius(rho in 0.01f64..2.5, seed in any::<u64>(), which in 0usize..3) {
        let (_, model) = models().swap_remove(which);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let dir = random_unit(&mut rng, model.dim());
        let p = model.polar_point(rho, &dir);
        let pole = match model.kind() {
            AmbientKind::Euclidean => vec![0.0; 3],
            _ => model.pole().coords,
        };
        let d = model.geodesic_distance(&pole, &p).unwrap();
        prop_assert!((d - rho).abs() <= 1e-12);
    }

    #[test]
    fn position_field_length_is_s_c(rho in 0.05f64..2.5, seed in any::<u64>(), which in 0usize..3) {
        let (_, model) = models().swap_remove(which);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let base = match model.kind() {
            AmbientKind::Euclidean => model.point(vec![0.0; 3]).unwrap(),
            _ => model.pole(),
        };
        let p = model.polar_point(rho, &random_unit(&mut rng, model.dim()));
        let field = position_field(&model, &base).unwrap();
        let len = model.metric_norm(&p, &field.value(&p).unwrap());
        let c = model.curvature().unwrap();
        let (s, _) = curvint_core::spaceform::warp_functions(c, rho).unwrap();
        prop_assert!((len - s).abs() <= 1e-12);
    }
}
