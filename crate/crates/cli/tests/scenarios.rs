use curvint::runner::Experiment;
use curvint::scenario::{parse, CheckKind};
use curvint::{bundled, BUNDLED};

#[test]
fn every_bundled_scenario_passes() {
    for (name, _) in BUNDLED {
        let s = bundled(name).unwrap();
        let out = curvint::run(&s).unwrap();
        assert!(out.passed, "{name}\n{}", out.summary);
        assert!(!out.rows.is_empty());
    }
}

#[test]
fn flipping_the_normal_keeps_identities_and_flips_curvature() {
    let mut s = bundled("s3_latitude").unwrap();
    s.surface.normal_sign = -1;
    let out = curvint::run(&s).unwrap();
    assert!(out.passed, "{}", out.summary);
    let exp = Experiment::new(&s).unwrap();
    assert!(exp.umbilic_value.unwrap() > 0.0);
}

#[test]
fn backends_agree_on_the_hyperbolic_sphere() {
    let mut csvs = Vec::new();
    for backend in ["forward", "central", "analytic"] {
        let mut s = bundled("hyperbolic_sphere").unwrap();
        s.surface.backend = backend.into();
        // second differences keep roughly a quarter of the digits
        if backend == "central" {
            for c in &mut s.checks {
                c.tol = c.tol.max(1e-4);
            }
        }
        let out = curvint::run(&s).unwrap();
        assert!(out.passed, "{backend}\n{}", out.summary);
        csvs.push(out.rows);
    }
    for (a, b) in csvs[0].iter().zip(&csvs[2]) {
        assert!((a.residual - b.residual).abs() <= 1e-12);
    }
}

#[test]
fn warped_space_form_behaves_like_the_embedded_one() {
    // ψ = sin on the r-slices of the warped model is the unit 3-sphere
    let text = "
        [ambient]
        kind = warped
        dim = 3
        warp = spaceform
        c = 1
        [surface]
        type = geodesic-sphere
        rho = 1
        [field]
        base = 0, 1, 0, 0
        [checks]
        spaceform = indices=0,1 tol=1e-8
        principal_curvatures = tol=1e-8
        [quadrature]
        resolution = 24
    ";
    let out = curvint::run(&parse(text).unwrap()).unwrap();
    assert!(out.passed, "{}", out.summary);
}

#[test]
fn checks_needing_missing_data_are_rejected() {
    let base = "[ambient]\nkind = euclidean\ndim = 3\n[surface]\ntype = torus\nmajor = 2\nminor = 1\n[checks]\n";
    for (check, line) in [
        ("katsurada = indices=0 tol=1e-8", 9),
        ("flux = indices=1 tol=1e-8", 9),
        ("closed_form_h = indices=1 tol=1e-8", 9),
    ] {
        let s = parse(&format!("{base}{check}\n[quadrature]\nresolution = 8\n")).unwrap();
        match Experiment::new(&s) {
            Err(curvint::CliError::Parse { line: l, .. }) => assert_eq!(l, line, "{check}"),
            other => panic!("{check}: {:?}", other.err()),
        }
    }
}

#[test]
fn guards() {
    let ok = "[ambient]\nkind = euclidean\ndim = 3\n[surface]\ntype = sphere\nradius = 1\n[checks]\numbilic = tol=1e-8\n[quadrature]\nresolution = 8\n";
    assert!(parse(ok).is_ok());
    for bad in [
        ok.replace("resolution = 8", "resolution = 3"),
        ok.replace("resolution = 8", "resolution = 8, 8, 8"),
        ok.replace("radius = 1", "radius = -1"),
        ok.replace("tol=1e-8", "tol=-1"),
        ok.replace("umbilic = tol=1e-8", "umbilic = indices=0 tol=1e-8"),
        ok.replace("[checks]\numbilic = tol=1e-8\n", "[checks]\n"),
        ok.replace("type = sphere", "type = klein-bottle"),
        ok.replace("dim = 3", "dim = 1"),
    ] {
        assert!(parse(&bad).is_err(), "{bad}");
    }
    let s = parse(ok).unwrap();
    assert_eq!(s.checks[0].kind, CheckKind::Umbilic);
    // torus and ellipsoid charts are three-dimensional only
    let s = parse(&ok.replace("dim = 3", "dim = 4").replace(
        "type = sphere\nradius = 1",
        "type = torus\nmajor = 2\nminor = 1",
    ))
    .unwrap();
    assert!(Experiment::new(&s).is_err());
}

#[test]
fn convergence_needs_two_levels() {
    let s = bundled("unit_sphere").unwrap();
    assert!(curvint::convergence(&s, 1).is_err());
    let out = curvint::convergence(&s, 2).unwrap();
    assert!(out.passed);
    assert_eq!(out.rows.len(), 2 * 5);
}
