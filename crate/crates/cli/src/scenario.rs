//! Scenario files.
//!
//! ```text
//! # comment
//! [ambient]
//! kind = sphere        # euclidean | sphere | hyperboloid | warped
//! dim = 3
//! radius = 1
//!
//! [surface]
//! type = latitude-sphere
//! t = 1/2
//!
//! [checks]
//! spaceform = indices=0,1 tol=1e-8
//!
//! [quadrature]
//! resolution = 16, 16
//! ```
//!
//! Numbers accept `p/q`. Lists are comma separated; lists of vectors
//! (several `v0`, matrix rows) are separated by `|`.

use std::collections::BTreeMap;
use std::path::PathBuf;

use crate::error::CliError;

pub const MAX_RESOLUTION: usize = 4096;

#[derive(Clone, Debug, PartialEq)]
pub enum AmbientSpec {
    Euclidean { dim: usize },
    Sphere { dim: usize, radius: f64 },
    Hyperboloid { dim: usize, radius: f64 },
    WarpedSpaceForm { dim: usize, c: f64 },
    WarpedPolynomial { dim: usize, coeffs: Vec<f64> },
}

impl AmbientSpec {
    pub fn dim(&self) -> usize {
        match self {
            AmbientSpec::Euclidean { dim }
            | AmbientSpec::Sphere { dim, .. }
            | AmbientSpec::Hyperboloid { dim, .. }
            | AmbientSpec::WarpedSpaceForm { dim, .. }
            | AmbientSpec::WarpedPolynomial { dim, .. } => *dim,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum SurfaceKind {
    Sphere {
        radius: f64,
        center: Option<Vec<f64>>,
    },
    Torus {
        major: f64,
        minor: f64,
    },
    Ellipsoid {
        axes: [f64; 3],
    },
    GeodesicSphere {
        rho: f64,
    },
    LatitudeSphere {
        t: f64,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct SurfaceSpec {
    pub kind: SurfaceKind,
    pub normal_sign: i8,
    pub backend: String,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct FieldSpec {
    pub base: Option<Vec<f64>>,
    pub v0: Vec<Vec<f64>>,
    /// Killing generator rows.
    pub generator: Option<Vec<Vec<f64>>>,
    /// Plane `(a, b)` of a unit rotation generator.
    pub rotation: Option<(usize, usize)>,
    pub translation: Option<Vec<f64>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum CheckKind {
    Minkowski,
    Spaceform,
    PointwiseMinkowski,
    Flux,
    Katsurada,
    KatsuradaRatio,
    ClosedFormH,
    PrincipalCurvatures,
    Umbilic,
}

impl CheckKind {
    pub fn name(self) -> &'static str {
        match self {
            CheckKind::Minkowski => "minkowski",
            CheckKind::Spaceform => "spaceform",
            CheckKind::PointwiseMinkowski => "pointwise_minkowski",
            CheckKind::Flux => "flux",
            CheckKind::Katsurada => "katsurada",
            CheckKind::KatsuradaRatio => "katsurada_ratio",
            CheckKind::ClosedFormH => "closed_form_h",
            CheckKind::PrincipalCurvatures => "principal_curvatures",
            CheckKind::Umbilic => "umbilic",
        }
    }

    fn from_name(s: &str) -> Option<Self> {
        [
            CheckKind::Minkowski,
            CheckKind::Spaceform,
            CheckKind::PointwiseMinkowski,
            CheckKind::Flux,
            CheckKind::Katsurada,
            CheckKind::KatsuradaRatio,
            CheckKind::ClosedFormH,
            CheckKind::PrincipalCurvatures,
            CheckKind::Umbilic,
        ]
        .into_iter()
        .find(|k| k.name() == s)
    }

    /// Checks whose rows carry a curvature index.
    fn indexed(self) -> bool {
        !matches!(self, CheckKind::PrincipalCurvatures | CheckKind::Umbilic)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CheckSpec {
    pub kind: CheckKind,
    pub indices: Vec<i64>,
    pub tol: f64,
    pub line: usize,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct OutputSpec {
    pub csv: Option<PathBuf>,
    pub plot: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Scenario {
    pub ambient: AmbientSpec,
    pub surface: SurfaceSpec,
    pub field: FieldSpec,
    pub checks: Vec<CheckSpec>,
    pub resolution: Vec<usize>,
    pub output: OutputSpec,
}

/// `key → (value, line)` per section.
type Sections = BTreeMap<String, BTreeMap<String, (String, usize)>>;

const SECTIONS: [&str; 6] = [
    "ambient",
    "surface",
    "field",
    "checks",
    "quadrature",
    "output",
];

fn err(line: usize, msg: impl Into<String>) -> CliError {
    CliError::Parse {
        line,
        msg: msg.into(),
    }
}

fn split_sections(text: &str) -> Result<Sections, CliError> {
    let mut out: Sections = BTreeMap::new();
    let mut current: Option<String> = None;
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if let Some(rest) = content.strip_prefix('[') {
            let name = rest
                .strip_suffix(']')
                .ok_or_else(|| err(line, "unterminated section header"))?
                .trim();
            if !SECTIONS.contains(&name) {
                return Err(err(line, format!("unknown section [{name}]")));
            }
            if out.contains_key(name) {
                return Err(err(line, format!("duplicate section [{name}]")));
            }
            out.insert(name.to_string(), BTreeMap::new());
            current = Some(name.to_string());
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| err(line, format!("expected `key = value`, found `{content}`")))?;
        let section = current
            .as_ref()
            .ok_or_else(|| err(line, "key outside of any section"))?;
        let key = key.trim().to_string();
        if key.is_empty() {
            return Err(err(line, "empty key"));
        }
        let map = out.get_mut(section).expect("section exists");
        if map.contains_key(&key) {
            return Err(err(line, format!("duplicate key `{key}`")));
        }
        map.insert(key, (value.trim().to_string(), line));
    }
    Ok(out)
}

/// A decimal or `p/q` rational.
pub fn parse_number(s: &str) -> Option<f64> {
    let s = s.trim();
    if let Some((p, q)) = s.split_once('/') {
        let (p, q) = (p.trim().parse::<i64>().ok()?, q.trim().parse::<i64>().ok()?);
        if q == 0 {
            return None;
        }
        return Some(p as f64 / q as f64);
    }
    let x: f64 = s.parse().ok()?;
    x.is_finite().then_some(x)
}

fn parse_list(s: &str, line: usize) -> Result<Vec<f64>, CliError> {
    s.split(',')
        .map(|t| parse_number(t).ok_or_else(|| err(line, format!("not a number: `{}`", t.trim()))))
        .collect()
}

fn parse_int_list(s: &str, line: usize) -> Result<Vec<i64>, CliError> {
    let mut out = Vec::new();
    for t in s.split(',') {
        let t = t.trim();
        if let Some((a, b)) = t.split_once("..") {
            let a: i64 = a
                .trim()
                .parse()
                .map_err(|_| err(line, format!("bad range `{t}`")))?;
            let b: i64 = b
                .trim()
                .parse()
                .map_err(|_| err(line, format!("bad range `{t}`")))?;
            if b < a {
                return Err(err(line, format!("empty range `{t}`")));
            }
            out.extend(a..=b);
        } else {
            out.push(
                t.parse()
                    .map_err(|_| err(line, format!("not an integer: `{t}`")))?,
            );
        }
    }
    Ok(out)
}

struct Section<'a> {
    name: &'static str,
    map: BTreeMap<String, (String, usize)>,
    header: usize,
    _marker: std::marker::PhantomData<&'a ()>,
}

impl Section<'_> {
    fn take(&mut self, key: &str) -> Option<(String, usize)> {
        self.map.remove(key)
    }

    fn number(&mut self, key: &str) -> Result<Option<f64>, CliError> {
        match self.take(key) {
            None => Ok(None),
            Some((v, line)) => parse_number(&v)
                .map(Some)
                .ok_or_else(|| err(line, format!("`{key}` is not a number: `{v}`"))),
        }
    }

    fn required_number(&mut self, key: &str) -> Result<f64, CliError> {
        self.number(key)?
            .ok_or_else(|| err(self.header, format!("[{}] needs `{key}`", self.name)))
    }

    fn positive(&mut self, key: &str) -> Result<f64, CliError> {
        let line = self.map.get(key).map_or(self.header, |(_, l)| *l);
        let x = self.required_number(key)?;
        if x > 0.0 {
            Ok(x)
        } else {
            Err(err(line, format!("`{key}` must be positive")))
        }
    }

    fn list(&mut self, key: &str) -> Result<Option<Vec<f64>>, CliError> {
        self.take(key)
            .map(|(v, line)| parse_list(&v, line))
            .transpose()
    }

    fn finish(self) -> Result<(), CliError> {
        match self.map.into_iter().next() {
            None => Ok(()),
            Some((k, (_, line))) => Err(err(line, format!("unknown key `{k}` in [{}]", self.name))),
        }
    }
}

fn section<'a>(
    all: &mut Sections,
    name: &'static str,
    required: bool,
) -> Result<Section<'a>, CliError> {
    match all.remove(name) {
        Some(map) => {
            let header = map.values().map(|(_, l)| *l).min().unwrap_or(1);
            Ok(Section {
                name,
                map,
                header,
                _marker: std::marker::PhantomData,
            })
        }
        None if required => Err(err(0, format!("missing section [{name}]"))),
        None => Ok(Section {
            name,
            map: BTreeMap::new(),
            header: 0,
            _marker: std::marker::PhantomData,
        }),
    }
}

fn parse_ambient(s: &mut Section) -> Result<AmbientSpec, CliError> {
    let (kind, kline) = s
        .take("kind")
        .ok_or_else(|| err(s.header, "[ambient] needs `kind`"))?;
    let dim_line = s.map.get("dim").map_or(s.header, |(_, l)| *l);
    let dim = s.required_number("dim")?;
    if dim.fract() != 0.0 || !(2.0..=8.0).contains(&dim) {
        return Err(err(dim_line, "`dim` must be an integer in 2..=8"));
    }
    let dim = dim as usize;
    // radius R₀ directly, or through c with c·R₀² = ±1
    let radius = |s: &mut Section, sign: f64| -> Result<f64, CliError> {
        let r = s.number("radius")?;
        let c = s.number("c")?;
        match (r, c) {
            (Some(r), None) if r > 0.0 => Ok(r),
            (None, Some(c)) if c * sign > 0.0 => Ok(1.0 / (c * sign).sqrt()),
            (Some(r), Some(c)) if r > 0.0 && ((c * r * r) - sign).abs() <= 1e-12 => Ok(r),
            _ => Err(err(
                s.header,
                "give a positive `radius` or a matching `c` (c·R₀² = ±1)",
            )),
        }
    };
    Ok(match kind.as_str() {
        "euclidean" => AmbientSpec::Euclidean { dim },
        "sphere" => AmbientSpec::Sphere {
            dim,
            radius: radius(s, 1.0)?,
        },
        "hyperboloid" | "hyperbolic" => AmbientSpec::Hyperboloid {
            dim,
            radius: radius(s, -1.0)?,
        },
        "warped" => {
            let (warp, wline) = s
                .take("warp")
                .ok_or_else(|| err(s.header, "warped ambient needs `warp`"))?;
            match warp.as_str() {
                "spaceform" => AmbientSpec::WarpedSpaceForm {
                    dim,
                    c: s.required_number("c")?,
                },
                "polynomial" => AmbientSpec::WarpedPolynomial {
                    dim,
                    coeffs: s
                        .list("coeffs")?
                        .ok_or_else(|| err(wline, "polynomial warp needs `coeffs`"))?,
                },
                other => return Err(err(wline, format!("unknown warp `{other}`"))),
            }
        }
        other => return Err(err(kline, format!("unknown ambient kind `{other}`"))),
    })
}

fn parse_surface(s: &mut Section, ambient: &AmbientSpec) -> Result<SurfaceSpec, CliError> {
    let (ty, tline) = s
        .take("type")
        .ok_or_else(|| err(s.header, "[surface] needs `type`"))?;
    let kind = match ty.as_str() {
        "sphere" => SurfaceKind::Sphere {
            radius: s.positive("radius")?,
            center: s.list("center")?,
        },
        "torus" => {
            let major = s.positive("major")?;
            let minor = s.positive("minor")?;
            if minor >= major {
                return Err(err(tline, "torus needs minor < major to be immersed"));
            }
            SurfaceKind::Torus { major, minor }
        }
        "ellipsoid" => {
            let axes_line = s.map.get("axes").map_or(s.header, |(_, l)| *l);
            let axes = s
                .list("axes")?
                .ok_or_else(|| err(tline, "ellipsoid needs `axes`"))?;
            match axes[..] {
                [a, b, c] if a > 0.0 && b > 0.0 && c > 0.0 => {
                    SurfaceKind::Ellipsoid { axes: [a, b, c] }
                }
                _ => return Err(err(axes_line, "`axes` must be three positive numbers")),
            }
        }
        "geodesic-sphere" => SurfaceKind::GeodesicSphere {
            rho: s.positive("rho")?,
        },
        "latitude-sphere" | "latitude-sphere-in-S3" => {
            let t_line = s.map.get("t").map_or(s.header, |(_, l)| *l);
            let t = s.required_number("t")?;
            if let AmbientSpec::Sphere { radius, .. } = ambient {
                if t.abs() >= *radius {
                    return Err(err(t_line, "latitude needs |t| < R₀"));
                }
            } else {
                return Err(err(tline, "latitude spheres live in a sphere ambient"));
            }
            SurfaceKind::LatitudeSphere { t }
        }
        other => return Err(err(tline, format!("unknown surface `{other}`"))),
    };
    let sign_line = s.map.get("normal_sign").map_or(s.header, |(_, l)| *l);
    let normal_sign = match s.number("normal_sign")? {
        None => 1,
        Some(x) if x == 1.0 => 1,
        Some(x) if x == -1.0 => -1,
        Some(_) => return Err(err(sign_line, "`normal_sign` must be 1 or -1")),
    };
    let backend = match s.take("backend") {
        None => "forward".to_string(),
        Some((b, line)) => match b.as_str() {
            "analytic" | "forward" | "central" => b,
            _ => return Err(err(line, format!("unknown backend `{b}`"))),
        },
    };
    Ok(SurfaceSpec {
        kind,
        normal_sign,
        backend,
    })
}

fn parse_field(s: &mut Section) -> Result<FieldSpec, CliError> {
    let mut f = FieldSpec {
        base: s.list("base")?,
        translation: s.list("translation")?,
        ..FieldSpec::default()
    };
    if let Some((v, line)) = s.take("v0") {
        f.v0 = v
            .split('|')
            .map(|part| parse_list(part, line))
            .collect::<Result<_, _>>()?;
    }
    if let Some((v, line)) = s.take("generator") {
        f.generator = Some(
            v.split('|')
                .map(|row| parse_list(row, line))
                .collect::<Result<_, _>>()?,
        );
    }
    if let Some((v, line)) = s.take("rotation") {
        let idx = parse_int_list(&v, line)?;
        match idx[..] {
            [a, b] if a >= 0 && b >= 0 && a != b => f.rotation = Some((a as usize, b as usize)),
            _ => {
                return Err(err(
                    line,
                    "`rotation` takes two distinct coordinate indices",
                ))
            }
        }
    }
    if f.generator.is_some() && f.rotation.is_some() {
        return Err(err(
            s.header,
            "give either `generator` or `rotation`, not both",
        ));
    }
    Ok(f)
}

fn parse_check(name: &str, value: &str, line: usize) -> Result<CheckSpec, CliError> {
    let kind =
        CheckKind::from_name(name).ok_or_else(|| err(line, format!("unknown check `{name}`")))?;
    let mut indices = None;
    let mut tol = None;
    for opt in value.split_whitespace() {
        let (k, v) = opt
            .split_once('=')
            .ok_or_else(|| err(line, format!("expected `key=value`, found `{opt}`")))?;
        match k {
            "indices" | "i" | "j" => indices = Some(parse_int_list(v, line)?),
            "tol" => {
                let t = parse_number(v).ok_or_else(|| err(line, format!("bad tolerance `{v}`")))?;
                if !(t > 0.0) {
                    return Err(err(line, "tolerance must be positive"));
                }
                tol = Some(t);
            }
            other => return Err(err(line, format!("unknown option `{other}`"))),
        }
    }
    let indices = match (kind.indexed(), indices) {
        (true, Some(ix)) => ix,
        (true, None) => return Err(err(line, format!("`{name}` needs indices=…"))),
        (false, Some(_)) => return Err(err(line, format!("`{name}` takes no indices"))),
        (false, None) => vec![0],
    };
    Ok(CheckSpec {
        kind,
        indices,
        tol: tol.ok_or_else(|| err(line, format!("`{name}` needs tol=…")))?,
        line,
    })
}

pub fn parse(text: &str) -> Result<Scenario, CliError> {
    let mut all = split_sections(text)?;
    let mut amb = section(&mut all, "ambient", true)?;
    let ambient = parse_ambient(&mut amb)?;
    amb.finish()?;

    let mut surf = section(&mut all, "surface", true)?;
    let surface = parse_surface(&mut surf, &ambient)?;
    surf.finish()?;

    let mut fld = section(&mut all, "field", false)?;
    let field = parse_field(&mut fld)?;
    fld.finish()?;

    let chk = section(&mut all, "checks", true)?;
    let mut checks: Vec<CheckSpec> = chk
        .map
        .iter()
        .map(|(k, (v, line))| parse_check(k, v, *line))
        .collect::<Result<_, _>>()?;
    if checks.is_empty() {
        return Err(err(chk.header, "[checks] is empty"));
    }
    checks.sort_by_key(|c| c.line);

    let mut quad = section(&mut all, "quadrature", true)?;
    let (res, rline) = quad
        .take("resolution")
        .ok_or_else(|| err(quad.header, "[quadrature] needs `resolution`"))?;
    let resolution: Vec<usize> = parse_int_list(&res, rline)?
        .into_iter()
        .map(|r| {
            if r < curvint_core::quadrature::MIN_RESOLUTION as i64 || r > MAX_RESOLUTION as i64 {
                Err(err(
                    rline,
                    format!(
                        "resolution {r} outside {}..={MAX_RESOLUTION}",
                        curvint_core::quadrature::MIN_RESOLUTION
                    ),
                ))
            } else {
                Ok(r as usize)
            }
        })
        .collect::<Result<_, _>>()?;
    let n = ambient.dim() - 1;
    let resolution = match resolution.len() {
        1 => vec![resolution[0]; n],
        len if len == n => resolution,
        len => {
            return Err(err(
                rline,
                format!("{len} resolutions for a {n}-dimensional chart"),
            ))
        }
    };
    quad.finish()?;

    let mut out = section(&mut all, "output", false)?;
    let output = OutputSpec {
        csv: out.take("csv").map(|(v, _)| PathBuf::from(v)),
        plot: out.take("plot").map(|(v, _)| PathBuf::from(v)),
    };
    out.finish()?;

    Ok(Scenario {
        ambient,
        surface,
        field,
        checks,
        resolution,
        output,
    })
}
