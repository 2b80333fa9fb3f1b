//! CSV, plot data and the human-readable summary.
//!
//! Numbers are written with Rust's shortest round-trip `{:e}` formatting,
//! so identical results give identical bytes.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::CliError;
use crate::runner::Row;

pub const CSV_HEADER: [&str; 8] = [
    "identity",
    "i",
    "residual",
    "normalizer",
    "relative",
    "tolerance",
    "resolution",
    "verdict",
];

/// Residuals at or below this multiple of their normalizer are treated as
/// roundoff when estimating convergence orders.
pub const FLOOR: f64 = 1e-12;

pub fn resolution_label(res: &[usize]) -> String {
    res.iter()
        .map(usize::to_string)
        .collect::<Vec<_>>()
        .join("x")
}

fn verdict(pass: bool) -> &'static str {
    if pass {
        "pass"
    } else {
        "fail"
    }
}

pub fn csv_string(rows: &[Row]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_HEADER).expect("in-memory write");
    for r in rows {
        w.write_record([
            r.identity.clone(),
            r.i.to_string(),
            format!("{:e}", r.residual),
            format!("{:e}", r.normalizer),
            format!("{:e}", r.relative()),
            format!("{:e}", r.tolerance),
            resolution_label(&r.resolution),
            verdict(r.passes()).to_string(),
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ASCII output")
}

/// Two whitespace-separated columns per check: index and relative residual.
pub fn plot_string(rows: &[Row]) -> String {
    let mut out = String::new();
    let mut current: Option<&str> = None;
    for r in rows {
        if current != Some(r.identity.as_str()) {
            if current.is_some() {
                out.push('\n');
            }
            writeln!(
                out,
                "# {} ({})",
                r.identity,
                resolution_label(&r.resolution)
            )
            .unwrap();
            writeln!(out, "# i relative").unwrap();
            current = Some(&r.identity);
        }
        writeln!(out, "{} {:e}", r.i, r.relative()).unwrap();
    }
    out
}

pub fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|source| CliError::Io {
            path: dir.display().to_string(),
            source,
        })?;
    }
    std::fs::write(path, contents).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

pub fn summary(rows: &[Row]) -> String {
    let mut out = String::new();
    for r in rows {
        write!(
            out,
            "{:<22} i={:<2} {:>8}  residual {:>12.3e}  relative {:>10.3e}  tol {:.0e}  {}",
            r.identity,
            r.i,
            resolution_label(&r.resolution),
            r.residual,
            r.relative(),
            r.tolerance,
            verdict(r.passes()).to_uppercase(),
        )
        .unwrap();
        if let Some(note) = &r.note {
            write!(out, "  ({note})").unwrap();
        }
        out.push('\n');
    }
    out
}

/// One convergence series: the same check at successive resolutions.
#[derive(Clone, Debug, PartialEq)]
pub struct Series {
    pub identity: String,
    pub i: i64,
    pub levels: Vec<Row>,
}

impl Series {
    pub fn collect(levels: &[Vec<Row>]) -> Vec<Series> {
        let Some(first) = levels.first() else {
            return Vec::new();
        };
        (0..first.len())
            .map(|k| Series {
                identity: first[k].identity.clone(),
                i: first[k].i,
                levels: levels.iter().map(|rows| rows[k].clone()).collect(),
            })
            .collect()
    }

    fn at_floor(r: &Row) -> bool {
        r.residual.abs() <= FLOOR * r.normalizer.max(f64::MIN_POSITIVE)
    }

    /// `log2` of successive residual ratios; `None` once either side is at
    /// the roundoff floor.
    pub fn orders(&self) -> Vec<Option<f64>> {
        self.levels
            .windows(2)
            .map(|w| {
                if Self::at_floor(&w[0]) || Self::at_floor(&w[1]) {
                    None
                } else {
                    Some((w[0].relative() / w[1].relative()).log2())
                }
            })
            .collect()
    }

    /// Non-increasing until the floor is reached, and the finest level
    /// within tolerance.
    pub fn converges(&self) -> bool {
        let monotone = self.levels.windows(2).all(|w| {
            Self::at_floor(&w[0]) || Self::at_floor(&w[1]) || w[1].relative() <= w[0].relative()
        });
        monotone && self.levels.last().is_some_and(Row::passes)
    }

    pub fn floor_limited(&self) -> bool {
        self.levels.iter().all(Self::at_floor)
    }
}

pub fn convergence_summary(series: &[Series]) -> String {
    let mut out = String::new();
    for s in series {
        writeln!(out, "{} i={}", s.identity, s.i).unwrap();
        let orders = s.orders();
        for (k, r) in s.levels.iter().enumerate() {
            let order = match k.checked_sub(1).map(|j| orders[j]) {
                None => String::new(),
                Some(None) => "order  (floor)".into(),
                Some(Some(p)) => format!("order {p:>6.2}"),
            };
            writeln!(
                out,
                "  {:>10}  relative {:>10.3e}  {order}",
                resolution_label(&r.resolution),
                r.relative()
            )
            .unwrap();
        }
        let status = if s.floor_limited() {
            "at roundoff floor at every level"
        } else if s.converges() {
            "converges"
        } else {
            "DOES NOT CONVERGE"
        };
        writeln!(out, "  {status}").unwrap();
    }
    out
}

/// Two columns per series: first-axis resolution and relative residual.
pub fn convergence_plot(series: &[Series]) -> String {
    let mut out = String::new();
    for (k, s) in series.iter().enumerate() {
        if k > 0 {
            out.push('\n');
        }
        writeln!(out, "# {} i={}", s.identity, s.i).unwrap();
        writeln!(out, "# resolution relative").unwrap();
        for r in &s.levels {
            writeln!(out, "{} {:e}", r.resolution[0], r.relative()).unwrap();
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(identity: &str, i: i64, residual: f64, res: usize) -> Row {
        Row {
            identity: identity.into(),
            i,
            residual,
            normalizer: 2.0,
            tolerance: 1e-8,
            resolution: vec![res, res],
            note: None,
        }
    }

    #[test]
    fn csv_has_fixed_columns() {
        let s = csv_string(&[row("minkowski", 0, -1e-9, 16), row("minkowski", 1, 1.0, 16)]);
        let lines: Vec<&str> = s.lines().collect();
        assert_eq!(
            lines[0],
            "identity,i,residual,normalizer,relative,tolerance,resolution,verdict"
        );
        assert_eq!(lines[1], "minkowski,0,-1e-9,2e0,5e-10,1e-8,16x16,pass");
        assert_eq!(lines[2], "minkowski,1,1e0,2e0,5e-1,1e-8,16x16,fail");
    }

    #[test]
    fn orders_stop_at_floor() {
        let levels = vec![
            vec![row("m", 0, 1e-4, 16)],
            vec![row("m", 0, 1e-6, 32)],
            vec![row("m", 0, 1e-15, 64)],
            vec![row("m", 0, 2e-15, 128)],
        ];
        let s = &Series::collect(&levels)[0];
        let o = s.orders();
        assert!((o[0].unwrap() - 100f64.log2()).abs() < 1e-12);
        assert_eq!(o[1], None);
        assert_eq!(o[2], None);
        assert!(s.converges());
        assert!(!s.floor_limited());
    }

    #[test]
    fn growth_is_not_convergence() {
        let levels = vec![vec![row("m", 0, 1e-6, 16)], vec![row("m", 0, 1e-5, 32)]];
        assert!(!Series::collect(&levels)[0].converges());
    }

    #[test]
    fn plot_blocks_per_check() {
        let p = plot_string(&[
            row("a", 0, 1.0, 8),
            row("a", 1, 1.0, 8),
            row("b", 1, 0.0, 8),
        ]);
        assert_eq!(
            p,
            "# a (8x8)\n# i relative\n0 5e-1\n1 5e-1\n\n# b (8x8)\n# i relative\n1 0e0\n"
        );
    }
}
