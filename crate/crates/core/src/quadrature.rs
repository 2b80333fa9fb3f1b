//! Tensor-product quadrature on chart domains.
//!
//! Periodic axes use the trapezoid rule (spectrally accurate for smooth
//! periodic integrands); open axes use Gauss–Legendre, whose nodes are strictly
//! interior so poles and other measure-zero chart singularities are never
//! sampled.
//!
//! Node evaluations are farmed out with rayon but always reduced in node-index
//! order with Neumaier-compensated summation, so integrals are bit-identical
//! for every thread count.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::immersion::{frame_at, shape_operator_at, Chart, Hypersurface, ShapeData};
use crate::scalar::Scalar;

pub const MIN_RESOLUTION: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum AxisKind {
    Periodic,
    Open,
}

/// One axis of a chart domain: `[lo, hi)` if periodic, `(lo, hi)` if open.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Axis<S> {
    pub kind: AxisKind,
    pub lo: S,
    pub hi: S,
}

impl<S: Scalar> Axis<S> {
    pub fn periodic(lo: S, hi: S) -> Self {
        Axis {
            kind: AxisKind::Periodic,
            lo,
            hi,
        }
    }

    pub fn open(lo: S, hi: S) -> Self {
        Axis {
            kind: AxisKind::Open,
            lo,
            hi,
        }
    }

    pub fn length(&self) -> S {
        self.hi - self.lo
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AxisRule<S> {
    pub kind: AxisKind,
    pub nodes: Vec<S>,
    pub weights: Vec<S>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GridRule<S> {
    pub axes: Vec<AxisRule<S>>,
}

impl<S: Scalar> GridRule<S> {
    pub fn len(&self) -> usize {
        self.axes.iter().map(|a| a.nodes.len()).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn resolution(&self) -> Vec<usize> {
        self.axes.iter().map(|a| a.nodes.len()).collect()
    }

    /// Parameter point and product weight of node `index` (last axis fastest).
    pub fn node(&self, index: usize) -> (Vec<S>, S) {
        let mut rem = index;
        let mut u = vec![S::zero(); self.axes.len()];
        let mut w = S::one();
        for (k, axis) in self.axes.iter().enumerate().rev() {
            let m = axis.nodes.len();
            let j = rem % m;
            rem /= m;
            u[k] = axis.nodes[j];
            w *= axis.weights[j];
        }
        (u, w)
    }

    pub fn total_weight(&self) -> S {
        self.axes
            .iter()
            .map(|a| a.weights.iter().copied().sum::<S>())
            .fold(S::one(), |acc, s| acc * s)
    }
}

/// Nodes and weights of the `m`-point Gauss–Legendre rule on (−1, 1),
/// ascending. Newton iteration on the three-term recurrence.
pub fn gauss_legendre(m: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; m];
    let mut weights = vec![0.0; m];
    let mf = m as f64;
    for i in 0..m.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (mf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=m {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let pm = if m == 1 { x } else { p1 };
            let pm1 = if m == 1 { 1.0 } else { p0 };
            dp = mf * (x * pm - pm1) / (x * x - 1.0);
            let dx = pm / dp;
            x -= dx;
            if dx.abs() <= 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[m - 1 - i] = x;
        weights[i] = w;
        weights[m - 1 - i] = w;
    }
    if m % 2 == 1 {
        nodes[m / 2] = 0.0;
    }
    (nodes, weights)
}

pub fn build_grid<S: Scalar>(domain: &[Axis<S>], resolution: &[usize]) -> Result<GridRule<S>> {
    if domain.len() != resolution.len() {
        return Err(Error::Dimension {
            expected: domain.len(),
            got: resolution.len(),
        });
    }
    let axes = domain
        .iter()
        .zip(resolution)
        .map(|(axis, &m)| {
            if m < MIN_RESOLUTION {
                return Err(Error::ResolutionTooLow {
                    got: m,
                    min: MIN_RESOLUTION,
                });
            }
            Ok(match axis.kind {
                AxisKind::Periodic => {
                    let h = axis.length() / S::of_usize(m);
                    AxisRule {
                        kind: AxisKind::Periodic,
                        nodes: (0..m).map(|k| axis.lo + h * S::of_usize(k)).collect(),
                        weights: vec![h; m],
                    }
                }
                AxisKind::Open => {
                    let (x, w) = gauss_legendre(m);
                    let half = axis.length() / S::of(2.0);
                    let mid = axis.lo + half;
                    AxisRule {
                        kind: AxisKind::Open,
                        nodes: x.iter().map(|&t| mid + half * S::of(t)).collect(),
                        weights: w.iter().map(|&t| half * S::of(t)).collect(),
                    }
                }
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(GridRule { axes })
}

/// Neumaier's variant of Kahan summation.
#[derive(Clone, Copy, Debug, Default)]
pub struct CompensatedSum<S> {
    sum: S,
    comp: S,
}

impl<S: Scalar> CompensatedSum<S> {
    pub fn new() -> Self {
        CompensatedSum {
            sum: S::zero(),
            comp: S::zero(),
        }
    }

    pub fn add(&mut self, x: S) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> S {
        self.sum + self.comp
    }
}

impl<S: Scalar> FromIterator<S> for CompensatedSum<S> {
    fn from_iter<I: IntoIterator<Item = S>>(iter: I) -> Self {
        let mut acc = CompensatedSum::new();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

/// Σ_a w_a·f(a) for a node program `f` returning `K` values per node.
///
/// Nodes are evaluated in parallel; each of the `K` sums is reduced in node
/// order with compensation. The first error (in node order) is returned.
pub fn weighted_sums<S, const K: usize, F>(grid: &GridRule<S>, f: F) -> Result<[S; K]>
where
    S: Scalar,
    F: Fn(&[S]) -> Result<[S; K]> + Sync,
{
    let values: Vec<Result<([S; K], S)>> = (0..grid.len())
        .into_par_iter()
        .map(|idx| {
            let (u, w) = grid.node(idx);
            f(&u).map(|v| (v, w))
        })
        .collect();
    let mut sums = [CompensatedSum::new(); K];
    for value in values {
        let (v, w) = value?;
        for (acc, x) in sums.iter_mut().zip(v) {
            acc.add(w * x);
        }
    }
    Ok(sums.map(|s| s.value()))
}

/// `Σ_a w_a·f(u_a)·density(u_a)` over a surface.
pub fn integrate<S, C, F>(surface: &Hypersurface<S, C>, grid: &GridRule<S>, f: F) -> Result<S>
where
    S: Scalar,
    C: Chart<S>,
    F: Fn(&[S]) -> Result<S> + Sync,
{
    let [v] = weighted_sums(grid, |u| {
        let first = frame_at(surface, u)?;
        Ok([f(u)? * first.density])
    })?;
    Ok(v)
}

/// Surface integrals of `K` functions of the shape data at once, with the
/// area density applied.
pub fn integrate_shape<S, C, const K: usize, F>(
    surface: &Hypersurface<S, C>,
    grid: &GridRule<S>,
    f: F,
) -> Result<[S; K]>
where
    S: Scalar,
    C: Chart<S>,
    F: Fn(&ShapeData<S>) -> Result<[S; K]> + Sync,
{
    weighted_sums(grid, |u| {
        let shape = shape_operator_at(surface, u)?;
        let density = shape.first.density;
        Ok(f(&shape)?.map(|x| x * density))
    })
}

/// Grid on the surface's own chart domain.
pub fn surface_grid<S: Scalar, C: Chart<S>>(
    surface: &Hypersurface<S, C>,
    resolution: &[usize],
) -> Result<GridRule<S>> {
    build_grid(&surface.domain(), resolution)
}
