//! The exact frame-algebra suite.

use std::time::Instant;

use curvint_core::curvature::elementary_symmetric;
use curvint_core::framealgebra::{
    dual_definition_check, lemma21_check, magnitude, mirror_check, wedge_identity_check,
    weingarten_pullback, Convention, MAX_N,
};
use curvint_core::linalg::Matrix;
use curvint_core::BigRational;
use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::CliError;
use crate::runner::{Report, Row};

pub const PULLBACK_MATRICES: usize = 50;
pub const PULLBACK_SEED: u64 = 2024;
pub const PULLBACK_MAX_N: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Family {
    DualDefinition,
    MirrorComposition,
    WedgeIdentity,
    Mirror,
}

impl Family {
    fn name(self) -> &'static str {
        match self {
            Family::DualDefinition => "dual_definition",
            Family::MirrorComposition => "mirror_composition",
            Family::WedgeIdentity => "wedge_identity",
            Family::Mirror => "mirror",
        }
    }
}

fn exact_row(identity: String, i: i64, n: usize, holds: bool) -> Row {
    Row {
        identity,
        i,
        residual: if holds { 0.0 } else { 1.0 },
        normalizer: 1.0,
        tolerance: 0.0,
        resolution: vec![n],
        note: None,
    }
}

fn random_rational(rng: &mut ChaCha8Rng) -> BigRational {
    BigRational::new(
        BigInt::from(rng.random_range(-9i64..=9)),
        BigInt::from(rng.random_range(1i64..=7)),
    )
}

/// Seeded random rational Weingarten maps, sizes cycling through `2..=nmax`.
pub fn pullback_matrices(nmax: usize) -> Vec<Matrix<BigRational>> {
    let top = nmax.min(PULLBACK_MAX_N);
    let mut rng = ChaCha8Rng::seed_from_u64(PULLBACK_SEED);
    (0..PULLBACK_MATRICES)
        .map(|k| {
            let n = 2 + k % (top - 1);
            Matrix::from_fn(n, n, |_, _| random_rational(&mut rng))
        })
        .collect()
}

/// Runs every family for `2 ≤ n ≤ nmax`. `convention` replaces the
/// alternating composition in the dual-definition family; anything but
/// [`Convention::Alternating`] is a negative control.
pub fn suite(nmax: usize, convention: Convention) -> Result<Report, CliError> {
    if !(2..=MAX_N).contains(&nmax) {
        return Err(CliError::input(format!("--nmax {nmax} not in 2..={MAX_N}")));
    }
    let start = Instant::now();
    let mut jobs = Vec::new();
    for family in [
        Family::DualDefinition,
        Family::MirrorComposition,
        Family::WedgeIdentity,
    ] {
        for n in 2..=nmax {
            for i in 0..=n {
                jobs.push((family, n, i));
            }
        }
    }
    for n in 2..=nmax {
        jobs.push((Family::Mirror, n, 0));
    }
    let mut rows = jobs
        .par_iter()
        .map(|&(family, n, i)| {
            let holds = match family {
                Family::DualDefinition => dual_definition_check(n, i, convention)?,
                Family::MirrorComposition => lemma21_check(n, i)?,
                Family::WedgeIdentity => wedge_identity_check(n, i)?,
                Family::Mirror => mirror_check(n),
            };
            Ok(exact_row(
                format!("{}[n={n}]", family.name()),
                i as i64,
                n,
                holds,
            ))
        })
        .collect::<Result<Vec<_>, curvint_core::Error>>()?;

    let pullbacks = pullback_matrices(nmax)
        .par_iter()
        .enumerate()
        .map(|(k, w)| {
            let n = w.rows();
            let e = elementary_symmetric(w);
            (0..=n)
                .map(|i| {
                    let diff = weingarten_pullback(n, i as i64, w)? - e[i].clone();
                    let mut row = exact_row(format!("pullback[m={}]", k + 1), i as i64, n, true);
                    row.residual = magnitude(&diff);
                    Ok(row)
                })
                .collect::<Result<Vec<_>, curvint_core::Error>>()
        })
        .collect::<Result<Vec<_>, _>>()?;
    rows.extend(pullbacks.into_iter().flatten());
    Ok(Report {
        rows,
        elapsed: start.elapsed(),
    })
}

/// Human-readable description of the first broken invariant.
pub fn failure_message(report: &Report) -> Option<String> {
    let row = report.rows.iter().find(|r| !r.passes())?;
    let family = row.identity.split('[').next().unwrap_or("");
    let invariant = match family {
        "dual_definition" => {
            "dual-definition invariant: explicit α_i differs from the normalized \
             composition of the fibre volume with mirror slots"
        }
        "mirror_composition" => "mirror composition α_{n−1}∘(B^{n−i}, id^i) = i!(n−i+1)!·α_{i−1}",
        "wedge_identity" => "wedge identity α_j∧α_{n−j} = (−1)^j·binom(n,j)·α₀∧α_n",
        "pullback" => {
            "Weingarten pullback of α_i differs from the elementary symmetric function e_i(W)"
        }
        _ => "mirror map identities",
    };
    Some(format!(
        "calibration failure in {} (i = {}): {invariant}",
        row.identity, row.i
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matrices_respect_the_size_cap() {
        let ms = pullback_matrices(6);
        assert_eq!(ms.len(), PULLBACK_MATRICES);
        assert!(ms.iter().all(|m| (2..=4).contains(&m.rows())));
        assert!(pullback_matrices(2).iter().all(|m| m.rows() == 2));
    }

    #[test]
    fn small_suite_passes_and_perturbed_one_does_not() {
        let ok = suite(2, Convention::Alternating).unwrap();
        assert!(ok.passed());
        let bad = suite(3, Convention::Signed).unwrap();
        assert!(!bad.passed());
        assert!(failure_message(&bad)
            .unwrap()
            .contains("dual-definition invariant"));
        assert!(suite(7, Convention::Alternating).is_err());
        assert!(suite(1, Convention::Alternating).is_err());
    }
}
