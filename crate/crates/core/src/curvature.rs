//! Higher mean curvatures from a Weingarten matrix.
//!
//! `binom(n,i)·H_i = e_i(λ₁,…,λ_n)` where `e_i` is the degree-`i` elementary
//! symmetric function of the principal curvatures. The `e_i` are obtained
//! from power sums `p_k = tr(W^k)` through Newton's identities, so no
//! eigendecomposition is needed and the matrix may be given in any
//! (non-orthonormal) frame. Everything is generic over [`Field`] and runs
//! unchanged on exact rationals.

use crate::linalg::Matrix;
use crate::scalar::{binomial, Field};

/// `p_k = tr(W^k)` for `k = 1..=kmax`.
pub fn power_sums<F: Field>(w: &Matrix<F>, kmax: usize) -> Vec<F> {
    assert!(w.is_square(), "Weingarten matrix must be square");
    let mut out = Vec::with_capacity(kmax);
    let mut power = w.clone();
    for k in 1..=kmax {
        out.push(power.trace());
        if k < kmax {
            power = power.matmul(w);
        }
    }
    out
}

/// `(e_0, …, e_n)` by the recursion `k·e_k = Σ_{j=1}^{k} (−1)^{j−1} e_{k−j} p_j`.
pub fn elementary_symmetric<F: Field>(w: &Matrix<F>) -> Vec<F> {
    let n = w.rows();
    let p = power_sums(w, n);
    let mut e = Vec::with_capacity(n + 1);
    e.push(F::one());
    for k in 1..=n {
        let mut acc = F::zero();
        for j in 1..=k {
            let term = e[k - j].clone() * p[j - 1].clone();
            acc = if j % 2 == 1 { acc + term } else { acc - term };
        }
        e.push(acc / F::from_int(k as i64));
    }
    e
}

#[derive(Clone, Debug, PartialEq)]
pub struct MeanCurvatures<F> {
    pub n: usize,
    /// `H_0 … H_n`
    pub h: Vec<F>,
    /// `e_0 … e_n`
    pub e: Vec<F>,
}

impl<F: Field> MeanCurvatures<F> {
    /// `H_i`, with the convention `H_{−1} = H_{n+1} = 0`.
    pub fn get(&self, i: i64) -> F {
        if i < 0 || i as usize > self.n {
            F::zero()
        } else {
            self.h[i as usize].clone()
        }
    }

    /// `binom(n,i)·H_i = e_i`, zero outside `0..=n`.
    pub fn weighted(&self, i: i64) -> F {
        if i < 0 || i as usize > self.n {
            F::zero()
        } else {
            self.e[i as usize].clone()
        }
    }
}

pub fn mean_curvatures<F: Field>(w: &Matrix<F>) -> MeanCurvatures<F> {
    let n = w.rows();
    let e = elementary_symmetric(w);
    let h = e
        .iter()
        .enumerate()
        .map(|(i, ei)| ei.clone() / F::from_int(binomial(n as i64, i as i64) as i64))
        .collect();
    MeanCurvatures { n, h, e }
}
