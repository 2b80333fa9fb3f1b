//! Exact model of the forms `α_i` on the `2n`-dimensional model space of the
//! tangent sphere bundle at a point (the contact direction is dropped).
//!
//! Covectors `e¹…eⁿ` are horizontal, `e^{n+1}…e^{2n}` their vertical mirrors.
//! The mirror map `B` sends `e_j ↦ e_{n+j}` and verticals to zero, so on
//! covectors `e^{n+j}∘B = e^j` and `e^j∘B = 0`.
//!
//! The alternating operator is pinned by requiring that both of the usual
//! definitions of `α_i` agree:
//!
//! ```text
//! α_i = n_i · α_n ∘ (B^{n−i} ∧ 1^i)
//!     = n_i · Σ_σ sg(σ) e^{σ₁}∧…∧e^{σ_{n−i}}∧e^{n+σ_{n−i+1}}∧…∧e^{n+σ_n},
//! n_i = 1/(i!(n−i)!)
//! ```
//!
//! which holds for `(φ₁∧…∧φ_k)∘(A₁∧…∧A_k) = Σ_σ (φ₁∘A_{σ₁})∧…∧(φ_k∘A_{σ_k})`
//! (no sign). [`Convention::Signed`] inserts `sg(σ)` and is kept as a
//! negative control.

use std::collections::BTreeMap;
use std::fmt;

use itertools::Itertools;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::curvature::elementary_symmetric;
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::{binomial, factorial};

/// Largest `n` for which permutation sums are enumerated.
pub const MAX_N: usize = 6;

fn int(k: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(k))
}

fn big(k: u128) -> BigRational {
    BigRational::from_integer(BigInt::from(k))
}

/// Sign of the permutation sorting `idx`, or `None` on a repeated index.
fn sort_sign(idx: &mut [usize]) -> Option<i8> {
    let mut sign = 1i8;
    // insertion sort, counting transpositions
    for a in 1..idx.len() {
        let mut b = a;
        while b > 0 && idx[b - 1] > idx[b] {
            idx.swap(b - 1, b);
            sign = -sign;
            b -= 1;
        }
    }
    if idx.windows(2).any(|w| w[0] == w[1]) {
        None
    } else {
        Some(sign)
    }
}

fn permutation_sign(p: &[usize]) -> i8 {
    let mut v = p.to_vec();
    sort_sign(&mut v).expect("permutation")
}

/// A homogeneous exterior form with exact coefficients. Keys are strictly
/// increasing 1-based index tuples.
#[derive(Clone, PartialEq, Eq)]
pub struct ExteriorForm {
    n: usize,
    degree: usize,
    terms: BTreeMap<Vec<usize>, BigRational>,
}

impl fmt::Debug for ExteriorForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for ExteriorForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (idx, c)) in self.terms.iter().enumerate() {
            let sep = if k == 0 { "" } else { " + " };
            let name = idx.iter().map(|i| format!("e{i}")).join("^");
            write!(f, "{sep}({c}){name}")?;
        }
        Ok(())
    }
}

impl ExteriorForm {
    pub fn zero(n: usize, degree: usize) -> Self {
        ExteriorForm {
            n,
            degree,
            terms: BTreeMap::new(),
        }
    }

    /// The basis covector `e^k`, `1 ≤ k ≤ 2n`.
    pub fn basis(n: usize, k: usize) -> Self {
        assert!(
            (1..=2 * n).contains(&k),
            "basis index {k} out of 1..={}",
            2 * n
        );
        let mut f = Self::zero(n, 1);
        f.terms.insert(vec![k], BigRational::one());
        f
    }

    /// `c · e^{i₁}∧…∧e^{i_k}` for indices in any order.
    pub fn monomial(n: usize, indices: &[usize], c: BigRational) -> Self {
        let mut f = Self::zero(n, indices.len());
        f.add_term(indices.to_vec(), c);
        f
    }

    /// A 1-form from its `2n` coefficients.
    pub fn covector(n: usize, coeffs: &[BigRational]) -> Self {
        let mut f = Self::zero(n, 1);
        for (k, c) in coeffs.iter().enumerate() {
            f.add_term(vec![k + 1], c.clone());
        }
        f
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn terms(&self) -> &BTreeMap<Vec<usize>, BigRational> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, indices: &[usize]) -> BigRational {
        let mut idx = indices.to_vec();
        match sort_sign(&mut idx) {
            Some(s) => self
                .terms
                .get(&idx)
                .map_or_else(BigRational::zero, |c| c * int(s as i64)),
            None => BigRational::zero(),
        }
    }

    fn add_term(&mut self, mut idx: Vec<usize>, c: BigRational) {
        if c.is_zero() {
            return;
        }
        let Some(sign) = sort_sign(&mut idx) else {
            return;
        };
        let c = if sign < 0 { -c } else { c };
        let entry = self.terms.entry(idx).or_insert_with(BigRational::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.retain(|_, v| !v.is_zero());
        }
    }

    pub fn scale(&self, s: &BigRational) -> Self {
        let mut out = Self::zero(self.n, self.degree);
        for (k, v) in &self.terms {
            out.add_term(k.clone(), v * s);
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n, "forms over different model spaces");
        let mut out = self.clone();
        if out.is_zero() {
            out.degree = other.degree;
        }
        for (k, v) in &other.terms {
            out.add_term(k.clone(), v.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&int(-1)))
    }

    /// `ω ∘ M` for a single linear map applied to every slot (pullback).
    pub fn pullback(&self, map: &SlotMap) -> Self {
        let mut out = Self::zero(self.n, self.degree);
        for (idx, c) in &self.terms {
            let factors: Vec<ExteriorForm> = idx.iter().map(|&k| map.pull_covector(k)).collect();
            let prod = factors
                .iter()
                .fold(Self::monomial(self.n, &[], c.clone()), |acc, f| {
                    wedge(&acc, f)
                });
            out = out.add(&prod);
        }
        out.degree = self.degree;
        out
    }
}

/// Exterior product with exact signs.
pub fn wedge(a: &ExteriorForm, b: &ExteriorForm) -> ExteriorForm {
    assert_eq!(a.n, b.n, "forms over different model spaces");
    let mut out = ExteriorForm::zero(a.n, a.degree + b.degree);
    for (ia, ca) in &a.terms {
        for (ib, cb) in &b.terms {
            let mut idx = ia.clone();
            idx.extend_from_slice(ib);
            out.add_term(idx, ca * cb);
        }
    }
    out
}

/// A linear map of the model space, as a `2n×2n` matrix acting on vectors.
#[derive(Clone, Debug, PartialEq)]
pub struct SlotMap {
    n: usize,
    matrix: Matrix<BigRational>,
}

impl SlotMap {
    pub fn from_matrix(n: usize, matrix: Matrix<BigRational>) -> Self {
        assert!(
            matrix.rows() == 2 * n && matrix.cols() == 2 * n,
            "slot maps are 2n×2n"
        );
        SlotMap { n, matrix }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_matrix(n, Matrix::identity(2 * n))
    }

    /// The mirror `B`: `e_j ↦ e_{n+j}`, `e_{n+j} ↦ 0`.
    pub fn mirror(n: usize) -> Self {
        Self::from_matrix(
            n,
            Matrix::from_fn(2 * n, 2 * n, |r, c| {
                if c < n && r == n + c {
                    BigRational::one()
                } else {
                    BigRational::zero()
                }
            }),
        )
    }

    /// The normal-lift differential of a hypersurface with Weingarten matrix
    /// `W`: horizontals are kept and `e^{n+j} ↦ Σ_k W_{jk} e^k`.
    pub fn weingarten(w: &Matrix<BigRational>) -> Self {
        let n = w.rows();
        Self::from_matrix(
            n,
            Matrix::from_fn(2 * n, 2 * n, |r, c| {
                if r < n && c == r {
                    BigRational::one()
                } else if r >= n && c < n {
                    w[(r - n, c)].clone()
                } else {
                    BigRational::zero()
                }
            }),
        )
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &Matrix<BigRational> {
        &self.matrix
    }

    /// `self ∘ other`
    pub fn then(&self, other: &SlotMap) -> SlotMap {
        SlotMap::from_matrix(self.n, self.matrix.matmul(&other.matrix))
    }

    pub fn is_zero(&self) -> bool {
        (0..2 * self.n).all(|r| self.matrix.row(r).iter().all(Zero::is_zero))
    }

    /// `e^k ∘ M`: row `k` of the matrix, as a 1-form.
    pub fn pull_covector(&self, k: usize) -> ExteriorForm {
        ExteriorForm::covector(self.n, self.matrix.row(k - 1))
    }

    /// Exact rank by fraction-free elimination.
    pub fn rank(&self) -> usize {
        let size = 2 * self.n;
        let mut m: Vec<Vec<BigRational>> = (0..size).map(|r| self.matrix.row(r).to_vec()).collect();
        let mut rank = 0;
        for col in 0..size {
            let Some(piv) = (rank..size).find(|&r| !m[r][col].is_zero()) else {
                continue;
            };
            m.swap(rank, piv);
            for r in 0..size {
                if r != rank && !m[r][col].is_zero() {
                    let f = &m[r][col] / &m[rank][col];
                    let pivot_row = m[rank].clone();
                    for (x, p) in m[r].iter_mut().zip(&pivot_row) {
                        *x -= &f * p;
                    }
                }
            }
            rank += 1;
        }
        rank
    }
}

/// Sign convention for [`compose_with`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Convention {
    /// `Σ_σ ∧_l φ_l∘A_{σ_l}`
    #[default]
    Alternating,
    /// `Σ_σ sg(σ) ∧_l φ_l∘A_{σ_l}` — wrong on purpose.
    Signed,
}

/// `ω ∘ (A₁ ∧ … ∧ A_k)` with the alternating convention.
pub fn compose(form: &ExteriorForm, maps: &[SlotMap]) -> Result<ExteriorForm> {
    compose_with(form, maps, Convention::Alternating)
}

pub fn compose_with(
    form: &ExteriorForm,
    maps: &[SlotMap],
    convention: Convention,
) -> Result<ExteriorForm> {
    let k = maps.len();
    if form.degree != k {
        return Err(Error::Dimension {
            expected: form.degree,
            got: k,
        });
    }
    let n = form.n;
    let mut out = ExteriorForm::zero(n, k);
    for perm in (0..k).permutations(k) {
        let sign = match convention {
            Convention::Alternating => int(1),
            Convention::Signed => int(permutation_sign(&perm) as i64),
        };
        for (idx, c) in &form.terms {
            let mut acc = ExteriorForm::monomial(n, &[], c * &sign);
            for (l, &slot) in idx.iter().enumerate() {
                acc = wedge(&acc, &maps[perm[l]].pull_covector(slot));
                if acc.is_zero() {
                    break;
                }
            }
            out = out.add(&acc);
        }
    }
    out.degree = k;
    Ok(out)
}

fn check_n(n: usize) -> Result<()> {
    if !(2..=MAX_N).contains(&n) {
        return Err(Error::AlgebraGuard(n));
    }
    Ok(())
}

/// `n_i = 1/(i!(n−i)!)`
pub fn normalization(n: usize, i: usize) -> BigRational {
    BigRational::new(
        BigInt::one(),
        BigInt::from(factorial(i as u32) * factorial((n - i) as u32)),
    )
}

/// `α_i` from the signed permutation sum; zero for `i ∈ {−1, n+1}`.
pub fn alpha_explicit(n: usize, i: i64) -> Result<ExteriorForm> {
    check_n(n)?;
    if i < -1 || i > n as i64 + 1 {
        return Err(Error::OutOfRange {
            what: "α index",
            detail: format!("{i} not in -1..={}", n + 1),
        });
    }
    if i == -1 || i == n as i64 + 1 {
        return Ok(ExteriorForm::zero(n, n));
    }
    let i = i as usize;
    let mut out = ExteriorForm::zero(n, n);
    for perm in (1..=n).permutations(n) {
        let idx: Vec<usize> = perm
            .iter()
            .enumerate()
            .map(|(slot, &s)| if slot < n - i { s } else { n + s })
            .collect();
        let sign = permutation_sign(&perm);
        out.add_term(idx, int(sign as i64));
    }
    Ok(out.scale(&normalization(n, i)))
}

/// `α_n = e^{n+1}∧…∧e^{2n}`, the fibre volume.
pub fn fibre_volume(n: usize) -> ExteriorForm {
    let idx: Vec<usize> = (n + 1..=2 * n).collect();
    ExteriorForm::monomial(n, &idx, BigRational::one())
}

/// `[B; n−i] ++ [1; i]`
pub fn mirror_slots(n: usize, i: usize) -> Vec<SlotMap> {
    let mut maps = vec![SlotMap::mirror(n); n - i];
    maps.extend(std::iter::repeat_n(SlotMap::identity(n), i));
    maps
}

/// `n_i · α_n ∘ (B^{n−i} ∧ 1^i)`
pub fn alpha_composed(n: usize, i: usize, convention: Convention) -> Result<ExteriorForm> {
    check_n(n)?;
    let composed = compose_with(&fibre_volume(n), &mirror_slots(n, i), convention)?;
    Ok(composed.scale(&normalization(n, i)))
}

/// Whether both definitions of `α_i` agree under `convention`.
pub fn dual_definition_check(n: usize, i: usize, convention: Convention) -> Result<bool> {
    Ok(alpha_explicit(n, i as i64)? == alpha_composed(n, i, convention)?)
}

/// `α_{n−1} ∘ (B^{n−i} ∧ 1^i) = i!(n−i+1)! α_{i−1}`
pub fn lemma21_check(n: usize, i: usize) -> Result<bool> {
    check_n(n)?;
    if i > n {
        return Err(Error::OutOfRange {
            what: "lemma index",
            detail: format!("{i} not in 0..={n}"),
        });
    }
    let lhs = compose(&alpha_explicit(n, n as i64 - 1)?, &mirror_slots(n, i))?;
    let coeff = big(factorial(i as u32) * factorial((n - i + 1) as u32));
    let rhs = alpha_explicit(n, i as i64 - 1)?.scale(&coeff);
    Ok(lhs == rhs)
}

/// `α_j ∧ α_{n−j} = (−1)^j binom(n,j) α₀ ∧ α_n`
pub fn wedge_identity_check(n: usize, j: usize) -> Result<bool> {
    check_n(n)?;
    let lhs = wedge(
        &alpha_explicit(n, j as i64)?,
        &alpha_explicit(n, (n - j) as i64)?,
    );
    let sign = if j % 2 == 0 { 1 } else { -1 };
    let coeff = int(sign) * big(binomial(n as i64, j as i64));
    let rhs = wedge(&alpha_explicit(n, 0)?, &alpha_explicit(n, n as i64)?).scale(&coeff);
    Ok(lhs == rhs)
}

/// Coefficient of `e¹∧…∧eⁿ` in `α_i` pulled back by the normal lift of a
/// hypersurface with Weingarten matrix `W`; equals `e_i(W) = binom(n,i)H_i`.
pub fn weingarten_pullback(n: usize, i: i64, w: &Matrix<BigRational>) -> Result<BigRational> {
    if w.rows() != n || w.cols() != n {
        return Err(Error::Dimension {
            expected: n,
            got: w.rows(),
        });
    }
    let alpha = alpha_explicit(n, i)?;
    let pulled = alpha.pullback(&SlotMap::weingarten(w));
    let horizontal: Vec<usize> = (1..=n).collect();
    Ok(pulled.coefficient(&horizontal))
}

/// `weingarten_pullback(n, i, W) = e_i(W)` for every `i`.
pub fn pullback_check(w: &Matrix<BigRational>) -> Result<bool> {
    let n = w.rows();
    let e = elementary_symmetric(w);
    for (i, ei) in e.iter().enumerate() {
        if weingarten_pullback(n, i as i64, w)? != *ei {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `B² = 0`, `rank B = n`, and `e^{n+j}∘B = e^j`, `e^j∘B = 0`.
pub fn mirror_check(n: usize) -> bool {
    let b = SlotMap::mirror(n);
    let squared_zero = b.then(&b).is_zero();
    let mirrors = (1..=n).all(|j| {
        b.pull_covector(n + j) == ExteriorForm::basis(n, j) && b.pull_covector(j).is_zero()
    });
    squared_zero && b.rank() == n && mirrors
}

/// Absolute value helper for reporting exact residuals as floats.
pub fn magnitude(x: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    x.abs().to_f64().unwrap_or(f64::INFINITY)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(n: usize, idx: &[usize]) -> ExteriorForm {
        ExteriorForm::monomial(n, idx, BigRational::one())
    }

    fn q(a: i64, b: i64) -> BigRational {
        BigRational::new(a.into(), b.into())
    }

    #[test]
    fn alpha_examples() {
        assert_eq!(alpha_explicit(2, 2).unwrap(), e(2, &[3, 4]));
        assert_eq!(alpha_explicit(2, 0).unwrap(), e(2, &[1, 2]));
        assert_eq!(
            alpha_explicit(2, 1).unwrap(),
            e(2, &[1, 4]).add(&e(2, &[3, 2]))
        );
        assert_eq!(
            alpha_explicit(2, 1).unwrap(),
            e(2, &[1, 4]).sub(&e(2, &[2, 3]))
        );
        assert!(alpha_explicit(3, -1).unwrap().is_zero());
        assert!(alpha_explicit(3, 4).unwrap().is_zero());
        assert_eq!(alpha_explicit(7, 0), Err(Error::AlgebraGuard(7)));
        assert_eq!(alpha_explicit(1, 0), Err(Error::AlgebraGuard(1)));
    }

    #[test]
    fn alpha_n_minus_one_has_one_horizontal_slot() {
        // e^{1(n+2)…(2n)} + e^{(n+1)2(n+3)…(2n)} + …
        let n = 3;
        let expected = e(n, &[1, 5, 6])
            .add(&e(n, &[4, 2, 6]))
            .add(&e(n, &[4, 5, 3]));
        assert_eq!(alpha_explicit(n, 2).unwrap(), expected);
    }

    #[test]
    fn compose_examples() {
        for n in 2..=4 {
            let all_b = compose(&fibre_volume(n), &vec![SlotMap::mirror(n); n]).unwrap();
            let n_fact = big(factorial(n as u32));
            assert_eq!(all_b, alpha_explicit(n, 0).unwrap().scale(&n_fact));

            let mut maps = vec![SlotMap::identity(n); n];
            maps[0] = SlotMap::mirror(n);
            assert!(compose(&alpha_explicit(n, 0).unwrap(), &maps)
                .unwrap()
                .is_zero());
        }
        assert!(compose(&fibre_volume(2), &[SlotMap::mirror(2)]).is_err());
    }

    #[test]
    fn signed_convention_breaks_calibration() {
        assert!(dual_definition_check(2, 1, Convention::Alternating).unwrap());
        assert!(!dual_definition_check(2, 1, Convention::Signed).unwrap());
    }

    #[test]
    fn wedge_examples() {
        assert_eq!(
            wedge(&ExteriorForm::basis(2, 1), &ExteriorForm::basis(2, 2)),
            e(2, &[1, 2])
        );
        assert_eq!(
            wedge(&ExteriorForm::basis(2, 2), &ExteriorForm::basis(2, 1)),
            e(2, &[1, 2]).scale(&int(-1))
        );
        assert!(wedge(&ExteriorForm::basis(2, 1), &ExteriorForm::basis(2, 1)).is_zero());
        assert!(wedge_identity_check(3, 1).unwrap());
    }

    #[test]
    fn mirror_composition_examples() {
        assert!(lemma21_check(3, 0).unwrap());
        assert!(lemma21_check(2, 1).unwrap());
        for i in 0..=4 {
            assert!(lemma21_check(4, i).unwrap(), "n=4 i={i}");
        }
    }

    #[test]
    fn pullback_examples() {
        for n in 2..=5 {
            let id = Matrix::<BigRational>::identity(n);
            for i in 0..=n {
                assert_eq!(
                    weingarten_pullback(n, i as i64, &id).unwrap(),
                    big(binomial(n as i64, i as i64))
                );
            }
        }
        let (p, r) = (q(3, 7), q(-5, 2));
        let d = Matrix::from_diagonal(&[p.clone(), r.clone()]);
        assert_eq!(weingarten_pullback(2, 1, &d).unwrap(), &p + &r);
        assert_eq!(weingarten_pullback(2, 2, &d).unwrap(), &p * &r);
        let w = Matrix::from_rows(&[vec![int(2), int(1)], vec![int(1), int(3)]]);
        assert_eq!(weingarten_pullback(2, 1, &w).unwrap(), int(5));
        assert_eq!(weingarten_pullback(2, 2, &w).unwrap(), int(5));
    }

    #[test]
    fn mirror_is_nilpotent_of_rank_n() {
        for n in 2..=6 {
            assert!(mirror_check(n));
        }
        assert_eq!(SlotMap::identity(3).rank(), 6);
    }

    #[test]
    fn coefficient_accounts_for_order() {
        let f = e(2, &[1, 4]);
        assert_eq!(f.coefficient(&[4, 1]), int(-1));
        assert_eq!(f.coefficient(&[1, 1]), int(0));
        assert_eq!(f.to_string(), "(1)e1^e4");
    }
}
