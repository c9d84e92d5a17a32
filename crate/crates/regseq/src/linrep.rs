//! q-linear representations `v(qn + r) = A_r v(n)` and their summatory functions.

use nalgebra::{DMatrix, DVector, RowDVector};
use num_bigint::BigInt;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Default cap on the number of terms `summatory_brute` will add up.
pub const BRUTE_FORCE_LIMIT: u128 = 50_000_000;

/// Canonical base-`base` expansion, least-significant digit first, no leading zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DigitExpansion {
    base: u64,
    digits: Vec<u64>,
}

impl DigitExpansion {
    pub fn base(&self) -> u64 {
        self.base
    }

    pub fn digits(&self) -> &[u64] {
        &self.digits
    }

    pub fn len(&self) -> usize {
        self.digits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.digits.is_empty()
    }

    /// Reassembles the integer.
    pub fn value(&self) -> u128 {
        self.digits
            .iter()
            .rev()
            .fold(0u128, |acc, &d| acc * self.base as u128 + d as u128)
    }
}

/// Base-`base` digits of `n`, least-significant first.
pub fn digits(n: u128, base: u64) -> Result<DigitExpansion> {
    if base < 2 {
        return Err(Error::InvalidArgument(format!("base must be at least 2, got {base}")));
    }
    let mut out = Vec::new();
    let mut m = n;
    let b = base as u128;
    while m > 0 {
        out.push((m % b) as u64);
        m /= b;
    }
    Ok(DigitExpansion { base, digits: out })
}

/// A q-linear representation `(A_0, …, A_{q-1}, e, v(0))`.
///
/// `x(n) = e A_{r_0} ⋯ A_{r_{ℓ-1}} v(0)` where `r_{ℓ-1} … r_0` is the canonical
/// expansion of `n`; in particular `x(0) = e v(0)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearRepresentation<T: Scalar> {
    q: usize,
    matrices: Vec<DMatrix<T>>,
    left: RowDVector<T>,
    v0: DVector<T>,
}

impl<T: Scalar> LinearRepresentation<T> {
    pub fn new(
        q: usize,
        matrices: Vec<DMatrix<T>>,
        left: RowDVector<T>,
        v0: DVector<T>,
    ) -> Result<Self> {
        if q < 2 {
            return Err(Error::InvalidArgument(format!("base q must be at least 2, got {q}")));
        }
        if matrices.len() != q {
            return Err(Error::Malformed(format!(
                "expected {q} matrices, got {}",
                matrices.len()
            )));
        }
        let d = v0.len();
        if d == 0 {
            return Err(Error::Malformed("dimension must be at least 1".into()));
        }
        if left.len() != d {
            return Err(Error::Malformed(format!(
                "left vector has length {}, expected {d}",
                left.len()
            )));
        }
        for (r, a) in matrices.iter().enumerate() {
            if a.nrows() != d || a.ncols() != d {
                return Err(Error::Malformed(format!(
                    "A_{r} is {}x{}, expected {d}x{d}",
                    a.nrows(),
                    a.ncols()
                )));
            }
        }
        Ok(Self { q, matrices, left, v0 })
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn dim(&self) -> usize {
        self.v0.len()
    }

    pub fn matrices(&self) -> &[DMatrix<T>] {
        &self.matrices
    }

    pub fn matrix(&self, r: usize) -> &DMatrix<T> {
        &self.matrices[r]
    }

    pub fn left(&self) -> &RowDVector<T> {
        &self.left
    }

    pub fn v0(&self) -> &DVector<T> {
        &self.v0
    }

    /// Entrywise conversion to another scalar type.
    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> LinearRepresentation<U> {
        LinearRepresentation {
            q: self.q,
            matrices: self.matrices.iter().map(|a| a.map(|x| f(&x))).collect(),
            left: self.left.map(|x| f(&x)),
            v0: self.v0.map(|x| f(&x)),
        }
    }

    pub fn to_complex(&self) -> LinearRepresentation<Complex64> {
        self.map(Scalar::to_c64)
    }

    /// `C = Σ_r A_r`.
    pub fn sum_matrix(&self) -> DMatrix<T> {
        let d = self.dim();
        self.matrices
            .iter()
            .fold(DMatrix::zeros(d, d), |acc, a| acc + a)
    }

    fn digit_list(&self, n: u128) -> Vec<u64> {
        digits(n, self.q as u64).expect("q >= 2").digits
    }

    /// `v(n)`.
    pub fn vector_sequence(&self, n: u128) -> DVector<T> {
        let mut v = self.v0.clone();
        for &r in self.digit_list(n).iter().rev() {
            v = &self.matrices[r as usize] * v;
        }
        v
    }

    /// `x(n) = e v(n)`.
    pub fn evaluate(&self, n: u128) -> T {
        (&self.left * self.vector_sequence(n))[(0, 0)].clone()
    }

    /// `X(N) = Σ_{0 ≤ n < N} x(n)` by direct summation, capped at [`BRUTE_FORCE_LIMIT`].
    pub fn summatory_brute(&self, n_upper: u128) -> Result<T> {
        self.summatory_brute_with_limit(n_upper, BRUTE_FORCE_LIMIT)
    }

    pub fn summatory_brute_with_limit(&self, n_upper: u128, limit: u128) -> Result<T> {
        if n_upper > limit {
            return Err(Error::ResourceLimit(format!(
                "brute-force summation up to {n_upper} exceeds the limit {limit}"
            )));
        }
        if n_upper == 0 {
            return Ok(T::zero());
        }
        // v(n) for all n < N, built level by level from v(⌊n/q⌋).
        let q = self.q as u128;
        let mut vs: Vec<DVector<T>> = Vec::with_capacity(n_upper as usize);
        let mut total = T::zero();
        for n in 0..n_upper {
            let v = if n == 0 {
                self.v0.clone()
            } else if n < q {
                &self.matrices[n as usize] * &self.v0
            } else {
                &self.matrices[(n % q) as usize] * &vs[(n / q) as usize]
            };
            total += self.left.dot(&v.transpose());
            if n * q < n_upper {
                vs.push(v);
            }
        }
        Ok(total)
    }

    /// `X(N)` via a digit recursion over the expansion of `N`, in `O(d² q log N)` operations.
    pub fn summatory_fast(&self, n_upper: u128) -> T {
        if n_upper == 0 {
            return T::zero();
        }
        let ds = self.digit_list(n_upper);
        let len = ds.len();
        let c = self.sum_matrix();
        // rows[i] = e C^i
        let mut rows = Vec::with_capacity(len);
        let mut row = self.left.clone();
        for _ in 0..len {
            let next = &row * &c;
            rows.push(row);
            row = next;
        }
        let mut total = self.left.dot(&self.v0.transpose());
        // all words of length 1..len-1 with nonzero top digit
        let top = &c * &self.v0 - &self.matrices[0] * &self.v0;
        for row in rows.iter().take(len - 1) {
            total += row.dot(&top.transpose());
        }
        // words of length len that first drop below N at position i
        let mut suffix = self.v0.clone();
        for i in (0..len).rev() {
            let lo = if i == len - 1 { 1 } else { 0 };
            let mut acc = DVector::zeros(self.dim());
            for r in lo..ds[i] as usize {
                acc += &self.matrices[r] * &suffix;
            }
            total += rows[i].dot(&acc.transpose());
            suffix = &self.matrices[ds[i] as usize] * suffix;
        }
        total
    }

    /// Same sequence in base `q^p`.
    ///
    /// `B_r = A_{r_0} ⋯ A_{r_{p-1}}` over the zero-padded base-q digits of `r`. Padding only
    /// reproduces `x(n)` when `A_0 v(0) = v(0)`; otherwise the representation is first lifted to
    /// dimension `2d` so that leading zeros act trivially.
    pub fn power(&self, p: u32) -> Result<Self> {
        if p == 0 {
            return Err(Error::InvalidArgument("power p must be at least 1".into()));
        }
        if p == 1 {
            return Ok(self.clone());
        }
        let base = if &self.matrices[0] * &self.v0 == self.v0 {
            self.clone()
        } else {
            self.zero_padding_lift()
        };
        let qp = self
            .q
            .checked_pow(p)
            .filter(|&v| v <= 1 << 20)
            .ok_or_else(|| Error::ResourceLimit(format!("q^p = {}^{p} is too large", self.q)))?;
        let d = base.dim();
        let matrices = (0..qp)
            .map(|r| {
                let mut m = r;
                let mut b = DMatrix::<T>::identity(d, d);
                for _ in 0..p {
                    b *= &base.matrices[m % self.q];
                    m /= self.q;
                }
                b
            })
            .collect();
        Self::new(qp, matrices, base.left, base.v0)
    }

    /// Representation of dimension `2d` with `A'_0 w(0) = w(0)` producing the same `x(n)`.
    pub fn zero_padding_lift(&self) -> Self {
        let d = self.dim();
        let lift = |r: usize| {
            let mut m = DMatrix::<T>::zeros(2 * d, 2 * d);
            let a = &self.matrices[r];
            m.view_mut((0, 0), (d, d)).copy_from(a);
            if r == 0 {
                m.view_mut((d, d), (d, d)).fill_with_identity();
            } else {
                m.view_mut((0, d), (d, d)).copy_from(a);
            }
            m
        };
        let mut left = RowDVector::<T>::zeros(2 * d);
        left.columns_mut(0, d).copy_from(&self.left);
        left.columns_mut(d, d).copy_from(&self.left);
        let mut v0 = DVector::<T>::zeros(2 * d);
        v0.rows_mut(d, d).copy_from(&self.v0);
        Self {
            q: self.q,
            matrices: (0..self.q).map(lift).collect(),
            left,
            v0,
        }
    }
}

impl LinearRepresentation<Complex64> {
    /// Exact integer copy when every entry is an integer.
    pub fn to_integral(&self) -> Option<LinearRepresentation<BigInt>> {
        let all = self
            .matrices
            .iter()
            .flat_map(|m| m.iter())
            .chain(self.left.iter())
            .chain(self.v0.iter());
        let ok = all
            .into_iter()
            .all(|z| z.im == 0.0 && z.re.fract() == 0.0 && z.re.abs() < 9.0e15);
        ok.then(|| self.map(|z| BigInt::from(z.re as i64)))
    }

    /// `X(N)`, computed exactly when the representation is integral.
    pub fn summatory(&self, n_upper: u128) -> Complex64 {
        match self.to_integral() {
            Some(exact) => exact.summatory_fast(n_upper).to_c64(),
            None => self.summatory_fast(n_upper),
        }
    }

    /// `X(N)` as an exact integer, if the representation is integral.
    pub fn summatory_integer(&self, n_upper: u128) -> Option<BigInt> {
        self.to_integral().map(|exact| exact.summatory_fast(n_upper))
    }
}

/// `d = 1`, every `A_r = [1]`: `x(n) = 1`.
pub fn constant_representation(q: usize) -> Result<LinearRepresentation<i64>> {
    LinearRepresentation::new(
        q,
        vec![DMatrix::from_element(1, 1, 1); q],
        RowDVector::from_element(1, 1),
        DVector::from_element(1, 1),
    )
}

/// Binary sum of digits: `A_0 = I`, `A_1 = [[1,1],[0,1]]`, `e = (1,0)`, `v(0) = (0,1)ᵀ`.
pub fn binary_sum_of_digits() -> LinearRepresentation<i64> {
    LinearRepresentation::new(
        2,
        vec![
            DMatrix::identity(2, 2),
            DMatrix::from_row_slice(2, 2, &[1, 1, 0, 1]),
        ],
        RowDVector::from_row_slice(&[1, 0]),
        DVector::from_column_slice(&[0, 1]),
    )
    .expect("well-formed")
}

/// Base-q sum of digits: `v(n) = (s_q(n), 1)ᵀ`.
pub fn sum_of_digits(q: usize) -> Result<LinearRepresentation<i64>> {
    if q < 2 {
        return Err(Error::InvalidArgument(format!("base q must be at least 2, got {q}")));
    }
    let matrices = (0..q as i64)
        .map(|r| DMatrix::from_row_slice(2, 2, &[1, r, 0, 1]))
        .collect();
    LinearRepresentation::new(
        q,
        matrices,
        RowDVector::from_row_slice(&[1, 0]),
        DVector::from_column_slice(&[0, 1]),
    )
}
