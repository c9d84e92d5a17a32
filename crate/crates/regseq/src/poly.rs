//! Exact characteristic polynomials, square-free factorisation and polynomial roots.

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Characteristic polynomial `det(xI − A)` by Faddeev–LeVerrier, coefficients lowest degree first.
///
/// Over the integers every division is exact.
pub fn charpoly<T: Scalar>(a: &DMatrix<T>) -> Result<Vec<T>> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(Error::InvalidArgument("matrix is not square".into()));
    }
    let mut coeffs = vec![T::zero(); n + 1];
    coeffs[n] = T::one();
    let mut m = DMatrix::<T>::zeros(n, n);
    for k in 1..=n {
        m = a * &m;
        for i in 0..n {
            m[(i, i)] += coeffs[n - k + 1].clone();
        }
        let am = a * &m;
        let mut trace = T::zero();
        for i in 0..n {
            trace += am[(i, i)].clone();
        }
        coeffs[n - k] = (-trace)
            .div_int(k as i64)
            .ok_or_else(|| Error::Accuracy("inexact division in Faddeev–LeVerrier".into()))?;
    }
    Ok(coeffs)
}

/// Dense univariate polynomial over ℚ, lowest degree first, no trailing zeros.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatPoly(Vec<BigRational>);

impl RatPoly {
    pub fn new(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        RatPoly(coeffs)
    }

    pub fn from_integers(coeffs: &[BigInt]) -> Self {
        Self::new(coeffs.iter().cloned().map(BigRational::from_integer).collect())
    }

    pub fn one() -> Self {
        RatPoly(vec![BigRational::one()])
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    /// Degree; the zero polynomial reports 0.
    pub fn degree(&self) -> usize {
        self.0.len().saturating_sub(1)
    }

    fn lead(&self) -> &BigRational {
        self.0.last().expect("nonzero polynomial")
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let l = self.lead().clone();
        RatPoly(self.0.iter().map(|c| c / &l).collect())
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.0
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * BigRational::from_integer(BigInt::from(i)))
                .collect(),
        )
    }

    pub fn sub(&self, other: &Self) -> Self {
        let n = self.0.len().max(other.0.len());
        Self::new(
            (0..n)
                .map(|i| {
                    let a = self.0.get(i).cloned().unwrap_or_else(BigRational::zero);
                    let b = other.0.get(i).cloned().unwrap_or_else(BigRational::zero);
                    a - b
                })
                .collect(),
        )
    }

    /// Quotient and remainder.
    pub fn div_rem(&self, divisor: &Self) -> (Self, Self) {
        assert!(!divisor.is_zero(), "division by the zero polynomial");
        if self.0.len() < divisor.0.len() {
            return (RatPoly(Vec::new()), self.clone());
        }
        let mut rem = self.0.clone();
        let dd = divisor.degree();
        let mut quot = vec![BigRational::zero(); self.0.len() - dd];
        let lead = divisor.lead().clone();
        for i in (0..quot.len()).rev() {
            let f = &rem[i + dd] / &lead;
            if !f.is_zero() {
                for (j, c) in divisor.0.iter().enumerate() {
                    rem[i + j] -= &f * c;
                }
            }
            quot[i] = f;
        }
        rem.truncate(dd);
        (Self::new(quot), Self::new(rem))
    }

    /// Monic greatest common divisor.
    pub fn gcd(&self, other: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Exact quotient; panics if the division leaves a remainder.
    pub fn exact_div(&self, divisor: &Self) -> Self {
        let (q, r) = self.div_rem(divisor);
        assert!(r.is_zero(), "inexact polynomial division");
        q
    }

    /// Yun's square-free decomposition: returns `(a_i, i)` with `f = lc · Π a_i^i`, each `a_i`
    /// square-free, pairwise coprime and of positive degree.
    pub fn square_free_decomposition(&self) -> Vec<(RatPoly, usize)> {
        let f = self.monic();
        if f.degree() == 0 {
            return Vec::new();
        }
        let df = f.derivative();
        let g = f.gcd(&df);
        let mut b = f.exact_div(&g);
        let mut c = df.exact_div(&g);
        let mut d = c.sub(&b.derivative());
        let mut out = Vec::new();
        let mut i = 1;
        while b.degree() > 0 {
            let a = b.gcd(&d);
            b = b.exact_div(&a);
            c = d.exact_div(&a);
            d = c.sub(&b.derivative());
            if a.degree() > 0 {
                out.push((a, i));
            }
            i += 1;
        }
        out
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.0.iter().map(|c| c.to_f64().unwrap_or(f64::NAN)).collect()
    }
}

/// Horner evaluation of `p` and `p'`.
pub fn eval_with_derivative(coeffs: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::zero();
    let mut dp = Complex64::zero();
    for c in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

/// All complex roots of a polynomial (lowest degree first), from the companion matrix with
/// Newton polishing. Intended for square-free input.
pub fn roots(coeffs: &[f64]) -> Vec<Complex64> {
    let mut c: Vec<f64> = coeffs.to_vec();
    while c.last() == Some(&0.0) {
        c.pop();
    }
    let n = c.len().saturating_sub(1);
    if n == 0 {
        return Vec::new();
    }
    let lead = c[n];
    let monic: Vec<f64> = c.iter().map(|x| x / lead).collect();
    let mut comp = DMatrix::<f64>::zeros(n, n);
    for i in 1..n {
        comp[(i, i - 1)] = 1.0;
    }
    for i in 0..n {
        comp[(i, n - 1)] = -monic[i];
    }
    let cc: Vec<Complex64> = monic.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    comp.complex_eigenvalues()
        .iter()
        .map(|&z0| {
            let mut z = z0;
            for _ in 0..20 {
                let (p, dp) = eval_with_derivative(&cc, z);
                if dp.norm() == 0.0 {
                    break;
                }
                let step = p / dp;
                let next = z - step;
                if !next.re.is_finite() || !next.im.is_finite() {
                    break;
                }
                // keep the step only while it improves the residual
                if eval_with_derivative(&cc, next).0.norm() > p.norm() {
                    break;
                }
                z = next;
                if step.norm() <= 1e-16 * (1.0 + z.norm()) {
                    break;
                }
            }
            z
        })
        .collect()
}
