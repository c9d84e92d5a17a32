//! Spectrum of `C = Σ A_r` with Jordan structure, and joint-spectral-radius bounds.

use std::collections::HashSet;

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linrep::LinearRepresentation;
use crate::poly::{charpoly, roots, RatPoly};

/// Slack added to the JSR upper bound before it is used as `R`.
pub const DEFAULT_R_EPSILON: f64 = 1e-6;

/// Default cap on the number of matrix products enumerated by [`jsr_bounds`].
pub const DEFAULT_PRODUCT_CAP: u128 = 1 << 22;

/// One eigenvalue cluster.
#[derive(Debug, Clone, PartialEq)]
pub struct Eigenvalue {
    pub lambda: Complex64,
    pub alg_mult: usize,
    /// Size of the largest Jordan block, `m(λ)`.
    pub max_jordan: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralSummary {
    /// Sorted by decreasing modulus, then by argument.
    pub eigenvalues: Vec<Eigenvalue>,
    pub cluster_tol: f64,
    /// Whether multiplicities come from an exact characteristic polynomial.
    pub exact: bool,
    pub warnings: Vec<String>,
}

impl SpectralSummary {
    /// Eigenvalue record closest to `lambda`, if within the cluster tolerance.
    pub fn find(&self, lambda: Complex64) -> Option<&Eigenvalue> {
        self.eigenvalues
            .iter()
            .filter(|e| (e.lambda - lambda).norm() <= self.cluster_tol.max(1e-9))
            .min_by(|a, b| (a.lambda - lambda).norm().total_cmp(&(b.lambda - lambda).norm()))
    }

    /// Largest eigenvalue modulus.
    pub fn spectral_radius(&self) -> f64 {
        self.eigenvalues.iter().map(|e| e.lambda.norm()).fold(0.0, f64::max)
    }
}

pub fn sum_matrix(rep: &LinearRepresentation<Complex64>) -> DMatrix<Complex64> {
    rep.sum_matrix()
}

fn row_sum_norm(m: &DMatrix<Complex64>) -> f64 {
    m.row_iter()
        .map(|r| r.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// `10⁻⁸ (1 + ‖C‖_∞)`.
pub fn default_cluster_tol(c: &DMatrix<Complex64>) -> f64 {
    1e-8 * (1.0 + row_sum_norm(c))
}

fn integral_matrix(c: &DMatrix<Complex64>) -> Option<DMatrix<BigInt>> {
    c.iter()
        .all(|z| z.im == 0.0 && z.re.fract() == 0.0 && z.re.abs() < 9.0e15)
        .then(|| c.map(|z| BigInt::from(z.re as i64)))
}

fn numerical_rank(m: &DMatrix<Complex64>) -> usize {
    let sv = m.clone().singular_values();
    let smax = sv.iter().cloned().fold(0.0, f64::max);
    if smax == 0.0 {
        return 0;
    }
    let tol = 1e-8 * smax;
    sv.iter().filter(|&&s| s > tol).count()
}

/// `m(λ)`: smallest `j` at which `rank((C − λI)^j)` stops decreasing.
pub fn max_jordan_block(c: &DMatrix<Complex64>, lambda: Complex64, alg_mult: usize) -> usize {
    if alg_mult <= 1 {
        return 1;
    }
    let d = c.nrows();
    let b = c - DMatrix::<Complex64>::identity(d, d) * lambda;
    let mut power = b.clone();
    let mut rank = numerical_rank(&power);
    for j in 1..=alg_mult {
        // the nullity of B^j can never exceed the algebraic multiplicity
        if d - rank >= alg_mult {
            return j;
        }
        power = &power * &b;
        let next = numerical_rank(&power);
        if next == rank {
            return j;
        }
        rank = next;
    }
    alg_mult
}

fn sort_key(z: &Complex64) -> (f64, f64) {
    (-z.norm(), -z.arg())
}

/// Eigenvalues of `C` with algebraic multiplicities and maximal Jordan block sizes.
///
/// Integral matrices go through the exact characteristic polynomial and its square-free
/// factorisation, so multiplicities are exact; otherwise the complex Schur form is clustered.
pub fn eigen_data(c: &DMatrix<Complex64>, cluster_tol: Option<f64>) -> Result<SpectralSummary> {
    let d = c.nrows();
    if c.ncols() != d {
        return Err(Error::InvalidArgument("matrix is not square".into()));
    }
    let tol = cluster_tol.unwrap_or_else(|| default_cluster_tol(c));
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("cluster tolerance must be positive, got {tol}")));
    }
    let (mut clusters, exact): (Vec<(Complex64, usize)>, bool) = match integral_matrix(c) {
        Some(ci) => {
            let p = RatPoly::from_integers(&charpoly(&ci)?);
            let mut out = Vec::new();
            for (factor, mult) in p.square_free_decomposition() {
                for z in roots(&factor.to_f64()) {
                    let z = snap(z);
                    out.push((z, mult));
                }
            }
            (out, true)
        }
        None => {
            let schur = c
                .clone()
                .try_schur(f64::EPSILON, 100_000)
                .ok_or_else(|| Error::Accuracy("Schur decomposition did not converge".into()))?;
            let diag: Vec<Complex64> = schur.unpack().1.diagonal().iter().cloned().collect();
            (cluster(&diag, tol), false)
        }
    };
    clusters.sort_by(|a, b| {
        let (ka, kb) = (sort_key(&a.0), sort_key(&b.0));
        ka.0.total_cmp(&kb.0).then(ka.1.total_cmp(&kb.1))
    });
    let mut warnings = Vec::new();
    for i in 0..clusters.len() {
        for j in i + 1..clusters.len() {
            let gap = (clusters[i].0 - clusters[j].0).norm();
            if gap <= 10.0 * tol {
                warnings.push(format!(
                    "eigenvalues {} and {} are only {gap:.3e} apart",
                    clusters[i].0, clusters[j].0
                ));
            }
        }
    }
    let eigenvalues = clusters
        .into_iter()
        .map(|(lambda, alg_mult)| Eigenvalue {
            lambda,
            alg_mult,
            max_jordan: max_jordan_block(c, lambda, alg_mult),
        })
        .collect();
    Ok(SpectralSummary { eigenvalues, cluster_tol: tol, exact, warnings })
}

/// Removes round-off imaginary (or real) parts from roots of real polynomials.
fn snap(z: Complex64) -> Complex64 {
    let scale = 1e-14 * (1.0 + z.norm());
    Complex64::new(
        if z.re.abs() < scale { 0.0 } else { z.re },
        if z.im.abs() < scale { 0.0 } else { z.im },
    )
}

/// Single-linkage clustering; each cluster is represented by its mean.
fn cluster(values: &[Complex64], tol: f64) -> Vec<(Complex64, usize)> {
    let n = values.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn root(p: &mut [usize], mut i: usize) -> usize {
        while p[i] != i {
            p[i] = p[p[i]];
            i = p[i];
        }
        i
    }
    for i in 0..n {
        for j in i + 1..n {
            if (values[i] - values[j]).norm() <= tol {
                let (a, b) = (root(&mut parent, i), root(&mut parent, j));
                parent[a] = b;
            }
        }
    }
    let mut groups: Vec<(usize, Complex64, usize)> = Vec::new();
    for (i, &v) in values.iter().enumerate() {
        let r = root(&mut parent, i);
        match groups.iter_mut().find(|g| g.0 == r) {
            Some(g) => {
                g.1 += v;
                g.2 += 1;
            }
            None => groups.push((r, v, 1)),
        }
    }
    groups
        .into_iter()
        .map(|(_, sum, count)| (snap(sum / count as f64), count))
        .collect()
}

/// Matrix norm used for JSR upper bounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatrixNorm {
    /// Maximum absolute row sum (induced ∞-norm).
    RowSum,
    /// Maximum absolute column sum (induced 1-norm).
    ColumnSum,
    /// Largest singular value.
    Spectral,
}

impl MatrixNorm {
    pub fn apply(self, m: &DMatrix<Complex64>) -> f64 {
        match self {
            MatrixNorm::RowSum => row_sum_norm(m),
            MatrixNorm::ColumnSum => m
                .column_iter()
                .map(|c| c.iter().map(|z| z.norm()).sum::<f64>())
                .fold(0.0, f64::max),
            MatrixNorm::Spectral => m.clone().singular_values().iter().cloned().fold(0.0, f64::max),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            MatrixNorm::RowSum => "row-sum",
            MatrixNorm::ColumnSum => "column-sum",
            MatrixNorm::Spectral => "spectral",
        }
    }
}

impl std::str::FromStr for MatrixNorm {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "row-sum" => Ok(MatrixNorm::RowSum),
            "column-sum" => Ok(MatrixNorm::ColumnSum),
            "spectral" => Ok(MatrixNorm::Spectral),
            other => Err(Error::InvalidArgument(format!("unknown norm '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct JsrBound {
    pub upper: f64,
    pub lower: f64,
    pub length_tested: usize,
    pub norm: MatrixNorm,
}

impl JsrBound {
    /// `R` used downstream: the upper bound plus a small slack for polynomial factors.
    pub fn r_bound(&self) -> f64 {
        self.upper + DEFAULT_R_EPSILON
    }
}

/// Spectral radius of a square matrix.
pub fn spectral_radius(m: &DMatrix<Complex64>) -> f64 {
    match m.clone().try_schur(f64::EPSILON, 100_000) {
        Some(s) => s.unpack().1.diagonal().iter().map(|z| z.norm()).fold(0.0, f64::max),
        None => f64::NAN,
    }
}

fn product_key(m: &DMatrix<Complex64>) -> Vec<u64> {
    // +0.0 and −0.0 must hash alike
    m.iter()
        .flat_map(|z| [(z.re + 0.0).to_bits(), (z.im + 0.0).to_bits()])
        .collect()
}

/// Upper and lower JSR bounds from all products of length `≤ max_len`.
pub fn jsr_bounds(matrices: &[DMatrix<Complex64>], max_len: usize, norm: MatrixNorm) -> Result<JsrBound> {
    jsr_bounds_with_cap(matrices, max_len, norm, DEFAULT_PRODUCT_CAP)
}

pub fn jsr_bounds_with_cap(
    matrices: &[DMatrix<Complex64>],
    max_len: usize,
    norm: MatrixNorm,
    cap: u128,
) -> Result<JsrBound> {
    if matrices.is_empty() {
        return Err(Error::InvalidArgument("no matrices given".into()));
    }
    if max_len == 0 {
        return Err(Error::InvalidArgument("maxLen must be at least 1".into()));
    }
    let count = (matrices.len() as u128).checked_pow(max_len as u32).unwrap_or(u128::MAX);
    if count > cap {
        return Err(Error::ResourceLimit(format!(
            "{} matrices at length {max_len} need {count} products, cap is {cap}",
            matrices.len()
        )));
    }
    // distinct products only: both bounds depend on the set of products, not on multiplicities
    let mut level: Vec<DMatrix<Complex64>> = Vec::new();
    let mut seen = HashSet::new();
    for a in matrices {
        if seen.insert(product_key(a)) {
            level.push(a.clone());
        }
    }
    let mut upper = f64::INFINITY;
    let mut lower: f64 = 0.0;
    for len in 1..=max_len {
        let stats: Vec<(f64, f64)> = level
            .par_iter()
            .map(|p| (norm.apply(p), spectral_radius(p)))
            .collect();
        let inv = 1.0 / len as f64;
        let max_norm = stats.iter().map(|s| s.0).fold(0.0, f64::max);
        let max_rho = stats.iter().map(|s| s.1).fold(0.0, f64::max);
        upper = upper.min(max_norm.powf(inv));
        lower = lower.max(max_rho.powf(inv));
        if len < max_len {
            let mut seen = HashSet::new();
            let mut next = Vec::new();
            for p in &level {
                for a in matrices {
                    let prod = p * a;
                    if seen.insert(product_key(&prod)) {
                        next.push(prod);
                    }
                }
            }
            level = next;
        }
    }
    Ok(JsrBound { upper, lower, length_tested: max_len, norm })
}
