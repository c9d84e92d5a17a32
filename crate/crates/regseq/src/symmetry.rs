//! Fluctuations of eigenvalues `ζλ`, `ζ^p = 1`, collected into one `p`-periodic fluctuation.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fourier::{residue, FluctuationSeries, PoleIntegrand, ResidueConfig};

/// `j0 = ⌊−p(π + arg λ)/(2π)⌋ + 1`, so that `−π < arg λ + 2jπ/p ≤ π` for `j0 ≤ j < j0 + p`.
pub fn j0(lambda: Complex64, p: usize) -> Result<i64> {
    if lambda.norm() == 0.0 {
        return Err(Error::InvalidArgument("λ must be nonzero".into()));
    }
    if p == 0 {
        return Err(Error::InvalidArgument("p must be at least 1".into()));
    }
    let arg = lambda.arg();
    let pf = p as f64;
    let mut j = (-pf * (PI + arg) / (2.0 * PI)).floor() as i64 + 1;
    // guard the floor against round-off at the window edges
    let shifted = |j: i64| arg + 2.0 * PI * j as f64 / pf;
    while shifted(j) <= -PI {
        j += 1;
    }
    while shifted(j - 1) > -PI {
        j -= 1;
    }
    Ok(j)
}

/// `log_q(ζ_j λ) = (log|λ| + i(arg λ + 2jπ/p)) / log q`, the principal value inside the window.
fn member_log(lambda: Complex64, j: i64, p: usize, log_q: f64) -> Complex64 {
    Complex64::new(lambda.norm().ln(), lambda.arg() + 2.0 * PI * j as f64 / p as f64) / log_q
}

/// Fluctuations `Φ_{(ζλ)k}` for all `p`-th roots of unity `ζ`, each of period 1.
#[derive(Debug, Clone, PartialEq)]
pub struct RootsOfUnityBundle {
    pub lambda: Complex64,
    pub p: usize,
    pub k: usize,
    pub j0: i64,
    /// `members[i]` belongs to `ζ_{j0+i} λ`.
    pub members: Vec<FluctuationSeries>,
}

impl RootsOfUnityBundle {
    /// Member coefficients `|ℓ'| ≤ degree` as residues at `log_q(ζλ) + 2ℓ'πi/log q`.
    pub fn from_integrand(
        f: &dyn PoleIntegrand,
        lambda: Complex64,
        p: usize,
        k: usize,
        degree: usize,
        cfg: &ResidueConfig,
    ) -> Result<Self> {
        let j0 = j0(lambda, p)?;
        let log_q = f.log_q();
        let l = degree as i64;
        let members = (0..p as i64)
            .map(|i| {
                let j = j0 + i;
                let base = member_log(lambda, j, p, log_q);
                let coeffs = (-l..=l)
                    .collect::<Vec<_>>()
                    .par_iter()
                    .map(|&ell| residue(f, base + Complex64::new(0.0, 2.0 * PI * ell as f64 / log_q), k, cfg))
                    .collect::<Result<Vec<_>>>()?;
                let member_lambda = Complex64::from_polar(lambda.norm(), lambda.arg() + 2.0 * PI * j as f64 / p as f64);
                FluctuationSeries::new(member_lambda, k, 1, coeffs)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { lambda, p, k, j0, members })
    }

    /// Combined indices `ℓ = ℓ'p + j` covered by the members.
    fn index_set(&self) -> Vec<(i64, usize, i64)> {
        let l = self.members.first().map_or(0, |m| m.degree() as i64);
        let mut out = Vec::new();
        for (i, _) in self.members.iter().enumerate() {
            let j = self.j0 + i as i64;
            for lp in -l..=l {
                out.push((lp * self.p as i64 + j, i, lp));
            }
        }
        out.sort();
        out
    }

    fn combined_degree(&self) -> usize {
        self.index_set().iter().map(|t| t.0.unsigned_abs() as usize).max().unwrap_or(0)
    }

    /// `p`-periodic series with coefficient `ℓ'p + j` taken from member `j` at `ℓ'`.
    /// Indices not covered by the members are zero.
    pub fn interleave(&self) -> Result<FluctuationSeries> {
        let deg = self.combined_degree();
        let mut coeffs = vec![Complex64::new(0.0, 0.0); 2 * deg + 1];
        for (ell, i, lp) in self.index_set() {
            coeffs[(ell + deg as i64) as usize] = self.members[i].coeff(lp);
        }
        FluctuationSeries::new(self.lambda, self.k, self.p, coeffs)
    }
}

/// `p`-periodic fluctuation whose coefficient `ℓ` is the residue at `log_q λ + 2ℓπi/(p log q)`,
/// computed directly on the members' index set.
pub fn combine(bundle: &RootsOfUnityBundle, f: &dyn PoleIntegrand, cfg: &ResidueConfig) -> Result<FluctuationSeries> {
    let deg = bundle.combined_degree();
    let log_q = f.log_q();
    let base = member_log(bundle.lambda, 0, bundle.p, log_q);
    let set = bundle.index_set();
    let vals = set
        .par_iter()
        .map(|&(ell, _, _)| {
            let s0 = base + Complex64::new(0.0, 2.0 * PI * ell as f64 / (bundle.p as f64 * log_q));
            residue(f, s0, bundle.k, cfg)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut coeffs = vec![Complex64::new(0.0, 0.0); 2 * deg + 1];
    for ((ell, _, _), v) in set.iter().zip(vals) {
        coeffs[(ell + deg as i64) as usize] = v;
    }
    FluctuationSeries::new(bundle.lambda, bundle.k, bundle.p, coeffs)
}

/// Coefficients `|ℓ| ≤ degree` of the combined `p`-periodic fluctuation, directly by residues.
pub fn combined_series(
    f: &dyn PoleIntegrand,
    lambda: Complex64,
    p: usize,
    k: usize,
    degree: usize,
    real_symmetric: bool,
    cfg: &ResidueConfig,
) -> Result<FluctuationSeries> {
    let coeffs = crate::fourier::coefficients_on_lattice(f, lambda, k, p, degree, real_symmetric, cfg)?;
    FluctuationSeries::new(lambda, k, p, coeffs)
}

/// Largest normalised gap between `Σ_ζ N^{log_q(ζλ)}(log_q N)^k Φ_{(ζλ)k}(log_q N)` and
/// `N^{log_q λ}(log_q N)^k Φ(log_q N mod p)`, divided by `|N^{log_q λ}| max(1, (log_q N)^k)`.
pub fn pointwise_consistency(
    bundle: &RootsOfUnityBundle,
    combined: &FluctuationSeries,
    q: f64,
    n_values: &[f64],
) -> f64 {
    let log_q = q.ln();
    n_values
        .iter()
        .map(|&n| {
            let u = n.ln() / log_q;
            let logpow = u.powi(bundle.k as i32);
            let lhs: Complex64 = bundle
                .members
                .iter()
                .enumerate()
                .map(|(i, m)| {
                    let e = member_log(bundle.lambda, bundle.j0 + i as i64, bundle.p, log_q);
                    (e * u * log_q).exp() * logpow * m.eval(u)
                })
                .sum();
            let growth = (member_log(bundle.lambda, 0, bundle.p, log_q) * u * log_q).exp();
            let rhs = growth * logpow * combined.eval(u);
            (lhs - rhs).norm() / (growth.norm() * logpow.abs().max(1.0))
        })
        .fold(0.0, f64::max)
}

/// Test integrand with closed-form residues:
/// `a/(s − s₊) + b/(s − s₋) + g(s)/(1 − λ^p q^{−ps})`, `s_± = log_q λ ± πi/log q`,
/// `g(s) = 1/(s + 3)²`.
///
/// The last term has simple poles at every `log_q λ + 2ℓπi/(p log q)` with residue
/// `g(s_ℓ)/(p log q)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticIntegrand {
    pub q: f64,
    pub lambda: f64,
    pub p: usize,
    pub a: Complex64,
    pub b: Complex64,
}

impl SyntheticIntegrand {
    fn log_q_(&self) -> f64 {
        self.q.ln()
    }

    fn s_plus(&self) -> Complex64 {
        Complex64::new(self.lambda.ln() / self.log_q_(), PI / self.log_q_())
    }

    fn s_minus(&self) -> Complex64 {
        self.s_plus().conj()
    }

    fn g(s: Complex64) -> Complex64 {
        1.0 / ((s + 3.0) * (s + 3.0))
    }

    /// Exact residue at `log_q λ + 2ℓπi/(p log q)`.
    pub fn exact_residue(&self, ell: i64) -> Complex64 {
        let lq = self.log_q_();
        let s = Complex64::new(self.lambda.ln() / lq, 2.0 * PI * ell as f64 / (self.p as f64 * lq));
        let mut r = Self::g(s) / (self.p as f64 * lq);
        if (s - self.s_plus()).norm() < 1e-12 {
            r += self.a;
        }
        if (s - self.s_minus()).norm() < 1e-12 {
            r += self.b;
        }
        r
    }

    pub fn value(&self, s: Complex64) -> Complex64 {
        let lq = self.log_q_();
        let pf = self.p as f64;
        let denom = 1.0 - (Complex64::new(pf * self.lambda.ln(), 0.0) - s * pf * lq).exp();
        self.a / (s - self.s_plus()) + self.b / (s - self.s_minus()) + Self::g(s) / denom
    }
}

impl PoleIntegrand for SyntheticIntegrand {
    fn log_q(&self) -> f64 {
        self.log_q_()
    }

    fn values(&self, _center: Complex64, _radius: f64, points: &[Complex64]) -> Result<Vec<Complex64>> {
        Ok(points.iter().map(|&s| self.value(s)).collect())
    }

    fn nearest_other_singularity(&self, s0: Complex64) -> f64 {
        let lq = self.log_q_();
        let step = 2.0 * PI / (self.p as f64 * lq);
        let base = self.lambda.ln() / lq;
        let mut best = (s0 + 3.0).norm();
        let n0 = (s0.im / step).round();
        for dn in -1..=1 {
            let p = Complex64::new(base, (n0 + dn as f64) * step);
            let d = (p - s0).norm();
            if d > 1e-9 {
                best = best.min(d);
            }
        }
        for sp in [self.s_plus(), self.s_minus()] {
            let d = (sp - s0).norm();
            if d > 1e-9 {
                best = best.min(d);
            }
        }
        best
    }

    fn left_boundary(&self) -> f64 {
        -2.0
    }
}
