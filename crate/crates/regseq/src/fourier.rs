//! Fourier coefficients of the periodic fluctuations via numerical residues, and the
//! resulting asymptotic expansion of `X(N)`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::dirichlet::DirichletEvaluator;
use crate::error::{Error, Result};
use crate::linrep::LinearRepresentation;
use crate::spectral::{SpectralSummary, DEFAULT_R_EPSILON};

/// A truncated Fourier series `Φ(u) = Σ_{|ℓ|≤L} φ_ℓ exp(2ℓπi u/p)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FluctuationSeries {
    pub lambda: Complex64,
    pub k: usize,
    pub period: usize,
    degree: usize,
    coeffs: Vec<Complex64>,
}

impl FluctuationSeries {
    /// `coeffs[i]` is `φ_{i−L}` for `L = (coeffs.len() − 1)/2`.
    pub fn new(lambda: Complex64, k: usize, period: usize, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() % 2 != 1 {
            return Err(Error::InvalidArgument("coefficient list must have odd length".into()));
        }
        if period == 0 {
            return Err(Error::InvalidArgument("period must be at least 1".into()));
        }
        Ok(Self { lambda, k, period, degree: coeffs.len() / 2, coeffs })
    }

    /// Truncation degree `L`.
    pub fn degree(&self) -> usize {
        self.degree
    }

    /// `φ_ℓ`, zero outside `[−L, L]`.
    pub fn coeff(&self, ell: i64) -> Complex64 {
        if ell.unsigned_abs() as usize > self.degree {
            return Complex64::new(0.0, 0.0);
        }
        self.coeffs[(ell + self.degree as i64) as usize]
    }

    /// `(ℓ, φ_ℓ)` for `ℓ = −L, …, L`.
    pub fn iter(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        let l = self.degree as i64;
        self.coeffs.iter().enumerate().map(move |(i, &c)| (i as i64 - l, c))
    }

    /// `Φ(u)`; the argument is first reduced modulo the period.
    pub fn eval(&self, u: f64) -> Complex64 {
        let p = self.period as f64;
        let t = u.rem_euclid(p) / p;
        let l = self.degree as i64;
        let mut acc = Complex64::new(0.0, 0.0);
        for (i, c) in self.coeffs.iter().enumerate() {
            let ell = i as i64 - l;
            if *c != Complex64::new(0.0, 0.0) {
                acc += c * Complex64::from_polar(1.0, 2.0 * PI * (ell as f64) * t);
            }
        }
        acc
    }
}

/// Meromorphic function whose residues are taken by contour quadrature.
pub trait PoleIntegrand: Sync {
    fn log_q(&self) -> f64;

    /// Values at the given contour points around `center` (used to fix per-contour parameters).
    fn values(&self, center: Complex64, radius: f64, points: &[Complex64]) -> Result<Vec<Complex64>>;

    /// Distance from `s0` to the nearest singular point other than `s0` itself.
    fn nearest_other_singularity(&self, s0: Complex64) -> f64;

    /// Contours must stay strictly to the right of this abscissa.
    fn left_boundary(&self) -> f64;
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResidueConfig {
    /// Contour radius; `None` picks the default.
    pub rho: Option<f64>,
    pub m_start: usize,
    pub m_max: usize,
    pub tolerance: f64,
}

impl Default for ResidueConfig {
    fn default() -> Self {
        Self { rho: None, m_start: 64, m_max: 16384, tolerance: 1e-9 }
    }
}

/// `min(0.4/log q, half distance to the nearest other pole, distance to the strip boundary)/2`.
pub fn default_radius(f: &dyn PoleIntegrand, s0: Complex64) -> f64 {
    let a = 0.4 / f.log_q();
    let b = 0.5 * f.nearest_other_singularity(s0);
    let c = s0.re - f.left_boundary();
    a.min(b).min(c) / 2.0
}

/// `(log q)^k / k! · Res_{s=s0} f(s)(s − s0)^k` by the trapezoidal rule on `|s − s0| = ρ`.
pub fn residue(f: &dyn PoleIntegrand, s0: Complex64, k: usize, cfg: &ResidueConfig) -> Result<Complex64> {
    let rho = match cfg.rho {
        Some(r) => r,
        None => default_radius(f, s0),
    };
    let other = f.nearest_other_singularity(s0);
    if !(rho > 0.0) || rho >= other || s0.re - rho <= f.left_boundary() {
        return Err(Error::Geometry(format!(
            "radius {rho:.4} around {s0} must be positive, below the distance {other:.4} to the next pole \
             and keep Re s above {:.4}",
            f.left_boundary()
        )));
    }
    let point = |m: usize, total: usize| {
        Complex64::from_polar(rho, 2.0 * PI * m as f64 / total as f64)
    };
    // Σ f(s0 + w) w^{k+1} over the nodes w
    let weighted = |nodes: &[Complex64]| -> Result<Complex64> {
        let pts: Vec<Complex64> = nodes.iter().map(|w| s0 + w).collect();
        let vals = f.values(s0, rho, &pts)?;
        Ok(vals.iter().zip(nodes).map(|(v, w)| v * w.powu(k as u32 + 1)).sum())
    };
    let mut m = cfg.m_start.max(4);
    let nodes: Vec<Complex64> = (0..m).map(|i| point(i, m)).collect();
    let mut sum = weighted(&nodes)?;
    let mut prev = sum / m as f64;
    loop {
        let odd: Vec<Complex64> = (0..m).map(|i| point(2 * i + 1, 2 * m)).collect();
        sum += weighted(&odd)?;
        m *= 2;
        let cur = sum / m as f64;
        if (cur - prev).norm() <= cfg.tolerance * (1.0 + cur.norm()) {
            let mut fact = 1.0;
            for i in 1..=k {
                fact *= i as f64;
            }
            return Ok(cur * f.log_q().powi(k as i32) / fact);
        }
        if m >= cfg.m_max {
            return Err(Error::Accuracy(format!(
                "contour quadrature around {s0} did not settle with {m} nodes"
            )));
        }
        prev = cur;
    }
}

/// `(x(0) + 𝒳(s))/s`; only `m^{−s}T(s)/s` matters for residues off `s = 0`,
/// the remaining part being entire there.
pub struct SummatoryIntegrand<'a> {
    pub ev: &'a DirichletEvaluator,
}

impl PoleIntegrand for SummatoryIntegrand<'_> {
    fn log_q(&self) -> f64 {
        self.ev.log_q()
    }

    fn values(&self, center: Complex64, radius: f64, points: &[Complex64]) -> Result<Vec<Complex64>> {
        let m = self.ev.split_for(center.norm() + radius);
        let lm = (m as f64).ln();
        let left = self.ev.representation().left().clone();
        points
            .iter()
            .map(|&s| {
                let t = self.ev.scaled_tail(s, m)?;
                Ok(left.dot(&t.transpose()) * (-s * lm).exp() / s)
            })
            .collect()
    }

    fn nearest_other_singularity(&self, s0: Complex64) -> f64 {
        pole_lattice_distance(self.ev.spectrum(), self.ev.log_q(), s0)
    }

    fn left_boundary(&self) -> f64 {
        self.ev.abscissa() + self.ev.config().delta / 2.0
    }
}

/// Distance from `s0` to the nearest point of `{0} ∪ {log_q μ + 2πin/log q}` other than `s0`.
pub fn pole_lattice_distance(spectrum: &[Complex64], log_q: f64, s0: Complex64) -> f64 {
    let step = 2.0 * PI / log_q;
    let mut best = if s0.norm() > 1e-9 { s0.norm() } else { f64::INFINITY };
    for mu in spectrum {
        let base = mu.ln() / log_q;
        let n0 = ((s0.im - base.im) / step).round();
        for dn in -1..=1 {
            let p = Complex64::new(base.re, base.im + (n0 + dn as f64) * step);
            let dist = (p - s0).norm();
            if dist > 1e-9 {
                best = best.min(dist);
            }
        }
    }
    best
}

/// `log_q λ + 2ℓπi/(p log q)` (principal logarithm).
pub fn pole_location(lambda: Complex64, ell: i64, period: usize, log_q: f64) -> Complex64 {
    lambda.ln() / log_q + Complex64::new(0.0, 2.0 * PI * ell as f64 / (period as f64 * log_q))
}

/// `φ_{λkℓ} = (log q)^k/k! · Res((x(0) + 𝒳(s))(s − log_q λ − 2ℓπi/log q)^k / s)`.
pub fn fourier_coefficient(
    ev: &DirichletEvaluator,
    lambda: Complex64,
    k: usize,
    ell: i64,
    cfg: &ResidueConfig,
) -> Result<Complex64> {
    check_in_strip(ev, lambda)?;
    let s0 = pole_location(lambda, ell, 1, ev.log_q());
    residue(&SummatoryIntegrand { ev }, s0, k, cfg)
}

pub(crate) fn check_in_strip(ev: &DirichletEvaluator, lambda: Complex64) -> Result<()> {
    let need = ev.r_bound() * (ev.config().delta * ev.log_q()).exp();
    if !(lambda.norm() > need) {
        return Err(Error::Geometry(format!(
            "|λ| = {} does not exceed R q^δ = {need}; the pole lies outside the continuation strip",
            lambda.norm()
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExpansionTerm {
    pub lambda: Complex64,
    pub k: usize,
    pub series: FluctuationSeries,
}

impl ExpansionTerm {
    /// `N^{log_q λ} (log_q N)^k Φ(log_q N)`.
    pub fn eval(&self, n: f64, log_q: f64) -> Complex64 {
        let u = n.ln() / log_q;
        let growth = (self.lambda.ln() * u).exp();
        growth * u.powi(self.k as i32) * self.series.eval(u)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AsymptoticExpansion {
    pub q: usize,
    pub terms: Vec<ExpansionTerm>,
    /// `log_q R`.
    pub error_exponent: f64,
    /// Largest `m(λ)` over eigenvalues on `|λ| = R`.
    pub error_log_power: usize,
}

impl AsymptoticExpansion {
    pub fn log_q(&self) -> f64 {
        (self.q as f64).ln()
    }

    /// Main part of `X(N)` (error term omitted), Fourier series truncated at their degree.
    pub fn eval(&self, n: f64) -> Complex64 {
        self.terms.iter().map(|t| t.eval(n, self.log_q())).sum()
    }

    /// Index of the dominant term: largest `|λ|`, then largest `k`.
    pub fn dominant(&self) -> Option<usize> {
        (0..self.terms.len()).max_by(|&a, &b| {
            let (ta, tb) = (&self.terms[a], &self.terms[b]);
            ta.lambda
                .norm()
                .total_cmp(&tb.lambda.norm())
                .then(ta.k.cmp(&tb.k))
                .then(tb.lambda.arg().abs().total_cmp(&ta.lambda.arg().abs()))
        })
    }
}

/// `max m(λ)` over eigenvalues with `|λ|` within `10 εR R` of `R`; 0 if there are none.
pub fn error_log_power(spectral: &SpectralSummary, r_bound: f64) -> usize {
    spectral
        .eigenvalues
        .iter()
        .filter(|e| (e.lambda.norm() - r_bound).abs() <= 10.0 * DEFAULT_R_EPSILON * r_bound)
        .map(|e| e.max_jordan)
        .max()
        .unwrap_or(0)
}

fn is_real_rep(rep: &LinearRepresentation<Complex64>) -> bool {
    rep.matrices().iter().flat_map(|m| m.iter()).chain(rep.left().iter()).chain(rep.v0().iter()).all(|z| z.im == 0.0)
}

/// Coefficients `φ_ℓ` for `ℓ = −L..=L` at the poles `log_q λ + 2ℓπi/(p log q)`, in parallel.
///
/// For real integrands and real `λ`, `φ_{−ℓ} = conj(φ_ℓ)` is used instead of a second contour.
pub fn coefficients_on_lattice(
    f: &dyn PoleIntegrand,
    lambda: Complex64,
    k: usize,
    period: usize,
    degree: usize,
    real_symmetric: bool,
    cfg: &ResidueConfig,
) -> Result<Vec<Complex64>> {
    let l = degree as i64;
    let fold = real_symmetric && lambda.im == 0.0 && lambda.re > 0.0;
    let ells: Vec<i64> = if fold { (0..=l).collect() } else { (-l..=l).collect() };
    let vals: Vec<Result<Complex64>> = ells
        .par_iter()
        .map(|&ell| residue(f, pole_location(lambda, ell, period, f.log_q()), k, cfg))
        .collect();
    let mut out = vec![Complex64::new(0.0, 0.0); 2 * degree + 1];
    for (&ell, v) in ells.iter().zip(vals) {
        let v = v?;
        out[(ell + l) as usize] = v;
        if fold {
            out[(l - ell) as usize] = if ell == 0 { Complex64::new(v.re, 0.0) } else { v.conj() };
        }
    }
    Ok(out)
}

/// One fluctuation per `(λ, k)` with `|λ| > R`, `0 ≤ k < m(λ)`, coefficients `|ℓ| ≤ L`.
pub fn build_expansion(
    ev: &DirichletEvaluator,
    spectral: &SpectralSummary,
    degree: usize,
    cfg: &ResidueConfig,
) -> Result<AsymptoticExpansion> {
    let rep = ev.representation();
    let real = is_real_rep(rep);
    let r = ev.r_bound();
    let integrand = SummatoryIntegrand { ev };
    let mut terms: Vec<ExpansionTerm> = Vec::new();
    for e in spectral.eigenvalues.iter().filter(|e| e.lambda.norm() > r) {
        check_in_strip(ev, e.lambda)?;
        for k in 0..e.max_jordan {
            // conjugate partner already computed
            if real && e.lambda.im < 0.0 {
                if let Some(t) = terms
                    .iter()
                    .find(|t| t.k == k && (t.lambda - e.lambda.conj()).norm() <= spectral.cluster_tol)
                {
                    let coeffs: Vec<Complex64> = (-(degree as i64)..=degree as i64)
                        .map(|ell| t.series.coeff(-ell).conj())
                        .collect();
                    let series = FluctuationSeries::new(e.lambda, k, 1, coeffs)?;
                    terms.push(ExpansionTerm { lambda: e.lambda, k, series });
                    continue;
                }
            }
            let coeffs = coefficients_on_lattice(&integrand, e.lambda, k, 1, degree, real, cfg)?;
            let series = FluctuationSeries::new(e.lambda, k, 1, coeffs)?;
            terms.push(ExpansionTerm { lambda: e.lambda, k, series });
        }
    }
    Ok(AsymptoticExpansion {
        q: rep.q(),
        terms,
        error_exponent: ev.abscissa(),
        error_log_power: error_log_power(spectral, r),
    })
}

/// One row of an empirical-versus-reconstructed comparison.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FluctuationSample {
    pub u: f64,
    pub n: u128,
    pub empirical: Complex64,
    pub reconstructed: Complex64,
}

/// `(X(N) − other terms)/(N^{log_q λ}(log_q N)^k)` at `N = ⌈q^u⌉`, next to the reconstruction
/// `Φ_{λk}(log_q N)`.
pub fn empirical_fluctuation(
    rep: &LinearRepresentation<Complex64>,
    exp: &AsymptoticExpansion,
    term: usize,
    u_grid: &[f64],
) -> Result<Vec<FluctuationSample>> {
    let t = exp
        .terms
        .get(term)
        .ok_or_else(|| Error::InvalidArgument(format!("no expansion term with index {term}")))?;
    let log_q = exp.log_q();
    let exact = rep.to_integral();
    u_grid
        .iter()
        .map(|&u| {
            let nf = (u * log_q).exp().ceil();
            if !(2.0..1e30).contains(&nf) {
                return Err(Error::InvalidArgument(format!("u = {u} gives N out of range")));
            }
            let n = nf as u128;
            let x = match &exact {
                Some(e) => crate::scalar::Scalar::to_c64(&e.summatory_fast(n)),
                None => rep.summatory_fast(n),
            };
            let others: Complex64 = exp
                .terms
                .iter()
                .enumerate()
                .filter(|(i, _)| *i != term)
                .map(|(_, o)| o.eval(n as f64, log_q))
                .sum();
            let un = (n as f64).ln() / log_q;
            let scale = (t.lambda.ln() * un).exp() * un.powi(t.k as i32);
            Ok(FluctuationSample {
                u,
                n,
                empirical: (x - others) / scale,
                reconstructed: t.series.eval(un),
            })
        })
        .collect()
}
