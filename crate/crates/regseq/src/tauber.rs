//! Weighted sums of periodic fluctuations turned into `N^{κ+1}`-scaled periodic terms.
//!
//! `Φ(u, Z) = Σ_j Φ_j(u) Z^j`, `Q(Z) = q^{κ+1+Z}`, `a_ℓ = κ + 1 + 2ℓπi/log q`.

use num_complex::Complex;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Tolerance for `q^{κ+1} = 1`.
pub const UNIT_TOL: f64 = 1e-12;

/// Trigonometric polynomial `Σ_{|ℓ|≤L} c_ℓ e^{2πiℓu}`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrigPoly<F> {
    coeffs: Vec<Complex<F>>,
}

impl<F: Real> TrigPoly<F> {
    /// `coeffs[i] = c_{i−L}`; the length must be odd.
    pub fn new(coeffs: Vec<Complex<F>>) -> Result<Self> {
        if coeffs.len().is_multiple_of(2) {
            return Err(Error::Malformed(format!(
                "trigonometric polynomial needs 2L+1 coefficients, got {}",
                coeffs.len()
            )));
        }
        Ok(Self { coeffs })
    }

    pub fn zero(degree: usize) -> Self {
        Self { coeffs: vec![Complex::new(F::zero(), F::zero()); 2 * degree + 1] }
    }

    pub fn constant(c: Complex<F>) -> Self {
        Self { coeffs: vec![c] }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() / 2
    }

    pub fn coeffs(&self) -> &[Complex<F>] {
        &self.coeffs
    }

    pub fn coeff(&self, ell: i64) -> Complex<F> {
        let l = self.degree() as i64;
        if ell.abs() > l {
            Complex::new(F::zero(), F::zero())
        } else {
            self.coeffs[(ell + l) as usize]
        }
    }

    fn set(&mut self, ell: i64, c: Complex<F>) {
        let l = self.degree() as i64;
        self.coeffs[(ell + l) as usize] = c;
    }

    /// Same function with `degree ≥ self.degree()`.
    pub fn padded(&self, degree: usize) -> Self {
        let mut out = Self::zero(degree.max(self.degree()));
        let l = self.degree() as i64;
        for ell in -l..=l {
            out.set(ell, self.coeff(ell));
        }
        out
    }

    pub fn eval(&self, u: F) -> Complex<F> {
        let l = self.degree() as i64;
        let two_pi = F::PI() + F::PI();
        let step = Complex::from_polar(F::one(), two_pi * u);
        // Horner in e^{2πiu}, then shift by e^{−2πiLu}
        let mut acc = Complex::new(F::zero(), F::zero());
        for c in self.coeffs.iter().rev() {
            acc = acc * step + c;
        }
        acc * Complex::from_polar(F::one(), -two_pi * u * F::of(l as f64))
    }

    pub fn max_abs_coeff(&self) -> F {
        self.coeffs.iter().map(|c| c.norm()).fold(F::zero(), F::max)
    }
}

/// Input of the pseudo-Tauberian relation: `Φ_0, …, Φ_{m−1}` with `κ`, `q`, `α`, `β`.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodicFunctionFamily<F> {
    phi: Vec<TrigPoly<F>>,
    kappa: Complex<F>,
    q: F,
    alpha: F,
    beta: F,
}

impl<F: Real> PeriodicFunctionFamily<F> {
    /// Requires `m ≥ 1`, `q > 1` and `0 < β < α ≤ 1`; all `Φ_j` are padded to a common degree.
    pub fn new(phi: Vec<TrigPoly<F>>, kappa: Complex<F>, q: F, alpha: F, beta: F) -> Result<Self> {
        if phi.is_empty() {
            return Err(Error::InvalidArgument("m must be at least 1".into()));
        }
        if !(q > F::one()) {
            return Err(Error::InvalidArgument("q must exceed 1".into()));
        }
        if !(F::zero() < beta && beta < alpha && alpha <= F::one()) {
            return Err(Error::InvalidArgument("need 0 < beta < alpha <= 1".into()));
        }
        if !(kappa.re.is_finite() && kappa.im.is_finite()) {
            return Err(Error::InvalidArgument("kappa must be finite".into()));
        }
        let degree = phi.iter().map(TrigPoly::degree).max().unwrap_or(0);
        let phi = phi.iter().map(|p| p.padded(degree)).collect();
        Ok(Self { phi, kappa, q, alpha, beta })
    }

    pub fn m(&self) -> usize {
        self.phi.len()
    }

    pub fn phi(&self) -> &[TrigPoly<F>] {
        &self.phi
    }

    pub fn kappa(&self) -> Complex<F> {
        self.kappa
    }

    pub fn q(&self) -> F {
        self.q
    }

    pub fn alpha(&self) -> F {
        self.alpha
    }

    pub fn beta(&self) -> F {
        self.beta
    }

    pub fn degree(&self) -> usize {
        self.phi[0].degree()
    }

    pub fn log_q(&self) -> F {
        self.q.ln()
    }

    /// `χ_ℓ = 2ℓπi/log q`.
    pub fn chi(&self, ell: i64) -> Complex<F> {
        Complex::new(F::zero(), (F::PI() + F::PI()) * F::of(ell as f64) / self.log_q())
    }

    /// `a_ℓ = κ + 1 + χ_ℓ`.
    pub fn a(&self, ell: i64) -> Complex<F> {
        self.kappa + F::one() + self.chi(ell)
    }

    /// `Q(Z) = q^{κ+1+Z}`.
    pub fn q_of(&self, z: Complex<F>) -> Complex<F> {
        ((self.kappa + F::one() + z) * self.log_q()).exp()
    }

    /// `q^{κ+1} = 1` within [`UNIT_TOL`].
    pub fn q_kappa_unit(&self) -> bool {
        (self.q_of(Complex::new(F::zero(), F::zero())) - F::one()).norm() <= F::of(UNIT_TOL)
    }

    /// The `ℓ` with `a_ℓ = 0` when `q^{κ+1} = 1`.
    pub fn unit_index(&self) -> Option<i64> {
        if !self.q_kappa_unit() {
            return None;
        }
        let two_pi = F::PI() + F::PI();
        (-self.kappa.im * self.log_q() / two_pi).round().to_i64()
    }

    /// `Σ_j φ_{jℓ} Z^j`.
    pub fn phi_hat(&self, ell: i64, z: Complex<F>) -> Complex<F> {
        let mut acc = Complex::new(F::zero(), F::zero());
        for p in self.phi.iter().rev() {
            acc = acc * z + p.coeff(ell);
        }
        acc
    }

    /// `Φ(u, Z)`.
    pub fn phi_gf(&self, u: F, z: Complex<F>) -> Complex<F> {
        let mut acc = Complex::new(F::zero(), F::zero());
        for p in self.phi.iter().rev() {
            acc = acc * z + p.eval(u);
        }
        acc
    }

    /// Exponent used for `|Q(Z)| ≠ q^α`; when `ℜκ + 1 = α` it is lowered to `(α + β)/2`.
    pub fn effective_alpha(&self) -> F {
        let gap = (self.alpha - F::one() - self.kappa.re).abs();
        if gap > F::of(1e-9) {
            self.alpha
        } else {
            (self.alpha + self.beta) / F::of(2.0)
        }
    }

    /// Smallest `|a_ℓ|` over `ℓ ∈ ℤ` with `a_ℓ ≠ 0`.
    fn min_nonzero_a(&self) -> F {
        let two_pi = F::PI() + F::PI();
        let centre = (-self.kappa.im * self.log_q() / two_pi).round().to_i64().unwrap_or(0);
        let unit = self.unit_index();
        (centre - 2..=centre + 2)
            .filter(|&ell| Some(ell) != unit)
            .map(|ell| self.a(ell).norm())
            .fold(F::infinity(), F::min)
    }

    /// `r = 0.9·min(min_{a_ℓ≠0}|a_ℓ|/2, |α−1−ℜκ|/2, (α−β)/2)`; Z must satisfy `0 < |Z| < 2r`.
    pub fn default_radius(&self) -> F {
        let half = F::of(0.5);
        let alpha = self.effective_alpha();
        let r = (self.min_nonzero_a() * half)
            .min((alpha - F::one() - self.kappa.re).abs() * half)
            .min((alpha - self.beta) * half);
        F::of(0.9) * r
    }

    fn check_z(&self, z: Complex<F>) -> Result<()> {
        let r = self.default_radius();
        let n = z.norm();
        if !n.is_finite() || n >= r + r {
            return Err(Error::Domain(format!(
                "|Z| = {:?} outside the admissible disc |Z| < {:?}",
                n.to_f64(),
                (r + r).to_f64()
            )));
        }
        if n == F::zero() && self.q_kappa_unit() {
            return Err(Error::Domain("Z = 0 is a pole when q^(κ+1) = 1".into()));
        }
        Ok(())
    }
}

/// `(e^z − 1)/z`.
fn exprel<F: Real>(z: Complex<F>) -> Complex<F> {
    if z.norm() < F::of(1e-2) {
        let mut term = Complex::new(F::one(), F::zero());
        let mut acc = term;
        for k in 2..9 {
            term = term * z / F::of(k as f64);
            acc = acc + term;
        }
        acc
    } else {
        (z.exp() - F::one()) / z
    }
}

/// `I(u, Z) = (log q)∫₀^u Q(Z)^w Φ(w, Z) dw`, mode by mode in closed form.
pub fn integral_i<F: Real>(fam: &PeriodicFunctionFamily<F>, u: F, z: Complex<F>) -> Complex<F> {
    let lq = fam.log_q();
    let l = fam.degree() as i64;
    let mut acc = Complex::new(F::zero(), F::zero());
    for ell in -l..=l {
        let c = fam.phi_hat(ell, z);
        if c.norm() == F::zero() {
            continue;
        }
        acc = acc + c * exprel((fam.a(ell) + z) * (u * lq)) * (u * lq);
    }
    acc
}

/// `Ψ(u, Z) = Q(Z)^{−u}(I(u, Z) − I(1, Z)/(1 − Q(Z)))`.
pub fn build_psi_by_integral<F: Real>(fam: &PeriodicFunctionFamily<F>, u: F, z: Complex<F>) -> Result<Complex<F>> {
    if !(u >= F::zero() && u <= F::one()) {
        return Err(Error::Domain("u must lie in [0, 1]".into()));
    }
    fam.check_z(z)?;
    Ok(psi_gf_unchecked(fam, u, z))
}

fn psi_gf_unchecked<F: Real>(fam: &PeriodicFunctionFamily<F>, u: F, z: Complex<F>) -> Complex<F> {
    let q = fam.q_of(z);
    let i1 = integral_i(fam, F::one(), z);
    let iu = integral_i(fam, u, z);
    let q_pow = ((fam.kappa() + F::one() + z) * (-u * fam.log_q())).exp();
    q_pow * (iu - i1 / (Complex::new(F::one(), F::zero()) - q))
}

/// `Ψ_{−1}, …, Ψ_{m−1}` as trigonometric polynomials.
#[derive(Debug, Clone, PartialEq)]
pub struct PsiFamily<F> {
    psi: Vec<TrigPoly<F>>,
    flag_q_kappa_unit: bool,
}

impl<F: Real> PsiFamily<F> {
    /// `Ψ_j` for `−1 ≤ j < m`.
    pub fn psi(&self, j: i64) -> &TrigPoly<F> {
        &self.psi[(j + 1) as usize]
    }

    pub fn all(&self) -> &[TrigPoly<F>] {
        &self.psi
    }

    pub fn m(&self) -> usize {
        self.psi.len() - 1
    }

    pub fn flag_q_kappa_unit(&self) -> bool {
        self.flag_q_kappa_unit
    }
}

/// Fourier route: divide `Σ_j φ_{jℓ} Z^j` by `a_ℓ + Z` as power series in `Z`.
///
/// For `a_ℓ = 0` the quotient is `Σ_j φ_{jℓ} Z^{j−1}`, so `ψ_{m−1,ℓ} = 0`.
pub fn build_psi_from_fourier<F: Real>(fam: &PeriodicFunctionFamily<F>) -> PsiFamily<F> {
    let m = fam.m();
    let l = fam.degree() as i64;
    let unit = fam.unit_index();
    let mut psi = vec![TrigPoly::zero(fam.degree()); m + 1];
    let zero = Complex::new(F::zero(), F::zero());
    for ell in -l..=l {
        if Some(ell) == unit {
            for (p, f) in psi.iter_mut().zip(&fam.phi) {
                p.set(ell, f.coeff(ell));
            }
            psi[m].set(ell, zero);
            continue;
        }
        let a = fam.a(ell);
        let mut prev = zero;
        for j in 0..m {
            let v = (fam.phi[j].coeff(ell) - prev) / a;
            psi[j + 1].set(ell, v);
            prev = v;
        }
    }
    PsiFamily { psi, flag_q_kappa_unit: unit.is_some() }
}

/// Quadrature settings for the Cauchy integral over `|Z| = r`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CauchyConfig {
    pub m_start: usize,
    pub m_max: usize,
    pub tolerance: f64,
}

impl Default for CauchyConfig {
    fn default() -> Self {
        Self { m_start: 16, m_max: 4096, tolerance: 1e-12 }
    }
}

/// Trapezoid estimates of `[Z^j]Ψ(u, Z)` for `j = −1..m−1` on `M` points of `|Z| = r`.
fn cauchy_all<F: Real>(fam: &PeriodicFunctionFamily<F>, u: F, r: F, points: usize) -> (Vec<Complex<F>>, F) {
    let m = fam.m();
    let two_pi = F::PI() + F::PI();
    let mut out = vec![Complex::new(F::zero(), F::zero()); m + 1];
    let mut scale = F::zero();
    for k in 0..points {
        let w = Complex::from_polar(F::one(), two_pi * F::of(k as f64) / F::of(points as f64));
        let z = w * r;
        let v = psi_gf_unchecked(fam, u, z);
        // [Z^j] ≈ mean of Ψ(Z) Z^{−j}
        let mut factor = z;
        for slot in out.iter_mut() {
            *slot = *slot + v * factor;
            scale = scale.max(v.norm() * factor.norm());
            factor = factor / z;
        }
    }
    let inv = F::one() / F::of(points as f64);
    for slot in out.iter_mut() {
        *slot = *slot * inv;
    }
    (out, scale)
}

fn cauchy_converged<F: Real>(
    fam: &PeriodicFunctionFamily<F>,
    u: F,
    r: F,
    cfg: &CauchyConfig,
) -> Result<Vec<Complex<F>>> {
    let check_r = r > F::zero() && r < fam.default_radius() * F::of(2.0) && r.is_finite();
    if !check_r {
        return Err(Error::Domain(format!("radius {:?} outside (0, 2r)", r.to_f64())));
    }
    let mut points = cfg.m_start.max(4);
    let (mut prev, _) = cauchy_all(fam, u, r, points);
    while points < cfg.m_max {
        points *= 2;
        let (cur, scale) = cauchy_all(fam, u, r, points);
        let tol = F::of(cfg.tolerance) * scale.max(F::one());
        let diff = cur.iter().zip(&prev).map(|(a, b)| (*a - *b).norm()).fold(F::zero(), F::max);
        if diff <= tol {
            return Ok(cur);
        }
        prev = cur;
    }
    Err(Error::Accuracy(format!("Cauchy trapezoid did not settle with {} points", cfg.m_max)))
}

/// `Ψ_j(u) = (1/2πi)∮_{|Z|=r} Ψ(u, Z) Z^{−j−1} dZ`, doubling the point count until stable.
pub fn extract_psi_coefficient<F: Real>(
    fam: &PeriodicFunctionFamily<F>,
    j: i64,
    u: F,
    r: F,
    cfg: &CauchyConfig,
) -> Result<Complex<F>> {
    if j < -1 || j >= fam.m() as i64 {
        return Err(Error::InvalidArgument(format!("j = {j} outside −1..{}", fam.m() - 1)));
    }
    Ok(cauchy_converged(fam, u, r, cfg)?[(j + 1) as usize])
}

/// Number of equispaced samples for an exact DFT of degree-`L` trigonometric polynomials.
fn dft_points(degree: usize) -> usize {
    (2 * degree + 2).max(8)
}

fn dft_coeff<F: Real>(samples: &[Complex<F>], ell: i64) -> Complex<F> {
    let n = samples.len();
    let two_pi = F::PI() + F::PI();
    let mut acc = Complex::new(F::zero(), F::zero());
    for (t, v) in samples.iter().enumerate() {
        let angle = -two_pi * F::of((ell * t as i64).rem_euclid(n as i64) as f64) / F::of(n as f64);
        acc = acc + *v * Complex::from_polar(F::one(), angle);
    }
    acc / F::of(n as f64)
}

/// Integral route: `Ψ_j` sampled through the Cauchy integral, Fourier coefficients by DFT.
pub fn build_psi_by_cauchy<F: Real>(fam: &PeriodicFunctionFamily<F>, r: F, cfg: &CauchyConfig) -> Result<PsiFamily<F>> {
    let n = dft_points(fam.degree());
    let samples: Vec<Vec<Complex<F>>> = (0..n)
        .into_par_iter()
        .map(|t| cauchy_converged(fam, F::of(t as f64) / F::of(n as f64), r, cfg))
        .collect::<Result<_>>()?;
    let l = fam.degree() as i64;
    let mut psi = vec![TrigPoly::zero(fam.degree()); fam.m() + 1];
    for (j, poly) in psi.iter_mut().enumerate() {
        let column: Vec<Complex<F>> = samples.iter().map(|s| s[j]).collect();
        for ell in -l..=l {
            poly.set(ell, dft_coeff(&column, ell));
        }
    }
    Ok(PsiFamily { psi, flag_q_kappa_unit: fam.q_kappa_unit() })
}

/// Largest `|ψ_{jℓ}^{Fourier} − ψ_{jℓ}^{Cauchy}|` over `−1 ≤ j < m`, `|ℓ| ≤ L`.
pub fn two_route_deviation<F: Real>(fam: &PeriodicFunctionFamily<F>, r: F, cfg: &CauchyConfig) -> Result<F> {
    let a = build_psi_from_fourier(fam);
    let b = build_psi_by_cauchy(fam, r, cfg)?;
    let mut worst = F::zero();
    for (pa, pb) in a.all().iter().zip(b.all()) {
        for (x, y) in pa.coeffs().iter().zip(pb.coeffs()) {
            worst = worst.max((*x - *y).norm());
        }
    }
    Ok(worst)
}

/// `|(a_ℓ + Z)∫₀¹Ψ(u, Z)e^{−2ℓπiu}du − ∫₀¹Φ(w, Z)e^{−2ℓπiw}dw|`.
pub fn gf_identity_residual<F: Real>(fam: &PeriodicFunctionFamily<F>, ell: i64, z: Complex<F>) -> Result<F> {
    fam.check_z(z)?;
    let n = dft_points(fam.degree().max(ell.unsigned_abs() as usize));
    let samples: Vec<Complex<F>> =
        (0..n).map(|t| psi_gf_unchecked(fam, F::of(t as f64) / F::of(n as f64), z)).collect();
    let lhs = (fam.a(ell) + z) * dft_coeff(&samples, ell);
    Ok((lhs - fam.phi_hat(ell, z)).norm())
}

/// `|Ψ(1, Z) − Ψ(0, Z)|`.
pub fn periodicity_residual<F: Real>(fam: &PeriodicFunctionFamily<F>, z: Complex<F>) -> Result<F> {
    let a = build_psi_by_integral(fam, F::zero(), z)?;
    let b = build_psi_by_integral(fam, F::one(), z)?;
    Ok((a - b).norm())
}

/// Outcome of comparing both sides of the pseudo-Tauberian relation.
#[derive(Debug, Clone, PartialEq)]
pub struct TauberReport<F> {
    pub fitted_c: Complex<F>,
    /// `max_N |LHS − c − RHS| / N^{ℜκ+1−β}`.
    pub max_scaled_residual: F,
    /// Least-squares slope of the log of the scaled residual envelope against `log N`;
    /// `None` when all residuals are at round-off level.
    pub decay_exponent: Option<F>,
    pub samples: Vec<TauberSample<F>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TauberSample<F> {
    pub n: u64,
    pub lhs: Complex<F>,
    pub rhs: Complex<F>,
}

fn factorial<F: Real>(k: usize) -> F {
    (1..=k).fold(F::one(), |acc, i| acc * F::of(i as f64))
}

/// `Σ_{j+k=m−1} (log n)^k/k! Φ_j(log_q n)` times `n^κ`.
fn lhs_term<F: Real>(fam: &PeriodicFunctionFamily<F>, n: u64) -> Complex<F> {
    let m = fam.m();
    let ln = F::of(n as f64).ln();
    let u = ln / fam.log_q();
    let frac = u - u.floor();
    let mut acc = Complex::new(F::zero(), F::zero());
    for j in 0..m {
        let k = m - 1 - j;
        acc = acc + fam.phi[j].eval(frac) * (ln.powi(k as i32) / factorial::<F>(k));
    }
    acc * (fam.kappa() * ln).exp()
}

/// `N^{κ+1}Σ_{k+j=m−1, −1≤j<m} (log N)^k/k! Ψ_j(log_q N)`.
pub fn tauber_rhs<F: Real>(fam: &PeriodicFunctionFamily<F>, psi: &PsiFamily<F>, n: u64) -> Complex<F> {
    let m = fam.m() as i64;
    let ln = F::of(n as f64).ln();
    let u = ln / fam.log_q();
    let frac = u - u.floor();
    let mut acc = Complex::new(F::zero(), F::zero());
    for j in -1..m {
        let k = (m - 1 - j) as usize;
        acc = acc + psi.psi(j).eval(frac) * (ln.powi(k as i32) / factorial::<F>(k));
    }
    acc * ((fam.kappa() + F::one()) * ln).exp()
}

/// Neumaier-compensated sum of `lhs_term(n)` over `lo ≤ n < hi`.
fn lhs_block<F: Real>(fam: &PeriodicFunctionFamily<F>, lo: u64, hi: u64) -> Complex<F> {
    let mut sum = Complex::new(F::zero(), F::zero());
    let mut comp = sum;
    for n in lo..hi {
        let t = lhs_term(fam, n);
        let s = sum + t;
        let fix = |s: F, a: F, b: F| if a.abs() >= b.abs() { (a - s) + b } else { (b - s) + a };
        comp.re = comp.re + fix(s.re, sum.re, t.re);
        comp.im = comp.im + fix(s.im, sum.im, t.im);
        sum = s;
    }
    sum + comp
}

/// Geometrically spaced distinct sample points in `[10, nmax]`, ending at `nmax`.
pub fn sample_points(nmax: u64, count: usize) -> Vec<u64> {
    let lo = 10f64.min(nmax as f64).ln();
    let hi = (nmax as f64).ln();
    let count = count.max(2);
    let mut out: Vec<u64> = (0..count)
        .map(|i| (lo + (hi - lo) * i as f64 / (count - 1) as f64).exp().round() as u64)
        .collect();
    out.push(nmax);
    out.sort_unstable();
    out.dedup();
    out
}

/// Direct summation of the left side at sampled `N ≤ nmax`, one fitted constant `c`.
///
/// `c` minimises `Σ_N N^{−2(ℜκ+1−β)}|LHS − RHS − c|²`.
pub fn verify_tauber_relation<F: Real>(
    fam: &PeriodicFunctionFamily<F>,
    psi: &PsiFamily<F>,
    nmax: u64,
    sample_count: usize,
) -> Result<TauberReport<F>> {
    if nmax < 1000 {
        return Err(Error::InvalidArgument("Nmax must be at least 1000".into()));
    }
    if psi.m() != fam.m() {
        return Err(Error::InvalidArgument("Ψ family does not match m".into()));
    }
    let points = sample_points(nmax, sample_count);
    let mut bounds = vec![1u64];
    bounds.extend(&points);
    let blocks: Vec<Complex<F>> = bounds.par_windows(2).map(|w| lhs_block(fam, w[0], w[1])).collect();
    let mut running = Complex::new(F::zero(), F::zero());
    let mut samples = Vec::with_capacity(points.len());
    for (&n, b) in points.iter().zip(blocks) {
        running = running + b;
        samples.push(TauberSample { n, lhs: running, rhs: tauber_rhs(fam, psi, n) });
    }
    let err_exp = fam.kappa().re + F::one() - fam.beta();
    let mut wsum = F::zero();
    let mut csum = Complex::new(F::zero(), F::zero());
    for s in &samples {
        let w = F::of(s.n as f64).powf(-(err_exp + err_exp));
        wsum = wsum + w;
        csum = csum + (s.lhs - s.rhs) * w;
    }
    let fitted_c = csum / wsum;
    let scaled: Vec<F> = samples
        .iter()
        .map(|s| (s.lhs - s.rhs - fitted_c).norm() / F::of(s.n as f64).powf(err_exp))
        .collect();
    let max_scaled_residual = scaled.iter().copied().fold(F::zero(), F::max);
    Ok(TauberReport { fitted_c, max_scaled_residual, decay_exponent: decay_slope(&samples, &scaled, fam), samples })
}

/// Slope of `log max_{N' ≥ N} scaled(N')` against `log N`.
fn decay_slope<F: Real>(samples: &[TauberSample<F>], scaled: &[F], fam: &PeriodicFunctionFamily<F>) -> Option<F> {
    // residuals below round-off of the summed magnitudes carry no slope
    let floor: Vec<F> = samples
        .iter()
        .map(|s| {
            let mag = s.lhs.norm().max(s.rhs.norm()).max(F::one());
            F::of(1e3) * F::epsilon() * mag / F::of(s.n as f64).powf(fam.kappa().re + F::one() - fam.beta())
        })
        .collect();
    let mut env = vec![F::zero(); scaled.len()];
    let mut acc = F::zero();
    for i in (0..scaled.len()).rev() {
        acc = acc.max(scaled[i]);
        env[i] = acc;
    }
    let pts: Vec<(F, F)> = samples
        .iter()
        .zip(env.iter().zip(&floor))
        .filter(|(_, (e, f))| **e > **f)
        .map(|(s, (e, _))| (F::of(s.n as f64).ln(), e.ln()))
        .collect();
    if pts.len() < 3 {
        return None;
    }
    let n = F::of(pts.len() as f64);
    let mx = pts.iter().fold(F::zero(), |a, p| a + p.0) / n;
    let my = pts.iter().fold(F::zero(), |a, p| a + p.1) / n;
    let sxy = pts.iter().fold(F::zero(), |a, p| a + (p.0 - mx) * (p.1 - my));
    let sxx = pts.iter().fold(F::zero(), |a, p| a + (p.0 - mx) * (p.0 - mx));
    Some(sxy / sxx)
}
