//! The Dirichlet series `𝒱(s) = Σ_{n≥1} n^{−s} v(n)` and its meromorphic continuation.
//!
//! Both regimes use one engine. For a split point `m` the tail
//! `T(z) = Σ_{n≥m} (n/m)^{−z} v(n)` satisfies the shifted functional equation
//!
//! ```text
//! (I − q^{−z} C) T(z) = Σ_{m≤n<qm} (n/m)^{−z} v(n)
//!                       + q^{−z} Σ_r A_r Σ_{k≥1} binom(−z, k) (r/(qm))^k T(z + k),
//! ```
//!
//! obtained exactly like the unshifted one by writing `n = qn' + r` with `n' ≥ m`. Since
//! `r/(qm)` is tiny for large `m`, the lattice `T(s), T(s+1), …, T(s+D)` is solved from the top
//! down with geometric truncation error. Then `𝒱(s) = Σ_{1≤n<m} n^{−s} v(n) + m^{−s} T(s)`.

use std::sync::RwLock;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linrep::LinearRepresentation;
use crate::spectral::{eigen_data, jsr_bounds, MatrixNorm, DEFAULT_R_EPSILON};

type Rep = LinearRepresentation<Complex64>;

/// Ratio `(q−1)/(q m)` per unit of `|s|` targeted by the split choice.
const SPLIT_FACTOR: f64 = 16.0;

#[derive(Debug, Clone, PartialEq)]
pub struct DirichletConfig {
    /// `R`; `None` uses the JSR upper bound plus `εR`.
    pub r_bound: Option<f64>,
    /// Safety margin `δ` to the abscissa `log_q R`.
    pub delta: f64,
    /// Target absolute accuracy.
    pub tolerance: f64,
    /// Minimal distance of `q^s` to `σ(C)`.
    pub poles_tol: f64,
    /// Largest admissible split point for the direct regime.
    pub max_split: usize,
}

impl Default for DirichletConfig {
    fn default() -> Self {
        Self {
            r_bound: None,
            delta: 0.25,
            tolerance: 1e-9,
            poles_tol: 1e-4,
            max_split: 10_000_000,
        }
    }
}

/// Cached `v(n)` for `n < len`, flattened, plus the sorted list of `n` with `v(n) ≠ 0`.
#[derive(Debug, Default)]
struct VTable {
    len: usize,
    values: Vec<Complex64>,
    nonzero: Vec<u32>,
}

#[derive(Debug)]
pub struct DirichletEvaluator {
    rep: Rep,
    q: usize,
    log_q: f64,
    c: DMatrix<Complex64>,
    spectrum: Vec<Complex64>,
    r_bound: f64,
    cfg: DirichletConfig,
    depth: usize,
    table: RwLock<VTable>,
}

/// `binom(−z, k)` for `k = 0..=kmax`.
fn neg_binomials(z: Complex64, kmax: usize) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(kmax + 1);
    let mut b = Complex64::new(1.0, 0.0);
    out.push(b);
    for i in 0..kmax {
        b = b * (-z - i as f64) / (i as f64 + 1.0);
        out.push(b);
    }
    out
}

fn max_abs(v: &DVector<Complex64>) -> f64 {
    v.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

impl DirichletEvaluator {
    pub fn new(rep: &Rep, cfg: DirichletConfig) -> Result<Self> {
        if !(cfg.delta > 0.0 && cfg.delta <= 1.0) {
            return Err(Error::InvalidArgument(format!("delta must lie in (0, 1], got {}", cfg.delta)));
        }
        if !(cfg.tolerance > 0.0) || !(cfg.poles_tol > 0.0) {
            return Err(Error::InvalidArgument("tolerances must be positive".into()));
        }
        let q = rep.q();
        let c = rep.sum_matrix();
        let spectrum = eigen_data(&c, None)?
            .eigenvalues
            .iter()
            .map(|e| e.lambda)
            .filter(|l| l.norm() > 0.0)
            .collect();
        let r_bound = match cfg.r_bound {
            Some(r) if r > 0.0 => r,
            Some(r) => return Err(Error::InvalidArgument(format!("R must be positive, got {r}"))),
            None => default_r_bound(rep)?,
        };
        // (1/16)^D below a hundredth of the tolerance
        let depth = ((cfg.tolerance * 1e-2).ln() / (1.0 / SPLIT_FACTOR).ln()).ceil() as usize + 1;
        let log_q = (q as f64).ln();
        Ok(Self {
            rep: rep.clone(),
            q,
            log_q,
            c,
            spectrum,
            r_bound,
            cfg,
            depth: depth.max(4),
            table: RwLock::new(VTable::default()),
        })
    }

    pub fn representation(&self) -> &Rep {
        &self.rep
    }

    pub fn config(&self) -> &DirichletConfig {
        &self.cfg
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn log_q(&self) -> f64 {
        self.log_q
    }

    pub fn r_bound(&self) -> f64 {
        self.r_bound
    }

    /// `log_q R`.
    pub fn abscissa(&self) -> f64 {
        self.r_bound.ln() / self.log_q
    }

    pub fn sum_matrix(&self) -> &DMatrix<Complex64> {
        &self.c
    }

    /// Nonzero eigenvalues of `C`.
    pub fn spectrum(&self) -> &[Complex64] {
        &self.spectrum
    }

    /// `x(0) = e v(0)`.
    pub fn x0(&self) -> Complex64 {
        self.rep.left().dot(&self.rep.v0().transpose())
    }

    /// `min_{μ ∈ σ(C)} |q^s − μ|`.
    pub fn pole_distance(&self, s: Complex64) -> f64 {
        let qs = (s * self.log_q).exp();
        self.spectrum.iter().map(|&mu| (qs - mu).norm()).fold(f64::INFINITY, f64::min)
    }

    fn ensure_table(&self, upto: usize) {
        if self.table.read().expect("table lock").len >= upto {
            return;
        }
        let mut t = self.table.write().expect("table lock");
        if t.len >= upto {
            return;
        }
        let d = self.rep.dim();
        let target = upto.max(2 * t.len).max(1024);
        t.values.resize(target * d, Complex64::new(0.0, 0.0));
        for n in t.len..target {
            let v: DVector<Complex64> = if n == 0 {
                self.rep.v0().clone()
            } else if n < self.q {
                self.rep.matrix(n) * self.rep.v0()
            } else {
                let parent = n / self.q;
                let pv = DVector::from_column_slice(&t.values[parent * d..(parent + 1) * d]);
                self.rep.matrix(n % self.q) * pv
            };
            if n > 0 && v.iter().any(|z| z.norm() > 0.0) {
                t.nonzero.push(n as u32);
            }
            t.values[n * d..(n + 1) * d].copy_from_slice(v.as_slice());
        }
        t.len = target;
    }

    /// Split point used for evaluation points of modulus up to `s_abs`.
    pub fn split_for(&self, s_abs: f64) -> usize {
        (SPLIT_FACTOR * (s_abs + 2.0 * self.depth as f64 + 2.0)).ceil() as usize
    }

    /// `Σ_{1≤n<m} n^{−s} v(n)`.
    pub fn prefix_sum(&self, s: Complex64, m: usize) -> DVector<Complex64> {
        self.ensure_table(m);
        let d = self.rep.dim();
        let t = self.table.read().expect("table lock");
        let end = t.nonzero.partition_point(|&n| (n as usize) < m);
        let mut acc = vec![Complex64::new(0.0, 0.0); d];
        for &n in &t.nonzero[..end] {
            let w = (-s * (n as f64).ln()).exp();
            let v = &t.values[n as usize * d..(n as usize + 1) * d];
            for (a, x) in acc.iter_mut().zip(v) {
                *a += w * x;
            }
        }
        DVector::from_vec(acc)
    }

    /// Scaled tail `T(s) = Σ_{n≥m} (n/m)^{−s} v(n)` by the shifted lattice recursion.
    pub fn scaled_tail(&self, s: Complex64, m: usize) -> Result<DVector<Complex64>> {
        if m == 0 {
            return Err(Error::InvalidArgument("split point must be positive".into()));
        }
        let depth = self.depth;
        let d = self.rep.dim();
        let hi = m * self.q;
        self.ensure_table(hi);
        // block sums F(s + j), j = 0..=depth
        let mut blocks = vec![Complex64::new(0.0, 0.0); (depth + 1) * d];
        {
            let t = self.table.read().expect("table lock");
            let a = t.nonzero.partition_point(|&n| (n as usize) < m);
            let b = t.nonzero.partition_point(|&n| (n as usize) < hi);
            let mf = m as f64;
            for &n in &t.nonzero[a..b] {
                let x = (n as f64 / mf).ln();
                let ratio = mf / n as f64;
                let mut w = (-s * x).exp();
                let v = &t.values[n as usize * d..(n as usize + 1) * d];
                for j in 0..=depth {
                    let blk = &mut blocks[j * d..(j + 1) * d];
                    for (acc, x) in blk.iter_mut().zip(v) {
                        *acc += w * x;
                    }
                    w *= ratio;
                }
            }
        }
        let qm = (self.q * m) as f64;
        let ident = DMatrix::<Complex64>::identity(d, d);
        let mut levels: Vec<DVector<Complex64>> = vec![DVector::zeros(d); depth + 1];
        for j in (0..=depth).rev() {
            let z = s + j as f64;
            let qz = (-z * self.log_q).exp();
            let kmax = depth - j;
            let binom = neg_binomials(z, kmax);
            let mut rhs = DVector::from_column_slice(&blocks[j * d..(j + 1) * d]);
            if kmax > 0 {
                let mut inner = DVector::<Complex64>::zeros(d);
                for r in 1..self.q {
                    let rho = r as f64 / qm;
                    let mut w = DVector::<Complex64>::zeros(d);
                    let mut pw = 1.0;
                    for k in 1..=kmax {
                        pw *= rho;
                        w.axpy(binom[k] * pw, &levels[j + k], Complex64::new(1.0, 0.0));
                    }
                    inner += self.rep.matrix(r) * w;
                }
                rhs.axpy(qz, &inner, Complex64::new(1.0, 0.0));
            }
            let system = &ident - &self.c * qz;
            let lu = system.clone().lu();
            let sol = lu
                .solve(&rhs)
                .ok_or_else(|| Error::NearPole(format!("I − q^(−s)C is singular at s = {z}")))?;
            if j == 0 {
                let resid = max_abs(&(&system * &sol - &rhs));
                let scale = 1.0 + max_abs(&rhs);
                if !(resid <= self.cfg.tolerance * scale) {
                    return Err(Error::Accuracy(format!(
                        "linear solve residual {resid:.3e} at s = {s}"
                    )));
                }
            }
            levels[j] = sol;
        }
        Ok(levels.swap_remove(0))
    }

    /// `𝒱(s)` with an explicit split point (no domain checks).
    pub fn eval_with_split(&self, s: Complex64, m: usize) -> Result<DVector<Complex64>> {
        let tail = self.scaled_tail(s, m)?;
        let scale = (-s * (m as f64).ln()).exp();
        Ok(self.prefix_sum(s, m) + tail * scale)
    }

    fn check_domain(&self, s: Complex64, offset: f64) -> Result<()> {
        let lo = self.abscissa() + offset + self.cfg.delta;
        if !(s.re >= lo - 1e-12) {
            return Err(Error::Domain(format!("Re s = {} is below {lo}", s.re)));
        }
        Ok(())
    }

    fn check_pole(&self, s: Complex64) -> Result<()> {
        let dist = self.pole_distance(s);
        if dist <= self.cfg.poles_tol {
            return Err(Error::NearPole(format!(
                "q^s is within {dist:.3e} of the spectrum at s = {s}"
            )));
        }
        Ok(())
    }

    /// Absolutely convergent regime `Re s ≥ log_q R + 1 + δ`.
    pub fn eval_direct(&self, s: Complex64) -> Result<DVector<Complex64>> {
        self.check_domain(s, 1.0)?;
        let m = 4 * self.split_for(s.norm());
        if m > self.cfg.max_split {
            return Err(Error::Accuracy(format!(
                "split point {m} exceeds the configured maximum {}",
                self.cfg.max_split
            )));
        }
        self.eval_with_split(s, m)
    }

    /// Continued regime `Re s ≥ log_q R + δ`, away from poles.
    pub fn eval_continued(&self, s: Complex64) -> Result<DVector<Complex64>> {
        self.check_domain(s, 0.0)?;
        self.check_pole(s)?;
        self.eval_with_split(s, self.split_for(s.norm()))
    }

    /// `𝒳(s)`, the first (designated) component `e 𝒱(s)`.
    pub fn eval_x(&self, s: Complex64) -> Result<Complex64> {
        let v = self.eval_continued(s)?;
        Ok(self.rep.left().dot(&v.transpose()))
    }

    /// `max |LHS − RHS|` of `(I − q^{−s}C)𝒱(s) = Σ_{n<q} n^{−s}v(n) + q^{−s} Σ_r A_r Σ_k binom(−s,k)(r/q)^k 𝒱(s+k)`,
    /// with the left side from the continued regime and each `𝒱(s+k)` from the direct regime.
    pub fn functional_equation_residual(&self, s: Complex64) -> Result<f64> {
        let v = self.eval_continued(s)?;
        let d = self.rep.dim();
        let qs = (-s * self.log_q).exp();
        let lhs = &v - (&self.c * &v) * qs;
        let mut rhs = DVector::<Complex64>::zeros(d);
        for n in 1..self.q {
            rhs += self.rep.matrix(n) * self.rep.v0() * (-s * (n as f64).ln()).exp();
        }
        let ratio = (self.q as f64 - 1.0) / self.q as f64;
        let mut inner = DVector::<Complex64>::zeros(d);
        let mut b = Complex64::new(1.0, 0.0);
        let mut small_run = 0;
        let mut k = 1;
        loop {
            b = b * (-s - (k - 1) as f64) / k as f64;
            let vk = self.eval_direct(s + k as f64)?;
            for r in 1..self.q {
                let coef = b * (r as f64 / self.q as f64).powi(k);
                inner += self.rep.matrix(r) * &vk * coef;
            }
            let bound = b.norm() * ratio.powi(k) * max_abs(&vk);
            if bound * qs.norm() < self.cfg.tolerance * 1e-2 {
                small_run += 1;
                if small_run >= 3 {
                    break;
                }
            } else {
                small_run = 0;
            }
            k += 1;
            if k > 4000 {
                return Err(Error::Accuracy(format!("binomial series did not settle at s = {s}")));
            }
        }
        rhs += inner * qs;
        Ok(max_abs(&(lhs - rhs)))
    }

    /// Plain partial sum `Σ_{1≤n<N0} n^{−s} v(n)` with a tail bound from
    /// `‖v(n)‖ ≤ C_v n^{log_q R + εR}`, `C_v` twice the largest observed ratio.
    pub fn partial_sum_with_bound(&self, s: Complex64, n0: usize) -> Result<(DVector<Complex64>, f64)> {
        if n0 < 2 {
            return Err(Error::InvalidArgument("N0 must be at least 2".into()));
        }
        let gamma = self.abscissa() + DEFAULT_R_EPSILON;
        let excess = s.re - gamma - 1.0;
        if !(excess > 0.0) {
            return Err(Error::Domain(format!("Re s = {} gives no absolute convergence", s.re)));
        }
        let sum = self.prefix_sum(s, n0);
        let d = self.rep.dim();
        let t = self.table.read().expect("table lock");
        let mut cv: f64 = 0.0;
        for n in 1..n0 {
            let norm = t.values[n * d..(n + 1) * d].iter().map(|z| z.norm()).fold(0.0, f64::max);
            cv = cv.max(norm / (n as f64).powf(gamma));
        }
        let cv = 2.0 * cv;
        let n0f = n0 as f64;
        // Σ_{n≥N0} n^{−(1+excess)} ≤ N0^{−(1+excess)} + N0^{−excess}/excess
        let bound = cv * (n0f.powf(-(1.0 + excess)) + n0f.powf(-excess) / excess);
        Ok((sum, bound))
    }
}

/// `R` from products of length up to 8 (capped at 4096 enumerations) plus `εR`.
pub fn default_r_bound(rep: &Rep) -> Result<f64> {
    let q = rep.q();
    let mut len = 1;
    while len < 8 && (q as u128).pow(len as u32 + 1) <= 4096 {
        len += 1;
    }
    Ok(jsr_bounds(rep.matrices(), len, MatrixNorm::RowSum)?.r_bound())
}
