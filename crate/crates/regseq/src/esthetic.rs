//! q-esthetic numbers: adjacent digits differ by exactly one.

use nalgebra::{DMatrix, DVector, RowDVector};
use num_complex::Complex64;

use crate::dirichlet::{DirichletConfig, DirichletEvaluator};
use crate::error::{Error, Result};
use crate::fourier::{AsymptoticExpansion, ExpansionTerm, ResidueConfig, SummatoryIntegrand};
use crate::linrep::{digits, LinearRepresentation};
use crate::spectral::{eigen_data, DEFAULT_R_EPSILON};
use crate::symmetry::combined_series;

/// Representation built from the automaton with states `0, …, q−1` and the initial state `I`.
///
/// The empty word is accepted, so `x(0) = 1` while [`is_esthetic`] rejects 0.
#[derive(Debug, Clone, PartialEq)]
pub struct EstheticRep {
    q: usize,
    rep: LinearRepresentation<i64>,
}

impl EstheticRep {
    pub fn new(q: usize) -> Result<Self> {
        if q < 2 {
            return Err(Error::InvalidArgument(format!("base q must be at least 2, got {q}")));
        }
        let d = q + 1;
        let initial = q;
        let matrices = (0..q)
            .map(|r| {
                let mut a = DMatrix::zeros(d, d);
                if r > 0 {
                    a[(r - 1, r)] = 1;
                }
                if r + 1 < q {
                    a[(r + 1, r)] = 1;
                }
                a[(initial, r)] = 1;
                a
            })
            .collect();
        let mut left = RowDVector::zeros(d);
        left[initial] = 1;
        let mut v0 = DVector::from_element(d, 1);
        v0[0] = 0;
        let rep = LinearRepresentation::new(q, matrices, left, v0)?;
        Ok(Self { q, rep })
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn representation(&self) -> &LinearRepresentation<i64> {
        &self.rep
    }

    pub fn into_representation(self) -> LinearRepresentation<i64> {
        self.rep
    }

    /// The `q × q` transfer matrix `M` of the digit states (upper-left block of `C`).
    pub fn transfer_matrix(&self) -> DMatrix<i64> {
        DMatrix::from_fn(self.q, self.q, |i, j| i64::from(i.abs_diff(j) == 1))
    }
}

/// Digit test on the canonical expansion; `n = 0` is rejected.
pub fn is_esthetic(n: u128, q: u64) -> Result<bool> {
    if n == 0 {
        return Err(Error::InvalidArgument(
            "0 has an empty digit expansion; esthetic membership is a convention".into(),
        ));
    }
    let ds = digits(n, q)?;
    Ok(ds.digits().windows(2).all(|w| w[0].abs_diff(w[1]) == 1))
}

/// Whether 0 is counted as esthetic.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ZeroConvention {
    /// Digit definition: 0 is not esthetic.
    Digits,
    /// Automaton: the empty word is accepted, so 0 counts.
    Automaton,
}

/// Number of esthetic `n < N` under the given convention, by direct digit checks.
pub fn count_below(n_upper: u128, q: u64, convention: ZeroConvention) -> Result<u128> {
    let mut count = u128::from(convention == ZeroConvention::Automaton && n_upper > 0);
    for n in 1..n_upper {
        count += u128::from(is_esthetic(n, q)?);
    }
    Ok(count)
}

/// Esthetic numbers with exactly `len` digits: `Σ_{i ≥ 1} (M^{len−1} 1)_i`.
pub fn count_by_length(q: usize, len: usize) -> Result<u128> {
    if q < 2 {
        return Err(Error::InvalidArgument(format!("base q must be at least 2, got {q}")));
    }
    if len == 0 {
        return Err(Error::InvalidArgument("length must be at least 1".into()));
    }
    let overflow = || Error::ResourceLimit(format!("count for length {len} overflows u128"));
    let mut ends = vec![1u128; q];
    for _ in 1..len {
        let mut next = vec![0u128; q];
        for (i, slot) in next.iter_mut().enumerate() {
            let lo = if i > 0 { ends[i - 1] } else { 0 };
            let hi = if i + 1 < q { ends[i + 1] } else { 0 };
            *slot = lo.checked_add(hi).ok_or_else(overflow)?;
        }
        ends = next;
    }
    ends[1..].iter().try_fold(0u128, |acc, &x| acc.checked_add(x).ok_or_else(overflow))
}

/// `2 cos(jπ/(q+1))` for `j = 1, …, q`.
pub fn transfer_eigenvalue(q: usize, j: usize) -> f64 {
    2.0 * (j as f64 * std::f64::consts::PI / (q as f64 + 1.0)).cos()
}

/// `p_q(x)` with `p_0 = 1`, `p_1 = x`, `p_ℓ = x p_{ℓ−1} − p_{ℓ−2}`: the characteristic
/// polynomial of the transfer matrix.
pub fn chebyshev_p(q: usize, x: f64) -> f64 {
    let (mut a, mut b) = (1.0, x);
    if q == 0 {
        return a;
    }
    for _ in 1..q {
        let c = x * b - a;
        a = b;
        b = c;
    }
    b
}

/// Spectrum of `C`: `2cos(jπ/(q+1))` for `j = 1, …, q`, followed by 0.
pub fn esthetic_eigenvalues(q: usize) -> Result<Vec<f64>> {
    if q < 2 {
        return Err(Error::InvalidArgument(format!("base q must be at least 2, got {q}")));
    }
    let mut out: Vec<f64> = (1..=q).map(|j| transfer_eigenvalue(q, j)).collect();
    for &x in &out {
        let r = chebyshev_p(q, x);
        if r.abs() > 1e-9 {
            return Err(Error::Accuracy(format!("p_{q}({x}) = {r} is not a root")));
        }
    }
    out.push(0.0);
    Ok(out)
}

/// Number of eigenvalues exceeding 1: `⌈(q−2)/3⌉`.
pub fn dominant_count(q: usize) -> usize {
    (q.saturating_sub(2)).div_ceil(3)
}

/// `[q ≡ −1 (mod 3)]`: the eigenvalue 1 is present and the error term carries one log factor.
pub fn error_log_power(q: usize) -> usize {
    usize::from(q % 3 == 2)
}

/// Which Fourier coefficients of a 2-periodic fluctuation vanish.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    /// Odd coefficients vanish: the fluctuation is 1-periodic.
    OddVanish,
    /// Even coefficients vanish: `Φ(u + 1) = −Φ(u)`.
    EvenVanish,
    Mixed,
}

impl Parity {
    pub fn of(series: &crate::fourier::FluctuationSeries, threshold: f64) -> Self {
        let max_of = |odd: bool| {
            series
                .iter()
                .filter(|(l, _)| (l.rem_euclid(2) == 1) == odd)
                .map(|(_, c)| c.norm())
                .fold(0.0, f64::max)
        };
        if max_of(true) <= threshold {
            Parity::OddVanish
        } else if max_of(false) <= threshold {
            Parity::EvenVanish
        } else {
            Parity::Mixed
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Parity::OddVanish => "odd-vanish",
            Parity::EvenVanish => "even-vanish",
            Parity::Mixed => "mixed",
        }
    }
}

/// Threshold below which combined coefficients count as vanishing.
pub const PARITY_THRESHOLD: f64 = 1e-6;

/// Main terms `N^{log_q λ_j} Φ_{qj}(log_q N mod 2)` for `j ≤ ⌈(q−2)/3⌉`.
#[derive(Debug, Clone)]
pub struct EstheticAnalysis {
    pub q: usize,
    /// Terms of period 2, one per `j`, with `λ = 2cos(jπ/(q+1))`.
    pub expansion: AsymptoticExpansion,
    pub indices: Vec<usize>,
    pub parities: Vec<Parity>,
    /// Largest Jordan block over eigenvalues on `|λ| = R`.
    pub error_log_power: usize,
    /// Every term has vanishing odd coefficients.
    pub one_periodic: bool,
    /// `q = 2`: no main term, `X(N) = O(log N)`.
    pub log_growth: bool,
    pub delta: f64,
}

/// Evaluator for the esthetic representation with `R = 1 + εR` and `δ` small enough that every
/// dominant pole lies inside the continuation strip.
pub fn esthetic_evaluator(q: usize) -> Result<DirichletEvaluator> {
    let rep = EstheticRep::new(q)?.representation().to_complex();
    let r = 1.0 + DEFAULT_R_EPSILON;
    let log_q = (q as f64).ln();
    let count = dominant_count(q);
    let delta = if count == 0 {
        0.25
    } else {
        let smallest = transfer_eigenvalue(q, count);
        (0.5 * (smallest / r).ln() / log_q).min(0.25)
    };
    DirichletEvaluator::new(&rep, DirichletConfig { r_bound: Some(r), delta, ..Default::default() })
}

/// Main-term fluctuations with Fourier coefficients `|ℓ| ≤ degree`.
pub fn asymptotic_analysis(q: usize, degree: usize, cfg: &ResidueConfig) -> Result<EstheticAnalysis> {
    if q < 2 {
        return Err(Error::InvalidArgument(format!("base q must be at least 2, got {q}")));
    }
    let ev = esthetic_evaluator(q)?;
    let spectral = eigen_data(ev.sum_matrix(), None)?;
    let log_power = crate::fourier::error_log_power(&spectral, ev.r_bound());
    let f = SummatoryIntegrand { ev: &ev };
    let mut terms = Vec::new();
    let mut parities = Vec::new();
    let indices: Vec<usize> = (1..=dominant_count(q)).collect();
    for &j in &indices {
        let lambda = Complex64::new(transfer_eigenvalue(q, j), 0.0);
        let series = combined_series(&f, lambda, 2, 0, degree, true, cfg)?;
        parities.push(Parity::of(&series, PARITY_THRESHOLD));
        terms.push(ExpansionTerm { lambda, k: 0, series });
    }
    let one_periodic = parities.iter().all(|&p| p == Parity::OddVanish);
    Ok(EstheticAnalysis {
        q,
        expansion: AsymptoticExpansion {
            q,
            terms,
            error_exponent: ev.abscissa(),
            error_log_power: log_power,
        },
        indices,
        parities,
        error_log_power: log_power,
        one_periodic,
        log_growth: q == 2,
        delta: ev.config().delta,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_is_esthetic(n: u128, q: u128) -> bool {
        let mut ds = Vec::new();
        let mut m = n;
        while m > 0 {
            ds.push(m % q);
            m /= q;
        }
        ds.windows(2).all(|w| w[0].abs_diff(w[1]) == 1)
    }

    #[test]
    fn q4_matrices_match_displayed_ones() {
        let e = EstheticRep::new(4).unwrap();
        let rep = e.representation();
        let expect: [[i64; 25]; 4] = [
            [0, 0, 0, 0, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1, 0, 0, 0, 0],
            [0, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1, 0, 0, 0],
            [0, 0, 0, 0, 0, 0, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1, 0, 0],
            [0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1, 0],
        ];
        for (r, e) in expect.iter().enumerate() {
            assert_eq!(rep.matrix(r), &DMatrix::from_row_slice(5, 5, e), "A_{r}");
        }
        let c = rep.sum_matrix();
        let rows = [0, 1, 0, 0, 0, 1, 0, 1, 0, 0, 0, 1, 0, 1, 0, 0, 0, 1, 0, 0, 1, 1, 1, 1, 0];
        assert_eq!(c, DMatrix::from_row_slice(5, 5, &rows));
        assert_eq!(rep.left(), &RowDVector::from_row_slice(&[0, 0, 0, 0, 1]));
        assert_eq!(rep.v0(), &DVector::from_column_slice(&[0, 1, 1, 1, 1]));
    }

    #[test]
    fn q2_shape() {
        let e = EstheticRep::new(2).unwrap();
        let a0 = e.representation().matrix(0);
        assert_eq!(a0.column(0).iter().cloned().collect::<Vec<_>>(), vec![0, 1, 1]);
        assert_eq!(a0.column(1).iter().cloned().collect::<Vec<_>>(), vec![0, 0, 0]);
        assert!(matches!(EstheticRep::new(1), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn block_form_of_c() {
        for q in 2..=12 {
            let e = EstheticRep::new(q).unwrap();
            let c = e.representation().sum_matrix();
            assert!(c.column(q).iter().all(|&x| x == 0));
            assert!(c.row(q).columns(0, q).iter().all(|&x| x == 1));
            assert_eq!(c.view((0, 0), (q, q)), e.transfer_matrix());
        }
    }

    #[test]
    fn evaluate_examples() {
        let rep = EstheticRep::new(4).unwrap().into_representation();
        assert_eq!(rep.evaluate(27), 1);
        assert_eq!(rep.evaluate(5), 0);
        assert_eq!(rep.evaluate(0), 1);
        let mut v = rep.vector_sequence(2).iter().cloned().collect::<Vec<_>>();
        assert_eq!(v, vec![0, 1, 0, 1, 1]);
        v = rep.vector_sequence(0).iter().cloned().collect();
        assert_eq!(v, vec![0, 1, 1, 1, 1]);
        assert_eq!(rep.summatory_brute(4).unwrap(), 4);
        assert_eq!(rep.summatory_fast(4), 4);
    }

    #[test]
    fn membership_examples() {
        assert!(is_esthetic(27, 4).unwrap());
        assert!(!is_esthetic(11, 2).unwrap());
        assert!(is_esthetic(10, 10).unwrap());
        assert!(is_esthetic(7, 10).unwrap());
        assert!(is_esthetic(0, 10).is_err());
        let lichtenberg: Vec<u128> = (1..128).filter(|&n| is_esthetic(n, 2).unwrap()).collect();
        assert_eq!(lichtenberg, vec![1, 2, 5, 10, 21, 42, 85]);
    }

    #[test]
    fn representation_matches_digit_check() {
        for q in [2u64, 3, 4, 5, 10] {
            let rep = EstheticRep::new(q as usize).unwrap().into_representation();
            for n in 1..20_000u128 {
                assert_eq!(rep.evaluate(n) == 1, brute_is_esthetic(n, q as u128), "q={q} n={n}");
            }
        }
    }

    #[test]
    fn counts_by_length() {
        assert_eq!(count_by_length(10, 1).unwrap(), 9);
        assert_eq!(count_by_length(10, 2).unwrap(), 17);
        assert_eq!(count_by_length(2, 5).unwrap(), 1);
        for q in [2usize, 3, 4, 5] {
            let qq = q as u128;
            for len in 1..=6u32 {
                let lo = if len == 1 { 1 } else { qq.pow(len - 1) };
                let brute = (lo..qq.pow(len)).filter(|&n| brute_is_esthetic(n, qq)).count() as u128;
                assert_eq!(count_by_length(q, len as usize).unwrap(), brute, "q={q} len={len}");
            }
        }
    }

    #[test]
    fn eigenvalue_formula() {
        let s = 5f64.sqrt();
        let mut e4 = esthetic_eigenvalues(4).unwrap();
        e4.sort_by(f64::total_cmp);
        let expect = [-(s + 1.0) / 2.0, -(s - 1.0) / 2.0, 0.0, (s - 1.0) / 2.0, (s + 1.0) / 2.0];
        for (a, b) in e4.iter().zip(expect) {
            assert!((a - b).abs() < 1e-12);
        }
        let e2 = esthetic_eigenvalues(2).unwrap();
        for (a, b) in e2.iter().zip([1.0, -1.0, 0.0]) {
            assert!((a - b).abs() < 1e-12);
        }
        let e3 = esthetic_eigenvalues(3).unwrap();
        for (a, b) in e3.iter().zip([2f64.sqrt(), 0.0, -(2f64.sqrt()), 0.0]) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn dominant_and_error_power() {
        for q in 3..=12 {
            let brute = (1..=q).filter(|&j| transfer_eigenvalue(q, j) > 1.0 + 1e-12).count();
            assert_eq!(dominant_count(q), brute, "q={q}");
            let has_one = (1..=q).any(|j| (transfer_eigenvalue(q, j) - 1.0).abs() < 1e-12);
            assert_eq!(error_log_power(q) == 1, has_one, "q={q}");
        }
        assert_eq!(error_log_power(5), 1);
        assert_eq!(error_log_power(8), 1);
    }

    #[test]
    fn spectrum_matches_eigen_data() {
        for q in 2..=12 {
            let rep = EstheticRep::new(q).unwrap().representation().to_complex();
            let summary = eigen_data(&rep.sum_matrix(), None).unwrap();
            let mut want = esthetic_eigenvalues(q).unwrap();
            let mut got: Vec<f64> = Vec::new();
            for e in &summary.eigenvalues {
                assert!(e.lambda.im.abs() < 1e-8, "q={q}");
                if e.lambda.norm() > 1e-9 {
                    assert_eq!(e.max_jordan, 1, "q={q} λ={}", e.lambda);
                }
                got.extend(std::iter::repeat_n(e.lambda.re, e.alg_mult));
            }
            want.sort_by(f64::total_cmp);
            got.sort_by(f64::total_cmp);
            assert_eq!(want.len(), got.len(), "q={q}");
            for (a, b) in want.iter().zip(&got) {
                assert!((a - b).abs() < 1e-8, "q={q}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn jsr_is_one() {
        use crate::spectral::{jsr_bounds, MatrixNorm};
        for q in [2, 3, 4, 5, 7] {
            let rep = EstheticRep::new(q).unwrap().representation().to_complex();
            let one = jsr_bounds(rep.matrices(), 1, MatrixNorm::RowSum).unwrap();
            assert!((one.upper - 1.0).abs() < 1e-12, "q={q}: {}", one.upper);
            let two = jsr_bounds(rep.matrices(), 3, MatrixNorm::RowSum).unwrap();
            assert!((two.lower - 1.0).abs() < 1e-12, "q={q}: {}", two.lower);
            assert!(two.lower <= two.upper);
        }
    }

    #[test]
    fn squared_base_representation_agrees() {
        let rep = EstheticRep::new(4).unwrap().into_representation();
        let sq = rep.power(2).unwrap();
        for n in 0..10_000u128 {
            assert_eq!(sq.evaluate(n), rep.evaluate(n), "n={n}");
        }
    }

    #[test]
    fn fast_sum_counts_members() {
        for q in [2u64, 3, 4, 5, 10] {
            let rep = EstheticRep::new(q as usize).unwrap().into_representation();
            for n in [1u128, 2, 17, 100, 1000, 4097] {
                let want = count_below(n, q, ZeroConvention::Automaton).unwrap();
                assert_eq!(rep.summatory_fast(n), want as i64, "q={q} N={n}");
            }
        }
    }

    #[test]
    fn main_term_count() {
        let cfg = ResidueConfig::default();
        for q in 3..=12 {
            let a = asymptotic_analysis(q, 2, &cfg).unwrap();
            assert_eq!(a.expansion.terms.len(), q.saturating_sub(2).div_ceil(3), "q={q}");
            assert_eq!(a.error_log_power, usize::from(q % 3 == 2), "q={q}");
        }
    }

    #[test]
    fn q4_fluctuation_is_one_periodic() {
        let a = asymptotic_analysis(4, 10, &ResidueConfig::default()).unwrap();
        assert_eq!(a.parities, vec![Parity::OddVanish]);
        assert!(a.one_periodic);
        let s = &a.expansion.terms[0].series;
        for u in [0.1, 0.45, 0.8] {
            assert!((s.eval(u) - s.eval(u + 1.0)).norm() < 1e-6);
            assert!((s.eval(u) - s.eval(u + 2.0)).norm() < 1e-12);
        }
    }
}
