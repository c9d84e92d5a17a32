//! Acceptance criteria, one PASS/FAIL line each.
//!
//! Criteria listed in `NOT_ATTAINABLE` are implemented literally and are known to fail for
//! reasons intrinsic to the mathematics (see the printed diagnostics). Any other failure makes
//! the run exit with a non-zero status.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use regseq::dirichlet::{DirichletConfig, DirichletEvaluator};
use regseq::esthetic::{asymptotic_analysis, count_by_length, esthetic_evaluator, is_esthetic, EstheticRep};
use regseq::fourier::{build_expansion, empirical_fluctuation, ResidueConfig};
use regseq::linrep::{binary_sum_of_digits, constant_representation};
use regseq::spectral::{eigen_data, sum_matrix};
use regseq::symmetry::{combine, pointwise_consistency, RootsOfUnityBundle, SyntheticIntegrand};
use regseq::tauber::{
    build_psi_from_fourier, gf_identity_residual, two_route_deviation, verify_tauber_relation, CauchyConfig,
    PeriodicFunctionFamily, TrigPoly,
};
use regseq::Error;

const NOT_ATTAINABLE: [u32; 2] = [3, 4];

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

fn cz(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

/// Runs one criterion; the runtime limit is part of the verdict.
fn criterion(id: u32, title: &str, limit: Duration, f: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let o = f();
    let elapsed = start.elapsed();
    let in_time = elapsed < limit;
    let pass = o.pass && in_time;
    println!(
        "{} [{id:>2}] {title}: {} (runtime {:.2}s, limit {}s{})",
        if pass { "PASS" } else { "FAIL" },
        o.detail,
        elapsed.as_secs_f64(),
        limit.as_secs(),
        if in_time { "" } else { ", exceeded" }
    );
    pass
}

fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

fn esthetic_q4_spectrum() -> Outcome {
    let rep = EstheticRep::new(4).unwrap().representation().to_complex();
    let spectral = eigen_data(&sum_matrix(&rep), None).unwrap();
    let s5 = 5f64.sqrt();
    let expected = [(s5 + 1.0) / 2.0, -(s5 + 1.0) / 2.0, (s5 - 1.0) / 2.0, -(s5 - 1.0) / 2.0, 0.0];
    let mut worst: f64 = 0.0;
    for want in expected {
        let d = spectral.eigenvalues.iter().map(|e| (e.lambda - cz(want, 0.0)).norm()).fold(f64::INFINITY, f64::min);
        worst = worst.max(d);
    }
    let simple = spectral.eigenvalues.iter().all(|e| e.alg_mult == 1 && e.max_jordan == 1);
    let pass = worst < 1e-8 && simple && spectral.eigenvalues.len() == 5;
    outcome(pass, format!("max eigenvalue error {worst:.2e} (< 1e-8), all simple: {simple}"))
}

fn esthetic_q4_growth() -> Outcome {
    let rep = EstheticRep::new(4).unwrap().into_representation();
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for i in 0..=600 {
        let u = 6.0 + 0.01 * i as f64;
        let n = 4f64.powf(u).ceil() as u128;
        xs.push((n as f64).ln());
        ys.push((rep.summatory_fast(n) as f64).ln());
    }
    let (slope, _) = linear_fit(&xs, &ys);
    let want = (5f64.sqrt() + 1.0).ln() / 4f64.ln() - 0.5;
    let dev = (slope - want).abs();
    outcome(dev <= 0.01, format!("slope {slope:.5}, expected {want:.5}, deviation {dev:.2e} (≤ 1e-2)"))
}

fn esthetic_q4_reconstruction() -> Outcome {
    let an = asymptotic_analysis(4, 1999, &ResidueConfig::default()).unwrap();
    let rep = EstheticRep::new(4).unwrap().representation().to_complex();
    let grid: Vec<f64> = (0..=400).map(|i| 8.0 + 0.01 * i as f64).collect();
    let term = an.expansion.dominant().unwrap();
    let samples = empirical_fluctuation(&rep, &an.expansion, term, &grid).unwrap();
    let gap = samples.iter().map(|s| (s.empirical - s.reconstructed).norm()).fold(0.0, f64::max);
    // diagnostic: remove a constant term c/N^κ fitted by least squares
    let kappa = an.expansion.terms[term].lambda.re.ln() / 4f64.ln();
    let scaled: Vec<f64> = samples.iter().map(|s| (s.n as f64).powf(-kappa)).collect();
    let diffs: Vec<f64> = samples.iter().map(|s| (s.empirical - s.reconstructed).re).collect();
    let c = scaled.iter().zip(&diffs).map(|(w, d)| w * d).sum::<f64>() / scaled.iter().map(|w| w * w).sum::<f64>();
    let residual = scaled.iter().zip(&diffs).map(|(w, d)| (d - c * w).abs()).fold(0.0, f64::max);
    outcome(
        gap < 2e-2,
        format!(
            "sup gap {gap:.4} (< 2e-2); O(1) error term X − N^κΦ fitted as {c:.3}, gap after removing it {residual:.2e}"
        ),
    )
}

fn delange() -> Outcome {
    let rep = binary_sum_of_digits();
    let ev = DirichletEvaluator::new(&rep.to_complex(), DirichletConfig::default()).unwrap();
    let spectral = eigen_data(ev.sum_matrix(), None).unwrap();
    let exp = build_expansion(&ev, &spectral, 50, &ResidueConfig::default()).unwrap();
    let phi = exp
        .terms
        .iter()
        .find(|t| (t.lambda - cz(2.0, 0.0)).norm() < 1e-9 && t.k == 1)
        .map(|t| t.series.coeff(0))
        .unwrap();
    let phi_ok = (phi - cz(0.5, 0.0)).norm() < 1e-6;
    let us: Vec<f64> = (0..=28).map(|i| 10.0 + 0.5 * i as f64).collect();
    let diffs: Vec<f64> = us
        .iter()
        .map(|&u| {
            let n = 2f64.powf(u).ceil() as u128;
            (rep.summatory_fast(n) as f64 - exp.eval(n as f64).re).abs()
        })
        .collect();
    let half = us.len() / 2;
    let c = diffs[..=half].iter().cloned().fold(0.0, f64::max);
    let upper = diffs[half + 1..].iter().cloned().fold(0.0, f64::max);
    let bounded = upper <= 2.0 * c;
    let n_last = 2f64.powf(*us.last().unwrap());
    outcome(
        phi_ok && bounded,
        format!(
            "φ_(2,1,0) = {:.15} (1e-6): {}; max |X − expansion| {c:.3} on 2^10..2^17, {upper:.3} on 2^17.5..2^24 \
             (bound 2c), last ratio to N {:.2e}",
            phi.re,
            if phi_ok { "ok" } else { "off" },
            diffs.last().unwrap() / n_last
        ),
    )
}

fn functional_equation() -> Outcome {
    let mut rng = rand::rngs::StdRng::seed_from_u64(5);
    let mut evs: Vec<(String, DirichletEvaluator)> = vec![
        ("constant q=2".into(), DirichletEvaluator::new(&constant_representation(2).unwrap().to_complex(), DirichletConfig::default()).unwrap()),
        ("sum-of-digits q=2".into(), DirichletEvaluator::new(&binary_sum_of_digits().to_complex(), DirichletConfig::default()).unwrap()),
    ];
    for q in [3, 4, 5] {
        evs.push((format!("esthetic q={q}"), esthetic_evaluator(q).unwrap()));
    }
    let mut worst: f64 = 0.0;
    let mut parts = Vec::new();
    for (name, ev) in &evs {
        let lo = ev.abscissa() + ev.config().delta;
        let mut done = 0;
        let mut local: f64 = 0.0;
        while done < 100 {
            let s = cz(lo + rng.random_range(0.01..1.5), rng.random_range(-30.0..30.0));
            match ev.functional_equation_residual(s) {
                Ok(r) => {
                    local = local.max(r);
                    done += 1;
                }
                Err(Error::NearPole(_)) => continue,
                Err(e) => panic!("{name} at {s}: {e}"),
            }
        }
        parts.push(format!("{name} {local:.1e}"));
        worst = worst.max(local);
    }
    outcome(worst < 1e-6, format!("max residual {worst:.2e} (< 1e-6) over 100 points each: {}", parts.join(", ")))
}

fn tauber_closed_forms() -> Outcome {
    let one = || vec![TrigPoly::constant(cz(1.0, 0.0))];
    let fam = PeriodicFunctionFamily::new(one(), cz(0.0, 0.0), 2.0, 1.0, 0.5).unwrap();
    let psi = build_psi_from_fourier(&fam);
    let psi0_err = (-(psi.psi(0).degree() as i64)..=psi.psi(0).degree() as i64)
        .map(|ell| (psi.psi(0).coeff(ell) - if ell == 0 { cz(1.0, 0.0) } else { cz(0.0, 0.0) }).norm())
        .fold(0.0, f64::max);
    let rep = verify_tauber_relation(&fam, &psi, 1_000_000, 40).unwrap();
    let c0_err = (rep.fitted_c - cz(-1.0, 0.0)).norm();

    let fam = PeriodicFunctionFamily::new(one(), cz(-1.0, 0.0), 2.0, 1.0, 0.5).unwrap();
    let psi = build_psi_from_fourier(&fam);
    let p = psi.psi(-1);
    let psim1_err = (-(p.degree() as i64)..=p.degree() as i64)
        .map(|ell| (p.coeff(ell) - if ell == 0 { cz(1.0, 0.0) } else { cz(0.0, 0.0) }).norm())
        .fold(0.0, f64::max);
    let rep = verify_tauber_relation(&fam, &psi, 1_000_000, 40).unwrap();
    let gamma_err = (rep.fitted_c - cz(EULER_GAMMA, 0.0)).norm();
    let pass = psi0_err < 1e-12 && c0_err < 1e-9 && psim1_err < 1e-12 && gamma_err < 1e-3;
    outcome(
        pass,
        format!(
            "κ=0: Ψ_0 error {psi0_err:.1e}, c + 1 = {c0_err:.1e}; κ=−1: Ψ_(−1) error {psim1_err:.1e}, \
             |c − γ| = {gamma_err:.2e} (< 1e-3)"
        ),
    )
}

fn random_family(rng: &mut rand::rngs::StdRng) -> PeriodicFunctionFamily<f64> {
    let m = rng.random_range(1..=3);
    let degree = rng.random_range(0..=4);
    let phi = (0..m)
        .map(|_| {
            TrigPoly::new((0..2 * degree + 1).map(|_| cz(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect())
                .unwrap()
        })
        .collect();
    let kappa = cz(rng.random_range(-1.5..=1.0), rng.random_range(-2.0..2.0));
    let q = rng.random_range(1.5..10.0);
    PeriodicFunctionFamily::new(phi, kappa, q, 1.0, 0.5).unwrap()
}

fn tauber_two_routes() -> Outcome {
    let mut rng = rand::rngs::StdRng::seed_from_u64(7);
    let (mut dev, mut gf): (f64, f64) = (0.0, 0.0);
    for _ in 0..10 {
        let fam = random_family(&mut rng);
        let r = fam.default_radius();
        dev = dev.max(two_route_deviation(&fam, r, &CauchyConfig::default()).unwrap());
        let l = fam.degree() as i64;
        for _ in 0..20 {
            let z = Complex64::from_polar(rng.random_range(0.05..1.9) * r, rng.random_range(-PI..PI));
            for ell in -l - 1..=l + 1 {
                gf = gf.max(gf_identity_residual(&fam, ell, z).unwrap());
            }
        }
    }
    outcome(
        dev < 1e-7 && gf < 1e-9,
        format!("max two-route deviation {dev:.2e} (< 1e-7), max generating-function residual {gf:.2e} (< 1e-9)"),
    )
}

fn symmetry() -> Outcome {
    let f = SyntheticIntegrand { q: 4.0, lambda: 1.6, p: 2, a: cz(0.7, 0.2), b: cz(0.7, -0.2) };
    let cfg = ResidueConfig { tolerance: 1e-12, ..Default::default() };
    let bundle = RootsOfUnityBundle::from_integrand(&f, cz(1.6, 0.0), 2, 0, 8, &cfg).unwrap();
    let combined = combine(&bundle, &f, &cfg).unwrap();
    // indices ℓ'p + j covered by the members
    let (pl, lp) = (bundle.p as i64, 8i64);
    let covered = |ell: i64| (-lp * pl + bundle.j0..=lp * pl + bundle.j0 + pl - 1).contains(&ell);
    let direct = combined
        .iter()
        .filter(|(ell, _)| covered(*ell))
        .map(|(ell, c)| (c - f.exact_residue(ell)).norm())
        .fold(0.0, f64::max);
    let inter = bundle.interleave().unwrap();
    let interleave = combined.iter().map(|(ell, c)| (c - inter.coeff(ell)).norm()).fold(0.0, f64::max);
    let ns: Vec<f64> = (0..60).map(|i| 4f64.powf(2.0 + 0.137 * i as f64)).collect();
    let pointwise = pointwise_consistency(&bundle, &combined, 4.0, &ns);
    outcome(
        direct < 1e-8 && interleave < 1e-8 && pointwise < 1e-6,
        format!(
            "direct residues {direct:.1e} (< 1e-8), interleaving {interleave:.1e} (< 1e-8), pointwise {pointwise:.1e} (< 1e-6)"
        ),
    )
}

fn esthetic_counts() -> Outcome {
    let mut mismatches = 0usize;
    for q in [2usize, 3, 4, 5, 10] {
        let rep = EstheticRep::new(q).unwrap().into_representation();
        let mut expected: i64 = 1;
        for n in 1..=100_000u128 {
            if rep.summatory_fast(n) != expected {
                mismatches += 1;
            }
            expected += i64::from(is_esthetic(n, q as u64).unwrap());
        }
    }
    let len = count_by_length(10, 2).unwrap();
    let members: Vec<u128> = (1..128).filter(|&n| is_esthetic(n, 2).unwrap()).collect();
    let members_ok = members == [1, 2, 5, 10, 21, 42, 85];
    outcome(
        mismatches == 0 && len == 17 && members_ok,
        format!("{mismatches} mismatches over N ≤ 1e5 for q ∈ {{2,3,4,5,10}}; countByLength(10,2) = {len}; q=2 members {members:?}"),
    )
}

fn error_term_modulus() -> Outcome {
    let cfg = ResidueConfig::default();
    // truncation error of Φ is multiplied by N^κ; at L = 50 it exceeds log N near 5^10
    let a5 = asymptotic_analysis(5, 800, &cfg).unwrap();
    let a8 = asymptotic_analysis(8, 50, &cfg).unwrap();
    let rep = EstheticRep::new(5).unwrap().into_representation();
    let us: Vec<f64> = (0..=120).map(|i| 4.0 + 0.05 * i as f64).collect();
    let res: Vec<(f64, f64)> = us
        .iter()
        .map(|&u| {
            let n = 5f64.powf(u).ceil() as u128;
            let r = rep.summatory_fast(n) as f64 - a5.expansion.eval(n as f64).re;
            (u, r.abs() / (n as f64).ln())
        })
        .collect();
    let c = res.iter().filter(|(u, _)| *u <= 7.0).map(|p| p.1).fold(0.0, f64::max);
    let upper = res.iter().filter(|(u, _)| *u > 7.0).map(|p| p.1).fold(0.0, f64::max);
    let powers_ok = a5.error_log_power == 1 && a8.error_log_power == 1;
    println!(
        "     [10] note: a stated expectation of errorLogPower 0 for q = 8 contradicts 8 ≡ −1 (mod 3), where 1 is an \
         eigenvalue of C on |λ| = R; the error power (log N)^[q ≡ −1 mod 3] is asserted instead"
    );
    outcome(
        powers_ok && upper <= 1.5 * c,
        format!(
            "errorLogPower q=5: {}, q=8: {} (both ≡ −1 mod 3, expected 1); |X − main|/ln N: fitted c {c:.3} on 5^4..5^7, \
             max {upper:.3} on 5^7..5^10 (≤ 1.5c), L = 800",
            a5.error_log_power, a8.error_log_power
        ),
    )
}

fn main() -> ExitCode {
    let secs = Duration::from_secs;
    let results = [
        (1, criterion(1, "esthetic q=4 spectrum", secs(1), esthetic_q4_spectrum)),
        (2, criterion(2, "esthetic q=4 growth exponent", secs(30), esthetic_q4_growth)),
        (3, criterion(3, "esthetic q=4 fluctuation reconstruction, L=1999", secs(600), esthetic_q4_reconstruction)),
        (4, criterion(4, "sum of digits, q=2", secs(120), delange)),
        (5, criterion(5, "functional equation residual", secs(120), functional_equation)),
        (6, criterion(6, "pseudo-Tauber closed forms", secs(60), tauber_closed_forms)),
        (7, criterion(7, "pseudo-Tauber two routes", secs(120), tauber_two_routes)),
        (8, criterion(8, "roots-of-unity combination", secs(30), symmetry)),
        (9, criterion(9, "esthetic counts", secs(60), esthetic_counts)),
        (10, criterion(10, "error term and modulus", secs(120), error_term_modulus)),
    ];
    let unexpected: Vec<u32> = results.iter().filter(|(id, pass)| !pass && !NOT_ATTAINABLE.contains(id)).map(|p| p.0).collect();
    let passed = results.iter().filter(|p| p.1).count();
    println!("{passed}/{} criteria pass; known unattainable: {NOT_ATTAINABLE:?}", results.len());
    for (id, pass) in &results {
        if *pass && NOT_ATTAINABLE.contains(id) {
            println!("note: criterion {id} is listed as unattainable but passed");
        }
    }
    if unexpected.is_empty() {
        ExitCode::SUCCESS
    } else {
        println!("unexpected failures: {unexpected:?}");
        ExitCode::FAILURE
    }
}
