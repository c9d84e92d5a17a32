use std::fs;
use std::path::Path;

use num_complex::Complex64;
use regseq::dirichlet::{DirichletConfig, DirichletEvaluator};
use regseq::esthetic::{asymptotic_analysis, EstheticRep};
use regseq::format::{complex_from_pair, complex_to_csv, complex_to_json, family_from_json, representation_from_str};
use regseq::fourier::{build_expansion, empirical_fluctuation, AsymptoticExpansion, ResidueConfig, SummatoryIntegrand};
use regseq::linrep::{binary_sum_of_digits, constant_representation, sum_of_digits};
use regseq::spectral::{eigen_data, jsr_bounds_with_cap, MatrixNorm};
use regseq::symmetry::combined_series;
use regseq::tauber::{build_psi_from_fourier, two_route_deviation, verify_tauber_relation, CauchyConfig};
use regseq::{Error, Rep, Result};
use serde_json::{json, Value};

use crate::cli::{Command, DirichletArgs, GridArgs, NormArg, ResidueArgs};
use crate::output::{csv_table, Artifact};

fn read_file(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))
}

fn parse_usize(s: &str) -> Result<usize> {
    s.parse().map_err(|_| Error::Parse(format!("expected a positive integer, got {s}")))
}

/// A JSON file or `builtin:sum-of-digits[:q]`, `builtin:constant:q`, `builtin:esthetic:q`.
pub fn load_rep(arg: &str) -> Result<Rep> {
    let Some(name) = arg.strip_prefix("builtin:") else {
        return representation_from_str(&read_file(Path::new(arg))?);
    };
    let parts: Vec<&str> = name.split(':').collect();
    let rep = match parts.as_slice() {
        ["sum-of-digits"] => binary_sum_of_digits(),
        ["sum-of-digits", q] => sum_of_digits(parse_usize(q)?)?,
        ["constant", q] => constant_representation(parse_usize(q)?)?,
        ["esthetic", q] => EstheticRep::new(parse_usize(q)?)?.into_representation(),
        _ => return Err(Error::Parse(format!("unknown builtin representation {name}"))),
    };
    Ok(rep.to_complex())
}

fn dirichlet_config(a: &DirichletArgs) -> Result<DirichletConfig> {
    if !(a.delta > 0.0 && a.tolerance > 0.0 && a.poles_tol > 0.0) {
        return Err(Error::InvalidArgument("delta, tolerance and poles-tol must be positive".into()));
    }
    if let Some(r) = a.r_bound {
        if !(r > 0.0) {
            return Err(Error::InvalidArgument("r-bound must be positive".into()));
        }
    }
    Ok(DirichletConfig {
        r_bound: a.r_bound,
        delta: a.delta,
        tolerance: a.tolerance,
        poles_tol: a.poles_tol,
        max_split: a.max_split,
    })
}

fn residue_config(a: &ResidueArgs) -> Result<ResidueConfig> {
    if a.m_start < 4 || a.m_max < a.m_start || !(a.residue_tol > 0.0) {
        return Err(Error::InvalidArgument("need 4 ≤ m-start ≤ m-max and residue-tol > 0".into()));
    }
    Ok(ResidueConfig { rho: a.rho, m_start: a.m_start, m_max: a.m_max, tolerance: a.residue_tol })
}

/// `u_min, u_min + step, …` up to `u_max`, computed from the index to avoid drift.
pub fn grid(a: &GridArgs) -> Result<Vec<f64>> {
    if !(a.u_step > 0.0 && a.u_max >= a.u_min) {
        return Err(Error::InvalidArgument("need u-step > 0 and u-max ≥ u-min".into()));
    }
    let count = ((a.u_max - a.u_min) / a.u_step + 1e-9).floor() as usize;
    if count > 10_000_000 {
        return Err(Error::ResourceLimit(format!("grid with {count} points")));
    }
    Ok((0..=count).map(|i| a.u_min + i as f64 * a.u_step).collect())
}

fn cjson(z: Complex64) -> Value {
    complex_to_json(z)
}

fn exact_or_complex(exact: Option<String>, z: Complex64) -> (Value, String) {
    match exact {
        Some(s) => (Value::String(s.clone()), s),
        None => (cjson(z), complex_to_csv(z)),
    }
}

fn expansion_json(exp: &AsymptoticExpansion) -> Value {
    let terms: Vec<Value> = exp
        .terms
        .iter()
        .map(|t| {
            json!({
                "lambda": cjson(t.lambda),
                "k": t.k,
                "period": t.series.period,
                "coeffs": t.series.iter().map(|(ell, c)| json!({"ell": ell, "phi": cjson(c)})).collect::<Vec<_>>(),
            })
        })
        .collect();
    json!({
        "q": exp.q,
        "error_exponent": exp.error_exponent,
        "error_log_power": exp.error_log_power,
        "terms": terms,
    })
}

fn fluctuation_rows(samples: &[regseq::fourier::FluctuationSample]) -> Vec<Vec<String>> {
    samples
        .iter()
        .map(|s| vec![format!("{:?}", s.u), complex_to_csv(s.empirical), complex_to_csv(s.reconstructed)])
        .collect()
}

fn norm_of(n: NormArg) -> MatrixNorm {
    match n {
        NormArg::RowSum => MatrixNorm::RowSum,
        NormArg::ColumnSum => MatrixNorm::ColumnSum,
        NormArg::Spectral => MatrixNorm::Spectral,
    }
}

pub fn run(command: &Command, meta: bool) -> Result<Artifact> {
    match command {
        Command::Eval { rep, n } => {
            let rep = load_rep(&rep.rep)?;
            let exact = rep.to_integral();
            let x = rep.evaluate(*n);
            let (xj, xc) = exact_or_complex(exact.as_ref().map(|e| e.evaluate(*n).to_string()), x);
            let v: Vec<Value> = match &exact {
                Some(e) => e.vector_sequence(*n).iter().map(|b| Value::String(b.to_string())).collect(),
                None => rep.vector_sequence(*n).iter().map(|z| cjson(*z)).collect(),
            };
            Ok(Artifact {
                json: json!({"n": n.to_string(), "x": xj, "v": v, "exact": exact.is_some()}),
                header: vec!["n", "x"],
                rows: vec![vec![n.to_string(), xc]],
            })
        }
        Command::Sum { rep, n, brute } => {
            let rep = load_rep(&rep.rep)?;
            let exact = rep.to_integral();
            let (xj, xc) = match (&exact, brute) {
                (Some(e), false) => exact_or_complex(Some(e.summatory_fast(*n).to_string()), Complex64::new(0.0, 0.0)),
                (Some(e), true) => exact_or_complex(Some(e.summatory_brute(*n)?.to_string()), Complex64::new(0.0, 0.0)),
                (None, false) => exact_or_complex(None, rep.summatory_fast(*n)),
                (None, true) => exact_or_complex(None, rep.summatory_brute(*n)?),
            };
            let method = if *brute { "brute" } else { "fast" };
            Ok(Artifact {
                json: json!({"N": n.to_string(), "X": xj, "exact": exact.is_some(), "method": method}),
                header: vec!["N", "X"],
                rows: vec![vec![n.to_string(), xc]],
            })
        }
        Command::Spectrum { rep, cluster_tol } => {
            let rep = load_rep(&rep.rep)?;
            let s = eigen_data(&rep.sum_matrix(), *cluster_tol)?;
            let eig: Vec<Value> = s
                .eigenvalues
                .iter()
                .map(|e| json!({"lambda": cjson(e.lambda), "alg_mult": e.alg_mult, "max_jordan": e.max_jordan}))
                .collect();
            let rows = s
                .eigenvalues
                .iter()
                .map(|e| vec![complex_to_csv(e.lambda), e.alg_mult.to_string(), e.max_jordan.to_string()])
                .collect();
            Ok(Artifact {
                json: json!({
                    "exact": s.exact,
                    "cluster_tol": s.cluster_tol,
                    "spectral_radius": s.spectral_radius(),
                    "eigenvalues": eig,
                    "warnings": s.warnings,
                }),
                header: vec!["lambda", "alg_mult", "max_jordan"],
                rows,
            })
        }
        Command::Jsr { rep, max_len, norm, product_cap, eps_r } => {
            let rep = load_rep(&rep.rep)?;
            if !(*eps_r >= 0.0) {
                return Err(Error::InvalidArgument("eps-r must be non-negative".into()));
            }
            let b = jsr_bounds_with_cap(rep.matrices(), *max_len, norm_of(*norm), *product_cap)?;
            let r = b.upper + eps_r;
            Ok(Artifact {
                json: json!({
                    "norm": b.norm.name(),
                    "length_tested": b.length_tested,
                    "lower": b.lower,
                    "upper": b.upper,
                    "r_bound": r,
                }),
                header: vec!["norm", "length", "lower", "upper", "r_bound"],
                rows: vec![vec![
                    b.norm.name().to_string(),
                    b.length_tested.to_string(),
                    format!("{:?}", b.lower),
                    format!("{:?}", b.upper),
                    format!("{r:?}"),
                ]],
            })
        }
        Command::Dirichlet { rep, s, direct, residual, dirichlet } => {
            let rep = load_rep(&rep.rep)?;
            let s = complex_from_pair(s)?;
            let ev = DirichletEvaluator::new(&rep, dirichlet_config(dirichlet)?)?;
            let v = if *direct { ev.eval_direct(s)? } else { ev.eval_continued(s)? };
            let x = rep.left().dot(&v.transpose());
            let fe = if *residual { Some(ev.functional_equation_residual(s)?) } else { None };
            let mut rows: Vec<Vec<String>> =
                v.iter().enumerate().map(|(i, z)| vec![i.to_string(), complex_to_csv(*z)]).collect();
            rows.push(vec!["X".into(), complex_to_csv(x)]);
            Ok(Artifact {
                json: json!({
                    "s": cjson(s),
                    "regime": if *direct { "direct" } else { "continued" },
                    "r_bound": ev.r_bound(),
                    "abscissa": ev.abscissa(),
                    "V": v.iter().map(|z| cjson(*z)).collect::<Vec<_>>(),
                    "X": cjson(x),
                    "fe_residual": fe,
                }),
                header: vec!["component", "value"],
                rows,
            })
        }
        Command::Fourier { rep, degree, dirichlet, residue } => {
            let rep = load_rep(&rep.rep)?;
            let ev = DirichletEvaluator::new(&rep, dirichlet_config(dirichlet)?)?;
            let spectral = eigen_data(ev.sum_matrix(), None)?;
            let exp = build_expansion(&ev, &spectral, *degree, &residue_config(residue)?)?;
            let mut rows = Vec::new();
            for t in &exp.terms {
                for (ell, c) in t.series.iter() {
                    rows.push(vec![
                        format!("{:?}", t.lambda.re),
                        format!("{:?}", t.lambda.im),
                        t.k.to_string(),
                        ell.to_string(),
                        format!("{:?}", c.re),
                        format!("{:?}", c.im),
                    ]);
                }
            }
            Ok(Artifact {
                json: expansion_json(&exp),
                header: vec!["lambda_re", "lambda_im", "k", "ell", "phi_re", "phi_im"],
                rows,
            })
        }
        Command::Fluctuation { rep, degree, term, grid: g, dirichlet, residue } => {
            let rep = load_rep(&rep.rep)?;
            let ev = DirichletEvaluator::new(&rep, dirichlet_config(dirichlet)?)?;
            let spectral = eigen_data(ev.sum_matrix(), None)?;
            let exp = build_expansion(&ev, &spectral, *degree, &residue_config(residue)?)?;
            let idx = match term {
                Some(i) => *i,
                None => exp.dominant().ok_or_else(|| Error::Domain("the expansion has no main term".into()))?,
            };
            let samples = empirical_fluctuation(&rep, &exp, idx, &grid(g)?)?;
            let json_samples: Vec<Value> = samples
                .iter()
                .map(|s| json!({"u": s.u, "N": s.n.to_string(), "empirical": cjson(s.empirical), "reconstructed": cjson(s.reconstructed)}))
                .collect();
            Ok(Artifact {
                json: json!({"term": idx, "lambda": cjson(exp.terms[idx].lambda), "k": exp.terms[idx].k, "samples": json_samples}),
                header: vec!["u", "empirical", "reconstructed"],
                rows: fluctuation_rows(&samples),
            })
        }
        Command::Combine { rep, lambda, p, k, degree, dirichlet, residue } => {
            let rep = load_rep(&rep.rep)?;
            let lambda = complex_from_pair(lambda)?;
            let ev = DirichletEvaluator::new(&rep, dirichlet_config(dirichlet)?)?;
            let real = rep.matrices().iter().flat_map(|m| m.iter()).all(|z| z.im == 0.0)
                && rep.left().iter().chain(rep.v0().iter()).all(|z| z.im == 0.0);
            let series =
                combined_series(&SummatoryIntegrand { ev: &ev }, lambda, *p, *k, *degree, real, &residue_config(residue)?)?;
            let j0 = regseq::symmetry::j0(lambda, *p)?;
            Ok(Artifact {
                json: json!({
                    "lambda": cjson(lambda),
                    "p": p,
                    "k": k,
                    "j0": j0,
                    "coeffs": series.iter().map(|(ell, c)| json!({"ell": ell, "phi": cjson(c)})).collect::<Vec<_>>(),
                }),
                header: vec!["ell", "phi"],
                rows: series.iter().map(|(ell, c)| vec![ell.to_string(), complex_to_csv(c)]).collect(),
            })
        }
        Command::Tauber {
            kappa,
            q,
            m,
            phi,
            alpha,
            beta,
            nmax,
            samples,
            radius,
            cauchy_m_start,
            cauchy_m_max,
            cauchy_tol,
        } => {
            let kappa = complex_from_pair(kappa)?;
            let text = read_file(phi)?;
            let v: Value = serde_json::from_str(&text).map_err(|e| Error::Parse(e.to_string()))?;
            let fam = family_from_json(&v, kappa, *q, *alpha, *beta)?;
            if fam.m() != *m {
                return Err(Error::Malformed(format!("--m {m} but the file holds {} functions", fam.m())));
            }
            let psi = build_psi_from_fourier(&fam);
            let r = radius.unwrap_or_else(|| fam.default_radius());
            let cfg = CauchyConfig { m_start: *cauchy_m_start, m_max: *cauchy_m_max, tolerance: *cauchy_tol };
            let deviation = two_route_deviation(&fam, r, &cfg)?;
            let report = verify_tauber_relation(&fam, &psi, *nmax, *samples)?;
            let l = fam.degree() as i64;
            let psi_json: Vec<Value> = (-1..fam.m() as i64)
                .map(|j| json!({"j": j, "coeffs": psi.psi(j).coeffs().iter().map(|z| cjson(*z)).collect::<Vec<_>>()}))
                .collect();
            let mut rows = Vec::new();
            for j in -1..fam.m() as i64 {
                for ell in -l..=l {
                    rows.push(vec![j.to_string(), ell.to_string(), complex_to_csv(psi.psi(j).coeff(ell))]);
                }
            }
            Ok(Artifact {
                json: json!({
                    "kappa": cjson(kappa),
                    "q": q,
                    "m": fam.m(),
                    "alpha": fam.alpha(),
                    "beta": fam.beta(),
                    "flagQKappaUnit": psi.flag_q_kappa_unit(),
                    "radius": r,
                    "twoRouteDeviation": deviation,
                    "fittedC": cjson(report.fitted_c),
                    "maxResidual": report.max_scaled_residual,
                    "decayExponent": report.decay_exponent,
                    "Nmax": nmax,
                    "psi": psi_json,
                }),
                header: vec!["j", "ell", "psi"],
                rows,
            })
        }
        Command::Esthetic { q, degree, emit_fluctuation, grid: g, residue } => {
            let cfg = residue_config(residue)?;
            let a = asymptotic_analysis(*q, *degree, &cfg)?;
            if let Some(path) = emit_fluctuation {
                if a.expansion.terms.is_empty() {
                    return Err(Error::Domain(format!("q = {q} has no main term to sample")));
                }
                let rep = EstheticRep::new(*q)?.representation().to_complex();
                let samples = empirical_fluctuation(&rep, &a.expansion, 0, &grid(g)?)?;
                let mut body = String::new();
                if meta {
                    body.push_str(&format!("# regseq {} esthetic q={q} L={degree}\n", env!("CARGO_PKG_VERSION")));
                }
                body.push_str(&csv_table(&["u", "empirical", "reconstructed"], &fluctuation_rows(&samples)));
                fs::write(path, body).map_err(|e| Error::Parse(format!("cannot write {}: {e}", path.display())))?;
            }
            let terms: Vec<Value> = a
                .indices
                .iter()
                .zip(&a.expansion.terms)
                .zip(&a.parities)
                .map(|((j, t), par)| {
                    json!({
                        "j": j,
                        "lambda": cjson(t.lambda),
                        "exponent": t.lambda.re.ln() / (*q as f64).ln(),
                        "parity": par.name(),
                        "period": t.series.period,
                        "coeffs": t.series.iter().map(|(ell, c)| json!({"ell": ell, "phi": cjson(c)})).collect::<Vec<_>>(),
                    })
                })
                .collect();
            let rows = a
                .indices
                .iter()
                .zip(&a.expansion.terms)
                .zip(&a.parities)
                .map(|((j, t), par)| {
                    vec![j.to_string(), format!("{:?}", t.lambda.re), par.name().to_string(), complex_to_csv(t.series.coeff(0))]
                })
                .collect();
            Ok(Artifact {
                json: json!({
                    "q": q,
                    "L": degree,
                    "errorLogPower": a.error_log_power,
                    "oneperiodic": a.one_periodic,
                    "logGrowth": a.log_growth,
                    "delta": a.delta,
                    "errorExponent": a.expansion.error_exponent,
                    "terms": terms,
                }),
                header: vec!["j", "lambda", "parity", "phi0"],
                rows,
            })
        }
    }
}
