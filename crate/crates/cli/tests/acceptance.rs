//! End-to-end acceptance checks. Run with `cargo test --test acceptance`;
//! prints one PASS/FAIL line per criterion and exits non-zero on any FAIL.

use std::time::Instant;

use fwlab_core::eriksen::{
    compare_series, fw_hamiltonian_series, reference_devries_jonker, ReferenceSeries, A24_LABELS,
};
use fwlab_core::fseries::RatSeries;
use fwlab_core::ncalg::{rat, Atom, NcPoly, Rational, Word, UNTRUNCATED};
use fwlab_core::relfw::{eriksen_grade_filter, relativistic_even_form};
use fwlab_numeric::matfun::{
    beta_conjugate, eriksen_transform_numeric, even_part, hbar_convergence_study, least_squares,
    relfw_hamiltonian_numeric, spectral_norm, BlockOperator, HermClass, MatfunConfig,
};
use fwlab_numeric::models::{
    build_lattice_dirac, spin1_numeric_spectrum, LatticeDiracFamily, LatticeDiracSpec,
    PotentialShape, Spin1LandauSpec,
};
use fwlab_numeric::{CMat, CVec, Complex64};
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SERIES_WEIGHT: u32 = 8;
const F_ORDER: usize = 4;
const G_ORDER: usize = 2;
const LATTICE_SITES: usize = 64;
const ODD_RESIDUAL_TOL: f64 = 1e-10;
const DRIFT_TOL: f64 = 1e-9;
const HBAR_SWEEP: [f64; 4] = [0.2, 0.1, 0.05, 0.025];
const MIN_SLOPE: f64 = 1.9;
const MIN_R_SQUARED: f64 = 0.98;
const LANDAU_FIELD: f64 = 0.02;
const LANDAU_N_MAX: usize = 60;
const LANDAU_LEVELS: usize = 10;
const LANDAU_TOL: f64 = 1e-8;
const ANOMALOUS_G: f64 = 2.5;
const MIN_FIELD_EXPONENT: f64 = 2.7;
const POLARIZATION_TOL: f64 = 1e-6;
const ZERO_MEAN_TOL: f64 = 1e-8;
const UNITARITY_TOL: f64 = 1e-10;
const PROPERTY_CASES: u32 = 256;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn lattice_spec(hbar: f64) -> LatticeDiracSpec {
    LatticeDiracSpec::new(
        LATTICE_SITES,
        64.0,
        1.0,
        hbar,
        &PotentialShape::Cosine {
            amplitude: 0.3,
            periods: 1,
        },
    )
}

fn spin1(g: f64, field: f64, n_max: usize) -> Spin1LandauSpec {
    Spin1LandauSpec {
        mass: 1.0,
        charge: 1.0,
        g_factor: g,
        field,
        hbar: 1.0,
        n_max,
    }
}

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn exact_series() -> Outcome {
    let engine = fw_hamiltonian_series(SERIES_WEIGHT).map_err(|e| e.to_string())?;
    let reference = reference_devries_jonker(SERIES_WEIGHT).map_err(|e| e.to_string())?;
    let diff = compare_series(&engine, &reference);
    let mut killed = 0;
    for i in 0..A24_LABELS.len() {
        let base = ReferenceSeries::devries_jonker();
        let bumped = base.a24_inner_coefficient(i) + rat(1, 1);
        let mutant = base
            .with_a24_coefficient(i, bumped)
            .expand(SERIES_WEIGHT)
            .map_err(|e| e.to_string())?;
        if !compare_series(&engine, &mutant).is_empty() {
            killed += 1;
        }
    }
    check(
        diff.is_empty() && killed == A24_LABELS.len(),
        format!(
            "{} terms, {} differing words, {killed}/{} A24 mutants detected",
            engine.len(),
            diff.len(),
            A24_LABELS.len()
        ),
    )
}

/// Binomial coefficients of `(1+t)^(1/2)` by the ratio recursion.
fn sqrt_oracle(order: usize) -> Vec<Rational> {
    let mut out = vec![rat(1, 1)];
    for k in 1..=order {
        let prev = out[k - 1].clone();
        out.push(prev * (rat(1, 2) - rat(k as i64 - 1, 1)) / rat(k as i64, 1));
    }
    out
}

fn grade_one_equivalence() -> Outcome {
    let f_oracle = sqrt_oracle(F_ORDER);
    let g_oracle = [rat(-8, 128), rat(6, 128), rat(-5, 128)];
    let matches = |s: &RatSeries, oracle: &[Rational]| {
        oracle.iter().enumerate().all(|(k, c)| &s.coeff(k) == c)
    };
    let closed = relativistic_even_form(F_ORDER + 2).map_err(|e| e.to_string())?;
    let (filtered, _) = eriksen_grade_filter().map_err(|e| e.to_string())?;
    let ok = matches(&closed.f, &f_oracle)
        && matches(&closed.g, &g_oracle[..=G_ORDER])
        && matches(&filtered.f, &f_oracle)
        && matches(&filtered.g, &g_oracle[..=G_ORDER]);
    check(ok, format!("f through t^{F_ORDER} and g through t^{G_ORDER} exact for closed form and filtered series"))
}

fn exact_transform() -> Outcome {
    let cfg = MatfunConfig::default();
    let model = build_lattice_dirac(&lattice_spec(0.1), &cfg).map_err(|e| e.to_string())?;
    let r = eriksen_transform_numeric(&model.operator, &cfg).map_err(|e| e.to_string())?;
    let odd = r.odd_residual_norm / r.h_norm;
    check(
        odd <= ODD_RESIDUAL_TOL && r.spectrum_drift <= DRIFT_TOL,
        format!(
            "N = {LATTICE_SITES}: odd residual {odd:.2e} |H|, drift {:.2e}",
            r.spectrum_drift
        ),
    )
}

fn hbar_order() -> Outcome {
    let cfg = MatfunConfig::default();
    let family = LatticeDiracFamily {
        template: lattice_spec(0.1),
        config: cfg.clone(),
    };
    let r = hbar_convergence_study(&family, &HBAR_SWEEP, &cfg).map_err(|e| e.to_string())?;
    let (slope, r2) = (r.slope.unwrap_or(f64::NAN), r.r_squared.unwrap_or(f64::NAN));
    check(
        slope >= MIN_SLOPE && r2 >= MIN_R_SQUARED,
        format!("slope {slope:.4}, R^2 {r2:.5}"),
    )
}

fn landau_spectrum() -> Outcome {
    let cfg = MatfunConfig::default();
    let r = spin1_numeric_spectrum(&spin1(2.0, LANDAU_FIELD, LANDAU_N_MAX), LANDAU_LEVELS, &cfg)
        .map_err(|e| e.to_string())?;
    let top = r.groups.iter().map(|g| g.key).max().unwrap_or(0);
    // keys below 3 lack a partner with n >= 0; the highest group may be cut
    // by the level count
    let complete = r
        .groups
        .iter()
        .filter(|g| g.key >= 3 && g.key != top)
        .all(|g| g.complete);
    let triples = r.groups.iter().filter(|g| g.complete).count();
    check(
        r.max_relative_residual <= LANDAU_TOL
            && r.max_group_spread <= LANDAU_TOL
            && complete
            && triples >= 2,
        format!(
            "max residual {:.2e}, {triples} triples with spread {:.2e}",
            r.max_relative_residual, r.max_group_spread
        ),
    )
}

fn anomalous_scaling() -> Outcome {
    let cfg = MatfunConfig::default();
    let fields: Vec<f64> = (0..4).map(|k| LANDAU_FIELD / 2f64.powi(k)).collect();
    let mut residuals = Vec::new();
    for &b in &fields {
        let r = spin1_numeric_spectrum(&spin1(ANOMALOUS_G, b, 30), LANDAU_LEVELS, &cfg)
            .map_err(|e| e.to_string())?;
        residuals.push(r.max_relative_residual);
    }
    let x: Vec<f64> = fields.iter().map(|b| b.ln()).collect();
    let y: Vec<f64> = residuals.iter().map(|r| r.ln()).collect();
    let fit = least_squares(&x, &y).ok_or("degenerate fit")?;
    let listed: Vec<String> = residuals.iter().map(|r| format!("{r:.1e}")).collect();
    check(
        fit.slope >= MIN_FIELD_EXPONENT,
        format!(
            "exponent {:.3} from residuals [{}]",
            fit.slope,
            listed.join(", ")
        ),
    )
}

fn polarization() -> Outcome {
    let cfg = MatfunConfig::default();
    let r = spin1_numeric_spectrum(&spin1(ANOMALOUS_G, LANDAU_FIELD, 30), LANDAU_LEVELS, &cfg)
        .map_err(|e| e.to_string())?;
    check(
        r.max_polarization_error <= POLARIZATION_TOL && r.max_zero_mean <= ZERO_MEAN_TOL,
        format!(
            "|<S_z> - lambda Y| <= {:.2e}, |<S_pi>|, |<S_pixB>| <= {:.2e}",
            r.max_polarization_error, r.max_zero_mean
        ),
    )
}

fn poly() -> impl Strategy<Value = NcPoly> {
    let word = (
        any::<bool>(),
        prop::collection::vec(prop_oneof![Just(Atom::E), Just(Atom::O)], 0..4),
        -2i32..3,
    )
        .prop_map(|(b, a, k)| Word::normal(b, &a, k));
    let coeff = (-6i64..7, 1i64..5).prop_map(|(n, d)| rat(n, d));
    prop::collection::vec((coeff, word), 0..5).prop_map(|ts| {
        ts.into_iter()
            .fold(NcPoly::zero(), |acc, (c, w)| &acc + &NcPoly::monomial(c, w))
    })
}

fn parity(p: &NcPoly) -> Option<bool> {
    let mut it = p.terms().map(|(w, _)| w.is_odd());
    let first = it.next()?;
    it.all(|x| x == first).then_some(first)
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn random_matrix(rng: &mut ChaCha8Rng, n: usize) -> CMat {
    CMat::from_fn(n, n, |_, _| {
        Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    })
}

fn random_beta(rng: &mut ChaCha8Rng, n: usize) -> CMat {
    let p = rng.gen_range(1..n);
    CMat::from_diagonal(&CVec::from_iterator(
        n,
        (0..n).map(|k| c(if k < p { 1.0 } else { -1.0 })),
    ))
}

fn runner() -> TestRunner {
    let config = Config {
        cases: PROPERTY_CASES,
        failure_persistence: None,
        ..Config::default()
    };
    TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha))
}

fn property_suites() -> Outcome {
    let mut failures = Vec::new();
    let mut record = |name: &str, r: Result<(), String>| {
        if let Err(e) = r {
            failures.push(format!("{name}: {e}"));
        }
    };

    record(
        "parity closure",
        runner()
            .run(&(poly(), poly()), |(a, b)| {
                let (ae, ao) = a.even_odd_split();
                let (be, bo) = b.even_odd_split();
                for (x, y, odd) in [
                    (&ao, &bo, false),
                    (&ao, &be, true),
                    (&ae, &bo, true),
                    (&ae, &be, false),
                ] {
                    let p = x.mul(y, UNTRUNCATED);
                    prop_assert!(parity(&p).is_none_or(|q| q == odd));
                }
                Ok(())
            })
            .map_err(|e| e.to_string()),
    );

    record(
        "truncation coherence",
        runner()
            .run(&(poly(), poly(), 0u32..6), |(a, b, w)| {
                let full = a.mul(&b, UNTRUNCATED).truncate(w);
                prop_assert_eq!(full, a.truncate(w).mul(&b.truncate(w), w));
                Ok(())
            })
            .map_err(|e| e.to_string()),
    );

    let cfg = MatfunConfig::default();
    record(
        "adjoint symmetry of H_FW",
        runner()
            .run(&(any::<u64>(), 2usize..9), |(seed, n)| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let beta = random_beta(&mut rng, n);
                let a = random_matrix(&mut rng, n);
                let h = &beta * c(rng.gen_range(1.0..2.0)) + (&a + a.adjoint()) * c(0.2 / n as f64);
                let op = BlockOperator::new(h, beta, HermClass::Hermitian, &cfg).unwrap();
                let r = eriksen_transform_numeric(&op, &cfg).unwrap();
                prop_assert!(spectral_norm(&(&r.h_fw - r.h_fw.adjoint())) <= 1e-12 * r.h_norm);
                Ok(())
            })
            .map_err(|e| e.to_string()),
    );

    record(
        "unitarity and pseudo-unitarity",
        runner()
            .run(
                &(any::<u64>(), 2usize..9, any::<bool>()),
                |(seed, n, pseudo)| {
                    let mut rng = ChaCha8Rng::seed_from_u64(seed);
                    let beta = random_beta(&mut rng, n);
                    let a = random_matrix(&mut rng, n);
                    let one = CMat::identity(n, n);
                    let defect = if pseudo {
                        let g = &a * a.adjoint() * c(0.2 / n as f64) + &one;
                        let op = BlockOperator::new(
                            &beta * g,
                            beta.clone(),
                            HermClass::BetaPseudoHermitian,
                            &cfg,
                        )
                        .unwrap();
                        let u = eriksen_transform_numeric(&op, &cfg).unwrap().u;
                        spectral_norm(&(&u * beta_conjugate(&u.adjoint(), &beta) - &one))
                    } else {
                        let h = &beta + (&a + a.adjoint()) * c(0.2 / n as f64);
                        let op = BlockOperator::new(h, beta.clone(), HermClass::Hermitian, &cfg)
                            .unwrap();
                        let u = eriksen_transform_numeric(&op, &cfg).unwrap().u;
                        spectral_norm(&(u.adjoint() * &u - &one))
                    };
                    prop_assert!(defect <= UNITARITY_TOL);
                    Ok(())
                },
            )
            .map_err(|e| e.to_string()),
    );

    record(
        "degeneration to exactness",
        runner()
            .run(&(any::<u64>(), 1usize..6), |(seed, n)| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let mut diag = |lo: f64, hi: f64| {
                    CMat::from_diagonal(&CVec::from_iterator(
                        n,
                        (0..n).map(|_| c(rng.gen_range(lo..hi))),
                    ))
                };
                let (md, ed, od) = (diag(1.0, 2.0), diag(-0.5, 0.5), diag(-1.5, 1.5));
                let q = CMat::identity(2, 2).kronecker(&random_matrix(&mut rng, n).qr().q());
                let rot = |x: CMat| &q * x * q.adjoint();
                let s1 = CMat::from_row_slice(2, 2, &[c(0.0), c(1.0), c(1.0), c(0.0)]);
                let s3 = CMat::from_row_slice(2, 2, &[c(1.0), c(0.0), c(0.0), c(-1.0)]);
                let beta = s3.kronecker(&CMat::identity(n, n));
                let m = rot(CMat::identity(2, 2).kronecker(&md));
                let e = rot(CMat::identity(2, 2).kronecker(&ed));
                let o = rot(s1.kronecker(&od));
                let op = BlockOperator::new(
                    &beta * &m + &e + &o,
                    beta.clone(),
                    HermClass::Hermitian,
                    &cfg,
                )
                .unwrap();
                let fw = eriksen_transform_numeric(&op, &cfg).unwrap();
                let closed = relfw_hamiltonian_numeric(&m, &e, &o, &beta, &cfg).unwrap();
                let d = spectral_norm(&(even_part(&fw.h_fw, &beta) - &closed)) / fw.h_norm;
                prop_assert!(d <= 1e-12);
                Ok(())
            })
            .map_err(|e| e.to_string()),
    );

    check(
        failures.is_empty(),
        if failures.is_empty() {
            format!("5 properties x {PROPERTY_CASES} instances")
        } else {
            failures.join("; ")
        },
    )
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("1 exact series reproduction", exact_series),
        ("2 grade-1 equivalence", grade_one_equivalence),
        ("3 exact-transform property", exact_transform),
        ("4 O(hbar^2) validity", hbar_order),
        ("5 Landau spectrum", landau_spectrum),
        ("6 anomalous-moment scaling", anomalous_scaling),
        ("7 polarization table", polarization),
        ("8 property suites", property_suites),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".to_string()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS  {name:<30} {detail} ({secs:.1}s)"),
            Err(detail) => {
                failed += 1;
                println!("FAIL  {name:<30} {detail} ({secs:.1}s)");
            }
        }
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
