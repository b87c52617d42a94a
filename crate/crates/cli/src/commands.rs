use std::fmt::Write as _;

use anyhow::anyhow;
use fwlab_core::eriksen::{
    compare_series, fw_hamiltonian_series, ReferenceSeries, A24_LABELS, MAX_COMPUTE_WEIGHT,
    REFERENCE_WEIGHT,
};
use fwlab_core::fseries::binomial_series;
use fwlab_core::ncalg::{format_rational, parse_rational, rat};
use fwlab_core::relfw::{
    compare_even_forms, construction, grade_filter, grade_report, relativistic_even_form,
    with_atom_grades, REFERENCE_F_ORDER, REFERENCE_G_ORDER,
};
use fwlab_numeric::matfun::{
    eriksen_transform_numeric, hbar_convergence_study, least_squares, spectral_norm, BlockOperator,
    HermClass, MatrixJson,
};
use fwlab_numeric::models::{
    build_lattice_dirac, spin1_numeric_spectrum, LatticeDiracFamily, LatticeDiracSpec, ModelError,
    SpectrumReport, Spin1LandauSpec,
};
use fwlab_numeric::{CMat, Complex64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::config::{EriksenSeriesConfig, NumericFwConfig, RelFwCheckConfig, Spin1SpectrumConfig};

/// Why a run did not produce a passing report.
#[derive(Debug)]
pub enum Failure {
    Config(anyhow::Error),
    Numerical(anyhow::Error),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Config(_) => 1,
            Failure::Numerical(_) => 3,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Config(e) => write!(f, "configuration error: {e:#}"),
            Failure::Numerical(e) => write!(f, "numerical breakdown: {e:#}"),
        }
    }
}

fn config_err(msg: impl std::fmt::Display) -> Failure {
    Failure::Config(anyhow!("{msg}"))
}

fn numeric_err(e: impl std::error::Error + Send + Sync + 'static) -> Failure {
    Failure::Numerical(e.into())
}

/// A finished run: result JSON, a plain-text table and side files.
pub struct Outcome {
    pub pass: bool,
    pub result: Value,
    pub table: String,
    pub files: Vec<(String, String)>,
}

fn row(table: &mut String, key: &str, value: impl std::fmt::Display) {
    let _ = writeln!(table, "{key:<32} {value}");
}

fn verdict(pass: bool) -> &'static str {
    if pass {
        "PASS"
    } else {
        "FAIL"
    }
}

pub fn eriksen_series(cfg: &EriksenSeriesConfig) -> Result<Outcome, Failure> {
    let w = cfg.weight_max;
    if w == 0 || w > MAX_COMPUTE_WEIGHT.min(10) {
        return Err(config_err(format!("weight_max must be in 1..=10, got {w}")));
    }
    let mut reference = ReferenceSeries::devries_jonker();
    let mut injected = None;
    if let Some(p) = &cfg.perturb_a24 {
        if w > REFERENCE_WEIGHT {
            return Err(config_err(
                "perturb_a24 needs comparison mode (weight_max <= 8)",
            ));
        }
        if p.index >= A24_LABELS.len() {
            return Err(config_err(format!(
                "perturb_a24.index must be below {}",
                A24_LABELS.len()
            )));
        }
        let inner = parse_rational(&p.inner)
            .ok_or_else(|| config_err(format!("bad rational {:?}", p.inner)))?;
        let original = reference.a24_inner_coefficient(p.index);
        reference = reference.with_a24_coefficient(p.index, inner.clone());
        injected = Some((A24_LABELS[p.index], original, inner));
    }

    let engine = fw_hamiltonian_series(w).map_err(numeric_err)?;
    let mut table = String::new();
    row(&mut table, "weight_max", w);
    row(&mut table, "engine terms", engine.len());

    if w > REFERENCE_WEIGHT {
        row(&mut table, "mode", "compute only");
        let result = json!({ "mode": "compute", "weight_max": w, "terms": engine.to_json_terms() });
        return Ok(Outcome {
            pass: true,
            result,
            table,
            files: vec![],
        });
    }

    let reference_poly = reference.expand(w).map_err(numeric_err)?;
    let diff = compare_series(&engine, &reference_poly);
    // the reference minus the engine must be exactly the injected change
    let injected_json = match &injected {
        None => Value::Null,
        Some((label, original, inner)) => {
            let term = reference
                .terms()
                .iter()
                .find(|t| &t.label == label)
                .expect("perturbed term exists");
            let mut delta_term = term.clone();
            delta_term.coeff = (original - inner) * rat(1, 256);
            let expected = delta_term.expand(w).map_err(numeric_err)?;
            let matches = diff.delta_poly() == expected;
            row(&mut table, "injected term", label);
            row(&mut table, "injected pattern isolated", matches);
            json!({
                "label": label,
                "original_inner": format_rational(original),
                "perturbed_inner": format_rational(inner),
                "diff_is_injected_pattern": matches,
            })
        }
    };
    row(&mut table, "reference terms", reference_poly.len());
    row(&mut table, "differing words", diff.len());
    let pass = diff.is_empty();
    row(&mut table, "verdict", verdict(pass));
    let result = json!({
        "mode": "compare",
        "weight_max": w,
        "engine_terms": engine.len(),
        "reference_terms": reference_poly.len(),
        "injected": injected_json,
        "diff": diff,
    });
    Ok(Outcome {
        pass,
        result,
        table,
        files: vec![],
    })
}

pub fn relfw_check(cfg: &RelFwCheckConfig) -> Result<Outcome, Failure> {
    if cfg.f_order > REFERENCE_F_ORDER || cfg.g_order > REFERENCE_G_ORDER {
        return Err(config_err(format!(
            "the reference series fixes f through t^{REFERENCE_F_ORDER} and g through t^{REFERENCE_G_ORDER}"
        )));
    }
    let (filtered, filter) =
        grade_filter(&ReferenceSeries::devries_jonker()).map_err(numeric_err)?;
    let exact = relativistic_even_form(cfg.f_order.max(cfg.g_order) + 2).map_err(numeric_err)?;
    let diff = compare_even_forms(&filtered, &exact, cfg.f_order, cfg.g_order);

    let sqrt = binomial_series(&rat(1, 2), cfg.f_order);
    let g_closed = fwlab_core::fseries::RatSeries::from_i64(&[(-8, 128), (6, 128), (-5, 128)]);
    let f_closed = (0..=cfg.f_order).all(|k| filtered.f.coeff(k) == sqrt.coeff(k));
    let g_closed_ok = (0..=cfg.g_order).all(|k| filtered.g.coeff(k) == g_closed.coeff(k));

    let audit: Vec<Value> = [
        ("residual_odd_term", construction::residual_odd_term()),
        ("generator_commutator", construction::generator_commutator()),
        ("leading_correction", construction::leading_correction()),
    ]
    .into_iter()
    .map(|(name, expr)| {
        let r = grade_report(&with_atom_grades(&expr)).map_err(numeric_err)?;
        Ok(json!({ "term": name, "grade": r.grade, "mixed_nesting": r.mixed_nesting }))
    })
    .collect::<Result<_, Failure>>()?;

    let coeffs = |s: &fwlab_core::fseries::RatSeries, n: usize| -> Vec<String> {
        (0..=n).map(|k| format_rational(&s.coeff(k))).collect()
    };
    let mut table = String::new();
    row(
        &mut table,
        "f coefficients",
        coeffs(&filtered.f, cfg.f_order).join(" "),
    );
    row(
        &mut table,
        "g coefficients",
        coeffs(&filtered.g, cfg.g_order).join(" "),
    );
    row(&mut table, "f = sqrt(1+t)", f_closed);
    row(&mut table, "g = -(8-6t+5t^2)/128", g_closed_ok);
    row(&mut table, "kept terms", filter.kept.len());
    row(&mut table, "dropped terms", filter.dropped.len());
    row(
        &mut table,
        "flagged mixed nesting",
        filter.flagged.join(", "),
    );
    row(&mut table, "differences", diff.entries.len());
    let pass = diff.is_empty() && f_closed && g_closed_ok;
    row(&mut table, "verdict", verdict(pass));

    let result = json!({
        "f": coeffs(&filtered.f, cfg.f_order),
        "g": coeffs(&filtered.g, cfg.g_order),
        "f_is_sqrt": f_closed,
        "g_is_closed_form": g_closed_ok,
        "filter": filter,
        "construction_grades": audit,
        "diff": diff,
    });
    Ok(Outcome {
        pass,
        result,
        table,
        files: vec![],
    })
}

fn random_unitarity_batch(count: usize, seed: u64, cfg: &NumericFwConfig) -> Result<f64, Failure> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..count {
        let n = rng.gen_range(2..9);
        let p = rng.gen_range(1..n);
        let sign = |k: usize| if k < p { 1.0 } else { -1.0 };
        let beta = CMat::from_fn(n, n, |r, c| {
            Complex64::new(if r == c { sign(r) } else { 0.0 }, 0.0)
        });
        let a = CMat::from_fn(n, n, |_, _| {
            Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        });
        let pert = (&a + a.adjoint()) * Complex64::new(0.2 / n as f64, 0.0);
        let h = &beta + pert;
        let op = BlockOperator::new(h, beta, HermClass::Hermitian, &cfg.tolerances)
            .map_err(numeric_err)?;
        let r = eriksen_transform_numeric(&op, &cfg.tolerances).map_err(numeric_err)?;
        worst = worst.max(spectral_norm(
            &(r.u.adjoint() * &r.u - CMat::identity(n, n)),
        ));
    }
    Ok(worst)
}

pub fn numeric_fw(cfg: &NumericFwConfig) -> Result<Outcome, Failure> {
    let lat = &cfg.lattice;
    let first = *cfg
        .hbar
        .first()
        .ok_or_else(|| config_err("hbar list is empty"))?;
    let template =
        LatticeDiracSpec::new(lat.sites, lat.box_length, lat.mass, first, &lat.potential);
    template.validate().map_err(config_err)?;
    let tol = &cfg.tolerances;

    let model = build_lattice_dirac(&template, tol).map_err(numeric_err)?;
    let fw = eriksen_transform_numeric(&model.operator, tol).map_err(numeric_err)?;
    let mut files = Vec::new();
    if cfg.export_matrices {
        let text = serde_json::to_string(&MatrixJson::from(&fw.h_fw))
            .map_err(|e| Failure::Numerical(e.into()))?;
        files.push(("numeric_fw_h_fw.json".to_string(), text));
    }

    let family = LatticeDiracFamily {
        template,
        config: tol.clone(),
    };
    let study = hbar_convergence_study(&family, &cfg.hbar, tol).map_err(|e| match e {
        fwlab_numeric::matfun::MatfunError::InvalidSweep(msg) => config_err(msg),
        other => numeric_err(other),
    })?;
    let worst_unitarity = random_unitarity_batch(cfg.random_checks, cfg.seed, cfg)?;

    let slope_ok = study.exact_agreement
        || (study.slope.unwrap_or(f64::NEG_INFINITY) >= cfg.min_slope
            && study.r_squared.unwrap_or(0.0) >= cfg.min_r_squared);
    let exact_ok =
        fw.odd_residual_norm <= tol.odd_tol * fw.h_norm && fw.spectrum_drift <= tol.drift_tol;
    let unitary_ok = worst_unitarity <= tol.unitarity_tol;
    let pass = slope_ok && exact_ok && unitary_ok;

    let mut table = String::new();
    row(&mut table, "model", &study.model);
    let _ = writeln!(
        table,
        "{:>10} {:>14} {:>14} {:>14}",
        "hbar", "diff", "debroglie", "odd_residual"
    );
    for i in 0..study.hbar.len() {
        let _ = writeln!(
            table,
            "{:>10.4} {:>14.6e} {:>14.6e} {:>14.6e}",
            study.hbar[i], study.diff[i], study.debroglie_ratio[i], study.odd_residual[i]
        );
    }
    let opt = |x: Option<f64>| x.map_or("n/a".to_string(), |v| format!("{v:.6}"));
    row(&mut table, "slope", opt(study.slope));
    row(&mut table, "r_squared", opt(study.r_squared));
    row(&mut table, "monotone", study.monotone);
    row(&mut table, "exact agreement", study.exact_agreement);
    row(
        &mut table,
        "odd residual / |H| at first hbar",
        format!("{:.3e}", fw.odd_residual_norm / fw.h_norm),
    );
    row(
        &mut table,
        "spectrum drift at first hbar",
        format!("{:.3e}", fw.spectrum_drift),
    );
    row(
        &mut table,
        "worst random unitarity defect",
        format!("{worst_unitarity:.3e}"),
    );
    row(&mut table, "verdict", verdict(pass));

    let result = json!({
        "study": study,
        "exactness": {
            "hbar": first,
            "odd_residual_relative": fw.odd_residual_norm / fw.h_norm,
            "spectrum_drift": fw.spectrum_drift,
            "unitarity_defect": fw.unitarity_defect,
            "eriksen_defect": fw.eriksen_defect,
            "blocks_separated": fw.blocks_separated,
        },
        "random_checks": { "count": cfg.random_checks, "seed": cfg.seed, "worst_unitarity_defect": worst_unitarity },
        "criteria": { "slope": slope_ok, "exactness": exact_ok, "unitarity": unitary_ok },
    });
    Ok(Outcome {
        pass,
        result,
        table,
        files,
    })
}

pub fn spin1_spectrum(cfg: &Spin1SpectrumConfig) -> Result<Outcome, Failure> {
    cfg.spec.validate().map_err(config_err)?;
    if cfg.levels == 0 {
        return Err(config_err("levels must be positive"));
    }
    if cfg.field_halvings == 1 || cfg.field_halvings == 2 {
        return Err(config_err(
            "field_halvings must be 0 or at least 3 (four points)",
        ));
    }
    let tol = &cfg.tolerances;
    let run = |spec: &Spin1LandauSpec| -> Result<SpectrumReport, Failure> {
        spin1_numeric_spectrum(spec, cfg.levels, tol).map_err(|e| match e {
            ModelError::TruncationTooSmall { .. } => config_err(e),
            other => numeric_err(other),
        })
    };
    let report = run(&cfg.spec)?;
    let bound = cfg.residual_bound();

    // at g = 2 levels are exactly degenerate, so stationary states inside a
    // group are arbitrary mixtures and the polarization formulas do not apply;
    // for g != 2 the degeneracy is lifted
    let landau = cfg.spec.g_factor == 2.0;
    let residual_ok = report.max_relative_residual <= bound;
    let groups_ok = !landau || report.max_group_spread <= bound;
    let polarization_ok = landau || report.max_polarization_error <= cfg.max_polarization_error;
    let zero_ok = landau || report.max_zero_mean <= cfg.max_zero_mean;

    let mut sweep = Value::Null;
    let mut sweep_ok = true;
    if cfg.field_halvings > 0 {
        let mut fields = vec![cfg.spec.field];
        let mut residuals = vec![report.max_relative_residual];
        for k in 1..=cfg.field_halvings {
            let spec = Spin1LandauSpec {
                field: cfg.spec.field / 2f64.powi(k as i32),
                ..cfg.spec.clone()
            };
            fields.push(spec.field);
            residuals.push(run(&spec)?.max_relative_residual);
        }
        let x: Vec<f64> = fields.iter().map(|f| f.abs().ln()).collect();
        let y: Vec<f64> = residuals
            .iter()
            .map(|r| r.max(f64::MIN_POSITIVE).ln())
            .collect();
        let fit = least_squares(&x, &y);
        sweep_ok = fit.is_some_and(|f| f.slope >= cfg.min_field_exponent);
        sweep = json!({
            "field": fields,
            "max_relative_residual": residuals,
            "exponent": fit.map(|f| f.slope),
            "r_squared": fit.map(|f| f.r_squared),
        });
    }
    let pass = residual_ok && groups_ok && polarization_ok && zero_ok && sweep_ok;

    let mut csv = String::from("n,lambda,E_num,E_analytic,residual\n");
    let mut table = String::new();
    let _ = writeln!(
        table,
        "{:>3} {:>3} {:>7} {:>20} {:>20} {:>11} {:>11}",
        "n", "lam", "group", "E_num", "E_analytic", "residual", "<S_z>"
    );
    for (l, e) in report.levels.iter().zip(&report.expectations) {
        let _ = writeln!(
            csv,
            "{},{},{:.17e},{:.17e},{:.6e}",
            l.n, l.lambda, l.energy, l.analytic_energy, l.residual
        );
        let _ = writeln!(
            table,
            "{:>3} {:>3} {:>7} {:>20.15} {:>20.15} {:>11.3e} {:>11.7}",
            l.n, l.lambda, l.group, l.energy, l.analytic_energy, l.residual, e.s_z
        );
    }
    row(
        &mut table,
        "max relative residual",
        format!("{:.3e} (bound {bound:.1e})", report.max_relative_residual),
    );
    let applies = |on: bool, v: f64| {
        if on {
            format!("{v:.3e}")
        } else {
            format!("{v:.3e} (not checked)")
        }
    };
    row(
        &mut table,
        "max degeneracy spread",
        applies(landau, report.max_group_spread),
    );
    row(
        &mut table,
        "max polarization error",
        applies(!landau, report.max_polarization_error),
    );
    row(
        &mut table,
        "max |<S_pi>|, |<S_pixB>|",
        applies(!landau, report.max_zero_mean),
    );
    row(
        &mut table,
        "hbar / S0",
        format!("{:.3e}", report.hbar_over_action),
    );
    if let Some(exp) = sweep.get("exponent").and_then(Value::as_f64) {
        row(&mut table, "field exponent", format!("{exp:.4}"));
    }
    row(&mut table, "verdict", verdict(pass));

    let result = json!({
        "report": report,
        "residual_bound": bound,
        "field_sweep": sweep,
        "checks_applied": {
            "degeneracy": landau,
            "polarization": !landau,
            "zero_means": !landau,
        },
        "criteria": {
            "residual": residual_ok,
            "degeneracy": groups_ok,
            "polarization": polarization_ok,
            "zero_means": zero_ok,
            "field_scaling": sweep_ok,
        },
    });
    Ok(Outcome {
        pass,
        result,
        table,
        files: vec![("spin1_spectrum.csv".to_string(), csv)],
    })
}
