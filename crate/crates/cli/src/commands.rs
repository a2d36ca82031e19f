//! Command implementations. Each returns a report and the process exit code.

use std::fmt::Write as _;
use std::path::Path;

use momenta_core::measures::quadrature::unit_interval_rule;
use momenta_core::measures::{
    bessel_i, bessel_j, measure_bilinear, measure_bilinear_signed, measure_pencil, verify_moments, LineAxis, Measure2D,
    MeasureKind, MeasureOptions, MeasureSource,
};
use momenta_core::monotonicity::{
    bidegree21_mixed, bidegree21_sufficient, bilinear_criterion, complex_slice, criteria_report, interlacing_s,
    is_jcm_net, mean_inequalities_n, Decision, JcmVerdict, MixedVerdict,
};
use momenta_core::operators::{dual_subnormality_decision, isometry_report, shift_from_poly};
use momenta_core::poly::{partial_fractions, reciprocal_net, BilinearPoly, FactoredPoly, PencilPoly, TwoVarPoly};
use momenta_core::Error;

use crate::report::{
    AnalyzeOutcome, BesselOutcome, BesselRow, MeasureOutcome, Outcome, PfracOutcome, ShiftOutcome, Verdict,
    VerifyOutcome,
};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_INCONCLUSIVE: i32 = 2;
pub const EXIT_USAGE: i32 = 64;
pub const EXIT_IO: i32 = 74;

/// A failure with the exit code it maps to.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Self {
        Self { code: EXIT_USAGE, message: message.into() }
    }

    pub fn io(path: &Path, e: std::io::Error) -> Self {
        Self { code: EXIT_IO, message: format!("{}: {e}", path.display()) }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Precondition(_) => EXIT_FAIL,
            Error::QuadratureNonconvergence { .. } | Error::SeriesTruncation { .. } | Error::Hypothesis(_) => {
                EXIT_INCONCLUSIVE
            }
            _ => EXIT_USAGE,
        };
        Self { code, message: e.to_string() }
    }
}

pub type CmdResult = Result<(Outcome, i32), Failure>;

fn verdict_code(v: Verdict) -> i32 {
    match v {
        Verdict::Jcm | Verdict::JcmMinimal => EXIT_PASS,
        Verdict::NotJcm => EXIT_FAIL,
        Verdict::Inconclusive => EXIT_INCONCLUSIVE,
    }
}

/// A pencil of degree at most one in `x` is bilinear.
fn as_bilinear(p: &TwoVarPoly) -> Option<BilinearPoly> {
    match p {
        TwoVarPoly::Bilinear(b) => Some(*b),
        TwoVarPoly::Pencil(q) if q.a.degree() <= 1 && q.b.degree() <= 1 => {
            let (bc, ac) = (q.b.coefficients(), q.a.coefficients());
            let at = |c: &[f64], i: usize| c.get(i).copied().unwrap_or(0.0);
            BilinearPoly::new(at(&bc, 0), at(&bc, 1), at(&ac, 0), at(&ac, 1)).ok()
        }
        TwoVarPoly::Pencil(_) => None,
    }
}

fn pencil_verdict(p: &PencilPoly, net_size: usize, check: &JcmVerdict) -> (Verdict, String, Option<usize>) {
    let (a, b) = (&p.a, &p.b);
    let equal = a.degree() == b.degree();
    if equal && interlacing_s(a, b).unwrap_or(false) {
        return (Verdict::JcmMinimal, "interlacing condition b1 <= a1 <= b2 <= ... <= bk <= ak holds".into(), None);
    }
    if a.degree() == 2 && b.degree() == 2 && bidegree21_sufficient(a, b).unwrap_or(false) {
        return (
            Verdict::JcmMinimal,
            "degree-2 condition: a root of a lies between the roots of b and b1 + b2 <= a1 + a2".into(),
            None,
        );
    }
    let mixed = if a.degree() == 1 && b.degree() == 2 { bidegree21_mixed(a, b).ok() } else { None };
    if mixed == Some(MixedVerdict::Sufficient) {
        return (Verdict::Jcm, "degree-(1,2) condition b1 <= a1 <= b2 holds".into(), None);
    }
    if equal {
        if let Ok(n) = mean_inequalities_n(a, b) {
            let failed: Vec<&str> = [(n.harmonic, "harmonic"), (n.geometric, "geometric"), (n.arithmetic, "arithmetic")]
                .iter()
                .filter(|(ok, _)| !ok)
                .map(|(_, name)| *name)
                .collect();
            if !failed.is_empty() {
                return (Verdict::NotJcm, format!("mean inequality violated: {}", failed.join(", ")), None);
            }
        }
    }
    if mixed == Some(MixedVerdict::NecessaryFail) {
        return (Verdict::NotJcm, "degree-(1,2) necessary condition 1/a1 <= 1/b1 + 1/b2 fails".into(), None);
    }
    let grid: Vec<f64> = (0..=net_size).map(|x| x as f64).collect();
    if let Some(x) = momenta_core::monotonicity::derivative_violations(p, &grid).first() {
        return (Verdict::NotJcm, format!("derivative condition a'b <= ab' fails at x = {x}"), None);
    }
    if let Some(n) = complex_slice(p, net_size) {
        return (Verdict::NotJcm, format!("slice b(x) + {n} a(x) is a quadratic with non-real roots"), Some(n));
    }
    if let (Decision::FailWitness, Some(w)) = (check.decision, check.witness) {
        return (
            Verdict::NotJcm,
            format!("negative alternating difference beta={:?} alpha={:?} value={:e}", w.beta, w.alpha, w.value),
            None,
        );
    }
    let why = match check.decision {
        Decision::Inconclusive => "no criterion applies; some differences sit at the rounding floor",
        _ => "no criterion applies and no violation was found",
    };
    (Verdict::Inconclusive, format!("{why} up to order {}", check.max_order_checked), None)
}

pub fn analyze(poly: &TwoVarPoly, order: usize, net_size: usize, tol: f64) -> CmdResult {
    if order > net_size {
        return Err(Failure::usage(format!("order {order} exceeds net size {net_size}")));
    }
    let net = reciprocal_net(poly, 1, net_size + 1, net_size + 1);
    let net_check = is_jcm_net(&net, order, tol)?;
    let mut out = AnalyzeOutcome {
        poly: poly.clone(),
        verdict: Verdict::Inconclusive,
        justification: String::new(),
        bilinear: None,
        criteria: None,
        complex_slice: None,
        net_check,
        measure_kind: None,
    };
    if let Some(b) = as_bilinear(poly) {
        let crit = bilinear_criterion(&b);
        out.verdict = if crit.jcm { Verdict::Jcm } else { Verdict::NotJcm };
        out.justification = format!(
            "bilinear criterion: M = bc - ad = {} {} 0",
            crit.m,
            if crit.jcm { ">=" } else { "<" }
        );
        if crit.jcm {
            let opts = MeasureOptions { grid_size: 2, ..MeasureOptions::default() };
            out.measure_kind = Some(measure_bilinear(&b, 1, &opts)?.kind);
        }
        out.bilinear = Some(crit);
    } else if let TwoVarPoly::Pencil(p) = poly {
        let grid: Vec<f64> = (0..=net_size).map(|x| x as f64).collect();
        out.criteria = Some(criteria_report(p, &grid));
        let (verdict, why, slice) = pencil_verdict(p, net_size, &out.net_check);
        out.verdict = verdict;
        out.justification = why;
        out.complex_slice = slice;
    }
    let code = verdict_code(out.verdict);
    Ok((Outcome::Analyze(out), code))
}

#[derive(Debug, Clone)]
pub struct MeasureArgs {
    pub l: u32,
    pub numerator: Option<FactoredPoly>,
    pub t_nodes: usize,
    pub grid_size: usize,
    pub verify: Option<[usize; 2]>,
    pub allow_signed: bool,
    pub order: usize,
    pub net_size: usize,
    pub tol: f64,
}

/// Builds the measure; the caller writes it out.
pub fn build_measure(poly: &TwoVarPoly, args: &MeasureArgs) -> Result<Measure2D, Failure> {
    let opts = MeasureOptions { grid_size: args.grid_size, ..MeasureOptions::default() };
    if let (Some(b), None) = (as_bilinear(poly), &args.numerator) {
        return Ok(if args.allow_signed {
            measure_bilinear_signed(&b, args.l, &opts)?
        } else {
            measure_bilinear(&b, args.l, &opts)?
        });
    }
    let TwoVarPoly::Pencil(p) = poly else {
        return Err(Failure::usage("a numerator needs a pencil polynomial"));
    };
    if args.l != 1 {
        return Err(Failure::usage("pencil measures support l = 1 only"));
    }
    if !args.allow_signed {
        let (outcome, _) = analyze(poly, args.order, args.net_size, args.tol)?;
        if let Outcome::Analyze(a) = outcome {
            if !matches!(a.verdict, Verdict::Jcm | Verdict::JcmMinimal) {
                return Err(Failure {
                    code: EXIT_FAIL,
                    message: format!(
                        "no positive representing measure is certified ({}: {}); pass --allow-signed to build it anyway",
                        crate::report::verdict_name(a.verdict),
                        a.justification
                    ),
                });
            }
        }
    }
    let (t_grid, _) = unit_interval_rule(args.t_nodes);
    Ok(measure_pencil(p, args.numerator.as_ref(), &t_grid, &opts)?)
}

/// Plot rows `s,t,value` for whatever representation the measure has.
pub fn grid_csv(m: &Measure2D) -> String {
    let mut out = String::from("s,t,value\n");
    if let Some(g) = &m.grid {
        for (s, t, v) in g.rows() {
            let _ = writeln!(out, "{s},{t},{v}");
        }
    }
    if let Some(line) = &m.line {
        for (x, v) in line.s_nodes.iter().zip(&line.values) {
            let (s, t) = match line.axis {
                LineAxis::S => (*x, x.powf(line.exponent)),
                LineAxis::T if m.kind == MeasureKind::SliceFamily => (1.0, *x),
                LineAxis::T => (x.powf(line.exponent), *x),
            };
            let _ = writeln!(out, "{s},{t},{v}");
        }
    }
    for a in &m.atoms {
        let _ = writeln!(out, "{},{},{}", a.s, a.t, a.mass);
    }
    out
}

pub fn measure(poly: &TwoVarPoly, args: &MeasureArgs, out: Option<&Path>, emit_grid: Option<&Path>) -> CmdResult {
    let m = build_measure(poly, args)?;
    let max_rel_error = match args.verify {
        Some([mm, nn]) => Some(verify_moments(&m, poly, args.l, mm, nn)?),
        None => None,
    };
    if let Some(path) = out {
        let json = serde_json::to_string_pretty(&m).map_err(|e| Failure::usage(e.to_string()))?;
        std::fs::write(path, json + "\n").map_err(|e| Failure::io(path, e))?;
    }
    if let Some(path) = emit_grid {
        std::fs::write(path, grid_csv(&m)).map_err(|e| Failure::io(path, e))?;
    }
    let outcome = MeasureOutcome {
        poly: poly.clone(),
        numerator: args.numerator.clone(),
        kind: m.kind,
        signed: m.signed,
        min_density: m.min_density,
        atoms: m.atoms.len(),
        max_rel_error,
        out: out.map(|p| p.display().to_string()),
        grid_csv: emit_grid.map(|p| p.display().to_string()),
    };
    Ok((Outcome::Measure(outcome), EXIT_PASS))
}

pub fn shift(poly: &TwoVarPoly, net_size: usize, cross_check_order: usize, tol: f64) -> CmdResult {
    let Some(b) = as_bilinear(poly) else {
        return Err(Failure::usage("shift needs a bilinear polynomial"));
    };
    if cross_check_order > net_size {
        return Err(Failure::usage(format!("order {cross_check_order} exceeds net size {net_size}")));
    }
    let s = shift_from_poly(&b, net_size);
    let ms: Vec<usize> = (1..=3).filter(|m| *m <= net_size).collect();
    let isometry = isometry_report(&s, &ms, tol)?;
    let dual = dual_subnormality_decision(&s, cross_check_order)?;
    let code = if dual.decision { EXIT_PASS } else { EXIT_FAIL };
    Ok((Outcome::Shift(ShiftOutcome { poly: poly.clone(), isometry, dual }), code))
}

pub fn pfrac(num: &FactoredPoly, den: &FactoredPoly) -> CmdResult {
    let pf = partial_fractions(num, den)?;
    let residual = (0..=20)
        .map(|i| {
            let x = i as f64 / 2.0;
            let exact = num.eval(x) / den.eval(x);
            (pf.eval(x) - exact).abs() / exact.abs().max(f64::MIN_POSITIVE)
        })
        .fold(0.0, f64::max);
    let outcome = PfracOutcome {
        numerator: num.clone(),
        denominator: den.clone(),
        quotient: pf.quotient,
        terms: pf.terms,
        residual,
    };
    Ok((Outcome::Pfrac(outcome), EXIT_PASS))
}

pub fn bessel(nu: f64, zs: &[f64]) -> CmdResult {
    let rows = zs
        .iter()
        .map(|&z| {
            let (i, j) = (bessel_i(nu, z)?, bessel_j(nu, z)?);
            Ok(BesselRow { nu, z, i: i.value, j: j.value, terms_used: i.terms_used.max(j.terms_used) })
        })
        .collect::<Result<Vec<_>, Error>>()?;
    Ok((Outcome::Bessel(BesselOutcome { rows }), EXIT_PASS))
}

pub fn verify(path: &Path, mm: usize, nn: usize, max_error: f64) -> CmdResult {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::io(path, e))?;
    let m: Measure2D =
        serde_json::from_str(&text).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
    let (poly, l) = match &m.source {
        MeasureSource::Bilinear { poly, l } => (TwoVarPoly::Bilinear(*poly), *l),
        MeasureSource::Pencil(pm) => (TwoVarPoly::Pencil(pm.pencil.clone()), 1),
    };
    let err = verify_moments(&m, &poly, l, mm, nn)?;
    let passed = err <= max_error;
    let outcome = VerifyOutcome { path: path.display().to_string(), kind: m.kind, max_rel_error: err, passed };
    Ok((Outcome::Verify(outcome), if passed { EXIT_PASS } else { EXIT_FAIL }))
}
