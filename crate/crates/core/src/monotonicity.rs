//! Truncated complete-monotonicity checks and the closed-form criteria for
//! pencils and bilinear polynomials.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::{
    partial_fractions, BilinearPoly, FactoredPoly, MomentNet, PencilPoly, MERGE_TOL, SEPARATION_TOL,
};

/// Default relative tolerance for sign tests.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Values below `-NOISE_ULPS * 2^k * eps * max|f|` cannot be rounding noise.
const NOISE_ULPS: f64 = 8.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Decision {
    Pass,
    FailWitness,
    Inconclusive,
}

/// A violating `(-1)^|β| Δ^β f(α)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub beta: [usize; 2],
    pub alpha: [usize; 2],
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JcmVerdict {
    pub decision: Decision,
    pub witness: Option<Witness>,
    pub max_order_checked: usize,
    /// Smallest `(-1)^|β| Δ^β f(α)` seen.
    pub margin: f64,
    /// Absolute threshold the witness had to beat at its order.
    pub threshold: f64,
}

/// Candidate at one order: (α, β, value, threshold).
type Candidate = ([usize; 2], [usize; 2], f64, f64);

struct OrderScan {
    violation: Option<Candidate>,
    suspicious: bool,
    margin: f64,
}

fn scan_order(net: &MomentNet, betas: &[[usize; 2]], tol: f64, noise_floor: f64) -> Result<OrderScan> {
    let k = betas[0][0] + betas[0][1];
    let sign = if k.is_multiple_of(2) { 1.0 } else { -1.0 };
    let diff = |beta: &[usize; 2]| net.forward_difference(*beta);
    #[cfg(feature = "parallel")]
    let diffs: Vec<MomentNet> = {
        use rayon::prelude::*;
        betas.par_iter().map(diff).collect::<Result<_>>()?
    };
    #[cfg(not(feature = "parallel"))]
    let diffs: Vec<MomentNet> = betas.iter().map(diff).collect::<Result<_>>()?;

    let scale = diffs.iter().fold(0.0f64, |a, d| a.max(d.max_abs()));
    let threshold = tol * scale;
    let noise = noise_floor * 2f64.powi(k as i32);
    let mut violation: Option<Candidate> = None;
    let mut suspicious = false;
    let mut margin = f64::INFINITY;
    for (beta, d) in betas.iter().zip(&diffs) {
        for m in 0..d.rows() {
            for n in 0..d.cols() {
                let v = sign * d.get(m, n);
                margin = margin.min(v);
                if v < -threshold {
                    let cand = ([m, n], *beta, v, threshold);
                    let better = violation.is_none_or(|w| (cand.0, cand.1) < (w.0, w.1));
                    if better {
                        violation = Some(cand);
                    }
                } else if v < -noise {
                    suspicious = true;
                }
            }
        }
    }
    Ok(OrderScan { violation, suspicious, margin })
}

fn scan(net: &MomentNet, max_order: usize, tol: f64, axis_only: bool) -> Result<JcmVerdict> {
    let noise_floor = NOISE_ULPS * f64::EPSILON * net.max_abs();
    let mut margin = f64::INFINITY;
    let mut suspicious = false;
    for k in 0..=max_order {
        let betas: Vec<[usize; 2]> = if axis_only {
            vec![[k, 0]]
        } else {
            (0..=k).map(|i| [i, k - i]).collect()
        };
        let s = scan_order(net, &betas, tol, noise_floor)?;
        margin = margin.min(s.margin);
        suspicious |= s.suspicious;
        if let Some((alpha, beta, value, threshold)) = s.violation {
            return Ok(JcmVerdict {
                decision: Decision::FailWitness,
                witness: Some(Witness { beta, alpha, value }),
                max_order_checked: k,
                margin,
                threshold,
            });
        }
    }
    Ok(JcmVerdict {
        decision: if suspicious { Decision::Inconclusive } else { Decision::Pass },
        witness: None,
        max_order_checked: max_order,
        margin,
        threshold: 0.0,
    })
}

/// Checks `(-1)^k Δ^k seq(m) >= -tol * scale_k` for `k <= max_order`.
///
/// Witnesses are reported with `beta = [k, 0]`, `alpha = [m, 0]`.
pub fn is_cm_sequence(seq: &[f64], max_order: usize, tol: f64) -> Result<JcmVerdict> {
    if max_order >= seq.len() {
        return Err(Error::Length { len: seq.len(), order: max_order });
    }
    let net = MomentNet::from_values(seq.len(), 1, seq.to_vec())?;
    scan(&net, max_order, tol, true)
}

/// Checks every `|β| <= max_total_order` on the valid rectangle.
///
/// `Pass` means no violation up to the checked order and net size.
pub fn is_jcm_net(net: &MomentNet, max_total_order: usize, tol: f64) -> Result<JcmVerdict> {
    if max_total_order > net.order() {
        return Err(Error::OrderExhausted {
            requested: [max_total_order, max_total_order],
            available: [net.rows(), net.cols()],
        });
    }
    scan(net, max_total_order, tol, false)
}

/// `(-1)^K Δ^K seq(0)`, an upper proxy for the mass of the representing
/// measure at 0.
pub fn minimality_estimate(seq: &[f64], max_order: usize) -> Result<f64> {
    let verdict = is_cm_sequence(seq, max_order, DEFAULT_TOL)?;
    if verdict.decision == Decision::FailWitness {
        return Err(Error::Precondition(format!(
            "sequence is not completely monotone: {:?}",
            verdict.witness
        )));
    }
    Ok(alternating_difference_at_zero(seq, max_order))
}

/// `(-1)^k Δ^k seq(0)` for `k = 0..=max_order`.
pub fn minimality_profile(seq: &[f64], max_order: usize) -> Result<Vec<f64>> {
    minimality_estimate(seq, max_order)?;
    Ok((0..=max_order).map(|k| alternating_difference_at_zero(seq, k)).collect())
}

fn alternating_difference_at_zero(seq: &[f64], k: usize) -> f64 {
    let mut v: Vec<f64> = seq[..=k].to_vec();
    for len in (1..=k).rev() {
        for i in 0..len {
            v[i] -= v[i + 1];
        }
    }
    v[0]
}

fn same_degree(a: &FactoredPoly, b: &FactoredPoly) -> Result<usize> {
    if a.degree() != b.degree() {
        return Err(Error::Degree(format!("deg a = {} but deg b = {}", a.degree(), b.degree())));
    }
    Ok(a.degree())
}

/// `b_1 <= a_1 <= b_2 <= a_2 <= ... <= b_k <= a_k` on sorted roots.
pub fn interlacing_s(a: &FactoredPoly, b: &FactoredPoly) -> Result<bool> {
    same_degree(a, b)?;
    let (ar, br) = (a.sorted_roots(), b.sorted_roots());
    let chain: Vec<f64> = br.iter().zip(&ar).flat_map(|(x, y)| [*x, *y]).collect();
    Ok(chain.windows(2).all(|w| w[0] <= w[1]))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MeanInequalities {
    pub harmonic: bool,
    pub geometric: bool,
    pub arithmetic: bool,
}

impl MeanInequalities {
    pub fn all(&self) -> bool {
        self.harmonic && self.geometric && self.arithmetic
    }
}

/// Harmonic, geometric and arithmetic mean conditions between the roots.
pub fn mean_inequalities_n(a: &FactoredPoly, b: &FactoredPoly) -> Result<MeanInequalities> {
    same_degree(a, b)?;
    if a.roots().iter().chain(b.roots()).any(|r| *r == 0.0) {
        return Err(Error::ZeroRoot);
    }
    let inv = |p: &FactoredPoly| p.roots().iter().map(|r| r.recip()).sum::<f64>();
    let logprod = |p: &FactoredPoly| p.roots().iter().map(|r| r.ln()).sum::<f64>();
    let sum = |p: &FactoredPoly| p.roots().iter().sum::<f64>();
    Ok(MeanInequalities {
        harmonic: inv(a) <= inv(b),
        geometric: logprod(b) <= logprod(a),
        arithmetic: sum(b) <= sum(a),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BilinearCriterion {
    pub m: f64,
    pub jcm: bool,
}

/// `M = bc - ad`; the net is JCM exactly when `M >= 0`.
pub fn bilinear_criterion(p: &BilinearPoly) -> BilinearCriterion {
    let m = p.m_value();
    BilinearCriterion { m, jcm: m >= 0.0 }
}

/// Sufficient condition for bidegree (2,1).
pub fn bidegree21_sufficient(a: &FactoredPoly, b: &FactoredPoly) -> Result<bool> {
    if a.degree() != 2 || b.degree() != 2 {
        return Err(Error::Degree("both polynomials must have degree 2".into()));
    }
    let (ar, br) = (a.sorted_roots(), b.sorted_roots());
    let between = |x: f64| br[0] <= x && x <= br[1];
    Ok((between(ar[0]) || between(ar[1])) && br[0] + br[1] <= ar[0] + ar[1])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MixedVerdict {
    Sufficient,
    NecessaryFail,
    Inconclusive,
}

/// `deg a = 1`, `deg b = 2`.
pub fn bidegree21_mixed(a: &FactoredPoly, b: &FactoredPoly) -> Result<MixedVerdict> {
    if a.degree() != 1 || b.degree() != 2 {
        return Err(Error::Degree("need deg a = 1 and deg b = 2".into()));
    }
    let a1 = a.roots()[0];
    let br = b.sorted_roots();
    if br[0] <= a1 && a1 <= br[1] {
        Ok(MixedVerdict::Sufficient)
    } else if a1.recip() > br[0].recip() + br[1].recip() {
        Ok(MixedVerdict::NecessaryFail)
    } else {
        Ok(MixedVerdict::Inconclusive)
    }
}

/// Grid points where `a'(x) b(x) > a(x) b'(x)` beyond a relative slack.
pub fn derivative_violations(p: &PencilPoly, grid: &[f64]) -> Vec<f64> {
    grid.iter()
        .copied()
        .filter(|&x| {
            let lhs = p.a.derivative(x) * p.b.eval(x);
            let rhs = p.a.eval(x) * p.b.derivative(x);
            lhs > rhs + 1e-12 * lhs.abs().max(rhs.abs())
        })
        .collect()
}

/// `a' b <= a b'` on the whole grid. `false` rules out joint complete monotonicity.
pub fn derivative_necessary(p: &PencilPoly, grid: &[f64]) -> bool {
    derivative_violations(p, grid).is_empty()
}

fn distinct_roots(a: &FactoredPoly) -> Result<Vec<f64>> {
    let r = a.sorted_roots();
    for w in r.windows(2) {
        if w[1] - w[0] < SEPARATION_TOL.max(MERGE_TOL) {
            return Err(Error::CoincidentRoots { first: w[0], second: w[1] });
        }
    }
    Ok(r)
}

/// A point `(s0, t0)` where the weight `w_j(·, t0)` is negative, when the
/// sign of `(-1)^j b(-a_j)` allows one. Roots are indexed in ascending order.
pub fn hausdorff_obstruction(
    a: &FactoredPoly,
    b: &FactoredPoly,
    j: usize,
    t0: f64,
) -> Result<Option<(f64, f64)>> {
    let roots = distinct_roots(a)?;
    if j == 0 || j > roots.len() {
        return Err(Error::Index { index: j, len: roots.len() });
    }
    if !(t0 > 0.0 && t0 < 1.0) {
        return Err(Error::Domain(format!("t0 = {t0} must lie in (0, 1)")));
    }
    let aj = roots[j - 1];
    let sign = if j.is_multiple_of(2) { 1.0 } else { -1.0 };
    if sign * b.eval(-aj) >= 0.0 {
        return Ok(None);
    }
    let cj = coefficient_cj(a, b, &roots, j - 1);
    Ok(Some(((cj * t0.ln()).recip().exp(), t0)))
}

/// `c_j = b(-a_j) / (a_0 prod_{l != j} (a_l - a_j))`.
fn coefficient_cj(a: &FactoredPoly, b: &FactoredPoly, roots: &[f64], j: usize) -> f64 {
    let aj = roots[j];
    let denom = roots
        .iter()
        .enumerate()
        .filter(|(l, _)| *l != j)
        .fold(a.lead(), |acc, (_, al)| acc * (al - aj));
    b.eval(-aj) / denom
}

/// `c1 <= 0 && c1 + c2 <= 0`, equivalent to `c1 s^b1 + c2 s^b2 <= 0` on (0,1).
pub fn exp_combination_nonpositive(c1: f64, c2: f64, b1: f64, b2: f64) -> Result<bool> {
    if b1 >= b2 {
        return Err(Error::Ordering { lower: b1, upper: b2 });
    }
    Ok(c1 <= 0.0 && c1 + c2 <= 0.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoefficientDeterminants {
    pub det_a: f64,
    pub det_b: Option<f64>,
}

/// `det A = ad - bc`; JCM iff `det A <= 0`.
pub fn coefficient_matrix_bilinear(p: &BilinearPoly) -> CoefficientDeterminants {
    CoefficientDeterminants { det_a: p.a() * p.d() - p.b() * p.c(), det_b: None }
}

/// For a degree-(2,2) pencil: `det A` of the full 3x2 coefficient block
/// (always 0, the y^1 column being the only one with x^2) and
/// `det B = b_0 a_1 - a_0 b_1` on dense coefficients, which for monic
/// factors is `b1 b2 (a1 + a2) - a1 a2 (b1 + b2)`.
pub fn coefficient_matrix_pencil(p: &PencilPoly) -> Result<CoefficientDeterminants> {
    if p.a.degree() != 2 || p.b.degree() != 2 {
        return Err(Error::Shape("coefficient matrix test needs deg a = deg b = 2".into()));
    }
    let bc = p.b.coefficients();
    let ac = p.a.coefficients();
    Ok(CoefficientDeterminants { det_a: 0.0, det_b: Some(bc[0] * ac[1] - ac[0] * bc[1]) })
}

/// First `n` in `0..=n_max` for which the quadratic `b(x) + n a(x)` has
/// non-real roots.
///
/// `1/q(m)` with `q` quadratic and complex roots is the Laplace transform of
/// `e^{-αu} sin(βu)/β`, which changes sign, so a hit rules out joint complete
/// monotonicity. Slices of other degrees are skipped: a cubic with complex
/// roots can still have a completely monotone reciprocal.
pub fn complex_slice(p: &PencilPoly, n_max: usize) -> Option<usize> {
    (0..=n_max).find(|&n| quadratic_with_complex_roots(&slice_coefficients(p, n as f64)))
}

fn slice_coefficients(p: &PencilPoly, n: f64) -> Vec<f64> {
    let bc = p.b.coefficients();
    let ac = p.a.coefficients();
    let len = bc.len().max(ac.len());
    (0..len)
        .map(|i| bc.get(i).copied().unwrap_or(0.0) + n * ac.get(i).copied().unwrap_or(0.0))
        .collect()
}

fn quadratic_with_complex_roots(coeffs: &[f64]) -> bool {
    let mut c = coeffs.to_vec();
    while c.len() > 1 && *c.last().unwrap() == 0.0 {
        c.pop();
    }
    if c.len() != 3 {
        return false;
    }
    let disc = c[1] * c[1] - 4.0 * c[2] * c[0];
    disc < -1e-12 * c[1] * c[1]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriteriaReport {
    pub interlacing_s: bool,
    pub harmonic_n: bool,
    pub geometric_n: bool,
    pub arithmetic_n: bool,
    pub derivative_necessary: bool,
    pub detail: BTreeMap<String, String>,
}

/// Every closed-form criterion that applies to the pencil.
pub fn criteria_report(p: &PencilPoly, grid: &[f64]) -> CriteriaReport {
    let mut detail = BTreeMap::new();
    let (interlacing, means) = match (interlacing_s(&p.a, &p.b), mean_inequalities_n(&p.a, &p.b)) {
        (Ok(s), Ok(n)) => (s, n),
        (Ok(s), Err(e)) => {
            detail.insert("mean_inequalities".into(), e.to_string());
            (s, MeanInequalities { harmonic: s, geometric: s, arithmetic: s })
        }
        (Err(e), _) => {
            detail.insert("interlacing".into(), e.to_string());
            (false, MeanInequalities { harmonic: false, geometric: false, arithmetic: false })
        }
    };
    let violations = derivative_violations(p, grid);
    if let Some(x) = violations.first() {
        detail.insert("derivative_violation_x".into(), format!("{x}"));
    }
    let ratio = p.b.lead() / p.a.lead();
    detail.insert("c0".into(), format!("{ratio}"));
    if let Ok(pf) = partial_fractions(&p.b, &p.a) {
        let cs: Vec<String> = pf.terms.iter().map(|t| format!("{}", t.coeff)).collect();
        detail.insert("c_j".into(), cs.join(","));
    }
    if p.a.degree() == 2 && p.b.degree() == 2 {
        if let Ok(s) = bidegree21_sufficient(&p.a, &p.b) {
            detail.insert("bidegree21_sufficient".into(), s.to_string());
        }
        if let Ok(d) = coefficient_matrix_pencil(p) {
            detail.insert("det_b".into(), format!("{}", d.det_b.unwrap_or(f64::NAN)));
        }
    }
    if p.a.degree() == 1 && p.b.degree() == 2 {
        if let Ok(v) = bidegree21_mixed(&p.a, &p.b) {
            detail.insert("bidegree21_mixed".into(), format!("{v:?}"));
        }
    }
    CriteriaReport {
        interlacing_s: interlacing,
        harmonic_n: means.harmonic,
        geometric_n: means.geometric,
        arithmetic_n: means.arithmetic,
        derivative_necessary: violations.is_empty(),
        detail,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::net_from_pencil;

    fn fp(roots: &[f64]) -> FactoredPoly {
        FactoredPoly::monic(roots).unwrap()
    }

    #[test]
    fn cm_sequences() {
        let harmonic: Vec<f64> = (0..20).map(|m| 1.0 / (m as f64 + 1.0)).collect();
        assert_eq!(is_cm_sequence(&harmonic, 8, DEFAULT_TOL).unwrap().decision, Decision::Pass);
        let lin: Vec<f64> = (0..10).map(|m| m as f64).collect();
        let v = is_cm_sequence(&lin, 2, DEFAULT_TOL).unwrap();
        assert_eq!(v.decision, Decision::FailWitness);
        assert_eq!(v.witness.unwrap().beta, [1, 0]);
        assert!(is_cm_sequence(&lin, 10, DEFAULT_TOL).is_err());
    }

    #[test]
    fn remark_slice_has_no_low_order_witness() {
        // 1/p(m,1) = 1/(2m^2 + 10m + 14) has complex roots, but its first
        // negative alternating difference sits at order 76.
        let p = PencilPoly::monic(&[1.0, 2.0], &[3.0, 4.0]).unwrap();
        let seq: Vec<f64> = p.x_slice(1.0, 40).iter().map(|v| v.recip()).collect();
        let v = is_cm_sequence(&seq, 10, DEFAULT_TOL).unwrap();
        assert_ne!(v.decision, Decision::FailWitness);
        assert_eq!(complex_slice(&p, 4), Some(1));
        // Cubic slices are never flagged.
        let cubic = PencilPoly::monic(&[1.0, 2.0, 3.0], &[4.0, 5.0, 6.0]).unwrap();
        assert_eq!(complex_slice(&cubic, 10), None);
    }

    #[test]
    fn jcm_nets() {
        let product = MomentNet::square(12, |m, n| 1.0 / ((m + 1) * (n + 1)) as f64);
        assert_eq!(is_jcm_net(&product, 6, DEFAULT_TOL).unwrap().decision, Decision::Pass);

        let p = BilinearPoly::new(1.0, 0.0, 1.0, 1.0).unwrap();
        let v = is_jcm_net(&net_from_pencil(&p, 1, 8), 2, DEFAULT_TOL).unwrap();
        assert_eq!(v.decision, Decision::FailWitness);
        let w = v.witness.unwrap();
        assert_eq!((w.beta, w.alpha), ([1, 1], [0, 0]));
        assert!((w.value + 1.0 / 6.0).abs() < 1e-14);

        let q = PencilPoly::monic(&[1.0, 4.0], &[2.0, 3.0]).unwrap();
        let v = is_jcm_net(&net_from_pencil(&q, 1, 16), 6, DEFAULT_TOL).unwrap();
        assert_eq!(v.decision, Decision::Pass);
        assert!(is_jcm_net(&net_from_pencil(&q, 1, 4), 6, DEFAULT_TOL).is_err());
    }

    #[test]
    fn minimality() {
        let h: Vec<f64> = (0..30).map(|m| 1.0 / (m as f64 + 1.0)).collect();
        let prof = minimality_profile(&h, 12).unwrap();
        for (k, v) in prof.iter().enumerate() {
            assert!((v - 1.0 / (k as f64 + 1.0)).abs() < 1e-12);
        }
        assert!(prof.windows(2).all(|w| w[1] < w[0]));
        let ones = vec![1.0; 20];
        assert_eq!(minimality_estimate(&ones, 0).unwrap(), 1.0);
        assert_eq!(minimality_estimate(&ones, 5).unwrap(), 0.0);
        let atom: Vec<f64> = (0..30).map(|m| if m == 0 { 1.0 } else { 0.0 } + 1.0 / (m as f64 + 1.0)).collect();
        assert!((minimality_estimate(&atom, 12).unwrap() - (1.0 + 1.0 / 13.0)).abs() < 1e-12);
        let inc: Vec<f64> = (0..10).map(|m| m as f64).collect();
        assert!(matches!(minimality_estimate(&inc, 3), Err(Error::Precondition(_))));
    }

    #[test]
    fn interlacing_and_means() {
        assert!(!interlacing_s(&fp(&[2.0, 3.0]), &fp(&[1.0, 4.0])).unwrap());
        assert!(interlacing_s(&fp(&[1.0, 2.0]), &fp(&[1.0, 2.0])).unwrap());
        assert!(interlacing_s(&fp(&[4.0, 2.0]), &fp(&[3.0, 1.0])).unwrap());
        assert!(interlacing_s(&fp(&[1.0]), &fp(&[1.0, 2.0])).is_err());

        let all = MeanInequalities { harmonic: true, geometric: true, arithmetic: true };
        assert_eq!(mean_inequalities_n(&fp(&[2.0, 3.0]), &fp(&[1.0, 4.0])).unwrap(), all);
        assert_eq!(mean_inequalities_n(&fp(&[6.0, 9.0]), &fp(&[1.0, 5.0])).unwrap(), all);
        assert!(!interlacing_s(&fp(&[6.0, 9.0]), &fp(&[1.0, 5.0])).unwrap());
        assert!(matches!(mean_inequalities_n(&fp(&[0.0]), &fp(&[1.0])), Err(Error::ZeroRoot)));
    }

    #[test]
    fn bilinear_and_bidegree() {
        let m = |a, b, c, d| bilinear_criterion(&BilinearPoly::new(a, b, c, d).unwrap());
        assert_eq!(m(1.0, 0.0, 1.0, 1.0), BilinearCriterion { m: -1.0, jcm: false });
        assert_eq!(m(1.0, 1.0, 1.0, 1.0), BilinearCriterion { m: 0.0, jcm: true });
        assert_eq!(m(1.0, 1.0, 2.0, 3.0), BilinearCriterion { m: -1.0, jcm: false });

        assert!(bidegree21_sufficient(&fp(&[2.0, 3.0]), &fp(&[1.0, 4.0])).unwrap());
        assert!(!bidegree21_sufficient(&fp(&[3.0, 4.0]), &fp(&[1.0, 2.0])).unwrap());
        assert!(bidegree21_sufficient(&fp(&[1.0, 7.0]), &fp(&[1.0, 7.0])).unwrap());

        assert_eq!(bidegree21_mixed(&fp(&[2.0]), &fp(&[1.0, 3.0])).unwrap(), MixedVerdict::Sufficient);
        assert_eq!(bidegree21_mixed(&fp(&[1.0]), &fp(&[1.0, 5.0])).unwrap(), MixedVerdict::Sufficient);
        assert_eq!(bidegree21_mixed(&fp(&[0.5]), &fp(&[1.0, 2.0])).unwrap(), MixedVerdict::NecessaryFail);
        assert_eq!(bidegree21_mixed(&fp(&[10.0]), &fp(&[1.0, 2.0])).unwrap(), MixedVerdict::Inconclusive);
        assert!(bidegree21_mixed(&fp(&[1.0, 2.0]), &fp(&[1.0, 2.0])).is_err());
    }

    #[test]
    fn derivative_condition() {
        let grid: Vec<f64> = (0..=10).map(f64::from).collect();
        let p = PencilPoly::monic(&[1.0, 4.0], &[2.0, 3.0]).unwrap();
        assert!(derivative_necessary(&p, &grid));
        // a = (x+3)(x+4), b = (x+1)(x+2) at 0: a'b = 7*2 = 14, ab' = 12*3 = 36.
        let q = PencilPoly::monic(&[1.0, 2.0], &[3.0, 4.0]).unwrap();
        assert!(derivative_necessary(&q, &[0.0]));
        let r = PencilPoly::monic(&[2.0, 5.0], &[2.0, 5.0]).unwrap();
        assert!(derivative_necessary(&r, &grid));
        // b grows slower than a at 0: a = (x+1), b = (x+5).
        let s = PencilPoly::monic(&[5.0], &[1.0]).unwrap();
        assert!(!derivative_necessary(&s, &[0.0]));
    }

    #[test]
    fn obstruction_witness() {
        assert_eq!(hausdorff_obstruction(&fp(&[2.0, 3.0]), &fp(&[1.0, 4.0]), 1, 0.5).unwrap(), None);
        let (s0, t0) = hausdorff_obstruction(&fp(&[3.0, 4.0]), &fp(&[1.0, 2.0]), 1, 0.5)
            .unwrap()
            .unwrap();
        // c_1 = b(-3) / (4 - 3) = 2.
        assert!((s0 - (1.0 / (2.0 * 0.5f64.ln())).exp()).abs() < 1e-15);
        assert_eq!(t0, 0.5);
        let b = FactoredPoly::monic(&[3.0]).unwrap();
        assert!(hausdorff_obstruction(&fp(&[2.0]), &b, 1, 0.5).unwrap().is_some());
        assert!(matches!(
            hausdorff_obstruction(&fp(&[2.0]), &b, 2, 0.5),
            Err(Error::Index { index: 2, len: 1 })
        ));
    }

    #[test]
    fn exp_combination() {
        assert!(exp_combination_nonpositive(-2.0, 2.0, 2.0, 3.0).unwrap());
        assert!(exp_combination_nonpositive(0.0, 0.0, 1.0, 2.0).unwrap());
        assert!(!exp_combination_nonpositive(1.0, -5.0, 1.0, 2.0).unwrap());
        assert!(exp_combination_nonpositive(1.0, -5.0, 2.0, 2.0).is_err());
    }

    #[test]
    fn coefficient_determinants() {
        let d = coefficient_matrix_bilinear(&BilinearPoly::new(1.0, 1.0, 1.0, 1.0).unwrap());
        assert_eq!(d.det_a, 0.0);
        let p = PencilPoly::monic(&[1.0, 5.0], &[6.0, 9.0]).unwrap();
        assert_eq!(coefficient_matrix_pencil(&p).unwrap().det_b, Some(-249.0));
        let q = PencilPoly::monic(&[1.0, 4.0], &[2.0, 3.0]).unwrap();
        assert_eq!(coefficient_matrix_pencil(&q).unwrap().det_b, Some(-10.0));
        let r = PencilPoly::monic(&[1.0], &[2.0, 3.0]).unwrap();
        assert!(coefficient_matrix_pencil(&r).is_err());
    }

    #[test]
    fn report_consistency() {
        let grid: Vec<f64> = (0..=10).map(f64::from).collect();
        let r = criteria_report(&PencilPoly::monic(&[1.0, 3.0], &[2.0, 4.0]).unwrap(), &grid);
        assert!(r.interlacing_s && r.harmonic_n && r.geometric_n && r.arithmetic_n);
        let r = criteria_report(&PencilPoly::monic(&[1.0, 2.0], &[3.0, 4.0]).unwrap(), &grid);
        assert!(!r.interlacing_s);
    }
}
