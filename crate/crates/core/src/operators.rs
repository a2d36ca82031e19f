//! Weighted 2-shifts built from norm nets, toral and separate m-isometry
//! checks, the toral Cauchy dual and its subnormality decision.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::monotonicity::{is_jcm_net, Decision, DEFAULT_TOL};
use crate::poly::{Bivariate, BilinearPoly, MomentNet};

/// Relative tolerance for `w1(α) w2(α+ε₁) = w2(α) w1(α+ε₂)`.
pub const COMMUTATION_TOL: f64 = 1e-12;
/// Relative disagreement allowed between the two staircase paths.
pub const PATH_TOL: f64 = 1e-10;

/// Weights `w1[α₁][α₂]`, `w2[α₁][α₂]` for `0 <= α₁, α₂ <= order`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawShift")]
pub struct WeightedShift2 {
    pub order: usize,
    pub w1: Vec<Vec<f64>>,
    pub w2: Vec<Vec<f64>>,
}

#[derive(Deserialize)]
struct RawShift {
    order: usize,
    w1: Vec<Vec<f64>>,
    w2: Vec<Vec<f64>>,
}

impl TryFrom<RawShift> for WeightedShift2 {
    type Error = Error;
    fn try_from(r: RawShift) -> Result<Self> {
        WeightedShift2::new(r.order, r.w1, r.w2)
    }
}

impl WeightedShift2 {
    /// Checks shape and positivity. Commutation is checked by [`norm_net`].
    pub fn new(order: usize, w1: Vec<Vec<f64>>, w2: Vec<Vec<f64>>) -> Result<Self> {
        let square = |w: &Vec<Vec<f64>>| w.len() == order + 1 && w.iter().all(|r| r.len() == order + 1);
        if !square(&w1) || !square(&w2) {
            return Err(Error::Shape(format!("weight arrays must be {0}x{0}", order + 1)));
        }
        if w1.iter().chain(&w2).flatten().any(|w| !(w.is_finite() && *w > 0.0)) {
            return Err(Error::Domain("weights must be finite and positive".into()));
        }
        Ok(Self { order, w1, w2 })
    }

    /// Weights from a squared-norm net `f`, `w_j(α) = sqrt(f(α+ε_j)/f(α))`.
    /// `f` is sampled on `[0, order+1]²`.
    pub fn from_norm_fn(order: usize, f: impl Fn(usize, usize) -> f64) -> Result<Self> {
        let n = order + 1;
        let w1 = (0..n).map(|i| (0..n).map(|j| (f(i + 1, j) / f(i, j)).sqrt()).collect()).collect();
        let w2 = (0..n).map(|i| (0..n).map(|j| (f(i, j + 1) / f(i, j)).sqrt()).collect()).collect();
        Self::new(order, w1, w2)
    }

    pub fn ones(order: usize) -> Self {
        let w = vec![vec![1.0; order + 1]; order + 1];
        Self { order, w1: w.clone(), w2: w }
    }

    /// Largest relative commutation defect and where it occurs.
    pub fn commutation_defect(&self) -> (f64, [usize; 2]) {
        let mut worst = (0.0, [0, 0]);
        for i in 0..self.order {
            for j in 0..self.order {
                let lhs = self.w1[i][j] * self.w2[i + 1][j];
                let rhs = self.w2[i][j] * self.w1[i][j + 1];
                let rel = (lhs - rhs).abs() / lhs.max(rhs);
                if rel > worst.0 {
                    worst = (rel, [i, j]);
                }
            }
        }
        worst
    }

    pub fn is_commuting(&self) -> bool {
        self.commutation_defect().0 <= COMMUTATION_TOL
    }
}

/// `w_j(α) = sqrt(p(α+ε_j)/p(α))` on `[0, order]²`.
pub fn shift_from_poly(p: &BilinearPoly, order: usize) -> WeightedShift2 {
    WeightedShift2::from_norm_fn(order, |i, j| p.eval(i as f64, j as f64))
        .expect("bilinear polynomial is positive on the quadrant")
}

fn staircase(shift: &WeightedShift2, i: usize, j: usize) -> f64 {
    let mut v = 1.0;
    for k in 0..i {
        v *= shift.w1[k][0] * shift.w1[k][0];
    }
    for k in 0..j {
        v *= shift.w2[i][k] * shift.w2[i][k];
    }
    v
}

fn staircase_opposite(shift: &WeightedShift2, i: usize, j: usize) -> f64 {
    let mut v = 1.0;
    for k in 0..j {
        v *= shift.w2[0][k] * shift.w2[0][k];
    }
    for k in 0..i {
        v *= shift.w1[k][j] * shift.w1[k][j];
    }
    v
}

/// `||W^α e₀||²` on `[0, order]²`, multiplied along the ε₁-then-ε₂ path.
/// The ε₂-then-ε₁ path must agree to [`PATH_TOL`].
pub fn norm_net(shift: &WeightedShift2) -> Result<MomentNet> {
    let n = shift.order + 1;
    for i in 0..n {
        for j in 0..n {
            let (a, b) = (staircase(shift, i, j), staircase_opposite(shift, i, j));
            let defect = (a - b).abs() / a.max(b);
            if defect > PATH_TOL {
                return Err(Error::CommutationViolation { alpha: [i, j], defect });
            }
        }
    }
    Ok(MomentNet::from_fn(n, n, |i, j| staircase(shift, i, j)))
}

fn order_defect(net: &MomentNet, m: usize) -> Result<f64> {
    let betas: Vec<[usize; 2]> = (0..=m).map(|i| [i, m - i]).collect();
    let worst = |beta: &[usize; 2]| -> Result<f64> { Ok(net.forward_difference(*beta)?.max_abs()) };
    #[cfg(feature = "parallel")]
    let per_beta: Vec<f64> = {
        use rayon::prelude::*;
        betas.par_iter().map(worst).collect::<Result<_>>()?
    };
    #[cfg(not(feature = "parallel"))]
    let per_beta: Vec<f64> = betas.iter().map(worst).collect::<Result<_>>()?;
    Ok(per_beta.into_iter().fold(0.0, f64::max))
}

/// Whether every `Δ^β` with `|β| = m` of the norm net vanishes to
/// `tol * max|net|`. The defect is returned relative to `max|net|`.
pub fn toral_m_isometry_check(shift: &WeightedShift2, m: usize, tol: f64) -> Result<(bool, f64)> {
    if m == 0 || m > shift.order {
        return Err(Error::OrderExhausted {
            requested: [m, m],
            available: [shift.order + 1, shift.order + 1],
        });
    }
    let net = norm_net(shift)?;
    let defect = order_defect(&net, m)? / net.max_abs();
    Ok((defect <= tol, defect))
}

/// `(b, c, d)` read off the weights at the origin.
pub fn bcd(shift: &WeightedShift2) -> (f64, f64, f64) {
    let w10 = shift.w1[0][0] * shift.w1[0][0];
    let w20 = shift.w2[0][0] * shift.w2[0][0];
    let w2e1 = if shift.order >= 1 { shift.w2[1][0] * shift.w2[1][0] } else { w20 };
    (w10 - 1.0, w20 - 1.0, 1.0 - w10 - w20 + w10 * w2e1)
}

/// Whether the norm net is `1 + α₁b + α₂(c + α₁d)` with `(b, c, d)` from
/// [`bcd`], to `tol * max|net|`.
pub fn separate_2iso_check(shift: &WeightedShift2, tol: f64) -> Result<(bool, f64, f64, f64)> {
    let (b, c, d) = bcd(shift);
    let net = norm_net(shift)?;
    let scale = net.max_abs();
    let mut ok = true;
    for i in 0..net.rows() {
        for j in 0..net.cols() {
            let (x, y) = (i as f64, j as f64);
            let model = 1.0 + x * b + y * (c + x * d);
            ok &= (net.get(i, j) - model).abs() <= tol * scale;
        }
    }
    Ok((ok, b, c, d))
}

/// Entrywise reciprocal weights.
pub fn cauchy_dual(shift: &WeightedShift2) -> WeightedShift2 {
    let inv = |w: &Vec<Vec<f64>>| w.iter().map(|r| r.iter().map(|x| x.recip()).collect()).collect();
    WeightedShift2 { order: shift.order, w1: inv(&shift.w1), w2: inv(&shift.w2) }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DualDecision {
    /// The dual is jointly subnormal.
    pub decision: bool,
    /// Weight comparison, `d <= bc` and the JCM scan of the dual net agree.
    pub method_agreement: bool,
    /// `d = 0` or `w2(ε₁) <= w2(0)`.
    pub weight_test: bool,
    /// `d <= bc`.
    pub bcd_test: bool,
    pub jcm: Decision,
}

/// Subnormality of the Cauchy dual of a toral 3-isometric, separate
/// 2-isometric shift.
pub fn dual_subnormality_decision(shift: &WeightedShift2, cross_check_order: usize) -> Result<DualDecision> {
    if shift.order < 3 {
        return Err(Error::Hypothesis("shift order must be at least 3".into()));
    }
    let (toral3, defect) = toral_m_isometry_check(shift, 3, DEFAULT_TOL)?;
    if !toral3 {
        return Err(Error::Hypothesis(format!("not a toral 3-isometry (defect {defect:e})")));
    }
    let (separate, b, c, d) = separate_2iso_check(shift, DEFAULT_TOL)?;
    if !separate {
        return Err(Error::Hypothesis("not a separate 2-isometry".into()));
    }
    let scale = 1.0 + d.abs() + (b * c).abs();
    let d_zero = d.abs() <= 1e-12 * scale;
    let weight_test = d_zero || shift.w2[1][0] <= shift.w2[0][0] * (1.0 + 1e-14);
    let bcd_test = d <= b * c + 1e-12 * scale;
    let dual_net = norm_net(&cauchy_dual(shift))?;
    let jcm = is_jcm_net(&dual_net, cross_check_order, DEFAULT_TOL)?.decision;
    let jcm_says = jcm != Decision::FailWitness;
    Ok(DualDecision {
        decision: weight_test,
        method_agreement: weight_test == bcd_test && weight_test == jcm_says,
        weight_test,
        bcd_test,
        jcm,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IsometryReport {
    #[serde(deserialize_with = "order_keys")]
    pub is_toral_m: BTreeMap<usize, bool>,
    pub is_separate_2: bool,
    pub bcd: (f64, f64, f64),
    /// Largest relative defect over the checked `m`.
    pub max_defect: f64,
    /// Index rectangle `[0, r₀) x [0, r₁)` of the norm net the checks ran on.
    pub rectangle: [usize; 2],
}

// JSON object keys are strings; inside buffered (tagged) content they do not
// coerce to integers on their own.
fn order_keys<'de, D: serde::Deserializer<'de>>(de: D) -> std::result::Result<BTreeMap<usize, bool>, D::Error> {
    BTreeMap::<String, bool>::deserialize(de)?
        .into_iter()
        .map(|(k, v)| k.parse().map(|k| (k, v)).map_err(serde::de::Error::custom))
        .collect()
}

/// Toral checks for each `m` in `ms` plus the separate 2-isometry check.
pub fn isometry_report(shift: &WeightedShift2, ms: &[usize], tol: f64) -> Result<IsometryReport> {
    let mut is_toral_m = BTreeMap::new();
    let mut max_defect = 0.0f64;
    for &m in ms {
        let (ok, defect) = toral_m_isometry_check(shift, m, tol)?;
        is_toral_m.insert(m, ok);
        max_defect = max_defect.max(defect);
    }
    let (is_separate_2, b, c, d) = separate_2iso_check(shift, tol)?;
    Ok(IsometryReport {
        is_toral_m,
        is_separate_2,
        bcd: (b, c, d),
        max_defect,
        rectangle: [shift.order + 1, shift.order + 1],
    })
}
