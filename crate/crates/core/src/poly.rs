//! Polynomials in factored form, pencils `b(x) + a(x) y`, nets and their
//! forward differences, partial fractions.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Roots closer than this are merged into one repeated root.
pub const MERGE_TOL: f64 = 1e-9;
/// Distinct poles closer than this (and farther than `MERGE_TOL`) are rejected.
pub const SEPARATION_TOL: f64 = 1e-6;

/// `lead * prod_j (x + roots[j])` with `lead > 0`, `roots[j] >= 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawFactored")]
pub struct FactoredPoly {
    lead: f64,
    roots: Vec<f64>,
}

#[derive(Deserialize)]
struct RawFactored {
    lead: f64,
    roots: Vec<f64>,
}

impl TryFrom<RawFactored> for FactoredPoly {
    type Error = Error;
    fn try_from(raw: RawFactored) -> Result<Self> {
        FactoredPoly::new(raw.lead, raw.roots)
    }
}

impl FactoredPoly {
    pub fn new(lead: f64, roots: Vec<f64>) -> Result<Self> {
        if !(lead.is_finite() && lead > 0.0) {
            return Err(Error::InvalidPolynomial(format!("leading coefficient {lead} must be positive")));
        }
        if let Some(r) = roots.iter().find(|r| !(r.is_finite() && **r >= 0.0)) {
            return Err(Error::InvalidPolynomial(format!("root entry {r} must be finite and >= 0")));
        }
        Ok(Self { lead, roots })
    }

    pub fn constant(lead: f64) -> Result<Self> {
        Self::new(lead, Vec::new())
    }

    /// Monic polynomial with the given root entries.
    pub fn monic(roots: &[f64]) -> Result<Self> {
        Self::new(1.0, roots.to_vec())
    }

    pub fn lead(&self) -> f64 {
        self.lead
    }

    /// Root entries `r_j` as given (the polynomial vanishes at `-r_j`).
    pub fn roots(&self) -> &[f64] {
        &self.roots
    }

    pub fn sorted_roots(&self) -> Vec<f64> {
        let mut r = self.roots.clone();
        r.sort_by(f64::total_cmp);
        r
    }

    pub fn degree(&self) -> usize {
        self.roots.len()
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.roots.iter().fold(self.lead, |acc, r| acc * (x + r))
    }

    /// Derivative from the logarithmic-derivative sum, stable at the roots too.
    pub fn derivative(&self, x: f64) -> f64 {
        let mut total = 0.0;
        for skip in 0..self.roots.len() {
            let mut prod = self.lead;
            for (l, r) in self.roots.iter().enumerate() {
                if l != skip {
                    prod *= x + r;
                }
            }
            total += prod;
        }
        total
    }

    /// Ascending dense coefficients, expanded largest root first.
    pub fn coefficients(&self) -> Vec<f64> {
        let mut order = self.roots.clone();
        order.sort_by(|a, b| b.abs().total_cmp(&a.abs()));
        let mut c = vec![self.lead];
        for r in order {
            c = mul_linear(&c, r);
        }
        c
    }
}

/// `c(x) * (x + r)` on ascending coefficients.
fn mul_linear(c: &[f64], r: f64) -> Vec<f64> {
    let mut out = vec![0.0; c.len() + 1];
    for (i, ci) in c.iter().enumerate() {
        out[i] += r * ci;
        out[i + 1] += ci;
    }
    out
}

/// Horner evaluation of ascending coefficients.
pub fn eval_dense(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)
}

/// Long division `num = q * den + r` on ascending coefficients.
pub fn divide_dense(num: &[f64], den: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let dn = den.len() - 1;
    if num.len() <= dn {
        return (vec![0.0], num.to_vec());
    }
    let mut rem = num.to_vec();
    let lead = den[dn];
    let mut q = vec![0.0; num.len() - dn];
    for k in (0..q.len()).rev() {
        let f = rem[k + dn] / lead;
        q[k] = f;
        for (j, dj) in den.iter().enumerate() {
            rem[k + j] -= f * dj;
        }
    }
    rem.truncate(dn.max(1));
    (q, rem)
}

/// Evaluation at nonnegative points of a two-variable polynomial.
pub trait Bivariate {
    fn eval(&self, x: f64, y: f64) -> f64;
}

/// `p(x, y) = b(x) + a(x) y`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PencilPoly {
    pub b: FactoredPoly,
    pub a: FactoredPoly,
}

impl PencilPoly {
    pub fn new(b: FactoredPoly, a: FactoredPoly) -> Self {
        Self { b, a }
    }

    /// Monic pencil from two root lists.
    pub fn monic(broots: &[f64], aroots: &[f64]) -> Result<Self> {
        Ok(Self::new(FactoredPoly::monic(broots)?, FactoredPoly::monic(aroots)?))
    }

    /// The one-variable slice `m -> p(m, n)` sampled at `m = 0..len`.
    pub fn x_slice(&self, n: f64, len: usize) -> Vec<f64> {
        (0..len).map(|m| self.eval(m as f64, n)).collect()
    }
}

impl Bivariate for PencilPoly {
    fn eval(&self, x: f64, y: f64) -> f64 {
        self.b.eval(x) + self.a.eval(x) * y
    }
}

pub fn eval_pencil(p: &PencilPoly, x: f64, y: f64) -> f64 {
    p.eval(x, y)
}

/// `a + b x + c y + d x y` with `a > 0` and `b, c, d >= 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawBilinear")]
pub struct BilinearPoly {
    a: f64,
    b: f64,
    c: f64,
    d: f64,
}

#[derive(Deserialize)]
struct RawBilinear {
    a: f64,
    b: f64,
    c: f64,
    d: f64,
}

impl TryFrom<RawBilinear> for BilinearPoly {
    type Error = Error;
    fn try_from(r: RawBilinear) -> Result<Self> {
        BilinearPoly::new(r.a, r.b, r.c, r.d)
    }
}

impl BilinearPoly {
    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        if !(a.is_finite() && a > 0.0) {
            return Err(Error::InvalidPolynomial(format!("constant term {a} must be positive")));
        }
        for (name, v) in [("b", b), ("c", c), ("d", d)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::InvalidPolynomial(format!("coefficient {name}={v} must be >= 0")));
            }
        }
        Ok(Self { a, b, c, d })
    }

    pub fn a(&self) -> f64 {
        self.a
    }
    pub fn b(&self) -> f64 {
        self.b
    }
    pub fn c(&self) -> f64 {
        self.c
    }
    pub fn d(&self) -> f64 {
        self.d
    }

    /// `M = bc - ad`.
    pub fn m_value(&self) -> f64 {
        self.b * self.c - self.a * self.d
    }

    /// As a pencil `(a + b x) + (c + d x) y`, when `c + d x` is not identically zero.
    pub fn to_pencil(&self) -> Option<PencilPoly> {
        let lin = |k: f64, s: f64| {
            if s > 0.0 {
                FactoredPoly::new(s, vec![k / s])
            } else {
                FactoredPoly::constant(k)
            }
        };
        if self.c == 0.0 && self.d == 0.0 {
            return None;
        }
        Some(PencilPoly::new(lin(self.a, self.b).ok()?, lin(self.c, self.d).ok()?))
    }
}

impl Bivariate for BilinearPoly {
    fn eval(&self, x: f64, y: f64) -> f64 {
        self.a + self.b * x + self.c * y + self.d * x * y
    }
}

/// Either kind of polynomial the library accepts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "lowercase")]
pub enum TwoVarPoly {
    Bilinear(BilinearPoly),
    Pencil(PencilPoly),
}

impl Bivariate for TwoVarPoly {
    fn eval(&self, x: f64, y: f64) -> f64 {
        match self {
            TwoVarPoly::Bilinear(p) => p.eval(x, y),
            TwoVarPoly::Pencil(p) => p.eval(x, y),
        }
    }
}

impl From<BilinearPoly> for TwoVarPoly {
    fn from(p: BilinearPoly) -> Self {
        TwoVarPoly::Bilinear(p)
    }
}

impl From<PencilPoly> for TwoVarPoly {
    fn from(p: PencilPoly) -> Self {
        TwoVarPoly::Pencil(p)
    }
}

/// Dense rectangular net `f(m, n)`, `0 <= m < rows`, `0 <= n < cols`, row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentNet {
    rows: usize,
    cols: usize,
    values: Vec<f64>,
}

impl MomentNet {
    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> f64) -> Self {
        let mut values = Vec::with_capacity(rows * cols);
        for m in 0..rows {
            for n in 0..cols {
                values.push(f(m, n));
            }
        }
        Self { rows, cols, values }
    }

    /// Square net of order `order`, i.e. `(order + 1)^2` entries.
    pub fn square(order: usize, f: impl Fn(usize, usize) -> f64) -> Self {
        Self::from_fn(order + 1, order + 1, f)
    }

    pub fn from_values(rows: usize, cols: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != rows * cols {
            return Err(Error::Shape(format!("{} values for a {rows}x{cols} net", values.len())));
        }
        Ok(Self { rows, cols, values })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Largest total difference order that fits in both directions.
    pub fn order(&self) -> usize {
        self.rows.min(self.cols).saturating_sub(1)
    }

    pub fn get(&self, m: usize, n: usize) -> f64 {
        self.values[m * self.cols + n]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |a, v| a.max(v.abs()))
    }

    /// `Δ^β f` on the rectangle where it is defined.
    pub fn forward_difference(&self, beta: [usize; 2]) -> Result<MomentNet> {
        if beta[0] >= self.rows || beta[1] >= self.cols {
            return Err(Error::OrderExhausted {
                requested: beta,
                available: [self.rows, self.cols],
            });
        }
        let mut rows = self.rows;
        let cols = self.cols;
        let mut v = self.values.clone();
        for _ in 0..beta[0] {
            for m in 0..rows - 1 {
                for n in 0..cols {
                    v[m * cols + n] = v[(m + 1) * cols + n] - v[m * cols + n];
                }
            }
            rows -= 1;
        }
        v.truncate(rows * cols);
        let mut width = cols;
        for _ in 0..beta[1] {
            for m in 0..rows {
                for n in 0..width - 1 {
                    v[m * cols + n] = v[m * cols + n + 1] - v[m * cols + n];
                }
            }
            width -= 1;
        }
        let values = if width == cols {
            v
        } else {
            (0..rows).flat_map(|m| v[m * cols..m * cols + width].to_vec()).collect()
        };
        Ok(MomentNet { rows, cols: width, values })
    }
}

/// `(α)_β = prod_j α_j (α_j - 1) ... (α_j - β_j + 1)`.
///
/// Panics if the product overflows `u128`.
pub fn falling_factorial(alpha: [u64; 2], beta: [u64; 2]) -> u128 {
    let mut out: u128 = 1;
    for j in 0..2 {
        for i in 0..beta[j] {
            if i >= alpha[j] {
                return 0;
            }
            out = out
                .checked_mul((alpha[j] - i) as u128)
                .expect("falling factorial overflows u128");
        }
    }
    out
}

/// `f(m, n) = 1 / p(m, n)^l` for `0 <= m, n <= order`.
pub fn net_from_pencil<P: Bivariate + ?Sized>(p: &P, l: u32, order: usize) -> MomentNet {
    MomentNet::square(order, |m, n| p.eval(m as f64, n as f64).powi(l as i32).recip())
}

/// Rectangular variant of [`net_from_pencil`].
pub fn reciprocal_net<P: Bivariate + ?Sized>(p: &P, l: u32, rows: usize, cols: usize) -> MomentNet {
    MomentNet::from_fn(rows, cols, |m, n| p.eval(m as f64, n as f64).powi(l as i32).recip())
}

/// `coeff / (x + pole)^order`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PoleTerm {
    pub pole: f64,
    pub order: u32,
    pub coeff: f64,
}

/// Polynomial part (ascending coefficients) plus pole terms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartialFraction {
    pub quotient: Vec<f64>,
    pub terms: Vec<PoleTerm>,
}

impl PartialFraction {
    pub fn eval(&self, x: f64) -> f64 {
        let poly = eval_dense(&self.quotient, x);
        self.terms
            .iter()
            .fold(poly, |acc, t| acc + t.coeff / (x + t.pole).powi(t.order as i32))
    }

    /// Constant part `c0`.
    pub fn c0(&self) -> f64 {
        self.quotient.first().copied().unwrap_or(0.0)
    }

    pub fn has_repeated_poles(&self) -> bool {
        self.terms.iter().any(|t| t.order > 1)
    }
}

/// Sorted roots grouped within `MERGE_TOL` into (value, multiplicity).
pub fn merge_roots(roots: &[f64]) -> Vec<(f64, usize)> {
    let mut sorted = roots.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut groups: Vec<(f64, usize, f64)> = Vec::new();
    for r in sorted {
        match groups.last_mut() {
            Some((first, count, sum)) if r - *first <= MERGE_TOL => {
                *count += 1;
                *sum += r;
            }
            _ => groups.push((r, 1, r)),
        }
    }
    groups.into_iter().map(|(_, c, s)| (s / c as f64, c)).collect()
}

/// Removes root pairs of `num` and `den` that agree within `MERGE_TOL`.
pub fn cancel_common(num: &FactoredPoly, den: &FactoredPoly) -> (FactoredPoly, FactoredPoly) {
    let mut n = num.sorted_roots();
    let mut d = den.sorted_roots();
    let mut i = 0;
    while i < n.len() {
        if let Some(j) = d.iter().position(|r| (r - n[i]).abs() <= MERGE_TOL) {
            d.remove(j);
            n.remove(i);
        } else {
            i += 1;
        }
    }
    (
        FactoredPoly { lead: num.lead, roots: n },
        FactoredPoly { lead: den.lead, roots: d },
    )
}

/// Decomposes `num / den` into a polynomial part plus pole terms.
///
/// Common factors are cancelled first. Simple poles use the residue formula,
/// repeated poles a linear solve at Chebyshev points.
pub fn partial_fractions(num: &FactoredPoly, den: &FactoredPoly) -> Result<PartialFraction> {
    if den.degree() == 0 {
        return Err(Error::Degree("denominator must have degree >= 1".into()));
    }
    let (num, den) = cancel_common(num, den);
    let poles = merge_roots(&den.roots);
    for w in poles.windows(2) {
        if w[1].0 - w[0].0 < SEPARATION_TOL {
            return Err(Error::NearCoincidentPoles { first: w[0].0, second: w[1].0 });
        }
    }
    let num_dense = num.coefficients();
    let den_dense = den.coefficients();
    if den.degree() == 0 {
        return Ok(PartialFraction {
            quotient: num_dense.iter().map(|c| c / den.lead).collect(),
            terms: Vec::new(),
        });
    }
    let (quotient, _) = divide_dense(&num_dense, &den_dense);

    let terms = if poles.iter().all(|p| p.1 == 1) {
        poles
            .iter()
            .enumerate()
            .map(|(j, &(pj, _))| {
                let denom = poles
                    .iter()
                    .enumerate()
                    .filter(|(l, _)| *l != j)
                    .fold(den.lead, |acc, (_, &(pl, _))| acc * (pl - pj));
                PoleTerm { pole: pj, order: 1, coeff: num.eval(-pj) / denom }
            })
            .collect()
    } else {
        repeated_pole_terms(&num, &den, &quotient, &poles)?
    };
    Ok(PartialFraction { quotient, terms })
}

fn repeated_pole_terms(
    num: &FactoredPoly,
    den: &FactoredPoly,
    quotient: &[f64],
    poles: &[(f64, usize)],
) -> Result<Vec<PoleTerm>> {
    let unknowns: Vec<(usize, usize)> = poles
        .iter()
        .enumerate()
        .flat_map(|(i, &(_, mult))| (1..=mult).map(move |o| (i, o)))
        .collect();
    let k = unknowns.len();
    let hi = poles.last().map(|p| p.0).unwrap_or(0.0) + 1.0;
    // Chebyshev points on [-hi, 1]; the cleared-denominator identity is polynomial.
    let xs: Vec<f64> = (0..k)
        .map(|i| {
            let c = (std::f64::consts::PI * (2 * i + 1) as f64 / (2 * k) as f64).cos();
            0.5 * (1.0 - hi) + 0.5 * (1.0 + hi) * c
        })
        .collect();
    let mut mat = DMatrix::<f64>::zeros(k, k);
    let mut rhs = DVector::<f64>::zeros(k);
    for (row, &x) in xs.iter().enumerate() {
        rhs[row] = num.eval(x) - eval_dense(quotient, x) * den.eval(x);
        for (col, &(i, o)) in unknowns.iter().enumerate() {
            let mut v = den.lead;
            for (l, &(pl, mult)) in poles.iter().enumerate() {
                let e = if l == i { mult - o } else { mult };
                v *= (x + pl).powi(e as i32);
            }
            mat[(row, col)] = v;
        }
    }
    let sol = mat
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::Domain("singular partial-fraction system".into()))?;
    Ok(unknowns
        .iter()
        .zip(sol.iter())
        .map(|(&(i, o), &c)| PoleTerm { pole: poles[i].0, order: o as u32, coeff: c })
        .collect())
}
