//! Slice-family measures `ν_t(ds) dt` for `c(m) / (b(m) + a(m) n)`.
//!
//! With `b/a = c0 + Σ c_j/(x + a_j)` and `τ = t^{(c0-1)/k}`,
//! `ν_t = μ ⋄ μ_{1,t} ⋄ … ⋄ μ_{k,t}` where `μ` represents `c(m)/a(m)` and
//! `μ_{j,t} = τ δ_1 + w_j(s,t) ds`.

use serde::{Deserialize, Serialize};

use super::bessel::{bessel_i_scaled, bessel_j_value};
use super::convolution::{mult_convolve, Measure1D};
use super::{interior_nodes, DensityGrid, LineAxis, LineDensity, Measure2D, MeasureKind, MeasureOptions, MeasureSource};
use crate::error::{Error, Result};
use crate::poly::{cancel_common, merge_roots, partial_fractions, FactoredPoly, PencilPoly, PoleTerm};

/// Factor structure of the slice family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PencilMeasure {
    pub pencil: PencilPoly,
    pub numerator: Option<FactoredPoly>,
    /// Constant part of `b/a` after cancelling common roots.
    pub c0: f64,
    /// Distinct roots `a_j` of the reduced `a`.
    pub poles: Vec<f64>,
    /// `c_j` of `b/a`.
    pub coeffs: Vec<f64>,
    /// Mass of `μ` at `s = 1`.
    pub base_atom: f64,
    /// `μ` density in `u`: `Σ coeff u^{order-1} e^{-pole u} / (order-1)!`.
    pub base_terms: Vec<PoleTerm>,
}

impl PencilMeasure {
    pub fn new(p: &PencilPoly, numerator: Option<&FactoredPoly>) -> Result<Self> {
        if p.a.roots().iter().chain(p.b.roots()).any(|r| *r <= 0.0) {
            return Err(Error::Domain("slice construction needs all roots of a and b positive".into()));
        }
        if p.b.degree() > p.a.degree() {
            return Err(Error::Degree(format!(
                "deg b = {} exceeds deg a = {}",
                p.b.degree(),
                p.a.degree()
            )));
        }
        let one = FactoredPoly::constant(1.0)?;
        let c = numerator.unwrap_or(&one);
        if c.degree() > p.a.degree() {
            return Err(Error::Degree("numerator degree exceeds deg a".into()));
        }
        let (b_red, a_red) = cancel_common(&p.b, &p.a);
        for (r, mult) in merge_roots(a_red.roots()) {
            if mult > 1 {
                return Err(Error::CoincidentRoots { first: r, second: r });
            }
        }
        let (c0, poles, coeffs) = if a_red.degree() == 0 {
            (b_red.lead() / a_red.lead(), Vec::new(), Vec::new())
        } else {
            let pf = partial_fractions(&b_red, &a_red).map_err(|e| match e {
                Error::NearCoincidentPoles { first, second } => Error::CoincidentRoots { first, second },
                other => other,
            })?;
            (
                pf.c0(),
                pf.terms.iter().map(|t| t.pole).collect(),
                pf.terms.iter().map(|t| t.coeff).collect(),
            )
        };
        let (base_atom, base_terms) = if p.a.degree() == 0 {
            (c.lead() / p.a.lead(), Vec::new())
        } else {
            let pf = partial_fractions(c, &p.a)?;
            if pf.quotient.len() > 1 {
                return Err(Error::Degree("numerator degree exceeds deg a".into()));
            }
            (pf.c0(), pf.terms)
        };
        Ok(Self {
            pencil: p.clone(),
            numerator: numerator.cloned(),
            c0,
            poles,
            coeffs,
            base_atom,
            base_terms,
        })
    }

    pub fn numerator_at(&self, m: f64) -> f64 {
        self.numerator.as_ref().map_or(1.0, |c| c.eval(m))
    }

    /// Exponent of the equal split `τ = t^{(c0-1)/k}`.
    pub fn split_exponent(&self) -> f64 {
        if self.poles.is_empty() {
            self.c0 - 1.0
        } else {
            (self.c0 - 1.0) / self.poles.len() as f64
        }
    }

    /// Some `c_j > 0`: the slices may carry negative density.
    pub fn has_positive_coeff(&self) -> bool {
        self.coeffs.iter().any(|c| *c > 0.0)
    }

    /// Density of `μ` with respect to `du`.
    pub fn base_u_density(&self, u: f64) -> f64 {
        self.base_terms
            .iter()
            .map(|t| {
                let o = t.order as i32;
                t.coeff * u.powi(o - 1) * (-t.pole * u).exp() / libm::tgamma(o as f64)
            })
            .sum()
    }

    /// Density of `μ_{j,t}` with respect to `du`, for `v = -ln t`.
    pub fn factor_u_density(&self, j: usize, u: f64, v: f64) -> f64 {
        let x = -self.coeffs[j] * v;
        (-self.split_exponent() * v - self.poles[j] * u).exp() * kernel_s(x, u)
    }

    /// `ν_t` on a log grid with `len` samples per factor.
    pub fn slice(&self, t: f64, len: usize) -> Result<Measure1D> {
        if !(t > 0.0 && t < 1.0) {
            return Err(Error::Domain(format!("t = {t} must lie in (0, 1)")));
        }
        let v = -t.ln();
        let len = len.max(8);
        let mut extent = 1.0f64;
        if let Some(pmin) = self.base_terms.iter().map(|t| t.pole).reduce(f64::min) {
            let omax = self.base_terms.iter().map(|t| t.order).max().unwrap_or(1) as f64;
            extent = extent.max((40.0 + 10.0 * (omax - 1.0)) / pmin);
        }
        for (a, c) in self.poles.iter().zip(&self.coeffs) {
            let x = -c * v;
            let e = if x > 0.0 { (x.sqrt() / a + (40.0 / a).sqrt()).powi(2) } else { 40.0 / a };
            extent = extent.max(e);
        }
        let step = extent / (len - 1) as f64;

        let mut nu = Measure1D::default();
        if self.base_atom != 0.0 {
            nu = nu.with_atom(1.0, self.base_atom);
        }
        if !self.base_terms.is_empty() {
            nu.pieces.push(super::convolution::LogGrid::sample(step, len, |u| self.base_u_density(u)));
        }
        if self.poles.is_empty() {
            let scale = t.powf(self.c0 - 1.0);
            for a in &mut nu.atoms {
                a.mass *= scale;
            }
            for p in &mut nu.pieces {
                p.values.iter_mut().for_each(|x| *x *= scale);
            }
            return Ok(nu);
        }
        let tau = t.powf(self.split_exponent());
        for j in 0..self.poles.len() {
            let mut factor = Measure1D::from_log_density(step, len, |u| self.factor_u_density(j, u, v));
            factor = factor.with_atom(1.0, tau);
            nu = mult_convolve(&nu, &factor)?;
        }
        Ok(nu)
    }
}

/// `Σ_{l>=1} x^l y^{l-1} / ((l-1)! l!)`: `sqrt(x/y) I_1(2 sqrt(xy))` for
/// `x > 0`, `-sqrt(|x|/y) J_1(2 sqrt(|x|y))` for `x < 0`.
pub(crate) fn kernel_s(x: f64, y: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    if y == 0.0 {
        return x;
    }
    if x > 0.0 {
        let z = 2.0 * (x * y).sqrt();
        return (x / y).sqrt() * (z + bessel_i_scaled(1.0, z).ln()).exp();
    }
    if (x * y).abs() <= 25.0 {
        return raw_series(x, y);
    }
    -(-x / y).sqrt() * bessel_j_value(1.0, 2.0 * (-x * y).sqrt())
}

fn raw_series(x: f64, y: f64) -> f64 {
    // x Σ_k (xy)^k / (k! (k+1)!)
    let q = x * y;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..500 {
        let kf = k as f64;
        term *= q / (kf * (kf + 1.0));
        sum += term;
        if term.abs() < 1e-17 * sum.abs() {
            break;
        }
    }
    x * sum
}

fn check_unit(s: f64, t: f64) -> Result<()> {
    if !(s > 0.0 && s < 1.0 && t > 0.0 && t < 1.0) {
        return Err(Error::Domain(format!("(s, t) = ({s}, {t}) must lie in (0, 1)²")));
    }
    Ok(())
}

/// `w_j(s,t) = t^{(ratio-1)/k} s^{a_j-1} Σ_l (c_j ln t)^l (-ln s)^{l-1} / ((l-1)! l!)`,
/// through the `I_1` closed form when `c_j < 0`.
pub fn weight_wj(s: f64, t: f64, aj: f64, cj: f64, ratio: f64, k: u32) -> Result<f64> {
    check_unit(s, t)?;
    let prefactor = t.powf((ratio - 1.0) / k as f64) * s.powf(aj - 1.0);
    Ok(prefactor * kernel_s(cj * t.ln(), -s.ln()))
}

/// [`weight_wj`] summed term by term from the series, for any sign of `c_j`.
pub fn weight_wj_series(s: f64, t: f64, aj: f64, cj: f64, ratio: f64, k: u32) -> Result<f64> {
    check_unit(s, t)?;
    let (x, y) = (cj * t.ln(), -s.ln());
    let mut total = 0.0;
    let mut term = x; // l = 1
    for l in 1..500u32 {
        total += term;
        let lf = l as f64;
        let next = term * x * y / (lf * (lf + 1.0));
        if next.abs() < 1e-18 * total.abs() || next == 0.0 {
            break;
        }
        term = next;
    }
    Ok(t.powf((ratio - 1.0) / k as f64) * s.powf(aj - 1.0) * total)
}

/// Slice-family measure of `c(m) / p(m, n)`, sampled at `t_grid`.
pub fn measure_pencil(
    p: &PencilPoly,
    numerator: Option<&FactoredPoly>,
    t_grid: &[f64],
    opts: &MeasureOptions,
) -> Result<Measure2D> {
    let pm = PencilMeasure::new(p, numerator)?;
    let s_nodes = interior_nodes(opts.grid_size);
    let build = |t: &f64| -> Result<(Vec<f64>, f64, f64)> {
        let nu = pm.slice(*t, opts.slice_len)?;
        let row = s_nodes.iter().map(|s| nu.density_at(*s)).collect();
        let atom: f64 = nu.atoms.iter().filter(|a| a.loc == 1.0).map(|a| a.mass).sum();
        Ok((row, atom, nu.min_density()))
    };
    #[cfg(feature = "parallel")]
    let slices: Vec<(Vec<f64>, f64, f64)> = {
        use rayon::prelude::*;
        t_grid.par_iter().map(build).collect::<Result<_>>()?
    };
    #[cfg(not(feature = "parallel"))]
    let slices: Vec<(Vec<f64>, f64, f64)> = t_grid.iter().map(build).collect::<Result<_>>()?;

    let nt = t_grid.len();
    let mut values = vec![0.0; s_nodes.len() * nt];
    for (j, (row, _, _)) in slices.iter().enumerate() {
        for (i, v) in row.iter().enumerate() {
            values[i * nt + j] = *v;
        }
    }
    let min_density = slices.iter().map(|s| s.2).fold(f64::INFINITY, f64::min);
    let atoms_on_edge: Vec<f64> = slices.iter().map(|s| s.1).collect();
    let line = atoms_on_edge.iter().any(|m| *m != 0.0).then(|| LineDensity {
        exponent: 0.0,
        axis: LineAxis::T,
        s_nodes: t_grid.to_vec(),
        values: atoms_on_edge,
    });
    Ok(Measure2D {
        kind: MeasureKind::SliceFamily,
        atoms: Vec::new(),
        grid: Some(DensityGrid { s_nodes, t_nodes: t_grid.to_vec(), values }),
        line,
        signed: pm.has_positive_coeff() || min_density < 0.0,
        source: MeasureSource::Pencil(pm),
        min_density,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn weight_signs() {
        assert_eq!(weight_wj(0.3, 0.7, 2.0, 0.0, 1.0, 2).unwrap(), 0.0);
        assert!(weight_wj(0.5, 0.5, 2.0, -2.0, 1.0, 2).unwrap() > 0.0);
        let cj = 2.0;
        let t0: f64 = 0.5;
        let s0 = (1.0 / (cj * t0.ln())).exp();
        assert!(weight_wj(s0, t0, 3.0, cj, 1.0, 2).unwrap() < 0.0);
        assert!(weight_wj_series(s0, t0, 3.0, cj, 1.0, 2).unwrap() < 0.0);
        assert!(weight_wj(1.0, 0.5, 1.0, 1.0, 1.0, 1).is_err());
    }

    #[test]
    fn closed_form_matches_series() {
        for (s, t) in [(0.1, 0.9), (0.5, 0.5), (0.01, 0.02), (0.95, 0.001)] {
            for cj in [-0.3, -2.0, -7.5, 0.4, 3.0] {
                let a = weight_wj(s, t, 1.7, cj, 0.8, 3).unwrap();
                let b = weight_wj_series(s, t, 1.7, cj, 0.8, 3).unwrap();
                // The alternating series for c_j > 0 loses digits at large |xy|.
                let tol = if cj < 0.0 { 1e-12 } else { 1e-8 };
                assert_relative_eq!(a, b, max_relative = tol);
            }
        }
    }

    #[test]
    fn factor_moments() {
        // ∫ s^m μ_{j,t}(ds) = τ e^{c_j ln t / (m + a_j)}.
        let p = PencilPoly::monic(&[1.0, 3.0], &[2.0, 4.0]).unwrap();
        let pm = PencilMeasure::new(&p, None).unwrap();
        assert_eq!(pm.poles, vec![2.0, 4.0]);
        assert!(pm.coeffs.iter().all(|c| *c <= 0.0));
        let t: f64 = 0.3;
        let v = -t.ln();
        for j in 0..2 {
            let f = Measure1D::from_log_density(0.002, 40000, |u| pm.factor_u_density(j, u, v))
                .with_atom(1.0, t.powf(pm.split_exponent()));
            for m in 0..4 {
                let exact = t.powf(pm.split_exponent()) * (pm.coeffs[j] * t.ln() / (m as f64 + pm.poles[j])).exp();
                assert_relative_eq!(f.moment(m), exact, max_relative = 1e-5);
            }
        }
    }

    #[test]
    fn slice_moments_reproduce_exponent() {
        let p = PencilPoly::monic(&[1.0, 3.0], &[2.0, 4.0]).unwrap();
        let pm = PencilMeasure::new(&p, None).unwrap();
        let t: f64 = 0.4;
        let nu = pm.slice(t, 4000).unwrap();
        for m in 0..5 {
            let mf = m as f64;
            let exact = t.powf(p.b.eval(mf) / p.a.eval(mf) - 1.0) / p.a.eval(mf);
            // Trapezoid error on the slice grid is O(h²).
            assert_relative_eq!(nu.moment(m), exact, max_relative = 3e-4);
        }
        assert!(nu.min_density() >= 0.0);
    }

    #[test]
    fn cancellation_reduces_to_product() {
        let p = PencilPoly::monic(&[1.0], &[1.0]).unwrap();
        let pm = PencilMeasure::new(&p, None).unwrap();
        assert!(pm.poles.is_empty());
        assert_eq!(pm.c0, 1.0);
        let m = measure_pencil(&p, None, &[0.25, 0.5], &MeasureOptions { grid_size: 8, slice_len: 2000 }).unwrap();
        let g = m.grid.unwrap();
        for (s, _, val) in g.rows() {
            assert!((val - 1.0).abs() < 1e-3, "{s}: {val}");
        }
    }

    #[test]
    fn rejects_bad_pencils() {
        let dup = PencilPoly::monic(&[1.0, 5.0], &[2.0, 2.0]).unwrap();
        assert!(matches!(PencilMeasure::new(&dup, None), Err(Error::CoincidentRoots { .. })));
        let deg = PencilPoly::monic(&[1.0, 2.0], &[3.0]).unwrap();
        assert!(matches!(PencilMeasure::new(&deg, None), Err(Error::Degree(_))));
    }
}
