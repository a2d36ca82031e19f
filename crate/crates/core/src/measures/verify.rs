//! Moments of constructed measures by quadrature, compared with `c(m)/p(m,n)^l`.

use super::bessel::{bessel_i_scaled, bessel_j_value};
use super::bilinear::BilinearDensity;
use super::pencil::PencilMeasure;
use super::quadrature::{composite, graded_breaks, pairwise_sum, uniform_breaks, PANEL_ORDER, REFINED_ORDER};
use super::{LineAxis, Measure2D, MeasureKind, MeasureSource};
use crate::error::{Error, Result};
use crate::poly::{Bivariate, BilinearPoly, TwoVarPoly};

/// Errors below this are accepted even when refinement does not halve them.
const CONVERGED: f64 = 1e-7;

type Moments = Vec<Vec<f64>>;

/// `max_{m<=mmax, n<=nmax} |moment(m,n) p(m,n)^l - c(m)| / c(m)`.
///
/// Each representation is integrated twice (16- and 24-point panels); the
/// 24-point error is returned, and a refinement that fails to halve an
/// unconverged error is reported as non-convergence.
pub fn verify_moments(measure: &Measure2D, p: &TwoVarPoly, l: u32, mmax: usize, nmax: usize) -> Result<f64> {
    let numerator = |m: usize| match &measure.source {
        MeasureSource::Pencil(pm) => pm.numerator_at(m as f64),
        MeasureSource::Bilinear { .. } => 1.0,
    };
    match (&measure.source, p) {
        (MeasureSource::Bilinear { poly, l: ml }, TwoVarPoly::Bilinear(q)) if poly == q && *ml == l => {}
        (MeasureSource::Pencil(pm), TwoVarPoly::Pencil(q)) if &pm.pencil == q && l == 1 => {}
        _ => return Err(Error::Precondition("measure was not built for this polynomial and power".into())),
    }
    let error_of = |mom: &Moments| -> f64 {
        let mut worst = 0.0f64;
        for (m, row) in mom.iter().enumerate() {
            for (n, v) in row.iter().enumerate() {
                let c = numerator(m);
                let pv = p.eval(m as f64, n as f64).powi(l as i32);
                worst = worst.max((v * pv - c).abs() / c.abs());
            }
        }
        worst
    };
    let compute = |order: usize| -> Result<Moments> {
        match (&measure.kind, &measure.source) {
            (MeasureKind::PointMass, _) => Ok(point_moments(measure, mmax, nmax)),
            (MeasureKind::AtomicLine, MeasureSource::Bilinear { poly, l }) => {
                Ok(line_moments(measure, poly, *l, mmax, nmax, order))
            }
            (MeasureKind::ClosedFormDensity, MeasureSource::Bilinear { poly, l }) => {
                density_moments(&BilinearDensity::new(*poly, *l)?, mmax, nmax, order)
            }
            (MeasureKind::SliceFamily, MeasureSource::Pencil(pm)) => Ok(pencil_moments(pm, mmax, nmax, order)),
            _ => Err(Error::Precondition("measure kind does not match its source".into())),
        }
    };
    let coarse = error_of(&compute(PANEL_ORDER)?);
    let fine = error_of(&compute(REFINED_ORDER)?);
    if !fine.is_finite() || (fine > CONVERGED && fine > 0.5 * coarse) {
        return Err(Error::QuadratureNonconvergence { coarse, fine });
    }
    Ok(fine)
}

fn point_moments(measure: &Measure2D, mmax: usize, nmax: usize) -> Moments {
    (0..=mmax)
        .map(|m| {
            (0..=nmax)
                .map(|n| {
                    measure
                        .atoms
                        .iter()
                        .map(|a| a.mass * a.s.powi(m as i32) * a.t.powi(n as i32))
                        .sum()
                })
                .collect()
        })
        .collect()
}

/// Slowly decaying `x^{l-1} e^{-rate x}` needs this much range.
fn tail_end(rate: f64, l: u32) -> f64 {
    (50.0 + 2.0 * (l as f64 - 1.0) * (1.0 + 50.0 / rate).ln()) / rate
}

fn line_moments(measure: &Measure2D, p: &BilinearPoly, l: u32, mmax: usize, nmax: usize, order: usize) -> Moments {
    let line = measure.line.as_ref().expect("line measure carries its line");
    let (slope, axis) = match line.axis {
        LineAxis::S => (p.b(), LineAxis::S),
        LineAxis::T => (p.c(), LineAxis::T),
    };
    let rate = p.a() / slope;
    let nodes = composite(&graded_breaks(tail_end(rate, l), 0.01, 1.3, |_| f64::INFINITY), order);
    // u-form of the line density: x^{l-1} e^{-(a/k) x} / (k^l (l-1)!).
    let lf = l as f64;
    let dens: Vec<f64> = nodes
        .iter()
        .map(|(x, w)| {
            let poly = if l == 1 { 0.0 } else { (lf - 1.0) * x.ln() };
            w * (poly - rate * x - lf * slope.ln() - libm::lgamma(lf)).exp()
        })
        .collect();
    (0..=mmax)
        .map(|m| {
            (0..=nmax)
                .map(|n| {
                    // Exponent of e^{-x} carried by s^m t^n on the line.
                    let e = match axis {
                        LineAxis::S => m as f64 + n as f64 * line.exponent,
                        LineAxis::T => n as f64 + m as f64 * line.exponent,
                    };
                    let terms: Vec<f64> = nodes.iter().zip(&dens).map(|((x, _), d)| d * (-e * x).exp()).collect();
                    pairwise_sum(&terms)
                })
                .collect()
        })
        .collect()
}

fn density_moments(dens: &BilinearDensity, mmax: usize, nmax: usize, order: usize) -> Result<Moments> {
    let kappa = dens.decay_rate();
    if !(kappa > 1e-9) {
        return Err(Error::Domain("density does not decay in every direction; moments are not absolutely integrable".into()));
    }
    let p = dens.poly;
    let end = tail_end(kappa, dens.l + 1);
    let nodes = composite(&graded_breaks(end, 0.01, 1.3, |x| 0.8 + 0.4 * x.sqrt()), order);
    let (cu, cv, mp) = (p.c() / p.d(), p.b() / p.d(), p.m_value().max(0.0));
    let lf = dens.l as f64;
    let row = |&(u, wu): &(f64, f64)| -> Vec<f64> {
        // t[n] = Σ_j w_j e^{-n v_j} ω(u, v_j)
        let mut t = vec![0.0; nmax + 1];
        for &(v, wv) in &nodes {
            let bound = -cu * u - cv * v + 2.0 * (mp * u * v).sqrt() / p.d() + (lf - 1.0) * (1.0 + u * v).ln();
            if bound < -75.0 {
                continue;
            }
            let f = wu * wv * dens.eval_uv(u, v);
            let mut e = f;
            let decay = (-v).exp();
            for tn in t.iter_mut() {
                *tn += e;
                e *= decay;
            }
        }
        t
    };
    #[cfg(feature = "parallel")]
    let rows: Vec<Vec<f64>> = {
        use rayon::prelude::*;
        nodes.par_iter().map(row).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let rows: Vec<Vec<f64>> = nodes.iter().map(row).collect();
    Ok((0..=mmax)
        .map(|m| {
            (0..=nmax)
                .map(|n| {
                    let terms: Vec<f64> = nodes
                        .iter()
                        .zip(&rows)
                        .map(|((u, _), r)| (-(m as f64) * u).exp() * r[n])
                        .collect();
                    pairwise_sum(&terms)
                })
                .collect()
        })
        .collect())
}

/// `∫ s^m μ(ds)` by quadrature of the base density plus its atom at 1.
fn base_moment(pm: &PencilMeasure, m: usize, order: usize) -> f64 {
    let Some(pmin) = pm.base_terms.iter().map(|t| t.pole).reduce(f64::min) else {
        return pm.base_atom;
    };
    let omax = pm.base_terms.iter().map(|t| t.order).max().unwrap_or(1);
    let nodes = composite(&graded_breaks(tail_end(m as f64 + pmin, omax), 0.005, 1.25, |_| f64::INFINITY), order);
    let terms: Vec<f64> = nodes
        .iter()
        .map(|(u, w)| w * (-(m as f64) * u).exp() * pm.base_u_density(*u))
        .collect();
    pm.base_atom + pairwise_sum(&terms)
}

/// `ln(1 + K)` with `K = ∫ e^{-(m+a)u} S(x, u) du` evaluated in `r = sqrt(u)`.
fn ln_factor(a: f64, x: f64, m: usize, order: usize) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    let big_a = m as f64 + a;
    let sigma = (2.0 * big_a).sqrt().recip();
    let g = 2.0 * x.abs().sqrt();
    if x > 0.0 {
        // 2 sqrt(x) e^{-A r²} I_1(g r), scaled by its peak e^{x/A}.
        let peak = x / big_a;
        let r_star = x.sqrt() / big_a;
        let lo = (r_star - 14.0 * sigma).max(0.0);
        let hi = r_star + 14.0 * sigma;
        let nodes = composite(&uniform_breaks(lo, hi, 2.8 * sigma), order);
        let terms: Vec<f64> = nodes
            .iter()
            .map(|(r, w)| {
                let z = g * r;
                w * g * (-big_a * r * r + z - peak).exp() * bessel_i_scaled(1.0, z)
            })
            .collect();
        let q = pairwise_sum(&terms);
        peak + ((-peak).exp() + q).ln()
    } else {
        let hi = 14.0 * sigma;
        let width = (2.8 * sigma).min(2.0 / g);
        let nodes = composite(&uniform_breaks(0.0, hi, width), order);
        let terms: Vec<f64> = nodes
            .iter()
            .map(|(r, w)| -w * g * (-big_a * r * r).exp() * bessel_j_value(1.0, g * r))
            .collect();
        (1.0 + pairwise_sum(&terms)).ln()
    }
}

fn pencil_moments(pm: &PencilMeasure, mmax: usize, nmax: usize, order: usize) -> Moments {
    let p = &pm.pencil;
    let gamma = (0..=mmax)
        .map(|m| p.b.eval(m as f64) / p.a.eval(m as f64))
        .fold(f64::INFINITY, f64::min);
    let vnodes = composite(&graded_breaks(tail_end(gamma, 1) + 2.0, 0.005, 1.25, |_| f64::INFINITY), order);
    let base: Vec<f64> = (0..=mmax).map(|m| base_moment(pm, m, order)).collect();
    // ln of ν_t(s^m)/μ(s^m) at each v node, per m.
    let column = |&(v, _): &(f64, f64)| -> Vec<f64> {
        (0..=mmax)
            .map(|m| {
                let mut ln = -(pm.c0 - 1.0) * v;
                for (a, c) in pm.poles.iter().zip(&pm.coeffs) {
                    ln += ln_factor(*a, -c * v, m, order);
                }
                ln
            })
            .collect()
    };
    #[cfg(feature = "parallel")]
    let cols: Vec<Vec<f64>> = {
        use rayon::prelude::*;
        vnodes.par_iter().map(column).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let cols: Vec<Vec<f64>> = vnodes.iter().map(column).collect();
    (0..=mmax)
        .map(|m| {
            (0..=nmax)
                .map(|n| {
                    let terms: Vec<f64> = vnodes
                        .iter()
                        .zip(&cols)
                        .map(|((v, w), col)| w * (col[m] - (n as f64 + 1.0) * v).exp())
                        .collect();
                    base[m] * pairwise_sum(&terms)
                })
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::{measure_bilinear, measure_pencil, MeasureOptions};
    use crate::poly::PencilPoly;

    fn bilinear_error(a: f64, b: f64, c: f64, d: f64, l: u32) -> f64 {
        let p = BilinearPoly::new(a, b, c, d).unwrap();
        let m = measure_bilinear(&p, l, &MeasureOptions { grid_size: 4, slice_len: 64 }).unwrap();
        verify_moments(&m, &p.into(), l, 8, 8).unwrap()
    }

    #[test]
    fn bilinear_cases() {
        assert!(bilinear_error(1.0, 1.0, 1.0, 1.0, 1) <= 1e-10);
        assert!(bilinear_error(1.0, 1.0, 2.0, 2.0, 1) <= 1e-6);
        assert!(bilinear_error(2.0, 1.0, 1.0, 0.0, 1) <= 1e-8);
        assert!(bilinear_error(1.0, 0.0, 0.0, 0.0, 2) == 0.0);
        assert!(bilinear_error(1.0, 2.0, 3.0, 1.0, 2) <= 1e-6);
    }

    #[test]
    fn pencil_case() {
        let p = PencilPoly::monic(&[1.0, 3.0], &[2.0, 4.0]).unwrap();
        let m = measure_pencil(&p, None, &[0.5], &MeasureOptions { grid_size: 4, slice_len: 64 }).unwrap();
        let e = verify_moments(&m, &p.into(), 1, 8, 8).unwrap();
        assert!(e <= 1e-6, "{e}");
    }

    #[test]
    fn mismatched_polynomial_rejected() {
        let p = BilinearPoly::new(1.0, 1.0, 1.0, 1.0).unwrap();
        let q = BilinearPoly::new(1.0, 2.0, 1.0, 1.0).unwrap();
        let m = measure_bilinear(&p, 1, &MeasureOptions::default()).unwrap();
        assert!(verify_moments(&m, &q.into(), 1, 2, 2).is_err());
        assert!(verify_moments(&m, &p.into(), 2, 2, 2).is_err());
    }
}
