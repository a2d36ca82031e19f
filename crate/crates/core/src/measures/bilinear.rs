//! Representing measures of `1 / (a + bx + cy + dxy)^l`.

use serde::{Deserialize, Serialize};

use super::bessel::ln_entire_kernel;
use super::{interior_nodes, Atom2D, DensityGrid, LineAxis, LineDensity, Measure2D, MeasureKind, MeasureOptions, MeasureSource};
use crate::error::{Error, Result};
use crate::poly::BilinearPoly;

/// Density of the `d > 0` case in `u = -ln s`, `v = -ln t` coordinates:
///
/// `ω(s,t) ds dt = e^{-(c/d)u - (b/d)v} (uv)^{l-1} / (d^l (l-1)!)
///                 Σ_k (M/d²)^k (uv)^k / (k! (k+l-1)!) du dv`.
///
/// For `M > 0` the series is the `I_{l-1}` form, for `M = 0` a single term,
/// for `M < 0` the `J_{l-1}` form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BilinearDensity {
    pub poly: BilinearPoly,
    pub l: u32,
}

impl BilinearDensity {
    pub fn new(poly: BilinearPoly, l: u32) -> Result<Self> {
        if l == 0 {
            return Err(Error::Domain("power l must be >= 1".into()));
        }
        if poly.d() == 0.0 {
            return Err(Error::Domain("closed-form density needs d > 0".into()));
        }
        Ok(Self { poly, l })
    }

    /// `(sign, ln|·|)` of the density with respect to `du dv`.
    pub fn ln_uv(&self, u: f64, v: f64) -> (f64, f64) {
        let p = &self.poly;
        let d = p.d();
        let l = self.l as f64;
        let uv = u * v;
        let y = p.m_value() * uv / (d * d);
        let (sign, ln_g) = ln_entire_kernel(self.l - 1, y);
        let poly_part = if self.l == 1 { 0.0 } else { (l - 1.0) * uv.ln() };
        let ln = -(p.c() / d) * u - (p.b() / d) * v + poly_part - l * d.ln() - libm::lgamma(l) + ln_g;
        (sign, ln)
    }

    /// Density with respect to `du dv`.
    pub fn eval_uv(&self, u: f64, v: f64) -> f64 {
        let (s, l) = self.ln_uv(u, v);
        s * l.exp()
    }

    /// `ω(s, t)` with respect to `ds dt`.
    pub fn eval(&self, s: f64, t: f64) -> f64 {
        let (u, v) = (-s.ln(), -t.ln());
        let (sign, ln) = self.ln_uv(u, v);
        sign * (ln + u + v).exp()
    }

    /// Slowest exponential decay rate of `|ω|` in `(u, v)` along rays,
    /// `min_θ [c cos θ + b sin θ - 2 sqrt(M⁺ cos θ sin θ)] / d`.
    pub fn decay_rate(&self) -> f64 {
        let p = &self.poly;
        let mp = p.m_value().max(0.0);
        (0..=2000)
            .map(|i| {
                let th = std::f64::consts::FRAC_PI_2 * i as f64 / 2000.0;
                let (cs, sn) = (th.cos(), th.sin());
                (p.c() * cs + p.b() * sn - 2.0 * (mp * cs * sn).sqrt()) / p.d()
            })
            .fold(f64::INFINITY, f64::min)
    }
}

/// Measure of `1/p^l` for `M >= 0`.
pub fn measure_bilinear(p: &BilinearPoly, l: u32, opts: &MeasureOptions) -> Result<Measure2D> {
    if p.m_value() < 0.0 {
        return Err(Error::Precondition(format!(
            "M = bc - ad = {} < 0: no positive representing measure",
            p.m_value()
        )));
    }
    build(p, l, opts)
}

/// Same construction without the `M >= 0` check; for `M < 0` the result is
/// a signed measure with the `J_{l-1}` kernel.
pub fn measure_bilinear_signed(p: &BilinearPoly, l: u32, opts: &MeasureOptions) -> Result<Measure2D> {
    build(p, l, opts)
}

fn build(p: &BilinearPoly, l: u32, opts: &MeasureOptions) -> Result<Measure2D> {
    if l == 0 {
        return Err(Error::Domain("power l must be >= 1".into()));
    }
    let signed = p.m_value() < 0.0;
    let source = MeasureSource::Bilinear { poly: *p, l };
    let nodes = interior_nodes(opts.grid_size);
    let (a, b, c, d) = (p.a(), p.b(), p.c(), p.d());
    let lf = l as f64;
    if d > 0.0 {
        let dens = BilinearDensity::new(*p, l)?;
        let values: Vec<f64> = nodes
            .iter()
            .flat_map(|s| nodes.iter().map(move |t| dens.eval(*s, *t)))
            .collect();
        let min_density = values.iter().copied().fold(f64::INFINITY, f64::min);
        return Ok(Measure2D {
            kind: MeasureKind::ClosedFormDensity,
            atoms: Vec::new(),
            grid: Some(DensityGrid { s_nodes: nodes.clone(), t_nodes: nodes, values }),
            line: None,
            source,
            min_density,
            signed,
        });
    }
    if b == 0.0 && c == 0.0 {
        return Ok(Measure2D {
            kind: MeasureKind::PointMass,
            atoms: vec![Atom2D { s: 1.0, t: 1.0, mass: a.powf(-lf) }],
            grid: None,
            line: None,
            source,
            min_density: 0.0,
            signed: false,
        });
    }
    // d = 0: measure on a curve through (1,1).
    let (axis, slope, exponent) = if b > 0.0 { (LineAxis::S, b, c / b) } else { (LineAxis::T, c, 0.0) };
    let values: Vec<f64> = nodes.iter().map(|x| line_density(a, slope, l, *x)).collect();
    let min_density = values.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(Measure2D {
        kind: MeasureKind::AtomicLine,
        atoms: Vec::new(),
        grid: None,
        line: Some(LineDensity { exponent, axis, s_nodes: nodes, values }),
        source,
        min_density,
        signed: false,
    })
}

/// `(-ln x)^{l-1} x^{a/k - 1} / (k^l (l-1)!)`, the line density in its parameter.
pub(crate) fn line_density(a: f64, k: f64, l: u32, x: f64) -> f64 {
    let lf = l as f64;
    let u = -x.ln();
    let poly_part = if l == 1 { 0.0 } else { (lf - 1.0) * u.ln() };
    (poly_part - (a / k - 1.0) * u - lf * k.ln() - libm::lgamma(lf)).exp()
}

/// `sup |ω_{M,l} - ω_{0,l}|` over `grid × grid` for the family with fixed
/// `(b, c, d)` and `a = (bc - M)/d`.
pub fn asymptote_check(b: f64, c: f64, d: f64, m: f64, l: u32, grid: &[f64]) -> Result<f64> {
    if d <= 0.0 {
        return Err(Error::Domain("asymptote family needs d > 0".into()));
    }
    let member = |mv: f64| -> Result<BilinearDensity> {
        BilinearDensity::new(BilinearPoly::new((b * c - mv) / d, b, c, d)?, l)
    };
    let (near, limit) = (member(m)?, member(0.0)?);
    let mut gap = 0.0f64;
    for s in grid {
        for t in grid {
            gap = gap.max((near.eval(*s, *t) - limit.eval(*s, *t)).abs());
        }
    }
    Ok(gap)
}

/// Gaps along a sequence of `M` values.
pub fn asymptote_profile(b: f64, c: f64, d: f64, ms: &[f64], l: u32, grid: &[f64]) -> Result<Vec<f64>> {
    ms.iter().map(|m| asymptote_check(b, c, d, *m, l, grid)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::bessel::{bessel_i, bessel_j};
    use approx::assert_relative_eq;

    fn bp(a: f64, b: f64, c: f64, d: f64) -> BilinearPoly {
        BilinearPoly::new(a, b, c, d).unwrap()
    }

    #[test]
    fn product_case_is_uniform() {
        let m = measure_bilinear(&bp(1.0, 1.0, 1.0, 1.0), 1, &MeasureOptions::default()).unwrap();
        assert_eq!(m.kind, MeasureKind::ClosedFormDensity);
        assert!(m.grid.unwrap().values.iter().all(|v| (v - 1.0).abs() < 1e-14));
    }

    #[test]
    fn degenerate_cases() {
        let o = MeasureOptions::default();
        let m = measure_bilinear(&bp(1.0, 0.0, 0.0, 0.0), 1, &o).unwrap();
        assert_eq!(m.kind, MeasureKind::PointMass);
        assert_eq!(m.atoms, vec![Atom2D { s: 1.0, t: 1.0, mass: 1.0 }]);
        let m = measure_bilinear(&bp(2.0, 0.0, 0.0, 0.0), 3, &o).unwrap();
        assert_eq!(m.atoms[0].mass, 0.125);
        let m = measure_bilinear(&bp(1.0, 1.0, 1.0, 0.0), 1, &o).unwrap();
        let line = m.line.unwrap();
        assert_eq!((line.axis, line.exponent), (LineAxis::S, 1.0));
        assert!(line.values.iter().all(|v| (v - 1.0).abs() < 1e-14));
        assert!(measure_bilinear(&bp(1.0, 0.0, 1.0, 1.0), 1, &o).is_err());
    }

    #[test]
    fn closed_forms_match_bessel_display() {
        // M > 0: s^{c/d-1} t^{b/d-1} / (d (l-1)!) (uv/M)^{(l-1)/2} I_{l-1}((2/d) sqrt(M uv)).
        let p = bp(1.0, 2.0, 3.0, 1.5);
        let m = p.m_value();
        for l in 1..=3u32 {
            let dens = BilinearDensity::new(p, l).unwrap();
            for (s, t) in [(0.3, 0.6), (0.01, 0.2), (0.9, 0.05)] {
                let (u, v) = (-f64::ln(s), -f64::ln(t));
                let z = 2.0 / p.d() * (m * u * v).sqrt();
                let fact = libm::tgamma(l as f64);
                let expect = s.powf(p.c() / p.d() - 1.0) * t.powf(p.b() / p.d() - 1.0) / (p.d() * fact)
                    * (u * v / m).powf(0.5 * (l as f64 - 1.0))
                    * bessel_i((l - 1) as f64, z).unwrap().value;
                assert_relative_eq!(dens.eval(s, t), expect, max_relative = 1e-12);
            }
        }
        // M < 0, l = 1: s^{c/d-1} t^{b/d-1} / d J0((2/d) sqrt(-M uv)).
        let q = bp(2.0, 1.0, 1.0, 1.0);
        let dens = BilinearDensity::new(q, 1).unwrap();
        for (s, t) in [(0.3, 0.6), (0.01, 0.02)] {
            let (u, v) = (-f64::ln(s), -f64::ln(t));
            let expect = bessel_j(0.0, 2.0 * (u * v).sqrt()).unwrap().value;
            assert_relative_eq!(dens.eval(s, t), expect, max_relative = 1e-10);
        }
    }

    #[test]
    fn asymptote_gaps_shrink() {
        let grid: Vec<f64> = (1..=16).map(|j| j as f64 / 17.0).collect();
        assert_eq!(asymptote_check(1.0, 1.0, 1.0, 0.0, 1, &grid).unwrap(), 0.0);
        for l in [1, 2] {
            let g = asymptote_profile(1.0, 1.0, 1.0, &[1e-1, 1e-2, 1e-3], l, &grid).unwrap();
            assert!(g[0] > g[1] && g[1] > g[2], "{g:?}");
            if l == 1 {
                assert!(g[2] <= 1e-2);
            }
        }
    }
}
