//! Measures on `[0, 1]` and their multiplicative convolution.
//!
//! Densities live on uniform grids in `u = -ln s` and are integrated with the
//! trapezoid rule, so the convolution is a discrete additive convolution and
//! moments of the result are exactly the products of the input moments.

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use super::quadrature::pairwise_sum;
use crate::error::{Error, Result};

/// Above this many multiply-adds the density convolution switches to FFT.
const DIRECT_LIMIT: usize = 1 << 26;
/// Atoms closer than this are merged.
const ATOM_MERGE: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub loc: f64,
    pub mass: f64,
}

/// Density samples `values[i]` with respect to `du` at `u = offset + i*step`,
/// i.e. `s = exp(-u)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogGrid {
    pub offset: f64,
    pub step: f64,
    pub values: Vec<f64>,
}

impl LogGrid {
    pub fn new(offset: f64, step: f64, values: Vec<f64>) -> Result<Self> {
        if !(offset >= 0.0 && step > 0.0) || values.len() < 2 {
            return Err(Error::Domain("log grid needs offset >= 0, step > 0, two samples".into()));
        }
        Ok(Self { offset, step, values })
    }

    /// Samples `f(u)` at `u = i*step`, `i < len`.
    pub fn sample(step: f64, len: usize, f: impl Fn(f64) -> f64) -> Self {
        Self { offset: 0.0, step, values: (0..len).map(|i| f(i as f64 * step)).collect() }
    }

    fn weight(&self, i: usize) -> f64 {
        if i == 0 || i + 1 == self.values.len() {
            0.5 * self.step
        } else {
            self.step
        }
    }

    /// Trapezoid masses of each node.
    pub fn masses(&self) -> Vec<f64> {
        (0..self.values.len()).map(|i| self.weight(i) * self.values[i]).collect()
    }

    pub fn u_at(&self, i: usize) -> f64 {
        self.offset + i as f64 * self.step
    }

    pub fn u_end(&self) -> f64 {
        self.u_at(self.values.len() - 1)
    }

    /// Linear interpolation of the `u`-density; zero off the grid.
    pub fn u_density(&self, u: f64) -> f64 {
        let x = (u - self.offset) / self.step;
        if x < 0.0 || x > (self.values.len() - 1) as f64 {
            return 0.0;
        }
        let i = (x.floor() as usize).min(self.values.len() - 2);
        let f = x - i as f64;
        self.values[i] * (1.0 - f) + self.values[i + 1] * f
    }
}

/// Atoms in `[0, 1]` plus log-grid density pieces.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Measure1D {
    pub atoms: Vec<Atom>,
    pub pieces: Vec<LogGrid>,
}

impl Measure1D {
    pub fn dirac(loc: f64) -> Self {
        Self::atomic(&[(loc, 1.0)])
    }

    pub fn atomic(atoms: &[(f64, f64)]) -> Self {
        Self { atoms: atoms.iter().map(|&(loc, mass)| Atom { loc, mass }).collect(), pieces: Vec::new() }
    }

    /// Density `g(s) ds` given through its `u`-form `f(u) = g(e^{-u}) e^{-u}`.
    pub fn from_log_density(step: f64, len: usize, f: impl Fn(f64) -> f64) -> Self {
        Self { atoms: Vec::new(), pieces: vec![LogGrid::sample(step, len, f)] }
    }

    /// Lebesgue measure on `[0, 1]`, truncated at `u = (len-1)*step`.
    pub fn lebesgue(step: f64, len: usize) -> Self {
        Self::from_log_density(step, len, |u| (-u).exp())
    }

    pub fn with_atom(mut self, loc: f64, mass: f64) -> Self {
        self.atoms.push(Atom { loc, mass });
        self
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty() && self.pieces.is_empty()
    }

    pub fn moment(&self, n: u32) -> f64 {
        let mut parts: Vec<f64> = self.atoms.iter().map(|a| a.mass * a.loc.powi(n as i32)).collect();
        for p in &self.pieces {
            let terms: Vec<f64> = p
                .masses()
                .iter()
                .enumerate()
                .map(|(i, m)| m * (-(n as f64) * p.u_at(i)).exp())
                .collect();
            parts.push(pairwise_sum(&terms));
        }
        pairwise_sum(&parts)
    }

    pub fn total_mass(&self) -> f64 {
        self.moment(0)
    }

    pub fn atom_at_zero(&self) -> f64 {
        self.atoms.iter().filter(|a| a.loc == 0.0).map(|a| a.mass).sum()
    }

    /// Density with respect to `ds` at `s` in (0,1), summed over pieces.
    pub fn density_at(&self, s: f64) -> f64 {
        let u = -s.ln();
        self.pieces.iter().map(|p| p.u_density(u)).sum::<f64>() / s
    }

    /// Smallest density sample over all pieces.
    pub fn min_density(&self) -> f64 {
        self.pieces
            .iter()
            .flat_map(|p| p.values.iter().copied())
            .fold(f64::INFINITY, f64::min)
    }

    /// Sums pieces sharing offset and step into one.
    fn merge_pieces(&mut self) {
        let mut out: Vec<LogGrid> = Vec::new();
        for p in self.pieces.drain(..) {
            match out.iter_mut().find(|q| q.offset == p.offset && q.step == p.step) {
                Some(q) => {
                    // Interior trapezoid weights differ from end weights, so
                    // merge by masses and convert back.
                    let len = q.values.len().max(p.values.len());
                    let (mq, mp) = (q.masses(), p.masses());
                    let masses: Vec<f64> = (0..len)
                        .map(|i| mq.get(i).copied().unwrap_or(0.0) + mp.get(i).copied().unwrap_or(0.0))
                        .collect();
                    let step = q.step;
                    q.values = masses
                        .iter()
                        .enumerate()
                        .map(|(i, m)| if i == 0 || i + 1 == len { m / (0.5 * step) } else { m / step })
                        .collect();
                }
                None => out.push(p),
            }
        }
        self.pieces = out;
    }

    fn merge_atoms(&mut self) {
        self.atoms.sort_by(|a, b| a.loc.total_cmp(&b.loc));
        let mut out: Vec<Atom> = Vec::with_capacity(self.atoms.len());
        for a in self.atoms.drain(..) {
            match out.last_mut() {
                Some(last) if (a.loc - last.loc).abs() <= ATOM_MERGE => last.mass += a.mass,
                _ => out.push(a),
            }
        }
        self.atoms = out;
    }
}

fn check_support(m: &Measure1D) -> Result<()> {
    if m.is_empty() {
        return Err(Error::EmptyMeasure);
    }
    if let Some(a) = m.atoms.iter().find(|a| !(0.0..=1.0).contains(&a.loc)) {
        return Err(Error::Domain(format!("atom at {} outside [0, 1]", a.loc)));
    }
    Ok(())
}

/// `μ ⋄ ν`, the image of `μ ⊗ ν` under `(x, y) -> xy`.
///
/// Density pieces with different steps are resampled onto the finer step.
pub fn mult_convolve(mu: &Measure1D, nu: &Measure1D) -> Result<Measure1D> {
    check_support(mu)?;
    check_support(nu)?;
    let mut out = Measure1D::default();
    for a in &mu.atoms {
        for b in &nu.atoms {
            out.atoms.push(Atom { loc: a.loc * b.loc, mass: a.mass * b.mass });
        }
    }
    for (atoms, pieces) in [(&mu.atoms, &nu.pieces), (&nu.atoms, &mu.pieces)] {
        for a in atoms {
            for p in pieces {
                if a.loc == 0.0 {
                    out.atoms.push(Atom { loc: 0.0, mass: a.mass * pairwise_sum(&p.masses()) });
                } else {
                    out.pieces.push(LogGrid {
                        offset: p.offset - a.loc.ln(),
                        step: p.step,
                        values: p.values.iter().map(|v| v * a.mass).collect(),
                    });
                }
            }
        }
    }
    for p in &mu.pieces {
        for q in &nu.pieces {
            out.pieces.push(convolve_pieces(p, q));
        }
    }
    out.merge_atoms();
    out.merge_pieces();
    Ok(out)
}

fn resample(p: &LogGrid, step: f64) -> LogGrid {
    let len = ((p.u_end() - p.offset) / step).floor() as usize + 1;
    LogGrid {
        offset: p.offset,
        step,
        values: (0..len.max(2)).map(|i| p.u_density(p.offset + i as f64 * step)).collect(),
    }
}

fn convolve_pieces(p: &LogGrid, q: &LogGrid) -> LogGrid {
    let step = p.step.min(q.step);
    let same = |x: f64| ((x - step) / step).abs() < 1e-12;
    let p = if same(p.step) { p.clone() } else { resample(p, step) };
    let q = if same(q.step) { q.clone() } else { resample(q, step) };
    let (mp, mq) = (p.masses(), q.masses());
    let masses = if mp.len() * mq.len() <= DIRECT_LIMIT {
        direct_convolution(&mp, &mq)
    } else {
        fft_convolution(&mp, &mq)
    };
    let len = masses.len();
    let values = masses
        .iter()
        .enumerate()
        .map(|(k, m)| if k == 0 || k + 1 == len { m / (0.5 * step) } else { m / step })
        .collect();
    LogGrid { offset: p.offset + q.offset, step, values }
}

fn direct_convolution(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn fft_convolution(a: &[f64], b: &[f64]) -> Vec<f64> {
    let len = a.len() + b.len() - 1;
    let n = len.next_power_of_two();
    let mut planner = FftPlanner::<f64>::new();
    let fwd = planner.plan_fft_forward(n);
    let inv = planner.plan_fft_inverse(n);
    let pad = |v: &[f64]| {
        let mut out: Vec<Complex<f64>> = v.iter().map(|x| Complex::new(*x, 0.0)).collect();
        out.resize(n, Complex::new(0.0, 0.0));
        out
    };
    let (mut fa, mut fb) = (pad(a), pad(b));
    fwd.process(&mut fa);
    fwd.process(&mut fb);
    for (x, y) in fa.iter_mut().zip(&fb) {
        *x *= y;
    }
    inv.process(&mut fa);
    fa.iter().take(len).map(|c| c.re / n as f64).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn dirac_one_is_identity() {
        let nu = Measure1D::lebesgue(0.01, 4000).with_atom(0.5, 0.25);
        let out = mult_convolve(&Measure1D::dirac(1.0), &nu).unwrap();
        for n in 0..8 {
            assert_relative_eq!(out.moment(n), nu.moment(n), max_relative = 1e-14);
        }
    }

    #[test]
    fn atom_products() {
        let out = mult_convolve(&Measure1D::dirac(0.5), &Measure1D::dirac(0.3)).unwrap();
        assert_eq!(out.atoms.len(), 1);
        assert_relative_eq!(out.atoms[0].loc, 0.15);
        assert_eq!(out.atoms[0].mass, 1.0);
    }

    #[test]
    fn lebesgue_squared_is_minus_log() {
        let leb = Measure1D::lebesgue(0.005, 8000);
        let out = mult_convolve(&leb, &leb).unwrap();
        for n in 0..=10u32 {
            assert_relative_eq!(out.moment(n), leb.moment(n).powi(2), max_relative = 1e-12);
            assert_relative_eq!(out.moment(n), 1.0 / ((n + 1) * (n + 1)) as f64, max_relative = 2e-3);
        }
        for s in [0.1, 0.3, 0.7] {
            assert_relative_eq!(out.density_at(s), -f64::ln(s), max_relative = 1e-3);
        }
    }

    #[test]
    fn fft_path_agrees_with_direct() {
        let a: Vec<f64> = (0..300).map(|i| (i as f64 * 0.1).sin().abs()).collect();
        let b: Vec<f64> = (0..200).map(|i| (-(i as f64) * 0.05).exp()).collect();
        let d = direct_convolution(&a, &b);
        let f = fft_convolution(&a, &b);
        let scale = d.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        assert!(d.iter().zip(&f).all(|(x, y)| (x - y).abs() < 1e-12 * scale));
    }

    #[test]
    fn atom_at_zero_absorbs_mass() {
        let mu = Measure1D::dirac(0.0);
        let nu = Measure1D::lebesgue(0.01, 3000).with_atom(0.4, 2.0);
        let out = mult_convolve(&mu, &nu).unwrap();
        assert_relative_eq!(out.atom_at_zero(), nu.total_mass(), max_relative = 1e-14);
        assert!(mult_convolve(&Measure1D::default(), &nu).is_err());
        assert!(mult_convolve(&Measure1D::dirac(1.5), &nu).is_err());
    }
}
