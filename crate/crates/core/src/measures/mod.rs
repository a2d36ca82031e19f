//! Representing measures on `[0,1]²`, Bessel kernels, moment verification.

pub mod bessel;
mod bilinear;
pub mod convolution;
mod pencil;
pub mod quadrature;
mod verify;

use serde::{Deserialize, Serialize};

pub use bessel::{bessel_i, bessel_j, BesselEval};
pub use bilinear::{asymptote_check, asymptote_profile, measure_bilinear, measure_bilinear_signed, BilinearDensity};
pub use convolution::{mult_convolve, Atom, LogGrid, Measure1D};
pub use pencil::{measure_pencil, weight_wj, weight_wj_series, PencilMeasure};
pub use verify::verify_moments;

use crate::poly::BilinearPoly;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MeasureKind {
    ClosedFormDensity,
    AtomicLine,
    SliceFamily,
    PointMass,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Atom2D {
    pub s: f64,
    pub t: f64,
    pub mass: f64,
}

/// `values[i * t_nodes.len() + j]` is the density at `(s_nodes[i], t_nodes[j])`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityGrid {
    pub s_nodes: Vec<f64>,
    pub t_nodes: Vec<f64>,
    pub values: Vec<f64>,
}

impl DensityGrid {
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.t_nodes.len() + j]
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Sample points as `(s, t, value)` rows.
    pub fn rows(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        self.s_nodes
            .iter()
            .enumerate()
            .flat_map(move |(i, s)| self.t_nodes.iter().enumerate().map(move |(j, t)| (*s, *t, self.get(i, j))))
    }
}

/// Which coordinate parametrizes a line measure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LineAxis {
    /// Carried by `t = s^exponent`, density in `s`.
    S,
    /// Carried by `s = t^exponent`, density in `t`.
    T,
}

/// One-dimensional density along a curve. `s_nodes` holds the parameter
/// values (`t` values when `axis` is `T`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LineDensity {
    pub exponent: f64,
    pub axis: LineAxis,
    pub s_nodes: Vec<f64>,
    pub values: Vec<f64>,
}

/// Analytic description a measure was built from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum MeasureSource {
    Bilinear { poly: BilinearPoly, l: u32 },
    Pencil(PencilMeasure),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Measure2D {
    pub kind: MeasureKind,
    pub atoms: Vec<Atom2D>,
    pub grid: Option<DensityGrid>,
    pub line: Option<LineDensity>,
    pub source: MeasureSource,
    /// Smallest density sample seen while building (including internal grids).
    pub min_density: f64,
    /// The construction allows negative mass.
    pub signed: bool,
}

/// Sampling options for measure construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasureOptions {
    /// Number of interior display nodes per axis.
    pub grid_size: usize,
    /// Samples per factor on the internal log grid of a slice.
    pub slice_len: usize,
}

impl Default for MeasureOptions {
    fn default() -> Self {
        Self { grid_size: 32, slice_len: 512 }
    }
}

/// `j / (n + 1)` for `j = 1..=n`.
pub fn interior_nodes(n: usize) -> Vec<f64> {
    (1..=n).map(|j| j as f64 / (n + 1) as f64).collect()
}
