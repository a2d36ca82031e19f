//! WebAssembly bindings for the static demo page in `www/`.
//!
//! Every export returns a JSON string; the page parses it.

use momenta_core::measures::{measure_bilinear_signed, MeasureOptions};
use momenta_core::monotonicity::{bilinear_criterion, is_jcm_net, JcmVerdict};
use momenta_core::operators::{dual_subnormality_decision, isometry_report, shift_from_poly, DualDecision, IsometryReport};
use momenta_core::poly::{reciprocal_net, BilinearPoly};
use momenta_core::Result;
use serde::Serialize;
use wasm_bindgen::prelude::*;

const MAX_GRID: usize = 256;
const MAX_NET: usize = 48;

#[derive(Serialize)]
struct Scan {
    m: f64,
    criterion: bool,
    scan: JcmVerdict,
}

#[derive(Serialize)]
struct Dual {
    isometry: IsometryReport,
    dual: DualDecision,
}

fn json<T: Serialize>(v: &T) -> String {
    serde_json::to_string(v).expect("plain data serializes")
}

fn too_big(what: &str, got: usize, max: usize) -> momenta_core::Error {
    momenta_core::Error::Domain(format!("{what} {got} exceeds the demo limit {max}"))
}

pub fn density_json(a: f64, b: f64, c: f64, d: f64, l: u32, grid_size: usize) -> Result<String> {
    if grid_size > MAX_GRID {
        return Err(too_big("grid size", grid_size, MAX_GRID));
    }
    let p = BilinearPoly::new(a, b, c, d)?;
    let opts = MeasureOptions { grid_size, ..MeasureOptions::default() };
    Ok(json(&measure_bilinear_signed(&p, l, &opts)?))
}

pub fn scan_json(a: f64, b: f64, c: f64, d: f64, order: usize, net_size: usize) -> Result<String> {
    if net_size > MAX_NET {
        return Err(too_big("net size", net_size, MAX_NET));
    }
    let p = BilinearPoly::new(a, b, c, d)?;
    let crit = bilinear_criterion(&p);
    let scan = is_jcm_net(&reciprocal_net(&p, 1, net_size + 1, net_size + 1), order, 1e-9)?;
    Ok(json(&Scan { m: crit.m, criterion: crit.jcm, scan }))
}

pub fn dual_json(b: f64, c: f64, d: f64, net_size: usize, order: usize) -> Result<String> {
    if net_size > MAX_NET {
        return Err(too_big("net size", net_size, MAX_NET));
    }
    let s = shift_from_poly(&BilinearPoly::new(1.0, b, c, d)?, net_size);
    let isometry = isometry_report(&s, &[1, 2, 3], 1e-9)?;
    let dual = dual_subnormality_decision(&s, order)?;
    Ok(json(&Dual { isometry, dual }))
}

fn js<T>(r: Result<T>) -> std::result::Result<T, JsError> {
    r.map_err(|e| JsError::new(&e.to_string()))
}

/// Density of the representing measure of `1/p^l` on a `grid_size`² grid.
/// Negative `M` gives the signed Bessel-kernel density.
#[wasm_bindgen]
pub fn bilinear_density(a: f64, b: f64, c: f64, d: f64, l: u32, grid_size: usize) -> std::result::Result<String, JsError> {
    js(density_json(a, b, c, d, l, grid_size))
}

/// Sign scan of the alternating differences of `1/p(m, n)`.
#[wasm_bindgen]
pub fn jcm_scan(a: f64, b: f64, c: f64, d: f64, order: usize, net_size: usize) -> std::result::Result<String, JsError> {
    js(scan_json(a, b, c, d, order, net_size))
}

/// Toral isometry checks and Cauchy dual decision for the shift of `1 + bx + cy + dxy`.
#[wasm_bindgen]
pub fn dual_decision(b: f64, c: f64, d: f64, net_size: usize, order: usize) -> std::result::Result<String, JsError> {
    js(dual_json(b, c, d, net_size, order))
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::Value;

    #[test]
    fn density_grid_shape() {
        let v: Value = serde_json::from_str(&density_json(2.0, 1.0, 1.0, 1.0, 1, 8).unwrap()).unwrap();
        assert_eq!(v["kind"], "ClosedFormDensity");
        assert_eq!(v["signed"], true);
        assert_eq!(v["grid"]["values"].as_array().unwrap().len(), 64);
        assert!(density_json(1.0, 1.0, 1.0, 1.0, 1, 1000).is_err());
    }

    #[test]
    fn scan_finds_the_mixed_witness() {
        let v: Value = serde_json::from_str(&scan_json(1.0, 0.0, 1.0, 1.0, 4, 12).unwrap()).unwrap();
        assert_eq!(v["criterion"], false);
        assert_eq!(v["scan"]["decision"], "FailWitness");
        assert_eq!(v["scan"]["witness"]["beta"], serde_json::json!([1, 1]));
    }

    #[test]
    fn dual_of_a_toral_two_isometry() {
        let v: Value = serde_json::from_str(&dual_json(1.0, 2.0, 0.0, 12, 6).unwrap()).unwrap();
        assert_eq!(v["dual"]["decision"], true);
        assert_eq!(v["isometry"]["is_toral_m"]["2"], true);
        assert!(dual_json(1.0, 2.0, 3.0, 2, 2).is_err());
    }
}
