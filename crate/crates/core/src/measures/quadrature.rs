//! Composite Gauss-Legendre rules on panels.

use std::borrow::Cow;
use std::sync::OnceLock;

use gauss_quad::GaussLegendre;

/// Points per panel for the standard rule.
pub const PANEL_ORDER: usize = 16;
/// Points per panel for the comparison rule.
pub const REFINED_ORDER: usize = 24;

fn reference(order: usize) -> Cow<'static, [(f64, f64)]> {
    static R16: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    static R24: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    let build = move || {
        let mut v = GaussLegendre::new(order)
            .expect("Gauss-Legendre order >= 2")
            .as_node_weight_pairs()
            .to_vec();
        v.sort_by(|a, b| a.0.total_cmp(&b.0));
        v
    };
    match order {
        16 => Cow::Borrowed(R16.get_or_init(build)),
        24 => Cow::Borrowed(R24.get_or_init(build)),
        _ => Cow::Owned(build()),
    }
}

/// Nodes and weights of `order`-point Gauss-Legendre on `[0, 1]`, ascending.
pub fn unit_interval_rule(order: usize) -> (Vec<f64>, Vec<f64>) {
    let mut v = GaussLegendre::new(order.max(2))
        .expect("Gauss-Legendre order >= 2")
        .as_node_weight_pairs()
        .to_vec();
    v.sort_by(|a, b| a.0.total_cmp(&b.0));
    v.iter().map(|(x, w)| (0.5 * (x + 1.0), 0.5 * w)).unzip()
}

/// Gauss-Legendre nodes on each `[breaks[i], breaks[i+1]]`.
pub fn composite(breaks: &[f64], order: usize) -> Vec<(f64, f64)> {
    let r = reference(order);
    let mut out = Vec::with_capacity(r.len() * breaks.len().saturating_sub(1));
    for w in breaks.windows(2) {
        let (mid, half) = (0.5 * (w[0] + w[1]), 0.5 * (w[1] - w[0]));
        out.extend(r.iter().map(|(x, wt)| (mid + half * x, half * wt)));
    }
    out
}

/// Breaks on `[0, end]`: widths start at `first` and grow geometrically by
/// `ratio`, capped by `cap(x)` at the panel's left end.
pub fn graded_breaks(end: f64, first: f64, ratio: f64, cap: impl Fn(f64) -> f64) -> Vec<f64> {
    let mut b = vec![0.0];
    let mut x = 0.0;
    let mut w = first;
    while x < end {
        let width = w.min(cap(x)).max(first);
        x = (x + width).min(end);
        b.push(x);
        w = width * ratio;
    }
    b
}

/// Evenly spaced breaks on `[a, b]` with widths at most `width`.
pub fn uniform_breaks(a: f64, b: f64, width: f64) -> Vec<f64> {
    let n = ((b - a) / width).ceil().max(1.0) as usize;
    (0..=n).map(|i| a + (b - a) * i as f64 / n as f64).collect()
}

/// Pairwise (cascade) summation.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 16 {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrates_exponentials_on_graded_panels() {
        for rate in [0.05, 1.0, 20.0] {
            let end = 45.0 / rate;
            let br = graded_breaks(end, 0.01, 1.3, |_| f64::INFINITY);
            let q: f64 = composite(&br, PANEL_ORDER).iter().map(|(x, w)| w * (-rate * x).exp()).sum();
            assert!((q * rate - 1.0).abs() < 1e-13, "rate {rate}: {q}");
        }
    }

    #[test]
    fn unit_rule_is_exact_for_polynomials() {
        let (x, w) = unit_interval_rule(8);
        let q: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(15)).sum();
        assert!((q - 1.0 / 16.0).abs() < 1e-15);
        assert!(x.windows(2).all(|p| p[0] < p[1]));
    }

    #[test]
    fn pairwise_matches_naive_on_small_input() {
        let v: Vec<f64> = (1..100).map(|i| 1.0 / i as f64).collect();
        assert!((pairwise_sum(&v) - v.iter().sum::<f64>()).abs() < 1e-13);
    }
}
