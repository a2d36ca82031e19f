use momenta_core::measures::{
    bessel_i, bessel_j, measure_bilinear, measure_bilinear_signed, measure_pencil, mult_convolve, verify_moments,
    weight_wj, weight_wj_series, Measure1D, MeasureKind, MeasureOptions,
};
use momenta_core::monotonicity::interlacing_s;
use momenta_core::poly::{BilinearPoly, PencilPoly, TwoVarPoly};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const STEP: f64 = 0.05;

/// A measure with up to two atoms and an optional density piece on the shared step.
fn random_measure(rng: &mut impl Rng) -> Measure1D {
    let mut m = if rng.gen_bool(0.7) {
        let rate: f64 = rng.gen_range(0.5..4.0);
        let power: i32 = rng.gen_range(0..3);
        let scale: f64 = rng.gen_range(0.1..2.0);
        Measure1D::from_log_density(STEP, rng.gen_range(100..600), move |u| scale * u.powi(power) * (-rate * u).exp())
    } else {
        Measure1D::default()
    };
    let atoms = if m.is_empty() { rng.gen_range(1..=2) } else { rng.gen_range(0..=2) };
    for _ in 0..atoms {
        m = m.with_atom(rng.gen_range(0.0..=1.0), rng.gen_range(0.1..2.0));
    }
    m
}

#[test]
fn convolution_multiplies_moments() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..100 {
        let (mu, nu) = (random_measure(&mut rng), random_measure(&mut rng));
        let conv = mult_convolve(&mu, &nu).unwrap();
        for n in 0..=12 {
            let expect = mu.moment(n) * nu.moment(n);
            let got = conv.moment(n);
            assert!((got - expect).abs() <= 1e-8 * expect.abs(), "n = {n}: {got} vs {expect}");
        }
    }
}

#[test]
fn atom_at_zero_law() {
    let dens = || Measure1D::from_log_density(STEP, 200, |u| (-2.0 * u).exp());
    for (zero_mu, zero_nu) in [(false, false), (true, false), (false, true), (true, true)] {
        let mu = if zero_mu { dens().with_atom(0.0, 0.3) } else { dens() };
        let nu = if zero_nu { dens().with_atom(0.0, 0.7).with_atom(0.5, 1.0) } else { dens().with_atom(0.5, 1.0) };
        let conv = mult_convolve(&mu, &nu).unwrap();
        let (m0, n0) = (mu.atom_at_zero(), nu.atom_at_zero());
        let expect = m0 * nu.total_mass() + mu.total_mass() * n0 - m0 * n0;
        assert_eq!(conv.atom_at_zero() > 0.0, zero_mu || zero_nu);
        assert!((conv.atom_at_zero() - expect).abs() <= 1e-12, "{zero_mu} {zero_nu}");
    }
}

#[test]
fn closed_form_weight_matches_series() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    let grid: Vec<f64> = (1..=32).map(|i| i as f64 / 33.0).collect();
    for _ in 0..20 {
        let aj: f64 = rng.gen_range(0.5..10.0);
        let cj: f64 = -rng.gen_range(0.01..5.0);
        let ratio: f64 = rng.gen_range(0.1..3.0);
        let k: u32 = rng.gen_range(1..=3);
        for &s in &grid {
            for &t in &grid {
                let closed = weight_wj(s, t, aj, cj, ratio, k).unwrap();
                let series = weight_wj_series(s, t, aj, cj, ratio, k).unwrap();
                assert!((closed - series).abs() <= 1e-12 * series.abs(), "{aj} {cj} {s} {t}: {closed} {series}");
            }
        }
    }
}

#[test]
fn bessel_recurrence_identity() {
    for z in [0.5, 1.0, 2.0, 5.0] {
        let i = |nu: f64| bessel_i(nu, z).unwrap().value;
        let lhs = i(0.0) - i(2.0);
        let rhs = 2.0 / z * i(1.0);
        assert!((lhs - rhs).abs() <= 1e-12 * rhs, "z = {z}");
    }
}

#[test]
fn negative_m_density_goes_negative_past_first_zero() {
    // First positive zero of J0, located independently by bisection on the series.
    let (mut lo, mut hi) = (2.0, 3.0);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if bessel_j(0.0, mid).unwrap().value > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let j0_zero = 0.5 * (lo + hi);
    assert!((j0_zero - 2.404_825_557_695_773).abs() < 1e-12);
    for (a, b, c, d) in [(2.0, 1.0, 1.0, 1.0), (1.0, 1.0, 2.0, 3.0), (3.0, 0.5, 2.0, 1.0)] {
        let p = BilinearPoly::new(a, b, c, d).unwrap();
        let m = measure_bilinear_signed(&p, 1, &MeasureOptions::default()).unwrap();
        let grid = m.grid.unwrap();
        let arg = |s: f64, t: f64| 2.0 / d * (-p.m_value() * s.ln() * t.ln()).sqrt();
        // J0 is negative on (2.405, 5.520).
        let reaches = grid.rows().any(|(s, t, _)| (j0_zero + 1e-9..5.52).contains(&arg(s, t)));
        let negative: Vec<(f64, f64, f64)> = grid.rows().filter(|r| r.2 < 0.0).collect();
        assert_eq!(!negative.is_empty(), reaches, "{p:?}");
        for (s, t, _) in negative {
            assert!(arg(s, t) > j0_zero, "{p:?} at ({s}, {t})");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn interlacing_slices_are_nonnegative(roots in prop::collection::btree_set(1u32..=95, 2..=4)) {
        // Distinct roots on a 0.1 lattice in [0.6, 10], dealt out alternately.
        let r: Vec<f64> = roots.into_iter().map(|x| x as f64 / 10.0 + 0.5).collect();
        let k = r.len() / 2;
        let b: Vec<f64> = r.iter().step_by(2).take(k).copied().collect();
        let a: Vec<f64> = r.iter().skip(1).step_by(2).take(k).copied().collect();
        let p = PencilPoly::monic(&b, &a).unwrap();
        prop_assume!(interlacing_s(&p.a, &p.b).unwrap());
        let t_grid: Vec<f64> = (1..=8).map(|i| i as f64 / 9.0).collect();
        let m = measure_pencil(&p, None, &t_grid, &MeasureOptions::default()).unwrap();
        prop_assert_eq!(m.kind, MeasureKind::SliceFamily);
        prop_assert!(m.min_density >= -1e-10, "{}", m.min_density);
        prop_assert!(!m.signed);
    }

    #[test]
    fn bilinear_moments_reproduce(b in 0.0f64..3.0, c in 0.2f64..3.0, extra in 0.0f64..2.0, l in 1u32..=2) {
        // d chosen so that M = bc - d >= 0 with a = 1.
        let d = (b * c - extra).max(0.05);
        prop_assume!(b * c - d >= 0.0);
        let p = BilinearPoly::new(1.0, b, c, d).unwrap();
        let m = measure_bilinear(&p, l, &MeasureOptions::default()).unwrap();
        prop_assert!(m.min_density >= 0.0);
        let err = verify_moments(&m, &TwoVarPoly::from(p), l, 6, 6).unwrap();
        prop_assert!(err <= 1e-6, "{}", err);
    }
}
