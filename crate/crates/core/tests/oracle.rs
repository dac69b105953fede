use lnsurrogate::dists::*;
use lnsurrogate::mapping::*;
use lnsurrogate::oracle::*;
use lnsurrogate::products::*;
use proptest::prelude::*;

fn lognormal(nu: f64, sigma: f64) -> LognormalParams {
    LognormalParams::new(nu, sigma).unwrap()
}

#[test]
fn two_lognormals_convolve_to_a_lognormal() {
    let (a, b) = (lognormal(0.3, 0.4), lognormal(-0.1, 0.7));
    let c = lognormal(0.2, (0.4f64.powi(2) + 0.7f64.powi(2)).sqrt());
    let grid = GridSpec::log(0.05, 20.0, 200).unwrap();
    let p = fft_product_pdf(&[&a, &b], &grid, &FftConfig::default()).unwrap();
    let err = p.grid.iter().zip(&p.pdf).map(|(&r, &v)| (v - c.pdf(r).unwrap()).abs()).fold(0.0, f64::max);
    assert!(err < 1e-6, "{err}");
    assert!(p.error_bound < 1e-6, "{}", p.error_bound);
}

#[test]
fn single_factor_is_resampled_identity() {
    let w = NakagamiParams::new(2.0, 1.5).unwrap();
    let grid = GridSpec::linear(0.05, 3.0, 60).unwrap();
    let p = fft_product_pdf(&[&w], &grid, &FftConfig::default()).unwrap();
    for (&r, &v) in p.grid.iter().zip(&p.pdf) {
        assert!((v - w.pdf(r).unwrap()).abs() < 1e-8, "{r}: {v}");
    }
}

#[test]
fn product_surrogate_density_matches_convolution() {
    let sol = forward_nakagami(&lognormal(0.5, 0.5), 5).unwrap();
    let x = sol.nakagami_product().unwrap();
    let w = x.factors()[0];
    let refs: Vec<&dyn LogFactor> = vec![&w; 5];
    let grid = GridSpec::linear(0.2, 5.0, 25).unwrap();
    let p = fft_product_pdf(&refs, &grid, &FftConfig::default()).unwrap();
    for (&r, &v) in p.grid.iter().zip(&p.pdf) {
        let closed = x.pdf(r).unwrap();
        assert!((v - closed).abs() < 1e-4, "r = {r}: {v} vs {closed}");
    }
    // the tabulated point at r = 1
    let at_one = p.table.pdf(1.0);
    assert!((at_one - x.pdf(1.0).unwrap()).abs() < 1e-4);

    let sol = forward_inv_nakagami(&lognormal(0.5, 0.5), 5).unwrap();
    let y = sol.inv_product().unwrap();
    let t = y.factors()[0];
    let refs: Vec<&dyn LogFactor> = vec![&t; 5];
    let p = fft_product_pdf(&refs, &grid, &FftConfig::default()).unwrap();
    for (&r, &v) in p.grid.iter().zip(&p.pdf) {
        let closed = y.pdf(r).unwrap();
        assert!((v - closed).abs() < 1e-4, "r = {r}: {v} vs {closed}");
    }
}

#[test]
fn convolution_is_associative() {
    let f1 = NakagamiParams::new(1.5, 2.0).unwrap();
    let f2 = AlphaMuParams::new(3.0, 1.2, 0.8).unwrap();
    let f3 = lognormal(0.1, 0.6);
    let cfg = FftConfig::default();
    let grid = GridSpec::log(0.05, 10.0, 80).unwrap();
    let flat = fft_product_pdf(&[&f1, &f2, &f3], &grid, &cfg).unwrap();
    let t12 = fft_product_pdf(&[&f1, &f2], &grid, &cfg).unwrap().table;
    let t23 = fft_product_pdf(&[&f2, &f3], &grid, &cfg).unwrap().table;
    let left = fft_product_pdf(&[&t12, &f3], &grid, &cfg).unwrap();
    let right = fft_product_pdf(&[&f1, &t23], &grid, &cfg).unwrap();
    let bound = 2.0 * left.error_bound.max(right.error_bound).max(flat.error_bound).max(1e-9);
    for i in 0..grid.points {
        assert!((left.pdf[i] - right.pdf[i]).abs() <= bound, "{i}: {} {} (bound {bound})", left.pdf[i], right.pdf[i]);
    }
}

#[test]
fn aliasing_is_reported() {
    let cfg = FftConfig { span: 2.0, ..Default::default() };
    let grid = GridSpec::log(0.1, 10.0, 10).unwrap();
    let e = fft_product_pdf(&[&lognormal(0.0, 1.0), &lognormal(0.0, 1.0)], &grid, &cfg).unwrap_err();
    assert!(matches!(e, lnsurrogate::Error::Aliasing { .. }), "{e:?}");
}

#[test]
fn monte_carlo_mean_power() {
    let w = NakagamiParams::new(2.0, 3.0).unwrap();
    let est = mc_estimate(|rng| w.sample(rng), |r| r * r, &McConfig::new(200_000, 7)).unwrap();
    assert!(est.z_score(3.0) < 3.0, "{est:?}");
}

#[test]
fn monte_carlo_constant_and_determinism() {
    let w = NakagamiParams::new(2.0, 3.0).unwrap();
    let c = mc_estimate(|rng| w.sample(rng), |_| 2.5, &McConfig::new(50_000, 1)).unwrap();
    assert_eq!(c.mean, 2.5);
    assert_eq!(c.std_error, 0.0);
    let cfg = McConfig { samples: 100_000, seed: 99, batch: 4096 };
    let a = mc_estimate(|rng| w.sample(rng), |r| r.ln(), &cfg).unwrap();
    let b = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap()
        .install(|| mc_estimate(|rng| w.sample(rng), |r| r.ln(), &cfg).unwrap());
    assert_eq!(a, b);
    let other = mc_estimate(|rng| w.sample(rng), |r| r.ln(), &McConfig { seed: 100, ..cfg }).unwrap();
    assert_ne!(a.mean, other.mean);
}

#[test]
fn monte_carlo_error_shrinks_like_root_n() {
    let w = NakagamiParams::new(2.0, 3.0).unwrap();
    let se: Vec<f64> = [10_000u64, 100_000, 1_000_000]
        .iter()
        .map(|&n| mc_estimate(|rng| w.sample(rng), |r| r * r, &McConfig::new(n, 3)).unwrap().std_error)
        .collect();
    for k in 0..2 {
        let ratio = se[k] / se[k + 1];
        assert!((ratio / 10f64.sqrt() - 1.0).abs() < 0.2, "{ratio}");
    }
}

#[test]
fn quadrature_expectation_normalization() {
    let fams: Vec<FadingParams> = vec![
        FadingParams::Lognormal(lognormal(0.5, 0.5)),
        FadingParams::AlphaMu(AlphaMuParams::new(3.5, 2.0, 1.0).unwrap()),
        FadingParams::KappaMu(KappaMuParams::new(2.83, 2.16, 2.66).unwrap()),
        FadingParams::EtaMu(EtaMuParams::new(2.04, 4.51, 4.5, EtaMuFormat::Format1).unwrap()),
        FadingParams::Nakagami(NakagamiParams::new(2.0, 3.0).unwrap()),
        FadingParams::InvNakagami(InvNakagamiParams::new(2.5, 1.0).unwrap()),
    ];
    for f in &fams {
        let q = quad_expectation(|r| f.pdf(r), |_| 1.0, Domain::Positive(f.moment(2.0).unwrap().sqrt())).unwrap();
        assert!((q.value - 1.0).abs() < 1e-8, "{f:?}: {}", q.value);
    }
    let q = quad_expectation(|r| fams[0].pdf(r), |_| 0.0, Domain::Positive(1.0)).unwrap();
    assert_eq!(q.value, 0.0);
}

#[test]
fn surrogates_converge_in_ks() {
    let target = lognormal(0.5, 0.5);
    let grid = GridSpec::log(0.1, 20.0, 120).unwrap();
    let ks = |n: usize| {
        let x = forward_nakagami(&target, n).unwrap().nakagami_product().unwrap();
        ks_distance(|r| target.cdf(r), |r| x.cdf(r), &grid).unwrap()
    };
    let (k5, k10) = (ks(5), ks(10));
    assert!(k10 < k5, "{k10} vs {k5}");
    assert!(ks_distance(|r| target.cdf(r), |r| target.cdf(r), &grid).unwrap() == 0.0);
}

#[test]
fn kl_is_asymmetric_and_reports_clipping() {
    let a = lognormal(0.0, 0.5);
    let b = NakagamiParams::new(1.0, 1.5).unwrap();
    let grid = GridSpec::log(1e-3, 50.0, 4000).unwrap();
    let ab = kl_divergence(|r| a.pdf(r), |r| b.pdf(r), &grid).unwrap();
    let ba = kl_divergence(|r| b.pdf(r), |r| a.pdf(r), &grid).unwrap();
    assert!(ab.value > 0.0 && ba.value > 0.0);
    assert!((ab.value - ba.value).abs() > 1e-3, "{ab:?} {ba:?}");
    assert!(ba.clipped > 0);
    let same = kl_divergence(|r| a.pdf(r), |r| a.pdf(r), &grid).unwrap();
    assert_eq!(same.value, 0.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn ks_triangle_inequality(
        s1 in 0.2f64..1.5, s2 in 0.2f64..1.5, s3 in 0.2f64..1.5,
        n1 in -1.0f64..1.0, n2 in -1.0f64..1.0, n3 in -1.0f64..1.0,
    ) {
        let (a, b, c) = (lognormal(n1, s1), lognormal(n2, s2), lognormal(n3, s3));
        let grid = GridSpec::log(0.01, 100.0, 200).unwrap();
        let ab = ks_distance(|r| a.cdf(r), |r| b.cdf(r), &grid).unwrap();
        let bc = ks_distance(|r| b.cdf(r), |r| c.cdf(r), &grid).unwrap();
        let ac = ks_distance(|r| a.cdf(r), |r| c.cdf(r), &grid).unwrap();
        prop_assert!(ac <= ab + bc + 1e-15);
        prop_assert!((0.0..=1.0).contains(&ab));
    }
}
