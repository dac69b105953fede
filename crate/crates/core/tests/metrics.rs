use lnsurrogate::dists::*;
use lnsurrogate::mapping::*;
use lnsurrogate::metrics::*;
use lnsurrogate::oracle::*;
use lnsurrogate::products::*;
use lnsurrogate::specfun::upper_incomplete_gamma;
use num_complex::Complex64;

fn target(nu: f64, sigma: f64) -> LognormalParams {
    LognormalParams::new(nu, sigma).unwrap()
}

fn nak(nu: f64, sigma: f64, n: usize) -> NakagamiProduct {
    forward_nakagami(&target(nu, sigma), n).unwrap().nakagami_product().unwrap()
}

fn inv(nu: f64, sigma: f64, n: usize) -> InvNakagamiProduct {
    forward_inv_nakagami(&target(nu, sigma), n).unwrap().inv_product().unwrap()
}

/// `±30` log-standard-deviations around the log-mean.
fn log_range(s: &dyn Surrogate) -> Domain {
    let (nu, var) = s.log_stats();
    Domain::LogRange(nu - 30.0 * var.sqrt(), nu + 30.0 * var.sqrt())
}

fn quad_cf(s: &dyn Surrogate, w: f64) -> Complex64 {
    let re = quad_expectation(|r| s.pdf(r), |r| (w * r).cos(), log_range(s)).unwrap().value;
    let im = quad_expectation(|r| s.pdf(r), |r| (w * r).sin(), log_range(s)).unwrap().value;
    Complex64::new(re, im)
}

fn conditional_ber(link: &LinkParams, power: f64) -> impl Fn(f64) -> f64 + '_ {
    move |r: f64| {
        let g = link.gamma_bar * r * r / power;
        upper_incomplete_gamma(link.b, link.a * g).unwrap() / (2.0 * lnsurrogate::specfun::gamma(link.b).unwrap())
    }
}

#[test]
fn cf_matches_quadrature() {
    let x = nak(0.5, 0.5, 5);
    let y = inv(0.5, 0.5, 5);
    for &w in &[0.5, 1.0, 5.0, -1.7] {
        let (c, q) = (cf_nak_product(&x, w).unwrap(), quad_cf(&x, w));
        assert!((c - q).norm() < 1e-7, "ω = {w}: {c} vs {q}");
        let (c, q) = (cf_inv_product(&y, w).unwrap(), quad_cf(&y, w));
        assert!((c - q).norm() < 1e-7, "ω = {w}: {c} vs {q}");
    }
}

#[test]
fn cf_matches_monte_carlo() {
    let x = nak(0.5, 0.5, 5);
    let y = inv(0.5, 0.5, 5);
    let cfg = McConfig::new(400_000, 11);
    for &w in &[0.5, 1.0, 5.0] {
        for (s, c) in [(&x as &dyn Surrogate, cf_nak_product(&x, w).unwrap()), (&y, cf_inv_product(&y, w).unwrap())] {
            let cos = move |r: f64| (w * r).cos();
            let sin = move |r: f64| (w * r).sin();
            let fs: [&(dyn Fn(f64) -> f64 + Sync); 2] = [&cos, &sin];
            let est = mc_estimate_many(|rng| s.sample_dyn(rng), &fs, &cfg).unwrap();
            assert!(est[0].z_score(c.re) < 3.0, "ω = {w}: {:?} vs {}", est[0], c.re);
            assert!(est[1].z_score(c.im) < 3.0, "ω = {w}: {:?} vs {}", est[1], c.im);
        }
    }
}

#[test]
fn cf_is_bounded() {
    let x = nak(-1.0, 1.0, 10);
    let y = inv(-1.0, 1.0, 10);
    for i in 0..40 {
        let w = 0.05 * 1.3f64.powi(i);
        assert!(cf_nak_product(&x, w).unwrap().norm() <= 1.0 + 1e-9);
        assert!(cf_inv_product(&y, w).unwrap().norm() <= 1.0 + 1e-9);
    }
}

#[test]
fn ber_matches_quadrature_and_monte_carlo() {
    let x = nak(-1.0, 1.0, 10);
    let y = inv(-1.0, 1.0, 10);
    let cfg = McConfig::new(400_000, 5);
    for &gb in &[1.0, 10.0, 100.0] {
        let link = LinkParams::dbpsk(gb).unwrap();
        for (s, v) in [
            (&x as &dyn Surrogate, ber_nak_product(&x, &link).unwrap()),
            (&y, ber_inv_product(&y, &link).unwrap()),
        ] {
            let f = conditional_ber(&link, s.mean_power());
            let q = quad_expectation(|r| s.pdf(r), &f, log_range(s)).unwrap().value;
            assert!((v - q).abs() < 1e-6, "γ̄ = {gb}: {v} vs {q}");
            let est = mc_estimate(|rng| s.sample_dyn(rng), &f, &cfg).unwrap();
            assert!(est.z_score(v) < 3.0, "γ̄ = {gb}: {est:?} vs {v}");
        }
    }
}

#[test]
fn ber_with_other_modulation_constants() {
    // coherent BPSK: a = 1, b = 1/2
    let x = nak(0.5, 0.5, 5);
    let y = inv(0.5, 0.5, 5);
    let link = LinkParams::new(8.0, 1.0, 0.5, 1.0).unwrap();
    for (s, v) in [(&x as &dyn Surrogate, ber_nak_product(&x, &link).unwrap()), (&y, ber_inv_product(&y, &link).unwrap())] {
        let f = conditional_ber(&link, s.mean_power());
        let q = quad_expectation(|r| s.pdf(r), &f, log_range(s)).unwrap().value;
        assert!((v - q).abs() < 1e-7, "{v} vs {q}");
    }
}

#[test]
fn ber_is_decreasing_and_bounded() {
    let x = nak(0.5, 0.5, 5);
    let y = inv(0.5, 0.5, 5);
    let mut prev = (0.5, 0.5);
    for i in 0..25 {
        let link = LinkParams::dbpsk(10f64.powf(-1.0 + 0.2 * i as f64)).unwrap();
        let (a, b) = (ber_nak_product(&x, &link).unwrap(), ber_inv_product(&y, &link).unwrap());
        assert!(a > 0.0 && a < prev.0 && b > 0.0 && b < prev.1, "{i}: {a} {b}");
        prev = (a, b);
    }
}

#[test]
fn capacity_matches_quadrature() {
    let x = nak(-1.0, 1.0, 10);
    let y = inv(-1.0, 1.0, 10);
    for &gb in &[1.0, 10.0, 100.0] {
        let link = LinkParams::new(gb, 1.0, 1.0, 2.0).unwrap();
        for (s, v) in [
            (&x as &dyn Surrogate, capacity_nak_product(&x, &link).unwrap()),
            (&y, capacity_inv_product(&y, &link).unwrap()),
        ] {
            let p = s.mean_power();
            let q = quad_expectation(|r| s.pdf(r), |r| 2.0 * (gb * r * r / p).ln_1p() / std::f64::consts::LN_2, log_range(s))
                .unwrap()
                .value;
            assert!(((v - q) / q).abs() < 1e-6, "γ̄ = {gb}: {v} vs {q}");
        }
    }
}

#[test]
fn capacity_is_increasing_concave_and_vanishes() {
    let x = nak(0.5, 0.5, 5);
    let y = inv(0.5, 0.5, 5);
    let cx: Vec<f64> = (0..21)
        .map(|i| capacity_nak_product(&x, &LinkParams::dbpsk(10f64.powf(-1.0 + 0.15 * i as f64)).unwrap()).unwrap())
        .collect();
    let cy: Vec<f64> = (0..21)
        .map(|i| capacity_inv_product(&y, &LinkParams::dbpsk(10f64.powf(-1.0 + 0.15 * i as f64)).unwrap()).unwrap())
        .collect();
    // concavity in γ̄ itself: use a linear grid
    let lin = |s: &dyn Fn(f64) -> f64| -> Vec<f64> { (1..30).map(|i| s(0.5 * i as f64)).collect() };
    let lx = lin(&|g| capacity_nak_product(&x, &LinkParams::dbpsk(g).unwrap()).unwrap());
    let ly = lin(&|g| capacity_inv_product(&y, &LinkParams::dbpsk(g).unwrap()).unwrap());
    for c in [&cx, &cy, &lx, &ly] {
        assert!(c.windows(2).all(|w| w[1] > w[0]));
    }
    for c in [&lx, &ly] {
        assert!(c.windows(3).all(|w| w[2] - 2.0 * w[1] + w[0] <= 1e-9), "{c:?}");
    }
    let tiny = LinkParams::new(1e-6, 1.0, 1.0, 3.0).unwrap();
    assert!(capacity_nak_product(&x, &tiny).unwrap() < 1e-5 * 3.0);
    assert!(capacity_inv_product(&y, &tiny).unwrap() < 1e-5 * 3.0);
}

#[test]
fn mixture_metrics_are_linear_in_p() {
    let x = nak(0.5, 0.5, 5);
    let y = inv(0.5, 0.5, 5);
    let link = LinkParams::dbpsk(10.0).unwrap();
    let (bx, by) = (ber_nak_product(&x, &link).unwrap(), ber_inv_product(&y, &link).unwrap());
    for &p in &[0.0, 0.25, 0.5, 1.0] {
        let z = Mixture::new(p, x.clone(), y.clone()).unwrap();
        assert_eq!(ber_mixture(&z, &link).unwrap(), p * bx + (1.0 - p) * by);
        let c = cf_mixture(&z, 1.3).unwrap();
        let want = cf_nak_product(&x, 1.3).unwrap() * p + cf_inv_product(&y, 1.3).unwrap() * (1.0 - p);
        assert_eq!(c, want);
    }
    assert_eq!(ber_mixture(&Mixture::new(1.0, x.clone(), y.clone()).unwrap(), &link).unwrap(), bx);
    assert_eq!(ber_mixture(&Mixture::new(0.0, x.clone(), y.clone()).unwrap(), &link).unwrap(), by);

    let z = Mixture::new(0.5, x, y).unwrap();
    let f = conditional_ber(&link, 1.0);
    // mixture sampler with each branch normalized by its own mean power
    let px = z.nak().mean_power();
    let py = z.inv().mean_power();
    let est = mc_estimate(
        |rng| {
            use rand::Rng;
            if rng.random::<f64>() < 0.5 {
                z.nak().sample_dyn(rng) / px.sqrt()
            } else {
                z.inv().sample_dyn(rng) / py.sqrt()
            }
        },
        &f,
        &McConfig::new(400_000, 21),
    )
    .unwrap();
    assert!(est.z_score(ber_mixture(&z, &link).unwrap()) < 3.0, "{est:?}");
}

#[test]
fn surrogate_gap_shrinks_with_n() {
    let link = LinkParams::dbpsk(10.0).unwrap();
    let gap = |n| {
        (ber_nak_product(&nak(0.5, 0.5, n), &link).unwrap() - ber_inv_product(&inv(0.5, 0.5, n), &link).unwrap()).abs()
    };
    assert!(gap(10) < gap(5));
}

fn composite(alpha: f64, mu: f64, shadow: Shadow) -> CompositeParams {
    CompositeParams::from_r_hat(alpha, mu, 1.0, shadow).unwrap()
}

fn quad_composite(c: &CompositeParams, r: f64) -> f64 {
    let s = c.shadow.surrogate();
    quad_expectation(|d| s.pdf(d), |d| c.conditional_pdf(r, d), log_range(s)).unwrap().value
}

#[test]
fn composite_special_paths_equal_general_path() {
    for shadow in [Shadow::Nakagami(nak(0.5, 0.5, 5)), Shadow::InvNakagami(inv(0.5, 0.5, 5))] {
        for &alpha in &[4.0, 2.0] {
            let c = composite(alpha, 2.0, shadow.clone());
            for &r in &[0.3, 0.8, 1.5, 2.5, 4.0] {
                let (a, b) = (c.pdf(r).unwrap(), c.pdf_fox(r).unwrap());
                assert!((a - b).abs() < 1e-6 * b.abs().max(1e-3), "α = {alpha}, r = {r}: {a} vs {b}");
                let (a, b) = (c.cdf(r).unwrap(), c.cdf_fox(r).unwrap());
                assert!((a - b).abs() < 1e-6, "α = {alpha}, r = {r}: {a} vs {b}");
            }
        }
    }
}

#[test]
fn composite_matches_quadrature() {
    for shadow in [Shadow::Nakagami(nak(0.5, 0.5, 5)), Shadow::InvNakagami(inv(0.5, 0.5, 5))] {
        for &alpha in &[3.5, 4.0, 2.0] {
            let c = composite(alpha, 2.0, shadow.clone());
            for &r in &[0.2, 0.6, 1.0, 1.8, 3.0, 5.0] {
                let (v, q) = (c.pdf(r).unwrap(), quad_composite(&c, r));
                assert!((v - q).abs() < 1e-4, "α = {alpha}, r = {r}: {v} vs {q}");
            }
        }
    }
}

#[test]
fn composite_cdf_matches_quadrature() {
    for shadow in [Shadow::Nakagami(nak(0.5, 0.5, 5)), Shadow::InvNakagami(inv(0.5, 0.5, 5))] {
        for &alpha in &[3.5, 2.0] {
            let c = composite(alpha, 2.0, shadow.clone());
            let s = c.shadow.surrogate();
            for &r in &[0.2, 1.0, 3.0] {
                let q = quad_expectation(|d| s.pdf(d), |d| c.conditional_cdf(r, d).unwrap(), log_range(s)).unwrap().value;
                let v = c.cdf(r).unwrap();
                assert!((v - q).abs() < 1e-4, "α = {alpha}, r = {r}: {v} vs {q}");
            }
        }
    }
}

#[test]
fn composite_normalization_and_cdf_consistency() {
    for shadow in [Shadow::Nakagami(nak(0.5, 0.5, 5)), Shadow::InvNakagami(inv(0.5, 0.5, 5))] {
        let c = composite(3.5, 2.0, shadow);
        let total = quad_expectation(|r| c.pdf(r), |_| 1.0, Domain::Positive(1.5)).unwrap().value;
        assert!((total - 1.0).abs() < 1e-4, "{total}");
        for &r in &[0.5, 1.0, 2.0, 4.0] {
            let int = quad_expectation(|t| c.pdf(t), |_| 1.0, Domain::Interval(0.0, r)).unwrap().value;
            assert!((int - c.cdf(r).unwrap()).abs() < 1e-4, "r = {r}");
        }
    }
}

#[test]
fn composite_mixture_is_convex_combination() {
    let (x, y) = (nak(0.5, 0.5, 5), inv(0.5, 0.5, 5));
    let z = Mixture::new(0.5, x.clone(), y.clone()).unwrap();
    let cz = composite(3.5, 2.0, Shadow::Mixture(z));
    let cx = composite(3.5, 2.0, Shadow::Nakagami(x));
    let cy = composite(3.5, 2.0, Shadow::InvNakagami(y));
    for &r in &[0.5, 1.5] {
        let want = 0.5 * cx.pdf(r).unwrap() + 0.5 * cy.pdf(r).unwrap();
        assert!((cz.pdf(r).unwrap() - want).abs() < 1e-15);
    }
    assert!(composite_pdf_nak(&cy, 1.0).is_err());
    assert!(composite_pdf_inv(&cx, 1.0).is_err());
    assert_eq!(composite_pdf_nak(&cx, 1.0).unwrap(), cx.pdf(1.0).unwrap());
    assert_eq!(composite_cdf_inv(&cy, 1.0).unwrap(), cy.cdf(1.0).unwrap());
}

#[test]
fn composite_approaches_lognormal_shadow() {
    let t = target(0.5, 0.5);
    let exact_c = composite(3.5, 2.0, Shadow::Nakagami(nak(0.5, 0.5, 1)));
    let exact = |r: f64| {
        quad_expectation(|d| t.pdf(d), |d| exact_c.conditional_pdf(r, d), Domain::LogRange(0.5 - 15.0, 0.5 + 15.0))
            .unwrap()
            .value
    };
    let rs = [0.3, 0.7, 1.0, 1.5, 2.5, 4.0];
    let err = |n: usize| {
        let c = composite(3.5, 2.0, Shadow::Nakagami(nak(0.5, 0.5, n)));
        rs.iter().map(|&r| (c.pdf(r).unwrap() - exact(r)).abs()).fold(0.0, f64::max)
    };
    let (e2, e5, e10) = (err(2), err(5), err(10));
    assert!(e10 < e5 && e5 < e2, "{e2} {e5} {e10}");
}

#[test]
fn nakagami_multipath_composite() {
    let shadow = Shadow::Nakagami(nak(0.5, 0.5, 5));
    let c = CompositeParams::new(2.0, 2.0, 1.0, shadow.clone()).unwrap();
    for &r in &[0.4, 1.0, 2.2] {
        let (p, f) = composite_nakagami_lognormal(2.0, 1.0, shadow.clone(), r).unwrap();
        assert_eq!(p, c.pdf(r).unwrap());
        assert_eq!(f, c.cdf(r).unwrap());
        assert!((p - quad_composite(&c, r)).abs() < 1e-4);
    }
    let (_, f) = composite_nakagami_lognormal(2.0, 1.0, shadow, 200.0).unwrap();
    assert!((f - 1.0).abs() < 1e-6, "{f}");
}

#[test]
fn shadow_from_solution_checks_residuals() {
    let sol = forward_inv_nakagami(&target(0.5, 0.5), 5).unwrap();
    assert!(matches!(Shadow::from_solution(&sol, 1e-8).unwrap(), Shadow::InvNakagami(_)));
    let mut bad = sol;
    bad.residuals.0 = 1e-3;
    assert!(Shadow::from_solution(&bad, 1e-8).is_err());
}
