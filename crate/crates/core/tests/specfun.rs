mod common;

use hardedge::quadrature::{quad_rule, QuadKind};
use hardedge::specfun::{bessel_pair, log_barnes_g, log_barnes_g_spliced, log_gamma, log_inc_beta, zeta_prime_minus_one, BesselSeries};
use hardedge::PrecisionCtx;
use proptest::prelude::*;
use rug::float::Constant;
use rug::Float;

fn ctx(bits: u32) -> PrecisionCtx {
    PrecisionCtx::new(bits).unwrap()
}

/// zeta'(2) = -sum ln k / k^2 by direct summation with an Euler-Maclaurin tail.
fn zeta_prime_two(prec: u32) -> Float {
    let n = 20_000u32;
    let mut s = Float::new(prec);
    for k in 2..n {
        let kf = Float::with_val(prec, k);
        s += Float::with_val(prec, kf.ln_ref()) / Float::with_val(prec, kf.square_ref());
    }
    let nf = Float::with_val(prec, n);
    let ln_n = Float::with_val(prec, nf.ln_ref());
    let n2 = Float::with_val(prec, nf.square_ref());
    let n3 = Float::with_val(prec, &n2 * &nf);
    // sum_{k>=N} f(k) = int_N^inf f + f(N)/2 - f'(N)/12 + ..., f = ln x / x^2
    let integral = Float::with_val(prec, &ln_n + 1u32) / &nf;
    let half_f = Float::with_val(prec, &ln_n / &n2) / 2u32;
    let fprime = (Float::with_val(prec, 1) - Float::with_val(prec, &ln_n * 2u32)) / &n3;
    s += integral + half_f - fprime / 12u32;
    -s
}

#[test]
fn zeta_prime_matches_zeta_two_route() {
    let prec = 128;
    let c = ctx(96);
    let pi = Float::with_val(prec, Constant::Pi);
    let gamma = Float::with_val(prec, Constant::Euler);
    let two_pi = Float::with_val(prec, &pi * 2u32);
    let mut oracle = (Float::with_val(prec, 1) - gamma - two_pi.ln()) / 12u32;
    oracle += zeta_prime_two(prec) / (Float::with_val(prec, pi.square_ref()) * 2u32);
    let ours = zeta_prime_minus_one(&c);
    assert!(Float::with_val(prec, &ours - &oracle).abs() < 1e-16, "{} vs {}", ours.to_f64(), oracle.to_f64());
    let literal = Float::with_val(prec, Float::parse("-0.16542114370045092921391966024278064276063").unwrap());
    assert!(Float::with_val(prec, &ours - &literal).abs() < 1e-28);
}

#[test]
fn barnes_half_closed_form() {
    let c = ctx(256);
    let p = c.prec();
    let zp = zeta_prime_minus_one(&c);
    let pi = Float::with_val(p, Constant::Pi);
    let ln2 = Float::with_val(p, Constant::Log2);
    let expect = Float::with_val(p, &zp * 3u32) / 2u32 - Float::with_val(p, pi.ln_ref()) / 4u32 + ln2 / 24u32;
    let got = log_barnes_g(0.5, &c).unwrap();
    assert!(Float::with_val(p, got - expect).abs() < 1e-70);
}

#[test]
fn barnes_recursion_and_series_agree() {
    let c = ctx(256);
    let p = c.prec();
    for z in [10.3, 30.7, 100.1] {
        let near = log_barnes_g_spliced(z, 40.0, &c).unwrap();
        let far = log_barnes_g_spliced(z, 400.0, &c).unwrap();
        let diff = Float::with_val(p, &near - &far).abs();
        assert!(diff < 1e-60, "z = {z}: {}", diff.to_f64());
    }
}

#[test]
fn barnes_at_large_precision() {
    let c = ctx(1024);
    let p = c.prec();
    // G(12) = prod_{k=1}^{10} k!
    let mut expect = Float::new(p);
    for k in 1..=10u32 {
        expect += log_gamma(k as f64 + 1.0, &c).unwrap();
    }
    let got = log_barnes_g(12.0, &c).unwrap();
    assert!(Float::with_val(p, got - expect).abs() < Float::with_val(p, 1) >> 1000);
}

/// J_n(z) = (1/pi) int_0^pi cos(n theta - z sin theta) d theta, trapezoid rule
/// (exponentially convergent for this periodic integrand).
fn bessel_j_integer(n: i32, z: f64) -> f64 {
    let m = 2000;
    let h = std::f64::consts::PI / m as f64;
    let mut s = 0.0;
    for i in 0..=m {
        let th = i as f64 * h;
        let w = if i == 0 || i == m { 0.5 } else { 1.0 };
        s += w * (n as f64 * th - z * th.sin()).cos();
    }
    s * h / std::f64::consts::PI
}

#[test]
fn bessel_pair_half_order_closed_form() {
    let c = ctx(256);
    let p = c.prec();
    let (g, h) = bessel_pair(0.5, 4.0, &c).unwrap();
    let two = Float::with_val(p, 2);
    let sqrt_2pi = Float::with_val(p, Float::with_val(p, Constant::Pi) * 2u32).sqrt();
    let sin2 = Float::with_val(p, two.sin_ref());
    let cos2 = Float::with_val(p, two.cos_ref());
    let g_expect = Float::with_val(p, &sin2 / &sqrt_2pi);
    // z J'(z) for J = sqrt(2/(pi z)) sin z, divided by x^(1/4) = sqrt 2
    let h_expect = (Float::with_val(p, &cos2 * 2u32) - Float::with_val(p, &sin2 / 2u32)) / &sqrt_2pi;
    assert!(Float::with_val(p, &g - &g_expect).abs() < 1e-70);
    assert!(Float::with_val(p, &h - &h_expect).abs() < 1e-70);
}

#[test]
fn bessel_pair_at_origin() {
    let c = ctx(128);
    let (g, h) = bessel_pair(0.0, 0.0, &c).unwrap();
    assert_eq!(g.to_f64(), 1.0);
    assert_eq!(h.to_f64(), 0.0);
}

#[test]
fn bessel_pair_matches_integral_representation() {
    let c = ctx(128);
    for n in [0i32, 1, 2] {
        for x in [0.5, 7.0, 60.0, 400.0, 900.0] {
            let z = f64::sqrt(x);
            let j = bessel_j_integer(n, z);
            let (g, _) = bessel_pair(n as f64, x, &c).unwrap();
            let ours = g.to_f64() * z.powi(n);
            assert!((ours - j).abs() < 1e-13, "n={n} x={x}: {ours} vs {j}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10))]

    #[test]
    fn bessel_series_solves_ode(x in 0.0f64..100.0, alpha in -0.9f64..3.0) {
        let c = ctx(192);
        let p = c.prec();
        let xf = Float::with_val(p, x);
        let s = BesselSeries::eval(alpha, &xf, p).unwrap();
        // 4 x g'' + 4 (alpha + 1) g' + g = 0
        let mut r = Float::with_val(p, &xf * &s.d2g) * 4u32;
        r += Float::with_val(p, &s.dg * Float::with_val(p, Float::with_val(p, alpha) + 1u32)) * 4u32;
        r += &s.g;
        let scale = Float::with_val(p, s.g.abs_ref()) + Float::with_val(p, s.dg.abs_ref()) * (x + 1.0);
        prop_assert!((r / scale).to_f64().abs() < 1e-45);
    }

    #[test]
    fn barnes_functional_equation(z in 0.05f64..60.0) {
        let c = ctx(160);
        let p = c.prec();
        let zf = Float::with_val(p, z);
        let lhs = log_barnes_g(Float::with_val(p, &zf + 1u32), &c).unwrap();
        let rhs = log_gamma(&zf, &c).unwrap() + log_barnes_g(&zf, &c).unwrap();
        let scale = Float::with_val(p, lhs.abs_ref()) + 1u32;
        prop_assert!((Float::with_val(p, lhs - rhs).abs() / scale).to_f64() < 1e-44);
    }
}

#[test]
fn incomplete_beta_matches_tanh_sinh() {
    let c = ctx(256);
    let p = c.prec();
    let cases = [(2u32, 0.3, 0.5, 1.5), (0, 0.7, 1.0, 2.0), (7, 0.05, 2.5, 0.5), (15, 0.9, 0.5, -0.5), (3, 0.5, -0.5, 1.0), (30, 0.36, 1.0, 2.0)];
    for (k, t, alpha, beta) in cases {
        let tf = Float::with_val(p, t);
        let one = Float::with_val(p, 1);
        let q = common::tanh_sinh(p, &tf, &one, |x, _, to_one| {
            let a = Float::with_val(p, x.ln_ref()) * (k as f64 + alpha);
            let b = Float::with_val(p, to_one.ln_ref()) * beta;
            Float::with_val(p, a + b).exp()
        });
        let ours = log_inc_beta(k, t, alpha, beta, &c).unwrap().exp();
        let err = common::rel_err(&ours, &q);
        assert!(err < 2f64.powi(-128), "k={k} t={t}: rel err {err:e}");
    }
}

#[test]
fn incomplete_beta_at_zero_is_complete_beta() {
    let c = ctx(128);
    let p = c.prec();
    let got = log_inc_beta(1, 0.0, 0.5, 1.5, &c).unwrap();
    // B(2.5, 2.5) = Gamma(2.5)^2 / Gamma(5) = (3 sqrt(pi) / 4)^2 / 24
    let pi = Float::with_val(p, Constant::Pi);
    let expect = (pi * 9u32 / 16u32 / 24u32).ln();
    assert!(Float::with_val(p, got - expect).abs() < 1e-36);
}

#[test]
fn gauss_rules_are_exact_on_polynomials() {
    let c = ctx(128);
    let p = c.prec();
    let leg = quad_rule(QuadKind::Legendre, 5, (-1.0, 1.0), &c).unwrap();
    let v = leg.integrate(|x| Float::with_val(p, rug::ops::Pow::pow(x, 8u32)));
    assert!(Float::with_val(p, v - Float::with_val(p, 2) / 9u32).abs() < 1e-35);

    let jac = quad_rule(QuadKind::Jacobi(1.0), 6, (0.0, 1.0), &c).unwrap();
    for k in 0..=11u32 {
        let v = jac.integrate(|x| Float::with_val(p, rug::ops::Pow::pow(x, k)));
        let expect = Float::with_val(p, 1) / (k + 2);
        assert!(Float::with_val(p, v - expect).abs() < 1e-35, "k = {k}");
    }
}

#[test]
fn gauss_jacobi_handles_singular_weight() {
    let c = ctx(128);
    let p = c.prec();
    let s = 9.0;
    let rule = quad_rule(QuadKind::Jacobi(-0.5), 10, (0.0, s), &c).unwrap();
    // int_0^s x^(-1/2) x^3 dx = s^3.5 / 3.5
    let v = rule.integrate(|x| Float::with_val(p, rug::ops::Pow::pow(x, 3u32)));
    let expect = f64::powf(s, 3.5) / 3.5;
    assert!((v.to_f64() / expect - 1.0).abs() < 1e-15);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn gauss_rule_invariants(m in 1usize..40, a in -0.95f64..4.0, lo in -5.0f64..5.0, width in 0.1f64..50.0, legendre in any::<bool>()) {
        let c = ctx(96);
        let p = c.prec();
        let kind = if legendre { QuadKind::Legendre } else { QuadKind::Jacobi(a) };
        let hi = lo + width;
        let rule = quad_rule(kind, m, (lo, hi), &c).unwrap();
        prop_assert_eq!(rule.len(), m);
        prop_assert!(rule.nodes.windows(2).all(|w| w[0] < w[1]));
        prop_assert!(rule.nodes.iter().all(|x| *x > lo && *x < hi));
        prop_assert!(rule.weights.iter().all(|w| w.is_sign_positive() && !w.is_zero()));
        let mass = rule.weights.iter().fold(Float::new(p), |acc, w| acc + w);
        let b = if legendre { 0.0 } else { a };
        let expect = width.powf(b + 1.0) / (b + 1.0);
        prop_assert!((mass.to_f64() / expect - 1.0).abs() < 1e-14);
    }
}
