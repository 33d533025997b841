use gegenbauer::coeff::*;
use gegenbauer::domain::{map_point, point_from_theta};
use num_complex::Complex64;
use proptest::prelude::*;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

fn a1_closed(l: f64, t: f64) -> f64 {
    let ct = t / t.tan();
    -l * (l * l - 1.0) / (8.0 * t * t) * ((l - 2.0) * ct * ct - 2.0 * l * ct + l + 2.0)
}

fn a2_closed(l: f64, t: f64) -> f64 {
    let ct = t / t.tan();
    let t2 = t * t;
    let al = [
        (l + 2.0) * (l + 4.0) * (l * l - 9.0),
        4.0 * l * (6.0 * (l + 1.0) * t2 - (l - 1.0) * (l + 2.0) * (l + 3.0)),
        6.0 * (4.0 * (4.0 - l * l + l) * t2 + l * (l * l - 1.0) * (l + 2.0)),
        -4.0 * l * (l + 1.0) * (l + 2.0) * (l - 3.0),
        (l + 2.0) * (l - 4.0) * (l * l - 9.0),
    ];
    let sum: f64 = al.iter().enumerate().map(|(j, a)| a * ct.powi(j as i32)).sum();
    l * (l * l - 1.0) * (l - 2.0) / (384.0 * t2 * t2) * sum
}

fn b0_closed(l: f64, t: f64) -> f64 {
    l * (l - 1.0) / (2.0 * t) * (t / t.tan() - 1.0)
}

fn b1_closed(l: f64, t: f64) -> f64 {
    let ct = t / t.tan();
    let b0 = (l + 2.0) * (l - 3.0);
    let be = [b0, 3.0 * (2.0 * t * t - l * l + l), 3.0 * l * (l - 1.0), -b0];
    let sum: f64 = be.iter().enumerate().map(|(j, b)| b * ct.powi(j as i32)).sum();
    l * (l * l - 1.0) * (l - 2.0) / (48.0 * t * t * t) * sum
}

#[test]
fn first_two_etilde_closed_forms() {
    for &nu in &[0.0, 0.5, 1.2, 2.7] {
        let t = build_coeff_table(nu, 3).unwrap();
        let k = 4.0 * nu * nu - 1.0;
        for &b in &[-0.7, 0.2, 0.6, 1.0, 3.0] {
            assert!((t.etilde[0].eval_real(b) - (-k * b / 8.0)).abs() < 1e-14 * (1.0 + k.abs()));
            assert!((t.etilde[1].eval_real(b) - (-k * b * b / 16.0)).abs() < 1e-14 * (1.0 + k.abs()) * b * b);
        }
        assert!((t.e_at_1_f64(1) + k / 8.0).abs() < 1e-15 * (1.0 + k.abs()));
    }
}

/// E~_s(beta) = -int_0^beta F~_s(b)/(b^2-1) db checked by Simpson quadrature.
#[test]
fn etilde_matches_quadrature() {
    let t = build_coeff_table(1.2, 4).unwrap();
    let beta = 0.6;
    for s in 1..=8 {
        let f = |b: f64| t.ftilde[s - 1].eval_real(b) / (b * b - 1.0);
        let m = 2000;
        let h = beta / m as f64;
        let mut acc = f(0.0) + f(beta);
        for i in 1..m {
            acc += f(i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
        }
        let quad = -acc * h / 3.0;
        let val = t.etilde[s - 1].eval_real(beta);
        assert!((quad - val).abs() < 1e-11 * val.abs().max(1e-3), "s={s}: {quad} vs {val}");
    }
}

#[test]
fn ftilde_vanishes_at_unit_points_and_degrees() {
    let t = build_coeff_table(1.7, 12).unwrap();
    for (i, f) in t.ftilde.iter().enumerate() {
        let s = i + 1;
        assert_eq!(f.degree(), s + 1);
        assert_eq!(t.etilde[i].degree(), s);
        let scale: f64 = f.coeffs_f64().iter().map(|c| c.abs()).sum();
        let one = rug::Float::with_val(256, 1);
        let m_one = rug::Float::with_val(256, -1);
        assert!(f.eval_big(&one).to_f64().abs() <= 1e-20 * scale.max(1.0));
        assert!(f.eval_big(&m_one).to_f64().abs() <= 1e-20 * scale.max(1.0));
        assert_eq!(t.etilde[i].coeffs[0].to_f64(), 0.0);
        let expect = if s % 2 == 0 { Parity::Even } else { Parity::Odd };
        assert_eq!(t.etilde[i].parity, expect);
    }
}

#[test]
fn bessel_exponent_coefficients() {
    let t = build_coeff_table(1.2, 3).unwrap();
    let k = 4.0 * 1.2 * 1.2 - 1.0;
    assert!(rel(t.a[0].to_f64(), k / 8.0) < 1e-15);
    assert!(rel(t.a[1].to_f64(), k / 8.0) < 1e-15);
    assert!(rel(t.a[2].to_f64(), 3.0 / 16.0 * k - k * k / 128.0) < 1e-14);
    let half = build_coeff_table(0.5, 12).unwrap();
    for s in 0..half.order {
        assert_eq!(half.a[s].to_f64(), 0.0);
        assert!((half.a_shift[s].to_f64() - 1.0).abs() < 1e-30);
    }
}

#[test]
fn script_e_examples() {
    let half = build_coeff_table(0.5, 3).unwrap();
    let p = map_point(Complex64::new(2.0, 0.7)).unwrap();
    for s in 1..=half.order {
        assert_eq!(eval_script_e(&half, s, &p, false).unwrap(), Complex64::new(0.0, 0.0));
    }
    let e1 = eval_script_e(&half, 1, &p, true).unwrap();
    assert!((e1 - 1.0 / p.xi).norm() < 1e-15);

    let t = build_coeff_table(1.2, 3).unwrap();
    let p = map_point(Complex64::new(3.0, 0.0)).unwrap();
    let k = 4.0 * 1.2 * 1.2 - 1.0;
    let b = p.beta.unwrap();
    let expect = -k * b / 8.0 + k / 8.0 / p.xi;
    assert!((eval_script_e(&t, 1, &p, false).unwrap() - expect).norm() < 1e-15);
    assert!(eval_script_e(&t, 1, &map_point(Complex64::new(1.0, 0.0)).unwrap(), false).is_err());
}

#[test]
fn hat_e_examples() {
    let half = build_coeff_table(0.5, 3).unwrap();
    for &th in &[0.1, 0.7, 1.5] {
        for s in 1..=half.order {
            assert_eq!(eval_hat_e(&half, s, th, false).unwrap(), 0.0);
        }
    }
    let t = build_coeff_table(1.2, 3).unwrap();
    let a1 = (4.0 * 1.2 * 1.2 - 1.0) / 8.0;
    let v = eval_hat_e(&t, 1, 1.0, false).unwrap();
    assert!(rel(v, a1 / 1f64.tan() - a1) < 1e-14);
    assert!(eval_hat_e(&t, 1, 0.0, false).is_err());
}

#[test]
fn hat_e_relates_to_script_e() {
    let t = build_coeff_table(1.2, 3).unwrap();
    let th = 0.8;
    let p = point_from_theta(th).unwrap();
    for m in 1..=t.order {
        for shifted in [false, true] {
            let full = eval_script_e(&t, m, &p, shifted).unwrap();
            let hat = eval_hat_e(&t, m, th, shifted).unwrap();
            let iota = if m % 2 == 0 { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 1.0) };
            assert!((full - iota * hat).norm() < 1e-12 * hat.abs().max(1.0), "m={m}");
        }
    }
}

#[test]
fn closed_forms_on_theta_grid() {
    let lam = 1.7;
    let t = build_coeff_table(lam - 0.5, 4).unwrap();
    for &th in &[0.3, 0.55, 0.8, 1.2, 1.5] {
        let (a, b) = build_ab_theta(&t, th, 2).unwrap();
        assert_eq!(a[0], 1.0);
        assert!(rel(a[1], a1_closed(lam, th)) < 1e-10, "A1 at {th}");
        assert!(rel(a[2], a2_closed(lam, th)) < 1e-10, "A2 at {th}");
        assert!(rel(b[0], b0_closed(lam, th)) < 1e-10, "B0 at {th}");
        assert!(rel(b[1], b1_closed(lam, th)) < 1e-10, "B1 at {th}");
    }
}

#[test]
fn limits_at_small_theta() {
    let l: f64 = 1.7;
    let th = 1e-3;
    let t = build_coeff_table(l - 0.5, 4).unwrap();
    let (a, b) = build_ab_theta(&t, th, 2).unwrap();
    let q = l * (l * l - 1.0);
    assert!((a[1] + q / 6.0).abs() < 10.0 * th * th);
    assert!((a[2] - q * (l - 2.0) * (l - 3.0) * (5.0 * l + 7.0) / 360.0).abs() < 10.0 * th * th);
    assert!((b[0] / th + l * (l - 1.0) / 6.0).abs() < 10.0 * th * th);
    assert!((b[1] / th + q * (l - 2.0) / 120.0).abs() < 10.0 * th * th);
    let (a0, b0) = build_ab_theta(&t, 0.0, 2).unwrap();
    assert!(rel(a0[1], -q / 6.0) < 1e-14);
    assert_eq!(b0[0], 0.0);
}

#[test]
fn continuity_across_series_cutoff() {
    for &lam in &[0.3, 1.7, 4.5] {
        let t = build_coeff_table(lam - 0.5, 6).unwrap();
        let below = ab_theta_with(&t, THETA_MIN, 6, 6, ThetaMethod::Series).unwrap();
        let above = ab_theta_with(&t, THETA_MIN, 6, 6, ThetaMethod::Direct).unwrap();
        for (x, y) in below.0.iter().chain(&below.1).zip(above.0.iter().chain(&above.1)) {
            let (x, y) = (x.to_f64(), y.to_f64());
            assert!((x - y).abs() <= 1e-12 * x.abs().max(y.abs()), "{lam}: {x} {y}");
        }
    }
}

#[test]
fn maclaurin_parity() {
    let t = build_coeff_table(1.2, 5).unwrap();
    let (a, b) = t.maclaurin_ab().unwrap();
    for c in &a {
        let scale = c.iter().step_by(2).take(10).fold(0.0f64, |m, x| m.max(x.abs()));
        for p in (1..20).step_by(2) {
            assert!(c[p].abs() <= 1e-40 * scale.max(1.0));
        }
    }
    for c in &b {
        let scale = c.iter().skip(1).step_by(2).take(10).fold(0.0f64, |m, x| m.max(x.abs()));
        for p in (0..20).step_by(2) {
            assert!(c[p].abs() <= 1e-40 * scale.max(1.0));
        }
    }
}

#[test]
fn chebyshev_collapse() {
    let t = build_coeff_table(0.5, 6).unwrap();
    for &th in &[0.0, 0.01, 0.3, 1.0, std::f64::consts::FRAC_PI_2] {
        let (a, b) = build_ab_theta(&t, th, 6).unwrap();
        assert_eq!(a[0], 1.0);
        assert!(a[1..].iter().all(|x| x.abs() < 1e-60));
        assert!(b.iter().all(|x| x.abs() < 1e-60));
    }
}

#[test]
fn json_dump_has_decimal_strings() {
    let t = build_coeff_table(1.2, 2).unwrap();
    let v: serde_json::Value = serde_json::from_str(&dump_json(&t, 50)).unwrap();
    assert_eq!(v["order"], 6);
    let e1 = v["etilde"][0][1].as_str().unwrap();
    assert!((e1.parse::<f64>().unwrap() + 0.595).abs() < 1e-15, "{e1}");
}

#[test]
fn order_cap() {
    assert!(build_coeff_table(1.2, 0).is_err());
    assert!(build_coeff_table(1.2, 13).is_err());
    assert!(build_coeff_table(1.2, 12).is_ok());
}

proptest! {
    #[test]
    fn etilde_parity(nu in -0.5f64..5.0, b in -3.0f64..3.0) {
        let t = build_coeff_table(nu, 3).unwrap();
        for (i, e) in t.etilde.iter().enumerate() {
            let s = i + 1;
            let p = e.eval_real(b);
            let m = e.eval_real(-b);
            let sign = if s % 2 == 0 { 1.0 } else { -1.0 };
            let scale: f64 = e.coeffs_f64().iter().map(|c| c.abs()).sum::<f64>() * (1.0 + b.abs()).powi(s as i32);
            prop_assert!((m - sign * p).abs() <= 1e-13 * scale.max(1e-300));
        }
    }
}
