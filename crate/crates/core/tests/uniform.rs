use gegenbauer::coeff::build_coeff_table;
use gegenbauer::oracle::{oracle_ab, oracle_c, oracle_d, oracle_envelope, oracle_hat_c};
use gegenbauer::specfun::prefactor;
use gegenbauer::uniform::*;
use gegenbauer::{make_params, map_point, Error};
use num_complex::Complex64;
use proptest::prelude::*;
use std::f64::consts::{FRAC_PI_2, PI};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[test]
fn series_matches_oracle_within_bound() {
    for &lambda in &[0.3, 1.7] {
        for &n in &[10, 30] {
            let p = make_params(lambda, n).unwrap();
            let table = build_coeff_table(p.nu, 5).unwrap();
            for i in 0..8 {
                let z = 2.5 + 3.5 * i as f64 / 7.0;
                let r = ab_series_table(&table, &p, &map_point(c(z, 0.0)).unwrap(), 5, DELTA_EVAL).unwrap();
                let (oa, ob) = oracle_ab(&p, z, 40).unwrap();
                let (oa, ob) = (oa.to_f64(), ob.to_f64());
                let (da, db) = ((r.a.re - oa).abs(), (r.b.re - ob).abs());
                assert!(da <= r.bound_a, "A lambda={lambda} n={n} z={z}: {da} > {}", r.bound_a);
                assert!(db <= r.bound_b, "B lambda={lambda} n={n} z={z}: {db} > {}", r.bound_b);
                if n == 30 {
                    let rel = da.max(db) / oa.abs().max(ob.abs());
                    assert!(rel <= 1e-8, "lambda={lambda} z={z}: {rel}");
                }
                assert_eq!(r.method, Method::DirectSeries);
            }
        }
    }
}

#[test]
fn reality_on_the_real_axis() {
    let p = make_params(1.7, 10).unwrap();
    for &z in &[2.0, 3.0, 7.5, 1e6] {
        let r = ab_series(&p, &map_point(c(z, 0.0)).unwrap(), 5).unwrap();
        assert!(r.a.im == 0.0 && r.b.im == 0.0, "z={z}");
    }
    // Schwarz symmetry off the axis
    let up = ab_series(&p, &map_point(c(2.0, 1.5)).unwrap(), 5).unwrap();
    let lo = ab_series(&p, &map_point(c(2.0, -1.5)).unwrap(), 5).unwrap();
    assert!((up.a - lo.a.conj()).norm() <= 1e-15 * up.a.norm());
    assert_eq!(up.bound_a, lo.bound_a);
}

#[test]
fn large_z_against_oracle() {
    let p = make_params(1.7, 10).unwrap();
    let table = build_coeff_table(p.nu, 5).unwrap();
    for &z in &[1e3, 1e6] {
        let r = ab_series(&p, &map_point(c(z, 0.0)).unwrap(), 5).unwrap();
        let (oa, ob) = oracle_ab(&p, z, 40).unwrap();
        assert!((r.a.re - oa.to_f64()).abs() <= r.bound_a, "z={z}");
        assert!((r.b.re - ob.to_f64()).abs() <= r.bound_b, "z={z}");
    }
    // the two prefactors agree to the truncation order
    let full = prefactor(&p).value;
    let pt = trunc_prefactor(&table, &p, 5);
    assert!((full / pt - 1.0).abs() < 10.0 * p.u.powi(-5));
}

#[test]
fn lambda_one_collapse() {
    let p = make_params(1.0, 9).unwrap();
    let f = a_series_factor(&p, c(3.0, 0.0), 5).unwrap();
    assert!((f.re - 1.0).abs() <= 2e-5 && f.im == 0.0);
    let r = ab_series(&p, &map_point(c(3.0, 0.0)).unwrap(), 5).unwrap();
    assert_eq!(r.b.re, 0.0);
    assert_eq!(r.bound_b, 0.0);
    for &theta in &[0.0, 0.3, 1.2, FRAC_PI_2] {
        let h = ab_hat_series(&p, theta, 4).unwrap();
        assert!((h.a.re - 1.0).abs() < 1e-15 && h.b.re.abs() < 1e-15);
    }
    let v = eval_c_real(&p, 0.7, 1).unwrap();
    let expect = 7f64.sin() / 0.7f64.sin();
    assert!((v.value - expect).abs() <= 1e-12 * expect.abs().max(1.0));
}

#[test]
fn hat_series_at_theta_zero() {
    let l: f64 = 1.7;
    let p = make_params(l, 10).unwrap();
    let h = ab_hat_series(&p, 0.0, 2).unwrap();
    let a1 = -l * (l * l - 1.0) / 6.0;
    let a2 = l * (l * l - 1.0) * (l - 2.0) * (l - 3.0) * (5.0 * l + 7.0) / 360.0;
    let expect = 1.0 + a1 / p.u.powi(2) + a2 / p.u.powi(4);
    assert!((h.a.re - expect).abs() < 1e-14);
    let v = eval_c_real(&p, 0.0, 4).unwrap();
    let exact = oracle_c(&p, 1.0, 40).to_f64();
    assert!((v.value / exact - 1.0).abs() < 1e-14);
}

#[test]
fn hat_series_vs_exp_trig_form() {
    let p = make_params(1.7, 10).unwrap();
    let n = 7;
    let (ea, eb) = hat_exp_trig(&p, 1.0, n).unwrap();
    let h = ab_hat_series(&p, 1.0, 6).unwrap();
    let tol = p.u.powi(-(n as i32));
    assert!((ea - h.a.re).abs() <= tol, "{ea} vs {}", h.a.re);
    assert!((eb - h.b.re).abs() <= tol, "{eb} vs {}", h.b.re);
}

#[test]
fn cauchy_matches_interval_form_near_one() {
    let p = make_params(1.7, 10).unwrap();
    let theta: f64 = 0.1;
    let r = ab_cauchy(&p, c(theta.cos(), 0.0), 7).unwrap();
    assert!(r.nodes <= 1024);
    let h = ab_hat_series(&p, theta, 6).unwrap();
    let pf = prefactor(&p).value;
    // A = pf hat A, B = i pf hat B
    assert!((r.a.re / (pf * h.a.re) - 1.0).abs() <= 1e-7);
    assert!((r.b.im - pf * h.b.re).abs() <= 1e-7 * pf);
    assert!(r.a.im.abs() <= 1e-10 * r.a.norm());
    assert!(r.b.re.abs() <= 1e-10 * r.a.norm());
    assert!((r.a.re - pf * h.a.re).abs() <= r.bound_a);
}

#[test]
fn cauchy_and_series_agree_on_overlap() {
    let p = make_params(1.7, 10).unwrap();
    let z = 1.0 + Complex64::from_polar(0.95, PI / 4.0);
    let table = build_coeff_table(p.nu, 5).unwrap();
    let s = ab_series_table(&table, &p, &map_point(z).unwrap(), 5, 0.9).unwrap();
    let k = ab_cauchy(&p, z, 5).unwrap();
    assert!((s.a - k.a).norm() <= s.bound_a + k.bound_a);
    assert!((s.b - k.b).norm() <= s.bound_b + k.bound_b);
    assert_eq!(k.method, Method::CauchyDisk);
    assert_eq!(k.bound_kind, BoundKind::SampledSupremum);
}

/// Values on [0.99, 1.01] are fitted by a quartic to 1e-8 relative.
#[test]
fn cauchy_is_smooth_through_one() {
    let p = make_params(1.7, 10).unwrap();
    let table = build_coeff_table(p.nu, 5).unwrap();
    let bounds = error_bounds_ab_table(&table, &p, 5).unwrap();
    let xs: Vec<f64> = (0..11).map(|k| -1.0 + 0.2 * k as f64).collect();
    let ys: Vec<f64> = xs
        .iter()
        .map(|&w| ab_cauchy_with(&table, &bounds, &p, c(1.0 + 0.01 * w, 0.0), 5).unwrap().a.re)
        .collect();
    // least squares in the monomial basis of w via normal equations
    let deg = 5;
    let mut m = vec![vec![0.0; deg + 1]; deg];
    for (&w, &y) in xs.iter().zip(&ys) {
        for i in 0..deg {
            for j in 0..deg {
                m[i][j] += w.powi((i + j) as i32);
            }
            m[i][deg] += y * w.powi(i as i32);
        }
    }
    for i in 0..deg {
        let piv = m[i][i];
        for r in 0..deg {
            if r != i {
                let f = m[r][i] / piv;
                for col in 0..=deg {
                    m[r][col] -= f * m[i][col];
                }
            }
        }
    }
    let coef: Vec<f64> = (0..deg).map(|i| m[i][deg] / m[i][i]).collect();
    for (&w, &y) in xs.iter().zip(&ys) {
        let fit: f64 = coef.iter().enumerate().map(|(i, a)| a * w.powi(i as i32)).sum();
        assert!((fit - y).abs() <= 1e-8 * y.abs(), "w={w}: {}", (fit - y).abs() / y.abs());
    }
}

#[test]
fn cauchy_bound_pieces() {
    assert!((contour_length_factor(c(1.0, 0.0)).unwrap() - 2.0 * PI).abs() < 1e-15);
    assert!(contour_length_factor(c(2.5, 0.0)).is_err());
    let one = error_bounds_ab(&make_params(1.0, 12).unwrap(), 5).unwrap();
    let z = c(0.9, 0.0);
    assert_eq!(one.bound_b(z).unwrap(), 0.0);
    assert!(one.bound_a(z).unwrap() > 0.0);
    let b1 = error_bounds_ab(&make_params(1.7, 40).unwrap(), 3).unwrap();
    let b2 = error_bounds_ab(&make_params(1.7, 82).unwrap(), 3).unwrap();
    let slope = (b2.delta_a(z).unwrap() / b1.delta_a(z).unwrap()).ln() / (83.7f64 / 41.7).ln();
    assert!((slope + 3.0).abs() < 0.3, "slope {slope}");
}

#[test]
fn region_and_domain_errors() {
    let p = make_params(1.7, 10).unwrap();
    let near = map_point(c(1.5, 0.3)).unwrap();
    assert!(matches!(ab_series(&p, &near, 5), Err(Error::Region(_))));
    assert!(matches!(ab_series(&p, &map_point(c(3.0, 0.0)).unwrap(), 4), Err(Error::Domain(_))));
    assert!(matches!(ab_cauchy(&p, c(2.5, 0.0), 5), Err(Error::Region(_))));
    assert!(eval_c_real(&p, 2.0, 4).is_err());
}

#[test]
fn all_solutions_against_oracle() {
    let p = make_params(1.7, 10).unwrap();
    let s = eval_all_solutions(&p, 3.5, 5).unwrap();
    let oc = oracle_c(&p, 3.5, 40).to_f64();
    let od = oracle_d(&p, 3.5, 40).unwrap().to_f64();
    assert!((s.c.value - oc).abs() <= s.c.bound, "{} vs {oc}", s.c.value);
    let d = s.d.unwrap();
    assert!((d.value - od).abs() <= d.bound);

    let s = eval_all_solutions(&p, 3.25, 5).unwrap();
    let hat = oracle_hat_c(&p, 3.25, 40).unwrap().to_f64();
    let d = s.d.unwrap();
    let comb = s.c.value + 2.0 * (p.nu * PI).sin() / PI * d.value;
    assert!((comb - hat).abs() <= s.c.bound + d.bound + 1e-13 * hat.abs());

    // D_{n,+1} is dominated by -pi i C for large z
    let z = 50.0;
    let s = eval_all_solutions(&p, z, 5).unwrap();
    let oc = oracle_c(&p, z, 40).to_f64();
    assert!((s.d_plus.unwrap() - c(0.0, -PI * oc)).norm() <= PI * s.c.bound + 1e-14 * oc);
    let pochhammer_term = (1..=10).fold(1.0, |acc, k| acc * (1.7 + k as f64 - 1.0) * 2.0 * z / k as f64);
    assert!((s.d_plus.unwrap() / c(0.0, -PI * pochhammer_term) - 1.0).norm() < 0.05);

    // near one the Cauchy form is used; at one the closed form
    let s = eval_all_solutions(&p, 1.4, 5).unwrap();
    assert_eq!(s.ab.unwrap().method, Method::CauchyDisk);
    let oc = oracle_c(&p, 1.4, 40).to_f64();
    assert!((s.c.value - oc).abs() <= s.c.bound);
    let s = eval_all_solutions(&p, 1.0, 5).unwrap();
    assert!((s.c.value / oracle_c(&p, 1.0, 40).to_f64() - 1.0).abs() < 1e-14);
    assert!(s.d.is_none());
}

fn sign_changes(f: impl Fn(f64) -> f64, lo: f64, hi: f64, m: usize) -> Vec<f64> {
    let mut out = Vec::new();
    let mut prev = f(lo);
    let mut prev_t = lo;
    for k in 1..=m {
        let t = lo + (hi - lo) * k as f64 / m as f64;
        let v = f(t);
        if v * prev < 0.0 {
            out.push(0.5 * (t + prev_t));
        }
        prev = v;
        prev_t = t;
    }
    out
}

#[test]
fn zeros_interlace_with_derivative_factor() {
    let p = make_params(1.7, 10).unwrap();
    let q = make_params(2.7, 9).unwrap();
    let ep = IntervalEvaluator::new(&p, 4).unwrap();
    let eq = IntervalEvaluator::new(&q, 4).unwrap();
    let hi = FRAC_PI_2 - 1e-3;
    let zc = sign_changes(|t| ep.eval(t).unwrap().value, 1e-3, hi, 2000);
    let zd = sign_changes(|t| eq.eval(t).unwrap().value, 1e-3, hi, 2000);
    let oracle = sign_changes(|t| oracle_c(&p, t.cos(), 30).to_f64(), 1e-3, hi, 2000);
    assert_eq!(zc.len(), oracle.len());
    assert_eq!(zc.len(), 5);
    assert_eq!(zd.len(), 4);
    for k in 0..zd.len() {
        assert!(zc[k] < zd[k] && zd[k] < zc[k + 1]);
    }
}

#[test]
fn envelope_anchors_from_asymptotics() {
    let p = make_params(1.7, 10).unwrap();
    let q = make_params(2.7, 9).unwrap();
    let env = |t: f64| {
        let a = eval_c_real(&p, t, 4).unwrap().value;
        let b = 2.0 * 1.7 / 10.0 * eval_c_real(&q, t, 4).unwrap().value;
        (a * a + b * b).sqrt()
    };
    assert!((env(0.0) - 392.308).abs() < 5e-4);
    assert!((env(FRAC_PI_2) - 3.791).abs() < 5e-4);
    let o = oracle_envelope(&p, FRAC_PI_2, 30).to_f64();
    assert!((env(FRAC_PI_2) / o - 1.0).abs() < 1e-9);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]
    #[test]
    fn cauchy_reality_on_the_axis(x in 0.05f64..1.95, lambda in 0.3f64..3.0) {
        let p = make_params(lambda, 15).unwrap();
        let r = ab_cauchy(&p, c(x, 0.0), 5).unwrap();
        let scale = r.a.norm().max(r.b.norm());
        prop_assert!(r.a.im.abs() <= 1e-10 * scale);
        if x > 1.0 {
            prop_assert!(r.b.im.abs() <= 1e-10 * scale);
        } else {
            prop_assert!(r.b.re.abs() <= 1e-10 * scale);
        }
        prop_assert!(r.bound_a >= 0.0 && r.bound_b >= 0.0);
    }

    #[test]
    fn series_reality_and_bounds(x in 2.0f64..8.0, lambda in 0.3f64..3.0, n in 8i64..40) {
        let p = make_params(lambda, n).unwrap();
        let r = ab_series(&p, &map_point(c(x, 0.0)).unwrap(), 3).unwrap();
        prop_assert!(r.a.im == 0.0 && r.b.im == 0.0);
        prop_assert!(r.bound_a >= 0.0 && r.bound_b >= 0.0);
    }
}
